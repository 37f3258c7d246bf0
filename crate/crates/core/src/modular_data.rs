//! Level-k weights and the exact Kac-Peterson matrices `S` and `T`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{sqrt_integer, CycNumber};
use crate::error::{Error, Result};
use crate::rootsys::{FiniteWeight, SimpleAlgebra};

/// Largest Weyl group handled by the exact backend (F4).
pub const EXACT_WEYL_LIMIT: u64 = 1152;

/// An integrable highest weight of `X_r^(1)` at level `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineWeight {
    pub level: u32,
    pub labels: FiniteWeight,
}

impl AffineWeight {
    /// `lambda_0 = k - sum_i a_i^vee lambda_i`.
    pub fn zeroth_label(&self, alg: &SimpleAlgebra) -> i64 {
        self.level as i64 - alg.level_of(&self.labels)
    }
}

impl fmt::Display for AffineWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels)
    }
}

/// `P_+^k`, vacuum first, then colexicographic on the finite labels
/// (last label most significant).
pub fn enumerate_weights(alg: &SimpleAlgebra, k: u32) -> Vec<AffineWeight> {
    fn rec(
        alg: &SimpleAlgebra,
        i: usize,
        budget: i64,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if i == alg.rank() {
            out.push(cur.clone());
            return;
        }
        let c = alg.comarks()[i];
        let mut v = 0;
        while v * c <= budget {
            cur.push(v);
            rec(alg, i + 1, budget - v * c, cur, out);
            cur.pop();
            v += 1;
        }
    }
    let mut raw = Vec::new();
    rec(alg, 0, k as i64, &mut Vec::new(), &mut raw);
    raw.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    raw.into_iter()
        .map(|labels| AffineWeight {
            level: k,
            labels: FiniteWeight(labels),
        })
        .collect()
}

/// `N = lcm(24, 4 D m, 4 P m)` with `m = k + h^vee`.
pub fn cyclotomic_order(alg: &SimpleAlgebra, k: u32) -> u32 {
    let m = k as i64 + alg.dual_coxeter();
    let d = alg.form_denominator();
    let p = alg.center_index();
    let n = 24i64.lcm(&(4 * d * m)).lcm(&(4 * p * m));
    n as u32
}

/// Exact modular data of `X_r^(1)` at level `k`.
pub struct ModularData {
    algebra: Arc<SimpleAlgebra>,
    level: u32,
    shifted_level: i64,
    order: u32,
    weights: Vec<AffineWeight>,
    index: HashMap<FiniteWeight, usize>,
    s: Vec<Vec<CycNumber>>,
    t: Vec<CycNumber>,
    conj: Vec<usize>,
    kappa: CycNumber,
    s_star: OnceLock<Vec<Vec<CycNumber>>>,
    ratios: OnceLock<Vec<Vec<CycNumber>>>,
    inverses: RwLock<HashMap<(usize, usize), CycNumber>>,
}

impl fmt::Debug for ModularData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModularData")
            .field("algebra", &self.algebra.name())
            .field("level", &self.level)
            .field("order", &self.order)
            .field("weights", &self.weights.len())
            .finish()
    }
}

/// Matrix product over `Q(zeta_N)`.
pub fn mat_mul(a: &[Vec<CycNumber>], b: &[Vec<CycNumber>], order: u32) -> Vec<Vec<CycNumber>> {
    let n = b.first().map_or(0, |r| r.len());
    a.par_iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, brow)| !x.is_zero() && !brow[j].is_zero())
                        .fold(CycNumber::zero(order), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

/// `i^{|Delta_+|} / sqrt(|P/Q^vee| m^r)`.
fn normalization(alg: &SimpleAlgebra, m: i64, order: u32) -> Result<CycNumber> {
    let d = alg.center_index() as u64 * (m as u64).pow(alg.rank() as u32);
    let root = sqrt_integer(d);
    let i_pow = CycNumber::root_of_unity(4, alg.n_pos_roots() as i64);
    let inv_root = root.scale(&num_rational::BigRational::new(1.into(), (d as i64).into()));
    let kappa = &i_pow * &inv_root;
    kappa.promote(order).map_err(|_| {
        Error::Internal(format!(
            "normalization lives at order {} which does not divide N = {order}",
            kappa.order()
        ))
    })
}

/// `(N/m) * (w^i, w^j)`, asserted integral.
fn scaled_form(alg: &SimpleAlgebra, m: i64, order: u32) -> Result<Vec<Vec<i64>>> {
    let factor = Rational64::new(order as i64, m);
    alg.quadratic_form()
        .iter()
        .map(|row| {
            row.iter()
                .map(|q| {
                    let v = *q * factor;
                    if v.is_integer() {
                        Ok(v.to_integer())
                    } else {
                        Err(Error::NonIntegralExponent {
                            what: "S-matrix Weyl sum".into(),
                            value: v.to_string(),
                            order,
                        })
                    }
                })
                .collect()
        })
        .collect()
}

fn dot_form(g: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    let mut acc = 0;
    for (i, &xi) in x.iter().enumerate() {
        if xi != 0 {
            for (j, &yj) in y.iter().enumerate() {
                acc += g[i][j] * xi * yj;
            }
        }
    }
    acc
}

impl ModularData {
    /// Builds `P_+^k`, `S`, `T` and `C` exactly.
    pub fn build(algebra: Arc<SimpleAlgebra>, k: u32) -> Result<Self> {
        if algebra.weyl_order() > EXACT_WEYL_LIMIT {
            return Err(Error::ExactBound {
                weyl_order: algebra.weyl_order(),
                limit: EXACT_WEYL_LIMIT,
            });
        }
        let order = cyclotomic_order(&algebra, k);
        let weights = enumerate_weights(&algebra, k);
        let kappa = normalization(&algebra, k as i64 + algebra.dual_coxeter(), order)?;
        let s = build_smatrix(&algebra, k, order, &weights, &kappa)?;
        let t = build_tmatrix(&algebra, k, order, &weights)?;
        Self::assemble(algebra, k, s, t, kappa)
    }

    /// Rebuilds from stored `S` and `T` (cache load). The weight list and
    /// order are recomputed and checked against the matrices' shape.
    pub fn from_matrices(
        algebra: Arc<SimpleAlgebra>,
        k: u32,
        s: Vec<Vec<CycNumber>>,
        t: Vec<CycNumber>,
    ) -> Result<Self> {
        let order = cyclotomic_order(&algebra, k);
        let n = enumerate_weights(&algebra, k).len();
        if s.len() != n || s.iter().any(|r| r.len() != n) || t.len() != n {
            return Err(Error::Internal(format!(
                "stored matrices do not match |P_+^k| = {n}"
            )));
        }
        let promote = |x: CycNumber| x.promote(order);
        let s = s
            .into_iter()
            .map(|row| row.into_iter().map(promote).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let t = t.into_iter().map(promote).collect::<Result<Vec<_>>>()?;
        let kappa = normalization(&algebra, k as i64 + algebra.dual_coxeter(), order)?;
        Self::assemble(algebra, k, s, t, kappa)
    }

    fn assemble(
        algebra: Arc<SimpleAlgebra>,
        k: u32,
        s: Vec<Vec<CycNumber>>,
        t: Vec<CycNumber>,
        kappa: CycNumber,
    ) -> Result<Self> {
        let order = cyclotomic_order(&algebra, k);
        let weights = enumerate_weights(&algebra, k);
        let index = weights
            .iter()
            .enumerate()
            .map(|(i, w)| (w.labels.clone(), i))
            .collect();
        let mut md = ModularData {
            shifted_level: k as i64 + algebra.dual_coxeter(),
            algebra,
            level: k,
            order,
            weights,
            index,
            s,
            t,
            conj: Vec::new(),
            kappa,
            s_star: OnceLock::new(),
            ratios: OnceLock::new(),
            inverses: RwLock::new(HashMap::new()),
        };
        for (j, x) in md.s[0].iter().enumerate() {
            let z = x.embed();
            if !(z.re > 0.0 && z.im.abs() < 1e-9 * z.re.max(1.0)) {
                return Err(Error::Internal(format!(
                    "S_(0,{}) = {z} is not positive real",
                    md.weights[j]
                )));
            }
        }
        md.conj = md.charge_conjugation()?;
        Ok(md)
    }

    /// Reads `C` off `S^2`, asserting it is a 0/1 permutation matrix.
    fn charge_conjugation(&self) -> Result<Vec<usize>> {
        let s2 = self.s_squared();
        let one = CycNumber::one(self.order);
        let mut perm = Vec::with_capacity(s2.len());
        for (i, row) in s2.iter().enumerate() {
            let mut hit = None;
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if *x != one || hit.is_some() {
                    return Err(Error::Internal(format!(
                        "S^2 is not a permutation matrix (row {})",
                        self.weights[i]
                    )));
                }
                hit = Some(j);
            }
            perm.push(hit.ok_or_else(|| Error::Internal("S^2 has a zero row".into()))?);
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::Internal("S^2 is not a bijection".into()));
            }
        }
        if perm[0] != 0 {
            return Err(Error::Internal("charge conjugation moves the vacuum".into()));
        }
        Ok(perm)
    }

    pub fn algebra(&self) -> &SimpleAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> Arc<SimpleAlgebra> {
        self.algebra.clone()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `m = k + h^vee`.
    pub fn shifted_level(&self) -> i64 {
        self.shifted_level
    }

    /// Cyclotomic order `N` holding every entry of `S` and `T`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn weights(&self) -> &[AffineWeight] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn index_of(&self, labels: &FiniteWeight) -> Option<usize> {
        self.index.get(labels).copied()
    }

    pub fn s(&self) -> &[Vec<CycNumber>] {
        &self.s
    }

    pub fn s_entry(&self, a: usize, b: usize) -> &CycNumber {
        &self.s[a][b]
    }

    /// Diagonal of `T`.
    pub fn t(&self) -> &[CycNumber] {
        &self.t
    }

    /// Charge conjugation as a permutation of weight indices.
    pub fn conj(&self) -> &[usize] {
        &self.conj
    }

    /// The normalization constant of the Weyl sum.
    pub fn kappa(&self) -> &CycNumber {
        &self.kappa
    }

    /// Entrywise complex conjugate `S^*`.
    pub fn s_star(&self) -> &[Vec<CycNumber>] {
        self.s_star.get_or_init(|| {
            self.s
                .par_iter()
                .map(|row| row.iter().map(CycNumber::conj).collect())
                .collect()
        })
    }

    /// `S_{a,b}^{-1}`, memoised.
    pub fn s_inverse(&self, a: usize, b: usize) -> Result<CycNumber> {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(x) = self.inverses.read().expect("inverse cache poisoned").get(&key) {
            return Ok(x.clone());
        }
        let inv = self.s[a][b].inverse()?;
        self.inverses
            .write()
            .expect("inverse cache poisoned")
            .insert(key, inv.clone());
        Ok(inv)
    }

    /// `S_{a,b} / S_{0,b}`, the character of `a` evaluated at the point
    /// labelled by `b`.
    pub fn ratio(&self, a: usize, b: usize) -> &CycNumber {
        &self.ratios()[a][b]
    }

    fn ratios(&self) -> &Vec<Vec<CycNumber>> {
        self.ratios.get_or_init(|| {
            let inv0: Vec<CycNumber> = (0..self.len())
                .into_par_iter()
                .map(|b| self.s_inverse(0, b).expect("quantum dimensions are nonzero"))
                .collect();
            self.s
                .par_iter()
                .map(|row| row.iter().zip(&inv0).map(|(x, y)| x * y).collect())
                .collect()
        })
    }

    pub fn s_squared(&self) -> Vec<Vec<CycNumber>> {
        mat_mul(&self.s, &self.s, self.order)
    }

    /// Exact symmetry `S = S^T`.
    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| (i + 1..self.len()).all(|j| self.s[i][j] == self.s[j][i]))
    }

    /// Exact unitarity `S S^dagger = I`.
    pub fn is_unitary(&self) -> bool {
        let star = self.s_star();
        let n = self.len();
        let one = CycNumber::one(self.order);
        (0..n).into_par_iter().all(|i| {
            (0..n).all(|j| {
                let v = (0..n).fold(CycNumber::zero(self.order), |acc, g| {
                    acc + &self.s[i][g] * &star[j][g]
                });
                if i == j {
                    v == one
                } else {
                    v.is_zero()
                }
            })
        })
    }

    /// `C^2 = 1`.
    pub fn conj_is_involution(&self) -> bool {
        self.conj.iter().enumerate().all(|(i, &c)| self.conj[c] == i)
    }

    /// Exact modular relation `(S T)^3 = S^2`.
    pub fn satisfies_modular_relation(&self) -> bool {
        let st: Vec<Vec<CycNumber>> = self
            .s
            .iter()
            .map(|row| row.iter().zip(&self.t).map(|(x, t)| x * t).collect())
            .collect();
        let st2 = mat_mul(&st, &st, self.order);
        let st3 = mat_mul(&st2, &st, self.order);
        st3 == self.s_squared()
    }
}

fn build_smatrix(
    alg: &SimpleAlgebra,
    k: u32,
    order: u32,
    weights: &[AffineWeight],
    kappa: &CycNumber,
) -> Result<Vec<Vec<CycNumber>>> {
    let m = k as i64 + alg.dual_coxeter();
    let g = scaled_form(alg, m, order)?;
    let n = order as i64;
    let shifted: Vec<FiniteWeight> = weights.iter().map(|w| w.labels.add(alg.rho())).collect();
    shifted
        .par_iter()
        .map(|lr| {
            let orbit = alg
                .signed_orbit(lr)
                .ok_or_else(|| Error::Internal(format!("{lr} is not regular")))?;
            let row = shifted
                .iter()
                .map(|mr| {
                    let mut counts = vec![0i64; order as usize];
                    for (x, sign) in &orbit {
                        let e = (-dot_form(&g, x.labels(), mr.labels())).rem_euclid(n);
                        counts[e as usize] += *sign as i64;
                    }
                    kappa * &CycNumber::from_exponent_counts(order, &counts)
                })
                .collect();
            Ok(row)
        })
        .collect()
}

/// Exponent of `T_lambda` at order `N`:
/// `N ((lambda, lambda + 2 rho) / 2m - c/24)` with `c = k dim g / m`.
pub fn t_exponent(alg: &SimpleAlgebra, k: u32, order: u32, lambda: &FiniteWeight) -> Result<i64> {
    let m = k as i64 + alg.dual_coxeter();
    let two_rho = alg.rho().scale(2);
    let q = alg.ip(lambda.labels(), lambda.add(&two_rho).labels());
    let c = Rational64::new(k as i64 * alg.dim() as i64, m);
    let e = (q / (2 * m) - c / 24) * order as i64;
    if !e.is_integer() {
        return Err(Error::NonIntegralExponent {
            what: format!("T at {lambda}"),
            value: e.to_string(),
            order,
        });
    }
    Ok(e.to_integer())
}

fn build_tmatrix(
    alg: &SimpleAlgebra,
    k: u32,
    order: u32,
    weights: &[AffineWeight],
) -> Result<Vec<CycNumber>> {
    weights
        .iter()
        .map(|w| {
            let e = t_exponent(alg, k, order, &w.labels)?;
            Ok(CycNumber::root_of_unity(order, e))
        })
        .collect()
}

/// `(lambda, lambda + 2 rho) / 2m`, the conformal weight.
pub fn conformal_weight(alg: &SimpleAlgebra, k: u32, lambda: &FiniteWeight) -> Rational64 {
    let m = k as i64 + alg.dual_coxeter();
    let two_rho = alg.rho().scale(2);
    alg.ip(lambda.labels(), lambda.add(&two_rho).labels()) / (2 * m)
}

/// Central charge `k dim g / (k + h^vee)`.
pub fn central_charge(alg: &SimpleAlgebra, k: u32) -> Rational64 {
    let m = k as i64 + alg.dual_coxeter();
    Rational64::new(k as i64 * alg.dim() as i64, m)
}
