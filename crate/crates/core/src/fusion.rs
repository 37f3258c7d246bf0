//! Fusion coefficients from the Verlinde formula, the Kac-Walton oracle,
//! and the dominant multiplicity matrices `M` and `L = M^{-1}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::modular_data::ModularData;
use crate::rootsys::{FiniteWeight, SimpleAlgebra};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Verlinde,
    Oracle,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Verlinde => "verlinde",
            Provenance::Oracle => "oracle",
        })
    }
}

/// `N_{a,b}^c` for all weight indices of a level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FusionTable {
    pub algebra: String,
    pub level: u32,
    pub size: usize,
    pub provenance: Provenance,
    data: Vec<u64>,
}

impl FusionTable {
    fn new(md: &ModularData, provenance: Provenance) -> Self {
        let n = md.len();
        FusionTable {
            algebra: md.algebra().name(),
            level: md.level(),
            size: n,
            provenance,
            data: vec![0; n * n * n],
        }
    }

    fn slot(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.size + b) * self.size + c
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> u64 {
        self.data[self.slot(a, b, c)]
    }

    /// Entries agree, regardless of provenance.
    pub fn same_coefficients(&self, other: &FusionTable) -> bool {
        self.size == other.size && self.data == other.data
    }

    /// First triple where the two tables disagree.
    pub fn first_difference(&self, other: &FusionTable) -> Option<(usize, usize, usize)> {
        let n = self.size;
        (0..n * n * n)
            .find(|&i| self.data[i] != other.data[i])
            .map(|i| (i / (n * n), (i / n) % n, i % n))
    }

    pub fn is_unital(&self) -> bool {
        let n = self.size;
        (0..n).all(|b| (0..n).all(|c| self.get(0, b, c) == (b == c) as u64))
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.size;
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.get(a, b, c) == self.get(b, a, c))))
    }

    /// `sum_g N_{ab}^g N_{gc}^d = sum_g N_{bc}^g N_{ag}^d`.
    pub fn is_associative(&self) -> bool {
        let n = self.size;
        (0..n).into_par_iter().all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| {
                    (0..n).all(|d| {
                        let lhs: u64 = (0..n).map(|g| self.get(a, b, g) * self.get(g, c, d)).sum();
                        let rhs: u64 = (0..n).map(|g| self.get(b, c, g) * self.get(a, g, d)).sum();
                        lhs == rhs
                    })
                })
            })
        })
    }

    /// `N_{Ca,Cb}^{Cc} = N_{a,b}^c`.
    pub fn is_conjugation_covariant(&self, conj: &[usize]) -> bool {
        let n = self.size;
        (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| self.get(conj[a], conj[b], conj[c]) == self.get(a, b, c)))
        })
    }

    /// Rows `(a, b, c, N)` with nonzero `N`, in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, u64)> + '_ {
        let n = self.size;
        (0..n * n * n)
            .filter(move |&i| self.data[i] != 0)
            .map(move |i| (i / (n * n), (i / n) % n, i % n, self.data[i]))
    }
}

fn to_count(x: &CycNumber, what: impl FnOnce() -> String) -> Result<u64> {
    match x.to_integer() {
        Some(v) if !v.is_negative() => v
            .to_u64()
            .ok_or_else(|| Error::Internal(format!("{} overflows u64", what()))),
        _ => Err(Error::Internal(format!(
            "{} = {x} is not a non-negative integer",
            what()
        ))),
    }
}

/// `N_{a,b}^c = sum_g S_{a g} S_{b g} S^*_{c g} / S_{0 g}`, exactly.
pub fn verlinde_coefficient(md: &ModularData, a: usize, b: usize, c: usize) -> Result<u64> {
    let star = md.s_star();
    let sum = (0..md.len()).fold(CycNumber::zero(md.order()), |acc, g| {
        acc + &(md.s_entry(a, g) * md.ratio(b, g)) * &star[c][g]
    });
    to_count(&sum, || format!("Verlinde N_{{{a},{b}}}^{{{c}}}"))
}

/// The full table via the Verlinde formula.
pub fn verlinde_table(md: &ModularData) -> Result<FusionTable> {
    let n = md.len();
    let star = md.s_star();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let rows: Vec<((usize, usize), Vec<u64>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let v: Vec<CycNumber> = (0..n).map(|g| md.s_entry(a, g) * md.ratio(b, g)).collect();
            let row = (0..n)
                .map(|c| {
                    let sum = v
                        .iter()
                        .zip(&star[c])
                        .fold(CycNumber::zero(md.order()), |acc, (x, y)| acc + x * y);
                    to_count(&sum, || format!("Verlinde N_{{{a},{b}}}^{{{c}}}"))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(((a, b), row))
        })
        .collect::<Result<_>>()?;
    let mut table = FusionTable::new(md, Provenance::Verlinde);
    for ((a, b), row) in rows {
        for (c, v) in row.into_iter().enumerate() {
            let i = table.slot(a, b, c);
            let j = table.slot(b, a, c);
            table.data[i] = v;
            table.data[j] = v;
        }
    }
    Ok(table)
}

/// Tensor product multiplicities of `L(lambda) (x) L(mu)` by the
/// Brauer-Klimyk rule, iterating over the smaller weight system.
pub fn tensor_oracle(
    alg: &SimpleAlgebra,
    lambda: &FiniteWeight,
    mu: &FiniteWeight,
) -> Result<BTreeMap<FiniteWeight, u64>> {
    for w in [lambda, mu] {
        if w.rank() != alg.rank() {
            return Err(Error::DimensionMismatch {
                expected: alg.rank(),
                got: w.rank(),
            });
        }
        if !w.is_dominant() {
            return Err(Error::NotDominant(w.0.clone()));
        }
    }
    let (big, small) = if alg.weyl_dimension(lambda) >= alg.weyl_dimension(mu) {
        (lambda, mu)
    } else {
        (mu, lambda)
    };
    let shifted = big.add(alg.rho());
    let mut acc: BTreeMap<FiniteWeight, i64> = BTreeMap::new();
    for (pi, mult) in alg.weight_system(small)? {
        let f = alg.dominant_reduce(&shifted.add(&pi));
        if f.sign != 0 {
            *acc.entry(f.weight.sub(alg.rho())).or_default() += f.sign as i64 * mult as i64;
        }
    }
    collect_counts(acc, "tensor product")
}

fn collect_counts<K: Ord + fmt::Debug>(acc: BTreeMap<K, i64>, what: &str) -> Result<BTreeMap<K, u64>> {
    acc.into_iter()
        .filter(|(_, v)| *v != 0)
        .map(|(k, v)| {
            if v < 0 {
                Err(Error::Internal(format!("{what}: negative multiplicity {v} at {k:?}")))
            } else {
                Ok((k, v as u64))
            }
        })
        .collect()
}

/// Level-`k` fusion of `a` and `b` from the finite tensor product, folded
/// into the shifted alcove. Returns `c -> N_{a,b}^c` for nonzero entries.
pub fn kac_walton_fold(md: &ModularData, a: usize, b: usize) -> Result<BTreeMap<usize, u64>> {
    let alg = md.algebra();
    let w = md.weights();
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for (nu, mult) in tensor_oracle(alg, &w[a].labels, &w[b].labels)? {
        let f = alg.alcove_reduce(md.shifted_level(), &nu.add(alg.rho()));
        if f.sign == 0 {
            continue;
        }
        let image = f.weight.sub(alg.rho());
        let c = md
            .index_of(&image)
            .ok_or_else(|| Error::UnknownWeight(image.0.clone()))?;
        *acc.entry(c).or_default() += f.sign as i64 * mult as i64;
    }
    collect_counts(acc, "Kac-Walton fold")
}

/// The full table via [`kac_walton_fold`].
pub fn kac_walton_table(md: &ModularData) -> Result<FusionTable> {
    let n = md.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let rows: Vec<_> = pairs
        .par_iter()
        .map(|&(a, b)| kac_walton_fold(md, a, b).map(|r| (a, b, r)))
        .collect::<Result<_>>()?;
    let mut table = FusionTable::new(md, Provenance::Oracle);
    for (a, b, r) in rows {
        for (c, v) in r {
            let i = table.slot(a, b, c);
            table.data[i] = v;
        }
    }
    Ok(table)
}

/// `M[i][j] = m_{w_i}^{w_j}` (dominant weight multiplicities) and its
/// inverse `L`, both lower unitriangular over a downward-closed list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityMatrices {
    pub weights: Vec<FiniteWeight>,
    pub m: Vec<Vec<i64>>,
    pub l: Vec<Vec<i64>>,
    #[serde(skip)]
    index: HashMap<FiniteWeight, usize>,
}

impl MultiplicityMatrices {
    pub fn index_of(&self, w: &FiniteWeight) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// `ell_lambda^mu`.
    pub fn ell(&self, lambda: &FiniteWeight, mu: &FiniteWeight) -> Option<i64> {
        Some(self.l[self.index_of(lambda)?][self.index_of(mu)?])
    }

    pub fn is_inverse_pair(&self) -> bool {
        let n = self.weights.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let v: i64 = (0..n).map(|g| self.m[i][g] * self.l[g][j]).sum();
                v == (i == j) as i64
            })
        })
    }
}

/// Builds `M` and `L`. Every weight dominated by a listed weight must also
/// be listed, and earlier in the list.
pub fn multiplicity_matrices(
    alg: &SimpleAlgebra,
    weights: &[FiniteWeight],
) -> Result<MultiplicityMatrices> {
    let index: HashMap<FiniteWeight, usize> =
        weights.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    if index.len() != weights.len() {
        return Err(Error::BadWeightList("duplicate weights".into()));
    }
    let n = weights.len();
    let rows: Vec<Vec<i64>> = weights
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let mults = alg.freudenthal_multiplicities(w)?;
            let mut row = vec![0i64; n];
            for (mu, m) in mults {
                match index.get(&mu) {
                    Some(&j) if j <= i => row[j] = m as i64,
                    Some(_) => {
                        return Err(Error::BadWeightList(format!(
                            "{mu} is listed after {w}, which dominates it"
                        )))
                    }
                    None => {
                        return Err(Error::BadWeightList(format!(
                            "{mu} is dominated by {w} but missing"
                        )))
                    }
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    // Forward substitution for the unitriangular inverse.
    let mut l = vec![vec![0i64; n]; n];
    for i in 0..n {
        l[i][i] = 1;
        for j in 0..i {
            let s: i64 = (j..i).map(|g| rows[i][g] * l[g][j]).sum();
            l[i][j] = -s;
        }
    }
    Ok(MultiplicityMatrices {
        weights: weights.to_vec(),
        m: rows,
        l,
        index,
    })
}

/// Dominant weights of level at most `k`, ordered by height, then colex.
/// This list is closed under dominance.
pub fn dominant_weights_by_height(alg: &SimpleAlgebra, k: u32) -> Vec<FiniteWeight> {
    let mut ws: Vec<FiniteWeight> = crate::modular_data::enumerate_weights(alg, k)
        .into_iter()
        .map(|w| w.labels)
        .collect();
    ws.sort_by_cached_key(|w| alg.height(w));
    ws
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn fw(v: &[i64]) -> FiniteWeight {
        FiniteWeight(v.to_vec())
    }

    fn md(name: &str, k: u32) -> ModularData {
        ModularData::build(Arc::new(SimpleAlgebra::parse(name).unwrap()), k).unwrap()
    }

    #[test]
    fn clebsch_gordan() {
        let a1 = SimpleAlgebra::parse("A1").unwrap();
        let t = tensor_oracle(&a1, &fw(&[1]), &fw(&[1])).unwrap();
        assert_eq!(t, BTreeMap::from([(fw(&[0]), 1), (fw(&[2]), 1)]));
        let t = tensor_oracle(&a1, &fw(&[3]), &fw(&[0])).unwrap();
        assert_eq!(t, BTreeMap::from([(fw(&[3]), 1)]));
        let a2 = SimpleAlgebra::parse("A2").unwrap();
        let t = tensor_oracle(&a2, &fw(&[1, 0]), &fw(&[0, 1])).unwrap();
        assert_eq!(t, BTreeMap::from([(fw(&[0, 0]), 1), (fw(&[1, 1]), 1)]));
    }

    #[test]
    fn verlinde_small() {
        let d = md("A1", 1);
        assert_eq!(verlinde_coefficient(&d, 1, 1, 0).unwrap(), 1);
        assert_eq!(verlinde_coefficient(&d, 1, 1, 1).unwrap(), 0);
        let d = md("A2", 1);
        assert_eq!(verlinde_coefficient(&d, 1, 1, 2).unwrap(), 1);
    }

    #[test]
    fn kac_walton_small() {
        let d = md("A1", 1);
        assert_eq!(kac_walton_fold(&d, 1, 1).unwrap(), BTreeMap::from([(0, 1)]));
        let d = md("A1", 2);
        assert_eq!(kac_walton_fold(&d, 1, 1).unwrap(), BTreeMap::from([(0, 1), (2, 1)]));
    }

    #[test]
    fn tables_agree() {
        for (name, k) in [("A1", 3), ("A2", 2), ("G2", 2), ("B2", 2)] {
            let d = md(name, k);
            let v = verlinde_table(&d).unwrap();
            let o = kac_walton_table(&d).unwrap();
            assert_eq!(v.first_difference(&o), None, "{name} {k}");
            assert!(v.is_unital() && v.is_commutative() && v.is_associative());
            assert!(v.is_conjugation_covariant(d.conj()));
        }
    }

    #[test]
    fn multiplicity_matrix_a1() {
        let a1 = SimpleAlgebra::parse("A1").unwrap();
        let mm = multiplicity_matrices(&a1, &[fw(&[0]), fw(&[2])]).unwrap();
        assert_eq!(mm.m, vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(mm.l, vec![vec![1, 0], vec![-1, 1]]);
        let mm = multiplicity_matrices(&a1, &[fw(&[0])]).unwrap();
        assert_eq!(mm.l, vec![vec![1]]);
        assert!(multiplicity_matrices(&a1, &[fw(&[2])]).is_err());
        assert!(multiplicity_matrices(&a1, &[fw(&[2]), fw(&[0])]).is_err());
    }

    #[test]
    fn multiplicity_matrix_a2_is_inverse() {
        let a2 = SimpleAlgebra::parse("A2").unwrap();
        let ws = dominant_weights_by_height(&a2, 4);
        let mm = multiplicity_matrices(&a2, &ws).unwrap();
        assert!(mm.is_inverse_pair());
    }
}
