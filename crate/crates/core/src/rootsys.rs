//! Root systems of the finite simple Lie algebras `X_r` and the Weyl-group
//! machinery built on them.
//!
//! Weights are always written in the fundamental-weight basis (Dynkin
//! labels). The invariant bilinear form is normalised so that long roots
//! have squared length 2.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_rational::{Ratio, Rational64};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cartan-Killing family of a simple Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        };
        write!(f, "{c}")
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            "F" => Ok(Family::F),
            "G" => Ok(Family::G),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

/// A weight of `X_r` given by its Dynkin labels. Labels may be negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteWeight(pub Vec<i64>);

impl FiniteWeight {
    pub fn zero(rank: usize) -> Self {
        FiniteWeight(vec![0; rank])
    }

    pub fn labels(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&l| l >= 0)
    }

    pub fn add(&self, other: &FiniteWeight) -> FiniteWeight {
        FiniteWeight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &FiniteWeight) -> FiniteWeight {
        FiniteWeight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: i64) -> FiniteWeight {
        FiniteWeight(self.0.iter().map(|a| a * c).collect())
    }
}

impl fmt::Display for FiniteWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for FiniteWeight {
    fn from(v: Vec<i64>) -> Self {
        FiniteWeight(v)
    }
}

/// Result of folding a weight into a (closed) fundamental chamber or alcove.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Folded {
    /// Representative in the closed chamber/alcove.
    pub weight: FiniteWeight,
    /// `(-1)^{#reflections}`, or 0 if the representative lies on a wall.
    pub sign: i32,
}

/// A simple reflection of the affine Weyl group at a fixed shifted level.
/// Index `rank` stands for the affine reflection `s_0`.
pub type ReflectionIndex = usize;

/// Cartan data of a finite simple Lie algebra.
#[derive(Clone, Debug)]
pub struct SimpleAlgebra {
    family: Family,
    rank: usize,
    /// Row `i` holds the Dynkin labels of the simple root `alpha_i`.
    cartan: Vec<Vec<i64>>,
    root_lengths: Vec<Rational64>,
    quadratic_form: Vec<Vec<Rational64>>,
    /// `(A^T)^{-1}`: converts Dynkin labels to simple-root coordinates.
    to_root_coords: Vec<Vec<Rational64>>,
    positive_roots: Vec<FiniteWeight>,
    highest_root: FiniteWeight,
    marks: Vec<i64>,
    comarks: Vec<i64>,
    dual_coxeter: i64,
    rho: FiniteWeight,
    center_index: i64,
    form_denominator: i64,
    weyl_order: u64,
}

fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn invert(m: &[Vec<Rational64>]) -> Option<Vec<Vec<Rational64>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational64>> = m.to_vec();
    let mut inv: Vec<Vec<Rational64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational64::one() } else { Rational64::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let (ac, ic) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * ac;
                    inv[r][j] -= f * ic;
                }
            }
        }
    }
    Some(inv)
}

fn determinant(m: &[Vec<Rational64>]) -> Rational64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational64::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational64::zero();
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for r in col + 1..n {
            let f = a[r][col] / p;
            for j in col..n {
                let v = a[col][j];
                a[r][j] -= f * v;
            }
        }
    }
    det
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

impl SimpleAlgebra {
    /// Builds the Cartan data of `family_rank`, e.g. `(Family::G, 2)`.
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidAlgebra {
            family: family.to_string(),
            rank,
            reason: reason.to_string(),
        };
        let valid = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if !valid {
            return Err(invalid("no simple algebra of this type"));
        }
        if rank > 12 {
            return Err(invalid("rank above 12 is not supported"));
        }

        // Squared lengths and off-diagonal inner products of simple roots.
        let r = rank;
        let mut len = vec![rat(2, 1); r];
        let mut edges: Vec<(usize, usize, Rational64)> = Vec::new();
        match family {
            Family::A => {
                for i in 0..r.saturating_sub(1) {
                    edges.push((i, i + 1, rat(-1, 1)));
                }
            }
            Family::B => {
                len[r - 1] = rat(1, 1);
                for i in 0..r - 1 {
                    edges.push((i, i + 1, rat(-1, 1)));
                }
            }
            Family::C => {
                for l in len.iter_mut().take(r - 1) {
                    *l = rat(1, 1);
                }
                for i in 0..r - 2 {
                    edges.push((i, i + 1, rat(-1, 2)));
                }
                edges.push((r - 2, r - 1, rat(-1, 1)));
            }
            Family::D => {
                for i in 0..r - 2 {
                    edges.push((i, i + 1, rat(-1, 1)));
                }
                edges.push((r - 3, r - 1, rat(-1, 1)));
            }
            Family::E => {
                edges.push((0, 2, rat(-1, 1)));
                edges.push((1, 3, rat(-1, 1)));
                for i in 2..r - 1 {
                    edges.push((i, i + 1, rat(-1, 1)));
                }
            }
            Family::F => {
                len[2] = rat(1, 1);
                len[3] = rat(1, 1);
                edges.push((0, 1, rat(-1, 1)));
                edges.push((1, 2, rat(-1, 1)));
                edges.push((2, 3, rat(-1, 2)));
            }
            Family::G => {
                len[0] = rat(2, 3);
                edges.push((0, 1, rat(-1, 1)));
            }
        }
        let mut gram = vec![vec![Rational64::zero(); r]; r];
        for i in 0..r {
            gram[i][i] = len[i];
        }
        for &(i, j, v) in &edges {
            gram[i][j] = v;
            gram[j][i] = v;
        }

        let mut cartan = vec![vec![0i64; r]; r];
        for i in 0..r {
            for j in 0..r {
                let v = rat(2, 1) * gram[i][j] / len[j];
                if !v.is_integer() {
                    return Err(invalid("non-integral Cartan entry"));
                }
                cartan[i][j] = v.to_integer();
            }
        }

        let cartan_q: Vec<Vec<Rational64>> = cartan
            .iter()
            .map(|row| row.iter().map(|&v| Rational64::from_integer(v)).collect())
            .collect();
        let cinv = invert(&cartan_q).ok_or_else(|| invalid("singular Cartan matrix"))?;
        let quadratic_form: Vec<Vec<Rational64>> = (0..r)
            .map(|i| (0..r).map(|j| cinv[i][j] * len[j] / rat(2, 1)).collect())
            .collect();
        let cartan_t: Vec<Vec<Rational64>> =
            (0..r).map(|i| (0..r).map(|j| cartan_q[j][i]).collect()).collect();
        let to_root_coords = invert(&cartan_t).ok_or_else(|| invalid("singular Cartan matrix"))?;

        let form_denominator = quadratic_form
            .iter()
            .flatten()
            .fold(1i64, |acc, q| num_integer::lcm(acc, *q.denom()));
        let det = determinant(&quadratic_form);
        let center = det.recip();
        if !center.is_integer() {
            return Err(invalid("non-integral lattice index"));
        }

        let labels_of = |coords: &[i64]| -> Vec<i64> {
            (0..r)
                .map(|j| (0..r).map(|i| coords[i] * cartan[i][j]).sum())
                .collect()
        };

        // Positive roots by height, via root strings.
        let mut coords_list: Vec<Vec<i64>> = (0..r)
            .map(|i| {
                let mut c = vec![0; r];
                c[i] = 1;
                c
            })
            .collect();
        let mut known: HashSet<Vec<i64>> = coords_list.iter().cloned().collect();
        let mut frontier = coords_list.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for beta in &frontier {
                let labels = labels_of(beta);
                for i in 0..r {
                    let mut p = 0;
                    let mut down = beta.clone();
                    loop {
                        down[i] -= 1;
                        if known.contains(&down) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let q = p - labels[i];
                    if q > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if known.insert(up.clone()) {
                            next.push(up);
                        }
                    }
                }
            }
            coords_list.extend(next.iter().cloned());
            frontier = next;
        }
        coords_list.sort_by_key(|c| (c.iter().sum::<i64>(), std::cmp::Reverse(c.clone())));
        let positive_roots: Vec<FiniteWeight> =
            coords_list.iter().map(|c| FiniteWeight(labels_of(c))).collect();
        let top = coords_list.last().cloned().ok_or_else(|| invalid("empty root system"))?;
        let highest_root = FiniteWeight(labels_of(&top));
        let marks = top.clone();
        let mut comarks = Vec::with_capacity(r);
        for i in 0..r {
            let v = Rational64::from_integer(marks[i]) * len[i] / rat(2, 1);
            if !v.is_integer() {
                return Err(invalid("non-integral comark"));
            }
            comarks.push(v.to_integer());
        }
        let dual_coxeter = 1 + comarks.iter().sum::<i64>();

        let weyl_order = match family {
            Family::A => factorial(r as u64 + 1),
            Family::B | Family::C => (1u64 << r) * factorial(r as u64),
            Family::D => (1u64 << (r - 1)) * factorial(r as u64),
            Family::E => match r {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            Family::F => 1152,
            Family::G => 12,
        };

        let alg = SimpleAlgebra {
            family,
            rank,
            cartan,
            root_lengths: len,
            quadratic_form,
            to_root_coords,
            positive_roots,
            highest_root,
            marks,
            comarks,
            dual_coxeter,
            rho: FiniteWeight(vec![1; r]),
            center_index: center.to_integer(),
            form_denominator,
            weyl_order,
        };
        alg.check_consistency()?;
        Ok(alg)
    }

    /// Parses names like `A2`, `g2`, `E6`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        if name.len() < 2 {
            return Err(Error::Parse(format!("bad algebra name `{name}`")));
        }
        let (f, r) = name.split_at(1);
        let family: Family = f.parse()?;
        let rank: usize = r
            .parse()
            .map_err(|_| Error::Parse(format!("bad rank in `{name}`")))?;
        SimpleAlgebra::new(family, rank)
    }

    fn check_consistency(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Internal(format!("{}: {what}", self.name())));
        for i in 0..self.rank {
            if self.cartan[i][i] != 2 {
                return fail("Cartan diagonal");
            }
            for j in 0..self.rank {
                if i != j && self.cartan[i][j] > 0 {
                    return fail("positive off-diagonal Cartan entry");
                }
                if self.quadratic_form[i][j] != self.quadratic_form[j][i] {
                    return fail("asymmetric quadratic form");
                }
            }
        }
        // Sylvester: all leading minors positive.
        for n in 1..=self.rank {
            let minor: Vec<Vec<Rational64>> =
                (0..n).map(|i| self.quadratic_form[i][..n].to_vec()).collect();
            if determinant(&minor) <= Rational64::zero() {
                return fail("quadratic form not positive definite");
            }
        }
        let theta_len = self.ip(self.highest_root.labels(), self.highest_root.labels());
        if theta_len != rat(2, 1) {
            return fail("highest root is not long");
        }
        let rho_theta = self.ip(self.rho.labels(), self.highest_root.labels());
        if rho_theta != Rational64::from_integer(self.dual_coxeter - 1) {
            return fail("dual Coxeter number disagrees with (rho, theta)");
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Squared lengths `(alpha_i, alpha_i)` of the simple roots.
    pub fn root_lengths(&self) -> &[Rational64] {
        &self.root_lengths
    }

    /// `(w^i, w^j)` for the fundamental weights.
    pub fn quadratic_form(&self) -> &[Vec<Rational64>] {
        &self.quadratic_form
    }

    /// Positive roots in Dynkin labels, sorted by height.
    pub fn positive_roots(&self) -> &[FiniteWeight] {
        &self.positive_roots
    }

    pub fn n_pos_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn highest_root(&self) -> &FiniteWeight {
        &self.highest_root
    }

    pub fn marks(&self) -> &[i64] {
        &self.marks
    }

    pub fn comarks(&self) -> &[i64] {
        &self.comarks
    }

    pub fn dual_coxeter(&self) -> i64 {
        self.dual_coxeter
    }

    pub fn rho(&self) -> &FiniteWeight {
        &self.rho
    }

    /// `|P / Q^vee|`.
    pub fn center_index(&self) -> i64 {
        self.center_index
    }

    /// Least common denominator of the quadratic form entries.
    pub fn form_denominator(&self) -> i64 {
        self.form_denominator
    }

    pub fn dim(&self) -> usize {
        self.rank + 2 * self.n_pos_roots()
    }

    pub fn weyl_order(&self) -> u64 {
        self.weyl_order
    }

    fn check_rank(&self, x: &FiniteWeight) -> Result<()> {
        if x.rank() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: x.rank(),
            });
        }
        Ok(())
    }

    pub(crate) fn ip(&self, x: &[i64], y: &[i64]) -> Rational64 {
        let mut acc = Rational64::zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    acc += self.quadratic_form[i][j] * (xi * yj);
                }
            }
        }
        acc
    }

    /// The invariant form `(x, y)`.
    pub fn inner_product(&self, x: &FiniteWeight, y: &FiniteWeight) -> Result<Rational64> {
        self.check_rank(x)?;
        self.check_rank(y)?;
        Ok(self.ip(x.labels(), y.labels()))
    }

    /// `(x, theta)`, the level contribution of the finite labels.
    pub fn level_of(&self, x: &FiniteWeight) -> i64 {
        x.0.iter().zip(&self.comarks).map(|(a, b)| a * b).sum()
    }

    /// Simple reflection `s_i`.
    pub fn reflect(&self, x: &FiniteWeight, i: usize) -> FiniteWeight {
        let c = x.0[i];
        FiniteWeight(
            x.0.iter()
                .zip(&self.cartan[i])
                .map(|(a, b)| a - c * b)
                .collect(),
        )
    }

    fn reflect_in_place(&self, x: &mut [i64], i: usize) {
        let c = x[i];
        for (a, b) in x.iter_mut().zip(&self.cartan[i]) {
            *a -= c * b;
        }
    }

    /// Full Weyl orbit of `x` (breadth-first closure under simple reflections).
    pub fn weyl_orbit(&self, x: &FiniteWeight) -> Vec<FiniteWeight> {
        let mut seen: HashSet<FiniteWeight> = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(x.clone());
        queue.push_back(x.clone());
        while let Some(y) = queue.pop_front() {
            for i in 0..self.rank {
                if y.0[i] == 0 {
                    continue;
                }
                let z = self.reflect(&y, i);
                if seen.insert(z.clone()) {
                    queue.push_back(z);
                }
            }
            out.push(y);
        }
        out
    }

    /// `|W x|`.
    pub fn orbit_size(&self, x: &FiniteWeight) -> usize {
        self.weyl_orbit(x).len()
    }

    /// Orbit of a regular weight with `det w` attached to each point.
    /// Returns `None` if `x` is not regular.
    pub fn signed_orbit(&self, x: &FiniteWeight) -> Option<Vec<(FiniteWeight, i32)>> {
        let mut seen: HashMap<FiniteWeight, i32> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut out = Vec::new();
        seen.insert(x.clone(), 1);
        queue.push_back((x.clone(), 1));
        while let Some((y, s)) = queue.pop_front() {
            if y.0.contains(&0) {
                return None;
            }
            for i in 0..self.rank {
                let z = self.reflect(&y, i);
                if !seen.contains_key(&z) {
                    seen.insert(z.clone(), -s);
                    queue.push_back((z, -s));
                }
            }
            out.push((y, s));
        }
        Some(out)
    }

    /// Folds `x` into the closed dominant chamber with the finite Weyl group.
    pub fn dominant_reduce(&self, x: &FiniteWeight) -> Folded {
        self.fold(x, None, |neg| neg[0])
    }

    /// Folds `x` into the closed fundamental alcove of the affine Weyl group
    /// `W ⋉ m Q^vee`, where the zeroth label is `m - (x, theta)`.
    pub fn alcove_reduce(&self, m: i64, x: &FiniteWeight) -> Folded {
        self.fold(x, Some(m), |neg| neg[0])
    }

    /// As [`alcove_reduce`](Self::alcove_reduce), with a caller-chosen
    /// reflection among those currently applicable (indices `0..rank` are
    /// finite, `rank` is `s_0`).
    pub fn alcove_reduce_with<F>(&self, m: i64, x: &FiniteWeight, choose: F) -> Folded
    where
        F: FnMut(&[ReflectionIndex]) -> ReflectionIndex,
    {
        self.fold(x, Some(m), choose)
    }

    fn fold<F>(&self, x: &FiniteWeight, m: Option<i64>, mut choose: F) -> Folded
    where
        F: FnMut(&[ReflectionIndex]) -> ReflectionIndex,
    {
        let r = self.rank;
        let mut y = x.0.clone();
        let mut sign = 1;
        let mut negative: Vec<usize> = Vec::with_capacity(r + 1);
        loop {
            negative.clear();
            negative.extend((0..r).filter(|&i| y[i] < 0));
            let zeroth = m.map(|m| m - y.iter().zip(&self.comarks).map(|(a, b)| a * b).sum::<i64>());
            if let Some(z) = zeroth {
                if z < 0 {
                    negative.push(r);
                }
            }
            if negative.is_empty() {
                let wall = y.contains(&0) || zeroth == Some(0);
                return Folded {
                    weight: FiniteWeight(y),
                    sign: if wall { 0 } else { sign },
                };
            }
            let i = choose(&negative);
            debug_assert!(negative.contains(&i));
            if i == r {
                let z = zeroth.expect("affine reflection without level");
                for (a, t) in y.iter_mut().zip(&self.highest_root.0) {
                    *a += z * t;
                }
            } else {
                self.reflect_in_place(&mut y, i);
            }
            sign = -sign;
        }
    }

    /// Simple-root coordinates of `x`.
    pub fn root_coordinates(&self, x: &FiniteWeight) -> Vec<Rational64> {
        (0..self.rank)
            .map(|i| {
                (0..self.rank).fold(Rational64::zero(), |acc, j| {
                    acc + self.to_root_coords[i][j] * x.0[j]
                })
            })
            .collect()
    }

    /// Height of `x` in the simple-root basis (rational in general).
    pub fn height(&self, x: &FiniteWeight) -> Rational64 {
        self.root_coordinates(x).into_iter().sum()
    }

    /// If `lambda - mu` is a non-negative integer combination of simple
    /// roots, returns its height.
    pub fn depth(&self, lambda: &FiniteWeight, mu: &FiniteWeight) -> Option<i64> {
        let c = self.root_coordinates(&lambda.sub(mu));
        if c.iter().all(|v| v.is_integer() && !v.is_negative()) {
            Some(c.iter().map(|v| v.to_integer()).sum())
        } else {
            None
        }
    }

    /// Dominant weights `mu <= lambda`, in order of increasing depth.
    pub fn dominant_weights_below(&self, lambda: &FiniteWeight) -> Result<Vec<FiniteWeight>> {
        self.check_rank(lambda)?;
        if !lambda.is_dominant() {
            return Err(Error::NotDominant(lambda.0.clone()));
        }
        let mut seen: HashSet<FiniteWeight> = HashSet::new();
        let mut out = vec![lambda.clone()];
        seen.insert(lambda.clone());
        let mut i = 0;
        while i < out.len() {
            let mu = out[i].clone();
            for alpha in &self.positive_roots {
                let nu = mu.sub(alpha);
                if nu.is_dominant() && seen.insert(nu.clone()) {
                    out.push(nu);
                }
            }
            i += 1;
        }
        out.sort_by_cached_key(|mu| (self.depth(lambda, mu).unwrap_or(i64::MAX), mu.clone()));
        Ok(out)
    }

    /// Dominant weight multiplicities of the irreducible module `L(lambda)`
    /// via Freudenthal's recursion.
    pub fn freudenthal_multiplicities(
        &self,
        lambda: &FiniteWeight,
    ) -> Result<BTreeMap<FiniteWeight, u64>> {
        let dominant = self.dominant_weights_below(lambda)?;
        let lr = lambda.add(&self.rho);
        let norm_top = self.ip(lr.labels(), lr.labels());
        let mut mult: HashMap<FiniteWeight, u64> = HashMap::new();
        mult.insert(lambda.clone(), 1);
        for mu in dominant.iter().skip(1) {
            let mut acc = Rational64::zero();
            for alpha in &self.positive_roots {
                let mut j = 1;
                loop {
                    let nu = mu.add(&alpha.scale(j));
                    let dom = self.dominant_reduce(&nu).weight;
                    let Some(&m) = mult.get(&dom) else { break };
                    acc += self.ip(nu.labels(), alpha.labels()) * (m as i64);
                    j += 1;
                }
            }
            let mr = mu.add(&self.rho);
            let gap = norm_top - self.ip(mr.labels(), mr.labels());
            if gap <= Rational64::zero() {
                return Err(Error::Internal(format!("Freudenthal denominator vanished at {mu}")));
            }
            let value = acc * 2 / gap;
            if !value.is_integer() || value.is_negative() {
                return Err(Error::Internal(format!(
                    "non-integral multiplicity {value} at {mu} in L{lambda}"
                )));
            }
            let v = value.to_integer() as u64;
            if v > 0 {
                mult.insert(mu.clone(), v);
            }
        }
        Ok(mult.into_iter().collect())
    }

    /// All weights of `L(lambda)` with multiplicities.
    pub fn weight_system(&self, lambda: &FiniteWeight) -> Result<Vec<(FiniteWeight, u64)>> {
        let dom = self.freudenthal_multiplicities(lambda)?;
        let mut out = Vec::new();
        for (mu, m) in dom {
            for x in self.weyl_orbit(&mu) {
                out.push((x, m));
            }
        }
        Ok(out)
    }

    /// Weyl dimension formula.
    pub fn weyl_dimension(&self, lambda: &FiniteWeight) -> u128 {
        let lr = lambda.add(&self.rho);
        let mut acc: Ratio<i128> = Ratio::one();
        for alpha in &self.positive_roots {
            let a = self.ip(lr.labels(), alpha.labels());
            let b = self.ip(self.rho.labels(), alpha.labels());
            let q = a / b;
            acc *= Ratio::new(*q.numer() as i128, *q.denom() as i128);
        }
        acc.to_integer() as u128
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(name: &str) -> SimpleAlgebra {
        SimpleAlgebra::parse(name).unwrap()
    }

    #[test]
    fn basic_data() {
        let a1 = alg("A1");
        assert_eq!(a1.cartan(), &[vec![2]]);
        assert_eq!(a1.dual_coxeter(), 2);
        assert_eq!(a1.n_pos_roots(), 1);
        assert_eq!(a1.dim(), 3);

        let a2 = alg("A2");
        assert_eq!((a2.dual_coxeter(), a2.n_pos_roots(), a2.dim()), (3, 3, 8));

        let g2 = alg("G2");
        assert_eq!((g2.dual_coxeter(), g2.n_pos_roots(), g2.dim()), (4, 6, 14));
        assert_eq!(g2.center_index(), 3);
    }

    #[test]
    fn classical_dimensions_and_coxeter_numbers() {
        // (name, h^vee, dim g)
        let table = [
            ("A3", 4, 15),
            ("B2", 3, 10),
            ("B3", 5, 21),
            ("C3", 4, 21),
            ("D4", 6, 28),
            ("E6", 12, 78),
            ("E7", 18, 133),
            ("E8", 30, 248),
            ("F4", 9, 52),
        ];
        for (name, h, d) in table {
            let a = alg(name);
            assert_eq!(a.dual_coxeter(), h, "{name}");
            assert_eq!(a.dim(), d, "{name}");
        }
    }

    #[test]
    fn invalid_types_rejected() {
        for (f, r) in [(Family::B, 1), (Family::D, 2), (Family::E, 5), (Family::F, 3), (Family::G, 3)] {
            assert!(matches!(SimpleAlgebra::new(f, r), Err(Error::InvalidAlgebra { .. })));
        }
        assert!(SimpleAlgebra::parse("X3").is_err());
    }

    #[test]
    fn inner_products() {
        let a1 = alg("A1");
        let w = FiniteWeight(vec![1]);
        assert_eq!(a1.inner_product(&w, &w).unwrap(), rat(1, 2));
        let a2 = alg("A2");
        let ip = a2
            .inner_product(&FiniteWeight(vec![1, 0]), &FiniteWeight(vec![0, 1]))
            .unwrap();
        assert_eq!(ip, rat(1, 3));
        assert_eq!(
            a2.inner_product(&FiniteWeight::zero(2), &FiniteWeight(vec![3, -7])).unwrap(),
            Rational64::zero()
        );
        assert!(matches!(
            a2.inner_product(&FiniteWeight(vec![1]), &FiniteWeight(vec![0, 1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn orbits() {
        let a1 = alg("A1");
        let mut o = a1.weyl_orbit(&FiniteWeight(vec![2]));
        o.sort();
        assert_eq!(o, vec![FiniteWeight(vec![-2]), FiniteWeight(vec![2])]);
        assert_eq!(alg("A3").orbit_size(&FiniteWeight::zero(3)), 1);
        assert_eq!(alg("A2").orbit_size(&FiniteWeight(vec![1, 1])), 6);
        for name in ["A1", "A2", "A3", "B2", "B3", "C3", "G2", "F4", "D4"] {
            let a = alg(name);
            assert_eq!(a.orbit_size(a.rho()) as u64, a.weyl_order(), "{name}");
        }
    }

    #[test]
    fn alcove_rank_one_rule() {
        let a1 = alg("A1");
        let f = a1.alcove_reduce(6, &FiniteWeight(vec![5]));
        assert_eq!((f.weight, f.sign), (FiniteWeight(vec![5]), 1));
        let f = a1.alcove_reduce(6, &FiniteWeight(vec![11]));
        assert_eq!((f.weight, f.sign), (FiniteWeight(vec![1]), -1));
        assert_eq!(a1.alcove_reduce(3, &FiniteWeight(vec![3])).sign, 0);
    }

    #[test]
    fn freudenthal_small_cases() {
        let a1 = alg("A1");
        let m = a1.freudenthal_multiplicities(&FiniteWeight(vec![2])).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[&FiniteWeight(vec![2])], 1);
        assert_eq!(m[&FiniteWeight(vec![0])], 1);

        let a2 = alg("A2");
        let m = a2.freudenthal_multiplicities(&FiniteWeight(vec![1, 1])).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[&FiniteWeight(vec![0, 0])], 2);

        let m = a2.freudenthal_multiplicities(&FiniteWeight::zero(2)).unwrap();
        assert_eq!(m.len(), 1);

        assert!(matches!(
            a2.freudenthal_multiplicities(&FiniteWeight(vec![1, -1])),
            Err(Error::NotDominant(_))
        ));
    }

    #[test]
    fn g2_adjoint_and_seven() {
        // G2: 7-dimensional (short) and 14-dimensional adjoint.
        let g2 = alg("G2");
        assert_eq!(g2.weyl_dimension(&FiniteWeight(vec![1, 0])), 7);
        assert_eq!(g2.weyl_dimension(&FiniteWeight(vec![0, 1])), 14);
        let adj = g2.freudenthal_multiplicities(&FiniteWeight(vec![0, 1])).unwrap();
        assert_eq!(adj[&FiniteWeight(vec![0, 0])], 2);
    }

    #[test]
    fn depth_and_height() {
        let a2 = alg("A2");
        // theta = alpha_1 + alpha_2 = (1,1)
        assert_eq!(a2.depth(&FiniteWeight(vec![1, 1]), &FiniteWeight::zero(2)), Some(2));
        assert_eq!(a2.depth(&FiniteWeight(vec![1, 0]), &FiniteWeight::zero(2)), None);
        assert_eq!(a2.height(&FiniteWeight(vec![1, 0])), rat(1, 1));
    }
}
