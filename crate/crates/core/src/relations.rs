//! Exact verification of the Galois relations for fusion coefficients and
//! the closed-form invariants, including the linearized forms built from
//! inverse weight multiplicities.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use std::time::Instant;

use num_rational::{BigRational, Rational64};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::fusion::{multiplicity_matrices, verlinde_table, FusionTable, MultiplicityMatrices};
use crate::galois_action::{build_action_table, inverse_ell, normalize_ell, GaloisAction};
use crate::invariants::{as_dimension, genus_weights, keychain, verlinde_sum};
use crate::modular_data::{enumerate_weights, ModularData};
use crate::rootsys::FiniteWeight;

/// Cap on stored witnesses per report; the count is always exact.
pub const MAX_WITNESSES: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub weights: Vec<Vec<i64>>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportParams {
    pub algebra: String,
    pub level: u32,
    pub ell: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_max: Option<usize>,
}

/// Outcome of checking one relation for one Galois element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    pub relation: String,
    pub params: ReportParams,
    pub tested: u64,
    pub skipped_boundary: u64,
    /// Skipped instances for which the identity happens to hold anyway.
    pub skipped_holding: u64,
    pub failure_count: u64,
    pub failures: Vec<Witness>,
    #[serde(skip)]
    pub wall_time: std::time::Duration,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

/// What happened to one relation instance.
enum Outcome {
    Pass,
    Fail(Witness),
    Skipped { holds: bool },
}

struct Tally {
    tested: u64,
    skipped: u64,
    skipped_holding: u64,
    failures: Vec<Witness>,
}

fn tally(outcomes: impl IntoIterator<Item = Outcome>) -> Tally {
    let mut t = Tally {
        tested: 0,
        skipped: 0,
        skipped_holding: 0,
        failures: Vec::new(),
    };
    for o in outcomes {
        match o {
            Outcome::Pass => t.tested += 1,
            Outcome::Fail(w) => {
                t.tested += 1;
                t.failures.push(w);
            }
            Outcome::Skipped { holds } => {
                t.skipped += 1;
                t.skipped_holding += holds as u64;
            }
        }
    }
    t
}

/// The closed-alcove image `pi_sigma(nu)` of `ell nu` at shifted level `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PiSigma {
    /// The image lies in `P_+^k`; the payload is its weight index.
    Inside(usize),
    /// The image has level above `k` (this includes the affine wall), so
    /// the sum over `P_+^k` does not see its full `L` row.
    Boundary(FiniteWeight),
}

/// Folds the unshifted weight `ell nu` into the closed level-`m` alcove.
pub fn pi_sigma_weight(md: &ModularData, ell: i64, nu: &FiniteWeight) -> Result<FiniteWeight> {
    let ell = normalize_ell(ell, md.order())?;
    let alg = md.algebra();
    Ok(alg.alcove_reduce(md.shifted_level(), &nu.scale(ell)).weight)
}

pub fn pi_sigma(md: &ModularData, ell: i64, nu: &FiniteWeight) -> Result<PiSigma> {
    let image = pi_sigma_weight(md, ell, nu)?;
    Ok(match md.index_of(&image) {
        Some(i) => PiSigma::Inside(i),
        None => PiSigma::Boundary(image),
    })
}

/// `||W nu|| / ||W pi|| sum_g ell_pi^g [g]`, with `g` running over `P_+^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LCombination {
    pub image: FiniteWeight,
    pub inside: bool,
    pub ratio: Rational64,
    /// `(gamma index, ell_pi^gamma)`, nonzero coefficients only.
    pub terms: Vec<(usize, i64)>,
}

impl LCombination {
    /// Applies the combination to an integer-valued slot evaluator.
    pub fn eval_int(&self, f: impl Fn(usize) -> i64) -> Rational64 {
        let s: i64 = self.terms.iter().map(|&(g, c)| c * f(g)).sum();
        self.ratio * s
    }

    /// Applies the combination to a cyclotomic slot evaluator.
    pub fn eval(&self, order: u32, f: impl Fn(usize) -> CycNumber) -> CycNumber {
        let s = self
            .terms
            .iter()
            .fold(CycNumber::zero(order), |acc, &(g, c)| acc + f(g).scale_int(c));
        s.scale(&BigRational::new((*self.ratio.numer()).into(), (*self.ratio.denom()).into()))
    }
}

/// Builds the `L_sigma(nu)` combination. `mults` must cover every
/// dominant weight of level at most `m`.
pub fn l_sigma_combination(
    md: &ModularData,
    mults: &MultiplicityMatrices,
    ell: i64,
    nu: usize,
) -> Result<LCombination> {
    let alg = md.algebra();
    let nu_w = &md.weights()[nu].labels;
    let image = pi_sigma_weight(md, ell, nu_w)?;
    let row = mults
        .index_of(&image)
        .ok_or_else(|| Error::BadWeightList(format!("L does not cover pi_sigma = {image}")))?;
    let inside = md.index_of(&image).is_some();
    let terms = mults.l[row]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .filter_map(|(j, &c)| md.index_of(&mults.weights[j]).map(|g| (g, c)))
        .collect();
    let ratio = Rational64::new(alg.orbit_size(nu_w) as i64, alg.orbit_size(&image) as i64);
    Ok(LCombination {
        image,
        inside,
        ratio,
        terms,
    })
}

/// Shared state for relation checks at one `(algebra, k)`.
pub struct Verifier<'a> {
    md: &'a ModularData,
    fusion: FusionTable,
    mults: MultiplicityMatrices,
    actions: RwLock<HashMap<i64, Arc<GaloisAction>>>,
    dims: RwLock<HashMap<(u32, Vec<usize>), u64>>,
    genus: RwLock<HashMap<u32, Arc<Vec<CycNumber>>>>,
}

impl<'a> Verifier<'a> {
    pub fn new(md: &'a ModularData) -> Result<Self> {
        let fusion = verlinde_table(md)?;
        let alg = md.algebra();
        // Every closed-alcove image has level at most m.
        let mut ws: Vec<FiniteWeight> = enumerate_weights(alg, md.shifted_level() as u32)
            .into_iter()
            .map(|w| w.labels)
            .collect();
        ws.sort_by_cached_key(|w| alg.height(w));
        let mults = multiplicity_matrices(alg, &ws)?;
        Ok(Verifier {
            md,
            fusion,
            mults,
            actions: RwLock::new(HashMap::new()),
            dims: RwLock::new(HashMap::new()),
            genus: RwLock::new(HashMap::new()),
        })
    }

    pub fn modular_data(&self) -> &ModularData {
        self.md
    }

    pub fn fusion(&self) -> &FusionTable {
        &self.fusion
    }

    pub fn multiplicities(&self) -> &MultiplicityMatrices {
        &self.mults
    }

    /// The verified action table of `ell`, memoised.
    pub fn action(&self, ell: i64) -> Result<Arc<GaloisAction>> {
        let ell = normalize_ell(ell, self.md.order())?;
        if let Some(a) = self.actions.read().expect("action cache poisoned").get(&ell) {
            return Ok(a.clone());
        }
        let a = Arc::new(build_action_table(self.md, ell)?);
        self.actions
            .write()
            .expect("action cache poisoned")
            .insert(ell, a.clone());
        Ok(a)
    }

    fn genus_weights(&self, h: u32) -> Result<Arc<Vec<CycNumber>>> {
        if let Some(g) = self.genus.read().expect("genus cache poisoned").get(&h) {
            return Ok(g.clone());
        }
        let g = Arc::new(genus_weights(self.md, h)?);
        self.genus.write().expect("genus cache poisoned").insert(h, g.clone());
        Ok(g)
    }

    /// Verlinde dimension, memoised on the multiset of weights.
    pub fn dimension(&self, h: u32, weights: &[usize]) -> Result<u64> {
        let mut key = weights.to_vec();
        key.sort_unstable();
        let key = (h, key);
        if let Some(&v) = self.dims.read().expect("dimension cache poisoned").get(&key) {
            return Ok(v);
        }
        let g = self.genus_weights(h)?;
        let v = as_dimension(&verlinde_sum(self.md, &g, &key.1), &|| {
            format!("V^{{{h},{}}}{weights:?}", weights.len())
        })?;
        self.dims.write().expect("dimension cache poisoned").insert(key, v);
        Ok(v)
    }

    fn n(&self, a: usize, b: usize, c: usize) -> i64 {
        self.fusion.get(a, b, c) as i64
    }

    fn labels(&self, idx: &[usize]) -> Vec<Vec<i64>> {
        idx.iter().map(|&i| self.md.weights()[i].labels.0.clone()).collect()
    }

    fn params(&self, ell: i64) -> ReportParams {
        ReportParams {
            algebra: self.md.algebra().name(),
            level: self.md.level(),
            ell,
            genus_max: None,
            points_max: None,
        }
    }

    fn report(&self, relation: &str, params: ReportParams, t: Tally, start: Instant) -> RelationReport {
        let failure_count = t.failures.len() as u64;
        let mut failures = t.failures;
        failures.truncate(MAX_WITNESSES);
        RelationReport {
            relation: relation.into(),
            params,
            tested: t.tested,
            skipped_boundary: t.skipped,
            skipped_holding: t.skipped_holding,
            failure_count,
            failures,
            wall_time: start.elapsed(),
        }
    }

    fn triples(&self) -> Vec<(usize, usize, usize)> {
        let n = self.md.len();
        (0..n)
            .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
            .collect()
    }

    /// `sigma(S_{l m}) = eps(l) S_{sigma l, m} = eps(m) S_{l, sigma m}` as a
    /// report; the action table build already enforces it.
    pub fn verify_5a(&self, ell: i64) -> Result<RelationReport> {
        let start = Instant::now();
        let n = self.md.len() as u64;
        let t = match self.action(ell) {
            Ok(_) => Tally {
                tested: n * n,
                skipped: 0,
                skipped_holding: 0,
                failures: Vec::new(),
            },
            Err(Error::GaloisTripwire {
                lambda, mu, detail, ..
            }) => Tally {
                tested: n * n,
                skipped: 0,
                skipped_holding: 0,
                failures: vec![Witness {
                    weights: vec![lambda, mu],
                    detail,
                }],
            },
            Err(e) => return Err(e),
        };
        Ok(self.report("5a", self.params(ell), t, start))
    }

    fn holds_5b(&self, s: &GaloisAction, l: usize, m: usize, nu: usize) -> bool {
        let e = &s.signs;
        let lhs = self.n(s.perm[l], s.perm[m], nu);
        let sum: i64 = (0..self.md.len())
            .map(|g| e[g] as i64 * self.n(l, m, g) * self.n(s.perm[g], s.perm[0], nu))
            .sum();
        lhs == (e[0] * e[l] * e[m]) as i64 * sum
    }

    /// `N^nu_{sigma l, sigma m} = eps(0) eps(l) eps(m) sum_g eps(g) N^g_{l m} N^nu_{sigma g, sigma 0}`.
    pub fn verify_5b(&self, ell: i64) -> Result<RelationReport> {
        let start = Instant::now();
        let s = self.action(ell)?;
        let outcomes: Vec<Outcome> = self
            .triples()
            .into_par_iter()
            .map(|(l, m, nu)| {
                if self.holds_5b(&s, l, m, nu) {
                    Outcome::Pass
                } else {
                    Outcome::Fail(Witness {
                        weights: self.labels(&[l, m, nu]),
                        detail: "fusion Galois relation".into(),
                    })
                }
            })
            .collect();
        Ok(self.report("5b", self.params(ell), tally(outcomes), start))
    }

    /// Verlinde-dimension relation for every `(h, t)` with `h <= genus_max`,
    /// `1 <= t <= points_max` and `2h + t >= 2`.
    pub fn verify_5c(&self, ell: i64, genus_max: u32, points_max: usize) -> Result<RelationReport> {
        let start = Instant::now();
        let s = self.action(ell)?;
        let n = self.md.len();
        let conj = self.md.conj();
        let e = |i: usize| s.signs[i] as i64;
        let mut outcomes = Vec::new();
        for h in 0..=genus_max {
            for t in 1..=points_max {
                if 2 * h as usize + t < 2 {
                    continue;
                }
                let pad = 2 * h as usize + t - 2;
                let tuples = all_tuples(n, t);
                let part: Vec<Outcome> = tuples
                    .into_par_iter()
                    .map(|ls| -> Result<Outcome> {
                        let (head, last) = ls.split_at(t - 1);
                        let mut lhs_args: Vec<usize> = head.iter().map(|&l| s.perm[l]).collect();
                        lhs_args.push(last[0]);
                        let lhs = self.dimension(h, &lhs_args)? as i64;
                        let mut sum = 0i64;
                        for mu in 0..n {
                            let mut a: Vec<usize> = head.to_vec();
                            a.push(conj[mu]);
                            let v1 = self.dimension(h, &a)? as i64;
                            if v1 == 0 {
                                continue;
                            }
                            let mut b = vec![s.perm[mu]];
                            b.extend(std::iter::repeat_n(s.perm[0], pad));
                            b.push(last[0]);
                            let v2 = self.dimension(0, &b)? as i64;
                            sum += e(mu) * e(0) * v1 * v2;
                        }
                        let pre: i64 = head.iter().map(|&l| e(l) * e(0)).product();
                        Ok(if lhs == pre * sum {
                            Outcome::Pass
                        } else {
                            Outcome::Fail(Witness {
                                weights: self.labels(&ls),
                                detail: format!("h={h}, t={t}: lhs {lhs}, rhs {}", pre * sum),
                            })
                        })
                    })
                    .collect::<Result<_>>()?;
                outcomes.extend(part);
            }
        }
        let mut params = self.params(ell);
        params.genus_max = Some(genus_max);
        params.points_max = Some(points_max);
        Ok(self.report("5c", params, tally(outcomes), start))
    }

    /// Key-chain relations: `sigma(S_{l0; ls}) = eps(l0) S_{sigma l0; ls}`
    /// and the expression of `S_{sigma l0; ls}` through `sigma 0`, for
    /// `0 <= t <= points_max`.
    pub fn verify_5d_5e(&self, ell: i64, points_max: usize) -> Result<RelationReport> {
        let start = Instant::now();
        let s = self.action(ell)?;
        let n = self.md.len();
        let sigma0 = s.perm[0];
        let sign = |x: CycNumber, e: i32| if e == 1 { x } else { -x };
        let mut outcomes = Vec::new();
        for t in 0..=points_max {
            let cases: Vec<(usize, Vec<usize>)> = (0..n)
                .flat_map(|l0| all_tuples(n, t).into_iter().map(move |ls| (l0, ls)))
                .collect();
            let part: Vec<Outcome> = cases
                .into_par_iter()
                .map(|(l0, ls)| -> Result<Outcome> {
                    let value = keychain(self.md, l0, &ls)?.exact;
                    let moved = keychain(self.md, s.perm[l0], &ls)?.exact;
                    let mut all = vec![l0];
                    all.extend(&ls);
                    // chain relation
                    if value.galois(s.ell)? != sign(moved.clone(), s.signs[l0]) {
                        return Ok(Outcome::Fail(Witness {
                            weights: self.labels(&all),
                            detail: format!("t={t}: sigma applied to the key chain"),
                        }));
                    }
                    // key-chain relation, cross-multiplied by S_{l0; sigma0,...,sigma0}
                    let sigma_ls: Vec<usize> = ls.iter().map(|&l| s.perm[l]).collect();
                    let den = keychain(self.md, l0, &vec![sigma0; t])?.exact;
                    let prefactor: i32 = all.iter().map(|&l| s.signs[l] * s.signs[0]).product();
                    let rhs = &keychain(self.md, l0, &[sigma0])?.exact
                        * &keychain(self.md, l0, &sigma_ls)?.exact;
                    if &moved * &den != sign(rhs, prefactor) {
                        return Ok(Outcome::Fail(Witness {
                            weights: self.labels(&all),
                            detail: format!("t={t}: key chain through sigma 0"),
                        }));
                    }
                    Ok(Outcome::Pass)
                })
                .collect::<Result<_>>()?;
            outcomes.extend(part);
        }
        let mut params = self.params(ell);
        params.points_max = Some(points_max);
        Ok(self.report("5d_5e", params, tally(outcomes), start))
    }

    /// `L_sigma(nu)` for every `nu`.
    fn combinations(&self, ell: i64) -> Result<Vec<LCombination>> {
        (0..self.md.len())
            .map(|nu| l_sigma_combination(self.md, &self.mults, ell, nu))
            .collect()
    }

    /// The linearized fusion relation, compared instance by instance with
    /// the fusion Galois relation at the same `(l, m, nu)`.
    pub fn verify_6a(&self, ell: i64) -> Result<RelationReport> {
        let start = Instant::now();
        let s = self.action(ell)?;
        let comb_s = self.combinations(ell)?;
        let comb_id = self.combinations(1)?;
        let outcomes: Vec<Outcome> = self
            .triples()
            .into_par_iter()
            .map(|(l, m, nu)| {
                let cs = &comb_s[nu];
                let lhs = cs.eval_int(|g| self.n(s.perm[l], g, s.perm[m]));
                let rhs = comb_id[nu].eval_int(|g| self.n(l, g, m)) * (s.signs[l] * s.signs[m]) as i64;
                let holds = lhs == rhs;
                if !cs.inside {
                    return Outcome::Skipped { holds };
                }
                let b = self.holds_5b(&s, l, m, nu);
                if holds && b {
                    Outcome::Pass
                } else {
                    let detail = if holds != b {
                        format!("linearized verdict {holds} but fusion relation verdict {b}")
                    } else {
                        format!("lhs {lhs}, rhs {rhs}")
                    };
                    Outcome::Fail(Witness {
                        weights: self.labels(&[l, m, nu]),
                        detail,
                    })
                }
            })
            .collect();
        Ok(self.report("6a", self.params(ell), tally(outcomes), start))
    }

    /// The linearized chain relation with `L`-marked first and last slots.
    pub fn verify_6b(&self, ell: i64) -> Result<RelationReport> {
        let start = Instant::now();
        let md = self.md;
        let order = md.order();
        let n = md.len();
        let ell_inv = inverse_ell(ell, order)?;
        let s = self.action(ell)?;
        let s_inv = self.action(ell_inv)?;
        let comb_id = self.combinations(1)?;
        let comb_s = self.combinations(ell)?;
        let comb_si = self.combinations(ell_inv)?;
        // C_{a,b,c,d} = S_{a b} (S_{c b}/S_{0 b}) (S_{d c}/S_{0 c}); the first
        // and last slots are linear, so expand them once per (weight, column).
        let first = |combs: &[LCombination]| -> Vec<Vec<CycNumber>> {
            combs
                .par_iter()
                .map(|c| (0..n).map(|b| c.eval(order, |g| md.s_entry(g, b).clone())).collect())
                .collect()
        };
        let last = |combs: &[LCombination]| -> Vec<Vec<CycNumber>> {
            combs
                .par_iter()
                .map(|c| (0..n).map(|cc| c.eval(order, |g| md.ratio(g, cc).clone())).collect())
                .collect()
        };
        let (a_id, d_id) = (first(&comb_id), last(&comb_id));
        let (a_s, d_si) = (first(&comb_s), last(&comb_si));
        let quads: Vec<[usize; 4]> = all_tuples(n, 4)
            .into_iter()
            .map(|v| [v[0], v[1], v[2], v[3]])
            .collect();
        let outcomes: Vec<Outcome> = quads
            .into_par_iter()
            .map(|[a, b, c, d]| {
                let lhs = &(&a_id[a][b] * md.ratio(c, b)) * &d_id[d][c];
                let (b2, c2) = (s_inv.perm[b], s.perm[c]);
                let rhs = &(&a_s[a][b2] * md.ratio(c2, b2)) * &d_si[d][c2];
                let rhs = if s_inv.signs[b] * s.signs[c] == 1 { rhs } else { -rhs };
                let holds = lhs == rhs;
                if !(comb_s[a].inside && comb_si[d].inside) {
                    Outcome::Skipped { holds }
                } else if holds {
                    Outcome::Pass
                } else {
                    Outcome::Fail(Witness {
                        weights: self.labels(&[a, b, c, d]),
                        detail: "linearized chain relation".into(),
                    })
                }
            })
            .collect();
        Ok(self.report("6b", self.params(ell), tally(outcomes), start))
    }
}

/// All `t`-tuples over `0..n`, last coordinate fastest.
pub fn all_tuples(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(t)];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}
