//! The Galois permutation `lambda -> sigma lambda` and the parity signs
//! `epsilon_sigma`, with the exact check of `sigma(S) = eps S` built in.

use std::collections::HashSet;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::modular_data::ModularData;
use crate::rootsys::FiniteWeight;

/// Reduces `ell` into `[1, N)` and checks it is a unit mod `N`.
pub fn normalize_ell(ell: i64, order: u32) -> Result<i64> {
    let n = order as i64;
    let r = ell.rem_euclid(n);
    if r.gcd(&n) != 1 {
        return Err(Error::NotGaloisElement { ell, order });
    }
    Ok(if n == 1 { 1 } else { r })
}

/// Inverse of `ell` modulo `N`.
pub fn inverse_ell(ell: i64, order: u32) -> Result<i64> {
    let n = order as i64;
    let ell = normalize_ell(ell, order)?;
    let e = ell.extended_gcd(&n);
    Ok(e.x.rem_euclid(n))
}

/// Folds `ell (lambda + rho)` into the open level-`m` alcove. Returns the
/// index of `sigma lambda` and the determinant of the folding element.
///
/// The sign is only the geometric parity; the `epsilon` of the exact
/// relation also carries the factor `sigma(kappa)/kappa` (see
/// [`GaloisAction::signs`]).
pub fn act_on_weight(md: &ModularData, ell: i64, lambda: &FiniteWeight) -> Result<(usize, i32)> {
    let ell = normalize_ell(ell, md.order())?;
    let alg = md.algebra();
    let x = lambda.add(alg.rho()).scale(ell);
    let folded = alg.alcove_reduce(md.shifted_level(), &x);
    if folded.sign == 0 {
        return Err(Error::Internal(format!(
            "ell = {ell} sends {lambda} + rho onto an alcove wall"
        )));
    }
    let image = folded.weight.sub(alg.rho());
    let idx = md
        .index_of(&image)
        .ok_or_else(|| Error::UnknownWeight(image.0.clone()))?;
    Ok((idx, folded.sign))
}

/// `sigma(kappa) / kappa`, which is always `+1` or `-1`.
pub fn normalization_sign(md: &ModularData, ell: i64) -> Result<i32> {
    let ell = normalize_ell(ell, md.order())?;
    let kappa = md.kappa();
    let ratio = kappa.galois(ell)?.checked_div(kappa)?;
    match ratio.to_i64() {
        Some(1) => Ok(1),
        Some(-1) => Ok(-1),
        _ => Err(Error::Internal(format!(
            "sigma_{ell}(kappa)/kappa = {ratio} is not a sign"
        ))),
    }
}

/// The action of one Galois element on `P_+^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaloisAction {
    pub ell: i64,
    pub order: u32,
    /// `perm[lambda] = sigma lambda` as weight indices.
    pub perm: Vec<usize>,
    /// `epsilon_sigma(lambda)` as it enters `sigma(S) = eps S`.
    pub signs: Vec<i32>,
    /// Determinant of the affine Weyl element folding `ell (lambda + rho)`.
    pub fold_signs: Vec<i32>,
    /// `sigma(kappa)/kappa`, so that `signs = eta * fold_signs`.
    pub eta: i32,
}

impl GaloisAction {
    pub fn image(&self, lambda: usize) -> usize {
        self.perm[lambda]
    }

    pub fn sign(&self, lambda: usize) -> i32 {
        self.signs[lambda]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }
}

/// Computes the action of `ell` and verifies
/// `sigma(S_{l,m}) = eps(l) S_{sigma l, m} = eps(m) S_{l, sigma m}`
/// for every pair. A failure is a hard error.
pub fn build_action_table(md: &ModularData, ell: i64) -> Result<GaloisAction> {
    let ell = normalize_ell(ell, md.order())?;
    let eta = normalization_sign(md, ell)?;
    let (perm, fold_signs): (Vec<usize>, Vec<i32>) = md
        .weights()
        .par_iter()
        .map(|w| act_on_weight(md, ell, &w.labels))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let mut seen = vec![false; perm.len()];
    for &p in &perm {
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::Internal(format!("ell = {ell} does not act bijectively")));
        }
    }
    let signs: Vec<i32> = fold_signs.iter().map(|s| s * eta).collect();
    let action = GaloisAction {
        ell,
        order: md.order(),
        perm,
        signs,
        fold_signs,
        eta,
    };
    verify_entrywise(md, &action)?;
    Ok(action)
}

fn verify_entrywise(md: &ModularData, action: &GaloisAction) -> Result<()> {
    let n = md.len();
    let signed = |x: &CycNumber, s: i32| if s == 1 { x.clone() } else { -x };
    (0..n).into_par_iter().try_for_each(|l| {
        for m in 0..n {
            let lhs = md.s_entry(l, m).galois(action.ell)?;
            let row = signed(md.s_entry(action.perm[l], m), action.signs[l]);
            let col = signed(md.s_entry(l, action.perm[m]), action.signs[m]);
            let detail = if lhs != row {
                Some("sigma(S) != eps(lambda) S_{sigma lambda, mu}")
            } else if lhs != col {
                Some("sigma(S) != eps(mu) S_{lambda, sigma mu}")
            } else {
                None
            };
            if let Some(detail) = detail {
                return Err(Error::GaloisTripwire {
                    ell: action.ell,
                    lambda: md.weights()[l].labels.0.clone(),
                    mu: md.weights()[m].labels.0.clone(),
                    detail: detail.into(),
                });
            }
        }
        Ok(())
    })
}

/// All `ell` in `[1, N)` coprime to `N`. With `dedup`, keeps the first
/// representative of each distinct action on the entries of `S`.
pub fn galois_group_elements(md: &ModularData, dedup: bool) -> Vec<i64> {
    let n = md.order() as i64;
    let all: Vec<i64> = (1..n.max(2)).filter(|l| l.gcd(&n) == 1).collect();
    if !dedup {
        return all;
    }
    let mut seen = HashSet::new();
    all.into_iter()
        .filter(|&ell| {
            let key: Vec<CycNumber> = md
                .s()
                .iter()
                .flatten()
                .map(|x| x.galois(ell).expect("ell is a unit"))
                .collect();
            seen.insert(format!("{key:?}"))
        })
        .collect()
}

/// Action tables for every requested `ell`.
pub fn build_all(md: &ModularData, ells: &[i64]) -> Result<Vec<GaloisAction>> {
    ells.par_iter().map(|&l| build_action_table(md, l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::SimpleAlgebra;
    use std::sync::Arc;

    fn md(name: &str, k: u32) -> ModularData {
        ModularData::build(Arc::new(SimpleAlgebra::parse(name).unwrap()), k).unwrap()
    }

    #[test]
    fn identity_and_conjugation() {
        let d = md("A2", 2);
        let id = build_action_table(&d, 1).unwrap();
        assert!(id.is_identity());
        let c = build_action_table(&d, d.order() as i64 - 1).unwrap();
        assert_eq!(c.perm, d.conj());
        assert!(c.signs.iter().all(|&s| s == 1));
    }

    #[test]
    fn a1_level_one_ell_eleven() {
        let d = md("A1", 1);
        let a = build_action_table(&d, 11).unwrap();
        assert_eq!(a.perm, vec![0, 1]);
        assert_eq!(a.fold_signs, vec![-1, -1]);
        assert_eq!(a.signs, vec![-1, -1]);
    }

    #[test]
    fn a1_level_two_ell_five() {
        let d = md("A1", 2);
        let a = build_action_table(&d, 5).unwrap();
        assert_eq!(a.perm, vec![2, 1, 0]);
        assert_eq!(a.fold_signs, vec![-1, 1, -1]);
        // sigma_5(i) = i but sigma_5(sqrt 2) = -sqrt 2, so kappa flips sign.
        assert_eq!(a.eta, -1);
        assert_eq!(a.signs, vec![1, -1, 1]);
    }

    #[test]
    fn non_units_rejected() {
        let d = md("A1", 1);
        assert!(matches!(
            build_action_table(&d, 3),
            Err(Error::NotGaloisElement { .. })
        ));
    }

    #[test]
    fn group_elements_n24() {
        let d = md("A1", 1);
        assert_eq!(galois_group_elements(&d, false), vec![1, 5, 7, 11, 13, 17, 19, 23]);
        let q = galois_group_elements(&d, true);
        assert_eq!(8 % q.len(), 0);
        assert!(q.contains(&1));
    }

    #[test]
    fn inverse_mod_n() {
        assert_eq!(inverse_ell(5, 24).unwrap(), 5);
        assert_eq!(inverse_ell(7, 96).unwrap() * 7 % 96, 1);
    }
}
