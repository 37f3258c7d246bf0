//! Closed-form Witten invariants of unknots, chains and key chains, and the
//! Verlinde dimensions.

use std::fmt;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::modular_data::ModularData;

/// Which closed form was evaluated, with its weight arguments as indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Invariant {
    /// `t` parallel unknots in `S^3`.
    ParallelUnknots { weights: Vec<usize> },
    /// `t` parallel circles in `S^1 x (genus h surface)`.
    VerlindeDimension { genus: u32, weights: Vec<usize> },
    /// A chain of `t >= 1` linked unknots in `S^3`.
    Chain { weights: Vec<usize> },
    /// `t` unknots linked around a central one carrying `center`.
    Keychain { center: usize, weights: Vec<usize> },
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::ParallelUnknots { weights } => write!(f, "D{weights:?}"),
            Invariant::VerlindeDimension { genus, weights } => write!(f, "V^{genus},{}{weights:?}", weights.len()),
            Invariant::Chain { weights } => write!(f, "C{weights:?}"),
            Invariant::Keychain { center, weights } => write!(f, "S[{center};{weights:?}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantValue {
    pub exact: CycNumber,
    pub context: Invariant,
}

impl InvariantValue {
    pub fn approx(&self) -> num_complex::Complex64 {
        self.exact.embed()
    }
}

fn check_indices(md: &ModularData, ws: &[usize]) -> Result<()> {
    match ws.iter().find(|&&w| w >= md.len()) {
        Some(&w) => Err(Error::Internal(format!(
            "weight index {w} out of range for |P_+^k| = {}",
            md.len()
        ))),
        None => Ok(()),
    }
}

/// `S_{00} prod_i S_{0,l_i}/S_{00}`.
pub fn parallel_unknots(md: &ModularData, weights: &[usize]) -> Result<InvariantValue> {
    check_indices(md, weights)?;
    let exact = weights
        .iter()
        .fold(md.s_entry(0, 0).clone(), |acc, &l| &acc * md.ratio(l, 0));
    Ok(InvariantValue {
        exact,
        context: Invariant::ParallelUnknots {
            weights: weights.to_vec(),
        },
    })
}

/// `(S_{0,mu})^{2(1-h)}` for every `mu`, the genus weights of the
/// Verlinde sum.
pub fn genus_weights(md: &ModularData, genus: u32) -> Result<Vec<CycNumber>> {
    let e = 2 * (1 - genus as i64);
    (0..md.len())
        .map(|mu| {
            if e >= 0 {
                md.s_entry(0, mu).pow(e)
            } else {
                md.s_inverse(0, mu)?.pow(-e)
            }
        })
        .collect()
}

/// The Verlinde sum with precomputed [`genus_weights`], left exact.
pub fn verlinde_sum(md: &ModularData, genus_weights: &[CycNumber], weights: &[usize]) -> CycNumber {
    genus_weights
        .iter()
        .enumerate()
        .fold(CycNumber::zero(md.order()), |acc, (mu, g)| {
            let term = weights.iter().fold(g.clone(), |t, &l| &t * md.ratio(l, mu));
            acc + term
        })
}

/// Reads a Verlinde sum as a non-negative integer.
pub fn as_dimension(x: &CycNumber, context: &dyn Fn() -> String) -> Result<u64> {
    match x.to_integer() {
        Some(v) if !v.is_negative() => v
            .to_u64()
            .ok_or_else(|| Error::Internal(format!("{} overflows u64", context()))),
        _ => Err(Error::Internal(format!(
            "{} = {x} is not a non-negative integer",
            context()
        ))),
    }
}

/// `sum_mu (S_{0 mu})^{2(1-h)} prod_i S_{l_i mu}/S_{0 mu}`, asserted to be a
/// non-negative integer.
pub fn verlinde_dimension(md: &ModularData, genus: u32, weights: &[usize]) -> Result<u64> {
    check_indices(md, weights)?;
    let g = genus_weights(md, genus)?;
    let v = verlinde_sum(md, &g, weights);
    as_dimension(&v, &|| format!("V^{{{genus},{}}}{weights:?}", weights.len()))
}

/// `S_{0,l_1} prod_{i<t} S_{l_i,l_{i+1}}/S_{0,l_i}`.
pub fn chain(md: &ModularData, weights: &[usize]) -> Result<InvariantValue> {
    check_indices(md, weights)?;
    let Some(&first) = weights.first() else {
        return Err(Error::Internal("a chain needs at least one component".into()));
    };
    let exact = weights
        .windows(2)
        .fold(md.s_entry(0, first).clone(), |acc, w| &acc * md.ratio(w[1], w[0]));
    Ok(InvariantValue {
        exact,
        context: Invariant::Chain {
            weights: weights.to_vec(),
        },
    })
}

/// `S_{0,l_0} prod_i S_{l_0,l_i}/S_{l_0,0}`.
pub fn keychain(md: &ModularData, center: usize, weights: &[usize]) -> Result<InvariantValue> {
    check_indices(md, weights)?;
    check_indices(md, &[center])?;
    let exact = weights
        .iter()
        .fold(md.s_entry(0, center).clone(), |acc, &l| &acc * md.ratio(l, center));
    Ok(InvariantValue {
        exact,
        context: Invariant::Keychain {
            center,
            weights: weights.to_vec(),
        },
    })
}

/// Evaluates any of the closed forms.
pub fn evaluate(md: &ModularData, inv: &Invariant) -> Result<InvariantValue> {
    match inv {
        Invariant::ParallelUnknots { weights } => parallel_unknots(md, weights),
        Invariant::VerlindeDimension { genus, weights } => {
            let v = verlinde_dimension(md, *genus, weights)?;
            Ok(InvariantValue {
                exact: CycNumber::from_integer(md.order(), v),
                context: inv.clone(),
            })
        }
        Invariant::Chain { weights } => chain(md, weights),
        Invariant::Keychain { center, weights } => keychain(md, *center, weights),
    }
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
    fn small_cases() {
        let d = md("A1", 2);
        assert_eq!(parallel_unknots(&d, &[]).unwrap().exact, *d.s_entry(0, 0));
        assert_eq!(parallel_unknots(&d, &[1]).unwrap().exact, *d.s_entry(0, 1));
        assert_eq!(chain(&d, &[2]).unwrap().exact, *d.s_entry(0, 2));
        assert_eq!(chain(&d, &[1, 2]).unwrap().exact, *d.s_entry(1, 2));
        assert_eq!(keychain(&d, 1, &[]).unwrap().exact, *d.s_entry(0, 1));
        assert_eq!(keychain(&d, 1, &[2]).unwrap().exact, *d.s_entry(1, 2));
        // the vacuum links trivially: S_00 (S_01/S_00)(S_10/S_01) = S_01
        let inv_root2 = crate::cyclotomic::sqrt_integer(2).inverse().unwrap();
        assert_eq!(chain(&d, &[0, 1, 0]).unwrap().exact, inv_root2);
        assert!(chain(&d, &[]).is_err());
    }

    #[test]
    fn verlinde_dimensions() {
        let d = md("A2", 2);
        assert_eq!(verlinde_dimension(&d, 1, &[]).unwrap(), d.len() as u64);
        for l in 0..d.len() {
            for m in 0..d.len() {
                let v = verlinde_dimension(&d, 0, &[l, d.conj()[m]]).unwrap();
                assert_eq!(v, (l == m) as u64);
            }
        }
        // genus 2, no punctures, A1 level 1: 2^g
        let d = md("A1", 1);
        assert_eq!(verlinde_dimension(&d, 2, &[]).unwrap(), 4);
    }
}
