//! Floating-point modular data for algebras beyond the exact bound. Never
//! authoritative; used for cross-checks and exploration.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modular_data::{cyclotomic_order, enumerate_weights, AffineWeight};
use crate::rootsys::SimpleAlgebra;

/// Largest Weyl group handled by the float backend (E6).
pub const FLOAT_WEYL_LIMIT: u64 = 51840;

/// Largest residual from the nearest integer accepted by [`FloatModularData::verlinde_table`].
pub const VERLINDE_RESIDUAL: f64 = 1e-6;

pub struct FloatModularData {
    pub algebra: String,
    pub level: u32,
    pub order: u32,
    pub weights: Vec<AffineWeight>,
    pub s: Vec<Vec<Complex64>>,
    pub t: Vec<Complex64>,
}

impl FloatModularData {
    pub fn build(alg: &SimpleAlgebra, k: u32) -> Result<Self> {
        if alg.weyl_order() > FLOAT_WEYL_LIMIT {
            return Err(Error::FloatBound {
                weyl_order: alg.weyl_order(),
                limit: FLOAT_WEYL_LIMIT,
            });
        }
        let m = k as i64 + alg.dual_coxeter();
        let order = cyclotomic_order(alg, k);
        let weights = enumerate_weights(alg, k);
        let d = alg.center_index() as f64 * (m as f64).powi(alg.rank() as i32);
        let kappa = Complex64::i().powu(alg.n_pos_roots() as u32) / d.sqrt();
        let g: Vec<Vec<f64>> = alg
            .quadratic_form()
            .iter()
            .map(|r| r.iter().map(|q| *q.numer() as f64 / *q.denom() as f64).collect())
            .collect();
        let shifted: Vec<Vec<f64>> = weights
            .iter()
            .map(|w| w.labels.add(alg.rho()).0.iter().map(|&x| x as f64).collect())
            .collect();
        let two_pi = 2.0 * std::f64::consts::PI;
        let s = weights
            .par_iter()
            .map(|w| {
                let orbit = alg
                    .signed_orbit(&w.labels.add(alg.rho()))
                    .ok_or_else(|| Error::Internal(format!("{w} + rho is not regular")))?;
                Ok(shifted
                    .iter()
                    .map(|mr| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (x, sign) in &orbit {
                            let mut ip = 0.0;
                            for (i, &xi) in x.labels().iter().enumerate() {
                                for (j, &yj) in mr.iter().enumerate() {
                                    ip += g[i][j] * xi as f64 * yj;
                                }
                            }
                            acc += Complex64::from_polar(*sign as f64, -two_pi * ip / m as f64);
                        }
                        kappa * acc
                    })
                    .collect())
            })
            .collect::<Result<Vec<Vec<Complex64>>>>()?;
        let c = k as f64 * alg.dim() as f64 / m as f64;
        let t = weights
            .iter()
            .map(|w| {
                let l = w.labels.add(&alg.rho().scale(2));
                let mut q = 0.0;
                for (i, &a) in w.labels.labels().iter().enumerate() {
                    for (j, &b) in l.labels().iter().enumerate() {
                        q += g[i][j] * a as f64 * b as f64;
                    }
                }
                Complex64::from_polar(1.0, two_pi * (q / (2.0 * m as f64) - c / 24.0))
            })
            .collect();
        Ok(FloatModularData {
            algebra: alg.name(),
            level: k,
            order,
            weights,
            s,
            t,
        })
    }

    /// Verlinde coefficients rounded to the nearest integer, `[a][b][c]`.
    pub fn verlinde_table(&self) -> Result<Vec<Vec<Vec<u64>>>> {
        let n = self.weights.len();
        (0..n)
            .into_par_iter()
            .map(|a| {
                (0..n)
                    .map(|b| {
                        (0..n)
                            .map(|c| {
                                let v: Complex64 = (0..n)
                                    .map(|g| self.s[a][g] * self.s[b][g] * self.s[c][g].conj() / self.s[0][g])
                                    .sum();
                                let r = v.re.round();
                                if (v - Complex64::new(r, 0.0)).norm() > VERLINDE_RESIDUAL || r < 0.0 {
                                    return Err(Error::Internal(format!(
                                        "float Verlinde N_{{{a},{b}}}^{{{c}}} = {v} is not near a non-negative integer"
                                    )));
                                }
                                Ok(r as u64)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Largest entry of `|S S^dagger - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.weights.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v: Complex64 = (0..n).map(|g| self.s[i][g] * self.s[j][g].conj()).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }
}
