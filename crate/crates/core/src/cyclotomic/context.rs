use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

/// Per-order data: the cyclotomic polynomial `Phi_N` and an embedding table.
#[derive(Debug)]
pub(crate) struct Context {
    pub order: u32,
    /// `phi(N)`, the degree of `Phi_N`.
    pub degree: usize,
    /// Nonzero coefficients `(j, c_j)` of `Phi_N` for `j < degree` (it is monic).
    pub phi_tail: Vec<(usize, i64)>,
    /// `exp(2 pi i j / N)` for `j < N`.
    pub roots: Vec<Complex64>,
}

static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Context>>>> = OnceLock::new();

/// Context for order `n`, built once and shared.
pub(crate) fn context(n: u32) -> Arc<Context> {
    assert!(n >= 1, "cyclotomic order must be positive");
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(c) = cache.read().expect("cyclotomic cache poisoned").get(&n) {
        return c.clone();
    }
    let built = Arc::new(build(n));
    // Idempotent: a concurrent builder produces an identical context.
    cache
        .write()
        .expect("cyclotomic cache poisoned")
        .entry(n)
        .or_insert(built)
        .clone()
}

/// Coefficients of `Phi_n`, lowest degree first.
pub(crate) fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    let mut cache: HashMap<u32, Vec<i64>> = HashMap::new();
    cyclo_rec(n, &mut cache)
}

fn cyclo_rec(n: u32, cache: &mut HashMap<u32, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    // x^n - 1
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclo_rec(d, cache);
            num = exact_div(&num, &div);
        }
    }
    cache.insert(n, num.clone());
    num
}

/// Exact division by a monic integer polynomial.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut q = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        q[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

fn build(n: u32) -> Context {
    let phi = cyclotomic_polynomial(n);
    let degree = phi.len() - 1;
    let phi_tail = phi[..degree]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, c))
        .collect();
    let roots = (0..n)
        .map(|j| {
            let t = 2.0 * PI * (j as f64) / (n as f64);
            Complex64::new(t.cos(), t.sin())
        })
        .collect();
    Context {
        order: n,
        degree,
        phi_tail,
        roots,
    }
}

impl Context {
    /// Reduces `poly` (arbitrary length) modulo `Phi_N` in place, using
    /// checked 128-bit arithmetic. Returns `false` on overflow, leaving
    /// `poly` unspecified.
    pub fn reduce_small(&self, poly: &mut Vec<i128>) -> bool {
        let d = self.degree;
        for i in (d..poly.len()).rev() {
            let c = poly[i];
            if c == 0 {
                continue;
            }
            poly[i] = 0;
            for &(j, pj) in &self.phi_tail {
                let idx = i - d + j;
                let Some(prod) = c.checked_mul(pj as i128) else { return false };
                let Some(v) = poly[idx].checked_sub(prod) else { return false };
                poly[idx] = v;
            }
        }
        poly.resize(d, 0);
        true
    }

    pub fn reduce_big(&self, poly: &mut Vec<BigInt>) {
        let d = self.degree;
        for i in (d..poly.len()).rev() {
            if poly[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut poly[i]);
            for &(j, pj) in &self.phi_tail {
                poly[i - d + j] -= &c * pj;
            }
        }
        poly.resize(d, BigInt::zero());
    }

    /// Reduces a vector of exponent-indexed integer coefficients.
    pub fn reduce_any(&self, poly: Vec<BigInt>) -> Vec<BigInt> {
        if let Some(mut small) = to_small(&poly) {
            if self.reduce_small(&mut small) {
                return small.into_iter().map(BigInt::from).collect();
            }
        }
        let mut poly = poly;
        self.reduce_big(&mut poly);
        poly
    }
}

pub(crate) fn to_small(v: &[BigInt]) -> Option<Vec<i128>> {
    v.iter().map(|x| x.to_i64().map(i128::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // Phi_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_polynomial(105).contains(&-2));
    }

    #[test]
    fn degrees_are_euler_phi() {
        for (n, phi) in [(24u32, 8usize), (48, 16), (96, 32), (120, 32), (168, 48), (336, 96), (240, 64)] {
            assert_eq!(context(n).degree, phi);
        }
    }
}
