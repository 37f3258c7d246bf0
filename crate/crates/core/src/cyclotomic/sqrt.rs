//! Square roots of positive integers as quadratic Gauss sums.

use super::CycNumber;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i64 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn factor(mut d: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        let mut e = 0;
        while d.is_multiple_of(p) {
            d /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if d > 1 {
        out.push((d, 1));
    }
    out
}

/// `g_p = sum_{a=1}^{p-1} (a/p) zeta_p^a`.
fn gauss_sum(p: u64) -> CycNumber {
    let terms: Vec<(i64, i64)> = (1..p as i64).map(|a| (a, legendre(a, p))).collect();
    CycNumber::from_exponents(p as u32, &terms)
}

/// Positive square root of a prime.
fn sqrt_prime(p: u64) -> CycNumber {
    if p == 2 {
        return CycNumber::root_of_unity(8, 1) + CycNumber::root_of_unity(8, 7);
    }
    let g = gauss_sum(p);
    if p % 4 == 1 {
        g
    } else {
        // g_p = i sqrt(p)
        &g * &CycNumber::root_of_unity(4, 3)
    }
}

/// The positive square root of `d >= 1`, exactly, in a cyclotomic field
/// of order dividing `4d`.
pub fn sqrt_integer(d: u64) -> CycNumber {
    assert!(d >= 1, "sqrt_integer needs d >= 1");
    let mut square_part = 1u64;
    let mut acc = CycNumber::one(1);
    for (p, e) in factor(d) {
        square_part *= p.pow(e / 2);
        if e % 2 == 1 {
            acc = &acc * &sqrt_prime(p);
        }
    }
    acc.scale_int(square_part as i64)
}
