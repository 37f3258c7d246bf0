//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! An element is stored over the power basis `1, zeta, ..., zeta^{phi(N)-1}`
//! as an integer numerator vector with one positive common denominator,
//! fully reduced modulo `Phi_N`. Binary operations promote both operands to
//! the least common multiple of their orders.

mod context;
mod sqrt;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use context::{context, to_small, Context};

pub use sqrt::{legendre, sqrt_integer};

/// An exact element of `Q(zeta_N)`.
#[derive(Clone)]
pub struct CycNumber {
    order: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    a.gcd(&b)
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// Euler's totient.
pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|&k| gcd_u32(k, n) == 1).count() as u32
}

impl CycNumber {
    fn from_parts(order: u32, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut x = CycNumber { order, num, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn zero(order: u32) -> Self {
        let d = context(order).degree;
        CycNumber {
            order,
            num: vec![BigInt::zero(); d],
            den: BigInt::one(),
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_integer(order, 1)
    }

    pub fn from_integer(order: u32, n: impl Into<BigInt>) -> Self {
        let mut x = Self::zero(order);
        x.num[0] = n.into();
        x
    }

    pub fn from_rational(order: u32, q: &BigRational) -> Self {
        let mut x = Self::zero(order);
        x.num[0] = q.numer().clone();
        x.den = q.denom().clone();
        x.normalize();
        x
    }

    /// `zeta_N^j`; `j` is taken modulo `N`.
    pub fn root_of_unity(order: u32, j: i64) -> Self {
        Self::from_exponents(order, &[(j, 1)])
    }

    /// `sum_j c_j zeta_N^{e_j}` for integer coefficients.
    pub fn from_exponents(order: u32, terms: &[(i64, i64)]) -> Self {
        let ctx = context(order);
        let n = order as i64;
        let mut v = vec![0i128; order as usize];
        for &(e, c) in terms {
            v[e.rem_euclid(n) as usize] += c as i128;
        }
        Self::from_exponent_vector(&ctx, v)
    }

    /// As [`from_exponents`](Self::from_exponents) with a dense coefficient
    /// vector indexed by exponent `0..N`.
    pub fn from_exponent_counts(order: u32, counts: &[i64]) -> Self {
        let ctx = context(order);
        assert_eq!(counts.len(), order as usize);
        Self::from_exponent_vector(&ctx, counts.iter().map(|&c| c as i128).collect())
    }

    fn from_exponent_vector(ctx: &Context, v: Vec<i128>) -> Self {
        let mut small = v.clone();
        let num = if ctx.reduce_small(&mut small) {
            small.into_iter().map(BigInt::from).collect()
        } else {
            let mut big: Vec<BigInt> = v.into_iter().map(BigInt::from).collect();
            ctx.reduce_big(&mut big);
            big
        };
        Self::from_parts(ctx.order, num, BigInt::one())
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Rational coefficients over the power basis, length `phi(N)`.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// Promotes to order `to`, which must be a multiple of the current order.
    pub fn promote(&self, to: u32) -> Result<Self> {
        if to == self.order {
            return Ok(self.clone());
        }
        if to == 0 || !to.is_multiple_of(self.order) {
            return Err(Error::BadPromotion {
                from: self.order,
                to,
            });
        }
        let step = (to / self.order) as usize;
        let ctx = context(to);
        let mut v = vec![BigInt::zero(); to as usize];
        for (j, c) in self.num.iter().enumerate() {
            v[j * step] = c.clone();
        }
        let num = ctx.reduce_any(v);
        Ok(Self::from_parts(to, num, self.den.clone()))
    }

    fn aligned<'a>(a: &'a Self, b: &'a Self) -> (std::borrow::Cow<'a, Self>, std::borrow::Cow<'a, Self>) {
        use std::borrow::Cow;
        if a.order == b.order {
            return (Cow::Borrowed(a), Cow::Borrowed(b));
        }
        let l = lcm_u32(a.order, b.order);
        let pa = if a.order == l { Cow::Borrowed(a) } else { Cow::Owned(a.promote(l).unwrap()) };
        let pb = if b.order == l { Cow::Borrowed(b) } else { Cow::Owned(b.promote(l).unwrap()) };
        (pa, pb)
    }

    fn add_impl(a: &Self, b: &Self, negate_b: bool) -> Self {
        let (a, b) = Self::aligned(a, b);
        let (num, den) = if a.den == b.den {
            let num = a
                .num
                .iter()
                .zip(&b.num)
                .map(|(x, y)| if negate_b { x - y } else { x + y })
                .collect();
            (num, a.den.clone())
        } else {
            let l = a.den.lcm(&b.den);
            let fa = &l / &a.den;
            let fb = &l / &b.den;
            let num = a
                .num
                .iter()
                .zip(&b.num)
                .map(|(x, y)| {
                    let s = x * &fa;
                    let t = y * &fb;
                    if negate_b {
                        s - t
                    } else {
                        s + t
                    }
                })
                .collect();
            (num, l)
        };
        Self::from_parts(a.order, num, den)
    }

    fn mul_impl(a: &Self, b: &Self) -> Self {
        let (a, b) = Self::aligned(a, b);
        if a.is_zero() || b.is_zero() {
            return Self::zero(a.order);
        }
        let ctx = context(a.order);
        let num = mul_reduce(&ctx, &a.num, &b.num);
        Self::from_parts(a.order, num, &a.den * &b.den)
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, q: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        Self::from_parts(self.order, num, &self.den * q.denom())
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let num = self.num.iter().map(|c| c * k).collect();
        Self::from_parts(self.order, num, self.den.clone())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm modulo `Phi_N`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(self.order));
        }
        let ctx = context(self.order);
        let a: Vec<BigRational> = self.num.iter().map(|c| BigRational::from(c.clone())).collect();
        let mut modulus = vec![BigRational::zero(); ctx.degree + 1];
        modulus[ctx.degree] = BigRational::one();
        for &(j, c) in &ctx.phi_tail {
            modulus[j] = BigRational::from(BigInt::from(c));
        }
        let inv = poly_inverse_mod(&a, &modulus).ok_or(Error::DivisionByZero(self.order))?;
        // (num/den)^{-1} = den * num^{-1}
        let den_lcm = inv.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num: Vec<BigInt> = (0..ctx.degree)
            .map(|j| match inv.get(j) {
                Some(q) => q.numer() * (&den_lcm / q.denom()) * &self.den,
                None => BigInt::zero(),
            })
            .collect();
        Ok(Self::from_parts(self.order, num, den_lcm))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.order);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Applies the automorphism `zeta_N -> zeta_N^ell`.
    pub fn galois(&self, ell: i64) -> Result<Self> {
        let n = self.order as i64;
        let l = ell.rem_euclid(n);
        if (l as u32).gcd(&self.order) != 1 {
            return Err(Error::NotGaloisElement {
                ell,
                order: self.order,
            });
        }
        if l == 1 % n {
            return Ok(self.clone());
        }
        let ctx = context(self.order);
        let mut v = vec![BigInt::zero(); self.order as usize];
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                v[((j as i64 * l) % n) as usize] = c.clone();
            }
        }
        let num = ctx.reduce_any(v);
        Ok(Self::from_parts(self.order, num, self.den.clone()))
    }

    /// Complex conjugation, `ell = N - 1`.
    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is always a unit")
    }

    /// Numerical value at `zeta_N = exp(2 pi i / N)` in double precision.
    pub fn embed(&self) -> Complex64 {
        let ctx = context(self.order);
        let mut acc = Complex64::zero();
        let den = big_to_f64(&self.den);
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                acc += ctx.roots[j] * (big_to_f64(c) / den);
            }
        }
        acc
    }

    /// Numerical embedding with at least `precision_bits` of binary precision.
    /// Only the double-precision backend (53 bits) is available.
    pub fn embed_complex(&self, precision_bits: u32) -> Result<Complex64> {
        if precision_bits > f64::MANTISSA_DIGITS {
            return Err(Error::Internal(format!(
                "requested {precision_bits} bits; the float backend provides {}",
                f64::MANTISSA_DIGITS
            )));
        }
        Ok(self.embed())
    }

    /// The rational value, if this element lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).any(|c| !c.is_zero()) {
            return None;
        }
        Some(BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    /// The integer value, if this element is a rational integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        let q = self.to_rational()?;
        q.is_integer().then(|| q.to_integer())
    }

    /// [`to_integer`](Self::to_integer) narrowed to `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer()?.to_i64()
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Integer polynomial product reduced modulo `Phi_N`.
fn mul_reduce(ctx: &Context, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if let (Some(sa), Some(sb)) = (to_small(a), to_small(b)) {
        if let Some(r) = mul_reduce_small(ctx, &sa, &sb) {
            return r.into_iter().map(BigInt::from).collect();
        }
    }
    let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                prod[i + j] += x * y;
            }
        }
    }
    ctx.reduce_big(&mut prod);
    prod
}

fn mul_reduce_small(ctx: &Context, a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
    let mut prod = vec![0i128; a.len() + b.len() - 1];
    let bnz: Vec<(usize, i128)> = b.iter().copied().enumerate().filter(|(_, y)| *y != 0).collect();
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for &(j, y) in &bnz {
            // |x|, |y| < 2^63, so the product fits.
            prod[i + j] = prod[i + j].checked_add(x * y)?;
        }
    }
    if ctx.reduce_small(&mut prod) {
        Some(prod)
    } else {
        None
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                let t = &c * bj;
                r[i + j] -= t;
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    trim(&mut r);
    (q, r)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigRational> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            match b.get(i) {
                Some(y) => x - y,
                None => x,
            }
        })
        .collect();
    trim(&mut out);
    out
}

/// Inverse of `a` modulo the polynomial `m`, if they are coprime.
fn poly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    if r1.is_empty() {
        return None;
    }
    let mut t0: Vec<BigRational> = vec![];
    let mut t1: Vec<BigRational> = vec![BigRational::one()];
    while r1.len() > 1 {
        // keep remainders monic to tame coefficient growth
        let lead = r1.last().unwrap().clone();
        for c in r1.iter_mut() {
            *c /= &lead;
        }
        for c in t1.iter_mut() {
            *c /= &lead;
        }
        let (q, r) = poly_divmod(&r0, &r1);
        let t = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t);
        if r1.is_empty() {
            return None;
        }
    }
    let c = r1[0].clone();
    Some(t1.into_iter().map(|x| x / &c).collect())
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = Self::aligned(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycNumber {}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNumber[{}]({})", self.order, self)
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&CycNumber> for &CycNumber {
            type Output = CycNumber;
            fn $m(self, rhs: &CycNumber) -> CycNumber {
                $body(self, rhs)
            }
        }
        impl $tr<CycNumber> for CycNumber {
            type Output = CycNumber;
            fn $m(self, rhs: CycNumber) -> CycNumber {
                $body(&self, &rhs)
            }
        }
        impl $tr<&CycNumber> for CycNumber {
            type Output = CycNumber;
            fn $m(self, rhs: &CycNumber) -> CycNumber {
                $body(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| CycNumber::add_impl(a, b, false));
forward_binop!(Sub, sub, |a, b| CycNumber::add_impl(a, b, true));
forward_binop!(Mul, mul, CycNumber::mul_impl);

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber {
            order: self.order,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        -&self
    }
}

/// JSON form: `{"order": N, "coeffs": ["p/q", ...]}` over the power basis.
#[derive(Serialize, Deserialize)]
struct CycRepr {
    order: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs()
            .iter()
            .map(|q| format!("{}/{}", q.numer(), q.denom()))
            .collect();
        CycRepr {
            order: self.order,
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CycRepr::deserialize(d)?;
        if repr.order == 0 {
            return Err(D::Error::custom("order must be positive"));
        }
        let degree = context(repr.order).degree;
        if repr.coeffs.len() != degree {
            return Err(D::Error::custom(format!(
                "expected {degree} coefficients for order {}, got {}",
                repr.order,
                repr.coeffs.len()
            )));
        }
        let mut qs = Vec::with_capacity(degree);
        for c in &repr.coeffs {
            let (n, d) = c
                .split_once('/')
                .ok_or_else(|| D::Error::custom(format!("bad coefficient `{c}`")))?;
            let n: BigInt = n.parse().map_err(D::Error::custom)?;
            let d: BigInt = d.parse().map_err(D::Error::custom)?;
            if d.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            qs.push(BigRational::new(n, d));
        }
        let den = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = qs.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        Ok(CycNumber::from_parts(repr.order, num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32, j: i64) -> CycNumber {
        CycNumber::root_of_unity(n, j)
    }

    #[test]
    fn roots_of_unity() {
        let i = z(4, 1);
        assert_eq!(&i * &i, CycNumber::from_integer(4, -1));
        assert!((z(3, 0) + z(3, 1) + z(3, 2)).is_zero());
        assert_eq!(z(7, 0), CycNumber::one(7));
        assert_eq!(z(5, 12), z(5, 2));
        let s = z(8, 1) + z(8, 7);
        assert!((s.embed().re - 2f64.sqrt()).abs() < 1e-12);
        assert!(s.embed().im.abs() < 1e-12);
    }

    #[test]
    fn inverse_of_one_plus_zeta3() {
        let a = CycNumber::one(3) + z(3, 1);
        assert_eq!(&a * &(-z(3, 1)), CycNumber::one(3));
        assert_eq!(a.inverse().unwrap(), -z(3, 1));
    }

    #[test]
    fn promotion_on_mixed_orders() {
        let s = z(3, 1) + z(6, 2);
        assert_eq!(s.order(), 6);
        assert_eq!(s, z(6, 2).scale_int(2));
        // equality across orders
        assert_eq!(z(3, 1), z(6, 2));
        assert_ne!(z(3, 1), z(6, 1));
    }

    #[test]
    fn galois_basics() {
        let a = z(8, 1) + z(8, 3).scale_int(5);
        assert_eq!(a.galois(1).unwrap(), a);
        assert_eq!(z(12, 1).galois(11).unwrap(), z(12, 11));
        let root2 = z(8, 1) + z(8, 7);
        let img = root2.galois(3).unwrap();
        assert_eq!(img, z(8, 3) + z(8, 5));
        assert!((img.embed().re + 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(z(12, 1).galois(3), Err(Error::NotGaloisElement { .. })));
        let c = z(12, 5);
        assert!((c.conj().embed() - c.embed().conj()).norm() < 1e-12);
    }

    #[test]
    fn integer_detection() {
        assert_eq!(CycNumber::from_integer(10, 3).to_i64(), Some(3));
        assert_eq!(z(5, 1).to_i64(), None);
        let x = z(3, 1) + z(3, 2) + CycNumber::from_integer(3, 2);
        assert_eq!(x.to_i64(), Some(1));
        let half = CycNumber::from_rational(6, &BigRational::new(1.into(), 2.into()));
        assert_eq!(half.to_integer(), None);
        assert!(half.to_rational().is_some());
    }

    #[test]
    fn division_by_zero() {
        assert!(matches!(CycNumber::zero(5).inverse(), Err(Error::DivisionByZero(5))));
    }

    #[test]
    fn embedding_of_simple_values() {
        assert_eq!(CycNumber::zero(9).embed(), Complex64::new(0.0, 0.0));
        let i = z(4, 1).embed();
        assert!(i.re.abs() < 1e-15 && (i.im - 1.0).abs() < 1e-15);
        assert!(z(4, 1).embed_complex(53).is_ok());
        assert!(z(4, 1).embed_complex(100).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let x = z(12, 1).scale(&BigRational::new(3.into(), 7.into())) + z(12, 5);
        let s = serde_json::to_string(&x).unwrap();
        let y: CycNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        assert!(serde_json::from_str::<CycNumber>(r#"{"order":4,"coeffs":["1/1"]}"#).is_err());
    }

    #[test]
    fn euler_phi_values() {
        assert_eq!(euler_phi(24), 8);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(168), 48);
    }
}
