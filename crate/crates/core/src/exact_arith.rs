//! Exact arithmetic in the ring of cyclotomic integers `Z[e]`, `e` a primitive
//! `m`-th root of unity, plus the rationals used by integer-alphabet
//! interpolation.
//!
//! Elements of `Z[e]` are stored as their canonical residue modulo the `m`-th
//! cyclotomic polynomial, in the basis `1, e, ..., e^(phi(m)-1)`. Two elements are
//! equal exactly when their coefficient vectors are equal, so zero testing is a
//! structural check.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use num_rational::BigRational;

/// The `m`-th cyclotomic polynomial, monic, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycPolynomial {
    m: u32,
    coeffs: Vec<BigInt>,
}

impl CycPolynomial {
    pub fn modulus(&self) -> u32 {
        self.m
    }

    /// Coefficients, lowest degree first. The last entry is always 1.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Euler's totient of `m`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

impl fmt::Display for CycPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (k, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{abs}*x^{k}")?,
            }
        }
        Ok(())
    }
}

fn phi_cache() -> &'static RwLock<HashMap<u32, Arc<CycPolynomial>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<CycPolynomial>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Returns `Phi_m`, computed as `(x^m - 1) / prod_{d | m, d < m} Phi_d` by exact
/// polynomial division.
pub fn cyclotomic_polynomial(m: u32) -> Result<CycPolynomial> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "cyclotomic modulus must be at least 2, got {m}"
        )));
    }
    Ok((*phi(m)).clone())
}

pub(crate) fn phi(m: u32) -> Arc<CycPolynomial> {
    debug_assert!(m >= 1);
    if let Some(p) = phi_cache().read().unwrap().get(&m) {
        return Arc::clone(p);
    }
    let mut numerator = vec![BigInt::zero(); m as usize + 1];
    numerator[0] = BigInt::from(-1);
    numerator[m as usize] = BigInt::one();
    let mut divisor = vec![BigInt::one()];
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        divisor = poly_mul(&divisor, &phi(d).coeffs);
    }
    let (quotient, remainder) = poly_divmod_monic(&numerator, &divisor);
    debug_assert!(remainder.iter().all(Zero::is_zero));
    let poly = Arc::new(CycPolynomial {
        m,
        coeffs: quotient,
    });
    phi_cache()
        .write()
        .unwrap()
        .entry(m)
        .or_insert_with(|| Arc::clone(&poly));
    poly
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
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

/// Long division by a monic divisor. Returns (quotient, remainder) with the
/// remainder padded to `divisor.len() - 1` entries.
fn poly_divmod_monic(num: &[BigInt], divisor: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let dlen = divisor.len();
    let deg = dlen - 1;
    let mut rem = num.to_vec();
    if rem.len() < dlen {
        rem.resize(deg, BigInt::zero());
        return (vec![BigInt::zero()], rem);
    }
    let mut quot = vec![BigInt::zero(); rem.len() - deg];
    for top in (deg..rem.len()).rev() {
        let c = std::mem::take(&mut rem[top]);
        if c.is_zero() {
            continue;
        }
        let shift = top - deg;
        for (k, d) in divisor[..deg].iter().enumerate() {
            if !d.is_zero() {
                rem[shift + k] -= &c * d;
            }
        }
        quot[shift] = c;
    }
    rem.truncate(deg);
    (quot, rem)
}

/// Element of `Z[e_m]` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    m: u32,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(m: u32) -> Result<Self> {
        let deg = cyclotomic_polynomial(m)?.degree();
        Ok(CycInt {
            m,
            coeffs: vec![BigInt::zero(); deg],
        })
    }

    pub fn one(m: u32) -> Result<Self> {
        Self::epsilon_pow(m, 0)
    }

    /// `e^k` for any integer `k`.
    pub fn epsilon_pow(m: u32, k: i64) -> Result<Self> {
        check_modulus(m)?;
        let mut raw = vec![BigInt::zero(); m as usize];
        raw[k.rem_euclid(m as i64) as usize] = BigInt::one();
        Ok(reduce_by_phi(m, raw))
    }

    /// Reduces `sum_i raw[i] e^i` where `raw` has exactly `m` entries.
    pub fn from_raw(m: u32, raw: &[BigInt]) -> Result<Self> {
        check_modulus(m)?;
        if raw.len() != m as usize {
            return Err(Error::invalid(format!(
                "raw vector has length {}, expected m = {m}",
                raw.len()
            )));
        }
        Ok(reduce_by_phi(m, raw.to_vec()))
    }

    /// Reduces `sum_k counts[k] e^k` for machine-size counts of any length;
    /// index `k` is taken modulo `m`.
    pub fn from_counts(m: u32, counts: &[i64]) -> Result<Self> {
        check_modulus(m)?;
        let mut raw = vec![BigInt::zero(); m as usize];
        for (k, c) in counts.iter().enumerate() {
            raw[k % m as usize] += *c;
        }
        Ok(reduce_by_phi(m, raw))
    }

    /// Reduces a polynomial in `e` of arbitrary length (exponent `i` is the
    /// index) modulo `e^m = 1` and `Phi_m(e) = 0`.
    pub fn from_poly(m: u32, poly: &[BigInt]) -> Result<Self> {
        check_modulus(m)?;
        let mut raw = vec![BigInt::zero(); m as usize];
        for (k, c) in poly.iter().enumerate() {
            raw[k % m as usize] += c;
        }
        Ok(reduce_by_phi(m, raw))
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    /// Canonical coefficients in the basis `1, e, ..., e^(phi(m)-1)`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn try_add(&self, other: &CycInt) -> Result<CycInt> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycInt { m: self.m, coeffs })
    }

    pub fn try_sub(&self, other: &CycInt) -> Result<CycInt> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycInt { m: self.m, coeffs })
    }

    pub fn try_mul(&self, other: &CycInt) -> Result<CycInt> {
        self.same_ring(other)?;
        let product = poly_mul(&self.coeffs, &other.coeffs);
        Ok(reduce_by_phi(self.m, product))
    }

    /// Multiplies by `e^k`.
    pub fn mul_epsilon_pow(&self, k: i64) -> CycInt {
        let m = self.m as usize;
        let shift = k.rem_euclid(self.m as i64) as usize;
        let mut raw = vec![BigInt::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[(i + shift) % m] += c;
        }
        reduce_by_phi(self.m, raw)
    }

    pub fn scale(&self, factor: &BigInt) -> CycInt {
        CycInt {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    fn same_ring(&self, other: &CycInt) -> Result<()> {
        if self.m != other.m {
            return Err(Error::invalid(format!(
                "modulus mismatch: {} vs {}",
                self.m, other.m
            )));
        }
        Ok(())
    }

    /// Parses the textual form produced by `Display` (`-1 + e^1`, `3*e^2`, `0`).
    pub fn parse(m: u32, text: &str) -> Result<CycInt> {
        check_modulus(m)?;
        let mut raw: Vec<BigInt> = Vec::new();
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let cleaned = cleaned
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .unwrap_or(&cleaned);
        if cleaned.is_empty() {
            return Err(Error::invalid("empty cyclotomic literal"));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = cleaned.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-')
                && bytes[i - 1] != b'^'
                && bytes[i - 1] != b'*'
            {
                terms.push(&cleaned[start..i]);
                start = i;
            }
        }
        terms.push(&cleaned[start..]);
        for term in terms {
            let (sign, body) = match term.as_bytes().first() {
                Some(b'-') => (-1, &term[1..]),
                Some(b'+') => (1, &term[1..]),
                _ => (1, term),
            };
            let bad = || Error::invalid(format!("malformed cyclotomic term '{term}'"));
            let (coeff, power) = if let Some(pos) = body.find("e^") {
                let c = match &body[..pos] {
                    "" => BigInt::one(),
                    s => s
                        .strip_suffix('*')
                        .ok_or_else(bad)?
                        .parse()
                        .map_err(|_| bad())?,
                };
                let k: usize = body[pos + 2..].parse().map_err(|_| bad())?;
                (c, k)
            } else {
                (body.parse::<BigInt>().map_err(|_| bad())?, 0)
            };
            if raw.len() <= power {
                raw.resize(power + 1, BigInt::zero());
            }
            raw[power] += coeff * sign;
        }
        CycInt::from_poly(m, &raw)
    }
}

fn check_modulus(m: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "cyclotomic modulus must be at least 2, got {m}"
        )));
    }
    Ok(())
}

fn reduce_by_phi(m: u32, poly: Vec<BigInt>) -> CycInt {
    let p = phi(m);
    let (_, rem) = poly_divmod_monic(&poly, &p.coeffs);
    CycInt { m, coeffs: rem }
}

/// Canonical residue of `sum_i raw[i] e^i`; `raw` must have length `m`.
pub fn cyc_reduce(m: u32, raw: &[BigInt]) -> Result<CycInt> {
    CycInt::from_raw(m, raw)
}

pub fn cyc_add(a: &CycInt, b: &CycInt) -> Result<CycInt> {
    a.try_add(b)
}

pub fn cyc_mul(a: &CycInt, b: &CycInt) -> Result<CycInt> {
    a.try_mul(b)
}

pub fn cyc_is_zero(a: &CycInt) -> bool {
    a.is_zero()
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        -&self
    }
}

/// Panics on modulus mismatch; use [`CycInt::try_add`] to get an error instead.
impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.try_add(rhs).expect("cyclotomic modulus mismatch")
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.try_sub(rhs).expect("cyclotomic modulus mismatch")
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.try_mul(rhs).expect("cyclotomic modulus mismatch")
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (k, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (_, true) => write!(f, "e^{k}")?,
                (_, false) => write!(f, "{abs}*e^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn phi_ints(m: u32) -> Vec<i64> {
        cyclotomic_polynomial(m)
            .unwrap()
            .coeffs()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(phi_ints(2), vec![1, 1]);
        assert_eq!(phi_ints(3), vec![1, 1, 1]);
        assert_eq!(phi_ints(4), vec![1, 0, 1]);
        assert_eq!(phi_ints(6), vec![1, -1, 1]);
        assert_eq!(phi_ints(5), vec![1, 1, 1, 1, 1]);
        assert!(cyclotomic_polynomial(1).is_err());
        assert!(cyclotomic_polynomial(0).is_err());
    }

    #[test]
    fn product_over_divisors_is_x_to_the_m_minus_one() {
        for m in 2..=30u32 {
            let mut prod = vec![BigInt::one()];
            for d in (1..=m).filter(|d| m % d == 0) {
                prod = poly_mul(&prod, phi(d).coeffs());
            }
            let mut expected = vec![BigInt::zero(); m as usize + 1];
            expected[0] = BigInt::from(-1);
            expected[m as usize] = BigInt::one();
            assert_eq!(prod, expected, "m = {m}");
        }
    }

    #[test]
    fn phi_of_105_has_a_coefficient_two() {
        assert!(phi_ints(105).contains(&-2));
    }

    #[test]
    fn reduce_examples() {
        let r = cyc_reduce(3, &ints(&[8, 10, 9])).unwrap();
        assert_eq!(r.coeffs(), &ints(&[-1, 1])[..]);
        assert_eq!(r.to_string(), "-1 + e^1");
        assert!(cyc_reduce(3, &ints(&[1, 1, 1])).unwrap().is_zero());
        assert!(cyc_reduce(5, &ints(&[7, 7, 7, 7, 7])).unwrap().is_zero());
        assert!(cyc_reduce(3, &ints(&[5, 5, 5])).unwrap().is_zero());
        assert!(!cyc_reduce(3, &ints(&[8, 10, 9])).unwrap().is_zero());
        assert!(cyc_reduce(2, &ints(&[4, 4])).unwrap().is_zero());
        assert!(matches!(
            cyc_reduce(3, &ints(&[1, 2])),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn multiplication_examples() {
        let e3 = CycInt::epsilon_pow(3, 1).unwrap();
        let sq = cyc_mul(&e3, &e3).unwrap();
        assert_eq!(sq.coeffs(), &ints(&[-1, -1])[..]);
        assert_eq!(sq, CycInt::epsilon_pow(3, 2).unwrap());

        let a = cyc_reduce(3, &ints(&[-1, 1, 0])).unwrap();
        let b = cyc_reduce(3, &ints(&[1, -1, 0])).unwrap();
        assert!(cyc_add(&a, &b).unwrap().is_zero());

        let i = CycInt::epsilon_pow(4, 1).unwrap();
        assert_eq!(cyc_mul(&i, &i).unwrap(), -CycInt::one(4).unwrap());

        let other = CycInt::one(5).unwrap();
        assert!(cyc_mul(&i, &other).is_err());
        assert!(cyc_add(&i, &other).is_err());
    }

    #[test]
    fn epsilon_has_order_m() {
        for m in 2..=12u32 {
            let e = CycInt::epsilon_pow(m, 1).unwrap();
            let mut acc = CycInt::one(m).unwrap();
            for step in 1..=m {
                acc = &acc * &e;
                assert_eq!(
                    acc == CycInt::one(m).unwrap(),
                    step == m,
                    "m={m} step={step}"
                );
            }
        }
    }

    #[test]
    fn parse_round_trips_display() {
        for m in [2u32, 3, 4, 5, 6, 12] {
            for raw in [
                vec![3i64, -1, 4],
                vec![0, 0, 0],
                vec![-7, 2, 0, 11],
                vec![1],
            ] {
                let c = CycInt::from_counts(m, &raw).unwrap();
                let text = c.to_string();
                assert_eq!(CycInt::parse(m, &text).unwrap(), c, "{text}");
                assert_eq!(CycInt::parse(m, &format!("({text})")).unwrap(), c);
            }
        }
        assert!(CycInt::parse(3, "e^").is_err());
        assert!(CycInt::parse(3, "").is_err());
    }

    fn arb_cyc(m: u32) -> impl Strategy<Value = CycInt> {
        proptest::collection::vec(-50i64..50, m as usize)
            .prop_map(move |raw| CycInt::from_counts(m, &raw).unwrap())
    }

    fn arb_triple() -> impl Strategy<Value = (CycInt, CycInt, CycInt)> {
        (2u32..13).prop_flat_map(|m| (arb_cyc(m), arb_cyc(m), arb_cyc(m)))
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in arb_triple()) {
            prop_assert!((&a - &a).is_zero());
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn canonical_coefficients_reduce_to_themselves(a in (2u32..16).prop_flat_map(arb_cyc)) {
            let m = a.modulus();
            let mut raw = a.coeffs().to_vec();
            raw.resize(m as usize, BigInt::zero());
            prop_assert_eq!(cyc_reduce(m, &raw).unwrap(), a);
        }

        #[test]
        fn prime_zero_test_matches_equal_coefficients(
            (p, raw) in prop_oneof![Just(2u32), Just(3u32), Just(5u32), Just(7u32), Just(11u32)]
                .prop_flat_map(|p| (Just(p), proptest::collection::vec(-3i64..3, p as usize)))
        ) {
            let all_equal = raw.iter().all(|&x| x == raw[0]);
            prop_assert_eq!(CycInt::from_counts(p, &raw).unwrap().is_zero(), all_equal);
        }

        #[test]
        fn mul_epsilon_matches_ring_mul(a in (2u32..13).prop_flat_map(arb_cyc), k in -20i64..20) {
            let e = CycInt::epsilon_pow(a.modulus(), k).unwrap();
            prop_assert_eq!(a.mul_epsilon_pow(k), &a * &e);
        }
    }
}
