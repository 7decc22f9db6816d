//! The unique representing polynomial of an m-ary function (per-variable degree
//! at most `m - 1`), its degree, and the coefficient identities tying it to
//! averages and shifts.
//!
//! Over the unity alphabet the coefficient of `x^a` is `m^-n * sum_x e^(f(x) - <a,x>)`.
//! We store the unscaled character sum as a [`CycInt`] and record `scale = m^n`,
//! so nothing is ever divided. Over the integer alphabet the coefficients are
//! rationals from tensor Lagrange interpolation on the nodes `0..m`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{BigRational, CycInt};
use crate::functions::{block_sensitivity, sensitivity, shift_function, Alphabet, MAryFunction};
use crate::hamming::{check_vertex, HammingSpace};
use crate::limits::Limits;

/// Exponent vector of a monomial. Ordered by total degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpVector {
    total_degree: usize,
    exponents: Vec<u32>,
}

impl ExpVector {
    pub fn new(exponents: Vec<u32>) -> Self {
        ExpVector {
            total_degree: exponents.iter().map(|&e| e as usize).sum(),
            exponents,
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn total_degree(&self) -> usize {
        self.total_degree
    }
}

/// An exact scalar: a cyclotomic integer (unity alphabet) or a rational
/// (integer alphabet).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Cyclotomic(CycInt),
    Rational(BigRational),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Cyclotomic(c) => c.is_zero(),
            Scalar::Rational(r) => r.is_zero(),
        }
    }

    pub fn as_cyclotomic(&self) -> Option<&CycInt> {
        match self {
            Scalar::Cyclotomic(c) => Some(c),
            Scalar::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Cyclotomic(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Cyclotomic(c) => write!(f, "({c})"),
            Scalar::Rational(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentingPolynomial {
    m: u32,
    n: usize,
    alphabet: Alphabet,
    /// Every stored coefficient is `scale` times the true coefficient.
    scale: BigInt,
    terms: BTreeMap<ExpVector, Scalar>,
}

impl RepresentingPolynomial {
    /// Builds a polynomial from explicit terms, dropping zero coefficients and
    /// checking the per-variable degree bound.
    pub fn from_terms(
        m: u32,
        n: usize,
        alphabet: Alphabet,
        scale: BigInt,
        terms: impl IntoIterator<Item = (Vec<u32>, Scalar)>,
    ) -> Result<Self> {
        if scale.is_zero() {
            return Err(Error::invalid("polynomial scale must be nonzero"));
        }
        let mut map = BTreeMap::new();
        for (exps, coeff) in terms {
            check_vertex(m, n, &exps)
                .map_err(|e| Error::invalid(format!("exponent vector {exps:?} rejected: {e}")))?;
            let ok = match (&coeff, alphabet) {
                (Scalar::Cyclotomic(c), Alphabet::Unity) => c.modulus() == m,
                (Scalar::Rational(_), Alphabet::Integer) => true,
                _ => false,
            };
            if !ok {
                return Err(Error::invalid(format!(
                    "coefficient {coeff} does not match the {alphabet} alphabet with m = {m}"
                )));
            }
            if !coeff.is_zero() && map.insert(ExpVector::new(exps.clone()), coeff).is_some() {
                return Err(Error::invalid(format!("duplicate monomial {exps:?}")));
            }
        }
        Ok(RepresentingPolynomial {
            m,
            n,
            alphabet,
            scale,
            terms: map,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn terms(&self) -> &BTreeMap<ExpVector, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Option<&Scalar> {
        self.terms.get(&ExpVector::new(exponents.to_vec()))
    }

    /// Largest total degree among nonzero terms; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(ExpVector::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Unity-alphabet polynomial viewed as a sparse polynomial with unbounded
    /// exponents, e.g. to multiply by a monomial.
    pub fn to_sparse(&self) -> Result<SparsePolynomial> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let c = c.as_cyclotomic().cloned().ok_or_else(|| {
                    Error::invalid("only unity-alphabet polynomials convert to sparse form")
                })?;
                Ok((e.exponents().iter().map(|&x| x as u64).collect(), c))
            })
            .collect::<Result<_>>()?;
        Ok(SparsePolynomial {
            m: self.m,
            n: self.n,
            scale: self.scale.clone(),
            terms,
        })
    }
}

/// A polynomial with cyclotomic coefficients and arbitrary nonnegative exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    pub m: u32,
    pub n: usize,
    pub scale: BigInt,
    pub terms: Vec<(Vec<u64>, CycInt)>,
}

impl SparsePolynomial {
    pub fn from_integer_terms(m: u32, n: usize, terms: &[(Vec<u64>, i64)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(e, c)| Ok((e.clone(), CycInt::from_counts(m, &[*c])?)))
            .collect::<Result<_>>()?;
        Ok(SparsePolynomial {
            m,
            n,
            scale: BigInt::one(),
            terms,
        })
    }

    /// Multiplies every term by `x^monomial`.
    pub fn times_monomial(&self, monomial: &[u64]) -> Result<Self> {
        if monomial.len() != self.n {
            return Err(Error::invalid("monomial arity mismatch"));
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                (
                    e.iter().zip(monomial).map(|(a, b)| a + b).collect(),
                    c.clone(),
                )
            })
            .collect();
        Ok(SparsePolynomial {
            terms,
            ..self.clone()
        })
    }
}

/// Reduces modulo `<x_i^m - 1>`: every exponent is taken modulo `m` and like
/// terms are combined. The result represents the same function on the `m`-th
/// roots of unity.
pub fn reduce_exponents(p: &SparsePolynomial) -> Result<RepresentingPolynomial> {
    let m = p.m;
    let mut acc: BTreeMap<Vec<u32>, CycInt> = BTreeMap::new();
    for (exps, coeff) in &p.terms {
        if exps.len() != p.n {
            return Err(Error::invalid(format!(
                "term {exps:?} has {} exponents, expected {}",
                exps.len(),
                p.n
            )));
        }
        if coeff.modulus() != m {
            return Err(Error::invalid("coefficient modulus mismatch"));
        }
        let reduced: Vec<u32> = exps.iter().map(|&e| (e % m as u64) as u32).collect();
        match acc.get_mut(&reduced) {
            Some(c) => *c = c.try_add(coeff)?,
            None => {
                acc.insert(reduced, coeff.clone());
            }
        }
    }
    RepresentingPolynomial::from_terms(
        m,
        p.n,
        Alphabet::Unity,
        p.scale.clone(),
        acc.into_iter().map(|(e, c)| (e, Scalar::Cyclotomic(c))),
    )
}

/// The unique interpolant of `f` with per-variable degree at most `m - 1`.
pub fn interpolate(f: &MAryFunction, limits: &Limits) -> Result<RepresentingPolynomial> {
    let space = f.space(limits)?;
    let table = f.dense_table(limits)?;
    match f.alphabet() {
        Alphabet::Unity => interpolate_unity(&space, &table),
        Alphabet::Integer => interpolate_integer(&space, &table),
    }
}

/// Character sums `sum_x e^(f(x) - <a,x>)` for every `a`, as elements of the
/// group ring `Z[Z_m]` (length-`m` count vectors), one coordinate at a time.
pub(crate) fn character_sums(space: &HammingSpace, table: &[u32]) -> Vec<i64> {
    let m = space.m() as usize;
    let size = space.size();
    let mut data = vec![0i64; size * m];
    for (idx, &label) in table.iter().enumerate() {
        data[idx * m + label as usize] = 1;
    }
    let mut gathered = vec![0i64; m * m];
    for coord in 0..space.n() {
        let stride = space.stride(coord);
        for base in (0..size).filter(|&i| space.digit(i, coord) == 0) {
            for x in 0..m {
                let at = (base + x * stride) * m;
                gathered[x * m..(x + 1) * m].copy_from_slice(&data[at..at + m]);
            }
            for a in 0..m {
                let at = (base + a * stride) * m;
                let out = &mut data[at..at + m];
                out.fill(0);
                // multiplying by e^(-a x) moves exponent r + a x down to r
                for x in 0..m {
                    let shift = a * x % m;
                    let v = &gathered[x * m..(x + 1) * m];
                    for (r, slot) in out.iter_mut().enumerate() {
                        *slot += v[(r + shift) % m];
                    }
                }
            }
        }
    }
    data
}

fn interpolate_unity(space: &HammingSpace, table: &[u32]) -> Result<RepresentingPolynomial> {
    let m = space.m();
    let mm = m as usize;
    let sums = character_sums(space, table);
    let mut terms = Vec::new();
    for a in 0..space.size() {
        let c = CycInt::from_counts(m, &sums[a * mm..(a + 1) * mm])?;
        if !c.is_zero() {
            terms.push((space.decode(a), Scalar::Cyclotomic(c)));
        }
    }
    RepresentingPolynomial::from_terms(
        m,
        space.n(),
        Alphabet::Unity,
        BigInt::from(m).pow(space.n()),
        terms,
    )
}

/// `basis[t][e]` is the coefficient of `x^e` in the Lagrange basis polynomial
/// that is 1 at node `t` and 0 at the other nodes of `0..m`.
fn lagrange_basis(m: u32) -> Vec<Vec<BigRational>> {
    (0..m as i64)
        .map(|t| {
            let mut poly = vec![BigRational::one()];
            let mut denom = BigInt::one();
            for s in (0..m as i64).filter(|&s| s != t) {
                // multiply by (x - s)
                let mut next = vec![BigRational::zero(); poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * BigRational::from_integer(BigInt::from(s));
                }
                poly = next;
                denom *= t - s;
            }
            let denom = BigRational::from_integer(denom);
            poly.into_iter().map(|c| c / &denom).collect()
        })
        .collect()
}

fn interpolate_integer(space: &HammingSpace, table: &[u32]) -> Result<RepresentingPolynomial> {
    let m = space.m() as usize;
    let basis = lagrange_basis(space.m());
    let mut data: Vec<BigRational> = table
        .iter()
        .map(|&v| BigRational::from_integer(BigInt::from(v)))
        .collect();
    let mut gathered = vec![BigRational::zero(); m];
    for coord in 0..space.n() {
        let stride = space.stride(coord);
        for base in (0..space.size()).filter(|&i| space.digit(i, coord) == 0) {
            for t in 0..m {
                gathered[t] = std::mem::take(&mut data[base + t * stride]);
            }
            for e in 0..m {
                let mut acc = BigRational::zero();
                for t in 0..m {
                    if !gathered[t].is_zero() && !basis[t][e].is_zero() {
                        acc += &gathered[t] * &basis[t][e];
                    }
                }
                data[base + e * stride] = acc;
            }
        }
    }
    let terms = data
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(a, c)| (space.decode(a), Scalar::Rational(c)))
        .collect::<Vec<_>>();
    RepresentingPolynomial::from_terms(
        space.m(),
        space.n(),
        Alphabet::Integer,
        BigInt::one(),
        terms,
    )
}

/// Degree of `f`: the degree of its unique interpolant.
pub fn degree(f: &MAryFunction, limits: &Limits) -> Result<usize> {
    Ok(interpolate(f, limits)?.degree())
}

/// Evaluates `p` at the point of `T^n` with the given labels. Unity-alphabet
/// values carry the polynomial's scale.
pub fn evaluate(p: &RepresentingPolynomial, x: &[u32]) -> Result<Scalar> {
    check_vertex(p.m, p.n, x)?;
    match p.alphabet {
        Alphabet::Unity => {
            let mut acc = CycInt::zero(p.m)?;
            for (exps, coeff) in &p.terms {
                let power: u64 = exps
                    .exponents()
                    .iter()
                    .zip(x)
                    .map(|(&a, &xi)| a as u64 * xi as u64)
                    .sum();
                let c = coeff
                    .as_cyclotomic()
                    .expect("unity coefficients are cyclotomic");
                acc = acc.try_add(&c.mul_epsilon_pow((power % p.m as u64) as i64))?;
            }
            Ok(Scalar::Cyclotomic(acc))
        }
        Alphabet::Integer => {
            let mut acc = BigRational::zero();
            for (exps, coeff) in &p.terms {
                let mut mono = BigInt::one();
                for (&a, &xi) in exps.exponents().iter().zip(x) {
                    mono *= BigInt::from(xi).pow(a);
                }
                let c = coeff
                    .as_rational()
                    .expect("integer coefficients are rational");
                acc += c * BigRational::from_integer(mono);
            }
            Ok(Scalar::Rational(acc))
        }
    }
}

/// `m^n * E(f)`, the sum of `e^f(x)` over all inputs, computed by counting labels.
pub fn average(f: &MAryFunction, limits: &Limits) -> Result<CycInt> {
    if f.alphabet() != Alphabet::Unity {
        return Err(Error::invalid(
            "the average is defined here for the unity alphabet",
        ));
    }
    let table = f.dense_table(limits)?;
    let mut counts = vec![0i64; f.m() as usize];
    for &v in table.iter() {
        counts[v as usize] += 1;
    }
    CycInt::from_counts(f.m(), &counts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopCoefficientCheck {
    /// Coefficient of `(x_1...x_n)^(m-1)` in the interpolant of the
    /// `(m-1)`-shift of `f` equals the constant term of the interpolant of `f`.
    pub identity_holds: bool,
    pub average_nonzero: bool,
    pub shifted_full_degree: bool,
    /// `deg(f shifted by m-1) = (m-1) n` iff `E(f) != 0`.
    pub equivalence_holds: bool,
}

impl TopCoefficientCheck {
    pub fn holds(&self) -> bool {
        self.identity_holds && self.equivalence_holds
    }
}

pub fn top_coefficient_identity(f: &MAryFunction, limits: &Limits) -> Result<TopCoefficientCheck> {
    if f.alphabet() != Alphabet::Unity {
        return Err(Error::invalid(
            "the top-coefficient identity needs the unity alphabet",
        ));
    }
    let m = f.m();
    let n = f.n();
    let p = interpolate(f, limits)?;
    let shifted = interpolate(&shift_function(f, m - 1), limits)?;
    let zero = Scalar::Cyclotomic(CycInt::zero(m)?);
    let constant = p.coefficient(&vec![0; n]).unwrap_or(&zero);
    let top = shifted.coefficient(&vec![m - 1; n]).unwrap_or(&zero);
    let average_nonzero = !average(f, limits)?.is_zero();
    let shifted_full_degree = shifted.degree() == (m as usize - 1) * n;
    Ok(TopCoefficientCheck {
        identity_holds: constant == top,
        average_nonzero,
        shifted_full_degree,
        equivalence_holds: average_nonzero == shifted_full_degree,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub m: u32,
    pub n: usize,
    pub sensitivity: usize,
    pub block_sensitivity: usize,
    pub degree: usize,
    /// `s/(m-1) <= bs <= n`.
    pub chain_holds: bool,
    /// `s <= 2 (m-1)^3 deg^2`.
    pub sensitivity_bound_holds: bool,
    /// `(m-1) deg >= sqrt(bs / 2)`, checked as `2 (m-1)^2 deg^2 >= bs`.
    pub degree_bound_holds: bool,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.chain_holds && self.sensitivity_bound_holds && self.degree_bound_holds
    }
}

pub fn bounds_report(f: &MAryFunction, limits: &Limits) -> Result<BoundsReport> {
    let s = sensitivity(f, limits)?;
    let bs = block_sensitivity(f, limits)?;
    let deg = degree(f, limits)?;
    Ok(check_bounds(f.m(), f.n(), s, bs, deg))
}

pub(crate) fn check_bounds(m: u32, n: usize, s: usize, bs: usize, deg: usize) -> BoundsReport {
    let k = m as u128 - 1;
    let (s128, bs128, d128) = (s as u128, bs as u128, deg as u128);
    BoundsReport {
        m,
        n,
        sensitivity: s,
        block_sensitivity: bs,
        degree: deg,
        chain_holds: s128 <= k * bs128 && bs <= n,
        sensitivity_bound_holds: s128 <= 2 * k * k * k * d128 * d128,
        degree_bound_holds: 2 * k * k * d128 * d128 >= bs128,
    }
}
