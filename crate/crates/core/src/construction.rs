//! The filter construction over a block partition of the coordinates, its
//! minimum-degree formula, residue counting and the prime-order certificate,
//! and the oracle-backed separation function built from it.
//!
//! A vertex `x` is identified with the multiset where coordinate `a` has
//! multiplicity `x_a`. With blocks `A_1..A_k`, `F_i` is the upward closure of
//! the multisets `A_j^(i)`; so `x` lies in `F_i` exactly when some block has all
//! coordinates `>= i`, and the class of `x` is its level: the largest block
//! minimum.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::CycInt;
use crate::functions::{local_sensitivity, Alphabet, MAryFunction};
use crate::hamming::check_vertex;
use crate::limits::Limits;
use crate::partitions::VertexPartition;

/// A partition of the coordinates `0..n` into nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("a block partition needs at least one block"));
        }
        let mut seen = vec![false; n];
        for (j, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid(format!("block {j} is empty")));
            }
            for &a in block {
                if a >= n {
                    return Err(Error::invalid(format!(
                        "coordinate {a} in block {j} is >= n = {n}"
                    )));
                }
                if std::mem::replace(&mut seen[a], true) {
                    return Err(Error::invalid(format!("coordinate {a} appears twice")));
                }
            }
        }
        if let Some(a) = seen.iter().position(|&s| !s) {
            return Err(Error::invalid(format!("coordinate {a} is in no block")));
        }
        Ok(BlockPartition { n, blocks })
    }

    /// Blocks of the given sizes on consecutive coordinate ranges.
    pub fn consecutive(sizes: &[usize]) -> Result<Self> {
        let mut start = 0;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let b: Vec<usize> = (start..start + s).collect();
                start += s;
                b
            })
            .collect();
        Self::new(start, blocks)
    }

    /// `N` consecutive blocks of size `N`.
    pub fn square(big_n: usize) -> Result<Self> {
        Self::consecutive(&vec![big_n; big_n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn max_block(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Largest block minimum: the construction class of `x`.
pub fn level(x: &[u32], bp: &BlockPartition) -> u32 {
    bp.blocks
        .iter()
        .map(|b| b.iter().map(|&a| x[a]).min().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

fn multiset_included(small: &BTreeMap<usize, u32>, big: &BTreeMap<usize, u32>) -> bool {
    small
        .iter()
        .all(|(e, &mult)| big.get(e).copied().unwrap_or(0) >= mult)
}

/// Membership of `x` in `F_i`, tested literally: is some generator `A_j^(i)`
/// included multiplicity-wise in the multiset of `x`? `F_0` is everything.
pub fn in_filter(x: &[u32], bp: &BlockPartition, i: u32) -> bool {
    let multiset: BTreeMap<usize, u32> = x
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0)
        .map(|(a, &v)| (a, v))
        .collect();
    bp.blocks.iter().any(|b| {
        let generator: BTreeMap<usize, u32> =
            b.iter().map(|&a| (a, i)).filter(|&(_, v)| v > 0).collect();
        multiset_included(&generator, &multiset)
    })
}

/// Class of `x` from the filter definition: `G_{m-1} = F_{m-1}`,
/// `G_i = F_i \ F_{i+1}`, `G_0` the complement of `F_1`.
pub fn filter_class(x: &[u32], bp: &BlockPartition, m: u32) -> u32 {
    (1..m).rev().find(|&i| in_filter(x, bp, i)).unwrap_or(0)
}

/// Dense partition of `H(n, m)` by level.
pub fn construction_partition(
    bp: &BlockPartition,
    m: u32,
    limits: &Limits,
) -> Result<VertexPartition> {
    let f = MAryFunction::from_fn(m, bp.n(), Alphabet::Unity, limits, |x| level(x, bp))?;
    VertexPartition::from_function(&f, limits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinDegreeFormula {
    /// `delta(G_i) = (m-1)(n-k) + i (k - max |A_j|)`.
    pub per_class: Vec<i64>,
    /// `(m-1) n - min_i delta(G_i)`.
    pub sensitivity_value: i64,
    /// `(m-1) max(k, |A_1|, ..., |A_k|)`.
    pub headline: i64,
}

pub fn min_degree_formula(bp: &BlockPartition, m: u32) -> MinDegreeFormula {
    let (m1, n, k) = (m as i64 - 1, bp.n() as i64, bp.k() as i64);
    let max_a = bp.max_block() as i64;
    let per_class: Vec<i64> = (0..m as i64)
        .map(|i| m1 * (n - k) + i * (k - max_a))
        .collect();
    let min = per_class.iter().copied().min().unwrap_or(0);
    MinDegreeFormula {
        sensitivity_value: m1 * n - min,
        headline: m1 * k.max(max_a),
        per_class,
    }
}

/// Counts of a finite set of vectors by coordinate-sum residue modulo `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueProfile {
    pub m: u32,
    pub counts: Vec<BigUint>,
}

impl ResidueProfile {
    /// The profile of the empty vector: one object with residue 0.
    pub fn unit(m: u32) -> Self {
        let mut counts = vec![BigUint::zero(); m as usize];
        counts[0] = BigUint::one();
        ResidueProfile { m, counts }
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Profile of the Cartesian product (cyclic convolution).
    pub fn convolve(&self, other: &ResidueProfile) -> ResidueProfile {
        let m = self.m as usize;
        let mut counts = vec![BigUint::zero(); m];
        for (a, ca) in self.counts.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, cb) in other
                .counts
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
            {
                counts[(a + b) % m] += ca * cb;
            }
        }
        ResidueProfile { m: self.m, counts }
    }

    pub fn pow(&self, exp: usize) -> ResidueProfile {
        let mut acc = ResidueProfile::unit(self.m);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.convolve(&base);
            }
            base = base.convolve(&base);
            e >>= 1;
        }
        acc
    }

    /// Entrywise difference; the caller guarantees `other <= self`.
    fn minus(&self, other: &ResidueProfile) -> ResidueProfile {
        ResidueProfile {
            m: self.m,
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn get(&self, s: i64) -> &BigUint {
        &self.counts[s.rem_euclid(self.m as i64) as usize]
    }
}

fn box_profile(m: u32, lo: u32, hi: u32, len: usize) -> ResidueProfile {
    if lo > hi {
        let mut p = ResidueProfile::unit(m);
        if len > 0 {
            p.counts[0] = BigUint::zero();
        }
        return p;
    }
    let mut single = vec![BigUint::zero(); m as usize];
    for v in lo..=hi {
        single[(v % m) as usize] += 1u32;
    }
    ResidueProfile { m, counts: single }.pow(len)
}

/// Residue profile of the box `[lo, hi]^len`.
pub fn residue_profile(m: u32, lo: u32, hi: u32, len: usize) -> Result<ResidueProfile> {
    if m < 2 {
        return Err(Error::invalid(format!("modulus must be >= 2, got {m}")));
    }
    if lo > hi || hi >= m {
        return Err(Error::invalid(format!(
            "box bounds need 0 <= lo <= hi <= m-1, got lo={lo} hi={hi} m={m}"
        )));
    }
    Ok(box_profile(m, lo, hi, len))
}

/// Closed form for the number of vectors in `[0, m-2]^l` with coordinate sum
/// congruent to `s` modulo `m`.
pub fn h_closed_form(m: u32, l: usize, s: i64) -> Result<BigUint> {
    if m < 2 || l < 1 {
        return Err(Error::invalid(format!(
            "need m >= 2 and l >= 1, got m={m} l={l}"
        )));
    }
    let base = BigUint::from(m - 1);
    let hit = (s + l as i64).rem_euclid(m as i64) == 0;
    let geometric = |first: u32, terms: usize| -> BigUint {
        (0..terms).map(|i| base.pow(first + 2 * i as u32)).sum()
    };
    let mm2 = BigUint::from(m - 2);
    Ok(if l.is_multiple_of(2) {
        let v = geometric(0, l / 2) * mm2;
        if hit {
            v + 1u32
        } else {
            v
        }
    } else {
        let v = geometric(1, (l - 1) / 2) * mm2;
        if hit {
            v
        } else {
            v + 1u32
        }
    })
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(())
}

fn mod_pow(mut b: u128, mut e: u128, p: u128) -> u128 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// `C(a, b) mod p` for digits `a, b < p`.
fn small_binomial_mod(a: u64, b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let p128 = p as u128;
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..b as u128 {
        num = num * ((a as u128 - i) % p128) % p128;
        den = den * ((i + 1) % p128) % p128;
    }
    (num * mod_pow(den, p128 - 2, p128) % p128) as u64
}

/// `C(M, N) mod p` as the product of binomials of the base-`p` digits.
pub fn lucas_binomial(big_m: u64, big_n: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    let (mut a, mut b, mut acc) = (big_m, big_n, 1u64);
    while b > 0 || a > 0 {
        let term = small_binomial_mod(a % p, b % p, p);
        acc = (acc as u128 * term as u128 % p as u128) as u64;
        if acc == 0 {
            break;
        }
        a /= p;
        b /= p;
    }
    Ok(acc)
}

/// Multinomial `(sum parts)! / prod(part!)` modulo `p`, as a product of binomials.
pub fn lucas_multinomial(parts: &[u64], p: u64) -> Result<u64> {
    check_prime(p)?;
    let mut total = 0u64;
    let mut acc = 1u64;
    for &part in parts {
        total += part;
        acc = (acc as u128 * lucas_binomial(total, part, p)? as u128 % p as u128) as u64;
    }
    Ok(acc)
}

/// Number of `x` in `[0, t]^N \ [1, t]^N` with coordinate sum `= s (mod p)`.
/// Fails with `InvariantViolated` if the count is not a multiple of `p`.
pub fn delta_count(p: u32, t: u32, big_n: usize, s: i64) -> Result<BigUint> {
    check_prime(p as u64)?;
    if p < 3 {
        return Err(Error::invalid("delta counts need an odd prime"));
    }
    if t < 1 || t > p - 2 {
        return Err(Error::invalid(format!(
            "t must lie in [1, {}], got {t}",
            p - 2
        )));
    }
    if !big_n.is_multiple_of(p as usize * (p as usize - 1)) {
        return Err(Error::invalid(format!(
            "N = {big_n} is not a multiple of p(p-1) = {}",
            p * (p - 1)
        )));
    }
    let all = box_profile(p, 0, t, big_n);
    let positive = box_profile(p, 1, t, big_n);
    let delta = all.get(s) - positive.get(s);
    if !(&delta % p).is_zero() {
        return Err(Error::InvariantViolated(format!(
            "delta count {delta} for p={p} t={t} N={big_n} s={s} is not a multiple of {p}"
        )));
    }
    Ok(delta)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofItems {
    /// `|rho(V_{p-1}) n V_{p-1}| - |rho(V_1) n V_{p-1}|`, expected to be +-1.
    pub top_difference: BigInt,
    /// `|rho(V_{p-1}) n V_0| - |rho(V_1) n V_0|`, expected to be 0.
    pub bottom_difference: BigInt,
    /// Every `|D_s n V_j|` for `1 <= j <= p-2` is a multiple of `p`.
    pub middle_divisible: bool,
    /// `|rho(V_{p-1})| != |rho(V_1)|`.
    pub rotated_sizes_differ: bool,
}

impl ProofItems {
    pub fn top_holds(&self) -> bool {
        self.top_difference.magnitude().is_one()
    }

    pub fn bottom_holds(&self) -> bool {
        self.bottom_difference.is_zero()
    }

    pub fn all_hold(&self) -> bool {
        self.top_holds()
            && self.bottom_holds()
            && self.middle_divisible
            && self.rotated_sizes_differ
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionReport {
    pub m: u32,
    pub n: usize,
    pub block_sizes: Vec<usize>,
    pub formula: MinDegreeFormula,
    /// `counts[s][j] = |D_s n V(G_j)|`.
    pub counts: Vec<Vec<BigUint>>,
    pub class_sizes: Vec<BigUint>,
    pub rotated_sizes: Vec<BigUint>,
    /// `sum_k |rho(V(G_k))| e^k`.
    pub imbalance: CycInt,
    /// Present for `m >= 3`; a certificate only when `m` is prime.
    pub items: Option<ProofItems>,
    pub m_is_prime: bool,
}

impl ConstructionReport {
    /// `(m-1) n` when the rotated imbalance is nonzero.
    pub fn certified_degree(&self) -> Option<usize> {
        (!self.imbalance.is_zero()).then_some((self.m as usize - 1) * self.n)
    }
}

/// Counts the construction classes by colour without enumerating vertices.
pub fn class_residue_counts(bp: &BlockPartition, m: u32) -> Result<ConstructionReport> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "alphabet size must be >= 2, got {m}"
        )));
    }
    let mm = m as usize;
    let full = box_profile(m, 0, m - 1, bp.n());
    // at_most[i][s]: vertices whose every block minimum is <= i
    let mut at_most: Vec<ResidueProfile> = Vec::with_capacity(mm);
    for i in 0..m {
        if i == m - 1 {
            at_most.push(full.clone());
            continue;
        }
        let mut acc = ResidueProfile::unit(m);
        let mut cache: BTreeMap<usize, ResidueProfile> = BTreeMap::new();
        for size in bp.sizes() {
            let block = cache.entry(size).or_insert_with(|| {
                box_profile(m, 0, m - 1, size).minus(&box_profile(m, i + 1, m - 1, size))
            });
            acc = acc.convolve(block);
        }
        at_most.push(acc);
    }
    let counts: Vec<Vec<BigUint>> = (0..mm)
        .map(|s| {
            (0..mm)
                .map(|j| match j {
                    0 => at_most[0].counts[s].clone(),
                    _ => &at_most[j].counts[s] - &at_most[j - 1].counts[s],
                })
                .collect()
        })
        .collect();
    let class_sizes: Vec<BigUint> = (0..mm)
        .map(|j| (0..mm).map(|s| &counts[s][j]).sum())
        .collect();
    // rho(V_k) n V_t = D_{k-t} n V_t
    let rotated_sizes: Vec<BigUint> = (0..mm)
        .map(|k| (0..mm).map(|t| &counts[(k + mm - t) % mm][t]).sum())
        .collect();
    let raw: Vec<BigInt> = rotated_sizes
        .iter()
        .map(|c| BigInt::from(c.clone()))
        .collect();
    let imbalance = CycInt::from_raw(m, &raw)?;

    let items = (m >= 3).then(|| {
        let p = mm;
        let at = |s: usize, j: usize| BigInt::from(counts[s % p][j].clone());
        ProofItems {
            top_difference: at(0, p - 1) - at(2, p - 1),
            bottom_difference: at(p - 1, 0) - at(1, 0),
            middle_divisible: (1..p - 1).all(|j| (0..p).all(|s| (&counts[s][j] % m).is_zero())),
            rotated_sizes_differ: rotated_sizes[p - 1] != rotated_sizes[1],
        }
    });

    Ok(ConstructionReport {
        m,
        n: bp.n(),
        block_sizes: bp.sizes(),
        formula: min_degree_formula(bp, m),
        counts,
        class_sizes,
        rotated_sizes,
        imbalance,
        items,
        m_is_prime: is_prime(m as u64),
    })
}

/// The level function on `N^2` coordinates with `N` blocks of size `N`,
/// together with the evidence for its degree and sensitivity.
#[derive(Clone)]
pub struct SeparationWitness {
    pub function: MAryFunction,
    pub blocks: BlockPartition,
    pub report: ConstructionReport,
    /// `(p-1) n`, valid because the rotated imbalance is nonzero.
    pub degree: usize,
    /// `(p-1) n - min delta = (p-1) N`.
    pub sensitivity: usize,
    /// First block at `p-1`, everything else 0.
    pub witness: Vec<u32>,
    pub witness_local_sensitivity: usize,
}

impl std::fmt::Debug for SeparationWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeparationWitness")
            .field("n", &self.blocks.n())
            .field("degree", &self.degree)
            .field("sensitivity", &self.sensitivity)
            .field("witness_local_sensitivity", &self.witness_local_sensitivity)
            .finish()
    }
}

pub fn separation_function(p: u32, big_n: usize) -> Result<SeparationWitness> {
    check_prime(p as u64)?;
    if p < 3 {
        return Err(Error::invalid("the separation function needs an odd prime"));
    }
    if big_n == 0 || !big_n.is_multiple_of(p as usize * (p as usize - 1)) {
        return Err(Error::invalid(format!(
            "N = {big_n} must be a positive multiple of p(p-1) = {}",
            p * (p - 1)
        )));
    }
    let blocks = BlockPartition::square(big_n)?;
    let n = blocks.n();
    let report = class_residue_counts(&blocks, p)?;
    let degree = report.certified_degree().ok_or_else(|| {
        Error::InvariantViolated(format!("rotated imbalance vanished for p={p} N={big_n}"))
    })?;
    if !report.items.as_ref().is_some_and(ProofItems::all_hold) {
        return Err(Error::InvariantViolated(format!(
            "residue certificate failed for p={p} N={big_n}: {:?}",
            report.items
        )));
    }
    let sensitivity = report
        .formula
        .sensitivity_value
        .to_usize()
        .expect("sensitivity value is nonnegative");
    let oracle_blocks = blocks.clone();
    let function = MAryFunction::from_oracle(
        p,
        n,
        Alphabet::Unity,
        Arc::new(move |x: &[u32]| level(x, &oracle_blocks)),
    )?;
    let mut witness = vec![0u32; n];
    for &a in &blocks.blocks()[0] {
        witness[a] = p - 1;
    }
    check_vertex(p, n, &witness)?;
    let witness_local_sensitivity = local_sensitivity(&function, &witness)?;
    Ok(SeparationWitness {
        function,
        blocks,
        report,
        degree,
        sensitivity,
        witness,
        witness_local_sensitivity,
    })
}
