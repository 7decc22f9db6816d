//! Partitions of `H(n, m)` into `m` (possibly empty) induced subgraphs, the
//! rotation map, imbalance certificates and the exhaustive checks that tie
//! sensitivity at full degree to minimum class degrees.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact_arith::CycInt;
use crate::functions::{block_sensitivity, sensitivity, Alphabet, MAryFunction};
use crate::hamming::HammingSpace;
use crate::limits::Limits;
use crate::representation::{average, check_bounds, interpolate, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartition {
    space: HammingSpace,
    classes: Vec<u32>,
}

impl VertexPartition {
    pub fn new(m: u32, n: usize, classes: Vec<u32>) -> Result<Self> {
        let space = HammingSpace::for_table(m, n, classes.len())?;
        if let Some((i, &k)) = classes.iter().enumerate().find(|(_, &k)| k >= m) {
            return Err(Error::invalid(format!(
                "class {k} at index {i} outside [0, {}]",
                m - 1
            )));
        }
        Ok(VertexPartition { space, classes })
    }

    /// Every vertex in class `k`.
    pub fn single_class(m: u32, n: usize, k: u32, limits: &Limits) -> Result<Self> {
        let size = limits.check_dense(m, n)?;
        Self::new(m, n, vec![k; size])
    }

    /// Class `k` is the preimage of label `k`.
    pub fn from_function(f: &MAryFunction, limits: &Limits) -> Result<Self> {
        Self::new(f.m(), f.n(), f.dense_table(limits)?.into_owned())
    }

    pub fn to_function(&self, alphabet: Alphabet) -> MAryFunction {
        MAryFunction::from_table(self.m(), self.n(), alphabet, self.classes.clone())
            .expect("partition tables are valid function tables")
    }

    pub fn m(&self) -> u32 {
        self.space.m()
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn space(&self) -> &HammingSpace {
        &self.space
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn into_classes(self) -> Vec<u32> {
        self.classes
    }

    pub fn class_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.m() as usize];
        for &k in &self.classes {
            sizes[k as usize] += 1;
        }
        sizes
    }

    /// The rotation: a vertex of colour `j` moves from class `k` to `k + j`.
    pub fn rotate(&self) -> VertexPartition {
        self.rotate_times(1)
    }

    pub fn rotate_times(&self, times: u32) -> VertexPartition {
        let m = self.m() as u64;
        let classes = self
            .classes
            .par_iter()
            .enumerate()
            .map(|(idx, &k)| {
                ((k as u64 + times as u64 % m * self.space.color(idx) as u64) % m) as u32
            })
            .collect();
        VertexPartition {
            space: self.space.clone(),
            classes,
        }
    }

    /// Number of neighbours of each vertex inside its own class.
    pub fn vertex_degrees(&self) -> Vec<u32> {
        (0..self.classes.len())
            .into_par_iter()
            .map(|idx| self.same_class_degree(idx))
            .collect()
    }

    #[inline]
    pub(crate) fn same_class_degree(&self, idx: usize) -> u32 {
        let k = self.classes[idx];
        let mut d = 0;
        self.space
            .for_each_neighbor(idx, |v| d += (self.classes[v] == k) as u32);
        d
    }
}

/// A degree extended with the conventions for the graph without vertices:
/// its minimum degree is `+inf` and its maximum degree is `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtDegree {
    NegInf,
    Finite(usize),
    PosInf,
}

impl ExtDegree {
    pub fn finite(self) -> Option<usize> {
        match self {
            ExtDegree::Finite(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for ExtDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtDegree::NegInf => f.write_str("-inf"),
            ExtDegree::Finite(d) => write!(f, "{d}"),
            ExtDegree::PosInf => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassStats {
    pub size: u64,
    pub min_degree: ExtDegree,
    pub max_degree: ExtDegree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeStats {
    pub m: u32,
    pub n: usize,
    pub classes: Vec<ClassStats>,
}

impl DegreeStats {
    pub fn min_degree(&self) -> ExtDegree {
        self.classes
            .iter()
            .map(|c| c.min_degree)
            .min()
            .unwrap_or(ExtDegree::PosInf)
    }

    pub fn max_degree(&self) -> ExtDegree {
        self.classes
            .iter()
            .map(|c| c.max_degree)
            .max()
            .unwrap_or(ExtDegree::NegInf)
    }

    /// `(m-1) n - min_k delta(H_k)`, the sensitivity of the associated function.
    pub fn sensitivity_value(&self) -> usize {
        let top = (self.m as usize - 1) * self.n;
        // some class is nonempty, so the minimum is finite
        top - self.min_degree().finite().unwrap_or(top)
    }
}

pub fn degree_stats(p: &VertexPartition) -> DegreeStats {
    let mut classes = vec![
        ClassStats {
            size: 0,
            min_degree: ExtDegree::PosInf,
            max_degree: ExtDegree::NegInf,
        };
        p.m() as usize
    ];
    for (&k, d) in p.classes.iter().zip(p.vertex_degrees()) {
        let c = &mut classes[k as usize];
        let d = ExtDegree::Finite(d as usize);
        c.size += 1;
        c.min_degree = c.min_degree.min(d);
        c.max_degree = c.max_degree.max(d);
    }
    DegreeStats {
        m: p.m(),
        n: p.n(),
        classes,
    }
}

/// `sum_k |V_k| e^k` for the partition or for its rotation.
pub fn imbalance(p: &VertexPartition, rotated: bool) -> CycInt {
    let sizes = if rotated {
        p.rotate().class_sizes()
    } else {
        p.class_sizes()
    };
    let counts: Vec<i64> = sizes.iter().map(|&s| s as i64).collect();
    CycInt::from_counts(p.m(), &counts).expect("partition modulus is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualityCheck {
    /// `(m-1) n - min_k delta(H_k)`.
    pub lhs: usize,
    /// `max_k Delta(rho(H)_k)`.
    pub rhs: usize,
    pub inequality_holds: bool,
    /// For `m = 2` the two sides must agree.
    pub equality_holds: Option<bool>,
}

impl DualityCheck {
    pub fn holds(&self) -> bool {
        self.inequality_holds && self.equality_holds.unwrap_or(true)
    }
}

pub fn rotation_duality_check(p: &VertexPartition) -> DualityCheck {
    let lhs = degree_stats(p).sensitivity_value();
    let rhs = degree_stats(&p.rotate()).max_degree().finite().unwrap_or(0);
    DualityCheck {
        lhs,
        rhs,
        inequality_holds: lhs >= rhs,
        equality_holds: (p.m() == 2).then_some(lhs == rhs),
    }
}

/// Outcome of checking every function on `[0, m-1]^n` (unity alphabet).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub m: u32,
    pub n: usize,
    pub functions: u64,
    /// Least sensitivity among functions of full degree `(m-1) n`.
    pub min_sensitivity_full_degree: Option<usize>,
    /// Least `(m-1) n - min delta` among partitions with nonzero rotated imbalance.
    pub min_gap_rotated_imbalance: Option<usize>,
    /// Functions failing `s/(m-1) <= bs <= n`.
    pub chain_failures: u64,
    /// Functions failing `s <= 2 (m-1)^3 deg^2`.
    pub sensitivity_bound_failures: u64,
    /// Functions failing `2 (m-1)^2 deg^2 >= bs`.
    pub degree_bound_failures: u64,
    /// Functions whose constant coefficient differs from the average.
    pub average_failures: u64,
    /// Functions whose top coefficient differs from the average of the shift.
    pub top_coefficient_failures: u64,
    /// Functions where full degree and nonzero rotated imbalance disagree.
    pub biconditional_failures: u64,
    /// Functions where `s(f) != (m-1) n - min delta` for the induced partition.
    pub formula_failures: u64,
}

impl EquivalenceReport {
    pub fn minima_agree(&self) -> bool {
        self.min_sensitivity_full_degree == self.min_gap_rotated_imbalance
    }

    pub fn failures(&self) -> u64 {
        self.chain_failures
            + self.sensitivity_bound_failures
            + self.degree_bound_failures
            + self.average_failures
            + self.top_coefficient_failures
            + self.biconditional_failures
            + self.formula_failures
    }

    pub fn all_hold(&self) -> bool {
        self.minima_agree() && self.failures() == 0
    }

    fn merge(mut self, other: Self) -> Self {
        let min_opt = |a: Option<usize>, b: Option<usize>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        self.functions += other.functions;
        self.min_sensitivity_full_degree = min_opt(
            self.min_sensitivity_full_degree,
            other.min_sensitivity_full_degree,
        );
        self.min_gap_rotated_imbalance = min_opt(
            self.min_gap_rotated_imbalance,
            other.min_gap_rotated_imbalance,
        );
        self.chain_failures += other.chain_failures;
        self.sensitivity_bound_failures += other.sensitivity_bound_failures;
        self.degree_bound_failures += other.degree_bound_failures;
        self.average_failures += other.average_failures;
        self.top_coefficient_failures += other.top_coefficient_failures;
        self.biconditional_failures += other.biconditional_failures;
        self.formula_failures += other.formula_failures;
        self
    }
}

/// Table of the `code`-th function in odometer order (entry 0 least significant).
pub(crate) fn table_from_code(m: u32, size: usize, mut code: u64) -> Vec<u32> {
    (0..size)
        .map(|_| {
            let d = (code % m as u64) as u32;
            code /= m as u64;
            d
        })
        .collect()
}

/// Enumerates every function `[0, m-1]^n -> U_m` and checks the degree,
/// sensitivity and partition statements against each other.
pub fn equivalence_exhaustive(m: u32, n: usize, limits: &Limits) -> Result<EquivalenceReport> {
    let count = limits.check_enumeration(m, n)?;
    let size = limits.check_dense(m, n)?;
    let empty = EquivalenceReport {
        m,
        n,
        functions: 0,
        min_sensitivity_full_degree: None,
        min_gap_rotated_imbalance: None,
        chain_failures: 0,
        sensitivity_bound_failures: 0,
        degree_bound_failures: 0,
        average_failures: 0,
        top_coefficient_failures: 0,
        biconditional_failures: 0,
        formula_failures: 0,
    };
    (0..count)
        .into_par_iter()
        .map(|code| check_one(m, n, size, code, limits, &empty))
        .try_reduce(|| empty.clone(), |a, b| Ok(a.merge(b)))
}

fn check_one(
    m: u32,
    n: usize,
    size: usize,
    code: u64,
    limits: &Limits,
    empty: &EquivalenceReport,
) -> Result<EquivalenceReport> {
    let full = (m as usize - 1) * n;
    let f = MAryFunction::from_table(m, n, Alphabet::Unity, table_from_code(m, size, code))?;
    let poly = interpolate(&f, limits)?;
    let deg = poly.degree();
    let s = sensitivity(&f, limits)?;
    let bs = block_sensitivity(&f, limits)?;
    let bounds = check_bounds(m, n, s, bs, deg);

    let zero = Scalar::Cyclotomic(CycInt::zero(m)?);
    let avg = Scalar::Cyclotomic(average(&f, limits)?);
    let constant = poly.coefficient(&vec![0; n]).unwrap_or(&zero);
    let top = poly.coefficient(&vec![m - 1; n]).unwrap_or(&zero);

    let partition = VertexPartition::from_function(&f, limits)?;
    let stats = degree_stats(&partition);
    let rotated = imbalance(&partition, true);
    // the rotation of the partition of f is the partition of the shift of f by 1
    let shifted_avg = Scalar::Cyclotomic(rotated.clone());

    let mut r = empty.clone();
    r.functions = 1;
    if deg == full {
        r.min_sensitivity_full_degree = Some(s);
    }
    if !rotated.is_zero() {
        r.min_gap_rotated_imbalance = Some(stats.sensitivity_value());
    }
    r.chain_failures = !bounds.chain_holds as u64;
    r.sensitivity_bound_failures = !bounds.sensitivity_bound_holds as u64;
    r.degree_bound_failures = !bounds.degree_bound_holds as u64;
    r.average_failures = (constant != &avg) as u64;
    r.top_coefficient_failures = (top != &shifted_avg) as u64;
    r.biconditional_failures = ((deg == full) == rotated.is_zero()) as u64;
    r.formula_failures = (s != stats.sensitivity_value()) as u64;
    Ok(r)
}
