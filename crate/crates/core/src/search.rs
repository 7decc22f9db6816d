//! Searching for partitions of `H(n, m)` into `m` induced subgraphs with small
//! maximum class degree, subject to an imbalance constraint.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::construction::is_prime;
use crate::error::{Error, Result};
use crate::exact_arith::CycInt;
use crate::hamming::HammingSpace;
use crate::limits::Limits;
use crate::partitions::{degree_stats, imbalance, table_from_code, VertexPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// `sum_k |V_k| e^k != 0`.
    Strong,
    /// `sum_k |rho(V_k)| e^k != 0`.
    Rotated,
    /// Class sizes not all equal (prime `m` only, where it matches `Strong`).
    Unequal,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::Strong => "strong",
            Constraint::Rotated => "rotated",
            Constraint::Unequal => "unequal",
        })
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(Constraint::Strong),
            "rotated" => Ok(Constraint::Rotated),
            "unequal" => Ok(Constraint::Unequal),
            other => Err(Error::invalid(format!(
                "unknown constraint '{other}' (expected strong, rotated or unequal)"
            ))),
        }
    }
}

impl Constraint {
    fn check_modulus(self, m: u32) -> Result<()> {
        if self == Constraint::Unequal && !is_prime(m as u64) {
            return Err(Error::invalid(format!(
                "the unequal-sizes constraint needs a prime m, got {m}"
            )));
        }
        Ok(())
    }

    /// The cyclotomic certificate: the relevant imbalance.
    pub fn certificate(self, p: &VertexPartition) -> CycInt {
        imbalance(p, self == Constraint::Rotated)
    }

    pub fn holds(self, p: &VertexPartition) -> bool {
        match self {
            Constraint::Unequal => {
                let sizes = p.class_sizes();
                sizes.iter().any(|&s| s != sizes[0])
            }
            _ => !self.certificate(p).is_zero(),
        }
    }

    /// Constraint on the plain and rotated class sizes.
    fn holds_on_sizes(self, m: u32, prime: bool, sizes: &[u64], rotated: &[u64]) -> bool {
        let relevant = if self == Constraint::Rotated {
            rotated
        } else {
            sizes
        };
        if prime || self == Constraint::Unequal {
            return relevant.iter().any(|&s| s != relevant[0]);
        }
        let counts: Vec<i64> = relevant.iter().map(|&s| s as i64).collect();
        !CycInt::from_counts(m, &counts)
            .expect("valid modulus")
            .is_zero()
    }
}

/// Geometric cooling `T_t = max(start * decay^t, floor)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub start: f64,
    pub decay: f64,
    pub floor: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            start: 2.0,
            decay: 0.9995,
            floor: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTask {
    pub m: u32,
    pub n: usize,
    pub constraint: Constraint,
    /// Moves per chain.
    pub budget: u64,
    pub seed: u64,
    pub chains: usize,
    pub schedule: Schedule,
}

impl SearchTask {
    pub fn new(m: u32, n: usize, constraint: Constraint) -> Self {
        SearchTask {
            m,
            n,
            constraint,
            budget: 20_000,
            seed: 0,
            chains: 1,
            schedule: Schedule::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub constraint: Constraint,
    pub partition: VertexPartition,
    /// `max_k Delta(H_k)`.
    pub objective: usize,
    pub certificate: CycInt,
    /// `(step, objective)` at each strict improvement.
    pub trace: Vec<(u64, usize)>,
    pub exhaustive: bool,
    /// Index of the chain that produced the result.
    pub chain: usize,
}

impl SearchResult {
    /// Recomputes the objective and the certificate from the partition.
    pub fn validate(&self) -> Result<()> {
        let recomputed = degree_stats(&self.partition)
            .max_degree()
            .finite()
            .unwrap_or(0);
        if recomputed != self.objective {
            return Err(Error::InvariantViolated(format!(
                "stored objective {} but the partition has max degree {recomputed}",
                self.objective
            )));
        }
        if self.constraint.certificate(&self.partition) != self.certificate {
            return Err(Error::InvariantViolated(
                "certificate does not match the partition".into(),
            ));
        }
        if !self.constraint.holds(&self.partition) {
            return Err(Error::InvariantViolated(format!(
                "partition violates the {} constraint",
                self.constraint
            )));
        }
        Ok(())
    }
}

fn max_class_degree(p: &VertexPartition) -> usize {
    (0..p.classes().len())
        .map(|idx| p.same_class_degree(idx) as usize)
        .max()
        .unwrap_or(0)
}

/// Global optimum over all `m^(m^n)` partitions; ties go to the first in
/// odometer order.
pub fn exhaustive_search(task: &SearchTask, limits: &Limits) -> Result<SearchResult> {
    task.constraint.check_modulus(task.m)?;
    let count = limits.check_enumeration(task.m, task.n)?;
    let size = limits.check_dense(task.m, task.n)?;
    let mut best: Option<(usize, VertexPartition)> = None;
    let mut trace = Vec::new();
    for code in 0..count {
        let p = VertexPartition::new(task.m, task.n, table_from_code(task.m, size, code))?;
        if !task.constraint.holds(&p) {
            continue;
        }
        let obj = max_class_degree(&p);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            trace.push((code, obj));
            best = Some((obj, p));
        }
    }
    let (objective, partition) = best.ok_or_else(|| {
        Error::invalid(format!(
            "no partition of H({}, {}) satisfies the constraint",
            task.n, task.m
        ))
    })?;
    Ok(SearchResult {
        constraint: task.constraint,
        certificate: task.constraint.certificate(&partition),
        partition,
        objective,
        trace,
        exhaustive: true,
        chain: 0,
    })
}

/// Mutable annealing state with cached degrees and a degree histogram.
struct Chain<'a> {
    space: &'a HammingSpace,
    classes: Vec<u32>,
    colors: Vec<u32>,
    degrees: Vec<u32>,
    histogram: Vec<u64>,
    sizes: Vec<u64>,
    rotated: Vec<u64>,
    max_degree: usize,
}

impl<'a> Chain<'a> {
    fn new(space: &'a HammingSpace, classes: Vec<u32>) -> Self {
        let m = space.m() as usize;
        let colors: Vec<u32> = (0..space.size()).map(|i| space.color(i)).collect();
        let mut chain = Chain {
            space,
            degrees: vec![0; space.size()],
            histogram: vec![0; space.regular_degree() + 1],
            sizes: vec![0; m],
            rotated: vec![0; m],
            max_degree: 0,
            classes,
            colors,
        };
        for v in 0..space.size() {
            let k = chain.classes[v];
            let mut d = 0;
            space.for_each_neighbor(v, |u| d += (chain.classes[u] == k) as u32);
            chain.degrees[v] = d;
            chain.histogram[d as usize] += 1;
            chain.sizes[k as usize] += 1;
            chain.rotated[((k + chain.colors[v]) as usize) % m] += 1;
        }
        chain.refresh_max();
        chain
    }

    fn refresh_max(&mut self) {
        self.max_degree = self.histogram.iter().rposition(|&c| c > 0).unwrap_or(0);
    }

    /// Max degree plus a fractional tie-break on how many vertices attain it.
    fn energy(&self) -> f64 {
        self.max_degree as f64
            + self.histogram[self.max_degree] as f64 / (self.space.size() as f64 + 1.0)
    }

    fn set_degree(&mut self, v: usize, d: u32) {
        self.histogram[self.degrees[v] as usize] -= 1;
        self.histogram[d as usize] += 1;
        self.degrees[v] = d;
    }

    /// Moves `v` to class `to`, keeping every cache exact.
    fn apply(&mut self, v: usize, to: u32) {
        let m = self.space.m() as usize;
        let from = self.classes[v];
        let mut new_deg = 0u32;
        let mut touched: Vec<(usize, i32)> = Vec::with_capacity(self.space.regular_degree());
        self.space.for_each_neighbor(v, |u| {
            let cu = self.classes[u];
            if cu == from {
                touched.push((u, -1));
            } else if cu == to {
                touched.push((u, 1));
                new_deg += 1;
            }
        });
        for (u, delta) in touched {
            let d = (self.degrees[u] as i32 + delta) as u32;
            self.set_degree(u, d);
        }
        self.set_degree(v, new_deg);
        self.classes[v] = to;
        self.sizes[from as usize] -= 1;
        self.sizes[to as usize] += 1;
        let c = self.colors[v] as usize;
        self.rotated[(from as usize + c) % m] -= 1;
        self.rotated[(to as usize + c) % m] += 1;
        self.refresh_max();
    }
}

fn initial_classes(space: &HammingSpace, constraint: Constraint) -> Vec<u32> {
    let m = space.m();
    (0..space.size())
        .map(|i| match constraint {
            // every vertex lands in class 0 after rotation
            Constraint::Rotated => (m - space.color(i)) % m,
            _ => 0,
        })
        .collect()
}

fn run_chain(task: &SearchTask, space: &HammingSpace, chain_index: usize) -> SearchResult {
    let m = task.m;
    let prime = is_prime(m as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
    rng.set_stream(chain_index as u64);
    let mut chain = Chain::new(space, initial_classes(space, task.constraint));
    let mut energy = chain.energy();
    let mut best_obj = chain.max_degree;
    let mut best = chain.classes.clone();
    let mut trace = vec![(0, best_obj)];
    let mut temperature = task.schedule.start;
    for step in 1..=task.budget {
        temperature = (temperature * task.schedule.decay).max(task.schedule.floor);
        if best_obj == 0 {
            break;
        }
        let v = rng.gen_range(0..space.size());
        let from = chain.classes[v];
        let to = (from + rng.gen_range(1..m)) % m;
        // reject moves that break the constraint, using the size caches
        let c = chain.colors[v] as usize;
        let mut sizes = chain.sizes.clone();
        let mut rotated = chain.rotated.clone();
        sizes[from as usize] -= 1;
        sizes[to as usize] += 1;
        rotated[(from as usize + c) % m as usize] -= 1;
        rotated[(to as usize + c) % m as usize] += 1;
        if !task.constraint.holds_on_sizes(m, prime, &sizes, &rotated) {
            continue;
        }
        chain.apply(v, to);
        let next = chain.energy();
        let accept = next <= energy || rng.gen::<f64>() < ((energy - next) / temperature).exp();
        if accept {
            energy = next;
            if chain.max_degree < best_obj {
                best_obj = chain.max_degree;
                best.clone_from(&chain.classes);
                trace.push((step, best_obj));
            }
        } else {
            chain.apply(v, from);
        }
    }
    let partition = VertexPartition::new(m, task.n, best).expect("chain keeps a valid table");
    SearchResult {
        constraint: task.constraint,
        certificate: task.constraint.certificate(&partition),
        partition,
        objective: best_obj,
        trace,
        exhaustive: false,
        chain: chain_index,
    }
}

/// Simulated annealing over single-vertex reassignments. Chains are independent,
/// so the merged result depends only on the task, not on the thread count.
pub fn anneal_search(task: &SearchTask, limits: &Limits) -> Result<SearchResult> {
    task.constraint.check_modulus(task.m)?;
    let space = HammingSpace::new(task.m, task.n, limits)?;
    if task.chains == 0 {
        return Err(Error::invalid("at least one chain is required"));
    }
    let s = task.schedule;
    if !(s.start > 0.0 && s.floor > 0.0 && s.decay > 0.0 && s.decay <= 1.0) {
        return Err(Error::invalid(format!(
            "invalid temperature schedule {s:?}"
        )));
    }
    let results: Vec<SearchResult> = (0..task.chains)
        .into_par_iter()
        .map(|c| run_chain(task, &space, c))
        .collect();
    Ok(results
        .into_iter()
        .min_by_key(|r| (r.objective, r.chain))
        .expect("at least one chain"))
}

/// Aligned text table with one row per result.
pub fn tabulate(results: &[SearchResult]) -> String {
    let header = [
        "m",
        "n",
        "constraint",
        "method",
        "max_degree",
        "certificate",
    ];
    let rows: Vec<[String; 6]> = results
        .iter()
        .map(|r| {
            [
                r.partition.m().to_string(),
                r.partition.n().to_string(),
                r.constraint.to_string(),
                if r.exhaustive {
                    "exhaustive".into()
                } else {
                    format!("anneal#{}", r.chain)
                },
                r.objective.to_string(),
                r.certificate.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[&str]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = line(&header);
    out.push('\n');
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        out.push_str(&line(&cells));
        out.push('\n');
    }
    out
}
