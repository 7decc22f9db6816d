//! Vertex indexing for the Hamming graph `H(n, m)` on `[0, m-1]^n`.
//!
//! Vertices are addressed by `idx(x) = sum_j x_j * m^(n-1-j)` (coordinate 0 most
//! significant), which is also the order of every dense table and file format.

use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HammingSpace {
    m: u32,
    n: usize,
    size: usize,
    strides: Vec<usize>,
}

impl HammingSpace {
    pub fn new(m: u32, n: usize, limits: &Limits) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid(format!(
                "alphabet size must be >= 2, got {m}"
            )));
        }
        if n < 1 {
            return Err(Error::invalid("arity must be >= 1"));
        }
        let size = limits.check_dense(m, n)?;
        let mut strides = vec![1usize; n];
        for j in (0..n.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * m as usize;
        }
        Ok(HammingSpace {
            m,
            n,
            size,
            strides,
        })
    }

    /// Space for a table that already exists in memory, so no limit applies.
    pub(crate) fn for_table(m: u32, n: usize, len: usize) -> Result<Self> {
        let unbounded = Limits {
            max_dense: u64::MAX,
            ..Limits::default()
        };
        let space = HammingSpace::new(m, n, &unbounded)?;
        if space.size != len {
            return Err(Error::invalid(format!(
                "table has {len} entries, expected m^n = {m}^{n} = {}",
                space.size
            )));
        }
        Ok(space)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertices, `m^n`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `(m-1) n`, the common degree of every vertex.
    pub fn regular_degree(&self) -> usize {
        (self.m as usize - 1) * self.n
    }

    pub fn stride(&self, coord: usize) -> usize {
        self.strides[coord]
    }

    pub fn digit(&self, idx: usize, coord: usize) -> u32 {
        ((idx / self.strides[coord]) % self.m as usize) as u32
    }

    pub fn decode(&self, idx: usize) -> Vec<u32> {
        (0..self.n).map(|j| self.digit(idx, j)).collect()
    }

    pub fn encode(&self, x: &[u32]) -> Result<usize> {
        self.check_vertex(x)?;
        Ok(x.iter()
            .zip(&self.strides)
            .map(|(&d, &s)| d as usize * s)
            .sum())
    }

    pub fn check_vertex(&self, x: &[u32]) -> Result<()> {
        check_vertex(self.m, self.n, x)
    }

    /// Sum of coordinates modulo `m`.
    pub fn color(&self, idx: usize) -> u32 {
        let m = self.m as usize;
        let mut rest = idx;
        let mut sum = 0usize;
        while rest > 0 {
            sum += rest % m;
            rest /= m;
        }
        (sum % m) as u32
    }

    /// Calls `visit` with the index of each of the `(m-1) n` neighbours.
    #[inline]
    pub fn for_each_neighbor(&self, idx: usize, mut visit: impl FnMut(usize)) {
        let m = self.m as usize;
        for &stride in &self.strides {
            let d = (idx / stride) % m;
            let base = idx - d * stride;
            for v in 0..m {
                if v != d {
                    visit(base + v * stride);
                }
            }
        }
    }
}

pub(crate) fn check_vertex(m: u32, n: usize, x: &[u32]) -> Result<()> {
    if x.len() != n {
        return Err(Error::invalid(format!(
            "vertex has {} coordinates, expected {n}",
            x.len()
        )));
    }
    if let Some((j, &d)) = x.iter().enumerate().find(|(_, &d)| d >= m) {
        return Err(Error::invalid(format!(
            "coordinate {j} has value {d}, outside [0, {}]",
            m - 1
        )));
    }
    Ok(())
}

/// Sum of coordinates modulo `m` (the proper `m`-colouring of `H(n, m)`).
pub fn color_class(x: &[u32], m: u32) -> u32 {
    (x.iter().map(|&d| d as u64).sum::<u64>() % m as u64) as u32
}
