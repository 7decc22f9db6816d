use crate::error::{Error, Result};

/// Capacity limits shared by every operation that materializes or enumerates
/// something exponential in `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `m^n` for which a dense table may be built or scanned.
    pub max_dense: u64,
    /// Largest arity accepted by the exact block-sensitivity DP (3^n work).
    pub max_bitmask_n: usize,
    /// Budget for exhaustive enumerations, counted in vertex evaluations
    /// (`m^n` times the number of functions or partitions visited).
    pub enumeration_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_dense: 1 << 24,
            max_bitmask_n: 16,
            enumeration_budget: 10_000_000,
        }
    }
}

impl Limits {
    /// `m^n` if it fits under `max_dense`.
    pub fn check_dense(&self, m: u32, n: usize) -> Result<usize> {
        match checked_pow(m as u64, n) {
            Some(size) if size <= self.max_dense => Ok(size as usize),
            Some(size) => Err(Error::capacity("dense table m^n", size, self.max_dense)),
            None => Err(Error::capacity(
                "dense table m^n",
                format!("{m}^{n}"),
                self.max_dense,
            )),
        }
    }

    pub fn check_bitmask(&self, n: usize) -> Result<()> {
        if n > self.max_bitmask_n {
            return Err(Error::capacity(
                "block-sensitivity arity",
                n,
                self.max_bitmask_n,
            ));
        }
        Ok(())
    }

    /// Returns the number of objects (`m^(m^n)`) when `objects * m^n` is within budget.
    pub fn check_enumeration(&self, m: u32, n: usize) -> Result<u64> {
        let vertices = checked_pow(m as u64, n);
        let objects = vertices.and_then(|v| checked_pow(m as u64, v as usize));
        match (vertices, objects) {
            (Some(v), Some(o))
                if o.checked_mul(v)
                    .is_some_and(|w| w <= self.enumeration_budget) =>
            {
                Ok(o)
            }
            _ => Err(Error::capacity(
                "exhaustive enumeration m^(m^n) * m^n",
                format!("{m}^({m}^{n}) * {m}^{n}"),
                self.enumeration_budget,
            )),
        }
    }
}

pub(crate) fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}
