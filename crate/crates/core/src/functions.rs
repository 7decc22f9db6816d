//! m-ary functions `f: T^n -> T` and their combinatorial complexity measures.
//!
//! Inputs and outputs are stored as labels in `[0, m-1]`. The alphabet kind says
//! how labels are read as complex numbers: `Unity` maps label `j` to `e^j`,
//! `Integer` maps it to the integer `j`. Sensitivity and block sensitivity only
//! look at labels; the degree depends on the alphabet.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamming::{check_vertex, color_class, HammingSpace};
use crate::limits::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// `T = {1, e, ..., e^(m-1)}`.
    Unity,
    /// `T = {0, 1, ..., m-1}`.
    Integer,
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alphabet::Unity => "unity",
            Alphabet::Integer => "int",
        })
    }
}

impl FromStr for Alphabet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unity" => Ok(Alphabet::Unity),
            "int" | "integer" => Ok(Alphabet::Integer),
            other => Err(Error::invalid(format!(
                "unknown alphabet '{other}', expected 'unity' or 'int'"
            ))),
        }
    }
}

/// A deterministic membership oracle: vertex labels in, function label out.
pub type Oracle = Arc<dyn Fn(&[u32]) -> u32 + Send + Sync>;

#[derive(Clone)]
enum Values {
    Dense(Vec<u32>),
    Oracle(Oracle),
}

#[derive(Clone)]
pub struct MAryFunction {
    m: u32,
    n: usize,
    alphabet: Alphabet,
    values: Values,
}

impl fmt::Debug for MAryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("MAryFunction");
        d.field("m", &self.m)
            .field("n", &self.n)
            .field("alphabet", &self.alphabet);
        match &self.values {
            Values::Dense(t) => d.field("table", t),
            Values::Oracle(_) => d.field("table", &"<oracle>"),
        };
        d.finish()
    }
}

impl PartialEq for MAryFunction {
    /// Oracle-backed functions never compare equal.
    fn eq(&self, other: &Self) -> bool {
        match (&self.values, &other.values) {
            (Values::Dense(a), Values::Dense(b)) => {
                self.m == other.m && self.n == other.n && self.alphabet == other.alphabet && a == b
            }
            _ => false,
        }
    }
}

impl MAryFunction {
    /// Builds a dense function from a label table in index order.
    pub fn from_table(m: u32, n: usize, alphabet: Alphabet, table: Vec<u32>) -> Result<Self> {
        check_shape(m, n)?;
        let expected = crate::limits::checked_pow(m as u64, n);
        if expected != Some(table.len() as u64) {
            return Err(Error::invalid(format!(
                "table has {} labels, expected m^n = {m}^{n}",
                table.len()
            )));
        }
        if let Some((i, &v)) = table.iter().enumerate().find(|(_, &v)| v >= m) {
            return Err(Error::invalid(format!(
                "label {v} at index {i} outside [0, {}]",
                m - 1
            )));
        }
        Ok(MAryFunction {
            m,
            n,
            alphabet,
            values: Values::Dense(table),
        })
    }

    /// Tabulates `rule` over every vertex.
    pub fn from_fn(
        m: u32,
        n: usize,
        alphabet: Alphabet,
        limits: &Limits,
        rule: impl Fn(&[u32]) -> u32,
    ) -> Result<Self> {
        let space = HammingSpace::new(m, n, limits)?;
        let table = (0..space.size())
            .map(|idx| rule(&space.decode(idx)) % m)
            .collect();
        Self::from_table(m, n, alphabet, table)
    }

    /// Wraps an oracle for functions too large to tabulate. Labels returned by
    /// the oracle are reduced modulo `m`.
    pub fn from_oracle(m: u32, n: usize, alphabet: Alphabet, oracle: Oracle) -> Result<Self> {
        check_shape(m, n)?;
        Ok(MAryFunction {
            m,
            n,
            alphabet,
            values: Values::Oracle(oracle),
        })
    }

    pub fn constant(
        m: u32,
        n: usize,
        alphabet: Alphabet,
        label: u32,
        limits: &Limits,
    ) -> Result<Self> {
        let size = limits.check_dense(m, n)?;
        Self::from_table(m, n, alphabet, vec![label; size])
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

    pub fn is_dense(&self) -> bool {
        matches!(self.values, Values::Dense(_))
    }

    pub fn table(&self) -> Option<&[u32]> {
        match &self.values {
            Values::Dense(t) => Some(t),
            Values::Oracle(_) => None,
        }
    }

    pub fn space(&self, limits: &Limits) -> Result<HammingSpace> {
        HammingSpace::new(self.m, self.n, limits)
    }

    pub fn eval(&self, x: &[u32]) -> Result<u32> {
        check_vertex(self.m, self.n, x)?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[u32]) -> u32 {
        match &self.values {
            Values::Dense(t) => {
                let idx = x
                    .iter()
                    .fold(0usize, |acc, &d| acc * self.m as usize + d as usize);
                t[idx]
            }
            Values::Oracle(o) => o(x) % self.m,
        }
    }

    /// Dense copy of the function, tabulating the oracle if needed.
    pub fn to_dense(&self, limits: &Limits) -> Result<MAryFunction> {
        match &self.values {
            Values::Dense(_) => Ok(self.clone()),
            Values::Oracle(o) => {
                let o = Arc::clone(o);
                Self::from_fn(self.m, self.n, self.alphabet, limits, move |x| o(x))
            }
        }
    }

    /// Dense table, or `CapacityExceeded` when an oracle-backed function is
    /// too large to tabulate.
    pub(crate) fn dense_table(&self, limits: &Limits) -> Result<std::borrow::Cow<'_, [u32]>> {
        match &self.values {
            Values::Dense(t) => Ok(std::borrow::Cow::Borrowed(t)),
            Values::Oracle(_) => {
                let dense = self.to_dense(limits)?;
                match dense.values {
                    Values::Dense(t) => Ok(std::borrow::Cow::Owned(t)),
                    Values::Oracle(_) => unreachable!(),
                }
            }
        }
    }
}

fn check_shape(m: u32, n: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "alphabet size must be >= 2, got {m}"
        )));
    }
    if n < 1 {
        return Err(Error::invalid("arity must be >= 1"));
    }
    Ok(())
}

/// A normalized sensitive-block candidate: a nonempty set of coordinates, each
/// shifted by an amount in `[1, m-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftBlock {
    m: u32,
    shifts: BTreeMap<usize, u32>,
}

impl ShiftBlock {
    pub fn new(m: u32, shifts: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (coord, shift) in shifts {
            if shift == 0 || shift >= m {
                return Err(Error::invalid(format!(
                    "shift {shift} on coordinate {coord} outside [1, {}]",
                    m - 1
                )));
            }
            if map.insert(coord, shift).is_some() {
                return Err(Error::invalid(format!("coordinate {coord} listed twice")));
            }
        }
        if map.is_empty() {
            return Err(Error::invalid("a shift block needs a nonempty support"));
        }
        Ok(ShiftBlock { m, shifts: map })
    }

    /// Normalizes a multiset of (0-based) coordinates: multiplicities are taken
    /// modulo `m` and coordinates with zero net shift are dropped.
    pub fn from_multiset(m: u32, elements: &[usize]) -> Result<Self> {
        let mut mult: BTreeMap<usize, u32> = BTreeMap::new();
        for &e in elements {
            *mult.entry(e).or_default() += 1;
        }
        Self::new(
            m,
            mult.into_iter()
                .map(|(c, k)| (c, k % m))
                .filter(|&(_, k)| k != 0),
        )
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.shifts.keys().copied()
    }

    pub fn shifts(&self) -> &BTreeMap<usize, u32> {
        &self.shifts
    }
}

/// `x` with each coordinate of the block's support advanced by its shift modulo `m`.
pub fn apply_block(x: &[u32], block: &ShiftBlock) -> Result<Vec<u32>> {
    let mut y = x.to_vec();
    for (&coord, &shift) in &block.shifts {
        let slot = y.get_mut(coord).ok_or_else(|| {
            Error::invalid(format!(
                "block coordinate {coord} out of range for a vertex of length {}",
                x.len()
            ))
        })?;
        *slot = (*slot + shift) % block.m;
    }
    Ok(y)
}

/// Number of Hamming neighbours of `x` where `f` takes a different value.
pub fn local_sensitivity(f: &MAryFunction, x: &[u32]) -> Result<usize> {
    check_vertex(f.m, f.n, x)?;
    let here = f.eval_unchecked(x);
    let mut y = x.to_vec();
    let mut count = 0;
    for j in 0..f.n {
        let orig = y[j];
        for v in (0..f.m).filter(|&v| v != orig) {
            y[j] = v;
            if f.eval_unchecked(&y) != here {
                count += 1;
            }
        }
        y[j] = orig;
    }
    Ok(count)
}

fn local_sensitivity_idx(space: &HammingSpace, table: &[u32], idx: usize) -> usize {
    let here = table[idx];
    let mut count = 0;
    space.for_each_neighbor(idx, |j| {
        if table[j] != here {
            count += 1;
        }
    });
    count
}

/// Exact sensitivity. Oracle-backed functions are tabulated first, so they must
/// fit under `limits.max_dense`.
pub fn sensitivity(f: &MAryFunction, limits: &Limits) -> Result<usize> {
    let space = f.space(limits)?;
    let table = f.dense_table(limits)?;
    Ok((0..space.size())
        .into_par_iter()
        .map(|idx| local_sensitivity_idx(&space, &table, idx))
        .max()
        .unwrap_or(0))
}

/// A lower bound obtained from a subset of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledBound {
    pub value: usize,
    pub witness: Option<Vec<u32>>,
    pub vertices_checked: usize,
    /// Always `false`: the value is a lower bound, not the exact maximum.
    pub exact: bool,
}

/// Largest local sensitivity over the given vertices. Works for oracle-backed
/// functions of any size.
pub fn sensitivity_lower_bound<'a>(
    f: &MAryFunction,
    vertices: impl IntoIterator<Item = &'a [u32]>,
) -> Result<SampledBound> {
    let mut best = SampledBound {
        value: 0,
        witness: None,
        vertices_checked: 0,
        exact: false,
    };
    for x in vertices {
        let s = local_sensitivity(f, x)?;
        best.vertices_checked += 1;
        if best.witness.is_none() || s > best.value {
            best.value = s;
            best.witness = Some(x.to_vec());
        }
    }
    Ok(best)
}

/// Maximum number of pairwise disjoint sensitive blocks at `x`.
pub fn local_block_sensitivity(f: &MAryFunction, x: &[u32], limits: &Limits) -> Result<usize> {
    limits.check_bitmask(f.n)?;
    let space = f.space(limits)?;
    let idx = space.encode(x)?;
    let table = f.dense_table(limits)?;
    Ok(local_block_sensitivity_idx(&space, &table, idx))
}

pub fn block_sensitivity(f: &MAryFunction, limits: &Limits) -> Result<usize> {
    limits.check_bitmask(f.n)?;
    let space = f.space(limits)?;
    let table = f.dense_table(limits)?;
    Ok((0..space.size())
        .into_par_iter()
        .map(|idx| local_block_sensitivity_idx(&space, &table, idx))
        .max()
        .unwrap_or(0))
}

/// Marks the support `diff(x, y)` of every `y` with `f(y) != f(x)`; each marked
/// support carries at least one sensitive block. A subset DP then packs the
/// largest number of pairwise disjoint marked supports, in `O(3^n)`.
fn local_block_sensitivity_idx(space: &HammingSpace, table: &[u32], idx: usize) -> usize {
    let n = space.n();
    let here = table[idx];
    let x = space.decode(idx);
    let full = (1usize << n) - 1;
    let mut marked = vec![false; full + 1];
    let mut any = false;
    for (j, &v) in table.iter().enumerate() {
        if v == here {
            continue;
        }
        let mut mask = 0usize;
        for (c, &xc) in x.iter().enumerate() {
            if space.digit(j, c) != xc {
                mask |= 1 << c;
            }
        }
        marked[mask] = true;
        any = true;
    }
    if !any {
        return 0;
    }
    let mut best = vec![0u8; full + 1];
    for set in 1..=full {
        let low = set & set.wrapping_neg();
        let rest = set ^ low;
        let mut value = best[rest];
        // every submask `sub` of `rest`; the candidate block is `sub | low`
        let mut sub = rest;
        loop {
            let block = sub | low;
            if marked[block] {
                value = value.max(1 + best[set ^ block]);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[set] = value;
    }
    best[full] as usize
}

/// `g(x) = f(x) + i * sum_j x_j (mod m)`: the label form of multiplying by
/// `(x_1 ... x_n)^i` over the unity alphabet.
pub fn shift_function(f: &MAryFunction, i: u32) -> MAryFunction {
    let m = f.m;
    let i = i % m;
    let values = match &f.values {
        Values::Dense(t) => {
            let mut out = Vec::with_capacity(t.len());
            // color of consecutive indices, maintained with an odometer
            let mut digits = vec![0u32; f.n];
            let mut color = 0u32;
            for &v in t {
                out.push((v + i * color) % m);
                for d in digits.iter_mut().rev() {
                    *d += 1;
                    if *d == m {
                        *d = 0;
                        color = (color + 1) % m;
                    } else {
                        color = (color + 1) % m;
                        break;
                    }
                }
            }
            Values::Dense(out)
        }
        Values::Oracle(o) => {
            let o = Arc::clone(o);
            Values::Oracle(Arc::new(move |x: &[u32]| {
                (o(x) % m + i * color_class(x, m)) % m
            }))
        }
    };
    MAryFunction {
        m,
        n: f.n,
        alphabet: f.alphabet,
        values,
    }
}

/// Same label table read over a different alphabet.
pub fn relabel(f: &MAryFunction, target: Alphabet) -> MAryFunction {
    MAryFunction {
        alphabet: target,
        ..f.clone()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The 3-ary function on {0,1,2}^2 with f^-1(0) = {(0,1)},
    /// f^-1(1) = {(0,2),(1,2),(2,2)} and value 2 elsewhere.
    pub(crate) fn nine_point() -> MAryFunction {
        MAryFunction::from_table(3, 2, Alphabet::Integer, vec![2, 0, 1, 2, 2, 1, 2, 2, 1]).unwrap()
    }

    fn limits() -> Limits {
        Limits::default()
    }

    /// Enumerates every normalized block at `x`, keeps the sensitive ones and
    /// finds the largest family with disjoint supports by plain recursion.
    fn brute_force_local_bs(f: &MAryFunction, x: &[u32]) -> usize {
        let m = f.m();
        let n = f.n();
        let here = f.eval(x).unwrap();
        let mut sensitive_supports = Vec::new();
        for support in 1u32..(1 << n) {
            let coords: Vec<usize> = (0..n).filter(|c| support >> c & 1 == 1).collect();
            let combos = (m - 1).pow(coords.len() as u32);
            let found = (0..combos).any(|mut code| {
                let block = ShiftBlock::new(
                    m,
                    coords.iter().map(|&c| {
                        let s = code % (m - 1) + 1;
                        code /= m - 1;
                        (c, s)
                    }),
                )
                .unwrap();
                f.eval(&apply_block(x, &block).unwrap()).unwrap() != here
            });
            if found {
                sensitive_supports.push(support);
            }
        }
        fn pack(sets: &[u32], used: u32) -> usize {
            match sets.split_first() {
                None => 0,
                Some((&first, rest)) => {
                    let skip = pack(rest, used);
                    if first & used == 0 {
                        skip.max(1 + pack(rest, used | first))
                    } else {
                        skip
                    }
                }
            }
        }
        pack(&sensitive_supports, 0)
    }

    pub(crate) fn random_function(
        rng: &mut impl Rng,
        m: u32,
        n: usize,
        alphabet: Alphabet,
    ) -> MAryFunction {
        let size = (m as usize).pow(n as u32);
        let table = (0..size).map(|_| rng.gen_range(0..m)).collect();
        MAryFunction::from_table(m, n, alphabet, table).unwrap()
    }

    #[test]
    fn apply_block_examples() {
        let s1 = ShiftBlock::from_multiset(3, &[0, 0, 1]).unwrap();
        assert_eq!(s1.shifts(), &BTreeMap::from([(0, 2), (1, 1)]));
        assert_eq!(apply_block(&[0, 0, 0], &s1).unwrap(), vec![2, 1, 0]);
        assert_eq!(apply_block(&[1, 0, 2], &s1).unwrap(), vec![0, 1, 2]);
        let s2 = ShiftBlock::from_multiset(3, &[0]).unwrap();
        assert_eq!(apply_block(&[0, 0, 0], &s2).unwrap(), vec![1, 0, 0]);
        assert_eq!(apply_block(&[1, 0, 2], &s2).unwrap(), vec![2, 0, 2]);

        let back = ShiftBlock::new(3, [(1, 2)]).unwrap();
        let fwd = ShiftBlock::new(3, [(1, 1)]).unwrap();
        let x = vec![2, 2, 1];
        assert_eq!(
            apply_block(&apply_block(&x, &back).unwrap(), &fwd).unwrap(),
            x
        );

        assert!(ShiftBlock::new(3, []).is_err());
        assert!(ShiftBlock::from_multiset(3, &[2, 2, 2]).is_err());
        assert!(ShiftBlock::new(3, [(0, 3)]).is_err());
        assert!(ShiftBlock::new(3, [(0, 0)]).is_err());
        assert!(apply_block(&[0, 0], &ShiftBlock::new(3, [(4, 1)]).unwrap()).is_err());
    }

    #[test]
    fn nine_point_measures() {
        let f = nine_point();
        let l = limits();
        assert_eq!(local_sensitivity(&f, &[0, 1]).unwrap(), 4);
        assert_eq!(sensitivity(&f, &l).unwrap(), 4);
        assert_eq!(local_block_sensitivity(&f, &[1, 0], &l).unwrap(), 1);
        assert_eq!(local_block_sensitivity(&f, &[0, 1], &l).unwrap(), 2);
        assert_eq!(block_sensitivity(&f, &l).unwrap(), 2);
        // {2,2} is a sensitive block at (1,0)
        let b = ShiftBlock::from_multiset(3, &[1, 1]).unwrap();
        assert_ne!(
            f.eval(&apply_block(&[1, 0], &b).unwrap()).unwrap(),
            f.eval(&[1, 0]).unwrap()
        );
    }

    #[test]
    fn constants_and_dictators() {
        let l = limits();
        for m in 2..=4u32 {
            for n in 1..=3usize {
                let c = MAryFunction::constant(m, n, Alphabet::Unity, m - 1, &l).unwrap();
                assert_eq!(sensitivity(&c, &l).unwrap(), 0);
                assert_eq!(block_sensitivity(&c, &l).unwrap(), 0);
                assert_eq!(local_sensitivity(&c, &vec![0; n]).unwrap(), 0);

                let d = MAryFunction::from_fn(m, n, Alphabet::Unity, &l, |x| x[0]).unwrap();
                let space = d.space(&l).unwrap();
                for idx in 0..space.size() {
                    assert_eq!(
                        local_sensitivity(&d, &space.decode(idx)).unwrap(),
                        m as usize - 1
                    );
                }
                assert_eq!(block_sensitivity(&d, &l).unwrap(), 1);
            }
        }
    }

    #[test]
    fn sum_functions() {
        let l = limits();
        let f = MAryFunction::from_fn(3, 2, Alphabet::Unity, &l, |x| x[0] + x[1]).unwrap();
        assert_eq!(sensitivity(&f, &l).unwrap(), 4);
        let g = MAryFunction::from_fn(3, 3, Alphabet::Unity, &l, |x| x.iter().sum()).unwrap();
        assert_eq!(block_sensitivity(&g, &l).unwrap(), 3);
        assert_eq!(brute_force_local_bs(&g, &[0, 0, 0]), 3);
    }

    #[test]
    fn block_sensitivity_dp_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let l = limits();
        for (m, n) in [(2, 3), (3, 2), (3, 3), (4, 2), (2, 4)] {
            for _ in 0..20 {
                let f = random_function(&mut rng, m, n, Alphabet::Integer);
                let space = f.space(&l).unwrap();
                for idx in 0..space.size() {
                    let x = space.decode(idx);
                    assert_eq!(
                        local_block_sensitivity(&f, &x, &l).unwrap(),
                        brute_force_local_bs(&f, &x),
                        "m={m} n={n} x={x:?} f={:?}",
                        f.table()
                    );
                }
            }
        }
    }

    #[test]
    fn sensitivity_block_sensitivity_chain_exhaustive_m3_n2() {
        let l = limits();
        for code in 0..3u32.pow(9) {
            let table = (0..9).map(|i| code / 3u32.pow(i) % 3).collect();
            let f = MAryFunction::from_table(3, 2, Alphabet::Unity, table).unwrap();
            let s = sensitivity(&f, &l).unwrap();
            let bs = block_sensitivity(&f, &l).unwrap();
            assert!(s <= 2 * bs && bs <= 2, "s={s} bs={bs}");
        }
    }

    #[test]
    fn shift_examples() {
        let l = limits();
        let f = nine_point();
        assert_eq!(shift_function(&f, 0), f);
        assert_eq!(shift_function(&shift_function(&f, 1), 2), f);
        let zero = MAryFunction::constant(3, 1, Alphabet::Unity, 0, &l).unwrap();
        assert_eq!(shift_function(&zero, 1).table().unwrap(), &[0, 1, 2]);
    }

    #[test]
    fn oracle_functions() {
        let l = limits();
        let oracle: Oracle = Arc::new(|x: &[u32]| x[0] + 2 * x[1]);
        let f = MAryFunction::from_oracle(3, 2, Alphabet::Unity, oracle).unwrap();
        let dense = f.to_dense(&l).unwrap();
        assert!(!f.is_dense());
        assert_eq!(
            sensitivity(&f, &l).unwrap(),
            sensitivity(&dense, &l).unwrap()
        );
        let shifted = shift_function(&f, 2).to_dense(&l).unwrap();
        assert_eq!(shifted, shift_function(&dense, 2));
        for idx in 0..9 {
            let x = dense.space(&l).unwrap().decode(idx);
            assert_eq!(
                local_sensitivity(&f, &x).unwrap(),
                local_sensitivity(&dense, &x).unwrap()
            );
        }

        let big: Oracle = Arc::new(|x: &[u32]| x.iter().sum());
        let huge = MAryFunction::from_oracle(3, 40, Alphabet::Unity, big).unwrap();
        assert!(matches!(
            sensitivity(&huge, &l),
            Err(Error::CapacityExceeded { .. })
        ));
        let zeros = vec![0u32; 40];
        let ones = vec![1u32; 40];
        let bound = sensitivity_lower_bound(&huge, [zeros.as_slice(), ones.as_slice()]).unwrap();
        assert_eq!(bound.value, 80);
        assert!(!bound.exact);
        assert_eq!(bound.vertices_checked, 2);
    }

    #[test]
    fn construction_errors() {
        assert!(MAryFunction::from_table(3, 2, Alphabet::Unity, vec![0; 8]).is_err());
        assert!(MAryFunction::from_table(3, 2, Alphabet::Unity, vec![3; 9]).is_err());
        assert!(MAryFunction::from_table(1, 2, Alphabet::Unity, vec![0]).is_err());
        let tight = Limits {
            max_bitmask_n: 2,
            ..Limits::default()
        };
        let f = MAryFunction::constant(2, 3, Alphabet::Unity, 0, &tight).unwrap();
        assert!(matches!(
            block_sensitivity(&f, &tight),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!(nine_point().eval(&[0, 3]).is_err());
        assert_eq!("unity".parse::<Alphabet>().unwrap(), Alphabet::Unity);
        assert!("complex".parse::<Alphabet>().is_err());
    }

    proptest! {
        #[test]
        fn shift_is_a_bijection(seed in any::<u64>(), m in 2u32..5, n in 1usize..4, i in 0u32..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_function(&mut rng, m, n, Alphabet::Unity);
            let i = i % m;
            let back = shift_function(&shift_function(&f, i), (m - i) % m);
            prop_assert_eq!(back, f);
        }

        #[test]
        fn disjoint_blocks_compose(seed in any::<u64>(), m in 2u32..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 6;
            let x: Vec<u32> = (0..n).map(|_| rng.gen_range(0..m)).collect();
            let a = ShiftBlock::new(m, [(0, rng.gen_range(1..m)), (2, rng.gen_range(1..m))]).unwrap();
            let b = ShiftBlock::new(m, [(3, rng.gen_range(1..m)), (5, rng.gen_range(1..m))]).unwrap();
            let merged = ShiftBlock::new(m, a.shifts().iter().chain(b.shifts()).map(|(&c, &s)| (c, s))).unwrap();
            let seq = apply_block(&apply_block(&x, &a).unwrap(), &b).unwrap();
            prop_assert_eq!(seq, apply_block(&x, &merged).unwrap());
        }

        #[test]
        fn relabel_preserves_measures(seed in any::<u64>(), m in 2u32..5, n in 1usize..4) {
            let l = Limits::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_function(&mut rng, m, n, Alphabet::Integer);
            let g = relabel(&f, Alphabet::Unity);
            prop_assert_eq!(sensitivity(&f, &l).unwrap(), sensitivity(&g, &l).unwrap());
            prop_assert_eq!(block_sensitivity(&f, &l).unwrap(), block_sensitivity(&g, &l).unwrap());
        }

        #[test]
        fn local_measures_are_consistent(seed in any::<u64>(), m in 2u32..5, n in 1usize..4) {
            let l = Limits::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_function(&mut rng, m, n, Alphabet::Integer);
            let space = f.space(&l).unwrap();
            let table = f.table().unwrap();
            for idx in 0..space.size() {
                let x = space.decode(idx);
                let s = local_sensitivity(&f, &x).unwrap();
                let bs = local_block_sensitivity(&f, &x, &l).unwrap();
                prop_assert!(s <= (m as usize - 1) * bs);
                prop_assert!(bs <= n);
                let reachable = table.iter().any(|&v| v != table[idx]);
                prop_assert_eq!(bs >= 1, reachable);
            }
        }
    }
}
