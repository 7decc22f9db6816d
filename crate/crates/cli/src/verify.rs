//! Self-check suites run by `msens verify`. Each suite returns named checks;
//! a suite passes when every check does.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use msens_core::construction::{
    class_residue_counts, construction_partition, delta_count, h_closed_form, min_degree_formula,
    residue_profile, separation_function, BlockPartition,
};
use msens_core::functions::{
    block_sensitivity, local_block_sensitivity, local_sensitivity, relabel, sensitivity,
};
use msens_core::partitions::{degree_stats, equivalence_exhaustive, rotation_duality_check};
use msens_core::representation::{degree, evaluate, interpolate, ExpVector};
use msens_core::search::{anneal_search, exhaustive_search};
use msens_core::{
    Alphabet, BigRational, Constraint, Error, Limits, MAryFunction, Result, Scalar, SearchTask,
    VertexPartition,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub limits: Limits,
    pub seed: u64,
    pub m: Option<u32>,
    pub n: Option<usize>,
}

pub const SUITES: &[&str] = &[
    "example",
    "exhaustive",
    "cube-duality",
    "min-degree",
    "residue-closed-form",
    "delta-divisibility",
    "residue-certificate",
    "separation",
    "rotation-duality",
    "relabel",
    "search",
    "equivalence",
];

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Vec<Check>> {
    match name {
        "example" => example(&opts.limits),
        "exhaustive" => exhaustive(opts),
        "cube-duality" => cube_duality(),
        "min-degree" => min_degree(&opts.limits),
        "residue-closed-form" => residue_closed_form(),
        "delta-divisibility" => delta_divisibility(),
        "residue-certificate" => residue_certificate(),
        "separation" => separation(opts.seed),
        "rotation-duality" => rotation_duality(opts.seed),
        "relabel" => relabel_suite(opts),
        "search" => search(opts),
        "equivalence" => equivalence(opts),
        other => Err(Error::InvalidParameter(format!(
            "unknown suite '{other}' (known: {}, all)",
            SUITES.join(", ")
        ))),
    }
}

/// The 9-point integer-alphabet function on `[0, 2]^2` used as a worked example.
pub fn example_function() -> MAryFunction {
    MAryFunction::from_table(3, 2, Alphabet::Integer, vec![2, 0, 1, 2, 2, 1, 2, 2, 1])
        .expect("valid table")
}

/// Its interpolant `2 + 6 x1 x2 - 7/2 x2 - 2 x1^2 x2 + x1^2 x2^2 - 3 x1 x2^2 + 3/2 x2^2`.
pub fn example_coefficients() -> BTreeMap<ExpVector, Scalar> {
    [
        ([0, 0], 2, 1),
        ([1, 1], 6, 1),
        ([0, 1], -7, 2),
        ([2, 1], -2, 1),
        ([2, 2], 1, 1),
        ([1, 2], -3, 1),
        ([0, 2], 3, 2),
    ]
    .into_iter()
    .map(|(e, p, q)| {
        (
            ExpVector::new(e.to_vec()),
            Scalar::Rational(BigRational::new(BigInt::from(p), BigInt::from(q))),
        )
    })
    .collect()
}

fn example(limits: &Limits) -> Result<Vec<Check>> {
    let f = example_function();
    let (s, bs, deg) = (
        sensitivity(&f, limits)?,
        block_sensitivity(&f, limits)?,
        degree(&f, limits)?,
    );
    let poly = interpolate(&f, limits)?;
    let exact_terms = poly.terms() == &example_coefficients();
    let evaluations_match = (0..9u32).all(|i| {
        let x = [i / 3, i % 3];
        evaluate(&poly, &x).ok()
            == Some(Scalar::Rational(BigRational::from_integer(
                f.eval(&x).expect("valid vertex").into(),
            )))
    });
    let ls = local_sensitivity(&f, &[0, 1])?;
    let lbs10 = local_block_sensitivity(&f, &[1, 0], limits)?;
    let lbs01 = local_block_sensitivity(&f, &[0, 1], limits)?;
    Ok(vec![
        Check::new(
            "measures",
            (s, bs, deg) == (4, 2, 4),
            format!("s={s} bs={bs} deg={deg}"),
        ),
        Check::new(
            "coefficients",
            exact_terms && evaluations_match,
            format!("{} terms, exact match {exact_terms}", poly.terms().len()),
        ),
        Check::new(
            "local values",
            (ls, lbs10, lbs01) == (4, 1, 2),
            format!("s(0,1)={ls} bs(1,0)={lbs10} bs(0,1)={lbs01}"),
        ),
    ])
}

fn exhaustive(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let (m, n) = (opts.m.unwrap_or(3), opts.n.unwrap_or(2));
    let r = equivalence_exhaustive(m, n, &opts.limits)?;
    let tag = |what: &str| format!("{what} (m={m} n={n}, {} functions)", r.functions);
    Ok(vec![
        Check::new(
            tag("chain s/(m-1) <= bs <= n"),
            r.chain_failures == 0,
            format!("{} failures", r.chain_failures),
        ),
        Check::new(
            tag("s <= 2(m-1)^3 deg^2"),
            r.sensitivity_bound_failures == 0,
            format!("{} failures", r.sensitivity_bound_failures),
        ),
        Check::new(
            tag("2(m-1)^2 deg^2 >= bs"),
            r.degree_bound_failures == 0,
            format!("{} failures", r.degree_bound_failures),
        ),
        Check::new(
            tag("constant term = average"),
            r.average_failures == 0,
            format!("{} failures", r.average_failures),
        ),
        Check::new(
            tag("top coefficient = shifted average"),
            r.top_coefficient_failures == 0,
            format!("{} failures", r.top_coefficient_failures),
        ),
        Check::new(
            tag("full degree <=> rotated imbalance"),
            r.biconditional_failures == 0,
            format!("{} failures", r.biconditional_failures),
        ),
        Check::new(
            tag("s = (m-1)n - min delta"),
            r.formula_failures == 0,
            format!("{} failures", r.formula_failures),
        ),
    ])
}

/// All `2^(2^n)` partitions of `Q_n`.
fn cube_partitions(n: usize) -> impl Iterator<Item = VertexPartition> {
    let size = 1usize << n;
    (0..1u64 << size).map(move |code| {
        let classes = (0..size).map(|i| ((code >> i) & 1) as u32).collect();
        VertexPartition::new(2, n, classes).expect("valid table")
    })
}

fn cube_duality() -> Result<Vec<Check>> {
    Ok((1..=3)
        .map(|n| {
            let (mut total, mut bad) = (0, 0);
            for p in cube_partitions(n) {
                total += 1;
                let c = rotation_duality_check(&p);
                bad += (c.equality_holds != Some(true)) as usize;
            }
            Check::new(
                format!("n - min delta = max Delta after rotation on Q_{n}"),
                bad == 0,
                format!("{total} partitions, {bad} failures"),
            )
        })
        .collect())
}

fn min_degree(limits: &Limits) -> Result<Vec<Check>> {
    let cases: [(u32, &[usize]); 9] = [
        (3, &[2, 2]),
        (3, &[3, 3]),
        (3, &[2, 4]),
        (3, &[1, 5]),
        (3, &[1, 3]),
        (3, &[2, 2, 2]),
        (3, &[3, 1, 2]),
        (3, &[4, 2]),
        (4, &[2, 2]),
    ];
    cases
        .iter()
        .map(|&(m, sizes)| {
            let bp = BlockPartition::consecutive(sizes)?;
            let formula = min_degree_formula(&bp, m);
            let stats = degree_stats(&construction_partition(&bp, m, limits)?);
            let brute: Vec<i64> = stats
                .classes
                .iter()
                .map(|c| c.min_degree.finite().map_or(-1, |d| d as i64))
                .collect();
            let headline = (m as i64 - 1) * (bp.k().max(bp.max_block()) as i64);
            let pass = brute == formula.per_class
                && formula.headline == headline
                && stats.sensitivity_value() as i64 == headline;
            Ok(Check::new(
                format!("m={m} blocks={sizes:?}"),
                pass,
                format!(
                    "formula {:?} brute {brute:?} headline {headline}",
                    formula.per_class
                ),
            ))
        })
        .collect()
}

fn residue_closed_form() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for m in 3..=7u32 {
        let (mut mismatches, mut spread_ok) = (0, true);
        for l in 1..=12usize {
            let profile = residue_profile(m, 0, m - 2, l)?;
            for s in 0..m as i64 {
                mismatches += (&h_closed_form(m, l, s)? != profile.get(s)) as usize;
            }
            let lo = profile.counts.iter().min().expect("m >= 2");
            let hi = profile.counts.iter().max().expect("m >= 2");
            spread_ok &= hi - lo <= BigUint::from(1u32);
        }
        checks.push(Check::new(
            format!("m={m} l<=12"),
            mismatches == 0 && spread_ok,
            format!("{mismatches} mismatches, spread <= 1: {spread_ok}"),
        ));
    }
    Ok(checks)
}

fn delta_divisibility() -> Result<Vec<Check>> {
    let cases = [
        (3u32, 1u32, 6usize),
        (3, 1, 12),
        (5, 1, 20),
        (5, 2, 20),
        (5, 3, 20),
    ];
    cases
        .iter()
        .map(|&(p, t, big_n)| {
            let row: Vec<BigUint> = (0..p as i64)
                .map(|s| delta_count(p, t, big_n, s))
                .collect::<Result<_>>()?;
            let divisible = row.iter().all(|d| (d % p) == BigUint::from(0u32));
            let sum: BigUint = row.iter().sum();
            let expected =
                BigUint::from(t + 1).pow(big_n as u32) - BigUint::from(t).pow(big_n as u32);
            Ok(Check::new(
                format!("p={p} t={t} N={big_n}"),
                divisible && sum == expected,
                format!("row {row:?}, sum {sum}"),
            ))
        })
        .collect()
}

fn residue_certificate() -> Result<Vec<Check>> {
    let bp = BlockPartition::square(6)?;
    let r = class_residue_counts(&bp, 3)?;
    let items = r
        .items
        .clone()
        .ok_or_else(|| Error::InvariantViolated("no proof items for m = 3".into()))?;
    Ok(vec![
        Check::new(
            "top difference is +-1",
            items.top_holds(),
            items.top_difference.to_string(),
        ),
        Check::new(
            "bottom difference is 0",
            items.bottom_holds(),
            items.bottom_difference.to_string(),
        ),
        Check::new(
            "middle class counts divisible by 3",
            items.middle_divisible,
            format!(
                "{:?}",
                r.counts
                    .iter()
                    .map(|row| row[1].clone())
                    .collect::<Vec<_>>()
            ),
        ),
        Check::new(
            "rotated class sizes 2 and 1 differ",
            items.rotated_sizes_differ,
            format!("{} vs {}", r.rotated_sizes[2], r.rotated_sizes[1]),
        ),
        Check::new(
            "(p-1)n - min delta = (p-1) sqrt(n) = 12",
            r.formula.sensitivity_value == 12 && r.formula.headline == 12,
            format!("{}", r.formula.sensitivity_value),
        ),
        Check::new(
            "rotated imbalance nonzero",
            !r.imbalance.is_zero(),
            r.imbalance.to_string(),
        ),
    ])
}

fn separation(seed: u64) -> Result<Vec<Check>> {
    let w = separation_function(3, 6)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0;
    for _ in 0..10_000 {
        let x: Vec<u32> = (0..36).map(|_| rng.gen_range(0..3)).collect();
        worst = worst.max(local_sensitivity(&w.function, &x)?);
    }
    let s = w.sensitivity;
    Ok(vec![
        Check::new(
            "degree certificate",
            !w.report.imbalance.is_zero() && w.degree == 72,
            format!("deg={} imbalance={}", w.degree, w.report.imbalance),
        ),
        Check::new(
            "s = sqrt((p-1) deg)",
            s == 12 && s * s == 2 * w.degree,
            format!("s={s}"),
        ),
        Check::new(
            "s^2/(p-1)^3 <= deg",
            s * s % 8 == 0 && s * s / 8 == 18 && 18 <= w.degree,
            format!("{}^2/8 = {}", s, s * s / 8),
        ),
        Check::new(
            "witness local sensitivity",
            w.witness_local_sensitivity == 12,
            w.witness_local_sensitivity.to_string(),
        ),
        Check::new(
            "10000 random vertices <= s",
            worst <= 12,
            format!("max {worst}"),
        ),
    ])
}

fn random_partition(rng: &mut impl Rng, m: u32, n: usize) -> VertexPartition {
    let size = (m as usize).pow(n as u32);
    VertexPartition::new(m, n, (0..size).map(|_| rng.gen_range(0..m)).collect())
        .expect("valid table")
}

fn rotation_duality(seed: u64) -> Result<Vec<Check>> {
    let mut checks: Vec<Check> = [(3u32, 3usize), (3, 4), (4, 3)]
        .iter()
        .map(|&(m, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (m as u64) << 8 ^ n as u64);
            let bad = (0..1000)
                .filter(|_| {
                    !rotation_duality_check(&random_partition(&mut rng, m, n)).inequality_holds
                })
                .count();
            Check::new(
                format!("1000 random partitions m={m} n={n}"),
                bad == 0,
                format!("{bad} failures"),
            )
        })
        .collect();
    for n in 1..=3 {
        let bad = cube_partitions(n)
            .filter(|p| !rotation_duality_check(p).holds())
            .count();
        checks.push(Check::new(
            format!("all partitions of Q_{n}"),
            bad == 0,
            format!("{bad} failures"),
        ));
    }
    Ok(checks)
}

fn relabel_suite(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let limits = &opts.limits;
    [(3u32, 2usize), (3, 3), (4, 2)]
        .iter()
        .map(|&(m, n)| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(m as u64 * 100 + n as u64));
            let size = (m as usize).pow(n as u32);
            let k2 = (m as usize - 1).pow(2);
            let mut bad = 0;
            for _ in 0..100 {
                let table = (0..size).map(|_| rng.gen_range(0..m)).collect();
                let f = MAryFunction::from_table(m, n, Alphabet::Integer, table)?;
                let g = relabel(&f, Alphabet::Unity);
                let same = sensitivity(&f, limits)? == sensitivity(&g, limits)?
                    && block_sensitivity(&f, limits)? == block_sensitivity(&g, limits)?;
                let (df, dg) = (degree(&f, limits)?, degree(&g, limits)?);
                bad += (!same || df > k2 * dg || dg > k2 * df) as usize;
            }
            Ok(Check::new(
                format!("100 random functions m={m} n={n}"),
                bad == 0,
                format!("{bad} failures"),
            ))
        })
        .collect()
}

fn search(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let (m, n) = (opts.m.unwrap_or(3), opts.n.unwrap_or(2));
    let task = SearchTask::new(m, n, Constraint::Strong);
    let best = exhaustive_search(&task, &opts.limits)?;
    best.validate()?;
    let (mut below, mut hits) = (0, 0);
    for i in 0..100 {
        let mut t = task.clone();
        t.seed = opts.seed.wrapping_add(i);
        t.budget = 5_000;
        let r = anneal_search(&t, &opts.limits)?;
        r.validate()?;
        below += (r.objective < best.objective) as usize;
        hits += (r.objective == best.objective) as usize;
    }
    Ok(vec![
        Check::new(
            format!("exhaustive optimum m={m} n={n}"),
            true,
            format!("max degree {}", best.objective),
        ),
        Check::new(
            "anneal never beats the optimum",
            below == 0,
            format!("{below} of 100"),
        ),
        Check::new(
            "anneal matches in >= 90 of 100 runs",
            hits >= 90,
            format!("{hits} of 100"),
        ),
    ])
}

fn equivalence(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let (m, n) = (opts.m.unwrap_or(3), opts.n.unwrap_or(2));
    let r = equivalence_exhaustive(m, n, &opts.limits)?;
    let show = |v: Option<usize>| v.map_or("none".to_string(), |x| x.to_string());
    Ok(vec![
        Check::new(
            format!("min s at full degree = min gap under rotated imbalance (m={m} n={n})"),
            r.minima_agree(),
            format!(
                "{} vs {}",
                show(r.min_sensitivity_full_degree),
                show(r.min_gap_rotated_imbalance)
            ),
        ),
        Check::new(
            "full degree <=> rotated imbalance",
            r.biconditional_failures == 0,
            format!(
                "{} functions, {} failures",
                r.functions, r.biconditional_failures
            ),
        ),
    ])
}
