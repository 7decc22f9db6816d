//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Where cheap, values are recomputed here by independent
//! brute force instead of trusting the library.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use msens_core::construction::{
    class_residue_counts, construction_partition, delta_count, h_closed_form, min_degree_formula,
    separation_function, BlockPartition,
};
use msens_core::formats::{parse_polynomial, write_mfun};
use msens_core::functions::{
    block_sensitivity, local_block_sensitivity, local_sensitivity, relabel, sensitivity,
};
use msens_core::partitions::{equivalence_exhaustive, rotation_duality_check};
use msens_core::representation::degree;
use msens_core::search::{anneal_search, exhaustive_search};
use msens_core::{
    Alphabet, BigRational, Constraint, Limits, MAryFunction, Scalar, SearchTask, VertexPartition,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn digits(mut idx: usize, m: u32, n: usize) -> Vec<u32> {
    let mut x = vec![0; n];
    for j in (0..n).rev() {
        x[j] = (idx % m as usize) as u32;
        idx /= m as usize;
    }
    x
}

/// Per-vertex count of same-class Hamming neighbours, from first principles.
fn brute_degrees(m: u32, n: usize, classes: &[u32]) -> Vec<usize> {
    let weights: Vec<usize> = (0..n)
        .map(|j| (m as usize).pow((n - 1 - j) as u32))
        .collect();
    (0..classes.len())
        .map(|v| {
            let x = digits(v, m, n);
            let mut d = 0;
            for j in 0..n {
                for c in 0..m {
                    if c != x[j] {
                        let u = v - x[j] as usize * weights[j] + c as usize * weights[j];
                        d += (classes[u] == classes[v]) as usize;
                    }
                }
            }
            d
        })
        .collect()
}

/// Per-class (min, max) induced degree; `None` for empty classes.
fn brute_class_extremes(m: u32, n: usize, classes: &[u32]) -> Vec<Option<(usize, usize)>> {
    let deg = brute_degrees(m, n, classes);
    let mut out = vec![None; m as usize];
    for (v, &k) in classes.iter().enumerate() {
        let e = out[k as usize].get_or_insert((usize::MAX, 0));
        e.0 = e.0.min(deg[v]);
        e.1 = e.1.max(deg[v]);
    }
    out
}

fn brute_rotate(m: u32, n: usize, classes: &[u32]) -> Vec<u32> {
    classes
        .iter()
        .enumerate()
        .map(|(v, &k)| (k + digits(v, m, n).iter().sum::<u32>()) % m)
        .collect()
}

/// `(m-1)n - min_k delta(P)` and `max_k Delta(rotate(P))`.
fn duality_sides(m: u32, n: usize, classes: &[u32]) -> (usize, usize) {
    let min_delta = brute_class_extremes(m, n, classes)
        .iter()
        .flatten()
        .map(|e| e.0)
        .min()
        .expect("some class is nonempty");
    let max_rot = brute_class_extremes(m, n, &brute_rotate(m, n, classes))
        .iter()
        .flatten()
        .map(|e| e.1)
        .max()
        .expect("some class is nonempty");
    ((m as usize - 1) * n - min_delta, max_rot)
}

fn nine_point() -> MAryFunction {
    MAryFunction::from_table(3, 2, Alphabet::Integer, vec![2, 0, 1, 2, 2, 1, 2, 2, 1]).unwrap()
}

fn criterion_1() -> Outcome {
    let limits = Limits::default();
    let f = nine_point();
    let dir = tempfile::tempdir().map_err(err)?;
    let input = dir.path().join("nine.mfun");
    std::fs::write(&input, write_mfun(&f, &limits).map_err(err)?).map_err(err)?;
    let exe = env!("CARGO_BIN_EXE_msens");

    let analyze = Command::new(exe)
        .arg("analyze")
        .arg(&input)
        .output()
        .map_err(err)?;
    let stdout = String::from_utf8_lossy(&analyze.stdout).to_string();
    let measures = stdout
        .lines()
        .find(|l| l.starts_with("s="))
        .unwrap_or_default()
        .to_string();
    if !analyze.status.success() || measures != "s=4 bs=2 deg=4" {
        return Err(format!(
            "analyze printed '{measures}' (status {})",
            analyze.status
        ));
    }

    let poly_path = dir.path().join("nine.poly");
    let interp = Command::new(exe)
        .args(["interpolate", "--verbosity", "0"])
        .arg(&input)
        .arg("--out")
        .arg(&poly_path)
        .output()
        .map_err(err)?;
    if !interp.status.success() {
        return Err(format!(
            "interpolate failed: {}",
            String::from_utf8_lossy(&interp.stderr)
        ));
    }
    let poly = parse_polynomial(&std::fs::read_to_string(&poly_path).map_err(err)?).map_err(err)?;
    // 2 + 6 x1 x2 - 7/2 x2 - 2 x1^2 x2 + x1^2 x2^2 - 3 x1 x2^2 + 3/2 x2^2
    let expected: BTreeMap<Vec<u32>, BigRational> = [
        (vec![0, 0], 2, 1),
        (vec![1, 1], 6, 1),
        (vec![0, 1], -7, 2),
        (vec![2, 1], -2, 1),
        (vec![2, 2], 1, 1),
        (vec![1, 2], -3, 1),
        (vec![0, 2], 3, 2),
    ]
    .into_iter()
    .map(|(e, p, q)| (e, BigRational::new(BigInt::from(p), BigInt::from(q))))
    .collect();
    let got: BTreeMap<Vec<u32>, BigRational> = poly
        .terms()
        .iter()
        .filter_map(|(e, c)| match c {
            Scalar::Rational(r) => Some((e.exponents().to_vec(), r.clone())),
            Scalar::Cyclotomic(_) => None,
        })
        .collect();
    if got != expected || poly.terms().len() != 7 {
        return Err(format!(
            "interpolant has {} terms, mismatch",
            poly.terms().len()
        ));
    }

    let ls = local_sensitivity(&f, &[0, 1]).map_err(err)?;
    let b10 = local_block_sensitivity(&f, &[1, 0], &limits).map_err(err)?;
    let b01 = local_block_sensitivity(&f, &[0, 1], &limits).map_err(err)?;
    ensure(
        (ls, b10, b01) == (4, 1, 2),
        format!("{measures}, 7 exact coefficients, s_(0,1)={ls} bs_(1,0)={b10} bs_(0,1)={b01}"),
    )
}

fn criterion_2() -> Outcome {
    let r = equivalence_exhaustive(3, 2, &Limits::default()).map_err(err)?;
    let counters = [
        ("chain", r.chain_failures),
        ("sensitivity bound", r.sensitivity_bound_failures),
        ("degree bound", r.degree_bound_failures),
        ("average", r.average_failures),
        ("top coefficient", r.top_coefficient_failures),
        ("biconditional", r.biconditional_failures),
    ];
    let bad: Vec<String> = counters
        .iter()
        .filter(|c| c.1 > 0)
        .map(|(name, k)| format!("{name}: {k}"))
        .collect();
    ensure(
        r.functions == 19_683 && bad.is_empty(),
        format!("{} functions, failures [{}]", r.functions, bad.join(", ")),
    )
}

fn cube_partitions(n: usize) -> impl Iterator<Item = Vec<u32>> {
    let size = 1usize << n;
    (0..1u64 << size).map(move |code| (0..size).map(|i| ((code >> i) & 1) as u32).collect())
}

fn criterion_3() -> Outcome {
    let mut total = 0;
    for n in 1..=3 {
        for classes in cube_partitions(n) {
            total += 1;
            let (lhs, rhs) = duality_sides(2, n, &classes);
            let lib =
                rotation_duality_check(&VertexPartition::new(2, n, classes.clone()).map_err(err)?);
            if lhs != rhs || lib.equality_holds != Some(true) {
                return Err(format!("Q_{n} partition {classes:?}: {lhs} vs {rhs}"));
            }
        }
    }
    ensure(
        total == 4 + 16 + 256,
        format!("equality on all {total} partitions of Q_1, Q_2, Q_3"),
    )
}

fn criterion_4() -> Outcome {
    let limits = Limits::default();
    let cases: [(u32, &[usize]); 5] = [
        (3, &[2, 2]),
        (3, &[3, 3]),
        (3, &[2, 4]),
        (3, &[1, 5]),
        (4, &[2, 2]),
    ];
    for (m, sizes) in cases {
        let bp = BlockPartition::consecutive(sizes).map_err(err)?;
        let n = bp.n();
        let p = construction_partition(&bp, m, &limits).map_err(err)?;
        let brute: Vec<i64> = brute_class_extremes(m, n, p.classes())
            .iter()
            .map(|e| e.map_or(-1, |(lo, _)| lo as i64))
            .collect();
        let formula = min_degree_formula(&bp, m);
        let headline = (m as i64 - 1) * (sizes.len().max(*sizes.iter().max().unwrap()) as i64);
        let min_delta = brute
            .iter()
            .filter(|&&d| d >= 0)
            .min()
            .copied()
            .unwrap_or(0);
        if brute != formula.per_class
            || formula.headline != headline
            || (m as i64 - 1) * n as i64 - min_delta != headline
        {
            return Err(format!(
                "m={m} blocks={sizes:?}: formula {:?} brute {brute:?} headline {} vs {headline}",
                formula.per_class, formula.headline
            ));
        }
    }
    Ok("per-class minimum degrees and headline match brute force on 5 shapes".into())
}

fn criterion_5() -> Outcome {
    let mut cells = 0;
    for m in 3..=7u32 {
        for l in 1..=12usize {
            // Words over [0, m-2] of length l, counted by digit sum mod m.
            let mut counts = vec![0u128; m as usize];
            counts[0] = 1;
            for _ in 0..l {
                let mut next = vec![0u128; m as usize];
                for (s, &c) in counts.iter().enumerate() {
                    for d in 0..m as usize - 1 {
                        next[(s + d) % m as usize] += c;
                    }
                }
                counts = next;
            }
            for s in 0..m as i64 {
                let closed = h_closed_form(m, l, s).map_err(err)?;
                if closed != BigUint::from(counts[s as usize]) {
                    return Err(format!(
                        "m={m} l={l} s={s}: closed form {closed}, direct {}",
                        counts[s as usize]
                    ));
                }
                cells += 1;
            }
            let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
            if spread > 1 {
                return Err(format!("m={m} l={l}: spread {spread}"));
            }
        }
    }
    Ok(format!(
        "{cells} closed-form values equal direct counts; spread <= 1"
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cases = [
        (3u32, 1u32, 6usize),
        (3, 1, 12),
        (5, 1, 20),
        (5, 2, 20),
        (5, 3, 20),
    ];
    for (p, t, big_n) in cases {
        let row: Vec<BigUint> = (0..p as i64)
            .map(|s| delta_count(p, t, big_n, s))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let sum: BigUint = row.iter().sum();
        let expected = BigUint::from(t + 1).pow(big_n as u32) - BigUint::from(t).pow(big_n as u32);
        if row.iter().any(|d| d % p != BigUint::from(0u32)) || sum != expected {
            return Err(format!(
                "p={p} t={t} N={big_n}: row {row:?}, sum {sum} vs {expected}"
            ));
        }
    }
    ensure(
        start.elapsed() < Duration::from_secs(1),
        format!(
            "all 5 rows divisible, row sums (t+1)^N - t^N, {:?}",
            start.elapsed()
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let r = class_residue_counts(&BlockPartition::square(6).map_err(err)?, 3).map_err(err)?;
    let items = r.items.clone().ok_or("no proof items at p = 3")?;
    let top = items.top_difference.clone();
    let ok = (top == BigInt::from(1) || top == BigInt::from(-1))
        && items.bottom_difference == BigInt::from(0)
        && r.counts
            .iter()
            .all(|row| &row[1] % 3u32 == BigUint::from(0u32))
        && r.rotated_sizes[2] != r.rotated_sizes[1]
        && r.formula.sensitivity_value == 12
        && start.elapsed() < Duration::from_secs(1);
    ensure(
        ok,
        format!(
            "top {top}, bottom {}, middle divisible {}, |rho V2| = {} vs |rho V1| = {}, sensitivity {}, {:?}",
            items.bottom_difference,
            items.middle_divisible,
            r.rotated_sizes[2],
            r.rotated_sizes[1],
            r.formula.sensitivity_value,
            start.elapsed()
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let w = separation_function(3, 6).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0;
    for _ in 0..10_000 {
        let x: Vec<u32> = (0..36).map(|_| rng.gen_range(0..3)).collect();
        worst = worst.max(local_sensitivity(&w.function, &x).map_err(err)?);
    }
    let s = w.sensitivity;
    let ok = !w.report.imbalance.is_zero()
        && w.degree == 72
        && s == 12
        && s * s == 2 * w.degree
        && s * s == 18 * 8
        && 18 <= w.degree
        && w.witness_local_sensitivity == 12
        && worst <= 12
        && start.elapsed() < Duration::from_secs(10);
    ensure(
        ok,
        format!(
            "deg={} s={s} witness s_x={} max sampled s_x={worst}, {:?}",
            w.degree,
            w.witness_local_sensitivity,
            start.elapsed()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (m, n) in [(3u32, 3usize), (3, 4), (4, 3)] {
        for _ in 0..1000 {
            let classes: Vec<u32> = (0..(m as usize).pow(n as u32))
                .map(|_| rng.gen_range(0..m))
                .collect();
            let (lhs, rhs) = duality_sides(m, n, &classes);
            let lib = rotation_duality_check(&VertexPartition::new(m, n, classes).map_err(err)?);
            if lhs < rhs || !lib.inequality_holds || (lib.lhs, lib.rhs) != (lhs, rhs) {
                return Err(format!("m={m} n={n}: {lhs} < {rhs} or library disagrees"));
            }
        }
    }
    for n in 1..=3 {
        for classes in cube_partitions(n) {
            let (lhs, rhs) = duality_sides(2, n, &classes);
            if lhs < rhs {
                return Err(format!("Q_{n}: {lhs} < {rhs}"));
            }
        }
    }
    Ok("3000 random partitions and all 276 cube partitions".into())
}

fn criterion_10() -> Outcome {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (m, n) in [(3u32, 2usize), (3, 3), (4, 2)] {
        let k2 = (m as usize - 1).pow(2);
        for _ in 0..100 {
            let table = (0..(m as usize).pow(n as u32))
                .map(|_| rng.gen_range(0..m))
                .collect();
            let f = MAryFunction::from_table(m, n, Alphabet::Integer, table).map_err(err)?;
            let g = relabel(&f, Alphabet::Unity);
            let (sf, sg) = (
                sensitivity(&f, &limits).map_err(err)?,
                sensitivity(&g, &limits).map_err(err)?,
            );
            let (bf, bg) = (
                block_sensitivity(&f, &limits).map_err(err)?,
                block_sensitivity(&g, &limits).map_err(err)?,
            );
            let (df, dg) = (
                degree(&f, &limits).map_err(err)?,
                degree(&g, &limits).map_err(err)?,
            );
            if sf != sg || bf != bg || df > k2 * dg || dg > k2 * df {
                return Err(format!(
                    "m={m} n={n}: s {sf}/{sg} bs {bf}/{bg} deg {df}/{dg}"
                ));
            }
        }
    }
    Ok("300 random functions: s and bs preserved, degree ratios within (m-1)^2".into())
}

/// Smallest maximum class degree over imbalanced partitions of H(2, 3), by
/// plain enumeration of all 3^9 labellings.
fn brute_strong_optimum() -> usize {
    let mut best = usize::MAX;
    for code in 0..3usize.pow(9) {
        let classes: Vec<u32> = (0..9).map(|i| (code / 3usize.pow(i) % 3) as u32).collect();
        let mut sizes = [0; 3];
        classes.iter().for_each(|&k| sizes[k as usize] += 1);
        if sizes[0] == sizes[1] && sizes[1] == sizes[2] {
            continue;
        }
        let worst = *brute_degrees(3, 2, &classes).iter().max().unwrap();
        best = best.min(worst);
    }
    best
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let limits = Limits::default();
    let task = SearchTask::new(3, 2, Constraint::Strong);
    let best = exhaustive_search(&task, &limits).map_err(err)?;
    let truth = brute_strong_optimum();
    if best.objective != truth {
        return Err(format!(
            "exhaustive {} vs brute force {truth}",
            best.objective
        ));
    }
    let (mut below, mut hits) = (0, 0);
    for seed in 0..100 {
        let mut t = task.clone();
        t.seed = seed;
        t.budget = 5_000;
        let r = anneal_search(&t, &limits).map_err(err)?;
        r.validate().map_err(err)?;
        below += (r.objective < best.objective) as usize;
        hits += (r.objective == best.objective) as usize;
    }
    ensure(
        below == 0 && hits >= 90 && start.elapsed() < Duration::from_secs(120),
        format!(
            "optimum {truth}; anneal beat it {below}x, matched {hits}/100, {:?}",
            start.elapsed()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "worked 9-point example",
            criterion_1,
            Duration::from_secs(1),
        ),
        (
            "exhaustive m=3 n=2 identities",
            criterion_2,
            Duration::from_secs(300),
        ),
        ("cube rotation equality", criterion_3, Duration::MAX),
        (
            "minimum-degree formula",
            criterion_4,
            Duration::from_secs(30),
        ),
        ("residue closed form", criterion_5, Duration::MAX),
        (
            "delta-count divisibility",
            criterion_6,
            Duration::from_secs(1),
        ),
        (
            "residue certificate p=3 n=36",
            criterion_7,
            Duration::from_secs(1),
        ),
        (
            "separation witness p=3 n=36",
            criterion_8,
            Duration::from_secs(10),
        ),
        ("rotation inequality", criterion_9, Duration::MAX),
        ("relabel invariance", criterion_10, Duration::MAX),
        ("search sanity", criterion_11, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; took {elapsed:?}, budget {budget:?}")),
            Err(d) => (false, d),
        };
        failed += !ok as usize;
        println!(
            "{} criterion {}: {name}: {detail} [{:.2}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
