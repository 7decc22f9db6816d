//! The `msens` command line.
//!
//! Exit codes: 0 success, 1 validation failure or bad arguments, 2 capacity
//! exceeded, 3 I/O or parse error. Relative output paths are resolved against
//! `MSENS_OUT_DIR` when it is set.

pub mod config;
pub mod verify;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use msens_core::construction::{class_residue_counts, BlockPartition};
use msens_core::formats::{parse_mfun, parse_mpart, write_mpart, write_polynomial};
use msens_core::partitions::{degree_stats, imbalance, rotation_duality_check};
use msens_core::representation::{bounds_report, interpolate};
use msens_core::search::{anneal_search, exhaustive_search, tabulate, Schedule};
use msens_core::{Alphabet, Constraint, Error, MAryFunction, Result, SearchTask};

use config::Config;
use verify::{run_suite, SuiteOptions, SUITES};

pub const OUT_DIR_ENV: &str = "MSENS_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "msens",
    version,
    about = "Exact sensitivity, block sensitivity and degree of m-ary functions"
)]
struct Cli {
    /// key=value configuration file (max_dense, max_bitmask_n, enumeration_budget, seed, verbosity)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel sections
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    max_dense: Option<u64>,
    #[arg(long, global = true)]
    max_bitmask_n: Option<usize>,
    #[arg(long, global = true)]
    enumeration_budget: Option<u64>,
    /// Seed for every randomized step
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    verbosity: Option<u8>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sensitivity, block sensitivity, degree and the bounds relating them
    Analyze {
        file: PathBuf,
        /// Alphabet used when the input is a partition (.mpart)
        #[arg(long, default_value = "unity")]
        alphabet: Alphabet,
    },
    /// Print the unique interpolating polynomial
    Interpolate {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-class degree statistics, imbalance and the rotation inequality
    PartitionStats { file: PathBuf },
    /// Apply the rotation map
    Rotate {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residue counts and certificate for the block-filter construction
    Cfgs {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated block sizes on consecutive coordinates (default: sqrt(n) blocks of sqrt(n))
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run self-check suites
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Search for partitions with small maximum class degree
    Search {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "strong")]
        constraint: Constraint,
        /// Moves per annealing chain
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        chains: usize,
        /// Enumerate every partition instead of annealing
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = Schedule::default().start)]
        start_temperature: f64,
        #[arg(long, default_value_t = Schedule::default().decay)]
        decay: f64,
        #[arg(long, default_value_t = Schedule::default().floor)]
        floor: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::InvariantViolated(_) => 1,
        Error::CapacityExceeded { .. } => 2,
        Error::Io(_) | Error::Parse { .. } => 3,
    }
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = effective_config(&cli).and_then(|config| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| dispatch(&cli.command, &config))
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Attaches the file name to parse errors.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

fn effective_config(cli: &Cli) -> Result<Config> {
    let mut config = match &cli.config {
        Some(path) => in_file(path, Config::parse(&read(path)?))?,
        None => Config::default(),
    };
    let overrides = [
        ("max_dense", cli.max_dense.map(|v| v.to_string())),
        ("max_bitmask_n", cli.max_bitmask_n.map(|v| v.to_string())),
        (
            "enumeration_budget",
            cli.enumeration_budget.map(|v| v.to_string()),
        ),
        ("seed", cli.seed.map(|v| v.to_string())),
        ("verbosity", cli.verbosity.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            config.set(key, &v).map_err(Error::InvalidParameter)?;
        }
    }
    Ok(config)
}

pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(path: Option<&Path>, content: &str, config: &Config) -> Result<()> {
    match path {
        None => print!("{content}"),
        Some(p) => {
            let target = resolve_output(p);
            if let Some(parent) = target.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| Error::Io(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&target, content)
                .map_err(|e| Error::Io(format!("{}: {e}", target.display())))?;
            if config.verbosity > 0 {
                eprintln!("wrote {}", target.display());
            }
        }
    }
    Ok(())
}

fn header(command: &str, config: &Config) -> String {
    format!("# msens {command}\n# config {config}\n")
}

fn holds(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "FAILS"
    }
}

/// Reads a function from `.mfun`, or from `.mpart` with the given alphabet.
fn load_function(path: &Path, alphabet: Alphabet, config: &Config) -> Result<MAryFunction> {
    let text = read(path)?;
    let is_partition = text
        .lines()
        .map(str::trim_start)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with("mpart"));
    if is_partition {
        Ok(in_file(path, parse_mpart(&text, &config.limits))?.to_function(alphabet))
    } else {
        in_file(path, parse_mfun(&text, &config.limits))
    }
}

fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn dispatch(command: &Command, config: &Config) -> Result<i32> {
    match command {
        Command::Analyze { file, alphabet } => {
            let f = load_function(file, *alphabet, config)?;
            let r = bounds_report(&f, &config.limits)?;
            let mut out = header(&format!("analyze {}", file.display()), config);
            let _ = writeln!(
                out,
                "s={} bs={} deg={}",
                r.sensitivity, r.block_sensitivity, r.degree
            );
            let _ = writeln!(out, "m={} n={} alphabet={}", f.m(), f.n(), f.alphabet());
            let _ = writeln!(out, "chain s/(m-1) <= bs <= n: {}", holds(r.chain_holds));
            let _ = writeln!(
                out,
                "s <= 2(m-1)^3 deg^2: {}",
                holds(r.sensitivity_bound_holds)
            );
            let _ = writeln!(out, "2(m-1)^2 deg^2 >= bs: {}", holds(r.degree_bound_holds));
            print!("{out}");
            Ok(if r.all_hold() { 0 } else { 1 })
        }
        Command::Interpolate { file, out } => {
            let f = load_function(file, Alphabet::Unity, config)?;
            let p = interpolate(&f, &config.limits)?;
            let text = format!(
                "# msens interpolate {}\n# degree {}\n{}",
                file.display(),
                p.degree(),
                write_polynomial(&p)
            );
            emit(out.as_deref(), &text, config)?;
            Ok(0)
        }
        Command::PartitionStats { file } => {
            let p = in_file(file, parse_mpart(&read(file)?, &config.limits))?;
            let stats = degree_stats(&p);
            let mut rows = vec![vec![
                "class".into(),
                "size".into(),
                "min_degree".into(),
                "max_degree".into(),
            ]];
            for (k, c) in stats.classes.iter().enumerate() {
                rows.push(vec![
                    k.to_string(),
                    c.size.to_string(),
                    c.min_degree.to_string(),
                    c.max_degree.to_string(),
                ]);
            }
            let duality = rotation_duality_check(&p);
            let mut out = header(&format!("partition-stats {}", file.display()), config);
            out.push_str(&align(&rows));
            let _ = writeln!(
                out,
                "min_degree={} max_degree={}",
                stats.min_degree(),
                stats.max_degree()
            );
            let _ = writeln!(out, "sensitivity={}", stats.sensitivity_value());
            let _ = writeln!(out, "imbalance={}", imbalance(&p, false));
            let _ = writeln!(out, "rotated_imbalance={}", imbalance(&p, true));
            let equality = match duality.equality_holds {
                Some(b) => holds(b),
                None => "n/a",
            };
            let _ = writeln!(
                out,
                "rotation lhs={} rhs={} inequality={} equality={equality}",
                duality.lhs,
                duality.rhs,
                holds(duality.inequality_holds)
            );
            print!("{out}");
            Ok(if duality.holds() { 0 } else { 1 })
        }
        Command::Rotate { file, times, out } => {
            let p = in_file(file, parse_mpart(&read(file)?, &config.limits))?;
            emit(
                out.as_deref(),
                &write_mpart(&p.rotate_times(*times)),
                config,
            )?;
            Ok(0)
        }
        Command::Cfgs {
            m,
            n,
            blocks,
            report,
        } => {
            let sizes: Vec<usize> = match (blocks, n) {
                (Some(spec), _) => spec
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidParameter(format!("bad --blocks '{spec}'")))?,
                (None, Some(n)) => {
                    let root = (*n as f64).sqrt().round() as usize;
                    if root * root != *n {
                        return Err(Error::InvalidParameter(format!(
                            "n = {n} is not a perfect square; pass --blocks"
                        )));
                    }
                    vec![root; root]
                }
                (None, None) => return Err(Error::InvalidParameter("pass --n or --blocks".into())),
            };
            let bp = BlockPartition::consecutive(&sizes)?;
            if let Some(n) = n.filter(|&n| n != bp.n()) {
                return Err(Error::InvalidParameter(format!(
                    "block sizes sum to {}, but --n is {n}",
                    bp.n()
                )));
            }
            let text = cfgs_report(&bp, *m, config)?;
            emit(report.as_deref(), &text, config)?;
            Ok(0)
        }
        Command::Verify { suite, m, n } => {
            let opts = SuiteOptions {
                limits: config.limits,
                seed: config.seed,
                m: *m,
                n: *n,
            };
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            print!("{}", header(&format!("verify {suite}"), config));
            let mut failed = 0;
            for name in names {
                let t = Instant::now();
                let checks = run_suite(name, &opts)?;
                let ok = checks.iter().all(|c| c.pass);
                failed += !ok as usize;
                for c in &checks {
                    if config.verbosity > 0 || !c.pass {
                        println!(
                            "  {} {name}: {} ({})",
                            if c.pass { "pass" } else { "FAIL" },
                            c.name,
                            c.detail
                        );
                    }
                }
                println!(
                    "{} {name} [{:.2}s]",
                    if ok { "PASS" } else { "FAIL" },
                    t.elapsed().as_secs_f64()
                );
            }
            Ok(if failed == 0 { 0 } else { 1 })
        }
        Command::Search {
            m,
            n,
            constraint,
            budget,
            chains,
            exhaustive,
            start_temperature,
            decay,
            floor,
            out,
        } => {
            let task = SearchTask {
                m: *m,
                n: *n,
                constraint: *constraint,
                budget: *budget,
                seed: config.seed,
                chains: *chains,
                schedule: Schedule {
                    start: *start_temperature,
                    decay: *decay,
                    floor: *floor,
                },
            };
            let result = if *exhaustive {
                exhaustive_search(&task, &config.limits)?
            } else {
                anneal_search(&task, &config.limits)?
            };
            result.validate()?;
            let mut text = header("search", config);
            let _ = writeln!(
                text,
                "# task m={} n={} constraint={} method={} budget={} seed={} chains={} start={} decay={} floor={}",
                task.m,
                task.n,
                task.constraint,
                if *exhaustive { "exhaustive" } else { "anneal" },
                task.budget,
                task.seed,
                task.chains,
                task.schedule.start,
                task.schedule.decay,
                task.schedule.floor
            );
            let trace: Vec<String> = result
                .trace
                .iter()
                .map(|(s, v)| format!("{s}:{v}"))
                .collect();
            let mut cert = String::new();
            let _ = writeln!(cert, "[certificate]");
            let _ = writeln!(cert, "max_degree={}", result.objective);
            let _ = writeln!(cert, "class_sizes={:?}", result.partition.class_sizes());
            let _ = writeln!(cert, "imbalance={}", result.certificate);
            let _ = writeln!(cert, "constraint={} {}", task.constraint, holds(true));
            let _ = writeln!(cert, "trace={}", trace.join(" "));
            text.push_str(&cert);
            text.push_str(&tabulate(std::slice::from_ref(&result)));
            let mpart = write_mpart(&result.partition);
            match out {
                Some(path) => {
                    let commented: String = text
                        .lines()
                        .map(|l| format!("# {}\n", l.trim_start_matches("# ")))
                        .collect();
                    emit(Some(path), &format!("{commented}{mpart}"), config)?;
                    print!("{text}");
                }
                None => print!("{text}{mpart}"),
            }
            Ok(0)
        }
    }
}

fn cfgs_report(bp: &BlockPartition, m: u32, config: &Config) -> Result<String> {
    let r = class_residue_counts(bp, m)?;
    let sizes: Vec<String> = r.block_sizes.iter().map(usize::to_string).collect();
    let mut out = header("cfgs", config);
    let _ = writeln!(
        out,
        "m={m} n={} blocks={} prime={}",
        r.n,
        sizes.join(","),
        if r.m_is_prime {
            "yes"
        } else {
            "no (proof items informational only)"
        }
    );
    let mut rows = vec![vec![
        "class".to_string(),
        "min_degree".into(),
        "size".into(),
        "rotated_size".into(),
    ]];
    for j in 0..m as usize {
        rows.push(vec![
            j.to_string(),
            r.formula.per_class[j].to_string(),
            r.class_sizes[j].to_string(),
            r.rotated_sizes[j].to_string(),
        ]);
    }
    out.push_str(&align(&rows));
    let _ = writeln!(out, "sensitivity={}", r.formula.sensitivity_value);
    let _ = writeln!(out, "headline={}", r.formula.headline);
    let _ = writeln!(out, "rotated_imbalance={}", r.imbalance);
    match r.certified_degree() {
        Some(d) => {
            let _ = writeln!(out, "degree_certificate={d}");
        }
        None => {
            let _ = writeln!(out, "degree_certificate=none");
        }
    }
    if let Some(items) = &r.items {
        let _ = writeln!(
            out,
            "top_difference={} {}",
            items.top_difference,
            holds(items.top_holds())
        );
        let _ = writeln!(
            out,
            "bottom_difference={} {}",
            items.bottom_difference,
            holds(items.bottom_holds())
        );
        let _ = writeln!(
            out,
            "middle_counts_divisible={}",
            holds(items.middle_divisible)
        );
        let _ = writeln!(
            out,
            "rotated_sizes_differ={}",
            holds(items.rotated_sizes_differ)
        );
    }
    let _ = writeln!(out, "[counts]");
    for (s, row) in r.counts.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let _ = writeln!(out, "counts[{s}][{j}] = {c}");
        }
    }
    Ok(out)
}
