//! Command-line front end: construction, verification, extremal search,
//! trace replay, and seeded experiments, with scriptable output.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage
//! or parse error, 3 resource guard tripped. `SIDONKIT_MAX_PAIRS`
//! overrides the default work cap; `--threads` fixes the worker count
//! (outputs do not depend on it).

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sidonkit::certify::{ell, structural_trace};
use sidonkit::construct::{construct_normalized, count_non_b_ell, k2_paper_family};
use sidonkit::experiment::{
    expectation_x, run_experiment, write_csv, ExperimentConfig,
};
use sidonkit::extremal::{exact_max_sidon, greedy_sidon, GreedyOrder, SearchLimits};
use sidonkit::systems::{find_nontrivial_h_tuples, find_nontrivial_quadruples};
use sidonkit::{DetectOptions, Error, Family, KSet};

#[derive(Parser)]
#[command(name = "sidonkit", version, about = "Sidon and B_h systems of integer sets: construction, verification, search, and experiments")]
struct Cli {
    /// Worker thread count; defaults to all cores. Results are identical
    /// for every value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the filtration level and its j-sequence as JSON.
    Ell {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        h: u32,
    },
    /// Check a family file for nontrivial additive tuples.
    Verify {
        /// Family file: one comma-separated increasing set per line.
        #[arg(long)]
        input: PathBuf,
        /// Fold count; when given, the verdict is reported as BH/NOT_BH.
        #[arg(long)]
        h: Option<u32>,
        /// Also print the first witness tuple as JSON.
        #[arg(long)]
        witness: bool,
    },
    /// Build the filtered family of normalized k-sets.
    Construct {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        h: u32,
        /// Print the single-line summary n,k,h,ell,classes,kept,removed
        /// instead of the family text on stdout.
        #[arg(long)]
        stats: bool,
        /// Write the family text here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count normalized classes failing the B_ell test.
    CountNonbl {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        ell: u32,
    },
    /// Exact (or greedy) maximum B_h-system search on a small ground set.
    Extremal {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        h: u32,
        /// Node budget for the exact search.
        #[arg(long)]
        budget: Option<u64>,
        /// Skip the ground-set size guard.
        #[arg(long)]
        force: bool,
        /// Run the greedy scan instead of the exact search.
        #[arg(long)]
        greedy: bool,
        /// Greedy scan order.
        #[arg(long, value_enum, default_value_t = OrderArg::Lex)]
        order: OrderArg,
        /// Seed for --order random.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run seeded trials and emit one CSV row per trial.
    Simulate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        h: u32,
        /// Per-set inclusion probability.
        #[arg(long)]
        p: Option<f64>,
        /// Shorthand for p = c/n.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Tuple-count ceiling for per-trial verification.
        #[arg(long)]
        verify_cap: Option<u128>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact and bracketed expected represented-class counts.
    Expectation {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: f64,
    },
    /// Evaluate the literal two-term-sumset family and verify it.
    K2Family {
        #[arg(long)]
        n: u64,
    },
    /// Replay the pair-recovery argument on one quadruple.
    Trace {
        /// Comma-separated increasing integers, e.g. 0,1,9.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        d: String,
        #[arg(long, default_value_t = 2)]
        h: u32,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Lex,
    Random,
}

const USAGE_EXIT: u8 = 2;
const GUARD_EXIT: u8 = 3;

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::ResourceGuard { .. } | Error::InstanceTooLarge { .. } => GUARD_EXIT,
        _ => USAGE_EXIT,
    }
}

/// Work cap for detection and enumeration, overridable via environment.
fn work_cap() -> Result<u128, Error> {
    match std::env::var("SIDONKIT_MAX_PAIRS") {
        Ok(raw) => raw.parse().map_err(|_| {
            Error::Domain(format!("SIDONKIT_MAX_PAIRS must be an integer; got {raw:?}"))
        }),
        Err(_) => Ok(sidonkit::DEFAULT_WORK_CAP),
    }
}

fn render_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data types serialize")
}

fn parse_set(label: &str, raw: &str) -> Result<KSet, Error> {
    let elements = raw
        .split(',')
        .map(|piece| {
            piece.trim().parse::<i64>().map_err(|_| {
                Error::Domain(format!("set {label}: {piece:?} is not an integer"))
            })
        })
        .collect::<Result<Vec<i64>, Error>>()?;
    KSet::new(elements)
        .map_err(|e| Error::Domain(format!("set {label}: {e}")))
}

fn write_family(family: &Family, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, family.to_text())?,
        None => print!("{}", family.to_text()),
    }
    Ok(())
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Ell { k, h } => {
            let params = ell(k, h)?;
            // Built by hand so arbitrarily large j values stay plain JSON
            // numbers.
            println!(
                "{{\"k\":{},\"h\":{},\"ell\":{},\"j\":[{}]}}",
                params.k,
                params.h,
                params.ell,
                params.j_sequence_decimal().join(",")
            );
            Ok(0)
        }
        Command::Verify { input, h, witness } => {
            let family = Family::from_text(&fs::read_to_string(&input)?)?;
            let opts = DetectOptions {
                cap: work_cap()?,
                limit: Some(1),
            };
            let found = match h {
                Some(h) => find_nontrivial_h_tuples(&family, h, opts)?,
                None => find_nontrivial_quadruples(&family, opts)?,
            };
            let verdict = match (h.is_some(), found.is_empty()) {
                (false, true) => "SIDON",
                (false, false) => "NOT_SIDON",
                (true, true) => "BH",
                (true, false) => "NOT_BH",
            };
            println!("{verdict}");
            if witness {
                if let Some(tuple) = found.first() {
                    println!("{}", render_json(tuple));
                }
            }
            Ok(if found.is_empty() { 0 } else { 1 })
        }
        Command::Construct {
            n,
            k,
            h,
            stats,
            out,
        } => {
            let (family, summary) = construct_normalized(n, k, h, work_cap()?)?;
            if let Some(path) = &out {
                write_family(&family, Some(path))?;
            }
            if stats {
                println!(
                    "{},{},{},{},{},{},{}",
                    summary.n,
                    summary.k,
                    summary.h,
                    summary.ell,
                    summary.classes,
                    summary.kept,
                    summary.removed
                );
            } else if out.is_none() {
                write_family(&family, None)?;
            }
            Ok(0)
        }
        Command::CountNonbl { n, k, ell } => {
            println!("{}", count_non_b_ell(n, k, ell, work_cap()?)?);
            Ok(0)
        }
        Command::Extremal {
            n,
            k,
            h,
            budget,
            force,
            greedy,
            order,
            seed,
        } => {
            if greedy {
                let order = match (order, seed) {
                    (OrderArg::Lex, _) => GreedyOrder::Lexicographic,
                    (OrderArg::Random, Some(seed)) => GreedyOrder::Random { seed },
                    (OrderArg::Random, None) => {
                        return Err(Error::Domain(
                            "--order random requires --seed".into(),
                        ))
                    }
                };
                let family = greedy_sidon(n, k, h, order)?;
                print!("{}", family.to_text());
                return Ok(0);
            }
            let mut limits = SearchLimits::default();
            if let Some(budget) = budget {
                limits.node_budget = budget;
            }
            if force {
                limits.max_ground_sets = u64::MAX;
            }
            let outcome = exact_max_sidon(n, k, h, limits)?;
            println!("{}", render_json(&outcome));
            Ok(0)
        }
        Command::Simulate {
            n,
            k,
            h,
            p,
            c,
            delta,
            gamma,
            trials,
            seed,
            verify_cap,
            out,
        } => {
            let p = match (p, c) {
                (Some(p), None) => p,
                (None, Some(c)) => c / n as f64,
                _ => {
                    return Err(Error::Domain(
                        "exactly one of --p and --c is required".into(),
                    ))
                }
            };
            let config = ExperimentConfig {
                n,
                k,
                h,
                p,
                delta,
                gamma,
                trials,
                seed,
                verify_cap: match verify_cap {
                    Some(cap) => cap,
                    None => work_cap()?,
                },
            };
            let records = run_experiment(&config)?;
            match out {
                Some(path) => {
                    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
                    write_csv(&records, &mut file)?;
                    file.flush()?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    write_csv(&records, &mut lock)?;
                }
            }
            Ok(0)
        }
        Command::Expectation { n, k, p } => {
            let bracket = expectation_x(n, k, p)?;
            println!(
                "lower={} exact={} upper={}",
                bracket.lower, bracket.exact, bracket.upper
            );
            Ok(0)
        }
        Command::K2Family { n } => {
            let report = k2_paper_family(n, work_cap()?)?;
            println!("{}", render_json(&report));
            Ok(if report.is_sidon { 0 } else { 1 })
        }
        Command::Trace { a, b, c, d, h } => {
            let a = parse_set("a", &a)?;
            let b = parse_set("b", &b)?;
            let c = parse_set("c", &c)?;
            let d = parse_set("d", &d)?;
            let report = structural_trace(&a, &b, &c, &d, h)?;
            println!("{}", render_json(&report));
            Ok(match report.verdict {
                sidonkit::TraceVerdict::PairsEqual => 0,
                _ => 1,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_EXIT);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}
