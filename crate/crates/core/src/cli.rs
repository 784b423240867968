//! Command-line front end. Human-readable output is 1-based with primed
//! women (`1→2'`); JSON and CSV files stay 0-based.
//!
//! Exit codes: 0 success or stable, 1 unstable or outside the core,
//! 2 usage or parse error, 3 size limit, 4 output failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::coop::{self, BargainingModel, CORE_SEARCH_LIMIT};
use crate::error::{Error, Result};
use crate::ft;
use crate::instance::{CutVector, Instance, Matching, PQParams, RewardDist};
use crate::nt::{self, Proposer};
use crate::pq;
use crate::sweep::{self, MixedSource, RandomSource};

pub const EXIT_OK: u8 = 0;
pub const EXIT_UNSTABLE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_SIZE: u8 = 3;
pub const EXIT_OUTPUT: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "matchkit", version, about = "Stable marriage across the transferability spectrum")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance without (nt) or with (ft) reward sharing.
    Solve {
        #[arg(value_enum)]
        regime: Regime,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::Men)]
        proposer: Side,
        /// Write the matching as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check (p, q)-stability of a matching.
    Check {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        matching: PathBuf,
        #[arg(long, value_parser = unit_interval)]
        p: f64,
        #[arg(long, value_parser = unit_interval)]
        q: f64,
    },
    /// Existence frequencies over a (p, q) grid, as CSV.
    Sweep {
        #[arg(long, default_value_t = 11)]
        grid: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Size of the random half of the trial stream.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// `uniform` or `int:LO:HI`.
        #[arg(long, default_value = "uniform", value_parser = parse_dist)]
        dist: RewardDist,
        #[arg(long, value_enum, default_value_t = Stream::Mixed)]
        stream: Stream,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random instance as JSON.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "uniform", value_parser = parse_dist)]
        dist: RewardDist,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-couple instance with no (p, q)-stable matching (needs q > p).
    Counterexample {
        #[arg(long, value_parser = unit_interval)]
        p: f64,
        #[arg(long, value_parser = unit_interval)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Core membership of a matching under a bargaining model.
    Core {
        #[arg(long)]
        model: String,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        matching: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    Nt,
    Ft,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Men,
    Women,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Stream {
    /// Half random instances, half the two-couple adversarial family.
    Mixed,
    Random,
}

fn unit_interval(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

pub fn parse_dist(s: &str) -> std::result::Result<RewardDist, String> {
    if s == "uniform" || s == "uniform01" {
        return Ok(RewardDist::Uniform01);
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["int", lo, hi] => {
            let lo: i64 = lo.parse().map_err(|e| format!("{e}"))?;
            let hi: i64 = hi.parse().map_err(|e| format!("{e}"))?;
            if lo > hi {
                return Err(format!("empty range {lo}..={hi}"));
            }
            Ok(RewardDist::IntegerRange { lo, hi })
        }
        _ => Err(format!("unknown distribution {s:?}; use uniform or int:LO:HI")),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::SizeLimit { .. } => EXIT_SIZE,
        Error::NotCyclicallyMonotone(_) => EXIT_UNSTABLE,
        Error::Csv(_) => EXIT_OUTPUT,
        _ => EXIT_USAGE,
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    Instance::from_json(&fs::read_to_string(path)?)
}

fn read_matching(path: &Path, n: usize) -> Result<Matching> {
    let m = Matching::from_json(&fs::read_to_string(path)?)?;
    m.check_size(n)?;
    Ok(m)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")),
        None => writeln!(out, "{text}"),
    }
}

fn fmt_cuts(cuts: &CutVector) -> String {
    let us: Vec<String> = cuts.u.iter().enumerate().map(|(i, x)| format!("u{}={x}", i + 1)).collect();
    let vs: Vec<String> = cuts.v.iter().enumerate().map(|(j, x)| format!("v{}'={x}", j + 1)).collect();
    format!("{} {}", us.join(" "), vs.join(" "))
}

fn fmt_cycle(cycle: &[usize]) -> String {
    let labels: Vec<String> = cycle.iter().map(|c| (c + 1).to_string()).collect();
    format!("({})", labels.join(" "))
}

/// Runs one command, writing the report to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> u8 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(Failure::Output(e)) => {
            eprintln!("error: {e}");
            EXIT_OUTPUT
        }
    }
}

enum Failure {
    Engine(Error),
    Output(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Output(e)
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> std::result::Result<u8, Failure> {
    match &cli.command {
        Command::Solve {
            regime,
            instance,
            proposer,
            out: path,
        } => {
            let inst = read_instance(instance)?;
            match regime {
                Regime::Nt => solve_nt(&inst, *proposer, path.as_deref(), out),
                Regime::Ft => solve_ft(&inst, path.as_deref(), out),
            }
        }
        Command::Check {
            instance,
            matching,
            p,
            q,
        } => {
            let inst = read_instance(instance)?;
            let m = read_matching(matching, inst.n())?;
            let params = PQParams::new(*p, *q)?;
            writeln!(out, "matching: {m}")?;
            writeln!(out, "(p, q) = ({p}, {q})")?;
            match pq::find_pq_blocking_chain(&inst, &m, params)? {
                Ok(()) => {
                    writeln!(out, "stable")?;
                    Ok(EXIT_OK)
                }
                Err(w) => {
                    writeln!(
                        out,
                        "unstable: chain {} clipped gain {}",
                        fmt_cycle(&w.cycle),
                        w.clipped_gain
                    )?;
                    Ok(EXIT_UNSTABLE)
                }
            }
        }
        Command::Sweep {
            grid,
            trials,
            seed,
            n,
            dist,
            stream,
            out: path,
        } => {
            let report = match stream {
                Stream::Mixed => sweep::pq_plane_sweep(
                    &MixedSource {
                        n: *n,
                        seed: *seed,
                        dist: *dist,
                    },
                    *grid,
                    *trials,
                )?,
                Stream::Random => sweep::pq_plane_sweep(
                    &RandomSource {
                        n: *n,
                        seed: *seed,
                        dist: *dist,
                    },
                    *grid,
                    *trials,
                )?,
            };
            let csv = report.to_csv_string()?;
            match path {
                Some(p) => fs::write(p, csv)?,
                None => out.write_all(csv.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Gen {
            n,
            seed,
            dist,
            out: path,
        } => {
            let inst = Instance::random(*n, *seed, *dist)?;
            emit(out, path.as_deref(), &inst.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Counterexample { p, q, out: path } => {
            let inst = pq::counterexample_instance(*p, *q)?;
            emit(out, path.as_deref(), &inst.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Core {
            model,
            instance,
            matching,
        } => {
            let inst = read_instance(instance)?;
            let model = BargainingModel::from_name(model, &inst)?;
            let m = read_matching(matching, inst.n())?;
            core_report(&model, &inst, &m, out)
        }
    }
}

fn solve_nt(
    inst: &Instance,
    side: Side,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> std::result::Result<u8, Failure> {
    let proposer = match side {
        Side::Men => Proposer::Men,
        Side::Women => Proposer::Women,
    };
    let gs = nt::gale_shapley_with_stats(inst, proposer);
    let blocking = nt::find_fnt_blocking_pairs(inst, &gs.matching)?;
    writeln!(out, "proposer: {}", if side == Side::Men { "men" } else { "women" })?;
    writeln!(out, "matching: {}", gs.matching)?;
    writeln!(out, "proposals: {}", gs.proposals)?;
    if inst.preference_orders().ties {
        writeln!(out, "note: preference ties broken by index")?;
    }
    if blocking.is_empty() {
        writeln!(out, "blocking pairs: none")?;
    } else {
        let list: Vec<String> = blocking.iter().map(|(i, j)| format!("{}{}'", i + 1, j + 1)).collect();
        writeln!(out, "blocking pairs: {}", list.join(" "))?;
    }
    if let Some(p) = path {
        fs::write(p, format!("{}\n", gs.matching.to_json()))?;
    }
    Ok(EXIT_OK)
}

fn solve_ft(
    inst: &Instance,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> std::result::Result<u8, Failure> {
    let theta = inst.combined_rewards();
    let (m, value) = ft::optimal_assignment(&theta);
    let cuts = ft::dual_cuts(&theta, &m)?;
    let core = ft::verify_ft_core(&theta, &m, &cuts)?;
    let optimal = ft::check_optimality_of_cuts(&theta, &m, &cuts)?;
    writeln!(out, "matching: {m}")?;
    writeln!(out, "total value: {value}")?;
    writeln!(out, "dual cuts: {}", fmt_cuts(&cuts))?;
    writeln!(out, "core audit: {}", if core { "ok" } else { "FAILED" })?;
    writeln!(out, "cut optimality: {}", if optimal { "ok" } else { "FAILED" })?;
    if let Some(p) = path {
        fs::write(p, format!("{}\n", m.to_json()))?;
    }
    Ok(EXIT_OK)
}

fn core_report(
    model: &BargainingModel,
    inst: &Instance,
    m: &Matching,
    out: &mut dyn Write,
) -> std::result::Result<u8, Failure> {
    writeln!(out, "model: {model}")?;
    writeln!(out, "matching: {m}")?;
    // fnt and ft have closed-form candidates that succeed exactly when a
    // core point exists
    let candidate = match model {
        BargainingModel::Fnt => Some(coop::canonical_fnt_cuts(inst, m)?),
        BargainingModel::Ft => ft::dual_cuts(&inst.combined_rewards(), m).ok(),
        _ => None,
    };
    let decisive = matches!(model, BargainingModel::Fnt | BargainingModel::Ft);
    let found = match candidate {
        Some(c) if coop::verify_core_point(model, inst, m, &c)? => Some(c),
        _ if decisive => None,
        _ => {
            if inst.n() > CORE_SEARCH_LIMIT {
                return Err(Error::SizeLimit {
                    operation: "search_core",
                    n: inst.n(),
                    limit: CORE_SEARCH_LIMIT,
                }
                .into());
            }
            coop::search_core(model, inst, m)?
        }
    };
    match found {
        Some(cuts) => {
            writeln!(out, "core-valid: {}", fmt_cuts(&cuts))?;
            Ok(EXIT_OK)
        }
        None => {
            writeln!(out, "not in the core")?;
            Ok(EXIT_UNSTABLE)
        }
    }
}
