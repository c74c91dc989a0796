//! Command-line front end for `skein-core`.
//!
//! [`run`] parses `argv`, executes one subcommand and returns the exit code:
//! 0 on success, 1 when a checked property fails, 2 on usage or input errors.

pub mod emit;
pub mod suites;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use skein_core::cantor::{build_thread, build_thread_from_rule, GammaRule, GammaSource, GapStream};
use skein_core::gammastar::{
    brute_force_map_search, gamma_star_prefix, jump_infeasibility, recheck_trace, FamilyMember, GammaStarConfig,
    GammaStarRun, FACTORIAL_GUARD,
};
use skein_core::lipmap::{find_jumping_gap, lip_const, monotone_regularize, PLMap};
use skein_core::skein::{
    chain, isolated_point_obstruction, nearest_of_order, stability_report, DistanceSession, SkeinConfig,
    SkeinTruncation, StabilityVerdict, ThreadingSpace,
};
use skein_core::{Rational, Thread};

use suites::{SuiteResult, SUITES};

#[derive(Parser, Debug)]
#[command(name = "skein", version, about = "Exact threads, fat Cantor threads, Lipschitz maps and skeins")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Thread validation and distances
    #[command(subcommand)]
    Thread(ThreadCmd),
    /// Fat Cantor thread construction
    #[command(subcommand)]
    Cantor(CantorCmd),
    /// Piecewise maps between threads
    #[command(subcommand)]
    Lipmap(LipmapCmd),
    /// The diagonal sequence and its certificates
    #[command(subcommand)]
    Gammastar(GammastarCmd),
    /// Finite skein truncations
    #[command(subcommand)]
    Skein(SkeinCmd),
    /// Run verification suites
    Verify(VerifyArgs),
    /// Render a thread, threading space or skein as SVG or CSV
    Emit(EmitArgs),
}

#[derive(Subcommand, Debug)]
enum ThreadCmd {
    /// Print the distance between two points
    Dist {
        #[arg(long)]
        thread: PathBuf,
        #[arg(long)]
        x: Rational,
        #[arg(long)]
        y: Rational,
    },
    /// Validate and print in normal form
    Check {
        #[arg(long)]
        thread: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum CantorCmd {
    /// Place the first k gaps
    Build {
        /// JSON list of gap lengths, e.g. ["1/8","1/16"]
        #[arg(long, conflicts_with = "gamma_rule")]
        gamma: Option<String>,
        /// Named rule, e.g. half-bound
        #[arg(long)]
        gamma_rule: Option<String>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        width: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum LipmapCmd {
    /// Print the Lipschitz constant
    Lipconst {
        #[arg(long)]
        map: PathBuf,
    },
    /// Replace by a non-decreasing map with no larger constant
    Regularize {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// For each codomain gap, the support gap jumping over it
    Jumps {
        #[arg(long)]
        map: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum GammastarCmd {
    /// Compute a prefix of the diagonal sequence with its trace
    Run {
        /// Family members: thread or stream JSON files
        #[arg(long, num_args = 1..)]
        family: Vec<PathBuf>,
        /// Stream family from a named rule, one member per width
        #[arg(long)]
        stream_rule: Option<String>,
        #[arg(long, value_delimiter = ',')]
        widths: Vec<Rational>,
        #[arg(long = "K")]
        k: Rational,
        #[arg(long)]
        eps: Rational,
        #[arg(long = "k")]
        k_max: usize,
        #[arg(long, default_value_t = 512)]
        deepening_budget: usize,
        #[arg(long, default_value_t = FACTORIAL_GUARD)]
        factorial_guard: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive a run from its trace
    Recheck {
        #[arg(long)]
        run: PathBuf,
    },
    /// Jump-assignment certificate for a target thread
    Certify {
        #[arg(long)]
        target: PathBuf,
        /// JSON list or comma-separated rationals
        #[arg(long, conflicts_with = "run")]
        budgets: Option<String>,
        /// Take the budgets from a run file
        #[arg(long)]
        run: Option<PathBuf>,
        #[arg(long = "K")]
        k: Rational,
        /// Number of longest target gaps to analyze (default: all)
        #[arg(long)]
        m: Option<usize>,
    },
    /// Exhaustive monotone map search on grid samplings
    Brute {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long = "K")]
        k: Rational,
        #[arg(long)]
        grid: Rational,
    },
}

#[derive(Subcommand, Debug)]
enum SkeinCmd {
    /// Build a truncation
    Build {
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        gammas: usize,
        #[arg(long)]
        grid: Rational,
        #[arg(long, default_value_t = 3)]
        gaps: usize,
        #[arg(long)]
        pair_limit: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance between two addresses
    Dist {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Stability of the order-beta ancestor map on every in-ball pair
    Verify {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        beta: usize,
    },
    /// A chain with steps of at most 1/2
    Chain {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Obstruction recipe for an isolated member of a point set
    Obstruction {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_delimiter = ';')]
        set: Vec<String>,
        #[arg(long)]
        p: String,
        #[arg(long = "K")]
        k: Rational,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run every suite
    #[arg(long, required_unless_present = "suite")]
    all: bool,
    /// Run the named suites only
    #[arg(long, conflicts_with = "all")]
    suite: Vec<String>,
    #[arg(long)]
    seed: u64,
    /// Include wall-clock timings (makes the report non-reproducible)
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("format").required(true).args(["svg", "csv"]))]
struct EmitArgs {
    #[arg(long)]
    svg: bool,
    #[arg(long)]
    csv: bool,
    /// Thread, threading-space or skein JSON
    #[arg(long)]
    input: PathBuf,
    /// Sampling step for thread CSV
    #[arg(long)]
    grid: Option<Rational>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

enum Outcome {
    Ok,
    PropertyFailed,
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    run_with(argv, &mut stdout.lock())
}

/// [`run`] with standard output redirected to `out`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command, out) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::PropertyFailed) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_input(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Write to `path`, or to `out` when no path is given.
fn deliver(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn line(out: &mut dyn Write, s: impl std::fmt::Display) -> Result<()> {
    Ok(writeln!(out, "{s}")?)
}

fn parse_rationals(s: &str) -> Result<Vec<Rational>> {
    let t = s.trim();
    if t.starts_with('[') {
        return Ok(serde_json::from_str(t)?);
    }
    t.split(',').filter(|x| !x.trim().is_empty()).map(|x| Ok(x.trim().parse()?)).collect()
}

fn rule(name: &str) -> Result<GammaRule> {
    GammaRule::preset(name).ok_or_else(|| anyhow!("unknown gamma rule {name:?}"))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<Outcome> {
    match cmd {
        Command::Thread(c) => thread_cmd(c, out),
        Command::Cantor(c) => cantor_cmd(c, out),
        Command::Lipmap(c) => lipmap_cmd(c, out),
        Command::Gammastar(c) => gammastar_cmd(c, out),
        Command::Skein(c) => skein_cmd(c, out),
        Command::Verify(a) => verify_cmd(a, out),
        Command::Emit(a) => emit_cmd(a, out),
    }
}

fn thread_cmd(c: ThreadCmd, out: &mut dyn Write) -> Result<Outcome> {
    match c {
        ThreadCmd::Dist { thread, x, y } => {
            let t: Thread = load(&thread)?;
            line(out, t.distance_checked(&x, &y)?)?;
        }
        ThreadCmd::Check { thread } => {
            let t: Thread = load(&thread)?;
            deliver(&to_json(&t)?, None, out)?;
        }
    }
    Ok(Outcome::Ok)
}

fn cantor_cmd(c: CantorCmd, out: &mut dyn Write) -> Result<Outcome> {
    let CantorCmd::Build { gamma, gamma_rule, k, width, out: path } = c;
    let thread = match (gamma, gamma_rule) {
        (Some(g), None) => build_thread(&parse_rationals(&g)?, k, width)?,
        (None, Some(r)) => build_thread_from_rule(&rule(&r)?, k, width)?,
        _ => bail!("give exactly one of --gamma and --gamma-rule"),
    };
    deliver(&to_json(&thread)?, path.as_deref(), out)?;
    Ok(Outcome::Ok)
}

fn lipmap_cmd(c: LipmapCmd, out: &mut dyn Write) -> Result<Outcome> {
    match c {
        LipmapCmd::Lipconst { map } => {
            let f: PLMap = load(&map)?;
            line(out, lip_const(&f))?;
        }
        LipmapCmd::Regularize { map, out: path } => {
            let f: PLMap = load(&map)?;
            deliver(&to_json(&monotone_regularize(&f)?)?, path.as_deref(), out)?;
        }
        LipmapCmd::Jumps { map } => {
            let f: PLMap = load(&map)?;
            let jumps = f
                .codomain()
                .gaps()
                .iter()
                .map(|cs| Ok(json!({"codomain_gap": cs, "source_gap": find_jumping_gap(&f, cs)?})))
                .collect::<Result<Vec<Value>>>()?;
            deliver(&to_json(&jumps)?, None, out)?;
        }
    }
    Ok(Outcome::Ok)
}

/// A family file holds either a bare thread or a tagged family member.
fn load_member(path: &Path) -> Result<FamilyMember> {
    let v: Value = serde_json::from_str(&read_input(path)?)?;
    if v.get("kind").is_some() {
        return Ok(serde_json::from_value(v)?);
    }
    Ok(FamilyMember::Fixed { thread: serde_json::from_value(v)? })
}

fn gammastar_cmd(c: GammastarCmd, out: &mut dyn Write) -> Result<Outcome> {
    match c {
        GammastarCmd::Run { family, stream_rule, widths, k, eps, k_max, deepening_budget, factorial_guard, out: path } => {
            let mut members = family.iter().map(|p| load_member(p)).collect::<Result<Vec<_>>>()?;
            if let Some(r) = stream_rule {
                let r = rule(&r)?;
                for w in widths {
                    members.push(FamilyMember::stream(GapStream::new(GammaSource::Rule(r.clone()))?, w));
                }
            }
            let cfg = GammaStarConfig { k, eps, k_max, deepening_budget, factorial_guard };
            let run = gamma_star_prefix(&members, &cfg)?;
            deliver(&to_json(&run)?, path.as_deref(), out)?;
        }
        GammastarCmd::Recheck { run } => {
            let r: GammaStarRun = load(&run)?;
            return Ok(match recheck_trace(&r) {
                Ok(()) => {
                    line(out, "ACCEPT")?;
                    Outcome::Ok
                }
                Err(e) => {
                    line(out, format!("REJECT: {e}"))?;
                    Outcome::PropertyFailed
                }
            });
        }
        GammastarCmd::Certify { target, budgets, run, k, m } => {
            let t: Thread = load(&target)?;
            let budgets = match (budgets, run) {
                (Some(b), None) => parse_rationals(&b)?,
                (None, Some(r)) => load::<GammaStarRun>(&r)?.gammas,
                _ => bail!("give exactly one of --budgets and --run"),
            };
            let m = m.unwrap_or(t.gaps().len());
            deliver(&to_json(&jump_infeasibility(&t, &budgets, &k, m)?)?, None, out)?;
        }
        GammastarCmd::Brute { source, target, k, grid } => {
            let (s, t): (Thread, Thread) = (load(&source)?, load(&target)?);
            let result = match brute_force_map_search(&s, &t, &k, &grid)? {
                Some(f) => json!({"result": "FOUND", "map": f}),
                None => json!({"result": "NONE"}),
            };
            deliver(&to_json(&result)?, None, out)?;
        }
    }
    Ok(Outcome::Ok)
}

fn skein_cmd(c: SkeinCmd, out: &mut dyn Write) -> Result<Outcome> {
    match c {
        SkeinCmd::Build { depth, gammas, grid, gaps, pair_limit, out: path } => {
            let cfg = SkeinConfig { depth, gammas, grid, gaps_per_thread: gaps, pair_limit };
            deliver(&to_json(&SkeinTruncation::build(cfg)?)?, path.as_deref(), out)?;
        }
        SkeinCmd::Dist { space, p, q } => {
            let tr: SkeinTruncation = load(&space)?;
            line(out, DistanceSession::new(&tr).distance_by_address(&p, &q)?)?;
        }
        SkeinCmd::Verify { space, beta } => {
            let tr: SkeinTruncation = load(&space)?;
            let mut s = DistanceSession::new(&tr);
            let ball: Vec<usize> =
                (0..tr.len()).filter(|&p| nearest_of_order(&mut s, p, beta).0 < skein_core::q(1, 8)).collect();
            let pairs: Vec<(usize, usize)> = ball.iter().flat_map(|&p| ball.iter().map(move |&r| (p, r))).collect();
            let verdict = stability_report(&mut s, beta, &pairs)?;
            deliver(&to_json(&verdict)?, None, out)?;
            if !matches!(verdict, StabilityVerdict::Accept { .. }) {
                return Ok(Outcome::PropertyFailed);
            }
        }
        SkeinCmd::Chain { space, p, q } => {
            let tr: SkeinTruncation = load(&space)?;
            let (p, q) = (tr.lookup(&p)?, tr.lookup(&q)?);
            let mut s = DistanceSession::new(&tr);
            let c = chain(&mut s, p, q);
            let steps: Vec<Value> = c
                .iter()
                .enumerate()
                .map(|(i, &id)| {
                    let d = if i == 0 { Rational::zero() } else { s.distance(c[i - 1], id) };
                    json!({"point": tr.address(id), "step": d})
                })
                .collect();
            deliver(&to_json(&steps)?, None, out)?;
        }
        SkeinCmd::Obstruction { space, set, p, k } => {
            let tr: SkeinTruncation = load(&space)?;
            let ids = set.iter().map(|a| Ok(tr.lookup(a)?)).collect::<Result<Vec<_>>>()?;
            let p = tr.lookup(&p)?;
            let recipe = isolated_point_obstruction(&mut DistanceSession::new(&tr), &ids, p, &k)?;
            deliver(&to_json(&recipe)?, None, out)?;
        }
    }
    Ok(Outcome::Ok)
}

/// Run the selected suites; timings are only recorded when asked for.
pub fn verify(names: Option<&[String]>, seed: u64, timings: bool) -> Result<VerificationReport> {
    let selected: Vec<_> = match names {
        None => SUITES.to_vec(),
        Some(ns) => ns
            .iter()
            .map(|n| SUITES.iter().find(|(s, _)| s == n).copied().ok_or_else(|| anyhow!("unknown suite {n:?}")))
            .collect::<Result<_>>()?,
    };
    let mut results = Vec::new();
    for (_, suite) in selected {
        let start = Instant::now();
        let mut r = suite(seed);
        if timings {
            r.millis = Some(start.elapsed().as_millis() as u64);
        }
        results.push(r);
    }
    Ok(VerificationReport { seed, passed: results.iter().all(|r| r.passed), suites: results })
}

fn verify_cmd(a: VerifyArgs, out: &mut dyn Write) -> Result<Outcome> {
    let names = (!a.all).then_some(a.suite.as_slice());
    let report = verify(names, a.seed, a.timings)?;
    deliver(&to_json(&report)?, a.out.as_deref(), out)?;
    for r in &report.suites {
        eprintln!("{:<18} {}", r.name, if r.passed { "PASS" } else { "FAIL" });
    }
    Ok(if report.passed { Outcome::Ok } else { Outcome::PropertyFailed })
}

fn emit_cmd(a: EmitArgs, out: &mut dyn Write) -> Result<Outcome> {
    let v: Value = serde_json::from_str(&read_input(&a.input)?)?;
    let text = if v.get("registry").is_some() || v.get("expanded").is_some() {
        let tr: SkeinTruncation = serde_json::from_value(v)?;
        if a.svg { emit::skein_svg(&tr) } else { emit::skein_csv(&tr)? }
    } else if v.get("threads").is_some() {
        let ts: ThreadingSpace = serde_json::from_value(v)?;
        if a.csv {
            bail!("CSV output is available for threads and skeins");
        }
        emit::threading_svg(&ts)
    } else {
        let t: Thread = serde_json::from_value(v)?;
        if a.svg {
            emit::thread_svg(&t)
        } else {
            emit::thread_csv(&t, &a.grid.unwrap_or_else(|| skein_core::q(1, 16)))?
        }
    };
    deliver(&text, a.out.as_deref(), out)?;
    Ok(Outcome::Ok)
}
