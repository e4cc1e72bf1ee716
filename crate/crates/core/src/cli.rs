//! The `unigen` command-line driver.
//!
//! Every command prints one canonical JSON report on stdout and returns a
//! process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure |
//! | 2 | parse error or invalid input |
//! | 3 | generators do not generate the algebra |
//! | 4 | chart solve failed |
//! | 5 | net coverage not reached |
//! | 6 | nonnegative lifting budget exhausted |
//! | 7 | `verify` mismatch |

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{bracket_closure, ClosureConfig, GeneratorSet};
use crate::chart::SolverConfig;
use crate::completion::{complete_basis, rk_schedule, CompletedBasis, CompletionConfig};
use crate::demos::{demo, DEMO_NAMES};
use crate::error::{Error, Result};
use crate::io::{read_json, to_canonical_string, write_json, BasisFile, NetFile, ProblemFile, TargetFile, WordFile};
use crate::lift::{lift_word_nonneg, RecurrenceConfig};
use crate::matrix::{mat_distance, Tolerances};
use crate::net::{build_net, synthesize_batch, CoverNet, NetConfig};
use crate::word::{group_of, replay};

/// Exit code of a failed `verify`.
pub const EXIT_VERIFY_MISMATCH: i32 = 7;

/// Relative slack allowed by `verify` on the stated error.
pub const VERIFY_RELATIVE_SLACK: f64 = 1.1;
/// Absolute slack allowed by `verify`, for words whose stated error is zero.
pub const VERIFY_ABSOLUTE_SLACK: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "unigen", version, about = "Bounded-length words over Lie group generators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether the generators span their Lie algebra under brackets.
    Validate {
        problem: PathBuf,
        /// Expected algebra dimension; overrides the problem file.
        #[arg(long)]
        expected: Option<usize>,
    },
    /// Print the conjugation-length schedule and the word-length bound.
    Bound {
        /// Problem file; n is its closure dimension and m its generator count.
        problem: Option<PathBuf>,
        #[arg(long, requires = "m", conflicts_with = "problem")]
        n: Option<usize>,
        #[arg(long, requires = "n", conflicts_with = "problem")]
        m: Option<usize>,
    },
    /// Complete the generators to a basis by adjoint conjugations.
    Complete {
        problem: PathBuf,
        /// Write the completed basis here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a validated ε-net of generator words.
    Net {
        problem: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write target matrices as words over the generators.
    Synthesize {
        problem: PathBuf,
        /// A file with `matrix` (one target) or `matrices` (a batch).
        target: PathBuf,
        /// Reuse the net stored here if it matches; otherwise build and store it.
        #[arg(long)]
        net_cache: Option<PathBuf>,
        #[arg(long, default_value_t = 0.4)]
        radius: f64,
        /// Required replay error of every synthesized word.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Also lift each word to nonnegative times.
        #[arg(long)]
        nonneg: bool,
        /// Per-letter tolerance of the nonnegative lift.
        #[arg(long, default_value_t = 1e-8)]
        per_factor_tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        net: NetArgs,
        /// Write the final word(s) with their stated errors here.
        #[arg(long)]
        word_out: Option<PathBuf>,
    },
    /// Replay a word file against its targets and compare with the stated error.
    Verify {
        word: PathBuf,
        problem: PathBuf,
        target: PathBuf,
    },
    /// Write a bundled demo problem.
    Demo {
        /// One of su2_pauli_pair, su3_gellmann_pair, so3_rotations, or `all`.
        name: String,
        /// Directory for `<name>.json`; prints to stdout when omitted.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct NetArgs {
    /// Consecutive rejections that end the first streaming round.
    #[arg(long, default_value_t = NetConfig::default().stall_count)]
    pub stall_count: usize,
    /// Haar samples used to validate coverage.
    #[arg(long, default_value_t = NetConfig::default().validation_samples)]
    pub validation_samples: usize,
    #[arg(long, default_value_t = NetConfig::default().walk_length)]
    pub walk_length: usize,
    /// Letter times are drawn from [-t_max, t_max].
    #[arg(long, default_value_t = NetConfig::default().t_max)]
    pub t_max: f64,
    /// Validation rounds before giving up.
    #[arg(long, default_value_t = NetConfig::default().max_rounds)]
    pub max_rounds: usize,
    /// Largest number of net points before streaming stops.
    #[arg(long, default_value_t = NetConfig::default().max_points)]
    pub max_points: usize,
}

impl NetArgs {
    fn config(&self, seed: u64) -> NetConfig {
        NetConfig {
            seed,
            walk_length: self.walk_length,
            stall_count: self.stall_count,
            validation_samples: self.validation_samples,
            max_points: self.max_points,
            t_max: self.t_max,
            max_rounds: self.max_rounds,
            ..NetConfig::default()
        }
    }
}

/// Word file contents: one entry per target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordFileSet {
    One(WordFile),
    Many(Vec<WordFile>),
}

impl WordFileSet {
    pub fn entries(&self) -> &[WordFile] {
        match self {
            WordFileSet::One(w) => std::slice::from_ref(w),
            WordFileSet::Many(ws) => ws,
        }
    }
}

/// A finished command: exit code and report.
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { code: 0, report }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its report to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Outcome {
                code: e.exit_code(),
                report: json!({ "error": e.to_string(), "exit_code": e.exit_code() }),
            }
        }
    };
    let mut report = outcome.report;
    if let Value::Object(map) = &mut report {
        map.insert("elapsed_seconds".into(), json!(started.elapsed().as_secs_f64()));
    }
    match to_canonical_string(&report) {
        Ok(s) => {
            let _ = writeln!(out, "{s}");
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    }
    outcome.code
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Validate { problem, expected } => cmd_validate(problem, *expected),
        Command::Bound { problem, n, m } => cmd_bound(problem.as_deref(), *n, *m),
        Command::Complete { problem, out } => cmd_complete(problem, out.as_deref()),
        Command::Net {
            problem,
            radius,
            seed,
            net,
            out,
        } => cmd_net(problem, *radius, &net.config(*seed), out.as_deref()),
        Command::Synthesize {
            problem,
            target,
            net_cache,
            radius,
            tol,
            nonneg,
            per_factor_tol,
            seed,
            net,
            word_out,
        } => cmd_synthesize(&SynthesizeArgs {
            problem,
            target,
            net_cache: net_cache.as_deref(),
            radius: *radius,
            tol: *tol,
            nonneg: *nonneg,
            per_factor_tol: *per_factor_tol,
            net: net.config(*seed),
            word_out: word_out.as_deref(),
        }),
        Command::Verify { word, problem, target } => cmd_verify(word, problem, target),
        Command::Demo { name, out_dir } => cmd_demo(name, out_dir.as_deref()),
    }
}

fn load_problem(path: &Path) -> Result<(ProblemFile, GeneratorSet)> {
    let p: ProblemFile = read_json(path)?;
    let gens = p.to_generators(&Tolerances::default())?;
    Ok((p, gens))
}

fn complete(gens: &GeneratorSet) -> Result<(CompletedBasis, usize)> {
    let alg = bracket_closure(gens, &ClosureConfig::default())?;
    let basis = complete_basis(gens, &alg, &CompletionConfig::default())?;
    Ok((basis, alg.sweeps))
}

/// Refuses problems whose generators do not generate their declared algebra.
fn require_generating(p: &ProblemFile, gens: &GeneratorSet) -> Result<()> {
    if let Some(expected) = p.expected_algebra_dim {
        let alg = bracket_closure(gens, &ClosureConfig::default())?;
        if alg.dim_algebra != expected {
            return Err(Error::NotGenerating {
                closure_dim: alg.dim_algebra,
                expected,
            });
        }
    }
    Ok(())
}

pub fn cmd_validate(path: &Path, expected: Option<usize>) -> Result<Outcome> {
    let (p, gens) = load_problem(path)?;
    let alg = bracket_closure(&gens, &ClosureConfig::default())?;
    let expected = expected.or(p.expected_algebra_dim);
    let generating = expected.map(|d| alg.dim_algebra == d);
    let report = json!({
        "command": "validate",
        "problem": path.display().to_string(),
        "config": ClosureConfig::default(),
        "results": {
            "dim": gens.dim(),
            "generators": gens.len(),
            "closure_dim": alg.dim_algebra,
            "sweeps": alg.sweeps,
            "expected_algebra_dim": expected,
            "generating": generating,
        },
    });
    let code = match generating {
        Some(false) => 3,
        _ => 0,
    };
    Ok(Outcome { code, report })
}

pub fn cmd_bound(problem: Option<&Path>, n: Option<usize>, m: Option<usize>) -> Result<Outcome> {
    let (n, m) = match (problem, n, m) {
        (Some(path), _, _) => {
            let (p, gens) = load_problem(path)?;
            let n = match p.expected_algebra_dim {
                Some(d) => d,
                None => bracket_closure(&gens, &ClosureConfig::default())?.dim_algebra,
            };
            (n, gens.len())
        }
        (None, Some(n), Some(m)) => (n, m),
        _ => return Err(Error::InvalidConfig("give a problem file or both --n and --m".into())),
    };
    let s = rk_schedule(n, m)?;
    Ok(Outcome::ok(json!({
        "command": "bound",
        "results": { "n": n, "m": m, "values": s.values, "bound": s.bound },
    })))
}

pub fn cmd_complete(path: &Path, out: Option<&Path>) -> Result<Outcome> {
    let (p, gens) = load_problem(path)?;
    require_generating(&p, &gens)?;
    let (basis, sweeps) = complete(&gens)?;
    let cfg = CompletionConfig::default();
    if let Some(out) = out {
        write_json(out, &BasisFile::from_basis(&basis, &cfg))?;
    }
    let entries: Vec<Value> = basis
        .extended()
        .iter()
        .map(|e| {
            json!({
                "core": e.word.core + 1,
                "factors": e.word.factors,
                "word_length": e.word.len(),
                "score": e.score,
            })
        })
        .collect();
    Ok(Outcome::ok(json!({
        "command": "complete",
        "problem": path.display().to_string(),
        "config": cfg,
        "results": {
            "n": basis.n(),
            "m": basis.m(),
            "closure_sweeps": sweeps,
            "schedule": basis.schedule(),
            "achieved_r": basis.achieved_r(),
            "max_reproduction_error": basis.max_reproduction_error()?,
            "extended": entries,
        },
    })))
}

fn net_summary(net: &CoverNet) -> Value {
    json!({
        "radius": net.radius,
        "points": net.len(),
        "max_word_length": net.max_word_len(),
        "coverage": net.coverage_stats,
        "validated": net.validated(),
    })
}

pub fn cmd_net(path: &Path, radius: f64, cfg: &NetConfig, out: Option<&Path>) -> Result<Outcome> {
    let (p, gens) = load_problem(path)?;
    require_generating(&p, &gens)?;
    let (basis, _) = complete(&gens)?;
    let net = build_net(&basis, radius, cfg)?;
    if let Some(out) = out {
        write_json(out, &NetFile::new(&gens, net.clone()))?;
    }
    Ok(Outcome::ok(json!({
        "command": "net",
        "problem": path.display().to_string(),
        "config": cfg,
        "seed": cfg.seed,
        "results": net_summary(&net),
    })))
}

struct SynthesizeArgs<'a> {
    problem: &'a Path,
    target: &'a Path,
    net_cache: Option<&'a Path>,
    radius: f64,
    tol: f64,
    nonneg: bool,
    per_factor_tol: f64,
    net: NetConfig,
    word_out: Option<&'a Path>,
}

/// Loads the cached net if it was built for the same generators, radius and
/// configuration; `None` means it must be rebuilt.
fn load_cached_net(path: &Path, gens: &GeneratorSet, radius: f64, cfg: &NetConfig) -> Result<Option<CoverNet>> {
    if !path.exists() {
        return Ok(None);
    }
    let file: NetFile = read_json(path)?;
    if file.net.radius != radius || &file.net.config != cfg {
        return Ok(None);
    }
    match file.into_net(gens, 1e-9) {
        Ok(net) => Ok(Some(net)),
        Err(Error::Parse { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn cmd_synthesize(a: &SynthesizeArgs) -> Result<Outcome> {
    let tol = Tolerances::default();
    let (p, gens) = load_problem(a.problem)?;
    require_generating(&p, &gens)?;
    let target_file: TargetFile = read_json(a.target)?;
    let targets = target_file.to_elements(group_of(&gens), &tol)?;
    for t in &targets {
        if t.dim() != gens.dim() {
            return Err(Error::DimMismatch {
                expected: gens.dim(),
                found: t.dim(),
            });
        }
    }
    let solver = SolverConfig {
        final_tol_total: a.tol,
        ..SolverConfig::default()
    };
    let (basis, _) = complete(&gens)?;

    let cached = match a.net_cache {
        Some(path) => load_cached_net(path, &gens, a.radius, &a.net)?,
        None => None,
    };
    let net_source = if cached.is_some() { "cache" } else { "built" };
    let net = match cached {
        Some(n) => n,
        None => {
            let n = build_net(&basis, a.radius, &a.net)?;
            if let Some(path) = a.net_cache {
                write_json(path, &NetFile::new(&gens, n.clone()))?;
            }
            n
        }
    };

    let recurrence = RecurrenceConfig::default();
    let mut files = Vec::with_capacity(targets.len());
    let mut results = Vec::with_capacity(targets.len());
    for (i, r) in synthesize_batch(&targets, &net, &basis, &solver).into_iter().enumerate() {
        let s = r?;
        let mut entry = json!({
            "index": i,
            "length": s.word.len(),
            "chart_length": s.chart_word_length,
            "net_point": s.net_point_index,
            "chart_iterations": s.chart_iterations,
            "error": s.target_error,
            "bound": s.word.meta.bound_used,
            "within_bound": s.word.len() as u64 <= s.word.meta.bound_used,
            "word": s.word.letters,
        });
        let file = if a.nonneg {
            let lifted = lift_word_nonneg(&s.word.letters, &gens, a.per_factor_tol, &recurrence)?;
            let replayed = replay(&lifted.letters, &gens)?;
            let error = mat_distance(replayed.mat(), targets[i].mat());
            let lift_error = lifted.lift_error;
            let lifted_letters = lifted.lifted_letters;
            let word = lifted.into_word(s.word.meta.bound_used, s.word.meta.product_error);
            entry["nonneg"] = json!({
                "length": word.len(),
                "lifted_letters": lifted_letters,
                "lift_error": lift_error,
                "error": error,
                "error_bound": s.target_error + lift_error,
                "min_time": word.min_time(),
                "word": word.letters,
            });
            WordFile {
                word,
                stated_error: error,
                nonnegative: true,
            }
        } else {
            WordFile {
                word: s.word,
                stated_error: s.target_error,
                nonnegative: false,
            }
        };
        files.push(file);
        results.push(entry);
    }

    if let Some(path) = a.word_out {
        match &target_file {
            TargetFile::Single { .. } => write_json(path, &files[0])?,
            TargetFile::Batch { .. } => write_json(path, &files)?,
        }
    }

    Ok(Outcome::ok(json!({
        "command": "synthesize",
        "problem": a.problem.display().to_string(),
        "target": a.target.display().to_string(),
        "seed": a.net.seed,
        "config": {
            "solver": solver,
            "net": a.net,
            "radius": a.radius,
            "nonneg": a.nonneg,
            "per_factor_tol": a.per_factor_tol,
        },
        "results": {
            "net": net_summary(&net),
            "net_source": net_source,
            "completion_bound": basis.schedule().bound,
            "targets": results,
        },
    })))
}

/// Replays each word against its target from scratch.
pub fn cmd_verify(word: &Path, problem: &Path, target: &Path) -> Result<Outcome> {
    let (_, gens) = load_problem(problem)?;
    let words: WordFileSet = read_json(word)?;
    let targets = read_json::<TargetFile>(target)?.matrices();
    let entries = words.entries();
    if entries.len() != targets.len() {
        return Err(Error::DimMismatch {
            expected: targets.len(),
            found: entries.len(),
        });
    }
    let mut all_ok = true;
    let mut checks = Vec::with_capacity(entries.len());
    for (w, t) in entries.iter().zip(&targets) {
        let replayed = replay(&w.word.letters, &gens)?;
        if replayed.dim() != t.nrows() {
            return Err(Error::DimMismatch {
                expected: replayed.dim(),
                found: t.nrows(),
            });
        }
        let error = mat_distance(replayed.mat(), t);
        let nonneg_ok = !w.nonnegative || w.word.letters.iter().all(|l| l.time >= 0.0);
        let ok = error <= w.stated_error * VERIFY_RELATIVE_SLACK + VERIFY_ABSOLUTE_SLACK && nonneg_ok;
        all_ok &= ok;
        checks.push(json!({
            "length": w.word.len(),
            "stated_error": w.stated_error,
            "replay_error": error,
            "nonnegative_ok": nonneg_ok,
            "ok": ok,
        }));
    }
    Ok(Outcome {
        code: if all_ok { 0 } else { EXIT_VERIFY_MISMATCH },
        report: json!({
            "command": "verify",
            "results": { "ok": all_ok, "words": checks },
        }),
    })
}

fn demo_problem(name: &str) -> Result<ProblemFile> {
    let (gens, dim) = demo(name).ok_or_else(|| {
        Error::InvalidConfig(format!("unknown demo {name:?}; choose one of {}", DEMO_NAMES.join(", ")))
    })?;
    Ok(ProblemFile::from_generators(&gens, Some(dim)))
}

pub fn cmd_demo(name: &str, out_dir: Option<&Path>) -> Result<Outcome> {
    let names: Vec<&str> = if name == "all" { DEMO_NAMES.to_vec() } else { vec![name] };
    let mut written = Vec::new();
    let mut problems = Vec::new();
    for n in names {
        let p = demo_problem(n)?;
        match out_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("{n}.json"));
                write_json(&path, &p)?;
                written.push(path.display().to_string());
            }
            None => problems.push(json!({ "name": n, "problem": p })),
        }
    }
    Ok(Outcome::ok(json!({
        "command": "demo",
        "results": { "written": written, "problems": problems },
    })))
}
