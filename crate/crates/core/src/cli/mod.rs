//! `ergolab` command-line driver.
//!
//! Every JSON report has the shape `{config, verdict, result}` where
//! `config` is the full [`ExperimentConfig`]. Exit status is 0 on success,
//! 1 when a theorem-backed check fails, and 2 on invalid input.

mod parse;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use parse::{parse_signal, parse_tau};

use crate::czlab::{cz_decompose, eset_check_with};
use crate::dynsys::{convergence_diagnostic, transference_check, DynSystem, Observable};
use crate::error::{invalid, Error, Result};
use crate::kernel::{autocorrelate, build_triple, build_triples, IntegerSignal};
use crate::maximal::{adversarial_phi, weak_type_profile, AdversarialKind};
use crate::probab::{
    banach_dichotomy_experiment, cancels_tail_verify, centered_bernoulli_family, chernoff_grid,
    corollary_bound_verify, rademacher_family, sufficient_condition_check, BlockSpec,
    ChernoffMode, DichotomyConfig,
};
use crate::rng::derive_seed;
use crate::selector::{generate, SelectorConfig, SelectorSequence, TauProfile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "ERGOLAB_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Everything needed to rerun a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub master_seed: u64,
    pub params: Value,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Parser, Debug)]
#[command(name = "ergolab", version, about = "Random selector sequences and their maximal inequalities")]
struct Cli {
    /// Master seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SelectorArgs {
    /// Sequence length N.
    #[arg(long = "n", default_value_t = 1 << 16)]
    n: usize,
    /// Power-law exponent: tau_n = n^-alpha.
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    /// Profile literal overriding --alpha: power:A, const:P, invlog, file:PATH.
    #[arg(long)]
    tau: Option<String>,
}

impl SelectorArgs {
    fn profile(&self) -> Result<TauProfile> {
        match &self.tau {
            Some(t) => parse_tau(t, self.n),
            None => Ok(TauProfile::power_law(self.alpha)),
        }
    }

    fn sequence(&self, master: u64) -> Result<SelectorSequence> {
        generate(&SelectorConfig::new(
            self.n,
            self.profile()?,
            derive_seed(master, "selector"),
        ))
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct ScaleArgs {
    /// Smallest dyadic scale j.
    #[arg(long, default_value_t = 3)]
    j_min: u32,
    /// Largest dyadic scale j; defaults to floor(log2 N).
    #[arg(long)]
    j_max: Option<u32>,
}

impl ScaleArgs {
    fn range(&self, n: usize) -> Result<Vec<u32>> {
        let top = n.max(1).ilog2();
        let hi = self.j_max.unwrap_or(top);
        if hi > top {
            return Err(Error::OutOfRange {
                what: "j_max",
                value: hi as u64,
                limit: top as u64,
            });
        }
        if self.j_min > hi {
            return Err(invalid(format!("empty scale range {}..={hi}", self.j_min)));
        }
        Ok((self.j_min..=hi).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
enum Distribution {
    Rademacher,
    Bernoulli,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "command")]
enum Command {
    /// Generate a selector sequence.
    Gen {
        #[command(flatten)]
        #[serde(flatten)]
        sel: SelectorArgs,
        /// Print selected positions, one per line, instead of a report.
        #[arg(long)]
        ints: bool,
        /// Also write the packed bit stream to this path.
        #[arg(long)]
        packed: Option<PathBuf>,
    },
    /// Sup-window densities over a ladder of window lengths.
    Density {
        #[command(flatten)]
        #[serde(flatten)]
        sel: SelectorArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 100, 1000])]
        windows: Vec<usize>,
    },
    /// Growth exponent of the k-th selected integer.
    Growth {
        #[command(flatten)]
        #[serde(flatten)]
        sel: SelectorArgs,
        #[arg(long, default_value_t = 100)]
        k_lo: usize,
        /// Defaults to the number of selections.
        #[arg(long)]
        k_hi: Option<usize>,
    },
    /// Autocorrelation of a signal, or of the centered kernel at scale j.
    Autocorr {
        #[command(flatten)]
        #[serde(flatten)]
        sel: SelectorArgs,
        #[arg(long, conflicts_with = "j")]
        phi: Option<String>,
        #[arg(long)]
        j: Option<u32>,
    },
    /// Dyadic Calderon-Zygmund decomposition at height lambda.
    Cz {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        lambda: f64,
    },
    /// Level-set inclusions of the weak (1,1) argument.
    Esets {
        #[command(flatten)]
        #[serde(flatten)]
        sel: SelectorArgs,
        #[command(flatten)]
        #[serde(flatten)]
        scales: ScaleArgs,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        lambda: f64,
    },
    /// Weak-type profile of the dyadic maximal function.
    Maximal {
        #[command(flatten)]
        #[serde(flatten)]
        sel: SelectorArgs,
        #[command(flatten)]
        #[serde(flatten)]
        scales: ScaleArgs,
        #[arg(long, conflicts_with = "adversarial")]
        phi: Option<String>,
        #[arg(long, value_enum)]
        adversarial: Option<AdversarialKind>,
        #[arg(long, default_value_t = 1)]
        size: usize,
        /// Height grid; defaults to 48 log-spaced points below sup M phi.
        #[arg(long, value_delimiter = ',')]
        lambdas: Vec<f64>,
    },
    /// Concentration bound for sums of bounded centered variables.
    Chernoff {
        #[arg(long = "n")]
        n: usize,
        #[arg(long, value_enum, default_value_t = Distribution::Rademacher)]
        dist: Distribution,
        /// Bernoulli means tau_k = k^-alpha.
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0f64])]
        lambda: Vec<f64>,
        /// Enumerate all patterns instead of sampling.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = crate::probab::DEFAULT_TRIALS)]
        trials: u64,
    },
    /// Off-origin autocorrelation tail of a random centered signal.
    Cancels {
        #[arg(long = "n", default_value_t = 100)]
        n: usize,
        #[arg(long, default_value = "const:0.5")]
        tau: String,
        #[arg(long, default_value_t = 60.0)]
        theta: f64,
        #[arg(long, default_value_t = crate::probab::DEFAULT_TRIALS)]
        trials: u64,
    },
    /// Per-scale autocorrelation bounds for the centered kernels.
    Corollary {
        #[command(flatten)]
        #[serde(flatten)]
        sel: SelectorArgs,
        #[command(flatten)]
        #[serde(flatten)]
        scales: ScaleArgs,
        #[arg(long, default_value_t = 0.15)]
        kappa: f64,
        /// Constant the per-scale ratios are compared against.
        #[arg(long, default_value_t = 100.0)]
        c_limit: f64,
    },
    /// Decay test for a general probability profile.
    Sufficient {
        #[arg(long, default_value = "power:0.25")]
        tau: String,
        #[arg(long, default_value_t = 6)]
        j_min: u32,
        #[arg(long, default_value_t = 20)]
        j_max: u32,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long, default_value_t = crate::probab::DEFAULT_FIT_TOLERANCE)]
        fit_tol: f64,
    },
    /// Block tails, window densities and runs over many seeds.
    Dichotomy {
        #[arg(long, default_value = "power:0.5")]
        tau: String,
        #[arg(long = "n", default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [1000usize])]
        windows: Vec<usize>,
        #[arg(long, default_value_t = 0.05)]
        density_threshold: f64,
        #[arg(long, default_value_t = 3)]
        run_length: usize,
        /// Block-tail check `r,m,n`.
        #[arg(long, value_delimiter = ',')]
        block: Vec<usize>,
        #[arg(long, default_value_t = crate::probab::DEFAULT_TRIALS)]
        trials: u64,
    },
    /// Cauchy gaps of subsequence averages for a circle rotation.
    Dyn {
        #[command(flatten)]
        #[serde(flatten)]
        sel: SelectorArgs,
        #[arg(long, default_value_t = std::f64::consts::SQRT_2 - 1.0)]
        angle: f64,
        /// Observable 1[a, b) given as `a..b`.
        #[arg(long, default_value = "0..0.5")]
        interval: String,
        /// Defaults to N/64, N/32, ..., N.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<usize>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Orbit averages on the shift against convolution with the reflected kernel.
    Transfer {
        #[command(flatten)]
        #[serde(flatten)]
        sel: SelectorArgs,
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 8)]
        j: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen { .. } => "gen",
            Command::Density { .. } => "density",
            Command::Growth { .. } => "growth",
            Command::Autocorr { .. } => "autocorr",
            Command::Cz { .. } => "cz",
            Command::Esets { .. } => "esets",
            Command::Maximal { .. } => "maximal",
            Command::Chernoff { .. } => "chernoff",
            Command::Cancels { .. } => "cancels",
            Command::Corollary { .. } => "corollary",
            Command::Sufficient { .. } => "sufficient",
            Command::Dichotomy { .. } => "dichotomy",
            Command::Dyn { .. } => "dyn",
            Command::Transfer { .. } => "transfer",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Verdict {
    /// Exploratory output with no theorem attached.
    None,
    Pass,
    Fail,
}

impl Verdict {
    fn from_check(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

enum Payload {
    Report { result: Value, csv: String, verdict: Verdict },
    Raw(String),
}

/// Run the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_INVALID_INPUT
                }
            };
        }
    };
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                let _ = writeln!(err, "error: {THREADS_ENV} must be a positive integer, got '{v}'");
                return EXIT_INVALID_INPUT;
            }
        },
        Err(_) => None,
    };
    let job = || execute(&cli);
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(job),
            Err(e) => Err(invalid(format!("thread pool: {e}"))),
        },
        None => job(),
    };
    match result.and_then(|(text, verdict)| emit(&cli, &text, out).map(|_| verdict)) {
        Ok(Verdict::Fail) => EXIT_VERIFICATION_FAILED,
        Ok(_) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID_INPUT
        }
    }
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn experiment_config(command: &str, master_seed: u64, params: Value, out: Option<PathBuf>, format: OutputFormat) -> ExperimentConfig {
    ExperimentConfig {
        command: command.to_string(),
        master_seed,
        params,
        out,
        format,
    }
}

fn execute(cli: &Cli) -> Result<(String, Verdict)> {
    let mut params = serde_json::to_value(&cli.command)?;
    if let Value::Object(map) = &mut params {
        map.remove("command");
    }
    let config = experiment_config(cli.command.name(), cli.seed, params, cli.out.clone(), cli.format);
    match dispatch(&cli.command, cli.seed)? {
        Payload::Raw(text) => Ok((text, Verdict::None)),
        Payload::Report { result, csv, verdict } => {
            let text = match cli.format {
                OutputFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&json!({
                        "config": config,
                        "verdict": verdict,
                        "result": result,
                    }))?;
                    s.push('\n');
                    s
                }
                OutputFormat::Csv => csv,
            };
            Ok((text, verdict))
        }
    }
}

fn report(result: impl Serialize, csv: String, verdict: Verdict) -> Result<Payload> {
    Ok(Payload::Report {
        result: serde_json::to_value(result)?,
        csv,
        verdict,
    })
}

fn signal_csv(s: &IntegerSignal) -> String {
    let mut out = String::from("x,value\n");
    for (x, v) in s.iter() {
        let _ = writeln!(out, "{x},{v:?}");
    }
    out
}

fn dispatch(cmd: &Command, seed: u64) -> Result<Payload> {
    match cmd {
        Command::Gen { sel, ints, packed } => {
            let s = sel.sequence(seed)?;
            if let Some(path) = packed {
                std::fs::write(path, s.to_packed_bits())?;
            }
            if *ints {
                return Ok(Payload::Raw(s.to_newline_integers()));
            }
            let mut csv = String::from("n,xi\n");
            for (i, b) in s.bits.iter().enumerate() {
                let _ = writeln!(csv, "{},{b}", i + 1);
            }
            report(&s, csv, Verdict::None)
        }
        Command::Density { sel, windows } => {
            let s = sel.sequence(seed)?;
            let d = s.banach_density(windows)?;
            let mut csv = String::from("m,sup_density,witness_start\n");
            for w in &d.windows {
                let _ = writeln!(csv, "{},{:?},{}", w.m, w.sup_density, w.witness_start);
            }
            report(&d, csv, Verdict::None)
        }
        Command::Growth { sel, k_lo, k_hi } => {
            let s = sel.sequence(seed)?;
            let hi = k_hi.unwrap_or(s.count);
            let slope = s.growth_exponent(*k_lo, hi)?;
            let expected = match &s.config.tau {
                TauProfile::PowerLaw { alpha } => Some(1.0 / (1.0 - alpha)),
                TauProfile::Explicit { .. } => None,
            };
            let csv = format!(
                "k_lo,k_hi,count,slope,expected\n{k_lo},{hi},{},{slope:?},{}\n",
                s.count,
                expected.map_or(String::new(), |e| format!("{e:?}"))
            );
            report(
                json!({"k_lo": k_lo, "k_hi": hi, "count": s.count, "slope": slope, "expected_slope": expected}),
                csv,
                Verdict::None,
            )
        }
        Command::Autocorr { sel, phi, j } => match (phi, j) {
            (Some(p), _) => {
                let f = parse_signal(p)?;
                let a = autocorrelate(&f);
                report(
                    json!({"origin": a.get(0), "l2_sq": f.l2_sq(), "sup_off_origin": a.sup_off_origin(), "autocorrelation": a}),
                    signal_csv(&a),
                    Verdict::None,
                )
            }
            (None, Some(j)) => {
                let s = sel.sequence(seed)?;
                let t = build_triple(&s, *j)?;
                let a = autocorrelate(&t.nu);
                let m = 1usize << j;
                let sq: f64 = (1..=m).map(|n| (s.bit(n) as f64 - s.tau(n)).powi(2)).sum();
                let identity = sq / (t.beta * t.beta);
                let ok = crate::probab::rel_error_within(a.get(0), identity, crate::probab::ORIGIN_REL_TOL);
                report(
                    json!({"j": j, "beta": t.beta, "origin": a.get(0), "origin_identity": identity, "sup_off_origin": a.sup_off_origin(), "autocorrelation": a}),
                    signal_csv(&a),
                    Verdict::from_check(ok),
                )
            }
            (None, None) => Err(invalid("autocorr needs --phi or --j")),
        },
        Command::Cz { phi, lambda } => {
            let f = parse_signal(phi)?;
            let d = cz_decompose(&f, *lambda)?;
            let inv = d.check_invariants(&f);
            let mut csv = String::from("s,k,start,end,l1\n");
            for b in &d.bad_parts {
                let _ = writeln!(csv, "{},{},{},{},{:?}", b.cube.s, b.cube.k, b.cube.start(), b.cube.end(), b.signal.l1());
            }
            let ok = inv.all_hold(1e-12);
            report(json!({"decomposition": d, "invariants": inv}), csv, Verdict::from_check(ok))
        }
        Command::Esets { sel, scales, phi, lambda } => {
            let f = parse_signal(phi)?;
            let s = sel.sequence(seed)?;
            let triples = build_triples(&s, scales.range(s.len())?)?;
            let d = cz_decompose(&f, *lambda)?;
            let r = eset_check_with(&f, &d, &triples);
            let mut csv = String::from("set,size,normalized\n");
            let names = ["top", "e1", "e2", "e3", "e4", "e5", "e6", "e7"];
            for ((name, size), norm) in names.iter().zip(r.sizes.as_array()).zip(&r.normalized) {
                let _ = writeln!(csv, "{name},{size},{norm:?}");
            }
            let ok = r.inclusions_hold() && r.e3_in_expanded_cubes && r.e6_support_bound;
            report(&r, csv, Verdict::from_check(ok))
        }
        Command::Maximal { sel, scales, phi, adversarial, size, lambdas } => {
            let f = match (phi, adversarial) {
                (Some(p), _) => parse_signal(p)?,
                (None, Some(kind)) => adversarial_phi(*kind, *size)?,
                (None, None) => return Err(invalid("maximal needs --phi or --adversarial")),
            };
            let s = sel.sequence(seed)?;
            let triples = build_triples(&s, scales.range(s.len())?)?;
            let p = weak_type_profile(&f, &triples, lambdas)?;
            let csv = p.to_csv();
            report(json!({"summary": p.summary(), "profile": p}), csv, Verdict::None)
        }
        Command::Chernoff { n, dist, alpha, lambda, exact, trials } => {
            let vars = match dist {
                Distribution::Rademacher => rademacher_family(*n),
                Distribution::Bernoulli => centered_bernoulli_family(&TauProfile::power_law(*alpha), *n),
            };
            TauProfile::power_law(*alpha).validate(*n)?;
            let mode = if *exact {
                ChernoffMode::Exact
            } else {
                ChernoffMode::MonteCarlo {
                    trials: *trials,
                    seed: derive_seed(seed, "chernoff"),
                }
            };
            let reports = chernoff_grid(&vars, lambda, mode)?;
            let mut csv = String::from("lambda,empirical_p,standard_error,bound,satisfied\n");
            for r in &reports {
                let _ = writeln!(csv, "{:?},{:?},{:?},{:?},{}", r.lambda, r.empirical_p, r.standard_error, r.bound, r.satisfied);
            }
            let ok = reports.iter().all(|r| r.satisfied);
            if reports.len() == 1 {
                report(&reports[0], csv, Verdict::from_check(ok))
            } else {
                report(&reports, csv, Verdict::from_check(ok))
            }
        }
        Command::Cancels { n, tau, theta, trials } => {
            let t = parse_tau(tau, *n)?;
            let r = cancels_tail_verify(*n, &t, *theta, *trials, derive_seed(seed, "cancels"))?;
            let csv = format!(
                "n,theta,trials,hits,threshold,bound\n{},{:?},{},{},{:?},{:?}\n",
                r.n, r.theta, r.trials, r.hits, r.threshold, r.bound
            );
            let verdict = match r.is_satisfied() {
                Some(ok) => Verdict::from_check(ok),
                None => Verdict::None,
            };
            report(&r, csv, verdict)
        }
        Command::Corollary { sel, scales, kappa, c_limit } => {
            let s = sel.sequence(seed)?;
            let r = corollary_bound_verify(&s, &scales.range(s.len())?, *kappa, *c_limit)?;
            let csv = r.to_csv();
            let ok = r.origin_identity_holds;
            report(&r, csv, Verdict::from_check(ok))
        }
        Command::Sufficient { tau, j_min, j_max, eps, fit_tol } => {
            if *j_max >= 40 {
                return Err(invalid(format!("j_max {j_max} too large")));
            }
            let t = parse_tau(tau, 1usize << j_max)?;
            let js: Vec<u32> = (*j_min..=*j_max).collect();
            let r = sufficient_condition_check(&t, &js, *eps, *fit_tol)?;
            let mut csv = String::from("j,quantity\n");
            for row in &r.per_j {
                let _ = writeln!(csv, "{},{:?}", row.j, row.quantity);
            }
            report(&r, csv, Verdict::None)
        }
        Command::Dichotomy { tau, n, seeds, windows, density_threshold, run_length, block, trials } => {
            let t = parse_tau(tau, *n)?;
            let block = match block.as_slice() {
                [] => None,
                [r, m, bn] => Some(BlockSpec { r: *r, m: *m, n: *bn, trials: *trials }),
                _ => return Err(invalid("--block takes r,m,n")),
            };
            let cfg = DichotomyConfig {
                tau: t,
                length: *n,
                seeds: *seeds,
                master_seed: derive_seed(seed, "dichotomy"),
                windows: windows.clone(),
                density_threshold: *density_threshold,
                run_length: *run_length,
                block,
            };
            let r = banach_dichotomy_experiment(&cfg)?;
            let mut csv = String::from("seed,count,runs");
            for m in windows {
                let _ = write!(csv, ",sup_density_{m}");
            }
            csv.push('\n');
            for o in &r.per_seed {
                let _ = write!(csv, "{},{},{}", o.seed, o.count, o.runs);
                for d in &o.sup_density {
                    let _ = write!(csv, ",{d:?}");
                }
                csv.push('\n');
            }
            let verdict = match &r.block {
                Some(b) => Verdict::from_check(b.exact_within_bounds && b.mc_within_bounds),
                None => Verdict::None,
            };
            report(&r, csv, verdict)
        }
        Command::Dyn { sel, angle, interval, checkpoints, grid, tolerance } => {
            let s = sel.sequence(seed)?;
            let (a, b) = interval
                .split_once("..")
                .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
                .ok_or_else(|| Error::Parse(format!("expected a..b interval, got '{interval}'")))?;
            let f = Observable::IntervalIndicator { a, b };
            let cps = if checkpoints.is_empty() {
                let mut v: Vec<usize> = (0..=6).rev().map(|k| s.len() >> k).filter(|&c| c > 0).collect();
                v.dedup();
                v
            } else {
                checkpoints.clone()
            };
            if *grid == 0 {
                return Err(invalid("grid must have at least one point"));
            }
            let xs: Vec<f64> = (0..*grid).map(|i| i as f64 / *grid as f64).collect();
            let sys = DynSystem::CircleRotation { angle: *angle };
            let r = convergence_diagnostic(&sys, &f, &s, &cps, &xs, *tolerance)?;
            let csv = r.to_csv();
            report(&r, csv, Verdict::None)
        }
        Command::Transfer { sel, phi, j } => {
            let f = parse_signal(phi)?;
            let s = sel.sequence(seed)?;
            let r = transference_check(&f, &s, *j)?;
            let csv = format!(
                "j,max_discrepancy,scale,relative_discrepancy\n{},{:?},{:?},{:?}\n",
                r.j, r.max_discrepancy, r.scale, r.relative_discrepancy
            );
            let ok = r.holds;
            report(&r, csv, Verdict::from_check(ok))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["ergolab"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn gen_all_ones() {
        let (code, out, _) = run_str(&["gen", "--alpha", "0", "--n", "5", "--seed", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["bits"], json!([1, 1, 1, 1, 1]));
        assert_eq!(v["config"]["command"], "gen");
        assert_eq!(v["config"]["master_seed"], 1);
    }

    #[test]
    fn cz_point_mass() {
        let (code, out, _) = run_str(&["cz", "--phi", "point:8@0", "--lambda", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let bad = &v["result"]["decomposition"]["bad"];
        assert_eq!(bad.as_array().unwrap().len(), 1);
        assert_eq!(bad[0]["s"], 2);
        assert_eq!(bad[0]["k"], 0);
    }

    #[test]
    fn chernoff_exact_pair() {
        let (code, out, _) = run_str(&["chernoff", "--exact", "--n", "2", "--dist", "rademacher", "--lambda", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["empirical_p"], 0.5);
        assert!((v["result"]["bound"].as_f64().unwrap() - 1.5576).abs() < 1e-4);
        assert_eq!(v["result"]["satisfied"], true);
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = run_str(&["gen", "--bogus"]);
        assert_eq!(code, 2);
        assert!(err.contains("--bogus"));
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["cz", "--phi", "point:8", "--lambda", "1"]).0, 2);
        assert_eq!(run_str(&["cz", "--phi", "point:8@0", "--lambda", "0"]).0, 2);
        assert_eq!(run_str(&["chernoff", "--exact", "--n", "30"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn config_round_trips() {
        let (_, out, _) = run_str(&["density", "--n", "2000", "--windows", "10,100", "--seed", "9"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        let cfg: ExperimentConfig = serde_json::from_value(v["config"].clone()).unwrap();
        let again: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.params["windows"], json!([10, 100]));
        assert_eq!(cfg.params["n"], 2000);
    }

    #[test]
    fn csv_output() {
        let (code, out, _) = run_str(&["density", "--n", "500", "--windows", "10", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("m,sup_density,witness_start\n"));
        assert_eq!(out.lines().count(), 2);
    }
}
