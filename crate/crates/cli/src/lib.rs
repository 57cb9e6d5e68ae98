//! Command-line front end: parses arguments, runs one analysis and renders
//! a `{config, timing, result}` JSON report.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use tcpkit::bounds::{BoundReport, GammaVerdict};
use tcpkit::classify::{find_s_witness, TensorClass, Verdict};
use tcpkit::io::{parse_instance, parse_tensor};
use tcpkit::pareto::EigenKind;
use tcpkit::{MeritOutcome, SearchBudget, TcpError, TcpInstance, Tensor};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tcpkit", version, about = "Tensor complementarity toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Grid spacing for search seeding.
    #[arg(long, global = true)]
    pub grid: Option<f64>,
    /// Number of local searches.
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker thread cap.
    #[arg(long, global = true, env = "TCPKIT_THREADS")]
    pub threads: Option<usize>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Print the JSON report instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print nothing on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
}

/// A vector given as `1,0.5,-2` or as a JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorArg(pub Vec<f64>);

fn parse_vector_arg(s: &str) -> std::result::Result<VectorArg, String> {
    let t = s.trim();
    let v = if t.starts_with('[') {
        tcpkit::io::parse_vector(t).map_err(|e| e.to_string())?
    } else {
        t.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?
    };
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(format!("component {} is not finite", i + 1));
    }
    Ok(VectorArg(v))
}

fn parse_class(s: &str) -> std::result::Result<TensorClass, String> {
    s.parse().map_err(|e: TcpError| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Enumerate,
    Merit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    H,
    Z,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Budgeted membership test for a tensor class.
    Classify {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, value_parser = parse_class)]
        class: TensorClass,
    },
    /// Solve TCP(A, q).
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Enumerate)]
        method: Method,
    },
    /// Smallest Pareto H- or Z-eigenvalue.
    Pareto {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::H)]
        kind: Kind,
    },
    /// min over the nonnegative ∞-sphere of max_i x_i (A x^{m-1})_i.
    Beta {
        #[arg(long)]
        tensor: PathBuf,
    },
    /// Evaluate the global solution bounds on given solutions.
    Bounds {
        #[arg(long)]
        instance: PathBuf,
        /// JSON file: an array of vectors or a `solve` report.
        #[arg(long, conflicts_with = "x")]
        solutions: Option<PathBuf>,
        #[arg(long, value_parser = parse_vector_arg, allow_hyphen_values = true)]
        x: Option<VectorArg>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Feasible vector from an S-tensor witness (searched when not given).
    Feasible {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_parser = parse_vector_arg, allow_hyphen_values = true)]
        witness: Option<VectorArg>,
    },
    /// Boundedness probe for {x ≥ 0 : q + A x^{m-1} ≥ 0, xᵀq + t A x^m ≤ s}.
    Gamma {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, value_parser = parse_vector_arg, allow_hyphen_values = true)]
        q: VectorArg,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Test one pair (x, y) against pseudo-monotonicity of q + A x^{m-1}.
    PmCheck {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_parser = parse_vector_arg, allow_hyphen_values = true)]
        x: VectorArg,
        #[arg(long, value_parser = parse_vector_arg, allow_hyphen_values = true)]
        y: VectorArg,
    },
}

/// Everything that determines a run's result.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub budget: SearchBudget,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    config: &'a RunConfig,
    timing: Timing,
    result: Value,
}

/// What a run produced; `main` prints `stdout`/`stderr` and exits with `code`.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub code: i32,
    /// Pretty JSON report; `None` when arguments or inputs were rejected.
    pub report: Option<String>,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutput {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        RunOutput {
            code: EXIT_INPUT,
            report: None,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

struct Outcome {
    result: Value,
    code: i32,
    summary: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => RunOutput {
                    code: EXIT_OK,
                    report: None,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => RunOutput {
                    code: EXIT_INPUT,
                    report: None,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    run_cli(cli)
}

pub fn run_cli(cli: Cli) -> RunOutput {
    let budget = effective_budget(&cli.command, &cli.common);
    if let Err(e) = budget.validate() {
        return RunOutput::input_error(e);
    }
    let config = RunConfig {
        command: cli.command,
        budget,
        threads: cli.common.threads,
        output: cli.common.output.clone(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        if t == 0 {
            return RunOutput::input_error("--threads must be at least 1");
        }
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return RunOutput::input_error(e),
    };
    let start = Instant::now();
    let outcome = match pool.install(|| dispatch(&config)) {
        Ok(o) => o,
        Err(e) => return RunOutput::input_error(e),
    };
    let report = Report {
        config: &config,
        timing: Timing {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        result: outcome.result,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Some(path) = &config.output {
        if let Err(e) = fs::write(path, &json) {
            return RunOutput::input_error(format!("cannot write {}: {e}", path.display()));
        }
    }
    let stdout = if cli.common.quiet {
        String::new()
    } else if cli.common.json {
        json.clone()
    } else {
        outcome.summary
    };
    RunOutput {
        code: outcome.code,
        report: Some(json),
        stdout,
        stderr: String::new(),
    }
}

fn effective_budget(command: &Command, common: &Common) -> SearchBudget {
    let mut b = match command {
        Command::Pareto { .. } => SearchBudget::pareto(),
        _ => SearchBudget::default(),
    };
    if let Some(g) = common.grid {
        b = b.with_grid(g);
    }
    if let Some(s) = common.starts {
        b = b.with_multistarts(s);
    }
    if let Some(t) = common.tol {
        b = b.with_tolerance(t);
    }
    b.with_seed(common.seed)
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Tcp(TcpError),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            CliError::Tcp(e) => write!(f, "{e}"),
            CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl From<TcpError> for CliError {
    fn from(e: TcpError) -> Self {
        CliError::Tcp(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn load_tensor(path: &Path) -> CliResult<Tensor> {
    Ok(parse_tensor(&read(path)?)?)
}

fn load_instance(path: &Path) -> CliResult<TcpInstance> {
    Ok(parse_instance(&read(path)?)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn dispatch(config: &RunConfig) -> CliResult<Outcome> {
    let budget = &config.budget;
    match &config.command {
        Command::Classify { tensor, class } => {
            let a = load_tensor(tensor)?;
            let r = tcpkit::classify(&a, *class, budget)?;
            let code = if r.verdict == Verdict::Holds { EXIT_OK } else { EXIT_NEGATIVE };
            let mut summary = format!("{class}: {:?} (objective {:.6e})\n", r.verdict, r.objective);
            if let Some(w) = &r.witness {
                let _ = writeln!(summary, "witness {}", fmt_vec(w));
            }
            Ok(Outcome {
                result: to_value(&r),
                code,
                summary,
            })
        }
        Command::Solve { instance, method } => {
            let inst = load_instance(instance)?;
            match method {
                Method::Enumerate => {
                    let sols = tcpkit::solve_enumerate(&inst, budget)?;
                    let mut summary = format!("{} solution(s)\n", sols.len());
                    for s in &sols {
                        let _ = writeln!(summary, "x = {}  residual {:.2e}", fmt_vec(&s.x), s.residuals.max());
                    }
                    Ok(Outcome {
                        code: if sols.is_empty() { EXIT_NEGATIVE } else { EXIT_OK },
                        result: serde_json::json!({ "method": "enumerate", "solutions": sols }),
                        summary,
                    })
                }
                Method::Merit => {
                    let out = tcpkit::solve_merit(&inst, budget)?;
                    let (code, summary) = match &out {
                        MeritOutcome::Found(s) => (
                            EXIT_OK,
                            format!("x = {}  residual {:.2e}\n", fmt_vec(&s.x), s.residuals.max()),
                        ),
                        MeritOutcome::NotFound { best_merit, .. } => {
                            (EXIT_NEGATIVE, format!("no solution found (best merit {best_merit:.3e})\n"))
                        }
                    };
                    Ok(Outcome {
                        result: serde_json::json!({ "method": "merit", "outcome": out }),
                        code,
                        summary,
                    })
                }
            }
        }
        Command::Pareto { tensor, kind } => {
            let a = load_tensor(tensor)?;
            let k = match kind {
                Kind::H => EigenKind::H,
                Kind::Z => EigenKind::Z,
            };
            let r = tcpkit::pareto_min(&a, k, budget)?;
            let mut summary = format!("{:?} value {:.10} at {}\n", r.kind, r.value, fmt_vec(&r.vector));
            if !r.symmetric_input {
                summary.push_str("note: input is not symmetric\n");
            }
            Ok(Outcome {
                result: to_value(&r),
                code: EXIT_OK,
                summary,
            })
        }
        Command::Beta { tensor } => {
            let a = load_tensor(tensor)?;
            let r = tcpkit::beta(&a, budget)?;
            Ok(Outcome {
                summary: format!("beta {:.10} at {}\n", r.value, fmt_vec(&r.vector)),
                result: to_value(&r),
                code: EXIT_OK,
            })
        }
        Command::Bounds {
            instance,
            solutions,
            x,
            lambda,
            mu,
            beta,
        } => {
            let inst = load_instance(instance)?;
            let xs: Vec<Vec<f64>> = match (solutions, x) {
                (Some(p), _) => load_solutions(p)?,
                (None, Some(v)) => vec![v.0.clone()],
                (None, None) => return Err(CliError::Usage("bounds needs --solutions or --x".into())),
            };
            if lambda.is_none() && mu.is_none() && beta.is_none() {
                return Err(CliError::Usage("bounds needs at least one of --lambda, --mu, --beta".into()));
            }
            let mut entries = Vec::new();
            let mut all = true;
            let mut summary = String::new();
            for (i, x) in xs.iter().enumerate() {
                let mut reports: Vec<BoundReport> = Vec::new();
                if let Some(l) = lambda {
                    reports.push(tcpkit::bound_m_norm(&inst, x, *l)?);
                }
                if let Some(m) = mu {
                    reports.push(tcpkit::bound_2_norm(&inst, x, *m)?);
                }
                if let Some(b) = beta {
                    reports.push(tcpkit::bound_inf_norm(&inst, x, *b)?);
                }
                for r in &reports {
                    all &= r.satisfied;
                    let _ = writeln!(
                        summary,
                        "#{i} {:?}: {:.6} <= {:.6} {}",
                        r.kind,
                        r.lhs,
                        r.rhs,
                        if r.satisfied { "ok" } else { "VIOLATED" }
                    );
                }
                entries.push(serde_json::json!({ "x": x, "reports": reports }));
            }
            Ok(Outcome {
                result: serde_json::json!({ "solutions": entries, "all_satisfied": all }),
                code: if all { EXIT_OK } else { EXIT_NEGATIVE },
                summary,
            })
        }
        Command::Feasible { instance, witness } => {
            let inst = load_instance(instance)?;
            let (y, source) = match witness {
                Some(v) => (v.0.clone(), "given"),
                None => {
                    let r = find_s_witness(inst.tensor(), budget)?;
                    match r.witness {
                        Some(w) => (w, "search"),
                        None => {
                            return Ok(Outcome {
                                result: serde_json::json!({ "found": false, "s_check": r }),
                                code: EXIT_NEGATIVE,
                                summary: "no S-tensor witness found\n".into(),
                            })
                        }
                    }
                }
            };
            let x = tcpkit::find_feasible(&inst, &y)?;
            let w = inst.map(&x)?;
            Ok(Outcome {
                summary: format!("feasible x = {}\n", fmt_vec(&x)),
                result: serde_json::json!({
                    "found": true,
                    "x": x,
                    "w": w,
                    "witness": y,
                    "witness_source": source,
                }),
                code: EXIT_OK,
            })
        }
        Command::Gamma { tensor, q, s, t } => {
            let a = load_tensor(tensor)?;
            let p = tcpkit::gamma_probe(&a, &q.0, *s, *t, budget)?;
            let mut summary = format!("{:?} ({} member(s) found)\n", p.verdict, p.members_found.len());
            if let Some(d) = &p.escape_direction {
                let _ = writeln!(summary, "escape direction {}", fmt_vec(d));
            }
            Ok(Outcome {
                code: if p.verdict == GammaVerdict::LikelyBounded { EXIT_OK } else { EXIT_NEGATIVE },
                result: to_value(&p),
                summary,
            })
        }
        Command::PmCheck { instance, x, y } => {
            let inst = load_instance(instance)?;
            let r = tcpkit::check_pseudomonotone_violation(&inst, &x.0, &y.0)?;
            Ok(Outcome {
                summary: format!(
                    "(x-y)'F(y) = {}  (x-y)'F(x) = {}  violated = {}\n",
                    r.lhs, r.rhs, r.violated
                ),
                result: to_value(&r),
                code: EXIT_OK,
            })
        }
    }
}

/// Reads a JSON array of vectors, or the `x` fields of a `solve` report.
fn load_solutions(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Tcp(TcpError::Malformed(e.to_string())))?;
    let malformed = || CliError::Tcp(TcpError::Malformed(format!("{}: no solution vectors", path.display())));
    let list = match &v {
        Value::Array(items) => items.clone(),
        Value::Object(_) => {
            let result = v.get("result").unwrap_or(&v);
            if let Some(sols) = result.get("solutions").and_then(Value::as_array) {
                sols.iter().filter_map(|s| s.get("x").cloned()).collect()
            } else if let Some(x) = result.pointer("/outcome/Found/x") {
                vec![x.clone()]
            } else {
                return Err(malformed());
            }
        }
        _ => return Err(malformed()),
    };
    list.into_iter()
        .map(|x| {
            let x: Vec<f64> = serde_json::from_value(x).map_err(|e| CliError::Tcp(TcpError::Malformed(e.to_string())))?;
            if let Some(i) = x.iter().position(|v| !v.is_finite()) {
                return Err(CliError::Tcp(TcpError::NonFinite(i)));
            }
            Ok(x)
        })
        .collect()
}
