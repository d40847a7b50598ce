//! Command-line front end for the device-independent QKD key-rate
//! calculations: bound and rate evaluation, threshold solving, parameter
//! sweeps, oracle verification, min-entropy bounds, and reproduction of
//! the published threshold tables and figure datasets.

mod output;
mod spec;
mod tables;
mod verify;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diqkd_core::*;
use serde_json::Value;

use output::{num, opt_num, Format, Report, Table};

type AppResult<T> = std::result::Result<T, AppError>;

#[derive(Debug)]
pub enum AppError {
    /// Bad arguments or malformed input files (exit status 2).
    Validation(String),
    /// Bracket, convergence, or feasibility failures (exit status 3).
    Numerical(String),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Validation(msg) => write!(f, "{msg}"),
            AppError::Numerical(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::InvalidDistribution { .. } => {
                AppError::Validation(e.to_string())
            }
            Error::BracketFailure { .. }
            | Error::Infeasible { .. }
            | Error::NoSignChange { .. } => AppError::Numerical(e.to_string()),
        }
    }
}

impl AppError {
    fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "diqkd",
    version,
    about = "Device-independent QKD key-rate bounds for asymmetric CHSH expressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Pretty)]
    format: FormatArg,
    /// Write the output to this file (atomically) instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for the randomized verification case set
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Pretty,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Depolarizing,
    LossMaxent,
    LossPartial,
}

#[derive(Args)]
struct ModelArgs {
    /// Channel model
    #[arg(long, value_enum)]
    model: ModelName,
    /// Depolarizing error rate
    #[arg(long)]
    delta: Option<f64>,
    /// Global detection efficiency
    #[arg(long)]
    eta: Option<f64>,
    /// Partial-entanglement angle of the source state
    #[arg(long)]
    theta: Option<f64>,
    /// Alice's second measurement angle (partially entangled model)
    #[arg(long = "phi-a")]
    phi_a: Option<f64>,
    /// Source visibility (loss models)
    #[arg(long, default_value_t = 1.0)]
    visibility: f64,
    /// Use Bob's S_alpha-optimal Bell-test measurements
    #[arg(long)]
    bob_optimal: bool,
}

impl ModelArgs {
    fn to_model(&self) -> AppResult<ChannelModel> {
        let require = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| AppError::Validation(format!("--{what} is required for this model")))
        };
        let model = match self.model {
            ModelName::Depolarizing => ChannelModel::Depolarizing {
                delta: require(self.delta, "delta")?,
                bob_optimal: self.bob_optimal,
            },
            ModelName::LossMaxent => ChannelModel::LossMaxEntangled {
                eta: require(self.eta, "eta")?,
                bob_optimal: self.bob_optimal,
                visibility: self.visibility,
            },
            ModelName::LossPartial => ChannelModel::LossPartialEntangled {
                eta: require(self.eta, "eta")?,
                theta: require(self.theta, "theta")?,
                phi_a: require(self.phi_a, "phi-a")?,
                visibility: self.visibility,
            },
        };
        model.validate()?;
        Ok(model)
    }

    /// Threshold template: the swept channel parameter may be omitted.
    fn to_template(&self) -> AppResult<ChannelModel> {
        let model = match self.model {
            ModelName::Depolarizing => ChannelModel::Depolarizing {
                delta: self.delta.unwrap_or(0.0),
                bob_optimal: self.bob_optimal,
            },
            ModelName::LossMaxent => ChannelModel::LossMaxEntangled {
                eta: self.eta.unwrap_or(1.0),
                bob_optimal: self.bob_optimal,
                visibility: self.visibility,
            },
            ModelName::LossPartial => ChannelModel::LossPartialEntangled {
                eta: self.eta.unwrap_or(1.0),
                theta: self.theta.unwrap_or(0.5),
                phi_a: self.phi_a.unwrap_or(0.5),
                visibility: self.visibility,
            },
        };
        model.validate()?;
        Ok(model)
    }

    fn echo(&self) -> Vec<(&'static str, Value)> {
        let name = match self.model {
            ModelName::Depolarizing => "depolarizing",
            ModelName::LossMaxent => "loss-maxent",
            ModelName::LossPartial => "loss-partial",
        };
        let mut v = vec![("model", Value::String(name.into()))];
        if let Some(x) = self.delta {
            v.push(("delta", num(x)));
        }
        if let Some(x) = self.eta {
            v.push(("eta", num(x)));
        }
        if let Some(x) = self.theta {
            v.push(("theta", num(x)));
        }
        if let Some(x) = self.phi_a {
            v.push(("phi_a", num(x)));
        }
        v.push(("visibility", num(self.visibility)));
        v.push(("bob_optimal", Value::Bool(self.bob_optimal)));
        v
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the entropy bound gbar_{q,alpha}(s)
    Bound {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        s: f64,
    },
    /// Devetak-Winter key rate for a channel model
    Rate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Solve the zero-rate threshold in the channel parameter
    Threshold {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated nuisance parameters to optimize
        /// (alpha, q, theta, phi-a)
        #[arg(long, value_delimiter = ',')]
        optimize: Vec<String>,
        /// Solve in the maximal-preprocessing limit q -> 1/2
        #[arg(long)]
        maxq: bool,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Override the bisection bracket
        #[arg(long)]
        bracket_lo: Option<f64>,
        #[arg(long)]
        bracket_hi: Option<f64>,
    },
    /// Sweep a parameter and emit one row per grid point
    Sweep {
        /// JSON sweep specification file (overrides the inline flags)
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        parameter: Option<String>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Scenario kind: bound, best-alpha, rate, critical-eta
        #[arg(long)]
        scenario: Option<String>,
        #[command(flatten)]
        model: ModelArgsOpt,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long, value_delimiter = ',')]
        optimize: Vec<String>,
        #[arg(long)]
        maxq: bool,
    },
    /// Run the qubit-attack oracle suites against the analytic bounds
    Verify {
        #[arg(long = "grid-n", default_value_t = 120)]
        grid_n: usize,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Guessing-probability and min-entropy bounds
    MinEntropy {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        s: f64,
        /// Also evaluate the Tsirelson bound of beta <A1> + S_alpha
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Recompute a published table (1-4) or figure dataset (1-4)
    Reproduce {
        #[arg(long, conflicts_with = "figure")]
        table: Option<u8>,
        #[arg(long)]
        figure: Option<u8>,
    },
}

/// Optional model flags for `sweep` (the model is not always needed).
#[derive(Args)]
struct ModelArgsOpt {
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long = "phi-a")]
    phi_a: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    visibility: f64,
    #[arg(long)]
    bob_optimal: bool,
}

fn main() {
    if let Ok(n) = std::env::var("NUM_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli) {
        Ok((report, ok)) => {
            let format = match cli.format {
                FormatArg::Pretty => Format::Pretty,
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            let text = report.render(format, started.elapsed().as_millis());
            if let Err(e) = output::emit(&text, cli.output.as_deref()) {
                eprintln!("error: cannot write output: {e}");
                std::process::exit(2);
            }
            if !ok {
                eprintln!("error: verification exceeded tolerance");
                std::process::exit(3);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: &Cli) -> AppResult<(Report, bool)> {
    match &cli.command {
        Command::Bound { q, alpha, s } => {
            let params = BoundParams::new(*q, *alpha)?;
            let bound = EntropyBound::new(params)?;
            let ev = bound.evaluate(BellValue(*s))?;
            Ok((
                Report {
                    command: "bound",
                    inputs: vec![("q", num(*q)), ("alpha", num(*alpha)), ("s", num(*s))],
                    values: vec![
                        ("value", num(ev.value)),
                        (
                            "branch",
                            Value::String(tables::branch_name(Some(ev.branch)).into()),
                        ),
                        ("s_star", opt_num(ev.s_star)),
                        ("classical_bound", num(BellValue::classical_bound(*alpha))),
                        ("quantum_bound", num(BellValue::quantum_bound(*alpha))),
                    ],
                    table: None,
                },
                true,
            ))
        }
        Command::Rate { model, q, alpha } => {
            let channel = model.to_model()?;
            let r = devetak_winter(&channel, *q, *alpha)?;
            let mut inputs = model.echo();
            inputs.push(("q", num(*q)));
            inputs.push(("alpha", num(*alpha)));
            Ok((
                Report {
                    command: "rate",
                    inputs,
                    values: vec![
                        ("rate", num(r.rate)),
                        ("s_alpha", num(r.s_alpha.value())),
                        ("entropy_bound", num(r.entropy_bound.value)),
                        (
                            "branch",
                            Value::String(tables::branch_name(Some(r.entropy_bound.branch)).into()),
                        ),
                        ("s_star", opt_num(r.entropy_bound.s_star)),
                        ("h_a_given_b", num(r.h_a_given_b)),
                    ],
                    table: None,
                },
                true,
            ))
        }
        Command::Threshold {
            model,
            optimize,
            maxq,
            q,
            alpha,
            bracket_lo,
            bracket_hi,
        } => {
            let template = model.to_template()?;
            let flags = spec::parse_flags(optimize)?;
            let problem = RateProblem {
                template,
                flags,
                q: *q,
                alpha: *alpha,
                maxq: *maxq,
            };
            let param = match template {
                ChannelModel::Depolarizing { .. } => ChannelParameter::Delta,
                _ => ChannelParameter::Eta,
            };
            let bracket = match (bracket_lo, bracket_hi) {
                (Some(lo), Some(hi)) => Some((*lo, *hi)),
                (None, None) => None,
                _ => {
                    return Err(AppError::Validation(
                        "--bracket-lo and --bracket-hi must be given together".into(),
                    ))
                }
            };
            let th = find_threshold(&problem, param, bracket)?;
            let mut inputs = model.echo();
            inputs.push(("q", num(*q)));
            inputs.push(("alpha", num(*alpha)));
            inputs.push(("maxq", Value::Bool(*maxq)));
            inputs.push((
                "optimize",
                Value::Array(optimize.iter().map(|s| Value::String(s.clone())).collect()),
            ));
            Ok((
                Report {
                    command: "threshold",
                    inputs,
                    values: vec![
                        (
                            "channel_parameter",
                            Value::String(
                                match param {
                                    ChannelParameter::Delta => "delta",
                                    ChannelParameter::Eta => "eta",
                                }
                                .into(),
                            ),
                        ),
                        ("critical_value", num(th.critical_value)),
                        ("critical_percent", num(th.critical_value * 100.0)),
                        ("optimal_alpha", opt_num(th.optimal_alpha)),
                        ("optimal_q", opt_num(th.optimal_q)),
                        ("optimal_theta", opt_num(th.optimal_theta)),
                        ("optimal_phi_a", opt_num(th.optimal_phi_a)),
                        ("iterations", Value::from(th.iterations as u64)),
                        ("residual_rate", num(th.residual_rate)),
                    ],
                    table: None,
                },
                true,
            ))
        }
        Command::Sweep {
            spec: spec_path,
            parameter,
            lo,
            hi,
            points,
            scenario,
            model,
            q,
            alpha,
            s,
            optimize,
            maxq,
        } => {
            let sweep_spec = if let Some(path) = spec_path {
                spec::SpecFile::load(path)?.to_sweep()?
            } else {
                let parameter = parameter.clone().ok_or_else(|| {
                    AppError::Validation("--parameter is required without --spec".into())
                })?;
                let lo = lo.ok_or_else(|| {
                    AppError::Validation("--lo is required without --spec".into())
                })?;
                let hi = hi.ok_or_else(|| {
                    AppError::Validation("--hi is required without --spec".into())
                })?;
                let kind = scenario.clone().unwrap_or_else(|| {
                    if model.model.is_some() {
                        "rate".into()
                    } else {
                        "bound".into()
                    }
                });
                let model_spec = model.model.map(|name| spec::ModelSpec {
                    name: match name {
                        ModelName::Depolarizing => "depolarizing".into(),
                        ModelName::LossMaxent => "loss-maxent".into(),
                        ModelName::LossPartial => "loss-partial".into(),
                    },
                    delta: model.delta.unwrap_or(0.0),
                    eta: model.eta.unwrap_or(1.0),
                    theta: model.theta.unwrap_or(0.5),
                    phi_a: model.phi_a.unwrap_or(0.5),
                    visibility: model.visibility,
                    bob_optimal: model.bob_optimal,
                });
                spec::SpecFile {
                    parameter,
                    lo,
                    hi,
                    points: *points,
                    scenario: spec::ScenarioSpec {
                        kind,
                        model: model_spec,
                        q: *q,
                        alpha: *alpha,
                        s: *s,
                        optimize: optimize.clone(),
                        maxq: *maxq,
                    },
                }
                .to_sweep()?
            };
            Ok((run_sweep(&sweep_spec)?, true))
        }
        Command::Verify { grid_n, cases } => {
            let outcome = verify::run(*grid_n, *cases, cli.seed.unwrap_or(7))?;
            Ok((outcome.report, outcome.pass))
        }
        Command::MinEntropy { alpha, s, beta } => {
            let pg = guessing_probability_bound(*alpha, BellValue(*s))?;
            let hmin = min_entropy_bound(*alpha, BellValue(*s))?;
            let mut values = vec![
                ("guessing_probability", num(pg)),
                ("min_entropy", num(hmin)),
            ];
            if alpha.abs() < 1.0 {
                values.push(("stitch_point", num(guessing_stitch_point(*alpha))));
                values.push(("beta_star", num(tsirelson_beta_star(*alpha))));
            }
            let mut inputs = vec![("alpha", num(*alpha)), ("s", num(*s))];
            if let Some(b) = beta {
                inputs.push(("beta", num(*b)));
                values.push((
                    "tsirelson_i_alpha_beta",
                    num(tsirelson_i_alpha_beta(*alpha, *b)),
                ));
            }
            Ok((
                Report {
                    command: "min-entropy",
                    inputs,
                    values,
                    table: None,
                },
                true,
            ))
        }
        Command::Reproduce { table, figure } => match (table, figure) {
            (Some(t), None) => Ok((tables::reproduce_table(*t)?, true)),
            (None, Some(f)) => Ok((tables::reproduce_figure(*f)?, true)),
            _ => Err(AppError::Validation(
                "reproduce needs exactly one of --table or --figure".into(),
            )),
        },
    }
}

fn run_sweep(spec: &SweepSpec) -> AppResult<Report> {
    use rayon::prelude::*;
    spec.validate()?;
    // rows are independent; compute in parallel, reassemble by index
    let rows: Vec<SweepRow> = (0..spec.points)
        .into_par_iter()
        .map(|i| sweep_row(spec, i))
        .collect();
    let mut table_rows = Vec::with_capacity(rows.len());
    for row in rows {
        let mut cells = vec![num(row.value)];
        match row.outcome {
            Ok(out) => {
                cells.extend([
                    opt_num(out.s_alpha),
                    opt_num(out.bound_value),
                    Value::String(tables::branch_name(out.branch).into()),
                    opt_num(out.s_star),
                    opt_num(out.h_a_given_b),
                    opt_num(out.rate),
                    opt_num(out.coefficient),
                    opt_num(out.alpha),
                    opt_num(out.q),
                    opt_num(out.theta),
                    opt_num(out.phi_a),
                    opt_num(out.critical_eta),
                    Value::String(String::new()),
                ]);
            }
            Err(e) => {
                for _ in 0..12 {
                    cells.push(Value::Null);
                }
                cells.push(Value::String(e.to_string()));
            }
        }
        table_rows.push(cells);
    }
    let parameter = match spec.parameter {
        SweepParameter::Delta => "delta",
        SweepParameter::Eta => "eta",
        SweepParameter::S => "s",
        SweepParameter::Alpha => "alpha",
        SweepParameter::Q => "q",
        SweepParameter::Theta => "theta",
    };
    Ok(Report {
        command: "sweep",
        inputs: vec![
            ("parameter", Value::String(parameter.into())),
            ("lo", num(spec.lo)),
            ("hi", num(spec.hi)),
            ("points", Value::from(spec.points as u64)),
        ],
        values: vec![],
        table: Some(Table {
            headers: vec![
                "value",
                "s_alpha",
                "entropy_bound",
                "branch",
                "s_star",
                "h_a_given_b",
                "rate",
                "coefficient",
                "alpha",
                "q",
                "theta",
                "phi_a",
                "critical_eta",
                "error",
            ],
            rows: table_rows,
        }),
    })
}
