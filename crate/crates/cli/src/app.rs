//! Argument parsing, run configuration and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rdpce::analysis::{Experiment, Method, ReferencePolicy, Statistic, SweepCurve};
use rdpce::exec::Execution;
use rdpce::grid::{DealiasRule, PeriodicGrid};
use rdpce::ipce::CubicProduct;
use rdpce::models::{ModelKind, ModelSpec};
use rdpce::samplers::SamplerKind;
use rdpce::solvers::{Scheme, SolverOptions, TimeGrid};
use serde::Serialize;

use crate::presets::{self, field_file, ipce_file, nipce_file, sweep_file, Job, JobKind, Part, Scale};
use crate::tasks::{dump_tensors, run_job, write_outcome};
use crate::Failure;

pub const OUTPUT_ENV: &str = "RDPCE_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "rdpce",
    version,
    about = "Polynomial chaos solvers for random reaction-diffusion equations",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = OUTPUT_ENV, default_value = "out")]
    pub out: PathBuf,
    /// Reduced resolution for quick runs.
    #[arg(long, global = true)]
    pub desk: bool,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Points on each ETDRK4 contour.
    #[arg(long, global = true, default_value_t = 32, value_parser = clap::value_parser!(u64).range(4..))]
    pub contour: u64,
    /// Spectral dealiasing: 2/3, 1/2 or off.
    #[arg(long, global = true, default_value = "2/3", value_parser = parse_from_str::<DealiasRule>)]
    pub dealias: DealiasRule,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deterministic solve at one parameter value; writes the final field.
    Det(ModelArgs),
    /// Intrusive chaos error curves.
    Ipce(ModelArgs),
    /// Non-intrusive chaos error curves.
    Nipce(ModelArgs),
    /// Final-time errors over step counts, or runtime ratios over degrees.
    Sweep(ModelArgs),
    /// Gray-Scott error figure or pattern fields.
    Grayscott(ModelArgs),
    /// Every preset in order.
    Reproduce {
        /// Restrict to these presets.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// List preset names.
    Presets,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Named figure preset.
    #[arg(long, conflicts_with_all = ["model", "scheme"])]
    pub preset: Option<String>,
    #[arg(long, value_parser = parse_from_str::<ModelKind>)]
    #[serde(serialize_with = "maybe_display")]
    pub model: Option<ModelKind>,
    #[arg(long, value_parser = parse_from_str::<Scheme>)]
    #[serde(serialize_with = "maybe_display")]
    pub scheme: Option<Scheme>,
    /// Diffusion coefficient.
    #[arg(long, short = 'D', value_parser = non_negative)]
    pub diffusion: Option<f64>,
    /// Chaos degrees (iPCE curves) or the projection degree (niPCE).
    #[arg(long, short = 'N', value_delimiter = ',')]
    pub degree: Vec<usize>,
    /// Time steps, or the list of step counts of a sweep.
    #[arg(long, short = 'M', value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: Vec<u64>,
    /// Final time.
    #[arg(long, short = 'T', value_parser = positive)]
    pub final_time: Option<f64>,
    /// Grid points per dimension.
    #[arg(long, short = 'p', value_parser = clap::value_parser!(u64).range(4..))]
    pub points: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=2))]
    pub dim: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_from_str::<SamplerKind>)]
    #[serde(serialize_with = "all_display")]
    pub sampler: Vec<SamplerKind>,
    /// Samples per niPCE run.
    #[arg(long, short = 'q', value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
    /// Lower end of the parameter interval.
    #[arg(long, short = 'a', allow_negative_numbers = true)]
    pub lower: Option<f64>,
    /// Upper end of the parameter interval.
    #[arg(long, short = 'b', allow_negative_numbers = true)]
    pub upper: Option<f64>,
    /// Parameter value of a deterministic solve; defaults to the midpoint.
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo repetitions averaged into one curve.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    #[arg(long, default_value = "mean", value_parser = parse_from_str::<Statistic>)]
    #[serde(serialize_with = "as_display")]
    pub statistic: Statistic,
    /// Cubic chaos product: tensor or truncated.
    #[arg(long, default_value = "tensor", value_parser = parse_from_str::<CubicProduct>)]
    #[serde(serialize_with = "as_display")]
    pub product: CubicProduct,
    /// Square instead of cube the exponent of the 1D Gray-Scott initial `v`.
    #[arg(long)]
    pub square_exponent: bool,
    /// Also write the Galerkin tensors of the largest degree as CSV.
    #[arg(long)]
    pub dump_tensors: bool,
}

fn as_display<T: ToString, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn maybe_display<T: ToString, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn all_display<T: ToString, S: serde::Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

fn parse_from_str<T: std::str::FromStr<Err = rdpce::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: rdpce::Error| e.to_string())
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not a non-negative finite number")),
        Err(e) => Err(e.to_string()),
    }
}

/// Everything that determines the output, recorded in every sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub scale: Scale,
    pub contour_points: usize,
    pub dealias: String,
    pub args: Option<ModelArgs>,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl ModelArgs {
    fn has_custom_fields(&self) -> bool {
        self.model.is_some() || self.scheme.is_some()
    }

    fn spec(&self) -> Result<ModelSpec, Failure> {
        let kind = self.model.ok_or_else(|| usage("either --preset or --model is required"))?;
        let mut spec = ModelSpec::scalar(kind, self.diffusion.unwrap_or(0.0));
        if kind == ModelKind::GrayScott {
            spec = ModelSpec::gray_scott();
            if let Some(d) = self.diffusion {
                spec.diffusion = d;
            }
            spec.square_exponent = self.square_exponent;
        }
        if self.lower.is_some() || self.upper.is_some() {
            spec = spec.with_interval(self.lower.unwrap_or(spec.lower), self.upper.unwrap_or(spec.upper));
        }
        spec.validate()?;
        Ok(spec)
    }

    fn scheme(&self) -> Result<Scheme, Failure> {
        self.scheme.ok_or_else(|| usage("--scheme is required without --preset"))
    }

    fn grid(&self, scale: Scale) -> Result<PeriodicGrid, Failure> {
        let p = self.points.map(|p| p as usize).unwrap_or_else(|| scale.points(presets::PAPER_POINTS));
        Ok(PeriodicGrid::new(self.dim as usize, p)?)
    }

    fn single_steps(&self, default: usize) -> Result<usize, Failure> {
        match self.steps.as_slice() {
            [] => Ok(default),
            [m] => Ok(*m as usize),
            _ => Err(usage("give a single step count")),
        }
    }

    fn time(&self, default_steps: usize) -> Result<TimeGrid, Failure> {
        Ok(TimeGrid::new(self.final_time.unwrap_or(2.0), self.single_steps(default_steps)?)?)
    }

    fn experiment(&self, scale: Scale) -> Result<Experiment, Failure> {
        let spec = self.spec()?;
        let scheme = self.scheme()?;
        let grid = self.grid(scale)?;
        scheme.check_grid(&grid)?;
        let mut exp = Experiment::new(spec, scheme, grid, self.time(100)?);
        exp.statistic = self.statistic;
        exp.tolerate_blow_up = true;
        if scale == Scale::Desk && !(spec.kind == ModelKind::Linear && spec.diffusion == 0.0) {
            exp.reference = scale.reference();
        } else {
            exp.reference = ReferencePolicy::Auto;
        }
        Ok(exp)
    }

    fn intrusive_methods(&self) -> Vec<Method> {
        let degrees = if self.degree.is_empty() { presets::FIGURE_DEGREES.to_vec() } else { self.degree.clone() };
        degrees
            .into_iter()
            .map(|degree| Method::Intrusive {
                degree,
                product: self.product,
            })
            .collect()
    }

    fn non_intrusive_methods(&self, scale: Scale) -> Result<Vec<Method>, Failure> {
        let degree = match self.degree.as_slice() {
            [] => 10,
            [n] => *n,
            _ => return Err(usage("niPCE takes a single projection degree")),
        };
        let samplers = if self.sampler.is_empty() {
            vec![SamplerKind::MonteCarlo, SamplerKind::Sobol, SamplerKind::Gauss]
        } else {
            self.sampler.clone()
        };
        let q = self.samples.map(|q| q as usize).unwrap_or_else(|| scale.samples());
        Ok(samplers
            .into_iter()
            .map(|sampler| Method::NonIntrusive {
                sampler,
                q,
                degree,
                seed: self.seed,
                repeats: if sampler == SamplerKind::MonteCarlo { self.repeats as usize } else { 1 },
            })
            .collect())
    }
}

/// Jobs for a subcommand, from a preset or from explicit flags.
pub fn plan(command: &Command, scale: Scale) -> Result<Vec<Job>, Failure> {
    let (args, accepts, part): (&ModelArgs, fn(&str) -> bool, Part) = match command {
        Command::Det(a) => (a, |_| false, Part::Both),
        Command::Ipce(a) => (
            a,
            |n| presets::is_error_figure(n) || n == presets::LINEAR_2D || n == presets::GRAY_SCOTT_1D,
            Part::Intrusive,
        ),
        Command::Nipce(a) => (a, presets::is_error_figure, Part::NonIntrusive),
        Command::Sweep(a) => (a, |n| presets::is_sweep(n) || n == presets::RUNTIME, Part::Both),
        Command::Grayscott(a) => (
            a,
            |n| n == presets::GRAY_SCOTT_1D || n == presets::GRAY_SCOTT_2D,
            Part::Both,
        ),
        Command::Reproduce { only } => {
            let names = presets::preset_names();
            if let Some(bad) = only.iter().find(|n| !names.contains(n)) {
                return Err(usage(format!("unknown preset '{bad}'")));
            }
            let mut jobs = Vec::new();
            for name in names.iter().filter(|n| only.is_empty() || only.contains(n)) {
                jobs.extend(presets::preset_jobs(name, scale, Part::Both)?);
            }
            return Ok(jobs);
        }
        Command::Presets => return Ok(Vec::new()),
    };
    if let Some(name) = &args.preset {
        if !presets::preset_names().contains(name) {
            return Err(usage(format!(
                "unknown preset '{name}'; known presets: {}",
                presets::preset_names().join(", ")
            )));
        }
        if !accepts(name) {
            return Err(usage(format!("preset '{name}' does not belong to this subcommand")));
        }
        return Ok(presets::preset_jobs(name, scale, part)?);
    }
    if !args.has_custom_fields() {
        return Err(usage("either --preset or --model and --scheme are required"));
    }
    let job = match command {
        Command::Det(_) | Command::Grayscott(_) => {
            let spec = args.spec()?;
            if matches!(command, Command::Grayscott(_)) && spec.kind != ModelKind::GrayScott {
                return Err(usage("grayscott needs --model grayscott"));
            }
            let scheme = args.scheme()?;
            let grid = args.grid(scale)?;
            scheme.check_grid(&grid)?;
            let time = args.time(100)?;
            let xi = args.xi.unwrap_or_else(|| spec.midpoint());
            Job {
                file: field_file(&spec, scheme, xi, &grid, &time),
                preset: String::new(),
                kind: JobKind::Field {
                    spec,
                    scheme,
                    xi,
                    grid,
                    time,
                },
            }
        }
        Command::Ipce(_) => {
            let experiment = args.experiment(scale)?;
            Job {
                file: ipce_file(experiment.scheme, experiment.grid.dim(), experiment.statistic, &experiment.spec),
                preset: String::new(),
                kind: JobKind::Errors {
                    methods: args.intrusive_methods(),
                    experiment,
                },
            }
        }
        Command::Nipce(_) => {
            let experiment = args.experiment(scale)?;
            Job {
                file: nipce_file(experiment.scheme, experiment.statistic, &experiment.spec),
                preset: String::new(),
                kind: JobKind::Errors {
                    methods: args.non_intrusive_methods(scale)?,
                    experiment,
                },
            }
        }
        Command::Sweep(_) => {
            let steps: Vec<usize> = if args.steps.is_empty() {
                (0..4).map(|k| 10 << k).collect()
            } else {
                args.steps.iter().map(|&m| m as usize).collect()
            };
            let sweep_args = ModelArgs {
                steps: vec![*steps.iter().max().unwrap() as u64],
                ..args.clone()
            };
            let experiment = sweep_args.experiment(scale)?;
            let degree = args.degree.first().copied().unwrap_or(presets::SWEEP_DEGREE);
            let q = args.samples.map(|q| q as usize).unwrap_or(presets::SWEEP_SAMPLES);
            let curves = vec![
                SweepCurve {
                    scheme: experiment.scheme,
                    method: Method::Intrusive {
                        degree,
                        product: args.product,
                    },
                },
                SweepCurve {
                    scheme: experiment.scheme,
                    method: Method::non_intrusive(SamplerKind::Gauss, q),
                },
            ];
            Job {
                file: sweep_file(experiment.statistic, &experiment.spec),
                preset: String::new(),
                kind: JobKind::Sweep {
                    experiment,
                    curves,
                    steps,
                },
            }
        }
        Command::Reproduce { .. } | Command::Presets => unreachable!(),
    };
    Ok(vec![job])
}

fn options(cli: &Cli) -> SolverOptions {
    SolverOptions {
        contour_points: cli.contour as usize,
        dealias: cli.dealias,
        execution: if cli.sequential { Execution::Sequential } else { Execution::default() },
        ..SolverOptions::default()
    }
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::Det(_) => "det",
        Command::Ipce(_) => "ipce",
        Command::Nipce(_) => "nipce",
        Command::Sweep(_) => "sweep",
        Command::Grayscott(_) => "grayscott",
        Command::Reproduce { .. } => "reproduce",
        Command::Presets => "presets",
    }
}

fn model_args(command: &Command) -> Option<&ModelArgs> {
    match command {
        Command::Det(a) | Command::Ipce(a) | Command::Nipce(a) | Command::Sweep(a) | Command::Grayscott(a) => Some(a),
        Command::Reproduce { .. } | Command::Presets => None,
    }
}

/// Runs a parsed command. Jobs of `reproduce` that fail are reported and
/// skipped; the first failure is returned at the end.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, Failure> {
    if let Command::Presets = cli.command {
        for name in presets::preset_names() {
            println!("{name}");
        }
        return Ok(Vec::new());
    }
    let scale = if cli.desk { Scale::Desk } else { Scale::Paper };
    let jobs = plan(&cli.command, scale)?;
    let options = options(cli);
    let config = RunConfig {
        subcommand: subcommand_name(&cli.command).into(),
        scale,
        contour_points: options.contour_points,
        dealias: options.dealias.id().into(),
        args: model_args(&cli.command).cloned(),
    };
    let config_json = serde_json::to_value(&config).map_err(|e| Failure::Io(e.into()))?;
    let mut written = Vec::new();
    let mut first_failure = None;
    for job in &jobs {
        eprintln!("running {} ({})", job.file, if job.preset.is_empty() { "custom" } else { &job.preset });
        match run_job(job, scale, &options) {
            Ok(mut outcome) => {
                outcome.meta["run_config"] = config_json.clone();
                let path = write_outcome(&cli.out, &outcome)?;
                eprintln!("wrote {}", path.display());
                written.push(path);
            }
            Err(e) if matches!(cli.command, Command::Reproduce { .. }) => {
                eprintln!("failed {}: {e}", job.file);
                first_failure.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(args) = model_args(&cli.command).filter(|a| a.dump_tensors) {
        let spec = match &args.preset {
            Some(name) => presets::preset_model(name).ok_or_else(|| usage("preset has no single model"))?,
            None => args.spec()?,
        };
        let degree = args.degree.iter().copied().max().unwrap_or(*presets::FIGURE_DEGREES.last().unwrap());
        for path in dump_tensors(&cli.out.join("tensors"), &spec, degree)? {
            eprintln!("wrote {}", path.display());
            written.push(path);
        }
    }
    match first_failure {
        Some(e) => Err(e),
        None => Ok(written),
    }
}

/// Parses `argv`, runs it and returns the process exit status.
pub fn run_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
