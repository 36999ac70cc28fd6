//! Named experiment presets, one per published figure, at paper or desk scale.

use rdpce::analysis::{Experiment, Method, ReferencePolicy, Statistic, SweepCurve};
use rdpce::grid::PeriodicGrid;
use rdpce::ipce::CubicProduct;
use rdpce::models::{ModelKind, ModelSpec};
use rdpce::samplers::SamplerKind;
use rdpce::solvers::{Scheme, TimeGrid};
use rdpce::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Paper,
    Desk,
}

/// Spatial points per dimension at paper scale.
pub const PAPER_POINTS: usize = 128;
pub const DESK_POINT_DIVISOR: usize = 4;
pub const DESK_STEP_DIVISOR: usize = 10;
pub const PAPER_SAMPLES: usize = 50;
pub const DESK_SAMPLES: usize = 10;
pub const PAPER_MC_REPEATS: usize = 10;
pub const DESK_MC_REPEATS: usize = 3;
pub const PAPER_REFERENCE: (usize, usize) = (1000, 200);
pub const DESK_REFERENCE: (usize, usize) = (1000, 50);
/// Chaos degrees of the error figures.
pub const FIGURE_DEGREES: [usize; 5] = [1, 2, 3, 4, 5];
/// Degree and sample count of the step-count sweeps.
pub const SWEEP_DEGREE: usize = 5;
pub const SWEEP_SAMPLES: usize = 10;
/// Final time of the Gray-Scott error figure.
pub const GRAY_SCOTT_FINAL_TIME: f64 = 100.0;

impl Scale {
    pub fn points(self, paper: usize) -> usize {
        match self {
            Scale::Paper => paper,
            Scale::Desk => (paper / DESK_POINT_DIVISOR).max(8),
        }
    }

    pub fn steps(self, paper: usize) -> usize {
        match self {
            Scale::Paper => paper,
            Scale::Desk => (paper / DESK_STEP_DIVISOR).max(1),
        }
    }

    pub fn samples(self) -> usize {
        match self {
            Scale::Paper => PAPER_SAMPLES,
            Scale::Desk => DESK_SAMPLES,
        }
    }

    pub fn mc_repeats(self) -> usize {
        match self {
            Scale::Paper => PAPER_MC_REPEATS,
            Scale::Desk => DESK_MC_REPEATS,
        }
    }

    pub fn reference(self) -> ReferencePolicy {
        let (steps, q) = match self {
            Scale::Paper => PAPER_REFERENCE,
            Scale::Desk => DESK_REFERENCE,
        };
        ReferencePolicy::Sampled {
            scheme: Scheme::Etdrk4,
            steps,
            q,
        }
    }

    /// Reduction factors recorded in the metadata.
    pub fn describe(self) -> Value {
        match self {
            Scale::Paper => json!({ "scale": "paper" }),
            Scale::Desk => json!({
                "scale": "desk",
                "points_divisor": DESK_POINT_DIVISOR,
                "steps_divisor": DESK_STEP_DIVISOR,
                "samples": DESK_SAMPLES,
                "mc_repeats": DESK_MC_REPEATS,
                "reference_steps": DESK_REFERENCE.0,
                "reference_samples": DESK_REFERENCE.1,
            }),
        }
    }
}

/// Which half of an error figure to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Intrusive,
    NonIntrusive,
    Both,
}

#[derive(Debug, Clone)]
pub enum JobKind {
    Errors {
        experiment: Experiment,
        methods: Vec<Method>,
    },
    Sweep {
        experiment: Experiment,
        curves: Vec<SweepCurve>,
        steps: Vec<usize>,
    },
    Runtime {
        scheme: Scheme,
        equations: Vec<(String, ModelSpec)>,
        degrees: Vec<usize>,
        repeats: usize,
        grid: PeriodicGrid,
        time: TimeGrid,
    },
    Field {
        spec: ModelSpec,
        scheme: Scheme,
        xi: f64,
        grid: PeriodicGrid,
        time: TimeGrid,
    },
}

/// One output file.
#[derive(Debug, Clone)]
pub struct Job {
    pub file: String,
    pub preset: String,
    pub kind: JobKind,
}

pub fn diffusion_tag(d: f64) -> String {
    format!("D={d:.5}")
}

/// `errorarray_<tag>[_2D]_<stat>_system=<id>_D=<d>.txt`
pub fn ipce_file(scheme: Scheme, dim: usize, statistic: Statistic, spec: &ModelSpec) -> String {
    let dim_tag = if dim == 2 { "_2D" } else { "" };
    format!(
        "errorarray_{}{dim_tag}_{}_system={}_{}.txt",
        scheme.file_tag(),
        statistic.id(),
        spec.kind.system_id(),
        diffusion_tag(spec.diffusion)
    )
}

/// `errorarray_<stat>_Nonintrusive_<tag>_system=<id>_D=<d>.txt`
pub fn nipce_file(scheme: Scheme, statistic: Statistic, spec: &ModelSpec) -> String {
    format!(
        "errorarray_{}_Nonintrusive_{}_system={}_{}.txt",
        statistic.id(),
        scheme.file_tag(),
        spec.kind.system_id(),
        diffusion_tag(spec.diffusion)
    )
}

pub fn sweep_file(statistic: Statistic, spec: &ModelSpec) -> String {
    format!(
        "Performanceplot_{}_system={}_{}.txt",
        statistic.id(),
        spec.kind.system_id(),
        diffusion_tag(spec.diffusion)
    )
}

pub fn runtime_file(scheme: Scheme) -> String {
    let tag = match scheme {
        Scheme::ExplicitEuler => "EE",
        Scheme::EtdRdp | Scheme::EtdRdpIf => "ETDRDP",
        Scheme::Etdrk4 => "ETDRK4",
    };
    format!("runtimearray_{tag}.txt")
}

pub fn field_file(spec: &ModelSpec, scheme: Scheme, xi: f64, grid: &PeriodicGrid, time: &TimeGrid) -> String {
    format!(
        "field_{}_{}_{}D_p={}_xi={}_T={}.txt",
        spec.kind.id(),
        scheme.file_tag(),
        grid.dim(),
        grid.points(),
        xi,
        time.final_time()
    )
}

/// Smallest explicit Euler step count keeping `k·λ_max ≤ 2/1.1` for the
/// finite-difference Laplacian.
pub fn stable_euler_steps(spec: &ModelSpec, grid: &PeriodicGrid, final_time: f64) -> usize {
    let d = spec.diffusions().into_iter().fold(0.0, f64::max);
    let h = grid.spacing();
    let lambda = grid.dim() as f64 * 4.0 * d / (h * h);
    (1.1 * final_time * lambda / 2.0).ceil() as usize
}

/// Cubic iPCE curves use the truncated product linearization.
fn figure_product(kind: ModelKind) -> CubicProduct {
    if kind == ModelKind::Cubic {
        CubicProduct::Truncated
    } else {
        CubicProduct::Tensor
    }
}

struct ErrorFigure {
    name: &'static str,
    kind: ModelKind,
    diffusion: f64,
    final_time: f64,
    statistic: Statistic,
    /// EE, ETD-RDP, ETDRK4
    ipce_steps: [usize; 3],
    nipce_steps: [usize; 3],
}

const SCHEMES_1D: [Scheme; 3] = [Scheme::ExplicitEuler, Scheme::EtdRdp, Scheme::Etdrk4];

const ERROR_FIGURES: [ErrorFigure; 7] = [
    ErrorFigure {
        name: "linear-d0",
        kind: ModelKind::Linear,
        diffusion: 0.0,
        final_time: 2.0,
        statistic: Statistic::Mean,
        ipce_steps: [1000, 200, 100],
        nipce_steps: [2000, 200, 100],
    },
    ErrorFigure {
        name: "linear-d1",
        kind: ModelKind::Linear,
        diffusion: 1.0,
        final_time: 2.0,
        statistic: Statistic::Mean,
        ipce_steps: [20000, 400, 200],
        nipce_steps: [20000, 200, 100],
    },
    ErrorFigure {
        name: "linear-d0-variance",
        kind: ModelKind::Linear,
        diffusion: 0.0,
        final_time: 2.0,
        statistic: Statistic::Variance,
        ipce_steps: [1000, 200, 100],
        nipce_steps: [2000, 200, 100],
    },
    ErrorFigure {
        name: "quadratic-d0",
        kind: ModelKind::Quadratic,
        diffusion: 0.0,
        final_time: 0.4,
        statistic: Statistic::Mean,
        ipce_steps: [1000, 200, 100],
        nipce_steps: [2000, 200, 100],
    },
    ErrorFigure {
        name: "quadratic-d1",
        kind: ModelKind::Quadratic,
        diffusion: 1.0,
        final_time: 2.0,
        statistic: Statistic::Mean,
        ipce_steps: [10000, 400, 200],
        nipce_steps: [20000, 200, 100],
    },
    ErrorFigure {
        name: "cubic-d0",
        kind: ModelKind::Cubic,
        diffusion: 0.0,
        final_time: 2.0,
        statistic: Statistic::Mean,
        ipce_steps: [1000, 200, 100],
        nipce_steps: [500, 200, 100],
    },
    ErrorFigure {
        name: "cubic-d1",
        kind: ModelKind::Cubic,
        diffusion: 1.0,
        final_time: 2.0,
        statistic: Statistic::Mean,
        ipce_steps: [20000, 400, 200],
        nipce_steps: [20000, 200, 100],
    },
];

const SWEEP_MODELS: [(ModelKind, f64); 6] = [
    (ModelKind::Linear, 0.0),
    (ModelKind::Linear, 1.0),
    (ModelKind::Quadratic, 0.0),
    (ModelKind::Quadratic, 1.0),
    (ModelKind::Cubic, 0.0),
    (ModelKind::Cubic, 1.0),
];

pub const LINEAR_2D: &str = "linear-2d";
pub const GRAY_SCOTT_1D: &str = "grayscott-1d";
pub const GRAY_SCOTT_2D: &str = "grayscott-2d";
pub const RUNTIME: &str = "runtime";

fn sweep_name(kind: ModelKind, d: f64) -> String {
    format!("performance-{}-d{}", kind.id(), d as u32)
}

/// Every preset name, in reproduction order.
pub fn preset_names() -> Vec<String> {
    let mut names: Vec<String> = ERROR_FIGURES.iter().map(|f| f.name.to_string()).collect();
    names.extend(SWEEP_MODELS.iter().map(|&(k, d)| sweep_name(k, d)));
    names.extend([LINEAR_2D, GRAY_SCOTT_1D, GRAY_SCOTT_2D, RUNTIME].map(String::from));
    names
}

pub fn is_error_figure(name: &str) -> bool {
    ERROR_FIGURES.iter().any(|f| f.name == name)
}

pub fn is_sweep(name: &str) -> bool {
    SWEEP_MODELS.iter().any(|&(k, d)| sweep_name(k, d) == name)
}

fn figure_time(final_time: f64, steps: usize) -> Result<TimeGrid> {
    TimeGrid::new(final_time, steps)
}

fn nipce_methods(scale: Scale) -> Vec<Method> {
    [SamplerKind::MonteCarlo, SamplerKind::Sobol, SamplerKind::Gauss]
        .into_iter()
        .map(|sampler| match Method::non_intrusive(sampler, scale.samples()) {
            Method::NonIntrusive { q, degree, seed, .. } => Method::NonIntrusive {
                sampler,
                q,
                degree,
                seed,
                repeats: if sampler == SamplerKind::MonteCarlo { scale.mc_repeats() } else { 1 },
            },
            m => m,
        })
        .collect()
}

fn ipce_methods(kind: ModelKind) -> Vec<Method> {
    FIGURE_DEGREES
        .iter()
        .map(|&degree| Method::Intrusive {
            degree,
            product: figure_product(kind),
        })
        .collect()
}

fn figure_experiment(spec: ModelSpec, scheme: Scheme, grid: PeriodicGrid, time: TimeGrid, statistic: Statistic, scale: Scale) -> Experiment {
    let mut exp = Experiment::new(spec, scheme, grid, time);
    exp.statistic = statistic;
    exp.tolerate_blow_up = true;
    exp.reference = if spec.kind == ModelKind::Linear && spec.diffusion == 0.0 {
        ReferencePolicy::Exact
    } else {
        scale.reference()
    };
    exp
}

fn error_figure_jobs(fig: &ErrorFigure, scale: Scale, part: Part) -> Result<Vec<Job>> {
    let spec = ModelSpec::scalar(fig.kind, fig.diffusion);
    let grid = PeriodicGrid::one_d(scale.points(PAPER_POINTS))?;
    let mut jobs = Vec::new();
    for (i, scheme) in SCHEMES_1D.into_iter().enumerate() {
        if part != Part::NonIntrusive {
            let time = figure_time(fig.final_time, scale.steps(fig.ipce_steps[i]))?;
            jobs.push(Job {
                file: ipce_file(scheme, 1, fig.statistic, &spec),
                preset: fig.name.into(),
                kind: JobKind::Errors {
                    experiment: figure_experiment(spec, scheme, grid, time, fig.statistic, scale),
                    methods: ipce_methods(fig.kind),
                },
            });
        }
        if part != Part::Intrusive {
            let time = figure_time(fig.final_time, scale.steps(fig.nipce_steps[i]))?;
            jobs.push(Job {
                file: nipce_file(scheme, fig.statistic, &spec),
                preset: fig.name.into(),
                kind: JobKind::Errors {
                    experiment: figure_experiment(spec, scheme, grid, time, fig.statistic, scale),
                    methods: nipce_methods(scale),
                },
            });
        }
    }
    Ok(jobs)
}

fn sweep_jobs(kind: ModelKind, d: f64, scale: Scale) -> Result<Vec<Job>> {
    let spec = ModelSpec::scalar(kind, d);
    let final_time = if kind == ModelKind::Quadratic && d == 0.0 { 0.4 } else { 2.0 };
    let grid = PeriodicGrid::one_d(scale.points(PAPER_POINTS))?;
    let steps: Vec<usize> = match scale {
        Scale::Paper => (0..8).map(|k| 10 << k).collect(),
        Scale::Desk => (0..4).map(|k| 10 << k).collect(),
    };
    let schemes: &[Scheme] = if d == 0.0 { &SCHEMES_1D } else { &SCHEMES_1D[1..] };
    let curves = schemes
        .iter()
        .flat_map(|&scheme| {
            [
                SweepCurve {
                    scheme,
                    method: Method::Intrusive {
                        degree: SWEEP_DEGREE,
                        product: figure_product(kind),
                    },
                },
                SweepCurve {
                    scheme,
                    method: Method::non_intrusive(SamplerKind::Gauss, SWEEP_SAMPLES),
                },
            ]
        })
        .collect();
    let time = TimeGrid::new(final_time, steps[steps.len() - 1])?;
    let experiment = figure_experiment(spec, Scheme::Etdrk4, grid, time, Statistic::Mean, scale);
    Ok(vec![Job {
        file: sweep_file(Statistic::Mean, &spec),
        preset: sweep_name(kind, d),
        kind: JobKind::Sweep {
            experiment,
            curves,
            steps,
        },
    }])
}

fn linear_2d_jobs(scale: Scale) -> Result<Vec<Job>> {
    let spec = ModelSpec::linear(1.0);
    let final_time = 2.0;
    let mut jobs = Vec::new();
    for (scheme, paper_p, paper_m) in [
        (Scheme::ExplicitEuler, 128, 1000),
        (Scheme::EtdRdpIf, 512, 200),
        (Scheme::Etdrk4, 128, 100),
    ] {
        let grid = PeriodicGrid::two_d(scale.points(paper_p))?;
        let mut steps = scale.steps(paper_m);
        if scheme == Scheme::ExplicitEuler {
            steps = steps.max(stable_euler_steps(&spec, &grid, final_time));
        }
        let time = TimeGrid::new(final_time, steps)?;
        let mut experiment = figure_experiment(spec, scheme, grid, time, Statistic::Mean, scale);
        experiment.reference = ReferencePolicy::Exact;
        experiment.observe = observe_about(steps, 200);
        jobs.push(Job {
            file: ipce_file(scheme, 2, Statistic::Mean, &spec),
            preset: LINEAR_2D.into(),
            kind: JobKind::Errors {
                experiment,
                methods: ipce_methods(ModelKind::Linear),
            },
        });
    }
    Ok(jobs)
}

/// Roughly `count` evenly spaced observation steps including both ends.
fn observe_about(steps: usize, count: usize) -> Vec<usize> {
    let stride = steps.div_ceil(count).max(1);
    let mut out: Vec<usize> = (0..=steps).step_by(stride).collect();
    if out.last() != Some(&steps) {
        out.push(steps);
    }
    out
}

/// The printed cubic exponent of the 1D initial `v` makes it grow like
/// `e^{7/√2}` at the left boundary and every scheme blows up before `t = 0.3`,
/// so the error figure uses the squared exponent.
fn gray_scott_1d_jobs(scale: Scale) -> Result<Vec<Job>> {
    let spec = ModelSpec {
        square_exponent: true,
        ..ModelSpec::gray_scott()
    };
    let grid = PeriodicGrid::one_d(scale.points(PAPER_POINTS))?;
    let time = TimeGrid::new(GRAY_SCOTT_FINAL_TIME, scale.steps(1000))?;
    SCHEMES_1D
        .into_iter()
        .map(|scheme| {
            let experiment = figure_experiment(spec, scheme, grid, time, Statistic::Mean, scale);
            Ok(Job {
                file: ipce_file(scheme, 1, Statistic::Mean, &spec),
                preset: GRAY_SCOTT_1D.into(),
                kind: JobKind::Errors {
                    experiment,
                    methods: ipce_methods(ModelKind::GrayScott),
                },
            })
        })
        .collect()
}

fn gray_scott_2d_jobs(scale: Scale) -> Result<Vec<Job>> {
    let spec = ModelSpec::gray_scott();
    let xi = spec.midpoint();
    let (final_time, schemes): (f64, &[Scheme]) = match scale {
        Scale::Paper => (5000.0, &[Scheme::ExplicitEuler, Scheme::EtdRdpIf, Scheme::Etdrk4]),
        Scale::Desk => (100.0, &[Scheme::Etdrk4]),
    };
    let mut jobs = Vec::new();
    for &scheme in schemes {
        for p in [256, 512] {
            let grid = PeriodicGrid::two_d(p)?;
            let mut steps = final_time as usize;
            if scheme == Scheme::ExplicitEuler {
                steps = steps.max(stable_euler_steps(&spec, &grid, final_time));
            }
            let time = TimeGrid::new(final_time, steps)?;
            jobs.push(Job {
                file: field_file(&spec, scheme, xi, &grid, &time),
                preset: GRAY_SCOTT_2D.into(),
                kind: JobKind::Field {
                    spec,
                    scheme,
                    xi,
                    grid,
                    time,
                },
            });
        }
    }
    Ok(jobs)
}

fn runtime_jobs(scale: Scale) -> Result<Vec<Job>> {
    let grid = PeriodicGrid::one_d(scale.points(PAPER_POINTS))?;
    let (degrees, repeats): (Vec<usize>, usize) = match scale {
        Scale::Paper => ((0..=9).collect(), 10),
        Scale::Desk => ((0..=5).collect(), 2),
    };
    let equations: Vec<(String, ModelSpec)> = SWEEP_MODELS
        .iter()
        .map(|&(k, d)| (format!("{}_D={}", k.id(), d), ModelSpec::scalar(k, d)))
        .collect();
    SCHEMES_1D
        .into_iter()
        .map(|scheme| {
            Ok(Job {
                file: runtime_file(scheme),
                preset: RUNTIME.into(),
                kind: JobKind::Runtime {
                    scheme,
                    equations: equations.clone(),
                    degrees: degrees.clone(),
                    repeats,
                    grid,
                    time: TimeGrid::new(0.1, 10)?,
                },
            })
        })
        .collect()
}

/// Jobs of preset `name`. `part` selects the iPCE or niPCE half of an error figure.
pub fn preset_jobs(name: &str, scale: Scale, part: Part) -> Result<Vec<Job>> {
    if let Some(fig) = ERROR_FIGURES.iter().find(|f| f.name == name) {
        return error_figure_jobs(fig, scale, part);
    }
    if let Some(&(kind, d)) = SWEEP_MODELS.iter().find(|&&(k, d)| sweep_name(k, d) == name) {
        return sweep_jobs(kind, d, scale);
    }
    match name {
        LINEAR_2D => linear_2d_jobs(scale),
        GRAY_SCOTT_1D => gray_scott_1d_jobs(scale),
        GRAY_SCOTT_2D => gray_scott_2d_jobs(scale),
        RUNTIME => runtime_jobs(scale),
        _ => Err(Error::InvalidArgument(format!(
            "unknown preset '{name}'; known presets: {}",
            preset_names().join(", ")
        ))),
    }
}

/// Model parameters behind a preset name, for reporting.
pub fn preset_model(name: &str) -> Option<ModelSpec> {
    if let Some(fig) = ERROR_FIGURES.iter().find(|f| f.name == name) {
        return Some(ModelSpec::scalar(fig.kind, fig.diffusion));
    }
    match name {
        GRAY_SCOTT_1D | GRAY_SCOTT_2D => Some(ModelSpec::gray_scott()),
        LINEAR_2D => Some(ModelSpec::linear(1.0)),
        _ => SWEEP_MODELS
            .iter()
            .find(|&&(k, d)| sweep_name(k, d) == name)
            .map(|&(k, d)| ModelSpec::scalar(k, d)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steps_of(job: &Job) -> (Scheme, usize) {
        match &job.kind {
            JobKind::Errors { experiment, .. } => (experiment.scheme, experiment.time.steps()),
            _ => panic!("not an error job"),
        }
    }

    #[test]
    fn linear_d0_matches_step_table() {
        let jobs = preset_jobs("linear-d0", Scale::Paper, Part::Both).unwrap();
        assert_eq!(jobs.len(), 6);
        let ipce: Vec<_> = jobs.iter().step_by(2).map(steps_of).collect();
        assert_eq!(
            ipce,
            vec![(Scheme::ExplicitEuler, 1000), (Scheme::EtdRdp, 200), (Scheme::Etdrk4, 100)]
        );
        assert_eq!(jobs[0].file, "errorarray_FD_EE_mean_system=6_D=0.00000.txt");
        assert_eq!(jobs[1].file, "errorarray_mean_Nonintrusive_FD_EE_system=6_D=0.00000.txt");
        match &jobs[1].kind {
            JobKind::Errors { methods, .. } => {
                assert_eq!(methods.len(), 3);
                assert!(methods.iter().all(|m| matches!(m, Method::NonIntrusive { q: 50, .. })));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn gray_scott_preset_parameters() {
        let spec = preset_model("grayscott-2d").unwrap();
        assert_eq!((spec.diffusion, spec.diffusion_v, spec.feed), (2e-5, 1e-5, 0.04));
        assert_eq!((spec.lower, spec.upper), (0.058, 0.062));
        let jobs = preset_jobs(GRAY_SCOTT_1D, Scale::Paper, Part::Both).unwrap();
        assert_eq!(jobs[0].file, "errorarray_FD_EE_mean_system=0_D=0.00002.txt");
        assert_eq!(jobs[2].file, "errorarray_Spectral_mean_system=0_D=0.00002.txt");
    }

    #[test]
    fn every_preset_expands() {
        for name in preset_names() {
            for scale in [Scale::Paper, Scale::Desk] {
                let jobs = preset_jobs(&name, scale, Part::Both).unwrap();
                assert!(!jobs.is_empty(), "{name}");
            }
        }
        assert!(preset_jobs("linear-d7", Scale::Desk, Part::Both).is_err());
    }

    #[test]
    fn two_dimensional_euler_is_made_stable() {
        let jobs = preset_jobs(LINEAR_2D, Scale::Paper, Part::Both).unwrap();
        let (scheme, steps) = steps_of(&jobs[0]);
        assert_eq!(scheme, Scheme::ExplicitEuler);
        let h = 2.0 / 128.0;
        assert!(2.0 / steps as f64 * 8.0 / (h * h) < 2.0);
        assert_eq!(jobs[1].file, "errorarray_FD_ETDRDP_2D_mean_system=6_D=1.00000.txt");
    }

    #[test]
    fn desk_scale_reduces() {
        assert_eq!(Scale::Desk.points(128), 32);
        assert_eq!(Scale::Desk.steps(1000), 100);
        let jobs = preset_jobs("performance-cubic-d0", Scale::Desk, Part::Both).unwrap();
        match &jobs[0].kind {
            JobKind::Sweep { curves, steps, .. } => {
                assert_eq!(curves.len(), 6);
                assert_eq!(steps, &vec![10, 20, 40, 80]);
            }
            _ => unreachable!(),
        }
        assert_eq!(jobs[0].file, "Performanceplot_mean_system=8_D=0.00000.txt");
    }
}
