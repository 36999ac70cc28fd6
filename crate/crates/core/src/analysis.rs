//! Exact solutions, error metrics and experiment orchestration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use crate::error::{invalid, Error, Result};
use crate::grid::PeriodicGrid;
use crate::ipce::{contraction_count, ipce_solve, variance_of, CubicProduct, GalerkinSystem};
use crate::models::{ModelKind, ModelSpec};
use crate::nipce::nipce_model;
use crate::samplers::{make_samples, SamplerKind};
use crate::solvers::{Observer, Scheme, Silent, SolverOptions, TimeGrid};

/// `E[e^{-ξ s}]` for `ξ ~ U[a, b]`, stable for small `(b-a)s`.
fn uniform_laplace(s: f64, a: f64, b: f64) -> f64 {
    let width = (b - a) * s;
    if width == 0.0 {
        return (-a * s).exp();
    }
    (-a * s).exp() * -(-width).exp_m1() / width
}

fn cosine_profile(x: &[f64]) -> f64 {
    x.iter().map(|&xi| (PI * xi).cos()).product()
}

/// Mean of `e^{-(ξ + dim·Dπ²)t} Π cos(πx_i)` over `ξ ~ U[a, b]`.
pub fn exact_mean_linear(x: &[f64], t: f64, a: f64, b: f64, diffusion: f64) -> f64 {
    let decay = (-(x.len() as f64) * diffusion * PI * PI * t).exp();
    cosine_profile(x) * decay * uniform_laplace(t, a, b)
}

/// `(1+e^{-w})/2 - (1-e^{-w})/w`, the normalized variance of `e^{-ws}` for
/// `s ~ U[0, 1]` divided by its mean.
fn spread(w: f64) -> f64 {
    if w < 1.0 {
        // Σ_{n≥2} (-w)^n (n-1) / (2 (n+1)!)
        let mut term = w * w / 6.0;
        let mut sum = 0.0;
        for n in 2..40 {
            sum += term * (n - 1) as f64 / 2.0;
            term *= -w / (n + 2) as f64;
        }
        sum
    } else {
        0.5 * (1.0 + (-w).exp()) + (-w).exp_m1() / w
    }
}

/// Variance of the same family, `E[u²] - E[u]²`.
pub fn exact_variance_linear(x: &[f64], t: f64, a: f64, b: f64, diffusion: f64) -> f64 {
    let phi = cosine_profile(x);
    let decay = (-2.0 * (x.len() as f64 * diffusion * PI * PI + a) * t).exp();
    let w = (b - a) * t;
    if w == 0.0 {
        return 0.0;
    }
    let mean = -(-w).exp_m1() / w;
    phi * phi * decay * mean * spread(w)
}

/// Statistic of the random solution compared against a reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Statistic {
    #[default]
    Mean,
    Variance,
}

impl Statistic {
    pub fn id(&self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Variance => "variance",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Statistic::Mean),
            "variance" | "var" => Ok(Statistic::Variance),
            _ => Err(invalid(format!("unknown statistic '{s}'"))),
        }
    }
}

/// Closed-form mean or variance of the linear model on `grid`.
pub fn exact_field(grid: &PeriodicGrid, t: f64, spec: &ModelSpec, statistic: Statistic) -> Vec<f64> {
    let (a, b, d) = (spec.lower, spec.upper, spec.diffusion);
    match statistic {
        Statistic::Mean => grid.sample(|x| exact_mean_linear(x, t, a, b, d)),
        Statistic::Variance => grid.sample(|x| exact_variance_linear(x, t, a, b, d)),
    }
}

/// Discrete `L²` norm with weight `h` per dimension.
pub fn l2_norm(grid: &PeriodicGrid, field: &[f64]) -> f64 {
    let weight = grid.spacing().powi(grid.dim() as i32);
    (weight * field.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// `‖approx - reference‖ / ‖reference‖`, or `None` when the reference vanishes.
pub fn rel_l2_error(approx: &[f64], reference: &[f64]) -> Result<Option<f64>> {
    if approx.len() != reference.len() {
        return Err(Error::Shape {
            expected: reference.len(),
            got: approx.len(),
        });
    }
    // The uniform weight cancels in the ratio.
    let den: f64 = reference.iter().map(|v| v * v).sum();
    if den == 0.0 || !den.is_finite() {
        return Ok(None);
    }
    let num: f64 = approx.iter().zip(reference).map(|(a, r)| (a - r) * (a - r)).sum();
    Ok(Some((num / den).sqrt()))
}

/// One error curve: relative errors against a reference at increasing abscissae
/// (times, or step counts for sweeps).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub errors: Vec<Option<f64>>,
    pub meta: BTreeMap<String, String>,
}

impl ErrorSeries {
    pub fn last(&self) -> Option<f64> {
        self.errors.last().copied().flatten()
    }
}

/// How the random solution is approximated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Intrusive {
        degree: usize,
        product: CubicProduct,
    },
    NonIntrusive {
        sampler: SamplerKind,
        q: usize,
        /// Projection degree `N'` used for the variance.
        degree: usize,
        seed: u64,
        /// Independent repetitions averaged into one curve (Monte Carlo only).
        repeats: usize,
    },
}

impl Method {
    pub fn intrusive(degree: usize) -> Self {
        Method::Intrusive {
            degree,
            product: CubicProduct::default(),
        }
    }

    pub fn non_intrusive(sampler: SamplerKind, q: usize) -> Self {
        Method::NonIntrusive {
            sampler,
            q,
            degree: 10,
            seed: 0,
            repeats: if sampler == SamplerKind::MonteCarlo { 10 } else { 1 },
        }
    }

    pub fn label(&self) -> String {
        match self {
            Method::Intrusive { degree, .. } => format!("N={degree}"),
            Method::NonIntrusive { sampler, .. } => match sampler {
                SamplerKind::MonteCarlo => "MC".into(),
                SamplerKind::Sobol | SamplerKind::Halton => "QMC".into(),
                SamplerKind::Gauss => "GQ".into(),
            },
        }
    }

    fn describe(&self, meta: &mut BTreeMap<String, String>) {
        match *self {
            Method::Intrusive { degree, product } => {
                meta.insert("mode".into(), "ipce".into());
                meta.insert("N".into(), degree.to_string());
                meta.insert("cubic_product".into(), product.id().into());
            }
            Method::NonIntrusive {
                sampler,
                q,
                degree,
                seed,
                repeats,
            } => {
                meta.insert("mode".into(), "nipce".into());
                meta.insert("sampler".into(), sampler.id().into());
                meta.insert("q".into(), q.to_string());
                meta.insert("projection_degree".into(), degree.to_string());
                if sampler == SamplerKind::MonteCarlo {
                    meta.insert("seed".into(), seed.to_string());
                    meta.insert("repeats".into(), repeats.to_string());
                }
            }
        }
    }
}

/// Where the reference statistic comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReferencePolicy {
    /// Closed form for the linear model without diffusion, otherwise the
    /// sampled default.
    #[default]
    Auto,
    Exact,
    Sampled {
        scheme: Scheme,
        steps: usize,
        q: usize,
    },
}

pub const REFERENCE_STEPS: usize = 1000;
pub const REFERENCE_SAMPLES: usize = 200;
/// Projection degree of the sampled reference variance.
const REFERENCE_DEGREE: usize = 30;

/// Everything that defines one error figure panel apart from the curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub spec: ModelSpec,
    pub scheme: Scheme,
    pub grid: PeriodicGrid,
    pub time: TimeGrid,
    pub statistic: Statistic,
    pub species: usize,
    /// Steps at which errors are reported, increasing.
    pub observe: Vec<usize>,
    pub options: SolverOptions,
    pub reference: ReferencePolicy,
    /// Keep the points observed before a blow-up instead of failing the curve.
    pub tolerate_blow_up: bool,
}

impl Experiment {
    pub fn new(spec: ModelSpec, scheme: Scheme, grid: PeriodicGrid, time: TimeGrid) -> Self {
        Self {
            spec,
            scheme,
            grid,
            time,
            statistic: Statistic::Mean,
            species: 0,
            observe: crate::nipce::default_observation_steps(time.steps(), grid.dim()),
            options: SolverOptions::default(),
            reference: ReferencePolicy::Auto,
            tolerate_blow_up: false,
        }
    }

    fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.scheme.check_grid(&self.grid)?;
        if self.species >= self.spec.species() {
            return Err(invalid(format!("species {} out of range", self.species)));
        }
        if self.observe.is_empty() || self.observe.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("observation steps must be nonempty and increasing"));
        }
        if *self.observe.last().unwrap() > self.time.steps() {
            return Err(invalid("observation step beyond the final step"));
        }
        Ok(())
    }

    fn base_meta(&self, scheme: Scheme, steps: usize) -> BTreeMap<String, String> {
        let mut meta = BTreeMap::new();
        meta.insert("model".into(), self.spec.kind.id().into());
        meta.insert("scheme".into(), scheme.id().into());
        meta.insert("statistic".into(), self.statistic.id().into());
        meta.insert("D".into(), format!("{}", self.spec.diffusion));
        meta.insert("M".into(), steps.to_string());
        meta.insert("T".into(), format!("{}", self.time.final_time()));
        meta.insert("p".into(), self.grid.points().to_string());
        meta.insert("dim".into(), self.grid.dim().to_string());
        meta.insert("interval".into(), format!("[{}, {}]", self.spec.lower, self.spec.upper));
        meta
    }
}

/// Where a reference came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Exact,
    Sampled { scheme: Scheme, steps: usize, q: usize },
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceKind::Exact => f.write_str("exact closed form"),
            ReferenceKind::Sampled { scheme, steps, q } => {
                write!(f, "nipce {} gq q={q} M={steps}", scheme.id())
            }
        }
    }
}

/// Reference statistic at each observed time of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub kind: ReferenceKind,
    pub times: Vec<f64>,
    pub fields: Vec<Vec<f64>>,
}

impl ReferenceSolution {
    pub fn provenance(&self) -> String {
        self.kind.to_string()
    }
}

/// Smallest multiple of `steps` that is at least `wanted`, so every observed
/// time is a reference time.
fn aligned_steps(wanted: usize, steps: usize) -> usize {
    wanted.div_ceil(steps).max(1) * steps
}

pub fn reference_solution(exp: &Experiment) -> Result<ReferenceSolution> {
    exp.validate()?;
    let times: Vec<f64> = exp.observe.iter().map(|&s| exp.time.time(s)).collect();
    let sampled = match exp.reference {
        ReferencePolicy::Exact if exp.spec.kind == ModelKind::Linear => None,
        ReferencePolicy::Auto if exp.spec.kind == ModelKind::Linear && exp.spec.diffusion == 0.0 => None,
        ReferencePolicy::Exact => {
            return Err(invalid(format!(
                "no closed form for the {} model",
                exp.spec.kind.id()
            )))
        }
        ReferencePolicy::Auto => Some((Scheme::Etdrk4, REFERENCE_STEPS, REFERENCE_SAMPLES)),
        ReferencePolicy::Sampled { scheme, steps, q } => Some((scheme, steps, q)),
    };
    let Some((scheme, wanted, q)) = sampled else {
        return Ok(ReferenceSolution {
            kind: ReferenceKind::Exact,
            fields: times
                .iter()
                .map(|&t| exact_field(&exp.grid, t, &exp.spec, exp.statistic))
                .collect(),
            times,
        });
    };
    let final_only = exp.observe == [exp.time.steps()];
    let steps = if final_only { wanted } else { aligned_steps(wanted, exp.time.steps()) };
    let ratio = steps / exp.time.steps();
    let ref_steps: Vec<usize> = if final_only {
        vec![steps]
    } else {
        exp.observe.iter().map(|s| s * ratio).collect()
    };
    let time = TimeGrid::new(exp.time.final_time(), steps)?;
    let samples = make_samples(SamplerKind::Gauss, q, exp.spec.lower, exp.spec.upper, 0)?;
    let degree = REFERENCE_DEGREE.min(q - 1);
    let res = nipce_model(&exp.spec, scheme, &samples, degree, exp.grid, time, &ref_steps, &exp.options)?;
    let fields = (0..ref_steps.len())
        .map(|obs| match exp.statistic {
            Statistic::Mean => res.mean(obs, exp.species),
            Statistic::Variance => res.variance(obs, exp.species),
        })
        .collect();
    Ok(ReferenceSolution {
        kind: ReferenceKind::Sampled { scheme, steps, q },
        times,
        fields,
    })
}

/// Captures the requested statistic of a stacked chaos state.
struct StatisticObserver<'a> {
    steps: &'a [usize],
    statistic: Statistic,
    species: usize,
    modes: usize,
    n: usize,
    out: Vec<Vec<f64>>,
}

impl Observer for StatisticObserver<'_> {
    fn wants(&self, step: usize) -> bool {
        self.steps.binary_search(&step).is_ok()
    }

    fn observe(&mut self, _: usize, _: f64, state: &[f64]) {
        let field = match self.statistic {
            Statistic::Mean => {
                let start = self.species * self.modes * self.n;
                state[start..start + self.n].to_vec()
            }
            Statistic::Variance => variance_of(state, self.species, self.modes, self.n),
        };
        self.out.push(field);
    }
}

fn statistic_fields(exp: &Experiment, scheme: Scheme, time: TimeGrid, steps: &[usize], method: &Method) -> Result<Vec<Vec<Vec<f64>>>> {
    match *method {
        Method::Intrusive { degree, product } => {
            let system = GalerkinSystem::with_product(exp.spec, exp.grid, degree, product)?
                .with_execution(exp.options.execution);
            let mut obs = StatisticObserver {
                steps,
                statistic: exp.statistic,
                species: exp.species,
                modes: degree + 1,
                n: exp.grid.len(),
                out: Vec::new(),
            };
            match ipce_solve(scheme, &system, time, &exp.options, &mut obs) {
                Ok(_) => Ok(vec![obs.out]),
                Err(e) if e.is_blow_up() && exp.tolerate_blow_up => Ok(vec![obs.out]),
                Err(e) => Err(e),
            }
        }
        Method::NonIntrusive {
            sampler,
            q,
            degree,
            seed,
            repeats,
        } => {
            let runs = if sampler == SamplerKind::MonteCarlo { repeats.max(1) } else { 1 };
            (0..runs as u64)
                .map(|r| {
                    let samples = make_samples(sampler, q, exp.spec.lower, exp.spec.upper, seed + r)?;
                    let res = match nipce_model(&exp.spec, scheme, &samples, degree, exp.grid, time, steps, &exp.options) {
                        Ok(res) => res,
                        Err(e) if e.is_blow_up() && exp.tolerate_blow_up => return Ok(Vec::new()),
                        Err(e) => return Err(e),
                    };
                    Ok((0..steps.len())
                        .map(|obs| match exp.statistic {
                            Statistic::Mean => res.mean(obs, exp.species),
                            Statistic::Variance => res.variance(obs, exp.species),
                        })
                        .collect())
                })
                .collect()
        }
    }
}

/// Mean over repetitions of the relative error at each observation. Runs cut
/// short by a blow-up leave the later points missing.
fn averaged_errors(runs: &[Vec<Vec<f64>>], reference: &[Vec<f64>]) -> Result<Vec<Option<f64>>> {
    (0..reference.len())
        .map(|obs| {
            let mut sum = 0.0;
            for run in runs {
                let Some(field) = run.get(obs) else {
                    return Ok(None);
                };
                match rel_l2_error(field, &reference[obs])? {
                    Some(e) => sum += e,
                    None => return Ok(None),
                }
            }
            Ok(Some(sum / runs.len() as f64))
        })
        .collect()
}

fn annotate(label: &str, e: Error) -> Error {
    match e {
        Error::InvalidArgument(msg) => Error::InvalidArgument(format!("curve {label}: {msg}")),
        other => Error::Curve {
            label: label.to_string(),
            source: Box::new(other),
        },
    }
}

/// One error-vs-time curve per method against a shared reference.
pub fn run_experiment(exp: &Experiment, methods: &[Method]) -> Result<(ReferenceSolution, Vec<ErrorSeries>)> {
    let reference = reference_solution(exp)?;
    let series = methods
        .iter()
        .map(|method| {
            let label = method.label();
            let fields = statistic_fields(exp, exp.scheme, exp.time, &exp.observe, method)
                .map_err(|e| annotate(&label, e))?;
            let mut meta = exp.base_meta(exp.scheme, exp.time.steps());
            method.describe(&mut meta);
            meta.insert("reference".into(), reference.provenance());
            let errors = averaged_errors(&fields, &reference.fields)?;
            if let Some(first) = errors.iter().position(Option::is_none) {
                if fields.iter().any(|run| run.len() < reference.fields.len()) {
                    meta.insert("blow_up_after".into(), format!("{}", reference.times[first]));
                }
            }
            Ok(ErrorSeries {
                label,
                times: reference.times.clone(),
                errors,
                meta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((reference, series))
}

/// A curve of a step-count sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCurve {
    pub scheme: Scheme,
    pub method: Method,
}

impl SweepCurve {
    /// `EEi`, `RDPn`, `RK4i`, ...
    pub fn label(&self) -> String {
        let scheme = match self.scheme {
            Scheme::ExplicitEuler => "EE",
            Scheme::EtdRdp | Scheme::EtdRdpIf => "RDP",
            Scheme::Etdrk4 => "RK4",
        };
        let mode = match self.method {
            Method::Intrusive { .. } => "i",
            Method::NonIntrusive { .. } => "n",
        };
        format!("{scheme}{mode}")
    }
}

/// Final-time errors over a list of step counts. The abscissa of each series
/// is `M`; a run that blows up leaves a missing point.
pub fn run_sweep(exp: &Experiment, curves: &[SweepCurve], step_counts: &[usize]) -> Result<(ReferenceSolution, Vec<ErrorSeries>)> {
    if step_counts.is_empty() {
        return Err(invalid("sweep needs at least one step count"));
    }
    let final_exp = Experiment {
        observe: vec![exp.time.steps()],
        ..exp.clone()
    };
    let reference = reference_solution(&final_exp)?;
    let series = curves
        .iter()
        .map(|curve| {
            let label = curve.label();
            let errors = step_counts
                .iter()
                .map(|&m| {
                    let time = TimeGrid::new(exp.time.final_time(), m)?;
                    match statistic_fields(exp, curve.scheme, time, &[m], &curve.method) {
                        Ok(fields) => Ok(averaged_errors(&fields, &reference.fields)?[0]),
                        Err(e) if e.is_blow_up() => Ok(None),
                        Err(e) => Err(annotate(&label, e)),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let mut meta = exp.base_meta(curve.scheme, 0);
            meta.remove("M");
            curve.method.describe(&mut meta);
            meta.insert("reference".into(), reference.provenance());
            Ok(ErrorSeries {
                label,
                times: step_counts.iter().map(|&m| m as f64).collect(),
                errors,
                meta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((reference, series))
}

/// Wall time of an iPCE run at degree `N` relative to `N = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeSample {
    pub degree: usize,
    pub seconds: f64,
    pub ratio: f64,
    /// Contraction summands per grid point and reaction evaluation.
    pub operations: Option<usize>,
}

/// Averages `repeats` iPCE runs for each degree; `degrees` must start at 0.
pub fn runtime_ratio(
    spec: &ModelSpec,
    scheme: Scheme,
    grid: PeriodicGrid,
    degrees: &[usize],
    repeats: usize,
    time: TimeGrid,
    options: &SolverOptions,
) -> Result<Vec<RuntimeSample>> {
    if degrees.first() != Some(&0) {
        return Err(invalid("runtime ratios are relative to N = 0, which must come first"));
    }
    let repeats = repeats.max(1);
    let mut out: Vec<RuntimeSample> = Vec::with_capacity(degrees.len());
    for &degree in degrees {
        let system = GalerkinSystem::new(*spec, grid, degree)?.with_execution(options.execution);
        let start = Instant::now();
        for _ in 0..repeats {
            ipce_solve(scheme, &system, time, options, &mut Silent)?;
        }
        let seconds = start.elapsed().as_secs_f64() / repeats as f64;
        let ratio = match out.first() {
            Some(base) => seconds / base.seconds,
            None => 1.0,
        };
        out.push(RuntimeSample {
            degree,
            seconds,
            ratio,
            operations: contraction_count(spec.kind, degree).ok(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::gauss_legendre;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn exact_mean_examples() {
        let e = (-1f64).exp() - (-2f64).exp();
        assert_abs_diff_eq!(exact_mean_linear(&[0.0], 1.0, 1.0, 2.0, 0.0), e, epsilon = 1e-15);
        assert_abs_diff_eq!(e, 0.2325442, epsilon = 1e-7);
        assert_abs_diff_eq!(exact_mean_linear(&[0.0], 1e-300, 1.0, 2.0, 0.3), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(exact_mean_linear(&[0.0], 0.0, 1.0, 2.0, 0.3), 1.0, epsilon = 1e-15);
        for t in [0.1, 1.0, 3.0] {
            assert_abs_diff_eq!(exact_mean_linear(&[0.5], t, 1.0, 2.0, 1.0), 0.0, epsilon = 1e-16);
            assert_abs_diff_eq!(exact_variance_linear(&[0.5], t, 1.0, 2.0, 1.0), 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn exact_variance_examples() {
        let want = ((-2f64).exp() - (-4f64).exp()) / 2.0 - ((-1f64).exp() - (-2f64).exp()).powi(2);
        let got = exact_variance_linear(&[0.0], 1.0, 1.0, 2.0, 0.0);
        assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        assert_abs_diff_eq!(got, 0.0044331, epsilon = 1e-7);
        assert!(exact_variance_linear(&[0.0], 1e-9, 1.0, 2.0, 0.0).abs() < 1e-18);
        // Midpoint rule with 10⁶ nodes over the definition.
        let n = 1_000_000;
        let (mut m1, mut m2) = (0.0, 0.0);
        for i in 0..n {
            let xi = 1.0 + (i as f64 + 0.5) / n as f64;
            let u = (-xi).exp();
            m1 += u;
            m2 += u * u;
        }
        let (m1, m2) = (m1 / n as f64, m2 / n as f64);
        assert_abs_diff_eq!(got, m2 - m1 * m1, epsilon = 1e-12);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let rule = gauss_legendre(10_000, 1.0, 2.0).unwrap();
        let x = [0.3];
        for t in [0.5, 1.0, 2.0] {
            for d in [0.0, 1.0] {
                let u = |xi: f64| (-(xi + d * PI * PI) * t).exp() * (PI * x[0]).cos();
                let m = rule.integrate(u);
                let v = rule.integrate(|xi| u(xi).powi(2)) - m * m;
                assert_abs_diff_eq!(exact_mean_linear(&x, t, 1.0, 2.0, d), m, epsilon = 1e-12);
                assert_abs_diff_eq!(exact_variance_linear(&x, t, 1.0, 2.0, d), v, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_dimensional_mean_is_a_product() {
        let (t, d) = (0.7, 1.0);
        let got = exact_mean_linear(&[0.2, -0.4], t, 1.0, 2.0, d);
        let want = (PI * 0.2).cos() * (PI * 0.4).cos() * (-2.0 * d * PI * PI * t).exp()
            * ((-t).exp() - (-2.0 * t).exp())
            / t;
        assert_abs_diff_eq!(got, want, epsilon = 1e-15);
    }

    #[test]
    fn relative_error_basics() {
        let r = vec![1.0, -2.0, 3.0];
        assert_eq!(rel_l2_error(&r, &r).unwrap(), Some(0.0));
        let scaled: Vec<f64> = r.iter().map(|v| 1.01 * v).collect();
        assert_abs_diff_eq!(rel_l2_error(&scaled, &r).unwrap().unwrap(), 0.01, epsilon = 1e-14);
        assert_eq!(rel_l2_error(&r, &[0.0; 3]).unwrap(), None);
        assert!(rel_l2_error(&r, &[1.0]).is_err());
    }

    #[test]
    fn aligned_reference_steps() {
        assert_eq!(aligned_steps(1000, 100), 1000);
        assert_eq!(aligned_steps(1000, 200), 1000);
        assert_eq!(aligned_steps(1000, 300), 1200);
        assert_eq!(aligned_steps(1000, 20000), 20000);
    }

    #[test]
    fn linear_experiment_uses_exact_reference() {
        let grid = PeriodicGrid::one_d(32).unwrap();
        let exp = Experiment::new(ModelSpec::linear(0.0), Scheme::Etdrk4, grid, TimeGrid::new(2.0, 40).unwrap());
        let methods = [Method::intrusive(1), Method::intrusive(3), Method::non_intrusive(SamplerKind::Gauss, 20)];
        let (reference, series) = run_experiment(&exp, &methods).unwrap();
        assert_eq!(reference.kind, ReferenceKind::Exact);
        assert_eq!(series.len(), 3);
        assert_eq!(series[0].times.len(), 41);
        assert_eq!(series[0].errors[0], Some(0.0));
        let last: Vec<f64> = series.iter().map(|s| s.last().unwrap()).collect();
        assert!(last[1] < last[0]);
        assert!(last[2] < 1e-5);
        assert_eq!(series[2].meta["sampler"], "gq");
        assert_eq!(series[0].meta["reference"], "exact closed form");
    }

    #[test]
    fn sampled_reference_records_provenance() {
        let grid = PeriodicGrid::one_d(16).unwrap();
        let mut exp = Experiment::new(ModelSpec::cubic(1.0), Scheme::EtdRdp, grid, TimeGrid::new(0.5, 30).unwrap());
        exp.reference = ReferencePolicy::Sampled { scheme: Scheme::Etdrk4, steps: 100, q: 12 };
        exp.observe = vec![0, 15, 30];
        let reference = reference_solution(&exp).unwrap();
        assert_eq!(reference.kind, ReferenceKind::Sampled { scheme: Scheme::Etdrk4, steps: 120, q: 12 });
        assert_eq!(reference.provenance(), "nipce etdrk4 gq q=12 M=120");
        assert_eq!(reference.times, vec![0.0, 0.25, 0.5]);
        exp.reference = ReferencePolicy::Exact;
        assert!(reference_solution(&exp).is_err());
    }

    #[test]
    fn sweep_marks_blow_up_as_missing() {
        let grid = PeriodicGrid::one_d(16).unwrap();
        let mut exp = Experiment::new(ModelSpec::linear(1.0), Scheme::ExplicitEuler, grid, TimeGrid::new(5.0, 10).unwrap());
        exp.observe = vec![10];
        let curves = [SweepCurve { scheme: Scheme::ExplicitEuler, method: Method::intrusive(2) }];
        let (_, series) = run_sweep(&exp, &curves, &[50, 20000]).unwrap();
        assert_eq!(series[0].label, "EEi");
        assert_eq!(series[0].errors[0], None);
        assert!(series[0].errors[1].is_some_and(f64::is_finite));
        assert_eq!(series[0].times, vec![50.0, 20000.0]);
    }

    #[test]
    fn runtime_ratios_start_at_one() {
        let grid = PeriodicGrid::one_d(16).unwrap();
        let rows = runtime_ratio(&ModelSpec::cubic(0.0), Scheme::EtdRdp, grid, &[0, 1, 5], 2, TimeGrid::new(0.1, 10).unwrap(), &SolverOptions::default()).unwrap();
        assert_eq!(rows[0].ratio, 1.0);
        assert_eq!(rows[2].operations.unwrap() / rows[1].operations.unwrap(), 762 / 8);
        assert!(runtime_ratio(&ModelSpec::cubic(0.0), Scheme::EtdRdp, grid, &[1], 1, TimeGrid::new(0.1, 1).unwrap(), &SolverOptions::default()).is_err());
    }

    #[test]
    fn curve_errors_carry_the_label() {
        let grid = PeriodicGrid::one_d(16).unwrap();
        let exp = Experiment::new(ModelSpec::linear(1.0), Scheme::ExplicitEuler, grid, TimeGrid::new(5.0, 50).unwrap());
        let err = run_experiment(&exp, &[Method::intrusive(0)]).unwrap_err();
        assert!(err.is_blow_up());
        match err {
            Error::Curve { label, .. } => assert_eq!(label, "N=0"),
            other => panic!("unexpected {other}"),
        }
        let exp = Experiment { tolerate_blow_up: true, ..exp };
        let (_, series) = run_experiment(&exp, &[Method::intrusive(0)]).unwrap();
        let errs = &series[0].errors;
        assert!(errs[0].is_some() && errs.last().unwrap().is_none());
        assert!(series[0].meta.contains_key("blow_up_after"));
    }

    #[test]
    fn diffusive_linear_model_uses_sampled_reference() {
        let grid = PeriodicGrid::one_d(16).unwrap();
        let mut exp = Experiment::new(ModelSpec::linear(1.0), Scheme::Etdrk4, grid, TimeGrid::new(0.1, 10).unwrap());
        exp.observe = vec![10];
        exp.reference = ReferencePolicy::Auto;
        let auto = reference_solution(&Experiment { reference: ReferencePolicy::Sampled { scheme: Scheme::Etdrk4, steps: 20, q: 8 }, ..exp.clone() }).unwrap();
        assert!(matches!(auto.kind, ReferenceKind::Sampled { .. }));
        let exact = reference_solution(&Experiment { reference: ReferencePolicy::Exact, ..exp }).unwrap();
        assert_eq!(exact.kind, ReferenceKind::Exact);
        let e = rel_l2_error(&auto.fields[0], &exact.fields[0]).unwrap().unwrap();
        assert!(e < 1e-6, "{e}");
    }

    #[test]
    fn spread_series_meets_direct_formula() {
        for w in [0.5f64, 0.9, 0.999, 1.0, 1.5] {
            let direct = 0.5 * (1.0 + (-w).exp()) - (1.0 - (-w).exp()) / w;
            assert_abs_diff_eq!(spread(w), direct, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(spread(1e-6) / 1e-12, 1.0 / 12.0, epsilon = 1e-7);
    }

    proptest! {
        #[test]
        fn errors_are_homogeneous(scale in 0.5f64..2.0, raw in proptest::collection::vec(-3.0f64..3.0, 8)) {
            prop_assume!(raw.iter().any(|v| v.abs() > 1e-3));
            let approx: Vec<f64> = raw.iter().map(|v| scale * v).collect();
            let e = rel_l2_error(&approx, &raw).unwrap().unwrap();
            prop_assert!((e - (scale - 1.0).abs()).abs() < 1e-12);
        }

        #[test]
        fn variance_is_nonnegative(x in -1.0f64..1.0, t in 0.0f64..5.0, d in 0.0f64..2.0) {
            prop_assert!(exact_variance_linear(&[x], t, 1.0, 2.0, d) >= -1e-16);
        }
    }
}
