//! Non-intrusive chaos: deterministic runs at sample points projected onto
//! the Legendre basis.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::chaos::LegendreBasis;
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::grid::PeriodicGrid;
use crate::ipce::{variance_of, PceState};
use crate::models::{initial_condition, ModelSpec};
use crate::samplers::{SampleSet, SamplerKind};
use crate::solvers::{integrate, Observer, Scheme, SolverOptions, TimeGrid};
use crate::det::DetSystem;

/// A solver treated as an opaque map from a parameter value to snapshots.
pub trait BlackBox: Sync {
    /// Entries per snapshot (all species stacked).
    fn state_len(&self) -> usize;

    fn species(&self) -> usize;

    /// States at each of `steps`, in the given order.
    fn run(&self, xi: f64, steps: &[usize]) -> Result<Vec<Vec<f64>>>;
}

/// Deterministic solve of a model at one parameter value.
#[derive(Debug, Clone)]
pub struct DetRunner {
    spec: ModelSpec,
    scheme: Scheme,
    grid: PeriodicGrid,
    time: TimeGrid,
    options: SolverOptions,
    initial: Vec<f64>,
}

impl DetRunner {
    /// Each run is sequential; parallelism comes from the sample loop.
    pub fn new(spec: ModelSpec, scheme: Scheme, grid: PeriodicGrid, time: TimeGrid, options: SolverOptions) -> Result<Self> {
        spec.validate()?;
        scheme.check_grid(&grid)?;
        let initial = initial_condition(&spec, &grid)?.data;
        Ok(Self {
            spec,
            scheme,
            grid,
            time,
            options: SolverOptions {
                execution: Execution::Sequential,
                ..options
            },
            initial,
        })
    }

    pub fn time(&self) -> TimeGrid {
        self.time
    }
}

struct Snapshots<'a> {
    steps: &'a [usize],
    out: Vec<Vec<f64>>,
}

impl Observer for Snapshots<'_> {
    fn wants(&self, step: usize) -> bool {
        self.steps.contains(&step)
    }

    fn observe(&mut self, step: usize, _: f64, state: &[f64]) {
        for (slot, &s) in self.out.iter_mut().zip(self.steps) {
            if s == step {
                *slot = state.to_vec();
            }
        }
    }
}

impl BlackBox for DetRunner {
    fn state_len(&self) -> usize {
        self.initial.len()
    }

    fn species(&self) -> usize {
        self.spec.species()
    }

    fn run(&self, xi: f64, steps: &[usize]) -> Result<Vec<Vec<f64>>> {
        let system = DetSystem::new(self.spec, xi, self.grid)?;
        let mut obs = Snapshots {
            steps,
            out: vec![Vec::new(); steps.len()],
        };
        integrate(self.scheme, &system, &self.initial, self.time, &self.options, &mut obs)?;
        Ok(obs.out)
    }
}

/// Every step in 1D; every tenth step plus the last in 2D.
pub fn default_observation_steps(steps: usize, dim: usize) -> Vec<usize> {
    let stride = if dim == 1 { 1 } else { 10 };
    let mut out: Vec<usize> = (0..=steps).step_by(stride).collect();
    if out.last() != Some(&steps) {
        out.push(steps);
    }
    out
}

/// Projected chaos coefficients at the observed steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub steps: Vec<usize>,
    pub times: Vec<f64>,
    pub degree: usize,
    pub species: usize,
    /// One stacked coefficient state per observed step (layout as [`PceState`]).
    pub coefficients: Vec<Vec<f64>>,
    /// `Σ_j w_j u(ξ_j)²` per observed step.
    pub second_moment: Vec<Vec<f64>>,
    pub sampler: SamplerKind,
    pub samples: usize,
    /// Number of black-box evaluations actually performed.
    pub runs: usize,
}

impl ProjectionResult {
    fn grid_len(&self) -> usize {
        self.second_moment[0].len() / self.species
    }

    pub fn state(&self, obs: usize) -> PceState {
        PceState {
            degree: self.degree,
            species: self.species,
            data: self.coefficients[obs].clone(),
            time: self.times[obs],
        }
    }

    pub fn mean(&self, obs: usize, species: usize) -> Vec<f64> {
        let n = self.grid_len();
        let start = species * (self.degree + 1) * n;
        self.coefficients[obs][start..start + n].to_vec()
    }

    /// `Σ_{i≥1} u_i²`.
    pub fn variance(&self, obs: usize, species: usize) -> Vec<f64> {
        variance_of(&self.coefficients[obs], species, self.degree + 1, self.grid_len())
    }

    /// `E[u²] - E[u]²` from the directly accumulated second moment.
    pub fn moment_variance(&self, obs: usize, species: usize) -> Vec<f64> {
        let n = self.grid_len();
        let m2 = &self.second_moment[obs][species * n..(species + 1) * n];
        m2.iter()
            .zip(self.mean(obs, species))
            .map(|(s, m)| s - m * m)
            .collect()
    }
}

/// Samples evaluated concurrently before their contributions are folded in.
const BATCH: usize = 32;

/// Runs `solver` once per sample and projects onto `P_0..=P_degree`, with the
/// basis evaluated at the samples' reference coordinates. Contributions are summed in sample order, so the result does not
/// depend on the execution policy.
pub fn nipce_run(
    solver: &dyn BlackBox,
    samples: &SampleSet,
    basis: &LegendreBasis,
    steps: &[usize],
    time: TimeGrid,
    execution: Execution,
) -> Result<ProjectionResult> {
    if samples.is_empty() {
        return Err(invalid("sample set is empty"));
    }
    if steps.is_empty() {
        return Err(invalid("no observation steps requested"));
    }
    if let Some(&s) = steps.iter().find(|&&s| s > time.steps()) {
        return Err(invalid(format!(
            "observation step {s} exceeds the {} time steps",
            time.steps()
        )));
    }
    let modes = basis.len();
    let len = solver.state_len();
    let species = solver.species();
    let n = len / species;
    let mut coefficients = vec![vec![0.0; modes * len]; steps.len()];
    let mut second_moment = vec![vec![0.0; len]; steps.len()];
    let runs = AtomicUsize::new(0);

    for start in (0..samples.len()).step_by(BATCH) {
        let count = BATCH.min(samples.len() - start);
        let batch = execution.map(count, |off| {
            let j = start + off;
            let xi = samples.points[j];
            let wrap = |e: Error| Error::Sample {
                index: j,
                xi,
                source: Box::new(e),
            };
            let p = basis.eval_reference(samples.reference[j]).map_err(wrap)?;
            runs.fetch_add(1, Ordering::Relaxed);
            let snaps = solver.run(xi, steps).map_err(wrap)?;
            Ok((p, snaps))
        });
        for (off, item) in batch.into_iter().enumerate() {
            let (p, snaps) = item?;
            let w = samples.weights[start + off];
            for ((coef, m2), snap) in coefficients.iter_mut().zip(&mut second_moment).zip(&snaps) {
                for s in 0..species {
                    let field = &snap[s * n..(s + 1) * n];
                    for (i, pi) in p.iter().enumerate() {
                        let wp = w * pi;
                        let block = &mut coef[(s * modes + i) * n..(s * modes + i + 1) * n];
                        for (c, u) in block.iter_mut().zip(field) {
                            *c += wp * u;
                        }
                    }
                }
                for (m, u) in m2.iter_mut().zip(snap) {
                    *m += w * u * u;
                }
            }
        }
    }

    Ok(ProjectionResult {
        times: steps.iter().map(|&s| time.time(s)).collect(),
        steps: steps.to_vec(),
        degree: basis.degree(),
        species,
        coefficients,
        second_moment,
        sampler: samples.kind,
        samples: samples.len(),
        runs: runs.into_inner(),
    })
}

/// Builds a [`DetRunner`] for `spec` and projects with degree `degree`.
#[allow(clippy::too_many_arguments)]
pub fn nipce_model(
    spec: &ModelSpec,
    scheme: Scheme,
    samples: &SampleSet,
    degree: usize,
    grid: PeriodicGrid,
    time: TimeGrid,
    steps: &[usize],
    options: &SolverOptions,
) -> Result<ProjectionResult> {
    let runner = DetRunner::new(*spec, scheme, grid, time, *options)?;
    let basis = LegendreBasis::new(spec.lower, spec.upper, degree)?;
    nipce_run(&runner, samples, &basis, steps, time, options.execution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::make_samples;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    /// `u(x, t, ξ) = P_2(ξ) cos(πx)` at every step.
    struct Quadratic {
        basis: LegendreBasis,
        grid: PeriodicGrid,
    }

    impl BlackBox for Quadratic {
        fn state_len(&self) -> usize {
            self.grid.len()
        }
        fn species(&self) -> usize {
            1
        }
        fn run(&self, xi: f64, steps: &[usize]) -> Result<Vec<Vec<f64>>> {
            let p2 = self.basis.eval(xi)?[2];
            let field = self.grid.sample(|x| p2 * (PI * x[0]).cos());
            Ok(vec![field; steps.len()])
        }
    }

    #[test]
    fn projection_recovers_polynomial_dependence() {
        let grid = PeriodicGrid::one_d(16).unwrap();
        let basis = LegendreBasis::new(1.0, 2.0, 6).unwrap();
        let bb = Quadratic { basis, grid };
        let samples = make_samples(SamplerKind::Gauss, 8, 1.0, 2.0, 0).unwrap();
        let tg = TimeGrid::new(1.0, 4).unwrap();
        let res = nipce_run(&bb, &samples, &basis, &[0, 4], tg, Execution::default()).unwrap();
        assert_eq!(res.runs, 8);
        for obs in 0..2 {
            let state = res.state(obs);
            for eta in 0..=6 {
                for (x, c) in state.coefficient(0, eta).iter().enumerate() {
                    let want = if eta == 2 { (PI * grid.node(x)).cos() } else { 0.0 };
                    assert_abs_diff_eq!(*c, want, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn run_count_ignores_projection_degree() {
        let grid = PeriodicGrid::one_d(8).unwrap();
        let samples = make_samples(SamplerKind::Sobol, 12, 1.0, 2.0, 0).unwrap();
        let tg = TimeGrid::new(0.1, 5).unwrap();
        for degree in [2, 10] {
            let basis = LegendreBasis::new(1.0, 2.0, degree).unwrap();
            let bb = Quadratic { basis: LegendreBasis::new(1.0, 2.0, 2).unwrap(), grid };
            let res = nipce_run(&bb, &samples, &basis, &[5], tg, Execution::default()).unwrap();
            assert_eq!(res.runs, 12);
            assert_eq!(res.samples, 12);
        }
    }

    #[test]
    fn variance_identity_on_linear_model() {
        let spec = ModelSpec::linear(0.0);
        let grid = PeriodicGrid::one_d(32).unwrap();
        let tg = TimeGrid::new(2.0, 100).unwrap();
        let samples = make_samples(SamplerKind::Gauss, 50, 1.0, 2.0, 0).unwrap();
        let res = nipce_model(&spec, Scheme::Etdrk4, &samples, 10, grid, tg, &[50, 100], &SolverOptions::default()).unwrap();
        for obs in 0..2 {
            let var = res.variance(obs, 0);
            for (a, b) in var.iter().zip(res.moment_variance(obs, 0)) {
                assert!(*a >= -1e-14);
                assert_abs_diff_eq!(*a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_interval_has_no_variance() {
        let spec = ModelSpec::linear(0.5).with_interval(1.5, 1.5 + 1e-12);
        let grid = PeriodicGrid::one_d(16).unwrap();
        let tg = TimeGrid::new(1.0, 20).unwrap();
        let samples = make_samples(SamplerKind::Gauss, 5, spec.lower, spec.upper, 0).unwrap();
        let res = nipce_model(&spec, Scheme::EtdRdp, &samples, 3, grid, tg, &[20], &SolverOptions::default()).unwrap();
        let worst = res.variance(0, 0).into_iter().fold(0.0, f64::max);
        assert!(worst <= 1e-16, "{worst}");
        let single = DetRunner::new(spec, Scheme::EtdRdp, grid, tg, SolverOptions::default())
            .unwrap()
            .run(1.5, &[20])
            .unwrap();
        for (a, b) in res.mean(0, 0).iter().zip(&single[0]) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
    }

    #[test]
    fn sample_failures_name_the_parameter() {
        let spec = ModelSpec::quadratic(0.0);
        let grid = PeriodicGrid::one_d(16).unwrap();
        let tg = TimeGrid::new(1.0, 1000).unwrap();
        let samples = make_samples(SamplerKind::Gauss, 4, 1.0, 2.0, 0).unwrap();
        let err = nipce_model(&spec, Scheme::ExplicitEuler, &samples, 2, grid, tg, &[1000], &SolverOptions::default())
            .unwrap_err();
        assert!(err.is_blow_up());
        match err {
            Error::Sample { index, xi, .. } => assert_eq!(samples.points[index], xi),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn execution_policy_does_not_change_bits() {
        let spec = ModelSpec::cubic(1.0);
        let grid = PeriodicGrid::one_d(32).unwrap();
        let tg = TimeGrid::new(0.5, 20).unwrap();
        let samples = make_samples(SamplerKind::MonteCarlo, 70, 1.0, 2.0, 9).unwrap();
        let steps = default_observation_steps(20, 1);
        let mut opts = SolverOptions { execution: Execution::Sequential, ..Default::default() };
        let a = nipce_model(&spec, Scheme::Etdrk4, &samples, 4, grid, tg, &steps, &opts).unwrap();
        opts.execution = Execution::Parallel;
        let b = nipce_model(&spec, Scheme::Etdrk4, &samples, 4, grid, tg, &steps, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn observation_steps() {
        assert_eq!(default_observation_steps(3, 1), vec![0, 1, 2, 3]);
        assert_eq!(default_observation_steps(25, 2), vec![0, 10, 20, 25]);
        let grid = PeriodicGrid::one_d(8).unwrap();
        let basis = LegendreBasis::new(1.0, 2.0, 2).unwrap();
        let bb = Quadratic { basis, grid };
        let samples = make_samples(SamplerKind::Gauss, 3, 1.0, 2.0, 0).unwrap();
        let tg = TimeGrid::new(1.0, 4).unwrap();
        assert!(nipce_run(&bb, &samples, &basis, &[5], tg, Execution::default()).is_err());
    }
}
