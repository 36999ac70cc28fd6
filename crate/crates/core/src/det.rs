//! Deterministic solves at a fixed parameter value.

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;
use crate::models::{initial_condition, rhs_det, FieldState, ModelSpec};
use crate::solvers::{integrate, BlockSystem, Observer, Scheme, SolverOptions, TimeGrid};

/// A model frozen at one parameter value.
#[derive(Debug, Clone)]
pub struct DetSystem {
    spec: ModelSpec,
    xi: f64,
    grid: PeriodicGrid,
    diffusions: Vec<f64>,
}

impl DetSystem {
    pub fn new(spec: ModelSpec, xi: f64, grid: PeriodicGrid) -> Result<Self> {
        spec.validate()?;
        if !(xi >= spec.lower && xi <= spec.upper) {
            return Err(Error::Domain {
                x: xi,
                a: spec.lower,
                b: spec.upper,
            });
        }
        Ok(Self {
            diffusions: spec.diffusions(),
            spec,
            xi,
            grid,
        })
    }

    pub fn parameter(&self) -> f64 {
        self.xi
    }
}

impl BlockSystem for DetSystem {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn diffusions(&self) -> &[f64] {
        &self.diffusions
    }

    fn reaction(&self, state: &[f64], out: &mut [f64]) {
        rhs_det(&self.spec, self.xi, state, out)
    }
}

/// Runs `scheme` from the model's initial condition at parameter `xi`.
pub fn det_solve(
    scheme: Scheme,
    spec: &ModelSpec,
    xi: f64,
    grid: PeriodicGrid,
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<FieldState> {
    let system = DetSystem::new(*spec, xi, grid)?;
    let init = initial_condition(spec, &grid)?;
    let data = integrate(scheme, &system, &init.data, time, options, observer)?;
    Ok(FieldState {
        species: spec.species(),
        data,
        time: time.final_time(),
    })
}

pub fn ee_solve(
    spec: &ModelSpec,
    xi: f64,
    grid: PeriodicGrid,
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<FieldState> {
    det_solve(Scheme::ExplicitEuler, spec, xi, grid, time, options, observer)
}

pub fn etdrdp_solve(
    spec: &ModelSpec,
    xi: f64,
    grid: PeriodicGrid,
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<FieldState> {
    det_solve(Scheme::EtdRdp, spec, xi, grid, time, options, observer)
}

pub fn etdrdpif_solve_2d(
    spec: &ModelSpec,
    xi: f64,
    grid: PeriodicGrid,
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<FieldState> {
    det_solve(Scheme::EtdRdpIf, spec, xi, grid, time, options, observer)
}

pub fn etdrk4_solve(
    spec: &ModelSpec,
    xi: f64,
    grid: PeriodicGrid,
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<FieldState> {
    det_solve(Scheme::Etdrk4, spec, xi, grid, time, options, observer)
}
