//! Time integrators shared by the deterministic and intrusive solvers.
//!
//! Every scheme works on a [`BlockSystem`]: a stack of grid fields, each with
//! its own diffusion constant, coupled only through the reaction term. A
//! deterministic scalar model is one block, Gray-Scott is two, and an intrusive
//! chaos system is `N + 1` (or `2(N + 1)`) coefficient blocks.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::grid::{DealiasRule, PeriodicGrid};

mod fd;
mod spectral;

pub use spectral::{build_etd_coefficients, contour_mean, EtdCoefficients};

/// Stacked grid fields evolving under `∂_t u_b = D_b Δu_b + R_b(u)`.
pub trait BlockSystem: Sync {
    fn grid(&self) -> &PeriodicGrid;

    /// Diffusion constant of each block; its length is the block count.
    fn diffusions(&self) -> &[f64];

    /// Writes the reaction terms `R(u)` for the stacked physical-space state.
    fn reaction(&self, state: &[f64], out: &mut [f64]);

    fn blocks(&self) -> usize {
        self.diffusions().len()
    }

    fn state_len(&self) -> usize {
        self.blocks() * self.grid().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    ExplicitEuler,
    EtdRdp,
    EtdRdpIf,
    Etdrk4,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::ExplicitEuler,
        Scheme::EtdRdp,
        Scheme::EtdRdpIf,
        Scheme::Etdrk4,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Scheme::ExplicitEuler => "ee",
            Scheme::EtdRdp => "etdrdp",
            Scheme::EtdRdpIf => "etdrdpif",
            Scheme::Etdrk4 => "etdrk4",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Scheme::ExplicitEuler => "EE",
            Scheme::EtdRdp => "ETD-RDP",
            Scheme::EtdRdpIf => "ETD-RDP-IF",
            Scheme::Etdrk4 => "ETDRK4",
        }
    }

    /// Discretization tag used in output file names.
    pub fn file_tag(&self) -> &'static str {
        match self {
            Scheme::ExplicitEuler => "FD_EE",
            Scheme::EtdRdp | Scheme::EtdRdpIf => "FD_ETDRDP",
            Scheme::Etdrk4 => "Spectral",
        }
    }

    /// The second-order ETD scheme appropriate for a grid dimension.
    pub fn rdp_for(dim: usize) -> Scheme {
        if dim == 2 {
            Scheme::EtdRdpIf
        } else {
            Scheme::EtdRdp
        }
    }

    /// Checks that the scheme can run on `grid`.
    pub fn check_grid(&self, grid: &PeriodicGrid) -> Result<()> {
        let p = grid.points();
        match self {
            Scheme::EtdRdp if grid.dim() != 1 => Err(Error::InvalidGrid(
                "ETD-RDP runs on 1D grids; use ETD-RDP-IF in 2D".into(),
            )),
            Scheme::EtdRdpIf if grid.dim() != 2 => Err(Error::InvalidGrid(
                "ETD-RDP-IF runs on 2D grids; use ETD-RDP in 1D".into(),
            )),
            Scheme::Etdrk4 if !p.is_multiple_of(2) => Err(Error::InvalidGrid(format!(
                "ETDRK4 needs an even number of points, got {p}"
            ))),
            Scheme::ExplicitEuler | Scheme::EtdRdp | Scheme::EtdRdpIf if p < 3 => Err(
                Error::InvalidGrid(format!("finite differences need p >= 3, got {p}")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "ee" | "euler" => Ok(Scheme::ExplicitEuler),
            "etdrdp" | "rdp" => Ok(Scheme::EtdRdp),
            "etdrdpif" | "rdpif" => Ok(Scheme::EtdRdpIf),
            "etdrk4" | "rk4" => Ok(Scheme::Etdrk4),
            _ => Err(invalid(format!("unknown scheme '{s}'"))),
        }
    }
}

/// `M` uniform steps of size `k = T/M` on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    final_time: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(final_time: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(invalid("number of time steps M must be at least 1"));
        }
        if !(final_time.is_finite() && final_time > 0.0) {
            return Err(invalid(format!("final time must be positive, got {final_time}")));
        }
        Ok(Self { final_time, steps })
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        self.final_time / self.steps as f64
    }

    /// `t_n`; `t_M` is exactly `T`.
    pub fn time(&self, n: usize) -> f64 {
        self.final_time * n as f64 / self.steps as f64
    }
}

/// Receives the physical-space state at selected steps `0..=M`.
pub trait Observer {
    /// Whether the state at `step` is needed; spectral schemes skip the
    /// back-transform otherwise.
    fn wants(&self, step: usize) -> bool {
        let _ = step;
        true
    }

    fn observe(&mut self, step: usize, time: f64, state: &[f64]);
}

impl<F: FnMut(usize, f64, &[f64])> Observer for F {
    fn observe(&mut self, step: usize, time: f64, state: &[f64]) {
        self(step, time, state)
    }
}

/// Observer that ignores every step.
#[derive(Debug, Clone, Copy, Default)]
pub struct Silent;

impl Observer for Silent {
    fn wants(&self, _: usize) -> bool {
        false
    }

    fn observe(&mut self, _: usize, _: f64, _: &[f64]) {}
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Points on each contour for the ETDRK4 coefficients.
    pub contour_points: usize,
    pub dealias: DealiasRule,
    /// States with an entry above this magnitude count as blown up.
    pub blow_up: f64,
    pub execution: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            contour_points: 32,
            dealias: DealiasRule::TwoThirds,
            blow_up: 1e12,
            execution: Execution::default(),
        }
    }
}

/// Integrates `system` from `initial` over `time` and returns the final state.
///
/// The observer sees steps `0..=M` in order. A non-finite entry or one larger
/// than `options.blow_up` aborts with [`Error::BlowUp`].
pub fn integrate<S: BlockSystem + ?Sized>(
    scheme: Scheme,
    system: &S,
    initial: &[f64],
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<Vec<f64>> {
    scheme.check_grid(system.grid())?;
    if initial.len() != system.state_len() {
        return Err(Error::Shape {
            expected: system.state_len(),
            got: initial.len(),
        });
    }
    check_state(initial, options.blow_up, 0, 0.0)?;
    match scheme {
        Scheme::ExplicitEuler => fd::explicit_euler(system, initial, time, options, observer),
        Scheme::EtdRdp => fd::etd_rdp(system, initial, time, options, observer),
        Scheme::EtdRdpIf => fd::etd_rdp_if(system, initial, time, options, observer),
        Scheme::Etdrk4 => spectral::etdrk4(system, initial, time, options, observer),
    }
}

pub(crate) fn check_state(state: &[f64], threshold: f64, step: usize, time: f64) -> Result<()> {
    if state.iter().all(|v| v.abs() <= threshold) {
        Ok(())
    } else {
        Err(Error::BlowUp {
            step,
            time,
            threshold,
        })
    }
}

/// Index of each block's diffusion constant within the list of distinct values.
pub(crate) fn distinct_diffusions(diffusions: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut values: Vec<f64> = Vec::new();
    let index = diffusions
        .iter()
        .map(|&d| match values.iter().position(|&v| v == d) {
            Some(i) => i,
            None => {
                values.push(d);
                values.len() - 1
            }
        })
        .collect();
    (values, index)
}
