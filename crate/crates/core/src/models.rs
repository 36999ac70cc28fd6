//! Model equations: the scalar family `u_t = DΔu - ξu^m` (`m = 1, 2, 3`) and the
//! two-species Gray-Scott system with a random kill rate.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::grid::PeriodicGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Linear,
    Quadratic,
    Cubic,
    GrayScott,
}

impl ModelKind {
    pub fn id(&self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Quadratic => "quadratic",
            ModelKind::Cubic => "cubic",
            ModelKind::GrayScott => "grayscott",
        }
    }

    /// Numeric system tag used in output file names.
    pub fn system_id(&self) -> u32 {
        match self {
            ModelKind::Linear => 6,
            ModelKind::Quadratic => 7,
            ModelKind::Cubic => 8,
            ModelKind::GrayScott => 0,
        }
    }

    /// Power of `u` in the reaction term of the scalar models.
    pub fn power(&self) -> Option<u32> {
        match self {
            ModelKind::Linear => Some(1),
            ModelKind::Quadratic => Some(2),
            ModelKind::Cubic => Some(3),
            ModelKind::GrayScott => None,
        }
    }

    pub fn species(&self) -> usize {
        if *self == ModelKind::GrayScott {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(ModelKind::Linear),
            "quadratic" => Ok(ModelKind::Quadratic),
            "cubic" => Ok(ModelKind::Cubic),
            "grayscott" | "gray-scott" => Ok(ModelKind::GrayScott),
            other => Err(invalid(format!("unknown model '{other}'"))),
        }
    }
}

pub const GRAY_SCOTT_FEED: f64 = 0.04;
pub const GRAY_SCOTT_DU: f64 = 2e-5;
pub const GRAY_SCOTT_DV: f64 = 1e-5;
pub const GRAY_SCOTT_KILL: (f64, f64) = (0.058, 0.062);

/// Equation definition. `lower..upper` is the support of the uniform random
/// parameter: the rate `K` of the scalar models or the kill rate `k` of Gray-Scott.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Diffusion of `u`.
    pub diffusion: f64,
    /// Diffusion of `v` (Gray-Scott only).
    pub diffusion_v: f64,
    pub lower: f64,
    pub upper: f64,
    /// Feed rate `F` (Gray-Scott only).
    pub feed: f64,
    /// Use `(x-μ)²` instead of `(x-μ)³` in the 1D Gray-Scott `v` profile.
    pub square_exponent: bool,
}

impl ModelSpec {
    pub fn scalar(kind: ModelKind, diffusion: f64) -> Self {
        Self {
            kind,
            diffusion,
            diffusion_v: 0.0,
            lower: 1.0,
            upper: 2.0,
            feed: 0.0,
            square_exponent: false,
        }
    }

    pub fn linear(diffusion: f64) -> Self {
        Self::scalar(ModelKind::Linear, diffusion)
    }

    pub fn quadratic(diffusion: f64) -> Self {
        Self::scalar(ModelKind::Quadratic, diffusion)
    }

    pub fn cubic(diffusion: f64) -> Self {
        Self::scalar(ModelKind::Cubic, diffusion)
    }

    pub fn gray_scott() -> Self {
        Self {
            kind: ModelKind::GrayScott,
            diffusion: GRAY_SCOTT_DU,
            diffusion_v: GRAY_SCOTT_DV,
            lower: GRAY_SCOTT_KILL.0,
            upper: GRAY_SCOTT_KILL.1,
            feed: GRAY_SCOTT_FEED,
            square_exponent: false,
        }
    }

    pub fn with_interval(mut self, lower: f64, upper: f64) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.upper > self.lower) {
            return Err(invalid(format!(
                "parameter interval [{}, {}] must satisfy b > a",
                self.lower, self.upper
            )));
        }
        if !(self.diffusion >= 0.0 && self.diffusion_v >= 0.0) {
            return Err(invalid("diffusion constants must be nonnegative"));
        }
        if self.kind == ModelKind::GrayScott && (self.feed.is_nan() || self.feed <= 0.0) {
            return Err(invalid("Gray-Scott feed rate must be positive"));
        }
        Ok(())
    }

    pub fn species(&self) -> usize {
        self.kind.species()
    }

    /// Diffusion constant of each species.
    pub fn diffusions(&self) -> Vec<f64> {
        match self.kind {
            ModelKind::GrayScott => vec![self.diffusion, self.diffusion_v],
            _ => vec![self.diffusion],
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Species fields stacked one after another, plus the time they belong to.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub species: usize,
    pub data: Vec<f64>,
    pub time: f64,
}

impl FieldState {
    pub fn field(&self, s: usize) -> &[f64] {
        let n = self.data.len() / self.species;
        &self.data[s * n..(s + 1) * n]
    }

    pub fn u(&self) -> &[f64] {
        self.field(0)
    }

    pub fn v(&self) -> Option<&[f64]> {
        (self.species > 1).then(|| self.field(1))
    }
}

// Γ(1/3).
const GAMMA_THIRD: f64 = 2.678_938_534_707_747_6;

pub fn initial_condition(spec: &ModelSpec, grid: &PeriodicGrid) -> Result<FieldState> {
    let data = match (spec.kind, grid.dim()) {
        (ModelKind::GrayScott, 1) => {
            let mu = 0.0;
            let amp_u = 5.0 / (3.0 * (2.0 * PI).sqrt());
            let amp_v = 0.37 * 7.5 / (2.0 * 2f64.sqrt() * GAMMA_THIRD);
            let power = if spec.square_exponent { 2 } else { 3 };
            let mut data = grid.sample(|x| 1.0 - amp_u * (-6.0 * (x[0] - mu).powi(2)).exp());
            data.extend(grid.sample(|x| {
                amp_v * (-7.0 * (x[0] - mu).powi(power) / 2f64.sqrt()).exp()
            }));
            data
        }
        (ModelKind::GrayScott, _) => {
            let c = 2.0 / 7.0;
            let centers = [(c, c), (-c, c), (c, -c), (-c, -c)];
            let v = grid.sample(|x| {
                0.25 * centers
                    .iter()
                    .map(|&(cx, cy)| (-150.0 * ((x[0] - cx).powi(2) + (x[1] - cy).powi(2))).exp())
                    .sum::<f64>()
            });
            let mut data: Vec<f64> = v.iter().map(|v| 1.0 - v).collect();
            data.extend(v);
            data
        }
        (_, 1) => grid.sample(|x| (PI * x[0]).cos()),
        _ => grid.sample(|x| (PI * x[0]).cos() * (PI * x[1]).cos()),
    };
    Ok(FieldState {
        species: spec.species(),
        data,
        time: 0.0,
    })
}

/// Reaction terms at parameter value `xi`; diffusion is handled by the solvers.
/// `state` and `out` hold the species fields stacked.
pub fn rhs_det(spec: &ModelSpec, xi: f64, state: &[f64], out: &mut [f64]) {
    match spec.kind {
        ModelKind::Linear => {
            for (o, u) in out.iter_mut().zip(state) {
                *o = -xi * u;
            }
        }
        ModelKind::Quadratic => {
            for (o, u) in out.iter_mut().zip(state) {
                *o = -xi * u * u;
            }
        }
        ModelKind::Cubic => {
            for (o, u) in out.iter_mut().zip(state) {
                *o = -xi * u * u * u;
            }
        }
        ModelKind::GrayScott => {
            let n = state.len() / 2;
            let (u, v) = state.split_at(n);
            let (du, dv) = out.split_at_mut(n);
            let f = spec.feed;
            for x in 0..n {
                let uvv = u[x] * v[x] * v[x];
                du[x] = -uvv + f * (1.0 - u[x]);
                dv[x] = uvv - (f + xi) * v[x];
            }
        }
    }
}

/// Homogeneous Gray-Scott steady states for feed `F` and kill rate `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStates {
    /// Trivial state `v = 0`.
    pub red: f64,
    /// `½α(1+√d)` when `d > 0`.
    pub blue: Option<f64>,
    /// `½α(1-√d)` when `d > 0`.
    pub middle: Option<f64>,
    /// `d = 1 - 4(F+k)²/F`.
    pub discriminant: f64,
}

/// Scale factor of the nontrivial states in the standard Gray-Scott
/// normalization, `α = F/(F+k)`.
pub fn standard_alpha(feed: f64, kill: f64) -> f64 {
    feed / (feed + kill)
}

pub fn steady_states(feed: f64, kill: f64, alpha: f64) -> Result<SteadyStates> {
    if feed.is_nan() || feed <= 0.0 {
        return Err(invalid(format!("feed rate must be positive, got {feed}")));
    }
    let d = 1.0 - 4.0 * (feed + kill).powi(2) / feed;
    let (blue, middle) = if d > 0.0 {
        let s = d.sqrt();
        (Some(0.5 * alpha * (1.0 + s)), Some(0.5 * alpha * (1.0 - s)))
    } else {
        (None, None)
    };
    Ok(SteadyStates {
        red: 0.0,
        blue,
        middle,
        discriminant: d,
    })
}

/// Necessary condition for Turing pattern formation around the steady state `v0`.
pub fn turing_condition(feed: f64, kill: f64, v0: f64) -> bool {
    let s = feed + kill;
    let v2 = v0 * v0;
    (2.0 * s - (v2 + feed)).powi(2) > 8.0 * s * (v2 - feed)
}
