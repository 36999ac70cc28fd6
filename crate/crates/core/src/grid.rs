//! Periodic grids on `(-1, 1)^d`, the second-order finite-difference
//! Laplacian with its shifted solves, and the Fourier representation used by
//! the spectral schemes.
//!
//! Fields are stored as flat `f64` slices. In two dimensions the layout is
//! row-major: entry `i0 * p + i1` holds the value at `(x_{i0}, x_{i1})`, so the
//! inner index is contiguous. In Kronecker notation the inner-axis operator is
//! `I ⊗ A_p` and the outer-axis operator is `A_p ⊗ I`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid with `p` points per dimension on `(-1, 1)^dim`.
///
/// Nodes are `x_i = -1 + 2i/p`; the right endpoint is identified with the left one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicGrid {
    dim: usize,
    points: usize,
}

impl PeriodicGrid {
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if points == 0 {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        Ok(Self { dim, points })
    }

    pub fn one_d(points: usize) -> Result<Self> {
        Self::new(1, points)
    }

    pub fn two_d(points: usize) -> Result<Self> {
        Self::new(2, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per dimension.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of unknowns, `p^dim`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mesh width `h = 2/p`.
    pub fn spacing(&self) -> f64 {
        2.0 / self.points as f64
    }

    /// One-dimensional node coordinates `x_i`, `i = 0..p`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    pub fn node(&self, i: usize) -> f64 {
        -1.0 + 2.0 * i as f64 / self.points as f64
    }

    /// Samples `f` at every grid point. `f` receives the coordinates of one point.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let nodes = self.nodes();
        match self.dim {
            1 => nodes.iter().map(|&x| f(&[x])).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for &x0 in &nodes {
                    for &x1 in &nodes {
                        out.push(f(&[x0, x1]));
                    }
                }
                out
            }
        }
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.len() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.len(),
                got: len,
            })
        }
    }
}

/// Axis of a two-dimensional grid. One-dimensional grids only have [`Axis::Inner`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Contiguous index; the operator `I ⊗ A_p`.
    Inner,
    /// Strided index; the operator `A_p ⊗ I`.
    Outer,
}

/// Calls `f` once per grid line along `axis` with a gathered copy of the line,
/// then scatters the (possibly modified) line back.
fn for_each_line(
    grid: &PeriodicGrid,
    axis: Axis,
    data: &mut [f64],
    mut f: impl FnMut(&mut [f64]),
) {
    let p = grid.points();
    if grid.dim() == 1 || axis == Axis::Inner {
        for line in data.chunks_exact_mut(p) {
            f(line);
        }
        return;
    }
    let mut line = vec![0.0; p];
    for col in 0..p {
        for (i, v) in line.iter_mut().enumerate() {
            *v = data[i * p + col];
        }
        f(&mut line);
        for (i, v) in line.iter().enumerate() {
            data[i * p + col] = *v;
        }
    }
}

/// Periodic second-order finite-difference Laplacian `Δ_h`.
///
/// `(Δ_h u)_i = (u_{i-1} - 2u_i + u_{i+1}) / h²` with wraparound; the 2D operator
/// is the Kronecker sum of the two axis operators. The matrix `A_p = -Δ_h` is
/// positive semidefinite.
#[derive(Debug, Clone, Copy)]
pub struct FdLaplacian {
    grid: PeriodicGrid,
    inv_h2: f64,
}

impl FdLaplacian {
    pub fn new(grid: PeriodicGrid) -> Result<Self> {
        if grid.points() < 3 {
            return Err(Error::InvalidGrid(format!(
                "finite-difference Laplacian needs p >= 3, got {}",
                grid.points()
            )));
        }
        let h = grid.spacing();
        Ok(Self {
            grid,
            inv_h2: 1.0 / (h * h),
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// `out = Δ_h u`.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        self.accumulate_axis(Axis::Inner, u, out);
        if self.grid.dim() == 2 {
            self.accumulate_axis(Axis::Outer, u, out);
        }
    }

    /// `out = D_axis u`, the second difference along one axis only.
    pub fn apply_axis(&self, axis: Axis, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        self.accumulate_axis(axis, u, out);
    }

    fn accumulate_axis(&self, axis: Axis, u: &[f64], out: &mut [f64]) {
        let p = self.grid.points();
        let (lines, stride, step) = match (self.grid.dim(), axis) {
            (1, _) | (_, Axis::Inner) => (self.grid.len() / p, p, 1),
            _ => (p, 1, p),
        };
        for line in 0..lines {
            let base = line * stride;
            for i in 0..p {
                let left = if i == 0 { p - 1 } else { i - 1 };
                let right = if i + 1 == p { 0 } else { i + 1 };
                let c = u[base + i * step];
                let l = u[base + left * step];
                let r = u[base + right * step];
                out[base + i * step] += (l - 2.0 * c + r) * self.inv_h2;
            }
        }
    }

    /// Materializes `Δ_h` as a dense row-major matrix. Only meant for small grids.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.grid.len();
        let mut unit = vec![0.0; n];
        let mut col = vec![0.0; n];
        let mut dense = vec![vec![0.0; n]; n];
        for j in 0..n {
            unit[j] = 1.0;
            self.apply(&unit, &mut col);
            for (i, row) in dense.iter_mut().enumerate() {
                row[j] = col[i];
            }
            unit[j] = 0.0;
        }
        dense
    }
}

pub fn build_fd_laplacian(grid: PeriodicGrid) -> Result<FdLaplacian> {
    FdLaplacian::new(grid)
}

/// Direct solver for `(I + c·A_p) x = rhs` along grid lines, `A_p = -Δ_h`.
///
/// The periodic tridiagonal system is factored once (Sherman–Morrison on top
/// of a Thomas factorization) and the factors are reused for every solve.
#[derive(Debug, Clone)]
pub struct ShiftedSolver {
    grid: PeriodicGrid,
    axis: Axis,
    shift: f64,
    factors: Option<CyclicFactors>,
}

#[derive(Debug, Clone)]
struct CyclicFactors {
    off: f64,
    gamma: f64,
    // Thomas coefficients of the modified tridiagonal matrix.
    inv_pivot: Vec<f64>,
    upper: Vec<f64>,
    // Solution of the modified system for the rank-one correction vector.
    z: Vec<f64>,
    denom: f64,
}

impl CyclicFactors {
    fn new(p: usize, diag: f64, off: f64) -> Result<Self> {
        let gamma = -diag;
        let mut bb = vec![diag; p];
        bb[0] = diag - gamma;
        bb[p - 1] = diag - off * off / gamma;

        let scale = diag.abs().max(off.abs());
        let mut inv_pivot = vec![0.0; p];
        let mut upper = vec![0.0; p];
        let mut pivot = bb[0];
        for i in 0..p {
            if i > 0 {
                pivot = bb[i] - off * upper[i - 1];
            }
            if pivot.abs() <= 1e-14 * scale {
                return Err(Error::Numerical {
                    what: format!("shifted solve factorization (zero pivot at row {i})"),
                    residual: f64::INFINITY,
                });
            }
            inv_pivot[i] = 1.0 / pivot;
            upper[i] = off * inv_pivot[i];
        }
        let mut me = Self {
            off,
            gamma,
            inv_pivot,
            upper,
            z: vec![0.0; p],
            denom: 1.0,
        };
        let mut u = vec![0.0; p];
        u[0] = gamma;
        u[p - 1] = off;
        me.thomas(&mut u);
        let denom = 1.0 + u[0] + off * u[p - 1] / gamma;
        if denom.abs() <= 1e-14 {
            return Err(Error::Numerical {
                what: "shifted solve factorization (singular rank-one correction)".into(),
                residual: f64::INFINITY,
            });
        }
        me.z = u;
        me.denom = denom;
        Ok(me)
    }

    fn thomas(&self, x: &mut [f64]) {
        let p = x.len();
        x[0] *= self.inv_pivot[0];
        for i in 1..p {
            x[i] = (x[i] - self.off * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..p - 1).rev() {
            x[i] -= self.upper[i] * x[i + 1];
        }
    }

    fn solve(&self, x: &mut [f64]) {
        let p = x.len();
        self.thomas(x);
        let fact = (x[0] + self.off * x[p - 1] / self.gamma) / self.denom;
        for (xi, zi) in x.iter_mut().zip(&self.z) {
            *xi -= fact * zi;
        }
    }
}

impl ShiftedSolver {
    /// Factors `I + shift·A_p` along `axis`. A zero shift yields the identity.
    pub fn new(op: &FdLaplacian, shift: f64, axis: Axis) -> Result<Self> {
        let grid = *op.grid();
        let axis = if grid.dim() == 1 { Axis::Inner } else { axis };
        let factors = if shift == 0.0 {
            None
        } else {
            let off = -shift * op.inv_h2;
            let diag = 1.0 + 2.0 * shift * op.inv_h2;
            Some(CyclicFactors::new(grid.points(), diag, off)?)
        };
        Ok(Self {
            grid,
            axis,
            shift,
            factors,
        })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    /// Solves in place, overwriting the right-hand side with the solution.
    pub fn solve_in_place(&self, data: &mut [f64]) {
        if let Some(f) = &self.factors {
            for_each_line(&self.grid, self.axis, data, |line| f.solve(line));
        }
    }

    /// Solves and verifies the residual `‖(I + cA)x - rhs‖ ≤ 1e-12 ‖rhs‖`.
    pub fn solve_checked(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(rhs.len())?;
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        let op = FdLaplacian::new(self.grid)?;
        let mut ax = vec![0.0; x.len()];
        op.apply_axis(self.axis, &x, &mut ax);
        let mut res2 = 0.0;
        let mut rhs2 = 0.0;
        for i in 0..x.len() {
            let r = x[i] - self.shift * ax[i] - rhs[i];
            res2 += r * r;
            rhs2 += rhs[i] * rhs[i];
        }
        let residual = res2.sqrt();
        if !residual.is_finite() || residual > 1e-12 * rhs2.sqrt().max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical {
                what: format!("shifted solve with c = {}", self.shift),
                residual,
            });
        }
        Ok(x)
    }
}

/// Solves `(I + c·A_p) x = rhs` on a one-dimensional grid.
pub fn solve_shifted(op: &FdLaplacian, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    if op.grid().dim() != 1 {
        return Err(Error::InvalidGrid(
            "the full 2D shifted system is not factored; use per-axis ShiftedSolver".into(),
        ));
    }
    ShiftedSolver::new(op, shift, Axis::Inner)?.solve_checked(rhs)
}

/// Signed wavenumber of FFT slot `n` on a grid with `p` points: `0..=p/2`, then negatives.
pub fn wavenumber(n: usize, p: usize) -> i64 {
    if n <= p / 2 {
        n as i64
    } else {
        n as i64 - p as i64
    }
}

/// Diagonal Fourier symbol of the Laplacian, `-(πj)²` per axis, in FFT slot order.
#[derive(Debug, Clone)]
pub struct SpectralSymbol {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl SpectralSymbol {
    pub fn new(grid: PeriodicGrid) -> Result<Self> {
        let p = grid.points();
        if !p.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "spectral symbol needs an even number of points, got {p}"
            )));
        }
        let axis: Vec<f64> = (0..p)
            .map(|n| {
                let j = wavenumber(n, p) as f64;
                -(PI * j) * (PI * j)
            })
            .collect();
        let values = match grid.dim() {
            1 => axis,
            _ => {
                let mut v = Vec::with_capacity(p * p);
                for a in &axis {
                    for b in &axis {
                        v.push(a + b);
                    }
                }
                v
            }
        };
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn spectral_symbol(grid: PeriodicGrid) -> Result<SpectralSymbol> {
    SpectralSymbol::new(grid)
}

/// Mode truncation applied around nonlinear evaluations in the spectral schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DealiasRule {
    /// Zero modes with `|j| > p/3`.
    #[default]
    TwoThirds,
    /// Zero modes with `|j| > p/4`; the strict rule for cubic products.
    Half,
    Off,
}

impl std::str::FromStr for DealiasRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2/3" | "two-thirds" | "twothirds" => Ok(DealiasRule::TwoThirds),
            "1/2" | "half" => Ok(DealiasRule::Half),
            "off" | "none" => Ok(DealiasRule::Off),
            _ => Err(Error::InvalidArgument(format!("unknown dealias rule '{s}'"))),
        }
    }
}

impl DealiasRule {
    pub fn id(&self) -> &'static str {
        match self {
            DealiasRule::TwoThirds => "2/3",
            DealiasRule::Half => "1/2",
            DealiasRule::Off => "off",
        }
    }

    /// Keep-mask in FFT slot order.
    pub fn mask(&self, grid: &PeriodicGrid) -> Vec<bool> {
        let p = grid.points();
        let keep_axis: Vec<bool> = (0..p)
            .map(|n| {
                let j = wavenumber(n, p).unsigned_abs() as usize;
                match self {
                    DealiasRule::TwoThirds => 3 * j <= p,
                    DealiasRule::Half => 4 * j <= p,
                    DealiasRule::Off => true,
                }
            })
            .collect();
        match grid.dim() {
            1 => keep_axis,
            _ => {
                let mut m = Vec::with_capacity(p * p);
                for &a in &keep_axis {
                    for &b in &keep_axis {
                        m.push(a && b);
                    }
                }
                m
            }
        }
    }
}

/// Discrete Fourier transform with kernel `e^{-iπ j x_n}` on the periodic grid.
///
/// `forward` is unnormalized; `inverse` divides by `p^dim`. Coefficients are
/// stored in FFT slot order (see [`wavenumber`]).
#[derive(Clone)]
pub struct SpectralTransform {
    grid: PeriodicGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // e^{iπj} = (-1)^j, the phase from the grid starting at x_0 = -1.
    phase: Vec<f64>,
}

impl std::fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralTransform")
            .field("grid", &self.grid)
            .finish()
    }
}

impl SpectralTransform {
    pub fn new(grid: PeriodicGrid) -> Self {
        let p = grid.points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(p);
        let inverse = planner.plan_fft_inverse(p);
        let sign = |n: usize| if wavenumber(n, p) % 2 == 0 { 1.0 } else { -1.0 };
        let phase = match grid.dim() {
            1 => (0..p).map(sign).collect(),
            _ => {
                let mut v = Vec::with_capacity(p * p);
                for a in 0..p {
                    for b in 0..p {
                        v.push(sign(a) * sign(b));
                    }
                }
                v
            }
        };
        Self {
            grid,
            forward,
            inverse,
            phase,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn forward(&self, u: &[f64]) -> Result<Vec<Complex64>> {
        self.grid.check_len(u.len())?;
        let mut out = vec![Complex64::default(); u.len()];
        self.forward_into(u, &mut out);
        Ok(out)
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<f64>> {
        self.grid.check_len(coeffs.len())?;
        let mut out = vec![0.0; coeffs.len()];
        self.inverse_into(coeffs, &mut out);
        Ok(out)
    }

    pub fn forward_into(&self, u: &[f64], out: &mut [Complex64]) {
        for (o, &v) in out.iter_mut().zip(u) {
            *o = Complex64::new(v, 0.0);
        }
        self.run(&*self.forward, out);
        for (o, s) in out.iter_mut().zip(&self.phase) {
            *o *= *s;
        }
    }

    pub fn inverse_into(&self, coeffs: &[Complex64], out: &mut [f64]) {
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .zip(&self.phase)
            .map(|(c, s)| c * *s)
            .collect();
        self.run(&*self.inverse, &mut buf);
        let scale = 1.0 / self.grid.len() as f64;
        for (o, c) in out.iter_mut().zip(&buf) {
            *o = c.re * scale;
        }
    }

    fn run(&self, fft: &dyn Fft<f64>, buf: &mut [Complex64]) {
        let p = self.grid.points();
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // Processes every contiguous row.
        fft.process_with_scratch(buf, &mut scratch);
        if self.grid.dim() == 2 {
            transpose_square(buf, p);
            fft.process_with_scratch(buf, &mut scratch);
            transpose_square(buf, p);
        }
    }
}

fn transpose_square(buf: &mut [Complex64], p: usize) {
    for i in 0..p {
        for j in i + 1..p {
            buf.swap(i * p + j, j * p + i);
        }
    }
}
