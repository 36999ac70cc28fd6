//! Finite-difference schemes: explicit Euler, ETD-RDP and ETD-RDP-IF.

use super::{check_state, distinct_diffusions, BlockSystem, Observer, SolverOptions, TimeGrid};
use crate::error::Result;
use crate::grid::{Axis, FdLaplacian, ShiftedSolver};

pub(super) fn explicit_euler<S: BlockSystem + ?Sized>(
    system: &S,
    initial: &[f64],
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<Vec<f64>> {
    let grid = *system.grid();
    let op = FdLaplacian::new(grid)?;
    let n = grid.len();
    let k = time.step_size();
    let diffusions = system.diffusions();
    let mut u = initial.to_vec();
    let mut react = vec![0.0; u.len()];
    let mut lap = vec![0.0; n];
    notify(observer, 0, 0.0, &u);
    for step in 0..time.steps() {
        system.reaction(&u, &mut react);
        for (b, (ub, rb)) in u.chunks_mut(n).zip(react.chunks(n)).enumerate() {
            let d = diffusions[b];
            if d == 0.0 {
                for (x, r) in ub.iter_mut().zip(rb) {
                    *x += k * r;
                }
            } else {
                op.apply(ub, &mut lap);
                for ((x, l), r) in ub.iter_mut().zip(&lap).zip(rb) {
                    *x += k * (d * l + r);
                }
            }
        }
        let t = time.time(step + 1);
        check_state(&u, options.blow_up, step + 1, t)?;
        notify(observer, step + 1, t, &u);
    }
    Ok(u)
}

/// Cached `(I + c·D·A)⁻¹` along one axis for every distinct diffusion constant.
struct ShiftFamily {
    solvers: Vec<ShiftedSolver>,
    block_index: Vec<usize>,
}

impl ShiftFamily {
    fn new(op: &FdLaplacian, diffusions: &[f64], shift: f64, axis: Axis) -> Result<Self> {
        let (values, block_index) = distinct_diffusions(diffusions);
        let solvers = values
            .iter()
            .map(|d| ShiftedSolver::new(op, shift * d, axis))
            .collect::<Result<_>>()?;
        Ok(Self {
            solvers,
            block_index,
        })
    }

    fn apply(&self, data: &mut [f64], n: usize, options: &SolverOptions) {
        options.execution.for_each_chunk(data, n, |b, block| {
            self.solvers[self.block_index[b]].solve_in_place(block)
        });
    }
}

/// The three rational propagators of a second-order RDP step.
struct RdpFactors {
    full: ShiftFamily,
    third: ShiftFamily,
    quarter: ShiftFamily,
}

impl RdpFactors {
    fn new(op: &FdLaplacian, diffusions: &[f64], k: f64, axis: Axis) -> Result<Self> {
        Ok(Self {
            full: ShiftFamily::new(op, diffusions, k, axis)?,
            third: ShiftFamily::new(op, diffusions, k / 3.0, axis)?,
            quarter: ShiftFamily::new(op, diffusions, k / 4.0, axis)?,
        })
    }
}

pub(super) fn etd_rdp<S: BlockSystem + ?Sized>(
    system: &S,
    initial: &[f64],
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<Vec<f64>> {
    let op = FdLaplacian::new(*system.grid())?;
    let n = system.grid().len();
    let k = time.step_size();
    let f = RdpFactors::new(&op, system.diffusions(), k, Axis::Inner)?;
    let len = initial.len();
    let mut u = initial.to_vec();
    let (mut fu, mut star, mut fstar) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let (mut left, mut right) = (vec![0.0; len], vec![0.0; len]);
    notify(observer, 0, 0.0, &u);
    for step in 0..time.steps() {
        system.reaction(&u, &mut fu);
        for i in 0..len {
            star[i] = u[i] + k * fu[i];
        }
        f.full.apply(&mut star, n, options);
        system.reaction(&star, &mut fstar);
        for i in 0..len {
            left[i] = 9.0 * u[i] + 2.0 * k * fu[i] + k * fstar[i];
            right[i] = 8.0 * u[i] + 1.5 * k * fu[i] + 0.5 * k * fstar[i];
        }
        f.third.apply(&mut left, n, options);
        f.quarter.apply(&mut right, n, options);
        for i in 0..len {
            u[i] = left[i] - right[i];
        }
        let t = time.time(step + 1);
        check_state(&u, options.blow_up, step + 1, t)?;
        notify(observer, step + 1, t, &u);
    }
    Ok(u)
}

pub(super) fn etd_rdp_if<S: BlockSystem + ?Sized>(
    system: &S,
    initial: &[f64],
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<Vec<f64>> {
    let op = FdLaplacian::new(*system.grid())?;
    let n = system.grid().len();
    let k = time.step_size();
    let inner = RdpFactors::new(&op, system.diffusions(), k, Axis::Inner)?;
    let outer = RdpFactors::new(&op, system.diffusions(), k, Axis::Outer)?;
    let len = initial.len();
    let mut u = initial.to_vec();
    let (mut fu, mut star, mut fstar) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let (mut left, mut right, mut tmp) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);

    // y ← {9(I + k/3·D A₁)⁻¹ - 8(I + k/4·D A₁)⁻¹} y
    let inner_rational = |y: &mut Vec<f64>, tmp: &mut Vec<f64>| {
        tmp.copy_from_slice(y);
        inner.third.apply(y, n, options);
        inner.quarter.apply(tmp, n, options);
        for (a, b) in y.iter_mut().zip(tmp.iter()) {
            *a = 9.0 * *a - 8.0 * b;
        }
    };

    notify(observer, 0, 0.0, &u);
    for step in 0..time.steps() {
        system.reaction(&u, &mut fu);
        for i in 0..len {
            star[i] = u[i] + k * fu[i];
        }
        inner.full.apply(&mut star, n, options);
        outer.full.apply(&mut star, n, options);
        system.reaction(&star, &mut fstar);
        for i in 0..len {
            left[i] = 9.0 * u[i] + 2.0 * k * fu[i];
            right[i] = 8.0 * u[i] + 1.5 * k * fu[i];
        }
        inner_rational(&mut left, &mut tmp);
        inner_rational(&mut right, &mut tmp);
        for i in 0..len {
            left[i] += k * fstar[i];
            right[i] += 0.5 * k * fstar[i];
        }
        outer.third.apply(&mut left, n, options);
        outer.quarter.apply(&mut right, n, options);
        for i in 0..len {
            u[i] = left[i] - right[i];
        }
        let t = time.time(step + 1);
        check_state(&u, options.blow_up, step + 1, t)?;
        notify(observer, step + 1, t, &u);
    }
    Ok(u)
}

fn notify(observer: &mut dyn Observer, step: usize, t: f64, u: &[f64]) {
    if observer.wants(step) {
        observer.observe(step, t, u);
    }
}
