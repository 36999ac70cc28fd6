//! Fourier-space ETDRK4 with contour-averaged coefficients.

use std::collections::HashMap;

use num_complex::Complex64;

use super::{check_state, distinct_diffusions, BlockSystem, Observer, SolverOptions, TimeGrid};
use crate::error::{invalid, Result};
use crate::grid::{SpectralSymbol, SpectralTransform};

/// Mean of `f` over `points` nodes on the unit circle around `center`. The
/// nodes sit at the odd multiples of `π/points`, so for a real center the set
/// is closed under conjugation and never touches the real axis.
pub fn contour_mean(center: f64, points: usize, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let sum: Complex64 = (0..points)
        .map(|m| {
            let angle = std::f64::consts::PI * (2 * m + 1) as f64 / points as f64;
            f(center + Complex64::from_polar(1.0, angle))
        })
        .sum();
    sum / points as f64
}

/// Per-mode ETDRK4 coefficients for step `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtdCoefficients {
    /// `e^{λh}`
    pub e: Vec<f64>,
    /// `e^{λh/2}`
    pub e_half: Vec<f64>,
    /// `λ⁻¹(e^{λh/2} - 1)`
    pub q: Vec<f64>,
    /// Weight of the stage-zero nonlinearity.
    pub f1: Vec<f64>,
    /// Weight of each of the two midpoint nonlinearities (applied twice).
    pub f2: Vec<f64>,
    /// Weight of the final-stage nonlinearity.
    pub f3: Vec<f64>,
}

/// Evaluates the coefficients for each eigenvalue `λ` in `eigenvalues`.
pub fn build_etd_coefficients(
    eigenvalues: &[f64],
    h: f64,
    contour_points: usize,
) -> Result<EtdCoefficients> {
    if contour_points < 16 {
        return Err(invalid(format!(
            "contour needs at least 16 points, got {contour_points}"
        )));
    }
    let mut out = EtdCoefficients {
        e: Vec::with_capacity(eigenvalues.len()),
        e_half: Vec::with_capacity(eigenvalues.len()),
        q: Vec::with_capacity(eigenvalues.len()),
        f1: Vec::with_capacity(eigenvalues.len()),
        f2: Vec::with_capacity(eigenvalues.len()),
        f3: Vec::with_capacity(eigenvalues.len()),
    };
    let mut memo: HashMap<u64, [f64; 6]> = HashMap::new();
    for &lambda in eigenvalues {
        let c = *memo
            .entry(lambda.to_bits())
            .or_insert_with(|| mode_coefficients(lambda, h, contour_points));
        out.e.push(c[0]);
        out.e_half.push(c[1]);
        out.q.push(c[2]);
        out.f1.push(c[3]);
        out.f2.push(c[4]);
        out.f3.push(c[5]);
    }
    Ok(out)
}

fn mode_coefficients(lambda: f64, h: f64, points: usize) -> [f64; 6] {
    let hl = h * lambda;
    let q = contour_mean(hl, points, |z| ((z / 2.0).exp() - 1.0) / z);
    let f1 = contour_mean(hl, points, |z| {
        (-4.0 - z + z.exp() * (4.0 - 3.0 * z + z * z)) / (z * z * z)
    });
    let f2 = contour_mean(hl, points, |z| (2.0 + z + z.exp() * (z - 2.0)) / (z * z * z));
    let f3 = contour_mean(hl, points, |z| {
        (-4.0 - 3.0 * z - z * z + z.exp() * (4.0 - z)) / (z * z * z)
    });
    [
        hl.exp(),
        (hl / 2.0).exp(),
        h * q.re,
        h * f1.re,
        h * f2.re,
        h * f3.re,
    ]
}

struct Workspace {
    transform: SpectralTransform,
    keep: Vec<bool>,
    masking: bool,
    n: usize,
}

impl Workspace {
    /// Back-transforms every block of `hat` into `phys`.
    fn to_physical(&self, hat: &[Complex64], phys: &mut [f64], masked: bool, options: &SolverOptions) {
        let n = self.n;
        options.execution.for_each_chunk(phys, n, |b, out| {
            let block = &hat[b * n..(b + 1) * n];
            if masked && self.masking {
                let copy: Vec<Complex64> = block
                    .iter()
                    .zip(&self.keep)
                    .map(|(c, &k)| if k { *c } else { Complex64::default() })
                    .collect();
                self.transform.inverse_into(&copy, out);
            } else {
                self.transform.inverse_into(block, out);
            }
        });
    }

    fn to_spectral(&self, phys: &[f64], hat: &mut [Complex64], masked: bool, options: &SolverOptions) {
        let n = self.n;
        options.execution.for_each_chunk(hat, n, |b, out| {
            self.transform.forward_into(&phys[b * n..(b + 1) * n], out);
            if masked && self.masking {
                for (c, &k) in out.iter_mut().zip(&self.keep) {
                    if !k {
                        *c = Complex64::default();
                    }
                }
            }
        });
    }
}

pub(super) fn etdrk4<S: BlockSystem + ?Sized>(
    system: &S,
    initial: &[f64],
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<Vec<f64>> {
    let grid = *system.grid();
    let n = grid.len();
    let h = time.step_size();
    let symbol = SpectralSymbol::new(grid)?;
    let (values, block_index) = distinct_diffusions(system.diffusions());
    let coeffs = values
        .iter()
        .map(|&d| {
            let eig: Vec<f64> = symbol.values().iter().map(|l| d * l).collect();
            build_etd_coefficients(&eig, h, options.contour_points)
        })
        .collect::<Result<Vec<_>>>()?;
    let keep = options.dealias.mask(&grid);
    let ws = Workspace {
        transform: SpectralTransform::new(grid),
        masking: keep.iter().any(|k| !k),
        keep,
        n,
    };

    let len = initial.len();
    let zero = Complex64::default();
    let mut v = vec![zero; len];
    ws.to_spectral(initial, &mut v, false, options);
    let (mut nv, mut na, mut nb, mut nc) = (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
    let (mut a, mut b, mut c) = (vec![zero; len], vec![zero; len], vec![zero; len]);
    let mut phys = vec![0.0; len];
    let mut react = vec![0.0; len];

    // N̂(x̂) = mask · F(reaction(F⁻¹(mask · x̂)))
    let nonlinear = |x: &[Complex64], out: &mut [Complex64], phys: &mut [f64], react: &mut [f64]| {
        ws.to_physical(x, phys, true, options);
        system.reaction(phys, react);
        ws.to_spectral(react, out, true, options);
    };

    if observer.wants(0) {
        observer.observe(0, 0.0, initial);
    }
    for step in 0..time.steps() {
        if step > 0 {
            ws.to_physical(&v, &mut phys, false, options);
            let t = time.time(step);
            check_state(&phys, options.blow_up, step, t)?;
            if observer.wants(step) {
                observer.observe(step, t, &phys);
            }
        }
        nonlinear(&v, &mut nv, &mut phys, &mut react);
        for i in 0..len {
            let cf = &coeffs[block_index[i / n]];
            let m = i % n;
            a[i] = cf.e_half[m] * v[i] + cf.q[m] * nv[i];
        }
        nonlinear(&a, &mut na, &mut phys, &mut react);
        for i in 0..len {
            let cf = &coeffs[block_index[i / n]];
            let m = i % n;
            b[i] = cf.e_half[m] * v[i] + cf.q[m] * na[i];
        }
        nonlinear(&b, &mut nb, &mut phys, &mut react);
        for i in 0..len {
            let cf = &coeffs[block_index[i / n]];
            let m = i % n;
            c[i] = cf.e_half[m] * a[i] + cf.q[m] * (2.0 * nb[i] - nv[i]);
        }
        nonlinear(&c, &mut nc, &mut phys, &mut react);
        for i in 0..len {
            let cf = &coeffs[block_index[i / n]];
            let m = i % n;
            v[i] = cf.e[m] * v[i]
                + cf.f1[m] * nv[i]
                + 2.0 * cf.f2[m] * (na[i] + nb[i])
                + cf.f3[m] * nc[i];
        }
    }
    ws.to_physical(&v, &mut phys, false, options);
    let t = time.final_time();
    check_state(&phys, options.blow_up, time.steps(), t)?;
    if observer.wants(time.steps()) {
        observer.observe(time.steps(), t, &phys);
    }
    Ok(phys)
}
