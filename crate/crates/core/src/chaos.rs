//! Orthonormal Legendre chaos for a parameter uniform on `[a, b]`: basis
//! evaluation, Gauss–Legendre rules, Galerkin product tensors and the
//! linearization of products of Legendre polynomials.

use std::io::{self, Write};

use crate::error::{invalid, Error, Result};

/// Off-diagonal entry `n/√(4n²-1)` of the Legendre Jacobi matrix.
pub fn jacobi_offdiag(n: usize) -> f64 {
    let n = n as f64;
    n / (4.0 * n * n - 1.0).sqrt()
}

/// Legendre polynomials `P_0..=P_N` on `[a, b]`, orthonormal with respect to the
/// uniform density `1/(b-a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreBasis {
    a: f64,
    b: f64,
    degree: usize,
}

impl LegendreBasis {
    pub fn new(a: f64, b: f64, degree: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(invalid(format!("interval [{a}, {b}] must satisfy b > a")));
        }
        Ok(Self { a, b, degree })
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    /// Maximum degree `N`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis functions, `N + 1`.
    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    /// Maps `x ∈ [a, b]` to the reference variable `t ∈ [-1, 1]`.
    pub fn to_reference(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    /// `P_0(x), …, P_N(x)`. Fails outside `[a, b]`.
    pub fn eval(&self, x: f64) -> Result<Vec<f64>> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::Domain {
                x,
                a: self.a,
                b: self.b,
            });
        }
        let mut out = vec![0.0; self.len()];
        eval_reference(self.to_reference(x), &mut out);
        Ok(out)
    }

    /// `P_0, …, P_N` at the reference coordinate `t ∈ [-1, 1]`.
    pub fn eval_reference(&self, t: f64) -> Result<Vec<f64>> {
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::Domain { x: t, a: -1.0, b: 1.0 });
        }
        let mut out = vec![0.0; self.len()];
        eval_reference(t, &mut out);
        Ok(out)
    }

    /// `E[ξ P_row P_col]` for arbitrary degrees, from the three-term recurrence.
    pub fn parameter_moment(&self, row: usize, col: usize) -> f64 {
        if row == col {
            self.midpoint()
        } else if row + 1 == col {
            self.half_width() * jacobi_offdiag(col)
        } else if col + 1 == row {
            self.half_width() * jacobi_offdiag(row)
        } else {
            0.0
        }
    }

    /// Galerkin projection of `ξ·Σ c_ζ P_ζ` onto `P_0..=P_N`. `coeffs` may be
    /// longer than the basis; modes above `N + 1` do not contribute.
    pub fn multiply_by_parameter(&self, coeffs: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|eta| {
                let lo = eta.saturating_sub(1);
                (lo..=eta + 1)
                    .filter(|&z| z < coeffs.len())
                    .map(|z| coeffs[z] * self.parameter_moment(z, eta))
                    .sum()
            })
            .collect()
    }
}

/// Orthonormal Legendre values on `[-1, 1]` via the three-term recurrence.
pub(crate) fn eval_reference(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 3f64.sqrt() * t;
    }
    for n in 1..out.len().saturating_sub(1) {
        out[n + 1] = (t * out[n] - jacobi_offdiag(n) * out[n - 1]) / jacobi_offdiag(n + 1);
    }
}

/// Quadrature nodes on `[a, b]` with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_j f(ξ_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `q`-point Gauss–Legendre rule on `[a, b]` via the Golub–Welsch eigenproblem.
///
/// Exact for polynomials of degree `≤ 2q-1` against the uniform density; the
/// rule is symmetrized about the midpoint.
pub fn gauss_legendre(q: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if q == 0 {
        return Err(invalid("Gauss–Legendre rule needs q >= 1"));
    }
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(invalid(format!("interval [{a}, {b}] must satisfy b > a")));
    }
    let mut diag = vec![0.0; q];
    let mut off: Vec<f64> = (0..q).map(|i| if i == 0 { 0.0 } else { jacobi_offdiag(i) }).collect();
    let mut first_row = vec![0.0; q];
    first_row[0] = 1.0;
    tridiagonal_eigen(&mut diag, &mut off, &mut first_row)?;

    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first_row.into_iter().map(|z| z * z))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    for i in 0..q / 2 {
        let j = q - 1 - i;
        let t = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-t, w);
        pairs[j] = (t, w);
    }
    if q % 2 == 1 {
        pairs[q / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    Ok(QuadratureRule {
        nodes: pairs.iter().map(|p| mid + half * p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    })
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
///
/// `diag` holds the diagonal and returns the eigenvalues; `off[i]` holds the
/// entry coupling rows `i-1` and `i` (`off[0]` is ignored). Only the first
/// component of every eigenvector is tracked, which is all Golub–Welsch needs.
fn tridiagonal_eigen(diag: &mut [f64], off: &mut [f64], first_row: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for i in 1..n {
        off[i - 1] = off[i];
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::Numerical {
                    what: "Golub–Welsch eigenvalue iteration did not converge".into(),
                    residual: off[l].abs(),
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let f = first_row[i + 1];
                first_row[i + 1] = s * first_row[i] + c * f;
                first_row[i] = c * first_row[i] - s * f;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Dense symmetric tensor of a given rank over indices `0..n`, row-major with
/// the last index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTensor {
    n: usize,
    rank: usize,
    data: Vec<f64>,
}

impl ProductTensor {
    /// `E[weight(ξ) P_{i_1} ⋯ P_{i_rank}]` by the quadrature rule `rule`.
    pub fn build(
        basis: &LegendreBasis,
        rank: usize,
        rule: &QuadratureRule,
        weight: impl Fn(f64) -> f64,
    ) -> Self {
        let n = basis.len();
        let values: Vec<Vec<f64>> = rule
            .nodes
            .iter()
            .map(|&x| {
                let mut v = vec![0.0; n];
                eval_reference(basis.to_reference(x), &mut v);
                v
            })
            .collect();
        let scaled: Vec<f64> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * weight(x))
            .collect();
        let size = n.pow(rank as u32);
        let mut data = vec![0.0; size];
        let mut idx = vec![0usize; rank];
        for (flat, entry) in data.iter_mut().enumerate() {
            let mut rem = flat;
            for slot in idx.iter_mut().rev() {
                *slot = rem % n;
                rem /= n;
            }
            *entry = values
                .iter()
                .zip(&scaled)
                .map(|(v, &w)| w * idx.iter().map(|&i| v[i]).product::<f64>())
                .sum();
        }
        Self { n, rank, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.rank);
        self.data[idx.iter().fold(0, |acc, &i| acc * self.n + i)]
    }

    /// Writes `i,j,k,eta,value` rows; lower-rank tensors leave leading columns empty.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "i,j,k,eta,value")?;
        let mut idx = vec![0usize; self.rank];
        for (flat, v) in self.data.iter().enumerate() {
            let mut rem = flat;
            for slot in idx.iter_mut().rev() {
                *slot = rem % self.n;
                rem /= self.n;
            }
            let mut cols = vec![String::new(); 4 - self.rank.min(4)];
            cols.extend(idx.iter().map(|i| i.to_string()));
            writeln!(out, "{},{:.17e}", cols.join(","), v)?;
        }
        Ok(())
    }
}

/// Galerkin tensors with the parameter itself as coefficient:
/// `K2 = E[ξ P_i P_η]`, `K3 = E[ξ P_i P_j P_η]`, `K4 = E[ξ P_i P_j P_k P_η]`.
#[derive(Debug, Clone)]
pub struct GalerkinTensors {
    pub basis: LegendreBasis,
    pub k2: ProductTensor,
    pub k3: ProductTensor,
    pub k4: ProductTensor,
}

impl GalerkinTensors {
    /// Number of quadrature nodes used; exact for the degree-`4N+1` integrands.
    pub fn quadrature_order(basis: &LegendreBasis) -> usize {
        2 * basis.degree() + 2
    }

    pub fn build(basis: LegendreBasis) -> Self {
        let rule = tensor_rule(&basis);
        Self {
            k2: ProductTensor::build(&basis, 2, &rule, |x| x),
            k3: ProductTensor::build(&basis, 3, &rule, |x| x),
            k4: ProductTensor::build(&basis, 4, &rule, |x| x),
            basis,
        }
    }
}

fn tensor_rule(basis: &LegendreBasis) -> QuadratureRule {
    gauss_legendre(
        GalerkinTensors::quadrature_order(basis),
        basis.lower(),
        basis.upper(),
    )
    .expect("tensor quadrature order is positive")
}

pub fn build_tensors(basis: LegendreBasis) -> GalerkinTensors {
    GalerkinTensors::build(basis)
}

/// `E[P_i P_j P_k P_η]` without a parameter factor.
pub fn plain_tensor4(basis: &LegendreBasis) -> ProductTensor {
    ProductTensor::build(basis, 4, &tensor_rule(basis), |_| 1.0)
}

/// `(1/2)_r / r!`.
fn half_pochhammer_ratio(r: usize) -> f64 {
    (1..=r).fold(1.0, |acc, k| acc * (k as f64 - 0.5) / k as f64)
}

/// Coefficient of `P_{α+β-2p}` in the expansion of `P_α P_β` (orthonormal polynomials).
pub fn linearization_coefficient(alpha: usize, beta: usize, p: usize) -> f64 {
    assert!(p <= alpha.min(beta), "p must not exceed min(alpha, beta)");
    let a = half_pochhammer_ratio;
    let (af, bf, pf) = (alpha as f64, beta as f64, p as f64);
    let top = (alpha + beta - 2 * p) as f64;
    a(p) * a(alpha - p) * a(beta - p) / a(alpha + beta - p)
        * (2.0 * af + 2.0 * bf - 4.0 * pf + 1.0)
        / (2.0 * af + 2.0 * bf - 2.0 * pf + 1.0)
        * ((2.0 * af + 1.0) * (2.0 * bf + 1.0) / (2.0 * top + 1.0)).sqrt()
}

/// One summand `weight · u_i u_j u_k` contributing to mode `eta` of `u³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub eta: usize,
    pub weight: f64,
}

/// Flattened summand list for `u³` built from two successive pairwise
/// linearizations, truncated to total index `i + j + k ≤ N`.
#[derive(Debug, Clone)]
pub struct LinearizationTable {
    degree: usize,
    terms: Vec<CubicTerm>,
}

impl LinearizationTable {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            terms: enumerate_cubic(degree, degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[CubicTerm] {
        &self.terms
    }

    /// Summands per output mode.
    pub fn terms_per_mode(&self) -> usize {
        self.terms.len()
    }

    /// Total summand count `Ñ` once every one of the `N + 1` Galerkin modes is formed.
    pub fn summand_count(&self) -> usize {
        (self.degree + 1) * self.terms.len()
    }

    /// Truncated chaos coefficients of `u³` (modes `0..=N`).
    pub fn cube(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.degree + 1];
        for t in &self.terms {
            if t.eta <= self.degree {
                out[t.eta] += t.weight * u[t.i] * u[t.j] * u[t.k];
            }
        }
        out
    }
}

pub fn linearization_table(degree: usize) -> LinearizationTable {
    LinearizationTable::new(degree)
}

/// Enumerates `u_{ℓ-m} u_j u_{m-j} C(j, m-j, p) C(ℓ-m, m-2p, n) P_{ℓ-2p-2n}` for
/// `ℓ ≤ max_total`, each factor index `≤ max_index`.
fn enumerate_cubic(max_total: usize, max_index: usize) -> Vec<CubicTerm> {
    let mut terms = Vec::new();
    for l in 0..=max_total {
        for m in 0..=l {
            let i = l - m;
            if i > max_index {
                continue;
            }
            for j in 0..=m {
                let k = m - j;
                if j > max_index || k > max_index {
                    continue;
                }
                for p in 0..=j.min(k) {
                    let inner = linearization_coefficient(j, k, p);
                    let mid = m - 2 * p;
                    for n in 0..=i.min(mid) {
                        terms.push(CubicTerm {
                            i,
                            j,
                            k,
                            eta: l - 2 * p - 2 * n,
                            weight: inner * linearization_coefficient(i, mid, n),
                        });
                    }
                }
            }
        }
    }
    terms
}

/// Exact chaos coefficients of `u³` for `u = Σ_{i≤N} u_i P_i` (modes `0..=3N`).
pub fn cube_coefficients(u: &[f64]) -> Vec<f64> {
    let degree = u.len().saturating_sub(1);
    let mut out = vec![0.0; 3 * degree + 1];
    for t in enumerate_cubic(3 * degree, degree) {
        out[t.eta] += t.weight * u[t.i] * u[t.j] * u[t.k];
    }
    out
}

/// `E[ξ u³ P_η]` for `η ≤ N` through the linearization route. Agrees with the
/// direct contraction against `K4`.
pub fn galerkin_cubic_by_linearization(basis: &LegendreBasis, u: &[f64]) -> Vec<f64> {
    basis.multiply_by_parameter(&cube_coefficients(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn unit() -> LegendreBasis {
        LegendreBasis::new(1.0, 2.0, 5).unwrap()
    }

    #[test]
    fn basis_examples() {
        let b = unit();
        assert_eq!(b.eval(1.3).unwrap()[0], 1.0);
        assert_abs_diff_eq!(b.eval(1.5).unwrap()[1], 0.0);
        assert_abs_diff_eq!(b.eval(2.0).unwrap()[1], 3f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(b.eval(2.1), Err(Error::Domain { .. })));
        assert!(LegendreBasis::new(2.0, 1.0, 3).is_err());
    }

    #[test]
    fn basis_matches_closed_forms() {
        // Classical Legendre P2, P3 scaled by √(2n+1).
        let b = LegendreBasis::new(-1.0, 1.0, 3).unwrap();
        for &t in &[-1.0, -0.4, 0.0, 0.3, 0.9] {
            let v = b.eval(t).unwrap();
            assert_abs_diff_eq!(v[2], 5f64.sqrt() * 0.5 * (3.0 * t * t - 1.0), epsilon = 1e-14);
            assert_abs_diff_eq!(v[3], 7f64.sqrt() * 0.5 * (5.0 * t * t * t - 3.0 * t), epsilon = 1e-14);
        }
    }

    #[test]
    fn gram_matrix_is_identity() {
        for degree in 0..=12 {
            let b = LegendreBasis::new(1.0, 2.0, degree).unwrap();
            let rule = gauss_legendre(2 * degree + 2, 1.0, 2.0).unwrap();
            let g = ProductTensor::build(&b, 2, &rule, |_| 1.0);
            for i in 0..=degree {
                for j in 0..=degree {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(g.get(&[i, j]), expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn small_rules() {
        let r = gauss_legendre(1, 1.0, 2.0).unwrap();
        assert_eq!(r.nodes, vec![1.5]);
        assert_eq!(r.weights, vec![1.0]);
        let r = gauss_legendre(2, 1.0, 2.0).unwrap();
        let d = 0.5 / 3f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], 1.5 - d, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes[1], 1.5 + d, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes[0], 1.2113249, epsilon = 1e-7);
        assert_abs_diff_eq!(r.weights[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[1], 0.5, epsilon = 1e-15);
        assert!(matches!(gauss_legendre(0, 1.0, 2.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn hundred_point_rule_cancels_first_mode() {
        let r = gauss_legendre(100, 1.0, 2.0).unwrap();
        let s = r.integrate(|x| 3f64.sqrt() * (2.0 * x - 3.0));
        assert!(s.abs() <= 1e-14, "{s}");
        assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn exact_for_monomials() {
        for &(a, b) in &[(1.0, 2.0), (-1.0, 1.0), (0.058, 0.062)] {
            for q in 1..=20 {
                let r = gauss_legendre(q, a, b).unwrap();
                for m in 0..2 * q {
                    let mi = m as i32 + 1;
                    let exact = (b.powi(mi) - a.powi(mi)) / ((m + 1) as f64 * (b - a));
                    let got = r.integrate(|x| x.powi(m as i32));
                    assert_relative_eq!(got, exact, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn large_rule_against_independent_newton_oracle() {
        // Newton iteration on the classical recurrence from Chebyshev initial guesses.
        let q = 200;
        let r = gauss_legendre(q, -1.0, 1.0).unwrap();
        for k in 0..q {
            let mut x = -(std::f64::consts::PI * (k as f64 + 0.75) / (q as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for n in 2..=q {
                    let p2 = ((2 * n - 1) as f64 * x * p1 - (n - 1) as f64 * p0) / n as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 1.0 / ((1.0 - x * x) * dp * dp);
            assert_abs_diff_eq!(r.nodes[k], x, epsilon = 1e-13);
            assert_relative_eq!(r.weights[k], w, max_relative = 1e-11);
        }
    }

    #[test]
    fn rules_are_symmetric() {
        for q in 1..40 {
            let r = gauss_legendre(q, 1.0, 2.0).unwrap();
            for i in 0..q {
                assert_abs_diff_eq!(r.nodes[i] - 1.5, 1.5 - r.nodes[q - 1 - i], epsilon = 1e-15);
                assert_eq!(r.weights[i], r.weights[q - 1 - i]);
            }
        }
    }

    #[test]
    fn tensor_examples() {
        let t = build_tensors(unit());
        assert_abs_diff_eq!(t.k2.get(&[0, 0]), 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(t.k2.get(&[0, 1]), 0.5 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(t.k2.get(&[1, 1]), 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(t.k4.get(&[0, 0, 0, 0]), 1.5, epsilon = 1e-14);
        for i in 0..6 {
            for j in 0..6 {
                assert_abs_diff_eq!(t.k2.get(&[i, j]), t.basis.parameter_moment(i, j), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn k4_invariant_under_permutations() {
        let perms = permutations4();
        for degree in 0..=5 {
            let t = build_tensors(LegendreBasis::new(1.0, 2.0, degree).unwrap());
            let n = degree + 1;
            for flat in 0..n.pow(4) {
                let idx = [flat / (n * n * n), flat / (n * n) % n, flat / n % n, flat % n];
                let v = t.k4.get(&idx);
                for p in &perms {
                    let q = [idx[p[0]], idx[p[1]], idx[p[2]], idx[p[3]]];
                    assert_abs_diff_eq!(t.k4.get(&q), v, epsilon = 1e-13);
                }
            }
        }
    }

    fn permutations4() -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        let mut s = p;
                        s.sort();
                        if s == [0, 1, 2, 3] {
                            out.push(p);
                        }
                    }
                }
            }
        }
        assert_eq!(out.len(), 24);
        out
    }

    #[test]
    fn plain_tensor_collapses_to_gram() {
        let b = LegendreBasis::new(0.058, 0.062, 3).unwrap();
        let e4 = plain_tensor4(&b);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(e4.get(&[0, 0, i, j]), expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn linearization_coefficient_examples() {
        assert_abs_diff_eq!(linearization_coefficient(1, 1, 1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(linearization_coefficient(1, 1, 0), 2.0 / 5f64.sqrt(), epsilon = 1e-15);
        // Projection oracle: E[P1² P0] and E[P1² P2] by quadrature on [-1, 1].
        let b = LegendreBasis::new(-1.0, 1.0, 2).unwrap();
        let rule = gauss_legendre(4, -1.0, 1.0).unwrap();
        let t3 = ProductTensor::build(&b, 3, &rule, |_| 1.0);
        assert_abs_diff_eq!(t3.get(&[1, 1, 0]), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t3.get(&[1, 1, 2]), 2.0 / 5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn product_formula_reproduces_products_pointwise() {
        let degree = 8;
        let b = LegendreBasis::new(-1.0, 1.0, 2 * degree).unwrap();
        for s in 0..100 {
            let t = -1.0 + 2.0 * s as f64 / 99.0;
            let v = b.eval(t).unwrap();
            for alpha in 0..=degree {
                for beta in 0..=degree {
                    let sum: f64 = (0..=alpha.min(beta))
                        .map(|p| linearization_coefficient(alpha, beta, p) * v[alpha + beta - 2 * p])
                        .sum();
                    assert_abs_diff_eq!(sum, v[alpha] * v[beta], epsilon = 1e-12 * (1.0 + (v[alpha] * v[beta]).abs()));
                }
            }
        }
    }

    #[test]
    fn summand_counts() {
        let expected = [1, 8, 39, 124, 335, 762, 1589, 3016, 5418];
        for (n, &e) in expected.iter().enumerate() {
            let table = linearization_table(n);
            assert_eq!(table.summand_count(), e, "N = {n}");
            assert_eq!(table.summand_count() % (n + 1), 0);
            assert!(table.terms().iter().all(|t| t.weight != 0.0));
        }
    }

    #[test]
    fn full_cube_matches_pointwise_cube() {
        let u = [0.3, -1.2, 0.5, 0.25];
        let c = cube_coefficients(&u);
        let b = LegendreBasis::new(-1.0, 1.0, 9).unwrap();
        for &t in &[-0.9, -0.2, 0.0, 0.45, 1.0] {
            let v = b.eval(t).unwrap();
            let direct: f64 = u.iter().zip(&v).map(|(a, p)| a * p).sum::<f64>().powi(3);
            let series: f64 = c.iter().zip(&v).map(|(a, p)| a * p).sum();
            assert_abs_diff_eq!(series, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn truncated_cube_is_exact_for_constants() {
        let table = linearization_table(3);
        let c = table.cube(&[2.0, 0.0, 0.0, 0.0]);
        assert_eq!(c, vec![8.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn tensor_dump_has_header_and_rows() {
        let t = build_tensors(LegendreBasis::new(1.0, 2.0, 1).unwrap());
        let mut buf = Vec::new();
        t.k4.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("i,j,k,eta,value\n0,0,0,0,1.5"));
        assert_eq!(s.lines().count(), 17);
        let mut buf = Vec::new();
        t.k2.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().lines().nth(1).unwrap().starts_with(",,0,0,"));
    }

    proptest! {
        #[test]
        fn linearization_route_matches_k4(
            degree in 0usize..=5,
            raw in proptest::collection::vec(-2.0f64..2.0, 6),
            lo in -1.0f64..1.5,
            width in 0.1f64..2.0,
        ) {
            let basis = LegendreBasis::new(lo, lo + width, degree).unwrap();
            let t = build_tensors(basis);
            let u = &raw[..=degree];
            let n = degree + 1;
            let via = galerkin_cubic_by_linearization(&basis, u);
            for eta in 0..n {
                let mut direct = 0.0;
                for i in 0..n { for j in 0..n { for k in 0..n {
                    direct += t.k4.get(&[i, j, k, eta]) * u[i] * u[j] * u[k];
                }}}
                prop_assert!((direct - via[eta]).abs() <= 1e-12 * (1.0 + direct.abs()),
                    "eta {} direct {} via {}", eta, direct, via[eta]);
            }
        }

        #[test]
        fn quadrature_weights_sum_to_one(q in 1usize..120, lo in -5.0f64..5.0, width in 1e-3f64..10.0) {
            let r = gauss_legendre(q, lo, lo + width).unwrap();
            prop_assert!((r.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
            prop_assert!(r.nodes.iter().all(|&x| x > lo && x < lo + width));
            prop_assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
