//! Intrusive (stochastic Galerkin) chaos systems.
//!
//! The coefficient fields are stored coefficient-major: `u_0` occupies the
//! first grid-length slice, then `u_1`, and so on; for Gray-Scott all `u_η`
//! come first, followed by all `v_η`.

use crate::chaos::{linearization_table, plain_tensor4, GalerkinTensors, LegendreBasis, ProductTensor};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::grid::PeriodicGrid;
use crate::models::{initial_condition, ModelKind, ModelSpec};
use crate::solvers::{integrate, BlockSystem, Observer, Scheme, SolverOptions, TimeGrid};

/// How the cubic Galerkin term is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CubicProduct {
    /// Exact contraction with `E[ξ P_i P_j P_k P_η]`.
    #[default]
    Tensor,
    /// Product linearization truncated at total degree `N`, then the
    /// parameter multiplication through `E[ξ P_ζ P_η]`.
    Truncated,
}

impl CubicProduct {
    pub fn id(&self) -> &'static str {
        match self {
            CubicProduct::Tensor => "tensor",
            CubicProduct::Truncated => "truncated",
        }
    }
}

impl std::fmt::Display for CubicProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for CubicProduct {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tensor" | "full" => Ok(CubicProduct::Tensor),
            "truncated" | "linearized" => Ok(CubicProduct::Truncated),
            _ => Err(invalid(format!("unknown cubic product '{s}'"))),
        }
    }
}

/// Stacked chaos coefficient fields `u_0..=u_N` (and `v_0..=v_N` for Gray-Scott).
#[derive(Debug, Clone, PartialEq)]
pub struct PceState {
    pub degree: usize,
    pub species: usize,
    pub data: Vec<f64>,
    pub time: f64,
}

impl PceState {
    /// `u_0 = u_init`, all higher coefficients zero.
    pub fn initial(spec: &ModelSpec, grid: &PeriodicGrid, degree: usize) -> Result<Self> {
        let init = initial_condition(spec, grid)?;
        let n = grid.len();
        let modes = degree + 1;
        let mut data = vec![0.0; init.species * modes * n];
        for s in 0..init.species {
            let start = s * modes * n;
            data[start..start + n].copy_from_slice(init.field(s));
        }
        Ok(Self {
            degree,
            species: init.species,
            data,
            time: 0.0,
        })
    }

    pub fn modes(&self) -> usize {
        self.degree + 1
    }

    pub fn grid_len(&self) -> usize {
        self.data.len() / (self.species * self.modes())
    }

    /// Coefficient field `η` of species `s`.
    pub fn coefficient(&self, species: usize, eta: usize) -> &[f64] {
        let n = self.grid_len();
        let start = (species * self.modes() + eta) * n;
        &self.data[start..start + n]
    }

    pub fn mean(&self, species: usize) -> Vec<f64> {
        self.coefficient(species, 0).to_vec()
    }

    /// `Σ_{η≥1} u_η²`.
    pub fn variance(&self, species: usize) -> Vec<f64> {
        variance_of(&self.data, species, self.modes(), self.grid_len())
    }
}

pub(crate) fn variance_of(data: &[f64], species: usize, modes: usize, n: usize) -> Vec<f64> {
    let mut var = vec![0.0; n];
    for eta in 1..modes {
        let start = (species * modes + eta) * n;
        for (v, u) in var.iter_mut().zip(&data[start..start + n]) {
            *v += u * u;
        }
    }
    var
}

/// `coef · Π state[idx]` summed into one output block.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    idx: [usize; 3],
    arity: u8,
    coef: f64,
}

/// Blocks coupled through Galerkin-projected reaction terms.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    spec: ModelSpec,
    grid: PeriodicGrid,
    basis: LegendreBasis,
    diffusions: Vec<f64>,
    // Terms per output block; block indices refer to the stacked state.
    terms: Vec<Vec<Term>>,
    // Constant added to each output block.
    offsets: Vec<f64>,
    execution: Execution,
}

const ZERO_TOL: f64 = 1e-13;

impl GalerkinSystem {
    pub fn new(spec: ModelSpec, grid: PeriodicGrid, degree: usize) -> Result<Self> {
        Self::with_product(spec, grid, degree, CubicProduct::Tensor)
    }

    pub fn with_product(
        spec: ModelSpec,
        grid: PeriodicGrid,
        degree: usize,
        product: CubicProduct,
    ) -> Result<Self> {
        spec.validate()?;
        let basis = LegendreBasis::new(spec.lower, spec.upper, degree)?;
        let tensors = GalerkinTensors::build(basis);
        let modes = degree + 1;
        let mut offsets = vec![0.0; spec.species() * modes];
        let terms = match spec.kind {
            ModelKind::Linear => (0..modes)
                .map(|eta| {
                    (0..modes)
                        .map(|i| term([i, 0, 0], 1, -tensors.k2.get(&[i, eta])))
                        .filter(nonzero)
                        .collect()
                })
                .collect(),
            ModelKind::Quadratic => (0..modes)
                .map(|eta| {
                    let mut out = Vec::new();
                    for i in 0..modes {
                        for j in i..modes {
                            let mult = if i == j { 1.0 } else { 2.0 };
                            out.push(term([i, j, 0], 2, -mult * tensors.k3.get(&[i, j, eta])));
                        }
                    }
                    out.retain(nonzero);
                    out
                })
                .collect(),
            ModelKind::Cubic => match product {
                CubicProduct::Tensor => symmetric_cubic(&tensors.k4, modes, [0, 0, 0], -1.0),
                CubicProduct::Truncated => {
                    let table = linearization_table(degree);
                    (0..modes)
                        .map(|eta| {
                            let mut out: Vec<Term> = table
                                .terms()
                                .iter()
                                .map(|t| {
                                    let w = basis.parameter_moment(t.eta, eta) * t.weight;
                                    term([t.i, t.j, t.k], 3, -w)
                                })
                                .collect();
                            out.retain(nonzero);
                            out
                        })
                        .collect()
                }
            },
            ModelKind::GrayScott => {
                let e4 = plain_tensor4(&basis);
                let feed = spec.feed;
                // u-block ids 0..modes, v-block ids modes..2·modes.
                let cubic = symmetric_cubic(&e4, modes, [0, modes, modes], 1.0);
                let mut terms = Vec::with_capacity(2 * modes);
                for (eta, c) in cubic.iter().enumerate() {
                    let mut t: Vec<Term> = c
                        .iter()
                        .map(|c| Term { coef: -c.coef, ..*c })
                        .collect();
                    t.push(term([eta, 0, 0], 1, -feed));
                    terms.push(t);
                }
                for (eta, c) in cubic.iter().enumerate() {
                    let mut t = c.clone();
                    t.push(term([modes + eta, 0, 0], 1, -feed));
                    for i in 0..modes {
                        t.push(term([modes + i, 0, 0], 1, -tensors.k2.get(&[i, eta])));
                    }
                    t.retain(nonzero);
                    terms.push(t);
                }
                offsets[0] = feed;
                terms
            }
        };
        let diffusions = spec
            .diffusions()
            .into_iter()
            .flat_map(|d| std::iter::repeat_n(d, modes))
            .collect();
        Ok(Self {
            spec,
            grid,
            basis,
            diffusions,
            terms,
            offsets,
            execution: Execution::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn basis(&self) -> &LegendreBasis {
        &self.basis
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    /// Nonzero contraction summands evaluated per grid point and reaction call.
    pub fn active_terms(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }
}

fn term(idx: [usize; 3], arity: u8, coef: f64) -> Term {
    Term { idx, arity, coef }
}

fn nonzero(t: &Term) -> bool {
    t.coef.abs() > ZERO_TOL
}

/// `Σ_{i≤j≤k} mult · scale · T[i][j][k][η] a_i b_j c_k` for a tensor symmetric in
/// its first three indices, where `base` shifts the block ids of the factors.
/// With distinct factor species only the last two indices are symmetric.
fn symmetric_cubic(t: &ProductTensor, modes: usize, base: [usize; 3], scale: f64) -> Vec<Vec<Term>> {
    let all_same = base[0] == base[1];
    (0..modes)
        .map(|eta| {
            let mut out = Vec::new();
            for i in 0..modes {
                let j0 = if all_same { i } else { 0 };
                for j in j0..modes {
                    for k in j..modes {
                        let mult = if all_same {
                            match (i == j, j == k) {
                                (true, true) => 1.0,
                                (false, false) => 6.0,
                                _ => 3.0,
                            }
                        } else if j == k {
                            1.0
                        } else {
                            2.0
                        };
                        let coef = scale * mult * t.get(&[i, j, k, eta]);
                        out.push(term([base[0] + i, base[1] + j, base[2] + k], 3, coef));
                    }
                }
            }
            out.retain(nonzero);
            out
        })
        .collect()
}

impl BlockSystem for GalerkinSystem {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn diffusions(&self) -> &[f64] {
        &self.diffusions
    }

    fn reaction(&self, state: &[f64], out: &mut [f64]) {
        let n = self.grid.len();
        let field = |b: usize| &state[b * n..(b + 1) * n];
        self.execution.for_each_chunk(out, n, |block, o| {
            o.iter_mut().for_each(|v| *v = self.offsets[block]);
            for t in &self.terms[block] {
                let c = t.coef;
                match t.arity {
                    1 => {
                        let a = field(t.idx[0]);
                        for x in 0..n {
                            o[x] += c * a[x];
                        }
                    }
                    2 => {
                        let (a, b) = (field(t.idx[0]), field(t.idx[1]));
                        for x in 0..n {
                            o[x] += c * a[x] * b[x];
                        }
                    }
                    _ => {
                        let (a, b, d) = (field(t.idx[0]), field(t.idx[1]), field(t.idx[2]));
                        for x in 0..n {
                            o[x] += c * a[x] * b[x] * d[x];
                        }
                    }
                }
            }
        });
    }
}

/// Galerkin reaction increment `F(U)` for a stacked coefficient state.
pub fn rhs_ipce(system: &GalerkinSystem, state: &PceState) -> Result<Vec<f64>> {
    if state.degree != system.degree() || state.data.len() != system.state_len() {
        return Err(invalid(format!(
            "state of degree {} with {} entries does not match a degree-{} system of {} entries",
            state.degree,
            state.data.len(),
            system.degree(),
            system.state_len()
        )));
    }
    let mut out = vec![0.0; state.data.len()];
    system.reaction(&state.data, &mut out);
    Ok(out)
}

/// Integrates the Galerkin system from its initial chaos state.
pub fn ipce_solve(
    scheme: Scheme,
    system: &GalerkinSystem,
    time: TimeGrid,
    options: &SolverOptions,
    observer: &mut dyn Observer,
) -> Result<PceState> {
    let init = PceState::initial(&system.spec, &system.grid, system.degree())?;
    let data = integrate(scheme, system, &init.data, time, options, observer)?;
    Ok(PceState {
        data,
        time: time.final_time(),
        ..init
    })
}

/// Contraction summands per grid point for one reaction evaluation in the
/// dense formulation: `(N+1)²` for the linear term, `(N+1)³` for the quadratic
/// term and `Ñ` from the product linearization for the cubic term.
pub fn contraction_count(kind: ModelKind, degree: usize) -> Result<usize> {
    let modes = degree + 1;
    match kind {
        ModelKind::Linear => Ok(modes * modes),
        ModelKind::Quadratic => Ok(modes.pow(3)),
        ModelKind::Cubic => Ok(linearization_table(degree).summand_count()),
        ModelKind::GrayScott => Err(Error::InvalidArgument(
            "contraction counts are defined for the scalar models".into(),
        )),
    }
}
