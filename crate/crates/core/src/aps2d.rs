//! Constrained anti-plane shear equilibrium in two dimensions.
//!
//! Restricted to APS deformations the energy reduces to
//! `∫ ½ g(|∇u|²) dx` with `g(x) = W(3+x, 3+x, 1)`, whose Euler–Lagrange
//! equation is `div(g'(|∇u|²) ∇u) = 0`. The functional is discretized with
//! bilinear quadrilaterals on the unit square and minimized by Newton's
//! method with a backtracking line search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{check_aps2, Grid, DEFAULT_TOL};
use crate::energies::EnergyModel;
use crate::error::{Error, Result};
use crate::expr::{parse, Expr, ParamTable};
use crate::linalg::{dot, norm2, BandedSym};

/// Dirichlet data as a function of `(x1, x2)`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryData {
    /// `A cos(π x1) cos(π x2)`.
    Default { amplitude: f64 },
    /// `c0 x1 + c1 x2 + c2`.
    Affine([f64; 3]),
    /// An expression in the parameters `x1`, `x2` (and `pi`).
    Expression {
        source: String,
        expr: Expr,
        params: ParamTable,
    },
}

impl Default for BoundaryData {
    fn default() -> Self {
        BoundaryData::Default {
            amplitude: DEFAULT_AMPLITUDE,
        }
    }
}

pub const DEFAULT_AMPLITUDE: f64 = 0.25;

impl BoundaryData {
    /// Parses an expression in `x1`, `x2`; other names must be bound in
    /// `params`.
    pub fn expression(source: &str, params: &ParamTable) -> Result<BoundaryData> {
        let expr = parse(source)?;
        let mut table = params.clone();
        table.set("pi", std::f64::consts::PI)?;
        table.set("x1", 0.0)?;
        table.set("x2", 0.0)?;
        if let Some(name) = expr.parameters().into_iter().find(|n| table.get(n).is_none()) {
            return Err(Error::UnboundParameter(name));
        }
        if expr.uses(crate::expr::Invariant::I1)
            || expr.uses(crate::expr::Invariant::I2)
            || expr.uses(crate::expr::Invariant::I3)
        {
            return Err(Error::InvalidArgument(
                "boundary expressions depend on x1 and x2 only".into(),
            ));
        }
        Ok(BoundaryData::Expression {
            source: source.to_string(),
            expr,
            params: table,
        })
    }

    pub fn eval(&self, x1: f64, x2: f64) -> Result<f64> {
        use std::f64::consts::PI;
        match self {
            BoundaryData::Default { amplitude } => Ok(amplitude * (PI * x1).cos() * (PI * x2).cos()),
            BoundaryData::Affine(c) => Ok(c[0] * x1 + c[1] * x2 + c[2]),
            BoundaryData::Expression { expr, params, .. } => {
                let mut p = params.clone();
                p.set("x1", x1)?;
                p.set("x2", x2)?;
                expr.eval(&[0.0f64; 3], &p)
            }
        }
    }

    /// Size of the data, used to make deviation thresholds relative.
    pub fn amplitude(&self) -> f64 {
        match self {
            BoundaryData::Default { amplitude } => amplitude.abs(),
            _ => {
                let mut m: f64 = 0.0;
                for k in 0..=20 {
                    let t = k as f64 / 20.0;
                    for (a, b) in [(t, 0.0), (t, 1.0), (0.0, t), (1.0, t)] {
                        if let Ok(v) = self.eval(a, b) {
                            m = m.max(v.abs());
                        }
                    }
                }
                m
            }
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, BoundaryData::Affine(_))
    }

    pub fn describe(&self) -> String {
        match self {
            BoundaryData::Default { amplitude } => {
                format!("{amplitude}*cos(pi*x1)*cos(pi*x2) (default boundary datum)")
            }
            BoundaryData::Affine(c) => format!("{}*x1 + {}*x2 + {}", c[0], c[1], c[2]),
            BoundaryData::Expression { source, .. } => source.clone(),
        }
    }
}

/// Nodal values on a uniform grid over the unit square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField2D {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub fixed: Vec<bool>,
}

impl ScalarField2D {
    /// Zero field with the boundary marked as fixed.
    pub fn new(nx: usize, ny: usize) -> Result<ScalarField2D> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3×3 nodes, got {nx}×{ny}"
            )));
        }
        let mut fixed = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                fixed[j * nx + i] = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
            }
        }
        Ok(ScalarField2D {
            nx,
            ny,
            values: vec![0.0; nx * ny],
            fixed,
        })
    }

    pub fn hx(&self) -> f64 {
        1.0 / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        1.0 / (self.ny - 1) as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, k: usize) -> (f64, f64) {
        ((k % self.nx) as f64 * self.hx(), (k / self.nx) as f64 * self.hy())
    }

    /// Writes the boundary data into the fixed nodes.
    pub fn apply_dirichlet(&mut self, bc: &BoundaryData) -> Result<()> {
        for k in 0..self.values.len() {
            if self.fixed[k] {
                let (x1, x2) = self.coords(k);
                self.values[k] = bc.eval(x1, x2)?;
            }
        }
        Ok(())
    }

    /// Samples `f` at every node.
    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField2D> {
        let mut s = ScalarField2D::new(nx, ny)?;
        for k in 0..s.values.len() {
            let (x1, x2) = s.coords(k);
            s.values[k] = f(x1, x2);
        }
        Ok(s)
    }

    pub fn free_count(&self) -> usize {
        self.fixed.iter().filter(|f| !**f).count()
    }

    fn elements(&self) -> impl IndexedParallelIterator<Item = [usize; 4]> + '_ {
        let ex = self.nx - 1;
        (0..ex * (self.ny - 1)).into_par_iter().map(move |e| {
            let (i, j) = (e % ex, e / ex);
            let a = self.index(i, j);
            [a, a + 1, a + 1 + self.nx, a + self.nx]
        })
    }
}

/// Gauss point shape-function gradients of the unit bilinear element,
/// scaled by the element size.
fn shape_gradients(hx: f64, hy: f64) -> [[[f64; 2]; 4]; 4] {
    let g = 1.0 / 3f64.sqrt();
    let xi = [-1.0, 1.0, 1.0, -1.0];
    let eta = [-1.0, -1.0, 1.0, 1.0];
    let gps = [(-g, -g), (g, -g), (g, g), (-g, g)];
    let mut out = [[[0.0; 2]; 4]; 4];
    for (q, (s, t)) in gps.iter().enumerate() {
        for a in 0..4 {
            out[q][a] = [
                xi[a] * (1.0 + eta[a] * t) / 4.0 * (2.0 / hx),
                eta[a] * (1.0 + xi[a] * s) / 4.0 * (2.0 / hy),
            ];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverControls {
    pub max_iterations: usize,
    /// Target Euclidean norm of the free-node energy gradient.
    pub tolerance: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for SolverControls {
    fn default() -> Self {
        SolverControls {
            max_iterations: 100,
            tolerance: 1e-10,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Aps2dProblem {
    pub model: EnergyModel,
    pub field: ScalarField2D,
    pub controls: SolverControls,
    /// Reject models that are not APS-convex instead of solving in
    /// best-effort mode.
    pub strict: bool,
}

impl Aps2dProblem {
    /// `n × n` nodes with the given Dirichlet data and a zero interior.
    pub fn new(model: EnergyModel, n: usize, bc: &BoundaryData) -> Result<Aps2dProblem> {
        let mut field = ScalarField2D::new(n, n)?;
        field.apply_dirichlet(bc)?;
        harmonic_extension(&mut field)?;
        Ok(Aps2dProblem {
            model,
            field,
            controls: SolverControls::default(),
            strict: true,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub energy: f64,
    pub gradient_norm: f64,
    pub residual: f64,
    /// Energy after each accepted step, starting with the initial guess.
    pub energy_history: Vec<f64>,
    /// False when the model is not APS-convex: the result is then only a
    /// stationary point.
    pub convex: bool,
    /// Largest diagonal shift needed to make the Newton matrix definite.
    pub max_shift: f64,
}

/// `(g(x), g'(x), g''(x))` with `x = |∇u|²`.
fn reduced(model: &EnergyModel, x: f64, element: usize) -> Result<(f64, f64, f64)> {
    let j = model.reduced_jet(x).map_err(|e| Error::Element {
        element,
        source: Box::new(e),
    })?;
    Ok((j.value(), j.d(0), j.hess(0, 0)))
}

struct ElementContribution {
    nodes: [usize; 4],
    energy: f64,
    grad: [f64; 4],
    hess: [[f64; 4]; 4],
}

fn element_terms(
    model: &EnergyModel,
    field: &ScalarField2D,
    e: usize,
    nodes: [usize; 4],
    dn: &[[[f64; 2]; 4]; 4],
    g0: f64,
    want_hess: bool,
) -> Result<ElementContribution> {
    let w = field.hx() * field.hy() / 4.0;
    let u = nodes.map(|k| field.values[k]);
    let mut out = ElementContribution {
        nodes,
        energy: 0.0,
        grad: [0.0; 4],
        hess: [[0.0; 4]; 4],
    };
    for d in dn {
        let mut p = [0.0; 2];
        for a in 0..4 {
            p[0] += u[a] * d[a][0];
            p[1] += u[a] * d[a][1];
        }
        let x = p[0] * p[0] + p[1] * p[1];
        let (g, g1, g2) = reduced(model, x, e)?;
        out.energy += w * 0.5 * (g - g0);
        let dp: [f64; 4] = std::array::from_fn(|a| d[a][0] * p[0] + d[a][1] * p[1]);
        for a in 0..4 {
            out.grad[a] += w * g1 * dp[a];
        }
        if want_hess {
            for a in 0..4 {
                for b in 0..4 {
                    let dd = d[a][0] * d[b][0] + d[a][1] * d[b][1];
                    out.hess[a][b] += w * (g1 * dd + 2.0 * g2 * dp[a] * dp[b]);
                }
            }
        }
    }
    Ok(out)
}

fn element_pass(
    model: &EnergyModel,
    field: &ScalarField2D,
    want_hess: bool,
) -> Result<Vec<ElementContribution>> {
    let dn = shape_gradients(field.hx(), field.hy());
    let g0 = model.reduced_jet(0.0)?.value();
    field
        .elements()
        .enumerate()
        .map(|(e, nodes)| element_terms(model, field, e, nodes, &dn, g0, want_hess))
        .collect()
}

/// `∫ ½ (g(|∇u|²) − g(0)) dx` with 2×2 Gauss quadrature.
pub fn reduced_energy(model: &EnergyModel, field: &ScalarField2D) -> Result<f64> {
    Ok(element_pass(model, field, false)?.iter().map(|c| c.energy).sum())
}

/// Nodal gradient of [`reduced_energy`] (all nodes, fixed ones included).
pub fn energy_gradient(model: &EnergyModel, field: &ScalarField2D) -> Result<Vec<f64>> {
    let mut g = vec![0.0; field.values.len()];
    for c in element_pass(model, field, false)? {
        for a in 0..4 {
            g[c.nodes[a]] += c.grad[a];
        }
    }
    Ok(g)
}

/// Max-norm over free nodes of the discrete `div(H ∇u)` with
/// `H = 2 g'(|∇u|²)`, obtained from the energy gradient with a lumped
/// mass.
pub fn residual_iii(field: &ScalarField2D, model: &EnergyModel) -> Result<f64> {
    let g = energy_gradient(model, field)?;
    let area = field.hx() * field.hy();
    Ok(g.iter()
        .zip(&field.fixed)
        .filter(|(_, f)| !**f)
        .fold(0.0, |m, (v, _)| m.max((2.0 * v / area).abs())))
}

/// Replaces the free values by the discrete harmonic extension of the
/// fixed ones (the minimizer for `g(x) = x`).
pub fn harmonic_extension(field: &mut ScalarField2D) -> Result<()> {
    let num = numbering(field);
    let dn = shape_gradients(field.hx(), field.hy());
    let w = field.hx() * field.hy() / 4.0;
    let mut k = [[0.0; 4]; 4];
    for d in &dn {
        for a in 0..4 {
            for b in 0..4 {
                k[a][b] += w * (d[a][0] * d[b][0] + d[a][1] * d[b][1]);
            }
        }
    }
    let n = num.free.len();
    let mut mat = BandedSym::zeros(n, num.bw);
    let mut rhs = vec![0.0; n];
    let nodes: Vec<[usize; 4]> = field.elements().collect();
    for el in nodes {
        for a in 0..4 {
            let Some(ia) = num.slot[el[a]] else { continue };
            for b in 0..4 {
                match num.slot[el[b]] {
                    Some(ib) if ib <= ia => mat.add(ia, ib, k[a][b]),
                    Some(_) => {}
                    None => rhs[ia] -= k[a][b] * field.values[el[b]],
                }
            }
        }
    }
    let u = mat.cholesky(0.0)?.solve(&rhs);
    for (s, node) in num.free.iter().enumerate() {
        field.values[*node] = u[s];
    }
    Ok(())
}

struct Numbering {
    free: Vec<usize>,
    slot: Vec<Option<usize>>,
    bw: usize,
}

fn numbering(field: &ScalarField2D) -> Numbering {
    let mut slot = vec![None; field.values.len()];
    let mut free = Vec::new();
    for (k, f) in field.fixed.iter().enumerate() {
        if !f {
            slot[k] = Some(free.len());
            free.push(k);
        }
    }
    let mut bw = 0;
    let ex = field.nx - 1;
    for e in 0..ex * (field.ny - 1) {
        let (i, j) = (e % ex, e / ex);
        let a = field.index(i, j);
        let ids: Vec<usize> = [a, a + 1, a + 1 + field.nx, a + field.nx]
            .iter()
            .filter_map(|k| slot[*k])
            .collect();
        if let (Some(lo), Some(hi)) = (ids.iter().min(), ids.iter().max()) {
            bw = bw.max(hi - lo);
        }
    }
    Numbering { free, slot, bw }
}

struct Converged {
    iterations: usize,
    energy: f64,
    gradient_norm: f64,
    values: Vec<f64>,
}

/// Minimizes the reduced energy over the free nodes, starting from the
/// current field.
///
/// In strict mode models that fail APS-convexity on the default grid are
/// rejected; otherwise the Newton matrix is shifted until definite and the
/// result is reported as a stationary point.
pub fn solve(problem: &mut Aps2dProblem) -> Result<SolveReport> {
    let model = &problem.model;
    let convex = check_aps2(model, &Grid::default(), DEFAULT_TOL).passed();
    if problem.strict && !convex {
        return Err(Error::NotApsConvex(model.to_string()));
    }
    let c = problem.controls;
    let field = &mut problem.field;
    let num = numbering(field);
    let n = num.free.len();
    let mut energy = reduced_energy(model, field)?;
    let mut history = vec![energy];
    let mut max_shift: f64 = 0.0;
    let mut last_grad = f64::INFINITY;
    let mut best: Option<Converged> = None;
    let mut polish = 0;
    for it in 0..=c.max_iterations {
        let contributions = element_pass(model, field, true)?;
        let mut grad = vec![0.0; n];
        let mut hess = BandedSym::zeros(n, num.bw);
        for ce in &contributions {
            for a in 0..4 {
                let Some(ia) = num.slot[ce.nodes[a]] else { continue };
                grad[ia] += ce.grad[a];
                for b in 0..=a {
                    if let Some(ib) = num.slot[ce.nodes[b]] {
                        hess.add(ia, ib, ce.hess[a][b]);
                    }
                }
            }
        }
        let gnorm = norm2(&grad);
        last_grad = gnorm;
        if gnorm <= c.tolerance {
            // up to two polishing steps while they keep halving the gradient
            let improved = best.as_ref().is_none_or(|b| gnorm < 0.5 * b.gradient_norm);
            if improved {
                best = Some(Converged {
                    iterations: it,
                    energy,
                    gradient_norm: gnorm,
                    values: field.values.clone(),
                });
            }
            if !improved || polish == 2 {
                break;
            }
            polish += 1;
        }
        if it == c.max_iterations {
            break;
        }
        let (chol, shift) = hess.cholesky_shifted()?;
        max_shift = max_shift.max(shift);
        let step: Vec<f64> = chol.solve(&grad).iter().map(|v| -v).collect();
        let slope = dot(&grad, &step);
        let base: Vec<f64> = num.free.iter().map(|k| field.values[*k]).collect();
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..c.max_backtracks {
            for (s, k) in num.free.iter().enumerate() {
                field.values[*k] = base[s] + t * step[s];
            }
            if let Ok(e) = reduced_energy(model, field) {
                // near the minimizer the decrease drowns in round-off; a
                // full Newton step is then taken on the gradient alone
                let noise = 1e-12 * energy.abs().max(e.abs()).max(1e-300);
                if e <= energy + c.armijo * t * slope || (t == 1.0 && e - energy <= noise) {
                    energy = e;
                    accepted = true;
                    break;
                }
            }
            t *= c.backtrack;
        }
        if !accepted {
            for (s, k) in num.free.iter().enumerate() {
                field.values[*k] = base[s];
            }
            break;
        }
        history.push(energy);
    }
    match best {
        Some(b) => {
            field.values = b.values;
            history.truncate(b.iterations + 1);
            Ok(SolveReport {
                iterations: b.iterations,
                energy: b.energy,
                gradient_norm: b.gradient_norm,
                residual: residual_iii(field, model)?,
                energy_history: history,
                convex,
                max_shift,
            })
        }
        None => Err(Error::NoConvergence {
            iterations: c.max_iterations,
            residual: last_grad,
            history,
        }),
    }
}
