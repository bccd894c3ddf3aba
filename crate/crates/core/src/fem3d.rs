//! Full three-dimensional equilibrium on the unit cube.
//!
//! `∫ W(∇φ) dx` is minimized over trilinear hexahedra with APS Dirichlet
//! data `(0, 0, u_bc(x1, x2))` on the lateral faces. The in-plane part of
//! the resulting displacement, `u_δ`, measures how far the equilibrium is
//! from an anti-plane shear: it vanishes for APS-admissible energies.
//!
//! The faces `x3 = 0` and `x3 = 1` are identified by default, which
//! models a slice of an infinitely long cylinder. Penalized models use one
//! quadrature point for the penalty term.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aps2d::{harmonic_extension, BoundaryData, ScalarField2D};
use crate::energies::EnergyModel;
use crate::error::{Error, Result};
use crate::kinematics::Matrix3;
use crate::linalg::{dot, norm2, BandedSym};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TopBottom {
    /// `x3 = 0` and `x3 = 1` carry the same displacement.
    #[default]
    Periodic,
    /// No condition (traction free).
    Free,
}

/// Structured hexahedral mesh of the unit cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexMesh {
    pub n: usize,
}

impl HexMesh {
    pub fn new(n: usize) -> Result<HexMesh> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 nodes per edge, got {n}"
            )));
        }
        Ok(HexMesh { n })
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    pub fn node_count(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.n + j) * self.n + i
    }

    pub fn ijk(&self, node: usize) -> (usize, usize, usize) {
        (node % self.n, (node / self.n) % self.n, node / (self.n * self.n))
    }

    pub fn coords(&self, node: usize) -> [f64; 3] {
        let (i, j, k) = self.ijk(node);
        let h = self.spacing();
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }

    pub fn is_lateral(&self, node: usize) -> bool {
        let (i, j, _) = self.ijk(node);
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    pub fn element_count(&self) -> usize {
        (self.n - 1).pow(3)
    }

    /// Corner nodes in the order `(dx, dy, dz)` = bits of the local index.
    pub fn element(&self, e: usize) -> [usize; 8] {
        let m = self.n - 1;
        let (i, j, k) = (e % m, (e / m) % m, e / (m * m));
        std::array::from_fn(|a| self.node(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Displacement3D {
    pub mesh: HexMesh,
    pub u: Vec<[f64; 3]>,
    pub fixed: Vec<bool>,
    pub top_bottom: TopBottom,
}

impl Displacement3D {
    /// Zero interior, `(0, 0, u_bc)` on the lateral faces.
    pub fn new(mesh: HexMesh, bc: &BoundaryData, top_bottom: TopBottom) -> Result<Displacement3D> {
        let mut u = vec![[0.0; 3]; mesh.node_count()];
        let fixed: Vec<bool> = (0..mesh.node_count()).map(|k| mesh.is_lateral(k)).collect();
        for (k, f) in fixed.iter().enumerate() {
            if *f {
                let x = mesh.coords(k);
                u[k] = [0.0, 0.0, bc.eval(x[0], x[1])?];
            }
        }
        Ok(Displacement3D {
            mesh,
            u,
            fixed,
            top_bottom,
        })
    }

    /// `(0, 0, v(x1, x2))` for a planar field on the same grid.
    pub fn extrude(
        mesh: HexMesh,
        field: &ScalarField2D,
        top_bottom: TopBottom,
    ) -> Result<Displacement3D> {
        if field.nx != mesh.n || field.ny != mesh.n {
            return Err(Error::InvalidArgument("planar grid does not match the mesh".into()));
        }
        let u = (0..mesh.node_count())
            .map(|k| {
                let (i, j, _) = mesh.ijk(k);
                [0.0, 0.0, field.values[field.index(i, j)]]
            })
            .collect();
        Ok(Displacement3D {
            mesh,
            u,
            fixed: (0..mesh.node_count()).map(|k| mesh.is_lateral(k)).collect(),
            top_bottom,
        })
    }

    /// Node whose values a node carries (itself unless identified).
    fn master(&self, node: usize) -> usize {
        let n = self.mesh.n;
        match self.top_bottom {
            TopBottom::Periodic if node / (n * n) == n - 1 => node - (n - 1) * n * n,
            _ => node,
        }
    }

    fn sync_periodic(&mut self) {
        if self.top_bottom == TopBottom::Periodic {
            for k in 0..self.u.len() {
                let m = self.master(k);
                if m != k {
                    self.u[k] = self.u[m];
                }
            }
        }
    }
}

/// `u_δ = √(u1² + u2²)` at every node.
pub fn deviation(disp: &Displacement3D) -> Vec<f64> {
    disp.u.iter().map(|u| (u[0] * u[0] + u[1] * u[1]).sqrt()).collect()
}

/// Largest `u_δ` over the nodes without Dirichlet data.
pub fn max_interior_deviation(disp: &Displacement3D) -> f64 {
    deviation(disp)
        .iter()
        .zip(&disp.fixed)
        .filter(|(_, f)| !**f)
        .fold(0.0, |m, (d, _)| m.max(*d))
}

/// Energy density, first Piola stress and tangent, flattened as `3 i + J`.
pub struct Tangent {
    pub energy: f64,
    pub stress: [f64; 9],
    pub tangent: [[f64; 9]; 9],
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn inversion(det: f64) -> Error {
    Error::Orientation { det }
}

/// `d J` and `d² J` with respect to `F`.
fn det_derivatives(f: &Matrix3) -> Result<(f64, [f64; 9], [[f64; 9]; 9])> {
    let j = f.det();
    if !(j > 0.0) {
        return Err(inversion(j));
    }
    let fi = f.inverse()?;
    let mut dj = [0.0; 9];
    let mut d2j = [[0.0; 9]; 9];
    for i in 0..3 {
        for jj in 0..3 {
            dj[3 * i + jj] = j * fi[(jj, i)];
            for k in 0..3 {
                for l in 0..3 {
                    d2j[3 * i + jj][3 * k + l] =
                        j * (fi[(jj, i)] * fi[(l, k)] - fi[(jj, k)] * fi[(l, i)]);
                }
            }
        }
    }
    Ok((j, dj, d2j))
}

/// Energy, stress and tangent of an invariant-form model at `F`.
pub fn tangent(model: &EnergyModel, f: &Matrix3) -> Result<Tangent> {
    let c = f.right_cauchy_green();
    let b = f.left_cauchy_green();
    let fc = *f * c;
    let i1 = c.trace();
    let i2 = 0.5 * (i1 * i1 - (c * c).trace());
    let (j, dj, d2j) = det_derivatives(f)?;
    let i3 = j * j;
    let w = model.invariant_jet([i1, i2, i3])?;
    let mut di = [[0.0; 9]; 3];
    for i in 0..3 {
        for jj in 0..3 {
            let k = 3 * i + jj;
            di[0][k] = 2.0 * f[(i, jj)];
            di[1][k] = 2.0 * (i1 * f[(i, jj)] - fc[(i, jj)]);
            di[2][k] = 2.0 * j * dj[k];
        }
    }
    let mut out = Tangent {
        energy: w.value(),
        stress: [0.0; 9],
        tangent: [[0.0; 9]; 9],
    };
    for k in 0..9 {
        out.stress[k] = (0..3).map(|a| w.d(a) * di[a][k]).sum();
    }
    for i in 0..3 {
        for jj in 0..3 {
            let p = 3 * i + jj;
            for k in 0..3 {
                for l in 0..3 {
                    let q = 3 * k + l;
                    let d2i1 = 2.0 * delta(i, k) * delta(jj, l);
                    let d2i2 = 2.0 * (2.0 * f[(k, l)] * f[(i, jj)] + i1 * delta(i, k) * delta(jj, l))
                        - 2.0 * (delta(i, k) * c[(l, jj)] + f[(i, l)] * f[(k, jj)] + b[(i, k)] * delta(jj, l));
                    let d2i3 = 2.0 * dj[p] * dj[q] + 2.0 * j * d2j[p][q];
                    let mut v = w.d(0) * d2i1 + w.d(1) * d2i2 + w.d(2) * d2i3;
                    for a in 0..3 {
                        for bb in 0..3 {
                            v += w.hess(a, bb) * di[a][p] * di[bb][q];
                        }
                    }
                    out.tangent[p][q] = v;
                }
            }
        }
    }
    Ok(out)
}

/// `κ/2 (J − 1)²` with its stress and tangent.
fn penalty_tangent(kappa: f64, f: &Matrix3) -> Result<Tangent> {
    let (j, dj, d2j) = det_derivatives(f)?;
    let mut out = Tangent {
        energy: 0.5 * kappa * (j - 1.0) * (j - 1.0),
        stress: dj.map(|d| kappa * (j - 1.0) * d),
        tangent: [[0.0; 9]; 9],
    };
    for p in 0..9 {
        for q in 0..9 {
            out.tangent[p][q] = kappa * (dj[p] * dj[q] + (j - 1.0) * d2j[p][q]);
        }
    }
    Ok(out)
}

/// Quadrature points (natural coordinates) and weights of the unit cube
/// scaled to volume `h³`.
fn quadrature(reduced: bool) -> Vec<([f64; 3], f64)> {
    if reduced {
        return vec![([0.0; 3], 1.0)];
    }
    let g = 1.0 / 3f64.sqrt();
    (0..8)
        .map(|a| {
            let s = |bit: usize| if (a >> bit) & 1 == 1 { g } else { -g };
            ([s(0), s(1), s(2)], 0.125)
        })
        .collect()
}

fn shape_gradients(xi: [f64; 3], h: f64) -> [[f64; 3]; 8] {
    std::array::from_fn(|a| {
        let s: [f64; 3] = std::array::from_fn(|d| if (a >> d) & 1 == 1 { 1.0 } else { -1.0 });
        let f: [f64; 3] = std::array::from_fn(|d| 0.5 * (1.0 + s[d] * xi[d]));
        [
            0.5 * s[0] * f[1] * f[2] * (2.0 / h),
            0.5 * s[1] * f[0] * f[2] * (2.0 / h),
            0.5 * s[2] * f[0] * f[1] * (2.0 / h),
        ]
    })
}

struct ElementTerms {
    nodes: [usize; 8],
    energy: f64,
    grad: [f64; 24],
    hess: Option<Box<[[f64; 24]; 24]>>,
}

fn element_terms(
    model: &EnergyModel,
    disp: &Displacement3D,
    e: usize,
    want_hess: bool,
) -> Result<ElementTerms> {
    let mesh = disp.mesh;
    let h = mesh.spacing();
    let vol = h * h * h;
    let nodes = mesh.element(e);
    let u = nodes.map(|k| disp.u[k]);
    let (base, kappa) = model.split_penalty();
    let w0 = base.energy([3.0, 3.0, 1.0])?;
    let mut out = ElementTerms {
        nodes,
        energy: 0.0,
        grad: [0.0; 24],
        hess: want_hess.then(|| Box::new([[0.0; 24]; 24])),
    };
    let wrap = |err: Error| Error::Element {
        element: e,
        source: Box::new(err),
    };
    let parts: [(bool, Option<&EnergyModel>); 2] = [(false, Some(base)), (true, None)];
    for (reduced, m) in parts {
        if reduced && kappa == 0.0 {
            continue;
        }
        for (xi, w) in quadrature(reduced) {
            let dn = shape_gradients(xi, h);
            let mut f = Matrix3::IDENTITY;
            for a in 0..8 {
                for i in 0..3 {
                    for jj in 0..3 {
                        f[(i, jj)] += u[a][i] * dn[a][jj];
                    }
                }
            }
            let t = match m {
                Some(m) => tangent(m, &f).map_err(wrap)?,
                None => penalty_tangent(kappa, &f).map_err(wrap)?,
            };
            let wv = w * vol;
            out.energy += wv * (t.energy - if m.is_some() { w0 } else { 0.0 });
            for a in 0..8 {
                for i in 0..3 {
                    out.grad[3 * a + i] += wv * (0..3).map(|jj| t.stress[3 * i + jj] * dn[a][jj]).sum::<f64>();
                }
            }
            if let Some(hm) = out.hess.as_mut() {
                // A contracted with the shape gradients: X[(a,i)][3k+l]
                let mut x = [[0.0; 9]; 24];
                for a in 0..8 {
                    for i in 0..3 {
                        for q in 0..9 {
                            x[3 * a + i][q] = (0..3).map(|jj| dn[a][jj] * t.tangent[3 * i + jj][q]).sum();
                        }
                    }
                }
                for p in 0..24 {
                    for b in 0..8 {
                        for k in 0..3 {
                            let v: f64 = (0..3).map(|l| x[p][3 * k + l] * dn[b][l]).sum();
                            hm[p][3 * b + k] += wv * v;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn element_pass(model: &EnergyModel, disp: &Displacement3D, want_hess: bool) -> Result<Vec<ElementTerms>> {
    (0..disp.mesh.element_count())
        .into_par_iter()
        .map(|e| element_terms(model, disp, e, want_hess))
        .collect()
}

/// Total energy `∫ (W(∇φ) − W(id)) dx` and its gradient with respect to
/// the nodal displacements (all nodes, no periodic folding).
pub fn assemble_energy(model: &EnergyModel, disp: &Displacement3D) -> Result<(f64, Vec<[f64; 3]>)> {
    if !model.is_compressible() && model.split_penalty().1 == 0.0 {
        return Err(Error::Unsupported {
            model: model.to_string(),
            what: "three-dimensional solve without a volumetric penalty",
        });
    }
    let terms = element_pass(model, disp, false)?;
    let mut g = vec![[0.0; 3]; disp.u.len()];
    let mut energy = 0.0;
    for t in &terms {
        energy += t.energy;
        for a in 0..8 {
            for i in 0..3 {
                g[t.nodes[a]][i] += t.grad[3 * a + i];
            }
        }
    }
    Ok((energy, g))
}

pub fn total_energy(model: &EnergyModel, disp: &Displacement3D) -> Result<f64> {
    Ok(element_pass(model, disp, false)?.iter().map(|t| t.energy).sum())
}

/// Free degrees of freedom ordered `(i, j)`-slowest so that the stiffness
/// matrix is banded.
struct Dofs {
    /// `slot[node]` = first DOF of the node's master, if free.
    slot: Vec<Option<usize>>,
    masters: Vec<usize>,
    bw: usize,
}

fn dofs(disp: &Displacement3D) -> Dofs {
    let mesh = disp.mesh;
    let n = mesh.n;
    let layers = match disp.top_bottom {
        TopBottom::Periodic => n - 1,
        TopBottom::Free => n,
    };
    let mut slot = vec![None; mesh.node_count()];
    let mut masters = Vec::new();
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            for k in 0..layers {
                let node = mesh.node(i, j, k);
                slot[node] = Some(3 * masters.len());
                masters.push(node);
            }
        }
    }
    for node in 0..mesh.node_count() {
        let m = disp.master(node);
        if m != node {
            slot[node] = slot[m];
        }
    }
    let mut bw = 0;
    for e in 0..mesh.element_count() {
        let ids: Vec<usize> = mesh.element(e).iter().filter_map(|k| slot[*k]).collect();
        if let (Some(lo), Some(hi)) = (ids.iter().min(), ids.iter().max()) {
            bw = bw.max(hi - lo + 2);
        }
    }
    Dofs { slot, masters, bw }
}

/// Starting field of the Newton iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum InitialGuess {
    /// Boundary data only, zero interior.
    #[default]
    Zero,
    /// Harmonic extension of the boundary data, extruded in `x3`.
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fem3dOptions {
    pub n: usize,
    pub top_bottom: TopBottom,
    pub initial: InitialGuess,
    pub max_iterations: usize,
    /// Convergence when the free gradient norm drops below
    /// `tol_factor·√(n³)`.
    pub tol_factor: f64,
}

impl Default for Fem3dOptions {
    fn default() -> Self {
        Fem3dOptions {
            n: 9,
            top_bottom: TopBottom::Periodic,
            initial: InitialGuess::Zero,
            max_iterations: 60,
            tol_factor: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fem3dResult {
    pub displacement: Displacement3D,
    pub iterations: usize,
    pub energy: f64,
    pub gradient_norm: f64,
    pub energy_history: Vec<f64>,
    pub max_interior_deviation: f64,
}

/// The pure anti-plane starting field: the harmonic extension of the
/// boundary data, extruded in `x3`.
pub fn initial_guess(mesh: HexMesh, bc: &BoundaryData, top_bottom: TopBottom) -> Result<Displacement3D> {
    let mut plane = ScalarField2D::new(mesh.n, mesh.n)?;
    plane.apply_dirichlet(bc)?;
    harmonic_extension(&mut plane)?;
    Displacement3D::extrude(mesh, &plane, top_bottom)
}

pub fn minimize(model: &EnergyModel, bc: &BoundaryData, opts: &Fem3dOptions) -> Result<Fem3dResult> {
    let mesh = HexMesh::new(opts.n)?;
    let disp = match opts.initial {
        InitialGuess::Zero => Displacement3D::new(mesh, bc, opts.top_bottom)?,
        InitialGuess::Harmonic => initial_guess(mesh, bc, opts.top_bottom)?,
    };
    minimize_from(model, disp, opts)
}

/// Newton iteration with backtracking from a given field. Steps that invert
/// an element are shortened.
pub fn minimize_from(model: &EnergyModel, mut disp: Displacement3D, opts: &Fem3dOptions) -> Result<Fem3dResult> {
    if !model.is_compressible() && model.split_penalty().1 == 0.0 {
        return Err(Error::Unsupported {
            model: model.to_string(),
            what: "three-dimensional solve without a volumetric penalty",
        });
    }
    disp.sync_periodic();
    let d = dofs(&disp);
    let ndof = 3 * d.masters.len();
    let tol = opts.tol_factor * (disp.mesh.node_count() as f64).sqrt();
    let mut energy = total_energy(model, &disp)?;
    let mut history = vec![energy];
    let mut last = f64::INFINITY;
    let mut best: Option<(usize, f64, f64, Vec<[f64; 3]>)> = None;
    let mut polish = 0;
    for it in 0..=opts.max_iterations {
        let terms = element_pass(model, &disp, true)?;
        let mut grad = vec![0.0; ndof];
        let mut hess = BandedSym::zeros(ndof, d.bw);
        for t in &terms {
            let hm = t.hess.as_ref().expect("hessian requested");
            for a in 0..8 {
                let Some(sa) = d.slot[t.nodes[a]] else { continue };
                for i in 0..3 {
                    grad[sa + i] += t.grad[3 * a + i];
                    for b in 0..8 {
                        let Some(sb) = d.slot[t.nodes[b]] else { continue };
                        for k in 0..3 {
                            // each unordered pair once: lower triangle only
                            if sb + k <= sa + i {
                                hess.add(sa + i, sb + k, hm[3 * a + i][3 * b + k]);
                            }
                        }
                    }
                }
            }
        }
        let gnorm = norm2(&grad);
        last = gnorm;
        if gnorm <= tol {
            let improved = best.as_ref().is_none_or(|b| gnorm < 0.5 * b.2);
            if improved {
                best = Some((it, energy, gnorm, disp.u.clone()));
            }
            if !improved || polish == 2 {
                break;
            }
            polish += 1;
        }
        if it == opts.max_iterations {
            break;
        }
        let (chol, _) = hess.cholesky_shifted()?;
        let step: Vec<f64> = chol.solve(&grad).iter().map(|v| -v).collect();
        let slope = dot(&grad, &step);
        let base = disp.u.clone();
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            for (s, node) in d.masters.iter().enumerate() {
                for c in 0..3 {
                    disp.u[*node][c] = base[*node][c] + t * step[3 * s + c];
                }
            }
            disp.sync_periodic();
            if let Ok(e) = total_energy(model, &disp) {
                let noise = 1e-12 * energy.abs().max(e.abs()).max(1e-300);
                if e <= energy + 1e-4 * t * slope || (t == 1.0 && e - energy <= noise) {
                    energy = e;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            disp.u = base;
            break;
        }
        history.push(energy);
    }
    match best {
        Some((iterations, energy, gradient_norm, u)) => {
            disp.u = u;
            history.truncate(iterations + 1);
            let max_interior_deviation = max_interior_deviation(&disp);
            Ok(Fem3dResult {
                displacement: disp,
                iterations,
                energy,
                gradient_norm,
                energy_history: history,
                max_interior_deviation,
            })
        }
        None => Err(Error::NoConvergence {
            iterations: opts.max_iterations,
            residual: last,
            history,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blatz_ko() -> EnergyModel {
        EnergyModel::by_name("blatz-ko").unwrap()
    }

    #[test]
    fn tangent_matches_differences_of_stress() {
        let f = Matrix3::from_rows([[1.1, 0.2, -0.1], [0.05, 0.95, 0.3], [0.1, -0.2, 1.2]]);
        for name in ["mooney-rivlin", "blatz-ko", "veronda-westman"] {
            let m = EnergyModel::by_name(name).unwrap();
            let t = tangent(&m, &f).unwrap();
            let h = 1e-6;
            for q in 0..9 {
                let mut fp = f;
                let mut fm = f;
                fp[(q / 3, q % 3)] += h;
                fm[(q / 3, q % 3)] -= h;
                let sp = tangent(&m, &fp).unwrap();
                let sm = tangent(&m, &fm).unwrap();
                let dw = (sp.energy - sm.energy) / (2.0 * h);
                assert!((dw - t.stress[q]).abs() < 1e-7, "{name} P[{q}]");
                for p in 0..9 {
                    let fd = (sp.stress[p] - sm.stress[p]) / (2.0 * h);
                    assert!((fd - t.tangent[p][q]).abs() < 1e-6, "{name} A[{p}][{q}]");
                }
            }
        }
    }

    #[test]
    fn zero_displacement_is_stress_free() {
        let mesh = HexMesh::new(4).unwrap();
        let bc = BoundaryData::Affine([0.0; 3]);
        let d = Displacement3D::new(mesh, &bc, TopBottom::Periodic).unwrap();
        let (e, g) = assemble_energy(&blatz_ko(), &d).unwrap();
        assert!(e.abs() < 1e-15);
        assert!(g.iter().flatten().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn periodic_numbering_shares_dofs() {
        let mesh = HexMesh::new(4).unwrap();
        let d = Displacement3D::new(mesh, &BoundaryData::default(), TopBottom::Periodic).unwrap();
        let dd = dofs(&d);
        assert_eq!(dd.masters.len(), 2 * 2 * 3);
        assert_eq!(dd.slot[mesh.node(1, 1, 0)], dd.slot[mesh.node(1, 1, 3)]);
        assert!(dd.slot[mesh.node(0, 1, 1)].is_none());
    }
}
