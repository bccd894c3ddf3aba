//! Constitutive condition checkers.
//!
//! All checks sample the isochoric shear path `I1 = I2 = 3 + R², I3 = 1` on
//! a [`Grid`] and return a [`Verdict`] with a reproducible witness when they
//! fail. Derivatives come from [`Jet2`] evaluation; a few routes
//! deliberately use finite differences or matrix algebra instead so that the
//! equivalent formulations can be played against each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diff::{fd_first_derivative_richardson, Jet2};
use crate::energies::{pucci_energy, EnergyModel, InvariantChannel};
use crate::error::{Error, Result};
use crate::kinematics::{simple_shear_gradient, InvariantTriple, Matrix3};

/// Sample radii `R` on `(0, r_max]`: half linearly spaced, half
/// logarithmically spaced from `1e-3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub r_max: f64,
    pub points: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid::new(10.0, 200).expect("default grid")
    }
}

impl Grid {
    /// `n` points in total; requires `r_max > 1e-3` and `n ≥ 2`.
    pub fn new(r_max: f64, n: usize) -> Result<Grid> {
        if !(r_max > 1e-3 && r_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid maximum must exceed 1e-3, got {r_max}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
        }
        let n_lin = n / 2;
        let n_log = n - n_lin;
        let mut points = Vec::with_capacity(n);
        for k in 1..=n_lin {
            points.push(r_max * k as f64 / n_lin as f64);
        }
        let span = r_max.log10() + 3.0;
        for k in 0..n_log {
            points.push(10f64.powf(-3.0 + span * k as f64 / n_log as f64));
        }
        points.sort_by(f64::total_cmp);
        Ok(Grid { r_max, points })
    }

    pub fn from_points(mut points: Vec<f64>) -> Result<Grid> {
        if points.is_empty() || points.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidArgument("grid points must be positive".into()));
        }
        points.sort_by(f64::total_cmp);
        Ok(Grid {
            r_max: *points.last().unwrap(),
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest spacing between consecutive points around `r`.
    pub fn local_step(&self, r: f64) -> f64 {
        let i = self.points.partition_point(|p| *p < r);
        let lo = if i > 0 { self.points[i - 1] } else { 0.0 };
        let hi = self.points.get(i + 1).copied().unwrap_or(r);
        (r - lo).max(hi - r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Sample location (`R`, `γ` or a trial index, depending on the check).
    pub at: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail(Witness),
    /// A sufficient condition failed while the sharp one holds.
    Inconclusive(Witness),
    NotApplicable(String),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn failed(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    pub fn witness(&self) -> Option<Witness> {
        match self {
            Verdict::Fail(w) | Verdict::Inconclusive(w) => Some(*w),
            _ => None,
        }
    }

    /// `pass`, `fail`, `inconclusive` or `n/a`.
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail(_) => "fail",
            Verdict::Inconclusive(_) => "inconclusive",
            Verdict::NotApplicable(_) => "n/a",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail(w) => write!(f, "fail (at {:.6}, value {:.6e})", w.at, w.value),
            Verdict::Inconclusive(w) => {
                write!(f, "inconclusive (at {:.6}, value {:.6e})", w.at, w.value)
            }
            Verdict::NotApplicable(why) => write!(f, "n/a ({why})"),
        }
    }
}

/// Default relative tolerance of the sign checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Spread allowed in the fitted K1 constant.
pub const K1_SPREAD_TOL: f64 = 1e-8;
/// Relative tolerance of the K2 residual.
pub const K2_TOL: f64 = 1e-8;

/// Everything known about `W` at one point of the shear path.
#[derive(Debug, Clone, Copy)]
pub struct PathSample {
    pub r: f64,
    /// `W(3+R², 3+R², 1)` as a jet in `R`.
    pub path: Jet2,
    /// `W` as a jet in `(I1, I2, I3)` at the sample.
    pub partials: Jet2,
}

impl PathSample {
    pub fn at(model: &EnergyModel, r: f64) -> Result<PathSample> {
        let x = r * r;
        Ok(PathSample {
            r,
            path: model.path_jet(r)?,
            partials: model.invariant_jet([3.0 + x, 3.0 + x, 1.0])?,
        })
    }

    fn scale(&self) -> f64 {
        self.partials.value().abs().max(1.0)
    }

    pub fn w1(&self) -> f64 {
        self.partials.d(0)
    }

    pub fn w2(&self) -> f64 {
        self.partials.d(1)
    }

    pub fn w3(&self) -> f64 {
        self.partials.d(2)
    }
}

/// Path samples on the whole grid, in grid order.
pub fn path_samples(model: &EnergyModel, grid: &Grid) -> Result<Vec<PathSample>> {
    grid.points
        .par_iter()
        .map(|r| PathSample::at(model, *r))
        .collect()
}

/// Passes when `value ≥ −tol·scale` everywhere; the witness is the most
/// negative violating sample.
fn sign_scan(values: impl Iterator<Item = (f64, f64, f64)>, tol: f64) -> Verdict {
    let mut worst: Option<Witness> = None;
    for (at, value, scale) in values {
        if value < -tol * scale && worst.is_none_or(|w| value < w.value) {
            worst = Some(Witness { at, value });
        }
    }
    worst.map_or(Verdict::Pass, Verdict::Fail)
}

fn on_samples(model: &EnergyModel, grid: &Grid, f: impl FnOnce(&[PathSample]) -> Verdict) -> Verdict {
    match path_samples(model, grid) {
        Ok(s) => f(&s),
        Err(e) => Verdict::NotApplicable(e.to_string()),
    }
}

/// `d²/dR² W(3+R², 3+R², 1)` at each sample.
pub fn aps2_values(samples: &[PathSample]) -> Vec<f64> {
    samples.iter().map(|s| s.path.hess(0, 0)).collect()
}

pub fn aps2_from(samples: &[PathSample], tol: f64) -> Verdict {
    sign_scan(
        samples.iter().map(|s| (s.r, s.path.hess(0, 0), s.scale())),
        tol,
    )
}

/// APS-convexity: `d²/dR² W(3+R², 3+R², 1) ≥ 0`.
pub fn check_aps2(model: &EnergyModel, grid: &Grid, tol: f64) -> Verdict {
    on_samples(model, grid, |s| aps2_from(s, tol))
}

/// The sufficient condition `𝒲''(3+R²) ≥ 0` with `𝒲(I) = W(I, I, 1)`.
///
/// A failure while APS2 holds is reported as inconclusive.
pub fn check_aps1(model: &EnergyModel, grid: &Grid, tol: f64) -> Verdict {
    let vals: Result<Vec<(f64, f64, f64)>> = grid
        .points
        .par_iter()
        .map(|r| {
            let s = Jet2::variable(3.0 + r * r, 0, 1);
            let w = model.eval_invariants(&[s, s, Jet2::constant(1.0)])?;
            Ok((*r, w.hess(0, 0), w.value().abs().max(1.0)))
        })
        .collect();
    let v = match vals {
        Ok(v) => sign_scan(v.into_iter(), tol),
        Err(e) => return Verdict::NotApplicable(e.to_string()),
    };
    match v {
        Verdict::Fail(w) if check_aps2(model, grid, tol).passed() => Verdict::Inconclusive(w),
        other => other,
    }
}

/// `2 d/dR [R (W1 + W2)]` from the invariant partials; equals the APS2
/// quantity when the algebra is right.
pub fn aps3_value(s: &PathSample) -> f64 {
    let j = &s.partials;
    let x = s.r * s.r;
    2.0 * ((j.d(0) + j.d(1)) + 2.0 * x * (j.hess(0, 0) + 2.0 * j.hess(0, 1) + j.hess(1, 1)))
}

pub fn aps3_from(samples: &[PathSample], tol: f64) -> Verdict {
    sign_scan(samples.iter().map(|s| (s.r, aps3_value(s), s.scale())), tol)
}

/// Ellipticity form `d/dR [R (W1 + W2)] ≥ 0`.
pub fn check_aps3(model: &EnergyModel, grid: &Grid, tol: f64) -> Verdict {
    on_samples(model, grid, |s| aps3_from(s, tol))
}

/// `𝒲'(3+R²) = W1 + W2 > 0`, implied by APS3; a failure here means the
/// checkers disagree with each other.
pub fn fosdick_check(model: &EnergyModel, grid: &Grid, tol: f64) -> Verdict {
    on_samples(model, grid, |s| {
        if !aps3_from(s, tol).passed() {
            return Verdict::NotApplicable("APS3 does not hold".into());
        }
        let mut worst: Option<Witness> = None;
        for p in s {
            let v = p.w1() + p.w2();
            if v <= 0.0 && worst.is_none_or(|w| v < w.value) {
                worst = Some(Witness { at: p.r, value: v });
            }
        }
        worst.map_or(Verdict::Pass, Verdict::Fail)
    })
}

/// Result of the K1 fit `b(R) = W2 / (W1 + W2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K1Result {
    pub verdict: Verdict,
    /// Median of `b(R)`, reported when the verdict is a pass.
    pub b: Option<f64>,
    pub spread: f64,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn k1_from(samples: &[PathSample]) -> K1Result {
    let mut bs = Vec::with_capacity(samples.len());
    for s in samples {
        let den = s.w1() + s.w2();
        if den == 0.0 || !den.is_finite() {
            return K1Result {
                verdict: Verdict::NotApplicable(format!("W1 + W2 vanishes at R = {}", s.r)),
                b: None,
                spread: f64::NAN,
            };
        }
        bs.push((s.r, s.w2() / den));
    }
    let mut vals: Vec<f64> = bs.iter().map(|(_, b)| *b).collect();
    let med = median(&mut vals);
    let (at, dev) = bs
        .iter()
        .map(|(r, b)| (*r, (b - med).abs()))
        .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if dev < K1_SPREAD_TOL {
        K1Result {
            verdict: Verdict::Pass,
            b: Some(med),
            spread: dev,
        }
    } else {
        K1Result {
            verdict: Verdict::Fail(Witness { at, value: dev }),
            b: None,
            spread: dev,
        }
    }
}

/// Knowles' first condition: `b W1 + (b − 1) W2 = 0` along the path for a
/// constant `b`.
pub fn check_k1(model: &EnergyModel, grid: &Grid) -> K1Result {
    match path_samples(model, grid) {
        Ok(s) => k1_from(&s),
        Err(e) => K1Result {
            verdict: Verdict::NotApplicable(e.to_string()),
            b: None,
            spread: f64::NAN,
        },
    }
}

/// The terms of the K2 residual
/// `W11 + I1 W12 + W13 + (I1−1) W22 + W23 + ½ W2`.
pub fn k2_terms(s: &PathSample) -> [f64; 6] {
    let j = &s.partials;
    let i1 = 3.0 + s.r * s.r;
    [
        j.hess(0, 0),
        i1 * j.hess(0, 1),
        j.hess(0, 2),
        (i1 - 1.0) * j.hess(1, 1),
        j.hess(1, 2),
        0.5 * j.d(1),
    ]
}

pub fn k2_residual(s: &PathSample) -> f64 {
    k2_terms(s).iter().sum()
}

fn k2_scale(terms: &[f64]) -> f64 {
    terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0)
}

pub fn k2_from(model: &EnergyModel, samples: &[PathSample]) -> Verdict {
    if !model.is_compressible() {
        return Verdict::NotApplicable("incompressible-only model".into());
    }
    let mut worst: Option<(f64, Witness)> = None;
    for s in samples {
        let t = k2_terms(s);
        let res: f64 = t.iter().sum();
        let n = res.abs() / k2_scale(&t);
        if n >= K2_TOL && worst.is_none_or(|(m, _)| n > m) {
            worst = Some((n, Witness { at: s.r, value: res }));
        }
    }
    worst.map_or(Verdict::Pass, |(_, w)| Verdict::Fail(w))
}

/// Knowles' second condition (compressible case).
pub fn check_k2(model: &EnergyModel, grid: &Grid) -> Verdict {
    on_samples(model, grid, |s| k2_from(model, s))
}

/// Comparison of `q̃'(R²) − W2` (finite differences of the first
/// derivatives along the path) with twice the K2 residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K2Probe {
    pub verdict: Verdict,
    /// Largest normalized discrepancy between the two routes.
    pub max_discrepancy: f64,
    /// Largest normalized K2 residual seen by either route.
    pub max_residual: f64,
}

/// `q̃(x) = 2 W3 + 2 W1 + 2 (2 + x) W2` at `(3+x, 3+x, 1)`.
fn q_tilde(model: &EnergyModel, x: f64) -> Result<f64> {
    let j = model.invariant_jet([3.0 + x, 3.0 + x, 1.0])?;
    Ok(2.0 * j.d(2) + 2.0 * j.d(0) + 2.0 * (2.0 + x) * j.d(1))
}

pub fn k2_equivalence_probe(model: &EnergyModel, grid: &Grid) -> K2Probe {
    let na = |why: String| K2Probe {
        verdict: Verdict::NotApplicable(why),
        max_discrepancy: f64::NAN,
        max_residual: f64::NAN,
    };
    if !model.is_compressible() {
        return na("incompressible-only model".into());
    }
    let spectral = model.invariant_channel() == InvariantChannel::Spectral;
    let rows: Result<Vec<(f64, f64, f64)>> = grid
        .points
        .par_iter()
        .map(|r| {
            let s = PathSample::at(model, *r)?;
            let x = r * r;
            // absolute step: exponential models vary on an O(1) scale in x
            let mut h: f64 = 1e-3;
            if spectral {
                // stay on realizable invariants
                h = h.min(0.25 * x);
            }
            let err = std::cell::RefCell::new(None);
            let dq = fd_first_derivative_richardson(
                |y| {
                    q_tilde(model, y).unwrap_or_else(|e| {
                        err.borrow_mut().get_or_insert(e);
                        f64::NAN
                    })
                },
                x,
                h,
            );
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            let terms = k2_terms(&s);
            let lhs = dq - s.w2();
            let rhs = 2.0 * terms.iter().sum::<f64>();
            let scale = 2.0 * k2_scale(&terms);
            Ok((*r, (lhs - rhs).abs() / scale, lhs.abs().max(rhs.abs()) / scale))
        })
        .collect();
    let rows = match rows {
        Ok(r) => r,
        Err(e) => return na(e.to_string()),
    };
    let mut worst = (0.0, 0.0);
    let mut max_res: f64 = 0.0;
    for (r, d, res) in rows {
        if d > worst.1 {
            worst = (r, d);
        }
        max_res = max_res.max(res);
    }
    K2Probe {
        verdict: if worst.1 < K2_TOL {
            Verdict::Pass
        } else {
            Verdict::Fail(Witness {
                at: worst.0,
                value: worst.1,
            })
        },
        max_discrepancy: worst.1,
        max_residual: max_res,
    }
}

/// Coefficients of the Cauchy stress representation
/// `σ = β0 id + β1 B + β−1 B⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    /// Not defined for incompressible-only models.
    pub beta0: Option<f64>,
    pub beta1: f64,
    pub beta_m1: f64,
    pub holds: bool,
}

pub fn empirical_inequalities(model: &EnergyModel, at: InvariantTriple) -> Result<Empirical> {
    if !(at.i3 > 0.0) {
        return Err(Error::Domain {
            op: "sqrt",
            value: at.i3,
        });
    }
    let j = model.invariant_jet(at.as_array())?;
    let sq = at.i3.sqrt();
    let beta1 = 2.0 * j.d(0) / sq;
    let beta_m1 = -2.0 * sq * j.d(1);
    let beta0 = model
        .is_compressible()
        .then(|| 2.0 / sq * (at.i2 * j.d(1) + at.i3 * j.d(2)));
    let tol = DEFAULT_TOL * j.value().abs().max(1.0);
    let holds = beta0.is_none_or(|b| b <= tol) && beta1 > 0.0 && beta_m1 <= tol;
    Ok(Empirical {
        beta0,
        beta1,
        beta_m1,
        holds,
    })
}

/// Empirical inequalities at the reference state and on every path sample.
pub fn empirical_on_path(model: &EnergyModel, grid: &Grid) -> Verdict {
    let pts = std::iter::once(0.0).chain(grid.points.iter().copied());
    for r in pts {
        match empirical_inequalities(model, InvariantTriple::on_shear_path(r)) {
            Ok(e) if e.holds => {}
            Ok(e) => {
                let value = if e.beta1 <= 0.0 {
                    e.beta1
                } else if e.beta_m1 > 0.0 {
                    e.beta_m1
                } else {
                    e.beta0.unwrap_or(f64::NAN)
                };
                return Verdict::Fail(Witness { at: r, value });
            }
            Err(e) => return Verdict::NotApplicable(e.to_string()),
        }
    }
    Verdict::Pass
}

/// Residual stress and infinitesimal shear modulus at `F = id`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceState {
    /// `W1 + 2 W2 + W3` at `(3, 3, 1)`.
    pub residual_stress: f64,
    /// `β1 − β−1` at `(3, 3, 1)`.
    pub shear_modulus: f64,
}

pub fn reference_state(model: &EnergyModel) -> Result<ReferenceState> {
    let j = model.invariant_jet([3.0, 3.0, 1.0])?;
    let e = empirical_inequalities(model, InvariantTriple::REFERENCE)?;
    Ok(ReferenceState {
        residual_stress: j.d(0) + 2.0 * j.d(1) + j.d(2),
        shear_modulus: e.beta1 - e.beta_m1,
    })
}

/// Cauchy shear stress `σ12` in simple shear and its derivative in `γ`,
/// from `σ = 2/J [(W1 + I1 W2) B − W2 B² + I3 W3 id]`.
pub fn cauchy_shear_stress(model: &EnergyModel, gamma: f64) -> Result<(f64, f64)> {
    let f = simple_shear_gradient(gamma);
    let b = f.left_cauchy_green();
    let b2 = b * b;
    // dF/dγ = e1 ⊗ e2
    let mut df = Matrix3::ZERO;
    df.0[0][1] = 1.0;
    let db = df * f.transpose() + f * df.transpose();
    let db2 = db * b + b * db;
    let i1 = b.trace();
    let di1 = db.trace();
    let j = model.invariant_jet([i1, 0.5 * (i1 * i1 - b2.trace()), b.det()])?;
    let di2 = i1 * di1 - 0.5 * db2.trace();
    let (w1, w2) = (j.d(0), j.d(1));
    let dw = |a: usize| j.hess(a, 0) * di1 + j.hess(a, 1) * di2;
    let (dw1, dw2) = (dw(0), dw(1));
    let sigma = 2.0 * ((w1 + i1 * w2) * b[(0, 1)] - w2 * b2[(0, 1)]);
    let dsigma = 2.0
        * ((dw1 + di1 * w2 + i1 * dw2) * b[(0, 1)] + (w1 + i1 * w2) * db[(0, 1)]
            - dw2 * b2[(0, 1)]
            - w2 * db2[(0, 1)]);
    Ok((sigma, dsigma))
}

/// Monotonicity of `γ ↦ σ12(γ)` on the grid (with `γ = R`).
pub fn shear_stress_monotonicity(model: &EnergyModel, grid: &Grid, tol: f64) -> Verdict {
    let rows: Result<Vec<(f64, f64, f64)>> = grid
        .points
        .par_iter()
        .map(|g| {
            let (_, ds) = cauchy_shear_stress(model, *g)?;
            let w = model.energy([3.0 + g * g, 3.0 + g * g, 1.0])?;
            Ok((*g, ds, w.abs().max(1.0)))
        })
        .collect();
    match rows {
        Ok(r) => sign_scan(r.into_iter(), tol),
        Err(e) => Verdict::NotApplicable(e.to_string()),
    }
}

/// `dσ12/dγ` at `γ = 0`, which must be positive.
pub fn local_shear_monotonicity(model: &EnergyModel) -> (Verdict, f64) {
    match cauchy_shear_stress(model, 0.0) {
        Ok((_, mu)) if mu > 0.0 => (Verdict::Pass, mu),
        Ok((_, mu)) => (Verdict::Fail(Witness { at: 0.0, value: mu }), mu),
        Err(e) => (Verdict::NotApplicable(e.to_string()), f64::NAN),
    }
}

/// `h*(I) = (β1 − β−1)` on the path with `I3 = 1`.
fn h_star(model: &EnergyModel, i: f64) -> Result<f64> {
    let j = model.invariant_jet([i, i, 1.0])?;
    Ok(2.0 * (j.d(0) + j.d(1)))
}

/// `d/dγ [γ h*(3+γ²)] ≥ 0` by finite differences of the stress
/// coefficients.
pub fn pucci_hstar_probe(model: &EnergyModel, grid: &Grid, tol: f64) -> Verdict {
    let rows: Result<Vec<(f64, f64, f64)>> = grid
        .points
        .par_iter()
        .map(|g| {
            let err = std::cell::RefCell::new(None);
            let d = fd_first_derivative_richardson(
                |t| {
                    h_star(model, 3.0 + t * t).map(|h| t * h).unwrap_or_else(|e| {
                        err.borrow_mut().get_or_insert(e);
                        f64::NAN
                    })
                },
                *g,
                1e-3 * g.max(1.0),
            );
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            let w = model.energy([3.0 + g * g, 3.0 + g * g, 1.0])?;
            Ok((*g, d, w.abs().max(1.0)))
        })
        .collect();
    match rows {
        Ok(r) => sign_scan(r.into_iter(), tol),
        Err(e) => Verdict::NotApplicable(e.to_string()),
    }
}

/// Outcome of the randomized convexity test along rank-one lines
/// `t ↦ W(F + t e3 ⊗ η)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApsPlus {
    pub verdict: Verdict,
    pub seed: u64,
    pub trials: usize,
    pub evaluated: usize,
    /// Samples dropped because `det F` left `(0, ∞)`.
    pub skipped: usize,
}

fn aps_plus_invariants(u: [f64; 3], eta: [f64; 3], t: f64) -> [Jet2; 3] {
    let tj = Jet2::variable(t, 0, 1);
    let row = [
        tj.scale(eta[0]) + u[0],
        tj.scale(eta[1]) + u[1],
        tj.scale(eta[2]) + (1.0 + u[2]),
    ];
    // F = [[1,0,0],[0,1,0],row]; B = F Fᵀ
    let one = Jet2::constant(1.0);
    let zero = Jet2::constant(0.0);
    let f = [[one, zero, zero], [zero, one, zero], row];
    let mut b = [[zero; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = f[i][0] * f[j][0] + f[i][1] * f[j][1] + f[i][2] * f[j][2];
        }
    }
    let i1 = b[0][0] + b[1][1] + b[2][2];
    let mut tr_b2 = zero;
    for i in 0..3 {
        for j in 0..3 {
            tr_b2 += b[i][j] * b[j][i];
        }
    }
    let i2 = (i1 * i1 - tr_b2).scale(0.5);
    let i3 = row[2] * row[2];
    [i1, i2, i3]
}

/// Convexity along random rank-one lines of the form `F + t (0,0,1)ᵀ ⊗ η`
/// inside the APS⁺ family. A quarter of the trials are radial lines in the
/// planar APS family, which is where APS-convexity itself lives.
pub fn aps_plus_convexity(model: &EnergyModel, trials: usize, seed: u64, tol: f64) -> ApsPlus {
    let planar_only = !model.is_compressible();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(trials);
    for k in 0..trials {
        let mut u: [f64; 3] = [
            rng.random_range(-4.0..4.0),
            rng.random_range(-4.0..4.0),
            rng.random_range(-0.6..1.5),
        ];
        let mut eta = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        if planar_only || k % 4 == 0 {
            u[2] = 0.0;
            eta[2] = 0.0;
        }
        if k % 4 == 0 {
            let n = (u[0] * u[0] + u[1] * u[1]).sqrt().max(1e-12);
            eta = [u[0] / n, u[1] / n, 0.0];
        }
        cases.push((u, eta));
    }
    const TS: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];
    let rows: Vec<Result<(usize, usize, Option<(f64, Witness)>)>> = cases
        .par_iter()
        .enumerate()
        .map(|(k, (u, eta))| {
            let mut evaluated = 0;
            let mut skipped = 0;
            let mut worst: Option<(f64, Witness)> = None;
            for t in TS {
                if 1.0 + u[2] + t * eta[2] <= 0.05 {
                    skipped += 1;
                    continue;
                }
                let inv = aps_plus_invariants(*u, *eta, t);
                let w = model.eval_invariants(&inv)?;
                evaluated += 1;
                let scale = w.value().abs().max(1.0);
                let d2 = w.hess(0, 0);
                if d2 < -tol * scale && worst.is_none_or(|(n, _)| d2 / scale < n) {
                    worst = Some((
                        d2 / scale,
                        Witness {
                            at: k as f64,
                            value: d2,
                        },
                    ));
                }
            }
            Ok((evaluated, skipped, worst))
        })
        .collect();
    let mut evaluated = 0;
    let mut skipped = 0;
    let mut worst: Option<(f64, Witness)> = None;
    for r in rows {
        match r {
            Ok((e, s, w)) => {
                evaluated += e;
                skipped += s;
                if let Some((n, wit)) = w {
                    if worst.is_none_or(|(m, _)| n < m) {
                        worst = Some((n, wit));
                    }
                }
            }
            Err(e) => {
                return ApsPlus {
                    verdict: Verdict::NotApplicable(e.to_string()),
                    seed,
                    trials,
                    evaluated,
                    skipped,
                }
            }
        }
    }
    ApsPlus {
        verdict: worst.map_or(Verdict::Pass, |(_, w)| Verdict::Fail(w)),
        seed,
        trials,
        evaluated,
        skipped,
    }
}

/// Tension–compression symmetry checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcSymmetry {
    /// `W(I1, I2, 1) = W(I2, I1, 1)` on realizable isochoric pairs.
    pub invariant: Verdict,
    /// `W(λ) = W(1/λ)` on principal spectra, for models with an independent
    /// principal form.
    pub principal: Option<Verdict>,
    /// When symmetric, whether K1 holds with `b = 1/2`.
    pub k1_half: Option<bool>,
}

/// Isochoric spectra `(a, b, 1/(ab))` derived from the grid.
fn tc_spectra(grid: &Grid) -> Vec<[f64; 3]> {
    grid.points
        .iter()
        .map(|r| {
            let a = (1.0 + r).powi(2);
            let b = 1.0 / (1.0 + r / 3.0);
            [a, b, 1.0 / (a * b)]
        })
        .collect()
}

pub fn tc_symmetry(model: &EnergyModel, grid: &Grid, tol: f64) -> TcSymmetry {
    let spectra = tc_spectra(grid);
    let compare = |f: &dyn Fn(&[f64; 3]) -> Result<(f64, f64)>| -> Verdict {
        let mut worst: Option<(f64, Witness)> = None;
        for (k, l) in spectra.iter().enumerate() {
            match f(l) {
                Ok((a, b)) => {
                    let d = (a - b).abs() / a.abs().max(b.abs()).max(1.0);
                    if d > tol * 1e3 && worst.is_none_or(|(m, _)| d > m) {
                        worst = Some((
                            d,
                            Witness {
                                at: grid.points[k],
                                value: a - b,
                            },
                        ));
                    }
                }
                Err(e) => return Verdict::NotApplicable(e.to_string()),
            }
        }
        worst.map_or(Verdict::Pass, |(_, w)| Verdict::Fail(w))
    };
    let invariant = compare(&|l| {
        let i1 = l[0] + l[1] + l[2];
        let i2 = l[0] * l[1] + l[1] * l[2] + l[0] * l[2];
        Ok((model.energy([i1, i2, 1.0])?, model.energy([i2, i1, 1.0])?))
    });
    let principal = model.has_native_principal_form().then(|| {
        compare(&|l| {
            let a = model.eval_principal(&l.map(Jet2::constant))?.value();
            let b = model.eval_principal(&l.map(|x| Jet2::constant(1.0 / x)))?.value();
            Ok((a, b))
        })
    });
    let symmetric = invariant.passed() && principal.as_ref().is_none_or(|p| p.passed());
    let k1_half = symmetric.then(|| {
        let k = check_k1(model, grid);
        k.b.is_some_and(|b| (b - 0.5).abs() < K1_SPREAD_TOL)
    });
    TcSymmetry {
        invariant,
        principal,
        k1_half,
    }
}

/// Smallest `α` for which the counterexample energy loses APS-convexity on
/// the grid, to within `resolution`.
pub fn alpha_threshold_bisect(mu: f64, grid: &Grid, tol: f64, resolution: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::ParameterRange {
            name: "mu".into(),
            value: mu,
            reason: "must be positive",
        });
    }
    let fails = |a: f64| -> Result<bool> { Ok(check_aps2(&pucci_energy(mu, a)?, grid, tol).failed()) };
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-9);
    if fails(lo)? || !fails(hi)? {
        return Err(Error::InvalidArgument(
            "APS-convexity does not change along (0, 1) on this grid".into(),
        ));
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if fails(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Settings shared by all checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub grid: Grid,
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            grid: Grid::default(),
            tol: DEFAULT_TOL,
            seed: 0x5eed,
            trials: 256,
        }
    }
}

/// All verdicts for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub model: String,
    pub volumetric: Option<String>,
    pub aps1: Verdict,
    pub aps2: Verdict,
    pub aps3: Verdict,
    pub fosdick: Verdict,
    pub shear_monotonicity: Verdict,
    pub hstar_probe: Verdict,
    pub k1: K1Result,
    pub k2: Verdict,
    pub k2_probe: K2Probe,
    pub empirical: Verdict,
    pub reference: Option<ReferenceState>,
    pub local_shear: Verdict,
    pub local_shear_modulus: f64,
    pub aps_plus: ApsPlus,
    pub tc: TcSymmetry,
    pub grid_points: usize,
    pub grid_max: f64,
}

impl ConditionReport {
    /// APS-convexity in its sharp form.
    pub fn aps_convex(&self) -> bool {
        self.aps2.passed()
    }

    /// Named verdicts in report order.
    pub fn rows(&self) -> Vec<(&'static str, &Verdict)> {
        vec![
            ("aps1", &self.aps1),
            ("aps2", &self.aps2),
            ("aps3", &self.aps3),
            ("fosdick", &self.fosdick),
            ("shear-monotonicity", &self.shear_monotonicity),
            ("hstar-probe", &self.hstar_probe),
            ("k1", &self.k1.verdict),
            ("k2", &self.k2),
            ("k2-probe", &self.k2_probe.verdict),
            ("empirical", &self.empirical),
            ("local-shear", &self.local_shear),
            ("aps-plus", &self.aps_plus.verdict),
            ("tc-symmetry", &self.tc.invariant),
        ]
    }
}

pub fn report(model: &EnergyModel, cfg: &CheckConfig) -> ConditionReport {
    let grid = &cfg.grid;
    let tol = cfg.tol;
    let samples = path_samples(model, grid);
    let (aps2, aps3, k1, k2) = match &samples {
        Ok(s) => (aps2_from(s, tol), aps3_from(s, tol), k1_from(s), k2_from(model, s)),
        Err(e) => {
            let na = Verdict::NotApplicable(e.to_string());
            (
                na.clone(),
                na.clone(),
                K1Result {
                    verdict: na.clone(),
                    b: None,
                    spread: f64::NAN,
                },
                na,
            )
        }
    };
    let (local_shear, local_shear_modulus) = local_shear_monotonicity(model);
    ConditionReport {
        model: model.to_string(),
        volumetric: model.volumetric_note(),
        aps1: check_aps1(model, grid, tol),
        aps2,
        aps3,
        fosdick: fosdick_check(model, grid, tol),
        shear_monotonicity: shear_stress_monotonicity(model, grid, tol),
        hstar_probe: pucci_hstar_probe(model, grid, tol),
        k1,
        k2,
        k2_probe: k2_equivalence_probe(model, grid),
        empirical: empirical_on_path(model, grid),
        reference: reference_state(model).ok(),
        local_shear,
        local_shear_modulus,
        aps_plus: aps_plus_convexity(model, cfg.trials, cfg.seed, tol),
        tc: tc_symmetry(model, grid, tol),
        grid_points: grid.len(),
        grid_max: grid.r_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_layout() {
        let g = Grid::default();
        assert_eq!(g.len(), 200);
        assert!(g.points.contains(&3.0));
        assert!(g.points.contains(&10.0));
        assert_eq!(g.points[0], 1e-3);
        assert!(g.points.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn median_is_robust() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn sign_scan_picks_most_negative() {
        let v = sign_scan(
            [(1.0, 1.0, 1.0), (2.0, -3.0, 1.0), (3.0, -2.0, 1.0)].into_iter(),
            1e-9,
        );
        assert_eq!(v, Verdict::Fail(Witness { at: 2.0, value: -3.0 }));
    }

    #[test]
    fn cauchy_shear_stress_is_linear_for_mooney_rivlin_on_the_path() {
        let mr = EnergyModel::by_name("mooney-rivlin").unwrap();
        for g in [0.0f64, 0.5, 2.0, 7.0] {
            let (s, ds) = cauchy_shear_stress(&mr, g).unwrap();
            assert!((s - g).abs() < 1e-12 * g.max(1.0));
            assert!((ds - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn aps_plus_family_reduces_to_aps() {
        let inv = aps_plus_invariants([0.3f64, 0.4, 0.0], [0.0, 0.0, 0.0], 0.0);
        assert!((inv[0].value() - 3.25).abs() < 1e-15);
        assert!((inv[1].value() - 3.25).abs() < 1e-15);
        assert_eq!(inv[2].value(), 1.0);
        let inv = aps_plus_invariants([1.0, 2.0, 0.5], [0.0, 0.0, 0.0], 0.0);
        assert_eq!(inv[2].value(), 2.25);
    }
}
