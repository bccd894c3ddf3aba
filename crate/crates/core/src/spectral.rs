//! Spectral functions of `B` expressed through its invariants.
//!
//! Energies written in principal stretches (Hencky and relatives) need
//! derivatives with respect to `(I1, I2, I3)`. Going through the eigenvalues
//! directly divides by eigenvalue gaps, which is hopeless near the reference
//! state where all three coincide. Instead a sum `S = Σ g(λ_k)` over the roots
//! of `P(z) = z³ − I1 z² + I2 z − I3` is written as a contour integral
//!
//! ```text
//! S      = 1/(2πi) ∮ g(z) P'(z)/P(z) dz
//! ∂S/∂Ia = 1/(2πi) ∮ g'(z) q_a(z)/P(z) dz
//! ∂²S/∂Ia∂Ib = 1/(2πi) ∮ g'(z) q_a(z) q_b(z)/P(z)² dz,   q = (z², −z, 1)
//! ```
//!
//! whose integrands are smooth in the invariants. Clusters of nearby roots
//! share one circle, so nothing is ever divided by a small gap.

use num_complex::Complex64;

use crate::error::{Error, Result};

const NODES: usize = 128;
/// Circle radius as a fraction of the distance to the nearest outside
/// singularity.
const RADIUS_FRACTION: f64 = 0.6;
/// A cluster is accepted when its half-width stays below this fraction of
/// the circle radius.
const SPREAD_FRACTION: f64 = 0.5;

fn spectrum_error(inv: [f64; 3]) -> Error {
    Error::Spectrum {
        i1: inv[0],
        i2: inv[1],
        i3: inv[2],
    }
}

/// Eigenvalues of a symmetric positive definite tensor with the given
/// invariants, ascending.
///
/// Nearly coincident roots are only accurate to about the cube root of the
/// machine epsilon; callers needing derivatives use [`spectral_sum`].
pub fn eigenvalues_from_invariants(inv: [f64; 3]) -> Result<[f64; 3]> {
    let [i1, i2, i3] = inv;
    if !(i1 > 0.0 && i2 > 0.0 && i3 > 0.0) || !inv.iter().all(|v| v.is_finite()) {
        return Err(spectrum_error(inv));
    }
    let shift = i1 / 3.0;
    let p = i2 - i1 * i1 / 3.0;
    let q = -2.0 * i1 * i1 * i1 / 27.0 + i1 * i2 / 3.0 - i3;
    let scale = i1 * i1;
    let mut roots = if p >= -1e-14 * scale {
        if p > 1e-12 * scale {
            return Err(spectrum_error(inv));
        }
        [shift; 3]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = 3.0 * q / (p * m);
        if arg.abs() > 1.0 + 1e-7 {
            return Err(spectrum_error(inv));
        }
        let theta = arg.clamp(-1.0, 1.0).acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        [0.0, 1.0, 2.0].map(|k| shift + m * (theta - tau * k).cos())
    };
    for r in roots.iter_mut() {
        // Newton polish; harmless for clustered roots
        for _ in 0..3 {
            let f = ((*r - i1) * *r + i2) * *r - i3;
            let df = (3.0 * *r - 2.0 * i1) * *r + i2;
            if df.abs() < 1e-8 * scale {
                break;
            }
            let step = f / df;
            if !step.is_finite() || step.abs() > 1e-3 * r.abs() {
                break;
            }
            *r -= step;
        }
    }
    roots.sort_by(f64::total_cmp);
    if roots[0] <= 0.0 {
        return Err(spectrum_error(inv));
    }
    Ok(roots)
}

#[derive(Debug, Clone, Copy)]
struct Circle {
    center: f64,
    radius: f64,
    count: usize,
}

/// Circles around groups of consecutive sorted roots. Every partition of
/// three sorted roots into contiguous groups is tried; the admissible one
/// with the largest smallest radius wins.
fn circles(roots: [f64; 3]) -> Vec<Circle> {
    let partitions: [&[(usize, usize)]; 4] = [
        &[(0, 2)],
        &[(0, 1), (2, 2)],
        &[(0, 0), (1, 2)],
        &[(0, 0), (1, 1), (2, 2)],
    ];
    let mut best: Option<(f64, Vec<Circle>)> = None;
    for groups in partitions {
        let mut out = Vec::with_capacity(groups.len());
        let mut ok = true;
        for &(lo, hi) in groups {
            let center = 0.5 * (roots[lo] + roots[hi]);
            let spread = 0.5 * (roots[hi] - roots[lo]);
            let mut reach = center;
            for (k, r) in roots.iter().enumerate() {
                if k < lo || k > hi {
                    reach = reach.min((r - center).abs());
                }
            }
            let radius = RADIUS_FRACTION * reach;
            if spread > SPREAD_FRACTION * radius || radius <= 0.0 {
                ok = false;
                break;
            }
            out.push(Circle {
                center,
                radius,
                count: hi - lo + 1,
            });
        }
        if !ok {
            continue;
        }
        let score = out.iter().map(|c| c.radius).fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, out));
        }
    }
    best.map(|(_, c)| c).unwrap_or_default()
}

/// Value, gradient and packed Hessian with respect to `(I1, I2, I3)` of
/// `Σ g(λ_k)`, the sum running over the eigenvalues of `B`.
///
/// `g` returns `(g(z), g'(z))` and must be analytic on the open right half
/// plane.
pub fn spectral_sum(
    inv: [f64; 3],
    g: impl Fn(Complex64) -> (Complex64, Complex64),
) -> Result<(f64, [f64; 3], [f64; 6])> {
    let roots = eigenvalues_from_invariants(inv)?;
    let [i1, i2, i3] = inv;
    let cs = circles(roots);
    if cs.is_empty() {
        return Err(spectrum_error(inv));
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut grad = [Complex64::new(0.0, 0.0); 3];
    let mut hess = [Complex64::new(0.0, 0.0); 6];
    for c in &cs {
        let mut winding = Complex64::new(0.0, 0.0);
        for j in 0..NODES {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / NODES as f64;
            let e = Complex64::from_polar(1.0, theta);
            let z = c.center + c.radius * e;
            // dz / (2πi) = r e^{iθ} dθ / 2π
            let w = e * (c.radius / NODES as f64);
            let p = ((z - i1) * z + i2) * z - i3;
            let dp = (3.0 * z - 2.0 * i1) * z + i2;
            let inv_p = p.inv();
            let (g0, g1) = g(z);
            winding += dp * inv_p * w;
            value += g0 * dp * inv_p * w;
            let q = [z * z, -z, Complex64::new(1.0, 0.0)];
            let base = g1 * inv_p * w;
            for a in 0..3 {
                grad[a] += base * q[a];
            }
            let base2 = base * inv_p;
            let mut k = 0;
            for a in 0..3 {
                for b in a..3 {
                    hess[k] += base2 * q[a] * q[b];
                    k += 1;
                }
            }
        }
        if (winding.re - c.count as f64).abs() > 1e-6 {
            return Err(spectrum_error(inv));
        }
    }
    Ok((value.re, grad.map(|v| v.re), hess.map(|v| v.re)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invariants_of(l: [f64; 3]) -> [f64; 3] {
        [
            l[0] + l[1] + l[2],
            l[0] * l[1] + l[1] * l[2] + l[0] * l[2],
            l[0] * l[1] * l[2],
        ]
    }

    fn log_sq(z: Complex64) -> (Complex64, Complex64) {
        let l = z.ln();
        (l * l, 2.0 * l / z)
    }

    #[test]
    fn recovers_spectrum() {
        let l = [0.5, 2.0, 3.0];
        let r = eigenvalues_from_invariants(invariants_of(l)).unwrap();
        for (a, b) in r.iter().zip(l.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(eigenvalues_from_invariants([3.0, 3.0, 1.0]).unwrap(), [1.0; 3]);
        // I1 = I2 = 2, I3 = 1 has complex roots
        assert!(eigenvalues_from_invariants([2.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn value_matches_direct_sum() {
        for l in [[0.5, 2.0, 3.0], [1.0, 1.0, 1.0], [0.0098, 1.0, 102.0], [1.0 - 1e-4, 1.0, 1.0 + 1e-4]] {
            let (v, _, _) = spectral_sum(invariants_of(l), log_sq).unwrap();
            let direct: f64 = l.iter().map(|x| x.ln().powi(2)).sum();
            assert!((v - direct).abs() < 1e-12 * direct.max(1.0), "{l:?}: {v} vs {direct}");
        }
    }

    #[test]
    fn derivatives_match_differences_of_the_direct_sum() {
        // well separated spectrum: eigenvalues can be trusted directly
        let inv = invariants_of([0.7, 1.6, 2.9]);
        let direct = |x: [f64; 3]| -> f64 {
            eigenvalues_from_invariants(x)
                .unwrap()
                .iter()
                .map(|l| l.ln().powi(2))
                .sum()
        };
        let (_, g, h) = spectral_sum(inv, log_sq).unwrap();
        let step = 1e-4;
        for a in 0..3 {
            let mut p = inv;
            let mut m = inv;
            p[a] += step;
            m[a] -= step;
            let fd = (direct(p) - direct(m)) / (2.0 * step);
            assert!((fd - g[a]).abs() < 1e-7, "grad {a}: {fd} vs {}", g[a]);
            let (_, gp, _) = spectral_sum(p, log_sq).unwrap();
            let (_, gm, _) = spectral_sum(m, log_sq).unwrap();
            for b in 0..3 {
                let fd2 = (gp[b] - gm[b]) / (2.0 * step);
                let k = crate::diff::packed_index(a, b);
                assert!((fd2 - h[k]).abs() < 1e-6, "hess {a}{b}: {fd2} vs {}", h[k]);
            }
        }
    }

    #[test]
    fn smooth_through_coincident_roots() {
        // along simple shear the eigenvalues are (λ, 1/λ, 1) with
        // ln λ = 2 asinh(γ/2), so S = 2 (ln λ)²
        for gamma in [1e-3f64, 1e-2, 0.3, 2.0] {
            let x = gamma * gamma;
            let inv = [3.0 + x, 3.0 + x, 1.0];
            let (v, g, _) = spectral_sum(inv, log_sq).unwrap();
            let l = 2.0 * (gamma / 2.0).asinh();
            assert!((v - 2.0 * l * l).abs() < 1e-13 * (1.0 + v), "{gamma}");
            // d/dx along the path equals S1 + S2
            let dl_dx = 1.0 / (2.0 * gamma * (1.0 + x / 4.0).sqrt());
            let expect = 4.0 * l * dl_dx;
            assert!((g[0] + g[1] - expect).abs() < 1e-9 * expect.abs(), "{gamma}");
        }
        let (v, g, _) = spectral_sum([3.0, 3.0, 1.0], log_sq).unwrap();
        assert!(v.abs() < 1e-15);
        // with δ = λ−1, (ln λ)² = δ² − δ³ + O(δ⁴); writing Σδ² and Σδ³
        // through elementary symmetric functions of δ gives the linear part
        // I1 + I2 − 3 I3 at the identity
        for (a, b) in g.iter().zip([1.0, 1.0, -3.0]) {
            assert!((a - b).abs() < 1e-12, "{g:?}");
        }
    }
}
