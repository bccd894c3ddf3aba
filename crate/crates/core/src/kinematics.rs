//! Deformation gradients, Cauchy–Green tensors and their invariants for
//! anti-plane shear (APS), its three-dimensional extension APS⁺ and simple
//! shear.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::diff::Jet2;
use crate::error::{Error, Result};

/// Dense row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Index<(usize, usize)> for Matrix3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Matrix3 {
    pub const IDENTITY: Matrix3 = Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    pub const ZERO: Matrix3 = Matrix3([[0.0; 3]; 3]);

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Matrix3(rows)
    }

    pub fn transpose(&self) -> Matrix3 {
        let mut t = Matrix3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Cofactor matrix from the explicit 2×2 minors; `Cof F = det F · F⁻ᵀ`
    /// whenever F is invertible, but no inverse is formed.
    pub fn cofactor(&self) -> Matrix3 {
        let m = &self.0;
        let mut c = Matrix3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
                let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                c.0[i][j] = m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1];
            }
        }
        c
    }

    pub fn inverse(&self) -> Result<Matrix3> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Orientation { det });
        }
        Ok(self.cofactor().transpose().scale(1.0 / det))
    }

    pub fn scale(&self, s: f64) -> Matrix3 {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        out
    }

    /// Frobenius inner product `A : B`.
    pub fn dot(&self, other: &Matrix3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[i][j];
            }
        }
        s
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    /// Left Cauchy–Green tensor `B = F·Fᵀ`.
    pub fn left_cauchy_green(&self) -> Matrix3 {
        *self * self.transpose()
    }

    /// Right Cauchy–Green tensor `C = Fᵀ·F`.
    pub fn right_cauchy_green(&self) -> Matrix3 {
        self.transpose() * *self
    }

    pub fn max_abs_diff(&self, other: &Matrix3) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        m
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;
    fn mul(self, rhs: Matrix3) -> Matrix3 {
        let mut out = Matrix3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = s;
            }
        }
        out
    }
}

impl Add for Matrix3 {
    type Output = Matrix3;
    fn add(self, rhs: Matrix3) -> Matrix3 {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Matrix3 {
    type Output = Matrix3;
    fn sub(self, rhs: Matrix3) -> Matrix3 {
        self + rhs.scale(-1.0)
    }
}

/// The isotropic invariants `(I1, I2, I3)` of `B = F·Fᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantTriple {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl InvariantTriple {
    pub const REFERENCE: InvariantTriple = InvariantTriple {
        i1: 3.0,
        i2: 3.0,
        i3: 1.0,
    };

    pub fn new(i1: f64, i2: f64, i3: f64) -> Self {
        InvariantTriple { i1, i2, i3 }
    }

    /// The point `(3+R², 3+R², 1)` reached by every APS gradient of norm R.
    pub fn on_shear_path(r: f64) -> Self {
        let i = 3.0 + r * r;
        InvariantTriple::new(i, i, 1.0)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.i1, self.i2, self.i3]
    }
}

/// In-plane gradient `(u,x1, u,x2)` of an APS height function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApsGradient {
    pub alpha: f64,
    pub beta: f64,
}

impl ApsGradient {
    pub fn new(alpha: f64, beta: f64) -> Self {
        ApsGradient { alpha, beta }
    }

    /// γ² = α² + β².
    pub fn gamma_squared(&self) -> f64 {
        self.alpha * self.alpha + self.beta * self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_squared().sqrt()
    }
}

/// `F = ∇φ` of the APS map `(x1, x2, x3 + u)`: unit diagonal, `(α, β)` in
/// the third row.
pub fn aps_deformation_gradient(g: ApsGradient) -> Matrix3 {
    Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [g.alpha, g.beta, 1.0]])
}

/// Invariants of `B = F·Fᵀ`: `I1 = ‖F‖²`, `I2 = ‖Cof F‖²`, `I3 = (det F)²`.
pub fn invariants_of(f: &Matrix3) -> Result<InvariantTriple> {
    let det = f.det();
    if !(det > 0.0) {
        return Err(Error::Orientation { det });
    }
    Ok(InvariantTriple {
        i1: f.norm_squared(),
        i2: f.cofactor().norm_squared(),
        i3: det * det,
    })
}

/// Simple shear `x ↦ (x1 + γ x2, x2, x3)`.
pub fn simple_shear_gradient(gamma: f64) -> Matrix3 {
    let mut f = Matrix3::IDENTITY;
    f.0[0][1] = gamma;
    f
}

/// Closed-form spectrum of `B` for simple shear of amount γ:
/// `λ± = (2 + γ² ± γ√(4+γ²)) / 2` and 1, propagated through the jet.
///
/// `λ−` is formed as `1/λ+` to stay accurate for large shear.
pub fn simple_shear_eigenvalues(gamma: Jet2) -> (Jet2, Jet2, Jet2) {
    let g2 = gamma * gamma;
    let root = (g2 + 4.0).sqrt();
    let plus = (g2 + 2.0 + gamma * root) * 0.5;
    let minus = plus.recip();
    let one = Jet2::from_parts(1.0, [0.0; 3], [0.0; 6], gamma.nvars());
    (plus, minus, one)
}

/// `λ+ − 1` for simple shear, computed without cancellation.
pub fn simple_shear_excess(gamma: f64) -> f64 {
    0.5 * (gamma * gamma + gamma.abs() * (4.0 + gamma * gamma).sqrt())
}

/// APS⁺ gradient: unit upper block, `(u1, u2, 1+u3)` in the third row.
pub fn aps_plus_gradient(u1: f64, u2: f64, u3: f64) -> Result<Matrix3> {
    if !(1.0 + u3 > 0.0) {
        return Err(Error::Orientation { det: 1.0 + u3 });
    }
    Ok(Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [u1, u2, 1.0 + u3]]))
}

/// Closed-form cofactor of an APS⁺ gradient.
pub fn aps_plus_cofactor(u1: f64, u2: f64, u3: f64) -> Matrix3 {
    Matrix3([
        [1.0 + u3, 0.0, -u1],
        [0.0, 1.0 + u3, -u2],
        [0.0, 0.0, 1.0],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn aps_gradient_structure() {
        assert_eq!(
            aps_deformation_gradient(ApsGradient::new(0.0, 0.0)),
            Matrix3::IDENTITY
        );
        let f = aps_deformation_gradient(ApsGradient::new(1.0, 0.0));
        assert_eq!(f.0[2], [1.0, 0.0, 1.0]);
        assert_eq!(f.0[0], [1.0, 0.0, 0.0]);
        assert_eq!(f.0[1], [0.0, 1.0, 0.0]);
        let f = aps_deformation_gradient(ApsGradient::new(0.3, 0.4));
        assert_eq!(f.det(), 1.0);
    }

    #[test]
    fn invariant_examples() {
        let inv = invariants_of(&Matrix3::IDENTITY).unwrap();
        assert_eq!(inv, InvariantTriple::new(3.0, 3.0, 1.0));
        let inv = invariants_of(&aps_deformation_gradient(ApsGradient::new(0.6, 0.8))).unwrap();
        assert!((inv.i1 - 4.0).abs() < 1e-15);
        assert!((inv.i2 - 4.0).abs() < 1e-15);
        assert!((inv.i3 - 1.0).abs() < 1e-15);
        let inv = invariants_of(&simple_shear_gradient(2.0)).unwrap();
        assert_eq!(inv, InvariantTriple::new(7.0, 7.0, 1.0));
        let mut flip = Matrix3::IDENTITY;
        flip.0[2][2] = -1.0;
        assert!(matches!(invariants_of(&flip), Err(Error::Orientation { .. })));
    }

    #[test]
    fn i2_equals_trace_of_cofactor_of_b() {
        let f = Matrix3([[1.2, 0.3, -0.1], [0.05, 0.9, 0.4], [0.2, -0.3, 1.1]]);
        let b = f.left_cauchy_green();
        let inv = invariants_of(&f).unwrap();
        assert!((inv.i2 - b.cofactor().trace()).abs() < 1e-13);
        let tr_b2 = (b * b).trace();
        assert!((inv.i2 - 0.5 * (b.trace().powi(2) - tr_b2)).abs() < 1e-13);
        assert!((inv.i3 - b.det()).abs() < 1e-13);
    }

    #[test]
    fn simple_shear_b() {
        assert_eq!(simple_shear_gradient(0.0), Matrix3::IDENTITY);
        let f = simple_shear_gradient(1.0);
        let b = f.left_cauchy_green();
        assert_eq!(b.0[0][0], 2.0);
        assert_eq!(b.0[0][1], 1.0);
        assert_eq!(b.0[1][0], 1.0);
        assert_eq!(b.0[1][1], 1.0);
        assert_eq!(f.det(), 1.0);
    }

    #[test]
    fn simple_shear_spectrum() {
        let (p, m, o) = simple_shear_eigenvalues(Jet2::constant(0.0));
        assert_eq!((p.value(), m.value(), o.value()), (1.0, 1.0, 1.0));
        // λ² − 3λ + 1 = 0 at γ = 1, solved by bisection as an oracle
        let root = |lo: f64, hi: f64| {
            let (mut a, mut b) = (lo, hi);
            let f = |x: f64| x * x - 3.0 * x + 1.0;
            for _ in 0..200 {
                let c = 0.5 * (a + b);
                if f(a) * f(c) <= 0.0 {
                    b = c
                } else {
                    a = c
                }
            }
            0.5 * (a + b)
        };
        let (p, m, _) = simple_shear_eigenvalues(Jet2::constant(1.0));
        assert!((p.value() - root(2.0, 3.0)).abs() < 1e-12);
        assert!((m.value() - root(0.0, 1.0)).abs() < 1e-12);
        assert!((p.value() - 2.618034).abs() < 1e-6);
        assert!((m.value() - 0.381966).abs() < 1e-6);
    }

    #[test]
    fn aps_plus_examples() {
        let f = aps_plus_gradient(0.0, 0.0, 0.0).unwrap();
        assert_eq!(f, Matrix3::IDENTITY);
        assert_eq!(
            aps_plus_gradient(0.4, -0.2, 0.0).unwrap(),
            aps_deformation_gradient(ApsGradient::new(0.4, -0.2))
        );
        let f = aps_plus_gradient(1.0, 2.0, 0.5).unwrap();
        assert_eq!(f.det(), 1.5);
        assert!(aps_plus_gradient(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn excess_matches_eigenvalue() {
        for g in [1e-6, 1e-3, 0.5, 3.0, 40.0] {
            let (p, _, _) = simple_shear_eigenvalues(Jet2::constant(g));
            let e = simple_shear_excess(g);
            assert!((p.value() - 1.0 - e).abs() <= 1e-15 * p.value());
        }
    }

    proptest! {
        #[test]
        fn aps_invariants(alpha in -20.0f64..20.0, beta in -20.0f64..20.0) {
            let g = ApsGradient::new(alpha, beta);
            let inv = invariants_of(&aps_deformation_gradient(g)).unwrap();
            let expect = 3.0 + g.gamma_squared();
            prop_assert!((inv.i1 - expect).abs() <= 1e-14 * expect);
            prop_assert!((inv.i2 - expect).abs() <= 1e-14 * expect);
            prop_assert_eq!(inv.i3, 1.0);
        }

        #[test]
        fn aps_plus_minors(u1 in -5.0f64..5.0, u2 in -5.0f64..5.0, u3 in -0.9f64..5.0) {
            let f = aps_plus_gradient(u1, u2, u3).unwrap();
            prop_assert!((f.det() - (1.0 + u3)).abs() < 1e-12);
            let c = f.cofactor();
            prop_assert!(c.max_abs_diff(&aps_plus_cofactor(u1, u2, u3)) < 1e-12);
        }

        #[test]
        fn shear_spectrum_consistency(g in 0.0f64..50.0) {
            let (p, m, o) = simple_shear_eigenvalues(Jet2::variable(g, 0, 1));
            prop_assert!((p.value() * m.value() * o.value() - 1.0).abs() < 1e-12);
            let tr = p.value() + m.value() + o.value();
            prop_assert!((tr - (3.0 + g * g)).abs() < 1e-10 * (3.0 + g * g));
            // derivative of the trace is 2γ
            prop_assert!((p.d(0) + m.d(0) - 2.0 * g).abs() < 1e-9 * (1.0 + g));
        }
    }
}
