//! Second-order forward-mode differentiation.
//!
//! [`Jet2`] carries a value together with its gradient and (packed,
//! symmetric) Hessian with respect to up to three independent variables.
//! Every derivative consumed by the condition checkers flows through this
//! type; the finite-difference helpers at the bottom of the module are the
//! independent oracle used to validate it.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Maximum number of independent variables carried by a [`Jet2`].
pub const MAX_VARS: usize = 3;

/// Index into packed upper-triangular storage of a symmetric 3×3 matrix.
#[inline]
pub const fn packed_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// Value, gradient and symmetric Hessian of a scalar function of up to
/// three variables.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    value: f64,
    grad: [f64; 3],
    /// Upper triangle, row major: (0,0) (0,1) (0,2) (1,1) (1,2) (2,2).
    hess: [f64; 6],
    nvars: u8,
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.nvars as usize;
        f.debug_struct("Jet2")
            .field("value", &self.value)
            .field("grad", &&self.grad[..n])
            .field("hess", &self.hess)
            .finish()
    }
}

impl Default for Jet2 {
    fn default() -> Self {
        Jet2::constant(0.0)
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Jet2::constant(v)
    }
}

/// Seed `nvars` independent variables at the given values.
///
/// Entries beyond `nvars` are returned as constants.
pub fn seed(values: [f64; 3], nvars: usize) -> Result<[Jet2; 3]> {
    if !(1..=MAX_VARS).contains(&nvars) {
        return Err(Error::InvalidArgument(format!(
            "number of seeded variables must be in 1..=3, got {nvars}"
        )));
    }
    let mut out = [Jet2::constant(0.0); 3];
    for (k, v) in values.iter().enumerate() {
        out[k] = if k < nvars {
            Jet2::variable(*v, k, nvars)
        } else {
            Jet2 {
                nvars: nvars as u8,
                ..Jet2::constant(*v)
            }
        };
    }
    Ok(out)
}

impl Jet2 {
    pub const fn constant(value: f64) -> Self {
        Jet2 {
            value,
            grad: [0.0; 3],
            hess: [0.0; 6],
            nvars: 1,
        }
    }

    /// The `k`-th independent variable of an `nvars`-variable jet.
    ///
    /// # Panics
    /// If `k >= nvars` or `nvars > 3`.
    pub fn variable(value: f64, k: usize, nvars: usize) -> Self {
        assert!(k < nvars && nvars <= MAX_VARS, "bad jet seed {k}/{nvars}");
        let mut grad = [0.0; 3];
        grad[k] = 1.0;
        Jet2 {
            value,
            grad,
            hess: [0.0; 6],
            nvars: nvars as u8,
        }
    }

    /// Builds a jet from raw parts. The Hessian is given packed.
    pub fn from_parts(value: f64, grad: [f64; 3], hess: [f64; 6], nvars: usize) -> Self {
        Jet2 {
            value,
            grad,
            hess,
            nvars: nvars.clamp(1, MAX_VARS) as u8,
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn grad(&self) -> [f64; 3] {
        self.grad
    }

    #[inline]
    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[packed_index(i, j)]
    }

    #[inline]
    pub fn hess_packed(&self) -> [f64; 6] {
        self.hess
    }

    /// Full (unpacked) Hessian.
    pub fn hess_matrix(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.hess(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn is_constant(&self) -> bool {
        self.grad.iter().all(|g| *g == 0.0) && self.hess.iter().all(|h| *h == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().all(|h| h.is_finite())
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value`.
    ///
    /// Terms multiplying a zero seed are skipped so that infinite derivatives
    /// of constants (e.g. `sqrt` at zero) do not poison the result.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        let mut grad = [0.0; 3];
        for (g, s) in grad.iter_mut().zip(self.grad.iter()) {
            if *s != 0.0 {
                *g = f1 * s;
            }
        }
        let mut hess = [0.0; 6];
        for i in 0..3 {
            for j in i..3 {
                let k = packed_index(i, j);
                let mut h = 0.0;
                if self.hess[k] != 0.0 {
                    h += f1 * self.hess[k];
                }
                let gg = self.grad[i] * self.grad[j];
                if gg != 0.0 {
                    h += f2 * gg;
                }
                hess[k] = h;
            }
        }
        Jet2 {
            value: f0,
            grad,
            hess,
            nvars: self.nvars,
        }
    }

    /// Composes an outer function, known through its value, gradient and
    /// packed Hessian at `inner`'s values, with three inner jets.
    pub fn compose(value: f64, grad: [f64; 3], hess: [f64; 6], inner: &[Jet2; 3]) -> Jet2 {
        let nvars = inner.iter().map(|j| j.nvars).max().unwrap_or(1);
        let mut out = Jet2 {
            value,
            grad: [0.0; 3],
            hess: [0.0; 6],
            nvars,
        };
        for a in 0..3 {
            if grad[a] == 0.0 {
                continue;
            }
            for i in 0..3 {
                out.grad[i] += grad[a] * inner[a].grad[i];
            }
            for k in 0..6 {
                out.hess[k] += grad[a] * inner[a].hess[k];
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                let hab = hess[packed_index(a, b)];
                if hab == 0.0 {
                    continue;
                }
                for i in 0..3 {
                    for j in i..3 {
                        out.hess[packed_index(i, j)] += hab * inner[a].grad[i] * inner[b].grad[j];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet2 {
        let mut out = *self;
        out.value *= s;
        out.grad.iter_mut().for_each(|g| *g *= s);
        out.hess.iter_mut().for_each(|h| *h *= s);
        out
    }

    /// `a·self + b·other`.
    pub fn mix(&self, a: f64, other: &Jet2, b: f64) -> Jet2 {
        self.scale(a) + other.scale(b)
    }

    pub fn recip(&self) -> Jet2 {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn try_recip(&self) -> Result<Jet2> {
        if self.value == 0.0 {
            return Err(Error::Domain {
                op: "div",
                value: self.value,
            });
        }
        Ok(self.recip())
    }

    pub fn try_div(&self, rhs: &Jet2) -> Result<Jet2> {
        Ok(*self * rhs.try_recip()?)
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn try_exp(&self) -> Result<Jet2> {
        let out = self.exp();
        if !out.value.is_finite() {
            return Err(Error::Domain {
                op: "exp",
                value: self.value,
            });
        }
        Ok(out)
    }

    /// Natural logarithm; the caller guarantees a positive value.
    pub fn ln(&self) -> Jet2 {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn try_ln(&self) -> Result<Jet2> {
        if !(self.value > 0.0) {
            return Err(Error::Domain {
                op: "log",
                value: self.value,
            });
        }
        Ok(self.ln())
    }

    pub fn sqrt(&self) -> Jet2 {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn try_sqrt(&self) -> Result<Jet2> {
        if !(self.value > 0.0) {
            return Err(Error::Domain {
                op: "sqrt",
                value: self.value,
            });
        }
        Ok(self.sqrt())
    }

    pub fn powi(&self, n: i32) -> Jet2 {
        let v = self.value;
        let nf = n as f64;
        let f1 = if n == 0 { 0.0 } else { nf * v.powi(n - 1) };
        let f2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * v.powi(n - 2)
        };
        self.chain(v.powi(n), f1, f2)
    }

    /// `self^p` for a constant real exponent.
    pub fn powf(&self, p: f64) -> Jet2 {
        let v = self.value;
        if p == 0.0 {
            return Jet2 {
                nvars: self.nvars,
                ..Jet2::constant(1.0)
            };
        }
        if p == 1.0 {
            return *self;
        }
        let f1 = p * v.powf(p - 1.0);
        let f2 = if p == 2.0 {
            2.0
        } else {
            p * (p - 1.0) * v.powf(p - 2.0)
        };
        self.chain(v.powf(p), f1, f2)
    }

    /// `self^rhs`; a constant exponent allows negative bases with integer
    /// exponents, otherwise the base must be positive.
    pub fn try_pow(&self, rhs: &Jet2) -> Result<Jet2> {
        let err = Error::Domain {
            op: "pow",
            value: self.value,
        };
        if rhs.is_constant() {
            let p = rhs.value;
            if self.value < 0.0 && p.fract() != 0.0 {
                return Err(err);
            }
            if self.value == 0.0 && p < 0.0 {
                return Err(err);
            }
            let mut out = self.powf(p);
            out.nvars = out.nvars.max(rhs.nvars);
            if !out.value.is_finite() {
                return Err(err);
            }
            return Ok(out);
        }
        if !(self.value > 0.0) {
            return Err(err);
        }
        let mut out = (*rhs * self.ln()).exp();
        // keep the value slot identical to the real-valued evaluation
        out.value = self.value.powf(rhs.value);
        if !out.is_finite() {
            return Err(err);
        }
        Ok(out)
    }

    pub fn abs_value(&self) -> f64 {
        self.value.abs()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        self.value += rhs.value;
        for i in 0..3 {
            self.grad[i] += rhs.grad[i];
        }
        for k in 0..6 {
            self.hess[k] += rhs.hess[k];
        }
        self.nvars = self.nvars.max(rhs.nvars);
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out -= rhs;
        out
    }
}

impl SubAssign for Jet2 {
    fn sub_assign(&mut self, rhs: Jet2) {
        self.value -= rhs.value;
        for i in 0..3 {
            self.grad[i] -= rhs.grad[i];
        }
        for k in 0..6 {
            self.hess[k] -= rhs.hess[k];
        }
        self.nvars = self.nvars.max(rhs.nvars);
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (self.value, rhs.value);
        let mut out = Jet2 {
            value: a * b,
            grad: [0.0; 3],
            hess: [0.0; 6],
            nvars: self.nvars.max(rhs.nvars),
        };
        for i in 0..3 {
            out.grad[i] = a * rhs.grad[i] + b * self.grad[i];
        }
        for i in 0..3 {
            for j in i..3 {
                let k = packed_index(i, j);
                out.hess[k] = a * rhs.hess[k]
                    + b * self.hess[k]
                    + self.grad[i] * rhs.grad[j]
                    + rhs.grad[i] * self.grad[j];
            }
        }
        out
    }
}

impl MulAssign for Jet2 {
    fn mul_assign(&mut self, rhs: Jet2) {
        *self = *self * rhs;
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self.scale(1.0 / rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        -rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        rhs.recip().scale(self)
    }
}

/// Arithmetic shared by plain reals and jets, used by the expression
/// evaluator so one code path serves both.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn value(&self) -> f64;
    fn checked_div(self, rhs: Self) -> Result<Self>;
    fn checked_exp(self) -> Result<Self>;
    fn checked_ln(self) -> Result<Self>;
    fn checked_sqrt(self) -> Result<Self>;
    fn checked_pow(self, rhs: Self) -> Result<Self>;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs == 0.0 {
            return Err(Error::Domain {
                op: "div",
                value: rhs,
            });
        }
        Ok(self * (1.0 / rhs))
    }
    fn checked_exp(self) -> Result<Self> {
        let e = self.exp();
        if !e.is_finite() {
            return Err(Error::Domain {
                op: "exp",
                value: self,
            });
        }
        Ok(e)
    }
    fn checked_ln(self) -> Result<Self> {
        if !(self > 0.0) {
            return Err(Error::Domain {
                op: "log",
                value: self,
            });
        }
        Ok(self.ln())
    }
    fn checked_sqrt(self) -> Result<Self> {
        if !(self > 0.0) {
            return Err(Error::Domain {
                op: "sqrt",
                value: self,
            });
        }
        Ok(self.sqrt())
    }
    fn checked_pow(self, rhs: Self) -> Result<Self> {
        let err = Error::Domain {
            op: "pow",
            value: self,
        };
        if (self < 0.0 && rhs.fract() != 0.0) || (self == 0.0 && rhs < 0.0) {
            return Err(err);
        }
        let out = self.powf(rhs);
        if !out.is_finite() {
            return Err(err);
        }
        Ok(out)
    }
}

impl Scalar for Jet2 {
    fn from_f64(v: f64) -> Self {
        Jet2::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn checked_div(self, rhs: Self) -> Result<Self> {
        // route through the reciprocal exactly as the real path does
        Jet2::try_div(&self, &rhs)
    }
    fn checked_exp(self) -> Result<Self> {
        Jet2::try_exp(&self)
    }
    fn checked_ln(self) -> Result<Self> {
        Jet2::try_ln(&self)
    }
    fn checked_sqrt(self) -> Result<Self> {
        Jet2::try_sqrt(&self)
    }
    fn checked_pow(self, rhs: Self) -> Result<Self> {
        Jet2::try_pow(&self, &rhs)
    }
}

/// Default finite-difference step `1e-4·max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    1e-4 * x.abs().max(1.0)
}

/// Central second difference `(f(x+h) − 2f(x) + f(x−h)) / h²`.
pub fn fd_second_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Central first difference `(f(x+h) − f(x−h)) / 2h`.
pub fn fd_first_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Richardson-extrapolated central second difference, O(h⁴).
pub fn fd_second_derivative_richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let coarse = fd_second_derivative(&f, x, h);
    let fine = fd_second_derivative(&f, x, 0.5 * h);
    (4.0 * fine - coarse) / 3.0
}

/// Richardson-extrapolated central first difference, O(h⁴).
pub fn fd_first_derivative_richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let coarse = fd_first_derivative(&f, x, h);
    let fine = fd_first_derivative(&f, x, 0.5 * h);
    (4.0 * fine - coarse) / 3.0
}
