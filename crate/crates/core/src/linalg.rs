//! Banded symmetric positive definite matrices.
//!
//! Both solvers number their unknowns so that the stiffness matrix has a
//! narrow band; a banded Cholesky factorization is then cheap enough to
//! run at every Newton step.

use crate::error::{Error, Result};

/// Symmetric matrix holding its lower band: entry `(i, j)` with
/// `0 ≤ i − j ≤ bw` lives at `data[i * (bw + 1) + (bw − (i − j))]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedSym {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        (i - j <= self.bw && i < self.n).then(|| i * (self.bw + 1) + self.bw - (i - j))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Adds `v` to `(i, j)` (and by symmetry `(j, i)`).
    ///
    /// # Panics
    /// If the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band {}", self.bw));
        self.data[k] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let a = self.get(i, j);
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// Cholesky factor of `self + shift·id`.
    pub fn cholesky(&self, shift: f64) -> Result<BandedCholesky> {
        let (n, bw) = (self.n, self.bw);
        let mut l = self.data.clone();
        let at = |i: usize, j: usize| i * (bw + 1) + bw - (i - j);
        for i in 0..n {
            l[at(i, i)] += shift;
        }
        for j in 0..n {
            let lo = j.saturating_sub(bw);
            let mut d = l[at(j, j)];
            for k in lo..j {
                let v = l[at(j, k)];
                d -= v * v;
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not positive definite (pivot {j}: {d:e})"
                )));
            }
            let d = d.sqrt();
            l[at(j, j)] = d;
            let hi = (j + bw).min(n - 1);
            for i in j + 1..=hi {
                let lo_i = i.saturating_sub(bw).max(lo);
                let mut s = l[at(i, j)];
                for k in lo_i..j {
                    s -= l[at(i, k)] * l[at(j, k)];
                }
                l[at(i, j)] = s / d;
            }
        }
        Ok(BandedCholesky { n, bw, l })
    }

    /// Factorizes with the smallest shift from the sequence
    /// `0, τ, 4τ, 16τ, …` (with `τ = 1e-8·max diag`) that succeeds.
    pub fn cholesky_shifted(&self) -> Result<(BandedCholesky, f64)> {
        if let Ok(f) = self.cholesky(0.0) {
            return Ok((f, 0.0));
        }
        let scale = self.diagonal().iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1e-300);
        let mut shift = 1e-8 * scale;
        for _ in 0..40 {
            if let Ok(f) = self.cholesky(shift) {
                return Ok((f, shift));
            }
            shift *= 4.0;
        }
        Err(Error::InvalidArgument("matrix could not be regularized".into()))
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let at = |i: usize, j: usize| i * (bw + 1) + bw - (i - j);
        let mut y = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= self.l[at(i, k)] * y[k];
            }
            y[i] = s / self.l[at(i, i)];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = y[i];
            for k in i + 1..=hi {
                s -= self.l[at(k, i)] * y[k];
            }
            y[i] = s / self.l[at(i, i)];
        }
        y
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
