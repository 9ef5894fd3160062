use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{Amplitude, TOL};

/// A 2×2 complex map `u(j,k)`, relating unprimed single-particle states to
/// the primed states a detector responds to: `|j⟩ = Σ_k u(j,k) |k′⟩`.
///
/// Storage is zero-based; [`LinearMap2::at`] takes the one-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearMap2 {
    pub entries: [[Amplitude; 2]; 2],
}

impl LinearMap2 {
    pub const fn new(entries: [[Amplitude; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn from_real(entries: [[f64; 2]; 2]) -> Self {
        Self::new(entries.map(|row| row.map(|v| Amplitude::new(v, 0.0))))
    }

    pub fn identity() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn swap() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    /// One-based access, `j, k ∈ {1, 2}`.
    pub fn at(&self, j: usize, k: usize) -> Amplitude {
        self.entries[j - 1][k - 1]
    }

    pub fn det(&self) -> Amplitude {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[1][0] * e[0][1]
    }

    pub fn max_entry_norm(&self) -> f64 {
        self.entries.iter().flatten().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Rescaled so the largest entry has unit magnitude.
    pub fn normalized(&self) -> Self {
        let m = self.max_entry_norm();
        if m == 0.0 {
            return *self;
        }
        self.scaled(Amplitude::new(1.0 / m, 0.0))
    }

    pub fn scaled(&self, factor: Amplitude) -> Self {
        Self::new(self.entries.map(|row| row.map(|a| a * factor)))
    }

    /// Invertibility relative to the entry scale, so that the test does not
    /// depend on an overall factor.
    pub fn is_invertible(&self) -> bool {
        let m = self.max_entry_norm();
        m > 0.0 && self.det().norm() > TOL * m * m
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// `u†u = 1` within tolerance.
    pub fn is_unitary(&self) -> bool {
        let e = &self.entries;
        (0..2).all(|a| {
            (0..2).all(|b| {
                let s: Amplitude = (0..2).map(|j| e[j][a].conj() * e[j][b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                (s - Amplitude::new(want, 0.0)).norm() < TOL
            })
        })
    }
}

/// A local product detector: `u` acts on particle A, `u_prime` on B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalDetectorParams {
    pub u: LinearMap2,
    pub u_prime: LinearMap2,
}

impl LocalDetectorParams {
    pub fn new(u: LinearMap2, u_prime: LinearMap2) -> Result<Self> {
        for m in [&u, &u_prime] {
            if !m.is_finite() {
                return Err(Error::InvalidArgument("non-finite map entry".into()));
            }
            if !m.is_invertible() {
                return Err(Error::SingularMap { det_abs: m.det().norm() });
            }
        }
        Ok(Self { u, u_prime })
    }

    pub fn identity() -> Self {
        Self { u: LinearMap2::identity(), u_prime: LinearMap2::identity() }
    }

    /// Both maps normalized to unit largest-entry magnitude.
    pub fn normalized(&self) -> Self {
        Self { u: self.u.normalized(), u_prime: self.u_prime.normalized() }
    }
}
