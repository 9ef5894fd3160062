use serde::Serialize;

use super::maps::LocalDetectorParams;
use crate::error::{Error, Result};
use crate::qcore::{Amplitude, StateVector};
use crate::states::{xi, XiIndex};

/// `c(k,l)`: coefficient of `|A′,k⟩|B′,l⟩`. Zero-based storage; use [`PrimedCoefficients::at`]
/// for one-based access.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimedCoefficients {
    pub c: [[Amplitude; 2]; 2],
}

impl PrimedCoefficients {
    pub fn at(&self, k: usize, l: usize) -> Amplitude {
        self.c[k - 1][l - 1]
    }

    pub fn total_weight(&self) -> f64 {
        self.c.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.c.iter().flatten().all(|a| *a == Amplitude::new(0.0, 0.0))
    }
}

/// One-based readout cell `(k, l)` of the primed product basis.
pub type Cell = (usize, usize);

pub const CELLS: [Cell; 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

/// Coefficients of `√2·ξ(1) = |A,1⟩|B,2⟩ + |A,2⟩|B,1⟩` in the primed product
/// basis: `c(k,l) = u(1,k)u′(2,l) + u(2,k)u′(1,l)`.
pub fn primed_expansion(p: &LocalDetectorParams) -> Result<PrimedCoefficients> {
    let p = LocalDetectorParams::new(p.u, p.u_prime)?;
    let (u, v) = (&p.u, &p.u_prime);
    let mut c = [[Amplitude::new(0.0, 0.0); 2]; 2];
    for k in 1..=2 {
        for l in 1..=2 {
            c[k - 1][l - 1] = u.at(1, k) * v.at(2, l) + u.at(2, k) * v.at(1, l);
        }
    }
    Ok(PrimedCoefficients { c })
}

/// Primed-basis coefficients of an arbitrary two-particle state, where
/// computational index 1 is `|0⟩` and 2 is `|1⟩`:
/// `c(k,l) = Σ_{j,m} u(j,k) ψ(j,m) u′(m,l)`.
pub fn primed_coefficients(psi: &StateVector, p: &LocalDetectorParams) -> Result<PrimedCoefficients> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch { left: psi.dim(), right: 4 });
    }
    let amps = psi.amps();
    let mut c = [[Amplitude::new(0.0, 0.0); 2]; 2];
    for (k, row) in c.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate() {
            for j in 0..2 {
                for m in 0..2 {
                    *cell += p.u.entries[j][k] * amps[2 * j + m] * p.u_prime.entries[m][l];
                }
            }
        }
    }
    Ok(PrimedCoefficients { c })
}

/// Primed coefficients of the normalized `ξ(j)`.
pub fn primed_expansion_for(p: &LocalDetectorParams, target: XiIndex) -> Result<PrimedCoefficients> {
    let p = LocalDetectorParams::new(p.u, p.u_prime)?;
    primed_coefficients(&xi(target), &p)
}

/// Fraction of squared weight outside `cell`.
pub fn residual_for_cell(c: &PrimedCoefficients, cell: Cell) -> Result<f64> {
    let total = c.total_weight();
    if total == 0.0 {
        return Err(Error::ZeroCoefficients);
    }
    let outside: f64 = CELLS
        .iter()
        .filter(|&&other| other != cell)
        .map(|&(k, l)| c.at(k, l).norm_sqr())
        .sum();
    Ok(outside / total)
}

/// Smallest residual over the four target cells; zero iff exactly one
/// primed branch survives.
pub fn residual_of(c: &PrimedCoefficients) -> Result<f64> {
    let total = c.total_weight();
    if total == 0.0 {
        return Err(Error::ZeroCoefficients);
    }
    let largest = c.c.iter().flatten().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    Ok(((total - largest) / total).max(0.0))
}

pub fn residual(p: &LocalDetectorParams) -> Result<f64> {
    residual_of(&primed_expansion(p)?)
}

pub fn residual_for(p: &LocalDetectorParams, target: XiIndex) -> Result<f64> {
    residual_of(&primed_expansion_for(p, target)?)
}
