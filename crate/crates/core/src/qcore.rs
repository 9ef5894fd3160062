//! Minimal complex linear algebra for small state vectors.
//!
//! Tensor products use row-major ordering: the index of the first factor
//! varies slowest, so `|a⟩ ⊗ |b⟩` has amplitude `a[i] * b[j]` at `i * b.dim() + j`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Tolerance used for every exact-zero and normalization claim.
pub const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Builds a state from raw amplitudes. Does not normalize.
    pub fn new(amps: Vec<Amplitude>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyState);
        }
        if let Some(index) = amps.iter().position(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Amplitude::new(v, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩` of dimension `dim`.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); dim];
        amps[index] = Amplitude::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOL
    }

    /// Returns the state rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        Self::new(self.amps.iter().map(|a| a / n).collect())
    }

    pub fn scale(&self, factor: Amplitude) -> Result<Self> {
        Self::new(self.amps.iter().map(|a| a * factor).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Self::new(self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect())
    }

    /// Largest componentwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self, other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm_sqr: self.norm_sqr() })
        }
    }
}

fn check_dims(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

/// Labelled orthonormal set of vectors sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    vectors: Vec<StateVector>,
    labels: Vec<String>,
}

impl Basis {
    pub fn new(vectors: Vec<StateVector>, labels: Vec<String>) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::LabelCount { vectors: vectors.len(), labels: labels.len() });
        }
        let Some(first) = vectors.first() else {
            return Err(Error::IncompleteBasis { count: 0, dim: 0 });
        };
        let dim = first.dim();
        for v in &vectors {
            check_dims(first, v)?;
        }
        if vectors.len() > dim {
            return Err(Error::IncompleteBasis { count: vectors.len(), dim });
        }
        for (i, vi) in vectors.iter().enumerate() {
            for (j, vj) in vectors.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                let dev = (inner(vi, vj)? - Amplitude::new(expected, 0.0)).norm();
                if dev > TOL {
                    return Err(Error::NotOrthonormal { i, j, value: dev });
                }
            }
        }
        Ok(Self { vectors, labels })
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.len() == self.dim()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, index: usize) -> Option<&StateVector> {
        self.vectors.get(index)
    }

    /// Matrix of pairwise inner products `⟨v_i|v_j⟩`.
    pub fn gram(&self) -> Vec<Vec<Amplitude>> {
        self.vectors
            .iter()
            .map(|a| self.vectors.iter().map(|b| inner(a, b).expect("same dim")).collect())
            .collect()
    }

    /// `Σ_j coeffs[j] · v_j`.
    pub fn reconstruct(&self, coeffs: &[Amplitude]) -> Result<StateVector> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch { left: coeffs.len(), right: self.len() });
        }
        let mut out = vec![Amplitude::new(0.0, 0.0); self.dim()];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            for (o, a) in out.iter_mut().zip(v.amps()) {
                *o += c * a;
            }
        }
        StateVector::new(out)
    }
}

/// Kronecker product, first factor slowest.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let amps = a
        .amps()
        .iter()
        .flat_map(|x| b.amps().iter().map(move |y| x * y))
        .collect();
    StateVector { amps }
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<Amplitude> {
    check_dims(a, b)?;
    Ok(a.amps().iter().zip(b.amps()).map(|(x, y)| x.conj() * y).sum())
}

/// Born-rule probabilities `|⟨basis_j|psi⟩|²` for each basis vector.
pub fn born_probabilities(psi: &StateVector, basis: &Basis) -> Result<Vec<f64>> {
    psi.require_normalized()?;
    basis
        .vectors()
        .iter()
        .map(|v| inner(v, psi).map(|c| c.norm_sqr()))
        .collect()
}

/// Coefficients of `psi` in a complete orthonormal basis.
pub fn expand(psi: &StateVector, basis: &Basis) -> Result<Vec<Amplitude>> {
    if basis.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { left: psi.dim(), right: basis.dim() });
    }
    if !basis.is_complete() {
        return Err(Error::IncompleteBasis { count: basis.len(), dim: basis.dim() });
    }
    basis.vectors().iter().map(|v| inner(v, psi)).collect()
}

/// Random unit vector with components drawn uniformly from the square
/// `[-1, 1] × [-1, 1]` before normalization.
pub fn random_state<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let amps = (0..dim)
            .map(|_| Amplitude::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
            .collect();
        let v = StateVector { amps };
        if v.norm_sqr() > 1e-6 {
            return v.normalized().expect("nonzero");
        }
    }
}
