//! Detector couplings and the branch decomposition they produce.
//!
//! Pointer readings are attached to branches as labels rather than carried
//! as extra tensor factors. Every coupling here is diagonal in the basis the
//! detector reads, so both pictures give the same branch amplitudes.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::Serialize;

use crate::appendix::{primed_coefficients, LocalDetectorParams};
use crate::error::{Error, Result};
use crate::qcore::{Amplitude, Basis, StateVector, TOL};
use crate::states::{xi_basis, XiIndex};

/// Value shown by one pointer. `X` is the ready state before coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PointerValue {
    X,
    R0,
    R1,
}

impl PointerValue {
    fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            PointerValue::R0
        } else {
            PointerValue::R1
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PointerValue::X => "x",
            PointerValue::R0 => "0",
            PointerValue::R1 => "1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PointerReading {
    pub a_reading: PointerValue,
    pub b_reading: PointerValue,
}

impl PointerReading {
    pub const fn new(a_reading: PointerValue, b_reading: PointerValue) -> Self {
        Self { a_reading, b_reading }
    }

    pub const READY: PointerReading = PointerReading::new(PointerValue::X, PointerValue::X);
}

impl fmt::Display for PointerReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a_reading.symbol(), self.b_reading.symbol())
    }
}

/// What a branch records: two local pointers, or one of the four opaque
/// joint-detector readings `r(1)..r(4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Reading {
    Pointers(PointerReading),
    Joint(XiIndex),
}

impl Reading {
    pub fn pointers(a: PointerValue, b: PointerValue) -> Self {
        Reading::Pointers(PointerReading::new(a, b))
    }
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reading::Pointers(p) => write!(f, "({p})"),
            Reading::Joint(j) => write!(f, "r({})", j.get()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchOutcome {
    pub particle_labels: (String, String),
    pub reading: Reading,
    pub amplitude: Amplitude,
}

impl BranchOutcome {
    pub fn probability(&self) -> f64 {
        self.amplitude.norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DetectorModel {
    /// Each particle's detector reads 0 or 1 in the computational basis.
    SimpleLocal,
    /// Each particle's detector reads its primed index (1 ↦ 0, 2 ↦ 1).
    LocalProduct(LocalDetectorParams),
    /// Reads the ξ-basis directly.
    JointXi,
}

impl DetectorModel {
    pub fn name(&self) -> &'static str {
        match self {
            DetectorModel::SimpleLocal => "simple-local",
            DetectorModel::LocalProduct(_) => "local-product",
            DetectorModel::JointXi => "joint-xi",
        }
    }

    pub fn run(&self, psi: &StateVector) -> Result<Vec<BranchOutcome>> {
        match self {
            DetectorModel::SimpleLocal => couple_simple(psi),
            DetectorModel::LocalProduct(p) => couple_local(psi, p),
            DetectorModel::JointXi => joint_xi_detector(psi),
        }
    }
}

fn require_two_qubit(psi: &StateVector) -> Result<()> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch { left: psi.dim(), right: 4 });
    }
    psi.require_normalized()
}

/// Branch order used for local detectors: readings (1,1), (1,0), (0,1), (0,0).
const LOCAL_ORDER: [(usize, usize); 4] = [(1, 1), (1, 0), (0, 1), (0, 0)];

fn prune(branches: Vec<BranchOutcome>) -> Vec<BranchOutcome> {
    branches.into_iter().filter(|b| b.amplitude.norm() >= TOL).collect()
}

/// Couples each particle to its own computational-basis detector. The
/// particle state is left unchanged and each component `|a⟩|b⟩` acquires
/// the readings `(a, b)`.
pub fn couple_simple(psi: &StateVector) -> Result<Vec<BranchOutcome>> {
    require_two_qubit(psi)?;
    let branches = LOCAL_ORDER
        .iter()
        .map(|&(a, b)| BranchOutcome {
            particle_labels: (format!("A,{a}"), format!("B,{b}")),
            reading: Reading::pointers(PointerValue::from_bit(a), PointerValue::from_bit(b)),
            amplitude: psi.amps()[2 * a + b],
        })
        .collect();
    Ok(prune(branches))
}

fn couple_local(psi: &StateVector, p: &LocalDetectorParams) -> Result<Vec<BranchOutcome>> {
    require_two_qubit(psi)?;
    let c = primed_coefficients(psi, p)?;
    let branches = LOCAL_ORDER
        .iter()
        .map(|&(a, b)| BranchOutcome {
            particle_labels: (format!("A',{}", a + 1), format!("B',{}", b + 1)),
            reading: Reading::pointers(PointerValue::from_bit(a), PointerValue::from_bit(b)),
            amplitude: c.c[a][b],
        })
        .collect();
    Ok(prune(branches))
}

/// Closed-form branch coefficients of the simple detector for input
/// `Σ a(j) ξ(j)`, in the order (1,1), (1,0), (0,1), (0,0).
pub fn branch_amplitudes_eq5(a: &[Amplitude; 4]) -> Result<[Amplitude; 4]> {
    let norm: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    if (norm - 1.0).abs() > TOL {
        return Err(Error::NotNormalized { norm_sqr: norm });
    }
    let r = FRAC_1_SQRT_2;
    Ok([
        a[1] / 2.0 + a[2] / 2.0 - a[3] * r,
        a[0] * r + a[1] / 2.0 - a[2] / 2.0,
        a[0] * r - a[1] / 2.0 + a[2] / 2.0,
        a[1] / 2.0 + a[2] / 2.0 + a[3] * r,
    ])
}

/// `Σ a(j) ξ(j)`.
pub fn xi_superposition(a: &[Amplitude; 4]) -> Result<StateVector> {
    xi_basis().reconstruct(a)
}

/// One branch per ξ(j) with nonzero overlap, reading `r(j)`.
pub fn joint_xi_detector(psi: &StateVector) -> Result<Vec<BranchOutcome>> {
    require_two_qubit(psi)?;
    joint_detector_in(psi, &xi_basis())
}

fn joint_detector_in(psi: &StateVector, basis: &Basis) -> Result<Vec<BranchOutcome>> {
    let branches = basis
        .vectors()
        .iter()
        .zip(XiIndex::ALL)
        .map(|(v, j)| {
            Ok(BranchOutcome {
                particle_labels: ("AB".to_string(), j.to_string()),
                reading: Reading::Joint(j),
                amplitude: crate::qcore::inner(v, psi)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(prune(branches))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractWitness {
    pub xi: XiIndex,
    pub readings: BTreeSet<Reading>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractVerdict {
    pub satisfied: bool,
    pub witness: Option<ContractWitness>,
}

/// Sends each pure `ξ(j)` through the detector. Satisfied iff every input
/// produces exactly one branch and the four readings are pairwise distinct.
pub fn check_contract(detector: &DetectorModel) -> Result<ContractVerdict> {
    check_contract_with(|psi| detector.run(psi))
}

/// [`check_contract`] for an arbitrary detector given as a function.
pub fn check_contract_with<F>(run: F) -> Result<ContractVerdict>
where
    F: Fn(&StateVector) -> Result<Vec<BranchOutcome>>,
{
    let basis = xi_basis();
    let mut seen: Vec<(XiIndex, Reading)> = Vec::with_capacity(4);
    for (v, j) in basis.vectors().iter().zip(XiIndex::ALL) {
        let branches = run(v)?;
        let readings: BTreeSet<Reading> = branches.iter().map(|b| b.reading).collect();
        if branches.len() != 1 {
            return Ok(ContractVerdict { satisfied: false, witness: Some(ContractWitness { xi: j, readings }) });
        }
        let reading = branches[0].reading;
        if let Some((_, r)) = seen.iter().find(|(_, r)| *r == reading) {
            return Ok(ContractVerdict {
                satisfied: false,
                witness: Some(ContractWitness { xi: j, readings: BTreeSet::from([*r]) }),
            });
        }
        seen.push((j, reading));
    }
    Ok(ContractVerdict { satisfied: true, witness: None })
}
