//! Checks for the entangled-basis measurement used against ψ-epistemic
//! models: the ξ-basis and its forbidden outcomes, the branch structure
//! produced by local detectors, the exact obstruction to a local product
//! detector, and finite ontological models with overlapping supports.

pub mod appendix;
pub mod detector;
pub mod error;
pub mod ontic;
pub mod qcore;
pub mod report;
pub mod states;

pub use error::{Error, Result};
pub use qcore::{born_probabilities, expand, inner, tensor, Amplitude, Basis, StateVector, TOL};
pub use states::{forbidden_table, prepared_state, single_states, xi_basis, ForbiddenTable, Preparation, SingleChoice, XiIndex};
pub use appendix::{LinearMap2, LocalDetectorParams, PrimedCoefficients, SearchConfig, SearchReport};
pub use detector::{BranchOutcome, ContractVerdict, DetectorModel, PointerReading, PointerValue, Reading};
pub use ontic::{EpistemicDistribution, FeasibilityVerdict, LambdaGrid, OnticModel, ResponseTable};
pub use report::{CheckResult, Command, Overall, Report, RunOptions, Status};
