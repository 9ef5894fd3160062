//! Local product detectors: each particle is read by its own detector in a
//! primed basis `|j⟩ = Σ_k u(j,k)|k′⟩`.

mod exact;
mod expansion;
mod maps;
mod search;

pub use exact::{certified_targets, certify_identity, certify_identity_report, IdentityCertificate, XI_INTEGER_FORMS};
pub use expansion::{
    primed_coefficients, primed_expansion, primed_expansion_for, residual, residual_for, residual_for_cell,
    residual_of, Cell, PrimedCoefficients, CELLS,
};
pub use maps::{LinearMap2, LocalDetectorParams};
pub use search::{
    near_singular_family, near_singular_family_residual, sample_feasible, search_local, SearchConfig, SearchReport,
    DEFAULT_DET_FLOOR, DEFAULT_RESTARTS, MAX_NORMALIZED_DET,
};
