//! Numerical laboratory for the inverted harmonic oscillator treated as a
//! quasi-Hermitian (pseudo-Hermitian) system.
//!
//! The inverted oscillator `H^r = p²/2m − mω²x²/2` is connected to the
//! anti-PT-symmetric harmonic Hamiltonian `iH^os` by a complex scaling map
//! (Dyson map) `ρ = exp[(π/8)(xp+px)/ħ]`. Its generalized eigenfunctions are
//! not square integrable; they become orthonormal under the η-pseudo-scalar
//! product with the metric `η = ρ†ρ`. This crate builds that structure as
//! verifiable numerics:
//!
//! * [`operators`] — ladder, position/momentum, Hamiltonian, dilation
//!   generator and metric matrices in a truncated Fock basis, plus a dense
//!   matrix exponential;
//! * [`dilation`] — closed-form columns of the scaling map and its inverse,
//!   and coherent-state realizations, built by stable band recurrences
//!   (the matrices themselves are exponentially ill-conditioned, so the
//!   column route is what large truncations must use);
//! * [`waves`] — the closed-form eigenfunctions and coherent wavefunctions
//!   at complex argument, with contour sampling;
//! * [`metric`] — the c-product on rotated contours, the η-product in Fock
//!   space, bi-orthonormality, bi-completeness, quasi-Hermiticity
//!   diagnostics and the divergence of naive norms;
//! * [`dynamics`] — generalized coherent states, time evolution under the
//!   truncated `H^r`, η-weighted moments and uncertainties, and the
//!   classical trajectory oracle;
//! * [`experiments`] — the reproducible file-emitting experiment runner
//!   behind the `iol` command-line tool.

pub mod dilation;
pub mod dynamics;
pub mod experiments;
pub mod matrix;
pub mod metric;
pub mod operators;
pub mod params;
pub mod quadrature;
pub mod state;
pub mod waves;

pub use matrix::{OperatorMatrix, Symmetry};
pub use params::SystemParams;
pub use state::{Family, FockState};

use thiserror::Error;

/// Errors shared across the laboratory.
#[derive(Debug, Error)]
pub enum IolError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("matrix exponential overflow: input norm {norm:.3e} exceeds the representable range at this truncation")]
    Overflow { norm: f64 },
    #[error("numerical conditioning failure: condition estimate {estimate:.3e}")]
    Conditioning { estimate: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("contour mismatch: {0}")]
    ContourMismatch(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("truncation too small: need dim >= {required}")]
    Truncation { required: usize },
    #[error("out of validated range: {0}")]
    Range(String),
    #[error("degenerate state: {0}")]
    DegenerateState(String),
    #[error("numerical consistency failure: {0}")]
    NumericalConsistency(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, IolError>;
