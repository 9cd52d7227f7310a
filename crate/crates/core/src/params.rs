//! Physical constants and truncation size.

use crate::{IolError, Result};
use serde::{Deserialize, Serialize};

/// Physical constants (mass, angular frequency, action scale) plus the Fock
/// truncation dimension.
///
/// All internal computations run in the dimensionless frame `m = ω = ħ = 1`;
/// physical units enter only through the length, momentum and energy scales
/// applied at input/output boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    mass: f64,
    omega: f64,
    hbar: f64,
    dim: usize,
}

impl SystemParams {
    /// Validates and constructs parameters.
    ///
    /// `dim` must be at least 4 and even: the dilation generator couples
    /// `n ↔ n±2`, and an odd truncation unbalances the two parity chains.
    pub fn new(mass: f64, omega: f64, hbar: f64, dim: usize) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(IolError::InvalidParams(format!("mass must be positive, got {mass}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(IolError::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(IolError::InvalidParams(format!("hbar must be positive, got {hbar}")));
        }
        if dim < 4 || !dim.is_multiple_of(2) {
            return Err(IolError::InvalidDimension(format!(
                "dim must be even and >= 4, got {dim}"
            )));
        }
        Ok(Self { mass, omega, hbar, dim })
    }

    /// Natural units `m = ω = ħ = 1`.
    pub fn natural(dim: usize) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, dim)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same constants at a different truncation.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(self.mass, self.omega, self.hbar, dim)
    }

    /// Ground-state length scale `√(ħ/mω)`; positions are `x = ℓ·ξ` with ξ
    /// dimensionless.
    pub fn length_scale(&self) -> f64 {
        (self.hbar / (self.mass * self.omega)).sqrt()
    }

    /// Momentum scale `√(ħmω)`.
    pub fn momentum_scale(&self) -> f64 {
        (self.hbar * self.mass * self.omega).sqrt()
    }

    /// Energy quantum `ħω`.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.omega
    }
}
