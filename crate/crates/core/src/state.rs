//! Fock-space state vectors tagged by family.

use crate::matrix::C64;
use crate::{dilation, IolError, Result};
use nalgebra::DVector;

/// Which eigenfamily a coefficient vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Ordinary harmonic-oscillator states; unit Euclidean norm.
    Oscillator,
    /// Generalized eigenfamily of the inverted oscillator; normalized in the
    /// η-pseudo-scalar sense (unit-norm preimage under the scaling map).
    Inverted,
    /// The dual (tilde) family.
    Tilde,
}

/// Complex coefficient vector in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    coeffs: DVector<C64>,
    family: Family,
}

impl FockState {
    pub fn new(coeffs: DVector<C64>, family: Family) -> Result<Self> {
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(IolError::NumericalConsistency("state has non-finite coefficients".into()));
        }
        if coeffs.len() < 2 {
            return Err(IolError::InvalidDimension("state needs at least 2 coefficients".into()));
        }
        Ok(Self { coeffs, family })
    }

    /// Harmonic basis vector `e_n`, unit norm.
    pub fn oscillator_basis(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(IolError::InvalidDimension(format!("index {n} outside dim {dim}")));
        }
        let mut c = DVector::<C64>::zeros(dim);
        c[n] = C64::new(1.0, 0.0);
        Self::new(c, Family::Oscillator)
    }

    /// Generalized eigenvector `ψ_n^r` (η-normalized by construction).
    pub fn inverted_eigen(n: usize, dim: usize) -> Result<Self> {
        Self::new(dilation::eigenfamily_column(n, dim)?, Family::Inverted)
    }

    /// Dual vector `ψ̃_n^r`.
    pub fn tilde_eigen(n: usize, dim: usize) -> Result<Self> {
        Self::new(dilation::tilde_family_column(n, dim)?, Family::Tilde)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn coeffs(&self) -> &DVector<C64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<C64> {
        self.coeffs
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.coeffs.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_vector_is_unit() {
        let s = FockState::oscillator_basis(3, 8).unwrap();
        assert!((s.euclidean_norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.family(), Family::Oscillator);
    }

    #[test]
    fn rejects_index_and_nonfinite() {
        assert!(FockState::oscillator_basis(8, 8).is_err());
        let mut c = DVector::<C64>::zeros(4);
        c[0] = C64::new(f64::NAN, 0.0);
        assert!(FockState::new(c, Family::Oscillator).is_err());
    }
}
