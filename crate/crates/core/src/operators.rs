//! Operators of the model as dense matrices in the truncated Fock basis.
//!
//! Everything here is an exact band construction except the exponentiated
//! maps `ρ` and `η`, which go through [`matrix_exponential`]. The truncated
//! dilation generator has spectral radius growing like `~1.8·dim`, so those
//! exponentials are only well-conditioned at small truncations; the
//! laboratory's state constructions at large `dim` live in
//! [`crate::dilation`] instead.

use crate::matrix::{
    complex_eigenvalues, inverse_with_condition, matrix_exponential, C64, OperatorMatrix, Symmetry,
};
use crate::params::SystemParams;
use crate::{IolError, Result};
use nalgebra::DMatrix;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Annihilation operator: `a[n, n+1] = √(n+1)`.
pub fn build_annihilation(dim: usize) -> Result<OperatorMatrix> {
    if dim < 2 {
        return Err(IolError::InvalidDimension(format!("need dim >= 2, got {dim}")));
    }
    let mut a = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim - 1 {
        a[(n, n + 1)] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    Ok(OperatorMatrix::new_unchecked(a, Symmetry::General))
}

/// Creation operator, the conjugate transpose of [`build_annihilation`].
pub fn build_creation(dim: usize) -> Result<OperatorMatrix> {
    Ok(build_annihilation(dim)?.dagger())
}

/// Position and momentum: `x = √(ħ/2mω)(a⁺+a)`, `p = i√(ħmω/2)(a⁺−a)`.
pub fn build_position_momentum(params: &SystemParams) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let dim = params.dim();
    let a = build_annihilation(dim)?;
    let ls = params.length_scale() * FRAC_1_SQRT_2; // √(ħ/2mω)
    let ps = params.momentum_scale() * FRAC_1_SQRT_2; // √(ħmω/2)
    let mut x = DMatrix::<C64>::zeros(dim, dim);
    let mut p = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim - 1 {
        let r = a.entry(n, n + 1).re;
        x[(n, n + 1)] = C64::new(ls * r, 0.0);
        x[(n + 1, n)] = C64::new(ls * r, 0.0);
        p[(n, n + 1)] = C64::new(0.0, -ps * r);
        p[(n + 1, n)] = C64::new(0.0, ps * r);
    }
    Ok((
        OperatorMatrix::new_unchecked(x, Symmetry::Hermitian),
        OperatorMatrix::new_unchecked(p, Symmetry::Hermitian),
    ))
}

/// Harmonic and inverted Hamiltonians.
///
/// `H^os = p²/2m + mω²x²/2` is diagonal with entries `ħω(n+1/2)` (built
/// exactly, not by multiplying band matrices, so the edge rows carry no
/// truncation defect). `H^r = p²/2m − mω²x²/2 = −ħω(a⁺² + a²)/2`.
pub fn build_hamiltonians(params: &SystemParams) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let dim = params.dim();
    if dim < 4 {
        return Err(IolError::InvalidDimension("need dim >= 4".into()));
    }
    let e = params.energy_scale();
    let mut hos = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim {
        hos[(n, n)] = C64::new(e * (n as f64 + 0.5), 0.0);
    }
    let mut hr = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim - 2 {
        let c = -0.5 * e * (((n + 1) * (n + 2)) as f64).sqrt();
        hr[(n, n + 2)] = C64::new(c, 0.0);
        hr[(n + 2, n)] = C64::new(c, 0.0);
    }
    Ok((
        OperatorMatrix::new_unchecked(hos, Symmetry::Hermitian),
        OperatorMatrix::new_unchecked(hr, Symmetry::Hermitian),
    ))
}

/// Dilation generator `K = (xp+px)/ħ = i(a⁺² − a²)`, Hermitian, coupling
/// only `n ↔ n±2`.
///
/// The `1/ħ` normalization keeps the exponent of the scaling maps
/// dimensionless; with it the scaling identities hold in any unit system.
pub fn build_dilation_generator(params: &SystemParams) -> Result<OperatorMatrix> {
    let dim = params.dim();
    if dim < 4 {
        return Err(IolError::InvalidDimension("need dim >= 4".into()));
    }
    let mut k = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim - 2 {
        let c = (((n + 1) * (n + 2)) as f64).sqrt();
        k[(n, n + 2)] = C64::new(0.0, -c);
        k[(n + 2, n)] = C64::new(0.0, c);
    }
    Ok(OperatorMatrix::new_unchecked(k, Symmetry::Hermitian))
}

/// Scaling map and metric as truncated matrix exponentials:
/// `ρ = exp[(π/8)K]`, `η = exp[(π/4)K]`.
///
/// Both are Hermitian positive definite, and `η = ρ·ρ` holds to roundoff.
/// The spectral radius of `K` grows linearly with the truncation, so the
/// condition number of these matrices grows like `exp(c·dim)`; they are
/// meaningful as matrices at small `dim` only, and overflow errors are the
/// designed failure at large `dim`.
pub fn build_rho_eta(params: &SystemParams) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let k = build_dilation_generator(params)?;
    let rho = matrix_exponential(&k.scale(C64::new(PI / 8.0, 0.0)))?;
    let eta = matrix_exponential(&k.scale(C64::new(PI / 4.0, 0.0)))?;
    // The exact results are Hermitian; retag after a defect check so
    // downstream consumers can rely on the label.
    let retag = |m: OperatorMatrix| -> OperatorMatrix {
        if m.hermiticity_defect() <= 1e-10 {
            OperatorMatrix::new_unchecked(m.into_matrix(), Symmetry::Hermitian)
        } else {
            m
        }
    };
    Ok((retag(rho), retag(eta)))
}

/// Inverted-oscillator ladder pair in closed form:
/// `A = (a + i a⁺)/√2`, `Ā = (a⁺ + i a)/√2 = Aᵀ`.
///
/// These are the exact band matrices the similarity transform `ρ⁻¹aρ`
/// produces at the operator level; the similarity product itself is only
/// realizable at small truncations (see [`inverted_ladder_via_similarity`]),
/// so this closed form is the production construction.
pub fn build_inverted_ladder(params: &SystemParams) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let dim = params.dim();
    let a = build_annihilation(dim)?;
    let ad = a.dagger();
    let i = C64::new(0.0, 1.0);
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let am = a.as_matrix() * s + ad.as_matrix() * (i * s);
    let abar = ad.as_matrix() * s + a.as_matrix() * (i * s);
    Ok((
        OperatorMatrix::new_unchecked(am, Symmetry::General),
        OperatorMatrix::new_unchecked(abar, Symmetry::General),
    ))
}

/// The ladder pair through the literal similarity products `ρ⁻¹aρ`,
/// `ρ⁻¹a⁺ρ`.
///
/// Returns the pair together with the condition estimate of `ρ`. The error
/// of this route scales with that condition number, which grows like
/// `exp(0.7·dim)`; callers should treat results beyond `cond ≈ 1e8` as
/// qualitative. Singular or non-invertible `ρ` reports a conditioning error.
pub fn inverted_ladder_via_similarity(
    params: &SystemParams,
) -> Result<(OperatorMatrix, OperatorMatrix, f64)> {
    let k = build_dilation_generator(params)?;
    let rho = matrix_exponential(&k.scale(C64::new(PI / 8.0, 0.0)))?;
    // ρ⁻¹ as the exponential of the negated generator: exact-arithmetic
    // inverse, and the graded structure of the exponential keeps its
    // central columns far more accurate than an LU inverse of ρ.
    let rho_inv = matrix_exponential(&k.scale(C64::new(-PI / 8.0, 0.0)))?;
    let (_, cond) = inverse_with_condition(&rho)?;
    if !cond.is_finite() {
        return Err(IolError::Conditioning { estimate: cond });
    }
    let a = build_annihilation(params.dim())?;
    let am = rho_inv.mul(&a).mul(&rho);
    let abar = rho_inv.mul(&a.dagger()).mul(&rho);
    Ok((am, abar, cond))
}

/// Residual report from [`verify_similarity`].
#[derive(Debug, Clone)]
pub struct SimilarityReport {
    /// Max entry of `ρH^rρ⁻¹ − iH^os` on the central block.
    pub rho_conjugation: f64,
    /// Max entry of `η(iH^os)η⁻¹ − (−iH^os)` on the central block.
    pub eta_conjugation: f64,
    /// Max entry of `H^r − iħω(ĀA+AĀ)/2` on the central block.
    pub ladder_form: f64,
    /// Condition estimate of `ρ` at this truncation.
    pub rho_condition: f64,
    /// Condition estimate of `η`.
    pub eta_condition: f64,
    /// Central block is `0..block`.
    pub block: usize,
}

/// Measures the similarity identities connecting `H^r`, `iH^os` and the
/// ladder form, as max-entry residuals on the central block `0..dim/2`.
///
/// The conjugation residuals are faithful to the matrix construction and
/// therefore inherit the exponential conditioning of `ρ` and `η`; the
/// attached condition estimates say how far they can be trusted. The ladder
/// form residual is conditioning-free.
pub fn verify_similarity(params: &SystemParams) -> Result<SimilarityReport> {
    let dim = params.dim();
    let block = dim / 2;
    let (hos, hr) = build_hamiltonians(params)?;
    let i = C64::new(0.0, 1.0);
    let ihos = hos.scale(i);

    let k = build_dilation_generator(params)?;
    let rho = matrix_exponential(&k.scale(C64::new(PI / 8.0, 0.0)))?;
    let eta = matrix_exponential(&k.scale(C64::new(PI / 4.0, 0.0)))?;
    let (rho_inv, rho_cond) = inverse_with_condition(&rho)?;
    let (eta_inv, eta_cond) = inverse_with_condition(&eta)?;

    let lhs1 = rho.mul(&hr).mul(&rho_inv);
    let r1 = lhs1.block_max_diff(&ihos, block);

    let lhs2 = eta.mul(&ihos).mul(&eta_inv);
    let minus_ihos = ihos.scale(C64::new(-1.0, 0.0));
    let r2 = lhs2.block_max_diff(&minus_ihos, block);

    let (am, abar) = build_inverted_ladder(params)?;
    let half_ie = C64::new(0.0, 0.5 * params.energy_scale());
    let ladder_h =
        OperatorMatrix::new_unchecked(abar.mul(&am).as_matrix() + am.mul(&abar).as_matrix(), Symmetry::General)
            .scale(half_ie);
    let r3 = hr.block_max_diff(&ladder_h, block);

    Ok(SimilarityReport {
        rho_conjugation: r1,
        eta_conjugation: r2,
        ladder_form: r3,
        rho_condition: rho_cond,
        eta_condition: eta_cond,
        block,
    })
}

/// Eigenvalues of the similarity product `ρ⁻¹(iH^os)ρ` formed literally as
/// a dense matrix, with the condition estimate of `ρ`.
///
/// In exact arithmetic this matrix is similar to `iH^os` and its spectrum is
/// `{iħω(n+1/2)}` exactly. In floating point the matrix carries entries of
/// size `~exp(0.4·dim)` and its low eigenvalues survive only while
/// `cond(ρ)·ε` stays below the target accuracy — in practice `dim ≲ 12`.
/// The laboratory's production spectrum route is
/// [`crate::metric::spectrum_via_compression`].
pub fn similarity_spectrum_direct(params: &SystemParams) -> Result<(Vec<C64>, f64)> {
    let (hos, _) = build_hamiltonians(params)?;
    let ihos = hos.scale(C64::new(0.0, 1.0));
    let k = build_dilation_generator(params)?;
    let rho = matrix_exponential(&k.scale(C64::new(PI / 8.0, 0.0)))?;
    let (rho_inv, cond) = inverse_with_condition(&rho)?;
    let product = rho_inv.mul(&ihos).mul(&rho);
    let ev = complex_eigenvalues(&product)?;
    Ok((ev, cond))
}
