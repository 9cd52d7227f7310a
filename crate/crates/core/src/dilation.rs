//! Closed-form columns of the scaling map and coherent-state realizations.
//!
//! The truncated matrix `ρ_N = exp[(π/8)K_N]` has condition number growing
//! like `exp(0.8·N)`: beyond `N ≈ 20` nothing built from the full matrix
//! (inverses, similarity products, Gram matrices) survives in double
//! precision, and beyond `N ≈ 460` the exponential overflows outright.
//!
//! The exact operator, however, factorizes over the su(1,1) algebra
//! generated by `a²/2`, `a⁺²/2` and the number operator:
//!
//! ```text
//!   ρ^{s} = exp(s·i·a⁺²/2) · 2^{1/4}·2^{n̂/2} · exp(−s·i·a²/2),   s = ±1.
//! ```
//!
//! Every intermediate index in the product of these factors stays at or
//! below the column index, so for a column `ρ^{s}e_n` the factorization is
//! free of truncation error and involves only `⌊n/2⌋+1` moderately sized
//! terms per entry: columns for `n ≪ N` are computable to near machine
//! precision at any truncation. The same identity gives `ρᵀ = ρ⁻¹` and
//! `conj(ρ) = ρ⁻¹` entrywise, which the tests pin.
//!
//! Coherent-state realizations avoid the column sums entirely: the
//! transformed annihilation operator is the band `A = (a + i a⁺)/√2`, so the
//! coefficients of an `A`-eigenstate satisfy a three-term recurrence whose
//! two fundamental solutions both have unit modulus growth — upward
//! recursion is neutrally stable. The seed has the closed form
//! `c₀ = 2^{1/4}·exp(−|α|²/2 + i·α²/2)`.

use crate::matrix::C64;
use crate::{IolError, Result};
use nalgebra::DVector;


/// Which power of the scaling map a column belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapSign {
    /// `ρ = exp[(π/8)(xp+px)/ħ]`; columns are the tilde family `ψ̃_n`.
    Forward,
    /// `ρ⁻¹`; columns are the generalized eigenfamily `ψ_n`.
    Inverse,
}

/// Fock coefficients of `ρ^{±1} e_n`, truncated to `dim` entries.
///
/// For `MapSign::Inverse` this is the coefficient vector of the generalized
/// eigenfunction `ψ_n^r`; for `MapSign::Forward`, of `ψ̃_n^r`. Entries decay
/// only like `m^{(n−1/2)/2}·m^{-1/4}` — the functions are not square
/// integrable, and the columns inherit that.
pub fn map_column(sign: MapSign, n: usize, dim: usize) -> Result<DVector<C64>> {
    if n >= dim {
        return Err(IolError::InvalidDimension(format!(
            "column index {n} outside truncation {dim}"
        )));
    }
    let s: f64 = match sign {
        MapSign::Forward => 1.0,
        MapSign::Inverse => -1.0,
    };
    let mut v = DVector::<C64>::zeros(dim);
    // lowering phase (−s·i/2)^j and raising phase (s·i/2)^l
    let lower_step = C64::new(0.0, -s * 0.5);
    let raise_step = C64::new(0.0, s * 0.5);

    let mut j_term = C64::new(2.0f64.powf(0.25 + n as f64 / 2.0), 0.0);
    let mut q = n;
    let mut j = 0usize;
    loop {
        // contribution of the path n → q = n−2j → m, for all m ≥ q
        let mut t = j_term;
        let mut m = q;
        let mut l = 0usize;
        while m < dim {
            v[m] += t;
            let ratio = (((m + 1) * (m + 2)) as f64).sqrt() / (l + 1) as f64;
            t *= raise_step * C64::new(ratio, 0.0);
            m += 2;
            l += 1;
        }
        if q < 2 {
            break;
        }
        // T_{j+1}(q−2) = T_j(q) · (−s·i/2) · √(q(q−1)) / (j+1) / 2^{1}
        // (one lowering step: the diagonal factor drops by 2^{1}).
        let ratio = ((q * (q - 1)) as f64).sqrt() / ((j + 1) as f64 * 2.0);
        j_term *= lower_step * C64::new(ratio, 0.0);
        q -= 2;
        j += 1;
    }
    Ok(v)
}

/// Coefficient vector of the generalized eigenfunction `ψ_n^r` at the given
/// truncation (column `n` of the inverse scaling map).
pub fn eigenfamily_column(n: usize, dim: usize) -> Result<DVector<C64>> {
    map_column(MapSign::Inverse, n, dim)
}

/// Coefficient vector of `ψ̃_n^r` (column `n` of the scaling map itself).
pub fn tilde_family_column(n: usize, dim: usize) -> Result<DVector<C64>> {
    map_column(MapSign::Forward, n, dim)
}

/// Fock coefficients of the inverted-oscillator coherent state with
/// eigenvalue `alpha`, by the band recurrence
/// `c_{m+1} = (√2·α·c_m − i√m·c_{m−1})/√(m+1)`.
///
/// The normalization matches `ρ⁻¹` applied to the unit-norm harmonic
/// coherent vector, so the preimage of the result has unit Euclidean norm.
pub fn coherent_realization(alpha: C64, dim: usize) -> Result<DVector<C64>> {
    if dim < 2 {
        return Err(IolError::InvalidDimension("need dim >= 2".into()));
    }
    let a2 = alpha * alpha;
    let mod2 = alpha.norm_sqr();
    let c0 = C64::new(2.0f64.powf(0.25), 0.0)
        * (C64::new(-0.5 * mod2, 0.0) + C64::new(0.0, 0.5) * a2).exp();
    let sqrt2 = C64::new(2.0f64.sqrt(), 0.0);
    let i = C64::new(0.0, 1.0);
    let mut c = DVector::<C64>::zeros(dim);
    c[0] = c0;
    c[1] = sqrt2 * alpha * c0;
    for m in 1..dim - 1 {
        c[m + 1] = (sqrt2 * alpha * c[m] - i * C64::new((m as f64).sqrt(), 0.0) * c[m - 1])
            / C64::new(((m + 1) as f64).sqrt(), 0.0);
    }
    Ok(c)
}

/// Harmonic coherent coefficients `e^{−|α|²/2} αⁿ/√(n!)` (the preimage of
/// [`coherent_realization`] under the scaling map).
pub fn harmonic_coherent(alpha: C64, dim: usize) -> DVector<C64> {
    let mut c = DVector::<C64>::zeros(dim);
    let mut t = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for m in 0..dim {
        c[m] = t;
        t *= alpha / C64::new(((m + 1) as f64).sqrt(), 0.0);
    }
    c
}

/// Smallest truncation at which the harmonic coherent tail
/// `|α|^n/√(n!)` has dropped below `tol` and stays there.
pub fn coherent_support_dim(alpha_mod: f64, tol: f64) -> usize {
    let mut t = 1.0f64;
    let mut n = 0usize;
    loop {
        n += 1;
        t *= alpha_mod / (n as f64).sqrt();
        if t < tol && n as f64 > alpha_mod * alpha_mod {
            return n + 1;
        }
        if n > 100_000 {
            return n;
        }
    }
}
