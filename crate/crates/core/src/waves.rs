//! Closed-form wavefunctions at complex argument and their contour samples.
//!
//! Everything is built from the normalized oscillator functions
//! `φ_n(u) = (2ⁿn!√π)^{−1/2} e^{−u²/2} H_n(u)`, evaluated by the stable
//! normalized recurrence. The inverted-oscillator families are the complex
//! scalings
//!
//! ```text
//!   ψ_n^r(x)  = e^{+iπ/8} ψ_n^os(x e^{+iπ/4}),
//!   ψ̃_n^r(x) = e^{−iπ/8} ψ_n^os(x e^{−iπ/4}),
//! ```
//!
//! with the quarter-power branches pinned to the principal ones so these
//! identities hold exactly rather than up to phase.

use crate::matrix::C64;
use crate::params::SystemParams;
use crate::quadrature::{gauss_hermite_effective, gauss_legendre};
use crate::{IolError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

/// Largest Hermite index served by the raw-polynomial recurrence (the
/// unnormalized values overflow long before the recurrence degrades).
pub const HERMITE_MAX_N: usize = 200;

/// Budget for the normalized oscillator-function recurrence, which carries
/// its Gaussian factor and stays representable far beyond the raw
/// polynomial.
pub const OSCILLATOR_MAX_N: usize = 2048;

/// Physicists' Hermite polynomial `H_n(z)` by the recurrence
/// `H_{n+1} = 2zH_n − 2nH_{n−1}`.
pub fn hermite_complex(n: usize, z: C64) -> Result<C64> {
    if n > HERMITE_MAX_N {
        return Err(IolError::Range(format!(
            "hermite index {n} beyond recurrence budget {HERMITE_MAX_N}"
        )));
    }
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let two = C64::new(2.0, 0.0);
    let mut hm = C64::new(1.0, 0.0);
    let mut h = two * z;
    for k in 1..n {
        let next = two * z * h - C64::new(2.0 * k as f64, 0.0) * hm;
        hm = h;
        h = next;
    }
    Ok(h)
}

/// Normalized oscillator function `φ_n(u)` (dimensionless) together with its
/// two lower neighbours, by the normalized recurrence
/// `φ_{n+1} = √(2/(n+1)) u φ_n − √(n/(n+1)) φ_{n−1}`.
fn phi_with_neighbours(n: usize, u: C64) -> Result<(C64, C64, C64)> {
    if n > OSCILLATOR_MAX_N {
        return Err(IolError::Range(format!(
            "oscillator index {n} beyond recurrence budget {OSCILLATOR_MAX_N}"
        )));
    }
    let g = -u * u * C64::new(0.5, 0.0);
    if g.re > 700.0 {
        return Err(IolError::Overflow { norm: g.re });
    }
    let phi0 = C64::new(PI.powf(-0.25), 0.0) * g.exp();
    if n == 0 {
        return Ok((phi0, C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }
    let mut pm2 = C64::new(0.0, 0.0);
    let mut pm1 = phi0;
    let mut p = C64::new(2.0f64.sqrt(), 0.0) * u * phi0; // φ_1
    for k in 1..n {
        let kf = k as f64;
        let next = (C64::new((2.0 / (kf + 1.0)).sqrt(), 0.0) * u) * p
            - C64::new((kf / (kf + 1.0)).sqrt(), 0.0) * pm1;
        pm2 = pm1;
        pm1 = p;
        p = next;
    }
    Ok((p, pm1, pm2))
}

/// Harmonic-oscillator eigenfunction `ψ_n^os` at (possibly complex) `x`.
pub fn psi_os(n: usize, x: C64, params: &SystemParams) -> Result<C64> {
    let ls = params.length_scale();
    let u = x / C64::new(ls, 0.0);
    let (phi, _, _) = phi_with_neighbours(n, u)?;
    Ok(phi / C64::new(ls.sqrt(), 0.0))
}

/// Generalized eigenfunction `ψ_n^r(x) = e^{iπ/8} ψ_n^os(x e^{iπ/4})`.
pub fn psi_r(n: usize, x: C64, params: &SystemParams) -> Result<C64> {
    let rot = C64::from_polar(1.0, FRAC_PI_4);
    Ok(C64::from_polar(1.0, FRAC_PI_8) * psi_os(n, x * rot, params)?)
}

/// Dual family `ψ̃_n^r(x) = e^{−iπ/8} ψ_n^os(x e^{−iπ/4})`; pointwise the
/// complex conjugate of `ψ_n^r` on the real line.
pub fn psi_r_tilde(n: usize, x: C64, params: &SystemParams) -> Result<C64> {
    let rot = C64::from_polar(1.0, -FRAC_PI_4);
    Ok(C64::from_polar(1.0, -FRAC_PI_8) * psi_os(n, x * rot, params)?)
}

/// Coherent wavefunction of the inverted oscillator for a general complex
/// eigenvalue `alpha`:
///
/// ```text
///   φ_α(x) = e^{iπ/8}(mω/2ħπ²)^{1/4} e^{−i|α|²/2}
///            · exp( e^{iπ/4}√(2mω/ħ)·α·x − i·mω x²/2ħ )
/// ```
pub fn phi_coherent(alpha: C64, x: C64, params: &SystemParams) -> Result<C64> {
    let ls = params.length_scale();
    let xi = x / C64::new(ls, 0.0);
    let pref = C64::from_polar((2.0 * PI * PI).powf(-0.25) / ls.sqrt(), FRAC_PI_8);
    let rot = C64::from_polar(2.0f64.sqrt(), FRAC_PI_4);
    let arg = rot * alpha * xi - C64::new(0.0, 0.5) * xi * xi
        - C64::new(0.0, 0.5 * alpha.norm_sqr());
    if arg.re > 700.0 {
        return Err(IolError::Overflow { norm: arg.re });
    }
    Ok(pref * arg.exp())
}

/// `φ_α^r` with the eigenvalue constrained to the physical phase,
/// `α = |α|·e^{iπ/4}`.
pub fn phi_alpha_r(alpha_mod: f64, x: C64, params: &SystemParams) -> Result<C64> {
    if alpha_mod < 0.0 {
        return Err(IolError::InvalidParams("alpha_mod must be >= 0".into()));
    }
    phi_coherent(C64::from_polar(alpha_mod, FRAC_PI_4), x, params)
}

/// Value and first two derivatives (in `x`) of `ψ_n^r` at `x`.
///
/// The derivatives use the neighbour recurrence `φ' = −uφ_n + √(2n)φ_{n−1}`
/// applied twice; the oscillator differential equation is *not* used, so a
/// quadrature of `−ħ²ψ''/2m − mω²x²ψ/2` against the family measures the
/// eigen-equation rather than assuming it.
pub fn psi_r_with_derivatives(
    n: usize,
    x: C64,
    params: &SystemParams,
) -> Result<(C64, C64, C64)> {
    let ls = params.length_scale();
    let rot = C64::from_polar(1.0, FRAC_PI_4);
    let u = x * rot / C64::new(ls, 0.0);
    let (p0, p1, p2) = phi_with_neighbours(n, u)?;
    let nf = n as f64;
    // dφ_n/du and d²φ_n/du²
    let dp0 = -u * p0 + C64::new((2.0 * nf).sqrt(), 0.0) * p1;
    let dp1 = if n >= 1 {
        -u * p1 + C64::new((2.0 * (nf - 1.0)).sqrt(), 0.0) * p2
    } else {
        C64::new(0.0, 0.0)
    };
    let ddp0 = -p0 - u * dp0 + C64::new((2.0 * nf).sqrt(), 0.0) * dp1;
    // chain rule: d/dx = (e^{iπ/4}/ℓ) d/du
    let jac = rot / C64::new(ls, 0.0);
    let pref = C64::from_polar(1.0 / ls.sqrt(), FRAC_PI_8);
    Ok((pref * p0, pref * jac * dp0, pref * jac * jac * ddp0))
}

/// The inverted-oscillator differential operator applied analytically:
/// `(H^r ψ_n^r)(x) = −ħ²/2m·ψ'' − mω²x²/2·ψ`.
pub fn h_r_applied_psi_r(n: usize, x: C64, params: &SystemParams) -> Result<C64> {
    let (psi, _, ddpsi) = psi_r_with_derivatives(n, x, params)?;
    let h = params.hbar();
    let kin = C64::new(-h * h / (2.0 * params.mass()), 0.0) * ddpsi;
    let pot = C64::new(-0.5 * params.mass() * params.omega() * params.omega(), 0.0) * x * x * psi;
    Ok(kin + pot)
}

/// Quadrature scheme on a contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    GaussHermite,
    GaussLegendreTruncated,
}

/// A straight-line ray `z = ℓ·t·e^{iθ}` in the complex position plane with a
/// quadrature rule on the parameter `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    /// Ray direction θ (radians), |θ| < π/2.
    pub angle: f64,
    pub node_count: usize,
    pub scheme: Scheme,
    /// Half width of the parameter interval; required by the truncated
    /// Gauss–Legendre scheme, ignored by Gauss–Hermite.
    pub half_width: Option<f64>,
    /// Real offset of the ray in physical position units. The pseudo-scalar
    /// product is contour-independent within the decay sector; shifting the
    /// ray through a wave packet's saddle point (its classical position)
    /// removes the exponentially deep cancellation the centered ray would
    /// face for displaced states.
    pub offset: f64,
}

impl ContourSpec {
    pub fn gauss_hermite(angle: f64, node_count: usize) -> Result<Self> {
        let c = Self {
            angle,
            node_count,
            scheme: Scheme::GaussHermite,
            half_width: None,
            offset: 0.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn gauss_legendre(angle: f64, node_count: usize, half_width: f64) -> Result<Self> {
        let c = Self {
            angle,
            node_count,
            scheme: Scheme::GaussLegendreTruncated,
            half_width: Some(half_width),
            offset: 0.0,
        };
        c.validate()?;
        Ok(c)
    }

    /// Same rule on the ray shifted to pass through `offset` on the real
    /// axis.
    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(IolError::Config(format!(
                "contour needs at least 8 nodes, got {}",
                self.node_count
            )));
        }
        if self.angle.is_nan() || self.angle.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(IolError::Config(format!("|angle| must be < π/2, got {}", self.angle)));
        }
        if !self.offset.is_finite() {
            return Err(IolError::Config("contour offset must be finite".into()));
        }
        match self.scheme {
            Scheme::GaussHermite => Ok(()),
            Scheme::GaussLegendreTruncated => match self.half_width {
                Some(w) if w > 0.0 => Ok(()),
                _ => Err(IolError::Config(
                    "truncated scheme requires a positive half_width".into(),
                )),
            },
        }
    }

    /// Parameter nodes and plain quadrature weights for `∫ f(t) dt`.
    ///
    /// For the Gauss–Hermite scheme the `e^{−t²}` weight is folded back into
    /// the weights (both factors stay representable), so the rule applies to
    /// the integrand as written.
    pub fn nodes_weights(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        self.validate()?;
        match self.scheme {
            Scheme::GaussHermite => Ok(gauss_hermite_effective(self.node_count)),
            Scheme::GaussLegendreTruncated => {
                let half = self.half_width.unwrap();
                let (x, w) = gauss_legendre(self.node_count);
                let t = x.iter().map(|xi| xi * half).collect();
                let weff = w.iter().map(|wi| wi * half).collect();
                Ok((t, weff))
            }
        }
    }
}

/// Which closed-form wave to sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveId {
    Oscillator(usize),
    Inverted(usize),
    Tilde(usize),
    Coherent { alpha: C64 },
}

impl WaveId {
    fn label(&self) -> String {
        match self {
            WaveId::Oscillator(n) => format!("psi_os n={n}"),
            WaveId::Inverted(n) => format!("psi_r n={n}"),
            WaveId::Tilde(n) => format!("psi_r_tilde n={n}"),
            WaveId::Coherent { alpha } => format!("phi_coherent alpha={alpha}"),
        }
    }

    fn eval(&self, x: C64, params: &SystemParams) -> Result<C64> {
        match *self {
            WaveId::Oscillator(n) => psi_os(n, x, params),
            WaveId::Inverted(n) => psi_r(n, x, params),
            WaveId::Tilde(n) => psi_r_tilde(n, x, params),
            WaveId::Coherent { alpha } => phi_coherent(alpha, x, params),
        }
    }
}

/// Complex wave values on a contour, with the quadrature weights that
/// produced the nodes.
#[derive(Debug, Clone)]
pub struct SampledWave {
    pub contour: ContourSpec,
    /// Parameter values `t_k`, strictly increasing.
    pub nodes: Vec<f64>,
    /// Plain quadrature weights for `∫·dt` on the parameter line.
    pub weights: Vec<f64>,
    /// `f(ℓ·t_k·e^{iθ})`.
    pub values: Vec<C64>,
    pub label: String,
    /// Length scale ℓ used to map parameters to physical positions.
    pub length_scale: f64,
}

impl SampledWave {
    /// Physical position of node `k`.
    pub fn position(&self, k: usize) -> C64 {
        C64::new(self.contour.offset, 0.0)
            + C64::new(self.length_scale * self.nodes[k], 0.0)
                * C64::from_polar(1.0, self.contour.angle)
    }
}

/// Samples a closed-form wave on a contour.
pub fn sample(wave: WaveId, contour: &ContourSpec, params: &SystemParams) -> Result<SampledWave> {
    let (nodes, weights) = contour.nodes_weights()?;
    let ls = params.length_scale();
    let rot = C64::from_polar(1.0, contour.angle);
    let off = C64::new(contour.offset, 0.0);
    let mut values = Vec::with_capacity(nodes.len());
    for &t in &nodes {
        let z = off + C64::new(ls * t, 0.0) * rot;
        values.push(wave.eval(z, params)?);
    }
    Ok(SampledWave {
        contour: contour.clone(),
        nodes,
        weights,
        values,
        label: wave.label(),
        length_scale: ls,
    })
}

/// Samples an arbitrary function on a contour (used for operator-applied
/// waves).
pub fn sample_fn<F>(
    f: F,
    label: &str,
    contour: &ContourSpec,
    params: &SystemParams,
) -> Result<SampledWave>
where
    F: Fn(C64) -> Result<C64>,
{
    let (nodes, weights) = contour.nodes_weights()?;
    let ls = params.length_scale();
    let rot = C64::from_polar(1.0, contour.angle);
    let off = C64::new(contour.offset, 0.0);
    let mut values = Vec::with_capacity(nodes.len());
    for &t in &nodes {
        let z = off + C64::new(ls * t, 0.0) * rot;
        values.push(f(z)?);
    }
    Ok(SampledWave {
        contour: contour.clone(),
        nodes,
        weights,
        values,
        label: label.into(),
        length_scale: ls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural(dim: usize) -> SystemParams {
        SystemParams::natural(dim).unwrap()
    }

    #[test]
    fn hermite_basics() {
        let z = C64::new(3.0, 4.0);
        assert_eq!(hermite_complex(0, z).unwrap(), C64::new(1.0, 0.0));
        assert!((hermite_complex(1, z).unwrap() - C64::new(6.0, 8.0)).norm() < 1e-14);
        // H_3(2) = 8·8 − 12·2 = 40
        let h3 = hermite_complex(3, C64::new(2.0, 0.0)).unwrap();
        assert!((h3 - C64::new(40.0, 0.0)).norm() < 1e-12);
        assert!(hermite_complex(201, z).is_err());
    }

    #[test]
    fn hermite_derivative_identity() {
        // H_n'(z) = 2n·H_{n−1}(z), checked by central differences
        let h = 1e-5;
        for n in 1..=10usize {
            for &zr in &[0.3, -1.1, 2.7] {
                let z = C64::new(zr, 0.4);
                let d = (hermite_complex(n, z + C64::new(h, 0.0)).unwrap()
                    - hermite_complex(n, z - C64::new(h, 0.0)).unwrap())
                    / C64::new(2.0 * h, 0.0);
                let exact = C64::new(2.0 * n as f64, 0.0) * hermite_complex(n - 1, z).unwrap();
                assert!((d - exact).norm() / exact.norm().max(1.0) < 1e-6);
            }
        }
    }

    #[test]
    fn ground_state_value_and_parity() {
        let p = natural(8);
        let v = psi_os(0, C64::new(0.0, 0.0), &p).unwrap();
        assert!((v.re - PI.powf(-0.25)).abs() < 1e-14);
        assert!(psi_os(1, C64::new(0.0, 0.0), &p).unwrap().norm() < 1e-16);
        for n in 0..6 {
            let x = C64::new(0.83, 0.0);
            let a = psi_os(n, x, &p).unwrap();
            let b = psi_os(n, -x, &p).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - b * C64::new(sign, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn oscillator_norm_by_quadrature() {
        // ∫|ψ_2^os|² dx = 1 with a 200-node rule
        let p = natural(8);
        let contour = ContourSpec::gauss_hermite(0.0, 200).unwrap();
        let w = sample(WaveId::Oscillator(2), &contour, &p).unwrap();
        let mut s = 0.0;
        for k in 0..w.nodes.len() {
            s += w.weights[k] * w.values[k].norm_sqr() * p.length_scale();
        }
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scaling_identity_direct_vs_closed_form() {
        // ψ_n^r from the printed closed form with principal branches equals
        // the scaled-oscillator definition.
        let p = SystemParams::new(1.3, 0.7, 1.9, 8).unwrap();
        let ls = p.length_scale();
        for n in 0..=8usize {
            for &xr in &[-3.3, -0.4, 0.9, 2.8] {
                let x = C64::new(xr, 0.0);
                let direct = {
                    let xi = x / C64::new(ls, 0.0);
                    // (iωm/πħ)^{1/4} e^{−iωm x²/2ħ} H_n(√(iωm/ħ) x) / √(2ⁿn!)
                    let mut fact = 1.0f64;
                    for k in 1..=n {
                        fact *= 2.0 * k as f64;
                    }
                    let pref = C64::from_polar(PI.powf(-0.25) / ls.sqrt() / fact.sqrt(), FRAC_PI_8);
                    let rot = C64::from_polar(1.0, FRAC_PI_4);
                    let h = hermite_complex(n, rot * xi).unwrap();
                    let gauss = (C64::new(0.0, -0.5) * xi * xi).exp();
                    pref * gauss * h
                };
                let scaled = psi_r(n, x, &p).unwrap();
                assert!(
                    (direct - scaled).norm() <= 1e-12 * scaled.norm().max(1.0),
                    "n={n} x={xr}"
                );
            }
        }
    }

    #[test]
    fn tilde_is_conjugate_on_real_line() {
        let p = natural(8);
        for n in 0..6 {
            for &xr in &[-2.0, 0.3, 1.7] {
                let a = psi_r(n, C64::new(xr, 0.0), &p).unwrap();
                let b = psi_r_tilde(n, C64::new(xr, 0.0), &p).unwrap();
                assert!((a.conj() - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn psi_r_ground_state_has_constant_modulus() {
        let p = natural(8);
        let m0 = psi_r(0, C64::new(0.0, 0.0), &p).unwrap().norm();
        for &xr in &[0.5, 1.5, 3.0, 6.0] {
            let m = psi_r(0, C64::new(xr, 0.0), &p).unwrap().norm();
            assert!((m - m0).abs() < 1e-13);
        }
        assert!((m0 - PI.powf(-0.25)).abs() < 1e-14);
    }

    #[test]
    fn coherent_reduces_to_vacuum_profile() {
        // α = 0 gives the vacuum; it differs from ψ_0^r only by the
        // (2π)^{−1/4} normalization convention of the coherent family.
        let p = natural(8);
        let r = phi_alpha_r(0.0, C64::new(0.7, 0.0), &p).unwrap()
            / psi_r(0, C64::new(0.7, 0.0), &p).unwrap();
        assert!((r - C64::new((2.0 * PI).powf(-0.25), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn coherent_satisfies_annihilation_ode() {
        // (√(imω/2ħ) x + √(ħ/2imω) d/dx) φ_α = α φ_α, derivative by central
        // differences.
        let p = natural(8);
        let alpha = C64::from_polar(0.8, FRAC_PI_4);
        let h = 1e-5;
        for &xr in &[-1.2, 0.0, 0.9, 2.1] {
            let x = C64::new(xr, 0.0);
            let f = |x: C64| phi_coherent(alpha, x, &p).unwrap();
            let d = (f(x + C64::new(h, 0.0)) - f(x - C64::new(h, 0.0))) / C64::new(2.0 * h, 0.0);
            // √(imω/2ħ) = e^{iπ/4}/ (√2 ℓ) · ℓ = e^{iπ/4}√(mω/2ħ), etc.
            let c1 = C64::from_polar((0.5f64).sqrt(), FRAC_PI_4); // √(i/2) in natural units
            let c2 = C64::from_polar((0.5f64).sqrt(), -FRAC_PI_4); // √(1/2i)
            let lhs = c1 * x * f(x) + c2 * d;
            assert!((lhs - alpha * f(x)).norm() < 1e-8, "x={xr}");
        }
    }

    #[test]
    fn analytic_second_derivative_matches_finite_difference() {
        let p = natural(8);
        let h = 1e-4;
        for n in [0usize, 1, 4] {
            let x = C64::new(0.6, 0.0);
            let (psi, dpsi, ddpsi) = psi_r_with_derivatives(n, x, &p).unwrap();
            let f = |x: C64| psi_r(n, x, &p).unwrap();
            assert!((psi - f(x)).norm() < 1e-13);
            let dfd =
                (f(x + C64::new(h, 0.0)) - f(x - C64::new(h, 0.0))) / C64::new(2.0 * h, 0.0);
            assert!((dpsi - dfd).norm() < 1e-7);
            let ddfd = (f(x + C64::new(h, 0.0)) - f(x) * C64::new(2.0, 0.0)
                + f(x - C64::new(h, 0.0)))
                / C64::new(h * h, 0.0);
            assert!((ddpsi - ddfd).norm() < 1e-5);
        }
    }

    #[test]
    fn contour_at_minus_quarter_pi_gives_real_oscillator_samples() {
        // ψ_n^r sampled on the θ=−π/4 ray equals e^{iπ/8}·(real ψ^os samples)
        let p = natural(8);
        let contour = ContourSpec::gauss_hermite(-FRAC_PI_4, 32).unwrap();
        let w = sample(WaveId::Inverted(3), &contour, &p).unwrap();
        let phase = C64::from_polar(1.0, FRAC_PI_8);
        for (k, &t) in w.nodes.iter().enumerate() {
            let expect = phase * psi_os(3, C64::new(p.length_scale() * t, 0.0), &p).unwrap();
            assert!((w.values[k] - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn contour_validation() {
        assert!(ContourSpec::gauss_hermite(0.2, 4).is_err());
        assert!(ContourSpec::gauss_hermite(1.6, 16).is_err());
        assert!(ContourSpec::gauss_legendre(0.0, 16, 0.0).is_err());
        assert!(ContourSpec::gauss_legendre(0.0, 16, 5.0).is_ok());
    }

    #[test]
    fn overflow_reported_for_wild_arguments() {
        let p = natural(8);
        assert!(matches!(
            psi_os(0, C64::new(0.0, 60.0), &p),
            Err(IolError::Overflow { .. })
        ));
    }
}
