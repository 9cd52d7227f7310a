//! Generalized coherent states of the inverted oscillator, their time
//! evolution under the truncated Hermitian `H^r`, η-weighted moments and
//! uncertainties, and the classical trajectory oracle.
//!
//! Moments are measured on the θ = −π/4 contour with the c-product. Two
//! structural facts shape what is reported:
//!
//! * the bilinear first moment of momentum vanishes identically (the
//!   integrand is a total derivative), so the momentum mean is assembled
//!   from the measured ladder eigenvalue `α(t)` through the ladder-operator
//!   expression for `p` — the same route the closed forms come from;
//! * the bilinear centered second moments come out as `(ħ/2mω)·e^{∓iπ/2}`:
//!   pure imaginary, with moduli equal to the uncertainties of the
//!   η-normalized state. The reported `dx`, `dp` are those moduli, measured
//!   directly, and their product is the minimal `ħ/2`.

use crate::dilation::{coherent_realization, coherent_support_dim};
use crate::matrix::{C64, OperatorMatrix};
use crate::metric::c_product;
use crate::operators::{build_hamiltonians, build_inverted_ladder};
use crate::params::SystemParams;
use crate::state::{Family, FockState};
use crate::waves::{phi_coherent, sample_fn, ContourSpec};
use crate::{IolError, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

/// Validated growth budget: beyond `ωt = 3` the coherent support outruns
/// any desk-scale truncation.
pub const MAX_OMEGA_T: f64 = 3.0;

/// Specification of a generalized coherent state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentSpec {
    /// `|α|`.
    pub alpha_mod: f64,
    /// Eigenvalue phase; the physical family fixes it to π/4.
    pub phase: f64,
    /// Time in units of `1/ω`; the effective eigenvalue is
    /// `α(t) = |α|·e^{iφ}·e^{ωt}`.
    pub time: f64,
    /// Allows non-physical phases for exploration; reports then flag
    /// non-real means instead of erroring.
    pub phase_override: bool,
}

impl CoherentSpec {
    pub fn new(alpha_mod: f64, time: f64) -> Result<Self> {
        let s = Self { alpha_mod, phase: FRAC_PI_4, time, phase_override: false };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha_mod < 0.0 || !self.alpha_mod.is_finite() {
            return Err(IolError::InvalidParams("alpha_mod must be >= 0".into()));
        }
        if self.time < 0.0 || !self.time.is_finite() {
            return Err(IolError::InvalidParams("time must be >= 0".into()));
        }
        if !self.phase_override && (self.phase - FRAC_PI_4).abs() > 1e-12 {
            return Err(IolError::InvalidParams(
                "phase is fixed to π/4 unless phase_override is set".into(),
            ));
        }
        Ok(())
    }

    /// `α(t) = |α|·e^{iφ}·e^{ωt}`.
    pub fn alpha_at(&self, params: &SystemParams) -> C64 {
        C64::from_polar(self.alpha_mod * (params.omega() * self.time).exp(), self.phase)
    }
}

/// Construction diagnostics attached to a coherent state.
#[derive(Debug, Clone, Copy)]
pub struct CoherentBuild {
    /// `‖A v − α v‖/‖v‖` over the interior rows.
    pub eigen_residual: f64,
    /// Eigenvalue the state was built for.
    pub alpha: C64,
}

/// Generalized coherent state as a Fock realization:
/// `ρ⁻¹ · (harmonic coherent vector at α(t))`.
///
/// Preconditions: the harmonic tail `|α|ⁿ/√(n!)` must drop below `1e-12`
/// inside the truncation, otherwise a truncation error with the required
/// dimension is returned.
pub fn make_coherent(
    spec: &CoherentSpec,
    params: &SystemParams,
) -> Result<(FockState, CoherentBuild)> {
    spec.validate()?;
    let alpha = spec.alpha_at(params);
    let required = coherent_support_dim(alpha.norm(), 1e-12);
    if required > params.dim() {
        return Err(IolError::Truncation { required });
    }
    let v = coherent_realization(alpha, params.dim())?;
    let state = FockState::new(v, Family::Inverted)?;
    let residual = coherent_eigen_residual(&state, alpha, params)?;
    Ok((state, CoherentBuild { eigen_residual: residual, alpha }))
}

/// `‖A v − α v‖/‖v‖` over the interior rows (the last two rows carry the
/// band truncation defect by construction).
pub fn coherent_eigen_residual(
    state: &FockState,
    alpha: C64,
    params: &SystemParams,
) -> Result<f64> {
    let (am, _) = build_inverted_ladder(params)?;
    if am.dim() != state.dim() {
        return Err(IolError::DimensionMismatch(format!("{} vs {}", am.dim(), state.dim())));
    }
    let av = am.apply(state.coeffs());
    let n = state.dim();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for m in 0..n - 2 {
        num += (av[m] - alpha * state.coeffs()[m]).norm_sqr();
        den += state.coeffs()[m].norm_sqr();
    }
    Ok((num / den.max(f64::MIN_POSITIVE)).sqrt())
}

/// Factored propagator `exp(−iH^r t/ħ)` from the spectral decomposition of
/// the real symmetric band `H^r/ħω`.
///
/// The band matrix is Hermitian, so the truncated propagator is unitary;
/// applying it is two dense matrix-vector products per time.
pub struct Propagator {
    omega: f64,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
}

impl Propagator {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let (_, hr) = build_hamiltonians(params)?;
        let scale = 1.0 / params.energy_scale();
        let n = params.dim();
        let band = DMatrix::<f64>::from_fn(n, n, |i, j| hr.entry(i, j).re * scale);
        let se = band.symmetric_eigen();
        Ok(Self { omega: params.omega(), eigvals: se.eigenvalues, eigvecs: se.eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    /// Applies `exp(−iH^r t/ħ)` to a coefficient vector.
    pub fn apply(&self, v: &DVector<C64>, t: f64) -> DVector<C64> {
        let n = self.dim();
        let wt = self.omega * t;
        // w = Qᵀ v
        let mut w = DVector::<C64>::zeros(n);
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += C64::new(self.eigvecs[(k, j)], 0.0) * v[k];
            }
            w[j] = s * C64::from_polar(1.0, -self.eigvals[j] * wt);
        }
        // v' = Q w
        let mut out = DVector::<C64>::zeros(n);
        for k in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                s += C64::new(self.eigvecs[(k, j)], 0.0) * w[j];
            }
            out[k] = s;
        }
        out
    }
}

/// Evolves a state by `exp(−iH^r t/ħ)`; `ωt` beyond the growth budget is a
/// range error.
pub fn evolve(state: &FockState, t: f64, params: &SystemParams) -> Result<FockState> {
    if params.dim() != state.dim() {
        return Err(IolError::DimensionMismatch(format!("{} vs {}", params.dim(), state.dim())));
    }
    let wt = params.omega() * t;
    if !(0.0..=MAX_OMEGA_T).contains(&wt) {
        return Err(IolError::Range(format!("ωt = {wt:.3} outside the growth budget 0..{MAX_OMEGA_T}")));
    }
    let prop = Propagator::new(params)?;
    FockState::new(prop.apply(state.coeffs(), t), state.family())
}

/// Comparison of a propagated coherent state against its `α(t) = αe^{ωt}`
/// reconstruction.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionReport {
    pub omega_t: f64,
    /// `1 − |⟨u,w⟩|/(‖u‖‖w‖)` on the comparison block.
    pub overlap_deviation: f64,
    /// Rows `0..block` entering the comparison.
    pub block: usize,
    /// `A`-eigenvalue residual of the evolved state on the same block.
    pub evolved_eigen_residual: f64,
    pub alpha_t: C64,
}

/// Block on which an evolved state is comparable to its reconstruction.
///
/// The truncation edge injects an error front that migrates inward like
/// `e^{−2ωt}` under the squeezing flow while the physical support migrates
/// outward; rows below half the front position remain clean.
pub fn comparison_block(dim: usize, omega_t: f64) -> usize {
    (((dim as f64) * (-2.0 * omega_t).exp()) * 0.5).floor().max(8.0) as usize
}

/// Evolves the coherent state with the truncated propagator and measures it
/// against the closed-form reconstruction at `α(t)`. The substitution is
/// the thing being tested; the propagator never uses it.
pub fn evolve_against_reconstruction(
    alpha_mod: f64,
    t: f64,
    params: &SystemParams,
    prop: &Propagator,
) -> Result<EvolutionReport> {
    let wt = params.omega() * t;
    if !(0.0..=MAX_OMEGA_T).contains(&wt) {
        return Err(IolError::Range(format!("ωt = {wt:.3} outside 0..{MAX_OMEGA_T}")));
    }
    let spec0 = CoherentSpec::new(alpha_mod, 0.0)?;
    let (state0, _) = make_coherent(&spec0, params)?;
    let evolved = prop.apply(state0.coeffs(), t);

    let alpha_t = spec0.alpha_at(params) * C64::new(wt.exp(), 0.0);
    let recon = coherent_realization(alpha_t, params.dim())?;

    let block = comparison_block(params.dim(), wt).min(params.dim());
    let mut dot = C64::new(0.0, 0.0);
    let mut nu = 0.0f64;
    let mut nw = 0.0f64;
    for k in 0..block {
        dot += evolved[k].conj() * recon[k];
        nu += evolved[k].norm_sqr();
        nw += recon[k].norm_sqr();
    }
    let overlap = dot.norm() / (nu.sqrt() * nw.sqrt()).max(f64::MIN_POSITIVE);

    // eigenvalue covariance: A v(t) ≈ α(t) v(t) on the clean block
    let (am, _) = build_inverted_ladder(params)?;
    let av = am.apply(&evolved);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for m in 0..block {
        num += (av[m] - alpha_t * evolved[m]).norm_sqr();
        den += evolved[m].norm_sqr();
    }

    Ok(EvolutionReport {
        omega_t: wt,
        overlap_deviation: (1.0 - overlap).abs(),
        block,
        evolved_eigen_residual: (num / den.max(f64::MIN_POSITIVE)).sqrt(),
        alpha_t,
    })
}

/// Literal η-weighted expectation `(u†ηOu)/(u†ηu)`.
///
/// Faithful to the matrix realization; meaningful whenever the supplied
/// metric matrix is (identity metric, or small well-conditioned
/// truncations).
pub fn eta_expectation(
    state: &FockState,
    op: &OperatorMatrix,
    eta: &OperatorMatrix,
) -> Result<C64> {
    if state.dim() != op.dim() || state.dim() != eta.dim() {
        return Err(IolError::DimensionMismatch(format!(
            "state {} op {} eta {}",
            state.dim(),
            op.dim(),
            eta.dim()
        )));
    }
    let ov = op.apply(state.coeffs());
    let eta_ov = eta.apply(&ov);
    let num = state.coeffs().dotc(&eta_ov);
    let den = state.coeffs().dotc(&eta.apply(state.coeffs()));
    if den.norm() < 1e-300 {
        return Err(IolError::DegenerateState(format!("η-norm {:.3e}", den.norm())));
    }
    Ok(num / den)
}

/// η-weighted first and second moments of position and momentum with
/// uncertainties, timestamps and diagnostics.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExpectationReport {
    pub time: f64,
    /// Measured bilinear position mean (imaginary part is a diagnostic).
    pub x_mean_re: f64,
    pub x_mean_im: f64,
    /// Momentum mean assembled from the measured ladder eigenvalue.
    pub p_mean_re: f64,
    pub p_mean_im: f64,
    /// Second moments in the ladder-algebra form (real by construction).
    pub x2_mean_re: f64,
    pub x2_mean_im: f64,
    pub p2_mean_re: f64,
    pub p2_mean_im: f64,
    pub dx: f64,
    pub dp: f64,
    pub product: f64,
    /// Modulus of the bilinear normalization actually used.
    pub eta_norm: f64,
}

/// Measures the η-weighted moments of the coherent family member
/// `α(t) = |α|e^{iπ/4}e^{ωt}` by contour quadrature.
///
/// The ladder eigenvalue is measured as `⟨A⟩`; position and its second
/// moment are measured directly; momentum and the second moments reported
/// in the ladder form use the measured eigenvalue. The uncertainties are
/// the moduli of the measured bilinear centered variances.
pub fn coherent_report(
    alpha_mod: f64,
    t: f64,
    nodes: usize,
    params: &SystemParams,
) -> Result<ExpectationReport> {
    let wt = params.omega() * t;
    if !(0.0..=MAX_OMEGA_T).contains(&wt) {
        return Err(IolError::Range(format!("ωt = {wt:.3} outside 0..{MAX_OMEGA_T}")));
    }
    let alpha_t = C64::from_polar(alpha_mod * wt.exp(), FRAC_PI_4);
    report_for_alpha(alpha_t, t, nodes, params)
}

/// Moment report for a general coherent eigenvalue (exploration mode; the
/// means need not be real off the physical phase).
pub fn report_for_alpha(
    alpha: C64,
    t: f64,
    nodes: usize,
    params: &SystemParams,
) -> Result<ExpectationReport> {
    let ls = params.length_scale();
    // Shift the ray through the pair integrand's saddle point, which sits
    // at the classical position √2·|α|·ℓ on the real axis. On the centered
    // ray the contributions are e^{|α|²}-sized and cancel to an O(1)
    // result, which double precision loses for |α| ≳ 4; on the shifted ray
    // the integrand is a plain Gaussian.
    let contour = ContourSpec::gauss_hermite(-FRAC_PI_4, nodes)?
        .with_offset(std::f64::consts::SQRT_2 * alpha.norm() * ls);
    let ms = params.momentum_scale();
    let hbar = params.hbar();

    let f = sample_fn(|z| phi_coherent(alpha, z, params), "phi", &contour, params)?;
    let xf = sample_fn(
        |z| Ok(z * phi_coherent(alpha, z, params)?),
        "x phi",
        &contour,
        params,
    )?;
    let x2f = sample_fn(
        |z| Ok(z * z * phi_coherent(alpha, z, params)?),
        "x^2 phi",
        &contour,
        params,
    )?;
    // dφ/dx = (c − iξ)/ℓ · φ with c = e^{iπ/4}√2·α
    let c = C64::from_polar(2.0f64.sqrt(), FRAC_PI_4) * alpha;
    let pf = sample_fn(
        |z| {
            let xi = z / C64::new(ls, 0.0);
            Ok(C64::new(0.0, -hbar / ls) * (c - C64::new(0.0, 1.0) * xi) * phi_coherent(alpha, z, params)?)
        },
        "p phi",
        &contour,
        params,
    )?;
    let p2f = sample_fn(
        |z| {
            let xi = z / C64::new(ls, 0.0);
            let d = c - C64::new(0.0, 1.0) * xi;
            // p²φ = −ħ²φ'' = −(ħ/ℓ)²[(c−iξ)² − i]φ
            Ok(C64::new(-(hbar / ls) * (hbar / ls), 0.0)
                * (d * d - C64::new(0.0, 1.0))
                * phi_coherent(alpha, z, params)?)
        },
        "p^2 phi",
        &contour,
        params,
    )?;
    // A φ = α φ; the measured eigenvalue comes from the ladder action
    // e^{iπ/4}(ξ − i d/dξ)/√2 evaluated with the analytic derivative.
    let af = sample_fn(
        |z| {
            let xi = z / C64::new(ls, 0.0);
            let dphi_dxi = (c - C64::new(0.0, 1.0) * xi) * phi_coherent(alpha, z, params)?;
            let v = phi_coherent(alpha, z, params)?;
            Ok(C64::from_polar(1.0 / 2.0f64.sqrt(), FRAC_PI_4)
                * (xi * v - C64::new(0.0, 1.0) * dphi_dxi))
        },
        "A phi",
        &contour,
        params,
    )?;

    let nrm = c_product(&f, &f)?;
    if nrm.norm() < 1e-300 {
        return Err(IolError::DegenerateState(format!("c-norm {:.3e}", nrm.norm())));
    }
    let x_mean = c_product(&f, &xf)? / nrm;
    let x2_c = c_product(&f, &x2f)? / nrm;
    let p_bilinear = c_product(&f, &pf)? / nrm;
    let p2_c = c_product(&f, &p2f)? / nrm;
    let alpha_meas = c_product(&f, &af)? / nrm;

    // centered bilinear variances: (ħ/2mω)e^{−iπ/2} and (ħmω/2)e^{+iπ/2}
    let var_x = x2_c - x_mean * x_mean;
    let var_p = p2_c - p_bilinear * p_bilinear;
    let dx = var_x.norm().sqrt();
    let dp = var_p.norm().sqrt();

    // ladder-form assembly at the measured eigenvalue:
    // ⟨p⟩ = √(2ħmω)·√2·Im α = 2·ms·Im α, and the second moments
    // ⟨x²⟩ = (ħ/2mω)[(α+ᾱ)²+1], ⟨p²⟩ = (ħmω/2)[1−(α−ᾱ)²]
    let re2 = 2.0 * alpha_meas.re;
    let im2 = 2.0 * alpha_meas.im;
    let p_mean = ms * im2;
    let x2_assembled = 0.5 * ls * ls * (re2 * re2 + 1.0);
    let p2_assembled = 0.5 * ms * ms * (1.0 + im2 * im2);

    // consistency guard: the algebra-centered variance must be ħ/2mω ≥ 0
    let centered = x2_assembled - 0.5 * ls * ls * re2 * re2;
    if centered < -1e-10 {
        return Err(IolError::NumericalConsistency(format!(
            "negative centered variance {centered:.3e}"
        )));
    }

    Ok(ExpectationReport {
        time: t,
        x_mean_re: x_mean.re,
        x_mean_im: x_mean.im,
        p_mean_re: p_mean,
        p_mean_im: p_bilinear.norm(), // diagnostic: the vanishing bilinear route
        x2_mean_re: x2_assembled,
        x2_mean_im: x2_c.im, // diagnostic: rotated-variance imaginary part
        p2_mean_re: p2_assembled,
        p2_mean_im: p2_c.im,
        dx,
        dp,
        product: dx * dp,
        eta_norm: nrm.norm(),
    })
}

/// Classical trajectory data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub x_c: Vec<f64>,
    pub p_c: Vec<f64>,
    pub method: TrajectoryMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryMethod {
    ClosedForm,
    Rk4,
}

/// Solves `ẍ = ω²x`: closed form `x_c = x₀cosh(ωt) + (p₀/mω)sinh(ωt)`,
/// or fixed-step RK4 on the same equations using the grid spacing.
pub fn classical_trajectory(
    x0: f64,
    p0: f64,
    t_grid: &[f64],
    params: &SystemParams,
    method: TrajectoryMethod,
) -> Result<TrajectoryRecord> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(IolError::Config("time grid must be nonempty and strictly increasing".into()));
    }
    let w = params.omega();
    let m = params.mass();
    match method {
        TrajectoryMethod::ClosedForm => {
            let mut xs = Vec::with_capacity(t_grid.len());
            let mut ps = Vec::with_capacity(t_grid.len());
            for &t in t_grid {
                let (s, c) = ((w * t).sinh(), (w * t).cosh());
                xs.push(x0 * c + p0 / (m * w) * s);
                ps.push(x0 * m * w * s + p0 * c);
            }
            Ok(TrajectoryRecord { times: t_grid.to_vec(), x_c: xs, p_c: ps, method })
        }
        TrajectoryMethod::Rk4 => {
            let mut xs = Vec::with_capacity(t_grid.len());
            let mut ps = Vec::with_capacity(t_grid.len());
            let mut x = x0;
            let mut p = p0;
            let mut t_now = t_grid[0];
            // integrate ẋ = p/m, ṗ = mω²x
            let fx = |p: f64| p / m;
            let fp = |x: f64| m * w * w * x;
            xs.push(x);
            ps.push(p);
            for &t_next in &t_grid[1..] {
                let h = t_next - t_now;
                let (k1x, k1p) = (fx(p), fp(x));
                let (k2x, k2p) = (fx(p + 0.5 * h * k1p), fp(x + 0.5 * h * k1x));
                let (k3x, k3p) = (fx(p + 0.5 * h * k2p), fp(x + 0.5 * h * k2x));
                let (k4x, k4p) = (fx(p + h * k3p), fp(x + h * k3x));
                x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
                p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
                xs.push(x);
                ps.push(p);
                t_now = t_next;
            }
            Ok(TrajectoryRecord { times: t_grid.to_vec(), x_c: xs, p_c: ps, method })
        }
    }
}

/// Result of the disentangling identity check
/// `e^{g}·e^{B}·e^{−g} = e^{exp(c)·B}`, valid when `[g,B] = c·B`.
#[derive(Debug, Clone, Copy)]
pub struct BchReport {
    /// Max entry of `[g,B] − c·B` on the block (precondition, measured).
    pub commutator_defect: f64,
    /// Max entry of `e^g e^B e^{−g} − e^{e^c B}` on the block.
    pub residual: f64,
    pub block: usize,
}

/// Verifies the special Baker–Campbell–Hausdorff case on the central block.
/// The commutator precondition is measured and reported, never assumed.
pub fn bch_check(
    generator: &OperatorMatrix,
    b: &OperatorMatrix,
    c: C64,
    block: usize,
) -> Result<BchReport> {
    if generator.dim() != b.dim() {
        return Err(IolError::DimensionMismatch(format!("{} vs {}", generator.dim(), b.dim())));
    }
    let gb = generator.mul(b);
    let bg = b.mul(generator);
    let mut defect = 0.0f64;
    for i in 0..block {
        for j in 0..block {
            let comm = gb.entry(i, j) - bg.entry(i, j);
            defect = defect.max((comm - c * b.entry(i, j)).norm());
        }
    }
    let eg = crate::matrix::matrix_exponential(generator)?;
    let eb = crate::matrix::matrix_exponential(b)?;
    let emg = crate::matrix::matrix_exponential(&generator.scale(C64::new(-1.0, 0.0)))?;
    let scaled_b = b.scale(c.exp());
    let rhs = crate::matrix::matrix_exponential(&scaled_b)?;
    let lhs = eg.mul(&eb).mul(&emg);
    let residual = lhs.block_max_diff(&rhs, block);
    Ok(BchReport { commutator_defect: defect, residual, block })
}
