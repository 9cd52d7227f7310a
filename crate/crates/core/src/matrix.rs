//! Dense complex matrices with a symmetry tag, and the matrix-function
//! machinery (exponential, inverse with condition estimate, spectral
//! decompositions).

use crate::{IolError, Result};
use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

/// Symmetry label carried by an [`OperatorMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Hermitian,
    AntiHermitian,
    General,
}

/// Dense complex square matrix in the truncated Fock basis.
///
/// A matrix tagged `Hermitian` is verified at construction: the largest
/// entry of `M − M†` must not exceed `1e-13` times the largest entry
/// magnitude of `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    mat: DMatrix<C64>,
    symmetry: Symmetry,
}

const HERMITICITY_REL_TOL: f64 = 1e-13;

impl OperatorMatrix {
    pub fn new(mat: DMatrix<C64>, symmetry: Symmetry) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(IolError::InvalidDimension(format!(
                "operator matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(IolError::NumericalConsistency(
                "operator matrix has non-finite entries".into(),
            ));
        }
        let m = Self { mat, symmetry };
        match symmetry {
            Symmetry::Hermitian => {
                let defect = m.hermiticity_defect();
                if defect > HERMITICITY_REL_TOL {
                    return Err(IolError::NumericalConsistency(format!(
                        "matrix tagged hermitian has relative defect {defect:.3e}"
                    )));
                }
            }
            Symmetry::AntiHermitian => {
                let defect = m.anti_hermiticity_defect();
                if defect > HERMITICITY_REL_TOL {
                    return Err(IolError::NumericalConsistency(format!(
                        "matrix tagged anti-hermitian has relative defect {defect:.3e}"
                    )));
                }
            }
            Symmetry::General => {}
        }
        Ok(m)
    }

    /// Constructs without the symmetry check. For matrices whose tag is
    /// guaranteed by construction (e.g. exact band matrices).
    pub(crate) fn new_unchecked(mat: DMatrix<C64>, symmetry: Symmetry) -> Self {
        Self { mat, symmetry }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `M − M†` relative to the largest entry of `M`.
    pub fn hermiticity_defect(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..=i {
                let d = (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    fn anti_hermiticity_defect(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..=i {
                let d = (self.mat[(i, j)] + self.mat[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    pub fn dagger(&self) -> OperatorMatrix {
        OperatorMatrix::new_unchecked(self.mat.adjoint(), self.symmetry)
    }

    pub fn mul(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::new_unchecked(&self.mat * &other.mat, Symmetry::General)
    }

    pub fn scale(&self, z: C64) -> OperatorMatrix {
        OperatorMatrix::new_unchecked(self.mat.map(|e| e * z), Symmetry::General)
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.mat * v
    }

    /// Largest entry magnitude of `self − other` restricted to the leading
    /// `block × block` sub-matrix.
    pub fn block_max_diff(&self, other: &OperatorMatrix, block: usize) -> f64 {
        let b = block.min(self.dim()).min(other.dim());
        let mut worst = 0.0f64;
        for i in 0..b {
            for j in 0..b {
                worst = worst.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        worst
    }

    /// 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            let s: f64 = (0..n).map(|i| self.mat[(i, j)].norm()).sum();
            worst = worst.max(s);
        }
        worst
    }
}

/// Identity matrix of the given dimension.
pub fn identity(dim: usize) -> OperatorMatrix {
    OperatorMatrix::new_unchecked(DMatrix::identity(dim, dim), Symmetry::Hermitian)
}

// Padé(13) numerator coefficients for the scaling-and-squaring exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// ||A||_1 threshold below which Padé(13) is accurate without scaling.
const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling-and-squaring with a Padé(13) approximant.
///
/// Returns an overflow error when the result leaves the representable range;
/// this is the expected failure mode when the dilation parameter or the
/// truncation is pushed too far, and the offending input norm is reported.
pub fn matrix_exponential(m: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = m.dim();
    let a = m.as_matrix();
    let norm = m.norm_one();
    if !norm.is_finite() {
        return Err(IolError::Overflow { norm });
    }

    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scale = C64::new((0.5f64).powi(s as i32), 0.0);
    let a_s = a.map(|z| z * scale);

    let eye = DMatrix::<C64>::identity(n, n);
    let a2 = &a_s * &a_s;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let c = |k: usize| C64::new(PADE13[k], 0.0);
    let w1 = &a6 * c(13) + &a4 * c(11) + &a2 * c(9);
    let w2 = &a6 * &w1 + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &eye * c(1);
    let u = &a_s * &w2;
    let v1 = &a6 * c(12) + &a4 * c(10) + &a2 * c(8);
    let v = &a6 * &v1 + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &eye * c(0);

    let num = &v + &u;
    let den = &v - &u;
    let lu = den.lu();
    let mut r = lu
        .solve(&num)
        .ok_or(IolError::Conditioning { estimate: f64::INFINITY })?;

    for _ in 0..s {
        r = &r * &r;
        if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(IolError::Overflow { norm });
        }
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(IolError::Overflow { norm });
    }
    Ok(OperatorMatrix::new_unchecked(r, Symmetry::General))
}

/// Eigendecomposition of a Hermitian-tagged matrix: real eigenvalues
/// (ascending) and the unitary eigenvector matrix.
pub fn hermitian_eigen(m: &OperatorMatrix) -> Result<(Vec<f64>, DMatrix<C64>)> {
    if m.symmetry() != Symmetry::Hermitian {
        return Err(IolError::Config("hermitian_eigen requires a hermitian-tagged matrix".into()));
    }
    let se = m.as_matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<C64>::zeros(m.dim(), m.dim());
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &se.eigenvectors.column(i));
    }
    Ok((vals, vecs))
}

/// Spectral-route exponential `exp(M) = U exp(Λ) U†` for Hermitian `M`.
///
/// Serves as the independent oracle against the Padé route.
pub fn expm_hermitian_spectral(m: &OperatorMatrix) -> Result<OperatorMatrix> {
    let (vals, vecs) = hermitian_eigen(m)?;
    let n = m.dim();
    let mut exp_l = DMatrix::<C64>::zeros(n, n);
    for (i, &l) in vals.iter().enumerate() {
        let e = l.exp();
        if !e.is_finite() {
            return Err(IolError::Overflow { norm: m.norm_one() });
        }
        exp_l[(i, i)] = C64::new(e, 0.0);
    }
    let r = &vecs * exp_l * vecs.adjoint();
    Ok(OperatorMatrix::new_unchecked(r, Symmetry::General))
}

/// Inverse by LU with partial pivoting plus one step of iterative
/// refinement. Returns the inverse together with the 1-norm condition
/// estimate `‖A‖₁·‖A⁻¹‖₁`; conditioning is never silent.
pub fn inverse_with_condition(m: &OperatorMatrix) -> Result<(OperatorMatrix, f64)> {
    let n = m.dim();
    let a = m.as_matrix();
    let lu = a.clone().lu();
    let eye = DMatrix::<C64>::identity(n, n);
    let mut x = lu
        .solve(&eye)
        .ok_or(IolError::Conditioning { estimate: f64::INFINITY })?;
    // one refinement step: X += A⁻¹(I − AX)
    let r = &eye - a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let inv = OperatorMatrix::new_unchecked(x, Symmetry::General);
    let cond = m.norm_one() * inv.norm_one();
    Ok((inv, cond))
}

/// Eigenvalues of a general complex matrix via the Schur form.
pub fn complex_eigenvalues(m: &OperatorMatrix) -> Result<Vec<C64>> {
    m.as_matrix()
        .clone()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| {
            IolError::NumericalConsistency("complex Schur iteration failed to converge".into())
        })
}
