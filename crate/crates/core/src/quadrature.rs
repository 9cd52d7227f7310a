//! Gauss–Hermite and Gauss–Legendre rules.
//!
//! Nodes come from the Golub–Welsch Jacobi matrix in both cases. The
//! Hermite weights do not: the eigenvector first components scale like
//! `exp(−t_k²/2)` at the extreme nodes and their absolute floating-point
//! error destroys the weights there, which any integrand with support at
//! large `|t|` detects once the `e^{−t²}` weight is unfolded. Instead the
//! *effective* weights `w_k·e^{t_k²} = 1/(n·φ_{n−1}(t_k)²)` are computed
//! from the normalized oscillator-function recurrence, which is stable at
//! every node.

use nalgebra::DMatrix;

fn jacobi_nodes(off_diag: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = off_diag.len() + 1;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for (k, &b) in off_diag.iter().enumerate() {
        j[(k, k + 1)] = b;
        j[(k + 1, k)] = b;
    }
    let se = j.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let nodes: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let first: Vec<f64> = order.iter().map(|&i| se.eigenvectors[(0, i)]).collect();
    (nodes, first)
}

/// Normalized oscillator function `φ_n(t) = H_n(t)e^{−t²/2}/√(2ⁿn!√π)` at
/// real argument, by the normalized recurrence.
fn oscillator_fn(n: usize, t: f64) -> f64 {
    let phi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * t * t).exp();
    if n == 0 {
        return phi0;
    }
    let mut pm = phi0;
    let mut p = 2.0f64.sqrt() * t * phi0;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * t * p - (kf / (kf + 1.0)).sqrt() * pm;
        pm = p;
        p = next;
    }
    p
}

/// Gauss–Hermite rule: integrates `e^{−t²}·f(t)` exactly for polynomial `f`
/// up to degree `2n−1`. Returns `(nodes, weights)` with the plain weights
/// `w_k`; see [`gauss_hermite_effective`] for the unfolded form.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (t, weff) = gauss_hermite_effective(n);
    let w = t
        .iter()
        .zip(&weff)
        .map(|(tk, wk)| wk * (-tk * tk).exp())
        .collect();
    (t, w)
}

/// Gauss–Hermite nodes with the effective weights `w_k·e^{t_k²}`, the form
/// needed to integrate an integrand that already contains its Gaussian
/// decay. `w_eff = 1/(n·φ_{n−1}(t_k)²)`, stable at every node.
pub fn gauss_hermite_effective(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let (nodes, _) = jacobi_nodes(&off);
    let weff = nodes
        .iter()
        .map(|&t| {
            let phi = oscillator_fn(n - 1, t);
            1.0 / (n as f64 * phi * phi)
        })
        .collect();
    (nodes, weff)
}

/// Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (nodes, first) = jacobi_nodes(&off);
    let weights = first.iter().map(|v| 2.0 * v * v).collect();
    (nodes, weights)
}
