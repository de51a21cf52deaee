//! Independent finite-difference eigensolver.
//!
//! Builds `−d²/dx² + V` with the three-point stencil and finds the lowest
//! eigenvalues by Sturm-sequence bisection, eigenvectors by inverse
//! iteration. Nothing here touches superpotentials, parameter maps or the
//! discrete `A` operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::spectrum::{Provenance, Spectrum, Wavefunction, SIGN_FLOOR};

/// Default bisection bracket width.
pub const DEFAULT_BISECTION_TOL: f64 = 1e-6;
/// Relative residual `‖Tv − μv‖/‖v‖` accepted by inverse iteration.
pub const EIGENVECTOR_RESIDUAL: f64 = 1e-8;
pub const MAX_INVERSE_ITERATIONS: usize = 5;

const PIVOT_GUARD: f64 = 1e-300;

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Self {
        assert!(!diagonal.is_empty(), "empty matrix");
        assert_eq!(off_diagonal.len() + 1, diagonal.len(), "off-diagonal length");
        Self {
            diagonal,
            off_diagonal,
        }
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_finite(&self) -> bool {
        self.diagonal.iter().chain(&self.off_diagonal).all(|v| v.is_finite())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diagonal[i] * x[i];
                if i > 0 {
                    y += self.off_diagonal[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off_diagonal[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `lambda` (count of negative
    /// pivots in the LDLᵀ factorization of `T − λI`).
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = self.diagonal[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let safe = if q.abs() < PIVOT_GUARD {
                PIVOT_GUARD.copysign(q)
            } else {
                q
            };
            let e = self.off_diagonal[i - 1];
            q = (self.diagonal[i] - lambda) - e * e / safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }

    fn infinity_norm(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }
}

/// `diagonal_i = 2/h² + V(x_i)`, `off_diagonal = −1/h²`.
pub fn build_tridiagonal(potential: impl Fn(f64) -> f64, grid: &Grid) -> TridiagonalMatrix {
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let diagonal = grid.nodes().into_iter().map(|x| 2.0 * inv_h2 + potential(x)).collect();
    TridiagonalMatrix::new(diagonal, vec![-inv_h2; grid.len() - 1])
}

/// The `k` smallest eigenvalues, each bracketed to width `≤ tol`.
pub fn lowest_eigenvalues(t: &TridiagonalMatrix, k: usize, tol: f64) -> Result<Spectrum> {
    assert!(k <= t.len(), "asked for {k} eigenvalues of a {}x{} matrix", t.len(), t.len());
    if !t.is_finite() || tol.is_nan() || tol <= 0.0 {
        return Err(Error::ToleranceUnreachable { tol });
    }
    let (lo, hi) = t.gershgorin();
    let pad = 1.0 + 1e-12 * (lo.abs() + hi.abs());
    let (lo, hi) = (lo - pad, hi + pad);
    let mut energies = Vec::with_capacity(k);
    for index in 0..k {
        // eigenvalue `index` is the smallest λ with sturm_count(λ) > index
        let mut a = lo;
        let mut b = hi;
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                return Err(Error::ToleranceUnreachable { tol });
            }
            if t.sturm_count(mid) > index {
                b = mid;
            } else {
                a = mid;
            }
        }
        energies.push(0.5 * (a + b));
    }
    Ok(Spectrum::from_energies(&energies, Provenance::Oracle))
}

/// Converged eigenpair from inverse iteration; `vector` has unit Euclidean
/// norm and the same sign convention as [`Wavefunction`].
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    /// Rayleigh quotient of the returned vector.
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖Tv − value·v‖` with `‖v‖ = 1`.
    pub residual: f64,
    pub iterations: usize,
}

impl Eigenpair {
    pub fn wavefunction(&self, grid: &Grid) -> Wavefunction {
        Wavefunction::new(self.vector.clone(), *grid)
    }
}

/// Inverse iteration with shift `lambda`, switching to the Rayleigh
/// quotient as the shift once the iterate has locked on.
pub fn eigenvector(t: &TridiagonalMatrix, lambda: f64) -> Result<Eigenpair> {
    let n = t.len();
    let regularization = f64::EPSILON * t.infinity_norm().max(1.0);
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * (0.7 * i as f64).sin() + i as f64 / n as f64)
        .collect();
    normalize(&mut v);
    let mut shift = lambda;
    let mut residual = f64::INFINITY;
    for iteration in 1..=MAX_INVERSE_ITERATIONS {
        v = solve_shifted(t, shift, &v, regularization);
        if !normalize(&mut v) {
            break;
        }
        let tv = t.matvec(&v);
        let mu: f64 = tv.iter().zip(&v).map(|(a, b)| a * b).sum();
        residual = tv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - mu * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= EIGENVECTOR_RESIDUAL {
            fix_sign(&mut v);
            return Ok(Eigenpair {
                value: mu,
                vector: v,
                residual,
                iterations: iteration,
            });
        }
        if iteration >= 2 {
            shift = mu;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_INVERSE_ITERATIONS,
        residual,
    })
}

fn normalize(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || norm <= 0.0 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

fn fix_sign(v: &mut [f64]) {
    if v.iter().find(|x| x.abs() > SIGN_FLOOR).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Solves `(T − σI)x = rhs` by Gaussian elimination with partial pivoting.
/// Zero pivots are replaced by `regularization`.
fn solve_shifted(t: &TridiagonalMatrix, sigma: f64, rhs: &[f64], regularization: f64) -> Vec<f64> {
    let n = t.len();
    // row i of U holds (u0[i], u1[i], u2[i]) at columns i, i+1, i+2
    let mut u0: Vec<f64> = t.diagonal.iter().map(|d| d - sigma).collect();
    let mut u1: Vec<f64> = t.off_diagonal.clone();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut lower: Vec<f64> = t.off_diagonal.clone();
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        if lower[i].abs() > u0[i].abs() {
            // swap rows i and i+1
            let next_diag = t.diagonal[i + 1] - sigma;
            let next_upper = if i + 2 < n { t.off_diagonal[i + 1] } else { 0.0 };
            let (p0, p1, p2) = (lower[i], next_diag, next_upper);
            let (o0, o1) = (u0[i], u1[i]);
            u0[i] = p0;
            u1[i] = p1;
            u2[i] = p2;
            b.swap(i, i + 1);
            let m = o0 / p0;
            u0[i + 1] = o1 - m * p1;
            u1[i + 1] = -m * p2;
            b[i + 1] -= m * b[i];
        } else {
            if u0[i] == 0.0 {
                u0[i] = regularization;
            }
            let m = lower[i] / u0[i];
            u0[i + 1] -= m * u1[i];
            b[i + 1] -= m * b[i];
        }
        lower[i] = 0.0;
    }
    if u0[n - 1] == 0.0 {
        u0[n - 1] = regularization;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / u0[i];
    }
    x
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    /// `|exact − oracle|` per level, over the common prefix.
    pub differences: Vec<f64>,
    pub max_difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn compare_spectra(exact: &Spectrum, oracle: &Spectrum, tol: f64) -> SpectrumComparison {
    let differences: Vec<f64> = exact
        .entries
        .iter()
        .zip(&oracle.entries)
        .map(|(a, b)| (a.energy - b.energy).abs())
        .collect();
    let max_difference = differences.iter().copied().fold(0.0, f64::max);
    SpectrumComparison {
        pass: max_difference <= tol,
        differences,
        max_difference,
        tolerance: tol,
    }
}
