//! Closed-form entanglement measures used to cross-check the decompositions.
//! Nothing here calls into the Schmidt or generalized Schmidt code.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::state::StateVector;

/// Eigenvalues of a density matrix below this are treated as zero when taking
/// matrix square roots.
const SQRT_FLOOR: f64 = 1e-14;

fn require_qubits(state: &StateVector, n: usize) -> Result<()> {
    if state.num_qubits() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "expected {n} qubits, got {}",
            state.num_qubits()
        )))
    }
}

/// `2 |a00 a11 - a01 a10|`.
pub fn pure2_concurrence_oracle(state: &StateVector) -> Result<f64> {
    require_qubits(state, 2)?;
    let a = state.amplitudes();
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0))
}

fn sigma_yy() -> DMatrix<Complex64> {
    // Y (x) Y is real: anti-diagonal (-1, 1, 1, -1)
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(m.clone());
    let roots = eig.eigenvalues.map(|e| if e > SQRT_FLOOR { e.sqrt() } else { 0.0 });
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&roots.map(|x| Complex64::new(x, 0.0)));
    v * d * v.adjoint()
}

/// Concurrence of a two-qubit density matrix from the spin-flipped state
/// `(Y (x) Y) rho* (Y (x) Y)`.
///
/// The square roots of the eigenvalues of `sqrt(rho) rho~ sqrt(rho)` are taken
/// as the singular values of `sqrt(rho) sqrt(rho~)`, which avoids square roots
/// of rounding noise on rank-deficient inputs.
pub fn wootters_mixed_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit density matrix needed, got dimension {}",
            rho.dim()
        )));
    }
    let rho = DensityMatrix::new(rho.matrix().clone())?;
    let yy = sigma_yy();
    let sqrt_rho = hermitian_sqrt(rho.matrix());
    let sqrt_flipped = &yy * sqrt_rho.conjugate() * &yy;
    let mut s: Vec<f64> = (&sqrt_rho * sqrt_flipped).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// Three-tangle `4 |d1 - 2 d2 + 4 d3|` from the Cayley hyperdeterminant.
pub fn three_tangle(state: &StateVector) -> Result<f64> {
    require_qubits(state, 3)?;
    let a = |i: usize| state.amplitude(i);
    let (a000, a001, a010, a011) = (a(0), a(1), a(2), a(3));
    let (a100, a101, a110, a111) = (a(4), a(5), a(6), a(7));
    let d1 =
        a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 + a010 * a010 * a101 * a101 + a100 * a100 * a011 * a011;
    let d2 = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    Ok((4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm()).min(1.0))
}
