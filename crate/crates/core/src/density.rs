use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::{EPS_EIG, EPS_NORM};

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validate hermiticity, trace and positivity.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotDensityMatrix(format!(
                "{}x{} is not square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > EPS_NORM {
            return Err(Error::NotDensityMatrix(format!("hermiticity defect {herm:.3e}")));
        }
        let tr = entries.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > EPS_NORM {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let rho = DensityMatrix { entries };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -EPS_EIG {
            return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(entries: DMatrix<Complex64>) -> Self {
        DensityMatrix { entries }
    }

    /// `|psi><psi|` for an amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Self {
        let n = amplitudes.len();
        DensityMatrix {
            entries: DMatrix::from_fn(n, n, |r, c| amplitudes[r] * amplitudes[c].conj()),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant().re
    }
}

/// Point in the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochPoint { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Polar angle from +z, in `[0, pi]`.
    pub fn latitude(&self) -> f64 {
        let r = self.norm();
        if r == 0.0 {
            0.0
        } else {
            (self.z / r).clamp(-1.0, 1.0).acos()
        }
    }

    /// Azimuth in `[0, 2pi)`; 0 on the z axis.
    pub fn longitude(&self) -> f64 {
        if self.x == 0.0 && self.y == 0.0 {
            0.0
        } else {
            crate::su2::wrap_angle(self.y.atan2(self.x))
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// `(Tr(rho X), Tr(rho Y), Tr(rho Z))` for a single-qubit density matrix.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<BlochPoint> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Bloch vector needs a 2x2 matrix, got {0}x{0}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    Ok(BlochPoint {
        x: 2.0 * m[(0, 1)].re,
        y: -2.0 * m[(0, 1)].im,
        z: (m[(0, 0)] - m[(1, 1)]).re,
    })
}
