//! Single-qubit unitaries, the `Rz(phi) Ry(theta)` frame parameterization and
//! ZYZ Euler decomposition.
//!
//! Rotations use the half-angle convention `Rz(phi) = exp(-i Z phi / 2)`,
//! `Ry(theta) = exp(-i Y theta / 2)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::{EPS_MATCH, GIMBAL, ZERO_AMPLITUDE};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Reduce an angle to `[0, 2pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed circular distance reduced to `[-pi, pi)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b + PI).rem_euclid(TAU) - PI;
    if d >= PI {
        d - TAU
    } else {
        d
    }
}

/// Wrap a half-angle rotation parameter. Shifting a `Rz`/`Ry` angle by `2pi`
/// negates the matrix, so the returned flag says whether an odd number of such
/// shifts happened.
fn wrap_rotation(x: f64) -> (f64, bool) {
    let w = wrap_angle(x);
    let turns = ((x - w) / TAU).round() as i64;
    (w, turns.rem_euclid(2) == 1)
}

/// A 2x2 unitary acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitUnitary(pub Matrix2<Complex64>);

impl SingleQubitUnitary {
    pub fn new(m: Matrix2<Complex64>) -> Self {
        SingleQubitUnitary(m)
    }

    /// Build from a unitary, rejecting matrices off unitarity by more than `EPS_MATCH`.
    pub fn checked(m: Matrix2<Complex64>) -> Result<Self> {
        let dev = unitarity_deviation2(&m);
        if dev > EPS_MATCH {
            return Err(Error::NotUnitary(dev));
        }
        Ok(SingleQubitUnitary(m))
    }

    pub fn identity() -> Self {
        SingleQubitUnitary(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(2, 2, |r, c| self.0[(r, c)])
    }

    pub fn adjoint(&self) -> Self {
        SingleQubitUnitary(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        SingleQubitUnitary(self.0 * other.0)
    }

    pub fn det(&self) -> Complex64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        SingleQubitUnitary(self.0 * z)
    }

    /// Max-entry deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation2(&self.0)
    }
}

fn unitarity_deviation2(m: &Matrix2<Complex64>) -> f64 {
    let p = m.adjoint() * m - Matrix2::identity();
    p.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn rz(phi: f64) -> SingleQubitUnitary {
    SingleQubitUnitary(Matrix2::new(
        Complex64::from_polar(1.0, -phi / 2.0),
        ZERO,
        ZERO,
        Complex64::from_polar(1.0, phi / 2.0),
    ))
}

pub fn ry(theta: f64) -> SingleQubitUnitary {
    let (s, c) = (theta / 2.0).sin_cos();
    SingleQubitUnitary(Matrix2::new(
        Complex64::new(c, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(c, 0.0),
    ))
}

pub fn rx(theta: f64) -> SingleQubitUnitary {
    let (s, c) = (theta / 2.0).sin_cos();
    SingleQubitUnitary(Matrix2::new(
        Complex64::new(c, 0.0),
        Complex64::new(0.0, -s),
        Complex64::new(0.0, -s),
        Complex64::new(c, 0.0),
    ))
}

/// `diag(1, e^{i phase})`.
pub fn phase_gate(phase: f64) -> SingleQubitUnitary {
    SingleQubitUnitary(Matrix2::new(ONE, ZERO, ZERO, Complex64::from_polar(1.0, phase)))
}

/// Longitude/latitude pair parameterizing `Rz(phi) Ry(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalFrame {
    pub phi: f64,
    pub theta: f64,
}

impl LocalFrame {
    pub const IDENTITY: LocalFrame = LocalFrame { phi: 0.0, theta: 0.0 };

    pub fn new(phi: f64, theta: f64) -> Self {
        LocalFrame { phi, theta }
    }

    /// Unit vector `Rz(phi) Ry(theta) z`.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Great-circle distance between the two frame directions.
    pub fn geodesic(&self, other: &LocalFrame) -> f64 {
        let a = self.direction();
        let b = other.direction();
        let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
        // acos loses precision near 1; use the chord length there.
        let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
        if dot > 0.9 {
            2.0 * (chord / 2.0).asin()
        } else {
            dot.acos()
        }
    }

    /// Frame whose unitary sends `|0>` to the pure state `v` (up to phase), with
    /// longitude 0 at the poles.
    pub fn of_pure_state(v: [Complex64; 2]) -> Self {
        let (a, b) = (v[0].norm(), v[1].norm());
        let theta = 2.0 * b.atan2(a);
        let phi = if a <= ZERO_AMPLITUDE || b <= ZERO_AMPLITUDE || (PI - theta) <= 2.0 * GIMBAL || theta <= 2.0 * GIMBAL
        {
            0.0
        } else {
            wrap_angle(v[1].arg() - v[0].arg())
        };
        LocalFrame { phi, theta }
    }
}

/// `Rz(phi) Ry(theta)` for the given frame.
pub fn frame_unitary(frame: LocalFrame) -> SingleQubitUnitary {
    rz(frame.phi).mul(&ry(frame.theta))
}

/// `e^{i global_phase} Rz(phi) Ry(theta) Rz(phi_prime)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub phi_prime: f64,
    pub global_phase: f64,
}

impl EulerAngles {
    pub fn to_unitary(&self) -> SingleQubitUnitary {
        rz(self.phi)
            .mul(&ry(self.theta))
            .mul(&rz(self.phi_prime))
            .scaled(Complex64::from_polar(1.0, self.global_phase))
    }

    pub fn frame(&self) -> LocalFrame {
        LocalFrame::new(self.phi, self.theta)
    }

    fn at_pole(&self) -> Option<bool> {
        let (s, c) = (self.theta / 2.0).sin_cos();
        if s.abs() <= GIMBAL {
            Some(true)
        } else if c.abs() <= GIMBAL {
            Some(false)
        } else {
            None
        }
    }

    /// Move any z-rotation at a gimbal point into the trailing angle so that the
    /// frame longitude is 0 at the poles. Uses `Rz(a) Ry(0) = Ry(0) Rz(a)` and
    /// `Rz(a) Ry(pi) = Ry(pi) Rz(-a)`. Off the poles this is the identity.
    pub fn with_polar_phase_trailing(&self) -> EulerAngles {
        let (trailing, theta) = match self.at_pole() {
            None => return *self,
            Some(true) => (self.phi + self.phi_prime, 0.0),
            Some(false) => (self.phi_prime - self.phi, PI),
        };
        let (phi_prime, flip) = wrap_rotation(trailing);
        let mut global_phase = self.global_phase;
        if flip {
            global_phase += PI;
        }
        EulerAngles {
            phi: 0.0,
            theta,
            phi_prime,
            global_phase: wrap_angle(global_phase),
        }
    }
}

/// ZYZ decomposition `u = e^{i g} Rz(phi) Ry(theta) Rz(phi_prime)`.
///
/// The U(2) -> SU(2) projection divides by `sqrt(det u)` on the branch that puts
/// the argument of the (0,0) entry (or the (1,0) entry when the former
/// vanishes) in `(-pi/2, pi/2]`. At `theta` in `{0, pi}` the trailing angle is
/// set to 0 and all z-rotation is carried by `phi`.
pub fn zyz_decompose(u: &SingleQubitUnitary) -> Result<EulerAngles> {
    let dev = u.unitarity_deviation();
    if dev > EPS_MATCH {
        return Err(Error::NotUnitary(dev));
    }
    let mut root = u.det().sqrt();
    let mut v = u.0 / root;
    let pivot = if v[(0, 0)].norm() > ZERO_AMPLITUDE {
        v[(0, 0)]
    } else {
        v[(1, 0)]
    };
    let arg = pivot.arg();
    if arg <= -FRAC_PI_2 || arg > FRAC_PI_2 {
        root = -root;
        v = -v;
    }
    let mut global_phase = root.arg();

    let c = v[(0, 0)].norm();
    let s = v[(1, 0)].norm();
    let theta = 2.0 * s.atan2(c);
    let (phi, phi_prime) = if s <= GIMBAL {
        (-2.0 * v[(0, 0)].arg(), 0.0)
    } else if c <= GIMBAL {
        (2.0 * v[(1, 0)].arg(), 0.0)
    } else {
        let sum = -2.0 * v[(0, 0)].arg();
        let diff = 2.0 * v[(1, 0)].arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    let (phi, f1) = wrap_rotation(phi);
    let (phi_prime, f2) = wrap_rotation(phi_prime);
    if f1 != f2 {
        global_phase += PI;
    }
    Ok(EulerAngles {
        phi,
        theta,
        phi_prime,
        global_phase: wrap_angle(global_phase),
    })
}

/// ZYZ decomposition with polar z-rotation folded into the trailing angle.
/// This is the form every decomposition in the crate reads its frames from.
pub(crate) fn frame_decompose(u: &SingleQubitUnitary) -> Result<EulerAngles> {
    Ok(zyz_decompose(u)?.with_polar_phase_trailing())
}

/// Complete a unit vector to a unitary whose first column is `v`.
pub(crate) fn complete_column(v: [Complex64; 2]) -> SingleQubitUnitary {
    SingleQubitUnitary(Matrix2::new(v[0], -v[1].conj(), v[1], v[0].conj()))
}
