//! Two-qubit Schmidt coordinates `(U1 (x) U2)(l0|00> + e^{i alpha} l1|11>)`
//! with `Ui = Rz(phi_i) Ry(theta_i)`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{make_state, StateVector};
use crate::su2::{frame_decompose, frame_unitary, wrap_angle, LocalFrame, SingleQubitUnitary};
use crate::tolerance::{EPS_NORM, GSD_LAMBDA_ZERO, MAXIMAL_GAP, TRAJECTORY_MAXIMAL_EXIT, ZERO_AMPLITUDE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitCoordinates {
    pub lambda0: f64,
    pub lambda1: f64,
    pub alpha: f64,
    pub frame1: LocalFrame,
    pub frame2: LocalFrame,
    /// Set when the maximally entangled representative with `frame2 = (0,0)` was chosen.
    pub maximal_gauge_fixed: bool,
}

impl TwoQubitCoordinates {
    pub fn is_maximal(&self) -> bool {
        (self.lambda0 - self.lambda1).abs() < MAXIMAL_GAP
    }

    pub fn frames(&self) -> [LocalFrame; 2] {
        [self.frame1, self.frame2]
    }

    /// Check ranges and normalization.
    pub fn validate(&self) -> Result<()> {
        let bad = |f: &str, m: String| Err(Error::schema(f, m));
        if !(self.lambda1 >= 0.0 && self.lambda1 <= self.lambda0 + EPS_NORM) {
            return bad(
                "lambda",
                format!(
                    "need 0 <= lambda1 <= lambda0, got {} and {}",
                    self.lambda0, self.lambda1
                ),
            );
        }
        let n = self.lambda0 * self.lambda0 + self.lambda1 * self.lambda1;
        if (n - 1.0).abs() > EPS_NORM {
            return bad("lambda", format!("squares sum to {n}"));
        }
        check_angle("alpha", self.alpha)?;
        check_frame("frames", &self.frame1)?;
        check_frame("frames", &self.frame2)
    }
}

pub(crate) fn check_angle(field: &str, a: f64) -> Result<()> {
    if a.is_finite() && (0.0..std::f64::consts::TAU).contains(&a) {
        Ok(())
    } else {
        Err(Error::schema(field, format!("angle {a} outside [0, 2pi)")))
    }
}

pub(crate) fn check_frame(field: &str, f: &LocalFrame) -> Result<()> {
    check_angle(field, f.phi)?;
    if f.theta.is_finite() && (0.0..=std::f64::consts::PI).contains(&f.theta) {
        Ok(())
    } else {
        Err(Error::schema(field, format!("latitude {} outside [0, pi]", f.theta)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexConcurrence {
    pub value: Complex64,
}

impl ComplexConcurrence {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

/// Orthonormal completion `(-conj(v1), conj(v0))` of a unit vector.
pub(crate) fn complement(v: [Complex64; 2]) -> [Complex64; 2] {
    [-v[1].conj(), v[0].conj()]
}

/// Unit eigenvector for the larger eigenvalue of a Hermitian 2x2 matrix.
pub(crate) fn dominant_eigenvector(h: &Matrix2<Complex64>) -> [Complex64; 2] {
    let (a, d, b) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
    let r = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    let top = (a + d) / 2.0 + r;
    let v = if b.norm() == 0.0 {
        if a >= d {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        }
    } else if a >= d {
        [Complex64::new(top - d, 0.0), b.conj()]
    } else {
        [b, Complex64::new(top - a, 0.0)]
    };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Phase a unit vector so its largest-modulus entry is real positive; returns
/// the applied factor.
fn lead_phase(v: [Complex64; 2]) -> Complex64 {
    let lead = if v[1].norm() > v[0].norm() + 1e-12 { v[1] } else { v[0] };
    if lead.norm() > 0.0 {
        lead.conj() / lead.norm()
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Singular value decomposition `m = u diag(s) w^T` with `s` descending and the
/// columns of `u` phased so their largest-modulus entry is real positive.
///
/// Closed form: `u` from the eigenvectors of `m m^dagger`, then `s` and `w`
/// from the rows of `u^dagger m`, so small singular values keep full absolute
/// precision.
pub(crate) fn svd2(m: &Matrix2<Complex64>) -> (Matrix2<Complex64>, [f64; 2], Matrix2<Complex64>) {
    let mut u0 = dominant_eigenvector(&(m * m.adjoint()));
    let p = lead_phase(u0);
    u0 = [u0[0] * p, u0[1] * p];
    let mut u1 = complement(u0);
    let p = lead_phase(u1);
    u1 = [u1[0] * p, u1[1] * p];

    // rows of u^dagger m are s_k w_k^T
    let row = |u: [Complex64; 2]| -> [Complex64; 2] {
        [
            u[0].conj() * m[(0, 0)] + u[1].conj() * m[(1, 0)],
            u[0].conj() * m[(0, 1)] + u[1].conj() * m[(1, 1)],
        ]
    };
    let r0 = row(u0);
    let r1 = row(u1);
    let s0 = (r0[0].norm_sqr() + r0[1].norm_sqr()).sqrt();
    let w0 = if s0 > 0.0 {
        [r0[0] / s0, r0[1] / s0]
    } else {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    };
    let mut w1 = complement(w0);
    let proj = r1[0] * w1[0].conj() + r1[1] * w1[1].conj();
    let s1 = proj.norm();
    let p = if s1 > ZERO_AMPLITUDE {
        proj / s1
    } else {
        // a null right vector is not tied to u; give it the same convention
        lead_phase(w1)
    };
    w1 = [w1[0] * p, w1[1] * p];

    if s1 > s0 {
        let u = Matrix2::new(u1[0], u0[0], u1[1], u0[1]);
        let w = Matrix2::new(w1[0], w0[0], w1[1], w0[1]);
        return (u, [s1, s0], w);
    }
    let u = Matrix2::new(u0[0], u1[0], u0[1], u1[1]);
    let w = Matrix2::new(w0[0], w1[0], w0[1], w1[1]);
    (u, [s0, s1], w)
}

fn amplitude_matrix(state: &StateVector) -> Matrix2<Complex64> {
    let a = state.amplitudes();
    Matrix2::new(a[0], a[1], a[2], a[3])
}

/// Canonical Schmidt coordinates of a two-qubit state. Maximally entangled
/// inputs are returned in the `frame2 = (0,0)` gauge.
pub fn schmidt_decompose(state: &StateVector) -> Result<TwoQubitCoordinates> {
    if state.num_qubits() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Schmidt decomposition needs 2 qubits, got {}",
            state.num_qubits()
        )));
    }
    let (u, s, w) = svd2(&amplitude_matrix(state));
    schmidt_from_svd(&u, s, &w)
}

/// Coordinates of `(u (x) w)(s0|00> + s1|11>)` for unitary `u`, `w`.
pub(crate) fn schmidt_from_svd(
    u: &Matrix2<Complex64>,
    s: [f64; 2],
    w: &Matrix2<Complex64>,
) -> Result<TwoQubitCoordinates> {
    let norm = (s[0] * s[0] + s[1] * s[1]).sqrt();
    let (l0, l1) = (s[0] / norm, s[1] / norm);
    if l1 <= GSD_LAMBDA_ZERO {
        let f1 = LocalFrame::of_pure_state([u[(0, 0)], u[(1, 0)]]);
        let f2 = LocalFrame::of_pure_state([w[(0, 0)], w[(1, 0)]]);
        return Ok(TwoQubitCoordinates {
            lambda0: 1.0,
            lambda1: 0.0,
            alpha: 0.0,
            frame1: f1,
            frame2: f2,
            maximal_gauge_fixed: false,
        });
    }
    let e1 = frame_decompose(&SingleQubitUnitary::new(*u))?;
    let e2 = frame_decompose(&SingleQubitUnitary::new(*w))?;
    let coords = TwoQubitCoordinates {
        lambda0: l0,
        lambda1: l1,
        alpha: wrap_angle(e1.phi_prime + e2.phi_prime),
        frame1: e1.frame(),
        frame2: e2.frame(),
        maximal_gauge_fixed: false,
    };
    if coords.is_maximal() {
        canonicalize_maximal(&coords)
    } else {
        Ok(coords)
    }
}

/// `2 e^{i alpha} l0 l1`.
pub fn complex_concurrence2(coords: &TwoQubitCoordinates) -> ComplexConcurrence {
    ComplexConcurrence {
        value: Complex64::from_polar(2.0 * coords.lambda0 * coords.lambda1, coords.alpha),
    }
}

/// `(U1 (x) U2)(l0|00> + e^{i alpha} l1|11>)`.
pub fn assemble2(coords: &TwoQubitCoordinates) -> StateVector {
    let u1 = frame_unitary(coords.frame1).0;
    let u2 = frame_unitary(coords.frame2).0;
    let a = Complex64::new(coords.lambda0, 0.0);
    let b = Complex64::from_polar(coords.lambda1, coords.alpha);
    let amps: Vec<Complex64> = (0..4)
        .map(|idx| {
            let (i, j) = (idx >> 1, idx & 1);
            u1[(i, 0)] * u2[(j, 0)] * a + u1[(i, 1)] * u2[(j, 1)] * b
        })
        .collect();
    make_state(&amps, 2).expect("assembled state is nonzero")
}

fn diag_phase(alpha: f64) -> Matrix2<Complex64> {
    Matrix2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(1.0, alpha),
    )
}

/// `V` with `state ∝ (V (x) I)(|00> + |11>)`, exact when `l0 = l1`.
fn ricochet_operator(coords: &TwoQubitCoordinates) -> Matrix2<Complex64> {
    frame_unitary(coords.frame1).0 * diag_phase(coords.alpha) * frame_unitary(coords.frame2).0.transpose()
}

fn maximal_coords(
    coords: &TwoQubitCoordinates,
    frame1: LocalFrame,
    frame2: LocalFrame,
    alpha: f64,
) -> TwoQubitCoordinates {
    TwoQubitCoordinates {
        lambda0: coords.lambda0,
        lambda1: coords.lambda1,
        alpha,
        frame1,
        frame2,
        maximal_gauge_fixed: false,
    }
}

fn require_gap(coords: &TwoQubitCoordinates, tol: f64) -> Result<()> {
    if (coords.lambda0 - coords.lambda1).abs() < tol {
        Ok(())
    } else {
        Err(Error::NotMaximal((coords.lambda0 - coords.lambda1).abs()))
    }
}

/// Move all local rotation of a maximally entangled pair onto qubit 1 using
/// `(A (x) B)|Phi> = (A B^T (x) I)|Phi>`, leaving `frame2 = (0,0)`.
pub fn canonicalize_maximal(coords: &TwoQubitCoordinates) -> Result<TwoQubitCoordinates> {
    require_gap(coords, MAXIMAL_GAP)?;
    let mut out = transport_fixing_frame2(coords, LocalFrame::IDENTITY)?;
    out.maximal_gauge_fixed = true;
    Ok(out)
}

/// Equivalent maximally entangled coordinates with `frame2` prescribed. Also
/// accepted inside the wider trajectory band, where the state error is of
/// order `|l0 - l1|`.
pub fn transport_fixing_frame2(coords: &TwoQubitCoordinates, frame2: LocalFrame) -> Result<TwoQubitCoordinates> {
    require_gap(coords, TRAJECTORY_MAXIMAL_EXIT)?;
    let target = ricochet_operator(coords) * frame_unitary(frame2).0.conjugate();
    let e = frame_decompose(&SingleQubitUnitary::new(target))?;
    Ok(maximal_coords(coords, e.frame(), frame2, e.phi_prime))
}

/// Equivalent maximally entangled coordinates with `frame1` prescribed.
pub fn transport_fixing_frame1(coords: &TwoQubitCoordinates, frame1: LocalFrame) -> Result<TwoQubitCoordinates> {
    require_gap(coords, TRAJECTORY_MAXIMAL_EXIT)?;
    let target = ricochet_operator(coords).transpose() * frame_unitary(frame1).0.conjugate();
    let e = frame_decompose(&SingleQubitUnitary::new(target))?;
    Ok(maximal_coords(coords, frame1, e.frame(), e.phi_prime))
}

/// Bell pair `(|00> + e^{i alpha}|11>)/sqrt 2` in canonical coordinates.
pub fn bell_coordinates(alpha: f64) -> TwoQubitCoordinates {
    TwoQubitCoordinates {
        lambda0: FRAC_1_SQRT_2,
        lambda1: FRAC_1_SQRT_2,
        alpha: wrap_angle(alpha),
        frame1: LocalFrame::IDENTITY,
        frame2: LocalFrame::IDENTITY,
        maximal_gauge_fixed: true,
    }
}
