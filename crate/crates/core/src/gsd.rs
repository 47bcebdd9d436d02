//! Three-qubit generalized Schmidt coordinates.
//!
//! Every three-qubit pure state can be written, up to local unitaries, as
//!
//! ```text
//! l0|000> + e^{i varphi} l1|100> + l2|101> + l3|110> + l4|111>
//! ```
//!
//! with `l_k >= 0` and `varphi` in `[0, pi]`. [`gsd_canonical`] computes that
//! form together with the three local unitaries, [`to_alpha_form`] rewrites it
//! with `Rz(phi) Ry(theta)` frames and four relative phases, and
//! [`complex_concurrences3`] maps the phase form onto the complex plane.
//! [`invert_candidates`] goes the other way, from complex concurrences and
//! frames back to coordinates.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::density::{bloch_vector, BlochPoint};
use crate::error::{Error, Result};
use crate::schmidt::{check_angle, check_frame, complement, dominant_eigenvector, svd2};
use crate::state::{make_state, partial_trace, StateVector};
use crate::su2::{
    angle_diff, complete_column, frame_decompose, frame_unitary, wrap_angle, LocalFrame, SingleQubitUnitary,
};
use crate::tolerance::{EPS_NORM, GSD_CLEANUP, GSD_LAMBDA_ZERO, INVERT_UNIMODULAR, QUADRATIC_ZERO, RANK_ONE};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Basis indices of the five core terms, in `lambda` order.
pub const CORE_INDICES: [usize; 5] = [0b000, 0b100, 0b101, 0b110, 0b111];

/// Which route produced a canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsdBranch {
    /// Root of the determinant quadratic, by position in solver order.
    Root(usize),
    /// Root whose rank-one block vanished, so qubit 1 factorizes and `l0 = 0`.
    FirstQubitFactor(usize),
    /// Fully separable state.
    Product,
    /// Qubit 3 factorizes; qubits 1 and 2 carry a two-qubit Schmidt form.
    Pair12,
    /// Qubit 2 factorizes; qubits 1 and 3 carry a two-qubit Schmidt form.
    Pair13,
}

impl GsdBranch {
    /// True when the decomposition is one representative of a family of
    /// equally valid ones.
    pub fn is_family_representative(&self) -> bool {
        matches!(
            self,
            GsdBranch::FirstQubitFactor(_) | GsdBranch::Pair12 | GsdBranch::Pair13
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalGSD {
    pub lambda: [f64; 5],
    pub varphi: f64,
    pub u1: SingleQubitUnitary,
    pub u2: SingleQubitUnitary,
    pub u3: SingleQubitUnitary,
    pub branch: GsdBranch,
}

impl CanonicalGSD {
    pub fn core_amplitudes(&self) -> [Complex64; 8] {
        let mut core = [ZERO; 8];
        core[0] = Complex64::new(self.lambda[0], 0.0);
        core[4] = Complex64::from_polar(self.lambda[1], self.varphi);
        for k in 2..5 {
            core[CORE_INDICES[k]] = Complex64::new(self.lambda[k], 0.0);
        }
        core
    }

    /// `(u1 (x) u2 (x) u3)` applied to the core.
    pub fn reassemble(&self) -> StateVector {
        let amps = apply_local3(&self.core_amplitudes(), [&self.u1.0, &self.u2.0, &self.u3.0]);
        make_state(&amps, 3).expect("reassembled state is nonzero")
    }

    pub fn varphi_in_range(&self) -> bool {
        self.varphi <= PI + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeQubitCoordinates {
    pub lambda: [f64; 5],
    /// Relative phases of the `|100>, |101>, |110>, |111>` terms.
    pub alpha: [f64; 4],
    pub frames: [LocalFrame; 3],
}

impl ThreeQubitCoordinates {
    pub fn validate(&self) -> Result<()> {
        if self.lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::schema("lambda", "coefficients must be finite and nonnegative"));
        }
        let n: f64 = self.lambda.iter().map(|l| l * l).sum();
        if (n - 1.0).abs() > EPS_NORM {
            return Err(Error::schema("lambda", format!("squares sum to {n}")));
        }
        for a in self.alpha {
            check_angle("alpha", a)?;
        }
        for f in &self.frames {
            check_frame("frames", f)?;
        }
        Ok(())
    }

    /// The residual phase `alpha1 + alpha4 - alpha2 - alpha3`, equal to the
    /// core phase when all terms are present.
    pub fn core_phase(&self) -> f64 {
        wrap_angle(self.alpha[0] + self.alpha[3] - self.alpha[1] - self.alpha[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexConcurrenceSet {
    pub c12: Complex64,
    pub c13: Complex64,
    pub c23: Complex64,
    pub c123: Complex64,
}

impl ComplexConcurrenceSet {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.c12, self.c13, self.c23, self.c123]
    }

    pub fn max_diff(&self, other: &ComplexConcurrenceSet) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `(m1 (x) m2 (x) m3) v` for an 8-amplitude vector.
fn apply_local3(v: &[Complex64; 8], m: [&Matrix2<Complex64>; 3]) -> [Complex64; 8] {
    let mut out = [ZERO; 8];
    for (row, slot) in out.iter_mut().enumerate() {
        let (r1, r2, r3) = (row >> 2, (row >> 1) & 1, row & 1);
        let mut acc = ZERO;
        for (col, &x) in v.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            let (c1, c2, c3) = (col >> 2, (col >> 1) & 1, col & 1);
            acc += m[0][(r1, c1)] * m[1][(r2, c2)] * m[2][(r3, c3)] * x;
        }
        *slot = acc;
    }
    out
}

fn amplitudes8(state: &StateVector) -> [Complex64; 8] {
    let mut a = [ZERO; 8];
    a.copy_from_slice(state.amplitudes());
    a
}

fn block(v: &[Complex64; 8], b: usize) -> Matrix2<Complex64> {
    let o = 4 * b;
    Matrix2::new(v[o], v[o + 1], v[o + 2], v[o + 3])
}

fn det2(m: &Matrix2<Complex64>) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Roots `(x1, x2)` of `p x^2 + q x + r = 0` with `p != 0`, avoiding
/// cancellation.
fn quadratic_roots(p: Complex64, q: Complex64, r: Complex64) -> [Complex64; 2] {
    let mut disc = (q * q - p * r * 4.0).sqrt();
    if (q.conj() * disc).re < 0.0 {
        disc = -disc;
    }
    let w = -(q + disc) / 2.0;
    if w.norm() == 0.0 {
        return [ZERO, ZERO];
    }
    [w / p, r / w]
}

/// Normalized `(a, b)` pairs with `det(a T0 + b T1) = 0`; `None` when the
/// determinant vanishes identically.
fn pencil_roots(t0: &Matrix2<Complex64>, t1: &Matrix2<Complex64>) -> Option<Vec<(Complex64, Complex64)>> {
    let a = det2(t0);
    let c = det2(t1);
    let b = t0[(0, 0)] * t1[(1, 1)] + t1[(0, 0)] * t0[(1, 1)] - t0[(0, 1)] * t1[(1, 0)] - t1[(0, 1)] * t0[(1, 0)];
    if a.norm() < QUADRATIC_ZERO && b.norm() < QUADRATIC_ZERO && c.norm() < QUADRATIC_ZERO {
        return None;
    }
    let pairs: Vec<(Complex64, Complex64)> = if a.norm() < QUADRATIC_ZERO && c.norm() < QUADRATIC_ZERO {
        vec![(ONE, ZERO), (ZERO, ONE)]
    } else if a.norm() >= c.norm() {
        // a/b = y solves A y^2 + B y + C = 0
        quadratic_roots(a, b, c).iter().map(|&y| (y, ONE)).collect()
    } else {
        // b/a = x solves C x^2 + B x + A = 0
        quadratic_roots(c, b, a).iter().map(|&x| (ONE, x)).collect()
    };
    Some(
        pairs
            .into_iter()
            .map(|(x, y)| {
                let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
                (x / n, y / n)
            })
            .collect(),
    )
}

/// Reduced row echelon solve of `rows * x = rhs` with free variables at 0.
fn solve_with_free_zero(rows: &[[f64; 4]], rhs: &[f64]) -> [f64; 4] {
    let mut m: Vec<[f64; 5]> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| [r[0], r[1], r[2], r[3], b])
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..4 {
        let Some(p) = (row..m.len()).find(|&i| m[i][col].abs() > 1e-9) else {
            continue;
        };
        m.swap(row, p);
        let lead = m[row][col];
        m[row].iter_mut().for_each(|v| *v /= lead);
        let pivot = m[row];
        for (i, r) in m.iter_mut().enumerate() {
            if i != row && r[col].abs() > 1e-12 {
                let f = r[col];
                r.iter_mut().zip(pivot).for_each(|(v, p)| *v -= f * p);
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let mut x = [0.0; 4];
    for (r, c) in pivots {
        x[c] = m[r][4];
    }
    x
}

fn rank(rows: &[[f64; 4]]) -> usize {
    let mut m: Vec<[f64; 4]> = rows.to_vec();
    let mut r = 0;
    for col in 0..4 {
        let Some(p) = (r..m.len()).find(|&i| m[i][col].abs() > 1e-9) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r];
        for (i, row) in m.iter_mut().enumerate() {
            if i != r {
                let f = row[col] / pivot[col];
                row.iter_mut().zip(pivot).for_each(|(v, p)| *v -= f * p);
            }
        }
        r += 1;
    }
    r
}

/// Phase exponents `(g, a, b, c)` such that multiplying `|pqr>` by
/// `e^{i(g + a p + b q + c r)}` makes the chosen core terms real positive.
/// Terms are taken in the order 000, 101, 110, 111, 100, skipping zero
/// amplitudes and terms whose phase is already fixed by earlier ones.
fn phase_gauge(core: &[Complex64; 8]) -> [f64; 4] {
    const PRIORITY: [(usize, [f64; 4]); 5] = [
        (0b000, [1.0, 0.0, 0.0, 0.0]),
        (0b101, [1.0, 1.0, 0.0, 1.0]),
        (0b110, [1.0, 1.0, 1.0, 0.0]),
        (0b111, [1.0, 1.0, 1.0, 1.0]),
        (0b100, [1.0, 1.0, 0.0, 0.0]),
    ];
    let mut rows: Vec<[f64; 4]> = Vec::new();
    let mut rhs = Vec::new();
    for (idx, row) in PRIORITY {
        if core[idx] == ZERO {
            continue;
        }
        rows.push(row);
        if rank(&rows) < rows.len() {
            rows.pop();
            continue;
        }
        rhs.push(-core[idx].arg());
    }
    solve_with_free_zero(&rows, &rhs)
}

fn diag(phase: f64) -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, Complex64::from_polar(1.0, phase))
}

/// Shared tail of every route: `state = (l1 (x) l2 (x) l3) core` where `core`
/// should already be supported on the five GSD terms.
fn finish(mut core: [Complex64; 8], locals: [Matrix2<Complex64>; 3], branch: GsdBranch) -> Option<CanonicalGSD> {
    for idx in [0b001, 0b010, 0b011] {
        if core[idx].norm() > GSD_CLEANUP {
            return None;
        }
        core[idx] = ZERO;
    }
    for idx in CORE_INDICES {
        if core[idx].norm() < GSD_LAMBDA_ZERO {
            core[idx] = ZERO;
        }
    }
    let norm = core.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    for z in core.iter_mut() {
        *z /= norm;
    }

    let [g, a, b, c] = phase_gauge(&core);
    for (idx, z) in core.iter_mut().enumerate() {
        let (p, q, r) = ((idx >> 2) as f64, ((idx >> 1) & 1) as f64, (idx & 1) as f64);
        *z *= Complex64::from_polar(1.0, g + a * p + b * q + c * r);
    }

    let mut lambda = [0.0; 5];
    for (k, idx) in CORE_INDICES.iter().enumerate() {
        lambda[k] = core[*idx].norm();
    }
    let mut varphi = if lambda[1] > 0.0 {
        wrap_angle(core[0b100].arg())
    } else {
        0.0
    };
    if varphi > TAU - 1e-12 {
        varphi = 0.0;
    }

    let [l1, l2, l3] = locals;
    let u1 = l1 * diag(a).adjoint() * Complex64::from_polar(1.0, -g);
    let u2 = l2 * diag(b).adjoint();
    let u3 = l3 * diag(c).adjoint();
    Some(CanonicalGSD {
        lambda,
        varphi,
        u1: SingleQubitUnitary::new(u1),
        u2: SingleQubitUnitary::new(u2),
        u3: SingleQubitUnitary::new(u3),
        branch,
    })
}

/// Largest left singular vector and second singular value of the `j | rest`
/// reshaping.
fn cut(v: &[Complex64; 8], j: usize) -> ([Complex64; 2], f64) {
    let shift = 3 - j;
    let mut m = [[ZERO; 4]; 2];
    for (idx, &x) in v.iter().enumerate() {
        let bit = (idx >> shift) & 1;
        let rest = ((idx >> (shift + 1)) << shift) | (idx & ((1 << shift) - 1));
        m[bit][rest] = x;
    }
    let dot = |p: &[Complex64; 4], q: &[Complex64; 4]| p.iter().zip(q).map(|(x, y)| x * y.conj()).sum::<Complex64>();
    let h = Matrix2::new(
        dot(&m[0], &m[0]),
        dot(&m[0], &m[1]),
        dot(&m[1], &m[0]),
        dot(&m[1], &m[1]),
    );
    let top = dominant_eigenvector(&h);
    let other = complement(top);
    // the second singular value is the norm of the residual row, which keeps
    // full absolute precision
    let second = (0..4)
        .map(|k| (other[0].conj() * m[0][k] + other[1].conj() * m[1][k]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (top, second)
}

/// Routes for states whose determinant quadratic vanishes identically.
fn degenerate_fallback(v: &[Complex64; 8]) -> Result<CanonicalGSD> {
    let (v1, s1) = cut(v, 1);
    let (v2, s2) = cut(v, 2);
    let (v3, s3) = cut(v, 3);
    let unfinished = || Error::Numeric("degenerate-family reduction left residual amplitudes".into());
    let project = |locals: &[Matrix2<Complex64>; 3]| {
        let adj = [locals[0].adjoint(), locals[1].adjoint(), locals[2].adjoint()];
        apply_local3(v, [&adj[0], &adj[1], &adj[2]])
    };

    if s1 < RANK_ONE && s2 < RANK_ONE && s3 < RANK_ONE {
        let locals = [complete_column(v1).0, complete_column(v2).0, complete_column(v3).0];
        return finish(project(&locals), locals, GsdBranch::Product).ok_or_else(unfinished);
    }
    if s3 < RANK_ONE {
        // contract qubit 3 against its factor
        let pair = Matrix2::from_fn(|i, j| v3[0].conj() * v[4 * i + 2 * j] + v3[1].conj() * v[4 * i + 2 * j + 1]);
        let (u, _, w) = svd2(&pair);
        let locals = [u, w, complete_column(v3).0];
        return finish(project(&locals), locals, GsdBranch::Pair12).ok_or_else(unfinished);
    }
    if s2 < RANK_ONE {
        let pair = Matrix2::from_fn(|i, k| v2[0].conj() * v[4 * i + k] + v2[1].conj() * v[4 * i + 2 + k]);
        let (u, _, w) = svd2(&pair);
        let locals = [u, complete_column(v2).0, w];
        return finish(project(&locals), locals, GsdBranch::Pair13).ok_or_else(unfinished);
    }
    Err(Error::DegenerateFamily(
        "determinant quadratic vanishes but no qubit factorizes".into(),
    ))
}

fn candidate_order(x: &(CanonicalGSD, f64, usize), y: &(CanonicalGSD, f64, usize)) -> Ordering {
    let (a, a_weight, a_idx) = x;
    let (b, b_weight, b_idx) = y;
    let larger = |p: f64, q: f64| {
        if (p - q).abs() <= 1e-12 {
            Ordering::Equal
        } else if p > q {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    };
    b.varphi_in_range()
        .cmp(&a.varphi_in_range())
        .then_with(|| {
            (0..5)
                .map(|k| larger(a.lambda[k], b.lambda[k]))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| larger(*a_weight, *b_weight))
        .then_with(|| a_idx.cmp(b_idx))
}

fn require_three(state: &StateVector) -> Result<()> {
    if state.num_qubits() == 3 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "generalized Schmidt decomposition needs 3 qubits, got {}",
            state.num_qubits()
        )))
    }
}

/// All canonical forms reachable from the roots of the determinant
/// quadratic, best first. The first entry is [`gsd_canonical`].
pub fn gsd_candidates(state: &StateVector) -> Result<Vec<CanonicalGSD>> {
    require_three(state)?;
    let v = amplitudes8(state);
    let t0 = block(&v, 0);
    let t1 = block(&v, 1);
    let Some(roots) = pencil_roots(&t0, &t1) else {
        return Ok(vec![degenerate_fallback(&v)?]);
    };

    let mut found = Vec::new();
    for (idx, (a, b)) in roots.into_iter().enumerate() {
        let w1 = Matrix2::new(a, b, -b.conj(), a.conj());
        let rotated = apply_local3(&v, [&w1, &Matrix2::identity(), &Matrix2::identity()]);
        let t0p = block(&rotated, 0);
        let (mut x, s, mut y) = svd2(&t0p);
        let mut branch = GsdBranch::Root(idx);
        if s[0] < RANK_ONE {
            (x, _, y) = svd2(&block(&rotated, 1));
            branch = GsdBranch::FirstQubitFactor(idx);
        }
        let core = apply_local3(&rotated, [&Matrix2::identity(), &x.adjoint(), &y.adjoint()]);
        if let Some(g) = finish(core, [w1.adjoint(), x, y], branch) {
            found.push((g, a.norm(), idx));
        }
    }
    if found.is_empty() {
        return Ok(vec![degenerate_fallback(&v)?]);
    }
    found.sort_by(candidate_order);
    Ok(found.into_iter().map(|(g, _, _)| g).collect())
}

/// Canonical generalized Schmidt form with `varphi` in `[0, pi]`.
pub fn gsd_canonical(state: &StateVector) -> Result<CanonicalGSD> {
    gsd_candidates(state)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Numeric("no canonical form found".into()))
}

/// Frames and relative phases of a canonical form. The trailing z-rotation
/// `phi'_j` of each local unitary is absorbed into the phases:
/// `alpha1 = varphi + phi'_1`, `alpha2 = phi'_1 + phi'_3`,
/// `alpha3 = phi'_1 + phi'_2`, `alpha4 = phi'_1 + phi'_2 + phi'_3`.
///
/// Phases of absent terms are reported as 0, except that `alpha1` stays
/// defined whenever `l2 l3 > 0` because it still enters the 2-3 concurrence.
/// In that case the absent `|100>` term carries `varphi = pi/2`.
pub fn to_alpha_form(g: &CanonicalGSD) -> Result<ThreeQubitCoordinates> {
    let e1 = frame_decompose(&g.u1)?;
    let e2 = frame_decompose(&g.u2)?;
    let e3 = frame_decompose(&g.u3)?;
    let l = g.lambda;
    let pair_term = l[2] * l[3] > 0.0;
    let varphi = if l[1] == 0.0 && pair_term { FRAC_PI_2 } else { g.varphi };
    let mut alpha = [
        wrap_angle(varphi + e1.phi_prime),
        wrap_angle(e1.phi_prime + e3.phi_prime),
        wrap_angle(e1.phi_prime + e2.phi_prime),
        wrap_angle(e1.phi_prime + e2.phi_prime + e3.phi_prime),
    ];
    if l[1] == 0.0 && !pair_term {
        alpha[0] = 0.0;
    }
    for k in 1..4 {
        if l[k + 1] == 0.0 {
            alpha[k] = 0.0;
        }
    }
    Ok(ThreeQubitCoordinates {
        lambda: l,
        alpha,
        frames: [e1.frame(), e2.frame(), e3.frame()],
    })
}

/// `to_alpha_form(gsd_canonical(state))`.
pub fn gsd_decompose(state: &StateVector) -> Result<ThreeQubitCoordinates> {
    to_alpha_form(&gsd_canonical(state)?)
}

/// Core amplitudes `l0|000> + sum_k e^{i alpha_k} l_k |.>`.
fn alpha_core(coords: &ThreeQubitCoordinates) -> [Complex64; 8] {
    let mut core = [ZERO; 8];
    core[0] = Complex64::new(coords.lambda[0], 0.0);
    for k in 1..5 {
        core[CORE_INDICES[k]] = Complex64::from_polar(coords.lambda[k], coords.alpha[k - 1]);
    }
    core
}

pub fn assemble3(coords: &ThreeQubitCoordinates) -> StateVector {
    let u = coords.frames.map(|f| frame_unitary(f).0);
    let amps = apply_local3(&alpha_core(coords), [&u[0], &u[1], &u[2]]);
    make_state(&amps, 3).expect("assembled state is nonzero")
}

pub fn complex_concurrences3(coords: &ThreeQubitCoordinates) -> ComplexConcurrenceSet {
    let l = coords.lambda;
    let [a1, a2, a3, a4] = coords.alpha;
    let e = |x: f64| Complex64::from_polar(1.0, x);
    ComplexConcurrenceSet {
        c12: e(a3) * (2.0 * l[0] * l[3]),
        c13: e(a2) * (2.0 * l[0] * l[2]),
        c23: e(-2.0 * a1) * (e(a1 + a4) * (l[1] * l[4]) - e(a2 + a3) * (l[2] * l[3])) * 2.0,
        c123: e(a4) * (2.0 * l[0] * l[4]),
    }
}

/// Moduli `(c12, c13, c23, c123)` of [`complex_concurrences3`].
pub fn concurrences3(coords: &ThreeQubitCoordinates) -> (f64, f64, f64, f64) {
    let c = complex_concurrences3(coords);
    (c.c12.norm(), c.c13.norm(), c.c23.norm(), c.c123.norm())
}

const INVERT_GRID: usize = 2048;
const INVERT_MATCH: f64 = 1e-6;

struct InverseProblem {
    alpha2: f64,
    alpha3: f64,
    alpha4: f64,
    p2: f64,
    p3: f64,
    p4: f64,
    half_c23: Complex64,
    sum_sq: f64,
}

impl InverseProblem {
    fn lambda1(&self, l0: f64) -> f64 {
        let sq = 1.0 - l0 * l0 - self.sum_sq / (l0 * l0);
        // below this the square is cancellation noise
        if sq <= 64.0 * f64::EPSILON {
            0.0
        } else {
            sq.sqrt()
        }
    }

    /// Roots `z = e^{-i alpha1}` of `K z^2 - L z + c23/2 = 0`, by modulus.
    fn roots(&self, l0: f64) -> Vec<Complex64> {
        let k = Complex64::from_polar(self.p2 * self.p3 / (l0 * l0), self.alpha2 + self.alpha3);
        let l = Complex64::from_polar(self.lambda1(l0) * self.p4 / l0, self.alpha4);
        let mut r = if k.norm() > 0.0 {
            quadratic_roots(k, -l, self.half_c23).to_vec()
        } else if l.norm() > 0.0 {
            vec![self.half_c23 / l]
        } else {
            Vec::new()
        };
        r.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        r
    }

    fn coords(&self, l0: f64, l1: f64, alpha1: f64, frames: [LocalFrame; 3]) -> ThreeQubitCoordinates {
        let mut lambda = [l0, l1, self.p2 / l0, self.p3 / l0, self.p4 / l0];
        let mut alpha = [alpha1, self.alpha2, self.alpha3, self.alpha4];
        for l in lambda.iter_mut() {
            if *l < GSD_LAMBDA_ZERO {
                *l = 0.0;
            }
        }
        let n = lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
        for l in lambda.iter_mut() {
            *l /= n;
        }
        if lambda[1] == 0.0 && lambda[2] * lambda[3] == 0.0 {
            alpha[0] = 0.0;
        }
        for k in 1..4 {
            if lambda[k + 1] == 0.0 {
                alpha[k] = 0.0;
            }
        }
        ThreeQubitCoordinates { lambda, alpha, frames }
    }
}

fn phase_or_zero(z: Complex64) -> f64 {
    if z.norm() > GSD_LAMBDA_ZERO {
        wrap_angle(z.arg())
    } else {
        0.0
    }
}

fn bisect_root(problem: &InverseProblem, mut lo: f64, mut hi: f64, k: usize) -> f64 {
    let residual = |l0: f64| problem.roots(l0).get(k).map_or(f64::NAN, |z| z.norm() - 1.0);
    let mut f_lo = residual(lo);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let f_mid = residual(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Every set of coordinates with the given frames whose complex concurrences
/// reproduce `cc`. Ordered by core phase in `[0, pi]` first, then larger `l0`.
///
/// The map from coordinates to `(cc, frames)` is not injective: generic
/// inputs usually admit two solutions with different `l0`.
pub fn invert_candidates(cc: &ComplexConcurrenceSet, frames: &[LocalFrame; 3]) -> Result<Vec<ThreeQubitCoordinates>> {
    for (name, z) in [("c12", cc.c12), ("c13", cc.c13), ("c23", cc.c23), ("c123", cc.c123)] {
        if !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1.0 + 1e-12 {
            return Err(Error::Unrealizable(format!("|{name}| = {} exceeds 1", z.norm())));
        }
    }
    let frames = *frames;
    let problem = InverseProblem {
        alpha2: phase_or_zero(cc.c13),
        alpha3: phase_or_zero(cc.c12),
        alpha4: phase_or_zero(cc.c123),
        p2: cc.c13.norm() / 2.0,
        p3: cc.c12.norm() / 2.0,
        p4: cc.c123.norm() / 2.0,
        half_c23: cc.c23 / 2.0,
        sum_sq: 0.0,
    };
    let tiny = GSD_LAMBDA_ZERO;
    let (p2, p3, p4) = (problem.p2, problem.p3, problem.p4);
    let q = problem.half_c23;

    if p2 <= tiny && p3 <= tiny && p4 <= tiny {
        if q.norm() <= tiny {
            return Ok(vec![ThreeQubitCoordinates {
                lambda: [1.0, 0.0, 0.0, 0.0, 0.0],
                alpha: [0.0; 4],
                frames,
            }]);
        }
        // l0 = 0: a two-qubit Schmidt pair on qubits 2 and 3 behind qubit 1.
        let r = (2.0 * q.norm()).min(1.0);
        let d = (1.0 - r * r).max(0.0).sqrt();
        let l1 = ((1.0 + d) / 2.0).sqrt();
        let l4 = r / (2.0 * l1);
        return Ok(vec![ThreeQubitCoordinates {
            lambda: [0.0, l1, 0.0, 0.0, l4],
            alpha: [0.0, 0.0, 0.0, wrap_angle(q.arg())],
            frames,
        }]);
    }

    let problem = InverseProblem {
        sum_sq: p2 * p2 + p3 * p3 + p4 * p4,
        ..problem
    };
    let disc = 1.0 - 4.0 * problem.sum_sq;
    if disc < -1e-12 {
        return Err(Error::Unrealizable(format!(
            "pairwise and tripartite moduli leave no room for normalization ({disc:.3e})"
        )));
    }
    let disc = disc.max(0.0).sqrt();
    let lo = ((1.0 - disc) / 2.0).sqrt();
    let hi = ((1.0 + disc) / 2.0).sqrt();

    let mut found: Vec<ThreeQubitCoordinates> = Vec::new();
    if p2 * p3 <= tiny && q.norm() <= tiny {
        // Either l1 = 0 is forced or l1 is undetermined; report the l1 = 0 ends.
        for l0 in [hi, lo] {
            found.push(problem.coords(l0, 0.0, 0.0, frames));
        }
    } else if p4 <= tiny {
        if q.norm() <= tiny {
            return Err(Error::Unrealizable(
                "c23 vanishes while both pairwise terms do not".into(),
            ));
        }
        let l0 = (p2 * p3 / q.norm()).sqrt();
        if l0 < lo - 1e-9 || l0 > hi + 1e-9 {
            return Err(Error::Unrealizable("no normalizable l0 for the pairwise moduli".into()));
        }
        let k = Complex64::from_polar(p2 * p3 / (l0 * l0), problem.alpha2 + problem.alpha3);
        let z = (-q / k).sqrt();
        let mut alphas = [wrap_angle(-z.arg()), wrap_angle(-z.arg() + PI)];
        alphas.sort_by(f64::total_cmp);
        for a1 in alphas {
            found.push(problem.coords(l0, problem.lambda1(l0), a1, frames));
        }
    } else {
        let step = (hi - lo) / (INVERT_GRID - 1) as f64;
        let grid: Vec<f64> = (0..INVERT_GRID).map(|i| (lo + step * i as f64).clamp(lo, hi)).collect();
        let residuals: Vec<Vec<f64>> = grid
            .iter()
            .map(|&l0| problem.roots(l0).iter().map(|z| z.norm() - 1.0).collect())
            .collect();
        let mut roots_at = Vec::new();
        for i in 0..grid.len() {
            for (k, &r) in residuals[i].iter().enumerate() {
                if r == 0.0 {
                    roots_at.push((grid[i], k));
                } else if i > 0 {
                    if let Some(&prev) = residuals[i - 1].get(k) {
                        if prev != 0.0 && (prev > 0.0) != (r > 0.0) {
                            roots_at.push((bisect_root(&problem, grid[i - 1], grid[i], k), k));
                        }
                    }
                }
            }
            // accept near-unimodular roots at the interval ends
            if i == 0 || i == grid.len() - 1 {
                for (k, &r) in residuals[i].iter().enumerate() {
                    if r != 0.0 && r.abs() <= INVERT_UNIMODULAR {
                        roots_at.push((grid[i], k));
                    }
                }
            }
        }
        for (l0, k) in roots_at {
            let Some(z) = problem.roots(l0).get(k).copied() else {
                continue;
            };
            if (z.norm() - 1.0).abs() > INVERT_UNIMODULAR {
                continue;
            }
            found.push(problem.coords(l0, problem.lambda1(l0), wrap_angle(-z.arg()), frames));
        }
    }

    let mut out: Vec<ThreeQubitCoordinates> = Vec::new();
    for c in found {
        if complex_concurrences3(&c).max_diff(cc) > INVERT_MATCH {
            continue;
        }
        let duplicate = out
            .iter()
            .any(|o| (o.lambda[0] - c.lambda[0]).abs() < 1e-9 && angle_diff(o.alpha[0], c.alpha[0]).abs() < 1e-9);
        if !duplicate {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err(Error::Unrealizable("no l0 yields a unimodular phase root".into()));
    }
    out.sort_by(|a, b| {
        let ina = a.core_phase() <= PI + 1e-12;
        let inb = b.core_phase() <= PI + 1e-12;
        inb.cmp(&ina).then(b.lambda[0].total_cmp(&a.lambda[0]))
    });
    Ok(out)
}

/// First entry of [`invert_candidates`].
pub fn invert_coordinates(cc: &ComplexConcurrenceSet, frames: &[LocalFrame; 3]) -> Result<ThreeQubitCoordinates> {
    Ok(invert_candidates(cc, frames)?.remove(0))
}

/// Candidate whose reduced Bloch vectors are closest to `bloch`.
pub fn invert_coordinates_with_bloch(
    cc: &ComplexConcurrenceSet,
    frames: &[LocalFrame; 3],
    bloch: &[BlochPoint; 3],
) -> Result<ThreeQubitCoordinates> {
    let mut best: Option<(f64, ThreeQubitCoordinates)> = None;
    for c in invert_candidates(cc, frames)? {
        let state = assemble3(&c);
        let mut d = 0.0;
        for (j, target) in bloch.iter().enumerate() {
            let r = bloch_vector(&partial_trace(&state, &[j + 1])?)?;
            d += ((r.x - target.x).powi(2) + (r.y - target.y).powi(2) + (r.z - target.z).powi(2)).sqrt();
        }
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, c));
        }
    }
    best.map(|(_, c)| c).ok_or(Error::EmptyCandidates)
}
