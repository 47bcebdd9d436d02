//! Gates, fractional gate powers and coordinate trajectories that stay
//! continuous across gauge-ambiguous points.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, ParseError, Result};
use crate::gsd::gsd_candidates;
use crate::io::coords::{build_coordinate_set, CoordinateSet};
use crate::io::ket::parse_scalar;
use crate::schmidt::{schmidt_decompose, transport_fixing_frame1, transport_fixing_frame2};
use crate::state::{apply_unitary, StateVector};
use crate::su2::{phase_gate, rx, ry, rz, LocalFrame};
use crate::tolerance::{TRAJECTORY_MAXIMAL_ENTER, TRAJECTORY_MAXIMAL_EXIT};

pub const NOTE_TRANSPORT_FRAME1: &str = "ricochet_transport_frame1";
pub const NOTE_TRANSPORT_FRAME2: &str = "ricochet_transport_frame2";

/// Mixing weight for the Hermitian matrix whose eigenvectors diagonalize a
/// unitary. Irrational so that distinct eigenphases do not collide.
const SPECTRAL_MIX: f64 = 0.577_215_664_9;

/// Distances closer than this count as ties.
const TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    T,
    Rx,
    Ry,
    Rz,
    Phase,
    Cnot,
    Cz,
    Cphase,
}

impl GateKind {
    pub const ALL: [GateKind; 13] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Phase,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Cphase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Phase => "PHASE",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Cphase => "CPHASE",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        let upper = name.to_ascii_uppercase();
        GateKind::ALL.into_iter().find(|k| k.name() == upper)
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Phase | GateKind::Cphase => 1,
            _ => 0,
        }
    }

    pub fn num_targets(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Cphase => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub params: Vec<f64>,
    /// 1-based qubit indices; for controlled gates the control comes first.
    pub targets: Vec<usize>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn diag(entries: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

pub fn swap_matrix() -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, col)] = c(1.0, 0.0);
    }
    m
}

/// `U^t` from the spectral decomposition of `u`, with eigenphases taken in
/// `(-pi, pi]`.
pub fn unitary_power(u: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let adj = u.adjoint();
    let hermitian = (u + &adj) * c(0.5, 0.0) + (u - &adj) * c(0.0, -0.5 * SPECTRAL_MIX);
    let eig = SymmetricEigen::new(hermitian);
    let v = eig.eigenvectors;
    let phases: Vec<Complex64> = (0..u.nrows())
        .map(|k| {
            let col = v.column(k);
            let lambda = (col.adjoint() * u * col)[(0, 0)];
            Complex64::from_polar(1.0, t * lambda.arg())
        })
        .collect();
    &v * diag(&phases) * v.adjoint()
}

impl Gate {
    pub fn new(kind: GateKind, params: Vec<f64>, targets: Vec<usize>) -> Result<Self> {
        if params.len() != kind.num_params() {
            return Err(Error::DimensionMismatch(format!(
                "{} takes {} parameter(s), got {}",
                kind.name(),
                kind.num_params(),
                params.len()
            )));
        }
        if targets.len() != kind.num_targets() {
            return Err(Error::BadSubsystem(format!(
                "{} acts on {} qubit(s), got {}",
                kind.name(),
                kind.num_targets(),
                targets.len()
            )));
        }
        Ok(Gate { kind, params, targets })
    }

    fn param(&self) -> f64 {
        self.params.first().copied().unwrap_or(0.0)
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self.kind {
            GateKind::X => DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
            GateKind::Y => DMatrix::from_row_slice(2, 2, &[zero, c(0.0, -1.0), c(0.0, 1.0), zero]),
            GateKind::Z => diag(&[one, -one]),
            GateKind::H => DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
            GateKind::S => diag(&[one, c(0.0, 1.0)]),
            GateKind::T => diag(&[one, Complex64::from_polar(1.0, FRAC_PI_4)]),
            GateKind::Rx => rx(self.param()).to_dmatrix(),
            GateKind::Ry => ry(self.param()).to_dmatrix(),
            GateKind::Rz => rz(self.param()).to_dmatrix(),
            GateKind::Phase => phase_gate(self.param()).to_dmatrix(),
            GateKind::Cnot => {
                let mut m = DMatrix::identity(4, 4);
                m[(2, 2)] = zero;
                m[(3, 3)] = zero;
                m[(2, 3)] = one;
                m[(3, 2)] = one;
                m
            }
            GateKind::Cz => diag(&[one, one, one, -one]),
            GateKind::Cphase => diag(&[one, one, one, Complex64::from_polar(1.0, self.param())]),
        }
    }

    /// Fractional application `U^t`. Parametric gates scale their angle, so
    /// the path follows the stated generator; fixed gates use the spectral
    /// power.
    pub fn power(&self, t: f64) -> DMatrix<Complex64> {
        if self.kind.num_params() > 0 {
            Gate {
                params: vec![self.param() * t],
                ..self.clone()
            }
            .matrix()
        } else {
            unitary_power(&self.matrix(), t)
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", p.join(","))?;
        }
        let t: Vec<String> = self.targets.iter().map(|x| x.to_string()).collect();
        write!(f, "@{}", t.join(":"))
    }
}

fn gate_names() -> Vec<String> {
    GateKind::ALL.iter().map(|k| k.name().to_string()).collect()
}

fn parse_gate(src: &str, start: usize, end: usize) -> Result<Gate> {
    let item = &src[start..end];
    let lead = item.len() - item.trim_start().len();
    let body = item.trim();
    let at = start + lead;
    let err = |offset: usize, msg: String| Error::Parse(ParseError::at(src, at + offset, msg));

    let name_len = body.find(|ch: char| !ch.is_ascii_alphanumeric()).unwrap_or(body.len());
    let name = &body[..name_len];
    if name.is_empty() {
        return Err(Error::Parse(
            ParseError::at(src, at, "expected a gate name").expecting(gate_names()),
        ));
    }
    let kind = GateKind::from_name(name).ok_or_else(|| {
        Error::Parse(ParseError::at(src, at, format!("unknown gate `{name}`")).expecting(gate_names()))
    })?;
    let mut rest = &body[name_len..];
    let mut offset = name_len;

    let mut params = Vec::new();
    if let Some(inner) = rest.strip_prefix('(') {
        let close = inner
            .find(')')
            .ok_or_else(|| err(offset, format!("unclosed parameter list for `{name}`")))?;
        let text = &inner[..close];
        let value = parse_scalar(text).map_err(|e| match e {
            Error::Parse(p) => Error::Parse(ParseError::at(src, at + offset + 1 + p.position, p.message)),
            other => other,
        })?;
        if value.im.abs() > 1e-12 {
            return Err(err(offset + 1, format!("parameter `{text}` is not real")));
        }
        params.push(value.re);
        offset += close + 2;
        rest = &inner[close + 1..];
    }
    if params.len() != kind.num_params() {
        return Err(err(
            offset,
            format!(
                "{} takes {} parameter(s), got {}",
                kind.name(),
                kind.num_params(),
                params.len()
            ),
        ));
    }

    let trimmed = rest.trim_start();
    offset += rest.len() - trimmed.len();
    let Some(targets_text) = trimmed.strip_prefix('@') else {
        return Err(Error::Parse(
            ParseError::at(src, at + offset, format!("expected `@` after `{name}`")).expecting(["@"]),
        ));
    };
    offset += 1;
    let mut targets = Vec::new();
    let mut local = 0;
    for part in targets_text.split(':') {
        let q = part.trim().parse::<usize>().map_err(|_| {
            Error::Parse(
                ParseError::at(src, at + offset + local, format!("bad qubit index `{}`", part.trim()))
                    .expecting(["qubit index"]),
            )
        })?;
        if q == 0 || targets.contains(&q) {
            return Err(err(offset + local, format!("invalid target list `{targets_text}`")));
        }
        targets.push(q);
        local += part.len() + 1;
    }
    if targets.len() != kind.num_targets() {
        return Err(err(
            offset,
            format!(
                "{} acts on {} qubit(s), got {}",
                kind.name(),
                kind.num_targets(),
                targets.len()
            ),
        ));
    }
    Ok(Gate { kind, params, targets })
}

/// Parse `NAME(params)@targets` items separated by commas, e.g.
/// `H@1, CNOT@1:2, RZ(pi/2)@3`. An empty or blank list is valid.
pub fn parse_gate_list(text: &str) -> Result<Vec<Gate>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut gates = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                gates.push(parse_gate(text, start, i)?);
                start = i + 1;
            }
            _ => {}
        }
    }
    gates.push(parse_gate(text, start, text.len())?);
    Ok(gates)
}

pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    apply_unitary(state, &gate.targets, &gate.matrix())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub step_index: usize,
    pub state: StateVector,
    pub coords: CoordinateSet,
}

/// Candidate with the smallest product-metric distance to `prev`; ties go to
/// the earliest candidate, so callers list the static canonical form first.
pub fn continuity_select(prev: &CoordinateSet, candidates: &[CoordinateSet]) -> Result<CoordinateSet> {
    let mut best: Option<(f64, &CoordinateSet)> = None;
    for cand in candidates {
        let d = prev.distance(cand);
        if best.is_none_or(|(b, _)| d < b - TIE) {
            best = Some((d, cand));
        }
    }
    best.map(|(_, c)| c.clone()).ok_or(Error::EmptyCandidates)
}

/// Tracks whether a two-qubit trajectory sits in the maximally entangled band.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaugeTracker {
    in_band: bool,
}

impl GaugeTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn in_band(&self) -> bool {
        self.in_band
    }

    fn update_band(&mut self, gap: f64) {
        self.in_band = if self.in_band {
            gap <= TRAJECTORY_MAXIMAL_EXIT
        } else {
            gap < TRAJECTORY_MAXIMAL_ENTER
        };
    }

    /// Coordinate sets for `state` that differ only in gauge, static
    /// canonical form first.
    pub fn candidates(&mut self, state: &StateVector, prev: Option<&CoordinateSet>) -> Result<Vec<CoordinateSet>> {
        match state.num_qubits() {
            2 => {
                let canonical = schmidt_decompose(state)?;
                self.update_band((canonical.lambda0 - canonical.lambda1).abs());
                let mut out = vec![CoordinateSet::from_two_qubit(state, &canonical)?];
                if !self.in_band {
                    return Ok(out);
                }
                if !canonical.maximal_gauge_fixed {
                    let mut banded = transport_fixing_frame2(&canonical, LocalFrame::IDENTITY)?;
                    banded.maximal_gauge_fixed = true;
                    out.push(CoordinateSet::from_two_qubit(state, &banded)?);
                }
                if let Some(p) = prev.filter(|p| p.num_qubits == 2) {
                    let moved2 = transport_fixing_frame2(&canonical, p.frames[1])?;
                    let mut cs = CoordinateSet::from_two_qubit(state, &moved2)?;
                    cs.gauge_notes.push(NOTE_TRANSPORT_FRAME2.to_string());
                    out.push(cs);
                    let moved1 = transport_fixing_frame1(&canonical, p.frames[0])?;
                    let mut cs = CoordinateSet::from_two_qubit(state, &moved1)?;
                    cs.gauge_notes.push(NOTE_TRANSPORT_FRAME1.to_string());
                    out.push(cs);
                }
                Ok(out)
            }
            3 => gsd_candidates(state)?
                .iter()
                .map(|g| CoordinateSet::from_canonical(state, g))
                .collect(),
            _ => Ok(vec![build_coordinate_set(state)?]),
        }
    }

    /// Gauge choice for `state` continuing from `prev`.
    pub fn select(&mut self, state: &StateVector, prev: Option<&CoordinateSet>) -> Result<CoordinateSet> {
        let candidates = self.candidates(state, prev)?;
        match prev {
            Some(p) if p.num_qubits == state.num_qubits() => continuity_select(p, &candidates),
            _ => candidates.into_iter().next().ok_or(Error::EmptyCandidates),
        }
    }
}

/// Trajectory of `initial` under `gates`, each split into `steps_per_gate`
/// fractional applications. The result has `1 + gates.len() * steps_per_gate`
/// points.
pub fn trajectory(initial: &StateVector, gates: &[Gate], steps_per_gate: usize) -> Result<Vec<TrajectoryPoint>> {
    trajectory_from(initial, gates, steps_per_gate, None)
}

/// As [`trajectory`], with the first point's gauge chosen for continuity
/// with `prev`.
pub fn trajectory_from(
    initial: &StateVector,
    gates: &[Gate],
    steps_per_gate: usize,
    prev: Option<&CoordinateSet>,
) -> Result<Vec<TrajectoryPoint>> {
    if steps_per_gate == 0 {
        return Err(Error::schema("steps_per_gate", "must be at least 1"));
    }
    let n = initial.num_qubits();
    for g in gates {
        if let Some(&q) = g.targets.iter().find(|&&q| q == 0 || q > n) {
            return Err(Error::BadSubsystem(format!("{g}: qubit {q} outside 1..={n}")));
        }
    }

    let mut tracker = GaugeTracker::new();
    let first = tracker.select(initial, prev)?;
    let mut points = vec![TrajectoryPoint {
        step_index: 0,
        state: initial.clone(),
        coords: first,
    }];
    let mut current = initial.clone();
    for gate in gates {
        let base = current.clone();
        for s in 1..=steps_per_gate {
            let u = gate.power(s as f64 / steps_per_gate as f64);
            current = apply_unitary(&base, &gate.targets, &u)?;
            let last = &points.last().expect("nonempty").coords;
            let coords = tracker.select(&current, Some(last))?;
            points.push(TrajectoryPoint {
                step_index: points.len(),
                state: current.clone(),
                coords,
            });
        }
    }
    Ok(points)
}
