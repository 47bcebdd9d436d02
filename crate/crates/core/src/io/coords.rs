use num_complex::Complex64;

use crate::density::{bloch_vector, BlochPoint};
use crate::error::{Error, Result};
use crate::gsd::{
    assemble3, complex_concurrences3, gsd_canonical, to_alpha_form, CanonicalGSD, ComplexConcurrenceSet,
    ThreeQubitCoordinates,
};
use crate::schmidt::{assemble2, complex_concurrence2, schmidt_decompose, TwoQubitCoordinates};
use crate::state::{make_state, partial_trace, StateVector};
use crate::su2::{angle_diff, frame_unitary, LocalFrame};

pub const NOTE_MAXIMAL_GAUGE: &str = "maximal_gauge_fixed";
pub const NOTE_FAMILY_REPRESENTATIVE: &str = "degenerate_family_representative";

/// Tolerance on the concurrence fields against the coefficient and phase fields.
const CONSISTENCY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitPayload {
    pub lambda0: f64,
    pub lambda1: f64,
    pub alpha: f64,
    pub concurrence: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeQubitPayload {
    pub lambda: [f64; 5],
    pub alpha: [f64; 4],
    pub concurrences: ComplexConcurrenceSet,
}

/// Everything a figure shows for one state: reduced Bloch vectors, local
/// frames and the nonlocal coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateSet {
    pub num_qubits: usize,
    pub bloch: Vec<BlochPoint>,
    pub frames: Vec<LocalFrame>,
    pub two_q: Option<TwoQubitPayload>,
    pub three_q: Option<ThreeQubitPayload>,
    pub gauge_notes: Vec<String>,
}

fn bloch_points(state: &StateVector) -> Result<Vec<BlochPoint>> {
    (1..=state.num_qubits())
        .map(|q| bloch_vector(&partial_trace(state, &[q])?))
        .collect()
}

impl CoordinateSet {
    pub fn from_two_qubit(state: &StateVector, coords: &TwoQubitCoordinates) -> Result<Self> {
        let mut notes = Vec::new();
        if coords.maximal_gauge_fixed {
            notes.push(NOTE_MAXIMAL_GAUGE.to_string());
        }
        Ok(CoordinateSet {
            num_qubits: 2,
            bloch: bloch_points(state)?,
            frames: vec![coords.frame1, coords.frame2],
            two_q: Some(TwoQubitPayload {
                lambda0: coords.lambda0,
                lambda1: coords.lambda1,
                alpha: coords.alpha,
                concurrence: complex_concurrence2(coords).value,
            }),
            three_q: None,
            gauge_notes: notes,
        })
    }

    pub fn from_three_qubit(state: &StateVector, coords: &ThreeQubitCoordinates) -> Result<Self> {
        Ok(CoordinateSet {
            num_qubits: 3,
            bloch: bloch_points(state)?,
            frames: coords.frames.to_vec(),
            two_q: None,
            three_q: Some(ThreeQubitPayload {
                lambda: coords.lambda,
                alpha: coords.alpha,
                concurrences: complex_concurrences3(coords),
            }),
            gauge_notes: Vec::new(),
        })
    }

    pub fn from_canonical(state: &StateVector, g: &CanonicalGSD) -> Result<Self> {
        let mut cs = Self::from_three_qubit(state, &to_alpha_form(g)?)?;
        if g.branch.is_family_representative() {
            cs.gauge_notes.push(NOTE_FAMILY_REPRESENTATIVE.to_string());
        }
        Ok(cs)
    }

    pub fn has_note(&self, note: &str) -> bool {
        self.gauge_notes.iter().any(|n| n == note)
    }

    pub fn two_qubit_coordinates(&self) -> Option<TwoQubitCoordinates> {
        let p = self.two_q?;
        Some(TwoQubitCoordinates {
            lambda0: p.lambda0,
            lambda1: p.lambda1,
            alpha: p.alpha,
            frame1: *self.frames.first()?,
            frame2: *self.frames.get(1)?,
            maximal_gauge_fixed: self.has_note(NOTE_MAXIMAL_GAUGE),
        })
    }

    pub fn three_qubit_coordinates(&self) -> Option<ThreeQubitCoordinates> {
        let p = self.three_q?;
        Some(ThreeQubitCoordinates {
            lambda: p.lambda,
            alpha: p.alpha,
            frames: [*self.frames.first()?, *self.frames.get(1)?, *self.frames.get(2)?],
        })
    }

    /// Concurrences shown on the complex plane, labeled.
    pub fn labeled_concurrences(&self) -> Vec<(&'static str, Complex64)> {
        if let Some(p) = self.two_q {
            vec![("c", p.concurrence)]
        } else if let Some(p) = self.three_q {
            let c = p.concurrences;
            vec![("c12", c.c12), ("c13", c.c13), ("c23", c.c23), ("c123", c.c123)]
        } else {
            Vec::new()
        }
    }

    /// All phase-like coordinates, for continuity distances.
    pub fn alphas(&self) -> Vec<f64> {
        match (self.two_q, self.three_q) {
            (Some(p), _) => vec![p.alpha],
            (_, Some(p)) => p.alpha.to_vec(),
            _ => Vec::new(),
        }
    }

    /// State represented by the frames and nonlocal fields, up to global phase.
    pub fn assemble(&self) -> Result<StateVector> {
        if let Some(k) = self.two_qubit_coordinates() {
            return Ok(assemble2(&k));
        }
        if let Some(k) = self.three_qubit_coordinates() {
            return Ok(assemble3(&k));
        }
        let f = self
            .frames
            .first()
            .ok_or_else(|| Error::schema("frames", "missing frame"))?;
        let u = frame_unitary(*f).0;
        make_state(&[u[(0, 0)], u[(1, 0)]], 1)
    }

    /// Structural and numeric invariants of a payload.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits;
        if !(1..=3).contains(&n) {
            return Err(Error::schema("num_qubits", format!("{n} is not 1, 2 or 3")));
        }
        if self.bloch.len() != n {
            return Err(Error::schema(
                "bloch",
                format!("{} points for {n} qubits", self.bloch.len()),
            ));
        }
        if self.frames.len() != n {
            return Err(Error::schema(
                "frames",
                format!("{} frames for {n} qubits", self.frames.len()),
            ));
        }
        for b in &self.bloch {
            if b.norm().is_nan() || b.norm() > 1.0 + crate::tolerance::EPS_EIG {
                return Err(Error::schema(
                    "bloch",
                    format!("point outside the ball (|r| = {})", b.norm()),
                ));
            }
        }
        match (n, self.two_q, self.three_q) {
            (1, None, None) => {
                for f in &self.frames {
                    crate::schmidt::check_frame("frames", f)?;
                }
            }
            (2, Some(p), None) => {
                let k = self.two_qubit_coordinates().expect("two frames checked");
                k.validate()?;
                if (complex_concurrence2(&k).value - p.concurrence).norm() > CONSISTENCY {
                    return Err(Error::schema("concurrences", "c does not match lambda and alpha"));
                }
            }
            (3, None, Some(p)) => {
                let k = self.three_qubit_coordinates().expect("three frames checked");
                k.validate()?;
                if complex_concurrences3(&k).max_diff(&p.concurrences) > CONSISTENCY {
                    return Err(Error::schema("concurrences", "values do not match lambda and alpha"));
                }
            }
            _ => {
                return Err(Error::schema(
                    "lambda",
                    format!("nonlocal fields do not match a {n}-qubit payload"),
                ))
            }
        }
        Ok(())
    }

    /// Product metric: sphere geodesics between frame directions plus circular
    /// distances between phases.
    pub fn distance(&self, other: &CoordinateSet) -> f64 {
        let frames: f64 = self.frames.iter().zip(&other.frames).map(|(a, b)| a.geodesic(b)).sum();
        let phases: f64 = self
            .alphas()
            .iter()
            .zip(other.alphas())
            .map(|(a, b)| angle_diff(*a, b).abs())
            .sum();
        frames + phases
    }
}

/// Decompose a state into its canonical coordinate payload. One-qubit
/// states give a Bloch point and frame only.
pub fn build_coordinate_set(state: &StateVector) -> Result<CoordinateSet> {
    match state.num_qubits() {
        1 => {
            let a = state.amplitudes();
            Ok(CoordinateSet {
                num_qubits: 1,
                bloch: bloch_points(state)?,
                frames: vec![LocalFrame::of_pure_state([a[0], a[1]])],
                two_q: None,
                three_q: None,
                gauge_notes: Vec::new(),
            })
        }
        2 => CoordinateSet::from_two_qubit(state, &schmidt_decompose(state)?),
        3 => CoordinateSet::from_canonical(state, &gsd_canonical(state)?),
        n => Err(Error::DimensionMismatch(format!("{n} qubits"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::haar_state;
    use crate::state::fidelity;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn ghz_payload() {
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(1.0);
        amps[7] = c(1.0);
        let cs = build_coordinate_set(&make_state(&amps, 3).unwrap()).unwrap();
        for b in &cs.bloch {
            assert!(b.norm() < 1e-12);
        }
        let cc = cs.three_q.unwrap().concurrences;
        assert!((cc.c123 - c(1.0)).norm() < 1e-12);
        assert!(cc.c12.norm() < 1e-12 && cc.c13.norm() < 1e-12 && cc.c23.norm() < 1e-12);
        cs.validate().unwrap();
    }

    #[test]
    fn plus_zero_payload() {
        let s = make_state(&[c(1.0), c(0.0), c(1.0), c(0.0)], 2).unwrap();
        let cs = build_coordinate_set(&s).unwrap();
        assert!((cs.bloch[0].x - 1.0).abs() < 1e-12);
        assert!((cs.bloch[1].z - 1.0).abs() < 1e-12);
        assert_eq!(cs.two_q.unwrap().concurrence.norm(), 0.0);
    }

    #[test]
    fn single_qubit_payload() {
        let s = make_state(&[c(1.0), Complex64::new(0.0, 1.0)], 1).unwrap();
        let cs = build_coordinate_set(&s).unwrap();
        assert!(cs.two_q.is_none() && cs.three_q.is_none());
        assert!((cs.bloch[0].y - 1.0).abs() < 1e-12);
        assert!(fidelity(&cs.assemble().unwrap(), &s).unwrap() > 1.0 - 1e-12);
        cs.validate().unwrap();
    }

    #[test]
    fn maximal_note() {
        let s = make_state(&[c(1.0), c(0.0), c(0.0), c(1.0)], 2).unwrap();
        let cs = build_coordinate_set(&s).unwrap();
        assert!(cs.has_note(NOTE_MAXIMAL_GAUGE));
        assert!(cs.two_qubit_coordinates().unwrap().maximal_gauge_fixed);
    }

    #[test]
    fn validate_catches_inconsistency() {
        let s = make_state(&[c(1.0), c(0.0), c(0.0), c(1.0)], 2).unwrap();
        let mut cs = build_coordinate_set(&s).unwrap();
        cs.two_q.as_mut().unwrap().concurrence = c(0.5);
        assert!(matches!(cs.validate(), Err(Error::Schema { field, .. }) if field == "concurrences"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn payload_is_self_consistent(seed in any::<u64>(), n in 2usize..=3) {
            let s = haar_state(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let cs = build_coordinate_set(&s).unwrap();
            prop_assert!(cs.validate().is_ok());
            // rebuild from the frames, coefficients and phases alone
            let rebuilt = build_coordinate_set(&cs.assemble().unwrap()).unwrap();
            for (a, b) in cs.bloch.iter().zip(&rebuilt.bloch) {
                prop_assert!((a.x - b.x).abs() <= 1e-8 && (a.y - b.y).abs() <= 1e-8 && (a.z - b.z).abs() <= 1e-8);
            }
            for ((_, a), (_, b)) in cs.labeled_concurrences().iter().zip(rebuilt.labeled_concurrences()) {
                prop_assert!((a - b).norm() <= 1e-8);
            }
            prop_assert!(cs.distance(&rebuilt) <= 1e-7);
        }
    }
}
