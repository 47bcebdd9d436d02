//! Canonical coordinates for two- and three-qubit pure states.
//!
//! A state is split into *local* degrees of freedom (one Bloch frame
//! `Rz(phi) Ry(theta)` per qubit) and *nonlocal* ones (Schmidt or generalized
//! Schmidt coefficients plus relative phases, summarized as complex
//! concurrences). The crate provides the forward decompositions, forward
//! assembly from coordinates, inverse reconstruction from complex
//! concurrences, independent entanglement oracles, gate dynamics with gauge
//! continuity, and the serialization/rendering layer used by the CLI and the
//! HTTP service.
//!
//! Qubits are numbered from 1 and indexed big-endian: qubit 1 is the most
//! significant bit of a basis index, so `|q1 q2 q3>` has index `4*q1 + 2*q2 + q3`.

pub mod density;
pub mod dynamics;
pub mod error;
pub mod gsd;
pub mod io;
pub mod oracles;
pub mod sampling;
pub mod schmidt;
pub mod state;
pub mod su2;
pub mod tolerance;
pub mod verify;

pub use density::{bloch_vector, BlochPoint, DensityMatrix};
pub use error::{Error, ParseError, Result};
pub use gsd::{
    assemble3, complex_concurrences3, concurrences3, gsd_candidates, gsd_canonical, gsd_decompose, invert_candidates,
    invert_coordinates, invert_coordinates_with_bloch, to_alpha_form, CanonicalGSD, ComplexConcurrenceSet, GsdBranch,
    ThreeQubitCoordinates,
};
pub use schmidt::{
    assemble2, canonicalize_maximal, complex_concurrence2, schmidt_decompose, ComplexConcurrence, TwoQubitCoordinates,
};
pub use state::{apply_unitary, fidelity, make_state, partial_trace, StateVector};
pub use su2::{frame_unitary, zyz_decompose, EulerAngles, LocalFrame, SingleQubitUnitary};

/// Complex amplitude type used throughout the crate.
pub type ComplexScalar = num_complex::Complex64;
