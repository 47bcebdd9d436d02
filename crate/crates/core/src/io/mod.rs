//! Coordinate payloads and their text forms: JSON documents, SVG figures, and
//! the ket-expression language used to enter states.

pub mod coords;
pub mod json;
pub mod ket;
pub mod named;
pub mod svg;

pub use coords::{build_coordinate_set, CoordinateSet, ThreeQubitPayload, TwoQubitPayload};
pub use json::{from_json, from_json_value, to_json, write_json_value, SCHEMA_VERSION};
pub use ket::{format_state, parse_scalar, parse_state_spec, StateSpec};
pub use named::{named_state, named_states, NamedState};
pub use svg::{render_figure, RenderOptions};
