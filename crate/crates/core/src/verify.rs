//! Cross-checks of a decomposition against the independent oracles.

use std::fmt;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::gsd::{assemble3, complex_concurrences3, gsd_decompose};
use crate::oracles::{pure2_concurrence_oracle, three_tangle, wootters_mixed_concurrence};
use crate::schmidt::{assemble2, complex_concurrence2, schmidt_decompose};
use crate::state::{fidelity, partial_trace, StateVector};

const ROUND_TRIP_2: f64 = 1e-10;
const ROUND_TRIP_3: f64 = 1e-9;
const ORACLE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Residual {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub residuals: Vec<Residual>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(Residual::passed)
    }

    pub fn worst(&self) -> Option<&Residual> {
        self.residuals
            .iter()
            .max_by(|a, b| (a.value / a.tolerance).total_cmp(&(b.value / b.tolerance)))
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.residuals {
            writeln!(
                f,
                "{:<18} {:.3e}  (tol {:.0e})  {}",
                r.name,
                r.value,
                r.tolerance,
                if r.passed() { "ok" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

fn mixed(state: &StateVector, keep: [usize; 2]) -> Result<f64> {
    let rho: DensityMatrix = partial_trace(state, &keep)?;
    wootters_mixed_concurrence(&rho)
}

/// Round-trip fidelity loss and oracle differences for a 2- or 3-qubit state.
pub fn verify_state(state: &StateVector) -> Result<VerifyReport> {
    let r = |name, value, tolerance| Residual { name, value, tolerance };
    let residuals = match state.num_qubits() {
        2 => {
            let k = schmidt_decompose(state)?;
            let c = complex_concurrence2(&k).modulus();
            vec![
                r("round_trip", 1.0 - fidelity(&assemble2(&k), state)?, ROUND_TRIP_2),
                r("pure_oracle", (c - pure2_concurrence_oracle(state)?).abs(), ORACLE),
                r(
                    "wootters",
                    (c - wootters_mixed_concurrence(&DensityMatrix::pure(state.amplitudes()))?).abs(),
                    ORACLE,
                ),
            ]
        }
        3 => {
            let k = gsd_decompose(state)?;
            let cc = complex_concurrences3(&k);
            let rho1 = partial_trace(state, &[1])?;
            let rho2 = partial_trace(state, &[2])?;
            let rho3 = partial_trace(state, &[3])?;
            let (c12, c13, c23, c123) = (cc.c12.norm(), cc.c13.norm(), cc.c23.norm(), cc.c123.norm());
            vec![
                r("round_trip", 1.0 - fidelity(&assemble3(&k), state)?, ROUND_TRIP_3),
                r("wootters_12", (c12 - mixed(state, [1, 2])?).abs(), ORACLE),
                r("wootters_13", (c13 - mixed(state, [1, 3])?).abs(), ORACLE),
                r("wootters_23", (c23 - mixed(state, [2, 3])?).abs(), ORACLE),
                r("tangle", (c123 - three_tangle(state)?.sqrt()).abs(), ORACLE),
                r(
                    "monogamy_1",
                    (c12 * c12 + c13 * c13 + c123 * c123 - 4.0 * rho1.determinant()).abs(),
                    ORACLE,
                ),
                r(
                    "monogamy_2",
                    (c12 * c12 + c23 * c23 + c123 * c123 - 4.0 * rho2.determinant()).abs(),
                    ORACLE,
                ),
                r(
                    "monogamy_3",
                    (c13 * c13 + c23 * c23 + c123 * c123 - 4.0 * rho3.determinant()).abs(),
                    ORACLE,
                ),
            ]
        }
        n => {
            return Err(Error::DimensionMismatch(format!(
                "verification needs 2 or 3 qubits, got {n}"
            )))
        }
    };
    Ok(VerifyReport { residuals })
}
