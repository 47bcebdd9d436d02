use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::tolerance::{EPS_MATCH, EPS_NORM, ZERO_AMPLITUDE};

/// Normalized pure state of 1 to 3 qubits, big-endian amplitude order.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits,
            amplitudes: amps,
        })
    }

    /// Infer the qubit count from the amplitude count and normalize.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = match amplitudes.len() {
            2 => 1,
            4 => 2,
            8 => 3,
            len => {
                return Err(Error::DimensionMismatch(format!(
                    "{len} amplitudes; expected 2, 4 or 8"
                )))
            }
        };
        make_state(&amplitudes, n)
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + other.num_qubits;
        check_qubits(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Ok(StateVector {
            num_qubits: n,
            amplitudes: amps,
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amplitudes)
    }

    /// Multiply by a global phase so the largest amplitude (first on ties) is
    /// real positive. Useful for comparing states up to phase.
    pub fn phase_normalized(&self) -> StateVector {
        let mut best = 0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() > self.amplitudes[best].norm() + 1e-12 {
                best = i;
            }
        }
        let p = self.amplitudes[best];
        let rot = if p.norm() > 0.0 {
            p.conj() / p.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        StateVector {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * rot).collect(),
        }
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{n} qubits; supported range is 1 to 3"
        )))
    }
}

/// Normalized copy of `amplitudes` as a `num_qubits` state.
pub fn make_state(amplitudes: &[Complex64], num_qubits: usize) -> Result<StateVector> {
    check_qubits(num_qubits)?;
    let dim = 1usize << num_qubits;
    if amplitudes.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for {num_qubits} qubits (need {dim})",
            amplitudes.len()
        )));
    }
    if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("non-finite amplitude".into()));
    }
    if amplitudes.iter().all(|z| z.norm() < ZERO_AMPLITUDE) {
        return Err(Error::ZeroVector);
    }
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(StateVector {
        num_qubits,
        amplitudes: amplitudes.iter().map(|z| z / norm).collect(),
    })
}

fn check_targets(num_qubits: usize, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::BadSubsystem("empty qubit list".into()));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t == 0 || t > num_qubits {
            return Err(Error::BadSubsystem(format!("qubit {t} out of range 1..={num_qubits}")));
        }
        if targets[..i].contains(&t) {
            return Err(Error::BadSubsystem(format!("qubit {t} listed twice")));
        }
    }
    Ok(())
}

/// Bit of qubit `q` (1-based, big-endian) in basis index `idx`.
#[inline]
fn bit(idx: usize, q: usize, n: usize) -> usize {
    (idx >> (n - q)) & 1
}

/// Reduced density matrix on `keep`, ordered as listed (big-endian among the
/// kept qubits).
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.num_qubits;
    check_targets(n, keep)?;
    let traced: Vec<usize> = (1..=n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let dk = 1 << k;
    let dt = 1 << traced.len();

    let compose = |kept: usize, tr: usize| -> usize {
        let mut idx = 0;
        for (pos, &q) in keep.iter().enumerate() {
            idx |= ((kept >> (k - 1 - pos)) & 1) << (n - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            idx |= ((tr >> (traced.len() - 1 - pos)) & 1) << (n - q);
        }
        idx
    };

    let mut rho = DMatrix::<Complex64>::zeros(dk, dk);
    for t in 0..dt {
        for r in 0..dk {
            let a = state.amplitudes[compose(r, t)];
            if a.norm() == 0.0 {
                continue;
            }
            for c in 0..dk {
                rho[(r, c)] += a * state.amplitudes[compose(c, t)].conj();
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

/// Apply a `2^k x 2^k` unitary to the listed qubits; the first listed target is
/// the most significant bit of the gate's index.
pub fn apply_unitary(state: &StateVector, targets: &[usize], u: &DMatrix<Complex64>) -> Result<StateVector> {
    let n = state.num_qubits;
    check_targets(n, targets)?;
    let k = targets.len();
    let dk = 1 << k;
    if u.nrows() != dk || u.ncols() != dk {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for {k} target qubits",
            u.nrows(),
            u.ncols()
        )));
    }
    let dev = unitarity_deviation(u);
    if dev > EPS_MATCH {
        return Err(Error::NotUnitary(dev));
    }
    let mask: usize = targets.iter().map(|&q| 1 << (n - q)).sum();
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    let sub_index = |idx: usize| -> usize { targets.iter().fold(0, |acc, &q| (acc << 1) | bit(idx, q, n)) };
    let with_sub = |base: usize, sub: usize| -> usize {
        let mut idx = base & !mask;
        for (pos, &q) in targets.iter().enumerate() {
            idx |= ((sub >> (k - 1 - pos)) & 1) << (n - q);
        }
        idx
    };
    for (idx, &a) in state.amplitudes.iter().enumerate() {
        if a.norm() == 0.0 {
            continue;
        }
        let col = sub_index(idx);
        for row in 0..dk {
            out[with_sub(idx, row)] += u[(row, col)] * a;
        }
    }
    // Renormalize away accumulated rounding.
    let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > EPS_NORM {
        for z in &mut out {
            *z /= norm;
        }
    }
    Ok(StateVector {
        num_qubits: n,
        amplitudes: out,
    })
}

pub(crate) fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    let p = u.adjoint() * u - DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
    p.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `|<a|b>|`, insensitive to global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}

/// Kronecker product of square matrices, first factor most significant.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}
