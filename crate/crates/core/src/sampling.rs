//! Haar-random states and unitaries for tests and demos.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::state::StateVector;
use crate::su2::SingleQubitUnitary;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly distributed pure state on `num_qubits` qubits.
pub fn haar_state<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..1usize << num_qubits).map(|_| gaussian(rng)).collect();
        if let Ok(s) = crate::state::make_state(&amps, num_qubits) {
            return s;
        }
    }
}

/// Haar-distributed `dim x dim` unitary (QR of a Ginibre matrix with the
/// diagonal phase correction).
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn haar_single<R: Rng + ?Sized>(rng: &mut R) -> SingleQubitUnitary {
    let u = haar_unitary(2, rng);
    SingleQubitUnitary::new(Matrix2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_normalized_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            let s = haar_state(n, &mut rng);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
        for d in [2, 4, 8] {
            let u = haar_unitary(d, &mut rng);
            assert!(crate::state::unitarity_deviation(&u) < 1e-12);
        }
        assert!(haar_single(&mut rng).unitarity_deviation() < 1e-12);
    }

    #[test]
    fn mean_first_amplitude_weight() {
        // E|a_0|^2 = 1/d for Haar states
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 4000;
        let mean: f64 = (0..n)
            .map(|_| haar_state(2, &mut rng).amplitude(0).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.25).abs() < 0.02);
    }
}
