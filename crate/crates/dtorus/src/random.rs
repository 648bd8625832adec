//! Seeded random states and lattice samples.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lattice::{Dimension, LatticeVector};
use crate::linalg::ComplexMatrix;
use crate::operators::{BasisTag, StateVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex-normal amplitudes, normalised, in the `u` basis.
pub fn random_state_with(dim: Dimension, rng: &mut impl Rng) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..dim.d())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(s) = StateVector::new(dim, amps, BasisTag::U).and_then(StateVector::normalized) {
            return s;
        }
    }
}

pub fn random_state(dim: Dimension, seed: u64) -> StateVector {
    random_state_with(dim, &mut rng(seed))
}

/// A lattice vector drawn uniformly from the label window.
pub fn random_lattice_vector(dim: Dimension, rng: &mut impl Rng) -> LatticeVector {
    let w = dim.window();
    LatticeVector::new(w[rng.random_range(0..w.len())], w[rng.random_range(0..w.len())])
}

/// `(M + M†)/2` for a complex-normal `M`.
pub fn random_hermitian(dim: Dimension, rng: &mut impl Rng) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(dim.d(), |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&m + &m.adjoint()).scale(Complex64::new(0.5, 0.0))
}
