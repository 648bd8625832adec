//! Finite-dimensional quantum mechanics on the discrete torus Z_D × Z_D.
//!
//! Builds the clock/shift pair and the Schwinger operator basis, the deformed
//! subalgebras it contains, symplectic maps and their unitary realisations,
//! discrete Wigner functions, the unitary number-phase pair and finite-D
//! limit diagnostics.

pub mod canonical;
pub mod deformed;
pub mod error;
pub mod io;
pub mod lattice;
pub mod limits;
pub mod linalg;
pub mod number_phase;
pub mod operators;
pub mod random;
pub mod schwinger;
pub mod verify;
pub mod wigner;

pub use error::{Result, TorusError};
pub use lattice::{Dimension, LatticeVector};
pub use linalg::ComplexMatrix;
pub use operators::{BasisTag, OperatorMatrix, StateVector};
