//! Deformed subalgebras spanned by pairs of Schwinger operators.

mod coproduct;
mod qosc;
mod sl2;

pub use coproduct::{coproduct_check, coproduct_check_pairs, CoproductReport};
pub use qosc::{
    eigenbasis_correspondence, lowest_weight_scan, CorrespondenceEntry, EigenCorrespondence, LowestWeightReport, QBranch,
    QOscillator, spectrum_formula, spectrum_value,
};
pub use sl2::{casimir_uq_sl2, translated_lattice_deformation, CasimirReport, TranslatedDeformation, UqSl2Realisation};

use num_complex::Complex64;

use crate::error::{Result, TorusError};
use crate::lattice::{Dimension, LatticeVector};
use crate::linalg::ComplexMatrix;

/// Orthonormal eigenvectors with real labels; functions of the labelled
/// operator are built spectrally.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectral {
    pub vectors: Vec<Vec<Complex64>>,
    pub values: Vec<f64>,
}

impl Spectral {
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let w: Vec<_> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::spectral(&self.vectors, &w)
    }

    pub fn real(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.map(|x| Complex64::new(f(x), 0.0))
    }

    /// Spectral data of `X ⊗ I + I ⊗ Y`.
    pub fn kron_sum(&self, other: &Self) -> Self {
        let mut vectors = Vec::new();
        let mut values = Vec::new();
        for (a, &x) in self.vectors.iter().zip(&self.values) {
            for (b, &y) in other.vectors.iter().zip(&other.values) {
                vectors.push(a.iter().flat_map(|ai| b.iter().map(move |bj| ai * bj)).collect());
                values.push(x + y);
            }
        }
        Self { vectors, values }
    }

    /// Worst matrix element of `M` in this eigenbasis, skipping entries for
    /// which `skip(row_label, col_label)` holds, after weighting each element
    /// by `weight(row_label, col_label)`.
    pub fn weighted_elements(&self, m: &ComplexMatrix, weight: impl Fn(f64, f64) -> f64, skip: impl Fn(f64, f64) -> bool) -> f64 {
        let mut worst: f64 = 0.0;
        for (b, vb) in self.vectors.iter().enumerate() {
            let mv = m.apply(vb);
            for (a, va) in self.vectors.iter().enumerate() {
                let (ja, jb) = (self.values[a], self.values[b]);
                if skip(ja, jb) {
                    continue;
                }
                let el = crate::linalg::inner(va, &mv);
                worst = worst.max(el.norm() * weight(ja, jb).abs());
            }
        }
        worst
    }
}

pub(crate) fn require_non_collinear(dim: Dimension, m: LatticeVector, mp: LatticeVector) -> Result<i64> {
    if m.cross_mod(mp, dim) == 0 {
        return Err(TorusError::CollinearVectors { m: m.as_tuple(), mp: mp.as_tuple(), dim: dim.d() });
    }
    Ok(m.cross(mp))
}
