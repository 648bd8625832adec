//! Coproduct `Δ(X) = A ⊗ p^{H/2} + p^{−H/2} ⊗ A` on two copies of the
//! `u_{p^{1/2}}(sl(2))` realisation.

use super::sl2::UqSl2Realisation;
use crate::error::{Result, TorusError};
use crate::lattice::{Dimension, LatticeVector};

/// Largest `D` for which the `D² × D²` check runs.
pub const MAX_COPRODUCT_DIM: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct CoproductReport {
    /// `max(‖X p^H − p p^H X‖, ‖X† p^H − p^{−1} p^H X†‖)`.
    pub intertwining: f64,
    /// `‖[X, X†] − σ [H + D/2]‖`.
    pub commutator: f64,
    /// `Δ(H)` eigenvalues minus pairwise sums of the factors' `J3` eigenvalues.
    pub additivity: f64,
    /// Integer used for every fractional power of `p`.
    pub root: i64,
    pub bracket_sign: f64,
}

impl CoproductReport {
    pub fn max(&self) -> f64 {
        self.intertwining.max(self.commutator).max(self.additivity)
    }
}

pub fn coproduct_check(dim: Dimension, m: LatticeVector, mp: LatticeVector) -> Result<CoproductReport> {
    coproduct_check_pairs(dim, (m, mp), (m, mp))
}

/// Both pairs must share `m × m′ mod D`. For odd `D` an even representative
/// of the cross product is used so that `p^{D/2} = 1`.
pub fn coproduct_check_pairs(dim: Dimension, first: (LatticeVector, LatticeVector), second: (LatticeVector, LatticeVector)) -> Result<CoproductReport> {
    if dim.d() > MAX_COPRODUCT_DIM {
        return Err(TorusError::DimensionTooLarge(dim.d() * dim.d()));
    }
    let c = first.0.cross(first.1);
    if (second.0.cross(second.1) - c).rem_euclid(dim.di()) != 0 {
        return Err(TorusError::OutOfRange(format!("pairs lie in different classes mod {dim}")));
    }
    let root = if dim.d() % 2 == 0 || c.rem_euclid(2) == 0 { c } else { c + dim.di() };
    let a = UqSl2Realisation::build_with_root(dim, first.0, first.1, root)?;
    let b = UqSl2Realisation::build_with_root(dim, second.0, second.1, root)?;
    let half_a = |s: f64| a.j3_spectrum.map(|j| a.p_pow(s * j / 2.0));
    let half_b = |s: f64| b.j3_spectrum.map(|j| b.p_pow(s * j / 2.0));
    let x = &a.a.kron(&half_b(1.0)) + &half_a(-1.0).kron(&b.a);
    let x_dag = &a.a_dag.kron(&half_b(1.0)) + &half_a(-1.0).kron(&b.a_dag);
    let h = a.j3_spectrum.kron_sum(&b.j3_spectrum);
    let p_h = h.map(|j| a.p_pow(j));
    let p = a.p;
    let r1 = (&x * &p_h).max_abs_diff(&(&p_h * &x).scale(p));
    let r2 = (&x_dag * &p_h).max_abs_diff(&(&p_h * &x_dag).scale(p.inv()));
    let half_d = dim.d() as f64 / 2.0;
    let sigma = a.bracket_sign;
    let rhs = h.map(|j| a.bracket(j + half_d) * sigma);
    let commutator = x.commutator(&x_dag).max_abs_diff(&rhs);
    let h_op = h.real(|j| j);
    let id = crate::linalg::ComplexMatrix::identity(dim.d());
    let h_direct = &a.j3.kron(&id) + &id.kron(&b.j3);
    let mut from_eig: Vec<f64> = h_direct.hermitian_eigen().into_iter().map(|p| p.0).collect();
    let mut sums = h.values.clone();
    from_eig.sort_by(f64::total_cmp);
    sums.sort_by(f64::total_cmp);
    let additivity = from_eig
        .iter()
        .zip(&sums)
        .map(|(x, y)| (x - y).abs())
        .fold(h_op.max_abs_diff(&h_direct), f64::max);
    Ok(CoproductReport { intertwining: r1.max(r2), commutator, additivity, root, bracket_sign: sigma })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: i64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn lv(a: i64, b: i64) -> LatticeVector {
        LatticeVector::new(a, b)
    }

    #[test]
    fn small_dimensions_close() {
        for d in [2, 3] {
            let r = coproduct_check(dim(d), lv(1, 0), lv(0, 1)).unwrap();
            assert!(r.max() < 1e-10, "D={d}: {r:?}");
        }
    }

    #[test]
    fn mixed_pairs_close() {
        let cases = [
            (3, (lv(1, 0), lv(0, 1)), (lv(1, 1), lv(0, 1))),
            (5, (lv(1, 0), lv(0, 1)), (lv(2, 1), lv(1, 1))),
            (7, (lv(1, 0), lv(0, 2)), (lv(1, 1), lv(0, 2))),
            (5, (lv(1, 0), lv(0, 2)), (lv(1, 1), lv(0, 2))),
        ];
        for (d, a, b) in cases {
            let r = coproduct_check_pairs(dim(d), a, b).unwrap();
            assert!(r.max() < 1e-9, "D={d}: {r:?}");
        }
    }

    #[test]
    fn rejects_large_dimension() {
        assert_eq!(coproduct_check(dim(11), lv(1, 0), lv(0, 1)).unwrap_err(), TorusError::DimensionTooLarge(121));
    }
}
