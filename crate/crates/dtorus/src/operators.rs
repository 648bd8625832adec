//! Operator and state containers, the clock/shift pair and the Fourier operator.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Result, TorusError};
use crate::lattice::{Dimension, LatticeVector};
use crate::linalg::{self, root_of_unity, ComplexMatrix};

/// How an operator was constructed.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Shift,
    Clock,
    Fourier,
    Schwinger(LatticeVector),
    PhaseOperator,
    NumberExponential,
    WignerKernel,
    Metaplectic,
    Imported,
    Derived(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shift => write!(f, "shift"),
            Self::Clock => write!(f, "clock"),
            Self::Fourier => write!(f, "fourier"),
            Self::Schwinger(m) => write!(f, "schwinger{m}"),
            Self::PhaseOperator => write!(f, "phase-operator"),
            Self::NumberExponential => write!(f, "number-exponential"),
            Self::WignerKernel => write!(f, "wigner-kernel"),
            Self::Metaplectic => write!(f, "metaplectic"),
            Self::Imported => write!(f, "imported"),
            Self::Derived(s) => write!(f, "{s}"),
        }
    }
}

/// A `D × D` complex matrix tied to its dimension and origin.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    dim: Dimension,
    matrix: ComplexMatrix,
    provenance: Provenance,
}

impl OperatorMatrix {
    pub fn new(dim: Dimension, matrix: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        if matrix.dim() != dim.d() {
            return Err(TorusError::DimensionMismatch { expected: dim.d(), found: matrix.dim() });
        }
        Ok(Self { dim, matrix, provenance })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.matrix.unitarity_residual()
    }

    /// `‖M^D − phase·I‖_max`.
    pub fn cyclic_residual(&self, phase: Complex64) -> f64 {
        let id = ComplexMatrix::identity(self.dim.d()).scale(phase);
        self.matrix.pow(self.dim.d() as u64).max_abs_diff(&id)
    }

    /// Applies the operator to a state expressed in any basis; the result is
    /// in the `u` basis.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim != self.dim {
            return Err(TorusError::DimensionMismatch { expected: self.dim.d(), found: state.dim.d() });
        }
        let u = state.change_basis(BasisTag::U)?;
        Ok(StateVector { dim: self.dim, amplitudes: self.matrix.apply(&u.amplitudes), basis: BasisTag::U })
    }
}

/// Basis in which state amplitudes are expressed. The number basis coincides
/// with the `u` basis as a set of vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisTag {
    U,
    V,
    Number,
    Phase,
    ShiftedFock(f64),
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::U => write!(f, "u"),
            Self::V => write!(f, "v"),
            Self::Number => write!(f, "number"),
            Self::Phase => write!(f, "phase"),
            Self::ShiftedFock(a) => write!(f, "shifted-fock({a})"),
        }
    }
}

impl FromStr for BasisTag {
    type Err = TorusError;
    fn from_str(s: &str) -> Result<Self> {
        let unsupported = || TorusError::UnsupportedBasis { from: s.to_string(), to: "u".into() };
        match s {
            "u" => Ok(Self::U),
            "v" => Ok(Self::V),
            "number" => Ok(Self::Number),
            "phase" => Ok(Self::Phase),
            _ => {
                let alpha = s
                    .strip_prefix("shifted-fock(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(unsupported)?;
                if (0.0..1.0).contains(&alpha) {
                    Ok(Self::ShiftedFock(alpha))
                } else {
                    Err(unsupported())
                }
            }
        }
    }
}

/// Matrix whose columns are the basis vectors of `tag` in `u` coordinates.
pub fn basis_matrix(dim: Dimension, tag: BasisTag) -> ComplexMatrix {
    let n = dim.d();
    let di = dim.di();
    let norm = 1.0 / (n as f64).sqrt();
    match tag {
        BasisTag::U | BasisTag::Number => ComplexMatrix::identity(n),
        BasisTag::V => ComplexMatrix::from_fn(n, |k, l| root_of_unity(-((k * l) as i64), di) * norm),
        BasisTag::Phase => ComplexMatrix::from_fn(n, |k, l| root_of_unity((k * l) as i64, di) * norm),
        BasisTag::ShiftedFock(alpha) => ComplexMatrix::from_columns(&shifted_fock_vectors(dim, alpha)),
    }
}

/// `|n+α⟩ = D^{-1/2} Σ_ℓ e^{−iγ0 (n+α) ℓ} |φ_ℓ⟩` in number-basis coordinates.
pub fn shifted_fock_vectors(dim: Dimension, alpha: f64) -> Vec<Vec<Complex64>> {
    let n = dim.d();
    let di = dim.di();
    let g = dim.gamma0();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|m| {
                    (0..n)
                        .map(|l| root_of_unity(((m as i64) - (k as i64)) * l as i64, di) * linalg::cis(-g * alpha * l as f64))
                        .sum::<Complex64>()
                        / n as f64
                })
                .collect()
        })
        .collect()
}

/// Pure state with amplitudes in a tagged basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dim: Dimension,
    amplitudes: Vec<Complex64>,
    basis: BasisTag,
}

impl StateVector {
    pub fn new(dim: Dimension, amplitudes: Vec<Complex64>, basis: BasisTag) -> Result<Self> {
        if amplitudes.len() != dim.d() {
            return Err(TorusError::DimensionMismatch { expected: dim.d(), found: amplitudes.len() });
        }
        Ok(Self { dim, amplitudes, basis })
    }

    /// The `index`-th vector of `basis`, expressed in that basis.
    pub fn basis_state(dim: Dimension, basis: BasisTag, index: i64) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim.d()];
        amplitudes[index.rem_euclid(dim.di()) as usize] = Complex64::new(1.0, 0.0);
        Self { dim, amplitudes, basis }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(TorusError::OutOfRange(format!("state norm {n} cannot be normalised")));
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    /// Re-expresses the state in `target`; amplitudes pass through `u` coordinates.
    pub fn change_basis(&self, target: BasisTag) -> Result<Self> {
        if let BasisTag::ShiftedFock(a) = target {
            if !(0.0..1.0).contains(&a) {
                return Err(TorusError::UnsupportedBasis { from: self.basis.to_string(), to: target.to_string() });
            }
        }
        if self.basis == target {
            return Ok(self.clone());
        }
        let u = basis_matrix(self.dim, self.basis).apply(&self.amplitudes);
        let amplitudes = basis_matrix(self.dim, target).adjoint().apply(&u);
        Ok(Self { dim: self.dim, amplitudes, basis: target })
    }

    /// Amplitudes in `u` coordinates.
    pub fn u_amplitudes(&self) -> Vec<Complex64> {
        match self.basis {
            BasisTag::U | BasisTag::Number => self.amplitudes.clone(),
            other => basis_matrix(self.dim, other).apply(&self.amplitudes),
        }
    }
}

/// `U|u_k⟩ = |u_{k+1 mod D}⟩`.
pub fn shift_operator(dim: Dimension) -> OperatorMatrix {
    let n = dim.d();
    let m = ComplexMatrix::from_fn(n, |i, j| if i == (j + 1) % n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    OperatorMatrix { dim, matrix: m, provenance: Provenance::Shift }
}

/// `V|u_k⟩ = e^{−iγ0 k}|u_k⟩`.
pub fn clock_operator(dim: Dimension) -> OperatorMatrix {
    let diag: Vec<_> = (0..dim.di()).map(|k| root_of_unity(-k, dim.di())).collect();
    OperatorMatrix { dim, matrix: ComplexMatrix::from_diag(&diag), provenance: Provenance::Clock }
}

/// `⟨u_k|F|u_j⟩ = e^{−iγ0 kj}/√D`.
pub fn fourier_operator(dim: Dimension) -> OperatorMatrix {
    OperatorMatrix { dim, matrix: basis_matrix(dim, BasisTag::V), provenance: Provenance::Fourier }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_state;
    use proptest::prelude::*;

    fn dim(d: i64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shift_examples() {
        let u2 = shift_operator(dim(2));
        assert_eq!(u2.matrix()[(0, 1)], c(1.0, 0.0));
        assert_eq!(u2.matrix()[(1, 0)], c(1.0, 0.0));
        assert_eq!(u2.matrix()[(0, 0)], c(0.0, 0.0));
        let u3 = shift_operator(dim(3));
        for (i, j) in [(1, 0), (2, 1), (0, 2)] {
            assert_eq!(u3.matrix()[(i, j)], c(1.0, 0.0));
        }
        assert!(u3.cyclic_residual(c(1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn clock_examples() {
        let v2 = clock_operator(dim(2));
        assert!(v2.matrix().max_abs_diff(&ComplexMatrix::from_diag(&[c(1.0, 0.0), c(-1.0, 0.0)])) < 1e-15);
        let v3 = clock_operator(dim(3));
        let w = linalg::cis(-std::f64::consts::TAU / 3.0);
        assert!((v3.matrix()[(1, 1)] - w).norm() < 1e-15);
        assert!((v3.matrix()[(2, 2)] - w * w).norm() < 1e-15);
    }

    #[test]
    fn fourier_d2_maps_shift_to_clock() {
        let d = dim(2);
        let f = fourier_operator(d);
        let s = 1.0 / 2f64.sqrt();
        let expect = ComplexMatrix::from_rows(vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]).unwrap();
        assert!(f.matrix().max_abs_diff(&expect) < 1e-15);
        let fuf = &(f.matrix() * shift_operator(d).matrix()) * &f.matrix().adjoint();
        assert!(fuf.max_abs_diff(clock_operator(d).matrix()) < 1e-15);
    }

    #[test]
    fn fourier_automorphism_cycle() {
        for d in [2, 3, 4, 5, 7, 11] {
            let d = dim(d);
            let (u, v, f) = (shift_operator(d).into_matrix(), clock_operator(d).into_matrix(), fourier_operator(d).into_matrix());
            let fi = f.adjoint();
            let conj = |m: &ComplexMatrix| &(&f * m) * &fi;
            assert!(conj(&u).max_abs_diff(&v) < 1e-12);
            assert!(conj(&v).max_abs_diff(&u.adjoint()) < 1e-12);
            assert!(conj(&u.adjoint()).max_abs_diff(&v.adjoint()) < 1e-12);
            assert!(conj(&v.adjoint()).max_abs_diff(&u) < 1e-12);
            assert!(f.pow(4).max_abs_diff(&ComplexMatrix::identity(d.d())) < 1e-12);
            for m in [&u, &v, &f] {
                assert!(m.unitarity_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn weyl_commutation_all_powers() {
        for d in [2, 3, 5, 7] {
            let d = dim(d);
            let (u, v) = (shift_operator(d).into_matrix(), clock_operator(d).into_matrix());
            for m1 in 0..d.d() as u64 {
                for m2 in 0..d.d() as u64 {
                    let lhs = &u.pow(m1) * &v.pow(m2);
                    let rhs = (&v.pow(m2) * &u.pow(m1)).scale(root_of_unity((m1 * m2) as i64, d.di()));
                    assert!(lhs.max_abs_diff(&rhs) < 1e-11);
                }
            }
        }
    }

    #[test]
    fn u0_in_v_basis_is_uniform() {
        let d = dim(3);
        let s = StateVector::basis_state(d, BasisTag::U, 0).change_basis(BasisTag::V).unwrap();
        for a in s.amplitudes() {
            assert!((a - c(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn v_state_in_u_basis() {
        let d = dim(5);
        let l = 2;
        let s = StateVector::basis_state(d, BasisTag::V, l).u_amplitudes();
        for (k, a) in s.iter().enumerate() {
            let expect = root_of_unity(-(k as i64) * l, 5) / 5f64.sqrt();
            assert!((a - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn bases_are_complete() {
        let d = dim(7);
        for tag in [BasisTag::U, BasisTag::V, BasisTag::Phase, BasisTag::ShiftedFock(0.37)] {
            let b = basis_matrix(d, tag);
            assert!(b.unitarity_residual() < 1e-12, "{tag}");
        }
    }

    #[test]
    fn basis_tag_parsing() {
        assert_eq!("v".parse::<BasisTag>().unwrap(), BasisTag::V);
        assert_eq!("shifted-fock(0.5)".parse::<BasisTag>().unwrap(), BasisTag::ShiftedFock(0.5));
        assert!(matches!("w".parse::<BasisTag>(), Err(TorusError::UnsupportedBasis { .. })));
        assert!("shifted-fock(1.5)".parse::<BasisTag>().is_err());
    }

    #[test]
    fn change_basis_rejects_bad_alpha() {
        let s = StateVector::basis_state(dim(3), BasisTag::U, 0);
        assert!(matches!(s.change_basis(BasisTag::ShiftedFock(2.0)), Err(TorusError::UnsupportedBasis { .. })));
    }

    #[test]
    fn state_length_checked() {
        let e = StateVector::new(dim(3), vec![c(1.0, 0.0)], BasisTag::U).unwrap_err();
        assert_eq!(e, TorusError::DimensionMismatch { expected: 3, found: 1 });
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(seed in any::<u64>(), d in prop::sample::select(vec![2i64, 3, 5, 7]),
                                  tag in prop::sample::select(vec![BasisTag::V, BasisTag::Phase, BasisTag::Number, BasisTag::ShiftedFock(0.25)])) {
            let d = dim(d);
            let psi = random_state(d, seed);
            let back = psi.change_basis(tag).unwrap().change_basis(BasisTag::U).unwrap();
            prop_assert!(linalg::max_abs_diff_vec(back.amplitudes(), psi.amplitudes()) < 1e-12);
            prop_assert!((psi.change_basis(tag).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }
}
