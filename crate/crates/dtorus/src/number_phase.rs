//! The unitary phase operator `E_φ`, the number exponential `E_N`, number
//! functions expanded on a q-oscillator subalgebra, and the action-angle
//! Wigner kernel.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::deformed::QOscillator;
use crate::error::{Result, TorusError};
use crate::lattice::{mod_inverse, Dimension, LatticeVector};
use crate::linalg::{self, cis, root_of_unity, ComplexMatrix};
use crate::operators::{BasisTag, OperatorMatrix, Provenance, StateVector};
use crate::schwinger::{schwinger_from_pair, schwinger_matrix};
use crate::wigner::{Normalization, WignerGrid};

/// `|φ⟩_ℓ = D^{−1/2} Σ_n e^{iγ0 nℓ}|n⟩` in number-basis amplitudes.
pub fn phase_state_amplitudes(dim: Dimension, ell: i64) -> Vec<Complex64> {
    let d = dim.di();
    let norm = 1.0 / (dim.d() as f64).sqrt();
    (0..d).map(|n| root_of_unity(n * ell, d) * norm).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePair {
    pub dim: Dimension,
    /// `Σ_n |n−1⟩⟨n|`.
    pub e_phi: OperatorMatrix,
    /// `e^{−iγ0 N̂}`.
    pub e_n: OperatorMatrix,
    pub phase_states: Vec<StateVector>,
}

impl PhasePair {
    pub fn build(dim: Dimension) -> Self {
        let d = dim.di();
        let n = dim.d();
        let e_phi = ComplexMatrix::from_fn(n, |i, j| {
            if i as i64 == (j as i64 - 1).rem_euclid(d) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let e_n = ComplexMatrix::from_diag(&(0..d).map(|k| root_of_unity(-k, d)).collect::<Vec<_>>());
        let phase_states = (0..d)
            .map(|l| StateVector::new(dim, phase_state_amplitudes(dim, l), BasisTag::Number).expect("length matches dimension"))
            .collect();
        Self {
            dim,
            e_phi: OperatorMatrix::new(dim, e_phi, Provenance::PhaseOperator).expect("square"),
            e_n: OperatorMatrix::new(dim, e_n, Provenance::NumberExponential).expect("square"),
            phase_states,
        }
    }

    /// `e^{−iγ0 m1 m2/2} E_N^{m1} E_φ^{m2}`.
    pub fn schwinger(&self, m: LatticeVector) -> ComplexMatrix {
        schwinger_from_pair(self.dim, self.e_n.matrix(), self.e_phi.matrix(), m)
    }

    /// `max_ℓ ‖E_φ|φ⟩_ℓ − e^{iγ0 ℓ}|φ⟩_ℓ‖`.
    pub fn phase_eigen_residual(&self) -> f64 {
        let d = self.dim.di();
        self.phase_states
            .iter()
            .zip(0..d)
            .map(|(s, l)| {
                let lhs = self.e_phi.matrix().apply(s.amplitudes());
                let rhs: Vec<_> = s.amplitudes().iter().map(|a| a * root_of_unity(l, d)).collect();
                linalg::max_abs_diff_vec(&lhs, &rhs)
            })
            .fold(0.0, f64::max)
    }

    /// `max_ℓ ‖E_N|φ⟩_ℓ − |φ⟩_{ℓ−1}‖`.
    pub fn number_shift_residual(&self) -> f64 {
        let n = self.dim.d();
        (0..n)
            .map(|l| {
                let lhs = self.e_n.matrix().apply(self.phase_states[l].amplitudes());
                linalg::max_abs_diff_vec(&lhs, self.phase_states[(l + n - 1) % n].amplitudes())
            })
            .fold(0.0, f64::max)
    }

    /// `‖Φ†Φ − I‖` for the matrix of phase states.
    pub fn phase_basis_residual(&self) -> f64 {
        let cols: Vec<_> = self.phase_states.iter().map(|s| s.amplitudes().to_vec()).collect();
        let phi = ComplexMatrix::from_columns(&cols);
        (&phi * &phi.adjoint()).max_abs_diff(&ComplexMatrix::identity(self.dim.d())).max(phi.unitarity_residual())
    }

    /// `max_m ‖E_N^{m1} E_φ^{m2} − e^{iγ0 m1 m2} E_φ^{m2} E_N^{m1}‖` over the window.
    pub fn commutation_residual(&self) -> f64 {
        let d = self.dim.di();
        self.dim
            .window_vectors()
            .into_iter()
            .map(|m| {
                let a = self.e_n.matrix().pow(m.m1.rem_euclid(d) as u64);
                let b = self.e_phi.matrix().pow(m.m2.rem_euclid(d) as u64);
                (&a * &b).max_abs_diff(&(&b * &a).scale(root_of_unity(m.m1 * m.m2, d)))
            })
            .fold(0.0, f64::max)
    }
}

/// A number function expanded on the Schwinger elements of one q-oscillator
/// subalgebra.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberExpansion {
    /// `f̃_k = Σ_n e^{iγ0 kn} f(n)`.
    pub coefficients: Vec<Complex64>,
    /// Schwinger label of the `k`-th term.
    pub terms: Vec<LatticeVector>,
    /// Phase `c_k` with `e^{−iγ0 k N̂} = c_k S_{term_k}`.
    pub term_phases: Vec<Complex64>,
    /// The rescaling `q^{D/2}` written for the coefficients, for comparison.
    pub literal_rescaling: Complex64,
    pub reconstruction: OperatorMatrix,
    /// `‖reconstruction − F(N̂)‖_max` with `F(N̂)` diagonal in the `N̂` eigenbasis.
    pub residual: f64,
    /// Worst proportionality residual of `e^{−iγ0 k N̂}` against its term.
    pub term_residual: f64,
}

/// Expands `F(N̂) = Σ_n f(n)|n⟩⟨n|` for the number operator of the
/// q-oscillator on `(m, m′)`. The `k`-th term is `S_{j(m − m′)}` with
/// `j = k (m×m′)^{−1}`, the element proportional to `e^{−iγ0 k N̂}`.
pub fn expand_number_function(dim: Dimension, f: &[f64], m: LatticeVector, mp: LatticeVector) -> Result<NumberExpansion> {
    if f.len() != dim.d() {
        return Err(TorusError::DimensionMismatch { expected: dim.d(), found: f.len() });
    }
    let osc = QOscillator::build(dim, m, mp)?;
    let d = dim.di();
    let g0 = dim.gamma0();
    let inv = mod_inverse(osc.cross, d)
        .ok_or_else(|| TorusError::OutOfRange(format!("m×m′ = {} is not invertible mod {d}", osc.cross)))?;
    let coefficients: Vec<Complex64> =
        (0..d).map(|k| (0..d).map(|n| root_of_unity(k * n, d) * f[n as usize]).sum()).collect();
    let mut terms = Vec::with_capacity(dim.d());
    let mut term_phases = Vec::with_capacity(dim.d());
    let mut term_residual: f64 = 0.0;
    let mut acc = ComplexMatrix::zeros(dim.d());
    for k in 0..d {
        let exp = osc.n_spectrum.map(|n| cis(-g0 * k as f64 * n));
        let j = (k * inv).rem_euclid(d);
        let label = (m - mp).scale(j);
        let s = schwinger_matrix(dim, label);
        let (c, resid) = exp.proportionality(&s);
        term_residual = term_residual.max(resid);
        acc = &acc + &s.scale(coefficients[k as usize] * c / d as f64);
        terms.push(label);
        term_phases.push(c);
    }
    let target = osc.n_spectrum.real(|n| f[n as usize]);
    let residual = acc.max_abs_diff(&target);
    Ok(NumberExpansion {
        coefficients,
        terms,
        term_phases,
        literal_rescaling: osc.q_pow(d as f64 / 2.0),
        reconstruction: OperatorMatrix::new(dim, acc, Provenance::Derived("number-function expansion".into()))?,
        residual,
        term_residual,
    })
}

/// `Δ(J, θ)` with the `1/(2πD)` measure.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionAngleKernel {
    pub dim: Dimension,
    pub action: f64,
    pub angle: f64,
    pub kernel: OperatorMatrix,
    /// `J` is integer or half-integer and `θ` lies on `γ0 Z`.
    pub exact: bool,
}

fn on_angle_grid(dim: Dimension, theta: f64) -> bool {
    let x = theta / dim.gamma0();
    (x - x.round()).abs() < 1e-12
}

fn kernel_weight(dim: Dimension, action: f64, angle: f64, m: LatticeVector) -> Complex64 {
    cis(dim.gamma0() * m.m1 as f64 * action - m.m2 as f64 * angle) / (TAU * dim.d() as f64)
}

/// `Δ(J,θ) = (2πD)^{−1} Σ_m e^{i(γ0 m1 J − m2 θ)} e^{−iγ0 m1 m2/2} E_N^{m1} E_φ^{m2}`.
pub fn kernel_from_pair(dim: Dimension, action: f64, angle: f64) -> ComplexMatrix {
    let d = dim.di();
    let mut out = ComplexMatrix::zeros(dim.d());
    for m in dim.window_vectors() {
        let w = kernel_weight(dim, action, angle, m) * root_of_unity(m.m1 * m.m2, 2 * d);
        for j in 0..d {
            let row = (j - m.m2).rem_euclid(d) as usize;
            out[(row, j as usize)] += w * root_of_unity(-m.m1 * j, d);
        }
    }
    out
}

/// The same kernel assembled from phase-state dyads
/// `e^{iγ0 ℓ m2} e^{iγ0 m1 m2/2} |φ⟩_ℓ ⟨φ|_{ℓ+m1}`.
pub fn kernel_from_phase_states(dim: Dimension, action: f64, angle: f64) -> ComplexMatrix {
    let d = dim.di();
    let n = dim.d();
    let mut in_phase = ComplexMatrix::zeros(n);
    for m in dim.window_vectors() {
        let w = kernel_weight(dim, action, angle, m) * root_of_unity(m.m1 * m.m2, 2 * d);
        for l in 0..d {
            in_phase[(l as usize, (l + m.m1).rem_euclid(d) as usize)] += w * root_of_unity(l * m.m2, d);
        }
    }
    let cols: Vec<_> = (0..d).map(|l| phase_state_amplitudes(dim, l)).collect();
    let phi = ComplexMatrix::from_columns(&cols);
    &(&phi * &in_phase) * &phi.adjoint()
}

pub fn build_action_angle_kernel(dim: Dimension, action: f64, angle: f64) -> ActionAngleKernel {
    let exact = (2.0 * action).fract() == 0.0 && on_angle_grid(dim, angle);
    let kernel = OperatorMatrix::new(dim, kernel_from_pair(dim, action, angle), Provenance::WignerKernel).expect("square");
    ActionAngleKernel { dim, action, angle, kernel, exact }
}

/// `W(J,θ) = ⟨ψ|Δ(J,θ)|ψ⟩` at arbitrary points, with the largest discarded
/// imaginary part.
pub fn action_angle_values(state: &StateVector, points: &[(f64, f64)]) -> (Vec<f64>, f64) {
    let dim = state.dim();
    let d = dim.di();
    let psi = state.u_amplitudes();
    let chi: Vec<(LatticeVector, Complex64)> = dim
        .window_vectors()
        .into_iter()
        .map(|m| {
            let half = root_of_unity(m.m1 * m.m2, 2 * d);
            let val: Complex64 = (0..d)
                .map(|j| psi[(j - m.m2).rem_euclid(d) as usize].conj() * psi[j as usize] * root_of_unity(-m.m1 * j, d))
                .sum();
            (m, val * half)
        })
        .collect();
    let mut max_imag: f64 = 0.0;
    let values = points
        .iter()
        .map(|&(j, t)| {
            let w: Complex64 = chi.iter().map(|(m, c)| c * kernel_weight(dim, j, t, *m)).sum();
            max_imag = max_imag.max(w.im.abs());
            w.re
        })
        .collect();
    (values, max_imag)
}

/// The action-angle Wigner function on `J ∈ {0…D−1}`, `θ = γ0·{0…D−1}`,
/// rows indexed by `J`.
pub fn wigner_number_phase(state: &StateVector) -> WignerGrid {
    let dim = state.dim();
    let g0 = dim.gamma0();
    let n = dim.d();
    let points: Vec<(f64, f64)> = (0..n).flat_map(|j| (0..n).map(move |t| (j as f64, g0 * t as f64))).collect();
    let (values, max_imag) = action_angle_values(state, &points);
    WignerGrid { dim, values, max_imag, normalization: Normalization::ActionAngle, label: format!("{}-basis state", state.basis()) }
}

/// `Σ_J (2π/D) Σ_θ W(J,θ)`.
pub fn action_angle_mass(grid: &WignerGrid) -> f64 {
    grid.total() * TAU / grid.dim.d() as f64
}

/// `max_J |(2π/D) Σ_θ W − |⟨J|ψ⟩|²|` and `max_ℓ |Σ_J W(J, γ0 ℓ) − (D/2π)|⟨φ_ℓ|ψ⟩|²|`.
pub fn action_angle_marginal_residuals(state: &StateVector) -> (f64, f64) {
    let dim = state.dim();
    let grid = wigner_number_phase(state);
    let n = dim.d() as f64;
    let psi = state.u_amplitudes();
    let number = grid
        .marginal_first()
        .iter()
        .zip(&psi)
        .map(|(w, a)| (w * TAU / n - a.norm_sqr()).abs())
        .fold(0.0, f64::max);
    let phase = grid
        .marginal_second()
        .iter()
        .enumerate()
        .map(|(l, w)| {
            let p = linalg::inner(&phase_state_amplitudes(dim, l as i64), &psi).norm_sqr();
            (w - p * n / TAU).abs()
        })
        .fold(0.0, f64::max);
    (number, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, rng};
    use crate::schwinger::algebra_suite;
    use proptest::prelude::*;

    fn dim(d: i64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn lv(a: i64, b: i64) -> LatticeVector {
        LatticeVector::new(a, b)
    }

    #[test]
    fn d3_phase_operator_entries() {
        let p = PhasePair::build(dim(3));
        let e = p.e_phi.matrix();
        let ones = [(2, 0), (0, 1), (1, 2)];
        for i in 0..3 {
            for j in 0..3 {
                let want = if ones.contains(&(i, j)) { 1.0 } else { 0.0 };
                assert_eq!(e[(i, j)], Complex64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn number_exponential_eigenvalue() {
        let p = PhasePair::build(dim(5));
        let v = p.e_n.matrix().apply(StateVector::basis_state(dim(5), BasisTag::Number, 2).amplitudes());
        assert!((v[2] - cis(-4.0 * std::f64::consts::PI / 5.0)).norm() < 1e-15);
    }

    #[test]
    fn pair_relations() {
        for d in [2, 3, 5, 7] {
            let p = PhasePair::build(dim(d));
            assert!(p.phase_eigen_residual() < 1e-12);
            assert!(p.number_shift_residual() < 1e-12);
            assert!(p.phase_basis_residual() < 1e-12);
            assert!(p.commutation_residual() < 1e-11);
        }
    }

    #[test]
    fn pair_passes_schwinger_suite() {
        for d in [2, 3, 5, 7] {
            let p = PhasePair::build(dim(d));
            let r = algebra_suite(dim(d), |m| p.schwinger(m), 30, &mut rng(d as u64));
            assert!(r.max() < 1e-11, "D={d}: {r:?}");
        }
    }

    #[test]
    fn expansion_examples() {
        let d = dim(5);
        let e = expand_number_function(d, &[1.0; 5], lv(1, 0), lv(0, 1)).unwrap();
        assert!((e.coefficients[0] - Complex64::new(5.0, 0.0)).norm() < 1e-12);
        assert!(e.coefficients[1..].iter().all(|c| c.norm() < 1e-12));
        assert!(e.reconstruction.matrix().max_abs_diff(&ComplexMatrix::identity(5)) < 1e-12);

        let mut delta = [0.0; 5];
        delta[3] = 1.0;
        let e = expand_number_function(d, &delta, lv(1, 0), lv(0, 1)).unwrap();
        for (k, c) in e.coefficients.iter().enumerate() {
            assert!((c - root_of_unity(3 * k as i64, 5)).norm() < 1e-12);
        }
        assert!(e.residual < 1e-10);
    }

    #[test]
    fn expansion_of_oscillator_spectrum() {
        let d = dim(5);
        let osc = QOscillator::build(d, lv(1, 0), lv(0, 1)).unwrap();
        let e = expand_number_function(d, &osc.spectrum, lv(1, 0), lv(0, 1)).unwrap();
        assert!(e.residual < 1e-10);
    }

    #[test]
    fn expansion_over_all_pairs() {
        for d in [3, 5, 7] {
            let d = dim(d);
            let f: Vec<f64> = (0..d.d()).map(|n| (n as f64 * 0.7).sin() + 2.0).collect();
            for m in d.window_vectors() {
                for mp in d.window_vectors() {
                    if m.cross_mod(mp, d) == 0 {
                        continue;
                    }
                    let e = expand_number_function(d, &f, m, mp).unwrap();
                    assert!(e.term_residual < 1e-10 && e.residual < 1e-9, "{m} {mp}");
                }
            }
        }
    }

    #[test]
    fn expansion_rejects_collinear() {
        assert!(matches!(
            expand_number_function(dim(5), &[0.0; 5], lv(1, 1), lv(2, 2)),
            Err(TorusError::CollinearVectors { .. })
        ));
    }

    #[test]
    fn kernel_forms_agree() {
        let d = dim(3);
        let a = kernel_from_pair(d, 1.0, TAU / 3.0);
        let b = kernel_from_phase_states(d, 1.0, TAU / 3.0);
        assert!(a.max_abs_diff(&b) < 1e-11);
        for dd in [5, 7] {
            let d = dim(dd);
            for (j, t) in [(0.0, 0.0), (2.0, 0.9), (1.5, 3.0)] {
                assert!(kernel_from_pair(d, j, t).max_abs_diff(&kernel_from_phase_states(d, j, t)) < 1e-11);
            }
        }
    }

    #[test]
    fn kernel_cyclic_and_hermitian() {
        let d = dim(5);
        let k = build_action_angle_kernel(d, 2.0, 2.0 * d.gamma0());
        assert!(k.exact);
        assert!(k.kernel.matrix().hermiticity_residual() < 1e-12);
        let shifted = kernel_from_pair(d, 7.0, 2.0 * d.gamma0() + TAU);
        assert!(shifted.max_abs_diff(k.kernel.matrix()) < 1e-12);
        assert!(!build_action_angle_kernel(d, 0.3, 0.0).exact);
    }

    #[test]
    fn number_state_is_a_line() {
        for d in [5, 31] {
            let d = dim(d);
            let n0 = 2;
            let w = wigner_number_phase(&StateVector::basis_state(d, BasisTag::Number, n0));
            for j in 0..d.di() {
                for t in 0..d.di() {
                    let want = if j == n0 { 1.0 / TAU } else { 0.0 };
                    assert!((w.at(j, t) - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn phase_state_is_a_line() {
        let d = dim(7);
        let s = StateVector::new(d, phase_state_amplitudes(d, 3), BasisTag::Number).unwrap();
        let w = wigner_number_phase(&s);
        for j in 0..7 {
            for t in 0..7 {
                let want = if t == 3 { 1.0 / TAU } else { 0.0 };
                assert!((w.at(j, t) - want).abs() < 1e-10);
            }
        }
    }

    proptest! {
        #[test]
        fn mass_and_marginals(seed in any::<u64>(), d in prop::sample::select(vec![3i64, 5, 7])) {
            let s = random_state(dim(d), seed);
            let w = wigner_number_phase(&s);
            prop_assert!(w.max_imag < 1e-12);
            prop_assert!((action_angle_mass(&w) - 1.0).abs() < 1e-10);
            let (a, b) = action_angle_marginal_residuals(&s);
            prop_assert!(a < 1e-10 && b < 1e-10);
        }
    }
}
