//! The Wigner–Kirkwood kernel `Δ(V)` on the grid Z_D × Z_D, Wigner functions
//! and classical symbols.

use num_complex::Complex64;

use crate::error::{Result, TorusError};
use crate::lattice::{Dimension, LatticeVector};
use crate::linalg::{self, root_of_unity, ComplexMatrix};
use crate::operators::{fourier_operator, BasisTag, OperatorMatrix, Provenance, StateVector};
use crate::schwinger::schwinger_matrix;

/// Measure attached to a kernel or grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `1/D²` with unit weight per grid point.
    Torus,
    /// `1/(2πD)` on the action-angle grid.
    ActionAngle,
}

/// Phase-space point on the integer grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub v1: i64,
    pub v2: i64,
}

impl GridPoint {
    pub fn new(v1: i64, v2: i64) -> Self {
        Self { v1, v2 }
    }

    fn as_lattice(self) -> LatticeVector {
        LatticeVector::new(self.v1, self.v2)
    }
}

impl TryFrom<(f64, f64)> for GridPoint {
    type Error = TorusError;
    fn try_from((a, b): (f64, f64)) -> Result<Self> {
        if a.fract() != 0.0 || b.fract() != 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(TorusError::OffGrid((a, b)));
        }
        Ok(Self::new(a as i64, b as i64))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerKernel {
    pub v: GridPoint,
    pub kernel: OperatorMatrix,
    pub normalization: Normalization,
}

/// `Σ_m w(m) S_m` over the label window, assembled column by column.
pub(crate) fn schwinger_sum(dim: Dimension, weight: impl Fn(LatticeVector) -> Complex64) -> ComplexMatrix {
    let d = dim.di();
    let mut out = ComplexMatrix::zeros(dim.d());
    for m in dim.window_vectors() {
        let w = weight(m);
        if w.norm() == 0.0 {
            continue;
        }
        let half = root_of_unity(-(m.m1 * m.m2), 2 * d) * w;
        for j in 0..d {
            let row = (j + m.m1).rem_euclid(d) as usize;
            out[(row, j as usize)] += half * root_of_unity(-m.m2 * j, d);
        }
    }
    out
}

/// `Δ(V) = D^{−2} Σ_m e^{−iγ0 m×V} S_m`.
pub fn kernel_matrix(dim: Dimension, v: GridPoint) -> ComplexMatrix {
    let d = dim.di();
    let norm = 1.0 / (d * d) as f64;
    schwinger_sum(dim, |m| root_of_unity(-m.cross(v.as_lattice()), d) * norm)
}

pub fn build_kernel(dim: Dimension, v: GridPoint) -> WignerKernel {
    let kernel = OperatorMatrix::new(dim, kernel_matrix(dim, v), Provenance::WignerKernel).expect("square by construction");
    WignerKernel { v, kernel, normalization: Normalization::Torus }
}

/// `Δ(V)` at an arbitrary real point, for plotting only; the flag is `false`
/// off the integer grid.
pub fn kernel_continuous(dim: Dimension, v: (f64, f64)) -> (ComplexMatrix, bool) {
    let g = dim.gamma0();
    let d = dim.d() as f64;
    let m = schwinger_sum(dim, |m| linalg::cis(-g * (m.m1 as f64 * v.1 - m.m2 as f64 * v.0)) / (d * d));
    (m, GridPoint::try_from(v).is_ok())
}

/// `‖Σ_V e^{iγ0 m×V} Δ(V) − S_m‖_max`.
pub fn dual_residual(dim: Dimension, m: LatticeVector) -> f64 {
    let d = dim.di();
    let mut acc = ComplexMatrix::zeros(dim.d());
    for v in grid(dim) {
        acc = &acc + &kernel_matrix(dim, v).scale(root_of_unity(m.cross(v.as_lattice()), d));
    }
    acc.max_abs_diff(&schwinger_matrix(dim, m))
}

pub fn grid(dim: Dimension) -> impl Iterator<Item = GridPoint> {
    let d = dim.di();
    (0..d).flat_map(move |a| (0..d).map(move |b| GridPoint::new(a, b)))
}

/// Real samples on the `D × D` grid, row-major in `V1` then `V2`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub dim: Dimension,
    pub values: Vec<f64>,
    /// Largest discarded imaginary part.
    pub max_imag: f64,
    pub normalization: Normalization,
    pub label: String,
}

impl WignerGrid {
    pub fn at(&self, v1: i64, v2: i64) -> f64 {
        let d = self.dim.di();
        self.values[(v1.rem_euclid(d) * d + v2.rem_euclid(d)) as usize]
    }

    pub fn total(&self) -> f64 {
        linalg::compensated_sum(self.values.iter().copied())
    }

    /// `Σ_{V2} W(V1, V2)` indexed by `V1`.
    pub fn marginal_first(&self) -> Vec<f64> {
        self.values.chunks(self.dim.d()).map(|row| row.iter().sum()).collect()
    }

    /// `Σ_{V1} W(V1, V2)` indexed by `V2`.
    pub fn marginal_second(&self) -> Vec<f64> {
        let d = self.dim.d();
        (0..d).map(|b| (0..d).map(|a| self.values[a * d + b]).sum()).collect()
    }

    /// `Σ_V W(V) W′(V)`.
    pub fn pairing(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// The grid `(V1, V2) ↦ W(map(V1, V2))`.
    pub fn remapped(&self, map: impl Fn(i64, i64) -> (i64, i64)) -> Self {
        let d = self.dim.di();
        let values = (0..d)
            .flat_map(|a| (0..d).map(move |b| (a, b)))
            .map(|(a, b)| {
                let (x, y) = map(a, b);
                self.at(x, y)
            })
            .collect();
        Self { values, ..self.clone() }
    }
}

/// `χ(m) = ⟨ψ|S_m|ψ⟩` over the window.
fn characteristic(dim: Dimension, psi: &[Complex64]) -> Vec<(LatticeVector, Complex64)> {
    let d = dim.di();
    dim.window_vectors()
        .into_iter()
        .map(|m| {
            let half = root_of_unity(-(m.m1 * m.m2), 2 * d);
            let val: Complex64 = (0..d)
                .map(|j| psi[(j + m.m1).rem_euclid(d) as usize].conj() * psi[j as usize] * root_of_unity(-m.m2 * j, d))
                .sum();
            (m, val * half)
        })
        .collect()
}

/// `W(V) = ⟨ψ|Δ(V)|ψ⟩` on every grid point.
pub fn wigner_function(state: &StateVector) -> WignerGrid {
    let dim = state.dim();
    let d = dim.di();
    let psi = state.u_amplitudes();
    let chi = characteristic(dim, &psi);
    let norm = 1.0 / (d * d) as f64;
    let mut values = Vec::with_capacity(dim.d() * dim.d());
    let mut max_imag: f64 = 0.0;
    for v in grid(dim) {
        let w: Complex64 = chi.iter().map(|(m, c)| c * root_of_unity(-m.cross(v.as_lattice()), d)).sum::<Complex64>() * norm;
        max_imag = max_imag.max(w.im.abs());
        values.push(w.re);
    }
    WignerGrid { dim, values, max_imag, normalization: Normalization::Torus, label: format!("{}-basis state", state.basis()) }
}

/// `f(V) = Tr(F̂ Δ(V))`; `Δ` is Hermitian so this equals `Tr(F̂ Δ†(V))`.
pub fn classical_symbol(op: &ComplexMatrix, dim: Dimension) -> Result<Vec<Complex64>> {
    if op.dim() != dim.d() {
        return Err(TorusError::DimensionMismatch { expected: dim.d(), found: op.dim() });
    }
    Ok(grid(dim).map(|v| (op * &kernel_matrix(dim, v)).trace()).collect())
}

/// `F̂ = D Σ_V f(V) Δ(V)`.
pub fn operator_from_symbol(dim: Dimension, symbol: &[Complex64]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(dim.d());
    for (v, &f) in grid(dim).zip(symbol) {
        acc = &acc + &kernel_matrix(dim, v).scale(f * dim.d() as f64);
    }
    acc
}

/// Residuals of the six structural properties for one pair of states.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PropertyReport {
    pub reality: f64,
    pub marginal_first: f64,
    pub marginal_second: f64,
    pub shift_first: f64,
    pub shift_second: f64,
    pub time_inversion: f64,
    pub parity: f64,
    pub overlap: f64,
    pub pairing: f64,
}

impl PropertyReport {
    pub fn named(&self) -> [(&'static str, f64); 9] {
        [
            ("reality", self.reality),
            ("marginal_u", self.marginal_first),
            ("marginal_v", self.marginal_second),
            ("shift_u", self.shift_first),
            ("shift_v", self.shift_second),
            ("time_inversion", self.time_inversion),
            ("parity", self.parity),
            ("overlap", self.overlap),
            ("pairing", self.pairing),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|p| p.1).fold(0.0, f64::max)
    }

    pub fn merge(&mut self, other: &Self) {
        let fields = [
            (&mut self.reality, other.reality),
            (&mut self.marginal_first, other.marginal_first),
            (&mut self.marginal_second, other.marginal_second),
            (&mut self.shift_first, other.shift_first),
            (&mut self.shift_second, other.shift_second),
            (&mut self.time_inversion, other.time_inversion),
            (&mut self.parity, other.parity),
            (&mut self.overlap, other.overlap),
            (&mut self.pairing, other.pairing),
        ];
        for (a, b) in fields {
            *a = a.max(b);
        }
    }
}

fn state_u(dim: Dimension, amps: Vec<Complex64>) -> StateVector {
    StateVector::new(dim, amps, BasisTag::U).expect("length matches dimension")
}

/// Runs every property on `psi` (and on the pair `psi`, `phi`), with
/// `observable` used for the trace pairing and `shift` for the covariance checks.
pub fn property_suite(psi: &StateVector, phi: &StateVector, observable: &ComplexMatrix, shift: i64) -> Result<PropertyReport> {
    let dim = psi.dim();
    if phi.dim() != dim {
        return Err(TorusError::DimensionMismatch { expected: dim.d(), found: phi.dim().d() });
    }
    let d = dim.di();
    let a = psi.u_amplitudes();
    let w = wigner_function(psi);
    let mut r = PropertyReport { reality: w.max_imag, ..Default::default() };

    let probs: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
    r.marginal_first = w.marginal_first().iter().zip(&probs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let v_probs: Vec<f64> = psi.change_basis(BasisTag::V)?.amplitudes().iter().map(|z| z.norm_sqr()).collect();
    r.marginal_second = w.marginal_second().iter().zip(&v_probs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let shifted: Vec<Complex64> = (0..d).map(|k| a[(k - shift).rem_euclid(d) as usize]).collect();
    let ws = wigner_function(&state_u(dim, shifted));
    r.shift_first = ws.remapped(|v1, v2| (v1 + shift, v2)).max_abs_diff(&w);
    let clocked: Vec<Complex64> = (0..d).map(|k| a[k as usize] * root_of_unity(-shift * k, d)).collect();
    let wc = wigner_function(&state_u(dim, clocked));
    r.shift_second = wc.remapped(|v1, v2| (v1, v2 + shift)).max_abs_diff(&w);

    let conj: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
    r.time_inversion = wigner_function(&state_u(dim, conj)).max_abs_diff(&w.remapped(|v1, v2| (v1, -v2)));
    let f = fourier_operator(dim).into_matrix();
    let parity = (&f * &f).apply(&a);
    r.parity = wigner_function(&state_u(dim, parity)).max_abs_diff(&w.remapped(|v1, v2| (-v1, -v2)));

    let wp = wigner_function(phi);
    let ov = linalg::inner(&a, &phi.u_amplitudes()).norm_sqr() / dim.d() as f64;
    r.overlap = (w.pairing(&wp) - ov).abs().max((w.pairing(&w) - 1.0 / dim.d() as f64).abs());

    let symbol = classical_symbol(observable, dim)?;
    let lhs = linalg::inner(&a, &observable.apply(&a)) / dim.d() as f64;
    let rhs: Complex64 = symbol.iter().zip(&w.values).map(|(s, x)| s * x).sum();
    r.pairing = (lhs - rhs).norm();
    Ok(r)
}

/// `‖op − D Σ_V Tr(op Δ(V)) Δ(V)‖_max`.
pub fn symbol_round_trip_residual(op: &ComplexMatrix, dim: Dimension) -> Result<f64> {
    let s = classical_symbol(op, dim)?;
    Ok(operator_from_symbol(dim, &s).max_abs_diff(op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, rng};
    use crate::schwinger::schwinger_matrix;
    use proptest::prelude::*;

    fn dim(d: i64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(dim: Dimension, seed: u64) -> ComplexMatrix {
        crate::random::random_hermitian(dim, &mut rng(seed))
    }

    #[test]
    fn d2_origin_kernel() {
        let d = dim(2);
        let k = build_kernel(d, GridPoint::new(0, 0));
        let sum = [(0, 0), (1, 0), (0, 1), (1, 1)]
            .iter()
            .fold(ComplexMatrix::zeros(2), |acc, &(a, b)| &acc + &schwinger_matrix(d, LatticeVector::new(a, b)));
        assert!(k.kernel.matrix().max_abs_diff(&sum.scale(c(0.25, 0.0))) < 1e-15);
        assert!(k.kernel.matrix().hermiticity_residual() < 1e-15);
    }

    #[test]
    fn kernels_hermitian_and_dual() {
        for d in [2, 3, 5] {
            let d = dim(d);
            let mut trace = c(0.0, 0.0);
            for v in grid(d) {
                let k = kernel_matrix(d, v);
                assert!(k.hermiticity_residual() < 1e-12);
                trace += k.trace();
            }
            assert!((trace - c(d.d() as f64, 0.0)).norm() < 1e-12);
            for m in d.window_vectors() {
                assert!(dual_residual(d, m) < 1e-12);
            }
        }
    }

    #[test]
    fn continuous_kernel_flags_off_grid() {
        let d = dim(3);
        let (k, exact) = kernel_continuous(d, (1.0, 2.0));
        assert!(exact);
        assert!(k.max_abs_diff(&kernel_matrix(d, GridPoint::new(1, 2))) < 1e-14);
        assert!(!kernel_continuous(d, (0.5, 0.0)).1);
        assert_eq!(GridPoint::try_from((0.5, 1.0)), Err(TorusError::OffGrid((0.5, 1.0))));
    }

    #[test]
    fn basis_state_marginals() {
        let w = wigner_function(&StateVector::basis_state(dim(2), BasisTag::U, 0));
        let m = w.marginal_first();
        assert!((m[0] - 1.0).abs() < 1e-14 && m[1].abs() < 1e-14);
        let w = wigner_function(&StateVector::basis_state(dim(3), BasisTag::V, 0));
        let m = w.marginal_second();
        assert!((m[0] - 1.0).abs() < 1e-14 && m[1].abs() < 1e-14 && m[2].abs() < 1e-14);
        assert!((w.total() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn u0_shift_moves_grid() {
        let d = dim(3);
        let w = wigner_function(&StateVector::basis_state(d, BasisTag::U, 0));
        let w1 = wigner_function(&StateVector::basis_state(d, BasisTag::U, 1));
        for v1 in 0..3 {
            for v2 in 0..3 {
                assert!((w1.at(v1 + 1, v2) - w.at(v1, v2)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn symbol_examples() {
        let d = dim(3);
        let s = classical_symbol(&ComplexMatrix::identity(3), d).unwrap();
        assert!(s.iter().all(|z| (z - c(1.0 / 3.0, 0.0)).norm() < 1e-14));
        let m = LatticeVector::new(1, 0);
        let s = classical_symbol(&schwinger_matrix(d, m), d).unwrap();
        for (v, z) in grid(d).zip(&s) {
            let expect = root_of_unity(m.cross(LatticeVector::new(v.v1, v.v2)), 3) / 3.0;
            assert!((z - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn orthogonal_states_have_zero_pairing() {
        let d = dim(5);
        let a = wigner_function(&StateVector::basis_state(d, BasisTag::U, 1));
        let b = wigner_function(&StateVector::basis_state(d, BasisTag::U, 3));
        assert!(a.pairing(&b).abs() < 1e-14);
        assert!((a.pairing(&a) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn properties_on_random_states() {
        for d in [3, 5, 7] {
            let d = dim(d);
            for s in 0..5 {
                let r = property_suite(&random_state(d, s), &random_state(d, s + 100), &random_hermitian(d, s), 1).unwrap();
                assert!(r.max() < 1e-10, "D={d}: {r:?}");
            }
        }
    }

    #[test]
    fn kernel_completeness() {
        let d = dim(5);
        let op = ComplexMatrix::from_fn(5, |i, j| c(i as f64 - 0.3 * j as f64, (i * j) as f64 * 0.07));
        assert!(symbol_round_trip_residual(&op, d).unwrap() < 1e-9);
    }

    proptest! {
        #[test]
        fn mass_and_reality(seed in any::<u64>(), d in prop::sample::select(vec![2i64, 3, 5, 7, 11])) {
            let w = wigner_function(&random_state(dim(d), seed));
            prop_assert!(w.max_imag < 1e-12);
            prop_assert!((w.total() - 1.0).abs() < 1e-10);
        }
    }
}
