//! The Schwinger operator basis `S_m = e^{−iγ0 m1 m2/2} U^{m1} V^{m2}`, its
//! projective algebra and its eigensystem.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, TorusError};
use crate::lattice::{Dimension, LatticeVector};
use crate::linalg::{self, root_of_unity, ComplexMatrix};
use crate::operators::{BasisTag, OperatorMatrix, Provenance, StateVector};
use crate::random::random_lattice_vector;

/// Dense matrix of `S_m` for the integer representative `m`.
pub fn schwinger_matrix(dim: Dimension, m: LatticeVector) -> ComplexMatrix {
    let d = dim.di();
    let half = root_of_unity(-(m.m1 * m.m2), 2 * d);
    let mut s = ComplexMatrix::zeros(dim.d());
    for j in 0..d {
        let row = (j + m.m1).rem_euclid(d) as usize;
        s[(row, j as usize)] = half * root_of_unity(-m.m2 * j, d);
    }
    s
}

/// `e^{−iγ0 m1 m2/2} X^{m1} Y^{m2}` for any pair of order-`D` unitaries.
pub fn schwinger_from_pair(dim: Dimension, x: &ComplexMatrix, y: &ComplexMatrix, m: LatticeVector) -> ComplexMatrix {
    let d = dim.di();
    let xp = x.pow(m.m1.rem_euclid(d) as u64);
    let yp = y.pow(m.m2.rem_euclid(d) as u64);
    (&xp * &yp).scale(root_of_unity(-(m.m1 * m.m2), 2 * d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchwingerOperator {
    m: LatticeVector,
    op: OperatorMatrix,
}

impl SchwingerOperator {
    pub fn build(dim: Dimension, m: LatticeVector) -> Self {
        let op = OperatorMatrix::new(dim, schwinger_matrix(dim, m), Provenance::Schwinger(m)).expect("square by construction");
        Self { m, op }
    }

    pub fn m(&self) -> LatticeVector {
        self.m
    }

    pub fn dim(&self) -> Dimension {
        self.op.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn operator(&self) -> &OperatorMatrix {
        &self.op
    }

    /// `‖S_m† − S_{−m}‖_max`.
    pub fn adjoint_residual(&self) -> f64 {
        self.matrix().adjoint().max_abs_diff(&schwinger_matrix(self.dim(), -self.m))
    }

    /// `|Tr S_m − D δ_{m,0}|`.
    pub fn trace_residual(&self) -> f64 {
        let expect = if self.m.is_zero_mod(self.dim()) {
            // S_{Dk} = (−1)^{D k1 k2} I for the integer representative.
            let (k1, k2) = (self.m.m1 / self.dim().di(), self.m.m2 / self.dim().di());
            let sign = if (self.dim().di() * k1 * k2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * self.dim().d() as f64
        } else {
            0.0
        };
        (self.matrix().trace() - expect).norm()
    }
}

/// `S_a S_b = e^{iγ0 a×b/2} S_{a+b}`; returns the phase, `S_{a+b}` and the
/// residual of the identity.
pub fn compose(a: &SchwingerOperator, b: &SchwingerOperator) -> Result<(Complex64, SchwingerOperator, f64)> {
    if a.dim() != b.dim() {
        return Err(TorusError::DimensionMismatch { expected: a.dim().d(), found: b.dim().d() });
    }
    let dim = a.dim();
    let phase = root_of_unity(a.m.cross(b.m), 2 * dim.di());
    let sum = SchwingerOperator::build(dim, a.m + b.m);
    let residual = (a.matrix() * b.matrix()).max_abs_diff(&sum.matrix().scale(phase));
    Ok((phase, sum, residual))
}

/// Computes `(S_m)^D`, checks it is scalar and equals `(−1)^{D m1 m2}`.
pub fn power_check(s: &SchwingerOperator) -> Result<Complex64> {
    let dim = s.dim();
    let p = s.matrix().pow(dim.d() as u64);
    let scalar = p[(0, 0)];
    let off = p.max_abs_diff(&ComplexMatrix::identity(dim.d()).scale(scalar));
    if off > 1e-9 {
        return Err(TorusError::NonScalarPower(off));
    }
    let predicted = if (dim.di() * s.m.m1 * s.m.m2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    if (scalar - predicted).norm() > 1e-9 {
        return Err(TorusError::PhaseMismatch(format!("(S_{})^D = {scalar}, expected {predicted}", s.m)));
    }
    Ok(scalar)
}

/// `λ_r = e^{iπ m1 m2} e^{−2πir/D}`.
pub fn closed_form_eigenvalue(dim: Dimension, m: LatticeVector, r: i64) -> Complex64 {
    let d = dim.di();
    root_of_unity(m.m1 * m.m2 * d - 2 * r, 2 * d)
}

/// Index `r` of an eigenvalue `λ`, recovered from its phase.
pub fn eigenvalue_index(dim: Dimension, m: LatticeVector, lambda: Complex64) -> i64 {
    let d = dim.d() as f64;
    let rel = lambda * root_of_unity(-(m.m1 * m.m2 * dim.di()), 2 * dim.di());
    ((-d * rel.arg() / std::f64::consts::TAU).round() as i64).rem_euclid(dim.di())
}

/// Eigenvalues and phase-fixed eigenvectors of `S_m`, indexed by `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchwingerEigensystem {
    pub m: LatticeVector,
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<StateVector>,
    /// `β_k = γ0 m2 (2k − m1)/2` for `k = 0…D−1`.
    pub beta: Vec<f64>,
    pub warning: Option<String>,
}

impl SchwingerEigensystem {
    pub fn dim(&self) -> Dimension {
        self.eigenvectors[0].dim()
    }

    pub fn vectors(&self) -> Vec<Vec<Complex64>> {
        self.eigenvectors.iter().map(|v| v.amplitudes().to_vec()).collect()
    }

    /// `‖S_m e_r − λ_r e_r‖` maximised over `r`.
    pub fn residual(&self) -> f64 {
        let s = schwinger_matrix(self.dim(), self.m);
        self.eigenvectors
            .iter()
            .zip(&self.eigenvalues)
            .map(|(v, &l)| {
                let sv = s.apply(v.amplitudes());
                let lv: Vec<_> = v.amplitudes().iter().map(|a| a * l).collect();
                linalg::max_abs_diff_vec(&sv, &lv)
            })
            .fold(0.0, f64::max)
    }

    /// `‖E†E − I‖_max` for the eigenvector matrix.
    pub fn orthonormality_residual(&self) -> f64 {
        ComplexMatrix::from_columns(&self.vectors()).unitarity_residual()
    }
}

/// Eigensystem of `S_m` by propagating `e_{k−m1} = λ e^{iβ_k} e_k` around the
/// orbit of `k ↦ k − m1`, starting from a real positive `e_0`.
pub fn eigensystem_by_recursion(dim: Dimension, m: LatticeVector) -> Result<SchwingerEigensystem> {
    let d = dim.di();
    let n = dim.d();
    let degenerate = || TorusError::DegenerateSpectrum { m: m.as_tuple(), dim: n };
    let beta: Vec<f64> = (0..d).map(|k| dim.gamma0() * (m.m2 * (2 * k - m.m1)) as f64 / 2.0).collect();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    if m.m1.rem_euclid(d) == 0 {
        let diag = schwinger_matrix(dim, m);
        let mut slots: Vec<Option<usize>> = vec![None; n];
        for k in 0..n {
            let r = eigenvalue_index(dim, m, diag[(k, k)]) as usize;
            if slots[r].replace(k).is_some() {
                return Err(degenerate());
            }
        }
        for (r, slot) in slots.into_iter().enumerate() {
            let k = slot.ok_or_else(degenerate)?;
            eigenvalues.push(closed_form_eigenvalue(dim, m, r as i64));
            vectors.push(StateVector::basis_state(dim, BasisTag::U, k as i64));
        }
    } else {
        if crate::lattice::gcd(m.m1, d) != 1 {
            return Err(degenerate());
        }
        for r in 0..d {
            let lambda = closed_form_eigenvalue(dim, m, r);
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            let mut k = 0_i64;
            e[0] = Complex64::new(1.0, 0.0);
            for _ in 1..n {
                let next = (k - m.m1).rem_euclid(d);
                let step = root_of_unity(m.m2 * (2 * k - m.m1), 2 * d);
                e[next as usize] = lambda * step * e[k as usize];
                k = next;
            }
            let s = StateVector::new(dim, e, BasisTag::U)?.normalized()?;
            eigenvalues.push(lambda);
            vectors.push(s);
        }
    }
    Ok(SchwingerEigensystem { m, eigenvalues, eigenvectors: vectors, beta, warning: dim.prime_warning() })
}

/// Dense oracle: diagonalises the Hermitian `(e^{−iφ}S + e^{iφ}S†)/2` for the
/// `φ` with the widest eigenvalue gap and recovers `λ` as Rayleigh quotients.
pub fn dense_eigensystem(dim: Dimension, m: LatticeVector) -> Vec<(Complex64, Vec<Complex64>)> {
    let s = schwinger_matrix(dim, m);
    let sd = s.adjoint();
    let best = [0.1, 0.37, 0.61, 0.93, 1.27, 1.71, 2.3]
        .iter()
        .map(|&phi| {
            let h = (&s.scale(linalg::cis(-phi)) + &sd.scale(linalg::cis(phi))).scale(Complex64::new(0.5, 0.0));
            let eig = h.hermitian_eigen();
            let gap = eig.windows(2).map(|w| w[1].0 - w[0].0).fold(f64::INFINITY, f64::min);
            (gap, eig)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty candidate list")
        .1;
    best.into_iter()
        .map(|(_, v)| {
            let lambda = linalg::inner(&v, &s.apply(&v));
            (lambda, v)
        })
        .collect()
}

/// Largest eigenvalue and eigenvector deviation between the recursion and the
/// dense oracle, pairing each recursion eigenvalue with the nearest dense one.
pub fn compare_with_dense(eig: &SchwingerEigensystem) -> (f64, f64) {
    let dense = dense_eigensystem(eig.dim(), eig.m);
    let mut worst_val: f64 = 0.0;
    let mut worst_vec: f64 = 0.0;
    for (l, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        let (dl, dv) = dense
            .iter()
            .min_by(|a, b| (a.0 - l).norm().total_cmp(&(b.0 - l).norm()))
            .expect("dense spectrum non-empty");
        worst_val = worst_val.max((dl - l).norm());
        worst_vec = worst_vec.max(linalg::phase_aligned_diff(v.amplitudes(), dv));
    }
    (worst_val, worst_vec)
}

/// `‖[D_m, D_n] − i(2/γ0) sin(γ0 m×n/2) D_{m+n}‖_max` with `D_m = (D/2π) S_m`.
pub fn sine_commutator_residual(dim: Dimension, m: LatticeVector, n: LatticeVector) -> f64 {
    let scale = Complex64::new(dim.d() as f64 / std::f64::consts::TAU, 0.0);
    let dm = schwinger_matrix(dim, m).scale(scale);
    let dn = schwinger_matrix(dim, n).scale(scale);
    let g = dim.gamma0();
    let coeff = Complex64::new(0.0, 2.0 / g * (g * m.cross(n) as f64 / 2.0).sin());
    dm.commutator(&dn).max_abs_diff(&schwinger_matrix(dim, m + n).scale(scale * coeff))
}

/// `‖F S_m F^{-1} − S_{(−m2, m1)}‖_max`.
pub fn fourier_covariance_residual(dim: Dimension, m: LatticeVector) -> f64 {
    let f = crate::operators::fourier_operator(dim).into_matrix();
    let lhs = &(&f * &schwinger_matrix(dim, m)) * &f.adjoint();
    lhs.max_abs_diff(&schwinger_matrix(dim, LatticeVector::new(-m.m2, m.m1)))
}

/// Rank of the Hilbert–Schmidt Gram matrix of all `S_m` over the window.
pub fn basis_rank(dim: Dimension) -> usize {
    let mats: Vec<ComplexMatrix> = dim.window_vectors().into_iter().map(|m| schwinger_matrix(dim, m)).collect();
    let n = mats.len();
    let gram = ComplexMatrix::from_fn(n, |a, b| (&mats[a].adjoint() * &mats[b]).trace() / dim.d() as f64);
    gram.singular_values().into_iter().filter(|&s| s > 1e-8).count()
}

/// The diagonal `g = diag(1, ω, …, ω^{D−1})` and cyclic `h` (`h|u_k⟩ = |u_{k−1}⟩`)
/// with `ω = e^{iγ0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylPair {
    dim: Dimension,
    pub g: ComplexMatrix,
    pub h: ComplexMatrix,
}

pub fn weyl_matrices(dim: Dimension) -> WeylPair {
    let d = dim.di();
    let diag: Vec<_> = (0..d).map(|k| root_of_unity(k, d)).collect();
    let n = dim.d();
    let h = ComplexMatrix::from_fn(n, |i, j| if j == (i + 1) % n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    WeylPair { dim, g: ComplexMatrix::from_diag(&diag), h }
}

impl WeylPair {
    /// `‖hg − ω gh‖_max`.
    pub fn commutation_residual(&self) -> f64 {
        let omega = root_of_unity(1, self.dim.di());
        (&self.h * &self.g).max_abs_diff(&(&self.g * &self.h).scale(omega))
    }

    /// `J_m = ω^{m1 m2/2} g^{m1} h^{m2}`.
    pub fn j(&self, m: LatticeVector) -> ComplexMatrix {
        let d = self.dim.di();
        let gp = self.g.pow(m.m1.rem_euclid(d) as u64);
        let hp = self.h.pow(m.m2.rem_euclid(d) as u64);
        (&gp * &hp).scale(root_of_unity(m.m1 * m.m2, 2 * d))
    }

    /// Sine-algebra residual for `(D/2π) J_m`. The pair realises the algebra
    /// with the orientation of the cross product reversed:
    /// `[J_m, J_n] = i(2/γ0) sin(γ0 n×m/2) J_{m+n}`.
    pub fn sine_residual(&self, m: LatticeVector, n: LatticeVector) -> f64 {
        let dim = self.dim;
        let scale = Complex64::new(dim.d() as f64 / std::f64::consts::TAU, 0.0);
        let g = dim.gamma0();
        let coeff = Complex64::new(0.0, 2.0 / g * (g * n.cross(m) as f64 / 2.0).sin());
        let jm = self.j(m).scale(scale);
        let jn = self.j(n).scale(scale);
        jm.commutator(&jn).max_abs_diff(&self.j(m + n).scale(scale * coeff))
    }
}

/// Worst residual of each projective-algebra identity.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AlgebraResiduals {
    pub adjoint: f64,
    pub trace: f64,
    pub unit: f64,
    pub inverse: f64,
    pub composition: f64,
    pub power: f64,
}

impl AlgebraResiduals {
    pub fn max(&self) -> f64 {
        [self.adjoint, self.trace, self.unit, self.inverse, self.composition, self.power].into_iter().fold(0.0, f64::max)
    }

    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("adjoint", self.adjoint),
            ("trace", self.trace),
            ("unit", self.unit),
            ("inverse", self.inverse),
            ("composition", self.composition),
            ("power", self.power),
        ]
    }
}

/// Runs every projective-algebra identity over the window and over `pairs`
/// random compositions, with `build` supplying `S_m`.
pub fn algebra_suite(dim: Dimension, build: impl Fn(LatticeVector) -> ComplexMatrix, pairs: usize, rng: &mut impl Rng) -> AlgebraResiduals {
    let d = dim.di();
    let n = dim.d();
    let id = ComplexMatrix::identity(n);
    let mut res = AlgebraResiduals { unit: build(LatticeVector::ZERO).max_abs_diff(&id), ..Default::default() };
    let window = dim.window_vectors();
    for &m in &window {
        let s = build(m);
        let sneg = build(-m);
        res.adjoint = res.adjoint.max(s.adjoint().max_abs_diff(&sneg));
        let tr = if m.is_zero_mod(dim) { n as f64 } else { 0.0 };
        res.trace = res.trace.max((s.trace() - tr).norm());
        res.unit = res.unit.max((&s * &id).max_abs_diff(&s));
        res.inverse = res.inverse.max((&s * &sneg).max_abs_diff(&id));
        let sign = if (d * m.m1 * m.m2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        res.power = res.power.max(s.pow(n as u64).max_abs_diff(&id.scale(Complex64::new(sign, 0.0))));
    }
    let mut compose_once = |a: LatticeVector, b: LatticeVector| {
        let lhs = &build(a) * &build(b);
        let rhs = build(a + b).scale(root_of_unity(a.cross(b), 2 * d));
        res.composition = res.composition.max(lhs.max_abs_diff(&rhs));
    };
    for _ in 0..pairs {
        let a = random_lattice_vector(dim, rng);
        let b = random_lattice_vector(dim, rng);
        compose_once(a, b);
    }
    compose_once(LatticeVector::new(1, 0), LatticeVector::new(0, 1));
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{clock_operator, shift_operator};
    use crate::random::rng;
    use proptest::prelude::*;

    fn dim(d: i64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lv(a: i64, b: i64) -> LatticeVector {
        LatticeVector::new(a, b)
    }

    #[test]
    fn d2_examples() {
        let d = dim(2);
        let s11 = schwinger_matrix(d, lv(1, 1));
        let expect = ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(0.0, 0.0)]]).unwrap();
        assert!(s11.max_abs_diff(&expect) < 1e-15);
        assert!(schwinger_matrix(d, lv(1, 0)).max_abs_diff(shift_operator(d).matrix()) < 1e-15);
        let (phase, sum, res) = compose(&SchwingerOperator::build(d, lv(1, 0)), &SchwingerOperator::build(d, lv(0, 1))).unwrap();
        assert!((phase - c(0.0, 1.0)).norm() < 1e-15);
        assert!(res < 1e-15);
        let prod = ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(sum.matrix().scale(phase).max_abs_diff(&prod) < 1e-15);
    }

    #[test]
    fn matches_product_definition() {
        for d in [2, 3, 4, 5, 7] {
            let d = dim(d);
            let (u, v) = (shift_operator(d).into_matrix(), clock_operator(d).into_matrix());
            for m in d.window_vectors() {
                assert!(schwinger_matrix(d, m).max_abs_diff(&schwinger_from_pair(d, &u, &v, m)) < 1e-12);
            }
        }
    }

    #[test]
    fn representative_sign() {
        let d = dim(5);
        let m = lv(2, 3);
        let shifted = m + lv(5, 0);
        assert!(schwinger_matrix(d, shifted).max_abs_diff(&schwinger_matrix(d, m).scale(c(-1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn power_rule_examples() {
        assert_eq!(power_check(&SchwingerOperator::build(dim(2), lv(1, 1))).map(|z| z.re.round()), Ok(1.0));
        assert_eq!(power_check(&SchwingerOperator::build(dim(3), lv(1, 1))).map(|z| z.re.round()), Ok(-1.0));
        assert_eq!(power_check(&SchwingerOperator::build(dim(5), lv(2, 0))).map(|z| z.re.round()), Ok(1.0));
    }

    #[test]
    fn trace_rule() {
        let d = dim(5);
        for m in d.window_vectors() {
            assert!(SchwingerOperator::build(d, m).trace_residual() < 1e-12);
        }
        assert!(SchwingerOperator::build(d, lv(5, 5)).trace_residual() < 1e-12);
    }

    #[test]
    fn eigen_examples() {
        let e = eigensystem_by_recursion(dim(2), lv(1, 1)).unwrap();
        assert!((e.eigenvalues[0] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((e.eigenvalues[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(e.residual() < 1e-12);
        let e = eigensystem_by_recursion(dim(3), lv(1, 0)).unwrap();
        for r in 0..3 {
            assert!((e.eigenvalues[r] - root_of_unity(-(r as i64), 3)).norm() < 1e-15);
        }
        let e = eigensystem_by_recursion(dim(5), lv(1, 2)).unwrap();
        let (val, vec) = compare_with_dense(&e);
        assert!(val < 1e-9 && vec < 1e-8, "{val} {vec}");
    }

    #[test]
    fn eigen_against_dense_for_all_window_labels() {
        for d in [3, 5, 7] {
            let d = dim(d);
            for m in d.window_vectors().into_iter().filter(|m| !m.is_zero_mod(d)) {
                let e = eigensystem_by_recursion(d, m).unwrap();
                assert!(e.residual() < 1e-12, "{m}");
                assert!(e.orthonormality_residual() < 1e-10, "{m}");
                let (val, vec) = compare_with_dense(&e);
                assert!(val < 1e-9 && vec < 1e-8, "D={d} m={m}: {val} {vec}");
                assert!(e.eigenvectors.iter().all(|v| v.amplitudes()[0].im.abs() < 1e-15 && v.amplitudes()[0].re > 0.0) || m.m1 % d.di() == 0);
            }
        }
    }

    #[test]
    fn composite_dimension_reports_degeneracy() {
        let e = eigensystem_by_recursion(dim(4), lv(2, 0));
        assert_eq!(e.unwrap_err(), TorusError::DegenerateSpectrum { m: (2, 0), dim: 4 });
        let ok = eigensystem_by_recursion(dim(4), lv(1, 1)).unwrap();
        assert!(ok.warning.is_some());
        assert!(ok.residual() < 1e-12);
    }

    #[test]
    fn sine_algebra() {
        let d = dim(3);
        assert!(sine_commutator_residual(d, lv(1, 0), lv(0, 1)) < 1e-12);
        assert!(sine_commutator_residual(d, lv(1, 1), lv(1, 1)) < 1e-15);
        let a = sine_commutator_residual(dim(7), lv(2, 3), lv(-1, 2));
        let b = sine_commutator_residual(dim(7), lv(-1, 2), lv(2, 3));
        assert!((a - b).abs() < 1e-12 && a < 1e-10);
    }

    #[test]
    fn weyl_pair() {
        let w = weyl_matrices(dim(2));
        assert!(w.g.max_abs_diff(&ComplexMatrix::from_diag(&[c(1.0, 0.0), c(-1.0, 0.0)])) < 1e-15);
        assert!(w.h.max_abs_diff(shift_operator(dim(2)).matrix()) < 1e-15);
        assert!((&w.h * &w.g).max_abs_diff(&(&w.g * &w.h).scale(c(-1.0, 0.0))) < 1e-15);
        for d in [2, 3, 5, 7] {
            let w = weyl_matrices(dim(d));
            let id = ComplexMatrix::identity(d as usize);
            assert!(w.g.pow(d as u64).max_abs_diff(&id) < 1e-12);
            assert!(w.h.pow(d as u64).max_abs_diff(&id) < 1e-12);
            assert!(w.commutation_residual() < 1e-12);
        }
        let w = weyl_matrices(dim(3));
        for m in dim(3).window_vectors() {
            for n in dim(3).window_vectors() {
                assert!(w.sine_residual(m, n) < 1e-11, "{m} {n}");
            }
        }
    }

    #[test]
    fn fourier_covariance_and_rank() {
        for d in [2, 3, 5, 7] {
            let d = dim(d);
            for m in d.window_vectors() {
                assert!(fourier_covariance_residual(d, m) < 1e-11);
            }
            assert_eq!(basis_rank(d), d.d() * d.d());
        }
    }

    #[test]
    fn suite_on_primes() {
        let mut r = rng(7);
        for d in [2, 3, 5, 7] {
            let d = dim(d);
            let res = algebra_suite(d, |m| schwinger_matrix(d, m), 50, &mut r);
            assert!(res.max() < 1e-11, "D={d}: {res:?}");
        }
    }

    proptest! {
        #[test]
        fn composition_holds_for_raw_labels(d in prop::sample::select(vec![2i64, 3, 4, 5, 7, 11]),
                                            a in (-20i64..20, -20i64..20), b in (-20i64..20, -20i64..20)) {
            let d = dim(d);
            let (_, _, res) = compose(&SchwingerOperator::build(d, a.into()), &SchwingerOperator::build(d, b.into())).unwrap();
            prop_assert!(res < 1e-11);
        }

        #[test]
        fn adjoint_is_negation(d in prop::sample::select(vec![2i64, 3, 5, 6, 7]), m in (-30i64..30, -30i64..30)) {
            let s = SchwingerOperator::build(dim(d), m.into());
            prop_assert!(s.adjoint_residual() < 1e-12);
            prop_assert!(s.operator().unitarity_residual() < 1e-12);
        }

        #[test]
        fn recursion_spectrum_is_closed_form(d in prop::sample::select(vec![3i64, 5, 7, 11]), m in (-10i64..10, -10i64..10)) {
            let d = dim(d);
            let m = LatticeVector::from(m);
            prop_assume!(!m.is_zero_mod(d));
            let e = eigensystem_by_recursion(d, m).unwrap();
            prop_assert!(e.residual() < 1e-11);
            for (r, l) in e.eigenvalues.iter().enumerate() {
                prop_assert_eq!(eigenvalue_index(d, m, *l), r as i64);
            }
        }
    }
}
