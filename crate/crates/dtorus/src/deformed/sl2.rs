//! `u_{p^{1/2}}(sl(2))` realised by `A = d S_m + d′ S_{m′}` and `J3` read off
//! from `S_{m−m′} = p^{J3 + D/2}`.

use num_complex::Complex64;

use super::{require_non_collinear, Spectral};
use crate::error::{Result, TorusError};
use crate::lattice::{Dimension, LatticeVector};
use crate::linalg::{cis, ComplexMatrix};
use crate::schwinger::{eigensystem_by_recursion, schwinger_matrix};

#[derive(Clone, Debug)]
pub struct UqSl2Realisation {
    pub dim: Dimension,
    pub m: LatticeVector,
    pub mp: LatticeVector,
    /// Exact `m × m′`.
    pub cross: i64,
    /// Integer `c* ≡ m × m′ (mod D)` defining every power `p^y = e^{−iγ0 c* y}`.
    pub root: i64,
    pub d: f64,
    pub dprime: Complex64,
    pub p: Complex64,
    /// `p^{D/2}`.
    pub s_p: Complex64,
    /// `p^{(D−1)/2}`.
    pub s_tilde: Complex64,
    /// Sign `σ` in `[A, A†] = σ [J3 + D/2]`.
    pub bracket_sign: f64,
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub j3: ComplexMatrix,
    pub j3_spectrum: Spectral,
    /// Fractional part shared by all `J3` eigenvalues.
    pub j3_offset: f64,
    /// Lowest `J3` eigenvalue.
    pub j3_window_start: f64,
    /// `‖S_{m−m′} − p^{J3 + D/2}‖_max`.
    pub j3_residual: f64,
    pub warning: Option<String>,
}

impl UqSl2Realisation {
    pub fn build(dim: Dimension, m: LatticeVector, mp: LatticeVector) -> Result<Self> {
        let c = require_non_collinear(dim, m, mp)?;
        Self::build_with_root(dim, m, mp, c)
    }

    /// Uses `root ≡ m × m′ (mod D)` for the fractional powers of `p`.
    pub fn build_with_root(dim: Dimension, m: LatticeVector, mp: LatticeVector, root: i64) -> Result<Self> {
        let c = require_non_collinear(dim, m, mp)?;
        let di = dim.di();
        if (root - c).rem_euclid(di) != 0 {
            return Err(TorusError::OutOfRange(format!("root {root} is not congruent to {c} mod {di}")));
        }
        let g = dim.gamma0();
        let pw = |y: f64| cis(-g * root as f64 * y);
        let dd = -(pw(0.5) - pw(-0.5)).powi(-2);
        let d = dd.norm().sqrt();
        let dprime = dd.conj() / d;
        let a = &schwinger_matrix(dim, m).scale(Complex64::new(d, 0.0)) + &schwinger_matrix(dim, mp).scale(dprime);
        let a_dag = a.adjoint();

        let diff = m - mp;
        let eig = eigensystem_by_recursion(dim, diff)
            .map_err(|e| TorusError::BranchAmbiguity(format!("eigensystem of S_{diff}: {e}")))?;
        let mu0 = eig.eigenvalues[0];
        let y0 = (-mu0.arg() / g) / root as f64;
        let mut ks = Vec::with_capacity(dim.d());
        for lambda in &eig.eigenvalues {
            let (k, dist) = (0..di)
                .map(|k| (k, (lambda - mu0 * pw(k as f64)).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("D ≥ 2");
            if dist > 1e-8 || ks.contains(&k) {
                return Err(TorusError::BranchAmbiguity(format!("eigenvalue {lambda} of S_{diff} has no unique power of p")));
            }
            ks.push(k);
        }
        let j0 = y0 - dim.d() as f64 / 2.0;
        let offset = j0 - j0.floor();
        let lo = offset - (di / 2) as f64;
        let values: Vec<f64> = ks
            .iter()
            .map(|&k| {
                let steps = (j0 + k as f64 - lo).round() as i64;
                lo + steps.rem_euclid(di) as f64
            })
            .collect();
        let spectrum = Spectral { vectors: eig.vectors(), values };
        let j3 = spectrum.real(|j| j);
        let half_d = dim.d() as f64 / 2.0;
        let j3_residual = schwinger_matrix(dim, diff).max_abs_diff(&spectrum.map(|j| pw(j + half_d)));
        let bracket_sign = -(if ((root - c) / di).rem_euclid(2) == 0 { 1.0 } else { -1.0 });
        Ok(Self {
            dim,
            m,
            mp,
            cross: c,
            root,
            d,
            dprime,
            p: pw(1.0),
            s_p: pw(half_d),
            s_tilde: pw((dim.d() as f64 - 1.0) / 2.0),
            bracket_sign,
            a,
            a_dag,
            j3,
            j3_spectrum: spectrum,
            j3_offset: offset,
            j3_window_start: lo,
            j3_residual,
            warning: dim.prime_warning(),
        })
    }

    /// `p^y`.
    pub fn p_pow(&self, y: f64) -> Complex64 {
        cis(-self.dim.gamma0() * self.root as f64 * y)
    }

    /// `[x] = (p^x − p^{−x}) / (p^{1/2} − p^{−1/2})`.
    pub fn bracket(&self, x: f64) -> Complex64 {
        (self.p_pow(x) - self.p_pow(-x)) / (self.p_pow(0.5) - self.p_pow(-0.5))
    }

    /// `|d·conj(d′) + (p^{1/2} − p^{−1/2})^{−2}|`.
    pub fn coefficient_residual(&self) -> f64 {
        (self.dprime.conj() * self.d + (self.p_pow(0.5) - self.p_pow(-0.5)).powi(-2)).norm()
    }

    /// `max(‖A S − p S A‖, ‖A† S − p^{−1} S A†‖)` with `S = S_{m−m′}`.
    pub fn intertwining_residual(&self) -> f64 {
        let s = schwinger_matrix(self.dim, self.m - self.mp);
        let r1 = (&self.a * &s).max_abs_diff(&(&s * &self.a).scale(self.p));
        let r2 = (&self.a_dag * &s).max_abs_diff(&(&s * &self.a_dag).scale(self.p.inv()));
        r1.max(r2)
    }

    /// `‖[A, A†] − σ [J3 + D/2]‖_max`.
    pub fn commutator_residual(&self) -> f64 {
        let half_d = self.dim.d() as f64 / 2.0;
        let rhs = self.j3_spectrum.map(|j| self.bracket(j + half_d) * self.bracket_sign);
        self.a.commutator(&self.a_dag).max_abs_diff(&rhs)
    }

    /// `‖A J3 − (J3 + 1) A‖_max` over all matrix elements.
    pub fn ladder_residual(&self) -> f64 {
        let id = ComplexMatrix::identity(self.dim.d());
        (&self.a * &self.j3).max_abs_diff(&(&(&self.j3 + &id) * &self.a))
    }

    /// The same ladder relation with the cyclic wrap element (`A` taking the
    /// lowest `J3` eigenvalue to the highest) excluded.
    pub fn ladder_residual_restricted(&self) -> f64 {
        let dd = self.dim.d() as f64;
        self.j3_spectrum
            .weighted_elements(&self.a, |ja, jb| jb - ja - 1.0, |ja, jb| (ja - (jb - 1.0 + dd)).abs() < 1e-9)
    }

    /// Smallest `‖A e_j‖` over `J3` eigenvectors; zero would mark a
    /// lowest-weight vector.
    pub fn lowest_weight_margin(&self) -> f64 {
        self.j3_spectrum
            .vectors
            .iter()
            .map(|v| crate::linalg::norm(&self.a.apply(v)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Both displayed forms of the Casimir and their centrality residuals.
#[derive(Clone, Debug)]
pub struct CasimirReport {
    pub casimir: ComplexMatrix,
    pub forms_residual: f64,
    pub commutes_a: f64,
    pub commutes_a_dag: f64,
    pub commutes_j3: f64,
    /// `‖C_p‖_max`; not asserted to vanish.
    pub norm: f64,
}

impl CasimirReport {
    pub fn max_residual(&self) -> f64 {
        self.forms_residual.max(self.commutes_a).max(self.commutes_a_dag).max(self.commutes_j3)
    }
}

/// `C_p = A†A + [½(J3 + D/2 − ½)]²`, checked against
/// `A A† + [½(J3 + D/2 + ½)]²`.
pub fn casimir_uq_sl2(r: &UqSl2Realisation) -> CasimirReport {
    let half_d = r.dim.d() as f64 / 2.0;
    let sq = |shift: f64| r.j3_spectrum.map(|j| r.bracket(0.5 * (j + half_d + shift)).powi(2) * -r.bracket_sign);
    let c1 = &(&r.a_dag * &r.a) + &sq(-0.5);
    let c2 = &(&r.a * &r.a_dag) + &sq(0.5);
    CasimirReport {
        forms_residual: c1.max_abs_diff(&c2),
        commutes_a: c1.commutator(&r.a).max_abs(),
        commutes_a_dag: c1.commutator(&r.a_dag).max_abs(),
        commutes_j3: c1.commutator(&r.j3).max_abs(),
        norm: c1.max_abs(),
        casimir: c1,
    }
}

/// Deformation parameter of the algebra over the translated pair
/// `(m + r, m′ + r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranslatedDeformation {
    pub p_prime: Complex64,
    /// `r × (m − m′)`.
    pub delta_alpha: i64,
    /// `‖A′ S_{m−m′} − p′ S_{m−m′} A′‖_max`.
    pub residual: f64,
}

pub fn translated_lattice_deformation(dim: Dimension, m: LatticeVector, mp: LatticeVector, r: LatticeVector) -> Result<TranslatedDeformation> {
    let base = UqSl2Realisation::build(dim, m, mp)?;
    let a = &schwinger_matrix(dim, m + r).scale(Complex64::new(base.d, 0.0)) + &schwinger_matrix(dim, mp + r).scale(base.dprime);
    let delta_alpha = r.cross(m - mp);
    let g = dim.gamma0();
    let p_prime = cis(-g * base.cross as f64) * cis(g * delta_alpha as f64);
    let s = schwinger_matrix(dim, m - mp);
    let residual = (&a * &s).max_abs_diff(&(&s * &a).scale(p_prime));
    Ok(TranslatedDeformation { p_prime, delta_alpha, residual })
}
