//! The spectrum-shifted q-oscillator `A = d S_m + d′ S_{m′}` with
//! `A†A = C + [N̂]`, and its correspondence with the eigenbasis of `S_{m−m′}`.

use num_complex::Complex64;

use super::{require_non_collinear, Spectral};
use crate::error::{Result, TorusError};
use crate::lattice::{mod_inverse, Dimension, LatticeVector};
use crate::linalg::{cis, ComplexMatrix};
use crate::schwinger::{eigensystem_by_recursion, schwinger_matrix};

/// Which of `q = e^{∓iγ0 m×m′}` is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QBranch {
    /// `q = e^{−iγ0 m×m′}`.
    Minus,
    /// `q = e^{+iγ0 m×m′}`.
    Plus,
}

impl QBranch {
    pub fn sign(self) -> i64 {
        match self {
            Self::Minus => -1,
            Self::Plus => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::Minus => Self::Plus,
            Self::Plus => Self::Minus,
        }
    }
}

/// `θ` with `q = e^{iθ}`.
fn theta(dim: Dimension, cross: i64, branch: QBranch) -> f64 {
    branch.sign() as f64 * dim.gamma0() * cross as f64
}

/// `C + [n]` for `n = 0…D−1`, with `C = 1/|sin θ|` and
/// `[n] = sin(θ (n + (D−1)/2)) / sin θ`.
pub fn spectrum_formula(dim: Dimension, cross: i64, branch: QBranch) -> (f64, Vec<f64>) {
    let th = theta(dim, cross, branch);
    let f = (0..dim.di()).map(|n| spectrum_value(dim, cross, branch, n)).collect();
    (1.0 / th.sin().abs(), f)
}

/// `C + [n]` at any integer `n`, without reducing `n` mod `D`.
pub fn spectrum_value(dim: Dimension, cross: i64, branch: QBranch, n: i64) -> f64 {
    let th = theta(dim, cross, branch);
    let half = (dim.d() as f64 - 1.0) / 2.0;
    1.0 / th.sin().abs() + (th * (n as f64 + half)).sin() / th.sin()
}

fn coefficients(dim: Dimension, cross: i64, branch: QBranch) -> Result<(Complex64, f64, Complex64)> {
    let th = theta(dim, cross, branch);
    if th.sin().abs() < 1e-12 {
        return Err(TorusError::DegenerateDeformation { cross, dim: dim.d() });
    }
    let q = cis(th);
    let dd = (q.inv() - q).inv();
    let d = dd.norm().sqrt();
    Ok((q, d, dd.conj() / d))
}

fn ladder_operator(dim: Dimension, m: LatticeVector, mp: LatticeVector, d: f64, dprime: Complex64) -> ComplexMatrix {
    &schwinger_matrix(dim, m).scale(Complex64::new(d, 0.0)) + &schwinger_matrix(dim, mp).scale(dprime)
}

#[derive(Clone, Debug)]
pub struct QOscillator {
    pub dim: Dimension,
    pub m: LatticeVector,
    pub mp: LatticeVector,
    pub cross: i64,
    pub branch: QBranch,
    pub q: Complex64,
    pub d: f64,
    pub dprime: Complex64,
    /// `C = 1/|sin(γ0 m×m′)|`.
    pub shift: f64,
    /// `c_q = q^{−(D−1)/2}`.
    pub c_q: Complex64,
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub n_op: ComplexMatrix,
    pub q_op: ComplexMatrix,
    pub n_spectrum: Spectral,
    /// Number label of the `r`-th eigenvector of `S_{m−m′}`.
    pub n_of_r: Vec<usize>,
    /// `f(n) = C + [n]` for `n = 0…D−1`.
    pub spectrum: Vec<f64>,
    pub warning: Option<String>,
}

impl QOscillator {
    /// Builds on whichever branch gives `N̂` an integer spectrum.
    pub fn build(dim: Dimension, m: LatticeVector, mp: LatticeVector) -> Result<Self> {
        match Self::build_on_branch(dim, m, mp, QBranch::Minus) {
            Err(TorusError::BranchInconsistent) => Self::build_on_branch(dim, m, mp, QBranch::Plus),
            other => other,
        }
    }

    pub fn build_on_branch(dim: Dimension, m: LatticeVector, mp: LatticeVector, branch: QBranch) -> Result<Self> {
        let c = require_non_collinear(dim, m, mp)?;
        let (q, d, dprime) = coefficients(dim, c, branch)?;
        let di = dim.di();
        let n = dim.d();
        let th = theta(dim, c, branch);
        let qp = |y: f64| cis(th * y);
        let a = ladder_operator(dim, m, mp, d, dprime);
        let a_dag = a.adjoint();
        let q_op = match branch {
            QBranch::Minus => (&schwinger_matrix(dim, -m) * &schwinger_matrix(dim, mp)).scale(dprime * d * (q.inv() - q)),
            QBranch::Plus => (&schwinger_matrix(dim, -mp) * &schwinger_matrix(dim, m)).scale(dprime.conj() * d * (q.inv() - q)),
        };
        let c_q = qp(-(n as f64 - 1.0) / 2.0);
        let scalar = ComplexMatrix::identity(n).scale(c_q.powu(n as u32));
        if q_op.pow(n as u64).max_abs_diff(&scalar) > 1e-9 {
            return Err(TorusError::BranchInconsistent);
        }
        let eig = eigensystem_by_recursion(dim, m - mp)
            .map_err(|e| TorusError::BranchAmbiguity(format!("eigensystem of S_{}: {e}", m - mp)))?;
        let inv = mod_inverse(branch.sign() * c, di)
            .ok_or_else(|| TorusError::BranchAmbiguity(format!("m×m′ = {c} is not invertible mod {di}")))?;
        let mut n_of_r = Vec::with_capacity(n);
        for v in eig.vectors() {
            let mu = crate::linalg::inner(&v, &q_op.apply(&v)) / c_q;
            let k = ((-mu.arg() / dim.gamma0()).round() as i64).rem_euclid(di);
            let label = (k * inv).rem_euclid(di) as usize;
            if n_of_r.contains(&label) || (mu - qp(-(label as f64))).norm() > 1e-8 {
                return Err(TorusError::BranchAmbiguity(format!("eigenvalue {mu} of Q/c_q is not an integer power of q")));
            }
            n_of_r.push(label);
        }
        let n_spectrum = Spectral { vectors: eig.vectors(), values: n_of_r.iter().map(|&k| k as f64).collect() };
        let (shift, spectrum) = spectrum_formula(dim, c, branch);
        Ok(Self {
            dim,
            m,
            mp,
            cross: c,
            branch,
            q,
            d,
            dprime,
            shift,
            c_q,
            n_op: n_spectrum.real(|x| x),
            a,
            a_dag,
            q_op,
            n_spectrum,
            n_of_r,
            spectrum,
            warning: dim.prime_warning(),
        })
    }

    fn theta(&self) -> f64 {
        theta(self.dim, self.cross, self.branch)
    }

    /// `q^y`.
    pub fn q_pow(&self, y: f64) -> Complex64 {
        cis(self.theta() * y)
    }

    /// `[x] = (q^{x+(D−1)/2} − q^{−x−(D−1)/2}) / (q − q^{−1})`, real.
    pub fn bracket(&self, x: f64) -> f64 {
        let th = self.theta();
        (th * (x + (self.dim.d() as f64 - 1.0) / 2.0)).sin() / th.sin()
    }

    /// `|d conj(d′) − 1/(q^{−1} − q)|`.
    pub fn coefficient_residual(&self) -> f64 {
        (self.dprime.conj() * self.d - (self.q.inv() - self.q).inv()).norm()
    }

    /// `‖A†A − C − [N̂]‖_max`.
    pub fn a_dag_a_residual(&self) -> f64 {
        let rhs = self.n_spectrum.real(|n| self.shift + self.bracket(n));
        (&self.a_dag * &self.a).max_abs_diff(&rhs)
    }

    /// `‖A A† − q A†A − C(1 − q) − q^{−N̂−(D−1)/2}‖_max`.
    pub fn q_commutator_residual(&self) -> f64 {
        let half = (self.dim.d() as f64 - 1.0) / 2.0;
        let rhs = self.n_spectrum.map(|n| (1.0 - self.q) * self.shift + self.q_pow(-n - half));
        (&(&self.a * &self.a_dag) - &(&self.a_dag * &self.a).scale(self.q)).max_abs_diff(&rhs)
    }

    /// `‖Q̂ − c_q q^{−N̂}‖_max`.
    pub fn number_exponential_residual(&self) -> f64 {
        self.q_op.max_abs_diff(&self.n_spectrum.map(|n| self.c_q * self.q_pow(-n)))
    }

    /// `‖A N̂ − (N̂ + 1) A‖_max` over all matrix elements.
    pub fn ladder_residual(&self) -> f64 {
        let id = ComplexMatrix::identity(self.dim.d());
        (&self.a * &self.n_op).max_abs_diff(&(&(&self.n_op + &id) * &self.a))
    }

    /// `A N̂ = (N̂ + 1) A` and `A† N̂ = (N̂ − 1) A†` with the cyclic wrap
    /// elements (`n = 0 ↔ n = D−1`) excluded.
    pub fn ladder_residual_restricted(&self) -> f64 {
        let dd = self.dim.d() as f64;
        let lower = self.n_spectrum.weighted_elements(&self.a, |na, nb| nb - na - 1.0, |na, nb| (na - (nb - 1.0 + dd)).abs() < 1e-9);
        let raise = self.n_spectrum.weighted_elements(&self.a_dag, |na, nb| nb - na + 1.0, |na, nb| (na - (nb + 1.0 - dd)).abs() < 1e-9);
        lower.max(raise)
    }

    /// `‖A Q̂ − q^{−1} Q̂ A‖_max`, the ladder relation in exponentiated form.
    pub fn exponentiated_ladder_residual(&self) -> f64 {
        (&self.a * &self.q_op).max_abs_diff(&(&self.q_op * &self.a).scale(self.q.inv()))
    }

    /// `max(‖[A^D, A]‖, ‖[A^D, A†]‖)`.
    pub fn centrality_residual(&self) -> f64 {
        let ad = self.a.pow(self.dim.d() as u64);
        ad.commutator(&self.a).max_abs().max(ad.commutator(&self.a_dag).max_abs())
    }

    pub fn min_spectrum(&self) -> f64 {
        self.spectrum.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max_n |f(n + D) − f(n)|` from the defining formula.
    pub fn cyclicity_residual(&self) -> f64 {
        let dd = self.dim.d() as f64;
        (0..self.dim.d()).map(|n| (self.bracket(n as f64 + dd) - self.bracket(n as f64)).abs()).fold(0.0, f64::max)
    }

    pub fn lowest_weight(&self) -> LowestWeightReport {
        lowest_weight_scan(self.dim, self.cross, self.branch)
    }

    /// Largest difference between the two branches in `C`, in the sorted
    /// formula spectrum and in the sorted eigenvalues of `A†A`.
    pub fn branch_equivalence_residual(&self) -> Result<f64> {
        let other = self.branch.other();
        let (c2, mut f2) = spectrum_formula(self.dim, self.cross, other);
        let (_, d2, dp2) = coefficients(self.dim, self.cross, other)?;
        let a2 = ladder_operator(self.dim, self.m, self.mp, d2, dp2);
        let eig = |a: &ComplexMatrix| (&a.adjoint() * a).hermitian_eigen().into_iter().map(|p| p.0).collect::<Vec<f64>>();
        let mut f1 = self.spectrum.clone();
        f1.sort_by(f64::total_cmp);
        f2.sort_by(f64::total_cmp);
        let (e1, e2) = (eig(&self.a), eig(&a2));
        let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Ok((self.shift - c2).abs().max(diff(&f1, &f2)).max(diff(&e1, &e2)).max(diff(&e1, &f1)))
    }
}

/// Outcome of searching `n0` with `C + [n0] = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowestWeightReport {
    pub solution: Option<usize>,
    /// `min_n |C + [n]|`; absent when `q = ±1` makes `C` infinite.
    pub margin: Option<f64>,
    /// `min_n |1 + sgn(sin θ) sin(θ (n + (D−1)/2))|`, finite for every `q`.
    pub scaled_margin: f64,
    pub irreducible: bool,
}

/// Scans `n0 ∈ {0…D−1}` in the scaled form `|sin θ| (C + [n])`, which stays
/// finite at `q = −1`.
pub fn lowest_weight_scan(dim: Dimension, cross: i64, branch: QBranch) -> LowestWeightReport {
    let th = theta(dim, cross, branch);
    let degenerate = th.sin().abs() < 1e-12;
    let sgn = if degenerate || th.sin() > 0.0 { 1.0 } else { -1.0 };
    let half = (dim.d() as f64 - 1.0) / 2.0;
    let scaled: Vec<f64> = (0..dim.d()).map(|n| (1.0 + sgn * (th * (n as f64 + half)).sin()).abs()).collect();
    let solution = scaled.iter().position(|&s| s < 1e-9);
    let scaled_margin = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let margin = (!degenerate).then(|| scaled_margin / th.sin().abs());
    LowestWeightReport { solution, margin, scaled_margin, irreducible: solution.is_none() && !degenerate }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrespondenceEntry {
    pub r: usize,
    pub n: usize,
    /// Index with `S_m e_r ∝ e_t`.
    pub t: usize,
    pub g: Complex64,
    pub f: Complex64,
    pub lambda: Complex64,
    /// `| |d g + d′ f|² − f(n) |`.
    pub norm_residual: f64,
}

/// Phases of `S_m` and `S_{m′}` between eigenvectors of `S_{m−m′}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenCorrespondence {
    pub entries: Vec<CorrespondenceEntry>,
    /// `max ||g| − 1|, ||f| − 1|`.
    pub unit_modulus_residual: f64,
    pub norm_residual: f64,
    /// Whether `r = n·(m×m′) mod D` for every entry.
    pub index_map_holds: bool,
    /// `max |g − conj f|`.
    pub conjugate_residual: f64,
    /// `max |g − e^{iγ0 (n+(D−1)/2) m×m′/2}|`.
    pub half_phase_residual: f64,
    /// `max |λ_r − e^{iγ0 (n−D/2) m×m′}|`.
    pub lambda_literal_residual: f64,
    /// `max |g/f − σ e^{−iγ0 m×m′ (n+(D−1)/2)}|`, `σ = ±1` for `q = e^{±iγ0 m×m′}`.
    pub ratio_branch_residual: f64,
    /// `max |λ_r − σ e^{−iγ0 m×m′ (n−D/2)}|`.
    pub lambda_branch_residual: f64,
}

pub fn eigenbasis_correspondence(osc: &QOscillator) -> Result<EigenCorrespondence> {
    let dim = osc.dim;
    if !dim.is_prime() {
        return Err(TorusError::OutOfRange(format!("eigenbasis correspondence needs prime D, got {dim}")));
    }
    let eig = eigensystem_by_recursion(dim, osc.m - osc.mp)?;
    let vectors = eig.vectors();
    let (sm, smp) = (schwinger_matrix(dim, osc.m), schwinger_matrix(dim, osc.mp));
    let g0 = dim.gamma0();
    let c = osc.cross as f64;
    let sigma = osc.branch.sign() as f64;
    let half = (dim.d() as f64 - 1.0) / 2.0;
    let mut out = EigenCorrespondence {
        entries: Vec::with_capacity(dim.d()),
        unit_modulus_residual: 0.0,
        norm_residual: 0.0,
        index_map_holds: true,
        conjugate_residual: 0.0,
        half_phase_residual: 0.0,
        lambda_literal_residual: 0.0,
        ratio_branch_residual: 0.0,
        lambda_branch_residual: 0.0,
    };
    for (r, er) in vectors.iter().enumerate() {
        let y = sm.apply(er);
        let z = smp.apply(er);
        let overlaps: Vec<Complex64> = vectors.iter().map(|e| crate::linalg::inner(e, &y)).collect();
        let t = (0..dim.d()).max_by(|&a, &b| overlaps[a].norm().total_cmp(&overlaps[b].norm())).expect("D ≥ 2");
        let g = overlaps[t];
        let f = crate::linalg::inner(&vectors[t], &z);
        let n = osc.n_of_r[r];
        let x = n as f64 + half;
        let lambda = eig.eigenvalues[r];
        let norm_residual = ((osc.d * g + osc.dprime * f).norm_sqr() - osc.spectrum[n]).abs();
        out.unit_modulus_residual = out.unit_modulus_residual.max((g.norm() - 1.0).abs()).max((f.norm() - 1.0).abs());
        out.norm_residual = out.norm_residual.max(norm_residual);
        out.index_map_holds &= (n as i64 * osc.cross).rem_euclid(dim.di()) == r as i64;
        out.conjugate_residual = out.conjugate_residual.max((g - f.conj()).norm());
        out.half_phase_residual = out.half_phase_residual.max((g - cis(g0 * x * c / 2.0)).norm());
        out.lambda_literal_residual = out.lambda_literal_residual.max((lambda - cis(g0 * (n as f64 - dim.d() as f64 / 2.0) * c)).norm());
        out.ratio_branch_residual = out.ratio_branch_residual.max((g / f - cis(-g0 * c * x) * sigma).norm());
        out.lambda_branch_residual =
            out.lambda_branch_residual.max((lambda - cis(-g0 * c * (n as f64 - dim.d() as f64 / 2.0)) * sigma).norm());
        out.entries.push(CorrespondenceEntry { r, n, t, g, f, lambda, norm_residual });
    }
    if out.unit_modulus_residual > 1e-9 || out.norm_residual > 1e-9 || !out.index_map_holds {
        return Err(TorusError::PhaseMismatch(format!(
            "eigenbasis correspondence for {}, {}: |g|,|f| residual {:e}, norm residual {:e}, index map {}",
            osc.m, osc.mp, out.unit_modulus_residual, out.norm_residual, out.index_map_holds
        )));
    }
    Ok(out)
}
