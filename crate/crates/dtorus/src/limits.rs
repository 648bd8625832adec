//! Finite-`D` diagnostics for the large-`D` limit: weak convergence of the
//! number-phase pair, the phase-number commutator, index sums of limiting
//! spectra, continuously shifted Fock bases and the even/odd Wigner split.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::deformed::{spectrum_value, QBranch, QOscillator};
use crate::error::{Result, TorusError};
use crate::lattice::{Dimension, LatticeVector};
use crate::linalg::{self, cis, root_of_unity, ComplexMatrix};
use crate::number_phase::{action_angle_values, phase_state_amplitudes, wigner_number_phase, PhasePair};
use crate::operators::{BasisTag, StateVector};

/// Midpoint nodes per phase cell in the `E_φ` residual quadrature.
const CELL_NODES: usize = 32;
/// Nodes for normalising continuum phase densities.
const NORM_NODES: usize = 4096;

/// Number-basis test states for the `E_N` sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NumberProfile {
    /// `ψ_n ∝ exp(−(n − center)² / (4 width²))`, the same for every `D`.
    Gaussian { center: f64, width: f64 },
    /// `|n = ⌊D/2⌋⟩`, a family with no smooth limit.
    MidpointDelta,
}

impl NumberProfile {
    pub fn amplitudes(&self, dim: Dimension) -> Vec<Complex64> {
        let n = dim.d();
        let raw: Vec<f64> = match *self {
            Self::Gaussian { center, width } => {
                (0..n).map(|k| (-(k as f64 - center).powi(2) / (4.0 * width * width)).exp()).collect()
            }
            Self::MidpointDelta => (0..n).map(|k| if k == n / 2 { 1.0 } else { 0.0 }).collect(),
        };
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        raw.into_iter().map(|x| Complex64::new(x / norm, 0.0)).collect()
    }
}

/// Continuum phase-representation wavefunctions `ψ(φ)`, normalised on `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseProfile {
    /// Real wrapped Gaussian with `|ψ|²` of the given angular width.
    Gaussian { center: f64, width: f64 },
    /// `ψ(φ) = e^{−iφ n0}/√(2π)`, the number state `|n0⟩`.
    NumberState(i64),
}

impl PhaseProfile {
    fn unnormalised(&self, phi: f64) -> Complex64 {
        match *self {
            Self::Gaussian { center, width } => {
                let s: f64 = (-4..=4)
                    .map(|k| {
                        let x = phi - center + TAU * k as f64;
                        (-x * x / (2.0 * width * width)).exp()
                    })
                    .sum();
                Complex64::new(s.sqrt(), 0.0)
            }
            Self::NumberState(n0) => cis(-phi * n0 as f64),
        }
    }

    fn norm(&self) -> f64 {
        let h = TAU / NORM_NODES as f64;
        let z: f64 = (0..NORM_NODES).map(|k| self.unnormalised((k as f64 + 0.5) * h).norm_sqr()).sum::<f64>() * h;
        z.sqrt()
    }

    /// A closure evaluating the normalised `ψ(φ)`.
    pub fn wavefunction(&self) -> impl Fn(f64) -> Complex64 + '_ {
        let norm = self.norm();
        move |phi| self.unnormalised(phi) / norm
    }

    /// Finite-`D` state with `⟨φ_ℓ|ψ⟩ ∝ √γ0 ψ(γ0 ℓ)`, in number-basis amplitudes.
    pub fn sampled_state(&self, dim: Dimension) -> Result<StateVector> {
        let psi = self.wavefunction();
        let g = dim.gamma0();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim.d()];
        for l in 0..dim.di() {
            let c = psi(g * l as f64) * g.sqrt();
            for (a, p) in amps.iter_mut().zip(phase_state_amplitudes(dim, l)) {
                *a += p * c;
            }
        }
        StateVector::new(dim, amps, BasisTag::Number)?.normalized()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvergenceTarget {
    /// `‖(E_N^{m1} − e^{−iγ N̂})ψ‖²` with `m1 = round(γD/2π)`.
    NumberExponential { gamma: f64, profile: NumberProfile },
    /// `∫ |ψ(φ)|² |e^{iγ0 ℓ(φ)} − e^{iφ}|² dφ` with `ℓ(φ)` the phase cell of `φ`.
    PhaseOperator(PhaseProfile),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub primes: Vec<i64>,
    pub observable: String,
    pub gamma: Option<f64>,
    pub residuals: Vec<f64>,
    /// Strictly decreasing along `primes`.
    pub monotone_decreasing: bool,
}

impl ConvergenceReport {
    fn new(primes: &[i64], observable: String, gamma: Option<f64>, residuals: Vec<f64>) -> Self {
        let monotone_decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
        Self { primes: primes.to_vec(), observable, gamma, residuals, monotone_decreasing }
    }
}

fn prime_dimensions(primes: &[i64]) -> Result<Vec<Dimension>> {
    if primes.is_empty() {
        return Err(TorusError::EmptyPrimeList);
    }
    primes
        .iter()
        .map(|&p| {
            let d = Dimension::new(p)?;
            if d.is_prime() {
                Ok(d)
            } else {
                Err(TorusError::OutOfRange(format!("sweep dimension {p} is not prime")))
            }
        })
        .collect()
}

fn number_exponential_residual(dim: Dimension, gamma: f64, profile: NumberProfile) -> f64 {
    let m1 = (gamma * dim.d() as f64 / TAU).round() as i64;
    let psi = profile.amplitudes(dim);
    let terms = psi.iter().enumerate().map(|(n, a)| {
        let n = n as i64;
        a.norm_sqr() * (root_of_unity(-m1 * n, dim.di()) - cis(-gamma * n as f64)).norm_sqr()
    });
    linalg::compensated_sum(terms)
}

fn phase_operator_residual(dim: Dimension, profile: PhaseProfile) -> f64 {
    let psi = profile.wavefunction();
    let g = dim.gamma0();
    let h = g / CELL_NODES as f64;
    let terms = (0..dim.di()).flat_map(|l| {
        let centre = g * l as f64;
        let psi = &psi;
        (0..CELL_NODES).map(move |k| {
            let x = -g / 2.0 + (k as f64 + 0.5) * h;
            psi(centre + x).norm_sqr() * 4.0 * (x / 2.0).sin().powi(2) * h
        })
    });
    linalg::compensated_sum(terms)
}

pub fn weak_convergence_sweep(primes: &[i64], target: ConvergenceTarget) -> Result<ConvergenceReport> {
    let dims = prime_dimensions(primes)?;
    let (observable, gamma) = match target {
        ConvergenceTarget::NumberExponential { gamma, .. } => ("E_N".to_string(), Some(gamma)),
        ConvergenceTarget::PhaseOperator(_) => ("E_phi".to_string(), None),
    };
    let residuals = dims
        .iter()
        .map(|&d| match target {
            ConvergenceTarget::NumberExponential { gamma, profile } => number_exponential_residual(d, gamma, profile),
            ConvergenceTarget::PhaseOperator(profile) => phase_operator_residual(d, profile),
        })
        .collect();
    Ok(ConvergenceReport::new(primes, observable, gamma, residuals))
}

/// `max |W_D(J, θ) − W_cont(J, θ)|` over the `D × D` action-angle grid,
/// with `W_cont = (γ0/2π) Σ_{m1} e^{iγ0 m1 J} ψ*(θ − γ0 m1/2) ψ(θ + γ0 m1/2)`.
pub fn phase_basis_wigner_limit(primes: &[i64], profile: PhaseProfile) -> Result<ConvergenceReport> {
    let dims = prime_dimensions(primes)?;
    let psi = profile.wavefunction();
    let mut residuals = Vec::with_capacity(dims.len());
    for dim in dims {
        let g = dim.gamma0();
        let finite = wigner_number_phase(&profile.sampled_state(dim)?);
        let window = dim.window();
        let mut worst: f64 = 0.0;
        for j in 0..dim.di() {
            for t in 0..dim.di() {
                let theta = g * t as f64;
                let cont: Complex64 = window
                    .iter()
                    .map(|&m1| {
                        let half = g * m1 as f64 / 2.0;
                        root_of_unity(m1 * j, dim.di()) * psi(theta - half).conj() * psi(theta + half)
                    })
                    .sum::<Complex64>()
                    * (g / TAU);
                worst = worst.max((finite.at(j, t) - cont.re).abs()).max(cont.im.abs());
            }
        }
        residuals.push(worst);
    }
    Ok(ConvergenceReport::new(primes, "W_phase_limit".into(), None, residuals))
}

/// Residuals of `[N̂, E_φ^ℓ] = −ℓ E_φ^ℓ` and its nested forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorLimitReport {
    pub ell: i64,
    /// Over columns `n ≥ ℓ`, where `E_φ^ℓ` does not wrap.
    pub restricted: f64,
    /// Over the full matrix, dominated by the wrap elements.
    pub full: f64,
    /// Restricted residuals of the `r`-fold nested commutator against `(−ℓ)^r E_φ^ℓ`, `r = 1, 2, 3`.
    pub nested: [f64; 3],
}

pub fn commutator_limit_check(dim: Dimension, ell: i64) -> Result<CommutatorLimitReport> {
    if !(0..dim.di()).contains(&ell) {
        return Err(TorusError::OutOfRange(format!("ℓ = {ell} must lie in [0, {dim})")));
    }
    let n_op = ComplexMatrix::from_diag(&(0..dim.d()).map(|n| Complex64::new(n as f64, 0.0)).collect::<Vec<_>>());
    let e = PhasePair::build(dim).e_phi.into_matrix().pow(ell as u64);
    let restricted_diff = |a: &ComplexMatrix, b: &ComplexMatrix| {
        let mut worst: f64 = 0.0;
        for i in 0..dim.d() {
            for j in ell as usize..dim.d() {
                worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
            }
        }
        worst
    };
    let mut nested = [0.0; 3];
    let mut acc = e.clone();
    for (r, slot) in nested.iter_mut().enumerate() {
        acc = n_op.commutator(&acc);
        let target = e.scale(Complex64::new((-ell as f64).powi(r as i32 + 1), 0.0));
        *slot = restricted_diff(&acc, &target);
    }
    let first = n_op.commutator(&e);
    let target = e.scale(Complex64::new(-ell as f64, 0.0));
    Ok(CommutatorLimitReport { ell, restricted: restricted_diff(&first, &target), full: first.max_abs_diff(&target), nested })
}

/// Which limiting spectrum a profile evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileCase {
    /// `(1 ± sin(γ0 n′))/|sin γ0|` with `m × m′ = 1`.
    UnitCross,
    /// `m × m′ = (D − 1)/4`.
    QuarterCross,
    /// Any other non-zero `m × m′`.
    Custom(i64),
    /// `1/γ0 ± n`, the linear unit-cross form.
    Linear,
    /// `C + [n]` of the q-oscillator.
    QOscillator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileSign {
    Plus,
    Minus,
}

impl ProfileSign {
    pub fn value(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }
}

/// `f(n)` for `n = 0…D`, the last entry evaluated from the defining formula.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumProfile {
    pub dim: Dimension,
    pub cross: i64,
    pub values: Vec<f64>,
    pub case: ProfileCase,
    pub sign: ProfileSign,
}

impl SpectrumProfile {
    pub fn f0(&self) -> f64 {
        self.values[0]
    }

    pub fn f_dim(&self) -> f64 {
        self.values[self.dim.d()]
    }

    /// `min_{0≤n<D} f(n)`.
    pub fn min_value(&self) -> f64 {
        self.values[..self.dim.d()].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values[..self.dim.d()].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn limiting_spectrum(dim: Dimension, case: ProfileCase, sign: ProfileSign) -> Result<SpectrumProfile> {
    let d = dim.di();
    let g = dim.gamma0();
    let s = sign.value();
    let cross = match case {
        ProfileCase::UnitCross | ProfileCase::Linear => 1,
        ProfileCase::QuarterCross => {
            if (d - 1) % 4 != 0 {
                return Err(TorusError::CaseConditionUnmet(format!("(D − 1)/4 is not an integer for D = {d}")));
            }
            (d - 1) / 4
        }
        ProfileCase::Custom(c) => c,
        ProfileCase::QOscillator => {
            return Err(TorusError::CaseConditionUnmet("use q_oscillator_profile for the q-oscillator spectrum".into()))
        }
    };
    let denom = (g * cross as f64).sin().abs();
    if denom < 1e-12 {
        return Err(TorusError::DegenerateDeformation { cross, dim: dim.d() });
    }
    let values = (0..=d)
        .map(|n| match case {
            ProfileCase::Linear => 1.0 / g + s * n as f64,
            _ => (1.0 + s * (g * (n * cross).rem_euclid(d) as f64).sin()) / denom,
        })
        .collect();
    Ok(SpectrumProfile { dim, cross, values, case, sign })
}

/// `C + [n]` for `n = 0…D` on one q-branch.
pub fn q_oscillator_profile(dim: Dimension, cross: i64, branch: QBranch) -> SpectrumProfile {
    let values = (0..=dim.di()).map(|n| spectrum_value(dim, cross, branch, n)).collect();
    let sign = if branch == QBranch::Plus { ProfileSign::Plus } else { ProfileSign::Minus };
    SpectrumProfile { dim, cross, values, case: ProfileCase::QOscillator, sign }
}

/// `I = Σ_{n=0}^{D−1} (e^{−f(n)} − e^{−f(n+1)})`, compensated.
pub fn fujikawa_index(profile: &SpectrumProfile) -> f64 {
    linalg::compensated_sum(profile.values.windows(2).map(|w| (-w[0]).exp() - (-w[1]).exp()))
}

/// `|I − (e^{−f(0)} − e^{−f(D)})|`.
pub fn telescoping_residual(profile: &SpectrumProfile) -> f64 {
    (fujikawa_index(profile) - ((-profile.f0()).exp() - (-profile.f_dim()).exp())).abs()
}

/// `|x⟩ = D^{−1/2} Σ_ℓ e^{−iγ0 x ℓ}|φ⟩_ℓ` for any real label `x`, in number-basis amplitudes.
pub fn shifted_vector(dim: Dimension, x: f64) -> Vec<Complex64> {
    let g = dim.gamma0();
    let n = dim.d() as f64;
    (0..dim.di())
        .map(|m| (0..dim.di()).map(|l| cis(g * (m as f64 - x) * l as f64)).sum::<Complex64>() / n)
        .collect()
}

/// `E_φ^β = Σ_ℓ e^{iγ0 ℓ β}|φ⟩_ℓ⟨φ|`.
pub fn phase_power(dim: Dimension, beta: f64) -> ComplexMatrix {
    let g = dim.gamma0();
    let vectors: Vec<_> = (0..dim.di()).map(|l| phase_state_amplitudes(dim, l)).collect();
    let weights: Vec<_> = (0..dim.di()).map(|l| cis(g * l as f64 * beta)).collect();
    ComplexMatrix::spectral(&vectors, &weights)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(TorusError::OutOfRange(format!("shift α = {alpha} must lie in [0, 1)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedFockBasis {
    pub dim: Dimension,
    pub alpha: f64,
    pub vectors: Vec<StateVector>,
}

impl ShiftedFockBasis {
    fn matrix(&self) -> ComplexMatrix {
        let cols: Vec<_> = self.vectors.iter().map(|v| v.amplitudes().to_vec()).collect();
        ComplexMatrix::from_columns(&cols)
    }

    /// `max |⟨n+α|n′+α⟩ − δ|`.
    pub fn gram_residual(&self) -> f64 {
        self.matrix().unitarity_residual()
    }

    /// `‖Σ_n |n+α⟩⟨n+α| − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        let b = self.matrix();
        (&b * &b.adjoint()).max_abs_diff(&ComplexMatrix::identity(self.dim.d()))
    }

    /// `max_n ‖E_φ^{−α}|n⟩ − |n+α⟩‖`.
    pub fn generator_residual(&self) -> f64 {
        let p = phase_power(self.dim, -self.alpha);
        (0..self.dim.d()).map(|n| linalg::max_abs_diff_vec(&p.column(n), self.vectors[n].amplitudes())).fold(0.0, f64::max)
    }

    /// The projector-sum `Σ_n |n+α⟩⟨n+α| ψ`.
    pub fn resolve(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim.d()];
        for v in &self.vectors {
            let c = linalg::inner(v.amplitudes(), psi);
            for (o, a) in out.iter_mut().zip(v.amplitudes()) {
                *o += a * c;
            }
        }
        out
    }
}

pub fn build_shifted_fock(dim: Dimension, alpha: f64) -> Result<ShiftedFockBasis> {
    check_alpha(alpha)?;
    let vectors = (0..dim.di())
        .map(|n| StateVector::new(dim, shifted_vector(dim, n as f64 + alpha), BasisTag::Number))
        .collect::<Result<_>>()?;
    Ok(ShiftedFockBasis { dim, alpha, vectors })
}

/// `|⟨n|n+α⟩|` in closed form and by direct summation, with the two limits and
/// both small-`α` expansions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftedOverlap {
    pub exact: f64,
    pub direct: f64,
    /// `|sin πα|/(πα)`.
    pub large_dim_limit: f64,
    /// `1 − (πα)²(1 − 1/D²)/6`.
    pub small_alpha_expansion: f64,
    /// `1 − (πα)²(1 − 1/D)/6`.
    pub small_alpha_printed: f64,
}

pub fn shifted_overlap(dim: Dimension, alpha: f64) -> Result<ShiftedOverlap> {
    check_alpha(alpha)?;
    let d = dim.d() as f64;
    let pa = PI * alpha;
    let exact = if alpha == 0.0 { 1.0 } else { pa.sin().abs() / (d * (pa / d).sin().abs()) };
    let g = dim.gamma0();
    let direct = (0..dim.d()).map(|l| cis(-g * alpha * l as f64)).sum::<Complex64>().norm() / d;
    let large_dim_limit = if alpha == 0.0 { 1.0 } else { pa.sin().abs() / pa };
    Ok(ShiftedOverlap {
        exact,
        direct,
        large_dim_limit,
        small_alpha_expansion: 1.0 - pa * pa * (1.0 - 1.0 / (d * d)) / 6.0,
        small_alpha_printed: 1.0 - pa * pa * (1.0 - 1.0 / d) / 6.0,
    })
}

/// `max_n ‖E_φ^β |n+α⟩ − |n+α−β⟩‖`.
pub fn shift_isomorphism_check(dim: Dimension, alpha: f64, beta: f64) -> f64 {
    let p = phase_power(dim, beta);
    (0..dim.di())
        .map(|n| {
            let x = n as f64 + alpha;
            linalg::max_abs_diff_vec(&p.apply(&shifted_vector(dim, x)), &shifted_vector(dim, x - beta))
        })
        .fold(0.0, f64::max)
}

/// Action-angle Wigner function on the half-integer action grid, split by
/// the parity of `m2`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenOddDecomposition {
    pub dim: Dimension,
    /// `J = 0, 1/2, …, D − 1/2`.
    pub actions: Vec<f64>,
    pub angles: Vec<f64>,
    /// Row-major in `(J, θ)`.
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
    pub full: Vec<f64>,
    pub reconstruction_residual: f64,
    /// `(π/D) Σ` of each part over the grid.
    pub even_mass: f64,
    pub odd_mass: f64,
}

/// Even-`m2` terms are evaluated between `F^{(α)}` resolutions and odd-`m2`
/// terms between `F^{(α+1/2)}` resolutions, with `α = 0` since `2J ∈ Z` on
/// this grid.
pub fn wigner_even_odd_decomposition(state: &StateVector) -> Result<EvenOddDecomposition> {
    let dim = state.dim();
    let d = dim.di();
    let g = dim.gamma0();
    let psi = state.u_amplitudes();
    let pair = PhasePair::build(dim);
    let even_basis = build_shifted_fock(dim, 0.0)?;
    let odd_basis = build_shifted_fock(dim, 0.5)?;
    let psi_even = even_basis.resolve(&psi);
    let psi_odd = odd_basis.resolve(&psi);
    let chi: Vec<(LatticeVector, Complex64, bool)> = dim
        .window_vectors()
        .into_iter()
        .map(|m| {
            let is_even = m.m2.rem_euclid(2) == 0;
            let v = if is_even { &psi_even } else { &psi_odd };
            (m, linalg::inner(v, &pair.schwinger(m).apply(v)), is_even)
        })
        .collect();
    let actions: Vec<f64> = (0..2 * d).map(|k| k as f64 / 2.0).collect();
    let angles: Vec<f64> = (0..d).map(|t| g * t as f64).collect();
    let points: Vec<(f64, f64)> = actions.iter().flat_map(|&j| angles.iter().map(move |&t| (j, t))).collect();
    let norm = 1.0 / (TAU * dim.d() as f64);
    let mut even = Vec::with_capacity(points.len());
    let mut odd = Vec::with_capacity(points.len());
    for &(j, t) in &points {
        let (mut e, mut o) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &(m, c, is_even) in &chi {
            let w = c * cis(g * m.m1 as f64 * j - m.m2 as f64 * t) * norm;
            if is_even {
                e += w;
            } else {
                o += w;
            }
        }
        even.push(e.re);
        odd.push(o.re);
    }
    let (full, _) = action_angle_values(state, &points);
    let reconstruction_residual =
        even.iter().zip(&odd).zip(&full).map(|((e, o), f)| (e + o - f).abs()).fold(0.0, f64::max);
    let scale = PI / dim.d() as f64;
    let even_mass = linalg::compensated_sum(even.iter().copied()) * scale;
    let odd_mass = linalg::compensated_sum(odd.iter().copied()) * scale;
    Ok(EvenOddDecomposition { dim, actions, angles, even, odd, full, reconstruction_residual, even_mass, odd_mass })
}

/// Placement of the q-oscillator Fock space among the shifted Fock spaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockOffsetReport {
    /// `(D − 1)/2 mod 1`.
    pub alpha: f64,
    /// Distance mod 1 between the fractional part of the `Q̂ = q^{−Ñ}` exponents and `α`.
    pub exponent_residual: f64,
    /// For odd `D`: `max_v (1 − max_n |⟨n+α|v⟩|)` over `N̂` eigenvectors.
    pub vector_residual: Option<f64>,
}

/// Uses the pair `m = (1,1)`, `m′ = (1,0)`, whose `N̂` eigenbasis is the `u` basis.
pub fn q_oscillator_fock_offset(dim: Dimension) -> Result<FockOffsetReport> {
    let osc = QOscillator::build(dim, LatticeVector::new(1, 1), LatticeVector::new(1, 0))?;
    let alpha = ((dim.d() as f64 - 1.0) / 2.0).rem_euclid(1.0);
    let theta = osc.q.arg();
    let mut exponent_residual: f64 = 0.0;
    for v in &osc.n_spectrum.vectors {
        let lambda = linalg::inner(v, &osc.q_op.apply(v));
        let frac = (-lambda.arg() / theta - alpha).rem_euclid(1.0);
        exponent_residual = exponent_residual.max(frac.min(1.0 - frac));
    }
    let vector_residual = if dim.d() % 2 == 1 {
        let basis = build_shifted_fock(dim, alpha)?;
        let worst = osc
            .n_spectrum
            .vectors
            .iter()
            .map(|v| 1.0 - basis.vectors.iter().map(|b| linalg::inner(b.amplitudes(), v).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        Some(worst)
    } else {
        None
    };
    Ok(FockOffsetReport { alpha, exponent_residual, vector_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, rng};
    use proptest::prelude::*;
    use rand::Rng;

    fn dim(d: i64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    const SWEEP: [i64; 4] = [11, 23, 47, 101];

    #[test]
    fn gaussian_number_sweep_decreases() {
        let target = ConvergenceTarget::NumberExponential { gamma: 1.0, profile: NumberProfile::Gaussian { center: 4.0, width: 1.5 } };
        let r = weak_convergence_sweep(&SWEEP, target).unwrap();
        assert!(r.monotone_decreasing, "{:?}", r.residuals);
        assert!(r.residuals.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn representable_gamma_is_exact() {
        let gamma = TAU * 3.0 / 23.0;
        let target = ConvergenceTarget::NumberExponential { gamma, profile: NumberProfile::Gaussian { center: 4.0, width: 1.5 } };
        let r = weak_convergence_sweep(&[11, 23], target).unwrap();
        assert!(r.residuals[1] < 1e-28);
    }

    #[test]
    fn midpoint_delta_does_not_converge() {
        let target = ConvergenceTarget::NumberExponential { gamma: 1.0, profile: NumberProfile::MidpointDelta };
        let r = weak_convergence_sweep(&SWEEP, target).unwrap();
        assert!(!r.monotone_decreasing);
    }

    #[test]
    fn phase_sweep_decreases() {
        let target = ConvergenceTarget::PhaseOperator(PhaseProfile::Gaussian { center: PI, width: 0.5 });
        let r = weak_convergence_sweep(&SWEEP, target).unwrap();
        assert!(r.monotone_decreasing, "{:?}", r.residuals);
    }

    #[test]
    fn sweep_errors() {
        let target = ConvergenceTarget::PhaseOperator(PhaseProfile::NumberState(0));
        assert_eq!(weak_convergence_sweep(&[], target).unwrap_err(), TorusError::EmptyPrimeList);
        assert!(matches!(weak_convergence_sweep(&[9], target), Err(TorusError::OutOfRange(_))));
    }

    #[test]
    fn commutator_examples() {
        let r = commutator_limit_check(dim(7), 1).unwrap();
        assert!(r.restricted < 1e-12);
        assert!((r.full - 7.0).abs() < 1e-12);
        assert!(r.nested.iter().all(|&x| x < 1e-11));
        let r = commutator_limit_check(dim(7), 0).unwrap();
        assert_eq!(r.full, 0.0);
        for ell in 1..11 {
            let r = commutator_limit_check(dim(11), ell).unwrap();
            assert!(r.restricted < 1e-11 && r.nested.iter().all(|&x| x < 1e-9));
        }
        assert!(commutator_limit_check(dim(5), 5).is_err());
    }

    #[test]
    fn index_examples() {
        for d in [5, 13, 101] {
            for sign in [ProfileSign::Plus, ProfileSign::Minus] {
                let p = limiting_spectrum(dim(d), ProfileCase::UnitCross, sign).unwrap();
                assert!(fujikawa_index(&p).abs() < 1e-14);
                assert!(p.min_value() >= 0.0);
            }
        }
        let p = limiting_spectrum(dim(5), ProfileCase::Linear, ProfileSign::Plus).unwrap();
        let want = (-5.0 / TAU).exp() * (1.0 - (-5.0f64).exp());
        assert!((fujikawa_index(&p) - want).abs() < 1e-12);
        assert!((fujikawa_index(&p) - 0.448191).abs() < 1e-6);
    }

    #[test]
    fn q_oscillator_profile_has_zero_index() {
        for d in [3, 5, 7, 13] {
            let p = q_oscillator_profile(dim(d), 1, QBranch::Minus);
            assert!(fujikawa_index(&p).abs() < 1e-14);
        }
    }

    #[test]
    fn limiting_cases() {
        let p = limiting_spectrum(dim(101), ProfileCase::UnitCross, ProfileSign::Plus).unwrap();
        let g = dim(101).gamma0();
        assert!((p.max_value() - 2.0 / g).abs() < 0.01 * 2.0 / g);
        let q = limiting_spectrum(dim(13), ProfileCase::QuarterCross, ProfileSign::Plus).unwrap();
        assert_eq!(q.cross, 3);
        assert!(q.max_value() <= 2.0 / (6.0 * PI / 13.0).sin() + 1e-12);
        assert!(matches!(
            limiting_spectrum(dim(11), ProfileCase::QuarterCross, ProfileSign::Plus),
            Err(TorusError::CaseConditionUnmet(_))
        ));
    }

    #[test]
    fn shifted_basis_examples() {
        let b = build_shifted_fock(dim(5), 0.0).unwrap();
        for (n, v) in b.vectors.iter().enumerate() {
            assert!(linalg::max_abs_diff_vec(v.amplitudes(), StateVector::basis_state(dim(5), BasisTag::Number, n as i64).amplitudes()) < 1e-14);
        }
        let b = build_shifted_fock(dim(5), 0.37).unwrap();
        assert!(b.gram_residual() < 1e-12 && b.completeness_residual() < 1e-12 && b.generator_residual() < 1e-12);
        let near_one = build_shifted_fock(dim(5), 1.0 - 1e-9).unwrap();
        for n in 0..5_usize {
            let next = StateVector::basis_state(dim(5), BasisTag::Number, ((n + 1) % 5) as i64);
            assert!(linalg::max_abs_diff_vec(near_one.vectors[n].amplitudes(), next.amplitudes()) < 1e-8);
        }
        assert!(build_shifted_fock(dim(5), 1.0).is_err());
    }

    #[test]
    fn shifted_basis_random_alpha() {
        let mut r = rng(11);
        for d in [2, 3, 5, 7] {
            for _ in 0..20 {
                let b = build_shifted_fock(dim(d), r.random::<f64>()).unwrap();
                assert!(b.gram_residual() < 1e-12 && b.completeness_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn overlap_examples() {
        let o = shifted_overlap(dim(2), 0.5).unwrap();
        assert!((o.exact - 1.0 / (2.0 * (PI / 4.0).sin())).abs() < 1e-15);
        assert!((o.exact - o.direct).abs() < 1e-13);
        assert_eq!(shifted_overlap(dim(5), 0.0).unwrap().exact, 1.0);
        let big = shifted_overlap(dim(10_000), 0.5).unwrap();
        assert!((big.exact - 2.0 / PI).abs() < 1e-6);
        assert!((big.exact - big.direct).abs() < 1e-13);
        let small = shifted_overlap(dim(7), 1e-3).unwrap();
        assert!((small.exact - small.small_alpha_expansion).abs() < 1e-11);
    }

    #[test]
    fn shift_isomorphism_examples() {
        assert!(shift_isomorphism_check(dim(5), 0.3, 0.0) < 1e-12);
        assert!(shift_isomorphism_check(dim(3), 0.5, 0.5) < 1e-12);
        assert!(shift_isomorphism_check(dim(5), 0.25, 1.0) < 1e-12);
        let moved = phase_power(dim(3), 0.5).apply(&shifted_vector(dim(3), 0.5));
        assert!(linalg::max_abs_diff_vec(&moved, StateVector::basis_state(dim(3), BasisTag::Number, 0).amplitudes()) < 1e-12);
        let pair = PhasePair::build(dim(5));
        assert!(phase_power(dim(5), 1.0).max_abs_diff(pair.e_phi.matrix()) < 1e-12);
    }

    #[test]
    fn even_odd_examples() {
        let s = StateVector::basis_state(dim(5), BasisTag::Number, 2);
        let e = wigner_even_odd_decomposition(&s).unwrap();
        assert!(e.odd.iter().all(|x| x.abs() < 1e-12));
        assert!(e.reconstruction_residual < 1e-10);
        for d in [3, 5, 7] {
            for seed in 0..5 {
                let e = wigner_even_odd_decomposition(&random_state(dim(d), seed)).unwrap();
                assert!(e.reconstruction_residual < 1e-10);
                assert!((e.even_mass - 1.0).abs() < 1e-10 && e.odd_mass.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn phase_limit_number_state() {
        let r = phase_basis_wigner_limit(&[5, 11, 23], PhaseProfile::NumberState(2)).unwrap();
        assert!(r.residuals.iter().all(|&x| x < 1e-10), "{:?}", r.residuals);
    }

    #[test]
    fn phase_limit_gaussian_decreases() {
        let r = phase_basis_wigner_limit(&[11, 23, 47], PhaseProfile::Gaussian { center: PI, width: 0.5 }).unwrap();
        assert!(r.monotone_decreasing, "{:?}", r.residuals);
    }

    #[test]
    fn fock_offset() {
        for d in [3, 5, 7] {
            let r = q_oscillator_fock_offset(dim(d)).unwrap();
            assert_eq!(r.alpha, 0.0);
            assert!(r.exponent_residual < 1e-10);
            assert!(r.vector_residual.unwrap() < 1e-12);
        }
        let r = q_oscillator_fock_offset(dim(4)).unwrap();
        assert_eq!(r.alpha, 0.5);
        assert!(r.exponent_residual < 1e-10);
        assert!(matches!(q_oscillator_fock_offset(dim(2)), Err(TorusError::DegenerateDeformation { .. })));
    }

    proptest! {
        #[test]
        fn telescoping_holds(d in prop::sample::select(vec![5i64, 13, 101]), plus in any::<bool>(), c in 1i64..4) {
            let sign = if plus { ProfileSign::Plus } else { ProfileSign::Minus };
            for case in [ProfileCase::UnitCross, ProfileCase::Custom(c)] {
                let p = limiting_spectrum(dim(d), case, sign).unwrap();
                prop_assert!(telescoping_residual(&p) < 1e-14);
            }
        }

        #[test]
        fn overlap_matches_direct(alpha in 0.0f64..1.0, d in 2i64..40) {
            let o = shifted_overlap(dim(d), alpha).unwrap();
            prop_assert!((o.exact - o.direct).abs() < 1e-13);
            prop_assert!(o.exact <= 1.0 + 1e-15);
        }
    }
}
