//! Invariant suites over every module, reported as per-check residual tables.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::canonical::{
    build_metaplectic, closure_residual, fourier_wigner_rotation_check, quarter_turn_order_residual, random_symplectic, SymplecticMap,
};
use crate::deformed::{casimir_uq_sl2, coproduct_check, QOscillator, UqSl2Realisation};
use crate::error::{Result, TorusError};
use crate::io::{Cell, Table};
use crate::lattice::{Dimension, LatticeVector};
use crate::linalg::ComplexMatrix;
use crate::number_phase::{
    action_angle_marginal_residuals, action_angle_mass, expand_number_function, kernel_from_pair, kernel_from_phase_states,
    wigner_number_phase, PhasePair,
};
use crate::operators::{fourier_operator, BasisTag};
use crate::random::{random_hermitian, random_lattice_vector, random_state_with, rng};
use crate::schwinger::{
    algebra_suite, basis_rank, compare_with_dense, eigensystem_by_recursion, fourier_covariance_residual, schwinger_matrix,
    sine_commutator_residual, weyl_matrices,
};
use crate::wigner::{dual_residual, property_suite, symbol_round_trip_residual, PropertyReport};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_SAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Schwinger,
    QOscillator,
    Sl2,
    Wigner,
    NumberPhase,
    Transforms,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Self::Schwinger, Self::QOscillator, Self::Sl2, Self::Wigner, Self::NumberPhase, Self::Transforms];

    pub fn name(self) -> &'static str {
        match self {
            Self::Schwinger => "schwinger",
            Self::QOscillator => "qosc",
            Self::Sl2 => "sl2",
            Self::Wigner => "wigner",
            Self::NumberPhase => "numberphase",
            Self::Transforms => "transforms",
            Self::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = TorusError;
    fn from_str(s: &str) -> Result<Self> {
        Self::EACH
            .into_iter()
            .chain([Self::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| TorusError::Parse(format!("unknown suite \"{s}\"")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub dim: Dimension,
    pub tolerance: f64,
    pub seed: u64,
    pub samples: usize,
}

impl VerifyConfig {
    pub fn new(dim: Dimension) -> Self {
        Self { dim, tolerance: DEFAULT_TOLERANCE, seed: 0, samples: DEFAULT_SAMPLES }
    }
}

/// One named residual compared against the tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    /// `NaN` residuals fail.
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub dim: Dimension,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Columns `suite,check,residual,tolerance,status`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["suite", "check", "residual", "tolerance", "status"]);
        t.comment(format!("D={}", self.dim));
        t.comment(format!("seed={}", self.seed));
        for c in &self.checks {
            let status = if c.passed() { "pass" } else { "FAIL" };
            t.push(vec![
                Cell::Text(c.suite.name().into()),
                Cell::Text(c.name.clone()),
                Cell::Float(c.residual),
                Cell::Float(c.tolerance),
                Cell::Text(status.into()),
            ]);
        }
        t
    }
}

struct Recorder {
    suite: Suite,
    tolerance: f64,
    checks: Vec<Check>,
    warnings: Vec<String>,
}

impl Recorder {
    fn check(&mut self, name: impl Into<String>, residual: f64) {
        self.checks.push(Check { suite: self.suite, name: name.into(), residual, tolerance: self.tolerance });
    }

    /// Tolerance scaled for quantities that accumulate over `D²` terms.
    fn check_scaled(&mut self, name: impl Into<String>, residual: f64, factor: f64) {
        self.checks.push(Check { suite: self.suite, name: name.into(), residual, tolerance: self.tolerance * factor });
    }

    fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }
}

/// Running maximum of several named residuals.
#[derive(Default)]
struct Worst(Vec<(&'static str, f64)>);

impl Worst {
    fn update(&mut self, name: &'static str, r: f64) {
        match self.0.iter_mut().find(|e| e.0 == name) {
            Some(e) => e.1 = e.1.max(r),
            None => self.0.push((name, r)),
        }
    }

    fn flush(self, rec: &mut Recorder) {
        for (name, r) in self.0 {
            rec.check(name, r);
        }
    }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> VerifyReport {
    let mut report = VerifyReport { dim: config.dim, seed: config.seed, checks: Vec::new(), warnings: Vec::new() };
    if let Some(w) = config.dim.prime_warning() {
        report.warnings.push(w);
    }
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in suites {
        let mut rec = Recorder { suite: s, tolerance: config.tolerance, checks: Vec::new(), warnings: Vec::new() };
        let mut r = rng(config.seed);
        match s {
            Suite::Schwinger => schwinger_suite(config, &mut rec, &mut r),
            Suite::QOscillator => qosc_suite(config, &mut rec, &mut r),
            Suite::Sl2 => sl2_suite(config, &mut rec, &mut r),
            Suite::Wigner => wigner_suite(config, &mut rec, &mut r),
            Suite::NumberPhase => number_phase_suite(config, &mut rec, &mut r),
            Suite::Transforms => transforms_suite(config, &mut rec, &mut r),
            Suite::All => unreachable!("expanded above"),
        }
        report.checks.extend(rec.checks);
        for w in rec.warnings {
            if !report.warnings.contains(&w) {
                report.warnings.push(w);
            }
        }
    }
    report
}

fn schwinger_suite(config: &VerifyConfig, rec: &mut Recorder, rng: &mut impl Rng) {
    let dim = config.dim;
    let alg = algebra_suite(dim, |m| schwinger_matrix(dim, m), config.samples, rng);
    for (name, r) in alg.named() {
        rec.check(name, r);
    }
    let mut worst = Worst::default();
    for _ in 0..config.samples {
        let (m, n) = (random_lattice_vector(dim, rng), random_lattice_vector(dim, rng));
        worst.update("sine_commutator", sine_commutator_residual(dim, m, n));
    }
    for m in dim.window_vectors() {
        worst.update("fourier_covariance", fourier_covariance_residual(dim, m));
    }
    worst.flush(rec);
    let weyl = weyl_matrices(dim);
    rec.check("weyl_commutation", weyl.commutation_residual());
    rec.check("basis_rank", (basis_rank(dim) as f64 - (dim.d() * dim.d()) as f64).abs());

    let mut worst = Worst::default();
    let mut skipped = 0;
    for m in dim.window_vectors().into_iter().filter(|m| !m.is_zero_mod(dim)) {
        match eigensystem_by_recursion(dim, m) {
            Ok(eig) => {
                worst.update("eigen_residual", eig.residual());
                worst.update("eigen_orthonormality", eig.orthonormality_residual());
                if dim.d() <= 31 {
                    let (val, vec) = compare_with_dense(&eig);
                    worst.update("eigen_dense_values", val);
                    worst.update("eigen_dense_vectors", vec);
                }
            }
            Err(TorusError::DegenerateSpectrum { .. }) => skipped += 1,
            Err(e) => rec.warn(format!("eigensystem S_{m}: {e}")),
        }
    }
    worst.flush(rec);
    if skipped > 0 {
        rec.warn(format!("reducible: {skipped} Schwinger operators at D={dim} have degenerate spectra; eigensystem checks skipped"));
    }
}

/// Non-collinear pair drawn from the window.
fn random_pair(dim: Dimension, rng: &mut impl Rng) -> (LatticeVector, LatticeVector) {
    loop {
        let (m, mp) = (random_lattice_vector(dim, rng), random_lattice_vector(dim, rng));
        if m.cross_mod(mp, dim) != 0 {
            return (m, mp);
        }
    }
}

fn qosc_suite(config: &VerifyConfig, rec: &mut Recorder, rng: &mut impl Rng) {
    let dim = config.dim;
    let mut worst = Worst::default();
    let mut build_errors = 0;
    for _ in 0..config.samples {
        let (m, mp) = random_pair(dim, rng);
        let o = match QOscillator::build(dim, m, mp) {
            Ok(o) => o,
            Err(TorusError::DegenerateDeformation { .. }) => {
                rec.warn(format!("q = ±1 for some pairs at D={dim}; those pairs are skipped"));
                continue;
            }
            Err(e) => {
                rec.warn(format!("q-oscillator m={m} m'={mp}: {e}"));
                build_errors += 1;
                continue;
            }
        };
        worst.update("coefficients", o.coefficient_residual());
        worst.update("a_dag_a", o.a_dag_a_residual());
        worst.update("q_commutator", o.q_commutator_residual());
        worst.update("number_exponential", o.number_exponential_residual());
        worst.update("ladder_non_wrap", o.ladder_residual_restricted());
        worst.update("ladder_exponentiated", o.exponentiated_ladder_residual());
        worst.update("centrality", o.centrality_residual());
        worst.update("spectrum_non_negative", (-o.min_spectrum()).max(0.0));
        worst.update("cyclicity", o.cyclicity_residual());
        match o.branch_equivalence_residual() {
            Ok(r) => worst.update("branch_equivalence", r),
            Err(e) => rec.warn(format!("branch equivalence m={m} m'={mp}: {e}")),
        }
    }
    worst.flush(rec);
    rec.check("build_errors", build_errors as f64);
}

fn sl2_suite(config: &VerifyConfig, rec: &mut Recorder, rng: &mut impl Rng) {
    let dim = config.dim;
    let mut worst = Worst::default();
    let mut build_errors = 0;
    for _ in 0..config.samples {
        let (m, mp) = random_pair(dim, rng);
        let r = match UqSl2Realisation::build(dim, m, mp) {
            Ok(r) => r,
            Err(e @ (TorusError::DegenerateSpectrum { .. } | TorusError::DegenerateDeformation { .. })) => {
                rec.warn(format!("sl2 m={m} m'={mp} skipped: {e}"));
                continue;
            }
            Err(e) => {
                rec.warn(format!("sl2 m={m} m'={mp}: {e}"));
                build_errors += 1;
                continue;
            }
        };
        worst.update("j3_exponential", r.j3_residual);
        worst.update("coefficients", r.coefficient_residual());
        worst.update("intertwining", r.intertwining_residual());
        worst.update("commutator", r.commutator_residual());
        worst.update("ladder_non_wrap", r.ladder_residual_restricted());
        worst.update("casimir", casimir_uq_sl2(&r).max_residual());
    }
    worst.flush(rec);
    rec.check("build_errors", build_errors as f64);
    match coproduct_check(dim, LatticeVector::new(1, 0), LatticeVector::new(0, 1)) {
        Ok(c) => {
            rec.check("coproduct_intertwining", c.intertwining);
            rec.check("coproduct_commutator", c.commutator);
            rec.check("coproduct_additivity", c.additivity);
        }
        Err(e) => rec.warn(format!("coproduct skipped: {e}")),
    }
}

fn wigner_suite(config: &VerifyConfig, rec: &mut Recorder, rng: &mut impl Rng) {
    let dim = config.dim;
    let mut worst = Worst::default();
    for m in dim.window_vectors() {
        worst.update("kernel_duality", dual_residual(dim, m));
    }
    worst.flush(rec);
    if dim.d() % 2 == 0 {
        rec.warn(format!("covariance, marginal and overlap properties need odd D; only kernel checks run at D={dim}"));
        return;
    }
    let mut total = PropertyReport::default();
    let mut round_trip: f64 = 0.0;
    for s in 0..config.samples {
        let psi = random_state_with(dim, rng);
        let phi = random_state_with(dim, rng);
        let obs = random_hermitian(dim, rng);
        let shift = 1 + (s as i64) % (dim.di() - 1);
        match property_suite(&psi, &phi, &obs, shift) {
            Ok(r) => total.merge(&r),
            Err(e) => rec.warn(format!("property suite: {e}")),
        }
        if s < 3 {
            round_trip = round_trip.max(symbol_round_trip_residual(&obs, dim).unwrap_or(f64::INFINITY));
        }
    }
    for (name, r) in total.named() {
        rec.check(name, r);
    }
    rec.check_scaled("symbol_round_trip", round_trip, dim.d() as f64);
}

fn number_phase_suite(config: &VerifyConfig, rec: &mut Recorder, rng: &mut impl Rng) {
    let dim = config.dim;
    let pair = PhasePair::build(dim);
    rec.check("phase_eigen", pair.phase_eigen_residual());
    rec.check("number_shift", pair.number_shift_residual());
    rec.check("phase_basis", pair.phase_basis_residual());
    rec.check("commutation", pair.commutation_residual());
    let alg = algebra_suite(dim, |m| pair.schwinger(m), config.samples, rng);
    for (name, r) in alg.named() {
        rec.check(format!("pair_{name}"), r);
    }
    let mut worst = Worst::default();
    for _ in 0..config.samples.min(8) {
        let (j, t) = (rng.random_range(0.0..dim.d() as f64), rng.random_range(0.0..std::f64::consts::TAU));
        worst.update("kernel_forms_agree", kernel_from_pair(dim, j, t).max_abs_diff(&kernel_from_phase_states(dim, j, t)));
    }
    for _ in 0..config.samples {
        let psi = random_state_with(dim, rng).change_basis(BasisTag::Number).expect("number basis is always available");
        let grid = wigner_number_phase(&psi);
        worst.update("action_angle_reality", grid.max_imag);
        worst.update("action_angle_mass", (action_angle_mass(&grid) - 1.0).abs());
        let (number, phase) = action_angle_marginal_residuals(&psi);
        worst.update("number_marginal", number);
        worst.update("phase_marginal", phase);
    }
    worst.flush(rec);
    let f: Vec<f64> = (0..dim.d()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (m, mp) = random_pair(dim, rng);
    match expand_number_function(dim, &f, m, mp) {
        Ok(e) => {
            rec.check_scaled("number_function_expansion", e.residual, dim.d() as f64);
            rec.check("number_function_terms", e.term_residual);
        }
        Err(e) => rec.warn(format!("number-function expansion m={m} m'={mp} skipped: {e}")),
    }
}

fn transforms_suite(config: &VerifyConfig, rec: &mut Recorder, rng: &mut impl Rng) {
    let dim = config.dim;
    rec.check("quarter_turn_order", quarter_turn_order_residual(dim));
    if dim.d() % 2 == 1 {
        rec.check("fourier_wigner_rotation", fourier_wigner_rotation_check(dim));
    } else {
        rec.warn(format!("Fourier rotation of the Wigner kernel needs odd D; skipped at D={dim}"));
    }
    if !dim.is_prime() {
        rec.warn(format!("metaplectic construction needs prime D; skipped at D={dim}"));
        return;
    }
    match build_metaplectic(dim, SymplecticMap::QUARTER_TURN) {
        Ok(g) => rec.check("quarter_turn_is_fourier", g.distance_up_to_phase(fourier_operator(dim).matrix())),
        Err(e) => rec.warn(format!("quarter turn: {e}")),
    }
    let mut worst = Worst::default();
    let mut build_errors = 0;
    let samples = config.samples.min(if dim.d() > 13 { 4 } else { 12 });
    for _ in 0..samples {
        let r1 = random_symplectic(dim, rng);
        let r2 = random_symplectic(dim, rng);
        match build_metaplectic(dim, r1) {
            Ok(g) => {
                worst.update("metaplectic_unitary", g.unitary_residual);
                worst.update("metaplectic_covariance", g.max_conjugation_residual());
                worst.update("conjugation_phase_modulus", g.phase_modulus_residual());
            }
            Err(e) => {
                rec.warn(format!("metaplectic {r1}: {e}"));
                build_errors += 1;
            }
        }
        match closure_residual(dim, r1, r2) {
            Ok(c) => worst.update("closure", c),
            Err(e) => {
                rec.warn(format!("closure {r1}·{r2}: {e}"));
                build_errors += 1;
            }
        }
    }
    worst.flush(rec);
    rec.check("build_errors", build_errors as f64);
    let id = ComplexMatrix::identity(dim.d());
    match build_metaplectic(dim, SymplecticMap::IDENTITY) {
        Ok(g) => rec.check("identity_map", g.distance_up_to_phase(&id)),
        Err(e) => rec.warn(format!("identity map: {e}")),
    }
}
