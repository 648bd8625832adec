//! Symplectic integer maps on Z_D × Z_D and their unitary realisations.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TorusError};
use crate::lattice::{Dimension, LatticeVector};
use crate::linalg::{root_of_unity, ComplexMatrix};
use crate::operators::{fourier_operator, OperatorMatrix, Provenance};
use crate::schwinger::{eigensystem_by_recursion, schwinger_matrix};
use crate::wigner::{grid, kernel_matrix, GridPoint};

/// `R = [[s1, t1], [s2, t2]]`; the columns are the images of `(1,0)` and `(0,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticMap {
    pub s1: i64,
    pub t1: i64,
    pub s2: i64,
    pub t2: i64,
}

impl SymplecticMap {
    pub const IDENTITY: Self = Self { s1: 1, t1: 0, s2: 0, t2: 1 };
    /// Quarter-turn `[[0, −1], [1, 0]]`.
    pub const QUARTER_TURN: Self = Self { s1: 0, t1: -1, s2: 1, t2: 0 };

    /// Row-major entries `[[a, b], [c, d]]`.
    pub fn from_rows(rows: [[i64; 2]; 2]) -> Self {
        Self { s1: rows[0][0], t1: rows[0][1], s2: rows[1][0], t2: rows[1][1] }
    }

    pub fn from_columns(s: LatticeVector, t: LatticeVector) -> Self {
        Self { s1: s.m1, t1: t.m1, s2: s.m2, t2: t.m2 }
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.s1, self.t1], [self.s2, self.t2]]
    }

    pub fn s(&self) -> LatticeVector {
        LatticeVector::new(self.s1, self.s2)
    }

    pub fn t(&self) -> LatticeVector {
        LatticeVector::new(self.t1, self.t2)
    }

    pub fn determinant(&self) -> i64 {
        self.s().cross(self.t())
    }

    /// `R:m`, with no reduction.
    pub fn apply(&self, m: LatticeVector) -> LatticeVector {
        LatticeVector::new(self.s1 * m.m1 + self.t1 * m.m2, self.s2 * m.m1 + self.t2 * m.m2)
    }

    /// The product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_columns(self.apply(other.s()), self.apply(other.t()))
    }

    /// `Rᵗ P R ≡ P` and `det R ≡ 1` mod `D`, and `R` preserves `m × m′` on
    /// the unit pair.
    pub fn verify_symplectic(&self, dim: Dimension) -> bool {
        let d = dim.di();
        let p = [[0, 1], [-1, 0]];
        let r = self.rows();
        let mut rtpr = [[0_i64; 2]; 2];
        for (i, row) in rtpr.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..2).flat_map(|k| (0..2).map(move |l| (k, l))).map(|(k, l)| r[k][i] * p[k][l] * r[l][j]).sum();
            }
        }
        let form_ok = (0..2).all(|i| (0..2).all(|j| (rtpr[i][j] - p[i][j]).rem_euclid(d) == 0));
        let det_ok = (self.determinant() - 1).rem_euclid(d) == 0;
        let e1 = LatticeVector::new(1, 0);
        let e2 = LatticeVector::new(0, 1);
        let area_ok = equivalence_class_label(dim, self.apply(e1), self.apply(e2)) == equivalence_class_label(dim, e1, e2);
        form_ok && det_ok && area_ok
    }
}

impl fmt::Display for SymplecticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.s1, self.t1, self.s2, self.t2)
    }
}

/// `m × m′ mod D`.
pub fn equivalence_class_label(dim: Dimension, m: LatticeVector, mp: LatticeVector) -> i64 {
    m.cross_mod(mp, dim)
}

/// A map with entries drawn from the label window, rejected until
/// `det ≡ 1 mod D`.
pub fn random_symplectic(dim: Dimension, rng: &mut impl Rng) -> SymplecticMap {
    let w = dim.window();
    loop {
        let mut pick = || w[rng.random_range(0..w.len())];
        let map = SymplecticMap { s1: pick(), t1: pick(), s2: pick(), t2: pick() };
        if map.verify_symplectic(dim) {
            return map;
        }
    }
}

/// Proportionality of `G S_m G⁻¹` to `S_{R:m}` at one lattice vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugationPhase {
    pub m: LatticeVector,
    pub phase: Complex64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetaplecticOperator {
    pub dim: Dimension,
    pub map: SymplecticMap,
    pub g: OperatorMatrix,
    pub unitary_residual: f64,
    pub per_m: Vec<ConjugationPhase>,
}

impl MetaplecticOperator {
    pub fn max_conjugation_residual(&self) -> f64 {
        self.per_m.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// `max | |e^{iχ(m)}| − 1 |`.
    pub fn phase_modulus_residual(&self) -> f64 {
        self.per_m.iter().map(|p| (p.phase.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Whether every `χ(m)` is the same, so one global phase removes it.
    pub fn phases_flatten(&self, tol: f64) -> bool {
        let first = self.per_m.first().map(|p| p.phase);
        first.is_none_or(|c| self.per_m.iter().all(|p| (p.phase - c).norm() < tol))
    }

    /// `min_c ‖G − c·target‖_max` with `c` the trace projection.
    pub fn distance_up_to_phase(&self, target: &ComplexMatrix) -> f64 {
        self.g.matrix().proportionality(target).1
    }
}

/// Builds `G` with `G|v_0⟩` the phase-fixed `r = 0` eigenvector of `S_ŝ` and
/// `G|v_{ℓ+1}⟩ = e^{iπ t1 t2} S_t̂ G|v_ℓ⟩`, then records `G S_m G⁻¹ ∝ S_{R:m}`
/// over the label window.
pub fn build_metaplectic(dim: Dimension, map: SymplecticMap) -> Result<MetaplecticOperator> {
    if !map.verify_symplectic(dim) {
        return Err(TorusError::NonSymplectic(map.rows(), dim.d()));
    }
    let s = map.s();
    if !dim.is_prime() {
        return Err(TorusError::DegenerateEigensystem(s.as_tuple()));
    }
    let d = dim.di();
    let n = dim.d();
    let eig = eigensystem_by_recursion(dim, s).map_err(|_| TorusError::DegenerateEigensystem(s.as_tuple()))?;
    let st = schwinger_matrix(dim, map.t());
    let align = root_of_unity(map.t1 * map.t2, 2);
    let mut cols = vec![eig.eigenvectors[0].amplitudes().to_vec()];
    for l in 1..n {
        let next: Vec<Complex64> = st.apply(&cols[l - 1]).into_iter().map(|z| z * align).collect();
        cols.push(next);
    }
    let image = ComplexMatrix::from_columns(&cols);
    let scale = 1.0 / (n as f64).sqrt();
    let v_basis = ComplexMatrix::from_fn(n, |k, l| root_of_unity(-((k * l) as i64), d) * scale);
    let g = &image * &v_basis.adjoint();
    let g_inv = g.adjoint();
    let per_m = dim
        .window_vectors()
        .into_iter()
        .map(|m| {
            let conj = &(&g * &schwinger_matrix(dim, m)) * &g_inv;
            let target = schwinger_matrix(dim, map.apply(m));
            let phase = (&target.adjoint() * &conj).trace() / n as f64;
            ConjugationPhase { m, phase, residual: conj.max_abs_diff(&target.scale(phase)) }
        })
        .collect();
    let unitary_residual = g.unitarity_residual();
    let g = OperatorMatrix::new(dim, g, Provenance::Metaplectic)?;
    Ok(MetaplecticOperator { dim, map, g, unitary_residual, per_m })
}

/// `‖G(R1 R2) − c G(R1) G(R2)‖` after aligning the global phase `c`.
pub fn closure_residual(dim: Dimension, r1: SymplecticMap, r2: SymplecticMap) -> Result<f64> {
    let g1 = build_metaplectic(dim, r1)?;
    let g2 = build_metaplectic(dim, r2)?;
    let g12 = build_metaplectic(dim, r1.compose(&r2))?;
    let product = g1.g.matrix() * g2.g.matrix();
    Ok(product.proportionality(g12.g.matrix()).1)
}

/// `max_V ‖F Δ(V) F⁻¹ − Δ(−V2, V1)‖`, the quarter-turn acting on the grid.
pub fn fourier_wigner_rotation_check(dim: Dimension) -> f64 {
    let f = fourier_operator(dim).into_matrix();
    let f_inv = f.adjoint();
    grid(dim)
        .map(|v| {
            let rotated = &(&f * &kernel_matrix(dim, v)) * &f_inv;
            let w = SymplecticMap::QUARTER_TURN.apply(LatticeVector::new(v.v1, v.v2));
            rotated.max_abs_diff(&kernel_matrix(dim, GridPoint::new(w.m1, w.m2)))
        })
        .fold(0.0, f64::max)
}

/// `max_V ‖F⁴ Δ(V) F⁻⁴ − Δ(V)‖`.
pub fn quarter_turn_order_residual(dim: Dimension) -> f64 {
    let f = fourier_operator(dim).into_matrix();
    let f4 = f.pow(4);
    let f4_inv = f4.adjoint();
    grid(dim)
        .map(|v| {
            let k = kernel_matrix(dim, v);
            (&(&f4 * &k) * &f4_inv).max_abs_diff(&k)
        })
        .fold(0.0, f64::max)
}
