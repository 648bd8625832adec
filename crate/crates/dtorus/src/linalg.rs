//! Dense complex matrices and the few decompositions the crate needs.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

/// `e^{2πi num/den}` with the numerator reduced exactly before the
/// trigonometric call, so large integer arguments lose no precision.
/// Multiples of a quarter turn are exact.
pub fn root_of_unity(num: i64, den: i64) -> Complex64 {
    let r = num.rem_euclid(den);
    if (4 * r) % den == 0 {
        return match 4 * r / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * r as f64 / den as f64)
}

/// `e^{iθ}`.
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Square dense matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Row-major construction; fails if the rows are ragged or not square.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Self { n, data: rows.into_iter().flatten().collect() })
    }

    /// `Σ_k w_k |a_k⟩⟨a_k|` for column vectors `a_k`.
    pub fn spectral(vectors: &[Vec<Complex64>], weights: &[Complex64]) -> Self {
        let n = vectors.first().map_or(0, Vec::len);
        let mut m = Self::zeros(n);
        for (v, &w) in vectors.iter().zip(weights) {
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    m.data[i * n + j] += vi * v[j].conj();
                }
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let n = cols.len();
        Self::from_fn(n, |i, j| cols[j][i])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `min_c ‖self − c·other‖_max` evaluated at the Hilbert–Schmidt optimal
    /// `c = ⟨other, self⟩ / ⟨other, other⟩`; returns `(c, residual)`.
    pub fn proportionality(&self, other: &Self) -> (Complex64, f64) {
        let num: Complex64 = other.data.iter().zip(&self.data).map(|(o, s)| o.conj() * s).sum();
        let den: f64 = other.data.iter().map(|o| o.norm_sqr()).sum();
        let c = if den > 0.0 { num / den } else { Complex64::new(0.0, 0.0) };
        (c, self.max_abs_diff(&other.scale(c)))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.n, other.n);
        Self::from_fn(a * b, |i, j| self[(i / b, j / b)] * other[(i % b, j % b)])
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `‖M†M − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.n))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending with
    /// their unit eigenvectors.
    pub fn hermitian_eigen(&self) -> Vec<(f64, Vec<Complex64>)> {
        let eig = self.to_nalgebra().symmetric_eigen();
        let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..self.n)
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.to_nalgebra().singular_values().iter().copied().collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions differ");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions differ");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions differ");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff_vec(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Distance between two vectors after removing the best global phase.
pub fn phase_aligned_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ov = inner(b, a);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x - y * phase).norm()).fold(0.0, f64::max)
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_adjoint() {
        let a = ComplexMatrix::from_rows(vec![vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(0.0, -1.0)]]).unwrap();
        let p = &a * &ComplexMatrix::identity(2);
        assert_eq!(p, a);
        assert_eq!(a.adjoint()[(0, 1)], c(2.0, 0.0));
        assert_eq!(a.adjoint()[(0, 0)], c(0.0, -1.0));
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = ComplexMatrix::from_fn(3, |i, j| c(i as f64 - j as f64, (i * j) as f64 * 0.1));
        let direct = &(&a * &a) * &(&a * &a);
        assert!(a.pow(4).max_abs_diff(&direct) < 1e-12);
        assert_eq!(a.pow(0), ComplexMatrix::identity(3));
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let h = ComplexMatrix::from_rows(vec![vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]).unwrap();
        let eig = h.hermitian_eigen();
        assert!((eig[0].0 - 1.0).abs() < 1e-12 && (eig[1].0 - 3.0).abs() < 1e-12);
        let vecs: Vec<_> = eig.iter().map(|p| p.1.clone()).collect();
        let w: Vec<_> = eig.iter().map(|p| c(p.0, 0.0)).collect();
        assert!(ComplexMatrix::spectral(&vecs, &w).max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn kron_dimensions_and_entries() {
        let a = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = ComplexMatrix::from_diag(&[c(3.0, 0.0), c(5.0, 0.0)]);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 4);
        assert_eq!(k[(3, 3)], c(10.0, 0.0));
        assert_eq!(k[(1, 1)], c(5.0, 0.0));
    }

    #[test]
    fn root_of_unity_reduces_large_numerators() {
        let z = root_of_unity(1_000_000_007 * 5 + 1, 5);
        assert!((z - root_of_unity(1, 5)).norm() < 1e-15);
    }

    #[test]
    fn compensated_sum_cancels() {
        let s = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }
}
