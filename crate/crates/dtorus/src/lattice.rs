//! Dimension bookkeeping and integer arithmetic on the lattice Z_D × Z_D.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TorusError};

/// Hilbert-space dimension `D ≥ 2` together with its primality flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Dimension {
    d: usize,
    prime: bool,
}

impl Dimension {
    pub fn new(d: i64) -> Result<Self> {
        if d < 2 {
            return Err(TorusError::InvalidDimension(d));
        }
        let d = d as usize;
        Ok(Self { d, prime: is_prime(d) })
    }

    pub fn d(self) -> usize {
        self.d
    }

    pub fn di(self) -> i64 {
        self.d as i64
    }

    /// `γ0 = 2π/D`.
    pub fn gamma0(self) -> f64 {
        std::f64::consts::TAU / self.d as f64
    }

    pub fn is_prime(self) -> bool {
        self.prime
    }

    /// Representatives of Z_D used for lattice labels: symmetric around zero
    /// for odd `D`, and `{−D/2+1, …, D/2}` for even `D` (so `{0, 1}` at `D = 2`).
    pub fn window(self) -> Vec<i64> {
        let d = self.di();
        let lo = if d % 2 == 1 { -(d - 1) / 2 } else { -d / 2 + 1 };
        (lo..lo + d).collect()
    }

    /// Reduces an integer into the label window.
    pub fn reduce(self, x: i64) -> i64 {
        let d = self.di();
        let lo = if d % 2 == 1 { -(d - 1) / 2 } else { -d / 2 + 1 };
        (x - lo).rem_euclid(d) + lo
    }

    /// All `D²` lattice vectors with both components in the window.
    pub fn window_vectors(self) -> Vec<LatticeVector> {
        let w = self.window();
        w.iter().flat_map(|&a| w.iter().map(move |&b| LatticeVector::new(a, b))).collect()
    }

    /// Warning attached to results that only carry full meaning for prime `D`.
    pub fn prime_warning(self) -> Option<String> {
        (!self.prime).then(|| format!("D={} is not prime; representation may be reducible", self.d))
    }
}

impl TryFrom<i64> for Dimension {
    type Error = TorusError;
    fn try_from(d: i64) -> Result<Self> {
        Self::new(d)
    }
}

impl From<Dimension> for i64 {
    fn from(d: Dimension) -> i64 {
        d.di()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d)
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

/// Integer label `(m1, m2)` of a Schwinger operator.
///
/// Components are kept as given; several phases depend on the integer
/// representative and not only on its class mod `D`. Use
/// [`LatticeVector::canonical`] to reduce into the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LatticeVector {
    pub m1: i64,
    pub m2: i64,
}

impl LatticeVector {
    pub const ZERO: Self = Self { m1: 0, m2: 0 };

    pub const fn new(m1: i64, m2: i64) -> Self {
        Self { m1, m2 }
    }

    /// `m1·b2 − m2·b1`, exact.
    pub fn cross(self, b: Self) -> i64 {
        self.m1 * b.m2 - self.m2 * b.m1
    }

    /// The cross product reduced into `{0, …, D−1}`.
    pub fn cross_mod(self, b: Self, dim: Dimension) -> i64 {
        self.cross(b).rem_euclid(dim.di())
    }

    pub fn scale(self, j: i64) -> Self {
        Self::new(self.m1 * j, self.m2 * j)
    }

    pub fn canonical(self, dim: Dimension) -> Self {
        Self::new(dim.reduce(self.m1), dim.reduce(self.m2))
    }

    pub fn is_zero_mod(self, dim: Dimension) -> bool {
        self.m1.rem_euclid(dim.di()) == 0 && self.m2.rem_euclid(dim.di()) == 0
    }

    pub fn congruent(self, other: Self, dim: Dimension) -> bool {
        (self - other).is_zero_mod(dim)
    }

    pub fn as_tuple(self) -> (i64, i64) {
        (self.m1, self.m2)
    }
}

impl Add for LatticeVector {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self::new(self.m1 + b.m1, self.m2 + b.m2)
    }
}

impl Sub for LatticeVector {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Self::new(self.m1 - b.m1, self.m2 - b.m2)
    }
}

impl Neg for LatticeVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.m1, -self.m2)
    }
}

impl From<(i64, i64)> for LatticeVector {
    fn from((m1, m2): (i64, i64)) -> Self {
        Self::new(m1, m2)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m1, self.m2)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `n` in `{0, …, n−1}`, if it exists.
pub fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    let (mut r0, mut r1) = (a.rem_euclid(n), n);
    let (mut s0, mut s1) = (1_i64, 0_i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(n))
}
