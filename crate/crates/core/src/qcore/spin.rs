//! Spin-s angular momentum operators and the rotation generated by `S_x`.
//!
//! Basis ordering: index `k` is the `S_z` eigenstate with `m = s - k`, so the
//! computational `|0⟩` of a qubit is spin-up.
//!
//! Sign convention: the forward evolution over rotation angle `θ = ωt` is
//! `U(θ) = exp(iθ S_x)`. Every probability computed in this crate depends
//! only on `|⟨m'|U|m⟩|²`, which is unchanged under `θ → -θ` because `S_x` is
//! real symmetric.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::linalg::expm;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// A spin quantum number `s ∈ {1/2, 1, 3/2, ...}`, stored as `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { twice: 1 };

    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !twice.is_finite() || twice < 0.5 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(s));
        }
        Ok(Self {
            twice: twice.round() as u32,
        })
    }

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Self { twice })
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    /// Hilbert-space dimension `2s + 1`.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub fn is_half(self) -> bool {
        self.twice == 1
    }

    /// `m` value of basis index `k`.
    pub fn m(self, k: usize) -> f64 {
        self.value() - k as f64
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        Spin::new(s)
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.value()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// `S_x`, `S_y`, `S_z` for a given spin, with ħ = 1.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub spin: Spin,
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
}

/// Ladder-operator construction of the spin matrices.
pub fn spin_operators(spin: Spin) -> SpinOps {
    let dim = spin.dim();
    let s = spin.value();
    let mut raise = ComplexMatrix::zeros(dim, dim);
    // S+|m⟩ = sqrt(s(s+1) - m(m+1)) |m+1⟩, and |m+1⟩ sits one index lower.
    for k in 1..dim {
        let m = spin.m(k);
        raise[(k - 1, k)] = C64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.dagger();
    let sx = (&raise + &lower).scale(C64::new(0.5, 0.0));
    // (S+ - S-) / 2i
    let sy = (&raise - &lower).scale(C64::new(0.0, -0.5));
    let diag: Vec<C64> = (0..dim).map(|k| C64::new(spin.m(k), 0.0)).collect();
    let sz = ComplexMatrix::from_diagonal(&diag);
    SpinOps { spin, sx, sy, sz }
}

/// `exp(iθ S_x)`.
pub fn rotation_unitary(spin: Spin, theta: f64) -> Result<ComplexMatrix> {
    if !theta.is_finite() {
        return Err(Error::InvalidAngles(format!("non-finite rotation angle {theta}")));
    }
    let ops = spin_operators(spin);
    Ok(expm(&ops.sx.scale(C64::new(0.0, theta))))
}
