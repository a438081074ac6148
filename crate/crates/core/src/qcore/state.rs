//! Density matrices and the channels applied to them: partial trace,
//! dephasing, projection onto a measurement branch, and diagonal readout.

use super::linalg::hermitian_eigenvalues;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::table::ProbTable;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_FLOOR: f64 = -1e-9;
/// Diagonal readout below this is an upstream bug rather than rounding.
pub const READOUT_BUG_TOL: f64 = -1e-6;

/// Hermitian, positive semidefinite matrix whose trace is 1, or a branch
/// probability for postselected (subnormalized) states.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates a unit-trace state.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_mass(matrix, 1.0)
    }

    /// Validates a state whose trace equals `mass`.
    pub fn with_mass(matrix: ComplexMatrix, mass: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                actual: matrix.cols(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace().re;
        if (tr - mass).abs() > TRACE_TOL {
            return Err(Error::TraceMismatch {
                expected: mass,
                actual: tr,
            });
        }
        let min_eig = hermitian_eigenvalues(&matrix).first().copied().unwrap_or(0.0);
        if min_eig < PSD_FLOOR {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { matrix })
    }

    /// Skips validation; for results of trace-preserving or
    /// trace-nonincreasing maps applied to an already valid state.
    fn trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `1 / dim`
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::trusted(ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)))
    }

    /// `|k⟩⟨k|`
    pub fn basis_state(dim: usize, k: usize) -> Self {
        Self::trusted(ComplexMatrix::basis_projector(dim, k))
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceMismatch {
                expected: 1.0,
                actual: norm,
            });
        }
        Ok(Self::trusted(ComplexMatrix::outer(ket, ket)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Real part of the trace: 1, or the branch probability.
    pub fn mass(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix).first().copied().unwrap_or(0.0)
    }

    /// `ρ ⊗ σ`
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::trusted(self.matrix.kron(&other.matrix))
    }

    /// `U ρ U†`; the caller guarantees `U` is unitary.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.rows(),
            });
        }
        Ok(Self::trusted(self.matrix.conjugate_by(u)))
    }
}

/// Reduced state on the subsystems listed in `keep` (in ascending order of
/// subsystem index, regardless of the order given).
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() || dims.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: total,
        });
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(format!("subsystem {bad} out of range")));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();

    let kept_dim: usize = kept.iter().map(|&k| dims[k]).product();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    // digit decomposition helpers over a subset of subsystems
    let compose = |digits: &mut [usize], subset: &[usize], mut flat: usize| {
        for &k in subset.iter().rev() {
            digits[k] = flat % dims[k];
            flat /= dims[k];
        }
    };
    let flatten = |digits: &[usize]| digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d);

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    let mut row_digits = vec![0; dims.len()];
    let mut col_digits = vec![0; dims.len()];
    for r in 0..kept_dim {
        compose(&mut row_digits, &kept, r);
        for c in 0..kept_dim {
            compose(&mut col_digits, &kept, c);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..traced_dim {
                compose(&mut row_digits, &traced, t);
                compose(&mut col_digits, &traced, t);
                acc += rho.matrix[(flatten(&row_digits), flatten(&col_digits))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DensityMatrix::trusted(out))
}

/// Zeroes every coherence in the computational basis.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::trusted(ComplexMatrix::from_diagonal(&rho.matrix.diagonal()))
}

/// `Π ρ Π` without renormalization; the trace of the result is the branch
/// probability.
pub fn project_branch(rho: &DensityMatrix, projector: &ComplexMatrix) -> Result<DensityMatrix> {
    if projector.rows() != rho.dim() || !projector.is_square() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: projector.rows(),
        });
    }
    let defect = (projector * projector).max_abs_diff(projector);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotIdempotent(defect));
    }
    Ok(DensityMatrix::trusted(&(projector * &rho.matrix) * projector))
}

/// Reads the computational-basis populations as an arity-1 table whose mass
/// is the (unrenormalized) trace.
pub fn diag_probabilities(rho: &DensityMatrix) -> Result<ProbTable> {
    let mut values = Vec::with_capacity(rho.dim());
    for (index, z) in rho.matrix.diagonal().into_iter().enumerate() {
        if z.re < READOUT_BUG_TOL {
            return Err(Error::NegativeProbability { index, value: z.re });
        }
        values.push(z.re.max(0.0));
    }
    let mass = values.iter().sum();
    ProbTable::with_mass(1, rho.dim(), values, mass)
}
