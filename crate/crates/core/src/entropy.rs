//! Shannon entropies of probability tables, the entropic Leggett-Garg chain,
//! and the information deficit `D_n(θ)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{joint2, MeasurementMode, ProtocolConfig};
use crate::qcore::Spin;
use crate::table::{ProbTable, CLAMP_TOL, MASS_TOL};

/// Deficits below `-VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-9;
/// Slack for the entropy chain inequalities.
pub const CHAIN_TOL: f64 = 1e-9;

/// An entropy in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntropyBits(pub f64);

impl EntropyBits {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for EntropyBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// `-Σ p log₂ p` with `0 log 0 = 0`.
fn entropy_of(values: &[f64]) -> f64 {
    let h: f64 = values.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    // -0.0 from a single unit entry
    h.max(0.0)
}

/// Binary entropy `H_b(p)`.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

fn check_normalized(p: &ProbTable, arity: usize) -> Result<()> {
    if p.arity() != arity {
        return Err(Error::WrongArity {
            expected: arity,
            actual: p.arity(),
        });
    }
    if (p.mass() - 1.0).abs() > MASS_TOL || (p.sum() - 1.0).abs() > MASS_TOL {
        return Err(Error::MassMismatch {
            expected: 1.0,
            actual: p.sum(),
        });
    }
    Ok(())
}

/// Entropy of a single-time distribution.
pub fn shannon(p: &ProbTable) -> Result<EntropyBits> {
    check_normalized(p, 1)?;
    Ok(EntropyBits(entropy_of(p.values())))
}

/// Entropy of a two-time joint distribution.
pub fn joint_entropy(p: &ProbTable) -> Result<EntropyBits> {
    check_normalized(p, 2)?;
    Ok(EntropyBits(entropy_of(p.values())))
}

/// `H(Q_j | Q_i) = H(Q_i, Q_j) - H(Q_i)` for a table indexed `(q_i, q_j)`.
pub fn conditional_entropy(p: &ProbTable) -> Result<EntropyBits> {
    let joint = joint_entropy(p)?;
    let first = shannon(&p.marginal(&[0])?)?;
    let h = joint.0 - first.0;
    if h < -CLAMP_TOL {
        return Err(Error::InvalidArgument(format!("negative conditional entropy {h:e}")));
    }
    Ok(EntropyBits(h.max(0.0)))
}

/// Entropies entering `H(Q_j|Q_i) ≤ H(Q_j) ≤ H(Q_i,Q_j)` and whether each
/// inequality holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub conditional: EntropyBits,
    pub marginal: EntropyBits,
    pub joint: EntropyBits,
    pub conditional_le_marginal: bool,
    pub marginal_le_joint: bool,
}

impl ChainCheck {
    pub fn holds(&self) -> bool {
        self.conditional_le_marginal && self.marginal_le_joint
    }
}

pub fn bc_chain_check(p: &ProbTable) -> Result<ChainCheck> {
    let conditional = conditional_entropy(p)?;
    let marginal = shannon(&p.marginal(&[1])?)?;
    let joint = joint_entropy(p)?;
    Ok(ChainCheck {
        conditional,
        marginal,
        joint,
        conditional_le_marginal: conditional.0 <= marginal.0 + CHAIN_TOL,
        marginal_le_joint: marginal.0 <= joint.0 + CHAIN_TOL,
    })
}

/// Information deficit of `n` equidistant measurements spanning a total
/// rotation `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub n: usize,
    pub spin: Spin,
    pub theta: f64,
    /// `H(Q_{k+1} | Q_k)` for one step of `θ / (n-1)`.
    pub h_step: EntropyBits,
    /// `H(Q_n | Q_1)`.
    pub h_total: EntropyBits,
    /// In units of `log₂(2s+1)`.
    pub deficit: f64,
    pub violated: bool,
    pub mode: MeasurementMode,
}

/// Normalized left-hand side of the entropic Leggett-Garg inequality.
pub fn normalized_deficit(step_conditionals: &[f64], total_conditional: f64, spin: Spin) -> f64 {
    let lhs: f64 = step_conditionals.iter().sum::<f64>() - total_conditional;
    lhs / (spin.dim() as f64).log2()
}

/// `D_n(θ) = [(n-1) H(θ/(n-1)) - H(θ)] / log₂(2s+1)`.
///
/// Circuit modes support `s = 1/2, n = 3`; the analytic mode supports any
/// `n ≥ 3` and spin.
pub fn info_deficit(n: usize, spin: Spin, theta: f64, mode: MeasurementMode) -> Result<DeficitReport> {
    if n < 3 {
        return Err(Error::Unsupported(format!("information deficit needs n >= 3, got {n}")));
    }
    if mode.is_circuit() && (n != 3 || !spin.is_half()) {
        return Err(Error::Unsupported(format!(
            "{mode} mode supports n = 3 and s = 1/2 only (got n = {n}, s = {spin})"
        )));
    }
    let config = ProtocolConfig::equidistant(spin, n, theta, mode)?;
    let h_step = conditional_entropy(&joint2(&config, 0, 1)?)?;
    let h_total = conditional_entropy(&joint2(&config, 0, n - 1)?)?;
    let steps = vec![h_step.0; n - 1];
    let deficit = normalized_deficit(&steps, h_total.0, spin);
    Ok(DeficitReport {
        n,
        spin,
        theta,
        h_step,
        h_total,
        deficit,
        violated: deficit < -VIOLATION_TOL,
        mode,
    })
}

/// One report per grid point, in grid order.
pub fn deficit_sweep(n: usize, spin: Spin, theta_grid: &[f64], mode: MeasurementMode) -> Result<Vec<DeficitReport>> {
    if theta_grid.is_empty() {
        return Err(Error::InvalidArgument("empty angle grid".into()));
    }
    theta_grid.iter().map(|&t| info_deficit(n, spin, t, mode)).collect()
}
