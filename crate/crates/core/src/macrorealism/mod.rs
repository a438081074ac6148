//! Legitimacy of joint probabilities: does a grand distribution over all
//! three measurement times reproduce every pairwise table? Also a classical
//! Markov-chain baseline, which is legitimate by construction.

mod simplex;

use serde::{Deserialize, Serialize};

pub use simplex::{phase_one, PhaseOne};

use crate::error::{Error, Result};
use crate::protocols::{analytic_joint2, analytic_joint3, marginalize, TimePair};
use crate::qcore::Spin;
use crate::table::{ProbTable, MASS_TOL};

/// Residual tolerance for the equality constraints.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Gaps up to this multiple of the tolerance are reported as borderline.
pub const BORDERLINE_FACTOR: f64 = 10.0;
const CONSISTENCY_TOL: f64 = 1e-9;

/// Pairwise tables `P(q₁,q₂)`, `P(q₂,q₃)`, `P(q₁,q₃)` with consistent
/// single-time marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSet {
    d: usize,
    p12: ProbTable,
    p23: ProbTable,
    p13: ProbTable,
}

impl MarginalSet {
    pub fn new(p12: ProbTable, p23: ProbTable, p13: ProbTable) -> Result<Self> {
        let d = p12.outcome_dim();
        for t in [&p12, &p23, &p13] {
            if t.arity() != 2 {
                return Err(Error::WrongArity {
                    expected: 2,
                    actual: t.arity(),
                });
            }
            if t.outcome_dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: t.outcome_dim(),
                });
            }
            if (t.sum() - 1.0).abs() > MASS_TOL {
                return Err(Error::MassMismatch {
                    expected: 1.0,
                    actual: t.sum(),
                });
            }
        }
        // each time appears in two tables; both must agree on its marginal
        let checks = [
            (p12.marginal(&[0])?, p13.marginal(&[0])?),
            (p12.marginal(&[1])?, p23.marginal(&[0])?),
            (p23.marginal(&[1])?, p13.marginal(&[1])?),
        ];
        let worst = checks.iter().map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
        if worst > CONSISTENCY_TOL {
            return Err(Error::InconsistentMarginals(worst));
        }
        Ok(Self { d, p12, p23, p13 })
    }

    /// Quantum two-time tables for equal steps: `θ` between adjacent
    /// measurements and `2θ` between the first and the last.
    pub fn quantum(spin: Spin, step: f64) -> Result<Self> {
        let adjacent = analytic_joint2(spin, step)?;
        Self::new(adjacent.clone(), adjacent, analytic_joint2(spin, 2.0 * step)?)
    }

    /// The three pairwise marginals of a three-time table.
    pub fn from_three_time(table: &ProbTable) -> Result<Self> {
        Self::new(
            marginalize(table, TimePair::OneTwo)?,
            marginalize(table, TimePair::TwoThree)?,
            marginalize(table, TimePair::OneThree)?,
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn table(&self, pair: TimePair) -> &ProbTable {
        match pair {
            TimePair::OneTwo => &self.p12,
            TimePair::TwoThree => &self.p23,
            TimePair::OneThree => &self.p13,
        }
    }

    /// Equality system `A x = b` over the `d³` grand-distribution entries
    /// `x[q₁ d² + q₂ d + q₃]`: normalization followed by the pairwise
    /// marginalization constraints.
    pub fn constraints(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let d = self.d;
        let n = d * d * d;
        let var = |q1: usize, q2: usize, q3: usize| q1 * d * d + q2 * d + q3;
        let mut a = vec![vec![1.0; n]];
        let mut b = vec![1.0];
        for pair in TimePair::ALL {
            let table = self.table(pair);
            for u in 0..d {
                for v in 0..d {
                    let mut row = vec![0.0; n];
                    for w in 0..d {
                        let k = match pair {
                            TimePair::OneTwo => var(u, v, w),
                            TimePair::TwoThree => var(w, u, v),
                            TimePair::OneThree => var(u, w, v),
                        };
                        row[k] = 1.0;
                    }
                    a.push(row);
                    b.push(table.get(&[u, v]));
                }
            }
        }
        (a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Feasible,
    /// Residual gap above tolerance but within the borderline band.
    FeasibleWithWarning,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub verdict: Verdict,
    /// A grand distribution reproducing all three marginals, when feasible.
    pub witness: Option<ProbTable>,
    /// Largest constraint residual at the best phase-1 point.
    pub gap: f64,
}

impl FeasibilityResult {
    pub fn feasible(&self) -> bool {
        self.verdict != Verdict::Infeasible
    }
}

/// Decides whether a legitimate grand distribution exists for `m`.
pub fn grand_feasibility(m: &MarginalSet) -> Result<FeasibilityResult> {
    let (a, b) = m.constraints();
    let sol = phase_one(&a, &b);
    let gap = a
        .iter()
        .zip(&b)
        .map(|(row, &bi)| (row.iter().zip(&sol.x).map(|(r, x)| r * x).sum::<f64>() - bi).abs())
        .fold(0.0, f64::max);
    let verdict = if gap <= FEASIBILITY_TOL {
        Verdict::Feasible
    } else if gap <= BORDERLINE_FACTOR * FEASIBILITY_TOL {
        Verdict::FeasibleWithWarning
    } else {
        Verdict::Infeasible
    };
    let witness = if verdict == Verdict::Infeasible {
        None
    } else {
        let x: Vec<f64> = sol.x.iter().map(|&v| v.max(0.0)).collect();
        let mass = x.iter().sum();
        Some(ProbTable::with_mass(3, m.d, x, mass)?)
    };
    Ok(FeasibilityResult { verdict, witness, gap })
}

/// A classical chain started from the uniform distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovBaseline {
    /// Joint distribution over `n_steps + 1` times.
    pub table: ProbTable,
    /// Pairwise marginals, present for three-time chains.
    pub marginals: Option<MarginalSet>,
}

pub fn markov_baseline(transition: &[Vec<f64>], n_steps: usize) -> Result<MarkovBaseline> {
    let d = transition.len();
    if d == 0 || n_steps == 0 {
        return Err(Error::InvalidArgument(
            "need a nonempty chain with at least one step".into(),
        ));
    }
    for (i, row) in transition.iter().enumerate() {
        if row.len() != d {
            return Err(Error::NotStochastic(format!(
                "row {i} has {} entries, expected {d}",
                row.len()
            )));
        }
        if row.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::NotStochastic(format!(
                "row {i} has a negative or non-finite entry"
            )));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::NotStochastic(format!("row {i} sums to {s}")));
        }
    }
    // append one time index per step; the newest index varies fastest
    let mut values = vec![1.0 / d as f64; d];
    for _ in 0..n_steps {
        let mut next = Vec::with_capacity(values.len() * d);
        for (flat, &p) in values.iter().enumerate() {
            next.extend(transition[flat % d].iter().map(|&t| p * t));
        }
        values = next;
    }
    let table = ProbTable::new(n_steps + 1, d, values)?;
    let marginals = if n_steps == 2 {
        Some(MarginalSet::from_three_time(&table)?)
    } else {
        None
    };
    Ok(MarkovBaseline { table, marginals })
}

/// `P'(0₁,0₃) - P(0₁,0₃)` for equal steps `θ`: the (1,3) marginal of the
/// three-time table against the direct two-time table at `2θ`.
pub fn mismatch_curve(theta_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    theta_grid
        .iter()
        .map(|&theta| {
            let three = analytic_joint3(Spin::HALF, 0.0, theta, 2.0 * theta)?;
            let marginal = marginalize(&three, TimePair::OneThree)?;
            let direct = analytic_joint2(Spin::HALF, 2.0 * theta)?;
            Ok((theta, marginal.get(&[0, 0]) - direct.get(&[0, 0])))
        })
        .collect()
}
