//! Dense phase-1 simplex for `A x = b, x ≥ 0`.

const PIVOT_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;

/// Outcome of minimizing the sum of artificial variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOne {
    /// Best point found for the structural variables.
    pub x: Vec<f64>,
    /// Sum of the artificial variables at the optimum.
    pub objective: f64,
    pub pivots: usize,
}

/// Phase 1 of the two-phase simplex method with Bland's anti-cycling rule.
///
/// One artificial variable is added per row (after flipping rows so that
/// `b ≥ 0`) and their sum is minimized. The problem is feasible iff the
/// optimum is zero.
pub fn phase_one(a: &[Vec<f64>], b: &[f64]) -> PhaseOne {
    let m = a.len();
    assert_eq!(m, b.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let rhs = width - 1;

    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), n, "ragged constraint matrix");
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut t = vec![0.0; width];
        for (j, &v) in row.iter().enumerate() {
            t[j] = sign * v;
        }
        t[n + i] = 1.0;
        t[rhs] = sign * b[i];
        tab.push(t);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // reduced costs of the phase-1 objective; last slot holds -objective
    let mut cost = vec![0.0; width];
    for row in &tab {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[rhs] -= row[rhs];
    }

    let mut pivots = 0;
    while pivots < MAX_PIVOTS {
        // Bland: lowest-index improving column
        let Some(enter) = (0..n + m).find(|&j| cost[j] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for (i, row) in tab.iter().enumerate() {
            if row[enter] > PIVOT_TOL {
                let ratio = row[rhs] / row[enter];
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - PIVOT_TOL || (ratio <= best + PIVOT_TOL && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        // phase 1 is bounded below by zero, so a pivot row always exists
        let Some(r) = leave else { break };

        let p = tab[r][enter];
        for v in tab[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != r {
                let f = row[enter];
                if f != 0.0 {
                    for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = cost[enter];
        for (v, &pv) in cost.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        basis[r] = enter;
        pivots += 1;
    }

    let mut x = vec![0.0; n];
    let mut objective = 0.0;
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = tab[i][rhs];
        } else {
            objective += tab[i][rhs];
        }
    }
    PhaseOne { x, objective, pivots }
}
