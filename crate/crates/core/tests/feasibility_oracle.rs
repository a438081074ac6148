//! Grand-distribution verdicts checked against exhaustive enumeration of
//! basic solutions of the 8-variable binary polytope.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

use elgi_core::macrorealism::{grand_feasibility, markov_baseline, MarginalSet};
use elgi_core::protocols::{analytic_joint2, TimePair};
use elgi_core::{ProbTable, Spin};

const TOL: f64 = 1e-9;

/// Rows of `A x = b` for binary q₁,q₂,q₃, built directly from the tables.
fn system(p12: &ProbTable, p23: &ProbTable, p13: &ProbTable) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    a.push(vec![1.0; 8]);
    b.push(1.0);
    for u in 0..2 {
        for v in 0..2 {
            let mut r12 = vec![0.0; 8];
            let mut r23 = vec![0.0; 8];
            let mut r13 = vec![0.0; 8];
            for w in 0..2 {
                r12[4 * u + 2 * v + w] = 1.0;
                r23[4 * w + 2 * u + v] = 1.0;
                r13[4 * u + 2 * w + v] = 1.0;
            }
            a.extend([r12, r23, r13]);
            b.extend([p12.get(&[u, v]), p23.get(&[u, v]), p13.get(&[u, v])]);
        }
    }
    (a, b)
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        let pivot = m[col].clone();
        for r in 0..n {
            if r != col {
                let f = m[r][col] / pivot[col];
                for (x, p) in m[r][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * p;
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Indices of a maximal set of linearly independent rows.
fn independent_rows(a: &[Vec<f64>]) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut keep = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut r = row.clone();
        for bvec in &basis {
            let lead = bvec.iter().position(|x| x.abs() > 1e-12).unwrap();
            let f = r[lead] / bvec[lead];
            for (x, y) in r.iter_mut().zip(bvec) {
                *x -= f * y;
            }
        }
        if r.iter().any(|x| x.abs() > 1e-9) {
            basis.push(r);
            keep.push(i);
        }
    }
    keep
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Feasible iff some basic solution is nonnegative and satisfies every row.
fn vertex_enumeration_feasible(p12: &ProbTable, p23: &ProbTable, p13: &ProbTable) -> bool {
    let (a, b) = system(p12, p23, p13);
    let rows = independent_rows(&a);
    let rank = rows.len();
    for cols in combinations(8, rank) {
        let m: Vec<Vec<f64>> = rows.iter().map(|&r| cols.iter().map(|&c| a[r][c]).collect()).collect();
        let rhs: Vec<f64> = rows.iter().map(|&r| b[r]).collect();
        let Some(xs) = solve(m, rhs) else { continue };
        if xs.iter().any(|&v| v < -TOL) {
            continue;
        }
        let mut x = vec![0.0; 8];
        for (&c, &v) in cols.iter().zip(&xs) {
            x[c] = v;
        }
        let resid = a
            .iter()
            .zip(&b)
            .map(|(row, bi)| (row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - bi).abs())
            .fold(0.0, f64::max);
        if resid <= TOL {
            return true;
        }
    }
    false
}

fn check(m: &MarginalSet) -> bool {
    let oracle = vertex_enumeration_feasible(
        m.table(TimePair::OneTwo),
        m.table(TimePair::TwoThree),
        m.table(TimePair::OneThree),
    );
    let lp = grand_feasibility(m).unwrap();
    assert_eq!(lp.feasible(), oracle, "LP verdict {:?} vs oracle {oracle}", lp.verdict);
    if let Some(w) = lp.witness {
        assert!(w.values().iter().all(|&v| v >= -1e-9));
        let back = MarginalSet::from_three_time(&ProbTable::new(3, 2, w.values().to_vec()).unwrap()).unwrap();
        for pair in TimePair::ALL {
            assert!(back.table(pair).max_abs_diff(m.table(pair)) < 1e-7);
        }
    }
    oracle
}

#[test]
fn rank_of_binary_system_is_seven() {
    let u = ProbTable::uniform(2, 2).unwrap();
    let (a, _) = system(&u, &u, &u);
    assert_eq!(independent_rows(&a).len(), 7);
}

#[test]
fn small_step_quantum_is_infeasible() {
    assert!(!check(&MarginalSet::quantum(Spin::HALF, FRAC_PI_8).unwrap()));
}

#[test]
fn right_angle_quantum_is_feasible() {
    assert!(check(&MarginalSet::quantum(Spin::HALF, FRAC_PI_2).unwrap()));
    assert!(check(&MarginalSet::quantum(Spin::HALF, PI).unwrap()));
    assert!(check(&MarginalSet::quantum(Spin::HALF, 0.0).unwrap()));
}

#[test]
fn verdicts_agree_on_equal_step_grid() {
    for k in 0..50 {
        let theta = 0.05 + (FRAC_PI_2 - 0.1) * k as f64 / 49.0;
        assert!(
            !check(&MarginalSet::quantum(Spin::HALF, theta).unwrap()),
            "theta = {theta}"
        );
    }
    // beyond π/2 the adjacent flips dominate and a grand distribution exists
    for k in 1..20 {
        let theta = FRAC_PI_2 + (PI / 2.0) * k as f64 / 20.0;
        check(&MarginalSet::quantum(Spin::HALF, theta).unwrap());
    }
}

#[test]
fn verdicts_agree_on_unequal_steps_and_classical_chains() {
    for i in 0..12 {
        for j in 0..12 {
            let (t1, t2) = (0.27 * i as f64, 0.27 * j as f64);
            let p12 = analytic_joint2(Spin::HALF, t1).unwrap();
            let p23 = analytic_joint2(Spin::HALF, t2).unwrap();
            let p13 = analytic_joint2(Spin::HALF, t1 + t2).unwrap();
            check(&MarginalSet::new(p12, p23, p13).unwrap());
        }
    }
    for k in 0..30 {
        let a = (k as f64 * 0.137).fract();
        let b = (k as f64 * 0.291 + 0.3).fract();
        let chain = markov_baseline(&[vec![a, 1.0 - a], vec![b, 1.0 - b]], 2).unwrap();
        assert!(check(chain.marginals.as_ref().unwrap()));
    }
}
