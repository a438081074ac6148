//! End-to-end acceptance checks, one per criterion, each with its runtime
//! budget. Run with `--nocapture` to see the per-criterion report.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use elgi_core::entropy::{bc_chain_check, info_deficit};
use elgi_core::macrorealism::{grand_feasibility, MarginalSet};
use elgi_core::protocols::{
    analytic_joint2, analytic_joint3, encode_check, joint2, joint3, marginalize, MeasurementMode, ProtocolConfig,
    TimePair,
};
use elgi_core::qcore::{ComplexMatrix, DensityMatrix, C64};
use elgi_core::sampling::rep_rng;
use elgi_core::{ProbTable, Spin};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
        .collect()
}

fn elgi(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_elgi"))
        .args(args)
        .env_remove("ELGI_SEED")
        .output()
        .map_err(|e| format!("cannot launch elgi: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "elgi {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn csv_rows(text: &str) -> Vec<HashMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap_or_default().split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn field(row: &HashMap<String, String>, name: &str) -> Result<f64, String> {
    row.get(name)
        .ok_or_else(|| format!("missing column {name}"))?
        .parse()
        .map_err(|e| format!("column {name}: {e}"))
}

const CIRCUITS: [MeasurementMode; 3] = [MeasurementMode::Cnot, MeasurementMode::AntiCnot, MeasurementMode::Inrm];

fn maximum_violation() -> Check {
    let csv = elgi(&[
        "deficit",
        "--n",
        "3",
        "--s",
        "0.5",
        "--theta",
        "0.7853981634",
        "--mode",
        "analytic",
    ])?;
    let rows = csv_rows(&csv);
    ensure(rows.len() == 1, || format!("expected one row, got {}", rows.len()))?;
    let d = field(&rows[0], "deficit")?;
    ensure((d + 0.134).abs() <= 0.001, || format!("D3 = {d}"))?;
    Ok(format!("D3(pi/4) = {d:.6}"))
}

fn two_time_probabilities() -> Check {
    let grid = linspace(0.0, 2.0 * PI, 100);
    let mut worst_analytic: f64 = 0.0;
    let mut worst_circuit: f64 = 0.0;
    for &theta in &grid {
        let want = (theta / 2.0).cos().powi(2) / 2.0;
        let analytic = analytic_joint2(Spin::HALF, theta).map_err(|e| e.to_string())?;
        worst_analytic = worst_analytic.max((analytic.get(&[0, 0]) - want).abs());
        for mode in CIRCUITS {
            let cfg = ProtocolConfig::new(Spin::HALF, vec![0.0, theta], mode).map_err(|e| e.to_string())?;
            let t = joint2(&cfg, 0, 1).map_err(|e| e.to_string())?;
            worst_circuit = worst_circuit
                .max((t.get(&[0, 0]) - want).abs())
                .max(t.max_abs_diff(&analytic));
        }
    }
    ensure(worst_analytic <= 1e-10, || {
        format!("analytic P(0,0) off by {worst_analytic:e}")
    })?;
    ensure(worst_circuit <= 1e-9, || {
        format!("circuit tables off by {worst_circuit:e}")
    })?;
    Ok(format!(
        "max error analytic {worst_analytic:.1e}, circuits {worst_circuit:.1e}"
    ))
}

fn d3(theta: f64) -> Result<f64, String> {
    info_deficit(3, Spin::HALF, theta, MeasurementMode::Analytic)
        .map(|r| r.deficit)
        .map_err(|e| e.to_string())
}

fn deficit_shape() -> Check {
    for theta in [FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8] {
        let d = d3(theta)?;
        ensure(d < 0.0, || format!("D3({theta}) = {d} is not negative"))?;
    }
    for theta in [3.0 * FRAC_PI_4, PI] {
        let d = d3(theta)?;
        ensure(d > 0.0, || format!("D3({theta}) = {d} is not positive"))?;
    }
    let d0 = d3(0.0)?;
    ensure(d0.abs() <= 1e-9, || format!("D3(0) = {d0}"))?;
    let grid = linspace(0.0, PI, 2000);
    let mut best = (f64::INFINITY, 0.0);
    for &theta in &grid {
        let d = d3(theta)?;
        if d < best.0 {
            best = (d, theta);
        }
    }
    ensure((best.1 - FRAC_PI_4).abs() <= 0.02, || format!("minimum at {}", best.1))?;
    Ok(format!("minimum {:.6} at theta = {:.5}", best.0, best.1))
}

fn marginal_mismatch() -> Check {
    let mut worst_adjacent: f64 = 0.0;
    for mode in MeasurementMode::ALL {
        let cfg = ProtocolConfig::new(Spin::HALF, vec![0.0, FRAC_PI_4, FRAC_PI_2], mode).map_err(|e| e.to_string())?;
        let three = joint3(&cfg).map_err(|e| e.to_string())?;
        for (pair, (i, j)) in [(TimePair::OneTwo, (0, 1)), (TimePair::TwoThree, (1, 2))] {
            let m = marginalize(&three, pair).map_err(|e| e.to_string())?;
            let direct = joint2(&cfg, i, j).map_err(|e| e.to_string())?;
            worst_adjacent = worst_adjacent.max(m.max_abs_diff(&direct));
        }
        let p13 = marginalize(&three, TimePair::OneThree).map_err(|e| e.to_string())?;
        let direct = joint2(&cfg, 0, 2).map_err(|e| e.to_string())?;
        let gap = p13.get(&[0, 0]) - direct.get(&[0, 0]);
        ensure((gap - 0.125).abs() <= 1e-9, || {
            format!("{mode}: P'(0,0) - P(0,0) = {gap}")
        })?;
    }
    ensure(worst_adjacent <= 1e-9, || {
        format!("adjacent marginals off by {worst_adjacent:e}")
    })?;
    let mut worst_curve: f64 = 0.0;
    for theta in linspace(0.0, PI, 50) {
        let three = analytic_joint3(Spin::HALF, 0.0, theta, 2.0 * theta).map_err(|e| e.to_string())?;
        let p13 = marginalize(&three, TimePair::OneThree).map_err(|e| e.to_string())?;
        let direct = analytic_joint2(Spin::HALF, 2.0 * theta).map_err(|e| e.to_string())?;
        let gap = p13.get(&[0, 0]) - direct.get(&[0, 0]);
        worst_curve = worst_curve.max((gap - theta.sin().powi(2) / 4.0).abs());
    }
    ensure(worst_curve <= 1e-9, || format!("mismatch curve off by {worst_curve:e}"))?;
    Ok(format!("adjacent {worst_adjacent:.1e}, curve {worst_curve:.1e}"))
}

/// Exhaustive search over basic solutions of the binary grand-distribution
/// system, independent of the LP code path.
mod vertex {
    use elgi_core::ProbTable;

    const TOL: f64 = 1e-9;

    fn system(p12: &ProbTable, p23: &ProbTable, p13: &ProbTable) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut a = vec![vec![1.0; 8]];
        let mut b = vec![1.0];
        for u in 0..2 {
            for v in 0..2 {
                let mut rows = [vec![0.0; 8], vec![0.0; 8], vec![0.0; 8]];
                for w in 0..2 {
                    rows[0][4 * u + 2 * v + w] = 1.0;
                    rows[1][4 * w + 2 * u + v] = 1.0;
                    rows[2][4 * u + 2 * w + v] = 1.0;
                }
                a.extend(rows);
                b.extend([p12.get(&[u, v]), p23.get(&[u, v]), p13.get(&[u, v])]);
            }
        }
        (a, b)
    }

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

    pub fn feasible(p12: &ProbTable, p23: &ProbTable, p13: &ProbTable) -> bool {
        let (a, b) = system(p12, p23, p13);
        let rows = independent_rows(&a);
        combinations(8, rows.len()).into_iter().any(|cols| {
            let m = rows.iter().map(|&r| cols.iter().map(|&c| a[r][c]).collect()).collect();
            let rhs = rows.iter().map(|&r| b[r]).collect();
            let Some(xs) = solve(m, rhs) else { return false };
            if xs.iter().any(|&v| v < -TOL) {
                return false;
            }
            let mut x = [0.0; 8];
            for (&c, &v) in cols.iter().zip(&xs) {
                x[c] = v;
            }
            a.iter()
                .zip(&b)
                .all(|(row, bi)| (row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - bi).abs() <= TOL)
        })
    }
}

fn lp_and_oracle(theta: f64) -> Result<(bool, bool), String> {
    let set = MarginalSet::quantum(Spin::HALF, theta).map_err(|e| e.to_string())?;
    let lp = grand_feasibility(&set).map_err(|e| e.to_string())?.feasible();
    let oracle = vertex::feasible(
        set.table(TimePair::OneTwo),
        set.table(TimePair::TwoThree),
        set.table(TimePair::OneThree),
    );
    Ok((lp, oracle))
}

fn grand_illegitimacy() -> Check {
    for theta in linspace(0.05, FRAC_PI_2 - 0.05, 50) {
        let (lp, oracle) = lp_and_oracle(theta)?;
        ensure(!lp, || format!("LP reports feasible at {theta}"))?;
        ensure(lp == oracle, || format!("LP and vertex oracle disagree at {theta}"))?;
    }
    for theta in [FRAC_PI_2, 0.0] {
        let (lp, oracle) = lp_and_oracle(theta)?;
        ensure(lp, || format!("LP reports infeasible at {theta}"))?;
        ensure(lp == oracle, || format!("LP and vertex oracle disagree at {theta}"))?;
    }
    Ok("50/50 infeasible, feasible at 0 and pi/2, oracle agrees on all 52".into())
}

const SAMPLE_ARGS: [&str; 9] = [
    "sample",
    "--theta",
    "0.7853981634",
    "--shots",
    "4096",
    "--reps",
    "10",
    "--readout-flip",
    "0",
];

fn statistical_violation() -> Check {
    let mut summary = Vec::new();
    for mode in MeasurementMode::ALL {
        let mut args = SAMPLE_ARGS.to_vec();
        args.extend(["--mode", mode.as_str()]);
        let rows = csv_rows(&elgi(&args)?);
        let mean = field(&rows[0], "mean")?;
        let sigma = field(&rows[0], "sigma")?;
        ensure(sigma > 4.0, || format!("{mode}: sigma {sigma} <= 4 (mean {mean})"))?;
        ensure((mean + 0.134).abs() <= 0.02, || format!("{mode}: mean {mean}"))?;
        summary.push(format!("{mode} {mean:.4} ({sigma:.2} sigma)"));
    }
    Ok(summary.join(", "))
}

fn random_qubit(rng: &mut impl Rng) -> DensityMatrix {
    // uniform point in the Bloch ball
    let (x, y, z) = loop {
        let v: (f64, f64, f64) = (
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.0 * v.0 + v.1 * v.1 + v.2 * v.2 <= 1.0 {
            break v;
        }
    };
    let m = ComplexMatrix::from_vec(
        2,
        2,
        vec![
            C64::new((1.0 + z) / 2.0, 0.0),
            C64::new(x / 2.0, -y / 2.0),
            C64::new(x / 2.0, y / 2.0),
            C64::new((1.0 - z) / 2.0, 0.0),
        ],
    )
    .expect("2x2");
    DensityMatrix::new(m).expect("Bloch ball state")
}

fn encoding_lemma() -> Check {
    let mut rng = rep_rng(7, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rho = random_qubit(&mut rng);
        let anc = encode_check(&rho).map_err(|e| e.to_string())?;
        for k in 0..2 {
            worst = worst.max((anc.values()[k] - rho.matrix()[(k, k)].re).abs());
        }
    }
    ensure(worst <= 1e-10, || format!("ancilla diagonal off by {worst:e}"))?;
    Ok(format!("100 states, max error {worst:.1e}"))
}

fn legitimate(t: &ProbTable) -> bool {
    t.values().iter().all(|&v| v >= 0.0) && (t.sum() - 1.0).abs() <= 1e-9
}

fn spin_suite() -> Check {
    let mut minima = Vec::new();
    for spin in [Spin::HALF, Spin::new(1.0).unwrap(), Spin::new(1.5).unwrap()] {
        let grid = linspace(0.0, 2.0 * PI, 60);
        for &a in &grid {
            let two = analytic_joint2(spin, a).map_err(|e| e.to_string())?;
            ensure(legitimate(&two), || {
                format!("s = {spin}: two-time table at {a} is not a distribution")
            })?;
            let chain = bc_chain_check(&two).map_err(|e| e.to_string())?;
            ensure(chain.holds(), || {
                format!("s = {spin}: entropy chain fails at {a}: {chain:?}")
            })?;
            for &b in grid.iter().step_by(6) {
                let three = analytic_joint3(spin, 0.0, a, a + b).map_err(|e| e.to_string())?;
                ensure(legitimate(&three), || {
                    format!("s = {spin}: three-time table at ({a}, {b})")
                })?;
                for pair in TimePair::ALL {
                    let m = marginalize(&three, pair).map_err(|e| e.to_string())?;
                    ensure(legitimate(&m), || format!("s = {spin}: marginal {pair:?}"))?;
                    let chain = bc_chain_check(&m).map_err(|e| e.to_string())?;
                    ensure(chain.holds(), || {
                        format!("s = {spin}: chain fails for marginal {pair:?}")
                    })?;
                }
            }
        }
        let min = linspace(0.0, PI, 2000)
            .into_iter()
            .map(|t| info_deficit(3, spin, t, MeasurementMode::Analytic).map(|r| r.deficit))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        ensure(min < 0.0, || format!("s = {spin}: min D3 = {min}"))?;
        minima.push(format!("s={spin}: {min:.4}"));
    }
    Ok(format!("min D3 {}", minima.join(", ")))
}

fn determinism() -> Check {
    let first = elgi(&SAMPLE_ARGS)?;
    let second = elgi(&SAMPLE_ARGS)?;
    ensure(first == second, || "outputs differ".into())?;
    let seeded: Vec<&str> = SAMPLE_ARGS.iter().copied().chain(["--seed", "12345"]).collect();
    let a = elgi(&seeded)?;
    ensure(a == elgi(&seeded)?, || "explicitly seeded outputs differ".into())?;
    ensure(a != first, || "seed has no effect".into())?;
    Ok(format!("{} identical bytes", first.len()))
}

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Check);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        (1, "maximum violation", Some(Duration::from_secs(1)), maximum_violation),
        (
            2,
            "two-time probabilities",
            Some(Duration::from_secs(5)),
            two_time_probabilities,
        ),
        (3, "deficit curve shape", Some(Duration::from_secs(10)), deficit_shape),
        (4, "marginal mismatch", Some(Duration::from_secs(5)), marginal_mismatch),
        (
            5,
            "grand illegitimacy",
            Some(Duration::from_secs(10)),
            grand_illegitimacy,
        ),
        (
            6,
            "statistical violation",
            Some(Duration::from_secs(10)),
            statistical_violation,
        ),
        (7, "encoding lemma", Some(Duration::from_secs(1)), encoding_lemma),
        (8, "spin-s suite", Some(Duration::from_secs(10)), spin_suite),
        (9, "determinism", None, determinism),
    ];
    let mut failures = Vec::new();
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let verdict = match (&result, budget) {
            (Err(e), _) => Err(e.clone()),
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.2?}, budget {b:?}")),
            (Ok(detail), _) => Ok(detail.clone()),
        };
        match verdict {
            Ok(detail) => println!("[PASS] AC{id} {name}: {detail} ({elapsed:.2?})"),
            Err(e) => {
                println!("[FAIL] AC{id} {name}: {e} ({elapsed:.2?})");
                failures.push(id);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
