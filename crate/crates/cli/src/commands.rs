//! One function per subcommand, each producing a table and a plot.

use elgi_core::entropy::info_deficit;
use elgi_core::macrorealism::{grand_feasibility, MarginalSet, Verdict};
use elgi_core::protocols::{joint2, joint3, marginalize, ProtocolConfig, TimePair};
use elgi_core::sampling::{apply_readout_noise, estimate_deficit, rep_rng, sample_table, sigma_violation};
use elgi_core::ProbTable;

use crate::emit::{Cell, Table};
use crate::plot::{Plot, Series, Style};
use crate::{CliError, CommandKind, Result, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub plot: Plot,
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        CommandKind::Probabilities => probabilities(cfg),
        CommandKind::Deficit => deficit(cfg),
        CommandKind::Sweep => sweep(cfg),
        CommandKind::Joint3 => joint_three(cfg),
        CommandKind::Feasibility => feasibility(cfg),
        CommandKind::Sample => sample(cfg),
    }
}

/// Column suffix for a tuple of outcomes: `01` for qubits, `0_1` once an
/// outcome can need two digits.
fn outcome_label(outcomes: &[usize], d: usize) -> String {
    let parts: Vec<String> = outcomes.iter().map(usize::to_string).collect();
    parts.join(if d > 10 { "_" } else { "" })
}

fn labels(table: &ProbTable) -> Vec<String> {
    (0..table.len())
        .map(|k| outcome_label(&table.outcomes_of(k), table.outcome_dim()))
        .collect()
}

fn nums(values: &[f64]) -> impl Iterator<Item = Cell> + '_ {
    values.iter().map(|&v| Cell::Num(v))
}

fn equal_steps(cfg: &RunConfig, step: f64) -> Result<ProtocolConfig> {
    Ok(ProtocolConfig::new(cfg.s, vec![0.0, step, 2.0 * step], cfg.mode)?)
}

fn probabilities(cfg: &RunConfig) -> Result<Report> {
    let shots = cfg.shot_config()?;
    let mut table = Table::default();
    let mut analytic: Vec<Vec<f64>> = Vec::new();
    let mut sampled: Vec<Vec<f64>> = Vec::new();
    for (idx, &theta) in cfg.theta_grid.iter().enumerate() {
        let p = joint2(&ProtocolConfig::new(cfg.s, vec![0.0, theta], cfg.mode)?, 0, 1)?;
        if table.columns.is_empty() {
            let names = labels(&p);
            table.columns.push("theta".into());
            table.columns.extend(names.iter().map(|l| format!("P{l}")));
            if shots.is_some() {
                table.columns.extend(names.iter().map(|l| format!("S{l}")));
            }
        }
        let mut row: Vec<Cell> = vec![Cell::Num(theta)];
        row.extend(nums(p.values()));
        if let Some(sc) = shots {
            // mean frequencies over the repetitions, each on its own stream
            let noisy = apply_readout_noise(&p, sc.readout_flip)?;
            let mut mean = vec![0.0; p.len()];
            for rep in 0..sc.reps {
                let stream = (idx * sc.reps + rep) as u64;
                let s = sample_table(&noisy, sc.shots, &mut rep_rng(sc.seed, stream))?;
                for (m, v) in mean.iter_mut().zip(s.values()) {
                    *m += v / sc.reps as f64;
                }
            }
            row.extend(nums(&mean));
            sampled.push(mean);
        }
        analytic.push(p.values().to_vec());
        table.push(row);
    }

    let names: Vec<String> = table.columns[1..=analytic[0].len()].to_vec();
    let mut plot = Plot::new(
        format!("Two-time joint probabilities, s = {}, {} mode", cfg.s, cfg.mode),
        "theta (rad)",
        "probability",
    );
    for (k, name) in names.iter().enumerate() {
        let ys: Vec<f64> = analytic.iter().map(|v| v[k]).collect();
        plot = plot.series(Series::new(name.as_str(), &cfg.theta_grid, &ys, Style::Line));
    }
    if !sampled.is_empty() {
        for (k, name) in names.iter().enumerate() {
            let ys: Vec<f64> = sampled.iter().map(|v| v[k]).collect();
            plot = plot.series(Series::new(
                format!("{name} sampled"),
                &cfg.theta_grid,
                &ys,
                Style::Markers,
            ));
        }
    }
    Ok(Report { table, plot })
}

fn deficit(cfg: &RunConfig) -> Result<Report> {
    let mut table = Table::new(
        ["theta", "h_step", "h_total", "deficit", "violated"]
            .map(String::from)
            .to_vec(),
    );
    for &theta in &cfg.theta_grid {
        let r = info_deficit(cfg.n, cfg.s, theta, cfg.mode)?;
        table.push(vec![
            Cell::Num(theta),
            Cell::Num(r.h_step.0),
            Cell::Num(r.h_total.0),
            Cell::Num(r.deficit),
            Cell::Bool(r.violated),
        ]);
    }
    let col = |name: &str| table.numbers(name).expect("column exists");
    let plot = Plot::new(
        format!("Entropy terms, n = {}, s = {}", cfg.n, cfg.s),
        "theta (rad)",
        "bits",
    )
    .series(Series::new("H step", &cfg.theta_grid, &col("h_step"), Style::Line))
    .series(Series::new("H total", &cfg.theta_grid, &col("h_total"), Style::Line))
    .series(Series::new("deficit", &cfg.theta_grid, &col("deficit"), Style::Line))
    .hline(0.0, "D = 0");
    Ok(Report { table, plot })
}

fn sweep(cfg: &RunConfig) -> Result<Report> {
    let shots = cfg.shot_config()?;
    if shots.is_some() && cfg.n != 3 {
        return Err(CliError::Usage(format!(
            "sampled sweeps support n = 3 only, got n = {}",
            cfg.n
        )));
    }
    let mut columns = vec!["theta", "deficit", "violated"];
    if shots.is_some() {
        columns.extend(["mean", "std", "sigma"]);
    }
    let mut table = Table::new(columns.into_iter().map(String::from).collect());
    for &theta in &cfg.theta_grid {
        let r = info_deficit(cfg.n, cfg.s, theta, cfg.mode)?;
        let mut row = vec![Cell::Num(theta), Cell::Num(r.deficit), Cell::Bool(r.violated)];
        if let Some(sc) = &shots {
            let e = estimate_deficit(cfg.s, theta, sc, cfg.mode)?;
            row.extend([
                Cell::Num(e.mean),
                Cell::Num(e.std),
                Cell::Num(sigma_violation(&e).value()),
            ]);
        }
        table.push(row);
    }

    let deficits = table.numbers("deficit").expect("column exists");
    let mut plot = Plot::new(
        format!("Information deficit D{}, s = {}, {} mode", cfg.n, cfg.s, cfg.mode),
        "theta (rad)",
        format!("D{}", cfg.n),
    )
    .series(Series::new("theory", &cfg.theta_grid, &deficits, Style::Line))
    .hline(0.0, "D = 0");
    if shots.is_some() {
        let mean = table.numbers("mean").expect("column exists");
        let std = table.numbers("std").expect("column exists");
        plot = plot.series(Series::new("sampled", &cfg.theta_grid, &mean, Style::Markers).with_errors(std));
    }
    Ok(Report { table, plot })
}

fn joint_three(cfg: &RunConfig) -> Result<Report> {
    let mut table = Table::default();
    let mut direct13: Vec<Vec<f64>> = Vec::new();
    let mut marginal13: Vec<Vec<f64>> = Vec::new();
    for &theta in &cfg.theta_grid {
        let pc = equal_steps(cfg, theta)?;
        let three = joint3(&pc)?;
        let mut pairs = Vec::new();
        for pair in TimePair::ALL {
            let [i, j] = pair.indices();
            pairs.push((pair, joint2(&pc, i, j)?, marginalize(&three, pair)?));
        }
        if table.columns.is_empty() {
            table.columns.push("theta".into());
            table.columns.extend(labels(&three).iter().map(|l| format!("P{l}")));
            for (pair, direct, _) in &pairs {
                let names = labels(direct);
                table
                    .columns
                    .extend(names.iter().map(|l| format!("P{}_{l}", pair.label())));
                table
                    .columns
                    .extend(names.iter().map(|l| format!("Pp{}_{l}", pair.label())));
            }
        }
        let mut row = vec![Cell::Num(theta)];
        row.extend(nums(three.values()));
        for (pair, direct, marginal) in &pairs {
            row.extend(nums(direct.values()));
            row.extend(nums(marginal.values()));
            if *pair == TimePair::OneThree {
                direct13.push(direct.values().to_vec());
                marginal13.push(marginal.values().to_vec());
            }
        }
        table.push(row);
    }

    let d = cfg.s.dim();
    let mut plot = Plot::new(
        format!(
            "P(q1, q3) measured directly vs marginal of the three-time table, s = {}",
            cfg.s
        ),
        "step theta (rad)",
        "probability",
    );
    for k in 0..d * d {
        let label = outcome_label(&[k / d, k % d], d);
        let ys: Vec<f64> = direct13.iter().map(|v| v[k]).collect();
        plot = plot.series(Series::new(format!("P13 {label}"), &cfg.theta_grid, &ys, Style::Line));
        let ys: Vec<f64> = marginal13.iter().map(|v| v[k]).collect();
        plot = plot.series(Series::new(
            format!("P'13 {label}"),
            &cfg.theta_grid,
            &ys,
            Style::Dashed,
        ));
    }
    Ok(Report { table, plot })
}

fn feasibility(cfg: &RunConfig) -> Result<Report> {
    let mut table = Table::new(["theta", "feasible", "borderline", "gap"].map(String::from).to_vec());
    for &theta in &cfg.theta_grid {
        let pc = equal_steps(cfg, theta)?;
        let set = MarginalSet::new(joint2(&pc, 0, 1)?, joint2(&pc, 1, 2)?, joint2(&pc, 0, 2)?)?;
        let r = grand_feasibility(&set)?;
        table.push(vec![
            Cell::Num(theta),
            Cell::Bool(r.feasible()),
            Cell::Bool(r.verdict == Verdict::FeasibleWithWarning),
            Cell::Num(r.gap),
        ]);
    }
    let plot = Plot::new(
        format!("Grand distribution for equal-step marginals, s = {}", cfg.s),
        "step theta (rad)",
        "value",
    )
    .series(Series::new(
        "feasible",
        &cfg.theta_grid,
        &table.numbers("feasible").expect("column exists"),
        Style::Markers,
    ))
    .series(Series::new(
        "residual gap",
        &cfg.theta_grid,
        &table.numbers("gap").expect("column exists"),
        Style::Line,
    ));
    Ok(Report { table, plot })
}

fn sample(cfg: &RunConfig) -> Result<Report> {
    let sc = cfg.shot_config()?.expect("sample always has shots");
    let mut table = Table::new(["theta", "mean", "std", "reps", "sigma"].map(String::from).to_vec());
    for &theta in &cfg.theta_grid {
        let e = estimate_deficit(cfg.s, theta, &sc, cfg.mode)?;
        table.push(vec![
            Cell::Num(theta),
            Cell::Num(e.mean),
            Cell::Num(e.std),
            Cell::Int(e.reps as u64),
            Cell::Num(sigma_violation(&e).value()),
        ]);
    }
    let mean = table.numbers("mean").expect("column exists");
    let std = table.numbers("std").expect("column exists");
    let plot = Plot::new(
        format!("Sampled D3, {} shots x {} reps, {} mode", sc.shots, sc.reps, cfg.mode),
        "theta (rad)",
        "D3",
    )
    .series(Series::new("mean +/- std", &cfg.theta_grid, &mean, Style::Markers).with_errors(std))
    .hline(0.0, "D = 0");
    Ok(Report { table, plot })
}
