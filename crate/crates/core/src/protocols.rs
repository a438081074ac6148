//! Measurement protocols: single-event probabilities, two-time and
//! three-time joint probabilities from ancilla-assisted circuits, and their
//! closed-form counterparts.
//!
//! A measurement at rotation angle `θ` in the rotating basis
//! `U(θ) Π_α U(θ)†` is simulated by back-evolving with `U(θ)†`, acting in the
//! computational basis, and forward-evolving with `U(θ)`. The final forward
//! evolution is skipped since only probabilities are read out. Every readout
//! dephases once and then reads the diagonal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{dephase, diag_probabilities, rotation_unitary, ComplexMatrix, DensityMatrix, Spin};
use crate::table::ProbTable;

/// How the first (noninvasive) measurement of a joint probability is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementMode {
    /// CNOT coupling; both ancilla branches are read.
    Cnot,
    /// Anti-CNOT coupling (flips when the system is in `|0⟩`).
    #[serde(rename = "anticnot")]
    AntiCnot,
    /// Ideal negative-result measurement: only unflipped-ancilla branches
    /// from a CNOT run and an anti-CNOT run are kept.
    Inrm,
    /// Closed-form projective-collapse prediction; any spin.
    Analytic,
}

impl MeasurementMode {
    pub const ALL: [MeasurementMode; 4] = [Self::Cnot, Self::AntiCnot, Self::Inrm, Self::Analytic];

    pub fn is_circuit(self) -> bool {
        self != Self::Analytic
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Cnot => "cnot",
            Self::AntiCnot => "anticnot",
            Self::Inrm => "inrm",
            Self::Analytic => "analytic",
        }
    }
}

impl fmt::Display for MeasurementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasurementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "cnot" => Ok(Self::Cnot),
            "anticnot" => Ok(Self::AntiCnot),
            "inrm" => Ok(Self::Inrm),
            "analytic" => Ok(Self::Analytic),
            _ => Err(Error::InvalidArgument(format!("unknown measurement mode '{s}'"))),
        }
    }
}

/// Spin, measurement angles `θ_k = ω t_k`, and measurement mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    spin: Spin,
    angles: Vec<f64>,
    mode: MeasurementMode,
}

impl ProtocolConfig {
    /// Angles are listed in time order. They must be finite and monotone:
    /// non-decreasing for `ω ≥ 0`, non-increasing for `ω < 0`. Equal
    /// neighbours describe coincident measurement times.
    pub fn new(spin: Spin, angles: Vec<f64>, mode: MeasurementMode) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidAngles("no measurement angles".into()));
        }
        if let Some(bad) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidAngles(format!("non-finite angle {bad}")));
        }
        let rising = angles.windows(2).all(|w| w[1] >= w[0]);
        let falling = angles.windows(2).all(|w| w[1] <= w[0]);
        if !rising && !falling {
            return Err(Error::InvalidAngles(format!(
                "angles {angles:?} are not monotone in time"
            )));
        }
        Ok(Self { spin, angles, mode })
    }

    /// Equidistant angles `0, θ/(n-1), ..., θ` for `n` measurements.
    pub fn equidistant(spin: Spin, n: usize, total: f64, mode: MeasurementMode) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 measurements, got {n}")));
        }
        let step = total / (n - 1) as f64;
        let angles = (0..n).map(|k| step * k as f64).collect();
        Self::new(spin, angles, mode)
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn mode(&self) -> MeasurementMode {
        self.mode
    }

    fn angle(&self, k: usize) -> Result<f64> {
        self.angles.get(k).copied().ok_or_else(|| {
            Error::InvalidArgument(format!("time index {k} out of range for {} angles", self.angles.len()))
        })
    }
}

/// Which system value triggers the ancilla flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CnotPolarity {
    /// Standard CNOT: flip when the system is `|1⟩`.
    OnOne,
    /// Anti-CNOT: flip when the system is `|0⟩`.
    OnZero,
}

impl CnotPolarity {
    fn triggers(self, system_bit: usize) -> bool {
        match self {
            Self::OnOne => system_bit == 1,
            Self::OnZero => system_bit == 0,
        }
    }

    /// Outcome recorded by an ancilla that ends in `ancilla_bit`.
    fn decode(self, ancilla_bit: usize) -> usize {
        match self {
            Self::OnOne => ancilla_bit,
            Self::OnZero => 1 - ancilla_bit,
        }
    }

    /// Polarity whose unflipped ancilla certifies outcome `q`.
    fn unflipped_for(q: usize) -> Self {
        if q == 0 {
            Self::OnOne
        } else {
            Self::OnZero
        }
    }
}

/// Controlled flip on an `n`-qubit register (qubit 0 is most significant).
fn controlled_flip(n_qubits: usize, control: usize, target: usize, polarity: CnotPolarity) -> ComplexMatrix {
    let dim = 1 << n_qubits;
    let bit = |q: usize| n_qubits - 1 - q;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for src in 0..dim {
        let c = (src >> bit(control)) & 1;
        let dst = if polarity.triggers(c) {
            src ^ (1 << bit(target))
        } else {
            src
        };
        m[(dst, src)] = crate::qcore::C64::new(1.0, 0.0);
    }
    m
}

/// Two-qubit gate on (system, ancilla).
pub fn cnot(polarity: CnotPolarity) -> ComplexMatrix {
    controlled_flip(2, 0, 1, polarity)
}

fn require_qubit(spin: Spin) -> Result<()> {
    if spin.is_half() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "ancilla circuits are implemented for s = 1/2 only (got s = {spin})"
        )))
    }
}

fn spin_of_state(rho: &DensityMatrix) -> Result<Spin> {
    Spin::from_twice(rho.dim() as u32 - 1)
}

/// `U(θ) ⊗ 1` on a system followed by `ancillas` qubits.
fn on_system(u: &ComplexMatrix, ancillas: usize) -> ComplexMatrix {
    u.kron(&ComplexMatrix::identity(1 << ancillas))
}

/// Single-event probabilities of a measurement at angle `theta`.
pub fn sep_probabilities(rho_s: &DensityMatrix, theta: f64) -> Result<ProbTable> {
    let spin = spin_of_state(rho_s)?;
    let u = rotation_unitary(spin, theta)?;
    diag_probabilities(&dephase(&rho_s.evolve(&u.dagger())?))
}

/// Copies the system populations onto a fresh ancilla with a CNOT and reads
/// them back from the ancilla after tracing out the system.
pub fn encode_check(rho_s: &DensityMatrix) -> Result<ProbTable> {
    if rho_s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho_s.dim(),
        });
    }
    let joint = rho_s
        .tensor(&DensityMatrix::basis_state(2, 0))
        .evolve(&cnot(CnotPolarity::OnOne))?;
    let ancilla = crate::qcore::partial_trace(&joint, &[2, 2], &[1])?;
    diag_probabilities(&ancilla)
}

/// Diagonal over (system, ancilla) after the two-time circuit.
fn two_time_run(rho_s: &DensityMatrix, theta_i: f64, theta_j: f64, polarity: CnotPolarity) -> Result<ProbTable> {
    let ui = rotation_unitary(Spin::HALF, theta_i)?;
    let uj = rotation_unitary(Spin::HALF, theta_j)?;
    let state = rho_s
        .tensor(&DensityMatrix::basis_state(2, 0))
        .evolve(&on_system(&ui.dagger(), 1))?
        .evolve(&cnot(polarity))?
        .evolve(&on_system(&ui, 1))?
        .evolve(&on_system(&uj.dagger(), 1))?;
    diag_probabilities(&dephase(&state))
}

/// Two-time joint probabilities `P(q_i, q_j)` for an arbitrary qubit input
/// state, measured at angles `theta_i` then `theta_j`.
pub fn joint2_circuit_from_state(
    rho_s: &DensityMatrix,
    theta_i: f64,
    theta_j: f64,
    mode: MeasurementMode,
) -> Result<ProbTable> {
    if rho_s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho_s.dim(),
        });
    }
    // readout index = q_j * 2 + ancilla
    let mut values = vec![0.0; 4];
    match mode {
        MeasurementMode::Cnot | MeasurementMode::AntiCnot => {
            let polarity = if mode == MeasurementMode::Cnot {
                CnotPolarity::OnOne
            } else {
                CnotPolarity::OnZero
            };
            let d = two_time_run(rho_s, theta_i, theta_j, polarity)?;
            for qj in 0..2 {
                for anc in 0..2 {
                    values[polarity.decode(anc) * 2 + qj] = d.values()[qj * 2 + anc];
                }
            }
        }
        MeasurementMode::Inrm => {
            for qi in 0..2 {
                let polarity = CnotPolarity::unflipped_for(qi);
                let d = two_time_run(rho_s, theta_i, theta_j, polarity)?;
                for qj in 0..2 {
                    // flipped-ancilla branches are discarded
                    values[qi * 2 + qj] = d.values()[qj * 2];
                }
            }
        }
        MeasurementMode::Analytic => {
            return Err(Error::Unsupported("analytic mode has no circuit".into()));
        }
    }
    ProbTable::new(2, 2, values)
}

/// Two-time joint probabilities for measurements `i < j` of `config`, with
/// the system prepared maximally mixed and the ancilla in `|0⟩`.
pub fn joint2_circuit(config: &ProtocolConfig, i: usize, j: usize) -> Result<ProbTable> {
    require_qubit(config.spin)?;
    if i >= j {
        return Err(Error::InvalidArgument(format!("need i < j, got ({i}, {j})")));
    }
    joint2_circuit_from_state(
        &DensityMatrix::maximally_mixed(2),
        config.angle(i)?,
        config.angle(j)?,
        config.mode,
    )
}

/// Two-time joint probabilities through whichever path `config.mode` selects.
pub fn joint2(config: &ProtocolConfig, i: usize, j: usize) -> Result<ProbTable> {
    if config.mode == MeasurementMode::Analytic {
        if i >= j {
            return Err(Error::InvalidArgument(format!("need i < j, got ({i}, {j})")));
        }
        analytic_joint2(config.spin, config.angle(j)? - config.angle(i)?)
    } else {
        joint2_circuit(config, i, j)
    }
}

/// Diagonal over (system, ancilla 1, ancilla 2) after the three-time circuit.
fn three_time_run(rho_s: &DensityMatrix, angles: [f64; 3], polarity: [CnotPolarity; 2]) -> Result<ProbTable> {
    let u: Vec<ComplexMatrix> = angles
        .iter()
        .map(|&t| rotation_unitary(Spin::HALF, t))
        .collect::<Result<_>>()?;
    let ancillas = DensityMatrix::basis_state(4, 0);
    let state = rho_s
        .tensor(&ancillas)
        .evolve(&on_system(&u[0].dagger(), 2))?
        .evolve(&controlled_flip(3, 0, 1, polarity[0]))?
        .evolve(&on_system(&u[0], 2))?
        .evolve(&on_system(&u[1].dagger(), 2))?
        .evolve(&controlled_flip(3, 0, 2, polarity[1]))?
        .evolve(&on_system(&u[1], 2))?
        .evolve(&on_system(&u[2].dagger(), 2))?;
    diag_probabilities(&dephase(&state))
}

/// Three-time joint probabilities `P(q_1, q_2, q_3)` with the system
/// maximally mixed and both ancillas in `|0⟩`.
///
/// `Cnot` and `AntiCnot` use that gate for both couplings. `Inrm` assembles
/// each `(q_1, q_2)` block from the run whose gate polarities leave both
/// ancillas unflipped for those outcomes.
pub fn joint3_circuit(config: &ProtocolConfig) -> Result<ProbTable> {
    require_qubit(config.spin)?;
    let angles: [f64; 3] = config.angles.as_slice().try_into().map_err(|_| {
        Error::InvalidAngles(format!(
            "three-time protocol needs 3 angles, got {}",
            config.angles.len()
        ))
    })?;
    let rho_s = DensityMatrix::maximally_mixed(2);
    // readout index = q3 * 4 + a1 * 2 + a2
    let mut values = vec![0.0; 8];
    match config.mode {
        MeasurementMode::Cnot | MeasurementMode::AntiCnot => {
            let p = if config.mode == MeasurementMode::Cnot {
                CnotPolarity::OnOne
            } else {
                CnotPolarity::OnZero
            };
            let d = three_time_run(&rho_s, angles, [p, p])?;
            for (flat, &v) in d.values().iter().enumerate() {
                let (q3, a1, a2) = (flat >> 2, (flat >> 1) & 1, flat & 1);
                values[p.decode(a1) * 4 + p.decode(a2) * 2 + q3] = v;
            }
        }
        MeasurementMode::Inrm => {
            for q1 in 0..2 {
                for q2 in 0..2 {
                    let polarity = [CnotPolarity::unflipped_for(q1), CnotPolarity::unflipped_for(q2)];
                    let d = three_time_run(&rho_s, angles, polarity)?;
                    for q3 in 0..2 {
                        values[q1 * 4 + q2 * 2 + q3] = d.values()[q3 * 4];
                    }
                }
            }
        }
        MeasurementMode::Analytic => {
            return Err(Error::Unsupported("analytic mode has no circuit".into()));
        }
    }
    ProbTable::new(3, 2, values)
}

/// Three-time joint probabilities through whichever path `config.mode` selects.
pub fn joint3(config: &ProtocolConfig) -> Result<ProbTable> {
    if config.mode == MeasurementMode::Analytic {
        match *config.angles.as_slice() {
            [a, b, c] => analytic_joint3(config.spin, a, b, c),
            _ => Err(Error::InvalidAngles(format!(
                "three-time protocol needs 3 angles, got {}",
                config.angles.len()
            ))),
        }
    } else {
        joint3_circuit(config)
    }
}

/// `|⟨q'| U(θ) |q⟩|²` as a row-stochastic matrix indexed `[q][q']`.
fn transition_matrix(spin: Spin, theta: f64) -> Result<Vec<Vec<f64>>> {
    let u = rotation_unitary(spin, theta)?;
    let d = spin.dim();
    Ok((0..d)
        .map(|q| (0..d).map(|qn| u[(qn, q)].norm_sqr()).collect())
        .collect())
}

/// `P(m_i, m_j) = |⟨m_j| U(θ_ij) |m_i⟩|² / (2s+1)` for a maximally mixed
/// spin-s input.
pub fn analytic_joint2(spin: Spin, theta_ij: f64) -> Result<ProbTable> {
    let t = transition_matrix(spin, theta_ij)?;
    let d = spin.dim();
    let prior = 1.0 / d as f64;
    let values = t.iter().flat_map(|row| row.iter().map(move |p| prior * p)).collect();
    ProbTable::new(2, d, values)
}

/// Projective-collapse chain over three measurement angles.
pub fn analytic_joint3(spin: Spin, theta1: f64, theta2: f64, theta3: f64) -> Result<ProbTable> {
    let first = transition_matrix(spin, theta2 - theta1)?;
    let second = transition_matrix(spin, theta3 - theta2)?;
    let d = spin.dim();
    let prior = 1.0 / d as f64;
    let mut values = Vec::with_capacity(d * d * d);
    for row in &first {
        for (q2, &step) in row.iter().enumerate() {
            values.extend(second[q2].iter().map(|&next| prior * step * next));
        }
    }
    ProbTable::new(3, d, values)
}

/// A pair of time indices of a three-time table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimePair {
    OneTwo,
    TwoThree,
    OneThree,
}

impl TimePair {
    pub const ALL: [TimePair; 3] = [Self::OneTwo, Self::TwoThree, Self::OneThree];

    /// Zero-based indices of the kept times.
    pub fn indices(self) -> [usize; 2] {
        match self {
            Self::OneTwo => [0, 1],
            Self::TwoThree => [1, 2],
            Self::OneThree => [0, 2],
        }
    }

    /// `"12"`, `"23"` or `"13"`.
    pub fn label(self) -> &'static str {
        match self {
            Self::OneTwo => "12",
            Self::TwoThree => "23",
            Self::OneThree => "13",
        }
    }
}

impl TryFrom<(usize, usize)> for TimePair {
    type Error = Error;

    /// One-based time indices.
    fn try_from(pair: (usize, usize)) -> Result<Self> {
        match pair {
            (1, 2) => Ok(Self::OneTwo),
            (2, 3) => Ok(Self::TwoThree),
            (1, 3) => Ok(Self::OneThree),
            other => Err(Error::InvalidArgument(format!("invalid time pair {other:?}"))),
        }
    }
}

/// Marginal `P'` of a three-time table on a pair of times.
pub fn marginalize(table: &ProbTable, pair: TimePair) -> Result<ProbTable> {
    if table.arity() != 3 {
        return Err(Error::WrongArity {
            expected: 3,
            actual: table.arity(),
        });
    }
    table.marginal(&pair.indices())
}
