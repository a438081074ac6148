//! Finite-shot emulation of the experiment.
//!
//! Random numbers come from ChaCha8, a counter-based stream cipher
//! generator. Repetition `r` of a run seeded with `seed` draws from
//! stream `r` of the generator keyed by `seed`, so results do not depend
//! on the order in which repetitions execute.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::entropy::{conditional_entropy, normalized_deficit};
use crate::error::{Error, Result};
use crate::protocols::{joint2, MeasurementMode, ProtocolConfig};
use crate::qcore::Spin;
use crate::table::{ProbTable, MASS_TOL};

pub const DEFAULT_SEED: u64 = 0x00E1_6115_2013_0001;
pub const DEFAULT_SHOTS: u64 = 4096;
pub const DEFAULT_REPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotConfig {
    /// Samples drawn per probability table.
    pub shots: u64,
    /// Independent repetitions.
    pub reps: usize,
    pub seed: u64,
    /// Probability that a recorded outcome is flipped.
    pub readout_flip: f64,
}

impl ShotConfig {
    pub fn new(shots: u64, reps: usize, seed: u64, readout_flip: f64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        if reps < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 repetitions for a spread estimate, got {reps}"
            )));
        }
        if !(0.0..1.0).contains(&readout_flip) {
            return Err(Error::InvalidArgument(format!(
                "readout flip probability {readout_flip} outside [0, 1)"
            )));
        }
        Ok(Self {
            shots,
            reps,
            seed,
            readout_flip,
        })
    }
}

impl Default for ShotConfig {
    fn default() -> Self {
        Self {
            shots: DEFAULT_SHOTS,
            reps: DEFAULT_REPS,
            seed: DEFAULT_SEED,
            readout_flip: 0.0,
        }
    }
}

/// Generator for repetition `rep` of a run seeded with `seed`.
pub fn rep_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Empirical frequencies of a multinomial draw of `shots` outcomes,
/// generated as a chain of conditional binomials.
pub fn sample_table<R: Rng + ?Sized>(p: &ProbTable, shots: u64, rng: &mut R) -> Result<ProbTable> {
    if (p.mass() - 1.0).abs() > MASS_TOL || (p.sum() - 1.0).abs() > MASS_TOL {
        return Err(Error::MassMismatch {
            expected: 1.0,
            actual: p.sum(),
        });
    }
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let values = p.values();
    let mut counts = vec![0u64; values.len()];
    let mut left = shots;
    let mut mass_left = 1.0;
    for (k, &v) in values.iter().enumerate() {
        if left == 0 {
            break;
        }
        if k + 1 == values.len() {
            counts[k] = left;
            break;
        }
        let q = if mass_left > 0.0 {
            (v / mass_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(left, q)
            .map_err(|e| Error::InvalidArgument(format!("binomial parameters: {e}")))?
            .sample(rng);
        counts[k] = draw;
        left -= draw;
        mass_left -= v;
    }
    let freqs = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    ProbTable::new(p.arity(), p.outcome_dim(), freqs)
}

/// Passes every time index through a symmetric channel that replaces the
/// recorded outcome with each other outcome with probability
/// `eps / (d - 1)`. For binary outcomes this is the binary symmetric channel.
pub fn apply_readout_noise(p: &ProbTable, eps: f64) -> Result<ProbTable> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!("flip probability {eps} outside [0, 1)")));
    }
    let d = p.outcome_dim();
    if eps == 0.0 || d == 1 {
        return Ok(p.clone());
    }
    let other = eps / (d - 1) as f64;
    let mut values = p.values().to_vec();
    let len = values.len();
    for axis in 0..p.arity() {
        let stride = d.pow((p.arity() - 1 - axis) as u32);
        let mut next = vec![0.0; len];
        for (flat, &v) in values.iter().enumerate() {
            let q = (flat / stride) % d;
            let base = flat - q * stride;
            for r in 0..d {
                let w = if r == q { 1.0 - eps } else { other };
                next[base + r * stride] += w * v;
            }
        }
        values = next;
    }
    ProbTable::with_mass(p.arity(), d, values, p.mass())
}

/// Mean and sample standard deviation over repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std: f64,
    pub reps: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::InvalidArgument("need at least 2 samples".into()));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Ok(Self {
            mean,
            std: var.sqrt(),
            reps: n,
        })
    }
}

/// Per-repetition `D₃` values from sampled tables.
///
/// Each repetition samples the three two-time tables `(1,2)`, `(2,3)` and
/// `(1,3)` independently, each with `cfg.shots` outcomes, and evaluates
/// `[H(Q₂|Q₁) + H(Q₃|Q₂) - H(Q₃|Q₁)] / log₂(2s+1)` on the empirical
/// frequencies. No bias correction is applied to the plug-in entropies.
pub fn deficit_samples(spin: Spin, theta: f64, cfg: &ShotConfig, mode: MeasurementMode) -> Result<Vec<f64>> {
    if mode.is_circuit() && !spin.is_half() {
        return Err(Error::Unsupported(format!("{mode} mode supports s = 1/2 only")));
    }
    let config = ProtocolConfig::equidistant(spin, 3, theta, mode)?;
    let tables = [(0, 1), (1, 2), (0, 2)]
        .into_iter()
        .map(|(i, j)| apply_readout_noise(&joint2(&config, i, j)?, cfg.readout_flip))
        .collect::<Result<Vec<_>>>()?;
    (0..cfg.reps)
        .map(|rep| {
            let mut rng = rep_rng(cfg.seed, rep as u64);
            let mut h = [0.0; 3];
            for (slot, table) in h.iter_mut().zip(&tables) {
                *slot = conditional_entropy(&sample_table(table, cfg.shots, &mut rng)?)?.0;
            }
            Ok(normalized_deficit(&h[..2], h[2], spin))
        })
        .collect()
}

/// `D₃` estimated from `cfg.reps` independent finite-shot repetitions.
pub fn estimate_deficit(spin: Spin, theta: f64, cfg: &ShotConfig, mode: MeasurementMode) -> Result<Estimate> {
    Estimate::from_samples(&deficit_samples(spin, theta, cfg, mode)?)
}

/// How many standard deviations below zero an estimate lies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaViolation {
    Sigma(f64),
    /// Negative mean with zero spread.
    Unbounded,
}

impl SigmaViolation {
    pub fn value(self) -> f64 {
        match self {
            Self::Sigma(s) => s,
            Self::Unbounded => f64::INFINITY,
        }
    }
}

/// `-mean / std` for negative means, else zero.
pub fn sigma_violation(e: &Estimate) -> SigmaViolation {
    if e.mean >= 0.0 {
        SigmaViolation::Sigma(0.0)
    } else if e.std == 0.0 {
        SigmaViolation::Unbounded
    } else {
        SigmaViolation::Sigma(-e.mean / e.std)
    }
}
