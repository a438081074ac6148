//! Fixtures shared by the benchmarks.

use std::f64::consts::FRAC_PI_4;

use elgi_core::macrorealism::MarginalSet;
use elgi_core::protocols::{MeasurementMode, ProtocolConfig};
use elgi_core::sampling::ShotConfig;
use elgi_core::Spin;

/// Spins covered by the rotation benchmarks.
pub fn spins() -> [Spin; 3] {
    [Spin::HALF, Spin::from_twice(2).unwrap(), Spin::from_twice(3).unwrap()]
}

/// Equal-step three-time qubit protocol with step `FRAC_PI_4`.
pub fn equal_step_protocol(mode: MeasurementMode) -> ProtocolConfig {
    ProtocolConfig::new(Spin::HALF, vec![0.0, FRAC_PI_4, 2.0 * FRAC_PI_4], mode).unwrap()
}

/// Quantum marginals that admit no grand distribution.
pub fn infeasible_marginals() -> MarginalSet {
    MarginalSet::quantum(Spin::HALF, FRAC_PI_4 / 2.0).unwrap()
}

pub fn default_shots() -> ShotConfig {
    ShotConfig::default()
}
