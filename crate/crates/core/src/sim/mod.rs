//! Monte Carlo ground truth for the Poisson network model.
//!
//! Each trial samples BS and user PPPs on a disc, adds the typical user at
//! the origin, associates every user with its nearest BS, switches off BSs
//! with empty cells, draws unit-mean exponential fading on active links and
//! records `ln(1 + SIR)` at the origin.
//!
//! Trials draw from independent ChaCha8 streams keyed by `(seed, trial)`, so
//! any execution order yields the same per-trial outcomes. Aggregation in
//! [`SeAccumulator`] is order-sensitive: feed it in trial order.

mod estimate;
mod ppp;
mod topology;

pub use estimate::{
    estimate_se, estimate_se_with_scheduler, run_trial, simulate, sir_at_origin, SeAccumulator, SeEstimate, SimReport,
    TrialOutcome, TrialRecord, SIR_CAP,
};
pub use ppp::{sample_ppp, Point};
pub use topology::{realize_topology, GridIndex, TopologyRealization};

use core::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::{Error, Result};

/// Default number of expected BSs in the simulation window.
pub const DEFAULT_EXPECTED_BS: u32 = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Radius of the simulation disc centred on the typical user.
    pub window_radius: f64,
    pub trials: u64,
    pub seed: u64,
    /// Minimum `π R² λ_b` accepted by [`SimConfig::check_window`].
    pub min_expected_bs: u32,
}

impl SimConfig {
    /// Window sized to hold `expected_bs` BSs on average at density `lambda_b`.
    pub fn with_expected_bs(lambda_b: f64, expected_bs: u32, trials: u64, seed: u64) -> Self {
        Self {
            window_radius: (f64::from(expected_bs) / (PI * lambda_b)).sqrt(),
            trials,
            seed,
            min_expected_bs: expected_bs,
        }
    }

    pub fn expected_bs(&self, lambda_b: f64) -> f64 {
        PI * self.window_radius * self.window_radius * lambda_b
    }

    /// Rejects windows too small for the interference truncation to vanish
    /// under the statistical noise.
    pub fn check_window(&self, lambda_b: f64) -> Result<()> {
        if !(self.window_radius > 0.0 && self.window_radius.is_finite()) {
            return Err(Error::Domain("window radius must be positive and finite"));
        }
        if self.trials == 0 {
            return Err(Error::Domain("at least one trial is required"));
        }
        let expected = self.expected_bs(lambda_b);
        if expected < f64::from(self.min_expected_bs) * (1.0 - 1e-9) {
            return Err(Error::WindowTooSmall {
                expected,
                required: self.min_expected_bs,
            });
        }
        Ok(())
    }
}

/// The random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
