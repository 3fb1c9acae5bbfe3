//! Monte Carlo engine: samples the full network (no PPP-interferer or
//! independence approximations) and measures the SINR of the scheduled user
//! in a typical cell.
//!
//! Every trial draws a fresh realization from its own random stream, so trials
//! can run in any order or in parallel. Estimators consume the outcomes in
//! trial order.

use alloc::vec::Vec;

use crate::params::NetworkParams;

mod realization;
mod stats;

pub use realization::{
    measure_sinr, run_trial, sample_realization, select_normalized_snr, trial_rng, NetworkRealization, Point,
    TrialOutcome,
};
pub use stats::{
    ccdf_from_outcomes, laplace_from_outcomes, rates_from_outcomes, user_count_from_outcomes, EmpiricalRates, Estimate,
    NeumaierSum,
};

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("window radius {window} m is below twice the achievable radius ({min} m)")]
    WindowTooSmall { window: f64, min: f64 },
    #[error("Poisson mean {0} cannot be sampled")]
    PoissonMean(f64),
    #[error("no trial had a measurement BS")]
    NothingMeasured,
}

/// How users are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UserSampling {
    /// Per BS, a Poisson number of users uniform in the disc of radius `R`
    /// around it, kept when that BS is their nearest. This yields exactly the
    /// involved users of the full process while skipping the rest.
    #[default]
    InvolvedDiscs,
    /// Every user in the window, involved or not.
    FullWindow,
}

/// Which cell is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measurement {
    /// A BS chosen uniformly among those within half the window radius.
    #[default]
    TypicalBs,
}

/// Which user a cell serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduler {
    /// Largest fade among the involved users.
    NormalizedSnr,
    /// An involved user chosen uniformly at random.
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub trials: u64,
    /// Window radius in meters; `None` selects `max(10/√λ_BS, 4R)`.
    pub window_radius: Option<f64>,
    pub seed: u64,
    pub measurement: Measurement,
    pub sampling: UserSampling,
}

impl SimulationConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            window_radius: None,
            seed,
            measurement: Measurement::TypicalBs,
            sampling: UserSampling::default(),
        }
    }

    /// Window radius in meters for these parameters.
    pub fn resolved_window(&self, p: &NetworkParams) -> Result<f64, SimError> {
        let min = 2.0 * p.achievable_radius();
        match self.window_radius {
            Some(w) if !(w >= min) => Err(SimError::WindowTooSmall { window: w, min }),
            Some(w) => Ok(w),
            None => Ok(default_window(p)),
        }
    }

    pub fn validate(&self, p: &NetworkParams) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        self.resolved_window(p).map(|_| ())
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self::new(10_000, 0)
    }
}

/// `max(10/√λ_BS, 4R)`, or `4R` without BSs.
pub fn default_window(p: &NetworkParams) -> f64 {
    let four_r = 4.0 * p.achievable_radius();
    if p.lambda_bs() > 0.0 {
        (10.0 / p.lambda_bs().sqrt()).max(four_r)
    } else {
        four_r
    }
}

/// Runs all trials serially, in order.
pub fn run_trials(p: &NetworkParams, cfg: &SimulationConfig) -> Result<Vec<TrialOutcome>, SimError> {
    cfg.validate(p)?;
    (0..cfg.trials).map(|t| run_trial(p, cfg, t)).collect()
}

/// Simulated `P(SINR > θ)` of the normalized-SNR scheduler.
pub fn empirical_ccdf(
    p: &NetworkParams,
    cfg: &SimulationConfig,
    thetas: &[f64],
) -> Result<crate::analytic::CcdfCurve, SimError> {
    ccdf_from_outcomes(&run_trials(p, cfg)?, thetas, Scheduler::NormalizedSnr, p)
}

/// Histogram of involved users in the measured cell.
pub fn empirical_user_count(
    p: &NetworkParams,
    cfg: &SimulationConfig,
) -> Result<crate::usercount::UserCountModel, SimError> {
    Ok(crate::usercount::UserCountModel::Empirical(user_count_from_outcomes(&run_trials(p, cfg)?)?))
}

/// Simulated mean `ln(1 + SINR)` under both schedulers.
pub fn empirical_rates(p: &NetworkParams, cfg: &SimulationConfig) -> Result<EmpiricalRates, SimError> {
    rates_from_outcomes(&run_trials(p, cfg)?)
}
