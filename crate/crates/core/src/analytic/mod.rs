//! Analytic engine: Laplace transform of the interference, conditional and
//! marginal SINR CCDF, average rates and the scheduling gain.
//!
//! All formulas rest on two approximations for the interferers: the scheduled
//! users of other cells form a thinned PPP of intensity `(1 − f_N(0))λ_BS`,
//! and their transmit powers are independent. Under these,
//!
//! ```text
//! ψ(u) = e^{−uσ²/ρ_o} · L_I(u/ρ_o),
//! L_I(u/ρ_o) = exp(−2(1 − f_N(0)) · G · u^{2/α} · J(u)),
//! G = γ(2, πλ_BS R²) / (1 − e^{−πλ_BS R²}),
//! ```
//!
//! and the scheduled user of a cell with `n` involved users exceeds `θ` with
//! probability `Σ_{k=1}^n C(n,k) (−1)^{k+1} ψ(kθ)`.

use alloc::vec::Vec;

use crate::params::{NetworkParams, ParamError};
use crate::specfun::SpecFunError;
use crate::usercount::{Regime, UserCountError, UserCountModel};

mod ccdf;
mod laplace;
mod rate;

pub use ccdf::{
    ccdf_curve, conditional_ccdf, conditional_ccdf_closed_form, marginal_ccdf, CcdfEvaluator, CCDF_TAIL_MASS,
};
pub use laplace::{laplace_interference, power_moment_factor, InterferenceKernel};
pub use rate::{rate_round_robin, rate_scheduled, rate_scheduled_layer_cake, scheduling_gain, RATE_QUADRATURE};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    UserCount(#[from] UserCountError),
    #[error("{0}")]
    Domain(&'static str),
    #[error("round-robin rate is zero, so the scheduling gain is undefined")]
    UndefinedGain,
}

/// Where a CCDF curve came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Analytic curve under a closed-form user-count regime.
    Analytic(Regime),
    /// Analytic curve averaged over an empirical user-count histogram.
    AnalyticEmpirical,
    Simulated,
}

/// `P(SINR > θ)` on a grid of linear thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    /// `(θ, P(SINR > θ))` pairs, `θ` increasing.
    pub points: Vec<(f64, f64)>,
    /// Monte Carlo standard error per point, for simulated curves.
    pub stderr: Option<Vec<f64>>,
    pub provenance: Provenance,
    pub params: NetworkParams,
}

impl CcdfCurve {
    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// Largest absolute difference to another curve on the same grid.
    pub fn max_abs_gap(&self, other: &CcdfCurve) -> Option<f64> {
        if self.points.len() != other.points.len() {
            return None;
        }
        Some(self.points.iter().zip(&other.points).map(|(a, b)| (a.1 - b.1).abs()).fold(0.0, f64::max))
    }
}

/// Average rates in nats per channel use and their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// Mean `ln(1 + SINR)` under normalized-SNR scheduling.
    pub rate_scheduled: f64,
    /// Mean `ln(1 + SINR)` under round-robin selection.
    pub rate_round_robin: f64,
    /// `rate_scheduled / rate_round_robin`.
    pub gain: f64,
    pub params: NetworkParams,
    pub model: UserCountModel,
}

impl RateReport {
    pub fn new(
        rate_scheduled: f64,
        rate_round_robin: f64,
        params: NetworkParams,
        model: UserCountModel,
    ) -> Result<Self, AnalyticError> {
        if !(rate_round_robin > 0.0) {
            return Err(AnalyticError::UndefinedGain);
        }
        Ok(Self { rate_scheduled, rate_round_robin, gain: rate_scheduled / rate_round_robin, params, model })
    }
}
