//! Distribution of the number of involved users in a typical cell.
//!
//! Two regimes have closed forms. When the achievable disc of radius `R`
//! covers the whole Voronoi cell (dense BSs), the count follows the Voronoi
//! cell model, a negative binomial with shape `c = 3.5`:
//! `f(n) = Γ(n+c)/(Γ(c) n!) · x^n / (1+x)^{n+c}` with `x = λ_UE/(cλ_BS)`.
//! When the disc lies inside the cell (sparse BSs), the count is Poisson with
//! mean `λ_UE πR²`. [`validity_g1`] and [`validity_g2`] measure how likely each
//! regime is.

use alloc::vec::Vec;

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::params::{outage_probability, NetworkParams};

/// Shape constant of the Voronoi cell-area model.
pub const VORONOI_SHAPE: f64 = 3.5;

/// Default validity level used by [`recommend_model`].
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.9;

/// Default neglected tail mass for [`truncation_support`].
pub const DEFAULT_TAIL_MASS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum UserCountError {
    #[error("the Voronoi cell model needs a positive BS density")]
    NoBaseStations,
    #[error("tail mass must lie in (1e-15, 1), got {0}")]
    InvalidTailMass(f64),
    #[error("empirical histogram is empty or has zero total mass")]
    EmptyHistogram,
    #[error("empirical histogram entry {index} is negative or not finite")]
    InvalidEntry { index: usize },
    #[error("support search exceeded {0} terms")]
    SupportTooLarge(u32),
}

/// One of the two closed-form user-count regimes, indexed 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Achievable disc covers the Voronoi cell.
    VoronoiCell,
    /// Achievable disc lies inside the Voronoi cell.
    AchievableRange,
}

impl Regime {
    pub fn index(self) -> u8 {
        match self {
            Regime::VoronoiCell => 1,
            Regime::AchievableRange => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Regime::VoronoiCell),
            2 => Some(Regime::AchievableRange),
            _ => None,
        }
    }
}

/// A normalized histogram of user counts, index `n` holding `P(N = n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPmf {
    probs: Vec<f64>,
}

impl EmpiricalPmf {
    pub fn from_counts(counts: &[u64]) -> Result<Self, UserCountError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(UserCountError::EmptyHistogram);
        }
        let mut probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        trim_zeros(&mut probs);
        Ok(Self { probs })
    }

    pub fn from_weights(weights: &[f64]) -> Result<Self, UserCountError> {
        if let Some(index) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(UserCountError::InvalidEntry { index });
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(UserCountError::EmptyHistogram);
        }
        let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        trim_zeros(&mut probs);
        Ok(Self { probs })
    }

    pub fn pmf(&self, n: u32) -> f64 {
        self.probs.get(n as usize).copied().unwrap_or(0.0)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Largest count with positive probability.
    pub fn max_count(&self) -> u32 {
        self.probs.len().saturating_sub(1) as u32
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

fn trim_zeros(probs: &mut Vec<f64>) {
    while probs.len() > 1 && probs.last() == Some(&0.0) {
        probs.pop();
    }
}

/// Which distribution of involved users to use.
#[derive(Debug, Clone, PartialEq)]
pub enum UserCountModel {
    VoronoiCell,
    AchievableRange,
    Empirical(EmpiricalPmf),
}

impl From<Regime> for UserCountModel {
    fn from(r: Regime) -> Self {
        match r {
            Regime::VoronoiCell => UserCountModel::VoronoiCell,
            Regime::AchievableRange => UserCountModel::AchievableRange,
        }
    }
}

impl UserCountModel {
    pub fn pmf(&self, n: u32, p: &NetworkParams) -> Result<f64, UserCountError> {
        match self {
            UserCountModel::VoronoiCell => pmf_voronoi(n, p),
            UserCountModel::AchievableRange => Ok(pmf_range(n, p)),
            UserCountModel::Empirical(e) => Ok(e.pmf(n)),
        }
    }

    /// Probability of a cell without involved users.
    pub fn empty_probability(&self, p: &NetworkParams) -> Result<f64, UserCountError> {
        self.pmf(0, p)
    }

    pub fn regime(&self) -> Option<Regime> {
        match self {
            UserCountModel::VoronoiCell => Some(Regime::VoronoiCell),
            UserCountModel::AchievableRange => Some(Regime::AchievableRange),
            UserCountModel::Empirical(_) => None,
        }
    }
}

/// Voronoi-cell user-count PMF, evaluated in log space.
pub fn pmf_voronoi(n: u32, p: &NetworkParams) -> Result<f64, UserCountError> {
    if !(p.lambda_bs() > 0.0) {
        return Err(UserCountError::NoBaseStations);
    }
    let c = VORONOI_SHAPE;
    let x = p.lambda_ue() / (c * p.lambda_bs());
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let nf = f64::from(n);
    let log_f = libm::lgamma(nf + c) - libm::lgamma(c) - libm::lgamma(nf + 1.0) + nf * x.ln() - (nf + c) * x.ln_1p();
    Ok(log_f.exp())
}

/// Poisson PMF with mean `λ_UE πR²`, evaluated in log space.
pub fn pmf_range(n: u32, p: &NetworkParams) -> f64 {
    poisson_pmf(n, p.users_in_range())
}

fn poisson_pmf(n: u32, mean: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let nf = f64::from(n);
    (nf * mean.ln() - mean - libm::lgamma(nf + 1.0)).exp()
}

/// Probability that a typical user has a BS within `R`: `1 − e^{−πλ_BS R²}`.
pub fn validity_g1(p: &NetworkParams) -> f64 {
    1.0 - outage_probability(p)
}

/// Probability that no other BS lies within `2R` of a typical BS: `e^{−4πλ_BS R²}`.
pub fn validity_g2(p: &NetworkParams) -> f64 {
    (-4.0 * p.bs_in_range()).exp()
}

/// The regime whose validity probability reaches `threshold`, or `None` when
/// neither does.
pub fn recommend_model(p: &NetworkParams, threshold: f64) -> Option<Regime> {
    let g1 = validity_g1(p);
    let g2 = validity_g2(p);
    match (g1 >= threshold, g2 >= threshold) {
        (true, true) if g2 > g1 => Some(Regime::AchievableRange),
        (true, _) => Some(Regime::VoronoiCell),
        (false, true) => Some(Regime::AchievableRange),
        (false, false) => None,
    }
}

const SUPPORT_LIMIT: u32 = 1_000_000;

/// Smallest `n_max` with `Σ_{n > n_max} f_N(n) < tail_mass`.
///
/// The tail is summed from the far end of the distribution, so it is accurate
/// for tail masses down to about 1e-15.
pub fn truncation_support(model: &UserCountModel, p: &NetworkParams, tail_mass: f64) -> Result<u32, UserCountError> {
    if !(tail_mass > 1e-15 && tail_mass < 1.0) {
        return Err(UserCountError::InvalidTailMass(tail_mass));
    }
    let (pmf, mean) = match model {
        UserCountModel::Empirical(e) => {
            let probs = e.probabilities();
            let mut tail = 0.0;
            for n in (0..probs.len()).rev() {
                if tail + probs[n] >= tail_mass {
                    return Ok(n as u32);
                }
                tail += probs[n];
            }
            return Ok(0);
        }
        UserCountModel::VoronoiCell => {
            pmf_voronoi(0, p)?;
            (UserCountModel::VoronoiCell, p.density_ratio().unwrap_or(0.0))
        }
        UserCountModel::AchievableRange => (UserCountModel::AchievableRange, p.users_in_range()),
    };
    // Walk out past the mean until the geometric bound on the remaining tail
    // is negligible against `tail_mass`.
    let mut values = Vec::new();
    let mut prev = 0.0;
    let mut n = 0u32;
    loop {
        let f = pmf.pmf(n, p)?;
        values.push(f);
        if f64::from(n) > mean && n > 0 {
            let ratio = if prev > 0.0 { f / prev } else { 0.0 };
            if ratio < 1.0 && f / (1.0 - ratio) < tail_mass * 1e-6 {
                break;
            }
        }
        prev = f;
        n += 1;
        if n > SUPPORT_LIMIT {
            return Err(UserCountError::SupportTooLarge(SUPPORT_LIMIT));
        }
    }
    let mut tail = 0.0;
    for k in (0..values.len()).rev() {
        if tail + values[k] >= tail_mass {
            return Ok(k as u32);
        }
        tail += values[k];
    }
    Ok(0)
}
