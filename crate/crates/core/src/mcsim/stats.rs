use alloc::vec::Vec;

use crate::analytic::{CcdfCurve, Provenance};
use crate::params::NetworkParams;
use crate::usercount::EmpiricalPmf;

use super::{Scheduler, SimError, TrialOutcome};

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.comp += if self.sum.abs() >= x.abs() { (self.sum - t) + x } else { (x - t) + self.sum };
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    fn from_samples(values: impl Iterator<Item = f64> + Clone) -> Self {
        let mut n = 0u64;
        let mut sum = NeumaierSum::default();
        for v in values.clone() {
            sum.add(v);
            n += 1;
        }
        if n == 0 {
            return Self { mean: f64::NAN, stderr: f64::NAN, samples: 0 };
        }
        let mean = sum.value() / n as f64;
        let mut sq = NeumaierSum::default();
        sq.extend(values.map(|v| (v - mean) * (v - mean)));
        let var = if n > 1 { sq.value() / (n - 1) as f64 } else { 0.0 };
        Self { mean, stderr: (var / n as f64).sqrt(), samples: n }
    }
}

fn measured(outcomes: &[TrialOutcome]) -> impl Iterator<Item = &TrialOutcome> + Clone {
    outcomes.iter().filter(|o| o.measured)
}

fn sinr_of(o: &TrialOutcome, scheduler: Scheduler) -> Option<f64> {
    match scheduler {
        Scheduler::NormalizedSnr => o.sinr_scheduled,
        Scheduler::RoundRobin => o.sinr_round_robin,
    }
}

/// Fraction of measured trials with SINR above each threshold. Cells without
/// involved users count as not exceeding.
pub fn ccdf_from_outcomes(
    outcomes: &[TrialOutcome],
    thetas: &[f64],
    scheduler: Scheduler,
    p: &NetworkParams,
) -> Result<CcdfCurve, SimError> {
    let mut sinrs: Vec<f64> = Vec::new();
    let mut n = 0u64;
    for o in measured(outcomes) {
        n += 1;
        if let Some(s) = sinr_of(o, scheduler) {
            sinrs.push(s);
        }
    }
    if n == 0 {
        return Err(SimError::NothingMeasured);
    }
    sinrs.sort_by(f64::total_cmp);
    let mut points = Vec::with_capacity(thetas.len());
    let mut stderr = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let at_or_below = sinrs.partition_point(|&s| s <= theta);
        let frac = (sinrs.len() - at_or_below) as f64 / n as f64;
        points.push((theta, frac));
        stderr.push((frac * (1.0 - frac) / n as f64).sqrt());
    }
    Ok(CcdfCurve { points, stderr: Some(stderr), provenance: Provenance::Simulated, params: *p })
}

/// Normalized histogram of involved users in the measured cells.
pub fn user_count_from_outcomes(outcomes: &[TrialOutcome]) -> Result<EmpiricalPmf, SimError> {
    let mut counts: Vec<u64> = Vec::new();
    for o in measured(outcomes) {
        let n = o.involved as usize;
        if counts.len() <= n {
            counts.resize(n + 1, 0);
        }
        counts[n] += 1;
    }
    EmpiricalPmf::from_counts(&counts).map_err(|_| SimError::NothingMeasured)
}

/// Simulated mean rates and scheduling gain, in nats per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalRates {
    pub scheduled: Estimate,
    pub round_robin: Estimate,
    /// `None` when the round-robin mean is zero.
    pub gain: Option<f64>,
    /// Delta-method standard error of the gain over paired trials.
    pub gain_stderr: f64,
}

fn rate(s: Option<f64>) -> f64 {
    s.map_or(0.0, |v| v.ln_1p())
}

/// Mean `ln(1 + SINR)` under both schedulers; cells without involved users
/// contribute zero.
pub fn rates_from_outcomes(outcomes: &[TrialOutcome]) -> Result<EmpiricalRates, SimError> {
    let m = measured(outcomes);
    let scheduled = Estimate::from_samples(m.clone().map(|o| rate(o.sinr_scheduled)));
    let round_robin = Estimate::from_samples(m.clone().map(|o| rate(o.sinr_round_robin)));
    let n = scheduled.samples;
    if n == 0 {
        return Err(SimError::NothingMeasured);
    }
    let (a, b) = (scheduled.mean, round_robin.mean);
    if !(b > 0.0) {
        return Ok(EmpiricalRates { scheduled, round_robin, gain: None, gain_stderr: f64::NAN });
    }
    let g = a / b;
    // Var(a − g b) over trials gives the linearized variance of the ratio.
    let mut sq = NeumaierSum::default();
    sq.extend(m.map(|o| {
        let d = (rate(o.sinr_scheduled) - a) - g * (rate(o.sinr_round_robin) - b);
        d * d
    }));
    let var = if n > 1 { sq.value() / (n - 1) as f64 } else { 0.0 };
    Ok(EmpiricalRates { scheduled, round_robin, gain: Some(g), gain_stderr: (var / n as f64).sqrt() / b })
}

/// Monte Carlo estimate of `E[e^{−sI}]` for the interference at the measured BS.
pub fn laplace_from_outcomes(outcomes: &[TrialOutcome], s: f64) -> Result<Estimate, SimError> {
    let e = Estimate::from_samples(measured(outcomes).map(|o| (-s * o.interference).exp()));
    if e.samples == 0 {
        return Err(SimError::NothingMeasured);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, RawParams};

    fn outcome(sinr: Option<f64>, rr: Option<f64>, involved: u32) -> TrialOutcome {
        TrialOutcome {
            measured: true,
            involved,
            sinr_scheduled: sinr,
            sinr_round_robin: rr,
            interference: 1e-7,
            users: 3,
            users_involved: 2,
        }
    }

    #[test]
    fn ccdf_counts_missing_as_below() {
        let p = make_params(&RawParams::default()).unwrap();
        let outs = [outcome(Some(2.0), None, 1), outcome(None, None, 0), outcome(Some(0.5), None, 2)];
        let c = ccdf_from_outcomes(&outs, &[0.1, 1.0, 5.0], Scheduler::NormalizedSnr, &p).unwrap();
        let probs: Vec<f64> = c.probabilities().collect();
        assert_eq!(probs, [2.0 / 3.0, 1.0 / 3.0, 0.0]);
        let single = ccdf_from_outcomes(&outs[..1], &[1.0], Scheduler::NormalizedSnr, &p).unwrap();
        assert_eq!(single.points[0].1, 1.0);
        assert!(ccdf_from_outcomes(&[], &[1.0], Scheduler::RoundRobin, &p).is_err());
    }

    #[test]
    fn rates_and_gain() {
        let e = core::f64::consts::E - 1.0;
        let outs = [outcome(Some(e), Some(e), 1), outcome(None, None, 0)];
        let r = rates_from_outcomes(&outs).unwrap();
        assert!((r.scheduled.mean - 0.5).abs() < 1e-15);
        assert_eq!(r.gain, Some(1.0));
        assert!(r.gain_stderr.abs() < 1e-15);
        let none = rates_from_outcomes(&[outcome(None, None, 0)]).unwrap();
        assert_eq!(none.gain, None);
    }

    #[test]
    fn histogram() {
        let outs = [outcome(None, None, 0), outcome(Some(1.0), None, 2), outcome(Some(1.0), None, 2)];
        let h = user_count_from_outcomes(&outs).unwrap();
        assert_eq!(h.probabilities(), &[1.0 / 3.0, 0.0, 2.0 / 3.0]);
    }

    #[test]
    fn compensated_sum() {
        let mut s = NeumaierSum::default();
        s.extend([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s.value(), 2.0);
    }
}
