use alloc::vec::Vec;

use crate::params::{NetworkParams, SinrThreshold};
use astro_float::BigFloat;

use crate::specfun::{
    alternating_binomial_combination, alternating_binomial_multi, alternating_binomial_sum, working_bits, MultiContext,
    MultiInterference, Quad, SpecFunError,
};
use crate::usercount::{truncation_support, UserCountModel};

use super::laplace::InterferenceKernel;
use super::{AnalyticError, CcdfCurve, Provenance};

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

/// User-count tail mass neglected when averaging over `N`.
pub const CCDF_TAIL_MASS: f64 = 1e-10;

/// Double-precision sums whose error bound exceeds this are redone in quad-double.
const DOUBLE_SUM_BUDGET: f64 = 1e-10;

/// Relative accuracy of the double-precision interference integral.
const DOUBLE_TERM_ACCURACY: f64 = 1e-14;

/// Largest `n` attempted in quad-double; beyond it the cancellation of about
/// `n` bits exceeds what quad-double terms carry.
const EXTENDED_MAX_N: u32 = 150;

/// Terms at arbitrary precision, with the precision-specific `J` series.
struct MultiTerms {
    ctx: MultiContext,
    interference: MultiInterference,
    terms: Vec<BigFloat>,
}

/// The terms `ψ(kθ)` for one threshold, computed on demand.
struct TermTable {
    theta: f64,
    double: Vec<f64>,
    max_exponent: f64,
    extended: Vec<Quad>,
    multi: Option<MultiTerms>,
    /// Largest `n` expected, so the working precision is chosen once.
    n_hint: u32,
}

impl TermTable {
    fn new(theta: f64, n_hint: u32) -> Self {
        Self { theta, double: Vec::new(), max_exponent: 0.0, extended: Vec::new(), multi: None, n_hint }
    }

    fn fill_double(&mut self, kernel: &InterferenceKernel, n: u32) -> Result<(), AnalyticError> {
        for k in self.double.len() as u32 + 1..=n {
            let e = kernel.exponent(f64::from(k) * self.theta)?;
            if e.is_finite() {
                self.max_exponent = self.max_exponent.max(e);
            }
            self.double.push((-e).exp());
        }
        Ok(())
    }

    fn fill_extended(&mut self, kernel: &InterferenceKernel, n: u32) {
        let theta = Quad::from_f64(self.theta);
        for k in self.extended.len() as u32 + 1..=n {
            self.extended.push(kernel.psi_extended(theta * f64::from(k)));
        }
    }

    fn fill_multi(&mut self, kernel: &InterferenceKernel, n: u32) -> Result<&MultiTerms, AnalyticError> {
        let bits = working_bits(n.max(self.n_hint), self.max_exponent);
        if self.multi.as_ref().is_none_or(|m| m.ctx.bits() < bits) {
            let mut ctx = MultiContext::new(bits)?;
            let interference = MultiInterference::new(kernel.alpha(), &mut ctx)?;
            self.multi = Some(MultiTerms { ctx, interference, terms: Vec::new() });
        }
        let m = self.multi.as_mut().expect("initialized above");
        let theta = m.ctx.from_f64(self.theta);
        for k in m.terms.len() as u32 + 1..=n {
            let u = m.ctx.mul(&theta, &m.ctx.from_u64(u64::from(k)));
            let psi = kernel.psi_multi(&u, &m.interference, &mut m.ctx);
            m.terms.push(psi);
        }
        Ok(m)
    }
}

/// Conditional and marginal CCDF for one parameter set and empty-cell
/// probability, with `ψ` values cached per threshold.
///
/// Each sum is first attempted with double-precision terms. When the
/// cancellation bound exceeds `1e-10` the terms are recomputed in quad-double,
/// and for more than 150 users at a working precision of about `n + 128` bits.
#[derive(Debug, Clone)]
pub struct CcdfEvaluator {
    kernel: InterferenceKernel,
}

impl CcdfEvaluator {
    pub fn new(p: &NetworkParams, fn0: f64) -> Result<Self, AnalyticError> {
        Ok(Self { kernel: InterferenceKernel::new(p, fn0)? })
    }

    pub fn kernel(&self) -> &InterferenceKernel {
        &self.kernel
    }

    fn conditional_in(&self, table: &mut TermTable, n: u32) -> Result<f64, AnalyticError> {
        if n == 0 || table.theta == f64::INFINITY {
            return Ok(0.0);
        }
        table.fill_double(&self.kernel, n)?;
        let rel = DOUBLE_TERM_ACCURACY * table.max_exponent.max(10.0);
        let attempt = alternating_binomial_combination(n, |k| table.double[k as usize - 1], rel);
        if let Ok(s) = attempt {
            if s.error_bound <= DOUBLE_SUM_BUDGET {
                return Ok(s.value.clamp(0.0, 1.0));
            }
        }
        if n <= EXTENDED_MAX_N {
            table.fill_extended(&self.kernel, n);
            match alternating_binomial_sum(n, |k| table.extended[k as usize - 1]) {
                Err(SpecFunError::Precision { .. }) => {}
                other => return Ok(other?),
            }
        }
        // ψ = e^{-E} inherits the relative error of E, about E ulps.
        let ulps = 16.0 * table.max_exponent.max(10.0);
        let m = table.fill_multi(&self.kernel, n)?;
        let s = alternating_binomial_multi(&m.terms[..n as usize], ulps, &m.ctx)?;
        Ok(s.value.clamp(0.0, 1.0))
    }

    /// `P(SINR > θ | n involved users)`.
    pub fn conditional(&self, theta: f64, n: u32) -> Result<f64, AnalyticError> {
        self.conditional_in(&mut TermTable::new(theta, n), n)
    }

    /// `Σ_n weights[n] · P(SINR > θ | n)`, with `weights[0]` ignored.
    pub fn averaged(&self, theta: f64, weights: &[f64]) -> Result<f64, AnalyticError> {
        let mut table = TermTable::new(theta, weights.len().saturating_sub(1) as u32);
        let mut total = 0.0;
        for (n, &w) in weights.iter().enumerate().skip(1) {
            if w > 0.0 {
                total += w * self.conditional_in(&mut table, n as u32)?;
            }
        }
        Ok(total)
    }
}

fn model_weights(model: &UserCountModel, p: &NetworkParams) -> Result<Vec<f64>, AnalyticError> {
    let n_max = truncation_support(model, p, CCDF_TAIL_MASS)?;
    (0..=n_max).map(|n| Ok(model.pmf(n, p)?)).collect()
}

/// `P(SINR > θ | n)`, the scheduled user's CCDF in a cell with `n ≥ 1` involved
/// users. `fn0` thins the interfering cells.
pub fn conditional_ccdf(theta: SinrThreshold, n: u32, p: &NetworkParams, fn0: f64) -> Result<f64, AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::Domain("number of involved users must be at least one"));
    }
    CcdfEvaluator::new(p, fn0)?.conditional(theta.linear(), n)
}

/// `Σ_k C(n,k) (−1)^{k+1} exp(−(1 − fn0) √(kθ) arctan √(kθ))`.
///
/// This is the conditional CCDF for `α = 4`, no noise and unbounded transmit
/// power.
pub fn conditional_ccdf_closed_form(theta: SinrThreshold, n: u32, fn0: f64) -> Result<f64, AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::Domain("number of involved users must be at least one"));
    }
    if !(0.0..=1.0).contains(&fn0) {
        return Err(AnalyticError::Domain("empty-cell probability must lie in [0, 1]"));
    }
    let theta = Quad::from_f64(theta.linear());
    let thin = Quad::ONE - Quad::from_f64(fn0);
    let terms: Vec<Quad> = (1..=n)
        .map(|k| {
            let r = (theta * f64::from(k)).sqrt();
            (-(thin * r * r.atan())).exp()
        })
        .collect();
    Ok(alternating_binomial_sum(n, |k| terms[k as usize - 1])?)
}

/// `P(SINR > θ)` averaged over the user-count model, with the model's empty-cell
/// probability also thinning the interferers.
pub fn marginal_ccdf(theta: SinrThreshold, model: &UserCountModel, p: &NetworkParams) -> Result<f64, AnalyticError> {
    let weights = model_weights(model, p)?;
    CcdfEvaluator::new(p, weights[0])?.averaged(theta.linear(), &weights)
}

/// [`marginal_ccdf`] on a grid of linear thresholds.
pub fn ccdf_curve(thetas: &[f64], model: &UserCountModel, p: &NetworkParams) -> Result<CcdfCurve, AnalyticError> {
    let weights = model_weights(model, p)?;
    let eval = CcdfEvaluator::new(p, weights[0])?;
    let mut points = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let theta = SinrThreshold::from_linear(theta)?.linear();
        points.push((theta, eval.averaged(theta, &weights)?));
    }
    let provenance = match model.regime() {
        Some(r) => Provenance::Analytic(r),
        None => Provenance::AnalyticEmpirical,
    };
    Ok(CcdfCurve { points, stderr: None, provenance, params: *p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, RawParams};
    use crate::usercount::{pmf_voronoi, EmpiricalPmf};
    use proptest::prelude::*;

    fn th(x: f64) -> SinrThreshold {
        SinrThreshold::from_linear(x).unwrap()
    }

    fn simplest() -> NetworkParams {
        make_params(&RawParams { pu_dbm: 80.0, interference_limited: true, ..RawParams::default() }).unwrap()
    }

    fn reference(lambda_bs_per_km2: f64) -> NetworkParams {
        make_params(&RawParams { lambda_bs_per_km2, ..RawParams::default() }).unwrap()
    }

    #[test]
    fn single_user_reduces_to_no_scheduling() {
        let v = conditional_ccdf(th(1.0), 1, &simplest(), 0.0).unwrap();
        assert!((v - (-core::f64::consts::FRAC_PI_4).exp()).abs() < 1e-12);
        assert!((v - 0.455_938_127_765_996_2).abs() < 1e-12);
    }

    #[test]
    fn two_users_closed_form() {
        // 2 e^{-π/4} - e^{-√2 atan √2}
        let want = 0.652_900_729_986_786_5;
        let v = conditional_ccdf(th(1.0), 2, &simplest(), 0.0).unwrap();
        assert!((v - want).abs() < 1e-12);
        assert!((conditional_ccdf_closed_form(th(1.0), 2, 0.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn closed_form_five_users_reference() {
        // 50-digit evaluation of the same finite sum
        let want = 0.850_497_327_344_787_1;
        assert!((conditional_ccdf_closed_form(th(1.0), 5, 0.0).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn small_threshold_limit() {
        let p = reference(20.0);
        for n in [1, 2, 7, 40, 90] {
            assert!((conditional_ccdf(th(1e-14), n, &p, 0.3).unwrap() - 1.0).abs() < 1e-9);
            assert!((conditional_ccdf_closed_form(th(1e-14), n, 0.3).unwrap() - 1.0).abs() < 1e-9);
        }
        assert!(conditional_ccdf(th(1.0), 0, &p, 0.3).is_err());
    }

    #[test]
    fn large_counts_need_extended_terms() {
        let p = reference(20.0);
        for n in [30, 60, 100, 140] {
            let v = conditional_ccdf(th(0.1), n, &p, 0.2).unwrap();
            assert!((0.0..=1.0).contains(&v), "n = {n}: {v}");
        }
    }

    fn multi_only(eval: &CcdfEvaluator, theta: f64, n: u32) -> f64 {
        let mut table = TermTable::new(theta, n);
        table.fill_double(eval.kernel(), n).unwrap();
        let m = table.fill_multi(eval.kernel(), n).unwrap();
        alternating_binomial_multi(&m.terms, 1e3, &m.ctx).unwrap().value
    }

    #[test]
    fn arbitrary_precision_tier_agrees_with_quad() {
        let eval = CcdfEvaluator::new(&reference(0.2), 0.3).unwrap();
        for n in [3, 40, 120, 150] {
            for theta in [0.1, 1.0, 30.0] {
                let tiered = eval.conditional(theta, n).unwrap();
                let multi = multi_only(&eval, theta, n);
                assert!((tiered - multi).abs() < 1e-12, "n {n} theta {theta}: {tiered} vs {multi}");
            }
        }
    }

    #[test]
    fn noise_only_oracle_for_many_users() {
        // With every other cell empty, ψ(u) = e^{-uσ²/ρ} and the sum is 1 − (1 − e^{-θσ²/ρ})^n.
        let p = reference(20.0);
        let eval = CcdfEvaluator::new(&p, 1.0).unwrap();
        for n in [151u32, 300, 900] {
            for theta in [0.1, 100.0, 400.0] {
                let q = (-theta * p.noise_power() / p.rho_target()).exp();
                let want = 1.0 - (1.0 - q).powi(n as i32);
                let got = eval.conditional(theta, n).unwrap();
                assert!((got - want).abs() < 1e-12, "n {n} theta {theta}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn many_users_stay_monotone() {
        let eval = CcdfEvaluator::new(&reference(0.2), 0.05).unwrap();
        let mut prev = 0.0;
        for n in (100..=400).step_by(30) {
            let v = eval.conditional(0.1, n).unwrap();
            assert!(v >= prev && v <= 1.0, "n {n}: {v}");
            prev = v;
        }
    }

    #[test]
    fn supremum_deficit() {
        for (lambda, model) in [(20.0, UserCountModel::VoronoiCell), (0.2, UserCountModel::AchievableRange)] {
            let p = reference(lambda);
            let f0 = model.pmf(0, &p).unwrap();
            let v = marginal_ccdf(th(1e-14), &model, &p).unwrap();
            assert!((v - (1.0 - f0)).abs() < 1e-9, "{lambda}: {v} vs {}", 1.0 - f0);
        }
    }

    #[test]
    fn no_users_no_coverage() {
        let p = make_params(&RawParams { lambda_ue_per_km2: 0.0, ..RawParams::default() }).unwrap();
        for model in [UserCountModel::VoronoiCell, UserCountModel::AchievableRange] {
            assert_eq!(marginal_ccdf(th(1e-3), &model, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn marginal_is_weighted_conditional() {
        let p = reference(20.0);
        let e = EmpiricalPmf::from_weights(&[0.2, 0.5, 0.3]).unwrap();
        let m = UserCountModel::Empirical(e);
        let got = marginal_ccdf(th(2.0), &m, &p).unwrap();
        let want =
            0.5 * conditional_ccdf(th(2.0), 1, &p, 0.2).unwrap() + 0.3 * conditional_ccdf(th(2.0), 2, &p, 0.2).unwrap();
        assert!((got - want).abs() < 1e-15);
        let f0 = pmf_voronoi(0, &p).unwrap();
        let curve = ccdf_curve(&[0.1, 1.0, 10.0], &UserCountModel::VoronoiCell, &p).unwrap();
        assert_eq!(curve.provenance, Provenance::Analytic(crate::usercount::Regime::VoronoiCell));
        assert!(curve.probabilities().all(|v| v <= 1.0 - f0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn monotone_in_user_count(db in -10.0f64..20.0, fn0 in 0.0f64..0.9) {
            let p = reference(20.0);
            let eval = CcdfEvaluator::new(&p, fn0).unwrap();
            let theta = 10f64.powf(db / 10.0);
            let mut prev = 0.0;
            for n in 1..=50 {
                let v = eval.conditional(theta, n).unwrap();
                prop_assert!(v >= prev - 1e-12, "n {}: {} < {}", n, v, prev);
                prev = v;
            }
        }

        #[test]
        fn monotone_in_threshold(lambda in 0.1f64..30.0, ratio in 0.1f64..6.0) {
            let p = make_params(&RawParams {
                lambda_bs_per_km2: lambda,
                lambda_ue_per_km2: lambda * ratio,
                ..RawParams::default()
            })
            .unwrap();
            let thetas: Vec<f64> = (0..25).map(|i| 10f64.powf((-20.0 + 2.0 * i as f64) / 10.0)).collect();
            let curve = ccdf_curve(&thetas, &UserCountModel::VoronoiCell, &p).unwrap();
            let probs: Vec<f64> = curve.probabilities().collect();
            for w in probs.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }
}
