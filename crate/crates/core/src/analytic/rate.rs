use core::cell::Cell;

use alloc::vec::Vec;

use crate::params::NetworkParams;
use crate::specfun::{integrate_semiinfinite, QuadratureSpec};
use crate::usercount::{truncation_support, UserCountModel};

use super::ccdf::{CcdfEvaluator, CCDF_TAIL_MASS};
use super::laplace::InterferenceKernel;
use super::{AnalyticError, RateReport};

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

/// Tolerances for the rate integrals.
pub const RATE_QUADRATURE: QuadratureSpec = QuadratureSpec { rel_tol: 1e-11, abs_tol: 1e-14, max_subdivisions: 400 };

fn model_weights(model: &UserCountModel, p: &NetworkParams) -> Result<Vec<f64>, AnalyticError> {
    let n_max = truncation_support(model, p, CCDF_TAIL_MASS)?;
    (0..=n_max).map(|n| Ok(model.pmf(n, p)?)).collect()
}

/// Integrates `f` over `(0, ∞)`, passing through the first error `f` reports.
fn integrate_fallible<F>(mut f: F, spec: &QuadratureSpec) -> Result<f64, AnalyticError>
where
    F: FnMut(f64) -> Result<f64, AnalyticError>,
{
    let failure = Cell::new(None);
    let result = integrate_semiinfinite(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                if failure.get().is_none() {
                    failure.set(Some(e));
                }
                f64::NAN
            }
        },
        spec,
    );
    if let Some(e) = failure.get() {
        return Err(e);
    }
    Ok(result?.value)
}

/// `Σ_n w_n Σ_{k=1}^n C(n,k)(−1)^{k+1} / (u + k)`.
///
/// The inner sum equals `(1 − Π_{j=1}^n j/(u+j)) / u`, which is evaluated
/// without cancellation through `expm1` of a sum of `ln_1p` terms.
fn mixed_kernel(u: f64, weights: &[f64]) -> f64 {
    let mut log_prod = 0.0;
    let mut harmonic = 0.0;
    let mut total = 0.0;
    for (n, &w) in weights.iter().enumerate().skip(1) {
        let j = n as f64;
        log_prod += (u / j).ln_1p();
        harmonic += 1.0 / j;
        if w == 0.0 {
            continue;
        }
        let h = if u == 0.0 { harmonic } else { -libm::expm1(-log_prod) / u };
        total += w * h;
    }
    total
}

/// Mean `ln(1 + SINR)` of the scheduled user, in nats per channel use.
///
/// Each conditional rate `Σ_k C(n,k)(−1)^{k+1} ∫₀^∞ ψ(kx)/(x+1) dx` is rewritten
/// with `u = kx` as `∫₀^∞ ψ(u) Σ_k C(n,k)(−1)^{k+1}/(u+k) du`, whose inner sum
/// has the product form of `mixed_kernel`. One integral then covers all `n`.
pub fn rate_scheduled(model: &UserCountModel, p: &NetworkParams) -> Result<f64, AnalyticError> {
    let weights = model_weights(model, p)?;
    if weights.len() < 2 {
        return Ok(0.0);
    }
    let kernel = InterferenceKernel::new(p, weights[0])?;
    integrate_fallible(|u| Ok(kernel.psi(u)? * mixed_kernel(u, &weights)), &RATE_QUADRATURE)
}

/// Mean `ln(1 + SINR)` when the served user is picked uniformly among the
/// involved users, zero for cells without one.
pub fn rate_round_robin(model: &UserCountModel, p: &NetworkParams) -> Result<f64, AnalyticError> {
    let fn0 = model.empty_probability(p)?;
    if fn0 >= 1.0 {
        return Ok(0.0);
    }
    let kernel = InterferenceKernel::new(p, fn0)?;
    Ok((1.0 - fn0) * integrate_fallible(|u| Ok(kernel.psi(u)? / (1.0 + u)), &RATE_QUADRATURE)?)
}

/// The scheduled rate as `∫₀^∞ P(SINR > e^t − 1) dt` over the marginal CCDF.
///
/// Independent of [`rate_scheduled`]: the CCDF is summed over `k` at each
/// threshold first and integrated afterwards.
pub fn rate_scheduled_layer_cake(model: &UserCountModel, p: &NetworkParams) -> Result<f64, AnalyticError> {
    let weights = model_weights(model, p)?;
    if weights.len() < 2 {
        return Ok(0.0);
    }
    let eval = CcdfEvaluator::new(p, weights[0])?;
    let spec = QuadratureSpec::new(1e-10, 1e-12, 400)?;
    integrate_fallible(
        |t| {
            let theta = libm::expm1(t);
            if theta == 0.0 {
                return Ok(1.0 - weights[0]);
            }
            eval.averaged(theta, &weights)
        },
        &spec,
    )
}

/// Scheduled and round-robin rates and their ratio.
pub fn scheduling_gain(model: &UserCountModel, p: &NetworkParams) -> Result<RateReport, AnalyticError> {
    let scheduled = rate_scheduled(model, p)?;
    let round_robin = rate_round_robin(model, p)?;
    RateReport::new(scheduled, round_robin, *p, model.clone())
}
