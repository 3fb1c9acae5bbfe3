use crate::params::NetworkParams;
use astro_float::BigFloat;

use crate::specfun::{
    interference_exponent_integral, lower_incomplete_gamma, ExtendedInterference, MultiContext, MultiInterference, Quad,
};

use super::AnalyticError;

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

fn check_probability(fn0: f64) -> Result<(), AnalyticError> {
    if (0.0..=1.0).contains(&fn0) {
        Ok(())
    } else {
        Err(AnalyticError::Domain("empty-cell probability must lie in [0, 1]"))
    }
}

/// `G = γ(2, πλ_BS R²) / (1 − e^{−πλ_BS R²})`.
///
/// This is `E[p^{2/α}] · πλ_BS / ρ_o^{2/α}` for the transmit power `p` of a
/// user in coverage. It tends to 1 as `P_u → ∞` and to 0 as `λ_BS → 0`.
pub fn power_moment_factor(p: &NetworkParams) -> Result<f64, AnalyticError> {
    let b = p.bs_in_range();
    if b == 0.0 {
        return Ok(0.0);
    }
    Ok(lower_incomplete_gamma(2.0, b)? / -libm::expm1(-b))
}

/// `L_I(s) = E[e^{−sI}]` for the interference at a typical BS.
///
/// `fn0` is the probability that a cell has no involved user; only the other
/// cells' scheduled users interfere.
pub fn laplace_interference(s: f64, p: &NetworkParams, fn0: f64) -> Result<f64, AnalyticError> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(AnalyticError::Domain("Laplace argument must be finite and non-negative"));
    }
    check_probability(fn0)?;
    let scale = 2.0 * (1.0 - fn0) * power_moment_factor(p)?;
    let u = s * p.rho_target();
    if scale == 0.0 || u == 0.0 {
        return Ok(1.0);
    }
    let j = interference_exponent_integral(u, p.alpha())?;
    Ok((-scale * u.powf(2.0 / p.alpha()) * j).exp())
}

/// `ψ(u) = e^{−uσ²/ρ_o} L_I(u/ρ_o)` for one parameter set and empty-cell
/// probability, in double or quad-double precision.
#[derive(Debug, Clone)]
pub struct InterferenceKernel {
    noise_ratio: f64,
    scale: f64,
    exponent: f64,
    alpha: f64,
    extended: ExtendedInterference,
}

impl InterferenceKernel {
    pub fn new(p: &NetworkParams, fn0: f64) -> Result<Self, AnalyticError> {
        check_probability(fn0)?;
        Ok(Self {
            noise_ratio: p.effective_noise() / p.rho_target(),
            scale: 2.0 * (1.0 - fn0) * power_moment_factor(p)?,
            exponent: 2.0 / p.alpha(),
            alpha: p.alpha(),
            extended: ExtendedInterference::new(p.alpha())?,
        })
    }

    /// The exponent `uσ²/ρ_o + 2(1 − f_N(0)) G u^{2/α} J(u)`, so that `ψ(u) = e^{−E(u)}`.
    pub fn exponent(&self, u: f64) -> Result<f64, AnalyticError> {
        if u == 0.0 {
            return Ok(0.0);
        }
        let mut e = u * self.noise_ratio;
        if self.scale > 0.0 {
            e += self.scale * u.powf(self.exponent) * interference_exponent_integral(u, self.alpha)?;
        }
        Ok(e)
    }

    pub fn psi(&self, u: f64) -> Result<f64, AnalyticError> {
        Ok((-self.exponent(u)?).exp())
    }

    /// `ψ(u)` to roughly 55 significant digits.
    pub fn psi_extended(&self, u: Quad) -> Quad {
        if u.is_zero() {
            return Quad::ONE;
        }
        let mut e = u * self.noise_ratio;
        if self.scale > 0.0 {
            let power = if self.exponent == 0.5 { u.sqrt() } else { u.powf(Quad::from_f64(self.exponent)) };
            e += power * self.extended.eval(u) * self.scale;
        }
        (-e).exp()
    }

    /// `ψ(u)` at the working precision of `ctx`, given `J` prepared for the same
    /// path-loss exponent and precision.
    pub fn psi_multi(&self, u: &BigFloat, j: &MultiInterference, ctx: &mut MultiContext) -> BigFloat {
        if u.is_zero() {
            return ctx.from_u64(1);
        }
        let mut e = ctx.mul(u, &ctx.from_f64(self.noise_ratio));
        if self.scale > 0.0 {
            let power = if self.exponent == 0.5 { ctx.sqrt(u) } else { ctx.pow(u, &ctx.from_f64(self.exponent)) };
            let jv = j.eval(u, ctx);
            let part = ctx.mul(&ctx.mul(&power, &jv), &ctx.from_f64(self.scale));
            e = ctx.add(&e, &part);
        }
        ctx.exp(&e.neg())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, RawParams};

    fn scenario(lambda_bs_per_km2: f64) -> NetworkParams {
        make_params(&RawParams { lambda_bs_per_km2, ..RawParams::default() }).unwrap()
    }

    #[test]
    fn trivial_limits() {
        let p = scenario(20.0);
        assert_eq!(laplace_interference(0.0, &p, 0.3).unwrap(), 1.0);
        for s in [1e3, 1e7, 1e9] {
            assert_eq!(laplace_interference(s, &p, 1.0).unwrap(), 1.0);
        }
        assert_eq!(laplace_interference(1e7, &scenario(0.0), 0.0).unwrap(), 1.0);
        assert!(laplace_interference(-1.0, &p, 0.0).is_err());
        assert!(laplace_interference(1.0, &p, 1.5).is_err());
    }

    #[test]
    fn moment_factor_limits() {
        // γ(2,b)/(1-e^{-b}) at b = πλR² for the dense reference scenario
        let p = scenario(20.0);
        let b = p.bs_in_range();
        let want = (1.0 - (-b).exp() * (1.0 + b)) / (1.0 - (-b).exp());
        assert!((power_moment_factor(&p).unwrap() - want).abs() < 1e-14);
        let huge = make_params(&RawParams { pu_dbm: 80.0, ..RawParams::default() }).unwrap();
        assert!((power_moment_factor(&huge).unwrap() - 1.0).abs() < 1e-14);
        let sparse = scenario(1e-9);
        assert!((power_moment_factor(&sparse).unwrap() - sparse.bs_in_range() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_four_unbounded_power_is_arctan_form() {
        let p = make_params(&RawParams { pu_dbm: 80.0, interference_limited: true, ..RawParams::default() }).unwrap();
        let k = InterferenceKernel::new(&p, 0.0).unwrap();
        for theta in [0.01, 0.5, 1.0, 10.0, 100.0] {
            let want = (-theta.sqrt() * theta.sqrt().atan()).exp();
            let s = theta / p.rho_target();
            assert!((laplace_interference(s, &p, 0.0).unwrap() - want).abs() < 1e-12);
            assert!((k.psi(theta).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn extended_kernel_matches_double() {
        for alpha in [3.0, 4.0, 4.7] {
            let p = make_params(&RawParams { alpha, ..RawParams::default() }).unwrap();
            let k = InterferenceKernel::new(&p, 0.4).unwrap();
            for u in [1e-3, 0.3, 1.0, 9.0, 250.0] {
                let a = k.psi(u).unwrap();
                let b = k.psi_extended(Quad::from_f64(u)).to_f64();
                assert!(((a - b) / b).abs() < 1e-12, "alpha {alpha} u {u}: {a} vs {b}");
            }
        }
    }
}
