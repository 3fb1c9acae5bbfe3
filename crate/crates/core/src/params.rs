//! Network parameters, unit conversions and derived geometry.
//!
//! Internally everything is SI-linear: meters, users or BSs per square meter,
//! and milliwatts. The human-facing units (dBm, per km², dB) appear only in
//! [`RawParams`] and the conversion helpers.

use core::f64::consts::PI;

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

/// Invalid network or threshold parameter.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("path-loss exponent must exceed 2, got {0}")]
    AlphaNotAboveTwo(f64),
    #[error("{name} must be non-negative, got {value}")]
    NegativeDensity { name: &'static str, value: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositivePower { name: &'static str, value: f64 },
    #[error("noise power must be non-negative, got {0}")]
    NegativeNoise(f64),
    #[error("SINR threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),
}

fn finite(x: f64, name: &'static str) -> Result<f64, ParamError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ParamError::NonFinite(name))
    }
}

/// `10^(x/10)`: power in dBm to milliwatts.
pub fn dbm_to_mw(x: f64) -> Result<f64, ParamError> {
    Ok(db_to_linear(finite(x, "power in dBm")?))
}

/// Milliwatts to dBm.
pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

pub fn db_to_linear(db: f64) -> f64 {
    10.0.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn per_km2_to_per_m2(x: f64) -> f64 {
    x * 1e-6
}

pub fn per_m2_to_per_km2(x: f64) -> f64 {
    x * 1e6
}

/// Radio and geometry parameters of the network, immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    lambda_bs: f64,
    lambda_ue: f64,
    alpha: f64,
    noise_power: f64,
    p_max: f64,
    rho_target: f64,
    achievable_radius: f64,
    interference_limited: bool,
}

impl NetworkParams {
    /// Builds parameters from SI-linear values.
    ///
    /// Densities are per square meter and powers in milliwatts.
    pub fn new(
        lambda_bs: f64,
        lambda_ue: f64,
        alpha: f64,
        noise_power: f64,
        p_max: f64,
        rho_target: f64,
    ) -> Result<Self, ParamError> {
        finite(lambda_bs, "BS density")?;
        finite(lambda_ue, "user density")?;
        finite(alpha, "path-loss exponent")?;
        finite(noise_power, "noise power")?;
        finite(p_max, "maximum transmit power")?;
        finite(rho_target, "power-control target")?;
        if !(alpha > 2.0) {
            return Err(ParamError::AlphaNotAboveTwo(alpha));
        }
        if lambda_bs < 0.0 {
            return Err(ParamError::NegativeDensity { name: "BS density", value: lambda_bs });
        }
        if lambda_ue < 0.0 {
            return Err(ParamError::NegativeDensity { name: "user density", value: lambda_ue });
        }
        if !(p_max > 0.0) {
            return Err(ParamError::NonPositivePower { name: "maximum transmit power", value: p_max });
        }
        if !(rho_target > 0.0) {
            return Err(ParamError::NonPositivePower { name: "power-control target", value: rho_target });
        }
        if noise_power < 0.0 {
            return Err(ParamError::NegativeNoise(noise_power));
        }
        let achievable_radius = (p_max / rho_target).powf(1.0 / alpha);
        finite(achievable_radius, "achievable radius")?;
        Ok(Self {
            lambda_bs,
            lambda_ue,
            alpha,
            noise_power,
            p_max,
            rho_target,
            achievable_radius,
            interference_limited: false,
        })
    }

    /// BSs per square meter.
    pub fn lambda_bs(&self) -> f64 {
        self.lambda_bs
    }

    /// Users per square meter.
    pub fn lambda_ue(&self) -> f64 {
        self.lambda_ue
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Configured noise power σ² in mW, regardless of the interference-limited flag.
    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// Noise power used by both engines: zero in interference-limited mode.
    pub fn effective_noise(&self) -> f64 {
        if self.interference_limited {
            0.0
        } else {
            self.noise_power
        }
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn rho_target(&self) -> f64 {
        self.rho_target
    }

    /// `R = (P_u/ρ_o)^{1/α}` in meters.
    pub fn achievable_radius(&self) -> f64 {
        self.achievable_radius
    }

    pub fn interference_limited(&self) -> bool {
        self.interference_limited
    }

    /// Mean number of BSs in a disc of radius `R`, `πλ_BS R²`.
    pub fn bs_in_range(&self) -> f64 {
        PI * self.lambda_bs * self.achievable_radius * self.achievable_radius
    }

    /// Mean number of users in a disc of radius `R`, `πλ_UE R²`.
    pub fn users_in_range(&self) -> f64 {
        PI * self.lambda_ue * self.achievable_radius * self.achievable_radius
    }

    /// `λ_UE / λ_BS`, or `None` without BSs.
    pub fn density_ratio(&self) -> Option<f64> {
        (self.lambda_bs > 0.0).then(|| self.lambda_ue / self.lambda_bs)
    }

    pub fn with_lambda_bs(&self, lambda_bs: f64) -> Result<Self, ParamError> {
        self.rebuild(lambda_bs, self.lambda_ue)
    }

    pub fn with_lambda_ue(&self, lambda_ue: f64) -> Result<Self, ParamError> {
        self.rebuild(self.lambda_bs, lambda_ue)
    }

    /// Same parameters with σ² treated as zero (or restored).
    pub fn with_interference_limited(&self, on: bool) -> Self {
        Self { interference_limited: on, ..*self }
    }

    fn rebuild(&self, lambda_bs: f64, lambda_ue: f64) -> Result<Self, ParamError> {
        let p = Self::new(lambda_bs, lambda_ue, self.alpha, self.noise_power, self.p_max, self.rho_target)?;
        Ok(p.with_interference_limited(self.interference_limited))
    }
}

/// Parameters in human-facing units: densities per km², powers in dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams {
    pub lambda_bs_per_km2: f64,
    pub lambda_ue_per_km2: f64,
    pub alpha: f64,
    pub noise_dbm: f64,
    pub pu_dbm: f64,
    pub rho_dbm: f64,
    pub interference_limited: bool,
}

impl Default for RawParams {
    /// The reference scenario: 20 BSs/km², 8 users/km², α = 4, σ² = −90 dBm,
    /// P_u = 23 dBm, ρ_o = −70 dBm.
    fn default() -> Self {
        Self {
            lambda_bs_per_km2: 20.0,
            lambda_ue_per_km2: 8.0,
            alpha: 4.0,
            noise_dbm: -90.0,
            pu_dbm: 23.0,
            rho_dbm: -70.0,
            interference_limited: false,
        }
    }
}

/// Converts raw parameters to SI-linear [`NetworkParams`].
pub fn make_params(raw: &RawParams) -> Result<NetworkParams, ParamError> {
    let p = NetworkParams::new(
        per_km2_to_per_m2(finite(raw.lambda_bs_per_km2, "BS density")?),
        per_km2_to_per_m2(finite(raw.lambda_ue_per_km2, "user density")?),
        raw.alpha,
        dbm_to_mw(raw.noise_dbm)?,
        dbm_to_mw(raw.pu_dbm)?,
        dbm_to_mw(raw.rho_dbm)?,
    )?;
    Ok(p.with_interference_limited(raw.interference_limited))
}

/// Probability that no BS lies within `R` of a typical user, `exp(−πλ_BS R²)`.
pub fn outage_probability(p: &NetworkParams) -> f64 {
    (-p.bs_in_range()).exp()
}

/// A linear SINR threshold θ > 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SinrThreshold(f64);

impl SinrThreshold {
    pub fn from_linear(theta: f64) -> Result<Self, ParamError> {
        finite(theta, "SINR threshold")?;
        if theta > 0.0 {
            Ok(Self(theta))
        } else {
            Err(ParamError::NonPositiveThreshold(theta))
        }
    }

    pub fn from_db(db: f64) -> Result<Self, ParamError> {
        Self::from_linear(db_to_linear(finite(db, "SINR threshold in dB")?))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        linear_to_db(self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn defaults(lambda_bs_per_km2: f64) -> NetworkParams {
        make_params(&RawParams { lambda_bs_per_km2, ..RawParams::default() }).unwrap()
    }

    #[test]
    fn dbm_examples() {
        assert_eq!(dbm_to_mw(0.0).unwrap(), 1.0);
        assert!((dbm_to_mw(23.0).unwrap() - 199.526_231_496_887_88).abs() < 1e-9);
        assert!((dbm_to_mw(-70.0).unwrap() - 1e-7).abs() < 1e-19);
        assert!(dbm_to_mw(f64::NAN).is_err());
        assert!(dbm_to_mw(f64::INFINITY).is_err());
    }

    #[test]
    fn achievable_radius_reference() {
        let p = defaults(20.0);
        // (10^9.3)^(1/4)
        let want = 10f64.powf(9.3 / 4.0);
        assert!((p.achievable_radius() - want).abs() < 1e-9);
        assert!((p.achievable_radius() - 211.35).abs() < 0.01);
        let unit = NetworkParams::new(1e-5, 1e-5, 3.3, 0.0, 5.0, 5.0).unwrap();
        assert!((unit.achievable_radius() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let raw = RawParams { alpha: 2.0, ..RawParams::default() };
        assert_eq!(make_params(&raw), Err(ParamError::AlphaNotAboveTwo(2.0)));
        let raw = RawParams { lambda_bs_per_km2: -1.0, ..RawParams::default() };
        assert!(matches!(make_params(&raw), Err(ParamError::NegativeDensity { .. })));
        let raw = RawParams { lambda_ue_per_km2: -1.0, ..RawParams::default() };
        assert!(matches!(make_params(&raw), Err(ParamError::NegativeDensity { .. })));
        assert!(NetworkParams::new(1.0, 1.0, 4.0, -1.0, 1.0, 1.0).is_err());
        assert!(NetworkParams::new(1.0, 1.0, 4.0, 0.0, 0.0, 1.0).is_err());
        assert!(SinrThreshold::from_linear(0.0).is_err());
    }

    #[test]
    fn outage_examples() {
        assert_eq!(outage_probability(&defaults(0.0)), 1.0);
        assert!((outage_probability(&defaults(20.0)) - 0.060_410_3).abs() < 1e-6);
        assert_eq!(outage_probability(&defaults(1e300)), 0.0);
    }

    #[test]
    fn interference_limited_zeroes_noise() {
        let p = defaults(20.0).with_interference_limited(true);
        assert_eq!(p.effective_noise(), 0.0);
        assert!(p.noise_power() > 0.0);
        assert!(p.with_lambda_ue(1e-5).unwrap().interference_limited());
    }

    proptest! {
        #[test]
        fn db_round_trip(db in -150.0f64..150.0) {
            let back = linear_to_db(db_to_linear(db));
            prop_assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
            let t = SinrThreshold::from_db(db).unwrap();
            prop_assert!((t.db() - db).abs() <= 1e-12 * db.abs().max(1.0));
        }

        #[test]
        fn density_round_trip(x in 0.0f64..1e4) {
            let back = per_m2_to_per_km2(per_km2_to_per_m2(x));
            prop_assert!((back - x).abs() <= 1e-12 * x);
        }

        #[test]
        fn radius_matches_definition(pu in -10.0f64..60.0, rho in -120.0f64..-20.0, alpha in 2.01f64..8.0) {
            let p = make_params(&RawParams { pu_dbm: pu, rho_dbm: rho, alpha, ..RawParams::default() }).unwrap();
            let want = (dbm_to_mw(pu).unwrap() / dbm_to_mw(rho).unwrap()).powf(1.0 / alpha);
            prop_assert!(((p.achievable_radius() - want) / want).abs() < 1e-12);
        }
    }
}
