//! Alternating binomial sums `Σ_{k=1}^n C(n,k) (-1)^{k+1} t_k`.
//!
//! These sums cancel catastrophically: the partial terms reach `C(n, n/2)`
//! while the result is at most one. The error bound carried with every result
//! is `Σ C(n,k) |t_k| · (ε_term + ε_arith)`, and any sum whose bound exceeds
//! [`PRECISION_LIMIT`] is rejected rather than returned.

use super::extended::Quad;
use super::SpecFunError;

/// Largest tolerated absolute cancellation error.
pub const PRECISION_LIMIT: f64 = 1e-9;

/// Largest `n` summed in double precision; larger sums use quad-double.
pub const DOUBLE_PRECISION_MAX_N: u32 = 25;

/// A term type of the alternating sum together with its relative accuracy.
pub trait BinomialTerm: Copy {
    /// Relative error assumed for each term.
    const REL_ERR: f64;
    fn to_quad(self) -> Quad;
    fn to_f64(self) -> f64;
}

impl BinomialTerm for f64 {
    const REL_ERR: f64 = 4.0 * f64::EPSILON;
    fn to_quad(self) -> Quad {
        Quad::from_f64(self)
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl BinomialTerm for Quad {
    const REL_ERR: f64 = 1e-55;
    fn to_quad(self) -> Quad {
        self
    }
    fn to_f64(self) -> f64 {
        Quad::to_f64(self)
    }
}

/// Value and cancellation error bound of an alternating binomial sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialSum {
    pub value: f64,
    pub error_bound: f64,
}

/// `Σ_{k=1}^n C(n,k)(-1)^{k+1} term(k)`, unclamped, with terms of relative
/// accuracy `term_rel_err`.
///
/// Double-precision terms with `n ≤ 25` are combined with compensated
/// summation; everything else is accumulated in quad-double with exact
/// binomial coefficients.
pub fn alternating_binomial_combination<T, F>(
    n: u32,
    mut term: F,
    term_rel_err: f64,
) -> Result<BinomialSum, SpecFunError>
where
    T: BinomialTerm,
    F: FnMut(u32) -> T,
{
    if n == 0 {
        return Ok(BinomialSum { value: 0.0, error_bound: 0.0 });
    }
    let double_terms = T::REL_ERR >= f64::EPSILON;
    let (value, magnitude, arith_eps) = if double_terms && n <= DOUBLE_PRECISION_MAX_N {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut magnitude = 0.0f64;
        let mut coeff = 1.0f64;
        for k in 1..=n {
            coeff = coeff * f64::from(n - k + 1) / f64::from(k);
            let t = term(k).to_f64();
            let signed = if k % 2 == 1 { coeff * t } else { -coeff * t };
            magnitude += (coeff * t).abs();
            // Neumaier's compensated sum
            let s = sum + signed;
            comp += if sum.abs() >= signed.abs() { (sum - s) + signed } else { (signed - s) + sum };
            sum = s;
        }
        (sum + comp, magnitude, 4.0 * f64::EPSILON)
    } else {
        let mut sum = Quad::ZERO;
        let mut magnitude = 0.0f64;
        let mut coeff = Quad::ONE;
        for k in 1..=n {
            coeff = (coeff * f64::from(n - k + 1)).div_f64(f64::from(k));
            let t = term(k).to_quad();
            let product = coeff * t;
            magnitude += product.to_f64().abs();
            if k % 2 == 1 {
                sum += product;
            } else {
                sum -= product;
            }
        }
        (sum.to_f64(), magnitude, 8.0 * Quad::EPSILON)
    };
    let error_bound = magnitude * (term_rel_err + arith_eps) + f64::EPSILON * value.abs();
    if !value.is_finite() {
        return Err(SpecFunError::NonFinite);
    }
    if error_bound > PRECISION_LIMIT {
        return Err(SpecFunError::Precision { n, error_bound });
    }
    Ok(BinomialSum { value, error_bound })
}

/// `Σ_{k=1}^n C(n,k)(-1)^{k+1} term(k)` for terms in `[0, 1]`, clamped to
/// `[0, 1]` once the precision contract is met.
pub fn alternating_binomial_sum<T, F>(n: u32, term: F) -> Result<f64, SpecFunError>
where
    T: BinomialTerm,
    F: FnMut(u32) -> T,
{
    let s = alternating_binomial_combination(n, term, T::REL_ERR)?;
    Ok(s.value.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_and_unit_terms() {
        assert_eq!(alternating_binomial_sum(1, |_| 0.37f64).unwrap(), 0.37);
        for n in 1..=15 {
            assert!((alternating_binomial_sum(n, |_| 1.0f64).unwrap() - 1.0).abs() < 1e-15);
        }
        // Unit double terms at n = 25 carry a bound of 2^25 ulps.
        assert!(alternating_binomial_sum(25, |_| 1.0f64).is_err());
        for n in [16, 25, 60, 100] {
            assert!((alternating_binomial_sum(n, |_| Quad::ONE).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_terms_n10() {
        let v = alternating_binomial_sum(10, |k| 0.5f64.powi(k as i32)).unwrap();
        assert!((v - (1.0 - 0.5f64.powi(10))).abs() < 1e-14);
        assert!((v - 0.999_023_437_5).abs() < 1e-14);
    }

    #[test]
    fn double_terms_beyond_limit_report_precision_failure() {
        let r = alternating_binomial_sum(60, |k| 0.9f64.powi(k as i32));
        assert!(matches!(r, Err(SpecFunError::Precision { n: 60, .. })));
    }

    #[test]
    fn quad_terms_survive_n_100() {
        let x = Quad::from_f64(0.999);
        let v = alternating_binomial_sum(100, |k| x.powi(k)).unwrap();
        let want = 1.0 - (1.0f64 - 0.999).powi(100);
        assert!((v - want).abs() < 1e-12);
    }
}
