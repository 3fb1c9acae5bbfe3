//! Lower incomplete gamma function.

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use super::SpecFunError;

const MAX_ITER: usize = 10_000;

/// `γ(a, b) = ∫₀ᵇ t^{a-1} e^{-t} dt` for `a > 0`, `b ≥ 0`.
///
/// Power series below `b = a + 1`, Lentz continued fraction for the upper
/// tail above it.
pub fn lower_incomplete_gamma(a: f64, b: f64) -> Result<f64, SpecFunError> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(SpecFunError::Domain("incomplete gamma requires a > 0"));
    }
    if !(b >= 0.0) {
        return Err(SpecFunError::Domain("incomplete gamma requires b >= 0"));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    if b.is_infinite() {
        return Ok(libm::tgamma(a));
    }
    if b < a + 1.0 {
        // γ(a,b) = b^a e^{-b} Σ b^n / (a (a+1) ... (a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= b / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                return Ok(sum * (a * b.ln() - b).exp());
            }
        }
        Err(SpecFunError::NonConvergence { estimate: sum, error: term })
    } else {
        let upper = upper_tail_fraction(a, b)?;
        Ok(libm::tgamma(a) - upper)
    }
}

/// `Γ(a, b)` by the modified Lentz algorithm.
fn upper_tail_fraction(a: f64, b: f64) -> Result<f64, SpecFunError> {
    const TINY: f64 = 1e-300;
    let mut bb = b + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / bb;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        bb += 2.0;
        d = an * d + bb;
        if d.abs() < TINY {
            d = TINY;
        }
        c = bb + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok((a * b.ln() - b).exp() * h);
        }
    }
    Err(SpecFunError::NonConvergence { estimate: h, error: f64::NAN })
}
