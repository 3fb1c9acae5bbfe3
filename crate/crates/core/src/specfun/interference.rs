//! The interference exponent integral `J(θ) = ∫_{θ^{-1/α}}^∞ y / (y^α + 1) dy`
//! and the Gauss hypergeometric family `₂F₁(1, 1-2/α; 2-2/α; -z)` it equals.
//!
//! `J` is the workhorse. In double precision, for `θ ≤ 1` it is integrated
//! numerically after the substitution `t = y^{-(α-2)}`, which gives
//! `J(θ) = (α-2)^{-1} ∫₀^{θ^{1-2/α}} dt / (1 + t^{α/(α-2)})`, a bounded integrand on
//! a subinterval of `[0, 1]`. For `θ > 1` the head `∫₀^{θ^{-1/α}} y/(1+y^α) dy`
//! is subtracted from the closed-form `J(∞)`. [`ExtendedInterference`] evaluates the
//! same quantity to quad-double precision as an incomplete beta function.
//! The hypergeometric series is kept as an independent cross-check.

use alloc::vec::Vec;

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use super::extended::Quad;
use super::quadrature::{integrate, QuadratureSpec};
use super::SpecFunError;

fn check_alpha(alpha: f64) -> Result<(), SpecFunError> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(SpecFunError::Domain("path-loss exponent must exceed 2"))
    }
}

/// `J(θ_k)` in double precision (relative accuracy around 1e-14).
pub fn interference_exponent_integral(theta_k: f64, alpha: f64) -> Result<f64, SpecFunError> {
    check_alpha(alpha)?;
    if !(theta_k >= 0.0) {
        return Err(SpecFunError::Domain("threshold must be non-negative"));
    }
    if theta_k == 0.0 {
        return Ok(0.0);
    }
    let spec = QuadratureSpec::tight();
    if theta_k <= 1.0 {
        let excess = alpha - 2.0;
        let upper = theta_k.powf(excess / alpha);
        let power = alpha / excess;
        return Ok(integrate(|t| 1.0 / (1.0 + t.powf(power)), 0.0, upper, &spec)?.value / excess);
    }
    // Above one, subtract the short head [0, θ^{-1/α}] from the full integral.
    let lower = theta_k.powf(-1.0 / alpha);
    let head = integrate(|y| y / (1.0 + y.powf(alpha)), 0.0, lower, &spec)?.value;
    Ok(full_interference_integral(alpha) - head)
}

/// `J(∞) = ∫₀^∞ y/(1+y^α) dy = (π/α) / sin(2π/α)`.
pub fn full_interference_integral(alpha: f64) -> f64 {
    let pi = core::f64::consts::PI;
    pi / alpha / (2.0 * pi / alpha).sin()
}

/// `₂F₁(1, b; b+1; -z)` with `b = 1 - 2/α`, summed as a power series.
///
/// For `z ≤ 2` the Pfaff transform `(1+z)^{-1} ₂F₁(1, 1; b+1; z/(1+z))` is used;
/// above that the expansion in `1/z`,
/// `bπ/sin(πb) z^{-b} - (b/z) Σ (-1/z)^n / (n+1-b)`.
pub fn gauss_2f1_special(theta_k: f64, alpha: f64) -> Result<f64, SpecFunError> {
    check_alpha(alpha)?;
    if !(theta_k >= 0.0) {
        return Err(SpecFunError::Domain("argument must be non-negative"));
    }
    let b = 1.0 - 2.0 / alpha;
    let z = theta_k;
    if z == 0.0 {
        return Ok(1.0);
    }
    if z <= 2.0 {
        let w = z / (1.0 + z);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..2000 {
            term *= (n as f64 + 1.0) / (b + 1.0 + n as f64) * w;
            sum += term;
            if term < 1e-17 * sum {
                return Ok(sum / (1.0 + z));
            }
        }
        Err(SpecFunError::NonConvergence { estimate: sum / (1.0 + z), error: term })
    } else {
        let pi = core::f64::consts::PI;
        let lead = b * pi / (pi * b).sin() * z.powf(-b);
        let inv = 1.0 / z;
        let mut power = 1.0;
        let mut tail = 0.0;
        for n in 0..2000 {
            let t = power / (n as f64 + 1.0 - b);
            tail += t;
            if t.abs() < 1e-17 * tail.abs() {
                return Ok(lead - b * inv * tail);
            }
            power *= -inv;
        }
        Err(SpecFunError::NonConvergence { estimate: lead - b * inv * tail, error: power })
    }
}

/// Quad-double evaluation of `J(θ)` for one path-loss exponent.
///
/// With `q = 2/α`, `p = 1 - q` and `w = θ/(1+θ)`,
/// `J(θ) = (q/2) B(w; p, q)` where `B(w; p, q) = w^p Σ_m (p)_m / m! · w^m / (p+m)`.
/// For `w > 1/2` the reflection `B(w; p, q) = B(p, q) - B(1-w; q, p)` keeps the
/// series ratio at most one half. Coefficient tables are built once.
#[derive(Debug, Clone)]
pub struct ExtendedInterference {
    alpha: f64,
    p: Quad,
    q: Quad,
    coeff_pq: Vec<Quad>,
    coeff_qp: Vec<Quad>,
    complete_beta: Quad,
}

const SERIES_TERMS: usize = 232;

impl ExtendedInterference {
    pub fn new(alpha: f64) -> Result<Self, SpecFunError> {
        check_alpha(alpha)?;
        let q = Quad::from_f64(2.0 / alpha);
        let p = Quad::ONE - q;
        let coeff_pq = beta_coefficients(p);
        let coeff_qp = beta_coefficients(q);
        let half = Quad::from_f64(0.5);
        let mut this = Self { alpha, p, q, coeff_pq, coeff_qp, complete_beta: Quad::ZERO };
        this.complete_beta = this.partial_beta(half, false) + this.partial_beta(half, true);
        Ok(this)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `B(v; p, q)` (or `B(v; q, p)` when `swapped`) for `0 ≤ v ≤ 1/2`.
    fn partial_beta(&self, v: Quad, swapped: bool) -> Quad {
        if v.is_zero() {
            return Quad::ZERO;
        }
        let (lead, coeff) = if swapped { (self.q, &self.coeff_qp) } else { (self.p, &self.coeff_pq) };
        let v0 = v.to_f64();
        let terms = if v0 <= 0.0 {
            1
        } else {
            ((-216.0 * core::f64::consts::LN_2 / v0.ln()).ceil() as usize + 2).clamp(2, SERIES_TERMS)
        };
        let mut s = Quad::ZERO;
        for c in coeff[..terms].iter().rev() {
            s = *c + v * s;
        }
        s * v.powf(lead)
    }

    /// `J(θ)` to about 60 significant digits.
    pub fn eval(&self, theta: Quad) -> Quad {
        if theta.to_f64() <= 0.0 {
            return Quad::ZERO;
        }
        let denom = Quad::ONE + theta;
        let w = theta / denom;
        let beta = if w.to_f64() <= 0.5 {
            self.partial_beta(w, false)
        } else {
            self.complete_beta - self.partial_beta(Quad::ONE / denom, true)
        };
        beta * self.q.ldexp(-1)
    }
}

fn beta_coefficients(p: Quad) -> Vec<Quad> {
    let mut out = Vec::with_capacity(SERIES_TERMS);
    let mut poch = Quad::ONE; // (p)_m / m!
    for m in 0..SERIES_TERMS {
        let mf = Quad::from_f64(m as f64);
        out.push(poch / (p + mf));
        poch = poch * (p + mf) / (mf + Quad::ONE);
    }
    out
}
