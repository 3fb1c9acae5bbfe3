//! Arbitrary-precision tier for alternating binomial sums too large for
//! quad-double.
//!
//! A sum of `n` terms cancels about `n` bits, so the terms are evaluated with
//! roughly `n + 128` bits of mantissa. [`MultiInterference`] is the
//! incomplete-beta form of `J(θ)` used by [`super::ExtendedInterference`],
//! carried out at the working precision.

use alloc::vec::Vec;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, WORD_BIT_SIZE};

use super::binomial::{BinomialSum, PRECISION_LIMIT};
use super::SpecFunError;

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision in bits for an `n`-term sum whose terms have exponents up
/// to `max_exponent` (so that `ψ = e^{-E}` loses `log2 E` bits to conditioning).
pub fn working_bits(n: u32, max_exponent: f64) -> usize {
    let conditioning = libm::log2(max_exponent.max(1.0)).ceil() as usize;
    let bits = n as usize + conditioning + 128;
    bits.div_ceil(WORD_BIT_SIZE) * WORD_BIT_SIZE
}

/// Precision and constants cache shared by one batch of evaluations.
pub struct MultiContext {
    bits: usize,
    cc: Consts,
}

impl core::fmt::Debug for MultiContext {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MultiContext").field("bits", &self.bits).finish()
    }
}

impl MultiContext {
    pub fn new(bits: usize) -> Result<Self, SpecFunError> {
        let cc = Consts::new().map_err(|_| SpecFunError::NonFinite)?;
        Ok(Self { bits, cc })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn from_u64(&self, x: u64) -> BigFloat {
        BigFloat::from_u64(x, self.bits)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    /// `a^b` for `a > 0`.
    pub fn pow(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.pow(b, self.bits, RM, &mut self.cc)
    }
}

/// Nearest `f64` (truncated to two mantissa words); NaN for non-numbers.
pub fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _, sign, exponent, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    // The mantissa is a fraction in [1/2, 1), most significant word last.
    let mut frac = 0.0;
    for (i, &w) in words.iter().rev().take(2).enumerate() {
        frac += libm::ldexp(w as f64, -((i as i32 + 1) * WORD_BIT_SIZE as i32));
    }
    let v = libm::ldexp(frac, exponent);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// `J(θ)` via the incomplete beta function at a fixed working precision.
pub struct MultiInterference {
    p: BigFloat,
    q: BigFloat,
    coeff_pq: Vec<BigFloat>,
    coeff_qp: Vec<BigFloat>,
    complete_beta: BigFloat,
    log2_half_terms: usize,
}

impl MultiInterference {
    /// Prepares the series for `α` at the precision of `ctx`.
    pub fn new(alpha: f64, ctx: &mut MultiContext) -> Result<Self, SpecFunError> {
        if !(alpha > 2.0 && alpha.is_finite()) {
            return Err(SpecFunError::Domain("path-loss exponent must exceed 2"));
        }
        let q = ctx.from_f64(2.0 / alpha);
        let p = ctx.sub(&ctx.from_u64(1), &q);
        // Terms needed for v = 1/2; smaller arguments use a prefix.
        let terms = ctx.bits() + 8;
        let coeff_pq = beta_coefficients(&p, terms, ctx);
        let coeff_qp = beta_coefficients(&q, terms, ctx);
        let mut this =
            Self { p, q, coeff_pq, coeff_qp, complete_beta: BigFloat::new(ctx.bits()), log2_half_terms: terms };
        let half = ctx.from_f64(0.5);
        let a = this.partial_beta(&half, false, ctx);
        let b = this.partial_beta(&half, true, ctx);
        this.complete_beta = ctx.add(&a, &b);
        Ok(this)
    }

    /// `B(v; p, q)` (or `B(v; q, p)` when `swapped`) for `0 ≤ v ≤ 1/2`.
    fn partial_beta(&self, v: &BigFloat, swapped: bool, ctx: &mut MultiContext) -> BigFloat {
        if v.is_zero() {
            return BigFloat::new(ctx.bits());
        }
        let (lead, coeff) = if swapped { (&self.q, &self.coeff_qp) } else { (&self.p, &self.coeff_pq) };
        let v0 = big_to_f64(v);
        let terms = if v0 > 0.0 {
            ((ctx.bits() as f64 / -libm::log2(v0)).ceil() as usize + 2).clamp(2, self.log2_half_terms)
        } else {
            1
        };
        let mut s = BigFloat::new(ctx.bits());
        for c in coeff[..terms].iter().rev() {
            s = ctx.add(c, &ctx.mul(v, &s));
        }
        let vp = ctx.pow(v, lead);
        ctx.mul(&s, &vp)
    }

    /// `J(θ)` for `θ ≥ 0`.
    pub fn eval(&self, theta: &BigFloat, ctx: &mut MultiContext) -> BigFloat {
        if !theta.is_positive() || theta.is_zero() {
            return BigFloat::new(ctx.bits());
        }
        let one = ctx.from_u64(1);
        let denom = ctx.add(&one, theta);
        let w = ctx.div(theta, &denom);
        let beta = if big_to_f64(&w) <= 0.5 {
            self.partial_beta(&w, false, ctx)
        } else {
            let tail = self.partial_beta(&ctx.div(&one, &denom), true, ctx);
            ctx.sub(&self.complete_beta, &tail)
        };
        let half_q = ctx.mul(&self.q, &ctx.from_f64(0.5));
        ctx.mul(&beta, &half_q)
    }
}

fn beta_coefficients(p: &BigFloat, terms: usize, ctx: &MultiContext) -> Vec<BigFloat> {
    let mut out = Vec::with_capacity(terms);
    let mut poch = ctx.from_u64(1); // (p)_m / m!
    for m in 0..terms {
        let pm = ctx.add(p, &ctx.from_u64(m as u64));
        out.push(ctx.div(&poch, &pm));
        poch = ctx.div(&ctx.mul(&poch, &pm), &ctx.from_u64(m as u64 + 1));
    }
    out
}

/// `Σ_{k=1}^n C(n,k)(-1)^{k+1} terms[k-1]` at the precision of `ctx`, with
/// binomial coefficients exact. Each term is assumed accurate to
/// `term_ulps` units in the last working bit.
pub fn alternating_binomial_multi(
    terms: &[BigFloat],
    term_ulps: f64,
    ctx: &MultiContext,
) -> Result<BinomialSum, SpecFunError> {
    let n = terms.len() as u32;
    if n == 0 {
        return Ok(BinomialSum { value: 0.0, error_bound: 0.0 });
    }
    let mut sum = BigFloat::new(ctx.bits());
    let mut magnitude = BigFloat::new(ctx.bits());
    let mut coeff = ctx.from_u64(1);
    for k in 1..=n {
        coeff = ctx.div(&ctx.mul(&coeff, &ctx.from_u64(u64::from(n - k + 1))), &ctx.from_u64(u64::from(k)));
        let product = ctx.mul(&coeff, &terms[k as usize - 1]);
        magnitude = ctx.add(&magnitude, &product.abs());
        sum = if k % 2 == 1 { ctx.add(&sum, &product) } else { ctx.sub(&sum, &product) };
    }
    let value = big_to_f64(&sum);
    if !value.is_finite() {
        return Err(SpecFunError::NonFinite);
    }
    // magnitude · 2^{-bits} · (term_ulps + 8), formed in the big exponent range.
    let mut scaled = magnitude;
    if let Some(e) = scaled.exponent() {
        scaled.set_exponent(e - ctx.bits() as i32);
    }
    let error_bound = big_to_f64(&scaled) * (term_ulps + 8.0) + f64::EPSILON * value.abs();
    if error_bound > PRECISION_LIMIT {
        return Err(SpecFunError::Precision { n, error_bound });
    }
    Ok(BinomialSum { value, error_bound })
}
