//! Quad-double arithmetic (about 62 significant decimal digits).
//!
//! A [`Quad`] is the unevaluated sum of four `f64` words. Every operation
//! first forms an exact (or nearly exact) floating-point expansion of the
//! result with error-free transformations, compresses it, and keeps the four
//! leading words. Only the handful of operations needed by the binomial
//! Laplace sums are provided: field arithmetic, `sqrt`, `exp`, `ln`, `powf`
//! and `atan`.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

// Shadowed by inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

/// ln 2 split into four non-overlapping words.
const LN2: Quad = Quad([
    core::f64::consts::LN_2,
    2.319_046_813_846_299_6e-17,
    5.707_708_438_416_212e-34,
    -3.582_432_210_601_811_4e-50,
]);

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

const CAP: usize = 48;

/// Nonoverlapping expansion, smallest magnitude first, zeros eliminated.
#[derive(Clone, Copy)]
struct Expansion {
    len: usize,
    c: [f64; CAP],
}

impl Expansion {
    fn new() -> Self {
        Self { len: 0, c: [0.0; CAP] }
    }

    fn from_quad(q: &Quad) -> Self {
        let mut e = Self::new();
        for &w in q.0.iter().rev() {
            e.grow(w);
        }
        e
    }

    /// Exact addition of one double (Shewchuk's GROW-EXPANSION, zero-eliminating).
    fn grow(&mut self, b: f64) {
        if b == 0.0 {
            return;
        }
        if self.len + 1 >= CAP {
            self.compress();
            self.truncate(16);
        }
        let mut q = b;
        let mut out = 0;
        for i in 0..self.len {
            let (s, h) = two_sum(q, self.c[i]);
            if h != 0.0 {
                self.c[out] = h;
                out += 1;
            }
            q = s;
        }
        if q != 0.0 || out == 0 {
            self.c[out] = q;
            out += 1;
        }
        self.len = out;
        if self.len > 12 {
            self.compress();
        }
    }

    fn grow_prod(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.grow(e);
        self.grow(p);
    }

    /// Shewchuk's COMPRESS: same value, fewer and nonadjacent components.
    #[allow(clippy::needless_range_loop)]
    fn compress(&mut self) {
        if self.len < 2 {
            return;
        }
        let m = self.len;
        let mut h = [0.0; CAP];
        let mut q = self.c[m - 1];
        let mut bottom = m - 1;
        for i in (0..m - 1).rev() {
            let (qn, small) = fast_two_sum(q, self.c[i]);
            if small != 0.0 {
                h[bottom] = qn;
                bottom -= 1;
                q = small;
            } else {
                q = qn;
            }
        }
        let mut top = 0;
        for i in bottom + 1..m {
            let (qn, small) = fast_two_sum(h[i], q);
            if small != 0.0 {
                self.c[top] = small;
                top += 1;
            }
            q = qn;
        }
        self.c[top] = q;
        self.len = top + 1;
    }

    /// Drop all but the `keep` largest components.
    fn truncate(&mut self, keep: usize) {
        if self.len > keep {
            let drop = self.len - keep;
            self.c.copy_within(drop..self.len, 0);
            self.len = keep;
        }
    }

    fn leading(&self) -> f64 {
        if self.len == 0 {
            0.0
        } else {
            self.c[self.len - 1]
        }
    }

    fn to_quad(mut self) -> Quad {
        self.compress();
        let mut w = [0.0; 4];
        for (slot, i) in (0..self.len).rev().take(4).enumerate() {
            w[slot] = self.c[i];
        }
        Quad(w)
    }
}

/// Extended-precision real: four `f64` words, leading word first.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Quad(pub [f64; 4]);

impl Quad {
    pub const ZERO: Quad = Quad([0.0; 4]);
    pub const ONE: Quad = Quad([1.0, 0.0, 0.0, 0.0]);

    /// Unit roundoff of the representation, 2^-211.
    pub const EPSILON: f64 = 3.038_582_046_234_235e-64;

    pub fn from_f64(x: f64) -> Self {
        Quad([x, 0.0, 0.0, 0.0])
    }

    pub fn from_u64(x: u64) -> Self {
        let hi = (x >> 32) as f64 * 4_294_967_296.0;
        let lo = (x & 0xffff_ffff) as f64;
        let mut e = Expansion::new();
        e.grow(lo);
        e.grow(hi);
        e.to_quad()
    }

    /// Leading word; the value rounded to double precision (to within one ulp).
    pub fn to_f64(self) -> f64 {
        ((self.0[3] + self.0[2]) + self.0[1]) + self.0[0]
    }

    pub fn words(self) -> [f64; 4] {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0[0].is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.0[0] == 0.0
    }

    pub fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiply by an exact power of two.
    pub fn ldexp(self, k: i32) -> Self {
        let s = libm::ldexp(1.0, k);
        Quad([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let mut e = Expansion::new();
        for &w in self.0.iter().rev() {
            e.grow_prod(w, b);
        }
        e.to_quad()
    }

    pub fn div_f64(self, b: f64) -> Self {
        let mut r = Expansion::from_quad(&self);
        let mut q = Expansion::new();
        for _ in 0..5 {
            let qi = r.leading() / b;
            if qi == 0.0 {
                break;
            }
            q.grow(qi);
            r.grow_prod(-qi, b);
            r.compress();
            r.truncate(12);
        }
        q.to_quad()
    }

    pub fn recip(self) -> Self {
        Quad::ONE / self
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.0[0] <= 0.0 {
            return if self.0[0] == 0.0 { Quad::ZERO } else { Quad::from_f64(f64::NAN) };
        }
        let mut y = Quad::from_f64(self.0[0].sqrt());
        for _ in 0..3 {
            y = y + (self - y.square()) / y.mul_f64(2.0);
        }
        y
    }

    pub fn exp(self) -> Self {
        let x0 = self.0[0];
        if x0 > 709.0 {
            return Quad::from_f64(f64::INFINITY);
        }
        if x0 < -745.0 {
            return Quad::ZERO;
        }
        let k = (x0 / LN2.0[0]).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-10);
        // Taylor series in Horner form; |r| < 3.4e-4 so 18 terms exceed 2^-215.
        let mut s = Quad::ONE;
        for m in (1..=18).rev() {
            s = Quad::ONE + (r * s).div_f64(m as f64);
        }
        for _ in 0..10 {
            s = s.square();
        }
        s.ldexp(k as i32)
    }

    /// Natural logarithm of a positive value (Newton on `exp`).
    pub fn ln(self) -> Self {
        if self.0[0] <= 0.0 {
            return Quad::from_f64(f64::NAN);
        }
        let mut y = Quad::from_f64(self.0[0].ln());
        for _ in 0..3 {
            y = y + self * (-y).exp() - Quad::ONE;
        }
        y
    }

    /// `self^e` for positive `self`.
    pub fn powf(self, e: Quad) -> Self {
        if self.is_zero() {
            return if e.0[0] > 0.0 { Quad::ZERO } else { Quad::ONE };
        }
        (e * self.ln()).exp()
    }

    pub fn powi(self, mut n: u32) -> Self {
        let mut base = self;
        let mut acc = Quad::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base = base.square();
            n >>= 1;
        }
        acc
    }

    pub fn atan(self) -> Self {
        if self.0[0] < 0.0 {
            return -(-self).atan();
        }
        // Halve the angle until the argument is below 2^-8, then sum the series.
        let mut x = self;
        let mut halvings = 0;
        while x.0[0] > 3.9e-3 {
            x = x / (Quad::ONE + (Quad::ONE + x.square()).sqrt());
            halvings += 1;
        }
        let x2 = x.square();
        let mut s = Quad::ZERO;
        for m in (0..=14).rev() {
            let coeff = Quad::ONE.div_f64((2 * m + 1) as f64);
            s = coeff - x2 * s;
        }
        (x * s).ldexp(halvings)
    }
}

impl From<f64> for Quad {
    fn from(x: f64) -> Self {
        Quad::from_f64(x)
    }
}

impl From<u64> for Quad {
    fn from(x: u64) -> Self {
        Quad::from_u64(x)
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quad({:e} + {:e} + {:e} + {:e})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        let mut e = Expansion::from_quad(&self);
        for &w in rhs.0.iter().rev() {
            e.grow(w);
        }
        e.to_quad()
    }
}

impl Sub for Quad {
    type Output = Quad;
    fn sub(self, rhs: Quad) -> Quad {
        self + (-rhs)
    }
}

impl Mul for Quad {
    type Output = Quad;
    #[allow(clippy::needless_range_loop)]
    fn mul(self, rhs: Quad) -> Quad {
        let (a, b) = (self.0, rhs.0);
        let mut e = Expansion::new();
        // Smallest contributions first; terms below 2^-265 relative are dropped.
        for s in (0..=4).rev() {
            for i in 0..4 {
                if s < i || s - i > 3 {
                    continue;
                }
                let j = s - i;
                if s == 4 {
                    e.grow(a[i] * b[j]);
                } else {
                    e.grow_prod(a[i], b[j]);
                }
            }
        }
        e.to_quad()
    }
}

impl Div for Quad {
    type Output = Quad;
    fn div(self, rhs: Quad) -> Quad {
        let b0 = rhs.0[0];
        let mut r = Expansion::from_quad(&self);
        let mut q = Expansion::new();
        for _ in 0..5 {
            let qi = r.leading() / b0;
            if qi == 0.0 || !qi.is_finite() {
                if !qi.is_finite() {
                    q.grow(qi);
                }
                break;
            }
            q.grow(qi);
            for &bw in rhs.0.iter().rev() {
                r.grow_prod(-qi, bw);
            }
            r.compress();
            r.truncate(12);
        }
        q.to_quad()
    }
}

impl Add<f64> for Quad {
    type Output = Quad;
    fn add(self, rhs: f64) -> Quad {
        let mut e = Expansion::from_quad(&self);
        e.grow(rhs);
        e.to_quad()
    }
}

impl Sub<f64> for Quad {
    type Output = Quad;
    fn sub(self, rhs: f64) -> Quad {
        self + (-rhs)
    }
}

impl Mul<f64> for Quad {
    type Output = Quad;
    fn mul(self, rhs: f64) -> Quad {
        self.mul_f64(rhs)
    }
}

impl Div<f64> for Quad {
    type Output = Quad;
    fn div(self, rhs: f64) -> Quad {
        self.div_f64(rhs)
    }
}

impl AddAssign for Quad {
    fn add_assign(&mut self, rhs: Quad) {
        *self = *self + rhs;
    }
}

impl SubAssign for Quad {
    fn sub_assign(&mut self, rhs: Quad) {
        *self = *self - rhs;
    }
}

impl MulAssign for Quad {
    fn mul_assign(&mut self, rhs: Quad) {
        *self = *self * rhs;
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Quad) -> Option<Ordering> {
        let d = (*self - *other).0[0];
        d.partial_cmp(&0.0)
    }
}
