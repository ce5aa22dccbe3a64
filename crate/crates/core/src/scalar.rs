//! Scalars: plain `f64` and outward-rounded interval enclosures.
//!
//! Every numerical routine in this crate is generic over [`Scalar`], so the
//! same code path runs either in floating point or in interval arithmetic.
//! In interval mode `+`, `-`, `*` and `/` are rounded outward exactly: the
//! rounding error of the nearest-rounded result is recovered with an
//! error-free transformation (two-sum, fused multiply-add) and the endpoint
//! is nudged one ulp only when the result was inexact. `exp` and `ln` come
//! from `libm`, whose results are within one ulp; their endpoints are widened
//! by [`TRANSCENDENTAL_ULPS`] ulps.

use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Number of ulps by which `exp`/`ln` endpoints are widened in interval mode.
pub const TRANSCENDENTAL_ULPS: u32 = 2;

/// Arithmetic mode of a [`Scalar`] type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Float,
    Interval,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Interval => "interval",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Real numbers as used by the analysis: either a double or an enclosure.
pub trait Scalar:
    Copy
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    /// Exact embedding of a double.
    fn from_f64(x: f64) -> Self;
    fn exp(self) -> Self;
    /// Natural logarithm; the argument must be positive.
    fn ln(self) -> Self;
    fn abs(self) -> Self;
    fn max(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;
    /// Multiplication by `2^k`, exact barring overflow/underflow.
    fn scale_pow2(self, k: i32) -> Self;
    fn lower(self) -> f64;
    fn upper(self) -> f64;
    fn mid(self) -> f64;
    /// Enclosure (or value) containing both `self` and `other`.
    fn hull(self, other: Self) -> Self;
    /// The enclosure itself in interval mode, its midpoint in float mode.
    fn from_enclosure(e: Interval) -> Self;
    /// Point interval in float mode, the value itself in interval mode.
    fn to_interval(self) -> Interval;

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    /// Upper bound on `|self|`.
    #[inline]
    fn magnitude(self) -> f64 {
        self.lower().abs().max(self.upper().abs())
    }
    /// Width of the enclosure; zero in float mode.
    #[inline]
    fn width(self) -> f64 {
        self.upper() - self.lower()
    }
    /// True when the value is known to be exactly zero.
    #[inline]
    fn is_zero(self) -> bool {
        self.lower() == 0.0 && self.upper() == 0.0
    }
    /// `self^p` for positive `self`.
    #[inline]
    fn powf(self, p: Self) -> Self {
        (p * self.ln()).exp()
    }
    #[inline]
    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn exp(self) -> Self {
        libm::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        libm::log(self)
    }
    #[inline]
    fn abs(self) -> Self {
        libm::fabs(self)
    }
    #[inline]
    fn max(self, other: Self) -> Self {
        libm::fmax(self, other)
    }
    #[inline]
    fn min(self, other: Self) -> Self {
        libm::fmin(self, other)
    }
    #[inline]
    fn scale_pow2(self, k: i32) -> Self {
        libm::scalbn(self, k)
    }
    #[inline]
    fn lower(self) -> f64 {
        self
    }
    #[inline]
    fn upper(self) -> f64 {
        self
    }
    #[inline]
    fn mid(self) -> f64 {
        self
    }
    #[inline]
    fn hull(self, other: Self) -> Self {
        0.5 * (self + other)
    }

    fn from_enclosure(e: Interval) -> Self {
        e.mid()
    }

    fn to_interval(self) -> Interval {
        Interval::point(self)
    }
}

/// Closed interval `[lo, hi]` with outward-rounded arithmetic.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

// Directed rounding of elementary operations from the nearest-rounded result
// and its exact error term.

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn round_pair(value: f64, err: f64) -> (f64, f64) {
    if !value.is_finite() || err.is_nan() {
        return (value, value);
    }
    match err.partial_cmp(&0.0) {
        Some(Ordering::Greater) => (value, value.next_up()),
        Some(Ordering::Less) => (value.next_down(), value),
        _ => (value, value),
    }
}

#[inline]
fn add_down_up(a: f64, b: f64) -> (f64, f64) {
    let (s, e) = two_sum(a, b);
    round_pair(s, e)
}

#[inline]
fn mul_down_up(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if !p.is_finite() {
        return (p, p);
    }
    let e = libm::fma(a, b, -p);
    round_pair(p, e)
}

#[inline]
fn div_down_up(a: f64, b: f64) -> (f64, f64) {
    let q = a / b;
    if !q.is_finite() || q == 0.0 && a != 0.0 {
        // Underflow or overflow: fall back to one-ulp widening.
        return (q.next_down(), q.next_up());
    }
    // a = q*b + r exactly; sign of r/b tells on which side the true quotient lies.
    let r = libm::fma(-q, b, a);
    let err = if b > 0.0 { r } else { -r };
    round_pair(q, err)
}

#[inline]
fn widen_down(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_down();
    }
    x
}

#[inline]
fn widen_up(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_up();
    }
    x
}

impl Interval {
    /// Interval `[lo, hi]`; panics in debug builds when `lo > hi`.
    #[inline]
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(!(lo > hi), "interval endpoints out of order: {lo} > {hi}");
        Interval { lo, hi }
    }

    #[inline]
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// The whole real line; the result of undefined operations.
    #[inline]
    pub fn entire() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_interval(self, other: Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Enclosure of the rational `num / den`.
    pub fn ratio(num: f64, den: f64) -> Self {
        Interval::point(num) / Interval::point(den)
    }

    /// Enclosure of `ln 2`.
    pub fn ln2() -> Self {
        Interval::point(2.0).ln()
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, o: Interval) -> Interval {
        let (lo, _) = add_down_up(self.lo, o.lo);
        let (_, hi) = add_down_up(self.hi, o.hi);
        Interval { lo, hi }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, o: Interval) -> Interval {
        self + (-o)
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        if self.lo >= 0.0 && o.lo >= 0.0 {
            let (lo, _) = mul_down_up(self.lo, o.lo);
            let (_, hi) = mul_down_up(self.hi, o.hi);
            return Interval { lo, hi };
        }
        let cands = [
            mul_down_up(self.lo, o.lo),
            mul_down_up(self.lo, o.hi),
            mul_down_up(self.hi, o.lo),
            mul_down_up(self.hi, o.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (d, u) in cands {
            if d.is_nan() || u.is_nan() {
                // 0 * inf
                return Interval::entire();
            }
            lo = lo.min(d);
            hi = hi.max(u);
        }
        Interval { lo, hi }
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return Interval::entire();
        }
        let cands = [
            div_down_up(self.lo, o.lo),
            div_down_up(self.lo, o.hi),
            div_down_up(self.hi, o.lo),
            div_down_up(self.hi, o.hi),
        ];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (d, u) in cands {
            if d.is_nan() || u.is_nan() {
                return Interval::entire();
            }
            lo = lo.min(d);
            hi = hi.max(u);
        }
        Interval { lo, hi }
    }
}

impl AddAssign for Interval {
    #[inline]
    fn add_assign(&mut self, o: Interval) {
        *self = *self + o;
    }
}

impl SubAssign for Interval {
    #[inline]
    fn sub_assign(&mut self, o: Interval) {
        *self = *self - o;
    }
}

impl MulAssign for Interval {
    #[inline]
    fn mul_assign(&mut self, o: Interval) {
        *self = *self * o;
    }
}

impl Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::point(0.0), |a, b| a + b)
    }
}

fn exp_down(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    widen_down(libm::exp(x), TRANSCENDENTAL_ULPS).max(0.0)
}

fn exp_up(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let e = libm::exp(x);
    if e == 0.0 {
        return f64::from_bits(TRANSCENDENTAL_ULPS as u64);
    }
    widen_up(e, TRANSCENDENTAL_ULPS)
}

fn ln_down(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == 1.0 {
        return 0.0;
    }
    widen_down(libm::log(x), TRANSCENDENTAL_ULPS)
}

fn ln_up(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == 1.0 {
        return 0.0;
    }
    widen_up(libm::log(x), TRANSCENDENTAL_ULPS)
}

impl Scalar for Interval {
    const MODE: Mode = Mode::Interval;

    #[inline]
    fn from_f64(x: f64) -> Self {
        Interval::point(x)
    }

    fn exp(self) -> Self {
        // exp(0) = 1 exactly
        if self.lo == 0.0 && self.hi == 0.0 {
            return Interval::point(1.0);
        }
        Interval {
            lo: exp_down(self.lo),
            hi: exp_up(self.hi),
        }
    }

    fn ln(self) -> Self {
        if self.lo <= 0.0 {
            return Interval {
                lo: f64::NEG_INFINITY,
                hi: ln_up(self.hi),
            };
        }
        Interval {
            lo: ln_down(self.lo),
            hi: ln_up(self.hi),
        }
    }

    fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval {
                lo: 0.0,
                hi: (-self.lo).max(self.hi),
            }
        }
    }

    fn max(self, o: Self) -> Self {
        Interval {
            lo: self.lo.max(o.lo),
            hi: self.hi.max(o.hi),
        }
    }

    fn min(self, o: Self) -> Self {
        Interval {
            lo: self.lo.min(o.lo),
            hi: self.hi.min(o.hi),
        }
    }

    #[inline]
    fn scale_pow2(self, k: i32) -> Self {
        let lo = libm::scalbn(self.lo, k);
        let hi = libm::scalbn(self.hi, k);
        if k < 0 && (lo == 0.0 && self.lo != 0.0 || hi == 0.0 && self.hi != 0.0) {
            // underflow
            return Interval {
                lo: lo.next_down(),
                hi: hi.next_up(),
            };
        }
        Interval { lo, hi }
    }

    #[inline]
    fn lower(self) -> f64 {
        self.lo
    }

    #[inline]
    fn upper(self) -> f64 {
        self.hi
    }

    #[inline]
    fn mid(self) -> f64 {
        if self.lo == f64::NEG_INFINITY || self.hi == f64::INFINITY {
            return if self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY {
                0.0
            } else if self.lo == f64::NEG_INFINITY {
                self.hi
            } else {
                self.lo
            };
        }
        0.5 * self.lo + 0.5 * self.hi
    }

    fn hull(self, o: Self) -> Self {
        Interval {
            lo: self.lo.min(o.lo),
            hi: self.hi.max(o.hi),
        }
    }

    fn from_enclosure(e: Interval) -> Self {
        e
    }

    fn to_interval(self) -> Interval {
        self
    }
}

/// Pairwise (tree) summation in the order given; deterministic for a fixed
/// input order.
pub fn pairwise_sum<S: Scalar>(values: &[S]) -> S {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        let mut acc = S::zero();
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let half = values.len() / 2;
    pairwise_sum(&values[..half]) + pairwise_sum(&values[half..])
}

/// `ln(sum_i w_i exp(v_i))` over terms with non-zero weight, shifted by the
/// largest exponent so that no intermediate overflows. Returns `None` when
/// every weight is zero.
pub fn log_sum_exp<S: Scalar>(weights: &[S], exponents: &[S]) -> Option<S> {
    debug_assert_eq!(weights.len(), exponents.len());
    let mut shift = f64::NEG_INFINITY;
    for (w, v) in weights.iter().zip(exponents) {
        if !w.is_zero() {
            shift = shift.max(v.upper());
        }
    }
    if shift == f64::NEG_INFINITY {
        return None;
    }
    let s = S::from_f64(shift);
    let mut acc = S::zero();
    for (&w, &v) in weights.iter().zip(exponents) {
        if !w.is_zero() {
            acc += w * (v - s).exp();
        }
    }
    if acc.upper() <= 0.0 {
        return None;
    }
    Some(s + acc.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_operations_stay_points() {
        let a = Interval::point(1.5);
        let b = Interval::point(0.25);
        assert_eq!(a + b, Interval::point(1.75));
        assert_eq!(a * b, Interval::point(0.375));
        assert_eq!(a / b, Interval::point(6.0));
        assert_eq!(Interval::point(0.0).exp(), Interval::point(1.0));
        assert_eq!(Interval::point(1.0).ln(), Interval::point(0.0));
    }

    #[test]
    fn inexact_operations_bracket_the_nearest_result() {
        let third = Interval::point(1.0) / Interval::point(3.0);
        assert!(third.lo() < third.hi());
        assert!(third.contains(1.0 / 3.0));
        assert_eq!(third.hi(), third.lo().next_up());

        let s = Interval::point(0.1) + Interval::point(0.2);
        assert!(s.contains(0.1 + 0.2));
        assert!(s.width() > 0.0);

        let e = Interval::point(1.0).exp();
        assert!(e.contains(core::f64::consts::E));
        let l = Interval::point(2.0).ln();
        assert!(l.contains(core::f64::consts::LN_2));
    }

    #[test]
    fn mixed_sign_multiplication() {
        let a = Interval::new(-1.0, 2.0);
        let b = Interval::new(-3.0, 0.5);
        let p = a * b;
        assert_eq!(p.lo(), -6.0);
        assert_eq!(p.hi(), 3.0);
    }

    #[test]
    fn division_by_interval_containing_zero_is_entire() {
        let q = Interval::point(1.0) / Interval::new(-1.0, 1.0);
        assert_eq!(q, Interval::entire());
    }

    #[test]
    fn abs_and_max() {
        assert_eq!(Interval::new(-2.0, 1.0).abs(), Interval::new(0.0, 2.0));
        assert_eq!(Interval::new(-2.0, -1.0).abs(), Interval::new(1.0, 2.0));
        assert_eq!(
            Interval::new(0.0, 1.0).max(Interval::new(0.5, 0.7)),
            Interval::new(0.5, 1.0)
        );
    }

    #[test]
    fn log_sum_exp_handles_large_exponents() {
        let w = [1.0, 0.5, 0.0];
        let v = [800.0, 799.0, 10_000.0];
        let l = log_sum_exp(&w, &v).unwrap();
        let expect = 800.0 + (1.0 + 0.5 * (-1.0f64).exp()).ln();
        assert!((l - expect).abs() < 1e-12);
        assert!(log_sum_exp(&[0.0f64, 0.0], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn pairwise_sum_matches_naive_on_exact_data() {
        let v: alloc::vec::Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 4950.0);
    }
}
