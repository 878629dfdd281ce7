//! Outward-rounded interval arithmetic.
//!
//! Every arithmetic result is computed in round-to-nearest and then widened
//! by one ulp on each side, which contains the exact real result. `exp` is
//! widened by two ulps to absorb the error of the scalar implementation.
//! `neg`, `abs`, `max` and `min` are exact selections and are not widened.

use core::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// A closed interval `[lo, hi]` with `lo <= hi`.
///
/// `hi` may become `+inf` if an intermediate result overflows; `lo` stays
/// finite for all operations applied to finite inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// An axis-aligned rectangle `x × y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval2 {
    pub x: Interval,
    pub y: Interval,
}

/// Operation selector for [`iv_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IvOp {
    Add,
    Sub,
    Mul,
    Neg,
    Div,
    Sqr,
    Sqrt,
    Exp,
    Abs,
    Max,
    Min,
}

#[inline]
fn down(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

impl Interval {
    /// Builds `[lo, hi]`, swapping the endpoints if they arrive reversed.
    pub fn new(lo: f64, hi: f64) -> Self {
        if lo <= hi {
            Self { lo, hi }
        } else {
            Self { lo: hi, hi: lo }
        }
    }

    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    #[inline]
    fn widened(lo: f64, hi: f64) -> Self {
        Self { lo: down(lo), hi: up(hi) }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Largest absolute value attained on the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value attained on the interval.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn add(self, b: Self) -> Self {
        Self::widened(self.lo + b.lo, self.hi + b.hi)
    }

    pub fn sub(self, b: Self) -> Self {
        Self::widened(self.lo - b.hi, self.hi - b.lo)
    }

    pub fn neg(self) -> Self {
        Self { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, b: Self) -> Self {
        let p = [self.lo * b.lo, self.lo * b.hi, self.hi * b.lo, self.hi * b.hi];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in p {
            // 0 * inf only arises from overflowed inputs; treat it as unbounded.
            let (l, h) = if v.is_nan() { (f64::NEG_INFINITY, f64::INFINITY) } else { (v, v) };
            lo = lo.min(l);
            hi = hi.max(h);
        }
        Self::widened(lo, hi)
    }

    /// Multiplication by an exact scalar.
    pub fn scale(self, c: f64) -> Self {
        self.mul(Self::point(c))
    }

    pub fn div(self, b: Self) -> Result<Self> {
        if b.contains_zero() {
            return Err(Error::DivisionByZeroInterval);
        }
        let q = [self.lo / b.lo, self.lo / b.hi, self.hi / b.lo, self.hi / b.hi];
        let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self::widened(lo, hi))
    }

    pub fn sqr(self) -> Self {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.contains_zero() {
            Self { lo: 0.0, hi: up(a.max(b)) }
        } else {
            Self { lo: down(a.min(b)).max(0.0), hi: up(a.max(b)) }
        }
    }

    /// Square root; a negative lower endpoint is clamped to zero.
    pub fn sqrt(self) -> Result<Self> {
        if self.hi < 0.0 {
            return Err(Error::DomainError("sqrt of a negative interval"));
        }
        let lo = libm::sqrt(self.lo.max(0.0));
        let hi = libm::sqrt(self.hi);
        Ok(Self { lo: down(lo).max(0.0), hi: up(hi) })
    }

    pub fn exp(self) -> Self {
        let lo = libm::exp(self.lo);
        let hi = libm::exp(self.hi);
        Self { lo: down(down(lo)).max(0.0), hi: up(up(hi)) }
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            Self { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    pub fn max(self, b: Self) -> Self {
        Self { lo: self.lo.max(b.lo), hi: self.hi.max(b.hi) }
    }

    pub fn min(self, b: Self) -> Self {
        Self { lo: self.lo.min(b.lo), hi: self.hi.min(b.hi) }
    }

    /// Smallest interval containing both operands.
    pub fn hull(self, b: Self) -> Self {
        Self { lo: self.lo.min(b.lo), hi: self.hi.max(b.hi) }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Self) -> Self {
        Interval::add(self, rhs)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Self) -> Self {
        Interval::sub(self, rhs)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Self) -> Self {
        Interval::mul(self, rhs)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Self {
        Interval::neg(self)
    }
}

impl Interval2 {
    pub fn new(x: Interval, y: Interval) -> Self {
        Self { x, y }
    }

    pub fn contains(&self, p: crate::Vec2) -> bool {
        self.x.contains(p[0]) && self.y.contains(p[1])
    }
}

/// Applies `op` to `a` (and `b` for binary operations).
///
/// Binary operations called without `b` return
/// [`Error::InvalidArgument`].
pub fn iv_arith(op: IvOp, a: Interval, b: Option<Interval>) -> Result<Interval> {
    let need_b = || b.ok_or(Error::InvalidArgument("binary interval op needs two operands"));
    Ok(match op {
        IvOp::Add => a.add(need_b()?),
        IvOp::Sub => a.sub(need_b()?),
        IvOp::Mul => a.mul(need_b()?),
        IvOp::Div => a.div(need_b()?)?,
        IvOp::Max => a.max(need_b()?),
        IvOp::Min => a.min(need_b()?),
        IvOp::Neg => a.neg(),
        IvOp::Sqr => a.sqr(),
        IvOp::Sqrt => a.sqrt()?,
        IvOp::Exp => a.exp(),
        IvOp::Abs => a.abs(),
    })
}

/// Encloses `{x² + y² : (x, y) ∈ p}`.
pub fn iv_norm_sq(p: Interval2) -> Interval {
    let s = p.x.sqr() + p.y.sqr();
    Interval::new(s.lo.max(0.0), s.hi)
}
