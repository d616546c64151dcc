//! Truncated series for `log U(x)` and its logarithmic derivatives.
//!
//! With `t = x^k`, `a = F_z` and `b = F_{z+1}`:
//!
//! ```text
//! log U(x)      = sum_k  t (a t + b) / (k (1 - t - t^2))
//! x U'(x)/U(x)  = sum_k  t (b (t^2 + 1) - a t (t - 2)) / (t^2 + t - 1)^2
//! x^2 (log U)'' = sum_k  G(k, x)
//! b(x)          = x U'/U + x^2 (log U)''
//! ```
//!
//! Every sum is cut at a depth `K` for which a geometric majorant of the
//! omitted terms is below the context's tail tolerance. The majorants hold
//! once `x^(K+1) <= 0.1`, where `|t^2 + t - 1| >= 0.89` for all later terms:
//!
//! | series      | bound on `sum_{k>K} |term_k|`              |
//! |-------------|--------------------------------------------|
//! | `log U`     | `2 A x^(K+1) / ((K+1)(1-x))`               |
//! | saddle      | `2 A x^(K+1) / (1-x)`                      |
//! | `G`         | `2 A (K+1) x^(K+1) / (1-x)^2`              |
//!
//! with `A = |a| + |b|`. The factor 2 covers the worst-case ratio of each
//! summand to `A x^k` (at most 1.13, 1.28 and 1.66 k respectively).

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::fibonacci::ShiftParam;
use crate::precision::PrecisionContext;

/// Bits carried on top of the context precision inside the summation loops.
const LOOP_GUARD_BITS: u32 = 32;
/// Hard cap on series depth; only reachable for `x` absurdly close to 1.
const MAX_DEPTH: u64 = 50_000_000;

#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: Float,
    /// Last `k` summed.
    pub truncation_k: u64,
    /// Bound on the omitted tail.
    pub tail_bound: Float,
}

/// Which summand family a truncation depth is chosen for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    LogU,
    SaddleLhs,
    Curvature,
}

/// `F_z`, `F_{z+1}` as floats, plus `|F_z| + |F_{z+1}|` for tail bounds.
#[derive(Clone, Debug)]
pub(crate) struct Weights {
    pub a: Float,
    pub b: Float,
    pub abs_sum: Float,
}

impl Weights {
    pub fn new(shift: ShiftParam, bits: u32) -> Self {
        let a = Float::with_val(bits, shift.fib_z());
        let b = Float::with_val(bits, shift.fib_z1());
        let mut abs_sum = Float::with_val(64, a.abs_ref());
        abs_sum += Float::with_val(64, b.abs_ref());
        Weights { a, b, abs_sum }
    }
}

/// Bound on `sum_{k>K}` of one family's summands, or `None` if `x^(K+1)`
/// has not yet dropped below 0.1.
pub fn tail_bound(family: Family, x: &Float, k_last: u64, abs_sum: &Float) -> Option<Float> {
    let p = 64;
    let x = Float::with_val(p, x);
    let q = powu(&x, k_last + 1, p);
    if q > 0.1 {
        return None;
    }
    let one_minus_x = Float::with_val(p, 1 - &x);
    let mut bound = Float::with_val(p, abs_sum * 2u32) * q;
    match family {
        Family::LogU => {
            bound /= k_last + 1;
            bound /= &one_minus_x;
        }
        Family::SaddleLhs => bound /= &one_minus_x,
        Family::Curvature => {
            bound *= k_last + 1;
            bound /= Float::with_val(p, one_minus_x.square_ref());
        }
    }
    Some(bound)
}

/// Smallest `K >= 1` whose tail bound (summed over `families`) is at most
/// `tol`.
pub(crate) fn depth_for(families: &[Family], x: &Float, abs_sum: &Float, tol: &Float) -> Result<(u64, Float)> {
    for k in 1..=MAX_DEPTH {
        if let Some(b) = total_bound(families, x, k, abs_sum) {
            if b <= *tol {
                return Ok((k, b));
            }
        }
    }
    Err(Error::Domain(format!("series at x = {} needs more than {MAX_DEPTH} terms", x.to_f64())))
}

fn total_bound(families: &[Family], x: &Float, k: u64, abs_sum: &Float) -> Option<Float> {
    let mut total = Float::with_val(64, 0);
    for &f in families {
        total += tail_bound(f, x, k, abs_sum)?;
    }
    Some(total)
}

fn check_open_domain(x: &Float) -> Result<()> {
    if !(x.is_finite() && *x > 0) {
        return Err(Error::Domain(format!("x = {} must be positive", x.to_f64())));
    }
    if at_or_past_root(x, x.prec()) {
        return Err(Error::Domain(format!("x = {} must be below phi - 1", x.to_f64())));
    }
    Ok(())
}

/// `x^k` at `bits` precision.
pub(crate) fn powu(x: &Float, k: u64, bits: u32) -> Float {
    let k = u32::try_from(k).expect("exponent fits in u32");
    Float::with_val(bits, x.pow(k))
}

/// Whether `t^2 + t - 1` is non-negative or within a few ulps of zero, i.e.
/// `t` is not safely below `phi - 1`.
fn at_or_past_root(t: &Float, prec: u32) -> bool {
    let q = quadratic(t);
    let eps = Float::with_val(64, Float::i_exp(1, 8 - prec as i32));
    q >= 0 || q.abs() <= eps
}

/// `x^2 + x - 1`
fn quadratic(t: &Float) -> Float {
    let mut q = Float::with_val(t.prec(), t.square_ref());
    q += t;
    q -= 1u32;
    q
}

fn loop_bits(ctx: &PrecisionContext) -> u32 {
    ctx.bits() + LOOP_GUARD_BITS
}

fn finish(sum: Float, ctx: &PrecisionContext, truncation_k: u64, tail_bound: Float) -> SeriesValue {
    SeriesValue { value: Float::with_val(ctx.bits(), sum), truncation_k, tail_bound }
}

/// `log U(x)` for `0 < x < phi - 1`.
pub fn log_u(x: &Float, shift: ShiftParam, ctx: &PrecisionContext) -> Result<SeriesValue> {
    if !(x.is_finite() && *x > 0) {
        return Err(Error::Domain(format!("x = {} must be positive", x.to_f64())));
    }
    if at_or_past_root(x, x.prec()) {
        return Err(Error::Pole(format!("1 - x - x^2 <= 0 at x = {}", x.to_f64())));
    }
    let w = Weights::new(shift, loop_bits(ctx));
    let (k_max, tail) = depth_for(&[Family::LogU], x, &w.abs_sum, ctx.tail_tol())?;
    let sum = log_u_fixed(x, &w, k_max, loop_bits(ctx));
    Ok(finish(sum, ctx, k_max, tail))
}

pub(crate) fn log_u_fixed(x: &Float, w: &Weights, k_max: u64, bits: u32) -> Float {
    let x = Float::with_val(bits, x);
    let mut t = x.clone();
    let mut sum = Float::with_val(bits, 0);
    for k in 1..=k_max {
        sum += log_u_term(&t, k, w);
        t *= &x;
    }
    sum
}

/// `t (a t + b) / (k (1 - t - t^2))`
pub(crate) fn log_u_term(t: &Float, k: u64, w: &Weights) -> Float {
    let bits = t.prec();
    let mut num = Float::with_val(bits, &w.a * t);
    num += &w.b;
    num *= t;
    let mut den = quadratic(t);
    den *= k;
    -(num / den)
}

/// `x U'(x) / U(x)` for `0 < x < phi - 1`.
pub fn saddle_lhs(x: &Float, shift: ShiftParam, ctx: &PrecisionContext) -> Result<SeriesValue> {
    check_open_domain(x)?;
    let w = Weights::new(shift, loop_bits(ctx));
    let (k_max, tail) = depth_for(&[Family::SaddleLhs], x, &w.abs_sum, ctx.tail_tol())?;
    let sum = saddle_lhs_fixed(x, &w, k_max, loop_bits(ctx));
    Ok(finish(sum, ctx, k_max, tail))
}

pub(crate) fn saddle_lhs_fixed(x: &Float, w: &Weights, k_max: u64, bits: u32) -> Float {
    let x = Float::with_val(bits, x);
    let mut t = x.clone();
    let mut sum = Float::with_val(bits, 0);
    for _ in 1..=k_max {
        sum += saddle_term(&t, w);
        t *= &x;
    }
    sum
}

/// `t (b (t^2 + 1) - a t (t - 2)) / (t^2 + t - 1)^2`
pub(crate) fn saddle_term(t: &Float, w: &Weights) -> Float {
    let bits = t.prec();
    let t2 = Float::with_val(bits, t.square_ref());
    let mut num = Float::with_val(bits, &t2 + 1u32) * &w.b;
    let mut at = Float::with_val(bits, t - 2u32);
    at *= t;
    at *= &w.a;
    num -= at;
    num *= t;
    let den = quadratic(t).square();
    num / den
}

/// `G(k, x)`, the `k`-th summand of `x^2 (log U)''(x)`. Valid wherever
/// `t = x^k` satisfies `0 < t < phi - 1`, so `x = phi - 1` is allowed for
/// `k >= 2`.
pub fn g_term(k: u64, x: &Float, shift: ShiftParam, ctx: &PrecisionContext) -> Result<Float> {
    if k == 0 {
        return Err(Error::Domain("G(k, x) needs k >= 1".into()));
    }
    if !(x.is_finite() && *x > 0) {
        return Err(Error::Domain(format!("x = {} must be positive", x.to_f64())));
    }
    let bits = loop_bits(ctx);
    let t = powu(x, k, bits);
    if at_or_past_root(&t, x.prec()) {
        return Err(Error::Domain(format!("x^{k} must be below phi - 1")));
    }
    let w = Weights::new(shift, bits);
    Ok(Float::with_val(ctx.bits(), curvature_term(&t, k, &w)))
}

/// `G(k, x)` in terms of `t = x^k`:
///
/// ```text
/// t (a t P(t) - b Q(t)) / (t^2 + t - 1)^3
/// P(t) = (k+1) t^3 - (5k+1) t^2 + 3(k-1) t - (4k-2)
/// Q(t) = (k+1) t^4 - (k-1) t^3 + 6k t^2 + (k+1) t + (k-1)
/// ```
///
/// `P` and `Q` are evaluated in Horner form.
pub(crate) fn curvature_term(t: &Float, k: u64, w: &Weights) -> Float {
    let bits = t.prec();
    let k = i64::try_from(k).expect("k fits in i64");
    let horner = |coeffs: &[i64]| {
        let mut acc = Float::with_val(bits, coeffs[0]);
        for &c in &coeffs[1..] {
            acc *= t;
            acc += c;
        }
        acc
    };
    let p = horner(&[k + 1, -(5 * k + 1), 3 * (k - 1), -(4 * k - 2)]);
    let q = horner(&[k + 1, -(k - 1), 6 * k, k + 1, k - 1]);
    let mut num = p * t;
    num *= &w.a;
    num -= q * &w.b;
    num *= t;
    let den = quadratic(t);
    let den3 = Float::with_val(bits, den.square_ref()) * &den;
    num / den3
}

/// `sum_{k=k_lo}^{k_hi} G(k, x)`
pub(crate) fn curvature_sum(x: &Float, w: &Weights, k_lo: u64, k_hi: u64, bits: u32) -> Float {
    let x = Float::with_val(bits, x);
    let mut t = powu(&x, k_lo, bits);
    let mut sum = Float::with_val(bits, 0);
    for k in k_lo..=k_hi {
        sum += curvature_term(&t, k, w);
        t *= &x;
    }
    sum
}

/// `b(x) = x U'/U + x^2 (log U)''` for `0 < x < phi - 1`.
pub fn b_of_x(x: &Float, shift: ShiftParam, ctx: &PrecisionContext) -> Result<SeriesValue> {
    check_open_domain(x)?;
    let bits = loop_bits(ctx);
    let w = Weights::new(shift, bits);
    let (k_max, tail) = depth_for(&[Family::SaddleLhs, Family::Curvature], x, &w.abs_sum, ctx.tail_tol())?;
    let mut sum = saddle_lhs_fixed(x, &w, k_max, bits);
    sum += curvature_sum(x, &w, 1, k_max, bits);
    Ok(finish(sum, ctx, k_max, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibonacci::golden_ratio;
    use crate::precision::pow10;

    fn z(v: i64) -> ShiftParam {
        ShiftParam::new(v).unwrap()
    }

    fn ctx(digits: u32) -> PrecisionContext {
        PrecisionContext::new(digits).unwrap()
    }

    fn f(c: &PrecisionContext, s: &str) -> Float {
        Float::with_val(c.bits(), Float::parse(s).unwrap())
    }

    #[test]
    fn single_summands_by_substitution() {
        let c = ctx(30);
        let w = Weights::new(z(0), c.bits());
        let half = f(&c, "0.5");
        assert_eq!(log_u_term(&half, 1, &w), 2);
        assert_eq!(saddle_term(&half, &w), 10);
    }

    #[test]
    fn vanish_near_zero() {
        let c = ctx(30);
        let tiny = f(&c, "1e-40");
        for s in -1..=2 {
            assert!(log_u(&tiny, z(s), &c).unwrap().value.abs() < 1e-39);
            assert!(saddle_lhs(&tiny, z(s), &c).unwrap().value.abs() < 1e-39);
            assert!(b_of_x(&tiny, z(s), &c).unwrap().value.abs() < 1e-39);
            assert!(g_term(3, &tiny, z(s), &c).unwrap().abs() < 1e-100);
        }
    }

    #[test]
    fn domain_errors() {
        let c = ctx(30);
        let phi_m1 = golden_ratio(&c) - 1u32;
        assert!(matches!(log_u(&phi_m1, z(0), &c), Err(Error::Pole(_))));
        assert!(matches!(log_u(&f(&c, "0"), z(0), &c), Err(Error::Domain(_))));
        assert!(matches!(log_u(&f(&c, "-0.1"), z(0), &c), Err(Error::Domain(_))));
        assert!(matches!(saddle_lhs(&phi_m1, z(0), &c), Err(Error::Domain(_))));
        assert!(matches!(saddle_lhs(&f(&c, "0.7"), z(0), &c), Err(Error::Domain(_))));
        assert!(matches!(b_of_x(&phi_m1, z(0), &c), Err(Error::Domain(_))));
        assert!(matches!(g_term(1, &phi_m1, z(0), &c), Err(Error::Domain(_))));
        assert!(g_term(2, &phi_m1, z(0), &c).is_ok());
        assert!(matches!(g_term(0, &f(&c, "0.3"), z(0), &c), Err(Error::Domain(_))));
    }

    #[test]
    fn tails_within_tolerance() {
        let c = ctx(40);
        for xs in ["0.1", "0.3", "0.5", "0.6", "0.618"] {
            let x = f(&c, xs);
            for s in -1..=2 {
                for v in [
                    log_u(&x, z(s), &c).unwrap(),
                    saddle_lhs(&x, z(s), &c).unwrap(),
                    b_of_x(&x, z(s), &c).unwrap(),
                ] {
                    assert!(v.tail_bound <= *c.tail_tol());
                    assert!(v.truncation_k >= 1);
                }
            }
        }
    }

    #[test]
    fn tail_bound_dominates_actual_tail() {
        let c = ctx(30);
        let w = Weights::new(z(2), c.bits());
        let x = f(&c, "0.6");
        let k = 30;
        let full = saddle_lhs_fixed(&x, &w, 2000, c.bits());
        let cut = saddle_lhs_fixed(&x, &w, k, c.bits());
        let actual = Float::with_val(c.bits(), full - cut).abs();
        let bound = tail_bound(Family::SaddleLhs, &x, k, &w.abs_sum).unwrap();
        assert!(actual <= bound);
        let gfull = curvature_sum(&x, &w, 1, 2000, c.bits());
        let gcut = curvature_sum(&x, &w, 1, k, c.bits());
        let actual = Float::with_val(c.bits(), gfull - gcut).abs();
        assert!(actual <= tail_bound(Family::Curvature, &x, k, &w.abs_sum).unwrap());
        let lfull = log_u_fixed(&x, &w, 2000, c.bits());
        let lcut = log_u_fixed(&x, &w, k, c.bits());
        let actual = Float::with_val(c.bits(), lfull - lcut).abs();
        assert!(actual <= tail_bound(Family::LogU, &x, k, &w.abs_sum).unwrap());
    }

    #[test]
    fn depth_is_minimal() {
        let c = ctx(30);
        let w = Weights::new(z(0), 64);
        let x = f(&c, "0.5");
        let (k, b) = depth_for(&[Family::LogU], &x, &w.abs_sum, c.tail_tol()).unwrap();
        assert!(b <= *c.tail_tol());
        let prev = tail_bound(Family::LogU, &x, k - 1, &w.abs_sum).unwrap();
        assert!(prev > *c.tail_tol());
    }

    #[test]
    fn g_reduces_at_k1() {
        // 2 r^2 (((r-3) r^2 - 1) a - (r^3 + 3r + 1) b) / (r^2 + r - 1)^3
        let c = ctx(40);
        for s in -1..=3 {
            let w = Weights::new(z(s), c.bits());
            for rs in ["0.05", "0.2", "0.37", "0.5", "0.59"] {
                let r = f(&c, rs);
                let r2 = Float::with_val(c.bits(), r.square_ref());
                let r3 = Float::with_val(c.bits(), &r2 * &r);
                let pa = (Float::with_val(c.bits(), &r - 3u32) * &r2 - 1u32) * &w.a;
                let pb = (Float::with_val(c.bits(), &r3 + Float::with_val(c.bits(), &r * 3u32)) + 1u32) * &w.b;
                let den = quadratic(&r);
                let den3 = Float::with_val(c.bits(), den.square_ref()) * &den;
                let reduced = Float::with_val(c.bits(), pa - pb) * r2 * 2u32 / den3;
                let g = g_term(1, &r, z(s), &c).unwrap();
                let diff = Float::with_val(c.bits(), &g - &reduced).abs();
                assert!(diff <= Float::with_val(c.bits(), reduced.abs_ref()) * pow10(-35), "z={s} r={rs}");
            }
        }
    }

    #[test]
    fn monotone_saddle_lhs() {
        let c = ctx(20);
        for s in -1..=2 {
            let mut prev = Float::with_val(c.bits(), 0);
            for i in 1..=60 {
                let x = Float::with_val(c.bits(), f64::from(i) * 0.0103);
                let v = saddle_lhs(&x, z(s), &c).unwrap().value;
                assert!(v > prev, "z={s} i={i}");
                prev = v;
            }
        }
    }
}
