//! The constants `S(z)` and `c(z)` and the closed-form asymptotic for `a_n`.
//!
//! ```text
//! a_n ~ phi^(n + z/4) exp((phi/10 - 1/2) F_z - F_{z+1}/10 + 2 phi^(z/2) sqrt(n) / 5^(1/4) + S)
//!       / (2 sqrt(pi) 5^(1/8) n^(3/4))
//!
//! S = sum_{k>=2} (F_z + F_{z+1} phi^k) / ((phi^(2k) - phi^k - 1) k)
//! c = sum_{k>=2} G(k, phi - 1)
//! ```

use rug::float::Constant;
use rug::Float;

use crate::error::Result;
use crate::fibonacci::{golden_ratio, ShiftParam};
use crate::logseries::{curvature_sum, depth_for, Family, Weights};
use crate::precision::{to_decimal_rounded, Certified, PrecisionContext};
use crate::saddle::{r_expansion_with, ExpansionOrder};

const GUARD_BITS: u32 = 32;

#[derive(Clone, Debug)]
pub struct AsymptoticConstants {
    pub shift: ShiftParam,
    pub s: Float,
    pub c: Float,
    pub digits_certified: u32,
}

/// `S(z)` and `c(z)`, both certified to `ctx.target_digits()`.
pub fn asymptotic_constants(shift: ShiftParam, ctx: &PrecisionContext) -> Result<AsymptoticConstants> {
    let s = constant_s(shift, ctx)?;
    let c = constant_c(shift, ctx)?;
    Ok(AsymptoticConstants { shift, digits_certified: s.digits.min(c.digits), s: s.value, c: c.value })
}

pub fn constant_s(shift: ShiftParam, ctx: &PrecisionContext) -> Result<Certified> {
    ctx.certify(|c| s_series(shift, c))
}

/// `S(z)` at the context's precision, without escalation.
pub(crate) fn s_series(shift: ShiftParam, ctx: &PrecisionContext) -> Result<Float> {
    let bits = ctx.bits() + GUARD_BITS;
    let w = Weights::new(shift, bits);
    let phi = Float::with_val(bits, golden_ratio(ctx));
    let phi = refine_phi(phi, bits);
    let ln_phi = Float::with_val(64, phi.ln_ref());
    let mut p = Float::with_val(bits, phi.square_ref());
    let mut sum = Float::with_val(bits, 0);
    let mut k = 2u64;
    loop {
        // (a + b p) / ((p^2 - p - 1) k)
        let mut num = Float::with_val(bits, &w.b * &p);
        num += &w.a;
        let mut den = Float::with_val(bits, p.square_ref());
        den -= &p;
        den -= 1u32;
        den *= k;
        sum += num / den;
        if phi_tail_bound(&w.abs_sum, &ln_phi, k) <= *ctx.tail_tol() {
            break;
        }
        p *= &phi;
        k += 1;
    }
    Ok(Float::with_val(ctx.bits(), sum))
}

/// For `k >= 3`, `phi^(2k) - phi^k - 1 >= phi^(2k) / 2`, so each summand of
/// either form of `S` past `K >= 2` is at most `2 A phi^-k / k` and the tail
/// is at most `2 A phi^2 phi^-(K+1) / (K+1)`.
fn phi_tail_bound(abs_sum: &Float, ln_phi: &Float, k_last: u64) -> Float {
    let decay = Float::with_val(64, ln_phi * (1.0 - k_last as f64)).exp();
    let mut bound = Float::with_val(64, abs_sum * 2u32);
    bound *= decay;
    bound /= k_last + 1;
    bound
}

/// Extend `golden_ratio` output with one Newton step on `x^2 = x + 1` so the
/// guard bits are meaningful.
fn refine_phi(mut phi: Float, bits: u32) -> Float {
    phi.set_prec(bits);
    // x <- (x^2 + 1) / (2x - 1)
    let num = Float::with_val(bits, phi.square_ref()) + 1u32;
    let den = Float::with_val(bits, &phi * 2u32) - 1u32;
    num / den
}

/// `S(0)` through `sum_{k>=2} 1 / (2k sinh(k arccsch 2) - k)`, with
/// `arccsch 2 = asinh(1/2)` taken from the library rather than from `phi`.
pub fn constant_s_hyperbolic(ctx: &PrecisionContext) -> Result<Certified> {
    ctx.certify(s_hyperbolic_series)
}

fn s_hyperbolic_series(ctx: &PrecisionContext) -> Result<Float> {
    let bits = ctx.bits() + GUARD_BITS;
    let alpha = arccsch2(bits);
    let ln_phi = Float::with_val(64, &alpha);
    let one = Float::with_val(64, 1);
    let mut sum = Float::with_val(bits, 0);
    let mut k = 2u64;
    loop {
        let arg = Float::with_val(bits, &alpha * k);
        let mut den = arg.sinh();
        den *= 2 * k;
        den -= k;
        sum += den.recip();
        if phi_tail_bound(&one, &ln_phi, k) <= *ctx.tail_tol() {
            break;
        }
        k += 1;
    }
    Ok(Float::with_val(ctx.bits(), sum))
}

/// `arccsch(2) = asinh(1/2)`
pub fn arccsch2(bits: u32) -> Float {
    Float::with_val(bits, 0.5).asinh()
}

/// `c(z) = sum_{k>=2} G(k, phi - 1)`.
pub fn constant_c(shift: ShiftParam, ctx: &PrecisionContext) -> Result<Certified> {
    ctx.certify(|c| c_series(shift, c))
}

pub(crate) fn c_series(shift: ShiftParam, ctx: &PrecisionContext) -> Result<Float> {
    let bits = ctx.bits() + GUARD_BITS;
    let w = Weights::new(shift, bits);
    let phi = refine_phi(golden_ratio(ctx), bits);
    let x = phi - 1u32;
    let (k_max, _) = depth_for(&[Family::Curvature], &x, &w.abs_sum, ctx.tail_tol())?;
    let sum = curvature_sum(&x, &w, 2, k_max.max(2), bits);
    Ok(Float::with_val(ctx.bits(), sum))
}

/// A positive real held by its natural logarithm.
#[derive(Clone, Debug)]
pub struct AsymptoticValue {
    pub ln: Float,
}

impl AsymptoticValue {
    pub fn ln(&self) -> &Float {
        &self.ln
    }

    /// `(m, e)` with the value equal to `m * 10^e`, `1 <= m < 10`, and `m`
    /// rendered with `digits` significant digits.
    pub fn scientific(&self, digits: u32) -> (String, i64) {
        let bits = self.ln.prec() + 16;
        let ln10 = Float::with_val(bits, 10).ln();
        let log10 = Float::with_val(bits, &self.ln / &ln10);
        let exp = Float::with_val(bits, log10.floor_ref()).to_f64() as i64;
        let frac = log10 - exp;
        let mantissa = Float::with_val(bits, &frac * &ln10).exp();
        let text = to_decimal_rounded(&mantissa, digits);
        if text.starts_with("10") {
            return (to_decimal_rounded(&(mantissa / 10u32), digits), exp + 1);
        }
        (text, exp)
    }
}

/// Precomputed pieces of the closed form for one shift.
#[derive(Clone, Debug)]
pub struct AsymptoticFormula {
    shift: ShiftParam,
    bits: u32,
    phi: Float,
    ln_phi: Float,
    s: Float,
    /// `(phi/10 - 1/2) F_z - F_{z+1}/10`
    exp_constant: Float,
    /// `phi^(z/2) / 5^(1/4)`
    sqrt_coef: Float,
    /// `ln(2 sqrt(pi)) + ln(5) / 8`
    ln_denominator: Float,
}

impl AsymptoticFormula {
    pub fn new(shift: ShiftParam, ctx: &PrecisionContext) -> Result<Self> {
        let s = constant_s(shift, ctx)?.value;
        Ok(Self::with_s(shift, s, ctx))
    }

    pub(crate) fn with_s(shift: ShiftParam, s: Float, ctx: &PrecisionContext) -> Self {
        let bits = ctx.bits() + GUARD_BITS;
        let phi = refine_phi(golden_ratio(ctx), bits);
        let ln_phi = Float::with_val(bits, phi.ln_ref());
        let fz = Float::with_val(bits, shift.fib_z());
        let fz1 = Float::with_val(bits, shift.fib_z1());
        let mut exp_constant = Float::with_val(bits, &phi / 10u32) - 0.5f64;
        exp_constant *= &fz;
        exp_constant -= fz1 / 10u32;
        let five = Float::with_val(bits, 5);
        let ln5 = Float::with_val(bits, five.ln_ref());
        let half_z = shift.z() as f64 / 2.0;
        let sqrt_coef = (Float::with_val(bits, &ln_phi * half_z) - Float::with_val(bits, &ln5 / 4u32)).exp();
        let pi = Float::with_val(bits, Constant::Pi);
        let ln_denominator = Float::with_val(bits, Float::with_val(bits, pi.sqrt_ref()) * 2u32).ln() + ln5 / 8u32;
        AsymptoticFormula { shift, bits, phi, ln_phi, s: Float::with_val(bits, s), exp_constant, sqrt_coef, ln_denominator }
    }

    pub fn shift(&self) -> ShiftParam {
        self.shift
    }

    pub fn s(&self) -> &Float {
        &self.s
    }

    /// `(phi/10 - 1/2) F_z - F_{z+1}/10`
    pub fn exponent_constant(&self) -> &Float {
        &self.exp_constant
    }

    /// `ln a_n` according to the closed form.
    pub fn ln_a(&self, n: u64) -> Float {
        let bits = self.bits;
        let n_f = Float::with_val(bits, n);
        let sqrt_n = Float::with_val(bits, n_f.sqrt_ref());
        let ln_n = Float::with_val(bits, n_f.ln_ref());
        let z_quarter = self.shift.z() as f64 / 4.0;
        let mut total = Float::with_val(bits, &n_f + z_quarter) * &self.ln_phi;
        total += &self.exp_constant;
        total += Float::with_val(bits, &self.sqrt_coef * 2u32) * sqrt_n;
        total += &self.s;
        total -= &self.ln_denominator;
        total -= ln_n * 0.75f64;
        total
    }

    pub fn evaluate(&self, n: u64) -> AsymptoticValue {
        AsymptoticValue { ln: self.ln_a(n) }
    }

    /// Saddle-point estimate `U(r) / (sqrt(2 pi b) r^n)` in log form, with `r`
    /// taken from the truncated expansion, while `U(r_n)` and `b(r_n)` use
    /// their large-`n` forms
    /// `exp((phi/10 - 1/2) F_z - F_{z+1}/10 + phi^(z/2) sqrt(n) / 5^(1/4) + S)`
    /// and `2 phi^(-z/2) 5^(1/4) n^(3/2)`.
    ///
    /// With the three-term `r` this agrees with [`ln_a`](Self::ln_a) as
    /// `n -> oo`; with two terms the `r^-n` factor is off by the constant
    /// `exp(phi^z / (2 sqrt 5))`.
    pub fn ln_saddle_estimate(&self, n: u64, order: ExpansionOrder, ctx: &PrecisionContext) -> Float {
        let bits = self.bits;
        let n_f = Float::with_val(bits, n);
        let sqrt_n = Float::with_val(bits, n_f.sqrt_ref());
        let ln_n = Float::with_val(bits, n_f.ln_ref());
        let r = Float::with_val(bits, r_expansion_with(n, self.shift, order, ctx));
        let ln_u = Float::with_val(bits, &self.exp_constant + &self.s) + Float::with_val(bits, &self.sqrt_coef * &sqrt_n);
        // ln b = ln 2 - (z/2) ln phi + ln(5)/4 + (3/2) ln n ; sqrt_coef = phi^(z/2) / 5^(1/4)
        let ln_b = Float::with_val(bits, 2).ln() - Float::with_val(bits, self.sqrt_coef.ln_ref()) + ln_n * 1.5f64;
        let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
        let ln_sqrt_2pib = (Float::with_val(bits, two_pi.ln_ref()) + ln_b) / 2u32;
        let n_ln_r = Float::with_val(bits, r.ln_ref()) * &n_f;
        ln_u - n_ln_r - ln_sqrt_2pib
    }

    pub fn phi(&self) -> &Float {
        &self.phi
    }
}

/// The closed-form asymptotic for `a_n`.
pub fn asymptotic_a(n: u64, shift: ShiftParam, ctx: &PrecisionContext) -> Result<AsymptoticValue> {
    Ok(AsymptoticFormula::new(shift, ctx)?.evaluate(n))
}
