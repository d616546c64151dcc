//! Working-precision bookkeeping shared by every real-valued computation.
//!
//! A [`PrecisionContext`] fixes three things: the decimal digits carried
//! through intermediate arithmetic, the digits the caller wants certified,
//! and the absolute bound any truncated series tail must respect.
//!
//! Certification is by escalation: a computation is re-run with
//! [`PrecisionContext::ESCALATION_DIGITS`] more working digits (and a tail
//! tolerance tightened to match) and only the leading digits on which the two
//! runs agree are trusted.

use rug::float::Round;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Bits of mantissa per decimal digit, rounded up.
const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// Extra mantissa bits carried on top of the decimal working precision.
const SLACK_BITS: u32 = 16;

#[derive(Clone, Debug)]
pub struct PrecisionContext {
    work_digits: u32,
    target_digits: u32,
    tail_tol: Float,
}

impl PrecisionContext {
    /// Minimum gap between working and target digits.
    pub const GUARD_DIGITS: u32 = 10;
    /// Digits added for the certifying re-run.
    pub const ESCALATION_DIGITS: u32 = 20;
    /// Default gap between working and target digits.
    pub const DEFAULT_GUARD: u32 = 15;

    /// Context certifying `target_digits`, with default guard digits and a
    /// tail tolerance of `10^-work_digits`.
    pub fn new(target_digits: u32) -> Result<Self> {
        Self::with_work_digits(target_digits, target_digits + Self::DEFAULT_GUARD)
    }

    pub fn with_work_digits(target_digits: u32, work_digits: u32) -> Result<Self> {
        if target_digits == 0 {
            return Err(Error::InvalidPrecision("target digits must be positive".into()));
        }
        if work_digits < target_digits + Self::GUARD_DIGITS {
            return Err(Error::InvalidPrecision(format!(
                "work digits {work_digits} < target digits {target_digits} + {} guard digits",
                Self::GUARD_DIGITS
            )));
        }
        let tail_tol = pow10(-i64::from(work_digits));
        Ok(PrecisionContext { work_digits, target_digits, tail_tol })
    }

    /// Replace the tail tolerance. It must be positive and at most
    /// `10^-target_digits`.
    pub fn with_tail_tol(mut self, tail_tol: Float) -> Result<Self> {
        if !(tail_tol.is_finite() && tail_tol > 0) {
            return Err(Error::InvalidPrecision("tail tolerance must be positive".into()));
        }
        if tail_tol > pow10(-i64::from(self.target_digits)) {
            return Err(Error::InvalidPrecision(format!(
                "tail tolerance {} exceeds 1e-{}",
                tail_tol.to_f64(),
                self.target_digits
            )));
        }
        self.tail_tol = tail_tol;
        Ok(self)
    }

    pub fn work_digits(&self) -> u32 {
        self.work_digits
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    pub fn tail_tol(&self) -> &Float {
        &self.tail_tol
    }

    /// Mantissa bits corresponding to the working digits.
    pub fn bits(&self) -> u32 {
        digits_to_bits(self.work_digits)
    }

    /// A float at working precision.
    pub fn float<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    /// The context used for the certifying re-run.
    pub fn escalated(&self) -> Self {
        let work_digits = self.work_digits + Self::ESCALATION_DIGITS;
        let scale = pow10(-i64::from(Self::ESCALATION_DIGITS));
        PrecisionContext {
            work_digits,
            target_digits: self.target_digits,
            tail_tol: Float::with_val(self.tail_tol.prec(), &self.tail_tol * &scale),
        }
    }

    /// Run `compute` at this context and at [`escalated`](Self::escalated),
    /// returning the escalated value together with the number of leading
    /// significant digits the two runs share.
    ///
    /// Fails with [`Error::NotCertified`] if fewer than `target_digits` agree.
    pub fn certify<F>(&self, compute: F) -> Result<Certified>
    where
        F: Fn(&PrecisionContext) -> Result<Float>,
    {
        let base = compute(self)?;
        let high = compute(&self.escalated())?;
        let digits = agreeing_digits(&base, &high).min(self.work_digits);
        if digits < self.target_digits {
            return Err(Error::NotCertified { requested: self.target_digits, achieved: digits });
        }
        Ok(Certified { value: high, digits })
    }
}

/// A real value together with the number of significant decimal digits
/// that survived precision escalation.
#[derive(Clone, Debug)]
pub struct Certified {
    pub value: Float,
    pub digits: u32,
}

impl Certified {
    /// Decimal rendering truncated (not rounded) to `digits` significant digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        to_decimal_truncated(&self.value, digits)
    }
}

pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * BITS_PER_DIGIT).ceil() as u32 + SLACK_BITS
}

/// `10^exp` with enough precision to be exact in its leading bits.
pub fn pow10(exp: i64) -> Float {
    let ten = Float::with_val(64, 10);
    Float::with_val(64, ten.pow(exp as i32))
}

/// Number of leading significant decimal digits on which `a` and `b` agree,
/// measured as `floor(-log10(|a - b| / max(|a|, |b|)))`.
pub fn agreeing_digits(a: &Float, b: &Float) -> u32 {
    if a == b {
        return u32::MAX;
    }
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    let scale = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, b.abs_ref()));
    if scale.is_zero() {
        return u32::MAX;
    }
    let rel = Float::with_val(prec, &diff / &scale);
    let digits = -Float::with_val(64, rel.log10_ref()).to_f64();
    if digits <= 0.0 {
        0
    } else {
        digits.floor() as u32
    }
}

/// Plain decimal (no exponent) rendering of `x` truncated toward zero to
/// `digits` significant digits.
pub fn to_decimal_truncated(x: &Float, digits: u32) -> String {
    render_decimal(x, digits, Round::Zero)
}

/// Plain decimal rendering rounded to nearest at `digits` significant digits.
pub fn to_decimal_rounded(x: &Float, digits: u32) -> String {
    render_decimal(x, digits, Round::Nearest)
}

fn render_decimal(x: &Float, digits: u32, round: Round) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1) as usize;
    let s = x.to_string_radix_round(10, Some(digits), round);
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    let (mantissa, exp) = match body.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().expect("mpfr exponent")),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let all: String = int_part.chars().chain(frac_part.chars()).collect();
    let point = int_part.len() as i64 + exp;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&all);
    } else if point as usize >= all.len() {
        out.push_str(&all);
        out.extend(std::iter::repeat_n('0', point as usize - all.len()));
    } else {
        out.push_str(&all[..point as usize]);
        out.push('.');
        out.push_str(&all[point as usize..]);
    }
    out
}
