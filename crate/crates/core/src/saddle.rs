//! Solving `x U'(x) / U(x) = n` for the saddle point `r_n`.

use rug::Float;

use crate::error::{Error, Result};
use crate::fibonacci::{golden_ratio, ShiftParam};
use crate::logseries::{depth_for, saddle_lhs_fixed, Family, Weights};
use crate::precision::{pow10, PrecisionContext};

const MAX_ITERATIONS: usize = 400;

#[derive(Clone, Debug)]
pub struct SaddlePoint {
    pub n: u64,
    pub shift: ShiftParam,
    pub r: Float,
    /// `|saddle_lhs(r) - n|`
    pub residual: Float,
    pub truncation_k: u64,
}

/// How many terms of the large-`n` expansion of `r_n` to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionOrder {
    /// `phi - 1 - phi^(z/2-1) / (5^(1/4) sqrt n)`
    TwoTerm,
    /// adds `phi^(z-1) / (2 sqrt 5 n)`
    ThreeTerm,
}

/// Three-term large-`n` expansion of the saddle point.
pub fn r_expansion(n: u64, shift: ShiftParam, ctx: &PrecisionContext) -> Float {
    r_expansion_with(n, shift, ExpansionOrder::ThreeTerm, ctx)
}

pub fn r_expansion_with(n: u64, shift: ShiftParam, order: ExpansionOrder, ctx: &PrecisionContext) -> Float {
    let bits = ctx.bits();
    let phi = golden_ratio(ctx);
    let sqrt5 = Float::with_val(bits, &phi * 2u32) - 1u32;
    let fourth_root5 = Float::with_val(bits, sqrt5.sqrt_ref());
    let n_f = Float::with_val(bits, n);
    let sqrt_n = Float::with_val(bits, n_f.sqrt_ref());
    let ln_phi = Float::with_val(bits, phi.ln_ref());
    let z = shift.z() as f64;

    let mut r = Float::with_val(bits, &phi - 1u32);
    // phi^(z/2 - 1) / (5^(1/4) sqrt n)
    let p1 = Float::with_val(bits, &ln_phi * (z / 2.0 - 1.0)).exp();
    r -= p1 / fourth_root5 / sqrt_n;
    if order == ExpansionOrder::ThreeTerm {
        // phi^(z - 1) / (2 sqrt 5 n)
        let p2 = Float::with_val(bits, &ln_phi * (z - 1.0)).exp();
        r += p2 / (sqrt5 * 2u32) / n_f;
    }
    r
}

/// Root of `saddle_lhs(r) = n` in `(0, phi - 1)`.
///
/// The series depth is fixed for the whole solve at the value required by
/// the upper end of the bracket, so every iterate sees the same function.
pub fn solve_saddle(n: u64, shift: ShiftParam, ctx: &PrecisionContext) -> Result<SaddlePoint> {
    if n == 0 {
        return Err(Error::Domain("saddle point needs n >= 1".into()));
    }
    let bits = ctx.bits();
    let eval_bits = bits + 32;
    let n_f = Float::with_val(eval_bits, n);
    let phi_m1 = golden_ratio(ctx) - 1u32;
    let x_max = Float::with_val(bits, &phi_m1 - pow10(-i64::from(ctx.work_digits())));
    let w = Weights::new(shift, eval_bits);
    let (k_max, _) = depth_for(&[Family::SaddleLhs], &x_max, &w.abs_sum, ctx.tail_tol())?;
    let f = |x: &Float| -> Float { saddle_lhs_fixed(x, &w, k_max, eval_bits) - &n_f };

    let floor = Float::with_val(bits, 1e-6);
    let seed = r_expansion(n, shift, ctx);
    let gap = Float::with_val(bits, &phi_m1 - &seed);
    let mut lo = Float::with_val(bits, &seed - gap * 0.1f64).max(&floor);
    if lo >= x_max {
        lo = floor.clone();
    }
    let mut hi = x_max.clone();
    let mut f_lo = f(&lo);
    let f_hi = f(&hi);
    if f_hi <= 0 {
        return Err(Error::NoBracket { n });
    }
    if f_lo >= 0 {
        lo = floor;
        f_lo = f(&lo);
        if f_lo >= 0 {
            return Err(Error::NoBracket { n });
        }
    }

    // derivative step and stopping thresholds
    let h = pow10(-i64::from(ctx.work_digits() / 3));
    let x_tol = pow10(-i64::from(ctx.work_digits()) + 2);
    let f_tol = Float::with_val(64, &n_f * pow10(-i64::from(ctx.work_digits()) + 3));

    let mut x = if seed > lo && seed < hi { seed } else { Float::with_val(bits, &lo + &hi) / 2u32 };
    let mut fx = f(&x);
    for _ in 0..MAX_ITERATIONS {
        if fx.is_zero() || Float::with_val(64, fx.abs_ref()) <= f_tol {
            break;
        }
        if fx < 0 {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let width = Float::with_val(bits, &hi - &lo);
        if width <= x_tol {
            break;
        }
        let step_h = Float::with_val(bits, &width * 0.25f64).min(&h);
        let xp = Float::with_val(bits, &x + &step_h);
        let xm = Float::with_val(bits, &x - &step_h);
        let slope = (f(&xp) - f(&xm)) / (Float::with_val(bits, &step_h) * 2u32);
        let mut next = Float::with_val(bits, &x - Float::with_val(eval_bits, &fx / &slope));
        if slope.is_nan() || slope <= 0 || next <= lo || next >= hi {
            next = Float::with_val(bits, &lo + &hi) / 2u32;
        }
        let moved = Float::with_val(bits, &next - &x).abs();
        x = next;
        fx = f(&x);
        if moved <= x_tol {
            break;
        }
    }

    let residual = Float::with_val(bits, fx.abs_ref());
    let tolerance = Float::with_val(64, &n_f * pow10(-i64::from(ctx.target_digits()) + 2));
    if residual > tolerance {
        return Err(Error::NoConvergence {
            n,
            reason: format!("residual {} above {}", residual.to_f64(), tolerance.to_f64()),
        });
    }
    Ok(SaddlePoint { n, shift, r: x, residual, truncation_k: k_max })
}
