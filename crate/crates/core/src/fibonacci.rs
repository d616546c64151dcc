//! Fibonacci numbers, the golden ratio and the shift parameter `z`.

use std::fmt;

use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// The shift `z` selecting weights `F_{k+z}`. Only `z >= -1` is supported;
/// below that the signed extension of `F` starts alternating in sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftParam(i64);

impl ShiftParam {
    pub const MIN: i64 = -1;

    pub fn new(z: i64) -> Result<Self> {
        if z < Self::MIN {
            return Err(Error::InvalidShift(z));
        }
        Ok(ShiftParam(z))
    }

    pub fn z(self) -> i64 {
        self.0
    }

    /// `F_z`
    pub fn fib_z(self) -> Integer {
        fibonacci(self.0).expect("z >= -1")
    }

    /// `F_{z+1}`
    pub fn fib_z1(self) -> Integer {
        fibonacci(self.0 + 1).expect("z >= -1")
    }

    /// Weight of part size `k >= 1`, i.e. `F_{k+z}`.
    pub fn weight(self, k: u64) -> Integer {
        fibonacci(k as i64 + self.0).expect("k + z >= 0")
    }
}

impl fmt::Display for ShiftParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `F_m` for `m >= -1`, with `F_{-1} = 1`, computed by fast doubling.
pub fn fibonacci(m: i64) -> Result<Integer> {
    match m {
        m if m < -1 => Err(Error::Domain(format!("F_{m} is outside the supported range m >= -1"))),
        -1 => Ok(Integer::from(1)),
        m => Ok(fast_doubling(m as u64).0),
    }
}

/// Returns `(F_m, F_{m+1})`.
fn fast_doubling(m: u64) -> (Integer, Integer) {
    let mut a = Integer::from(0);
    let mut b = Integer::from(1);
    for bit in (0..u64::BITS - m.leading_zeros()).rev() {
        // F_2k = F_k (2 F_{k+1} - F_k), F_2k+1 = F_k^2 + F_{k+1}^2
        let two_b_minus_a = Integer::from(&b << 1) - &a;
        let c = Integer::from(&a * &two_b_minus_a);
        let d = Integer::from(a.square_ref()) + Integer::from(b.square_ref());
        if (m >> bit) & 1 == 0 {
            a = c;
            b = d;
        } else {
            b = c + &d;
            a = d;
        }
    }
    (a, b)
}

/// `F_lo, F_{lo+1}, ..., F_hi` (inclusive), by a single forward iteration.
pub fn fibonacci_range(lo: i64, hi: i64) -> Result<Vec<Integer>> {
    if hi < lo {
        return Ok(Vec::new());
    }
    let mut prev = fibonacci(lo)?;
    let mut cur = fibonacci(lo + 1)?;
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for _ in lo..=hi {
        let next = Integer::from(&prev + &cur);
        out.push(std::mem::replace(&mut prev, std::mem::replace(&mut cur, next)));
    }
    Ok(out)
}

/// Square root of a positive integer by Newton's iteration, seeded from the
/// `f64` estimate and doubling the working precision each step.
pub fn newton_sqrt(value: u32, bits: u32) -> Float {
    let target = bits + 8;
    let mut prec = 48u32;
    let mut x = Float::with_val(prec, f64::from(value).sqrt());
    loop {
        prec = (prec * 2).min(target);
        x.set_prec(prec);
        // x <- (x + v/x) / 2
        let q = Float::with_val(prec, value) / &x;
        x += q;
        x /= 2u32;
        if prec == target {
            // one more step at full precision
            let q = Float::with_val(prec, value) / &x;
            x += q;
            x /= 2u32;
            break;
        }
    }
    x.set_prec(bits);
    x
}

/// The golden ratio `(1 + sqrt 5) / 2` at working precision.
pub fn golden_ratio(ctx: &PrecisionContext) -> Float {
    let bits = ctx.bits();
    let mut phi = newton_sqrt(5, bits);
    phi += 1u32;
    phi /= 2u32;
    phi
}
