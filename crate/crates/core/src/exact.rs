//! Exact coefficients of `U(x) = prod_{k>=1} (1 - x^k)^(-F_{k+z})`.

use std::io::{self, Write};

use rayon::prelude::*;
use rug::Integer;

use crate::error::{Error, Result};
use crate::fibonacci::{fibonacci_range, ShiftParam};

/// Convolutions shorter than this are summed serially.
const PARALLEL_MIN_TERMS: usize = 512;
const CHUNK_TERMS: usize = 256;

/// Coefficients `a_0..=a_N` of `U(x)` for one shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSequence {
    shift: ShiftParam,
    terms: Vec<Integer>,
}

impl ExactSequence {
    pub fn shift(&self) -> ShiftParam {
        self.shift
    }

    /// `terms()[n]` is the coefficient of `x^n`.
    pub fn terms(&self) -> &[Integer] {
        &self.terms
    }

    pub fn get(&self, n: usize) -> Option<&Integer> {
        self.terms.get(n)
    }

    /// Highest exponent held.
    pub fn max_index(&self) -> usize {
        self.terms.len() - 1
    }

    /// Write `n a_n` lines (b-file format).
    pub fn write_bfile<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (n, a) in self.terms.iter().enumerate() {
            writeln!(out, "{n} {a}")?;
        }
        out.flush()
    }

    pub fn to_bfile_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_bfile(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TransformOptions {
    /// Split each convolution into chunks summed on the rayon pool.
    pub parallel: bool,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions { parallel: true }
    }
}

/// `a_0..=a_N` via the divisor-sum recurrence `n a_n = sum_{k=1}^n c_k a_{n-k}`
/// with `c_m = sum_{d|m} d F_{d+z}`.
pub fn euler_transform(shift: ShiftParam, n_max: usize) -> Result<ExactSequence> {
    euler_transform_with(shift, n_max, TransformOptions::default())
}

pub fn euler_transform_with(
    shift: ShiftParam,
    n_max: usize,
    opts: TransformOptions,
) -> Result<ExactSequence> {
    // weights[d] = F_{d+z}, d = 0..=N (index 0 unused)
    let weights = fibonacci_range(shift.z(), shift.z() + n_max as i64)?;
    let terms = euler_transform_weights(|d| weights[d].clone(), n_max, opts)?;
    Ok(ExactSequence { shift, terms })
}

/// Euler transform of an arbitrary weight sequence `b_1, b_2, ...`.
pub fn euler_transform_weights<W>(weight: W, n_max: usize, opts: TransformOptions) -> Result<Vec<Integer>>
where
    W: Fn(usize) -> Integer,
{
    let divisor_sums = divisor_sums(weight, n_max);
    let mut terms: Vec<Integer> = Vec::with_capacity(n_max + 1);
    terms.push(Integer::from(1));
    for n in 1..=n_max {
        let mut acc = if opts.parallel && n >= PARALLEL_MIN_TERMS {
            convolve_parallel(&divisor_sums, &terms, n)
        } else {
            convolve_range(&divisor_sums, &terms, n, 1, n + 1)
        };
        let divisor = u32::try_from(n).map_err(|_| Error::Domain(format!("N = {n_max} too large")))?;
        if !acc.is_divisible_u(divisor) {
            return Err(Error::Internal(format!("n a_n sum not divisible by n at n = {n}")));
        }
        acc.div_exact_u_mut(divisor);
        terms.push(acc);
    }
    Ok(terms)
}

/// `c_m = sum_{d|m} d b_d` for `m = 0..=N`, by a sieve over multiples.
fn divisor_sums<W>(weight: W, n_max: usize) -> Vec<Integer>
where
    W: Fn(usize) -> Integer,
{
    let mut c = vec![Integer::new(); n_max + 1];
    for d in 1..=n_max {
        let w = weight(d);
        if w == 0 {
            continue;
        }
        let dw = w * d as u64;
        for m in (d..=n_max).step_by(d) {
            c[m] += &dw;
        }
    }
    c
}

/// `sum_{k in [lo, hi)} c_k a_{n-k}`
fn convolve_range(c: &[Integer], a: &[Integer], n: usize, lo: usize, hi: usize) -> Integer {
    let mut acc = Integer::new();
    for k in lo..hi {
        acc += &c[k] * &a[n - k];
    }
    acc
}

fn convolve_parallel(c: &[Integer], a: &[Integer], n: usize) -> Integer {
    let starts: Vec<usize> = (1..=n).step_by(CHUNK_TERMS).collect();
    let partials: Vec<Integer> = starts
        .par_iter()
        .map(|&lo| convolve_range(c, a, n, lo, (lo + CHUNK_TERMS).min(n + 1)))
        .collect();
    // integer addition is exact, so the chunk order cannot change the sum
    partials.into_iter().fold(Integer::new(), |acc, p| acc + p)
}

/// Independent check of [`euler_transform`]: multiply out
/// `prod_{k=1}^N (1 - x^k)^(-F_{k+z}) mod x^(N+1)` term by term, expanding each
/// factor with the binomial series `sum_j C(e+j-1, j) x^{kj}`.
pub fn product_expansion_oracle(shift: ShiftParam, n_max: usize) -> ExactSequence {
    let mut poly = vec![Integer::new(); n_max + 1];
    poly[0] = Integer::from(1);
    for k in 1..=n_max {
        let e = shift.weight(k as u64);
        if e == 0 {
            continue;
        }
        // factor coefficients at exponents 0, k, 2k, ...
        let mut factor = Vec::with_capacity(n_max / k + 1);
        let mut coef = Integer::from(1);
        factor.push(coef.clone());
        for j in 1..=n_max / k {
            coef *= Integer::from(&e + (j - 1) as u64);
            coef /= j as u64;
            factor.push(coef.clone());
        }
        let mut next = vec![Integer::new(); n_max + 1];
        for (i, p) in poly.iter().enumerate() {
            if *p == 0 {
                continue;
            }
            for (j, f) in factor.iter().enumerate() {
                let exp = i + j * k;
                if exp > n_max {
                    break;
                }
                next[exp] += p * f;
            }
        }
        poly = next;
    }
    ExactSequence { shift, terms: poly }
}
