//! Exact coefficients, saddle points and asymptotics for the Euler transform
//! of shifted Fibonacci numbers,
//!
//! ```text
//! U(x) = prod_{k>=1} (1 - x^k)^(-F_{k+z}) = sum_n a_n x^n,   z >= -1.
//! ```
//!
//! * [`exact`] computes `a_0..a_N` as exact integers.
//! * [`logseries`] evaluates `log U`, `x U'/U`, `G(k, x)` and `b(x)` with
//!   bounded truncation error.
//! * [`saddle`] solves `x U'(x)/U(x) = n` and evaluates the large-`n`
//!   expansion of the root.
//! * [`constants`] computes `S(z)`, `c(z)` and the closed-form asymptotic.
//! * [`verify`] tabulates `a_n` against the asymptotic.
//! * [`oeis`] reads and fetches OEIS b-files and compares them with `a_n`.

pub mod constants;
pub mod error;
pub mod exact;
pub mod fibonacci;
pub mod logseries;
pub mod oeis;
pub mod precision;
pub mod saddle;
pub mod verify;

pub use constants::{
    asymptotic_a, asymptotic_constants, constant_c, constant_s, constant_s_hyperbolic, AsymptoticConstants,
    AsymptoticFormula, AsymptoticValue,
};
pub use error::{Error, Result};
pub use exact::{euler_transform, product_expansion_oracle, ExactSequence};
pub use fibonacci::{fibonacci, golden_ratio, ShiftParam};
pub use logseries::{b_of_x, g_term, log_u, saddle_lhs, SeriesValue};
pub use oeis::{cross_check, fetch_bfile, parse_bfile, OeisRef};
pub use precision::{Certified, PrecisionContext};
pub use saddle::{r_expansion, solve_saddle, ExpansionOrder, SaddlePoint};
pub use verify::{convergence_gate, emit_csv, emit_svg, ratio_table, RatioReport};
