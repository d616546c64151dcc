//! Exact-versus-asymptotic ratio tables and their CSV/SVG renderings.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use rug::Float;
use svg::node::element::{Circle, Line, Polyline, Text};
use svg::Document;

use crate::constants::AsymptoticFormula;
use crate::error::{Error, Result};
use crate::exact::{euler_transform, ExactSequence};
use crate::fibonacci::ShiftParam;
use crate::precision::{to_decimal_rounded, PrecisionContext};
use crate::saddle::ExpansionOrder;

/// Rows below this `n` are exempt from the range gate.
pub const RANGE_MIN_N: u64 = 10;
/// Upper edge of the accepted ratio band `(0, RATIO_CEILING)`.
pub const RATIO_CEILING: f64 = 1.05;
/// Largest accepted `|L - 1|` for the extrapolated limit `L`.
pub const LIMIT_TOLERANCE: f64 = 0.05;
/// Doubling chains are only checked from this `n` on.
pub const DOUBLING_MIN_N: u64 = 100;

/// What the exact coefficient is divided by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    /// The closed-form asymptotic.
    ClosedForm,
    /// The saddle-point estimate with `r_n` from a truncated expansion.
    SaddleDiagnostic(ExpansionOrder),
}

#[derive(Clone, Debug)]
pub struct RatioRow {
    pub n: u64,
    pub log_exact: Float,
    pub log_asym: Float,
    pub ratio: Float,
}

#[derive(Clone, Debug)]
pub struct RatioMeta {
    pub work_digits: u32,
    pub target_digits: u32,
    pub n_max: u64,
    pub stride: u64,
    pub estimator: Estimator,
}

#[derive(Clone, Debug)]
pub struct RatioReport {
    pub shift: ShiftParam,
    pub rows: Vec<RatioRow>,
    pub meta: RatioMeta,
}

impl RatioReport {
    pub fn ratio_at(&self, n: u64) -> Option<f64> {
        self.rows
            .binary_search_by_key(&n, |r| r.n)
            .ok()
            .map(|i| self.rows[i].ratio.to_f64())
    }
}

/// Ratios `a_n / asymptotic(n)` for `n = stride, 2 stride, ..., <= N`.
pub fn ratio_table(shift: ShiftParam, n_max: u64, stride: u64, ctx: &PrecisionContext) -> Result<RatioReport> {
    if n_max == 0 {
        return Err(Error::Domain("ratio table needs N >= 1".into()));
    }
    let seq = euler_transform(shift, n_max as usize)?;
    ratio_table_from(&seq, stride, Estimator::ClosedForm, ctx)
}

/// Ratios against an already computed sequence, using `estimator`.
pub fn ratio_table_from(
    seq: &ExactSequence,
    stride: u64,
    estimator: Estimator,
    ctx: &PrecisionContext,
) -> Result<RatioReport> {
    if stride == 0 {
        return Err(Error::Domain("stride must be positive".into()));
    }
    let shift = seq.shift();
    let formula = AsymptoticFormula::new(shift, ctx)?;
    let n_max = seq.max_index() as u64;
    let bits = ctx.bits();
    let ns: Vec<u64> = (1..=n_max / stride).map(|i| i * stride).collect();
    let rows = ns
        .par_iter()
        .map(|&n| {
            let a = &seq.terms()[n as usize];
            if *a <= 0 {
                return Err(Error::Domain(format!("a_{n} = {a} has no logarithm")));
            }
            let log_exact = Float::with_val(bits, a).ln();
            let log_asym = match estimator {
                Estimator::ClosedForm => Float::with_val(bits, formula.ln_a(n)),
                Estimator::SaddleDiagnostic(order) => Float::with_val(bits, formula.ln_saddle_estimate(n, order, ctx)),
            };
            let ratio = Float::with_val(bits, &log_exact - &log_asym).exp();
            Ok(RatioRow { n, log_exact, log_asym, ratio })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioReport {
        shift,
        rows,
        meta: RatioMeta {
            work_digits: ctx.work_digits(),
            target_digits: ctx.target_digits(),
            n_max,
            stride,
            estimator,
        },
    })
}

/// Outcome of the convergence checks on a report.
#[derive(Clone, Debug)]
pub struct GateReport {
    /// Rows with `n >= RANGE_MIN_N` whose ratio is outside `(0, RATIO_CEILING)`.
    pub out_of_range: Vec<u64>,
    /// `(n, ratio)` at `N, N/10, N/100, ...` (those present), ascending.
    pub decade_points: Vec<(u64, f64)>,
    /// `|ratio - 1|` strictly decreasing along `decade_points`.
    pub decade_monotone: bool,
    /// Pairs `(n, 2n)`, `n >= DOUBLING_MIN_N`, where `|ratio - 1|` grew.
    pub doubling_violations: Vec<(u64, u64)>,
    /// `2 ratio(4m) - ratio(m)` for the largest usable `m`: the limit if the
    /// error decays like `n^(-1/2)`.
    pub extrapolated_limit: Option<f64>,
}

impl GateReport {
    pub fn limit_ok(&self) -> bool {
        self.extrapolated_limit.is_none_or(|l| (l - 1.0).abs() < LIMIT_TOLERANCE)
    }

    pub fn passes(&self) -> bool {
        self.out_of_range.is_empty() && self.decade_monotone && self.doubling_violations.is_empty() && self.limit_ok()
    }
}

pub fn convergence_gate(report: &RatioReport) -> GateReport {
    let out_of_range = report
        .rows
        .iter()
        .filter(|r| r.n >= RANGE_MIN_N && !(r.ratio > 0 && r.ratio < RATIO_CEILING))
        .map(|r| r.n)
        .collect();

    let mut decade_points = Vec::new();
    if let Some(last) = report.rows.last() {
        let mut n = last.n;
        while n > 0 {
            match report.ratio_at(n) {
                Some(r) => decade_points.push((n, r)),
                None => break,
            }
            if n % 10 != 0 {
                break;
            }
            n /= 10;
        }
    }
    decade_points.reverse();
    let decade_monotone = decade_points.windows(2).all(|w| (w[1].1 - 1.0).abs() < (w[0].1 - 1.0).abs());

    let doubling_violations = report
        .rows
        .iter()
        .filter(|r| r.n >= DOUBLING_MIN_N)
        .filter_map(|r| {
            let here = r.ratio.to_f64();
            let there = report.ratio_at(2 * r.n)?;
            ((there - 1.0).abs() > (here - 1.0).abs()).then_some((r.n, 2 * r.n))
        })
        .collect();

    let extrapolated_limit = report
        .rows
        .iter()
        .rev()
        .find_map(|r| Some(2.0 * report.ratio_at(4 * r.n)? - r.ratio.to_f64()));

    GateReport { out_of_range, decade_points, decade_monotone, doubling_violations, extrapolated_limit }
}

/// Write `n,ratio,log_exact,log_asym` rows with `target_digits` significant digits.
pub fn write_csv<W: Write>(report: &RatioReport, out: W) -> Result<()> {
    let digits = report.meta.target_digits;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "ratio", "log_exact", "log_asym"])?;
    for row in &report.rows {
        w.write_record([
            row.n.to_string(),
            to_decimal_rounded(&row.ratio, digits),
            to_decimal_rounded(&row.log_exact, digits),
            to_decimal_rounded(&row.log_asym, digits),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(report: &RatioReport, path: &Path) -> Result<()> {
    write_csv(report, BufWriter::new(File::create(path)?))
}

#[derive(Clone, Debug)]
pub struct CsvRow {
    pub n: u64,
    pub ratio: Float,
    pub log_exact: Float,
    pub log_asym: Float,
}

/// Parse a file produced by [`write_csv`].
pub fn read_csv<R: Read>(input: R, bits: u32) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let parse = |s: &str, line: usize| -> Result<Float> {
        Float::parse(s)
            .map(|p| Float::with_val(bits, p))
            .map_err(|e| Error::Domain(format!("csv line {line}: bad number {s:?}: {e}")))
    };
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != 4 {
            return Err(Error::Domain(format!("csv line {line}: expected 4 fields")));
        }
        let n = rec[0]
            .parse()
            .map_err(|e| Error::Domain(format!("csv line {line}: bad n: {e}")))?;
        rows.push(CsvRow { n, ratio: parse(&rec[1], line)?, log_exact: parse(&rec[2], line)?, log_asym: parse(&rec[3], line)? });
    }
    Ok(rows)
}

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

/// Ratio against `n` with a reference line at 1. The y-axis spans
/// `[0.5, 1.05]` unless a point falls outside it.
pub fn render_svg(report: &RatioReport) -> String {
    let points: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.n as f64, r.ratio.to_f64())).collect();
    let (mut y_lo, mut y_hi) = (0.5f64, 1.05f64);
    for &(_, y) in &points {
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    let x_hi = points.last().map_or(1.0, |p| p.0).max(1.0);
    let sx = |x: f64| MARGIN + (x / x_hi) * (SVG_WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| SVG_HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (SVG_HEIGHT - 2.0 * MARGIN);

    let axes = Polyline::new()
        .set("fill", "none")
        .set("stroke", "black")
        .set(
            "points",
            format!(
                "{},{} {},{} {},{}",
                MARGIN,
                MARGIN,
                MARGIN,
                SVG_HEIGHT - MARGIN,
                SVG_WIDTH - MARGIN,
                SVG_HEIGHT - MARGIN
            ),
        );
    let reference = Line::new()
        .set("id", "reference")
        .set("data-y", 1)
        .set("x1", MARGIN)
        .set("x2", SVG_WIDTH - MARGIN)
        .set("y1", sy(1.0))
        .set("y2", sy(1.0))
        .set("stroke", "red");
    let trace = Polyline::new()
        .set("fill", "none")
        .set("stroke", "steelblue")
        .set("points", points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect::<Vec<_>>().join(" "));

    let title = format!("a_n / asymptotic, z = {}", report.shift);
    let mut doc = Document::new()
        .set("width", SVG_WIDTH)
        .set("height", SVG_HEIGHT)
        .set("viewBox", (0, 0, SVG_WIDTH, SVG_HEIGHT))
        .add(axes)
        .add(reference)
        .add(trace)
        .add(Text::new(title).set("x", MARGIN).set("y", MARGIN / 2.0))
        .add(Text::new(format!("{y_lo:.2}")).set("x", 5).set("y", sy(y_lo)))
        .add(Text::new(format!("{y_hi:.2}")).set("x", 5).set("y", sy(y_hi)))
        .add(Text::new(format!("n = {x_hi}")).set("x", SVG_WIDTH - MARGIN).set("y", SVG_HEIGHT - MARGIN / 3.0));
    for &(x, y) in &points {
        doc = doc.add(
            Circle::new()
                .set("class", "point")
                .set("cx", format!("{:.2}", sx(x)))
                .set("cy", format!("{:.2}", sy(y)))
                .set("r", 2)
                .set("fill", "steelblue"),
        );
    }
    doc.to_string()
}

pub fn emit_svg(report: &RatioReport, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(render_svg(report).as_bytes())?;
    f.flush()?;
    Ok(())
}
