use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use fibeuler::oeis::FetchConfig;
use fibeuler::precision::{to_decimal_rounded, to_decimal_truncated};
use fibeuler::{
    constant_c, constant_s, convergence_gate, cross_check, emit_csv, emit_svg, euler_transform, fetch_bfile,
    golden_ratio, parse_bfile, r_expansion, ratio_table, solve_saddle, OeisRef, PrecisionContext, ShiftParam,
};
use rug::Float;

use crate::config::ConfigFile;
use crate::error::CliError;
use crate::{Cli, Command, ConstantsArgs, SaddleArgs, TermsArgs, VerifyArgs};

const DEFAULT_Z: i64 = 0;
const DEFAULT_DIGITS: u32 = 30;
const DEFAULT_N: u64 = 5000;
const DEFAULT_STRIDE: u64 = 50;
const FULL_N: u64 = 20_000;
const MAX_DIGITS: u32 = 10_000;
const OEIS_TERMS: usize = 100;
/// Significant digits shown for ratios and differences.
const SHOW_DIGITS: u32 = 12;

/// Global settings after merging flags with the config file.
struct Context {
    file: ConfigFile,
    cache_dir: PathBuf,
    offline: bool,
}

impl Context {
    fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.file.get(key)?.unwrap_or(default)),
        }
    }

    fn shift(&self, flag: Option<i64>) -> Result<ShiftParam, CliError> {
        Ok(ShiftParam::new(self.pick(flag, "z", DEFAULT_Z)?)?)
    }

    fn precision(&self, flag: Option<u32>) -> Result<PrecisionContext, CliError> {
        let digits = self.pick(flag, "digits", DEFAULT_DIGITS)?;
        if digits > MAX_DIGITS {
            return Err(CliError::Usage(format!("digits must be at most {MAX_DIGITS}")));
        }
        Ok(PrecisionContext::new(digits)?)
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => file.get::<usize>("threads")?,
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure threads: {e}")))?;
    }
    let cache_dir = match cli.cache_dir {
        Some(dir) => dir,
        None => match file.get::<PathBuf>("cache_dir")? {
            Some(dir) => dir,
            None => default_cache_dir(),
        },
    };
    let offline = cli.offline || file.flag("offline")?;
    let ctx = Context { file, cache_dir, offline };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Terms(args) => terms(&ctx, args, &mut out),
        Command::Constants(args) => constants(&ctx, args, &mut out),
        Command::Saddle(args) => saddle(&ctx, args, &mut out),
        Command::Verify(args) => verify(&ctx, args, &mut out),
    }
}

fn default_cache_dir() -> PathBuf {
    dirs::cache_dir().map_or_else(|| PathBuf::from(".fibeuler-cache"), |d| d.join("fibeuler").join("oeis"))
}

fn terms(ctx: &Context, args: TermsArgs, out: &mut impl Write) -> Result<(), CliError> {
    let shift = ctx.shift(args.z)?;
    let n = ctx.pick(args.n, "n", DEFAULT_N)?;
    let n = usize::try_from(n).map_err(|_| CliError::Usage("N is too large".into()))?;
    let seq = euler_transform(shift, n)?;
    match args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path)?);
            seq.write_bfile(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(out);
            seq.write_bfile(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn constants(ctx: &Context, args: ConstantsArgs, out: &mut impl Write) -> Result<(), CliError> {
    let shift = ctx.shift(args.z)?;
    let prec = ctx.precision(args.digits)?;
    let digits = prec.target_digits();
    let s = constant_s(shift, &prec)?;
    let c = constant_c(shift, &prec)?;
    let phi = golden_ratio(&prec.escalated());
    writeln!(out, "z = {}", shift.z())?;
    writeln!(out, "S = {}", s.to_decimal(digits))?;
    writeln!(out, "c = {}", c.to_decimal(digits))?;
    writeln!(out, "phi = {}", to_decimal_truncated(&phi, digits))?;
    writeln!(out, "certified digits = {digits}")?;
    Ok(())
}

fn saddle(ctx: &Context, args: SaddleArgs, out: &mut impl Write) -> Result<(), CliError> {
    let n = args.n.ok_or_else(|| CliError::Usage("saddle needs -n".into()))?;
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let shift = ctx.shift(args.z)?;
    let prec = ctx.precision(args.digits)?;
    let digits = prec.target_digits();
    let sp = solve_saddle(n, shift, &prec)?;
    let approx = r_expansion(n, shift, &prec);
    let diff = Float::with_val(prec.bits(), &sp.r - &approx);
    let n_f = Float::with_val(prec.bits(), n);
    let scaled = Float::with_val(prec.bits(), n_f.sqrt_ref()) * &diff * n;
    writeln!(out, "n = {n}, z = {}", shift.z())?;
    writeln!(out, "r solved = {}", to_decimal_rounded(&sp.r, digits))?;
    writeln!(out, "r expansion = {}", to_decimal_rounded(&approx, digits))?;
    writeln!(out, "difference = {}", to_decimal_rounded(&diff, SHOW_DIGITS))?;
    writeln!(out, "difference * n^(3/2) = {}", to_decimal_rounded(&scaled, SHOW_DIGITS))?;
    Ok(())
}

fn verify(ctx: &Context, args: VerifyArgs, out: &mut impl Write) -> Result<(), CliError> {
    let shift = ctx.shift(args.z)?;
    let prec = ctx.precision(args.digits)?;
    let n_max = if args.full { FULL_N } else { ctx.pick(args.n, "n", DEFAULT_N)? };
    let stride = ctx.pick(args.stride, "stride", DEFAULT_STRIDE)?;
    if n_max == 0 || stride == 0 || stride > n_max {
        return Err(CliError::Usage("need 1 <= stride <= N".into()));
    }
    let csv = args.csv.or(ctx.file.get("csv")?);
    let svg = args.svg.or(ctx.file.get("svg")?);
    let oeis = args.oeis || ctx.file.flag("oeis")?;
    // fetch first so that a network failure does not wait for the table
    let bfile = if oeis {
        let oeis_ref = OeisRef::for_shift(shift)
            .ok_or_else(|| CliError::Usage(format!("no OEIS entry is known for z = {}", shift.z())))?;
        let bytes = fetch_bfile(&oeis_ref, &ctx.cache_dir, &FetchConfig::from_env(ctx.offline))?;
        Some((oeis_ref, parse_bfile(&bytes)?))
    } else {
        None
    };

    let report = ratio_table(shift, n_max, stride, &prec)?;
    let gate = convergence_gate(&report);
    if let Some(path) = &csv {
        emit_csv(&report, path)?;
    }
    if let Some(path) = &svg {
        emit_svg(&report, path)?;
    }

    writeln!(out, "z = {}, N = {n_max}, stride = {stride}, digits = {}", shift.z(), prec.target_digits())?;
    for (n, _) in &gate.decade_points {
        let row = report.rows.iter().find(|r| r.n == *n).expect("decade point is a row");
        writeln!(out, "ratio({n}) = {}", to_decimal_rounded(&row.ratio, SHOW_DIGITS))?;
    }
    if let Some(l) = gate.extrapolated_limit {
        writeln!(out, "extrapolated limit = {l:.6}")?;
    }
    writeln!(out, "rows out of range = {}", gate.out_of_range.len())?;
    writeln!(out, "doubling violations = {}", gate.doubling_violations.len())?;
    writeln!(out, "decade errors decreasing = {}", gate.decade_monotone)?;

    let mut failures = Vec::new();
    if !gate.passes() {
        failures.push("ratio convergence checks failed".to_string());
    }
    if let Some((oeis_ref, entries)) = bfile {
        let check = cross_check(shift, OEIS_TERMS, &entries)?;
        writeln!(out, "{} first {OEIS_TERMS} terms: {:?}", oeis_ref.a_number(), check.outcome)?;
        if !check.agrees() {
            failures.push(format!("{} disagrees", oeis_ref.a_number()));
        }
    }
    writeln!(out, "gate = {}", if failures.is_empty() { "pass" } else { "fail" })?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Gate(failures.join("; ")))
    }
}
