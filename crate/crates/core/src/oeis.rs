//! OEIS b-files: parsing, cached retrieval and comparison with exact terms.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use rug::Integer;

use crate::error::{Error, Result};
use crate::exact::euler_transform;
use crate::fibonacci::ShiftParam;

pub const DEFAULT_BASE_URL: &str = "https://oeis.org";
/// Overrides [`DEFAULT_BASE_URL`], e.g. to point at a local test server.
pub const BASE_URL_ENV: &str = "OEIS_BASE_URL";
const USER_AGENT: &str = concat!("fibeuler/", env!("CARGO_PKG_VERSION"));
const TIMEOUT: Duration = Duration::from_secs(30);
/// Retries after a transport failure; HTTP error statuses are not retried.
const MAX_RETRIES: usize = 2;

/// A-number to shift, for the sequences the product covers.
pub const KNOWN: [(&str, i64); 4] = [("A109509", -1), ("A166861", 0), ("A200544", 1), ("A260787", 2)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OeisRef {
    a_number: String,
    shift: Option<ShiftParam>,
}

impl OeisRef {
    /// Accepts `A` followed by exactly six digits.
    pub fn parse(a_number: &str) -> Result<Self> {
        let digits = a_number.strip_prefix('A').unwrap_or("");
        if digits.len() != 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Domain(format!("{a_number:?} is not an A-number")));
        }
        let shift = KNOWN
            .iter()
            .find(|(a, _)| *a == a_number)
            .map(|&(_, z)| ShiftParam::new(z).expect("known shifts are valid"));
        Ok(OeisRef { a_number: a_number.to_string(), shift })
    }

    pub fn for_shift(shift: ShiftParam) -> Option<Self> {
        KNOWN
            .iter()
            .find(|&&(_, z)| z == shift.z())
            .map(|&(a, _)| OeisRef::parse(a).expect("known A-numbers are valid"))
    }

    pub fn a_number(&self) -> &str {
        &self.a_number
    }

    /// The shift `z` whose product this sequence is, if known.
    pub fn shift(&self) -> Option<ShiftParam> {
        self.shift
    }

    /// `bNNNNNN.txt`
    pub fn bfile_name(&self) -> String {
        format!("b{}.txt", &self.a_number[1..])
    }

    pub fn url(&self, base: &str) -> String {
        format!("{}/{}/{}", base.trim_end_matches('/'), self.a_number, self.bfile_name())
    }
}

/// Parse b-file text into `(index, value)` pairs. Blank lines and lines
/// starting with `#` are skipped; indices must be consecutive.
pub fn parse_bfile(bytes: &[u8]) -> Result<Vec<(i64, Integer)>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::BFileParse { line: 0, msg: format!("not UTF-8: {e}") })?;
    let mut out: Vec<(i64, Integer)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (idx, val) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(Error::BFileParse { line: line_no, msg: format!("expected `index value`, got {raw:?}") }),
        };
        let idx: i64 = idx
            .parse()
            .map_err(|e| Error::BFileParse { line: line_no, msg: format!("bad index {idx:?}: {e}") })?;
        let val: Integer = val
            .parse()
            .map_err(|e| Error::BFileParse { line: line_no, msg: format!("bad value {val:?}: {e}") })?;
        if let Some(&(prev, _)) = out.last() {
            if idx != prev + 1 {
                return Err(Error::BFileFormat(format!("line {line_no}: index {idx} follows {prev} (gap at {})", prev + 1)));
            }
        }
        out.push((idx, val));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FetchConfig {
    pub base_url: String,
    /// Never touch the network; a cold cache is an error.
    pub offline: bool,
}

impl FetchConfig {
    /// Base URL from `OEIS_BASE_URL` if set.
    pub fn from_env(offline: bool) -> Self {
        let base_url = std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        FetchConfig { base_url, offline }
    }
}

/// Path of the cached b-file for `oeis` under `cache_dir`.
pub fn cache_path(oeis: &OeisRef, cache_dir: &Path) -> PathBuf {
    cache_dir.join(oeis.bfile_name())
}

/// The b-file bytes, from `cache_dir` if present, otherwise from the network
/// (then stored in the cache via a temporary file and rename).
pub fn fetch_bfile(oeis: &OeisRef, cache_dir: &Path, cfg: &FetchConfig) -> Result<Vec<u8>> {
    let path = cache_path(oeis, cache_dir);
    if path.is_file() {
        return Ok(fs::read(&path)?);
    }
    let url = oeis.url(&cfg.base_url);
    if cfg.offline {
        return Err(Error::Fetch { url, reason: format!("offline and {} is not cached", path.display()) });
    }
    let body = http_get(&url)?;
    fs::create_dir_all(cache_dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(cache_dir)?;
    tmp.write_all(&body)?;
    tmp.flush()?;
    tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
    Ok(body)
}

fn http_get(url: &str) -> Result<Vec<u8>> {
    let agent = ureq::AgentBuilder::new().timeout(TIMEOUT).user_agent(USER_AGENT).build();
    let mut last = String::new();
    for _ in 0..=MAX_RETRIES {
        match agent.get(url).call() {
            Ok(resp) => {
                let mut body = Vec::new();
                resp.into_reader()
                    .read_to_end(&mut body)
                    .map_err(|e| Error::Fetch { url: url.to_string(), reason: e.to_string() })?;
                return Ok(body);
            }
            Err(ureq::Error::Status(code, _)) => {
                return Err(Error::Fetch { url: url.to_string(), reason: format!("HTTP {code}") });
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::Fetch { url: url.to_string(), reason: last })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossCheckOutcome {
    /// The first `count` exact terms appear in the b-file.
    Agreement,
    /// First disagreement, by exponent `n` of `x^n`.
    Mismatch { n: usize, ours: Integer, theirs: Integer },
    /// The b-file holds fewer than `count` terms.
    TooShort { available: usize },
}

#[derive(Clone, Debug)]
pub struct CrossCheckReport {
    pub shift: ShiftParam,
    pub count: usize,
    /// Exponent of `x` matched with the b-file's first entry.
    pub first_exponent: usize,
    pub outcome: CrossCheckOutcome,
}

impl CrossCheckReport {
    pub fn agrees(&self) -> bool {
        self.outcome == CrossCheckOutcome::Agreement
    }
}

/// Compare the first `count` coefficients for `shift` with parsed b-file
/// entries. The b-file's first entry is taken to be `a_0` when it equals 1
/// (every covered sequence starts with `a_0 = 1`), otherwise `a_1`; if that
/// alignment disagrees the other one is tried before reporting a mismatch.
pub fn cross_check(shift: ShiftParam, count: usize, entries: &[(i64, Integer)]) -> Result<CrossCheckReport> {
    if count == 0 {
        return Err(Error::Domain("cross check needs count >= 1".into()));
    }
    let Some((_, first)) = entries.first() else {
        return Ok(CrossCheckReport { shift, count, first_exponent: 0, outcome: CrossCheckOutcome::TooShort { available: 0 } });
    };
    let preferred = if *first == 1 { [0usize, 1] } else { [1, 0] };
    if entries.len() < count {
        return Ok(CrossCheckReport {
            shift,
            count,
            first_exponent: preferred[0],
            outcome: CrossCheckOutcome::TooShort { available: entries.len() },
        });
    }
    let seq = euler_transform(shift, count)?;
    let compare = |offset: usize| -> Option<(usize, Integer, Integer)> {
        entries[..count].iter().enumerate().find_map(|(j, (_, theirs))| {
            let ours = &seq.terms()[j + offset];
            (ours != theirs).then(|| (j + offset, ours.clone(), theirs.clone()))
        })
    };
    let mut first_mismatch = None;
    for &offset in &preferred {
        match compare(offset) {
            None => {
                return Ok(CrossCheckReport { shift, count, first_exponent: offset, outcome: CrossCheckOutcome::Agreement });
            }
            Some(m) if first_mismatch.is_none() => first_mismatch = Some(m),
            Some(_) => {}
        }
    }
    let (n, ours, theirs) = first_mismatch.expect("some alignment was tried");
    Ok(CrossCheckReport { shift, count, first_exponent: preferred[0], outcome: CrossCheckOutcome::Mismatch { n, ours, theirs } })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i64) -> ShiftParam {
        ShiftParam::new(v).unwrap()
    }

    fn pairs(v: &[(i64, i64)]) -> Vec<(i64, Integer)> {
        v.iter().map(|&(i, x)| (i, Integer::from(x))).collect()
    }

    #[test]
    fn parse_simple() {
        assert_eq!(parse_bfile(b"0 1\n1 1\n2 2\n").unwrap(), pairs(&[(0, 1), (1, 1), (2, 2)]));
        assert_eq!(parse_bfile(b"# comment\n0 1\n").unwrap(), pairs(&[(0, 1)]));
        assert_eq!(parse_bfile(b"\n  3\t 7  \r\n4 8\n\n").unwrap(), pairs(&[(3, 7), (4, 8)]));
        assert!(parse_bfile(b"").unwrap().is_empty());
    }

    #[test]
    fn parse_big_value() {
        let big = "9".repeat(500);
        let text = format!("0 1\n1 {big}\n");
        let parsed = parse_bfile(text.as_bytes()).unwrap();
        assert_eq!(parsed[1].1.to_string(), big);
    }

    #[test]
    fn parse_errors() {
        match parse_bfile(b"0 1\n2 4\n") {
            Err(Error::BFileFormat(msg)) => assert!(msg.contains("gap at 1"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_bfile(b"0 1\n1 x\n"), Err(Error::BFileParse { line: 2, .. })));
        assert!(matches!(parse_bfile(b"# h\n0 1 2\n"), Err(Error::BFileParse { line: 2, .. })));
        assert!(matches!(parse_bfile(b"zero 1\n"), Err(Error::BFileParse { line: 1, .. })));
    }

    #[test]
    fn refs() {
        let r = OeisRef::parse("A166861").unwrap();
        assert_eq!(r.shift(), Some(z(0)));
        assert_eq!(r.bfile_name(), "b166861.txt");
        assert_eq!(r.url("https://oeis.org/"), "https://oeis.org/A166861/b166861.txt");
        assert_eq!(OeisRef::for_shift(z(-1)).unwrap().a_number(), "A109509");
        assert_eq!(OeisRef::for_shift(z(1)).unwrap().a_number(), "A200544");
        assert_eq!(OeisRef::for_shift(z(2)).unwrap().a_number(), "A260787");
        assert!(OeisRef::for_shift(z(3)).is_none());
        assert_eq!(OeisRef::parse("A000045").unwrap().shift(), None);
        for bad in ["166861", "A16686", "A1668610", "a166861", "A16686x"] {
            assert!(OeisRef::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cross_check_offsets() {
        let seq = euler_transform(z(0), 20).unwrap();
        let from0: Vec<_> = seq.terms().iter().enumerate().map(|(i, a)| (i as i64, a.clone())).collect();
        let rep = cross_check(z(0), 15, &from0).unwrap();
        assert!(rep.agrees());
        assert_eq!(rep.first_exponent, 0);

        // b-file that starts at a_1 but is indexed from 1
        let seq = euler_transform(z(2), 20).unwrap();
        let from1: Vec<_> = seq.terms().iter().enumerate().skip(1).map(|(i, a)| (i as i64, a.clone())).collect();
        let rep = cross_check(z(2), 15, &from1).unwrap();
        assert!(rep.agrees());
        assert_eq!(rep.first_exponent, 1);
    }

    #[test]
    fn cross_check_mismatch_and_short() {
        let other = euler_transform(z(1), 30).unwrap();
        let entries: Vec<_> = other.terms().iter().enumerate().map(|(i, a)| (i as i64, a.clone())).collect();
        let rep = cross_check(z(0), 20, &entries).unwrap();
        match rep.outcome {
            CrossCheckOutcome::Mismatch { n, .. } => assert!(n <= 3, "n = {n}"),
            o => panic!("{o:?}"),
        }
        let rep = cross_check(z(0), 50, &entries).unwrap();
        assert_eq!(rep.outcome, CrossCheckOutcome::TooShort { available: 31 });
        assert!(cross_check(z(0), 0, &entries).is_err());
    }

    #[test]
    fn offline_cold_cache_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = FetchConfig { base_url: "http://127.0.0.1:9".into(), offline: true };
        let r = OeisRef::parse("A166861").unwrap();
        assert!(matches!(fetch_bfile(&r, dir.path(), &cfg), Err(Error::Fetch { .. })));
    }

    #[test]
    fn warm_cache_needs_no_network() {
        let dir = tempfile::tempdir().unwrap();
        let r = OeisRef::parse("A166861").unwrap();
        fs::write(cache_path(&r, dir.path()), b"0 1\n1 1\n").unwrap();
        let cfg = FetchConfig { base_url: "http://127.0.0.1:9".into(), offline: true };
        assert_eq!(fetch_bfile(&r, dir.path(), &cfg).unwrap(), b"0 1\n1 1\n");
    }
}
