//! End-to-end runs of the `fibeuler` binary.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output};
use std::thread;

use fibeuler::{euler_transform, parse_bfile, ShiftParam};

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibeuler"))
        .args(args)
        .env("FIBEULER_CACHE_DIR", cache)
        .env_remove("OEIS_BASE_URL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cache() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn terms_prints_bfile() {
    let dir = cache();
    let out = run(&["terms", "-z", "0", "-N", "10"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 11);
    let parsed = parse_bfile(text.as_bytes()).unwrap();
    let want = euler_transform(ShiftParam::new(0).unwrap(), 10).unwrap();
    assert!(parsed.iter().map(|(_, v)| v).eq(want.terms()));
    assert_eq!(stdout(&run(&["terms", "-z", "0", "-N", "10"], dir.path())), text);
}

#[test]
fn terms_to_file() {
    let dir = cache();
    let path = dir.path().join("b.txt");
    let out = run(&["terms", "-z", "-1", "-N", "5", "--out", path.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "0 1\n1 0\n2 1\n3 1\n4 3\n5 4\n");
}

#[test]
fn usage_errors_exit_two() {
    let dir = cache();
    assert_eq!(run(&["terms", "-z", "-2", "-N", "3"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["saddle", "-n", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["constants", "-d", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["verify", "-N", "100", "--stride", "500"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["verify", "-N", "100", "--full"], dir.path()).status.code(), Some(2));
}

#[test]
fn constants_match_printed_digits() {
    let dir = cache();
    let out = run(&["constants", "-z", "0", "-d", "50"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("S = 0.60047660139257591296"));
    assert!(stdout(&out).contains("c = 19.5599964974"));
    let out = run(&["constants", "-z", "1", "-d", "30"], dir.path());
    assert!(stdout(&out).contains("S = 0.79022140137510852629"));
}

#[test]
fn saddle_near_limit_for_large_n() {
    let dir = cache();
    let out = run(&["saddle", "-n", "10000000", "-z", "0"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let value = |label: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(label)).unwrap();
        line.rsplit(' ').next().unwrap().parse().unwrap()
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    assert!((value("r solved") - inv_phi).abs() < 2e-4);
    assert!((value("r expansion") - inv_phi).abs() < 2e-4);
    assert!(text.contains("difference * n^(3/2) = "));
}

#[test]
fn default_verify_passes_and_writes_svg() {
    let dir = cache();
    let svg = dir.path().join("ratio.svg");
    let csv = dir.path().join("ratio.csv");
    let out = run(&["verify", "--svg", svg.to_str().unwrap(), "--csv", csv.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("gate = pass"));
    let text = std::fs::read_to_string(svg).unwrap();
    assert!(roxmltree::Document::parse(&text).is_ok());
    assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 101);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = cache();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# shift one\nz = 1\nN = 4\n").unwrap();
    let c = conf.to_str().unwrap();
    let out = run(&["--config", c, "terms"], dir.path());
    assert_eq!(stdout(&out), "0 1\n1 1\n2 3\n3 6\n4 14\n");
    let out = run(&["--config", c, "terms", "-z", "-1"], dir.path());
    assert_eq!(stdout(&out).lines().nth(1), Some("1 0"));
    std::fs::write(&conf, "z: 1\n").unwrap();
    assert_eq!(run(&["--config", c, "terms"], dir.path()).status.code(), Some(2));
}

#[test]
fn offline_cold_cache_exits_four() {
    let dir = cache();
    let out = run(&["verify", "-N", "200", "--stride", "10", "--oeis", "--offline"], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

fn serve_once(body: String) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut line = String::new();
        while reader.read_line(&mut line).map(|n| n > 0).unwrap_or(false) && line != "\r\n" {
            line.clear();
        }
        let _ = write!(stream, "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len());
    });
    base
}

#[test]
fn oeis_cross_check_through_local_server() {
    let dir = cache();
    let body = euler_transform(ShiftParam::new(2).unwrap(), 150).unwrap().to_bfile_string();
    let base = serve_once(body);
    let out = Command::new(env!("CARGO_BIN_EXE_fibeuler"))
        .args(["verify", "-z", "2", "-N", "400", "--stride", "20", "--oeis"])
        .env("FIBEULER_CACHE_DIR", dir.path())
        .env("OEIS_BASE_URL", &base)
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(text.contains("A260787 first 100 terms: Agreement"), "{text}");
    assert!(dir.path().join("b260787.txt").is_file());
    // the cached copy now serves offline runs
    let again = run(&["verify", "-z", "2", "-N", "400", "--stride", "20", "--oeis", "--offline"], dir.path());
    assert!(stdout(&again).contains("Agreement"));
    assert_eq!(out.status.code(), again.status.code());
}
