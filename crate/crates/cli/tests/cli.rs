use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynprec")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn line<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .map(str::trim)
        .unwrap_or_else(|| panic!("no `{key}` line in\n{text}"))
}

#[test]
fn demo_worked_examples() {
    let o = run(&["demo", "add"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("(g)  rounding"));
    assert_eq!(line(&s, "result"), "+2^1 : 1.000|0.101|0.100");

    let s = stdout(&run(&["demo", "mul"]));
    assert_eq!(line(&s, "result"), "+2^1 : 1.010|0.000|1.010");

    let s = stdout(&run(&["demo", "recip"]));
    assert_eq!(line(&s, "result"), "+2^-4 : 1.100|1.100|1.100|1.100|1.100|1.100|1.100|1.101");
}

#[test]
fn demo_csv_lists_every_cell() {
    let s = stdout(&run(&["demo", "add", "--format", "csv"]));
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("step,label,sign,exponent,power,cell"));
    let g: Vec<&str> = s.lines().filter(|l| l.starts_with("g,")).collect();
    assert_eq!(g, ["g,rounding,+,1,0,1.000", "g,rounding,+,1,1,0.101", "g,rounding,+,1,2,0.100"]);
}

#[test]
fn eval_sum_examples() {
    let s = stdout(&run(&["eval-sum", "--example", "2"]));
    assert_eq!(line(&s, "sum"), "+2^-15 : 1.1010110|1.0000000");
    assert_eq!(line(&s, "levels"), "2 2 2");
    assert_eq!(line(&s, "adds"), "6");

    let s = stdout(&run(&["eval-sum", "--example", "3"]));
    assert_eq!(line(&s, "levels"), "2 2 1");
    assert_eq!(line(&s, "adds"), "5");

    let s = stdout(&run(&["eval-sum", "--example", "1"]));
    assert_eq!(line(&s, "levels"), "0 0 0");
}

#[test]
fn exit_codes() {
    // Cancellation that no stored precision can resolve.
    let o = run(&["eval-sum", "--t", "3", "--T", "1", "--target", "1e-40", "--", "1", "-1e-30"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("best"));

    assert_eq!(run(&["demo", "div", "1", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["demo", "add", "1"]).status.code(), Some(1));
    assert_eq!(run(&["demo", "add", "1", "2", "--rounding", "up"]).status.code(), Some(1));
    assert_eq!(run(&["newton", "--mode", "fixed(9)", "--T", "2"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small format\nt = 3\nT = 2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let x = "+2^0 : 1.110|1.010|1.110";
    let y = "+2^-3 : 1.111|1.100|1.011";

    let s = stdout(&run(&["demo", "add", x, y, "--config", cfg]));
    assert_eq!(line(&s, "result"), "+2^1 : 1.000|0.101|0.100");
    let s = stdout(&run(&["demo", "add", x, y, "--config", cfg, "--rounding", "truncate"]));
    assert_eq!(line(&s, "result"), "+2^1 : 1.000|0.101|0.011");
    // The file's T = 2 is too small for a four-chunk operand.
    let o = run(&["demo", "add", "+2^0 : 1.000|0.000|0.000|0.001", y, "--config", cfg]);
    assert_eq!(o.status.code(), Some(1));

    std::fs::write(dir.path().join("bad.cfg"), "colour = blue\n").unwrap();
    let o = run(&["demo", "add", "--config", dir.path().join("bad.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn newton_csv_is_deterministic() {
    let a = run(&["newton"]);
    let b = run(&["newton"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("step,x_k,err_k,prec,cum_mults,cum_adds,true_err"));
    assert_eq!(lines.next().unwrap().split(',').nth(2), Some(""));
    let last: Vec<&str> = s.lines().last().unwrap().split(',').collect();
    assert!(last[2].parse::<f64>().unwrap() < 1e-15);
    assert_eq!(last[3], "5");
    let summary = String::from_utf8(a.stderr).unwrap();
    assert_eq!(line(&summary, "termination"), "converged");
}

#[test]
fn newton_fixed_mode_and_custom_poly() {
    // x^2 - 2 from 1 in double precision.
    let s = stdout(&run(&["newton", "--poly", "1,0,-2", "--x0", "1", "--mode", "fixed(0)", "--format", "table"]));
    assert!(line(&s, "x").starts_with("1.41421356237309"));
    assert_eq!(line(&s, "mode"), "fixed(0)");
}

#[test]
fn figure_two_writes_six_curves() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure", "2", "--max-iter", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for n in &names {
        let text = std::fs::read_to_string(dir.path().join(n)).unwrap();
        // Header, starting point and one update.
        assert_eq!(text.lines().count(), 3, "{n}");
    }

    let o = run(&["figure", "2", "--T", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn report_costs_match_prediction() {
    let s = stdout(&run(&["report", "--t", "7", "--T", "3"]));
    let mut n = 0;
    for l in s.lines().skip(1).filter(|l| l.starts_with("mul,")) {
        let f: Vec<u64> = l.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        assert_eq!((f[2], f[3]), (f[4], f[5]), "{l}");
        n += 1;
    }
    assert_eq!(n, 10);
}

#[test]
fn report_newton_totals() {
    let s = stdout(&run(&["report", "newton", "--mode", "fixed(0)"]));
    assert!(s.starts_with("op,q,p,count,mults,adds,carry_adds\n"));
    assert!(s.lines().last().unwrap().starts_with("total,,,"));
}
