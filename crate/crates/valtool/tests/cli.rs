use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn valtool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valtool")).args(args).output().expect("spawn valtool")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const HEAD: &str = "[field]\nbase = Q\n[ring R]\nparams = x, y\n[valuation nu]\nring = R\nbeta = 1, 3/2\n";

#[test]
fn v1_runs_clean() {
    let o = valtool(&["run", fixture("v1.scn").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("== eval y^2 + x^3 on nu (line 23) ==\nvalue 3\n"), "{out}");
    assert!(out.contains("x1 = x^2·y^-1, y1 = x^-3·y^2"), "{out}");
}

#[test]
fn def2_csv_has_the_ramification_block() {
    let o = valtool(&["run", fixture("def2.scn").to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let block = "route,e,f,delta,consistent\nalignment,1,1,,true\nostrowski,1,1,1,true\nlocal-degree,1,1,1,true\n";
    assert!(out.contains(block), "{out}");
}

#[test]
fn every_fixture_checks_and_runs() {
    for f in ["v1.scn", "def2.scn", "pi2.scn", "disc.scn"] {
        let p = fixture(f);
        let o = valtool(&["check", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stdout(&o));
        for fmt in ["text", "csv", "dot"] {
            let o = valtool(&["run", p.to_str().unwrap(), "--format", fmt, "--depth", "3"]);
            assert_eq!(o.status.code(), Some(0), "{f} {fmt}: {}", stderr(&o));
        }
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    for f in ["pi2.scn", "disc.scn"] {
        let p = fixture(f);
        let args = ["run", p.to_str().unwrap(), "--seed", "9", "--format", "csv"];
        assert_eq!(valtool(&args).stdout, valtool(&args).stdout);
    }
}

#[test]
fn dot_shows_the_transform_chain() {
    let o = valtool(&["run", fixture("v1.scn").to_str().unwrap(), "--format", "dot"]);
    let out = stdout(&o);
    assert!(out.starts_with("digraph transforms {"), "{out}");
    assert!(out.contains("\"nu:0\" -> \"nu:1\""), "{out}");
}

#[test]
fn parse_errors_exit_2_with_a_location() {
    let p = scratch("bad_key.scn", &format!("{HEAD}key P2 = y^2 - P5 value 7/2\n"));
    let o = valtool(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad_key.scn:8:16: undeclared name (at `P5`)"), "{err}");
    assert!(stdout(&o).is_empty());
    let o = valtool(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_sequences() {
    // beta_2 must exceed n_1*beta_1 = 3.
    let p = scratch("weak.scn", &format!("{HEAD}key P2 = y^2 - x^3 value 3\n[run]\nvalidate\neval x*y\n"));
    let o = valtool(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("nu: invalid"));
    let o = valtool(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAULT: "), "{out}");
    assert!(out.contains("value 5/2"), "{out}");
}

#[test]
fn undecided_values_exit_0() {
    let p = scratch("undecided.scn", &format!("{HEAD}key P2 = y^2 - x^3 value 7/2\n[run]\neval y^2 - x^3 + x^2*y\n"));
    let o = valtool(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("undecided"));
}

#[test]
fn empty_run_section() {
    let p = scratch("empty.scn", &format!("{HEAD}[run]\n"));
    let o = valtool(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors() {
    assert_eq!(valtool(&["run", "/nonexistent/x.scn"]).status.code(), Some(2));
    assert_eq!(valtool(&["run", fixture("v1.scn").to_str().unwrap(), "--format", "xml"]).status.code(), Some(2));
    assert_eq!(valtool(&["frobnicate"]).status.code(), Some(2));
    let o = valtool(&["run", fixture("pi2.scn").to_str().unwrap(), "--value-bound", "1/0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn value_bound_is_accepted() {
    let o = valtool(&["run", fixture("pi2.scn").to_str().unwrap(), "--value-bound", "pi + 8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("splitting witnessed"));
}
