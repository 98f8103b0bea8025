use std::io::Write;
use std::process::{Command, Stdio};

use clap::Parser;
use needle_cli::{agreement, evaluate, run, Cli, Engine, Outcome, EXIT_OUT_OF_FUEL, EXIT_STUCK, EXIT_USAGE, EXIT_VALUE};
use needle_core::parse;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn needle(args: &[&str]) -> Run {
    let cli = Cli::try_parse_from(std::iter::once("needle").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&cli, &mut std::io::empty(), &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

const ENGINES: [&str; 4] = ["oracle", "machine", "letrec", "simulate"];

#[test]
fn machine_prints_the_unloaded_answer() {
    let r = needle(&["--engine", "machine", r"(\x.x) \y.y"]);
    assert_eq!((r.code, r.out.as_str()), (EXIT_VALUE, "(\\x.\\y.y) \\y.y\n"));
}

#[test]
fn black_hole_is_reported_on_stderr() {
    let r = needle(&["--engine", "letrec", "letrec x = x in x"]);
    assert_eq!(r.code, EXIT_STUCK);
    assert!(r.err.starts_with("black hole: x"), "{}", r.err);
    assert!(r.out.is_empty());
}

#[test]
fn compare_with_the_simulation() {
    let r = needle(&["--engine", "machine", "--compare", "simulate", "car (cons 2 3)"]);
    assert_eq!((r.code, r.out.as_str()), (EXIT_VALUE, "AGREE: 2\n"));
}

#[test]
fn every_pair_of_engines_agrees_on_small_programs() {
    let programs = [r"(\x.x) \y.y", "add1 (add1 1)", r"let f = \x.cons x x in cdr (f 4)", r"(\x.\y.x) 1 2"];
    for p in programs {
        for a in ENGINES {
            for b in ENGINES {
                let r = needle(&["--engine", a, "--compare", b, p]);
                assert_eq!(r.code, EXIT_VALUE, "{a} vs {b} on {p}: {}{}", r.out, r.err);
                assert!(r.out.starts_with("AGREE: "), "{}", r.out);
            }
        }
    }
}

#[test]
fn exit_codes_for_each_outcome() {
    let omega = r"(\x.x x) \x.x x";
    for e in ENGINES {
        assert_eq!(needle(&["--engine", e, "add1 1"]).code, EXIT_VALUE, "{e}");
        assert_eq!(needle(&["--engine", e, "--fuel", "50", omega]).code, EXIT_OUT_OF_FUEL, "{e}");
        assert_eq!(needle(&["--engine", e, "car 1"]).code, EXIT_STUCK, "{e}");
        assert_eq!(needle(&["--engine", e, "(\\x.x"]).code, EXIT_STUCK, "{e}");
    }
    for e in ["machine", "simulate"] {
        let r = needle(&["--engine", e, "letrec f = f in f"]);
        assert_eq!(r.code, EXIT_USAGE, "{e}");
        assert!(r.err.contains("letrec"), "{}", r.err);
    }
    assert_eq!(needle(&["--compare", "oracle", "--fuel", "50", omega]).code, EXIT_OUT_OF_FUEL);
}

#[test]
fn trace_has_one_line_per_configuration() {
    let programs = [r"(\x.x) \y.y", "letrec y = cons 1 y in y", "car (cons 2 3)", r"let x = add1 1 in x"];
    for p in programs {
        for e in ENGINES {
            let t = parse(p).unwrap();
            let Ok(report) = evaluate(engine(e), &t, 10_000, false) else { continue };
            let r = needle(&["--engine", e, "--trace", p]);
            assert_eq!(r.code, EXIT_VALUE, "{e} {p}");
            let lines = r.out.lines().count() - 1;
            assert_eq!(lines as u64, report.steps + 1, "{e} {p}\n{}", r.out);
        }
    }
}

fn engine(name: &str) -> Engine {
    <Engine as clap::ValueEnum>::from_str(name, false).unwrap()
}

#[test]
fn golden_letrec_trace() {
    let r = needle(&["--engine", "letrec", "--trace", "letrec y = cons 1 y in y"]);
    let tags: Vec<&str> =
        r.out.lines().skip(1).filter_map(|l| l.split_whitespace().nth(1)).take(9).collect();
    assert_eq!(tags, ["LF.4", "LD.4", "LF.1", "LN.1", "LF.CONS", "LCONS", "LB.3", "LD.1", "LB.1"]);
}

#[test]
fn stats_go_to_stderr() {
    let r = needle(&["--engine", "machine", "--stats", "add1 (add1 1)"]);
    assert_eq!(r.out, "3\n");
    assert!(r.err.contains("steps: "), "{}", r.err);
    assert!(r.err.contains("deltas: 2"), "{}", r.err);
    assert!(r.err.contains("fresh names: "), "{}", r.err);
    assert!(r.err.contains("max depth: "), "{}", r.err);
}

#[test]
fn default_engine_follows_the_program() {
    assert_eq!(needle(&["letrec a = 1 in add1 a"]).code, EXIT_VALUE);
    assert_eq!(needle(&["add1 1"]).out, "2\n");
}

#[test]
fn disagreement_is_a_failure() {
    let a = Outcome::Term(parse(r"\x.x").unwrap());
    let b = Outcome::Term(parse(r"\x.\y.x").unwrap());
    assert_eq!(agreement(&a, &b), None);
    assert_eq!(agreement(&a, &Outcome::Stuck("x".into())), None);
    assert!(agreement(&a, &Outcome::Term(parse(r"\z.z").unwrap())).is_some());
}

#[test]
fn program_from_a_file() {
    let path = std::env::temp_dir().join(format!("needle-cli-test-{}.nd", std::process::id()));
    std::fs::write(&path, "-- a comment\nadd1 41\n").unwrap();
    let r = needle(&[path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(r.out, "42\n");
}

fn binary(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_needle"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.env_remove("NEEDLE_FUEL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

#[test]
fn binary_reads_stdin_and_sets_exit_codes() {
    assert_eq!(binary(&["-"], "add1 (add1 1)", &[]), (0, "3\n".into(), String::new()));
    assert_eq!(binary(&["--no-such-flag", "x"], "", &[]).0, EXIT_USAGE);
    assert_eq!(binary(&[], "", &[]).0, EXIT_USAGE);
    assert_eq!(binary(&["--engine", "fast", "x"], "", &[]).0, EXIT_USAGE);
    assert_eq!(binary(&["--help"], "", &[]).0, 0);
}

#[test]
fn fuel_comes_from_the_environment_unless_given() {
    let omega = r"(\x.x x) \x.x x";
    let (code, _, err) = binary(&["--engine", "oracle", omega], "", &[("NEEDLE_FUEL", "7")]);
    assert_eq!(code, EXIT_OUT_OF_FUEL);
    assert!(err.contains("after 7 steps"), "{err}");
    let (_, _, err) = binary(&["--engine", "oracle", "--fuel", "3", omega], "", &[("NEEDLE_FUEL", "7")]);
    assert!(err.contains("after 3 steps"), "{err}");
}

#[test]
fn both_machines_agree_across_a_corpus() {
    let mut compared = 0;
    for t in needle_core::corpus::corpus(5, 150, 13) {
        if t.contains_letrec() {
            continue;
        }
        let a = evaluate(Engine::Machine, &t, 3_000, false).unwrap();
        let b = evaluate(Engine::Letrec, &t, 3_000, false).unwrap();
        if a.outcome == Outcome::OutOfFuel || b.outcome == Outcome::OutOfFuel {
            continue;
        }
        assert!(agreement(&a.outcome, &b.outcome).is_some(), "{t}: {:?} vs {:?}", a.outcome, b.outcome);
        compared += 1;
    }
    assert!(compared > 80, "{compared}");
}
