//! The `needle` command: parse a program, run it under one engine, and
//! optionally trace it or check it against a second engine.

use std::fmt;
use std::io::{self, Read, Write};
use std::path::Path;

use clap::{Parser, ValueEnum};
use needle_core::letrec_machine::{linject, lrender, lrun_with, lunload, LRunOutcome};
use needle_core::machine::{inject, render, run_with, unload, RunOutcome};
use needle_core::oracle::{step_letrec, step_sr, Step};
use needle_core::syntax::{alpha_equal_up_to_binding_order, SyntaxError};
use needle_core::control::render_state;
use needle_core::translate::{simulate_observed, NeedStrategy, SimOutcome, SimValue};
use needle_core::{parse, Term};
use thiserror::Error;

pub const EXIT_VALUE: i32 = 0;
pub const EXIT_STUCK: i32 = 1;
pub const EXIT_OUT_OF_FUEL: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Standard-order reduction on terms.
    Oracle,
    /// The abstract machine (no letrec).
    Machine,
    /// The cyclic machine with letrec.
    Letrec,
    /// The translation into the delimited-control runtime (no letrec).
    Simulate,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

#[derive(Debug, Parser)]
#[command(name = "needle", version, about = "Evaluate call-by-need programs under several engines")]
pub struct Cli {
    /// Defaults to `letrec` for programs using letrec and `machine` otherwise.
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,

    /// Maximum number of steps.
    #[arg(long, env = "NEEDLE_FUEL", default_value_t = 100_000)]
    pub fuel: u64,

    /// Print every configuration before the result.
    #[arg(long)]
    pub trace: bool,

    /// Run a second engine and check that both agree.
    #[arg(long, value_enum, value_name = "ENGINE")]
    pub compare: Option<Engine>,

    /// Print counters to stderr.
    #[arg(long)]
    pub stats: bool,

    /// A program, a file holding one, or `-` for stdin.
    pub input: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Input { path: String, source: io::Error },
    #[error("syntax error: {0}")]
    Syntax(#[from] SyntaxError),
    #[error("the {0} engine cannot run letrec programs; use --engine letrec or --engine oracle")]
    NeedsLetrec(Engine),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax(_) => EXIT_STUCK,
            CliError::Input { .. } | CliError::NeedsLetrec(_) => EXIT_USAGE,
        }
    }
}

/// What an engine produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Term(Term),
    Sim(SimValue),
    Stuck(String),
    OutOfFuel,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub engine: Engine,
    pub outcome: Outcome,
    pub steps: u64,
    pub stats: Vec<(String, String)>,
    /// Empty unless tracing; otherwise one line per configuration.
    pub trace: Vec<String>,
}

/// The source text named by `input`.
pub fn read_input(input: &str, stdin: &mut dyn Read) -> Result<String, CliError> {
    let err = |source| CliError::Input { path: input.to_string(), source };
    if input == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(err)?;
        Ok(s)
    } else if Path::new(input).is_file() {
        std::fs::read_to_string(input).map_err(err)
    } else {
        Ok(input.to_string())
    }
}

fn line(i: u64, tag: &str, text: &str) -> String {
    format!("{i:>5} {tag:<8} {text}")
}

/// Runs `t` under `engine` for at most `fuel` steps.
pub fn evaluate(engine: Engine, t: &Term, fuel: u64, trace: bool) -> Result<Report, CliError> {
    if t.contains_letrec() && matches!(engine, Engine::Machine | Engine::Simulate) {
        return Err(CliError::NeedsLetrec(engine));
    }
    let mut lines = Vec::new();
    let (outcome, steps, stats) = match engine {
        Engine::Oracle => {
            let step = if t.contains_letrec() { step_letrec } else { step_sr };
            if trace {
                lines.push(line(0, "", &t.to_string()));
            }
            let mut cur = t.clone();
            let mut steps = 0;
            let mut rules = std::collections::BTreeMap::<&str, u64>::new();
            let outcome = loop {
                match step(&cur) {
                    Step::AlreadyAnswer => break Outcome::Term(cur),
                    Step::Stuck(reason) => break Outcome::Stuck(reason.to_string()),
                    Step::Stepped { .. } if steps == fuel => break Outcome::OutOfFuel,
                    Step::Stepped { term, rule } => {
                        steps += 1;
                        *rules.entry(rule).or_default() += 1;
                        if trace {
                            lines.push(line(steps, rule, &term.to_string()));
                        }
                        cur = term;
                    }
                }
            };
            let stats = rules.into_iter().map(|(r, n)| (format!("rule {r}"), n.to_string())).collect();
            (outcome, steps, stats)
        }
        Engine::Machine => {
            let c = match inject(t) {
                Ok(c) => c,
                Err(e) => return Ok(stuck(engine, e.to_string())),
            };
            if trace {
                lines.push(line(0, "", &render(&c)));
            }
            let r = run_with(c, fuel, |_, rule, next| {
                if trace {
                    lines.push(line(lines.len() as u64, rule.tag(), &render(next)));
                }
            });
            let outcome = match &r.outcome {
                RunOutcome::Final(c) => Outcome::Term(unload(c)),
                RunOutcome::Stuck(_, e) => Outcome::Stuck(e.to_string()),
                RunOutcome::OutOfFuel(_) => Outcome::OutOfFuel,
            };
            let s = &r.stats;
            let mut stats = vec![
                ("deltas".to_string(), s.deltas.to_string()),
                ("fresh names".to_string(), s.renames.to_string()),
                ("max depth".to_string(), s.max_depth.to_string()),
            ];
            stats.extend(s.rule_counts.iter().map(|(r, n)| (format!("rule {}", r.tag()), n.to_string())));
            (outcome, s.steps, stats)
        }
        Engine::Letrec => {
            let c = match linject(t) {
                Ok(c) => c,
                Err(e) => return Ok(stuck(engine, e.to_string())),
            };
            if trace {
                lines.push(line(0, "", &lrender(&c)));
            }
            let r = lrun_with(c, fuel, |_, rule, next| {
                if trace {
                    lines.push(line(lines.len() as u64, rule.tag(), &lrender(next)));
                }
            });
            let outcome = match &r.outcome {
                LRunOutcome::Final(c) => Outcome::Term(lunload(c)),
                LRunOutcome::Stuck(_, e) => Outcome::Stuck(e.to_string()),
                LRunOutcome::OutOfFuel(_) => Outcome::OutOfFuel,
            };
            let s = &r.stats;
            let mut stats = vec![
                ("deltas".to_string(), s.deltas.to_string()),
                ("fresh names".to_string(), s.renames.to_string()),
                ("max depth".to_string(), s.max_depth.to_string()),
            ];
            stats.extend(s.rule_counts.iter().map(|(r, n)| (format!("rule {}", r.tag()), n.to_string())));
            (outcome, s.steps, stats)
        }
        Engine::Simulate => {
            let r = simulate_observed(t, fuel, NeedStrategy::Memoize, |s| {
                if trace {
                    lines.push(line(lines.len() as u64, "", &render_state(s)));
                }
            })
            .map_err(|_| CliError::NeedsLetrec(engine))?;
            let outcome = match r.outcome {
                SimOutcome::Value(SimValue::Other(s)) => Outcome::Stuck(format!("not an answer: {s}")),
                SimOutcome::Value(v) => Outcome::Sim(v),
                SimOutcome::Error(e) => Outcome::Stuck(e.to_string()),
                SimOutcome::OutOfFuel => Outcome::OutOfFuel,
            };
            let s = &r.stats;
            let stats = vec![
                ("prompts".to_string(), s.prompts.len().to_string()),
                ("captures".to_string(), s.captures.to_string()),
                ("reinstatements".to_string(), s.reinstatements.to_string()),
                ("thunk entries".to_string(), s.ticks.values().sum::<u64>().to_string()),
                ("max continuation".to_string(), s.max_kont.to_string()),
                ("max metacontinuation".to_string(), s.max_meta.to_string()),
            ];
            (outcome, s.steps, stats)
        }
    };
    Ok(Report { engine, outcome, steps, stats, trace: lines })
}

fn stuck(engine: Engine, message: String) -> Report {
    Report { engine, outcome: Outcome::Stuck(message), steps: 0, stats: Vec::new(), trace: Vec::new() }
}

/// The part of an answer the simulation can observe.
#[derive(Debug, Clone, PartialEq)]
pub enum Ground {
    Int(i64),
    Closure,
    Pair,
    Other(String),
}

impl fmt::Display for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ground::Int(n) => write!(f, "{n}"),
            Ground::Closure => f.write_str("<closure>"),
            Ground::Pair => f.write_str("<pair>"),
            Ground::Other(s) => f.write_str(s),
        }
    }
}

/// The value inside the bindings of an answer.
pub fn answer_value(a: &Term) -> &Term {
    match a {
        Term::App(f, _) => match &**f {
            Term::Lam(_, body) => answer_value(body),
            _ => a,
        },
        Term::Letrec(_, body) => answer_value(body),
        _ => a,
    }
}

pub fn ground(o: &Outcome) -> Ground {
    match o {
        Outcome::Term(t) => match answer_value(t) {
            Term::IntConst(n) => Ground::Int(*n),
            Term::Lam(..) => Ground::Closure,
            Term::PairVal(..) => Ground::Pair,
            other => Ground::Other(other.to_string()),
        },
        Outcome::Sim(SimValue::Int(n)) => Ground::Int(*n),
        Outcome::Sim(SimValue::Closure(_)) => Ground::Closure,
        Outcome::Sim(SimValue::Pair(..)) => Ground::Pair,
        Outcome::Sim(SimValue::Other(s)) => Ground::Other(s.clone()),
        Outcome::Stuck(s) => Ground::Other(format!("stuck: {s}")),
        Outcome::OutOfFuel => Ground::Other("out of fuel".to_string()),
    }
}

fn show(o: &Outcome) -> String {
    match o {
        Outcome::Term(t) => t.to_string(),
        Outcome::Sim(v) => v.to_string(),
        Outcome::Stuck(s) => format!("stuck: {s}"),
        Outcome::OutOfFuel => "out of fuel".to_string(),
    }
}

/// An answer as one `letrec` around its value: `(\x.A) t` becomes the
/// binding `x = t`, so answers of both calculi compare directly.
pub fn as_letrec(a: &Term) -> Term {
    let mut bindings = Vec::new();
    let mut cur = a;
    loop {
        match cur {
            Term::App(f, t) => match &**f {
                Term::Lam(x, body) => {
                    bindings.push((x.clone(), (**t).clone()));
                    cur = body;
                }
                _ => break,
            },
            Term::Letrec(bs, body) => {
                bindings.extend(bs.iter().cloned());
                cur = body;
            }
            _ => break,
        }
    }
    if bindings.is_empty() {
        cur.clone()
    } else {
        Term::letrec(bindings, cur.clone())
    }
}

/// `Some(shown)` if the two outcomes agree. Term answers must be α-equal;
/// anything involving the simulation compares ground observables only.
pub fn agreement(a: &Outcome, b: &Outcome) -> Option<String> {
    match (a, b) {
        (Outcome::Term(x), Outcome::Term(y)) => {
            let same = alpha_equal_up_to_binding_order(x, y)
                || alpha_equal_up_to_binding_order(&as_letrec(x), &as_letrec(y));
            same.then(|| x.to_string())
        }
        (Outcome::Stuck(_), Outcome::Stuck(_)) => Some(show(a)),
        (Outcome::OutOfFuel, _) | (_, Outcome::OutOfFuel) => None,
        _ => {
            let (g, h) = (ground(a), ground(b));
            (g == h && !matches!(g, Ground::Other(_))).then(|| g.to_string())
        }
    }
}

fn exit_code(o: &Outcome) -> i32 {
    match o {
        Outcome::Term(_) | Outcome::Sim(_) => EXIT_VALUE,
        Outcome::Stuck(_) => EXIT_STUCK,
        Outcome::OutOfFuel => EXIT_OUT_OF_FUEL,
    }
}

fn print_stats(r: &Report, prefix: &str, err: &mut dyn Write) -> io::Result<()> {
    writeln!(err, "{prefix}steps: {}", r.steps)?;
    for (k, v) in &r.stats {
        writeln!(err, "{prefix}{k}: {v}")?;
    }
    Ok(())
}

/// Runs the command and returns the exit code.
pub fn run(cli: &Cli, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match try_run(cli, stdin, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn try_run(cli: &Cli, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let source = read_input(&cli.input, stdin)?;
    let t = parse(&source)?;
    let engine = cli.engine.unwrap_or(if t.contains_letrec() { Engine::Letrec } else { Engine::Machine });
    let first = evaluate(engine, &t, cli.fuel, cli.trace)?;
    let io = |e: io::Error| CliError::Input { path: "<output>".to_string(), source: e };
    for l in &first.trace {
        writeln!(out, "{l}").map_err(io)?;
    }
    let Some(other) = cli.compare else {
        if cli.stats {
            print_stats(&first, "", err).map_err(io)?;
        }
        match &first.outcome {
            Outcome::Term(_) | Outcome::Sim(_) => writeln!(out, "{}", show(&first.outcome)).map_err(io)?,
            Outcome::Stuck(s) => writeln!(err, "{s}").map_err(io)?,
            Outcome::OutOfFuel => writeln!(err, "out of fuel after {} steps", first.steps).map_err(io)?,
        }
        return Ok(exit_code(&first.outcome));
    };
    let second = evaluate(other, &t, cli.fuel, false)?;
    if cli.stats {
        print_stats(&first, &format!("{engine} "), err).map_err(io)?;
        print_stats(&second, &format!("{other} "), err).map_err(io)?;
    }
    for r in [&first, &second] {
        if r.outcome == Outcome::OutOfFuel {
            writeln!(err, "{}: out of fuel after {} steps", r.engine, r.steps).map_err(io)?;
            return Ok(EXIT_OUT_OF_FUEL);
        }
    }
    match agreement(&first.outcome, &second.outcome) {
        Some(shown) => {
            writeln!(out, "AGREE: {shown}").map_err(io)?;
            Ok(EXIT_VALUE)
        }
        None => {
            writeln!(out, "DISAGREE").map_err(io)?;
            writeln!(out, "  {engine}: {}", show(&first.outcome)).map_err(io)?;
            writeln!(out, "  {other}: {}", show(&second.outcome)).map_err(io)?;
            if engine == Engine::Simulate || other == Engine::Simulate {
                writeln!(out, "  ground: {} vs {}", ground(&first.outcome), ground(&second.outcome)).map_err(io)?;
            }
            Ok(EXIT_STUCK)
        }
    }
}
