//! The acceptance criteria, one check each. Every check prints a PASS or
//! FAIL line; the test fails if any check fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use needle_core::control::{crun, COutcome, CValue};
use needle_core::corpus::{corpus, enumerate_closed};
use needle_core::letrec_machine::{
    lcheck_wf, linject, lrender, lrun, lrun_with, lunload, LMachineError, LRule, LRunOutcome,
};
use needle_core::machine::{check_wf, inject, render, run, run_with, unload, Rule, RunOutcome};
use needle_core::oracle::{decompose, evaluate_letrec, Decomposition, Outcome, StuckReason};
use needle_core::syntax::{alpha_equal, alpha_equal_up_to_binding_order, Term};
use needle_core::translate::{simulate, simulate_with, NeedStrategy, SimOutcome, SimValue};

/// Wall-clock limit for each golden example.
const GOLDEN_LIMIT: Duration = Duration::from_millis(10);
/// Wall-clock limit for the per-step soundness suite.
const SUITE_LIMIT: Duration = Duration::from_secs(120);
const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 500;
const MAX_TERM_SIZE: usize = 15;
const FUEL: u64 = 5_000;
const MAX_GOLDEN_STEPS: u64 = 12;
const ENUMERATION_SIZE: usize = 8;

struct Report {
    failed: usize,
}

impl Report {
    fn record(&mut self, n: u32, name: &str, result: Result<String, String>, elapsed: Duration) {
        let line = match result {
            Ok(detail) => format!("PASS criterion {n} ({name}): {detail} [{elapsed:.2?}]"),
            Err(detail) => {
                self.failed += 1;
                format!("FAIL criterion {n} ({name}): {detail} [{elapsed:.2?}]")
            }
        };
        println!("{line}");
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn golden_machine(wf: &mut Audit) -> Result<String, String> {
    let t = parse(r"(\x.x) \y.y");
    let (r, elapsed) = timed(|| run(inject(&t).unwrap(), 100));
    check(elapsed < GOLDEN_LIMIT, format!("took {elapsed:?}"))?;

    let mut rules = Vec::new();
    let start = inject(&t).unwrap();
    wf.configurations += 1;
    if !check_wf(&start).is_ok() {
        wf.ill_formed.push(format!("initial: {}", check_wf(&start)));
    }
    let checked = run_with(start, 100, |_, rule, c| {
        rules.push(rule);
        wf.configurations += 1;
        let report = check_wf(c);
        if !report.is_ok() {
            wf.ill_formed.push(format!("after {rule}: {report}"));
        }
    });
    check(checked.stats == r.stats, "observed run differs from plain run")?;

    use Rule::*;
    let prefix = [F3, F2, B2, D2, F1, N1, F2, B3];
    check(rules.len() >= prefix.len() && rules[..prefix.len()] == prefix, format!("prefix {rules:?}"))?;
    check(rules[prefix.len()..] == [D1, B1], format!("suffix {:?}", &rules[prefix.len()..]))?;
    check(r.steps() <= MAX_GOLDEN_STEPS, format!("{} steps", r.steps()))?;
    let RunOutcome::Final(c) = &r.outcome else { return Err(format!("{:?}", r.outcome)) };
    let shown = render(c);
    check(shown == "⟨x | ⟨[(\\x.[]) \\y.y], \\y.y⟩⟩", format!("final {shown}"))?;
    check(alpha_equal(&unload(c), &parse(r"(\x.\y.y) \y.y")), format!("unloads to {}", unload(c)))?;
    let tags: Vec<&str> = rules.iter().map(|r| r.tag()).collect();
    Ok(format!("{} in {} steps, {}", tags.join(" "), r.steps(), shown))
}

fn golden_letrec(wf: &mut Audit) -> Result<String, String> {
    let t = parse("letrec y = cons 1 y in y");
    let (r, elapsed) = timed(|| lrun(linject(&t).unwrap(), 100));
    check(elapsed < GOLDEN_LIMIT, format!("took {elapsed:?}"))?;

    let mut rules = Vec::new();
    let start = linject(&t).unwrap();
    wf.configurations += 1;
    if !lcheck_wf(&start).is_ok() {
        wf.ill_formed.push(format!("initial: {}", lcheck_wf(&start)));
    }
    lrun_with(start, 100, |_, rule, c| {
        rules.push(rule);
        wf.configurations += 1;
        let report = lcheck_wf(c);
        if !report.is_ok() {
            wf.ill_formed.push(format!("after {rule}: {report}"));
        }
    });

    use LRule::*;
    check(rules == [F4, D4, F1, N1, FCons, Cons, B3, D1, B1], format!("rules {rules:?}"))?;
    let LRunOutcome::Final(c) = &r.outcome else { return Err(format!("{:?}", r.outcome)) };
    let (y, x1, x2) = (n("y"), n("x1"), n("x2"));
    let pair = Term::PairVal(x1.clone(), x2.clone());
    let expected = Term::letrec(
        vec![(y.clone(), pair.clone()), (x1, Term::IntConst(1)), (x2, Term::Var(y))],
        pair,
    );
    let got = lunload(c);
    check(alpha_equal_up_to_binding_order(&got, &expected), format!("final {got}"))?;
    let tags: Vec<&str> = rules.iter().map(|r| r.tag()).collect();
    Ok(format!("{} ending {}", tags.join(" "), lrender(c)))
}

fn prompt_example() -> Result<String, String> {
    let (r, elapsed) = timed(|| crun(common::prompt_example(), 1_000));
    check(elapsed < GOLDEN_LIMIT, format!("took {elapsed:?}"))?;
    match r.outcome {
        COutcome::Value(CValue::Int(9)) => Ok(format!("9 in {} steps", r.stats.steps)),
        other => Err(format!("{other:?}")),
    }
}

fn soundness(terms: &[Term], wf: &mut Audit) -> Result<String, String> {
    let (audit, elapsed) = timed(|| {
        let mut audit = Audit::default();
        for t in terms {
            audit.absorb(if t.contains_letrec() { audit_letrec_machine(t, FUEL) } else { audit_machine(t, FUEL) });
        }
        audit
    });
    let summary = format!(
        "{} terms, {} transitions ({} reductions), {} violations",
        terms.len(),
        audit.transitions,
        audit.reductions,
        audit.violations.len()
    );
    wf.configurations += audit.configurations;
    wf.ill_formed.extend(audit.ill_formed);
    for v in audit.violations.iter().take(5) {
        println!("    {v}");
    }
    check(audit.violations.is_empty(), summary.clone())?;
    check(elapsed < SUITE_LIMIT, format!("{summary}; took {elapsed:?}"))?;
    Ok(summary)
}

fn equivalence(terms: &[Term]) -> Result<String, String> {
    let mut disagreements = Vec::new();
    let (mut simulated, mut ground) = (0, 0);
    for t in terms {
        disagreements.extend(machine_vs_oracle(t, FUEL));
        if !t.contains_letrec() {
            simulated += 1;
            let (d, g) = simulate_vs_machine(t, FUEL);
            ground += g as usize;
            disagreements.extend(d);
        }
    }
    for d in disagreements.iter().take(5) {
        println!("    {d}");
    }
    let summary = format!(
        "machine/oracle on {} terms, simulate on {simulated} letrec-free terms ({ground} with ground values), {} disagreements",
        terms.len(),
        disagreements.len()
    );
    check(disagreements.is_empty(), summary.clone())?;
    Ok(summary)
}

fn well_formedness(wf: &Audit) -> Result<String, String> {
    for v in wf.ill_formed.iter().take(5) {
        println!("    {v}");
    }
    let summary = format!("{} configurations checked, {} ill-formed", wf.configurations, wf.ill_formed.len());
    check(wf.ill_formed.is_empty() && wf.configurations > 0, summary.clone())?;
    Ok(summary)
}

fn sharing() -> Result<String, String> {
    // An integer is consumed only by add1/sub1, so no terminating program
    // demands an integer-valued variable twice. The shared binding here is
    // a function whose answer holds the delayed `add1 0`.
    let t = parse(r"let x = (\n.\w. w n) (add1 0) in x (x (\m.\u. m))");
    let m = run(inject(&t).unwrap(), 1_000);
    let RunOutcome::Final(c) = &m.outcome else { return Err(format!("machine: {:?}", m.outcome)) };
    check(alpha_equal(answer_value(&unload(c)), &Term::IntConst(1)), format!("machine value {}", unload(c)))?;
    check(m.stats.deltas == 1, format!("machine δ-counter {}", m.stats.deltas))?;

    let need = simulate(&t, 100_000).unwrap();
    check(matches!(need.outcome, SimOutcome::Value(SimValue::Int(1))), format!("simulate {:?}", need.outcome))?;
    let entries = need.stats.ticks.get("x").copied().unwrap_or(0);
    check(entries == 1, format!("simulate entered x's thunk {entries} times"))?;

    let name = simulate_with(&t, 100_000, NeedStrategy::Rethunk).unwrap();
    check(matches!(name.outcome, SimOutcome::Value(SimValue::Int(1))), format!("rethunk {:?}", name.outcome))?;
    let broken = name.stats.ticks.get("x").copied().unwrap_or(0);
    check(broken >= 2, format!("call-by-name variant entered x's thunk {broken} times"))?;
    Ok(format!("machine δ = 1, simulate entries = {entries}, call-by-name entries = {broken}"))
}

fn black_holes() -> Result<String, String> {
    let mut seen = Vec::new();
    for k in 1..=4usize {
        let t = cycle(k);
        let r = lrun(linject(&t).unwrap(), 1_000);
        match &r.outcome {
            LRunOutcome::Stuck(_, LMachineError::BlackHole(chain)) => {
                check(r.steps() <= 4 * k as u64, format!("k={k}: {} steps", r.steps()))?;
                check(chain.len() == k + 1, format!("k={k}: chain {chain:?}"))?;
            }
            other => return Err(format!("k={k}: machine {other:?}")),
        }
        match evaluate_letrec(&t, 1_000) {
            Outcome::Stuck { reason: StuckReason::BlackHole(_), .. } => {}
            other => return Err(format!("k={k}: oracle {other}")),
        }
        seen.push(format!("k={k}: {} steps", r.steps()));
    }
    Ok(seen.join(", "))
}

fn unique_decomposition() -> Result<String, String> {
    let terms = enumerate_closed(ENUMERATION_SIZE);
    let (mut answers, mut redexes) = (0, 0);
    let mut anomalies = Vec::new();
    for t in &terms {
        let reference = all_decompositions(t);
        match decompose(t) {
            Decomposition::IsAnswer(_) => {
                answers += 1;
                if !reference.is_empty() || !is_answer(t) {
                    anomalies.push(format!("{t}: answer, but reference finds {reference:?}"));
                }
            }
            Decomposition::Redex { ctx, redex } => {
                redexes += 1;
                let ok = reference.len() == 1
                    && oracle_path(&ctx).as_ref() == Some(&reference[0].0)
                    && redex == reference[0].1
                    && ctx.plug(redex.clone()) == *t;
                if !ok {
                    anomalies.push(format!("{t}: oracle {redex} vs reference {reference:?}"));
                }
            }
            Decomposition::Stuck(r) => anomalies.push(format!("{t}: stuck: {r}")),
        }
    }
    for a in anomalies.iter().take(5) {
        println!("    {a}");
    }
    let summary = format!(
        "{} closed terms of size ≤ {ENUMERATION_SIZE}: {answers} answers, {redexes} redexes, {} anomalies",
        terms.len(),
        anomalies.len()
    );
    check(anomalies.is_empty(), summary.clone())?;
    Ok(summary)
}

fn main() {
    let mut report = Report { failed: 0 };
    let mut wf = Audit::default();

    let (r, d) = timed(|| golden_machine(&mut wf));
    report.record(1, "machine golden trace", r, d);
    let (r, d) = timed(|| golden_letrec(&mut wf));
    report.record(2, "letrec golden trace", r, d);
    let (r, d) = timed(prompt_example);
    report.record(3, "prompt example", r, d);

    let terms = corpus(CORPUS_SEED, CORPUS_SIZE, MAX_TERM_SIZE);
    let (r, d) = timed(|| soundness(&terms, &mut wf));
    report.record(4, "per-step soundness", r, d);
    let (r, d) = timed(|| equivalence(&terms));
    report.record(5, "engine equivalence", r, d);
    let (r, d) = timed(|| well_formedness(&wf));
    report.record(6, "wf preservation", r, d);
    let (r, d) = timed(sharing);
    report.record(7, "sharing", r, d);
    let (r, d) = timed(black_holes);
    report.record(8, "black holes", r, d);
    let (r, d) = timed(unique_decomposition);
    report.record(9, "unique decomposition", r, d);

    println!("{} of 9 criteria passed", 9 - report.failed);
    if report.failed > 0 {
        std::process::exit(1);
    }
}
