//! Checkers shared by the integration suites. Nothing here calls the
//! oracle's decomposition code when it is the thing under test.
#![allow(dead_code)]

use needle_core::control::build::*;
use needle_core::control::{COp, Tm};
use needle_core::letrec_machine::{lcheck_wf, linject, lrun_with, lunload, LRunOutcome};
use needle_core::machine::{check_wf, inject, run_with, unload, Rule, RunOutcome};
use needle_core::oracle::{evaluate_letrec, evaluate_sr, step_letrec, step_sr, Outcome, Step};
use needle_core::syntax::{alpha_equal, alpha_equal_up_to_binding_order, Name, Term};
use needle_core::translate::{simulate, SimOutcome, SimValue};

pub fn n(s: &str) -> Name {
    Name::from_ident(s).unwrap()
}

pub fn parse(s: &str) -> Term {
    needle_core::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

// ---------------------------------------------------------------------------
// Reference decomposition for the pure core calculus.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    /// Into the operator of an application.
    L,
    /// Into the operand of an application.
    R,
    /// Into the body of an abstraction.
    B,
}

pub fn is_answer(t: &Term) -> bool {
    match t {
        Term::Lam(..) => true,
        Term::App(f, _) => matches!(&**f, Term::Lam(_, a) if is_answer(a)),
        _ => false,
    }
}

/// `t = E[x]` for some evaluation context `E` that does not bind `x`.
pub fn demands(t: &Term, x: &Name) -> bool {
    match t {
        Term::Var(y) => y == x,
        Term::App(f, a) => {
            if demands(f, x) {
                return true;
            }
            match &**f {
                Term::Lam(y, body) => (y != x && demands(body, x)) || (demands(body, y) && demands(a, x)),
                _ => false,
            }
        }
        _ => false,
    }
}

/// Every split of `t` into a context path and the subterm at its hole.
pub fn contexts(t: &Term) -> Vec<(Vec<Dir>, Term)> {
    let mut out = vec![(Vec::new(), t.clone())];
    if let Term::App(f, a) = t {
        for (mut p, s) in contexts(f) {
            p.insert(0, Dir::L);
            out.push((p, s));
        }
        if let Term::Lam(x, body) = &**f {
            for (mut p, s) in contexts(body) {
                p.splice(0..0, [Dir::L, Dir::B]);
                out.push((p, s));
            }
            if demands(body, x) {
                for (mut p, s) in contexts(a) {
                    p.insert(0, Dir::R);
                    out.push((p, s));
                }
            }
        }
    }
    out
}

pub fn is_redex(t: &Term) -> bool {
    let Term::App(f, a) = t else { return false };
    let deref_or_lift = match &**f {
        Term::Lam(x, body) if demands(body, x) => {
            matches!(&**a, Term::Lam(..))
                || matches!(&**a, Term::App(g, _) if matches!(&**g, Term::Lam(_, ans) if is_answer(ans)))
        }
        _ => false,
    };
    let assoc = matches!(&**f, Term::App(g, _) if matches!(&**g, Term::Lam(_, ans) if is_answer(ans)));
    deref_or_lift || assoc
}

pub fn all_decompositions(t: &Term) -> Vec<(Vec<Dir>, Term)> {
    contexts(t).into_iter().filter(|(_, s)| is_redex(s)).collect()
}

// ---------------------------------------------------------------------------
// Per-step soundness.

/// `to` is reachable from `from` in `min..=max` oracle steps, up to α.
pub fn reaches(
    from: &Term,
    to: &Term,
    min: usize,
    max: usize,
    step: impl Fn(&Term) -> Step,
    eq: impl Fn(&Term, &Term) -> bool,
) -> bool {
    let mut t = from.clone();
    for i in 0..=max {
        if i >= min && eq(&t, to) {
            return true;
        }
        match step(&t) {
            Step::Stepped { term, .. } => t = term,
            _ => return false,
        }
    }
    false
}

#[derive(Debug, Default)]
pub struct Audit {
    pub transitions: u64,
    pub reductions: u64,
    pub configurations: u64,
    /// Soundness failures.
    pub violations: Vec<String>,
    /// Configurations that failed the well-formedness check.
    pub ill_formed: Vec<String>,
}

impl Audit {
    pub fn absorb(&mut self, other: Audit) {
        self.transitions += other.transitions;
        self.reductions += other.reductions;
        self.configurations += other.configurations;
        self.violations.extend(other.violations);
        self.ill_formed.extend(other.ill_formed);
    }
}

fn slack(names: usize) -> usize {
    names + 2
}

/// Runs the machine on `t`, checking every transition against the oracle
/// and every configuration for well-formedness.
pub fn audit_machine(t: &Term, fuel: u64) -> Audit {
    let mut audit = Audit::default();
    let c = inject(t).expect("closed");
    let wf = check_wf(&c);
    audit.configurations += 1;
    if !wf.is_ok() {
        audit.ill_formed.push(format!("{t}: initial configuration: {wf}"));
    }
    run_with(c, fuel, |c1, rule, c2| {
        audit.transitions += 1;
        audit.configurations += 1;
        let wf = check_wf(c2);
        if !wf.is_ok() {
            audit.ill_formed.push(format!("{t}: after {rule}: {wf}"));
        }
        let (u1, u2) = (unload(c1), unload(c2));
        if rule.is_reduction() {
            audit.reductions += 1;
            // Pushing a binder with no answer bindings to move is the
            // identity on unloadings.
            let min = if rule == Rule::D2 { 0 } else { 1 };
            if !reaches(&u1, &u2, min, slack(c2.names().len()), step_sr, alpha_equal) {
                audit.violations.push(format!("{t}: {rule}: {u1}  ⇸  {u2}"));
            }
        } else if !alpha_equal(&u1, &u2) {
            audit.violations.push(format!("{t}: {rule} changed the unloading: {u1}  ≠  {u2}"));
        }
    });
    audit
}

pub fn audit_letrec_machine(t: &Term, fuel: u64) -> Audit {
    let mut audit = Audit::default();
    let c = linject(t).expect("closed");
    let wf = lcheck_wf(&c);
    audit.configurations += 1;
    if !wf.is_ok() {
        audit.ill_formed.push(format!("{t}: initial configuration: {wf}"));
    }
    lrun_with(c, fuel, |c1, rule, c2| {
        audit.transitions += 1;
        audit.configurations += 1;
        let wf = lcheck_wf(c2);
        if !wf.is_ok() {
            audit.ill_formed.push(format!("{t}: after {rule}: {wf}"));
        }
        let (u1, u2) = (lunload(c1), lunload(c2));
        if rule.is_reduction() {
            audit.reductions += 1;
            if !reaches(&u1, &u2, 0, slack(c2.names().len()), step_letrec, alpha_equal_up_to_binding_order) {
                audit.violations.push(format!("{t}: {rule}: {u1}  ⇸  {u2}"));
            }
        } else if !alpha_equal_up_to_binding_order(&u1, &u2) {
            audit.violations.push(format!("{t}: {rule} changed the unloading: {u1}  ≠  {u2}"));
        }
    });
    audit
}

// ---------------------------------------------------------------------------
// Engine equivalence.

#[derive(Debug, Clone)]
pub enum Verdict {
    Value(Term),
    Stuck(String),
    OutOfFuel,
}

impl Verdict {
    fn kind(&self) -> u8 {
        match self {
            Verdict::Value(_) => 0,
            Verdict::Stuck(_) => 1,
            Verdict::OutOfFuel => 2,
        }
    }
}

fn from_outcome(o: Outcome) -> Verdict {
    match o {
        Outcome::Value { answer, .. } => Verdict::Value(answer),
        Outcome::Stuck { reason, .. } => Verdict::Stuck(reason.to_string()),
        Outcome::OutOfFuel { .. } => Verdict::OutOfFuel,
    }
}

pub fn oracle_verdict(t: &Term, fuel: u64) -> Verdict {
    if t.contains_letrec() {
        from_outcome(evaluate_letrec(t, fuel))
    } else {
        from_outcome(evaluate_sr(t, fuel))
    }
}

pub fn machine_verdict(t: &Term, fuel: u64) -> Verdict {
    if t.contains_letrec() {
        let r = needle_core::letrec_machine::lrun(linject(t).unwrap(), fuel);
        match r.outcome {
            LRunOutcome::Final(c) => Verdict::Value(lunload(&c)),
            LRunOutcome::Stuck(_, e) => Verdict::Stuck(e.to_string()),
            LRunOutcome::OutOfFuel(_) => Verdict::OutOfFuel,
        }
    } else {
        let r = needle_core::machine::run(inject(t).unwrap(), fuel);
        match r.outcome {
            RunOutcome::Final(c) => Verdict::Value(unload(&c)),
            RunOutcome::Stuck(_, e) => Verdict::Stuck(e.to_string()),
            RunOutcome::OutOfFuel(_) => Verdict::OutOfFuel,
        }
    }
}

/// Fuel multiplier for the retry of an engine that ran out of fuel while
/// the other finished: the engines count steps of different granularity.
pub const RETRY: u64 = 20;

/// Machine against oracle; `None` on agreement.
pub fn machine_vs_oracle(t: &Term, fuel: u64) -> Option<String> {
    let mut o = oracle_verdict(t, fuel);
    let mut m = machine_verdict(t, fuel);
    if o.kind() != m.kind() {
        if matches!(o, Verdict::OutOfFuel) {
            o = oracle_verdict(t, fuel * RETRY);
        }
        if matches!(m, Verdict::OutOfFuel) {
            m = machine_verdict(t, fuel * RETRY);
        }
    }
    let eq = if t.contains_letrec() { alpha_equal_up_to_binding_order } else { alpha_equal };
    match (&o, &m) {
        (Verdict::Value(a), Verdict::Value(b)) if eq(a, b) => None,
        (Verdict::Stuck(_), Verdict::Stuck(_)) | (Verdict::OutOfFuel, Verdict::OutOfFuel) => None,
        _ => Some(format!("{t}: oracle {o:?} vs machine {m:?}")),
    }
}

/// The value of a machine answer, with its bindings stripped.
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

fn machine_ground(t: &Term, fuel: u64) -> Option<i64> {
    match machine_verdict(t, fuel) {
        Verdict::Value(a) => match answer_value(&a) {
            Term::IntConst(k) => Some(*k),
            _ => None,
        },
        _ => None,
    }
}

fn sim(t: &Term, fuel: u64) -> SimOutcome {
    simulate(t, fuel).expect("letrec-free").outcome
}

/// Simulation against machine on a letrec-free term. Integers compare by
/// value; pairs through their components and abstractions through an
/// application to `1`, wherever those yield integers.
/// A machine that runs out of fuel is matched against a simulation with
/// the same fuel; otherwise the simulation gets [`RETRY`] times as much.
/// Returns `None` on agreement and whether a ground value was compared.
pub fn simulate_vs_machine(t: &Term, fuel: u64) -> (Option<String>, bool) {
    let m = machine_verdict(t, fuel);
    let s = sim(t, if matches!(m, Verdict::OutOfFuel) { fuel } else { fuel * RETRY });
    let bad = |why: &str| Some(format!("{t}: {why}: machine {m:?} vs simulate {s:?}"));
    match (&m, &s) {
        (Verdict::Value(a), SimOutcome::Value(v)) => match (answer_value(a), v) {
            (Term::IntConst(k), SimValue::Int(j)) if k == j => (None, true),
            (Term::Lam(..), SimValue::Closure(_)) | (Term::PairVal(..), SimValue::Pair(..)) => {
                // Observe through an application or the two projections.
                let parts = if matches!(v, SimValue::Closure(_)) {
                    vec![Term::app(t.clone(), Term::IntConst(1))]
                } else {
                    vec![Term::car(t.clone()), Term::cdr(t.clone())]
                };
                let mut ground = false;
                for part in parts {
                    if let Some(k) = machine_ground(&part, fuel) {
                        ground = true;
                        match sim(&part, fuel * RETRY) {
                            SimOutcome::Value(SimValue::Int(j)) if j == k => {}
                            other => return (bad(&format!("component {part}: {other:?}")), true),
                        }
                    }
                }
                (None, ground)
            }
            _ => (bad("values differ"), true),
        },
        (Verdict::Stuck(_), SimOutcome::Error(_)) => (None, false),
        (Verdict::OutOfFuel, SimOutcome::OutOfFuel) => (None, false),
        _ => (bad("outcomes differ"), false),
    }
}

// ---------------------------------------------------------------------------
// Shared programs.

/// The prompt example: `let p = newPrompt in 2 + pushPrompt p (if
/// (withSubCont p (λk. (pushSubCont k False) + (pushSubCont k True))) then 3
/// else 4)`.
pub fn prompt_example() -> Tm {
    let (p, k) = (n("p"), n("k"));
    let body = prim(COp::Add, push_sub_cont(var(&k), bool(false)), push_sub_cont(var(&k), bool(true)));
    let test = with_sub_cont(var(&p), lam(&k, body));
    let_(&p, new_prompt(), prim(COp::Add, int(2), push_prompt(var(&p), if_(test, int(3), int(4)))))
}

/// `letrec x1 = x2, ..., xk = x1 in x1`
pub fn cycle(k: usize) -> Term {
    let names: Vec<Name> = (1..=k).map(|i| Name::new("c", i as u32).unwrap()).collect();
    let bs = (0..k).map(|i| (names[i].clone(), Term::Var(names[(i + 1) % k].clone()))).collect();
    Term::letrec(bs, Term::Var(names[0].clone()))
}

/// The reference path corresponding to an oracle context.
pub fn oracle_path(ctx: &needle_core::oracle::CtxPath) -> Option<Vec<Dir>> {
    use needle_core::oracle::CtxStep;
    let mut out = Vec::new();
    for step in &ctx.0 {
        match step {
            CtxStep::AppLeft(_) => out.push(Dir::L),
            CtxStep::OperandOf { .. } => out.push(Dir::R),
            CtxStep::UnderBinder { .. } => out.extend([Dir::L, Dir::B]),
            _ => return None,
        }
    }
    Some(out)
}
