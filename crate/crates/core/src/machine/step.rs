use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{free_vars, fresh, subst, Name, Term};

use super::{Answer, Configuration, Context, Frame, MRedex, MachineError, Mode};

/// Transition labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    F1,
    F2,
    F3,
    FLet,
    FPrim,
    FCons,
    FCar,
    FCdr,
    B1,
    B2,
    B3,
    BPrim,
    BCar,
    BCdr,
    N1,
    D1,
    D2,
    Let,
    Prim,
    Cons,
    Car,
    Cdr,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::F1 => "F.1",
            Rule::F2 => "F.2",
            Rule::F3 => "F.3",
            Rule::FLet => "F.LET",
            Rule::FPrim => "F.PRIM",
            Rule::FCons => "F.CONS",
            Rule::FCar => "F.CAR",
            Rule::FCdr => "F.CDR",
            Rule::B1 => "B.1",
            Rule::B2 => "B.2",
            Rule::B3 => "B.3",
            Rule::BPrim => "B.PRIM",
            Rule::BCar => "B.CAR",
            Rule::BCdr => "B.CDR",
            Rule::N1 => "N.1",
            Rule::D1 => "D.1",
            Rule::D2 => "D.2",
            Rule::Let => "LET",
            Rule::Prim => "PRIM",
            Rule::Cons => "CONS",
            Rule::Car => "CAR",
            Rule::Cdr => "CDR",
        }
    }

    /// Rules that contract a redex, as opposed to searching for one.
    pub fn is_reduction(self) -> bool {
        matches!(
            self,
            Rule::D1 | Rule::D2 | Rule::Let | Rule::Prim | Rule::Cons | Rule::Car | Rule::Cdr
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// `⟨∅ | [], t⟩_f`
pub fn inject(term: &Term) -> Result<Configuration, MachineError> {
    if let Some(x) = free_vars(term).into_iter().next() {
        return Err(MachineError::OpenTerm(x));
    }
    Ok(Configuration::new(Vec::new(), Mode::Refocus(Context::new(), term.clone())))
}

/// Picks `x` itself unless it is already active.
fn rename_for(c: &mut Configuration, x: &Name, renamed: &mut bool) -> Name {
    let x2 = if c.name_set().contains(x) {
        *renamed = true;
        fresh(x, c.name_set())
    } else {
        x.clone()
    };
    c.add_name(x2.clone());
    x2
}

fn rename_in(t: &Term, x: &Name, x2: &Name) -> Term {
    if x == x2 {
        t.clone()
    } else {
        subst(t, x, &Term::Var(x2.clone()))
    }
}

/// One transition.
pub fn step(c: Configuration) -> Result<(Configuration, Rule), MachineError> {
    transition(c).map(|(c, rule, _)| (c, rule))
}

/// A transition, also reporting whether a binder had to be renamed.
fn transition(mut c: Configuration) -> Result<(Configuration, Rule, bool), MachineError> {
    let mut renamed = false;
    let mode = std::mem::replace(&mut c.mode, Mode::Need(Context::new(), Name::reserved("moved")));
    let (mode, rule) = match mode {
        Mode::Final(_) => return Err(MachineError::AlreadyFinal),
        Mode::Refocus(mut e, t) => match t {
            Term::Var(x) => (Mode::Need(e, x), Rule::F1),
            Term::Lam(..) | Term::IntConst(_) | Term::PairVal(..) => (Mode::Rebuild(e, t), Rule::F2),
            Term::App(t1, t2) => {
                e.push(Frame::Operand(*t2));
                (Mode::Refocus(e, *t1), Rule::F3)
            }
            Term::Let(x, rhs, body) => (
                Mode::Reduce(e, MRedex::LetRedex { x, rhs: *rhs, body: *body }),
                Rule::FLet,
            ),
            Term::PrimApp(p, arg) => {
                e.push(Frame::Prim(p));
                (Mode::Refocus(e, *arg), Rule::FPrim)
            }
            Term::Cons(t1, t2) => (Mode::Reduce(e, MRedex::ConsRedex(*t1, *t2)), Rule::FCons),
            Term::Car(arg) => {
                e.push(Frame::Car);
                (Mode::Refocus(e, *arg), Rule::FCar)
            }
            Term::Cdr(arg) => {
                e.push(Frame::Cdr);
                (Mode::Refocus(e, *arg), Rule::FCdr)
            }
            Term::Letrec(..) => return Err(MachineError::LetrecUnsupported),
        },
        Mode::Rebuild(e, v) => {
            let (mut e1, eb) = e.split_binders();
            let answer = Answer { binders: eb, value: v };
            match e1.0.pop() {
                None => (Mode::Final(answer), Rule::B1),
                Some(Frame::Operand(t)) => {
                    (Mode::Reduce(e1, MRedex::AnswerApply { fun: answer, arg: t }), Rule::B2)
                }
                Some(Frame::Cont(x, inner)) => {
                    (Mode::Reduce(e1, MRedex::ContApply { x, inner, arg: answer }), Rule::B3)
                }
                Some(Frame::Prim(prim)) => {
                    (Mode::Reduce(e1, MRedex::PrimRedex { prim, arg: answer }), Rule::BPrim)
                }
                Some(Frame::Car) => (Mode::Reduce(e1, MRedex::CarRedex(answer)), Rule::BCar),
                Some(Frame::Cdr) => (Mode::Reduce(e1, MRedex::CdrRedex(answer)), Rule::BCdr),
                Some(Frame::Binder(..)) => unreachable!("binder suffix was split off"),
            }
        }
        Mode::Need(mut e, x) => {
            let i = e
                .0
                .iter()
                .rposition(|f| matches!(f, Frame::Binder(y, _) if *y == x))
                .ok_or_else(|| MachineError::StuckNeed(x.clone()))?;
            let e2 = Context(e.0.split_off(i + 1));
            let Some(Frame::Binder(_, t)) = e.0.pop() else { unreachable!() };
            e.push(Frame::Cont(x, e2));
            (Mode::Refocus(e, t), Rule::N1)
        }
        Mode::Reduce(e1, r) => reduce(&mut c, e1, r, &mut renamed)?,
    };
    c.mode = mode;
    Ok((c, rule, renamed))
}

fn reduce(
    c: &mut Configuration,
    mut e1: Context,
    r: MRedex,
    renamed: &mut bool,
) -> Result<(Mode, Rule), MachineError> {
    Ok(match r {
        MRedex::ContApply { x, inner, arg } => {
            let Answer { binders, value } = arg;
            let mut e = e1.compose(binders);
            e.push(Frame::Binder(x, value.clone()));
            (Mode::Rebuild(e.compose(inner), value), Rule::D1)
        }
        MRedex::AnswerApply { fun, arg } => {
            let Answer { binders, value } = fun;
            let Term::Lam(x, t1) = value else {
                return Err(MachineError::NotAFunction(value));
            };
            let x2 = rename_for(c, &x, renamed);
            let mut e = e1.compose(binders);
            e.push(Frame::Binder(x2.clone(), arg));
            (Mode::Refocus(e, rename_in(&t1, &x, &x2)), Rule::D2)
        }
        MRedex::LetRedex { x, rhs, body } => {
            let x2 = rename_for(c, &x, renamed);
            e1.push(Frame::Binder(x2.clone(), rhs));
            (Mode::Refocus(e1, rename_in(&body, &x, &x2)), Rule::Let)
        }
        MRedex::PrimRedex { prim, arg } => {
            let Answer { binders, value } = arg;
            let v = prim
                .delta(&value)
                .ok_or(MachineError::DeltaUndefined { prim, arg: value })?;
            (Mode::Rebuild(e1.compose(binders), v), Rule::Prim)
        }
        MRedex::ConsRedex(t1, t2) => {
            let x1 = fresh(&Name::new("x", 1).expect("valid base"), c.name_set());
            c.add_name(x1.clone());
            let x2 = fresh(&Name::new("x", 2).expect("valid base"), c.name_set());
            c.add_name(x2.clone());
            e1.push(Frame::Binder(x1.clone(), t1));
            e1.push(Frame::Binder(x2.clone(), t2));
            (Mode::Rebuild(e1, Term::PairVal(x1, x2)), Rule::Cons)
        }
        MRedex::CarRedex(arg) => {
            let (e, x1, _) = project(e1, arg)?;
            (Mode::Need(e, x1), Rule::Car)
        }
        MRedex::CdrRedex(arg) => {
            let (e, _, x2) = project(e1, arg)?;
            (Mode::Need(e, x2), Rule::Cdr)
        }
    })
}

fn project(e1: Context, arg: Answer) -> Result<(Context, Name, Name), MachineError> {
    let Answer { binders, value } = arg;
    match value {
        Term::PairVal(a, b) => Ok((e1.compose(binders), a, b)),
        v => Err(MachineError::NotAPair(v)),
    }
}

/// Counters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineStats<R = Rule> {
    pub steps: u64,
    /// PRIM reductions, i.e. applications of δ.
    pub deltas: u64,
    /// Binders renamed because the name was already active.
    pub renames: u64,
    pub max_depth: usize,
    pub rule_counts: BTreeMap<R, u64>,
}

impl<R> Default for MachineStats<R> {
    fn default() -> Self {
        MachineStats { steps: 0, deltas: 0, renames: 0, max_depth: 0, rule_counts: BTreeMap::new() }
    }
}

impl<R: Ord + Copy> MachineStats<R> {
    pub(crate) fn record(&mut self, rule: R, is_delta: bool, renamed: bool, depth: usize) {
        self.steps += 1;
        *self.rule_counts.entry(rule).or_default() += 1;
        if is_delta {
            self.deltas += 1;
        }
        if renamed {
            self.renames += 1;
        }
        self.max_depth = self.max_depth.max(depth);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Final(Configuration),
    OutOfFuel(Configuration),
    Stuck(Configuration, MachineError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcome: RunOutcome,
    pub stats: MachineStats,
}

impl RunResult {
    pub fn steps(&self) -> u64 {
        self.stats.steps
    }
}

/// Runs for at most `fuel` transitions.
pub fn run(c: Configuration, fuel: u64) -> RunResult {
    run_with(c, fuel, |_, _, _| {})
}

/// Like [`run`], calling `observe(before, rule, after)` on every transition.
pub fn run_with(
    mut c: Configuration,
    fuel: u64,
    mut observe: impl FnMut(&Configuration, Rule, &Configuration),
) -> RunResult {
    let mut stats = MachineStats::default();
    loop {
        if c.is_final() {
            return RunResult { outcome: RunOutcome::Final(c), stats };
        }
        if stats.steps == fuel {
            return RunResult { outcome: RunOutcome::OutOfFuel(c), stats };
        }
        let before = c.clone();
        match transition(c) {
            Ok((next, rule, renamed)) => {
                stats.record(rule, rule == Rule::Prim, renamed, mode_depth(&next.mode));
                observe(&before, rule, &next);
                c = next;
            }
            Err(e) => return RunResult { outcome: RunOutcome::Stuck(before, e), stats },
        }
    }
}

fn mode_depth(m: &Mode) -> usize {
    match m {
        Mode::Refocus(e, _) | Mode::Rebuild(e, _) | Mode::Need(e, _) | Mode::Reduce(e, _) => e.depth(),
        Mode::Final(a) => a.binders.depth(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{check_wf, render, unload};
    use crate::syntax::{alpha_equal, parse};

    fn trace(src: &str) -> (Vec<Rule>, RunResult) {
        let mut rules = Vec::new();
        let r = run_with(inject(&parse(src).unwrap()).unwrap(), 1000, |before, rule, after| {
            assert!(check_wf(before).is_ok(), "{}", render(before));
            assert!(check_wf(after).is_ok(), "{rule}: {}", render(after));
            rules.push(rule);
        });
        (rules, r)
    }

    #[test]
    fn identity_applied_to_identity() {
        use Rule::*;
        let (rules, r) = trace(r"(\x.x) \y.y");
        assert_eq!(rules, vec![F3, F2, B2, D2, F1, N1, F2, B3, D1, B1]);
        let RunOutcome::Final(c) = r.outcome else { panic!() };
        assert_eq!(render(&c), r"⟨x | ⟨[(\x.[]) \y.y], \y.y⟩⟩");
        assert!(alpha_equal(&unload(&c), &parse(r"(\x.\y.y) \y.y").unwrap()));
    }

    #[test]
    fn value_finishes_in_two() {
        let (rules, r) = trace(r"\x.x");
        assert_eq!(rules, vec![Rule::F2, Rule::B1]);
        assert_eq!(r.steps(), 2);
    }

    #[test]
    fn let_add1() {
        let (_, r) = trace("let x = add1 0 in x");
        let RunOutcome::Final(c) = r.outcome else { panic!() };
        let Mode::Final(a) = &c.mode else { panic!() };
        assert_eq!(a.value, Term::IntConst(1));
        assert_eq!(r.stats.deltas, 1);
    }

    #[test]
    fn shared_demand_runs_delta_once() {
        let (_, r) = trace(r"let x = add1 0 in (\p.\q.add1 q) x x");
        assert!(matches!(r.outcome, RunOutcome::Final(_)));
        assert_eq!(r.stats.deltas, 2);
        let (_, r) = trace(r"let x = add1 0 in (\p.\q.p) x x");
        assert_eq!(r.stats.deltas, 1);
    }

    #[test]
    fn renames_repeated_binder() {
        let (_, r) = trace(r"(\f.f (f \z.z)) \x.x");
        let RunOutcome::Final(c) = r.outcome else { panic!() };
        assert!(r.stats.renames >= 1);
        let distinct: crate::NameSet = c.names().iter().cloned().collect();
        assert_eq!(distinct.len(), c.names().len());
    }

    #[test]
    fn pairs() {
        let (_, r) = trace("car (cdr (cons 1 (cons 2 3)))");
        let RunOutcome::Final(c) = r.outcome else { panic!() };
        let Mode::Final(a) = &c.mode else { panic!() };
        assert_eq!(a.value, Term::IntConst(2));
    }

    #[test]
    fn stuck_states() {
        let (_, r) = trace("1 2");
        assert!(matches!(r.outcome, RunOutcome::Stuck(_, MachineError::NotAFunction(_))));
        let (_, r) = trace(r"add1 (\x.x)");
        assert!(matches!(r.outcome, RunOutcome::Stuck(_, MachineError::DeltaUndefined { .. })));
        let (_, r) = trace("car 1");
        assert!(matches!(r.outcome, RunOutcome::Stuck(_, MachineError::NotAPair(_))));
        assert!(matches!(inject(&parse("x").unwrap()), Err(MachineError::OpenTerm(_))));
    }

    #[test]
    fn omega_runs_out() {
        let r = run(inject(&parse(r"(\x.x x) \x.x x").unwrap()).unwrap(), 500);
        assert!(matches!(r.outcome, RunOutcome::OutOfFuel(_)));
        assert_eq!(r.steps(), 500);
    }
}
