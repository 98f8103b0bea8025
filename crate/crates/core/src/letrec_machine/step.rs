use std::collections::BTreeMap;
use std::fmt;

use crate::machine::MachineStats;
use crate::syntax::{free_vars, fresh, rename_all, subst, Name, Term};

use super::{
    flatten, Bindings, LAnswer, LConfiguration, LContext, LFrame, LMachineError, LMode, LRedex, Link,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LRule {
    F1,
    F2,
    F3,
    F4,
    FLet,
    FPrim,
    FCons,
    FCar,
    FCdr,
    B1,
    B2,
    B3,
    B4,
    BPrim,
    BCar,
    BCdr,
    N1,
    N2,
    D1,
    D2,
    D3,
    D4,
    Let,
    Prim,
    Cons,
    Car,
    Cdr,
}

impl LRule {
    pub fn tag(self) -> &'static str {
        match self {
            LRule::F1 => "LF.1",
            LRule::F2 => "LF.2",
            LRule::F3 => "LF.3",
            LRule::F4 => "LF.4",
            LRule::FLet => "LF.LET",
            LRule::FPrim => "LF.PRIM",
            LRule::FCons => "LF.CONS",
            LRule::FCar => "LF.CAR",
            LRule::FCdr => "LF.CDR",
            LRule::B1 => "LB.1",
            LRule::B2 => "LB.2",
            LRule::B3 => "LB.3",
            LRule::B4 => "LB.4",
            LRule::BPrim => "LB.PRIM",
            LRule::BCar => "LB.CAR",
            LRule::BCdr => "LB.CDR",
            LRule::N1 => "LN.1",
            LRule::N2 => "LN.2",
            LRule::D1 => "LD.1",
            LRule::D2 => "LD.2",
            LRule::D3 => "LD.3",
            LRule::D4 => "LD.4",
            LRule::Let => "LLET",
            LRule::Prim => "LPRIM",
            LRule::Cons => "LCONS",
            LRule::Car => "LCAR",
            LRule::Cdr => "LCDR",
        }
    }

    pub fn is_reduction(self) -> bool {
        use LRule::*;
        matches!(self, D1 | D2 | D3 | D4 | Let | Prim | Cons | Car | Cdr)
    }
}

impl fmt::Display for LRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

pub fn linject(term: &Term) -> Result<LConfiguration, LMachineError> {
    if let Some(x) = free_vars(term).into_iter().next() {
        return Err(LMachineError::OpenTerm(x));
    }
    Ok(LConfiguration::new(Vec::new(), LMode::Refocus(LContext::new(), term.clone())))
}

fn rename_for(c: &mut LConfiguration, x: &Name, renamed: &mut bool) -> Name {
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

fn take_binding(bs: &mut Bindings, x: &Name) -> Option<Term> {
    let i = bs.iter().position(|(y, _)| y == x)?;
    Some(bs.remove(i).1)
}

/// `xs` from the first occurrence of `x`, closed by `x` again.
fn cycle_from(xs: &[Name], x: &Name) -> Option<Vec<Name>> {
    let start = xs.iter().position(|y| y == x)?;
    let mut cycle = xs[start..].to_vec();
    cycle.push(x.clone());
    Some(cycle)
}

/// A binding whose right-hand side is itself a variable of the chain being
/// built can never produce a value; report it before refocusing on it.
fn check_cycle(active: &[Name], t: &Term) -> Result<(), LMachineError> {
    match t {
        Term::Var(y) => match cycle_from(active, y) {
            Some(cycle) => Err(LMachineError::BlackHole(cycle)),
            None => Ok(()),
        },
        _ => Ok(()),
    }
}

/// Chain variables oldest first, then the one under evaluation.
fn chain_vars(x: &Name, chain: &[Link]) -> Vec<Name> {
    chain.iter().rev().map(|l| l.var.clone()).chain(std::iter::once(x.clone())).collect()
}

fn need(mut e: LContext, x: Name) -> Result<(LMode, LRule), LMachineError> {
    for i in (0..e.0.len()).rev() {
        match &e.0[i] {
            LFrame::Rec(bs) if bs.iter().any(|(y, _)| *y == x) => {
                let e2 = LContext(e.0.split_off(i + 1));
                let Some(LFrame::Rec(mut rest)) = e.0.pop() else { unreachable!() };
                let t = take_binding(&mut rest, &x).expect("checked above");
                check_cycle(std::slice::from_ref(&x), &t)?;
                e.push(LFrame::Eval { x, rest, body: e2 });
                return Ok((LMode::Refocus(e, t), LRule::N1));
            }
            LFrame::Eval { x: cur, rest, .. } | LFrame::Chain { x: cur, rest, .. } => {
                let chain: &[Link] = match &e.0[i] {
                    LFrame::Chain { chain, .. } => chain,
                    _ => &[],
                };
                let mut active = chain_vars(cur, chain);
                if let Some(cycle) = cycle_from(&active, &x) {
                    return Err(LMachineError::BlackHole(cycle));
                }
                if !rest.iter().any(|(y, _)| *y == x) {
                    continue;
                }
                let en = LContext(e.0.split_off(i + 1));
                let (cur, mut chain, mut rest, body) = match e.0.pop() {
                    Some(LFrame::Eval { x, rest, body }) => (x, Vec::new(), rest, body),
                    Some(LFrame::Chain { x, chain, rest, body }) => (x, chain, rest, body),
                    _ => unreachable!(),
                };
                let t = take_binding(&mut rest, &x).expect("checked above");
                active.push(x.clone());
                check_cycle(&active, &t)?;
                chain.insert(0, Link { var: cur, ctx: en });
                e.push(LFrame::Chain { x, chain, rest, body });
                return Ok((LMode::Refocus(e, t), LRule::N2));
            }
            _ => {}
        }
    }
    Err(LMachineError::StuckNeed(x))
}

pub fn lstep(c: LConfiguration) -> Result<(LConfiguration, LRule), LMachineError> {
    transition(c).map(|(c, r, _)| (c, r))
}

fn transition(mut c: LConfiguration) -> Result<(LConfiguration, LRule, bool), LMachineError> {
    let mut renamed = false;
    let mode = std::mem::replace(&mut c.mode, LMode::Refocus(LContext::new(), Term::IntConst(0)));
    let (mode, rule) = match mode {
        LMode::Final(_) => return Err(LMachineError::AlreadyFinal),
        LMode::Refocus(mut e, t) => match t {
            Term::Var(x) => (LMode::Need(e, x), LRule::F1),
            Term::Lam(..) | Term::IntConst(_) | Term::PairVal(..) => (LMode::Rebuild(e, t), LRule::F2),
            Term::App(t1, t2) => {
                e.push(LFrame::Operand(*t2));
                (LMode::Refocus(e, *t1), LRule::F3)
            }
            Term::Letrec(bs, body) => (LMode::Reduce(e, LRedex::Letrec(bs, *body)), LRule::F4),
            Term::Let(x, rhs, body) => {
                (LMode::Reduce(e, LRedex::Let { x, rhs: *rhs, body: *body }), LRule::FLet)
            }
            Term::PrimApp(p, arg) => {
                e.push(LFrame::Prim(p));
                (LMode::Refocus(e, *arg), LRule::FPrim)
            }
            Term::Cons(a, b) => (LMode::Reduce(e, LRedex::Cons(*a, *b)), LRule::FCons),
            Term::Car(arg) => {
                e.push(LFrame::Car);
                (LMode::Refocus(e, *arg), LRule::FCar)
            }
            Term::Cdr(arg) => {
                e.push(LFrame::Cdr);
                (LMode::Refocus(e, *arg), LRule::FCdr)
            }
        },
        LMode::Rebuild(e, v) => {
            let (mut e1, eb) = e.split_binders();
            let a = LAnswer { binders: eb, value: v };
            match e1.0.pop() {
                None => (LMode::Final(a), LRule::B1),
                Some(LFrame::Operand(t)) => {
                    (LMode::Reduce(e1, LRedex::AnswerApply { fun: a, arg: t }), LRule::B2)
                }
                Some(LFrame::Eval { x, rest, body }) => {
                    (LMode::Reduce(e1, LRedex::Eval { x, arg: a, rest, body }), LRule::B3)
                }
                Some(LFrame::Chain { x, chain, rest, body }) => (
                    LMode::Reduce(e1, LRedex::Chain { x, arg: a, chain, rest, body }),
                    LRule::B4,
                ),
                Some(LFrame::Prim(prim)) => (LMode::Reduce(e1, LRedex::Prim { prim, arg: a }), LRule::BPrim),
                Some(LFrame::Car) => (LMode::Reduce(e1, LRedex::Car(a)), LRule::BCar),
                Some(LFrame::Cdr) => (LMode::Reduce(e1, LRedex::Cdr(a)), LRule::BCdr),
                Some(LFrame::Rec(_)) => unreachable!("binder suffix was split off"),
            }
        }
        LMode::Need(e, x) => need(e, x)?,
        LMode::Reduce(e1, r) => reduce(&mut c, e1, r, &mut renamed)?,
    };
    c.mode = mode;
    Ok((c, rule, renamed))
}

fn settled(x: Name, arg: LAnswer, rest: Bindings) -> Bindings {
    let mut bs = vec![(x, arg.value)];
    bs.extend(flatten(&arg.binders));
    bs.extend(rest);
    bs
}

fn reduce(
    c: &mut LConfiguration,
    mut e1: LContext,
    r: LRedex,
    renamed: &mut bool,
) -> Result<(LMode, LRule), LMachineError> {
    Ok(match r {
        LRedex::Eval { x, arg, rest, body } => {
            let v = arg.value.clone();
            e1.push(LFrame::Rec(settled(x, arg, rest)));
            (LMode::Rebuild(e1.compose(body), v), LRule::D1)
        }
        LRedex::Chain { x, arg, mut chain, rest, body } => {
            let v = arg.value.clone();
            let rest = settled(x, arg, rest);
            let Link { var, ctx } = chain.remove(0);
            e1.push(if chain.is_empty() {
                LFrame::Eval { x: var, rest, body }
            } else {
                LFrame::Chain { x: var, chain, rest, body }
            });
            (LMode::Rebuild(e1.compose(ctx), v), LRule::D2)
        }
        LRedex::AnswerApply { fun, arg } => {
            let LAnswer { binders, value } = fun;
            let Term::Lam(x, t1) = value else {
                return Err(LMachineError::NotAFunction(value));
            };
            let x2 = rename_for(c, &x, renamed);
            let mut e = e1.compose(binders);
            e.push(LFrame::Rec(vec![(x2.clone(), arg)]));
            (LMode::Refocus(e, rename_in(&t1, &x, &x2)), LRule::D3)
        }
        LRedex::Letrec(bs, body) => {
            let (bs, body) = if bs.iter().any(|(x, _)| c.name_set().contains(x)) {
                *renamed = true;
                freshen_all(c, bs, body)
            } else {
                (bs, body)
            };
            for (x, _) in &bs {
                c.add_name(x.clone());
            }
            e1.push(LFrame::Rec(bs));
            (LMode::Refocus(e1, body), LRule::D4)
        }
        LRedex::Let { x, rhs, body } => {
            let x2 = rename_for(c, &x, renamed);
            e1.push(LFrame::Rec(vec![(x2.clone(), rhs)]));
            (LMode::Refocus(e1, rename_in(&body, &x, &x2)), LRule::Let)
        }
        LRedex::Prim { prim, arg } => {
            let LAnswer { binders, value } = arg;
            let v = prim
                .delta(&value)
                .ok_or(LMachineError::DeltaUndefined { prim, arg: value })?;
            (LMode::Rebuild(e1.compose(binders), v), LRule::Prim)
        }
        LRedex::Cons(t1, t2) => {
            let x1 = fresh(&Name::new("x", 1).expect("valid base"), c.name_set());
            c.add_name(x1.clone());
            let x2 = fresh(&Name::new("x", 2).expect("valid base"), c.name_set());
            c.add_name(x2.clone());
            e1.push(LFrame::Rec(vec![(x1.clone(), t1)]));
            e1.push(LFrame::Rec(vec![(x2.clone(), t2)]));
            (LMode::Rebuild(e1, Term::PairVal(x1, x2)), LRule::Cons)
        }
        LRedex::Car(a) => {
            let (e, x1, _) = project(e1, a)?;
            (LMode::Need(e, x1), LRule::Car)
        }
        LRedex::Cdr(a) => {
            let (e, _, x2) = project(e1, a)?;
            (LMode::Need(e, x2), LRule::Cdr)
        }
    })
}

fn project(e1: LContext, a: LAnswer) -> Result<(LContext, Name, Name), LMachineError> {
    match a.value {
        Term::PairVal(x1, x2) => Ok((e1.compose(a.binders), x1, x2)),
        v => Err(LMachineError::NotAPair(v)),
    }
}

/// Renames every binder of the group at once, away from `X` and from every
/// name already in the group.
fn freshen_all(c: &LConfiguration, bs: Bindings, body: Term) -> (Bindings, Term) {
    let mut avoid = c.name_set().clone();
    avoid.extend(Term::letrec(bs.clone(), body.clone()).all_names());
    let mut map = BTreeMap::new();
    for (x, _) in &bs {
        let x2 = fresh(x, &avoid);
        avoid.insert(x2.clone());
        map.insert(x.clone(), x2);
    }
    let bs = bs.into_iter().map(|(x, t)| (map[&x].clone(), rename_all(&t, &map))).collect();
    (bs, rename_all(&body, &map))
}

#[derive(Debug, Clone, PartialEq)]
pub enum LRunOutcome {
    Final(LConfiguration),
    OutOfFuel(LConfiguration),
    Stuck(LConfiguration, LMachineError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LRunResult {
    pub outcome: LRunOutcome,
    pub stats: MachineStats<LRule>,
}

impl LRunResult {
    pub fn steps(&self) -> u64 {
        self.stats.steps
    }
}

pub fn lrun(c: LConfiguration, fuel: u64) -> LRunResult {
    lrun_with(c, fuel, |_, _, _| {})
}

pub fn lrun_with(
    mut c: LConfiguration,
    fuel: u64,
    mut observe: impl FnMut(&LConfiguration, LRule, &LConfiguration),
) -> LRunResult {
    let mut stats = MachineStats::default();
    loop {
        if c.is_final() {
            return LRunResult { outcome: LRunOutcome::Final(c), stats };
        }
        if stats.steps == fuel {
            return LRunResult { outcome: LRunOutcome::OutOfFuel(c), stats };
        }
        let before = c.clone();
        match transition(c) {
            Ok((next, rule, renamed)) => {
                stats.record(rule, rule == LRule::Prim, renamed, mode_depth(&next.mode));
                observe(&before, rule, &next);
                c = next;
            }
            Err(e) => return LRunResult { outcome: LRunOutcome::Stuck(before, e), stats },
        }
    }
}

fn mode_depth(m: &LMode) -> usize {
    match m {
        LMode::Refocus(e, _) | LMode::Rebuild(e, _) | LMode::Need(e, _) | LMode::Reduce(e, _) => e.depth(),
        LMode::Final(a) => a.binders.depth(),
    }
}
