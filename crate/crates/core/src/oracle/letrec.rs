use std::collections::BTreeMap;

use crate::syntax::{fresh, free_vars, rename_all, subst, Name, NameSet, Prim, Term};

use super::core::{focus, pair_names};
use super::{run_steps, CtxPath, CtxStep, Decomposition, OracleError, Outcome, Step, StuckReason};

/// Redex shapes of the letrec calculus.
#[derive(Debug, Clone)]
enum Kind {
    /// `(\x.t1) t2 -> letrec x = t2 in t1`
    Beta,
    /// `letrec D, x = v in E[x] -> letrec D, x = v in E[v]`
    DerefBody { var: usize, evidence: CtxPath },
    /// The last link of a dependency chain receives its value.
    DerefChain { value: usize, link: usize, evidence: CtxPath },
    /// `(letrec D in a) t -> letrec D in a t`
    LiftApp,
    /// Merges the bindings of an answer into the enclosing letrec.
    Merge { at: usize },
    Let,
    Cons,
    Delta(Prim),
    Commute,
    Car,
    Cdr,
}

impl Kind {
    fn tag(&self) -> &'static str {
        match self {
            Kind::Beta => "beta",
            Kind::DerefBody { .. } => "deref",
            Kind::DerefChain { .. } => "deref-chain",
            Kind::LiftApp => "lift",
            Kind::Merge { .. } => "merge",
            Kind::Let => "let",
            Kind::Cons => "cons",
            Kind::Delta(_) => "delta",
            Kind::Commute => "commute",
            Kind::Car => "car",
            Kind::Cdr => "cdr",
        }
    }
}

enum Dec {
    Answer,
    Demand(Name, Vec<CtxStep>),
    Redex(Vec<CtxStep>, Kind),
    Stuck(StuckReason),
}

fn path(mut inner_first: Vec<CtxStep>) -> CtxPath {
    inner_first.reverse();
    CtxPath(inner_first)
}

fn wrap(d: Dec, step: CtxStep) -> Dec {
    match d {
        Dec::Demand(x, mut ctx) => {
            ctx.push(step);
            Dec::Demand(x, ctx)
        }
        Dec::Redex(mut ctx, k) => {
            ctx.push(step);
            Dec::Redex(ctx, k)
        }
        other => other,
    }
}

fn root(kind: Kind) -> Dec {
    Dec::Redex(Vec::new(), kind)
}

fn dec(t: &Term) -> Dec {
    match t {
        Term::Var(x) => Dec::Demand(x.clone(), Vec::new()),
        Term::Lam(..) | Term::IntConst(_) | Term::PairVal(..) => Dec::Answer,
        Term::Let(..) => root(Kind::Let),
        Term::Cons(..) => root(Kind::Cons),
        Term::App(f, arg) => match dec(f) {
            Dec::Answer => match &**f {
                Term::Lam(..) => root(Kind::Beta),
                Term::Letrec(..) => root(Kind::LiftApp),
                v => Dec::Stuck(StuckReason::NotAFunction(v.clone())),
            },
            d => wrap(d, CtxStep::AppLeft((**arg).clone())),
        },
        Term::PrimApp(p, arg) => match dec(arg) {
            Dec::Answer if arg.is_value() => root(Kind::Delta(*p)),
            Dec::Answer => root(Kind::Commute),
            d => wrap(d, CtxStep::PrimArg(*p)),
        },
        Term::Car(arg) | Term::Cdr(arg) => {
            let car = matches!(t, Term::Car(_));
            match dec(arg) {
                Dec::Answer => match &**arg {
                    Term::PairVal(..) => root(if car { Kind::Car } else { Kind::Cdr }),
                    Term::Letrec(..) => root(Kind::Commute),
                    v => Dec::Stuck(StuckReason::NotAPair(v.clone())),
                },
                d => wrap(d, if car { CtxStep::CarArg } else { CtxStep::CdrArg }),
            }
        }
        Term::Letrec(bs, body) => dec_letrec(bs, body),
    }
}

fn dec_letrec(bs: &[(Name, Term)], body: &Term) -> Dec {
    let index = |x: &Name| bs.iter().position(|(y, _)| y == x);
    let (x, body_ctx) = match dec(body) {
        Dec::Demand(x, ctx) if index(&x).is_some() => (x, ctx),
        d => return wrap(d, CtxStep::InLetrecBody { bindings: bs.to_vec() }),
    };
    // Follow the dependency chain x, x1, ..., xn through the bindings.
    let mut chain = vec![x];
    let mut link_ctx: Option<Vec<CtxStep>> = None;
    loop {
        let cur = chain.last().expect("chain is nonempty").clone();
        let i = index(&cur).expect("chain variables are bound here");
        let rhs = &bs[i].1;
        match dec(rhs) {
            Dec::Answer => {
                if !rhs.is_value() {
                    return root(Kind::Merge { at: i });
                }
                return match link_ctx {
                    None => root(Kind::DerefBody { var: i, evidence: path(body_ctx) }),
                    Some(ctx) => {
                        let prev = &chain[chain.len() - 2];
                        root(Kind::DerefChain {
                            value: i,
                            link: index(prev).expect("bound"),
                            evidence: path(ctx),
                        })
                    }
                };
            }
            Dec::Demand(y, ctx) if index(&y).is_some() => {
                if let Some(start) = chain.iter().position(|c| *c == y) {
                    let mut cycle = chain[start..].to_vec();
                    cycle.push(y);
                    return Dec::Stuck(StuckReason::BlackHole(cycle));
                }
                chain.push(y);
                link_ctx = Some(ctx);
            }
            d => {
                let mut bindings = bs.to_vec();
                bindings[i].1 = Term::Var(super::hole_name());
                let body = Box::new(body.clone());
                let step = if chain.len() == 1 {
                    CtxStep::InLetrecBinding { bindings, hole: i, body }
                } else {
                    CtxStep::InDepChain { chain: chain.clone(), bindings, hole: i, body }
                };
                return wrap(d, step);
            }
        }
    }
}

/// Decomposition under the letrec calculus.
pub fn decompose_letrec(term: &Term) -> Decomposition {
    match dec(term) {
        Dec::Answer => Decomposition::IsAnswer(term.clone()),
        Dec::Demand(x, _) => Decomposition::Stuck(StuckReason::FreeVariable(x)),
        Dec::Stuck(r) => Decomposition::Stuck(r),
        Dec::Redex(ctx, _) => {
            let ctx = path(ctx);
            let redex = focus(term, &ctx).clone();
            Decomposition::Redex { ctx, redex }
        }
    }
}

/// Contracts a redex of the letrec calculus.
pub fn contract_letrec(redex: &Term) -> Result<Term, OracleError> {
    match dec(redex) {
        Dec::Redex(ctx, kind) if ctx.is_empty() => apply(redex, &kind),
        _ => Err(OracleError::NotARedex(redex.clone())),
    }
}

/// Renames the given binders of a letrec so they avoid `clash`, picking
/// names fresh for everything in `whole`.
fn freshen_bindings(
    bs: &[(Name, Term)],
    body: &Term,
    clash: &NameSet,
    whole: &Term,
) -> (Vec<(Name, Term)>, Term) {
    let mut avoid = whole.all_names();
    let mut map = BTreeMap::new();
    for (x, _) in bs {
        if clash.contains(x) {
            let x2 = fresh(x, &avoid);
            avoid.insert(x2.clone());
            map.insert(x.clone(), x2);
        }
    }
    if map.is_empty() {
        return (bs.to_vec(), body.clone());
    }
    let bs2 = bs
        .iter()
        .map(|(x, t)| (map.get(x).cloned().unwrap_or_else(|| x.clone()), rename_all(t, &map)))
        .collect();
    (bs2, rename_all(body, &map))
}

fn apply(r: &Term, kind: &Kind) -> Result<Term, OracleError> {
    let bad = || OracleError::NotARedex(r.clone());
    Ok(match (kind, r) {
        (Kind::Beta, Term::App(f, t2)) => {
            let Term::Lam(x, t1) = &**f else { return Err(bad()) };
            let (x2, t1) = if free_vars(t2).contains(x) {
                let x2 = fresh(x, &r.all_names());
                let t1 = subst(t1, x, &Term::Var(x2.clone()));
                (x2, t1)
            } else {
                (x.clone(), (**t1).clone())
            };
            Term::letrec(vec![(x2, (**t2).clone())], t1)
        }
        (Kind::Let, Term::Let(x, t2, t1)) => {
            let (x2, t1) = if free_vars(t2).contains(x) {
                let x2 = fresh(x, &r.all_names());
                let t1 = subst(t1, x, &Term::Var(x2.clone()));
                (x2, t1)
            } else {
                (x.clone(), (**t1).clone())
            };
            Term::letrec(vec![(x2, (**t2).clone())], t1)
        }
        (Kind::DerefBody { var, evidence }, Term::Letrec(bs, _)) => {
            Term::letrec(bs.clone(), evidence.plug_hygienic(&bs[*var].1))
        }
        (Kind::DerefChain { value, link, evidence }, Term::Letrec(bs, body)) => {
            let mut bs2 = bs.clone();
            bs2[*link].1 = evidence.plug_hygienic(&bs[*value].1);
            Term::Letrec(bs2, body.clone())
        }
        (Kind::LiftApp, Term::App(f, t)) => {
            let Term::Letrec(bs, a) = &**f else { return Err(bad()) };
            let (bs, a) = freshen_bindings(bs, a, &free_vars(t), r);
            Term::letrec(bs, Term::app(a, (**t).clone()))
        }
        (Kind::Merge { at }, Term::Letrec(bs, body)) => {
            let Term::Letrec(inner, a) = &bs[*at].1 else { return Err(bad()) };
            let mut clash: NameSet = bs.iter().map(|(x, _)| x.clone()).collect();
            clash.extend(free_vars(r));
            let (inner, a) = freshen_bindings(inner, a, &clash, r);
            let mut merged = Vec::with_capacity(bs.len() + inner.len());
            merged.extend_from_slice(&bs[..*at]);
            merged.extend(inner);
            merged.push((bs[*at].0.clone(), a));
            merged.extend_from_slice(&bs[*at + 1..]);
            Term::Letrec(merged, body.clone())
        }
        (Kind::Cons, Term::Cons(t1, t2)) => {
            let (x1, x2) = pair_names(r);
            let inner = Term::letrec(vec![(x2.clone(), (**t2).clone())], Term::PairVal(x1.clone(), x2));
            Term::letrec(vec![(x1, (**t1).clone())], inner)
        }
        (Kind::Delta(p), Term::PrimApp(_, v)) => p
            .delta(v)
            .ok_or_else(|| OracleError::DeltaUndefined { prim: *p, arg: (**v).clone() })?,
        (Kind::Commute, Term::PrimApp(p, arg)) => {
            let Term::Letrec(bs, a) = &**arg else { return Err(bad()) };
            Term::Letrec(bs.clone(), Box::new(Term::prim(*p, (**a).clone())))
        }
        (Kind::Commute, Term::Car(arg)) | (Kind::Commute, Term::Cdr(arg)) => {
            let Term::Letrec(bs, a) = &**arg else { return Err(bad()) };
            let inner = if matches!(r, Term::Car(_)) {
                Term::car((**a).clone())
            } else {
                Term::cdr((**a).clone())
            };
            Term::Letrec(bs.clone(), Box::new(inner))
        }
        (Kind::Car, Term::Car(p)) | (Kind::Cdr, Term::Cdr(p)) => {
            let Term::PairVal(a, b) = &**p else { return Err(bad()) };
            Term::Var(if matches!(kind, Kind::Car) { a.clone() } else { b.clone() })
        }
        _ => return Err(bad()),
    })
}

/// One standard-order step of the letrec calculus.
pub fn step_letrec(term: &Term) -> Step {
    match dec(term) {
        Dec::Answer => Step::AlreadyAnswer,
        Dec::Demand(x, _) => Step::Stuck(StuckReason::FreeVariable(x)),
        Dec::Stuck(r) => Step::Stuck(r),
        Dec::Redex(ctx, kind) => {
            let ctx = path(ctx);
            match apply(focus(term, &ctx), &kind) {
                Ok(c) => Step::Stepped { term: ctx.plug(c), rule: kind.tag() },
                Err(e) => Step::Stuck(e.into()),
            }
        }
    }
}

pub fn evaluate_letrec(term: &Term, fuel: u64) -> Outcome {
    run_steps(term.clone(), fuel, step_letrec)
}
