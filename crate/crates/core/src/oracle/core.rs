use crate::syntax::{fresh, free_vars, subst, Name, Prim, Term};

use super::{hole_name, run_steps, CtxPath, CtxStep, Decomposition, OracleError, Outcome, Step, StuckReason};

/// Redex shapes of the core calculus, with what contraction needs to know.
#[derive(Debug, Clone)]
enum Kind {
    /// `(\x.E[x]) v`
    Deref(CtxPath),
    /// `(\x1.E[x1]) ((\x2.a) t)`
    Assoc,
    /// `(\x.a) t1 t2`
    Lift,
    Let,
    Delta(Prim),
    PrimCommute(Prim),
    Cons,
    Car,
    Cdr,
    CarCommute,
    CdrCommute,
}

impl Kind {
    fn tag(&self) -> &'static str {
        match self {
            Kind::Deref(_) => "deref",
            Kind::Assoc => "assoc",
            Kind::Lift => "lift",
            Kind::Let => "let",
            Kind::Delta(_) => "delta",
            Kind::PrimCommute(_) => "prim-commute",
            Kind::Cons => "cons",
            Kind::Car => "car",
            Kind::Cdr => "cdr",
            Kind::CarCommute => "car-commute",
            Kind::CdrCommute => "cdr-commute",
        }
    }
}

/// Result of decomposing a subterm. Context steps are innermost first.
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

fn is_answer_app(t: &Term) -> bool {
    matches!(t, Term::App(f, _) if matches!(**f, Term::Lam(..)))
}

fn dec(t: &Term) -> Dec {
    match t {
        Term::Var(x) => Dec::Demand(x.clone(), Vec::new()),
        Term::Lam(..) | Term::IntConst(_) | Term::PairVal(..) => Dec::Answer,
        Term::Let(..) => Dec::Redex(Vec::new(), Kind::Let),
        Term::Cons(..) => Dec::Redex(Vec::new(), Kind::Cons),
        Term::Letrec(..) => Dec::Stuck(StuckReason::LetrecUnsupported),
        Term::App(f, arg) => {
            if let Term::Lam(x, body) = &**f {
                return dec_binder(x, body, arg);
            }
            match dec(f) {
                Dec::Answer if is_answer_app(f) => Dec::Redex(Vec::new(), Kind::Lift),
                Dec::Answer => Dec::Stuck(StuckReason::NotAFunction((**f).clone())),
                d => wrap(d, CtxStep::AppLeft((**arg).clone())),
            }
        }
        Term::PrimApp(p, arg) => match dec(arg) {
            Dec::Answer if arg.is_value() => Dec::Redex(Vec::new(), Kind::Delta(*p)),
            Dec::Answer => Dec::Redex(Vec::new(), Kind::PrimCommute(*p)),
            d => wrap(d, CtxStep::PrimArg(*p)),
        },
        Term::Car(arg) | Term::Cdr(arg) => {
            let car = matches!(t, Term::Car(_));
            match dec(arg) {
                Dec::Answer => match &**arg {
                    Term::PairVal(..) => Dec::Redex(Vec::new(), if car { Kind::Car } else { Kind::Cdr }),
                    v if v.is_value() => Dec::Stuck(StuckReason::NotAPair(v.clone())),
                    _ => Dec::Redex(
                        Vec::new(),
                        if car { Kind::CarCommute } else { Kind::CdrCommute },
                    ),
                },
                d => wrap(d, if car { CtxStep::CarArg } else { CtxStep::CdrArg }),
            }
        }
    }
}

/// `(\x.body) operand`: either `(\x.E) t`, `(\x.E[x]) E'`, a deref or
/// assoc redex, or an answer.
fn dec_binder(x: &Name, body: &Term, operand: &Term) -> Dec {
    match dec(body) {
        Dec::Answer => Dec::Answer,
        Dec::Demand(y, ctx) if y == *x => {
            let evidence = path(ctx);
            match dec(operand) {
                Dec::Answer if operand.is_value() => Dec::Redex(Vec::new(), Kind::Deref(evidence)),
                Dec::Answer => Dec::Redex(Vec::new(), Kind::Assoc),
                d => wrap(d, CtxStep::OperandOf { binder: x.clone(), body: evidence }),
            }
        }
        d => wrap(d, CtxStep::UnderBinder { binder: x.clone(), operand: operand.clone() }),
    }
}

/// Splits a closed core term into its unique evaluation context and redex,
/// or reports that it is an answer.
pub fn decompose(term: &Term) -> Decomposition {
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

/// The subterm at the hole of `ctx`, which must be a context of `term`.
pub(super) fn focus<'a>(term: &'a Term, ctx: &CtxPath) -> &'a Term {
    let mut t = term;
    for step in &ctx.0 {
        t = match (step, t) {
            (CtxStep::AppLeft(_), Term::App(f, _)) => f,
            (CtxStep::OperandOf { .. }, Term::App(_, a)) => a,
            (CtxStep::UnderBinder { .. }, Term::App(f, _)) => match &**f {
                Term::Lam(_, b) => b,
                _ => unreachable!("context does not match term"),
            },
            (CtxStep::PrimArg(_), Term::PrimApp(_, a))
            | (CtxStep::CarArg, Term::Car(a))
            | (CtxStep::CdrArg, Term::Cdr(a)) => a,
            (CtxStep::InLetrecBody { .. }, Term::Letrec(_, b)) => b,
            (CtxStep::InLetrecBinding { hole, .. }, Term::Letrec(bs, _))
            | (CtxStep::InDepChain { hole, .. }, Term::Letrec(bs, _)) => &bs[*hole].1,
            _ => unreachable!("context does not match term"),
        };
    }
    t
}

/// Contracts a redex of the core calculus.
pub fn contract(redex: &Term) -> Result<Term, OracleError> {
    match dec(redex) {
        Dec::Redex(ctx, kind) if ctx.is_empty() => apply(redex, &kind),
        _ => Err(OracleError::NotARedex(redex.clone())),
    }
}

fn rename_if(x: &Name, clash: bool, whole: &Term) -> Name {
    if clash {
        fresh(x, &whole.all_names())
    } else {
        x.clone()
    }
}

fn apply(r: &Term, kind: &Kind) -> Result<Term, OracleError> {
    let bad = || OracleError::NotARedex(r.clone());
    Ok(match (kind, r) {
        (Kind::Deref(evidence), Term::App(f, v)) => {
            let Term::Lam(x, _) = &**f else { return Err(bad()) };
            if free_vars(v).contains(x) {
                // `v` mentions an outer `x`; the binder must not capture it.
                let xn = fresh(x, &r.all_names());
                let hole = hole_name();
                let body = evidence.plug(Term::Var(hole.clone()));
                let body = subst(&subst(&body, x, &Term::Var(xn.clone())), &hole, v);
                return Ok(Term::app(Term::lam(xn, body), (**v).clone()));
            }
            Term::app(Term::lam(x.clone(), evidence.plug_hygienic(v)), (**v).clone())
        }
        (Kind::Assoc, Term::App(f, arg)) => {
            let (Term::Lam(x1, body), Term::App(inner, t1)) = (&**f, &**arg) else { return Err(bad()) };
            let Term::Lam(x2, a) = &**inner else { return Err(bad()) };
            let x2n = rename_if(x2, free_vars(f).contains(x2), r);
            let a = subst(a, x2, &Term::Var(x2n.clone()));
            let outer = Term::app(Term::lam(x1.clone(), (**body).clone()), a);
            Term::app(Term::lam(x2n, outer), (**t1).clone())
        }
        (Kind::Lift, Term::App(f, t2)) => {
            let Term::App(lam, t1) = &**f else { return Err(bad()) };
            let Term::Lam(x, a) = &**lam else { return Err(bad()) };
            let xn = rename_if(x, free_vars(t2).contains(x), r);
            let a = subst(a, x, &Term::Var(xn.clone()));
            Term::app(Term::lam(xn, Term::app(a, (**t2).clone())), (**t1).clone())
        }
        (Kind::Let, Term::Let(x, rhs, body)) => {
            Term::app(Term::lam(x.clone(), (**body).clone()), (**rhs).clone())
        }
        (Kind::Delta(p), Term::PrimApp(_, v)) => p
            .delta(v)
            .ok_or_else(|| OracleError::DeltaUndefined { prim: *p, arg: (**v).clone() })?,
        (Kind::PrimCommute(p), Term::PrimApp(_, arg)) => {
            let (x, a, t) = answer_parts(arg).ok_or_else(bad)?;
            Term::app(Term::lam(x.clone(), Term::prim(*p, a.clone())), t.clone())
        }
        (Kind::Cons, Term::Cons(t1, t2)) => {
            let (x1, x2) = pair_names(r);
            let inner = Term::app(Term::lam(x2.clone(), Term::PairVal(x1.clone(), x2)), (**t2).clone());
            Term::app(Term::lam(x1, inner), (**t1).clone())
        }
        (Kind::Car, Term::Car(p)) | (Kind::Cdr, Term::Cdr(p)) => {
            let Term::PairVal(a, b) = &**p else { return Err(bad()) };
            Term::Var(if matches!(kind, Kind::Car) { a.clone() } else { b.clone() })
        }
        (Kind::CarCommute, Term::Car(arg)) | (Kind::CdrCommute, Term::Cdr(arg)) => {
            let (x, a, t) = answer_parts(arg).ok_or_else(bad)?;
            let body = if matches!(kind, Kind::CarCommute) {
                Term::car(a.clone())
            } else {
                Term::cdr(a.clone())
            };
            Term::app(Term::lam(x.clone(), body), t.clone())
        }
        _ => return Err(bad()),
    })
}

fn answer_parts(t: &Term) -> Option<(&Name, &Term, &Term)> {
    let Term::App(f, t) = t else { return None };
    let Term::Lam(x, a) = &**f else { return None };
    Some((x, a, t))
}

/// Binder names for a cons contraction, fresh for everything in `r`.
pub(super) fn pair_names(r: &Term) -> (Name, Name) {
    let mut avoid = r.all_names();
    let x1 = fresh(&Name::new("x", 1).expect("valid base"), &avoid);
    avoid.insert(x1.clone());
    let x2 = fresh(&Name::new("x", 2).expect("valid base"), &avoid);
    (x1, x2)
}

/// One standard-order step `E[r] -> E[r']`.
pub fn step_sr(term: &Term) -> Step {
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

/// Iterates [`step_sr`] for at most `fuel` contractions.
pub fn evaluate_sr(term: &Term, fuel: u64) -> Outcome {
    run_steps(term.clone(), fuel, step_sr)
}
