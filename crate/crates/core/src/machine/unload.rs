use crate::syntax::Term;

use super::{Answer, Configuration, Context, Frame, MRedex, Mode};

/// `⟦E⟧[t]`. Plugging is textual; well-formedness rules out capture.
pub fn unload_context(e: &Context, t: Term) -> Term {
    e.0.iter().rev().fold(t, |inner, f| match f {
        Frame::Operand(t2) => Term::app(inner, t2.clone()),
        Frame::Binder(x, t2) => Term::app(Term::lam(x.clone(), inner), t2.clone()),
        Frame::Cont(x, e1) => Term::app(
            Term::lam(x.clone(), unload_context(e1, Term::Var(x.clone()))),
            inner,
        ),
        Frame::Prim(p) => Term::prim(*p, inner),
        Frame::Car => Term::car(inner),
        Frame::Cdr => Term::cdr(inner),
    })
}

fn unload_answer(a: &Answer) -> Term {
    unload_context(&a.binders, a.value.clone())
}

pub(crate) fn unload_redex(r: &MRedex) -> Term {
    match r {
        MRedex::ContApply { x, inner, arg } => Term::app(
            Term::lam(x.clone(), unload_context(inner, Term::Var(x.clone()))),
            unload_answer(arg),
        ),
        MRedex::AnswerApply { fun, arg } => Term::app(unload_answer(fun), arg.clone()),
        MRedex::LetRedex { x, rhs, body } => Term::let_(x.clone(), rhs.clone(), body.clone()),
        MRedex::PrimRedex { prim, arg } => Term::prim(*prim, unload_answer(arg)),
        MRedex::ConsRedex(a, b) => Term::cons(a.clone(), b.clone()),
        MRedex::CarRedex(a) => Term::car(unload_answer(a)),
        MRedex::CdrRedex(a) => Term::cdr(unload_answer(a)),
    }
}

/// The calculus term a configuration stands for.
pub fn unload(c: &Configuration) -> Term {
    match &c.mode {
        Mode::Refocus(e, t) | Mode::Rebuild(e, t) => unload_context(e, t.clone()),
        Mode::Need(e, x) => unload_context(e, Term::Var(x.clone())),
        Mode::Reduce(e, r) => unload_context(e, unload_redex(r)),
        Mode::Final(a) => unload_answer(a),
    }
}
