use crate::machine::WfReport;
use crate::syntax::{free_vars, print, print_operand, Name, NameSet, Term};

use super::{Bindings, LAnswer, LConfiguration, LContext, LFrame, LMode, LRedex, Link};

/// The letrec group a binding under evaluation belongs to, with `inner`
/// in the hole.
fn group(x: &Name, inner: Term, chain: &[Link], rest: &Bindings, body: &LContext) -> Term {
    let mut bs = vec![(x.clone(), inner)];
    let mut prev = x.clone();
    for link in chain {
        bs.push((link.var.clone(), lunload_context(&link.ctx, Term::Var(prev))));
        prev = link.var.clone();
    }
    bs.extend(rest.iter().cloned());
    Term::letrec(bs, lunload_context(body, Term::Var(prev)))
}

pub fn lunload_context(e: &LContext, t: Term) -> Term {
    e.0.iter().rev().fold(t, |inner, f| match f {
        LFrame::Operand(t2) => Term::app(inner, t2.clone()),
        LFrame::Rec(bs) => Term::letrec(bs.clone(), inner),
        LFrame::Eval { x, rest, body } => group(x, inner, &[], rest, body),
        LFrame::Chain { x, chain, rest, body } => group(x, inner, chain, rest, body),
        LFrame::Prim(p) => Term::prim(*p, inner),
        LFrame::Car => Term::car(inner),
        LFrame::Cdr => Term::cdr(inner),
    })
}

fn answer_term(a: &LAnswer) -> Term {
    lunload_context(&a.binders, a.value.clone())
}

fn redex_term(r: &LRedex) -> Term {
    match r {
        LRedex::AnswerApply { fun, arg } => Term::app(answer_term(fun), arg.clone()),
        LRedex::Eval { x, arg, rest, body } => group(x, answer_term(arg), &[], rest, body),
        LRedex::Chain { x, arg, chain, rest, body } => group(x, answer_term(arg), chain, rest, body),
        LRedex::Letrec(bs, body) => Term::letrec(bs.clone(), body.clone()),
        LRedex::Let { x, rhs, body } => Term::let_(x.clone(), rhs.clone(), body.clone()),
        LRedex::Prim { prim, arg } => Term::prim(*prim, answer_term(arg)),
        LRedex::Cons(a, b) => Term::cons(a.clone(), b.clone()),
        LRedex::Car(a) => Term::car(answer_term(a)),
        LRedex::Cdr(a) => Term::cdr(answer_term(a)),
    }
}

pub fn lunload(c: &LConfiguration) -> Term {
    match &c.mode {
        LMode::Refocus(e, t) | LMode::Rebuild(e, t) => lunload_context(e, t.clone()),
        LMode::Need(e, x) => lunload_context(e, Term::Var(x.clone())),
        LMode::Reduce(e, r) => lunload_context(e, redex_term(r)),
        LMode::Final(a) => answer_term(a),
    }
}

fn bindings(bs: &Bindings) -> String {
    bs.iter().map(|(x, t)| format!("{x}={}", print(t))).collect::<Vec<_>>().join(", ")
}

fn links(chain: &[Link]) -> String {
    chain
        .iter()
        .map(|l| format!("⟨{},{}⟩", l.var, lrender_context(&l.ctx)))
        .collect::<Vec<_>>()
        .join("::")
}

/// `letr x=<hole>, chain, D in E`
fn group_text(x: &Name, hole: &str, chain: &[Link], rest: &Bindings, body: &LContext) -> String {
    let mut parts = vec![format!("{x}={hole}")];
    if !chain.is_empty() {
        parts.push(links(chain));
    }
    if !rest.is_empty() {
        parts.push(bindings(rest));
    }
    format!("letr {} in {}", parts.join(", "), lrender_context(body))
}

fn frame(f: &LFrame) -> String {
    match f {
        LFrame::Operand(t) => format!("[[] {}]", print_operand(t)),
        LFrame::Rec(bs) => format!("[letr {} in []]", bindings(bs)),
        LFrame::Eval { x, rest, body } => format!("[{}]", group_text(x, "[]", &[], rest, body)),
        LFrame::Chain { x, chain, rest, body } => format!("[{}]", group_text(x, "[]", chain, rest, body)),
        LFrame::Prim(p) => format!("[{} []]", p.keyword()),
        LFrame::Car => "[car []]".to_string(),
        LFrame::Cdr => "[cdr []]".to_string(),
    }
}

pub fn lrender_context(e: &LContext) -> String {
    if e.is_empty() {
        return "[]".to_string();
    }
    e.0.iter().map(frame).collect::<Vec<_>>().join(" ∘ ")
}

fn answer(a: &LAnswer) -> String {
    format!("⟨{}, {}⟩", lrender_context(&a.binders), print(&a.value))
}

fn redex(r: &LRedex) -> String {
    match r {
        LRedex::AnswerApply { fun, arg } => format!("{} {}", answer(fun), print_operand(arg)),
        LRedex::Eval { x, arg, rest, body } => group_text(x, &answer(arg), &[], rest, body),
        LRedex::Chain { x, arg, chain, rest, body } => group_text(x, &answer(arg), chain, rest, body),
        LRedex::Prim { prim, arg } => format!("{} {}", prim.keyword(), answer(arg)),
        LRedex::Car(a) => format!("car {}", answer(a)),
        LRedex::Cdr(a) => format!("cdr {}", answer(a)),
        LRedex::Letrec(..) | LRedex::Let { .. } | LRedex::Cons(..) => print(&redex_term(r)),
    }
}

pub fn lrender(c: &LConfiguration) -> String {
    let x = if c.names().is_empty() {
        "∅".to_string()
    } else {
        c.names().iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
    };
    let (e, focus, tag) = match &c.mode {
        LMode::Refocus(e, t) => (e, print(t), 'f'),
        LMode::Rebuild(e, t) => (e, print(t), 'b'),
        LMode::Need(e, v) => (e, v.to_string(), 'n'),
        LMode::Reduce(e, r) => (e, redex(r), 'd'),
        LMode::Final(a) => return format!("⟨{x} | {}⟩", answer(a)),
    };
    format!("⟨{x} | {}, {focus}⟩_{tag}", lrender_context(e))
}

fn collect_active(e: &LContext, out: &mut Vec<Name>) {
    for f in &e.0 {
        match f {
            LFrame::Rec(bs) => out.extend(bs.iter().map(|(x, _)| x.clone())),
            LFrame::Eval { x, rest, body } => {
                out.push(x.clone());
                out.extend(rest.iter().map(|(y, _)| y.clone()));
                collect_active(body, out);
            }
            LFrame::Chain { x, chain, rest, body } => {
                out.push(x.clone());
                for l in chain {
                    out.push(l.var.clone());
                    collect_active(&l.ctx, out);
                }
                out.extend(rest.iter().map(|(y, _)| y.clone()));
                collect_active(body, out);
            }
            _ => {}
        }
    }
}

fn captured(e: &LContext) -> NameSet {
    let mut out = NameSet::new();
    for f in &e.0 {
        match f {
            LFrame::Rec(bs) => out.extend(bs.iter().map(|(x, _)| x.clone())),
            LFrame::Eval { x, rest, .. } => {
                out.insert(x.clone());
                out.extend(rest.iter().map(|(y, _)| y.clone()));
            }
            LFrame::Chain { x, chain, rest, .. } => {
                out.insert(x.clone());
                out.extend(chain.iter().map(|l| l.var.clone()));
                out.extend(rest.iter().map(|(y, _)| y.clone()));
            }
            _ => {}
        }
    }
    out
}

fn answer_active(a: &LAnswer, out: &mut Vec<Name>) {
    collect_active(&a.binders, out);
}

fn redex_active(r: &LRedex, out: &mut Vec<Name>) {
    match r {
        LRedex::AnswerApply { fun: a, .. } | LRedex::Prim { arg: a, .. } | LRedex::Car(a) | LRedex::Cdr(a) => {
            answer_active(a, out)
        }
        LRedex::Eval { x, arg, rest, body } => {
            let frame = LFrame::Eval { x: x.clone(), rest: rest.clone(), body: body.clone() };
            collect_active(&LContext(vec![frame]), out);
            answer_active(arg, out);
        }
        LRedex::Chain { x, arg, chain, rest, body } => {
            let frame =
                LFrame::Chain { x: x.clone(), chain: chain.clone(), rest: rest.clone(), body: body.clone() };
            collect_active(&LContext(vec![frame]), out);
            answer_active(arg, out);
        }
        LRedex::Letrec(..) | LRedex::Let { .. } | LRedex::Cons(..) => {}
    }
}

fn show(set: &NameSet) -> String {
    format!("{{{}}}", set.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "))
}

/// Well-formedness adapted to letrec frames.
pub fn lcheck_wf(c: &LConfiguration) -> WfReport {
    let mut violations = Vec::new();
    let mut seen = NameSet::new();
    for x in c.names() {
        if !seen.insert(x.clone()) {
            violations.push(format!("duplicate name {x} in X"));
        }
    }

    let fv = free_vars(&lunload(c));
    if !fv.is_empty() {
        violations.push(format!("FV ≠ ∅: {}", show(&fv)));
    }

    let mut active = Vec::new();
    let focus = match &c.mode {
        LMode::Refocus(e, t) | LMode::Rebuild(e, t) => {
            collect_active(e, &mut active);
            Some((e, t.clone()))
        }
        LMode::Need(e, x) => {
            collect_active(e, &mut active);
            Some((e, Term::Var(x.clone())))
        }
        LMode::Reduce(e, r) => {
            collect_active(e, &mut active);
            redex_active(r, &mut active);
            None
        }
        LMode::Final(a) => {
            answer_active(a, &mut active);
            None
        }
    };
    let mut set = NameSet::new();
    for x in active {
        if !set.insert(x.clone()) {
            violations.push(format!("duplicate active variable {x}"));
        }
    }
    if set != *c.name_set() {
        violations.push(format!("AV(E) = {} but X = {}", show(&set), show(c.name_set())));
    }
    if let Some((e, t)) = focus {
        let loose: NameSet = free_vars(&t).difference(&captured(e)).cloned().collect();
        if !loose.is_empty() {
            violations.push(format!("focus variables {} not in CV(E)", show(&loose)));
        }
    }
    WfReport { violations }
}
