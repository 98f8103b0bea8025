use std::fmt;

use crate::syntax::{free_vars, Name, NameSet, Term};

use super::{Answer, Configuration, Context, Frame, MRedex, Mode};

/// Active variables: binders and conts, recursively through conts.
pub fn av(e: &Context) -> NameSet {
    let mut out = NameSet::new();
    for x in active_list(e) {
        out.insert(x);
    }
    out
}

fn active_list(e: &Context) -> Vec<Name> {
    let mut out = Vec::new();
    for f in &e.0 {
        match f {
            Frame::Binder(x, _) => out.push(x.clone()),
            Frame::Cont(x, inner) => {
                out.extend(active_list(inner));
                out.push(x.clone());
            }
            _ => {}
        }
    }
    out
}

/// Captured variables: binders reachable without entering a cont.
pub fn cv(e: &Context) -> NameSet {
    e.0.iter()
        .filter_map(|f| match f {
            Frame::Binder(x, _) => Some(x.clone()),
            _ => None,
        })
        .collect()
}

/// Free variables of a context.
pub fn fv_ctx(e: &Context) -> NameSet {
    fv_from(&e.0)
}

fn fv_from(frames: &[Frame]) -> NameSet {
    let Some((first, rest)) = frames.split_first() else { return NameSet::new() };
    let mut inner = fv_from(rest);
    match first {
        Frame::Binder(x, t) => {
            inner.remove(x);
            inner.extend(free_vars(t));
        }
        Frame::Operand(t) => inner.extend(free_vars(t)),
        Frame::Cont(x, e1) => {
            let mut captured = fv_ctx(e1);
            captured.remove(x);
            inner.extend(captured);
        }
        Frame::Prim(_) | Frame::Car | Frame::Cdr => {}
    }
    inner
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WfReport {
    pub violations: Vec<String>,
}

impl WfReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for WfReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            f.write_str("ok")
        } else {
            f.write_str(&self.violations.join("; "))
        }
    }
}

fn show(set: &NameSet) -> String {
    let names: Vec<String> = set.iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", names.join(", "))
}

/// The context and focus a configuration is checked against. Reduce
/// configurations count the answer's binders as part of the context.
fn checked_parts(mode: &Mode) -> (Context, Option<Term>, Vec<String>) {
    let mut notes = Vec::new();
    let mut with_answer = |mut e: Context, f: Frame, a: &Answer| {
        if a.binders.0.iter().any(|b| !matches!(b, Frame::Binder(..))) {
            notes.push("answer holds a non-binder frame".to_string());
        }
        e.push(f);
        (e.compose(a.binders.clone()), Some(a.value.clone()))
    };
    let (e, focus) = match mode {
        Mode::Refocus(e, t) | Mode::Rebuild(e, t) => (e.clone(), Some(t.clone())),
        Mode::Need(e, x) => (e.clone(), Some(Term::Var(x.clone()))),
        Mode::Final(a) => with_answer(Context::new(), Frame::Car, a),
        Mode::Reduce(e, r) => match r {
            MRedex::ContApply { x, inner, arg } => {
                with_answer(e.clone(), Frame::Cont(x.clone(), inner.clone()), arg)
            }
            MRedex::AnswerApply { fun, arg } => with_answer(e.clone(), Frame::Operand(arg.clone()), fun),
            MRedex::PrimRedex { prim, arg } => with_answer(e.clone(), Frame::Prim(*prim), arg),
            MRedex::CarRedex(a) => with_answer(e.clone(), Frame::Car, a),
            MRedex::CdrRedex(a) => with_answer(e.clone(), Frame::Cdr, a),
            MRedex::LetRedex { .. } | MRedex::ConsRedex(..) => {
                (e.clone(), Some(super::unload::unload_redex(r)))
            }
        },
    };
    // A final answer has no frame above its binders.
    let e = if let Mode::Final(_) = mode { Context(e.0[1..].to_vec()) } else { e };
    (e, focus, notes)
}

/// Checks every well-formedness clause and lists the ones that fail.
pub fn check_wf(c: &Configuration) -> WfReport {
    let (e, focus, mut violations) = checked_parts(&c.mode);

    let mut seen = NameSet::new();
    for x in c.names() {
        if !seen.insert(x.clone()) {
            violations.push(format!("duplicate name {x} in X"));
        }
    }

    let fv = fv_ctx(&e);
    if !fv.is_empty() {
        violations.push(format!("FV(E) ≠ ∅: {}", show(&fv)));
    }

    let mut active = NameSet::new();
    for x in active_list(&e) {
        if !active.insert(x.clone()) {
            violations.push(format!("duplicate active variable {x}"));
        }
    }

    if active != *c.name_set() {
        violations.push(format!("AV(E) = {} but X = {}", show(&active), show(c.name_set())));
    }

    if let Some(t) = focus {
        let captured = cv(&e);
        let loose: NameSet = free_vars(&t).difference(&captured).cloned().collect();
        if !loose.is_empty() {
            violations.push(format!("focus variables {} not in CV(E)", show(&loose)));
        }
    }
    WfReport { violations }
}
