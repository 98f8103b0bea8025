use crate::syntax::{print, print_operand, Name, Term};

use super::{Answer, Configuration, Context, Frame, MRedex, Mode};

fn frame(f: &Frame) -> String {
    match f {
        Frame::Operand(t) => format!("[[] {}]", print_operand(t)),
        Frame::Binder(x, t) => format!("[(\\{x}.[]) {}]", print_operand(t)),
        Frame::Cont(x, e) => format!("[(k{x}.{}) []]", render_context(e)),
        Frame::Prim(p) => format!("[{} []]", p.keyword()),
        Frame::Car => "[car []]".to_string(),
        Frame::Cdr => "[cdr []]".to_string(),
    }
}

/// Frames outermost first, joined by `∘`; the empty context is `[]`.
pub fn render_context(e: &Context) -> String {
    if e.is_empty() {
        return "[]".to_string();
    }
    e.0.iter().map(frame).collect::<Vec<_>>().join(" ∘ ")
}

fn answer(a: &Answer) -> String {
    format!("⟨{}, {}⟩", render_context(&a.binders), print(&a.value))
}

fn redex(r: &MRedex) -> String {
    match r {
        MRedex::ContApply { x, inner, arg } => format!("(k{x}.{}) {}", render_context(inner), answer(arg)),
        MRedex::AnswerApply { fun, arg } => format!("{} {}", answer(fun), print_operand(arg)),
        MRedex::LetRedex { x, rhs, body } => print(&Term::let_(x.clone(), rhs.clone(), body.clone())),
        MRedex::PrimRedex { prim, arg } => format!("{} {}", prim.keyword(), answer(arg)),
        MRedex::ConsRedex(a, b) => print(&Term::cons(a.clone(), b.clone())),
        MRedex::CarRedex(a) => format!("car {}", answer(a)),
        MRedex::CdrRedex(a) => format!("cdr {}", answer(a)),
    }
}

fn names(xs: &[Name]) -> String {
    if xs.is_empty() {
        "∅".to_string()
    } else {
        xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
    }
}

/// `⟨X | E, focus⟩_mode`, or `⟨X | ⟨E, v⟩⟩` once final.
pub fn render(c: &Configuration) -> String {
    let x = names(c.names());
    let (e, focus, tag) = match &c.mode {
        Mode::Refocus(e, t) => (e, print(t), 'f'),
        Mode::Rebuild(e, t) => (e, print(t), 'b'),
        Mode::Need(e, v) => (e, v.to_string(), 'n'),
        Mode::Reduce(e, r) => (e, redex(r), 'd'),
        Mode::Final(a) => return format!("⟨{x} | {}⟩", answer(a)),
    };
    format!("⟨{x} | {}, {focus}⟩_{tag}", render_context(e))
}
