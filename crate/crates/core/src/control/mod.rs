//! A call-by-value language with multi-prompt delimited control:
//! `newPrompt`, `pushPrompt`, `withSubCont` and `pushSubCont`, run on a
//! CEK-style machine whose metacontinuation interleaves continuation
//! segments with prompts.

mod run;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::Name;

pub use run::{cinject, crun, crun_with, cstep, render_state, CStats, Control, COutcome, CRunResult, CState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum COp {
    Add,
    Sub,
    Eq,
    Lt,
}

impl COp {
    pub(crate) fn symbol(self) -> &'static str {
        match self {
            COp::Add => "+",
            COp::Sub => "-",
            COp::Eq => "==",
            COp::Lt => "<",
        }
    }
}

pub type Tm = Arc<CTerm>;

#[derive(Debug, Clone, PartialEq)]
pub enum CTerm {
    Var(Name),
    Lam(Name, Tm),
    App(Tm, Tm),
    NewPrompt,
    PushPrompt(Tm, Tm),
    WithSubCont(Tm, Tm),
    PushSubCont(Tm, Tm),
    Int(i64),
    Prim(COp, Tm, Tm),
    If(Tm, Tm, Tm),
    Bool(bool),
    Unit,
    Pair(Tm, Tm),
    /// `let ⟨x, y⟩ = t in body`
    LetPair(Name, Name, Tm, Tm),
    Let(Name, Tm, Tm),
    /// Counts an entry under `label`, then behaves as the body.
    Tick(Arc<str>, Tm),
}

/// Smart constructors.
pub mod build {
    use super::*;

    pub fn var(x: &Name) -> Tm {
        Arc::new(CTerm::Var(x.clone()))
    }
    pub fn lam(x: &Name, body: Tm) -> Tm {
        Arc::new(CTerm::Lam(x.clone(), body))
    }
    pub fn app(f: Tm, a: Tm) -> Tm {
        Arc::new(CTerm::App(f, a))
    }
    pub fn new_prompt() -> Tm {
        Arc::new(CTerm::NewPrompt)
    }
    pub fn push_prompt(p: Tm, t: Tm) -> Tm {
        Arc::new(CTerm::PushPrompt(p, t))
    }
    pub fn with_sub_cont(p: Tm, f: Tm) -> Tm {
        Arc::new(CTerm::WithSubCont(p, f))
    }
    pub fn push_sub_cont(k: Tm, t: Tm) -> Tm {
        Arc::new(CTerm::PushSubCont(k, t))
    }
    pub fn int(n: i64) -> Tm {
        Arc::new(CTerm::Int(n))
    }
    pub fn prim(op: COp, a: Tm, b: Tm) -> Tm {
        Arc::new(CTerm::Prim(op, a, b))
    }
    pub fn if_(c: Tm, t: Tm, e: Tm) -> Tm {
        Arc::new(CTerm::If(c, t, e))
    }
    pub fn bool(b: bool) -> Tm {
        Arc::new(CTerm::Bool(b))
    }
    pub fn unit() -> Tm {
        Arc::new(CTerm::Unit)
    }
    pub fn pair(a: Tm, b: Tm) -> Tm {
        Arc::new(CTerm::Pair(a, b))
    }
    pub fn let_pair(x: &Name, y: &Name, t: Tm, body: Tm) -> Tm {
        Arc::new(CTerm::LetPair(x.clone(), y.clone(), t, body))
    }
    pub fn let_(x: &Name, t: Tm, body: Tm) -> Tm {
        Arc::new(CTerm::Let(x.clone(), t, body))
    }
    pub fn tick(label: &str, t: Tm) -> Tm {
        Arc::new(CTerm::Tick(label.into(), t))
    }
}

impl fmt::Display for CTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CTerm::Var(x) => write!(f, "{x}"),
            CTerm::Lam(x, b) => write!(f, "(\\{x}.{b})"),
            CTerm::App(a, b) => write!(f, "({a} {b})"),
            CTerm::NewPrompt => f.write_str("newPrompt"),
            CTerm::PushPrompt(a, b) => write!(f, "(pushPrompt {a} {b})"),
            CTerm::WithSubCont(a, b) => write!(f, "(withSubCont {a} {b})"),
            CTerm::PushSubCont(a, b) => write!(f, "(pushSubCont {a} {b})"),
            CTerm::Int(n) => write!(f, "{n}"),
            CTerm::Prim(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            CTerm::If(c, t, e) => write!(f, "(if {c} then {t} else {e})"),
            CTerm::Bool(b) => f.write_str(if *b { "True" } else { "False" }),
            CTerm::Unit => f.write_str("()"),
            CTerm::Pair(a, b) => write!(f, "⟨{a}, {b}⟩"),
            CTerm::LetPair(x, y, t, b) => write!(f, "(let ⟨{x}, {y}⟩ = {t} in {b})"),
            CTerm::Let(x, t, b) => write!(f, "(let {x} = {t} in {b})"),
            CTerm::Tick(l, t) => write!(f, "(tick {l} {t})"),
        }
    }
}

/// Persistent environment.
#[derive(Debug, Clone, Default)]
pub struct Env(Option<Arc<EnvNode>>);

#[derive(Debug)]
struct EnvNode {
    name: Name,
    value: CValue,
    next: Env,
}

impl Env {
    pub fn new() -> Self {
        Env(None)
    }

    pub fn bind(&self, name: Name, value: CValue) -> Env {
        Env(Some(Arc::new(EnvNode { name, value, next: self.clone() })))
    }

    pub fn lookup(&self, x: &Name) -> Option<&CValue> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.name == *x {
                return Some(&node.value);
            }
            cur = &node.next.0;
        }
        None
    }
}

#[derive(Debug, Clone)]
pub enum CValue {
    Closure(Name, Tm, Env),
    Prompt(u64),
    SubCont(Arc<Vec<MetaItem>>),
    Int(i64),
    Bool(bool),
    Unit,
    Pair(Box<CValue>, Box<CValue>),
}

impl fmt::Display for CValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CValue::Closure(x, ..) => write!(f, "<closure \\{x}>"),
            CValue::Prompt(p) => write!(f, "p{p}"),
            CValue::SubCont(m) => write!(f, "<subcont {}>", meta_summary(m)),
            CValue::Int(n) => write!(f, "{n}"),
            CValue::Bool(b) => f.write_str(if *b { "True" } else { "False" }),
            CValue::Unit => f.write_str("()"),
            CValue::Pair(a, b) => write!(f, "⟨{a}, {b}⟩"),
        }
    }
}

/// Call-by-value continuation frames.
#[derive(Debug, Clone)]
pub enum KFrame {
    /// `[] t`
    AppArg(Tm, Env),
    /// `v []`
    AppFun(CValue),
    /// `pushPrompt [] t`
    PushPromptBody(Tm, Env),
    /// `withSubCont [] t`
    WithSubContFun(Tm, Env),
    /// `withSubCont p []`
    WithSubContPrompt(CValue),
    /// `pushSubCont [] t`
    PushSubContBody(Tm, Env),
    PrimLeft(COp, Tm, Env),
    PrimRight(COp, CValue),
    If(Tm, Tm, Env),
    PairLeft(Tm, Env),
    PairRight(CValue),
    LetPair(Name, Name, Tm, Env),
    Let(Name, Tm, Env),
}

#[derive(Debug, Clone)]
pub enum MetaItem {
    Seg(Vec<KFrame>),
    Prompt(u64),
}

/// Top of the metacontinuation first, e.g. `[k3 · p0 · k1]`.
pub fn meta_summary(meta: &[MetaItem]) -> String {
    let items: Vec<String> = meta
        .iter()
        .rev()
        .map(|m| match m {
            MetaItem::Seg(k) => format!("k{}", k.len()),
            MetaItem::Prompt(p) => format!("p{p}"),
        })
        .collect();
    format!("[{}]", items.join(" · "))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CError {
    #[error("unbound variable {0}")]
    UnboundVariable(Name),
    #[error("prompt p{0} is not on the metacontinuation")]
    UnboundPrompt(u64),
    #[error("type error: {0}")]
    TypeError(String),
    #[error("state is terminal")]
    Terminal,
}
