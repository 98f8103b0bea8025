//! The cyclic machine for the letrec calculus. Binder frames hold groups of
//! recursive bindings; a binding under evaluation carries the chain of
//! bindings that are waiting on it.

mod step;
mod view;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{Name, NameSet, Prim, Term};

pub use step::{linject, lrun, lrun_with, lstep, LRule, LRunOutcome, LRunResult};
pub use view::{lcheck_wf, lrender, lrender_context, lunload, lunload_context};

pub type Bindings = Vec<(Name, Term)>;

/// One link `⟨x_i, E_i⟩` of a dependency chain: `x_i` is waiting in `E_i`
/// for the value of the next variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub var: Name,
    pub ctx: LContext,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LFrame {
    /// `[] t`
    Operand(Term),
    /// `letr D+ in []`
    Rec(Bindings),
    /// `letr x = [], D* in E`
    Eval { x: Name, rest: Bindings, body: LContext },
    /// `letr x = [], chain, D* in E`; the chain is most recent first.
    Chain { x: Name, chain: Vec<Link>, rest: Bindings, body: LContext },
    Prim(Prim),
    Car,
    Cdr,
}

/// Frames outermost first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LContext(pub Vec<LFrame>);

impl LContext {
    pub fn new() -> Self {
        LContext(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, f: LFrame) {
        self.0.push(f);
    }

    pub fn compose(mut self, other: LContext) -> LContext {
        self.0.extend(other.0);
        self
    }

    pub fn depth(&self) -> usize {
        self.0
            .iter()
            .map(|f| match f {
                LFrame::Eval { body, .. } => 1 + body.depth(),
                LFrame::Chain { chain, body, .. } => {
                    1 + body.depth() + chain.iter().map(|l| l.ctx.depth()).sum::<usize>()
                }
                _ => 1,
            })
            .sum()
    }

    pub(crate) fn split_binders(mut self) -> (LContext, LContext) {
        let k = self
            .0
            .iter()
            .rposition(|f| !matches!(f, LFrame::Rec(_)))
            .map_or(0, |i| i + 1);
        let tail = self.0.split_off(k);
        (self, LContext(tail))
    }
}

/// Concatenates the bindings of a run of `Rec` frames.
pub fn flatten(binders: &LContext) -> Bindings {
    binders
        .0
        .iter()
        .flat_map(|f| match f {
            LFrame::Rec(bs) => bs.clone(),
            other => panic!("flatten expects binder frames, got {other:?}"),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LAnswer {
    pub binders: LContext,
    pub value: Term,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LRedex {
    /// `a t`
    AnswerApply { fun: LAnswer, arg: Term },
    /// `letr x = a, D* in E`
    Eval { x: Name, arg: LAnswer, rest: Bindings, body: LContext },
    /// `letr x = a, chain, D* in E`
    Chain { x: Name, arg: LAnswer, chain: Vec<Link>, rest: Bindings, body: LContext },
    Letrec(Bindings, Term),
    Let { x: Name, rhs: Term, body: Term },
    Prim { prim: Prim, arg: LAnswer },
    Cons(Term, Term),
    Car(LAnswer),
    Cdr(LAnswer),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LMode {
    Refocus(LContext, Term),
    Rebuild(LContext, Term),
    Need(LContext, Name),
    Reduce(LContext, LRedex),
    Final(LAnswer),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LConfiguration {
    names: Vec<Name>,
    name_set: BTreeSet<Name>,
    pub mode: LMode,
}

impl LConfiguration {
    pub fn new(names: Vec<Name>, mode: LMode) -> Self {
        let name_set = names.iter().cloned().collect();
        LConfiguration { names, name_set, mode }
    }

    pub fn names(&self) -> &[Name] {
        &self.names
    }

    pub fn name_set(&self) -> &NameSet {
        &self.name_set
    }

    pub(crate) fn add_name(&mut self, x: Name) {
        self.name_set.insert(x.clone());
        self.names.push(x);
    }

    pub fn is_final(&self) -> bool {
        matches!(self.mode, LMode::Final(_))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LMachineError {
    #[error("open term: free variable {0}")]
    OpenTerm(Name),
    #[error("no binding for {0}")]
    StuckNeed(Name),
    #[error("black hole: {}", join(.0))]
    BlackHole(Vec<Name>),
    #[error("not a function: {0}")]
    NotAFunction(Term),
    #[error("not a pair: {0}")]
    NotAPair(Term),
    #[error("{prim} undefined on {arg}")]
    DeltaUndefined { prim: Prim, arg: Term },
    #[error("configuration is final")]
    AlreadyFinal,
}

fn join(names: &[Name]) -> String {
    names.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" -> ")
}
