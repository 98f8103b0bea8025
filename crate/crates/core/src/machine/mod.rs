//! The heap-less call-by-need machine: refocus, rebuild, need and reduce
//! modes over a context of frames, with the name list `X` for hygiene.

mod render;
mod step;
mod unload;
mod wf;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{Name, NameSet, Prim, Term};

pub use render::{render, render_context};
pub use step::{inject, run, run_with, step, MachineStats, Rule, RunOutcome, RunResult};
pub use unload::{unload, unload_context};
pub use wf::{av, check_wf, cv, fv_ctx, WfReport};

#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    /// `[] t`
    Operand(Term),
    /// `(\x.[]) t`
    Binder(Name, Term),
    /// `(kx.E) []`
    Cont(Name, Context),
    /// `f []`
    Prim(Prim),
    Car,
    Cdr,
}

/// Frames outermost first; the innermost frame is at the end.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Context(pub Vec<Frame>);

impl Context {
    pub fn new() -> Self {
        Context(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn push(&mut self, f: Frame) {
        self.0.push(f);
    }

    /// `self ∘ other`
    pub fn compose(mut self, other: Context) -> Context {
        self.0.extend(other.0);
        self
    }

    pub fn frames(&self) -> &[Frame] {
        &self.0
    }

    /// Frames counted recursively through conts.
    pub fn depth(&self) -> usize {
        self.0
            .iter()
            .map(|f| match f {
                Frame::Cont(_, inner) => 1 + inner.depth(),
                _ => 1,
            })
            .sum()
    }

    /// Splits off the maximal suffix of binder frames.
    pub(crate) fn split_binders(mut self) -> (Context, Context) {
        let k = self
            .0
            .iter()
            .rposition(|f| !matches!(f, Frame::Binder(..)))
            .map_or(0, |i| i + 1);
        let tail = self.0.split_off(k);
        (self, Context(tail))
    }
}

/// `⟨E_b, v⟩`: a value under binder frames.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub binders: Context,
    pub value: Term,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MRedex {
    /// `(kx.E) a`
    ContApply { x: Name, inner: Context, arg: Answer },
    /// `a t`
    AnswerApply { fun: Answer, arg: Term },
    /// `let x = rhs in body`
    LetRedex { x: Name, rhs: Term, body: Term },
    /// `f a`
    PrimRedex { prim: Prim, arg: Answer },
    ConsRedex(Term, Term),
    CarRedex(Answer),
    CdrRedex(Answer),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Refocus(Context, Term),
    Rebuild(Context, Term),
    Need(Context, Name),
    Reduce(Context, MRedex),
    Final(Answer),
}

/// `⟨X | E, ?⟩`. `X` keeps insertion order; a set copy answers membership.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    names: Vec<Name>,
    name_set: BTreeSet<Name>,
    pub mode: Mode,
}

impl Configuration {
    pub fn new(names: Vec<Name>, mode: Mode) -> Self {
        let name_set = names.iter().cloned().collect();
        Configuration { names, name_set, mode }
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
        matches!(self.mode, Mode::Final(_))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MachineError {
    #[error("open term: free variable {0}")]
    OpenTerm(Name),
    #[error("no binder for {0}")]
    StuckNeed(Name),
    #[error("not a function: {0}")]
    NotAFunction(Term),
    #[error("not a pair: {0}")]
    NotAPair(Term),
    #[error("{prim} undefined on {arg}")]
    DeltaUndefined { prim: Prim, arg: Term },
    #[error("letrec requires the letrec machine")]
    LetrecUnsupported,
    #[error("configuration is final")]
    AlreadyFinal,
}
