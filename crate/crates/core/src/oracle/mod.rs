//! Standard-order reduction by explicit decomposition into an evaluation
//! context and a redex. Slow on purpose: every step re-decomposes the whole
//! term, which makes it a straightforward reference for the machines.

mod core;
mod letrec;

use std::fmt;

use thiserror::Error;

use crate::syntax::{subst, Name, Prim, Term};

pub use self::core::{contract, decompose, evaluate_sr, step_sr};
pub use self::letrec::{contract_letrec, decompose_letrec, evaluate_letrec, step_letrec};

/// One layer of an evaluation context, outermost first in a [`CtxPath`].
#[derive(Debug, Clone, PartialEq)]
pub enum CtxStep {
    /// `E t`
    AppLeft(Term),
    /// `(\x.E'[x]) E`, where `body` is the evidence `E'`.
    OperandOf { binder: Name, body: CtxPath },
    /// `(\x.E) t`
    UnderBinder { binder: Name, operand: Term },
    PrimArg(Prim),
    CarArg,
    CdrArg,
    /// `letrec D in E`
    InLetrecBody { bindings: Vec<(Name, Term)> },
    /// `letrec D, x = E in body`, where the body demands `x`. The hole
    /// binding's right-hand side in `bindings` is a placeholder.
    InLetrecBinding {
        bindings: Vec<(Name, Term)>,
        hole: usize,
        body: Box<Term>,
    },
    /// `letrec x_n = E, D[x, x_n] in body`. `chain` runs from the variable
    /// demanded by the body to `x_n`.
    InDepChain {
        chain: Vec<Name>,
        bindings: Vec<(Name, Term)>,
        hole: usize,
        body: Box<Term>,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CtxPath(pub Vec<CtxStep>);

impl CtxPath {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// `E[t]`. Textual: binders in `E` may capture free names of `t`.
    pub fn plug(&self, t: Term) -> Term {
        self.0.iter().rev().fold(t, |inner, step| plug_step(step, inner))
    }

    /// `E[t]` without capture: binders of `E` that would capture a free
    /// name of `t` are renamed.
    pub fn plug_hygienic(&self, t: &Term) -> Term {
        let hole = hole_name();
        subst(&self.plug(Term::Var(hole.clone())), &hole, t)
    }
}

fn plug_step(step: &CtxStep, inner: Term) -> Term {
    match step {
        CtxStep::AppLeft(t) => Term::app(inner, t.clone()),
        CtxStep::OperandOf { binder, body } => {
            Term::app(Term::lam(binder.clone(), body.plug(Term::Var(binder.clone()))), inner)
        }
        CtxStep::UnderBinder { binder, operand } => {
            Term::app(Term::lam(binder.clone(), inner), operand.clone())
        }
        CtxStep::PrimArg(p) => Term::prim(*p, inner),
        CtxStep::CarArg => Term::car(inner),
        CtxStep::CdrArg => Term::cdr(inner),
        CtxStep::InLetrecBody { bindings } => Term::letrec(bindings.clone(), inner),
        CtxStep::InLetrecBinding { bindings, hole, body }
        | CtxStep::InDepChain { bindings, hole, body, .. } => {
            let mut bs = bindings.clone();
            bs[*hole].1 = inner;
            Term::Letrec(bs, body.clone())
        }
    }
}

pub(crate) fn hole_name() -> Name {
    Name::reserved("hole")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decomposition {
    IsAnswer(Term),
    Redex { ctx: CtxPath, redex: Term },
    Stuck(StuckReason),
}

/// Why a term has no decomposition or its redex cannot be contracted.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StuckReason {
    #[error("free variable {0}")]
    FreeVariable(Name),
    #[error("not a function: {0}")]
    NotAFunction(Term),
    #[error("not a pair: {0}")]
    NotAPair(Term),
    #[error("{prim} undefined on {arg}")]
    DeltaUndefined { prim: Prim, arg: Term },
    #[error("black hole: {}", join(.0))]
    BlackHole(Vec<Name>),
    #[error("letrec is outside the core calculus")]
    LetrecUnsupported,
}

fn join(names: &[Name]) -> String {
    names.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("not a redex: {0}")]
    NotARedex(Term),
    #[error("{prim} undefined on {arg}")]
    DeltaUndefined { prim: Prim, arg: Term },
}

impl From<OracleError> for StuckReason {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::DeltaUndefined { prim, arg } => StuckReason::DeltaUndefined { prim, arg },
            OracleError::NotARedex(t) => StuckReason::NotAFunction(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Stepped { term: Term, rule: &'static str },
    AlreadyAnswer,
    Stuck(StuckReason),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Value { answer: Term, steps: u64 },
    OutOfFuel { last: Term, steps: u64 },
    Stuck { term: Term, reason: StuckReason, steps: u64 },
}

impl Outcome {
    pub fn steps(&self) -> u64 {
        match self {
            Outcome::Value { steps, .. }
            | Outcome::OutOfFuel { steps, .. }
            | Outcome::Stuck { steps, .. } => *steps,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value { answer, steps } => write!(f, "{answer} ({steps} steps)"),
            Outcome::OutOfFuel { steps, .. } => write!(f, "out of fuel after {steps} steps"),
            Outcome::Stuck { reason, steps, .. } => write!(f, "stuck after {steps} steps: {reason}"),
        }
    }
}

pub(crate) fn run_steps(mut t: Term, fuel: u64, step: impl Fn(&Term) -> Step) -> Outcome {
    let mut steps = 0;
    loop {
        match step(&t) {
            Step::AlreadyAnswer => return Outcome::Value { answer: t, steps },
            Step::Stuck(reason) => return Outcome::Stuck { term: t, reason, steps },
            Step::Stepped { term, .. } => {
                if steps == fuel {
                    return Outcome::OutOfFuel { last: t, steps };
                }
                t = term;
                steps += 1;
            }
        }
    }
}
