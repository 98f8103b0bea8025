//! Call-by-need terms to the delimited-control language. Every binder
//! becomes a fresh prompt; a demand captures the continuation up to that
//! prompt, forces the suspended computation and re-installs it memoized.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::control::build::*;
use crate::control::{cinject, crun_with, COp, COutcome, CRunResult, CState, CStats, CValue, Tm};
use crate::syntax::{free_vars, fresh, subst, Name, Prim, Term};

/// What a demand re-installs once the suspended computation is done.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeedStrategy {
    /// `delay (return v) as x`: later demands see the value.
    #[default]
    Memoize,
    /// Re-install the original thunk, so every demand recomputes. Only
    /// useful for checking that sharing is observable.
    Rethunk,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TranslateError {
    #[error("cannot translate {0}")]
    Untranslatable(&'static str),
}

struct Names {
    s: Name,
    va: Name,
    vp: Name,
    xp: Name,
    ka: Name,
    fk: Name,
    k: Name,
    fth: Name,
    unit: Name,
    x1: Name,
    x2: Name,
    p1: Name,
    p2: Name,
}

impl Names {
    fn new() -> Self {
        let r = Name::reserved;
        Names {
            s: r("s"),
            va: r("va"),
            vp: r("vp"),
            xp: r("xp"),
            ka: r("ka"),
            fk: r("fk"),
            k: r("k"),
            fth: r("fth"),
            unit: r("u"),
            x1: r("x1"),
            x2: r("x2"),
            p1: r("p1"),
            p2: r("p2"),
        }
    }
}

/// Carries the redex prompt name, the demand strategy and the labels given
/// to suspended computations.
pub struct Translator {
    strategy: NeedStrategy,
    n: Names,
    sites: u32,
    labels: BTreeMap<String, u32>,
}

impl Default for Translator {
    fn default() -> Self {
        Translator::new(NeedStrategy::Memoize)
    }
}

impl Translator {
    pub fn new(strategy: NeedStrategy) -> Self {
        Translator { strategy, n: Names::new(), sites: 0, labels: BTreeMap::new() }
    }

    /// The distinguished identifier bound to the redex prompt.
    pub fn redex_prompt(&self) -> &Name {
        &self.n.s
    }

    fn label(&mut self, base: String) -> String {
        let seen = self.labels.entry(base.clone()).or_default();
        *seen += 1;
        if *seen == 1 {
            base
        } else {
            format!("{base}#{seen}")
        }
    }

    fn site(&mut self) -> u32 {
        self.sites += 1;
        self.sites
    }

    /// `return v ≡ withSubCont s λk_a.⟨k_a, v⟩`
    fn ret(&self, v: Tm) -> Tm {
        let n = &self.n;
        with_sub_cont(var(&n.s), lam(&n.ka, pair(var(&n.ka), v)))
    }

    /// `do x <= t1 in t2 ≡ let ⟨k_a, x⟩ = pushPrompt s t1 in pushSubCont k_a t2`
    fn do_(&self, x: &Name, t1: Tm, t2: Tm) -> Tm {
        let n = &self.n;
        let_pair(&n.ka, x, push_prompt(var(&n.s), t1), push_sub_cont(var(&n.ka), t2))
    }

    /// `let f_k = pushPrompt x t2 in f_k thunk`
    fn delay_thunk(&self, thunk: Tm, x: Tm, t2: Tm) -> Tm {
        let n = &self.n;
        let_(&n.fk, push_prompt(x, t2), app(var(&n.fk), thunk))
    }

    /// `delay t1 as x in t2`, counting entries to `t1` under `label`.
    fn delay(&self, label: &str, t1: Tm, x: Tm, t2: Tm) -> Tm {
        self.delay_thunk(lam(&self.n.unit, tick(label, t1)), x, t2)
    }

    /// `need x`
    fn need(&self, x: &Name) -> Tm {
        let n = &self.n;
        let va = || var(&n.va);
        let resume = push_sub_cont(var(&n.k), self.ret(va()));
        let redelay = match self.strategy {
            NeedStrategy::Memoize => self.delay_thunk(lam(&n.unit, self.ret(va())), var(x), resume),
            NeedStrategy::Rethunk => self.delay_thunk(var(&n.fth), var(x), resume),
        };
        let force = app(var(&n.fth), unit());
        with_sub_cont(var(x), lam(&n.k, lam(&n.fth, self.do_(&n.va, force, redelay))))
    }

    /// `N⟦t⟧`
    pub fn translate(&mut self, t: &Term) -> Result<Tm, TranslateError> {
        Ok(match t {
            Term::Var(x) => self.need(x),
            Term::Lam(x, body) => {
                let body = self.translate(body)?;
                self.ret(lam(x, body))
            }
            Term::App(t1, t2) => {
                let f = self.translate(t1)?;
                let label = format!("arg{}", self.site());
                let a = self.translate(t2)?;
                let n = &self.n;
                let body = self.delay(&label, a, var(&n.xp), app(var(&n.va), var(&n.xp)));
                self.do_(&n.va, f, let_(&n.xp, new_prompt(), body))
            }
            Term::Let(x, t1, t2) => {
                // The bound name is not in scope in its own right-hand side.
                let (x, t2) = if free_vars(t1).contains(x) {
                    let mut avoid = t2.all_names();
                    avoid.extend(t1.all_names());
                    let x2 = fresh(x, &avoid);
                    let t2 = subst(t2, x, &Term::Var(x2.clone()));
                    (x2, t2)
                } else {
                    (x.clone(), (**t2).clone())
                };
                let label = self.label(x.to_string());
                let rhs = self.translate(t1)?;
                let body = self.translate(&t2)?;
                let_(&x, new_prompt(), self.delay(&label, rhs, var(&x), body))
            }
            Term::IntConst(c) => self.ret(int(*c)),
            Term::PrimApp(p, arg) => {
                let arg = self.translate(arg)?;
                let op = match p {
                    Prim::Add1 => COp::Add,
                    Prim::Sub1 => COp::Sub,
                };
                let n = &self.n;
                self.do_(&n.va, arg, self.ret(prim(op, var(&n.va), int(1))))
            }
            Term::Cons(t1, t2) => {
                let site = self.site();
                let a = self.translate(t1)?;
                let b = self.translate(t2)?;
                let n = &self.n;
                let inner = self.delay(
                    &format!("cons{site}.cdr"),
                    b,
                    var(&n.x2),
                    self.ret(pair(var(&n.x1), var(&n.x2))),
                );
                let outer = self.delay(&format!("cons{site}.car"), a, var(&n.x1), inner);
                let_(&n.x1, new_prompt(), let_(&n.x2, new_prompt(), outer))
            }
            Term::Car(arg) | Term::Cdr(arg) => {
                let arg = self.translate(arg)?;
                let n = &self.n;
                let pick = if matches!(t, Term::Car(_)) { &n.p1 } else { &n.p2 };
                let demand = let_pair(&n.p1, &n.p2, var(&n.vp), self.need(pick));
                self.do_(&n.vp, arg, demand)
            }
            Term::Letrec(..) => return Err(TranslateError::Untranslatable("letrec")),
            Term::PairVal(..) => return Err(TranslateError::Untranslatable("a pair value")),
        })
    }

    /// `let s = newPrompt in pushPrompt s N⟦t⟧`
    pub fn translate_program(&mut self, t: &Term) -> Result<Tm, TranslateError> {
        let body = self.translate(t)?;
        let s = &self.n.s;
        Ok(let_(s, new_prompt(), push_prompt(var(s), body)))
    }
}

pub fn translate(t: &Term) -> Result<Tm, TranslateError> {
    Translator::default().translate(t)
}

pub fn translate_program(t: &Term) -> Result<Tm, TranslateError> {
    Translator::default().translate_program(t)
}

/// The value part of a simulated answer.
#[derive(Debug, Clone, PartialEq)]
pub enum SimValue {
    /// A closure; only its parameter is observable.
    Closure(Name),
    Int(i64),
    /// A lazy pair: the prompts standing for its two components.
    Pair(u64, u64),
    /// Anything that is not an answer tuple.
    Other(String),
}

impl fmt::Display for SimValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimValue::Closure(x) => write!(f, "<closure \\{x}>"),
            SimValue::Int(n) => write!(f, "{n}"),
            SimValue::Pair(a, b) => write!(f, "<p{a},p{b}>"),
            SimValue::Other(s) => write!(f, "<not an answer: {s}>"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SimOutcome {
    Value(SimValue),
    OutOfFuel,
    Error(crate::control::CError),
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub outcome: SimOutcome,
    pub stats: CStats,
}

impl SimResult {
    pub fn steps(&self) -> u64 {
        self.stats.steps
    }
}

fn project(v: &CValue) -> SimValue {
    match v {
        CValue::Pair(k, value) if matches!(**k, CValue::SubCont(_)) => match &**value {
            CValue::Closure(x, ..) => SimValue::Closure(x.clone()),
            CValue::Int(n) => SimValue::Int(*n),
            CValue::Pair(a, b) => match (&**a, &**b) {
                (CValue::Prompt(a), CValue::Prompt(b)) => SimValue::Pair(*a, *b),
                _ => SimValue::Other(value.to_string()),
            },
            other => SimValue::Other(other.to_string()),
        },
        other => SimValue::Other(other.to_string()),
    }
}

/// Runs the translated program and reports the value part of its answer.
pub fn simulate(t: &Term, fuel: u64) -> Result<SimResult, TranslateError> {
    simulate_with(t, fuel, NeedStrategy::Memoize)
}

pub fn simulate_with(t: &Term, fuel: u64, strategy: NeedStrategy) -> Result<SimResult, TranslateError> {
    simulate_observed(t, fuel, strategy, |_| {})
}

/// Like [`simulate_with`], calling `observe` on every runtime state.
pub fn simulate_observed(
    t: &Term,
    fuel: u64,
    strategy: NeedStrategy,
    observe: impl FnMut(&CState),
) -> Result<SimResult, TranslateError> {
    let program = Translator::new(strategy).translate_program(t)?;
    let CRunResult { outcome, stats } = crun_with(cinject(program), fuel, observe);
    let outcome = match outcome {
        COutcome::Value(v) => SimOutcome::Value(project(&v)),
        COutcome::OutOfFuel(_) => SimOutcome::OutOfFuel,
        COutcome::Error(e, _) => SimOutcome::Error(e),
    };
    Ok(SimResult { outcome, stats })
}
