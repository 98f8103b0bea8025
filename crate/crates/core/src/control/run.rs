use std::collections::BTreeMap;
use std::sync::Arc;

use super::{meta_summary, CError, COp, CTerm, CValue, Env, KFrame, MetaItem, Tm};

#[derive(Debug, Clone)]
pub enum Control {
    Eval(Tm, Env),
    Return(CValue),
}

/// `control, kont, meta, counter`. The metacontinuation keeps its top at
/// the end of the vector.
#[derive(Debug, Clone)]
pub struct CState {
    pub control: Control,
    pub kont: Vec<KFrame>,
    pub meta: Vec<MetaItem>,
    pub counter: u64,
}

impl CState {
    pub fn is_terminal(&self) -> bool {
        matches!(self.control, Control::Return(_)) && self.kont.is_empty() && self.meta.is_empty()
    }
}

/// `□[t], [], 0`
pub fn cinject(t: Tm) -> CState {
    CState { control: Control::Eval(t, Env::new()), kont: Vec::new(), meta: Vec::new(), counter: 0 }
}

enum Event {
    None,
    Tick(Arc<str>),
    Prompt(u64),
    Capture,
    Reinstate,
}

fn type_error(what: &str, v: &CValue) -> CError {
    CError::TypeError(format!("expected {what}, got {v}"))
}

fn apply(s: &mut CState, f: CValue, arg: CValue) -> Result<(), CError> {
    match f {
        CValue::Closure(x, body, env) => {
            s.control = Control::Eval(body, env.bind(x, arg));
            Ok(())
        }
        other => Err(type_error("a function", &other)),
    }
}

fn prim(op: COp, a: &CValue, b: &CValue) -> Result<CValue, CError> {
    let (CValue::Int(x), CValue::Int(y)) = (a, b) else {
        return Err(CError::TypeError(format!("{} on {a} and {b}", op.symbol())));
    };
    let overflow = || CError::TypeError(format!("overflow in {x} {} {y}", op.symbol()));
    Ok(match op {
        COp::Add => CValue::Int(x.checked_add(*y).ok_or_else(overflow)?),
        COp::Sub => CValue::Int(x.checked_sub(*y).ok_or_else(overflow)?),
        COp::Eq => CValue::Bool(x == y),
        COp::Lt => CValue::Bool(x < y),
    })
}

fn advance(s: &mut CState) -> Result<Event, CError> {
    let control = std::mem::replace(&mut s.control, Control::Return(CValue::Unit));
    match control {
        Control::Eval(t, env) => eval(s, t, env),
        Control::Return(v) => ret(s, v),
    }
}

fn eval(s: &mut CState, t: Tm, env: Env) -> Result<Event, CError> {
    let mut event = Event::None;
    s.control = match &*t {
        CTerm::Var(x) => match env.lookup(x) {
            Some(v) => Control::Return(v.clone()),
            None => return Err(CError::UnboundVariable(x.clone())),
        },
        CTerm::Lam(x, body) => Control::Return(CValue::Closure(x.clone(), body.clone(), env)),
        CTerm::App(f, a) => {
            s.kont.push(KFrame::AppArg(a.clone(), env.clone()));
            Control::Eval(f.clone(), env)
        }
        CTerm::NewPrompt => {
            let p = s.counter;
            s.counter += 1;
            event = Event::Prompt(p);
            Control::Return(CValue::Prompt(p))
        }
        CTerm::PushPrompt(p, body) => {
            s.kont.push(KFrame::PushPromptBody(body.clone(), env.clone()));
            Control::Eval(p.clone(), env)
        }
        CTerm::WithSubCont(p, f) => {
            s.kont.push(KFrame::WithSubContFun(f.clone(), env.clone()));
            Control::Eval(p.clone(), env)
        }
        CTerm::PushSubCont(k, body) => {
            s.kont.push(KFrame::PushSubContBody(body.clone(), env.clone()));
            Control::Eval(k.clone(), env)
        }
        CTerm::Int(n) => Control::Return(CValue::Int(*n)),
        CTerm::Bool(b) => Control::Return(CValue::Bool(*b)),
        CTerm::Unit => Control::Return(CValue::Unit),
        CTerm::Prim(op, a, b) => {
            s.kont.push(KFrame::PrimLeft(*op, b.clone(), env.clone()));
            Control::Eval(a.clone(), env)
        }
        CTerm::If(c, th, el) => {
            s.kont.push(KFrame::If(th.clone(), el.clone(), env.clone()));
            Control::Eval(c.clone(), env)
        }
        CTerm::Pair(a, b) => {
            s.kont.push(KFrame::PairLeft(b.clone(), env.clone()));
            Control::Eval(a.clone(), env)
        }
        CTerm::LetPair(x, y, rhs, body) => {
            s.kont.push(KFrame::LetPair(x.clone(), y.clone(), body.clone(), env.clone()));
            Control::Eval(rhs.clone(), env)
        }
        CTerm::Let(x, rhs, body) => {
            s.kont.push(KFrame::Let(x.clone(), body.clone(), env.clone()));
            Control::Eval(rhs.clone(), env)
        }
        CTerm::Tick(label, body) => {
            event = Event::Tick(label.clone());
            Control::Eval(body.clone(), env)
        }
    };
    Ok(event)
}

fn ret(s: &mut CState, v: CValue) -> Result<Event, CError> {
    let Some(frame) = s.kont.pop() else {
        return match s.meta.pop() {
            // □[v], E:M ↦ E[v], M
            Some(MetaItem::Seg(k)) => {
                s.kont = k;
                s.control = Control::Return(v);
                Ok(Event::None)
            }
            // □[v], p:M ↦ □[v], M
            Some(MetaItem::Prompt(_)) => {
                s.control = Control::Return(v);
                Ok(Event::None)
            }
            None => {
                s.control = Control::Return(v);
                Err(CError::Terminal)
            }
        };
    };
    let mut event = Event::None;
    match frame {
        KFrame::AppArg(a, env) => {
            s.kont.push(KFrame::AppFun(v));
            s.control = Control::Eval(a, env);
        }
        KFrame::AppFun(f) => apply(s, f, v)?,
        KFrame::PushPromptBody(body, env) => {
            let CValue::Prompt(p) = v else { return Err(type_error("a prompt", &v)) };
            let k = std::mem::take(&mut s.kont);
            s.meta.push(MetaItem::Seg(k));
            s.meta.push(MetaItem::Prompt(p));
            s.control = Control::Eval(body, env);
        }
        KFrame::WithSubContFun(f, env) => {
            if !matches!(v, CValue::Prompt(_)) {
                return Err(type_error("a prompt", &v));
            }
            s.kont.push(KFrame::WithSubContPrompt(v));
            s.control = Control::Eval(f, env);
        }
        KFrame::WithSubContPrompt(p) => {
            let CValue::Prompt(p) = p else { unreachable!("checked when pushed") };
            // The innermost occurrence of p, so that p ∉ M1.
            let i = s
                .meta
                .iter()
                .rposition(|m| matches!(m, MetaItem::Prompt(q) if *q == p))
                .ok_or(CError::UnboundPrompt(p))?;
            let mut captured = s.meta.split_off(i + 1);
            s.meta.pop();
            captured.push(MetaItem::Seg(std::mem::take(&mut s.kont)));
            apply(s, v, CValue::SubCont(Arc::new(captured)))?;
            event = Event::Capture;
        }
        KFrame::PushSubContBody(body, env) => {
            let CValue::SubCont(m1) = v else { return Err(type_error("a subcontinuation", &v)) };
            let k = std::mem::take(&mut s.kont);
            s.meta.push(MetaItem::Seg(k));
            s.meta.extend(m1.iter().cloned());
            s.control = Control::Eval(body, env);
            event = Event::Reinstate;
        }
        KFrame::PrimLeft(op, b, env) => {
            s.kont.push(KFrame::PrimRight(op, v));
            s.control = Control::Eval(b, env);
        }
        KFrame::PrimRight(op, a) => s.control = Control::Return(prim(op, &a, &v)?),
        KFrame::If(th, el, env) => {
            let CValue::Bool(b) = v else { return Err(type_error("a boolean", &v)) };
            s.control = Control::Eval(if b { th } else { el }, env);
        }
        KFrame::PairLeft(b, env) => {
            s.kont.push(KFrame::PairRight(v));
            s.control = Control::Eval(b, env);
        }
        KFrame::PairRight(a) => s.control = Control::Return(CValue::Pair(Box::new(a), Box::new(v))),
        KFrame::LetPair(x, y, body, env) => {
            let CValue::Pair(a, b) = v else { return Err(type_error("a pair", &v)) };
            s.control = Control::Eval(body, env.bind(x, *a).bind(y, *b));
        }
        KFrame::Let(x, body, env) => s.control = Control::Eval(body, env.bind(x, v)),
    }
    Ok(event)
}

/// One transition.
pub fn cstep(mut s: CState) -> Result<CState, CError> {
    if s.is_terminal() {
        return Err(CError::Terminal);
    }
    advance(&mut s)?;
    Ok(s)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CStats {
    pub steps: u64,
    /// Prompts handed out by `newPrompt`, in order.
    pub prompts: Vec<u64>,
    pub captures: u64,
    pub reinstatements: u64,
    pub ticks: BTreeMap<Arc<str>, u64>,
    pub max_kont: usize,
    pub max_meta: usize,
}

#[derive(Debug, Clone)]
pub enum COutcome {
    Value(CValue),
    OutOfFuel(CState),
    Error(CError, CState),
}

#[derive(Debug, Clone)]
pub struct CRunResult {
    pub outcome: COutcome,
    pub stats: CStats,
}

pub fn crun(t: Tm, fuel: u64) -> CRunResult {
    crun_with(cinject(t), fuel, |_| {})
}

/// Runs from `s`, calling `observe` on every state including the first.
pub fn crun_with(mut s: CState, fuel: u64, mut observe: impl FnMut(&CState)) -> CRunResult {
    let mut stats = CStats::default();
    observe(&s);
    loop {
        if s.is_terminal() {
            let Control::Return(v) = s.control else { unreachable!() };
            return CRunResult { outcome: COutcome::Value(v), stats };
        }
        if stats.steps == fuel {
            return CRunResult { outcome: COutcome::OutOfFuel(s), stats };
        }
        match advance(&mut s) {
            Ok(event) => {
                stats.steps += 1;
                match event {
                    Event::None => {}
                    Event::Tick(l) => *stats.ticks.entry(l).or_default() += 1,
                    Event::Prompt(p) => stats.prompts.push(p),
                    Event::Capture => stats.captures += 1,
                    Event::Reinstate => stats.reinstatements += 1,
                }
                stats.max_kont = stats.max_kont.max(s.kont.len());
                stats.max_meta = stats.max_meta.max(s.meta.len());
                observe(&s);
            }
            Err(e) => return CRunResult { outcome: COutcome::Error(e, s), stats },
        }
    }
}

fn clip(text: String, width: usize) -> String {
    if text.chars().count() <= width {
        text
    } else {
        let mut out: String = text.chars().take(width).collect();
        out.push('…');
        out
    }
}

/// `⟨control ∥ kont-depth ∥ meta-summary ∥ counter⟩`
pub fn render_state(s: &CState) -> String {
    let control = match &s.control {
        Control::Eval(t, _) => clip(t.to_string(), 60),
        Control::Return(v) => format!("return {v}"),
    };
    format!("⟨{control} ∥ {} ∥ {} ∥ {}⟩", s.kont.len(), meta_summary(&s.meta), s.counter)
}
