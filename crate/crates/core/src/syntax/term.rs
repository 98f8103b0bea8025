use std::fmt;

use super::Name;

/// Integer primitives with a fixed δ table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prim {
    Add1,
    Sub1,
}

impl Prim {
    pub fn keyword(self) -> &'static str {
        match self {
            Prim::Add1 => "add1",
            Prim::Sub1 => "sub1",
        }
    }

    /// δ(f, v). `None` when the table has no entry, including overflow.
    pub fn delta(self, arg: &Term) -> Option<Term> {
        let Term::IntConst(n) = arg else { return None };
        let r = match self {
            Prim::Add1 => n.checked_add(1)?,
            Prim::Sub1 => n.checked_sub(1)?,
        };
        Some(Term::IntConst(r))
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Lam(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    Let(Name, Box<Term>, Box<Term>),
    Letrec(Vec<(Name, Term)>, Box<Term>),
    IntConst(i64),
    PrimApp(Prim, Box<Term>),
    Cons(Box<Term>, Box<Term>),
    Car(Box<Term>),
    Cdr(Box<Term>),
    /// A constructed pair of variables. Only produced by reduction.
    PairVal(Name, Name),
}

impl Term {
    pub fn var(x: &Name) -> Term {
        Term::Var(x.clone())
    }

    pub fn lam(x: Name, body: Term) -> Term {
        Term::Lam(x, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn let_(x: Name, rhs: Term, body: Term) -> Term {
        Term::Let(x, Box::new(rhs), Box::new(body))
    }

    pub fn letrec(bindings: Vec<(Name, Term)>, body: Term) -> Term {
        Term::Letrec(bindings, Box::new(body))
    }

    pub fn prim(p: Prim, arg: Term) -> Term {
        Term::PrimApp(p, Box::new(arg))
    }

    pub fn cons(a: Term, b: Term) -> Term {
        Term::Cons(Box::new(a), Box::new(b))
    }

    pub fn car(t: Term) -> Term {
        Term::Car(Box::new(t))
    }

    pub fn cdr(t: Term) -> Term {
        Term::Cdr(Box::new(t))
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Term::Lam(..) | Term::IntConst(_) | Term::PairVal(..))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::IntConst(_) | Term::PairVal(..) => 1,
            Term::Lam(_, b) | Term::PrimApp(_, b) | Term::Car(b) | Term::Cdr(b) => 1 + b.size(),
            Term::App(a, b) | Term::Let(_, a, b) | Term::Cons(a, b) => 1 + a.size() + b.size(),
            Term::Letrec(bs, body) => {
                1 + body.size() + bs.iter().map(|(_, t)| t.size()).sum::<usize>()
            }
        }
    }

    pub fn contains_letrec(&self) -> bool {
        match self {
            Term::Letrec(..) => true,
            Term::Var(_) | Term::IntConst(_) | Term::PairVal(..) => false,
            Term::Lam(_, b) | Term::PrimApp(_, b) | Term::Car(b) | Term::Cdr(b) => {
                b.contains_letrec()
            }
            Term::App(a, b) | Term::Let(_, a, b) | Term::Cons(a, b) => {
                a.contains_letrec() || b.contains_letrec()
            }
        }
    }

    /// Every name occurring anywhere in the term, bound or free.
    pub fn all_names(&self) -> super::NameSet {
        let mut out = super::NameSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut super::NameSet) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::PairVal(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Term::IntConst(_) => {}
            Term::Lam(x, b) => {
                out.insert(x.clone());
                b.collect_names(out);
            }
            Term::PrimApp(_, b) | Term::Car(b) | Term::Cdr(b) => b.collect_names(out),
            Term::App(a, b) | Term::Cons(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Term::Let(x, a, b) => {
                out.insert(x.clone());
                a.collect_names(out);
                b.collect_names(out);
            }
            Term::Letrec(bs, body) => {
                for (x, t) in bs {
                    out.insert(x.clone());
                    t.collect_names(out);
                }
                body.collect_names(out);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print(self))
    }
}
