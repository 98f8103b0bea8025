//! Seeded random closed terms and exhaustive enumeration of small ones,
//! shared by the test suites and the benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Name, Prim, Term};

/// Which forms besides variables, abstractions and applications may appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Features {
    pub let_: bool,
    pub ints: bool,
    pub pairs: bool,
    pub letrec: bool,
}

impl Features {
    pub const LAMBDA: Features = Features { let_: false, ints: false, pairs: false, letrec: false };
    pub const EXTENDED: Features = Features { let_: true, ints: true, pairs: true, letrec: false };
    pub const ALL: Features = Features { let_: true, ints: true, pairs: true, letrec: true };
}

const POOL: &[&str] = &["x", "y", "z", "f", "g"];

pub struct TermGen {
    rng: ChaCha8Rng,
    features: Features,
    pool: Vec<Name>,
}

impl TermGen {
    pub fn new(seed: u64, features: Features) -> Self {
        let pool = POOL.iter().map(|s| Name::from_ident(s).expect("valid")).collect();
        TermGen { rng: ChaCha8Rng::seed_from_u64(seed), features, pool }
    }

    /// A closed term of size at most `max_size` (which must be at least 2).
    pub fn closed(&mut self, max_size: usize) -> Term {
        assert!(max_size >= 2, "no closed term has size 1 without constants");
        loop {
            let target = self.rng.gen_range(2..=max_size);
            let t = self.gen(target, &mut Vec::new());
            if t.size() <= max_size {
                return t;
            }
        }
    }

    fn pick_name(&mut self) -> Name {
        self.pool.choose(&mut self.rng).expect("nonempty pool").clone()
    }

    fn leaf(&mut self, scope: &[Name]) -> Term {
        let use_int = self.features.ints && (scope.is_empty() || self.rng.gen_bool(0.3));
        if use_int {
            Term::IntConst(self.rng.gen_range(0..4))
        } else if let Some(x) = scope.choose(&mut self.rng) {
            Term::Var(x.clone())
        } else {
            let x = self.pick_name();
            Term::lam(x.clone(), Term::Var(x))
        }
    }

    fn split(&mut self, budget: usize) -> (usize, usize) {
        if budget < 2 {
            return (1, 1);
        }
        let left = self.rng.gen_range(1..budget);
        (left, budget - left)
    }

    fn gen(&mut self, budget: usize, scope: &mut Vec<Name>) -> Term {
        if budget <= 1 {
            return self.leaf(scope);
        }
        let f = self.features;
        let mut shapes: Vec<(u32, u8)> = vec![(4, 0), (5, 1)];
        if budget >= 3 && f.let_ {
            shapes.push((2, 2));
        }
        if f.ints {
            shapes.push((1, 3));
        }
        if f.pairs {
            if budget >= 3 {
                shapes.push((2, 4));
            }
            shapes.push((1, 5));
        }
        if f.letrec && budget >= 3 {
            shapes.push((2, 6));
        }
        let total: u32 = shapes.iter().map(|s| s.0).sum();
        let mut roll = self.rng.gen_range(0..total);
        let shape = shapes
            .iter()
            .find(|(w, _)| {
                if roll < *w {
                    true
                } else {
                    roll -= w;
                    false
                }
            })
            .map(|s| s.1)
            .expect("roll is below the total");
        match shape {
            0 => {
                let x = self.pick_name();
                scope.push(x.clone());
                let body = self.gen(budget - 1, scope);
                scope.pop();
                Term::lam(x, body)
            }
            1 => {
                let (l, r) = self.split(budget - 1);
                Term::app(self.gen(l, scope), self.gen(r, scope))
            }
            2 => {
                let (l, r) = self.split(budget - 1);
                let x = self.pick_name();
                let rhs = self.gen(l, scope);
                scope.push(x.clone());
                let body = self.gen(r, scope);
                scope.pop();
                Term::let_(x, rhs, body)
            }
            3 => {
                let p = if self.rng.gen_bool(0.7) { Prim::Add1 } else { Prim::Sub1 };
                Term::prim(p, self.gen(budget - 1, scope))
            }
            4 => {
                let (l, r) = self.split(budget - 1);
                Term::cons(self.gen(l, scope), self.gen(r, scope))
            }
            5 => {
                let arg = self.gen(budget - 1, scope);
                if self.rng.gen_bool(0.5) {
                    Term::car(arg)
                } else {
                    Term::cdr(arg)
                }
            }
            _ => {
                let two = budget >= 4 && self.rng.gen_bool(0.4);
                let mut names = vec![self.pick_name()];
                if two {
                    let y = self.pick_name();
                    if y != names[0] {
                        names.push(y);
                    }
                }
                let depth = scope.len();
                scope.extend(names.iter().cloned());
                let mut left = budget - 1;
                let mut bs = Vec::new();
                for (i, x) in names.iter().enumerate() {
                    let remaining = names.len() - i;
                    let share = if remaining == 1 { left / 2 } else { left / 3 }.max(1);
                    left -= share.min(left - 1);
                    bs.push((x.clone(), self.gen(share, scope)));
                }
                let body = self.gen(left.max(1), scope);
                scope.truncate(depth);
                Term::letrec(bs, body)
            }
        }
    }
}

/// `count` closed terms of size at most `max_size`: two fifths pure λ, two
/// fifths with let, constants and pairs, the rest also with letrec.
pub fn corpus(seed: u64, count: usize, max_size: usize) -> Vec<Term> {
    let mut lambda = TermGen::new(seed, Features::LAMBDA);
    let mut extended = TermGen::new(seed.wrapping_add(1), Features::EXTENDED);
    let mut all = TermGen::new(seed.wrapping_add(2), Features::ALL);
    (0..count)
        .map(|i| match i % 5 {
            0 | 1 => lambda.closed(max_size),
            2 | 3 => extended.closed(max_size),
            _ => all.closed(max_size),
        })
        .collect()
}

fn binder(depth: usize) -> Name {
    Name::new("x", depth as u32).expect("valid base")
}

fn exact(size: usize, depth: usize, out: &mut Vec<Term>) {
    if size == 1 {
        out.extend((0..depth).map(|i| Term::Var(binder(i))));
        return;
    }
    let mut bodies = Vec::new();
    exact(size - 1, depth + 1, &mut bodies);
    out.extend(bodies.into_iter().map(|b| Term::lam(binder(depth), b)));
    for l in 1..size - 1 {
        let mut fs = Vec::new();
        exact(l, depth, &mut fs);
        if fs.is_empty() {
            continue;
        }
        let mut args = Vec::new();
        exact(size - 1 - l, depth, &mut args);
        for f in &fs {
            for a in &args {
                out.push(Term::app(f.clone(), a.clone()));
            }
        }
    }
}

/// Every closed pure λ-term of size at most `max_size`, one per α-class.
/// Binders are named by depth: `x`, `x1`, `x2`, ...
pub fn enumerate_closed(max_size: usize) -> Vec<Term> {
    let mut out = Vec::new();
    for size in 1..=max_size {
        exact(size, 0, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::free_vars;

    #[test]
    fn corpus_terms_are_closed_and_bounded() {
        for t in corpus(7, 200, 15) {
            assert!(free_vars(&t).is_empty(), "{t}");
            assert!(t.size() <= 15, "{t}");
        }
    }

    #[test]
    fn corpus_is_reproducible() {
        assert_eq!(corpus(3, 20, 12), corpus(3, 20, 12));
    }

    #[test]
    fn enumeration_counts() {
        // Closed λ-terms by size (variables, abstractions and applications
        // each count one): 0, 1, 2, 4, 13, 42, 139.
        let counts: Vec<usize> = (1..=7).map(|n| enumerate_closed(n).len()).collect();
        let per_size: Vec<usize> =
            counts.iter().enumerate().map(|(i, c)| c - if i == 0 { 0 } else { counts[i - 1] }).collect();
        assert_eq!(per_size, vec![0, 1, 2, 4, 13, 42, 139]);
        assert!(enumerate_closed(8).iter().all(|t| free_vars(t).is_empty()));
    }
}
