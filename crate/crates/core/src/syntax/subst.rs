use std::collections::BTreeMap;

use super::{fresh, Name, NameSet, Term};

pub fn free_vars(t: &Term) -> NameSet {
    let mut out = NameSet::new();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a Name>, out: &mut NameSet) {
    let note = |x: &Name, bound: &Vec<&Name>, out: &mut NameSet| {
        if !bound.contains(&x) {
            out.insert(x.clone());
        }
    };
    match t {
        Term::Var(x) => note(x, bound, out),
        Term::PairVal(a, b) => {
            note(a, bound, out);
            note(b, bound, out);
        }
        Term::IntConst(_) => {}
        Term::Lam(x, b) => {
            bound.push(x);
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::PrimApp(_, b) | Term::Car(b) | Term::Cdr(b) => collect_free(b, bound, out),
        Term::App(a, b) | Term::Cons(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Term::Let(x, rhs, body) => {
            collect_free(rhs, bound, out);
            bound.push(x);
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::Letrec(bs, body) => {
            let n = bs.len();
            bound.extend(bs.iter().map(|(x, _)| x));
            for (_, rhs) in bs {
                collect_free(rhs, bound, out);
            }
            collect_free(body, bound, out);
            bound.truncate(bound.len() - n);
        }
    }
}

fn occurs_free(t: &Term, x: &Name) -> bool {
    match t {
        Term::Var(y) => y == x,
        Term::PairVal(a, b) => a == x || b == x,
        Term::IntConst(_) => false,
        Term::Lam(y, b) => y != x && occurs_free(b, x),
        Term::PrimApp(_, b) | Term::Car(b) | Term::Cdr(b) => occurs_free(b, x),
        Term::App(a, b) | Term::Cons(a, b) => occurs_free(a, x) || occurs_free(b, x),
        Term::Let(y, rhs, body) => occurs_free(rhs, x) || (y != x && occurs_free(body, x)),
        Term::Letrec(bs, body) => {
            !bs.iter().any(|(y, _)| y == x)
                && (bs.iter().any(|(_, t)| occurs_free(t, x)) || occurs_free(body, x))
        }
    }
}

/// Capture-avoiding `t[s/x]`.
pub fn subst(t: &Term, x: &Name, s: &Term) -> Term {
    let mut map = BTreeMap::new();
    map.insert(x.clone(), s.clone());
    subst_many(t, &map)
}

/// Simultaneous capture-avoiding substitution.
pub fn subst_many(t: &Term, map: &BTreeMap<Name, Term>) -> Term {
    if map.is_empty() {
        return t.clone();
    }
    let mut fvs = NameSet::new();
    for s in map.values() {
        fvs.extend(free_vars(s));
    }
    go(t, map, &fvs)
}

/// Simultaneous renaming of free variables, capture-avoiding.
pub fn rename_all(t: &Term, map: &BTreeMap<Name, Name>) -> Term {
    let map: BTreeMap<Name, Term> = map
        .iter()
        .map(|(k, v)| (k.clone(), Term::Var(v.clone())))
        .collect();
    subst_many(t, &map)
}

fn restrict<'m>(map: &'m BTreeMap<Name, Term>, bound: &[&Name]) -> std::borrow::Cow<'m, BTreeMap<Name, Term>> {
    if bound.iter().any(|b| map.contains_key(*b)) {
        let mut m = map.clone();
        for b in bound {
            m.remove(*b);
        }
        std::borrow::Cow::Owned(m)
    } else {
        std::borrow::Cow::Borrowed(map)
    }
}

fn live(map: &BTreeMap<Name, Term>, t: &Term) -> bool {
    map.keys().any(|k| occurs_free(t, k))
}

fn go(t: &Term, map: &BTreeMap<Name, Term>, fvs: &NameSet) -> Term {
    if map.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(y) => map.get(y).cloned().unwrap_or_else(|| t.clone()),
        Term::IntConst(_) => t.clone(),
        Term::PairVal(a, b) => subst_pair(a, b, map),
        Term::Lam(y, body) => {
            let (y2, body2) = under_binder(y, body, map, fvs);
            Term::Lam(y2, Box::new(body2))
        }
        Term::App(a, b) => Term::app(go(a, map, fvs), go(b, map, fvs)),
        Term::Cons(a, b) => Term::cons(go(a, map, fvs), go(b, map, fvs)),
        Term::PrimApp(p, b) => Term::prim(*p, go(b, map, fvs)),
        Term::Car(b) => Term::car(go(b, map, fvs)),
        Term::Cdr(b) => Term::cdr(go(b, map, fvs)),
        Term::Let(y, rhs, body) => {
            let rhs2 = go(rhs, map, fvs);
            let (y2, body2) = under_binder(y, body, map, fvs);
            Term::let_(y2, rhs2, body2)
        }
        Term::Letrec(bs, body) => {
            let names: Vec<&Name> = bs.iter().map(|(y, _)| y).collect();
            let map = restrict(map, &names);
            if map.is_empty() || !live(&map, t) {
                return t.clone();
            }
            // Rename every binder that would capture a free name of the
            // replacement.
            let mut avoid = fvs.clone();
            avoid.extend(free_vars(t));
            avoid.extend(names.iter().map(|n| (*n).clone()));
            let mut renaming = BTreeMap::new();
            for y in &names {
                if fvs.contains(*y) {
                    let y2 = fresh(y, &avoid);
                    avoid.insert(y2.clone());
                    renaming.insert((*y).clone(), Term::Var(y2));
                }
            }
            let rename = |n: &Name| match renaming.get(n) {
                Some(Term::Var(m)) => m.clone(),
                _ => n.clone(),
            };
            let mut inner = map.into_owned();
            inner.extend(renaming.clone());
            let mut inner_fvs = fvs.clone();
            for v in renaming.values() {
                if let Term::Var(m) = v {
                    inner_fvs.insert(m.clone());
                }
            }
            let bs2 = bs
                .iter()
                .map(|(y, rhs)| (rename(y), go(rhs, &inner, &inner_fvs)))
                .collect();
            Term::letrec(bs2, go(body, &inner, &inner_fvs))
        }
    }
}

fn under_binder(y: &Name, body: &Term, map: &BTreeMap<Name, Term>, fvs: &NameSet) -> (Name, Term) {
    let map = restrict(map, &[y]);
    if map.is_empty() || !live(&map, body) {
        return (y.clone(), body.clone());
    }
    if fvs.contains(y) {
        let mut avoid = fvs.clone();
        avoid.extend(free_vars(body));
        avoid.extend(map.keys().cloned());
        let y2 = fresh(y, &avoid);
        let mut inner = map.into_owned();
        inner.insert(y.clone(), Term::Var(y2.clone()));
        let mut inner_fvs = fvs.clone();
        inner_fvs.insert(y2.clone());
        (y2, go(body, &inner, &inner_fvs))
    } else {
        (y.clone(), go(body, &map, fvs))
    }
}

/// `<a,b>[s/x]`. A pair holds names only, so a non-variable replacement is
/// shared through a fresh binder: `(\z.<z,b>) s`.
fn subst_pair(a: &Name, b: &Name, map: &BTreeMap<Name, Term>) -> Term {
    let mut avoid = NameSet::new();
    avoid.insert(a.clone());
    avoid.insert(b.clone());
    for (k, v) in map {
        avoid.insert(k.clone());
        avoid.extend(free_vars(v));
    }
    let mut wraps: Vec<(Name, Term)> = Vec::new();
    let mut component = |n: &Name, wraps: &mut Vec<(Name, Term)>| -> Name {
        match map.get(n) {
            None => n.clone(),
            Some(Term::Var(m)) => m.clone(),
            Some(s) => {
                if let Some((z, _)) = wraps.iter().find(|(_, t)| t == s) {
                    return z.clone();
                }
                let z = fresh(&Name::new("z", 0).expect("valid base"), &avoid);
                avoid.insert(z.clone());
                wraps.push((z.clone(), s.clone()));
                z
            }
        }
    };
    let a2 = component(a, &mut wraps);
    let b2 = component(b, &mut wraps);
    let mut out = Term::PairVal(a2, b2);
    for (z, s) in wraps.into_iter().rev() {
        out = Term::app(Term::lam(z, out), s);
    }
    out
}
