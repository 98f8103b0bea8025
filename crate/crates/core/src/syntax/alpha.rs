use super::{Name, Term};

/// Binder scopes shared by both sides. Each scope holds the names bound on
/// the left and on the right at the same positions.
struct Scopes<'a> {
    frames: Vec<(Vec<&'a Name>, Vec<&'a Name>)>,
}

enum Lookup {
    Bound(usize, usize),
    Free,
}

impl<'a> Scopes<'a> {
    fn left(&self, x: &Name) -> Lookup {
        self.find(x, false)
    }

    fn right(&self, x: &Name) -> Lookup {
        self.find(x, true)
    }

    fn find(&self, x: &Name, right: bool) -> Lookup {
        for (depth, frame) in self.frames.iter().rev().enumerate() {
            let side = if right { &frame.1 } else { &frame.0 };
            if let Some(pos) = side.iter().position(|n| *n == x) {
                return Lookup::Bound(depth, pos);
            }
        }
        Lookup::Free
    }

    fn same_var(&self, a: &Name, b: &Name) -> bool {
        match (self.left(a), self.right(b)) {
            (Lookup::Bound(d1, p1), Lookup::Bound(d2, p2)) => d1 == d2 && p1 == p2,
            (Lookup::Free, Lookup::Free) => a == b,
            _ => false,
        }
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_equal(t1: &Term, t2: &Term) -> bool {
    eq(t1, t2, &mut Scopes { frames: Vec::new() }, false)
}

/// Like [`alpha_equal`], but letrec bindings may appear in any order.
pub fn alpha_equal_up_to_binding_order(t1: &Term, t2: &Term) -> bool {
    eq(t1, t2, &mut Scopes { frames: Vec::new() }, true)
}

fn eq<'a>(t1: &'a Term, t2: &'a Term, sc: &mut Scopes<'a>, permute: bool) -> bool {
    match (t1, t2) {
        (Term::Var(a), Term::Var(b)) => sc.same_var(a, b),
        (Term::IntConst(a), Term::IntConst(b)) => a == b,
        (Term::PairVal(a1, b1), Term::PairVal(a2, b2)) => sc.same_var(a1, a2) && sc.same_var(b1, b2),
        (Term::Lam(x, b1), Term::Lam(y, b2)) => {
            sc.frames.push((vec![x], vec![y]));
            let r = eq(b1, b2, sc, permute);
            sc.frames.pop();
            r
        }
        (Term::App(a1, b1), Term::App(a2, b2)) | (Term::Cons(a1, b1), Term::Cons(a2, b2)) => {
            eq(a1, a2, sc, permute) && eq(b1, b2, sc, permute)
        }
        (Term::PrimApp(p, a), Term::PrimApp(q, b)) => p == q && eq(a, b, sc, permute),
        (Term::Car(a), Term::Car(b)) | (Term::Cdr(a), Term::Cdr(b)) => eq(a, b, sc, permute),
        (Term::Let(x, r1, b1), Term::Let(y, r2, b2)) => {
            if !eq(r1, r2, sc, permute) {
                return false;
            }
            sc.frames.push((vec![x], vec![y]));
            let r = eq(b1, b2, sc, permute);
            sc.frames.pop();
            r
        }
        (Term::Letrec(bs1, body1), Term::Letrec(bs2, body2)) => {
            if bs1.len() != bs2.len() {
                return false;
            }
            if !permute {
                return letrec_eq(bs1, body1, bs2.iter().collect(), body2, sc, permute);
            }
            let shapes1: Vec<String> = bs1.iter().map(|(_, t)| shape(t)).collect();
            let shapes2: Vec<String> = bs2.iter().map(|(_, t)| shape(t)).collect();
            let mut chosen = Vec::with_capacity(bs2.len());
            let mut used = vec![false; bs2.len()];
            search(bs1, body1, bs2, body2, &shapes1, &shapes2, &mut chosen, &mut used, sc)
        }
        _ => false,
    }
}

#[allow(clippy::too_many_arguments)]
fn search<'a>(
    bs1: &'a [(Name, Term)],
    body1: &'a Term,
    bs2: &'a [(Name, Term)],
    body2: &'a Term,
    shapes1: &[String],
    shapes2: &[String],
    chosen: &mut Vec<&'a (Name, Term)>,
    used: &mut Vec<bool>,
    sc: &mut Scopes<'a>,
) -> bool {
    let i = chosen.len();
    if i == bs1.len() {
        return letrec_eq(bs1, body1, chosen.clone(), body2, sc, true);
    }
    for j in 0..bs2.len() {
        if used[j] || shapes1[i] != shapes2[j] {
            continue;
        }
        used[j] = true;
        chosen.push(&bs2[j]);
        if search(bs1, body1, bs2, body2, shapes1, shapes2, chosen, used, sc) {
            return true;
        }
        chosen.pop();
        used[j] = false;
    }
    false
}

fn letrec_eq<'a>(
    bs1: &'a [(Name, Term)],
    body1: &'a Term,
    bs2: Vec<&'a (Name, Term)>,
    body2: &'a Term,
    sc: &mut Scopes<'a>,
    permute: bool,
) -> bool {
    sc.frames.push((bs1.iter().map(|(x, _)| x).collect(), bs2.iter().map(|(x, _)| x).collect()));
    let r = bs1
        .iter()
        .zip(bs2.iter())
        .all(|((_, a), (_, b))| eq(a, b, sc, permute))
        && eq(body1, body2, sc, permute);
    sc.frames.pop();
    r
}

/// The term with every name erased. Equal shapes are necessary for
/// alpha-equality up to binding order, so this prunes the permutation search.
fn shape(t: &Term) -> String {
    let mut out = String::new();
    shape_into(t, &mut out);
    out
}

fn shape_into(t: &Term, out: &mut String) {
    match t {
        Term::Var(_) => out.push('v'),
        Term::IntConst(n) => out.push_str(&format!("#{n}")),
        Term::PairVal(..) => out.push('p'),
        Term::Lam(_, b) => {
            out.push('L');
            shape_into(b, out);
        }
        Term::App(a, b) => {
            out.push('(');
            shape_into(a, out);
            shape_into(b, out);
            out.push(')');
        }
        Term::Cons(a, b) => {
            out.push('C');
            shape_into(a, out);
            shape_into(b, out);
        }
        Term::PrimApp(p, b) => {
            out.push_str(p.keyword());
            shape_into(b, out);
        }
        Term::Car(b) => {
            out.push('A');
            shape_into(b, out);
        }
        Term::Cdr(b) => {
            out.push('D');
            shape_into(b, out);
        }
        Term::Let(_, a, b) => {
            out.push('T');
            shape_into(a, out);
            shape_into(b, out);
        }
        // Inner letrecs may be permuted too, so their bindings are sorted.
        Term::Letrec(bs, b) => {
            let mut parts: Vec<String> = bs.iter().map(|(_, t)| shape(t)).collect();
            parts.sort();
            out.push_str(&format!("R[{}]", parts.join(",")));
            shape_into(b, out);
        }
    }
}
