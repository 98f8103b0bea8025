use super::Term;

/// Renders a term in the concrete grammar. Lambdas, `let` and `letrec` are
/// parenthesized unless nothing can follow them.
pub fn print(t: &Term) -> String {
    let mut out = String::new();
    tail(t, &mut out);
    out
}

/// Renders a term in operand position: atoms and open-ended forms bare,
/// anything else parenthesized.
pub fn print_operand(t: &Term) -> String {
    let mut out = String::new();
    if matches!(t, Term::Lam(..) | Term::Let(..) | Term::Letrec(..)) {
        tail(t, &mut out);
    } else {
        atom(t, &mut out);
    }
    out
}

fn tail(t: &Term, out: &mut String) {
    match t {
        Term::Lam(x, b) => {
            out.push('\\');
            out.push_str(&x.to_string());
            out.push('.');
            tail(b, out);
        }
        Term::Let(x, rhs, body) => {
            out.push_str(&format!("let {x} = "));
            tail(rhs, out);
            out.push_str(" in ");
            tail(body, out);
        }
        Term::Letrec(bs, body) => {
            out.push_str("letrec ");
            for (i, (x, rhs)) in bs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("{x} = "));
                tail(rhs, out);
            }
            out.push_str(" in ");
            tail(body, out);
        }
        Term::App(..) => {
            let mut args = Vec::new();
            let mut head = t;
            while let Term::App(f, a) = head {
                args.push(a.as_ref());
                head = f;
            }
            atom(head, out);
            let last = args.len() - 1;
            for (i, a) in args.iter().rev().enumerate() {
                out.push(' ');
                if i == last && matches!(a, Term::Lam(..) | Term::Let(..) | Term::Letrec(..)) {
                    tail(a, out);
                } else {
                    atom(a, out);
                }
            }
        }
        Term::Cons(a, b) => {
            out.push_str("cons ");
            atom(a, out);
            out.push(' ');
            atom(b, out);
        }
        Term::Car(a) => {
            out.push_str("car ");
            atom(a, out);
        }
        Term::Cdr(a) => {
            out.push_str("cdr ");
            atom(a, out);
        }
        Term::PrimApp(p, a) => {
            out.push_str(p.keyword());
            out.push(' ');
            atom(a, out);
        }
        Term::Var(_) | Term::IntConst(_) | Term::PairVal(..) => atom(t, out),
    }
}

fn atom(t: &Term, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(&x.to_string()),
        Term::IntConst(n) => out.push_str(&n.to_string()),
        Term::PairVal(a, b) => out.push_str(&format!("<{a},{b}>")),
        _ => {
            out.push('(');
            tail(t, out);
            out.push(')');
        }
    }
}
