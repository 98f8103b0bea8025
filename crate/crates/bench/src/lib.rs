//! Workloads shared by the benchmarks.

use needle_core::corpus::corpus;
use needle_core::machine::{inject, run, RunOutcome};
use needle_core::{parse, Term};

/// Letrec-free corpus terms the machine finishes within `fuel` steps.
pub fn terminating(seed: u64, count: usize, max_size: usize, fuel: u64) -> Vec<Term> {
    corpus(seed, count * 3, max_size)
        .into_iter()
        .filter(|t| !t.contains_letrec())
        .filter(|t| {
            let c = inject(t).expect("corpus terms are closed");
            matches!(run(c, fuel).outcome, RunOutcome::Final(_))
        })
        .take(count)
        .collect()
}

/// `let x = (\z.z) \w.w in x (x (... (\v.v)))` with `k` uses of `x`.
pub fn shared(k: usize) -> Term {
    let mut body = String::from(r"\v.v");
    for _ in 0..k {
        body = format!("x ({body})");
    }
    parse(&format!(r"let x = (\z.z) \w.w in {body}")).expect("well formed")
}

/// Church numeral `n` applied to `add1` and `0`.
pub fn church(n: usize) -> Term {
    let mut body = String::from("z");
    for _ in 0..n {
        body = format!("s ({body})");
    }
    parse(&format!(r"(\s.\z.{body}) (\n.add1 n) 0")).expect("well formed")
}
