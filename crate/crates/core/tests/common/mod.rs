//! Written-out expansions of the functor and homotopy relations.

use floer_workbench::moduli_trees::RelationTerm;

/// Compositions of `k` from cut masks over the `k − 1` gaps.
pub fn cut_compositions(k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << (k - 1))
        .map(|mask| {
            let mut parts = Vec::new();
            let mut run = 1;
            for gap in 0..k - 1 {
                if mask >> gap & 1 == 1 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            parts
        })
        .collect()
}

pub fn args(lo: usize, hi: usize) -> String {
    (lo..=hi).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
}

fn blocks(parts: &[usize], head: impl Fn(usize) -> &'static str) -> String {
    let mut out = Vec::new();
    let mut pos = 1;
    for (b, s) in parts.iter().enumerate() {
        out.push(format!("{}({})", head(b + 1), args(pos, pos + s - 1)));
        pos += s;
    }
    format!("m({})", out.join(","))
}

/// Expressions of the functor relation at arity `k`, written out.
pub fn functor_expansion(k: usize) -> Vec<String> {
    let mut out = Vec::new();
    for start in 1..=k {
        for end in start..=k {
            let mut items: Vec<String> = (1..start).map(|i| format!("x{i}")).collect();
            items.push(format!("m({})", args(start, end)));
            items.extend((end + 1..=k).map(|i| format!("x{i}")));
            out.push(format!("f({})", items.join(",")));
        }
    }
    out.extend(cut_compositions(k).iter().map(|p| blocks(p, |_| "f")));
    out
}

pub fn homotopy_expansion(k: usize) -> Vec<String> {
    let mut out = vec![format!("-f({})", args(1, k)), format!("g({})", args(1, k))];
    for e in functor_expansion(k).into_iter().filter(|e| e.starts_with("f(")) {
        out.push(format!("h{}", &e[1..]));
    }
    for p in cut_compositions(k) {
        for marked in 1..=p.len() {
            out.push(blocks(&p, |b| if b < marked { "f" } else if b == marked { "h" } else { "g" }));
        }
    }
    out
}

pub fn render(term: &RelationTerm, k: usize) -> String {
    let inserted = |head: &str, n: usize, m: usize| {
        let mut items: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        items.push(format!("m({})", args(n + 1, n + m)));
        items.extend((n + m + 1..=k).map(|i| format!("x{i}")));
        format!("{head}({})", items.join(","))
    };
    match term {
        RelationTerm::FunctorAfterProduct { n, m } => inserted("f", *n, *m),
        RelationTerm::HomotopyAfterProduct { n, m } => inserted("h", *n, *m),
        RelationTerm::ProductAfterFunctors { parts } => blocks(parts, |_| "f"),
        RelationTerm::ProductAfterHomotopy { parts, marked } => {
            let marked = *marked;
            blocks(parts, move |b| if b < marked { "f" } else if b == marked { "h" } else { "g" })
        }
        RelationTerm::EndpointSource => format!("-f({})", args(1, k)),
        RelationTerm::EndpointTarget => format!("g({})", args(1, k)),
    }
}
