use std::collections::BTreeSet;

use crate::parser::Problem;
use crate::syntax::{Formula, FormulaKind, Relation};

fn binders(f: &Formula) -> usize {
    let mut n = 0;
    f.walk(&mut |g| {
        if matches!(g.kind(), FormulaKind::Down(..)) {
            n += 1;
        }
    });
    n
}

fn unary(g: &Formula) -> Vec<Formula> {
    let r = || Relation::forward("r");
    let mut out = vec![
        Formula::dia(r(), g.clone()),
        Formula::boxed(r(), g.clone()),
        Formula::exists(g.clone()),
        Formula::global(g.clone()),
        Formula::at("a", g.clone()),
        Formula::at_var("x", g.clone()),
    ];
    if binders(g) == 0 {
        out.push(Formula::down("x", g.clone()));
    }
    out
}

/// Every NNF formula over `p`, `'a`, and one variable `x` with at most two
/// nested operators from `∧ ∨ <r> [r] @ ↓ <E> [A]` and at most one binder,
/// as problems without assertions.
pub fn tiny_corpus() -> Vec<Problem> {
    let literals: Vec<Formula> = ["p", "'a", "x"]
        .iter()
        .flat_map(|s| {
            let f = match *s {
                "p" => Formula::prop("p"),
                "'a" => Formula::nom("a"),
                _ => Formula::var("x"),
            };
            [f.clone(), Formula::not(f)]
        })
        .collect();

    let pairs = |left: &[Formula], right: &[Formula], out: &mut Vec<Formula>| {
        for (i, g) in left.iter().enumerate() {
            for (j, h) in right.iter().enumerate() {
                if std::ptr::eq(left, right) && j <= i {
                    continue;
                }
                if g == h || binders(g) + binders(h) > 1 {
                    continue;
                }
                out.push(Formula::and(g.clone(), h.clone()));
                out.push(Formula::or(g.clone(), h.clone()));
            }
        }
    };

    let mut level1: Vec<Formula> = literals.iter().flat_map(unary).collect();
    pairs(&literals, &literals, &mut level1);

    let mut all: Vec<Formula> = literals.clone();
    all.extend(level1.iter().cloned());
    for g in &level1 {
        all.extend(unary(g));
    }
    let operands: Vec<Formula> = literals.iter().chain(&level1).cloned().collect();
    pairs(&operands, &operands, &mut all);

    let mut seen = BTreeSet::new();
    all.into_iter()
        .filter(|f| f.is_ground() && binders(f) <= 1)
        .filter(|f| seen.insert(f.clone()))
        .map(|f| Problem::new(vec![], f))
        .collect()
}
