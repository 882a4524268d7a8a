use std::collections::BTreeSet;

use super::{Formula, FormulaKind, RelSym, Relation};

/// Subformulas of `f` relative to a relation vocabulary: ordinary subterms, and
/// for every `□_R G` also `□_S G` for each forward or backward `S` over `rels`.
pub fn subformula_closure(f: &Formula, rels: &BTreeSet<RelSym>) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    go(f, rels, &mut out);
    out
}

fn go(f: &Formula, rels: &BTreeSet<RelSym>, out: &mut BTreeSet<Formula>) {
    if !out.insert(f.clone()) {
        return;
    }
    if let FormulaKind::Box(_, None, body) = f.kind() {
        for sym in rels {
            for rel in [Relation::forward(sym.clone()), Relation::backward(sym.clone())] {
                out.insert(Formula::boxed(rel, body.clone()));
            }
        }
    }
    for c in f.children() {
        go(c, rels, out);
    }
}

/// The universal members (`□_R G`, `A G`) of a closure.
pub fn universal_subformulas(closure: &BTreeSet<Formula>) -> BTreeSet<Formula> {
    closure.iter().filter(|g| g.is_universal()).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn rels(names: &[&str]) -> BTreeSet<RelSym> {
        names.iter().map(|n| RelSym::new(n)).collect()
    }

    #[test]
    fn box_expands_over_vocabulary() {
        let got = subformula_closure(&parse_formula("[r] p").unwrap(), &rels(&["r", "s"]));
        let want: BTreeSet<Formula> = ["[r] p", "[r-] p", "[s] p", "[s-] p", "p"]
            .iter()
            .map(|s| parse_formula(s).unwrap())
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn atom_closure() {
        let got = subformula_closure(&parse_formula("p").unwrap(), &rels(&["r"]));
        assert_eq!(got.len(), 1);
    }

    #[test]
    fn bound_on_nested_boxes() {
        let f = parse_formula("[r] [r] p").unwrap();
        let got = subformula_closure(&f, &rels(&["r", "s"]));
        assert_eq!(got.len(), 9);
        assert!(got.len() <= 2 * 2 * f.size());
    }
}
