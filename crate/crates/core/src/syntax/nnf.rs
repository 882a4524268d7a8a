use super::{Formula, FormulaKind};

/// Negation normal form: negation only on propositions, nominals and variables.
pub fn nnf(f: &Formula) -> Formula {
    pos(f)
}

fn pos(f: &Formula) -> Formula {
    use FormulaKind::*;
    match f.kind() {
        True | False | Prop(_) | Nom(_) | Var(_) => f.clone(),
        Not(g) => neg(g),
        And(a, b) => Formula::and(pos(a), pos(b)),
        Or(a, b) => Formula::or(pos(a), pos(b)),
        Diamond(r, n, g) => Diamond(r.clone(), *n, pos(g)).into(),
        Box(r, n, g) => Box(r.clone(), *n, pos(g)).into(),
        Exists(g) => Formula::exists(pos(g)),
        Global(g) => Formula::global(pos(g)),
        At(t, g) => Formula::at_term(t.clone(), pos(g)),
        Down(x, g) => Formula::down(x.clone(), pos(g)),
    }
}

fn neg(f: &Formula) -> Formula {
    use FormulaKind::*;
    match f.kind() {
        True => Formula::ff(),
        False => Formula::tt(),
        Prop(_) | Nom(_) | Var(_) => Formula::not(f.clone()),
        Not(g) => pos(g),
        And(a, b) => Formula::or(neg(a), neg(b)),
        Or(a, b) => Formula::and(neg(a), neg(b)),
        Diamond(r, n, g) => Box(r.clone(), *n, neg(g)).into(),
        Box(r, n, g) => Diamond(r.clone(), *n, neg(g)).into(),
        Exists(g) => Formula::global(neg(g)),
        Global(g) => Formula::exists(neg(g)),
        At(t, g) => Formula::at_term(t.clone(), neg(g)),
        Down(x, g) => Formula::down(x.clone(), neg(g)),
    }
}

pub fn is_nnf(f: &Formula) -> bool {
    match f.kind() {
        FormulaKind::Not(g) => {
            matches!(g.kind(), FormulaKind::Prop(_) | FormulaKind::Nom(_) | FormulaKind::Var(_))
        }
        _ => f.children().into_iter().all(is_nnf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn de_morgan() {
        assert_eq!(nnf(&f("!(p & q)")), f("!p | !q"));
    }

    #[test]
    fn modal_duality() {
        assert_eq!(nnf(&f("!<r> p")), f("[r] !p"));
        assert_eq!(nnf(&f("!<r>^2 p")), f("[r]^2 !p"));
        assert_eq!(nnf(&f("![r-]^1 p")), f("<r->^1 !p"));
        assert_eq!(nnf(&f("!<E> [A] p")), f("[A] <E> !p"));
    }

    #[test]
    fn binder_is_self_dual() {
        assert_eq!(nnf(&f("!down x . (x & p)")), f("down x . (!x | !p)"));
        assert_eq!(nnf(&f("!@'a p")), f("@'a !p"));
    }

    #[test]
    fn constants() {
        assert_eq!(nnf(&f("!true")), f("false"));
        assert_eq!(nnf(&f("!!p")), f("p"));
    }
}
