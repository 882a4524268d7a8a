use super::{Formula, FormulaKind, Nominal, Term, Var};

/// `F[a/x]`: replace free occurrences of `x` by the nominal `a`.
pub fn subst_var(f: &Formula, x: &Var, a: &Nominal) -> Formula {
    use FormulaKind::*;
    match f.kind() {
        Var(y) if y == x => Formula::nom(a.clone()),
        True | False | Prop(_) | Nom(_) | Var(_) => f.clone(),
        Down(y, _) if y == x => f.clone(),
        At(Term::Var(y), g) if y == x => Formula::at(a.clone(), subst_var(g, x, a)),
        _ => rebuild(f, |g| subst_var(g, x, a)),
    }
}

/// `F[b/a]`: replace every occurrence of the nominal `a` by `b`.
pub fn subst_nom(f: &Formula, a: &Nominal, b: &Nominal) -> Formula {
    use FormulaKind::*;
    if !f.mentions_nominal(a) {
        return f.clone();
    }
    match f.kind() {
        Nom(c) if c == a => Formula::nom(b.clone()),
        At(Term::Nom(c), g) if c == a => Formula::at(b.clone(), subst_nom(g, a, b)),
        _ => rebuild(f, |g| subst_nom(g, a, b)),
    }
}

/// Applies `op` to each immediate subformula, keeping the outer operator.
pub(crate) fn rebuild(f: &Formula, mut op: impl FnMut(&Formula) -> Formula) -> Formula {
    use FormulaKind::*;
    match f.kind() {
        True | False | Prop(_) | Nom(_) | Var(_) => f.clone(),
        Not(g) => Formula::not(op(g)),
        And(a, b) => {
            let a = op(a);
            Formula::and(a, op(b))
        }
        Or(a, b) => {
            let a = op(a);
            Formula::or(a, op(b))
        }
        Diamond(r, n, g) => Diamond(r.clone(), *n, op(g)).into(),
        Box(r, n, g) => Box(r.clone(), *n, op(g)).into(),
        Exists(g) => Formula::exists(op(g)),
        Global(g) => Formula::global(op(g)),
        At(t, g) => Formula::at_term(t.clone(), op(g)),
        Down(x, g) => Formula::down(x.clone(), op(g)),
    }
}
