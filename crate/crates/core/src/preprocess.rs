//! Graded-modality elimination and the binder translation that maps the
//! box-down-box-free fragment into the down-box-free one.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::fragment::{classify_formula, detect_box_down_box, detect_down_box, FragmentVerdict};
use crate::parser::Problem;
use crate::syntax::{nnf, subst_var, Formula, FormulaKind, Nominal, Relation, Var};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("formula is outside the supported fragment: {}", describe(.0))]
    Fragment(FragmentVerdict),
    #[error("translation input still contains graded modalities")]
    Graded,
    #[error("translation input contains a binder between two universal operators")]
    BoxDownBox,
    #[error("internal error: translated formula still has a binder over a universal operator")]
    Residual,
}

fn describe(v: &FragmentVerdict) -> String {
    let parts: Vec<String> = v.rejections().map(ToString::to_string).collect();
    parts.join(", ")
}

/// Emits `_1`, `_2`, … skipping names already in use.
#[derive(Clone, Debug, Default)]
pub struct FreshNominalSource {
    counter: usize,
    prefix: String,
    avoid: BTreeSet<Nominal>,
}

impl FreshNominalSource {
    pub fn new(prefix: &str, avoid: BTreeSet<Nominal>) -> Self {
        FreshNominalSource { counter: 0, prefix: prefix.to_string(), avoid }
    }

    pub fn avoiding(f: &Formula) -> Self {
        FreshNominalSource::new("_", f.nominals())
    }

    pub fn next(&mut self) -> Nominal {
        loop {
            self.counter += 1;
            let a = Nominal::new(&format!("{}{}", self.prefix, self.counter));
            if self.avoid.insert(a.clone()) {
                return a;
            }
        }
    }
}

/// Fresh variable names `_v1`, `_v2`, …
#[derive(Clone, Debug)]
pub struct FreshVars {
    counter: usize,
    avoid: BTreeSet<Var>,
}

impl FreshVars {
    pub fn avoiding(f: &Formula) -> Self {
        FreshVars { counter: 0, avoid: f.all_vars() }
    }

    pub fn next(&mut self) -> Var {
        loop {
            self.counter += 1;
            let x = Var::new(&format!("_v{}", self.counter));
            if self.avoid.insert(x.clone()) {
                return x;
            }
        }
    }
}

/// `◇ⁿ_R F` as a chain of `n + 1` diamonds naming pairwise distinct successors.
///
/// Conjunctions nest to the left: `((F ∧ ¬y₁) ∧ ¬y₂) ∧ ↓y₃. …`.
pub fn expand_graded_diamond(rel: &Relation, n: u32, body: &Formula, vars: &mut FreshVars) -> Formula {
    if n == 0 {
        return Formula::dia(rel.clone(), body.clone());
    }
    let x = vars.next();
    let ys: Vec<Var> = (0..n).map(|_| vars.next()).collect();
    let mut inner: Option<Formula> = None;
    for i in (0..n as usize).rev() {
        let mut conj = vec![body.clone()];
        conj.extend(ys[..=i].iter().map(|y| Formula::not(Formula::var(y.clone()))));
        conj.extend(inner.take());
        let step = Formula::at_var(x.clone(), Formula::dia(rel.clone(), Formula::and_all(conj)));
        inner = Some(Formula::down(ys[i].clone(), step));
    }
    let first = Formula::and(body.clone(), inner.expect("n >= 1"));
    Formula::down(x, Formula::dia(rel.clone(), first))
}

/// `□ⁿ_R F`: either every successor satisfies `F`, or there are `n` named
/// successors outside of which every successor satisfies `F`.
pub fn expand_graded_box(rel: &Relation, n: u32, body: &Formula, vars: &mut FreshVars) -> Formula {
    let plain = Formula::boxed(rel.clone(), body.clone());
    if n == 0 {
        return plain;
    }
    let x = vars.next();
    let ys: Vec<Var> = (0..n).map(|_| vars.next()).collect();
    let exceptions = ys.iter().map(|y| Formula::var(y.clone()));
    let last = Formula::boxed(rel.clone(), Formula::or_all(std::iter::once(body.clone()).chain(exceptions)));
    let mut inner = Formula::at_var(x.clone(), last);
    for (i, y) in ys.iter().enumerate().rev() {
        inner = Formula::down(y.clone(), inner);
        if i > 0 {
            inner = Formula::at_var(x.clone(), Formula::dia(rel.clone(), inner));
        }
    }
    Formula::or(plain, Formula::down(x, Formula::dia(rel.clone(), inner)))
}

/// Replaces every graded modality, innermost first.
pub fn expand_all_graded(f: &Formula, vars: &mut FreshVars) -> Formula {
    let rebuilt = crate::syntax::rebuild_children(f, |g| expand_all_graded(g, vars));
    match rebuilt.kind() {
        FormulaKind::Diamond(r, Some(n), body) => expand_graded_diamond(r, *n, body, vars),
        FormulaKind::Box(r, Some(n), body) => expand_graded_box(r, *n, body, vars),
        _ => rebuilt,
    }
}

/// The binder translation: a binder whose scope holds a universal operator is
/// replaced by a fresh nominal naming the current state.
pub fn tau(f: &Formula) -> Result<Formula, PreprocessError> {
    tau_with(f, &mut FreshNominalSource::avoiding(f))
}

pub fn tau_with(f: &Formula, fresh: &mut FreshNominalSource) -> Result<Formula, PreprocessError> {
    if f.is_graded() {
        return Err(PreprocessError::Graded);
    }
    if detect_box_down_box(f).0 {
        return Err(PreprocessError::BoxDownBox);
    }
    Ok(translate(f, fresh))
}

fn translate(f: &Formula, fresh: &mut FreshNominalSource) -> Formula {
    match f.kind() {
        FormulaKind::And(a, b) => {
            let a = translate(a, fresh);
            Formula::and(a, translate(b, fresh))
        }
        FormulaKind::Or(a, b) => {
            let a = translate(a, fresh);
            Formula::or(a, translate(b, fresh))
        }
        FormulaKind::At(t, g) => Formula::at_term(t.clone(), translate(g, fresh)),
        FormulaKind::Diamond(r, None, g) => Formula::dia(r.clone(), translate(g, fresh)),
        FormulaKind::Exists(g) => Formula::exists(translate(g, fresh)),
        FormulaKind::Down(x, g) if g.contains_universal() => {
            let b = fresh.next();
            let body = translate(&subst_var(g, x, &b), fresh);
            Formula::and(Formula::nom(b), body)
        }
        _ => f.clone(),
    }
}

/// NNF, graded expansion, NNF again, then the binder translation.
pub fn preprocess(p: &Problem) -> Result<Problem, PreprocessError> {
    let f = nnf(&p.formula);
    let verdict = classify_formula(&f);
    if !verdict.accepted() {
        return Err(PreprocessError::Fragment(verdict));
    }
    let expanded = nnf(&expand_all_graded(&f, &mut FreshVars::avoiding(&f)));
    let verdict = classify_formula(&expanded);
    if !verdict.accepted() {
        return Err(PreprocessError::Fragment(verdict));
    }
    let out = tau_with(&expanded, &mut FreshNominalSource::avoiding(&expanded))?;
    if detect_down_box(&out).0 {
        return Err(PreprocessError::Residual);
    }
    Ok(p.with_formula(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, parse_formula};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn tau_example() {
        let input = f("[A] down x . <r> x & (down y . [r] y | down z . [A] z)");
        let want = f("[A] down x . <r> x & ('_1 & [r] '_1 | '_2 & [A] '_2)");
        assert_eq!(tau(&input).unwrap(), want);
    }

    #[test]
    fn tau_identity_cases() {
        for s in ["down x . <r> x", "p", "[r] down x . <r> x", "<E> @'a !q"] {
            assert_eq!(tau(&f(s)).unwrap(), f(s));
        }
    }

    #[test]
    fn tau_nested_binders() {
        let got = tau(&f("down x . <r> down y . (@x [r] y)")).unwrap();
        assert_eq!(got, f("'_1 & <r> ('_2 & @'_1 [r] '_2)"));
    }

    #[test]
    fn tau_refuses_bad_input() {
        assert!(matches!(tau(&f("[r]^1 p")), Err(PreprocessError::Graded)));
        assert!(matches!(tau(&f("[A] down x . [r] x")), Err(PreprocessError::BoxDownBox)));
    }

    #[test]
    fn fresh_nominals_skip_used_names() {
        let mut src = FreshNominalSource::avoiding(&f("'_1 & '_3"));
        assert_eq!(src.next(), Nominal::new("_2"));
        assert_eq!(src.next(), Nominal::new("_4"));
    }

    #[test]
    fn graded_diamond_shapes() {
        let r = Relation::forward("r");
        let p = f("p");
        let mut v = FreshVars::avoiding(&p);
        assert_eq!(expand_graded_diamond(&r, 0, &p, &mut v), f("<r> p"));
        let mut v = FreshVars::avoiding(&p);
        assert_eq!(
            expand_graded_diamond(&r, 1, &p, &mut v),
            f("down _v1 . <r> (p & down _v2 . @_v1 <r> (p & !_v2))")
        );
        let mut v = FreshVars::avoiding(&p);
        assert_eq!(
            expand_graded_diamond(&r, 2, &p, &mut v),
            f("down _v1 . <r> (p & down _v2 . @_v1 <r> (p & !_v2 & down _v3 . @_v1 <r> (p & !_v2 & !_v3)))")
        );
    }

    #[test]
    fn graded_box_shapes() {
        let r = Relation::forward("r");
        let p = f("p");
        let mut v = FreshVars::avoiding(&p);
        assert_eq!(expand_graded_box(&r, 0, &p, &mut v), f("[r] p"));
        let mut v = FreshVars::avoiding(&p);
        assert_eq!(
            expand_graded_box(&r, 1, &p, &mut v),
            f("[r] p | down _v1 . <r> down _v2 . @_v1 [r] (p | _v2)")
        );
        let mut v = FreshVars::avoiding(&p);
        assert_eq!(
            expand_graded_box(&r, 2, &p, &mut v),
            f("[r] p | down _v1 . <r> down _v2 . @_v1 <r> down _v3 . @_v1 [r] (p | _v2 | _v3)")
        );
    }

    #[test]
    fn graded_box_then_tau() {
        let p = parse("formula: [r]^1 p;").unwrap();
        let got = preprocess(&p).unwrap();
        assert_eq!(got.formula, f("[r] p | '_1 & <r> ('_2 & @'_1 [r] (p | '_2))"));
    }

    #[test]
    fn sibling_formula_unchanged() {
        let p = parse("formula: [A] down x . <r-> <r> !x;").unwrap();
        assert_eq!(preprocess(&p).unwrap(), p);
    }

    #[test]
    fn rejection_carries_witnesses() {
        let p = parse("formula: [g] [u]^1 false;").unwrap();
        match preprocess(&p) {
            Err(PreprocessError::Fragment(v)) => assert!(!v.graded_ok),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_grades_expand_innermost_first() {
        let p = parse("formula: <r>^1 <s>^1 q;").unwrap();
        let out = preprocess(&p).unwrap();
        assert!(!out.formula.is_graded());
        assert!(!detect_down_box(&out.formula).0);
    }
}
