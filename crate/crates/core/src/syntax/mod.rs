//! Formulas, relations and assertions.

mod closure;
mod nnf;
mod subst;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use closure::{subformula_closure, universal_subformulas};
pub use nnf::{is_nnf, nnf};
pub use subst::{subst_nom, subst_var};
pub(crate) use subst::rebuild as rebuild_children;

macro_rules! symbol {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: &str) -> Self {
                $name(Arc::from(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            /// Names starting with `_` are reserved for generated symbols.
            pub fn is_reserved(&self) -> bool {
                self.0.starts_with('_')
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }
    };
}

symbol!(
    /// Propositional letter.
    Prop
);
symbol!(
    /// Name of a single state.
    Nominal
);
symbol!(
    /// State variable, bound by `↓`.
    Var
);
symbol!(RelSym);

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Nominal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "'{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for RelSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

/// A relation symbol or its converse.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub sym: RelSym,
    pub dir: Direction,
}

impl Relation {
    pub fn forward(sym: impl Into<RelSym>) -> Self {
        Relation { sym: sym.into(), dir: Direction::Forward }
    }

    pub fn backward(sym: impl Into<RelSym>) -> Self {
        Relation { sym: sym.into(), dir: Direction::Backward }
    }

    pub fn inv(&self) -> Self {
        let dir = match self.dir {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        };
        Relation { sym: self.sym.clone(), dir }
    }

    pub fn is_forward(&self) -> bool {
        self.dir == Direction::Forward
    }
}

impl From<&str> for Relation {
    fn from(s: &str) -> Self {
        match s.strip_suffix('-') {
            Some(base) => Relation::backward(base),
            None => Relation::forward(s),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dir {
            Direction::Forward => write!(f, "{}", self.sym),
            Direction::Backward => write!(f, "{}-", self.sym),
        }
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Target of a satisfaction operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Nom(Nominal),
    Var(Var),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormulaKind {
    True,
    False,
    Prop(Prop),
    Nom(Nominal),
    Var(Var),
    Not(Formula),
    And(Formula, Formula),
    Or(Formula, Formula),
    Diamond(Relation, Option<u32>, Formula),
    Box(Relation, Option<u32>, Formula),
    Exists(Formula),
    Global(Formula),
    At(Term, Formula),
    Down(Var, Formula),
}

/// Immutable, cheaply clonable formula tree with structural equality.
#[derive(Clone, PartialOrd, Ord)]
pub struct Formula(Arc<FormulaKind>);

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Formula {}

impl std::hash::Hash for Formula {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parser::print_formula(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_formula(self))
    }
}

impl From<FormulaKind> for Formula {
    fn from(k: FormulaKind) -> Self {
        Formula(Arc::new(k))
    }
}

impl Formula {
    pub fn kind(&self) -> &FormulaKind {
        &self.0
    }

    pub fn tt() -> Self {
        FormulaKind::True.into()
    }

    pub fn ff() -> Self {
        FormulaKind::False.into()
    }

    pub fn prop(p: impl Into<Prop>) -> Self {
        FormulaKind::Prop(p.into()).into()
    }

    pub fn nom(a: impl Into<Nominal>) -> Self {
        FormulaKind::Nom(a.into()).into()
    }

    pub fn var(x: impl Into<Var>) -> Self {
        FormulaKind::Var(x.into()).into()
    }

    pub fn not(f: Formula) -> Self {
        FormulaKind::Not(f).into()
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        FormulaKind::And(a, b).into()
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        FormulaKind::Or(a, b).into()
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or_else(Formula::tt)
    }

    /// Left-nested disjunction; `⊥` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::ff)
    }

    pub fn dia(r: impl Into<Relation>, f: Formula) -> Self {
        FormulaKind::Diamond(r.into(), None, f).into()
    }

    pub fn boxed(r: impl Into<Relation>, f: Formula) -> Self {
        FormulaKind::Box(r.into(), None, f).into()
    }

    pub fn dia_n(r: impl Into<Relation>, n: u32, f: Formula) -> Self {
        FormulaKind::Diamond(r.into(), Some(n), f).into()
    }

    pub fn box_n(r: impl Into<Relation>, n: u32, f: Formula) -> Self {
        FormulaKind::Box(r.into(), Some(n), f).into()
    }

    pub fn exists(f: Formula) -> Self {
        FormulaKind::Exists(f).into()
    }

    pub fn global(f: Formula) -> Self {
        FormulaKind::Global(f).into()
    }

    pub fn at(a: impl Into<Nominal>, f: Formula) -> Self {
        FormulaKind::At(Term::Nom(a.into()), f).into()
    }

    pub fn at_var(x: impl Into<Var>, f: Formula) -> Self {
        FormulaKind::At(Term::Var(x.into()), f).into()
    }

    pub fn at_term(t: Term, f: Formula) -> Self {
        FormulaKind::At(t, f).into()
    }

    pub fn down(x: impl Into<Var>, f: Formula) -> Self {
        FormulaKind::Down(x.into(), f).into()
    }

    /// Immediate subformulas, in left-to-right order.
    pub fn children(&self) -> Vec<&Formula> {
        use FormulaKind::*;
        match self.kind() {
            True | False | Prop(_) | Nom(_) | Var(_) => vec![],
            Not(f) | Diamond(_, _, f) | Box(_, _, f) | Exists(f) | Global(f) | At(_, f)
            | Down(_, f) => vec![f],
            And(a, b) | Or(a, b) => vec![a, b],
        }
    }

    /// Subterm reached by following child indices.
    pub fn at_path(&self, path: &[usize]) -> Option<&Formula> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Number of operator and atom nodes. `@u` and `↓x` count as one node each.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Whether this is `□_R`, `A`, or a graded box.
    pub fn is_universal(&self) -> bool {
        matches!(self.kind(), FormulaKind::Box(..) | FormulaKind::Global(_))
    }

    pub fn contains_universal(&self) -> bool {
        self.is_universal() || self.children().into_iter().any(Formula::contains_universal)
    }

    pub fn is_graded(&self) -> bool {
        match self.kind() {
            FormulaKind::Diamond(_, Some(_), _) | FormulaKind::Box(_, Some(_), _) => true,
            _ => self.children().into_iter().any(Formula::is_graded),
        }
    }

    pub fn nominals(&self) -> BTreeSet<Nominal> {
        let mut out = BTreeSet::new();
        self.collect_nominals(&mut out);
        out
    }

    pub fn collect_nominals(&self, out: &mut BTreeSet<Nominal>) {
        match self.kind() {
            FormulaKind::Nom(a) => {
                out.insert(a.clone());
            }
            FormulaKind::At(Term::Nom(a), f) => {
                out.insert(a.clone());
                f.collect_nominals(out);
            }
            _ => {
                for c in self.children() {
                    c.collect_nominals(out);
                }
            }
        }
    }

    pub fn mentions_nominal(&self, a: &Nominal) -> bool {
        match self.kind() {
            FormulaKind::Nom(b) => a == b,
            FormulaKind::At(Term::Nom(b), f) => a == b || f.mentions_nominal(a),
            _ => self.children().into_iter().any(|c| c.mentions_nominal(a)),
        }
    }

    pub fn props(&self) -> BTreeSet<Prop> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let FormulaKind::Prop(p) = f.kind() {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn rel_syms(&self) -> BTreeSet<RelSym> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let FormulaKind::Diamond(r, _, _) | FormulaKind::Box(r, _, _) = f.kind() {
                out.insert(r.sym.clone());
            }
        });
        out
    }

    /// Every variable name used anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f.kind() {
            FormulaKind::Var(x) | FormulaKind::Down(x, _) | FormulaKind::At(Term::Var(x), _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            match f.kind() {
                FormulaKind::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                FormulaKind::At(Term::Var(x), g) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                    go(g, bound, out);
                }
                FormulaKind::Down(x, g) => {
                    bound.push(x.clone());
                    go(g, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in f.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_ground(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Pre-order traversal.
    pub fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }
}

/// Frame constraint on the accessibility relations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assertion {
    Trans(RelSym),
    /// `left ⊑ right`; a backward right side is normalized away on construction.
    Incl(Relation, RelSym),
}

impl Assertion {
    pub fn trans(r: impl Into<RelSym>) -> Self {
        Assertion::Trans(r.into())
    }

    /// Builds `left ⊑ right`, rewriting `R ⊑ s⁻` to `R⁻ ⊑ s`.
    pub fn incl(left: impl Into<Relation>, right: impl Into<Relation>) -> Self {
        let (left, right) = (left.into(), right.into());
        if right.is_forward() {
            Assertion::Incl(left, right.sym)
        } else {
            Assertion::Incl(left.inv(), right.sym)
        }
    }

    pub fn rel_syms(&self) -> Vec<RelSym> {
        match self {
            Assertion::Trans(r) => vec![r.clone()],
            Assertion::Incl(l, r) => vec![l.sym.clone(), r.clone()],
        }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Trans(r) => write!(f, "trans {r}"),
            Assertion::Incl(l, r) => write!(f, "{l} <= {r}"),
        }
    }
}

impl fmt::Debug for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `a : F` with `F` ground.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SatStatement {
    pub outer: Nominal,
    pub body: Formula,
}

impl SatStatement {
    pub fn new(outer: Nominal, body: Formula) -> Self {
        SatStatement { outer, body }
    }

    /// `a:◇_r b` with `r` forward, ungraded, and `b` a nominal.
    pub fn relational(&self) -> Option<(&RelSym, &Nominal)> {
        match self.body.kind() {
            FormulaKind::Diamond(r, None, f) if r.is_forward() => match f.kind() {
                FormulaKind::Nom(b) => Some((&r.sym, b)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_relational(&self) -> bool {
        self.relational().is_some()
    }

    pub fn subst_nom(&self, a: &Nominal, b: &Nominal) -> SatStatement {
        let outer = if &self.outer == a { b.clone() } else { self.outer.clone() };
        SatStatement { outer, body: subst_nom(&self.body, a, b) }
    }

    pub fn mentions(&self, a: &Nominal) -> bool {
        &self.outer == a || self.body.mentions_nominal(a)
    }

    pub fn nominals(&self) -> BTreeSet<Nominal> {
        let mut out = self.body.nominals();
        out.insert(self.outer.clone());
        out
    }
}

impl fmt::Display for SatStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.outer, crate::parser::print_operand(&self.body))
    }
}

impl fmt::Debug for SatStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_is_involutive() {
        let r = Relation::forward("r");
        assert_eq!(r.inv().inv(), r);
        assert_ne!(r.inv(), r);
    }

    #[test]
    fn size_convention() {
        let p = Formula::prop("p");
        assert_eq!(p.size(), 1);
        assert_eq!(Formula::not(p.clone()).size(), 2);
        assert_eq!(Formula::boxed("r", p.clone()).size(), 2);
        assert_eq!(Formula::at("a", p.clone()).size(), 2);
        assert_eq!(Formula::down("x", Formula::var("x")).size(), 2);
    }

    #[test]
    fn inclusion_normalizes_backward_right_side() {
        assert_eq!(
            Assertion::incl("r", "s-"),
            Assertion::Incl(Relation::backward("r"), RelSym::new("s"))
        );
        assert_eq!(
            Assertion::incl("r-", "s-"),
            Assertion::Incl(Relation::forward("r"), RelSym::new("s"))
        );
    }

    #[test]
    fn relational_predicate() {
        let a = Nominal::new("a");
        let rel = SatStatement::new(a.clone(), Formula::dia("r", Formula::nom("b")));
        assert!(rel.is_relational());
        let back = SatStatement::new(a.clone(), Formula::dia("r-", Formula::nom("b")));
        assert!(!back.is_relational());
        let graded = SatStatement::new(a, Formula::dia_n("r", 0, Formula::nom("b")));
        assert!(!graded.is_relational());
    }

    #[test]
    fn free_variables() {
        let f = Formula::and(Formula::var("x"), Formula::down("x", Formula::var("x")));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec![Var::new("x")]);
        assert!(Formula::down("x", Formula::at_var("x", Formula::prop("p"))).is_ground());
    }
}
