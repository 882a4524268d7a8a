use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::blocking::{recompute_blocking, BlockingState};
use crate::syntax::{subst_var, Formula, FormulaKind, Nominal, Relation, SatStatement, Term};
use crate::tableau::{Branch, Label};

/// A closure condition that a complete open branch fails, numbered as in the
/// usual list of fifteen pseudo-saturation clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: u8,
    pub description: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause {}: {}", self.clause, self.description)
    }
}

struct Set<'a> {
    labels: HashSet<&'a SatStatement>,
    /// `a ⇒_R b` readings of relational labels, keyed by `a`.
    edges: HashMap<Nominal, Vec<(Relation, Nominal)>>,
}

impl Set<'_> {
    fn has(&self, a: &Nominal, f: &Formula) -> bool {
        self.labels.contains(&SatStatement::new(a.clone(), f.clone()))
    }

    fn has_edge(&self, a: &Nominal, rel: &Relation, b: &Nominal) -> bool {
        self.edges.get(a).is_some_and(|es| es.iter().any(|(r, c)| r == rel && c == b))
    }

    fn successors<'s>(&'s self, a: &Nominal, rel: &'s Relation) -> impl Iterator<Item = &'s Nominal> {
        self.edges.get(a).into_iter().flatten().filter(move |(r, _)| r == rel).map(|(_, c)| c)
    }
}

/// Checks the branch-decidable closure conditions over the non-phantom nodes
/// together with the proposition and box labels of their nominals. Witness
/// conditions are only checked for blockable nodes that are not blocked.
pub fn validate_pseudo_saturation(b: &Branch) -> Vec<Violation> {
    let computed;
    let bl: &BlockingState = match b.blocking_cached() {
        Some(bl) => bl,
        None => {
            computed = recompute_blocking(b);
            &computed
        }
    };
    let mut out = Vec::new();
    let mut violate = |clause: u8, description: String| out.push(Violation { clause, description });

    let mut live: BTreeSet<Nominal> = BTreeSet::new();
    for n in b.nodes() {
        if let (Label::Sat(s), false) = (&n.label, bl.is_phantom(n.id)) {
            live.extend(s.nominals());
        }
    }
    let mut members = Vec::new();
    for n in b.nodes() {
        let Label::Sat(s) = &n.label else { continue };
        let extra = matches!(s.body.kind(), FormulaKind::Prop(_) | FormulaKind::Box(..)) && live.contains(&s.outer);
        if !bl.is_phantom(n.id) || extra {
            members.push((n.id, s));
        }
    }
    let mut set = Set { labels: HashSet::new(), edges: HashMap::new() };
    for &(_, s) in &members {
        set.labels.insert(s);
        if let Some((r, d)) = s.relational() {
            set.edges.entry(s.outer.clone()).or_default().push((Relation::forward(r.clone()), d.clone()));
            set.edges.entry(d.clone()).or_default().push((Relation::backward(r.clone()), s.outer.clone()));
        }
    }

    for &(id, s) in &members {
        let a = &s.outer;
        match s.body.kind() {
            FormulaKind::False => violate(1, format!("node {id} is {s}")),
            FormulaKind::Not(g) => match g.kind() {
                FormulaKind::Nom(c) if c == a => violate(1, format!("node {id} is {s}")),
                FormulaKind::Prop(_) if set.has(a, g) => violate(2, format!("node {id} {s} contradicts {a}:{g}")),
                _ => {}
            },
            FormulaKind::Nom(c) if c != a => violate(3, format!("node {id} is the equality {s}")),
            FormulaKind::And(f, g) => {
                if !set.has(a, f) || !set.has(a, g) {
                    violate(4, format!("node {id} {s} lacks a conjunct"));
                }
            }
            FormulaKind::Or(f, g) => {
                if !set.has(a, f) && !set.has(a, g) {
                    violate(5, format!("node {id} {s} has no disjunct"));
                }
            }
            FormulaKind::At(Term::Nom(c), f) => {
                if !set.has(c, f) {
                    violate(6, format!("node {id} {s} lacks {c}:{f}"));
                }
            }
            FormulaKind::Down(x, f) => {
                let g = subst_var(f, x, a);
                if !set.has(a, &g) {
                    violate(7, format!("node {id} {s} lacks {a}:{g}"));
                }
            }
            FormulaKind::Diamond(rel, None, f) if !s.is_relational() => {
                if !bl.is_blocked(id) && !set.successors(a, rel).any(|d| set.has(d, f)) {
                    violate(8, format!("node {id} {s} has no witness"));
                }
            }
            FormulaKind::Box(rel, None, f) => {
                for d in set.successors(a, rel) {
                    if !set.has(d, f) {
                        violate(9, format!("node {id} {s} with {a} => {rel} {d} lacks {d}:{f}"));
                    }
                }
                for (r, d) in set.edges.get(a).into_iter().flatten() {
                    if b.trans_set().contains(&r.sym) && b.inclusion_node(r, rel).is_some() {
                        let want = Formula::boxed(r.clone(), f.clone());
                        if !set.has(d, &want) {
                            violate(15, format!("node {id} {s} with {a} => {r} {d} lacks {d}:{want}"));
                        }
                    }
                }
            }
            FormulaKind::Exists(f) => {
                if !bl.is_blocked(id) && !set.labels.iter().any(|t| &t.body == f) {
                    violate(10, format!("node {id} {s} has no witness"));
                }
            }
            FormulaKind::Global(f) => {
                for d in &live {
                    if !set.has(d, f) {
                        violate(11, format!("node {id} {s} lacks {d}:{f}"));
                    }
                }
            }
            _ => {}
        }
        if let Some((r, d)) = s.relational() {
            for (left, t) in b.inclusions().keys() {
                if &left.sym != r {
                    continue;
                }
                let tf = Relation::forward(t.clone());
                let ok = if left.is_forward() { set.has_edge(a, &tf, d) } else { set.has_edge(d, &tf, a) };
                if !ok {
                    violate(14, format!("node {id} {s} with {left} <= {t} lacks its Link conclusion"));
                }
            }
        }
    }

    for r in b.rels() {
        if b.inclusion_node(&Relation::forward(r.clone()), &Relation::forward(r.clone())).is_none() {
            violate(12, format!("{r} <= {r} is missing"));
        }
    }
    let incl: Vec<&(Relation, crate::syntax::RelSym)> = b.inclusions().keys().collect();
    for (l1, s1) in &incl {
        for (l2, s2) in &incl {
            if &l2.sym != s1 {
                continue;
            }
            let left = if l2.is_forward() { l1.clone() } else { l1.inv() };
            if !b.inclusions().contains_key(&(left.clone(), s2.clone())) {
                violate(13, format!("{left} <= {s2} is missing"));
            }
        }
    }
    out
}
