use std::collections::{BTreeMap, BTreeSet};

use super::{check_assertions, eval_sentence, Interpretation, State};
use crate::blocking::{recompute_blocking, BlockingState};
use crate::parser::Problem;
use crate::syntax::{FormulaKind, Nominal, RelSym, Relation};
use crate::tableau::{Branch, Label, NodeId};

/// Outcome of checking an extracted model against the problem it came from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractionReport {
    pub formula_holds: bool,
    pub assertions_hold: bool,
    pub failures: Vec<String>,
}

impl ExtractionReport {
    pub fn passes(&self) -> bool {
        self.formula_holds && self.assertions_hold && self.failures.is_empty()
    }
}

fn closure(pairs: &BTreeSet<(State, State)>) -> BTreeSet<(State, State)> {
    let mut out = pairs.clone();
    loop {
        let mut added = Vec::new();
        for &(a, b) in &out {
            for &(c, d) in out.range((b, 0)..=(b, usize::MAX)) {
                debug_assert_eq!(b, c);
                if !out.contains(&(a, d)) {
                    added.push((a, d));
                }
            }
        }
        if added.is_empty() {
            return out;
        }
        out.extend(added);
    }
}

struct Edges<'a> {
    branch: &'a Branch,
    base: BTreeMap<RelSym, BTreeSet<(State, State)>>,
}

impl Edges<'_> {
    /// Records `x ⇒_s y` in `t_⊆` for every inclusion with left side `s` or `s⁻`.
    fn add(&mut self, x: State, s: &RelSym, y: State) {
        for (left, t) in self.branch.inclusions().keys() {
            if &left.sym != s {
                continue;
            }
            let pair = if left.is_forward() { (x, y) } else { (y, x) };
            self.base.entry(t.clone()).or_default().insert(pair);
        }
    }
}

/// Builds `ρ_B` over the nominals of non-phantom nodes. Directly blocked
/// diamonds get an edge to their blocker's witness, a finite stand-in for the
/// infinite unravelling. The model is then checked against `p`, which must be
/// the problem the branch was built from.
pub fn extract_model(b: &Branch, p: &Problem) -> (Interpretation, ExtractionReport) {
    let computed;
    let bl: &BlockingState = match b.blocking_cached() {
        Some(bl) => bl,
        None => {
            computed = recompute_blocking(b);
            &computed
        }
    };
    let mut report = ExtractionReport::default();

    let mut states: BTreeMap<Nominal, State> = BTreeMap::new();
    let mut names = Vec::new();
    for node in b.nodes() {
        let Label::Sat(s) = &node.label else { continue };
        if bl.is_phantom(node.id) {
            continue;
        }
        let mut noms: Vec<Nominal> = vec![s.outer.clone()];
        noms.extend(s.nominals());
        for a in noms {
            if !states.contains_key(&a) {
                states.insert(a.clone(), names.len());
                names.push(a.as_str().to_string());
            }
        }
    }

    let mut m = Interpretation::new(names.len());
    m.names = names;
    for node in b.nodes() {
        let Label::Sat(s) = &node.label else { continue };
        if let (FormulaKind::Prop(q), Some(&w)) = (s.body.kind(), states.get(&s.outer)) {
            m.valuation[w].insert(q.clone());
        }
    }

    let mut edges = Edges { branch: b, base: BTreeMap::new() };
    for node in b.nodes() {
        let Label::Sat(s) = &node.label else { continue };
        if bl.is_phantom(node.id) {
            continue;
        }
        if let Some((r, d)) = s.relational() {
            edges.add(states[&s.outer], r, states[d]);
        }
    }
    for id in bl.directly_blocked() {
        redirect(b, bl, id, &states, &mut edges, &mut report);
    }

    let trans = b.trans_set();
    for r in b.rels() {
        let base = edges.base.get(r).cloned().unwrap_or_default();
        let rho = if trans.contains(r) {
            closure(&base)
        } else {
            let mut rho = base;
            for (left, t) in b.inclusions().keys() {
                if t != r || !trans.contains(&left.sym) || &left.sym == r {
                    continue;
                }
                let sub = closure(&edges.base.get(&left.sym).cloned().unwrap_or_default());
                if left.is_forward() {
                    rho.extend(sub);
                } else {
                    rho.extend(sub.into_iter().map(|(x, y)| (y, x)));
                }
            }
            rho
        };
        m.rho.insert(r.clone(), rho);
    }

    let mut originals: BTreeSet<Nominal> = p.formula.nominals();
    originals.insert(b.root_nominal().clone());
    for (a, &w) in &states {
        m.nominals.insert(a.clone(), w);
    }
    for a in originals {
        match states.get(&b.resolve(&a)) {
            Some(&w) => {
                m.nominals.insert(a, w);
            }
            None => report.failures.push(format!("nominal {a} has no state")),
        }
    }

    let root = m.nominals.get(b.root_nominal()).copied();
    report.formula_holds = match root.map(|w| eval_sentence(&m, w, &p.formula)) {
        Some(Ok(v)) => v,
        Some(Err(e)) => {
            report.failures.push(e.to_string());
            false
        }
        None => false,
    };
    report.assertions_hold = check_assertions(&m, &p.assertions);
    (m, report)
}

fn redirect(
    b: &Branch,
    bl: &BlockingState,
    id: NodeId,
    states: &BTreeMap<Nominal, State>,
    edges: &mut Edges<'_>,
    report: &mut ExtractionReport,
) {
    let Some(rec) = bl.record(id) else { return };
    let Some(s) = b.node(id).label.sat() else { return };
    let FormulaKind::Diamond(rel, None, _) = s.body.kind() else { return };
    let witness = b
        .witness_nodes(rec.blocker)
        .and_then(|w| w.last())
        .and_then(|&w| b.node(w).label.sat())
        .map(|w| w.outer.clone());
    let (Some(c), Some(&a)) = (witness, states.get(&s.outer)) else {
        report.failures.push(format!("blocker {} of node {id} has no witness", rec.blocker));
        return;
    };
    let Some(&w) = states.get(&c) else {
        report.failures.push(format!("witness {c} of node {} is not a state", rec.blocker));
        return;
    };
    let Relation { sym, .. } = rel;
    if rel.is_forward() {
        edges.add(a, sym, w);
    } else {
        edges.add(w, sym, a);
    }
}
