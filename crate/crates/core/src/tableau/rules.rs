use std::collections::{BTreeMap, HashMap};

use super::{Branch, Label, NodeId, RuleKind, TableauError};
use crate::syntax::{subst_var, Assertion, Formula, FormulaKind, Nominal, Relation, SatStatement, Term};

/// A concrete rule instance: the rule and its premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inference {
    Equality(NodeId),
    And(NodeId),
    At(NodeId),
    Down(NodeId),
    Link { premise: NodeId, inclusion: NodeId },
    Box { major: NodeId, minor: NodeId },
    Global { major: NodeId, nominal: Nominal },
    Trans { major: NodeId, minor: NodeId, trans: NodeId, inclusion: NodeId },
    Or(NodeId),
    Diamond(NodeId),
    Exists(NodeId),
}

impl Inference {
    pub fn rule(&self) -> RuleKind {
        match self {
            Inference::Equality(_) => RuleKind::Equality,
            Inference::And(_) => RuleKind::And,
            Inference::At(_) => RuleKind::At,
            Inference::Down(_) => RuleKind::Down,
            Inference::Link { .. } => RuleKind::Link,
            Inference::Box { .. } => RuleKind::Box,
            Inference::Global { .. } => RuleKind::Global,
            Inference::Trans { .. } => RuleKind::Trans,
            Inference::Or(_) => RuleKind::Or,
            Inference::Diamond(_) => RuleKind::Diamond,
            Inference::Exists(_) => RuleKind::Exists,
        }
    }
}

/// What one rule application did to a branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Applied {
    pub rule: RuleKind,
    pub premises: Vec<NodeId>,
    /// New nodes; for a split, the node added to each side (same id on both).
    pub added: Vec<NodeId>,
    pub substitution: Option<(Nominal, Nominal)>,
}

pub enum RuleOutcome {
    One(Branch, Applied),
    Split(Branch, Branch, Applied),
}

/// Applies one inference, enforcing the rule schema and restrictions R1–R4.
pub fn apply_rule(mut b: Branch, inf: &Inference) -> Result<RuleOutcome, TableauError> {
    let (applied, right) = b.apply(inf)?;
    Ok(match right {
        None => RuleOutcome::One(b, applied),
        Some(r) => RuleOutcome::Split(b, r, applied),
    })
}

/// Relational labels derivable from `node` by the Link rule, one per
/// applicable inclusion node: `a:◇_r b` with `r ⊑ s` gives `a:◇_s b`, and
/// with `r⁻ ⊑ s` gives `b:◇_s a`.
pub fn resolve_link_readings(b: &Branch, node: NodeId) -> Vec<(SatStatement, NodeId)> {
    let Some(Label::Sat(s)) = b.get(node).map(|n| &n.label) else { return vec![] };
    let Some((r, target)) = s.relational() else { return vec![] };
    let mut out = Vec::new();
    for ((left, right), &incl) in b.inclusions() {
        if &left.sym != r {
            continue;
        }
        let label = if left.is_forward() {
            edge(&s.outer, &Relation::forward(right.clone()), target)
        } else {
            edge(target, &Relation::forward(right.clone()), &s.outer)
        };
        out.push((label, incl));
    }
    out.sort_by_key(|(_, i)| *i);
    out
}

/// The relational label for `a ⇒_R b`.
fn edge(a: &Nominal, rel: &Relation, b: &Nominal) -> SatStatement {
    let fwd = Relation::forward(rel.sym.clone());
    if rel.is_forward() {
        SatStatement::new(a.clone(), Formula::dia(fwd, Formula::nom(b.clone())))
    } else {
        SatStatement::new(b.clone(), Formula::dia(fwd, Formula::nom(a.clone())))
    }
}

/// If `s` represents `a ⇒_R b` for the given `a` and `R`, returns `b`.
fn edge_target<'a>(s: &'a SatStatement, a: &Nominal, rel: &Relation) -> Option<&'a Nominal> {
    let (r, target) = s.relational()?;
    if r != &rel.sym {
        return None;
    }
    if rel.is_forward() {
        (&s.outer == a).then_some(target)
    } else {
        (target == a).then_some(&s.outer)
    }
}

fn sat_label(a: &Nominal, f: Formula) -> Label {
    Label::Sat(SatStatement::new(a.clone(), f))
}

/// Outgoing `a ⇒_R b` edges of non-phantom relational nodes, in both readings.
fn edges_by_source(b: &Branch) -> HashMap<Nominal, Vec<(Relation, Nominal, NodeId)>> {
    let bl = b.blocking_cached().expect("blocking is current");
    let mut out: HashMap<Nominal, Vec<(Relation, Nominal, NodeId)>> = HashMap::new();
    for node in b.nodes() {
        let Label::Sat(s) = &node.label else { continue };
        let Some((r, target)) = s.relational() else { continue };
        if bl.is_phantom(node.id) {
            continue;
        }
        out.entry(s.outer.clone()).or_default().push((Relation::forward(r.clone()), target.clone(), node.id));
        out.entry(target.clone()).or_default().push((Relation::backward(r.clone()), s.outer.clone(), node.id));
    }
    out
}

/// Nominals of non-phantom nodes, each with the first such node mentioning it.
fn nominal_occurrences(b: &Branch) -> Vec<(Nominal, NodeId)> {
    let bl = b.blocking_cached().expect("blocking is current");
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for node in b.nodes() {
        let Label::Sat(s) = &node.label else { continue };
        if bl.is_phantom(node.id) {
            continue;
        }
        for a in s.nominals() {
            if seen.insert(a.clone(), node.id).is_none() {
                out.push((a, node.id));
            }
        }
    }
    out.sort_by_key(|(_, id)| *id);
    out
}

/// Next applicable inference by rule priority, lowest node id first within a
/// priority class: `=`; `∧ @ ↓`; Link; `□ A` Trans; `∨`; `◇ E`.
pub fn find_inference(b: &mut Branch) -> Option<Inference> {
    if b.is_closed() {
        return None;
    }
    b.ensure_blocking();
    let b = &*b;
    let bl = b.blocking_cached().unwrap();
    let usable = |id: NodeId| !bl.is_phantom(id);

    for node in b.nodes() {
        if let Label::Sat(s) = &node.label {
            if let FormulaKind::Nom(c) = s.body.kind() {
                if c != &s.outer && usable(node.id) {
                    return Some(Inference::Equality(node.id));
                }
            }
        }
    }

    for node in b.nodes() {
        let Label::Sat(s) = &node.label else { continue };
        if !usable(node.id) {
            continue;
        }
        match s.body.kind() {
            FormulaKind::And(f, g) => {
                if !b.present(&sat_label(&s.outer, f.clone())) || !b.present(&sat_label(&s.outer, g.clone())) {
                    return Some(Inference::And(node.id));
                }
            }
            FormulaKind::At(Term::Nom(c), f) => {
                if !b.present(&sat_label(c, f.clone())) {
                    return Some(Inference::At(node.id));
                }
            }
            FormulaKind::Down(x, f)
                if !b.present(&sat_label(&s.outer, subst_var(f, x, &s.outer))) => {
                    return Some(Inference::Down(node.id));
                }
            _ => {}
        }
    }

    for node in b.nodes() {
        if !usable(node.id) {
            continue;
        }
        for (label, incl) in resolve_link_readings(b, node.id) {
            if !b.present(&Label::Sat(label)) {
                return Some(Inference::Link { premise: node.id, inclusion: incl });
            }
        }
    }

    let edges = edges_by_source(b);
    let mut nominals: Option<Vec<(Nominal, NodeId)>> = None;
    for node in b.nodes() {
        let Label::Sat(s) = &node.label else { continue };
        match s.body.kind() {
            FormulaKind::Box(rel, None, f) => {
                for (r, target, minor) in edges.get(&s.outer).into_iter().flatten() {
                    if r == rel && !b.present(&sat_label(target, f.clone())) {
                        return Some(Inference::Box { major: node.id, minor: *minor });
                    }
                    let Some(trans) = b.trans_node(&r.sym) else { continue };
                    let Some(inclusion) = b.inclusion_node(r, rel) else { continue };
                    let concl = sat_label(target, Formula::boxed(r.clone(), f.clone()));
                    if !b.present(&concl) {
                        return Some(Inference::Trans { major: node.id, minor: *minor, trans, inclusion });
                    }
                }
            }
            FormulaKind::Global(f) => {
                let noms = nominals.get_or_insert_with(|| nominal_occurrences(b));
                for (c, _) in noms.iter() {
                    if !b.present(&sat_label(c, f.clone())) {
                        return Some(Inference::Global { major: node.id, nominal: c.clone() });
                    }
                }
            }
            _ => {}
        }
    }

    for node in b.nodes() {
        let Label::Sat(s) = &node.label else { continue };
        if let FormulaKind::Or(f, g) = s.body.kind() {
            if usable(node.id)
                && !b.present(&sat_label(&s.outer, f.clone()))
                && !b.present(&sat_label(&s.outer, g.clone()))
            {
                return Some(Inference::Or(node.id));
            }
        }
    }

    for node in b.nodes() {
        let Label::Sat(s) = &node.label else { continue };
        if node.expanded || !Branch::is_blockable(s) || bl.is_blocked(node.id) {
            continue;
        }
        return Some(match s.body.kind() {
            FormulaKind::Exists(_) => Inference::Exists(node.id),
            _ => Inference::Diamond(node.id),
        });
    }
    None
}

fn restriction<T>(restriction: &'static str, detail: String) -> Result<T, TableauError> {
    Err(TableauError::Restriction { restriction, detail })
}

impl Branch {
    fn sat_of(&self, id: NodeId) -> Result<&SatStatement, TableauError> {
        match &self.get(id).ok_or(TableauError::NoSuchNode(id))?.label {
            Label::Sat(s) => Ok(s),
            Label::Assert(_) => Err(TableauError::Schema { rule: RuleKind::Init, premises: vec![id] }),
        }
    }

    fn require_usable(&mut self, id: NodeId, role: &str) -> Result<(), TableauError> {
        if self.get(id).is_none() {
            return Err(TableauError::NoSuchNode(id));
        }
        if self.is_phantom(id) {
            return restriction("R3", format!("phantom node {id} used as {role}"));
        }
        Ok(())
    }

    /// Adds the conclusions not already on a non-phantom node (R1).
    fn add_new(
        &mut self,
        labels: Vec<Label>,
        parent: Option<NodeId>,
        rule: RuleKind,
        premises: &[NodeId],
    ) -> Result<Applied, TableauError> {
        self.ensure_blocking();
        let fresh: Vec<Label> = labels.into_iter().filter(|l| !self.present(l)).collect();
        if fresh.is_empty() {
            return restriction("R1", format!("every conclusion of {rule} on {premises:?} is already present"));
        }
        let mut added: Vec<NodeId> = Vec::new();
        for (i, l) in fresh.iter().enumerate() {
            if fresh[..i].contains(l) {
                continue;
            }
            added.push(self.push(l.clone(), parent, rule, premises.to_vec()));
        }
        Ok(Applied { rule, premises: premises.to_vec(), added, substitution: None })
    }

    pub(crate) fn apply(&mut self, inf: &Inference) -> Result<(Applied, Option<Branch>), TableauError> {
        if self.is_closed() {
            return Err(TableauError::Closed);
        }
        self.ensure_blocking();
        let rule = inf.rule();
        let schema = |premises: Vec<NodeId>| TableauError::Schema { rule, premises };
        match inf {
            Inference::Equality(n) => {
                self.require_usable(*n, "premise")?;
                let s = self.sat_of(*n)?.clone();
                let FormulaKind::Nom(c) = s.body.kind() else { return Err(schema(vec![*n])) };
                if c == &s.outer {
                    return Err(schema(vec![*n]));
                }
                self.substitute(&s.outer, c);
                let applied = Applied {
                    rule,
                    premises: vec![*n],
                    added: vec![],
                    substitution: Some((s.outer.clone(), c.clone())),
                };
                Ok((applied, None))
            }
            Inference::And(n) | Inference::At(n) | Inference::Down(n) => {
                self.require_usable(*n, "premise")?;
                let s = self.sat_of(*n)?.clone();
                let labels = match (inf, s.body.kind()) {
                    (Inference::And(_), FormulaKind::And(f, g)) => {
                        vec![sat_label(&s.outer, f.clone()), sat_label(&s.outer, g.clone())]
                    }
                    (Inference::At(_), FormulaKind::At(Term::Nom(c), f)) => vec![sat_label(c, f.clone())],
                    (Inference::Down(_), FormulaKind::Down(x, f)) => {
                        vec![sat_label(&s.outer, subst_var(f, x, &s.outer))]
                    }
                    _ => return Err(schema(vec![*n])),
                };
                let parent = self.node(*n).parent;
                Ok((self.add_new(labels, parent, rule, &[*n])?, None))
            }
            Inference::Or(n) => {
                self.require_usable(*n, "premise")?;
                let s = self.sat_of(*n)?.clone();
                let FormulaKind::Or(f, g) = s.body.kind() else { return Err(schema(vec![*n])) };
                let (left, right) = (sat_label(&s.outer, f.clone()), sat_label(&s.outer, g.clone()));
                if self.present(&left) || self.present(&right) {
                    return restriction("R1", format!("a disjunct of node {n} is already present"));
                }
                let parent = self.node(*n).parent;
                let mut other = self.clone();
                let id = self.push(left, parent, rule, vec![*n]);
                other.push(right, parent, rule, vec![*n]);
                let applied = Applied { rule, premises: vec![*n], added: vec![id], substitution: None };
                Ok((applied, Some(other)))
            }
            Inference::Diamond(n) | Inference::Exists(n) => {
                let s = self.sat_of(*n)?.clone();
                if !Branch::is_blockable(&s) {
                    return Err(schema(vec![*n]));
                }
                self.ensure_blocking();
                let bl = self.blocking_cached().unwrap();
                if bl.is_directly_blocked(*n) {
                    return restriction("R4", format!("node {n} is directly blocked"));
                }
                if bl.is_phantom(*n) {
                    return restriction("R3", format!("node {n} is a phantom"));
                }
                if self.node(*n).expanded {
                    return restriction("R2", format!("node {n} was already expanded"));
                }
                let c = self.fresh_nominal();
                let labels = match (inf, s.body.kind()) {
                    (Inference::Diamond(_), FormulaKind::Diamond(r, None, f)) => {
                        vec![Label::Sat(edge(&s.outer, r, &c)), sat_label(&c, f.clone())]
                    }
                    (Inference::Exists(_), FormulaKind::Exists(f)) => vec![sat_label(&c, f.clone())],
                    _ => return Err(schema(vec![*n])),
                };
                self.mark_expanded(*n);
                let mut added = Vec::new();
                for l in labels {
                    added.push(self.push(l, Some(*n), rule, vec![*n]));
                }
                self.set_witnesses(*n, added.clone());
                Ok((Applied { rule, premises: vec![*n], added, substitution: None }, None))
            }
            Inference::Link { premise, inclusion } => {
                self.require_usable(*premise, "logical premise of Link")?;
                let label = resolve_link_readings(self, *premise)
                    .into_iter()
                    .find(|(_, i)| i == inclusion)
                    .map(|(l, _)| l)
                    .ok_or_else(|| schema(vec![*premise, *inclusion]))?;
                let parent = self.node(*premise).parent;
                Ok((self.add_new(vec![Label::Sat(label)], parent, rule, &[*premise, *inclusion])?, None))
            }
            Inference::Box { major, minor } => {
                self.require_usable(*minor, "minor premise")?;
                let s = self.sat_of(*major)?.clone();
                let FormulaKind::Box(rel, None, f) = s.body.kind() else {
                    return Err(schema(vec![*major, *minor]));
                };
                let m = self.sat_of(*minor)?;
                let target = edge_target(m, &s.outer, rel).ok_or_else(|| schema(vec![*major, *minor]))?.clone();
                let parent = self.node(*minor).parent;
                Ok((self.add_new(vec![sat_label(&target, f.clone())], parent, rule, &[*major, *minor])?, None))
            }
            Inference::Trans { major, minor, trans, inclusion } => {
                self.require_usable(*minor, "minor premise")?;
                let premises = vec![*major, *minor, *trans, *inclusion];
                let s = self.sat_of(*major)?.clone();
                let FormulaKind::Box(outer_rel, None, f) = s.body.kind() else { return Err(schema(premises)) };
                let m = self.sat_of(*minor)?.clone();
                let (r, _) = m.relational().ok_or_else(|| schema(premises.clone()))?;
                let readings = [Relation::forward(r.clone()), Relation::backward(r.clone())];
                let t = &self.get(*trans).ok_or(TableauError::NoSuchNode(*trans))?.label;
                let i = &self.get(*inclusion).ok_or(TableauError::NoSuchNode(*inclusion))?.label;
                let (rel, target) = readings
                    .iter()
                    .find_map(|rel| {
                        let target = edge_target(&m, &s.outer, rel)?;
                        let trans_ok = t == &Label::Assert(Assertion::Trans(rel.sym.clone()));
                        let incl_ok = self.inclusion_node(rel, outer_rel) == Some(*inclusion)
                            || matches!(i, Label::Assert(a) if *a == Assertion::incl(rel.clone(), outer_rel.clone()));
                        (trans_ok && incl_ok).then(|| (rel.clone(), target.clone()))
                    })
                    .ok_or_else(|| schema(premises.clone()))?;
                let label = sat_label(&target, Formula::boxed(rel, f.clone()));
                let parent = self.node(*minor).parent;
                Ok((self.add_new(vec![label], parent, rule, &premises)?, None))
            }
            Inference::Global { major, nominal } => {
                let s = self.sat_of(*major)?.clone();
                let FormulaKind::Global(f) = s.body.kind() else { return Err(schema(vec![*major])) };
                self.ensure_blocking();
                let bl = self.blocking_cached().unwrap();
                let minor = self
                    .nodes()
                    .iter()
                    .find(|n| !bl.is_phantom(n.id) && matches!(&n.label, Label::Sat(t) if t.mentions(nominal)))
                    .map(|n| n.id);
                let Some(minor) = minor else {
                    return restriction("R3", format!("{nominal} occurs in no non-phantom node"));
                };
                let parent = self.node(minor).parent;
                Ok((self.add_new(vec![sat_label(nominal, f.clone())], parent, rule, &[*major, minor])?, None))
            }
        }
    }
}
