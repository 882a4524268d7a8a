use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Label, Node, NodeId, Provenance, RuleKind, TableauError};
use crate::blocking::{recompute_blocking, BlockingState};
use crate::fragment::detect_down_box;
use crate::parser::Problem;
use crate::preprocess::FreshNominalSource;
use crate::syntax::{nnf, Assertion, Formula, FormulaKind, Nominal, RelSym, Relation, SatStatement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchStatus {
    Open,
    /// Nodes witnessing the clash; equal for `a:¬a` and `a:⊥`.
    Closed(NodeId, NodeId),
    Complete,
}

/// One tableau branch. Nodes are only ever appended; the equality rule
/// rewrites labels in place.
#[derive(Clone, Debug)]
pub struct Branch {
    nodes: Vec<Node>,
    trans: BTreeSet<RelSym>,
    inclusions: BTreeMap<(Relation, RelSym), NodeId>,
    trans_nodes: BTreeMap<RelSym, NodeId>,
    rels: BTreeSet<RelSym>,
    subst_log: Vec<(Nominal, Nominal)>,
    status: BranchStatus,
    fresh: FreshNominalSource,
    witnesses: BTreeMap<NodeId, Vec<NodeId>>,
    index: HashMap<Label, Vec<NodeId>>,
    blocking: Option<BlockingState>,
    root: Nominal,
    pub(crate) id: usize,
    pub(crate) path: Vec<u8>,
}

impl Branch {
    /// Node 0 is `_0 : F`, then one node per assertion, then the inclusion
    /// closure (`r ⊑ r` for every symbol, and transitive composition).
    pub fn init(p: &Problem) -> Result<Branch, TableauError> {
        let formula = nnf(&p.formula);
        if formula.is_graded() {
            return Err(TableauError::Graded);
        }
        if detect_down_box(&formula).0 {
            return Err(TableauError::NotDownBoxFree);
        }
        let mut fresh = FreshNominalSource::avoiding(&formula);
        let top = if formula.mentions_nominal(&Nominal::new("_0")) { fresh.next() } else { Nominal::new("_0") };
        let mut b = Branch {
            nodes: Vec::new(),
            trans: BTreeSet::new(),
            inclusions: BTreeMap::new(),
            trans_nodes: BTreeMap::new(),
            rels: p.declared_rels.clone(),
            subst_log: Vec::new(),
            status: BranchStatus::Open,
            fresh,
            witnesses: BTreeMap::new(),
            index: HashMap::new(),
            blocking: None,
            root: top.clone(),
            id: 0,
            path: Vec::new(),
        };
        b.rels.extend(formula.rel_syms());
        for a in &p.assertions {
            b.rels.extend(a.rel_syms());
        }
        b.push(Label::Sat(SatStatement::new(top, formula)), None, RuleKind::Init, vec![]);
        for a in &p.assertions {
            let label = Label::Assert(a.clone());
            if !b.index.contains_key(&label) {
                b.push(label, None, RuleKind::Assertion, vec![]);
            }
        }
        for r in b.rels.clone() {
            let label = Label::Assert(Assertion::Incl(Relation::forward(r.clone()), r));
            if !b.index.contains_key(&label) {
                b.push(label, None, RuleKind::Rel0, vec![]);
            }
        }
        loop {
            let incl: Vec<((Relation, RelSym), NodeId)> =
                b.inclusions.iter().map(|(k, v)| (k.clone(), *v)).collect();
            let mut added = false;
            for ((l1, s1), i) in &incl {
                for ((l2, s2), j) in &incl {
                    if &l2.sym != s1 {
                        continue;
                    }
                    let left = if l2.is_forward() { l1.clone() } else { l1.inv() };
                    let label = Label::Assert(Assertion::Incl(left, s2.clone()));
                    if !b.index.contains_key(&label) {
                        b.push(label, None, RuleKind::Rel, vec![*i, *j]);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        Ok(b)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn get(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn status(&self) -> BranchStatus {
        self.status
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.status, BranchStatus::Closed(..))
    }

    pub(crate) fn set_complete(&mut self) {
        self.status = BranchStatus::Complete;
    }

    pub fn subst_log(&self) -> &[(Nominal, Nominal)] {
        &self.subst_log
    }

    pub fn rels(&self) -> &BTreeSet<RelSym> {
        &self.rels
    }

    pub fn trans_set(&self) -> &BTreeSet<RelSym> {
        &self.trans
    }

    pub fn trans_node(&self, r: &RelSym) -> Option<NodeId> {
        self.trans_nodes.get(r).copied()
    }

    /// The closed inclusion set, normalized as `L ⊑ s`.
    pub fn inclusions(&self) -> &BTreeMap<(Relation, RelSym), NodeId> {
        &self.inclusions
    }

    /// Node stating `R ⊑ S` for signed `R`, `S`, if present.
    pub fn inclusion_node(&self, r: &Relation, s: &Relation) -> Option<NodeId> {
        let key = if s.is_forward() { (r.clone(), s.sym.clone()) } else { (r.inv(), s.sym.clone()) };
        self.inclusions.get(&key).copied()
    }

    /// Conclusions created by expanding a blockable node.
    pub fn witness_nodes(&self, id: NodeId) -> Option<&[NodeId]> {
        self.witnesses.get(&id).map(Vec::as_slice)
    }

    pub fn top(&self) -> &SatStatement {
        self.nodes[0].label.sat().expect("node 0 is the top formula")
    }

    /// The top nominal as created, before any substitution.
    pub fn root_nominal(&self) -> &Nominal {
        &self.root
    }

    pub fn top_nominals(&self) -> BTreeSet<Nominal> {
        self.top().nominals()
    }

    /// Follows the substitution history from an original nominal.
    pub fn resolve(&self, a: &Nominal) -> Nominal {
        let mut cur = a.clone();
        for (from, to) in &self.subst_log {
            if &cur == from {
                cur = to.clone();
            }
        }
        cur
    }

    /// Non-relational `a:◇_R F`, and `a:E F`.
    pub fn is_blockable(s: &SatStatement) -> bool {
        match s.body.kind() {
            FormulaKind::Diamond(_, None, _) => !s.is_relational(),
            FormulaKind::Exists(_) => true,
            _ => false,
        }
    }

    pub fn blocking(&mut self) -> &BlockingState {
        if self.blocking.is_none() {
            self.blocking = Some(recompute_blocking(self));
        }
        self.blocking.as_ref().unwrap()
    }

    /// Blocking state if it is current.
    pub fn blocking_cached(&self) -> Option<&BlockingState> {
        self.blocking.as_ref()
    }

    pub(crate) fn ensure_blocking(&mut self) {
        self.blocking();
    }

    pub fn is_phantom(&mut self, id: NodeId) -> bool {
        self.blocking().is_phantom(id)
    }

    /// Whether some non-phantom node carries `label`. Requires current blocking.
    pub fn present(&self, label: &Label) -> bool {
        let bl = self.blocking.as_ref().expect("blocking state is current");
        self.index.get(label).is_some_and(|ids| ids.iter().any(|&i| !bl.is_phantom(i)))
    }

    pub fn contains_label(&self, label: &Label) -> bool {
        self.index.contains_key(label)
    }

    pub fn nodes_with_label(&self, label: &Label) -> &[NodeId] {
        self.index.get(label).map(Vec::as_slice).unwrap_or(&[])
    }

    pub(crate) fn fresh_nominal(&mut self) -> Nominal {
        self.fresh.next()
    }

    pub(crate) fn mark_expanded(&mut self, id: NodeId) {
        self.nodes[id.0].expanded = true;
    }

    pub(crate) fn set_witnesses(&mut self, id: NodeId, w: Vec<NodeId>) {
        self.witnesses.insert(id, w);
    }

    /// Appends a node and checks for a clash.
    pub(crate) fn push(
        &mut self,
        label: Label,
        parent: Option<NodeId>,
        rule: RuleKind,
        premises: Vec<NodeId>,
    ) -> NodeId {
        let id = NodeId(self.nodes.len());
        match &label {
            Label::Assert(Assertion::Trans(r)) => {
                self.trans.insert(r.clone());
                self.trans_nodes.entry(r.clone()).or_insert(id);
            }
            Label::Assert(Assertion::Incl(l, s)) => {
                self.inclusions.entry((l.clone(), s.clone())).or_insert(id);
            }
            Label::Sat(_) => {}
        }
        self.index.entry(label.clone()).or_default().push(id);
        self.nodes.push(Node {
            id,
            label,
            parent,
            expanded: false,
            provenance: Provenance { rule, premises },
        });
        self.blocking = None;
        if !self.is_closed() {
            if let Some(pair) = self.clash_at(id) {
                self.status = BranchStatus::Closed(pair.0, pair.1);
            }
        }
        id
    }

    fn clash_at(&self, id: NodeId) -> Option<(NodeId, NodeId)> {
        let Label::Sat(s) = &self.nodes[id.0].label else { return None };
        let other = match s.body.kind() {
            FormulaKind::False => return Some((id, id)),
            FormulaKind::Not(g) => match g.kind() {
                FormulaKind::Nom(b) if b == &s.outer => return Some((id, id)),
                FormulaKind::Prop(_) => SatStatement::new(s.outer.clone(), g.clone()),
                _ => return None,
            },
            FormulaKind::Prop(_) => SatStatement::new(s.outer.clone(), Formula::not(s.body.clone())),
            _ => return None,
        };
        let ids = self.index.get(&Label::Sat(other))?;
        let first = *ids.first()?;
        Some((first.min(id), first.max(id)))
    }

    /// `B[b/a]`: rewrites every label and records the substitution.
    pub(crate) fn substitute(&mut self, a: &Nominal, b: &Nominal) {
        for node in &mut self.nodes {
            if let Label::Sat(s) = &node.label {
                if s.mentions(a) {
                    node.label = Label::Sat(s.subst_nom(a, b));
                }
            }
        }
        self.subst_log.push((a.clone(), b.clone()));
        self.index.clear();
        for node in &self.nodes {
            self.index.entry(node.label.clone()).or_default().push(node.id);
        }
        self.blocking = None;
        if !self.is_closed() {
            for i in 0..self.nodes.len() {
                if let Some((m, n)) = self.clash_at(NodeId(i)) {
                    self.status = BranchStatus::Closed(m, n);
                    break;
                }
            }
        }
    }
}
