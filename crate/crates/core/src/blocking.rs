//! Nominal compatibility, label mappings, and direct/indirect blocking.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use crate::syntax::{Formula, FormulaKind, Nominal, Prop, SatStatement, Term};
use crate::tableau::{Branch, Label, NodeId};

/// Per nominal: the propositions and box formulas it labels anywhere in the branch.
#[derive(Clone, Debug, Default)]
pub struct CompatIndex {
    entries: HashMap<Nominal, (BTreeSet<Prop>, BTreeSet<Formula>)>,
}

impl CompatIndex {
    pub fn build(branch: &Branch) -> Self {
        let mut entries: HashMap<Nominal, (BTreeSet<Prop>, BTreeSet<Formula>)> = HashMap::new();
        for node in branch.nodes() {
            let Label::Sat(s) = &node.label else { continue };
            match s.body.kind() {
                FormulaKind::Prop(p) => {
                    entries.entry(s.outer.clone()).or_default().0.insert(p.clone());
                }
                FormulaKind::Box(_, None, _) => {
                    entries.entry(s.outer.clone()).or_default().1.insert(s.body.clone());
                }
                _ => {}
            }
        }
        CompatIndex { entries }
    }

    pub fn props(&self, a: &Nominal) -> BTreeSet<Prop> {
        self.entries.get(a).map(|e| e.0.clone()).unwrap_or_default()
    }

    pub fn boxes(&self, a: &Nominal) -> BTreeSet<Formula> {
        self.entries.get(a).map(|e| e.1.clone()).unwrap_or_default()
    }

    pub fn compatible(&self, a: &Nominal, b: &Nominal) -> bool {
        if a == b {
            return true;
        }
        let empty = (BTreeSet::new(), BTreeSet::new());
        self.entries.get(a).unwrap_or(&empty) == self.entries.get(b).unwrap_or(&empty)
    }
}

/// Whether `a` and `b` label the same propositions and the same box formulas in `branch`.
pub fn compatible(a: &Nominal, b: &Nominal, branch: &Branch) -> bool {
    CompatIndex::build(branch).compatible(a, b)
}

pub type Mapping = BTreeMap<Nominal, Nominal>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockRecord {
    pub blocked: NodeId,
    pub blocker: NodeId,
    pub mapping: Mapping,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockStatus {
    Free,
    Direct(BlockRecord),
    Phantom,
}

/// Blocking status of every node in a branch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockingState {
    status: Vec<BlockStatus>,
}

impl BlockingState {
    pub fn status(&self, id: NodeId) -> &BlockStatus {
        self.status.get(id.0).unwrap_or(&BlockStatus::Free)
    }

    pub fn is_phantom(&self, id: NodeId) -> bool {
        matches!(self.status(id), BlockStatus::Phantom)
    }

    pub fn is_directly_blocked(&self, id: NodeId) -> bool {
        matches!(self.status(id), BlockStatus::Direct(_))
    }

    pub fn is_blocked(&self, id: NodeId) -> bool {
        !matches!(self.status(id), BlockStatus::Free)
    }

    pub fn record(&self, id: NodeId) -> Option<&BlockRecord> {
        match self.status(id) {
            BlockStatus::Direct(r) => Some(r),
            _ => None,
        }
    }

    pub fn directly_blocked(&self) -> BTreeSet<NodeId> {
        self.ids(|s| matches!(s, BlockStatus::Direct(_)))
    }

    pub fn phantoms(&self) -> BTreeSet<NodeId> {
        self.ids(|s| matches!(s, BlockStatus::Phantom))
    }

    fn ids(&self, pred: impl Fn(&BlockStatus) -> bool) -> BTreeSet<NodeId> {
        self.status.iter().enumerate().filter(|(_, s)| pred(s)).map(|(i, _)| NodeId(i)).collect()
    }
}

/// The forced nominal correspondence turning `from` into `to`, if it is an
/// injective, compatibility-respecting renaming of non-top nominals.
pub fn try_map(
    from: &SatStatement,
    to: &SatStatement,
    top: &BTreeSet<Nominal>,
    compat: &CompatIndex,
) -> Option<Mapping> {
    let mut m = Aligner { top, compat, fwd: Mapping::new(), back: Mapping::new() };
    m.pair(&from.outer, &to.outer)?;
    m.align(&from.body, &to.body)?;
    Some(m.fwd)
}

struct Aligner<'a> {
    top: &'a BTreeSet<Nominal>,
    compat: &'a CompatIndex,
    fwd: Mapping,
    back: Mapping,
}

impl Aligner<'_> {
    fn pair(&mut self, x: &Nominal, y: &Nominal) -> Option<()> {
        if self.top.contains(x) || self.top.contains(y) {
            return (x == y).then_some(());
        }
        match (self.fwd.get(x), self.back.get(y)) {
            (Some(img), _) if img != y => None,
            (_, Some(pre)) if pre != x => None,
            (Some(_), _) => Some(()),
            _ => {
                if !self.compat.compatible(x, y) {
                    return None;
                }
                self.fwd.insert(x.clone(), y.clone());
                self.back.insert(y.clone(), x.clone());
                Some(())
            }
        }
    }

    fn align(&mut self, f: &Formula, g: &Formula) -> Option<()> {
        use FormulaKind::*;
        match (f.kind(), g.kind()) {
            (Nom(a), Nom(b)) => self.pair(a, b),
            (At(Term::Nom(a), f1), At(Term::Nom(b), g1)) => {
                self.pair(a, b)?;
                self.align(f1, g1)
            }
            (At(t, f1), At(u, g1)) if t == u => self.align(f1, g1),
            (True, True) | (False, False) => Some(()),
            (Prop(p), Prop(q)) => (p == q).then_some(()),
            (Var(x), Var(y)) => (x == y).then_some(()),
            (Not(f1), Not(g1)) | (Exists(f1), Exists(g1)) | (Global(f1), Global(g1)) => self.align(f1, g1),
            (And(f1, f2), And(g1, g2)) | (Or(f1, f2), Or(g1, g2)) => {
                self.align(f1, g1)?;
                self.align(f2, g2)
            }
            (Diamond(r, n, f1), Diamond(s, m, g1)) | (Box(r, n, f1), Box(s, m, g1)) => {
                if r != s || n != m {
                    return None;
                }
                self.align(f1, g1)
            }
            (Down(x, f1), Down(y, g1)) => {
                if x != y {
                    return None;
                }
                self.align(f1, g1)
            }
            _ => None,
        }
    }
}

/// Hash of a label with every non-top nominal erased; equal for any two
/// labels one of which maps onto the other.
fn skeleton(s: &SatStatement, top: &BTreeSet<Nominal>) -> u64 {
    fn nom(a: &Nominal, top: &BTreeSet<Nominal>, h: &mut DefaultHasher) {
        if top.contains(a) {
            a.hash(h);
        } else {
            0xdead_u32.hash(h);
        }
    }
    fn go(f: &Formula, top: &BTreeSet<Nominal>, h: &mut DefaultHasher) {
        std::mem::discriminant(f.kind()).hash(h);
        match f.kind() {
            FormulaKind::Nom(a) | FormulaKind::At(Term::Nom(a), _) => nom(a, top, h),
            FormulaKind::Prop(p) => p.hash(h),
            FormulaKind::Var(x) | FormulaKind::Down(x, _) | FormulaKind::At(Term::Var(x), _) => x.hash(h),
            FormulaKind::Diamond(r, n, _) | FormulaKind::Box(r, n, _) => (r, n).hash(h),
            _ => {}
        }
        for c in f.children() {
            go(c, top, h);
        }
    }
    let mut h = DefaultHasher::new();
    nom(&s.outer, top, &mut h);
    go(&s.body, top, &mut h);
    h.finish()
}

/// One pass in node order: direct blocking by the least earlier unblocked
/// node whose label maps onto this one, then inheritance along `≺`.
pub fn recompute_blocking(branch: &Branch) -> BlockingState {
    let top = branch.top_nominals();
    let compat = CompatIndex::build(branch);
    let mut status: Vec<BlockStatus> = Vec::with_capacity(branch.len());
    let mut candidates: HashMap<u64, Vec<NodeId>> = HashMap::new();
    for node in branch.nodes() {
        let blockable = match &node.label {
            Label::Sat(s) if Branch::is_blockable(s) => Some((s, skeleton(s, &top))),
            _ => None,
        };
        let mut st = BlockStatus::Free;
        if let Some((s, key)) = &blockable {
            for &m in candidates.get(key).into_iter().flatten() {
                let Label::Sat(ms) = &branch.node(m).label else { continue };
                if let Some(mapping) = try_map(ms, s, &top, &compat) {
                    st = BlockStatus::Direct(BlockRecord { blocked: node.id, blocker: m, mapping });
                    break;
                }
            }
        }
        if st == BlockStatus::Free {
            if let Some(p) = node.parent {
                if status[p.0] != BlockStatus::Free {
                    st = BlockStatus::Phantom;
                }
            }
        }
        if st == BlockStatus::Free {
            if let Some((_, key)) = blockable {
                candidates.entry(key).or_default().push(node.id);
            }
        }
        status.push(st);
    }
    BlockingState { status }
}
