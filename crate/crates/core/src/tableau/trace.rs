use std::collections::BTreeMap;
use std::fmt::Write;

use super::search::LimitKind;
use super::{Label, NodeId, RuleKind};
use crate::syntax::Nominal;

/// One step of a derivation. Node labels are recorded as created, before any
/// later substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    BranchStart { branch: usize, from: Option<usize> },
    Node { branch: usize, id: NodeId, label: Label, parent: Option<NodeId>, rule: RuleKind, premises: Vec<NodeId> },
    Substitution { branch: usize, premise: NodeId, from: Nominal, to: Nominal },
    /// The left side keeps `branch`; the right side becomes `right`.
    Split { branch: usize, premise: NodeId, right: usize },
    Closed { branch: usize, pair: (NodeId, NodeId) },
    Complete { branch: usize },
    Limit { branch: usize, kind: LimitKind },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    /// Nodes added by `rule`, across all branches.
    pub fn applications(&self, rule: RuleKind) -> impl Iterator<Item = (usize, NodeId, &[NodeId])> {
        self.events.iter().filter_map(move |e| match e {
            TraceEvent::Node { branch, id, rule: r, premises, .. } if *r == rule => {
                Some((*branch, *id, premises.as_slice()))
            }
            _ => None,
        })
    }

    pub fn count(&self, rule: RuleKind) -> usize {
        self.applications(rule).count()
    }

    pub fn first_node(&self, label: &Label) -> Option<NodeId> {
        self.events.iter().find_map(|e| match e {
            TraceEvent::Node { id, label: l, .. } if l == label => Some(*id),
            _ => None,
        })
    }
}

fn provenance(id: NodeId, rule: RuleKind, premises: &[NodeId]) -> String {
    match (rule, premises) {
        (RuleKind::Init | RuleKind::Assertion, _) => String::new(),
        (RuleKind::Rel0, _) => "Rel0".to_string(),
        (_, [p]) => format!("{p} ~>{} {id}", rule.name()),
        _ => {
            let ps: Vec<String> = premises.iter().map(|p| p.to_string()).collect();
            format!("({}) ~>{} {id}", ps.join(","), rule.name())
        }
    }
}

/// One line per node, `(n) label   provenance`, with branch headers.
pub fn render_text(t: &Trace) -> String {
    let mut out = String::new();
    for e in &t.events {
        let _ = match e {
            TraceEvent::BranchStart { branch, from: None } => writeln!(out, "branch {branch}"),
            TraceEvent::BranchStart { branch, from: Some(f) } => writeln!(out, "branch {branch} (split from {f})"),
            TraceEvent::Node { id, label, rule, premises, .. } => {
                let head = format!("({id}) {label}");
                let prov = provenance(*id, *rule, premises);
                if prov.is_empty() {
                    writeln!(out, "{head}")
                } else {
                    writeln!(out, "{head:<40} {prov}")
                }
            }
            TraceEvent::Substitution { premise, from, to, .. } => {
                writeln!(out, "    {premise} ~>= replace {from} by {to}")
            }
            TraceEvent::Split { branch, premise, right } => {
                writeln!(out, "    {premise} ~>or splits branch {branch}; right side is branch {right}")
            }
            TraceEvent::Closed { branch, pair: (m, n) } if m == n => {
                writeln!(out, "branch {branch} closed by node {m}")
            }
            TraceEvent::Closed { branch, pair: (m, n) } => writeln!(out, "branch {branch} closed by nodes {m} and {n}"),
            TraceEvent::Complete { branch } => writeln!(out, "branch {branch} complete and open"),
            TraceEvent::Limit { branch, kind } => writeln!(out, "branch {branch} stopped: {kind} reached"),
        };
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Clone)]
struct GraphNode {
    id: NodeId,
    label: String,
    parent: Option<NodeId>,
}

/// Graphviz DOT: one cluster per branch holding its nodes and offspring edges.
pub fn render_graph(t: &Trace) -> String {
    let mut branches: BTreeMap<usize, Vec<GraphNode>> = BTreeMap::new();
    let mut snapshots: BTreeMap<usize, Vec<GraphNode>> = BTreeMap::new();
    let mut outcome: BTreeMap<usize, String> = BTreeMap::new();
    for e in &t.events {
        match e {
            TraceEvent::BranchStart { branch, .. } => {
                let inherited = snapshots.remove(branch).unwrap_or_default();
                branches.insert(*branch, inherited);
            }
            TraceEvent::Node { branch, id, label, parent, .. } => {
                branches.entry(*branch).or_default().push(GraphNode { id: *id, label: label.to_string(), parent: *parent });
            }
            TraceEvent::Split { branch, right, .. } => {
                snapshots.insert(*right, branches.get(branch).cloned().unwrap_or_default());
            }
            TraceEvent::Closed { branch, pair: (m, n) } => {
                outcome.insert(*branch, format!("closed by {m}, {n}"));
            }
            TraceEvent::Complete { branch } => {
                outcome.insert(*branch, "open".into());
            }
            TraceEvent::Limit { branch, kind } => {
                outcome.insert(*branch, format!("{kind} reached"));
            }
            TraceEvent::Substitution { .. } => {}
        }
    }
    let mut out = String::from("digraph tableau {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (b, nodes) in &branches {
        let _ = writeln!(out, "  subgraph cluster_{b} {{");
        let title = match outcome.get(b) {
            Some(o) => format!("branch {b}: {o}"),
            None => format!("branch {b}"),
        };
        let _ = writeln!(out, "    label=\"{}\";", escape(&title));
        for n in nodes {
            let _ = writeln!(out, "    b{b}_{} [label=\"({}) {}\"];", n.id, n.id, escape(&n.label));
        }
        for n in nodes {
            if let Some(p) = n.parent {
                let _ = writeln!(out, "    b{b}_{p} -> b{b}_{};", n.id);
            }
        }
        let _ = writeln!(out, "  }}");
    }
    out.push_str("}\n");
    out
}
