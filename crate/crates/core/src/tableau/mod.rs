//! Tableau branches, the expansion rules, and the search procedure.

mod branch;
mod rules;
mod search;
mod trace;

use std::fmt;

use thiserror::Error;

use crate::syntax::{Assertion, SatStatement};

pub use branch::{Branch, BranchStatus};
pub use rules::{apply_rule, find_inference, resolve_link_readings, Applied, Inference, RuleOutcome};
pub use search::{solve, solve_parallel, LimitKind, Limits, SolveConfig, SolveResult, Stats, Verdict};
pub use trace::{render_graph, render_text, Trace, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Sat(SatStatement),
    Assert(Assertion),
}

impl Label {
    pub fn sat(&self) -> Option<&SatStatement> {
        match self {
            Label::Sat(s) => Some(s),
            Label::Assert(_) => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Sat(s) => write!(f, "{s}"),
            Label::Assert(a) => write!(f, "{a}"),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    Init,
    Assertion,
    Rel0,
    Rel,
    And,
    Or,
    At,
    Down,
    Diamond,
    Box,
    Global,
    Exists,
    Equality,
    Link,
    Trans,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Init => "init",
            RuleKind::Assertion => "assertion",
            RuleKind::Rel0 => "Rel0",
            RuleKind::Rel => "Rel",
            RuleKind::And => "and",
            RuleKind::Or => "or",
            RuleKind::At => "@",
            RuleKind::Down => "down",
            RuleKind::Diamond => "dia",
            RuleKind::Box => "box",
            RuleKind::Global => "A",
            RuleKind::Exists => "E",
            RuleKind::Equality => "=",
            RuleKind::Link => "Link",
            RuleKind::Trans => "Trans",
        }
    }

    /// Rules whose premise is a blockable node.
    pub fn is_blockable_rule(self) -> bool {
        matches!(self, RuleKind::Diamond | RuleKind::Exists)
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub rule: RuleKind,
    pub premises: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub label: Label,
    /// Offspring parent; only blockable nodes have children.
    pub parent: Option<NodeId>,
    /// Set once a blockable node has been expanded.
    pub expanded: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("input formula still contains graded modalities; preprocess it first")]
    Graded,
    #[error("input formula has a binder over a universal operator; preprocess it first")]
    NotDownBoxFree,
    #[error("node {0} does not exist")]
    NoSuchNode(NodeId),
    #[error("premises {premises:?} do not match the {rule} rule")]
    Schema { rule: RuleKind, premises: Vec<NodeId> },
    #[error("restriction {restriction} forbids this application: {detail}")]
    Restriction { restriction: &'static str, detail: String },
    #[error("branch is already closed")]
    Closed,
}
