use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use super::rules::{apply_rule, find_inference, RuleOutcome};
use super::trace::{Trace, TraceEvent};
use super::{Branch, BranchStatus, NodeId, TableauError};
use crate::parser::Problem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum nodes on a single branch.
    pub node_cap: usize,
    /// Maximum branches created over the whole search.
    pub branch_cap: usize,
    pub time_cap: Duration,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { node_cap: 100_000, branch_cap: 10_000, time_cap: Duration::from_secs(60) }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveConfig {
    pub limits: Limits,
    pub record_trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKind {
    Nodes,
    Branches,
    Time,
}

impl std::fmt::Display for LimitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LimitKind::Nodes => "node cap",
            LimitKind::Branches => "branch cap",
            LimitKind::Time => "time cap",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// The first complete open branch in left-to-right order.
    Sat(Box<Branch>),
    Unsat,
    ResourceLimit(LimitKind),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub branches: usize,
    pub closed: usize,
    pub rule_applications: usize,
    pub max_nodes: usize,
}

impl Stats {
    fn merge(&mut self, o: &Stats) {
        self.branches += o.branches;
        self.closed += o.closed;
        self.rule_applications += o.rule_applications;
        self.max_nodes = self.max_nodes.max(o.max_nodes);
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub trace: Option<Trace>,
    pub stats: Stats,
}

enum Run {
    Complete(Branch),
    Closed,
    Limit(LimitKind),
}

struct Ctx<'a> {
    limits: &'a Limits,
    start: Instant,
    trace: Option<&'a mut Trace>,
    stats: Stats,
}

impl Ctx<'_> {
    fn emit(&mut self, e: TraceEvent) {
        if let Some(t) = self.trace.as_deref_mut() {
            t.events.push(e);
        }
    }

    fn emit_nodes(&mut self, b: &Branch, ids: &[NodeId]) {
        if self.trace.is_none() {
            return;
        }
        for &id in ids {
            let n = b.node(id);
            self.emit(TraceEvent::Node {
                branch: b.id,
                id,
                label: n.label.clone(),
                parent: n.parent,
                rule: n.provenance.rule,
                premises: n.provenance.premises.clone(),
            });
        }
    }

    /// Expands one branch until it closes, completes, or splits. `spawn`
    /// receives the right-hand side of each split and returns its branch id.
    fn run(&mut self, mut b: Branch, spawn: &mut dyn FnMut(Branch, &mut Stats) -> Option<usize>) -> Run {
        loop {
            if let BranchStatus::Closed(m, n) = b.status() {
                self.stats.closed += 1;
                self.emit(TraceEvent::Closed { branch: b.id, pair: (m, n) });
                return Run::Closed;
            }
            if b.len() > self.limits.node_cap {
                self.emit(TraceEvent::Limit { branch: b.id, kind: LimitKind::Nodes });
                return Run::Limit(LimitKind::Nodes);
            }
            if self.start.elapsed() > self.limits.time_cap {
                self.emit(TraceEvent::Limit { branch: b.id, kind: LimitKind::Time });
                return Run::Limit(LimitKind::Time);
            }
            let Some(inf) = find_inference(&mut b) else {
                b.set_complete();
                self.emit(TraceEvent::Complete { branch: b.id });
                return Run::Complete(b);
            };
            let id = b.id;
            let outcome = apply_rule(b, &inf).expect("scheduled inferences satisfy the restrictions");
            self.stats.rule_applications += 1;
            b = match outcome {
                RuleOutcome::One(next, applied) => {
                    if let Some((from, to)) = &applied.substitution {
                        self.emit(TraceEvent::Substitution {
                            branch: id,
                            premise: applied.premises[0],
                            from: from.clone(),
                            to: to.clone(),
                        });
                    }
                    self.emit_nodes(&next, &applied.added);
                    next
                }
                RuleOutcome::Split(mut left, mut right, applied) => {
                    left.path.push(0);
                    right.path.push(1);
                    let added = applied.added.clone();
                    let right_for_trace = self.trace.as_ref().map(|_| right.clone());
                    let Some(right_id) = spawn(right, &mut self.stats) else {
                        self.emit(TraceEvent::Limit { branch: id, kind: LimitKind::Branches });
                        return Run::Limit(LimitKind::Branches);
                    };
                    left.id = id;
                    self.emit(TraceEvent::Split { branch: id, premise: applied.premises[0], right: right_id });
                    self.emit_nodes(&left, &added);
                    if let Some(mut r) = right_for_trace {
                        r.id = right_id;
                        self.emit(TraceEvent::BranchStart { branch: right_id, from: Some(id) });
                        self.emit_nodes(&r, &added);
                    }
                    left
                }
            };
            self.stats.max_nodes = self.stats.max_nodes.max(b.len());
        }
    }
}

fn initial(p: &Problem, trace: &mut Option<Trace>) -> Result<Branch, TableauError> {
    let b = Branch::init(p)?;
    if let Some(t) = trace {
        t.events.push(TraceEvent::BranchStart { branch: 0, from: None });
        for n in b.nodes() {
            t.events.push(TraceEvent::Node {
                branch: 0,
                id: n.id,
                label: n.label.clone(),
                parent: n.parent,
                rule: n.provenance.rule,
                premises: n.provenance.premises.clone(),
            });
        }
    }
    Ok(b)
}

/// Depth-first search, left branch first. The input must be ungraded and
/// free of binders over universal operators.
pub fn solve(p: &Problem, config: &SolveConfig) -> Result<SolveResult, TableauError> {
    let mut trace = config.record_trace.then(Trace::default);
    let root = initial(p, &mut trace)?;
    let mut stack: Vec<Branch> = vec![root];
    let mut created = 1usize;
    let mut ctx = Ctx { limits: &config.limits, start: Instant::now(), trace: trace.as_mut(), stats: Stats::default() };
    ctx.stats.branches = 1;
    let mut verdict = Verdict::Unsat;
    while let Some(b) = stack.pop() {
        let mut pending = Vec::new();
        let mut spawn = |mut r: Branch, stats: &mut Stats| {
            if created >= config.limits.branch_cap {
                return None;
            }
            r.id = created;
            created += 1;
            stats.branches += 1;
            let id = r.id;
            pending.push(r);
            Some(id)
        };
        let run = ctx.run(b, &mut spawn);
        // Right siblings are explored after the current branch, innermost split first.
        stack.extend(pending);
        match run {
            Run::Closed => {}
            Run::Complete(b) => {
                verdict = Verdict::Sat(Box::new(b));
                break;
            }
            Run::Limit(k) => {
                verdict = Verdict::ResourceLimit(k);
                break;
            }
        }
    }
    let stats = ctx.stats;
    Ok(SolveResult { verdict, trace, stats })
}

struct Shared {
    stack: Vec<Branch>,
    active: usize,
    best: Option<Branch>,
    limit: Option<LimitKind>,
    created: usize,
    stats: Stats,
}

/// Explores branches on `jobs` threads. Returns the same verdict as [`solve`]
/// (and, for SAT, the same branch) unless a resource cap is hit. Trace
/// recording forces sequential search.
pub fn solve_parallel(p: &Problem, config: &SolveConfig, jobs: usize) -> Result<SolveResult, TableauError> {
    if jobs <= 1 || config.record_trace {
        return solve(p, config);
    }
    let root = initial(p, &mut None)?;
    let start = Instant::now();
    let shared = Mutex::new(Shared {
        stack: vec![root],
        active: 0,
        best: None,
        limit: None,
        created: 1,
        stats: Stats { branches: 1, ..Stats::default() },
    });
    let cv = Condvar::new();
    let worker = || loop {
        let b = {
            let mut s = shared.lock().unwrap();
            loop {
                if s.limit.is_some() {
                    return;
                }
                if let Some(b) = s.stack.pop() {
                    if s.best.as_ref().is_some_and(|best| b.path > best.path) {
                        continue;
                    }
                    s.active += 1;
                    break b;
                }
                if s.active == 0 {
                    cv.notify_all();
                    return;
                }
                s = cv.wait(s).unwrap();
            }
        };
        let mut ctx = Ctx { limits: &config.limits, start, trace: None, stats: Stats::default() };
        let mut spawn = |mut r: Branch, _: &mut Stats| {
            let mut s = shared.lock().unwrap();
            if s.created >= config.limits.branch_cap {
                return None;
            }
            r.id = s.created;
            s.created += 1;
            s.stats.branches += 1;
            let id = r.id;
            s.stack.push(r);
            cv.notify_one();
            Some(id)
        };
        let run = ctx.run(b, &mut spawn);
        let mut s = shared.lock().unwrap();
        s.active -= 1;
        s.stats.merge(&ctx.stats);
        match run {
            Run::Closed => {}
            Run::Complete(b) => {
                if s.best.as_ref().is_none_or(|best| b.path < best.path) {
                    s.best = Some(b);
                }
            }
            Run::Limit(k) => {
                // A limit only matters if no earlier SAT branch could win.
                s.limit.get_or_insert(k);
            }
        }
        cv.notify_all();
    };
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(worker);
        }
    });
    let s = shared.into_inner().unwrap();
    let verdict = match (s.best, s.limit) {
        (_, Some(k)) => Verdict::ResourceLimit(k),
        (Some(b), None) => Verdict::Sat(Box::new(b)),
        (None, None) => Verdict::Unsat,
    };
    Ok(SolveResult { verdict, trace: None, stats: s.stats })
}
