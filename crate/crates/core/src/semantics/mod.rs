//! Finite interpretations, truth evaluation, a brute-force satisfiability
//! oracle, and model extraction from open tableau branches.

mod extract;
mod model_file;
mod oracle;
mod saturation;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{Assertion, Formula, FormulaKind, Nominal, Prop, RelSym, Relation, Term, Var};

pub use extract::{extract_model, ExtractionReport};
pub use model_file::{parse_model, print_model, ModelParseError};
pub use oracle::{bounded_sat, bounded_sat_with_budget, OracleError, DEFAULT_BUDGET};
pub use saturation::{validate_pseudo_saturation, Violation};

pub type State = usize;

/// Variable assignment.
pub type Assignment = BTreeMap<Var, State>;

/// Read access to a finite model, shared by [`Interpretation`] and the
/// oracle's packed representation.
pub trait Frame {
    fn num_states(&self) -> usize;
    fn related(&self, r: &RelSym, from: State, to: State) -> bool;
    fn denotation(&self, a: &Nominal) -> Option<State>;
    fn holds(&self, p: &Prop, w: State) -> bool;
}

/// Finite model `⟨W, ρ, N, I⟩` with `W = 0..states`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub states: usize,
    pub rho: BTreeMap<RelSym, BTreeSet<(State, State)>>,
    pub nominals: BTreeMap<Nominal, State>,
    pub valuation: Vec<BTreeSet<Prop>>,
    /// Optional human-readable state names, indexed by state.
    pub names: Vec<String>,
}

impl Interpretation {
    pub fn new(states: usize) -> Self {
        Interpretation { states, valuation: vec![BTreeSet::new(); states], ..Default::default() }
    }

    pub fn add_edge(&mut self, r: &str, from: State, to: State) {
        self.rho.entry(RelSym::new(r)).or_default().insert((from, to));
    }

    pub fn set_prop(&mut self, p: &str, w: State) {
        self.valuation[w].insert(Prop::new(p));
    }

    pub fn name(&mut self, a: &str, w: State) {
        self.nominals.insert(Nominal::new(a), w);
    }

    /// Pairs of `R`, reversed when `R` is backward.
    pub fn pairs(&self, rel: &Relation) -> BTreeSet<(State, State)> {
        let base = self.rho.get(&rel.sym).cloned().unwrap_or_default();
        if rel.is_forward() {
            base
        } else {
            base.into_iter().map(|(a, b)| (b, a)).collect()
        }
    }
}

impl Frame for Interpretation {
    fn num_states(&self) -> usize {
        self.states
    }

    fn related(&self, r: &RelSym, from: State, to: State) -> bool {
        self.rho.get(r).is_some_and(|s| s.contains(&(from, to)))
    }

    fn denotation(&self, a: &Nominal) -> Option<State> {
        self.nominals.get(a).copied()
    }

    fn holds(&self, p: &Prop, w: State) -> bool {
        self.valuation.get(w).is_some_and(|v| v.contains(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    UnboundVariable(Var),
    #[error("nominal {0} has no denotation")]
    UnknownNominal(Nominal),
    #[error("state {0} is out of range")]
    BadState(State),
}

/// Truth of `f` at `w` under `sigma`.
pub fn eval(m: &impl Frame, w: State, sigma: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    if w >= m.num_states() {
        return Err(EvalError::BadState(w));
    }
    let mut env: Vec<(Var, State)> = sigma.iter().map(|(x, s)| (x.clone(), *s)).collect();
    ev(m, w, &mut env, f)
}

/// Truth of a sentence at `w` with the empty assignment.
pub fn eval_sentence(m: &impl Frame, w: State, f: &Formula) -> Result<bool, EvalError> {
    eval(m, w, &Assignment::new(), f)
}

fn lookup(env: &[(Var, State)], x: &Var) -> Result<State, EvalError> {
    env.iter()
        .rev()
        .find(|(y, _)| y == x)
        .map(|(_, s)| *s)
        .ok_or_else(|| EvalError::UnboundVariable(x.clone()))
}

fn step(m: &impl Frame, rel: &Relation, w: State, v: State) -> bool {
    if rel.is_forward() {
        m.related(&rel.sym, w, v)
    } else {
        m.related(&rel.sym, v, w)
    }
}

fn ev(m: &impl Frame, w: State, env: &mut Vec<(Var, State)>, f: &Formula) -> Result<bool, EvalError> {
    Ok(match f.kind() {
        FormulaKind::True => true,
        FormulaKind::False => false,
        FormulaKind::Prop(p) => m.holds(p, w),
        FormulaKind::Nom(a) => m.denotation(a).ok_or_else(|| EvalError::UnknownNominal(a.clone()))? == w,
        FormulaKind::Var(x) => lookup(env, x)? == w,
        FormulaKind::Not(g) => !ev(m, w, env, g)?,
        FormulaKind::And(a, b) => ev(m, w, env, a)? && ev(m, w, env, b)?,
        FormulaKind::Or(a, b) => ev(m, w, env, a)? || ev(m, w, env, b)?,
        FormulaKind::Diamond(r, grade, g) => {
            let need = grade.map_or(1, |n| n as usize + 1);
            let mut found = 0;
            for v in 0..m.num_states() {
                if step(m, r, w, v) && ev(m, v, env, g)? {
                    found += 1;
                    if found >= need {
                        return Ok(true);
                    }
                }
            }
            false
        }
        FormulaKind::Box(r, grade, g) => {
            let allowed = grade.unwrap_or(0) as usize;
            let mut failures = 0;
            for v in 0..m.num_states() {
                if step(m, r, w, v) && !ev(m, v, env, g)? {
                    failures += 1;
                    if failures > allowed {
                        return Ok(false);
                    }
                }
            }
            true
        }
        FormulaKind::Exists(g) => {
            for v in 0..m.num_states() {
                if ev(m, v, env, g)? {
                    return Ok(true);
                }
            }
            false
        }
        FormulaKind::Global(g) => {
            for v in 0..m.num_states() {
                if !ev(m, v, env, g)? {
                    return Ok(false);
                }
            }
            true
        }
        FormulaKind::At(t, g) => {
            let v = match t {
                Term::Nom(a) => m.denotation(a).ok_or_else(|| EvalError::UnknownNominal(a.clone()))?,
                Term::Var(x) => lookup(env, x)?,
            };
            ev(m, v, env, g)?
        }
        FormulaKind::Down(x, g) => {
            env.push((x.clone(), w));
            let out = ev(m, w, env, g);
            env.pop();
            out?
        }
    })
}

/// Whether the model satisfies every frame assertion.
pub fn check_assertions(m: &impl Frame, assertions: &[Assertion]) -> bool {
    let n = m.num_states();
    assertions.iter().all(|a| match a {
        Assertion::Trans(r) => (0..n).all(|u| {
            (0..n).all(|v| !m.related(r, u, v) || (0..n).all(|w| !m.related(r, v, w) || m.related(r, u, w)))
        }),
        Assertion::Incl(left, right) => (0..n).all(|u| {
            (0..n).all(|v| !step(m, left, u, v) || m.related(right, u, v))
        }),
    })
}
