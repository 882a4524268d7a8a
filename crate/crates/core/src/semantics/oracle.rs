use std::collections::BTreeSet;

use thiserror::Error;

use super::{check_assertions, eval_sentence, Frame, Interpretation, State};
use crate::parser::Problem;
use crate::syntax::{Nominal, Prop, RelSym};

/// Default limit on the number of candidate models the oracle may visit.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("bounded enumeration needs {needed} candidate models, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("at most 8 states are supported, got {0}")]
    TooManyStates(usize),
}

/// Models with `k ≤ 8` states, relations packed as `k×k` bit matrices.
struct Packed<'a> {
    k: usize,
    rels: &'a [RelSym],
    rho: Vec<u64>,
    noms: &'a [Nominal],
    denot: Vec<State>,
    props: &'a [Prop],
    val: Vec<u64>,
}

impl Frame for Packed<'_> {
    fn num_states(&self) -> usize {
        self.k
    }

    fn related(&self, r: &RelSym, from: State, to: State) -> bool {
        match self.rels.iter().position(|s| s == r) {
            Some(i) => self.rho[i] >> (from * self.k + to) & 1 == 1,
            None => false,
        }
    }

    fn denotation(&self, a: &Nominal) -> Option<State> {
        self.noms.iter().position(|b| b == a).map(|i| self.denot[i])
    }

    fn holds(&self, p: &Prop, w: State) -> bool {
        match self.props.iter().position(|q| q == p) {
            Some(i) => self.val[i] >> w & 1 == 1,
            None => false,
        }
    }
}

impl Packed<'_> {
    fn unpack(&self) -> Interpretation {
        let mut m = Interpretation::new(self.k);
        for (i, r) in self.rels.iter().enumerate() {
            let set = m.rho.entry(r.clone()).or_default();
            for u in 0..self.k {
                for v in 0..self.k {
                    if self.rho[i] >> (u * self.k + v) & 1 == 1 {
                        set.insert((u, v));
                    }
                }
            }
        }
        for (a, &w) in self.noms.iter().zip(&self.denot) {
            m.nominals.insert(a.clone(), w);
        }
        for (i, p) in self.props.iter().enumerate() {
            for w in 0..self.k {
                if self.val[i] >> w & 1 == 1 {
                    m.valuation[w].insert(p.clone());
                }
            }
        }
        m
    }
}

/// Exhaustive search for a model with at most `max_states` states.
pub fn bounded_sat(p: &Problem, max_states: usize) -> Result<Option<Interpretation>, OracleError> {
    bounded_sat_with_budget(p, max_states, DEFAULT_BUDGET)
}

pub fn bounded_sat_with_budget(
    p: &Problem,
    max_states: usize,
    budget: u128,
) -> Result<Option<Interpretation>, OracleError> {
    if max_states > 8 {
        return Err(OracleError::TooManyStates(max_states));
    }
    let mut rel_set: BTreeSet<RelSym> = p.declared_rels.clone();
    rel_set.extend(p.formula.rel_syms());
    let rels: Vec<RelSym> = rel_set.into_iter().collect();
    let noms: Vec<Nominal> = p.formula.nominals().into_iter().collect();
    let props: Vec<Prop> = p.formula.props().into_iter().collect();

    let mut needed: u128 = 0;
    for k in 1..=max_states {
        needed = needed.saturating_add(count(k, rels.len(), noms.len(), props.len()));
    }
    if needed > budget {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }

    for k in 1..=max_states {
        let mut m = Packed {
            k,
            rels: &rels,
            rho: vec![0; rels.len()],
            noms: &noms,
            denot: vec![0; noms.len()],
            props: &props,
            val: vec![0; props.len()],
        };
        let cells = k * k;
        loop {
            if check_assertions(&m, &p.assertions) && search_rest(&mut m, p)? {
                return Ok(Some(m.unpack()));
            }
            if !advance(&mut m.rho, 1u64 << cells) {
                break;
            }
        }
    }
    Ok(None)
}

fn count(k: usize, rels: usize, noms: usize, props: usize) -> u128 {
    let bits = (k * k * rels + k * props) as u32;
    let Some(base) = 1u128.checked_shl(bits) else { return u128::MAX };
    base.saturating_mul((k as u128).saturating_pow(noms as u32))
}

/// Odometer step over digits in `0..radix`; false once it wraps around.
fn advance<T: Copy + PartialOrd + std::ops::Add<Output = T> + From<u8>>(digits: &mut [T], radix: T) -> bool {
    for d in digits.iter_mut() {
        *d = *d + T::from(1);
        if *d < radix {
            return true;
        }
        *d = T::from(0);
    }
    false
}

fn search_rest(m: &mut Packed<'_>, p: &Problem) -> Result<bool, OracleError> {
    let k = m.k;
    m.denot.iter_mut().for_each(|d| *d = 0);
    loop {
        m.val.iter_mut().for_each(|v| *v = 0);
        loop {
            for w in 0..k {
                if eval_sentence(m, w, &p.formula).unwrap_or(false) {
                    return Ok(true);
                }
            }
            if !advance(&mut m.val, 1u64 << k) {
                break;
            }
        }
        if !advance(&mut m.denot, k) {
            return Ok(false);
        }
    }
}
