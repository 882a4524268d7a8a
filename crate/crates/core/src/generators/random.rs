use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::parser::Problem;
use crate::syntax::{Assertion, Formula, Nominal, Prop, RelSym, Relation, Var};

/// Symbols available to [`random_fragment`].
#[derive(Clone, Debug)]
pub struct Vocab {
    pub props: Vec<Prop>,
    pub nominals: Vec<Nominal>,
    pub rels: Vec<RelSym>,
    /// Inclusion assertions drawn per problem, at most.
    pub max_inclusions: usize,
    /// Chance that each relation is declared transitive.
    pub trans_prob: f64,
}

impl Default for Vocab {
    fn default() -> Self {
        Vocab {
            props: vec![Prop::new("p"), Prop::new("q")],
            nominals: vec![Nominal::new("a"), Nominal::new("b")],
            rels: vec![RelSym::new("r"), RelSym::new("s")],
            max_inclusions: 2,
            trans_prob: 0.3,
        }
    }
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    vocab: &'a Vocab,
    bound: Vec<Var>,
    next_var: usize,
}

impl Gen<'_> {
    fn rel(&mut self) -> Relation {
        let sym = self.vocab.rels.choose(&mut self.rng).expect("vocabulary has a relation").clone();
        if self.rng.gen_bool(0.25) {
            Relation::backward(sym)
        } else {
            Relation::forward(sym)
        }
    }

    fn literal(&mut self) -> Formula {
        let mut atoms: Vec<Formula> = Vec::new();
        atoms.extend(self.vocab.props.iter().map(|p| Formula::prop(p.clone())));
        atoms.extend(self.vocab.nominals.iter().map(|a| Formula::nom(a.clone())));
        atoms.extend(self.bound.iter().map(|x| Formula::var(x.clone())));
        let atom = atoms.choose(&mut self.rng).cloned().unwrap_or_else(Formula::tt);
        if self.rng.gen_bool(0.4) {
            Formula::not(atom)
        } else {
            atom
        }
    }

    /// NNF by construction; universal operators are never placed below a binder.
    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.15) {
            return self.literal();
        }
        let binder_above = !self.bound.is_empty();
        loop {
            let f = match self.rng.gen_range(0..10) {
                0 | 1 => Formula::and(self.formula(depth - 1), self.formula(depth - 1)),
                2 => Formula::or(self.formula(depth - 1), self.formula(depth - 1)),
                3 | 4 => {
                    let r = self.rel();
                    Formula::dia(r, self.formula(depth - 1))
                }
                5 if !binder_above => {
                    let r = self.rel();
                    Formula::boxed(r, self.formula(depth - 1))
                }
                6 => {
                    if self.rng.gen_bool(0.5) || binder_above {
                        Formula::exists(self.formula(depth - 1))
                    } else {
                        Formula::global(self.formula(depth - 1))
                    }
                }
                7 => match self.bound.last().cloned() {
                    Some(x) if self.rng.gen_bool(0.5) => Formula::at_var(x, self.formula(depth - 1)),
                    _ => {
                        let a = self.vocab.nominals.choose(&mut self.rng).cloned();
                        match a {
                            Some(a) => Formula::at(a, self.formula(depth - 1)),
                            None => continue,
                        }
                    }
                },
                8 | 9 => {
                    self.next_var += 1;
                    let x = Var::new(&format!("x{}", self.next_var));
                    self.bound.push(x.clone());
                    let body = self.formula(depth - 1);
                    self.bound.pop();
                    Formula::down(x, body)
                }
                _ => continue,
            };
            return f;
        }
    }
}

/// A deterministic pseudo-random problem whose formula has no binder over a
/// universal operator, with random transitivity and inclusion assertions.
pub fn random_fragment(seed: u64, depth: usize, vocab: &Vocab) -> Problem {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), vocab, bound: Vec::new(), next_var: 0 };
    let formula = g.formula(depth);
    let mut assertions = Vec::new();
    for r in &vocab.rels {
        if g.rng.gen_bool(vocab.trans_prob) {
            assertions.push(Assertion::Trans(r.clone()));
        }
    }
    if vocab.rels.len() > 1 {
        for _ in 0..g.rng.gen_range(0..=vocab.max_inclusions) {
            let left = g.rel();
            let right = vocab.rels.choose(&mut g.rng).unwrap().clone();
            if left.sym == right {
                continue;
            }
            let a = Assertion::Incl(left, right);
            if !assertions.contains(&a) {
                assertions.push(a);
            }
        }
    }
    Problem::new(assertions, formula)
}
