//! Syntactic fragment detection on NNF formulas.
//!
//! Universal operators are `□_R`, graded `□_Rⁿ` and `A`. Scope is plain AST
//! dominance; `@` does not cut it.

use std::fmt;

use crate::parser::Problem;
use crate::syntax::{nnf, Formula, FormulaKind};

/// Child-index path from the root of a formula.
pub type Path = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// A binder with a universal operator in its scope.
    DownBox,
    /// A `DownBox` binder that is itself in the scope of a universal operator.
    BoxDownBox,
    /// Graded box in the scope of a universal operator.
    Graded1a,
    /// Graded box whose body contains a `DownBox` binder.
    Graded1b,
    /// Graded diamond under a universal operator with a universal in its body.
    Graded2,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::DownBox => "down-box",
            Pattern::BoxDownBox => "box-down-box",
            Pattern::Graded1a => "graded restriction 1(a)",
            Pattern::Graded1b => "graded restriction 1(b)",
            Pattern::Graded2 => "graded restriction 2",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub pattern: Pattern,
    pub path: Path,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        write!(f, "{} at [{}]", self.pattern, path.join("."))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentVerdict {
    pub has_box_down_box: bool,
    pub has_down_box: bool,
    pub graded_ok: bool,
    pub witnesses: Vec<Witness>,
}

impl FragmentVerdict {
    /// Whether the preprocessor accepts the formula.
    pub fn accepted(&self) -> bool {
        !self.has_box_down_box && self.graded_ok
    }

    pub fn rejections(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| w.pattern != Pattern::DownBox)
    }
}

pub fn universal_ops(f: &Formula) -> Vec<Path> {
    let mut out = Vec::new();
    visit(f, &mut Vec::new(), false, &mut |g, path, _| {
        if g.is_universal() {
            out.push(path.to_vec());
        }
    });
    out
}

pub fn detect_down_box(f: &Formula) -> (bool, Vec<Witness>) {
    let mut out = Vec::new();
    visit(f, &mut Vec::new(), false, &mut |g, path, _| {
        if is_down_box(g) {
            out.push(Witness { pattern: Pattern::DownBox, path: path.to_vec() });
        }
    });
    (!out.is_empty(), out)
}

pub fn detect_box_down_box(f: &Formula) -> (bool, Vec<Witness>) {
    let mut out = Vec::new();
    visit(f, &mut Vec::new(), false, &mut |g, path, under| {
        if under && is_down_box(g) {
            out.push(Witness { pattern: Pattern::BoxDownBox, path: path.to_vec() });
        }
    });
    (!out.is_empty(), out)
}

pub fn check_graded_restrictions(f: &Formula) -> (bool, Vec<Witness>) {
    let mut out = Vec::new();
    visit(f, &mut Vec::new(), false, &mut |g, path, under| match g.kind() {
        FormulaKind::Box(_, Some(_), body) => {
            if under {
                out.push(Witness { pattern: Pattern::Graded1a, path: path.to_vec() });
            }
            let (_, inner) = detect_down_box(body);
            for w in inner {
                let mut p = path.to_vec();
                p.push(0);
                p.extend(w.path);
                out.push(Witness { pattern: Pattern::Graded1b, path: p });
            }
        }
        FormulaKind::Diamond(_, Some(_), body) if under && body.contains_universal() => {
            out.push(Witness { pattern: Pattern::Graded2, path: path.to_vec() });
        }
        _ => {}
    });
    (out.is_empty(), out)
}

/// Runs the three detectors on the NNF of the problem formula.
pub fn classify(p: &Problem) -> FragmentVerdict {
    classify_formula(&nnf(&p.formula))
}

pub fn classify_formula(f: &Formula) -> FragmentVerdict {
    let (has_down_box, mut witnesses) = detect_down_box(f);
    let (has_box_down_box, bdb) = detect_box_down_box(f);
    let (graded_ok, graded) = check_graded_restrictions(f);
    witnesses.extend(bdb);
    witnesses.extend(graded);
    FragmentVerdict { has_box_down_box, has_down_box, graded_ok, witnesses }
}

fn is_down_box(f: &Formula) -> bool {
    matches!(f.kind(), FormulaKind::Down(_, body) if body.contains_universal())
}

/// Pre-order walk passing the path and whether a strict ancestor is universal.
fn visit(
    f: &Formula,
    path: &mut Path,
    under: bool,
    op: &mut impl FnMut(&Formula, &[usize], bool),
) {
    op(f, path, under);
    let under = under || f.is_universal();
    for (i, c) in f.children().into_iter().enumerate() {
        path.push(i);
        visit(c, path, under, op);
        path.pop();
    }
}
