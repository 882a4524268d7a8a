//! Formula and problem generators: frame axioms, tiling encodings, random
//! fragment problems, and the exhaustive tiny corpus.

mod exhaustive;
mod random;
mod tiling;

use thiserror::Error;

use crate::syntax::{Assertion, Formula, RelSym, Relation};

pub use exhaustive::tiny_corpus;
pub use random::{random_fragment, Vocab};
pub use tiling::{tiling_at, tiling_conv, Tile, TileSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{kind} needs a count of at least 1, got {n}")]
    CountTooSmall { kind: &'static str, n: u32 },
    #[error("a tile set needs at least one tile")]
    EmptyTileSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    Transitivity,
    Symmetry,
    Reflexivity,
    AtMost(u32),
    Sibling,
    AtLeastSuccessors(u32),
}

/// A frame condition is expressed either by an assertion or by a formula
/// that must hold at the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameAxiom {
    Assertion(Assertion),
    Formula(Formula),
}

fn var(name: &str, i: u32) -> String {
    format!("{name}{i}")
}

pub fn frame_property(kind: FrameKind, r: &RelSym) -> Result<FrameAxiom, GenError> {
    let fwd = Relation::forward(r.clone());
    Ok(match kind {
        FrameKind::Transitivity => FrameAxiom::Assertion(Assertion::Trans(r.clone())),
        FrameKind::Symmetry => FrameAxiom::Assertion(Assertion::Incl(fwd.inv(), r.clone())),
        FrameKind::Reflexivity => {
            FrameAxiom::Formula(Formula::global(Formula::down("x", Formula::dia(fwd, Formula::var("x")))))
        }
        FrameKind::Sibling => FrameAxiom::Formula(Formula::global(Formula::down(
            "x",
            Formula::dia(fwd.inv(), Formula::dia(fwd, Formula::not(Formula::var("x")))),
        ))),
        FrameKind::AtMost(n) => {
            if n < 1 {
                return Err(GenError::CountTooSmall { kind: "at_most_n", n });
            }
            let mut f = Formula::global(Formula::or_all((1..=n).map(|i| Formula::var(var("x", i).as_str()))));
            for i in (1..=n).rev() {
                f = Formula::exists(Formula::down(var("x", i).as_str(), f));
            }
            FrameAxiom::Formula(f)
        }
        FrameKind::AtLeastSuccessors(n) => {
            if n < 1 {
                return Err(GenError::CountTooSmall { kind: "at_least_n_successors", n });
            }
            // Level k (1-based) asks for a successor distinct from y1..y(k-1)
            // and, below the last level, names it y(k).
            let distinct = |k: u32| (1..k).map(|i| Formula::not(Formula::var(var("y", i).as_str())));
            let mut inner = Formula::and_all(distinct(n));
            for k in (1..n).rev() {
                let named = Formula::down(var("y", k).as_str(), Formula::at_var("x", Formula::dia(fwd.clone(), inner)));
                inner = Formula::and_all(distinct(k).chain([named]));
            }
            FrameAxiom::Formula(Formula::global(Formula::down("x", Formula::dia(fwd, inner))))
        }
    })
}
