use super::GenError;
use crate::parser::Problem;
use crate::syntax::{Formula, Relation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub name: String,
    pub left: String,
    pub right: String,
    pub top: String,
    pub bottom: String,
}

impl Tile {
    pub fn new(name: &str, left: &str, right: &str, top: &str, bottom: &str) -> Self {
        let s = |x: &str| x.to_string();
        Tile { name: s(name), left: s(left), right: s(right), top: s(top), bottom: s(bottom) }
    }

    fn prop(&self) -> Formula {
        Formula::prop(format!("p_{}", self.name).as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileSet {
    pub tiles: Vec<Tile>,
}

impl TileSet {
    pub fn new(tiles: Vec<Tile>) -> Result<Self, GenError> {
        if tiles.is_empty() {
            return Err(GenError::EmptyTileSet);
        }
        Ok(TileSet { tiles })
    }
}

fn g() -> Relation {
    Relation::forward("g")
}

fn u() -> Relation {
    Relation::forward("u")
}

fn r() -> Relation {
    Relation::forward("r")
}

fn implies(a: Formula, b: Formula) -> Formula {
    Formula::or(Formula::not(a), b)
}

/// Spypoint: `'a` reaches every grid state through `g` and back.
fn alpha() -> Formula {
    let a = || Formula::nom("a");
    let back = |step: Relation| {
        Formula::boxed(
            g(),
            Formula::boxed(
                step,
                Formula::down("x", Formula::dia(g(), Formula::and(a(), Formula::dia(g(), Formula::var("x"))))),
            ),
        )
    };
    Formula::and_all([
        a(),
        Formula::dia(g(), a()),
        Formula::boxed(g(), Formula::dia(g(), a())),
        back(u()),
        back(r()),
    ])
}

/// Every grid state has exactly one `u` and one `r` successor.
fn beta() -> Formula {
    Formula::and_all([
        Formula::boxed(g(), Formula::dia(u(), Formula::tt())),
        Formula::boxed(g(), Formula::dia(r(), Formula::tt())),
        Formula::boxed(g(), Formula::box_n(u(), 1, Formula::ff())),
        Formula::boxed(g(), Formula::box_n(r(), 1, Formula::ff())),
    ])
}

/// At most one `u` and one `r` predecessor.
fn beta_inv() -> Formula {
    Formula::and(
        Formula::boxed(g(), Formula::box_n(u().inv(), 1, Formula::ff())),
        Formula::boxed(g(), Formula::box_n(r().inv(), 1, Formula::ff())),
    )
}

/// Up-then-right meets right-then-up, using `@`.
fn gamma() -> Formula {
    let back = Formula::at_var("x", Formula::dia(r(), Formula::dia(u(), Formula::var("y"))));
    Formula::boxed(
        g(),
        Formula::down("x", Formula::dia(u(), Formula::dia(r(), Formula::down("y", back)))),
    )
}

/// The same grid property with converses instead of `@`.
fn gamma_inv() -> Formula {
    let walk = Formula::dia(
        r().inv(),
        Formula::dia(u().inv(), Formula::dia(r(), Formula::dia(u(), Formula::var("x")))),
    );
    Formula::boxed(g(), Formula::boxed(u(), Formula::boxed(r(), Formula::down("x", walk))))
}

fn delta(t: &TileSet) -> Formula {
    let one = Formula::or_all(t.tiles.iter().map(|a| {
        Formula::and_all(
            std::iter::once(a.prop())
                .chain(t.tiles.iter().filter(|b| b.name != a.name).map(|b| Formula::not(b.prop()))),
        )
    }));
    let horizontal = Formula::and_all(t.tiles.iter().map(|a| {
        let next = Formula::or_all(t.tiles.iter().filter(|b| b.left == a.right).map(Tile::prop));
        implies(a.prop(), Formula::boxed(r(), next))
    }));
    let vertical = Formula::and_all(t.tiles.iter().map(|a| {
        let next = Formula::or_all(t.tiles.iter().filter(|b| b.bottom == a.top).map(Tile::prop));
        implies(a.prop(), Formula::boxed(u(), next))
    }));
    Formula::boxed(g(), Formula::and_all([one, horizontal, vertical]))
}

/// The grid encoding using `@`, `↓` and graded boxes.
pub fn tiling_at(t: &TileSet) -> Problem {
    Problem::new(vec![], Formula::and_all([alpha(), beta(), gamma(), delta(t)]))
}

/// The `@`-free variant using converse modalities.
pub fn tiling_conv(t: &TileSet) -> Problem {
    Problem::new(vec![], Formula::and_all([alpha(), beta(), beta_inv(), gamma_inv(), delta(t)]))
}
