use std::fmt::Write;

use super::Problem;
use crate::syntax::{Formula, FormulaKind, Term};

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_at(f, 0, &mut out);
    out
}

/// Prints `f` so it can follow a prefix operator without re-association.
pub fn print_operand(f: &Formula) -> String {
    let mut out = String::new();
    write_at(f, 3, &mut out);
    out
}

pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    for a in &p.assertions {
        let _ = writeln!(out, "{a};");
    }
    let _ = writeln!(out, "formula: {};", print_formula(&p.formula));
    out
}

fn level(f: &Formula) -> u8 {
    match f.kind() {
        FormulaKind::Or(..) => 1,
        FormulaKind::And(..) => 2,
        _ => 3,
    }
}

/// Writes `f`, parenthesized when its own level is below `min`.
fn write_at(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        write_at(f, 0, out);
        out.push(')');
        return;
    }
    match f.kind() {
        FormulaKind::True => out.push_str("true"),
        FormulaKind::False => out.push_str("false"),
        FormulaKind::Prop(p) => out.push_str(p.as_str()),
        FormulaKind::Nom(a) => {
            let _ = write!(out, "{a}");
        }
        FormulaKind::Var(x) => out.push_str(x.as_str()),
        FormulaKind::Not(g) => {
            out.push('!');
            write_at(g, 3, out);
        }
        FormulaKind::And(a, b) => {
            write_at(a, 2, out);
            out.push_str(" & ");
            write_at(b, 3, out);
        }
        FormulaKind::Or(a, b) => {
            write_at(a, 1, out);
            out.push_str(" | ");
            write_at(b, 2, out);
        }
        FormulaKind::Diamond(r, n, g) => {
            let _ = write!(out, "<{r}>");
            prefix_tail(*n, g, out);
        }
        FormulaKind::Box(r, n, g) => {
            let _ = write!(out, "[{r}]");
            prefix_tail(*n, g, out);
        }
        FormulaKind::Exists(g) => prefix_tail(None, g, push(out, "<E>")),
        FormulaKind::Global(g) => prefix_tail(None, g, push(out, "[A]")),
        FormulaKind::At(t, g) => {
            match t {
                Term::Nom(a) => write!(out, "@{a}"),
                Term::Var(x) => write!(out, "@{x}"),
            }
            .ok();
            prefix_tail(None, g, out);
        }
        FormulaKind::Down(x, g) => {
            let _ = write!(out, "down {x} .");
            prefix_tail(None, g, out);
        }
    }
}

fn push<'a>(out: &'a mut String, s: &str) -> &'a mut String {
    out.push_str(s);
    out
}

fn prefix_tail(grade: Option<u32>, body: &Formula, out: &mut String) {
    if let Some(n) = grade {
        let _ = write!(out, "^{n}");
    }
    out.push(' ');
    write_at(body, 3, out);
}
