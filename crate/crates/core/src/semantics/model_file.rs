//! Line-based model files:
//!
//! ```text
//! states 2
//! nominal 'a 0
//! prop 1 p q
//! rel r 0 1
//! ```

use std::fmt::Write;

use thiserror::Error;

use super::Interpretation;
use crate::syntax::{Nominal, Prop, RelSym};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model line {line}: {message}")]
pub struct ModelParseError {
    pub line: usize,
    pub message: String,
}

pub fn print_model(m: &Interpretation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "states {}", m.states);
    for (i, name) in m.names.iter().enumerate() {
        let _ = writeln!(out, "# state {i} = {name}");
    }
    for (a, w) in &m.nominals {
        let _ = writeln!(out, "nominal {a} {w}");
    }
    for (w, props) in m.valuation.iter().enumerate() {
        if !props.is_empty() {
            let names: Vec<&str> = props.iter().map(Prop::as_str).collect();
            let _ = writeln!(out, "prop {w} {}", names.join(" "));
        }
    }
    for (r, pairs) in &m.rho {
        if pairs.is_empty() {
            let _ = writeln!(out, "rel {r}");
        }
        for (u, v) in pairs {
            let _ = writeln!(out, "rel {r} {u} {v}");
        }
    }
    out
}

pub fn parse_model(text: &str) -> Result<Interpretation, ModelParseError> {
    let mut m: Option<Interpretation> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| ModelParseError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        if words[0] == "states" {
            if m.is_some() {
                return Err(err("duplicate `states` line".into()));
            }
            let n = words.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| err("expected a state count".into()))?;
            m = Some(Interpretation::new(n));
            continue;
        }
        let model = m.as_mut().ok_or_else(|| err("`states` must come first".into()))?;
        let states = model.states;
        let state = |s: Option<&&str>| -> Result<usize, ModelParseError> {
            let w: usize = s.and_then(|s| s.parse().ok()).ok_or_else(|| err("expected a state number".into()))?;
            if w >= states {
                return Err(err(format!("state {w} out of range")));
            }
            Ok(w)
        };
        match words[0] {
            "nominal" => {
                let name = words.get(1).and_then(|s| s.strip_prefix('\'')).ok_or_else(|| err("expected 'name".into()))?;
                let w = state(words.get(2))?;
                model.nominals.insert(Nominal::new(name), w);
            }
            "prop" => {
                let w = state(words.get(1))?;
                for p in &words[2..] {
                    model.valuation[w].insert(Prop::new(p));
                }
            }
            "rel" => {
                let r = RelSym::new(words.get(1).ok_or_else(|| err("expected a relation name".into()))?);
                let pair = match words.len() {
                    2 => None,
                    _ => Some((state(words.get(2))?, state(words.get(3))?)),
                };
                let set = model.rho.entry(r).or_default();
                set.extend(pair);
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    m.ok_or(ModelParseError { line: 0, message: "missing `states` line".into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut m = Interpretation::new(3);
        m.add_edge("r", 0, 1);
        m.add_edge("r", 2, 2);
        m.rho.entry(RelSym::new("s")).or_default();
        m.name("a", 2);
        m.name("_0", 0);
        m.set_prop("p", 1);
        m.set_prop("q", 1);
        assert_eq!(parse_model(&print_model(&m)).unwrap(), m);
    }

    #[test]
    fn errors() {
        assert_eq!(parse_model("nominal 'a 0").unwrap_err().line, 1);
        assert_eq!(parse_model("states 1\nrel r 0 1").unwrap_err().line, 2);
        assert!(parse_model("").is_err());
    }
}
