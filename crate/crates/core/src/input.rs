//! The line-oriented instance format.
//!
//! ```text
//! type coxeter
//! generators a b c
//! m a b 7
//! k 2
//! subgroup
//! gen a b c
//! gen c b a
//! ```

use std::fmt::Write;

use thiserror::Error;

use crate::fgraph::FGraph;
use crate::presentations::{
    ArtinPresentation, CoxeterPresentation, ExponentMatrix, OneRelatorPresentation, Presentation,
    PresentationError,
};
use crate::words::{Alphabet, Mode, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("line {0}: {1}")]
    Word(usize, WordError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("missing `{0}` line")]
    Missing(&'static str),
}

/// A presentation together with a finitely generated subgroup and an optional element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub presentation: Presentation,
    pub generators: Vec<Word>,
    pub element: Option<Word>,
    pub k: usize,
}

impl Instance {
    /// Bouquet of the subgroup generators; trivial generators are dropped.
    pub fn bouquet(&self) -> FGraph {
        FGraph::bouquet(&self.generators, self.presentation.alphabet()).expect("validated words").0
    }
}

enum Family {
    Coxeter,
    Artin,
    OneRelator,
}

fn err(line: usize, msg: impl Into<String>) -> InputError {
    InputError::Line(line, msg.into())
}

pub fn parse_input(text: &str) -> Result<Instance, InputError> {
    let mut family = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut pairs: Vec<(usize, usize, Option<u32>)> = Vec::new();
    let mut relator = None;
    let mut exponent = None;
    let mut k = None;
    let mut gens: Vec<(usize, String)> = Vec::new();
    let mut element = None;
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "type" => {
                family = Some(match rest {
                    "coxeter" => Family::Coxeter,
                    "artin" => Family::Artin,
                    "one-relator" => Family::OneRelator,
                    other => return Err(err(no, format!("unknown type `{other}`"))),
                })
            }
            "generators" => {
                let mode = match family {
                    Some(Family::Coxeter) => Mode::Involutive,
                    Some(_) => Mode::FreeInverse,
                    None => return Err(err(no, "`type` must come before `generators`")),
                };
                let a = Alphabet::new(rest.split_whitespace(), mode).map_err(|e| InputError::Word(no, e))?;
                alphabet = Some(a);
            }
            "m" => {
                let a = alphabet.as_ref().ok_or_else(|| err(no, "`generators` must come first"))?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let [x, y, val] = toks[..] else { return Err(err(no, "expected `m <name> <name> <nat|inf>`")) };
                let i = a.index_of(x).ok_or_else(|| InputError::Word(no, WordError::UnknownGenerator(x.into())))?;
                let j = a.index_of(y).ok_or_else(|| InputError::Word(no, WordError::UnknownGenerator(y.into())))?;
                if i == j {
                    return Err(err(no, "a generator cannot be paired with itself"));
                }
                let m = match val {
                    "inf" | "∞" => None,
                    n => {
                        let m: u32 = n.parse().map_err(|_| err(no, format!("bad exponent `{n}`")))?;
                        if m < 2 {
                            return Err(err(no, format!("exponent {m} is below 2")));
                        }
                        Some(m)
                    }
                };
                pairs.push((i, j, m));
            }
            "relator" => relator = Some((no, rest.to_string())),
            "exponent" => exponent = Some(rest.parse::<u32>().map_err(|_| err(no, format!("bad exponent `{rest}`")))?),
            "k" => k = Some(rest.parse::<usize>().map_err(|_| err(no, format!("bad k `{rest}`")))?),
            "subgroup" => {}
            "gen" => gens.push((no, rest.to_string())),
            "element" => element = Some((no, rest.to_string())),
            other => return Err(err(no, format!("unknown keyword `{other}`"))),
        }
    }
    let family = family.ok_or(InputError::Missing("type"))?;
    let alphabet = alphabet.ok_or(InputError::Missing("generators"))?;
    let word = |no: usize, text: &str| -> Result<Word, InputError> {
        let w = alphabet.parse_word(text).map_err(|e| InputError::Word(no, e))?;
        Ok(w.free_reduce(alphabet.mode))
    };
    let matrix = || {
        let mut m = ExponentMatrix::infinite(alphabet.len());
        for &(i, j, v) in &pairs {
            m.set(i, j, v);
        }
        m
    };
    let presentation = match family {
        Family::Coxeter => Presentation::Coxeter(CoxeterPresentation::new(alphabet.clone(), matrix())?),
        Family::Artin => Presentation::Artin(ArtinPresentation::new(alphabet.clone(), matrix())?),
        Family::OneRelator => {
            let (no, text) = relator.ok_or(InputError::Missing("relator"))?;
            let r = alphabet.parse_word(&text).map_err(|e| InputError::Word(no, e))?;
            let e = exponent.ok_or(InputError::Missing("exponent"))?;
            Presentation::OneRelator(OneRelatorPresentation::new(alphabet.clone(), r, e)?)
        }
    };
    let generators = gens.iter().map(|(no, t)| word(*no, t)).collect::<Result<Vec<_>, _>>()?;
    let element = element.map(|(no, t)| word(no, &t)).transpose()?;
    let k = k.unwrap_or(generators.len());
    Ok(Instance { presentation, generators, element, k })
}

/// Canonical text form; `parse_input` reads it back to the same instance.
pub fn print_input(inst: &Instance) -> String {
    let a = inst.presentation.alphabet();
    let mut s = String::new();
    let _ = writeln!(s, "type {}", inst.presentation.family());
    let _ = writeln!(s, "generators {}", a.names().join(" "));
    match &inst.presentation {
        Presentation::Coxeter(CoxeterPresentation { m, .. }) | Presentation::Artin(ArtinPresentation { m, .. }) => {
            for (i, j, v) in m.finite_pairs() {
                let _ = writeln!(s, "m {} {} {v}", a.names()[i], a.names()[j]);
            }
        }
        Presentation::OneRelator(p) => {
            let _ = writeln!(s, "relator {}", a.format_word(&p.relator));
            let _ = writeln!(s, "exponent {}", p.exponent);
        }
    }
    let _ = writeln!(s, "k {}", inst.k);
    s.push_str("subgroup\n");
    for g in &inst.generators {
        let text = if g.is_empty() { "1".to_string() } else { a.format_word(g) };
        let _ = writeln!(s, "gen {text}");
    }
    if let Some(e) = &inst.element {
        let text = if e.is_empty() { "1".to_string() } else { a.format_word(e) };
        let _ = writeln!(s, "element {text}");
    }
    s
}
