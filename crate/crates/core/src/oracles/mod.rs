//! Word-problem and relator-detection engines for the three families.

mod coxeter;
mod dihedral;
mod newman;

pub use coxeter::{CoxeterOracle, RppReport, RppViolation, TorsionClass};
pub use dihedral::{
    artin_dihedral_is_trivial, artin_dihedral_normal_form, artin_relator_search, ArtinOracle,
    DihedralNormalForm, SearchBounds,
};
pub use newman::{periodicity_check, NewmanOracle, OneRelatorTorsion, Periodicity};

use serde::Serialize;

use crate::presentations::Presentation;
use thiserror::Error;

use crate::words::{Mode, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("word uses generator {0} outside the pair")]
    ForeignGenerator(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("presentation is not of extra-large type")]
    NotExtraLarge,
}

/// A located relator fragment inside a word: `matched · complement` is a relator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelatorHit {
    pub relator: Word,
    pub start: usize,
    pub len: usize,
    pub matched: Word,
    pub complement: Word,
}

/// Decides triviality of words in a fixed group, possibly only on a sub-domain.
pub trait WordProblem {
    fn mode(&self) -> Mode;

    /// `Some(true)` if `w = 1`, `Some(false)` if not, `None` if outside the decidable domain.
    fn decide(&self, w: &Word) -> Option<bool>;

    fn equal(&self, u: &Word, v: &Word) -> Option<bool> {
        self.decide(&u.concat(&v.invert(self.mode())))
    }
}

/// Outcome of the family's word-problem solver on one word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordReport {
    /// `None` outside the decidable domain.
    pub trivial: Option<bool>,
    pub reduced: Word,
    pub hits: Vec<RelatorHit>,
}

/// Reduces `w` with the family's algorithm, recording each relator replacement.
pub fn solve_word(p: &Presentation, w: &Word) -> Result<WordReport, OracleError> {
    match p {
        Presentation::Coxeter(p) => {
            let (reduced, hits) = CoxeterOracle::new(p)?.dehn_reduce_traced(w);
            Ok(WordReport { trivial: Some(reduced.is_empty()), reduced, hits })
        }
        Presentation::OneRelator(p) => {
            let oracle = NewmanOracle::new(p);
            let mut cur = w.free_reduce(Mode::FreeInverse);
            let mut hits = Vec::new();
            while let Some((hit, next)) = oracle.newman_step(&cur) {
                hits.push(hit);
                cur = next;
            }
            Ok(WordReport { trivial: Some(cur.is_empty()), reduced: cur, hits })
        }
        Presentation::Artin(p) => {
            let pair = match w.support()[..] {
                [i, j] => p.m.get(i, j).map(|m| (i, j, m as usize)),
                _ => None,
            };
            let reduced = match pair {
                Some((i, j, m)) => artin_dihedral_normal_form(w, i, j, m)?.to_word(i, j, m),
                None => w.free_reduce(Mode::FreeInverse),
            };
            Ok(WordReport { trivial: ArtinOracle::new(p).decide(w), reduced, hits: Vec::new() })
        }
    }
}
