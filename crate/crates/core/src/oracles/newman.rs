use serde::Serialize;

use super::{OracleError, RelatorHit, WordProblem};
use crate::presentations::OneRelatorPresentation;
use crate::words::{Mode, Word};

const MODE: Mode = Mode::FreeInverse;

/// Spelling-theorem reduction for `⟨A | r^m⟩`.
#[derive(Debug, Clone)]
pub struct NewmanOracle {
    pres: OneRelatorPresentation,
    rotations: Vec<(Word, bool)>,
    support: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OneRelatorTorsion {
    Trivial,
    /// Conjugate to `r^d` with `0 < |d| < m`.
    ConjPower(i64),
    NotShortTorsionForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Periodicity {
    /// Two occurrences; the word between them is `rotation^z`.
    Periodic { offsets: Vec<usize>, rotation: Word, z: usize },
    Single { offset: usize },
    Absent,
}

impl NewmanOracle {
    pub fn new(pres: &OneRelatorPresentation) -> NewmanOracle {
        let r = &pres.relator;
        let mut rotations: Vec<(Word, bool)> = Vec::new();
        for (word, inverted) in [(r.clone(), false), (r.invert(MODE), true)] {
            for k in 0..word.len() {
                let rot = word.rotate(k);
                if !rotations.iter().any(|(x, _)| *x == rot) {
                    rotations.push((rot, inverted));
                }
            }
        }
        NewmanOracle { pres: pres.clone(), rotations, support: r.support() }
    }

    pub fn presentation(&self) -> &OneRelatorPresentation {
        &self.pres
    }

    /// Rotations of `r` and `r⁻¹`, with a flag for the inverted ones.
    pub fn rotations(&self) -> &[(Word, bool)] {
        &self.rotations
    }

    fn covers_support(&self, x: &[crate::words::Letter]) -> bool {
        self.support.iter().all(|&g| x.iter().any(|l| l.gen() == g))
    }

    /// Leftmost subword `r_*^{m−1} x` with `x` a prefix of `r_*` containing every generator of `r`.
    pub fn newman_scan(&self, w: &Word) -> Option<RelatorHit> {
        let n = self.pres.relator.len();
        let m = self.pres.exponent as usize;
        let head = (m - 1) * n;
        for s in 0..w.len() {
            let mut best: Option<RelatorHit> = None;
            for (rot, _) in &self.rotations {
                if s + head >= w.len() {
                    break;
                }
                if (0..head).any(|t| w[s + t] != rot[t % n]) {
                    continue;
                }
                let x = w[s + head..].iter().zip(rot.iter()).take_while(|(a, b)| a == b).count();
                if x == 0 || !self.covers_support(&rot[..x]) {
                    continue;
                }
                if best.as_ref().map_or(true, |b| head + x > b.len) {
                    let relator = rot.power(m);
                    best = Some(RelatorHit {
                        matched: relator.subword(0, head + x),
                        complement: rot.subword(x, n - x),
                        relator,
                        start: s,
                        len: head + x,
                    });
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }

    pub fn newman_step(&self, w: &Word) -> Option<(RelatorHit, Word)> {
        let hit = self.newman_scan(w)?;
        let mut letters = w[..hit.start].to_vec();
        letters.extend_from_slice(&hit.complement.invert(MODE));
        letters.extend_from_slice(&w[hit.start + hit.len..]);
        Some((hit, Word::from(letters).free_reduce(MODE)))
    }

    pub fn newman_reduce(&self, w: &Word) -> Word {
        let mut cur = w.free_reduce(MODE);
        while let Some((_, next)) = self.newman_step(&cur) {
            cur = next;
        }
        cur
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.newman_reduce(w).is_empty()
    }

    pub fn cyclic_newman_reduce(&self, w: &Word) -> Word {
        let mut cur = self.newman_reduce(w);
        loop {
            let (core, _) = cur.cyclic_reduce(MODE);
            cur = core;
            let step = (0..cur.len()).find_map(|k| self.newman_step(&cur.rotate(k)).map(|(_, next)| next));
            match step {
                Some(next) => cur = self.newman_reduce(&next),
                None => return cur,
            }
        }
    }

    pub fn torsion_classify(&self, w: &Word) -> OneRelatorTorsion {
        let c = self.cyclic_newman_reduce(w);
        if c.is_empty() {
            return OneRelatorTorsion::Trivial;
        }
        let n = self.pres.relator.len();
        if c.len() % n != 0 {
            return OneRelatorTorsion::NotShortTorsionForm;
        }
        let d = (c.len() / n) as i64;
        for (rot, inverted) in &self.rotations {
            if rot.power(d as usize) == c {
                return OneRelatorTorsion::ConjPower(if *inverted { -d } else { d });
            }
        }
        OneRelatorTorsion::NotShortTorsionForm
    }
}

/// Locates `u` inside `r^d`. Two occurrences force the gap between them to be a power of a
/// rotation of `r`.
pub fn periodicity_check(u: &Word, r: &Word, d: usize) -> Result<Periodicity, OracleError> {
    if r.is_empty() || !r.is_cyclically_reduced(MODE) || r.is_proper_power().is_some() {
        return Err(OracleError::Precondition("r must be cyclically reduced and primitive".into()));
    }
    if u.len() < r.len() {
        return Err(OracleError::Precondition("|u| < |r|".into()));
    }
    let text = r.power(d);
    let offsets = text.occurrences(u);
    match offsets[..] {
        [] => Ok(Periodicity::Absent),
        [offset] => Ok(Periodicity::Single { offset }),
        [o1, o2, ..] => {
            let shift = o2 - o1;
            debug_assert_eq!(shift % r.len(), 0);
            Ok(Periodicity::Periodic { rotation: r.rotate(o1 % r.len()), z: shift / r.len(), offsets })
        }
    }
}

impl WordProblem for NewmanOracle {
    fn mode(&self) -> Mode {
        MODE
    }

    fn decide(&self, w: &Word) -> Option<bool> {
        Some(self.is_trivial(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn w(xs: &[i32]) -> Word {
        Word::from_signed(xs)
    }

    fn commutator(m: u32) -> NewmanOracle {
        let p = OneRelatorPresentation::new(Alphabet::numbered(2, MODE), w(&[1, 2, -1, -2]), m).unwrap();
        NewmanOracle::new(&p)
    }

    #[test]
    fn order_of_r() {
        let o = commutator(12);
        let r = w(&[1, 2, -1, -2]);
        assert!(o.is_trivial(&r.power(12)));
        assert!(!o.is_trivial(&r.power(11)));
        assert!(!o.is_trivial(&w(&[1])));
        assert!(o.is_trivial(&r.invert(MODE).power(12)));
        assert!(o.is_trivial(&w(&[2]).concat(&r.power(12)).concat(&w(&[-2]))));
    }

    #[test]
    fn torsion_examples() {
        let o = commutator(12);
        let r = w(&[1, 2, -1, -2]);
        assert_eq!(o.torsion_classify(&r.power(3)), OneRelatorTorsion::ConjPower(3));
        assert_eq!(o.torsion_classify(&r.power(12)), OneRelatorTorsion::Trivial);
        assert_eq!(o.torsion_classify(&w(&[1])), OneRelatorTorsion::NotShortTorsionForm);
        assert_eq!(o.torsion_classify(&r.invert(MODE).power(2)), OneRelatorTorsion::ConjPower(-2));
        // r^13 reduces to r
        assert_eq!(o.torsion_classify(&r.power(13)), OneRelatorTorsion::ConjPower(1));
    }

    #[test]
    fn replacements_shorten() {
        let o = commutator(3);
        let r = w(&[1, 2, -1, -2]);
        let x = r.power(2).concat(&w(&[1, 2]));
        let (hit, next) = o.newman_step(&x).unwrap();
        assert!(next.len() < x.len());
        assert_eq!(hit.matched.concat(&hit.complement), hit.relator);
        assert_eq!(next, w(&[2, 1]));
        // x must contain every letter of r
        assert!(o.newman_scan(&r.power(2).concat(&w(&[1]))).is_none());
    }

    #[test]
    fn periodicity_examples() {
        let r = w(&[1, 2, -1, -2, -2]);
        match periodicity_check(&r, &r, 2).unwrap() {
            Periodicity::Periodic { offsets, rotation, z } => {
                assert_eq!(offsets, vec![0, 5]);
                assert_eq!((rotation, z), (r.clone(), 1));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(periodicity_check(&r.invert(MODE), &r, 3).unwrap(), Periodicity::Absent);
        assert!(periodicity_check(&w(&[1]), &r, 3).is_err());
        let u = r.rotate(2).concat(&w(&[-1]));
        assert_eq!(periodicity_check(&u, &r, 2).unwrap(), Periodicity::Single { offset: 2 });
    }
}
