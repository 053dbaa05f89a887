use serde::Serialize;

use super::{OracleError, WordProblem};
use crate::presentations::{alternating, ArtinPresentation};
use crate::words::{Letter, Mode, Word};

/// `Δ^p · s_1 ⋯ s_k` with each `s_i` a proper alternating positive word `(first letter, length)`
/// and each factor starting with the last letter of the previous one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DihedralNormalForm {
    pub delta_power: i64,
    pub factors: Vec<(usize, usize)>,
}

impl DihedralNormalForm {
    pub fn is_identity(&self) -> bool {
        self.delta_power == 0 && self.factors.is_empty()
    }

    pub fn to_word(&self, i: usize, j: usize, m: usize) -> Word {
        let delta = alternating(i, j, m);
        let block = if self.delta_power >= 0 { delta } else { delta.invert(Mode::FreeInverse) };
        let mut out = block.power(self.delta_power.unsigned_abs() as usize);
        for &(g, len) in &self.factors {
            let other = if g == i { j } else { i };
            out = out.concat(&alternating(g, other, len));
        }
        out
    }
}

struct Builder {
    i: usize,
    j: usize,
    m: usize,
    nf: DihedralNormalForm,
}

impl Builder {
    fn other(&self, g: usize) -> usize {
        if g == self.i {
            self.j
        } else {
            self.i
        }
    }

    fn tau_all(&mut self) {
        if self.m % 2 == 1 {
            let (i, j) = (self.i, self.j);
            for f in &mut self.nf.factors {
                f.0 = if f.0 == i { j } else { i };
            }
        }
    }

    fn push_positive(&mut self, g: usize) {
        let Some(&(start, len)) = self.nf.factors.last() else {
            self.nf.factors.push((g, 1));
            return;
        };
        let last = if len % 2 == 1 { start } else { self.other(start) };
        if g == last {
            self.nf.factors.push((g, 1));
            return;
        }
        if len + 1 < self.m {
            self.nf.factors.last_mut().expect("nonempty").1 += 1;
            return;
        }
        // the last factor became Δ; move it to the front
        self.nf.factors.pop();
        self.tau_all();
        self.nf.delta_power += 1;
    }

    fn push_negative(&mut self, g: usize) {
        let o = self.other(g);
        for t in 0..self.m - 1 {
            self.push_positive(if t % 2 == 0 { o } else { g });
        }
        self.tau_all();
        self.nf.delta_power -= 1;
    }
}

/// Greedy normal form in the Artin group `⟨a_i, a_j | u_ij = u_ji⟩` with `|u_ij| = m`.
pub fn artin_dihedral_normal_form(w: &Word, i: usize, j: usize, m: usize) -> Result<DihedralNormalForm, OracleError> {
    if m < 2 || i == j {
        return Err(OracleError::Precondition(format!("need distinct generators and m ≥ 2, got m = {m}")));
    }
    let mut b = Builder { i, j, m, nf: DihedralNormalForm { delta_power: 0, factors: Vec::new() } };
    for &l in w.iter() {
        if l.gen() != i && l.gen() != j {
            return Err(OracleError::ForeignGenerator(l.gen()));
        }
        if l.is_positive() {
            b.push_positive(l.gen());
        } else {
            b.push_negative(l.gen());
        }
    }
    Ok(b.nf)
}

pub fn artin_dihedral_is_trivial(w: &Word, i: usize, j: usize, m: usize) -> Result<bool, OracleError> {
    Ok(artin_dihedral_normal_form(w, i, j, m)?.is_identity())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SearchBounds {
    /// Largest syllable exponent tried; defaults to `|v| + 2m`.
    pub exponent_cap: Option<usize>,
}

/// Smallest `u` with at most three syllables such that `v·u` is a nonempty relator of the pair.
pub fn artin_relator_search(
    v: &Word,
    i: usize,
    j: usize,
    m: usize,
    bounds: SearchBounds,
) -> Result<Option<Word>, OracleError> {
    if let Some(l) = v.iter().find(|l| l.gen() != i && l.gen() != j) {
        return Err(OracleError::ForeignGenerator(l.gen()));
    }
    if v.syllable_length() + 3 < 2 * m {
        return Err(OracleError::Precondition(format!(
            "‖v‖ = {} is below 2m − 3 = {}",
            v.syllable_length(),
            2 * m - 3
        )));
    }
    let cap = bounds.exponent_cap.unwrap_or(v.len() + 2 * m) as i64;
    let (si, sj) = (v.exponent_sum(i), v.exponent_sum(j));
    let mut candidates: Vec<(i64, usize, usize, Vec<i64>)> = Vec::new();
    let exps: Vec<i64> = (-cap..=cap).filter(|&e| e != 0).collect();
    for syllables in 1..=3usize {
        for first in [i, j] {
            let gens: Vec<usize> = (0..syllables).map(|t| if t % 2 == 0 { first } else if first == i { j } else { i }).collect();
            let mut idx = vec![0usize; syllables];
            loop {
                let e: Vec<i64> = idx.iter().map(|&t| exps[t]).collect();
                let (mut ei, mut ej) = (si, sj);
                for (g, x) in gens.iter().zip(&e) {
                    if *g == i {
                        ei += x;
                    } else {
                        ej += x;
                    }
                }
                let balanced = if m % 2 == 0 { ei == 0 && ej == 0 } else { ei + ej == 0 };
                if balanced {
                    let size = e.iter().map(|x| x.abs()).sum();
                    candidates.push((size, syllables, usize::from(first != i), e));
                }
                let mut t = 0;
                while t < syllables {
                    idx[t] += 1;
                    if idx[t] < exps.len() {
                        break;
                    }
                    idx[t] = 0;
                    t += 1;
                }
                if t == syllables {
                    break;
                }
            }
        }
    }
    candidates.sort();
    for (_, syllables, first, e) in candidates {
        let start = if first == 0 { i } else { j };
        let mut u = Word::empty();
        for (t, &x) in e.iter().enumerate().take(syllables) {
            let g = if t % 2 == 0 { start } else if start == i { j } else { i };
            let l = Letter::new(g, x > 0);
            u = u.concat(&Word::from(vec![l; x.unsigned_abs() as usize]));
        }
        let vu = v.concat(&u).free_reduce(Mode::FreeInverse);
        if !vu.is_empty() && artin_dihedral_is_trivial(&vu, i, j, m)? {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// Decides triviality for words supported on at most two generators of an Artin group.
#[derive(Debug, Clone)]
pub struct ArtinOracle {
    pres: ArtinPresentation,
}

impl ArtinOracle {
    pub fn new(pres: &ArtinPresentation) -> ArtinOracle {
        ArtinOracle { pres: pres.clone() }
    }

    pub fn presentation(&self) -> &ArtinPresentation {
        &self.pres
    }

    /// Whether `w` is trivial in the parabolic subgroup `G_ij` (with `m_ij = ∞` meaning free).
    pub fn trivial_in_pair(&self, w: &Word, i: usize, j: usize) -> Result<bool, OracleError> {
        match self.pres.m.get(i, j) {
            Some(m) => artin_dihedral_is_trivial(w, i, j, m as usize),
            None => {
                if let Some(l) = w.iter().find(|l| l.gen() != i && l.gen() != j) {
                    return Err(OracleError::ForeignGenerator(l.gen()));
                }
                Ok(w.free_reduce(Mode::FreeInverse).is_empty())
            }
        }
    }
}

impl WordProblem for ArtinOracle {
    fn mode(&self) -> Mode {
        Mode::FreeInverse
    }

    fn decide(&self, w: &Word) -> Option<bool> {
        let w = w.free_reduce(Mode::FreeInverse);
        match w.support()[..] {
            [] => Some(true),
            [_] => Some(false),
            [i, j] => self.trivial_in_pair(&w, i, j).ok(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::artin_relator;

    fn w(xs: &[i32]) -> Word {
        Word::from_signed(xs)
    }

    #[test]
    fn defining_relation_is_trivial() {
        for m in 2..=10 {
            assert!(artin_dihedral_is_trivial(&artin_relator(0, 1, m), 0, 1, m).unwrap());
            assert!(!artin_dihedral_is_trivial(&w(&[1]), 0, 1, m).unwrap());
        }
        assert!(artin_dihedral_is_trivial(&w(&[1, 3]), 0, 1, 3).is_err());
    }

    #[test]
    fn delta_is_central_up_to_tau() {
        for m in 3..=6 {
            let delta = alternating(0, 1, m);
            let x = w(&[1]);
            let tx = if m % 2 == 1 { w(&[2]) } else { w(&[1]) };
            let lhs = delta.concat(&x);
            let rhs = tx.concat(&delta);
            let q = lhs.concat(&rhs.invert(Mode::FreeInverse));
            assert!(artin_dihedral_is_trivial(&q, 0, 1, m).unwrap());
        }
    }

    #[test]
    fn normal_form_round_trips() {
        let words = [w(&[1, 2, -1, -1, 2, 2, -2, 1]), w(&[-2, -1, 2, 1, 1, 2, 1]), w(&[2, 2, 2, -1])];
        for m in 2..=6 {
            for x in &words {
                let nf = artin_dihedral_normal_form(x, 0, 1, m).unwrap();
                let back = artin_dihedral_normal_form(&nf.to_word(0, 1, m), 0, 1, m).unwrap();
                assert_eq!(nf, back);
                let q = x.concat(&nf.to_word(0, 1, m).invert(Mode::FreeInverse));
                assert!(artin_dihedral_is_trivial(&q, 0, 1, m).unwrap());
            }
        }
    }

    #[test]
    fn relator_search_examples() {
        let m = 10;
        let r = artin_relator(0, 1, m);
        // delete the last syllable a2'
        let v = r.subword(0, r.len() - 1);
        let u = artin_relator_search(&v, 0, 1, m, SearchBounds::default()).unwrap().unwrap();
        assert_eq!(u, w(&[-2]));
        assert!(artin_relator_search(&w(&[1, 2, 1]), 0, 1, m, SearchBounds::default()).is_err());
        let x = w(&[1]).power(20);
        assert!(artin_relator_search(&x, 0, 1, m, SearchBounds::default()).is_err());
    }

    #[test]
    fn search_absent_case_agrees_with_brute_force() {
        // ‖v‖ = 17 = 2m − 3 for m = 10, but with the wrong shape to close with three syllables
        let m = 10;
        let v: Word = (0..17).map(|t| Letter::new(t % 2, t % 4 < 2)).collect();
        let v = v.free_reduce(Mode::FreeInverse);
        assert!(v.syllable_length() >= 17);
        let bounds = SearchBounds { exponent_cap: Some(4) };
        let found = artin_relator_search(&v, 0, 1, m, bounds).unwrap();
        let mut brute = None;
        'outer: for syl in 1..=3usize {
            for first in [0usize, 1] {
                let grid: Vec<i64> = (-4..=4).filter(|&e| e != 0).collect();
                let total = grid.len().pow(syl as u32);
                for code in 0..total {
                    let mut c = code;
                    let mut u = Word::empty();
                    for t in 0..syl {
                        let e = grid[c % grid.len()];
                        c /= grid.len();
                        let g = (first + t) % 2;
                        u = u.concat(&Word::from(vec![Letter::new(g, e > 0); e.unsigned_abs() as usize]));
                    }
                    let vu = v.concat(&u).free_reduce(Mode::FreeInverse);
                    if !vu.is_empty() && artin_dihedral_is_trivial(&vu, 0, 1, m).unwrap() {
                        brute = Some(u);
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(found.is_some(), brute.is_some());
        assert!(found.is_none());
    }

    #[test]
    fn oracle_domain() {
        let o = ArtinOracle::new(&ArtinPresentation::uniform(3, 5));
        assert_eq!(o.decide(&w(&[1, -1])), Some(true));
        assert_eq!(o.decide(&w(&[1, 1])), Some(false));
        assert_eq!(o.decide(&artin_relator(1, 2, 5)), Some(true));
        assert_eq!(o.decide(&w(&[1, 2, 3])), None);
    }
}
