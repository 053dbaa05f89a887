use serde::Serialize;

use super::{OracleError, RelatorHit, WordProblem};
use crate::fgraph::FGraph;
use crate::presentations::{alternating, CoxeterPresentation};
use crate::words::{Letter, Mode, Word};

/// Dehn's algorithm and relator scans for an extra-large Coxeter presentation.
#[derive(Debug, Clone)]
pub struct CoxeterOracle {
    pres: CoxeterPresentation,
}

/// Conjugacy shape of a cyclically Dehn-reduced word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TorsionClass {
    Trivial,
    ConjGenerator(usize),
    /// `(a_i a_j)^d` with `i < j` and `0 < d < m_ij`.
    ConjRotationPower(usize, usize, u32),
    NotShortTorsionForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RppViolation {
    pub vertex: usize,
    pub relator: Word,
    pub consumed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RppReport {
    pub holds: bool,
    pub violations: Vec<RppViolation>,
}

#[derive(Debug, Clone, Copy)]
struct Run {
    start: usize,
    len: usize,
}

/// Maximal alternating two-generator segments. Consecutive runs share one letter.
fn runs(w: &[Letter]) -> Vec<Run> {
    let n = w.len();
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut len = 1;
        while start + len < n
            && w[start + len] != w[start + len - 1]
            && (len < 2 || w[start + len] == w[start + len - 2])
        {
            len += 1;
        }
        out.push(Run { start, len });
        if len == 1 || start + len == n {
            break;
        }
        start += len - 1;
    }
    out
}

impl CoxeterOracle {
    pub fn new(pres: &CoxeterPresentation) -> Result<CoxeterOracle, OracleError> {
        if !pres.is_extra_large() {
            return Err(OracleError::NotExtraLarge);
        }
        Ok(CoxeterOracle { pres: pres.clone() })
    }

    pub fn presentation(&self) -> &CoxeterPresentation {
        &self.pres
    }

    fn pair_of(&self, w: &[Letter], run: Run) -> Option<(usize, usize, usize)> {
        if run.len < 2 {
            return None;
        }
        let x = w[run.start].gen();
        let y = w[run.start + 1].gen();
        self.pres.m.get(x, y).map(|m| (x, y, m as usize))
    }

    fn hit_at(&self, w: &[Letter], run: Run, x: usize, y: usize, m: usize) -> RelatorHit {
        let t = run.len.min(2 * m);
        let relator = alternating(x, y, 2 * m);
        debug_assert_eq!(&w[run.start..run.start + t], &relator[..t]);
        RelatorHit {
            matched: relator.subword(0, t),
            complement: relator.subword(t, 2 * m - t),
            relator,
            start: run.start,
            len: t,
        }
    }

    /// One Dehn replacement at the leftmost more-than-half relator segment.
    pub fn dehn_step(&self, w: &Word) -> Option<(RelatorHit, Word)> {
        for run in runs(w) {
            let Some((x, y, m)) = self.pair_of(w, run) else { continue };
            if run.len > m {
                let hit = self.hit_at(w, run, x, y, m);
                let mut letters = w[..hit.start].to_vec();
                letters.extend_from_slice(&hit.complement.invert(Mode::Involutive));
                letters.extend_from_slice(&w[hit.start + hit.len..]);
                return Some((hit, Word::from(letters).free_reduce(Mode::Involutive)));
            }
        }
        None
    }

    pub fn dehn_reduce(&self, w: &Word) -> Word {
        let mut cur = w.free_reduce(Mode::Involutive);
        while let Some((_, next)) = self.dehn_step(&cur) {
            cur = next;
        }
        cur
    }

    /// Dehn reduction together with every replacement made.
    pub fn dehn_reduce_traced(&self, w: &Word) -> (Word, Vec<RelatorHit>) {
        let mut cur = w.free_reduce(Mode::Involutive);
        let mut hits = Vec::new();
        while let Some((hit, next)) = self.dehn_step(&cur) {
            hits.push(hit);
            cur = next;
        }
        (cur, hits)
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.dehn_reduce(w).is_empty()
    }

    /// The longest (then leftmost) segment of length at least `2m − 3`.
    pub fn weakly_dehn_reduced(&self, w: &Word) -> Option<RelatorHit> {
        let mut best: Option<RelatorHit> = None;
        for run in runs(w) {
            let Some((x, y, m)) = self.pair_of(w, run) else { continue };
            if run.len + 3 >= 2 * m {
                let hit = self.hit_at(w, run, x, y, m);
                if best.as_ref().map_or(true, |b| hit.len > b.len) {
                    best = Some(hit);
                }
            }
        }
        best
    }

    /// Dehn-reduces every cyclic conjugate until none shortens.
    pub fn cyclic_dehn_reduce(&self, w: &Word) -> Word {
        let mut cur = self.dehn_reduce(w);
        loop {
            let (core, _) = cur.cyclic_reduce(Mode::Involutive);
            cur = core;
            let n = cur.len();
            let step = (0..n).find_map(|k| self.dehn_step(&cur.rotate(k)).map(|(_, next)| next));
            match step {
                Some(next) => cur = self.dehn_reduce(&next),
                None => return cur,
            }
        }
    }

    pub fn torsion_classify(&self, w: &Word) -> TorsionClass {
        let c = self.cyclic_dehn_reduce(w);
        match c.len() {
            0 => return TorsionClass::Trivial,
            1 => return TorsionClass::ConjGenerator(c[0].gen()),
            _ => {}
        }
        let rs = runs(&c);
        if rs.len() != 1 || c.len() % 2 != 0 {
            return TorsionClass::NotShortTorsionForm;
        }
        let (x, y) = (c[0].gen(), c[1].gen());
        let d = (c.len() / 2) as u32;
        match self.pres.m.get(x, y) {
            Some(m) if d < m => TorsionClass::ConjRotationPower(x.min(y), x.max(y), d),
            _ => TorsionClass::NotShortTorsionForm,
        }
    }

    /// Every near-complete relator path in the letter subdivision closes up into a relator cycle.
    pub fn relator_path_property(&self, g: &FGraph) -> RppReport {
        let sub = g.letter_subdivision();
        let lg = &sub.graph;
        let mut violations = Vec::new();
        for v in lg.vertices() {
            for (i, j, m) in self.pres.m.finite_pairs() {
                let len = 2 * m as usize;
                for (x, y) in [(i, j), (j, i)] {
                    let r = alternating(x, y, len);
                    let (path, consumed) = lg.trace(v, &r);
                    if consumed + 3 >= len && !(consumed == len && path.end(lg) == v) {
                        violations.push(RppViolation { vertex: v, relator: r, consumed });
                    }
                }
            }
        }
        RppReport { holds: violations.is_empty(), violations }
    }
}

impl WordProblem for CoxeterOracle {
    fn mode(&self) -> Mode {
        Mode::Involutive
    }

    fn decide(&self, w: &Word) -> Option<bool> {
        Some(self.is_trivial(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(xs: &[i32]) -> Word {
        Word::from_signed(xs)
    }

    fn alt12(len: usize) -> Word {
        alternating(0, 1, len)
    }

    #[test]
    fn runs_overlap_by_one() {
        let r = runs(&w(&[1, 2, 1, 3, 1, 3, 2]));
        let spans: Vec<(usize, usize)> = r.iter().map(|r| (r.start, r.len)).collect();
        assert_eq!(spans, vec![(0, 3), (2, 4), (5, 2)]);
        assert_eq!(runs(&w(&[1])).len(), 1);
        assert!(runs(&[]).is_empty());
    }

    #[test]
    fn dehn_examples() {
        let o = CoxeterOracle::new(&CoxeterPresentation::uniform(2, 4)).unwrap();
        assert!(o.dehn_reduce(&alt12(8)).is_empty());
        assert_eq!(o.dehn_reduce(&alt12(7)), w(&[2]));
        assert_eq!(o.dehn_reduce(&alt12(4)), alt12(4));
        assert!(!o.is_trivial(&w(&[1, 2])));
    }

    #[test]
    fn weak_dehn_examples() {
        let o = CoxeterOracle::new(&CoxeterPresentation::uniform(3, 4)).unwrap();
        assert!(o.weakly_dehn_reduced(&w(&[1, 2, 1])).is_none());
        let hit = o.weakly_dehn_reduced(&alt12(7)).unwrap();
        assert_eq!((hit.len, hit.complement.len()), (7, 1));
        let hit = o.weakly_dehn_reduced(&w(&[1, 3, 1, 3, 1])).unwrap();
        assert_eq!(hit.len, 5);
        assert_eq!(hit.matched.concat(&hit.complement), alternating(0, 2, 8));
    }

    #[test]
    fn torsion_examples() {
        let o = CoxeterOracle::new(&CoxeterPresentation::uniform(3, 7)).unwrap();
        assert_eq!(o.torsion_classify(&w(&[2, 1, 2])), TorsionClass::ConjGenerator(0));
        let o4 = CoxeterOracle::new(&CoxeterPresentation::uniform(2, 4)).unwrap();
        assert_eq!(o4.torsion_classify(&alt12(4)), TorsionClass::ConjRotationPower(0, 1, 2));
        assert_eq!(o4.torsion_classify(&alt12(8)), TorsionClass::Trivial);
        let x = w(&[1, 2, 3]);
        assert_eq!(o.torsion_classify(&x), TorsionClass::NotShortTorsionForm);
        for e in 1..=6 {
            assert!(!o.is_trivial(&x.power(e)));
        }
    }

    #[test]
    fn rotation_powers_have_the_predicted_order() {
        for m in 4..=9u32 {
            let o = CoxeterOracle::new(&CoxeterPresentation::uniform(3, m)).unwrap();
            for d in 1..m {
                let x = alternating(1, 2, 2 * d as usize);
                let TorsionClass::ConjRotationPower(i, j, e) = o.torsion_classify(&x) else {
                    panic!("expected a rotation power");
                };
                assert_eq!((i, j), (1, 2));
                let order = m / gcd(e, m);
                assert_eq!(o.torsion_classify(&x.power(order as usize)), TorsionClass::Trivial);
                for p in 1..order {
                    assert_ne!(o.torsion_classify(&x.power(p as usize)), TorsionClass::Trivial);
                }
            }
        }
    }

    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn rpp_examples() {
        let p = CoxeterPresentation::uniform(2, 4);
        let o = CoxeterOracle::new(&p).unwrap();
        let alphabet = p.alphabet.clone();
        let (g, _) = FGraph::bouquet(&[alt12(8)], &alphabet).unwrap();
        // the loop reads a relator, so it is a full cycle
        assert!(o.relator_path_property(&g).holds);
        let mut arc = FGraph::new(alphabet);
        let v = arc.add_vertex();
        arc.add_edge(0, v, alt12(7)).unwrap();
        let rep = o.relator_path_property(&arc);
        assert!(!rep.holds);
        assert!(rep.violations.iter().any(|x| x.consumed == 7));
    }
}
