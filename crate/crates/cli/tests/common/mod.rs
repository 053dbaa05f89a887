#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use foldmin::fgraph::FGraph;
use foldmin::oracles::WordProblem;
use foldmin::words::{Letter, Mode, Word};
use rand::Rng;

pub fn w(xs: &[i32]) -> Word {
    Word::from_signed(xs)
}

/// Element `ρ^k σ^f` of the dihedral group of order `2m`, with `a1 = σ` and `a2 = ρσ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dihedral {
    pub k: i64,
    pub f: bool,
    pub m: i64,
}

impl Dihedral {
    pub fn identity(m: i64) -> Self {
        Dihedral { k: 0, f: false, m }
    }

    pub fn mul(self, o: Dihedral) -> Dihedral {
        let k = if self.f { self.k - o.k } else { self.k + o.k };
        Dihedral { k: k.rem_euclid(self.m), f: self.f ^ o.f, m: self.m }
    }

    pub fn of_word(w: &Word, m: i64) -> Dihedral {
        w.iter().fold(Dihedral::identity(m), |acc, l| {
            acc.mul(Dihedral { k: l.gen() as i64, f: true, m })
        })
    }
}

/// All words of length at most `max` over `letters`.
pub fn all_words(letters: &[Letter], max: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for &l in letters {
                let mut x = w.clone();
                x.push(l);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Triviality in the two-generator Artin group of type `I2(m)` through its amalgam splitting
/// over the central element: `⟨x, y | x² = y^m⟩` for odd `m`, `⟨a, y | [a, y^{m/2}]⟩` for even `m`.
pub fn amalgam_is_trivial(w: &Word, m: usize) -> bool {
    // syllables: (side, exponent); side 0 is x (mod 2) or a (free), side 1 is y (mod q)
    let odd = m % 2 == 1;
    let q = if odd { m as i64 } else { (m / 2) as i64 };
    let mut z: i64 = 0;
    let mut stack: Vec<(u8, i64)> = Vec::new();
    let push = |side: u8, s: i64, z: &mut i64, stack: &mut Vec<(u8, i64)>| {
        let modulus = if side == 1 { q } else if odd { 2 } else { 0 };
        let cur = match stack.last() {
            Some(&(t, e)) if t == side => {
                stack.pop();
                e
            }
            _ => 0,
        };
        let mut e = cur + s;
        if modulus > 0 {
            *z += e.div_euclid(modulus);
            e = e.rem_euclid(modulus);
        }
        if e != 0 {
            stack.push((side, e));
        }
    };
    let h = (m as i64 - 1) / 2;
    for l in w.iter() {
        // images of a1 and a2
        let image: Vec<(u8, i64)> = match (odd, l.gen()) {
            (true, 0) => vec![(1, -h), (0, 1)],
            (true, _) => vec![(0, -1), (1, h + 1)],
            (false, 0) => vec![(0, 1)],
            (false, _) => vec![(0, -1), (1, 1)],
        };
        let image: Vec<(u8, i64)> =
            if l.is_positive() { image } else { image.into_iter().rev().map(|(s, e)| (s, -e)).collect() };
        for (side, e) in image {
            push(side, e, &mut z, &mut stack);
        }
    }
    stack.is_empty() && z == 0
}

/// Membership of `u` in the free-group subgroup read by `g`, through an independent fold of the
/// letter graph.
pub fn free_member(g: &FGraph, u: &Word) -> bool {
    let mode = g.mode();
    let sub = g.letter_subdivision();
    let lg = &sub.graph;
    let cap = lg.vertex_capacity();
    let mut parent: Vec<usize> = (0..cap).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    let mut arrows: Vec<(usize, Letter, usize)> = Vec::new();
    for e in lg.edge_ids() {
        let (a, b) = lg.edge_ends(e);
        let l = lg.edge_label(e)[0];
        arrows.push((a, l, b));
        arrows.push((b, l.inverse(mode), a));
    }
    loop {
        let mut table: BTreeMap<(usize, Letter), usize> = BTreeMap::new();
        let mut merged = false;
        for &(a, l, b) in &arrows {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            match table.get(&(ra, l)) {
                Some(&t) => {
                    let rt = find(&mut parent, t);
                    if rt != rb {
                        parent[rt] = rb;
                        merged = true;
                    }
                }
                None => {
                    table.insert((ra, l), rb);
                }
            }
        }
        if !merged {
            let mut at = find(&mut parent, lg.base());
            let start = at;
            for l in u.free_reduce(mode).iter() {
                match table.get(&(at, *l)) {
                    Some(&t) => at = find(&mut parent, t),
                    None => return false,
                }
            }
            return at == start;
        }
    }
}

/// Every element of `a` equals some element of `b` under `oracle`; returns the first miss.
pub fn covered_by(a: &BTreeSet<Word>, b: &BTreeSet<Word>, oracle: &dyn WordProblem) -> Option<Word> {
    a.iter()
        .find(|u| !b.contains(*u) && !b.iter().any(|v| oracle.equal(u, v) == Some(true)))
        .cloned()
}

pub fn random_word(rng: &mut impl Rng, n: usize, mode: Mode, lo: usize, hi: usize) -> Word {
    foldmin::corpus::random_reduced_word(rng, n, mode, (lo, hi))
}

#[test]
fn dihedral_table_sanity() {
    let m = 4;
    let ab = Dihedral::of_word(&w(&[1, 2]), m);
    let mut p = Dihedral::identity(m);
    for i in 1..=m {
        p = p.mul(ab);
        assert_eq!(p == Dihedral::identity(m), i == m);
    }
    assert_eq!(Dihedral::of_word(&w(&[1, 1]), m), Dihedral::identity(m));
}

#[test]
fn amalgam_sanity() {
    for m in 3..=6 {
        let rel = foldmin::presentations::artin_relator(0, 1, m);
        assert!(amalgam_is_trivial(&rel, m));
        assert!(!amalgam_is_trivial(&w(&[1]), m));
        assert!(!amalgam_is_trivial(&w(&[1, 2, -1, -2]), m));
        let x = foldmin::presentations::alternating(0, 1, 2 * m);
        assert!(!amalgam_is_trivial(&x, m));
    }
    // the Garside element squared is central
    let d = foldmin::presentations::alternating(0, 1, 3).concat(&foldmin::presentations::alternating(0, 1, 3));
    let comm = d.concat(&w(&[1])).concat(&d.invert(Mode::FreeInverse)).concat(&w(&[-1]));
    assert!(amalgam_is_trivial(&comm, 3));
}
