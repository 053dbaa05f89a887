use serde::Serialize;

use super::{Verdict, Witness, WitnessKind};
use crate::complexity::path_bound_check;
use crate::fgraph::{Dart, FGraph};
use crate::oracles::{
    ArtinOracle, CoxeterOracle, NewmanOracle, OneRelatorTorsion, TorsionClass, WordProblem,
};
use crate::presentations::ArtinPresentation;
use crate::words::{Letter, Mode, Word};

/// One independent check run on a final graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub name: String,
    pub passed: bool,
    /// False if the enumeration stopped at its cap.
    pub complete: bool,
    pub detail: String,
}

impl Audit {
    pub fn simple(name: &str, passed: bool, detail: String) -> Audit {
        Audit { name: name.into(), passed, complete: true, detail }
    }
}

/// Confirms a witness kind against a reduced based-loop label.
pub trait WitnessOracle {
    fn confirms(&self, kind: WitnessKind, label: &Word) -> bool;
}

impl WitnessOracle for CoxeterOracle {
    fn confirms(&self, kind: WitnessKind, label: &Word) -> bool {
        let class = self.torsion_classify(label);
        match kind {
            WitnessKind::GeneratorConjugate(i) => class == TorsionClass::ConjGenerator(i),
            WitnessKind::RotationPowerTorsion(i, j, d) => class == TorsionClass::ConjRotationPower(i, j, d),
            _ => false,
        }
    }
}

impl WitnessOracle for NewmanOracle {
    fn confirms(&self, kind: WitnessKind, label: &Word) -> bool {
        match kind {
            WitnessKind::OneRelatorTorsion(d) => self.torsion_classify(label) == OneRelatorTorsion::ConjPower(d),
            _ => false,
        }
    }
}

impl WitnessOracle for ArtinOracle {
    fn confirms(&self, kind: WitnessKind, label: &Word) -> bool {
        let WitnessKind::ArtinParabolicIntersection(i, j) = kind else { return false };
        let (core, _) = label.cyclic_reduce(Mode::FreeInverse);
        !core.is_empty()
            && core.iter().all(|l| l.gen() == i || l.gen() == j)
            && self.trivial_in_pair(&core, i, j) == Ok(false)
    }
}

/// Re-reads the witness loop in `g` and asks the oracle to confirm its kind.
pub fn replay_witness(g: &FGraph, w: &Witness, oracle: &dyn WitnessOracle) -> bool {
    if w.kind == WitnessKind::PairTargetCollision {
        return g.target().is_none_or(|t| t == g.base());
    }
    let p = &w.loop_path;
    p.is_well_formed(g)
        && p.start == g.base()
        && p.is_closed(g)
        && p.label(g).free_reduce(g.mode()) == w.label
        && oracle.confirms(w.kind, &w.label)
}

pub(crate) fn replay_all(v: &Verdict, oracle: &dyn WitnessOracle) -> Audit {
    let bad = v.witnesses.iter().filter(|w| !replay_witness(&v.graph, w, oracle)).count();
    Audit::simple(
        "witness_replay",
        bad == 0,
        format!("{} witnesses, {bad} not confirmed", v.witnesses.len()),
    )
}

pub(crate) fn rpp_audit(g: &FGraph, oracle: &CoxeterOracle) -> Audit {
    let rep = oracle.relator_path_property(g);
    Audit::simple("relator_path_property", rep.holds, format!("{} violations", rep.violations.len()))
}

/// Depth-first enumeration of reduced letter paths of at most `max_len` letters from each
/// start. `visit` sees every path with its end vertex and whether it cannot be extended.
/// Returns false if more than `cap` paths were generated.
fn letter_paths(
    lg: &FGraph,
    starts: &[usize],
    max_len: usize,
    cap: usize,
    visit: &mut dyn FnMut(&[Letter], usize, bool) -> bool,
) -> bool {
    let mut count = 0usize;
    for &s in starts {
        let mut stack: Vec<(usize, Option<Dart>, Vec<Letter>)> = vec![(s, None, Vec::new())];
        while let Some((at, last, word)) = stack.pop() {
            let next: Vec<Dart> = if word.len() < max_len {
                lg.out_darts(at).iter().copied().filter(|&d| last.is_none_or(|l| lg.may_follow(l, d))).collect()
            } else {
                Vec::new()
            };
            if !visit(&word, at, next.is_empty()) {
                return true;
            }
            for d in next.into_iter().rev() {
                count += 1;
                if count > cap {
                    return false;
                }
                let mut w = word.clone();
                w.push(lg.first_letter(d));
                stack.push((lg.terminus(d), Some(d), w));
            }
        }
    }
    true
}

/// Every reduced path reads a weakly Dehn-reduced word: no relator segment of length `≥ |r| − 3`.
pub fn weak_dehn_path_scan(g: &FGraph, oracle: &CoxeterOracle, max_letters: usize, cap: usize) -> Audit {
    let sub = g.letter_subdivision();
    let starts: Vec<usize> = sub.graph.vertices().collect();
    let mut bad: Option<Word> = None;
    let mut paths = 0usize;
    let complete = letter_paths(&sub.graph, &starts, max_letters, cap, &mut |w, _, leaf| {
        if leaf {
            paths += 1;
            let word = Word::from(w.to_vec());
            if oracle.weakly_dehn_reduced(&word).is_some() {
                bad = Some(word);
                return false;
            }
        }
        true
    });
    let detail = match &bad {
        Some(w) => format!("hit on {}", g.alphabet().format_word(w)),
        None => format!("{paths} maximal paths of ≤ {max_letters} letters"),
    };
    Audit { name: "weak_dehn_path_scan".into(), passed: bad.is_none(), complete, detail }
}

/// Every nonempty reduced base loop of at most `max_letters` letters is nontrivial in the group.
pub fn injectivity_audit(g: &FGraph, oracle: &dyn WordProblem, max_letters: usize, cap: usize) -> Audit {
    let sub = g.letter_subdivision();
    let base = g.base();
    let mode = g.mode();
    let mut loops = 0usize;
    let mut bad: Option<Word> = None;
    let complete = letter_paths(&sub.graph, &[base], max_letters, cap, &mut |w, at, _| {
        if at == base && !w.is_empty() {
            loops += 1;
            let word = Word::from(w.to_vec()).free_reduce(mode);
            if word.is_empty() || oracle.decide(&word) != Some(false) {
                bad = Some(word);
                return false;
            }
        }
        true
    });
    let detail = match &bad {
        Some(w) => format!("base loop {} is not certified nontrivial", g.alphabet().format_word(w)),
        None => format!("{loops} base loops of ≤ {max_letters} letters"),
    };
    Audit { name: "injectivity".into(), passed: bad.is_none(), complete, detail }
}

/// The simple-path bound, when its preconditions hold on `g`.
pub(crate) fn path_bound_audit(g: &FGraph, k: usize) -> Option<Audit> {
    let rep = path_bound_check(g, k);
    if !rep.preconditions.is_empty() {
        return None;
    }
    Some(Audit::simple(
        "path_bound",
        rep.holds,
        format!("longest simple path {} ≤ {}", rep.longest_simple_path, rep.bound),
    ))
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// No two-generator segment of a reduced path has `‖v‖ ≥ 2m_ij − 3`, and each two-generator
/// letter subgraph is a forest.
pub fn artin_completion_scan(g: &FGraph, pres: &ArtinPresentation, max_edges: usize, cap: usize) -> Audit {
    let sub = g.letter_subdivision();
    let lg = &sub.graph;
    for (i, j, _) in pres.m.finite_pairs() {
        let mut parent: Vec<usize> = (0..lg.vertex_capacity()).collect();
        for e in lg.edge_ids() {
            let l = lg.edge_label(e)[0].gen();
            if l != i && l != j {
                continue;
            }
            let (a, b) = lg.edge_ends(e);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Audit::simple(
                    "artin_completion_scan",
                    false,
                    format!("the a{} a{} letter subgraph has a circuit", i + 1, j + 1),
                );
            }
            parent[ra] = rb;
        }
    }
    let mut paths = 0usize;
    let mut bad: Option<Word> = None;
    let mut complete = true;
    for s in g.vertices() {
        let mut stack: Vec<(usize, Option<Dart>, Vec<Dart>)> = vec![(s, None, Vec::new())];
        while let Some((at, last, darts)) = stack.pop() {
            let label: Word = darts.iter().flat_map(|&d| g.label(d).into_letters()).collect();
            paths += 1;
            if paths > cap {
                complete = false;
                break;
            }
            if long_segment(&label, pres) {
                bad = Some(label);
                break;
            }
            if darts.len() == max_edges {
                continue;
            }
            for &d in g.out_darts(at).iter().rev() {
                if last.is_some_and(|l| !g.may_follow(l, d)) {
                    continue;
                }
                let mut next = darts.clone();
                next.push(d);
                stack.push((g.terminus(d), Some(d), next));
            }
        }
        if bad.is_some() || !complete {
            break;
        }
    }
    let detail = match &bad {
        Some(w) => format!("segment completes toward a relator in {}", g.alphabet().format_word(w)),
        None => format!("{paths} reduced paths of ≤ {max_edges} edges"),
    };
    Audit { name: "artin_completion_scan".into(), passed: bad.is_none(), complete, detail }
}

fn long_segment(w: &Word, pres: &ArtinPresentation) -> bool {
    let gens: Vec<usize> = w.syllable_form(Mode::FreeInverse).expect("free word").syllables.iter().map(|s| s.0).collect();
    for s in 0..gens.len().saturating_sub(1) {
        let (x, y) = (gens[s], gens[s + 1]);
        let Some(m) = pres.m.get(x, y) else { continue };
        let len = gens[s..].iter().take_while(|&&g| g == x || g == y).count();
        if len + 3 >= 2 * m as usize {
            return true;
        }
    }
    false
}
