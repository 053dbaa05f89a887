//! Complexity-minimization drivers and certified verdicts.

mod artin;
mod audit;
mod coxeter;
mod one_relator;

pub use artin::{certify_artin, minimize_artin};
pub use audit::{
    artin_completion_scan, injectivity_audit, replay_witness, weak_dehn_path_scan, Audit,
};
pub use coxeter::{certify_coxeter, half_rank_certify, minimize_coxeter, separability_pair, CoxeterGoal};
pub use one_relator::{certify_one_relator, minimize_one_relator};

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::complexity::Measure;
use crate::fgraph::{Dart, FGraph, GraphJson, GraphPath, Subdivision};
use crate::moves::{fold_step, move_a0, move_a1, move_a2_dart, move_a3, MoveError, MoveRecord};
use crate::oracles::WordProblem;
use crate::presentations::HypothesisReport;
use crate::words::{Alphabet, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MinimizerError {
    #[error("element is trivial after reduction")]
    TrivialElement,
    #[error("some finite exponent is odd")]
    OddExponent,
    #[error(transparent)]
    Move(#[from] MoveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GraphMode {
    /// Only the base is protected; it may move by conjugation.
    Subgroup,
    /// Base and target are both protected.
    Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinimizerConfig {
    pub max_iter: usize,
    pub exponent_cap: Option<usize>,
    /// Most paths any single audit enumerates.
    pub audit_cap: usize,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        MinimizerConfig { max_iter: 1_000_000, exponent_cap: None, audit_cap: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    GeneratorConjugate(usize),
    RotationPowerTorsion(usize, usize, u32),
    OneRelatorTorsion(i64),
    ArtinParabolicIntersection(usize, usize),
    PairTargetCollision,
}

/// A based loop in the final graph whose label breaks a hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    #[serde(rename = "loop")]
    pub loop_path: GraphPath,
    /// Reduced label of the loop at the current base.
    pub label: Word,
    /// The same element written at the original base.
    pub conjugated: Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    FreeCertified,
    QuasiconvexCertified,
    SeparableCertified,
    Witnessed,
    HypothesisNotMet,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Step {
    Fold,
    Prune,
    Rebase,
    A3,
    Surgery,
    Removal,
    GcdWrap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub step: Step,
    pub moves: Vec<MoveRecord>,
    pub measure: Measure,
}

/// Output of a minimization run.
#[derive(Debug, Clone)]
pub struct Minimization {
    pub graph: FGraph,
    pub witnesses: Vec<Witness>,
    pub trace: Vec<TraceEntry>,
    pub iterations: usize,
    pub initial: Measure,
    /// Accumulated conjugator: an element `x` of the current loop group stands for `c x c⁻¹`.
    pub conjugator: Word,
    /// Hits that no step could resolve, with reasons.
    pub unresolved: Vec<String>,
    /// Rejected surgeries, with reasons.
    pub rejections: Vec<String>,
    pub capped: bool,
    /// Broken run invariants (monotone progress, χ floor). Always empty unless there is a bug.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinimizationOutcome {
    Fixpoint,
    Witnessed,
    Inconclusive,
}

impl Minimization {
    pub fn outcome(&self) -> MinimizationOutcome {
        if !self.witnesses.is_empty() {
            MinimizationOutcome::Witnessed
        } else if self.capped || !self.unresolved.is_empty() || !self.violations.is_empty() {
            MinimizationOutcome::Inconclusive
        } else {
            MinimizationOutcome::Fixpoint
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    pub thresholds: HypothesisReport,
    pub witnesses: Vec<Witness>,
    pub graph: FGraph,
    pub trace: Vec<TraceEntry>,
    pub iterations: usize,
    pub conjugator: Word,
    pub audits: Vec<Audit>,
    pub notes: Vec<String>,
    pub quasiconvex: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub label: String,
    pub conjugated: String,
}

/// Machine-readable form of a verdict, with words spelled in the input alphabet.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub status: Status,
    pub quasiconvex: bool,
    pub thresholds: HypothesisReport,
    pub witnesses: Vec<WitnessReport>,
    pub chi: i64,
    pub complexity_trace: Vec<Measure>,
    pub iterations: usize,
    pub conjugator: String,
    pub audits: Vec<Audit>,
    pub notes: Vec<String>,
    pub graph: GraphJson,
}

impl Verdict {
    fn bare(status: Status, thresholds: HypothesisReport, graph: FGraph, notes: Vec<String>) -> Verdict {
        Verdict {
            status,
            thresholds,
            witnesses: Vec::new(),
            graph,
            trace: Vec::new(),
            iterations: 0,
            conjugator: Word::empty(),
            audits: Vec::new(),
            notes,
            quasiconvex: false,
        }
    }

    fn from_run(status: Status, thresholds: HypothesisReport, run: Minimization) -> Verdict {
        let mut notes: Vec<String> = run.unresolved.iter().map(|u| format!("unresolved: {u}")).collect();
        notes.extend(run.rejections.iter().map(|r| format!("rejected: {r}")));
        notes.extend(run.violations.iter().map(|v| format!("invariant: {v}")));
        if run.capped {
            notes.push(format!("iteration cap reached after {} iterations", run.iterations));
        }
        Verdict {
            status,
            thresholds,
            witnesses: run.witnesses,
            graph: run.graph,
            trace: run.trace,
            iterations: run.iterations,
            conjugator: run.conjugator,
            audits: Vec::new(),
            notes,
            quasiconvex: false,
        }
    }

    /// Downgrades a certified status if any audit failed.
    fn settle(&mut self) {
        let certified = matches!(
            self.status,
            Status::FreeCertified | Status::QuasiconvexCertified | Status::SeparableCertified
        );
        if certified && self.audits.iter().any(|a| !a.passed) {
            self.status = Status::Inconclusive;
            self.quasiconvex = false;
            self.notes.push("an audit failed; certification withdrawn".into());
        }
    }

    pub fn report(&self) -> Report {
        let alphabet: &Alphabet = self.graph.alphabet();
        Report {
            status: self.status,
            quasiconvex: self.quasiconvex,
            thresholds: self.thresholds.clone(),
            witnesses: self
                .witnesses
                .iter()
                .map(|w| WitnessReport {
                    kind: w.kind,
                    label: alphabet.format_word(&w.label),
                    conjugated: alphabet.format_word(&w.conjugated),
                })
                .collect(),
            chi: self.graph.euler_characteristic(),
            complexity_trace: self.trace.iter().map(|t| t.measure).collect(),
            iterations: self.iterations,
            conjugator: alphabet.format_word(&self.conjugator),
            audits: self.audits.clone(),
            notes: self.notes.clone(),
            graph: self.graph.to_json(),
        }
    }
}

pub(crate) enum Scan {
    Applied(Step, Vec<MoveRecord>),
    Witness(WitnessKind, GraphPath),
    Unresolved(String, String),
    Rejected(String, String),
    Clean,
}

pub(crate) trait Family {
    fn measure(&self, g: &FGraph) -> Measure;
    fn scan(&self, g: &mut FGraph, skip: &BTreeSet<String>) -> Scan;
}

fn first_spike(g: &FGraph) -> Option<usize> {
    g.vertices().find(|&v| !g.is_marked(v) && g.degree(v) == 1)
}

fn first_a3(g: &FGraph) -> Option<usize> {
    g.vertices().find(|&v| {
        !g.is_marked(v) && g.degree(v) == 2 && g.out_darts(v)[0].edge() != g.out_darts(v)[1].edge()
    })
}

/// Moves the base across dart `d`, deleting the old base if it becomes a spike.
fn rebase(g: &mut FGraph, d: Dart, conj: &mut Word, drop_old: bool) {
    let old = g.base();
    let to = g.terminus(d);
    *conj = conj.concat(&g.label(d)).free_reduce(g.mode());
    g.set_base(to).expect("live vertex");
    if drop_old {
        g.remove_edge(d.edge()).expect("live edge");
        g.remove_vertex(old).expect("isolated unmarked vertex");
    }
}

pub(crate) fn run(
    fam: &dyn Family,
    g0: &FGraph,
    mode: GraphMode,
    k: usize,
    cfg: &MinimizerConfig,
) -> Minimization {
    let mut g = g0.clone();
    g.restrict_to_base_component();
    let floor = 1 - k as i64;
    let mut out = Minimization {
        initial: fam.measure(&g),
        graph: FGraph::new(g.alphabet().clone()),
        witnesses: Vec::new(),
        trace: Vec::new(),
        iterations: 0,
        conjugator: Word::empty(),
        unresolved: Vec::new(),
        rejections: Vec::new(),
        capped: false,
        violations: Vec::new(),
    };
    let mut skip: BTreeSet<String> = BTreeSet::new();
    let mut pending: Vec<String> = Vec::new();
    loop {
        if mode == GraphMode::Pair && g.target().is_none_or(|t| t == g.base()) {
            out.witnesses.push(Witness {
                kind: WitnessKind::PairTargetCollision,
                loop_path: GraphPath::empty(g.base()),
                label: Word::empty(),
                conjugated: Word::empty(),
            });
            break;
        }
        if out.iterations >= cfg.max_iter {
            out.capped = true;
            break;
        }
        let before = fam.measure(&g);
        let (step, moves) = if let Some((d1, d2)) = g.fold_violation() {
            (Step::Fold, vec![fold_step(&mut g, d1, d2).expect("violating pair folds")])
        } else if let Some(v) = first_spike(&g) {
            let d = g.out_darts(v)[0];
            g.remove_edge(d.edge()).expect("live edge");
            g.remove_vertex(v).expect("isolated unmarked vertex");
            (Step::Prune, Vec::new())
        } else if mode == GraphMode::Subgroup && g.degree(g.base()) == 1 {
            let d = g.out_darts(g.base())[0];
            rebase(&mut g, d, &mut out.conjugator, true);
            (Step::Prune, Vec::new())
        } else if let Some((rec, _)) = first_a3(&g).and_then(|z| move_a3(&mut g, z).ok()) {
            (Step::A3, vec![rec])
        } else if mode == GraphMode::Subgroup
            && g.degree(g.base()) == 2
            && g.out_darts(g.base())[0].edge() != g.out_darts(g.base())[1].edge()
        {
            let d = g.out_darts(g.base())[0];
            rebase(&mut g, d, &mut out.conjugator, false);
            (Step::Rebase, Vec::new())
        } else {
            match fam.scan(&mut g, &skip) {
                Scan::Applied(step, moves) => (step, moves),
                Scan::Witness(kind, circuit) => {
                    out.witnesses.push(based_witness(&g, kind, &circuit, &out.conjugator));
                    break;
                }
                Scan::Unresolved(key, why) => {
                    pending.push(format!("{key}: {why}"));
                    skip.insert(key);
                    continue;
                }
                Scan::Rejected(key, why) => {
                    out.rejections.push(format!("{key}: {why}"));
                    pending.push(format!("{key}: surgery rejected"));
                    skip.insert(key);
                    continue;
                }
                Scan::Clean => {
                    out.unresolved = std::mem::take(&mut pending);
                    break;
                }
            }
        };
        skip.clear();
        pending.clear();
        out.iterations += 1;
        let after = fam.measure(&g);
        let order = after.compare(&before).expect("one family, one measure");
        let ok = match step {
            Step::Rebase => order.is_le(),
            _ => order.is_lt(),
        };
        if !ok {
            out.violations.push(format!("iteration {}: {step:?} did not decrease the complexity", out.iterations));
        }
        if g.euler_characteristic() < floor {
            out.violations.push(format!("iteration {}: χ fell below 1 − k", out.iterations));
        }
        out.trace.push(TraceEntry { iteration: out.iterations, step, moves, measure: after });
    }
    out.graph = g;
    out
}

fn based_witness(g: &FGraph, kind: WitnessKind, circuit: &GraphPath, conj: &Word) -> Witness {
    let parent = g.spanning_tree();
    let mut loop_path = g.tree_path(&parent, circuit.start);
    loop_path.darts.extend_from_slice(&circuit.darts);
    loop_path.darts.extend(g.tree_path(&parent, circuit.start).inverse(g).darts);
    let mode = g.mode();
    let label = loop_path.label(g).free_reduce(mode);
    let conjugated = conj.concat(&label).concat(&conj.invert(mode)).free_reduce(mode);
    Witness { kind, loop_path, label, conjugated }
}

/// Follows `w` exactly from `v` along whole edges.
pub(crate) fn trace_word(g: &FGraph, v: usize, w: &[crate::words::Letter]) -> Option<GraphPath> {
    let mut path = GraphPath::empty(v);
    let mut at = v;
    let mut pos = 0;
    while pos < w.len() {
        let d = g.out_darts(at).iter().copied().find(|&d| {
            let lab = g.label(d);
            pos + lab.len() <= w.len()
                && lab[..] == w[pos..pos + lab.len()]
                && path.darts.last().is_none_or(|&p| g.may_follow(p, d))
        })?;
        pos += g.label_len(d);
        path.darts.push(d);
        at = g.terminus(d);
    }
    Some(path)
}

/// Makes a letter-graph vertex into a vertex of `g`, subdividing if needed.
fn isolate(g: &mut FGraph, sub: &Subdivision, v: usize) -> Result<(usize, Vec<MoveRecord>), MoveError> {
    if g.has_vertex(v) {
        return Ok((v, Vec::new()));
    }
    let ld = sub.graph.out_darts(v)[0];
    let (d, offset) = sub.locate(ld);
    let (rec, (first, _)) = move_a2_dart(g, d, offset)?;
    Ok((g.terminus(first), vec![rec]))
}

/// Subdivides so that the letter path from `start` reading `word` runs along whole edges.
pub(crate) fn isolate_path(
    g: &mut FGraph,
    start: usize,
    word: &Word,
) -> Result<(GraphPath, Vec<MoveRecord>), MoveError> {
    let sub = g.letter_subdivision();
    let (s, mut recs) = isolate(g, &sub, start)?;
    let sub = g.letter_subdivision();
    let (lp, consumed) = sub.graph.trace(s, word);
    if consumed != word.len() {
        return Err(MoveError::BadPath);
    }
    let (t, more) = isolate(g, &sub, lp.end(&sub.graph))?;
    recs.extend(more);
    let q = trace_word(g, s, word).ok_or(MoveError::BadPath)?;
    if q.end(g) != t {
        return Err(MoveError::BadPath);
    }
    Ok((q, recs))
}

/// Index of the heaviest dart of `q` whose edge occurs once in `q`, if its weight beats `floor`.
fn heaviest_once(g: &FGraph, q: &GraphPath, weight: &dyn Fn(&FGraph, Dart) -> usize, floor: usize) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (idx, &d) in q.darts.iter().enumerate() {
        if q.darts.iter().filter(|x| x.edge() == d.edge()).count() != 1 {
            continue;
        }
        let w = weight(g, d);
        if w > floor && best.is_none_or(|(_, bw)| w > bw) {
            best = Some((idx, w));
        }
    }
    best.map(|b| b.0)
}

/// A witness path for deleting the edge of `q.darts[idx]`, routed around through `bypass`
/// (a dart from `q.start` to `q.end`, or `None` if `q` is closed).
fn detour(g: &FGraph, q: &GraphPath, idx: usize, bypass: Option<Dart>) -> GraphPath {
    let f = q.darts[idx];
    let p1 = GraphPath { start: q.start, darts: q.darts[..idx].to_vec() };
    let p2 = GraphPath { start: g.terminus(f), darts: q.darts[idx + 1..].to_vec() };
    let mut w = p1.inverse(g);
    w.darts.extend(bypass);
    w.darts.extend(p2.inverse(g).darts);
    if f.is_forward() {
        w
    } else {
        w.inverse(g)
    }
}

/// A0 then A1: attach `replacement` parallel to `q` and delete its heaviest once-used edge.
pub(crate) fn bypass_surgery(
    g: &mut FGraph,
    q: &GraphPath,
    replacement: &Word,
    oracle: &dyn WordProblem,
    weight: &dyn Fn(&FGraph, Dart) -> usize,
    floor: usize,
) -> Result<Vec<MoveRecord>, String> {
    let idx = heaviest_once(g, q, weight, floor).ok_or("no edge heavy enough to delete")?;
    let (r0, e) = move_a0(g, q, replacement, oracle).map_err(|e| e.to_string())?;
    let w = detour(g, q, idx, Some(Dart::forward(e)));
    let r1 = move_a1(g, q.darts[idx].edge(), &w, oracle).map_err(|e| e.to_string())?;
    Ok(vec![r0, r1])
}

/// A1 on a closed circuit whose label is trivial: deletes its heaviest once-used edge.
pub(crate) fn circuit_removal(
    g: &mut FGraph,
    q: &GraphPath,
    oracle: &dyn WordProblem,
    weight: &dyn Fn(&FGraph, Dart) -> usize,
) -> Result<Vec<MoveRecord>, String> {
    let idx = heaviest_once(g, q, weight, 0).ok_or("circuit has no removable edge")?;
    let w = detour(g, q, idx, None);
    let r = move_a1(g, q.darts[idx].edge(), &w, oracle).map_err(|e| e.to_string())?;
    Ok(vec![r])
}

/// First index `b` whose vertex already occurred, with that earlier index.
pub(crate) fn first_repeat(vs: &[usize]) -> Option<(usize, usize)> {
    for b in 1..vs.len() {
        if let Some(a) = vs[..b].iter().position(|&x| x == vs[b]) {
            return Some((a, b));
        }
    }
    None
}

pub(crate) fn letter_len(g: &FGraph, d: Dart) -> usize {
    g.label_len(d)
}

pub(crate) fn syllables(g: &FGraph, d: Dart) -> usize {
    g.edge_label(d.edge()).syllable_length()
}
