use std::collections::{BTreeSet, VecDeque};

use super::audit::{artin_completion_scan, replay_all};
use super::{
    bypass_surgery, circuit_removal, isolate_path, run, syllables, Family, GraphMode, Minimization,
    MinimizationOutcome, MinimizerConfig, Scan, Status, Step, Verdict, WitnessKind,
};
use crate::complexity::{fine, Measure};
use crate::fgraph::{Dart, FGraph, GraphPath};
use crate::oracles::{artin_relator_search, ArtinOracle, SearchBounds};
use crate::presentations::{ArtinPresentation, Presentation, Theorem};
use crate::words::{Mode, Word};

struct ArtinFamily<'a> {
    oracle: &'a ArtinOracle,
    bounds: SearchBounds,
}

/// Darts of the letter graph reading `a_i^{±1}` or `a_j^{±1}`.
fn pair_darts(lg: &FGraph, v: usize, i: usize, j: usize) -> impl Iterator<Item = Dart> + '_ {
    lg.out_darts(v).iter().copied().filter(move |&d| {
        let g = lg.first_letter(d).gen();
        g == i || g == j
    })
}

/// The first circuit of the `{i, j}` letter subgraph, in edge order.
fn pair_circuit(lg: &FGraph, i: usize, j: usize) -> Option<GraphPath> {
    let mut adj: Vec<Vec<Dart>> = vec![Vec::new(); lg.vertex_capacity()];
    for e in lg.edge_ids() {
        let g = lg.edge_label(e)[0].gen();
        if g != i && g != j {
            continue;
        }
        let (a, b) = lg.edge_ends(e);
        if let Some(mut p) = forest_path(lg, &adj, a, b) {
            p.darts.push(Dart::backward(e));
            return Some(p);
        }
        adj[a].push(Dart::forward(e));
        adj[b].push(Dart::backward(e));
    }
    None
}

fn forest_path(lg: &FGraph, adj: &[Vec<Dart>], a: usize, b: usize) -> Option<GraphPath> {
    let mut from: Vec<Option<Dart>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            let mut darts = Vec::new();
            let mut at = b;
            while let Some(d) = from[at] {
                darts.push(d);
                at = lg.origin(d);
            }
            darts.reverse();
            return Some(GraphPath { start: a, darts });
        }
        for &d in &adj[u] {
            let w = lg.terminus(d);
            if !seen[w] {
                seen[w] = true;
                from[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    None
}

impl ArtinFamily<'_> {
    fn pres(&self) -> &ArtinPresentation {
        self.oracle.presentation()
    }

    fn circuit(&self, g: &mut FGraph, lg: &FGraph, c: &GraphPath, i: usize, j: usize, key: String) -> Scan {
        let saved = g.clone();
        let label = c.label(lg);
        let (q, mut moves) = match isolate_path(g, c.start, &label) {
            Ok(x) => x,
            Err(e) => return Scan::Unresolved(key, e.to_string()),
        };
        match self.oracle.trivial_in_pair(&label, i, j) {
            Ok(false) => Scan::Witness(WitnessKind::ArtinParabolicIntersection(i, j), q),
            Ok(true) => match circuit_removal(g, &q, self.oracle, &syllables) {
                Ok(more) => {
                    moves.extend(more);
                    Scan::Applied(Step::Removal, moves)
                }
                Err(e) => {
                    *g = saved;
                    Scan::Rejected(key, e)
                }
            },
            Err(e) => {
                *g = saved;
                Scan::Unresolved(key, e.to_string())
            }
        }
    }

    fn segment(&self, g: &mut FGraph, start: usize, v: &Word, i: usize, j: usize, m: usize, key: String) -> Scan {
        let u = match artin_relator_search(v, i, j, m, self.bounds) {
            Ok(Some(u)) => u,
            Ok(None) => return Scan::Unresolved(key, "no completion within the search bounds".into()),
            Err(e) => return Scan::Unresolved(key, e.to_string()),
        };
        let saved = g.clone();
        let before = fine(g);
        let replacement = u.invert(Mode::FreeInverse);
        let floor = replacement.syllable_length();
        let result = isolate_path(g, start, v).map_err(|e| e.to_string()).and_then(|(q, mut moves)| {
            moves.extend(bypass_surgery(g, &q, &replacement, self.oracle, &syllables, floor)?);
            Ok(moves)
        });
        match result {
            Ok(moves) if fine(g) < before => Scan::Applied(Step::Surgery, moves),
            Ok(_) => {
                *g = saved;
                Scan::Rejected(key, "surgery did not decrease c".into())
            }
            Err(e) => {
                *g = saved;
                Scan::Rejected(key, e)
            }
        }
    }
}

impl Family for ArtinFamily<'_> {
    fn measure(&self, g: &FGraph) -> Measure {
        Measure::Fine(fine(g))
    }

    fn scan(&self, g: &mut FGraph, skip: &BTreeSet<String>) -> Scan {
        let sub = g.letter_subdivision();
        let lg = &sub.graph;
        let pairs = self.pres().m.finite_pairs();
        for &(i, j, _) in &pairs {
            let key = format!("circuit a{} a{}", i + 1, j + 1);
            if skip.contains(&key) {
                continue;
            }
            if let Some(c) = pair_circuit(lg, i, j) {
                return self.circuit(g, lg, &c, i, j, key);
            }
        }
        // every two-generator subgraph is now a forest, so segments are tree paths
        for &(i, j, m) in &pairs {
            let m = m as usize;
            for a in lg.vertices() {
                if pair_darts(lg, a, i, j).next().is_none() {
                    continue;
                }
                for (b, v) in tree_labels(lg, a, i, j) {
                    if b <= a || v.syllable_length() + 3 < 2 * m {
                        continue;
                    }
                    let key = format!("v{a} v{b} a{} a{}", i + 1, j + 1);
                    if skip.contains(&key) {
                        continue;
                    }
                    return self.segment(g, a, &v, i, j, m, key);
                }
            }
        }
        Scan::Clean
    }
}

/// Labels of the tree paths from `a` in its `{i, j}` component, by BFS order.
fn tree_labels(lg: &FGraph, a: usize, i: usize, j: usize) -> Vec<(usize, Word)> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::from([a]);
    let mut queue = VecDeque::from([(a, Word::empty())]);
    while let Some((u, w)) = queue.pop_front() {
        for d in pair_darts(lg, u, i, j) {
            let x = lg.terminus(d);
            if seen.insert(x) {
                let next = w.concat(&lg.label(d));
                out.push((x, next.clone()));
                queue.push_back((x, next));
            }
        }
    }
    out
}

/// Minimizes the fine complexity `c = (s, l, q)`.
pub fn minimize_artin(g0: &FGraph, oracle: &ArtinOracle, k: usize, cfg: &MinimizerConfig) -> Minimization {
    let bounds = SearchBounds { exponent_cap: cfg.exponent_cap };
    run(&ArtinFamily { oracle, bounds }, g0, GraphMode::Subgroup, k, cfg)
}

pub fn certify_artin(g0: &FGraph, pres: &ArtinPresentation, k: usize, cfg: &MinimizerConfig) -> Verdict {
    let thresholds = Presentation::Artin(pres.clone()).hypothesis_thresholds(k);
    let mut g = g0.clone();
    g.restrict_to_base_component();
    if !thresholds.met(Theorem::C) {
        return Verdict::bare(Status::HypothesisNotMet, thresholds, g, vec!["m_ij ≥ 5k fails".into()]);
    }
    let chi = g.euler_characteristic();
    if chi < 1 - k as i64 {
        return Verdict::bare(Status::HypothesisNotMet, thresholds, g, vec![format!("χ(Γ₀) = {chi} is below 1 − k")]);
    }
    let oracle = ArtinOracle::new(pres);
    let result = minimize_artin(&g, &oracle, k, cfg);
    let status = match result.outcome() {
        MinimizationOutcome::Witnessed => Status::Witnessed,
        MinimizationOutcome::Inconclusive => Status::Inconclusive,
        MinimizationOutcome::Fixpoint => Status::FreeCertified,
    };
    let mut verdict = Verdict::from_run(status, thresholds, result);
    verdict.audits.push(replay_all(&verdict, &oracle));
    if status == Status::FreeCertified {
        let edges = verdict.graph.edge_count();
        verdict.audits.push(artin_completion_scan(&verdict.graph, pres, edges + 2, cfg.audit_cap));
    }
    verdict.settle();
    verdict
}
