use std::collections::BTreeSet;

use serde::Serialize;

use super::audit::{injectivity_audit, path_bound_audit, replay_all, rpp_audit, weak_dehn_path_scan, Audit};
use super::{
    bypass_surgery, circuit_removal, first_repeat, isolate_path, letter_len, run, Family, GraphMode,
    MinimizationOutcome, MinimizerConfig, MinimizerError, Minimization, Scan, Status, Step, Verdict, WitnessKind,
};
use crate::complexity::{sigma, Measure};
use crate::fgraph::{FGraph, GraphPath};
use crate::moves::gcd_wrap;
use crate::oracles::{CoxeterOracle, TorsionClass};
use crate::presentations::{alternating, CoxeterPresentation, Presentation, Theorem};
use crate::words::{Mode, Word};

/// Which hypothesis the run enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoxeterGoal {
    /// Torsion-freeness: every weakly-Dehn hit is acted on, rotation circuits are witnesses.
    TorsionFree,
    /// No conjugates of generators: relator cycles are allowed, rotation circuits are wrapped.
    NoGeneratorConjugates,
}

struct CoxeterFamily<'a> {
    oracle: &'a CoxeterOracle,
    goal: CoxeterGoal,
}

fn witness_kind(class: TorsionClass) -> Option<WitnessKind> {
    match class {
        TorsionClass::ConjGenerator(i) => Some(WitnessKind::GeneratorConjugate(i)),
        TorsionClass::ConjRotationPower(i, j, d) => Some(WitnessKind::RotationPowerTorsion(i, j, d)),
        _ => None,
    }
}

impl CoxeterFamily<'_> {
    fn pres(&self) -> &CoxeterPresentation {
        self.oracle.presentation()
    }

    fn classify_circuit(&self, g: &FGraph, q: &GraphPath, key: String) -> Scan {
        let label = q.label(g);
        match witness_kind(self.oracle.torsion_classify(&label)) {
            Some(kind) => Scan::Witness(kind, q.clone()),
            None => Scan::Unresolved(key, "closed relator subpath with an unexpected class".into()),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn resolve(&self, g: &mut FGraph, vs: &[usize], r: &Word, t: usize, x: usize, y: usize, m: usize, key: String) -> Scan {
        let saved = g.clone();
        let before = sigma(g);
        if let Some((a, b)) = first_repeat(vs) {
            let len = b - a;
            let label = r.subword(a, len);
            let (q, mut moves) = match isolate_path(g, vs[a], &label) {
                Ok(x) => x,
                Err(e) => {
                    *g = saved;
                    return Scan::Unresolved(key, e.to_string());
                }
            };
            if len % 2 == 1 {
                return self.classify_circuit(g, &q, key);
            }
            let z = len / 2;
            if z == m {
                return match circuit_removal(g, &q, self.oracle, &letter_len) {
                    Ok(more) => {
                        moves.extend(more);
                        Scan::Applied(Step::Removal, moves)
                    }
                    Err(e) => {
                        *g = saved;
                        Scan::Rejected(key, e)
                    }
                };
            }
            if self.goal == CoxeterGoal::TorsionFree {
                return self.classify_circuit(g, &q, key);
            }
            if m % z == 0 {
                *g = saved;
                return Scan::Unresolved(key, format!("circuit (a{} a{})^{z} divides m off a relator cycle", x + 1, y + 1));
            }
            return match gcd_wrap(g, &q, x, y, z as u32, self.pres(), self.oracle) {
                Ok((rec, folds)) => {
                    moves.push(rec);
                    moves.extend(folds);
                    Scan::Applied(Step::GcdWrap, moves)
                }
                Err(e) => {
                    *g = saved;
                    Scan::Rejected(key, e.to_string())
                }
            };
        }
        let t = t.min(2 * m - 1);
        let v = r.subword(0, t);
        let replacement = r.subword(t, 2 * m - t).invert(Mode::Involutive);
        let result = isolate_path(g, vs[0], &v).map_err(|e| e.to_string()).and_then(|(q, mut moves)| {
            moves.extend(bypass_surgery(g, &q, &replacement, self.oracle, &letter_len, replacement.len())?);
            Ok(moves)
        });
        match result {
            Ok(moves) if sigma(g) < before => Scan::Applied(Step::Surgery, moves),
            Ok(_) => {
                *g = saved;
                Scan::Rejected(key, "surgery did not decrease σ".into())
            }
            Err(e) => {
                *g = saved;
                Scan::Rejected(key, e)
            }
        }
    }
}

impl Family for CoxeterFamily<'_> {
    fn measure(&self, g: &FGraph) -> Measure {
        Measure::Sigma(sigma(g))
    }

    fn scan(&self, g: &mut FGraph, skip: &BTreeSet<String>) -> Scan {
        let sub = g.letter_subdivision();
        let lg = &sub.graph;
        if let Some(e) = lg.edge_ids().find(|&e| lg.is_loop(e)) {
            let key = format!("letter loop {e}");
            if !skip.contains(&key) {
                let (v, _) = lg.edge_ends(e);
                let label = lg.edge_label(e).clone();
                return match isolate_path(g, v, &label) {
                    Ok((q, _)) => self.classify_circuit(g, &q, key),
                    Err(err) => Scan::Unresolved(key, err.to_string()),
                };
            }
        }
        for v in lg.vertices() {
            for (i, j, m) in self.pres().m.finite_pairs() {
                let m = m as usize;
                for (x, y) in [(i, j), (j, i)] {
                    let key = format!("v{v} a{} a{}", x + 1, y + 1);
                    if skip.contains(&key) {
                        continue;
                    }
                    let r = alternating(x, y, 2 * m);
                    let (p, t) = lg.trace(v, &r);
                    if t + 3 < 2 * m {
                        continue;
                    }
                    let relator_cycle = t == 2 * m && p.end(lg) == v;
                    if relator_cycle && self.goal == CoxeterGoal::NoGeneratorConjugates {
                        continue;
                    }
                    let vs = p.vertices(lg);
                    return self.resolve(g, &vs, &r, t, x, y, m, key);
                }
            }
        }
        Scan::Clean
    }
}

/// Minimizes `σ` over graphs representing the subgroup (or the pair) of `g0`.
pub fn minimize_coxeter(
    g0: &FGraph,
    oracle: &CoxeterOracle,
    k: usize,
    mode: GraphMode,
    goal: CoxeterGoal,
    cfg: &MinimizerConfig,
) -> Minimization {
    run(&CoxeterFamily { oracle, goal }, g0, mode, k, cfg)
}

fn outcome_status(run: &Minimization, certified: Status) -> Status {
    match run.outcome() {
        MinimizationOutcome::Witnessed => Status::Witnessed,
        MinimizationOutcome::Inconclusive => Status::Inconclusive,
        MinimizationOutcome::Fixpoint => certified,
    }
}

fn chi_precondition(g: &FGraph, k: usize) -> Option<String> {
    let chi = g.euler_characteristic();
    (chi < 1 - k as i64).then(|| format!("χ(Γ₀) = {chi} is below 1 − k = {}", 1 - k as i64))
}

/// Runs the minimizer and issues a verdict for the subgroup read by `g0`.
pub fn certify_coxeter(
    g0: &FGraph,
    pres: &CoxeterPresentation,
    k: usize,
    torsion_free_required: bool,
    cfg: &MinimizerConfig,
) -> Verdict {
    let thresholds = Presentation::Coxeter(pres.clone()).hypothesis_thresholds(k);
    let mut g = g0.clone();
    g.restrict_to_base_component();
    if !thresholds.met(Theorem::A) {
        return Verdict::bare(Status::HypothesisNotMet, thresholds, g, vec!["m_ij ≥ 3k + 1 fails".into()]);
    }
    if let Some(note) = chi_precondition(&g, k) {
        return Verdict::bare(Status::HypothesisNotMet, thresholds, g, vec![note]);
    }
    let oracle = CoxeterOracle::new(pres).expect("threshold implies extra-large");
    let goal = if torsion_free_required { CoxeterGoal::TorsionFree } else { CoxeterGoal::NoGeneratorConjugates };
    let result = minimize_coxeter(&g, &oracle, k, GraphMode::Subgroup, goal, cfg);
    let certified = if torsion_free_required { Status::FreeCertified } else { Status::QuasiconvexCertified };
    let status = outcome_status(&result, certified);
    let mut verdict = Verdict::from_run(status, thresholds, result);
    verdict.audits.push(replay_all(&verdict, &oracle));
    if status == certified {
        verdict.quasiconvex = true;
        verdict.audits.push(rpp_audit(&verdict.graph, &oracle));
        if torsion_free_required {
            let max_m = pres.m.finite_pairs().iter().map(|p| p.2 as usize).max().unwrap_or(0);
            verdict.audits.push(weak_dehn_path_scan(&verdict.graph, &oracle, 2 * max_m, cfg.audit_cap));
            verdict.audits.push(injectivity_audit(&verdict.graph, &oracle, 4 * max_m, cfg.audit_cap));
            verdict.audits.extend(path_bound_audit(&verdict.graph, k));
        }
    }
    verdict.settle();
    verdict
}

/// Theorem-B style separability of `H` from `element`, via a minimal graph for the pair.
pub fn separability_pair(
    g_h: &FGraph,
    element: &Word,
    pres: &CoxeterPresentation,
    k: usize,
    cfg: &MinimizerConfig,
) -> Result<Verdict, MinimizerError> {
    let thresholds = Presentation::Coxeter(pres.clone()).hypothesis_thresholds(k);
    let mut g = g_h.clone();
    g.restrict_to_base_component();
    if !thresholds.met(Theorem::B) {
        let note = thresholds
            .check(Theorem::B)
            .and_then(|c| c.note.clone())
            .unwrap_or_else(|| "m_ij ≥ 3k + 7 fails".into());
        return Ok(Verdict::bare(Status::HypothesisNotMet, thresholds, g, vec![note]));
    }
    if let Some(note) = chi_precondition(&g, k) {
        return Ok(Verdict::bare(Status::HypothesisNotMet, thresholds, g, vec![note]));
    }
    let oracle = CoxeterOracle::new(pres).expect("threshold implies extra-large");
    let rep = oracle.dehn_reduce(element);
    if rep.is_empty() {
        return Err(MinimizerError::TrivialElement);
    }
    let t = g.add_vertex();
    g.add_edge(g.base(), t, rep).map_err(crate::moves::MoveError::from)?;
    g.set_target(Some(t)).map_err(crate::moves::MoveError::from)?;
    let result = minimize_coxeter(&g, &oracle, k, GraphMode::Pair, CoxeterGoal::NoGeneratorConjugates, cfg);
    let status = outcome_status(&result, Status::SeparableCertified);
    let mut verdict = Verdict::from_run(status, thresholds, result);
    verdict.audits.push(replay_all(&verdict, &oracle));
    if status == Status::SeparableCertified {
        verdict.audits.push(rpp_audit(&verdict.graph, &oracle));
        let apart = verdict.graph.target().is_some_and(|t| t != verdict.graph.base());
        verdict.audits.push(Audit::simple("distinct_marks", apart, "target and base stay apart".into()));
    }
    verdict.settle();
    Ok(verdict)
}

/// Quasiconvexity of an `s`-generated subgroup through its parity double cover.
pub fn half_rank_certify(
    g_h: &FGraph,
    pres: &CoxeterPresentation,
    s: usize,
    cfg: &MinimizerConfig,
) -> Result<Verdict, MinimizerError> {
    if !pres.all_finite_even() {
        return Err(MinimizerError::OddExponent);
    }
    let cover = g_h.parity_double_cover(pres).map_err(crate::moves::MoveError::from)?;
    let (k, note) = if cover.connected {
        (2 * s - 1, format!("H₀ = H ∩ G₀ has index two, rank budget 2s − 1 = {}", 2 * s - 1))
    } else {
        (s, "H lies in G₀, rank budget s".to_string())
    };
    let thresholds = Presentation::Coxeter(pres.clone()).hypothesis_thresholds(k);
    if !thresholds.met(Theorem::A) {
        return Ok(Verdict::bare(Status::HypothesisNotMet, thresholds, cover.graph, vec![note]));
    }
    let oracle = CoxeterOracle::new(pres).expect("threshold implies extra-large");
    let result = minimize_coxeter(&cover.graph, &oracle, k, GraphMode::Subgroup, CoxeterGoal::NoGeneratorConjugates, cfg);
    let status = outcome_status(&result, Status::QuasiconvexCertified);
    let mut verdict = Verdict::from_run(status, thresholds, result);
    verdict.notes.insert(0, note);
    verdict.audits.push(replay_all(&verdict, &oracle));
    if status == Status::QuasiconvexCertified {
        verdict.quasiconvex = true;
        verdict.audits.push(rpp_audit(&verdict.graph, &oracle));
    }
    verdict.settle();
    Ok(verdict)
}
