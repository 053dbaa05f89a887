use std::collections::BTreeSet;

use super::audit::{injectivity_audit, path_bound_audit, replay_all};
use super::{
    bypass_surgery, isolate_path, letter_len, run, Family, GraphMode, Minimization, MinimizationOutcome,
    MinimizerConfig, Scan, Status, Step, Verdict, WitnessKind,
};
use crate::complexity::{sigma, Measure};
use crate::fgraph::FGraph;
use crate::oracles::{NewmanOracle, OneRelatorTorsion};
use crate::presentations::{OneRelatorPresentation, Presentation, Theorem};
use crate::words::{Mode, Word};

struct OneRelatorFamily<'a> {
    oracle: &'a NewmanOracle,
}

impl OneRelatorFamily<'_> {
    fn pres(&self) -> &OneRelatorPresentation {
        self.oracle.presentation()
    }

    /// Shortest prefix of `rot` containing every generator of the relator.
    fn covering_prefix(&self, rot: &Word) -> usize {
        let support = self.pres().relator.support();
        (1..=rot.len())
            .find(|&x| support.iter().all(|&g| rot[..x].iter().any(|l| l.gen() == g)))
            .unwrap_or(rot.len())
    }

    fn torsion(&self, g: &mut FGraph, start: usize, label: &Word, key: String) -> Scan {
        let saved = g.clone();
        let q = match isolate_path(g, start, label) {
            Ok((q, _)) => q,
            Err(e) => return Scan::Unresolved(key, e.to_string()),
        };
        match self.oracle.torsion_classify(&q.label(g)) {
            OneRelatorTorsion::ConjPower(d) => Scan::Witness(WitnessKind::OneRelatorTorsion(d), q),
            other => {
                *g = saved;
                Scan::Unresolved(key, format!("periodic loop classified as {other:?}"))
            }
        }
    }

    fn surgery(&self, g: &mut FGraph, start: usize, v: &Word, beta: &Word, key: String) -> Scan {
        let saved = g.clone();
        let before = sigma(g);
        let replacement = beta.invert(Mode::FreeInverse);
        let result = isolate_path(g, start, v).map_err(|e| e.to_string()).and_then(|(q, mut moves)| {
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

impl Family for OneRelatorFamily<'_> {
    fn measure(&self, g: &FGraph) -> Measure {
        Measure::Sigma(sigma(g))
    }

    fn scan(&self, g: &mut FGraph, skip: &BTreeSet<String>) -> Scan {
        let n = self.pres().relator.len();
        let m = self.pres().exponent as usize;
        let sub = g.letter_subdivision();
        let lg = &sub.graph;
        for v in lg.vertices() {
            for (idx, (rot, _)) in self.oracle.rotations().iter().enumerate() {
                let key = format!("v{v} rotation {idx}");
                if skip.contains(&key) {
                    continue;
                }
                let text = rot.power(m);
                let (p, t) = lg.trace(v, &text);
                if t < (m - 1) * n + self.covering_prefix(rot) {
                    continue;
                }
                let t = t.min(m * n - 1);
                let vs = p.vertices(lg);
                let periodic = (1..=t).find_map(|b| {
                    (0..b).find(|&a| (b - a) % n == 0 && vs[a] == vs[b]).map(|a| (a, b))
                });
                if let Some((a, b)) = periodic {
                    return self.torsion(g, vs[a], &text.subword(a, b - a), key);
                }
                return self.surgery(g, v, &text.subword(0, t), &text.subword(t, m * n - t), key);
            }
        }
        Scan::Clean
    }
}

/// Minimizes `σ` for a subgroup of `⟨A | r^m⟩`.
pub fn minimize_one_relator(g0: &FGraph, oracle: &NewmanOracle, k: usize, cfg: &MinimizerConfig) -> Minimization {
    run(&OneRelatorFamily { oracle }, g0, GraphMode::Subgroup, k, cfg)
}

pub fn certify_one_relator(g0: &FGraph, pres: &OneRelatorPresentation, k: usize, cfg: &MinimizerConfig) -> Verdict {
    let thresholds = Presentation::OneRelator(pres.clone()).hypothesis_thresholds(k);
    let mut g = g0.clone();
    g.restrict_to_base_component();
    if !thresholds.met(Theorem::D) {
        let note = thresholds
            .check(Theorem::D)
            .and_then(|c| c.note.clone())
            .unwrap_or_else(|| "m ≥ b(6k − 2) + 2 fails".into());
        return Verdict::bare(Status::HypothesisNotMet, thresholds, g, vec![note]);
    }
    let chi = g.euler_characteristic();
    if chi < 1 - k as i64 {
        return Verdict::bare(Status::HypothesisNotMet, thresholds, g, vec![format!("χ(Γ₀) = {chi} is below 1 − k")]);
    }
    let oracle = NewmanOracle::new(pres);
    let result = minimize_one_relator(&g, &oracle, k, cfg);
    let status = match result.outcome() {
        MinimizationOutcome::Witnessed => Status::Witnessed,
        MinimizationOutcome::Inconclusive => Status::Inconclusive,
        MinimizationOutcome::Fixpoint => Status::FreeCertified,
    };
    let mut verdict = Verdict::from_run(status, thresholds, result);
    verdict.audits.push(replay_all(&verdict, &oracle));
    if status == Status::FreeCertified {
        let bound = 2 * pres.relator.len() * pres.exponent as usize;
        verdict.audits.push(injectivity_audit(&verdict.graph, &oracle, bound, cfg.audit_cap));
        verdict.audits.extend(path_bound_audit(&verdict.graph, k));
    }
    verdict.settle();
    verdict
}
