//! Seeded random instances and aggregate statistics over their verdicts.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::Instance;
use crate::minimizer::{certify_artin, certify_coxeter, certify_one_relator, MinimizerConfig, Status, Verdict};
use crate::presentations::{ArtinPresentation, CoxeterPresentation, OneRelatorPresentation, Presentation};
use crate::words::{Letter, Mode, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyKind {
    Coxeter,
    Artin,
    OneRelator,
}

impl std::str::FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "coxeter" => Ok(FamilyKind::Coxeter),
            "artin" => Ok(FamilyKind::Artin),
            "one-relator" => Ok(FamilyKind::OneRelator),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSpec {
    pub family: FamilyKind,
    pub n: usize,
    pub m: u32,
    pub k: usize,
    pub word_len: (usize, usize),
    pub trials: usize,
    pub seed: u64,
    /// One-relator only.
    pub relator: Option<Word>,
}

/// A uniformly random reduced word with length drawn from `len`.
pub fn random_reduced_word(rng: &mut impl Rng, n: usize, mode: Mode, len: (usize, usize)) -> Word {
    let target = rng.gen_range(len.0..=len.1.max(len.0));
    let mut w = Word::empty();
    while w.len() < target {
        let gen = rng.gen_range(0..n);
        let positive = mode == Mode::Involutive || rng.gen_bool(0.5);
        let l = Letter::new(gen, positive);
        if w.last().is_some_and(|&p| p == l.inverse(mode)) {
            continue;
        }
        w.push(l);
    }
    w
}

pub fn presentation_for(spec: &CorpusSpec) -> Presentation {
    match spec.family {
        FamilyKind::Coxeter => Presentation::Coxeter(CoxeterPresentation::uniform(spec.n, spec.m)),
        FamilyKind::Artin => Presentation::Artin(ArtinPresentation::uniform(spec.n, spec.m)),
        FamilyKind::OneRelator => {
            let a = crate::words::Alphabet::numbered(spec.n, Mode::FreeInverse);
            let r = spec.relator.clone().unwrap_or_else(|| Word::from_signed(&[1, 2, -1, -2]));
            Presentation::OneRelator(OneRelatorPresentation::new(a, r, spec.m).expect("valid relator"))
        }
    }
}

/// `trials` instances, each with `k` random generators; fully determined by `seed`.
pub fn corpus_generate(spec: &CorpusSpec) -> Vec<Instance> {
    let presentation = presentation_for(spec);
    let mode = presentation.mode();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.trials)
        .map(|_| Instance {
            presentation: presentation.clone(),
            generators: (0..spec.k).map(|_| random_reduced_word(&mut rng, spec.n, mode, spec.word_len)).collect(),
            element: None,
            k: spec.k,
        })
        .collect()
}

/// The family's certification for an instance; Coxeter runs ask for torsion-freeness when
/// `torsion_free` is set.
pub fn certify_instance(inst: &Instance, torsion_free: bool, cfg: &MinimizerConfig) -> Verdict {
    let g = inst.bouquet();
    match &inst.presentation {
        Presentation::Coxeter(p) => certify_coxeter(&g, p, inst.k, torsion_free, cfg),
        Presentation::Artin(p) => certify_artin(&g, p, inst.k, cfg),
        Presentation::OneRelator(p) => certify_one_relator(&g, p, inst.k, cfg),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub trials: usize,
    pub counts: BTreeMap<String, usize>,
    pub mean_iterations: f64,
    pub mean_final_length: f64,
    pub mean_final_vertices: f64,
}

pub fn corpus_stats(verdicts: &[Verdict]) -> CorpusStats {
    let mut counts = BTreeMap::new();
    for s in [
        Status::FreeCertified,
        Status::QuasiconvexCertified,
        Status::SeparableCertified,
        Status::Witnessed,
        Status::HypothesisNotMet,
        Status::Inconclusive,
    ] {
        counts.insert(format!("{s:?}"), 0);
    }
    for v in verdicts {
        *counts.entry(format!("{:?}", v.status)).or_insert(0) += 1;
    }
    let n = verdicts.len().max(1) as f64;
    CorpusStats {
        trials: verdicts.len(),
        counts,
        mean_iterations: verdicts.iter().map(|v| v.iterations as f64).sum::<f64>() / n,
        mean_final_length: verdicts.iter().map(|v| v.graph.total_length() as f64).sum::<f64>() / n,
        mean_final_vertices: verdicts.iter().map(|v| v.graph.vertex_count() as f64).sum::<f64>() / n,
    }
}

impl CorpusStats {
    /// Plain-text table, one row per status.
    pub fn table(&self) -> String {
        let mut s = format!("{:<22}{:>8}\n", "status", "count");
        for (k, v) in &self.counts {
            s.push_str(&format!("{k:<22}{v:>8}\n"));
        }
        s.push_str(&format!("{:<22}{:>8}\n", "trials", self.trials));
        s.push_str(&format!("{:<22}{:>8.2}\n", "mean iterations", self.mean_iterations));
        s.push_str(&format!("{:<22}{:>8.2}\n", "mean final length", self.mean_final_length));
        s.push_str(&format!("{:<22}{:>8.2}\n", "mean final vertices", self.mean_final_vertices));
        s
    }
}
