//! Browser bindings: certify a subgroup, decide a word, sample a small corpus.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use foldmin::corpus::{certify_instance, corpus_generate, corpus_stats, CorpusSpec, FamilyKind};
use foldmin::input::parse_input;
use foldmin::minimizer::MinimizerConfig;
use foldmin::oracles::solve_word;

const DEMO_MAX_ITER: usize = 20_000;
const DEMO_TRIALS: usize = 200;

fn config() -> MinimizerConfig {
    MinimizerConfig { max_iter: DEMO_MAX_ITER, audit_cap: 20_000, ..MinimizerConfig::default() }
}

fn error(msg: impl std::fmt::Display) -> Value {
    json!({ "error": msg.to_string() })
}

/// Verdict report plus the final graph in DOT form.
pub fn certify_value(text: &str) -> Value {
    let inst = match parse_input(text) {
        Ok(i) => i,
        Err(e) => return error(e),
    };
    let v = certify_instance(&inst, true, &config());
    json!({ "report": v.report(), "dot": v.graph.to_dot() })
}

pub fn word_problem_value(text: &str, word: &str) -> Value {
    let inst = match parse_input(text) {
        Ok(i) => i,
        Err(e) => return error(e),
    };
    let a = inst.presentation.alphabet();
    let w = match a.parse_word(word) {
        Ok(w) => w,
        Err(e) => return error(e),
    };
    match solve_word(&inst.presentation, &w) {
        Ok(r) => json!({
            "trivial": r.trivial,
            "reduced": a.format_word(&r.reduced),
            "hits": r.hits.iter().map(|h| a.format_word(&h.relator)).collect::<Vec<_>>(),
        }),
        Err(e) => error(e),
    }
}

pub fn corpus_value(family: &str, n: usize, m: u32, k: usize, trials: usize, seed: u64) -> Value {
    let family: FamilyKind = match family.parse() {
        Ok(f) => f,
        Err(e) => return error(e),
    };
    if n < 2 || m < 2 || k == 0 {
        return error("need n ≥ 2, m ≥ 2 and k ≥ 1");
    }
    let spec = CorpusSpec {
        family,
        n,
        m,
        k,
        word_len: (1, 8),
        trials: trials.min(DEMO_TRIALS),
        seed,
        relator: None,
    };
    let cfg = config();
    let verdicts: Vec<_> = corpus_generate(&spec).iter().map(|i| certify_instance(i, true, &cfg)).collect();
    let stats = corpus_stats(&verdicts);
    json!({ "stats": stats, "table": stats.table() })
}

#[wasm_bindgen]
pub fn certify(text: &str) -> String {
    certify_value(text).to_string()
}

#[wasm_bindgen]
pub fn word_problem(text: &str, word: &str) -> String {
    word_problem_value(text, word).to_string()
}

#[wasm_bindgen]
pub fn corpus(family: &str, n: usize, m: u32, k: usize, trials: usize, seed: u64) -> String {
    corpus_value(family, n, m, k, trials, seed).to_string()
}
