//! Command-line front end for `foldmin`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use foldmin::corpus::{certify_instance, corpus_generate, corpus_stats, CorpusSpec, FamilyKind};
use foldmin::fgraph::FGraph;
use foldmin::input::{parse_input, Instance};
use foldmin::minimizer::{
    half_rank_certify, minimize_artin, minimize_coxeter, minimize_one_relator, separability_pair, CoxeterGoal,
    GraphMode, Minimization, MinimizationOutcome, MinimizerConfig, MinimizerError, Status, Verdict,
};
use foldmin::moves::fold_all;
use foldmin::oracles::{solve_word, ArtinOracle, CoxeterOracle, NewmanOracle, RelatorHit};
use foldmin::presentations::Presentation;
use foldmin::words::{Alphabet, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "foldmin", version, about = "Subgroup graph minimization for Coxeter, Artin and one-relator groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct RunOpts {
    /// Input file.
    pub file: PathBuf,
    /// Also write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write the final graph in DOT format here.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Write the ordered move records here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, env = "FOLDMIN_MAX_ITER", default_value_t = 1_000_000)]
    pub max_iter: usize,
    /// Largest syllable exponent tried by the Artin relator search.
    #[arg(long)]
    pub exponent_cap: Option<usize>,
    /// Recorded in reports; all tie-breaks are already deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RunOpts {
    fn config(&self) -> MinimizerConfig {
        MinimizerConfig { max_iter: self.max_iter, exponent_cap: self.exponent_cap, ..MinimizerConfig::default() }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the subgroup graph and report the fixpoint.
    Minimize(RunOpts),
    /// Minimize and certify the family's theorem.
    Certify {
        #[command(flatten)]
        opts: RunOpts,
        /// Coxeter only: certify quasiconvexity without asking for torsion-freeness.
        #[arg(long)]
        quasiconvex_only: bool,
        /// Coxeter only, all exponents even: certify through the parity double cover.
        #[arg(long, conflicts_with = "quasiconvex_only")]
        half_rank: bool,
    },
    /// Relator path property of the folded and of the minimized graph (Coxeter).
    Rpp(RunOpts),
    /// Separate the `element` from the subgroup (Coxeter).
    Separate(RunOpts),
    /// Decide a word in the group of the input file.
    Wp {
        file: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Aggregate verdicts over seeded random subgroups.
    Corpus(CorpusOpts),
}

#[derive(Debug, Args, Clone)]
pub struct CorpusOpts {
    #[arg(long = "type", value_parser = parse_family)]
    pub family: FamilyKind,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 7)]
    pub m: u32,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub min_len: usize,
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// One-relator only, e.g. "a1 a2 a1' a2'".
    #[arg(long)]
    pub relator: Option<String>,
    #[arg(long, env = "FOLDMIN_MAX_ITER", default_value_t = 1_000_000)]
    pub max_iter: usize,
    /// Write the statistics as JSON here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<FamilyKind, String> {
    s.parse()
}

/// An error already mapped to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

fn parse_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_PARSE, error: e.into() }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(parse_failure)?;
    parse_input(&text).with_context(|| format!("parsing {}", path.display())).map_err(parse_failure)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(parse_failure)
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Runs one command, writing its primary output to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Minimize(opts) => minimize(&opts, out),
        Command::Certify { opts, quasiconvex_only, half_rank } => certify(&opts, quasiconvex_only, half_rank, out),
        Command::Rpp(opts) => rpp(&opts, out),
        Command::Separate(opts) => separate(&opts, out),
        Command::Wp { file, word } => wp(&file, &word, out),
        Command::Corpus(opts) => corpus(&opts, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).context("writing output").map_err(parse_failure)
}

fn artifacts(opts: &RunOpts, report: &str, graph: &FGraph, trace: Option<Value>) -> Result<(), Failure> {
    if let Some(p) = &opts.json {
        write_file(p, report)?;
    }
    if let Some(p) = &opts.dot {
        write_file(p, &graph.to_dot())?;
    }
    if let (Some(p), Some(t)) = (&opts.trace, trace) {
        write_file(p, &pretty(&t))?;
    }
    Ok(())
}

fn move_trace(trace: &[foldmin::minimizer::TraceEntry]) -> Value {
    json!(trace.iter().flat_map(|t| t.moves.iter()).collect::<Vec<_>>())
}

fn minimize(opts: &RunOpts, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = load(&opts.file)?;
    let cfg = opts.config();
    let mut g = inst.bouquet();
    g.restrict_to_base_component();
    let run: Minimization = match &inst.presentation {
        Presentation::Coxeter(p) => {
            let oracle = CoxeterOracle::new(p).map_err(|e| Failure { code: EXIT_HYPOTHESIS, error: e.into() })?;
            minimize_coxeter(&g, &oracle, inst.k, GraphMode::Subgroup, CoxeterGoal::TorsionFree, &cfg)
        }
        Presentation::Artin(p) => minimize_artin(&g, &ArtinOracle::new(p), inst.k, &cfg),
        Presentation::OneRelator(p) => minimize_one_relator(&g, &NewmanOracle::new(p), inst.k, &cfg),
    };
    let a = inst.presentation.alphabet();
    let outcome = run.outcome();
    let report = json!({
        "outcome": outcome,
        "witnesses": run.witnesses.iter().map(|w| json!({
            "kind": w.kind,
            "label": a.format_word(&w.label),
            "conjugated": a.format_word(&w.conjugated),
        })).collect::<Vec<_>>(),
        "chi": run.graph.euler_characteristic(),
        "initial": run.initial,
        "complexity_trace": run.trace.iter().map(|t| t.measure).collect::<Vec<_>>(),
        "steps": run.trace.iter().map(|t| t.step).collect::<Vec<_>>(),
        "iterations": run.iterations,
        "conjugator": a.format_word(&run.conjugator),
        "unresolved": run.unresolved,
        "rejections": run.rejections,
        "capped": run.capped,
        "violations": run.violations,
        "seed": opts.seed,
        "graph": run.graph.to_json(),
    });
    let text = pretty(&report);
    emit(out, &text)?;
    artifacts(opts, &text, &run.graph, Some(move_trace(&run.trace)))?;
    Ok(match outcome {
        MinimizationOutcome::Inconclusive => EXIT_INCONCLUSIVE,
        _ => EXIT_OK,
    })
}

fn verdict_code(status: Status) -> i32 {
    match status {
        Status::HypothesisNotMet => EXIT_HYPOTHESIS,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
        _ => EXIT_OK,
    }
}

fn emit_verdict(opts: &RunOpts, v: &Verdict, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut report = serde_json::to_value(v.report()).expect("serializable");
    report["seed"] = json!(opts.seed);
    let text = pretty(&report);
    emit(out, &text)?;
    artifacts(opts, &text, &v.graph, Some(move_trace(&v.trace)))?;
    Ok(verdict_code(v.status))
}

fn hypothesis_failure(e: MinimizerError) -> Failure {
    Failure { code: EXIT_HYPOTHESIS, error: e.into() }
}

fn certify(opts: &RunOpts, quasiconvex_only: bool, half_rank: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = load(&opts.file)?;
    let cfg = opts.config();
    if half_rank || quasiconvex_only {
        let Presentation::Coxeter(p) = &inst.presentation else {
            return Err(parse_failure(anyhow!("--half-rank and --quasiconvex-only need a coxeter presentation")));
        };
        if half_rank {
            let v = half_rank_certify(&inst.bouquet(), p, inst.k, &cfg).map_err(hypothesis_failure)?;
            return emit_verdict(opts, &v, out);
        }
    }
    let v = certify_instance(&inst, !quasiconvex_only, &cfg);
    emit_verdict(opts, &v, out)
}

fn separate(opts: &RunOpts, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = load(&opts.file)?;
    let Presentation::Coxeter(p) = &inst.presentation else {
        return Err(parse_failure(anyhow!("separate needs a coxeter presentation")));
    };
    let element = inst.element.as_ref().ok_or_else(|| parse_failure(anyhow!("separate needs an `element` line")))?;
    let v = separability_pair(&inst.bouquet(), element, p, inst.k, &opts.config()).map_err(hypothesis_failure)?;
    emit_verdict(opts, &v, out)
}

fn rpp(opts: &RunOpts, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = load(&opts.file)?;
    let Presentation::Coxeter(p) = &inst.presentation else {
        return Err(parse_failure(anyhow!("rpp needs a coxeter presentation")));
    };
    let oracle = CoxeterOracle::new(p).map_err(|e| Failure { code: EXIT_HYPOTHESIS, error: e.into() })?;
    let mut folded = inst.bouquet();
    folded.restrict_to_base_component();
    fold_all(&mut folded);
    let run = minimize_coxeter(
        &folded,
        &oracle,
        inst.k,
        GraphMode::Subgroup,
        CoxeterGoal::NoGeneratorConjugates,
        &opts.config(),
    );
    let report = json!({
        "folded": oracle.relator_path_property(&folded),
        "minimized": oracle.relator_path_property(&run.graph),
        "outcome": run.outcome(),
        "seed": opts.seed,
        "graph": run.graph.to_json(),
    });
    let text = pretty(&report);
    emit(out, &text)?;
    artifacts(opts, &text, &run.graph, Some(move_trace(&run.trace)))?;
    Ok(match run.outcome() {
        MinimizationOutcome::Inconclusive => EXIT_INCONCLUSIVE,
        _ => EXIT_OK,
    })
}

fn hit_json(a: &Alphabet, h: &RelatorHit) -> Value {
    json!({
        "relator": a.format_word(&h.relator),
        "start": h.start,
        "len": h.len,
        "matched": a.format_word(&h.matched),
        "complement": a.format_word(&h.complement),
    })
}

fn wp(file: &Path, text: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let inst = load(file)?;
    let a: &Alphabet = inst.presentation.alphabet();
    let w = a.parse_word(text).context("parsing --word").map_err(parse_failure)?;
    let r = solve_word(&inst.presentation, &w).map_err(|e| Failure { code: EXIT_HYPOTHESIS, error: e.into() })?;
    let report = json!({
        "trivial": r.trivial,
        "reduced": a.format_word(&r.reduced),
        "hits": r.hits.iter().map(|h| hit_json(a, h)).collect::<Vec<_>>(),
    });
    emit(out, &pretty(&report))?;
    Ok(EXIT_OK)
}

fn corpus(opts: &CorpusOpts, out: &mut dyn Write) -> Result<i32, Failure> {
    let relator = match &opts.relator {
        Some(text) => {
            let a = Alphabet::numbered(opts.n, foldmin::words::Mode::FreeInverse);
            Some(a.parse_word(text).context("parsing --relator").map_err(parse_failure)?)
        }
        None => None,
    };
    let spec = CorpusSpec {
        family: opts.family,
        n: opts.n,
        m: opts.m,
        k: opts.k,
        word_len: (opts.min_len, opts.max_len),
        trials: opts.trials,
        seed: opts.seed,
        relator,
    };
    validate_spec(&spec).map_err(parse_failure)?;
    let cfg = MinimizerConfig { max_iter: opts.max_iter, ..MinimizerConfig::default() };
    let instances = corpus_generate(&spec);
    let verdicts: Vec<Verdict> = instances.par_iter().map(|inst| certify_instance(inst, true, &cfg)).collect();
    let stats = corpus_stats(&verdicts);
    emit(out, &stats.table())?;
    if let Some(p) = &opts.json {
        write_file(p, &pretty(&stats))?;
    }
    Ok(EXIT_OK)
}

fn validate_spec(spec: &CorpusSpec) -> anyhow::Result<()> {
    if spec.n == 0 {
        return Err(anyhow!("--n must be positive"));
    }
    if spec.m < 2 {
        return Err(anyhow!("--m must be at least 2"));
    }
    if spec.word_len.0 > spec.word_len.1 {
        return Err(anyhow!("--min-len exceeds --max-len"));
    }
    if spec.family == FamilyKind::OneRelator {
        let r = spec.relator.clone().unwrap_or_else(|| Word::from_signed(&[1, 2, -1, -2]));
        let a = Alphabet::numbered(spec.n, foldmin::words::Mode::FreeInverse);
        r.check_alphabet(&a)?;
        foldmin::presentations::OneRelatorPresentation::new(a, r, spec.m)?;
    }
    Ok(())
}
