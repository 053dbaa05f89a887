//! Folds and the elementary moves A0–A3, plus the gcd wrap for rotation circuits.

use serde::Serialize;
use thiserror::Error;

use crate::complexity::{fine, sigma, Complexity, FineComplexity};
use crate::fgraph::{Dart, FGraph, GraphError, GraphPath};
use crate::oracles::WordProblem;
use crate::presentations::{alternating, CoxeterPresentation};
use crate::words::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("the two darts are the same")]
    SameDart,
    #[error("darts do not share an origin")]
    DifferentOrigins,
    #[error("labels have no common prefix")]
    NoCommonPrefix,
    #[error("oracle denies the equality")]
    Refused,
    #[error("oracle cannot decide the equality")]
    Undecided,
    #[error("path is not well formed")]
    BadPath,
    #[error("witness path uses the deleted edge")]
    WitnessUsesEdge,
    #[error("witness does not join the endpoints of the edge")]
    WitnessEndpoints,
    #[error("vertex {0} is marked")]
    Marked(usize),
    #[error("vertex {0} does not have degree two")]
    NotDegreeTwo(usize),
    #[error("vertex {0} carries a loop")]
    LoopAtVertex(usize),
    #[error("labels cancel completely")]
    FullCancellation,
    #[error("circuit is not a simple closed reduced path reading the rotation power")]
    BadCircuit,
    #[error("z divides m, nothing to wrap")]
    GcdNoOp,
    #[error("gcd wrap rejected: {0}")]
    GcdRejected(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MoveKind {
    Fold,
    A0,
    A1,
    A2,
    A3,
    GcdWrap,
}

impl MoveKind {
    pub const ALL: [MoveKind; 6] =
        [MoveKind::Fold, MoveKind::A0, MoveKind::A1, MoveKind::A2, MoveKind::A3, MoveKind::GcdWrap];

    /// Whether a change of Euler characteristic is admissible for this kind.
    pub fn chi_delta_ok(self, delta: i64) -> bool {
        match self {
            MoveKind::Fold => delta >= 0,
            MoveKind::A0 => delta == -1,
            MoveKind::A1 => delta == 1,
            MoveKind::A2 | MoveKind::A3 => delta == 0,
            MoveKind::GcdWrap => delta >= 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub affected: Vec<usize>,
    pub chi_before: i64,
    pub chi_after: i64,
    pub sigma_before: Complexity,
    pub sigma_after: Complexity,
    pub fine_before: FineComplexity,
    pub fine_after: FineComplexity,
}

impl MoveRecord {
    pub fn chi_delta(&self) -> i64 {
        self.chi_after - self.chi_before
    }

    pub fn chi_ok(&self) -> bool {
        self.kind.chi_delta_ok(self.chi_delta())
    }
}

struct Snapshot {
    chi: i64,
    sigma: Complexity,
    fine: FineComplexity,
}

fn snapshot(g: &FGraph) -> Snapshot {
    Snapshot { chi: g.euler_characteristic(), sigma: sigma(g), fine: fine(g) }
}

fn record(kind: MoveKind, affected: Vec<usize>, before: Snapshot, g: &FGraph) -> MoveRecord {
    let after = snapshot(g);
    MoveRecord {
        kind,
        affected,
        chi_before: before.chi,
        chi_after: after.chi,
        sigma_before: before.sigma,
        sigma_after: after.sigma,
        fine_before: before.fine,
        fine_after: after.fine,
    }
}

fn common_prefix(a: &Word, b: &Word) -> usize {
    a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count()
}

/// Identifies the maximal common initial segments of two darts leaving one vertex.
pub fn fold_step(g: &mut FGraph, d1: Dart, d2: Dart) -> Result<MoveRecord, MoveError> {
    if d1 == d2 {
        return Err(MoveError::SameDart);
    }
    for d in [d1, d2] {
        if !g.has_edge(d.edge()) {
            return Err(GraphError::NoEdge(d.edge()).into());
        }
    }
    if g.origin(d1) != g.origin(d2) {
        return Err(MoveError::DifferentOrigins);
    }
    let same_edge = d1.edge() == d2.edge();
    let len1 = g.label_len(d1);
    let mut p = common_prefix(&g.label(d1), &g.label(d2));
    if same_edge {
        p = p.min((len1 - 1) / 2);
    }
    if p == 0 {
        return Err(MoveError::NoCommonPrefix);
    }
    let before = snapshot(g);
    let affected = vec![d1.edge(), d2.edge()];
    let (a1, rest1) = if p < len1 {
        let (a, b) = g.split_dart(d1, p)?;
        (a, Some(b))
    } else {
        (d1, None)
    };
    let d2 = if same_edge { rest1.expect("loop longer than prefix").inverse() } else { d2 };
    let a2 = if p < g.label_len(d2) { g.split_dart(d2, p)?.0 } else { d2 };
    let (t1, t2) = (g.terminus(a1), g.terminus(a2));
    if t1 != t2 {
        let (keep, gone) = if g.is_marked(t2) && !g.is_marked(t1) { (t2, t1) } else { (t1, t2) };
        g.merge_vertices(keep, gone)?;
    }
    g.remove_edge(a2.edge())?;
    Ok(record(MoveKind::Fold, affected, before, g))
}

/// Folds until the graph is folded.
pub fn fold_all(g: &mut FGraph) -> Vec<MoveRecord> {
    let mut log = Vec::new();
    while let Some((d1, d2)) = g.fold_violation() {
        log.push(fold_step(g, d1, d2).expect("violating pair folds"));
    }
    log
}

fn confirm(oracle: &dyn WordProblem, u: &Word, v: &Word) -> Result<(), MoveError> {
    match oracle.equal(u, v) {
        Some(true) => Ok(()),
        Some(false) => Err(MoveError::Refused),
        None => Err(MoveError::Undecided),
    }
}

/// Attaches an edge labeled `v_prime` parallel to `p`, once the oracle confirms `μ(p) = v_prime`.
pub fn move_a0(
    g: &mut FGraph,
    p: &GraphPath,
    v_prime: &Word,
    oracle: &dyn WordProblem,
) -> Result<(MoveRecord, usize), MoveError> {
    if !p.is_well_formed(g) {
        return Err(MoveError::BadPath);
    }
    confirm(oracle, &p.label(g), v_prime)?;
    let before = snapshot(g);
    let e = g.add_edge(p.start, p.end(g), v_prime.clone())?;
    Ok((record(MoveKind::A0, vec![e], before, g), e))
}

/// Deletes edge `e`, given a witness path between its endpoints reading the same element.
pub fn move_a1(
    g: &mut FGraph,
    e: usize,
    witness: &GraphPath,
    oracle: &dyn WordProblem,
) -> Result<MoveRecord, MoveError> {
    if !g.has_edge(e) {
        return Err(GraphError::NoEdge(e).into());
    }
    if !witness.is_well_formed(g) {
        return Err(MoveError::BadPath);
    }
    if witness.darts.iter().any(|d| d.edge() == e) {
        return Err(MoveError::WitnessUsesEdge);
    }
    let (from, to) = g.edge_ends(e);
    if witness.start != from || witness.end(g) != to {
        return Err(MoveError::WitnessEndpoints);
    }
    confirm(oracle, g.edge_label(e), &witness.label(g))?;
    let before = snapshot(g);
    g.remove_edge(e)?;
    Ok(record(MoveKind::A1, vec![e], before, g))
}

/// Subdivides the stored orientation of `e` after `split` letters.
pub fn move_a2(g: &mut FGraph, e: usize, split: usize) -> Result<(MoveRecord, (Dart, Dart)), MoveError> {
    move_a2_dart(g, Dart::forward(e), split)
}

/// Subdivides along `d` after `split` letters read from its origin.
pub fn move_a2_dart(g: &mut FGraph, d: Dart, split: usize) -> Result<(MoveRecord, (Dart, Dart)), MoveError> {
    let before = snapshot(g);
    let parts = g.split_dart(d, split)?;
    let mid = g.terminus(parts.0);
    Ok((record(MoveKind::A2, vec![d.edge(), mid], before, g), parts))
}

/// Removes an unmarked degree-two vertex, joining its two edges.
pub fn move_a3(g: &mut FGraph, z: usize) -> Result<(MoveRecord, usize), MoveError> {
    if !g.has_vertex(z) {
        return Err(GraphError::NoVertex(z).into());
    }
    if g.is_marked(z) {
        return Err(MoveError::Marked(z));
    }
    if g.degree(z) != 2 {
        return Err(MoveError::NotDegreeTwo(z));
    }
    let (da, db) = (g.out_darts(z)[0], g.out_darts(z)[1]);
    if da.edge() == db.edge() {
        return Err(MoveError::LoopAtVertex(z));
    }
    let x = g.terminus(da);
    let y = g.terminus(db);
    let label = g.label(da.inverse()).concat(&g.label(db)).free_reduce(g.mode());
    if label.is_empty() {
        return Err(MoveError::FullCancellation);
    }
    let before = snapshot(g);
    g.remove_edge(da.edge())?;
    g.remove_edge(db.edge())?;
    g.remove_vertex(z)?;
    let e = g.add_edge(x, y, label)?;
    Ok((record(MoveKind::A3, vec![z, e], before, g), e))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Whether `p` is a closed reduced path without repeated interior vertices.
pub fn is_simple_circuit(g: &FGraph, p: &GraphPath) -> bool {
    if p.is_empty() || !p.is_well_formed(g) || !p.is_closed(g) {
        return false;
    }
    let vs = p.vertices(g);
    let inner = &vs[..vs.len() - 1];
    let mut sorted = inner.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let cyclic_ok = p.len() < 2 || g.may_follow(*p.darts.last().expect("nonempty"), p.darts[0]);
    sorted.len() == inner.len() && p.is_reduced(g) && cyclic_ok
}

/// Replaces a circuit reading `(a_i a_j)^z`, `z ∤ m_ij`, by a loop reading `(a_i a_j)^{gcd(z, m_ij)}`
/// and folds. Rolls back unless `χ` does not drop and `σ` strictly decreases.
pub fn gcd_wrap(
    g: &mut FGraph,
    circuit: &GraphPath,
    i: usize,
    j: usize,
    z: u32,
    p: &CoxeterPresentation,
    oracle: &dyn WordProblem,
) -> Result<(MoveRecord, Vec<MoveRecord>), MoveError> {
    let m = p.m.get(i, j).ok_or(MoveError::GcdNoOp)?;
    if z == 0 || z > m || !is_simple_circuit(g, circuit) || circuit.label(g) != alternating(i, j, 2 * z as usize) {
        return Err(MoveError::BadCircuit);
    }
    if m % z == 0 {
        return Err(MoveError::GcdNoOp);
    }
    let d = gcd(z as u64, m as u64) as u32;
    // (a_i a_j)^d = ((a_i a_j)^z)^α with α z ≡ d (mod m)
    let alpha = (1..=m).find(|&a| (a as u64 * z as u64) % m as u64 == d as u64).expect("Bezout");
    let loop_label = alternating(i, j, 2 * d as usize);
    let power = alternating(i, j, 2 * z as usize).power(alpha as usize);
    confirm(oracle, &power, &loop_label)?;
    let saved = g.clone();
    let before = snapshot(g);
    g.add_edge(circuit.start, circuit.start, loop_label)?;
    let folds = fold_all(g);
    let after = snapshot(g);
    if after.chi < before.chi || after.sigma >= before.sigma {
        let why = format!("χ {} → {}, σ {:?} → {:?}", before.chi, after.chi, before.sigma, after.sigma);
        *g = saved;
        return Err(MoveError::GcdRejected(why));
    }
    Ok((record(MoveKind::GcdWrap, vec![circuit.start], before, g), folds))
}
