//! Lexicographic complexities `σ = (l, q)` and `c = (s, l, q)`, and the simple-path bound.

use std::cmp::Ordering;

use serde::{Serialize, Serializer};

use crate::fgraph::{Dart, FGraph, GraphPath};

/// `(total label length, vertex count)`, ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Complexity {
    pub l: usize,
    pub q: usize,
}

/// `(total syllable length, total label length, vertex count)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FineComplexity {
    pub s: usize,
    pub l: usize,
    pub q: usize,
}

impl Serialize for Complexity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.l, self.q).serialize(s)
    }
}

impl Serialize for FineComplexity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.s, self.l, self.q).serialize(s)
    }
}

pub fn sigma(g: &FGraph) -> Complexity {
    Complexity { l: g.total_length(), q: g.vertex_count() }
}

pub fn fine(g: &FGraph) -> FineComplexity {
    FineComplexity { s: g.total_syllables(), l: g.total_length(), q: g.vertex_count() }
}

/// Either measure, for traces that mix families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Measure {
    Sigma(Complexity),
    Fine(FineComplexity),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cannot compare σ with c")]
pub struct MixedMeasures;

impl Measure {
    pub fn compare(&self, other: &Measure) -> Result<Ordering, MixedMeasures> {
        match (self, other) {
            (Measure::Sigma(a), Measure::Sigma(b)) => Ok(a.cmp(b)),
            (Measure::Fine(a), Measure::Fine(b)) => Ok(a.cmp(b)),
            _ => Err(MixedMeasures),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathBoundReport {
    pub k: usize,
    pub bound: usize,
    pub longest_simple_path: usize,
    #[serde(skip)]
    pub witness: Option<GraphPath>,
    pub spanning_tree_edges: usize,
    pub preconditions: Vec<String>,
    pub holds: bool,
}

/// Every simple path and every maximal subtree has at most `2k − 3` edges, for a connected
/// graph with `χ = 1 − k`, `k ≥ 2`, and every vertex of degree at least three.
pub fn path_bound_check(g: &FGraph, k: usize) -> PathBoundReport {
    let mut preconditions = Vec::new();
    if !g.is_connected() {
        preconditions.push("graph is not connected".to_string());
    }
    if k < 2 {
        preconditions.push(format!("k = {k} < 2"));
    }
    if g.euler_characteristic() != 1 - k as i64 {
        preconditions.push(format!("χ = {} ≠ 1 − k", g.euler_characteristic()));
    }
    if let Some(v) = g.vertices().find(|&v| g.degree(v) < 3) {
        preconditions.push(format!("vertex {v} has degree {}", g.degree(v)));
    }
    let bound = (2 * k).saturating_sub(3);
    let (longest, witness) = longest_simple_path(g);
    let tree = g.vertex_count().saturating_sub(1);
    PathBoundReport {
        k,
        bound,
        longest_simple_path: longest,
        witness,
        spanning_tree_edges: tree,
        holds: longest <= bound && tree <= bound,
        preconditions,
    }
}

/// Exhaustive search over paths without repeated vertices.
pub fn longest_simple_path(g: &FGraph) -> (usize, Option<GraphPath>) {
    let mut best: Option<GraphPath> = None;
    let mut on_path = vec![false; g.vertex_capacity()];
    for v in g.vertices() {
        let mut darts = Vec::new();
        on_path[v] = true;
        extend(g, v, &mut on_path, &mut darts, &mut best, v);
        on_path[v] = false;
    }
    (best.as_ref().map_or(0, GraphPath::len), best)
}

fn extend(
    g: &FGraph,
    at: usize,
    on_path: &mut [bool],
    darts: &mut Vec<Dart>,
    best: &mut Option<GraphPath>,
    start: usize,
) {
    if best.as_ref().map_or(true, |b| darts.len() > b.len()) {
        *best = Some(GraphPath { start, darts: darts.clone() });
    }
    for &d in g.out_darts(at) {
        let w = g.terminus(d);
        if on_path[w] {
            continue;
        }
        on_path[w] = true;
        darts.push(d);
        extend(g, w, on_path, darts, best, start);
        darts.pop();
        on_path[w] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, Mode, Word};

    fn w(xs: &[i32]) -> Word {
        Word::from_signed(xs)
    }

    #[test]
    fn complexity_examples() {
        let (g, _) = FGraph::bouquet(&[w(&[1, 2]), w(&[3])], &Alphabet::numbered(3, Mode::FreeInverse)).unwrap();
        assert_eq!(sigma(&g), Complexity { l: 3, q: 1 });
        assert_eq!(fine(&g), FineComplexity { s: 3, l: 3, q: 1 });
        let (g, _) = FGraph::bouquet(&[w(&[1, 1, 2])], &Alphabet::numbered(2, Mode::FreeInverse)).unwrap();
        assert_eq!(fine(&g), FineComplexity { s: 2, l: 3, q: 1 });
    }

    #[test]
    fn ordering_examples() {
        assert!(Complexity { l: 3, q: 2 } < Complexity { l: 3, q: 5 });
        assert!(Complexity { l: 3, q: 5 } < Complexity { l: 4, q: 1 });
        assert!(FineComplexity { s: 2, l: 9, q: 1 } < FineComplexity { s: 3, l: 1, q: 1 });
        let a = Measure::Sigma(Complexity { l: 1, q: 1 });
        let b = Measure::Fine(FineComplexity { s: 1, l: 1, q: 1 });
        assert!(a.compare(&b).is_err());
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1,1]");
    }

    #[test]
    fn path_bound_examples() {
        let alphabet = Alphabet::numbered(3, Mode::FreeInverse);
        let mut theta = FGraph::new(alphabet.clone());
        let v = theta.add_vertex();
        for g in 1..=3 {
            theta.add_edge(0, v, w(&[g])).unwrap();
        }
        let rep = path_bound_check(&theta, 2);
        assert!(rep.preconditions.is_empty());
        assert_eq!((rep.bound, rep.longest_simple_path), (1, 1));
        assert!(rep.holds);
        let (b, _) = FGraph::bouquet(&[w(&[1]), w(&[2])], &alphabet).unwrap();
        let rep = path_bound_check(&b, 2);
        assert_eq!((rep.spanning_tree_edges, rep.longest_simple_path), (0, 0));
        assert!(rep.holds);
    }

    #[test]
    fn simple_paths_match_brute_force_on_cubic_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let alphabet = Alphabet::numbered(3, Mode::FreeInverse);
        let mut checked = 0;
        while checked < 40 {
            // k = 3: four trivalent vertices and six edges
            let mut g = FGraph::new(alphabet.clone());
            for _ in 0..3 {
                g.add_vertex();
            }
            let mut stubs: Vec<usize> = (0..4).flat_map(|v| [v, v, v]).collect();
            let mut ok = true;
            while !stubs.is_empty() {
                let a = stubs.swap_remove(rng.gen_range(0..stubs.len()));
                let b = stubs.swap_remove(rng.gen_range(0..stubs.len()));
                if g.add_edge(a, b, w(&[1])).is_err() {
                    ok = false;
                }
            }
            if !ok || !g.is_connected() {
                continue;
            }
            checked += 1;
            let rep = path_bound_check(&g, 3);
            assert!(rep.preconditions.is_empty());
            // brute force: vertex sequences without repeats joined by edges
            let mut best = 0;
            for perm in permutations(&[0, 1, 2, 3]) {
                for len in 1..=4 {
                    let seq = &perm[..len];
                    if seq.windows(2).all(|p| g.out_darts(p[0]).iter().any(|&d| g.terminus(d) == p[1])) {
                        best = best.max(len - 1);
                    }
                }
            }
            assert_eq!(rep.longest_simple_path, best);
            assert!(rep.holds);
        }
    }

    fn permutations(xs: &[usize]) -> Vec<Vec<usize>> {
        if xs.len() <= 1 {
            return vec![xs.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..xs.len() {
            let mut rest = xs.to_vec();
            let x = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
}
