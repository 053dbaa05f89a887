//! Word-labeled subgroup graphs with paired inverse edges.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentations::CoxeterPresentation;
use crate::words::{Alphabet, Letter, Mode, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge label must be nonempty")]
    EmptyLabel,
    #[error("edge label must be reduced")]
    UnreducedLabel,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("no vertex {0}")]
    NoVertex(usize),
    #[error("no edge {0}")]
    NoEdge(usize),
    #[error("vertex {0} is marked")]
    Marked(usize),
    #[error("vertex {0} still has incident edges")]
    NotIsolated(usize),
    #[error("target must differ from base")]
    TargetIsBase,
    #[error("split position {0} out of range")]
    SplitOutOfRange(usize),
    #[error("parity cover needs every finite exponent even")]
    OddExponent,
    #[error("path enumeration exceeded the cap of {0}")]
    CapExceeded(usize),
    #[error("malformed graph: {0}")]
    Malformed(String),
}

/// An oriented edge: `2·edge` is the stored orientation, `2·edge + 1` its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dart(u32);

impl std::fmt::Debug for Dart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}{}", self.edge(), if self.is_forward() { "" } else { "'" })
    }
}

impl Dart {
    pub fn forward(edge: usize) -> Dart {
        Dart(2 * edge as u32)
    }

    pub fn backward(edge: usize) -> Dart {
        Dart(2 * edge as u32 + 1)
    }

    pub fn edge(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_forward(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn inverse(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Edge {
    from: usize,
    to: usize,
    label: Word,
}

/// A finite connected-or-not F-graph with a base vertex and an optional target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FGraph {
    alphabet: Alphabet,
    alive: Vec<bool>,
    out: Vec<Vec<Dart>>,
    edges: Vec<Option<Edge>>,
    base: usize,
    target: Option<usize>,
}

/// A sequence of darts starting at `start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphPath {
    pub start: usize,
    pub darts: Vec<Dart>,
}

impl GraphPath {
    pub fn empty(start: usize) -> GraphPath {
        GraphPath { start, darts: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn end(&self, g: &FGraph) -> usize {
        self.darts.last().map_or(self.start, |&d| g.terminus(d))
    }

    pub fn is_closed(&self, g: &FGraph) -> bool {
        self.end(g) == self.start
    }

    pub fn is_well_formed(&self, g: &FGraph) -> bool {
        let mut at = self.start;
        for &d in &self.darts {
            if !g.has_edge(d.edge()) || g.origin(d) != at {
                return false;
            }
            at = g.terminus(d);
        }
        g.has_vertex(self.start)
    }

    /// The concatenated label, unreduced.
    pub fn label(&self, g: &FGraph) -> Word {
        let mut letters = Vec::new();
        for &d in &self.darts {
            letters.extend_from_slice(&g.label(d));
        }
        Word::from(letters)
    }

    pub fn is_reduced(&self, g: &FGraph) -> bool {
        self.darts.windows(2).all(|p| g.may_follow(p[0], p[1]))
    }

    pub fn inverse(&self, g: &FGraph) -> GraphPath {
        GraphPath { start: self.end(g), darts: self.darts.iter().rev().map(|d| d.inverse()).collect() }
    }

    /// Vertices visited, including start and end.
    pub fn vertices(&self, g: &FGraph) -> Vec<usize> {
        let mut vs = vec![self.start];
        vs.extend(self.darts.iter().map(|&d| g.terminus(d)));
        vs
    }
}

impl FGraph {
    /// One isolated base vertex.
    pub fn new(alphabet: Alphabet) -> FGraph {
        FGraph { alphabet, alive: vec![true], out: vec![Vec::new()], edges: Vec::new(), base: 0, target: None }
    }

    /// One loop per nontrivial generator. Returns the indices of dropped (trivial) generators.
    pub fn bouquet(words: &[Word], alphabet: &Alphabet) -> Result<(FGraph, Vec<usize>), GraphError> {
        let mut g = FGraph::new(alphabet.clone());
        let mut dropped = Vec::new();
        for (idx, w) in words.iter().enumerate() {
            let w = alphabet.free_reduce(w)?;
            if w.is_empty() {
                dropped.push(idx);
            } else {
                g.add_edge(0, 0, w)?;
            }
        }
        Ok((g, dropped))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn mode(&self) -> Mode {
        self.alphabet.mode
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn target(&self) -> Option<usize> {
        self.target
    }

    pub fn set_base(&mut self, v: usize) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        self.base = v;
        Ok(())
    }

    pub fn set_target(&mut self, v: Option<usize>) -> Result<(), GraphError> {
        if let Some(t) = v {
            self.check_vertex(t)?;
            if t == self.base {
                return Err(GraphError::TargetIsBase);
            }
        }
        self.target = v;
        Ok(())
    }

    pub fn is_marked(&self, v: usize) -> bool {
        v == self.base || self.target == Some(v)
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        self.alive.get(v).copied().unwrap_or(false)
    }

    pub fn has_edge(&self, e: usize) -> bool {
        matches!(self.edges.get(e), Some(Some(_)))
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if self.has_vertex(v) {
            Ok(())
        } else {
            Err(GraphError::NoVertex(v))
        }
    }

    fn edge_ref(&self, e: usize) -> &Edge {
        self.edges[e].as_ref().expect("live edge")
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(|&v| self.alive[v])
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].is_some())
    }

    pub fn vertex_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_some()).count()
    }

    /// Upper bound on vertex ids ever issued.
    pub fn vertex_capacity(&self) -> usize {
        self.alive.len()
    }

    pub fn edge_capacity(&self) -> usize {
        self.edges.len()
    }

    pub fn add_vertex(&mut self) -> usize {
        self.alive.push(true);
        self.out.push(Vec::new());
        self.alive.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, label: Word) -> Result<usize, GraphError> {
        self.check_vertex(from)?;
        self.check_vertex(to)?;
        label.check_alphabet(&self.alphabet)?;
        if label.is_empty() {
            return Err(GraphError::EmptyLabel);
        }
        if !label.is_reduced(self.mode()) {
            return Err(GraphError::UnreducedLabel);
        }
        let e = self.edges.len();
        self.edges.push(Some(Edge { from, to, label }));
        self.out[from].push(Dart::forward(e));
        self.out[to].push(Dart::backward(e));
        Ok(e)
    }

    pub fn remove_edge(&mut self, e: usize) -> Result<(), GraphError> {
        let edge = self.edges.get_mut(e).and_then(Option::take).ok_or(GraphError::NoEdge(e))?;
        self.out[edge.from].retain(|&d| d != Dart::forward(e));
        self.out[edge.to].retain(|&d| d != Dart::backward(e));
        Ok(())
    }

    pub fn remove_vertex(&mut self, v: usize) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        if self.is_marked(v) {
            return Err(GraphError::Marked(v));
        }
        if !self.out[v].is_empty() {
            return Err(GraphError::NotIsolated(v));
        }
        self.alive[v] = false;
        Ok(())
    }

    /// Moves every dart of `gone` onto `keep` and deletes `gone`. Marks follow the merge.
    pub fn merge_vertices(&mut self, keep: usize, gone: usize) -> Result<(), GraphError> {
        self.check_vertex(keep)?;
        self.check_vertex(gone)?;
        if keep == gone {
            return Ok(());
        }
        let darts = std::mem::take(&mut self.out[gone]);
        for &d in &darts {
            let edge = self.edges[d.edge()].as_mut().expect("live edge");
            if d.is_forward() {
                edge.from = keep;
            } else {
                edge.to = keep;
            }
        }
        self.out[keep].extend(darts);
        self.alive[gone] = false;
        if self.base == gone {
            self.base = keep;
        }
        if self.target == Some(gone) {
            self.target = Some(keep);
        }
        Ok(())
    }

    pub fn origin(&self, d: Dart) -> usize {
        let e = self.edge_ref(d.edge());
        if d.is_forward() {
            e.from
        } else {
            e.to
        }
    }

    pub fn terminus(&self, d: Dart) -> usize {
        self.origin(d.inverse())
    }

    pub fn label(&self, d: Dart) -> Word {
        let e = self.edge_ref(d.edge());
        if d.is_forward() {
            e.label.clone()
        } else {
            e.label.invert(self.mode())
        }
    }

    pub fn label_len(&self, d: Dart) -> usize {
        self.edge_ref(d.edge()).label.len()
    }

    /// Label of the stored orientation.
    pub fn edge_label(&self, e: usize) -> &Word {
        &self.edge_ref(e).label
    }

    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        let edge = self.edge_ref(e);
        (edge.from, edge.to)
    }

    pub fn first_letter(&self, d: Dart) -> Letter {
        let e = self.edge_ref(d.edge());
        if d.is_forward() {
            e.label[0]
        } else {
            e.label[e.label.len() - 1].inverse(self.mode())
        }
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let edge = self.edge_ref(e);
        edge.from == edge.to
    }

    /// Outgoing darts at `v`, loops contributing both orientations.
    pub fn out_darts(&self, v: usize) -> &[Dart] {
        &self.out[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    /// Whether `b` may follow `a` in a reduced path.
    pub fn may_follow(&self, a: Dart, b: Dart) -> bool {
        if b == a.inverse() {
            return false;
        }
        !(self.mode() == Mode::Involutive && a == b && self.label_len(a) == 1 && self.is_loop(a.edge()))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64
    }

    /// Total label length over stored orientations.
    pub fn total_length(&self) -> usize {
        self.edge_ids().map(|e| self.edge_ref(e).label.len()).sum()
    }

    /// Total syllable length over stored orientations.
    pub fn total_syllables(&self) -> usize {
        self.edge_ids().map(|e| self.edge_ref(e).label.syllable_length()).sum()
    }

    pub fn is_letter_graph(&self) -> bool {
        self.edge_ids().all(|e| self.edge_ref(e).label.len() == 1)
    }

    /// Darts sharing an origin whose labels start with the same letter, if any.
    pub fn fold_violation(&self) -> Option<(Dart, Dart)> {
        for v in self.vertices() {
            let out = &self.out[v];
            for (a, &d1) in out.iter().enumerate() {
                for &d2 in &out[a + 1..] {
                    if self.first_letter(d1) != self.first_letter(d2) {
                        continue;
                    }
                    if d2 == d1.inverse() && self.mode() == Mode::Involutive && self.label_len(d1) == 1 {
                        continue;
                    }
                    return Some((d1.min(d2), d1.max(d2)));
                }
            }
        }
        None
    }

    pub fn is_folded(&self) -> bool {
        self.fold_violation().is_none()
    }

    /// Splits the edge of `d` after `p` letters read along `d`. Returns the two new darts in
    /// reading order from `origin(d)`.
    pub fn split_dart(&mut self, d: Dart, p: usize) -> Result<(Dart, Dart), GraphError> {
        if !self.has_edge(d.edge()) {
            return Err(GraphError::NoEdge(d.edge()));
        }
        let len = self.label_len(d);
        if p == 0 || p >= len {
            return Err(GraphError::SplitOutOfRange(p));
        }
        let q = if d.is_forward() { p } else { len - p };
        let Edge { from, to, label } = self.edge_ref(d.edge()).clone();
        self.remove_edge(d.edge())?;
        let mid = self.add_vertex();
        let e1 = self.add_edge(from, mid, label.subword(0, q))?;
        let e2 = self.add_edge(mid, to, label.subword(q, len - q))?;
        if d.is_forward() {
            Ok((Dart::forward(e1), Dart::forward(e2)))
        } else {
            Ok((Dart::backward(e2), Dart::backward(e1)))
        }
    }

    pub fn is_connected(&self) -> bool {
        self.component_of(self.base).len() == self.vertex_count()
    }

    /// Vertices reachable from `v`, in BFS order.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.alive.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([v]);
        seen[v] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &d in &self.out[u] {
                let w = self.terminus(d);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Drops everything outside the base component.
    pub fn restrict_to_base_component(&mut self) {
        let keep: BTreeSet<usize> = self.component_of(self.base).into_iter().collect();
        let doomed: Vec<usize> = self.vertices().filter(|v| !keep.contains(v)).collect();
        for &v in &doomed {
            for d in self.out[v].clone() {
                if self.has_edge(d.edge()) {
                    self.remove_edge(d.edge()).expect("live edge");
                }
            }
        }
        for v in doomed {
            if self.target == Some(v) {
                self.target = None;
            }
            self.alive[v] = false;
        }
    }

    /// Deletes unmarked degree-one vertices until none remain. Returns the number removed.
    pub fn prune_spikes(&mut self) -> usize {
        let mut removed = 0;
        loop {
            let spike = self.vertices().find(|&v| !self.is_marked(v) && self.degree(v) == 1);
            let Some(v) = spike else { break };
            let d = self.out[v][0];
            self.remove_edge(d.edge()).expect("live edge");
            self.alive[v] = false;
            removed += 1;
        }
        removed
    }

    /// A spanning tree from the base: for each reached vertex, the dart used to enter it.
    pub fn spanning_tree(&self) -> Vec<Option<Dart>> {
        let mut parent = vec![None; self.alive.len()];
        let mut seen = vec![false; self.alive.len()];
        let mut queue = VecDeque::from([self.base]);
        seen[self.base] = true;
        while let Some(u) = queue.pop_front() {
            for &d in &self.out[u] {
                let w = self.terminus(d);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Path from the base to `v` along the spanning tree.
    pub fn tree_path(&self, parent: &[Option<Dart>], v: usize) -> GraphPath {
        let mut darts = Vec::new();
        let mut at = v;
        while let Some(d) = parent[at] {
            darts.push(d);
            at = self.origin(d);
        }
        darts.reverse();
        GraphPath { start: self.base, darts }
    }

    /// Free basis of the loop group at the base: one reduced label per non-tree edge.
    pub fn basis_loops(&self) -> Vec<GraphPath> {
        let parent = self.spanning_tree();
        let comp: BTreeSet<usize> = self.component_of(self.base).into_iter().collect();
        let tree: BTreeSet<usize> = parent.iter().flatten().map(|d| d.edge()).collect();
        let mut out = Vec::new();
        for e in self.edge_ids() {
            let (from, to) = self.edge_ends(e);
            if tree.contains(&e) || !comp.contains(&from) {
                continue;
            }
            let mut p = self.tree_path(&parent, from);
            p.darts.push(Dart::forward(e));
            p.darts.extend(self.tree_path(&parent, to).inverse(self).darts);
            out.push(p);
        }
        out
    }

    pub fn basis_words(&self) -> Vec<Word> {
        self.basis_loops().iter().map(|p| p.label(self).free_reduce(self.mode())).collect()
    }

    /// Replaces every edge by a chain of letter edges. Vertex ids are preserved.
    pub fn letter_subdivision(&self) -> Subdivision {
        let mut g = FGraph {
            alphabet: self.alphabet.clone(),
            alive: self.alive.clone(),
            out: vec![Vec::new(); self.alive.len()],
            edges: Vec::new(),
            base: self.base,
            target: self.target,
        };
        let mut chains = vec![None; self.edges.len()];
        let mut source = Vec::new();
        for e in self.edge_ids() {
            let Edge { from, to, label } = self.edge_ref(e).clone();
            let mut chain = Vec::with_capacity(label.len());
            let mut at = from;
            for (idx, &l) in label.iter().enumerate() {
                let next = if idx + 1 == label.len() { to } else { g.add_vertex() };
                let id = g.add_edge(at, next, Word::from(vec![l])).expect("letter edge");
                source.push((e, idx));
                chain.push(Dart::forward(id));
                at = next;
            }
            chains[e] = Some(chain);
        }
        Subdivision { graph: g, chains, source }
    }

    /// Follows letters of `w` from `v` in a folded letter graph.
    pub fn trace(&self, v: usize, w: &[Letter]) -> (GraphPath, usize) {
        let mut path = GraphPath::empty(v);
        let mut at = v;
        for (idx, &l) in w.iter().enumerate() {
            let next = self.out[at].iter().copied().find(|&d| {
                self.label_len(d) == 1
                    && self.first_letter(d) == l
                    && path.darts.last().map_or(true, |&p| self.may_follow(p, d))
            });
            match next {
                Some(d) => {
                    path.darts.push(d);
                    at = self.terminus(d);
                }
                None => return (path, idx),
            }
        }
        (path, w.len())
    }

    /// Based component of the fiber product with the two-state parity automaton.
    pub fn parity_double_cover(&self, p: &CoxeterPresentation) -> Result<ParityCover, GraphError> {
        if !p.all_finite_even() {
            return Err(GraphError::OddExponent);
        }
        let n = self.alive.len();
        let mut g = FGraph {
            alphabet: self.alphabet.clone(),
            alive: vec![false; 2 * n],
            out: vec![Vec::new(); 2 * n],
            edges: Vec::new(),
            base: 2 * self.base,
            target: self.target.map(|t| 2 * t),
        };
        for v in self.vertices() {
            g.alive[2 * v] = true;
            g.alive[2 * v + 1] = true;
        }
        for e in self.edge_ids() {
            let Edge { from, to, label } = self.edge_ref(e).clone();
            let flip = label.len() % 2;
            for s in 0..2 {
                g.add_edge(2 * from + s, 2 * to + (s ^ flip), label.clone()).expect("cover edge");
            }
        }
        let full_edges = g.edge_count();
        let connected = g.component_of(g.base).len() == g.vertex_count();
        g.restrict_to_base_component();
        Ok(ParityCover { graph: g, connected, full_edge_count: full_edges })
    }

    /// Reduced labels of reduced closed paths at the base with at most `max_edges` letter
    /// edges. Fails once more than `cap` paths have been explored.
    pub fn loop_language(&self, max_edges: usize, cap: usize) -> Result<BTreeSet<Word>, GraphError> {
        let sub = self.letter_subdivision();
        let g = &sub.graph;
        let mode = self.mode();
        let mut out = BTreeSet::from([Word::empty()]);
        let mut explored = 0usize;
        let mut stack: Vec<(usize, Option<Dart>, Vec<Letter>)> = vec![(g.base, None, Vec::new())];
        while let Some((at, last, label)) = stack.pop() {
            if !label.is_empty() && at == g.base {
                out.insert(Word::from(label.clone()).free_reduce(mode));
            }
            if label.len() == max_edges {
                continue;
            }
            for &d in g.out_darts(at).iter().rev() {
                if last.is_some_and(|l| !g.may_follow(l, d)) {
                    continue;
                }
                explored += 1;
                if explored > cap {
                    return Err(GraphError::CapExceeded(cap));
                }
                let mut next = label.clone();
                next.push(g.first_letter(d));
                stack.push((g.terminus(d), Some(d), next));
            }
        }
        Ok(out)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n  rankdir=LR;\n");
        for v in self.vertices() {
            let shape = if v == self.base {
                "doublecircle"
            } else if self.target == Some(v) {
                "box"
            } else {
                "circle"
            };
            let _ = writeln!(s, "  v{v} [shape={shape},label=\"{v}\"];");
        }
        for e in self.edge_ids() {
            let edge = self.edge_ref(e);
            let _ = writeln!(
                s,
                "  v{} -> v{} [label=\"{}\"];",
                edge.from,
                edge.to,
                self.alphabet.format_word(&edge.label)
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.vertices().collect(),
            base: self.base,
            target: self.target,
            edges: self
                .edge_ids()
                .map(|e| {
                    let edge = self.edge_ref(e);
                    EdgeJson {
                        id: e,
                        from: edge.from,
                        to: edge.to,
                        label: self.alphabet.format_word(&edge.label),
                    }
                })
                .collect(),
        }
    }

    pub fn from_json(json: &GraphJson, alphabet: &Alphabet) -> Result<FGraph, GraphError> {
        let vcap = json.vertices.iter().copied().max().map_or(0, |m| m + 1);
        let ecap = json.edges.iter().map(|e| e.id).max().map_or(0, |m| m + 1);
        let mut g = FGraph {
            alphabet: alphabet.clone(),
            alive: vec![false; vcap],
            out: vec![Vec::new(); vcap],
            edges: vec![None; ecap],
            base: json.base,
            target: None,
        };
        for &v in &json.vertices {
            g.alive[v] = true;
        }
        g.check_vertex(json.base)?;
        let mut sorted = json.edges.clone();
        sorted.sort_by_key(|e| e.id);
        for e in sorted {
            g.check_vertex(e.from)?;
            g.check_vertex(e.to)?;
            if g.edges[e.id].is_some() {
                return Err(GraphError::Malformed(format!("duplicate edge id {}", e.id)));
            }
            let label = alphabet.parse_word(&e.label)?;
            if label.is_empty() {
                return Err(GraphError::EmptyLabel);
            }
            if !label.is_reduced(alphabet.mode) {
                return Err(GraphError::UnreducedLabel);
            }
            g.edges[e.id] = Some(Edge { from: e.from, to: e.to, label });
            g.out[e.from].push(Dart::forward(e.id));
            g.out[e.to].push(Dart::backward(e.id));
        }
        g.set_target(json.target)?;
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<usize>,
    pub base: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<usize>,
    pub edges: Vec<EdgeJson>,
}

/// A letter graph together with the maps back to the graph it came from.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub graph: FGraph,
    /// For each original edge id, its chain of forward letter darts.
    pub chains: Vec<Option<Vec<Dart>>>,
    /// For each letter edge id, the original edge and letter offset.
    pub source: Vec<(usize, usize)>,
}

impl Subdivision {
    /// Original dart and offset (along that dart) of a letter dart.
    pub fn locate(&self, d: Dart) -> (Dart, usize) {
        let (e, offset) = self.source[d.edge()];
        let len = self.chains[e].as_ref().map_or(0, Vec::len);
        if d.is_forward() {
            (Dart::forward(e), offset)
        } else {
            (Dart::backward(e), len - 1 - offset)
        }
    }

    /// Whether `v` is an original vertex rather than an interior subdivision point.
    pub fn is_original(&self, v: usize, original: &FGraph) -> bool {
        original.has_vertex(v)
    }
}

#[derive(Debug, Clone)]
pub struct ParityCover {
    pub graph: FGraph,
    /// Whether the full fiber product is connected.
    pub connected: bool,
    /// Edge count of the full fiber product (always twice the original).
    pub full_edge_count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(xs: &[i32]) -> Word {
        Word::from_signed(xs)
    }

    fn free(n: usize) -> Alphabet {
        Alphabet::numbered(n, Mode::FreeInverse)
    }

    fn inv(n: usize) -> Alphabet {
        Alphabet::numbered(n, Mode::Involutive)
    }

    #[test]
    fn bouquet_examples() {
        let (g, dropped) = FGraph::bouquet(&[w(&[1, 2]), w(&[2, 3])], &free(3)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), g.euler_characteristic()), (1, 2, -1));
        assert!(dropped.is_empty());
        let (g, _) = FGraph::bouquet(&[], &free(3)).unwrap();
        assert_eq!(g.euler_characteristic(), 1);
        let (g, dropped) = FGraph::bouquet(&[w(&[1, -1])], &free(3)).unwrap();
        assert_eq!((g.edge_count(), dropped), (0, vec![0]));
    }

    #[test]
    fn euler_examples() {
        let mut g = FGraph::new(free(2));
        let v = g.add_vertex();
        g.add_edge(0, v, w(&[1])).unwrap();
        assert_eq!(g.euler_characteristic(), 1);
        let u = g.add_vertex();
        g.add_edge(v, u, w(&[2])).unwrap();
        g.add_edge(u, 0, w(&[1, 2])).unwrap();
        assert_eq!(g.euler_characteristic(), 0);
    }

    #[test]
    fn foldedness_examples() {
        let (g, _) = FGraph::bouquet(&[w(&[1, 2]), w(&[1, 3])], &free(3)).unwrap();
        assert!(!g.is_folded());
        let (g, _) = FGraph::bouquet(&[w(&[1])], &inv(2)).unwrap();
        assert!(g.is_folded());
        let (g, _) = FGraph::bouquet(&[w(&[1, 2, 1])], &inv(2)).unwrap();
        assert!(!g.is_folded());
        let (g, _) = FGraph::bouquet(&[w(&[1, 2, -1])], &free(2)).unwrap();
        assert!(!g.is_folded());
    }

    #[test]
    fn path_label_examples() {
        let (g, _) = FGraph::bouquet(&[w(&[1, 2])], &free(2)).unwrap();
        let p = GraphPath { start: 0, darts: vec![Dart::forward(0)] };
        assert_eq!(p.label(&g), w(&[1, 2]));
        let q = GraphPath { start: 0, darts: vec![Dart::forward(0), Dart::backward(0)] };
        assert!(!q.is_reduced(&g));
        assert!(q.label(&g).free_reduce(Mode::FreeInverse).is_empty());
    }

    fn random_graph(rng: &mut ChaCha8Rng, alphabet: &Alphabet, verts: usize, edges: usize) -> FGraph {
        let mut g = FGraph::new(alphabet.clone());
        for _ in 1..verts {
            let v = g.add_vertex();
            let u = rng.gen_range(0..v);
            g.add_edge(u, v, random_word(rng, alphabet, 1, 3)).unwrap();
        }
        for _ in 0..edges {
            let a = rng.gen_range(0..verts);
            let b = rng.gen_range(0..verts);
            g.add_edge(a, b, random_word(rng, alphabet, 1, 4)).unwrap();
        }
        g
    }

    fn random_word(rng: &mut ChaCha8Rng, alphabet: &Alphabet, lo: usize, hi: usize) -> Word {
        let len = rng.gen_range(lo..=hi);
        let mut letters: Vec<Letter> = Vec::new();
        while letters.len() < len {
            let l = Letter::new(
                rng.gen_range(0..alphabet.len()),
                alphabet.mode == Mode::Involutive || rng.gen_bool(0.5),
            );
            if letters.last().is_some_and(|&p| p == l.inverse(alphabet.mode)) {
                continue;
            }
            letters.push(l);
        }
        Word::from(letters)
    }

    #[test]
    fn folded_graphs_read_reduced_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let alphabet = free(3);
        // a folded graph: a tree-like automaton for a few letters
        let mut g = FGraph::new(alphabet.clone());
        let a = g.add_vertex();
        let b = g.add_vertex();
        g.add_edge(0, a, w(&[1])).unwrap();
        g.add_edge(a, b, w(&[2])).unwrap();
        g.add_edge(b, 0, w(&[3])).unwrap();
        g.add_edge(a, a, w(&[3, 3])).unwrap();
        g.add_edge(b, b, w(&[1, 1])).unwrap();
        assert!(g.is_folded());
        for _ in 0..1000 {
            let mut p = GraphPath::empty(0);
            let steps = rng.gen_range(1..12);
            for _ in 0..steps {
                let at = p.end(&g);
                let choices: Vec<Dart> = g
                    .out_darts(at)
                    .iter()
                    .copied()
                    .filter(|&d| p.darts.last().map_or(true, |&l| g.may_follow(l, d)))
                    .collect();
                p.darts.push(choices[rng.gen_range(0..choices.len())]);
            }
            assert!(p.is_reduced(&g));
            let label = p.label(&g);
            assert_eq!(label.free_reduce(Mode::FreeInverse), label);
        }
    }

    #[test]
    fn subdivision_examples() {
        let (g, _) = FGraph::bouquet(&[w(&[1, 2, 3])], &free(3)).unwrap();
        let sub = g.letter_subdivision();
        assert_eq!((sub.graph.vertex_count(), sub.graph.edge_count()), (3, 3));
        assert!(sub.graph.is_letter_graph());
        let again = sub.graph.letter_subdivision();
        assert_eq!(again.graph.to_json(), sub.graph.to_json());
    }

    #[test]
    fn subdivision_preserves_chi_and_reassembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let alphabet = if rng.gen_bool(0.5) { free(3) } else { inv(3) };
            let (verts, extra) = (rng.gen_range(1..5), rng.gen_range(0..4));
            let g = random_graph(&mut rng, &alphabet, verts, extra);
            let sub = g.letter_subdivision();
            let direct = sub.graph.vertex_count() as i64 - sub.graph.edge_count() as i64;
            assert_eq!(direct, g.euler_characteristic());
            for e in g.edge_ids() {
                let chain = sub.chains[e].as_ref().unwrap();
                let p = GraphPath { start: g.edge_ends(e).0, darts: chain.clone() };
                assert_eq!(&p.label(&sub.graph), g.edge_label(e));
                assert_eq!(p.end(&sub.graph), g.edge_ends(e).1);
                for (idx, &d) in chain.iter().enumerate() {
                    assert_eq!(sub.locate(d), (Dart::forward(e), idx));
                    assert_eq!(sub.locate(d.inverse()), (Dart::backward(e), chain.len() - 1 - idx));
                }
            }
        }
    }

    #[test]
    fn trace_examples() {
        let alphabet = inv(3);
        let (g, _) = FGraph::bouquet(&[w(&[1, 2, 1, 2, 1, 2, 1, 2])], &alphabet).unwrap();
        let sub = g.letter_subdivision();
        let r = w(&[1, 2, 1, 2, 1, 2, 1, 2]);
        for v in sub.graph.vertices() {
            let starts_a1 = sub.graph.out_darts(v).iter().any(|&d| sub.graph.first_letter(d) == Letter::pos(0));
            assert!(starts_a1);
            assert_eq!(sub.graph.trace(v, &r).1, 8);
            assert_eq!(sub.graph.trace(v, &[Letter::pos(2)]).1, 0);
        }
        let (g, _) = FGraph::bouquet(&[w(&[1, -2]), w(&[3, 3])], &free(3)).unwrap();
        let sub = g.letter_subdivision();
        assert!(sub.graph.is_folded());
        assert_eq!(sub.graph.trace(0, &w(&[1, -2])).1, 2);
        assert_eq!(sub.graph.trace(0, &w(&[3, 3])).1, 2);
    }

    #[test]
    fn parity_cover_examples() {
        let p = CoxeterPresentation::uniform(3, 8);
        let (g, _) = FGraph::bouquet(&[w(&[1])], &inv(3)).unwrap();
        let c = g.parity_double_cover(&p).unwrap();
        assert!(c.connected);
        assert_eq!((c.graph.vertex_count(), c.graph.edge_count()), (2, 2));
        assert_eq!(c.graph.basis_words().len(), 1);
        let (g, _) = FGraph::bouquet(&[w(&[1, 2])], &inv(3)).unwrap();
        let c = g.parity_double_cover(&p).unwrap();
        assert!(!c.connected);
        assert_eq!(c.full_edge_count, 2);
        assert_eq!(c.graph.edge_count(), 1);
        let (g, _) = FGraph::bouquet(&[w(&[1]), w(&[1, 2, 3]), w(&[2])], &inv(3)).unwrap();
        let c = g.parity_double_cover(&p).unwrap();
        assert_eq!(c.graph.euler_characteristic(), 2 * g.euler_characteristic());
        assert_eq!(c.graph.basis_words().len(), 5);
        assert!(g.parity_double_cover(&CoxeterPresentation::uniform(3, 7)).is_err());
    }

    #[test]
    fn parity_cover_loops_are_even_and_in_language() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = CoxeterPresentation::uniform(3, 8);
        let gens = [w(&[1, 2, 3]), w(&[2, 3])];
        let (g, _) = FGraph::bouquet(&gens, &inv(3)).unwrap();
        let cover = g.parity_double_cover(&p).unwrap().graph;
        let lang = g.loop_language(16, 1_000_000).unwrap();
        let basis = cover.basis_words();
        for _ in 0..100 {
            let mut word = Word::empty();
            for _ in 0..rng.gen_range(1..3) {
                word = word.concat(&basis[rng.gen_range(0..basis.len())]);
            }
            let word = word.free_reduce(Mode::Involutive);
            assert_eq!(word.len() % 2, 0);
            assert!(lang.contains(&word), "{word:?}");
        }
    }

    #[test]
    fn prune_examples() {
        let mut g = FGraph::new(free(2));
        let a = g.add_vertex();
        let b = g.add_vertex();
        g.add_edge(0, a, w(&[1])).unwrap();
        g.add_edge(a, b, w(&[2])).unwrap();
        assert_eq!(g.prune_spikes(), 2);
        assert_eq!(g.vertex_count(), 1);
        let (mut g, _) = FGraph::bouquet(&[w(&[1]), w(&[2])], &free(2)).unwrap();
        assert_eq!(g.prune_spikes(), 0);
        let t = g.add_vertex();
        g.add_edge(0, t, w(&[1, 2])).unwrap();
        g.set_target(Some(t)).unwrap();
        let chi = g.euler_characteristic();
        assert_eq!(g.prune_spikes(), 0);
        assert_eq!(g.euler_characteristic(), chi);
    }

    #[test]
    fn loop_language_examples() {
        let (g, _) = FGraph::bouquet(&[w(&[1])], &inv(2)).unwrap();
        let lang = g.loop_language(2, 1000).unwrap();
        assert_eq!(lang, BTreeSet::from([Word::empty(), w(&[1])]));
        let g = FGraph::new(inv(2));
        assert_eq!(g.loop_language(4, 1000).unwrap(), BTreeSet::from([Word::empty()]));
        let (g, _) = FGraph::bouquet(&[w(&[1, 2]), w(&[2, -1, 2])], &free(2)).unwrap();
        let lang = g.loop_language(6, 100_000).unwrap();
        for x in &lang {
            assert!(lang.contains(&x.invert(Mode::FreeInverse)));
        }
        assert!(g.loop_language(30, 10).is_err());
    }

    #[test]
    fn dot_and_json() {
        let g = FGraph::new(free(2));
        let dot = g.to_dot();
        assert_eq!(dot.matches("shape=").count(), 1);
        let (g, _) = FGraph::bouquet(&[w(&[1, -2])], &free(2)).unwrap();
        assert_eq!(g.to_dot(), g.clone().to_dot());
        assert!(g.to_dot().contains("label=\"a1 a2'\""));
        assert_eq!(g.to_dot().matches("->").count(), 1);
        let json = g.to_json();
        let back = FGraph::from_json(&json, g.alphabet()).unwrap();
        assert_eq!(back, g);
        let text = serde_json::to_string(&json).unwrap();
        assert!(!text.contains("target"));
    }

    #[test]
    fn split_dart_both_orientations() {
        let (mut g, _) = FGraph::bouquet(&[w(&[1, 2, 3])], &free(3)).unwrap();
        let (d1, d2) = g.split_dart(Dart::backward(0), 1).unwrap();
        assert_eq!(g.label(d1), w(&[-3]));
        assert_eq!(g.label(d2), w(&[-2, -1]));
        assert_eq!(g.origin(d1), 0);
        assert_eq!(g.terminus(d2), 0);
        assert!(g.split_dart(d1, 1).is_err());
    }

    proptest! {
        #[test]
        fn inverse_labels_are_formal_inverses(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let alphabet = if seed % 2 == 0 { free(3) } else { inv(3) };
            let g = random_graph(&mut rng, &alphabet, 3, 3);
            for e in g.edge_ids() {
                let f = g.label(Dart::forward(e));
                let b = g.label(Dart::backward(e));
                prop_assert_eq!(b, f.invert(alphabet.mode));
            }
        }
    }
}
