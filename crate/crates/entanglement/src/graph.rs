//! Immutable graph values plus the handful of structural operations the rest
//! of the crate leans on: connected components, strongly connected
//! condensation, edge overlay, and a line-oriented text format whose rendering
//! is canonical (sorted edge list, bit-exact round trips).
//!
//! Vertices are `0..n`. Simple graphs reject loops and parallel edges;
//! multigraphs (produced by the reduction calculus in `strategies`) carry an
//! explicit flag and keep edge multiplicities.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop {0}-{0} in a graph not declared multigraph")]
    UndeclaredLoop(usize),
    #[error("parallel edge {0}-{1} in a graph not declared multigraph")]
    UndeclaredParallel(usize, usize),
    #[error("operation requires an undirected graph")]
    DirectedUnsupported,
    #[error("operation requires a directed graph")]
    UndirectedUnsupported,
    #[error("graphs disagree on {0}")]
    Mismatch(&'static str),
    #[error("overlay of an empty graph list")]
    EmptyOverlay,
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Edge list graph. `edges` holds endpoints as given for directed graphs and
/// as `(min, max)` for undirected ones; order within the vector is canonical
/// (sorted) after construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    directed: bool,
    multigraph: bool,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
    /// Populated for directed graphs only: reverse adjacency.
    #[serde(skip)]
    radj: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.directed == other.directed
            && self.multigraph == other.multigraph
            && self.edges == other.edges
    }
}
impl Eq for Graph {}

impl Graph {
    pub fn new(
        n: usize,
        directed: bool,
        multigraph: bool,
        raw_edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for (u, v) in raw_edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if u == v && !multigraph {
                return Err(GraphError::UndeclaredLoop(u));
            }
            let e = if directed || u <= v { (u, v) } else { (v, u) };
            edges.push(e);
        }
        edges.sort_unstable();
        if !multigraph {
            if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::UndeclaredParallel(w[0].0, w[0].1));
            }
        }
        let mut g = Graph { n, directed, multigraph, edges, adj: Vec::new(), radj: Vec::new() };
        g.build_adj();
        Ok(g)
    }

    pub fn simple(n: usize, directed: bool, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        Self::new(n, directed, false, edges)
    }

    fn build_adj(&mut self) {
        self.adj = vec![Vec::new(); self.n];
        self.radj = if self.directed { vec![Vec::new(); self.n] } else { Vec::new() };
        for &(u, v) in &self.edges {
            if self.directed {
                self.adj[u].push(v);
                self.radj[v].push(u);
            } else {
                self.adj[u].push(v);
                if u != v {
                    self.adj[v].push(u);
                }
            }
        }
        for list in self.adj.iter_mut().chain(self.radj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn directed(&self) -> bool {
        self.directed
    }
    pub fn multigraph(&self) -> bool {
        self.multigraph
    }
    /// Edge multiset in canonical order. Undirected endpoints satisfy u <= v.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Successor set for directed graphs, neighbor set otherwise. Loops put
    /// the vertex in its own list; parallel edges contribute one entry.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Predecessor set; directed graphs only.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        debug_assert!(self.directed);
        &self.radj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if self.directed {
            self.adj[u].binary_search(&v).is_ok()
        } else {
            let (a, b) = if u <= v { (u, v) } else { (v, u) };
            self.edges.binary_search(&(a, b)).is_ok() || (self.multigraph && self.adj[a].contains(&b))
        }
    }

    /// Degree with loops counting twice (undirected convention).
    pub fn degree(&self, v: usize) -> usize {
        debug_assert!(!self.directed);
        self.edges
            .iter()
            .map(|&(a, b)| match (a == v, b == v) {
                (true, true) => 2,
                (true, false) | (false, true) => 1,
                _ => 0,
            })
            .sum()
    }

    pub fn min_degree(&self) -> usize {
        debug_assert!(!self.directed);
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Induced subgraph on `keep` (sorted, deduped internally). Returns the
    /// subgraph over compacted indices plus the map back to source vertices.
    pub fn induced(&self, keep: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
        let keep: BTreeSet<usize> = keep.iter().copied().collect();
        for &v in &keep {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        let map: Vec<usize> = keep.iter().copied().collect();
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in map.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| keep.contains(&u) && keep.contains(&v))
            .map(|&(u, v)| (index[u], index[v]));
        let g = Graph::new(map.len(), self.directed, self.multigraph, edges)?;
        Ok((g, map))
    }
}

/// Partition of `0..ground` into disjoint, jointly exhaustive blocks. Blocks
/// are sorted internally and ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub ground: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(ground: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b.first().copied().unwrap_or(usize::MAX));
        let p = Partition { ground, blocks };
        debug_assert!(p.is_valid());
        p
    }

    fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.ground];
        for b in &self.blocks {
            for &v in b {
                if v >= self.ground || seen[v] {
                    return false;
                }
                seen[v] = true;
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Index of the block containing `v`.
    pub fn block_of(&self, v: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&v).is_ok())
            .expect("vertex in ground set")
    }
}

/// Connected components of an undirected graph, ordered by smallest vertex.
pub fn components(g: &Graph) -> Result<Partition, GraphError> {
    if g.directed() {
        return Err(GraphError::DirectedUnsupported);
    }
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        comp[s] = id;
        stack.push(s);
        let mut block = vec![s];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    block.push(w);
                    stack.push(w);
                }
            }
        }
        blocks.push(block);
    }
    Ok(Partition::new(n, blocks))
}

/// Largest component size of the subgraph induced on `keep`; 0 when empty.
pub fn largest_component_on(g: &Graph, keep: &[usize]) -> usize {
    if keep.is_empty() {
        return 0;
    }
    let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut best = 0;
    let mut stack = Vec::new();
    for &s in &keep_set {
        if seen.contains(&s) {
            continue;
        }
        let mut size = 0;
        stack.push(s);
        seen.insert(s);
        while let Some(u) = stack.pop() {
            size += 1;
            for &w in g.neighbors(u) {
                if keep_set.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Strongly connected components plus the acyclic condensation digraph.
/// Blocks are ordered by smallest vertex; condensation vertex `i` is block
/// `i`. Sink components are those with condensation out-degree zero.
pub fn scc_condensation(g: &Graph) -> Result<(Partition, Graph), GraphError> {
    if !g.directed() {
        return Err(GraphError::UndirectedUnsupported);
    }
    let n = g.n();
    // Kosaraju: iterative finish-order pass on g, then collection on the
    // transpose in reverse finish order.
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for s in 0..n {
        if visited[s] {
            continue;
        }
        // Stack of (vertex, next neighbor index).
        let mut stack = vec![(s, 0usize)];
        visited[s] = true;
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if let Some(&w) = g.neighbors(u).get(*i) {
                *i += 1;
                if !visited[w] {
                    visited[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(u);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        comp[s] = id;
        let mut block = vec![s];
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in g.in_neighbors(u) {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    block.push(w);
                    stack.push(w);
                }
            }
        }
        blocks.push(block);
    }
    let partition = Partition::new(n, blocks);
    // Renumber so condensation vertices follow partition block order.
    let mut renumber = vec![0usize; partition.blocks.len()];
    for (new_id, block) in partition.blocks.iter().enumerate() {
        renumber[comp[block[0]]] = new_id;
    }
    let mut cedges = BTreeSet::new();
    for &(u, v) in g.edges() {
        let (cu, cv) = (renumber[comp[u]], renumber[comp[v]]);
        if cu != cv {
            cedges.insert((cu, cv));
        }
    }
    let cond = Graph::new(partition.blocks.len(), true, false, cedges)?;
    Ok((partition, cond))
}

/// Block indices with condensation out-degree zero.
pub fn sink_components(condensation: &Graph) -> Vec<usize> {
    (0..condensation.n()).filter(|&b| condensation.neighbors(b).is_empty()).collect()
}

/// Union of edge sets over a shared vertex set. All inputs must agree on n
/// and directedness. If every input is simple the result is simple
/// (duplicates collapse); otherwise multiplicities add up.
pub fn overlay<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> Result<Graph, GraphError> {
    let graphs: Vec<&Graph> = graphs.into_iter().collect();
    let first = *graphs.first().ok_or(GraphError::EmptyOverlay)?;
    let mut edges = Vec::new();
    let mut multigraph = false;
    for g in &graphs {
        if g.n() != first.n() {
            return Err(GraphError::Mismatch("vertex count"));
        }
        if g.directed() != first.directed() {
            return Err(GraphError::Mismatch("directedness"));
        }
        multigraph |= g.multigraph();
        edges.extend_from_slice(g.edges());
    }
    if !multigraph {
        edges.sort_unstable();
        edges.dedup();
    }
    Graph::new(first.n(), first.directed(), multigraph, edges)
}

/// Renders the canonical text form:
/// header `<undirected|directed> <n> <m> [multigraph]`, then one `u v` line
/// per edge in sorted order, trailing newline included.
pub fn render_graph(g: &Graph) -> String {
    let mut out = String::new();
    let kind = if g.directed() { "directed" } else { "undirected" };
    let _ = write!(out, "{} {} {}", kind, g.n(), g.edge_count());
    if g.multigraph() {
        out.push_str(" multigraph");
    }
    out.push('\n');
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u, v);
    }
    out
}

/// Parses the text form accepted by [`render_graph`]. Lines starting with
/// `#` are comments; blank lines are rejected inside the edge block.
pub fn parse_graph(input: &str) -> Result<Graph, GraphError> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| GraphError::Parse { line: 0, reason: "empty input".into() })?;
    let mut parts = header.split_whitespace();
    let directed = match parts.next() {
        Some("undirected") => false,
        Some("directed") => true,
        other => {
            return Err(GraphError::Parse {
                line: hline,
                reason: format!("expected 'undirected' or 'directed', got {:?}", other.unwrap_or("")),
            })
        }
    };
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| GraphError::Parse { line: hline, reason: "bad vertex count".into() })?;
    let m: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| GraphError::Parse { line: hline, reason: "bad edge count".into() })?;
    let multigraph = match parts.next() {
        None => false,
        Some("multigraph") => true,
        Some(tok) => {
            return Err(GraphError::Parse { line: hline, reason: format!("unexpected token {tok:?}") })
        }
    };
    if parts.next().is_some() {
        return Err(GraphError::Parse { line: hline, reason: "trailing tokens in header".into() });
    }
    let mut edges = Vec::with_capacity(m);
    for (lno, line) in lines {
        if line.is_empty() {
            return Err(GraphError::Parse { line: lno, reason: "blank line".into() });
        }
        let mut it = line.split_whitespace();
        let u: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::Parse { line: lno, reason: "bad endpoint".into() })?;
        let v: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::Parse { line: lno, reason: "bad endpoint".into() })?;
        if it.next().is_some() {
            return Err(GraphError::Parse { line: lno, reason: "trailing tokens".into() });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: 0,
            reason: format!("header declares {} edges, found {}", m, edges.len()),
        });
    }
    Graph::new(n, directed, multigraph, edges)
}

// Convenience constructors used across the crate and its tests.

pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::simple(n, false, edges).expect("complete graph is simple")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let edges = (0..n).map(|u| (u, (u + 1) % n));
    Graph::simple(n, false, edges).expect("cycle is simple")
}

pub fn path(n: usize) -> Graph {
    let edges = (1..n).map(|u| (u - 1, u));
    Graph::simple(n, false, edges).expect("path is simple")
}

/// Disjoint union: vertices of `b` are shifted past those of `a`.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Result<Graph, GraphError> {
    if a.directed() != b.directed() {
        return Err(GraphError::Mismatch("directedness"));
    }
    let shift = a.n();
    let edges = a
        .edges()
        .iter()
        .copied()
        .chain(b.edges().iter().map(|&(u, v)| (u + shift, v + shift)));
    Graph::new(a.n() + b.n(), a.directed(), a.multigraph() || b.multigraph(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_and_undeclared_loops() {
        assert!(matches!(
            Graph::simple(3, false, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
        assert!(matches!(Graph::simple(3, false, [(1, 1)]), Err(GraphError::UndeclaredLoop(1))));
        assert!(matches!(
            Graph::simple(3, false, [(0, 1), (1, 0)]),
            Err(GraphError::UndeclaredParallel(..))
        ));
        assert!(Graph::new(3, false, true, [(1, 1), (0, 1), (1, 0)]).is_ok());
    }

    #[test]
    fn neighbors_are_sorted_sets() {
        let g = Graph::new(4, false, true, [(0, 2), (0, 1), (0, 2), (3, 3)]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.neighbors(3), &[3]);
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.degree(3), 2);
    }

    #[test]
    fn components_of_c6_minus_antipodal_pair() {
        let g = cycle(6);
        let (sub, map) = g.induced(&[1, 2, 4, 5]).unwrap();
        let p = components(&sub).unwrap();
        assert_eq!(p.blocks.len(), 2);
        assert_eq!(p.max_block_size(), 2);
        let blocks_src: Vec<Vec<usize>> = p
            .blocks
            .iter()
            .map(|b| b.iter().map(|&v| map[v]).collect())
            .collect();
        assert_eq!(blocks_src, vec![vec![1, 2], vec![4, 5]]);
    }

    #[test]
    fn components_rejects_directed() {
        let g = Graph::simple(2, true, [(0, 1)]).unwrap();
        assert_eq!(components(&g).unwrap_err(), GraphError::DirectedUnsupported);
    }

    #[test]
    fn scc_of_directed_triangle_plus_tail() {
        // 0 -> 1 -> 2 -> 0 cycle, 2 -> 3 tail: two components, {3} is the sink.
        let g = Graph::simple(4, true, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let (p, cond) = scc_condensation(&g).unwrap();
        assert_eq!(p.blocks, vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(cond.edges(), &[(0, 1)]);
        assert_eq!(sink_components(&cond), vec![1]);
    }

    #[test]
    fn scc_of_dag_is_identity() {
        let g = Graph::simple(3, true, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let (p, cond) = scc_condensation(&g).unwrap();
        assert_eq!(p.blocks.len(), 3);
        assert_eq!(cond.edge_count(), 3);
        assert_eq!(sink_components(&cond), vec![2]);
    }

    #[test]
    fn overlay_collapses_duplicates_for_simple_inputs() {
        let a = Graph::simple(4, false, [(0, 1), (1, 2)]).unwrap();
        let b = Graph::simple(4, false, [(1, 2), (2, 3)]).unwrap();
        let u = overlay([&a, &b]).unwrap();
        assert_eq!(u.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert!(!u.multigraph());
        // Commutative.
        assert_eq!(u, overlay([&b, &a]).unwrap());
    }

    #[test]
    fn overlay_mismatch_errors() {
        let a = Graph::simple(3, false, [(0, 1)]).unwrap();
        let b = Graph::simple(4, false, [(0, 1)]).unwrap();
        assert!(matches!(overlay([&a, &b]), Err(GraphError::Mismatch("vertex count"))));
        let c = Graph::simple(3, true, [(0, 1)]).unwrap();
        assert!(matches!(overlay([&a, &c]), Err(GraphError::Mismatch("directedness"))));
    }

    #[test]
    fn render_parse_round_trip_is_bit_exact() {
        let g = Graph::new(5, false, true, [(3, 1), (0, 0), (1, 3), (2, 4)]).unwrap();
        let text = render_graph(&g);
        assert_eq!(text, "undirected 5 4 multigraph\n0 0\n1 3\n1 3\n2 4\n");
        let h = parse_graph(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(render_graph(&h), text);
    }

    #[test]
    fn parse_skips_comments_and_validates() {
        let text = "# a comment\nundirected 3 1\n# another\n0 2\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.edges(), &[(0, 2)]);
        assert!(parse_graph("undirected 3 2\n0 1\n").is_err());
        assert!(parse_graph("undirected 2 1\n0 0\n").is_err());
        assert!(parse_graph("mixed 3 0\n").is_err());
    }

    #[test]
    fn induced_maps_back_to_source() {
        let g = complete(5);
        let (sub, map) = g.induced(&[4, 0, 2]).unwrap();
        assert_eq!(map, vec![0, 2, 4]);
        assert_eq!(sub.edge_count(), 3);
    }
}
