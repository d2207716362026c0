//! Labelled-graph data model shared by every other module: construction,
//! degeneracy machinery, exact property oracles, random generators and
//! edge-list IO.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Vertex identifier, always in `1..=n`.
pub type VertexId = u32;

/// Simple undirected graph on vertex IDs `1..=n`.
///
/// No self-loops, no duplicate edges. Values are immutable once built;
/// the mutating [`LabelledGraph::add_edge`] exists for constructors and
/// generators.
#[derive(Clone, PartialEq, Eq)]
pub struct LabelledGraph {
    n: usize,
    m: usize,
    adj: Vec<BTreeSet<VertexId>>,
}

impl fmt::Debug for LabelledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabelledGraph(n={}, edges={:?})", self.n, self.edges().collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    VertexOutOfRange { v: VertexId, n: usize },
    SelfLoop { v: VertexId },
    DuplicateEdge { u: VertexId, v: VertexId },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutOfRange { v, n } => {
                write!(f, "vertex {v} out of range 1..={n}")
            }
            GraphError::SelfLoop { v } => write!(f, "self-loop at vertex {v}"),
            GraphError::DuplicateEdge { u, v } => write!(f, "duplicate edge {{{u},{v}}}"),
        }
    }
}

impl std::error::Error for GraphError {}

impl LabelledGraph {
    /// Empty graph on `n` vertices. Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a labelled graph needs at least one vertex");
        LabelledGraph { n, m: 0, adj: vec![BTreeSet::new(); n] }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut g = LabelledGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v >= 1 && (v as usize) <= self.n
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if !self.contains_vertex(u) {
            return Err(GraphError::VertexOutOfRange { v: u, n: self.n });
        }
        if !self.contains_vertex(v) {
            return Err(GraphError::VertexOutOfRange { v, n: self.n });
        }
        if u == v {
            return Err(GraphError::SelfLoop { v });
        }
        if self.has_edge(u, v) {
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            return Err(GraphError::DuplicateEdge { u, v });
        }
        self.adj[(u - 1) as usize].insert(v);
        self.adj[(v - 1) as usize].insert(u);
        self.m += 1;
        Ok(())
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.contains_vertex(u) && self.contains_vertex(v) && self.adj[(u - 1) as usize].contains(&v)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[(v - 1) as usize].len()
    }

    /// The set `N(v)` of IDs adjacent to `v`.
    pub fn neighborhood(&self, v: VertexId) -> &BTreeSet<VertexId> {
        &self.adj[(v - 1) as usize]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        1..=(self.n as VertexId)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.adj[(u - 1) as usize]
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn path(n: usize) -> Self {
        let mut g = LabelledGraph::new(n);
        for i in 1..n as VertexId {
            g.add_edge(i, i + 1).unwrap();
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        let mut g = LabelledGraph::path(n);
        g.add_edge(1, n as VertexId).unwrap();
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = LabelledGraph::new(n);
        for u in 1..=n as VertexId {
            for v in (u + 1)..=n as VertexId {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    /// Star with center 1 and leaves `2..=n`.
    pub fn star(n: usize) -> Self {
        let mut g = LabelledGraph::new(n);
        for v in 2..=n as VertexId {
            g.add_edge(1, v).unwrap();
        }
        g
    }

    /// Per-vertex adjacency bitsets (`words[w] >> b` holds vertex `64w + b + 1`).
    fn bitset_rows(&self) -> Vec<Vec<u64>> {
        let words = self.n.div_ceil(64);
        let mut rows = vec![vec![0u64; words]; self.n];
        for (u, v) in self.edges() {
            let (ui, vi) = ((u - 1) as usize, (v - 1) as usize);
            rows[ui][vi / 64] |= 1 << (vi % 64);
            rows[vi][ui / 64] |= 1 << (ui % 64);
        }
        rows
    }
}

/// Permutation `r_1..r_n` claimed to witness degeneracy at most `k`:
/// each `r_i` has at most `k` neighbors among `r_1..r_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrder {
    pub order: Vec<VertexId>,
    pub k: usize,
}

impl EliminationOrder {
    /// Recounts the left-degrees directly against `g`.
    pub fn validates(&self, g: &LabelledGraph) -> bool {
        if self.order.len() != g.n() {
            return false;
        }
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        for &r in &self.order {
            if !g.contains_vertex(r) || seen.contains(&r) {
                return false;
            }
            let left = g.neighborhood(r).iter().filter(|w| seen.contains(w)).count();
            if left > self.k {
                return false;
            }
            seen.insert(r);
        }
        true
    }
}

/// Witness that `degeneracy(g) <= k`, or `None` if there is none.
///
/// Deterministic: at every step the lowest remaining ID of current degree
/// at most `k` is removed; the order is returned with the last-removed
/// vertex first, so left-degrees are bounded by `k`.
pub fn degeneracy_order(g: &LabelledGraph, k: usize) -> Option<EliminationOrder> {
    let n = g.n();
    let mut deg: Vec<usize> = vec![0; n + 1];
    let mut alive = vec![true; n + 1];
    let mut ready: BTreeSet<VertexId> = BTreeSet::new();
    for v in g.vertices() {
        deg[v as usize] = g.degree(v);
        if deg[v as usize] <= k {
            ready.insert(v);
        }
    }
    let mut removal: Vec<VertexId> = Vec::with_capacity(n);
    while removal.len() < n {
        let x = *ready.first()?;
        ready.remove(&x);
        alive[x as usize] = false;
        removal.push(x);
        for &w in g.neighborhood(x) {
            if alive[w as usize] {
                deg[w as usize] -= 1;
                if deg[w as usize] <= k {
                    ready.insert(w);
                }
            }
        }
    }
    removal.reverse();
    Some(EliminationOrder { order: removal, k })
}

/// Smallest `k` admitting an elimination order: peel a minimum-degree
/// vertex (lowest ID on ties) and record the largest degree seen.
pub fn degeneracy(g: &LabelledGraph) -> usize {
    let n = g.n();
    let mut deg: Vec<usize> = vec![0; n + 1];
    let mut alive = vec![true; n + 1];
    for v in g.vertices() {
        deg[v as usize] = g.degree(v);
    }
    let mut best = 0;
    for _ in 0..n {
        let x = g
            .vertices()
            .filter(|&v| alive[v as usize])
            .min_by_key(|&v| (deg[v as usize], v))
            .unwrap();
        best = best.max(deg[x as usize]);
        alive[x as usize] = false;
        for &w in g.neighborhood(x) {
            if alive[w as usize] {
                deg[w as usize] -= 1;
            }
        }
    }
    best
}

/// True iff `g` contains a 4-cycle as a (not necessarily induced) subgraph,
/// i.e. two vertices share at least two common neighbors.
pub fn has_square(g: &LabelledGraph) -> bool {
    let rows = g.bitset_rows();
    for u in 0..g.n() {
        for v in (u + 1)..g.n() {
            let common: u32 = rows[u].iter().zip(&rows[v]).map(|(a, b)| (a & b).count_ones()).sum();
            if common >= 2 {
                return true;
            }
        }
    }
    false
}

/// True iff `g` contains a triangle: an edge whose endpoints share a neighbor.
pub fn has_triangle(g: &LabelledGraph) -> bool {
    let rows = g.bitset_rows();
    for (u, v) in g.edges() {
        let (ui, vi) = ((u - 1) as usize, (v - 1) as usize);
        if rows[ui].iter().zip(&rows[vi]).any(|(a, b)| a & b != 0) {
            return true;
        }
    }
    false
}

/// Graph diameter; `Infinite` orders above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Diameter {
    Finite(u32),
    Infinite,
}

impl Diameter {
    pub fn at_most(self, d: u32) -> bool {
        matches!(self, Diameter::Finite(x) if x <= d)
    }
}

impl fmt::Display for Diameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diameter::Finite(d) => write!(f, "{d}"),
            Diameter::Infinite => write!(f, "infinite"),
        }
    }
}

/// Maximum shortest-path distance, by BFS from every vertex;
/// `Infinite` when `g` is disconnected.
pub fn diameter(g: &LabelledGraph) -> Diameter {
    let n = g.n();
    let mut best = 0u32;
    let mut dist = vec![u32::MAX; n + 1];
    let mut queue = std::collections::VecDeque::new();
    for s in g.vertices() {
        dist[1..=n].fill(u32::MAX);
        dist[s as usize] = 0;
        queue.clear();
        queue.push_back(s);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &w in g.neighborhood(x) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[x as usize] + 1;
                    best = best.max(dist[w as usize]);
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached < n {
            return Diameter::Infinite;
        }
    }
    Diameter::Finite(best)
}

/// Random graph of degeneracy at most `k`: vertices are inserted in a
/// shuffled order, each picking at most `k` random earlier vertices as
/// neighbors. Deterministic per seed.
pub fn gen_k_degenerate(n: usize, k: usize, seed: u64) -> LabelledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<VertexId> = (1..=n as VertexId).collect();
    order.shuffle(&mut rng);
    let mut g = LabelledGraph::new(n);
    for i in 1..n {
        let cap = k.min(i);
        let cnt = rng.random_range(0..=cap);
        for j in rand::seq::index::sample(&mut rng, i, cnt) {
            g.add_edge(order[i], order[j]).unwrap();
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Malformed { line: usize, reason: String },
    IdOutOfRange { line: usize, id: u64, n: usize },
    DuplicateEdge { line: usize, u: VertexId, v: VertexId },
    SelfLoop { line: usize, id: VertexId },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Malformed { line, reason } => write!(f, "line {line}: {reason}"),
            ParseError::IdOutOfRange { line, id, n } => {
                write!(f, "line {line}: vertex {id} out of range 1..={n}")
            }
            ParseError::DuplicateEdge { line, u, v } => {
                write!(f, "line {line}: duplicate edge {{{u},{v}}}")
            }
            ParseError::SelfLoop { line, id } => write!(f, "line {line}: self-loop at vertex {id}"),
        }
    }
}

impl std::error::Error for ParseError {}

/// Parses the edge-list format: first line `n <count>`, then one `u v`
/// per non-empty line with `u < v`, ASCII decimal, single space.
pub fn parse_edge_list(text: &str) -> Result<LabelledGraph, ParseError> {
    let mut lines = text.lines().enumerate();
    let (line0, header) = lines
        .next()
        .ok_or_else(|| ParseError::Malformed { line: 1, reason: "empty input".into() })?;
    let n: usize = match header.strip_prefix("n ") {
        Some(rest) if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) => {
            rest.parse().map_err(|_| ParseError::Malformed {
                line: line0 + 1,
                reason: format!("bad vertex count `{rest}`"),
            })?
        }
        _ => {
            return Err(ParseError::Malformed {
                line: line0 + 1,
                reason: format!("expected header `n <count>`, got `{header}`"),
            })
        }
    };
    if n == 0 {
        return Err(ParseError::Malformed { line: line0 + 1, reason: "vertex count must be positive".into() });
    }
    let mut g = LabelledGraph::new(n);
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.is_empty() {
            continue;
        }
        let mut split = raw.split(' ');
        let (a, b) = match (split.next(), split.next(), split.next()) {
            (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => (a, b),
            _ => {
                return Err(ParseError::Malformed {
                    line,
                    reason: format!("expected `u v`, got `{raw}`"),
                })
            }
        };
        let parse_id = |tok: &str| -> Result<u64, ParseError> {
            if !tok.bytes().all(|c| c.is_ascii_digit()) {
                return Err(ParseError::Malformed { line, reason: format!("bad vertex id `{tok}`") });
            }
            tok.parse().map_err(|_| ParseError::Malformed { line, reason: format!("bad vertex id `{tok}`") })
        };
        let (u, v) = (parse_id(a)?, parse_id(b)?);
        for id in [u, v] {
            if id == 0 || id > n as u64 {
                return Err(ParseError::IdOutOfRange { line, id, n });
            }
        }
        let (u, v) = (u as VertexId, v as VertexId);
        if u == v {
            return Err(ParseError::SelfLoop { line, id: u });
        }
        if u > v {
            return Err(ParseError::Malformed { line, reason: format!("endpoints not increasing in `{raw}`") });
        }
        match g.add_edge(u, v) {
            Ok(()) => {}
            Err(GraphError::DuplicateEdge { u, v }) => {
                return Err(ParseError::DuplicateEdge { line, u, v })
            }
            Err(e) => unreachable!("unexpected edge error after validation: {e}"),
        }
    }
    Ok(g)
}

/// Inverse of [`parse_edge_list`]: edges in lexicographic order, `\n` endings.
pub fn write_edge_list(g: &LabelledGraph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// The graph on `n` vertices whose edge set is selected by `mask`, bits in
/// lexicographic pair order (1,2),(1,3),..,(1,n),(2,3),..
pub fn graph_from_edge_mask(n: usize, mask: u64) -> LabelledGraph {
    let mut g = LabelledGraph::new(n);
    let mut bit = 0;
    for u in 1..=n as VertexId {
        for v in (u + 1)..=n as VertexId {
            if mask >> bit & 1 == 1 {
                g.add_edge(u, v).unwrap();
            }
            bit += 1;
        }
    }
    g
}

/// All `2^(n(n-1)/2)` labelled graphs on `n` vertices. Only sane for small `n`.
pub fn all_graphs(n: usize) -> impl Iterator<Item = LabelledGraph> {
    let bits = n * (n - 1) / 2;
    assert!(bits <= 30, "enumeration of {n}-vertex graphs is infeasible");
    (0..1u64 << bits).map(move |mask| graph_from_edge_mask(n, mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// All-pairs shortest paths by Floyd-Warshall, as an independent check
    /// against the BFS-based diameter.
    fn diameter_floyd_warshall(g: &LabelledGraph) -> Diameter {
        let n = g.n();
        const INF: u64 = u64::MAX / 4;
        let mut d = vec![vec![INF; n]; n];
        for i in 0..n {
            d[i][i] = 0;
        }
        for (u, v) in g.edges() {
            d[(u - 1) as usize][(v - 1) as usize] = 1;
            d[(v - 1) as usize][(u - 1) as usize] = 1;
        }
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][m] + d[m][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        let mut best = 0;
        for i in 0..n {
            for j in 0..n {
                if d[i][j] >= INF {
                    return Diameter::Infinite;
                }
                best = best.max(d[i][j]);
            }
        }
        Diameter::Finite(best as u32)
    }

    /// Quadruple-loop square detector, cross-checking the bitset version.
    fn has_square_naive(g: &LabelledGraph) -> bool {
        let n = g.n() as VertexId;
        for a in 1..=n {
            for b in 1..=n {
                for c in 1..=n {
                    for d in 1..=n {
                        let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                        if distinct
                            && g.has_edge(a, b)
                            && g.has_edge(b, c)
                            && g.has_edge(c, d)
                            && g.has_edge(d, a)
                        {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn is_forest(g: &LabelledGraph) -> bool {
        // union-find cycle check
        let mut parent: Vec<usize> = (0..=g.n()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                parent[x] = find(parent, parent[x]);
            }
            parent[x]
        }
        for (u, v) in g.edges() {
            let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
            if ru == rv {
                return false;
            }
            parent[ru] = rv;
        }
        true
    }

    #[test]
    fn degeneracy_order_examples() {
        let path = LabelledGraph::path(3);
        let ord = degeneracy_order(&path, 1).expect("paths are 1-degenerate");
        assert!(ord.validates(&path));

        let k4 = LabelledGraph::complete(4);
        assert!(degeneracy_order(&k4, 2).is_none());
        let ord = degeneracy_order(&k4, 3).expect("K4 is 3-degenerate");
        assert!(ord.validates(&k4));
    }

    #[test]
    fn degeneracy_order_is_deterministic() {
        let g = gen_k_degenerate(40, 3, 11);
        let a = degeneracy_order(&g, 3).unwrap();
        let b = degeneracy_order(&g, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy(&LabelledGraph::new(1)), 0);
        assert_eq!(degeneracy(&LabelledGraph::cycle(4)), 2);
        assert_eq!(degeneracy(&LabelledGraph::path(3)), 1);
        assert_eq!(degeneracy(&LabelledGraph::complete(4)), 3);
    }

    #[test]
    fn degeneracy_agrees_with_order_search() {
        for seed in 0..20 {
            let g = gen_k_degenerate(24, (seed % 4) as usize, seed);
            let d = degeneracy(&g);
            assert!(degeneracy_order(&g, d).is_some_and(|o| o.validates(&g)));
            if d > 0 {
                assert!(degeneracy_order(&g, d - 1).is_none());
            }
        }
    }

    #[test]
    fn planar_graphs_have_degeneracy_at_most_five() {
        // Icosahedron: 5-regular planar, degeneracy exactly 5.
        let ico = LabelledGraph::from_edges(
            12,
            [
                (1, 2), (1, 3), (1, 4), (1, 5), (1, 6),
                (2, 3), (3, 4), (4, 5), (5, 6), (6, 2),
                (2, 7), (2, 8), (3, 8), (3, 9), (4, 9), (4, 10), (5, 10), (5, 11), (6, 11), (6, 7),
                (7, 8), (8, 9), (9, 10), (10, 11), (11, 7),
                (12, 7), (12, 8), (12, 9), (12, 10), (12, 11),
            ],
        )
        .unwrap();
        assert_eq!(ico.edge_count(), 30);
        assert!(ico.vertices().all(|v| ico.degree(v) == 5));
        assert_eq!(degeneracy(&ico), 5);

        // Random planar triangulations: insert each vertex into a random face.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let n = 30;
            let mut g = LabelledGraph::new(n);
            g.add_edge(1, 2).unwrap();
            g.add_edge(2, 3).unwrap();
            g.add_edge(1, 3).unwrap();
            let mut faces = vec![(1u32, 2u32, 3u32)];
            for v in 4..=n as VertexId {
                let f = rng.random_range(0..faces.len());
                let (a, b, c) = faces.swap_remove(f);
                g.add_edge(v, a).unwrap();
                g.add_edge(v, b).unwrap();
                g.add_edge(v, c).unwrap();
                faces.extend([(a, b, v), (b, c, v), (a, c, v)]);
            }
            assert!(degeneracy(&g) <= 5);
        }
    }

    #[test]
    fn subgraph_oracle_examples() {
        let c4 = LabelledGraph::cycle(4);
        assert!(has_square(&c4));
        assert!(!has_triangle(&c4));
        assert_eq!(diameter(&c4), Diameter::Finite(2));

        let p3 = LabelledGraph::path(3);
        assert!(!has_square(&p3));
        assert_eq!(diameter(&p3), Diameter::Finite(2));

        assert!(has_triangle(&LabelledGraph::complete(3)));
    }

    #[test]
    fn square_oracle_matches_naive_search() {
        for n in 1..=5 {
            for g in all_graphs(n) {
                assert_eq!(has_square(&g), has_square_naive(&g), "{g:?}");
            }
        }
    }

    #[test]
    fn diameter_of_disconnected_graph_is_infinite() {
        let mut g = LabelledGraph::new(4);
        g.add_edge(1, 2).unwrap();
        g.add_edge(3, 4).unwrap();
        assert_eq!(diameter(&g), Diameter::Infinite);
        assert!(Diameter::Finite(1_000_000) < Diameter::Infinite);
        assert!(!Diameter::Infinite.at_most(3));
    }

    #[test]
    fn diameter_matches_floyd_warshall_exhaustively() {
        for n in 1..=5 {
            for g in all_graphs(n) {
                assert_eq!(diameter(&g), diameter_floyd_warshall(&g), "{g:?}");
            }
        }
    }

    #[test]
    fn diameter_matches_floyd_warshall_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in [6usize, 7, 8] {
            let bits = n * (n - 1) / 2;
            for _ in 0..1500 {
                let mask = rng.random_range(0..1u64 << bits);
                let g = graph_from_edge_mask(n, mask);
                assert_eq!(diameter(&g), diameter_floyd_warshall(&g), "{g:?}");
            }
        }
    }

    #[test]
    fn generator_respects_degeneracy_bound() {
        for k in 0..=4 {
            for seed in 0..10 {
                let g = gen_k_degenerate(50, k, seed);
                assert!(degeneracy(&g) <= k, "k={k} seed={seed}");
            }
        }
        // k=1 yields forests
        for seed in 0..10 {
            assert!(is_forest(&gen_k_degenerate(5, 1, seed)));
        }
        assert_eq!(gen_k_degenerate(1, 0, 7).edge_count(), 0);
    }

    #[test]
    fn generator_is_deterministic_per_seed() {
        assert_eq!(gen_k_degenerate(50, 3, 7), gen_k_degenerate(50, 3, 7));
        assert_ne!(gen_k_degenerate(50, 3, 7), gen_k_degenerate(50, 3, 8));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = LabelledGraph::from_edges(3, [(1, 2), (2, 3)]).unwrap();
        let text = write_edge_list(&g);
        assert_eq!(text, "n 3\n1 2\n2 3\n");
        assert_eq!(parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert!(matches!(
            parse_edge_list("n 3\n1 2 3\n"),
            Err(ParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("n 3\n1 4\n"),
            Err(ParseError::IdOutOfRange { line: 2, id: 4, n: 3 })
        ));
        assert!(matches!(
            parse_edge_list("n 3\n1 2\n1 2\n"),
            Err(ParseError::DuplicateEdge { line: 3, u: 1, v: 2 })
        ));
        assert!(matches!(
            parse_edge_list("n 3\n2 2\n"),
            Err(ParseError::SelfLoop { line: 2, id: 2 })
        ));
        assert!(matches!(parse_edge_list("n 3\n2 1\n"), Err(ParseError::Malformed { .. })));
        assert!(matches!(parse_edge_list("n 0\n"), Err(ParseError::Malformed { .. })));
        assert!(matches!(parse_edge_list("3\n"), Err(ParseError::Malformed { line: 1, .. })));
    }

    #[test]
    fn elimination_order_validation_rejects_bad_witnesses() {
        let k4 = LabelledGraph::complete(4);
        let bogus = EliminationOrder { order: vec![1, 2, 3, 4], k: 2 };
        assert!(!bogus.validates(&k4));
        let truncated = EliminationOrder { order: vec![1, 2], k: 3 };
        assert!(!truncated.validates(&k4));
    }

    proptest! {
        #[test]
        fn prop_edge_list_round_trip(n in 1usize..12, mask in 0u64..(1 << 20)) {
            let bits = n * (n - 1) / 2;
            let g = graph_from_edge_mask(n, mask & ((1u64 << bits.min(20)) - 1));
            prop_assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
        }

        #[test]
        fn prop_generator_orders_validate(n in 1usize..40, k in 0usize..4, seed: u64) {
            let g = gen_k_degenerate(n, k, seed);
            let ord = degeneracy_order(&g, k);
            prop_assert!(ord.is_some());
            prop_assert!(ord.unwrap().validates(&g));
        }
    }
}
