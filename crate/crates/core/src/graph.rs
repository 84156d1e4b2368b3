//! Simple connected graphs, oriented edges and non-backtracking paths.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default cap on the number of paths any enumeration may produce.
pub const DEFAULT_PATH_CAP: u64 = 100_000_000;

/// Minimum degree required by [`build_graph`].
pub const MIN_DEGREE: usize = 3;

#[derive(Debug)]
struct GraphData {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    edges: OrientedEdgeSet,
}

/// Immutable simple connected graph in compressed neighbour-list form.
///
/// Oriented edge ids coincide with positions in the neighbour table, so the
/// edges leaving `x` are `offsets[x]..offsets[x+1]` in ascending order of
/// their terminus. Cloning is cheap.
#[derive(Debug, Clone)]
pub struct Graph {
    inner: Arc<GraphData>,
}

/// Oriented edges `e = (o_e -> t_e)` with the reversal involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedEdgeSet {
    pub origin: Vec<usize>,
    pub terminus: Vec<usize>,
    pub reversal: Vec<usize>,
}

impl OrientedEdgeSet {
    pub fn len(&self) -> usize {
        self.origin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origin.is_empty()
    }
}

/// Build a graph requiring every degree to be at least 3.
pub fn build_graph(edges: &[(usize, usize)], n: usize) -> Result<Graph> {
    build_graph_with_degree_bounds(edges, n, MIN_DEGREE, usize::MAX)
}

/// Build a graph with explicit degree bounds.
///
/// Lower bounds below 3 are allowed for auxiliary structures such as
/// truncated trees; every other invariant is still enforced.
pub fn build_graph_with_degree_bounds(
    edges: &[(usize, usize)],
    n: usize,
    min_degree: usize,
    max_degree: usize,
) -> Result<Graph> {
    if edges.is_empty() || n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        for w in [u, v] {
            if w >= n {
                return Err(Error::VertexOutOfRange { vertex: w, n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop { vertex: u });
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    for (x, list) in adj.iter_mut().enumerate() {
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::MultiEdge {
                u: x.min(w[0]),
                v: x.max(w[0]),
            });
        }
    }
    for (x, list) in adj.iter().enumerate() {
        if list.len() < min_degree || list.len() > max_degree {
            return Err(Error::DegreeOutOfRange {
                vertex: x,
                degree: list.len(),
                min: min_degree,
                max: max_degree,
            });
        }
    }
    let components = count_components(&adj);
    if components != 1 {
        return Err(Error::DisconnectedGraph { components });
    }
    Ok(Graph::from_sorted_adjacency(adj))
}

fn count_components(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut comps = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        comps += 1;
        seen[s] = true;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    comps
}

impl Graph {
    fn from_sorted_adjacency(adj: Vec<Vec<usize>>) -> Graph {
        let n = adj.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for list in &adj {
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        let b = targets.len();
        let mut origin = vec![0; b];
        for x in 0..n {
            for e in offsets[x]..offsets[x + 1] {
                origin[e] = x;
            }
        }
        let mut reversal = vec![0; b];
        for e in 0..b {
            let (u, v) = (origin[e], targets[e]);
            let pos = adj[v].binary_search(&u).expect("symmetric adjacency");
            reversal[e] = offsets[v] + pos;
        }
        let edges = OrientedEdgeSet {
            origin,
            terminus: targets.clone(),
            reversal,
        };
        Graph {
            inner: Arc::new(GraphData {
                offsets,
                targets,
                edges,
            }),
        }
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.inner.offsets.len() - 1
    }

    /// Number of oriented edges (twice the number of undirected edges).
    pub fn num_oriented_edges(&self) -> usize {
        self.inner.targets.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_oriented_edges() / 2
    }

    pub fn degree(&self, x: usize) -> usize {
        self.inner.offsets[x + 1] - self.inner.offsets[x]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|x| self.degree(x)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|x| self.degree(x)).max().unwrap_or(0)
    }

    /// Sorted neighbours of `x`.
    pub fn neighbors(&self, x: usize) -> &[usize] {
        let o = &self.inner.offsets;
        &self.inner.targets[o[x]..o[x + 1]]
    }

    /// Range of oriented edge ids leaving `x`.
    pub fn out_edges(&self, x: usize) -> std::ops::Range<usize> {
        self.inner.offsets[x]..self.inner.offsets[x + 1]
    }

    pub fn edges(&self) -> &OrientedEdgeSet {
        &self.inner.edges
    }

    #[inline]
    pub fn origin(&self, e: usize) -> usize {
        self.inner.edges.origin[e]
    }

    #[inline]
    pub fn terminus(&self, e: usize) -> usize {
        self.inner.targets[e]
    }

    #[inline]
    pub fn reverse(&self, e: usize) -> usize {
        self.inner.edges.reversal[e]
    }

    /// Oriented edge id of `(u -> v)`, if adjacent.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.neighbors(u)
            .binary_search(&v)
            .ok()
            .map(|p| self.inner.offsets[u] + p)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_id(u, v).is_some()
    }

    /// Undirected edges `(u, v)` with `u < v`, sorted.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for u in 0..self.n() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Deterministic content hash.
    pub fn content_hash(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.inner.offsets.hash(&mut h);
        self.inner.targets.hash(&mut h);
        h.finish()
    }

    /// Emit the text format: `N M` then one `u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n(), self.num_edges());
        for (u, v) in self.edge_list() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Parse the text format, with the standard degree bounds.
    pub fn from_text(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let (n, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        build_graph(&edges, n)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse(format!("short line '{line}'")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("'{line}': {e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse(format!("trailing tokens in '{line}'")));
    }
    Ok((a, b))
}

/// The oriented edges of `g`.
pub fn oriented_edges(g: &Graph) -> OrientedEdgeSet {
    g.edges().clone()
}

/// Non-backtracking successors of `e`: edges `(t_e -> u)` with `u != o_e`.
pub fn nb_successors(g: &Graph, e: usize) -> Vec<usize> {
    let back = g.reverse(e);
    g.out_edges(g.terminus(e)).filter(|&f| f != back).collect()
}

/// A non-backtracking path `(x_0, ..., x_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NbPath {
    pub vertices: Vec<usize>,
}

impl NbPath {
    pub fn new(vertices: Vec<usize>) -> Self {
        NbPath { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn reversed(&self) -> NbPath {
        let mut v = self.vertices.clone();
        v.reverse();
        NbPath { vertices: v }
    }

    /// True when consecutive vertices are adjacent and no step backtracks.
    pub fn is_valid(&self, g: &Graph) -> bool {
        is_nb_path(g, &self.vertices)
    }
}

pub fn is_nb_path(g: &Graph, v: &[usize]) -> bool {
    if v.is_empty() || v.iter().any(|&x| x >= g.n()) {
        return false;
    }
    v.windows(2).all(|w| g.has_edge(w[0], w[1])) && v.windows(3).all(|w| w[0] != w[2])
}

/// Exact `|B_k|`, saturating.
pub fn count_nb_paths(g: &Graph, k: usize) -> u128 {
    if k == 0 {
        return g.n() as u128;
    }
    // walks[e] = number of nb paths with k' edges starting with edge e
    let b = g.num_oriented_edges();
    let mut walks = vec![1u128; b];
    for _ in 1..k {
        let mut next = vec![0u128; b];
        for (e, slot) in next.iter_mut().enumerate() {
            let back = g.reverse(e);
            let mut s = 0u128;
            for f in g.out_edges(g.terminus(e)) {
                if f != back {
                    s = s.saturating_add(walks[f]);
                }
            }
            *slot = s;
        }
        walks = next;
    }
    walks.iter().fold(0u128, |a, &w| a.saturating_add(w))
}

fn check_budget(g: &Graph, k: usize, cap: u64) -> Result<u128> {
    let count = count_nb_paths(g, k);
    if count > cap as u128 {
        return Err(Error::PathBudgetExceeded { k, count, cap });
    }
    Ok(count)
}

/// Streaming enumeration of `B_k` in lexicographic order.
pub fn enumerate_nb_paths(g: &Graph, k: usize) -> Result<NbPathIter> {
    enumerate_nb_paths_capped(g, k, DEFAULT_PATH_CAP)
}

pub fn enumerate_nb_paths_capped(g: &Graph, k: usize, cap: u64) -> Result<NbPathIter> {
    check_budget(g, k, cap)?;
    Ok(NbPathIter::new(g.clone(), k))
}

/// Lexicographic depth-first iterator over `B_k`.
pub struct NbPathIter {
    g: Graph,
    k: usize,
    path: Vec<usize>,
    // cursor[i] is the next neighbour position to try when choosing depth i+1
    cursor: Vec<usize>,
    next_start: usize,
}

impl NbPathIter {
    fn new(g: Graph, k: usize) -> Self {
        NbPathIter {
            g,
            k,
            path: Vec::with_capacity(k + 1),
            cursor: Vec::with_capacity(k + 1),
            next_start: 0,
        }
    }

    fn advance(&mut self) -> bool {
        loop {
            if self.path.is_empty() {
                if self.next_start >= self.g.n() {
                    return false;
                }
                self.path.push(self.next_start);
                self.cursor.push(0);
                self.next_start += 1;
            }
            let d = self.path.len();
            if d == self.k + 1 {
                return true;
            }
            let last = self.path[d - 1];
            let prev = if d >= 2 { Some(self.path[d - 2]) } else { None };
            let nb = self.g.neighbors(last);
            let mut p = self.cursor[d - 1];
            while p < nb.len() && Some(nb[p]) == prev {
                p += 1;
            }
            if p < nb.len() {
                self.cursor[d - 1] = p + 1;
                self.path.push(nb[p]);
                self.cursor.push(0);
            } else {
                self.path.pop();
                self.cursor.pop();
            }
        }
    }
}

impl Iterator for NbPathIter {
    type Item = NbPath;

    fn next(&mut self) -> Option<NbPath> {
        if self.path.len() == self.k + 1 {
            self.path.pop();
            self.cursor.pop();
        }
        if self.advance() {
            Some(NbPath::new(self.path.clone()))
        } else {
            None
        }
    }
}

/// Visit every path of `B_k` in lexicographic order without allocating.
pub fn for_each_nb_path<F: FnMut(&[usize])>(g: &Graph, k: usize, mut f: F) {
    fn rec<F: FnMut(&[usize])>(g: &Graph, k: usize, path: &mut Vec<usize>, f: &mut F) {
        if path.len() == k + 1 {
            f(path);
            return;
        }
        let last = *path.last().unwrap();
        let prev = if path.len() >= 2 { Some(path[path.len() - 2]) } else { None };
        for &y in g.neighbors(last) {
            if Some(y) != prev {
                path.push(y);
                rec(g, k, path, f);
                path.pop();
            }
        }
    }
    let mut path = Vec::with_capacity(k + 1);
    for x in 0..g.n() {
        path.push(x);
        rec(g, k, &mut path, &mut f);
        path.pop();
    }
}

/// Materialised `B_k` with lookup from vertex sequence to index.
#[derive(Debug, Clone)]
pub struct PathSet {
    k: usize,
    flat: Vec<usize>,
    index: HashMap<Vec<usize>, usize>,
}

impl PathSet {
    pub fn new(g: &Graph, k: usize) -> Result<PathSet> {
        Self::with_cap(g, k, DEFAULT_PATH_CAP)
    }

    pub fn with_cap(g: &Graph, k: usize, cap: u64) -> Result<PathSet> {
        let count = check_budget(g, k, cap)? as usize;
        let mut flat = Vec::with_capacity(count * (k + 1));
        let mut index = HashMap::with_capacity(count);
        let mut i = 0;
        for_each_nb_path(g, k, |p| {
            flat.extend_from_slice(p);
            index.insert(p.to_vec(), i);
            i += 1;
        });
        Ok(PathSet { k, flat, index })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.flat.len() / (self.k + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn path(&self, i: usize) -> &[usize] {
        &self.flat[i * (self.k + 1)..(i + 1) * (self.k + 1)]
    }

    pub fn index_of(&self, p: &[usize]) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.flat.chunks_exact(self.k + 1)
    }
}

/// Largest `r` such that the subgraph induced on the closed ball of radius
/// `r` about `x` is acyclic.
pub fn injectivity_radius(g: &Graph, x: usize) -> usize {
    injectivity_radius_capped(g, x, usize::MAX)
}

/// Same as [`injectivity_radius`] but stops searching at `cap`.
pub fn injectivity_radius_capped(g: &Graph, x: usize, cap: usize) -> usize {
    let n = g.n();
    let mut dist = vec![usize::MAX; n];
    dist[x] = 0;
    let mut frontier = vec![x];
    let mut ball_vertices = 1usize;
    let mut ball_edges = 0usize;
    let mut r = 0usize;
    loop {
        if r >= cap {
            return r;
        }
        let mut next = Vec::new();
        for &y in &frontier {
            for &z in g.neighbors(y) {
                if dist[z] == usize::MAX {
                    dist[z] = r + 1;
                    next.push(z);
                }
            }
        }
        if next.is_empty() {
            // ball is the whole component: acyclic for all larger radii
            return r;
        }
        // edges of the induced ball gained at radius r+1: any edge with an endpoint in `next`
        for &z in &next {
            for &w in g.neighbors(z) {
                if dist[w] <= r + 1 && (dist[w] <= r || w < z) {
                    ball_edges += 1;
                }
            }
        }
        ball_vertices += next.len();
        if ball_edges + 1 != ball_vertices {
            return r;
        }
        r += 1;
        frontier = next;
    }
}
