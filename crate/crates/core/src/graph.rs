//! Simple undirected graphs, blocks, separations and vertex-disjoint flows.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph on vertices `0..n`.
///
/// Adjacency lists are kept sorted. Labels are provenance only and never
/// influence an algorithm.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    labels: BTreeMap<usize, String>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::IndexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(Error::IndexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj, labels: BTreeMap::new() })
    }

    pub fn empty(n: usize) -> Graph {
        Graph { adj: vec![Vec::new(); n], labels: BTreeMap::new() }
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).expect("complete graph")
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).expect("path graph")
    }

    pub fn cycle(n: usize) -> Graph {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Graph::new(n, &edges).expect("cycle graph")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn labels(&self) -> &BTreeMap<usize, String> {
        &self.labels
    }

    pub fn set_label(&mut self, v: usize, name: impl Into<String>) {
        assert!(v < self.n(), "label on missing vertex");
        self.labels.insert(v, name.into());
    }

    pub fn vertex_by_label(&self, name: &str) -> Option<usize> {
        self.labels.iter().find(|(_, l)| l.as_str() == name).map(|(&v, _)| v)
    }

    /// Adjacency bitmask of `v`; only valid when `n <= 64`.
    pub fn adj_mask(&self, v: usize) -> u64 {
        self.adj[v].iter().fold(0u64, |m, &w| m | (1u64 << w))
    }

    pub fn adj_masks(&self) -> Vec<u64> {
        (0..self.n()).map(|v| self.adj_mask(v)).collect()
    }

    /// Returns a graph with the given extra edges.
    pub fn with_edges(&self, extra: &[(usize, usize)]) -> Result<Graph> {
        let mut edges = self.edges();
        edges.extend_from_slice(extra);
        let mut g = Graph::new(self.n(), &edges)?;
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let mut edges = self.edges();
        edges.extend(other.edges().into_iter().map(|(u, v)| (u + off, v + off)));
        let mut g = Graph::new(off + other.n(), &edges).expect("union");
        g.labels = self.labels.clone();
        for (&v, l) in &other.labels {
            g.labels.insert(v + off, l.clone());
        }
        g
    }

    /// Induced subgraph on `keep`, renumbered in the given order.
    /// Returns the subgraph and the map from new to old indices.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut pos = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = pos[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        let mut g = Graph::new(keep.len(), &edges).expect("induced");
        for (i, &v) in keep.iter().enumerate() {
            if let Some(l) = self.labels.get(&v) {
                g.labels.insert(i, l.clone());
            }
        }
        (g, keep.to_vec())
    }

    /// G − v with the remaining vertices renumbered in increasing order.
    pub fn delete_vertex(&self, v: usize) -> Graph {
        let keep: Vec<usize> = (0..self.n()).filter(|&w| w != v).collect();
        self.induced(&keep).0
    }

    pub fn delete_edge(&self, u: usize, v: usize) -> Graph {
        let edges: Vec<_> = self.edges().into_iter().filter(|&e| e != (u.min(v), u.max(v))).collect();
        let mut g = Graph::new(self.n(), &edges).expect("edge deletion");
        g.labels = self.labels.clone();
        g
    }

    /// Contracts the edge `uv`; the merged vertex takes the smaller index.
    pub fn contract_edge(&self, u: usize, v: usize) -> Graph {
        let (a, b) = (u.min(v), u.max(v));
        let map = |w: usize| -> usize {
            let w = if w == b { a } else { w };
            if w > b {
                w - 1
            } else {
                w
            }
        };
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .filter_map(|(x, y)| {
                let (x, y) = (map(x), map(y));
                (x != y).then_some((x, y))
            })
            .collect();
        Graph::new(self.n() - 1, &edges).expect("contraction")
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_avoiding(&vec![false; self.n()])
    }

    /// Components of the graph with the `blocked` vertices removed.
    pub fn components_avoiding(&self, blocked: &[bool]) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = blocked.to_vec();
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// Vertices reachable from `sources` without entering `blocked`.
    pub fn reachable(&self, sources: &[usize], blocked: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if !blocked[s] && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !blocked[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Shortest path from `s` to `t` inside the allowed vertices, neighbors in index order.
    pub fn shortest_path(&self, s: usize, t: usize, allowed: &[bool]) -> Option<Vec<usize>> {
        if !allowed[s] || !allowed[t] {
            return None;
        }
        let mut prev = vec![usize::MAX; self.n()];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for &w in &self.adj[v] {
                if allowed[w] && prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        if prev[t] == usize::MAX {
            return None;
        }
        let mut path = vec![t];
        while *path.last().unwrap() != s {
            path.push(prev[*path.last().unwrap()]);
        }
        path.reverse();
        Some(path)
    }

    /// True when `set` induces a connected subgraph (the empty set is not connected).
    pub fn is_connected_set(&self, set: &[usize]) -> bool {
        if set.is_empty() {
            return false;
        }
        let mut blocked = vec![true; self.n()];
        for &v in set {
            blocked[v] = false;
        }
        let seen = self.reachable(&set[..1], &blocked);
        set.iter().all(|&v| seen[v])
    }

    pub fn blocks(&self) -> Blocks {
        blocks(self)
    }
}

/// A graph together with an unordered annotated set R.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedGraph {
    pub graph: Graph,
    annotated: Vec<usize>,
}

impl AnnotatedGraph {
    pub fn new(graph: Graph, annotated: &[usize]) -> Result<AnnotatedGraph> {
        let mut set = annotated.to_vec();
        set.sort_unstable();
        if set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::PreconditionViolated("annotated set has duplicates".into()));
        }
        if let Some(&v) = set.iter().find(|&&v| v >= graph.n()) {
            return Err(Error::IndexOutOfRange { vertex: v, n: graph.n() });
        }
        Ok(AnnotatedGraph { graph, annotated: set })
    }

    pub fn annotated(&self) -> &[usize] {
        &self.annotated
    }

    pub fn is_annotated(&self, v: usize) -> bool {
        self.annotated.binary_search(&v).is_ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.graph.n()];
        for &v in &self.annotated {
            m[v] = true;
        }
        m
    }

    /// Deletes a non-annotated vertex, renumbering as `Graph::delete_vertex`.
    pub fn delete_vertex(&self, v: usize) -> AnnotatedGraph {
        let g = self.graph.delete_vertex(v);
        let r: Vec<usize> = self
            .annotated
            .iter()
            .filter(|&&a| a != v)
            .map(|&a| if a > v { a - 1 } else { a })
            .collect();
        AnnotatedGraph { graph: g, annotated: r }
    }
}

/// A graph with an ordered multiset of roots; position i carries label i.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootedGraph {
    pub graph: Graph,
    roots: Vec<usize>,
}

impl RootedGraph {
    pub fn new(graph: Graph, roots: &[usize]) -> Result<RootedGraph> {
        if let Some(&v) = roots.iter().find(|&&v| v >= graph.n()) {
            return Err(Error::IndexOutOfRange { vertex: v, n: graph.n() });
        }
        Ok(RootedGraph { graph, roots: roots.to_vec() })
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn k(&self) -> usize {
        self.roots.len()
    }

    /// Distinct root vertices in increasing order.
    pub fn root_set(&self) -> Vec<usize> {
        let mut s = self.roots.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub side_a: BTreeSet<usize>,
    pub side_b: BTreeSet<usize>,
}

impl Separation {
    pub fn new(a: impl IntoIterator<Item = usize>, b: impl IntoIterator<Item = usize>) -> Separation {
        Separation { side_a: a.into_iter().collect(), side_b: b.into_iter().collect() }
    }

    pub fn order(&self) -> usize {
        self.side_a.intersection(&self.side_b).count()
    }

    pub fn separator(&self) -> Vec<usize> {
        self.side_a.intersection(&self.side_b).copied().collect()
    }
}

pub fn verify_separation(g: &Graph, s: &Separation) -> bool {
    if s.side_a.iter().chain(&s.side_b).any(|&v| v >= g.n()) {
        return false;
    }
    if (0..g.n()).any(|v| !s.side_a.contains(&v) && !s.side_b.contains(&v)) {
        return false;
    }
    g.edges().into_iter().all(|(u, v)| {
        (s.side_a.contains(&u) && s.side_a.contains(&v)) || (s.side_b.contains(&u) && s.side_b.contains(&v))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// Maximal 2-connected subgraphs, bridges and isolated vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blocks {
    pub blocks: Vec<Block>,
    pub bridges: Vec<(usize, usize)>,
    pub isolated: Vec<usize>,
    pub cut_vertices: Vec<usize>,
}

/// Biconnected components by Hopcroft–Tarjan, with an explicit stack.
pub fn blocks(g: &Graph) -> Blocks {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut time = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut comps: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut out = Blocks::default();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        if g.degree(root) == 0 {
            disc[root] = time;
            time += 1;
            out.isolated.push(root);
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // frame: (vertex, parent, next neighbor index)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
            if *idx < g.degree(v) {
                let w = g.neighbors(v)[*idx];
                *idx += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        if p != root {
                            is_cut[p] = true;
                        }
                        let mut comp = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            comp.push(e);
                            if e == (p, v) {
                                break;
                            }
                        }
                        comps.push(comp);
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }

    for comp in comps {
        let mut edges: Vec<(usize, usize)> = comp.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        edges.dedup();
        if edges.len() == 1 {
            out.bridges.push(edges[0]);
        } else {
            let mut vertices: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            vertices.sort_unstable();
            vertices.dedup();
            out.blocks.push(Block { vertices, edges });
        }
    }
    out.blocks.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    out.bridges.sort_unstable();
    out.cut_vertices = (0..n).filter(|&v| is_cut[v]).collect();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MengerResult {
    /// `k` pairwise disjoint X–Y paths.
    Paths(Vec<Vec<usize>>),
    /// A separation of order < k with X ⊆ A and Y ⊆ B.
    Separation(Separation),
}

const INF: i32 = i32::MAX / 4;

/// Unit vertex-capacity flow network; vertex v splits into 2v (in) and 2v+1 (out).
struct SplitFlow {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i32>,
}

impl SplitFlow {
    fn add(&mut self, a: usize, b: usize, c: i32) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn build(g: &Graph, xs: &[usize], ys: &[usize]) -> (SplitFlow, usize, usize) {
        let n = g.n();
        let (src, snk) = (2 * n, 2 * n + 1);
        let mut f = SplitFlow { head: vec![Vec::new(); 2 * n + 2], to: Vec::new(), cap: Vec::new() };
        for v in 0..n {
            f.add(2 * v, 2 * v + 1, 1);
        }
        for (u, v) in g.edges() {
            f.add(2 * u + 1, 2 * v, INF);
            f.add(2 * v + 1, 2 * u, INF);
        }
        for &x in xs {
            f.add(src, 2 * x, INF);
        }
        for &y in ys {
            f.add(2 * y + 1, snk, INF);
        }
        (f, src, snk)
    }

    /// One BFS augmentation; neighbors explored in insertion order, which is index order.
    fn augment(&mut self, src: usize, snk: usize) -> bool {
        let mut prev = vec![usize::MAX; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        while let Some(a) = queue.pop_front() {
            if a == snk {
                break;
            }
            for &e in &self.head[a] {
                let b = self.to[e];
                if self.cap[e] > 0 && !seen[b] {
                    seen[b] = true;
                    prev[b] = e;
                    queue.push_back(b);
                }
            }
        }
        if !seen[snk] {
            return false;
        }
        let mut b = snk;
        while b != src {
            let e = prev[b];
            self.cap[e] -= 1;
            self.cap[e ^ 1] += 1;
            b = self.to[e ^ 1];
        }
        true
    }

    fn reachable(&self, src: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[src] = true;
        let mut stack = vec![src];
        while let Some(a) = stack.pop() {
            for &e in &self.head[a] {
                let b = self.to[e];
                if self.cap[e] > 0 && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }
}

/// Maximum number of pairwise vertex-disjoint X–Y paths.
pub fn max_disjoint_paths(g: &Graph, xs: &[usize], ys: &[usize]) -> usize {
    let (mut f, src, snk) = SplitFlow::build(g, xs, ys);
    let mut flow = 0;
    while f.augment(src, snk) {
        flow += 1;
    }
    flow
}

pub fn menger(g: &Graph, xs: &[usize], ys: &[usize], k: usize) -> Result<MengerResult> {
    let xset: BTreeSet<usize> = xs.iter().copied().collect();
    let yset: BTreeSet<usize> = ys.iter().copied().collect();
    if xset.len() < k || yset.len() < k {
        return Err(Error::PreconditionViolated(format!("|X| and |Y| must be at least {k}")));
    }
    if let Some(&v) = xset.iter().chain(&yset).find(|&&v| v >= g.n()) {
        return Err(Error::IndexOutOfRange { vertex: v, n: g.n() });
    }
    let xs: Vec<usize> = xset.iter().copied().collect();
    let ys: Vec<usize> = yset.iter().copied().collect();
    let (mut f, src, snk) = SplitFlow::build(g, &xs, &ys);
    let mut flow = 0;
    while flow < k && f.augment(src, snk) {
        flow += 1;
    }
    if flow >= k {
        return Ok(MengerResult::Paths(extract_paths(g, &f, &xs, &xset, &yset)));
    }
    let seen = f.reachable(src);
    let n = g.n();
    let a: Vec<usize> = (0..n).filter(|&v| seen[2 * v]).collect();
    let cut: Vec<usize> = (0..n).filter(|&v| seen[2 * v] && !seen[2 * v + 1]).collect();
    let b: Vec<usize> = (0..n).filter(|&v| !seen[2 * v]).chain(cut.iter().copied()).collect();
    Ok(MengerResult::Separation(Separation::new(a, b)))
}

fn extract_paths(g: &Graph, f: &SplitFlow, xs: &[usize], xset: &BTreeSet<usize>, yset: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    // flow on edge u_out -> v_in is the residual capacity of its reverse arc
    let n = g.n();
    let mut next = vec![usize::MAX; n];
    for u in 0..n {
        for &e in &f.head[2 * u + 1] {
            let b = f.to[e];
            if e % 2 == 0 && b < 2 * n && b.is_multiple_of(2) && f.cap[e ^ 1] > 0 {
                next[u] = b / 2;
            }
        }
    }
    let mut paths = Vec::new();
    for &x in xs {
        // x carries flow iff its internal arc is saturated
        let internal = f.head[2 * x].iter().copied().find(|&e| f.to[e] == 2 * x + 1 && e % 2 == 0).unwrap();
        if f.cap[internal] != 0 {
            continue;
        }
        let mut path = vec![x];
        let mut v = x;
        while !path_ends_here(f, v, n) {
            v = next[v];
            path.push(v);
        }
        paths.push(path);
    }
    // trim each walk to a genuine X–Y path: last X vertex to the first Y vertex after it
    let mut out = Vec::new();
    let mut covered = BTreeSet::new();
    for p in paths {
        if covered.contains(&p[0]) {
            continue;
        }
        covered.extend(p.iter().copied());
        let start = p.iter().rposition(|v| xset.contains(v)).unwrap();
        let end = start + p[start..].iter().position(|v| yset.contains(v)).unwrap();
        out.push(p[start..=end].to_vec());
    }
    out
}

fn path_ends_here(f: &SplitFlow, v: usize, n: usize) -> bool {
    let snk = 2 * n + 1;
    f.head[2 * v + 1].iter().any(|&e| f.to[e] == snk && e % 2 == 0 && f.cap[e ^ 1] > 0)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() >= 3 && parts[0] == "label" {
                let v = parts[1].parse::<usize>().map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
                labels.push((v, parts[2..].join(" ")));
            }
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse { line: lineno, msg: e.to_string() }))
            .collect::<Result<_>>()?;
        if nums.len() != 2 {
            return Err(Error::Parse { line: lineno, msg: "expected two integers".into() });
        }
        if header.is_none() {
            header = Some((nums[0], nums[1]));
        } else {
            edges.push((nums[0], nums[1]));
        }
    }
    let (n, m) = header.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
    if edges.len() != m {
        return Err(Error::Parse { line: 0, msg: format!("header announces {m} edges, found {}", edges.len()) });
    }
    let mut g = Graph::new(n, &edges)?;
    for (v, l) in labels {
        if v >= n {
            return Err(Error::IndexOutOfRange { vertex: v, n });
        }
        g.set_label(v, l);
    }
    Ok(g)
}

pub fn to_edge_list(g: &Graph) -> String {
    let mut s = String::new();
    let edges = g.edges();
    writeln!(s, "{} {}", g.n(), edges.len()).unwrap();
    for (v, l) in g.labels() {
        writeln!(s, "# label {v} {l}").unwrap();
    }
    for (u, v) in edges {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

pub fn to_dot(g: &Graph, name: &str) -> String {
    let mut s = String::new();
    writeln!(s, "graph {name} {{").unwrap();
    for v in 0..g.n() {
        match g.label(v) {
            Some(l) => writeln!(s, "  {v} [label=\"{l}\"];").unwrap(),
            None => writeln!(s, "  {v};").unwrap(),
        }
    }
    for (u, v) in g.edges() {
        writeln!(s, "  {u} -- {v};").unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Graph {
        let mut e = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let v = r * n + c;
                if c + 1 < n {
                    e.push((v, v + 1));
                }
                if r + 1 < n {
                    e.push((v, v + n));
                }
            }
        }
        Graph::new(n * n, &e).unwrap()
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(Graph::new(1, &[]).unwrap().n(), 1);
        assert_eq!(Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap().m(), 4);
        assert_eq!(Graph::new(3, &[(0, 0)]), Err(Error::SelfLoop(0)));
        assert!(matches!(Graph::new(3, &[(0, 3)]), Err(Error::IndexOutOfRange { .. })));
        assert_eq!(Graph::new(2, &[(0, 1), (1, 0)]).unwrap().m(), 1);
    }

    #[test]
    fn blocks_small() {
        let tri = Graph::complete(3);
        let b = blocks(&tri);
        assert_eq!((b.blocks.len(), b.bridges.len()), (1, 0));
        let two = Graph::new(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]).unwrap();
        let b = blocks(&two);
        assert_eq!((b.blocks.len(), b.bridges.len()), (2, 1));
        assert_eq!(b.cut_vertices, vec![2, 3]);
        let total: usize = b.blocks.iter().map(|x| x.edges.len()).sum::<usize>() + b.bridges.len();
        assert_eq!(total, two.m());
    }

    #[test]
    fn menger_examples() {
        let p = Graph::path(3);
        match menger(&p, &[0], &[2], 1).unwrap() {
            MengerResult::Paths(ps) => assert_eq!(ps, vec![vec![0, 1, 2]]),
            _ => panic!(),
        }
        assert!(menger(&p, &[0], &[2], 2).is_err());
        let p4 = Graph::new(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        match menger(&p4, &[0, 1], &[2, 3], 2).unwrap() {
            MengerResult::Separation(s) => {
                assert!(verify_separation(&p4, &s));
                assert_eq!(s.separator(), vec![1]);
            }
            _ => panic!(),
        }
        let g = grid(4);
        match menger(&g, &[0, 1, 2, 3], &[12, 13, 14, 15], 4).unwrap() {
            MengerResult::Paths(ps) => {
                assert_eq!(ps.len(), 4);
                for p in &ps {
                    assert_eq!(p.len(), 4);
                }
            }
            _ => panic!(),
        }
    }

    #[test]
    fn separation_examples() {
        let tri = Graph::complete(3);
        let s = Separation::new(0..3, 0..3);
        assert!(verify_separation(&tri, &s));
        assert_eq!(s.order(), 3);
        let e = Graph::path(2);
        assert!(!verify_separation(&e, &Separation::new([0], [1])));
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = Separation::new([0, 1], [0, 2, 3]);
        assert!(verify_separation(&star, &s));
        assert_eq!(s.order(), 1);
    }

    #[test]
    fn edge_list_round_trip() {
        let mut g = Graph::cycle(5);
        g.set_label(0, "v1");
        g.set_label(3, "u2");
        let text = to_edge_list(&g);
        assert_eq!(parse_edge_list(&text).unwrap(), g);
        assert!(to_dot(&g, "g").contains("0 -- 1"));
    }

    #[test]
    fn contraction_and_deletion() {
        let c = Graph::cycle(4);
        assert_eq!(c.contract_edge(0, 1).m(), 3);
        assert_eq!(c.delete_vertex(0).m(), 2);
        assert_eq!(c.delete_edge(0, 1).m(), 3);
    }
}
