//! Canonical codes for rooted graphs by colour refinement and individualization.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, RootedGraph};

pub const CANON_CAP: usize = 32;

/// Byte string identifying a rooted graph up to root-preserving isomorphism.
///
/// Layout: `n`, `k`, the canonical position of each root label, then the
/// upper triangle of the canonical adjacency matrix packed into bits.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalCode(pub Vec<u8>);

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

impl CanonicalCode {
    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<CanonicalCode> {
        if !s.len().is_multiple_of(2) {
            return None;
        }
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16).ok())
            .collect::<Option<Vec<u8>>>()
            .map(CanonicalCode)
    }

    /// Rebuilds the canonical representative.
    pub fn decode(&self) -> RootedGraph {
        let n = self.0[0] as usize;
        let k = self.0[1] as usize;
        let roots: Vec<usize> = self.0[2..2 + k].iter().map(|&b| b as usize).collect();
        let bits = &self.0[2 + k..];
        let mut edges = Vec::new();
        let mut idx = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits[idx / 8] >> (idx % 8) & 1 == 1 {
                    edges.push((u, v));
                }
                idx += 1;
            }
        }
        RootedGraph::new(Graph::new(n, &edges).expect("decoded graph"), &roots).expect("decoded roots")
    }

    pub fn vertex_count(&self) -> usize {
        self.0[0] as usize
    }
}

type Partition = Vec<Vec<usize>>;

struct Canon<'a> {
    n: usize,
    adj: &'a [Vec<bool>],
    nbrs: Vec<Vec<usize>>,
    roots: &'a [usize],
    best: Option<(Vec<u8>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
}

impl<'a> Canon<'a> {
    fn refine(&self, mut part: Partition) -> Partition {
        loop {
            let mut cell_of = vec![0usize; self.n];
            for (c, cell) in part.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = c;
                }
            }
            let ncells = part.len();
            let mut next: Partition = Vec::with_capacity(ncells);
            for cell in &part {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<usize>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut counts = vec![0usize; ncells];
                        for &w in &self.nbrs[v] {
                            counts[cell_of[w]] += 1;
                        }
                        (counts, v)
                    })
                    .collect();
                keyed.sort();
                let mut i = 0;
                while i < keyed.len() {
                    let mut j = i;
                    let mut sub = Vec::new();
                    while j < keyed.len() && keyed[j].0 == keyed[i].0 {
                        sub.push(keyed[j].1);
                        j += 1;
                    }
                    next.push(sub);
                    i = j;
                }
            }
            if next.len() == part.len() {
                return next;
            }
            part = next;
        }
    }

    fn code_of(&self, order: &[usize]) -> Vec<u8> {
        // order[i] = original vertex placed at canonical position i
        let mut pos = vec![0usize; self.n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut code = Vec::with_capacity(2 + self.roots.len() + self.n * self.n / 16 + 1);
        code.push(self.n as u8);
        code.push(self.roots.len() as u8);
        for &r in self.roots {
            code.push(pos[r] as u8);
        }
        let mut byte = 0u8;
        let mut bit = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.adj[order[i]][order[j]] {
                    byte |= 1 << bit;
                }
                bit += 1;
                if bit == 8 {
                    code.push(byte);
                    byte = 0;
                    bit = 0;
                }
            }
        }
        if bit > 0 {
            code.push(byte);
        }
        code
    }

    fn search(&mut self, part: Partition, prefix: &mut Vec<usize>) {
        let part = self.refine(part);
        let Some(target) = part.iter().position(|c| c.len() > 1) else {
            let order: Vec<usize> = part.iter().map(|c| c[0]).collect();
            let code = self.code_of(&order);
            match &self.best {
                None => self.best = Some((code, order)),
                Some((bc, border)) => {
                    if code == *bc {
                        // border[i] and order[i] play the same role: record the automorphism
                        let mut perm = vec![0usize; self.n];
                        for i in 0..self.n {
                            perm[border[i]] = order[i];
                        }
                        self.autos.push(perm);
                    } else if code < *bc {
                        self.best = Some((code, order));
                    }
                }
            }
            return;
        };
        let cell = part[target].clone();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if !tried.is_empty() && self.in_orbit_of(v, &tried, prefix) {
                continue;
            }
            tried.push(v);
            let mut child = part.clone();
            let rest: Vec<usize> = cell.iter().copied().filter(|&w| w != v).collect();
            child.splice(target..=target, [vec![v], rest]);
            prefix.push(v);
            self.search(child, prefix);
            prefix.pop();
        }
    }

    /// Whether `v` shares an orbit with a tried vertex under the recorded
    /// automorphisms that fix the prefix pointwise.
    fn in_orbit_of(&self, v: usize, tried: &[usize], prefix: &[usize]) -> bool {
        let gens: Vec<&Vec<usize>> = self.autos.iter().filter(|p| prefix.iter().all(|&x| p[x] == x)).collect();
        if gens.is_empty() {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for g in gens {
            for x in 0..self.n {
                let (a, b) = (find(&mut parent, x), find(&mut parent, g[x]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&t| find(&mut parent, t) == rv)
    }
}

/// Canonical code and the canonical order (canonical position -> vertex).
pub fn canonical_form(rg: &RootedGraph) -> Result<(CanonicalCode, Vec<usize>)> {
    let g = &rg.graph;
    let n = g.n();
    if n > CANON_CAP {
        return Err(Error::SearchCapExceeded(format!("canonical form on {n} > {CANON_CAP} vertices")));
    }
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    // root vertices start in cells keyed by the labels they carry
    let mut keyed: Vec<(Vec<usize>, usize, usize)> = (0..n)
        .map(|v| {
            let labels: Vec<usize> = rg.roots().iter().enumerate().filter(|(_, &r)| r == v).map(|(i, _)| i).collect();
            // rootless vertices sort after every rooted one
            let key = if labels.is_empty() { vec![usize::MAX] } else { labels };
            (key, g.degree(v), v)
        })
        .collect();
    keyed.sort();
    let mut part: Partition = Vec::new();
    for (i, item) in keyed.iter().enumerate() {
        if i > 0 && keyed[i - 1].0 == item.0 && keyed[i - 1].1 == item.1 {
            part.last_mut().unwrap().push(item.2);
        } else {
            part.push(vec![item.2]);
        }
    }
    if n == 0 {
        return Ok((CanonicalCode(vec![0, rg.k() as u8]), Vec::new()));
    }
    let mut c = Canon { n, adj: &adj, nbrs, roots: rg.roots(), best: None, autos: Vec::new() };
    c.search(part, &mut Vec::new());
    let (code, order) = c.best.unwrap();
    Ok((CanonicalCode(code), order))
}

pub fn canonical_code(rg: &RootedGraph) -> Result<CanonicalCode> {
    canonical_form(rg).map(|(c, _)| c)
}

/// Code of an unrooted graph.
pub fn graph_code(g: &Graph) -> Result<CanonicalCode> {
    canonical_code(&RootedGraph::new(g.clone(), &[]).expect("no roots"))
}

pub fn isomorphic(g1: &Graph, g2: &Graph) -> Result<bool> {
    if g1.n() != g2.n() || g1.m() != g2.m() {
        return Ok(false);
    }
    let mut d1: Vec<usize> = (0..g1.n()).map(|v| g1.degree(v)).collect();
    let mut d2: Vec<usize> = (0..g2.n()).map(|v| g2.degree(v)).collect();
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        return Ok(false);
    }
    Ok(graph_code(g1)? == graph_code(g2)?)
}
