//! Minor models and an exact search engine for plain, rooted and red minors.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, Graph, RootedGraph};

pub const DEFAULT_PATTERN_CAP: usize = 12;
const HOST_CAP: usize = 64;

/// Branch set of each pattern vertex, indexed by pattern vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    pub branch_sets: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub pattern_cap: usize,
    /// Abort with `SearchCapExceeded` after this many search nodes.
    pub node_budget: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { pattern_cap: DEFAULT_PATTERN_CAP, node_budget: None }
    }
}

pub fn verify_minor_model(host: &Graph, pattern: &Graph, m: &MinorModel) -> bool {
    if m.branch_sets.len() != pattern.n() {
        return false;
    }
    let mut owner = vec![usize::MAX; host.n()];
    for (x, set) in m.branch_sets.iter().enumerate() {
        for &v in set {
            if v >= host.n() || owner[v] != usize::MAX {
                return false;
            }
            owner[v] = x;
        }
        if !host.is_connected_set(set) {
            return false;
        }
    }
    pattern.edges().into_iter().all(|(x, y)| {
        m.branch_sets[x].iter().any(|&v| host.neighbors(v).iter().any(|&w| owner[w] == y))
    })
}

pub fn verify_rooted_model(host: &RootedGraph, pattern: &RootedGraph, m: &MinorModel) -> bool {
    host.k() == pattern.k()
        && verify_minor_model(&host.graph, &pattern.graph, m)
        && host.roots().iter().zip(pattern.roots()).all(|(&r, &q)| m.branch_sets[q].contains(&r))
}

pub fn verify_red_model(host: &AnnotatedGraph, pattern: &Graph, m: &MinorModel) -> bool {
    verify_minor_model(&host.graph, pattern, m) && m.branch_sets.iter().all(|s| s.iter().any(|&v| host.is_annotated(v)))
}

pub fn find_minor(host: &Graph, pattern: &Graph) -> Result<Option<MinorModel>> {
    find_minor_with(host, pattern, &SearchConfig::default())
}

pub fn find_minor_with(host: &Graph, pattern: &Graph, cfg: &SearchConfig) -> Result<Option<MinorModel>> {
    Engine::new(host, pattern, vec![0; pattern.n()], None, cfg)?.run()
}

pub fn find_rooted_minor(host: &RootedGraph, pattern: &RootedGraph) -> Result<Option<MinorModel>> {
    find_rooted_minor_with(host, pattern, &SearchConfig::default())
}

pub fn find_rooted_minor_with(host: &RootedGraph, pattern: &RootedGraph, cfg: &SearchConfig) -> Result<Option<MinorModel>> {
    if host.k() != pattern.k() {
        return Err(Error::RootCountMismatch { host: host.k(), pattern: pattern.k() });
    }
    check_caps(&host.graph, &pattern.graph, cfg)?;
    let mut required = vec![0u64; pattern.graph.n()];
    for (&r, &q) in host.roots().iter().zip(pattern.roots()) {
        required[q] |= 1u64 << r;
    }
    for x in 0..required.len() {
        for y in x + 1..required.len() {
            if required[x] & required[y] != 0 {
                return Ok(None);
            }
        }
    }
    Engine::new(&host.graph, &pattern.graph, required, None, cfg)?.run()
}

pub fn find_red_minor(host: &AnnotatedGraph, pattern: &Graph) -> Result<Option<MinorModel>> {
    find_red_minor_with(host, pattern, &SearchConfig::default())
}

pub fn find_red_minor_with(host: &AnnotatedGraph, pattern: &Graph, cfg: &SearchConfig) -> Result<Option<MinorModel>> {
    check_caps(&host.graph, pattern, cfg)?;
    let red = host.annotated().iter().fold(0u64, |m, &v| m | (1u64 << v));
    if pattern.n() > 0 {
        if let Some(m) = voronoi_red_model(host, pattern, red) {
            return Ok(Some(m));
        }
    }
    Engine::new(&host.graph, pattern, vec![0; pattern.n()], Some(red), cfg)?.run()
}

/// Largest k ≤ cap such that the k×k grid is a red minor.
pub fn bidim(host: &AnnotatedGraph, cap: usize) -> Result<usize> {
    let cfg = SearchConfig { pattern_cap: DEFAULT_PATTERN_CAP.max(cap * cap), node_budget: None };
    bidim_with(host, cap, &cfg)
}

pub fn bidim_with(host: &AnnotatedGraph, cap: usize, cfg: &SearchConfig) -> Result<usize> {
    if cap * cap > cfg.pattern_cap {
        return Err(Error::SearchCapExceeded(format!("bidim cap {cap} needs {} pattern vertices", cap * cap)));
    }
    let mut best = 0;
    for k in 1..=cap {
        if find_red_minor_with(host, &grid_pattern(k), cfg)?.is_some() {
            best = k;
        } else {
            break;
        }
    }
    Ok(best)
}

fn grid_pattern(k: usize) -> Graph {
    let mut e = Vec::new();
    for r in 0..k {
        for c in 0..k {
            if c + 1 < k {
                e.push((r * k + c, r * k + c + 1));
            }
            if r + 1 < k {
                e.push((r * k + c, (r + 1) * k + c));
            }
        }
    }
    Graph::new(k * k, &e).expect("grid pattern")
}

fn check_caps(host: &Graph, pattern: &Graph, cfg: &SearchConfig) -> Result<()> {
    if pattern.n() > cfg.pattern_cap {
        return Err(Error::SearchCapExceeded(format!("pattern has {} > {} vertices", pattern.n(), cfg.pattern_cap)));
    }
    if host.n() > HOST_CAP {
        return Err(Error::SearchCapExceeded(format!("host has {} > {HOST_CAP} vertices", host.n())));
    }
    Ok(())
}

#[inline]
fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Assigns every host vertex a pattern label or nothing, in BFS order from
/// the forced vertices, pruning on connectability, edge realizability and
/// the number of vertices left to start empty branch sets.
struct Engine<'a> {
    host: &'a Graph,
    adj: Vec<u64>,
    h: usize,
    pedges: Vec<(usize, usize)>,
    red: Option<u64>,
    order: Vec<usize>,
    sets: Vec<u64>,
    undecided: u64,
    /// Earlier twin label that must already be in use before this one starts.
    label_prev: Vec<Option<usize>>,
    /// Earlier host twin whose value must not exceed this vertex's value.
    host_prev: Vec<Option<usize>>,
    value: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
}

impl<'a> Engine<'a> {
    fn new(host: &'a Graph, pattern: &Graph, required: Vec<u64>, red: Option<u64>, cfg: &SearchConfig) -> Result<Engine<'a>> {
        check_caps(host, pattern, cfg)?;
        let n = host.n();
        let h = pattern.n();
        let forced = required.iter().fold(0u64, |a, &b| a | b);
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

        // BFS from forced vertices, then from the smallest unvisited vertex
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = bits(forced).collect();
        for v in bits(forced) {
            seen[v] = true;
        }
        let mut next_start = 0;
        loop {
            while let Some(v) = queue.pop_front() {
                if forced >> v & 1 == 0 {
                    order.push(v);
                }
                for &w in host.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            while next_start < n && seen[next_start] {
                next_start += 1;
            }
            if next_start == n {
                break;
            }
            seen[next_start] = true;
            queue.push_back(next_start);
        }

        let mut pos = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let is_red = |v: usize| red.is_none_or(|r| r >> v & 1 == 1);
        let mut host_prev = vec![None; n];
        for (i, &u) in order.iter().enumerate() {
            for &v in &order[i + 1..] {
                if host_prev[v].is_some() || is_red(u) != is_red(v) {
                    continue;
                }
                let (mu, mv) = (host.adj_mask(u), host.adj_mask(v));
                let false_twin = mu == mv;
                let true_twin = mu | (1 << u) == mv | (1 << v);
                if false_twin || true_twin {
                    // chain each vertex to its nearest earlier twin of the same kind
                    let earlier = order[..pos[v]].iter().rev().copied().find(|&w| {
                        let mw = host.adj_mask(w);
                        is_red(w) == is_red(v) && ((false_twin && mw == mv) || (true_twin && mw | (1 << w) == mv | (1 << v)))
                    });
                    host_prev[v] = earlier;
                }
            }
        }

        let mut label_prev = vec![None; h];
        let pm: Vec<u64> = (0..h).map(|x| pattern.adj_mask(x)).collect();
        for y in 0..h {
            if required[y] != 0 {
                continue;
            }
            for x in (0..y).rev() {
                if required[x] != 0 {
                    continue;
                }
                let false_twin = pm[x] == pm[y];
                let true_twin = pm[x] | (1 << x) == pm[y] | (1 << y);
                // within a class all members share one twin kind, so the nearest earlier member suffices
                if false_twin || true_twin {
                    label_prev[y] = Some(x);
                    break;
                }
            }
        }

        let mut value = vec![0usize; n];
        for (x, &r) in required.iter().enumerate() {
            for v in bits(r) {
                value[v] = x + 1;
            }
        }
        Ok(Engine {
            host,
            adj: host.adj_masks(),
            h,
            pedges: pattern.edges(),
            red,
            order,
            sets: required,
            undecided: all & !forced,
            label_prev,
            host_prev,
            value,
            nodes: 0,
            budget: cfg.node_budget,
        })
    }

    fn run(mut self) -> Result<Option<MinorModel>> {
        if self.h == 0 {
            return Ok(Some(MinorModel { branch_sets: Vec::new() }));
        }
        if !self.feasible() {
            return Ok(None);
        }
        if self.search(0)? {
            let branch_sets = self.sets.iter().map(|&s| bits(s).collect()).collect();
            let m = MinorModel { branch_sets };
            debug_assert!(verify_minor_model(self.host, &self.pattern_graph(), &m));
            return Ok(Some(m));
        }
        Ok(None)
    }

    fn pattern_graph(&self) -> Graph {
        Graph::new(self.h, &self.pedges).expect("pattern")
    }

    #[inline]
    fn nbr(&self, m: u64) -> u64 {
        bits(m).fold(0u64, |a, v| a | self.adj[v])
    }

    fn closure(&self, start: u64, within: u64) -> u64 {
        let mut comp = start;
        loop {
            let next = (comp | self.nbr(comp)) & within;
            if next == comp {
                return comp;
            }
            comp = next;
        }
    }

    /// Current sets already form a model; undecided vertices can be left out.
    fn complete(&self) -> bool {
        for &s in &self.sets {
            if s == 0 || self.closure(s & s.wrapping_neg(), s) != s {
                return false;
            }
            if let Some(r) = self.red {
                if s & r == 0 {
                    return false;
                }
            }
        }
        self.pedges.iter().all(|&(x, y)| self.nbr(self.sets[x]) & self.sets[y] != 0)
    }

    fn feasible(&self) -> bool {
        let u = self.undecided;
        let mut reach = [0u64; 64];
        let mut empty = 0usize;
        let mut need_red = 0usize;
        for x in 0..self.h {
            let s = self.sets[x];
            if s == 0 {
                empty += 1;
                reach[x] = u;
                if self.red.is_some() {
                    need_red += 1;
                }
                continue;
            }
            let comp = self.closure(s & s.wrapping_neg(), s | u);
            if comp & s != s {
                return false;
            }
            reach[x] = comp;
            if let Some(r) = self.red {
                if s & r == 0 {
                    if comp & u & r == 0 {
                        return false;
                    }
                    need_red += 1;
                }
            }
        }
        if empty > u.count_ones() as usize {
            return false;
        }
        if let Some(r) = self.red {
            if need_red > (u & r).count_ones() as usize {
                return false;
            }
        }
        for &(x, y) in &self.pedges {
            if self.nbr(reach[x]) & reach[y] == 0 {
                return false;
            }
        }
        true
    }

    fn search(&mut self, i: usize) -> Result<bool> {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                return Err(Error::SearchCapExceeded(format!("minor search exceeded {b} nodes")));
            }
        }
        if self.complete() {
            return Ok(true);
        }
        if i == self.order.len() {
            return Ok(false);
        }
        let v = self.order[i];
        let bit = 1u64 << v;
        let vn = self.adj[v];
        // adjacent labels first, then fresh labels, then leaving v out, then the rest
        let mut options: Vec<usize> = Vec::with_capacity(self.h + 1);
        for x in 0..self.h {
            if self.sets[x] & vn != 0 {
                options.push(x + 1);
            }
        }
        for x in 0..self.h {
            if self.sets[x] == 0 {
                options.push(x + 1);
            }
        }
        options.push(0);
        for x in 0..self.h {
            if self.sets[x] != 0 && self.sets[x] & vn == 0 {
                options.push(x + 1);
            }
        }
        self.undecided &= !bit;
        for val in options {
            if let Some(p) = self.host_prev[v] {
                if self.undecided >> p & 1 == 0 && self.value[p] > val {
                    continue;
                }
            }
            if val > 0 {
                let x = val - 1;
                if self.sets[x] == 0 {
                    if let Some(px) = self.label_prev[x] {
                        if self.sets[px] == 0 {
                            continue;
                        }
                    }
                }
                self.sets[x] |= bit;
            }
            self.value[v] = val;
            if self.feasible() && self.search(i + 1)? {
                return Ok(true);
            }
            if val > 0 {
                self.sets[val - 1] &= !bit;
            }
        }
        self.value[v] = 0;
        self.undecided |= bit;
        Ok(false)
    }
}

/// Tries nearest-seed partitions for a quick positive answer; never used to refute.
fn voronoi_red_model(host: &AnnotatedGraph, pattern: &Graph, red: u64) -> Option<MinorModel> {
    let g = &host.graph;
    let reds: Vec<usize> = bits(red).collect();
    let h = pattern.n();
    if reds.len() < h {
        return None;
    }
    let mut attempts = 0usize;
    let mut seeds: Vec<usize> = Vec::with_capacity(h);
    let mut used = vec![false; reds.len()];
    fn rec(
        g: &Graph,
        pattern: &Graph,
        host: &AnnotatedGraph,
        reds: &[usize],
        seeds: &mut Vec<usize>,
        used: &mut [bool],
        attempts: &mut usize,
    ) -> Option<MinorModel> {
        if *attempts > 4000 {
            return None;
        }
        if seeds.len() == pattern.n() {
            *attempts += 1;
            let mut owner = vec![usize::MAX; g.n()];
            let mut queue = VecDeque::new();
            for (x, &s) in seeds.iter().enumerate() {
                owner[s] = x;
                queue.push_back(s);
            }
            while let Some(v) = queue.pop_front() {
                for &w in g.neighbors(v) {
                    if owner[w] == usize::MAX {
                        owner[w] = owner[v];
                        queue.push_back(w);
                    }
                }
            }
            let mut sets = vec![Vec::new(); pattern.n()];
            for v in 0..g.n() {
                if owner[v] != usize::MAX {
                    sets[owner[v]].push(v);
                }
            }
            let m = MinorModel { branch_sets: sets };
            return verify_red_model(host, pattern, &m).then_some(m);
        }
        for i in 0..reds.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            seeds.push(reds[i]);
            let r = rec(g, pattern, host, reds, seeds, used, attempts);
            seeds.pop();
            used[i] = false;
            if r.is_some() {
                return r;
            }
        }
        None
    }
    rec(g, pattern, host, &reds, &mut seeds, &mut used, &mut attempts)
}
