//! Linkages, patterns, disjoint paths, linkage counting and vitality.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, RootedGraph};
use crate::minor::find_rooted_minor;

pub const DEFAULT_PAIR_CAP: usize = 4;
pub const DFS_NODE_BUDGET: u64 = 100_000_000;

/// Multiset of unordered terminal pairs; `{a, a}` is a single-vertex path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    pairs: Vec<(usize, usize)>,
}

impl Pattern {
    pub fn new(pairs: &[(usize, usize)]) -> Pattern {
        Pattern { pairs: pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Sorted copy, so equality is multiset equality.
    pub fn normalized(&self) -> Pattern {
        let mut pairs = self.pairs.clone();
        pairs.sort_unstable();
        Pattern { pairs }
    }

    pub fn same_multiset(&self, other: &Pattern) -> bool {
        self.normalized() == other.normalized()
    }

    pub fn terminals(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.pairs.iter().flat_map(|&(a, b)| if a == b { vec![a] } else { vec![a, b] }).collect();
        t.sort_unstable();
        t
    }

    /// No terminal is shared between two pairs.
    pub fn has_distinct_terminals(&self) -> bool {
        let t = self.terminals();
        t.windows(2).all(|w| w[0] != w[1])
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for &(a, b) in &self.pairs {
            writeln!(s, "pair {a} {b}").unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Pattern> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() || toks[0].starts_with('#') {
                continue;
            }
            if toks.len() != 3 || toks[0] != "pair" {
                return Err(Error::Parse { line: i + 1, msg: "expected `pair s t`".into() });
            }
            let p = |t: &str| t.parse::<usize>().map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() });
            pairs.push((p(toks[1])?, p(toks[2])?));
        }
        Ok(Pattern::new(&pairs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Linkage {
    pub paths: Vec<Vec<usize>>,
}

impl Linkage {
    pub fn new(paths: Vec<Vec<usize>>) -> Linkage {
        Linkage { paths }
    }

    pub fn vertex_count(&self) -> usize {
        self.paths.iter().map(Vec::len).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.paths)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Linkage> {
        serde_json::from_value::<Vec<Vec<usize>>>(v.clone())
            .map(Linkage::new)
            .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
    }
}

pub fn validate_linkage(g: &Graph, l: &Linkage) -> Result<()> {
    let mut used = vec![false; g.n()];
    for p in &l.paths {
        if p.is_empty() {
            return Err(Error::InvalidLinkage("empty path".into()));
        }
        for &v in p {
            if v >= g.n() {
                return Err(Error::InvalidLinkage(format!("vertex {v} out of range")));
            }
            if used[v] {
                return Err(Error::InvalidLinkage(format!("vertex {v} used twice")));
            }
            used[v] = true;
        }
        for w in p.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(Error::InvalidLinkage(format!("no edge {}-{}", w[0], w[1])));
            }
        }
    }
    Ok(())
}

pub fn pattern_of(g: &Graph, l: &Linkage) -> Result<Pattern> {
    validate_linkage(g, l)?;
    let pairs: Vec<(usize, usize)> = l.paths.iter().map(|p| (p[0], *p.last().unwrap())).collect();
    Ok(Pattern::new(&pairs).normalized())
}

fn check_pattern(g: &Graph, p: &Pattern) -> Result<()> {
    if let Some(&(a, b)) = p.pairs().iter().find(|&&(a, b)| a >= g.n() || b >= g.n()) {
        return Err(Error::IndexOutOfRange { vertex: a.max(b), n: g.n() });
    }
    if p.len() > DEFAULT_PAIR_CAP && g.n() > 14 {
        return Err(Error::SearchCapExceeded(format!("{} pairs on {} vertices", p.len(), g.n())));
    }
    Ok(())
}

/// The rooted-graph encoding: one isolated pattern vertex per pair, rooted twice.
pub fn rooted_encoding(g: &Graph, p: &Pattern) -> (RootedGraph, RootedGraph) {
    let mut host_roots = Vec::new();
    let mut pat_roots = Vec::new();
    for (i, &(a, b)) in p.pairs().iter().enumerate() {
        host_roots.extend([a, b]);
        pat_roots.extend([i, i]);
    }
    let host = RootedGraph::new(g.clone(), &host_roots).expect("terminals in range");
    let pat = RootedGraph::new(Graph::empty(p.len()), &pat_roots).expect("pattern roots");
    (host, pat)
}

pub fn disjoint_paths(g: &Graph, p: &Pattern) -> Result<Option<Linkage>> {
    check_pattern(g, p)?;
    if !p.has_distinct_terminals() {
        return Ok(None);
    }
    if p.len() <= 2 && g.n() <= 64 {
        disjoint_paths_via_minor(g, p)
    } else {
        disjoint_paths_dfs(g, p)
    }
}

pub fn disjoint_paths_via_minor(g: &Graph, p: &Pattern) -> Result<Option<Linkage>> {
    if !p.has_distinct_terminals() {
        return Ok(None);
    }
    let (host, pat) = rooted_encoding(g, p);
    let Some(model) = find_rooted_minor(&host, &pat)? else {
        return Ok(None);
    };
    let mut paths = Vec::with_capacity(p.len());
    for (i, &(a, b)) in p.pairs().iter().enumerate() {
        let mut allowed = vec![false; g.n()];
        for &v in &model.branch_sets[i] {
            allowed[v] = true;
        }
        paths.push(g.shortest_path(a, b, &allowed).expect("branch set is connected"));
    }
    Ok(Some(Linkage::new(paths)))
}

/// Per-pair DFS with a shared used mask. For existence only chordless
/// paths are explored, since any chord can be short-cut.
struct Dfs<'a> {
    g: &'a Graph,
    pairs: Vec<(usize, usize)>,
    terminal_of: Vec<usize>,
    used: Vec<bool>,
    paths: Vec<Vec<usize>>,
    chordless: bool,
    spanning: bool,
    limit: u64,
    count: u64,
    nodes: u64,
    budget: u64,
    tripped: bool,
    first: Option<Vec<Vec<usize>>>,
}

const NO_PAIR: usize = usize::MAX;

impl<'a> Dfs<'a> {
    fn new(g: &'a Graph, p: &Pattern, chordless: bool, spanning: bool, limit: u64, budget: u64) -> Dfs<'a> {
        let mut terminal_of = vec![NO_PAIR; g.n()];
        for (i, &(a, b)) in p.pairs().iter().enumerate() {
            terminal_of[a] = i;
            terminal_of[b] = i;
        }
        Dfs {
            g,
            pairs: p.pairs().to_vec(),
            terminal_of,
            used: vec![false; g.n()],
            paths: Vec::new(),
            chordless,
            spanning,
            limit,
            count: 0,
            nodes: 0,
            budget,
            tripped: false,
            first: None,
        }
    }

    fn done(&self) -> bool {
        self.count >= self.limit || self.tripped
    }

    /// Pairs from `from` on can still be joined, and under spanning every
    /// unused vertex still lies in a region some open path can reach.
    fn viable(&self, from: usize, head: Option<usize>) -> bool {
        let n = self.g.n();
        for j in from..self.pairs.len() {
            let (s, t) = self.pairs[j];
            let s = if j == from { head.unwrap_or(s) } else { s };
            if s == t {
                continue;
            }
            let blocked: Vec<bool> = (0..n)
                .map(|v| (self.used[v] && v != s) || (self.terminal_of[v] != NO_PAIR && self.terminal_of[v] != j))
                .collect();
            if !self.g.reachable(&[s], &blocked)[t] {
                return false;
            }
        }
        if self.spanning {
            let blocked: Vec<bool> = (0..n).map(|v| self.used[v] && Some(v) != head).collect();
            let mut starts: Vec<usize> = Vec::new();
            for j in from..self.pairs.len() {
                let (s, t) = self.pairs[j];
                starts.push(if j == from { head.unwrap_or(s) } else { s });
                starts.push(t);
            }
            let seen = self.g.reachable(&starts, &blocked);
            if (0..n).any(|v| !self.used[v] && !seen[v]) {
                return false;
            }
        }
        true
    }

    fn run(&mut self) {
        if self.viable(0, None) {
            self.next_pair(0);
        }
    }

    fn next_pair(&mut self, j: usize) {
        if self.done() {
            return;
        }
        if j == self.pairs.len() {
            if self.spanning && self.used.iter().any(|&u| !u) {
                return;
            }
            self.count += 1;
            if self.first.is_none() {
                self.first = Some(self.paths.clone());
            }
            return;
        }
        let (s, t) = self.pairs[j];
        if self.used[s] || self.used[t] {
            return;
        }
        self.used[s] = true;
        self.paths.push(vec![s]);
        if s == t {
            if self.viable(j + 1, None) {
                self.next_pair(j + 1);
            }
        } else {
            self.extend(j, s, t);
        }
        self.paths.pop();
        self.used[s] = false;
    }

    fn extend(&mut self, j: usize, v: usize, t: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.tripped = true;
            return;
        }
        for &w in self.g.neighbors(v) {
            if self.done() {
                return;
            }
            if self.used[w] || (self.terminal_of[w] != NO_PAIR && self.terminal_of[w] != j) {
                continue;
            }
            if w != t && self.terminal_of[w] == j {
                continue;
            }
            if self.chordless {
                let path = self.paths.last().unwrap();
                if path[..path.len() - 1].iter().any(|&x| self.g.has_edge(x, w)) {
                    continue;
                }
            }
            self.used[w] = true;
            self.paths.last_mut().unwrap().push(w);
            if w == t {
                if self.viable(j + 1, None) {
                    self.next_pair(j + 1);
                }
            } else if self.viable(j, Some(w)) {
                self.extend(j, w, t);
            }
            self.paths.last_mut().unwrap().pop();
            self.used[w] = false;
        }
    }
}

pub fn disjoint_paths_dfs(g: &Graph, p: &Pattern) -> Result<Option<Linkage>> {
    check_pattern(g, p)?;
    if !p.has_distinct_terminals() {
        return Ok(None);
    }
    let mut dfs = Dfs::new(g, p, true, false, 1, u64::MAX);
    dfs.run();
    Ok(dfs.first.map(Linkage::new))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountOutcome {
    pub count: u64,
    /// False when the node budget ran out before the search finished.
    pub exhaustive: bool,
    pub nodes: u64,
}

pub fn count_linkages(g: &Graph, p: &Pattern, spanning_only: bool, limit: u64) -> Result<u64> {
    let out = count_linkages_dfs(g, p, spanning_only, limit, DFS_NODE_BUDGET)?;
    if !out.exhaustive {
        return Err(Error::SearchCapExceeded(format!("linkage DFS exceeded {DFS_NODE_BUDGET} nodes")));
    }
    Ok(out.count)
}

pub fn count_linkages_dfs(g: &Graph, p: &Pattern, spanning_only: bool, limit: u64, budget: u64) -> Result<CountOutcome> {
    check_pattern(g, p)?;
    if !p.has_distinct_terminals() || limit == 0 {
        return Ok(CountOutcome { count: 0, exhaustive: true, nodes: 0 });
    }
    let mut dfs = Dfs::new(g, p, false, spanning_only, limit, budget);
    dfs.run();
    Ok(CountOutcome { count: dfs.count.min(limit), exhaustive: !dfs.tripped, nodes: dfs.nodes })
}

/// Exact linkage count by a frontier dynamic program over edges.
///
/// Vertices are introduced along an order of small vertex separation; each
/// frontier vertex carries its degree class and the far end of its path
/// fragment. Counts saturate at `limit`.
pub fn count_linkages_frontier(g: &Graph, p: &Pattern, spanning_only: bool, limit: u64) -> Result<u64> {
    if let Some(&(a, b)) = p.pairs().iter().find(|&&(a, b)| a >= g.n() || b >= g.n()) {
        return Err(Error::IndexOutOfRange { vertex: a.max(b), n: g.n() });
    }
    if !p.has_distinct_terminals() || limit == 0 {
        return Ok(0);
    }
    if p.len() > 32 {
        return Err(Error::SearchCapExceeded("more than 32 pairs".into()));
    }
    let n = g.n();
    let order = low_separation_order(g);
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let last: Vec<usize> = (0..n).map(|v| g.neighbors(v).iter().map(|&w| pos[w]).max().unwrap_or(0).max(pos[v])).collect();
    let mut pair_of = vec![NO_PAIR; n];
    let mut single = vec![false; n];
    for (i, &(a, b)) in p.pairs().iter().enumerate() {
        pair_of[a] = i;
        pair_of[b] = i;
        if a == b {
            single[a] = true;
        }
    }
    let all_done: u32 = if p.len() == 32 { u32::MAX } else { (1u32 << p.len()) - 1 };

    let mut frontier: Vec<usize> = Vec::new();
    let mut states: HashMap<FState, u64> = HashMap::new();
    states.insert(FState { slots: Vec::new(), done: 0 }, 1);

    for (i, &v) in order.iter().enumerate() {
        frontier.push(v);
        let mut next: HashMap<FState, u64> = HashMap::with_capacity(states.len() * 2);
        for (mut st, c) in states {
            st.slots.push(Slot::Free);
            *next.entry(st).or_insert(0) += c;
        }
        states = next;
        for &w in g.neighbors(v) {
            if pos[w] >= i {
                continue;
            }
            let (iv, iw) = (frontier.len() - 1, frontier.iter().position(|&x| x == w).unwrap());
            let mut next: HashMap<FState, u64> = HashMap::with_capacity(states.len() * 2);
            for (st, c) in states {
                if let Some(taken) = take_edge(&st, iv, iw, &frontier, &pair_of, &single, p) {
                    let e = next.entry(taken).or_insert(0);
                    *e = (*e + c).min(limit);
                }
                let e = next.entry(st).or_insert(0);
                *e = (*e + c).min(limit);
            }
            states = next;
        }
        // vertices whose last neighbor is now introduced leave the frontier
        let leaving: Vec<usize> = (0..frontier.len()).filter(|&k| last[frontier[k]] <= i).collect();
        for &k in leaving.iter().rev() {
            let x = frontier[k];
            let mut next: HashMap<FState, u64> = HashMap::with_capacity(states.len());
            for (mut st, c) in states {
                let ok = match st.slots[k] {
                    Slot::Free => {
                        if single[x] {
                            st.done |= 1 << pair_of[x];
                            true
                        } else {
                            pair_of[x] == NO_PAIR && !spanning_only
                        }
                    }
                    Slot::Full => true,
                    Slot::EndTo(y) => {
                        if pair_of[x] == NO_PAIR {
                            false
                        } else {
                            let ky = frontier.iter().position(|&f| f == y).unwrap();
                            st.slots[ky] = Slot::EndTerm(x);
                            true
                        }
                    }
                    Slot::EndTerm(_) => false,
                };
                if ok {
                    st.slots.remove(k);
                    let e = next.entry(st).or_insert(0);
                    *e = (*e + c).min(limit);
                }
            }
            states = next;
            frontier.remove(k);
        }
    }
    Ok(states.into_iter().filter(|(st, _)| st.done == all_done && st.slots.is_empty()).map(|(_, c)| c).sum::<u64>().min(limit))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Slot {
    /// Degree 0.
    Free,
    /// Degree 2, or a terminal whose path is complete.
    Full,
    /// Degree 1; the fragment's other end is this frontier vertex.
    EndTo(usize),
    /// Degree 1; the fragment's other end is this terminal, already forgotten.
    EndTerm(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct FState {
    slots: Vec<Slot>,
    done: u32,
}

enum End {
    Frontier(usize),
    Gone(usize),
}

fn take_edge(st: &FState, iv: usize, iw: usize, frontier: &[usize], pair_of: &[usize], single: &[bool], p: &Pattern) -> Option<FState> {
    let (v, w) = (frontier[iv], frontier[iw]);
    let allowed = |k: usize, x: usize| match st.slots[k] {
        Slot::Free => !single[x],
        Slot::EndTo(_) | Slot::EndTerm(_) => pair_of[x] == NO_PAIR,
        Slot::Full => false,
    };
    if !allowed(iv, v) || !allowed(iw, w) {
        return None;
    }
    let other = |k: usize, x: usize| -> End {
        match st.slots[k] {
            Slot::Free => End::Frontier(x),
            Slot::EndTo(y) => End::Frontier(y),
            Slot::EndTerm(t) => End::Gone(t),
            Slot::Full => unreachable!(),
        }
    };
    let (a, b) = (other(iv, v), other(iw, w));
    if let End::Frontier(av) = a {
        if av == w {
            return None;
        }
    }
    let mut out = st.clone();
    for (k, x) in [(iv, v), (iw, w)] {
        out.slots[k] = match st.slots[k] {
            Slot::Free => Slot::EndTo(usize::MAX),
            _ => Slot::Full,
        };
        let _ = x;
    }
    let vertex = |e: &End| match *e {
        End::Frontier(x) | End::Gone(x) => x,
    };
    let (ta, tb) = (vertex(&a), vertex(&b));
    let is_term = |x: usize| pair_of[x] != NO_PAIR;
    let idx = |x: usize| frontier.iter().position(|&f| f == x).unwrap();
    if is_term(ta) && is_term(tb) {
        let pa = pair_of[ta];
        if pa != pair_of[tb] || out.done >> pa & 1 == 1 {
            return None;
        }
        let (s, t) = p.pairs()[pa];
        debug_assert!((s, t) == (ta.min(tb), ta.max(tb)));
        out.done |= 1 << pa;
        for e in [&a, &b] {
            if let End::Frontier(x) = *e {
                out.slots[idx(x)] = Slot::Full;
            }
        }
        return Some(out);
    }
    match (&a, &b) {
        (End::Frontier(x), End::Frontier(y)) => {
            out.slots[idx(*x)] = Slot::EndTo(*y);
            out.slots[idx(*y)] = Slot::EndTo(*x);
        }
        (End::Frontier(x), End::Gone(t)) | (End::Gone(t), End::Frontier(x)) => {
            out.slots[idx(*x)] = Slot::EndTerm(*t);
        }
        (End::Gone(_), End::Gone(_)) => return None,
    }
    Some(out)
}

/// A vertex order with small vertex separation: the best of several BFS orders.
pub fn low_separation_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let separation = |order: &[usize]| -> usize {
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let last: Vec<usize> = (0..n).map(|v| g.neighbors(v).iter().map(|&w| pos[w]).max().unwrap_or(0).max(pos[v])).collect();
        let mut best = 0;
        let mut live = 0usize;
        let mut ends = vec![0usize; n + 1];
        for i in 0..n {
            live += 1;
            ends[last[order[i]]] += 1;
            best = best.max(live);
            live -= ends[i];
        }
        best
    };
    let mut best: Vec<usize> = (0..n).collect();
    let mut best_sep = separation(&best);
    let starts: Vec<usize> = if n <= 256 { (0..n).collect() } else { vec![0] };
    for s in starts {
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for root in std::iter::once(s).chain(0..n) {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in g.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let sep = separation(&order);
        if sep < best_sep {
            best_sep = sep;
            best = order;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VitalReport {
    pub vital: bool,
    pub spans: bool,
    /// Linkages realizing the pattern, saturated at 2.
    pub count: u64,
    /// True when the answer is exact; false only if every engine ran out of budget.
    pub proven: bool,
    pub engine: String,
    pub dfs_nodes: u64,
}

pub fn is_vital(g: &Graph, l: &Linkage) -> Result<bool> {
    let r = vital_report(g, l, DFS_NODE_BUDGET)?;
    if !r.proven {
        return Err(Error::SearchCapExceeded("vitality undecided within budget".into()));
    }
    Ok(r.vital)
}

/// Vitality check: the DFS counter first, the frontier counter if the DFS budget trips.
pub fn vital_report(g: &Graph, l: &Linkage, dfs_budget: u64) -> Result<VitalReport> {
    let pat = pattern_of(g, l)?;
    let spans = l.vertex_count() == g.n();
    if !spans {
        return Ok(VitalReport { vital: false, spans, count: 0, proven: true, engine: "span".into(), dfs_nodes: 0 });
    }
    let dfs = count_linkages_dfs_unchecked(g, &pat, 2, dfs_budget);
    if dfs.exhaustive {
        return Ok(VitalReport {
            vital: dfs.count == 1,
            spans,
            count: dfs.count,
            proven: true,
            engine: "dfs".into(),
            dfs_nodes: dfs.nodes,
        });
    }
    let count = count_linkages_frontier(g, &pat, false, 2)?;
    Ok(VitalReport { vital: count == 1, spans, count, proven: true, engine: "frontier".into(), dfs_nodes: dfs.nodes })
}

fn count_linkages_dfs_unchecked(g: &Graph, p: &Pattern, limit: u64, budget: u64) -> CountOutcome {
    if !p.has_distinct_terminals() {
        return CountOutcome { count: 0, exhaustive: true, nodes: 0 };
    }
    let mut dfs = Dfs::new(g, p, false, false, limit, budget);
    dfs.run();
    CountOutcome { count: dfs.count.min(limit), exhaustive: !dfs.tripped, nodes: dfs.nodes }
}

/// Components of the paths of `l` inside the vertex set `h` (original indices).
pub fn restrict_linkage(g: &Graph, h: &[usize], l: &Linkage) -> Result<Linkage> {
    validate_linkage(g, l)?;
    let mut inside = vec![false; g.n()];
    for &v in h {
        if v >= g.n() {
            return Err(Error::IndexOutOfRange { vertex: v, n: g.n() });
        }
        inside[v] = true;
    }
    let mut out = Vec::new();
    for p in &l.paths {
        let mut run: Vec<usize> = Vec::new();
        for &v in p {
            if inside[v] {
                run.push(v);
            } else if !run.is_empty() {
                out.push(std::mem::take(&mut run));
            }
        }
        if !run.is_empty() {
            out.push(run);
        }
    }
    Ok(Linkage::new(out))
}

/// Re-indexes a linkage along a new-to-old vertex map such as `Graph::induced` returns.
pub fn reindex_linkage(l: &Linkage, map: &[usize]) -> Linkage {
    let inv: BTreeMap<usize, usize> = map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    Linkage::new(l.paths.iter().map(|p| p.iter().map(|v| inv[v]).collect()).collect())
}

/// Deletes `v` from a vital instance: an interior vertex splits its path, a
/// single-vertex path disappears. Vertices above `v` shift down by one.
pub fn vital_after_delete(g: &Graph, l: &Linkage, v: usize) -> Result<(Graph, Vec<usize>, Linkage)> {
    validate_linkage(g, l)?;
    if v >= g.n() {
        return Err(Error::IndexOutOfRange { vertex: v, n: g.n() });
    }
    let shift = |x: usize| if x > v { x - 1 } else { x };
    let mut paths = Vec::new();
    let mut found = false;
    for p in &l.paths {
        match p.iter().position(|&x| x == v) {
            None => paths.push(p.clone()),
            Some(i) => {
                found = true;
                if p.len() == 1 {
                    continue;
                }
                if i == 0 || i + 1 == p.len() {
                    return Err(Error::TerminalEndpoint(v));
                }
                paths.push(p[..i].to_vec());
                paths.push(p[i + 1..].to_vec());
            }
        }
    }
    if !found {
        return Err(Error::PreconditionViolated(format!("vertex {v} lies on no path of the linkage")));
    }
    let paths: Vec<Vec<usize>> = paths.into_iter().map(|p| p.into_iter().map(shift).collect()).collect();
    let mut terminals: Vec<usize> = paths.iter().flat_map(|p| [p[0], *p.last().unwrap()]).collect();
    terminals.sort_unstable();
    terminals.dedup();
    Ok((g.delete_vertex(v), terminals, Linkage::new(paths)))
}
