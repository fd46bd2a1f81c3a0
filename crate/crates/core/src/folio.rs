//! Detail, d-folios and (k,d)-folios: a brute-force oracle and a
//! tree-decomposition dynamic program.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_code, CanonicalCode};
use crate::decomposition::{heuristic_decomposition, nice_form, validate_td, NodeKind, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, Graph, RootedGraph};
use crate::minor::{find_rooted_minor_with, SearchConfig};

#[derive(Clone, Debug)]
pub struct FolioConfig {
    pub host_cap: usize,
    pub root_cap: usize,
    pub detail_cap: usize,
    /// Maximum number of DP states at a single node.
    pub state_budget: usize,
    /// Maximum number of ordered root tuples in a (k,d)-folio.
    pub multiset_budget: usize,
    pub search: SearchConfig,
}

impl Default for FolioConfig {
    fn default() -> Self {
        FolioConfig {
            host_cap: 24,
            root_cap: 4,
            detail_cap: 3,
            state_budget: 2_000_000,
            multiset_budget: 4096,
            search: SearchConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    Oracle,
    Dp,
}

/// `max(|V \ set(roots)|, |E|)`.
pub fn detail(rg: &RootedGraph) -> usize {
    let extra = rg.graph.n() - rg.root_set().len();
    extra.max(rg.graph.m())
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Folio {
    pub k: usize,
    pub d: usize,
    members: BTreeSet<CanonicalCode>,
    /// Root-tuple label patterns that generated each member, for (k,d)-folios.
    tags: BTreeMap<CanonicalCode, BTreeSet<String>>,
}

impl PartialEq for Folio {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.d == other.d && self.members == other.members
    }
}

impl Eq for Folio {}

impl Folio {
    pub fn new(k: usize, d: usize) -> Folio {
        Folio { k, d, ..Default::default() }
    }

    pub fn from_codes(k: usize, d: usize, codes: impl IntoIterator<Item = CanonicalCode>) -> Folio {
        Folio { k, d, members: codes.into_iter().collect(), tags: BTreeMap::new() }
    }

    pub fn members(&self) -> &BTreeSet<CanonicalCode> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, code: &CanonicalCode) -> bool {
        self.members.contains(code)
    }

    pub fn contains_graph(&self, rg: &RootedGraph) -> Result<bool> {
        Ok(self.members.contains(&canonical_code(rg)?))
    }

    pub fn tags(&self, code: &CanonicalCode) -> Option<&BTreeSet<String>> {
        self.tags.get(code)
    }

    pub fn is_subset(&self, other: &Folio) -> bool {
        self.members.is_subset(&other.members)
    }

    fn insert_tagged(&mut self, code: CanonicalCode, tag: &str) {
        self.tags.entry(code.clone()).or_default().insert(tag.to_string());
        self.members.insert(code);
    }

    fn merge(&mut self, other: Folio) {
        self.members.extend(other.members);
        for (c, t) in other.tags {
            self.tags.entry(c).or_default().extend(t);
        }
    }

    /// JSON list ordered by code bytes.
    pub fn to_json(&self) -> serde_json::Value {
        let items: Vec<serde_json::Value> = self
            .members
            .iter()
            .map(|c| {
                let rg = c.decode();
                let mut item = serde_json::json!({
                    "code": c.to_hex(),
                    "detail": detail(&rg),
                    "edges": rg.graph.edges(),
                    "root_map": rg.roots(),
                    "vertices": rg.graph.n(),
                });
                if let Some(t) = self.tags.get(c) {
                    item["tags"] = serde_json::json!(t);
                }
                item
            })
            .collect();
        serde_json::json!({ "d": self.d, "k": self.k, "members": items })
    }
}

fn check_host(host: &RootedGraph, d: usize, cfg: &FolioConfig) -> Result<()> {
    if host.graph.n() > cfg.host_cap {
        return Err(Error::SearchCapExceeded(format!("host has {} > {} vertices", host.graph.n(), cfg.host_cap)));
    }
    if host.k() > cfg.root_cap {
        return Err(Error::SearchCapExceeded(format!("{} > {} roots", host.k(), cfg.root_cap)));
    }
    if d > cfg.detail_cap {
        return Err(Error::SearchCapExceeded(format!("detail {d} > {}", cfg.detail_cap)));
    }
    Ok(())
}

/// Label partitions coarser than "same host vertex", as restricted growth strings.
fn label_partitions(roots: &[usize]) -> Vec<Vec<usize>> {
    let k = roots.len();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(roots: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == roots.len() {
            out.push(cur.clone());
            return;
        }
        if let Some(j) = (0..i).find(|&j| roots[j] == roots[i]) {
            cur.push(cur[j]);
            rec(roots, cur, out);
            cur.pop();
            return;
        }
        let blocks = cur.iter().max().map_or(0, |m| m + 1);
        for b in 0..=blocks {
            cur.push(b);
            rec(roots, cur, out);
            cur.pop();
        }
    }
    rec(roots, &mut cur, &mut out);
    let _ = k;
    out
}

fn children_by_deletion(rg: &RootedGraph) -> Vec<RootedGraph> {
    let mut out = Vec::new();
    for (u, v) in rg.graph.edges() {
        out.push(RootedGraph::new(rg.graph.delete_edge(u, v), rg.roots()).unwrap());
    }
    let rs = rg.root_set();
    for x in (0..rg.graph.n()).filter(|x| !rs.contains(x)) {
        let roots: Vec<usize> = rg.roots().iter().map(|&r| if r > x { r - 1 } else { r }).collect();
        out.push(RootedGraph::new(rg.graph.delete_vertex(x), &roots).unwrap());
    }
    out
}

/// One-step rooted minors: edge deletion, non-root vertex deletion, edge contraction.
pub fn minor_children(rg: &RootedGraph) -> Vec<RootedGraph> {
    let mut out = children_by_deletion(rg);
    for (u, v) in rg.graph.edges() {
        // contract_edge keeps the smaller index and shifts the rest
        let roots: Vec<usize> = rg
            .roots()
            .iter()
            .map(|&r| {
                let r = if r == v { u } else { r };
                if r > v {
                    r - 1
                } else {
                    r
                }
            })
            .collect();
        out.push(RootedGraph::new(rg.graph.contract_edge(u, v), &roots).unwrap());
    }
    out
}

/// Exact d-folio by generating candidate patterns upward from members.
pub fn folio_bruteforce(host: &RootedGraph, d: usize) -> Result<Folio> {
    folio_bruteforce_with(host, d, &FolioConfig::default())
}

pub fn folio_bruteforce_with(host: &RootedGraph, d: usize, cfg: &FolioConfig) -> Result<Folio> {
    check_host(host, d, cfg)?;
    let k = host.k();
    let mut members: HashSet<CanonicalCode> = HashSet::new();
    let test = |p: &RootedGraph| -> Result<bool> { Ok(find_rooted_minor_with(host, p, &cfg.search)?.is_some()) };
    let mut frontier: Vec<RootedGraph> = Vec::new();
    for part in label_partitions(host.roots()) {
        let r = part.iter().max().map_or(0, |m| m + 1);
        let p = RootedGraph::new(Graph::empty(r), &part).unwrap();
        let code = canonical_code(&p)?;
        if !members.contains(&code) && test(&p)? {
            members.insert(code);
            frontier.push(p);
        }
    }
    // level by level, so every child of a candidate has been decided
    while !frontier.is_empty() {
        let mut candidates: BTreeMap<CanonicalCode, RootedGraph> = BTreeMap::new();
        for p in &frontier {
            let rs = p.root_set().len();
            let n = p.graph.n();
            if n - rs < d {
                let g = p.graph.disjoint_union(&Graph::empty(1));
                let q = RootedGraph::new(g, p.roots()).unwrap();
                candidates.entry(canonical_code(&q)?).or_insert(q);
            }
            if p.graph.m() < d {
                for u in 0..n {
                    for v in u + 1..n {
                        if !p.graph.has_edge(u, v) {
                            let q = RootedGraph::new(p.graph.with_edges(&[(u, v)])?, p.roots()).unwrap();
                            candidates.entry(canonical_code(&q)?).or_insert(q);
                        }
                    }
                }
            }
        }
        let mut next = Vec::new();
        for (code, q) in candidates {
            let mut closed = true;
            for c in children_by_deletion(&q) {
                if !members.contains(&canonical_code(&c)?) {
                    closed = false;
                    break;
                }
            }
            if closed && test(&q)? {
                members.insert(code);
                next.push(q);
            }
        }
        frontier = next;
    }
    Ok(Folio::from_codes(k, d, members))
}

const NONE: u8 = u8::MAX;

/// Partial branch-set signature at a bag. Active groups (pattern vertices
/// that still meet the bag) come first, then finalized groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct DpState {
    group: Vec<u8>,
    piece: Vec<u8>,
    masks: Vec<u16>,
    active: u8,
    edges: Vec<(u8, u8)>,
}

struct Raw {
    group: Vec<u8>,
    piece: Vec<u8>,
    masks: Vec<u16>,
    alive: Vec<bool>,
    edges: BTreeSet<(u8, u8)>,
}

impl Raw {
    fn from_state(s: &DpState) -> Raw {
        Raw {
            group: s.group.clone(),
            piece: s.piece.clone(),
            masks: s.masks.clone(),
            alive: (0..s.masks.len()).map(|g| g < s.active as usize).collect(),
            edges: s.edges.iter().copied().collect(),
        }
    }

    /// Finalized groups without labels: these are extra pattern vertices for good.
    fn finalized_unlabeled(&self) -> usize {
        (0..self.masks.len()).filter(|&g| !self.alive[g] && self.masks[g] == 0).count()
    }

    fn add_edge(&mut self, a: u8, b: u8) {
        self.edges.insert((a.min(b), a.max(b)));
    }

    fn canonical(&self) -> DpState {
        let ng = self.masks.len();
        let mut new_id = vec![NONE; ng];
        let mut next = 0u8;
        for &g in &self.group {
            if g != NONE && new_id[g as usize] == NONE {
                new_id[g as usize] = next;
                next += 1;
            }
        }
        let active = next;
        let mut labeled: Vec<usize> = (0..ng).filter(|&g| !self.alive[g] && self.masks[g] != 0).collect();
        labeled.sort_by_key(|&g| self.masks[g]);
        for g in labeled {
            new_id[g] = next;
            next += 1;
        }
        let anon: Vec<usize> = (0..ng).filter(|&g| !self.alive[g] && self.masks[g] == 0).collect();
        let base = next;
        let mut best: Option<(Vec<(u8, u8)>, Vec<u8>)> = None;
        for perm in permutations(anon.len()) {
            let mut ids = new_id.clone();
            for (i, &g) in anon.iter().enumerate() {
                ids[g] = base + perm[i] as u8;
            }
            let mut e: Vec<(u8, u8)> = self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (ids[a as usize], ids[b as usize]);
                    (x.min(y), x.max(y))
                })
                .collect();
            e.sort_unstable();
            if best.as_ref().is_none_or(|(be, _)| e < *be) {
                best = Some((e, ids));
            }
        }
        let (edges, ids) = best.unwrap();
        let mut masks = vec![0u16; ng];
        for g in 0..ng {
            masks[ids[g] as usize] = self.masks[g];
        }
        let mut piece_id: HashMap<u8, u8> = HashMap::new();
        let piece = self
            .piece
            .iter()
            .map(|&p| {
                if p == NONE {
                    NONE
                } else {
                    let l = piece_id.len() as u8;
                    *piece_id.entry(p).or_insert(l)
                }
            })
            .collect();
        DpState { group: self.group.iter().map(|&g| if g == NONE { NONE } else { ids[g as usize] }).collect(), piece, masks, active, edges }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Exact d-folio by dynamic programming over a nice form of `td`.
pub fn folio_dp(host: &RootedGraph, d: usize, td: &TreeDecomposition) -> Result<Folio> {
    folio_dp_with(host, d, td, &FolioConfig::default())
}

pub fn folio_dp_with(host: &RootedGraph, d: usize, td: &TreeDecomposition, cfg: &FolioConfig) -> Result<Folio> {
    let g = &host.graph;
    let report = validate_td(g, td);
    if !report.valid {
        return Err(Error::InvalidDecomposition(report.reason.unwrap_or_default()));
    }
    if host.k() > 16 {
        return Err(Error::SearchCapExceeded("more than 16 root labels".into()));
    }
    let nice = nice_form(td)?;
    let mut label_mask = vec![0u16; g.n()];
    for (i, &r) in host.roots().iter().enumerate() {
        label_mask[r] |= 1 << i;
    }
    let group_cap = host.root_set().len() + d;
    let mut table: HashMap<usize, (Vec<usize>, HashSet<DpState>)> = HashMap::new();
    for x in nice.postorder() {
        let node = &nice.nodes[x];
        let mut bag = node.bag.clone();
        bag.sort_unstable();
        let states: HashSet<DpState> = match node.kind {
            NodeKind::Leaf => {
                let mut s = HashSet::new();
                s.insert(DpState { group: vec![NONE; bag.len()], piece: vec![NONE; bag.len()], masks: vec![], active: 0, edges: vec![] });
                s
            }
            NodeKind::Introduce(v) => {
                let (cbag, cs) = table.remove(&node.children[0]).unwrap();
                introduce(g, &cbag, &cs, &bag, v, label_mask[v], d, group_cap)
            }
            NodeKind::Forget(v) => {
                let (cbag, cs) = table.remove(&node.children[0]).unwrap();
                forget(&cbag, &cs, v, d)
            }
            NodeKind::Join => {
                let (b1, s1) = table.remove(&node.children[0]).unwrap();
                let (b2, s2) = table.remove(&node.children[1]).unwrap();
                debug_assert!(b1 == bag && b2 == bag);
                join(&s1, &s2, d, group_cap)
            }
        };
        if states.len() > cfg.state_budget {
            return Err(Error::BudgetExceeded(format!("{} DP states at one node", states.len())));
        }
        table.insert(x, (bag, states));
    }
    let (_, states) = table.remove(&nice.root).unwrap();
    let k = host.k();
    let mut codes = BTreeSet::new();
    for s in states {
        let n = s.masks.len();
        let roots: Vec<usize> = (0..k).map(|i| (0..n).find(|&gi| s.masks[gi] >> i & 1 == 1).unwrap()).collect();
        let edges: Vec<(usize, usize)> = s.edges.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
        let p = RootedGraph::new(Graph::new(n, &edges)?, &roots)?;
        codes.insert(canonical_code(&p)?);
    }
    Ok(Folio::from_codes(k, d, codes))
}

#[allow(clippy::too_many_arguments)]
fn introduce(g: &Graph, cbag: &[usize], cs: &HashSet<DpState>, bag: &[usize], v: usize, lmask: u16, d: usize, group_cap: usize) -> HashSet<DpState> {
    let pos = bag.iter().position(|&x| x == v).unwrap();
    let mut out = HashSet::new();
    let _ = cbag;
    for s in cs {
        let mut base = Raw::from_state(s);
        base.group.insert(pos, NONE);
        base.piece.insert(pos, NONE);
        let fresh_piece = base.piece.iter().filter(|&&p| p != NONE).max().map_or(0, |m| m + 1);
        let mut options: Vec<Raw> = Vec::new();
        if lmask == 0 {
            options.push(Raw { group: base.group.clone(), piece: base.piece.clone(), masks: base.masks.clone(), alive: base.alive.clone(), edges: base.edges.clone() });
        }
        for gi in 0..s.active {
            let mut r = Raw { group: base.group.clone(), piece: base.piece.clone(), masks: base.masks.clone(), alive: base.alive.clone(), edges: base.edges.clone() };
            r.group[pos] = gi;
            r.piece[pos] = fresh_piece;
            r.masks[gi as usize] |= lmask;
            options.push(r);
        }
        if base.masks.len() < group_cap {
            let mut r = Raw { group: base.group.clone(), piece: base.piece.clone(), masks: base.masks.clone(), alive: base.alive.clone(), edges: base.edges.clone() };
            let gi = r.masks.len() as u8;
            r.masks.push(lmask);
            r.alive.push(true);
            r.group[pos] = gi;
            r.piece[pos] = fresh_piece;
            options.push(r);
        }
        for r in options {
            let gv = r.group[pos];
            if gv == NONE {
                out.insert(r.canonical());
                continue;
            }
            let mut partial = vec![r];
            for (j, &w) in bag.iter().enumerate() {
                if j == pos || !g.has_edge(v, w) {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * 2);
                for mut r in partial {
                    let gw = r.group[j];
                    if gw == NONE {
                        next.push(r);
                    } else if gw == gv {
                        let (a, b) = (r.piece[pos], r.piece[j]);
                        if a != b {
                            for p in r.piece.iter_mut() {
                                if *p == b {
                                    *p = a;
                                }
                            }
                        }
                        next.push(r);
                    } else {
                        let e = (gv.min(gw), gv.max(gw));
                        if !r.edges.contains(&e) && r.edges.len() < d {
                            let mut with = Raw { group: r.group.clone(), piece: r.piece.clone(), masks: r.masks.clone(), alive: r.alive.clone(), edges: r.edges.clone() };
                            with.add_edge(gv, gw);
                            next.push(with);
                        }
                        next.push(r);
                    }
                }
                partial = next;
            }
            for r in partial {
                out.insert(r.canonical());
            }
        }
    }
    out
}

fn forget(cbag: &[usize], cs: &HashSet<DpState>, v: usize, d: usize) -> HashSet<DpState> {
    let pos = cbag.iter().position(|&x| x == v).unwrap();
    let mut out = HashSet::new();
    for s in cs {
        let mut r = Raw::from_state(s);
        let (gv, pv) = (r.group[pos], r.piece[pos]);
        r.group.remove(pos);
        r.piece.remove(pos);
        if gv != NONE {
            let piece_left = r.piece.iter().zip(&r.group).any(|(&p, &g)| g == gv && p == pv);
            let group_left = r.group.contains(&gv);
            if !piece_left && group_left {
                continue;
            }
            if !group_left {
                r.alive[gv as usize] = false;
                if r.finalized_unlabeled() > d {
                    continue;
                }
            }
        }
        out.insert(r.canonical());
    }
    out
}

fn join(s1: &HashSet<DpState>, s2: &HashSet<DpState>, d: usize, group_cap: usize) -> HashSet<DpState> {
    let mut by_key: HashMap<&[u8], Vec<&DpState>> = HashMap::new();
    for s in s2 {
        by_key.entry(&s.group).or_default().push(s);
    }
    let mut out = HashSet::new();
    for a in s1 {
        let Some(bs) = by_key.get(a.group.as_slice()) else { continue };
        for b in bs {
            let na = a.masks.len() as u8;
            let act = a.active;
            let mut masks = a.masks.clone();
            for gi in 0..act as usize {
                masks[gi] |= b.masks[gi];
            }
            masks.extend_from_slice(&b.masks[act as usize..]);
            if masks.len() > group_cap || masks[act as usize..].iter().filter(|&&m| m == 0).count() > d {
                continue;
            }
            let remap = |x: u8| if x < act { x } else { x - act + na };
            let mut edges: BTreeSet<(u8, u8)> = a.edges.iter().copied().collect();
            for &(x, y) in &b.edges {
                let (x, y) = (remap(x), remap(y));
                edges.insert((x.min(y), x.max(y)));
            }
            if edges.len() > d {
                continue;
            }
            // pieces are joined when either side already connects them
            let len = a.piece.len();
            let mut parent: Vec<usize> = (0..len).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                p[x] = r;
                r
            }
            for side in [&a.piece, &b.piece] {
                for i in 0..len {
                    for j in i + 1..len {
                        if side[i] != NONE && side[i] == side[j] {
                            let (x, y) = (find(&mut parent, i), find(&mut parent, j));
                            if x != y {
                                parent[x] = y;
                            }
                        }
                    }
                }
            }
            let piece: Vec<u8> = (0..len).map(|i| if a.group[i] == NONE { NONE } else { find(&mut parent, i) as u8 }).collect();
            let ng = masks.len();
            let r = Raw { group: a.group.clone(), piece, masks, alive: (0..ng).map(|g| g < act as usize).collect(), edges };
            out.insert(r.canonical());
        }
    }
    out
}

/// The d-folio through the chosen engine, with a heuristic decomposition for the DP.
pub fn folio(host: &RootedGraph, d: usize, engine: Engine, cfg: &FolioConfig) -> Result<Folio> {
    match engine {
        Engine::Oracle => folio_bruteforce_with(host, d, cfg),
        Engine::Dp => folio_dp_with(host, d, &heuristic_decomposition(&host.graph), cfg),
    }
}

/// Restricted growth string of a root tuple, e.g. `0,1,0`.
pub fn label_pattern(tuple: &[usize]) -> String {
    let mut seen: Vec<usize> = Vec::new();
    tuple
        .iter()
        .map(|x| match seen.iter().position(|y| y == x) {
            Some(i) => i.to_string(),
            None => {
                seen.push(*x);
                (seen.len() - 1).to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn sorted_tuples(r: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(r: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..r.len() {
            cur.push(r[i]);
            rec(r, k, i, cur, out);
            cur.pop();
        }
    }
    rec(r, k, 0, &mut cur, &mut out);
    out
}

/// Distinct rearrangements of a tuple, each as the permutation `pi` with `new[i] = old[pi[i]]`.
fn distinct_rearrangements(t: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = HashSet::new();
    permutations(t.len())
        .into_iter()
        .filter(|pi| seen.insert(pi.iter().map(|&i| t[i]).collect::<Vec<_>>()))
        .collect()
}

fn check_multisets(r: usize, k: usize, cfg: &FolioConfig) -> Result<()> {
    let count = (r as f64).powi(k as i32);
    if count > cfg.multiset_budget as f64 {
        return Err(Error::BudgetExceeded(format!("{r}^{k} root tuples exceed {}", cfg.multiset_budget)));
    }
    Ok(())
}

/// Union of the d-folios over all ordered k-tuples of annotated vertices.
///
/// Only sorted tuples are computed; the others follow by relabelling roots.
pub fn kd_folio(host: &AnnotatedGraph, k: usize, d: usize, engine: Engine) -> Result<Folio> {
    kd_folio_with(host, k, d, engine, &FolioConfig::default())
}

pub fn kd_folio_with(host: &AnnotatedGraph, k: usize, d: usize, engine: Engine, cfg: &FolioConfig) -> Result<Folio> {
    let r = host.annotated();
    check_multisets(r.len(), k, cfg)?;
    let parts: Vec<Result<Folio>> = sorted_tuples(r, k)
        .par_iter()
        .map(|t| {
            let base = folio(&RootedGraph::new(host.graph.clone(), t)?, d, engine, cfg)?;
            let mut f = Folio::new(k, d);
            for pi in distinct_rearrangements(t) {
                let tuple: Vec<usize> = pi.iter().map(|&i| t[i]).collect();
                let tag = label_pattern(&tuple);
                for code in base.members() {
                    let rg = code.decode();
                    let roots: Vec<usize> = pi.iter().map(|&i| rg.roots()[i]).collect();
                    f.insert_tagged(canonical_code(&RootedGraph::new(rg.graph.clone(), &roots)?)?, &tag);
                }
            }
            Ok(f)
        })
        .collect();
    let mut out = Folio::new(k, d);
    for p in parts {
        out.merge(p?);
    }
    Ok(out)
}

/// First sorted root tuple whose folio changes when `v` is deleted.
pub fn irrelevance_counterexample(host: &AnnotatedGraph, k: usize, d: usize, v: usize, cfg: &FolioConfig) -> Result<Option<Vec<usize>>> {
    if v >= host.graph.n() {
        return Err(Error::IndexOutOfRange { vertex: v, n: host.graph.n() });
    }
    if host.is_annotated(v) {
        return Err(Error::PreconditionViolated(format!("vertex {v} is annotated")));
    }
    check_multisets(host.annotated().len(), k, cfg)?;
    let reduced = host.graph.delete_vertex(v);
    let results: Vec<Result<Option<Vec<usize>>>> = sorted_tuples(host.annotated(), k)
        .par_iter()
        .map(|t| {
            let before = folio_bruteforce_with(&RootedGraph::new(host.graph.clone(), t)?, d, cfg)?;
            let shifted: Vec<usize> = t.iter().map(|&x| if x > v { x - 1 } else { x }).collect();
            let after = folio_bruteforce_with(&RootedGraph::new(reduced.clone(), &shifted)?, d, cfg)?;
            Ok((before != after).then(|| t.clone()))
        })
        .collect();
    for r in results {
        if let Some(t) = r? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

pub fn strongly_irrelevant(host: &AnnotatedGraph, k: usize, d: usize, v: usize) -> Result<bool> {
    Ok(irrelevance_counterexample(host, k, d, v, &FolioConfig::default())?.is_none())
}

/// All rooted minors of members that keep detail at most `d`.
pub fn downward_closure(f: &Folio) -> Result<Folio> {
    let mut seen: BTreeSet<CanonicalCode> = f.members.clone();
    let mut stack: Vec<CanonicalCode> = seen.iter().cloned().collect();
    while let Some(c) = stack.pop() {
        for child in minor_children(&c.decode()) {
            if detail(&child) > f.d {
                continue;
            }
            let cc = canonical_code(&child)?;
            if seen.insert(cc.clone()) {
                stack.push(cc);
            }
        }
    }
    Ok(Folio { k: f.k, d: f.d, members: seen, tags: f.tags.clone() })
}

pub fn is_downward_closed(f: &Folio) -> Result<bool> {
    Ok(downward_closure(f)?.members == f.members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::path_decomposition_from_order;

    fn rooted(g: Graph, roots: &[usize]) -> RootedGraph {
        RootedGraph::new(g, roots).unwrap()
    }

    fn code(n: usize, e: &[(usize, usize)], roots: &[usize]) -> CanonicalCode {
        canonical_code(&rooted(Graph::new(n, e).unwrap(), roots)).unwrap()
    }

    #[test]
    fn detail_examples() {
        assert_eq!(detail(&rooted(Graph::empty(1), &[0])), 0);
        assert_eq!(detail(&rooted(Graph::empty(2), &[0, 0, 1, 1])), 0);
        assert_eq!(detail(&rooted(Graph::complete(3), &[0])), 3);
    }

    #[test]
    fn oracle_examples() {
        let f = folio_bruteforce(&rooted(Graph::empty(1), &[0]), 0).unwrap();
        assert_eq!(f.len(), 1);
        let f = folio_bruteforce(&rooted(Graph::complete(2), &[0, 1]), 0).unwrap();
        assert!(f.contains(&code(2, &[], &[0, 1])));
        assert!(f.contains(&code(1, &[], &[0, 0])));
        let f = folio_bruteforce(&rooted(Graph::cycle(4), &[0, 2]), 1).unwrap();
        assert!(f.contains(&code(2, &[(0, 1)], &[0, 1])));
        assert!(is_downward_closed(&f).unwrap());
    }

    #[test]
    fn dp_matches_oracle_on_small_hosts() {
        let mut grid = Vec::new();
        for j in 0..4 {
            grid.push((j, j + 4));
            if j < 3 {
                grid.push((j, j + 1));
                grid.push((j + 4, j + 5));
            }
        }
        let g24 = Graph::new(8, &grid).unwrap();
        let host = rooted(g24.clone(), &[0, 7]);
        let td = path_decomposition_from_order(&g24, &[0, 4, 1, 5, 2, 6, 3, 7]);
        assert_eq!(folio_dp(&host, 1, &td).unwrap(), folio_bruteforce(&host, 1).unwrap());
        let p6 = rooted(Graph::path(6), &[0, 5]);
        let f = folio_dp(&p6, 0, &heuristic_decomposition(&p6.graph)).unwrap();
        assert!(f.contains(&code(1, &[], &[0, 0])));
        assert_eq!(f, folio_bruteforce(&p6, 0).unwrap());
        for (g, roots) in [(Graph::complete(4), vec![0, 1]), (Graph::cycle(5), vec![0, 0, 2]), (Graph::empty(3), vec![])] {
            let host = rooted(g.clone(), &roots);
            for d in 0..=2 {
                let single = TreeDecomposition::single_bag(g.n());
                let o = folio_bruteforce(&host, d).unwrap();
                assert_eq!(folio_dp(&host, d, &single).unwrap(), o);
                assert_eq!(folio_dp(&host, d, &heuristic_decomposition(&g)).unwrap(), o);
            }
        }
    }

    #[test]
    fn kd_folio_examples() {
        let host = AnnotatedGraph::new(Graph::empty(1), &[0]).unwrap();
        assert_eq!(kd_folio(&host, 1, 0, Engine::Oracle).unwrap().len(), 1);
        let host = AnnotatedGraph::new(Graph::path(3), &[0, 2]).unwrap();
        let o = kd_folio(&host, 2, 1, Engine::Oracle).unwrap();
        let p = kd_folio(&host, 2, 1, Engine::Dp).unwrap();
        assert_eq!(o, p);
        let c = code(1, &[], &[0, 0]);
        assert_eq!(o.tags(&c).unwrap().iter().cloned().collect::<Vec<_>>(), vec!["0,0".to_string(), "0,1".to_string()]);
        let plain = kd_folio(&AnnotatedGraph::new(Graph::path(3), &[]).unwrap(), 0, 1, Engine::Oracle).unwrap();
        // the empty graph and K1
        assert_eq!(plain.len(), 2);
    }

    #[test]
    fn dp_matches_oracle_on_random_hosts() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(1..=8);
            let mut e = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.35) {
                        e.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, &e).unwrap();
            let k = rng.gen_range(0..=2);
            let roots: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
            let d = rng.gen_range(0..=2);
            let host = rooted(g.clone(), &roots);
            let o = folio_bruteforce(&host, d).unwrap();
            assert_eq!(folio_dp(&host, d, &heuristic_decomposition(&g)).unwrap(), o, "{g:?} {roots:?} {d}");
        }
    }

    #[test]
    fn irrelevance_examples() {
        let mut g = Graph::path(3).disjoint_union(&Graph::empty(1));
        g.set_label(3, "iso");
        let host = AnnotatedGraph::new(g, &[0, 2]).unwrap();
        assert!(strongly_irrelevant(&host, 2, 0, 3).unwrap());
        assert!(!strongly_irrelevant(&host, 2, 0, 1).unwrap());
    }
}
