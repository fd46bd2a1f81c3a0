//! Irrelevant-vertex reduction loop: clique minors, the clique rule, oracle
//! irrelevance checks, then a folio computation on the reduced graph.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{exact_treewidth, heuristic_decomposition, Treewidth, EXACT_CAP};
use crate::error::{Error, Result};
use crate::folio::{irrelevance_counterexample, kd_folio_with, Engine, Folio, FolioConfig};
use crate::graph::{AnnotatedGraph, Graph};
use crate::minor::{find_minor_with, verify_minor_model, MinorModel, SearchConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleChoice {
    Oracle,
    CliqueRule,
    Both,
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    /// Stop once treewidth is at most this.
    pub threshold: usize,
    pub rules: RuleChoice,
    /// Re-check clique-rule deletions with the oracle.
    pub confirm_clique_rule: bool,
    pub folio: FolioConfig,
    /// Node budget for the fallback clique-minor search.
    pub clique_search_budget: u64,
    pub max_deletions: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            threshold: 4,
            rules: RuleChoice::Both,
            confirm_clique_rule: true,
            folio: FolioConfig::default(),
            clique_search_budget: 2_000_000,
            max_deletions: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliqueOutcome {
    Found { model: MinorModel, density_holds: bool },
    Absent { reason: String },
}

impl CliqueOutcome {
    pub fn model(&self) -> Option<&MinorModel> {
        match self {
            CliqueOutcome::Found { model, .. } => Some(model),
            CliqueOutcome::Absent { .. } => None,
        }
    }
}

fn density_holds(g: &Graph, t: usize) -> bool {
    if t < 3 {
        return g.m() >= 1 || t <= 1;
    }
    let need = (g.n() as u128) << (t - 3);
    g.m() as u128 >= need
}

/// A `K_t` minor model. Under the density condition `m >= 2^(t-3) n` the model
/// comes from the contraction argument; otherwise (or if that fails) a clique
/// subgraph is tried, then a budgeted exhaustive search.
pub fn dense_clique_minor(g: &Graph, t: usize) -> CliqueOutcome {
    dense_clique_minor_with(g, t, 2_000_000)
}

pub fn dense_clique_minor_with(g: &Graph, t: usize, budget: u64) -> CliqueOutcome {
    let pattern = Graph::complete(t);
    let dense = density_holds(g, t);
    if t == 0 {
        return CliqueOutcome::Found { model: MinorModel { branch_sets: Vec::new() }, density_holds: true };
    }
    if dense {
        if let Some(m) = mader_model(g, t) {
            if verify_minor_model(g, &pattern, &m) {
                return CliqueOutcome::Found { model: m, density_holds: true };
            }
        }
    }
    if let Some(c) = max_clique(g, t) {
        if c.len() >= t {
            let m = MinorModel { branch_sets: c[..t].iter().map(|&v| vec![v]).collect() };
            return CliqueOutcome::Found { model: m, density_holds: dense };
        }
    }
    if g.n() < t || g.m() < t * (t - 1) / 2 {
        return CliqueOutcome::Absent { reason: format!("too few vertices or edges for K_{t}") };
    }
    let cfg = SearchConfig { pattern_cap: t.max(1), node_budget: Some(budget) };
    match find_minor_with(g, &pattern, &cfg) {
        Ok(Some(m)) => CliqueOutcome::Found { model: m, density_holds: dense },
        Ok(None) => CliqueOutcome::Absent {
            reason: if dense { format!("no K_{t} minor") } else { format!("density fails and no K_{t} minor") },
        },
        Err(e) => CliqueOutcome::Absent { reason: format!("density fails and search gave up: {e}") },
    }
}

/// Contract to a minor-minimal dense graph, take a minimum degree vertex and
/// recurse into its neighbourhood for `K_{t-1}`.
fn mader_model(g: &Graph, t: usize) -> Option<MinorModel> {
    if t == 1 {
        return (g.n() > 0).then(|| MinorModel { branch_sets: vec![vec![0]] });
    }
    if t == 2 {
        let (a, b) = *g.edges().first()?;
        return Some(MinorModel { branch_sets: vec![vec![a], vec![b]] });
    }
    let c = 1usize << (t - 3);
    // adjacency sets over current super-vertices
    let mut adj: Vec<HashSet<usize>> = (0..g.n()).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive: Vec<bool> = vec![true; g.n()];
    let mut branch: Vec<Vec<usize>> = (0..g.n()).map(|v| vec![v]).collect();
    let mut n = g.n();
    let mut m = g.m();
    loop {
        let mut changed = false;
        // delete low-degree vertices
        for v in 0..g.n() {
            if alive[v] && n > 1 && m - adj[v].len() >= c * (n - 1) {
                for u in std::mem::take(&mut adj[v]) {
                    adj[u].remove(&v);
                    m -= 1;
                }
                alive[v] = false;
                n -= 1;
                changed = true;
            }
        }
        // contract edges in few triangles
        'outer: for u in 0..g.n() {
            if !alive[u] {
                continue;
            }
            let nu: Vec<usize> = adj[u].iter().copied().collect();
            for v in nu {
                let common = adj[u].intersection(&adj[v]).count();
                if n > 1 && m - 1 - common >= c * (n - 1) {
                    let nv: Vec<usize> = adj[v].iter().copied().collect();
                    for w in nv {
                        adj[w].remove(&v);
                        m -= 1;
                        if w != u && adj[u].insert(w) {
                            adj[w].insert(u);
                            m += 1;
                        }
                    }
                    adj[v].clear();
                    alive[v] = false;
                    n -= 1;
                    let bv = std::mem::take(&mut branch[v]);
                    branch[u].extend(bv);
                    changed = true;
                    break 'outer;
                }
            }
        }
        // delete spare edges
        if !changed && m > c * n {
            'del: for u in 0..g.n() {
                if alive[u] {
                    if let Some(&v) = adj[u].iter().next() {
                        adj[u].remove(&v);
                        adj[v].remove(&u);
                        m -= 1;
                        changed = true;
                        break 'del;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut order: Vec<usize> = (0..g.n()).filter(|&v| alive[v]).collect();
    order.sort_by_key(|&v| adj[v].len());
    for v in order {
        let nb: Vec<usize> = {
            let mut x: Vec<usize> = adj[v].iter().copied().collect();
            x.sort_unstable();
            x
        };
        let pos = |x: usize| nb.binary_search(&x).ok();
        let mut e = Vec::new();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &adj[a] {
                if let Some(j) = pos(b) {
                    if i < j {
                        e.push((i, j));
                    }
                }
            }
        }
        let sub = Graph::new(nb.len(), &e).ok()?;
        if let Some(inner) = mader_model(&sub, t - 1) {
            let mut sets: Vec<Vec<usize>> = inner.branch_sets.iter().map(|s| s.iter().flat_map(|&i| branch[nb[i]].clone()).collect()).collect();
            sets.push(branch[v].clone());
            return Some(MinorModel { branch_sets: sets });
        }
    }
    None
}

/// A clique of size at least `want` if one exists (branch and bound), else the largest found.
fn max_clique(g: &Graph, want: usize) -> Option<Vec<usize>> {
    fn expand(g: &Graph, cur: &mut Vec<usize>, cand: Vec<usize>, best: &mut Vec<usize>, want: usize, budget: &mut u64) {
        if *budget == 0 || best.len() >= want {
            return;
        }
        *budget -= 1;
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        for (i, &v) in cand.iter().enumerate() {
            if cur.len() + cand.len() - i <= best.len() {
                return;
            }
            let next: Vec<usize> = cand[i + 1..].iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            cur.push(v);
            expand(g, cur, next, best, want, budget);
            cur.pop();
        }
    }
    let mut best = Vec::new();
    let mut cand: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) + 1 >= want).collect();
    cand.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut budget = 1_000_000u64;
    expand(g, &mut Vec::new(), cand, &mut best, want, &mut budget);
    (!best.is_empty()).then_some(best)
}

/// `floor(5l/2) + 3d^2 + 1`.
pub fn clique_bound(l: usize, d: usize) -> usize {
    5 * l / 2 + 3 * d * d + 1
}

/// Sink-side minimum vertex cut between `zs` and `target`, where target
/// vertices may not be cut. Returns `(order, B \ A)` or None if impossible.
fn min_cut_far_side(g: &Graph, zs: &[usize], target: &[usize]) -> Option<(usize, Vec<usize>)> {
    let n = g.n();
    let is_target: Vec<bool> = {
        let mut t = vec![false; n];
        for &x in target {
            t[x] = true;
        }
        t
    };
    if zs.iter().any(|&z| is_target[z]) {
        return None;
    }
    if zs.is_empty() {
        return Some((0, (0..n).filter(|&v| reach_any(g, target, v)).collect()));
    }
    // nodes: v_in = 2v, v_out = 2v+1, source = 2n, sink = 2n+1
    let inf = i64::MAX / 4;
    let (s, t) = (2 * n, 2 * n + 1);
    let mut head: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 2];
    let mut to = Vec::new();
    let mut cap: Vec<i64> = Vec::new();
    let mut add = |a: usize, b: usize, c: i64, head: &mut Vec<Vec<usize>>| {
        head[a].push(to.len());
        to.push(b);
        cap.push(c);
        head[b].push(to.len());
        to.push(a);
        cap.push(0);
    };
    for v in 0..n {
        add(2 * v, 2 * v + 1, if is_target[v] { inf } else { 1 }, &mut head);
        for &w in g.neighbors(v) {
            add(2 * v + 1, 2 * w, inf, &mut head);
        }
    }
    for &z in zs {
        add(s, 2 * z, inf, &mut head);
    }
    for &x in target {
        add(2 * x + 1, t, inf, &mut head);
    }
    let mut flow = 0usize;
    loop {
        let mut prev: Vec<Option<usize>> = vec![None; 2 * n + 2];
        let mut q = VecDeque::from([s]);
        let mut seen = vec![false; 2 * n + 2];
        seen[s] = true;
        while let Some(a) = q.pop_front() {
            for &e in &head[a] {
                if cap[e] > 0 && !seen[to[e]] {
                    seen[to[e]] = true;
                    prev[to[e]] = Some(e);
                    q.push_back(to[e]);
                }
            }
        }
        if !seen[t] {
            break;
        }
        let mut x = t;
        while let Some(e) = prev[x] {
            cap[e] -= 1;
            cap[e ^ 1] += 1;
            x = to[e ^ 1];
        }
        flow += 1;
        if flow > n {
            return None;
        }
    }
    // nodes that can still reach the sink in the residual graph
    let mut back = vec![false; 2 * n + 2];
    back[t] = true;
    let mut q = VecDeque::from([t]);
    while let Some(a) = q.pop_front() {
        for &e in &head[a] {
            // residual edge to[e] -> a exists iff cap[e ^ 1] > 0
            let b = to[e];
            if cap[e ^ 1] > 0 && !back[b] {
                back[b] = true;
                q.push_back(b);
            }
        }
    }
    // B \ A: vertices whose in-node reaches the sink
    let far: Vec<usize> = (0..n).filter(|&v| back[2 * v]).collect();
    Some((flow, far))
}

fn reach_any(g: &Graph, target: &[usize], v: usize) -> bool {
    let r = g.reachable(target, &vec![false; g.n()]);
    r[v]
}

/// The clique rule: among separations with `Z` on the small side and a whole
/// branch set strictly on the big side, take one of minimum order with the
/// small side maximal, and return the lowest vertex strictly on the big side.
pub fn clique_irrelevant_vertex(host: &AnnotatedGraph, d: usize, model: &MinorModel) -> Result<Option<usize>> {
    let z = host.annotated();
    let need = clique_bound(z.len(), d);
    let t = model.branch_sets.len();
    if t < need {
        return Err(Error::CliqueTooSmall { have: t, need });
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    for bs in &model.branch_sets {
        let Some((order, far)) = min_cut_far_side(&host.graph, z, bs) else { continue };
        let better = match &best {
            None => true,
            Some((o, f)) => order < *o || (order == *o && far.len() < f.len()),
        };
        if better {
            best = Some((order, far));
        }
    }
    Ok(best.and_then(|(_, far)| far.into_iter().find(|&v| !host.is_annotated(v))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Justification {
    CliqueRule,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deletion {
    /// Vertex id in the input graph.
    pub vertex: usize,
    pub justification: Justification,
    /// Oracle verdict for a clique-rule deletion, when checked.
    pub oracle_confirmed: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionStatus {
    ThresholdMet,
    Stuck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreewidthEvidence {
    pub width: usize,
    /// True if `width` is the exact treewidth, false if only an upper bound.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub deletions: Vec<Deletion>,
    /// Input ids of surviving vertices, in their new order.
    pub kept: Vec<usize>,
    pub final_edges: Vec<(usize, usize)>,
    pub status: ReductionStatus,
    pub treewidth: TreewidthEvidence,
}

impl ReductionTrace {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serializes")
    }

    /// Deletes the traced vertices from `g` in order.
    pub fn replay(&self, g: &Graph) -> Graph {
        let mut cur = g.clone();
        let mut ids: Vec<usize> = (0..g.n()).collect();
        for d in &self.deletions {
            let pos = ids.iter().position(|&x| x == d.vertex).expect("traced vertex exists");
            cur = cur.delete_vertex(pos);
            ids.remove(pos);
        }
        cur
    }
}

fn treewidth_evidence(g: &Graph, threshold: usize) -> Result<TreewidthEvidence> {
    let heur = heuristic_decomposition(g).width();
    if heur <= threshold {
        return Ok(TreewidthEvidence { width: heur, exact: false });
    }
    let blocks_small = g.blocks().blocks.iter().all(|b| b.vertices.len() <= EXACT_CAP);
    if blocks_small {
        if let Treewidth::Exact { width, .. } = exact_treewidth(g, heur)? {
            return Ok(TreewidthEvidence { width, exact: true });
        }
    }
    Ok(TreewidthEvidence { width: heur, exact: false })
}

/// Deletes certified irrelevant vertices one per round until the treewidth is
/// at most the threshold or no certified vertex remains.
pub fn reduce(host: &AnnotatedGraph, k: usize, d: usize, cfg: &PipelineConfig) -> Result<(AnnotatedGraph, ReductionTrace)> {
    if cfg.threshold < 1 {
        return Err(Error::PreconditionViolated("threshold must be at least 1".into()));
    }
    let mut cur = host.clone();
    let mut ids: Vec<usize> = (0..host.graph.n()).collect();
    let mut deletions = Vec::new();
    loop {
        let tw = treewidth_evidence(&cur.graph, cfg.threshold)?;
        let finish = |cur: &AnnotatedGraph, ids: Vec<usize>, deletions: Vec<Deletion>, status| {
            let trace = ReductionTrace { deletions, kept: ids, final_edges: cur.graph.edges(), status, treewidth: tw.clone() };
            Ok((cur.clone(), trace))
        };
        if tw.width <= cfg.threshold {
            return finish(&cur, ids, deletions, ReductionStatus::ThresholdMet);
        }
        if deletions.len() >= cfg.max_deletions {
            return Err(Error::BudgetExceeded(format!("more than {} deletions", cfg.max_deletions)));
        }
        let mut pick: Option<(usize, Justification, Option<bool>)> = None;
        if matches!(cfg.rules, RuleChoice::CliqueRule | RuleChoice::Both) {
            let t = clique_bound(cur.annotated().len(), d);
            if let Some(model) = dense_clique_minor_with(&cur.graph, t, cfg.clique_search_budget).model() {
                if let Some(v) = clique_irrelevant_vertex(&cur, d, model)? {
                    let confirmed = if cfg.confirm_clique_rule {
                        Some(irrelevance_counterexample(&cur, k, d, v, &cfg.folio)?.is_none())
                    } else {
                        None
                    };
                    pick = Some((v, Justification::CliqueRule, confirmed));
                }
            }
        }
        if pick.is_none() && matches!(cfg.rules, RuleChoice::Oracle | RuleChoice::Both) {
            let cands: Vec<usize> = (0..cur.graph.n()).filter(|&v| !cur.is_annotated(v)).collect();
            let found = cands
                .par_iter()
                .map(|&v| irrelevance_counterexample(&cur, k, d, v, &cfg.folio).map(|c| (v, c.is_none())))
                .collect::<Result<Vec<_>>>()?;
            if let Some(&(v, _)) = found.iter().find(|(_, ok)| *ok) {
                pick = Some((v, Justification::Oracle, None));
            }
        }
        let Some((v, justification, oracle_confirmed)) = pick else {
            return finish(&cur, ids, deletions, ReductionStatus::Stuck);
        };
        deletions.push(Deletion { vertex: ids[v], justification, oracle_confirmed });
        ids.remove(v);
        cur = cur.delete_vertex(v);
    }
}

/// Reduces, then runs the folio DP on what is left.
pub fn solve_folio(host: &AnnotatedGraph, k: usize, d: usize, cfg: &PipelineConfig) -> Result<Folio> {
    let (reduced, _) = reduce(host, k, d, cfg)?;
    kd_folio_with(&reduced, k, d, Engine::Dp, &cfg.folio)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_clique_examples() {
        let k8 = Graph::complete(8);
        let m = dense_clique_minor(&k8, 5).model().cloned().unwrap();
        assert!(verify_minor_model(&k8, &Graph::complete(5), &m));
        let tree = Graph::path(10);
        assert!(dense_clique_minor(&tree, 4).model().is_none());
        let k12 = crate::constructions::gnp(12, 1.0, 1);
        let m = dense_clique_minor(&k12, 6).model().cloned().unwrap();
        assert!(verify_minor_model(&k12, &Graph::complete(6), &m));
    }

    #[test]
    fn mader_on_dense_random_graphs() {
        for seed in 0..20 {
            let g = crate::constructions::gnp(16, 0.7, seed);
            for t in 3..=5 {
                if density_holds(&g, t) {
                    let m = mader_model(&g, t).expect("dense graphs have the clique minor");
                    assert!(verify_minor_model(&g, &Graph::complete(t), &m));
                }
            }
        }
    }

    #[test]
    fn clique_rule_on_lobe() {
        // a 7-clique on 0..7, a lobe {7, 8} attached through 0 and 1, R = {7, 8}
        let mut e = Vec::new();
        for a in 0..7 {
            for b in a + 1..7 {
                e.push((a, b));
            }
        }
        e.extend([(0, 7), (1, 7), (7, 8), (1, 8)]);
        let g = Graph::new(9, &e).unwrap();
        let host = AnnotatedGraph::new(g, &[7, 8]).unwrap();
        let model = MinorModel { branch_sets: (0..6).map(|v| vec![v]).collect() };
        let v = clique_irrelevant_vertex(&host, 0, &model).unwrap().unwrap();
        assert!(v < 7 && v > 1);
        assert!(crate::folio::strongly_irrelevant(&host, 2, 0, v).unwrap());
        let small = MinorModel { branch_sets: vec![vec![0], vec![1]] };
        assert!(matches!(clique_irrelevant_vertex(&host, 0, &small), Err(Error::CliqueTooSmall { .. })));
    }

    #[test]
    fn trivial_bound() {
        let host = AnnotatedGraph::new(Graph::empty(1), &[]).unwrap();
        let model = MinorModel { branch_sets: vec![vec![0]] };
        assert_eq!(clique_irrelevant_vertex(&host, 0, &model).unwrap(), Some(0));
    }

    #[test]
    fn reduce_deletes_free_component() {
        // a triangle with a root, plus a disjoint K5
        let mut e = vec![(0, 1), (1, 2), (0, 2)];
        for a in 3..8 {
            for b in a + 1..8 {
                e.push((a, b));
            }
        }
        let host = AnnotatedGraph::new(Graph::new(8, &e).unwrap(), &[0]).unwrap();
        let cfg = PipelineConfig { threshold: 2, rules: RuleChoice::Oracle, ..Default::default() };
        let (red, trace) = reduce(&host, 1, 0, &cfg).unwrap();
        assert_eq!(trace.status, ReductionStatus::ThresholdMet);
        assert!(red.graph.n() < 8);
        assert_eq!(trace.replay(&host.graph).edges(), red.graph.edges());
        let (_, again) = reduce(&red, 1, 0, &cfg).unwrap();
        assert!(again.deletions.is_empty());
        let direct = crate::folio::kd_folio(&host, 1, 0, Engine::Oracle).unwrap();
        assert_eq!(solve_folio(&host, 1, 0, &cfg).unwrap(), direct);
    }
}
