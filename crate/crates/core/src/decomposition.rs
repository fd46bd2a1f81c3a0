//! Tree decompositions: validation, exact treewidth for small blocks,
//! elimination heuristics, nice form, and treewidth certificates.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::minor::{find_minor, MinorModel};

pub const EXACT_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdReport {
    pub valid: bool,
    pub width: usize,
    pub adhesion: usize,
    pub reason: Option<String>,
}

impl TreeDecomposition {
    pub fn single_bag(n: usize) -> TreeDecomposition {
        TreeDecomposition { bags: vec![(0..n).collect()], tree_edges: Vec::new() }
    }

    /// Max bag size minus one; the empty decomposition has width 0.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn adhesion(&self) -> usize {
        self.tree_edges
            .iter()
            .map(|&(a, b)| self.bags[a].iter().filter(|v| self.bags[b].contains(v)).count())
            .max()
            .unwrap_or(0)
    }

    fn tree_adjacency(&self) -> Result<Vec<Vec<usize>>> {
        let t = self.bags.len();
        let mut adj = vec![Vec::new(); t];
        for &(a, b) in &self.tree_edges {
            if a >= t || b >= t || a == b {
                return Err(Error::InvalidDecomposition(format!("bad tree edge ({a},{b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        if t > 0 && self.tree_edges.len() != t - 1 {
            return Err(Error::InvalidDecomposition("tree must have #bags - 1 edges".into()));
        }
        let mut seen = vec![false; t];
        let mut stack = vec![0];
        if t > 0 {
            seen[0] = true;
        }
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidDecomposition("tree is disconnected".into()));
        }
        Ok(adj)
    }
}

pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> TdReport {
    let fail = |reason: String| TdReport { valid: false, width: td.width(), adhesion: td.adhesion(), reason: Some(reason) };
    let adj = match td.tree_adjacency() {
        Ok(a) => a,
        Err(e) => return fail(e.to_string()),
    };
    if td.bags.is_empty() {
        return if g.n() == 0 {
            TdReport { valid: true, width: 0, adhesion: 0, reason: None }
        } else {
            fail("no bags".into())
        };
    }
    let n = g.n();
    let mut holders = vec![Vec::new(); n];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return fail(format!("bag {i} has vertex {v} out of range"));
            }
            holders[v].push(i);
        }
    }
    for (v, hs) in holders.iter().enumerate() {
        if hs.is_empty() {
            return fail(format!("vertex {v} is in no bag"));
        }
        let inside: BTreeSet<usize> = hs.iter().copied().collect();
        let mut seen = BTreeSet::from([hs[0]]);
        let mut stack = vec![hs[0]];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if inside.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != inside.len() {
            return fail(format!("bags holding vertex {v} are not connected"));
        }
    }
    for (u, v) in g.edges() {
        if !td.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return fail(format!("edge ({u},{v}) is in no bag"));
        }
    }
    TdReport { valid: true, width: td.width(), adhesion: td.adhesion(), reason: None }
}

/// Decomposition induced by an elimination ordering; returns it with its width.
pub fn td_from_elimination(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.n();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut higher: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().filter(|&w| pos[w] > pos[v]).collect()).collect();
    for &v in order {
        let hs: Vec<usize> = higher[v].iter().copied().collect();
        if let Some(&first) = hs.iter().min_by_key(|&&w| pos[w]) {
            for &w in &hs {
                if w != first {
                    higher[first].insert(w);
                }
            }
        }
    }
    let mut bags = Vec::with_capacity(n);
    let mut tree_edges = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let mut bag: Vec<usize> = higher[v].iter().copied().collect();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        match higher[v].iter().min_by_key(|&&w| pos[w]) {
            Some(&p) => tree_edges.push((i, pos[p])),
            // roots of separate components get chained so the result is one tree
            None if i + 1 < n => tree_edges.push((i, i + 1)),
            None => {}
        }
    }
    if n == 0 {
        return TreeDecomposition { bags: vec![Vec::new()], tree_edges: Vec::new() };
    }
    TreeDecomposition { bags, tree_edges }
}

/// Path decomposition from a linear order: bag i holds vertex i and every
/// earlier vertex with a neighbor at position i or later.
pub fn path_decomposition_from_order(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.n();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let last: Vec<usize> = (0..n).map(|v| g.neighbors(v).iter().map(|&w| pos[w]).max().unwrap_or(0).max(pos[v])).collect();
    let mut bags = Vec::with_capacity(n);
    for i in 0..n {
        let mut bag: Vec<usize> = order[..i].iter().copied().filter(|&u| last[u] >= i).collect();
        bag.push(order[i]);
        bag.sort_unstable();
        bags.push(bag);
    }
    if n == 0 {
        bags.push(Vec::new());
    }
    let tree_edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
    TreeDecomposition { bags, tree_edges }
}

/// Breadth-first order from `start`, then any unreached vertices the same way.
fn bfs_order(g: &Graph, start: usize) -> Vec<usize> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in std::iter::once(start).chain(0..n) {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = std::collections::VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    order
}

/// Narrowest path decomposition among breadth-first sweeps from every start vertex.
pub fn sweep_path_decomposition(g: &Graph) -> TreeDecomposition {
    (0..g.n())
        .map(|s| path_decomposition_from_order(g, &bfs_order(g, s)))
        .min_by_key(|td| td.width())
        .unwrap_or_else(|| path_decomposition_from_order(g, &[]))
}

fn greedy_order(g: &Graph, fill: bool) -> Vec<usize> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let score = |v: usize| -> usize {
            if !fill {
                return adj[v].len();
            }
            let ns: Vec<usize> = adj[v].iter().copied().collect();
            let mut missing = 0;
            for i in 0..ns.len() {
                for j in i + 1..ns.len() {
                    if !adj[ns[i]].contains(&ns[j]) {
                        missing += 1;
                    }
                }
            }
            missing
        };
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (score(v), adj[v].len(), v)).unwrap();
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &ns {
            adj[a].remove(&v);
            for &b in &ns {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        alive[v] = false;
        order.push(v);
    }
    order
}

pub fn min_fill_decomposition(g: &Graph) -> TreeDecomposition {
    td_from_elimination(g, &greedy_order(g, true))
}

pub fn min_degree_decomposition(g: &Graph) -> TreeDecomposition {
    td_from_elimination(g, &greedy_order(g, false))
}

/// Best heuristic decomposition among the built-in orderings.
pub fn heuristic_decomposition(g: &Graph) -> TreeDecomposition {
    let a = min_fill_decomposition(g);
    let b = min_degree_decomposition(g);
    if b.width() < a.width() {
        b
    } else {
        a
    }
}

/// Exact treewidth of a graph on at most `EXACT_CAP` vertices by the subset
/// recurrence TW(S) = min over v in S of max(TW(S−v), |Q(S−v, v)|).
fn exact_small(g: &Graph, upper: usize) -> Option<(usize, Vec<usize>)> {
    let n = g.n();
    if n == 0 {
        return Some((0, Vec::new()));
    }
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w))).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let inf = u8::MAX;
    // q(S, v): vertices outside S ∪ {v} reachable from v through S
    let q = |s: u32, v: usize| -> u32 {
        let mut comp = 1u32 << v;
        let mut frontier = comp;
        let mut out = 0u32;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let x = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[x];
            }
            out |= next & !s & !(1u32 << v);
            next &= s & !comp;
            comp |= next;
            frontier = next;
        }
        out
    };
    let size = 1usize << n;
    let mut tw = vec![inf; size];
    tw[0] = 0;
    let cap = upper.min(n.saturating_sub(1)) as u8;
    for s in 1..size as u32 {
        let mut best = inf;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let t = tw[prev as usize];
            if t == inf {
                continue;
            }
            let qv = q(prev, v).count_ones() as u8;
            let val = t.max(qv);
            if val < best {
                best = val;
            }
        }
        tw[s as usize] = if best <= cap { best } else { inf };
    }
    let width = tw[full as usize];
    if width == inf {
        return None;
    }
    // the last eliminated vertex is chosen first; ties go to the smallest index
    let mut order_rev = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let target = tw[s as usize];
        let mut rest = s;
        let mut chosen = None;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let t = tw[prev as usize];
            if t != inf && t.max(q(prev, v).count_ones() as u8) == target && t <= target {
                chosen = Some(v);
                break;
            }
        }
        let v = chosen.expect("subset table is consistent");
        order_rev.push(v);
        s &= !(1 << v);
    }
    order_rev.reverse();
    Some((width as usize, order_rev))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Treewidth {
    Exact { width: usize, td: TreeDecomposition },
    AboveBound,
}

/// Exact treewidth, block by block; each block must have at most `EXACT_CAP` vertices.
pub fn exact_treewidth(g: &Graph, upper: usize) -> Result<Treewidth> {
    let bl = g.blocks();
    let mut pieces: Vec<Vec<usize>> = bl.blocks.iter().map(|b| b.vertices.clone()).collect();
    pieces.extend(bl.bridges.iter().map(|&(a, b)| vec![a, b]));
    pieces.extend(bl.isolated.iter().map(|&v| vec![v]));
    if let Some(p) = pieces.iter().find(|p| p.len() > EXACT_CAP) {
        return Err(Error::SearchCapExceeded(format!("block of {} > {EXACT_CAP} vertices", p.len())));
    }
    let mut parts = Vec::with_capacity(pieces.len());
    let mut width = 0;
    for p in &pieces {
        let (sub, map) = g.induced(p);
        match exact_small(&sub, upper) {
            None => return Ok(Treewidth::AboveBound),
            Some((w, order)) => {
                width = width.max(w);
                let td = td_from_elimination(&sub, &order);
                let bags = td.bags.into_iter().map(|b| b.into_iter().map(|v| map[v]).collect()).collect();
                parts.push(TreeDecomposition { bags, tree_edges: td.tree_edges });
            }
        }
    }
    Ok(Treewidth::Exact { width, td: glue(g.n(), parts) })
}

/// Joins decompositions of pieces that pairwise share at most one vertex
/// and whose intersection pattern forms a forest (blocks, bridges, isolated vertices).
fn glue(n: usize, parts: Vec<TreeDecomposition>) -> TreeDecomposition {
    let mut bags = Vec::new();
    let mut tree_edges = Vec::new();
    let mut offsets = Vec::new();
    for p in &parts {
        offsets.push(bags.len());
        let off = bags.len();
        bags.extend(p.bags.iter().cloned());
        tree_edges.extend(p.tree_edges.iter().map(|&(a, b)| (a + off, b + off)));
    }
    if bags.is_empty() {
        return TreeDecomposition { bags: vec![Vec::new()], tree_edges };
    }
    // union-find over parts; connect a part to an earlier one through a shared vertex
    let mut parent: Vec<usize> = (0..parts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut anchor: Vec<Option<(usize, usize)>> = vec![None; n];
    for (pi, p) in parts.iter().enumerate() {
        for (bi, bag) in p.bags.iter().enumerate() {
            for &v in bag {
                match anchor[v] {
                    None => anchor[v] = Some((pi, offsets[pi] + bi)),
                    Some((pj, bj)) => {
                        let (a, b) = (find(&mut parent, pi), find(&mut parent, pj));
                        if a != b {
                            parent[a] = b;
                            tree_edges.push((offsets[pi] + bi, bj));
                        }
                    }
                }
            }
        }
    }
    for pi in 1..parts.len() {
        let (a, b) = (find(&mut parent, pi), find(&mut parent, 0));
        if a != b {
            parent[a] = b;
            tree_edges.push((offsets[pi], 0));
        }
    }
    TreeDecomposition { bags, tree_edges }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LowerCertificate {
    /// `rows[r][c]` is the host vertex at grid position (r, c).
    GridSubgraph { rows: Vec<Vec<usize>> },
    GridMinor { order: usize, model: MinorModel },
    Bramble { sets: Vec<Vec<usize>>, order: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificates {
    pub lower: LowerCertificate,
    pub upper: TreeDecomposition,
}

/// Order of a bramble: the minimum size of a vertex set meeting every element.
pub fn bramble_order(sets: &[Vec<usize>], limit: usize) -> usize {
    fn hits(sets: &[Vec<usize>], chosen: &mut Vec<usize>, budget: usize) -> bool {
        let Some(open) = sets.iter().find(|s| !s.iter().any(|v| chosen.contains(v))) else {
            return true;
        };
        if budget == 0 {
            return false;
        }
        for &v in open {
            chosen.push(v);
            let ok = hits(sets, chosen, budget - 1);
            chosen.pop();
            if ok {
                return true;
            }
        }
        false
    }
    (0..=limit).find(|&b| hits(sets, &mut Vec::new(), b)).unwrap_or(limit + 1)
}

pub fn verify_bramble(g: &Graph, sets: &[Vec<usize>]) -> bool {
    let touching = |a: &Vec<usize>, b: &Vec<usize>| a.iter().any(|&u| b.contains(&u) || g.neighbors(u).iter().any(|w| b.contains(w)));
    sets.iter().all(|s| g.is_connected_set(s)) && sets.iter().enumerate().all(|(i, a)| sets[i + 1..].iter().all(|b| touching(a, b)))
}

pub fn verify_lower(g: &Graph, cert: &LowerCertificate) -> Option<usize> {
    match cert {
        LowerCertificate::GridSubgraph { rows } => {
            let n = rows.len();
            let flat: BTreeSet<usize> = rows.iter().flatten().copied().collect();
            if flat.len() != n * n || rows.iter().any(|r| r.len() != n) {
                return None;
            }
            for r in 0..n {
                for c in 0..n {
                    if c + 1 < n && !g.has_edge(rows[r][c], rows[r][c + 1]) {
                        return None;
                    }
                    if r + 1 < n && !g.has_edge(rows[r][c], rows[r + 1][c]) {
                        return None;
                    }
                }
            }
            Some(n)
        }
        LowerCertificate::GridMinor { order, model } => {
            crate::minor::verify_minor_model(g, &grid_graph(*order), model).then_some(*order)
        }
        LowerCertificate::Bramble { sets, order } => {
            (verify_bramble(g, sets) && bramble_order(sets, *order) == *order).then(|| order.saturating_sub(1))
        }
    }
}

fn grid_graph(n: usize) -> Graph {
    let mut e = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n {
                e.push((r * n + c, r * n + c + 1));
            }
            if r + 1 < n {
                e.push((r * n + c, (r + 1) * n + c));
            }
        }
    }
    Graph::new(n * n, &e).expect("grid")
}

/// Searches for the n×n grid as a subgraph, filling row by row.
pub fn find_grid_subgraph(g: &Graph, n: usize) -> Option<Vec<Vec<usize>>> {
    if n == 0 || g.n() < n * n {
        return None;
    }
    let need = |r: usize, c: usize| -> usize {
        [r > 0, r + 1 < n, c > 0, c + 1 < n].iter().filter(|&&b| b).count()
    };
    let mut img = vec![usize::MAX; n * n];
    let mut used = vec![false; g.n()];
    fn rec(g: &Graph, n: usize, i: usize, img: &mut Vec<usize>, used: &mut Vec<bool>, need: &dyn Fn(usize, usize) -> usize) -> bool {
        if i == n * n {
            return true;
        }
        let (r, c) = (i / n, i % n);
        let candidates: Vec<usize> = if c > 0 {
            g.neighbors(img[i - 1]).to_vec()
        } else if r > 0 {
            g.neighbors(img[i - n]).to_vec()
        } else {
            (0..g.n()).collect()
        };
        for v in candidates {
            if used[v] || g.degree(v) < need(r, c) {
                continue;
            }
            if r > 0 && !g.has_edge(v, img[i - n]) {
                continue;
            }
            used[v] = true;
            img[i] = v;
            if rec(g, n, i + 1, img, used, need) {
                return true;
            }
            used[v] = false;
        }
        false
    }
    if rec(g, n, 0, &mut img, &mut used, &need) {
        Some((0..n).map(|r| img[r * n..(r + 1) * n].to_vec()).collect())
    } else {
        None
    }
}

/// Looks for a bramble of order `target` among connected sets of at most three vertices.
pub fn find_bramble(g: &Graph, target: usize) -> Option<Vec<Vec<usize>>> {
    let mut cands: Vec<Vec<usize>> = (0..g.n()).map(|v| vec![v]).collect();
    for (u, v) in g.edges() {
        cands.push(vec![u, v]);
    }
    for v in 0..g.n() {
        let ns = g.neighbors(v);
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                let mut s = vec![v, ns[i], ns[j]];
                s.sort_unstable();
                cands.push(s);
            }
        }
    }
    cands.sort();
    cands.dedup();
    if cands.len() > 600 {
        return None;
    }
    let m = cands.len();
    let touch = |a: &Vec<usize>, b: &Vec<usize>| a.iter().any(|&u| b.contains(&u) || g.neighbors(u).iter().any(|w| b.contains(w)));
    let mut adj = vec![vec![false; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let t = touch(&cands[i], &cands[j]);
            adj[i][j] = t;
            adj[j][i] = t;
        }
    }
    // maximal cliques of the touching relation, Bron–Kerbosch with pivoting
    let mut found = None;
    let mut budget = 20_000usize;
    fn bk(
        r: &mut Vec<usize>,
        p: Vec<usize>,
        x: Vec<usize>,
        adj: &[Vec<bool>],
        cands: &[Vec<usize>],
        target: usize,
        budget: &mut usize,
        found: &mut Option<Vec<Vec<usize>>>,
    ) {
        if found.is_some() || *budget == 0 {
            return;
        }
        *budget -= 1;
        if p.is_empty() && x.is_empty() {
            let sets: Vec<Vec<usize>> = r.iter().map(|&i| cands[i].clone()).collect();
            if bramble_order(&sets, target) >= target {
                *found = Some(sets);
            }
            return;
        }
        let pivot = p.iter().chain(&x).copied().max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count()).unwrap();
        let mut p = p;
        let mut x = x;
        let branch: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in branch {
            let np: Vec<usize> = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx: Vec<usize> = x.iter().copied().filter(|&w| adj[v][w]).collect();
            r.push(v);
            bk(r, np, nx, adj, cands, target, budget, found);
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    bk(&mut Vec::new(), (0..m).collect(), Vec::new(), &adj, &cands, target, &mut budget, &mut found);
    found.map(|sets| minimize_bramble(sets, target))
}

/// Drops elements while the order stays at `target`, for a smaller certificate.
fn minimize_bramble(mut sets: Vec<Vec<usize>>, target: usize) -> Vec<Vec<usize>> {
    let mut i = 0;
    while i < sets.len() {
        let removed = sets.remove(i);
        if bramble_order(&sets, target) < target {
            sets.insert(i, removed);
            i += 1;
        }
    }
    sets
}

/// Certificates pinning tw(g) = n: a lower-bound witness and a width-n decomposition.
pub fn treewidth_certificates(g: &Graph, n: usize) -> Result<Certificates> {
    treewidth_certificates_with_hint(g, n, None)
}

pub fn treewidth_certificates_with_hint(g: &Graph, n: usize, hint: Option<&TreeDecomposition>) -> Result<Certificates> {
    let lower = if let Some(rows) = find_grid_subgraph(g, n) {
        LowerCertificate::GridSubgraph { rows }
    } else if let Some(sets) = find_bramble(g, n + 1) {
        LowerCertificate::Bramble { order: bramble_order(&sets, n + 1), sets }
    } else if n * n <= crate::minor::DEFAULT_PATTERN_CAP && g.n() <= 64 {
        match find_minor(g, &grid_graph(n))? {
            Some(model) => LowerCertificate::GridMinor { order: n, model },
            None => return Err(Error::CertificateNotFound(format!("no lower-bound witness for treewidth {n}"))),
        }
    } else {
        return Err(Error::CertificateNotFound(format!("no lower-bound witness for treewidth {n}")));
    };
    let mut candidates: Vec<TreeDecomposition> = Vec::new();
    if let Some(h) = hint {
        candidates.push(h.clone());
    }
    candidates.push(min_fill_decomposition(g));
    candidates.push(min_degree_decomposition(g));
    candidates.push(sweep_path_decomposition(g));
    let upper = candidates
        .into_iter()
        .find(|td| validate_td(g, td).valid && td.width() <= n)
        .or_else(|| match exact_treewidth(g, n) {
            Ok(Treewidth::Exact { td, .. }) => Some(td),
            _ => None,
        })
        .ok_or_else(|| Error::CertificateNotFound(format!("no decomposition of width {n}")))?;
    Ok(Certificates { lower, upper })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceNode {
    pub bag: Vec<usize>,
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

/// Rooted nice decomposition; leaves and the root have empty bags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceTd {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

impl NiceTd {
    pub fn to_td(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let mut tree_edges = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                tree_edges.push((i, c));
            }
        }
        TreeDecomposition { bags, tree_edges }
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(1).saturating_sub(1)
    }

    /// Children before parents.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((x, done)) = stack.pop() {
            if done {
                out.push(x);
            } else {
                stack.push((x, true));
                for &c in &self.nodes[x].children {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn is_nice(&self) -> bool {
        self.nodes.iter().all(|n| match n.kind {
            NodeKind::Leaf => n.children.is_empty() && n.bag.is_empty(),
            NodeKind::Introduce(v) => {
                n.children.len() == 1 && {
                    let c = &self.nodes[n.children[0]].bag;
                    n.bag.contains(&v) && !c.contains(&v) && c.len() + 1 == n.bag.len() && c.iter().all(|x| n.bag.contains(x))
                }
            }
            NodeKind::Forget(v) => {
                n.children.len() == 1 && {
                    let c = &self.nodes[n.children[0]].bag;
                    !n.bag.contains(&v) && c.contains(&v) && n.bag.len() + 1 == c.len() && n.bag.iter().all(|x| c.contains(x))
                }
            }
            NodeKind::Join => n.children.len() == 2 && n.children.iter().all(|&c| self.nodes[c].bag == n.bag),
        })
    }
}

pub fn nice_form(td: &TreeDecomposition) -> Result<NiceTd> {
    let adj = td.tree_adjacency()?;
    let mut nodes: Vec<NiceNode> = Vec::new();
    let mut sorted_bags: Vec<Vec<usize>> = td.bags.clone();
    for b in &mut sorted_bags {
        b.sort_unstable();
        b.dedup();
    }
    // iterative post-order over the original tree rooted at bag 0
    let t = td.bags.len();
    if t == 0 {
        nodes.push(NiceNode { bag: Vec::new(), kind: NodeKind::Leaf, children: Vec::new() });
        return Ok(NiceTd { nodes, root: 0 });
    }
    let mut parent = vec![usize::MAX; t];
    let mut order = Vec::with_capacity(t);
    let mut stack = vec![0usize];
    let mut seen = vec![false; t];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut top = vec![usize::MAX; t];
    fn push(nodes: &mut Vec<NiceNode>, bag: Vec<usize>, kind: NodeKind, children: Vec<usize>) -> usize {
        nodes.push(NiceNode { bag, kind, children });
        nodes.len() - 1
    }
    // converts the chain ending at `node` with bag `from` into one ending with bag `to`
    fn transition(nodes: &mut Vec<NiceNode>, mut node: usize, from: &[usize], to: &[usize]) -> usize {
        let mut bag: Vec<usize> = from.to_vec();
        for &v in from {
            if !to.contains(&v) {
                bag.retain(|&x| x != v);
                node = push(nodes, bag.clone(), NodeKind::Forget(v), vec![node]);
            }
        }
        for &v in to {
            if !bag.contains(&v) {
                bag.push(v);
                bag.sort_unstable();
                node = push(nodes, bag.clone(), NodeKind::Introduce(v), vec![node]);
            }
        }
        node
    }
    for &x in order.iter().rev() {
        let bag = &sorted_bags[x];
        let children: Vec<usize> = adj[x].iter().copied().filter(|&y| parent[y] == x && y != parent[x]).collect();
        let mut subs: Vec<usize> = children.iter().map(|&c| transition(&mut nodes, top[c], &sorted_bags[c], bag)).collect();
        if subs.is_empty() {
            let leaf = push(&mut nodes, Vec::new(), NodeKind::Leaf, Vec::new());
            subs.push(transition(&mut nodes, leaf, &[], bag));
        }
        let mut cur = subs[0];
        for &s in &subs[1..] {
            cur = push(&mut nodes, bag.clone(), NodeKind::Join, vec![cur, s]);
        }
        top[x] = cur;
    }
    let root = transition(&mut nodes, top[0], &sorted_bags[0], &[]);
    Ok(NiceTd { nodes, root })
}

pub fn to_td_format(td: &TreeDecomposition, n: usize) -> String {
    let mut s = String::new();
    writeln!(s, "s td {} {} {}", td.bags.len(), td.width() + 1, n).unwrap();
    for (i, bag) in td.bags.iter().enumerate() {
        write!(s, "b {}", i + 1).unwrap();
        for v in bag {
            write!(s, " {}", v + 1).unwrap();
        }
        s.push('\n');
    }
    for &(a, b) in &td.tree_edges {
        writeln!(s, "{} {}", a + 1, b + 1).unwrap();
    }
    s
}

pub fn parse_td_format(text: &str) -> Result<(TreeDecomposition, usize)> {
    let mut bags: Vec<Vec<usize>> = Vec::new();
    let mut edges = Vec::new();
    let mut n = None;
    let num = |t: &str, line: usize| t.parse::<usize>().map_err(|e| Error::Parse { line, msg: e.to_string() });
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first() {
            None | Some(&"c") => continue,
            Some(&"s") => {
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(Error::Parse { line, msg: "bad header".into() });
                }
                bags = vec![Vec::new(); num(toks[2], line)?];
                n = Some(num(toks[4], line)?);
            }
            Some(&"b") => {
                let id = num(toks.get(1).ok_or(Error::Parse { line, msg: "missing bag id".into() })?, line)?;
                if id == 0 || id > bags.len() {
                    return Err(Error::Parse { line, msg: format!("bag id {id} out of range") });
                }
                bags[id - 1] = toks[2..].iter().map(|t| num(t, line).map(|v| v - 1)).collect::<Result<_>>()?;
            }
            Some(_) => {
                if toks.len() != 2 {
                    return Err(Error::Parse { line, msg: "expected tree edge".into() });
                }
                edges.push((num(toks[0], line)? - 1, num(toks[1], line)? - 1));
            }
        }
    }
    let n = n.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
    Ok((TreeDecomposition { bags, tree_edges: edges }, n))
}
