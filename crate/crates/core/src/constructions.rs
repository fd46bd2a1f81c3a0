//! Generators for grids, walls, cylindrical meshes, railed annuli, the
//! vital-linkage graphs Γ̂_k, the graphs Z_s, 5-regular gadget families, H_k
//! and the decorated Γ̂_k.

use std::collections::{BTreeMap, HashSet};
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canon::{graph_code, CanonicalCode};
use crate::decomposition::{path_decomposition_from_order, TreeDecomposition};
use crate::embedding::{cylindrical_mesh_plane, mesh_rail, mesh_railed_annulus, mesh_ring, PlaneGraph, RailedAnnulus};
use crate::error::{Error, Result};
use crate::graph::{blocks, AnnotatedGraph, Graph};
use crate::linkage::{disjoint_paths, vital_report, Linkage, Pattern, DFS_NODE_BUDGET};
use crate::minor::{verify_minor_model, MinorModel};

/// Largest vertex count for exhaustive gadget generation.
pub const GADGET_MAX_N: usize = 10;

/// The `(n x m)`-grid, row-major with row 0 on top.
pub fn grid(n: usize, m: usize) -> Result<Graph> {
    if n == 0 || m == 0 {
        return Err(Error::ParameterTooSmall(format!("grid needs n, m >= 1, got {n}, {m}")));
    }
    let mut e = Vec::new();
    for r in 0..n {
        for c in 0..m {
            if c + 1 < m {
                e.push((r * m + c, r * m + c + 1));
            }
            if r + 1 < n {
                e.push((r * m + c, (r + 1) * m + c));
            }
        }
    }
    Graph::new(n * m, &e)
}

#[derive(Clone, Debug, Serialize)]
pub struct WallSpec {
    pub n: usize,
    pub graph: Graph,
    /// Vertices on the outer boundary of the underlying grid.
    pub perimeter: Vec<usize>,
    /// Layer of each vertex, 0 on the perimeter.
    pub layer: Vec<usize>,
}

/// The elementary n-wall: the `(n x 2n)`-grid with alternate rungs removed.
pub fn wall(n: usize) -> Result<WallSpec> {
    if n == 0 {
        return Err(Error::ParameterTooSmall("wall needs n >= 1".into()));
    }
    let (rows, cols) = (n, 2 * n);
    let id = |r: usize, c: usize| r * cols + c;
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                e.push((id(r, c), id(r, c + 1)));
            }
            // 1-based (i, j): drop i odd & j even, i even & j odd
            if r + 1 < rows && (r + c) % 2 == 0 {
                e.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let mut graph = Graph::new(rows * cols, &e)?;
    let mut perimeter = Vec::new();
    let mut layer = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let l = r.min(rows - 1 - r).min(c / 2).min((cols - 1 - c) / 2);
            if l == 0 {
                perimeter.push(id(r, c));
            }
            layer.push(l);
            graph.set_label(id(r, c), format!("w{}_{}", r + 1, c + 1));
        }
    }
    Ok(WallSpec { n, graph, perimeter, layer })
}

#[derive(Clone, Debug)]
pub struct CylindricalMesh {
    pub graph: Graph,
    pub plane: PlaneGraph,
    /// Innermost first.
    pub cycles: Vec<Vec<usize>>,
    /// Each from the innermost cycle outwards.
    pub rails: Vec<Vec<usize>>,
}

/// The `(n x m)`-cylindrical mesh: `n` rails and `m` concentric cycles.
pub fn cylindrical_mesh(n: usize, m: usize) -> Result<CylindricalMesh> {
    if n < 3 || m < 1 {
        return Err(Error::ParameterTooSmall(format!("cylindrical mesh needs n >= 3 rails and m >= 1 cycles, got {n}, {m}")));
    }
    let plane = cylindrical_mesh_plane(m, n)?;
    let cycles = (0..m).map(|r| mesh_ring(n, r)).collect();
    let rails = (0..n)
        .map(|j| {
            let mut p = mesh_rail(n, m - 1, j);
            p.reverse();
            p
        })
        .collect();
    Ok(CylindricalMesh { graph: plane.graph.clone(), plane, cycles, rails })
}

pub fn railed_annulus(w: usize, r: usize) -> Result<RailedAnnulus> {
    mesh_railed_annulus(w, r)
}

#[derive(Clone, Debug)]
pub struct GammaInstance {
    pub k: usize,
    /// Side length `2^k - 1` of the core grid.
    pub m: usize,
    pub graph: Graph,
    pub plane: PlaneGraph,
    pub pattern: Pattern,
    pub terminals: Vec<usize>,
    pub witness: Linkage,
    /// Whether the witness was proven vital at construction time.
    pub vitality_checked: bool,
}

impl GammaInstance {
    /// Left column vertex `v_i`, 1-based.
    pub fn v(&self, i: usize) -> usize {
        (i - 1) * self.m
    }

    /// Right column vertex `u_i`, 1-based.
    pub fn u(&self, i: usize) -> usize {
        (i - 1) * self.m + self.m - 1
    }

    /// Column-by-column sweep; its width is `m`.
    pub fn sweep_decomposition(&self) -> TreeDecomposition {
        let m = self.m;
        let order: Vec<usize> = (0..m).flat_map(|c| (0..m).map(move |r| r * m + c)).collect();
        path_decomposition_from_order(&self.graph, &order)
    }

    pub fn annotated(&self) -> AnnotatedGraph {
        AnnotatedGraph::new(self.graph.clone(), &self.terminals).expect("terminals are in range")
    }
}

/// Chords of Γ̂_k as 1-based index pairs: right-side `(u_i, u_{m-i+1})` and
/// left-side `E_i`, clipped to the grid and with loops and repeats dropped.
fn gamma_chords(k: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let m = (1usize << k) - 1;
    let m_prev = (1usize << (k - 1)) - 1;
    let right: Vec<(usize, usize)> = (1..=m_prev).map(|i| (i, m - i + 1)).collect();
    let mut left = Vec::new();
    let mut seen = HashSet::new();
    for i in 2..=k {
        for j in 1..(1usize << i) {
            let (a, b) = ((1usize << i) + j, (1usize << (i + 1)) - j);
            if a == b || a > m || b > m || a < 1 || b < 1 {
                continue;
            }
            if seen.insert((a.min(b), a.max(b))) {
                left.push((a.min(b), a.max(b)));
            }
        }
    }
    (right, left)
}

/// Γ̂_k with its pattern τ_k and a witness linkage. For `k <= 3` the witness is
/// checked for vitality before returning.
pub fn gamma_hat(k: usize) -> Result<GammaInstance> {
    gamma_hat_opts(k, k <= 3)
}

pub fn gamma_hat_opts(k: usize, check_vitality: bool) -> Result<GammaInstance> {
    if k < 2 {
        return Err(Error::ParameterTooSmall(format!("Γ̂_k needs k >= 2, got {k}")));
    }
    if k > 6 {
        return Err(Error::ParameterTooSmall(format!("Γ̂_k is capped at k = 6, got {k}")));
    }
    let m = (1usize << k) - 1;
    let base = grid(m, m)?;
    let v = |i: usize| (i - 1) * m;
    let u = |i: usize| (i - 1) * m + m - 1;
    let (right, left) = gamma_chords(k);
    let mut extra: Vec<(usize, usize)> = right.iter().map(|&(a, b)| (u(a), u(b))).collect();
    extra.extend(left.iter().map(|&(a, b)| (v(a), v(b))));
    let mut graph = base.with_edges(&extra)?;
    for r in 0..m {
        for c in 0..m {
            let name = if c == 0 {
                format!("v{}", r + 1)
            } else if c == m - 1 {
                format!("u{}", r + 1)
            } else {
                format!("g{}_{}", r + 1, c + 1)
            };
            graph.set_label(r * m + c, name);
        }
    }
    // rotation: right, up, left, down; a chord takes the free side slot
    let right_partner: BTreeMap<usize, usize> = right.iter().flat_map(|&(a, b)| [(u(a), u(b)), (u(b), u(a))]).collect();
    let left_partner: BTreeMap<usize, usize> = left.iter().flat_map(|&(a, b)| [(v(a), v(b)), (v(b), v(a))]).collect();
    let mut rotation = Vec::with_capacity(m * m);
    for r in 0..m {
        for c in 0..m {
            let x = r * m + c;
            let mut rot = Vec::new();
            if c + 1 < m {
                rot.push(x + 1);
            } else if let Some(&p) = right_partner.get(&x) {
                rot.push(p);
            }
            if r > 0 {
                rot.push(x - m);
            }
            if c > 0 {
                rot.push(x - 1);
            } else if let Some(&p) = left_partner.get(&x) {
                rot.push(p);
            }
            if r + 1 < m {
                rot.push(x + m);
            }
            rotation.push(rot);
        }
    }
    let plane = PlaneGraph::new(graph.clone(), rotation, (0, 1))?;
    let mut pairs = Vec::new();
    for i in 1..=k {
        let s = v(1 << (i - 1));
        let t = if i < k { v(3 << (i - 1)) } else { u(1 << (k - 1)) };
        pairs.push((s, t));
    }
    let pattern = Pattern::new(&pairs);
    let terminals = pattern.terminals();
    let witness = gamma_witness(k, m, &right, &left)?;
    let inst = GammaInstance { k, m, graph, plane, pattern, terminals, witness, vitality_checked: check_vitality };
    if check_vitality {
        let rep = vital_report(&inst.graph, &inst.witness, DFS_NODE_BUDGET)?;
        if !rep.vital {
            return Err(Error::VitalityValidationFailed(format!(
                "k = {k}: witness spans = {}, linkage count = {}",
                rep.spans, rep.count
            )));
        }
    }
    Ok(inst)
}

/// Each non-final pair sweeps a row rightwards, jumps along a right chord,
/// sweeps back leftwards, and continues along a left chord until it reaches
/// its second terminal. The last pair is the middle row.
fn gamma_witness(k: usize, m: usize, right: &[(usize, usize)], left: &[(usize, usize)]) -> Result<Linkage> {
    let rp: BTreeMap<usize, usize> = right.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    let lp: BTreeMap<usize, usize> = left.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    let row = |r: usize, forward: bool| -> Vec<usize> {
        let cols: Vec<usize> = if forward { (0..m).collect() } else { (0..m).rev().collect() };
        cols.into_iter().map(|c| (r - 1) * m + c).collect()
    };
    let mut paths = Vec::new();
    for i in 1..=k {
        if i == k {
            paths.push(row(1 << (k - 1), true));
            continue;
        }
        let target = 3usize << (i - 1);
        let mut r = 1usize << (i - 1);
        let mut p = Vec::new();
        for _ in 0..m {
            p.extend(row(r, true));
            let r2 = *rp.get(&r).ok_or_else(|| Error::VitalityValidationFailed(format!("row {r} has no right chord")))?;
            p.extend(row(r2, false));
            if r2 == target {
                break;
            }
            r = *lp.get(&r2).ok_or_else(|| Error::VitalityValidationFailed(format!("row {r2} has no left chord")))?;
        }
        if *p.last().unwrap() != (target - 1) * m {
            return Err(Error::VitalityValidationFailed(format!("pair {i} does not reach its terminal")));
        }
        paths.push(p);
    }
    Ok(Linkage::new(paths))
}

/// `Z_s` with its red set `A_s`. The top row has `s(2s+1)` vertices.
pub fn z_graph(s: usize) -> Result<AnnotatedGraph> {
    if s == 0 {
        return Err(Error::ParameterTooSmall("Z_s needs s >= 1".into()));
    }
    let cols = s * (2 * s + 1);
    let base = grid(s, cols)?;
    let x = |i: usize| i - 1;
    let mut extra = Vec::new();
    for i in 1..=s {
        for j in 1..=s {
            extra.push((x((2 * s + 1) * (i - 1) + j), x((2 * s + 1) * i - j + 1)));
        }
    }
    let mut g = base.with_edges(&extra)?;
    for i in 1..=cols {
        g.set_label(x(i), format!("x{i}"));
    }
    let a: Vec<usize> = (1..=s).map(|i| x((2 * s + 1) * (i - 1) + s + 1)).collect();
    AnnotatedGraph::new(g, &a)
}

#[derive(Clone, Debug, Serialize)]
pub struct GadgetFamily {
    pub n: usize,
    pub members: Vec<Graph>,
    /// Connected 5-regular graphs on `n` vertices found in total.
    pub available: usize,
}

/// All `deg`-regular graphs on `n` vertices up to isomorphism, in canonical-code order.
///
/// Edges are added one at a time, always to the lowest vertex still short of
/// its degree, and every level is deduplicated by canonical code.
pub fn regular_graphs(n: usize, deg: usize) -> Result<Vec<Graph>> {
    if n > GADGET_MAX_N + 2 {
        return Err(Error::GenerationCapExceeded(format!("regular graph generation capped at n = {}", GADGET_MAX_N + 2)));
    }
    if deg >= n || (n * deg) % 2 == 1 {
        return Ok(Vec::new());
    }
    if 2 * deg > n - 1 {
        // generate complements, which have fewer edges
        let co = regular_graphs(n, n - 1 - deg)?;
        let mut out: Vec<(CanonicalCode, Graph)> = co.iter().map(complement).map(|g| (graph_code(&g).unwrap(), g)).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        return Ok(out.into_iter().map(|(_, g)| g).collect());
    }
    let target = n * deg / 2;
    let mut level: BTreeMap<CanonicalCode, Vec<(usize, usize)>> = BTreeMap::new();
    level.insert(graph_code(&Graph::empty(n))?, Vec::new());
    for _ in 0..target {
        let mut next: BTreeMap<CanonicalCode, Vec<(usize, usize)>> = BTreeMap::new();
        for edges in level.values() {
            let g = Graph::new(n, edges)?;
            let Some(v) = (0..n).find(|&v| g.degree(v) < deg) else { continue };
            for w in 0..n {
                if w == v || g.degree(w) >= deg || g.has_edge(v, w) {
                    continue;
                }
                let mut e2 = edges.clone();
                e2.push((v.min(w), v.max(w)));
                let h = Graph::new(n, &e2)?;
                if !completable(&h, deg) {
                    continue;
                }
                let code = graph_code(&h)?;
                next.entry(code).or_insert(e2);
            }
        }
        level = next;
    }
    Ok(level.into_values().map(|e| Graph::new(n, &e).unwrap()).collect())
}

/// Cheap necessary condition: every short vertex has enough short non-neighbours.
fn completable(g: &Graph, deg: usize) -> bool {
    let short: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) < deg).collect();
    short.iter().all(|&v| short.iter().filter(|&&w| w != v && !g.has_edge(v, w)).count() >= deg - g.degree(v))
}

pub fn complement(g: &Graph) -> Graph {
    let mut e = Vec::new();
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if !g.has_edge(u, v) {
                e.push((u, v));
            }
        }
    }
    Graph::new(g.n(), &e).unwrap()
}

fn connected_quintic(n: usize) -> Result<Vec<Graph>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Vec<Graph>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&n) {
        return Ok(v.clone());
    }
    let all: Vec<Graph> = regular_graphs(n, 5)?.into_iter().filter(|g| g.is_connected()).collect();
    cache.lock().unwrap().insert(n, all.clone());
    Ok(all)
}

/// `k` pairwise non-isomorphic connected 5-regular graphs on the smallest even
/// vertex count that has that many, in canonical-code order.
pub fn regular_gadgets(k: usize) -> Result<GadgetFamily> {
    if k == 0 {
        return Err(Error::ParameterTooSmall("gadget family needs k >= 1".into()));
    }
    for n in (6..=GADGET_MAX_N).step_by(2) {
        let all = connected_quintic(n)?;
        if all.len() >= k {
            return Ok(GadgetFamily { n, available: all.len(), members: all[..k].to_vec() });
        }
    }
    Err(Error::GenerationCapExceeded(format!("fewer than {k} connected 5-regular graphs on at most {GADGET_MAX_N} vertices")))
}

/// All connected 5-regular graphs on exactly `n` vertices.
pub fn regular_gadgets_on(n: usize) -> Result<GadgetFamily> {
    let all = connected_quintic(n)?;
    Ok(GadgetFamily { n, available: all.len(), members: all })
}

/// A gadget block: a copy of `a` plus two apex vertices joined to all of it.
/// Returns the edges, offset by `base`, with the apexes at `base` and `base + 1`.
fn gadget_block(a: &Graph, base: usize) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = a.edges().into_iter().map(|(x, y)| (base + 2 + x, base + 2 + y)).collect();
    for x in 0..a.n() {
        e.push((base, base + 2 + x));
        e.push((base + 1, base + 2 + x));
    }
    e
}

#[derive(Clone, Debug)]
pub struct HGraph {
    pub graph: Graph,
    /// `(s_i, t_i)` per pair.
    pub bridges: Vec<(usize, usize)>,
    /// Vertex sets of `G_i^s` and `G_i^t`, in that order per pair.
    pub blocks: Vec<Vec<usize>>,
}

/// H_k: for each pair two copies of the gadget block joined by the bridge `s_i t_i`.
pub fn h_graph(k: usize, fam: &GadgetFamily) -> Result<HGraph> {
    if fam.members.len() < k {
        return Err(Error::FamilyTooSmall { need: k, have: fam.members.len() });
    }
    let f = fam.n;
    let size = f + 2;
    let mut edges = Vec::new();
    let mut bridges = Vec::new();
    let mut blocks_v = Vec::new();
    let mut names = Vec::new();
    for i in 0..k {
        for side in 0..2 {
            let base = (2 * i + side) * size;
            edges.extend(gadget_block(&fam.members[i], base));
            blocks_v.push((base..base + size).collect::<Vec<_>>());
            let t = if side == 0 { 's' } else { 't' };
            names.push((base, format!("{t}{}", i + 1)));
            names.push((base + 1, format!("{t}{}'", i + 1)));
            for x in 0..f {
                names.push((base + 2 + x, format!("A{}{t}_{x}", i + 1)));
            }
        }
        let (s, t) = (2 * i * size, (2 * i + 1) * size);
        edges.push((s, t));
        bridges.push((s, t));
    }
    let mut graph = Graph::new(2 * k * size, &edges)?;
    for (v, name) in names {
        graph.set_label(v, name);
    }
    Ok(HGraph { graph, bridges, blocks: blocks_v })
}

#[derive(Clone, Debug)]
pub struct Decorated {
    pub graph: Graph,
    pub gamma: GammaInstance,
    /// Number of core vertices; core vertex ids match Γ̂_k.
    pub core_n: usize,
    /// Vertex sets of `G_i^s` and `G_i^t`, in that order per pair.
    pub blocks: Vec<Vec<usize>>,
}

/// Γ̂_k with a gadget block hung on every terminal. No edge `s_i t_i` is added.
pub fn decorate_gamma(k: usize, fam: &GadgetFamily) -> Result<Decorated> {
    let gamma = gamma_hat(k)?;
    decorate_instance(gamma, fam)
}

pub fn decorate_instance(gamma: GammaInstance, fam: &GadgetFamily) -> Result<Decorated> {
    let k = gamma.k;
    if fam.members.len() < k {
        return Err(Error::FamilyTooSmall { need: k, have: fam.members.len() });
    }
    let f = fam.n;
    let core_n = gamma.graph.n();
    let mut edges = gamma.graph.edges();
    let mut blocks_v = Vec::new();
    let mut names: Vec<(usize, String)> = gamma.graph.labels().iter().map(|(&v, s)| (v, s.clone())).collect();
    let mut next = core_n;
    for (i, &(s, t)) in gamma.pattern.pairs().iter().enumerate() {
        for (side, term) in [(0, s), (1, t)] {
            let tag = if side == 0 { 's' } else { 't' };
            // apex term is an existing core vertex; the second apex and the copy are new
            let prime = next;
            let copy: Vec<usize> = (next + 1..next + 1 + f).collect();
            for (x, y) in fam.members[i].edges() {
                edges.push((copy[x], copy[y]));
            }
            for &c in &copy {
                edges.push((term, c));
                edges.push((prime, c));
            }
            names.push((prime, format!("{tag}{}'", i + 1)));
            for (x, &c) in copy.iter().enumerate() {
                names.push((c, format!("A{}{tag}_{x}", i + 1)));
            }
            let mut b = vec![term, prime];
            b.extend(&copy);
            blocks_v.push(b);
            next += 1 + f;
        }
    }
    let mut graph = Graph::new(next, &edges)?;
    for (v, name) in names {
        graph.set_label(v, name);
    }
    Ok(Decorated { graph, gamma, core_n, blocks: blocks_v })
}

#[derive(Clone, Debug, Serialize)]
pub struct HkReport {
    pub minor_present: bool,
    pub per_vertex_absent: bool,
    /// Why H_k vanishes after deleting each vertex.
    pub reasons: Vec<(usize, String)>,
}

/// The explicit H_k model in the decoration: gadget blocks map to themselves
/// and the bridge `s_i t_i` becomes the witness path of pair `i`.
pub fn hk_model(dec: &Decorated, h: &HGraph) -> MinorModel {
    let mut branch = vec![Vec::new(); h.graph.n()];
    for (bi, hb) in h.blocks.iter().enumerate() {
        let db = &dec.blocks[bi];
        for (x, &hv) in hb.iter().enumerate() {
            branch[hv].push(db[x]);
        }
    }
    for (i, p) in dec.gamma.witness.paths.iter().enumerate() {
        let (s, t) = dec.gamma.pattern.pairs()[i];
        let hs = h.bridges[i].0;
        let from_s = if p[0] == s { p.clone() } else { p.iter().rev().copied().collect() };
        debug_assert_eq!(*from_s.last().unwrap(), t);
        branch[hs] = from_s[..from_s.len() - 1].to_vec();
    }
    MinorModel { branch_sets: branch }
}

/// Checks that H_k is a minor of the decorated Γ̂_k and disappears after any
/// single vertex deletion, by the block argument: non-planar blocks must be
/// matched by isomorphism, so a deleted gadget vertex breaks a match, and a
/// deleted core vertex leaves the core needing a τ_k linkage it does not have.
pub fn verify_hk_deletion(k: usize, fam: &GadgetFamily) -> Result<HkReport> {
    if k > 2 {
        return Err(Error::SearchCapExceeded(format!("deletion experiment is limited to k <= 2, got {k}")));
    }
    let dec = decorate_gamma(k, fam)?;
    let h = h_graph(k, fam)?;
    let model = hk_model(&dec, &h);
    let minor_present = verify_minor_model(&dec.graph, &h.graph, &model);
    let block_codes: Vec<CanonicalCode> = h.blocks.iter().map(|b| graph_code(&h.graph.induced(b).0)).collect::<Result<_>>()?;
    let mut need: BTreeMap<CanonicalCode, usize> = BTreeMap::new();
    for c in &block_codes {
        *need.entry(c.clone()).or_insert(0) += 1;
    }
    let size = fam.n + 2;
    let mut reasons = Vec::new();
    let mut all_absent = true;
    for v in 0..dec.graph.n() {
        let g = dec.graph.delete_vertex(v);
        // ids above v shift down by one
        let old = |x: usize| if x >= v { x + 1 } else { x };
        let bl = blocks(&g);
        let mut have: BTreeMap<CanonicalCode, usize> = BTreeMap::new();
        for b in &bl.blocks {
            // core blocks are planar, so only gadget-derived blocks can host gadget blocks
            if b.vertices.iter().all(|&x| old(x) < dec.core_n) || b.vertices.len() != size {
                continue;
            }
            let code = graph_code(&g.induced(&b.vertices).0)?;
            *have.entry(code).or_insert(0) += 1;
        }
        let matched = need.iter().all(|(c, &cnt)| have.get(c).copied().unwrap_or(0) >= cnt);
        if !matched {
            reasons.push((v, "a gadget block lost a vertex, so no block of the right size can host it".to_string()));
            continue;
        }
        if v >= dec.core_n || dec.gamma.terminals.contains(&v) {
            all_absent = false;
            reasons.push((v, "block matching unexpectedly survived".to_string()));
            continue;
        }
        let core = dec.gamma.graph.delete_vertex(v);
        let shift = |x: usize| if x > v { x - 1 } else { x };
        let pairs: Vec<(usize, usize)> = dec.gamma.pattern.pairs().iter().map(|&(a, b)| (shift(a), shift(b))).collect();
        let found = disjoint_paths(&core, &Pattern::new(&pairs))?;
        if found.is_some() {
            all_absent = false;
            reasons.push((v, "core still links τ_k".to_string()));
        } else {
            reasons.push((v, "core minus the vertex has no τ_k linkage".to_string()));
        }
    }
    Ok(HkReport { minor_present, per_vertex_absent: all_absent, reasons })
}

/// `G(n, p)` from a seeded ChaCha generator.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gnp_with(n, p, &mut rng)
}

pub fn gnp_with<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                e.push((u, v));
            }
        }
    }
    Graph::new(n, &e).unwrap()
}
