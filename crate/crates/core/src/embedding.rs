//! Plane graphs given by rotation systems, concentric cycles, wells, routing
//! on discs and cylinders, and curve systems.
//!
//! All topology is combinatorial: discs and sides are sets of faces found by
//! face traversal, never coordinates.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{menger, Graph, MengerResult};
use crate::linkage::{Linkage, Pattern};

fn ekey(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// A graph with a cyclic order of neighbours at every vertex and a dart on the outer face.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlaneGraph {
    pub graph: Graph,
    rotation: Vec<Vec<usize>>,
    outer: (usize, usize),
    #[serde(skip)]
    faces: Vec<Vec<(usize, usize)>>,
    #[serde(skip)]
    dart_face: HashMap<(usize, usize), usize>,
}

impl PlaneGraph {
    pub fn new(graph: Graph, rotation: Vec<Vec<usize>>, outer: (usize, usize)) -> Result<PlaneGraph> {
        if rotation.len() != graph.n() {
            return Err(Error::InvalidEmbedding("rotation length differs from vertex count".into()));
        }
        for (v, rot) in rotation.iter().enumerate() {
            let mut a = rot.clone();
            a.sort_unstable();
            if a != graph.neighbors(v) {
                return Err(Error::InvalidEmbedding(format!("rotation at {v} is not a permutation of its neighbours")));
            }
        }
        if graph.m() > 0 && !graph.has_edge(outer.0, outer.1) {
            return Err(Error::InvalidEmbedding("outer dart is not an edge".into()));
        }
        let mut pg = PlaneGraph { graph, rotation, outer, faces: Vec::new(), dart_face: HashMap::new() };
        pg.trace_faces();
        let n_active = (0..pg.graph.n()).filter(|&v| pg.graph.degree(v) > 0).count();
        let comps = pg.graph.components().iter().filter(|c| c.len() > 1).count();
        if n_active as i64 - pg.graph.m() as i64 + pg.faces.len() as i64 != 1 + comps as i64 {
            return Err(Error::InvalidEmbedding(format!(
                "Euler check failed: V={n_active} E={} F={} components={comps}",
                pg.graph.m(),
                pg.faces.len()
            )));
        }
        Ok(pg)
    }

    fn trace_faces(&mut self) {
        let mut faces = Vec::new();
        let mut dart_face = HashMap::new();
        for u in 0..self.graph.n() {
            for &v in &self.rotation[u] {
                if dart_face.contains_key(&(u, v)) {
                    continue;
                }
                let id = faces.len();
                let mut face = Vec::new();
                let (mut a, mut b) = (u, v);
                loop {
                    dart_face.insert((a, b), id);
                    face.push((a, b));
                    let (na, nb) = self.next_dart(a, b);
                    a = na;
                    b = nb;
                    if (a, b) == (u, v) {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        self.faces = faces;
        self.dart_face = dart_face;
    }

    /// The dart after `u -> v` on its face: `v -> w` with `w` preceding `u` around `v`.
    fn next_dart(&self, u: usize, v: usize) -> (usize, usize) {
        let rot = &self.rotation[v];
        let i = rot.iter().position(|&x| x == u).unwrap();
        (v, rot[(i + rot.len() - 1) % rot.len()])
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn faces(&self) -> &[Vec<(usize, usize)>] {
        &self.faces
    }

    pub fn face_of(&self, u: usize, v: usize) -> usize {
        self.dart_face[&(u, v)]
    }

    pub fn outer_face(&self) -> usize {
        self.face_of(self.outer.0, self.outer.1)
    }

    /// Restores derived face data, e.g. after deserialization.
    pub fn refresh(&mut self) {
        self.trace_faces();
    }

    /// Component id per face, where faces meet across edges outside `barrier`.
    pub fn face_regions(&self, barrier: &HashSet<(usize, usize)>) -> Vec<usize> {
        let nf = self.faces.len();
        let mut parent: Vec<usize> = (0..nf).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        for (u, v) in self.graph.edges() {
            if barrier.contains(&(u, v)) {
                continue;
            }
            let (a, b) = (find(&mut parent, self.face_of(u, v)), find(&mut parent, self.face_of(v, u)));
            if a != b {
                parent[a] = b;
            }
        }
        (0..nf).map(|f| find(&mut parent, f)).collect()
    }

    /// Faces enclosed by a closed walk of edges, i.e. not in the outer face's region.
    pub fn cycle_interior(&self, cycle: &[usize]) -> Vec<bool> {
        let barrier = cycle_edges(cycle);
        let reg = self.face_regions(&barrier);
        let out = reg[self.outer_face()];
        reg.iter().map(|&r| r != out).collect()
    }

    pub fn vertex_faces(&self, v: usize) -> Vec<usize> {
        self.rotation[v].iter().map(|&w| self.face_of(v, w)).collect()
    }

    /// Vertices off the cycle that lie strictly inside it.
    pub fn strict_interior_vertices(&self, cycle: &[usize]) -> Vec<bool> {
        let inside = self.cycle_interior(cycle);
        let on: HashSet<usize> = cycle.iter().copied().collect();
        (0..self.graph.n()).map(|v| !on.contains(&v) && self.vertex_faces(v).iter().any(|&f| inside[f])).collect()
    }

    /// Edge list followed by `rot v ...` lines and an `outer u v` line.
    pub fn to_text(&self) -> String {
        let mut s = crate::graph::to_edge_list(&self.graph);
        for (v, rot) in self.rotation.iter().enumerate() {
            write!(s, "rot {v}").unwrap();
            for w in rot {
                write!(s, " {w}").unwrap();
            }
            s.push('\n');
        }
        writeln!(s, "outer {} {}", self.outer.0, self.outer.1).unwrap();
        s
    }

    pub fn parse(text: &str) -> Result<PlaneGraph> {
        let mut graph_lines = String::new();
        let mut rot: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut outer = None;
        for (i, line) in text.lines().enumerate() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |t: &str| t.parse::<usize>().map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() });
            match toks.first() {
                Some(&"rot") => {
                    let v = num(toks.get(1).ok_or(Error::Parse { line: i + 1, msg: "missing vertex".into() })?)?;
                    let ws = toks[2..].iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?;
                    rot.push((v, ws));
                }
                Some(&"outer") if toks.len() == 3 => outer = Some((num(toks[1])?, num(toks[2])?)),
                _ => {
                    graph_lines.push_str(line);
                    graph_lines.push('\n');
                }
            }
        }
        let graph = crate::graph::parse_edge_list(&graph_lines)?;
        let mut rotation = vec![Vec::new(); graph.n()];
        for (v, ws) in rot {
            if v >= graph.n() {
                return Err(Error::IndexOutOfRange { vertex: v, n: graph.n() });
            }
            rotation[v] = ws;
        }
        let outer = outer.unwrap_or_else(|| graph.edges().first().copied().unwrap_or((0, 0)));
        PlaneGraph::new(graph, rotation, outer)
    }
}

fn cycle_edges(cycle: &[usize]) -> HashSet<(usize, usize)> {
    (0..cycle.len()).map(|i| ekey(cycle[i], cycle[(i + 1) % cycle.len()])).collect()
}

fn path_edges(path: &[usize]) -> HashSet<(usize, usize)> {
    path.windows(2).map(|w| ekey(w[0], w[1])).collect()
}

fn is_cycle_in(g: &Graph, c: &[usize]) -> bool {
    let distinct: HashSet<usize> = c.iter().copied().collect();
    c.len() >= 3 && distinct.len() == c.len() && (0..c.len()).all(|i| g.has_edge(c[i], c[(i + 1) % c.len()]))
}

/// Cylindrical mesh with `rings` concentric cycles and `rails` radial paths.
/// Vertex `(r, j)` has index `r * rails + j`; ring 0 is innermost.
pub fn cylindrical_mesh_plane(rings: usize, rails: usize) -> Result<PlaneGraph> {
    if rings < 1 || rails < 3 {
        return Err(Error::ParameterTooSmall(format!("cylindrical mesh needs rings >= 1 and rails >= 3, got {rings}, {rails}")));
    }
    let id = |r: usize, j: usize| r * rails + j % rails;
    let mut edges = Vec::new();
    for r in 0..rings {
        for j in 0..rails {
            edges.push((id(r, j), id(r, j + 1)));
            if r + 1 < rings {
                edges.push((id(r, j), id(r + 1, j)));
            }
        }
    }
    let g = Graph::new(rings * rails, &edges)?;
    let mut rotation = Vec::with_capacity(rings * rails);
    for r in 0..rings {
        for j in 0..rails {
            let mut rot = Vec::new();
            if r + 1 < rings {
                rot.push(id(r + 1, j));
            }
            rot.push(id(r, j + 1));
            if r > 0 {
                rot.push(id(r - 1, j));
            }
            rot.push(id(r, j + rails - 1));
            rotation.push(rot);
        }
    }
    let top = rings - 1;
    let probe = PlaneGraph::new(g.clone(), rotation.clone(), (id(top, 0), id(top, 1)))?;
    let on_top = |f: usize| probe.faces()[f].iter().all(|&(a, b)| a / rails == top && b / rails == top);
    let outer = if rings == 1 || on_top(probe.face_of(id(top, 0), id(top, 1))) {
        (id(top, 0), id(top, 1))
    } else {
        (id(top, 1), id(top, 0))
    };
    debug_assert!(rings == 1 || on_top(probe.face_of(outer.0, outer.1)));
    PlaneGraph::new(g, rotation, outer)
}

pub fn mesh_ring(rails: usize, r: usize) -> Vec<usize> {
    (0..rails).map(|j| r * rails + j).collect()
}

/// Rail `j` from ring `top` down to ring 0.
pub fn mesh_rail(rails: usize, top: usize, j: usize) -> Vec<usize> {
    (0..=top).rev().map(|r| r * rails + j).collect()
}

/// Nested vertex-disjoint cycles, innermost first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentricCycles {
    pub plane: PlaneGraph,
    pub cycles: Vec<Vec<usize>>,
}

impl ConcentricCycles {
    pub fn new(plane: PlaneGraph, cycles: Vec<Vec<usize>>) -> Result<ConcentricCycles> {
        let cc = ConcentricCycles { plane, cycles };
        cc.validate()?;
        Ok(cc)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.plane.graph;
        let mut seen = HashSet::new();
        for c in &self.cycles {
            if !is_cycle_in(g, c) {
                return Err(Error::InvalidEmbedding(format!("{c:?} is not a cycle")));
            }
            for &v in c {
                if !seen.insert(v) {
                    return Err(Error::InvalidEmbedding(format!("cycles share vertex {v}")));
                }
            }
        }
        for i in 1..self.cycles.len() {
            let inner = self.plane.cycle_interior(&self.cycles[i - 1]);
            let outer = self.plane.cycle_interior(&self.cycles[i]);
            let subset = inner.iter().zip(&outer).all(|(&a, &b)| !a || b);
            let strict = inner.iter().zip(&outer).any(|(&a, &b)| !a && b);
            let inside = self.plane.strict_interior_vertices(&self.cycles[i]);
            if !subset || !strict || self.cycles[i - 1].iter().any(|&v| !inside[v]) {
                return Err(Error::InvalidEmbedding(format!("cycle {} is not nested inside cycle {}", i - 1, i)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Cycle `i` oriented so that the face to the right of each dart (in
    /// traversal order) lies inside it.
    pub fn oriented(&self, i: usize) -> Vec<usize> {
        let c = &self.cycles[i];
        let inside = self.plane.cycle_interior(c);
        if inside[self.plane.face_of(c[0], c[1])] {
            c.clone()
        } else {
            let mut r = c.clone();
            r.reverse();
            r
        }
    }

    /// Closed disc of cycle `i`: its vertices and everything strictly inside.
    fn closed_disc_vertices(&self, i: usize) -> Vec<bool> {
        let mut d = self.plane.strict_interior_vertices(&self.cycles[i]);
        for &v in &self.cycles[i] {
            d[v] = true;
        }
        d
    }

    /// A path with both ends on cycle `i`, not using its edges, lying in the
    /// band between cycle `i - 1` and cycle `i`. None means cycle `i` is tight.
    pub fn band_shortcut(&self, i: usize) -> Option<Vec<usize>> {
        let g = &self.plane.graph;
        let c = &self.cycles[i];
        let on: HashSet<usize> = c.iter().copied().collect();
        let inside_faces = self.plane.cycle_interior(c);
        let cedges = cycle_edges(c);
        for &a in c {
            for &b in g.neighbors(a) {
                if a < b && on.contains(&b) && !cedges.contains(&ekey(a, b)) && inside_faces[self.plane.face_of(a, b)] {
                    return Some(vec![a, b]);
                }
            }
        }
        let strict = self.plane.strict_interior_vertices(c);
        let lower = if i > 0 { self.closed_disc_vertices(i - 1) } else { vec![false; g.n()] };
        let band: Vec<bool> = (0..g.n()).map(|v| strict[v] && !lower[v]).collect();
        let blocked: Vec<bool> = band.iter().map(|&b| !b).collect();
        for comp in g.components_avoiding(&blocked) {
            let mut attach: Vec<(usize, usize)> = Vec::new();
            for &x in &comp {
                for &w in g.neighbors(x) {
                    if on.contains(&w) && !attach.iter().any(|&(_, a)| a == w) {
                        attach.push((x, w));
                    }
                }
            }
            if attach.len() >= 2 {
                let (x1, a) = attach[0];
                let (x2, b) = attach[1];
                let mut allowed = vec![false; g.n()];
                for &x in &comp {
                    allowed[x] = true;
                }
                let mid = g.shortest_path(x1, x2, &allowed).expect("component is connected");
                let mut p = vec![a];
                p.extend(mid);
                p.push(b);
                return Some(p);
            }
        }
        None
    }

    pub fn is_tight(&self) -> bool {
        (0..self.cycles.len()).all(|i| self.band_shortcut(i).is_none())
    }
}

/// Reroutes cycles through band shortcuts until the family is tight.
/// Every cycle stays inside its original disc.
pub fn tighten(cc: &ConcentricCycles) -> ConcentricCycles {
    let mut cc = cc.clone();
    loop {
        let mut changed = false;
        for i in 0..cc.cycles.len() {
            while let Some(q) = cc.band_shortcut(i) {
                let c = &cc.cycles[i];
                let (a, b) = (q[0], *q.last().unwrap());
                let ia = c.iter().position(|&x| x == a).unwrap();
                let ib = c.iter().position(|&x| x == b).unwrap();
                let arc = |from: usize, to: usize| -> Vec<usize> {
                    let mut out = vec![c[from]];
                    let mut j = from;
                    while j != to {
                        j = (j + 1) % c.len();
                        out.push(c[j]);
                    }
                    out
                };
                let inner_q: Vec<usize> = q[1..q.len() - 1].to_vec();
                let mut c1 = arc(ia, ib);
                c1.extend(inner_q.iter().rev());
                let mut c2 = arc(ib, ia);
                c2.extend(inner_q.iter());
                let size = |cy: &[usize]| cc.plane.cycle_interior(cy).iter().filter(|&&x| x).count();
                let pick = if i > 0 {
                    let keeps = |cy: &[usize]| {
                        let s = cc.plane.strict_interior_vertices(cy);
                        cc.cycles[i - 1].iter().all(|&v| s[v])
                    };
                    if keeps(&c1) {
                        c1
                    } else {
                        c2
                    }
                } else if size(&c1) >= size(&c2) {
                    c1
                } else {
                    c2
                };
                cc.cycles[i] = pick;
                changed = true;
            }
        }
        if !changed {
            return cc;
        }
    }
}

/// A well: concentric cycles inside a boundary cycle, and boundary-to-boundary paths.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Well {
    pub plane: PlaneGraph,
    pub boundary: Vec<usize>,
    /// Innermost first.
    pub cycles: Vec<Vec<usize>>,
    pub paths: Vec<Vec<usize>>,
}

impl Well {
    pub fn new(plane: PlaneGraph, boundary: Vec<usize>, cycles: Vec<Vec<usize>>, paths: Vec<Vec<usize>>) -> Result<Well> {
        let w = Well { plane, boundary, cycles, paths };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = self.cycles.clone();
        all.push(self.boundary.clone());
        ConcentricCycles::new(self.plane.clone(), all)?;
        let g = &self.plane.graph;
        let on_boundary: HashSet<usize> = self.boundary.iter().copied().collect();
        let mut used = HashSet::new();
        for p in &self.paths {
            if p.len() < 2 || !p.windows(2).all(|w| g.has_edge(w[0], w[1])) {
                return Err(Error::InvalidLinkage(format!("{p:?} is not a path with an edge")));
            }
            if !on_boundary.contains(&p[0]) || !on_boundary.contains(p.last().unwrap()) {
                return Err(Error::TerminalNotOnBoundary(p[0]));
            }
            if p[1..p.len() - 1].iter().any(|v| on_boundary.contains(v)) {
                return Err(Error::InvalidLinkage("path meets the boundary internally".into()));
            }
            for &v in p {
                if !used.insert(v) {
                    return Err(Error::InvalidLinkage(format!("vertex {v} on two paths")));
                }
            }
        }
        Ok(())
    }

    /// `|E(C ∪ P)|` over the cycles and paths.
    pub fn edge_count(&self) -> usize {
        let mut e: HashSet<(usize, usize)> = HashSet::new();
        for c in &self.cycles {
            e.extend(cycle_edges(c));
        }
        for p in &self.paths {
            e.extend(path_edges(p));
        }
        e.len()
    }

    pub fn endpoint_multiset(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.paths.iter().map(|p| ekey(p[0], *p.last().unwrap())).collect();
        v.sort_unstable();
        v
    }

    /// Faces of the side of path `pi` away from the innermost cycle.
    pub fn path_interior_faces(&self, pi: usize) -> Vec<bool> {
        let p = &self.paths[pi];
        let inside = self.plane.cycle_interior(&self.boundary);
        let mut barrier = path_edges(p);
        barrier.extend(cycle_edges(&self.boundary));
        let reg = self.plane.face_regions(&barrier);
        let pe = path_edges(p);
        let c1 = &self.cycles[0];
        let mut anchor = HashSet::new();
        for i in 0..c1.len() {
            let (a, b) = (c1[i], c1[(i + 1) % c1.len()]);
            if !pe.contains(&ekey(a, b)) {
                anchor.insert(reg[self.plane.face_of(a, b)]);
                anchor.insert(reg[self.plane.face_of(b, a)]);
            }
        }
        (0..reg.len()).map(|f| inside[f] && !anchor.contains(&reg[f])).collect()
    }

    /// Vertices in the closed interior of path `pi`.
    pub fn path_interior_vertices(&self, pi: usize) -> Vec<bool> {
        let faces = self.path_interior_faces(pi);
        let mut out: Vec<bool> = (0..self.plane.graph.n()).map(|v| self.plane.vertex_faces(v).iter().any(|&f| faces[f])).collect();
        for &v in &self.paths[pi] {
            out[v] = true;
        }
        out
    }

    fn meets(&self, pi: usize, ci: usize) -> bool {
        let c: HashSet<usize> = self.cycles[ci].iter().copied().collect();
        self.paths[pi].iter().any(|v| c.contains(v))
    }

    /// Number of components of the intersection graph of path `pi` and cycle `ci`.
    pub fn intersection_components(&self, pi: usize, ci: usize) -> usize {
        let c: HashSet<usize> = self.cycles[ci].iter().copied().collect();
        let ce = cycle_edges(&self.cycles[ci]);
        let p = &self.paths[pi];
        let mut comps = 0;
        for i in 0..p.len() {
            if !c.contains(&p[i]) {
                continue;
            }
            if i == 0 || !ce.contains(&ekey(p[i - 1], p[i])) {
                comps += 1;
            }
        }
        comps
    }

    /// First violation of the companion clause: path `pi` meets cycle `i` but
    /// no other path inside its interior meets cycle `i + 1`.
    ///
    /// The cell clause holds trivially here: every edge is its own cell and the
    /// graph is simple, so no path edge shares a cell with a cycle edge.
    pub fn drained_violation(&self) -> Option<(usize, usize)> {
        if self.paths.len() <= 1 {
            return None;
        }
        for pi in 0..self.paths.len() {
            let mut interior: Option<Vec<bool>> = None;
            for i in 0..self.cycles.len().saturating_sub(1) {
                if !self.meets(pi, i) {
                    continue;
                }
                let inside = interior.get_or_insert_with(|| self.path_interior_vertices(pi));
                let next: HashSet<usize> = self.cycles[i + 1].iter().copied().collect();
                let ok = (0..self.paths.len()).any(|qi| {
                    if qi == pi {
                        return false;
                    }
                    let hit: Vec<usize> = self.paths[qi].iter().copied().filter(|v| next.contains(v)).collect();
                    !hit.is_empty() && hit.iter().all(|&v| inside[v])
                });
                if !ok {
                    return Some((pi, i));
                }
            }
        }
        None
    }

    pub fn is_drained(&self) -> bool {
        self.drained_violation().is_none()
    }

    /// The four dryness clauses for path `pi`.
    pub fn path_is_dry(&self, pi: usize) -> bool {
        let s = self.cycles.len();
        let comps: Vec<usize> = (0..s).map(|j| self.intersection_components(pi, j)).collect();
        if comps[0] > 1 {
            return false;
        }
        let singles: Vec<usize> = (0..s).filter(|&j| comps[j] == 1).collect();
        if singles.len() != 1 {
            return false;
        }
        let i = singles[0];
        (0..i).all(|j| comps[j] == 0) && (i + 1..s).all(|j| comps[j] == 2)
    }

    pub fn is_dry(&self) -> bool {
        self.is_drained() && (0..self.paths.len()).all(|pi| self.path_is_dry(pi))
    }

    fn on_any_path(&self) -> Vec<bool> {
        let mut on = vec![false; self.plane.graph.n()];
        for p in &self.paths {
            for &v in p {
                on[v] = true;
            }
        }
        on
    }

    /// Replaces the part of path `pi` between positions `ix < iy` (both on
    /// cycle `ci`) by an arc of that cycle. Accepted only if the arc avoids
    /// every path internally and the edge count drops.
    fn try_shortcut(&self, pi: usize, ci: usize, ix: usize, iy: usize, forward: bool, within: Option<&[bool]>) -> Option<Well> {
        let p = &self.paths[pi];
        let c = &self.cycles[ci];
        let (x, y) = (p[ix], p[iy]);
        let jx = c.iter().position(|&v| v == x)?;
        let jy = c.iter().position(|&v| v == y)?;
        let mut arc = vec![x];
        let mut j = jx;
        while j != jy {
            j = if forward { (j + 1) % c.len() } else { (j + c.len() - 1) % c.len() };
            arc.push(c[j]);
        }
        if arc.len() == iy - ix + 1 && arc.iter().zip(&p[ix..=iy]).all(|(a, b)| a == b) {
            return None;
        }
        let on = self.on_any_path();
        if arc[1..arc.len() - 1].iter().any(|&v| on[v]) {
            return None;
        }
        if let Some(inside) = within {
            if arc.iter().any(|&v| !inside[v]) {
                return None;
            }
            if arc.len() == 2 {
                let faces = self.path_interior_faces(pi);
                if !faces[self.plane.face_of(x, y)] && !faces[self.plane.face_of(y, x)] {
                    return None;
                }
            }
        }
        let mut np = p[..ix].to_vec();
        np.extend(&arc);
        np.extend(&p[iy + 1..]);
        let mut w = self.clone();
        w.paths[pi] = np;
        (w.edge_count() < self.edge_count()).then_some(w)
    }

    fn positions_on(&self, pi: usize, ci: usize) -> Vec<usize> {
        let c: HashSet<usize> = self.cycles[ci].iter().copied().collect();
        self.paths[pi].iter().enumerate().filter(|(_, v)| c.contains(v)).map(|(i, _)| i).collect()
    }

    /// Shortcut of path `pi` along cycle `ci` inside the path's interior, widest span first.
    fn interior_shortcut(&self, pi: usize, ci: usize) -> Option<Well> {
        let pos = self.positions_on(pi, ci);
        let inside = self.path_interior_vertices(pi);
        let mut spans: Vec<(usize, usize)> = Vec::new();
        for a in 0..pos.len() {
            for b in a + 1..pos.len() {
                spans.push((pos[a], pos[b]));
            }
        }
        spans.sort_by_key(|&(x, y)| std::cmp::Reverse(y - x));
        for (ix, iy) in spans {
            for fw in [true, false] {
                if let Some(w) = self.try_shortcut(pi, ci, ix, iy, fw, Some(&inside)) {
                    return Some(w);
                }
            }
        }
        None
    }

    fn drain_step(&self) -> Option<Well> {
        let (pi, i) = self.drained_violation()?;
        if let Some(w) = self.interior_shortcut(pi, i + 1) {
            return Some(w);
        }
        for pj in 0..self.paths.len() {
            for ci in 0..self.cycles.len() {
                if let Some(w) = self.interior_shortcut(pj, ci) {
                    return Some(w);
                }
            }
        }
        None
    }

    /// A subpath between consecutive visits to cycle `ci` that leaves the
    /// cycle's disc, replaced by the arc beneath it.
    fn bump_step(&self) -> Option<Well> {
        for ci in (0..self.cycles.len()).rev() {
            let inside_faces = self.plane.cycle_interior(&self.cycles[ci]);
            let strict = self.plane.strict_interior_vertices(&self.cycles[ci]);
            let on_c: HashSet<usize> = self.cycles[ci].iter().copied().collect();
            for pi in 0..self.paths.len() {
                let p = &self.paths[pi];
                let pos = self.positions_on(pi, ci);
                for w in pos.windows(2) {
                    let (ix, iy) = (w[0], w[1]);
                    if iy == ix + 1 {
                        continue;
                    }
                    if p[ix + 1..iy].iter().any(|&v| strict[v] || on_c.contains(&v)) {
                        continue;
                    }
                    for fw in [true, false] {
                        let Some(cand) = self.try_shortcut(pi, ci, ix, iy, fw, None) else { continue };
                        // the cycle formed by the bump and the arc must avoid the disc's inside
                        let mut loop_walk = p[ix..=iy].to_vec();
                        let arc_back: Vec<usize> = cand.paths[pi][ix..ix + (cand.paths[pi].len() - (p.len() - (iy - ix + 1)))].to_vec();
                        loop_walk.extend(arc_back.iter().rev().skip(1).take(arc_back.len().saturating_sub(2)));
                        let enclosed = self.plane.cycle_interior(&loop_walk);
                        if enclosed.iter().zip(&inside_faces).any(|(&a, &b)| a && b) {
                            continue;
                        }
                        return Some(cand);
                    }
                }
            }
        }
        None
    }

    fn any_interior_shortcut(&self) -> Option<Well> {
        for pi in 0..self.paths.len() {
            for ci in 0..self.cycles.len() {
                if let Some(w) = self.interior_shortcut(pi, ci) {
                    return Some(w);
                }
            }
        }
        None
    }
}

/// Rewrites paths along cycles until the well is drained. Each step strictly
/// lowers the edge count, so the loop terminates.
pub fn drain(w: &Well) -> Result<Well> {
    w.validate()?;
    let mut cur = w.clone();
    while !cur.is_drained() {
        cur = cur.drain_step().ok_or_else(|| Error::CertificateNotFound("no draining rewrite applies".into()))?;
    }
    Ok(cur)
}

/// Drains, then removes bumps and bounces until every path is dry.
pub fn dry(w: &Well) -> Result<Well> {
    w.validate()?;
    let cc = ConcentricCycles { plane: w.plane.clone(), cycles: w.cycles.clone() };
    if !cc.is_tight() {
        return Err(Error::NotTight);
    }
    let mut cur = w.clone();
    loop {
        if !cur.is_drained() {
            cur = cur.drain_step().ok_or_else(|| Error::CertificateNotFound("no draining rewrite applies".into()))?;
            continue;
        }
        if cur.is_dry() {
            return Ok(cur);
        }
        cur = cur
            .bump_step()
            .or_else(|| cur.any_interior_shortcut())
            .ok_or_else(|| Error::CertificateNotFound("no drying rewrite applies".into()))?;
    }
}

/// A valley path on a well mesh: down rail `from` to ring `depth`, along that
/// ring in increasing direction to rail `to`, then up. `bumps` lift the bottom
/// by one ring over a span of rails and `dips` lower it by one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Valley {
    pub from: usize,
    pub to: usize,
    pub depth: usize,
    pub bumps: Vec<(usize, usize)>,
    pub dips: Vec<(usize, usize)>,
}

/// A well on a cylindrical mesh with `s + 1` rings: rings `0..s` are the cycles
/// and ring `s` is the boundary. Rails are numbered `0..rails`.
pub fn mesh_well(s: usize, rails: usize, valleys: &[Valley]) -> Result<Well> {
    let plane = cylindrical_mesh_plane(s + 1, rails)?;
    let id = |r: usize, j: usize| r * rails + j % rails;
    let mut paths = Vec::new();
    for v in valleys {
        let span = (v.to + rails - v.from) % rails;
        let mut p: Vec<usize> = (v.depth..=s).rev().map(|r| id(r, v.from)).collect();
        let mut level = v.depth;
        for step in 1..=span {
            let j = v.from + step;
            let want = if v.bumps.iter().any(|&(a, b)| step > a && step <= b) {
                v.depth + 1
            } else if v.dips.iter().any(|&(a, b)| step > a && step <= b) {
                v.depth - 1
            } else {
                v.depth
            };
            // change level on the previous rail, then step sideways
            let prev = j - 1;
            while level < want {
                level += 1;
                p.push(id(level, prev));
            }
            while level > want {
                level -= 1;
                p.push(id(level, prev));
            }
            p.push(id(level, j));
        }
        while level < s {
            level += 1;
            p.push(id(level, v.to));
        }
        paths.push(p);
    }
    let cycles = (0..s).map(|r| mesh_ring(rails, r)).collect();
    Well::new(plane, mesh_ring(rails, s), cycles, paths)
}

/// Whether the pairs can be drawn as disjoint chords of a disc whose boundary
/// visits the terminals in `order`.
pub fn feasible_on_disc(p: &Pattern, order: &[usize]) -> Result<bool> {
    let pos: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut chords = Vec::new();
    for &(a, b) in p.pairs() {
        let (Some(&x), Some(&y)) = (pos.get(&a), pos.get(&b)) else {
            return Err(Error::TerminalNotOnBoundary(if pos.contains_key(&a) { b } else { a }));
        };
        chords.push((x.min(y), x.max(y)));
    }
    if !p.has_distinct_terminals() {
        return Ok(false);
    }
    for i in 0..chords.len() {
        for j in i + 1..chords.len() {
            let ((a, b), (c, d)) = (chords[i], chords[j]);
            let inside = |x: usize| a < x && x < b;
            if inside(c) != inside(d) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Side of a cylinder terminal: on the outer or the inner cuff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cuff {
    Outer,
    Inner,
}

/// Feasibility on an annulus: local pairs must peel off as adjacent pairs on
/// their cuff, and crossing pairs must appear in the same cyclic order on both
/// cuffs. Both orders must follow one orientation of the annulus.
pub fn feasible_on_cylinder(p: &Pattern, outer: &[usize], inner: &[usize]) -> Result<bool> {
    if !p.has_distinct_terminals() {
        return Ok(false);
    }
    let side = |v: usize| -> Result<(Cuff, usize)> {
        if let Some(i) = outer.iter().position(|&x| x == v) {
            Ok((Cuff::Outer, i))
        } else if let Some(i) = inner.iter().position(|&x| x == v) {
            Ok((Cuff::Inner, i))
        } else {
            Err(Error::TerminalNotOnBoundary(v))
        }
    };
    let mut crossing: Vec<(usize, usize)> = Vec::new();
    let mut outer_seq: Vec<(usize, usize)> = Vec::new();
    let mut inner_seq: Vec<(usize, usize)> = Vec::new();
    for (pi, &(a, b)) in p.pairs().iter().enumerate() {
        if a == b {
            continue;
        }
        let (sa, ia) = side(a)?;
        let (sb, ib) = side(b)?;
        match (sa, sb) {
            (Cuff::Outer, Cuff::Outer) => outer_seq.extend([(ia, pi), (ib, pi)]),
            (Cuff::Inner, Cuff::Inner) => inner_seq.extend([(ia, pi), (ib, pi)]),
            (Cuff::Outer, Cuff::Inner) => {
                crossing.push((ia, ib));
                outer_seq.push((ia, usize::MAX));
                inner_seq.push((ib, usize::MAX));
            }
            (Cuff::Inner, Cuff::Outer) => {
                crossing.push((ib, ia));
                outer_seq.push((ib, usize::MAX));
                inner_seq.push((ia, usize::MAX));
            }
        }
    }
    for seq in [&mut outer_seq, &mut inner_seq] {
        seq.sort_unstable();
        let mut s: Vec<usize> = seq.iter().map(|&(_, t)| t).collect();
        loop {
            let n = s.len();
            let hit = (0..n).find(|&i| s[i] != usize::MAX && n >= 2 && s[i] == s[(i + 1) % n]);
            match hit {
                Some(i) => {
                    let j = (i + 1) % n;
                    let (hi, lo) = (i.max(j), i.min(j));
                    s.remove(hi);
                    s.remove(lo);
                }
                None => break,
            }
        }
        if s.iter().any(|&t| t != usize::MAX) {
            return Ok(false);
        }
    }
    crossing.sort_unstable();
    let inner_positions: Vec<usize> = crossing.iter().map(|&(_, b)| b).collect();
    Ok(is_cyclic_rotation_of_sorted(&inner_positions))
}

/// Whether the sequence is a rotation of an increasing sequence.
fn is_cyclic_rotation_of_sorted(s: &[usize]) -> bool {
    let descents = (0..s.len()).filter(|&i| s[i] > s[(i + 1) % s.len()]).count();
    s.len() <= 1 || descents <= 1
}

/// Radial paths from the outer cycle to the innermost one, each meeting every
/// cycle exactly once, in order.
fn crossing_levels(cc: &ConcentricCycles, crossing: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let t = cc.len();
    let ring_of: HashMap<usize, usize> = cc.cycles.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&v| (v, i))).collect();
    let g = &cc.plane.graph;
    let mut used = HashSet::new();
    let mut levels = Vec::new();
    for p in crossing {
        if p.is_empty() || !p.windows(2).all(|w| g.has_edge(w[0], w[1])) {
            return Err(Error::PreconditionViolated(format!("{p:?} is not a path")));
        }
        for &v in p {
            if !used.insert(v) {
                return Err(Error::PreconditionViolated(format!("crossing paths share vertex {v}")));
            }
        }
        let mut at = vec![usize::MAX; t];
        let mut last = None;
        for (i, &v) in p.iter().enumerate() {
            if let Some(&r) = ring_of.get(&v) {
                if at[r] != usize::MAX {
                    return Err(Error::PreconditionViolated(format!("crossing path meets cycle {r} twice")));
                }
                if let Some(l) = last {
                    if r + 1 != l {
                        return Err(Error::PreconditionViolated("crossing path visits cycles out of order".into()));
                    }
                }
                at[r] = i;
                last = Some(r);
            }
        }
        if at.contains(&usize::MAX) || at[t - 1] != 0 || at[0] != p.len() - 1 {
            return Err(Error::PreconditionViolated("crossing path must run from the outer cycle to the innermost".into()));
        }
        levels.push(at);
    }
    Ok(levels)
}

struct Router<'a> {
    cc: &'a ConcentricCycles,
    crossing: &'a [Vec<usize>],
    levels: Vec<Vec<usize>>,
    oriented: Vec<Vec<usize>>,
}

impl<'a> Router<'a> {
    fn vertex(&self, path: usize, ring: usize) -> usize {
        self.crossing[path][self.levels[path][ring]]
    }

    /// Crossing path `path` from ring `from` to ring `to`, both included.
    fn segment(&self, path: usize, from: usize, to: usize) -> Vec<usize> {
        let (a, b) = (self.levels[path][from], self.levels[path][to]);
        if a <= b {
            self.crossing[path][a..=b].to_vec()
        } else {
            let mut s = self.crossing[path][b..=a].to_vec();
            s.reverse();
            s
        }
    }

    /// Arc of ring `ring` from `x` to `y` in the oriented direction (or against it).
    fn arc(&self, ring: usize, x: usize, y: usize, forward: bool) -> Vec<usize> {
        let c = &self.oriented[ring];
        let n = c.len();
        let mut j = c.iter().position(|&v| v == x).unwrap();
        let mut out = vec![x];
        while c[j] != y {
            j = if forward { (j + 1) % n } else { (j + n - 1) % n };
            out.push(c[j]);
        }
        out
    }

    /// An arc between `x` and `y` on `ring` whose interior avoids `others`;
    /// the shorter one when both do.
    fn free_arc(&self, ring: usize, x: usize, y: usize, others: &HashSet<usize>) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        for fw in [true, false] {
            let a = self.arc(ring, x, y, fw);
            if a[1..a.len() - 1].iter().any(|v| others.contains(v)) {
                continue;
            }
            if best.as_ref().is_none_or(|b| a.len() < b.len()) {
                best = Some(a);
            }
        }
        best
    }
}

fn join(mut a: Vec<usize>, b: &[usize]) -> Vec<usize> {
    if a.last() == b.first() {
        a.extend(&b[1..]);
    } else {
        a.extend(b);
    }
    a
}

fn crossing_endpoint_index(crossing: &[Vec<usize>], v: usize, outer: bool) -> Option<usize> {
    crossing.iter().position(|p| if outer { p[0] == v } else { *p.last().unwrap() == v })
}

/// Concentric cycles with their crossing paths, prepared once for routing
/// many patterns.
pub struct Nest<'a> {
    router: Router<'a>,
    empty_inner: bool,
}

impl<'a> Nest<'a> {
    pub fn new(cc: &'a ConcentricCycles, crossing: &'a [Vec<usize>]) -> Result<Nest<'a>> {
        if cc.is_empty() {
            return Err(Error::PreconditionViolated("no cycles".into()));
        }
        let levels = crossing_levels(cc, crossing)?;
        let oriented: Vec<Vec<usize>> = (0..cc.len()).map(|i| cc.oriented(i)).collect();
        let empty_inner = !cc.plane.strict_interior_vertices(&cc.cycles[0]).iter().any(|&x| x);
        Ok(Nest { router: Router { cc, crossing, levels, oriented }, empty_inner })
    }

    /// Outer cycle and innermost cycle in their canonical orientation.
    pub fn cuffs(&self) -> (&[usize], &[usize]) {
        (self.router.oriented.last().unwrap(), &self.router.oriented[0])
    }

    /// Routes a pattern on the outer ends of the crossing paths using only the
    /// cycles and the crossing paths, peeling one or more pairs per cycle. The
    /// inside of the innermost cycle is never used. `None` means infeasible.
    pub fn route_disc(&self, p: &Pattern) -> Result<Option<Linkage>> {
        let (cc, crossing, router) = (self.router.cc, self.router.crossing, &self.router);
        let t = cc.len();
        if p.len() > t {
            return Err(Error::PreconditionViolated(format!("{} pairs need at least as many cycles, have {t}", p.len())));
        }
        let mut ends = Vec::new();
        for &(a, b) in p.pairs() {
            let ia = crossing_endpoint_index(crossing, a, true).ok_or(Error::TerminalNotOnBoundary(a))?;
            let ib = crossing_endpoint_index(crossing, b, true).ok_or(Error::TerminalNotOnBoundary(b))?;
            ends.push((ia, ib));
        }
        if !feasible_on_disc(p, &router.oriented[t - 1])? {
            return Ok(None);
        }
        let mut out: Vec<Option<Vec<usize>>> = vec![None; p.len()];
        let mut active: Vec<usize> = Vec::new();
        for (i, &(a, b)) in p.pairs().iter().enumerate() {
            if a == b {
                out[i] = Some(vec![a]);
            } else {
                active.push(i);
            }
        }
        let mut ring = t - 1;
        while !active.is_empty() {
            let term: HashSet<usize> = active.iter().flat_map(|&i| [router.vertex(ends[i].0, ring), router.vertex(ends[i].1, ring)]).collect();
            let mut routed = Vec::new();
            for &i in &active {
                let (x, y) = (router.vertex(ends[i].0, ring), router.vertex(ends[i].1, ring));
                let others: HashSet<usize> = term.iter().copied().filter(|&v| v != x && v != y).collect();
                if let Some(arc) = router.free_arc(ring, x, y, &others) {
                    let left = router.segment(ends[i].0, t - 1, ring);
                    let mut right = router.segment(ends[i].1, t - 1, ring);
                    right.reverse();
                    out[i] = Some(join(join(left, &arc), &right));
                    routed.push(i);
                }
            }
            if routed.is_empty() {
                return Err(Error::CertificateNotFound("no peelable pair on a feasible pattern".into()));
            }
            active.retain(|i| !routed.contains(i));
            if !active.is_empty() {
                if ring == 0 {
                    return Err(Error::CertificateNotFound("ran out of cycles".into()));
                }
                ring -= 1;
            }
        }
        Ok(Some(Linkage::new(out.into_iter().map(Option::unwrap).collect())))
    }

    /// Routes a pattern on the outer and inner ends of the crossing paths of a
    /// cylinder. Local pairs peel off along their cuff; the crossing pairs are
    /// handled by one half-depth path and a Menger linkage for the rest.
    pub fn route_cylinder(&self, p: &Pattern) -> Result<Option<Linkage>> {
        let (cc, crossing, router) = (self.router.cc, self.router.crossing, &self.router);
        let t = cc.len();
        if t < 2 * p.len() {
            return Err(Error::PreconditionViolated(format!("{} pairs need at least {} cycles, have {t}", p.len(), 2 * p.len())));
        }
        if !self.empty_inner {
            return Err(Error::PreconditionViolated("the innermost cycle must bound an empty disc".into()));
        }
        if !feasible_on_cylinder(p, &router.oriented[t - 1], &router.oriented[0])? {
            return Ok(None);
        }
        // each end: (crossing path, outer?)
        let locate = |v: usize| -> Result<(usize, bool)> {
            if let Some(i) = crossing_endpoint_index(crossing, v, true) {
                Ok((i, true))
            } else if let Some(i) = crossing_endpoint_index(crossing, v, false) {
                Ok((i, false))
            } else {
                Err(Error::TerminalNotOnBoundary(v))
            }
        };
        let mut ends = Vec::new();
        for &(a, b) in p.pairs() {
            ends.push((locate(a)?, locate(b)?));
        }
        let mut out: Vec<Option<Vec<usize>>> = vec![None; p.len()];
        let mut active: Vec<usize> = Vec::new();
        for (i, &(a, b)) in p.pairs().iter().enumerate() {
            if a == b {
                out[i] = Some(vec![a]);
            } else {
                active.push(i);
            }
        }
        let (mut lo, mut hi) = (0usize, t - 1);
        let cur = |end: (usize, bool), lo: usize, hi: usize| router.vertex(end.0, if end.1 { hi } else { lo });
        // the part of a crossing path from its original terminal to the current ring
        let tail = |end: (usize, bool), lo: usize, hi: usize| {
            if end.1 {
                router.segment(end.0, t - 1, hi)
            } else {
                router.segment(end.0, 0, lo)
            }
        };
        loop {
            let local: Vec<usize> = active.iter().copied().filter(|&i| ends[i].0 .1 == ends[i].1 .1).collect();
            if local.is_empty() {
                break;
            }
            let mut routed = Vec::new();
            for outer_side in [true, false] {
                let ring = if outer_side { hi } else { lo };
                let term: HashSet<usize> = active
                    .iter()
                    .flat_map(|&i| [ends[i].0, ends[i].1])
                    .filter(|e| e.1 == outer_side)
                    .map(|e| cur(e, lo, hi))
                    .collect();
                for &i in &local {
                    if ends[i].0 .1 != outer_side {
                        continue;
                    }
                    let (x, y) = (cur(ends[i].0, lo, hi), cur(ends[i].1, lo, hi));
                    let others: HashSet<usize> = term.iter().copied().filter(|&v| v != x && v != y).collect();
                    if let Some(arc) = router.free_arc(ring, x, y, &others) {
                        let mut right = tail(ends[i].1, lo, hi);
                        right.reverse();
                        out[i] = Some(join(join(tail(ends[i].0, lo, hi), &arc), &right));
                        routed.push(i);
                    }
                }
            }
            if routed.is_empty() {
                return Err(Error::CertificateNotFound("no peelable local pair on a feasible pattern".into()));
            }
            active.retain(|i| !routed.contains(i));
            if hi < lo + 2 {
                if active.is_empty() {
                    break;
                }
                return Err(Error::CertificateNotFound("ran out of cycles".into()));
            }
            lo += 1;
            hi -= 1;
        }
        if !active.is_empty() {
            // orient every crossing pair as (outer end, inner end)
            let mut cross: Vec<(usize, (usize, bool), (usize, bool))> =
                active.iter().map(|&i| if ends[i].0 .1 { (i, ends[i].0, ends[i].1) } else { (i, ends[i].1, ends[i].0) }).collect();
            let outer_ring = &router.oriented[hi];
            cross.sort_by_key(|&(_, a, _)| outer_ring.iter().position(|&v| v == cur(a, lo, hi)).unwrap());
            let (first, a1, b1) = cross[0];
            let span = hi - lo + 1;
            let mid = lo + span / 2 - 1;
            let (pa, pb) = (a1.0, b1.0);
            let mut candidates: Vec<Vec<usize>> = Vec::new();
            if pa == pb {
                candidates.push(router.segment(pa, hi, lo));
            } else {
                let inner_ring = &router.oriented[lo];
                let c1 = router.vertex(pa, lo);
                let b1v = router.vertex(pb, lo);
                let s1 = router.arc(lo, c1, b1v, true);
                let s2 = router.arc(lo, b1v, c1, true);
                let others: HashSet<usize> = (0..crossing.len()).filter(|&q| q != pa && q != pb).map(|q| router.vertex(q, lo)).collect();
                let count = |s: &[usize]| s[1..s.len() - 1].iter().filter(|v| others.contains(v)).count();
                let min_in = |s: &[usize]| s[1..s.len() - 1].iter().copied().min().unwrap_or(usize::MAX);
                let (n1, n2) = (count(&s1), count(&s2));
                let s2_major = n2 > n1 || (n1 == n2 && min_in(&s2) <= min_in(&s1));
                let _ = inner_ring;
                let a_mid = router.vertex(pa, mid);
                let b_mid = router.vertex(pb, mid);
                for fw in [s2_major, !s2_major] {
                    let s = router.arc(mid, a_mid, b_mid, fw);
                    let mut l = router.segment(pa, hi, mid);
                    l = join(l, &s);
                    l = join(l, &router.segment(pb, mid, lo));
                    candidates.push(l);
                }
            }
            // the subgraph of cycles lo..=hi and crossing path pieces between them
            let mut allowed = vec![false; cc.plane.graph.n()];
            for r in lo..=hi {
                for &v in &cc.cycles[r] {
                    allowed[v] = true;
                }
            }
            for q in 0..crossing.len() {
                for v in router.segment(q, hi, lo) {
                    allowed[v] = true;
                }
            }
            let rest: Vec<(usize, usize, usize)> = cross[1..].iter().map(|&(i, a, b)| (i, cur(a, lo, hi), cur(b, lo, hi))).collect();
            let mut done = false;
            for l in candidates {
                let mut keep = allowed.clone();
                for &v in &l {
                    keep[v] = false;
                }
                let kept: Vec<usize> = (0..keep.len()).filter(|&v| keep[v]).collect();
                let (sub, map) = cc.plane.graph.induced(&kept);
                let inv: HashMap<usize, usize> = map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
                let xs: Vec<usize> = rest.iter().map(|&(_, a, _)| inv[&a]).collect();
                let ys: Vec<usize> = rest.iter().map(|&(_, _, b)| inv[&b]).collect();
                let paths = if rest.is_empty() {
                    Vec::new()
                } else {
                    match menger(&sub, &xs, &ys, rest.len())? {
                        MengerResult::Paths(ps) => ps,
                        MengerResult::Separation(_) => continue,
                    }
                };
                let mut assigned: HashMap<usize, Vec<usize>> = HashMap::new();
                let mut ok = true;
                for ps in paths {
                    let (s, e) = (map[ps[0]], map[*ps.last().unwrap()]);
                    match rest.iter().find(|&&(_, a, b)| a == s && b == e) {
                        Some(&(i, _, _)) => {
                            assigned.insert(i, ps.iter().map(|&v| map[v]).collect());
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let mut full = |i: usize, a: (usize, bool), b: (usize, bool), middle: &[usize]| {
                    let mut right = tail(b, lo, hi);
                    right.reverse();
                    out[i] = Some(join(join(tail(a, lo, hi), middle), &right));
                };
                full(first, a1, b1, &l);
                for &(i, a, b) in &cross[1..] {
                    full(i, a, b, &assigned[&i]);
                }
                done = true;
                break;
            }
            if !done {
                return Err(Error::CertificateNotFound("crossing pairs could not be linked".into()));
            }
        }
        // restore the requested orientation of every path
        let mut paths = Vec::with_capacity(p.len());
        for (i, o) in out.into_iter().enumerate() {
            let mut path = o.unwrap();
            if path[0] != p.pairs()[i].0 && path[0] != p.pairs()[i].1 {
                path.reverse();
            }
            paths.push(path);
        }
        Ok(Some(Linkage::new(paths)))
    }
}

pub fn route_disc(cc: &ConcentricCycles, crossing: &[Vec<usize>], p: &Pattern) -> Result<Option<Linkage>> {
    Nest::new(cc, crossing)?.route_disc(p)
}

pub fn route_cylinder(cc: &ConcentricCycles, crossing: &[Vec<usize>], p: &Pattern) -> Result<Option<Linkage>> {
    Nest::new(cc, crossing)?.route_cylinder(p)
}

/// All patterns with distinct terminals drawn from `terminals`, with 1 to `max_pairs` pairs.
pub fn all_patterns(terminals: &[usize], max_pairs: usize) -> Vec<Pattern> {
    let mut out = Vec::new();
    fn rec(ts: &[usize], start: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, max: usize, out: &mut Vec<Pattern>) {
        if !cur.is_empty() {
            out.push(Pattern::new(cur));
        }
        if cur.len() == max {
            return;
        }
        for i in start..ts.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            for j in i + 1..ts.len() {
                if used[j] {
                    continue;
                }
                used[j] = true;
                cur.push((ts[i], ts[j]));
                rec(ts, i + 1, used, cur, max, out);
                cur.pop();
                used[j] = false;
            }
            used[i] = false;
        }
    }
    rec(terminals, 0, &mut vec![false; terminals.len()], &mut Vec::new(), max_pairs, &mut out);
    out
}

/// A railed annulus with its plane embedding.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RailedAnnulus {
    pub plane: PlaneGraph,
    pub circles: Vec<Vec<usize>>,
    pub rails: Vec<Vec<usize>>,
}

impl RailedAnnulus {
    pub fn validate(&self) -> Result<()> {
        let g = &self.plane.graph;
        let w = self.circles.len();
        let mut union: HashSet<(usize, usize)> = HashSet::new();
        let mut seen = HashSet::new();
        for c in &self.circles {
            if !is_cycle_in(g, c) {
                return Err(Error::InvalidEmbedding(format!("circle {c:?} is not a cycle")));
            }
            for &v in c {
                if !seen.insert(v) {
                    return Err(Error::InvalidEmbedding(format!("circles share vertex {v}")));
                }
            }
            union.extend(cycle_edges(c));
        }
        let circle_of: HashMap<usize, usize> = self.circles.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&v| (v, i))).collect();
        let mut rail_seen = HashSet::new();
        for r in &self.rails {
            if r.is_empty() || !r.windows(2).all(|e| g.has_edge(e[0], e[1])) {
                return Err(Error::InvalidEmbedding(format!("rail {r:?} is not a path")));
            }
            for &v in r {
                if !rail_seen.insert(v) {
                    return Err(Error::InvalidEmbedding(format!("rails share vertex {v}")));
                }
            }
            union.extend(path_edges(r));
            if circle_of.get(&r[0]) != Some(&0) || circle_of.get(r.last().unwrap()) != Some(&(w - 1)) {
                return Err(Error::InvalidEmbedding("rail must run from the first circle to the last".into()));
            }
            if w > 1 && r[1..r.len() - 1].iter().any(|v| matches!(circle_of.get(v), Some(&c) if c == 0 || c == w - 1)) {
                // a rail may run along a boundary circle only at its ends
                let inner_hits: Vec<usize> = r.iter().filter_map(|v| circle_of.get(v).copied()).collect();
                let first_run = inner_hits.iter().take_while(|&&c| c == 0).count();
                let last_run = inner_hits.iter().rev().take_while(|&&c| c == w - 1).count();
                if inner_hits[first_run..inner_hits.len() - last_run].iter().any(|&c| c == 0 || c == w - 1) {
                    return Err(Error::InvalidEmbedding("rail meets a boundary circle internally".into()));
                }
            }
            // the circles met along the rail, run-length compressed, must be 0, 1, ..., w-1
            let mut order: Vec<usize> = Vec::new();
            for v in r {
                if let Some(&c) = circle_of.get(v) {
                    if order.last() != Some(&c) {
                        order.push(c);
                    }
                }
            }
            if order != (0..w).collect::<Vec<_>>() {
                return Err(Error::InvalidEmbedding(format!("rail visits circles in order {order:?}")));
            }
        }
        let all: HashSet<(usize, usize)> = g.edges().into_iter().collect();
        if all != union {
            return Err(Error::InvalidEmbedding("graph is not the union of circles and rails".into()));
        }
        Ok(())
    }
}

/// A railed annulus on a cylindrical mesh: every ring a circle, every spoke a rail.
pub fn mesh_railed_annulus(w: usize, r: usize) -> Result<RailedAnnulus> {
    if w < 1 || r < 1 {
        return Err(Error::ParameterTooSmall(format!("railed annulus needs w, r >= 1, got {w}, {r}")));
    }
    let rails_n = r.max(3);
    let plane = cylindrical_mesh_plane(w, rails_n)?;
    // drop spokes beyond the requested rails
    let keep: HashSet<(usize, usize)> = {
        let mut e: HashSet<(usize, usize)> = HashSet::new();
        for ring in 0..w {
            e.extend(cycle_edges(&mesh_ring(rails_n, ring)));
        }
        for j in 0..r {
            e.extend(path_edges(&mesh_rail(rails_n, w - 1, j)));
        }
        e
    };
    let g = &plane.graph;
    let edges: Vec<(usize, usize)> = g.edges().into_iter().filter(|e| keep.contains(e)).collect();
    let sub = Graph::new(g.n(), &edges)?;
    let rotation: Vec<Vec<usize>> = (0..g.n()).map(|v| plane.rotation(v).iter().copied().filter(|&u| keep.contains(&ekey(u, v))).collect()).collect();
    let top = w - 1;
    let outer = (top * rails_n, top * rails_n + 1);
    let probe = PlaneGraph::new(sub.clone(), rotation.clone(), outer)?;
    let on_top = |f: usize| probe.faces()[f].iter().all(|&(a, b)| a / rails_n == top && b / rails_n == top);
    let outer = if w == 1 || on_top(probe.face_of(outer.0, outer.1)) { outer } else { (outer.1, outer.0) };
    let plane = PlaneGraph::new(sub, rotation, outer)?;
    let circles = (0..w).map(|i| mesh_ring(rails_n, i)).collect();
    let rails = (0..r).map(|j| (0..w).map(|i| i * rails_n + j).collect()).collect();
    let ra = RailedAnnulus { plane, circles, rails };
    ra.validate()?;
    Ok(ra)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Surface {
    Disc,
    Cylinder,
}

/// A boundary point: cuff index and position along it.
pub type BoundaryPoint = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub start: BoundaryPoint,
    pub end: BoundaryPoint,
    /// Turns around the cylinder, for curves joining the two cuffs.
    pub winding: i64,
}

/// Pairwise disjoint boundary-to-boundary curves. A curve with both ends on
/// one cuff cuts off the disc lying along the cuff from `start` to `end` in
/// increasing position order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSystem {
    pub surface: Surface,
    pub cuff_len: Vec<usize>,
    pub curves: Vec<Curve>,
}

impl CurveSystem {
    pub fn new(surface: Surface, cuff_len: Vec<usize>, curves: Vec<Curve>) -> Result<CurveSystem> {
        let cs = CurveSystem { surface, cuff_len, curves };
        cs.validate()?;
        Ok(cs)
    }

    fn in_arc(len: usize, from: usize, to: usize, x: usize) -> bool {
        let d = (x + len - from) % len;
        d > 0 && d < (to + len - from) % len
    }

    pub fn validate(&self) -> Result<()> {
        let cuffs = match self.surface {
            Surface::Disc => 1,
            Surface::Cylinder => 2,
        };
        if self.cuff_len.len() != cuffs {
            return Err(Error::PreconditionViolated(format!("expected {cuffs} cuffs")));
        }
        let mut pts = HashSet::new();
        for c in &self.curves {
            for &(cuff, pos) in &[c.start, c.end] {
                if cuff >= cuffs || pos >= self.cuff_len[cuff] {
                    return Err(Error::PreconditionViolated(format!("endpoint ({cuff}, {pos}) off the boundary")));
                }
                if !pts.insert((cuff, pos)) {
                    return Err(Error::PreconditionViolated(format!("endpoint ({cuff}, {pos}) used twice")));
                }
            }
        }
        let windings: HashSet<i64> = self.curves.iter().filter(|c| c.start.0 != c.end.0).map(|c| c.winding).collect();
        if windings.len() > 1 {
            return Err(Error::PreconditionViolated("crossing curves with different windings cannot be disjoint".into()));
        }
        for c in &self.curves {
            if c.start.0 != c.end.0 {
                continue;
            }
            let len = self.cuff_len[c.start.0];
            let (a, b) = (c.start.1, c.end.1);
            for d in &self.curves {
                if std::ptr::eq(c, d) {
                    continue;
                }
                let ins: Vec<bool> = [d.start, d.end].iter().map(|&(cu, p)| cu == c.start.0 && Self::in_arc(len, a, b, p)).collect();
                if ins.iter().any(|&x| x) {
                    let nested = ins.iter().all(|&x| x) && {
                        // nested curves must cut off a disc inside this one
                        let (x, y) = (d.start.1, d.end.1);
                        (x + len - a) % len < (y + len - a) % len
                    };
                    if !nested {
                        return Err(Error::PreconditionViolated("curves cross".into()));
                    }
                }
            }
        }
        let mut cross: Vec<(usize, usize)> = self
            .curves
            .iter()
            .filter(|c| c.start.0 != c.end.0)
            .map(|c| if c.start.0 == 0 { (c.start.1, c.end.1) } else { (c.end.1, c.start.1) })
            .collect();
        cross.sort_unstable();
        let inner: Vec<usize> = cross.iter().map(|&(_, b)| b).collect();
        if !is_cyclic_rotation_of_sorted(&inner) {
            return Err(Error::PreconditionViolated("crossing curves cross".into()));
        }
        Ok(())
    }
}

/// Number of homotopy classes realized: on a disc every curve is null-homotopic;
/// on a cylinder the classes are local-to-cuff-0, local-to-cuff-1 and crossing.
pub fn homotopy_classes(cs: &CurveSystem) -> usize {
    if cs.curves.is_empty() {
        return 0;
    }
    match cs.surface {
        Surface::Disc => 1,
        Surface::Cylinder => {
            let mut kinds = HashSet::new();
            for c in &cs.curves {
                kinds.insert(if c.start.0 != c.end.0 { 2 } else { c.start.0 });
            }
            kinds.len()
        }
    }
}

pub fn well_to_json(w: &Well) -> serde_json::Value {
    serde_json::json!({ "boundary": w.boundary, "cycles": w.cycles, "paths": w.paths })
}
