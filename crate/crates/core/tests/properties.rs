use std::collections::{BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use minorfolio::canon::canonical_code;
use minorfolio::constructions::{decorate_gamma, gamma_hat_opts, gnp_with, regular_gadgets};
use minorfolio::decomposition::{
    exact_treewidth, heuristic_decomposition, nice_form, parse_td_format, path_decomposition_from_order, to_td_format,
    treewidth_certificates, validate_td, verify_lower, Treewidth,
};
use minorfolio::embedding::{
    all_patterns, cylindrical_mesh_plane, drain, feasible_on_cylinder, feasible_on_disc, mesh_rail, mesh_ring, mesh_well, ConcentricCycles,
    Nest, Valley,
};
use minorfolio::folio::{folio, folio_bruteforce, folio_dp, is_downward_closed, kd_folio, Engine, FolioConfig};
use minorfolio::graph::{blocks, menger, verify_separation, MengerResult, Separation};
use minorfolio::linkage::{
    disjoint_paths, is_vital, pattern_of, reindex_linkage, restrict_linkage, rooted_encoding, validate_linkage, Linkage, Pattern,
};
use minorfolio::minor::{bidim, find_minor, find_rooted_minor};
use minorfolio::pipeline::{reduce, Justification, PipelineConfig, ReductionStatus};
use minorfolio::{AnnotatedGraph, Graph, RootedGraph};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_graph(r: &mut ChaCha8Rng, n: usize) -> Graph {
    let p = r.gen_range(0.2..0.8);
    gnp_with(n, p, r)
}

/// Maximum number of vertex-disjoint X–Y paths by plain augmenting paths on a split graph.
fn flow_oracle(g: &Graph, xs: &[usize], ys: &[usize]) -> usize {
    let n = g.n();
    // node 2v = in, 2v+1 = out, 2n = source, 2n+1 = sink
    let (s, t) = (2 * n, 2 * n + 1);
    let size = 2 * n + 2;
    let mut cap = vec![vec![0i32; size]; size];
    for v in 0..n {
        cap[2 * v][2 * v + 1] = 1;
        for &w in g.neighbors(v) {
            cap[2 * v + 1][2 * w] = 1;
        }
    }
    for &x in xs {
        cap[s][2 * x] = 1;
    }
    for &y in ys {
        cap[2 * y + 1][t] = 1;
    }
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; size];
        prev[s] = s;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for v in 0..size {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    q.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return flow;
        }
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u][v] -= 1;
            cap[v][u] += 1;
            v = u;
        }
        flow += 1;
    }
}

/// A graph covered by random disjoint paths plus a few extra edges, with that path system.
fn path_instance(r: &mut ChaCha8Rng, n: usize, extra: usize) -> (Graph, Linkage) {
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(r);
    let k = r.gen_range(1..=3.min(n));
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(r);
    let mut cuts: Vec<usize> = cuts[..k - 1].to_vec();
    cuts.sort_unstable();
    let mut paths = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain([n]) {
        paths.push(vs[start..c].to_vec());
        start = c;
    }
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for p in &paths {
        for w in p.windows(2) {
            edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    for _ in 0..extra {
        let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let e: Vec<(usize, usize)> = edges.into_iter().collect();
    (Graph::new(n, &e).unwrap(), Linkage::new(paths))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blocks_partition_edges(seed in any::<u64>(), n in 1usize..12) {
        let g = random_graph(&mut rng(seed), n);
        let b = blocks(&g);
        let total: usize = b.blocks.iter().map(|x| x.edges.len()).sum::<usize>() + b.bridges.len();
        prop_assert_eq!(total, g.m());
    }

    #[test]
    fn menger_flips_at_flow_value(seed in any::<u64>(), n in 2usize..12) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(&mut r);
        let xs: Vec<usize> = vs[..r.gen_range(1..=n / 2)].to_vec();
        vs.shuffle(&mut r);
        let ys: Vec<usize> = vs[..r.gen_range(1..=n / 2)].to_vec();
        let f = flow_oracle(&g, &xs, &ys);
        match menger(&g, &xs, &ys, f).unwrap() {
            MengerResult::Paths(ps) => {
                prop_assert_eq!(ps.len(), f);
                let mut used = HashSet::new();
                for p in &ps {
                    prop_assert!(xs.contains(&p[0]) && ys.contains(p.last().unwrap()));
                    prop_assert!(p.windows(2).all(|w| g.has_edge(w[0], w[1])));
                    prop_assert!(p.iter().all(|&v| used.insert(v)));
                }
            }
            MengerResult::Separation(_) => prop_assert!(false, "no paths at the flow value"),
        }
        if f < xs.len().min(ys.len()) {
            match menger(&g, &xs, &ys, f + 1).unwrap() {
                MengerResult::Separation(s) => {
                    prop_assert!(s.order() <= f);
                    prop_assert!(verify_separation(&g, &s));
                    prop_assert!(xs.iter().all(|x| s.side_a.contains(x)) && ys.iter().all(|y| s.side_b.contains(y)));
                }
                MengerResult::Paths(_) => prop_assert!(false, "more paths than the flow value"),
            }
        } else {
            prop_assert!(menger(&g, &xs, &ys, f + 1).is_err());
        }
        let all: Vec<usize> = (0..n).collect();
        prop_assert!(verify_separation(&g, &Separation::new(all.clone(), all)));
    }

    #[test]
    fn canonical_code_ignores_relabeling(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let roots: Vec<usize> = (0..r.gen_range(0..=n.min(3))).map(|_| r.gen_range(0..n)).collect();
        let fixed: BTreeSet<usize> = roots.iter().copied().collect();
        let mut free: Vec<usize> = (0..n).filter(|v| !fixed.contains(v)).collect();
        let mut shuffled = free.clone();
        shuffled.shuffle(&mut r);
        let mut perm: Vec<usize> = (0..n).collect();
        for (a, b) in free.drain(..).zip(shuffled) {
            perm[a] = b;
        }
        let e: Vec<(usize, usize)> = g.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let h = Graph::new(n, &e).unwrap();
        let c1 = canonical_code(&RootedGraph::new(g, &roots).unwrap()).unwrap();
        let c2 = canonical_code(&RootedGraph::new(h, &roots).unwrap()).unwrap();
        prop_assert_eq!(c1, c2);
    }

    #[test]
    fn bidim_bounds(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let red: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
        let s: Vec<usize> = (0..n).filter(|v| !red.contains(v) && r.gen_bool(0.3)).collect();
        let all: Vec<usize> = red.iter().chain(&s).copied().collect();
        let b = bidim(&AnnotatedGraph::new(g.clone(), &red).unwrap(), 3).unwrap();
        let b2 = bidim(&AnnotatedGraph::new(g, &all).unwrap(), 3).unwrap();
        prop_assert!(b2 <= b + s.len());
        prop_assert!(b <= b2);
        prop_assert!(b * b <= red.len());
    }

    #[test]
    fn two_connected_minors_live_in_a_block(seed in any::<u64>(), n in 3usize..10, which in 0usize..4) {
        let g = random_graph(&mut rng(seed), n);
        let pattern = match which {
            0 => Graph::cycle(3),
            1 => Graph::cycle(4),
            2 => Graph::complete(4),
            _ => Graph::complete(4).delete_edge(0, 1),
        };
        if find_minor(&g, &pattern).unwrap().is_some() {
            let found = blocks(&g).blocks.iter().any(|b| {
                let (sub, _) = g.induced(&b.vertices);
                find_minor(&sub, &pattern).unwrap().is_some()
            });
            prop_assert!(found);
        }
    }

    #[test]
    fn nice_form_keeps_width(seed in any::<u64>(), n in 1usize..10) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        for td in [heuristic_decomposition(&g), path_decomposition_from_order(&g, &order)] {
            prop_assert!(validate_td(&g, &td).valid);
            let nice = nice_form(&td).unwrap();
            prop_assert!(nice.is_nice());
            prop_assert!(validate_td(&g, &nice.to_td()).valid);
            prop_assert_eq!(nice.width(), td.width());
            let (back, m) = parse_td_format(&to_td_format(&td, n)).unwrap();
            prop_assert_eq!(m, n);
            prop_assert_eq!(back.width(), td.width());
            prop_assert!(validate_td(&g, &back).valid);
        }
    }

    #[test]
    fn treewidth_drops_under_deletion(seed in any::<u64>(), n in 2usize..10) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let tw = |g: &Graph| match exact_treewidth(g, g.n()).unwrap() {
            Treewidth::Exact { width, .. } => width,
            Treewidth::AboveBound => unreachable!(),
        };
        let v = r.gen_range(0..n);
        prop_assert!(tw(&g.delete_vertex(v)) <= tw(&g));
    }

    #[test]
    fn linkage_iff_rooted_minor(seed in any::<u64>(), n in 2usize..10) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let k = r.gen_range(1..=2.min(n / 2));
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(&mut r);
        let pairs: Vec<(usize, usize)> = (0..k).map(|j| (vs[2 * j], vs[2 * j + 1])).collect();
        let p = Pattern::new(&pairs);
        let (host, pat) = rooted_encoding(&g, &p);
        let direct = disjoint_paths(&g, &p).unwrap();
        prop_assert_eq!(direct.is_some(), find_rooted_minor(&host, &pat).unwrap().is_some());
        let member = folio(&host, 0, Engine::Oracle, &FolioConfig::default()).unwrap().contains_graph(&pat).unwrap();
        prop_assert_eq!(direct.is_some(), member);
    }

    #[test]
    fn vitality_survives_restriction(seed in any::<u64>(), n in 2usize..10, extra in 0usize..3) {
        let mut r = rng(seed);
        let (g, l) = path_instance(&mut r, n, extra);
        prop_assume!(is_vital(&g, &l).unwrap());
        let h: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.6)).collect();
        let (sub, map) = g.induced(&h);
        let rl = reindex_linkage(&restrict_linkage(&g, &h, &l).unwrap(), &map);
        prop_assert!(is_vital(&sub, &rl).unwrap());
    }

    #[test]
    fn vitality_survives_separations(seed in any::<u64>(), n in 2usize..10, extra in 0usize..3) {
        let mut r = rng(seed);
        let (g, l) = path_instance(&mut r, n, extra);
        prop_assume!(is_vital(&g, &l).unwrap());
        // a random separator, with the components of the rest split between the sides
        let sep: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.3)).collect();
        let mut blocked = vec![false; n];
        for &v in &sep {
            blocked[v] = true;
        }
        let mut b: Vec<usize> = sep.clone();
        for comp in g.components_avoiding(&blocked) {
            if r.gen_bool(0.5) {
                b.extend(comp);
            }
        }
        b.sort_unstable();
        let (sub, map) = g.induced(&b);
        let rl = reindex_linkage(&restrict_linkage(&g, &b, &l).unwrap(), &map);
        prop_assert!(is_vital(&sub, &rl).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn folio_shrinks_under_deletion(seed in any::<u64>(), n in 1usize..8, d in 0usize..3) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let roots: Vec<usize> = (0..r.gen_range(0..=2)).map(|_| r.gen_range(0..n)).collect();
        let host = RootedGraph::new(g.clone(), &roots).unwrap();
        let f = folio_bruteforce(&host, d).unwrap();
        prop_assert!(is_downward_closed(&f).unwrap());
        if let Some(v) = (0..n).find(|v| !roots.contains(v)) {
            let shifted: Vec<usize> = roots.iter().map(|&x| if x > v { x - 1 } else { x }).collect();
            let smaller = RootedGraph::new(g.delete_vertex(v), &shifted).unwrap();
            prop_assert!(folio_bruteforce(&smaller, d).unwrap().is_subset(&f));
        }
        if let Some(&(a, b)) = g.edges().first() {
            let fewer = RootedGraph::new(g.delete_edge(a, b), &roots).unwrap();
            prop_assert!(folio_bruteforce(&fewer, d).unwrap().is_subset(&f));
        }
    }

    #[test]
    fn dp_equals_oracle(seed in any::<u64>(), n in 1usize..9, d in 0usize..3) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let roots: Vec<usize> = (0..r.gen_range(0..=2)).map(|_| r.gen_range(0..n)).collect();
        let host = RootedGraph::new(g.clone(), &roots).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        let td = path_decomposition_from_order(&g, &order);
        prop_assert_eq!(folio_dp(&host, d, &td).unwrap(), folio_bruteforce(&host, d).unwrap());
    }

    #[test]
    fn kd_engines_agree(seed in any::<u64>(), n in 1usize..8, k in 1usize..3, d in 0usize..2) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n);
        let red: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.4)).collect();
        let host = AnnotatedGraph::new(g, &red).unwrap();
        prop_assert_eq!(kd_folio(&host, k, d, Engine::Dp).unwrap(), kd_folio(&host, k, d, Engine::Oracle).unwrap());
    }
}

fn random_valleys(r: &mut ChaCha8Rng, s: usize, rails: usize) -> Vec<Valley> {
    let mut out = Vec::new();
    let mut j = r.gen_range(0..2);
    while j + 3 < rails {
        let span = r.gen_range(3..=(rails - 1 - j).min(8));
        let depth = r.gen_range(0..s);
        let mut v = Valley { from: j, to: j + span, depth, bumps: vec![], dips: vec![] };
        let a = r.gen_range(1..span - 1);
        let b = r.gen_range(a + 1..span);
        if depth + 1 < s && r.gen_bool(0.5) {
            v.bumps.push((a, b));
        } else if depth > 0 && r.gen_bool(0.5) {
            v.dips.push((a, b));
        }
        out.push(v);
        j += span + r.gen_range(1..3);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn drained_interiors_nest_or_are_disjoint(seed in any::<u64>(), s in 2usize..5, rails in 10usize..20) {
        let mut r = rng(seed);
        let w = mesh_well(s, rails, &random_valleys(&mut r, s, rails)).unwrap();
        let d = drain(&w).unwrap();
        prop_assert!(d.is_drained());
        prop_assert!(d.edge_count() <= w.edge_count());
        let ints: Vec<Vec<bool>> = (0..d.paths.len()).map(|i| d.path_interior_faces(i)).collect();
        for i in 0..ints.len() {
            for j in i + 1..ints.len() {
                let (a, b) = (&ints[i], &ints[j]);
                let sub = |x: &[bool], y: &[bool]| x.iter().zip(y).all(|(&p, &q)| !p || q);
                let disjoint = a.iter().zip(b).all(|(&p, &q)| !(p && q));
                prop_assert!(disjoint || sub(a, b) || sub(b, a));
            }
        }
    }

    #[test]
    fn disc_routes_peel_from_the_outside(seed in any::<u64>(), t in 1usize..5, paths in 2usize..7) {
        let mut r = rng(seed);
        let rails = 2 * paths;
        let plane = cylindrical_mesh_plane(t + 1, rails).unwrap();
        let cc = ConcentricCycles::new(plane, (1..=t).map(|x| mesh_ring(rails, x)).collect()).unwrap();
        let crossing: Vec<Vec<usize>> = (0..paths).map(|i| { let mut p = mesh_rail(rails, t, 2 * i); p.pop(); p }).collect();
        let nest = Nest::new(&cc, &crossing).unwrap();
        let terms: Vec<usize> = crossing.iter().map(|p| p[0]).collect();
        let pats: Vec<Pattern> = all_patterns(&terms, t).into_iter().filter(|p| feasible_on_disc(p, nest.cuffs().0).unwrap()).collect();
        let p = pats.choose(&mut r).unwrap();
        let l = nest.route_disc(p).unwrap().unwrap();
        validate_linkage(&cc.plane.graph, &l).unwrap();
        prop_assert!(pattern_of(&cc.plane.graph, &l).unwrap().same_multiset(p));
        // cycle index t - |p| (0-based) is the deepest one used
        let inside = cc.plane.strict_interior_vertices(&cc.cycles[t - p.len()]);
        prop_assert!(l.paths.iter().flatten().all(|&v| !inside[v]));
    }

    #[test]
    fn cylinder_routes_realize_the_pattern(seed in any::<u64>(), k in 1usize..4, spare in 0usize..2) {
        let mut r = rng(seed);
        let t = 2 * k + spare;
        let rails = 4 * k;
        let plane = cylindrical_mesh_plane(t, rails).unwrap();
        let cc = ConcentricCycles::new(plane, (0..t).map(|x| mesh_ring(rails, x)).collect()).unwrap();
        let crossing: Vec<Vec<usize>> = (0..2 * k).map(|i| mesh_rail(rails, t - 1, 2 * i)).collect();
        let nest = Nest::new(&cc, &crossing).unwrap();
        let mut terms: Vec<usize> = crossing.iter().map(|p| p[0]).collect();
        terms.extend(crossing.iter().map(|p| *p.last().unwrap()));
        terms.shuffle(&mut r);
        let pairs: Vec<(usize, usize)> = (0..r.gen_range(1..=k)).map(|j| (terms[2 * j], terms[2 * j + 1])).collect();
        let p = Pattern::new(&pairs);
        let (o, i) = nest.cuffs();
        let feasible = feasible_on_cylinder(&p, o, i).unwrap();
        match nest.route_cylinder(&p).unwrap() {
            Some(l) => {
                prop_assert!(feasible);
                validate_linkage(&cc.plane.graph, &l).unwrap();
                prop_assert_eq!(l.paths.len(), p.len());
                prop_assert!(pattern_of(&cc.plane.graph, &l).unwrap().same_multiset(&p));
            }
            None => prop_assert!(!feasible),
        }
    }
}

fn pipeline_fixture(r: &mut ChaCha8Rng) -> (AnnotatedGraph, usize, usize) {
    let core_n = r.gen_range(3..=5);
    let mut edges = random_graph(r, core_n).edges();
    let mut n = core_n;
    let s = r.gen_range(5..=7);
    for a in 0..s {
        for b in a + 1..s {
            edges.push((n + a, n + b));
        }
    }
    for _ in 0..r.gen_range(1..=3) {
        edges.push((r.gen_range(0..core_n), n + r.gen_range(0..s)));
    }
    n += s;
    let red: Vec<usize> = (0..core_n).filter(|_| r.gen_bool(0.5)).take(2).collect();
    let red = if red.is_empty() { vec![0] } else { red };
    let mut dedup: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    dedup.sort_unstable();
    dedup.dedup();
    (AnnotatedGraph::new(Graph::new(n, &dedup).unwrap(), &red).unwrap(), r.gen_range(1..=2), r.gen_range(0..=1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn every_traced_deletion_keeps_the_folio(seed in any::<u64>()) {
        let (host, k, d) = pipeline_fixture(&mut rng(seed));
        let cfg = PipelineConfig::default();
        let (red, trace) = reduce(&host, k, d, &cfg).unwrap();
        let mut cur = host.clone();
        let mut ids: Vec<usize> = (0..host.graph.n()).collect();
        for del in &trace.deletions {
            let pos = ids.iter().position(|&x| x == del.vertex).unwrap();
            let next = cur.delete_vertex(pos);
            prop_assert_eq!(kd_folio(&cur, k, d, Engine::Oracle).unwrap(), kd_folio(&next, k, d, Engine::Oracle).unwrap());
            if del.justification == Justification::CliqueRule {
                prop_assert_eq!(del.oracle_confirmed, Some(true));
            }
            ids.remove(pos);
            cur = next;
        }
        prop_assert_eq!(cur.graph.edges(), red.graph.edges());
        if trace.status == ReductionStatus::ThresholdMet {
            prop_assert!(reduce(&red, k, d, &cfg).unwrap().1.deletions.is_empty());
        }
    }
}

#[test]
fn gamma_contains_its_grid() {
    for k in 2..=4 {
        let g = gamma_hat_opts(k, false).unwrap();
        let m = g.m;
        for r in 0..m {
            for c in 0..m {
                if c + 1 < m {
                    assert!(g.graph.has_edge(r * m + c, r * m + c + 1));
                }
                if r + 1 < m {
                    assert!(g.graph.has_edge(r * m + c, (r + 1) * m + c));
                }
            }
        }
    }
}

#[test]
fn gamma_certificates_match_exact_width() {
    let g2 = gamma_hat_opts(2, false).unwrap();
    let c = treewidth_certificates(&g2.graph, 3).unwrap();
    assert_eq!(verify_lower(&g2.graph, &c.lower), Some(3));
    assert!(matches!(exact_treewidth(&g2.graph, 9).unwrap(), Treewidth::Exact { width: 3, .. }));
    let g3 = gamma_hat_opts(3, false).unwrap();
    let c = treewidth_certificates(&g3.graph, 7).unwrap();
    assert_eq!(verify_lower(&g3.graph, &c.lower), Some(7));
    assert!(validate_td(&g3.graph, &c.upper).valid && c.upper.width() == 7);
}

#[test]
fn gadget_blocks_stay_nonplanar_and_two_connected() {
    let fam = regular_gadgets(2).unwrap();
    let dec = decorate_gamma(2, &fam).unwrap();
    let k5 = Graph::complete(5);
    let k33 = Graph::new(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]).unwrap();
    for b in &dec.blocks {
        let (sub, _) = dec.graph.induced(b);
        for v in 0..sub.n() {
            let h = sub.delete_vertex(v);
            let bl = blocks(&h);
            assert_eq!(bl.blocks.len(), 1, "block minus a vertex is not 2-connected");
            assert!(bl.bridges.is_empty() && bl.isolated.is_empty());
            assert!(find_minor(&h, &k5).unwrap().is_some() || find_minor(&h, &k33).unwrap().is_some());
        }
    }
}
