//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use minorfolio::constructions::{gamma_hat, gamma_hat_opts, gnp_with, regular_gadgets, verify_hk_deletion};
use minorfolio::decomposition::{exact_treewidth, heuristic_decomposition, treewidth_certificates, validate_td, verify_lower, Treewidth};
use minorfolio::embedding::{
    all_patterns, cylindrical_mesh_plane, drain, dry, feasible_on_cylinder, feasible_on_disc, homotopy_classes, mesh_rail, mesh_ring,
    mesh_well, ConcentricCycles, Nest, Curve, CurveSystem, Surface, Valley,
};
use minorfolio::folio::{folio, folio_bruteforce, folio_dp, kd_folio, Engine, FolioConfig};
use minorfolio::linkage::{disjoint_paths, pattern_of, rooted_encoding, validate_linkage, vital_report, Pattern, DFS_NODE_BUDGET};
use minorfolio::minor::bidim;
use minorfolio::pipeline::{reduce, solve_folio, Justification, PipelineConfig, ReductionStatus};
use minorfolio::{AnnotatedGraph, Graph, RootedGraph};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let p = rng.gen_range(0.2..0.8);
    gnp_with(n, p, rng)
}

fn c1_treewidth() -> Check {
    let g2 = gamma_hat(2).map_err(e2s)?;
    let t = Instant::now();
    let heur = heuristic_decomposition(&g2.graph).width();
    let w = match exact_treewidth(&g2.graph, heur).map_err(e2s)? {
        Treewidth::Exact { width, .. } => width,
        Treewidth::AboveBound => return Err("exact solver found nothing below the heuristic bound".into()),
    };
    let t2 = t.elapsed();
    ensure(w == 3, format!("tw(Γ̂_2) = {w}, expected 3"))?;
    ensure(t2 < Duration::from_secs(1), format!("exact solver took {}", secs(t2)))?;
    let g3 = gamma_hat_opts(3, false).map_err(e2s)?;
    let t = Instant::now();
    let c = treewidth_certificates(&g3.graph, 7).map_err(e2s)?;
    let t3 = t.elapsed();
    let lower = verify_lower(&g3.graph, &c.lower).ok_or("lower certificate does not verify")?;
    ensure(lower == 7, format!("lower certificate proves {lower}"))?;
    ensure(validate_td(&g3.graph, &c.upper).valid, "upper decomposition invalid")?;
    ensure(c.upper.width() == 7, format!("upper width {}", c.upper.width()))?;
    ensure(t3 < Duration::from_secs(10), format!("certificates took {}", secs(t3)))?;
    Ok(format!("tw(Γ̂_2)=3 in {}, Γ̂_3 certificates at 7 in {}", secs(t2), secs(t3)))
}

fn c2_vitality() -> Check {
    let mut notes = Vec::new();
    for (k, limit) in [(2, 1.0), (3, f64::INFINITY)] {
        let g = gamma_hat_opts(k, false).map_err(e2s)?;
        let t = Instant::now();
        let r = vital_report(&g.graph, &g.witness, DFS_NODE_BUDGET).map_err(e2s)?;
        let el = t.elapsed();
        ensure(r.vital, format!("witness for k={k} is not vital (count {})", r.count))?;
        ensure(el.as_secs_f64() < limit, format!("k={k} took {}", secs(el)))?;
        notes.push(format!("k={k} {} via {} in {}", if r.proven { "proven" } else { "bounded" }, r.engine, secs(el)));
    }
    Ok(notes.join(", "))
}

fn c3_dp_vs_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = Instant::now();
    let mut members = 0;
    for i in 0..200 {
        let n = rng.gen_range(1..=8);
        let g = random_graph(&mut rng, n);
        let r = rng.gen_range(0..=2);
        let roots: Vec<usize> = (0..r).map(|_| rng.gen_range(0..n)).collect();
        let d = rng.gen_range(0..=2);
        let rg = RootedGraph::new(g.clone(), &roots).map_err(e2s)?;
        let a = folio_bruteforce(&rg, d).map_err(e2s)?;
        let b = folio_dp(&rg, d, &heuristic_decomposition(&g)).map_err(e2s)?;
        ensure(a == b, format!("instance {i}: oracle {} members, dp {}", a.len(), b.len()))?;
        members += a.len();
    }
    let el = t.elapsed();
    ensure(el < Duration::from_secs(60), format!("took {}", secs(el)))?;
    Ok(format!("200 instances agree ({members} members total) in {}", secs(el)))
}

fn c4_kdp() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = FolioConfig::default();
    let mut yes = 0;
    for i in 0..200 {
        let n = rng.gen_range(2..=10);
        let g = random_graph(&mut rng, n);
        let k = rng.gen_range(1..=2.min(n / 2));
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(&mut rng);
        let pairs: Vec<(usize, usize)> = (0..k).map(|j| (vs[2 * j], vs[2 * j + 1])).collect();
        let p = Pattern::new(&pairs);
        let direct = disjoint_paths(&g, &p).map_err(e2s)?;
        if let Some(l) = &direct {
            ensure(pattern_of(&g, l).map(|q| q.same_multiset(&p)).unwrap_or(false), format!("instance {i}: bad linkage"))?;
        }
        let (host, pat) = rooted_encoding(&g, &p);
        let member = folio(&host, 0, Engine::Oracle, &cfg).map_err(e2s)?.contains_graph(&pat).map_err(e2s)?;
        ensure(direct.is_some() == member, format!("instance {i}: paths {} vs folio {member}", direct.is_some()))?;
        yes += member as usize;
    }
    Ok(format!("200 instances agree ({yes} linkable)"))
}

fn c5_hk() -> Check {
    let fam = regular_gadgets(2).map_err(e2s)?;
    ensure(fam.n == 8, format!("gadgets on {} vertices", fam.n))?;
    ensure(fam.available >= 2, format!("only {} gadgets", fam.available))?;
    let t = Instant::now();
    let r = verify_hk_deletion(2, &fam).map_err(e2s)?;
    let el = t.elapsed();
    ensure(r.minor_present, "H_2 is not a minor of the decorated instance")?;
    ensure(r.per_vertex_absent, "some deletion keeps H_2")?;
    Ok(format!("{{true, true}} with {} gadgets on 8 vertices in {}", fam.available, secs(el)))
}

fn c6_bidim() -> Check {
    let mut notes = Vec::new();
    for k in 2..=3 {
        let g = gamma_hat_opts(k, false).map_err(e2s)?;
        let b = bidim(&g.annotated(), 3).map_err(e2s)?;
        ensure(0.5 * (b as f64).sqrt() <= k as f64, format!("k={k}: b={b}"))?;
        notes.push(format!("b_{k}={b}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..100 {
        let n = rng.gen_range(1..=9);
        let g = random_graph(&mut rng, n);
        let r: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let extra: Vec<usize> = (0..n).filter(|v| !r.contains(v) && rng.gen_bool(0.5)).collect();
        let more: Vec<usize> = r.iter().chain(&extra).copied().collect();
        let b = bidim(&AnnotatedGraph::new(g.clone(), &r).map_err(e2s)?, 3).map_err(e2s)?;
        let b2 = bidim(&AnnotatedGraph::new(g, &more).map_err(e2s)?, 3).map_err(e2s)?;
        ensure(b <= b2, format!("instance {i}: adding red vertices lowered bidim {b} -> {b2}"))?;
        ensure(b * b <= r.len(), format!("instance {i}: bidim {b} with |R| = {}", r.len()))?;
    }
    Ok(format!("{}; 100 random instances monotone and bidim² ≤ |R|", notes.join(", ")))
}

/// A disc nest: rings 1..=t of a mesh with t + 1 rings, so ring 0 lies inside C_1.
fn disc_nest(t: usize, paths: usize) -> Result<(ConcentricCycles, Vec<Vec<usize>>), String> {
    let rails = 2 * paths;
    let plane = cylindrical_mesh_plane(t + 1, rails).map_err(e2s)?;
    let cc = ConcentricCycles::new(plane, (1..=t).map(|r| mesh_ring(rails, r)).collect()).map_err(e2s)?;
    let crossing = (0..paths)
        .map(|i| {
            let mut p = mesh_rail(rails, t, 2 * i);
            p.pop();
            p
        })
        .collect();
    Ok((cc, crossing))
}

fn cylinder_nest(t: usize, paths: usize) -> Result<(ConcentricCycles, Vec<Vec<usize>>), String> {
    let rails = 2 * paths;
    let plane = cylindrical_mesh_plane(t, rails).map_err(e2s)?;
    let cc = ConcentricCycles::new(plane, (0..t).map(|r| mesh_ring(rails, r)).collect()).map_err(e2s)?;
    let crossing = (0..paths).map(|i| mesh_rail(rails, t - 1, 2 * i)).collect();
    Ok((cc, crossing))
}

fn c7_routing() -> Check {
    let start = Instant::now();
    let (mut disc_ok, mut disc_no, mut cyl_ok, mut cyl_no) = (0, 0, 0, 0);
    for k in 1..=4 {
        let (cc, crossing) = disc_nest(k, 2 * k)?;
        let inner_disc: BTreeSet<usize> = (0..4 * k).collect();
        let nest = Nest::new(&cc, &crossing).map_err(e2s)?;
        let outer_order = nest.cuffs().0.to_vec();
        let terms: Vec<usize> = crossing.iter().map(|p| p[0]).collect();
        for p in all_patterns(&terms, k.min(4)) {
            let feasible = feasible_on_disc(&p, &outer_order).map_err(e2s)?;
            match nest.route_disc(&p).map_err(|e| format!("disc k={k} {:?}: {e}", p.pairs()))? {
                Some(l) => {
                    ensure(feasible, format!("disc k={k}: routed an infeasible pattern {:?}", p.pairs()))?;
                    validate_linkage(&cc.plane.graph, &l).map_err(e2s)?;
                    ensure(pattern_of(&cc.plane.graph, &l).map_err(e2s)?.same_multiset(&p), "disc: wrong pattern")?;
                    ensure(l.paths.iter().flatten().all(|v| !inner_disc.contains(v)), format!("disc k={k}: entered the inner disc"))?;
                    disc_ok += 1;
                }
                None => {
                    ensure(!feasible, format!("disc k={k}: feasible pattern {:?} not routed", p.pairs()))?;
                    disc_no += 1;
                }
            }
        }
        let (cc, crossing) = cylinder_nest(2 * k, 2 * k)?;
        let outer: Vec<usize> = crossing.iter().map(|p| p[0]).collect();
        let inner: Vec<usize> = crossing.iter().map(|p| *p.last().unwrap()).collect();
        let nest = Nest::new(&cc, &crossing).map_err(e2s)?;
        let (oo, io) = nest.cuffs();
        let terms: Vec<usize> = outer.iter().chain(&inner).copied().collect();
        for p in all_patterns(&terms, k.min(4)) {
            let feasible = feasible_on_cylinder(&p, oo, io).map_err(e2s)?;
            match nest.route_cylinder(&p).map_err(|e| format!("cylinder k={k} {:?}: {e}", p.pairs()))? {
                Some(l) => {
                    ensure(feasible, format!("cylinder k={k}: routed an infeasible pattern {:?}", p.pairs()))?;
                    validate_linkage(&cc.plane.graph, &l).map_err(e2s)?;
                    ensure(pattern_of(&cc.plane.graph, &l).map_err(e2s)?.same_multiset(&p), "cylinder: wrong pattern")?;
                    ensure(l.paths.len() == p.len(), "cylinder: wrong cardinality")?;
                    cyl_ok += 1;
                }
                None => {
                    ensure(!feasible, format!("cylinder k={k}: feasible pattern {:?} not routed", p.pairs()))?;
                    cyl_no += 1;
                }
            }
        }
    }
    let el = start.elapsed();
    ensure(el < Duration::from_secs(30), format!("took {}", secs(el)))?;
    Ok(format!(
        "disc {disc_ok} routed / {disc_no} rejected, cylinder {cyl_ok} routed / {cyl_no} rejected, in {}",
        secs(el)
    ))
}

/// Random non-crossing valleys on disjoint rail intervals, some with a nested valley.
fn random_valleys(rng: &mut ChaCha8Rng, s: usize, rails: usize) -> Vec<Valley> {
    let mut out = Vec::new();
    let mut j = rng.gen_range(0..2);
    while j + 3 < rails {
        let span = rng.gen_range(3..=(rails - 1 - j).min(9));
        let (from, to) = (j, j + span);
        let depth = rng.gen_range(0..s);
        let mut v = Valley { from, to, depth, bumps: vec![], dips: vec![] };
        let nest = span >= 6 && depth + 2 < s && rng.gen_bool(0.4);
        if !nest {
            // one bump or dip strictly inside the span
            let a = rng.gen_range(1..span - 1);
            let b = rng.gen_range(a + 1..span);
            match rng.gen_range(0..3) {
                0 if depth + 1 < s => v.bumps.push((a, b)),
                1 if depth > 0 => v.dips.push((a, b)),
                _ => {}
            }
        } else if depth > 0 && rng.gen_bool(0.5) {
            v.dips.push((1, 2));
        }
        out.push(v);
        if nest {
            let inner_depth = rng.gen_range(depth + 2..s);
            out.push(Valley { from: from + 2, to: to - 2, depth: inner_depth, bumps: vec![], dips: vec![] });
        }
        j = to + rng.gen_range(1..3);
    }
    out
}

fn c8_wells() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut drained_moves, mut dried_moves) = (0, 0);
    for i in 0..100 {
        let s = rng.gen_range(2..=4);
        let rails = rng.gen_range(10..=20);
        let valleys = random_valleys(&mut rng, s, rails);
        let w = mesh_well(s, rails, &valleys).map_err(|e| format!("fixture {i}: {e}"))?;
        let before = w.edge_count();
        let d = drain(&w).map_err(|e| format!("fixture {i}: drain: {e}"))?;
        ensure(d.is_drained(), format!("fixture {i}: drain output not drained"))?;
        ensure(d.edge_count() <= before, format!("fixture {i}: drain grew the well"))?;
        ensure(d.endpoint_multiset() == w.endpoint_multiset(), format!("fixture {i}: drain moved endpoints"))?;
        let y = dry(&w).map_err(|e| format!("fixture {i}: dry: {e}"))?;
        ensure(y.is_dry(), format!("fixture {i}: dry output not dry"))?;
        ensure(y.edge_count() <= before, format!("fixture {i}: dry grew the well"))?;
        ensure(y.endpoint_multiset() == w.endpoint_multiset(), format!("fixture {i}: dry moved endpoints"))?;
        drained_moves += (d.edge_count() < before) as usize;
        dried_moves += (y.edge_count() < before) as usize;
    }
    Ok(format!("100 wells; drain shrank {drained_moves}, dry shrank {dried_moves}"))
}

/// Random non-crossing matching on `positions` (in cyclic order), as local curves.
fn local_curves(rng: &mut ChaCha8Rng, cuff: usize, positions: &[usize], out: &mut Vec<Curve>) {
    let mut stack: Vec<usize> = Vec::new();
    for &p in positions {
        let close = !stack.is_empty() && rng.gen_bool(0.5);
        if close {
            let a = stack.pop().unwrap();
            out.push(Curve { start: (cuff, a), end: (cuff, p), winding: 0 });
        } else if rng.gen_bool(0.7) {
            stack.push(p);
        }
    }
}

fn c9_homotopy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100 {
        let len = rng.gen_range(2..=16);
        let mut curves = Vec::new();
        local_curves(&mut rng, 0, &(0..len).collect::<Vec<_>>(), &mut curves);
        let empty = curves.is_empty();
        let cs = CurveSystem::new(Surface::Disc, vec![len], curves).map_err(|e| format!("disc {i}: {e}"))?;
        let c = homotopy_classes(&cs);
        ensure(c == usize::from(!empty), format!("disc {i}: {c} classes"))?;
    }
    let mut attained = 0;
    for i in 0..100 {
        let (l0, l1) = (rng.gen_range(4..=12), rng.gen_range(4..=12));
        let c = rng.gen_range(0..=3.min(l0.min(l1) / 2));
        let mut p0: Vec<usize> = (0..l0).collect();
        p0.shuffle(&mut rng);
        let mut p0: Vec<usize> = p0[..c].to_vec();
        p0.sort_unstable();
        let mut p1: Vec<usize> = (0..l1).collect();
        p1.shuffle(&mut rng);
        let mut p1: Vec<usize> = p1[..c].to_vec();
        p1.sort_unstable();
        let shift = if c > 0 { rng.gen_range(0..c) } else { 0 };
        let winding = rng.gen_range(-2..=2);
        let mut curves: Vec<Curve> =
            (0..c).map(|j| Curve { start: (0, p0[j]), end: (1, p1[(j + shift) % c]), winding }).collect();
        for (cuff, len, ends) in [(0, l0, &p0), (1, l1, &p1)] {
            // local curves live in the gaps between crossing endpoints
            let mut gaps: Vec<Vec<usize>> = Vec::new();
            if ends.is_empty() {
                gaps.push((0..len).collect());
            } else {
                for j in 0..ends.len() {
                    let (a, b) = (ends[j], ends[(j + 1) % ends.len()]);
                    let gap_len = if ends.len() == 1 { len - 1 } else { (b + len - a) % len - 1 };
                    gaps.push((1..=gap_len).map(|x| (a + x) % len).collect());
                }
            }
            for g in gaps {
                local_curves(&mut rng, cuff, &g, &mut curves);
            }
        }
        let cs = CurveSystem::new(Surface::Cylinder, vec![l0, l1], curves).map_err(|e| format!("cylinder {i}: {e}"))?;
        let n = homotopy_classes(&cs);
        ensure(n <= 3, format!("cylinder {i}: {n} classes"))?;
        attained += (n == 3) as usize;
    }
    ensure(attained > 0, "no cylinder fixture attains 3 classes")?;
    Ok(format!("200 systems; bound 3 attained by {attained} cylinder fixtures"))
}

/// A random core with red vertices, plus pendant cliques behind small cuts and red-free components.
fn pipeline_fixture(rng: &mut ChaCha8Rng) -> (AnnotatedGraph, usize, usize) {
    let core_n = rng.gen_range(3..=5);
    let core = random_graph(rng, core_n);
    let mut edges = core.edges();
    let mut n = core_n;
    let k = rng.gen_range(1..=2);
    let d = rng.gen_range(0..=1);
    for _ in 0..rng.gen_range(1..=2) {
        let s = rng.gen_range(5..=7);
        let cut: Vec<usize> = (0..rng.gen_range(1..=3.min(core_n))).map(|_| rng.gen_range(0..core_n)).collect();
        for a in 0..s {
            for b in a + 1..s {
                edges.push((n + a, n + b));
            }
        }
        for &c in &cut {
            edges.push((c, n + rng.gen_range(0..s)));
        }
        n += s;
    }
    if rng.gen_bool(0.5) {
        let m = rng.gen_range(2..=3);
        let comp = random_graph(rng, m);
        edges.extend(comp.edges().into_iter().map(|(a, b)| (a + n, b + n)));
        n += m;
    }
    let r: Vec<usize> = (0..core_n).filter(|_| rng.gen_bool(0.5)).take(2).collect();
    let r = if r.is_empty() { vec![0] } else { r };
    (AnnotatedGraph::new(Graph::new(n, &edges).unwrap(), &r).unwrap(), k, d)
}

fn check_pipeline(host: &AnnotatedGraph, k: usize, d: usize, cfg: &PipelineConfig, tag: &str) -> Result<(usize, usize), String> {
    let direct = kd_folio(host, k, d, Engine::Oracle).map_err(e2s)?;
    let solved = solve_folio(host, k, d, cfg).map_err(e2s)?;
    ensure(direct == solved, format!("{tag}: folio changed ({} vs {})", direct.len(), solved.len()))?;
    let (red, trace) = reduce(host, k, d, cfg).map_err(e2s)?;
    ensure(trace.replay(&host.graph).edges() == red.graph.edges(), format!("{tag}: trace does not replay"))?;
    let clique: Vec<_> = trace.deletions.iter().filter(|x| x.justification == Justification::CliqueRule).collect();
    ensure(clique.iter().all(|x| x.oracle_confirmed == Some(true)), format!("{tag}: clique-rule deletion failed the oracle"))?;
    if trace.status == ReductionStatus::ThresholdMet {
        let (_, again) = reduce(&red, k, d, cfg).map_err(e2s)?;
        ensure(again.deletions.is_empty(), format!("{tag}: reduce is not idempotent"))?;
    }
    Ok((trace.deletions.len(), clique.len()))
}

fn c10_pipeline() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cfg = PipelineConfig::default();
    let (mut dels, mut cliques) = (0, 0);
    for i in 0..50 {
        let (host, k, d) = pipeline_fixture(&mut rng);
        let (a, b) = check_pipeline(&host, k, d, &cfg, &format!("fixture {i}"))?;
        dels += a;
        cliques += b;
    }
    // Γ̂_2 with a 12-clique behind a 3-cut
    let g = gamma_hat(2).map_err(e2s)?;
    let base = g.graph.n();
    let mut edges = g.graph.edges();
    for a in 0..12 {
        for b in a + 1..12 {
            edges.push((base + a, base + b));
        }
    }
    edges.extend([(1, base), (4, base + 1), (7, base + 2)]);
    let host = AnnotatedGraph::new(Graph::new(base + 12, &edges).map_err(e2s)?, &g.terminals).map_err(e2s)?;
    let (a, b) = check_pipeline(&host, 2, 0, &cfg, "Γ̂_2 blob")?;
    ensure(b > 0, "the clique rule never fired on the Γ̂_2 blob")?;
    Ok(format!("50 fixtures + Γ̂_2 blob; {} deletions, {} by the clique rule", dels + a, cliques + b))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("treewidth of Γ̂", c1_treewidth),
        ("vitality", c2_vitality),
        ("folio oracle = DP", c3_dp_vs_oracle),
        ("k-DP cross-check", c4_kdp),
        ("H_k deletion", c5_hk),
        ("bidimensionality", c6_bidim),
        ("routing", c7_routing),
        ("well rewrites", c8_wells),
        ("homotopy counting", c9_homotopy),
        ("pipeline soundness", c10_pipeline),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{}]", i + 1, secs(t.elapsed())),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{}]", i + 1, secs(t.elapsed()));
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
