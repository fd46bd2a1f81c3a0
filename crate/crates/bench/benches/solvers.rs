use criterion::{black_box, criterion_group, criterion_main, Criterion};

use minorfolio::canon::canonical_code;
use minorfolio::constructions::gamma_hat_opts;
use minorfolio::decomposition::{exact_treewidth, heuristic_decomposition};
use minorfolio::embedding::Nest;
use minorfolio::folio::{folio_bruteforce, folio_dp, kd_folio, Engine};
use minorfolio::linkage::{vital_report, Pattern, DFS_NODE_BUDGET};
use minorfolio::pipeline::{reduce, PipelineConfig};
use minorfolio_bench::{gamma_rooted, gamma_with_clique, mesh_nest, random_annotated};

fn folio_engines(c: &mut Criterion) {
    let host = gamma_rooted();
    let td = heuristic_decomposition(&host.graph);
    c.bench_function("folio_dp gamma2 d1", |b| b.iter(|| folio_dp(black_box(&host), 1, &td).unwrap()));
    c.bench_function("folio_oracle gamma2 d1", |b| b.iter(|| folio_bruteforce(black_box(&host), 1).unwrap()));
    let ann = random_annotated(9, 0.4, 7);
    c.bench_function("kd_folio dp n9 k2 d1", |b| b.iter(|| kd_folio(black_box(&ann), 2, 1, Engine::Dp).unwrap()));
}

fn linkages(c: &mut Criterion) {
    let g = gamma_hat_opts(2, false).unwrap();
    c.bench_function("vitality gamma2", |b| b.iter(|| vital_report(black_box(&g.graph), &g.witness, DFS_NODE_BUDGET).unwrap()));
}

fn routing(c: &mut Criterion) {
    let (cc, crossing) = mesh_nest(6, 6);
    let nest = Nest::new(&cc, &crossing).unwrap();
    let o: Vec<usize> = crossing.iter().map(|p| p[0]).collect();
    let i: Vec<usize> = crossing.iter().map(|p| *p.last().unwrap()).collect();
    let p = Pattern::new(&[(o[0], o[1]), (i[2], i[3]), (o[4], i[5])]);
    c.bench_function("route_cylinder t6 three pairs", |b| b.iter(|| nest.route_cylinder(black_box(&p)).unwrap()));
}

fn treewidth_and_canon(c: &mut Criterion) {
    let g = gamma_hat_opts(2, false).unwrap().graph;
    c.bench_function("exact_treewidth gamma2", |b| b.iter(|| exact_treewidth(black_box(&g), 9).unwrap()));
    let host = gamma_rooted();
    c.bench_function("canonical_code gamma2 rooted", |b| b.iter(|| canonical_code(black_box(&host)).unwrap()));
}

fn pipeline(c: &mut Criterion) {
    let host = gamma_with_clique();
    let cfg = PipelineConfig::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("reduce gamma2 + 12-clique", |b| b.iter(|| reduce(black_box(&host), 2, 0, &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, folio_engines, linkages, routing, treewidth_and_canon, pipeline);
criterion_main!(benches);
