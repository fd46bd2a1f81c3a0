use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use minorfolio::constructions::{
    cylindrical_mesh, decorate_gamma, gamma_hat, gnp, grid, h_graph, railed_annulus, regular_gadgets, verify_hk_deletion, wall,
    z_graph,
};
use minorfolio::decomposition::{exact_treewidth, heuristic_decomposition, parse_td_format, to_td_format, treewidth_certificates, Treewidth};
use minorfolio::embedding::{
    all_patterns, cylindrical_mesh_plane, feasible_on_cylinder, feasible_on_disc, mesh_rail, mesh_ring, route_cylinder, route_disc,
    ConcentricCycles,
};
use minorfolio::folio::{folio, folio_dp, kd_folio, Engine as FolioEngine, FolioConfig};
use minorfolio::graph::{parse_edge_list, to_dot, to_edge_list};
use minorfolio::linkage::{disjoint_paths, pattern_of, validate_linkage, vital_report, Linkage, Pattern, DFS_NODE_BUDGET};
use minorfolio::minor::bidim;
use minorfolio::pipeline::{reduce, PipelineConfig, ReductionStatus, RuleChoice};
use minorfolio::{AnnotatedGraph, Error, Graph, RootedGraph};

#[derive(Parser)]
#[command(name = "minorfolio", version, about = "Folios, linkages and irrelevant vertices at desk scale")]
struct Cli {
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a structured instance.
    Gen(GenArgs),
    /// Treewidth bounds and certificates.
    Tw(TwArgs),
    /// Rooted folio by dynamic programming over a tree decomposition.
    Dp(DpArgs),
    /// Rooted or (k,d)-folio with a chosen engine.
    Folio(FolioArgs),
    /// Vitality of a linkage for a pattern.
    Vital(VitalArgs),
    /// Irrelevant-vertex reduction.
    Reduce(ReduceArgs),
    /// Route patterns on a generated cylindrical mesh.
    Route(RouteArgs),
    /// H_k deletion experiment on the decorated Γ̂_k.
    VerifyHk(HkArgs),
    /// Bidimensionality of an annotated graph.
    Bidim(BidimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Grid,
    Wall,
    CylMesh,
    RailedAnnulus,
    GammaHat,
    ZGraph,
    Gadgets,
    HGraph,
    Decorated,
    Gnp,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    El,
    Dot,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::El)]
    format: Format,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TwArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Run the exact solver.
    #[arg(long)]
    exact: bool,
    /// Produce matching lower and upper certificates for this width.
    #[arg(long)]
    certify: Option<usize>,
    #[arg(long)]
    td_out: Option<PathBuf>,
}

#[derive(Args)]
struct DpArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',')]
    roots: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    d: usize,
    #[arg(long)]
    td: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum EngineArg {
    Oracle,
    Dp,
    Both,
}

#[derive(Args)]
struct FolioArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Root tuple for a rooted folio.
    #[arg(long, value_delimiter = ',')]
    roots: Vec<usize>,
    /// Annotated set for a (k,d)-folio; requires --k.
    #[arg(long, value_delimiter = ',')]
    red: Option<Vec<usize>>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    d: usize,
    #[arg(long, value_enum, default_value_t = EngineArg::Dp)]
    engine: EngineArg,
}

#[derive(Args)]
struct VitalArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pattern: PathBuf,
    /// Linkage JSON; found by search when absent.
    #[arg(long)]
    linkage: Option<PathBuf>,
    #[arg(long, default_value_t = DFS_NODE_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RulesArg {
    Oracle,
    CliqueRule,
    Both,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',')]
    red: Vec<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    d: usize,
    #[arg(long, default_value_t = 4)]
    threshold: usize,
    #[arg(long, value_enum, default_value_t = RulesArg::Both)]
    rules: RulesArg,
    /// Where to write the reduced graph.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Surface {
    Disc,
    Cylinder,
}

#[derive(Args)]
struct RouteArgs {
    #[arg(long, value_enum, default_value_t = Surface::Disc)]
    surface: Surface,
    /// Number of concentric cycles.
    #[arg(long)]
    t: usize,
    /// Number of crossing paths.
    #[arg(long)]
    paths: usize,
    /// Pattern file over mesh vertex ids; every pattern with up to --max-pairs pairs when absent.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    max_pairs: usize,
}

#[derive(Args)]
struct HkArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(Args)]
struct BidimArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',')]
    red: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    cap: usize,
}

/// Outcome of a command: its JSON result and whether every check passed.
struct Outcome {
    value: Value,
    ok: bool,
}

fn ok(value: Value) -> Outcome {
    Outcome { value, ok: true }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })
}

fn load_graph(path: &Path) -> Result<Graph, Error> {
    parse_edge_list(&read(path)?)
}

fn need(v: Option<usize>, name: &str) -> Result<usize, Error> {
    v.ok_or_else(|| Error::PreconditionViolated(format!("--{name} is required")))
}

fn emit_graph(g: &Graph, args: &GenArgs, extra: Value) -> Result<Outcome, Error> {
    let text = match args.format {
        Format::El => to_edge_list(g),
        Format::Dot => to_dot(g, "G"),
    };
    let mut out = json!({ "n": g.n(), "m": g.m() });
    if let Some(p) = &args.output {
        write(p, &text)?;
        out["output"] = json!(p.display().to_string());
    } else {
        out["graph"] = json!(text);
    }
    if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
        o.extend(e);
    }
    Ok(ok(out))
}

fn cmd_gen(a: &GenArgs, seed: u64) -> Result<Outcome, Error> {
    match a.kind {
        GenKind::Grid => emit_graph(&grid(need(a.n, "n")?, need(a.m, "m")?)?, a, json!({})),
        GenKind::Wall => {
            let w = wall(need(a.n, "n")?)?;
            emit_graph(&w.graph, a, json!({ "perimeter": w.perimeter }))
        }
        GenKind::CylMesh => {
            let cm = cylindrical_mesh(need(a.n, "n")?, need(a.m, "m")?)?;
            emit_graph(&cm.graph, a, json!({ "cycles": cm.cycles, "rails": cm.rails }))
        }
        GenKind::RailedAnnulus => {
            let ra = railed_annulus(need(a.w, "w")?, need(a.r, "r")?)?;
            if let Some(p) = &a.output {
                write(&p.with_extension("plane"), &ra.plane.to_text())?;
            }
            emit_graph(&ra.plane.graph, a, json!({ "circles": ra.circles, "rails": ra.rails }))
        }
        GenKind::GammaHat => {
            let g = gamma_hat(need(a.k, "k")?)?;
            if let Some(p) = &a.output {
                write(&p.with_extension("pat"), &g.pattern.to_text())?;
                write(&p.with_extension("lnk.json"), &serde_json::to_string(&g.witness.to_json()).unwrap())?;
            }
            emit_graph(
                &g.graph,
                a,
                json!({ "pattern": g.pattern.pairs(), "witness": g.witness.to_json(), "vitality_checked": g.vitality_checked }),
            )
        }
        GenKind::ZGraph => {
            let z = z_graph(need(a.s, "s")?)?;
            emit_graph(&z.graph, a, json!({ "red": z.annotated() }))
        }
        GenKind::Gadgets => {
            let fam = regular_gadgets(need(a.k, "k")?)?;
            let members: Vec<String> = fam.members.iter().map(to_edge_list).collect();
            Ok(ok(json!({ "n": fam.n, "available": fam.available, "members": members })))
        }
        GenKind::HGraph => {
            let k = need(a.k, "k")?;
            let h = h_graph(k, &regular_gadgets(k)?)?;
            emit_graph(&h.graph, a, json!({ "bridges": h.bridges }))
        }
        GenKind::Decorated => {
            let k = need(a.k, "k")?;
            let dec = decorate_gamma(k, &regular_gadgets(k)?)?;
            emit_graph(&dec.graph, a, json!({ "core_n": dec.core_n, "blocks": dec.blocks }))
        }
        GenKind::Gnp => {
            let p = a.p.ok_or_else(|| Error::PreconditionViolated("--p is required".into()))?;
            emit_graph(&gnp(need(a.n, "n")?, p, seed), a, json!({ "seed": seed }))
        }
    }
}

fn cmd_tw(a: &TwArgs) -> Result<Outcome, Error> {
    let g = load_graph(&a.graph)?;
    let heur = heuristic_decomposition(&g);
    let mut out = json!({ "n": g.n(), "heuristic_width": heur.width() });
    let mut best = heur.clone();
    if a.exact {
        if let Treewidth::Exact { width, td } = exact_treewidth(&g, heur.width())? {
            out["exact_width"] = json!(width);
            best = td;
        }
    }
    let mut passed = true;
    if let Some(w) = a.certify {
        match treewidth_certificates(&g, w) {
            Ok(c) => {
                out["certificates"] = json!({ "lower": serde_json::to_value(&c.lower).unwrap(), "upper_width": c.upper.width() });
                best = c.upper;
            }
            Err(e) => {
                out["certificates"] = json!({ "error": e.to_string() });
                passed = false;
            }
        }
    }
    if let Some(p) = &a.td_out {
        write(p, &to_td_format(&best, g.n()))?;
    }
    Ok(Outcome { value: out, ok: passed })
}

fn cmd_dp(a: &DpArgs) -> Result<Outcome, Error> {
    let g = load_graph(&a.graph)?;
    let td = match &a.td {
        Some(p) => parse_td_format(&read(p)?)?.0,
        None => heuristic_decomposition(&g),
    };
    let rg = RootedGraph::new(g, &a.roots)?;
    let f = folio_dp(&rg, a.d, &td)?;
    Ok(ok(json!({ "width": td.width(), "folio": f.to_json() })))
}

fn cmd_folio(a: &FolioArgs) -> Result<Outcome, Error> {
    let g = load_graph(&a.graph)?;
    let cfg = FolioConfig::default();
    let run = |engine: FolioEngine| -> Result<minorfolio::folio::Folio, Error> {
        match &a.red {
            Some(red) => kd_folio(&AnnotatedGraph::new(g.clone(), red)?, need(a.k, "k")?, a.d, engine),
            None => folio(&RootedGraph::new(g.clone(), &a.roots)?, a.d, engine, &cfg),
        }
    };
    match a.engine {
        EngineArg::Oracle => Ok(ok(json!({ "folio": run(FolioEngine::Oracle)?.to_json() }))),
        EngineArg::Dp => Ok(ok(json!({ "folio": run(FolioEngine::Dp)?.to_json() }))),
        EngineArg::Both => {
            let o = run(FolioEngine::Oracle)?;
            let d = run(FolioEngine::Dp)?;
            let equal = o == d;
            Ok(Outcome { value: json!({ "oracle": o.to_json(), "dp": d.to_json(), "equal": equal }), ok: equal })
        }
    }
}

fn cmd_vital(a: &VitalArgs) -> Result<Outcome, Error> {
    let g = load_graph(&a.graph)?;
    let p = Pattern::parse(&read(&a.pattern)?)?;
    let l = match &a.linkage {
        Some(path) => {
            let v: Value = serde_json::from_str(&read(path)?).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
            Linkage::from_json(&v)?
        }
        None => match disjoint_paths(&g, &p)? {
            Some(l) => l,
            None => return Ok(Outcome { value: json!({ "vital": false, "linkage": Value::Null, "reason": "no linkage" }), ok: false }),
        },
    };
    validate_linkage(&g, &l)?;
    if !pattern_of(&g, &l)?.same_multiset(&p) {
        return Err(Error::InvalidLinkage("linkage does not realize the pattern".into()));
    }
    let r = vital_report(&g, &l, a.budget)?;
    Ok(Outcome { value: json!({ "vital": r.vital, "linkage": l.to_json(), "report": serde_json::to_value(&r).unwrap() }), ok: r.vital })
}

fn cmd_reduce(a: &ReduceArgs) -> Result<Outcome, Error> {
    let host = AnnotatedGraph::new(load_graph(&a.graph)?, &a.red)?;
    let rules = match a.rules {
        RulesArg::Oracle => RuleChoice::Oracle,
        RulesArg::CliqueRule => RuleChoice::CliqueRule,
        RulesArg::Both => RuleChoice::Both,
    };
    let cfg = PipelineConfig { threshold: a.threshold, rules, ..Default::default() };
    let (red, trace) = reduce(&host, a.k, a.d, &cfg)?;
    if let Some(p) = &a.output {
        write(p, &to_edge_list(&red.graph))?;
    }
    let confirmed = trace.deletions.iter().all(|d| d.oracle_confirmed != Some(false));
    let met = trace.status == ReductionStatus::ThresholdMet;
    Ok(Outcome { value: json!({ "trace": trace.to_json(), "clique_rule_confirmed": confirmed }), ok: met && confirmed })
}

fn cmd_route(a: &RouteArgs) -> Result<Outcome, Error> {
    let rails = (2 * a.paths).max(3);
    let plane = cylindrical_mesh_plane(a.t, rails)?;
    let cc = ConcentricCycles::new(plane, (0..a.t).map(|r| mesh_ring(rails, r)).collect())?;
    let crossing: Vec<Vec<usize>> = (0..a.paths).map(|i| mesh_rail(rails, a.t - 1, i * rails / a.paths)).collect();
    let outer: Vec<usize> = crossing.iter().map(|p| p[0]).collect();
    let inner: Vec<usize> = crossing.iter().map(|p| *p.last().unwrap()).collect();
    let patterns = match &a.pattern {
        Some(p) => vec![Pattern::parse(&read(p)?)?],
        None => {
            let mut ts = outer.clone();
            if a.surface == Surface::Cylinder {
                ts.extend(&inner);
            }
            all_patterns(&ts, a.max_pairs)
        }
    };
    let outer_o = cc.oriented(a.t - 1);
    let inner_o = cc.oriented(0);
    let mut results = Vec::new();
    let mut all_ok = true;
    for p in patterns {
        let (feasible, routed) = match a.surface {
            Surface::Disc => (feasible_on_disc(&p, &outer_o)?, route_disc(&cc, &crossing, &p)?),
            Surface::Cylinder => (feasible_on_cylinder(&p, &outer_o, &inner_o)?, route_cylinder(&cc, &crossing, &p)?),
        };
        let valid = match &routed {
            Some(l) => validate_linkage(&cc.plane.graph, l).is_ok() && pattern_of(&cc.plane.graph, l)?.same_multiset(&p),
            None => !feasible,
        };
        all_ok &= valid && feasible == routed.is_some();
        results.push(json!({
            "pattern": p.pairs(),
            "feasible": feasible,
            "linkage": routed.map(|l| l.to_json()),
            "valid": valid,
        }));
    }
    Ok(Outcome { value: json!({ "t": a.t, "rails": rails, "results": results }), ok: all_ok })
}

fn cmd_verify_hk(a: &HkArgs) -> Result<Outcome, Error> {
    let fam = regular_gadgets(a.k)?;
    let r = verify_hk_deletion(a.k, &fam)?;
    let passed = r.minor_present && r.per_vertex_absent;
    Ok(Outcome { value: json!({ "gadget_n": fam.n, "report": serde_json::to_value(&r).unwrap() }), ok: passed })
}

fn cmd_bidim(a: &BidimArgs) -> Result<Outcome, Error> {
    let host = AnnotatedGraph::new(load_graph(&a.graph)?, &a.red)?;
    let b = bidim(&host, a.cap)?;
    Ok(ok(json!({ "bidim": b, "cap": a.cap, "red": a.red.len() })))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded(_) | Error::SearchCapExceeded(_) | Error::GenerationCapExceeded(_) => 3,
        Error::Parse { .. } | Error::IndexOutOfRange { .. } | Error::PreconditionViolated(_) | Error::ParameterTooSmall(_) => 2,
        _ => 1,
    }
}

fn emit(v: &Value) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v).unwrap());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let res = match &cli.cmd {
        Cmd::Gen(a) => cmd_gen(a, cli.seed),
        Cmd::Tw(a) => cmd_tw(a),
        Cmd::Dp(a) => cmd_dp(a),
        Cmd::Folio(a) => cmd_folio(a),
        Cmd::Vital(a) => cmd_vital(a),
        Cmd::Reduce(a) => cmd_reduce(a),
        Cmd::Route(a) => cmd_route(a),
        Cmd::VerifyHk(a) => cmd_verify_hk(a),
        Cmd::Bidim(a) => cmd_bidim(a),
    };
    match res {
        Ok(o) => {
            emit(&o.value);
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            emit(&json!({ "error": e.to_string() }));
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
