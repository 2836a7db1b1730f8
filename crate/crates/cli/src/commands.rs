//! One function per subcommand. Each returns an [`Outcome`]; nothing here touches
//! the file system.

use std::collections::BTreeMap;

use netspec_core::forests::{enumerate_dual_pairs, enumerate_ocrsfs, extremal_ocrsf, pfnlap_sum};
use netspec_core::graph::{Conductances, Network};
use netspec_core::laplacian::{build_laplacian, charpoly, node_check, numeric_charpoly, LaplacianError};
use netspec_core::laurent::{LaurentPoly2, Point};
use netspec_core::spectral::{
    amoeba, infinity_coordinates, spectral_divisor, to_csv, to_svg, AmoebaGrid, DivisorOptions, DivisorReport, SpectralError,
};
use netspec_core::temperley::temperley_check;
use netspec_core::ydelta::{discrete_abel, homology_embedding, invariance_check, run_program, Lifted, Move};
use netspec_core::zigzag::{fans, minimality_check, sorted_classes, trace_strands, zigzag_polygon};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{load_network, load_program, CliError, Command, RunConfig};

/// Result of one subcommand: a JSON report, extra artifacts and console lines.
#[derive(Debug)]
pub struct Outcome {
    pub pass: bool,
    pub report: Value,
    pub lines: Vec<String>,
    /// `(file suffix, contents)` written next to the JSON report.
    pub artifacts: Vec<(String, String)>,
}

impl Outcome {
    fn new(pass: bool, report: Value, lines: Vec<String>) -> Self {
        Outcome { pass, report, lines, artifacts: Vec::new() }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let net = load_network(cfg.command.input())?;
    match &cfg.command {
        Command::Validate { .. } => validate(&net),
        Command::Charpoly { .. } => charpoly_cmd(&net, cfg),
        Command::Zigzag { .. } => zigzag_cmd(&net),
        Command::Newton { .. } => newton(&net),
        Command::OcrsfCheck { .. } => ocrsf_check(&net, cfg),
        Command::TemperleyCheck { .. } => temperley(&net, cfg),
        Command::Ydelta { trials, .. } => ydelta(&net, cfg, *trials),
        Command::Evolve { program, steps, .. } => evolve(&net, program, *steps),
        Command::Amoeba { .. } => amoeba_cmd(&net, cfg),
        Command::Divisor { .. } => divisor(&net, cfg),
        Command::Abel { radius, .. } => abel(&net, *radius),
    }
}

fn validate(net: &Network) -> Result<Outcome, CliError> {
    let r = net.graph.report();
    let pass = r.rotation_consistent && r.connected && r.face_displacements_zero && r.euler_characteristic == 0;
    let lines = r.to_string().lines().map(String::from).collect();
    Ok(Outcome::new(pass, json!({ "validation": r, "conductances": net.conductance }), lines))
}

fn charpoly_cmd(net: &Network, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let l = build_laplacian(&net.graph, &net.conductance);
    match charpoly(&l) {
        Ok(p) => {
            let node = node_check(&p);
            let symmetric = p.involution() == p;
            let lines = vec![
                format!("P(z,w) = {p}"),
                format!("P(1/z,1/w) = P(z,w): {}", verdict(symmetric)),
                format!("node at (1,1): {}", verdict(node.is_node)),
            ];
            let pass = symmetric && node.is_node;
            Ok(Outcome::new(pass, json!({ "exact": true, "coefficients": p.to_triples(), "symmetric": symmetric, "node": node }), lines))
        }
        Err(LaplacianError::MatrixTooLarge { n, bound }) => {
            let num = numeric_charpoly(&l, cfg.exec());
            let lines = vec![format!("{n} vertices exceed the exact bound {bound}; numeric coefficients only")];
            Ok(Outcome::new(true, json!({ "exact": false, "numeric": num }), lines))
        }
        Err(e) => Err(e.into()),
    }
}

fn zigzag_cmd(net: &Network) -> Result<Outcome, CliError> {
    let strands = trace_strands(&net.graph);
    let minimality = minimality_check(&net.graph, &strands);
    let polygon = zigzag_polygon(&strands)?;
    let list: Vec<Value> = strands
        .strands
        .iter()
        .map(|s| json!({ "id": s.id, "class": s.homology, "length": s.len(), "reverse": s.reverse }))
        .collect();
    let lines = vec![
        format!("{} oriented strands, classes {:?}", strands.len(), sorted_classes(&strands)),
        format!("zig-zag polygon {:?}", polygon.vertices()),
        format!("minimal: {}", verdict(minimality.minimal)),
    ];
    Ok(Outcome::new(minimality.minimal, json!({ "strands": list, "minimality": minimality, "polygon": polygon }), lines))
}

fn newton(net: &Network) -> Result<Outcome, CliError> {
    let p = charpoly(&build_laplacian(&net.graph, &net.conductance))?;
    let np = p.newton_polygon().map_err(LaplacianError::from)?;
    let zp = zigzag_polygon(&trace_strands(&net.graph))?;
    let equal = np == zp;
    let g = np.divisor_degree();
    let lines = vec![
        format!("Newton polygon {:?}", np.vertices()),
        format!("interior lattice points {}, g = {g}", np.interior_count()),
        format!("equals zig-zag polygon: {}", verdict(equal)),
    ];
    let report = json!({
        "newton_polygon": np,
        "zigzag_polygon": zp,
        "interior_points": np.interior_count(),
        "g": g,
        "centrally_symmetric": np.is_centrally_symmetric(),
        "equal": equal,
    });
    Ok(Outcome::new(equal, report, lines))
}

fn ocrsf_check(net: &Network, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (g, c, exec) = (&net.graph, &net.conductance, cfg.exec());
    let det = charpoly(&build_laplacian(g, c))?;
    let sum = pfnlap_sum(g, c, cfg.options.edge_bound, exec)?;
    let equal = det == sum;
    let forests = enumerate_ocrsfs(g, cfg.options.edge_bound, exec)?;
    let mut by_class: BTreeMap<Point, usize> = BTreeMap::new();
    for f in &forests {
        *by_class.entry(f.class()).or_default() += 1;
    }
    let strands = trace_strands(g);
    let polygon = zigzag_polygon(&strands)?;
    let fan = fans(g, &strands, &polygon)?;
    let mut extremal = Vec::new();
    for &v in polygon.vertices() {
        let unique = by_class.get(&v) == Some(&1);
        let selected = extremal_ocrsf(g, &fan, &polygon, v).ok();
        let matches = selected.as_ref().is_some_and(|s| forests.iter().any(|f| f.class() == v && f.out == s.out));
        extremal.push(json!({ "vertex": v, "unique": unique, "fan_selection_matches": matches }));
    }
    let extremal_ok = extremal.iter().all(|e| e["unique"] == true && e["fan_selection_matches"] == true);
    let lines = vec![
        format!("{} essential OCRSFs over {} classes", forests.len(), by_class.len()),
        format!("oracle equality: {}", verdict(equal)),
        format!("extremal forests unique and fan-selected: {}", verdict(extremal_ok)),
    ];
    let classes: Vec<Value> = by_class.iter().map(|(k, n)| json!({ "class": k, "count": n })).collect();
    let report = json!({ "oracle_equal": equal, "forests": forests.len(), "classes": classes, "extremal": extremal });
    Ok(Outcome::new(equal && extremal_ok, report, lines))
}

fn temperley(net: &Network, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let pairs = enumerate_dual_pairs(&net.graph, cfg.options.edge_bound, cfg.exec())?;
    let r = temperley_check(&net.graph, &net.conductance, &pairs, cfg.options.vertex_bound, cfg.exec())?;
    let lines = vec![
        format!("{} dual pairs, {} dimer covers", r.dual_pairs, r.dimers),
        format!("bijection with weights and classes: {}", verdict(r.ok())),
    ];
    Ok(Outcome::new(r.ok(), json!({ "temperley": r }), lines))
}

/// Moves whose preconditions hold, found by attempting each one.
fn applicable_moves(net: &Network) -> Vec<Move> {
    let g = &net.graph;
    let candidates = (0..g.num_vertices())
        .map(|vertex| Move::YToDelta { vertex })
        .chain((0..g.num_faces()).map(|face| Move::DeltaToY { face }));
    candidates.filter(|mv| netspec_core::ydelta::apply_move(net, mv).is_ok()).collect()
}

fn random_conductances(rng: &mut ChaCha8Rng, n: usize) -> Conductances {
    let values = (0..n).map(|_| BigRational::new(rng.random_range(1..=20i64).into(), rng.random_range(1..=20i64).into()));
    Conductances::new(values.collect()).expect("positive draws")
}

fn ydelta(net: &Network, cfg: &RunConfig, trials: usize) -> Result<Outcome, CliError> {
    let moves = applicable_moves(net);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.options.seed);
    let mut nets = vec![net.clone()];
    for _ in 0..trials {
        nets.push(Network::new(net.graph.clone(), random_conductances(&mut rng, net.graph.num_edges()))?);
    }
    let mut checks = Vec::new();
    let mut pass = true;
    for (trial, n) in nets.iter().enumerate() {
        for mv in &moves {
            let r = invariance_check(n, mv)?;
            pass &= r.ok();
            checks.push(json!({ "trial": trial, "move": mv, "report": r, "ok": r.ok() }));
        }
    }
    let lines = vec![
        format!("{} applicable moves, {} conductance sets (seed {})", moves.len(), nets.len(), cfg.options.seed),
        format!("curve, polygon and strand classes preserved: {}", verdict(pass)),
    ];
    Ok(Outcome::new(pass, json!({ "seed": cfg.options.seed, "moves": moves, "checks": checks }), lines))
}

fn evolve(net: &Network, program: &str, steps: Option<usize>) -> Result<Outcome, CliError> {
    let prog = load_program(program)?;
    let t = run_program(net, &prog, steps)?;
    let distinct = t.conductances.windows(2).filter(|w| !w[0].projectively_equal(&w[1])).count();
    let lines = vec![
        format!("{} steps, anchor {:?}{}", t.conductances.len() - 1, t.anchor, if t.anchor_fallback { " (fallback)" } else { "" }),
        format!("{distinct} steps moved the conductances projectively"),
        format!("normalized curve conserved: {}", verdict(t.conserved)),
    ];
    Ok(Outcome::new(t.conserved, json!({ "program": prog, "trajectory": t }), lines))
}

fn divisor_options(cfg: &RunConfig) -> DivisorOptions {
    let mut o = DivisorOptions { tol: cfg.options.tol, quadrants: cfg.quadrants.clone(), ..DivisorOptions::default() };
    if let Some(g) = cfg.options.grid {
        o.grid = g;
    }
    o
}

/// Divisor report, keeping the partial report when the count is wrong.
fn divisor_report(net: &Network, cfg: &RunConfig, opts: &DivisorOptions) -> Result<Option<DivisorReport>, CliError> {
    match spectral_divisor(net, cfg.options.v0, opts, cfg.exec()) {
        Ok(r) => Ok(Some(r)),
        Err(SpectralError::WrongDivisorCount { report, .. }) => Ok(Some(*report)),
        Err(SpectralError::SingleVertex) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn amoeba_cmd(net: &Network, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let l = build_laplacian(&net.graph, &net.conductance);
    let p: LaurentPoly2 = charpoly(&l)?;
    let n = cfg.options.grid.unwrap_or(60);
    let grid = AmoebaGrid { radial: n, angular: n, extent: 3.0, resolution: n.clamp(40, 120) };
    let r = amoeba(&p, &l, grid, cfg.exec())?;
    let g = p.newton_polygon().map_err(LaplacianError::from)?.divisor_degree() as usize;
    let div = divisor_report(net, cfg, &DivisorOptions { tol: cfg.options.tol, quadrants: cfg.quadrants.clone(), ..Default::default() })?;
    let marks: Vec<[f64; 2]> = div.iter().flat_map(|d| d.points.iter().map(|p| p.log_abs)).collect();
    let infinity = infinity_coordinates(&p, cfg.exec()).ok();
    let holes_ok = r.holes.len() == g;
    let div_ok = div.as_ref().is_none_or(|d| d.all_ok(cfg.options.tol));
    let residual_ok = r.samples.iter().all(|s| s.sigma_min.is_finite());
    let mut lines = vec![
        format!("{} curve samples ({} fibers skipped)", r.samples.len(), r.skipped),
        format!("holes {:?}, expected g = {g}: {}", r.holes, verdict(holes_ok)),
    ];
    match &div {
        Some(d) => lines.push(format!("{} divisor marks: {}", d.points.len(), verdict(div_ok))),
        None => lines.push("single vertex: no divisor to mark".into()),
    }
    let report = json!({
        "grid": r.grid,
        "samples": r.samples.len(),
        "skipped": r.skipped,
        "orders": r.orders,
        "holes": r.holes,
        "g": g,
        "node": node_check(&p),
        "divisor": div,
        "infinity_experimental": infinity,
    });
    let mut out = Outcome::new(holes_ok && div_ok && residual_ok, report, lines);
    out.artifacts.push(("csv".into(), to_csv(&r.samples)));
    out.artifacts.push(("svg".into(), to_svg(&r.samples, &marks)));
    Ok(out)
}

fn divisor(net: &Network, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let opts = divisor_options(cfg);
    let Some(r) = divisor_report(net, cfg, &opts)? else {
        return Err(SpectralError::SingleVertex.into());
    };
    let ok = r.all_ok(opts.tol);
    let mut lines = vec![format!("{} divisor points, expected {}", r.points.len(), r.expected)];
    for p in &r.points {
        lines.push(format!(
            "  (z, w) = ({:.9}, {:.9})  |V_v0| = {:.1e}  |Q| = {:.1e}  |Q∘σ| = {:.1e}  hole {:?}",
            p.z, p.w, p.component, p.q_residual, p.q_sigma_residual, p.hole
        ));
    }
    lines.push(format!("divisor checks: {}", verdict(ok)));
    Ok(Outcome::new(ok, json!({ "options": opts, "divisor": r }), lines))
}

fn abel(net: &Network, radius: i64) -> Result<Outcome, CliError> {
    let g = &net.graph;
    let base = Lifted::Vertex(0, [0, 0]);
    let chart = discrete_abel(g, base, radius)?;
    let eq = [chart.is_equivariant([1, 0]), chart.is_equivariant([0, 1])];
    let strands = trace_strands(g);
    let translate_ok = [[1, 0], [0, 1]]
        .iter()
        .all(|&h| radius < 1 || chart.get(base.translate(h)) == Some(homology_embedding(&strands, h).as_slice()));
    let pass = eq.iter().all(|&b| b) && translate_ok;
    let values: Vec<Value> = chart.values.iter().map(|(k, v)| json!({ "object": k, "value": v })).collect();
    let lines = vec![
        format!("{} lifted objects charted in radius {radius}", chart.values.len()),
        format!("equivariant under both periods: {}", verdict(pass)),
    ];
    let report = json!({
        "base": base,
        "radius": radius,
        "strand_classes": chart.strand_classes,
        "equivariant": eq,
        "translate_matches_embedding": translate_ok,
        "values": values,
    });
    Ok(Outcome::new(pass, report, lines))
}
