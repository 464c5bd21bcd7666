use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{ensure, Context};
use edgeflow::bands::band_structure;
use edgeflow::dislocation::{projector_rank_convergence, ring_flow_check};
use edgeflow::edge::{edge_sweep_t, uniform_grid, ClassifyOptions};
use edgeflow::fmt::num;
use edgeflow::lattice2d::{fiber_gap_at, folded_fiber_check};
use edgeflow::verify::{verify_density, verify_theorem_flow, VerifyOptions};
use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{self, build_wall, fibers, fold_momentum, resolve_model, validate, Resolved, RunConfig};

/// Command failure, split by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

pub type CmdResult = Result<bool, Failure>;

fn usage<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn runtime<T, E: Into<anyhow::Error>>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Runtime(e.into()))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    runtime(fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())))?;
    let path = dir.join(name);
    info!("writing {}", path.display());
    runtime(File::create(&path).with_context(|| format!("creating {}", path.display())).map(BufWriter::new))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<(), Failure> {
    let mut w = create(dir, name)?;
    runtime(serde_json::to_writer_pretty(&mut w, value))?;
    runtime(writeln!(w).and_then(|_| w.flush()))
}

fn prepare(cfg: &RunConfig) -> Result<Resolved, Failure> {
    let model = usage(resolve_model(&cfg.model))?;
    usage(validate(cfg, &model))?;
    Ok(model)
}

fn verify_opts(cfg: &RunConfig) -> VerifyOptions {
    VerifyOptions { k_count: cfg.k_count, ..VerifyOptions::default() }
}

pub fn bands(cfg: &RunConfig, out: &Path) -> CmdResult {
    let model = prepare(cfg)?;
    let fibers = fibers(cfg, &model);
    let mut csv = create(out, "bands.csv")?;
    let header = if model.is_2d() { "k2,k,band_index,eigenvalue" } else { "k,band_index,eigenvalue" };
    runtime(writeln!(csv, "{header}"))?;
    let mut catalogs = Vec::with_capacity(fibers.len());
    for (k2, kernel) in &fibers {
        let bs = runtime(band_structure(kernel, cfg.k_count))?;
        for (k, row) in bs.k_grid().iter().zip(bs.curves()) {
            for (j, e) in row.iter().enumerate() {
                let line = match k2 {
                    Some(s) => writeln!(csv, "{},{},{j},{}", num(*s), num(*k), num(*e)),
                    None => writeln!(csv, "{},{j},{}", num(*k), num(*e)),
                };
                runtime(line)?;
            }
        }
        catalogs.push(json!({ "k2": k2, "catalog": bs.gap_catalog() }));
    }
    runtime(csv.flush())?;
    let mut doc = json!({ "model": model.label(), "k_count": cfg.k_count });
    if let Resolved::TwoD { tb, .. } = &model {
        let energies = if cfg.energies.is_empty() { vec![0.0] } else { cfg.energies.clone() };
        let mut minima = Vec::new();
        for e in energies {
            let mut best = (f64::INFINITY, f64::NAN);
            for (k2, _) in &fibers {
                let s = k2.unwrap_or_default();
                let w = runtime(fiber_gap_at(tb, s, e, cfg.k_count))?;
                if w < best.0 {
                    best = (w, s);
                }
            }
            minima.push(json!({ "E": e, "min_gap": best.0, "k2": best.1 }));
        }
        doc["fibers"] = Value::Array(catalogs);
        doc["min_gap"] = Value::Array(minima);
    } else {
        doc["catalog"] = catalogs.remove(0)["catalog"].take();
    }
    write_json(out, "gaps.json", &doc)?;
    Ok(true)
}

pub fn edge_sweep(cfg: &RunConfig, out: &Path) -> CmdResult {
    let model = prepare(cfg)?;
    usage(ensure_t_points(cfg, 1))?;
    let wall = usage(build_wall(&cfg.wall, &model))?;
    let [t0, t1] = cfg.sweep.t_range;
    let grid = uniform_grid(t0, t1, cfg.sweep.t_points);
    let opts = ClassifyOptions::default();
    let fibers = fibers(cfg, &model);
    let mut index = Vec::new();
    for (i, (k2, kernel)) in fibers.iter().enumerate() {
        info!("edge sweep {}/{}", i + 1, fibers.len());
        let sweep = runtime(edge_sweep_t(kernel, &wall, cfg.half_width, &grid, &opts))?;
        let name = match k2 {
            Some(_) => format!("edge_k2_{i:04}.csv"),
            None => "edge.csv".to_string(),
        };
        let mut w = create(out, &name)?;
        runtime(sweep.write_csv(&mut w).and_then(|_| w.flush()))?;
        index.push(json!({ "k2": k2, "file": name, "borderline_modes": sweep.borderline_count() }));
    }
    write_json(out, "edge_index.json", &json!({ "model": model.label(), "box": cfg.half_width, "sweeps": index }))?;
    Ok(true)
}

fn ensure_t_points(cfg: &RunConfig, min: usize) -> anyhow::Result<()> {
    ensure!(cfg.sweep.t_points >= min, "sweep.t_points must be at least {min}, got {}", cfg.sweep.t_points);
    Ok(())
}

fn ensure_energies(cfg: &RunConfig) -> anyhow::Result<()> {
    ensure!(!cfg.energies.is_empty(), "energies must list at least one probe energy");
    Ok(())
}

pub fn flow(cfg: &RunConfig, out: &Path) -> CmdResult {
    let model = prepare(cfg)?;
    usage(ensure_t_points(cfg, 2).and_then(|_| ensure_energies(cfg)))?;
    let wall = usage(build_wall(&cfg.wall, &model))?;
    let opts = verify_opts(cfg);
    let mut reports = Vec::new();
    for (k2, kernel) in fibers(cfg, &model) {
        for &e in &cfg.energies {
            let r = runtime(verify_theorem_flow(&kernel, &wall, e, cfg.half_width, cfg.sweep.t_points, &opts))?;
            reports.push(json!({ "k2": k2, "report": r }));
        }
    }
    write_json(out, "flow.json", &json!({ "model": model.label(), "reports": reports }))?;
    Ok(true)
}

pub fn ring(cfg: &RunConfig, out: &Path) -> CmdResult {
    let model = prepare(cfg)?;
    usage(ensure_energies(cfg))?;
    let jacobi = usage(ring_model(&model))?;
    usage(ensure_ring_sizes(&cfg.checks.ring_sizes))?;
    let mut pass = true;
    let mut reports = Vec::new();
    for &ell in &cfg.checks.ring_sizes {
        for &e in &cfg.energies {
            let r = runtime(ring_flow_check(jacobi, cfg.checks.ring_sigma, e, ell, 1e-6))?;
            pass &= r.pass;
            reports.push(r);
        }
    }
    if let Some(conv) = &cfg.checks.convergence {
        let e = cfg.energies[0];
        let sigma = cfg.checks.ring_sigma.unwrap_or(e + 4.0 * jacobi.c_ab() + 1.0);
        let table = runtime(projector_rank_convergence(jacobi, sigma, e, conv.window, conv.t, &conv.ells))?;
        let mut w = create(out, "convergence.csv")?;
        runtime(table.write_csv(&mut w).and_then(|_| w.flush()))?;
        write_json(out, "convergence.json", &table)?;
    }
    write_json(out, "ring.json", &json!({ "model": model.label(), "pass": pass, "reports": reports }))?;
    Ok(pass)
}

fn ring_model(model: &Resolved) -> anyhow::Result<&edgeflow::kernel::PeriodicJacobi> {
    match model {
        Resolved::OneD { jacobi: Some(j), .. } => Ok(j),
        _ => anyhow::bail!("ring checks need a 1D nearest-neighbour (Jacobi) model"),
    }
}

fn ensure_ring_sizes(sizes: &[usize]) -> anyhow::Result<()> {
    ensure!(!sizes.is_empty(), "checks.ring_sizes must list at least one ring size");
    Ok(())
}

#[derive(Serialize)]
struct Check {
    suite: String,
    name: String,
    pass: bool,
    reason: Option<String>,
    detail: Value,
}

impl Check {
    fn from_result<T: Serialize>(suite: &str, name: String, r: edgeflow::Result<T>, pass: impl FnOnce(&T) -> bool) -> Self {
        match r {
            Ok(v) => Check { suite: suite.into(), name, pass: pass(&v), reason: None, detail: json!(v) },
            Err(e) => Check { suite: suite.into(), name, pass: false, reason: Some(e.to_string()), detail: Value::Null },
        }
    }
}

/// Suite run by `verify` when no config is given.
const DEFAULT_SUITE: &[&str] = &[
    r#"{"model": "ssh", "wall": {"kind": "linear_ramp", "nu": 1.0}, "box": 100,
        "sweep": {"t_points": 200}, "energies": [-2.5, 0.0, 2.5],
        "checks": {"density_t0": [0.0, 0.37], "density_energies": [0.0], "ring_sizes": [5, 20, 64]}}"#,
    r#"{"model": "wallace", "wall": {"kind": "linear_ramp", "nu": 1.0}, "box": 60,
        "sweep": {"t_points": 100, "k2": [0.3]}, "energies": [0.0],
        "checks": {"density_t0": [0.0]}}"#,
    r#"{"model": "wallace_cut_n_m", "wall": {"kind": "linear_ramp", "nu": 1.0}, "box": 60,
        "sweep": {"t_points": 100, "k2": [0.0]}, "energies": [0.0],
        "checks": {"fold_momenta": 100}}"#,
    r#"{"model": "wallace_armchair", "energies": [0.0], "checks": {"flow": false, "fold_momenta": 100}}"#,
];

pub fn default_suite() -> Vec<RunConfig> {
    DEFAULT_SUITE
        .iter()
        .map(|text| {
            let text = text.replace(r#""wallace_cut_n_m""#, r#"{"preset": "wallace_cut_n_m", "n": -1, "m": 2}"#);
            config::parse(&text, None).expect("built-in suite parses")
        })
        .collect()
}

/// Runs every configured check; `Ok(false)` when any fails.
pub fn verify(cfgs: &[RunConfig], out: &Path, seed: u64) -> CmdResult {
    let mut checks = Vec::new();
    for cfg in cfgs {
        checks.extend(verify_one(cfg, seed)?);
    }
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        let reason = c.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default();
        println!("{} {} / {}{reason}", if c.pass { "PASS" } else { "FAIL" }, c.suite, c.name);
    }
    write_json(out, "verify.json", &json!({ "pass": pass, "seed": seed, "checks": checks }))?;
    Ok(pass)
}

fn verify_one(cfg: &RunConfig, seed: u64) -> Result<Vec<Check>, Failure> {
    let model = prepare(cfg)?;
    let c = &cfg.checks;
    if c.flow || (!c.density_t0.is_empty() && c.density_energies.is_none()) {
        usage(ensure_energies(cfg))?;
    }
    if c.flow {
        usage(ensure_t_points(cfg, 2))?;
    }
    let ring_jacobi = if c.ring_sizes.is_empty() {
        None
    } else {
        usage(ensure_energies(cfg))?;
        Some(usage(ring_model(&model))?)
    };
    let cut = match &model {
        Resolved::TwoD { cut: Some(pair), .. } => Some(pair),
        _ => None,
    };
    usage(if c.fold_momenta > 0 && cut.is_none() {
        Err(anyhow::anyhow!("checks.fold_momenta needs a supercell cut model"))
    } else {
        Ok(())
    })?;
    let needs_wall = c.flow || !c.density_t0.is_empty();
    let wall = if needs_wall { Some(usage(build_wall(&cfg.wall, &model))?) } else { None };

    let suite = model.label().to_string();
    let opts = verify_opts(cfg);
    let cells = cut.map_or(1, |(_, cut)| cut.cells());
    let mut checks = Vec::new();
    for (k2, kernel) in fibers(cfg, &model) {
        let at = k2.map(|s| format!(" k2={s}")).unwrap_or_default();
        for &e in &cfg.energies {
            if let (true, Some(wall)) = (c.flow, &wall) {
                info!("{suite}: flow E={e}{at}");
                let r = verify_theorem_flow(&kernel, wall, e, cfg.half_width, cfg.sweep.t_points, &opts);
                checks.push(Check::from_result(&suite, format!("flow E={e}{at}"), r, |r| r.pass));
            }
        }
        for &e in c.density_energies.as_ref().unwrap_or(&cfg.energies) {
            for &t0 in &c.density_t0 {
                let wall = wall.as_ref().expect("wall built for density");
                info!("{suite}: density E={e} t0={t0}{at}");
                let r = verify_density(&kernel, wall, e, t0, cfg.half_width, cells, &opts);
                checks.push(Check::from_result(&suite, format!("density E={e} t0={t0}{at}"), r, |r| r.pass));
            }
        }
    }
    if let Some(jacobi) = ring_jacobi {
        for &ell in &c.ring_sizes {
            for &e in &cfg.energies {
                let r = ring_flow_check(jacobi, c.ring_sigma, e, ell, 1e-6);
                checks.push(Check::from_result(&suite, format!("ring ell={ell} E={e}"), r, |r| r.pass));
            }
        }
    }
    if let (Some((original, cut)), Resolved::TwoD { tb, .. }) = (cut, &model) {
        if c.fold_momenta > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            let mut failure = None;
            for _ in 0..c.fold_momenta {
                let k = fold_momentum(original.lattice(), rng.random(), rng.random());
                match folded_fiber_check(original, cut, tb, k) {
                    Ok(r) => worst = worst.max(r.max_deviation),
                    Err(e) => failure = Some(e),
                }
            }
            let r = match failure {
                Some(e) => Err(e),
                None => Ok(json!({ "momenta": c.fold_momenta, "max_deviation": worst, "tolerance": 1e-9 })),
            };
            checks.push(Check::from_result(&suite, format!("fold momenta={}", c.fold_momenta), r, |_| worst <= 1e-9));
        }
    }
    Ok(checks)
}
