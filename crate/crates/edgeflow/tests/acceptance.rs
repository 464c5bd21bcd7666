//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero on any FAIL.

use std::f64::consts::PI;
use std::time::Instant;

use edgeflow::dislocation::{left_block_gap_check, ring_flow_check};
use edgeflow::edge::{uniform_grid, EdgeFamily};
use edgeflow::kernel::{ConvolutionKernel, PeriodicJacobi};
use edgeflow::lattice2d::{
    edge_wall_1d, folded_fiber_check, gauge_transform, supercell_cut, wallace_cut, wallace_preset, BravaisLattice2D,
    Ordering, ScalarChain, TightBinding2D,
};
use edgeflow::linalg::{self, c, CMat};
use edgeflow::random::{random_flow_case, random_hermitian, random_matrix};
use edgeflow::specflow::{flow_counting, flow_partition_samples, CountingOptions, PartitionOptions, SpectrumSamples};
use edgeflow::verify::{verify_density, verify_flow_on_samples, verify_theorem_flow, VerifyOptions};
use edgeflow::walls::{steep_wall, ScalarWall, SoftWallProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ssh() -> PeriodicJacobi {
    PeriodicJacobi::ssh_real(1.5, 0.5)
}

fn ssh_wall(nu: f64) -> SoftWallProfile {
    SoftWallProfile::diagonal(ScalarWall::LinearRamp { nu }, 1.0, vec![0.0, 0.25]).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Flows for every ν and the branch Lipschitz bound on the same sweeps.
fn ssh_flows_and_lipschitz() -> (Outcome, Outcome) {
    let start = Instant::now();
    let opts = VerifyOptions::default();
    let mut flow_lines = Vec::new();
    let mut flow_ok = true;
    let mut worst_excess = f64::NEG_INFINITY;
    for nu in [0.5, 1.0, 5.0, 10.0] {
        let fam = EdgeFamily::new(ssh().kernel(), ssh_wall(nu), 100).unwrap();
        let ts = uniform_grid(0.0, 1.0, 200);
        let samples = SpectrumSamples::sample(&fam, &ts).unwrap();
        for (step, w) in samples.max_branch_steps().iter().zip(ts.windows(2)) {
            worst_excess = worst_excess.max(step - fam.wall.lipschitz() * (w[1] - w[0]));
        }
        for (e, want) in [(0.0, -1), (2.5, -2)] {
            match verify_flow_on_samples(&fam, &samples, e, &opts) {
                Ok(r) => {
                    flow_ok &= r.flow_counting == want && r.flow_partition == want;
                    flow_lines.push(format!("nu={nu} E={e}: {}/{}", r.flow_counting, r.flow_partition));
                }
                Err(e) => {
                    flow_ok = false;
                    flow_lines.push(err(e));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        check(flow_ok && secs < 60.0, format!("{} in {secs:.1}s", flow_lines.join(", "))),
        check(worst_excess <= 1e-9, format!("max step minus bound = {worst_excess:.3e}")),
    )
}

fn wall_only_flow() -> Outcome {
    let wall = SoftWallProfile::smooth_sqrt(1).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (e, want) in [(0.2, -1), (-0.2, 0)] {
        let r = verify_theorem_flow(&ConvolutionKernel::zero(1), &wall, e, 100, 200, &VerifyOptions::default()).map_err(err)?;
        ok &= r.flow_counting == want && r.flow_partition == want;
        parts.push(format!("E={e}: {}/{}", r.flow_counting, r.flow_partition));
    }
    check(ok, parts.join(", "))
}

fn density() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for t0 in [0.0, 0.3, 0.7] {
        let r = verify_density(&ssh().kernel(), &ssh_wall(0.5), 0.0, t0, 200, 1, &VerifyOptions::default()).map_err(err)?;
        ok &= r.pass && !r.vacuous;
        parts.push(format!("t0={t0}: min {} over {} intervals", r.min_count, r.intervals_checked));
    }
    check(ok, parts.join(", "))
}

fn ring_counts() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for jac in [ssh(), PeriodicJacobi::ssh_real(0.5, 1.5)] {
        for ell in 5..=64 {
            let r = ring_flow_check(&jac, None, 0.0, ell, 1e-6).map_err(err)?;
            if !r.pass {
                bad.push(format!("ell={ell}: {}/{}", r.count_t0, r.count_t1));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(bad.is_empty() && secs < 10.0, format!("{} failures in {secs:.2}s {}", bad.len(), bad.join(" ")))
}

fn steep_and_left_block() -> Outcome {
    let jac = ssh();
    let steep = steep_wall(&ssh_wall(1.0), &jac, 0.0, None).map_err(err)?;
    let mut worst: f64 = f64::INFINITY;
    let mut x = -1.0 - 1e-9;
    while x > steep.x_sigma - 200.0 {
        let lo = linalg::eigvalsh(&steep.profile.eval(x)).map_err(err)?[0];
        worst = worst.min(lo - steep.floor());
        x -= 0.01;
    }
    let rep = left_block_gap_check(&jac, &steep, &uniform_grid(0.0, 1.0, 50), 40, 1e-6).map_err(err)?;
    check(
        worst >= -1e-9 && rep.pass,
        format!("wall floor margin {worst:.3e}, left-block min {:.6} vs bound {}", rep.min_eigenvalue, rep.bound),
    )
}

fn random_kernel(rng: &mut ChaCha8Rng) -> ConvolutionKernel {
    let dim = rng.random_range(1..=3);
    let range = rng.random_range(1..=3);
    let blocks: Vec<(i64, CMat)> = (0..=range)
        .map(|n| (-(n as i64), if n == 0 { random_hermitian(rng, dim, 1.0) } else { random_matrix(rng, dim, 1.0) }))
        .collect();
    ConvolutionKernel::new(dim, blocks).unwrap()
}

fn random_tb2d(rng: &mut ChaCha8Rng) -> TightBinding2D {
    let a1 = [rng.random_range(0.5..2.0), rng.random_range(-0.6..0.6)];
    let a2 = [rng.random_range(-0.8..0.8), rng.random_range(0.5..2.0)];
    let atoms = vec![[0.0, 0.0], [0.3 * a1[0] + 0.6 * a2[0], 0.3 * a1[1] + 0.6 * a2[1]]];
    let lattice = BravaisLattice2D::new(a1, a2, atoms).unwrap();
    let blocks: Vec<((i64, i64), CMat)> = [(0, 0), (1, 0), (0, 1), (1, -1), (2, 1)]
        .into_iter()
        .map(|r| (r, if r == (0, 0) { random_hermitian(rng, 2, 1.0) } else { random_matrix(rng, 2, 1.0) }))
        .collect();
    TightBinding2D::new(lattice, blocks).unwrap()
}

fn folding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_1d: f64 = 0.0;
    let mut count_1d = 0;
    for _ in 0..10 {
        let k = random_kernel(&mut rng);
        let ell = k.range() + rng.random_range(0..3);
        let sup = k.supercell(ell).map_err(err)?;
        for _ in 0..100 {
            let q = rng.random_range(-PI..PI);
            let lhs = linalg::eigvalsh(&sup.fiber(q)).map_err(err)?;
            let mut rhs: Vec<f64> = (0..ell)
                .flat_map(|j| linalg::eigvalsh(&k.fiber((q + 2.0 * PI * j as f64) / ell as f64)).unwrap())
                .collect();
            rhs.sort_by(f64::total_cmp);
            worst_1d = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(worst_1d, f64::max);
            count_1d += 1;
        }
    }
    let mut worst_2d: f64 = 0.0;
    let mut count_2d = 0;
    let mut cases: Vec<(TightBinding2D, i64, i64, Ordering)> = vec![
        (wallace_preset(), 1, 1, Ordering::SiteMajor),
        (wallace_preset(), -1, 1, Ordering::SiteMajor),
        (wallace_preset(), -1, 2, Ordering::SublatticeFirst),
        (wallace_preset(), 2, -1, Ordering::SublatticeFirst),
    ];
    for (n, m) in [(-1, 2), (2, 3), (3, -1)] {
        cases.push((random_tb2d(&mut rng), n, m, Ordering::SiteMajor));
    }
    for (tb, n, m, ord) in &cases {
        let (cut, sup) = supercell_cut(tb, *n, *m, *ord).map_err(err)?;
        for _ in 0..100 {
            let k = [rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0)];
            worst_2d = worst_2d.max(folded_fiber_check(tb, &cut, &sup, k).map_err(err)?.max_deviation);
            count_2d += 1;
        }
    }
    check(
        worst_1d <= 1e-9 && worst_2d <= 1e-9,
        format!("1D {count_1d} momenta max dev {worst_1d:.2e}; 2D {count_2d} momenta over {} cuts max dev {worst_2d:.2e}", cases.len()),
    )
}

fn wallace_closed_form() -> Outcome {
    let tb = wallace_preset();
    let (a1, a2) = (tb.lattice().a1(), tb.lattice().a2());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let k = [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
        let f = c(1.0, 0.0) + faer::c64::cis(-(k[0] * a1[0] + k[1] * a1[1])) + faer::c64::cis(k[0] * a2[0] + k[1] * a2[1]);
        let ev = linalg::eigvalsh(&tb.fiber(k)).map_err(err)?;
        worst = worst.max((ev[0] + f.norm()).abs()).max((ev[1] - f.norm()).abs());
    }
    let grid: Vec<f64> = (0..2048).map(|i| -0.5 + i as f64 / 2047.0).collect();
    let gaps: Vec<(f64, f64)> = grid
        .iter()
        .map(|&s| Ok((s, edgeflow::lattice2d::fiber_gap_at(&tb, s, 0.0, 1024)?)))
        .collect::<edgeflow::Result<_>>()
        .map_err(err)?;
    let near_min = |center: f64| {
        gaps.iter().filter(|(s, _)| (s - center).abs() < 0.02).map(|p| p.1).fold(f64::INFINITY, f64::min)
    };
    let (g_plus, g_minus) = (near_min(1.0 / 3.0), near_min(-1.0 / 3.0));
    let (s_min, g_min) = gaps.iter().copied().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let g_01 = edgeflow::lattice2d::fiber_gap_at(&tb, 0.1, 0.0, 1024).map_err(err)?;
    check(
        worst <= 1e-12 && g_plus < 1e-3 && g_minus < 1e-3 && g_01 > 0.1,
        format!(
            "closed form max dev {worst:.2e}; gap near +1/3 {g_plus:.2e}, near -1/3 (= 2/3) {g_minus:.2e}, global min {g_min:.2e} at s={s_min:.5}; gap at 0.1 = {g_01:.4}"
        ),
    )
}

fn wallace_flows() -> Outcome {
    let start = Instant::now();
    let tb = wallace_preset();
    let wall = ScalarWall::LinearRamp { nu: 1.0 };
    let opts = VerifyOptions::default();
    let zz = verify_theorem_flow(&tb.reduce_to_1d(0.3), &edge_wall_1d(tb.lattice(), wall).map_err(err)?, 0.0, 150, 200, &opts)
        .map_err(err)?;
    let (cut, sup) = wallace_cut(-1, 2).map_err(err)?;
    let ac = verify_theorem_flow(&sup.reduce_to_1d(0.0), &edge_wall_1d(&cut.lattice, wall).map_err(err)?, 0.0, 150, 200, &opts)
        .map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let ok = zz.flow_counting == -1 && zz.flow_partition == -1 && ac.flow_counting == -2 && ac.flow_partition == -2;
    check(
        ok && secs < 300.0,
        format!(
            "zigzag s=0.3: {}/{}; (-1,2) cut s=0: {}/{}; {secs:.1}s",
            zz.flow_counting, zz.flow_partition, ac.flow_counting, ac.flow_partition
        ),
    )
}

fn method_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = Vec::new();
    for i in 0..100 {
        let case = random_flow_case(&mut rng, 3, 512).map_err(err)?;
        let fam = EdgeFamily::new(case.jacobi.kernel(), case.wall.clone(), 30).map_err(err)?;
        let s = SpectrumSamples::sample(&fam, &uniform_grid(0.0, 1.0, 80)).map_err(err)?;
        let copts = CountingOptions { gap: Some((case.gap.lo, case.gap.hi)), ..Default::default() };
        let cf = flow_counting(&s, case.energy, &copts).map_err(err)?;
        let room = (cf.energy - case.gap.lo).min(case.gap.hi - cf.energy);
        let popts = PartitionOptions { max_width: 0.45 * room, ..Default::default() };
        let (pf, _) = flow_partition_samples(&s, cf.energy, &popts, Some(&fam)).map_err(err)?;
        if cf.flow != pf.flow {
            mismatches.push(format!("case {i}: {} vs {}", cf.flow, pf.flow));
        }
    }
    check(mismatches.is_empty(), format!("100 models, {} mismatches {}", mismatches.len(), mismatches.join(" ")))
}

fn gauge_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(4..80);
        let chain = ScalarChain {
            onsite: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            hoppings: (0..n - 1).map(|_| faer::c64::cis(rng.random_range(-PI..PI)) * rng.random_range(0.1..2.0)).collect(),
        };
        let g = gauge_transform(&chain);
        let a = linalg::eigvalsh(&chain.matrix()).map_err(err)?;
        let b = linalg::eigvalsh(&g.stripped.matrix()).map_err(err)?;
        worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
    }
    check(worst <= 1e-12, format!("100 chains, max dev {worst:.2e}"))
}

fn main() {
    let (flows, lipschitz) = ssh_flows_and_lipschitz();
    let results: Vec<(&str, Outcome)> = vec![
        ("SSH flows (nu in {0.5,1,5,10}, L=100, E=0 -> -1, E=2.5 -> -2, < 60 s)", flows),
        ("wall-only flow (H=0, smooth-sqrt: E=0.2 -> -1, E=-0.2 -> 0)", wall_only_flow()),
        ("density (SSH nu=0.5, t0 in {0,0.3,0.7}, L=200)", density()),
        ("ring counts (ell in 5..=64, < 10 s)", ring_counts()),
        ("steep wall floor and left-block emptiness", steep_and_left_block()),
        ("folding identities (1D and 2D, 1e-9)", folding()),
        ("Wallace closed form and zigzag gap closure", wallace_closed_form()),
        ("Wallace zigzag and (-1,2) cut flows (L=150, < 5 min)", wallace_flows()),
        ("method agreement (100 random gapped Jacobi models)", method_agreement()),
        ("Lipschitz branches across SSH sweeps", lipschitz),
        ("gauge invariance (1e-12)", gauge_invariance()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
