//! Acceptance suite: one PASS/FAIL line per criterion.

use faer::Mat;
use perforated::background::{mie_ball_oracle, plane_wave, Background, LsOperator, SolverOptions};
use perforated::config::{
    make_sphere_grid, AsymptoticRegime, Domain, MediumSpec, RunConfig, ScalarField, VolumeGrid, Wavenumber,
};
use perforated::equivalent::{effective_index, IndexConvention, ShapeFactor};
use perforated::foldy::{assemble_system, invertibility_check, l2_bound_check, simulate, solve_charges};
use perforated::geometry::{layer_census, partition_domain, place_holes, BodySpec, ScattererSet};
use perforated::harness::{run_convergence, ConvergenceReport};
use perforated::point::dist;
use perforated::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const SWEEP: [f64; 5] = [0.1, 0.07, 0.05, 0.035, 0.025];

fn vacuum(k: f64) -> Background {
    Background::vacuum(Wavenumber::unbounded(k).unwrap())
}

fn ball_body() -> BodySpec {
    BodySpec::ball(1.0)
}

fn c1_closed_forms() -> Outcome {
    let g = make_sphere_grid(4).unwrap();
    // single hole, vacuum and a heterogeneous background
    let mut worst1 = 0.0f64;
    let z = [0.31, 0.47, 0.55];
    let set = ScattererSet::from_centers(&[z], 0.05, 0.0, &ball_body(), C64::new(0.8, -0.3));
    let mut het = MediumSpec::homogeneous(C64::new(0.0, 0.0));
    het.n = ScalarField::Gaussian { center: [0.5; 3], base: C64::new(1.4, 0.0), amplitude: C64::new(0.3, 0.05), width: 0.3 };
    let bgs = [vacuum(1.7), Background::new(&het, Wavenumber::unbounded(1.7).unwrap(), 0.125, &SolverOptions::default()).unwrap()];
    for bg in &bgs {
        let out = simulate(&set, bg, &g).unwrap();
        let c = set.holes[0].c;
        for t in 0..g.len() {
            let want = -c * out.rhs[(0, t)];
            worst1 = worst1.max((out.charges.q[(0, t)] - want).norm() / want.norm());
        }
    }
    // two holes in vacuum against 2×2 elimination
    let k = 1.1;
    let z = [[0.2, 0.3, 0.1], [0.45, 0.12, 0.36]];
    let mut set = ScattererSet::from_centers(&z, 0.05, 0.0, &ball_body(), C64::new(1.0, 0.0));
    set.apply_schedule(&[C64::new(40.0, -7.0), C64::new(-25.0, 3.0)]).unwrap();
    let (c1, c2) = (set.holes[0].c, set.holes[1].c);
    let r = dist(z[0], z[1]);
    let phi = C64::new(0.0, k * r).exp() / (4.0 * PI * r);
    let out = simulate(&set, &vacuum(k), &g).unwrap();
    let mut worst2 = 0.0f64;
    for t in 0..g.len() {
        let (v1, v2) = (plane_wave(k, g.directions[t], z[0]), plane_wave(k, g.directions[t], z[1]));
        let q1 = -c1 * (v1 - c2 * phi * v2) / (C64::new(1.0, 0.0) - c1 * c2 * phi * phi);
        let q2 = -c2 * (v2 - c1 * phi * v1) / (C64::new(1.0, 0.0) - c1 * c2 * phi * phi);
        worst2 = worst2.max((out.charges.q[(0, t)] - q1).norm() / q1.norm());
        worst2 = worst2.max((out.charges.q[(1, t)] - q2).norm() / q2.norm());
    }
    outcome(worst1 <= 1e-12 && worst2 <= 1e-10, format!("M=1 rel err {worst1:.2e} (≤1e-12), M=2 rel err {worst2:.2e} (≤1e-10)"))
}

fn c2_invertibility() -> Outcome {
    let lambda = C64::new(0.5, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut all_hold = true;
    let mut sufficient = true;
    let mut worst_use = 0.0f64;
    let mut max_m = 0;
    let mut raw_margin = f64::INFINITY;
    let mut threshold_err = 0.0f64;
    for seed in 0..20u64 {
        let m_target: usize = rng.random_range(8..=400);
        let kappa: f64 = rng.random_range(0.5..2.0);
        let a = (m_target as f64 + 0.5).powf(-0.5);
        let medium = MediumSpec::homogeneous(lambda);
        let mut regime = AsymptoticRegime::standard(a, 0.0, 2.0 / 3.0);
        regime.d_min = 0.5;
        regime.d_max = 2.0;
        regime.m_max = 1.0;
        let p = partition_domain(&medium, &regime).unwrap();
        let set = place_holes(&p, &regime, &medium, &ball_body(), kappa, seed).unwrap();
        let report = invertibility_check(&set, &regime);
        threshold_err = threshold_err.max((report.sufficient_threshold - 26f64.sqrt() / PI).abs());
        sufficient &= report.sufficient_pass;
        raw_margin = raw_margin.min(report.condition_margin);
        let g = make_sphere_grid(4).unwrap();
        let bg = vacuum(kappa);
        let rhs = bg.plane_waves(&g.directions).unwrap().at_points(&set.centers());
        let q = solve_charges(&assemble_system(&set, &bg).unwrap(), &rhs).unwrap();
        let b = l2_bound_check(&report, &q, &rhs);
        all_hold &= b.holds;
        worst_use = worst_use.max(b.worst_ratio / b.factor);
        max_m = max_m.max(set.len());
    }
    outcome(
        all_hold && sufficient && threshold_err <= 1e-10,
        format!(
            "20 placements, M ≤ {max_m}: λ₋/λ₊² > √(26M)/π {sufficient}, ℓ² bound used ≤ {:.3} of its allowance, \
             threshold √26/π = {:.10} (err {threshold_err:.1e}); raw lemma margin min {raw_margin:.3e}",
            worst_use,
            26f64.sqrt() / PI
        ),
    )
}

fn mie_error(n: usize) -> f64 {
    let (k, radius, contrast) = (1.0, 0.5, 0.3);
    let domain = Domain::Ball { center: [0.0; 3], radius };
    let g = make_sphere_grid(4).unwrap();
    let grid = VolumeGrid::with_cells(&domain, n).unwrap();
    let q: Vec<C64> = grid.fractions().iter().map(|f| C64::new(k * k * contrast * f, 0.0)).collect();
    let op = LsOperator::new(&grid, q, Wavenumber::unbounded(k).unwrap(), &SolverOptions::default()).unwrap();
    let inc = Mat::from_fn(op.len(), g.len(), |i, t| plane_wave(k, g.directions[t], op.centers()[i]));
    let ff = op.far_field(&op.solve(&inc).unwrap(), &g.directions);
    let mie = mie_ball_oracle(radius, C64::new(contrast, 0.0), k, &g).unwrap();
    ff.rel_l2(&mie, &g.weights).unwrap()
}

fn c3_mie() -> Outcome {
    let e16 = mie_error(16);
    let e32 = mie_error(32);
    let ratio = e16 / e32;
    outcome(e32 <= 0.02 && ratio >= 1.7, format!("rel L² err 32³ {e32:.3e} (≤2e-2), 16³ {e16:.3e}, ratio {ratio:.2} (≥1.7)"))
}

fn c4_reciprocity() -> Outcome {
    let medium = MediumSpec::homogeneous(C64::new(1.0, 0.3));
    let mut regime = AsymptoticRegime::standard(400.5f64.powf(-0.5), 0.0, 2.0 / 3.0);
    regime.d_min = 0.5;
    regime.d_max = 2.0;
    let p = partition_domain(&medium, &regime).unwrap();
    let set = place_holes(&p, &regime, &medium, &ball_body(), 1.5, 0).unwrap();
    let g = make_sphere_grid(4).unwrap();
    let f = simulate(&set, &vacuum(1.5), &g).unwrap().far_field;
    let mut worst = 0.0f64;
    for x in 0..g.len() {
        for t in 0..g.len() {
            worst = worst.max((f.get(x, t) - f.get(g.antipode(t), g.antipode(x))).norm());
        }
    }
    let rel = worst / f.sup_norm();
    outcome(set.len() == 400 && rel <= 1e-8, format!("M = {}, sup|F(x̂,θ) − F(−θ,−x̂)| / sup|F| = {rel:.2e} (≤1e-8)", set.len()))
}

fn sweep_config(extra: &str) -> RunConfig {
    let base = "
        [medium.lambda0]
        preset = \"constant\"
        value = 1.0
        [regime]
        beta = 0.0
        d_min = 0.5
        d_max = 2.0
        [wave]
        kappa = 1.0
        [geometry]
        seed = 7
        [sphere]
        order = 4
    ";
    RunConfig::from_toml_str(&format!("{base}\n{extra}")).unwrap()
}

fn convergence_config() -> RunConfig {
    let mut c = sweep_config("");
    c.regime.t = 2.0 / 3.0;
    c
}

fn rows(r: &ConvergenceReport) -> String {
    r.rows.iter().map(|w| format!("a={} M={} err={:.3e}", w.a, w.m, w.sup_err.unwrap_or(f64::NAN))).collect::<Vec<_>>().join(", ")
}

fn c5_rate(report: &ConvergenceReport) -> Outcome {
    let ok = report.rows.iter().all(|r| r.is_ok());
    let slope = report.slope.unwrap_or(f64::NAN);
    let m_max = report.rows.iter().map(|r| r.m).max().unwrap_or(0);
    outcome(
        ok && m_max == 1600 && (0.4..=0.95).contains(&slope),
        format!(
            "slope {slope:.3} in [0.4, 0.95] (theorem exponent {:.3}, with 1/3 cap {:.3}); {}",
            report.expected.theorem,
            report.expected.proof,
            rows(report)
        ),
    )
}

fn monotone_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn c6_dilute() -> Outcome {
    let mut c = sweep_config("[convergence]\nreference = \"background\"");
    c.regime.s = 1.5;
    c.regime.t = 0.5;
    let r = run_convergence(&c, &SWEEP).unwrap();
    let errs: Vec<f64> = r.rows.iter().map(|w| w.sup_err.unwrap_or(f64::NAN)).collect();
    outcome(r.rows.iter().all(|w| w.is_ok()) && monotone_decreasing(&errs), format!("s = 1.5: {}", rows(&r)))
}

fn c7_cloak() -> Outcome {
    let c = RunConfig::from_toml_str(
        "
        [domain]
        shape = \"ball\"
        [medium.n]
        preset = \"constant\"
        value = 2.0
        [medium.lambda0]
        preset = \"cloak\"
        [regime]
        beta = 0.0
        d_min = 0.5
        d_max = 2.0
        [wave]
        kappa = 0.5
        [solver]
        background_h = 0.1
    ",
    )
    .unwrap();
    let mut c = c;
    c.regime.t = 2.0 / 3.0;
    let r = run_convergence(&c, &SWEEP).unwrap();
    // uncloaked: same holes without impedance, i.e. the background alone
    let bg = Background::new(&c.medium, Wavenumber::unbounded(c.kappa).unwrap(), 0.1, &c.solver).unwrap();
    let g = make_sphere_grid(c.sphere_order).unwrap();
    let uncloaked = bg.plane_waves(&g.directions).unwrap().far_field(&g.directions).sup_norm();
    let sups: Vec<f64> = r.rows.iter().map(|w| w.sup_far.unwrap_or(f64::NAN)).collect();
    let last = *sups.last().unwrap();
    outcome(
        r.rows.iter().all(|w| w.is_ok()) && last <= 0.25 * uncloaked && monotone_decreasing(&sups),
        format!(
            "sup|U∞| at a=0.025 {last:.3e} = {:.2}% of uncloaked {uncloaked:.3e} (≤25%); sweep {:?}",
            100.0 * last / uncloaked,
            sups.iter().map(|s| format!("{s:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn c8_branch() -> Outcome {
    let mut worst = 0.0f64;
    let mut passive = true;
    for (n, k, p) in [(1.0, 0.0, 1.0), (1.5, 0.0, 1.0), (2.0, 1.0, PI)] {
        let mut m = MediumSpec::homogeneous(C64::new(0.0, 0.0));
        m.n = ScalarField::constant(n);
        m.k = ScalarField::constant(k);
        let pts = [[0.5; 3], [0.2, 0.7, 0.4]];
        for d in [1e-2, 1e-3, 1e-4] {
            let e = effective_index(&m, &ShapeFactor::Uniform { p }, &ScalarField::constant_c(C64::new(d, -d)), &pts, IndexConvention::Standard);
            passive &= e.passive && e.undefined.is_empty();
            for v in e.values.iter().flatten() {
                passive &= v.im >= 0.0;
                worst = worst.max((v.re + n).abs() / (5.0 * d));
            }
        }
    }
    outcome(passive && worst <= 1.0, format!("max |Re ñ + n| / 5δ = {worst:.3} (≤1), Im ñ ≥ 0: {passive}"))
}

fn c9_census() -> Outcome {
    let mut exact = true;
    let mut dist_ok = true;
    let mut tested = Vec::new();
    for cells in [5usize, 7, 9] {
        let a = ((cells * cells * cells) as f64).powf(-0.5);
        let medium = MediumSpec::homogeneous(C64::new(1.0, 0.0));
        let regime = AsymptoticRegime::standard(a, 0.0, 2.0 / 3.0);
        let p = partition_domain(&medium, &regime).unwrap();
        let set = place_holes(&p, &regime, &medium, &ball_body(), 1.0, 0).unwrap();
        let mid = (cells / 2) as i64;
        let m = set.lattice.iter().position(|l| *l == Some([mid, mid, mid])).unwrap();
        let c = layer_census(&set, m, &regime);
        for l in &c.layers {
            if l.complete {
                exact &= l.count == 24 * l.layer * l.layer + 2;
            }
        }
        dist_ok &= c.distance_bound_holds();
        tested.push(format!("a={a:.4}"));
    }
    let mut doubled = true;
    // cubes tiled exactly by the lattice, n³ cells of side a^{2/3}
    for (a, t, n) in [(0.002, 0.96, 6.0), (0.0015, 0.97, 7.0)] {
        let mut medium = MediumSpec::homogeneous(C64::new(1.0, 0.0));
        medium.k = ScalarField::constant(1.0);
        medium.domain = Domain::cube_of_volume([0.5; 3], n * n * n * a * a).unwrap();
        let mut regime = AsymptoticRegime::standard(a, 0.0, t);
        regime.d_max = 1e3;
        let p = partition_domain(&medium, &regime).unwrap();
        let set = place_holes(&p, &regime, &medium, &ball_body(), 1.0, 11).unwrap();
        for m in 0..set.len() {
            let c = layer_census(&set, m, &regime);
            doubled &= c.doubled_count_holds();
            dist_ok &= c.distance_bound_holds();
        }
        tested.push(format!("a={a} K=1 M={}", set.len()));
    }
    outcome(exact && doubled && dist_ok, format!("24n²+2 exact {exact}, ≤48n²+4 {doubled}, distance ≥ nℓ/2 {dist_ok} ({})", tested.join(", ")))
}

fn c10_determinism(first: &ConvergenceReport) -> Outcome {
    let cfg = convergence_config();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let second = pool.install(|| run_convergence(&cfg, &SWEEP).unwrap());
    let same = first.rows_json() == second.rows_json();
    outcome(same, format!("report rows byte-identical across runs (1 vs 3 threads): {same}"))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let dt = t.elapsed();
        let in_time = dt <= limit;
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {id}: {} [{:.2}s, limit {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            dt.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    };
    let secs = Duration::from_secs;
    report(1, secs(1), &mut c1_closed_forms);
    report(2, secs(60), &mut c2_invertibility);
    report(3, secs(300), &mut c3_mie);
    report(4, secs(60), &mut c4_reciprocity);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut conv = None;
    report(5, secs(1200), &mut || {
        let r = single.install(|| run_convergence(&convergence_config(), &SWEEP).unwrap());
        let o = c5_rate(&r);
        conv = Some(r);
        o
    });
    report(6, secs(600), &mut c6_dilute);
    report(7, secs(1200), &mut c7_cloak);
    report(8, secs(1), &mut c8_branch);
    report(9, secs(10), &mut c9_census);
    let first = conv.expect("criterion 5 ran");
    report(10, secs(1200), &mut || c10_determinism(&first));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
