//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line (written
//! straight to stdout so it shows even when output capture is on) and then
//! asserts the same condition.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::time::{Duration, Instant};

use hyperthin::detour::{detour_profile, detour_verdict};
use hyperthin::euclid::{
    euclid_triangle_delta, isoceles_ratio, point_segment_distance, EuclidTriangle, ETA0,
};
use hyperthin::report::{compute, run, GraphSource, Outcome, RunConfig, Subcommand};
use hyperthin::rips::{classify, omega_profile, thinness_ratio_sup, OmegaOptions};
use hyperthin::space::{all_pairs_distances, gen_space, subdivide, Generator};
use hyperthin::tower::{
    build_tower, default_scales, rescaled_four_point, tower_ratio_check, tree_path_property,
    ConeOptions,
};
use hyperthin::{Band, SamplerSpec, Thresholds};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict_line(id: &str, ok: bool, detail: String) {
    let line = format!(
        "[acceptance] {} {id}: {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn check(id: &str, ok: bool, detail: String) {
    verdict_line(id, ok, detail.clone());
    assert!(ok, "{id}: {detail}");
}

fn generator(spec: &str) -> GraphSource {
    GraphSource::Generator {
        spec: spec.parse::<Generator>().unwrap(),
    }
}

#[test]
fn c1_euclidean_constant() {
    let start = Instant::now();
    let r = compute(&RunConfig::new(Subcommand::Euclid, "unused")).unwrap();
    let elapsed = start.elapsed();
    let Outcome::Euclid(e) = r.result else {
        unreachable!()
    };
    let cos = e.argmax_angles[0].cos();
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let ok = (e.sup_found - ETA0).abs() <= 1e-4
        && (cos - golden).abs() <= 1e-3
        && elapsed <= Duration::from_secs(60);
    check(
        "1 euclidean-constant",
        ok,
        format!(
            "sup {:.9} vs eta0 {:.9} (|diff| {:.1e} <= 1e-4), argmax cos {:.6} vs {:.6} (<= 1e-3), base angles ({:.5}, {:.5}), {:.1}s <= 60s",
            e.sup_found,
            ETA0,
            (e.sup_found - ETA0).abs(),
            cos,
            golden,
            e.argmax_angles[0],
            e.argmax_angles[1],
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c2_isoceles_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let alpha = rng.gen_range(1e-3..FRAC_PI_2 - 1e-3);
        let base = rng.gen_range(0.01..100.0);
        let apex = [base / 2.0, base / 2.0 * alpha.tan()];
        let (b1, b2) = ([0.0, 0.0], [base, 0.0]);
        let q = [base / 2.0, 0.0];
        let dist = point_segment_distance(q, b1, apex).min(point_segment_distance(q, b2, apex));
        let pr = base + 2.0 * (base / 2.0) / alpha.cos();
        worst = worst.max((dist / pr - isoceles_ratio(alpha).unwrap()).abs());
    }
    check(
        "2 isoceles-formula",
        worst <= 1e-6,
        format!("max |oracle - formula| over 1000 (alpha, base) pairs = {worst:.2e} <= 1e-6"),
    );
}

#[test]
fn c3_perimeter_bound() {
    let mut violations = 0;
    let mut graph_checked = 0;
    let spaces = [
        gen_space("grid_plane", &[20], 0).unwrap(),
        subdivide(&gen_space("hyperbolic_tessellation", &[3], 0).unwrap(), 0.5).unwrap(),
        gen_space("random_tree", &[300], 3).unwrap(),
        subdivide(&gen_space("cycle", &[17], 0).unwrap(), 0.3).unwrap(),
    ];
    for (k, g) in spaces.iter().enumerate() {
        let d = all_pairs_distances(g);
        let p = omega_profile(
            g,
            &d,
            &OmegaOptions::new(SamplerSpec::random(2500, k as u64)),
        )
        .unwrap();
        for s in &p.samples {
            graph_checked += 1;
            if 4.0 * s.delta > s.perimeter + 4.0 * g.resolution() + 1e-9 {
                violations += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut euclid_checked = 0;
    for _ in 0..10_000 {
        let mut p = || [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)];
        let t = EuclidTriangle::new(p(), p(), p());
        euclid_checked += 1;
        if 4.0 * euclid_triangle_delta(&t, 1e-9) > t.perimeter() + 1e-9 {
            violations += 1;
        }
    }
    check(
        "3 perimeter-bound",
        violations == 0 && graph_checked == 10_000 && euclid_checked == 10_000,
        format!("{violations} violations of 4*delta <= pr (+4*resolution) over {graph_checked} graph and {euclid_checked} plane triangles"),
    );
}

#[test]
fn c4_tree_degeneracy() {
    let th = Thresholds::default();
    let mut nonzero = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut bands_ok = true;
    for seed in 0..20 {
        let g = gen_space("random_tree", &[200], seed).unwrap();
        let d = all_pairs_distances(&g);
        let p = omega_profile(&g, &d, &OmegaOptions::new(SamplerSpec::random(1000, seed))).unwrap();
        nonzero += p.samples.iter().filter(|s| s.delta != 0.0).count();
        worst_ratio = worst_ratio.max(thinness_ratio_sup(&p).unwrap());
        bands_ok &= classify(&p, &th).unwrap().band == Band::TreeConsistent;
    }
    let g = gen_space("random_tree", &[100], 42).unwrap();
    let d = all_pairs_distances(&g);
    let passed = (0..200u64)
        .filter(|&trial| tree_path_property(&g, &d, 1, trial).unwrap())
        .count();
    check(
        "4 tree-degeneracy",
        nonzero == 0 && worst_ratio == 0.0 && worst_ratio < th.tree && bands_ok && passed == 200,
        format!(
            "20 trees x 1000 triangles: {nonzero} with delta != 0, max ratio_sup {worst_ratio}, all tree-consistent: {bands_ok}; path property {passed}/200"
        ),
    );
}

fn analyze(spec: &str) -> (hyperthin::Verdict, Duration) {
    let mut cfg = RunConfig::new(Subcommand::Analyze, "unused");
    cfg.source = Some(generator(spec));
    cfg.samples = Some(20_000);
    cfg.seed = 1;
    let start = Instant::now();
    let r = compute(&cfg).unwrap();
    let Outcome::Analyze { verdict, .. } = r.result else {
        unreachable!()
    };
    (verdict, start.elapsed())
}

#[test]
fn c5a_grid_ratio_window() {
    let (v, elapsed) = analyze("grid_plane:40");
    check(
        "5a grid-ratio-window",
        (0.13..=0.16).contains(&v.ratio_sup) && elapsed <= Duration::from_secs(600),
        format!(
            "grid_plane(40, octile), 20000 samples: ratio_sup {:.4} in [0.13, 0.16], {:.1}s",
            v.ratio_sup,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c5b_grid_not_hyperbolic() {
    let (v, elapsed) = analyze("grid_plane:40");
    let slope = v.slope_tail.unwrap_or(f64::NAN);
    check(
        "5b grid-band",
        slope >= 1.0 / 32.0 && v.band == Band::NotHyperbolicConsistent && elapsed <= Duration::from_secs(600),
        format!(
            "grid_plane(40, octile): tail slope {slope:.4} >= 1/32 over t >= {:.1}, band {}, {:.1}s",
            v.t_min,
            v.band,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c5c_tessellation_hyperbolic() {
    let (v, elapsed) = analyze("hyperbolic_tessellation:6");
    let slope = v.slope_tail.unwrap_or(f64::NAN);
    check(
        "5c tessellation-band",
        slope < 1.0 / 32.0 && v.band == Band::HyperbolicConsistent && elapsed <= Duration::from_secs(600),
        format!(
            "hyperbolic_tessellation(6): tail slope {slope:.4} < 1/32 over t >= {:.1} ({} tail samples), band {}, {:.1}s",
            v.t_min,
            v.tail_samples,
            v.band,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c6a_tree_detours() {
    let th = Thresholds::default();
    let mut all_inf = true;
    let mut bands = true;
    for seed in 0..5 {
        let g = gen_space("random_tree", &[200], seed).unwrap();
        let d = all_pairs_distances(&g);
        let p = detour_profile(
            &g,
            &d,
            &[1.0, 2.0, 3.0, 4.0],
            &SamplerSpec::random(500, seed),
        )
        .unwrap();
        all_inf &= p.entries.iter().all(|e| e.g_hat.is_infinite());
        bands &= detour_verdict(&p, &th).unwrap().band == Band::HyperbolicConsistent;
    }
    check(
        "6a tree-detours",
        all_inf && bands,
        format!(
            "5 random trees: all entries infinite {all_inf}, all hyperbolic-consistent {bands}"
        ),
    );
}

fn grid_detours() -> hyperthin::detour::DetourProfile {
    let g = gen_space("grid_plane", &[60], 0).unwrap();
    let d = all_pairs_distances(&g);
    detour_profile(&g, &d, &[6.0, 8.0, 10.0], &SamplerSpec::random(2000, 1)).unwrap()
}

#[test]
fn c6b_grid_detour_ratio() {
    let p = grid_detours();
    let ratios: Vec<String> = p
        .entries
        .iter()
        .map(|e| format!("t={}: {:.3}", e.t, e.ratio()))
        .collect();
    let ok = p.entries.iter().all(|e| (2.8..=3.5).contains(&e.ratio()));
    check(
        "6b grid-detour-ratio",
        ok,
        format!(
            "grid_plane(60), 2000 witness pairs: g_hat/t in [2.8, 3.5]? {}",
            ratios.join(", ")
        ),
    );
}

#[test]
fn c6c_grid_detour_band() {
    let p = grid_detours();
    let v = detour_verdict(&p, &Thresholds::default()).unwrap();
    check(
        "6c grid-detour-band",
        v.band == Band::NotHyperbolicConsistent,
        format!(
            "grid_plane(60): tail min g_hat/t {:.3} <= 30, band {}",
            v.tail_min_ratio, v.band
        ),
    );
}

#[test]
fn c7_tower_metric() {
    let base = gen_space("grid_plane", &[6], 0).unwrap();
    let tower = build_tower(&base, 7, 5, 0.25).unwrap();
    let dt = all_pairs_distances(&tower.graph);
    let db = all_pairs_distances(&base);
    let p = 7;
    let n = base.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut cross = 0;
    for _ in 0..1000 {
        let (i, j) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let formula = if i == j {
            i as f64 * db.get(x, y)
        } else {
            cross += 1;
            i as f64 * db.get(x, p) + j as f64 * db.get(y, p) + (i as f64 - j as f64).abs()
        };
        worst =
            worst.max((dt.get(tower.level_vertex(i, x), tower.level_vertex(j, y)) - formula).abs());
    }

    let mut ratios = Vec::new();
    let mut contract = true;
    for (name, g) in [
        ("cycle(6)", gen_space("cycle", &[6], 0).unwrap()),
        ("grid_plane(15)", gen_space("grid_plane", &[15], 0).unwrap()),
        (
            "random_tree(80)",
            gen_space("random_tree", &[80], 5).unwrap(),
        ),
    ] {
        let t = build_tower(&g, 0, 4, 0.25).unwrap();
        let r = tower_ratio_check(&t, &SamplerSpec::random(5000, 1)).unwrap();
        contract &= r.sup_tower <= r.sup_base + 0.01;
        ratios.push(format!(
            "{name} sup_Y {:.4} sup_X {:.4}",
            r.sup_tower, r.sup_base
        ));
    }
    check(
        "7 tower-metric",
        worst <= 1e-9 && contract,
        format!(
            "1000 pairs ({cross} cross-level): max |realized - formula| {worst:.1e} <= 1e-9; sup_Y <= sup_X + 0.01: {}",
            ratios.join("; ")
        ),
    );
}

#[test]
fn c8_cone_proxy() {
    let curve = |spec: &str| {
        let g = gen_space(
            spec.split(':').next().unwrap(),
            &[spec.split(':').nth(1).unwrap().parse().unwrap()],
            0,
        )
        .unwrap();
        let d = all_pairs_distances(&g);
        let scales = default_scales(&d, g.max_edge_length(), 6).unwrap();
        rescaled_four_point(&d, &scales, &ConeOptions::new(SamplerSpec::random(5000, 1))).unwrap()
    };
    let tess = curve("hyperbolic_tessellation:7");
    let grid = curve("grid_plane:60");
    let defined = |c: &hyperthin::tower::ConeDefectCurve| -> Vec<f64> {
        c.defects.iter().flatten().copied().collect()
    };
    let (t, g) = (defined(&tess), defined(&grid));
    let tess_drop = t[0] / t[t.len() - 1];
    let g0 = g[0];
    let grid_ok = g.iter().all(|&x| x <= 2.0 * g0 && x >= g0 / 2.0);
    let fmt = |c: &hyperthin::tower::ConeDefectCurve| {
        c.scales
            .iter()
            .zip(&c.defects)
            .map(|(s, d)| match d {
                Some(d) => format!("{s:.2}:{d:.3}"),
                None => format!("{s:.2}:-"),
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    check(
        "8 cone-proxy",
        tess_drop >= 3.0 && grid_ok,
        format!(
            "tessellation(7) smallest/largest {tess_drop:.2} >= 3 [{}]; grid_plane(60) within 2x of {g0:.3}: {grid_ok} [{}]",
            fmt(&tess),
            fmt(&grid)
        ),
    );
}

#[test]
fn c9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut identical = true;
    let mut checked = Vec::new();
    let configs: Vec<(Subcommand, &str, Vec<&str>)> = vec![
        (
            Subcommand::Analyze,
            "grid_plane:15",
            vec!["report.json", "samples.csv", "buckets.csv", "profile.svg"],
        ),
        (
            Subcommand::Detour,
            "grid_plane:20",
            vec!["report.json", "detour.csv"],
        ),
        (
            Subcommand::Cone,
            "hyperbolic_tessellation:4",
            vec!["report.json", "cone.csv"],
        ),
        (
            Subcommand::Tower,
            "random_tree:30",
            vec!["report.json", "tower.graph", "tower.graph.json"],
        ),
        (Subcommand::Euclid, "", vec!["report.json"]),
    ];
    for (sub, spec, files) in configs {
        let mut outs = Vec::new();
        for run_id in 0..2 {
            let mut cfg =
                RunConfig::new(sub, dir.path().join(format!("{}-{run_id}", sub.as_str())));
            if !spec.is_empty() {
                cfg.source = Some(generator(spec));
            }
            cfg.samples = Some(1500);
            cfg.seed = 99;
            cfg.grid_resolution = 100;
            run(&cfg).unwrap();
            outs.push(cfg.out_dir);
        }
        for f in files {
            let same =
                std::fs::read(outs[0].join(f)).unwrap() == std::fs::read(outs[1].join(f)).unwrap();
            identical &= same;
            checked.push(format!("{}/{f}", sub.as_str()));
        }
    }
    check(
        "9 determinism",
        identical,
        format!(
            "byte-identical across two seeded runs: {identical} ({} files: {})",
            checked.len(),
            checked.join(", ")
        ),
    );
}
