//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line, then exits non-zero if any failed.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freesnake::analysis::{curvature_profile, estimate_homography, PipelineConfig};
use freesnake::assembly::{
    genus_template, inflation_for_sweep, render_centerline, AssemblySpec, BendSign, Genus, SegmentSpec,
};
use freesnake::compare::{duration_stats, region_indices, Region, StdConvention};
use freesnake::free_model::{max_curvature, neutral_angle, solve_fiber_angle, Boundary, FreeGeometry};
use freesnake::{Centerline, Point, Units};
use freesnake_cli::io::read_durations;

type Outcome = Result<String, String>;

/// Name, check, and optional runtime budget.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_geometry(r: &mut ChaCha8Rng) -> FreeGeometry {
    let l0 = r.gen_range(0.01..0.5);
    let r0 = r.gen_range(0.001..0.02);
    let alpha = r.gen_range(neutral_angle() + 1e-3..PI / 2.0 - 1e-3);
    FreeGeometry::new(l0, r0, alpha).expect("sampled inside the domain")
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn boundary_identities() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = random_geometry(&mut r);
        let at_rest = g.curvature_at_length(g.relaxed_length()).map_err(|e| e.to_string())?;
        let at_neutral = max_curvature(g.relaxed_radius(), neutral_angle()).map_err(|e| e.to_string())?;
        worst = worst.max(at_rest.abs()).max(at_neutral.abs());
    }
    ensure(worst <= 1e-12, || format!("largest residual {worst:.2e}"))?;
    Ok(format!("1000 geometries, largest |K| {worst:.2e}"))
}

fn max_length_agreement() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = random_geometry(&mut r);
        let direct = g.max_curvature();
        let via_length = g.curvature_at_length(g.max_length()).map_err(|e| e.to_string())?;
        worst = worst.max(((via_length - direct) / direct).abs());
    }
    ensure(worst <= 1e-9, || format!("largest relative gap {worst:.2e}"))?;
    Ok(format!("1000 geometries, largest relative gap {worst:.2e}"))
}

fn monotone_in_fiber_angle() -> Outcome {
    let mut r = rng(3);
    let r0 = 0.00475;
    let mut violations = 0;
    for _ in 0..10_000 {
        let a = r.gen_range(neutral_angle()..PI / 2.0);
        let b = r.gen_range(neutral_angle()..PI / 2.0);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if lo == hi {
            continue;
        }
        let k_lo = max_curvature(r0, lo).map_err(|e| e.to_string())?;
        let k_hi = max_curvature(r0, hi).map_err(|e| e.to_string())?;
        if k_lo.partial_cmp(&k_hi) != Some(std::cmp::Ordering::Less) {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("10000 pairs, 0 violations".into())
}

fn inverse_round_trip() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let r0 = r.gen_range(0.001..0.02);
        let alpha = r.gen_range(neutral_angle() + 1e-6..PI / 2.0 - 1e-6);
        let k = max_curvature(r0, alpha).map_err(|e| e.to_string())?;
        let back = solve_fiber_angle(k, r0, Boundary::Strict).map_err(|e| format!("alpha {alpha}: {e}"))?;
        worst = worst.max((back - alpha).abs());
    }
    ensure(worst <= 1e-6, || format!("largest angle error {worst:.2e} rad"))?;
    Ok(format!("1000 angles, largest error {worst:.2e} rad"))
}

fn circumcircle_on_circle() -> Outcome {
    let radius = 0.37;
    let sweep = 1.5 * PI;
    let pts: Vec<Point> = (0..500)
        .map(|i| {
            let t = sweep * i as f64 / 499.0;
            Point::new(radius * t.cos(), radius * t.sin())
        })
        .collect();
    let line = Centerline::new(pts, Units::Meters).map_err(|e| e.to_string())?;
    let profile = curvature_profile(&line, 10).map_err(|e| e.to_string())?;
    let expected = line.total_length() / radius;
    let mut worst = 0.0f64;
    for v in profile.values().iter().flatten() {
        worst = worst.max(((v - expected) / expected).abs());
    }
    ensure(profile.missing_count() == 20, || format!("{} masked samples", profile.missing_count()))?;
    ensure(worst <= 1e-6, || format!("largest relative error {worst:.2e}"))?;
    Ok(format!("480 interior samples, largest relative error {worst:.2e}"))
}

fn single_arc_pipeline() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (alpha_deg, sweep) in [(89.0, PI), (80.0, 0.5 * PI), (67.5, 0.25 * PI)] {
        let geom = FreeGeometry::from_degrees(0.1, 0.00475, alpha_deg).map_err(|e| e.to_string())?;
        let lambda = inflation_for_sweep(&geom, 1.0, sweep).map_err(|e| e.to_string())?;
        let seg = SegmentSpec::uniform("arc", geom, lambda, BendSign::Left).map_err(|e| e.to_string())?;
        let expected = seg.operating_length() * seg.curvature();
        let spec = AssemblySpec::new(Genus::Custom("arc".into()), vec![seg]).map_err(|e| e.to_string())?;
        let line = render_centerline(&spec, 2000).map_err(|e| e.to_string())?;
        let profile = PipelineConfig::default().run(&line).map_err(|e| e.to_string())?;
        for (f, v) in profile.arc_fraction().iter().zip(profile.values()) {
            if (0.2..=0.8).contains(f) {
                let v = v.ok_or("interior sample masked")?;
                worst = worst.max(((v - expected) / expected).abs());
            }
        }
        cases += 1;
    }
    // Smoothing shrinks radius and length nearly in proportion, so the bias
    // on a clean arc stays far below the 5% allowance.
    ensure(worst <= 1e-3, || format!("largest relative error {worst:.2e}"))?;
    Ok(format!("{cases} arcs, largest interior relative error {worst:.2e}"))
}

fn genus_structure() -> Outcome {
    let config = PipelineConfig::default();
    let idx = region_indices(config.samples, config.offset).map_err(|e| e.to_string())?;
    let mut summary = BTreeMap::new();
    for genus in Genus::TEMPLATED {
        let spec = genus_template(genus.name()).map_err(|e| e.to_string())?;
        let line = render_centerline(&spec, 700).map_err(|e| e.to_string())?;
        let profile = config.run(&line).map_err(|e| e.to_string())?;
        let region = |r: Region| -> Vec<f64> { profile.values()[idx.range(r)].iter().flatten().copied().collect() };
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let head = region(Region::Head);
        let head_peak = head.iter().copied().fold(0.0, f64::max);
        summary.insert(
            genus.name().to_string(),
            (head_peak, mean(&head), mean(&region(Region::Mid)), mean(&region(Region::Tail))),
        );
    }
    let get = |g: &str| summary[g];
    let (m_peak, m_head, m_mid, m_tail) = get("Micrurus");
    let (o_peak, _, o_mid, o_tail) = get("Oxyrhopus");
    let (_, a_head, _, _) = get("Atractus");
    let kink_m = m_peak / m_mid;
    let kink_o = o_peak / o_mid;
    let tail_ratio = o_tail / m_tail;
    let head_ratio = a_head / m_head;
    ensure(kink_m >= 2.0, || format!("Micrurus head peak / mid mean {kink_m:.3}"))?;
    ensure(kink_o >= 2.0, || format!("Oxyrhopus head peak / mid mean {kink_o:.3}"))?;
    ensure(tail_ratio < 0.1, || format!("Oxyrhopus / Micrurus tail mean {tail_ratio:.4}"))?;
    ensure(head_ratio < 0.1, || format!("Atractus / Micrurus head mean {head_ratio:.4}"))?;
    Ok(format!(
        "kink peak/mid M {kink_m:.2} O {kink_o:.2}; tail O/M {tail_ratio:.4}; head A/M {head_ratio:.4}"
    ))
}

fn min_triangle_area(q: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..4 {
        let (a, b, c) = (q[i], q[(i + 1) % 4], q[(i + 2) % 4]);
        let area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs();
        best = best.min(area);
    }
    best
}

fn random_quad(r: &mut ChaCha8Rng) -> Vec<Point> {
    loop {
        let q: Vec<Point> = (0..4).map(|_| Point::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
        if min_triangle_area(&q) > 0.05 {
            return q;
        }
    }
}

fn homography_recovery() -> Outcome {
    let mut r = rng(8);
    let (mut reproj, mut identity) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let src = random_quad(&mut r);
        let dst = random_quad(&mut r);
        let h = estimate_homography(&src, &dst).map_err(|e| e.to_string())?;
        for (s, d) in src.iter().zip(&dst) {
            let p = h.map_point(*s).ok_or("source corner mapped to infinity")?;
            reproj = reproj.max(p.distance(*d));
        }
        let round = h.compose(&h.inverse().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let m = round.matrix();
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                identity = identity.max((m[(i, j)] - target).abs());
            }
        }
    }
    ensure(reproj <= 1e-10, || format!("largest reprojection error {reproj:.2e}"))?;
    ensure(identity <= 1e-9, || format!("largest h·h⁻¹ deviation {identity:.2e}"))?;
    Ok(format!("1000 quads, reprojection {reproj:.2e}, identity {identity:.2e}"))
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).expect("readable output dir") {
            let p = entry.expect("dir entry").path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let key = p.strip_prefix(dir).unwrap().display().to_string();
                out.insert(key, fs::read(&p).expect("readable output"));
            }
        }
    }
    out
}

fn run_fixture_pipeline(out: &Path, sequential: bool) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_freesnake");
    let fx = fixtures();
    let mut groups = Vec::new();
    for genus in ["atractus", "micrurus", "oxyrhopus"] {
        let dir = out.join(genus);
        let mut cmd = Command::new(bin);
        cmd.arg("--out").arg(&dir).arg("analyze");
        cmd.arg("--traces").arg(fx.join(format!("{genus}_traces.csv")));
        cmd.arg("--rectify").arg(fx.join(format!("{genus}_rectify.csv")));
        cmd.args(["--units", "px"]);
        if sequential {
            cmd.arg("--sequential");
        }
        let status = cmd.output().map_err(|e| e.to_string())?;
        ensure(status.status.success(), || format!("analyze {genus}: {}", String::from_utf8_lossy(&status.stderr)))?;
        groups.push(format!("{genus}={}", dir.join("profiles.csv").display()));
    }
    let status = Command::new(bin)
        .arg("--out")
        .arg(out.join("compare"))
        .arg("compare")
        .arg("--groups")
        .args(&groups)
        .arg("--durations")
        .arg(format!("60fps={}", fx.join("durations_60fps.csv").display()))
        .arg(format!("120fps={}", fx.join("durations_120fps.csv").display()))
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || format!("compare: {}", String::from_utf8_lossy(&status.stderr)))
}

fn deterministic_outputs() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tmp.path().join("run");
    run_fixture_pipeline(&out, false)?;
    let first = snapshot(&out);
    fs::remove_dir_all(&out).map_err(|e| e.to_string())?;
    run_fixture_pipeline(&out, false)?;
    let second = snapshot(&out);
    ensure(first.len() >= 9, || format!("only {} output files", first.len()))?;
    ensure(first == second, || {
        let differing: Vec<_> = first.keys().filter(|k| first.get(*k) != second.get(*k)).cloned().collect();
        format!("outputs differ: {differing:?}")
    })?;

    // Sequential and parallel execution must agree on every data file.
    let seq = tmp.path().join("seq");
    run_fixture_pipeline(&seq, true)?;
    let seq_files = snapshot(&seq);
    for (name, bytes) in first.iter().filter(|(k, _)| k.ends_with(".csv")) {
        ensure(seq_files.get(name) == Some(bytes), || format!("{name} differs between sequential and parallel"))?;
    }
    Ok(format!("{} files byte-identical across runs", first.len()))
}

fn duration_arithmetic() -> Outcome {
    let fx = fixtures();
    // 6, 9, 12 frames at 60 fps and 12, 18, 15, 21 frames at 120 fps.
    let cases = [
        ("durations_60fps.csv", 0.15, (1.0f64 / 600.0).sqrt(), 0.05),
        ("durations_120fps.csv", 0.1375, 0.00078125f64.sqrt(), (0.003125f64 / 3.0).sqrt()),
    ];
    let close = |a: f64, b: f64| (a - b).abs() <= 4.0 * f64::EPSILON * b.abs();
    for (file, mean, pop, sample) in cases {
        let records = read_durations(&fx.join(file)).map_err(|e| e.to_string())?;
        let p = duration_stats(&records, StdConvention::Population).map_err(|e| e.to_string())?;
        let s = duration_stats(&records, StdConvention::Sample).map_err(|e| e.to_string())?;
        ensure(close(p.mean, mean), || format!("{file}: mean {} vs {mean}", p.mean))?;
        ensure(close(p.std, pop), || format!("{file}: population std {} vs {pop}", p.std))?;
        ensure(close(s.std, sample), || format!("{file}: sample std {} vs {sample}", s.std))?;
    }
    Ok("60 fps and 120 fps fixtures match hand-computed mean and std".into())
}

fn main() {
    // libtest arguments such as `--nocapture` or filters are accepted and ignored.
    let criteria: [Criterion; 10] = [
        ("boundary identities", boundary_identities, Some(Duration::from_secs(1))),
        ("max-length agreement", max_length_agreement, Some(Duration::from_secs(1))),
        ("monotone in fiber angle", monotone_in_fiber_angle, Some(Duration::from_secs(1))),
        ("inverse round-trip", inverse_round_trip, Some(Duration::from_secs(1))),
        ("circumcircle exactness", circumcircle_on_circle, Some(Duration::from_secs(1))),
        ("single-arc pipeline", single_arc_pipeline, Some(Duration::from_secs(5))),
        ("genus structure", genus_structure, Some(Duration::from_secs(10))),
        ("homography recovery", homography_recovery, Some(Duration::from_secs(2))),
        ("deterministic outputs", deterministic_outputs, None),
        ("duration arithmetic", duration_arithmetic, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, budget) {
            if elapsed > *limit {
                outcome = Err(format!("took {elapsed:.2?}, budget {limit:.0?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
