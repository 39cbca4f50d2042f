//! Acceptance run: one PASS/FAIL line per criterion, then a nonzero exit if
//! any criterion failed. Built with `harness = false`.

use std::time::{Duration, Instant};

use convex_proj::asymptotic::{asymptotic_cone, extreme_equals_conepoints, grid_agreement};
use convex_proj::catalog::{self, ac_grid_agreement, syndetic_probe, syndetic_probe_with, verify_prop76, PLACEHOLDER_IDS};
use convex_proj::domain::{face_of, is_extreme, supporting_hyperplane, Constraint, ConvexDomain};
use convex_proj::dynamics::{horosphere_invariance_check, nested_horospheres, HorosphereSpec};
use convex_proj::hilbert::{hilbert_distance, sample_hilbert_ball, translation_length_empirical, translation_length_spectral};
use convex_proj::orbit::{limit_set_estimate, GeneratorSet, LIMIT_EPSILON};
use convex_proj::output::{svg_dots, to_json, Layer};
use convex_proj::projective::{hyperplane_chart, limit_of_sequence, Hyperplane, ProjMap, ProjPoint};
use convex_proj::sampling::substream;
use nalgebra::DVector;
use serde_json::{json, Value};

const SEED: u64 = 0;

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

struct Outcome {
    passed: bool,
    detail: String,
    report: Value,
}

type Criterion = fn(u64) -> Outcome;

/// Quadrant `{x, y > 0}`; its projective closure is the triangle with
/// vertices `[1:0:0]`, `[0:1:0]`, `[0:0:1]`.
fn triangle() -> ConvexDomain {
    ConvexDomain::polytope(&[(v(&[1.0, 0.0]), 0.0), (v(&[0.0, 1.0]), 0.0)], Some(v(&[1.0, 1.0])))
        .unwrap()
        .with_bounded_chart(hyperplane_chart(&[1.0, 1.0, 1.0]).unwrap())
}

fn parabola() -> ConvexDomain {
    let c = Constraint::new(|x| x[1] - x[0] * x[0], |x| v(&[-2.0 * x[0], 1.0]));
    ConvexDomain::from_constraints(2, v(&[0.0, 1.0]), vec![c], "parabola").unwrap()
}

fn shear(t: f64) -> ProjMap {
    ProjMap::from_rows(&[vec![1.0, 0.0, t], vec![2.0 * t, 1.0, t * t], vec![0.0, 0.0, 1.0]]).unwrap()
}

fn non_placeholder() -> Vec<catalog::CatalogEntry> {
    catalog::list().into_iter().filter(|e| !PLACEHOLDER_IDS.contains(&e.id)).collect()
}

fn c1_hilbert(seed: u64) -> Outcome {
    let disk = ConvexDomain::unit_disk();
    let origin = v(&[0.0, 0.0]);
    let mut disk_err: f64 = 0.0;
    for k in 1..=9 {
        let r = k as f64 / 10.0;
        let d = hilbert_distance(&disk, &origin, &v(&[r, 0.0])).unwrap();
        disk_err = disk_err.max((d - ((1.0 + r) / (1.0 - r)).ln()).abs());
    }
    let ids = ["iii", "iv", "vi", "xi", "xiii"];
    let mut violations = 0;
    let mut worst_triangle: f64 = f64::NEG_INFINITY;
    for (i, id) in ids.iter().enumerate() {
        let entry = catalog::get(id).unwrap();
        let d = &entry.domain;
        let mut rng = substream(seed, 100 + i as u64);
        for t in 0..500 {
            let radius = [0.5, 2.0, 5.0][t % 3];
            let x = sample_hilbert_ball(d, d.basepoint(), radius, &mut rng);
            let y = sample_hilbert_ball(d, d.basepoint(), radius, &mut rng);
            let z = sample_hilbert_ball(d, d.basepoint(), radius, &mut rng);
            let dxy = hilbert_distance(d, &x, &y).unwrap();
            let dyx = hilbert_distance(d, &y, &x).unwrap();
            let dyz = hilbert_distance(d, &y, &z).unwrap();
            let dxz = hilbert_distance(d, &x, &z).unwrap();
            let dxx = hilbert_distance(d, &x, &x).unwrap();
            let excess = dxz - dxy - dyz;
            worst_triangle = worst_triangle.max(excess);
            let ok = dxx.abs() <= 1e-9
                && (dxy - dyx).abs() <= 1e-9 * (1.0 + dxy)
                && (dxy > 0.0 || (&x - &y).norm() == 0.0)
                && excess <= 1e-9 * (1.0 + dxz);
            violations += usize::from(!ok);
        }
    }
    Outcome {
        passed: disk_err < 1e-9 && violations == 0,
        detail: format!("disk error {disk_err:.2e}, axiom violations {violations}/2500"),
        report: json!({"disk_max_error": disk_err, "axiom_violations": violations, "max_triangle_excess": worst_triangle}),
    }
}

fn c2_translation(seed: u64) -> Outcome {
    let d = triangle();
    let g = ProjMap::diagonal(&[2.0, 2.0, 0.25]).unwrap();
    let ln8 = 8f64.ln();
    let spectral = translation_length_spectral(&g).unwrap();
    let empirical = translation_length_empirical(&d, &g, 100_000, seed).unwrap();
    let gap = empirical.value - ln8;
    Outcome {
        passed: (spectral - ln8).abs() < 1e-12 && gap > -1e-9 && gap <= 1e-3,
        detail: format!("spectral {spectral:.12}, empirical - ln 8 = {gap:.2e}"),
        report: json!({"spectral": spectral, "empirical": empirical.value, "samples": empirical.samples}),
    }
}

fn c3_horospheres(seed: u64) -> Outcome {
    let par = parabola();
    let spec = HorosphereSpec::new(&par, Hyperplane::at_infinity(2), ProjPoint::from_slice(&[0.0, 1.0, 0.0]).unwrap()).unwrap();
    let mut parabolic_dev: f64 = 0.0;
    let mut parabolic_ok = true;
    for t in [0.3, -1.1, 2.5] {
        let r = horosphere_invariance_check(&par, &spec, &shear(t), 200, seed).unwrap();
        parabolic_dev = parabolic_dev.max(r.max_leaf_deviation);
        parabolic_ok &= r.leaf_preserving;
    }
    parabolic_ok &= parabolic_dev < 1e-6;

    let tri = triangle();
    let g = ProjMap::diagonal(&[2.0, 2.0, 0.25]).unwrap();
    let spec = HorosphereSpec::new(&tri, Hyperplane::from_slice(&[1.0, 1.0, 0.0]).unwrap(), ProjPoint::from_slice(&[0.0, 0.0, 1.0]).unwrap())
        .unwrap();
    let hyp = horosphere_invariance_check(&tri, &spec, &g, 200, seed).unwrap();
    let permutes = hyp.foliation_preserving
        && !hyp.leaf_preserving
        && hyp.leaves.iter().all(|l| (l.image_s_min - l.s / 8.0).abs() < 1e-6 * (1.0 + l.s));

    // Nested figure: leaves through translates of (1, 1) toward the vertex.
    let leaves = nested_horospheres(&tri, &spec, &v(&[1.0, 1.0]), 5, 0.5, 120, seed).unwrap();
    let mut nested = leaves.windows(2).all(|w| w[0].s < w[1].s);
    for h in &leaves {
        for y in &h.chart_points {
            let s = spec.leaf_parameter_chart(y).unwrap();
            nested &= (s - h.s).abs() < 1e-6 * (1.0 + h.s);
        }
    }
    let chart = tri.bounded_chart().unwrap();
    let colors = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e"];
    let layers: Vec<Layer> = leaves
        .iter()
        .enumerate()
        .map(|(k, h)| Layer {
            label: format!("s = {}", h.s),
            color: colors[k % colors.len()].into(),
            radius: 1.5,
            points: h.points.iter().filter_map(|p| chart.apply_affine(p)).collect(),
        })
        .collect();
    let svg = svg_dots(&layers, [-0.05, 1.05, -0.05, 1.05], 500);
    nested &= svg.matches("<g ").count() == leaves.len();
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("horospheres.svg");
    let _ = std::fs::write(&path, &svg);

    Outcome {
        passed: parabolic_ok && permutes && nested,
        detail: format!(
            "parabolic leaf deviation {parabolic_dev:.2e}, hyperbolic permutes leaves: {permutes}, nested figure: {nested} ({})",
            path.display()
        ),
        report: json!({
            "parabolic_max_leaf_deviation": parabolic_dev,
            "hyperbolic": hyp,
            "leaf_parameters": leaves.iter().map(|h| h.s).collect::<Vec<_>>(),
            "svg_bytes": svg.len(),
        }),
    }
}

fn c4_singular_limits(seed: u64) -> Outcome {
    let tri = triangle();
    let seq: Vec<ProjMap> = (1..=40).map(|i| ProjMap::diagonal(&[2f64.powi(i), 1.0, 2f64.powi(-i)]).unwrap()).collect();
    let lim = limit_of_sequence(&seq).unwrap().limit;

    // K(g): no point of the kernel lies in the domain.
    let basis = lim.kernel_basis();
    let mut kernel_hits = 0;
    for k in 0..360 {
        let a = k as f64 * std::f64::consts::PI / 180.0;
        let h = match basis {
            [b] => b.clone(),
            [b1, b2] => b1 * a.cos() + b2 * a.sin(),
            _ => unreachable!("kernel of dimension {}", basis.len()),
        };
        if h[2].abs() > 1e-12 && tri.contains(&v(&[h[0] / h[2], h[1] / h[2]])) {
            kernel_hits += 1;
        }
    }

    // R(g) is the vertex [1:0:0], an extreme point of the triangle.
    let ranges = lim.range_points();
    let r = &ranges[0];
    let chart = tri.bounded_chart().unwrap();
    let bounded = tri.in_bounded_chart().unwrap();
    let r_chart = chart.apply(r).unwrap().to_affine().unwrap();
    let on_boundary = bounded.check_boundary(&r_chart).is_ok();
    let face = face_of(&bounded, &r_chart).unwrap();
    let support = supporting_hyperplane(&bounded, &r_chart).unwrap();
    let supports = ranges.len() == 1 && on_boundary && face.dim == 0 && is_extreme(&bounded, &r_chart).unwrap();

    // Orbit images converge to that face.
    let mut rng = substream(seed, 400);
    let samples = tri.sample_interior(&mut rng, 50, 10.0);
    let last = chart.compose(seq.last().unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for x in &samples {
        let y = last.apply(&ProjPoint::from_affine(x)).unwrap().to_affine().unwrap();
        worst = worst.max((&y - &r_chart).norm());
    }
    let bounded_samples = samples.iter().filter_map(|x| chart.apply_affine(x)).collect::<Vec<_>>();
    let support_ok = bounded_samples.iter().all(|y| support.eval(y) >= 0.0);

    Outcome {
        passed: basis.len() == 2 && kernel_hits == 0 && supports && support_ok && worst < 1e-6,
        detail: format!(
            "rank {}, kernel hits {kernel_hits}, R extreme: {supports}, supporting line: {support_ok}, orbit distance to R {worst:.2e}",
            lim.rank()
        ),
        report: json!({
            "rank": lim.rank(),
            "kernel_hits": kernel_hits,
            "range_point": r.to_vec(),
            "face_dim": face.dim,
            "worst_orbit_distance": worst,
        }),
    }
}

fn c5_cones(seed: u64) -> Outcome {
    let entries = non_placeholder();
    let mut rows = Vec::new();
    let mut ok = true;
    let mut worst: f64 = 1.0;
    for e in &entries {
        let ac = asymptotic_cone(&e.domain);
        let agreement = ac_grid_agreement(e, &ac, 2000, seed);
        let dim_ok = ac.intrinsic_dim == e.known_ac.dim;
        ok &= dim_ok && agreement >= 0.999;
        worst = worst.min(agreement);
        rows.push(json!({"id": e.id, "dim": ac.intrinsic_dim, "agreement": agreement}));
    }
    // (xi): AC = {u1 = 0, u2 u3 >= u4^2, u2, u3 >= 0}, written out directly.
    let xi = catalog::get("xi").unwrap();
    let ac = asymptotic_cone(&xi.domain);
    let grid = xi.known_ac.grid(xi.dim, 2000, &mut substream(seed, 500));
    let explicit = |u: &DVector<f64>| {
        let n = u.norm();
        let w = u / n;
        w[0].abs() < 1e-9 && w[1] >= -1e-9 && w[2] >= -1e-9 && w[1] * w[2] - w[3] * w[3] >= -1e-9
    };
    let xi_agreement = grid_agreement(|u| ac.contains(u), explicit, &grid);
    ok &= ac.intrinsic_dim == 3 && xi_agreement >= 0.999;
    Outcome {
        passed: ok && entries.len() == 15,
        detail: format!("{} entries, worst agreement {worst:.4}, (xi) explicit agreement {xi_agreement:.4}", entries.len()),
        report: json!({"entries": rows, "xi_explicit_agreement": xi_agreement}),
    }
}

fn c6_extreme_points(seed: u64) -> Outcome {
    let mut rows = Vec::new();
    let mut disagreements = 0;
    let mut ok = true;
    for id in ["ii", "iii", "iv", "v", "xi", "xiii"] {
        let e = catalog::get(id).unwrap();
        let r = extreme_equals_conepoints(&e.domain, 500, seed).unwrap();
        disagreements += r.disagreements.len();
        ok &= r.passed() && r.boundary_samples + r.apex_samples == 500 && r.skipped < 50;
        rows.push(json!({"id": id, "report": r}));
    }
    Outcome {
        passed: ok,
        detail: format!("6 entries x 500 boundary samples, {disagreements} disagreements"),
        report: Value::Array(rows),
    }
}

fn c7_closed_form(seed: u64) -> Outcome {
    let s = verify_prop76(100, seed).unwrap();
    let residual = s
        .max_identity_residual
        .max(s.max_shape_residual)
        .max(s.max_group_law_residual)
        .max(s.max_linearity_residual);
    let rel = s.max_linear_rel_error.max(s.max_translation_rel_error);
    Outcome {
        passed: s.passed && s.closed_form_failures == 0 && s.isotropy_failures == 0 && rel < 1e-10 && residual < 1e-10,
        detail: format!("{} draws, closed-form rel error {rel:.2e}, identity residual {residual:.2e}", s.trials),
        report: serde_json::to_value(&s).unwrap(),
    }
}

fn c8_limit_sets(_seed: u64) -> Outcome {
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for e in catalog::list() {
        if !(e.flags.cone || e.flags.homogeneous) {
            continue;
        }
        let gens = GeneratorSet::for_entry(&e);
        let est = limit_set_estimate(&e.domain, &gens, e.domain.basepoint(), 3000).unwrap();
        let nonempty = !est.is_empty();
        let mut cone_distance = None;
        if let Some(c) = &e.cone_point {
            let target = est.chart_coords(c).unwrap();
            let dist = est
                .clusters
                .iter()
                .flat_map(|cl| cl.members().iter().map(|m| (m - &target).norm()))
                .fold(f64::INFINITY, f64::min);
            if dist > LIMIT_EPSILON {
                failed.push(e.id);
            }
            cone_distance = Some(dist);
        }
        if e.flags.homogeneous && !nonempty {
            failed.push(e.id);
        }
        rows.push(json!({"id": e.id, "clusters": est.clusters.len(), "directions": est.directions.len(), "cone_point_distance": cone_distance}));
    }
    let a = 0.7f64;
    let rot = ProjMap::from_rows(&[vec![a.cos(), -a.sin(), 0.0], vec![a.sin(), a.cos(), 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
    let disk = ConvexDomain::unit_disk();
    let control = limit_set_estimate(&disk, &GeneratorSet::from_maps(vec![rot]).unwrap(), &v(&[0.3, 0.0]), 3000).unwrap();
    Outcome {
        passed: failed.is_empty() && control.is_empty(),
        detail: format!("{} entries checked, failed {failed:?}, rotation control empty: {}", rows.len(), control.is_empty()),
        report: json!({"entries": rows, "control_clusters": control.clusters.len()}),
    }
}

fn c9_syndetic(seed: u64) -> Outcome {
    let mut rows = Vec::new();
    let mut worst: f64 = 1.0;
    for e in non_placeholder() {
        let r = syndetic_probe(&e, 5.0, 40, 60, seed);
        worst = worst.min(r.coverage);
        rows.push(json!({"id": e.id, "report": r}));
    }
    // A square has a finite automorphism group, so it is not quasi-homogeneous.
    let square = ConvexDomain::polytope(
        &[(v(&[1.0, 0.0]), 1.0), (v(&[-1.0, 0.0]), 1.0), (v(&[0.0, 1.0]), 1.0), (v(&[0.0, -1.0]), 1.0)],
        Some(v(&[0.0, 0.0])),
    )
    .unwrap();
    let control = syndetic_probe_with(&square, &[], 5.0, 40, 60, seed);
    Outcome {
        passed: worst == 1.0 && rows.len() == 15 && control.coverage < 1.0,
        detail: format!("worst coverage {worst}, square control coverage {:.3}", control.coverage),
        report: json!({"entries": rows, "control": control}),
    }
}

const CRITERIA: [(&str, Criterion, u64); 9] = [
    ("1 Hilbert metric", c1_hilbert, 10),
    ("2 translation length", c2_translation, 30),
    ("3 horosphere invariance", c3_horospheres, 30),
    ("4 singular limits", c4_singular_limits, 10),
    ("5 asymptotic cones", c5_cones, 120),
    ("6 extreme points = cone points", c6_extreme_points, 120),
    ("7 closed form and isotropy", c7_closed_form, 5),
    ("8 limit-set witnesses", c8_limit_sets, 60),
    ("9 syndetic probes", c9_syndetic, 120),
];

fn run_suite(seed: u64, print: bool, filter: &[String]) -> (bool, Vec<String>) {
    let mut all = true;
    let mut reports = Vec::new();
    for (name, f, limit) in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|k| name.split(' ').next() == Some(k.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = f(seed);
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let passed = out.passed && in_time;
        all &= passed;
        if print {
            let status = if passed { "PASS" } else { "FAIL" };
            println!("[{status}] {name}: {} [{:.1}s, limit {limit}s]", out.detail, elapsed.as_secs_f64());
        }
        reports.push(to_json(&json!({"criterion": name, "passed": out.passed, "report": out.report})).unwrap());
    }
    (all, reports)
}

/// Positional arguments select criteria by number; flags from the test
/// runner are ignored.
fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let (first_ok, first) = run_suite(SEED, true, &filter);
    let (_, second) = run_suite(SEED, false, &filter);
    let differing: Vec<usize> = (0..first.len()).filter(|&i| first[i] != second[i]).map(|i| i + 1).collect();
    let bytes: usize = first.iter().map(String::len).sum();
    let deterministic = differing.is_empty();
    let status = if deterministic { "PASS" } else { "FAIL" };
    println!("[{status}] 10 determinism: {bytes} report bytes, differing criteria {differing:?}");
    if !(first_ok && deterministic) {
        std::process::exit(1);
    }
}
