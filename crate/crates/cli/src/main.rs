//! `cvxproj`: command-line front end for convex-proj.
//!
//! Exit status: 0 success, 1 a check failed (its report is still written),
//! 2 invalid input.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use serde_json::json;

use convex_proj::asymptotic::asymptotic_cone;
use convex_proj::catalog::{self, syndetic_probe, transitivity_probe};
use convex_proj::domain::ConvexDomain;
use convex_proj::dynamics::{classify_isometry, horosphere_invariance_check, nested_horospheres, HorosphereSpec, IsometryKind};
use convex_proj::hilbert::{chord, hilbert_distance, translation_length_empirical, translation_length_spectral};
use convex_proj::orbit::{hull_closure_check, limit_set_estimate_with, orbit, LIMIT_EPSILON};
use convex_proj::output::{bounding_window, fmt_sig, svg_dots, to_csv, to_json, Layer};
use convex_proj::projective::{Hyperplane, ProjPoint};
use convex_proj::formats::{parse_covector, parse_domain, parse_generators, parse_matrix, parse_point};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Core(#[from] convex_proj::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "cvxproj", version, about = "Hilbert geometry and quasi-homogeneous convex domains")]
struct Cli {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hilbert distance between two interior points.
    Dist { domain: String, p1: String, p2: String },
    /// Isometry type and translation length of a projective map.
    Classify {
        domain: String,
        matrix: String,
        /// Samples for the empirical translation length (0 skips it).
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Limit set estimate of a generator set.
    Limits {
        domain: String,
        gens: String,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        /// Starting point (defaults to the basepoint).
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = LIMIT_EPSILON)]
        epsilon: f64,
        /// Interior samples for the hull check (0 skips it).
        #[arg(long, default_value_t = 0)]
        hull: usize,
    },
    /// Asymptotic cone: dimension, span and extreme rays.
    Cone {
        domain: String,
    },
    /// Horospheres centered on a supporting hyperplane and boundary point.
    Horosphere {
        domain: String,
        /// Covector of the supporting hyperplane.
        h: String,
        /// Boundary point in homogeneous coordinates.
        p: String,
        /// Interior point the first horosphere passes through.
        x: String,
        /// Emit SVG (planar domains only).
        #[arg(long)]
        svg: bool,
        #[arg(long, default_value_t = 1)]
        leaves: usize,
        /// Chart displacement between consecutive leaves.
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Report the action of this map on the horospheres instead.
        #[arg(long)]
        check: Option<String>,
    },
    /// Orbit points of reduced words up to a length.
    Orbit {
        domain: String,
        gens: String,
        x0: String,
        #[arg(long)]
        len: usize,
    },
    /// The catalog of quasi-homogeneous domains.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Algebraic identities.
    Verify {
        #[command(subcommand)]
        what: VerifyTarget,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    /// Runs the checks of one entry, or of every entry with `all`.
    Check {
        id: String,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Also run the syndetic and transitivity probes.
        #[arg(long)]
        probes: bool,
    },
    /// Candidate catalog types of a domain.
    Classify { domain: String },
}

#[derive(Subcommand, Debug)]
enum VerifyTarget {
    /// Closed form of f^n and the isotropy relation for type (xi).
    Prop76 {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

/// Inline JSON or the contents of a file.
fn read_arg(arg: &str) -> CliResult<String> {
    let t = arg.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|source| CliError::Io { path: arg.to_string(), source })
}

fn domain(arg: &str) -> CliResult<ConvexDomain> {
    Ok(parse_domain(&read_arg(arg)?)?)
}

fn point(arg: &str, dim: usize) -> CliResult<DVector<f64>> {
    Ok(parse_point(&read_arg(arg)?, dim)?)
}

fn vec_of(x: &DVector<f64>) -> Vec<f64> {
    x.as_slice().to_vec()
}

struct Output {
    text: String,
    passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, passed: true }
    }
}

fn run(cli: &Cli) -> CliResult<Output> {
    let seed = cli.seed;
    match &cli.command {
        Command::Dist { domain: dom, p1, p2 } => {
            let d = domain(dom)?;
            let (a, b) = (point(p1, d.dim())?, point(p2, d.dim())?);
            let dist = hilbert_distance(&d, &a, &b)?;
            let endpoints = if a == b {
                json!(null)
            } else {
                let c = chord(&d, &a, &b)?;
                json!({ "s1": c.s1.as_ref().map(vec_of), "s2": c.s2.as_ref().map(vec_of) })
            };
            Ok(Output::ok(to_json(&json!({ "distance": dist, "chord": endpoints }))?))
        }
        Command::Classify { domain: dom, matrix, samples } => {
            let d = domain(dom)?;
            let g = parse_matrix(&read_arg(matrix)?)?;
            let class = classify_isometry(&d, &g)?;
            let spectral = translation_length_spectral(&g)?;
            let kind = match class.kind {
                IsometryKind::Elliptic => "elliptic",
                IsometryKind::Parabolic => "parabolic",
                IsometryKind::Hyperbolic => "hyperbolic",
            };
            let summary = match class.kind {
                IsometryKind::Hyperbolic => format!("hyperbolic, translation length {}", fmt_sig(spectral)),
                _ => kind.to_string(),
            };
            let empirical = if *samples > 0 {
                let e = translation_length_empirical(&d, &g, *samples, seed)?;
                json!({ "value": e.value, "argmin": vec_of(&e.argmin), "samples": e.samples })
            } else {
                json!(null)
            };
            let report = json!({
                "class": class,
                "summary": summary,
                "translation_length": class.translation_length(),
                "spectral_length": spectral,
                "empirical_length": empirical,
            });
            Ok(Output::ok(to_json(&report)?))
        }
        Command::Limits { domain: dom, gens, budget, x0, epsilon, hull } => {
            let d = domain(dom)?;
            let g = parse_generators(&read_arg(gens)?)?;
            let x = match x0 {
                Some(p) => point(p, d.dim())?,
                None => d.basepoint().clone(),
            };
            let est = limit_set_estimate_with(&d, &g, &x, *budget, *epsilon)?;
            let hull_report = if *hull > 0 && !est.is_empty() {
                Some(hull_closure_check(&d, &est, *hull, seed)?)
            } else {
                None
            };
            let report = json!({ "estimate": est, "hull": hull_report, "labels": g.labels() });
            Ok(Output::ok(to_json(&report)?))
        }
        Command::Cone { domain: dom } => {
            let d = domain(dom)?;
            Ok(Output::ok(to_json(&asymptotic_cone(&d).summary())?))
        }
        Command::Horosphere { domain: dom, h, p, x, svg, leaves, spacing, samples, check } => {
            let d = domain(dom)?;
            let n = d.dim();
            let hp = Hyperplane::from_slice(&parse_covector(&read_arg(h)?, n)?)?;
            let pp: Vec<f64> = serde_json::from_str(&read_arg(p)?)?;
            if pp.len() != n + 1 {
                return Err(CliError::Usage(format!("boundary point needs {} homogeneous coordinates", n + 1)));
            }
            let pp = ProjPoint::from_slice(&pp)?;
            let spec = HorosphereSpec::new(&d, hp, pp)?;
            if let Some(m) = check {
                let g = parse_matrix(&read_arg(m)?)?;
                let r = horosphere_invariance_check(&d, &spec, &g, *samples, seed)?;
                return Ok(Output::ok(to_json(&r)?));
            }
            let xp = point(x, n)?;
            let hs = nested_horospheres(&d, &spec, &xp, *leaves, *spacing, *samples, seed)?;
            if *svg && n == 2 {
                return Ok(Output::ok(horosphere_svg(&d, &xp, &hs, seed)));
            }
            let mut header = vec!["leaf".to_string(), "s".to_string()];
            header.extend((1..=n).map(|i| format!("x{i}")));
            header.extend((1..=n).map(|i| format!("c{i}")));
            let mut rows = Vec::new();
            for (k, leaf) in hs.iter().enumerate() {
                let inv = spec.chart().inverse()?;
                for c in &leaf.chart_points {
                    let mut row = vec![Some(k.to_string()), Some(fmt_sig(leaf.s))];
                    match inv.apply_affine(c) {
                        Some(xo) => row.extend(xo.iter().map(|v| Some(fmt_sig(*v)))),
                        None => row.extend((0..n).map(|_| None)),
                    }
                    row.extend(c.iter().map(|v| Some(fmt_sig(*v))));
                    rows.push(row);
                }
            }
            let mut text = String::new();
            if *svg {
                text.push_str(&format!(
                    "# SVG needs a planar domain; columns c1..c{n} are the chart sending H to infinity\n"
                ));
            }
            text.push_str(&to_csv(&header, &rows));
            Ok(Output::ok(text))
        }
        Command::Orbit { domain: dom, gens, x0, len } => {
            let d = domain(dom)?;
            let g = parse_generators(&read_arg(gens)?)?;
            let x = point(x0, d.dim())?;
            let o = orbit(&d, &g, &x, *len)?;
            let n = d.dim();
            let mut header = vec!["word".to_string(), "in_domain".to_string()];
            header.extend((1..=n).map(|i| format!("x{i}")));
            header.extend((1..=n + 1).map(|i| format!("h{i}")));
            let rows: Vec<Vec<Option<String>>> = o
                .points
                .iter()
                .map(|p| {
                    let mut row = vec![Some(p.word.join(" ")), Some(p.in_domain.to_string())];
                    match &p.affine {
                        Some(a) => row.extend(a.iter().map(|v| Some(fmt_sig(*v)))),
                        None => row.extend((0..n).map(|_| None)),
                    }
                    row.extend(p.homogeneous.iter().map(|v| Some(fmt_sig(*v))));
                    row
                })
                .collect();
            Ok(Output { text: to_csv(&header, &rows), passed: o.violations.is_empty() })
        }
        Command::Catalog { action } => catalog_cmd(action, seed),
        Command::Verify { what: VerifyTarget::Prop76 { trials } } => {
            let s = catalog::verify_prop76(*trials, seed)?;
            Ok(Output { passed: s.passed, text: to_json(&s)? })
        }
    }
}

fn catalog_cmd(action: &CatalogAction, seed: u64) -> CliResult<Output> {
    match action {
        CatalogAction::List => {
            let list: Vec<_> = catalog::list().iter().map(|e| e.summary()).collect();
            Ok(Output::ok(to_json(&list)?))
        }
        CatalogAction::Check { id, budget, probes } => {
            let ids: Vec<&str> = if id == "all" { catalog::IDS.to_vec() } else { vec![catalog::normalize_id(id)?] };
            let mut reports = Vec::new();
            let mut passed = true;
            let checks = if id == "all" {
                catalog::check_all(*budget, seed)
            } else {
                vec![catalog::check_entry(&catalog::get(ids[0])?, *budget, seed)]
            };
            for (id, report) in ids.iter().zip(checks) {
                passed &= report.passed;
                let entry = catalog::get(id)?;
                let mut value = serde_json::to_value(&report)?;
                if *probes && !entry.flags.placeholder {
                    let syn = syndetic_probe(&entry, 5.0, 40, 100, seed);
                    passed &= syn.coverage == 1.0;
                    value["syndetic"] = serde_json::to_value(&syn)?;
                    if entry.flags.homogeneous {
                        let tr = transitivity_probe(&entry, 200, 1e-2, seed);
                        passed &= tr.reached == tr.targets;
                        value["transitivity"] = serde_json::to_value(&tr)?;
                    }
                }
                reports.push(value);
            }
            let text = if reports.len() == 1 { to_json(&reports[0])? } else { to_json(&reports)? };
            Ok(Output { text, passed })
        }
        CatalogAction::Classify { domain: dom } => {
            let d = domain(dom)?;
            Ok(Output::ok(to_json(&catalog::classify_against_catalog(&d, seed)?)?))
        }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn horosphere_svg(d: &ConvexDomain, x: &DVector<f64>, leaves: &[convex_proj::dynamics::Horosphere], seed: u64) -> String {
    let mut rng = convex_proj::sampling::seeded(seed);
    let reach = 10.0 * (1.0 + x.norm());
    let boundary: Vec<DVector<f64>> = d.sample_boundary(&mut rng, 600).into_iter().filter(|b| b.norm() < reach).collect();
    let mut frame: Vec<DVector<f64>> = boundary.clone();
    frame.push(x.clone());
    for h in leaves {
        frame.extend(h.points.iter().filter(|p| p.norm() < reach).cloned());
    }
    let window = bounding_window(&frame);
    let mut layers = vec![Layer { label: "boundary".into(), color: "#888888".into(), radius: 1.0, points: boundary }];
    for (k, h) in leaves.iter().enumerate() {
        layers.push(Layer {
            label: format!("leaf {k} (s = {})", fmt_sig(h.s)),
            color: PALETTE[k % PALETTE.len()].into(),
            radius: 1.5,
            points: h.points.clone(),
        });
    }
    svg_dots(&layers, window, 600)
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "stdout".into(), source })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|o| write_output(cli.output.as_deref(), &o.text).map(|_| o.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("cvxproj: {e}");
            ExitCode::from(2)
        }
    }
}
