//! Isometry classification, horosphere foliations, one-parameter subgroups
//! from sequences, and osculating ellipsoids.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{check_preserves, supporting_hyperplane, ConvexDomain};
use crate::error::{Error, Result};
use crate::linalg::{cluster_eigenvalues, eigenvalues, expm, frobenius, logm, null_space, orthonormal_complement};
use crate::projective::{Hyperplane, ProjMap, ProjPoint, CAUCHY_TOL};
use crate::sampling::{seeded, substream};

/// Relative tolerance on eigenvalue moduli for the parabolic verdict.
pub const PARABOLIC_TOL: f64 = 1e-8;
/// Eigenvalues closer than this (relative) are averaged before comparing moduli.
pub const EIGEN_CLUSTER_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IsometryKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    /// Largest eigenvalue modulus after dividing by the geometric mean.
    pub lambda_max: f64,
    /// Smallest eigenvalue modulus after dividing by the geometric mean.
    pub lambda_min: f64,
    pub fixed_interior_point: Option<Vec<f64>>,
}

impl IsometryClass {
    pub fn translation_length(&self) -> f64 {
        match self.kind {
            IsometryKind::Hyperbolic => (self.lambda_max / self.lambda_min).ln(),
            _ => 0.0,
        }
    }
}

/// Normalized eigenvalue moduli, with near-equal eigenvalues averaged first.
pub fn normalized_moduli(g: &ProjMap) -> Vec<f64> {
    let m = g.matrix();
    let vals = eigenvalues(m);
    let scale = vals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let clusters = cluster_eigenvalues(&vals, EIGEN_CLUSTER_RADIUS * scale);
    let mut moduli = Vec::with_capacity(vals.len());
    for (mean, count) in clusters {
        for _ in 0..count {
            moduli.push(mean.norm());
        }
    }
    let log_mean = moduli.iter().map(|x| x.ln()).sum::<f64>() / moduli.len() as f64;
    let gm = log_mean.exp();
    moduli.iter().map(|x| x / gm).collect()
}

fn interior_fixed_point(d: &ConvexDomain, g: &ProjMap) -> Option<DVector<f64>> {
    let m = g.matrix();
    let n1 = m.nrows();
    let scale = frobenius(m);
    let mut bh = DVector::zeros(n1);
    bh.rows_mut(0, n1 - 1).copy_from(d.basepoint());
    bh[n1 - 1] = 1.0;
    let vals = eigenvalues(m);
    for (lambda, _) in cluster_eigenvalues(&vals, 1e-9 * scale) {
        if lambda.im.abs() > 1e-9 * scale {
            continue;
        }
        let shifted = m - DMatrix::identity(n1, n1) * lambda.re;
        let space = null_space(&shifted, 1e-8);
        if space.is_empty() {
            continue;
        }
        let mut candidates: Vec<DVector<f64>> = Vec::new();
        let mut proj = DVector::zeros(n1);
        for e in &space {
            proj += e * e.dot(&bh);
        }
        candidates.push(proj);
        let mut sum = DVector::zeros(n1);
        for e in &space {
            candidates.push(e.clone());
            sum += e;
        }
        candidates.push(sum);
        for c in candidates {
            let w = c[n1 - 1];
            if w.abs() < 1e-12 * c.norm().max(1e-300) {
                continue;
            }
            let x = c.rows(0, n1 - 1) / w;
            if d.contains(&x) {
                return Some(x);
            }
        }
    }
    None
}

/// Elliptic if a real eigenvector lies in `Ω`; otherwise parabolic or
/// hyperbolic according to the normalized eigenvalue moduli.
pub fn classify_isometry(d: &ConvexDomain, g: &ProjMap) -> Result<IsometryClass> {
    if !g.is_invertible() {
        return Err(Error::Singular);
    }
    let mut rng = seeded(0x150);
    let samples = d.sample_interior(&mut rng, 100, 1e3);
    check_preserves(d, g, &samples)?;
    let moduli = normalized_moduli(g);
    let lambda_max = moduli.iter().cloned().fold(0.0, f64::max);
    let lambda_min = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
    if let Some(x) = interior_fixed_point(d, g) {
        return Ok(IsometryClass {
            kind: IsometryKind::Elliptic,
            lambda_max,
            lambda_min,
            fixed_interior_point: Some(x.iter().copied().collect()),
        });
    }
    let kind = if lambda_max / lambda_min <= 1.0 + PARABOLIC_TOL {
        IsometryKind::Parabolic
    } else {
        IsometryKind::Hyperbolic
    };
    Ok(IsometryClass { kind, lambda_max, lambda_min, fixed_interior_point: None })
}

/// Supporting hyperplane `H` with a boundary point `p ∈ H`, and the chart
/// `RP^n \ H` in which `p` becomes the direction `v`.
#[derive(Debug, Clone)]
pub struct HorosphereSpec {
    pub h: Hyperplane,
    pub p: ProjPoint,
    pub v: DVector<f64>,
    /// Homogeneous covector of `H`, positive on `Ω`.
    covector: DVector<f64>,
    /// Chart change sending `H` to infinity.
    chart: ProjMap,
    /// `Ω` seen in the chart.
    image: ConvexDomain,
}

impl HorosphereSpec {
    pub fn new(d: &ConvexDomain, h: Hyperplane, p: ProjPoint) -> Result<Self> {
        let n = d.dim();
        if h.covector().len() != n + 1 || p.coords().len() != n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, got: h.covector().len() });
        }
        if h.eval(&p).abs() > 1e-9 {
            return Err(Error::InvalidInput("p does not lie on H".into()));
        }
        let mut rng = seeded(0x4040);
        let samples = d.sample_interior(&mut rng, 200, 1e3);
        let mut c = h.covector().clone();
        let value = |c: &DVector<f64>, x: &DVector<f64>| c.rows(0, n).dot(x) + c[n];
        if value(&c, d.basepoint()) < 0.0 {
            c = -c;
        }
        if samples.iter().any(|x| value(&c, x) <= 0.0) {
            return Err(Error::InvalidInput("H does not support the domain".into()));
        }
        if let Some(x) = p.to_affine() {
            d.check_boundary(&x)?;
        }
        let rows = orthonormal_complement(&[c.clone()], n + 1);
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for (i, r) in rows.iter().enumerate() {
            m.set_row(i, &r.transpose());
        }
        m.set_row(n, &c.transpose());
        // The canonical sign of a projective map may flip the last row; keep
        // the representative whose last row is the oriented covector.
        let chart = ProjMap::normalize(m)?;
        let image = d.transformed(&chart)?;
        let cp = chart.matrix() * p.coords();
        let mut v: DVector<f64> = cp.rows(0, n).into_owned();
        let norm = v.norm();
        if norm < 1e-12 {
            return Err(Error::Degenerate("p is not sent to infinity".into()));
        }
        v /= norm;
        if image.exit_time(image.basepoint(), &v).is_some() {
            v = -v;
            if image.exit_time(image.basepoint(), &v).is_some() {
                return Err(Error::InvalidInput("p is not a point at infinity of the chart".into()));
            }
        }
        Ok(Self { h, p, v, covector: c, chart, image })
    }

    pub fn chart(&self) -> &ProjMap {
        &self.chart
    }

    /// The domain in the chart `RP^n \ H`.
    pub fn chart_domain(&self) -> &ConvexDomain {
        &self.image
    }

    pub fn oriented_covector(&self) -> &DVector<f64> {
        &self.covector
    }

    pub fn to_chart(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        self.chart.apply_affine(x)
    }

    pub fn from_chart(&self, y: &DVector<f64>) -> Option<DVector<f64>> {
        self.chart.inverse().ok()?.apply_affine(y)
    }

    /// Leaf parameter of a chart point: its displacement along `v` from `S_0`.
    pub fn leaf_parameter_chart(&self, y: &DVector<f64>) -> Result<f64> {
        if !self.image.contains(y) {
            return Err(Error::NotInterior);
        }
        self.image
            .exit_time_precise(y, &(-&self.v))
            .ok_or_else(|| Error::Degenerate("backward ray does not meet the boundary".into()))
    }

    pub fn leaf_parameter(&self, x: &DVector<f64>) -> Result<f64> {
        let y = self.to_chart(x).ok_or(Error::NotInterior)?;
        self.leaf_parameter_chart(&y)
    }

    /// Sample of `S_0`: boundary points reached backward along `v` from
    /// interior samples, so none lies on a boundary segment ending at `p`.
    pub fn sample_s0(&self, count: usize, seed: u64) -> Vec<DVector<f64>> {
        let mut rng = seeded(seed);
        let interior = self.image.sample_interior(&mut rng, count, 1e2);
        interior
            .into_iter()
            .filter_map(|z| {
                let s = self.image.exit_time_precise(&z, &(-&self.v))?;
                let q = &z - &self.v * s;
                if self.on_deleted_segment(&q) {
                    None
                } else {
                    Some(q)
                }
            })
            .collect()
    }

    fn on_deleted_segment(&self, q: &DVector<f64>) -> bool {
        let step = 1e-6 * (1.0 + q.norm());
        !self.image.contains(&(q + &self.v * step)) && !self.image.contains(&(q + &self.v * (10.0 * step)))
    }
}

/// A horosphere: the translate `S_0 + s v` in the chart.
#[derive(Debug, Clone)]
pub struct Horosphere {
    pub s: f64,
    /// Points in the chart `RP^n \ H`.
    pub chart_points: Vec<DVector<f64>>,
    /// The same points in the original affine chart (points sent to infinity are dropped).
    pub points: Vec<DVector<f64>>,
}

/// Horosphere through the interior point `x`.
pub fn horosphere_through(d: &ConvexDomain, spec: &HorosphereSpec, x: &DVector<f64>, samples: usize, seed: u64) -> Result<Horosphere> {
    if !d.contains(x) {
        return Err(Error::NotInterior);
    }
    let y = spec.to_chart(x).ok_or(Error::NotInterior)?;
    let s = spec.leaf_parameter_chart(&y)?;
    let q = &y - &spec.v * s;
    if spec.on_deleted_segment(&q) {
        return Err(Error::DeletedSegmentHit);
    }
    let mut chart_points = vec![y.clone()];
    chart_points.extend(spec.sample_s0(samples, seed).into_iter().map(|q| q + &spec.v * s));
    let inv = spec.chart.inverse()?;
    let points = chart_points.iter().filter_map(|c| inv.apply_affine(c)).collect();
    Ok(Horosphere { s, chart_points, points })
}

/// Horospheres through `x` and through the translates `y + k·spacing·v`,
/// `k = 1..count`, of its chart image `y`.
pub fn nested_horospheres(
    d: &ConvexDomain,
    spec: &HorosphereSpec,
    x: &DVector<f64>,
    count: usize,
    spacing: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<Horosphere>> {
    let y = spec.to_chart(x).ok_or(Error::NotInterior)?;
    (0..count.max(1))
        .map(|k| {
            let yk = &y + &spec.v * (k as f64 * spacing);
            let xk = spec.from_chart(&yk).ok_or(Error::NotInterior)?;
            horosphere_through(d, spec, &xk, samples, seed)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LeafShift {
    pub s: f64,
    pub image_s_min: f64,
    pub image_s_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HorosphereInvariance {
    pub kind: Option<IsometryKind>,
    pub leaf_preserving: bool,
    pub foliation_preserving: bool,
    /// Largest `|s(g y) - s(y)|` over sampled horosphere points.
    pub max_leaf_deviation: f64,
    /// Largest spread of image leaf parameters over a single leaf.
    pub max_image_spread: f64,
    pub leaves: Vec<LeafShift>,
}

/// Tolerance for leaf comparisons, relative to the leaf parameter.
pub const LEAF_TOL: f64 = 1e-6;

/// Checks that `g` (fixing `p` and `H`) maps horospheres to horospheres.
pub fn horosphere_invariance_check(d: &ConvexDomain, spec: &HorosphereSpec, g: &ProjMap, samples: usize, seed: u64) -> Result<HorosphereInvariance> {
    if !g.fixes_point(&spec.p, 1e-9) {
        return Err(Error::NotFixed("g does not fix p".into()));
    }
    if !g.preserves_hyperplane(&spec.h, 1e-9) {
        return Err(Error::NotFixed("g does not preserve H".into()));
    }
    let kind = classify_isometry(d, g).ok().map(|c| c.kind);
    let gc = spec.chart.compose(g)?.compose(&spec.chart.inverse()?)?;
    let s0 = spec.sample_s0(samples, seed);
    let leaf_values = [0.25, 0.5, 1.0, 2.0, 4.0];
    let leaves: Vec<LeafShift> = leaf_values
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let _ = substream(seed, i as u64);
            for q in &s0 {
                let y = q + &spec.v * s;
                if !spec.image.contains(&y) {
                    continue;
                }
                let Some(gy) = gc.apply_affine(&y) else { continue };
                if let Ok(t) = spec.leaf_parameter_chart(&gy) {
                    lo = lo.min(t);
                    hi = hi.max(t);
                }
            }
            LeafShift { s, image_s_min: lo, image_s_max: hi }
        })
        .collect();
    let mut max_dev: f64 = 0.0;
    let mut max_spread: f64 = 0.0;
    let mut leaf_ok = true;
    let mut fol_ok = true;
    for l in &leaves {
        if !l.image_s_min.is_finite() {
            return Err(Error::Degenerate("no horosphere samples".into()));
        }
        let dev = (l.image_s_min - l.s).abs().max((l.image_s_max - l.s).abs());
        let spread = l.image_s_max - l.image_s_min;
        max_dev = max_dev.max(dev);
        max_spread = max_spread.max(spread);
        leaf_ok &= dev < LEAF_TOL * (1.0 + l.s);
        fol_ok &= spread < LEAF_TOL * (1.0 + l.image_s_max);
    }
    Ok(HorosphereInvariance {
        kind,
        leaf_preserving: leaf_ok,
        foliation_preserving: fol_ok,
        max_leaf_deviation: max_dev,
        max_image_spread: max_spread,
        leaves,
    })
}

/// One-parameter group `t ↦ exp(t η)` with a unit Frobenius-norm generator.
#[derive(Debug, Clone)]
pub struct OneParameterGroup {
    pub eta: DMatrix<f64>,
    /// Largest pairwise distance among the last quarter of normalized logs.
    pub tail_deviation: f64,
    /// `‖log g_n‖ / t_n` when parameters are supplied.
    pub speeds: Option<Vec<f64>>,
}

impl OneParameterGroup {
    pub fn exp(&self, t: f64) -> DMatrix<f64> {
        expm(&(&self.eta * t))
    }

    pub fn at(&self, t: f64) -> ProjMap {
        ProjMap::normalize(self.exp(t)).expect("exponential is invertible")
    }

    pub fn is_nilpotent(&self, tol: f64) -> bool {
        let n = self.eta.nrows();
        let mut p = self.eta.clone();
        for _ in 1..n {
            p = &p * &self.eta;
        }
        frobenius(&p) < tol
    }
}

/// Traceless logarithm of `g` scaled to `|det| = 1`.
pub fn normalized_log(g: &ProjMap) -> Result<DMatrix<f64>> {
    let m = g.matrix();
    let n = m.nrows();
    let det = m.determinant();
    if det <= 0.0 {
        return Err(Error::NoRealLogarithm(if det == 0.0 { "singular map".into() } else { "negative determinant".into() }));
    }
    let scaled = m / det.powf(1.0 / n as f64);
    logm(&scaled)
}

/// Direction of `log g_n` as `n` grows.
pub fn one_param_from_sequence(gs: &[ProjMap], ts: Option<&[f64]>) -> Result<OneParameterGroup> {
    if gs.is_empty() {
        return Err(Error::InvalidInput("empty sequence".into()));
    }
    if let Some(ts) = ts {
        if ts.len() != gs.len() {
            return Err(Error::DimensionMismatch { expected: gs.len(), got: ts.len() });
        }
    }
    let mut dirs = Vec::with_capacity(gs.len());
    let mut norms = Vec::with_capacity(gs.len());
    for g in gs {
        let l = normalized_log(g)?;
        let norm = frobenius(&l);
        if norm < 1e-12 {
            return Err(Error::Degenerate("logarithm vanishes".into()));
        }
        norms.push(norm);
        dirs.push(l / norm);
    }
    let tail_len = (dirs.len() / 4).max(1);
    let tail = &dirs[dirs.len() - tail_len..];
    let mut deviation: f64 = 0.0;
    for i in 0..tail.len() {
        for j in (i + 1)..tail.len() {
            deviation = deviation.max(frobenius(&(&tail[i] - &tail[j])));
        }
    }
    if deviation >= CAUCHY_TOL {
        return Err(Error::NoLimit { deviation, tolerance: CAUCHY_TOL });
    }
    let speeds = ts.map(|ts| norms.iter().zip(ts).map(|(n, t)| n / t).collect());
    Ok(OneParameterGroup { eta: dirs.last().unwrap().clone(), tail_deviation: deviation, speeds })
}

#[derive(Debug, Clone, Serialize)]
pub struct OsculatingReport {
    pub osculating: bool,
    /// Ratio `f(x) / |x|^2` in normalized coordinates at the smallest radius.
    pub limit: f64,
    /// `(radius, smallest ratio, largest ratio)` along the schedule.
    pub ratios: Vec<(f64, f64, f64)>,
}

pub const OSCULATING_RADII: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Local graph of the boundary over the tangent hyperplane at `p`.
struct LocalGraph<'a> {
    d: &'a ConvexDomain,
    p: DVector<f64>,
    normal: DVector<f64>,
    tangent: Vec<DVector<f64>>,
    reach: f64,
}

impl LocalGraph<'_> {
    /// Depth below the tangent plane of the boundary over `x`.
    fn height(&self, x: &[f64]) -> Result<f64> {
        let mut base = self.p.clone();
        for (c, t) in x.iter().zip(&self.tangent) {
            base += t * *c;
        }
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let at = |h: f64| &base - &self.normal * h;
        let mut hi = r.max(1e-12);
        while !self.d.contains(&at(hi)) {
            hi *= 2.0;
            if hi > self.reach {
                return Err(Error::GraphConstruction("normal line misses the domain".into()));
            }
        }
        let mut lo = 0.0;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.d.contains(&at(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Tests whether the boundary at `p` osculates an ellipsoid: after making the
/// estimated Hessian the identity, `f(x)/|x|^2` must tend to one.
pub fn osculating_ellipsoid_check(d: &ConvexDomain, p: &DVector<f64>) -> Result<OsculatingReport> {
    let support = supporting_hyperplane(d, p)?;
    let normal = support.outward_normal();
    let n = d.dim();
    let tangent = orthonormal_complement(&[normal.clone()], n);
    let m = tangent.len();
    let reach = 1e3 * (1.0 + (p - d.basepoint()).norm());
    let graph = LocalGraph { d, p: p.clone(), normal, tangent, reach };
    let unit = |i: usize, s: f64| -> Vec<f64> {
        let mut v = vec![0.0; m];
        v[i] = s;
        v
    };
    // Non-smooth directions make f grow linearly.
    let r_small = 1e-6;
    for i in 0..m {
        for s in [1.0, -1.0] {
            let f = graph.height(&unit(i, s * r_small))?;
            if f / r_small > 1e-3 {
                return Err(Error::GraphConstruction(format!("boundary has a corner in tangent direction {i}")));
            }
        }
    }
    let r0 = 1e-3;
    let mut q = DMatrix::zeros(m, m);
    for i in 0..m {
        q[(i, i)] = (graph.height(&unit(i, r0))? + graph.height(&unit(i, -r0))?) / (r0 * r0);
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let mut a = vec![0.0; m];
            a[i] = r0;
            a[j] = r0;
            let b: Vec<f64> = a.iter().map(|x| -x).collect();
            let both = (graph.height(&a)? + graph.height(&b)?) / (r0 * r0);
            q[(i, j)] = 0.5 * (both - q[(i, i)] - q[(j, j)]);
            q[(j, i)] = q[(i, j)];
        }
    }
    // f(x) ≈ x^T S x with S = Q / 2.
    let s = q * 0.5;
    let eig = s.clone().symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        directions.push(unit(i, 1.0));
        directions.push(unit(i, -1.0));
    }
    let mut rng = seeded(0x0c);
    for _ in 0..2 * m {
        directions.push(crate::sampling::unit_vector(&mut rng, m).iter().copied().collect());
    }
    if m == 0 || max_eig <= 0.0 || min_eig <= 1e-9 * max_eig.max(1e-300) {
        let k = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(k, _)| k);
        let mut ratios = Vec::new();
        let mut limit = 0.0;
        if let Some(k) = k {
            let dir: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            for &r in &OSCULATING_RADII {
                let x: Vec<f64> = dir.iter().map(|c| c * r).collect();
                let ratio = graph.height(&x)? / (r * r * max_eig.max(1e-300));
                ratios.push((r, ratio, ratio));
                limit = ratio;
            }
        }
        return Ok(OsculatingReport { osculating: false, limit, ratios });
    }
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    let mut ratios = Vec::new();
    for &r in &OSCULATING_RADII {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for dir in &directions {
            let y = DVector::from_column_slice(dir) * r;
            let x = &inv_sqrt * &y;
            let ratio = graph.height(x.as_slice())? / (r * r);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        ratios.push((r, lo, hi));
    }
    let (_, lo, hi) = *ratios.last().unwrap();
    let limit = 0.5 * (lo + hi);
    let osculating = ratios.iter().skip(2).all(|&(_, lo, hi)| (lo - 1.0).abs() < 1e-2 && (hi - 1.0).abs() < 1e-2);
    Ok(OsculatingReport { osculating, limit, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Constraint;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn quadrant() -> ConvexDomain {
        ConvexDomain::polytope(&[(v(&[1.0, 0.0]), 0.0), (v(&[0.0, 1.0]), 0.0)], Some(v(&[1.0, 1.0]))).unwrap()
    }

    fn parabola() -> ConvexDomain {
        let c = Constraint::new(|x| x[1] - x[0] * x[0], |x| v(&[-2.0 * x[0], 1.0]));
        ConvexDomain::from_constraints(2, v(&[0.0, 1.0]), vec![c], "parabola").unwrap()
    }

    fn shear(t: f64) -> ProjMap {
        ProjMap::from_rows(&[vec![1.0, 0.0, t], vec![2.0 * t, 1.0, t * t], vec![0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn classify_examples() {
        let a = 0.7f64;
        let rot = ProjMap::from_rows(&[vec![a.cos(), -a.sin(), 0.0], vec![a.sin(), a.cos(), 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let c = classify_isometry(&ConvexDomain::unit_disk(), &rot).unwrap();
        assert_eq!(c.kind, IsometryKind::Elliptic);
        assert!(DVector::from_vec(c.fixed_interior_point.unwrap()).norm() < 1e-9);

        let g = ProjMap::diagonal(&[2.0, 2.0, 0.25]).unwrap();
        let c = classify_isometry(&quadrant(), &g).unwrap();
        assert_eq!(c.kind, IsometryKind::Hyperbolic);
        assert!((c.lambda_max - 2.0).abs() < 1e-12);
        assert!((c.lambda_min - 0.25).abs() < 1e-12);
        assert!((c.translation_length() - 8f64.ln()).abs() < 1e-12);

        let c = classify_isometry(&parabola(), &shear(0.8)).unwrap();
        assert_eq!(c.kind, IsometryKind::Parabolic);
    }

    #[test]
    fn classify_rejects_non_automorphism() {
        let g = ProjMap::diagonal(&[1.0, -1.0, 1.0]).unwrap();
        assert!(matches!(classify_isometry(&quadrant(), &g), Err(Error::NotPreserved(_))));
    }

    #[test]
    fn parabola_horospheres_are_level_sets() {
        let d = parabola();
        let spec = HorosphereSpec::new(&d, Hyperplane::at_infinity(2), ProjPoint::from_slice(&[0.0, 1.0, 0.0]).unwrap()).unwrap();
        let x = v(&[0.5, 2.0]);
        let h = horosphere_through(&d, &spec, &x, 50, 0).unwrap();
        assert!((h.s - 1.75).abs() < 1e-9);
        for pt in &h.points {
            assert!((pt[1] - pt[0] * pt[0] - 1.75).abs() < 1e-7, "{pt}");
        }
        let report = horosphere_invariance_check(&d, &spec, &shear(0.3), 100, 0).unwrap();
        assert!(report.leaf_preserving, "{report:?}");
        assert_eq!(report.kind, Some(IsometryKind::Parabolic));
    }

    #[test]
    fn triangle_horospheres_move_under_hyperbolic() {
        let d = quadrant();
        let g = ProjMap::diagonal(&[2.0, 2.0, 0.25]).unwrap();
        let p = ProjPoint::from_slice(&[0.0, 0.0, 1.0]).unwrap();
        for h in [[1.0, 1.0, 0.0], [1.0, 0.0, 0.0]] {
            let spec = HorosphereSpec::new(&d, Hyperplane::from_slice(&h).unwrap(), p.clone()).unwrap();
            let report = horosphere_invariance_check(&d, &spec, &g, 100, 0).unwrap();
            assert!(report.foliation_preserving, "{report:?}");
            assert!(!report.leaf_preserving);
            for l in &report.leaves {
                assert!((l.image_s_min - l.s / 8.0).abs() < 1e-7 * (1.0 + l.s));
            }
        }
    }

    #[test]
    fn horosphere_passes_through_x_and_identity_fixes_leaves() {
        let d = ConvexDomain::unit_disk();
        let spec = HorosphereSpec::new(&d, Hyperplane::from_slice(&[1.0, 0.0, -1.0]).unwrap(), ProjPoint::from_slice(&[1.0, 0.0, 1.0]).unwrap()).unwrap();
        let x = v(&[0.3, 0.0]);
        let h = horosphere_through(&d, &spec, &x, 40, 1).unwrap();
        assert!((&h.points[0] - &x).norm() < 1e-12);
        let again = horosphere_through(&d, &spec, &h.points[5], 40, 1).unwrap();
        assert!((again.s - h.s).abs() < 1e-8 * (1.0 + h.s));
        let report = horosphere_invariance_check(&d, &spec, &ProjMap::identity(3), 40, 0).unwrap();
        assert!(report.leaf_preserving);
    }

    #[test]
    fn invariance_requires_fixed_data() {
        let d = quadrant();
        let spec = HorosphereSpec::new(&d, Hyperplane::from_slice(&[1.0, 0.0, 0.0]).unwrap(), ProjPoint::from_slice(&[0.0, 0.0, 1.0]).unwrap()).unwrap();
        let swap = ProjMap::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(horosphere_invariance_check(&d, &spec, &swap, 10, 0), Err(Error::NotFixed(_))));
    }

    #[test]
    fn one_parameter_examples() {
        let gs: Vec<ProjMap> = (1..=12).map(|n| ProjMap::diagonal(&[2f64.powi(n), 1.0, 2f64.powi(-n)]).unwrap()).collect();
        let ts: Vec<f64> = (1..=12).map(|n| n as f64).collect();
        let g = one_param_from_sequence(&gs, Some(&ts)).unwrap();
        let expected = DMatrix::from_diagonal(&v(&[1.0, 0.0, -1.0])) / 2f64.sqrt();
        assert!(frobenius(&(&g.eta - expected)) < 1e-10);
        let speed = 2f64.ln() * 2f64.sqrt();
        assert!(g.speeds.unwrap().iter().all(|s| (s - speed).abs() < 1e-9));

        let ids = vec![ProjMap::identity(3); 5];
        assert!(matches!(one_param_from_sequence(&ids, None), Err(Error::Degenerate(_))));

        let shears: Vec<ProjMap> = (1..=12).map(|n| shear(n as f64)).collect();
        let g = one_param_from_sequence(&shears, None).unwrap();
        assert!(g.is_nilpotent(1e-9));
    }

    #[test]
    fn exp_is_a_homomorphism() {
        let gs: Vec<ProjMap> = (1..=8).map(|n| shear(0.5 * n as f64)).collect();
        let g = one_param_from_sequence(&gs, None).unwrap();
        let lhs = g.exp(0.7) * g.exp(-1.3);
        assert!(frobenius(&(lhs - g.exp(-0.6))) < 1e-9);
    }

    #[test]
    fn osculating_examples() {
        let disk = ConvexDomain::unit_disk();
        for a in [0.0f64, 1.0, 2.5] {
            let r = osculating_ellipsoid_check(&disk, &v(&[a.cos(), a.sin()])).unwrap();
            assert!(r.osculating, "{r:?}");
            assert!((r.limit - 1.0).abs() < 1e-2);
        }
        let r = osculating_ellipsoid_check(&parabola(), &v(&[0.0, 0.0])).unwrap();
        assert!(r.osculating, "{r:?}");

        let tri = ConvexDomain::polytope(
            &[(v(&[1.0, 0.0]), 0.0), (v(&[0.0, 1.0]), 0.0), (v(&[-1.0, -1.0]), 1.0)],
            Some(v(&[1.0 / 3.0, 1.0 / 3.0])),
        )
        .unwrap();
        let r = osculating_ellipsoid_check(&tri, &v(&[0.5, 0.0])).unwrap();
        assert!(!r.osculating);
        assert!(r.limit.abs() < 1e-6);
        assert!(matches!(osculating_ellipsoid_check(&tri, &v(&[0.0, 0.0])), Err(Error::GraphConstruction(_))));
    }
}
