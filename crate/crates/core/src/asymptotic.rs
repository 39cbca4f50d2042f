//! Asymptotic cones, the parallel foliation by cone cosets, and the
//! identification of extreme points with cone points.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{is_extreme, ConvexDomain, EmbeddedDomain};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, sorted_svd};
use crate::optimize::nelder_mead;
use crate::sampling::{seeded, substream, unit_vector};

/// Relative off-span residual tolerated for cone membership.
pub const SPAN_TOL: f64 = 1e-6;
/// Relative radius of the ball used by the relative-interior test.
pub const INTERIOR_RADIUS: f64 = 1e-3;
/// Radii at which cone containment `x + AC° ⊂ Ω` is sampled.
pub const CONTAINMENT_RADII: [f64; 3] = [1.0, 10.0, 100.0];
/// Two boundary points are the same cone point within this chart distance.
pub const CONE_POINT_TOL: f64 = 1e-4;

/// Asymptotic cone `AC(Ω)` realized through escape tests from the basepoint.
#[derive(Debug, Clone)]
pub struct AsymptoticCone {
    pub ambient_dim: usize,
    pub intrinsic_dim: usize,
    /// Orthonormal basis of the linear span.
    pub span_basis: Vec<DVector<f64>>,
    /// Sampled unit members lying in the span.
    pub members: Vec<DVector<f64>>,
    domain: ConvexDomain,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeSummary {
    pub ambient_dim: usize,
    pub intrinsic_dim: usize,
    pub span: Vec<Vec<f64>>,
    pub extreme_rays: Vec<Vec<f64>>,
}

fn escapes(d: &ConvexDomain, x: &DVector<f64>, u: &DVector<f64>) -> bool {
    let n = u.norm();
    n > 0.0 && d.exit_time(x, &(u / n)).is_none()
}

fn project(basis: &[DVector<f64>], u: &DVector<f64>) -> DVector<f64> {
    let mut p = DVector::zeros(u.len());
    for b in basis {
        p += b * b.dot(u);
    }
    p
}

impl AsymptoticCone {
    pub fn contains(&self, u: &DVector<f64>) -> bool {
        let norm = u.norm();
        if norm == 0.0 {
            return true;
        }
        if self.intrinsic_dim == 0 {
            return false;
        }
        let p = project(&self.span_basis, u);
        (u - &p).norm() <= SPAN_TOL * norm && escapes(&self.domain, self.domain.basepoint(), &p)
    }

    /// Relative-interior test: a ball of relative radius `1e-3` about `u`
    /// within the span is sampled for membership.
    pub fn contains_interior(&self, u: &DVector<f64>) -> bool {
        let norm = u.norm();
        if norm == 0.0 || !self.contains(u) {
            return false;
        }
        let r = INTERIOR_RADIUS * norm;
        let mut probes: Vec<DVector<f64>> = Vec::new();
        for b in &self.span_basis {
            probes.push(b * r);
            probes.push(b * -r);
        }
        let mut rng = seeded(0x1a7e);
        for _ in 0..2 * self.intrinsic_dim {
            let c = unit_vector(&mut rng, self.intrinsic_dim);
            let mut v = DVector::zeros(self.ambient_dim);
            for (b, ci) in self.span_basis.iter().zip(c.iter()) {
                v += b * (*ci * r);
            }
            probes.push(v);
        }
        probes.iter().all(|e| self.contains(&(u + e)))
    }

    /// A unit direction in the relative interior.
    pub fn interior_direction(&self) -> Result<DVector<f64>> {
        if self.intrinsic_dim == 0 || self.members.is_empty() {
            return Err(Error::EmptyCone);
        }
        let mut mean = DVector::zeros(self.ambient_dim);
        for m in &self.members {
            mean += m;
        }
        let norm = mean.norm();
        if norm > 1e-12 {
            let w = project(&self.span_basis, &(mean / norm));
            let w = &w / w.norm();
            if self.contains_interior(&w) {
                return Ok(w);
            }
        }
        self.members
            .iter()
            .find(|m| self.contains_interior(m))
            .cloned()
            .ok_or_else(|| Error::Degenerate("no relative interior direction found".into()))
    }

    /// Random unit directions in the relative interior.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Result<Vec<DVector<f64>>> {
        let center = self.interior_direction()?;
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 50 * count.max(1) {
            attempts += 1;
            let a = &self.members[rng.random_range(0..self.members.len())];
            let b = &self.members[rng.random_range(0..self.members.len())];
            let (s, t, c): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
            let v = a * s + b * t + &center * (0.05 + c);
            let v = &v / v.norm();
            if self.contains_interior(&v) {
                out.push(v);
            }
        }
        if out.is_empty() {
            out.push(center);
        }
        Ok(out)
    }

    /// Linear functional strictly positive on `AC \ {0}`, from a max-margin
    /// fit over the sampled members.
    pub fn positive_functional(&self) -> Result<DVector<f64>> {
        if self.intrinsic_dim == 0 {
            return Err(Error::EmptyCone);
        }
        let k = self.intrinsic_dim;
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = (0..k).map(|_| problem.add_var(0.0, (-1.0, 1.0))).collect();
        let m = problem.add_var(1.0, (-1.0, 1.0));
        for u in &self.members {
            let mut row: Vec<_> = vars
                .iter()
                .zip(self.span_basis.iter())
                .map(|(&v, b)| (v, b.dot(u)))
                .collect();
            row.push((m, -1.0));
            problem.add_constraint(&row[..], ComparisonOp::Ge, 0.0);
        }
        let sol = problem.solve().map_err(|e| Error::Degenerate(format!("cone functional: {e}")))?;
        if sol[m] <= 1e-9 {
            return Err(Error::Degenerate("asymptotic cone is not pointed".into()));
        }
        let mut l = DVector::zeros(self.ambient_dim);
        for (&v, b) in vars.iter().zip(&self.span_basis) {
            l += b * sol[v];
        }
        Ok(l)
    }

    /// Boundary members of the cone that are not interior to a segment of
    /// boundary members.
    pub fn extreme_rays(&self, limit: usize) -> Vec<DVector<f64>> {
        let k = self.intrinsic_dim;
        if k == 0 {
            return Vec::new();
        }
        if k == 1 {
            return vec![self.members[0].clone()];
        }
        let eps = 1e-3;
        let mut rays: Vec<DVector<f64>> = Vec::new();
        for u in &self.members {
            if rays.len() >= limit {
                break;
            }
            if self.contains_interior(u) {
                continue;
            }
            let mut tangent: Vec<DVector<f64>> = Vec::new();
            for b in &self.span_basis {
                let t = b - u * u.dot(b);
                if t.norm() > 1e-6 {
                    tangent.push(&t / t.norm());
                }
            }
            let mut dirs = tangent.clone();
            for i in 0..tangent.len() {
                for j in (i + 1)..tangent.len() {
                    for s in [1.0, -1.0] {
                        let v = &tangent[i] + &tangent[j] * s;
                        if v.norm() > 1e-6 {
                            dirs.push(&v / v.norm());
                        }
                    }
                }
            }
            let on_segment = dirs.iter().any(|v| self.contains(&(u + v * eps)) && self.contains(&(u - v * eps)));
            if !on_segment && rays.iter().all(|r| (r - u).norm() > 1e-3) {
                rays.push(u.clone());
            }
        }
        rays
    }

    pub fn summary(&self) -> ConeSummary {
        ConeSummary {
            ambient_dim: self.ambient_dim,
            intrinsic_dim: self.intrinsic_dim,
            span: self.span_basis.iter().map(|b| b.iter().copied().collect()).collect(),
            extreme_rays: self.extreme_rays(16).iter().map(|b| b.iter().copied().collect()).collect(),
        }
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }
}

fn direction_grid(n: usize) -> Vec<DVector<f64>> {
    let mut grid = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = DVector::zeros(n);
            e[i] = s;
            grid.push(e);
        }
        for j in (i + 1)..n {
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut e = DVector::zeros(n);
                e[i] = a;
                e[j] = b;
                grid.push(e / 2f64.sqrt());
            }
        }
    }
    grid
}

/// Gauge of `Ω - x` in direction `u`: `1 / exit time`, zero on escape.
fn gauge(d: &ConvexDomain, x: &DVector<f64>, u: &DVector<f64>) -> f64 {
    let n = u.norm();
    if n == 0.0 {
        return f64::INFINITY;
    }
    d.exit_time(x, &(u / n)).map_or(0.0, |t| 1.0 / t.max(1e-300))
}

/// Searches the unit sphere for escaping directions starting at `u0`.
fn refine_to_escape(d: &ConvexDomain, u0: &DVector<f64>) -> Option<DVector<f64>> {
    let x = d.basepoint();
    let n = d.dim();
    let dir = |th: &[f64]| -> DVector<f64> {
        let v = u0 + DVector::from_column_slice(th);
        let norm = v.norm();
        if norm == 0.0 {
            u0.clone()
        } else {
            v / norm
        }
    };
    let f = |th: &[f64]| gauge(d, x, &dir(th));
    let (best, value) = nelder_mead(&f, &vec![0.0; n], 0.3, 60 * n + 200, 0.0);
    let (best, value) = if value > 0.0 { nelder_mead(&f, &best, 0.02, 60 * n + 200, 0.0) } else { (best, value) };
    (value == 0.0).then(|| dir(&best))
}

/// Span and member samples of the asymptotic cone of `d`, computed by escape
/// tests along a direction grid refined toward escaping directions.
pub fn asymptotic_cone(d: &ConvexDomain) -> AsymptoticCone {
    let n = d.dim();
    let x = d.basepoint().clone();
    let mut rng = seeded(0xac);
    let mut candidates = direction_grid(n);
    for _ in 0..32 * n {
        candidates.push(unit_vector(&mut rng, n));
    }
    let reach: Vec<(DVector<f64>, f64)> = candidates.into_par_iter().map(|u| {
        let g = gauge(d, &x, &u);
        (u, g)
    }).collect();
    let mut found: Vec<DVector<f64>> = reach.iter().filter(|(_, g)| *g == 0.0).map(|(u, _)| u.clone()).collect();
    let mut rest: Vec<&(DVector<f64>, f64)> = reach.iter().filter(|(_, g)| *g > 0.0).collect();
    rest.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut starts: Vec<DVector<f64>> = rest.iter().take(6 * n).map(|(u, _)| u.clone()).collect();
    for _ in 0..4 * n {
        starts.push(unit_vector(&mut rng, n));
    }
    let refined: Vec<DVector<f64>> = starts.par_iter().filter_map(|u| refine_to_escape(d, u)).collect();
    found.extend(refined);
    if found.is_empty() {
        return AsymptoticCone { ambient_dim: n, intrinsic_dim: 0, span_basis: Vec::new(), members: Vec::new(), domain: d.clone() };
    }
    let rough = span_of(&found, 1e-3);
    // Escaping directions form a thin band around the span; centering each
    // member inside the band removes the band width from the span estimate.
    let off = crate::linalg::orthonormal_complement(&rough, n);
    let centered: Vec<DVector<f64>> = found
        .par_iter()
        .map(|u| {
            let mut u = u.clone();
            for _ in 0..2 {
                for e in &off {
                    u = center_in_band(d, &x, &u, e);
                }
            }
            &u / u.norm()
        })
        .collect();
    let basis = span_of(&centered, 1e-3);
    let found = centered;
    // Snap onto the span and enlarge the sample with random directions there.
    let k = basis.len();
    let mut pool: Vec<DVector<f64>> = found.iter().map(|u| project(&basis, u)).collect();
    let mut members_rng = seeded(0xacac);
    for _ in 0..64 * k {
        let c = unit_vector(&mut members_rng, k);
        let mut v = DVector::zeros(n);
        for (b, ci) in basis.iter().zip(c.iter()) {
            v += b * *ci;
        }
        pool.push(v);
    }
    let members: Vec<DVector<f64>> = pool
        .into_par_iter()
        .filter(|v| v.norm() > 1e-12 && escapes(d, &x, v))
        .map(|v| &v / v.norm())
        .collect();
    let basis = if members.is_empty() { basis } else { span_of(&members, 1e-6) };
    let members = if members.is_empty() { found.iter().map(|u| project(&basis, u)).map(|v| &v / v.norm()).collect() } else { members };
    AsymptoticCone { ambient_dim: n, intrinsic_dim: basis.len(), span_basis: basis, members, domain: d.clone() }
}

/// Moves the escaping direction `u` to the midpoint of the escaping
/// interval of the line `u + a e`.
fn center_in_band(d: &ConvexDomain, x: &DVector<f64>, u: &DVector<f64>, e: &DVector<f64>) -> DVector<f64> {
    let edge = |sign: f64| -> f64 {
        let (mut lo, mut hi) = (0.0, 1e-2);
        if escapes(d, x, &(u + e * (sign * hi))) {
            return hi;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if escapes(d, x, &(u + e * (sign * mid))) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let (plus, minus) = (edge(1.0), edge(-1.0));
    u + e * (0.5 * (plus - minus))
}

fn span_of(vectors: &[DVector<f64>], rel_tol: f64) -> Vec<DVector<f64>> {
    let n = vectors[0].len();
    let m = DMatrix::from_fn(vectors.len(), n, |i, j| vectors[i][j]);
    let svd = sorted_svd(&m);
    let k = numerical_rank(&svd.singular_values, rel_tol);
    (0..k).map(|i| svd.v_t.row(i).transpose()).collect()
}

/// Fraction of grid directions on which two membership predicates agree.
pub fn grid_agreement(a: impl Fn(&DVector<f64>) -> bool + Sync, b: impl Fn(&DVector<f64>) -> bool + Sync, grid: &[DVector<f64>]) -> f64 {
    if grid.is_empty() {
        return 1.0;
    }
    let agree = grid.par_iter().filter(|u| a(u) == b(u)).count();
    agree as f64 / grid.len() as f64
}

/// Cone point of a leaf, which may lie at infinity for domains whose
/// backward rays escape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ConePoint {
    Finite(Vec<f64>),
    Infinity,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeafDescriptor {
    pub x: Vec<f64>,
    pub cone_point: ConePoint,
    /// Orthonormal directions of the leaf `ξ + AC°`.
    pub directions: Vec<Vec<f64>>,
    /// `ξ + AC° ⊂ Ω` held on every containment sample.
    pub certified: bool,
}

impl LeafDescriptor {
    pub fn cone_point(&self) -> Option<DVector<f64>> {
        match &self.cone_point {
            ConePoint::Finite(v) => Some(DVector::from_column_slice(v)),
            ConePoint::Infinity => None,
        }
    }
}

/// Sampled test of `y + AC° ⊂ Ω`.
pub fn cone_containment(d: &ConvexDomain, y: &DVector<f64>, directions: &[DVector<f64>]) -> bool {
    directions
        .iter()
        .all(|u| CONTAINMENT_RADII.iter().chain([1e-3, 1e-1].iter()).all(|&r| d.contains(&(y + u * r))))
}

pub fn leaf_and_cone_point(d: &ConvexDomain, x: &DVector<f64>) -> Result<LeafDescriptor> {
    let ac = asymptotic_cone(d);
    leaf_and_cone_point_with(d, &ac, x)
}

/// Leaf `Ω ∩ (x + span AC)` through `x` and its cone point, the minimizer of
/// a functional positive on the cone over the closure of the leaf.
pub fn leaf_and_cone_point_with(d: &ConvexDomain, ac: &AsymptoticCone, x: &DVector<f64>) -> Result<LeafDescriptor> {
    if ac.intrinsic_dim == 0 {
        return Err(Error::EmptyCone);
    }
    if !d.contains(x) {
        return Err(Error::NotInterior);
    }
    let ell = ac.positive_functional()?;
    let basis = &ac.span_basis;
    let center = ac.interior_direction()?;
    let directions: Vec<Vec<f64>> = basis.iter().map(|b| b.iter().copied().collect()).collect();
    let xi = if ac.intrinsic_dim == 1 {
        let w = if ell.dot(&basis[0]) > 0.0 { basis[0].clone() } else { -&basis[0] };
        d.exit_time_precise(x, &(-&w)).map(|t| x - w * t)
    } else {
        apex_search(d, ac, &ell, &center, x)
    };
    let Some(xi) = xi else {
        return Ok(LeafDescriptor { x: x.iter().copied().collect(), cone_point: ConePoint::Infinity, directions, certified: false });
    };
    let mut rng = seeded(0x1eaf);
    let samples = ac.sample_interior(&mut rng, 200)?;
    let certified = !d.contains(&xi) && cone_containment(d, &xi, &samples);
    Ok(LeafDescriptor { x: x.iter().copied().collect(), cone_point: ConePoint::Finite(xi.iter().copied().collect()), directions, certified })
}

/// Maximizes `t(w) ℓ(w)` over unit directions `w` of the span, where
/// `t(w)` is the exit time from `x` along `-w`; the exit point is the apex.
fn apex_search(d: &ConvexDomain, ac: &AsymptoticCone, ell: &DVector<f64>, center: &DVector<f64>, x: &DVector<f64>) -> Option<DVector<f64>> {
    let basis = &ac.span_basis;
    let k = basis.len();
    let to_dir = |w0: &DVector<f64>, th: &[f64]| -> DVector<f64> {
        let mut v = w0.clone();
        for (b, t) in basis.iter().zip(th) {
            v += b * *t;
        }
        let n = v.norm();
        if n == 0.0 {
            w0.clone()
        } else {
            v / n
        }
    };
    let depth = |w: &DVector<f64>| -> f64 {
        let l = ell.dot(w);
        if l <= 0.0 {
            return 0.0;
        }
        d.exit_time_precise(x, &(-w)).map_or(f64::INFINITY, |t| t * l)
    };
    let mut starts = vec![center.clone()];
    for m in ac.members.iter().step_by((ac.members.len() / 4).max(1)).take(4) {
        starts.push(m.clone());
    }
    let mut best: Option<(DVector<f64>, f64)> = None;
    for w0 in &starts {
        let f = |th: &[f64]| -depth(&to_dir(w0, th));
        let (th, _) = nelder_mead(&f, &vec![0.0; k], 0.2, 400 * k, 0.0);
        let w1 = to_dir(w0, &th);
        let f2 = |th: &[f64]| -depth(&to_dir(&w1, th));
        let (th2, v2) = nelder_mead(&f2, &vec![0.0; k], 1e-3, 400 * k, 0.0);
        let w = to_dir(&w1, &th2);
        if v2.is_infinite() {
            return None;
        }
        if best.as_ref().is_none_or(|(_, b)| v2 < *b) {
            best = Some((w, v2));
        }
    }
    let (w, _) = best?;
    d.exit_time_precise(x, &(-&w)).map(|t| x - w * t)
}

/// Whether the boundary point `p` is the cone point of its leaf, decided by
/// tracing the leaf of `p + w` for an interior cone direction `w`.
pub fn is_cone_point(d: &ConvexDomain, ac: &AsymptoticCone, p: &DVector<f64>) -> Result<(bool, Option<DVector<f64>>)> {
    let w = ac.interior_direction()?;
    let y = p + w * (0.5 * (1.0 + p.norm()));
    if !d.contains(&y) {
        return Ok((false, None));
    }
    let leaf = leaf_and_cone_point_with(d, ac, &y)?;
    match leaf.cone_point() {
        Some(xi) => Ok((d.chart_distance(&xi, p) < CONE_POINT_TOL, Some(xi))),
        None => Ok((false, None)),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremeConeDisagreement {
    pub point: Vec<f64>,
    pub extreme: bool,
    pub cone_point: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremeConeReport {
    pub boundary_samples: usize,
    pub apex_samples: usize,
    pub extreme_count: usize,
    pub cone_point_count: usize,
    pub disagreements: Vec<ExtremeConeDisagreement>,
    /// Samples where a predicate could not be evaluated.
    pub skipped: usize,
}

impl ExtremeConeReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

fn extreme_in_chart(d: &ConvexDomain, bounded: &ConvexDomain, p: &DVector<f64>) -> Option<bool> {
    let q = match d.bounded_chart() {
        Some(chart) => chart.apply_affine(p)?,
        None => p.clone(),
    };
    let q = if bounded.check_boundary(&q).is_ok() { q } else { bounded.project_to_boundary(&q)? };
    is_extreme(bounded, &q).ok()
}

/// Compares `is_extreme` with the cone-point predicate on boundary samples
/// (half from rays out of the basepoint, half from leaf apices of interior
/// samples). Face probing runs in the bounded chart.
pub fn extreme_equals_conepoints(d: &ConvexDomain, boundary_budget: usize, seed: u64) -> Result<ExtremeConeReport> {
    let ac = asymptotic_cone(d);
    if ac.intrinsic_dim == 0 {
        return Err(Error::EmptyCone);
    }
    let bounded = d.in_bounded_chart()?;
    let half = boundary_budget / 2;
    let mut rng = seeded(seed);
    let generic = d.sample_boundary(&mut rng, boundary_budget - half);
    let interior = d.sample_interior(&mut rng, half, 1e2);

    enum Outcome {
        Ok { extreme: bool, cone: bool, point: DVector<f64> },
        Skipped,
    }
    let generic_results: Vec<Outcome> = generic
        .par_iter()
        .map(|p| {
            let Some(extreme) = extreme_in_chart(d, &bounded, p) else { return Outcome::Skipped };
            match is_cone_point(d, &ac, p) {
                Ok((cone, _)) => Outcome::Ok { extreme, cone, point: p.clone() },
                Err(_) => Outcome::Skipped,
            }
        })
        .collect();
    let apex_results: Vec<Outcome> = interior
        .par_iter()
        .map(|y| {
            let Ok(leaf) = leaf_and_cone_point_with(d, &ac, y) else { return Outcome::Skipped };
            let Some(xi) = leaf.cone_point() else { return Outcome::Skipped };
            match extreme_in_chart(d, &bounded, &xi) {
                Some(extreme) => Outcome::Ok { extreme, cone: true, point: xi },
                None => Outcome::Skipped,
            }
        })
        .collect();
    let mut report = ExtremeConeReport {
        boundary_samples: generic.len(),
        apex_samples: interior.len(),
        extreme_count: 0,
        cone_point_count: 0,
        disagreements: Vec::new(),
        skipped: 0,
    };
    for o in generic_results.into_iter().chain(apex_results) {
        match o {
            Outcome::Ok { extreme, cone, point } => {
                report.extreme_count += extreme as usize;
                report.cone_point_count += cone as usize;
                if extreme != cone {
                    report.disagreements.push(ExtremeConeDisagreement { point: point.iter().copied().collect(), extreme, cone_point: cone });
                }
            }
            Outcome::Skipped => report.skipped += 1,
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct AcFaceReport {
    /// False when the domain is itself a cone.
    pub applicable: bool,
    pub extreme_samples: usize,
    /// Extreme points `ξ` for which some point of `ξ + AC°` left `Ω`.
    pub interior_failures: usize,
    /// Extreme points found in the closure of each summand, when supplied.
    pub summand_counts: Option<[usize; 2]>,
    pub single_summand: Option<bool>,
}

fn in_summand_closure(s: &EmbeddedDomain, xi: &DVector<f64>) -> bool {
    let n = xi.len();
    let mut h = DVector::zeros(n + 1);
    h.rows_mut(0, n).copy_from(xi);
    h[n] = 1.0;
    let e = &s.embedding;
    let Some(coef) = e.clone().svd(true, true).solve(&h, 1e-12).ok() else { return false };
    let resid = (e * &coef - &h).norm();
    if resid > 1e-6 * h.norm() {
        return false;
    }
    let k = coef.len();
    if k == 1 {
        return true;
    }
    let w = coef[k - 1];
    if w.abs() < 1e-12 {
        return true;
    }
    let alpha = coef.rows(0, k - 1) / w;
    s.domain.in_closure(&alpha.into_owned())
}

/// Checks that `ξ + AC°` lies in `Ω` for sampled extreme points and, when a
/// decomposition `Ω = F₁ ∔ F₂` is given, that all of them lie in the closure
/// of a single summand.
pub fn corollary_acface_checks(d: &ConvexDomain, decomposition: Option<(&EmbeddedDomain, &EmbeddedDomain)>, samples: usize, seed: u64) -> Result<AcFaceReport> {
    let ac = asymptotic_cone(d);
    if ac.intrinsic_dim == 0 {
        return Err(Error::EmptyCone);
    }
    if ac.intrinsic_dim == d.dim() {
        return Ok(AcFaceReport { applicable: false, extreme_samples: 0, interior_failures: 0, summand_counts: None, single_summand: None });
    }
    let mut rng = seeded(seed);
    let interior = d.sample_interior(&mut rng, samples, 1e2);
    let dirs = ac.sample_interior(&mut rng, 64)?;
    let extremes: Vec<DVector<f64>> = interior
        .par_iter()
        .enumerate()
        .filter_map(|(i, y)| {
            let _ = substream(seed, i as u64);
            leaf_and_cone_point_with(d, &ac, y).ok()?.cone_point()
        })
        .collect();
    let failures = extremes.iter().filter(|xi| !cone_containment(d, xi, &dirs)).count();
    let (counts, single) = match decomposition {
        Some((f1, f2)) => {
            let c1 = extremes.iter().filter(|xi| in_summand_closure(f1, xi)).count();
            let c2 = extremes.iter().filter(|xi| in_summand_closure(f2, xi)).count();
            let n = extremes.len();
            (Some([c1, c2]), Some(c1 == n || c2 == n))
        }
        None => (None, None),
    };
    Ok(AcFaceReport { applicable: true, extreme_samples: extremes.len(), interior_failures: failures, summand_counts: counts, single_summand: single })
}
