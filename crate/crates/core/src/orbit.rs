//! Orbits of generator sets, limit set estimates and their checks.

use std::collections::HashSet;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{dyadic_steps, CatalogEntry, Family};
use crate::domain::ConvexDomain;
use crate::error::{Error, Result};
use crate::projective::{AffineMap, ProjMap};
#[cfg(test)]
use crate::projective::hyperplane_chart;
use crate::sampling::substream;

/// Orbit points closer than this (canonical homogeneous coordinates) merge.
pub const DEDUP_TOL: f64 = 1e-9;
/// Boundary proximity in the working chart.
pub const LIMIT_EPSILON: f64 = 1e-6;
/// Dyadic exponents used to discretize one-parameter families.
pub const FAMILY_STEP_EXPONENTS: (i32, i32) = (-3, 6);
/// Smallest cluster kept: a lone orbit point near the boundary is not
/// evidence of accumulation.
pub const MIN_MULTIPLICITY: usize = 2;
/// Clusters above this size get an approximate medoid.
const EXACT_MEDOID_MAX: usize = 1000;

/// Finite generating set closed under inverses.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    gens: Vec<ProjMap>,
    labels: Vec<String>,
    inverse: Vec<usize>,
}

impl GeneratorSet {
    /// Generators with their labels; missing inverses are appended as `label^-1`.
    pub fn new(gens: Vec<ProjMap>, labels: Vec<String>) -> Result<Self> {
        if gens.len() != labels.len() {
            return Err(Error::InvalidInput("one label per generator expected".into()));
        }
        if let Some(first) = gens.first() {
            let n1 = first.size();
            if let Some(g) = gens.iter().find(|g| g.size() != n1) {
                return Err(Error::DimensionMismatch { expected: n1, got: g.size() });
            }
        }
        let mut gens = gens;
        let mut labels = labels;
        let base = gens.len();
        let mut inverse = vec![usize::MAX; base];
        for i in 0..base {
            if inverse[i] != usize::MAX {
                continue;
            }
            let inv = gens[i].inverse()?;
            match (0..gens.len()).find(|&j| gens[j].distance(&inv) < 1e-12) {
                Some(j) => {
                    inverse[i] = j;
                    if j < base {
                        inverse[j] = i;
                    }
                }
                None => {
                    gens.push(inv);
                    labels.push(format!("{}^-1", labels[i]));
                    inverse.push(i);
                    inverse[i] = gens.len() - 1;
                }
            }
        }
        Ok(Self { gens, labels, inverse })
    }

    /// Labels `g1, g2, ...`.
    pub fn from_maps(gens: Vec<ProjMap>) -> Result<Self> {
        let labels = (1..=gens.len()).map(|i| format!("g{i}")).collect();
        Self::new(gens, labels)
    }

    /// Each family sampled at `±s` for every step, paired as inverses.
    pub fn from_families(families: &[Family], steps: &[f64]) -> Self {
        let mut gens = Vec::new();
        let mut labels = Vec::new();
        let mut inverse = Vec::new();
        for f in families {
            for &s in steps {
                let k = gens.len();
                gens.push(f.proj(s));
                gens.push(f.proj(-s));
                labels.push(format!("{}({s})", f.label));
                labels.push(format!("{}({})", f.label, -s));
                inverse.push(k + 1);
                inverse.push(k);
            }
        }
        Self { gens, labels, inverse }
    }

    /// The families of a catalog entry at steps `2^k`, `k = -3..6`. Cone
    /// entries also get the dilations about their vertex.
    pub fn for_entry(entry: &CatalogEntry) -> Self {
        let (lo, hi) = FAMILY_STEP_EXPONENTS;
        let mut families = entry.families.clone();
        if let (true, Some(c)) = (entry.flags.cone, &entry.cone_point) {
            let c = c.clone();
            families.push(Family::new("dilation", move |t| {
                let s = t.exp();
                AffineMap::new(DMatrix::identity(c.len(), c.len()) * s, &c * (1.0 - s)).expect("dilation is invertible")
            }));
        }
        Self::from_families(&families, &dyadic_steps(lo, hi))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[ProjMap] {
        &self.gens
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// `h g h^{-1}` for every generator.
    pub fn conjugated(&self, h: &ProjMap) -> Result<Self> {
        let hi = h.inverse()?;
        let gens = self.gens.iter().map(|g| h.compose(&g.compose(&hi)?)).collect::<Result<_>>()?;
        Ok(Self { gens, labels: self.labels.clone(), inverse: self.inverse.clone() })
    }

    /// Checks on samples that every generator preserves `d`.
    pub fn check_preserves(&self, d: &ConvexDomain, samples: &[DVector<f64>]) -> Result<()> {
        for (g, label) in self.gens.iter().zip(&self.labels) {
            crate::domain::check_preserves(d, g, samples).map_err(|e| Error::NotPreserved(format!("{label}: {e}")))?;
        }
        Ok(())
    }

    fn word_labels(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&i| self.labels[i].clone()).collect()
    }
}

#[derive(Debug, Clone)]
struct Node {
    h: DVector<f64>,
    word: Vec<usize>,
    level: usize,
}

fn canonical(mut h: DVector<f64>) -> Option<DVector<f64>> {
    let n = h.norm();
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    h /= n;
    if let Some(first) = h.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            h = -h;
        }
    }
    Some(h)
}

fn dedup_key(h: &DVector<f64>) -> Vec<i64> {
    h.iter().map(|c| (c / DEDUP_TOL).round() as i64).collect()
}

fn homogeneous(x: &DVector<f64>) -> DVector<f64> {
    let n = x.len();
    let mut h = DVector::from_element(n + 1, 1.0);
    h.rows_mut(0, n).copy_from(x);
    h
}

fn dehomogenize(h: &DVector<f64>) -> Option<DVector<f64>> {
    let n = h.len() - 1;
    let w = h[n];
    if w.abs() <= 1e-14 * h.norm() {
        return None;
    }
    Some(h.rows(0, n) / w)
}

/// Breadth-first exploration with free reduction and deduplication. Whole
/// levels are added while the node count stays within `budget`.
fn explore(gens: &GeneratorSet, x0: &DVector<f64>, max_level: usize, budget: usize) -> Vec<Node> {
    let root = canonical(homogeneous(x0)).expect("finite point");
    let mut seen = HashSet::new();
    seen.insert(dedup_key(&root));
    let mut nodes = vec![Node { h: root, word: Vec::new(), level: 0 }];
    let mut frontier = 0..1;
    for level in 1..=max_level {
        let children: Vec<Vec<Node>> = nodes[frontier.clone()]
            .par_iter()
            .map(|node| {
                let last = node.word.last().map(|&i| gens.inverse_of(i));
                (0..gens.len())
                    .filter(|&j| Some(j) != last)
                    .filter_map(|j| {
                        let h = canonical(gens.gens()[j].matrix() * &node.h)?;
                        let mut word = node.word.clone();
                        word.push(j);
                        Some(Node { h, word, level })
                    })
                    .collect()
            })
            .collect();
        let mut fresh = Vec::new();
        for child in children.into_iter().flatten() {
            if seen.insert(dedup_key(&child.h)) {
                fresh.push(child);
            }
        }
        if fresh.is_empty() || nodes.len() + fresh.len() > budget {
            break;
        }
        let start = nodes.len();
        nodes.extend(fresh);
        frontier = start..nodes.len();
    }
    nodes
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitPoint {
    /// Canonical homogeneous coordinates.
    pub homogeneous: Vec<f64>,
    /// Affine coordinates, absent for points at infinity.
    pub affine: Option<Vec<f64>>,
    pub in_domain: bool,
    pub word: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub points: Vec<OrbitPoint>,
    /// Indices of points outside the affine chart.
    pub outside_chart: Vec<usize>,
    /// Indices of points that left the domain.
    pub violations: Vec<usize>,
}

/// All reduced words up to `word_len` applied to `x0`, deduplicated.
pub fn orbit(d: &ConvexDomain, gens: &GeneratorSet, x0: &DVector<f64>, word_len: usize) -> Result<OrbitReport> {
    check_inputs(d, gens, x0)?;
    let nodes = explore(gens, x0, word_len, usize::MAX);
    let mut points = Vec::with_capacity(nodes.len());
    let mut outside_chart = Vec::new();
    let mut violations = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        let affine = dehomogenize(&node.h);
        let in_domain = affine.as_ref().is_some_and(|x| d.contains(x));
        if affine.is_none() {
            outside_chart.push(i);
        }
        if !in_domain {
            violations.push(i);
        }
        points.push(OrbitPoint {
            homogeneous: node.h.as_slice().to_vec(),
            affine: affine.map(|x| x.as_slice().to_vec()),
            in_domain,
            word: gens.word_labels(&node.word),
        });
    }
    Ok(OrbitReport { points, outside_chart, violations })
}

fn check_inputs(d: &ConvexDomain, gens: &GeneratorSet, x0: &DVector<f64>) -> Result<()> {
    if x0.len() != d.dim() {
        return Err(Error::DimensionMismatch { expected: d.dim(), got: x0.len() });
    }
    if let Some(g) = gens.gens().iter().find(|g| g.size() != d.dim() + 1) {
        return Err(Error::DimensionMismatch { expected: d.dim() + 1, got: g.size() });
    }
    if !d.contains(x0) {
        return Err(Error::NotInterior);
    }
    Ok(())
}

/// Coordinates used for boundary proximity: the bounded chart when the
/// domain has one, else the affine chart with far points sent to directions.
#[derive(Debug, Clone)]
struct WorkingChart {
    chart: Option<ProjMap>,
    domain: ConvexDomain,
}

#[derive(Debug, Clone)]
enum Place {
    Interior,
    Near { y: DVector<f64>, gap: f64 },
    Infinity { u: DVector<f64> },
    Outside,
}

impl WorkingChart {
    fn new(d: &ConvexDomain) -> Result<Self> {
        Ok(Self { chart: d.bounded_chart().cloned(), domain: d.in_bounded_chart()? })
    }

    fn coords(&self, h: &DVector<f64>) -> Option<DVector<f64>> {
        match &self.chart {
            Some(c) => dehomogenize(&(c.matrix() * h)),
            None => dehomogenize(h),
        }
    }

    fn locate(&self, h: &DVector<f64>, epsilon: f64) -> Place {
        let n = h.len() - 1;
        let y = match self.coords(h) {
            Some(y) => y,
            None if self.chart.is_none() => {
                let u = h.rows(0, n).into_owned();
                let norm = u.norm();
                return Place::Infinity { u: u / norm };
            }
            None => return Place::Outside,
        };
        if self.chart.is_none() && y.norm() > 1.0 / epsilon {
            let norm = y.norm();
            return Place::Infinity { u: y / norm };
        }
        let d = &self.domain;
        if !d.contains(&y) {
            return if d.in_closure(&y) { Place::Near { y, gap: 0.0 } } else { Place::Outside };
        }
        let b = d.basepoint();
        let r = (&y - b).norm();
        if r == 0.0 {
            return Place::Interior;
        }
        let u = (&y - b) / r;
        match d.exit_time_precise(b, &u) {
            Some(t) if t - r < epsilon => Place::Near { y, gap: (t - r).max(0.0) },
            _ => Place::Interior,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessStep {
    pub word: Vec<String>,
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    /// Canonical homogeneous coordinates of the medoid.
    pub representative: Vec<f64>,
    /// Medoid in the working chart, or its unit direction for clusters at infinity.
    pub chart_point: Vec<f64>,
    pub multiplicity: usize,
    /// Membership-flip distance of the medoid along its basepoint ray.
    pub gap: f64,
    pub word: Vec<String>,
    /// Orbit points of increasing word length approaching the medoid.
    pub witness: Vec<WitnessStep>,
    #[serde(skip)]
    members: Vec<DVector<f64>>,
}

impl Cluster {
    pub fn members(&self) -> &[DVector<f64>] {
        &self.members
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitSetEstimate {
    pub epsilon: f64,
    pub budget: usize,
    pub explored: usize,
    pub levels: usize,
    /// Whether proximity was measured in an attached bounded chart.
    pub bounded_chart: bool,
    /// Orbit points found outside the domain.
    pub outside: usize,
    pub clusters: Vec<Cluster>,
    /// Accumulation directions at infinity of the affine chart.
    pub directions: Vec<Cluster>,
    #[serde(skip)]
    chart: Option<ProjMap>,
}

impl LimitSetEstimate {
    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty() && self.directions.is_empty()
    }

    /// Working-chart image of an affine point of the domain.
    pub fn chart_coords(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let h = homogeneous(x);
        match &self.chart {
            Some(c) => dehomogenize(&(c.matrix() * h)),
            None => Some(x.clone()),
        }
    }
}

/// Single-linkage components at radius `link`, by a sweep on the first coordinate.
fn single_linkage(points: &[DVector<f64>], link: f64) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(a.cmp(&b)));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if points[j][0] - points[i][0] > link {
                break;
            }
            if (&points[i] - &points[j]).norm() <= link {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; points.len()];
    for i in 0..points.len() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn medoid(points: &[DVector<f64>], idx: &[usize]) -> usize {
    if idx.len() > EXACT_MEDOID_MAX {
        let centroid = idx.iter().fold(DVector::zeros(points[idx[0]].len()), |acc, &i| acc + &points[i]) / idx.len() as f64;
        return *idx
            .iter()
            .min_by(|&&a, &&b| (&points[a] - &centroid).norm().total_cmp(&(&points[b] - &centroid).norm()))
            .expect("nonempty");
    }
    *idx.iter()
        .min_by(|&&a, &&b| {
            let sa: f64 = idx.iter().map(|&j| (&points[a] - &points[j]).norm()).sum();
            let sb: f64 = idx.iter().map(|&j| (&points[b] - &points[j]).norm()).sum();
            sa.total_cmp(&sb)
        })
        .expect("nonempty")
}

/// Best orbit point per word length, kept while the distance to `target` drops.
fn witness_steps(
    gens: &GeneratorSet,
    nodes: &[Node],
    coords: &[Option<DVector<f64>>],
    target: &DVector<f64>,
) -> Vec<WitnessStep> {
    let mut steps: Vec<WitnessStep> = Vec::new();
    let mut best = f64::INFINITY;
    let mut level_best: Option<(f64, usize)> = None;
    let mut level = 0;
    let flush = |lb: &mut Option<(f64, usize)>, best: &mut f64, steps: &mut Vec<WitnessStep>| {
        if let Some((dist, i)) = lb.take() {
            if dist < *best {
                *best = dist;
                steps.push(WitnessStep { word: gens.word_labels(&nodes[i].word), distance: dist });
            }
        }
    };
    for (i, node) in nodes.iter().enumerate() {
        if node.level != level {
            flush(&mut level_best, &mut best, &mut steps);
            level = node.level;
        }
        if let Some(y) = &coords[i] {
            let dist = (y - target).norm();
            if level_best.is_none_or(|(b, _)| dist < b) {
                level_best = Some((dist, i));
            }
        }
    }
    flush(&mut level_best, &mut best, &mut steps);
    steps
}

/// Boundary accumulation points of the orbit of `x0` within a node budget.
pub fn limit_set_estimate(d: &ConvexDomain, gens: &GeneratorSet, x0: &DVector<f64>, budget: usize) -> Result<LimitSetEstimate> {
    limit_set_estimate_with(d, gens, x0, budget, LIMIT_EPSILON)
}

pub fn limit_set_estimate_with(
    d: &ConvexDomain,
    gens: &GeneratorSet,
    x0: &DVector<f64>,
    budget: usize,
    epsilon: f64,
) -> Result<LimitSetEstimate> {
    check_inputs(d, gens, x0)?;
    let chart = WorkingChart::new(d)?;
    let nodes = explore(gens, x0, usize::MAX, budget.max(1));
    let places: Vec<Place> = nodes.par_iter().map(|n| chart.locate(&n.h, epsilon)).collect();

    let mut near = Vec::new();
    let mut near_idx = Vec::new();
    let mut far = Vec::new();
    let mut far_idx = Vec::new();
    let mut outside = 0;
    for (i, p) in places.iter().enumerate() {
        match p {
            Place::Near { y, .. } => {
                near.push(y.clone());
                near_idx.push(i);
            }
            Place::Infinity { u } => {
                far.push(u.clone());
                far_idx.push(i);
            }
            Place::Outside => outside += 1,
            Place::Interior => {}
        }
    }
    let finite_coords: Vec<Option<DVector<f64>>> = places
        .iter()
        .zip(&nodes)
        .map(|(p, n)| match p {
            Place::Infinity { .. } | Place::Outside => None,
            _ => chart.coords(&n.h),
        })
        .collect();
    let direction_coords: Vec<Option<DVector<f64>>> = places
        .iter()
        .map(|p| match p {
            Place::Infinity { u } => Some(u.clone()),
            _ => None,
        })
        .collect();

    let build = |pts: &[DVector<f64>], idx: &[usize], coords: &[Option<DVector<f64>>]| -> Vec<Cluster> {
        let groups = single_linkage(pts, 3.0 * epsilon);
        groups
            .par_iter()
            .filter(|g| g.len() >= MIN_MULTIPLICITY)
            .map(|g| {
                let m = medoid(pts, g);
                let node = &nodes[idx[m]];
                let gap = match &places[idx[m]] {
                    Place::Near { gap, .. } => *gap,
                    _ => 0.0,
                };
                Cluster {
                    representative: node.h.as_slice().to_vec(),
                    chart_point: pts[m].as_slice().to_vec(),
                    multiplicity: g.len(),
                    gap,
                    word: gens.word_labels(&node.word),
                    witness: witness_steps(gens, &nodes, coords, &pts[m]),
                    members: g.iter().map(|&k| pts[k].clone()).collect(),
                }
            })
            .collect()
    };
    let clusters = build(&near, &near_idx, &finite_coords);
    let directions = build(&far, &far_idx, &direction_coords);
    Ok(LimitSetEstimate {
        epsilon,
        budget,
        explored: nodes.len(),
        levels: nodes.last().map_or(0, |n| n.level),
        bounded_chart: chart.chart.is_some(),
        outside,
        clusters,
        directions,
        chart: chart.chart,
    })
}

/// Largest distance from `g(ξ)` to the estimate, over cluster medoids `ξ`;
/// infinite when an image has no cluster of its kind to land near.
pub fn invariance_check(estimate: &LimitSetEstimate, g: &ProjMap) -> f64 {
    let nearest = |y: &DVector<f64>, set: &[Cluster]| {
        set.iter()
            .flat_map(|c| c.members.iter())
            .map(|m| (m - y).norm())
            .fold(f64::INFINITY, f64::min)
    };
    let reps = estimate.clusters.iter().chain(&estimate.directions);
    let mut worst: f64 = 0.0;
    for c in reps {
        let h = g.matrix() * DVector::from_column_slice(&c.representative);
        let Some(h) = canonical(h) else {
            return f64::INFINITY;
        };
        let coords = match &estimate.chart {
            Some(ch) => dehomogenize(&(ch.matrix() * &h)),
            None => dehomogenize(&h),
        };
        let n = h.len() - 1;
        let dist = match coords {
            Some(y) if estimate.chart.is_some() || y.norm() <= 1.0 / estimate.epsilon => nearest(&y, &estimate.clusters),
            Some(y) => {
                let norm = y.norm();
                nearest(&(y / norm), &estimate.directions)
            }
            None => {
                let u = h.rows(0, n).into_owned();
                let norm = u.norm();
                nearest(&(u / norm), &estimate.directions)
            }
        };
        worst = worst.max(dist);
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct HullReport {
    pub samples: usize,
    pub covered: usize,
    pub fraction: f64,
    pub tolerance: f64,
}

/// Tolerance on the residual of the hull membership program.
pub const HULL_TOL: f64 = 1e-6;

/// Whether `x` is a convex combination of `points` plus a nonnegative
/// combination of `directions`, up to `tol` in the l1 residual.
pub fn in_hull(points: &[DVector<f64>], directions: &[DVector<f64>], x: &DVector<f64>, tol: f64) -> bool {
    if points.is_empty() {
        return false;
    }
    let n = x.len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let lam: Vec<_> = points.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let mu: Vec<_> = directions.iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let slack: Vec<_> = (0..2 * n).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let ones: Vec<_> = lam.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(&ones[..], ComparisonOp::Eq, 1.0);
    for k in 0..n {
        let mut row: Vec<_> = lam.iter().zip(points).map(|(&v, p)| (v, p[k])).collect();
        row.extend(mu.iter().zip(directions).map(|(&v, u)| (v, u[k])));
        row.push((slack[2 * k], 1.0));
        row.push((slack[2 * k + 1], -1.0));
        lp.add_constraint(&row[..], ComparisonOp::Eq, x[k]);
    }
    match lp.solve() {
        Ok(sol) => sol.objective() <= tol * (1.0 + x.norm()),
        Err(_) => false,
    }
}

/// Fraction of sampled interior points lying in the hull of the cluster
/// medoids together with the directions at infinity.
pub fn hull_closure_check(d: &ConvexDomain, estimate: &LimitSetEstimate, sample_budget: usize, seed: u64) -> Result<HullReport> {
    let mut rng = substream(seed, 51);
    let samples: Vec<DVector<f64>> = d
        .sample_interior(&mut rng, sample_budget, 10.0)
        .iter()
        .filter_map(|x| estimate.chart_coords(x))
        .collect();
    let points: Vec<DVector<f64>> = estimate.clusters.iter().map(|c| DVector::from_column_slice(&c.chart_point)).collect();
    let directions: Vec<DVector<f64>> = estimate.directions.iter().map(|c| DVector::from_column_slice(&c.chart_point)).collect();
    let covered = samples.par_iter().filter(|x| in_hull(&points, &directions, x, HULL_TOL)).count();
    let total = samples.len();
    Ok(HullReport {
        samples: total,
        covered,
        fraction: if total == 0 { 0.0 } else { covered as f64 / total as f64 },
        tolerance: HULL_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn diag(x: &[f64]) -> ProjMap {
        ProjMap::diagonal(x).unwrap()
    }

    fn quadrant() -> ConvexDomain {
        ConvexDomain::polytope(&[(v(&[1.0, 0.0]), 0.0), (v(&[0.0, 1.0]), 0.0)], Some(v(&[1.0, 1.0]))).unwrap()
    }

    /// The projective triangle `x, y, z > 0` seen in the chart `z = 1`, with
    /// the bounded chart `x + y + z = 1`.
    fn triangle() -> ConvexDomain {
        quadrant().with_bounded_chart(hyperplane_chart(&[1.0, 1.0, 1.0]).unwrap())
    }

    fn ray() -> ConvexDomain {
        ConvexDomain::polytope(&[(v(&[1.0]), 0.0)], Some(v(&[1.0]))).unwrap()
    }

    #[test]
    fn inverses_are_appended_once() {
        let g = GeneratorSet::from_maps(vec![diag(&[2.0, 1.0, 1.0]), diag(&[1.0, 2.0, 1.0])]).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.labels()[2], "g1^-1");
        for i in 0..4 {
            assert_eq!(g.inverse_of(g.inverse_of(i)), i);
        }
        let both = GeneratorSet::from_maps(vec![diag(&[2.0, 1.0]), diag(&[0.5, 1.0])]).unwrap();
        assert_eq!(both.len(), 2);
        assert_eq!(both.inverse_of(0), 1);
    }

    #[test]
    fn quadrant_orbit_is_a_lattice_diamond() {
        let g = GeneratorSet::from_maps(vec![diag(&[2.0, 1.0, 1.0]), diag(&[1.0, 2.0, 1.0])]).unwrap();
        let o = orbit(&quadrant(), &g, &v(&[1.0, 1.0]), 3).unwrap();
        assert_eq!(o.points.len(), 25);
        assert!(o.violations.is_empty());
        for p in &o.points {
            let x = p.affine.as_ref().unwrap();
            let (a, b) = (x[0].log2().round(), x[1].log2().round());
            assert!((x[0] - a.exp2()).abs() < 1e-12 && (x[1] - b.exp2()).abs() < 1e-12);
            assert!(a.abs() + b.abs() <= 3.0);
        }
    }

    #[test]
    fn empty_generators_and_hyperbolic_axis() {
        let empty = GeneratorSet::new(Vec::new(), Vec::new()).unwrap();
        let o = orbit(&quadrant(), &empty, &v(&[1.0, 1.0]), 4).unwrap();
        assert_eq!(o.points.len(), 1);

        let g = GeneratorSet::from_maps(vec![diag(&[2.0, 2.0, 0.25])]).unwrap();
        let o = orbit(&triangle(), &g, &v(&[1.0, 1.0]), 5).unwrap();
        assert_eq!(o.points.len(), 11);
        for p in &o.points {
            let x = p.affine.as_ref().unwrap();
            assert!((x[0] - x[1]).abs() < 1e-9 * x[0]);
        }
    }

    #[test]
    fn orbit_flags_non_preserving_generators() {
        let shift = ProjMap::from_rows(&[vec![1.0, -3.0], vec![0.0, 1.0]]).unwrap();
        let g = GeneratorSet::from_maps(vec![shift]).unwrap();
        let o = orbit(&ray(), &g, &v(&[1.0]), 1).unwrap();
        assert_eq!(o.violations.len(), 1);
    }

    #[test]
    fn ray_limit_set_is_the_origin() {
        let g = GeneratorSet::from_maps(vec![diag(&[0.5, 1.0])]).unwrap();
        let est = limit_set_estimate(&ray(), &g, &v(&[1.0]), 200).unwrap();
        assert_eq!(est.clusters.len(), 1, "{:?}", est.clusters);
        assert!(est.clusters[0].chart_point[0].abs() < LIMIT_EPSILON);
        assert_eq!(est.directions.len(), 1);
        assert!(est.directions[0].chart_point[0] > 0.0);
        assert!(invariance_check(&est, &diag(&[3.0, 1.0])) < 1e-6);
        let w = &est.clusters[0].witness;
        assert!(w.windows(2).all(|p| p[1].distance < p[0].distance));
        assert!(w.last().unwrap().distance < LIMIT_EPSILON);
        let hull = hull_closure_check(&ray(), &est, 50, 0).unwrap();
        assert_eq!(hull.fraction, 1.0);
    }

    #[test]
    fn quadrant_hyperbolic_limits_lie_on_axes() {
        let g = GeneratorSet::from_maps(vec![diag(&[2.0, 0.5, 1.0]), diag(&[0.5, 2.0, 1.0])]).unwrap();
        let d = triangle();
        let est = limit_set_estimate(&d, &g, &v(&[1.0, 1.0]), 500).unwrap();
        assert_eq!(est.clusters.len(), 2);
        for c in &est.clusters {
            let y = &c.chart_point;
            assert!(y[0].abs() < 1e-5 || y[1].abs() < 1e-5, "{y:?}");
        }
        assert!(invariance_check(&est, &diag(&[3.0, 1.0 / 3.0, 1.0])) < 1e-6);
    }

    #[test]
    fn triangle_limit_set_is_permutation_invariant() {
        let g = GeneratorSet::from_maps(vec![diag(&[2.0, 1.0, 1.0]), diag(&[1.0, 2.0, 1.0]), diag(&[1.0, 1.0, 2.0])]).unwrap();
        let d = triangle();
        let est = limit_set_estimate(&d, &g, &v(&[1.0, 1.0]), 3000).unwrap();
        assert!(!est.is_empty());
        let cyc = ProjMap::from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]).unwrap();
        let swap = ProjMap::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert!(invariance_check(&est, &cyc) < 1e-6);
        assert!(invariance_check(&est, &swap) < 1e-6);
        let vertices = [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
        for p in vertices {
            assert!(est.clusters.iter().any(|c| (c.chart_point[0] - p[0]).abs() + (c.chart_point[1] - p[1]).abs() < 1e-5));
        }
        let hull = hull_closure_check(&d, &est, 100, 3).unwrap();
        assert_eq!(hull.fraction, 1.0);
    }

    #[test]
    fn rotation_of_disk_has_empty_limit_set() {
        let (s, c) = 1f64.sin_cos();
        let rot = ProjMap::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let g = GeneratorSet::from_maps(vec![rot]).unwrap();
        let est = limit_set_estimate(&ConvexDomain::unit_disk(), &g, &v(&[0.5, 0.0]), 500).unwrap();
        assert!(est.is_empty());
        assert!(est.explored > 100);
    }

    #[test]
    fn parabola_hull_is_covered() {
        let e = catalog::get("iii").unwrap();
        let est = limit_set_estimate(&e.domain, &GeneratorSet::for_entry(&e), e.domain.basepoint(), 70000).unwrap();
        assert!(!est.is_empty());
        let hull = hull_closure_check(&e.domain, &est, 200, 0).unwrap();
        assert!(hull.fraction >= 0.99, "{hull:?}");
    }
}
