//! Convex domains given by membership oracles in the affine chart `R^n`,
//! with boundary probing, faces, supporting hyperplanes and convex sums.

use std::fmt;
use std::sync::Arc;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{orthonormal_complement, orthonormalize, sorted_svd};
use crate::optimize::nelder_mead;
use crate::projective::{Hyperplane, ProjMap, ProjPoint};
use crate::sampling::unit_vector;

/// A ray whose exit parameter exceeds this bound, in units of `1 + |x|` for
/// the starting point `x`, is a recession direction.
pub const ESCAPE_BOUND: f64 = 1e9;
/// Distance along the basepoint ray within which membership must flip for a
/// point to count as a boundary point.
pub const BOUNDARY_TOL: f64 = 1e-9;

pub type Membership = Arc<dyn Fn(&DVector<f64>) -> bool + Send + Sync>;
/// Outward normal at a boundary point, when known in closed form.
pub type NormalField = Arc<dyn Fn(&DVector<f64>) -> Option<DVector<f64>> + Send + Sync>;
type ScalarField = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
type VectorField = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// Smooth constraint `c(x) > 0` with its gradient.
#[derive(Clone)]
pub struct Constraint {
    value: ScalarField,
    gradient: VectorField,
}

impl Constraint {
    pub fn new(
        value: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { value: Arc::new(value), gradient: Arc::new(gradient) }
    }

    /// `a . x + b > 0`.
    pub fn linear(a: DVector<f64>, b: f64) -> Self {
        let a2 = a.clone();
        Self::new(move |x| a.dot(x) + b, move |_| a2.clone())
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.gradient)(x)
    }
}

/// Open convex domain `Ω ⊂ R^n` in the affine chart `x_{n+1} = 1`.
#[derive(Clone)]
pub struct ConvexDomain {
    dim: usize,
    basepoint: DVector<f64>,
    membership: Membership,
    normal: Option<NormalField>,
    tag: String,
    bounded_chart: Option<ProjMap>,
}

impl fmt::Debug for ConvexDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexDomain")
            .field("dim", &self.dim)
            .field("basepoint", &self.basepoint.as_slice())
            .field("tag", &self.tag)
            .field("has_normal", &self.normal.is_some())
            .finish()
    }
}

/// Result of shooting a ray from an interior point.
#[derive(Debug, Clone, PartialEq)]
pub enum RayHit {
    Boundary { t: f64, point: DVector<f64> },
    Infinity,
}

impl RayHit {
    pub fn is_infinite(&self) -> bool {
        matches!(self, RayHit::Infinity)
    }

    pub fn point(&self) -> Option<&DVector<f64>> {
        match self {
            RayHit::Boundary { point, .. } => Some(point),
            RayHit::Infinity => None,
        }
    }
}

impl ConvexDomain {
    pub fn new(
        dim: usize,
        basepoint: DVector<f64>,
        membership: impl Fn(&DVector<f64>) -> bool + Send + Sync + 'static,
        tag: impl Into<String>,
    ) -> Result<Self> {
        Self::from_arc(dim, basepoint, Arc::new(membership), None, tag.into())
    }

    fn from_arc(
        dim: usize,
        basepoint: DVector<f64>,
        membership: Membership,
        normal: Option<NormalField>,
        tag: String,
    ) -> Result<Self> {
        if basepoint.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: basepoint.len() });
        }
        if !membership(&basepoint) {
            return Err(Error::InvalidInput(format!("basepoint of '{tag}' is not in the domain")));
        }
        Ok(Self { dim, basepoint, membership, normal, tag, bounded_chart: None })
    }

    /// Intersection of the sets `c_i > 0`. Outward normals at boundary points
    /// are the sum of the unit outward normals of the active constraints.
    pub fn from_constraints(
        dim: usize,
        basepoint: DVector<f64>,
        constraints: Vec<Constraint>,
        tag: impl Into<String>,
    ) -> Result<Self> {
        let cs = Arc::new(constraints);
        let cm = cs.clone();
        let membership: Membership = Arc::new(move |x: &DVector<f64>| cm.iter().all(|c| c.eval(x) > 0.0));
        let normal: NormalField = Arc::new(move |p: &DVector<f64>| {
            let scale = 1.0 + p.norm();
            let mut sum = DVector::zeros(p.len());
            let mut active = 0;
            for c in cs.iter() {
                let g = c.gradient(p);
                let gn = g.norm();
                if gn == 0.0 {
                    continue;
                }
                if (c.eval(p) / gn).abs() <= 1e-10 * scale {
                    sum -= g / gn;
                    active += 1;
                }
            }
            if active == 0 || sum.norm() < 1e-12 {
                None
            } else {
                let n = sum.norm();
                Some(sum / n)
            }
        });
        Self::from_arc(dim, basepoint, membership, Some(normal), tag.into())
    }

    /// Open Euclidean ball.
    pub fn ball(center: DVector<f64>, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidInput("radius must be positive".into()));
        }
        let n = center.len();
        let (c1, c2) = (center.clone(), center.clone());
        let c = Constraint::new(move |x| radius * radius - (x - &c1).norm_squared(), move |x| -2.0 * (x - &c2));
        Self::from_constraints(n, center, vec![c], format!("ball(r={radius})"))
    }

    pub fn unit_disk() -> Self {
        Self::ball(DVector::zeros(2), 1.0).expect("valid ball")
    }

    /// Open `l^p` ball of radius one centered at the origin (`p > 1`).
    pub fn lp_ball(dim: usize, p: f64) -> Result<Self> {
        if p <= 1.0 || dim == 0 {
            return Err(Error::InvalidInput("lp ball needs p > 1 and dim >= 1".into()));
        }
        let c = Constraint::new(
            move |x| 1.0 - x.iter().map(|v| v.abs().powf(p)).sum::<f64>(),
            move |x| x.map(|v| -p * v.signum() * v.abs().powf(p - 1.0)),
        );
        Self::from_constraints(dim, DVector::zeros(dim), vec![c], format!("lp_ball(p={p})"))
    }

    /// Polyhedron `{x : a_i . x + b_i > 0}`. Without a basepoint, a
    /// maximal-margin interior point is found by linear programming.
    pub fn polytope(inequalities: &[(DVector<f64>, f64)], basepoint: Option<DVector<f64>>) -> Result<Self> {
        let n = inequalities.first().map(|(a, _)| a.len()).ok_or_else(|| Error::InvalidInput("no inequalities".into()))?;
        if inequalities.iter().any(|(a, _)| a.len() != n) {
            return Err(Error::InvalidInput("inequalities of different dimensions".into()));
        }
        let base = match basepoint {
            Some(b) => b,
            None => chebyshev_center(inequalities)?,
        };
        let cs = inequalities.iter().map(|(a, b)| Constraint::linear(a.clone(), *b)).collect();
        Self::from_constraints(n, base, cs, "polytope")
    }

    /// Projective simplex with the given homogeneous vertices (`n + 1` vectors
    /// of length `n + 1`), seen in the affine chart.
    pub fn simplex(vertices: &[DVector<f64>]) -> Result<Self> {
        let n1 = vertices.len();
        if n1 < 2 || vertices.iter().any(|v| v.len() != n1) {
            return Err(Error::InvalidInput("simplex needs n+1 vertices in R^(n+1)".into()));
        }
        let mut v = DMatrix::zeros(n1, n1);
        for (j, c) in vertices.iter().enumerate() {
            v.set_column(j, c);
        }
        let inv = v.clone().try_inverse().ok_or_else(|| Error::Degenerate("simplex vertices are dependent".into()))?;
        let bary = &v * DVector::from_element(n1, 1.0);
        let w = bary[n1 - 1];
        if w.abs() < 1e-12 {
            return Err(Error::Degenerate("simplex barycenter lies at infinity".into()));
        }
        let sign = w.signum();
        let n = n1 - 1;
        let mut ineqs = Vec::with_capacity(n1);
        for i in 0..n1 {
            let row = inv.row(i).transpose() * sign;
            ineqs.push((row.rows(0, n).into_owned(), row[n]));
        }
        let base = bary.rows(0, n) / w;
        let mut d = Self::polytope(&ineqs, Some(base))?;
        d.tag = "simplex".into();
        Ok(d)
    }

    /// The single point `RP^0`, used as a summand in convex sums.
    pub fn point() -> Self {
        Self::new(0, DVector::zeros(0), |_| true, "point").expect("point domain")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basepoint(&self) -> &DVector<f64> {
        &self.basepoint
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn with_basepoint(mut self, basepoint: DVector<f64>) -> Result<Self> {
        if basepoint.len() != self.dim || !self.contains(&basepoint) {
            return Err(Error::NotInterior);
        }
        self.basepoint = basepoint;
        Ok(self)
    }

    pub fn has_normal_field(&self) -> bool {
        self.normal.is_some()
    }

    /// Attaches a projective map sending the domain to a bounded one.
    pub fn with_bounded_chart(mut self, chart: ProjMap) -> Self {
        self.bounded_chart = Some(chart);
        self
    }

    pub fn bounded_chart(&self) -> Option<&ProjMap> {
        self.bounded_chart.as_ref()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim && x.iter().all(|v| v.is_finite()) && (self.membership)(x)
    }

    /// Membership in the closure, tested by a tiny step toward the basepoint.
    pub fn in_closure(&self, x: &DVector<f64>) -> bool {
        if self.contains(x) {
            return true;
        }
        let d = &self.basepoint - x;
        let n = d.norm();
        if n == 0.0 {
            return false;
        }
        let step = 1e-9 * (1.0 + x.norm());
        self.contains(&(x + d * (step / n)))
    }

    pub fn membership(&self) -> Membership {
        self.membership.clone()
    }

    /// Exit parameter `sup{t : x + t u ∈ Ω}` to relative accuracy `1e-12`,
    /// or `None` past the escape bound.
    pub fn exit_time(&self, x: &DVector<f64>, u: &DVector<f64>) -> Option<f64> {
        let (mut lo, mut hi) = self.bracket(x, u)?;
        while hi - lo > 1e-12 * (1.0 + lo) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.contains(&(x + u * mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    /// Exit parameter bisected down to adjacent floating point numbers.
    pub fn exit_time_precise(&self, x: &DVector<f64>, u: &DVector<f64>) -> Option<f64> {
        let (mut lo, mut hi) = self.bracket(x, u)?;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.contains(&(x + u * mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    fn bracket(&self, x: &DVector<f64>, u: &DVector<f64>) -> Option<(f64, f64)> {
        let bound = ESCAPE_BOUND * (1.0 + x.norm());
        let mut t = 1.0;
        if !self.contains(&(x + u * t)) {
            return Some((0.0, t));
        }
        loop {
            let lo = t;
            t *= 2.0;
            if !self.contains(&(x + u * t)) {
                return Some((lo, t));
            }
            if t > bound {
                return None;
            }
        }
    }

    /// Boundary point hit by the ray `x + t u` (`u` is normalized here).
    pub fn boundary_ray(&self, x: &DVector<f64>, u: &DVector<f64>) -> Result<RayHit> {
        if x.len() != self.dim || u.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len().max(u.len()) });
        }
        if !self.contains(x) {
            return Err(Error::NotInterior);
        }
        let n = u.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput("zero direction".into()));
        }
        let u = u / n;
        Ok(match self.exit_time(x, &u) {
            Some(t) => RayHit::Boundary { t, point: x + &u * t },
            None => RayHit::Infinity,
        })
    }

    /// Signed distance from `p` to the boundary along the basepoint ray
    /// (positive outside), or `None` if that ray escapes.
    pub fn boundary_offset(&self, p: &DVector<f64>) -> Option<f64> {
        let d = p - &self.basepoint;
        let r = d.norm();
        if r == 0.0 {
            return Some(-f64::INFINITY);
        }
        let u = d / r;
        self.exit_time_precise(&self.basepoint, &u).map(|t| r - t)
    }

    pub fn check_boundary(&self, p: &DVector<f64>) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: p.len() });
        }
        match self.boundary_offset(p) {
            Some(offset) if offset.abs() <= BOUNDARY_TOL * (1.0 + p.norm()) => Ok(()),
            Some(offset) => Err(Error::NotOnBoundary { offset }),
            None => Err(Error::NotOnBoundary { offset: f64::NEG_INFINITY }),
        }
    }

    /// Boundary point obtained by pushing `x` radially from the basepoint.
    pub fn project_to_boundary(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let d = x - &self.basepoint;
        let r = d.norm();
        if r == 0.0 {
            return None;
        }
        let u = d / r;
        self.exit_time_precise(&self.basepoint, &u).map(|t| &self.basepoint + u * t)
    }

    /// Interior samples along random rays from the basepoint; escaping rays
    /// are truncated at `cap`.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R, count: usize, cap: f64) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let u = unit_vector(rng, self.dim);
            let t = self.exit_time(&self.basepoint, &u).unwrap_or(cap).min(cap);
            let s: f64 = rng.random_range(0.01..0.99);
            let x = &self.basepoint + u * (t * s);
            if self.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    /// Boundary samples from random rays that exit.
    pub fn sample_boundary<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            let u = unit_vector(rng, self.dim);
            if let Some(t) = self.exit_time_precise(&self.basepoint, &u) {
                out.push(&self.basepoint + u * t);
            }
        }
        out
    }

    /// Projective image `g(Ω)`, which must lie in the affine chart.
    pub fn transformed(&self, g: &ProjMap) -> Result<ConvexDomain> {
        if g.size() != self.dim + 1 {
            return Err(Error::DimensionMismatch { expected: self.dim + 1, got: g.size() });
        }
        let inv = g.inverse()?;
        let base = g
            .apply_affine(&self.basepoint)
            .ok_or_else(|| Error::InvalidInput("basepoint is sent to infinity".into()))?;
        let n = self.dim;
        let inner = self.membership.clone();
        let inv_m = inv.matrix().clone();
        let pull = move |y: &DVector<f64>| -> Option<DVector<f64>> {
            let h = inv_m.columns(0, n) * y + inv_m.column(n);
            let w = h[n];
            if w.abs() <= 1e-300 || !w.is_finite() {
                return None;
            }
            Some(h.rows(0, n) / w)
        };
        let pull = Arc::new(pull);
        let pm = pull.clone();
        let membership: Membership = Arc::new(move |y: &DVector<f64>| match pm(y) {
            Some(x) => inner(&x),
            None => false,
        });
        let normal = self.normal.clone().map(|field| {
            let pn = pull.clone();
            let inv_t = inv.matrix().transpose();
            let b = base.clone();
            let f: NormalField = Arc::new(move |q: &DVector<f64>| {
                let p = pn(q)?;
                let out = field(&p)?;
                let mut c = DVector::zeros(n + 1);
                c.rows_mut(0, n).copy_from(&(-&out));
                c[n] = out.dot(&p);
                let mut c2 = &inv_t * c;
                let mut bh = DVector::zeros(n + 1);
                bh.rows_mut(0, n).copy_from(&b);
                bh[n] = 1.0;
                if c2.dot(&bh) < 0.0 {
                    c2 = -c2;
                }
                let a = -c2.rows(0, n).into_owned();
                let norm = a.norm();
                if norm == 0.0 {
                    None
                } else {
                    Some(a / norm)
                }
            });
            f
        });
        let mut d = Self::from_arc(n, base, membership, normal, format!("{}*", self.tag))?;
        if let Some(chart) = &self.bounded_chart {
            d.bounded_chart = Some(chart.compose(&inv)?);
        }
        Ok(d)
    }

    /// Chart distance between images in the bounded chart, falling back to
    /// the distance of points of projective space when no chart is attached.
    pub fn chart_distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        match &self.bounded_chart {
            Some(chart) => match (chart.apply_affine(a), chart.apply_affine(b)) {
                (Some(x), Some(y)) => (x - y).norm(),
                _ => ProjPoint::from_affine(a).distance(&ProjPoint::from_affine(b)),
            },
            None => ProjPoint::from_affine(a).distance(&ProjPoint::from_affine(b)),
        }
    }

    /// Image of the domain in its bounded chart (the domain itself if none).
    pub fn in_bounded_chart(&self) -> Result<ConvexDomain> {
        match &self.bounded_chart {
            Some(chart) => {
                let mut d = self.transformed(chart)?;
                d.bounded_chart = None;
                Ok(d)
            }
            None => Ok(self.clone()),
        }
    }

    /// Approximate normal distance of `q` outside `Ω` (negative inside),
    /// measured along the basepoint ray and projected on `normal`.
    fn normal_excess(&self, q: &DVector<f64>, normal: &DVector<f64>) -> f64 {
        let d = q - &self.basepoint;
        let r = d.norm();
        if r == 0.0 {
            return -1.0;
        }
        let u = &d / r;
        match self.exit_time_precise(&self.basepoint, &u) {
            Some(t) => (r - t) * normal.dot(&u).max(1e-3),
            None => -r,
        }
    }
}

fn chebyshev_center(ineqs: &[(DVector<f64>, f64)]) -> Result<DVector<f64>> {
    let n = ineqs[0].0.len();
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<_> = (0..n).map(|_| problem.add_var(0.0, (-1e6, 1e6))).collect();
    let m = problem.add_var(1.0, (-2.0, 1.0));
    for (a, b) in ineqs {
        let norm = a.norm();
        if norm == 0.0 {
            if *b <= 0.0 {
                return Err(Error::Degenerate("empty polytope".into()));
            }
            continue;
        }
        let mut row: Vec<_> = xs.iter().zip(a.iter()).map(|(&v, &c)| (v, c / norm)).collect();
        row.push((m, -1.0));
        problem.add_constraint(&row[..], ComparisonOp::Ge, -b / norm);
    }
    let sol = problem.solve().map_err(|e| Error::Degenerate(format!("polytope interior: {e}")))?;
    if sol[m] <= 1e-12 {
        return Err(Error::Degenerate("polytope has empty interior".into()));
    }
    Ok(DVector::from_iterator(n, xs.iter().map(|&v| sol[v])))
}

/// Supporting hyperplane oriented so that the covector is positive on `Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportingHyperplane {
    /// Homogeneous covector `(c, c0)`; `c . x + c0 > 0` inside, `|c| = 1`.
    pub covector: DVector<f64>,
    pub point: DVector<f64>,
}

impl SupportingHyperplane {
    pub fn from_normal(point: &DVector<f64>, outward: &DVector<f64>) -> Self {
        let n = outward / outward.norm();
        let dim = point.len();
        let mut c = DVector::zeros(dim + 1);
        c.rows_mut(0, dim).copy_from(&(-&n));
        c[dim] = n.dot(point);
        Self { covector: c, point: point.clone() }
    }

    pub fn hyperplane(&self) -> Hyperplane {
        Hyperplane::new(self.covector.clone()).expect("nonzero covector")
    }

    pub fn outward_normal(&self) -> DVector<f64> {
        let n = self.point.len();
        -self.covector.rows(0, n).into_owned()
    }

    /// Value of the oriented affine function at `x`.
    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        let n = x.len();
        self.covector.rows(0, n).dot(x) + self.covector[n]
    }
}

/// Supporting hyperplane at a boundary point: from the closed-form normal
/// when available, otherwise a maximal-margin fit over nearby boundary points
/// certified on interior samples.
pub fn supporting_hyperplane(d: &ConvexDomain, p: &DVector<f64>) -> Result<SupportingHyperplane> {
    d.check_boundary(p)?;
    if let Some(field) = &d.normal {
        if let Some(n) = field(p) {
            return Ok(SupportingHyperplane::from_normal(p, &n));
        }
    }
    fitted_support(d, p)
}

fn fitted_support(d: &ConvexDomain, p: &DVector<f64>) -> Result<SupportingHyperplane> {
    let n = d.dim;
    let b = d.basepoint();
    let radial = p - b;
    let r = radial.norm();
    let mut dirs: Vec<DVector<f64>> = vec![-&radial / r];
    let mut rng = crate::sampling::seeded(0x5eed);
    let per_scale = 6 * n * n + 8;
    let mut near = Vec::new();
    for scale in [1e-3, 1e-2, 1e-1, 0.5] {
        for _ in 0..per_scale {
            let g = unit_vector(&mut rng, n) * (scale * r);
            let target = &radial + g;
            let u = &target / target.norm();
            if let Some(t) = d.exit_time_precise(b, &u) {
                let q = b + u * t;
                let dq = &q - p;
                let len = dq.norm();
                if len > 1e-10 * (1.0 + r) {
                    dirs.push(dq / len);
                    near.push(q);
                }
            }
        }
    }
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..n).map(|_| problem.add_var(0.0, (-1e3, 1e3))).collect();
    let m = problem.add_var(1.0, (-2.0, 1.0));
    // The outward normal has positive component along the basepoint ray.
    let unit_radial = &radial / r;
    let row: Vec<_> = vars.iter().zip(unit_radial.iter()).map(|(&v, &c)| (v, c)).collect();
    problem.add_constraint(&row[..], ComparisonOp::Eq, 1.0);
    for dv in &dirs {
        let mut row: Vec<_> = vars.iter().zip(dv.iter()).map(|(&v, &c)| (v, -c)).collect();
        row.push((m, -1.0));
        problem.add_constraint(&row[..], ComparisonOp::Ge, 0.0);
    }
    let sol = problem.solve().map_err(|e| Error::Uncertified(format!("separation fit: {e}")))?;
    let normal = DVector::from_iterator(n, vars.iter().map(|&v| sol[v]));
    if sol[m] < -1e-9 || normal.norm() < 1e-9 {
        return Err(Error::Uncertified(format!("no separating direction (margin {}, normal {})", sol[m], normal)));
    }
    let h = SupportingHyperplane::from_normal(p, &normal);
    let tol = 1e-7 * (1.0 + r);
    for q in &near {
        if h.eval(q) < -tol {
            return Err(Error::Uncertified("boundary sample on the wrong side".into()));
        }
    }
    for x in d.sample_interior(&mut rng, 200, 1e3) {
        if h.eval(&x) <= 0.0 {
            return Err(Error::Uncertified("interior sample on the wrong side".into()));
        }
    }
    Ok(h)
}

/// Parameters of the segment probe used to estimate faces.
#[derive(Debug, Clone)]
pub struct FaceProbe {
    /// Half-lengths of the probing segments.
    pub scales: Vec<f64>,
    /// A direction counts as flat at scale `e` when the two-sided excess is
    /// below `curvature_tol * e^2`.
    pub curvature_tol: f64,
    pub max_evals: usize,
}

impl Default for FaceProbe {
    fn default() -> Self {
        Self { scales: vec![1e-2, 1e-3, 1e-4], curvature_tol: 1e-5, max_evals: 240 }
    }
}

impl FaceProbe {
    pub fn smallest_scale(&self) -> f64 {
        self.scales.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Estimated face through a boundary point.
#[derive(Debug, Clone)]
pub struct FaceDescriptor {
    pub representative: ProjPoint,
    /// Points `p, p + v_1, ..., p + v_k` spanning the face.
    pub span_basis: Vec<ProjPoint>,
    pub dim: usize,
    /// Orthonormal affine directions of the face.
    pub directions: Vec<DVector<f64>>,
    pub point: DVector<f64>,
}

impl FaceDescriptor {
    /// Homogeneous basis of the projective span of the face.
    pub fn homogeneous_span(&self) -> Vec<DVector<f64>> {
        let n = self.point.len();
        let mut out = vec![ProjPoint::from_affine(&self.point).coords().clone()];
        for v in &self.directions {
            let mut h = DVector::zeros(n + 1);
            h.rows_mut(0, n).copy_from(v);
            out.push(h);
        }
        out
    }
}

struct Prober<'a> {
    d: &'a ConvexDomain,
    p: &'a DVector<f64>,
    normal: DVector<f64>,
    probe: &'a FaceProbe,
    floor: f64,
}

impl Prober<'_> {
    fn two_sided(&self, w: &DVector<f64>, eps: f64) -> f64 {
        let a = self.d.normal_excess(&(self.p + w * eps), &self.normal);
        let b = self.d.normal_excess(&(self.p - w * eps), &self.normal);
        a + b
    }

    fn flat_at(&self, w: &DVector<f64>, eps: f64) -> bool {
        self.two_sided(w, eps) < self.probe.curvature_tol * eps * eps + self.floor
    }

    fn is_flat(&self, w: &DVector<f64>) -> bool {
        self.probe.scales.iter().any(|&e| self.flat_at(w, e))
    }

    /// Smallest normalized excess over the probing scales.
    fn score(&self, w: &DVector<f64>) -> f64 {
        self.probe
            .scales
            .iter()
            .map(|&e| (self.two_sided(w, e) - self.floor).max(0.0) / (e * e))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Estimates the face of `Ω` containing the boundary point `p`.
pub fn face_of(d: &ConvexDomain, p: &DVector<f64>) -> Result<FaceDescriptor> {
    face_of_with(d, p, &FaceProbe::default())
}

pub fn face_of_with(d: &ConvexDomain, p: &DVector<f64>, probe: &FaceProbe) -> Result<FaceDescriptor> {
    let support = supporting_hyperplane(d, p)?;
    let normal = support.outward_normal();
    let n = d.dim;
    let tangent = orthonormal_complement(&[normal.clone()], n);
    let floor = 64.0 * f64::EPSILON * (1.0 + (p - d.basepoint()).norm() + p.norm());
    let prober = Prober { d, p, normal, probe, floor };
    let mut accepted: Vec<DVector<f64>> = Vec::new();
    while accepted.len() < tangent.len() {
        let mut basis: Vec<DVector<f64>> = accepted.clone();
        basis.extend(tangent.iter().cloned());
        let complement: Vec<DVector<f64>> = orthonormalize(&basis, 1e-8).split_off(accepted.len());
        if complement.is_empty() {
            break;
        }
        match best_flat_direction(&prober, &complement) {
            Some(w) => accepted.push(w),
            None => break,
        }
    }
    let representative = ProjPoint::from_affine(p);
    let mut span_basis = vec![representative.clone()];
    for v in &accepted {
        span_basis.push(ProjPoint::from_affine(&(p + v)));
    }
    Ok(FaceDescriptor { representative, span_basis, dim: accepted.len(), directions: accepted, point: p.clone() })
}

fn best_flat_direction(prober: &Prober<'_>, complement: &[DVector<f64>]) -> Option<DVector<f64>> {
    let m = complement.len();
    let combine = |a: &[f64]| -> Option<DVector<f64>> {
        let mut w = DVector::zeros(complement[0].len());
        for (c, v) in a.iter().zip(complement) {
            w += v * *c;
        }
        let norm = w.norm();
        (norm > 1e-12).then(|| w / norm)
    };
    if m == 1 {
        return prober.is_flat(&complement[0]).then(|| complement[0].clone());
    }
    // Quadratic model of the score in the complement coordinates.
    let mut diag = vec![0.0; m];
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        let mut a = vec![0.0; m];
        a[i] = 1.0;
        diag[i] = prober.score(&complement[i]);
        candidates.push(a);
    }
    let mut q = DMatrix::zeros(m, m);
    for i in 0..m {
        q[(i, i)] = diag[i];
        for j in (i + 1)..m {
            let mut a = vec![0.0; m];
            a[i] = 1.0;
            a[j] = 1.0;
            let w = combine(&a).unwrap();
            let s = prober.score(&w);
            q[(i, j)] = s - 0.5 * (diag[i] + diag[j]);
            q[(j, i)] = q[(i, j)];
            candidates.push(a.clone());
            a[j] = -1.0;
            candidates.push(a);
        }
    }
    let eig = q.symmetric_eigen();
    for k in 0..m {
        candidates.push(eig.eigenvectors.column(k).iter().copied().collect());
    }
    let mut scored: Vec<(f64, Vec<f64>)> = candidates
        .into_iter()
        .filter_map(|a| combine(&a).map(|w| (prober.score(&w), a)))
        .collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (_, a) in scored.iter().take(3) {
        let w = combine(a).unwrap();
        if prober.is_flat(&w) {
            return Some(w);
        }
        let objective = |c: &[f64]| match combine(c) {
            Some(w) => prober.score(&w),
            None => f64::INFINITY,
        };
        let (best, _) = nelder_mead(objective, a, 0.25, prober.probe.max_evals, 1e-12);
        if let Some(w) = combine(&best) {
            if prober.is_flat(&w) {
                return Some(w);
            }
        }
    }
    None
}

pub fn is_extreme(d: &ConvexDomain, p: &DVector<f64>) -> Result<bool> {
    Ok(face_of(d, p)?.dim == 0)
}

pub fn is_extreme_with(d: &ConvexDomain, p: &DVector<f64>, probe: &FaceProbe) -> Result<bool> {
    Ok(face_of_with(d, p, probe)?.dim == 0)
}

/// Outcome of the conic-face search.
#[derive(Debug, Clone)]
pub struct ConicCertificate {
    pub conic: bool,
    /// Supporting hyperplanes containing the face with strictly descending
    /// intersections.
    pub chain: Vec<Hyperplane>,
    pub examined: usize,
    pub reason: String,
}

/// Searches for `n - k` independent supporting hyperplanes containing the
/// span of the face, among those supporting at boundary points near it.
pub fn is_conic_face(d: &ConvexDomain, f: &FaceDescriptor) -> ConicCertificate {
    is_conic_face_with_budget(d, f, 10_000)
}

pub fn is_conic_face_with_budget(d: &ConvexDomain, f: &FaceDescriptor, budget: usize) -> ConicCertificate {
    let n = d.dim;
    let needed = n.saturating_sub(f.dim);
    let span = f.homogeneous_span();
    let mut chain_cov: Vec<DVector<f64>> = Vec::new();
    let mut chain = Vec::new();
    let mut examined = 0;
    let p = &f.point;
    let b = d.basepoint();
    let radial = p - b;
    let r = radial.norm();
    let mut rng = crate::sampling::seeded(0xc0_11c);

    let consider = |h: SupportingHyperplane, chain_cov: &mut Vec<DVector<f64>>, chain: &mut Vec<Hyperplane>| {
        let c = &h.covector / h.covector.norm();
        let contains = span.iter().all(|s| c.dot(s).abs() <= 1e-9 * s.norm());
        if !contains {
            return;
        }
        let mut resid = c.clone();
        for _ in 0..2 {
            for e in chain_cov.iter() {
                let k = e.dot(&resid);
                resid -= e * k;
            }
        }
        let rn = resid.norm();
        if rn > 1e-2 {
            chain_cov.push(resid / rn);
            chain.push(h.hyperplane());
        }
    };

    if needed == 0 {
        return ConicCertificate { conic: true, chain, examined, reason: "face is open in the domain".into() };
    }
    match supporting_hyperplane(d, p) {
        Ok(h) => {
            examined += 1;
            consider(h, &mut chain_cov, &mut chain);
        }
        Err(e) => {
            return ConicCertificate { conic: false, chain, examined, reason: format!("no support at p: {e}") };
        }
    }
    let scales = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 0.3];
    let mut k = 0;
    while chain_cov.len() < needed && examined < budget {
        let scale = scales[k % scales.len()];
        k += 1;
        let target = &radial + unit_vector(&mut rng, n) * (scale * r.max(1e-3));
        let u = &target / target.norm();
        let Some(t) = d.exit_time_precise(b, &u) else { continue };
        let q = b + u * t;
        examined += 1;
        if let Ok(h) = supporting_hyperplane(d, &q) {
            consider(h, &mut chain_cov, &mut chain);
        }
    }
    let conic = chain_cov.len() >= needed;
    let reason = if conic {
        format!("{} independent supporting hyperplanes contain the face", chain_cov.len())
    } else {
        format!("found {} of {} supporting hyperplanes within budget", chain_cov.len(), needed)
    };
    chain.truncate(needed);
    ConicCertificate { conic, chain, examined, reason }
}

/// A domain together with an embedding of its projective chart: column `j`
/// of `embedding` is the image of the `j`-th homogeneous basis vector.
#[derive(Debug, Clone)]
pub struct EmbeddedDomain {
    pub domain: ConvexDomain,
    pub embedding: DMatrix<f64>,
}

impl EmbeddedDomain {
    pub fn new(domain: ConvexDomain, embedding: DMatrix<f64>) -> Result<Self> {
        if embedding.ncols() != domain.dim() + 1 {
            return Err(Error::DimensionMismatch { expected: domain.dim() + 1, got: embedding.ncols() });
        }
        Ok(Self { domain, embedding })
    }

    /// A single point of `RP^N` given by a homogeneous vector.
    pub fn point(coords: DVector<f64>) -> Self {
        let n = coords.len();
        Self { domain: ConvexDomain::point(), embedding: DMatrix::from_column_slice(n, 1, coords.as_slice()) }
    }

    fn lift(&self, x: &DVector<f64>) -> DVector<f64> {
        let k = x.len();
        let mut h = DVector::zeros(k + 1);
        h.rows_mut(0, k).copy_from(x);
        h[k] = 1.0;
        &self.embedding * h
    }
}

/// Convex sum `Ω₁ ∔ Ω₂` of two domains with disjoint projective supports
/// that together span `RP^N`.
pub fn convex_sum(a: &EmbeddedDomain, b: &EmbeddedDomain) -> Result<ConvexDomain> {
    let n1 = a.embedding.nrows();
    if b.embedding.nrows() != n1 {
        return Err(Error::DimensionMismatch { expected: n1, got: b.embedding.nrows() });
    }
    let (k1, k2) = (a.embedding.ncols(), b.embedding.ncols());
    let mut joint = DMatrix::zeros(n1, k1 + k2);
    joint.columns_mut(0, k1).copy_from(&a.embedding);
    joint.columns_mut(k1, k2).copy_from(&b.embedding);
    let svd = sorted_svd(&joint);
    let rank = crate::linalg::numerical_rank(&svd.singular_values, 1e-9);
    if rank < k1 + k2 {
        return Err(Error::OverlappingSupports);
    }
    if k1 + k2 != n1 {
        return Err(Error::InvalidInput("summands must span the ambient projective space".into()));
    }
    let inv = joint.try_inverse().ok_or(Error::OverlappingSupports)?;
    let (d1, d2) = (a.domain.clone(), b.domain.clone());
    let n = n1 - 1;
    let inv_c = inv.clone();
    let member = move |x: &DVector<f64>| -> bool {
        let mut h = DVector::zeros(n + 1);
        h.rows_mut(0, n).copy_from(x);
        h[n] = 1.0;
        let coef = &inv_c * h;
        let l1 = coef[k1 - 1];
        let l2 = coef[k1 + k2 - 1];
        if !(l1 * l2 > 0.0) {
            return false;
        }
        let alpha = coef.rows(0, k1 - 1) / l1;
        let beta = coef.rows(k1, k2 - 1) / l2;
        d1.contains(&alpha.into_owned()) && d2.contains(&beta.into_owned())
    };
    let ha = a.lift(a.domain.basepoint());
    let hb = b.lift(b.domain.basepoint());
    let mut base = None;
    for s in [0.5, 0.25, 0.75, 0.1, 0.9] {
        for sign in [1.0, -1.0] {
            let h: DVector<f64> = &ha * (1.0 - s) + &hb * (s * sign);
            if h[n].abs() > 1e-9 * h.norm() {
                let x = h.rows(0, n) / h[n];
                if member(&x) {
                    base = Some(x.into_owned());
                    break;
                }
            }
        }
        if base.is_some() {
            break;
        }
    }
    let base = base.ok_or_else(|| Error::Degenerate("convex sum does not meet the affine chart".into()))?;
    ConvexDomain::new(n, base, member, format!("{}+{}", a.domain.tag(), b.domain.tag()))
}

/// Checks on samples that `g` and its inverse map `Ω` into itself.
pub fn check_preserves(d: &ConvexDomain, g: &ProjMap, samples: &[DVector<f64>]) -> Result<()> {
    if g.size() != d.dim() + 1 {
        return Err(Error::DimensionMismatch { expected: d.dim() + 1, got: g.size() });
    }
    let inv = g.inverse()?;
    for x in samples {
        for (h, label) in [(g, "image"), (&inv, "preimage")] {
            match h.apply_affine(x) {
                Some(y) if d.contains(&y) => {}
                _ => {
                    return Err(Error::NotPreserved(format!(
                        "{label} of {:?} leaves the domain",
                        x.as_slice()
                    )))
                }
            }
        }
    }
    Ok(())
}

/// Sampled proper-convexity test: no line through the basepoint stays in `Ω`.
pub fn is_properly_convex<R: Rng + ?Sized>(d: &ConvexDomain, direction_budget: usize, rng: &mut R) -> bool {
    let n = d.dim;
    let b = d.basepoint();
    let both_escape = |u: &DVector<f64>| d.exit_time(b, u).is_none() && d.exit_time(b, &(-u)).is_none();
    let mut grid: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        grid.push(e.clone());
        for j in (i + 1)..n {
            let mut f = e.clone();
            f[j] = 1.0;
            grid.push(&f / f.norm());
            f[j] = -1.0;
            grid.push(&f / f.norm());
        }
    }
    for _ in 0..direction_budget {
        grid.push(unit_vector(rng, n));
    }
    if grid.iter().any(|u| both_escape(u)) {
        return false;
    }
    // Refine the directions along which both rays travel farthest.
    let reach = |u: &DVector<f64>| -> f64 {
        let a = d.exit_time(b, u).map_or(0.0, |t| 1.0 / t);
        let c = d.exit_time(b, &(-u)).map_or(0.0, |t| 1.0 / t);
        a + c
    };
    let mut scored: Vec<(f64, DVector<f64>)> = grid.into_iter().map(|u| (reach(&u), u)).collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (_, u) in scored.iter().take(3) {
        let objective = |a: &[f64]| {
            let v = DVector::from_column_slice(a);
            let nv = v.norm();
            if nv < 1e-12 {
                f64::INFINITY
            } else {
                reach(&(v / nv))
            }
        };
        let (best, val) = nelder_mead(objective, u.as_slice(), 0.1, 400, 1e-14);
        if val == 0.0 {
            let v = DVector::from_vec(best);
            if both_escape(&(&v / v.norm())) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn triangle() -> ConvexDomain {
        ConvexDomain::polytope(
            &[(v(&[1.0, 0.0]), 0.0), (v(&[0.0, 1.0]), 0.0), (v(&[-1.0, -1.0]), 1.0)],
            Some(v(&[1.0 / 3.0, 1.0 / 3.0])),
        )
        .unwrap()
    }

    #[test]
    fn boundary_ray_examples() {
        let disk = ConvexDomain::unit_disk();
        let hit = disk.boundary_ray(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])).unwrap();
        assert!((hit.point().unwrap() - v(&[1.0, 0.0])).norm() < 1e-11);

        let q = quadrant();
        assert!(q.boundary_ray(&v(&[1.0, 1.0]), &v(&[1.0, 0.0])).unwrap().is_infinite());

        let p = parabola();
        let hit = p.boundary_ray(&v(&[0.0, 1.0]), &v(&[0.0, -1.0])).unwrap();
        assert!(hit.point().unwrap().norm() < 1e-11);

        assert!(matches!(disk.boundary_ray(&v(&[2.0, 0.0]), &v(&[1.0, 0.0])), Err(Error::NotInterior)));
    }

    #[test]
    fn faces_of_triangle() {
        let t = triangle();
        let mid = v(&[0.5, 0.0]);
        let f = face_of(&t, &mid).unwrap();
        assert_eq!(f.dim, 1);
        assert!(f.directions[0][1].abs() < 1e-6);
        assert!(is_extreme(&t, &v(&[0.0, 0.0])).unwrap());
        assert!(is_extreme(&t, &v(&[1.0, 0.0])).unwrap());
        assert!(!is_extreme(&t, &mid).unwrap());
    }

    #[test]
    fn faces_of_disk_and_quadrant() {
        let disk = ConvexDomain::unit_disk();
        for k in 0..8 {
            let a = k as f64 * 0.7;
            assert_eq!(face_of(&disk, &v(&[a.cos(), a.sin()])).unwrap().dim, 0);
        }
        let q = quadrant();
        assert_eq!(face_of(&q, &v(&[1.0, 0.0])).unwrap().dim, 1);
        assert!(matches!(face_of(&q, &v(&[1.0, 1.0])), Err(Error::NotOnBoundary { .. })));
    }

    #[test]
    fn parabola_points_are_extreme() {
        let p = parabola();
        for t in [-2.0, -0.5, 0.0, 0.3, 1.0, 3.0] {
            let q = p.project_to_boundary(&v(&[t, t * t])).unwrap();
            assert!(is_extreme(&p, &q).unwrap(), "t = {t}");
        }
    }

    #[test]
    fn supporting_hyperplane_examples() {
        let disk = ConvexDomain::unit_disk();
        let h = supporting_hyperplane(&disk, &v(&[1.0, 0.0])).unwrap();
        let expected = Hyperplane::from_slice(&[1.0, 0.0, -1.0]).unwrap();
        assert!((h.hyperplane().covector() - expected.covector()).norm() < 1e-9);

        let p = parabola();
        let h = supporting_hyperplane(&p, &v(&[0.0, 0.0])).unwrap();
        assert!((h.covector.clone() - v(&[0.0, 1.0, 0.0])).norm() < 1e-9);

        let q = quadrant();
        let h = supporting_hyperplane(&q, &v(&[1.0, 0.0])).unwrap();
        assert!((h.covector.clone() - v(&[0.0, 1.0, 0.0])).norm() < 1e-9);
    }

    #[test]
    fn fitted_support_on_oracle_disk() {
        let disk = ConvexDomain::new(2, v(&[0.0, 0.0]), |x| x.norm_squared() < 1.0, "oracle disk").unwrap();
        let h = supporting_hyperplane(&disk, &v(&[0.0, 1.0])).unwrap();
        assert!((h.outward_normal() - v(&[0.0, 1.0])).norm() < 1e-2);
        let sq = ConvexDomain::new(2, v(&[0.0, 0.0]), |x| x[0].abs() < 1.0 && x[1].abs() < 1.0, "square").unwrap();
        let h = supporting_hyperplane(&sq, &v(&[1.0, 0.3])).unwrap();
        assert!((h.outward_normal() - v(&[1.0, 0.0])).norm() < 1e-6);
    }

    #[test]
    fn conic_faces() {
        let t = triangle();
        let f = face_of(&t, &v(&[0.0, 0.0])).unwrap();
        let cert = is_conic_face(&t, &f);
        assert!(cert.conic, "{}", cert.reason);
        assert_eq!(cert.chain.len(), 2);

        let disk = ConvexDomain::unit_disk();
        let f = face_of(&disk, &v(&[1.0, 0.0])).unwrap();
        assert!(!is_conic_face_with_budget(&disk, &f, 400).conic);

        let f = face_of(&t, &v(&[0.5, 0.0])).unwrap();
        assert!(is_conic_face(&t, &f).conic);
    }

    #[test]
    fn segment_plus_point_is_triangle() {
        // Segment between e1 and e2 in RP^2, summed with e3.
        let seg = ConvexDomain::new(1, v(&[0.5]), |x| x[0] > 0.0 && x[0] < 1.0, "segment").unwrap();
        let emb = DMatrix::from_column_slice(3, 2, &[1.0, -1.0, 0.0, 0.0, 1.0, 0.0]);
        let a = EmbeddedDomain::new(seg, emb).unwrap();
        let b = EmbeddedDomain::point(v(&[0.0, 0.0, 1.0]));
        let sum = convex_sum(&a, &b).unwrap();
        // Vertices (0,1,0) [s=0], (1,0,0) [s=1] at infinity and (0,0,1): the quadrant.
        for (x, inside) in [([1.0, 1.0], true), ([0.1, 5.0], true), ([-0.1, 1.0], false), ([1.0, -0.1], false)] {
            assert_eq!(sum.contains(&v(&x)), inside, "{x:?}");
        }
    }

    #[test]
    fn point_plus_point_is_segment() {
        let a = EmbeddedDomain::point(v(&[0.0, 1.0]));
        let b = EmbeddedDomain::point(v(&[1.0, 1.0]));
        let sum = convex_sum(&a, &b).unwrap();
        assert!(sum.contains(&v(&[0.5])));
        assert!(!sum.contains(&v(&[1.5])));
        assert!(!sum.contains(&v(&[-0.5])));
    }

    #[test]
    fn parabola_plus_point() {
        let par = EmbeddedDomain::new(
            parabola(),
            DMatrix::from_column_slice(4, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        )
        .unwrap();
        let c = EmbeddedDomain::point(v(&[0.0, 0.0, 1.0, 0.0]));
        let sum = convex_sum(&par, &c).unwrap();
        let direct = |x: &DVector<f64>| x[1] > x[0] * x[0] && x[2] > 0.0;
        let mut rng = crate::sampling::seeded(3);
        for _ in 0..500 {
            let x = crate::sampling::gaussian_vector(&mut rng, 3) * 2.0;
            assert_eq!(sum.contains(&x), direct(&x), "{x}");
        }
    }

    #[test]
    fn overlapping_supports_rejected() {
        let a = EmbeddedDomain::point(v(&[0.0, 1.0]));
        let b = EmbeddedDomain::point(v(&[0.0, 2.0]));
        assert!(matches!(convex_sum(&a, &b), Err(Error::OverlappingSupports)));
    }

    #[test]
    fn proper_convexity() {
        let mut rng = crate::sampling::seeded(1);
        assert!(is_properly_convex(&quadrant(), 64, &mut rng));
        assert!(is_properly_convex(&parabola(), 64, &mut rng));
        let slab = ConvexDomain::new(2, v(&[0.0, 0.5]), |x| x[1] > 0.0 && x[1] < 1.0, "slab").unwrap();
        assert!(!is_properly_convex(&slab, 64, &mut rng));
    }

    #[test]
    fn transformed_domain_membership_and_normals() {
        let q = quadrant();
        // Swap coordinates and map to a bounded triangle.
        let g = ProjMap::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 1.0]]).unwrap();
        let t = q.transformed(&g).unwrap();
        assert!(t.contains(&v(&[0.2, 0.2])));
        assert!(!t.contains(&v(&[0.6, 0.6])));
        let h = supporting_hyperplane(&t, &v(&[0.5, 0.5])).unwrap();
        let n = h.outward_normal();
        assert!((n - v(&[1.0, 1.0]) / 2f64.sqrt()).norm() < 1e-9);
    }

    #[test]
    fn simplex_from_vertices() {
        let s = ConvexDomain::simplex(&[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])]).unwrap();
        assert!(s.contains(&v(&[3.0, 0.1])));
        assert!(!s.contains(&v(&[-0.1, 1.0])));
        assert!((s.basepoint() - v(&[1.0, 1.0])).norm() < 1e-12);
    }

    #[test]
    fn chebyshev_center_is_interior() {
        let t = ConvexDomain::polytope(&[(v(&[1.0, 0.0]), 0.0), (v(&[0.0, 1.0]), 0.0), (v(&[-1.0, -1.0]), 1.0)], None).unwrap();
        assert!(t.contains(t.basepoint()));
    }
}
