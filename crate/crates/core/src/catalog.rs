//! The nineteen quasi-homogeneous convex domain types of dimension at most
//! four, with automorphism families, reference data and checks.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::{asymptotic_cone, grid_agreement, AsymptoticCone};
use crate::domain::{check_preserves, face_of, is_properly_convex, Constraint, ConvexDomain};
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_distance, sample_hilbert_ball};
use crate::projective::{embed_affine, hyperplane_chart, AffineMap, ProjMap};
use crate::sampling::{seeded, substream, unit_vector};

pub type FamilyFn = Arc<dyn Fn(f64) -> AffineMap + Send + Sync>;

/// One-parameter family `t -> f_t` of affine automorphisms.
#[derive(Clone)]
pub struct Family {
    pub label: String,
    map: FamilyFn,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family({})", self.label)
    }
}

impl Family {
    pub fn new(label: impl Into<String>, map: impl Fn(f64) -> AffineMap + Send + Sync + 'static) -> Self {
        Self { label: label.into(), map: Arc::new(map) }
    }

    pub fn at(&self, t: f64) -> AffineMap {
        (self.map)(t)
    }

    pub fn proj(&self, t: f64) -> ProjMap {
        embed_affine(&self.at(t))
    }
}

fn linear_map(l: DMatrix<f64>) -> AffineMap {
    let n = l.nrows();
    AffineMap::from_parts(l, DVector::zeros(n))
}

/// `diag(e^{w_1 t}, ..., e^{w_n t})`.
pub fn dilation_family(weights: &[f64]) -> Family {
    let w = weights.to_vec();
    Family::new(format!("dilation{w:?}"), move |t| {
        linear_map(DMatrix::from_diagonal(&DVector::from_iterator(w.len(), w.iter().map(|w| (w * t).exp()))))
    })
}

/// `x_i += t`, `x_j += 2 t x_i + t^2`, preserving `x_j - x_i^2`.
pub fn parabolic_shear(n: usize, i: usize, j: usize) -> Family {
    Family::new(format!("shear(x{}, x{})", i + 1, j + 1), move |t| {
        let mut l = DMatrix::identity(n, n);
        l[(j, i)] = 2.0 * t;
        let mut tr = DVector::zeros(n);
        tr[i] = t;
        tr[j] = t * t;
        AffineMap::from_parts(l, tr)
    })
}

pub fn rotation_family(n: usize, i: usize, j: usize) -> Family {
    Family::new(format!("rotation(x{}, x{})", i + 1, j + 1), move |t| {
        let (s, c) = t.sin_cos();
        let mut l = DMatrix::identity(n, n);
        l[(i, i)] = c;
        l[(i, j)] = -s;
        l[(j, i)] = s;
        l[(j, j)] = c;
        linear_map(l)
    })
}

/// Lorentz boost mixing the space coordinate `i` with the time coordinate `j`.
pub fn boost_family(n: usize, i: usize, j: usize) -> Family {
    Family::new(format!("boost(x{}, x{})", i + 1, j + 1), move |t| {
        let (s, c) = (t.sinh(), t.cosh());
        let mut l = DMatrix::identity(n, n);
        l[(i, i)] = c;
        l[(i, j)] = s;
        l[(j, i)] = s;
        l[(j, j)] = c;
        linear_map(l)
    })
}

/// `(x1, x2 + 2t x4 + t^2 x3, x3, x4 + t x3)`, preserving `(x2 - x1^2) x3 - x4^2`.
pub fn xi_shift_family() -> Family {
    Family::new("shift(x3 -> x2, x4)", |t| {
        let mut l = DMatrix::identity(4, 4);
        l[(1, 3)] = 2.0 * t;
        l[(1, 2)] = t * t;
        l[(3, 2)] = t;
        linear_map(l)
    })
}

/// Structural flags of a catalog type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub homogeneous: bool,
    pub cone: bool,
    pub strictly_convex: bool,
    pub decomposable: bool,
    pub placeholder: bool,
}

pub type DirectionPredicate = Arc<dyn Fn(&DVector<f64>) -> bool + Send + Sync>;

/// Reference asymptotic cone of an entry.
#[derive(Clone)]
pub struct KnownCone {
    pub dim: usize,
    /// Coordinate basis of the linear span.
    pub span: Vec<DVector<f64>>,
    pub description: String,
    member: DirectionPredicate,
}

impl fmt::Debug for KnownCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KnownCone").field("dim", &self.dim).field("description", &self.description).finish()
    }
}

impl KnownCone {
    pub fn contains(&self, u: &DVector<f64>) -> bool {
        (self.member)(u)
    }

    /// `count` unit directions inside the span plus `count` generic ones and
    /// the signed coordinate axes.
    pub fn grid<R: Rng + ?Sized>(&self, ambient: usize, count: usize, rng: &mut R) -> Vec<DVector<f64>> {
        let mut grid = Vec::with_capacity(2 * count + 2 * ambient);
        for i in 0..ambient {
            let mut e = DVector::zeros(ambient);
            e[i] = 1.0;
            grid.push(e.clone());
            grid.push(-e);
        }
        for _ in 0..count {
            let c = unit_vector(rng, self.span.len().max(1));
            let mut u = DVector::zeros(ambient);
            for (k, b) in self.span.iter().enumerate() {
                u += b * c[k];
            }
            if u.norm() > 0.0 {
                grid.push(u);
            }
            grid.push(unit_vector(rng, ambient));
        }
        grid
    }
}

/// Boundary point reached by iterating a family from the basepoint.
#[derive(Debug, Clone)]
pub struct LimitWitness {
    pub point: DVector<f64>,
    pub family: Family,
    pub schedule: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub dim: usize,
    pub inequality: &'static str,
    pub description: &'static str,
    pub domain: ConvexDomain,
    pub families: Vec<Family>,
    pub flags: Flags,
    pub known_ac: KnownCone,
    pub limit_witness: LimitWitness,
    /// Vertex of the cone for cone entries.
    pub cone_point: Option<DVector<f64>>,
}

impl CatalogEntry {
    /// The families sampled at `t = 1`.
    pub fn generators(&self) -> Vec<AffineMap> {
        self.families.iter().map(|f| f.at(1.0)).collect()
    }

    pub fn summary(&self) -> EntrySummary {
        EntrySummary {
            id: self.id.to_string(),
            dim: self.dim,
            inequality: self.inequality.to_string(),
            description: self.description.to_string(),
            flags: self.flags,
            generators: self.families.iter().map(|f| f.label.clone()).collect(),
            known_ac: self.known_ac.description.clone(),
            known_ac_dim: self.known_ac.dim,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntrySummary {
    pub id: String,
    pub dim: usize,
    pub inequality: String,
    pub description: String,
    pub flags: Flags,
    pub generators: Vec<String>,
    pub known_ac: String,
    pub known_ac_dim: usize,
}

pub const IDS: [&str; 19] = [
    "i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "xii", "xiii", "xiv", "xv", "xvi", "xvii", "xviii",
    "xix",
];

pub const PLACEHOLDER_IDS: [&str; 4] = ["viii", "xv", "xviii", "xix"];

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn e(n: usize, i: usize) -> DVector<f64> {
    let mut u = DVector::zeros(n);
    u[i] = 1.0;
    u
}

fn positive(n: usize, i: usize) -> Constraint {
    Constraint::linear(e(n, i), 0.0)
}

/// `x_j - sum x_i^2 > 0`.
fn paraboloid(n: usize, xs: Vec<usize>, j: usize) -> Constraint {
    let xs2 = xs.clone();
    Constraint::new(
        move |x| x[j] - xs.iter().map(|&i| x[i] * x[i]).sum::<f64>(),
        move |x| {
            let mut g = e(n, j);
            for &i in &xs2 {
                g[i] = -2.0 * x[i];
            }
            g
        },
    )
}

/// `x_j - |x_xs| > 0`.
fn lorentz(n: usize, xs: Vec<usize>, j: usize) -> Constraint {
    let xs2 = xs.clone();
    Constraint::new(
        move |x| x[j] - xs.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt(),
        move |x| {
            let r = xs2.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt();
            let mut g = e(n, j);
            if r > 0.0 {
                for &i in &xs2 {
                    g[i] = -x[i] / r;
                }
            }
            g
        },
    )
}

fn xi_quadric() -> Constraint {
    Constraint::new(
        |x| (x[1] - x[0] * x[0]) * x[2] - x[3] * x[3],
        |x| v(&[-2.0 * x[0] * x[2], x[2], x[1] - x[0] * x[0], -2.0 * x[3]]),
    )
}

/// `[[I, 0], [c^T]]`, sending the hyperplane `c = 0` to infinity.
fn chart(c: &[f64]) -> ProjMap {
    hyperplane_chart(c).expect("invertible chart")
}

fn known(dim: usize, span: Vec<usize>, ambient: usize, description: &str, member: impl Fn(&DVector<f64>) -> bool + Send + Sync + 'static) -> KnownCone {
    KnownCone { dim, span: span.iter().map(|&i| e(ambient, i)).collect(), description: description.into(), member: Arc::new(member) }
}

/// Nonnegative on `pos` and exactly zero elsewhere.
fn coordinate_cone(n: usize, pos: Vec<usize>, description: &str) -> KnownCone {
    let p2 = pos.clone();
    known(pos.len(), pos, n, description, move |u| {
        (0..n).all(|i| if p2.contains(&i) { u[i] >= 0.0 } else { u[i] == 0.0 })
    })
}

/// Contracting witness: `2^{-k}` dilation towards the origin for cones,
/// otherwise the given weights sampled at `t = 1..60`.
fn witness(n: usize, weights: Option<&[f64]>) -> LimitWitness {
    let (family, schedule) = match weights {
        None => (
            dilation_family(&vec![-std::f64::consts::LN_2; n]),
            (1..=60).map(|k| k as f64).collect(),
        ),
        Some(w) => (dilation_family(w), (1..=60).map(|k| k as f64).collect()),
    };
    LimitWitness { point: DVector::zeros(n), family, schedule }
}

struct Spec {
    id: &'static str,
    inequality: &'static str,
    description: &'static str,
    base: Vec<f64>,
    constraints: Vec<Constraint>,
    chart: Vec<f64>,
    families: Vec<Family>,
    flags: Flags,
    known: KnownCone,
    witness_weights: Option<Vec<f64>>,
}

const fn flags(cone: bool, strictly_convex: bool, decomposable: bool) -> Flags {
    Flags { homogeneous: true, cone, strictly_convex, decomposable, placeholder: false }
}

fn build(s: Spec) -> Result<CatalogEntry> {
    let n = s.base.len();
    let domain = ConvexDomain::from_constraints(n, v(&s.base), s.constraints, s.id)?.with_bounded_chart(chart(&s.chart));
    let limit_witness = witness(n, s.witness_weights.as_deref());
    Ok(CatalogEntry {
        id: s.id,
        dim: n,
        inequality: s.inequality,
        description: s.description,
        domain,
        families: s.families,
        flags: s.flags,
        known_ac: s.known,
        limit_witness,
        cone_point: s.flags.cone.then(|| DVector::zeros(n)),
    })
}

fn uniform(n: usize) -> Family {
    dilation_family(&vec![1.0; n])
}

fn standard(id: &str) -> Option<Spec> {
    let s = match id {
        "i" => Spec {
            id: "i",
            inequality: "x > 0",
            description: "half-line",
            base: vec![1.0],
            constraints: vec![positive(1, 0)],
            chart: vec![1.0, 1.0],
            families: vec![uniform(1)],
            flags: flags(true, false, true),
            known: coordinate_cone(1, vec![0], "{u >= 0}"),
            witness_weights: None,
        },
        "ii" => Spec {
            id: "ii",
            inequality: "x > 0, y > 0",
            description: "quadrant",
            base: vec![1.0, 1.0],
            constraints: vec![positive(2, 0), positive(2, 1)],
            chart: vec![1.0, 1.0, 1.0],
            families: vec![dilation_family(&[1.0, 0.0]), dilation_family(&[0.0, 1.0])],
            flags: flags(true, false, true),
            known: coordinate_cone(2, vec![0, 1], "{u1, u2 >= 0}"),
            witness_weights: None,
        },
        "iii" => Spec {
            id: "iii",
            inequality: "y > x^2",
            description: "parabola",
            base: vec![0.0, 1.0],
            constraints: vec![paraboloid(2, vec![0], 1)],
            chart: vec![0.0, 1.0, 1.0],
            families: vec![parabolic_shear(2, 0, 1), dilation_family(&[1.0, 2.0])],
            flags: flags(false, true, false),
            known: coordinate_cone(2, vec![1], "{u1 = 0, u2 >= 0}"),
            witness_weights: Some(vec![-1.0, -2.0]),
        },
        "iv" => Spec {
            id: "iv",
            inequality: "z > x^2 + y^2",
            description: "paraboloid",
            base: vec![0.0, 0.0, 1.0],
            constraints: vec![paraboloid(3, vec![0, 1], 2)],
            chart: vec![0.0, 0.0, 1.0, 1.0],
            families: vec![
                rotation_family(3, 0, 1),
                parabolic_shear(3, 0, 2),
                parabolic_shear(3, 1, 2),
                dilation_family(&[1.0, 1.0, 2.0]),
            ],
            flags: flags(false, true, false),
            known: coordinate_cone(3, vec![2], "{u1 = u2 = 0, u3 >= 0}"),
            witness_weights: Some(vec![-1.0, -1.0, -2.0]),
        },
        "v" => Spec {
            id: "v",
            inequality: "y > x^2, z > 0",
            description: "parabola times half-line",
            base: vec![0.0, 1.0, 1.0],
            constraints: vec![paraboloid(3, vec![0], 1), positive(3, 2)],
            chart: vec![0.0, 1.0, 1.0, 1.0],
            families: vec![parabolic_shear(3, 0, 1), dilation_family(&[1.0, 2.0, 0.0]), dilation_family(&[0.0, 0.0, 1.0])],
            flags: flags(false, false, true),
            known: coordinate_cone(3, vec![1, 2], "{u1 = 0, u2, u3 >= 0}"),
            witness_weights: Some(vec![-1.0, -2.0, -1.0]),
        },
        "vi" => Spec {
            id: "vi",
            inequality: "x > 0, y > 0, z > 0",
            description: "octant",
            base: vec![1.0, 1.0, 1.0],
            constraints: (0..3).map(|i| positive(3, i)).collect(),
            chart: vec![1.0; 4],
            families: (0..3).map(|i| dilation_family(&e(3, i).as_slice().to_vec())).collect(),
            flags: flags(true, false, true),
            known: coordinate_cone(3, vec![0, 1, 2], "{u >= 0}"),
            witness_weights: None,
        },
        "vii" => Spec {
            id: "vii",
            inequality: "z > sqrt(x^2 + y^2)",
            description: "elliptic cone",
            base: vec![0.0, 0.0, 1.0],
            constraints: vec![lorentz(3, vec![0, 1], 2)],
            chart: vec![0.0, 0.0, 1.0, 1.0],
            families: vec![rotation_family(3, 0, 1), boost_family(3, 0, 2), boost_family(3, 1, 2), uniform(3)],
            flags: flags(true, false, false),
            known: known(3, vec![0, 1, 2], 3, "{u3 >= sqrt(u1^2 + u2^2)}", |u| u[2] >= u[0].hypot(u[1])),
            witness_weights: None,
        },
        "ix" => Spec {
            id: "ix",
            inequality: "x4 > x1^2 + x2^2 + x3^2",
            description: "paraboloid",
            base: vec![0.0, 0.0, 0.0, 1.0],
            constraints: vec![paraboloid(4, vec![0, 1, 2], 3)],
            chart: vec![0.0, 0.0, 0.0, 1.0, 1.0],
            families: vec![
                rotation_family(4, 0, 1),
                rotation_family(4, 1, 2),
                parabolic_shear(4, 0, 3),
                parabolic_shear(4, 1, 3),
                parabolic_shear(4, 2, 3),
                dilation_family(&[1.0, 1.0, 1.0, 2.0]),
            ],
            flags: flags(false, true, false),
            known: coordinate_cone(4, vec![3], "{u1 = u2 = u3 = 0, u4 >= 0}"),
            witness_weights: Some(vec![-1.0, -1.0, -1.0, -2.0]),
        },
        "x" => Spec {
            id: "x",
            inequality: "x2 > x1^2, x3 > 0, x4 > 0",
            description: "parabola times quadrant",
            base: vec![0.0, 1.0, 1.0, 1.0],
            constraints: vec![paraboloid(4, vec![0], 1), positive(4, 2), positive(4, 3)],
            chart: vec![0.0, 1.0, 1.0, 1.0, 1.0],
            families: vec![
                parabolic_shear(4, 0, 1),
                dilation_family(&[1.0, 2.0, 0.0, 0.0]),
                dilation_family(&[0.0, 0.0, 1.0, 0.0]),
                dilation_family(&[0.0, 0.0, 0.0, 1.0]),
            ],
            flags: flags(false, false, true),
            known: coordinate_cone(4, vec![1, 2, 3], "{u1 = 0, u2, u3, u4 >= 0}"),
            witness_weights: Some(vec![-1.0, -2.0, -1.0, -1.0]),
        },
        "xi" => Spec {
            id: "xi",
            inequality: "(x2 - x1^2) x3 > x4^2, x3 > 0",
            description: "indecomposable with three-dimensional asymptotic cone",
            base: vec![0.0, 1.0, 1.0, 0.0],
            constraints: vec![xi_quadric(), positive(4, 2)],
            chart: vec![0.0, 1.0, 1.0, 0.0, 1.0],
            families: vec![
                parabolic_shear(4, 0, 1),
                xi_shift_family(),
                dilation_family(&[1.0, 2.0, 0.0, 1.0]),
                dilation_family(&[0.0, 0.0, 2.0, 1.0]),
            ],
            flags: flags(false, false, false),
            known: known(3, vec![1, 2, 3], 4, "{u1 = 0, u2 u3 >= u4^2, u2, u3 >= 0}", |u| {
                u[0] == 0.0 && u[1] >= 0.0 && u[2] >= 0.0 && u[1] * u[2] >= u[3] * u[3]
            }),
            witness_weights: Some(vec![-1.0, -2.0, -2.0, -2.0]),
        },
        "xii" => Spec {
            id: "xii",
            inequality: "x3 > x1^2 + x2^2, x4 > 0",
            description: "paraboloid times half-line",
            base: vec![0.0, 0.0, 1.0, 1.0],
            constraints: vec![paraboloid(4, vec![0, 1], 2), positive(4, 3)],
            chart: vec![0.0, 0.0, 1.0, 1.0, 1.0],
            families: vec![
                rotation_family(4, 0, 1),
                parabolic_shear(4, 0, 2),
                parabolic_shear(4, 1, 2),
                dilation_family(&[1.0, 1.0, 2.0, 0.0]),
                dilation_family(&[0.0, 0.0, 0.0, 1.0]),
            ],
            flags: flags(false, false, true),
            known: coordinate_cone(4, vec![2, 3], "{u1 = u2 = 0, u3, u4 >= 0}"),
            witness_weights: Some(vec![-1.0, -1.0, -2.0, -1.0]),
        },
        "xiii" => Spec {
            id: "xiii",
            inequality: "x2 > x1^2, x4 > x3^2",
            description: "product of two parabolas",
            base: vec![0.0, 1.0, 0.0, 1.0],
            constraints: vec![paraboloid(4, vec![0], 1), paraboloid(4, vec![2], 3)],
            chart: vec![0.0, 1.0, 0.0, 1.0, 1.0],
            families: vec![
                parabolic_shear(4, 0, 1),
                parabolic_shear(4, 2, 3),
                dilation_family(&[1.0, 2.0, 0.0, 0.0]),
                dilation_family(&[0.0, 0.0, 1.0, 2.0]),
            ],
            flags: flags(false, false, false),
            known: coordinate_cone(4, vec![1, 3], "{u1 = u3 = 0, u2, u4 >= 0}"),
            witness_weights: Some(vec![-1.0, -2.0, -1.0, -2.0]),
        },
        "xiv" => Spec {
            id: "xiv",
            inequality: "x4 > sqrt(x1^2 + x2^2 + x3^2)",
            description: "elliptic cone",
            base: vec![0.0, 0.0, 0.0, 1.0],
            constraints: vec![lorentz(4, vec![0, 1, 2], 3)],
            chart: vec![0.0, 0.0, 0.0, 1.0, 1.0],
            families: vec![
                rotation_family(4, 0, 1),
                rotation_family(4, 1, 2),
                boost_family(4, 0, 3),
                boost_family(4, 1, 3),
                boost_family(4, 2, 3),
                uniform(4),
            ],
            flags: flags(true, false, false),
            known: known(4, vec![0, 1, 2, 3], 4, "{u4 >= |(u1, u2, u3)|}", |u| {
                u[3] >= (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt()
            }),
            witness_weights: None,
        },
        "xvi" => Spec {
            id: "xvi",
            inequality: "x1, x2, x3, x4 > 0",
            description: "double cone over a triangle",
            base: vec![1.0; 4],
            constraints: (0..4).map(|i| positive(4, i)).collect(),
            chart: vec![1.0; 5],
            families: (0..4).map(|i| dilation_family(&e(4, i).as_slice().to_vec())).collect(),
            flags: flags(true, false, true),
            known: coordinate_cone(4, vec![0, 1, 2, 3], "{u >= 0}"),
            witness_weights: None,
        },
        "xvii" => Spec {
            id: "xvii",
            inequality: "x3 > sqrt(x1^2 + x2^2), x4 > 0",
            description: "double cone over a disk",
            base: vec![0.0, 0.0, 1.0, 1.0],
            constraints: vec![lorentz(4, vec![0, 1], 2), positive(4, 3)],
            chart: vec![0.0, 0.0, 1.0, 1.0, 1.0],
            families: vec![
                rotation_family(4, 0, 1),
                boost_family(4, 0, 2),
                boost_family(4, 1, 2),
                dilation_family(&[1.0, 1.0, 1.0, 0.0]),
                dilation_family(&[0.0, 0.0, 0.0, 1.0]),
            ],
            flags: flags(true, false, true),
            known: known(4, vec![0, 1, 2, 3], 4, "{u3 >= sqrt(u1^2 + u2^2), u4 >= 0}", |u| {
                u[2] >= u[0].hypot(u[1]) && u[3] >= 0.0
            }),
            witness_weights: None,
        },
        _ => return None,
    };
    Some(s)
}

/// Accepts `xi`, `(xi)` and `XI`.
pub fn normalize_id(id: &str) -> Result<&'static str> {
    let key = id.trim().trim_start_matches('(').trim_end_matches(')').to_ascii_lowercase();
    IDS.iter().find(|&&i| i == key).copied().ok_or_else(|| Error::UnknownId(id.to_string()))
}

pub fn get(id: &str) -> Result<CatalogEntry> {
    let id = normalize_id(id)?;
    match standard(id) {
        Some(s) => build(s),
        None => placeholder_with_body(id, default_body(id)?),
    }
}

pub fn list() -> Vec<CatalogEntry> {
    IDS.iter().map(|id| get(id).expect("catalog entries build")).collect()
}

/// Default base bodies of the placeholder cones: `l^4` balls, and the cube
/// for (xix).
pub fn default_body(id: &str) -> Result<ConvexDomain> {
    match normalize_id(id)? {
        "viii" | "xviii" => ConvexDomain::lp_ball(2, 4.0),
        "xv" => ConvexDomain::lp_ball(3, 4.0),
        "xix" => {
            let mut ineqs = Vec::new();
            for i in 0..3 {
                ineqs.push((e(3, i), 1.0));
                ineqs.push((-e(3, i), 1.0));
            }
            ConvexDomain::polytope(&ineqs, Some(DVector::zeros(3)))
        }
        other => Err(Error::InvalidInput(format!("({other}) is not a placeholder type"))),
    }
}

/// Placeholder cone built over a bounded convex body `B`:
/// (viii), (xv), (xix) are `{(y, s) : s > 0, y/s in B}`, and (xviii) is
/// `{(y, s, r) : s, r > 0, y/s in B}`.
pub fn placeholder_with_body(id: &str, body: ConvexDomain) -> Result<CatalogEntry> {
    let id = normalize_id(id)?;
    let (body_dim, extra, inequality, description) = match id {
        "viii" => (2, 1, "x3 > N(x1, x2)", "cone over a strictly convex non-elliptic body"),
        "xv" => (3, 1, "x4 > N(x1, x2, x3)", "cone over a strictly convex non-elliptic body"),
        "xviii" => (2, 2, "x3 > N(x1, x2), x4 > 0", "double cone over a strictly convex non-elliptic body"),
        "xix" => (3, 1, "x4 > N(x1, x2, x3)", "cone over an indecomposable non-strictly convex body"),
        other => return Err(Error::InvalidInput(format!("({other}) is not a placeholder type"))),
    };
    if body.dim() != body_dim {
        return Err(Error::DimensionMismatch { expected: body_dim, got: body.dim() });
    }
    let n = body_dim + extra;
    let inner = body.clone();
    let member = move |x: &DVector<f64>| {
        let s = x[body_dim];
        if !(s > 0.0) || (extra == 2 && !(x[n - 1] > 0.0)) {
            return false;
        }
        inner.contains(&(x.rows(0, body_dim) / s))
    };
    let mut base = DVector::from_element(n, 1.0);
    base.rows_mut(0, body_dim).copy_from(body.basepoint());
    let mut c = vec![0.0; n + 1];
    for cj in c.iter_mut().skip(body_dim) {
        *cj = 1.0;
    }
    let domain = ConvexDomain::new(n, base, member, id)?.with_bounded_chart(chart(&c));
    let closure = domain.clone();
    let mut families = vec![uniform(n)];
    if extra == 2 {
        families = vec![dilation_family(&[1.0, 1.0, 1.0, 0.0]), dilation_family(&[0.0, 0.0, 0.0, 1.0])];
    }
    Ok(CatalogEntry {
        id,
        dim: n,
        inequality,
        description,
        domain,
        families,
        flags: Flags { homogeneous: false, cone: true, strictly_convex: false, decomposable: extra == 2, placeholder: true },
        known_ac: KnownCone {
            dim: n,
            span: (0..n).map(|i| e(n, i)).collect(),
            description: "closure of the cone".into(),
            member: Arc::new(move |u| closure.in_closure(u)),
        },
        limit_witness: witness(n, None),
        cone_point: Some(DVector::zeros(n)),
    })
}

/// Outcome of `check_entry`.
#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub placeholder: bool,
    pub invariance: bool,
    pub invariance_failures: Vec<String>,
    pub convexity: bool,
    pub proper_convexity: bool,
    pub ac_match: Option<bool>,
    pub ac_agreement: Option<f64>,
    pub ac_dim: Option<usize>,
    pub limit_witness_verified: bool,
    pub witness_distance: f64,
    pub witness_iterations: usize,
    pub cone_point_fixed: Option<bool>,
    pub dilation_invariant: Option<bool>,
    pub passed: bool,
}

/// Witness accumulation threshold in the bounded chart.
pub const WITNESS_TOL: f64 = 1e-6;
/// Scalings of the dilation-invariance check.
pub const DILATION_FACTORS: [f64; 7] = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];

fn invariance_samples(d: &ConvexDomain, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = substream(seed, 11);
    let mut out = d.sample_interior(&mut rng, count / 2, 10.0);
    let radii = [1.0, 2.0, 4.0, 8.0];
    for i in 0..count - count / 2 {
        out.push(sample_hilbert_ball(d, d.basepoint(), radii[i % radii.len()], &mut rng));
    }
    out
}

/// Iterates the witness schedule from the basepoint; returns the first
/// iteration within `WITNESS_TOL` and the final chart distance.
pub fn verify_witness(entry: &CatalogEntry) -> (Option<usize>, f64) {
    let w = &entry.limit_witness;
    let d = &entry.domain;
    let mut first = None;
    let mut last = f64::INFINITY;
    for (k, &t) in w.schedule.iter().enumerate() {
        let x = w.family.at(t).apply(d.basepoint());
        last = d.chart_distance(&x, &w.point);
        if last < WITNESS_TOL && first.is_none() {
            first = Some(k + 1);
        }
    }
    (first, last)
}

/// Runs every check of an entry. Placeholders skip the asymptotic-cone
/// comparison.
pub fn check_entry(entry: &CatalogEntry, budget: usize, seed: u64) -> EntryReport {
    let d = &entry.domain;
    let samples = invariance_samples(d, budget.max(2), seed);

    let mut invariance_failures = Vec::new();
    for f in &entry.families {
        for t in [1.0, 0.37] {
            if let Err(e) = check_preserves(d, &f.proj(t), &samples) {
                invariance_failures.push(format!("{} at t={t}: {e}", f.label));
            }
        }
    }

    let mut rng = substream(seed, 12);
    let mut convexity = true;
    for _ in 0..budget.clamp(1, 1000) {
        let a = &samples[rng.random_range(0..samples.len())];
        let b = &samples[rng.random_range(0..samples.len())];
        if !(1..50).all(|k| d.contains(&(a + (b - a) * (k as f64 / 50.0)))) {
            convexity = false;
            break;
        }
    }
    let proper_convexity = is_properly_convex(d, 200, &mut substream(seed, 13));

    let (ac_match, ac_agreement, ac_dim) = if entry.flags.placeholder {
        (None, None, None)
    } else {
        let ac = asymptotic_cone(d);
        let agreement = ac_grid_agreement(entry, &ac, 1000, seed);
        (Some(agreement >= 0.999 && ac.intrinsic_dim == entry.known_ac.dim), Some(agreement), Some(ac.intrinsic_dim))
    };

    let (first, witness_distance) = verify_witness(entry);

    let (cone_point_fixed, dilation_invariant) = match &entry.cone_point {
        Some(c) => {
            let fixed = entry
                .families
                .iter()
                .all(|f| [1.0, -1.0].iter().all(|&t| (f.at(t).apply(c) - c).norm() <= 1e-12 * (1.0 + c.norm())));
            let dil = samples.iter().all(|x| DILATION_FACTORS.iter().all(|&t| d.contains(&(c + (x - c) * t))));
            (Some(fixed), Some(dil))
        }
        None => (None, None),
    };

    let passed = invariance_failures.is_empty()
        && convexity
        && proper_convexity
        && ac_match.unwrap_or(true)
        && first.is_some()
        && cone_point_fixed.unwrap_or(true)
        && dilation_invariant.unwrap_or(true);
    EntryReport {
        id: entry.id.to_string(),
        placeholder: entry.flags.placeholder,
        invariance: invariance_failures.is_empty(),
        invariance_failures,
        convexity,
        proper_convexity,
        ac_match,
        ac_agreement,
        ac_dim,
        limit_witness_verified: first.is_some(),
        witness_distance,
        witness_iterations: first.unwrap_or(0),
        cone_point_fixed,
        dilation_invariant,
        passed,
    }
}

/// Agreement between the computed and the known asymptotic cone on a
/// direction grid with `count` in-span and `count` generic directions.
pub fn ac_grid_agreement(entry: &CatalogEntry, ac: &AsymptoticCone, count: usize, seed: u64) -> f64 {
    let grid = entry.known_ac.grid(entry.dim, count, &mut substream(seed, 14));
    grid_agreement(|u| ac.contains(u), |u| entry.known_ac.contains(u), &grid)
}

/// One letter of a word: family index and parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Letter {
    pub family: usize,
    pub t: f64,
}

/// Word `w` found for a point `x`, with `distance = d(w^{-1} x, basepoint)`.
#[derive(Debug, Clone, Serialize)]
pub struct Reduction {
    /// Letters of `w^{-1}` in application order.
    pub word: Vec<Letter>,
    pub distance: f64,
    pub point: Vec<f64>,
}

/// Dyadic parameter steps `2^k`.
pub fn dyadic_steps(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

/// Signed family combinations tried when no single letter helps: every
/// subset of size at least two with all sign patterns up to four families,
/// otherwise signed pairs and the two diagonals.
fn combined_moves(m: usize) -> Vec<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    let mut push_subset = |idx: &[usize]| {
        for signs in 0u32..(1 << idx.len()) {
            out.push(
                idx.iter()
                    .enumerate()
                    .map(|(k, &i)| (i, if signs & (1 << k) != 0 { -1.0 } else { 1.0 }))
                    .collect(),
            );
        }
    };
    if m <= 4 {
        for mask in 1u32..(1 << m) {
            if mask.count_ones() >= 2 {
                let idx: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
                push_subset(&idx);
            }
        }
    } else {
        for i in 0..m {
            for j in (i + 1)..m {
                push_subset(&[i, j]);
            }
        }
        out.push((0..m).map(|i| (i, 1.0)).collect());
        out.push((0..m).map(|i| (i, -1.0)).collect());
    }
    out
}

/// Single-letter decrease below which combined moves are also tried.
const COMBINE_BELOW: f64 = 0.5;

/// Greedy descent of `d_Ω(·, basepoint)` by family letters `f_i(±2^k)`.
/// Each round takes the move with the largest decrease per letter. When
/// single letters gain little (kinks of non-smooth metrics), products of
/// several families with a common step are tried, signed as the single
/// letters lean, or with every sign pattern if no single letter helps.
pub fn reduce_towards_basepoint(
    d: &ConvexDomain,
    families: &[Family],
    x: &DVector<f64>,
    target: f64,
    max_len: usize,
    steps: &[f64],
) -> Reduction {
    let base = d.basepoint();
    let dist = |y: &DVector<f64>| {
        if d.contains(y) {
            hilbert_distance(d, y, base).unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        }
    };
    let maps: Vec<Vec<(f64, AffineMap)>> = families
        .iter()
        .map(|f| steps.iter().flat_map(|&s| [(s, f.at(s)), (-s, f.at(-s))]).collect())
        .collect();
    let combos = combined_moves(families.len());
    let mut cur = x.clone();
    let mut cur_d = dist(&cur);
    let mut word = Vec::new();
    while cur_d > target && word.len() < max_len {
        let mut best: Option<(f64, Vec<Letter>, DVector<f64>)> = None;
        let offer = |best: &mut Option<(f64, Vec<Letter>, DVector<f64>)>, letters: Vec<Letter>, y: DVector<f64>, dy: f64| {
            let rate = (cur_d - dy) / letters.len() as f64;
            if dy < cur_d - 1e-13 && best.as_ref().is_none_or(|b| rate > (cur_d - b.0) / b.1.len() as f64) {
                *best = Some((dy, letters, y));
            }
        };
        // Lowest value reached per family on the positive and negative side.
        let mut lean = vec![[f64::INFINITY; 2]; families.len()];
        for (i, ms) in maps.iter().enumerate() {
            for (t, m) in ms {
                let y = m.apply(&cur);
                let dy = dist(&y);
                let side = usize::from(*t < 0.0);
                lean[i][side] = lean[i][side].min(dy);
                offer(&mut best, vec![Letter { family: i, t: *t }], y, dy);
            }
        }
        let single_gain = best.as_ref().map_or(0.0, |b| cur_d - b.0);
        if single_gain < COMBINE_BELOW {
            let leaning: Vec<f64> = lean.iter().map(|l| if l[0] < l[1] { 1.0 } else { -1.0 }).collect();
            let all_signs = single_gain == 0.0;
            for combo in &combos {
                if word.len() + combo.len() > max_len {
                    continue;
                }
                if !all_signs && combo.iter().any(|&(i, sign)| sign != leaning[i]) {
                    continue;
                }
                for &s in steps {
                    let letters: Vec<Letter> = combo.iter().map(|&(i, sign)| Letter { family: i, t: sign * s }).collect();
                    let mut y = cur.clone();
                    for l in &letters {
                        y = families[l.family].at(l.t).apply(&y);
                    }
                    let dy = dist(&y);
                    offer(&mut best, letters, y, dy);
                }
            }
        }
        match best {
            Some((dy, letters, y)) => {
                word.extend(letters);
                cur = y;
                cur_d = dy;
            }
            None => break,
        }
    }
    Reduction { word, distance: cur_d, point: cur.as_slice().to_vec() }
}

#[derive(Debug, Clone, Serialize)]
pub struct SyndeticReport {
    pub radius: f64,
    pub word_len: usize,
    pub samples: usize,
    pub covered: usize,
    pub coverage: f64,
    pub longest_word: usize,
    pub worst_distance: f64,
}

/// Largest Hilbert radius of the probe samples.
pub const SYNDETIC_SAMPLE_RADIUS: f64 = 30.0;

pub fn syndetic_probe(entry: &CatalogEntry, radius: f64, word_len: usize, sample_budget: usize, seed: u64) -> SyndeticReport {
    syndetic_probe_with(&entry.domain, &entry.families, radius, word_len, sample_budget, seed)
}

/// Fraction of samples `x` with a word `w`, `|w| <= word_len`, such that
/// `d(w^{-1} x, basepoint) <= radius`.
pub fn syndetic_probe_with(
    d: &ConvexDomain,
    families: &[Family],
    radius: f64,
    word_len: usize,
    sample_budget: usize,
    seed: u64,
) -> SyndeticReport {
    let mut rng = substream(seed, 21);
    let steps = dyadic_steps(-3, 6);
    let mut covered = 0;
    let mut longest = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..sample_budget {
        let x = sample_hilbert_ball(d, d.basepoint(), SYNDETIC_SAMPLE_RADIUS, &mut rng);
        let r = reduce_towards_basepoint(d, families, &x, radius, word_len, &steps);
        if r.distance <= radius {
            covered += 1;
            longest = longest.max(r.word.len());
        }
        worst = worst.max(r.distance);
    }
    SyndeticReport {
        radius,
        word_len,
        samples: sample_budget,
        covered,
        coverage: if sample_budget == 0 { 1.0 } else { covered as f64 / sample_budget as f64 },
        longest_word: longest,
        worst_distance: worst,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitivityReport {
    pub targets: usize,
    pub reached: usize,
    pub tolerance: f64,
    pub worst_distance: f64,
}

/// Targets drawn from Hilbert balls of radius up to 5 are moved to the
/// basepoint by family words; since the families act by isometries this is
/// the same as reaching the target from the basepoint.
pub fn transitivity_probe(entry: &CatalogEntry, targets: usize, tolerance: f64, seed: u64) -> TransitivityReport {
    let d = &entry.domain;
    let mut rng = substream(seed, 31);
    let steps = dyadic_steps(-14, 4);
    let mut reached = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..targets {
        let y = sample_hilbert_ball(d, d.basepoint(), 5.0, &mut rng);
        let r = reduce_towards_basepoint(d, &entry.families, &y, tolerance, 400, &steps);
        if r.distance <= tolerance {
            reached += 1;
        }
        worst = worst.max(r.distance);
    }
    TransitivityReport { targets, reached, tolerance, worst_distance: worst }
}

/// Parameters of the parabolic element `f` of type (xi) analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop76Params {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub d: f64,
    pub delta: f64,
    pub theta: f64,
    pub n: u32,
}

impl Prop76Params {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha1, self.alpha2, self.beta1, self.beta2, self.beta3, self.d, self.delta, self.theta]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInput("non-finite parameter".into()));
        }
        if self.d <= 0.0 || self.delta <= 0.0 || !(self.theta > 0.0 && self.theta < 1.0) || self.alpha1 == 0.0 {
            return Err(Error::InvalidInput("need d > 0, delta > 0, 0 < theta < 1, alpha1 != 0".into()));
        }
        if self.n > 12 {
            return Err(Error::InvalidInput("n must be at most 12".into()));
        }
        Ok(())
    }

    /// `alpha1 = alpha2` in `[0.5, 2]`, `beta` in `[-1, 1]^3`, `d` in `(0, 2]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: u32) -> Self {
        let a = rng.random_range(0.5..=2.0);
        Self {
            alpha1: a,
            alpha2: a,
            beta1: rng.random_range(-1.0..=1.0),
            beta2: rng.random_range(-1.0..=1.0),
            beta3: rng.random_range(-1.0..=1.0),
            d: 2.0 - rng.random_range(0.0..2.0),
            delta: rng.random_range(0.25..=2.0),
            theta: rng.random_range(0.1..0.9),
            n,
        }
    }

    /// Linear part `L_f`.
    pub fn linear(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(
            4,
            4,
            &[
                self.alpha1, 0.0, 0.0, 0.0,
                self.beta1, self.alpha2 * self.alpha2, 0.0, 0.0,
                self.beta2, 0.0, 1.0, 2.0 * self.d,
                self.beta3, 0.0, 0.0, 1.0,
            ],
        )
    }

    /// Translation part `t_f = (0, 0, d^2, d)`.
    pub fn translation(&self) -> DVector<f64> {
        v(&[0.0, 0.0, self.d * self.d, self.d])
    }

    pub fn map(&self) -> AffineMap {
        AffineMap::new(self.linear(), self.translation()).expect("4x4")
    }

    /// Closed form of the linear part of `f^n` via the geometric sums
    /// `beta1*`, `beta2*`, `beta3*`.
    pub fn closed_form_linear(&self, n: u32) -> DMatrix<f64> {
        let a1 = self.alpha1;
        let a2sq = self.alpha2 * self.alpha2;
        let n = n as i32;
        let geo: f64 = (0..n).map(|k| a1.powi(k)).sum();
        let b1 = self.beta1 * (0..n).map(|k| a1.powi(n - 1 - k) * a2sq.powi(k)).sum::<f64>();
        let weighted: f64 = (0..n - 1).map(|k| (n - 1 - k) as f64 * a1.powi(k)).sum();
        let b2 = self.beta2 * geo + 2.0 * self.d * self.beta3 * weighted;
        let b3 = self.beta3 * geo;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                a1.powi(n), 0.0, 0.0, 0.0,
                b1, a2sq.powi(n), 0.0, 0.0,
                b2, 0.0, 1.0, 2.0 * n as f64 * self.d,
                b3, 0.0, 0.0, 1.0,
            ],
        )
    }

    /// Translation part of `f^n`: `(0, 0, n^2 d^2, n d)`.
    pub fn closed_form_translation(&self, n: u32) -> DVector<f64> {
        let nd = n as f64 * self.d;
        v(&[0.0, 0.0, nd * nd, nd])
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn rel_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormReport {
    pub n: u32,
    pub linear_rel_error: f64,
    pub translation_rel_error: f64,
    pub closed_form_linear: Vec<Vec<f64>>,
    pub closed_form_translation: Vec<f64>,
    pub passed: bool,
}

/// Relative tolerance of the algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-10;

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

/// Compares the closed form of `f^n` with the direct power.
pub fn verify_prop76_fn_closed_form(p: &Prop76Params) -> Result<ClosedFormReport> {
    p.validate()?;
    let f = p.map();
    let mut power = AffineMap::identity(4);
    for _ in 0..p.n {
        power = f.compose(&power);
    }
    let lin = p.closed_form_linear(p.n);
    let tr = p.closed_form_translation(p.n);
    let linear_rel_error = rel_error(power.linear(), &lin);
    let tdiff = (power.translation() - &tr).amax() / tr.amax().max(1.0);
    Ok(ClosedFormReport {
        n: p.n,
        linear_rel_error,
        translation_rel_error: tdiff,
        closed_form_linear: rows(&lin),
        closed_form_translation: tr.as_slice().to_vec(),
        passed: linear_rel_error < ALGEBRA_TOL && tdiff < ALGEBRA_TOL,
    })
}

/// Parabolic family with `alpha1 = alpha2 = 1`, `beta1(t) = b1 t`,
/// `beta3(t) = b3 t`, `beta2(t) = b2 t + b3 t^2` and translation
/// `(0, 0, t^2, t)`. The quadratic term of `beta2` is forced by
/// `f_{t+s} = f_t f_s`.
pub fn parabolic_family(b1: f64, b2: f64, b3: f64) -> Family {
    Family::new("parabolic f_t", move |t| {
        let l = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0,
                b1 * t, 1.0, 0.0, 0.0,
                b2 * t + b3 * t * t, 0.0, 1.0, 2.0 * t,
                b3 * t, 0.0, 0.0, 1.0,
            ],
        );
        AffineMap::new(l, v(&[0.0, 0.0, t * t, t])).expect("4x4")
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IsotropyReport {
    pub n: u32,
    pub t: f64,
    pub h: Vec<Vec<f64>>,
    pub delta_n: f64,
    pub theta_n: f64,
    /// Largest entry of `h` off the diagonal shape `diag(δ_n, δ_n², θ_n², θ_n)`
    /// together with its translation part.
    pub shape_residual: f64,
    pub identity_residual: f64,
    pub group_law_residual: f64,
    pub linearity_residual: f64,
    pub passed: bool,
}

/// Solves `f_{θ^n t} h = g^n f_t` for `h` with `g = diag(δ, δ², θ², θ)` and
/// `f_t = parabolic_family(beta1, beta2, beta3)`, using `t = d`.
pub fn verify_prop76_isotropy(p: &Prop76Params) -> Result<IsotropyReport> {
    p.validate()?;
    let (delta, theta, t, n) = (p.delta, p.theta, p.d, p.n as i32);
    let fam = parabolic_family(p.beta1, p.beta2, p.beta3);
    let g = linear_map(DMatrix::from_diagonal(&v(&[delta, delta * delta, theta * theta, theta])));
    let mut gn = AffineMap::identity(4);
    for _ in 0..n {
        gn = g.compose(&gn);
    }
    let s = theta.powi(n) * t;
    let h = fam.at(s).inverse().compose(&gn.compose(&fam.at(t)));
    let hl = h.linear();
    let delta_n = hl[(0, 0)];
    let theta_n = hl[(3, 3)];
    let shape = DMatrix::from_diagonal(&v(&[delta_n, delta_n * delta_n, theta_n * theta_n, theta_n]));
    let scale = max_abs(hl).max(1.0);
    let shape_residual = (max_abs(&(hl - shape)) / scale).max(h.translation().amax() / scale);
    if shape_residual > ALGEBRA_TOL {
        return Err(Error::Inconsistent(format!(
            "f_(theta^n t)^-1 g^n f_t is not diagonal of the required shape (residual {shape_residual:e})"
        )));
    }
    // alpha1 = alpha2 = 1 along the family.
    let identity_residual = [
        (delta_n - delta.powi(n)).abs(),
        (delta_n * delta_n - delta.powi(2 * n)).abs(),
        (theta_n - theta.powi(n)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let pairs = [(0.3, 0.7), (-1.2, 0.5), (t, -t), (2.0, 1.5)];
    let mut group_law_residual: f64 = 0.0;
    let mut linearity_residual: f64 = 0.0;
    for (a, b) in pairs {
        let lhs = fam.at(a).compose(&fam.at(b));
        let rhs = fam.at(a + b);
        group_law_residual = group_law_residual
            .max(rel_error(lhs.linear(), rhs.linear()))
            .max((lhs.translation() - rhs.translation()).amax() / rhs.translation().amax().max(1.0));
        let beta = |x: f64, row: usize| fam.at(x).linear()[(row, 0)];
        for row in [1, 3] {
            linearity_residual = linearity_residual.max((beta(a + b, row) - beta(a, row) - beta(b, row)).abs());
            linearity_residual = linearity_residual.max((beta(a, row) - a * beta(1.0, row)).abs());
        }
    }
    let passed = identity_residual < ALGEBRA_TOL && group_law_residual < ALGEBRA_TOL && linearity_residual < ALGEBRA_TOL;
    Ok(IsotropyReport {
        n: p.n,
        t,
        h: rows(&h.homogeneous()),
        delta_n,
        theta_n,
        shape_residual,
        identity_residual,
        group_law_residual,
        linearity_residual,
        passed,
    })
}

/// Numeric invariants gathered by `classify_against_catalog`.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationEvidence {
    pub dim: usize,
    pub properly_convex: bool,
    pub ac_dim: usize,
    pub is_cone: bool,
    pub strictly_convex: bool,
    /// Face dimension to number of sampled boundary points.
    pub face_census: BTreeMap<usize, usize>,
    pub boundary_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub candidates: Vec<String>,
    pub evidence: ClassificationEvidence,
}

/// Boundary points sampled for the face census.
pub const CENSUS_SAMPLES: usize = 24;

/// Chart sending a hyperplane that misses the closure to infinity. Uses the
/// attached chart, or builds one from a functional positive on the
/// asymptotic cone.
fn census_domain(d: &ConvexDomain, ac: &AsymptoticCone) -> Result<ConvexDomain> {
    if d.bounded_chart().is_some() || ac.intrinsic_dim == 0 {
        return d.in_bounded_chart();
    }
    let l = ac.positive_functional()?;
    let mut rng = seeded(0x5eed);
    let boundary = d.sample_boundary(&mut rng, 400);
    let lo = boundary.iter().map(|p| l.dot(p)).fold(l.dot(d.basepoint()), f64::min);
    let mut c: Vec<f64> = l.iter().cloned().collect();
    c.push(1.0 + lo.abs() - lo);
    d.clone().with_bounded_chart(chart(&c)).in_bounded_chart()
}

/// Candidate catalog types of a domain from its asymptotic cone and a face
/// census in a bounded chart. Placeholder types are always reported
/// together with the explicit type they cannot be told apart from.
pub fn classify_against_catalog(d: &ConvexDomain, seed: u64) -> Result<Classification> {
    let n = d.dim();
    if n == 0 || n > 4 {
        return Err(Error::InvalidInput(format!("dimension {n} is outside 1..=4")));
    }
    let properly_convex = is_properly_convex(d, 200, &mut substream(seed, 41));
    let ac = asymptotic_cone(d);
    let k = ac.intrinsic_dim;
    let is_cone = k == n;
    let mut census = BTreeMap::new();
    let mut samples = 0;
    if properly_convex && k > 0 {
        let dc = census_domain(d, &ac)?;
        let mut rng = substream(seed, 42);
        for p in dc.sample_boundary(&mut rng, CENSUS_SAMPLES) {
            if let Ok(f) = face_of(&dc, &p) {
                *census.entry(f.dim).or_insert(0) += 1;
                samples += 1;
            }
        }
    }
    let max_face = census.keys().max().copied().unwrap_or(0);
    let strictly_convex = samples > 0 && max_face == 0;
    let has = |dim: usize| census.contains_key(&dim);
    let ids: Vec<&str> = if !properly_convex || k == 0 {
        vec![]
    } else {
        match (n, k) {
            (1, _) => vec!["i"],
            (2, 2) => vec!["ii"],
            (2, 1) => vec!["iii"],
            (3, 1) => vec!["iv"],
            (3, 2) => vec!["v"],
            (3, 3) if has(2) => vec!["vi"],
            (3, 3) => vec!["vii", "viii"],
            (4, 1) => vec!["ix"],
            (4, 2) if has(3) => vec!["xii"],
            (4, 2) => vec!["xiii"],
            (4, 3) if has(3) => vec!["x"],
            (4, 3) => vec!["xi"],
            (4, 4) if has(2) => vec!["xvii", "xviii"],
            (4, 4) if has(3) => vec!["xvi", "xix"],
            (4, 4) => vec!["xiv", "xv"],
            _ => vec![],
        }
    };
    Ok(Classification {
        candidates: ids.into_iter().map(String::from).collect(),
        evidence: ClassificationEvidence {
            dim: n,
            properly_convex,
            ac_dim: k,
            is_cone,
            strictly_convex,
            face_census: census,
            boundary_samples: samples,
        },
    })
}

/// Reports of every entry, computed in parallel, in catalog order.
pub fn check_all(budget: usize, seed: u64) -> Vec<EntryReport> {
    IDS.par_iter()
        .map(|id| check_entry(&get(id).expect("catalog id"), budget, seed))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop76Summary {
    pub trials: usize,
    pub max_linear_rel_error: f64,
    pub max_translation_rel_error: f64,
    pub closed_form_failures: usize,
    pub max_identity_residual: f64,
    pub max_shape_residual: f64,
    pub max_group_law_residual: f64,
    pub max_linearity_residual: f64,
    pub isotropy_failures: usize,
    /// Whether a family with `delta != theta` was reported inconsistent.
    pub inconsistent_rejected: bool,
    pub passed: bool,
}

/// Random draws with `n = 2..6` in turn. The closed form is checked on the
/// raw draw; the isotropy relation on the draw with `theta = delta` and
/// `beta3 = 0`, the case where a diagonal `h_n` exists.
pub fn verify_prop76(trials: usize, seed: u64) -> Result<Prop76Summary> {
    let mut rng = substream(seed, 76);
    let mut out = Prop76Summary {
        trials,
        max_linear_rel_error: 0.0,
        max_translation_rel_error: 0.0,
        closed_form_failures: 0,
        max_identity_residual: 0.0,
        max_shape_residual: 0.0,
        max_group_law_residual: 0.0,
        max_linearity_residual: 0.0,
        isotropy_failures: 0,
        inconsistent_rejected: false,
        passed: false,
    };
    for i in 0..trials {
        let p = Prop76Params::random(&mut rng, 2 + (i % 5) as u32);
        let c = verify_prop76_fn_closed_form(&p)?;
        out.max_linear_rel_error = out.max_linear_rel_error.max(c.linear_rel_error);
        out.max_translation_rel_error = out.max_translation_rel_error.max(c.translation_rel_error);
        out.closed_form_failures += usize::from(!c.passed);
        let q = Prop76Params { theta: p.theta, delta: p.theta, beta3: 0.0, ..p };
        match verify_prop76_isotropy(&q) {
            Ok(r) => {
                out.max_identity_residual = out.max_identity_residual.max(r.identity_residual);
                out.max_shape_residual = out.max_shape_residual.max(r.shape_residual);
                out.max_group_law_residual = out.max_group_law_residual.max(r.group_law_residual);
                out.max_linearity_residual = out.max_linearity_residual.max(r.linearity_residual);
                out.isotropy_failures += usize::from(!r.passed);
            }
            Err(_) => out.isotropy_failures += 1,
        }
    }
    let bad = Prop76Params { beta1: 1.0, delta: 0.5, theta: 0.25, ..Prop76Params::random(&mut rng, 2) };
    out.inconsistent_rejected = matches!(verify_prop76_isotropy(&bad), Err(Error::Inconsistent(_)));
    out.passed = out.closed_form_failures == 0 && out.isotropy_failures == 0 && out.inconsistent_rejected;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_and_lookup() {
        assert_eq!(list().len(), 19);
        assert_eq!(get("(III)").unwrap().id, "iii");
        assert!(matches!(get("xx"), Err(Error::UnknownId(_))));
        let iii = get("iii").unwrap();
        assert!(iii.flags.homogeneous && !iii.flags.cone);
        assert!(iii.domain.contains(&v(&[0.5, 0.3])) && !iii.domain.contains(&v(&[0.5, 0.2])));
        assert!(get("vi").unwrap().flags.cone);
        assert_eq!(get("xvi").unwrap().description, "double cone over a triangle");
    }

    #[test]
    fn entries_pass_checks() {
        for id in ["i", "ii", "iii", "xi"] {
            let r = check_entry(&get(id).unwrap(), 300, 0);
            assert!(r.passed, "{r:?}");
        }
        let r = check_entry(&get("viii").unwrap(), 200, 0);
        assert!(r.passed && r.ac_match.is_none(), "{r:?}");
    }

    #[test]
    fn witness_examples() {
        let (k, dist) = verify_witness(&get("i").unwrap());
        assert!(k.is_some() && dist < 1e-12);
        let (k, _) = verify_witness(&get("iii").unwrap());
        assert!(k.unwrap() <= 60);
    }

    #[test]
    fn placeholder_body_dimension() {
        let body = ConvexDomain::unit_disk();
        assert!(placeholder_with_body("xv", body.clone()).is_err());
        let e = placeholder_with_body("viii", body).unwrap();
        assert!(e.domain.contains(&v(&[0.0, 0.5, 1.0])));
        assert!(!e.domain.contains(&v(&[0.0, 1.5, 1.0])));
        assert!(placeholder_with_body("iii", ConvexDomain::unit_disk()).is_err());
    }

    #[test]
    fn quadrant_and_slab_coverage() {
        let q = get("ii").unwrap();
        assert_eq!(syndetic_probe(&q, 5.0, 40, 40, 1).coverage, 1.0);
        let slab = ConvexDomain::polytope(&[(v(&[0.0, 1.0]), 0.0), (v(&[0.0, -1.0]), 1.0), (v(&[1.0, 0.0]), 10.0), (v(&[-1.0, 0.0]), 10.0)], Some(v(&[0.0, 0.5]))).unwrap();
        assert!(syndetic_probe_with(&slab, &[], 5.0, 40, 40, 1).coverage < 1.0);
    }

    #[test]
    fn closed_form_examples() {
        let p = Prop76Params { alpha1: 1.0, alpha2: 1.0, beta1: 0.0, beta2: 0.0, beta3: 0.0, d: 1.0, delta: 0.5, theta: 0.5, n: 3 };
        let r = verify_prop76_fn_closed_form(&p).unwrap();
        assert!(r.passed);
        assert_eq!(r.closed_form_linear[2][3], 6.0);
        assert_eq!(r.closed_form_translation, vec![0.0, 0.0, 9.0, 3.0]);
        let p1 = Prop76Params { n: 1, beta1: 0.3, beta2: -0.2, beta3: 0.7, alpha1: 1.5, alpha2: 1.5, ..p };
        assert!(rel_error(&p1.closed_form_linear(1), &p1.linear()) == 0.0);
    }

    #[test]
    fn isotropy_examples() {
        let p = Prop76Params { alpha1: 1.0, alpha2: 1.0, beta1: 0.4, beta2: -0.3, beta3: 0.0, d: 1.0, delta: 0.5, theta: 0.5, n: 2 };
        let r = verify_prop76_isotropy(&p).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.theta_n - 0.25).abs() < 1e-15);
        let r0 = verify_prop76_isotropy(&Prop76Params { n: 0, ..p }).unwrap();
        assert!((r0.delta_n - 1.0).abs() < 1e-15 && (r0.theta_n - 1.0).abs() < 1e-15);
        let bad = Prop76Params { beta3: 0.5, ..p };
        assert!(matches!(verify_prop76_isotropy(&bad), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn classify_examples() {
        let c = classify_against_catalog(&get("iii").unwrap().domain, 0).unwrap();
        assert_eq!(c.candidates, vec!["iii"]);
        let c = classify_against_catalog(&get("vi").unwrap().domain, 0).unwrap();
        assert_eq!(c.candidates, vec!["vi"]);
    }
}
