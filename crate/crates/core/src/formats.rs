//! JSON descriptions of domains, matrices, generator sets and points.
//!
//! A domain is `{"type": T, "params": {...}}` where `T` is a catalog id
//! (`"iii"`, `"xi"`, ...), `"polytope"`, or `"oracle-composite"`.
//!
//! - catalog: optional `params.body` (a domain) for the placeholder cones.
//! - polytope: `params.inequalities` lists covectors `[a_1, ..., a_n, b]`
//!   meaning `a·x + b > 0`.
//! - oracle-composite: `params.op` is one of `disk`, `ball` (`center`,
//!   `radius`), `lp_ball` (`dim`, `p`), `simplex` (`vertices`, homogeneous),
//!   `paraboloid` (`dim`: `x_n > x_1^2 + ... + x_{n-1}^2`), `lorentz`
//!   (`dim`: `x_n > |x'|`), `intersection` (`parts`), `transform`
//!   (`matrix`, `part`: the image of `part`), `convex_sum` (`parts`, each
//!   `{"domain": D, "embedding": M}` or `{"point": v}`).
//!
//! Every non-catalog domain accepts `params.basepoint` and
//! `params.bounded_chart` (a covector `c` whose hyperplane misses the
//! closure; the chart is `[[I, 0], [c^T]]`).

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use serde_json::Value;

use crate::catalog;
use crate::domain::{convex_sum, Constraint, ConvexDomain, EmbeddedDomain};
use crate::error::{Error, Result};
use crate::orbit::GeneratorSet;
use crate::projective::{hyperplane_chart, ProjMap};

#[derive(Debug, Clone, Deserialize)]
pub struct DomainSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: Value,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn field<'a>(params: &'a Value, key: &str) -> Result<&'a Value> {
    params.get(key).ok_or_else(|| invalid(format!("missing parameter '{key}'")))
}

fn as_vec(v: &Value, what: &str) -> Result<Vec<f64>> {
    serde_json::from_value(v.clone()).map_err(|e| invalid(format!("{what}: {e}")))
}

fn as_rows(v: &Value, what: &str) -> Result<Vec<Vec<f64>>> {
    serde_json::from_value(v.clone()).map_err(|e| invalid(format!("{what}: {e}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| invalid(format!("{what} must be a nonnegative integer")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| invalid(format!("{what} must be a number")))
}

fn matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(invalid("matrix rows must be nonempty and of equal length"));
    }
    Ok(DMatrix::from_row_slice(r, c, &rows.concat()))
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("domain spec: {e}")))
    }

    pub fn build(&self) -> Result<ConvexDomain> {
        let d = match self.kind.as_str() {
            "polytope" => self.polytope()?,
            "oracle-composite" => self.composite()?,
            "catalog" => return catalog_domain(as_str(field(&self.params, "id")?)?, &self.params),
            id => return catalog_domain(id, &self.params),
        };
        self.finish(d)
    }

    fn finish(&self, mut d: ConvexDomain) -> Result<ConvexDomain> {
        if let Some(b) = self.params.get("basepoint") {
            d = d.with_basepoint(DVector::from_vec(as_vec(b, "basepoint")?))?;
        }
        if let Some(c) = self.params.get("bounded_chart") {
            let c = as_vec(c, "bounded_chart")?;
            if c.len() != d.dim() + 1 {
                return Err(Error::DimensionMismatch { expected: d.dim() + 1, got: c.len() });
            }
            d = d.with_bounded_chart(hyperplane_chart(&c)?);
        }
        Ok(d)
    }

    fn polytope(&self) -> Result<ConvexDomain> {
        let rows = as_rows(field(&self.params, "inequalities")?, "inequalities")?;
        let ineqs = rows
            .iter()
            .map(|r| {
                if r.len() < 2 {
                    return Err(invalid("inequality covectors need n+1 >= 2 entries"));
                }
                let n = r.len() - 1;
                Ok((DVector::from_column_slice(&r[..n]), r[n]))
            })
            .collect::<Result<Vec<_>>>()?;
        ConvexDomain::polytope(&ineqs, None)
    }

    fn composite(&self) -> Result<ConvexDomain> {
        let p = &self.params;
        let op = as_str(field(p, "op")?)?;
        match op {
            "disk" => Ok(ConvexDomain::unit_disk()),
            "ball" => {
                let c = as_vec(field(p, "center")?, "center")?;
                ConvexDomain::ball(DVector::from_vec(c), as_f64(field(p, "radius")?, "radius")?)
            }
            "lp_ball" => ConvexDomain::lp_ball(as_usize(field(p, "dim")?, "dim")?, as_f64(field(p, "p")?, "p")?),
            "simplex" => {
                let rows = as_rows(field(p, "vertices")?, "vertices")?;
                ConvexDomain::simplex(&rows.into_iter().map(DVector::from_vec).collect::<Vec<_>>())
            }
            "paraboloid" => paraboloid(as_usize(field(p, "dim")?, "dim")?),
            "lorentz" => lorentz(as_usize(field(p, "dim")?, "dim")?),
            "intersection" => {
                let base = p.get("basepoint").map(|b| as_vec(b, "basepoint")).transpose()?.map(DVector::from_vec);
                intersection(parts(p)?, base)
            }
            "transform" => {
                let m = matrix(&as_rows(field(p, "matrix")?, "matrix")?)?;
                let part: DomainSpec = serde_json::from_value(field(p, "part")?.clone()).map_err(|e| invalid(format!("part: {e}")))?;
                part.build()?.transformed(&ProjMap::normalize(m)?)
            }
            "convex_sum" => {
                let list = field(p, "parts")?.as_array().ok_or_else(|| invalid("parts must be a list"))?;
                if list.len() != 2 {
                    return Err(invalid("convex_sum takes exactly two parts"));
                }
                let a = embedded(&list[0])?;
                let b = embedded(&list[1])?;
                convex_sum(&a, &b)
            }
            other => Err(invalid(format!("unknown composite op '{other}'"))),
        }
    }
}

fn as_str(v: &Value) -> Result<&str> {
    v.as_str().ok_or_else(|| invalid("expected a string"))
}

fn parts(p: &Value) -> Result<Vec<ConvexDomain>> {
    let list = field(p, "parts")?.as_array().ok_or_else(|| invalid("parts must be a list"))?;
    list.iter()
        .map(|v| {
            let s: DomainSpec = serde_json::from_value(v.clone()).map_err(|e| invalid(format!("part: {e}")))?;
            s.build()
        })
        .collect()
}

fn embedded(v: &Value) -> Result<EmbeddedDomain> {
    if let Some(pt) = v.get("point") {
        return Ok(EmbeddedDomain::point(DVector::from_vec(as_vec(pt, "point")?)));
    }
    let s: DomainSpec = serde_json::from_value(field(v, "domain")?.clone()).map_err(|e| invalid(format!("domain: {e}")))?;
    let m = matrix(&as_rows(field(v, "embedding")?, "embedding")?)?;
    EmbeddedDomain::new(s.build()?, m)
}

/// Intersection, based at `base` or else at the first part basepoint
/// lying in every part.
fn intersection(parts: Vec<ConvexDomain>, base: Option<DVector<f64>>) -> Result<ConvexDomain> {
    let n = parts.first().ok_or_else(|| invalid("intersection needs parts"))?.dim();
    if let Some(d) = parts.iter().find(|d| d.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: d.dim() });
    }
    let base = match base {
        Some(b) => b,
        None => parts
            .iter()
            .map(|d| d.basepoint().clone())
            .find(|b| parts.iter().all(|d| d.contains(b)))
            .ok_or_else(|| invalid("no part basepoint lies in every part; give params.basepoint"))?,
    };
    let members: Vec<_> = parts.iter().map(|d| d.membership()).collect();
    ConvexDomain::new(n, base, move |x: &DVector<f64>| members.iter().all(|m| m(x)), "intersection")
}

fn paraboloid(dim: usize) -> Result<ConvexDomain> {
    if dim < 1 {
        return Err(invalid("paraboloid needs dim >= 1"));
    }
    let n = dim;
    let c = Constraint::new(
        move |x| x[n - 1] - x.rows(0, n - 1).norm_squared(),
        move |x| {
            let mut g = -2.0 * x;
            g[n - 1] = 1.0;
            g
        },
    );
    let mut base = DVector::zeros(n);
    base[n - 1] = 1.0;
    ConvexDomain::from_constraints(n, base, vec![c], "paraboloid")
}

fn lorentz(dim: usize) -> Result<ConvexDomain> {
    if dim < 2 {
        return Err(invalid("lorentz cone needs dim >= 2"));
    }
    let n = dim;
    let c = Constraint::new(
        move |x| x[n - 1] - x.rows(0, n - 1).norm(),
        move |x| {
            let r = x.rows(0, n - 1).norm().max(1e-300);
            let mut g = -x / r;
            g[n - 1] = 1.0;
            g
        },
    );
    let mut base = DVector::zeros(n);
    base[n - 1] = 1.0;
    ConvexDomain::from_constraints(n, base, vec![c], "lorentz")
}

fn catalog_domain(id: &str, params: &Value) -> Result<ConvexDomain> {
    let id = catalog::normalize_id(id)?;
    if let Some(body) = params.get("body") {
        let s: DomainSpec = serde_json::from_value(body.clone()).map_err(|e| invalid(format!("body: {e}")))?;
        return Ok(catalog::placeholder_with_body(id, s.build()?)?.domain);
    }
    Ok(catalog::get(id)?.domain)
}

/// Reads a domain spec from JSON text.
pub fn parse_domain(text: &str) -> Result<ConvexDomain> {
    DomainSpec::from_json(text)?.build()
}

/// A square matrix as row-major arrays, bare or under `"matrix"`.
pub fn parse_matrix(text: &str) -> Result<ProjMap> {
    let v: Value = serde_json::from_str(text).map_err(|e| invalid(format!("matrix: {e}")))?;
    let v = v.get("matrix").cloned().unwrap_or(v);
    ProjMap::from_rows(&as_rows(&v, "matrix")?)
}

/// Generators as one matrix, a list of matrices, `{"generators": [...],
/// "labels": [...]}`, or `{"families_of": id}` for the sampled families of a
/// catalog entry.
pub fn parse_generators(text: &str) -> Result<GeneratorSet> {
    let v: Value = serde_json::from_str(text).map_err(|e| invalid(format!("generators: {e}")))?;
    if let Some(id) = v.get("families_of") {
        return Ok(GeneratorSet::for_entry(&catalog::get(as_str(id)?)?));
    }
    if let Ok(rows) = serde_json::from_value::<Vec<Vec<f64>>>(v.clone()) {
        return GeneratorSet::from_maps(vec![ProjMap::from_rows(&rows)?]);
    }
    let (list, labels) = match v.get("generators") {
        Some(g) => (g.clone(), v.get("labels").cloned()),
        None => (v, None),
    };
    let mats: Vec<Vec<Vec<f64>>> = serde_json::from_value(list).map_err(|e| invalid(format!("generators: {e}")))?;
    let gens = mats.iter().map(|m| ProjMap::from_rows(m)).collect::<Result<Vec<_>>>()?;
    match labels {
        Some(l) => {
            let labels: Vec<String> = serde_json::from_value(l).map_err(|e| invalid(format!("labels: {e}")))?;
            GeneratorSet::new(gens, labels)
        }
        None => GeneratorSet::from_maps(gens),
    }
}

/// A point given by `n` affine or `n + 1` homogeneous coordinates.
pub fn parse_point(text: &str, dim: usize) -> Result<DVector<f64>> {
    let v: Vec<f64> = serde_json::from_str(text).map_err(|e| invalid(format!("point: {e}")))?;
    point_from(v, dim)
}

pub fn point_from(v: Vec<f64>, dim: usize) -> Result<DVector<f64>> {
    if v.len() == dim {
        return Ok(DVector::from_vec(v));
    }
    if v.len() == dim + 1 {
        let w = v[dim];
        if w == 0.0 {
            return Err(invalid("point lies at infinity of the affine chart"));
        }
        return Ok(DVector::from_iterator(dim, v[..dim].iter().map(|x| x / w)));
    }
    Err(Error::DimensionMismatch { expected: dim, got: v.len() })
}

/// A covector of length `n + 1`.
pub fn parse_covector(text: &str, dim: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = serde_json::from_str(text).map_err(|e| invalid(format!("covector: {e}")))?;
    if v.len() != dim + 1 {
        return Err(Error::DimensionMismatch { expected: dim + 1, got: v.len() });
    }
    Ok(v)
}
