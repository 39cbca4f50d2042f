//! Homogeneous coordinates: points, hyperplanes, projective maps (possibly
//! singular), affine embeddings and limits of map sequences.
//!
//! Points of the affine chart `R^n` are embedded as `(x, 1)`; the hyperplane
//! at infinity is the covector `(0, ..., 0, 1)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius, numerical_rank, sorted_svd};

/// Singular values below `RANK_TOL * sigma_max` count as zero.
pub const RANK_TOL: f64 = 1e-9;
/// Entries below this magnitude are skipped when fixing the sign.
pub const SIGN_TOL: f64 = 1e-12;
/// Pairwise tail distance required by [`limit_of_sequence`].
pub const CAUCHY_TOL: f64 = 1e-6;
/// Third singular value relative to the first for collinearity.
pub const COLLINEAR_TOL: f64 = 1e-8;
/// Minimum distance of a point to the kernel before a map may be applied.
pub const KERNEL_TOL: f64 = 1e-9;

fn canonical_sign<'a>(values: impl Iterator<Item = &'a f64>) -> f64 {
    for v in values {
        if v.abs() > SIGN_TOL {
            return v.signum();
        }
    }
    1.0
}

fn unit_canonical(v: DVector<f64>) -> Result<DVector<f64>> {
    let norm = v.norm();
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::InvalidInput("zero or non-finite homogeneous vector".into()));
    }
    let v = v / norm;
    let s = canonical_sign(v.iter());
    Ok(v * s)
}

/// Point of `RP^n` stored as a unit vector with its first significant
/// coordinate positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProjPoint {
    coords: DVector<f64>,
}

impl ProjPoint {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        Ok(Self { coords: unit_canonical(coords)? })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    /// Embeds an affine point as `[x : 1]`.
    pub fn from_affine(x: &DVector<f64>) -> Self {
        let n = x.len();
        let mut h = DVector::zeros(n + 1);
        h.rows_mut(0, n).copy_from(x);
        h[n] = 1.0;
        Self::new(h).expect("last coordinate is one")
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Projective dimension `n` (the vector has `n + 1` entries).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Affine coordinates in the chart `x_{n+1} = 1`, or `None` for points at infinity.
    pub fn to_affine(&self) -> Option<DVector<f64>> {
        let n = self.dim();
        let w = self.coords[n];
        if w.abs() <= 1e-14 {
            return None;
        }
        Some(self.coords.rows(0, n) / w)
    }

    pub fn is_at_infinity(&self) -> bool {
        self.to_affine().is_none()
    }

    /// Sine of the angle between representatives; zero iff the points agree.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        let c = self.coords.dot(&other.coords).abs().min(1.0);
        (1.0 - c * c).max(0.0).sqrt()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.iter().copied().collect()
    }
}

impl TryFrom<Vec<f64>> for ProjPoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(DVector::from_vec(v))
    }
}

impl From<ProjPoint> for Vec<f64> {
    fn from(p: ProjPoint) -> Self {
        p.to_vec()
    }
}

/// Hyperplane of `RP^n` given by a covector, canonicalized like [`ProjPoint`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Hyperplane {
    covector: DVector<f64>,
}

impl Hyperplane {
    pub fn new(covector: DVector<f64>) -> Result<Self> {
        Ok(Self { covector: unit_canonical(covector)? })
    }

    pub fn from_slice(c: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(c))
    }

    /// The hyperplane at infinity of the chart `x_{n+1} = 1` in `RP^n`.
    pub fn at_infinity(n: usize) -> Self {
        let mut c = DVector::zeros(n + 1);
        c[n] = 1.0;
        Self { covector: c }
    }

    pub fn covector(&self) -> &DVector<f64> {
        &self.covector
    }

    pub fn dim(&self) -> usize {
        self.covector.len() - 1
    }

    pub fn eval(&self, p: &ProjPoint) -> f64 {
        self.covector.dot(p.coords())
    }

    pub fn contains(&self, p: &ProjPoint, tol: f64) -> bool {
        self.eval(p).abs() <= tol
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.covector.iter().copied().collect()
    }
}

impl TryFrom<Vec<f64>> for Hyperplane {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(DVector::from_vec(v))
    }
}

impl From<Hyperplane> for Vec<f64> {
    fn from(h: Hyperplane) -> Self {
        h.to_vec()
    }
}

/// Element of `PM(n+1, R)`: a nonzero matrix up to scale, possibly singular.
#[derive(Debug, Clone)]
pub struct ProjMap {
    matrix: DMatrix<f64>,
    rank: usize,
    singular_values: Vec<f64>,
    kernel_basis: Vec<DVector<f64>>,
    range_basis: Vec<DVector<f64>>,
}

impl ProjMap {
    /// Canonical representative: unit Frobenius norm with the first
    /// significant entry (row-major) positive. Rank, kernel and range come
    /// from a singular value decomposition.
    pub fn normalize(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput(format!(
                "projective map must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let norm = frobenius(&m);
        if norm == 0.0 {
            return Err(Error::InvalidInput("zero matrix".into()));
        }
        let mut m = m / norm;
        // row-major scan
        let sign = {
            let mut s = 1.0;
            'outer: for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if m[(i, j)].abs() > SIGN_TOL {
                        s = m[(i, j)].signum();
                        break 'outer;
                    }
                }
            }
            s
        };
        m *= sign;
        let svd = sorted_svd(&m);
        let rank = numerical_rank(&svd.singular_values, RANK_TOL);
        let n1 = m.nrows();
        let range_basis = (0..rank).map(|i| svd.u.column(i).into_owned()).collect();
        let kernel_basis = (rank..n1).map(|i| svd.v_t.row(i).transpose()).collect();
        Ok(Self {
            matrix: m,
            rank,
            singular_values: svd.singular_values,
            kernel_basis,
            range_basis,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix must be square and nonempty".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::normalize(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn identity(n1: usize) -> Self {
        Self::normalize(DMatrix::identity(n1, n1)).expect("identity is nonzero")
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::normalize(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Size `n + 1` of the homogeneous matrix.
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn is_invertible(&self) -> bool {
        self.rank == self.size()
    }

    /// Orthonormal basis of the kernel `K(g)` (as homogeneous vectors).
    pub fn kernel_basis(&self) -> &[DVector<f64>] {
        &self.kernel_basis
    }

    /// Orthonormal basis of the range `R(g)`.
    pub fn range_basis(&self) -> &[DVector<f64>] {
        &self.range_basis
    }

    pub fn kernel_points(&self) -> Vec<ProjPoint> {
        self.kernel_basis.iter().map(|v| ProjPoint::new(v.clone()).unwrap()).collect()
    }

    pub fn range_points(&self) -> Vec<ProjPoint> {
        self.range_basis.iter().map(|v| ProjPoint::new(v.clone()).unwrap()).collect()
    }

    /// Euclidean distance of a unit representative of `p` to the kernel subspace.
    pub fn kernel_distance(&self, p: &ProjPoint) -> f64 {
        let v = p.coords();
        let mut residual = v.clone();
        for k in &self.kernel_basis {
            residual -= k * k.dot(v);
        }
        residual.norm()
    }

    /// Distance of a point to the range subspace.
    pub fn range_distance(&self, p: &ProjPoint) -> f64 {
        let v = p.coords();
        let mut residual = v.clone();
        for k in &self.range_basis {
            residual -= k * k.dot(v);
        }
        residual.norm()
    }

    pub fn apply(&self, p: &ProjPoint) -> Result<ProjPoint> {
        if p.coords().len() != self.size() {
            return Err(Error::DimensionMismatch { expected: self.size(), got: p.coords().len() });
        }
        let distance = self.kernel_distance(p);
        if distance <= KERNEL_TOL {
            return Err(Error::KernelHit { distance });
        }
        ProjPoint::new(&self.matrix * p.coords())
    }

    /// Image of an affine point, `None` when it lands at infinity or in the kernel.
    pub fn apply_affine(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let n = x.len();
        if n + 1 != self.size() {
            return None;
        }
        let y = self.matrix.columns(0, n) * x + self.matrix.column(n);
        let w = y[n];
        let scale = y.norm();
        if w.abs() <= 1e-14 * scale || scale == 0.0 {
            return None;
        }
        Some(y.rows(0, n) / w)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjMap) -> Result<ProjMap> {
        ProjMap::normalize(&self.matrix * &other.matrix)
    }

    pub fn inverse(&self) -> Result<ProjMap> {
        if !self.is_invertible() {
            return Err(Error::Singular);
        }
        let inv = self.matrix.clone().try_inverse().ok_or(Error::Singular)?;
        ProjMap::normalize(inv)
    }

    pub fn transpose(&self) -> ProjMap {
        ProjMap::normalize(self.matrix.transpose()).expect("nonzero")
    }

    /// Power `g^k` for any integer `k` (negative powers need invertibility).
    pub fn pow(&self, k: i32) -> Result<ProjMap> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = DMatrix::identity(self.size(), self.size());
        for _ in 0..k.unsigned_abs() {
            acc = ProjMap::normalize(&acc * base.matrix())?.matrix;
        }
        ProjMap::normalize(acc)
    }

    /// Frobenius distance between canonical representatives, insensitive to sign.
    pub fn distance(&self, other: &ProjMap) -> f64 {
        let a = frobenius(&(&self.matrix - &other.matrix));
        let b = frobenius(&(&self.matrix + &other.matrix));
        a.min(b)
    }

    /// The same element with singular values below the rank cutoff set to zero.
    pub fn truncated(&self) -> ProjMap {
        if self.rank == self.size() {
            return self.clone();
        }
        let svd = sorted_svd(&self.matrix);
        let n1 = self.size();
        let mut m = DMatrix::zeros(n1, n1);
        for i in 0..self.rank {
            m += svd.u.column(i) * svd.v_t.row(i) * svd.singular_values[i];
        }
        ProjMap::normalize(m).expect("rank >= 1")
    }

    /// Whether the hyperplane is invariant (its covector is an eigenvector of the transpose).
    pub fn preserves_hyperplane(&self, h: &Hyperplane, rel_tol: f64) -> bool {
        let c = h.covector();
        let v = self.matrix.transpose() * c;
        let norm = v.norm();
        if norm == 0.0 {
            return false;
        }
        let residual = &v - c * c.dot(&v);
        residual.norm() <= rel_tol * norm
    }

    /// Whether a point is fixed.
    pub fn fixes_point(&self, p: &ProjPoint, tol: f64) -> bool {
        match self.apply(p) {
            Ok(q) => q.distance(p) <= tol,
            Err(_) => false,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.size()).map(|i| self.matrix.row(i).iter().copied().collect()).collect()
    }
}

impl PartialEq for ProjMap {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

/// Result of [`limit_of_sequence`]: the limit and the Cauchy certificate.
#[derive(Debug, Clone)]
pub struct SequenceLimit {
    pub limit: ProjMap,
    /// Largest pairwise distance among the last quarter of the sequence.
    pub tail_deviation: f64,
    pub tail_len: usize,
}

/// Limit in `PM(n+1, R)` of a sequence whose normalized tail is Cauchy.
///
/// The last quarter of the sequence must have pairwise distance below
/// [`CAUCHY_TOL`]; callers pass a convergent subsequence otherwise.
pub fn limit_of_sequence(seq: &[ProjMap]) -> Result<SequenceLimit> {
    let last = seq.last().ok_or_else(|| Error::InvalidInput("empty sequence".into()))?;
    if seq.iter().any(|g| g.size() != last.size()) {
        return Err(Error::InvalidInput("maps of different sizes".into()));
    }
    let tail_len = (seq.len() / 4).max(1);
    let tail = &seq[seq.len() - tail_len..];
    let mut deviation: f64 = 0.0;
    for i in 0..tail.len() {
        for j in (i + 1)..tail.len() {
            deviation = deviation.max(tail[i].distance(&tail[j]));
        }
    }
    if deviation >= CAUCHY_TOL {
        return Err(Error::NoLimit { deviation, tolerance: CAUCHY_TOL });
    }
    Ok(SequenceLimit { limit: last.truncated(), tail_deviation: deviation, tail_len })
}

/// Element of `GL(n, R) ⋉ R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    linear: DMatrix<f64>,
    translation: DVector<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = linear.nrows();
        if !linear.is_square() || translation.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: translation.len() });
        }
        let det = linear.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Singular);
        }
        Ok(Self { linear, translation })
    }

    /// Skips the invertibility test, for maps invertible by construction
    /// whose determinant is lost to cancellation.
    pub(crate) fn from_parts(linear: DMatrix<f64>, translation: DVector<f64>) -> Self {
        debug_assert!(linear.is_square() && translation.len() == linear.nrows());
        Self { linear, translation }
    }

    pub fn linear_only(linear: DMatrix<f64>) -> Result<Self> {
        let n = linear.nrows();
        Self::new(linear, DVector::zeros(n))
    }

    pub fn translation_only(t: DVector<f64>) -> Self {
        let n = t.len();
        Self { linear: DMatrix::identity(n, n), translation: t }
    }

    pub fn identity(n: usize) -> Self {
        Self::translation_only(DVector::zeros(n))
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * x + &self.translation
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = self.linear.clone().try_inverse().expect("checked invertible at construction");
        let t = -(&inv * &self.translation);
        AffineMap { linear: inv, translation: t }
    }

    /// Homogeneous block matrix `[[L, t], [0, 1]]` (not normalized).
    pub fn homogeneous(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.linear);
        m.view_mut((0, n), (n, 1)).copy_from(&self.translation);
        m[(n, n)] = 1.0;
        m
    }
}

/// Projectivization of an affine map.
pub fn embed_affine(a: &AffineMap) -> ProjMap {
    ProjMap::normalize(a.homogeneous()).expect("affine block matrix is nonzero")
}

/// Whether `g` preserves the given hyperplane, i.e. acts affinely on its complement.
pub fn is_affine(g: &ProjMap, infinity: &Hyperplane) -> bool {
    g.preserves_hyperplane(infinity, 1e-9)
}

/// `[[I, 0], [c^T]]`: sends the hyperplane `c·(x, 1) = 0` to infinity.
/// Invertible iff the last entry of `c` is nonzero.
pub fn hyperplane_chart(c: &[f64]) -> Result<ProjMap> {
    let n1 = c.len();
    if n1 == 0 || c[n1 - 1] == 0.0 {
        return Err(Error::Singular);
    }
    let mut m = DMatrix::identity(n1, n1);
    for (j, &cj) in c.iter().enumerate() {
        m[(n1 - 1, j)] = cj;
    }
    ProjMap::normalize(m)
}

/// Cross ratio `[s1,p2][p1,s2] / ([s1,p1][p2,s2])` of four collinear points,
/// where `[a,b]` is the determinant of the coordinates along the common line.
/// In an affine parametrization this is `(s1-p2)(p1-s2) / ((s1-p1)(p2-s2))`.
pub fn cross_ratio(s1: &ProjPoint, p1: &ProjPoint, p2: &ProjPoint, s2: &ProjPoint) -> Result<f64> {
    let n1 = s1.coords().len();
    for q in [p1, p2, s2] {
        if q.coords().len() != n1 {
            return Err(Error::DimensionMismatch { expected: n1, got: q.coords().len() });
        }
    }
    let pts = [s1, p1, p2, s2];
    let mut stacked = DMatrix::zeros(4, n1);
    for (i, p) in pts.iter().enumerate() {
        stacked.set_row(i, &p.coords().transpose());
    }
    let svd = sorted_svd(&stacked);
    if svd.singular_values.len() >= 3 {
        let ratio = svd.singular_values[2] / svd.singular_values[0];
        if ratio >= COLLINEAR_TOL {
            return Err(Error::NotCollinear { ratio });
        }
    }
    let e = svd.v_t.row(0).transpose();
    let f = svd.v_t.row(1).transpose();
    let line: Vec<(f64, f64)> = pts.iter().map(|p| (p.coords().dot(&e), p.coords().dot(&f))).collect();
    let det = |a: (f64, f64), b: (f64, f64)| a.0 * b.1 - a.1 * b.0;
    let (s1, p1, p2, s2) = (line[0], line[1], line[2], line[3]);
    let d_s1p1 = det(s1, p1);
    let d_p2s2 = det(p2, s2);
    if d_s1p1.abs() < 1e-12 {
        return Err(Error::Coincident("s1 = p1".into()));
    }
    if d_p2s2.abs() < 1e-12 {
        return Err(Error::Coincident("p2 = s2".into()));
    }
    Ok(det(s1, p2) * det(p1, s2) / (d_s1p1 * d_p2s2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn normalize_identity() {
        let g = ProjMap::normalize(DMatrix::identity(3, 3)).unwrap();
        assert_eq!(g.rank(), 3);
        assert!(g.kernel_basis().is_empty());
        let expected = DMatrix::<f64>::identity(3, 3) / 3f64.sqrt();
        assert!(frobenius(&(g.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn normalize_projection() {
        let g = ProjMap::diagonal(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(g.rank(), 1);
        assert_eq!(g.kernel_basis().len(), 2);
        let r = ProjPoint::new(g.range_basis()[0].clone()).unwrap();
        assert!(r.distance(&ProjPoint::from_slice(&[1.0, 0.0, 0.0]).unwrap()) < 1e-15);
        for k in g.kernel_basis() {
            assert!(k[0].abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_diag_2_2_quarter() {
        let g = ProjMap::diagonal(&[2.0, 2.0, 0.25]).unwrap();
        assert_eq!(g.rank(), 3);
        assert!(g.kernel_basis().is_empty());
    }

    #[test]
    fn normalize_rejects_zero() {
        assert!(matches!(ProjMap::normalize(DMatrix::zeros(2, 2)), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn sign_is_canonical() {
        let a = ProjMap::normalize(DMatrix::identity(2, 2) * -3.0).unwrap();
        let b = ProjMap::identity(2);
        assert!(a.distance(&b) < 1e-15);
        let p = ProjPoint::from_slice(&[0.0, -2.0, 1.0]).unwrap();
        assert!(p.coords()[1] > 0.0);
    }

    #[test]
    fn apply_cases() {
        let id = ProjMap::identity(3);
        let p = ProjPoint::from_slice(&[1.0, 2.0, 3.0]).unwrap();
        assert!(id.apply(&p).unwrap().distance(&p) < 1e-15);

        let proj = ProjMap::diagonal(&[1.0, 0.0, 0.0]).unwrap();
        let kernel_point = ProjPoint::from_slice(&[0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(proj.apply(&kernel_point), Err(Error::KernelHit { .. })));
        let q = proj.apply(&ProjPoint::from_slice(&[1.0, 1.0, 0.0]).unwrap()).unwrap();
        assert!(q.distance(&ProjPoint::from_slice(&[1.0, 0.0, 0.0]).unwrap()) < 1e-15);
    }

    #[test]
    fn limit_of_scaling_is_projection() {
        let seq: Vec<ProjMap> = (1..=40)
            .map(|i| ProjMap::diagonal(&[1.0, 2f64.powi(-i), 2f64.powi(-i)]).unwrap())
            .collect();
        let lim = limit_of_sequence(&seq).unwrap();
        assert_eq!(lim.limit.rank(), 1);
        let r = ProjPoint::new(lim.limit.range_basis()[0].clone()).unwrap();
        assert!(r.distance(&ProjPoint::from_slice(&[1.0, 0.0, 0.0]).unwrap()) < 1e-12);
        assert!(lim.tail_deviation < CAUCHY_TOL);
    }

    #[test]
    fn limit_of_constant_sequence() {
        let seq = vec![ProjMap::identity(3); 8];
        let lim = limit_of_sequence(&seq).unwrap();
        assert!(lim.limit.distance(&ProjMap::identity(3)) < 1e-12);
    }

    #[test]
    fn limit_of_triangle_automorphisms() {
        let seq: Vec<ProjMap> = (1..=40)
            .map(|i| ProjMap::diagonal(&[2f64.powi(i), 1.0, 2f64.powi(-i)]).unwrap())
            .collect();
        let lim = limit_of_sequence(&seq).unwrap();
        // Entrywise by hand: diag(1, 2^-i, 4^-i) / norm -> diag(1, 0, 0).
        let expected = ProjMap::diagonal(&[1.0, 0.0, 0.0]).unwrap();
        assert!(lim.limit.distance(&expected) < 1e-9);
        assert_eq!(lim.limit.rank(), 1);
        assert_eq!(lim.limit.kernel_basis().len(), 2);
    }

    #[test]
    fn divergent_sequence_has_no_limit() {
        let seq: Vec<ProjMap> = (0..20)
            .map(|i| {
                let t = i as f64;
                ProjMap::normalize(DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])).unwrap()
            })
            .collect();
        assert!(matches!(limit_of_sequence(&seq), Err(Error::NoLimit { .. })));
        assert!(limit_of_sequence(&[]).is_err());
    }

    #[test]
    fn embed_translation_fixes_infinity() {
        let a = AffineMap::translation_only(v(&[1.0, 0.0]));
        let g = embed_affine(&a);
        assert!(is_affine(&g, &Hyperplane::at_infinity(2)));
        let x = g.apply_affine(&v(&[2.0, 5.0])).unwrap();
        assert!((x - v(&[3.0, 5.0])).norm() < 1e-14);
    }

    #[test]
    fn rotation_and_diagonal_map_are_affine() {
        let rot = AffineMap::linear_only(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])).unwrap();
        assert!(is_affine(&embed_affine(&rot), &Hyperplane::at_infinity(2)));
        // A^T (0,0,1) = (0,0,1/4) is proportional to (0,0,1).
        let g = ProjMap::diagonal(&[2.0, 2.0, 0.25]).unwrap();
        assert!(is_affine(&g, &Hyperplane::at_infinity(2)));
        let h = ProjMap::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]]).unwrap();
        assert!(!is_affine(&h, &Hyperplane::at_infinity(2)));
    }

    #[test]
    fn affine_compose_matches_matrix_product() {
        let a = AffineMap::new(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0]), v(&[1.0, -1.0])).unwrap();
        let b = AffineMap::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 3.0]), v(&[0.5, 2.0])).unwrap();
        let lhs = embed_affine(&a.compose(&b));
        let rhs = embed_affine(&a).compose(&embed_affine(&b)).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12);
        let x = v(&[0.3, -0.7]);
        assert!((a.inverse().apply(&a.apply(&x)) - x).norm() < 1e-12);
    }

    fn on_line(t: f64) -> ProjPoint {
        ProjPoint::from_affine(&v(&[t, 2.0 * t + 1.0]))
    }

    #[test]
    fn cross_ratio_thirds() {
        let r = cross_ratio(&on_line(0.0), &on_line(1.0 / 3.0), &on_line(2.0 / 3.0), &on_line(1.0)).unwrap();
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cross_ratio_equal_interior_points() {
        let r = cross_ratio(&on_line(-1.0), &on_line(0.3), &on_line(0.3), &on_line(2.0)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cross_ratio_symmetric_chord() {
        for &r in &[0.1, 0.5, 0.9] {
            let cr = cross_ratio(&on_line(-1.0), &on_line(0.0), &on_line(r), &on_line(1.0)).unwrap();
            assert!((cr - (1.0 + r) / (1.0 - r)).abs() < 1e-10);
        }
    }

    #[test]
    fn cross_ratio_errors() {
        let off = ProjPoint::from_affine(&v(&[0.5, 0.0]));
        assert!(matches!(
            cross_ratio(&on_line(0.0), &off, &on_line(0.5), &on_line(1.0)),
            Err(Error::NotCollinear { .. })
        ));
        assert!(matches!(
            cross_ratio(&on_line(0.0), &on_line(0.0), &on_line(0.5), &on_line(1.0)),
            Err(Error::Coincident(_))
        ));
    }

    #[test]
    fn point_at_infinity_round_trip() {
        let p = ProjPoint::from_slice(&[1.0, 0.0, 0.0]).unwrap();
        assert!(p.is_at_infinity());
        let q = ProjPoint::from_affine(&v(&[2.0, -1.0]));
        assert!((q.to_affine().unwrap() - v(&[2.0, -1.0])).norm() < 1e-14);
    }
}
