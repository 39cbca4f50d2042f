//! Dense linear-algebra helpers shared by the geometric modules.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Singular value decomposition with singular values sorted in descending order.
#[derive(Debug, Clone)]
pub struct SortedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    /// Rows are right singular vectors.
    pub v_t: DMatrix<f64>,
}

pub fn sorted_svd(m: &DMatrix<f64>) -> SortedSvd {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut su = DMatrix::zeros(u.nrows(), order.len());
    let mut sv = DMatrix::zeros(order.len(), v_t.ncols());
    let mut values = Vec::with_capacity(order.len());
    for (k, &i) in order.iter().enumerate() {
        su.set_column(k, &u.column(i));
        sv.set_row(k, &v_t.row(i));
        values.push(svd.singular_values[i]);
    }
    // Right singular vectors beyond min(rows, cols) are not returned by the thin
    // decomposition; complete them to an orthonormal basis.
    let v_t = if sv.nrows() < m.ncols() {
        let rows: Vec<DVector<f64>> = (0..sv.nrows()).map(|i| sv.row(i).transpose()).collect();
        let extra = orthonormal_complement(&rows, m.ncols());
        let mut full = DMatrix::zeros(m.ncols(), m.ncols());
        for (i, r) in rows.iter().chain(extra.iter()).enumerate() {
            full.set_row(i, &r.transpose());
        }
        values.resize(m.ncols(), 0.0);
        full
    } else {
        sv
    };
    SortedSvd { u: su, singular_values: values, v_t }
}

/// Numerical rank with the scale-free cutoff `sigma_i >= rel_tol * sigma_max`.
pub fn numerical_rank(values: &[f64], rel_tol: f64) -> usize {
    let max = values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s >= rel_tol * max).count()
}

/// Orthonormal basis of the null space of `m` (relative cutoff `rel_tol`).
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let svd = sorted_svd(m);
    let max = svd.singular_values.first().cloned().unwrap_or(0.0);
    let n = m.ncols();
    (0..n)
        .filter(|&i| max == 0.0 || svd.singular_values.get(i).copied().unwrap_or(0.0) < rel_tol * max)
        .map(|i| svd.v_t.row(i).transpose())
        .collect()
}

/// Extends `basis` (assumed orthonormal) to an orthonormal basis of R^dim and
/// returns only the added vectors.
pub fn orthonormal_complement(basis: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let mut current: Vec<DVector<f64>> = basis.to_vec();
    let mut extra = Vec::new();
    for i in 0..dim {
        if current.len() == dim {
            break;
        }
        let mut e = DVector::zeros(dim);
        e[i] = 1.0;
        for b in &current {
            let c = b.dot(&e);
            e -= b * c;
        }
        // second pass for stability
        for b in &current {
            let c = b.dot(&e);
            e -= b * c;
        }
        let norm = e.norm();
        if norm > 1e-8 {
            e /= norm;
            current.push(e.clone());
            extra.push(e);
        }
    }
    extra
}

/// Gram-Schmidt on a list of vectors, dropping those dependent within `tol`.
pub fn orthonormalize(vectors: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        let norm = w.norm();
        if norm > tol * v.norm().max(1e-300) {
            out.push(w / norm);
        }
    }
    out
}

/// Eigenvalues of a general real square matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    m.clone().complex_eigenvalues().iter().cloned().collect()
}

/// Groups eigenvalues whose mutual distance is below `radius` and replaces
/// every group by its arithmetic mean. The mean of a cluster coming from a
/// perturbed Jordan block is far better conditioned than its members.
pub fn cluster_eigenvalues(values: &[Complex<f64>], radius: f64) -> Vec<(Complex<f64>, usize)> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut j = i;
        while label[j] != r {
            let next = label[j];
            label[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() < radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex<f64>, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += values[i];
                g.2 += 1;
            }
            None => groups.push((r, values[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| (sum / count as f64, count))
        .collect()
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Matrix exponential.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().exp()
}

fn sqrt_denman_beavers(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let y_inv = y.clone().try_inverse().ok_or(Error::Singular)?;
        let z_inv = z.clone().try_inverse().ok_or(Error::Singular)?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let delta = frobenius(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * frobenius(&y).max(1.0) {
            return Ok(y);
        }
    }
    Err(Error::NoRealLogarithm("square-root iteration did not converge".into()))
}

/// Logarithm of a matrix close to the identity through the series of
/// `2 artanh((X - I)(X + I)^-1)`.
fn log_near_identity(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = x.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let denom = (x + &id).try_inverse().ok_or(Error::Singular)?;
    let z = (x - &id) * denom;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = z.clone();
    for k in 1..60 {
        term = &term * &z2;
        let contribution = &term / (2 * k + 1) as f64;
        sum += &contribution;
        if frobenius(&contribution) < 1e-18 * frobenius(&sum).max(1e-300) {
            break;
        }
    }
    Ok(sum * 2.0)
}

/// Real logarithm by inverse scaling and squaring.
pub fn logm_scaling_squaring(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let scale = frobenius(a);
    for ev in eigenvalues(a) {
        if ev.im.abs() <= 1e-12 * scale && ev.re <= 1e-14 * scale {
            return Err(Error::NoRealLogarithm(format!(
                "eigenvalue {:.3e} on the closed negative real axis",
                ev.re
            )));
        }
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut x = a.clone();
    let mut k = 0;
    while frobenius(&(&x - &id)) > 0.25 {
        x = sqrt_denman_beavers(&x)?;
        k += 1;
        if k > 64 {
            return Err(Error::NoRealLogarithm("scaling did not reach the identity".into()));
        }
    }
    Ok(log_near_identity(&x)? * 2f64.powi(k))
}

/// Real matrix logarithm. Diagonalizable matrices with a positive real
/// spectrum go through their eigenbasis; all others fall back to inverse
/// scaling and squaring. Failure is reported, never approximated.
pub fn logm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let scale = frobenius(a);
    if scale == 0.0 {
        return Err(Error::Singular);
    }
    let values = eigenvalues(a);
    let all_positive_real = values
        .iter()
        .all(|v| v.im.abs() <= 1e-12 * scale && v.re > 1e-14 * scale);
    if all_positive_real {
        let clusters = cluster_eigenvalues(&values, 1e-9 * scale);
        let mut vecs = Vec::with_capacity(n);
        let mut logs = Vec::with_capacity(n);
        let mut ok = true;
        for (lambda, mult) in &clusters {
            let shifted = a - DMatrix::<f64>::identity(n, n) * lambda.re;
            let kernel = null_space(&shifted, 1e-10);
            if kernel.len() != *mult {
                ok = false;
                break;
            }
            for v in kernel {
                vecs.push(v);
                logs.push(lambda.re.ln());
            }
        }
        if ok && vecs.len() == n {
            let v = DMatrix::from_columns(&vecs);
            let cond = {
                let s = sorted_svd(&v).singular_values;
                s[0] / s[n - 1].max(1e-300)
            };
            if cond < 1e8 {
                let v_inv = v.clone().try_inverse().ok_or(Error::Singular)?;
                let d = DMatrix::from_diagonal(&DVector::from_vec(logs));
                return Ok(v * d * v_inv);
            }
        }
    }
    logm_scaling_squaring(a)
}
