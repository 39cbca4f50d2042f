//! Hilbert metric, metric balls and translation lengths.

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use crate::domain::{check_preserves, ConvexDomain};
use crate::error::{Error, Result};
use crate::linalg::eigenvalues;
use crate::projective::ProjMap;
use crate::sampling::{substream, unit_vector};

/// Chord through two interior points with its boundary endpoints
/// (`None` marks an endpoint at infinity).
#[derive(Debug, Clone)]
pub struct HilbertPointPair {
    pub p1: DVector<f64>,
    pub p2: DVector<f64>,
    pub s1: Option<DVector<f64>>,
    pub s2: Option<DVector<f64>>,
}

/// Chord `s1, p1, p2, s2` through two distinct interior points.
pub fn chord(d: &ConvexDomain, p1: &DVector<f64>, p2: &DVector<f64>) -> Result<HilbertPointPair> {
    if !d.contains(p1) || !d.contains(p2) {
        return Err(Error::NotInterior);
    }
    let diff = p2 - p1;
    let len = diff.norm();
    if len == 0.0 {
        return Err(Error::Coincident("p1 = p2".into()));
    }
    let u = diff / len;
    let s1 = d.exit_time_precise(p1, &(-&u)).map(|t| p1 - &u * t);
    let s2 = d.exit_time_precise(p2, &u).map(|t| p2 + &u * t);
    Ok(HilbertPointPair { p1: p1.clone(), p2: p2.clone(), s1, s2 })
}

/// `ln` of the cross ratio of the chord through `p1, p2`. An endpoint at
/// infinity contributes the factor one.
pub fn hilbert_distance(d: &ConvexDomain, p1: &DVector<f64>, p2: &DVector<f64>) -> Result<f64> {
    if p1.len() != d.dim() || p2.len() != d.dim() {
        return Err(Error::DimensionMismatch { expected: d.dim(), got: p1.len().max(p2.len()) });
    }
    if !d.contains(p1) || !d.contains(p2) {
        return Err(Error::NotInterior);
    }
    let diff = p2 - p1;
    let len = diff.norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    let u = diff / len;
    let back = d.exit_time_precise(p1, &(-&u));
    let ahead = d.exit_time_precise(p2, &u);
    if back.is_none() && ahead.is_none() {
        return Err(Error::Degenerate("the line through the points stays in the domain".into()));
    }
    let term = |t: Option<f64>| t.map_or(0.0, |t| (len / t).ln_1p());
    Ok(term(back) + term(ahead))
}

/// `ln(λ/μ)` for the extreme eigenvalue moduli of an invertible map.
pub fn translation_length_spectral(g: &ProjMap) -> Result<f64> {
    if !g.is_invertible() {
        return Err(Error::Singular);
    }
    let moduli: Vec<f64> = eigenvalues(g.matrix()).iter().map(|z| z.norm()).collect();
    let max = moduli.iter().cloned().fold(0.0, f64::max);
    let min = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::Singular);
    }
    Ok((max / min).ln())
}

/// Radius schedule of the ball sampler.
pub const BALL_RADII: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

/// Point at Hilbert distance `rho` from `x` in direction `u`, found by
/// inverting the distance along the chord. `None` if the whole line lies in
/// the domain.
pub fn point_at_distance(d: &ConvexDomain, x: &DVector<f64>, u: &DVector<f64>, rho: f64) -> Option<DVector<f64>> {
    let plus = d.exit_time_precise(x, u);
    let minus = d.exit_time_precise(x, &(-u));
    let e = rho.exp();
    let t = match (plus, minus) {
        (Some(tp), Some(tm)) => tm * tp * (e - 1.0) / (tp + e * tm),
        (None, Some(tm)) => tm * (e - 1.0),
        (Some(tp), None) => tp * (-(-rho).exp_m1()),
        (None, None) => return None,
    };
    let y = x + u * t;
    d.contains(&y).then_some(y)
}

/// Random point of the Hilbert ball of radius `radius` about `x`: uniform
/// direction, distance uniform in `[0, radius]`.
pub fn sample_hilbert_ball<R: Rng + ?Sized>(d: &ConvexDomain, x: &DVector<f64>, radius: f64, rng: &mut R) -> DVector<f64> {
    for _ in 0..64 {
        let u = unit_vector(rng, d.dim());
        let rho = rng.random::<f64>() * radius;
        if let Some(y) = point_at_distance(d, x, &u, rho) {
            return y;
        }
    }
    x.clone()
}

/// Estimate of `inf_x d(x, g x)` over sampled points.
#[derive(Debug, Clone)]
pub struct EmpiricalLength {
    pub value: f64,
    pub argmin: DVector<f64>,
    pub samples: usize,
}

/// Minimum displacement of `g` over Hilbert-ball samples around the basepoint
/// with radii `1, 2, 4, ..., 32`.
pub fn translation_length_empirical(d: &ConvexDomain, g: &ProjMap, sample_budget: usize, seed: u64) -> Result<EmpiricalLength> {
    let mut rng = substream(seed, 0);
    let check: Vec<DVector<f64>> = (0..200).map(|i| sample_hilbert_ball(d, d.basepoint(), BALL_RADII[i % 6], &mut rng)).collect();
    check_preserves(d, g, &check)?;
    const BLOCK: usize = 1024;
    let blocks = sample_budget.div_ceil(BLOCK).max(1);
    let best = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = substream(seed, block as u64 + 1);
            let mut best: Option<(f64, DVector<f64>)> = None;
            let count = BLOCK.min(sample_budget.saturating_sub(block * BLOCK)).max(1);
            for i in 0..count {
                let radius = BALL_RADII[(block * BLOCK + i) % BALL_RADII.len()];
                let x = sample_hilbert_ball(d, d.basepoint(), radius, &mut rng);
                let Some(gx) = g.apply_affine(&x) else { continue };
                if let Ok(dist) = hilbert_distance(d, &x, &gx) {
                    if best.as_ref().is_none_or(|(b, _)| dist < *b) {
                        best = Some((dist, x));
                    }
                }
            }
            best
        })
        .collect::<Vec<_>>();
    let (value, argmin) = best
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::Degenerate("no valid samples".into()))?;
    Ok(EmpiricalLength { value, argmin, samples: sample_budget })
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

    #[test]
    fn disk_radial_distance() {
        let disk = ConvexDomain::unit_disk();
        for k in 1..10 {
            let r = k as f64 / 10.0;
            let d = hilbert_distance(&disk, &v(&[0.0, 0.0]), &v(&[r, 0.0])).unwrap();
            assert!((d - ((1.0 + r) / (1.0 - r)).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_and_one_sided() {
        let q = quadrant();
        assert_eq!(hilbert_distance(&q, &v(&[2.0, 3.0]), &v(&[2.0, 3.0])).unwrap(), 0.0);
        let d = hilbert_distance(&q, &v(&[1.0, 1.0]), &v(&[4.0, 1.0])).unwrap();
        assert!((d - 4f64.ln()).abs() < 1e-9);
        assert!(matches!(hilbert_distance(&q, &v(&[-1.0, 1.0]), &v(&[1.0, 1.0])), Err(Error::NotInterior)));
    }

    #[test]
    fn spectral_lengths() {
        let g = ProjMap::diagonal(&[2.0, 2.0, 0.25]).unwrap();
        assert!((translation_length_spectral(&g).unwrap() - 8f64.ln()).abs() < 1e-12);
        assert!(translation_length_spectral(&ProjMap::identity(3)).unwrap().abs() < 1e-12);
        let g = ProjMap::diagonal(&[3.0, 1.0, 1.0 / 3.0]).unwrap();
        assert!((translation_length_spectral(&g).unwrap() - 9f64.ln()).abs() < 1e-12);
        assert!(matches!(translation_length_spectral(&ProjMap::diagonal(&[1.0, 0.0]).unwrap()), Err(Error::Singular)));
    }

    #[test]
    fn ball_sampler_hits_requested_radius() {
        let disk = ConvexDomain::unit_disk();
        let x = v(&[0.2, -0.1]);
        let mut rng = crate::sampling::seeded(4);
        for k in 0..50 {
            let u = unit_vector(&mut rng, 2);
            let rho = 0.2 * k as f64;
            let y = point_at_distance(&disk, &x, &u, rho).unwrap();
            assert!((hilbert_distance(&disk, &x, &y).unwrap() - rho).abs() < 1e-7 * (1.0 + rho));
        }
        let q = quadrant();
        let y = point_at_distance(&q, &v(&[1.0, 1.0]), &v(&[1.0, 0.0]), 8f64.ln()).unwrap();
        assert!((y - v(&[8.0, 1.0])).norm() < 1e-9);
    }

    #[test]
    fn empirical_identity_and_shear() {
        let disk = ConvexDomain::unit_disk();
        let e = translation_length_empirical(&disk, &ProjMap::identity(3), 200, 0).unwrap();
        assert_eq!(e.value, 0.0);

        let parabola = ConvexDomain::from_constraints(
            2,
            v(&[0.0, 1.0]),
            vec![Constraint::new(|x| x[1] - x[0] * x[0], |x| v(&[-2.0 * x[0], 1.0]))],
            "parabola",
        )
        .unwrap();
        let shear = ProjMap::from_rows(&[vec![1.0, 0.0, 0.1], vec![0.2, 1.0, 0.01], vec![0.0, 0.0, 1.0]]).unwrap();
        let e = translation_length_empirical(&parabola, &shear, 4000, 1).unwrap();
        assert!(e.value < 0.05, "{}", e.value);
    }

    #[test]
    fn empirical_rejects_non_automorphism() {
        let disk = ConvexDomain::unit_disk();
        let g = ProjMap::diagonal(&[2.0, 1.0, 1.0]).unwrap();
        assert!(matches!(translation_length_empirical(&disk, &g, 100, 0), Err(Error::NotPreserved(_))));
    }
}
