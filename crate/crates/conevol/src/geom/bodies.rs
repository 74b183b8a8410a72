//! Canonical body constructors used by tests, the corpus, and the CLI.

use nalgebra::DVector;
use rand::Rng;

use crate::error::Result;
use crate::geom::linalg::orthonormalize;
use crate::geom::Polytope;

/// Axis-aligned cube [-half, half]^n.
pub fn cube(n: usize, half: f64) -> Result<Polytope> {
    rect_box(&vec![half; n])
}

/// Axis-aligned box with the given half-lengths.
pub fn rect_box(halves: &[f64]) -> Result<Polytope> {
    let n = halves.len();
    let mut pts = Vec::with_capacity(1 << n);
    for mask in 0..(1u32 << n) {
        let coords: Vec<f64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { halves[i] } else { -halves[i] })
            .collect();
        pts.push(DVector::from_column_slice(&coords));
    }
    Polytope::from_points(n, pts)
}

/// Cross-polytope conv{±e_i}.
pub fn cross_polytope(n: usize) -> Result<Polytope> {
    let mut pts = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut p = DVector::zeros(n);
        p[i] = 1.0;
        pts.push(p.clone());
        p[i] = -1.0;
        pts.push(p);
    }
    Polytope::from_points(n, pts)
}

/// Regular n-simplex centered at the origin with circumradius 1.
///
/// Built from the n+1 standard basis vectors of R^{n+1} expressed in an
/// orthonormal frame of the sum-zero hyperplane.
pub fn regular_simplex(n: usize) -> Result<Polytope> {
    let m = n + 1;
    let shifted: Vec<DVector<f64>> = (0..m)
        .map(|i| {
            let mut v = DVector::from_element(m, -1.0 / m as f64);
            v[i] += 1.0;
            v
        })
        .collect();
    let diffs: Vec<DVector<f64>> = (0..n).map(|i| &shifted[i] - &shifted[i + 1]).collect();
    let basis = orthonormalize(&diffs, 1e-12);
    debug_assert_eq!(basis.len(), n);
    let radius = (n as f64 / m as f64).sqrt();
    let pts: Vec<DVector<f64>> = shifted
        .iter()
        .map(|v| DVector::from_iterator(n, basis.iter().map(|b| b.dot(v) / radius)))
        .collect();
    Ok(Polytope::from_points(n, pts)?.translate_to_centroid())
}

/// Regular polygon with `sides` vertices on the unit circle.
pub fn regular_polygon(sides: usize, radius: f64) -> Result<Polytope> {
    let pts: Vec<DVector<f64>> = (0..sides)
        .map(|j| {
            let a = 2.0 * std::f64::consts::PI * j as f64 / sides as f64;
            DVector::from_column_slice(&[radius * a.cos(), radius * a.sin()])
        })
        .collect();
    Polytope::from_points(2, pts)
}

/// Prism base x [-half, half] one dimension up.
pub fn prism_over(base: &Polytope, half: f64) -> Result<Polytope> {
    let n = base.dim() + 1;
    let mut pts = Vec::with_capacity(2 * base.vertices().len());
    for v in base.vertices() {
        for &s in &[-half, half] {
            let mut p = DVector::zeros(n);
            for i in 0..base.dim() {
                p[i] = v[i];
            }
            p[n - 1] = s;
            pts.push(p);
        }
    }
    Polytope::from_points(n, pts)
}

pub(crate) fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; one value per call is plenty here.
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Uniform unit direction.
pub(crate) fn random_direction(rng: &mut impl Rng, dim: usize) -> DVector<f64> {
    loop {
        let d = DVector::from_iterator(dim, (0..dim).map(|_| gaussian(rng)));
        let norm = d.norm();
        if norm > 1e-9 {
            return d / norm;
        }
    }
}

/// Random centered polytope: hull of `points` draws from a spherical shell,
/// translated so the centroid is the origin. Retries degenerate draws.
pub fn random_centered(rng: &mut impl Rng, dim: usize, points: usize) -> Result<Polytope> {
    for _ in 0..64 {
        let pts: Vec<DVector<f64>> = (0..points)
            .map(|_| {
                let mut d = DVector::from_iterator(dim, (0..dim).map(|_| gaussian(rng)));
                let norm = d.norm();
                if norm > 1e-9 {
                    d /= norm;
                }
                let r: f64 = rng.gen_range(0.7..1.3);
                d * r
            })
            .collect();
        if let Ok(p) = Polytope::from_points(dim, pts) {
            return Ok(p.translate_to_centroid());
        }
    }
    Err(crate::error::Error::DegenerateInput { dim, rank: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cross_polytope_volume() {
        // 2^n / n!
        let c3 = cross_polytope(3).unwrap();
        assert!((c3.volume() - 8.0 / 6.0).abs() < 1e-12);
        let c4 = cross_polytope(4).unwrap();
        assert!((c4.volume() - 16.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn regular_simplex_metrics() {
        let s = regular_simplex(3).unwrap();
        let verts = s.vertices();
        assert_eq!(verts.len(), 4);
        for v in verts {
            assert!((v.norm() - 1.0).abs() < 1e-10);
        }
        // All pairwise distances equal.
        let d01 = (&verts[0] - &verts[1]).norm();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(((&verts[i] - &verts[j]).norm() - d01).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn prism_volume() {
        let tri = Polytope::from_points(
            2,
            vec![
                DVector::from_column_slice(&[0.0, 0.0]),
                DVector::from_column_slice(&[1.0, 0.0]),
                DVector::from_column_slice(&[0.0, 1.0]),
            ],
        )
        .unwrap();
        let p = prism_over(&tri, 0.5).unwrap();
        assert!((p.volume() - 0.5).abs() < 1e-12);
        assert_eq!(p.facets().len(), 5);
    }

    #[test]
    fn random_bodies_are_centered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in 2..=4 {
            let p = random_centered(&mut rng, dim, 10).unwrap();
            assert!(p.centroid().norm() < 1e-10);
            assert!(p.volume() > 0.0);
        }
    }
}
