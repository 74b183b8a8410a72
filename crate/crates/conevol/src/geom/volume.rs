//! Volume and centroid by recursive cone decomposition.
//!
//! The pivot is the vertex mean. Each facet contributes a cone whose volume
//! is (plane distance) * (facet measure) / dim; facet measures are computed
//! in orthonormal coordinates of the facet hyperplane, recursing down to
//! polygons and segments. No sampling anywhere, so results are exact up to
//! roundoff.

use nalgebra::DVector;

use crate::error::Result;
use crate::tol::Tolerances;

use super::hull::{convex_hull, Hull};
use super::linalg::complement_basis;

/// Area and centroid of a convex polygon given in any order.
/// Points are deduplicated and sorted around their mean.
pub fn polygon_area_centroid(points: &[(f64, f64)]) -> (f64, (f64, f64)) {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    'next: for &p in points {
        for &q in &pts {
            if (p.0 - q.0).abs() <= 1e-12 && (p.1 - q.1).abs() <= 1e-12 {
                continue 'next;
            }
        }
        pts.push(p);
    }
    if pts.is_empty() {
        return (0.0, (0.0, 0.0));
    }
    let n = pts.len() as f64;
    let mean = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    pts.sort_by(|a, b| {
        let aa = (a.1 - mean.1).atan2(a.0 - mean.0);
        let ab = (b.1 - mean.1).atan2(b.0 - mean.0);
        aa.total_cmp(&ab).then(a.0.total_cmp(&b.0)).then(a.1.total_cmp(&b.1))
    });
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..pts.len() {
        let p = pts[i];
        let q = pts[(i + 1) % pts.len()];
        let cross = p.0 * q.1 - q.0 * p.1;
        area2 += cross;
        cx += (p.0 + q.0) * cross;
        cy += (p.1 + q.1) * cross;
    }
    let area = area2 / 2.0;
    if area.abs() <= 1e-300 {
        return (0.0, mean);
    }
    (area.abs(), (cx / (6.0 * area), cy / (6.0 * area)))
}

/// Surface measure and centroid of a facet given its vertices (in convex
/// position on a hyperplane with the given unit normal).
pub fn facet_geometry(
    points: &[&DVector<f64>],
    normal: &DVector<f64>,
    tol: &Tolerances,
) -> Result<(f64, DVector<f64>)> {
    let dim = normal.len();
    let k = dim - 1;
    if k == 0 {
        return Ok((1.0, points[0].clone()));
    }
    let basis = complement_basis(std::slice::from_ref(normal), dim);
    debug_assert_eq!(basis.len(), k);
    let p0 = points[0];
    let local: Vec<DVector<f64>> = points
        .iter()
        .map(|p| {
            let d = *p - p0;
            DVector::from_iterator(k, basis.iter().map(|b| b.dot(&d)))
        })
        .collect();

    let (measure, local_centroid) = match k {
        1 => {
            let mut lo = local[0][0];
            let mut hi = local[0][0];
            for z in &local {
                lo = lo.min(z[0]);
                hi = hi.max(z[0]);
            }
            (hi - lo, DVector::from_column_slice(&[(lo + hi) / 2.0]))
        }
        2 => {
            let flat: Vec<(f64, f64)> = local.iter().map(|z| (z[0], z[1])).collect();
            let (a, c) = polygon_area_centroid(&flat);
            (a, DVector::from_column_slice(&[c.0, c.1]))
        }
        _ => {
            let hull = convex_hull(k, &local, tol)?;
            volume_centroid(&hull, tol)?
        }
    };

    let mut centroid = p0.clone();
    for (j, b) in basis.iter().enumerate() {
        centroid.axpy(local_centroid[j], b, 1.0);
    }
    Ok((measure, centroid))
}

/// Volume and centroid of the hull by cone decomposition off the vertex mean.
pub fn volume_centroid(hull: &Hull, tol: &Tolerances) -> Result<(f64, DVector<f64>)> {
    let dim = hull.dim;
    let mut pivot = DVector::zeros(dim);
    for v in &hull.vertices {
        pivot += v;
    }
    pivot /= hull.vertices.len() as f64;

    let mut volume = 0.0;
    let mut weighted = DVector::zeros(dim);
    for f in &hull.facets {
        let refs: Vec<&DVector<f64>> = f.vertices.iter().map(|&i| &hull.vertices[i]).collect();
        let (area, f_centroid) = facet_geometry(&refs, &f.normal, tol)?;
        let dist = f.offset - f.normal.dot(&pivot);
        let cone_vol = dist * area / dim as f64;
        let cone_centroid = &pivot + (&f_centroid - &pivot) * (dim as f64 / (dim as f64 + 1.0));
        volume += cone_vol;
        weighted.axpy(cone_vol, &cone_centroid, 1.0);
    }
    if volume <= 0.0 {
        return Err(crate::error::Error::DegenerateInput { dim, rank: dim - 1 });
    }
    Ok((volume, weighted / volume))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::hull::convex_hull;

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(coords)
    }

    #[test]
    fn unit_cube_volume() {
        let mut pts = Vec::new();
        for &x in &[0.0, 1.0] {
            for &y in &[0.0, 1.0] {
                for &z in &[0.0, 1.0] {
                    pts.push(v(&[x, y, z]));
                }
            }
        }
        let h = convex_hull(3, &pts, &Tolerances::DEFAULT).unwrap();
        let (vol, c) = volume_centroid(&h, &Tolerances::DEFAULT).unwrap();
        assert!((vol - 1.0).abs() < 1e-12);
        for i in 0..3 {
            assert!((c[i] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_centroid() {
        let pts = vec![v(&[0.0, 0.0]), v(&[3.0, 0.0]), v(&[0.0, 3.0])];
        let h = convex_hull(2, &pts, &Tolerances::DEFAULT).unwrap();
        let (vol, c) = volume_centroid(&h, &Tolerances::DEFAULT).unwrap();
        assert!((vol - 4.5).abs() < 1e-12);
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_4d_volume() {
        let pts = vec![
            v(&[0.0, 0.0, 0.0, 0.0]),
            v(&[1.0, 0.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0, 0.0]),
            v(&[0.0, 0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 0.0, 1.0]),
        ];
        let h = convex_hull(4, &pts, &Tolerances::DEFAULT).unwrap();
        let (vol, c) = volume_centroid(&h, &Tolerances::DEFAULT).unwrap();
        assert!((vol - 1.0 / 24.0).abs() < 1e-14);
        for i in 0..4 {
            assert!((c[i] - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn polygon_helper_square() {
        let (a, c) = polygon_area_centroid(&[(1.0, 0.0), (0.0, 0.0), (1.0, 2.0), (0.0, 2.0)]);
        assert!((a - 2.0).abs() < 1e-12);
        assert!((c.0 - 0.5).abs() < 1e-12 && (c.1 - 1.0).abs() < 1e-12);
    }
}
