//! Deterministic body corpus: canonical bodies, seeded random hulls, and
//! the one-parameter families used by the stability trend checks.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geom::bodies::{
    cross_polytope, cube, prism_over, random_centered, rect_box, regular_polygon, regular_simplex,
};
use crate::geom::Polytope;
use crate::measure::DiscreteSphericalMeasure;
use crate::tol::Tolerances;

pub const CORPUS_SEED: u64 = 0x5EED;

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub body: Polytope,
}

fn shear_matrix(n: usize) -> DMatrix<f64> {
    // Fixed upper-triangular unit shears; entries decay with distance from
    // the diagonal.
    let mut a = DMatrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            a[(i, j)] = 0.3 / (j - i) as f64;
        }
    }
    a
}

pub fn canonical_bodies(_tol: &Tolerances) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push(CorpusEntry {
            name: format!("cube-{}", n),
            body: cube(n, 1.0)?,
        });
    }
    for n in 2..=4 {
        out.push(CorpusEntry {
            name: format!("simplex-{}", n),
            body: regular_simplex(n)?,
        });
    }
    for n in 2..=4 {
        out.push(CorpusEntry {
            name: format!("cross-{}", n),
            body: cross_polytope(n)?,
        });
    }
    out.push(CorpusEntry {
        name: "prism-triangle".to_string(),
        body: prism_over(&regular_polygon(3, 1.0)?, 0.8)?.translate_to_centroid(),
    });
    out.push(CorpusEntry {
        name: "box-3".to_string(),
        body: rect_box(&[1.0, 1.5, 0.75])?,
    });
    for n in 2..=4 {
        out.push(CorpusEntry {
            name: format!("parallelepiped-{}", n),
            body: cube(n, 1.0)?
                .linear_image(&shear_matrix(n))?
                .translate_to_centroid(),
        });
    }
    Ok(out)
}

/// Point budget for the i-th random body of each dimension.
fn point_count(dim: usize, i: usize) -> usize {
    match dim {
        2 => 5 + i % 4,
        3 => 8 + i % 9,
        _ => 8 + i % 5,
    }
}

pub fn random_bodies(
    dim: usize,
    count: usize,
    seed: u64,
    _tol: &Tolerances,
) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        // Fresh stream per body so entries do not depend on the count.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((dim as u64) << 32) ^ i as u64);
        out.push(CorpusEntry {
            name: format!("random-{}-{:03}", dim, i),
            body: random_centered(&mut rng, dim, point_count(dim, i))?,
        });
    }
    Ok(out)
}

/// Canonical bodies plus seeded random hulls in dimensions 2 to 4.
pub fn standard_corpus(tol: &Tolerances) -> Result<Vec<CorpusEntry>> {
    let mut out = canonical_bodies(tol)?;
    out.extend(random_bodies(2, 8, CORPUS_SEED, tol)?);
    out.extend(random_bodies(3, 70, CORPUS_SEED, tol)?);
    out.extend(random_bodies(4, 32, CORPUS_SEED, tol)?);
    Ok(out)
}

/// Large single-dimension batch with per-index seeds, for the bulk
/// concentration sweep.
pub fn concentration_batch(dim: usize, count: usize, tol: &Tolerances) -> Result<Vec<Polytope>> {
    let base = CORPUS_SEED.wrapping_add(0x0001_0000 * dim as u64);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(base + i as u64);
        out.push(random_centered(&mut rng, dim, point_count(dim, i))?);
    }
    let _ = tol;
    Ok(out)
}

/// Frustum over a triangle: bottom copy at scale 1, top copy at scale
/// 1 + tau. At tau = 0 this is an exact prism, the equality case of the
/// concentration bound for the vertical line.
pub fn taper_prism(tau: f64) -> Result<Polytope> {
    let base = regular_polygon(3, 1.0)?;
    let c = 0.8;
    let mut pts = Vec::with_capacity(6);
    for v in base.vertices() {
        pts.push(DVector::from_column_slice(&[v[0], v[1], -c]));
    }
    for v in base.vertices() {
        pts.push(DVector::from_column_slice(&[
            v[0] * (1.0 + tau),
            v[1] * (1.0 + tau),
            c,
        ]));
    }
    Ok(Polytope::from_points(3, pts)?.translate_to_centroid())
}

/// Cube with one vertex cut off at depth tau along its three edges. At
/// tau = 0 this is the cube, the equality case of the U-functional bound.
pub fn corner_truncated_cube(tau: f64) -> Result<Polytope> {
    if tau <= 0.0 {
        return cube(3, 1.0);
    }
    let mut pts = Vec::new();
    for sx in [-1.0f64, 1.0] {
        for sy in [-1.0f64, 1.0] {
            for sz in [-1.0f64, 1.0] {
                if sx > 0.0 && sy > 0.0 && sz > 0.0 {
                    continue;
                }
                pts.push(DVector::from_column_slice(&[sx, sy, sz]));
            }
        }
    }
    pts.push(DVector::from_column_slice(&[1.0 - tau, 1.0, 1.0]));
    pts.push(DVector::from_column_slice(&[1.0, 1.0 - tau, 1.0]));
    pts.push(DVector::from_column_slice(&[1.0, 1.0, 1.0 - tau]));
    Ok(Polytope::from_points(3, pts)?.translate_to_centroid())
}

pub const TREND_TAUS: [f64; 5] = [0.4, 0.2, 0.1, 0.05, 0.0];

pub fn scc_trend_family() -> Result<Vec<(f64, Polytope)>> {
    TREND_TAUS
        .iter()
        .map(|&t| Ok((t, taper_prism(t)?)))
        .collect()
}

pub fn u_trend_family() -> Result<Vec<(f64, Polytope)>> {
    TREND_TAUS
        .iter()
        .map(|&t| Ok((t, corner_truncated_cube(t)?)))
        .collect()
}

/// Planar four-atom measure with the vertical pair twice as heavy as the
/// horizontal pair; it violates the concentration bound and has no
/// isotropic image.
pub fn skewed_witness_measure() -> DiscreteSphericalMeasure {
    DiscreteSphericalMeasure::new(
        2,
        vec![
            (DVector::from_column_slice(&[1.0, 0.0]), 1.0),
            (DVector::from_column_slice(&[-1.0, 0.0]), 1.0),
            (DVector::from_column_slice(&[0.0, 1.0]), 2.0),
            (DVector::from_column_slice(&[0.0, -1.0]), 2.0),
        ],
    )
    .expect("fixed atoms are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::cone_volume_measure;

    const TOL: Tolerances = Tolerances::DEFAULT;

    #[test]
    fn corpus_size_and_dimensions() {
        let corpus = standard_corpus(&TOL).unwrap();
        assert!(corpus.len() >= 120, "corpus has {} bodies", corpus.len());
        for e in &corpus {
            assert!(e.body.dim() >= 2 && e.body.dim() <= 4, "{}", e.name);
            assert!(
                e.body.centroid().norm() < 1e-9,
                "{} not centered: {}",
                e.name,
                e.body.centroid().norm()
            );
        }
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = standard_corpus(&TOL).unwrap();
        let b = standard_corpus(&TOL).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.body.vertices().len(), y.body.vertices().len());
            for (u, v) in x.body.vertices().iter().zip(y.body.vertices()) {
                assert_eq!(u.as_slice(), v.as_slice());
            }
        }
    }

    #[test]
    fn random_entries_do_not_depend_on_count() {
        let long = random_bodies(3, 10, CORPUS_SEED, &TOL).unwrap();
        let short = random_bodies(3, 3, CORPUS_SEED, &TOL).unwrap();
        for (a, b) in short.iter().zip(&long) {
            assert_eq!(a.body.vertices().len(), b.body.vertices().len());
            for (u, v) in a.body.vertices().iter().zip(b.body.vertices()) {
                assert_eq!(u.as_slice(), v.as_slice());
            }
        }
    }

    #[test]
    fn taper_family_endpoints() {
        let prism = taper_prism(0.0).unwrap();
        let mu = cone_volume_measure(&prism).unwrap();
        let line = crate::subspace::Subspace::line(&DVector::from_column_slice(&[
            0.0, 0.0, 1.0,
        ]))
        .unwrap();
        let ratio = 3.0 * mu.subspace_mass(&line, &TOL) / prism.volume();
        assert!((ratio - 1.0).abs() < 1e-12, "ratio {}", ratio);
        let tapered = taper_prism(0.3).unwrap();
        let mu2 = cone_volume_measure(&tapered).unwrap();
        let ratio2 = 3.0 * mu2.subspace_mass(&line, &TOL) / tapered.volume();
        assert!(ratio2 < 1.0 - 1e-4, "ratio {}", ratio2);
    }

    #[test]
    fn truncation_family_endpoints() {
        let c = corner_truncated_cube(0.0).unwrap();
        assert_eq!(c.facets().len(), 6);
        let t = corner_truncated_cube(0.2).unwrap();
        assert_eq!(t.facets().len(), 7);
        assert!((t.volume() - (8.0 - 0.2f64.powi(3) / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn witness_measure_shape() {
        let m = skewed_witness_measure();
        assert_eq!(m.atoms().len(), 4);
        assert!((m.total_mass() - 6.0).abs() < 1e-15);
    }
}
