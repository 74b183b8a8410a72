//! Convex polytopes: hulls, exact volume data, and structural transforms.
//!
//! A `Polytope` is full-dimensional with both representations available:
//! canonical vertex list plus facets carrying unit normals, offsets, surface
//! measure and facet centroids. Volume and centroid are computed once at
//! assembly. Transforms that act exactly on this data (translation, linear
//! images, scaling, reflection) never re-run the hull.

pub mod bodies;
pub mod hrep;
pub mod hull;
pub mod linalg;
pub mod volume;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::report::Json;
use crate::tol::Tolerances;

use hull::{convex_hull, Hull};
use volume::facet_geometry;

#[derive(Debug, Clone)]
pub struct Facet {
    normal: DVector<f64>,
    offset: f64,
    vertices: Vec<usize>,
    area: f64,
    centroid: DVector<f64>,
}

impl Facet {
    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }
    pub fn offset(&self) -> f64 {
        self.offset
    }
    pub fn vertex_indices(&self) -> &[usize] {
        &self.vertices
    }
    /// Surface measure of the facet.
    pub fn area(&self) -> f64 {
        self.area
    }
    pub fn centroid(&self) -> &DVector<f64> {
        &self.centroid
    }
}

#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<DVector<f64>>,
    facets: Vec<Facet>,
    volume: f64,
    centroid: DVector<f64>,
}

impl Polytope {
    /// Convex hull of the given points. Fails unless the hull is
    /// full-dimensional.
    pub fn from_points(dim: usize, points: Vec<DVector<f64>>) -> Result<Self> {
        Self::from_points_with(dim, points, &Tolerances::DEFAULT)
    }

    pub fn from_points_with(
        dim: usize,
        points: Vec<DVector<f64>>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let hull = convex_hull(dim, &points, tol)?;
        Self::from_hull(hull, tol)
    }

    fn from_hull(hull: Hull, tol: &Tolerances) -> Result<Self> {
        let dim = hull.dim;
        let mut facets = Vec::with_capacity(hull.facets.len());
        for f in &hull.facets {
            let refs: Vec<&DVector<f64>> = f.vertices.iter().map(|&i| &hull.vertices[i]).collect();
            let (area, centroid) = facet_geometry(&refs, &f.normal, tol)?;
            facets.push(Facet {
                normal: f.normal.clone(),
                offset: f.offset,
                vertices: f.vertices.clone(),
                area,
                centroid,
            });
        }
        Self::assemble(dim, hull.vertices, facets)
    }

    /// Builds a polytope from prescribed facet planes and their vertex id
    /// sets. Facets that come out flat are dropped, then vertices no facet
    /// references. The caller guarantees the planes are outer supporting
    /// planes of the vertex set.
    pub(crate) fn from_facet_planes(
        dim: usize,
        vertices: Vec<DVector<f64>>,
        planes: Vec<(DVector<f64>, f64, Vec<usize>)>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let mut facets = Vec::with_capacity(planes.len());
        for (normal, offset, ids) in planes {
            if ids.len() < dim {
                continue;
            }
            let refs: Vec<&DVector<f64>> = ids.iter().map(|&i| &vertices[i]).collect();
            let (area, centroid) = match facet_geometry(&refs, &normal, tol) {
                Ok(g) => g,
                Err(Error::DegenerateInput { .. }) => continue,
                Err(e) => return Err(e),
            };
            if area <= tol.facet_area_floor {
                continue;
            }
            facets.push(Facet {
                normal,
                offset,
                vertices: ids,
                area,
                centroid,
            });
        }
        let mut used = vec![false; vertices.len()];
        for f in &facets {
            for &vi in &f.vertices {
                used[vi] = true;
            }
        }
        let mut remap = vec![usize::MAX; vertices.len()];
        let mut kept = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.into_iter().enumerate() {
            if used[i] {
                remap[i] = kept.len();
                kept.push(v);
            }
        }
        if kept.is_empty() {
            return Err(Error::DegenerateInput { dim, rank: 0 });
        }
        for f in &mut facets {
            for vi in &mut f.vertices {
                *vi = remap[*vi];
            }
        }
        Self::assemble(dim, kept, facets)
    }

    /// Computes volume and centroid by cone decomposition off the vertex
    /// mean, using the already-known facet measures.
    fn assemble(dim: usize, vertices: Vec<DVector<f64>>, facets: Vec<Facet>) -> Result<Self> {
        let mut pivot = DVector::zeros(dim);
        for v in &vertices {
            pivot += v;
        }
        pivot /= vertices.len() as f64;

        let nf = dim as f64;
        let mut volume = 0.0;
        let mut weighted = DVector::zeros(dim);
        for f in &facets {
            let dist = f.offset - f.normal.dot(&pivot);
            let cone_vol = dist * f.area / nf;
            let cone_centroid = &pivot + (&f.centroid - &pivot) * (nf / (nf + 1.0));
            volume += cone_vol;
            weighted.axpy(cone_vol, &cone_centroid, 1.0);
        }
        if !(volume > 0.0) {
            return Err(Error::DegenerateInput { dim, rank: dim });
        }
        Ok(Polytope {
            dim,
            vertices,
            facets,
            volume,
            centroid: weighted / volume,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }
    pub fn volume(&self) -> f64 {
        self.volume
    }
    pub fn centroid(&self) -> &DVector<f64> {
        &self.centroid
    }

    /// h_P(dir) = max over vertices of the inner product; `dir` is used as
    /// given, without normalization.
    pub fn support(&self, dir: &DVector<f64>) -> Result<f64> {
        if dir.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: dir.len(),
                right: self.dim,
            });
        }
        if dir.norm() <= 1e-12 {
            return Err(Error::ZeroDirection);
        }
        Ok(self
            .vertices
            .iter()
            .map(|v| v.dot(dir))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Minkowski gauge ||x||_P. Needs the origin strictly interior.
    pub fn gauge(&self, x: &DVector<f64>) -> Result<f64> {
        let worst = self
            .facets
            .iter()
            .map(|f| f.offset)
            .fold(f64::INFINITY, f64::min);
        if worst <= Tolerances::DEFAULT.rank {
            return Err(Error::OriginNotInterior { offset: worst });
        }
        let mut g: f64 = 0.0;
        for f in &self.facets {
            g = g.max(f.normal.dot(x) / f.offset);
        }
        Ok(g.max(0.0))
    }

    pub fn contains(&self, x: &DVector<f64>, slack: f64) -> bool {
        self.facets.iter().all(|f| f.normal.dot(x) - f.offset <= slack)
    }

    pub fn translate(&self, t: &DVector<f64>) -> Polytope {
        let vertices = self.vertices.iter().map(|v| v + t).collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet {
                normal: f.normal.clone(),
                offset: f.offset + f.normal.dot(t),
                vertices: f.vertices.clone(),
                area: f.area,
                centroid: &f.centroid + t,
            })
            .collect();
        Polytope {
            dim: self.dim,
            vertices,
            facets,
            volume: self.volume,
            centroid: &self.centroid + t,
        }
    }

    /// Translate so the centroid sits at the origin.
    pub fn translate_to_centroid(&self) -> Polytope {
        let t = -&self.centroid;
        self.translate(&t)
    }

    /// Image under x -> A x + b, computed structurally: vertex indices are
    /// preserved, normals map by the inverse transpose, facet measures are
    /// recomputed, volume picks up |det A|.
    pub fn affine_image(&self, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Polytope> {
        if a.nrows() != self.dim || a.ncols() != self.dim || b.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: a.nrows().max(b.len()),
                right: self.dim,
            });
        }
        let lu = a.clone().lu();
        let det = lu.determinant();
        if det.abs() <= 1e-12 {
            return Err(Error::SingularMap { det });
        }
        let at_lu = a.transpose().lu();

        let vertices: Vec<DVector<f64>> = self.vertices.iter().map(|v| a * v + b).collect();
        let tol = Tolerances::DEFAULT;
        let mut facets = Vec::with_capacity(self.facets.len());
        for f in &self.facets {
            let w = at_lu
                .solve(&f.normal)
                .ok_or(Error::SingularMap { det })?;
            let norm = w.norm();
            let normal = &w / norm;
            let offset = (f.offset + w.dot(b)) / norm;
            let refs: Vec<&DVector<f64>> = f.vertices.iter().map(|&i| &vertices[i]).collect();
            let (area, centroid) = facet_geometry(&refs, &normal, &tol)?;
            facets.push(Facet {
                normal,
                offset,
                vertices: f.vertices.clone(),
                area,
                centroid,
            });
        }
        Ok(Polytope {
            dim: self.dim,
            vertices,
            facets,
            volume: det.abs() * self.volume,
            centroid: a * &self.centroid + b,
        })
    }

    pub fn linear_image(&self, a: &DMatrix<f64>) -> Result<Polytope> {
        self.affine_image(a, &DVector::zeros(self.dim))
    }

    /// Dilation by s > 0 about the origin.
    pub fn scale(&self, s: f64) -> Polytope {
        assert!(s > 0.0, "scale factor must be positive");
        let k = self.dim as f64;
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v * s).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal.clone(),
                    offset: f.offset * s,
                    vertices: f.vertices.clone(),
                    area: f.area * s.powf(k - 1.0),
                    centroid: &f.centroid * s,
                })
                .collect(),
            volume: self.volume * s.powf(k),
            centroid: &self.centroid * s,
        }
    }

    /// Point reflection through the origin.
    pub fn reflect_origin(&self) -> Polytope {
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| -v).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: -&f.normal,
                    offset: f.offset,
                    vertices: f.vertices.clone(),
                    area: f.area,
                    centroid: -&f.centroid,
                })
                .collect(),
            volume: self.volume,
            centroid: -&self.centroid,
        }
    }

    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut sums = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for v in &self.vertices {
            for w in &other.vertices {
                sums.push(v + w);
            }
        }
        Polytope::from_points(self.dim, sums)
    }

    pub fn intersect(&self, other: &Polytope) -> Result<Polytope> {
        hrep::intersect(self, other)
    }

    /// Every vertex of `inner` satisfies this body's facet inequalities
    /// within `slack`.
    pub fn contains_polytope(&self, inner: &Polytope, slack: f64) -> bool {
        inner.vertices().iter().all(|v| self.contains(v, slack))
    }

    /// Intersection with {x : <normal, x> <= offset}.
    pub fn halfspace_clip(&self, normal: &DVector<f64>, offset: f64) -> Result<Polytope> {
        hrep::halfspace_clip(self, normal, offset)
    }

    /// Vertex pairs forming edges: they share at least dim-1 facets whose
    /// normals span a (dim-1)-dimensional space.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let nv = self.vertices.len();
        let mut vertex_facets: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (fi, f) in self.facets.iter().enumerate() {
            for &vi in &f.vertices {
                vertex_facets[vi].push(fi);
            }
        }
        let mut edges = Vec::new();
        for i in 0..nv {
            for j in i + 1..nv {
                let shared: Vec<usize> = vertex_facets[i]
                    .iter()
                    .filter(|fi| vertex_facets[j].contains(fi))
                    .copied()
                    .collect();
                if shared.len() < self.dim - 1 {
                    continue;
                }
                let normals: Vec<DVector<f64>> =
                    shared.iter().map(|&fi| self.facets[fi].normal.clone()).collect();
                if linalg::rank_of(&normals, 1e-7) == self.dim - 1 {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    pub fn to_json(&self) -> Json {
        Json::obj(vec![
            ("dim", Json::Int(self.dim as i64)),
            (
                "vertices",
                Json::Arr(
                    self.vertices
                        .iter()
                        .map(|v| Json::nums(v.iter().copied()))
                        .collect(),
                ),
            ),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bodies::{cube, regular_simplex};

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(coords)
    }

    #[test]
    fn cube_data() {
        let c = cube(3, 1.0).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
        assert!((c.volume() - 8.0).abs() < 1e-12);
        assert!(c.centroid().norm() < 1e-12);
        for f in c.facets() {
            assert!((f.area() - 4.0).abs() < 1e-12);
            assert!((f.offset() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_image_matches_rehull() {
        let c = cube(3, 1.0).unwrap();
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.4, 0.0, 0.0, 1.0, -0.3, 0.2, 0.0, 1.0]);
        let b = v(&[0.1, -0.2, 0.05]);
        let fast = c.affine_image(&a, &b).unwrap();
        let slow = Polytope::from_points(
            3,
            c.vertices().iter().map(|p| &a * p + &b).collect(),
        )
        .unwrap();
        assert!((fast.volume() - slow.volume()).abs() < 1e-10);
        assert!((fast.centroid() - slow.centroid()).norm() < 1e-10);
        let total_fast: f64 = fast.facets().iter().map(|f| f.area()).sum();
        let total_slow: f64 = slow.facets().iter().map(|f| f.area()).sum();
        assert!((total_fast - total_slow).abs() < 1e-9);
    }

    #[test]
    fn gauge_and_support() {
        let c = cube(2, 1.0).unwrap();
        assert!((c.gauge(&v(&[0.5, 0.25])).unwrap() - 0.5).abs() < 1e-12);
        assert!((c.support(&v(&[1.0, 1.0])).unwrap() - 2.0).abs() < 1e-12);
        let shifted = c.translate(&v(&[5.0, 0.0]));
        assert!(matches!(
            shifted.gauge(&v(&[0.1, 0.0])),
            Err(Error::OriginNotInterior { .. })
        ));
    }

    #[test]
    fn simplex_centered() {
        for n in 2..=5 {
            let s = regular_simplex(n).unwrap();
            assert_eq!(s.vertices().len(), n + 1);
            assert_eq!(s.facets().len(), n + 1);
            assert!(s.centroid().norm() < 1e-12, "n = {}", n);
        }
    }

    #[test]
    fn edge_counts() {
        let c = cube(3, 1.0).unwrap();
        assert_eq!(c.edges().len(), 12);
        let s = regular_simplex(3).unwrap();
        assert_eq!(s.edges().len(), 6);
    }

    #[test]
    fn minkowski_sum_of_cubes() {
        let c = cube(2, 1.0).unwrap();
        let s = c.minkowski_sum(&c).unwrap();
        assert!((s.volume() - 16.0).abs() < 1e-12);
    }
}
