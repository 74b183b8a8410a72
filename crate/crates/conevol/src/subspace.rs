//! Linear subspaces of R^n held as orthonormal bases.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::linalg::{complement_basis, orthonormalize};
use crate::report::Json;
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<DVector<f64>>,
}

impl Subspace {
    /// Builds from any spanning set; dependent vectors are dropped.
    pub fn from_spanning(
        ambient: usize,
        vectors: &[DVector<f64>],
        tol: &Tolerances,
    ) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch {
                    left: v.len(),
                    right: ambient,
                });
            }
        }
        let basis = orthonormalize(vectors, tol.rank);
        if basis.is_empty() {
            return Err(Error::InvalidInput("subspace has no spanning vectors".into()));
        }
        if basis.len() >= ambient {
            return Err(Error::InvalidInput(
                "subspace must be proper (dimension below ambient)".into(),
            ));
        }
        Ok(Subspace { ambient, basis })
    }

    pub fn line(direction: &DVector<f64>) -> Result<Self> {
        let norm = direction.norm();
        if norm <= 1e-12 {
            return Err(Error::ZeroDirection);
        }
        Ok(Subspace {
            ambient: direction.len(),
            basis: vec![direction / norm],
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DVector<f64>] {
        &self.basis
    }

    /// Coordinates of x in the basis (length = dim).
    pub fn coords(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|b| b.dot(x)))
    }

    /// Embeds subspace coordinates back into R^ambient.
    pub fn embed(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.ambient);
        for (j, b) in self.basis.iter().enumerate() {
            x.axpy(z[j], b, 1.0);
        }
        x
    }

    /// Orthogonal projection of x onto the subspace.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        self.embed(&self.coords(x))
    }

    /// Euclidean distance from x to the subspace.
    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        (x - self.project(x)).norm()
    }

    pub fn contains(&self, x: &DVector<f64>, eps: f64) -> bool {
        self.distance(x) <= eps
    }

    pub fn projection_matrix(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.ambient, self.ambient);
        for b in &self.basis {
            p += b * b.transpose();
        }
        p
    }

    /// Entrywise max distance between projection matrices; a metric on the
    /// set of subspaces of R^ambient.
    pub fn projection_distance(&self, other: &Subspace) -> f64 {
        let a = self.projection_matrix();
        let b = other.projection_matrix();
        let mut m: f64 = 0.0;
        for i in 0..self.ambient {
            for j in 0..self.ambient {
                m = m.max((a[(i, j)] - b[(i, j)]).abs());
            }
        }
        m
    }

    /// Quantized projection matrix, the dedup key for subspace collections.
    pub fn dedup_key(&self, resolution: f64) -> Vec<i64> {
        let p = self.projection_matrix();
        let mut key = Vec::with_capacity(self.ambient * self.ambient);
        for i in 0..self.ambient {
            for j in 0..self.ambient {
                let q = (p[(i, j)] / resolution).round();
                // Normalize -0.0 so the key is stable around zero.
                key.push(if q == 0.0 { 0 } else { q as i64 });
            }
        }
        key
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        Subspace {
            ambient: self.ambient,
            basis: complement_basis(&self.basis, self.ambient),
        }
    }

    pub fn basis_json(&self) -> Json {
        Json::Arr(
            self.basis
                .iter()
                .map(|b| Json::nums(b.iter().copied()))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(coords)
    }

    #[test]
    fn spanning_drops_dependent() {
        let s = Subspace::from_spanning(
            3,
            &[v(&[1.0, 0.0, 0.0]), v(&[2.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])],
            &Tolerances::DEFAULT,
        )
        .unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&v(&[3.0, -2.0, 0.0]), 1e-12));
        assert!(!s.contains(&v(&[0.0, 0.0, 1.0]), 1e-9));
    }

    #[test]
    fn complement_is_orthogonal() {
        let s = Subspace::line(&v(&[1.0, 1.0, 0.0])).unwrap();
        let c = s.orthogonal_complement();
        assert_eq!(c.dim(), 2);
        for b in c.basis() {
            assert!(s.basis()[0].dot(b).abs() < 1e-12);
        }
    }

    #[test]
    fn dedup_key_is_basis_independent() {
        let s1 = Subspace::from_spanning(
            3,
            &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])],
            &Tolerances::DEFAULT,
        )
        .unwrap();
        let s2 = Subspace::from_spanning(
            3,
            &[v(&[1.0, 1.0, 0.0]), v(&[1.0, -1.0, 0.0])],
            &Tolerances::DEFAULT,
        )
        .unwrap();
        assert_eq!(s1.dedup_key(1e-8), s2.dedup_key(1e-8));
        assert!(s1.projection_distance(&s2) < 1e-12);
    }
}
