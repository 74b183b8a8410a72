//! Discrete measures on the unit sphere and the cone-volume construction.
//!
//! The cone-volume measure of a polytope with the origin strictly interior
//! places one atom per facet: direction = outward unit normal, weight =
//! (support value) * (facet surface measure) / dim, the volume of the cone
//! over that facet with apex at the origin. Weights sum to the volume.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::report::Json;
use crate::subspace::Subspace;
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct Atom {
    direction: DVector<f64>,
    weight: f64,
}

impl Atom {
    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }
    pub fn weight(&self) -> f64 {
        self.weight
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteSphericalMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl DiscreteSphericalMeasure {
    /// Normalizes directions, rejects nonpositive weights, merges atoms whose
    /// directions agree within the merge tolerance (first direction kept).
    pub fn new(dim: usize, raw: Vec<(DVector<f64>, f64)>) -> Result<Self> {
        Self::new_with(dim, raw, &Tolerances::DEFAULT)
    }

    pub fn new_with(
        dim: usize,
        raw: Vec<(DVector<f64>, f64)>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let mut atoms: Vec<Atom> = Vec::with_capacity(raw.len());
        for (dir, w) in raw {
            if dir.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dir.len(),
                    right: dim,
                });
            }
            let norm = dir.norm();
            if norm <= 1e-12 {
                return Err(Error::ZeroDirection);
            }
            if !(w > 0.0) {
                return Err(Error::InvalidInput(format!("atom weight {} not positive", w)));
            }
            let u = dir / norm;
            match atoms
                .iter_mut()
                .find(|a| (&a.direction - &u).norm() <= tol.atom_merge)
            {
                Some(a) => a.weight += w,
                None => atoms.push(Atom { direction: u, weight: w }),
            }
        }
        Ok(DiscreteSphericalMeasure { dim, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        crate::par::sum_ordered(self.atoms.iter().map(|a| a.weight))
    }

    /// Mass of atoms lying in the subspace.
    pub fn subspace_mass(&self, s: &Subspace, tol: &Tolerances) -> f64 {
        crate::par::sum_ordered(
            self.atoms
                .iter()
                .filter(|a| s.contains(&a.direction, tol.rank))
                .map(|a| a.weight),
        )
    }

    /// Mass of the open hemisphere around v (strict positive inner product).
    pub fn hemisphere_mass(&self, v: &DVector<f64>, tol: &Tolerances) -> f64 {
        crate::par::sum_ordered(
            self.atoms
                .iter()
                .filter(|a| a.direction.dot(v) > tol.rank)
                .map(|a| a.weight),
        )
    }

    pub fn scaled(&self, c: f64) -> DiscreteSphericalMeasure {
        DiscreteSphericalMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    direction: a.direction.clone(),
                    weight: a.weight * c,
                })
                .collect(),
        }
    }

    /// Sum of w_i u_i u_i^T.
    pub fn second_moment(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for a in &self.atoms {
            m += (&a.direction * a.direction.transpose()) * a.weight;
        }
        m
    }

    pub fn to_json(&self) -> Json {
        Json::obj(vec![
            ("dim", Json::Int(self.dim as i64)),
            (
                "atoms",
                Json::Arr(
                    self.atoms
                        .iter()
                        .map(|a| {
                            Json::obj(vec![
                                ("u", Json::nums(a.direction.iter().copied())),
                                ("w", Json::Num(a.weight)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ])
    }
}

/// Cone-volume measure of a polytope with the origin strictly interior.
/// Facets with surface measure below the floor are dropped.
pub fn cone_volume_measure(p: &Polytope) -> Result<DiscreteSphericalMeasure> {
    cone_volume_measure_with(p, &Tolerances::DEFAULT)
}

pub fn cone_volume_measure_with(
    p: &Polytope,
    tol: &Tolerances,
) -> Result<DiscreteSphericalMeasure> {
    let worst = p
        .facets()
        .iter()
        .map(|f| f.offset())
        .fold(f64::INFINITY, f64::min);
    if worst <= tol.rank {
        return Err(Error::OriginNotInterior { offset: worst });
    }
    let n = p.dim() as f64;
    let raw: Vec<(DVector<f64>, f64)> = p
        .facets()
        .iter()
        .filter(|f| f.area() > tol.facet_area_floor)
        .map(|f| (f.normal().clone(), f.offset() * f.area() / n))
        .collect();
    DiscreteSphericalMeasure::new_with(p.dim(), raw, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::bodies::{cube, regular_simplex};

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(coords)
    }

    #[test]
    fn cube_measure() {
        let c = cube(3, 1.0).unwrap();
        let m = cone_volume_measure(&c).unwrap();
        assert_eq!(m.atoms().len(), 6);
        for a in m.atoms() {
            assert!((a.weight() - 8.0 / 6.0).abs() < 1e-12);
        }
        assert!((m.total_mass() - c.volume()).abs() < 1e-12);
    }

    #[test]
    fn total_mass_is_volume_for_simplices() {
        for n in 2..=4 {
            let s = regular_simplex(n).unwrap();
            let m = cone_volume_measure(&s).unwrap();
            assert!(
                (m.total_mass() - s.volume()).abs() <= 1e-12 * s.volume(),
                "n = {}",
                n
            );
        }
    }

    #[test]
    fn origin_must_be_interior() {
        let c = cube(2, 1.0).unwrap().translate(&v(&[3.0, 0.0]));
        assert!(matches!(
            cone_volume_measure(&c),
            Err(Error::OriginNotInterior { .. })
        ));
    }

    #[test]
    fn nearby_directions_merge() {
        let m = DiscreteSphericalMeasure::new(
            2,
            vec![
                (v(&[1.0, 0.0]), 1.0),
                (v(&[1.0, 1e-12]), 2.0),
                (v(&[0.0, 1.0]), 3.0),
            ],
        )
        .unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert!((m.atoms()[0].weight() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn weights_transform_by_determinant() {
        use nalgebra::DMatrix;
        let c = cube(3, 1.0).unwrap();
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.0, 1.0, 0.1, 0.0, 0.0, 0.5]);
        let img = c.linear_image(&a).unwrap();
        let m0 = cone_volume_measure(&c).unwrap();
        let m1 = cone_volume_measure(&img).unwrap();
        assert!((m1.total_mass() - a.determinant().abs() * m0.total_mass()).abs() < 1e-12);
    }
}
