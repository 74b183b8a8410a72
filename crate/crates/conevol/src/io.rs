//! Input schemas.
//!
//! Polytopes travel as vertex lists and facet data is always recomputed on
//! load; measures travel as atom lists. Directions are normalized on
//! construction, so inputs rounded to fewer digits still load.

use nalgebra::DVector;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::measure::DiscreteSphericalMeasure;
use crate::subspace::Subspace;
use crate::tol::Tolerances;

#[derive(Debug, Deserialize)]
pub struct PolytopeInput {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
pub struct AtomInput {
    pub u: Vec<f64>,
    pub w: f64,
}

#[derive(Debug, Deserialize)]
pub struct MeasureInput {
    pub dim: usize,
    pub atoms: Vec<AtomInput>,
}

#[derive(Debug, Deserialize)]
pub struct SubspaceInput {
    pub dim: usize,
    pub basis: Vec<Vec<f64>>,
}

/// Either body kind, for commands that accept a polytope or a measure.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum BodyOrMeasureInput {
    Measure(MeasureInput),
    Polytope(PolytopeInput),
}

fn to_vectors(rows: &[Vec<f64>], dim: usize, what: &str) -> Result<Vec<DVector<f64>>> {
    rows.iter()
        .map(|row| {
            if row.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "{} entry has {} coordinates, expected {}",
                    what,
                    row.len(),
                    dim
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("{} entry not finite", what)));
            }
            Ok(DVector::from_column_slice(row))
        })
        .collect()
}

pub fn polytope_from_input(input: &PolytopeInput) -> Result<Polytope> {
    let points = to_vectors(&input.vertices, input.dim, "vertex")?;
    Polytope::from_points(input.dim, points)
}

pub fn measure_from_input(input: &MeasureInput) -> Result<DiscreteSphericalMeasure> {
    let atoms = input
        .atoms
        .iter()
        .map(|a| {
            if a.u.len() != input.dim {
                return Err(Error::InvalidInput(format!(
                    "atom direction has {} coordinates, expected {}",
                    a.u.len(),
                    input.dim
                )));
            }
            if !a.w.is_finite() || a.u.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("atom entry not finite".into()));
            }
            Ok((DVector::from_column_slice(&a.u), a.w))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteSphericalMeasure::new(input.dim, atoms)
}

pub fn subspace_from_input(input: &SubspaceInput) -> Result<Subspace> {
    let rows = to_vectors(&input.basis, input.dim, "basis")?;
    Subspace::from_spanning(input.dim, &rows, &Tolerances::DEFAULT)
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("{}: {}", what, e)))
}
