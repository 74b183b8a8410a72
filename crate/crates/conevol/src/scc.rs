//! Subspace concentration: candidate enumeration, the concentration check,
//! and equality-split verification.
//!
//! For a discrete measure only spans of support subsets can witness a
//! violation or an equality, so candidates are exactly the distinct spans of
//! independent subsets of at most dim-1 atom directions. Subsets are scanned
//! in lexicographic order and spans deduplicated by quantized projection
//! matrix, which fixes the candidate order once and for all.

use itertools::Itertools;
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::measure::DiscreteSphericalMeasure;
use crate::par;
use crate::report::Json;
use crate::subspace::Subspace;
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct CandidateSubspace {
    pub subspace: Subspace,
    /// Atoms lying in the subspace, ascending.
    pub atom_indices: Vec<usize>,
    pub mass: f64,
}

/// Distinct spans of independent subsets of support directions, dimensions
/// 1 through dim-1.
pub fn candidate_subspaces(
    measure: &DiscreteSphericalMeasure,
    tol: &Tolerances,
) -> Vec<CandidateSubspace> {
    let dim = measure.dim();
    let atoms = measure.atoms();
    let dirs: Vec<&DVector<f64>> = atoms.iter().map(|a| a.direction()).collect();

    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for size in 1..dim {
        for combo in (0..dirs.len()).combinations(size) {
            subsets.push(combo);
        }
    }

    let spans = par::map_slice(&subsets, |combo| {
        let vecs: Vec<DVector<f64>> = combo.iter().map(|&i| dirs[i].clone()).collect();
        let basis = crate::geom::linalg::orthonormalize(&vecs, tol.rank);
        if basis.len() != combo.len() {
            // Dependent subset; its span already arises from a smaller one.
            return None;
        }
        let sub = Subspace::from_spanning(dim, &basis, tol).ok()?;
        Some(sub)
    });

    let mut seen: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
    let mut out: Vec<CandidateSubspace> = Vec::new();
    for sub in spans.into_iter().flatten() {
        let key = sub.dedup_key(tol.span_dedup);
        if !seen.insert(key) {
            continue;
        }
        let atom_indices: Vec<usize> = atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| sub.contains(a.direction(), tol.rank))
            .map(|(i, _)| i)
            .collect();
        let mass = par::sum_ordered(atom_indices.iter().map(|&i| atoms[i].weight()));
        out.push(CandidateSubspace {
            subspace: sub,
            atom_indices,
            mass,
        });
    }
    out
}

#[derive(Debug, Clone)]
pub struct ConcentrationRow {
    pub dim: usize,
    pub mass: f64,
    pub bound: f64,
    /// bound - mass; negative means violated.
    pub slack: f64,
    pub basis: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct SplitCheck {
    pub complementary: bool,
    pub support_covered: bool,
    pub mass_l: f64,
    pub mass_lt: f64,
    pub bound_l: f64,
    pub bound_lt: f64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct EqualityCase {
    pub candidate: ConcentrationRow,
    pub complement_basis: Vec<Vec<f64>>,
    pub split: Option<SplitCheck>,
}

#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub dim: usize,
    pub total_mass: f64,
    pub candidates_checked: usize,
    pub holds: bool,
    pub worst: ConcentrationRow,
    pub equality_cases: Vec<EqualityCase>,
    pub near_equality: Vec<ConcentrationRow>,
}

fn basis_rows(s: &Subspace) -> Vec<Vec<f64>> {
    s.basis().iter().map(|b| b.iter().copied().collect()).collect()
}

/// Checks mass(L) <= (dim L / n) * total over every candidate span. Equality
/// cases carry the complementary span of the remaining support and its split
/// verification.
pub fn check_concentration(
    measure: &DiscreteSphericalMeasure,
    tol: &Tolerances,
) -> Result<ConcentrationReport> {
    let dim = measure.dim();
    if measure.atoms().is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let total = measure.total_mass();
    let n = dim as f64;
    let candidates = candidate_subspaces(measure, tol);

    let mut rows: Vec<(ConcentrationRow, CandidateSubspace)> = Vec::with_capacity(candidates.len());
    for cand in candidates {
        let d = cand.subspace.dim();
        let bound = d as f64 / n * total;
        rows.push((
            ConcentrationRow {
                dim: d,
                mass: cand.mass,
                bound,
                slack: bound - cand.mass,
                basis: basis_rows(&cand.subspace),
            },
            cand,
        ));
    }

    let eq_band = tol.scc_equality * total;
    let near_band = tol.scc_near_equality * total;
    let holds = rows.iter().all(|(r, _)| r.slack >= -eq_band);

    let worst = rows
        .iter()
        .map(|(r, _)| r)
        .min_by(|a, b| a.slack.total_cmp(&b.slack))
        .cloned()
        .unwrap_or(ConcentrationRow {
            dim: 0,
            mass: 0.0,
            bound: 0.0,
            slack: total,
            basis: Vec::new(),
        });

    let mut equality_cases = Vec::new();
    let mut near_equality = Vec::new();
    for (row, cand) in &rows {
        if row.slack.abs() <= eq_band {
            let outside: Vec<DVector<f64>> = measure
                .atoms()
                .iter()
                .enumerate()
                .filter(|(i, _)| !cand.atom_indices.contains(i))
                .map(|(_, a)| a.direction().clone())
                .collect();
            let complement = if outside.is_empty() {
                None
            } else {
                Subspace::from_spanning(dim, &outside, tol).ok()
            };
            let split = complement
                .as_ref()
                .and_then(|lt| split_mass_report(measure, &cand.subspace, lt, tol).ok());
            equality_cases.push(EqualityCase {
                candidate: row.clone(),
                complement_basis: complement.as_ref().map(basis_rows).unwrap_or_default(),
                split,
            });
        } else if row.slack.abs() <= near_band {
            near_equality.push(row.clone());
        }
    }

    Ok(ConcentrationReport {
        dim,
        total_mass: total,
        candidates_checked: rows.len(),
        holds,
        worst,
        equality_cases,
        near_equality,
    })
}

/// Detailed split verification for complementary subspaces L and Lt:
/// the support must lie in their union and each must carry exactly its
/// dimension fraction of the total mass.
pub fn split_mass_report(
    measure: &DiscreteSphericalMeasure,
    l: &Subspace,
    lt: &Subspace,
    tol: &Tolerances,
) -> Result<SplitCheck> {
    let dim = measure.dim();
    if l.ambient() != dim || lt.ambient() != dim {
        return Err(Error::DimensionMismatch {
            left: l.ambient().max(lt.ambient()),
            right: dim,
        });
    }
    if l.dim() + lt.dim() != dim {
        return Err(Error::NotComplementary {
            dim_l: l.dim(),
            dim_lt: lt.dim(),
            dim,
        });
    }
    // Complementary means the union of bases spans everything.
    let mut joint: Vec<DVector<f64>> = l.basis().to_vec();
    joint.extend_from_slice(lt.basis());
    let complementary = crate::geom::linalg::rank_of(&joint, tol.rank) == dim;

    let total = measure.total_mass();
    let support_covered = measure
        .atoms()
        .iter()
        .all(|a| l.contains(a.direction(), tol.rank) || lt.contains(a.direction(), tol.rank));
    let mass_l = measure.subspace_mass(l, tol);
    let mass_lt = measure.subspace_mass(lt, tol);
    let bound_l = l.dim() as f64 / dim as f64 * total;
    let bound_lt = lt.dim() as f64 / dim as f64 * total;
    let band = tol.scc_equality * total;
    let ok = complementary
        && support_covered
        && (mass_l - bound_l).abs() <= band
        && (mass_lt - bound_lt).abs() <= band;
    Ok(SplitCheck {
        complementary,
        support_covered,
        mass_l,
        mass_lt,
        bound_l,
        bound_lt,
        ok,
    })
}

/// True iff the support splits across L and Lt with exact dimension-fraction
/// masses.
pub fn verify_split_mass(
    measure: &DiscreteSphericalMeasure,
    l: &Subspace,
    lt: &Subspace,
    tol: &Tolerances,
) -> Result<bool> {
    if !(l.dim() + lt.dim() == measure.dim()) {
        return Err(Error::NotComplementary {
            dim_l: l.dim(),
            dim_lt: lt.dim(),
            dim: measure.dim(),
        });
    }
    split_mass_report(measure, l, lt, tol).map(|r| r.ok)
}

fn row_json(r: &ConcentrationRow) -> Json {
    Json::obj(vec![
        ("dim", Json::Int(r.dim as i64)),
        ("mass", Json::Num(r.mass)),
        ("bound", Json::Num(r.bound)),
        ("slack", Json::Num(r.slack)),
        (
            "basis",
            Json::Arr(r.basis.iter().map(|b| Json::nums(b.iter().copied())).collect()),
        ),
    ])
}

pub fn report_json(r: &ConcentrationReport) -> Json {
    Json::obj(vec![
        ("dim", Json::Int(r.dim as i64)),
        ("total_mass", Json::Num(r.total_mass)),
        ("candidates_checked", Json::Int(r.candidates_checked as i64)),
        ("holds", Json::Bool(r.holds)),
        ("worst", row_json(&r.worst)),
        (
            "equality_cases",
            Json::Arr(
                r.equality_cases
                    .iter()
                    .map(|e| {
                        Json::obj(vec![
                            ("candidate", row_json(&e.candidate)),
                            (
                                "complement_basis",
                                Json::Arr(
                                    e.complement_basis
                                        .iter()
                                        .map(|b| Json::nums(b.iter().copied()))
                                        .collect(),
                                ),
                            ),
                            (
                                "split",
                                e.split.as_ref().map_or(Json::Null, |s| {
                                    Json::obj(vec![
                                        ("complementary", Json::Bool(s.complementary)),
                                        ("support_covered", Json::Bool(s.support_covered)),
                                        ("mass_l", Json::Num(s.mass_l)),
                                        ("mass_lt", Json::Num(s.mass_lt)),
                                        ("bound_l", Json::Num(s.bound_l)),
                                        ("bound_lt", Json::Num(s.bound_lt)),
                                        ("ok", Json::Bool(s.ok)),
                                    ])
                                }),
                            ),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "near_equality",
            Json::Arr(r.near_equality.iter().map(row_json).collect()),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::bodies::{cube, regular_simplex};
    use crate::measure::cone_volume_measure;

    #[test]
    fn cube3_candidates() {
        let m = cone_volume_measure(&cube(3, 1.0).unwrap()).unwrap();
        let cands = candidate_subspaces(&m, &Tolerances::DEFAULT);
        // Three coordinate lines and three coordinate planes.
        assert_eq!(cands.len(), 6);
        let lines = cands.iter().filter(|c| c.subspace.dim() == 1).count();
        let planes = cands.iter().filter(|c| c.subspace.dim() == 2).count();
        assert_eq!((lines, planes), (3, 3));
        for c in &cands {
            assert_eq!(c.atom_indices.len(), 2 * c.subspace.dim());
        }
    }

    #[test]
    fn cube_equalities_split() {
        let m = cone_volume_measure(&cube(3, 1.0).unwrap()).unwrap();
        let rep = check_concentration(&m, &Tolerances::DEFAULT).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.equality_cases.len(), 6);
        for eq in &rep.equality_cases {
            let split = eq.split.as_ref().expect("split present");
            assert!(split.ok, "split failed: {:?}", split);
        }
    }

    #[test]
    fn simplex_is_strict() {
        let m = cone_volume_measure(&regular_simplex(3).unwrap()).unwrap();
        let rep = check_concentration(&m, &Tolerances::DEFAULT).unwrap();
        assert!(rep.holds);
        assert!(rep.equality_cases.is_empty());
        // d/(n+1) of the total per d-dim candidate: slack is total*(d/n - d/(n+1)) > 0.
        assert!(rep.worst.slack > 1e-3 * rep.total_mass);
    }

    #[test]
    fn violating_measure_detected() {
        use nalgebra::DVector;
        // Mass 5 on the e1 line out of total 6: 5 > 6/3 * 1.
        let m = DiscreteSphericalMeasure::new(
            3,
            vec![
                (DVector::from_column_slice(&[1.0, 0.0, 0.0]), 2.5),
                (DVector::from_column_slice(&[-1.0, 0.0, 0.0]), 2.5),
                (DVector::from_column_slice(&[0.0, 1.0, 0.0]), 0.5),
                (DVector::from_column_slice(&[0.0, -0.7, 0.7]), 0.5),
            ],
        )
        .unwrap();
        let rep = check_concentration(&m, &Tolerances::DEFAULT).unwrap();
        assert!(!rep.holds);
        assert!(rep.worst.slack < 0.0);
        assert_eq!(rep.worst.dim, 1);
    }

    #[test]
    fn split_requires_complementary_dims() {
        let m = cone_volume_measure(&cube(3, 1.0).unwrap()).unwrap();
        let l = Subspace::line(&nalgebra::DVector::from_column_slice(&[1.0, 0.0, 0.0])).unwrap();
        let too_small =
            Subspace::line(&nalgebra::DVector::from_column_slice(&[0.0, 1.0, 0.0])).unwrap();
        assert!(matches!(
            verify_split_mass(&m, &l, &too_small, &Tolerances::DEFAULT),
            Err(Error::NotComplementary { .. })
        ));
    }
}
