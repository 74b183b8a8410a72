//! Moment functionals of discrete measures: the independent-tuple
//! functional U and the sigma hierarchy interpolating from total mass to U.
//!
//! U^n sums n! * (product of weights) over independent unordered n-subsets
//! of atoms; repeated atoms are never independent, so ordered enumeration
//! and subset enumeration agree. sigma_m comes from the recursion over
//! (m-1)-subsets with the complement factor (total - mass of the span).

use itertools::Itertools;
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geom::linalg::{det_small, orthonormalize, MAX_DIM};
use crate::measure::DiscreteSphericalMeasure;
use crate::par;
use crate::subspace::Subspace;
use crate::tol::Tolerances;

const TUPLE_GUARD: f64 = 1e8;

fn guard(atoms: usize, power: usize) -> Result<()> {
    if (atoms as f64).powi(power as i32) > TUPLE_GUARD {
        return Err(Error::TooLarge {
            atoms,
            dim: power,
        });
    }
    Ok(())
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

fn tuple_det(dirs: &[&DVector<f64>]) -> f64 {
    let n = dirs.len();
    let mut m = [0.0f64; MAX_DIM * MAX_DIM];
    for (r, d) in dirs.iter().enumerate() {
        for c in 0..n {
            m[r * n + c] = d[c];
        }
    }
    det_small(&mut m[..n * n], n)
}

/// U(mu) = (n! * sum over independent n-subsets of weight products)^(1/n).
pub fn u_functional(measure: &DiscreteSphericalMeasure, tol: &Tolerances) -> Result<f64> {
    let n = measure.dim();
    let atoms = measure.atoms();
    guard(atoms.len(), n)?;
    if atoms.len() < n {
        return Ok(0.0);
    }
    // Parallel over the first index of the subset; each chunk scans its
    // remaining combinations in lexicographic order.
    let chunks = par::map_indexed(atoms.len() - n + 1, |first| {
        let mut acc = 0.0f64;
        for rest in ((first + 1)..atoms.len()).combinations(n - 1) {
            let mut dirs: Vec<&DVector<f64>> = Vec::with_capacity(n);
            dirs.push(atoms[first].direction());
            let mut prod = atoms[first].weight();
            for &i in &rest {
                dirs.push(atoms[i].direction());
                prod *= atoms[i].weight();
            }
            if tuple_det(&dirs).abs() > tol.independence {
                acc += prod;
            }
        }
        acc
    });
    let sum = par::sum_ordered(chunks);
    Ok((factorial(n) * sum).powf(1.0 / n as f64))
}

/// sigma_m via the subset recursion. sigma_1 is the total mass and sigma_n
/// equals U.
pub fn sigma(measure: &DiscreteSphericalMeasure, m: usize, tol: &Tolerances) -> Result<f64> {
    let n = measure.dim();
    if m < 1 || m > n {
        return Err(Error::InvalidInput(format!(
            "sigma order {} out of range 1..={}",
            m, n
        )));
    }
    let total = measure.total_mass();
    if m == 1 {
        return Ok(total);
    }
    let atoms = measure.atoms();
    guard(atoms.len(), m)?;
    let k = m - 1;
    let mut memo: std::collections::HashMap<Vec<i64>, f64> = std::collections::HashMap::new();
    let mut sum = 0.0f64;
    for combo in (0..atoms.len()).combinations(k) {
        let dirs: Vec<DVector<f64>> = combo.iter().map(|&i| atoms[i].direction().clone()).collect();
        let basis = orthonormalize(&dirs, tol.rank);
        if basis.len() != k {
            continue;
        }
        let sub = match Subspace::from_spanning(n, &basis, tol) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let key = sub.dedup_key(tol.span_dedup);
        let span_mass = *memo
            .entry(key)
            .or_insert_with(|| measure.subspace_mass(&sub, tol));
        let prod: f64 = combo.iter().map(|&i| atoms[i].weight()).product();
        sum += prod * (total - span_mass);
    }
    Ok((factorial(k) * sum).powf(1.0 / m as f64))
}

/// sigma_m by brute-force ordered-tuple enumeration; the oracle the
/// recursion is tested against. Only sensible for small m.
pub fn sigma_direct(
    measure: &DiscreteSphericalMeasure,
    m: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let n = measure.dim();
    if m < 1 || m > n {
        return Err(Error::InvalidInput(format!(
            "sigma order {} out of range 1..={}",
            m, n
        )));
    }
    let atoms = measure.atoms();
    guard(atoms.len(), m)?;
    let mut sum = 0.0f64;
    let mut idx = vec![0usize; m];
    loop {
        let dirs: Vec<&DVector<f64>> = idx.iter().map(|&i| atoms[i].direction()).collect();
        let independent = if idx.iter().duplicates().next().is_some() {
            false
        } else if m == n {
            tuple_det(&dirs).abs() > tol.independence
        } else {
            let owned: Vec<DVector<f64>> = dirs.iter().map(|d| (*d).clone()).collect();
            orthonormalize(&owned, tol.rank).len() == m
        };
        if independent {
            sum += idx.iter().map(|&i| atoms[i].weight()).product::<f64>();
        }
        // Odometer over ordered tuples.
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(sum.powf(1.0 / m as f64));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < atoms.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainRow {
    pub m: usize,
    /// sigma_{m+1}^{m+1}
    pub lhs: f64,
    /// (1 - m/n) * total * sigma_m^m
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone)]
pub struct URatioReport {
    pub dim: usize,
    pub volume: f64,
    pub u_value: f64,
    /// (n!)^(1/n) / n * volume.
    pub lower_bound: f64,
    pub ratio: f64,
    pub slack: f64,
    pub sigma: Vec<f64>,
    pub chain: Vec<ChainRow>,
    /// Support has exactly n antipodal direction pairs spanning R^n; the
    /// equality configuration for the lower bound.
    pub parallelepiped_support: bool,
}

/// Antipodal-pair support structure test.
pub fn has_parallelepiped_support(measure: &DiscreteSphericalMeasure, tol: &Tolerances) -> bool {
    let n = measure.dim();
    let atoms = measure.atoms();
    if atoms.len() != 2 * n {
        return false;
    }
    let mut paired = vec![false; atoms.len()];
    let mut reps: Vec<DVector<f64>> = Vec::new();
    for i in 0..atoms.len() {
        if paired[i] {
            continue;
        }
        let mut partner = None;
        for j in i + 1..atoms.len() {
            if !paired[j]
                && (atoms[i].direction() + atoms[j].direction()).norm() <= tol.atom_merge
            {
                partner = Some(j);
                break;
            }
        }
        match partner {
            Some(j) => {
                paired[i] = true;
                paired[j] = true;
                reps.push(atoms[i].direction().clone());
            }
            None => return false,
        }
    }
    reps.len() == n && orthonormalize(&reps, tol.rank).len() == n
}

/// Full report for the cone-volume measure of a polytope: U, the sigma
/// ladder, the volume lower bound, and the chain inequalities.
pub fn u_ratio_report(
    measure: &DiscreteSphericalMeasure,
    volume: f64,
    tol: &Tolerances,
) -> Result<URatioReport> {
    let n = measure.dim();
    let u_value = u_functional(measure, tol)?;
    let mut sig = Vec::with_capacity(n);
    for m in 1..=n {
        sig.push(sigma(measure, m, tol)?);
    }
    let lower_bound = factorial(n).powf(1.0 / n as f64) / n as f64 * volume;
    let mut chain = Vec::new();
    for m in 1..n {
        let lhs = sig[m].powi(m as i32 + 1);
        let rhs = (1.0 - m as f64 / n as f64) * measure.total_mass() * sig[m - 1].powi(m as i32);
        chain.push(ChainRow {
            m,
            lhs,
            rhs,
            slack: lhs - rhs,
        });
    }
    Ok(URatioReport {
        dim: n,
        volume,
        u_value,
        lower_bound,
        ratio: u_value / lower_bound,
        slack: u_value - lower_bound,
        sigma: sig,
        chain,
        parallelepiped_support: has_parallelepiped_support(measure, tol),
    })
}

pub fn report_json(r: &URatioReport) -> crate::report::Json {
    use crate::report::Json;
    Json::obj(vec![
        ("dim", Json::Int(r.dim as i64)),
        ("volume", Json::Num(r.volume)),
        ("u_value", Json::Num(r.u_value)),
        ("lower_bound", Json::Num(r.lower_bound)),
        ("ratio", Json::Num(r.ratio)),
        ("slack", Json::Num(r.slack)),
        ("sigma", Json::nums(r.sigma.iter().copied())),
        (
            "chain",
            Json::Arr(
                r.chain
                    .iter()
                    .map(|c| {
                        Json::obj(vec![
                            ("m", Json::Int(c.m as i64)),
                            ("lhs", Json::Num(c.lhs)),
                            ("rhs", Json::Num(c.rhs)),
                            ("slack", Json::Num(c.slack)),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "parallelepiped_support",
            Json::Bool(r.parallelepiped_support),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::bodies::{cube, regular_simplex};
    use crate::measure::cone_volume_measure;

    const TOL: Tolerances = Tolerances::DEFAULT;

    #[test]
    fn square_u_value() {
        // Unit-volume square: four atoms of weight 1/4, U = sqrt(1/2).
        let c = cube(2, 0.5).unwrap();
        let m = cone_volume_measure(&c).unwrap();
        let u = u_functional(&m, &TOL).unwrap();
        assert!((u - (0.5f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn triangle_ratio() {
        let s = regular_simplex(2).unwrap();
        let m = cone_volume_measure(&s).unwrap();
        let rep = u_ratio_report(&m, s.volume(), &TOL).unwrap();
        assert!((rep.ratio - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(!rep.parallelepiped_support);
    }

    #[test]
    fn cube_is_equality() {
        for n in 2..=4 {
            let c = cube(n, 1.0).unwrap();
            let m = cone_volume_measure(&c).unwrap();
            let rep = u_ratio_report(&m, c.volume(), &TOL).unwrap();
            assert!((rep.ratio - 1.0).abs() < 1e-12, "n = {}", n);
            assert!(rep.parallelepiped_support);
            for row in &rep.chain {
                assert!(row.slack >= -1e-9 * row.rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sigma_endpoints_and_oracle() {
        let s = regular_simplex(3).unwrap();
        let m = cone_volume_measure(&s).unwrap();
        let total = m.total_mass();
        assert!((sigma(&m, 1, &TOL).unwrap() - total).abs() < 1e-14);
        let u = u_functional(&m, &TOL).unwrap();
        let s3 = sigma(&m, 3, &TOL).unwrap();
        assert!((s3 - u).abs() <= 1e-12 * u);
        for order in 2..=3 {
            let fast = sigma(&m, order, &TOL).unwrap();
            let slow = sigma_direct(&m, order, &TOL).unwrap();
            assert!(
                (fast - slow).abs() <= 1e-12 * slow.max(1.0),
                "order {}: {} vs {}",
                order,
                fast,
                slow
            );
        }
    }

    #[test]
    fn guard_rejects_huge_enumerations() {
        use nalgebra::DVector;
        let atoms: Vec<(DVector<f64>, f64)> = (0..2000)
            .map(|i| {
                let a = i as f64 * 0.001;
                (DVector::from_column_slice(&[a.cos(), a.sin(), 0.3]), 1.0)
            })
            .collect();
        let m = DiscreteSphericalMeasure::new(3, atoms).unwrap();
        assert!(matches!(
            u_functional(&m, &TOL),
            Err(Error::TooLarge { .. })
        ));
    }
}
