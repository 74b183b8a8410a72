//! Isotropic positions: the measure-level fixed-point iteration and the
//! body-level outer iteration.
//!
//! A normalized measure is isotropic when (n / total) * sum of
//! w_i u_i u_i^T equals the identity. The update pushes the current
//! transform by M^(-damping/2) and renormalizes to determinant one; the
//! residual is the Frobenius distance of M from the identity, checked
//! before each update so isotropic inputs stop at zero iterations.
//! Concentration at or above a dimension fraction obstructs convergence,
//! so the failure diagnosis reports the worst concentration candidate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::measure::{cone_volume_measure_with, DiscreteSphericalMeasure};
use crate::scc;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy)]
pub struct IsotropyOptions {
    pub tolerance: f64,
    pub max_iter: usize,
    /// Step fraction in (0, 1]; 1 is the plain fixed point.
    pub damping: f64,
}

impl Default for IsotropyOptions {
    fn default() -> Self {
        IsotropyOptions {
            tolerance: 1e-10,
            max_iter: 500,
            damping: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsotropyResult {
    /// Determinant-one transform T with T(mu) isotropic.
    pub transform: DMatrix<f64>,
    /// Pushforward atoms (Tu/|Tu|, w * n / total), renormalized to total n.
    pub normalized_measure: DiscreteSphericalMeasure,
    pub residual: f64,
    pub iterations: usize,
    pub residual_trace: Vec<f64>,
}

/// Frobenius distance of the normalized second moment from the identity.
pub fn isotropy_residual(measure: &DiscreteSphericalMeasure) -> f64 {
    let n = measure.dim();
    let total = measure.total_mass();
    let mut m = measure.second_moment() * (n as f64 / total);
    for i in 0..n {
        m[(i, i)] -= 1.0;
    }
    m.norm()
}

pub fn is_isotropic(measure: &DiscreteSphericalMeasure, tol_residual: f64) -> bool {
    isotropy_residual(measure) <= tol_residual
}

/// Atoms transformed by T: directions renormalized, weights scaled so the
/// total becomes the ambient dimension.
pub fn pushforward_normalized(
    measure: &DiscreteSphericalMeasure,
    t: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<DiscreteSphericalMeasure> {
    let n = measure.dim();
    let total = measure.total_mass();
    let raw: Vec<(DVector<f64>, f64)> = measure
        .atoms()
        .iter()
        .map(|a| (t * a.direction(), a.weight() * n as f64 / total))
        .collect();
    DiscreteSphericalMeasure::new_with(n, raw, tol)
}

/// Q D^exponent Q^T for a symmetric positive definite input.
pub(crate) fn sym_power(m: &DMatrix<f64>, exponent: f64, floor: f64) -> Result<DMatrix<f64>> {
    let eig = m.clone().symmetric_eigen();
    let mut worst = f64::INFINITY;
    for &v in eig.eigenvalues.iter() {
        worst = worst.min(v);
    }
    if worst <= floor {
        return Err(Error::SupportDegenerate { eigenvalue: worst });
    }
    let n = m.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = eig.eigenvalues[i].powf(exponent);
    }
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

fn det_normalized(t: DMatrix<f64>) -> DMatrix<f64> {
    let n = t.nrows();
    let det = t.clone().lu().determinant().abs();
    t / det.powf(1.0 / n as f64)
}

fn concentration_diagnosis(measure: &DiscreteSphericalMeasure, tol: &Tolerances) -> String {
    match scc::check_concentration(measure, tol) {
        Ok(rep) => {
            let w = &rep.worst;
            format!(
                "worst concentration candidate: dim {} carries mass {:.6e} against bound {:.6e}",
                w.dim, w.mass, w.bound
            )
        }
        Err(_) => "concentration diagnosis unavailable".to_string(),
    }
}

/// Fixed-point iteration toward an isotropic position of the measure.
pub fn isotropize(
    measure: &DiscreteSphericalMeasure,
    opts: &IsotropyOptions,
    tol: &Tolerances,
) -> Result<IsotropyResult> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "damping {} outside (0, 1]",
            opts.damping
        )));
    }
    let n = measure.dim();
    let total = measure.total_mass();
    let mut t = DMatrix::<f64>::identity(n, n);
    let mut trace = Vec::new();

    for iter in 0..=opts.max_iter {
        // Second moment of the pushforward in its normalized form.
        let mut m = DMatrix::<f64>::zeros(n, n);
        for a in measure.atoms() {
            let tu = &t * a.direction();
            let sq = tu.norm_squared();
            m += (&tu * tu.transpose()) * (a.weight() / sq);
        }
        m *= n as f64 / total;
        let mut dev = m.clone();
        for i in 0..n {
            dev[(i, i)] -= 1.0;
        }
        let residual = dev.norm();
        trace.push(residual);
        if residual <= opts.tolerance {
            let normalized = pushforward_normalized(measure, &t, tol)?;
            return Ok(IsotropyResult {
                transform: t,
                normalized_measure: normalized,
                residual,
                iterations: iter,
                residual_trace: trace,
            });
        }
        if iter == opts.max_iter {
            break;
        }
        let step = sym_power(&m, -opts.damping / 2.0, tol.eigen_floor)?;
        t = det_normalized(step * &t);
    }

    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: *trace.last().unwrap(),
        diagnosis: concentration_diagnosis(measure, tol),
    })
}

#[derive(Debug, Clone)]
pub struct BodyIsotropyResult {
    pub transform: DMatrix<f64>,
    pub body: crate::geom::Polytope,
    pub residual: f64,
    pub iterations: usize,
    pub residual_trace: Vec<f64>,
}

/// Outer iteration on the body: recompute the cone-volume measure of the
/// recentered body, apply one normalized sqrt step, re-hull, repeat.
pub fn isotropic_position_body(
    body: &crate::geom::Polytope,
    tolerance: f64,
    max_iter: usize,
    tol: &Tolerances,
) -> Result<BodyIsotropyResult> {
    let n = body.dim();
    let mut q = body.translate_to_centroid();
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut trace = Vec::new();

    for iter in 0..=max_iter {
        let mu = cone_volume_measure_with(&q, tol)?;
        let m = mu.second_moment() * (n as f64 / mu.total_mass());
        let mut dev = m.clone();
        for i in 0..n {
            dev[(i, i)] -= 1.0;
        }
        let residual = dev.norm();
        trace.push(residual);
        if residual <= tolerance {
            return Ok(BodyIsotropyResult {
                transform: a,
                body: q,
                residual,
                iterations: iter,
                residual_trace: trace,
            });
        }
        if iter == max_iter {
            break;
        }
        // The body's facet normals move by the inverse transpose of the map
        // applied to the body, so driving the normal atoms by M^(-1/2)
        // means multiplying the body by M^(1/2). For a parallelepiped this
        // makes the normal frame orthonormal in one step.
        let step = det_normalized(sym_power(&m, 0.5, tol.eigen_floor)?);
        a = &step * a;
        q = q.linear_image(&step)?.translate_to_centroid();
    }

    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: *trace.last().unwrap(),
        diagnosis: concentration_diagnosis(&cone_volume_measure_with(&q, tol)?, tol),
    })
}
