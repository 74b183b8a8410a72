//! Classical transforms and inequality checks: the halfspace volume bound
//! at the centroid, the hemisphere scan over cone-volume mass, Schwarz
//! rounding, shaking down, mixed volumes by polynomial fitting, and the
//! Minkowski-inequality stability report.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::bodies::random_direction;
use crate::geom::linalg::complement_basis;
use crate::geom::Polytope;
use crate::measure::cone_volume_measure_with;
use crate::metrics;
use crate::par;
use crate::report::Json;
use crate::sections::{grid_cells, SectionSlicer};
use crate::subspace::Subspace;
use crate::tol::Tolerances;

pub const SCAN_SEED: u64 = 0x5EED;

/// Unit ball volume in the given dimension (1 through 5).
pub fn unit_ball_volume(dim: usize) -> Result<f64> {
    use std::f64::consts::PI;
    Ok(match dim {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        4 => PI * PI / 2.0,
        5 => 8.0 * PI * PI / 15.0,
        _ => {
            return Err(Error::InvalidInput(format!(
                "no ball-volume entry for dimension {}",
                dim
            )))
        }
    })
}

/// Fraction of the volume on the positive side of v through the origin.
/// For a centroid-centered body this is at least 1/e.
pub fn grunbaum_ratio(body: &Polytope, v: &DVector<f64>, _tol: &Tolerances) -> Result<f64> {
    let norm = v.norm();
    if norm <= 1e-12 {
        return Err(Error::ZeroDirection);
    }
    let inward = -v / norm;
    match body.halfspace_clip(&inward, 0.0) {
        Ok(clipped) => Ok(clipped.volume() / body.volume()),
        Err(Error::EmptyIntersection) => Ok(0.0),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone)]
pub struct GrunbaumScan {
    pub ratio_min: f64,
    pub direction: Vec<f64>,
    /// 1/e.
    pub bound: f64,
    pub slack: f64,
    pub ok: bool,
    pub directions_checked: usize,
}

/// Minimum halfspace ratio over the facet normals (both signs) plus
/// `extra_directions` seeded unit vectors.
pub fn grunbaum_scan(
    body: &Polytope,
    extra_directions: usize,
    tol: &Tolerances,
) -> Result<GrunbaumScan> {
    let n = body.dim();
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    for f in body.facets() {
        dirs.push(f.normal().clone());
        dirs.push(-f.normal());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SCAN_SEED);
    for _ in 0..extra_directions {
        dirs.push(random_direction(&mut rng, n));
    }
    let ratios: Vec<f64> = par::map_slice(&dirs, |d| {
        grunbaum_ratio(body, d, tol).unwrap_or(f64::INFINITY)
    });
    let mut best = 0usize;
    for (i, r) in ratios.iter().enumerate() {
        if *r < ratios[best] {
            best = i;
        }
    }
    let bound = 1.0 / std::f64::consts::E;
    let ratio_min = ratios[best];
    Ok(GrunbaumScan {
        ratio_min,
        direction: dirs[best].iter().copied().collect(),
        bound,
        slack: ratio_min - bound,
        ok: ratio_min >= bound - 1e-9,
        directions_checked: dirs.len(),
    })
}

#[derive(Debug, Clone)]
pub struct HemisphereScan {
    pub ratio_min: f64,
    pub direction: Vec<f64>,
    /// 1/(2n).
    pub bound: f64,
    pub slack: f64,
    pub ok: bool,
    /// Chamber enumeration was exhaustive; otherwise the minimum is only
    /// an upper bound on the infimum.
    pub exact: bool,
    pub method: &'static str,
    pub equality_detected: bool,
    pub candidates_checked: usize,
}

fn hemisphere_candidates_2d(normals: &[DVector<f64>]) -> Vec<DVector<f64>> {
    // Walls of the chamber arrangement are the rotations of the normals;
    // add every arc midpoint between consecutive walls.
    let mut walls: Vec<DVector<f64>> = Vec::new();
    for u in normals {
        walls.push(DVector::from_column_slice(&[-u[1], u[0]]));
        walls.push(DVector::from_column_slice(&[u[1], -u[0]]));
    }
    let mut angles: Vec<f64> = walls.iter().map(|w| w[1].atan2(w[0])).collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut candidates = walls;
    for i in 0..angles.len() {
        let a = angles[i];
        let b = if i + 1 < angles.len() {
            angles[i + 1]
        } else {
            angles[0] + 2.0 * std::f64::consts::PI
        };
        let mid = 0.5 * (a + b);
        candidates.push(DVector::from_column_slice(&[mid.cos(), mid.sin()]));
    }
    candidates
}

fn hemisphere_candidates_3d(normals: &[DVector<f64>]) -> Vec<DVector<f64>> {
    // Vertices of the great-circle arrangement, plus perturbations into
    // every incident arc and chamber. Perturbation size stays below the
    // smallest nonzero inner product so untouched signs cannot flip.
    let mut candidates: Vec<DVector<f64>> = Vec::new();
    for u in normals {
        candidates.push(u.clone());
        candidates.push(-u);
    }
    for i in 0..normals.len() {
        for j in (i + 1)..normals.len() {
            let cross = normals[i].cross(&normals[j]);
            let norm = cross.norm();
            if norm <= 1e-9 {
                continue;
            }
            let v0 = cross / norm;
            for sign in [1.0, -1.0] {
                let vertex = &v0 * sign;
                let mut gap = f64::INFINITY;
                for u in normals {
                    let d = u.dot(&vertex).abs();
                    if d > 1e-9 {
                        gap = gap.min(d);
                    }
                }
                let eps = (gap / 10.0).min(1e-4);
                let frame = complement_basis(std::slice::from_ref(&vertex), 3);
                candidates.push(vertex.clone());
                if frame.len() == 2 {
                    let (t1, t2) = (&frame[0], &frame[1]);
                    for (a, b) in [
                        (1.0, 0.0),
                        (-1.0, 0.0),
                        (0.0, 1.0),
                        (0.0, -1.0),
                        (1.0, 1.0),
                        (1.0, -1.0),
                        (-1.0, 1.0),
                        (-1.0, -1.0),
                    ] {
                        let p = &vertex + t1 * (eps * a) + t2 * (eps * b);
                        candidates.push(p.normalize());
                    }
                }
            }
        }
    }
    candidates
}

/// Smallest cone-volume mass of an open hemisphere, as a fraction of the
/// volume. Exhaustive over arrangement chambers for n <= 3; seeded search
/// with coordinate refinement above that.
pub fn hemisphere_scan(
    body: &Polytope,
    num_samples: usize,
    refine_steps: usize,
    tol: &Tolerances,
) -> Result<HemisphereScan> {
    let n = body.dim();
    let measure = cone_volume_measure_with(body, tol)?;
    let volume = body.volume();
    let normals: Vec<DVector<f64>> = body.facets().iter().map(|f| f.normal().clone()).collect();

    let (candidates, exact, method) = match n {
        2 => (hemisphere_candidates_2d(&normals), true, "chamber-enumeration"),
        3 => (hemisphere_candidates_3d(&normals), true, "chamber-enumeration"),
        _ => {
            let mut c: Vec<DVector<f64>> = Vec::new();
            for i in 0..n {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                c.push(e.clone());
                c.push(-e);
            }
            for u in &normals {
                c.push(u.clone());
                c.push(-u);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(SCAN_SEED);
            for _ in 0..num_samples {
                c.push(random_direction(&mut rng, n));
            }
            (c, false, "seeded-scan")
        }
    };

    let ratios: Vec<f64> = par::map_slice(&candidates, |v| {
        measure.hemisphere_mass(v, tol) / volume
    });
    let mut best = 0usize;
    for (i, r) in ratios.iter().enumerate() {
        if *r < ratios[best] {
            best = i;
        }
    }
    let mut best_dir = candidates[best].clone();
    let mut best_ratio = ratios[best];

    if !exact {
        for _ in 0..refine_steps {
            let mut improved = false;
            for axis in 0..n {
                for delta in [0.5, 0.1, 0.02] {
                    for sign in [1.0, -1.0] {
                        let mut v = best_dir.clone();
                        v[axis] += sign * delta;
                        let norm = v.norm();
                        if norm <= 1e-9 {
                            continue;
                        }
                        v /= norm;
                        let r = measure.hemisphere_mass(&v, tol) / volume;
                        if r < best_ratio - 1e-15 {
                            best_ratio = r;
                            best_dir = v;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }

    let bound = 1.0 / (2.0 * n as f64);
    Ok(HemisphereScan {
        ratio_min: best_ratio,
        direction: best_dir.iter().copied().collect(),
        bound,
        slack: best_ratio - bound,
        ok: best_ratio >= bound - 1e-9,
        exact,
        method,
        equality_detected: best_ratio <= bound + 1e-6,
        candidates_checked: candidates.len(),
    })
}

#[derive(Debug, Clone)]
pub struct RadialProfileBody {
    pub axis: Vec<f64>,
    /// Sample abscissas along the axis (cell midpoints).
    pub ts: Vec<f64>,
    /// Ball radius reproducing each section volume.
    pub radii: Vec<f64>,
    pub slice_dim: usize,
    pub volume_quadrature: f64,
    pub source_volume: f64,
    pub volume_mismatch_rel: f64,
    /// Radii constant within 1e-6 relative.
    pub cylinder: bool,
    /// Largest violation of midpoint concavity of the radius.
    pub concavity_max_defect: f64,
    pub concavity_ok: bool,
}

/// Replace every section orthogonal to v by the ball of the same volume.
pub fn schwarz_rounding(
    body: &Polytope,
    v: &DVector<f64>,
    resolution: usize,
    tol: &Tolerances,
) -> Result<RadialProfileBody> {
    if resolution < 3 {
        return Err(Error::InvalidResolution(resolution));
    }
    let n = body.dim();
    let k = n - 1;
    let omega = unit_ball_volume(k)?;
    let line = Subspace::line(v)?;
    let slicer = SectionSlicer::new(body, &line, tol)?;
    let (t0, t1) = {
        let vs = slicer.projection().vertices();
        (vs[0][0], vs[vs.len() - 1][0])
    };
    let w = (t1 - t0) / resolution as f64;
    if !(w > 0.0) {
        return Err(Error::DegenerateInput { dim: n, rank: 0 });
    }
    let ts: Vec<f64> = (0..resolution)
        .map(|j| t0 + (j as f64 + 0.5) * w)
        .collect();
    let values: Vec<f64> = par::map_slice(&ts, |t| {
        slicer
            .slice_volume(&DVector::from_column_slice(&[*t]))
            .unwrap_or(0.0)
    });
    let radii: Vec<f64> = values
        .iter()
        .map(|f| (f / omega).powf(1.0 / k as f64))
        .collect();

    let volume_quadrature = par::sum_ordered(values.iter().map(|f| f * w));
    let source_volume = body.volume();

    let r_max = radii.iter().copied().fold(0.0f64, f64::max);
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let r_mean = radii.iter().sum::<f64>() / radii.len() as f64;
    let cylinder = r_mean > 0.0 && (r_max - r_min) <= 1e-6 * r_mean;

    let mut defect: f64 = 0.0;
    for j in 1..radii.len() - 1 {
        defect = defect.max(0.5 * (radii[j - 1] + radii[j + 1]) - radii[j]);
    }

    Ok(RadialProfileBody {
        axis: line.basis()[0].iter().copied().collect(),
        ts,
        radii,
        slice_dim: k,
        volume_quadrature,
        source_volume,
        volume_mismatch_rel: (volume_quadrature - source_volume).abs() / source_volume,
        cylinder,
        concavity_max_defect: defect,
        concavity_ok: defect <= 1e-9 * r_max.max(1e-300),
    })
}

#[derive(Debug, Clone)]
pub struct ShakeReport {
    pub axis: Vec<f64>,
    pub resolution: usize,
    pub columns: usize,
    pub volume: f64,
    pub volume_quadrature: f64,
    pub volume_mismatch_rel: f64,
    /// Support value of the body in the axis direction.
    pub top_offset: f64,
    pub centroid_axis_before: f64,
    pub centroid_axis_after: f64,
    /// Always nonnegative; zero exactly when every column already touches
    /// the top plane, which characterizes prisms along the axis.
    pub centroid_shift: f64,
    pub prism_detected: bool,
}

/// Slide every chord parallel to v up against the supporting plane.
pub fn shake_down(
    body: &Polytope,
    v: &DVector<f64>,
    resolution: usize,
    tol: &Tolerances,
) -> Result<ShakeReport> {
    if resolution < 3 {
        return Err(Error::InvalidResolution(resolution));
    }
    let norm = v.norm();
    if norm <= 1e-12 {
        return Err(Error::ZeroDirection);
    }
    let v_unit = v / norm;
    let line = Subspace::line(&v_unit)?;
    let base = line.orthogonal_complement();
    let slicer = SectionSlicer::new(body, &base, tol)?;
    let sign = slicer
        .perp_direction()
        .expect("slice dimension is one")
        .dot(&v_unit);
    let (cells, _widths) = grid_cells(slicer.projection(), resolution)?;
    let top = body.support(&v_unit)?;

    let chords: Vec<Option<(f64, f64)>> = par::map_slice(&cells, |c| {
        slicer.chord(&c.point).map(|(lo, hi)| {
            if sign > 0.0 {
                (lo, hi)
            } else {
                (-hi, -lo)
            }
        })
    });

    let mut volume_quadrature = 0.0;
    let mut moment_before = 0.0;
    let mut moment_after = 0.0;
    let mut columns = 0usize;
    for (cell, chord) in cells.iter().zip(&chords) {
        if let Some((lo, hi)) = chord {
            let len = hi - lo;
            if len <= 0.0 {
                continue;
            }
            columns += 1;
            let mass = len * cell.weight;
            volume_quadrature += mass;
            moment_before += mass * 0.5 * (lo + hi);
            moment_after += mass * (top - 0.5 * len);
        }
    }
    if volume_quadrature <= 0.0 {
        return Err(Error::DegenerateInput {
            dim: body.dim(),
            rank: 0,
        });
    }
    let before = moment_before / volume_quadrature;
    let after = moment_after / volume_quadrature;
    let shift = after - before;
    let span = top + body.support(&(-&v_unit))?;

    Ok(ShakeReport {
        axis: v_unit.iter().copied().collect(),
        resolution,
        columns,
        volume: body.volume(),
        volume_quadrature,
        volume_mismatch_rel: (volume_quadrature - body.volume()).abs() / body.volume(),
        top_offset: top,
        centroid_axis_before: before,
        centroid_axis_after: after,
        centroid_shift: shift,
        prism_detected: shift.abs() <= 1e-12 * span.max(1e-300),
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn multinomial(k: usize, parts: &[usize]) -> f64 {
    factorial(k) / parts.iter().map(|&p| factorial(p)).product::<f64>()
}

/// Exponent vectors of the degree-k monomials in m variables, ordered
/// lexicographically.
fn monomials(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m - 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in (0..=k).rev() {
            prefix.push(v);
            rec(m, k - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k, &mut Vec::new(), &mut out);
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Deterministic positive weight tuples, projectively deduplicated and
/// scaled to unit sum; `skip` drops the first few for refit checks.
fn alpha_tuples(m: usize, k: usize, count: usize, skip: usize) -> Vec<Vec<f64>> {
    let top = k + 1;
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut tuple = vec![1usize; m];
    let mut skipped = 0usize;
    loop {
        let g = tuple.iter().fold(0, |acc, &t| gcd(acc, t));
        let reduced: Vec<usize> = tuple.iter().map(|&t| t / g).collect();
        if !seen.contains(&reduced) {
            seen.push(reduced);
            if skipped < skip {
                skipped += 1;
            } else {
                let sum: f64 = tuple.iter().map(|&t| t as f64).sum();
                out.push(tuple.iter().map(|&t| t as f64 / sum).collect());
                if out.len() == count {
                    return out;
                }
            }
        }
        // Odometer over {1..top}^m.
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if tuple[pos] < top {
                tuple[pos] += 1;
                for t in tuple.iter_mut().skip(pos + 1) {
                    *t = 1;
                }
                break;
            }
        }
    }
}

fn mixed_volume_fit(
    bodies: &[&Polytope],
    skip: usize,
    tol: &Tolerances,
) -> Result<(Vec<Vec<usize>>, Vec<f64>)> {
    let m = bodies.len();
    if m == 0 {
        return Err(Error::InvalidInput("no bodies given".to_string()));
    }
    let k = bodies[0].dim();
    if k > 4 {
        return Err(Error::InvalidInput(format!(
            "mixed volumes limited to dimension 4, got {}",
            k
        )));
    }
    for b in bodies {
        if b.dim() != k {
            return Err(Error::DimensionMismatch {
                left: k,
                right: b.dim(),
            });
        }
    }
    let monos = monomials(m, k);
    let tuples = alpha_tuples(m, k, monos.len() + 3, skip);
    if tuples.len() < monos.len() {
        return Err(Error::InvalidInput(
            "not enough distinct weight tuples for the fit".to_string(),
        ));
    }

    let volumes: Vec<f64> = {
        let results: Vec<Result<f64>> = par::map_slice(&tuples, |alpha| {
            let mut sum: Option<Polytope> = None;
            for (body, &a) in bodies.iter().zip(alpha.iter()) {
                let scaled = body.scale(a);
                sum = Some(match sum {
                    None => scaled,
                    Some(s) => s.minkowski_sum(&scaled)?,
                });
            }
            Ok(sum.expect("at least one body").volume())
        });
        let mut vs = Vec::with_capacity(results.len());
        for r in results {
            vs.push(r?);
        }
        vs
    };

    let rows = tuples.len();
    let cols = monos.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(rows, cols);
    for (r, alpha) in tuples.iter().enumerate() {
        for (c, mono) in monos.iter().enumerate() {
            let mut term = 1.0;
            for (j, &e) in mono.iter().enumerate() {
                term *= alpha[j].powi(e as i32);
            }
            a[(r, c)] = term;
        }
    }
    let b = nalgebra::DVector::from_column_slice(&volumes);
    let svd = a.clone().svd(true, true);
    let coeffs = svd
        .solve(&b, 1e-14)
        .map_err(|_| Error::IllConditioned { residual: f64::INFINITY })?;
    let residual = (&a * &coeffs - &b).norm() / b.norm().max(1e-300);
    if residual > 1e-7 {
        return Err(Error::IllConditioned { residual });
    }
    let _ = tol;
    Ok((monos, coeffs.iter().copied().collect()))
}

/// Mixed volume with the given multiplicities, by fitting the volume
/// polynomial of the weighted Minkowski sum.
pub fn mixed_volume(bodies: &[&Polytope], exponents: &[usize], tol: &Tolerances) -> Result<f64> {
    mixed_volume_skip(bodies, exponents, 0, tol)
}

/// Same fit from a shifted set of weight tuples; agreement between skips
/// is a conditioning check.
pub fn mixed_volume_skip(
    bodies: &[&Polytope],
    exponents: &[usize],
    skip: usize,
    tol: &Tolerances,
) -> Result<f64> {
    if bodies.len() != exponents.len() {
        return Err(Error::DimensionMismatch {
            left: bodies.len(),
            right: exponents.len(),
        });
    }
    let kept: Vec<usize> = (0..bodies.len()).filter(|&i| exponents[i] > 0).collect();
    if kept.is_empty() {
        return Err(Error::InvalidInput("all multiplicities zero".to_string()));
    }
    let bodies_kept: Vec<&Polytope> = kept.iter().map(|&i| bodies[i]).collect();
    let exps_kept: Vec<usize> = kept.iter().map(|&i| exponents[i]).collect();
    let k = bodies_kept[0].dim();
    let total: usize = exps_kept.iter().sum();
    if total != k {
        return Err(Error::InvalidInput(format!(
            "multiplicities sum to {}, need the dimension {}",
            total, k
        )));
    }
    let (monos, coeffs) = mixed_volume_fit(&bodies_kept, skip, tol)?;
    let idx = monos
        .iter()
        .position(|mo| mo == &exps_kept)
        .expect("requested monomial enumerated");
    Ok(coeffs[idx] / multinomial(k, &exps_kept))
}

/// All pair mixed volumes V(C1 taken i times; C2 taken k-i times) from a
/// single fit; index i runs 0..=k.
pub fn mixed_volume_sequence(c1: &Polytope, c2: &Polytope, tol: &Tolerances) -> Result<Vec<f64>> {
    let k = c1.dim();
    if c2.dim() != k {
        return Err(Error::DimensionMismatch {
            left: k,
            right: c2.dim(),
        });
    }
    let (monos, coeffs) = mixed_volume_fit(&[c1, c2], 0, tol)?;
    let mut seq = vec![0.0; k + 1];
    for (mono, &c) in monos.iter().zip(coeffs.iter()) {
        let i = mono[0];
        seq[i] = c / multinomial(k, mono);
    }
    Ok(seq)
}

#[derive(Debug, Clone)]
pub struct InequalityRow {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct MinkowskiStabilityReport {
    pub dim: usize,
    pub volume_1: f64,
    pub volume_2: f64,
    /// V(C1,i; C2,k-i) for i = 0..=k.
    pub mixed_sequence: Vec<f64>,
    /// Normalized excess of the Minkowski inequality.
    pub epsilon: f64,
    pub epsilon_ok: bool,
    /// Log-concavity of the mixed sequence.
    pub alternating_rows: Vec<InequalityRow>,
    /// Root-volume concavity at sampled weights.
    pub combination_rows: Vec<InequalityRow>,
    pub delta_vol: f64,
    /// Worst relative deviation of the fitted endpoints from the exact
    /// volumes.
    pub fit_consistency: f64,
    pub ok: bool,
}

/// Minkowski-inequality excess, log-concavity of the pair sequence, and
/// root-volume concavity on sampled combinations, with the volume distance
/// recorded for the stability trend.
pub fn minkowski_stability_check(
    c1: &Polytope,
    c2: &Polytope,
    tol: &Tolerances,
) -> Result<MinkowskiStabilityReport> {
    let k = c1.dim();
    let seq = mixed_volume_sequence(c1, c2, tol)?;
    let h1 = c1.volume();
    let h2 = c2.volume();
    let fit_consistency = ((seq[k] - h1).abs() / h1).max((seq[0] - h2).abs() / h2);

    let v11 = seq[1];
    let epsilon = v11.powi(k as i32) / (h2.powi(k as i32 - 1) * h1) - 1.0;
    let epsilon_ok = epsilon >= -1e-8;

    let mut alternating_rows = Vec::new();
    for i in 1..k {
        let lhs = seq[i - 1] * seq[i + 1];
        let rhs = seq[i] * seq[i];
        let scale = rhs.abs().max(1e-300);
        alternating_rows.push(InequalityRow {
            label: format!("square at {} dominates neighbors", i),
            lhs,
            rhs,
            slack: (rhs - lhs) / scale,
            ok: rhs - lhs >= -1e-8 * scale,
        });
    }

    let mut combination_rows = Vec::new();
    for alpha in [0.25, 0.5, 0.75] {
        let sum = c1.scale(alpha).minkowski_sum(&c2.scale(1.0 - alpha))?;
        let lhs = sum.volume().powf(1.0 / k as f64);
        let rhs = alpha * h1.powf(1.0 / k as f64) + (1.0 - alpha) * h2.powf(1.0 / k as f64);
        combination_rows.push(InequalityRow {
            label: format!("root volume at weight {}", alpha),
            lhs,
            rhs,
            slack: lhs - rhs,
            ok: lhs - rhs >= -1e-9 * rhs.abs().max(1e-300),
        });
    }

    let ok = epsilon_ok
        && alternating_rows.iter().all(|r| r.ok)
        && combination_rows.iter().all(|r| r.ok);

    Ok(MinkowskiStabilityReport {
        dim: k,
        volume_1: h1,
        volume_2: h2,
        mixed_sequence: seq,
        epsilon,
        epsilon_ok,
        alternating_rows,
        combination_rows,
        delta_vol: metrics::delta_vol(c2, c1)?,
        fit_consistency,
        ok,
    })
}

pub fn grunbaum_json(r: &GrunbaumScan) -> Json {
    Json::obj(vec![
        ("ratio_min", Json::Num(r.ratio_min)),
        ("direction", Json::nums(r.direction.iter().copied())),
        ("bound", Json::Num(r.bound)),
        ("slack", Json::Num(r.slack)),
        ("ok", Json::Bool(r.ok)),
        ("directions_checked", Json::Int(r.directions_checked as i64)),
    ])
}

pub fn hemisphere_json(r: &HemisphereScan) -> Json {
    Json::obj(vec![
        ("ratio_min", Json::Num(r.ratio_min)),
        ("direction", Json::nums(r.direction.iter().copied())),
        ("bound", Json::Num(r.bound)),
        ("slack", Json::Num(r.slack)),
        ("ok", Json::Bool(r.ok)),
        (
            "label",
            Json::Str(
                if r.exact {
                    "EXACT"
                } else {
                    "UPPER_BOUND_ON_INFIMUM"
                }
                .to_string(),
            ),
        ),
        ("method", Json::Str(r.method.to_string())),
        ("equality_detected", Json::Bool(r.equality_detected)),
        ("candidates_checked", Json::Int(r.candidates_checked as i64)),
    ])
}

pub fn schwarz_json(r: &RadialProfileBody) -> Json {
    Json::obj(vec![
        ("axis", Json::nums(r.axis.iter().copied())),
        ("samples", Json::Int(r.ts.len() as i64)),
        ("slice_dim", Json::Int(r.slice_dim as i64)),
        ("volume_quadrature", Json::Num(r.volume_quadrature)),
        ("source_volume", Json::Num(r.source_volume)),
        ("volume_mismatch_rel", Json::Num(r.volume_mismatch_rel)),
        ("cylinder", Json::Bool(r.cylinder)),
        ("concavity_max_defect", Json::Num(r.concavity_max_defect)),
        ("concavity_ok", Json::Bool(r.concavity_ok)),
    ])
}

pub fn shake_json(r: &ShakeReport) -> Json {
    Json::obj(vec![
        ("axis", Json::nums(r.axis.iter().copied())),
        ("resolution", Json::Int(r.resolution as i64)),
        ("columns", Json::Int(r.columns as i64)),
        ("volume", Json::Num(r.volume)),
        ("volume_quadrature", Json::Num(r.volume_quadrature)),
        ("volume_mismatch_rel", Json::Num(r.volume_mismatch_rel)),
        ("top_offset", Json::Num(r.top_offset)),
        ("centroid_axis_before", Json::Num(r.centroid_axis_before)),
        ("centroid_axis_after", Json::Num(r.centroid_axis_after)),
        ("centroid_shift", Json::Num(r.centroid_shift)),
        ("prism_detected", Json::Bool(r.prism_detected)),
    ])
}

fn row_json(r: &InequalityRow) -> Json {
    Json::obj(vec![
        ("label", Json::Str(r.label.clone())),
        ("lhs", Json::Num(r.lhs)),
        ("rhs", Json::Num(r.rhs)),
        ("slack", Json::Num(r.slack)),
        ("ok", Json::Bool(r.ok)),
    ])
}

pub fn minkowski_json(r: &MinkowskiStabilityReport) -> Json {
    Json::obj(vec![
        ("dim", Json::Int(r.dim as i64)),
        ("volume_1", Json::Num(r.volume_1)),
        ("volume_2", Json::Num(r.volume_2)),
        ("mixed_sequence", Json::nums(r.mixed_sequence.iter().copied())),
        ("epsilon", Json::Num(r.epsilon)),
        ("epsilon_ok", Json::Bool(r.epsilon_ok)),
        (
            "alternating_rows",
            Json::arr(r.alternating_rows.iter().map(row_json)),
        ),
        (
            "combination_rows",
            Json::arr(r.combination_rows.iter().map(row_json)),
        ),
        ("delta_vol", Json::Num(r.delta_vol)),
        ("fit_consistency", Json::Num(r.fit_consistency)),
        ("ok", Json::Bool(r.ok)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::bodies::{cross_polytope, cube, prism_over, regular_polygon, regular_simplex};

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(coords)
    }

    #[test]
    fn grunbaum_cube_is_half() {
        let k = cube(3, 1.0).unwrap();
        for dir in [v(&[1.0, 0.0, 0.0]), v(&[0.3, -0.8, 0.52])] {
            let r = grunbaum_ratio(&k, &dir, &TOL).unwrap();
            assert!((r - 0.5).abs() < 1e-12, "ratio {}", r);
        }
    }

    #[test]
    fn grunbaum_simplex_normal_values() {
        for (n, expect) in [(2usize, 4.0 / 9.0), (3usize, 27.0 / 64.0)] {
            let s = regular_simplex(n).unwrap();
            let u = s.facets()[0].normal().clone();
            let a = grunbaum_ratio(&s, &u, &TOL).unwrap();
            let b = grunbaum_ratio(&s, &(-&u), &TOL).unwrap();
            let low = a.min(b);
            assert!(
                (low - expect).abs() < 1e-12,
                "n={} got {} want {}",
                n,
                low,
                expect
            );
            assert!((a + b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grunbaum_scan_respects_bound() {
        let s = regular_simplex(3).unwrap();
        let scan = grunbaum_scan(&s, 64, &TOL).unwrap();
        assert!(scan.ok);
        assert!((scan.ratio_min - 27.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn hemisphere_cube_equality() {
        let k = cube(3, 1.0).unwrap();
        let scan = hemisphere_scan(&k, 0, 0, &TOL).unwrap();
        assert!(scan.exact);
        assert!((scan.ratio_min - 1.0 / 6.0).abs() < 1e-12);
        assert!(scan.equality_detected);
        assert!(scan.ok);
    }

    #[test]
    fn hemisphere_prism_equality_at_generator() {
        let base = regular_polygon(3, 1.0).unwrap();
        let p = prism_over(&base, 0.8).unwrap().translate_to_centroid();
        let scan = hemisphere_scan(&p, 0, 0, &TOL).unwrap();
        assert!((scan.ratio_min - 1.0 / 6.0).abs() < 1e-9);
        assert!(scan.equality_detected);
        // Minimizer is the generator direction.
        assert!(scan.direction[2].abs() > 1.0 - 1e-6);
    }

    #[test]
    fn hemisphere_triangle_exact_third() {
        let t = regular_simplex(2).unwrap();
        let scan = hemisphere_scan(&t, 0, 0, &TOL).unwrap();
        assert!(scan.exact);
        assert!((scan.ratio_min - 1.0 / 3.0).abs() < 1e-12);
        assert!(!scan.equality_detected);
    }

    #[test]
    fn hemisphere_cross_polytope_strict() {
        let c = cross_polytope(3).unwrap();
        let scan = hemisphere_scan(&c, 0, 0, &TOL).unwrap();
        assert!(scan.ok);
        assert!(scan.ratio_min >= 1.0 / 6.0 - 1e-9);
    }

    #[test]
    fn schwarz_prism_is_cylinder() {
        let base = regular_polygon(5, 1.0).unwrap();
        let p = prism_over(&base, 1.0).unwrap();
        let rounded = schwarz_rounding(&p, &v(&[0.0, 0.0, 1.0]), 101, &TOL).unwrap();
        assert!(rounded.cylinder);
        assert!(rounded.concavity_ok);
        assert!(rounded.volume_mismatch_rel < 1e-10);
    }

    #[test]
    fn schwarz_cone_radius_linear() {
        let mut pts = vec![v(&[0.0, 0.0, 1.0])];
        for (x, y) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            pts.push(v(&[x, y, 0.0]));
        }
        let cone = Polytope::from_points(3, pts).unwrap();
        let rounded = schwarz_rounding(&cone, &v(&[0.0, 0.0, 1.0]), 101, &TOL).unwrap();
        assert!(!rounded.cylinder);
        assert!(rounded.concavity_ok);
        for w in rounded.radii.windows(3) {
            let second = w[0] - 2.0 * w[1] + w[2];
            assert!(second.abs() < 1e-9, "second difference {}", second);
        }
    }

    #[test]
    fn schwarz_volume_convergence() {
        let s = regular_simplex(3).unwrap();
        let rounded = schwarz_rounding(&s, &v(&[0.0, 0.0, 1.0]), 401, &TOL).unwrap();
        assert!(
            rounded.volume_mismatch_rel < 0.005,
            "mismatch {}",
            rounded.volume_mismatch_rel
        );
        assert!(rounded.concavity_ok);
    }

    #[test]
    fn shake_prism_is_fixed() {
        let base = regular_polygon(4, 1.0).unwrap();
        let p = prism_over(&base, 0.7).unwrap().translate_to_centroid();
        let rep = shake_down(&p, &v(&[0.0, 0.0, 1.0]), 51, &TOL).unwrap();
        assert!(rep.prism_detected, "shift {}", rep.centroid_shift);
        assert!(rep.centroid_shift.abs() < 1e-12);
        assert!(rep.volume_mismatch_rel < 1e-9);
    }

    #[test]
    fn shake_triangle_moves_up() {
        let t = Polytope::from_points(
            2,
            vec![v(&[-1.0, -1.0]), v(&[2.0, -1.0]), v(&[-1.0, 2.0])],
        )
        .unwrap();
        let rep = shake_down(&t, &v(&[0.0, 1.0]), 301, &TOL).unwrap();
        assert!(rep.centroid_shift > 0.1);
        assert!(rep.volume_mismatch_rel < 1e-9);
        assert!(!rep.prism_detected);
        match shake_down(&t, &v(&[0.0, 1.0]), 2, &TOL) {
            Err(Error::InvalidResolution(2)) => {}
            other => panic!("expected InvalidResolution, got {:?}", other.map(|r| r.resolution)),
        }
    }

    #[test]
    fn mixed_volume_square_diamond() {
        let sq = cube(2, 1.0).unwrap();
        let dia = cross_polytope(2).unwrap();
        let self_mixed = mixed_volume(&[&sq, &sq], &[1, 1], &TOL).unwrap();
        assert!((self_mixed - 4.0).abs() < 1e-10);
        let cross = mixed_volume(&[&sq, &dia], &[1, 1], &TOL).unwrap();
        assert!((cross - 4.0).abs() < 1e-10);
        // Octagon oracle: the unit-weight sum has volume 4 + 8 + 2.
        let octagon = sq.minkowski_sum(&dia).unwrap();
        assert!((octagon.volume() - 14.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_volume_symmetry_and_refit() {
        let sq = cube(2, 1.0).unwrap();
        let dia = cross_polytope(2).unwrap();
        let a = mixed_volume(&[&sq, &dia], &[1, 1], &TOL).unwrap();
        let b = mixed_volume(&[&dia, &sq], &[1, 1], &TOL).unwrap();
        assert!((a - b).abs() < 1e-8 * a.abs());
        let c = mixed_volume_skip(&[&sq, &dia], &[1, 1], 2, &TOL).unwrap();
        assert!((a - c).abs() < 1e-8 * a.abs());
    }

    #[test]
    fn mixed_volume_homothets_equality() {
        let c = cube(3, 1.0).unwrap();
        let c2 = c.scale(2.0);
        let v11 = mixed_volume(&[&c, &c2], &[1, 2], &TOL).unwrap();
        // Multilinearity: V(C,1;2C,2) = 4 V(C).
        assert!((v11 - 4.0 * c.volume()).abs() < 1e-8 * c.volume());
        let rep = minkowski_stability_check(&c, &c2, &TOL).unwrap();
        assert!(rep.epsilon.abs() < 1e-10, "epsilon {}", rep.epsilon);
        assert!(rep.delta_vol < 1e-9);
        assert!(rep.ok);
    }

    #[test]
    fn minkowski_square_diamond_report() {
        let sq = cube(2, 1.0).unwrap();
        let dia = cross_polytope(2).unwrap();
        let rep = minkowski_stability_check(&sq, &dia, &TOL).unwrap();
        // epsilon = 4^2/(4 * 2) - 1.
        assert!((rep.epsilon - 1.0).abs() < 1e-9, "epsilon {}", rep.epsilon);
        assert!(
            (rep.delta_vol - (6.0 - 4.0 * 2.0f64.sqrt())).abs() < 1e-9,
            "delta_vol {}",
            rep.delta_vol
        );
        assert!(rep.ok);
        assert!(rep.fit_consistency < 1e-9);
    }

    #[test]
    fn minkowski_identical_bodies() {
        let s = regular_simplex(3).unwrap();
        let rep = minkowski_stability_check(&s, &s, &TOL).unwrap();
        assert!(rep.epsilon.abs() < 1e-8);
        assert!(rep.delta_vol < 1e-9);
        assert!(rep.ok);
    }
}
