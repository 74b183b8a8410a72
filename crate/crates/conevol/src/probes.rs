//! Closeness probes for near-extremal bodies. A body whose concentration
//! defect over a subspace is small is compared against a constructive
//! cylinder candidate; a body whose U-functional excess is small is
//! compared against a parallelepiped built from its heaviest normal lines.
//! The reported distances are upper bounds: the candidates come from the
//! constructions, not from an optimization over all cylinders or boxes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::linalg::lex_cmp;
use crate::geom::Polytope;
use crate::isotropic::sym_power;
use crate::measure::cone_volume_measure_with;
use crate::metrics;
use crate::par;
use crate::report::{format_f64, Json};
use crate::sections::{grid_cells, SectionSlicer};
use crate::subspace::Subspace;
use crate::tol::Tolerances;
use crate::ufunc;

/// Grid resolution for centroid traces over bases of dimension two and up.
const TRACE_RESOLUTION: usize = 5;

#[derive(Debug, Clone)]
pub struct SccProbeReport {
    pub dim: usize,
    pub subspace_dim: usize,
    /// d - n * mass(L) / V; zero exactly at the concentration equality.
    pub epsilon: f64,
    pub subspace_mass: f64,
    /// Cylinder over the recentered origin section.
    pub candidate: Polytope,
    pub delta_vol: f64,
    pub delta_hom: f64,
    /// Same construction without recentering the section.
    pub delta_vol_raw: f64,
    pub delta_hom_raw: f64,
    /// |s| with the trace endpoints y = -e^s x, for line bases only.
    pub asymmetry: Option<f64>,
}

/// Ambient centroid of the slice at parameter t of a one-dimensional base;
/// falls back to the vertex average of the end face when the slice is
/// degenerate.
fn end_point(
    slicer: &SectionSlicer,
    body: &Polytope,
    u: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>> {
    let z = DVector::from_column_slice(&[t]);
    if let (_, Some(c)) = slicer.slice_with_centroid(&z) {
        return Ok(c);
    }
    let pts = slicer.slice_vertex_points(&z);
    if !pts.is_empty() {
        let mut avg = DVector::zeros(body.dim());
        for p in &pts {
            avg += p;
        }
        return Ok(avg / pts.len() as f64);
    }
    let scale = body
        .vertices()
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    let face: Vec<&DVector<f64>> = body
        .vertices()
        .iter()
        .filter(|v| (u.dot(v) - t).abs() <= 1e-9 * scale.max(1.0))
        .collect();
    if face.is_empty() {
        return Err(Error::OutsideProjection);
    }
    let mut avg = DVector::zeros(body.dim());
    for p in &face {
        avg += *p;
    }
    Ok(avg / face.len() as f64)
}

fn hull_of_sums(
    dim: usize,
    section: &[DVector<f64>],
    trace: &[DVector<f64>],
    tol: &Tolerances,
) -> Result<Polytope> {
    let mut pts = Vec::with_capacity(section.len() * trace.len());
    for c in section {
        for m in trace {
            pts.push(c + m);
        }
    }
    Polytope::from_points_with(dim, pts, tol)
}

/// Compares a centered body against the cylinder over its origin section,
/// extruded along the trace of the section centroids.
pub fn scc_stability_probe(
    body: &Polytope,
    l: &Subspace,
    tol: &Tolerances,
) -> Result<SccProbeReport> {
    let n = body.dim();
    let d = l.dim();
    if d == 0 || d >= n {
        return Err(Error::InvalidInput(format!(
            "base dimension {} must be strictly between 0 and {}",
            d, n
        )));
    }
    let kc = body.translate_to_centroid();
    let mu = cone_volume_measure_with(&kc, tol)?;
    let volume = kc.volume();
    let mass = mu.subspace_mass(l, tol);
    let epsilon = d as f64 - n as f64 * mass / volume;

    let slicer = SectionSlicer::new(&kc, l, tol)?;
    let origin = DVector::zeros(d);
    let section = slicer.slice_vertex_points(&origin);
    if section.len() < n - d + 1 {
        return Err(Error::DegenerateInput { dim: n, rank: 0 });
    }
    let (_, section_centroid) = slicer.slice_with_centroid(&origin);
    let section_centroid = section_centroid.unwrap_or_else(|| DVector::zeros(n));

    let mut asymmetry = None;
    let trace: Vec<DVector<f64>> = if d == 1 {
        let u = l.basis()[0].clone();
        let proj_vs = slicer.projection().vertices();
        let (mut t0, mut t1) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in proj_vs {
            t0 = t0.min(v[0]);
            t1 = t1.max(v[0]);
        }
        let x = end_point(&slicer, &kc, &u, t0)?;
        let y = end_point(&slicer, &kc, &u, t1)?;
        if x.norm() > 1e-12 && y.norm() > 1e-12 {
            asymmetry = Some((y.norm() / x.norm()).ln().abs());
        }
        vec![x, y]
    } else {
        let (cells, _) = grid_cells(slicer.projection(), TRACE_RESOLUTION)?;
        let mut pts = Vec::new();
        for cell in &cells {
            if let (_, Some(c)) = slicer.slice_with_centroid(&cell.point) {
                pts.push(c);
            }
        }
        pts.push(section_centroid.clone());
        pts
    };

    let candidate_raw = hull_of_sums(n, &section, &trace, tol)?;
    let recentered: Vec<DVector<f64>> = section.iter().map(|p| p - &section_centroid).collect();
    let candidate = hull_of_sums(n, &recentered, &trace, tol)?;

    Ok(SccProbeReport {
        dim: n,
        subspace_dim: d,
        epsilon,
        subspace_mass: mass,
        delta_vol: metrics::delta_vol(&kc, &candidate)?,
        delta_hom: metrics::delta_hom(&kc, &candidate)?,
        delta_vol_raw: metrics::delta_vol(&kc, &candidate_raw)?,
        delta_hom_raw: metrics::delta_hom(&kc, &candidate_raw)?,
        candidate,
        asymmetry,
    })
}

#[derive(Debug, Clone)]
pub struct UProbeReport {
    pub dim: usize,
    /// U n / ((n!)^{1/n} V) - 1; zero exactly for parallelepipeds.
    pub epsilon: f64,
    /// Greedily selected heaviest independent normal lines.
    pub directions: Vec<Vec<f64>>,
    /// Box spanned by the support values along the normalized directions.
    pub parallelepiped: Polytope,
    /// Facet overlap fractions, alternating +/- per direction.
    pub coverage: Vec<f64>,
    pub coverage_min: f64,
    /// Largest lambda with lambda P inside the normalized body.
    pub containment_factor: f64,
    /// Volume of P outside the body, relative.
    pub excess: f64,
    pub delta_vol: f64,
    pub delta_hom: f64,
}

/// Antipodal line masses of the measure, heaviest first, ties in
/// lexicographic order of the representative direction.
fn line_masses(
    atoms: &[(DVector<f64>, f64)],
) -> Vec<(DVector<f64>, f64)> {
    let mut lines: Vec<(DVector<f64>, f64)> = Vec::new();
    for (u, w) in atoms {
        let mut found = false;
        for (rep, mass) in lines.iter_mut() {
            if u.dot(rep).abs() > 1.0 - 1e-9 {
                *mass += w;
                found = true;
                break;
            }
        }
        if !found {
            let rep = if lex_cmp(u, &(-u)) == std::cmp::Ordering::Less {
                -u
            } else {
                u.clone()
            };
            lines.push((rep, *w));
        }
    }
    lines.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| lex_cmp(&a.0, &b.0)));
    lines
}

/// Compares a centered body against the parallelepiped spanned by its n
/// heaviest independent normal lines, after the linear normalization that
/// makes those lines orthonormal.
pub fn u_stability_probe(body: &Polytope, tol: &Tolerances) -> Result<UProbeReport> {
    let n = body.dim();
    let kc = body.translate_to_centroid();
    let mu = cone_volume_measure_with(&kc, tol)?;
    let volume = kc.volume();
    let ratio = ufunc::u_ratio_report(&mu, volume, tol)?;
    let epsilon = ratio.ratio - 1.0;

    let atoms: Vec<(DVector<f64>, f64)> = mu
        .atoms()
        .iter()
        .map(|a| (a.direction().clone(), a.weight()))
        .collect();
    let lines = line_masses(&atoms);

    let mut selected: Vec<DVector<f64>> = Vec::new();
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    for (rep, _) in &lines {
        if selected.len() == n {
            break;
        }
        let mut resid = rep.clone();
        for o in &ortho {
            let c = resid.dot(o);
            resid -= o * c;
        }
        if resid.norm() > 1e-9 {
            selected.push(rep.clone());
            ortho.push(resid.normalize());
        }
    }
    if selected.len() < n {
        return Err(Error::InvalidInput(format!(
            "only {} independent normal lines in the support",
            selected.len()
        )));
    }
    let mut vmat = DMatrix::<f64>::zeros(n, n);
    for (i, v) in selected.iter().enumerate() {
        vmat.set_column(i, v);
    }
    let det = vmat.determinant();
    if det.abs() <= 1e-9 {
        return Err(Error::InvalidInput(format!(
            "selected normal lines nearly dependent, det {:e}",
            det
        )));
    }
    let gram = &vmat * vmat.transpose();
    let s = sym_power(&gram, 0.5, 1e-12)?;
    let w = sym_power(&gram, -0.5, 1e-12)?;
    let kp = kc.linear_image(&s)?;
    let qmat = &w * &vmat;
    let dirs: Vec<DVector<f64>> = (0..n)
        .map(|i| DVector::from(qmat.column(i)).normalize())
        .collect();

    let mut h_plus = Vec::with_capacity(n);
    let mut h_minus = Vec::with_capacity(n);
    for q in &dirs {
        h_plus.push(kp.support(q)?);
        h_minus.push(kp.support(&(-q))?);
    }
    let mut corners = Vec::with_capacity(1usize << n);
    for bits in 0..(1usize << n) {
        let mut x = DVector::zeros(n);
        for (i, q) in dirs.iter().enumerate() {
            let t = if bits & (1 << i) != 0 {
                h_plus[i]
            } else {
                -h_minus[i]
            };
            x += q * t;
        }
        corners.push(x);
    }
    let pbox = Polytope::from_points_with(n, corners, tol)?;

    let mut coverage = Vec::with_capacity(2 * n);
    for (i, q) in dirs.iter().enumerate() {
        let mut face_area = 1.0;
        for j in 0..n {
            if j != i {
                face_area *= h_plus[j] + h_minus[j];
            }
        }
        for sign in [1.0, -1.0] {
            let dir = q * sign;
            let mut covered = 0.0;
            for f in kp.facets() {
                if f.normal().dot(&dir) > 1.0 - 1e-9 {
                    covered += f.area();
                }
            }
            coverage.push(covered / face_area);
        }
    }
    let coverage_min = coverage.iter().copied().fold(f64::INFINITY, f64::min);

    let mut max_gauge = 0.0f64;
    for v in pbox.vertices() {
        max_gauge = max_gauge.max(kp.gauge(v)?);
    }

    Ok(UProbeReport {
        dim: n,
        epsilon,
        directions: selected.iter().map(|v| v.iter().copied().collect()).collect(),
        coverage,
        coverage_min,
        containment_factor: 1.0 / max_gauge,
        excess: (pbox.volume() - kp.volume()) / kp.volume(),
        delta_vol: metrics::delta_vol(&kp, &pbox)?,
        delta_hom: metrics::delta_hom(&kp, &pbox)?,
        parallelepiped: pbox,
    })
}

#[derive(Debug, Clone)]
pub struct TrendPoint {
    pub tau: f64,
    pub epsilon: f64,
    pub delta_vol: f64,
    pub delta_hom: f64,
    pub coverage_min: Option<f64>,
    /// Quantity whose decay is tracked against epsilon: delta_vol for the
    /// concentration family, 1 - coverage for the U family.
    pub companion: f64,
}

#[derive(Debug, Clone)]
pub struct TrendSeries {
    pub label: &'static str,
    /// Ordered by decreasing tau; the last member is the equality case.
    pub points: Vec<TrendPoint>,
    pub epsilon_decreasing: bool,
    pub companion_monotone: bool,
    /// Equality member has epsilon and companion below 1e-9.
    pub final_member_exact: bool,
    /// Least-squares slope of ln companion against ln epsilon; recorded,
    /// never asserted against any particular exponent.
    pub slope: Option<f64>,
}

fn finish_series(label: &'static str, points: Vec<TrendPoint>) -> TrendSeries {
    let eps_dec = points
        .windows(2)
        .all(|w| w[1].epsilon <= w[0].epsilon + 1e-12);
    let comp_mono = points
        .windows(2)
        .all(|w| w[1].companion <= w[0].companion + 1e-12);
    let last = points.last();
    let final_exact = last
        .map(|p| p.epsilon.abs() <= 1e-9 && p.companion.abs() <= 1e-9)
        .unwrap_or(false);
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.epsilon > 1e-13 && p.companion > 1e-13)
        .map(|p| (p.epsilon.ln(), p.companion.ln()))
        .collect();
    let slope = if usable.len() >= 2 {
        let m = usable.len() as f64;
        let xbar = usable.iter().map(|(x, _)| x).sum::<f64>() / m;
        let ybar = usable.iter().map(|(_, y)| y).sum::<f64>() / m;
        let sxx: f64 = usable.iter().map(|(x, _)| (x - xbar) * (x - xbar)).sum();
        let sxy: f64 = usable
            .iter()
            .map(|(x, y)| (x - xbar) * (y - ybar))
            .sum();
        if sxx > 1e-12 {
            Some(sxy / sxx)
        } else {
            None
        }
    } else {
        None
    };
    TrendSeries {
        label,
        points,
        epsilon_decreasing: eps_dec,
        companion_monotone: comp_mono,
        final_member_exact: final_exact,
        slope,
    }
}

/// Concentration probe over a family ordered by decreasing parameter.
pub fn scc_trend(
    family: &[(f64, Polytope)],
    l: &Subspace,
    tol: &Tolerances,
) -> Result<TrendSeries> {
    let results: Vec<Result<TrendPoint>> = par::map_slice(family, |(tau, body)| {
        let r = scc_stability_probe(body, l, tol)?;
        Ok(TrendPoint {
            tau: *tau,
            epsilon: r.epsilon,
            delta_vol: r.delta_vol,
            delta_hom: r.delta_hom,
            coverage_min: None,
            companion: r.delta_vol,
        })
    });
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        points.push(r?);
    }
    Ok(finish_series("concentration-taper", points))
}

/// U-functional probe over a family ordered by decreasing parameter.
pub fn u_trend(family: &[(f64, Polytope)], tol: &Tolerances) -> Result<TrendSeries> {
    let results: Vec<Result<TrendPoint>> = par::map_slice(family, |(tau, body)| {
        let r = u_stability_probe(body, tol)?;
        Ok(TrendPoint {
            tau: *tau,
            epsilon: r.epsilon,
            delta_vol: r.delta_vol,
            delta_hom: r.delta_hom,
            coverage_min: Some(r.coverage_min),
            companion: 1.0 - r.coverage_min,
        })
    });
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        points.push(r?);
    }
    Ok(finish_series("u-corner-truncation", points))
}

pub fn trend_csv(series: &TrendSeries) -> String {
    let mut out = String::from("tau,epsilon,delta_vol,delta_hom,coverage_min\n");
    for p in &series.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_f64(p.tau),
            format_f64(p.epsilon),
            format_f64(p.delta_vol),
            format_f64(p.delta_hom),
            p.coverage_min.map(format_f64).unwrap_or_default(),
        ));
    }
    out
}

pub fn scc_probe_json(r: &SccProbeReport) -> Json {
    Json::obj(vec![
        ("dim", Json::Int(r.dim as i64)),
        ("subspace_dim", Json::Int(r.subspace_dim as i64)),
        ("epsilon", Json::Num(r.epsilon)),
        ("subspace_mass", Json::Num(r.subspace_mass)),
        ("candidate", r.candidate.to_json()),
        ("delta_vol", Json::Num(r.delta_vol)),
        ("delta_hom", Json::Num(r.delta_hom)),
        ("delta_vol_raw", Json::Num(r.delta_vol_raw)),
        ("delta_hom_raw", Json::Num(r.delta_hom_raw)),
        (
            "asymmetry",
            r.asymmetry.map(Json::Num).unwrap_or(Json::Null),
        ),
    ])
}

pub fn u_probe_json(r: &UProbeReport) -> Json {
    Json::obj(vec![
        ("dim", Json::Int(r.dim as i64)),
        ("epsilon", Json::Num(r.epsilon)),
        (
            "directions",
            Json::arr(r.directions.iter().map(|d| Json::nums(d.iter().copied()))),
        ),
        ("parallelepiped", r.parallelepiped.to_json()),
        ("coverage", Json::nums(r.coverage.iter().copied())),
        ("coverage_min", Json::Num(r.coverage_min)),
        ("containment_factor", Json::Num(r.containment_factor)),
        ("excess", Json::Num(r.excess)),
        ("delta_vol", Json::Num(r.delta_vol)),
        ("delta_hom", Json::Num(r.delta_hom)),
    ])
}

pub fn trend_json(s: &TrendSeries) -> Json {
    Json::obj(vec![
        ("label", Json::Str(s.label.to_string())),
        (
            "points",
            Json::arr(s.points.iter().map(|p| {
                Json::obj(vec![
                    ("tau", Json::Num(p.tau)),
                    ("epsilon", Json::Num(p.epsilon)),
                    ("delta_vol", Json::Num(p.delta_vol)),
                    ("delta_hom", Json::Num(p.delta_hom)),
                    (
                        "coverage_min",
                        p.coverage_min.map(Json::Num).unwrap_or(Json::Null),
                    ),
                    ("companion", Json::Num(p.companion)),
                ])
            })),
        ),
        ("epsilon_decreasing", Json::Bool(s.epsilon_decreasing)),
        ("companion_monotone", Json::Bool(s.companion_monotone)),
        ("final_member_exact", Json::Bool(s.final_member_exact)),
        ("slope", s.slope.map(Json::Num).unwrap_or(Json::Null)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::geom::bodies::{cube, prism_over, regular_polygon, regular_simplex};

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn e3() -> Subspace {
        Subspace::line(&DVector::from_column_slice(&[0.0, 0.0, 1.0])).unwrap()
    }

    #[test]
    fn scc_probe_prism_is_exact() {
        let p = prism_over(&regular_polygon(3, 1.0).unwrap(), 0.8)
            .unwrap()
            .translate_to_centroid();
        let r = scc_stability_probe(&p, &e3(), &TOL).unwrap();
        assert!(r.epsilon.abs() < 1e-12, "epsilon {}", r.epsilon);
        assert!(r.delta_vol < 1e-9, "delta_vol {}", r.delta_vol);
        assert!(r.delta_hom < 1e-9, "delta_hom {}", r.delta_hom);
        let s = r.asymmetry.expect("line base");
        assert!(s < 1e-9, "asymmetry {}", s);
    }

    #[test]
    fn scc_probe_simplex_quarter() {
        let s = regular_simplex(3).unwrap();
        let u = s.facets()[0].normal().clone();
        let l = Subspace::line(&u).unwrap();
        let r = scc_stability_probe(&s, &l, &TOL).unwrap();
        assert!((r.epsilon - 0.25).abs() < 1e-10, "epsilon {}", r.epsilon);
        assert!(r.delta_vol > 0.0);
    }

    #[test]
    fn scc_probe_plane_base_on_prism() {
        let p = prism_over(&regular_polygon(4, 1.0).unwrap(), 0.6)
            .unwrap()
            .translate_to_centroid();
        let l = Subspace::from_spanning(
            3,
            &[
                DVector::from_column_slice(&[0.0, 0.0, 1.0]),
                DVector::from_column_slice(&[1.0, 0.0, 0.0]),
            ],
            &TOL,
        )
        .unwrap();
        let r = scc_stability_probe(&p, &l, &TOL).unwrap();
        assert!(r.epsilon >= -1e-9);
        assert!(r.delta_vol >= 0.0);
        assert!(r.asymmetry.is_none());
    }

    #[test]
    fn u_probe_cube_is_exact() {
        let k = cube(3, 1.0).unwrap();
        let r = u_stability_probe(&k, &TOL).unwrap();
        assert!(r.epsilon.abs() < 1e-9, "epsilon {}", r.epsilon);
        assert_eq!(r.coverage.len(), 6);
        for c in &r.coverage {
            assert!((c - 1.0).abs() < 1e-9, "coverage {}", c);
        }
        assert!((r.containment_factor - 1.0).abs() < 1e-9);
        assert!(r.excess.abs() < 1e-9);
    }

    #[test]
    fn u_probe_parallelepiped_is_exact() {
        let k = corpus::canonical_bodies(&TOL)
            .unwrap()
            .into_iter()
            .find(|e| e.name == "parallelepiped-3")
            .unwrap()
            .body;
        let r = u_stability_probe(&k, &TOL).unwrap();
        assert!(r.epsilon.abs() < 1e-9, "epsilon {}", r.epsilon);
        assert!(r.coverage_min > 1.0 - 1e-8, "coverage {}", r.coverage_min);
        assert!(r.excess.abs() < 1e-8, "excess {}", r.excess);
    }

    #[test]
    fn u_probe_truncated_cube_partial_coverage() {
        let k = corpus::corner_truncated_cube(0.4).unwrap();
        let r = u_stability_probe(&k, &TOL).unwrap();
        assert!(r.epsilon > 1e-6, "epsilon {}", r.epsilon);
        assert!(r.coverage_min < 1.0 - 1e-4, "coverage {}", r.coverage_min);
        assert!(r.containment_factor < 1.0 - 1e-6);
        assert!(r.excess > 0.0);
        for c in &r.coverage {
            assert!(*c >= 0.0 && *c <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn scc_family_trend() {
        let family = corpus::scc_trend_family().unwrap();
        let series = scc_trend(&family, &e3(), &TOL).unwrap();
        assert!(series.epsilon_decreasing, "{:?}", series.points);
        assert!(series.companion_monotone, "{:?}", series.points);
        assert!(series.final_member_exact, "{:?}", series.points.last());
        assert!(series.slope.is_some());
        assert!(series.slope.unwrap() > 0.0);
    }

    #[test]
    fn u_family_trend() {
        let family = corpus::u_trend_family().unwrap();
        let series = u_trend(&family, &TOL).unwrap();
        assert!(series.epsilon_decreasing, "{:?}", series.points);
        assert!(series.companion_monotone, "{:?}", series.points);
        assert!(series.final_member_exact, "{:?}", series.points.last());
        assert!(series.slope.is_some());
        assert!(series.slope.unwrap() > 0.0);
    }

    #[test]
    fn trend_csv_shape() {
        let family = corpus::u_trend_family().unwrap();
        let series = u_trend(&family, &TOL).unwrap();
        let csv = trend_csv(&series);
        assert_eq!(csv.lines().count(), 1 + series.points.len());
        assert!(csv.starts_with("tau,epsilon"));
    }
}
