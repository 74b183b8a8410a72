//! Section profiles: the function assigning to each point of a projection
//! the volume of the orthogonal slice through it, with finite-difference
//! gradients, the divergence identity, and the level-set probe.
//!
//! Quadrature is the midpoint rule on a regular grid over the projection.
//! Boundary cells are clipped exactly for base dimension 1 and 2 and
//! approximated by a center-in test above that. Gradients use central
//! differences at one grid step, falling back to one-sided differences
//! beside the boundary; samples whose whole stencil leaves the projection
//! are dropped from the gradient quadrature and their slice mass is
//! reported as unresolved.

use std::collections::HashMap;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geom::hrep::{enumerate_vertices, Halfspace};
use crate::geom::volume::polygon_area_centroid;
use crate::geom::Polytope;
use crate::measure::cone_volume_measure_with;
use crate::par;
use crate::report::Json;
use crate::subspace::Subspace;
use crate::tol::Tolerances;

const MEMBERSHIP_SLACK: f64 = 1e-9;
const MAX_GRID_CELLS: usize = 4_000_000;

/// Slice evaluator for a fixed body and base subspace.
pub struct SectionSlicer<'a> {
    body: &'a Polytope,
    base: Subspace,
    perp: Vec<DVector<f64>>,
    /// Projection of the body onto the base, in base coordinates.
    projection: Polytope,
    /// Per facet: components of the outward normal along the perp basis.
    facet_perp: Vec<Vec<f64>>,
    tol: Tolerances,
}

impl<'a> SectionSlicer<'a> {
    pub fn new(body: &'a Polytope, base: &Subspace, tol: &Tolerances) -> Result<Self> {
        if base.ambient() != body.dim() {
            return Err(Error::DimensionMismatch {
                left: base.ambient(),
                right: body.dim(),
            });
        }
        let perp = base.orthogonal_complement().basis().to_vec();
        let d = base.dim();
        let projected: Vec<DVector<f64>> = body.vertices().iter().map(|v| base.coords(v)).collect();
        let projection = Polytope::from_points_with(d, projected, tol)?;
        let facet_perp = body
            .facets()
            .iter()
            .map(|f| perp.iter().map(|b| f.normal().dot(b)).collect())
            .collect();
        Ok(SectionSlicer {
            body,
            base: base.clone(),
            perp,
            projection,
            facet_perp,
            tol: *tol,
        })
    }

    pub fn projection(&self) -> &Polytope {
        &self.projection
    }

    pub fn slice_dim(&self) -> usize {
        self.perp.len()
    }

    /// Volume of the slice through the base point z (base coordinates).
    /// Errors with OutsideProjection when z is not in the projection.
    pub fn slice_volume(&self, z: &DVector<f64>) -> Result<f64> {
        if !self.projection.contains(z, MEMBERSHIP_SLACK) {
            return Err(Error::OutsideProjection);
        }
        Ok(self.slice_volume_unchecked(z))
    }

    /// Endpoints of the one-dimensional slice through z, in the coordinate
    /// of the single perp basis vector. None when the slice is empty or the
    /// slice dimension is not one.
    pub fn chord(&self, z: &DVector<f64>) -> Option<(f64, f64)> {
        if self.perp.len() != 1 {
            return None;
        }
        let x = self.base.embed(z);
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (f, c) in self.body.facets().iter().zip(&self.facet_perp) {
            let a = c[0];
            let r = f.offset() - f.normal().dot(&x);
            if a.abs() <= 1e-12 {
                if r < -MEMBERSHIP_SLACK {
                    return None;
                }
                continue;
            }
            if a > 0.0 {
                hi = hi.min(r / a);
            } else {
                lo = lo.max(r / a);
            }
        }
        if hi - lo >= 0.0 {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Unit vector spanning the perp space when the slice dimension is one.
    pub fn perp_direction(&self) -> Option<&DVector<f64>> {
        if self.perp.len() == 1 {
            Some(&self.perp[0])
        } else {
            None
        }
    }

    fn embed_perp(&self, anchor: &DVector<f64>, y: &[f64]) -> DVector<f64> {
        let mut x = anchor.clone();
        for (b, c) in self.perp.iter().zip(y) {
            x += b * *c;
        }
        x
    }

    /// Slice constraints in perp coordinates; None when a constraint with
    /// no perp component is infeasible at z.
    fn slice_halfspaces(&self, x: &DVector<f64>) -> Option<Vec<Halfspace>> {
        let k = self.perp.len();
        let mut halfspaces = Vec::with_capacity(self.body.facets().len());
        for (f, c) in self.body.facets().iter().zip(&self.facet_perp) {
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = f.offset() - f.normal().dot(x);
            if norm <= 1e-12 {
                if r < -MEMBERSHIP_SLACK {
                    return None;
                }
                continue;
            }
            halfspaces.push(Halfspace {
                normal: DVector::from_iterator(k, c.iter().map(|v| v / norm)),
                offset: r / norm,
            });
        }
        Some(halfspaces)
    }

    /// Volume and ambient centroid of the slice through z. No membership
    /// test; empty or measure-zero slices give (0, None).
    pub fn slice_with_centroid(&self, z: &DVector<f64>) -> (f64, Option<DVector<f64>>) {
        let k = self.perp.len();
        let x = self.base.embed(z);

        if k == 1 {
            return match self.chord(z) {
                Some((lo, hi)) if hi - lo > 0.0 => (
                    hi - lo,
                    Some(self.embed_perp(&x, &[0.5 * (lo + hi)])),
                ),
                _ => (0.0, None),
            };
        }

        let halfspaces = match self.slice_halfspaces(&x) {
            Some(h) => h,
            None => return (0.0, None),
        };
        let points = enumerate_vertices(k, &halfspaces, &self.tol);
        if points.len() < k + 1 {
            return (0.0, None);
        }
        if k == 2 {
            let flat: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
            let (area, (cx, cy)) = polygon_area_centroid(&flat);
            if area > 0.0 {
                return (area, Some(self.embed_perp(&x, &[cx, cy])));
            }
            return (0.0, None);
        }
        match Polytope::from_points_with(k, points, &self.tol) {
            Ok(p) => {
                let c: Vec<f64> = p.centroid().iter().copied().collect();
                (p.volume(), Some(self.embed_perp(&x, &c)))
            }
            Err(_) => (0.0, None),
        }
    }

    /// Ambient points spanning the slice through z, including the
    /// degenerate case of a face. Empty when the slice is empty.
    pub fn slice_vertex_points(&self, z: &DVector<f64>) -> Vec<DVector<f64>> {
        let k = self.perp.len();
        let x = self.base.embed(z);
        if k == 1 {
            return match self.chord(z) {
                Some((lo, hi)) => vec![
                    self.embed_perp(&x, &[lo]),
                    self.embed_perp(&x, &[hi]),
                ],
                None => Vec::new(),
            };
        }
        let halfspaces = match self.slice_halfspaces(&x) {
            Some(h) => h,
            None => return Vec::new(),
        };
        enumerate_vertices(k, &halfspaces, &self.tol)
            .iter()
            .map(|p| self.embed_perp(&x, p.as_slice()))
            .collect()
    }

    /// Same computation without the membership test; points outside the
    /// projection give an empty slice and volume zero.
    fn slice_volume_unchecked(&self, z: &DVector<f64>) -> f64 {
        let k = self.perp.len();
        let x = self.base.embed(z);
        let facets = self.body.facets();

        if k == 1 {
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for (f, c) in facets.iter().zip(&self.facet_perp) {
                let a = c[0];
                let r = f.offset() - f.normal().dot(&x);
                if a.abs() <= 1e-12 {
                    if r < -MEMBERSHIP_SLACK {
                        return 0.0;
                    }
                    continue;
                }
                if a > 0.0 {
                    hi = hi.min(r / a);
                } else {
                    lo = lo.max(r / a);
                }
            }
            return (hi - lo).max(0.0);
        }

        let halfspaces = match self.slice_halfspaces(&x) {
            Some(h) => h,
            None => return 0.0,
        };
        let points = enumerate_vertices(k, &halfspaces, &self.tol);
        if points.len() < k + 1 {
            return 0.0;
        }
        if k == 2 {
            let flat: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
            return polygon_area_centroid(&flat).0;
        }
        match Polytope::from_points_with(k, points, &self.tol) {
            Ok(p) => p.volume(),
            Err(Error::DegenerateInput { .. }) => 0.0,
            Err(_) => 0.0,
        }
    }
}

/// Slice volume at an ambient point; only the component of x in the base
/// subspace matters.
pub fn section_volume(
    body: &Polytope,
    base: &Subspace,
    x: &DVector<f64>,
    tol: &Tolerances,
) -> Result<f64> {
    if x.len() != body.dim() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: body.dim(),
        });
    }
    let slicer = SectionSlicer::new(body, base, tol)?;
    slicer.slice_volume(&base.coords(x))
}

#[derive(Debug, Clone)]
pub struct ProfileSample {
    /// Base coordinates of the quadrature node.
    pub point: DVector<f64>,
    /// Cell measure after boundary clipping.
    pub weight: f64,
    pub value: f64,
    pub gradient: Option<DVector<f64>>,
    /// Full interior cell, node at its center.
    pub interior: bool,
}

#[derive(Debug, Clone)]
pub struct SectionProfile {
    pub base_dim: usize,
    pub slice_dim: usize,
    pub resolution: usize,
    pub cell_widths: Vec<f64>,
    pub samples: Vec<ProfileSample>,
    /// Midpoint-rule integral of the profile; should match the body volume.
    pub volume_quadrature: f64,
    /// Norm of the integral of value * point; zero for a centered body.
    pub moment_norm: f64,
    /// Slice mass carried by samples without a usable gradient stencil.
    pub unresolved_boundary_mass: f64,
    /// Boundary integral of value * <point, outward normal> over the
    /// projection boundary, available in base dimension 1 and 2.
    pub boundary_flux: Option<f64>,
    /// Exact volume of the body the profile was built from.
    pub body_volume: f64,
    pub value_at_origin: f64,
    pub subgradient_origin: DVector<f64>,
    /// Largest second difference of log value across the origin stencil.
    pub subgradient_residual: f64,
}

pub(crate) struct CellSeed {
    pub(crate) index: Vec<usize>,
    pub(crate) point: DVector<f64>,
    pub(crate) weight: f64,
    pub(crate) interior: bool,
}

fn cell_corners(lo: &[f64], hi: &[f64]) -> Vec<DVector<f64>> {
    let d = lo.len();
    (0..1usize << d)
        .map(|mask| {
            DVector::from_iterator(
                d,
                (0..d).map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }),
            )
        })
        .collect()
}

/// Clip a rectangle against the projection polygon (base dim 2 only).
fn clip_cell_2d(projection: &Polytope, lo: &[f64], hi: &[f64]) -> (f64, DVector<f64>) {
    let mut poly: Vec<(f64, f64)> = vec![
        (lo[0], lo[1]),
        (hi[0], lo[1]),
        (hi[0], hi[1]),
        (lo[0], hi[1]),
    ];
    for f in projection.facets() {
        if poly.is_empty() {
            break;
        }
        let (a, b, h) = (f.normal()[0], f.normal()[1], f.offset());
        let mut out = Vec::with_capacity(poly.len() + 2);
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let vp = a * p.0 + b * p.1 - h;
            let vq = a * q.0 + b * q.1 - h;
            if vp <= 0.0 {
                out.push(p);
            }
            if (vp < 0.0 && vq > 0.0) || (vp > 0.0 && vq < 0.0) {
                let s = vp / (vp - vq);
                out.push((p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1)));
            }
        }
        poly = out;
    }
    if poly.len() < 3 {
        return (0.0, DVector::zeros(2));
    }
    let (area, c) = polygon_area_centroid(&poly);
    (area, DVector::from_column_slice(&[c.0, c.1]))
}

/// Midpoint-rule cells of a regular grid over the projection's bounding
/// box: full-weight interior cells, exactly clipped boundary cells in base
/// dimension 1 and 2, center-in approximation above that.
pub(crate) fn grid_cells(
    projection: &Polytope,
    resolution: usize,
) -> Result<(Vec<CellSeed>, Vec<f64>)> {
    if resolution < 3 {
        return Err(Error::InvalidResolution(resolution));
    }
    let d = projection.dim();
    if resolution.pow(d as u32) > MAX_GRID_CELLS {
        return Err(Error::InvalidInput(format!(
            "grid of {} cells per axis in base dimension {} is too large",
            resolution, d
        )));
    }

    let mut mins = vec![f64::INFINITY; d];
    let mut maxs = vec![f64::NEG_INFINITY; d];
    for v in projection.vertices() {
        for i in 0..d {
            mins[i] = mins[i].min(v[i]);
            maxs[i] = maxs[i].max(v[i]);
        }
    }
    let widths: Vec<f64> = (0..d).map(|i| (maxs[i] - mins[i]) / resolution as f64).collect();
    if widths.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::DegenerateInput { dim: d, rank: 0 });
    }

    let total = resolution.pow(d as u32);
    let seeds: Vec<Option<CellSeed>> = par::map_indexed(total, |flat| {
        let mut index = vec![0usize; d];
        let mut rem = flat;
        for i in (0..d).rev() {
            index[i] = rem % resolution;
            rem /= resolution;
        }
        let lo: Vec<f64> = (0..d).map(|i| mins[i] + index[i] as f64 * widths[i]).collect();
        let hi: Vec<f64> = (0..d).map(|i| lo[i] + widths[i]).collect();
        let center = DVector::from_iterator(d, (0..d).map(|i| 0.5 * (lo[i] + hi[i])));
        let full_weight: f64 = widths.iter().product();

        let interior = cell_corners(&lo, &hi)
            .iter()
            .all(|c| projection.contains(c, -1e-12));
        if interior {
            return Some(CellSeed {
                index,
                point: center,
                weight: full_weight,
                interior: true,
            });
        }
        match d {
            1 => {
                let (plo, phi) = (projection.vertices()[0][0], projection.vertices().last().unwrap()[0]);
                let a = lo[0].max(plo.min(phi));
                let b = hi[0].min(plo.max(phi));
                if b - a <= 1e-14 * widths[0].max(1.0) {
                    return None;
                }
                Some(CellSeed {
                    index,
                    point: DVector::from_column_slice(&[0.5 * (a + b)]),
                    weight: b - a,
                    interior: false,
                })
            }
            2 => {
                let (area, centroid) = clip_cell_2d(projection, &lo, &hi);
                if area <= 1e-14 * full_weight.max(1.0) {
                    return None;
                }
                Some(CellSeed {
                    index,
                    point: centroid,
                    weight: area,
                    interior: false,
                })
            }
            _ => {
                if projection.contains(&center, 0.0) {
                    Some(CellSeed {
                        index,
                        point: center,
                        weight: full_weight,
                        interior: false,
                    })
                } else {
                    None
                }
            }
        }
    });
    Ok((seeds.into_iter().flatten().collect(), widths))
}

/// Build the sampled profile over a regular grid with `resolution` cells
/// per axis of the projection bounding box.
pub fn build_profile(
    body: &Polytope,
    base: &Subspace,
    resolution: usize,
    tol: &Tolerances,
) -> Result<SectionProfile> {
    let slicer = SectionSlicer::new(body, base, tol)?;
    let d = base.dim();
    let projection = slicer.projection();
    let (seeds, widths) = grid_cells(projection, resolution)?;

    let values: Vec<f64> = par::map_slice(&seeds, |s| slicer.slice_volume_unchecked(&s.point));

    let mut interior_at: HashMap<Vec<usize>, usize> = HashMap::new();
    for (pos, s) in seeds.iter().enumerate() {
        if s.interior {
            interior_at.insert(s.index.clone(), pos);
        }
    }

    let gradients: Vec<Option<DVector<f64>>> = par::map_indexed(seeds.len(), |pos| {
        let s = &seeds[pos];
        let f0 = values[pos];
        let mut g = DVector::zeros(d);
        for axis in 0..d {
            let w = widths[axis];
            let neighbor_value = |delta: i64| -> Option<f64> {
                if !s.interior {
                    return None;
                }
                let j = s.index[axis] as i64 + delta;
                if j < 0 || j as usize >= resolution {
                    return None;
                }
                let mut idx = s.index.clone();
                idx[axis] = j as usize;
                interior_at.get(&idx).map(|&p| values[p])
            };
            let stencil_value = |dir: f64| -> Option<f64> {
                let mut z = s.point.clone();
                z[axis] += dir * w;
                if projection.contains(&z, 0.0) {
                    Some(slicer.slice_volume_unchecked(&z))
                } else {
                    None
                }
            };
            let plus = neighbor_value(1).or_else(|| stencil_value(1.0));
            let minus = neighbor_value(-1).or_else(|| stencil_value(-1.0));
            match (plus, minus) {
                (Some(fp), Some(fm)) => g[axis] = (fp - fm) / (2.0 * w),
                (Some(fp), None) => g[axis] = (fp - f0) / w,
                (None, Some(fm)) => g[axis] = (f0 - fm) / w,
                (None, None) => return None,
            }
        }
        Some(g)
    });

    let volume_quadrature = par::sum_ordered(
        seeds.iter().zip(&values).map(|(s, v)| v * s.weight),
    );
    let mut moment = DVector::zeros(d);
    for (s, v) in seeds.iter().zip(&values) {
        moment += &s.point * (v * s.weight);
    }
    let unresolved_boundary_mass = par::sum_ordered(
        seeds
            .iter()
            .zip(&values)
            .zip(&gradients)
            .filter(|(_, g)| g.is_none())
            .map(|((s, v), _)| v * s.weight),
    );

    // Boundary integral of value * <z, outward normal> over the projection
    // boundary. The profile vanishes there unless a slab of the body sits
    // over the boundary, in which case the slicer still evaluates exactly.
    let boundary_flux: Option<f64> = match d {
        1 => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in projection.vertices() {
                lo = lo.min(v[0]);
                hi = hi.max(v[0]);
            }
            let f_hi = slicer.slice_volume_unchecked(&DVector::from_column_slice(&[hi]));
            let f_lo = slicer.slice_volume_unchecked(&DVector::from_column_slice(&[lo]));
            Some(hi * f_hi - lo * f_lo)
        }
        2 => {
            // <z, normal> is the facet offset along each polygon edge, so the
            // flux is offset times the edge line integral of the value,
            // composite midpoint with `resolution` nodes per edge.
            let mut flux = 0.0;
            for f in projection.facets() {
                let tangent = DVector::from_column_slice(&[-f.normal()[1], f.normal()[0]]);
                let ids = f.vertex_indices();
                let (mut ta, mut tb) = (f64::INFINITY, f64::NEG_INFINITY);
                let (mut a, mut b) = (ids[0], ids[0]);
                for &vi in ids {
                    let t = tangent.dot(&projection.vertices()[vi]);
                    if t < ta {
                        ta = t;
                        a = vi;
                    }
                    if t > tb {
                        tb = t;
                        b = vi;
                    }
                }
                let pa = &projection.vertices()[a];
                let pb = &projection.vertices()[b];
                let len = (pb - pa).norm();
                let mut line = 0.0;
                for k in 0..resolution {
                    let t = (k as f64 + 0.5) / resolution as f64;
                    let z = pa * (1.0 - t) + pb * t;
                    line += slicer.slice_volume_unchecked(&z);
                }
                flux += f.offset() * line * (len / resolution as f64);
            }
            Some(flux)
        }
        _ => None,
    };

    // Subgradient of the log profile at the origin by central differences.
    let origin = DVector::zeros(d);
    let value_at_origin = slicer.slice_volume_unchecked(&origin);
    let mut subgradient = DVector::zeros(d);
    let mut sub_residual: f64 = 0.0;
    if value_at_origin > 1e-300 {
        for axis in 0..d {
            let w = widths[axis];
            let mut zp = origin.clone();
            zp[axis] += w;
            let mut zm = origin.clone();
            zm[axis] -= w;
            let fp = if projection.contains(&zp, 0.0) {
                slicer.slice_volume_unchecked(&zp)
            } else {
                0.0
            };
            let fm = if projection.contains(&zm, 0.0) {
                slicer.slice_volume_unchecked(&zm)
            } else {
                0.0
            };
            if fp > 1e-300 && fm > 1e-300 {
                let (lp, l0, lm) = (fp.ln(), value_at_origin.ln(), fm.ln());
                subgradient[axis] = (lp - lm) / (2.0 * w);
                sub_residual = sub_residual.max((lp - 2.0 * l0 + lm).abs());
            } else {
                sub_residual = f64::INFINITY;
            }
        }
    } else {
        sub_residual = f64::INFINITY;
    }

    let samples = seeds
        .into_iter()
        .zip(values)
        .zip(gradients)
        .map(|((s, value), gradient)| ProfileSample {
            point: s.point,
            weight: s.weight,
            value,
            gradient,
            interior: s.interior,
        })
        .collect();

    Ok(SectionProfile {
        base_dim: d,
        slice_dim: slicer.slice_dim(),
        resolution,
        cell_widths: widths,
        samples,
        volume_quadrature,
        moment_norm: moment.norm(),
        unresolved_boundary_mass,
        boundary_flux,
        body_volume: body.volume(),
        value_at_origin,
        subgradient_origin: subgradient,
        subgradient_residual: sub_residual,
    })
}

impl SectionProfile {
    /// Integral of <gradient, point>. Where the boundary flux is available
    /// this is flux minus base_dim times the body volume: integrating the
    /// profile over the projection gives the volume exactly, so only the
    /// boundary term needs quadrature. Otherwise it falls back to the
    /// midpoint rule over resolved sample gradients.
    pub fn gradient_moment(&self) -> f64 {
        if let Some(flux) = self.boundary_flux {
            return flux - self.base_dim as f64 * self.body_volume;
        }
        par::sum_ordered(self.samples.iter().filter_map(|s| {
            s.gradient
                .as_ref()
                .map(|g| g.dot(&s.point) * s.weight)
        }))
    }

    /// Tolerance for gradient quadrature claims: one boundary layer of
    /// cells worth of integrand, plus whatever mass went unresolved.
    pub fn gradient_tolerance(&self, volume: f64) -> f64 {
        let res = self.resolution as f64;
        let d = self.base_dim as f64;
        (5.0 * d * volume / res) + self.base_dim as f64 * self.unresolved_boundary_mass + 1e-9 * volume
    }
}

#[derive(Debug, Clone)]
pub struct DivergenceReport {
    pub base_dim: usize,
    pub resolution: usize,
    /// n times the measure mass carried by directions inside the base.
    pub lhs: f64,
    pub grad_term: f64,
    /// d V + gradient term.
    pub rhs: f64,
    /// |lhs - rhs| relative to n V.
    pub mismatch_rel: f64,
    pub grad_tolerance: f64,
    /// Gradient term is nonpositive up to quadrature tolerance.
    pub grad_ok: bool,
    pub volume: f64,
    pub volume_quadrature: f64,
    pub moment_norm: f64,
    pub unresolved_boundary_mass: f64,
}

/// Both sides of the identity n V_K(L) = d V(K) + integral of <grad f, x>.
pub fn divergence_identity_check(
    body: &Polytope,
    base: &Subspace,
    resolution: usize,
    tol: &Tolerances,
) -> Result<DivergenceReport> {
    let n = body.dim();
    let measure = cone_volume_measure_with(body, tol)?;
    let lhs = n as f64 * measure.subspace_mass(base, tol);
    let profile = build_profile(body, base, resolution, tol)?;
    let grad_term = profile.gradient_moment();
    let rhs = base.dim() as f64 * body.volume() + grad_term;
    let grad_tolerance = profile.gradient_tolerance(body.volume());
    Ok(DivergenceReport {
        base_dim: base.dim(),
        resolution,
        lhs,
        grad_term,
        rhs,
        mismatch_rel: (lhs - rhs).abs() / (n as f64 * body.volume()),
        grad_tolerance,
        grad_ok: grad_term <= grad_tolerance,
        volume: body.volume(),
        volume_quadrature: profile.volume_quadrature,
        moment_norm: profile.moment_norm,
        unresolved_boundary_mass: profile.unresolved_boundary_mass,
    })
}

#[derive(Debug, Clone)]
pub struct EtaLevelReport {
    pub eta: f64,
    /// 7 n^(3/2) sqrt(eta), the claimed log-ratio band on the level set.
    pub tau: f64,
    pub subgradient: Vec<f64>,
    pub subgradient_residual: f64,
    pub value_at_origin: f64,
    pub volume: f64,
    /// Slice mass over samples outside the level set.
    pub v_outside: f64,
    pub samples_inside: usize,
    pub samples_outside: usize,
    pub grad_term: f64,
    /// -eta v_outside plus quadrature tolerance.
    pub grad_bound: f64,
    pub grad_ok: bool,
    /// v_outside small enough for the ratio band claim.
    pub ratio_hypothesis: bool,
    pub worst_log_ratio: f64,
    pub ratio_band_ok: Option<bool>,
    pub unresolved_boundary_mass: f64,
}

/// Level-set probe: classifies grid samples by the subgradient inequality
/// at level eta, then checks the gradient-moment bound and, when the
/// outside mass is small, the log-ratio band on the level set.
pub fn eta_level_probe(
    body: &Polytope,
    base: &Subspace,
    eta: f64,
    resolution: usize,
    tol: &Tolerances,
) -> Result<EtaLevelReport> {
    if eta < 0.0 {
        return Err(Error::InvalidInput(format!("eta {} must be nonnegative", eta)));
    }
    let n = body.dim();
    let profile = build_profile(body, base, resolution, tol)?;
    let f0 = profile.value_at_origin;
    if !(f0 > 1e-300) {
        return Err(Error::InvalidInput(
            "slice through the origin has no volume; is the body centered?".to_string(),
        ));
    }
    let l0 = f0.ln();
    let g = &profile.subgradient_origin;

    let mut v_outside = 0.0;
    let mut samples_inside = 0;
    let mut samples_outside = 0;
    let mut worst_log_ratio: f64 = 0.0;
    for s in &profile.samples {
        let inside = s.value > 1e-300
            && s.value.ln() - l0 >= g.dot(&s.point) - eta - 1e-12;
        if inside {
            samples_inside += 1;
            worst_log_ratio = worst_log_ratio.max((s.value.ln() - l0).abs());
        } else {
            samples_outside += 1;
            v_outside += s.value * s.weight;
        }
    }

    let grad_term = profile.gradient_moment();
    let grad_tolerance = profile.gradient_tolerance(body.volume());
    let grad_bound = -eta * v_outside + grad_tolerance;
    let hypothesis_cap = body.volume() / (2f64.powi(n as i32) * std::f64::consts::E);
    let ratio_hypothesis = v_outside <= hypothesis_cap;
    let tau = 7.0 * (n as f64).powf(1.5) * eta.sqrt();
    let ratio_band_ok = if ratio_hypothesis {
        Some(worst_log_ratio <= tau + 1e-9)
    } else {
        None
    };

    Ok(EtaLevelReport {
        eta,
        tau,
        subgradient: g.iter().copied().collect(),
        subgradient_residual: profile.subgradient_residual,
        value_at_origin: f0,
        volume: body.volume(),
        v_outside,
        samples_inside,
        samples_outside,
        grad_term,
        grad_bound,
        grad_ok: grad_term <= grad_bound,
        ratio_hypothesis,
        worst_log_ratio,
        ratio_band_ok,
        unresolved_boundary_mass: profile.unresolved_boundary_mass,
    })
}

pub fn profile_summary_json(p: &SectionProfile) -> Json {
    Json::obj(vec![
        ("base_dim", Json::Int(p.base_dim as i64)),
        ("slice_dim", Json::Int(p.slice_dim as i64)),
        ("resolution", Json::Int(p.resolution as i64)),
        ("samples", Json::Int(p.samples.len() as i64)),
        ("volume_quadrature", Json::Num(p.volume_quadrature)),
        ("moment_norm", Json::Num(p.moment_norm)),
        (
            "unresolved_boundary_mass",
            Json::Num(p.unresolved_boundary_mass),
        ),
        ("value_at_origin", Json::Num(p.value_at_origin)),
        (
            "subgradient_origin",
            Json::nums(p.subgradient_origin.iter().copied()),
        ),
        ("subgradient_residual", Json::Num(p.subgradient_residual)),
    ])
}

pub fn divergence_report_json(r: &DivergenceReport) -> Json {
    Json::obj(vec![
        ("base_dim", Json::Int(r.base_dim as i64)),
        ("resolution", Json::Int(r.resolution as i64)),
        ("lhs", Json::Num(r.lhs)),
        ("grad_term", Json::Num(r.grad_term)),
        ("rhs", Json::Num(r.rhs)),
        ("mismatch_rel", Json::Num(r.mismatch_rel)),
        ("grad_tolerance", Json::Num(r.grad_tolerance)),
        ("grad_ok", Json::Bool(r.grad_ok)),
        ("volume", Json::Num(r.volume)),
        ("volume_quadrature", Json::Num(r.volume_quadrature)),
        ("moment_norm", Json::Num(r.moment_norm)),
        (
            "unresolved_boundary_mass",
            Json::Num(r.unresolved_boundary_mass),
        ),
    ])
}

pub fn eta_report_json(r: &EtaLevelReport) -> Json {
    Json::obj(vec![
        ("eta", Json::Num(r.eta)),
        ("tau", Json::Num(r.tau)),
        ("subgradient", Json::nums(r.subgradient.iter().copied())),
        ("subgradient_residual", Json::Num(r.subgradient_residual)),
        ("value_at_origin", Json::Num(r.value_at_origin)),
        ("volume", Json::Num(r.volume)),
        ("v_outside", Json::Num(r.v_outside)),
        ("samples_inside", Json::Int(r.samples_inside as i64)),
        ("samples_outside", Json::Int(r.samples_outside as i64)),
        ("grad_term", Json::Num(r.grad_term)),
        ("grad_bound", Json::Num(r.grad_bound)),
        ("grad_ok", Json::Bool(r.grad_ok)),
        ("ratio_hypothesis", Json::Bool(r.ratio_hypothesis)),
        ("worst_log_ratio", Json::Num(r.worst_log_ratio)),
        (
            "ratio_band_ok",
            match r.ratio_band_ok {
                Some(b) => Json::Bool(b),
                None => Json::Null,
            },
        ),
        (
            "unresolved_boundary_mass",
            Json::Num(r.unresolved_boundary_mass),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::bodies::{cube, regular_simplex};

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(coords)
    }

    fn line(dim: usize, axis: usize) -> Subspace {
        let mut d = DVector::zeros(dim);
        d[axis] = 1.0;
        Subspace::line(&d).unwrap()
    }

    #[test]
    fn cube_slices_are_constant() {
        let k = cube(3, 1.0).unwrap();
        let l = line(3, 0);
        assert!((section_volume(&k, &l, &v(&[0.0, 0.0, 0.0]), &TOL).unwrap() - 4.0).abs() < 1e-12);
        assert!((section_volume(&k, &l, &v(&[1.0, 0.0, 0.0]), &TOL).unwrap() - 4.0).abs() < 1e-10);
        assert!((section_volume(&k, &l, &v(&[-1.0, 0.0, 0.0]), &TOL).unwrap() - 4.0).abs() < 1e-10);
        assert!(matches!(
            section_volume(&k, &l, &v(&[1.1, 0.0, 0.0]), &TOL),
            Err(Error::OutsideProjection)
        ));
    }

    #[test]
    fn triangle_profile_is_linear() {
        let t = Polytope::from_points(
            2,
            vec![v(&[-1.0, -1.0]), v(&[2.0, -1.0]), v(&[-1.0, 2.0])],
        )
        .unwrap();
        // Already centered: centroid is the origin.
        assert!(t.centroid().norm() < 1e-12);
        let l = line(2, 0);
        // Slice length at x is 2 - x on [-1, 2].
        for x in [-0.5, 0.0, 0.7, 1.5] {
            let f = section_volume(&t, &l, &v(&[x, 0.0]), &TOL).unwrap();
            assert!((f - (2.0 - x)).abs() < 1e-12, "f({}) = {}", x, f);
        }
    }

    #[test]
    fn cube_profile_gradient_and_moment_vanish() {
        let k = cube(3, 1.0).unwrap();
        let p = build_profile(&k, &line(3, 0), 101, &TOL).unwrap();
        assert!((p.volume_quadrature - 8.0).abs() < 1e-10);
        assert!(p.moment_norm < 1e-10);
        for s in &p.samples {
            assert!((s.value - 4.0).abs() < 1e-10);
            let g = s.gradient.as_ref().expect("1-d profile fully resolved");
            assert!(g.norm() < 1e-10);
        }
        assert!(p.subgradient_origin.norm() < 1e-10);
        assert!(p.unresolved_boundary_mass.abs() < 1e-12);
    }

    #[test]
    fn rejects_tiny_resolution() {
        let k = cube(2, 1.0).unwrap();
        match build_profile(&k, &line(2, 0), 2, &TOL) {
            Err(Error::InvalidResolution(2)) => {}
            other => panic!("expected InvalidResolution, got {:?}", other.map(|p| p.resolution)),
        }
    }

    #[test]
    fn divergence_identity_cube_exact() {
        let k = cube(3, 1.0).unwrap();
        let rep = divergence_identity_check(&k, &line(3, 0), 101, &TOL).unwrap();
        assert!((rep.lhs - 8.0).abs() < 1e-10);
        assert!((rep.rhs - 8.0).abs() < 1e-9);
        assert!(rep.mismatch_rel < 1e-9);
        assert!(rep.grad_ok);
    }

    #[test]
    fn divergence_identity_triangle_exact() {
        let t = Polytope::from_points(
            2,
            vec![v(&[-1.0, -1.0]), v(&[2.0, -1.0]), v(&[-1.0, 2.0])],
        )
        .unwrap();
        let rep = divergence_identity_check(&t, &line(2, 0), 201, &TOL).unwrap();
        // Mass on lin(e1) is the left facet's: offset 1, length 3, dim 2.
        assert!((rep.lhs - 3.0).abs() < 1e-10);
        assert!((rep.grad_term + 1.5).abs() < 1e-9);
        assert!((rep.rhs - 3.0).abs() < 1e-9);
        assert!(rep.mismatch_rel < 1e-9);
    }

    #[test]
    fn divergence_identity_simplex_plane_base() {
        let s = regular_simplex(3).unwrap();
        let l = Subspace::from_spanning(
            3,
            &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])],
            &TOL,
        )
        .unwrap();
        let rep = divergence_identity_check(&s, &l, 201, &TOL).unwrap();
        assert!(rep.mismatch_rel < 0.01, "mismatch {}", rep.mismatch_rel);
        assert!(rep.grad_ok);
        // Quadrature integrates the profile back to the volume.
        assert!((rep.volume_quadrature - rep.volume).abs() < 0.01 * rep.volume);
    }

    #[test]
    fn refinement_shrinks_simplex_mismatch() {
        let s = regular_simplex(3).unwrap();
        let l = line(3, 2);
        let coarse = divergence_identity_check(&s, &l, 101, &TOL).unwrap();
        let fine = divergence_identity_check(&s, &l, 201, &TOL).unwrap();
        assert!(fine.mismatch_rel <= 0.75 * coarse.mismatch_rel + 1e-12);
    }

    #[test]
    fn log_concavity_along_segments() {
        let s = regular_simplex(3).unwrap();
        let l = Subspace::from_spanning(
            3,
            &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])],
            &TOL,
        )
        .unwrap();
        let slicer = SectionSlicer::new(&s, &l, &TOL).unwrap();
        let x = v(&[0.05, 0.02]);
        let y = v(&[-0.04, 0.06]);
        let fx = slicer.slice_volume(&x).unwrap();
        let fy = slicer.slice_volume(&y).unwrap();
        for lam in [0.25, 0.5, 0.75] {
            let z = &x * lam + &y * (1.0 - lam);
            let fz = slicer.slice_volume(&z).unwrap();
            assert!(fz >= fx.powf(lam) * fy.powf(1.0 - lam) - 1e-9 * fx.max(fy));
        }
    }

    #[test]
    fn eta_probe_on_cube_is_trivial() {
        let k = cube(3, 1.0).unwrap();
        let rep = eta_level_probe(&k, &line(3, 0), 0.1, 101, &TOL).unwrap();
        assert_eq!(rep.samples_outside, 0);
        assert!(rep.v_outside.abs() < 1e-12);
        assert!(rep.grad_ok);
        assert_eq!(rep.ratio_band_ok, Some(true));
        assert!(rep.worst_log_ratio < 1e-10);
    }

    #[test]
    fn eta_probe_on_triangle() {
        let t = Polytope::from_points(
            2,
            vec![v(&[-1.0, -1.0]), v(&[2.0, -1.0]), v(&[-1.0, 2.0])],
        )
        .unwrap();
        let rep = eta_level_probe(&t, &line(2, 0), 0.1, 201, &TOL).unwrap();
        assert!(rep.grad_ok, "grad {} vs bound {}", rep.grad_term, rep.grad_bound);
        if rep.ratio_hypothesis {
            assert_eq!(rep.ratio_band_ok, Some(true));
        }
    }

    #[test]
    fn eta_zero_reduces_to_plain_gradient_bound() {
        let t = Polytope::from_points(
            2,
            vec![v(&[-1.0, -1.0]), v(&[2.0, -1.0]), v(&[-1.0, 2.0])],
        )
        .unwrap();
        let rep = eta_level_probe(&t, &line(2, 0), 0.0, 201, &TOL).unwrap();
        assert!((rep.grad_bound - rep.grad_term).abs() >= 0.0);
        assert!(rep.grad_ok);
        assert_eq!(rep.tau, 0.0);
    }
}
