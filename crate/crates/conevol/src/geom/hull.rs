//! Incremental convex hull with coplanar-facet merging.
//!
//! Beneath-beyond over simplicial facets in a fixed insertion order
//! (furthest from the seed simplex centroid first), then a merge pass that
//! fuses simplicial pieces sharing a supporting hyperplane into one facet.
//! Output is canonical: vertices in lexicographic order, facet vertex lists
//! ascending, facets sorted by those lists. Same input, same bytes.

use std::collections::HashMap;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::tol::Tolerances;

use super::linalg::{hyperplane_normal, lex_cmp, orthonormalize, rank_of};

#[derive(Debug, Clone)]
pub struct HullFacet {
    pub normal: DVector<f64>,
    pub offset: f64,
    /// Indices into `Hull::vertices`, ascending.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Hull {
    pub dim: usize,
    pub vertices: Vec<DVector<f64>>,
    pub facets: Vec<HullFacet>,
}

struct SimpFacet {
    verts: Vec<usize>,
    normal: DVector<f64>,
    offset: f64,
    alive: bool,
}

pub fn convex_hull(dim: usize, points: &[DVector<f64>], tol: &Tolerances) -> Result<Hull> {
    if dim == 0 {
        return Err(Error::InvalidInput("ambient dimension must be positive".into()));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                left: p.len(),
                right: dim,
            });
        }
    }
    let pts = dedup_points(points, tol.vertex_dedup);
    if dim == 1 {
        return hull_1d(&pts, tol);
    }
    if pts.len() < dim + 1 {
        return Err(Error::DegenerateInput {
            dim,
            rank: affine_rank(&pts, tol.rank),
        });
    }

    let seed = initial_simplex(dim, &pts, tol)?;
    let c_ref = {
        let mut c = DVector::zeros(dim);
        for &i in &seed {
            c += &pts[i];
        }
        c / (seed.len() as f64)
    };

    let mut facets: Vec<SimpFacet> = Vec::new();
    for omit in 0..seed.len() {
        let verts: Vec<usize> = seed
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != omit)
            .map(|(_, &v)| v)
            .collect();
        facets.push(make_facet(&pts, verts, &c_ref, tol)?);
    }

    // Insertion order: far points first, index breaks ties.
    let mut order: Vec<usize> = (0..pts.len()).filter(|i| !seed.contains(i)).collect();
    order.sort_by(|&a, &b| {
        let da = (&pts[a] - &c_ref).norm();
        let db = (&pts[b] - &c_ref).norm();
        db.total_cmp(&da).then(a.cmp(&b))
    });

    for &pi in &order {
        let p = &pts[pi];

        // Ridge -> incident alive facets. A closed simplicial boundary has
        // exactly two facets per ridge.
        let mut ridge_map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (id, f) in facets.iter().enumerate() {
            if !f.alive {
                continue;
            }
            for omit in 0..f.verts.len() {
                let mut ridge = f.verts.clone();
                ridge.remove(omit);
                ridge_map.entry(ridge).or_default().push(id);
            }
        }

        // Seed at the worst violation and grow only through ridge-adjacent
        // facets. Thresholded visibility alone can produce disconnected
        // pockets on near-coplanar input, and a disconnected visible set
        // breaks the horizon cycle. The walk also swallows near-coplanar
        // neighbors of visible facets: a coplanar bridge must not block the
        // walk from reaching a genuinely visible region behind it.
        let seed_facet = facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive)
            .map(|(id, f)| (id, f.normal.dot(p) - f.offset))
            .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
        let (seed_id, worst) = match seed_facet {
            Some(s) => s,
            None => return Err(Error::InvalidInput("hull: no alive facets".into())),
        };
        if worst <= tol.rank {
            continue;
        }
        let coplanar_band = 10.0 * tol.rank;
        let mut visible_set: std::collections::HashSet<usize> = std::collections::HashSet::new();
        let mut stack = vec![seed_id];
        visible_set.insert(seed_id);
        while let Some(vid) = stack.pop() {
            let f = &facets[vid];
            for omit in 0..f.verts.len() {
                let mut ridge = f.verts.clone();
                ridge.remove(omit);
                let incident = match ridge_map.get(&ridge) {
                    Some(inc) => inc,
                    None => continue,
                };
                for &other in incident {
                    if other == vid || visible_set.contains(&other) {
                        continue;
                    }
                    let g = &facets[other];
                    if g.normal.dot(p) - g.offset > -coplanar_band {
                        visible_set.insert(other);
                        stack.push(other);
                    }
                }
            }
        }
        // A degenerate cone facet means the point sits almost inside the
        // span of a horizon ridge; swallowing the facet across that ridge
        // widens the horizon until every cone facet is well formed.
        let cone = loop {
            let mut visible: Vec<usize> = visible_set.iter().copied().collect();
            visible.sort_unstable();
            let mut horizon: Vec<(Vec<usize>, usize)> = Vec::new();
            for &vid in &visible {
                let f = &facets[vid];
                for omit in 0..f.verts.len() {
                    let mut ridge = f.verts.clone();
                    ridge.remove(omit);
                    let incident = ridge_map
                        .get(&ridge)
                        .ok_or_else(|| Error::InvalidInput("hull: missing ridge".into()))?;
                    if incident.len() != 2 {
                        return Err(Error::InvalidInput("hull: inconsistent facet complex".into()));
                    }
                    let other = if incident[0] == vid { incident[1] } else { incident[0] };
                    if !visible_set.contains(&other) {
                        horizon.push((ridge, other));
                    }
                }
            }

            let mut cone = Vec::with_capacity(horizon.len());
            let mut expand = None;
            for (ridge, outer) in horizon {
                let mut verts = ridge;
                verts.push(pi);
                match make_facet(&pts, verts, &c_ref, tol) {
                    Ok(f) => cone.push(f),
                    Err(_) => {
                        expand = Some(outer);
                        break;
                    }
                }
            }
            match expand {
                Some(fid) => {
                    if visible_set.len() + 1 == facets.iter().filter(|f| f.alive).count() {
                        return Err(Error::InvalidInput(
                            "hull: visible set swallowed the whole boundary".into(),
                        ));
                    }
                    visible_set.insert(fid);
                }
                None => break cone,
            }
        };

        for &vid in &visible_set {
            facets[vid].alive = false;
        }
        facets.extend(cone);
    }

    assemble(dim, &pts, &facets, tol)
}

fn dedup_points(points: &[DVector<f64>], eps: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(points.len());
    'next: for p in points {
        for q in &out {
            if max_norm_diff(p, q) <= eps {
                continue 'next;
            }
        }
        out.push(p.clone());
    }
    out
}

fn max_norm_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..a.len() {
        m = m.max((a[i] - b[i]).abs());
    }
    m
}

fn affine_rank(pts: &[DVector<f64>], floor: f64) -> usize {
    if pts.is_empty() {
        return 0;
    }
    let edges: Vec<DVector<f64>> = pts[1..].iter().map(|p| p - &pts[0]).collect();
    rank_of(&edges, floor)
}

fn hull_1d(pts: &[DVector<f64>], tol: &Tolerances) -> Result<Hull> {
    if pts.is_empty() {
        return Err(Error::DegenerateInput { dim: 1, rank: 0 });
    }
    let mut lo = 0usize;
    let mut hi = 0usize;
    for (i, p) in pts.iter().enumerate() {
        if p[0] < pts[lo][0] {
            lo = i;
        }
        if p[0] > pts[hi][0] {
            hi = i;
        }
    }
    if pts[hi][0] - pts[lo][0] <= tol.rank {
        return Err(Error::DegenerateInput { dim: 1, rank: 0 });
    }
    let vertices = vec![pts[lo].clone(), pts[hi].clone()];
    let facets = vec![
        HullFacet {
            normal: DVector::from_column_slice(&[-1.0]),
            offset: -vertices[0][0],
            vertices: vec![0],
        },
        HullFacet {
            normal: DVector::from_column_slice(&[1.0]),
            offset: vertices[1][0],
            vertices: vec![1],
        },
    ];
    Ok(Hull {
        dim: 1,
        vertices,
        facets,
    })
}

fn initial_simplex(dim: usize, pts: &[DVector<f64>], tol: &Tolerances) -> Result<Vec<usize>> {
    let first = (0..pts.len())
        .min_by(|&a, &b| lex_cmp(&pts[a], &pts[b]))
        .expect("nonempty");
    let mut selected = vec![first];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for step in 0..dim {
        let mut best: Option<(usize, f64, DVector<f64>)> = None;
        for i in 0..pts.len() {
            if selected.contains(&i) {
                continue;
            }
            let mut r = &pts[i] - &pts[first];
            for b in &basis {
                let c = r.dot(b);
                r.axpy(-c, b, 1.0);
            }
            let norm = r.norm();
            if best.as_ref().map_or(true, |(_, bn, _)| norm > *bn) {
                best = Some((i, norm, r));
            }
        }
        match best {
            Some((i, norm, r)) if norm > tol.rank => {
                basis.push(r / norm);
                selected.push(i);
            }
            _ => {
                return Err(Error::DegenerateInput { dim, rank: step });
            }
        }
    }
    Ok(selected)
}

fn make_facet(
    pts: &[DVector<f64>],
    mut verts: Vec<usize>,
    c_ref: &DVector<f64>,
    tol: &Tolerances,
) -> Result<SimpFacet> {
    // Ridge keys are sorted vertex lists; keep facet lists sorted too.
    verts.sort_unstable();
    let refs: Vec<&DVector<f64>> = verts.iter().map(|&i| &pts[i]).collect();
    let mut normal = hyperplane_normal(&refs, tol.rank)
        .ok_or_else(|| Error::InvalidInput("hull: degenerate facet candidate".into()))?;
    let mut offset = normal.dot(refs[0]);
    if normal.dot(c_ref) > offset {
        normal = -normal;
        offset = -offset;
    }
    Ok(SimpFacet {
        verts,
        normal,
        offset,
        alive: true,
    })
}

struct Group {
    weighted_normal: DVector<f64>,
    rep_normal: DVector<f64>,
    rep_offset: f64,
    vert_ids: Vec<usize>,
}

fn assemble(
    dim: usize,
    pts: &[DVector<f64>],
    facets: &[SimpFacet],
    tol: &Tolerances,
) -> Result<Hull> {
    let mut groups: Vec<Group> = Vec::new();
    for f in facets.iter().filter(|f| f.alive) {
        let area = simplex_area(pts, &f.verts);
        let target = groups.iter_mut().find(|g| {
            (g.rep_offset - f.offset).abs() <= 1e-9 && g.rep_normal.dot(&f.normal) >= 1.0 - 1e-9
        });
        match target {
            Some(g) => {
                g.weighted_normal.axpy(area, &f.normal, 1.0);
                g.vert_ids.extend_from_slice(&f.verts);
            }
            None => groups.push(Group {
                weighted_normal: &f.normal * area,
                rep_normal: f.normal.clone(),
                rep_offset: f.offset,
                vert_ids: f.verts.clone(),
            }),
        }
    }

    // Final plane per group, then a sweep that grants incidence to every
    // candidate point on the plane; the merge path does not matter.
    let planes: Vec<(DVector<f64>, f64)> = groups
        .iter()
        .map(|g| {
            let norm = g.weighted_normal.norm();
            let normal = if norm > tol.rank {
                &g.weighted_normal / norm
            } else {
                g.rep_normal.clone()
            };
            let offset = g
                .vert_ids
                .iter()
                .map(|&i| normal.dot(&pts[i]))
                .fold(f64::NEG_INFINITY, f64::max);
            (normal, offset)
        })
        .collect();

    let mut candidates: Vec<usize> = groups.iter().flat_map(|g| g.vert_ids.iter().copied()).collect();
    candidates.sort_unstable();
    candidates.dedup();

    let incidence: Vec<Vec<usize>> = candidates
        .iter()
        .map(|&pi| {
            planes
                .iter()
                .enumerate()
                .filter(|(_, (n, h))| (n.dot(&pts[pi]) - h).abs() <= tol.rank)
                .map(|(gi, _)| gi)
                .collect()
        })
        .collect();

    let kept: Vec<usize> = candidates
        .iter()
        .zip(&incidence)
        .filter(|(_, inc)| {
            let normals: Vec<DVector<f64>> = inc.iter().map(|&gi| planes[gi].0.clone()).collect();
            rank_of(&normals, 1e-7) == dim
        })
        .map(|(&pi, _)| pi)
        .collect();

    let mut vert_order: Vec<usize> = kept.clone();
    vert_order.sort_by(|&a, &b| lex_cmp(&pts[a], &pts[b]));
    let new_index: HashMap<usize, usize> = vert_order
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();

    let mut out_facets: Vec<HullFacet> = Vec::with_capacity(groups.len());
    for (gi, (normal, offset)) in planes.iter().enumerate() {
        let mut vs: Vec<usize> = candidates
            .iter()
            .zip(&incidence)
            .filter(|(pi, inc)| inc.contains(&gi) && new_index.contains_key(pi))
            .map(|(pi, _)| new_index[pi])
            .collect();
        vs.sort_unstable();
        if vs.len() < dim {
            return Err(Error::InvalidInput("hull: facet with too few vertices".into()));
        }
        out_facets.push(HullFacet {
            normal: normal.clone(),
            offset: *offset,
            vertices: vs,
        });
    }
    out_facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));

    let vertices: Vec<DVector<f64>> = vert_order.iter().map(|&i| pts[i].clone()).collect();
    for f in &out_facets {
        for v in &vertices {
            let violation = f.normal.dot(v) - f.offset;
            if violation > 10.0 * tol.rank {
                return Err(Error::InvalidInput(format!(
                    "hull: facet fails support check by {:.3e}",
                    violation
                )));
            }
        }
    }
    if vertices.len() < dim + 1 || out_facets.len() < dim + 1 {
        return Err(Error::DegenerateInput {
            dim,
            rank: affine_rank(&vertices, tol.rank),
        });
    }
    Ok(Hull {
        dim,
        vertices,
        facets: out_facets,
    })
}

/// Surface measure of the (dim-1)-simplex on the given points, via the Gram
/// determinant of its edge vectors.
fn simplex_area(pts: &[DVector<f64>], verts: &[usize]) -> f64 {
    let k = verts.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let edges: Vec<DVector<f64>> = verts[1..].iter().map(|&i| &pts[i] - &pts[verts[0]]).collect();
    let basis = orthonormalize(&edges, 1e-13);
    if basis.len() < k {
        return 0.0;
    }
    // det of edge coordinates in the orthonormal frame.
    let mut mat = vec![0.0; k * k];
    for (r, e) in edges.iter().enumerate() {
        for (c, b) in basis.iter().enumerate() {
            mat[r * k + c] = e.dot(b);
        }
    }
    let det = super::linalg::det_small(&mut mat, k);
    let mut fact = 1.0;
    for i in 2..=k {
        fact *= i as f64;
    }
    det.abs() / fact
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(coords)
    }

    #[test]
    fn square_hull() {
        let pts = vec![
            v(&[1.0, 1.0]),
            v(&[-1.0, 1.0]),
            v(&[-1.0, -1.0]),
            v(&[1.0, -1.0]),
            v(&[0.0, 0.0]),
            v(&[0.5, -0.2]),
        ];
        let h = convex_hull(2, &pts, &Tolerances::DEFAULT).unwrap();
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.facets.len(), 4);
        assert_eq!(h.vertices[0], v(&[-1.0, -1.0]));
        for f in &h.facets {
            assert_eq!(f.vertices.len(), 2);
            assert!((f.offset - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_merges_coplanar_pieces() {
        let mut pts = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    pts.push(v(&[x, y, z]));
                }
            }
        }
        // Mid-face and mid-edge points must vanish.
        pts.push(v(&[1.0, 0.0, 0.0]));
        pts.push(v(&[1.0, 1.0, 0.0]));
        let h = convex_hull(3, &pts, &Tolerances::DEFAULT).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        for f in &h.facets {
            assert_eq!(f.vertices.len(), 4);
        }
    }

    #[test]
    fn simplex_4d() {
        let pts = vec![
            v(&[0.0, 0.0, 0.0, 0.0]),
            v(&[1.0, 0.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0, 0.0]),
            v(&[0.0, 0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 0.0, 1.0]),
        ];
        let h = convex_hull(4, &pts, &Tolerances::DEFAULT).unwrap();
        assert_eq!(h.vertices.len(), 5);
        assert_eq!(h.facets.len(), 5);
    }

    #[test]
    fn flat_input_rejected() {
        let pts = vec![
            v(&[0.0, 0.0, 0.0]),
            v(&[1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.7, 0.2, 0.0]),
        ];
        match convex_hull(3, &pts, &Tolerances::DEFAULT) {
            Err(Error::DegenerateInput { dim: 3, rank: 2 }) => {}
            other => panic!("expected degenerate, got {:?}", other.map(|h| h.facets.len())),
        }
    }

    #[test]
    fn duplicate_points_collapse() {
        let pts = vec![
            v(&[0.0, 0.0]),
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[1.0, 1e-12]),
            v(&[0.0, 1.0]),
        ];
        let h = convex_hull(2, &pts, &Tolerances::DEFAULT).unwrap();
        assert_eq!(h.vertices.len(), 3);
    }
}
