//! Small dense helpers shared by the geometry code.
//!
//! Ambient dimension is at most 6, so solvers work on stack buffers and
//! orthonormalization is plain modified Gram-Schmidt with one
//! re-orthogonalization pass.

use nalgebra::DVector;

pub const MAX_DIM: usize = 6;

/// Solves `A x = b` for `n <= MAX_DIM` with partial pivoting.
/// Returns `None` when the determinant magnitude is at or below `det_floor`.
pub fn solve_small(a: &mut [f64], b: &mut [f64], n: usize, det_floor: f64) -> Option<()> {
    debug_assert!(n <= MAX_DIM && a.len() >= n * n && b.len() >= n);
    let mut det: f64 = 1.0;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
            det = -det;
        }
        let piv = a[col * n + col];
        det *= piv;
        if piv.abs() <= det_floor {
            return None;
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / piv;
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    if det.abs() <= det_floor {
        return None;
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    Some(())
}

/// Determinant of an `n x n` matrix stored row-major, `n <= MAX_DIM`.
pub fn det_small(a: &mut [f64], n: usize) -> f64 {
    debug_assert!(n <= MAX_DIM && a.len() >= n * n);
    let mut det: f64 = 1.0;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            det = -det;
        }
        let piv = a[col * n + col];
        det *= piv;
        for row in col + 1..n {
            let factor = a[row * n + col] / piv;
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    det
}

fn project_out(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for b in basis {
        let c = v.dot(b);
        v.axpy(-c, b, 1.0);
    }
}

/// Modified Gram-Schmidt with re-orthogonalization; vectors whose residual
/// norm is at or below `floor` are dropped. Output is orthonormal.
pub fn orthonormalize(vectors: &[DVector<f64>], floor: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        project_out(&mut r, &basis);
        project_out(&mut r, &basis);
        let norm = r.norm();
        if norm > floor {
            basis.push(r / norm);
        }
    }
    basis
}

/// Rank of a set of vectors at the given residual floor.
pub fn rank_of(vectors: &[DVector<f64>], floor: f64) -> usize {
    orthonormalize(vectors, floor).len()
}

/// Extends an orthonormal set to an orthonormal basis of R^dim and returns
/// only the new vectors (a basis of the orthogonal complement).
pub fn complement_basis(orthonormal: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let mut all: Vec<DVector<f64>> = orthonormal.to_vec();
    let mut fresh = Vec::new();
    for i in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut r = DVector::zeros(dim);
        r[i] = 1.0;
        project_out(&mut r, &all);
        project_out(&mut r, &all);
        let norm = r.norm();
        if norm > 1e-6 {
            let u = r / norm;
            all.push(u.clone());
            fresh.push(u);
        }
    }
    debug_assert_eq!(orthonormal.len() + fresh.len(), dim);
    fresh
}

/// Unit normal of the hyperplane through `points` (exactly `dim` of them).
/// `None` when the points are affinely dependent at the `floor` threshold.
pub fn hyperplane_normal(points: &[&DVector<f64>], floor: f64) -> Option<DVector<f64>> {
    let dim = points[0].len();
    debug_assert_eq!(points.len(), dim);
    let edges: Vec<DVector<f64>> = (1..dim).map(|i| points[i] - points[0]).collect();
    let basis = orthonormalize(&edges, floor);
    if basis.len() != dim - 1 {
        return None;
    }
    let normal = complement_basis(&basis, dim);
    normal.into_iter().next()
}

/// Lexicographic total order on coordinate vectors.
pub fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for i in 0..a.len() {
        match a[i].total_cmp(&b[i]) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_systems() {
        // 3x3 with known solution (1, -2, 3).
        let mut a = vec![2.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 4.0];
        let mut b = vec![0.0, -8.0, 14.0];
        solve_small(&mut a, &mut b, 3, 1e-12).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12);
        assert!((b[1] + 2.0).abs() < 1e-12);
        assert!((b[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(solve_small(&mut a, &mut b, 2, 1e-9).is_none());
    }

    #[test]
    fn normal_of_plane() {
        let p0 = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
        let p1 = DVector::from_column_slice(&[1.0, 0.0, 1.0]);
        let p2 = DVector::from_column_slice(&[0.0, 1.0, 1.0]);
        let n = hyperplane_normal(&[&p0, &p1, &p2], 1e-9).unwrap();
        assert!(n[0].abs() < 1e-12 && n[1].abs() < 1e-12);
        assert!((n[2].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn det_matches_expansion() {
        let mut a = vec![1.0, 2.0, 3.0, 0.0, 1.0, 4.0, 5.0, 6.0, 0.0];
        let d = det_small(&mut a, 3);
        assert!((d - 1.0).abs() < 1e-12);
    }
}
