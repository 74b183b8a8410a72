//! Shape distances and the comparison lemmas between them.
//!
//! delta_vol recenters both bodies, volume-normalizes the second to the
//! first, and measures the symmetric difference; delta_hom recenters and
//! takes log of the product of the two smallest enclosing-homothety factors
//! (clamped at zero, since the product is at least one for centered bodies).
//! The lemma checks report one of three states: VERIFIED when hypotheses
//! hold and the conclusion does, HYPOTHESIS_NOT_MET, or VIOLATED.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::report::Json;

/// Volume of the symmetric difference in the given positions.
pub fn symmetric_difference_volume(k: &Polytope, q: &Polytope) -> Result<f64> {
    // Containment makes the overlap one of the inputs; skipping the
    // intersection there also sidesteps its worst conditioning, which is
    // exactly the near-identical case.
    let scale = 1e-12
        * k.vertices()
            .iter()
            .chain(q.vertices())
            .map(|v| v.amax())
            .fold(1.0f64, f64::max);
    let overlap = if k.contains_polytope(q, scale) {
        q.volume()
    } else if q.contains_polytope(k, scale) {
        k.volume()
    } else {
        match k.intersect(q) {
            Ok(i) => i.volume(),
            Err(Error::EmptyIntersection) => 0.0,
            Err(e) => return Err(e),
        }
    };
    Ok(k.volume() + q.volume() - 2.0 * overlap)
}

/// Smallest t with K inside t * M, both with centroids at the origin;
/// computed as the max gauge of K's vertices in M.
fn enclosing_factor(outer: &Polytope, inner: &Polytope) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for v in inner.vertices() {
        worst = worst.max(outer.gauge(v)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct ShapeDistanceReport {
    pub delta_vol: f64,
    pub delta_hom: f64,
    /// Scale applied to the second body inside delta_vol.
    pub t_used: f64,
    /// Enclosing factor of recentered M' around K'.
    pub alpha: f64,
    /// Enclosing factor of recentered K' around M'.
    pub beta: f64,
}

/// Volume distance: recenter both, scale the second to equal volume, then
/// relative symmetric difference.
pub fn delta_vol(k: &Polytope, m: &Polytope) -> Result<f64> {
    if k.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            left: k.dim(),
            right: m.dim(),
        });
    }
    let kc = k.translate_to_centroid();
    let mc = m.translate_to_centroid();
    let t = (m.volume() / k.volume()).powf(1.0 / k.dim() as f64);
    let kt = kc.scale(t);
    Ok(symmetric_difference_volume(&mc, &kt)? / m.volume())
}

/// Homothety distance: recenter both, then log of the product of mutual
/// enclosing factors, clamped at zero.
pub fn delta_hom(k: &Polytope, m: &Polytope) -> Result<f64> {
    Ok(shape_distance_report(k, m)?.delta_hom)
}

pub fn shape_distance_report(k: &Polytope, m: &Polytope) -> Result<ShapeDistanceReport> {
    if k.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            left: k.dim(),
            right: m.dim(),
        });
    }
    let kc = k.translate_to_centroid();
    let mc = m.translate_to_centroid();
    let alpha = enclosing_factor(&kc, &mc)?;
    let beta = enclosing_factor(&mc, &kc)?;
    Ok(ShapeDistanceReport {
        delta_vol: delta_vol(k, m)?,
        delta_hom: (alpha * beta).ln().max(0.0),
        t_used: (m.volume() / k.volume()).powf(1.0 / k.dim() as f64),
        alpha,
        beta,
    })
}

/// K - K, the difference body.
pub fn difference_body(k: &Polytope) -> Result<Polytope> {
    k.minkowski_sum(&k.reflect_origin())
}

/// Gauge of x in K - K.
pub fn difference_body_gauge(k: &Polytope, x: &DVector<f64>) -> Result<f64> {
    difference_body(k)?.gauge(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaStatus {
    Verified,
    HypothesisNotMet,
    Violated,
}

impl LemmaStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaStatus::Verified => "VERIFIED",
            LemmaStatus::HypothesisNotMet => "HYPOTHESIS_NOT_MET",
            LemmaStatus::Violated => "VIOLATED",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LemmaCheck {
    pub status: LemmaStatus,
    /// Relevant smallness parameter (volume fraction or distance).
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs - lhs; the conclusion needs this to be nonnegative.
    pub slack: f64,
}

fn conclude(hypothesis_ok: bool, t: f64, lhs: f64, rhs: f64, tol_abs: f64) -> LemmaCheck {
    let slack = rhs - lhs;
    let status = if !hypothesis_ok {
        LemmaStatus::HypothesisNotMet
    } else if slack >= -tol_abs {
        LemmaStatus::Verified
    } else {
        LemmaStatus::Violated
    };
    LemmaCheck {
        status,
        t,
        lhs,
        rhs,
        slack,
    }
}

const CHECK_EPS: f64 = 1e-9;

/// Near-subset containment bound: for centered K and Q inside K losing
/// volume fraction t < 1/e, the shrunken copy (1 - (e t)^(1/n)) K sits
/// inside Q. lhs is the worst gauge of the shrunken vertices in Q.
pub fn check_subset_containment(k: &Polytope, q: &Polytope) -> Result<LemmaCheck> {
    let n = k.dim() as f64;
    let centered = k.centroid().norm() <= 1e-8;
    let q_inside = enclosing_factor(k, q)? <= 1.0 + CHECK_EPS;
    let t = 1.0 - q.intersect(k).map(|i| i.volume()).unwrap_or(0.0) / k.volume();
    let hyp = centered && q_inside && t > 1e-13 && t < 1.0 / std::f64::consts::E;
    if !hyp {
        return Ok(conclude(false, t, 0.0, 1.0, CHECK_EPS));
    }
    let lam = 1.0 - (std::f64::consts::E * t).powf(1.0 / n);
    let mut worst: f64 = 0.0;
    for v in k.vertices() {
        worst = worst.max(q.gauge(&(v * lam))?);
    }
    Ok(conclude(true, t, worst, 1.0, CHECK_EPS))
}

/// Symmetric-difference sandwich: for centered K and any Q with
/// t = vol(K sym-diff Q)/vol(K) below 1/(4^n e), the body Q is sandwiched
/// between (1 - (e t)^(1/n)) K and (1 + 4 (e t)^(1/n)) K.
pub fn check_symmdiff_sandwich(k: &Polytope, q: &Polytope) -> Result<LemmaCheck> {
    let n = k.dim() as f64;
    let centered = k.centroid().norm() <= 1e-8;
    let t = symmetric_difference_volume(k, q)? / k.volume();
    let cap = 1.0 / (4.0f64.powf(n) * std::f64::consts::E);
    let hyp = centered && t > 1e-13 && t < cap;
    if !hyp {
        return Ok(conclude(false, t, 0.0, 1.0, CHECK_EPS));
    }
    let r = (std::f64::consts::E * t).powf(1.0 / n);
    let inner = 1.0 - r;
    let outer = 1.0 + 4.0 * r;
    let mut worst: f64 = 0.0;
    for v in k.vertices() {
        worst = worst.max(q.gauge(&(v * inner))?);
    }
    for w in q.vertices() {
        worst = worst.max(k.gauge(w)? / outer);
    }
    Ok(conclude(true, t, worst, 1.0, CHECK_EPS))
}

/// delta_hom <= 12 delta_vol^(1/n) when delta_vol < 1/(4^n e).
pub fn check_hom_from_vol(k: &Polytope, q: &Polytope) -> Result<LemmaCheck> {
    let n = k.dim() as f64;
    let dv = delta_vol(k, q)?;
    let dh = delta_hom(k, q)?;
    let hyp = dv > 0.0 && dv < 1.0 / (4.0f64.powf(n) * std::f64::consts::E);
    Ok(conclude(hyp, dv, dh, 12.0 * dv.powf(1.0 / n), CHECK_EPS))
}

/// delta_vol <= 3 n delta_hom when delta_hom < 1/(2n).
pub fn check_vol_from_hom(k: &Polytope, q: &Polytope) -> Result<LemmaCheck> {
    let n = k.dim() as f64;
    let dv = delta_vol(k, q)?;
    let dh = delta_hom(k, q)?;
    let hyp = dh > 0.0 && dh < 1.0 / (2.0 * n);
    Ok(conclude(hyp, dh, dv, 3.0 * n * dh, CHECK_EPS))
}

/// vol(K sym-diff (x + K)) <= 2 n |x|_{K-K} vol(K); no hypothesis needed.
pub fn check_translate_bound(k: &Polytope, x: &DVector<f64>) -> Result<LemmaCheck> {
    let n = k.dim() as f64;
    let shifted = k.translate(x);
    let sd = symmetric_difference_volume(k, &shifted)?;
    let norm = difference_body_gauge(k, x)?;
    let bound = 2.0 * n * norm * k.volume();
    Ok(conclude(true, norm, sd, bound, CHECK_EPS * k.volume().max(1.0)))
}

/// Centroid drift: for centered K and t = vol(K sym-diff Q)/vol(K) below
/// 1/(4^n e), the centroid of Q satisfies |c(Q)|_{K-K} <= 4 n t and
/// delta_vol(K, Q) <= 9 n^2 t. The slack is the minimum of the two margins.
pub fn check_centroid_drift(k: &Polytope, q: &Polytope) -> Result<LemmaCheck> {
    let n = k.dim() as f64;
    let centered = k.centroid().norm() <= 1e-8;
    let t = symmetric_difference_volume(k, q)? / k.volume();
    let cap = 1.0 / (4.0f64.powf(n) * std::f64::consts::E);
    let hyp = centered && t > 1e-13 && t < cap;
    if !hyp {
        return Ok(conclude(false, t, 0.0, 1.0, CHECK_EPS));
    }
    let drift = difference_body_gauge(k, q.centroid())?;
    let dv = delta_vol(k, q)?;
    let slack_a = 4.0 * n * t - drift;
    let slack_b = 9.0 * n * n * t - dv;
    if slack_a <= slack_b {
        Ok(conclude(true, t, drift, 4.0 * n * t, CHECK_EPS))
    } else {
        Ok(conclude(true, t, dv, 9.0 * n * n * t, CHECK_EPS))
    }
}

#[derive(Debug, Clone)]
pub struct LemmaSuiteReport {
    pub subset_containment: LemmaCheck,
    pub symmdiff_sandwich: LemmaCheck,
    pub hom_from_vol: LemmaCheck,
    pub vol_from_hom: LemmaCheck,
    pub translate_bound: LemmaCheck,
    pub centroid_drift: LemmaCheck,
}

/// Runs every comparison lemma on the pair (K, Q) plus the translate bound
/// on a deterministic sample shift.
pub fn lemma_suite(k: &Polytope, q: &Polytope) -> Result<LemmaSuiteReport> {
    let scale = k
        .vertices()
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    let mut x = DVector::zeros(k.dim());
    x[0] = 0.01 * scale;
    Ok(LemmaSuiteReport {
        subset_containment: check_subset_containment(k, q)?,
        symmdiff_sandwich: check_symmdiff_sandwich(k, q)?,
        hom_from_vol: check_hom_from_vol(k, q)?,
        vol_from_hom: check_vol_from_hom(k, q)?,
        translate_bound: check_translate_bound(k, &x)?,
        centroid_drift: check_centroid_drift(k, q)?,
    })
}

pub fn lemma_check_json(c: &LemmaCheck) -> Json {
    Json::obj(vec![
        ("status", Json::Str(c.status.as_str().to_string())),
        ("t", Json::Num(c.t)),
        ("lhs", Json::Num(c.lhs)),
        ("rhs", Json::Num(c.rhs)),
        ("slack", Json::Num(c.slack)),
    ])
}

pub fn lemma_suite_json(r: &LemmaSuiteReport) -> Json {
    Json::obj(vec![
        ("subset_containment", lemma_check_json(&r.subset_containment)),
        ("symmdiff_sandwich", lemma_check_json(&r.symmdiff_sandwich)),
        ("hom_from_vol", lemma_check_json(&r.hom_from_vol)),
        ("vol_from_hom", lemma_check_json(&r.vol_from_hom)),
        ("translate_bound", lemma_check_json(&r.translate_bound)),
        ("centroid_drift", lemma_check_json(&r.centroid_drift)),
    ])
}

pub fn distance_report_json(r: &ShapeDistanceReport) -> Json {
    Json::obj(vec![
        ("delta_vol", Json::Num(r.delta_vol)),
        ("delta_hom", Json::Num(r.delta_hom)),
        ("t_used", Json::Num(r.t_used)),
        ("alpha", Json::Num(r.alpha)),
        ("beta", Json::Num(r.beta)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::bodies::{cross_polytope, cube};

    #[test]
    fn square_diamond_distances() {
        let square = cube(2, 1.0).unwrap();
        let diamond = cross_polytope(2).unwrap();
        let rep = shape_distance_report(&square, &diamond).unwrap();
        assert!((rep.delta_hom - (2.0f64).ln()).abs() < 1e-13);
        assert!((rep.delta_vol - (6.0 - 4.0 * (2.0f64).sqrt())).abs() < 1e-11);
    }

    #[test]
    fn distances_vanish_on_homothets() {
        let k = cube(3, 1.0).unwrap();
        let q = k.scale(2.5).translate(&DVector::from_column_slice(&[0.3, -0.1, 0.2]));
        assert!(delta_hom(&k, &q).unwrap() < 1e-12);
        assert!(delta_vol(&k, &q).unwrap() < 1e-10);
    }

    #[test]
    fn hom_is_symmetric() {
        let k = cube(2, 1.0).unwrap();
        let q = cross_polytope(2).unwrap().scale(1.3);
        let d1 = delta_hom(&k, &q).unwrap();
        let d2 = delta_hom(&q, &k).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn subset_containment_on_shrunken_cube() {
        let k = cube(3, 1.0).unwrap();
        let q = k.scale(0.97);
        let check = check_subset_containment(&k, &q).unwrap();
        assert_eq!(check.status, LemmaStatus::Verified);
        // t = 1 - 0.97^3.
        assert!((check.t - (1.0 - 0.97f64.powi(3))).abs() < 1e-12);
    }

    #[test]
    fn translate_bound_on_cube() {
        let k = cube(3, 1.0).unwrap();
        let x = DVector::from_column_slice(&[0.01, 0.0, 0.0]);
        let check = check_translate_bound(&k, &x).unwrap();
        assert_eq!(check.status, LemmaStatus::Verified);
        // Slab of width 0.01 on each side: sym diff 2 * 0.01 * 4 = 0.08;
        // bound 2 * 3 * (0.01/2) * 8 = 0.24.
        assert!((check.lhs - 0.08).abs() < 1e-10);
        assert!((check.rhs - 0.24).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_gates_report() {
        let k = cube(2, 1.0).unwrap();
        // Way too different: t beyond every cap.
        let q = cube(2, 1.0).unwrap().scale(0.2);
        let check = check_symmdiff_sandwich(&k, &q).unwrap();
        assert_eq!(check.status, LemmaStatus::HypothesisNotMet);
    }
}
