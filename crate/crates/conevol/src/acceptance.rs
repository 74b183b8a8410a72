//! End-to-end acceptance suite. Each criterion runs independently, never
//! panics the suite, and reports a pass flag plus a small detail object.
//! The final criterion reruns the whole suite under thread counts 1 and 8
//! and compares the rendered reports byte for byte.

use std::time::Instant;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{self, CORPUS_SEED};
use crate::error::{Error, Result};
use crate::geom::bodies::{cross_polytope, cube, random_centered, regular_simplex};
use crate::geom::Polytope;
use crate::isotropic;
use crate::measure::cone_volume_measure_with;
use crate::metrics::{self, LemmaCheck, LemmaStatus};
use crate::par;
use crate::probes;
use crate::report::Json;
use crate::scc;
use crate::sections;
use crate::subspace::Subspace;
use crate::tol::Tolerances;
use crate::transforms;
use crate::ufunc;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: Json,
}

#[derive(Debug, Clone)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
    pub all_passed: bool,
}

fn guard(
    index: usize,
    name: &'static str,
    f: impl FnOnce() -> Result<(bool, Json)>,
) -> CriterionResult {
    match f() {
        Ok((passed, details)) => CriterionResult {
            index,
            name,
            passed,
            details,
        },
        Err(e) => CriterionResult {
            index,
            name,
            passed: false,
            details: Json::obj(vec![("error", Json::Str(e.to_string()))]),
        },
    }
}

fn criterion_1(tol: &Tolerances) -> CriterionResult {
    guard(1, "cone-volume totals match volumes on the corpus", || {
        let start = Instant::now();
        let corpus = corpus::standard_corpus(tol)?;
        let errs: Vec<f64> = par::map_slice(&corpus, |e| {
            match cone_volume_measure_with(&e.body, tol) {
                Ok(mu) => (mu.total_mass() - e.body.volume()).abs() / e.body.volume(),
                Err(_) => f64::INFINITY,
            }
        });
        let worst = errs.iter().copied().fold(0.0f64, f64::max);
        let runtime_ok = start.elapsed().as_secs_f64() < 10.0;
        let passed = worst <= 1e-10 && corpus.len() >= 120 && runtime_ok;
        Ok((
            passed,
            Json::obj(vec![
                ("bodies", Json::Int(corpus.len() as i64)),
                ("worst_relative_error", Json::Num(worst)),
                ("runtime_ok", Json::Bool(runtime_ok)),
            ]),
        ))
    })
}

fn criterion_2(tol: &Tolerances) -> CriterionResult {
    guard(2, "simplex subspace masses equal d/(n+1)", || {
        let mut worst = 0.0f64;
        let mut rows = 0i64;
        for n in 2..=5usize {
            let s = regular_simplex(n)?;
            let mu = cone_volume_measure_with(&s, tol)?;
            let volume = s.volume();
            let normals: Vec<DVector<f64>> =
                s.facets().iter().map(|f| f.normal().clone()).collect();
            for d in 1..n {
                let l = Subspace::from_spanning(n, &normals[0..d], tol)?;
                let got = mu.subspace_mass(&l, tol) / volume;
                let want = d as f64 / (n as f64 + 1.0);
                worst = worst.max((got - want).abs());
                rows += 1;
            }
        }
        Ok((
            worst <= 1e-10,
            Json::obj(vec![
                ("cases", Json::Int(rows)),
                ("worst_absolute_error", Json::Num(worst)),
            ]),
        ))
    })
}

fn criterion_3(tol: &Tolerances) -> CriterionResult {
    guard(3, "concentration bound holds on the random sweep", || {
        let start = Instant::now();
        let mut bodies = corpus::concentration_batch(3, 500, tol)?;
        bodies.extend(corpus::concentration_batch(4, 200, tol)?);
        let outcomes: Vec<(bool, bool, usize)> = par::map_slice(&bodies, |b| {
            match cone_volume_measure_with(b, tol)
                .and_then(|mu| scc::check_concentration(&mu, tol))
            {
                Ok(rep) => {
                    let splits_ok = rep
                        .equality_cases
                        .iter()
                        .all(|e| e.split.as_ref().map(|s| s.ok).unwrap_or(false));
                    (rep.holds, splits_ok, rep.equality_cases.len())
                }
                Err(_) => (false, false, 0),
            }
        });
        let violations = outcomes.iter().filter(|(h, _, _)| !h).count();
        let splits_ok = outcomes.iter().all(|(_, s, _)| *s);
        let equalities: usize = outcomes.iter().map(|(_, _, e)| e).sum();
        let runtime_ok = start.elapsed().as_secs_f64() < 120.0;
        Ok((
            violations == 0 && splits_ok && runtime_ok,
            Json::obj(vec![
                ("bodies", Json::Int(bodies.len() as i64)),
                ("violations", Json::Int(violations as i64)),
                ("equality_cases", Json::Int(equalities as i64)),
                ("splits_ok", Json::Bool(splits_ok)),
                ("runtime_ok", Json::Bool(runtime_ok)),
            ]),
        ))
    })
}

fn criterion_4(tol: &Tolerances) -> CriterionResult {
    guard(4, "U-functional lower bound and sigma chain", || {
        let corpus = corpus::standard_corpus(tol)?;
        let reports: Vec<Result<(String, ufunc::URatioReport)>> =
            par::map_slice(&corpus, |e| {
                let mu = cone_volume_measure_with(&e.body, tol)?;
                Ok((
                    e.name.clone(),
                    ufunc::u_ratio_report(&mu, e.body.volume(), tol)?,
                ))
            });
        let mut worst_slack_rel = f64::INFINITY;
        let mut worst_pll_dev = 0.0f64;
        let mut pll_count = 0i64;
        let mut worst_chain_rel = f64::INFINITY;
        let mut named_pll_missing = 0i64;
        for r in reports {
            let (name, rep) = r?;
            worst_slack_rel = worst_slack_rel.min(rep.slack / rep.lower_bound);
            if rep.parallelepiped_support {
                worst_pll_dev = worst_pll_dev.max((rep.ratio - 1.0).abs());
                pll_count += 1;
            } else if name.starts_with("cube-")
                || name.starts_with("parallelepiped-")
                || name == "box-3"
            {
                named_pll_missing += 1;
            }
            for row in &rep.chain {
                worst_chain_rel = worst_chain_rel.min(row.slack / row.rhs.abs().max(1e-300));
            }
        }
        let tri = regular_simplex(2)?;
        let tri_mu = cone_volume_measure_with(&tri, tol)?;
        let tri_rep = ufunc::u_ratio_report(&tri_mu, tri.volume(), tol)?;
        let tri_dev = (tri_rep.ratio - (4.0f64 / 3.0).sqrt()).abs();
        let passed = worst_slack_rel >= -1e-9
            && worst_pll_dev <= 1e-9
            && pll_count >= 7
            && named_pll_missing == 0
            && tri_dev <= 1e-10
            && worst_chain_rel >= -1e-9;
        Ok((
            passed,
            Json::obj(vec![
                ("worst_slack_rel", Json::Num(worst_slack_rel)),
                ("parallelepipeds_detected", Json::Int(pll_count)),
                ("worst_parallelepiped_ratio_dev", Json::Num(worst_pll_dev)),
                ("triangle_ratio_dev", Json::Num(tri_dev)),
                ("worst_chain_slack_rel", Json::Num(worst_chain_rel)),
            ]),
        ))
    })
}

fn criterion_5(tol: &Tolerances) -> CriterionResult {
    guard(5, "isotropization converges and the witness fails", || {
        let corpus = corpus::standard_corpus(tol)?;
        let opts = isotropic::IsotropyOptions::default();
        let measure_runs: Vec<Result<Option<(usize, f64)>>> =
            par::map_slice(&corpus, |e| {
                let mu = cone_volume_measure_with(&e.body, tol)?;
                let rep = scc::check_concentration(&mu, tol)?;
                if !rep.holds || !rep.equality_cases.is_empty() {
                    return Ok(None);
                }
                let res = isotropic::isotropize(&mu, &opts, tol)?;
                Ok(Some((res.iterations, res.residual)))
            });
        let mut strict = 0i64;
        let mut worst_residual = 0.0f64;
        let mut worst_iters = 0usize;
        for r in measure_runs {
            if let Some((iters, resid)) = r? {
                strict += 1;
                worst_residual = worst_residual.max(resid);
                worst_iters = worst_iters.max(iters);
            }
        }

        let witness = corpus::skewed_witness_measure();
        let witness_rejected = match isotropic::isotropize(&witness, &opts, tol) {
            Err(Error::NoConvergence { diagnosis, .. }) => diagnosis.contains("dim 1"),
            _ => false,
        };

        let body_residuals: Vec<f64> = par::map_slice(&corpus, |e| {
            match isotropic::isotropic_position_body(&e.body, 1e-8, 500, tol) {
                Ok(r) => r.residual,
                Err(_) => f64::INFINITY,
            }
        });
        let worst_body = body_residuals.iter().copied().fold(0.0f64, f64::max);

        let passed = strict > 0
            && worst_residual <= 1e-10
            && worst_iters <= 500
            && witness_rejected
            && worst_body <= 1e-8;
        Ok((
            passed,
            Json::obj(vec![
                ("strict_measures", Json::Int(strict)),
                ("worst_measure_residual", Json::Num(worst_residual)),
                ("worst_measure_iterations", Json::Int(worst_iters as i64)),
                ("witness_rejected_with_diagnosis", Json::Bool(witness_rejected)),
                ("worst_body_residual", Json::Num(worst_body)),
            ]),
        ))
    })
}

fn divergence_bases(tol: &Tolerances) -> Result<Vec<Subspace>> {
    let e1 = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
    let e2 = DVector::from_column_slice(&[0.0, 1.0, 0.0]);
    Ok(vec![
        Subspace::line(&e1)?,
        Subspace::from_spanning(3, &[e1, e2], tol)?,
    ])
}

fn criterion_6(tol: &Tolerances) -> CriterionResult {
    guard(6, "divergence identity converges under refinement", || {
        let mut bodies = Vec::with_capacity(20);
        for i in 0..20usize {
            let mut rng =
                ChaCha8Rng::seed_from_u64(CORPUS_SEED.wrapping_add(0x0004_0000 + i as u64));
            bodies.push(random_centered(&mut rng, 3, 8 + i % 9)?);
        }
        let bases = divergence_bases(tol)?;
        let mut cases = Vec::new();
        for body in &bodies {
            for base in &bases {
                cases.push((body, base));
            }
        }
        let mismatches: Vec<Result<(f64, f64)>> = par::map_slice(&cases, |(body, base)| {
            let coarse = sections::divergence_identity_check(body, base, 401, tol)?;
            let fine = sections::divergence_identity_check(body, base, 801, tol)?;
            Ok((coarse.mismatch_rel, fine.mismatch_rel))
        });
        let mut worst_coarse = 0.0f64;
        let mut refinement_ok = true;
        for m in mismatches {
            let (coarse, fine) = m?;
            worst_coarse = worst_coarse.max(coarse);
            if fine > 0.6 * coarse + 1e-12 {
                refinement_ok = false;
            }
        }

        let cube_case =
            sections::divergence_identity_check(&cube(3, 1.0)?, &bases[0], 401, tol)?;
        let prism = corpus::canonical_bodies(tol)?
            .into_iter()
            .find(|e| e.name == "prism-triangle")
            .expect("canonical prism")
            .body;
        let axis = Subspace::line(&DVector::from_column_slice(&[0.0, 0.0, 1.0]))?;
        let prism_case = sections::divergence_identity_check(&prism, &axis, 401, tol)?;

        let passed = worst_coarse <= 0.01
            && refinement_ok
            && cube_case.mismatch_rel <= 1e-9
            && prism_case.mismatch_rel <= 1e-9;
        Ok((
            passed,
            Json::obj(vec![
                ("cases", Json::Int(cases.len() as i64)),
                ("worst_mismatch_at_401", Json::Num(worst_coarse)),
                ("refinement_ok", Json::Bool(refinement_ok)),
                ("cube_mismatch", Json::Num(cube_case.mismatch_rel)),
                ("prism_mismatch", Json::Num(prism_case.mismatch_rel)),
            ]),
        ))
    })
}

fn criterion_7(tol: &Tolerances) -> CriterionResult {
    guard(7, "centered halfspace ratios stay above 1/e", || {
        let corpus = corpus::standard_corpus(tol)?;
        let mins: Vec<Result<f64>> = par::map_slice(&corpus, |e| {
            Ok(transforms::grunbaum_scan(&e.body, 64, tol)?.ratio_min)
        });
        let mut worst = f64::INFINITY;
        for m in mins {
            worst = worst.min(m?);
        }
        let bound = 1.0 / std::f64::consts::E;

        let mut worst_simplex_dev = 0.0f64;
        for n in [2usize, 3] {
            let s = regular_simplex(n)?;
            let u = s.facets()[0].normal().clone();
            let a = transforms::grunbaum_ratio(&s, &u, tol)?;
            let b = transforms::grunbaum_ratio(&s, &(-&u), tol)?;
            let want = (n as f64 / (n as f64 + 1.0)).powi(n as i32);
            worst_simplex_dev = worst_simplex_dev.max((a.min(b) - want).abs());
        }
        let passed = worst >= bound - 1e-9 && worst_simplex_dev <= 1e-10;
        Ok((
            passed,
            Json::obj(vec![
                ("corpus_min_ratio", Json::Num(worst)),
                ("bound", Json::Num(bound)),
                ("worst_simplex_deviation", Json::Num(worst_simplex_dev)),
            ]),
        ))
    })
}

fn criterion_8(tol: &Tolerances) -> CriterionResult {
    guard(8, "open hemispheres carry at least 1/(2n) of the mass", || {
        let corpus = corpus::standard_corpus(tol)?;
        let scans: Vec<Result<(f64, f64)>> = par::map_slice(&corpus, |e| {
            let scan = transforms::hemisphere_scan(&e.body, 64, 3, tol)?;
            Ok((scan.ratio_min, scan.bound))
        });
        let mut worst_slack = f64::INFINITY;
        for s in scans {
            let (ratio, bound) = s?;
            worst_slack = worst_slack.min(ratio - bound);
        }

        let prism = corpus::canonical_bodies(tol)?
            .into_iter()
            .find(|e| e.name == "prism-triangle")
            .expect("canonical prism")
            .body;
        let scan = transforms::hemisphere_scan(&prism, 0, 0, tol)?;
        let prism_equality = scan.equality_detected
            && (scan.ratio_min - 1.0 / 6.0).abs() <= 1e-6
            && scan.direction[2].abs() >= 1.0 - 1e-6;

        let passed = worst_slack >= -1e-9 && prism_equality;
        Ok((
            passed,
            Json::obj(vec![
                ("corpus_worst_slack", Json::Num(worst_slack)),
                ("prism_equality_detected", Json::Bool(prism_equality)),
                ("prism_ratio", Json::Num(scan.ratio_min)),
            ]),
        ))
    })
}

fn count_lemma_statuses(
    checks: &[&LemmaCheck],
    verified: &mut i64,
    violated: &mut i64,
) {
    for c in checks {
        match c.status {
            LemmaStatus::Verified => *verified += 1,
            LemmaStatus::Violated => *violated += 1,
            LemmaStatus::HypothesisNotMet => {}
        }
    }
}

fn criterion_9(tol: &Tolerances) -> CriterionResult {
    guard(9, "shape metrics and comparison bounds", || {
        let square = cube(2, 1.0)?;
        let diamond = cross_polytope(2)?;
        let hom_dev = (metrics::delta_hom(&square, &diamond)? - std::f64::consts::LN_2).abs();
        let vol_dev =
            (metrics::delta_vol(&square, &diamond)? - (6.0 - 4.0 * 2.0f64.sqrt())).abs();

        let mut bodies = Vec::with_capacity(200 + 2);
        for i in 0..202usize {
            let mut rng =
                ChaCha8Rng::seed_from_u64(CORPUS_SEED.wrapping_add(0x0003_0000 + i as u64));
            let b = random_centered(&mut rng, 3, 8 + i % 7)?;
            let t = b.volume().powf(-1.0 / 3.0);
            bodies.push(b.scale(t));
        }
        let idx: Vec<usize> = (0..200).collect();
        let tri_slacks: Vec<Result<f64>> = par::map_slice(&idx, |&i| {
            let a = &bodies[i];
            let b = &bodies[(i + 1) % bodies.len()];
            let c = &bodies[(i + 2) % bodies.len()];
            let ab = metrics::delta_hom(a, b)?;
            let bc = metrics::delta_hom(b, c)?;
            let ac = metrics::delta_hom(a, c)?;
            Ok(ab + bc - ac)
        });
        let mut worst_triangle = f64::INFINITY;
        for s in tri_slacks {
            worst_triangle = worst_triangle.min(s?);
        }

        let corpus = corpus::standard_corpus(tol)?;
        let suites: Vec<Result<(i64, i64)>> = par::map_slice(&corpus, |e| {
            let k = &e.body;
            let scale = k.vertices().iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            let mut shift = DVector::zeros(k.dim());
            shift[0] = 0.02 * scale;
            let pairs = [k.scale(0.995), k.intersect(&k.translate(&shift))?];
            let mut verified = 0i64;
            let mut violated = 0i64;
            for q in &pairs {
                let suite = metrics::lemma_suite(k, q)?;
                count_lemma_statuses(
                    &[
                        &suite.subset_containment,
                        &suite.symmdiff_sandwich,
                        &suite.hom_from_vol,
                        &suite.vol_from_hom,
                        &suite.translate_bound,
                        &suite.centroid_drift,
                    ],
                    &mut verified,
                    &mut violated,
                );
            }
            Ok((verified, violated))
        });
        let mut verified = 0i64;
        let mut violated = 0i64;
        for s in suites {
            let (ve, vi) = s?;
            verified += ve;
            violated += vi;
        }

        let passed = hom_dev <= 1e-12
            && vol_dev <= 1e-10
            && worst_triangle >= -1e-9
            && violated == 0
            && verified > 0;
        Ok((
            passed,
            Json::obj(vec![
                ("square_diamond_hom_dev", Json::Num(hom_dev)),
                ("square_diamond_vol_dev", Json::Num(vol_dev)),
                ("worst_triangle_slack", Json::Num(worst_triangle)),
                ("lemma_rows_verified", Json::Int(verified)),
                ("lemma_rows_violated", Json::Int(violated)),
            ]),
        ))
    })
}

fn criterion_10(tol: &Tolerances) -> CriterionResult {
    guard(10, "mixed volumes and the Minkowski inequality", || {
        let square = cube(2, 1.0)?;
        let diamond = cross_polytope(2)?;
        let mv = transforms::mixed_volume(&[&square, &diamond], &[1, 1], tol)?;
        let mv_dev = (mv - 4.0).abs();

        let mut pairs: Vec<(Polytope, Polytope)> = Vec::with_capacity(100);
        for i in 0..50usize {
            let mut rng =
                ChaCha8Rng::seed_from_u64(CORPUS_SEED.wrapping_add(0x0005_0000 + i as u64));
            let a = random_centered(&mut rng, 2, 5 + i % 4)?;
            let b = random_centered(&mut rng, 2, 5 + (i + 2) % 4)?;
            pairs.push((a, b));
        }
        for i in 0..50usize {
            let mut rng =
                ChaCha8Rng::seed_from_u64(CORPUS_SEED.wrapping_add(0x0006_0000 + i as u64));
            let a = random_centered(&mut rng, 3, 8 + i % 5)?;
            let b = random_centered(&mut rng, 3, 8 + (i + 3) % 5)?;
            pairs.push((a, b));
        }
        let epsilons: Vec<Result<f64>> = par::map_slice(&pairs, |(a, b)| {
            Ok(transforms::minkowski_stability_check(a, b, tol)?.epsilon)
        });
        let mut worst_eps = f64::INFINITY;
        for e in epsilons {
            worst_eps = worst_eps.min(e?);
        }

        let mut homothet_pairs: Vec<(Polytope, Polytope)> = Vec::new();
        for i in 0..10usize {
            let mut rng =
                ChaCha8Rng::seed_from_u64(CORPUS_SEED.wrapping_add(0x0007_0000 + i as u64));
            let a = random_centered(&mut rng, 3, 8 + i % 5)?;
            let lam = [0.5, 1.3, 2.0][i % 3];
            let b = a.scale(lam);
            homothet_pairs.push((a, b));
        }
        let hom_eps: Vec<Result<f64>> = par::map_slice(&homothet_pairs, |(a, b)| {
            Ok(transforms::minkowski_stability_check(a, b, tol)?.epsilon)
        });
        let mut worst_hom = 0.0f64;
        let mut hom_lower_ok = true;
        for e in hom_eps {
            let v = e?;
            worst_hom = worst_hom.max(v);
            if v < -1e-8 {
                hom_lower_ok = false;
            }
        }

        let passed = mv_dev <= 1e-10 && worst_eps >= -1e-8 && worst_hom <= 1e-10 && hom_lower_ok;
        Ok((
            passed,
            Json::obj(vec![
                ("square_diamond_dev", Json::Num(mv_dev)),
                ("pairs", Json::Int(pairs.len() as i64)),
                ("worst_epsilon", Json::Num(worst_eps)),
                ("worst_homothet_epsilon", Json::Num(worst_hom)),
            ]),
        ))
    })
}

fn criterion_11(tol: &Tolerances) -> CriterionResult {
    guard(11, "stability trends decay to the equality cases", || {
        let axis = Subspace::line(&DVector::from_column_slice(&[0.0, 0.0, 1.0]))?;
        let scc_series = probes::scc_trend(&corpus::scc_trend_family()?, &axis, tol)?;
        let u_series = probes::u_trend(&corpus::u_trend_family()?, tol)?;
        let series_ok = |s: &probes::TrendSeries| {
            s.epsilon_decreasing && s.companion_monotone && s.final_member_exact
        };
        let passed = series_ok(&scc_series) && series_ok(&u_series);
        Ok((
            passed,
            Json::obj(vec![
                ("concentration_family", probes::trend_json(&scc_series)),
                ("u_family", probes::trend_json(&u_series)),
            ]),
        ))
    })
}

/// Renders criteria 1 through 11 to the exact bytes compared by the
/// determinism check.
fn render_rows(rows: &[CriterionResult]) -> String {
    Json::arr(rows.iter().map(row_json)).to_pretty_string()
}

fn run_core(tol: &Tolerances) -> Vec<CriterionResult> {
    vec![
        criterion_1(tol),
        criterion_2(tol),
        criterion_3(tol),
        criterion_4(tol),
        criterion_5(tol),
        criterion_6(tol),
        criterion_7(tol),
        criterion_8(tol),
        criterion_9(tol),
        criterion_10(tol),
        criterion_11(tol),
    ]
}

pub fn row_json(r: &CriterionResult) -> Json {
    Json::obj(vec![
        ("criterion", Json::Int(r.index as i64)),
        ("name", Json::Str(r.name.to_string())),
        ("passed", Json::Bool(r.passed)),
        ("details", r.details.clone()),
    ])
}

pub fn report_json(r: &AcceptanceReport) -> Json {
    Json::obj(vec![
        ("criteria", Json::arr(r.criteria.iter().map(row_json))),
        ("all_passed", Json::Bool(r.all_passed)),
    ])
}

/// Runs every criterion. The determinism criterion reruns the first eleven
/// twice more, under eight worker threads and under one, and demands
/// byte-identical reports.
pub fn run_all(tol: &Tolerances) -> AcceptanceReport {
    let first = par::with_thread_count(8, || run_core(tol));
    let bytes_first = render_rows(&first);

    let second = par::with_thread_count(8, || run_core(tol));
    let serial = par::with_thread_count(1, || run_core(tol));
    let repeat_ok = render_rows(&second) == bytes_first;
    let threads_ok = render_rows(&serial) == bytes_first;

    let mut criteria = first;
    criteria.push(CriterionResult {
        index: 12,
        name: "byte-identical reports across runs and thread counts",
        passed: repeat_ok && threads_ok,
        details: Json::obj(vec![
            ("repeat_identical", Json::Bool(repeat_ok)),
            ("thread_count_identical", Json::Bool(threads_ok)),
        ]),
    });
    let all_passed = criteria.iter().all(|c| c.passed);
    AcceptanceReport {
        criteria,
        all_passed,
    }
}

/// Single pass without the determinism recomparison, for the CLI's quick
/// path and for the determinism check itself.
pub fn run_once(tol: &Tolerances) -> AcceptanceReport {
    let criteria = run_core(tol);
    let all_passed = criteria.iter().all(|c| c.passed);
    AcceptanceReport {
        criteria,
        all_passed,
    }
}
