//! Command line front end. Every subcommand reads JSON files, prints one
//! JSON report (or CSV for trend families) to stdout, and encodes its
//! verdict in the exit code: 0 verified/holds, 2 input error, 3 inequality
//! violated, 4 no convergence. Diagnostics go to stderr.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use conevol::io::{self, BodyOrMeasureInput, PolytopeInput, SubspaceInput};
use conevol::isotropic::{self, IsotropyOptions};
use conevol::report::Json;
use conevol::{
    acceptance, corpus, measure, metrics, probes, scc, sections, transforms, ufunc,
};
use conevol::{DiscreteSphericalMeasure, Error, Polytope, Result, Subspace, Tolerances};

#[derive(Parser)]
#[command(
    name = "conevol",
    version,
    about = "Cone-volume measures of convex polytopes: concentration checks, \
             moment functionals, isotropic positions, shape distances, section \
             profiles, and stability probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the subspace concentration condition of a measure, or of a
    /// polytope's cone-volume measure
    CheckScc {
        /// Measure JSON {"dim", "atoms"} or polytope JSON {"dim", "vertices"}
        input: PathBuf,
    },
    /// Print the cone-volume measure of a polytope
    Cvm {
        /// Polytope JSON {"dim", "vertices"}
        input: PathBuf,
    },
    /// Evaluate the U-functional against its volume lower bound
    UFunctional {
        /// Measure or polytope JSON; a bare measure uses its total mass as
        /// the volume in the bound
        input: PathBuf,
        /// Also gate the exit code on the sigma chain between consecutive
        /// moment functionals
        #[arg(long)]
        sigma_chain: bool,
    },
    /// Drive a measure (or a polytope, through its cone-volume measure) to
    /// isotropic position by the normalized fixed-point iteration
    Isotropize {
        /// Measure or polytope JSON
        input: PathBuf,
        /// Convergence threshold on the Frobenius residual; defaults to
        /// 1e-10 for measures and 1e-8 for bodies
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Step fraction in (0, 1]; applies to measure inputs only
        #[arg(long)]
        damping: Option<f64>,
    },
    /// Volume-difference and homothety distances between two polytopes
    Distance {
        a: PathBuf,
        b: PathBuf,
        /// Also run the comparison lemma suite on the pair
        #[arg(long)]
        report_lemmas: bool,
    },
    /// Section-volume profile over a subspace with the divergence identity
    /// check and an optional level-set probe
    Sections {
        /// Polytope JSON
        input: PathBuf,
        /// Subspace JSON {"dim", "basis"}
        #[arg(long)]
        subspace: PathBuf,
        /// Grid cells per axis of the projection
        #[arg(long, default_value_t = 401)]
        resolution: usize,
        /// Level parameter for the log-ratio band probe
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Inequality verifiers for classical transforms
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Stability probes linking concentration slack to shape distances
    #[command(subcommand)]
    Probe(ProbeCommand),
    /// Write corpus files: canonical bodies, or seeded random polytopes
    GenCorpus(GenCorpusArgs),
    /// Run the full acceptance suite
    Acceptance {
        /// Also write the JSON report to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Centered-halfspace volume ratio against the 1/e bound
    Grunbaum {
        input: PathBuf,
        /// Single direction as comma-separated coordinates; scans facet
        /// normals plus sampled directions when absent
        #[arg(long)]
        direction: Option<String>,
        /// Extra sampled directions for the scan
        #[arg(long, default_value_t = 64)]
        extra: usize,
    },
    /// Cone-volume mass of closed hemispheres against the 1/(2n) bound
    Hemisphere {
        input: PathBuf,
        /// Sampled directions in dimensions where chamber enumeration is
        /// not exhaustive
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Local refinement rounds around the sampled minimum
        #[arg(long, default_value_t = 3)]
        refine: usize,
    },
    /// Rounding to a body of revolution: slice radii, volume match, and
    /// concavity of the radial profile
    Schwarz {
        input: PathBuf,
        /// Axis as comma-separated coordinates
        #[arg(long)]
        axis: String,
        #[arg(long, default_value_t = 401)]
        resolution: usize,
    },
    /// Shake-down onto a hyperplane: volume preserved, centroid descends
    Shake {
        input: PathBuf,
        /// Direction as comma-separated coordinates
        #[arg(long)]
        direction: String,
        #[arg(long, default_value_t = 401)]
        resolution: usize,
    },
    /// Minkowski first-inequality stability for a pair of bodies
    Minkowski { a: PathBuf, b: PathBuf },
}

#[derive(Subcommand)]
enum ProbeCommand {
    /// Concentration slack of a subspace against volume and homothety
    /// distances to the nearest compatible cylinder
    Scc {
        /// Polytope JSON; required unless --family is given
        input: Option<PathBuf>,
        /// Subspace JSON; defaults to the worst concentration candidate
        /// (single body) or the prism generator axis (family runs)
        #[arg(long)]
        subspace: Option<PathBuf>,
        /// Family JSON {"name", "taus"?}; emits a CSV trend instead of a
        /// single report
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// U-functional excess against parallelepiped coverage
    U {
        /// Polytope JSON; required unless --family is given
        input: Option<PathBuf>,
        /// Family JSON {"name", "taus"?}; emits a CSV trend
        #[arg(long)]
        family: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenCorpusArgs {
    #[arg(long, default_value = "corpus")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0x5EED)]
    seed: u64,
    /// Ambient dimension for random bodies, 2 through 6
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Random bodies to write; 0 writes the canonical bodies and the
    /// skewed witness measure instead
    #[arg(long, default_value_t = 0)]
    count: usize,
}

/// Families available to `probe --family`, keyed by the "name" field.
#[derive(Deserialize)]
struct FamilyInput {
    name: String,
    taus: Option<Vec<f64>>,
}

fn main() {
    conevol::par::configure_threads_from_env();
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("conevol: {}", e);
            exit_code_for(&e)
        }
    };
    std::process::exit(code);
}

/// Non-zero only for failures; inequality verdicts come back as Ok(0|3).
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::SupportDegenerate { .. } => 4,
        _ => 2,
    }
}

fn run(cmd: Command) -> Result<i32> {
    let tol = Tolerances::DEFAULT;
    match cmd {
        Command::CheckScc { input } => {
            let mu = load_measure_like(&input, &tol)?;
            let report = scc::check_concentration(&mu, &tol)?;
            emit(&scc::report_json(&report));
            Ok(if report.holds { 0 } else { 3 })
        }
        Command::Cvm { input } => {
            let body = load_polytope(&input)?;
            let mu = measure::cone_volume_measure_with(&body, &tol)?;
            emit(&mu.to_json());
            Ok(0)
        }
        Command::UFunctional { input, sigma_chain } => {
            let (mu, volume) = match load_body_or_measure(&input)? {
                Loaded::Measure(mu) => {
                    let volume = mu.total_mass();
                    (mu, volume)
                }
                Loaded::Body(body) => {
                    (measure::cone_volume_measure_with(&body, &tol)?, body.volume())
                }
            };
            let report = ufunc::u_ratio_report(&mu, volume, &tol)?;
            emit(&ufunc::report_json(&report));
            let mut ok = report.slack >= -1e-9 * report.lower_bound.abs().max(1.0);
            if sigma_chain {
                for row in &report.chain {
                    if row.slack < -1e-9 * row.rhs.abs().max(1e-300) {
                        ok = false;
                    }
                }
            }
            Ok(if ok { 0 } else { 3 })
        }
        Command::Isotropize {
            input,
            tol: threshold,
            max_iter,
            damping,
        } => run_isotropize(&input, threshold, max_iter, damping, &tol),
        Command::Distance { a, b, report_lemmas } => {
            let ka = load_polytope(&a)?;
            let kb = load_polytope(&b)?;
            let report = metrics::shape_distance_report(&ka, &kb)?;
            if !report_lemmas {
                emit(&metrics::distance_report_json(&report));
                return Ok(0);
            }
            let suite = metrics::lemma_suite(&ka, &kb)?;
            emit(&Json::obj(vec![
                ("distance", metrics::distance_report_json(&report)),
                ("lemmas", metrics::lemma_suite_json(&suite)),
            ]));
            let violated = [
                &suite.subset_containment,
                &suite.symmdiff_sandwich,
                &suite.hom_from_vol,
                &suite.vol_from_hom,
                &suite.translate_bound,
                &suite.centroid_drift,
            ]
            .iter()
            .any(|c| c.status == metrics::LemmaStatus::Violated);
            Ok(if violated { 3 } else { 0 })
        }
        Command::Sections {
            input,
            subspace,
            resolution,
            eta,
        } => {
            let body = load_polytope(&input)?;
            let base = load_subspace(&subspace)?;
            let profile = sections::build_profile(&body, &base, resolution, &tol)?;
            let divergence = sections::divergence_identity_check(&body, &base, resolution, &tol)?;
            let mut ok = divergence.grad_ok;
            let mut fields = vec![
                ("profile", sections::profile_summary_json(&profile)),
                ("divergence", sections::divergence_report_json(&divergence)),
            ];
            if let Some(eta) = eta {
                let probe = sections::eta_level_probe(&body, &base, eta, resolution, &tol)?;
                if !probe.grad_ok || probe.ratio_band_ok == Some(false) {
                    ok = false;
                }
                fields.push(("eta", sections::eta_report_json(&probe)));
            }
            emit(&Json::obj(fields));
            Ok(if ok { 0 } else { 3 })
        }
        Command::Verify(v) => run_verify(v, &tol),
        Command::Probe(p) => run_probe(p, &tol),
        Command::GenCorpus(args) => run_gen_corpus(&args, &tol),
        Command::Acceptance { out } => {
            let report = acceptance::run_all(&tol);
            for row in &report.criteria {
                eprintln!(
                    "criterion {:2} {}: {}",
                    row.index,
                    row.name,
                    if row.passed { "PASS" } else { "FAIL" }
                );
            }
            let json = acceptance::report_json(&report);
            emit(&json);
            if let Some(path) = out {
                write_text(&path, &json.to_pretty_string())?;
            }
            Ok(if report.all_passed { 0 } else { 3 })
        }
    }
}

fn run_isotropize(
    input: &Path,
    threshold: Option<f64>,
    max_iter: usize,
    damping: Option<f64>,
    tol: &Tolerances,
) -> Result<i32> {
    match load_body_or_measure(input)? {
        Loaded::Measure(mu) => {
            let opts = IsotropyOptions {
                tolerance: threshold.unwrap_or(1e-10),
                max_iter,
                damping: damping.unwrap_or(1.0),
            };
            let r = isotropic::isotropize(&mu, &opts, tol)?;
            emit(&Json::obj(vec![
                ("dim", Json::Int(mu.dim() as i64)),
                ("converged", Json::Bool(true)),
                ("iterations", Json::Int(r.iterations as i64)),
                ("residual", Json::Num(r.residual)),
                ("transform", matrix_rows_json(&r.transform)),
                (
                    "residual_trace",
                    Json::nums(r.residual_trace.iter().copied()),
                ),
                ("normalized_measure", r.normalized_measure.to_json()),
            ]));
        }
        Loaded::Body(body) => {
            if damping.is_some() {
                eprintln!("conevol: note: --damping applies to measure inputs only");
            }
            let r = isotropic::isotropic_position_body(
                &body,
                threshold.unwrap_or(1e-8),
                max_iter,
                tol,
            )?;
            emit(&Json::obj(vec![
                ("dim", Json::Int(body.dim() as i64)),
                ("converged", Json::Bool(true)),
                ("iterations", Json::Int(r.iterations as i64)),
                ("residual", Json::Num(r.residual)),
                ("transform", matrix_rows_json(&r.transform)),
                (
                    "residual_trace",
                    Json::nums(r.residual_trace.iter().copied()),
                ),
                ("body", r.body.to_json()),
            ]));
        }
    }
    Ok(0)
}

fn run_verify(cmd: VerifyCommand, tol: &Tolerances) -> Result<i32> {
    match cmd {
        VerifyCommand::Grunbaum {
            input,
            direction,
            extra,
        } => {
            let body = load_polytope(&input)?;
            if let Some(text) = direction {
                let v = parse_direction(&text, body.dim())?;
                let ratio = transforms::grunbaum_ratio(&body, &v, tol)?;
                let bound = (-1.0f64).exp();
                let slack = ratio - bound;
                let ok = slack >= -1e-9;
                emit(&Json::obj(vec![
                    ("dim", Json::Int(body.dim() as i64)),
                    ("direction", Json::nums(v.iter().copied())),
                    ("ratio", Json::Num(ratio)),
                    ("bound", Json::Num(bound)),
                    ("slack", Json::Num(slack)),
                    ("ok", Json::Bool(ok)),
                ]));
                return Ok(if ok { 0 } else { 3 });
            }
            let scan = transforms::grunbaum_scan(&body, extra, tol)?;
            emit(&transforms::grunbaum_json(&scan));
            Ok(if scan.ok { 0 } else { 3 })
        }
        VerifyCommand::Hemisphere {
            input,
            samples,
            refine,
        } => {
            let body = load_polytope(&input)?;
            let scan = transforms::hemisphere_scan(&body, samples, refine, tol)?;
            emit(&transforms::hemisphere_json(&scan));
            Ok(if scan.ok { 0 } else { 3 })
        }
        VerifyCommand::Schwarz {
            input,
            axis,
            resolution,
        } => {
            let body = load_polytope(&input)?;
            let v = parse_direction(&axis, body.dim())?;
            let r = transforms::schwarz_rounding(&body, &v, resolution, tol)?;
            emit(&transforms::schwarz_json(&r));
            Ok(if r.concavity_ok { 0 } else { 3 })
        }
        VerifyCommand::Shake {
            input,
            direction,
            resolution,
        } => {
            let body = load_polytope(&input)?;
            let v = parse_direction(&direction, body.dim())?;
            let r = transforms::shake_down(&body, &v, resolution, tol)?;
            emit(&transforms::shake_json(&r));
            Ok(if r.centroid_shift >= -1e-9 { 0 } else { 3 })
        }
        VerifyCommand::Minkowski { a, b } => {
            let ka = load_polytope(&a)?;
            let kb = load_polytope(&b)?;
            let r = transforms::minkowski_stability_check(&ka, &kb, tol)?;
            emit(&transforms::minkowski_json(&r));
            Ok(if r.ok { 0 } else { 3 })
        }
    }
}

fn run_probe(cmd: ProbeCommand, tol: &Tolerances) -> Result<i32> {
    match cmd {
        ProbeCommand::Scc {
            input,
            subspace,
            family,
        } => {
            if let Some(path) = family {
                let fam = build_family(&path)?;
                let l = match subspace {
                    Some(p) => load_subspace(&p)?,
                    // The shipped families taper a prism along its third
                    // axis; that generator line is the natural default.
                    None => {
                        let dim = fam[0].1.dim();
                        let mut e = DVector::zeros(dim);
                        e[dim - 1] = 1.0;
                        Subspace::line(&e)?
                    }
                };
                let series = probes::scc_trend(&fam, &l, tol)?;
                print!("{}", probes::trend_csv(&series));
                return Ok(0);
            }
            let body = load_polytope(&require_input(input.as_deref())?)?;
            let l = match subspace {
                Some(p) => load_subspace(&p)?,
                None => worst_candidate_subspace(&body, tol)?,
            };
            let r = probes::scc_stability_probe(&body, &l, tol)?;
            emit(&probes::scc_probe_json(&r));
            Ok(0)
        }
        ProbeCommand::U { input, family } => {
            if let Some(path) = family {
                let fam = build_family(&path)?;
                let series = probes::u_trend(&fam, tol)?;
                print!("{}", probes::trend_csv(&series));
                return Ok(0);
            }
            let body = load_polytope(&require_input(input.as_deref())?)?;
            let r = probes::u_stability_probe(&body, tol)?;
            emit(&probes::u_probe_json(&r));
            Ok(0)
        }
    }
}

fn run_gen_corpus(args: &GenCorpusArgs, tol: &Tolerances) -> Result<i32> {
    if !(2..=6).contains(&args.n) {
        return Err(Error::InvalidInput(format!(
            "dimension {} outside the supported range 2..=6",
            args.n
        )));
    }
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::InvalidInput(format!("{}: {}", args.out_dir.display(), e)))?;
    let mut written = 0usize;
    if args.count == 0 {
        for entry in corpus::canonical_bodies(tol)? {
            write_text(
                &args.out_dir.join(format!("{}.json", entry.name)),
                &entry.body.to_json().to_pretty_string(),
            )?;
            written += 1;
        }
        let witness = corpus::skewed_witness_measure();
        write_text(
            &args.out_dir.join("skewed-measure.json"),
            &witness.to_json().to_pretty_string(),
        )?;
        written += 1;
    } else {
        for entry in corpus::random_bodies(args.n, args.count, args.seed, tol)? {
            write_text(
                &args.out_dir.join(format!("{}.json", entry.name)),
                &entry.body.to_json().to_pretty_string(),
            )?;
            written += 1;
        }
    }
    eprintln!("wrote {} files to {}", written, args.out_dir.display());
    Ok(0)
}

enum Loaded {
    Measure(DiscreteSphericalMeasure),
    Body(Polytope),
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {}", path.display(), e)))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {}", path.display(), e)))
}

fn load_polytope(path: &Path) -> Result<Polytope> {
    let input: PolytopeInput = io::parse_json(&read_input(path)?, "polytope")?;
    io::polytope_from_input(&input)
}

fn load_subspace(path: &Path) -> Result<Subspace> {
    let input: SubspaceInput = io::parse_json(&read_input(path)?, "subspace")?;
    io::subspace_from_input(&input)
}

fn load_body_or_measure(path: &Path) -> Result<Loaded> {
    let input: BodyOrMeasureInput = io::parse_json(&read_input(path)?, "measure or polytope")?;
    Ok(match input {
        BodyOrMeasureInput::Measure(m) => Loaded::Measure(io::measure_from_input(&m)?),
        BodyOrMeasureInput::Polytope(p) => Loaded::Body(io::polytope_from_input(&p)?),
    })
}

/// Measure input passes through; a polytope is replaced by its cone-volume
/// measure.
fn load_measure_like(path: &Path, tol: &Tolerances) -> Result<DiscreteSphericalMeasure> {
    match load_body_or_measure(path)? {
        Loaded::Measure(mu) => Ok(mu),
        Loaded::Body(body) => measure::cone_volume_measure_with(&body, tol),
    }
}

fn require_input(input: Option<&Path>) -> Result<PathBuf> {
    input
        .map(Path::to_path_buf)
        .ok_or_else(|| Error::InvalidInput("a polytope file is required without --family".into()))
}

fn parse_direction(text: &str, dim: usize) -> Result<DVector<f64>> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad coordinate {:?}", part)))
        })
        .collect::<Result<_>>()?;
    if coords.len() != dim {
        return Err(Error::InvalidInput(format!(
            "direction has {} coordinates, the body lives in dimension {}",
            coords.len(),
            dim
        )));
    }
    Ok(DVector::from_vec(coords))
}

fn build_family(path: &Path) -> Result<Vec<(f64, Polytope)>> {
    let input: FamilyInput = io::parse_json(&read_input(path)?, "family")?;
    let taus = input
        .taus
        .unwrap_or_else(|| corpus::TREND_TAUS.to_vec());
    if taus.is_empty() {
        return Err(Error::InvalidInput("family needs at least one tau".into()));
    }
    let mut fam = Vec::with_capacity(taus.len());
    for &tau in &taus {
        let body = match input.name.as_str() {
            "taper-prism" => corpus::taper_prism(tau)?,
            "corner-truncated-cube" => corpus::corner_truncated_cube(tau)?,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown family {:?}; expected taper-prism or corner-truncated-cube",
                    other
                )))
            }
        };
        fam.push((tau, body));
    }
    Ok(fam)
}

/// Default probe subspace: the concentration candidate with the least slack.
fn worst_candidate_subspace(body: &Polytope, tol: &Tolerances) -> Result<Subspace> {
    let mu = measure::cone_volume_measure_with(body, tol)?;
    let report = scc::check_concentration(&mu, tol)?;
    let basis: Vec<DVector<f64>> = report
        .worst
        .basis
        .iter()
        .map(|row| DVector::from_vec(row.clone()))
        .collect();
    Subspace::from_spanning(body.dim(), &basis, tol)
}

fn matrix_rows_json(m: &DMatrix<f64>) -> Json {
    Json::Arr(
        m.row_iter()
            .map(|row| Json::nums(row.iter().copied()))
            .collect(),
    )
}

fn emit(json: &Json) {
    print!("{}", json.to_pretty_string());
}
