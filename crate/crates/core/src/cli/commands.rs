use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{csv_table, emit, num, opt_num, Command, CutoffChoice, MapVariant, Params, Report, SystemChoice};
use crate::duality::ks::{
    ks_bracket_check, ks_casimir_residual, ks_energy_surface_residual, on_shell_upstairs_point, random_upstairs_point,
    ReducedCoordinate,
};
use crate::duality::{
    bohlin_map, bohlin_params, conserved_map_check, coulomb_surface_residual, magnetic_pullback_residual, BohlinParams,
};
use crate::dynamics::{conserved_drift, integrate, HamiltonianSystem, IntegratorConfig, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::geometry::CurvatureSign;
use crate::sampling::{random_phase_point, seeded};
use crate::schrodinger::{
    count_bound_coulomb_levels, count_bound_oscillator_levels, validate_coulomb, validate_oscillator, LevelReport,
};
use crate::spectra::{
    coulomb_nsigma_max, coulomb_spectrum, oscillator_bound_nmax, oscillator_degeneracy, oscillator_level,
    oscillator_nmax, spectral_duality_check, HalfInteger, NMax,
};
use crate::systems::{
    algebra_suite, calibrate_magnetic_shift, AlgebraSettings, CoulombModel, CurvedModel, PhasePoint, VortexCharge,
    CLOSING_SHIFT_COEFFICIENT,
};

const DEFAULT_ALPHA: f64 = 1.0;
const DEFAULT_RADIUS: f64 = 1.0;
const DEFAULT_GAMMA: f64 = 10.0;
/// Milder coupling for trajectories, whose default start would pass close to the centre at `DEFAULT_GAMMA`.
const DEFAULT_SIMULATE_GAMMA: f64 = 1.0;
const DEFAULT_T_END: f64 = 10.0;
const DEFAULT_GRID: usize = 4096;
const DEFAULT_SEED: u64 = 1;
/// Levels listed or validated when the spectrum has no cutoff.
const UNBOUNDED_LEVELS: u64 = 10;
const VALIDATED_SPHERE_LEVELS: u64 = 5;

pub const SURFACE_TOLERANCE: f64 = 1e-7;
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
pub const KS_BRACKET_TOLERANCE: f64 = 1e-9;
pub const KS_SURFACE_TOLERANCE: f64 = 1e-8;
pub const PULLBACK_TOLERANCE: f64 = 1e-9;
pub const CLOSURE_TOLERANCE: f64 = 1e-8;
pub const DICTIONARY_TOLERANCE: f64 = 1e-10;
pub const LEVEL_TOLERANCE: f64 = 1e-4;

pub(super) fn dispatch(command: Command, p: &Params) -> Result<bool> {
    match command {
        Command::Simulate => simulate(command, p),
        Command::Map { variant } => match variant {
            MapVariant::Bohlin => map_bohlin(command, p),
            MapVariant::Ks => map_ks(command, p),
            MapVariant::Magnetic => map_magnetic(command, p),
        },
        Command::Spectrum => spectrum(command, p),
        Command::Validate => validate(command, p),
        Command::Brackets => brackets(command, p),
    }
}

fn finish<T: Serialize>(command: Command, p: &Params, report: Report<T>) -> Result<bool> {
    emit(command, p, &report)?;
    Ok(report.passed)
}

fn oscillator_model(p: &Params) -> Result<CurvedModel> {
    let model = CurvedModel::oscillator(
        p.eps(),
        p.radius.unwrap_or(DEFAULT_RADIUS),
        p.alpha.unwrap_or(DEFAULT_ALPHA),
    )?;
    match p.b0 {
        Some(b0) if b0 != 0.0 => model.with_field(b0, CLOSING_SHIFT_COEFFICIENT),
        _ => Ok(model),
    }
}

fn coulomb_model(p: &Params, default_gamma: f64) -> Result<CoulombModel> {
    if p.epsilon == Some(CurvatureSign::Sphere) {
        return Err(invalid("epsilon", "the Coulomb system lives on the pseudosphere"));
    }
    CoulombModel::new(
        p.radius.unwrap_or(DEFAULT_RADIUS),
        p.gamma.unwrap_or(default_gamma),
        p.sigma.unwrap_or(VortexCharge::Zero),
    )
}

fn integrator(p: &Params) -> Result<IntegratorConfig> {
    let defaults = IntegratorConfig::default();
    let cfg = IntegratorConfig {
        dt: p.dt.unwrap_or(defaults.dt),
        t_end: p.t_end.unwrap_or(DEFAULT_T_END),
        method: p.method.unwrap_or(defaults.method),
        drift_budget: p.drift_budget.unwrap_or(defaults.drift_budget),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn start_point(p: &Params, coulomb: bool) -> PhasePoint {
    let (z, pi) = if coulomb {
        (Complex64::new(0.3, 0.0), Complex64::new(0.0, 1.0))
    } else {
        (Complex64::new(0.3, 0.1), Complex64::new(0.2, 0.6))
    };
    PhasePoint::new(p.z0.unwrap_or(z), p.pi0.unwrap_or(pi))
}

#[derive(Serialize)]
struct Drift {
    quantity: String,
    max_relative_drift: f64,
}

#[derive(Serialize)]
struct SimulateResult {
    system: SystemChoice,
    integrator: IntegratorConfig,
    status: &'static str,
    samples: usize,
    drifts: Vec<Drift>,
    trajectory: Trajectory,
}

/// The flag is false when the run exceeded the drift budget; domain exits
/// stay errors carrying the partial trajectory.
fn run_trajectory(sys: &dyn HamiltonianSystem, pt0: PhasePoint, cfg: &IntegratorConfig) -> Result<(Trajectory, bool)> {
    match integrate(sys, pt0, cfg) {
        Ok(traj) => Ok((traj, true)),
        Err(Error::DriftBudgetExceeded { trajectory, .. }) => Ok((*trajectory, false)),
        Err(e) => Err(e),
    }
}

fn simulate(command: Command, p: &Params) -> Result<bool> {
    let cfg = integrator(p)?;
    let system = p.system.unwrap_or(SystemChoice::Oscillator);
    let pt0 = start_point(p, system == SystemChoice::Coulomb);
    let outcome = match system {
        SystemChoice::Oscillator => run_trajectory(&oscillator_model(p)?, pt0, &cfg),
        SystemChoice::Coulomb => run_trajectory(&coulomb_model(p, DEFAULT_SIMULATE_GAMMA)?, pt0, &cfg),
    };
    let (trajectory, within_budget, status, domain_exit) = match outcome {
        Ok((t, ok)) => (t, ok, if ok { "completed" } else { "drift budget exceeded" }, None),
        Err(Error::DomainExit { time, partial }) => (*partial, false, "left the operative domain", Some(time)),
        Err(e) => return Err(e),
    };
    let drifts: Vec<Drift> = trajectory
        .logs
        .iter()
        .map(|log| {
            Ok(Drift {
                quantity: log.name.clone(),
                max_relative_drift: conserved_drift(&trajectory, &log.name)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut notes: Vec<String> = drifts
        .iter()
        .map(|d| format!("max relative drift of {}: {:.3e}", d.quantity, d.max_relative_drift))
        .collect();
    if let Some(time) = domain_exit {
        notes.push(format!("trajectory left the operative domain after t = {time}"));
    }
    let mut csv = Vec::new();
    trajectory.write_csv(&mut csv)?;
    let report = Report {
        result: SimulateResult {
            system,
            integrator: cfg,
            status,
            samples: trajectory.len(),
            drifts,
            trajectory,
        },
        csv: String::from_utf8(csv).map_err(|e| Error::Parse(e.to_string()))?,
        passed: within_budget,
        notes,
    };
    emit(command, p, &report)?;
    match domain_exit {
        Some(time) => Err(Error::DomainExit {
            time,
            partial: Box::new(report.result.trajectory),
        }),
        None => Ok(report.passed),
    }
}

/// Reads the `t, re_z, im_z, re_pi, im_pi` columns of a trajectory CSV.
pub fn read_trajectory_csv(path: &Path) -> Result<Vec<(f64, PhasePoint)>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::trim)
        .collect();
    let column = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Parse(format!("{}: missing column `{name}`", path.display())))
    };
    let cols = [column("t")?, column("re_z")?, column("im_z")?, column("re_pi")?, column("im_pi")?];
    let mut out = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        let mut v = [0.0; 5];
        for (slot, &c) in v.iter_mut().zip(&cols) {
            *slot = fields
                .get(c)
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("{}: bad row {}", path.display(), k + 2)))?;
        }
        out.push((v[0], PhasePoint::from_array([v[1], v[2], v[3], v[4]])));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ImageSample {
    t: f64,
    w: Complex64,
    p: Complex64,
    surface_residual: f64,
    j_residual: Option<f64>,
    a_residual: Option<f64>,
}

#[derive(Serialize)]
struct BohlinResult {
    energy: f64,
    params: BohlinParams,
    max_surface_residual: f64,
    max_j_residual: f64,
    max_a_residual: f64,
    surface_tolerance: f64,
    identity_tolerance: f64,
    skipped_at_origin: usize,
    outside_image_disk: usize,
    samples: Vec<ImageSample>,
}

fn map_bohlin(command: Command, p: &Params) -> Result<bool> {
    let model = oscillator_model(p)?;
    if model.b0 != 0.0 {
        return Err(invalid("b0", "use `map magnetic` for the field sector"));
    }
    let samples: Vec<(f64, PhasePoint)> = match &p.input {
        Some(path) => read_trajectory_csv(path)?,
        None => {
            let (traj, _) = run_trajectory(&model, start_point(p, false), &integrator(p)?)?;
            traj.times.into_iter().zip(traj.points).collect()
        }
    };
    let first = samples
        .first()
        .ok_or_else(|| invalid("input", "trajectory has no samples"))?;
    let energy = model.energy_value(&first.1)?;
    let params = bohlin_params(energy, &model)?;

    let mapped: Vec<Option<ImageSample>> = samples
        .par_iter()
        .map(|(t, pt)| {
            if pt.z == Complex64::new(0.0, 0.0) {
                return Ok(None);
            }
            let image = bohlin_map(pt)?;
            let surface_residual = coulomb_surface_residual(pt, &params)?;
            let (j_residual, a_residual) = match conserved_map_check(pt, &model, energy) {
                Ok((j, a)) => (Some(j), Some(a)),
                Err(Error::OutsideDomain { .. } | Error::PoleAtBoundary { .. }) => (None, None),
                Err(e) => return Err(e),
            };
            Ok(Some(ImageSample {
                t: *t,
                w: image.z,
                p: image.pi,
                surface_residual,
                j_residual,
                a_residual,
            }))
        })
        .collect::<Result<_>>()?;
    let skipped_at_origin = mapped.iter().filter(|s| s.is_none()).count();
    let images: Vec<ImageSample> = mapped.into_iter().flatten().collect();
    let outside_image_disk = images.iter().filter(|s| s.a_residual.is_none()).count();
    let max = |f: &dyn Fn(&ImageSample) -> Option<f64>| images.iter().filter_map(f).fold(0.0f64, f64::max);
    let max_surface_residual = max(&|s| Some(s.surface_residual));
    let max_j_residual = max(&|s| s.j_residual);
    let max_a_residual = max(&|s| s.a_residual);

    let mut notes = vec![format!("max Coulomb-surface residual: {max_surface_residual:.3e}")];
    if skipped_at_origin > 0 {
        notes.push(format!("{skipped_at_origin} samples at z = 0 skipped"));
    }
    if outside_image_disk > 0 {
        notes.push(format!(
            "{outside_image_disk} samples map outside the unit disk; J and A residuals not evaluated there"
        ));
    }
    let rows: Vec<Vec<String>> = images
        .iter()
        .map(|s| {
            vec![
                num(s.t),
                num(s.w.re),
                num(s.w.im),
                num(s.p.re),
                num(s.p.im),
                num(s.surface_residual),
                opt_num(s.j_residual),
                opt_num(s.a_residual),
            ]
        })
        .collect();
    let csv = csv_table(
        &["t", "re_w", "im_w", "re_p", "im_p", "surface_residual", "j_residual", "a_residual"],
        &rows,
    );
    let passed = max_surface_residual < SURFACE_TOLERANCE
        && max_j_residual < IDENTITY_TOLERANCE
        && max_a_residual < IDENTITY_TOLERANCE
        && !images.is_empty();
    finish(
        command,
        p,
        Report {
            result: BohlinResult {
                energy,
                params,
                max_surface_residual,
                max_j_residual,
                max_a_residual,
                surface_tolerance: SURFACE_TOLERANCE,
                identity_tolerance: IDENTITY_TOLERANCE,
                skipped_at_origin,
                outside_image_disk,
                samples: images,
            },
            csv,
            passed,
            notes,
        },
    )
}

#[derive(Serialize)]
struct CheckRow {
    check: String,
    epsilon: Option<CurvatureSign>,
    points: usize,
    skipped: usize,
    max_residual: f64,
    tolerance: f64,
    passed: bool,
    fitted_coefficient: Option<f64>,
}

impl CheckRow {
    fn new(check: String, epsilon: Option<CurvatureSign>, points: usize, max_residual: f64, tolerance: f64) -> Self {
        CheckRow {
            check,
            epsilon,
            points,
            skipped: 0,
            max_residual,
            tolerance,
            passed: max_residual < tolerance,
            fitted_coefficient: None,
        }
    }
}

fn check_table(rows: &[CheckRow]) -> String {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                format!("\"{}\"", r.check),
                r.epsilon.map(|e| e.to_string()).unwrap_or_default(),
                r.points.to_string(),
                r.skipped.to_string(),
                num(r.max_residual),
                num(r.tolerance),
                r.passed.to_string(),
                opt_num(r.fitted_coefficient),
            ]
        })
        .collect();
    csv_table(
        &["check", "epsilon", "points", "skipped", "max_residual", "tolerance", "passed", "fitted_coefficient"],
        &rows,
    )
}

fn check_report(rows: Vec<CheckRow>, notes: Vec<String>) -> Report<Vec<CheckRow>> {
    let passed = rows.iter().all(|r| r.passed);
    Report {
        csv: check_table(&rows),
        passed,
        notes,
        result: rows,
    }
}

fn map_ks(command: Command, p: &Params) -> Result<bool> {
    let points = p.points.unwrap_or(200);
    let mut rng = seeded(p.seed.unwrap_or(DEFAULT_SEED));
    let upstairs: Vec<_> = (0..points).map(|_| random_upstairs_point(&mut rng)).collect();
    let name = |c: ReducedCoordinate| match c {
        ReducedCoordinate::U(i) => format!("u{}", i + 1),
        ReducedCoordinate::P(i) => format!("p{}", i + 1),
    };
    type Coordinate = fn(usize) -> ReducedCoordinate;
    let kinds: [(Coordinate, Coordinate); 3] = [
        (ReducedCoordinate::U, ReducedCoordinate::U),
        (ReducedCoordinate::U, ReducedCoordinate::P),
        (ReducedCoordinate::P, ReducedCoordinate::P),
    ];
    let mut pairs = Vec::new();
    for (f, g) in kinds {
        for i in 0..3 {
            for j in 0..3 {
                pairs.push((f(i), g(j)));
            }
        }
    }
    let mut rows = Vec::new();
    for (f, g) in pairs {
        let worst = upstairs
            .par_iter()
            .map(|pt| ks_bracket_check(&f, &g, pt))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rows.push(CheckRow::new(
            format!("{{{}, {}}}", name(f), name(g)),
            None,
            points,
            worst,
            KS_BRACKET_TOLERANCE,
        ));
    }
    for c in (0..3).map(ReducedCoordinate::U).chain((0..3).map(ReducedCoordinate::P)) {
        let worst = upstairs
            .par_iter()
            .map(|pt| ks_casimir_residual(&c, pt))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rows.push(CheckRow::new(format!("{{J, {}}}", name(c)), None, points, worst, KS_BRACKET_TOLERANCE));
    }
    let model = CurvedModel::oscillator(p.eps(), p.radius.unwrap_or(DEFAULT_RADIUS), p.alpha.unwrap_or(DEFAULT_ALPHA))?;
    let energy = p.energy.unwrap_or(1.0);
    let on_shell: Vec<_> = (0..points)
        .map(|_| on_shell_upstairs_point(&mut rng, &model, energy))
        .collect::<Result<_>>()?;
    let worst = on_shell
        .par_iter()
        .map(|pt| ks_energy_surface_residual(pt, &model, energy))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rows.push(CheckRow::new(
        format!("reduced Coulomb surface at E = {energy}"),
        Some(model.eps),
        points,
        worst,
        KS_SURFACE_TOLERANCE,
    ));
    finish(command, p, check_report(rows, Vec::new()))
}

fn map_magnetic(command: Command, p: &Params) -> Result<bool> {
    let points = p.points.unwrap_or(1000);
    let radius = p.radius.unwrap_or(DEFAULT_RADIUS);
    let alpha = p.alpha.unwrap_or(DEFAULT_ALPHA);
    let b0 = p.b0.unwrap_or(0.8);
    if b0 == 0.0 {
        return Err(invalid("b0", "the magnetic sector needs a non-zero field"));
    }
    let signs: Vec<CurvatureSign> = match p.epsilon {
        Some(e) => vec![e],
        None => CurvatureSign::both().to_vec(),
    };
    let mut rng = seeded(p.seed.unwrap_or(DEFAULT_SEED));
    let mut rows = Vec::new();
    for eps in signs {
        // the sphere's |z| > 1 hemisphere maps outside the unit disk
        let disk: Vec<PhasePoint> = (0..points)
            .map(|_| random_phase_point(&mut rng, CurvatureSign::Pseudosphere))
            .collect();
        let kept: Vec<&PhasePoint> = disk.iter().filter(|pt| pt.z.norm() >= 1e-3).collect();
        let worst = kept
            .par_iter()
            .map(|pt| magnetic_pullback_residual(pt, b0, radius, eps))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let mut row = CheckRow::new("two-form pullback".into(), Some(eps), kept.len(), worst, PULLBACK_TOLERANCE);
        row.skipped = disk.len() - kept.len();
        rows.push(row);

        let model = CurvedModel::oscillator(eps, radius, alpha)?.with_field(b0, 0.0)?;
        let sample: Vec<PhasePoint> = (0..points).map(|_| random_phase_point(&mut rng, eps)).collect();
        let cal = calibrate_magnetic_shift(&model, &sample)?;
        let mut row = CheckRow::new(
            "magnetic bracket closure".into(),
            Some(eps),
            points,
            cal.residual_fitted,
            CLOSURE_TOLERANCE,
        );
        row.fitted_coefficient = Some(cal.fitted_coefficient);
        rows.push(row);
    }
    finish(command, p, check_report(rows, Vec::new()))
}

#[derive(Serialize)]
struct OscillatorRow {
    n: u64,
    energy: f64,
    multiplicity: u64,
    below_continuum: bool,
    sigma: f64,
    n_sigma: f64,
    r0: f64,
    gamma: f64,
    energy_c: f64,
    duality_residual: f64,
    inside_coulomb_spectrum: bool,
}

#[derive(Serialize)]
struct CoulombRow {
    n_sigma: f64,
    sigma: f64,
    energy_c: f64,
    multiplicity: u64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum SpectrumTable {
    Oscillator { cutoff: NMax, bound_cutoff: NMax, levels: Vec<OscillatorRow> },
    Coulomb { nsigma_max: Option<f64>, levels: Vec<CoulombRow> },
}

/// Highest listed level: the cutoff, lowered to `requested`, or
/// `UNBOUNDED_LEVELS - 1` without either.
fn top_level(cutoff: NMax, requested: Option<u64>, notes: &mut Vec<String>) -> Option<u64> {
    let limit = match cutoff {
        NMax::Empty => return None,
        NMax::Finite(n) => Some(n),
        NMax::Unbounded => None,
    };
    match (limit, requested) {
        (Some(l), Some(r)) if r > l => {
            notes.push(format!("requested N = {r} lies beyond the cutoff N = {l}"));
            Some(l)
        }
        (_, Some(r)) => Some(r),
        (Some(l), None) => Some(l),
        (None, None) => Some(UNBOUNDED_LEVELS - 1),
    }
}

fn spectrum(command: Command, p: &Params) -> Result<bool> {
    let mut notes = Vec::new();
    match p.system.unwrap_or(SystemChoice::Oscillator) {
        SystemChoice::Oscillator => {
            let (eps, radius, alpha) = (p.eps(), p.radius.unwrap_or(DEFAULT_RADIUS), p.alpha.unwrap_or(DEFAULT_ALPHA));
            let cutoff = oscillator_nmax(alpha, radius, eps)?;
            let bound = oscillator_bound_nmax(alpha, radius, eps)?;
            let top = top_level(cutoff, p.n, &mut notes);
            if top.is_none() {
                notes.push("no levels below the cutoff".into());
            }
            let levels: Vec<OscillatorRow> = top
                .map(|t| 0..=t)
                .into_iter()
                .flatten()
                .map(|n| {
                    let d = spectral_duality_check(alpha, radius, eps, n)?;
                    Ok(OscillatorRow {
                        n,
                        energy: d.energy,
                        multiplicity: oscillator_degeneracy(n),
                        below_continuum: bound.admits(n),
                        sigma: d.sigma.value(),
                        n_sigma: d.n_sigma.value(),
                        r0: d.params.r0,
                        gamma: d.params.gamma,
                        energy_c: d.params.energy_c,
                        duality_residual: d.residual,
                        inside_coulomb_spectrum: d.inside_coulomb_spectrum,
                    })
                })
                .collect::<Result<_>>()?;
            let rows: Vec<Vec<String>> = levels
                .iter()
                .map(|l| {
                    vec![
                        l.n.to_string(),
                        num(l.energy),
                        l.multiplicity.to_string(),
                        l.below_continuum.to_string(),
                        l.sigma.to_string(),
                        l.n_sigma.to_string(),
                        num(l.energy_c),
                        num(l.duality_residual),
                        l.inside_coulomb_spectrum.to_string(),
                    ]
                })
                .collect();
            let csv = csv_table(
                &["N", "E", "multiplicity", "below_continuum", "sigma", "N_sigma", "E_C", "duality_residual", "inside_coulomb_spectrum"],
                &rows,
            );
            let passed = levels.iter().all(|l| l.duality_residual < DICTIONARY_TOLERANCE);
            finish(
                command,
                p,
                Report {
                    result: SpectrumTable::Oscillator { cutoff, bound_cutoff: bound, levels },
                    csv,
                    passed,
                    notes,
                },
            )
        }
        SystemChoice::Coulomb => {
            let model = coulomb_model(p, DEFAULT_GAMMA)?;
            let (max, mut spectrum) = match coulomb_nsigma_max(model.gamma, model.r0, model.sigma) {
                Ok(max) => (max, coulomb_spectrum(model.gamma, model.r0, model.sigma)?),
                Err(Error::NoBoundStates(reason)) => {
                    notes.push(format!("no bound states: {reason}"));
                    (None, Vec::new())
                }
                Err(e) => return Err(e),
            };
            if let Some(requested) = p.nsigma {
                spectrum.retain(|(n, _)| *n <= requested);
            }
            if spectrum.is_empty() && notes.is_empty() {
                notes.push(format!(
                    "no bound states: sqrt(r0 gamma) = {:.6} is below 1/2 + sigma",
                    (model.r0 * model.gamma).sqrt()
                ));
            }
            let levels: Vec<CoulombRow> = spectrum
                .iter()
                .map(|(n, e)| CoulombRow {
                    n_sigma: n.value(),
                    sigma: model.sigma.value(),
                    energy_c: *e,
                    multiplicity: ((n.doubled() - model.sigma.doubled()) / 2 + 1) as u64,
                })
                .collect();
            let rows: Vec<Vec<String>> = levels
                .iter()
                .map(|l| vec![l.n_sigma.to_string(), l.sigma.to_string(), num(l.energy_c), l.multiplicity.to_string()])
                .collect();
            let csv = csv_table(&["N_sigma", "sigma", "E_C", "multiplicity"], &rows);
            finish(
                command,
                p,
                Report {
                    result: SpectrumTable::Coulomb {
                        nsigma_max: max.map(HalfInteger::value),
                        levels,
                    },
                    csv,
                    passed: true,
                    notes,
                },
            )
        }
    }
}

#[derive(Serialize)]
struct ValidateResult {
    tolerance: f64,
    expected_bound_levels: Option<u64>,
    numeric_bound_levels: Option<usize>,
    levels: Vec<LevelReport>,
}

fn validate(command: Command, p: &Params) -> Result<bool> {
    let grid = p.grid.unwrap_or(DEFAULT_GRID);
    let mut notes = Vec::new();
    let (levels, expected, numeric) = match p.system.unwrap_or(SystemChoice::Oscillator) {
        SystemChoice::Oscillator => {
            let (eps, radius, alpha) = (p.eps(), p.radius.unwrap_or(DEFAULT_RADIUS), p.alpha.unwrap_or(DEFAULT_ALPHA));
            let cutoff = match p.cutoff.unwrap_or(CutoffChoice::Bound) {
                CutoffChoice::Bound => oscillator_bound_nmax(alpha, radius, eps)?,
                CutoffChoice::Printed => oscillator_nmax(alpha, radius, eps)?,
            };
            let top = match (cutoff, p.n) {
                (NMax::Unbounded, None) => Some(VALIDATED_SPHERE_LEVELS - 1),
                _ => top_level(cutoff, p.n, &mut notes),
            };
            let list: Vec<u64> = top.map(|t| (0..=t).collect()).unwrap_or_default();
            // levels the printed cutoff admits still have closed-form energies
            for &n in &list {
                oscillator_level(alpha, radius, eps, n)?;
            }
            let reports = if list.is_empty() {
                Vec::new()
            } else {
                validate_oscillator(alpha, radius, eps, &list, grid)?
            };
            let (expected, numeric) = match (eps, cutoff.count()) {
                (CurvatureSign::Pseudosphere, Some(expected)) => {
                    let found = count_bound_oscillator_levels(alpha, radius, expected as i64 + 1, grid)?;
                    (Some(expected), Some(found))
                }
                _ => (None, None),
            };
            (reports, expected, numeric)
        }
        SystemChoice::Coulomb => {
            let model = coulomb_model(p, DEFAULT_GAMMA)?;
            let base = HalfInteger::from_doubled(model.sigma.doubled());
            let max = coulomb_nsigma_max(model.gamma, model.r0, model.sigma)?;
            let top = match (max, p.nsigma) {
                (Some(m), Some(r)) if r > m => {
                    notes.push(format!("requested N_sigma = {r} lies beyond the cutoff {m}"));
                    Some(m)
                }
                (Some(_), Some(r)) => Some(r),
                (m, _) => m,
            };
            let list: Vec<HalfInteger> = match top {
                Some(t) => (0..).map(|k| base.step(k)).take_while(|n| *n <= t).collect(),
                None => Vec::new(),
            };
            let reports = validate_coulomb(model.gamma, model.r0, model.sigma, &list, grid)?;
            let expected = max.map_or(0, |m| ((m.doubled() - base.doubled()) / 2 + 1) as u64);
            let found = count_bound_coulomb_levels(model.gamma, model.r0, model.sigma, expected as i64 + 1, grid)?;
            (reports, Some(expected), Some(found))
        }
    };
    if levels.is_empty() {
        notes.push("no levels to validate".into());
    }
    let count_ok = match (expected, numeric) {
        (Some(e), Some(n)) => {
            notes.push(format!("bound levels: expected {e}, found {n}"));
            e == n as u64
        }
        _ => true,
    };
    let passed = count_ok && levels.iter().all(|l| l.within(LEVEL_TOLERANCE));
    let rows: Vec<Vec<String>> = levels
        .iter()
        .map(|l| {
            vec![
                format!("\"{}\"", l.problem),
                format!("\"{}\"", l.level),
                num(l.analytic),
                opt_num(l.numeric),
                opt_num(l.rel_error),
                opt_num(l.convergence_estimate),
                opt_num(l.order_ratio),
                l.within(LEVEL_TOLERANCE).to_string(),
            ]
        })
        .collect();
    let csv = csv_table(
        &["problem", "level", "analytic", "numeric", "rel_error", "convergence_estimate", "order_ratio", "passed"],
        &rows,
    );
    finish(
        command,
        p,
        Report {
            result: ValidateResult {
                tolerance: LEVEL_TOLERANCE,
                expected_bound_levels: expected,
                numeric_bound_levels: numeric,
                levels,
            },
            csv,
            passed,
            notes,
        },
    )
}

fn brackets(command: Command, p: &Params) -> Result<bool> {
    let d = AlgebraSettings::default();
    let settings = AlgebraSettings {
        seed: p.seed.unwrap_or(d.seed),
        points: p.points.unwrap_or(d.points),
        radius: p.radius.unwrap_or(d.radius),
        alpha: p.alpha.unwrap_or(d.alpha),
        b0: p.b0.unwrap_or(d.b0),
        gamma: p.gamma.unwrap_or(d.gamma),
    };
    if settings.points == 0 {
        return Err(invalid("points", "must be at least 1"));
    }
    let report = algebra_suite(&settings)?;
    let notes = report
        .magnetic
        .iter()
        .map(|(eps, cal)| {
            format!(
                "epsilon {eps}: fitted shift coefficient {:.9}, closure residual {:.3e} (printed coefficient {}: {:.3e})",
                cal.fitted_coefficient, cal.residual_fitted, cal.printed_coefficient, cal.residual_printed
            )
        })
        .collect();
    let rows: Vec<Vec<String>> = report
        .relations
        .iter()
        .map(|r| {
            vec![
                format!("\"{}\"", r.relation),
                r.eps.map(|e| e.to_string()).unwrap_or_default(),
                serde_json::to_value(r.sector)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                r.points.to_string(),
                num(r.max_residual),
                num(r.tolerance),
                r.passed().to_string(),
            ]
        })
        .collect();
    let csv = csv_table(
        &["relation", "epsilon", "sector", "points", "max_residual", "tolerance", "passed"],
        &rows,
    );
    let passed = report.passed();
    finish(
        command,
        p,
        Report {
            result: report,
            csv,
            passed,
            notes,
        },
    )
}
