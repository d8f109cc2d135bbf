//! Radial eigensolver for the curved oscillator and the pseudosphere Coulomb
//! problem with a vortex, used as an independent check of the closed-form spectra.
//!
//! After separating `e^{i M phi}` the operator on the geodesic radius `chi` is
//! `-(1/(2R^2)) (1/g)(g f')' + M^2/(2 R^2 g^2) + V(chi)` with `g = sin` on the
//! sphere and `sinh` on the pseudosphere. It is discretised by cell-centred
//! finite volumes on a grid uniform in `t` with `chi = t^2` (stretched) or
//! `chi = t` (geodesic). The flux through the origin face vanishes, the far face
//! is a Dirichlet wall, and the diagonal similarity by the square root of the
//! cell weights makes the matrix symmetric tridiagonal.

mod sturm;

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use sturm::{Tridiagonal, BISECTION_TOLERANCE};

use crate::error::{invalid, Error, Result};
use crate::geometry::{CurvatureSign, EQUATOR_MARGIN};
use crate::spectra::{coulomb_level, oscillator_level, HalfInteger};
use crate::systems::VortexCharge;

pub const MIN_POINTS: usize = 64;
/// Pseudosphere walls are never placed beyond this geodesic radius.
pub const WALL_CAP: f64 = 300.0;
pub const WALL_START: f64 = 10.0;
pub const WALL_GROWTH: f64 = 1.25;
/// Bound eigenvalues must move less than this when the wall grows.
pub const WALL_TOLERANCE: f64 = 1e-8;
/// Eigenvalues closer than this to the continuum edge are not counted as bound.
pub const EDGE_TOLERANCE: f64 = 1e-9;
/// Largest potential value allowed at a cell centre.
pub const POTENTIAL_LIMIT: f64 = 1e14;

/// Sphere wall: the equator, where the potential diverges.
pub fn sphere_wall() -> f64 {
    FRAC_PI_2 - EQUATOR_MARGIN
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system")]
pub enum RadialKind {
    CurvedOscillator {
        alpha: f64,
        radius: f64,
        eps: CurvatureSign,
        m: i64,
    },
    PseudoCoulomb {
        gamma: f64,
        r0: f64,
        sigma: VortexCharge,
        m_sigma: HalfInteger,
    },
}

impl RadialKind {
    fn scale(&self) -> f64 {
        match *self {
            RadialKind::CurvedOscillator { radius, .. } => radius,
            RadialKind::PseudoCoulomb { r0, .. } => r0,
        }
    }

    fn eps(&self) -> CurvatureSign {
        match *self {
            RadialKind::CurvedOscillator { eps, .. } => eps,
            RadialKind::PseudoCoulomb { .. } => CurvatureSign::Pseudosphere,
        }
    }

    fn angular(&self) -> f64 {
        match *self {
            RadialKind::CurvedOscillator { m, .. } => m as f64,
            RadialKind::PseudoCoulomb { m_sigma, .. } => m_sigma.value(),
        }
    }

    fn g(&self, chi: f64) -> f64 {
        match self.eps() {
            CurvatureSign::Sphere => chi.sin(),
            CurvatureSign::Pseudosphere => chi.sinh(),
        }
    }

    /// `(alpha^2 R0^2/2) tan^2` or `tanh^2` for the oscillator, `-(gamma/r0) coth` for Coulomb.
    pub fn potential(&self, chi: f64) -> f64 {
        match *self {
            RadialKind::CurvedOscillator { alpha, radius, eps, .. } => {
                let t = match eps {
                    CurvatureSign::Sphere => chi.tan(),
                    CurvatureSign::Pseudosphere => chi.tanh(),
                };
                0.5 * alpha * alpha * radius * radius * t * t
            }
            RadialKind::PseudoCoulomb { gamma, r0, .. } => -(gamma / r0) / chi.tanh(),
        }
    }

    /// Bottom of the continuous spectrum on the pseudosphere.
    pub fn continuum_edge(&self) -> Option<f64> {
        match *self {
            RadialKind::CurvedOscillator { eps: CurvatureSign::Sphere, .. } => None,
            RadialKind::CurvedOscillator { alpha, radius, .. } => {
                Some(0.5 * alpha * alpha * radius * radius + 1.0 / (8.0 * radius * radius))
            }
            RadialKind::PseudoCoulomb { gamma, r0, .. } => Some(-gamma / r0 + 1.0 / (8.0 * r0 * r0)),
        }
    }

    fn validate(&self) -> Result<()> {
        let scale = self.scale();
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("radius", format!("must be positive and finite, got {scale}")));
        }
        match *self {
            RadialKind::CurvedOscillator { alpha, .. } if !alpha.is_finite() => Err(invalid("alpha", "must be finite")),
            RadialKind::PseudoCoulomb { gamma, .. } if !gamma.is_finite() => Err(invalid("gamma", "must be finite")),
            RadialKind::PseudoCoulomb { sigma, m_sigma, .. }
                if (m_sigma.doubled() - sigma.doubled()).rem_euclid(2) != 0 =>
            {
                Err(invalid("m_sigma", format!("{m_sigma} is not on the grid of sigma = {}", sigma.value())))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            RadialKind::CurvedOscillator { alpha, radius, eps, m } => {
                format!("oscillator alpha={alpha} R0={radius} eps={eps} M={m}")
            }
            RadialKind::PseudoCoulomb { gamma, r0, sigma, m_sigma } => {
                format!("coulomb gamma={gamma} r0={r0} sigma={} m_sigma={m_sigma}", sigma.value())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridCoordinate {
    /// Uniform in `t = sqrt(chi)`.
    Stretched,
    /// Uniform in `chi`.
    Geodesic,
}

impl GridCoordinate {
    fn chi(self, t: f64) -> f64 {
        match self {
            GridCoordinate::Stretched => t * t,
            GridCoordinate::Geodesic => t,
        }
    }

    fn t_of_chi(self, chi: f64) -> f64 {
        match self {
            GridCoordinate::Stretched => chi.sqrt(),
            GridCoordinate::Geodesic => chi,
        }
    }

    fn dchi(self, t: f64) -> f64 {
        match self {
            GridCoordinate::Stretched => 2.0 * t,
            GridCoordinate::Geodesic => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub n_points: usize,
    pub coordinate: GridCoordinate,
    /// Geodesic radius of the Dirichlet wall.
    pub cutoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub kind: RadialKind,
    pub grid: RadialGrid,
}

impl RadialProblem {
    fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        let RadialGrid { n_points, cutoff, .. } = self.grid;
        if n_points < MIN_POINTS / 4 {
            return Err(invalid("n_points", format!("need at least {}, got {n_points}", MIN_POINTS / 4)));
        }
        let limit = match self.kind.eps() {
            CurvatureSign::Sphere => FRAC_PI_2,
            CurvatureSign::Pseudosphere => WALL_CAP,
        };
        if !(cutoff > 0.0 && cutoff <= limit) {
            return Err(invalid("cutoff", format!("must lie in (0, {limit}], got {cutoff}")));
        }
        Ok(())
    }
}

/// Finite-volume pieces of one discretisation.
struct Assembly {
    kind: RadialKind,
    h: f64,
    /// `g(chi) dchi/dt` at cell centres.
    weight: Vec<f64>,
    /// `g(chi) / (dchi/dt)` at faces, zero at the origin.
    flux: Vec<f64>,
    centres: Vec<f64>,
}

impl Assembly {
    fn new(problem: &RadialProblem) -> Self {
        let RadialGrid { n_points: n, coordinate, cutoff } = problem.grid;
        let kind = problem.kind;
        let h = coordinate.t_of_chi(cutoff) / n as f64;
        let centres_t: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * h).collect();
        let weight = centres_t
            .iter()
            .map(|&t| kind.g(coordinate.chi(t)) * coordinate.dchi(t))
            .collect();
        let flux = (0..=n)
            .map(|j| {
                if j == 0 {
                    0.0
                } else {
                    let t = j as f64 * h;
                    kind.g(coordinate.chi(t)) / coordinate.dchi(t)
                }
            })
            .collect();
        let centres = centres_t.iter().map(|&t| coordinate.chi(t)).collect();
        Assembly {
            kind,
            h,
            weight,
            flux,
            centres,
        }
    }

    fn kinetic(&self) -> f64 {
        1.0 / (2.0 * self.kind.scale().powi(2))
    }

    /// Entry `(i, j)` of the symmetrised operator, zero beyond the first off-diagonal.
    fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.weight.len();
        let h2 = self.h * self.h;
        let s = self.kinetic();
        if i == j {
            let chi = self.centres[i];
            // the Dirichlet face doubles its flux, the ghost value is -f
            let outer = if i + 1 == n { 2.0 * self.flux[n] } else { self.flux[i + 1] };
            let m = self.kind.angular();
            let g = self.kind.g(chi);
            s * (self.flux[i] + outer) / (self.weight[i] * h2) + s * m * m / (g * g) + self.kind.potential(chi)
        } else if i.abs_diff(j) == 1 {
            let face = i.max(j);
            -s * self.flux[face] / (h2 * (self.weight[i] * self.weight[j]).sqrt())
        } else {
            0.0
        }
    }
}

/// Discretised radial operator.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    pub problem: RadialProblem,
    pub matrix: Tridiagonal,
    /// Geodesic radius of each cell centre.
    pub centres: Vec<f64>,
}

pub fn radial_reduce(problem: &RadialProblem) -> Result<RadialOperator> {
    problem.validate()?;
    let asm = Assembly::new(problem);
    let n = problem.grid.n_points;
    for &chi in &asm.centres {
        let v = problem.kind.potential(chi);
        if !v.is_finite() || v.abs() > POTENTIAL_LIMIT {
            return Err(Error::GridCondition(format!(
                "potential {v:e} at chi = {chi} is too close to a pole"
            )));
        }
    }
    let diag = (0..n).map(|j| asm.entry(j, j)).collect();
    let off = (0..n - 1).map(|j| asm.entry(j, j + 1)).collect();
    Ok(RadialOperator {
        problem: *problem,
        matrix: Tridiagonal::new(diag, off)?,
        centres: asm.centres,
    })
}

/// The `k` lowest eigenvalues of an assembled operator.
pub fn eigenvalues(op: &RadialOperator, k: usize) -> Result<Vec<f64>> {
    op.matrix.lowest(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n_points: usize,
    pub cutoff: f64,
    pub coordinate: GridCoordinate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Ascending eigenvalues on the finest grid.
    pub eigenvalues: Vec<f64>,
    pub grid_meta: GridMeta,
    /// `|lambda(n) - lambda(n/2)| / 3`, the Richardson error estimate for a second-order scheme.
    pub convergence_estimate: Vec<f64>,
    /// `(lambda(n/4) - lambda(n/2)) / (lambda(n/2) - lambda(n))`, close to 4 at second order.
    pub order_ratio: Vec<f64>,
    /// `(4 lambda(n) - lambda(n/2)) / 3`.
    pub extrapolated: Vec<f64>,
}

/// Lowest `k` eigenvalues on grids of `n`, `n/2` and `n/4` cells.
pub fn solve(problem: &RadialProblem, k: usize) -> Result<EigenResult> {
    let n = problem.grid.n_points;
    if n < MIN_POINTS {
        return Err(invalid("n_points", format!("need at least {MIN_POINTS}, got {n}")));
    }
    let grids = [n, n / 2, n / 4];
    let runs: Result<Vec<Vec<f64>>> = grids
        .par_iter()
        .map(|&points| {
            let p = RadialProblem {
                grid: RadialGrid {
                    n_points: points,
                    ..problem.grid
                },
                ..*problem
            };
            eigenvalues(&radial_reduce(&p)?, k)
        })
        .collect();
    let runs = runs?;
    let (fine, mid, coarse) = (&runs[0], &runs[1], &runs[2]);
    Ok(EigenResult {
        eigenvalues: fine.clone(),
        grid_meta: GridMeta {
            n_points: n,
            cutoff: problem.grid.cutoff,
            coordinate: problem.grid.coordinate,
        },
        convergence_estimate: (0..k).map(|i| (fine[i] - mid[i]).abs() / 3.0).collect(),
        order_ratio: (0..k).map(|i| (coarse[i] - mid[i]) / (mid[i] - fine[i])).collect(),
        extrapolated: (0..k).map(|i| (4.0 * fine[i] - mid[i]) / 3.0).collect(),
    })
}

/// Wall position and resolution chosen for one sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallChoice {
    pub cutoff: f64,
    pub n_points: usize,
    /// Eigenvalues below the continuum edge at the chosen wall.
    pub bound: Vec<f64>,
    /// Whether the last 25% step moved every bound eigenvalue by less than the tolerance.
    pub converged: bool,
}

fn bound_below_edge(op: &RadialOperator, edge: f64) -> Result<Vec<f64>> {
    let count = op.matrix.count_below(edge - EDGE_TOLERANCE);
    if count == 0 {
        Ok(Vec::new())
    } else {
        op.matrix.lowest(count)
    }
}

/// Grows a pseudosphere wall from `WALL_START` in 25% steps at the cell size
/// that `n_points` gives at `WALL_START`, until the bound eigenvalues settle.
/// Sphere problems keep the equator wall.
pub fn adaptive_wall(kind: RadialKind, n_points: usize, coordinate: GridCoordinate) -> Result<WallChoice> {
    kind.validate()?;
    let Some(edge) = kind.continuum_edge() else {
        return Ok(WallChoice {
            cutoff: sphere_wall(),
            n_points,
            bound: Vec::new(),
            converged: true,
        });
    };
    let h = coordinate.t_of_chi(WALL_START) / n_points as f64;
    // the wall sits on a whole number of cells so that growing it keeps every inner cell
    let build = |target: f64| -> Result<(f64, usize, Vec<f64>)> {
        let n = ((coordinate.t_of_chi(target) / h).round() as usize).max(MIN_POINTS);
        let cutoff = coordinate.chi(n as f64 * h).min(WALL_CAP);
        let op = radial_reduce(&RadialProblem {
            kind,
            grid: RadialGrid {
                n_points: n,
                coordinate,
                cutoff,
            },
        })?;
        Ok((cutoff, n, bound_below_edge(&op, edge)?))
    };
    let (mut cutoff, mut n, mut bound) = build(WALL_START)?;
    loop {
        if cutoff >= WALL_CAP * (1.0 - 1e-12) {
            return Ok(WallChoice {
                cutoff,
                n_points: n,
                bound,
                converged: false,
            });
        }
        let (next_cutoff, next_n, next_bound) = build((cutoff * WALL_GROWTH).min(WALL_CAP))?;
        let settled = next_bound.len() == bound.len()
            && next_bound.iter().zip(&bound).all(|(a, b)| (a - b).abs() < WALL_TOLERANCE);
        cutoff = next_cutoff;
        n = next_n;
        bound = next_bound;
        if settled {
            return Ok(WallChoice {
                cutoff,
                n_points: n,
                bound,
                converged: true,
            });
        }
    }
}

/// One radial sector solved at its chosen wall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSolution {
    pub kind: RadialKind,
    pub wall: WallChoice,
    pub result: EigenResult,
    /// Number of eigenvalues below the continuum edge, all of them on the sphere.
    pub n_bound: usize,
}

/// Lowest `k` eigenvalues of one sector. On the pseudosphere only the
/// eigenvalues below the continuum edge are bound, and `k` is capped to them
/// when fewer exist.
pub fn solve_sector(kind: RadialKind, n_points: usize, k: usize) -> Result<SectorSolution> {
    let wall = adaptive_wall(kind, n_points, GridCoordinate::Stretched)?;
    let wanted = match kind.continuum_edge() {
        Some(_) => k.min(wall.bound.len()).max(1),
        None => k,
    };
    let problem = RadialProblem {
        kind,
        grid: RadialGrid {
            n_points: wall.n_points,
            coordinate: GridCoordinate::Stretched,
            cutoff: wall.cutoff,
        },
    };
    let result = solve(&problem, wanted)?;
    let n_bound = match kind.continuum_edge() {
        Some(_) => wall.bound.len(),
        None => result.eigenvalues.len(),
    };
    Ok(SectorSolution {
        kind,
        wall,
        result,
        n_bound,
    })
}

/// One numeric level against its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub problem: String,
    pub grid: GridMeta,
    pub level: String,
    pub analytic: f64,
    /// `None` when the sector has no bound state with this radial number.
    pub numeric: Option<f64>,
    pub rel_error: Option<f64>,
    pub convergence_estimate: Option<f64>,
    pub order_ratio: Option<f64>,
}

impl LevelReport {
    pub fn within(&self, tolerance: f64) -> bool {
        self.rel_error.is_some_and(|e| e < tolerance)
    }
}

fn report(sector: &SectorSolution, n_r: usize, level: String, analytic: f64) -> LevelReport {
    let bound = n_r < sector.n_bound.min(sector.result.eigenvalues.len());
    let pick = |v: &Vec<f64>| if bound { Some(v[n_r]) } else { None };
    let numeric = pick(&sector.result.eigenvalues);
    LevelReport {
        problem: sector.kind.label(),
        grid: sector.result.grid_meta,
        level,
        analytic,
        numeric,
        rel_error: numeric.map(|e| ((e - analytic) / analytic).abs()),
        convergence_estimate: pick(&sector.result.convergence_estimate),
        order_ratio: pick(&sector.result.order_ratio),
    }
}

/// Per `(N, M >= 0)` reports: the `n_r`-th radial eigenvalue of sector `|M|`
/// against the closed-form level of `N = 2 n_r + |M|`.
pub fn validate_oscillator(
    alpha: f64,
    radius: f64,
    eps: CurvatureSign,
    levels: &[u64],
    n_points: usize,
) -> Result<Vec<LevelReport>> {
    let analytic: Vec<f64> = levels
        .iter()
        .map(|&n| oscillator_level(alpha, radius, eps, n))
        .collect::<Result<_>>()?;
    let top = levels.iter().copied().max().unwrap_or(0);
    let sectors: Vec<SectorSolution> = (0..=top as i64)
        .into_par_iter()
        .map(|m| {
            let k = (top as i64 - m) / 2 + 1;
            solve_sector(
                RadialKind::CurvedOscillator { alpha, radius, eps, m },
                n_points,
                k as usize,
            )
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (&n, &e) in levels.iter().zip(&analytic) {
        for m in (0..=n).rev().step_by(2) {
            let n_r = ((n - m) / 2) as usize;
            out.push(report(&sectors[m as usize], n_r, format!("N={n} |M|={m} n_r={n_r}"), e));
        }
    }
    Ok(out)
}

/// Per `(N_sigma, m_sigma)` reports for the Coulomb problem with vortex charge `sigma`.
pub fn validate_coulomb(
    gamma: f64,
    r0: f64,
    sigma: VortexCharge,
    levels: &[HalfInteger],
    n_points: usize,
) -> Result<Vec<LevelReport>> {
    let analytic: Vec<f64> = levels
        .iter()
        .map(|&n| coulomb_level(gamma, r0, sigma, n))
        .collect::<Result<_>>()?;
    let Some(top) = levels.iter().copied().max() else {
        return Ok(Vec::new());
    };
    let base = HalfInteger::from_doubled(sigma.doubled());
    let steps = (top.doubled() - base.doubled()) / 2;
    let sectors: Vec<SectorSolution> = (0..=steps)
        .into_par_iter()
        .map(|j| {
            let m_sigma = base.step(j);
            solve_sector(
                RadialKind::PseudoCoulomb { gamma, r0, sigma, m_sigma },
                n_points,
                (steps - j + 1) as usize,
            )
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (&n, &e) in levels.iter().zip(&analytic) {
        for j in 0..=(n.doubled() - base.doubled()) / 2 {
            let m_sigma = base.step(j);
            let n_r = ((n.doubled() - m_sigma.doubled()) / 2) as usize;
            out.push(report(
                &sectors[j as usize],
                n_r,
                format!("N_sigma={n} m_sigma={m_sigma} n_r={n_r}"),
                e,
            ));
        }
    }
    Ok(out)
}

/// Distinct principal levels `N = 2 n_r + |M|` with a bound numeric state,
/// searched over `|M| <= max_m`.
pub fn count_bound_oscillator_levels(alpha: f64, radius: f64, max_m: i64, n_points: usize) -> Result<usize> {
    let found: Vec<Vec<u64>> = (0..=max_m)
        .into_par_iter()
        .map(|m| {
            let kind = RadialKind::CurvedOscillator {
                alpha,
                radius,
                eps: CurvatureSign::Pseudosphere,
                m,
            };
            let wall = adaptive_wall(kind, n_points, GridCoordinate::Stretched)?;
            Ok((0..wall.bound.len() as u64).map(|n_r| 2 * n_r + m as u64).collect())
        })
        .collect::<Result<_>>()?;
    let mut levels: Vec<u64> = found.into_iter().flatten().collect();
    levels.sort_unstable();
    levels.dedup();
    Ok(levels.len())
}

/// Number of bound states of one vortex sector, counted as distinct `N_sigma`.
pub fn count_bound_coulomb_levels(gamma: f64, r0: f64, sigma: VortexCharge, max_steps: i64, n_points: usize) -> Result<usize> {
    let base = HalfInteger::from_doubled(sigma.doubled());
    let found: Vec<Vec<i64>> = (0..=max_steps)
        .into_par_iter()
        .map(|j| {
            let m_sigma = base.step(j);
            let kind = RadialKind::PseudoCoulomb { gamma, r0, sigma, m_sigma };
            let wall = adaptive_wall(kind, n_points, GridCoordinate::Stretched)?;
            Ok((0..wall.bound.len() as i64).map(|n_r| m_sigma.step(n_r).doubled()).collect())
        })
        .collect::<Result<_>>()?;
    let mut levels: Vec<i64> = found.into_iter().flatten().collect();
    levels.sort_unstable();
    levels.dedup();
    Ok(levels.len())
}

/// A numeric oscillator level carried through the parameter dictionary and
/// compared with the numeric Coulomb level of the image problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub n: u64,
    pub m: i64,
    pub oscillator: f64,
    pub mapped_energy_c: f64,
    pub coulomb: Option<f64>,
    pub rel_difference: Option<f64>,
}

pub fn cross_validate(alpha: f64, radius: f64, eps: CurvatureSign, n: u64, m: i64, n_points: usize) -> Result<CrossCheck> {
    if m.unsigned_abs() > n || (n - m.unsigned_abs()) % 2 != 0 {
        return Err(invalid("m", format!("|M| = {} is not a sector of N = {n}", m.abs())));
    }
    let n_r = ((n - m.unsigned_abs()) / 2) as usize;
    let osc = solve_sector(
        RadialKind::CurvedOscillator { alpha, radius, eps, m: m.abs() },
        n_points,
        n_r + 1,
    )?;
    if n_r >= osc.n_bound.min(osc.result.eigenvalues.len()) {
        return Err(Error::NoBoundState {
            level: format!("N = {n}, |M| = {}", m.abs()),
            cutoff: format!("{} bound radial states", osc.n_bound),
        });
    }
    let energy = osc.result.eigenvalues[n_r];
    let params = crate::duality::params_unchecked(energy, alpha, radius, eps.value());
    let sigma = VortexCharge::from_parity(n);
    let coulomb = solve_sector(
        RadialKind::PseudoCoulomb {
            gamma: params.gamma,
            r0: params.r0,
            sigma,
            m_sigma: HalfInteger::from_doubled(m.abs()),
        },
        n_points,
        n_r + 1,
    )?;
    let value = if n_r < coulomb.n_bound.min(coulomb.result.eigenvalues.len()) {
        Some(coulomb.result.eigenvalues[n_r])
    } else {
        None
    };
    Ok(CrossCheck {
        n,
        m,
        oscillator: energy,
        mapped_energy_c: params.energy_c,
        coulomb: value,
        rel_difference: value.map(|c| ((c - params.energy_c) / params.energy_c).abs()),
    })
}
