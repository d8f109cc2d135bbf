//! Closed-form spectra of the curved oscillator and the pseudosphere Coulomb
//! problem with a vortex, their cutoffs, and the level dictionary between them.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::duality::{params_unchecked, BohlinParams};
use crate::error::{invalid, Error, Result};
use crate::geometry::CurvatureSign;
use crate::systems::VortexCharge;

/// Near-integers closer than this snap to the integer before a bracket is taken.
pub const FLOOR_SNAP: f64 = 1e-12;

fn snapped_floor(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < FLOOR_SNAP {
        r
    } else {
        x.floor()
    }
}

/// Half-integer stored as twice its value; serialized as the number itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger(i64);

impl Serialize for HalfInteger {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for HalfInteger {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        let doubled = 2.0 * x;
        if (doubled - doubled.round()).abs() > 1e-12 {
            return Err(serde::de::Error::custom(format!("{x} is not a half-integer")));
        }
        Ok(HalfInteger(doubled.round() as i64))
    }
}

impl HalfInteger {
    pub fn from_doubled(doubled: i64) -> Self {
        HalfInteger(doubled)
    }

    pub fn from_int(n: i64) -> Self {
        HalfInteger(2 * n)
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Shifts by a whole number of steps.
    pub fn step(self, k: i64) -> Self {
        HalfInteger(self.0 + 2 * k)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl std::str::FromStr for HalfInteger {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("`{s}` is not an integer or half-integer"));
        if let Some(num) = s.strip_suffix("/2") {
            return num.trim().parse::<i64>().map(HalfInteger).map_err(|_| bad());
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(HalfInteger::from_int(n));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let d = 2.0 * x;
        if (d - d.round()).abs() > 1e-12 {
            return Err(bad());
        }
        Ok(HalfInteger(d.round() as i64))
    }
}

/// Highest principal quantum number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NMax {
    Unbounded,
    Finite(u64),
    Empty,
}

impl NMax {
    pub fn admits(self, n: u64) -> bool {
        match self {
            NMax::Unbounded => true,
            NMax::Finite(max) => n <= max,
            NMax::Empty => false,
        }
    }

    /// Number of admitted levels, `None` when unbounded.
    pub fn count(self) -> Option<u64> {
        match self {
            NMax::Unbounded => None,
            NMax::Finite(max) => Some(max + 1),
            NMax::Empty => Some(0),
        }
    }
}

impl fmt::Display for NMax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NMax::Unbounded => write!(f, "inf"),
            NMax::Finite(n) => write!(f, "{n}"),
            NMax::Empty => write!(f, "none"),
        }
    }
}

/// One `(n_r, M)` state of an oscillator level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLine {
    pub n: u64,
    pub m: i64,
    pub n_r: u64,
    pub energy: f64,
    pub multiplicity: u64,
}

/// One `(n_r, m_sigma)` state of a Coulomb level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombLine {
    pub n_sigma: HalfInteger,
    pub m_sigma: HalfInteger,
    pub n_r: u64,
    pub sigma: VortexCharge,
    pub energy: f64,
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("radius", format!("must be positive and finite, got {radius}")));
    }
    Ok(())
}

/// `sqrt(alpha^2 + 1/(4 R0^4))`.
pub fn alpha_tilde(alpha: f64, radius: f64) -> Result<f64> {
    check_radius(radius)?;
    Ok((alpha * alpha + 1.0 / (4.0 * radius.powi(4))).sqrt())
}

fn oscillator_level_unchecked(at: f64, radius: f64, eps: CurvatureSign, n: u64) -> f64 {
    let k = (n + 1) as f64;
    at * k + eps.value() * k * k / (2.0 * radius * radius)
}

/// `[2 alpha~ R0^2] - 1` on the pseudosphere, unbounded on the sphere.
pub fn oscillator_nmax(alpha: f64, radius: f64, eps: CurvatureSign) -> Result<NMax> {
    let at = alpha_tilde(alpha, radius)?;
    Ok(match eps {
        CurvatureSign::Sphere => NMax::Unbounded,
        CurvatureSign::Pseudosphere => {
            let top = snapped_floor(2.0 * at * radius * radius) - 1.0;
            if top < 0.0 {
                NMax::Empty
            } else {
                NMax::Finite(top as u64)
            }
        }
    })
}

/// Largest `N` whose level lies below the continuum edge on the pseudosphere,
/// `N + 1 < alpha~ R0^2`.
pub fn oscillator_bound_nmax(alpha: f64, radius: f64, eps: CurvatureSign) -> Result<NMax> {
    let at = alpha_tilde(alpha, radius)?;
    Ok(match eps {
        CurvatureSign::Sphere => NMax::Unbounded,
        CurvatureSign::Pseudosphere => {
            let a = at * radius * radius;
            // largest integer strictly below a, minus one
            let below = {
                let r = a.round();
                if (a - r).abs() < FLOOR_SNAP {
                    r - 1.0
                } else {
                    a.floor()
                }
            };
            let top = below - 1.0;
            if top < 0.0 {
                NMax::Empty
            } else {
                NMax::Finite(top as u64)
            }
        }
    })
}

/// `alpha~ (N+1) + eps (N+1)^2 / (2 R0^2)`.
pub fn oscillator_level(alpha: f64, radius: f64, eps: CurvatureSign, n: u64) -> Result<f64> {
    let at = alpha_tilde(alpha, radius)?;
    let nmax = oscillator_nmax(alpha, radius, eps)?;
    if !nmax.admits(n) {
        return Err(Error::NoBoundState {
            level: format!("N = {n}"),
            cutoff: nmax.to_string(),
        });
    }
    Ok(oscillator_level_unchecked(at, radius, eps, n))
}

/// All `(n_r, M)` with `N = 2 n_r + |M|`.
pub fn oscillator_enumerate(alpha: f64, radius: f64, eps: CurvatureSign, n: u64) -> Result<Vec<SpectrumLine>> {
    let energy = oscillator_level(alpha, radius, eps, n)?;
    let mut states = Vec::new();
    for n_r in 0..=n / 2 {
        let m = (n - 2 * n_r) as i64;
        states.push((n_r, m));
        if m != 0 {
            states.push((n_r, -m));
        }
    }
    let multiplicity = states.len() as u64;
    Ok(states
        .into_iter()
        .map(|(n_r, m)| SpectrumLine {
            n,
            m,
            n_r,
            energy,
            multiplicity,
        })
        .collect())
}

/// Enumerated degeneracy of level `N`.
pub fn oscillator_degeneracy(n: u64) -> u64 {
    n + 1
}

fn check_coulomb(gamma: f64, r0: f64) -> Result<()> {
    check_radius(r0)?;
    if !gamma.is_finite() {
        return Err(invalid("gamma", "must be finite"));
    }
    if r0 * gamma <= 0.0 {
        return Err(Error::NoBoundStates(format!("r0 gamma = {} is not positive", r0 * gamma)));
    }
    Ok(())
}

/// `N_sigma^max = sigma + [sqrt(r0 gamma) - (1/2 + sigma)]`, `None` when the
/// bracket is negative.
pub fn coulomb_nsigma_max(gamma: f64, r0: f64, sigma: VortexCharge) -> Result<Option<HalfInteger>> {
    check_coulomb(gamma, r0)?;
    let steps = snapped_floor((r0 * gamma).sqrt() - (0.5 + sigma.value()));
    if steps < 0.0 {
        return Ok(None);
    }
    Ok(Some(HalfInteger(sigma.doubled()).step(steps as i64)))
}

/// `-N(N+1)/(2 r0^2) - gamma^2 / (2 (N + 1/2)^2)` without the cutoff check.
pub fn coulomb_level_unchecked(gamma: f64, r0: f64, n_sigma: f64) -> f64 {
    -n_sigma * (n_sigma + 1.0) / (2.0 * r0 * r0) - gamma * gamma / (2.0 * (n_sigma + 0.5).powi(2))
}

fn check_sigma_grid(sigma: VortexCharge, n_sigma: HalfInteger) -> Result<()> {
    let offset = n_sigma.doubled() - sigma.doubled();
    if offset < 0 || offset % 2 != 0 {
        return Err(invalid(
            "n_sigma",
            format!("{n_sigma} is not on the grid sigma + {{0, 1, ...}} for sigma = {}", sigma.value()),
        ));
    }
    Ok(())
}

pub fn coulomb_level(gamma: f64, r0: f64, sigma: VortexCharge, n_sigma: HalfInteger) -> Result<f64> {
    check_sigma_grid(sigma, n_sigma)?;
    match coulomb_nsigma_max(gamma, r0, sigma)? {
        None => Err(Error::NoBoundStates(format!(
            "sqrt(r0 gamma) = {} leaves no level for sigma = {}",
            (r0 * gamma).sqrt(),
            sigma.value()
        ))),
        Some(max) if n_sigma > max => Err(Error::NoBoundState {
            level: format!("N_sigma = {n_sigma}"),
            cutoff: max.to_string(),
        }),
        Some(_) => Ok(coulomb_level_unchecked(gamma, r0, n_sigma.value())),
    }
}

/// States `m_sigma = sigma, sigma + 1, ..., N_sigma` with `n_r = N_sigma - m_sigma`.
pub fn coulomb_enumerate(gamma: f64, r0: f64, sigma: VortexCharge, n_sigma: HalfInteger) -> Result<Vec<CoulombLine>> {
    let energy = coulomb_level(gamma, r0, sigma, n_sigma)?;
    let top = (n_sigma.doubled() - sigma.doubled()) / 2;
    Ok((0..=top)
        .map(|k| CoulombLine {
            n_sigma,
            m_sigma: HalfInteger(sigma.doubled()).step(k),
            n_r: (top - k) as u64,
            sigma,
            energy,
        })
        .collect())
}

/// Every bound level of one vortex sector, ascending in `N_sigma`.
pub fn coulomb_spectrum(gamma: f64, r0: f64, sigma: VortexCharge) -> Result<Vec<(HalfInteger, f64)>> {
    let Some(max) = coulomb_nsigma_max(gamma, r0, sigma)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    let mut n = HalfInteger(sigma.doubled());
    while n <= max {
        out.push((n, coulomb_level_unchecked(gamma, r0, n.value())));
        n = n.step(1);
    }
    Ok(out)
}

/// Sign of `dE_C/dN_sigma` from a central difference of the closed form.
pub fn coulomb_slope(gamma: f64, r0: f64, n_sigma: f64) -> f64 {
    let h = 1e-5;
    (coulomb_level_unchecked(gamma, r0, n_sigma + h) - coulomb_level_unchecked(gamma, r0, n_sigma - h)) / (2.0 * h)
}

/// Right-hand side `2 gamma/(N+1) - eps (N+1)/(2 r0)` of the square-root form
/// of the oscillator spectrum at fixed Coulomb data, with `N = 2 N_sigma`.
pub fn sqrt_form_rhs(gamma: f64, r0: f64, eps: CurvatureSign, n_sigma: HalfInteger) -> f64 {
    let k = n_sigma.value() * 2.0 + 1.0;
    2.0 * gamma / k - eps.value() * k / (2.0 * r0)
}

/// On the sphere, whether the square-root form admits `N_sigma` at fixed `(gamma, r0)`.
pub fn sphere_positivity_admits(gamma: f64, r0: f64, n_sigma: HalfInteger) -> bool {
    sqrt_form_rhs(gamma, r0, CurvatureSign::Sphere, n_sigma) >= 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityCheck {
    pub n: u64,
    pub energy: f64,
    pub params: BohlinParams,
    pub sigma: VortexCharge,
    pub n_sigma: HalfInteger,
    /// `|E_C - coulomb_level(gamma, r0, sigma, N/2)|` from the closed forms.
    pub dictionary_residual: f64,
    /// `|sqrt(1/(4 r0^2) - 2 eps gamma/r0 - 2 E_C) - (2 gamma/(N+1) - eps (N+1)/(2 r0))|`.
    pub sqrt_identity_residual: f64,
    pub residual: f64,
    /// Whether `N_sigma` lies within the Coulomb cutoff for the image `(gamma, r0)`.
    pub inside_coulomb_spectrum: bool,
}

/// Maps oscillator level `N` through the parameter dictionary and compares it
/// with the Coulomb closed form at `sigma = (N mod 2)/2`, `N_sigma = N/2`.
pub fn spectral_duality_check(alpha: f64, radius: f64, eps: CurvatureSign, n: u64) -> Result<DualityCheck> {
    let energy = oscillator_level(alpha, radius, eps, n)?;
    let params = params_unchecked(energy, alpha, radius, eps.value());
    let sigma = VortexCharge::from_parity(n);
    let n_sigma = HalfInteger(n as i64);
    let (gamma, r0) = (params.gamma, params.r0);

    let dictionary_residual = (params.energy_c - coulomb_level_unchecked(gamma, r0, n_sigma.value())).abs();
    let radicand = 1.0 / (4.0 * r0 * r0) - eps.value() * 2.0 * gamma / r0 - 2.0 * params.energy_c;
    let rhs = sqrt_form_rhs(gamma, r0, eps, n_sigma);
    let sqrt_identity_residual = if radicand < 0.0 {
        f64::INFINITY
    } else {
        (radicand.sqrt() - rhs).abs()
    };
    let inside_coulomb_spectrum = match coulomb_nsigma_max(gamma, r0, sigma) {
        Ok(Some(max)) => n_sigma <= max,
        Ok(None) | Err(Error::NoBoundStates(_)) => false,
        Err(e) => return Err(e),
    };
    Ok(DualityCheck {
        n,
        energy,
        params,
        sigma,
        n_sigma,
        dictionary_residual,
        sqrt_identity_residual,
        residual: dictionary_residual.max(sqrt_identity_residual),
        inside_coulomb_spectrum,
    })
}

/// Both vortex sectors of one Coulomb problem and how they sit relative to each other.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VortexShift {
    pub zero: Vec<(HalfInteger, f64)>,
    pub half: Vec<(HalfInteger, f64)>,
    /// Smallest `|E_0 - E_1/2|` over all pairs of levels.
    pub min_separation: f64,
    /// Merged by `N_sigma`, the energies increase strictly.
    pub interleaved: bool,
}

pub fn vortex_shift(gamma: f64, r0: f64) -> Result<VortexShift> {
    let zero = coulomb_spectrum(gamma, r0, VortexCharge::Zero)?;
    let half = coulomb_spectrum(gamma, r0, VortexCharge::Half)?;
    let mut min_separation = f64::INFINITY;
    for (_, a) in &zero {
        for (_, b) in &half {
            min_separation = min_separation.min((a - b).abs());
        }
    }
    let mut merged: Vec<(HalfInteger, f64)> = zero.iter().chain(half.iter()).copied().collect();
    merged.sort_by_key(|(n, _)| *n);
    let interleaved = merged.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(VortexShift {
        zero,
        half,
        min_separation,
        interleaved,
    })
}

pub fn write_oscillator_csv<W: Write>(lines: &[SpectrumLine], mut out: W) -> Result<()> {
    writeln!(out, "N,M,n_r,E,multiplicity")?;
    for l in lines {
        writeln!(out, "{},{},{},{:.15e},{}", l.n, l.m, l.n_r, l.energy, l.multiplicity)?;
    }
    Ok(())
}

pub fn write_coulomb_csv<W: Write>(lines: &[CoulombLine], mut out: W) -> Result<()> {
    writeln!(out, "N_sigma,m_sigma,n_r,sigma,E_C")?;
    for l in lines {
        writeln!(
            out,
            "{},{},{},{},{:.15e}",
            l.n_sigma,
            l.m_sigma,
            l.n_r,
            l.sigma.value(),
            l.energy
        )?;
    }
    Ok(())
}
