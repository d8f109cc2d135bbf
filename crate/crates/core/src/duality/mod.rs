//! The Bohlin map `(z, pi) -> (z^2, pi/(2z))` from the curved oscillator to
//! the pseudosphere Coulomb problem, the parameter dictionary, the magnetic
//! image field, the flat limit and the Kustaanheimo-Stiefel reduction.

pub mod flat;
pub mod ks;
mod magnetic;

use std::f64::consts::TAU;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use magnetic::{magnetic_image_field, magnetic_pullback_residual};

use crate::dynamics::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::geometry::{check_operative, CurvatureSign};
use crate::jet::{Jet, Jet4};
use crate::sampling::{random_phase_point, scale_to_energy, SeededRng};
use crate::systems::{
    coulomb_jet, hamiltonian_osc, hidden_invariant_jet, jrot_jet, runge_lenz_jet, CurvedModel, PhasePoint,
    SymplecticForm, SystemKind,
};

/// Coulomb-side parameters `r0 = R0^2`, `gamma = E/2`, `E_C = -(alpha^2 + eps E/r0)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BohlinParams {
    pub r0: f64,
    pub gamma: f64,
    pub energy_c: f64,
}

pub(crate) fn bohlin_jet<const N: usize>(z: Jet<N>, pi: Jet<N>) -> (Jet<N>, Jet<N>) {
    (z * z, pi / (z * 2.0))
}

pub fn bohlin_map(pt: &PhasePoint) -> Result<PhasePoint> {
    if pt.z == Complex64::new(0.0, 0.0) {
        return Err(Error::Singularity("Bohlin map at z = 0"));
    }
    let (w, p) = bohlin_jet(Jet::<0>::constant(pt.z), Jet::constant(pt.pi));
    Ok(PhasePoint::new(w.value, p.value))
}

/// Inverse on sheet `branch`: `arg w` is taken in `[0, 2 pi)` so that sheet 0
/// has `arg z` in `[0, pi)`; sheet 1 negates `z` and `pi`.
pub fn bohlin_inverse(pt: &PhasePoint, branch: u8) -> Result<PhasePoint> {
    if branch > 1 {
        return Err(invalid("branch", "must be 0 or 1"));
    }
    if pt.z == Complex64::new(0.0, 0.0) {
        return Err(Error::Singularity("inverse Bohlin map at w = 0"));
    }
    let mut arg = pt.z.arg();
    if arg < 0.0 {
        arg += TAU;
    }
    let mut z = Complex64::from_polar(pt.z.norm().sqrt(), arg / 2.0);
    if branch == 1 {
        z = -z;
    }
    Ok(PhasePoint::new(z, 2.0 * z * pt.pi))
}

/// Real Jacobian of the Bohlin map over `(Re, Im)` of `(z, pi) -> (w, p)`.
pub fn bohlin_jacobian(pt: &PhasePoint) -> Result<Matrix4<f64>> {
    if pt.z == Complex64::new(0.0, 0.0) {
        return Err(Error::Singularity("Bohlin map at z = 0"));
    }
    let (z, pi) = pt.seed();
    let (w, p) = bohlin_jet(z, pi);
    Ok(jacobian_rows(&w, &p))
}

fn jacobian_rows(w: &Jet4, p: &Jet4) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for k in 0..4 {
        m[(0, k)] = w.grad[k].re;
        m[(1, k)] = w.grad[k].im;
        m[(2, k)] = p.grad[k].re;
        m[(3, k)] = p.grad[k].im;
    }
    m
}

/// `max |J^T Omega J - Omega|` for the canonical form.
pub fn bohlin_canonicity_residual(pt: &PhasePoint) -> Result<f64> {
    let j = bohlin_jacobian(pt)?;
    let omega = SymplecticForm::canonical();
    Ok((j.transpose() * omega.matrix() * j - omega.matrix()).abs().max())
}

pub fn bohlin_params(energy: f64, model: &CurvedModel) -> Result<BohlinParams> {
    if model.kind != SystemKind::Oscillator {
        return Err(invalid("kind", "the parameter dictionary starts from the oscillator"));
    }
    Ok(params_unchecked(energy, model.alpha, model.radius, model.eps.value()))
}

pub(crate) fn params_unchecked(energy: f64, alpha: f64, radius: f64, eps: f64) -> BohlinParams {
    let r0 = radius * radius;
    BohlinParams {
        r0,
        gamma: energy / 2.0,
        energy_c: -(alpha * alpha + eps * energy / r0) / 2.0,
    }
}

/// `|H_C(w, p) - E_C|` at the Bohlin image of one oscillator point.
pub fn coulomb_surface_residual(pt: &PhasePoint, params: &BohlinParams) -> Result<f64> {
    let image = bohlin_map(pt)?;
    let (w, p) = image.constants();
    Ok((coulomb_jet(w, p, params.gamma, params.r0).value.re - params.energy_c).abs())
}

/// Maximum Coulomb-surface residual over the Bohlin images of all samples.
pub fn verify_bohlin_surface(traj: &Trajectory, model: &CurvedModel, energy: f64) -> Result<f64> {
    let params = bohlin_params(energy, model)?;
    let residuals: Result<Vec<f64>> = traj
        .points
        .par_iter()
        .map(|pt| coulomb_surface_residual(pt, &params))
        .collect();
    Ok(residuals?.into_iter().fold(0.0, f64::max))
}

/// `(|J - 2 J_C|, |I - 2A|)` at one oscillator point, with the Coulomb side
/// built from the dictionary at energy `energy`.
pub fn conserved_map_check(pt: &PhasePoint, model: &CurvedModel, energy: f64) -> Result<(f64, f64)> {
    check_operative(pt.z, model.eps)?;
    let params = bohlin_params(energy, model)?;
    let image = bohlin_map(pt)?;
    // |z| > 1 on the sphere lands on the second sheet, where the Coulomb vector flips sign
    check_operative(image.z, CurvatureSign::Pseudosphere)?;
    let (z, pi) = pt.constants();
    let (w, p) = image.constants();
    let j = jrot_jet(z, pi).value;
    let jc = jrot_jet(w, p).value;
    let inv = hidden_invariant_jet(z, pi, model.alpha, model.radius, model.eps).value;
    let a = runge_lenz_jet(w, p, params.gamma, params.r0).value;
    Ok(((j - 2.0 * jc).norm(), (inv - 2.0 * a).norm()))
}

/// A random oscillator point on the energy surface `H = energy`, drawn from
/// `|z| < 0.9` so that its Bohlin image lies in the Poincare disk.
pub fn on_shell_point(rng: &mut SeededRng, model: &CurvedModel, energy: f64) -> Result<PhasePoint> {
    for _ in 0..10_000 {
        let pt = random_phase_point(rng, CurvatureSign::Pseudosphere);
        if pt.z.norm() < 1e-3 {
            continue;
        }
        if let Some(on) = scale_to_energy(pt, energy, |q| hamiltonian_osc(q, model))? {
            return Ok(on);
        }
    }
    Err(invalid("energy", format!("no accessible points at E = {energy}")))
}
