use nalgebra::Matrix4;
use num_complex::Complex64;

use super::{bohlin_jacobian, bohlin_map};
use crate::error::{Error, Result};
use crate::geometry::{check_operative, metric_factor, stereo_to_ambient, CurvatureSign, StereoPoint};
use crate::systems::{PhasePoint, SymplecticForm};

/// Image field `B_C = (B0 / (2 r0)) (x_C3/|x_C| - eps)` at the Coulomb point `w`,
/// with `x_C` on the pseudosphere of radius `r0`.
pub fn magnetic_image_field(w: Complex64, b0: f64, r0: f64, eps_src: CurvatureSign) -> Result<f64> {
    if w == Complex64::new(0.0, 0.0) {
        return Err(Error::Singularity("image field at w = 0"));
    }
    check_operative(w, CurvatureSign::Pseudosphere)?;
    let x = stereo_to_ambient(StereoPoint(w), r0, CurvatureSign::Pseudosphere)?;
    let modulus = x.bold().norm();
    Ok(b0 / (2.0 * r0) * (x.x3 / modulus - eps_src.value()))
}

/// Pulls the Coulomb-side form (canonical plus the `B_C`-weighted area form on
/// the pseudosphere of radius `R0^2`) back through the Bohlin map and compares
/// it with the source form (canonical plus the `B0`-weighted area form).
/// Returns `max |J^T Omega_C J - Omega_src| / max(1, max |Omega_src|)`.
pub fn magnetic_pullback_residual(pt: &PhasePoint, b0: f64, radius: f64, eps_src: CurvatureSign) -> Result<f64> {
    check_operative(pt.z, eps_src)?;
    let r0 = radius * radius;
    let image = bohlin_map(pt)?;
    let w = image.z;
    let field = magnetic_image_field(w, b0, r0, eps_src)?;
    let mut target: Matrix4<f64> = *SymplecticForm::canonical().matrix();
    let area = 2.0 * field * metric_factor(StereoPoint(w), r0, CurvatureSign::Pseudosphere)?;
    target[(0, 1)] += area;
    target[(1, 0)] -= area;
    let source = *SymplecticForm::magnetic(pt.z, radius, eps_src, b0)?.matrix();
    let j = bohlin_jacobian(pt)?;
    let diff = j.transpose() * target * j - source;
    Ok(diff.abs().max() / source.abs().max().max(1.0))
}
