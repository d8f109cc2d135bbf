//! Fit of the magnetic generator-shift coefficient.
//!
//! Coordinates commute under the magnetic bracket, so every closure
//! residual is affine in the shift coefficient `c` and the best `c` is a
//! one-parameter least-squares fit.

use num_complex::Complex64;
use serde::Serialize;

use super::form::{complex_bracket, SymplecticForm};
use super::observable::catalog;
use super::{CurvedModel, PhasePoint, PRINTED_SHIFT_COEFFICIENT};
use crate::error::{invalid, Result};
use crate::geometry::CurvatureSign;
use crate::jet::I;

#[derive(Debug, Clone, Serialize)]
pub struct MagneticCalibration {
    pub printed_coefficient: f64,
    pub fitted_coefficient: f64,
    pub residual_printed: f64,
    pub residual_fitted: f64,
    /// Measured `(J'J'bar + eps J'^2)/(2R0^2) - H_free` at the fitted coefficient.
    pub casimir_offset: f64,
    /// Spread of that offset over the sample, zero when it is a constant.
    pub casimir_offset_spread: f64,
    /// The printed offset `(4 B0)^2`.
    pub printed_offset: f64,
    pub points: usize,
}

/// Residuals of `{J', J'bar} = -2i eps J'`, `{J', J} = i J'`,
/// `{J, H_osc} = 0` and `{J', H_free} = 0` under the magnetic bracket.
pub fn closure_residuals(pt: &PhasePoint, model: &CurvedModel, coefficient: f64) -> Result<[Complex64; 4]> {
    let (eps, radius, b0) = (model.eps, model.radius, model.b0);
    let form = SymplecticForm::magnetic(pt.z, radius, eps, b0)?;
    let jb = catalog::jbold(eps, radius, b0, coefficient);
    let j = catalog::jrot(eps, radius, b0, coefficient);
    let h = catalog::hamiltonian_osc(model);
    let h_free = catalog::hamiltonian_free(radius, eps);
    let jb_val = jb.complex_value(pt)?;
    let j_val = j.complex_value(pt)?;
    Ok([
        complex_bracket(&jb, &jb.conj(), pt, &form)? + 2.0 * I * eps.value() * j_val,
        complex_bracket(&jb, &j, pt, &form)? - I * jb_val,
        complex_bracket(&j, &h, pt, &form)?,
        complex_bracket(&jb, &h_free, pt, &form)?,
    ])
}

fn flatten(pt: &PhasePoint, model: &CurvedModel, c: f64, out: &mut Vec<f64>) -> Result<()> {
    for r in closure_residuals(pt, model, c)? {
        out.push(r.re);
        out.push(r.im);
    }
    Ok(())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn calibrate_magnetic_shift(model: &CurvedModel, points: &[PhasePoint]) -> Result<MagneticCalibration> {
    if model.b0 == 0.0 {
        return Err(invalid("b0", "calibration needs a non-zero field"));
    }
    if points.is_empty() {
        return Err(invalid("points", "calibration needs sample points"));
    }
    let mut r0 = Vec::new();
    let mut r1 = Vec::new();
    for pt in points {
        flatten(pt, model, 0.0, &mut r0)?;
        flatten(pt, model, 1.0, &mut r1)?;
    }
    let d: Vec<f64> = r1.iter().zip(&r0).map(|(a, b)| a - b).collect();
    let dd: f64 = d.iter().map(|x| x * x).sum();
    let fitted = -r0.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / dd;

    let residual_at = |c: f64| max_abs(&r0.iter().zip(&d).map(|(a, b)| a + c * b).collect::<Vec<_>>());

    let eps = model.eps;
    let mut offsets = Vec::with_capacity(points.len());
    for pt in points {
        let g = super::generator_set_with(pt, eps, model.b0, model.radius, fitted)?;
        let casimir = (g.jbold.norm_sqr() + eps.value() * g.j * g.j) / (2.0 * model.radius * model.radius);
        offsets.push(casimir - super::hamiltonian_free(pt, model.radius, eps)?);
    }
    let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
    let spread = offsets.iter().fold(0.0f64, |m, o| m.max((o - mean).abs()));

    Ok(MagneticCalibration {
        printed_coefficient: PRINTED_SHIFT_COEFFICIENT,
        fitted_coefficient: fitted,
        residual_printed: residual_at(PRINTED_SHIFT_COEFFICIENT),
        residual_fitted: residual_at(fitted),
        casimir_offset: mean,
        casimir_offset_spread: spread,
        printed_offset: 16.0 * model.b0 * model.b0,
        points: points.len(),
    })
}

/// Closed form of the Casimir offset at the closing coefficient.
pub fn expected_casimir_offset(eps: CurvatureSign, radius: f64, b0: f64) -> f64 {
    2.0 * eps.value() * radius * radius * b0 * b0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_phase_point, seeded};
    use crate::systems::CLOSING_SHIFT_COEFFICIENT;

    #[test]
    fn fit_recovers_closing_coefficient() {
        let mut rng = seeded(33);
        for eps in CurvatureSign::both() {
            let model = CurvedModel::oscillator(eps, 1.4, 0.7)
                .unwrap()
                .with_field(0.35, PRINTED_SHIFT_COEFFICIENT)
                .unwrap();
            let pts: Vec<_> = (0..200).map(|_| random_phase_point(&mut rng, eps)).collect();
            let cal = calibrate_magnetic_shift(&model, &pts).unwrap();
            assert!((cal.fitted_coefficient - CLOSING_SHIFT_COEFFICIENT).abs() < 1e-9);
            assert!(cal.residual_fitted < 1e-8);
            assert!(cal.residual_printed > 1e-3);
            assert!(cal.casimir_offset_spread < 1e-9);
            assert!((cal.casimir_offset - expected_casimir_offset(eps, 1.4, 0.35)).abs() < 1e-9);
        }
    }
}
