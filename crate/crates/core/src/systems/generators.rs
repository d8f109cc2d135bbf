use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_coulomb_domain, CoulombModel, CurvedModel, PhasePoint, SystemKind};
use crate::error::{invalid, Result};
use crate::geometry::{ambient_jet, check_operative, CurvatureSign};
use crate::jet::{Jet, I};

/// Shift coefficient as printed for `J_i -> J_i + c R0 B0 x_i`.
pub const PRINTED_SHIFT_COEFFICIENT: f64 = 4.0;
/// Coefficient for which the shifted generators close under the magnetic bracket.
pub const CLOSING_SHIFT_COEFFICIENT: f64 = -4.0;

/// The complex rotation generator `Jbold = (i J1 - J2)/2` and the real `J = eps J3 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub jbold: Complex64,
    pub j: f64,
}

pub(crate) fn jbold_jet<const N: usize>(z: Jet<N>, pi: Jet<N>, eps: CurvatureSign) -> Jet<N> {
    let zb = z.conj();
    pi + zb * zb * pi.conj() * eps.value()
}

pub(crate) fn jrot_jet<const N: usize>(z: Jet<N>, pi: Jet<N>) -> Jet<N> {
    ((z * pi - z.conj() * pi.conj()) * I).re()
}

/// `Jbold + (i c/2) R0 B0 xbar`, `J + (eps c/2) R0 B0 x3`.
pub(crate) fn shifted_generators_jet<const N: usize>(
    z: Jet<N>,
    pi: Jet<N>,
    eps: CurvatureSign,
    radius: f64,
    b0: f64,
    coefficient: f64,
) -> (Jet<N>, Jet<N>) {
    let jb = jbold_jet(z, pi, eps);
    let j = jrot_jet(z, pi);
    if b0 == 0.0 {
        return (jb, j);
    }
    let (x, x3) = ambient_jet(z, radius, eps);
    let k = 0.5 * coefficient * radius * b0;
    (jb + x.conj() * (I * k), j + x3 * (eps.value() * k))
}

pub(crate) fn hidden_invariant_jet<const N: usize>(
    z: Jet<N>,
    pi: Jet<N>,
    alpha: f64,
    radius: f64,
    eps: CurvatureSign,
) -> Jet<N> {
    let jb = jbold_jet(z, pi, eps);
    let (x, x3) = ambient_jet(z, radius, eps);
    let ratio = x.conj() / x3;
    jb * jb / (2.0 * radius * radius) + ratio * ratio * (0.5 * alpha * alpha * radius * radius)
}

pub(crate) fn runge_lenz_jet<const N: usize>(w: Jet<N>, p: Jet<N>, gamma: f64, r0: f64) -> Jet<N> {
    let jc = jrot_jet(w, p);
    let jbc = jbold_jet(w, p, CurvatureSign::Pseudosphere);
    let (x, _) = ambient_jet(w, r0, CurvatureSign::Pseudosphere);
    -(jc * jbc * I) / r0 + x.conj() * gamma / x.modulus()
}

/// Generators with the printed shift coefficient.
pub fn generator_set(pt: &PhasePoint, eps: CurvatureSign, b0: f64, radius: f64) -> Result<GeneratorSet> {
    generator_set_with(pt, eps, b0, radius, PRINTED_SHIFT_COEFFICIENT)
}

pub fn generator_set_with(
    pt: &PhasePoint,
    eps: CurvatureSign,
    b0: f64,
    radius: f64,
    coefficient: f64,
) -> Result<GeneratorSet> {
    check_operative(pt.z, eps)?;
    let (z, pi) = pt.constants();
    let (jb, j) = shifted_generators_jet(z, pi, eps, radius, b0, coefficient);
    Ok(GeneratorSet {
        jbold: jb.value,
        j: j.value.re,
    })
}

/// `Jbold^2/(2R0^2) + (alpha^2 R0^2/2) xbar^2/x3^2`, for the model without field.
pub fn hidden_invariant(pt: &PhasePoint, model: &CurvedModel) -> Result<Complex64> {
    if !matches!(model.kind, SystemKind::Oscillator | SystemKind::FreeParticle) {
        return Err(invalid("kind", "the hidden invariant belongs to the oscillator"));
    }
    check_operative(pt.z, model.eps)?;
    let (z, pi) = pt.constants();
    Ok(hidden_invariant_jet(z, pi, model.alpha, model.radius, model.eps).value)
}

/// `A = -i J_C Jbold_C / r0 + gamma xbar_C/|x_C|` at `pt = (w, p)`.
pub fn runge_lenz(pt: &PhasePoint, model: &CoulombModel) -> Result<Complex64> {
    check_coulomb_domain(pt.z)?;
    let (w, p) = pt.constants();
    Ok(runge_lenz_jet(w, p, model.gamma, model.r0).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::VortexCharge;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn generators_at_origin_and_on_real_slice() {
        for eps in CurvatureSign::both() {
            let g = generator_set(&PhasePoint::new(c(0.0, 0.0), c(0.7, 0.0)), eps, 0.0, 1.0).unwrap();
            assert_eq!(g.jbold, c(0.7, 0.0));
            assert_eq!(g.j, 0.0);
            let g = generator_set(&PhasePoint::new(c(0.4, 0.0), c(-1.3, 0.0)), eps, 0.0, 1.0).unwrap();
            assert_eq!(g.j, 0.0);
        }
    }

    #[test]
    fn hidden_invariant_at_origin() {
        let m = CurvedModel::oscillator(CurvatureSign::Pseudosphere, 1.5, 2.0).unwrap();
        let inv = hidden_invariant(&PhasePoint::new(c(0.0, 0.0), c(0.6, 0.0)), &m).unwrap();
        assert!((inv - c(0.36 / 4.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn runge_lenz_without_coupling_is_angular() {
        let m = CoulombModel::new(1.0, 0.0, VortexCharge::Zero).unwrap();
        let pt = PhasePoint::new(c(0.4, 0.0), c(0.3, 0.0));
        // real slice: J_C = 0, so the angular term vanishes too
        assert_eq!(runge_lenz(&pt, &m).unwrap(), c(0.0, 0.0));
        let pt = PhasePoint::new(c(0.4, 0.0), c(0.3, 0.5));
        let a = runge_lenz(&pt, &m).unwrap();
        let (w, p) = pt.constants();
        let expected = -(jrot_jet(w, p) * jbold_jet(w, p, CurvatureSign::Pseudosphere) * I).value;
        assert!((a - expected).norm() < 1e-15);
        assert!(runge_lenz(&PhasePoint::new(c(0.0, 0.0), c(1.0, 0.0)), &m).is_err());
    }
}
