//! Potentials, Hamiltonians, rotation generators, hidden invariants and the
//! (canonical or magnetic) Poisson structure on the four-real-dimensional
//! phase space `(z, pi)`.
//!
//! Phase coordinates are ordered `(Re z, Im z, Re pi, Im pi)` everywhere.
//! Every formula is written once over [`Jet`]s: `Jet<0>` gives plain values
//! and `Jet<4>` gives exact gradients.

pub mod algebra;
mod calibration;
mod form;
mod generators;
pub mod observable;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use algebra::{algebra_suite, AlgebraReport, AlgebraSettings, RelationResidual, Sector};
pub use calibration::{calibrate_magnetic_shift, closure_residuals, expected_casimir_offset, MagneticCalibration};
pub use form::{complex_bracket, poisson_bracket, self_test_bracket_sign, symplectic_form, SymplecticForm};
pub use generators::{
    generator_set, generator_set_with, hidden_invariant, runge_lenz, GeneratorSet, CLOSING_SHIFT_COEFFICIENT,
    PRINTED_SHIFT_COEFFICIENT,
};
pub(crate) use generators::{hidden_invariant_jet, jrot_jet, runge_lenz_jet, shifted_generators_jet};
pub use observable::{gradient, ExactObservable, Observable, Part, SampledObservable};

use crate::error::{invalid, Error, Result};
use crate::geometry::{check_operative, CurvatureSign};
use crate::jet::{Jet, Jet4};

/// Minimum `|w|` kept away from the Coulomb centre.
pub const COULOMB_CENTRE_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub z: Complex64,
    pub pi: Complex64,
}

impl PhasePoint {
    pub fn new(z: Complex64, pi: Complex64) -> Self {
        Self { z, pi }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.z.re, self.z.im, self.pi.re, self.pi.im]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            z: Complex64::new(a[0], a[1]),
            pi: Complex64::new(a[2], a[3]),
        }
    }

    /// `(z, pi)` as jets seeded on the four real phase coordinates.
    pub fn seed(&self) -> (Jet4, Jet4) {
        (
            Jet::complex_variable(self.z, 0, 1),
            Jet::complex_variable(self.pi, 2, 3),
        )
    }

    pub(crate) fn constants(&self) -> (Jet<0>, Jet<0>) {
        (Jet::constant(self.z), Jet::constant(self.pi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SystemKind {
    FreeParticle,
    Oscillator,
    /// Coulomb potential on the pseudosphere of the model's radius.
    Coulomb { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvedModel {
    pub eps: CurvatureSign,
    pub radius: f64,
    pub alpha: f64,
    pub b0: f64,
    pub kind: SystemKind,
    /// Coefficient `c` of the magnetic generator shift.
    pub shift_coefficient: f64,
}

impl CurvedModel {
    pub fn oscillator(eps: CurvatureSign, radius: f64, alpha: f64) -> Result<Self> {
        Self {
            eps,
            radius,
            alpha,
            b0: 0.0,
            kind: SystemKind::Oscillator,
            shift_coefficient: PRINTED_SHIFT_COEFFICIENT,
        }
        .validated()
    }

    pub fn free(eps: CurvatureSign, radius: f64) -> Result<Self> {
        Self {
            eps,
            radius,
            alpha: 0.0,
            b0: 0.0,
            kind: SystemKind::FreeParticle,
            shift_coefficient: PRINTED_SHIFT_COEFFICIENT,
        }
        .validated()
    }

    pub fn with_field(mut self, b0: f64, shift_coefficient: f64) -> Result<Self> {
        self.b0 = b0;
        self.shift_coefficient = shift_coefficient;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(invalid("radius", format!("must be positive, got {}", self.radius)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be non-negative, got {}", self.alpha)));
        }
        if !self.b0.is_finite() || !self.shift_coefficient.is_finite() {
            return Err(invalid("b0", "must be finite"));
        }
        if let SystemKind::Coulomb { gamma } = self.kind {
            if self.eps != CurvatureSign::Pseudosphere {
                return Err(invalid("epsilon", "the Coulomb system lives on the pseudosphere"));
            }
            if !gamma.is_finite() {
                return Err(invalid("gamma", "must be finite"));
            }
        }
        Ok(self)
    }

    pub fn check_domain(&self, z: Complex64) -> Result<()> {
        match self.kind {
            SystemKind::Coulomb { .. } => check_coulomb_domain(z),
            _ => check_operative(z, self.eps),
        }
    }

    pub(crate) fn hamiltonian_jet<const N: usize>(&self, z: Jet<N>, pi: Jet<N>) -> Jet<N> {
        match self.kind {
            SystemKind::FreeParticle => free_jet(z, pi, self.radius, self.eps),
            SystemKind::Oscillator => {
                free_jet(z, pi, self.radius, self.eps) + osc_potential_jet(z, self.alpha, self.radius, self.eps)
            }
            SystemKind::Coulomb { gamma } => coulomb_jet(z, pi, gamma, self.radius),
        }
    }

    pub fn hamiltonian(&self, pt: &PhasePoint) -> Result<f64> {
        self.check_domain(pt.z)?;
        let (z, pi) = pt.constants();
        Ok(self.hamiltonian_jet(z, pi).value.re)
    }
}

/// Vortex charge of the Coulomb side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VortexCharge {
    Zero,
    Half,
}

impl VortexCharge {
    pub fn value(self) -> f64 {
        match self {
            VortexCharge::Zero => 0.0,
            VortexCharge::Half => 0.5,
        }
    }

    /// `2 sigma` as an integer.
    pub fn doubled(self) -> i64 {
        match self {
            VortexCharge::Zero => 0,
            VortexCharge::Half => 1,
        }
    }

    pub fn from_parity(n: u64) -> Self {
        if n % 2 == 0 {
            VortexCharge::Zero
        } else {
            VortexCharge::Half
        }
    }
}

impl std::str::FromStr for VortexCharge {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(VortexCharge::Zero),
            "half" | "1/2" | "0.5" => Ok(VortexCharge::Half),
            other => Err(invalid("sigma", format!("expected 0 or half, got `{other}`"))),
        }
    }
}

/// Coulomb system on the pseudosphere of radius `r0`. The vortex charge
/// only enters the quantum problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombModel {
    pub r0: f64,
    pub gamma: f64,
    pub sigma: VortexCharge,
}

impl CoulombModel {
    pub fn new(r0: f64, gamma: f64, sigma: VortexCharge) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(invalid("r0", format!("must be positive, got {r0}")));
        }
        if !gamma.is_finite() {
            return Err(invalid("gamma", "must be finite"));
        }
        Ok(Self { r0, gamma, sigma })
    }

    pub(crate) fn hamiltonian_jet<const N: usize>(&self, w: Jet<N>, p: Jet<N>) -> Jet<N> {
        coulomb_jet(w, p, self.gamma, self.r0)
    }
}

pub fn check_coulomb_domain(w: Complex64) -> Result<()> {
    let modulus = w.norm();
    if modulus == 0.0 {
        return Err(Error::Singularity("Coulomb centre w = 0"));
    }
    if modulus < COULOMB_CENTRE_MARGIN {
        return Err(Error::OutsideDomain {
            modulus,
            reason: "inside the Coulomb centre margin",
        });
    }
    check_operative(w, CurvatureSign::Pseudosphere)
}

pub(crate) fn free_jet<const N: usize>(z: Jet<N>, pi: Jet<N>, radius: f64, eps: CurvatureSign) -> Jet<N> {
    let f = (z * z.conj()).re() * eps.value() + 1.0;
    f * f * (pi * pi.conj()).re() / (2.0 * radius * radius)
}

pub(crate) fn osc_potential_jet<const N: usize>(z: Jet<N>, alpha: f64, radius: f64, eps: CurvatureSign) -> Jet<N> {
    let zz = (z * z.conj()).re();
    let d = 1.0 - zz * eps.value();
    zz * (2.0 * alpha * alpha * radius * radius) / (d * d)
}

pub(crate) fn coulomb_potential_jet<const N: usize>(w: Jet<N>, gamma: f64, r0: f64) -> Jet<N> {
    let ww = (w * w.conj()).re();
    -(ww + 1.0) * (gamma / r0) / (w.modulus() * 2.0)
}

pub(crate) fn coulomb_jet<const N: usize>(w: Jet<N>, p: Jet<N>, gamma: f64, r0: f64) -> Jet<N> {
    let f = 1.0 - (w * w.conj()).re();
    f * f * (p * p.conj()).re() / (2.0 * r0 * r0) + coulomb_potential_jet(w, gamma, r0)
}

/// `2 alpha^2 R0^2 z zbar / (1 - eps z zbar)^2`.
pub fn potential_osc(z: Complex64, model: &CurvedModel) -> Result<f64> {
    check_operative(z, model.eps)?;
    Ok(osc_potential_jet(Jet::<0>::constant(z), model.alpha, model.radius, model.eps).value.re)
}

/// `-(gamma/r0) (1 + w wbar) / (2|w|)`.
pub fn potential_coulomb(w: Complex64, model: &CoulombModel) -> Result<f64> {
    check_coulomb_domain(w)?;
    Ok(coulomb_potential_jet(Jet::<0>::constant(w), model.gamma, model.r0).value.re)
}

/// `(1 + eps z zbar)^2 pi pibar / (2 R0^2)`.
pub fn hamiltonian_free(pt: &PhasePoint, radius: f64, eps: CurvatureSign) -> Result<f64> {
    check_operative(pt.z, eps)?;
    if !(radius > 0.0) {
        return Err(invalid("radius", "must be positive"));
    }
    let (z, pi) = pt.constants();
    Ok(free_jet(z, pi, radius, eps).value.re)
}

pub fn hamiltonian_osc(pt: &PhasePoint, model: &CurvedModel) -> Result<f64> {
    check_operative(pt.z, model.eps)?;
    let (z, pi) = pt.constants();
    Ok((free_jet(z, pi, model.radius, model.eps) + osc_potential_jet(z, model.alpha, model.radius, model.eps))
        .value
        .re)
}

/// `(1 - w wbar)^2 p pbar / (2 r0^2) - (gamma/r0) (1 + w wbar) / (2|w|)`, with `pt = (w, p)`.
pub fn hamiltonian_coulomb(pt: &PhasePoint, model: &CoulombModel) -> Result<f64> {
    check_coulomb_domain(pt.z)?;
    let (w, p) = pt.constants();
    Ok(model.hamiltonian_jet(w, p).value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_phase_point, seeded};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn oscillator_potential_examples() {
        let m = CurvedModel::oscillator(CurvatureSign::Pseudosphere, 1.0, 1.0).unwrap();
        assert_eq!(potential_osc(c(0.0, 0.0), &m).unwrap(), 0.0);
        assert!((potential_osc(c(0.5, 0.0), &m).unwrap() - 0.32).abs() < 1e-15);
        let sphere = CurvedModel::oscillator(CurvatureSign::Sphere, 1.0, 1.0).unwrap();
        assert!(potential_osc(c(1.0, 0.0), &sphere).is_err());
    }

    #[test]
    fn oscillator_potential_flat_limit() {
        let radius = 1e3;
        let zf = c(0.7, -0.4);
        for eps in CurvatureSign::both() {
            let m = CurvedModel::oscillator(eps, radius, 1.3).unwrap();
            let v = potential_osc(zf / (2.0 * radius), &m).unwrap();
            let flat = 1.3f64.powi(2) * zf.norm_sqr() / 2.0;
            assert!((v - flat).abs() < 1e-6 * flat);
        }
    }

    #[test]
    fn coulomb_potential_examples() {
        let m = CoulombModel::new(1.0, 1.0, VortexCharge::Zero).unwrap();
        assert!((potential_coulomb(c(0.5, 0.0), &m).unwrap() + 1.25).abs() < 1e-15);
        let near = potential_coulomb(c(0.999, 0.0), &m).unwrap();
        assert!((near + (1.0 + 0.998001) / 1.998).abs() < 1e-3);
        let flipped = CoulombModel::new(1.0, -1.0, VortexCharge::Zero).unwrap();
        assert_eq!(potential_coulomb(c(0.3, 0.2), &flipped).unwrap(), -potential_coulomb(c(0.3, 0.2), &m).unwrap());
        assert!(matches!(potential_coulomb(c(0.0, 0.0), &m), Err(Error::Singularity(_))));
    }

    #[test]
    fn hamiltonian_examples() {
        for eps in CurvatureSign::both() {
            let pt = PhasePoint::new(c(0.0, 0.0), c(1.0, 0.0));
            assert_eq!(hamiltonian_free(&pt, 1.0, eps).unwrap(), 0.5);
        }
        let pt = PhasePoint::new(c(0.5, 0.0), c(0.0, 2.0));
        assert!((hamiltonian_free(&pt, 1.0, CurvatureSign::Pseudosphere).unwrap() - 1.125).abs() < 1e-15);
        let m = CurvedModel::oscillator(CurvatureSign::Pseudosphere, 1.0, 1.0).unwrap();
        assert!((hamiltonian_osc(&pt, &m).unwrap() - 1.445).abs() < 1e-14);
        assert_eq!(hamiltonian_osc(&PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0)), &m).unwrap(), 0.0);
        assert_eq!(hamiltonian_osc(&PhasePoint::new(c(0.0, 0.0), c(1.0, 0.0)), &m).unwrap(), 0.5);

        let cm = CoulombModel::new(1.0, 1.0, VortexCharge::Zero).unwrap();
        let free = CoulombModel::new(1.0, 0.0, VortexCharge::Zero).unwrap();
        let h0 = hamiltonian_coulomb(&PhasePoint::new(c(0.5, 0.0), c(0.0, 0.0)), &cm).unwrap();
        let h1 = hamiltonian_coulomb(&PhasePoint::new(c(0.5, 0.0), c(1.0, 0.0)), &free).unwrap();
        let h = hamiltonian_coulomb(&PhasePoint::new(c(0.5, 0.0), c(1.0, 0.0)), &cm).unwrap();
        assert!((h0 + 1.25).abs() < 1e-15);
        assert!((h1 - 0.28125).abs() < 1e-15);
        assert!((h + 0.96875).abs() < 1e-15);
    }

    #[test]
    fn free_hamiltonian_is_generator_bilinear() {
        let mut rng = seeded(21);
        for eps in CurvatureSign::both() {
            for _ in 0..100 {
                let pt = random_phase_point(&mut rng, eps);
                let radius = 1.7;
                let g = generator_set(&pt, eps, 0.0, radius).unwrap();
                let bilinear = (g.jbold.norm_sqr() + eps.value() * g.j * g.j) / (2.0 * radius * radius);
                let h = hamiltonian_free(&pt, radius, eps).unwrap();
                assert!((h - bilinear).abs() < 1e-12 * h.max(1.0));
            }
        }
    }

    #[test]
    fn oscillator_energy_is_non_negative() {
        let mut rng = seeded(8);
        for eps in CurvatureSign::both() {
            let m = CurvedModel::oscillator(eps, 0.8, 2.0).unwrap();
            for _ in 0..500 {
                let pt = random_phase_point(&mut rng, eps);
                assert!(hamiltonian_osc(&pt, &m).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn coulomb_kind_requires_pseudosphere() {
        let m = CurvedModel {
            eps: CurvatureSign::Sphere,
            radius: 1.0,
            alpha: 0.0,
            b0: 0.0,
            kind: SystemKind::Coulomb { gamma: 1.0 },
            shift_coefficient: PRINTED_SHIFT_COEFFICIENT,
        };
        assert!(m.validated().is_err());
        assert!(CurvedModel::oscillator(CurvatureSign::Sphere, 0.0, 1.0).is_err());
    }
}
