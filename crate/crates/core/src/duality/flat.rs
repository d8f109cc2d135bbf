//! Flat limit: rescaled curved systems against the planar oscillator and
//! Coulomb problems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{HamiltonianSystem, Invariant};
use crate::error::{Error, Result};
use crate::geometry::CurvatureSign;
use crate::jet::{Jet4, I};
use crate::systems::observable::ExactObservable;
use crate::systems::{
    coulomb_jet, free_jet, hidden_invariant_jet, jrot_jet, osc_potential_jet, runge_lenz_jet, PhasePoint,
    SymplecticForm,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlatSide {
    Oscillator,
    Coulomb,
}

/// Curved coordinates of a flat point: `(z/(2R0), 2R0 pi)` on the oscillator
/// side and `(w/(4r0), 4r0 p)` on the Coulomb side, where `radius` is `R0`
/// or `r0` respectively.
pub fn flat_rescale(pt: &PhasePoint, radius: f64, side: FlatSide) -> PhasePoint {
    let k = match side {
        FlatSide::Oscillator => 2.0 * radius,
        FlatSide::Coulomb => 4.0 * radius,
    };
    PhasePoint::new(pt.z / k, pt.pi * k)
}

/// Planar oscillator `H = 2 pi pibar + alpha^2 z zbar / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatOscillator {
    pub alpha: f64,
}

/// Planar Coulomb problem `H = 8 p pbar - 2 gamma/|w|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatCoulomb {
    pub gamma: f64,
}

fn flat_osc_jet(z: Jet4, pi: Jet4, alpha: f64) -> Jet4 {
    (pi * pi.conj()).re() * 2.0 + (z * z.conj()).re() * (alpha * alpha / 2.0)
}

/// `2 pi^2 + alpha^2 zbar^2 / 2`.
fn flat_invariant_jet(z: Jet4, pi: Jet4, alpha: f64) -> Jet4 {
    let zb = z.conj();
    pi * pi * 2.0 + zb * zb * (alpha * alpha / 2.0)
}

fn flat_coulomb_jet(w: Jet4, p: Jet4, gamma: f64) -> Jet4 {
    (p * p.conj()).re() * 8.0 - 2.0 * gamma / w.modulus()
}

/// `-4 i J p + gamma wbar/|w|`.
fn flat_runge_lenz_jet(w: Jet4, p: Jet4, gamma: f64) -> Jet4 {
    -(jrot_jet(w, p) * p * I) * 4.0 + w.conj() * gamma / w.modulus()
}

fn anywhere(_: Complex64) -> Result<()> {
    Ok(())
}

fn off_centre(w: Complex64) -> Result<()> {
    if w.norm() < crate::systems::COULOMB_CENTRE_MARGIN {
        Err(Error::Singularity("flat Coulomb centre"))
    } else {
        Ok(())
    }
}

impl HamiltonianSystem for FlatOscillator {
    fn energy(&self, z: Jet4, pi: Jet4) -> Jet4 {
        flat_osc_jet(z, pi, self.alpha)
    }

    fn check_domain(&self, _pt: &PhasePoint) -> Result<()> {
        Ok(())
    }

    fn form(&self, _pt: &PhasePoint) -> Result<SymplecticForm> {
        Ok(SymplecticForm::canonical())
    }

    fn invariants(&self) -> Vec<Invariant> {
        let alpha = self.alpha;
        vec![
            Invariant {
                name: "J",
                complex: false,
                observable: ExactObservable::new(anywhere, jrot_jet),
            },
            Invariant {
                name: "I",
                complex: true,
                observable: ExactObservable::new(anywhere, move |z, pi| flat_invariant_jet(z, pi, alpha)),
            },
        ]
    }
}

impl HamiltonianSystem for FlatCoulomb {
    fn energy(&self, w: Jet4, p: Jet4) -> Jet4 {
        flat_coulomb_jet(w, p, self.gamma)
    }

    fn check_domain(&self, pt: &PhasePoint) -> Result<()> {
        off_centre(pt.z)
    }

    fn form(&self, _pt: &PhasePoint) -> Result<SymplecticForm> {
        Ok(SymplecticForm::canonical())
    }

    fn invariants(&self) -> Vec<Invariant> {
        let gamma = self.gamma;
        vec![
            Invariant {
                name: "J_C",
                complex: false,
                observable: ExactObservable::new(off_centre, jrot_jet),
            },
            Invariant {
                name: "A",
                complex: true,
                observable: ExactObservable::new(off_centre, move |w, p| flat_runge_lenz_jet(w, p, gamma)),
            },
        ]
    }
}

/// Relative deviations of the rescaled curved quantities from their flat counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatLimitDeviation {
    pub radius: f64,
    pub hamiltonian: f64,
    pub invariant: f64,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Oscillator side: `H_osc` and the hidden invariant at `flat_rescale(pt, R0)`
/// against `2 pi pibar + alpha^2 z zbar / 2` and `2 pi^2 + alpha^2 zbar^2 / 2`.
pub fn oscillator_flat_deviation(pt: &PhasePoint, alpha: f64, radius: f64, eps: CurvatureSign) -> FlatLimitDeviation {
    let curved = flat_rescale(pt, radius, FlatSide::Oscillator);
    let (z, pi) = curved.seed();
    let h = free_jet(z, pi, radius, eps) + osc_potential_jet(z, alpha, radius, eps);
    let inv = hidden_invariant_jet(z, pi, alpha, radius, eps);
    let (zf, pf) = pt.seed();
    FlatLimitDeviation {
        radius,
        hamiltonian: rel(h.value, flat_osc_jet(zf, pf, alpha).value),
        invariant: rel(inv.value, flat_invariant_jet(zf, pf, alpha).value),
    }
}

/// Coulomb side: `H_C` and the Runge-Lenz vector at `flat_rescale(pt, r0)`
/// against `8 p pbar - 2 gamma/|w|` and `-4 i J p + gamma wbar/|w|`.
pub fn coulomb_flat_deviation(pt: &PhasePoint, gamma: f64, r0: f64) -> FlatLimitDeviation {
    let curved = flat_rescale(pt, r0, FlatSide::Coulomb);
    let (w, p) = curved.seed();
    let h = coulomb_jet(w, p, gamma, r0);
    let a = runge_lenz_jet(w, p, gamma, r0);
    let (wf, pf) = pt.seed();
    FlatLimitDeviation {
        radius: r0,
        hamiltonian: rel(h.value, flat_coulomb_jet(wf, pf, gamma).value),
        invariant: rel(a.value, flat_runge_lenz_jet(wf, pf, gamma).value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{conserved_drift, integrate, IntegratorConfig};
    use crate::systems::poisson_bracket;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rescaling_is_canonical() {
        // d(pi k) ^ d(z / k) = dpi ^ dz exactly
        let pt = PhasePoint::new(c(0.3, 0.7), c(-1.1, 0.2));
        for side in [FlatSide::Oscillator, FlatSide::Coulomb] {
            let q = flat_rescale(&pt, 3.0, side);
            assert!((q.z * q.pi - pt.z * pt.pi).norm() < 1e-15);
        }
    }

    #[test]
    fn oscillator_limit_at_large_radius() {
        let pt = PhasePoint::new(c(0.6, -0.3), c(0.4, 0.5));
        for eps in CurvatureSign::both() {
            let d = oscillator_flat_deviation(&pt, 1.2, 1e3, eps);
            assert!(d.hamiltonian < 1e-5 && d.invariant < 1e-5, "{d:?}");
            let d10 = oscillator_flat_deviation(&pt, 1.2, 10.0, eps);
            let d20 = oscillator_flat_deviation(&pt, 1.2, 20.0, eps);
            let ratio = d10.hamiltonian / d20.hamiltonian;
            assert!((3.0..5.0).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn coulomb_limit_scaling() {
        let pt = PhasePoint::new(c(0.6, -0.3), c(0.4, 0.5));
        let d10 = coulomb_flat_deviation(&pt, 0.8, 10.0);
        let d20 = coulomb_flat_deviation(&pt, 0.8, 20.0);
        assert!((3.0..5.0).contains(&(d10.hamiltonian / d20.hamiltonian)));
        assert!((3.0..5.0).contains(&(d10.invariant / d20.invariant)));
    }

    #[test]
    fn flat_runge_lenz_is_conserved() {
        let sys = FlatCoulomb { gamma: 1.0 };
        let inv = &sys.invariants()[1].observable;
        let h = ExactObservable::new(off_centre, move |w, p| flat_coulomb_jet(w, p, 1.0));
        let pt = PhasePoint::new(c(0.7, 0.2), c(0.1, -0.3));
        let form = SymplecticForm::canonical();
        assert!(poisson_bracket(&inv.re(), &h.re(), &pt, &form).unwrap().abs() < 1e-12);
        assert!(poisson_bracket(&inv.im(), &h.re(), &pt, &form).unwrap().abs() < 1e-12);

        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 20.0,
            ..Default::default()
        };
        let traj = integrate(&sys, pt, &cfg).unwrap();
        assert!(conserved_drift(&traj, "A").unwrap() < 1e-6);
        let osc = FlatOscillator { alpha: 1.3 };
        let traj = integrate(&osc, pt, &cfg).unwrap();
        assert!(conserved_drift(&traj, "I").unwrap() < 1e-9);
    }

    #[test]
    fn flat_invariants_are_dual() {
        // I_flat(z, pi) = 2 A_flat(z^2, pi/(2z)) on the flat energy surface with gamma = E/2
        let pt = PhasePoint::new(c(0.7, 0.2), c(0.1, -0.3));
        let alpha = 1.1;
        let (z, pi) = pt.seed();
        let energy = flat_osc_jet(z, pi, alpha).value.re;
        let img = crate::duality::bohlin_map(&pt).unwrap();
        let (w, p) = img.seed();
        let a = flat_runge_lenz_jet(w, p, energy / 2.0).value;
        let inv = flat_invariant_jet(z, pi, alpha).value;
        assert!((inv - 2.0 * a).norm() < 1e-12);
    }
}
