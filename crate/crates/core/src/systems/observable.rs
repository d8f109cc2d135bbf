//! Phase-space observables and their gradients.
//!
//! Catalog observables are [`ExactObservable`]s built from jet formulas and
//! carry exact gradients. Anything else can be wrapped in a
//! [`SampledObservable`], whose gradient falls back to central differences
//! with one Richardson step.

use std::sync::Arc;

use num_complex::Complex64;

use super::{
    coulomb_jet, free_jet, hidden_invariant_jet, osc_potential_jet, runge_lenz_jet, shifted_generators_jet,
    CoulombModel, CurvedModel, PhasePoint,
};
use crate::error::Result;
use crate::geometry::{ambient_jet, CurvatureSign};
use crate::jet::Jet4;
use crate::systems::check_coulomb_domain;

/// Base step of the finite-difference fallback.
pub const FD_STEP: f64 = 1e-5;

pub trait Observable: Sync {
    fn value(&self, pt: &PhasePoint) -> Result<f64>;

    fn exact_gradient(&self, _pt: &PhasePoint) -> Option<Result<[f64; 4]>> {
        None
    }
}

type JetFn = dyn Fn(Jet4, Jet4) -> Jet4 + Send + Sync;
type DomainFn = dyn Fn(Complex64) -> Result<()> + Send + Sync;

/// A complex observable given by a jet formula in `(z, pi)`.
#[derive(Clone)]
pub struct ExactObservable {
    formula: Arc<JetFn>,
    domain: Arc<DomainFn>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

pub struct RealPart {
    inner: ExactObservable,
    part: Part,
}

impl ExactObservable {
    pub fn new(
        domain: impl Fn(Complex64) -> Result<()> + Send + Sync + 'static,
        formula: impl Fn(Jet4, Jet4) -> Jet4 + Send + Sync + 'static,
    ) -> Self {
        Self {
            formula: Arc::new(formula),
            domain: Arc::new(domain),
        }
    }

    pub fn jet(&self, pt: &PhasePoint) -> Result<Jet4> {
        (self.domain)(pt.z)?;
        let (z, pi) = pt.seed();
        Ok((self.formula)(z, pi))
    }

    pub fn complex_value(&self, pt: &PhasePoint) -> Result<Complex64> {
        self.jet(pt).map(|j| j.value)
    }

    pub fn part(&self, part: Part) -> RealPart {
        RealPart {
            inner: self.clone(),
            part,
        }
    }

    pub fn re(&self) -> RealPart {
        self.part(Part::Re)
    }

    pub fn im(&self) -> RealPart {
        self.part(Part::Im)
    }

    pub fn conj(&self) -> Self {
        let f = self.formula.clone();
        Self {
            formula: Arc::new(move |z, pi| f(z, pi).conj()),
            domain: self.domain.clone(),
        }
    }
}

impl Observable for RealPart {
    fn value(&self, pt: &PhasePoint) -> Result<f64> {
        let v = self.inner.complex_value(pt)?;
        Ok(match self.part {
            Part::Re => v.re,
            Part::Im => v.im,
        })
    }

    fn exact_gradient(&self, pt: &PhasePoint) -> Option<Result<[f64; 4]>> {
        Some(self.inner.jet(pt).map(|j| {
            j.grad.map(|g| match self.part {
                Part::Re => g.re,
                Part::Im => g.im,
            })
        }))
    }
}

/// A real observable known only through its values.
pub struct SampledObservable<F>(pub F);

impl<F: Fn(&PhasePoint) -> Result<f64> + Sync> Observable for SampledObservable<F> {
    fn value(&self, pt: &PhasePoint) -> Result<f64> {
        (self.0)(pt)
    }
}

/// Exact gradient when available, otherwise central differences at `h` and
/// `h/2` combined by Richardson extrapolation.
pub fn gradient(obs: &dyn Observable, pt: &PhasePoint) -> Result<[f64; 4]> {
    if let Some(g) = obs.exact_gradient(pt) {
        return g;
    }
    let x = pt.to_array();
    let mut grad = [0.0; 4];
    for (k, g) in grad.iter_mut().enumerate() {
        let central = |h: f64| -> Result<f64> {
            let mut plus = x;
            let mut minus = x;
            plus[k] += h;
            minus[k] -= h;
            Ok((obs.value(&PhasePoint::from_array(plus))? - obs.value(&PhasePoint::from_array(minus))?) / (2.0 * h))
        };
        let coarse = central(FD_STEP)?;
        let fine = central(FD_STEP / 2.0)?;
        *g = (4.0 * fine - coarse) / 3.0;
    }
    Ok(grad)
}

/// The fixed catalog of observables with exact gradients.
pub mod catalog {
    use super::*;
    use crate::geometry::check_operative;

    fn operative(eps: CurvatureSign) -> impl Fn(Complex64) -> Result<()> + Send + Sync + 'static {
        move |z| check_operative(z, eps)
    }

    pub fn x_bold(radius: f64, eps: CurvatureSign) -> ExactObservable {
        ExactObservable::new(operative(eps), move |z, _| ambient_jet(z, radius, eps).0)
    }

    pub fn x3(radius: f64, eps: CurvatureSign) -> ExactObservable {
        ExactObservable::new(operative(eps), move |z, _| ambient_jet(z, radius, eps).1)
    }

    pub fn z() -> ExactObservable {
        ExactObservable::new(|_| Ok(()), |z, _| z)
    }

    pub fn pi() -> ExactObservable {
        ExactObservable::new(|_| Ok(()), |_, pi| pi)
    }

    /// Rotation generator `Jbold`, shifted when `b0 != 0`.
    pub fn jbold(eps: CurvatureSign, radius: f64, b0: f64, coefficient: f64) -> ExactObservable {
        ExactObservable::new(operative(eps), move |z, pi| {
            shifted_generators_jet(z, pi, eps, radius, b0, coefficient).0
        })
    }

    /// Rotation generator `J`, shifted when `b0 != 0`.
    pub fn jrot(eps: CurvatureSign, radius: f64, b0: f64, coefficient: f64) -> ExactObservable {
        ExactObservable::new(operative(eps), move |z, pi| {
            shifted_generators_jet(z, pi, eps, radius, b0, coefficient).1
        })
    }

    pub fn hamiltonian_free(radius: f64, eps: CurvatureSign) -> ExactObservable {
        ExactObservable::new(operative(eps), move |z, pi| free_jet(z, pi, radius, eps))
    }

    pub fn hamiltonian_osc(model: &CurvedModel) -> ExactObservable {
        let (radius, alpha, eps) = (model.radius, model.alpha, model.eps);
        ExactObservable::new(operative(eps), move |z, pi| {
            free_jet(z, pi, radius, eps) + osc_potential_jet(z, alpha, radius, eps)
        })
    }

    /// Whatever Hamiltonian the model's kind selects.
    pub fn hamiltonian(model: &CurvedModel) -> ExactObservable {
        let m = *model;
        ExactObservable::new(move |z| m.check_domain(z), move |z, pi| m.hamiltonian_jet(z, pi))
    }

    pub fn hidden_invariant(model: &CurvedModel) -> ExactObservable {
        let (radius, alpha, eps) = (model.radius, model.alpha, model.eps);
        ExactObservable::new(operative(eps), move |z, pi| hidden_invariant_jet(z, pi, alpha, radius, eps))
    }

    pub fn hamiltonian_coulomb(model: &CoulombModel) -> ExactObservable {
        let (gamma, r0) = (model.gamma, model.r0);
        ExactObservable::new(check_coulomb_domain, move |w, p| coulomb_jet(w, p, gamma, r0))
    }

    pub fn runge_lenz(model: &CoulombModel) -> ExactObservable {
        let (gamma, r0) = (model.gamma, model.r0);
        ExactObservable::new(check_coulomb_domain, move |w, p| runge_lenz_jet(w, p, gamma, r0))
    }

    pub fn coulomb_rotation() -> ExactObservable {
        ExactObservable::new(check_coulomb_domain, |w, p| super::super::jrot_jet(w, p))
    }
}
