//! Hamiltonian flows for a general symplectic form, fixed-step explicit
//! Runge-Kutta integration and conserved-quantity diagnostics.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::jet::{Jet, Jet4};
use crate::systems::observable::{catalog, gradient, ExactObservable, Observable};
use crate::systems::{
    check_coulomb_domain, symplectic_form, CoulombModel, CurvedModel, PhasePoint, SymplecticForm, SystemKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Rk4,
    Rk8,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" => Ok(Method::Rk4),
            "rk8" => Ok(Method::Rk8),
            other => Err(invalid("method", format!("expected rk4 or rk8, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    /// Largest accepted relative energy drift.
    pub drift_budget: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 100.0,
            method: Method::Rk8,
            drift_budget: 1e-6,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if self.dt > self.t_end {
            return Err(invalid("dt", "must not exceed t_end"));
        }
        if !(self.drift_budget > 0.0) {
            return Err(invalid("drift_budget", "must be positive"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// A named per-sample record along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Log {
    pub name: String,
    pub complex: bool,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    pub logs: Vec<Log>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn log(&self, name: &str) -> Result<&Log> {
        self.logs
            .iter()
            .find(|l| l.name == name)
            .ok_or_else(|| Error::UnknownLog(name.to_string()))
    }

    pub fn last(&self) -> Option<&PhasePoint> {
        self.points.last()
    }

    /// Columns `t, re_z, im_z, re_pi, im_pi`, then each log (complex logs as `_re`/`_im` pairs).
    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        let mut header = vec!["t".to_string(), "re_z".into(), "im_z".into(), "re_pi".into(), "im_pi".into()];
        for log in &self.logs {
            if log.complex {
                header.push(format!("{}_re", log.name));
                header.push(format!("{}_im", log.name));
            } else {
                header.push(log.name.clone());
            }
        }
        writeln!(out, "{}", header.join(","))?;
        for (k, (t, pt)) in self.times.iter().zip(&self.points).enumerate() {
            let mut row = vec![format!("{t:e}")];
            row.extend(pt.to_array().iter().map(|v| format!("{v:e}")));
            for log in &self.logs {
                let v = log.values[k];
                row.push(format!("{:e}", v.re));
                if log.complex {
                    row.push(format!("{:e}", v.im));
                }
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// An invariant logged during integration.
pub struct Invariant {
    pub name: &'static str,
    pub complex: bool,
    pub observable: ExactObservable,
}

pub trait HamiltonianSystem: Sync {
    fn energy(&self, z: Jet4, pi: Jet4) -> Jet4;

    fn check_domain(&self, pt: &PhasePoint) -> Result<()>;

    fn form(&self, pt: &PhasePoint) -> Result<SymplecticForm>;

    /// Quantities logged next to the energy `H`.
    fn invariants(&self) -> Vec<Invariant>;

    fn energy_value(&self, pt: &PhasePoint) -> Result<f64> {
        self.check_domain(pt)?;
        let (z, pi) = pt.seed();
        Ok(self.energy(z, pi).value.re)
    }

    fn vector_field(&self, pt: &PhasePoint) -> Result<[f64; 4]> {
        self.check_domain(pt)?;
        let (z, pi) = pt.seed();
        let dh = self.energy(z, pi).real_gradient();
        field_from_gradient(&dh, &self.form(pt)?)
    }
}

fn field_from_gradient(dh: &[f64; 4], form: &SymplecticForm) -> Result<[f64; 4]> {
    let inv = form.inverse()?;
    let mut x = [0.0; 4];
    for (i, xi) in x.iter_mut().enumerate() {
        *xi = (0..4).map(|j| inv[(i, j)] * dh[j]).sum();
    }
    Ok(x)
}

/// Solves `omega(X, .) = dH`, i.e. `X = Omega^{-1} grad H`, so that
/// `df/dt = {H, f}`.
pub fn hamiltonian_vector_field(h: &dyn Observable, pt: &PhasePoint, form: &SymplecticForm) -> Result<[f64; 4]> {
    field_from_gradient(&gradient(h, pt)?, form)
}

impl HamiltonianSystem for CurvedModel {
    fn energy(&self, z: Jet4, pi: Jet4) -> Jet4 {
        self.hamiltonian_jet(z, pi)
    }

    fn check_domain(&self, pt: &PhasePoint) -> Result<()> {
        CurvedModel::check_domain(self, pt.z)
    }

    fn form(&self, pt: &PhasePoint) -> Result<SymplecticForm> {
        symplectic_form(pt, self.eps, self.radius, self.b0)
    }

    fn invariants(&self) -> Vec<Invariant> {
        if let SystemKind::Coulomb { gamma } = self.kind {
            let cm = CoulombModel {
                r0: self.radius,
                gamma,
                sigma: crate::systems::VortexCharge::Zero,
            };
            return cm.invariants();
        }
        let mut out = vec![Invariant {
            name: "J",
            complex: false,
            observable: catalog::jrot(self.eps, self.radius, self.b0, self.shift_coefficient),
        }];
        match self.kind {
            SystemKind::FreeParticle => out.push(Invariant {
                name: "Jbold",
                complex: true,
                observable: catalog::jbold(self.eps, self.radius, self.b0, self.shift_coefficient),
            }),
            SystemKind::Oscillator if self.b0 == 0.0 => out.push(Invariant {
                name: "I",
                complex: true,
                observable: catalog::hidden_invariant(self),
            }),
            _ => {}
        }
        out
    }
}

impl HamiltonianSystem for CoulombModel {
    fn energy(&self, z: Jet4, pi: Jet4) -> Jet4 {
        self.hamiltonian_jet(z, pi)
    }

    fn check_domain(&self, pt: &PhasePoint) -> Result<()> {
        check_coulomb_domain(pt.z)
    }

    fn form(&self, _pt: &PhasePoint) -> Result<SymplecticForm> {
        Ok(SymplecticForm::canonical())
    }

    fn invariants(&self) -> Vec<Invariant> {
        vec![
            Invariant {
                name: "J_C",
                complex: false,
                observable: catalog::coulomb_rotation(),
            },
            Invariant {
                name: "A",
                complex: true,
                observable: catalog::runge_lenz(self),
            },
        ]
    }
}

struct Tableau {
    c: &'static [f64],
    a: &'static [&'static [f64]],
    b: &'static [f64],
}

const RK4: Tableau = Tableau {
    c: &[0.0, 0.5, 0.5, 1.0],
    a: &[&[], &[0.5], &[0.0, 0.5], &[0.0, 0.0, 1.0]],
    b: &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
};

// Fehlberg's 13-stage pair, eighth-order weights.
const RK8: Tableau = Tableau {
    c: &[
        0.0,
        2.0 / 27.0,
        1.0 / 9.0,
        1.0 / 6.0,
        5.0 / 12.0,
        0.5,
        5.0 / 6.0,
        1.0 / 6.0,
        2.0 / 3.0,
        1.0 / 3.0,
        1.0,
        0.0,
        1.0,
    ],
    a: &[
        &[],
        &[2.0 / 27.0],
        &[1.0 / 36.0, 1.0 / 12.0],
        &[1.0 / 24.0, 0.0, 1.0 / 8.0],
        &[5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0],
        &[1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0],
        &[-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0],
        &[31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0],
        &[2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0],
        &[
            -91.0 / 108.0,
            0.0,
            0.0,
            23.0 / 108.0,
            -976.0 / 135.0,
            311.0 / 54.0,
            -19.0 / 60.0,
            17.0 / 6.0,
            -1.0 / 12.0,
        ],
        &[
            2383.0 / 4100.0,
            0.0,
            0.0,
            -341.0 / 164.0,
            4496.0 / 1025.0,
            -301.0 / 82.0,
            2133.0 / 4100.0,
            45.0 / 82.0,
            45.0 / 164.0,
            18.0 / 41.0,
        ],
        &[
            3.0 / 205.0,
            0.0,
            0.0,
            0.0,
            0.0,
            -6.0 / 41.0,
            -3.0 / 205.0,
            -3.0 / 41.0,
            3.0 / 41.0,
            6.0 / 41.0,
            0.0,
        ],
        &[
            -1777.0 / 4100.0,
            0.0,
            0.0,
            -341.0 / 164.0,
            4496.0 / 1025.0,
            -289.0 / 82.0,
            2193.0 / 4100.0,
            51.0 / 82.0,
            33.0 / 164.0,
            12.0 / 41.0,
            0.0,
            1.0,
        ],
    ],
    b: &[
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        34.0 / 105.0,
        9.0 / 35.0,
        9.0 / 35.0,
        9.0 / 280.0,
        9.0 / 280.0,
        0.0,
        41.0 / 840.0,
        41.0 / 840.0,
    ],
};

fn step(sys: &dyn HamiltonianSystem, tableau: &Tableau, y: [f64; 4], dt: f64) -> Result<[f64; 4]> {
    debug_assert_eq!(tableau.c.len(), tableau.a.len());
    let mut k: Vec<[f64; 4]> = Vec::with_capacity(tableau.b.len());
    for row in tableau.a {
        let mut stage = y;
        for (coef, kj) in row.iter().zip(&k) {
            if *coef != 0.0 {
                for d in 0..4 {
                    stage[d] += dt * coef * kj[d];
                }
            }
        }
        k.push(sys.vector_field(&PhasePoint::from_array(stage))?);
    }
    let mut out = y;
    for (b, kj) in tableau.b.iter().zip(&k) {
        if *b != 0.0 {
            for d in 0..4 {
                out[d] += dt * b * kj[d];
            }
        }
    }
    Ok(out)
}

fn record(sys: &dyn HamiltonianSystem, invariants: &[Invariant], pt: &PhasePoint, logs: &mut [Log]) -> Result<()> {
    logs[0].values.push(Complex64::new(sys.energy_value(pt)?, 0.0));
    for (inv, log) in invariants.iter().zip(logs.iter_mut().skip(1)) {
        log.values.push(inv.observable.complex_value(pt)?);
    }
    Ok(())
}

/// Integrates the Hamiltonian flow of `sys` from `pt0`.
///
/// Stops with [`Error::DomainExit`] (carrying the trajectory up to the last
/// accepted sample) when a step would leave the operative domain, and with
/// [`Error::DriftBudgetExceeded`] when the relative energy drift exceeds the
/// budget.
pub fn integrate(sys: &dyn HamiltonianSystem, pt0: PhasePoint, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    sys.check_domain(&pt0)?;
    let e0 = sys.energy_value(&pt0)?;
    if !e0.is_finite() {
        return Err(invalid("initial point", "energy is not finite"));
    }
    let tableau = match cfg.method {
        Method::Rk4 => &RK4,
        Method::Rk8 => &RK8,
    };
    let invariants = sys.invariants();
    let mut logs = vec![Log {
        name: "H".into(),
        complex: false,
        values: Vec::new(),
    }];
    logs.extend(invariants.iter().map(|inv| Log {
        name: inv.name.into(),
        complex: inv.complex,
        values: Vec::new(),
    }));
    let steps = cfg.steps();
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        points: Vec::with_capacity(steps + 1),
        logs,
    };
    traj.times.push(0.0);
    traj.points.push(pt0);
    record(sys, &invariants, &pt0, &mut traj.logs)?;

    let mut y = pt0.to_array();
    for n in 1..=steps {
        let next = step(sys, tableau, y, cfg.dt).and_then(|next| {
            let pt = PhasePoint::from_array(next);
            sys.check_domain(&pt)?;
            Ok(next)
        });
        match next {
            Ok(next) => {
                y = next;
                let pt = PhasePoint::from_array(y);
                traj.times.push(n as f64 * cfg.dt);
                traj.points.push(pt);
                record(sys, &invariants, &pt, &mut traj.logs)?;
            }
            Err(_) => {
                let time = (n - 1) as f64 * cfg.dt;
                return Err(Error::DomainExit {
                    time,
                    partial: Box::new(traj),
                });
            }
        }
    }
    let drift = conserved_drift(&traj, "H")?;
    if drift > cfg.drift_budget {
        return Err(Error::DriftBudgetExceeded {
            drift,
            budget: cfg.drift_budget,
            trajectory: Box::new(traj),
        });
    }
    Ok(traj)
}

/// Runs independent integrations in parallel; results keep the input order.
pub fn integrate_batch(
    sys: &dyn HamiltonianSystem,
    starts: &[PhasePoint],
    cfg: &IntegratorConfig,
) -> Vec<Result<Trajectory>> {
    starts.par_iter().map(|pt| integrate(sys, *pt, cfg)).collect()
}

/// `max_t |q(t) - q(0)| / max(1, |q(0)|)`.
pub fn conserved_drift(traj: &Trajectory, name: &str) -> Result<f64> {
    let log = traj.log(name)?;
    let Some(q0) = log.values.first() else {
        return Ok(0.0);
    };
    let scale = q0.norm().max(1.0);
    Ok(log.values.iter().fold(0.0f64, |m, q| m.max((q - q0).norm())) / scale)
}

pub fn reverse_momentum(pt: &PhasePoint) -> PhasePoint {
    PhasePoint::new(pt.z, -pt.pi)
}

/// Initial data on the circular orbit of radius `|z| = rho` for a rotationally
/// symmetric curved model: `z = rho`, `pi = i b`.
///
/// With `J = -2 rho b` the energy is `K(rho) J^2 + V(rho)` where
/// `K = (1 + eps rho^2)^2 / (8 R0^2 rho^2)`; circularity `K' J^2 + V' = 0` is
/// linear in `J^2`.
pub fn circular_orbit(model: &CurvedModel, rho: f64) -> Result<PhasePoint> {
    if model.b0 != 0.0 || model.kind != SystemKind::Oscillator {
        return Err(invalid("model", "circular orbits are set up for the field-free oscillator"));
    }
    if !(rho > 0.0) {
        return Err(invalid("rho", "must be positive"));
    }
    let z = Complex64::new(rho, 0.0);
    model.check_domain(z)?;
    let r = Jet::<1>::variable(rho, 0);
    let e = model.eps.value();
    let f = r * r * e + 1.0;
    let k = f * f / (r * r * (8.0 * model.radius * model.radius));
    let v = crate::systems::osc_potential_jet(r, model.alpha, model.radius, model.eps);
    let j2 = -v.grad[0].re / k.grad[0].re;
    if !(j2 > 0.0) {
        return Err(invalid("rho", "no circular orbit at this radius"));
    }
    let b = -j2.sqrt() / (2.0 * rho);
    Ok(PhasePoint::new(z, Complex64::new(0.0, b)))
}

/// Energy of the circular orbit through [`circular_orbit`], for building
/// energy sweeps on a sphere or pseudosphere.
pub fn circular_orbit_energy(model: &CurvedModel, rho: f64) -> Result<f64> {
    model.energy_value(&circular_orbit(model, rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurvatureSign;
    use crate::systems::VortexCharge;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn osc(eps: CurvatureSign) -> CurvedModel {
        CurvedModel::oscillator(eps, 1.0, 1.0).unwrap()
    }

    #[test]
    fn free_field_at_origin() {
        let m = CurvedModel::free(CurvatureSign::Pseudosphere, 1.5).unwrap();
        let pt = PhasePoint::new(c(0.0, 0.0), c(0.3, -0.8));
        let x = m.vector_field(&pt).unwrap();
        let zdot = c(x[0], x[1]);
        assert!((zdot - pt.pi.conj() / (2.0 * 1.5 * 1.5)).norm() < 1e-14);
        // cross-check against finite differences of H: zdot = dH/d(pi) in Wirtinger form
        let h = 1e-6;
        let hp = |dp: Complex64| m.energy_value(&PhasePoint::new(pt.z, pt.pi + dp)).unwrap();
        let dh_da = (hp(c(h, 0.0)) - hp(c(-h, 0.0))) / (2.0 * h);
        let dh_db = (hp(c(0.0, h)) - hp(c(0.0, -h))) / (2.0 * h);
        assert!((x[0] - dh_da / 2.0).abs() < 1e-8);
        assert!((x[1] + dh_db / 2.0).abs() < 1e-8);
    }

    #[test]
    fn field_is_tangent_to_energy_levels() {
        let mut rng = crate::sampling::seeded(2);
        for eps in CurvatureSign::both() {
            for b0 in [0.0, 0.6] {
                let m = osc(eps).with_field(b0, -4.0).unwrap();
                for _ in 0..1000 {
                    let pt = crate::sampling::random_phase_point(&mut rng, eps);
                    let x = m.vector_field(&pt).unwrap();
                    let (z, pi) = pt.seed();
                    let dh = m.energy(z, pi).real_gradient();
                    let dot: f64 = (0..4).map(|i| dh[i] * x[i]).sum();
                    let scale: f64 = (0..4).map(|i| (dh[i] * x[i]).abs()).sum::<f64>().max(1.0);
                    assert!(dot.abs() < 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn magnetic_field_changes_the_flow() {
        let pt = PhasePoint::new(c(0.2, 0.1), c(0.4, 0.3));
        let a = osc(CurvatureSign::Pseudosphere).vector_field(&pt).unwrap();
        let b = osc(CurvatureSign::Pseudosphere)
            .with_field(0.5, -4.0)
            .unwrap()
            .vector_field(&pt)
            .unwrap();
        assert!((0..4).map(|i| (a[i] - b[i]).abs()).sum::<f64>() > 1e-3);
    }

    #[test]
    fn equilibrium_stays_put() {
        let cfg = IntegratorConfig {
            dt: 0.01,
            t_end: 1.0,
            ..Default::default()
        };
        let traj = integrate(&osc(CurvatureSign::Sphere), PhasePoint::new(c(0.0, 0.0), c(0.0, 0.0)), &cfg).unwrap();
        assert!(traj.points.iter().all(|p| p.z == c(0.0, 0.0) && p.pi == c(0.0, 0.0)));
        assert_eq!(traj.len(), 101);
    }

    #[test]
    fn circular_orbit_keeps_radius() {
        let m = osc(CurvatureSign::Pseudosphere);
        let pt0 = circular_orbit(&m, 0.4).unwrap();
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 10.0,
            ..Default::default()
        };
        let traj = integrate(&m, pt0, &cfg).unwrap();
        let worst = traj.points.iter().fold(0.0f64, |w, p| w.max((p.z.norm() - 0.4).abs()));
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn energy_drift_rk8() {
        let m = osc(CurvatureSign::Pseudosphere);
        let pt0 = PhasePoint::new(c(0.3, 0.1), c(0.2, 0.5));
        let cfg = IntegratorConfig {
            dt: 1e-2,
            t_end: 20.0,
            ..Default::default()
        };
        let traj = integrate(&m, pt0, &cfg).unwrap();
        assert!(conserved_drift(&traj, "H").unwrap() < 1e-10);
        assert!(conserved_drift(&traj, "I").unwrap() < 1e-9);
        assert!(conserved_drift(&traj, "J").unwrap() < 1e-9);
        assert!(matches!(conserved_drift(&traj, "nope"), Err(Error::UnknownLog(_))));
    }

    #[test]
    fn rk8_is_eighth_order() {
        // integrate to a fixed time and compare end points against a fine reference
        let m = osc(CurvatureSign::Sphere);
        let pt0 = PhasePoint::new(c(0.3, 0.1), c(0.2, 0.5));
        let end = |dt: f64| {
            let cfg = IntegratorConfig {
                dt,
                t_end: 4.0,
                method: Method::Rk8,
                drift_budget: 1.0,
            };
            *integrate(&m, pt0, &cfg).unwrap().last().unwrap()
        };
        let reference = end(0.005);
        let err = |p: PhasePoint| (p.z - reference.z).norm() + (p.pi - reference.pi).norm();
        let ratio = err(end(0.1)) / err(end(0.05));
        assert!(ratio > 128.0, "ratio {ratio}");
    }

    #[test]
    fn rk4_is_fourth_order() {
        let m = osc(CurvatureSign::Pseudosphere);
        let pt0 = PhasePoint::new(c(0.3, 0.1), c(0.2, 0.5));
        let end = |dt: f64| {
            let cfg = IntegratorConfig {
                dt,
                t_end: 2.0,
                method: Method::Rk4,
                drift_budget: 1.0,
            };
            *integrate(&m, pt0, &cfg).unwrap().last().unwrap()
        };
        let reference = end(1e-4);
        let err = |p: PhasePoint| (p.z - reference.z).norm() + (p.pi - reference.pi).norm();
        let ratio = err(end(0.02)) / err(end(0.01));
        assert!((ratio - 16.0).abs() < 4.0, "ratio {ratio}");
    }

    #[test]
    fn time_reversal() {
        let m = osc(CurvatureSign::Sphere);
        let pt0 = PhasePoint::new(c(0.3, -0.2), c(0.4, 0.1));
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 5.0,
            ..Default::default()
        };
        let fwd = integrate(&m, pt0, &cfg).unwrap();
        let back = integrate(&m, reverse_momentum(fwd.last().unwrap()), &cfg).unwrap();
        let end = reverse_momentum(back.last().unwrap());
        assert!((end.z - pt0.z).norm() + (end.pi - pt0.pi).norm() < 1e-6);
    }

    #[test]
    fn domain_exit_returns_partial_trajectory() {
        let m = CurvedModel::free(CurvatureSign::Pseudosphere, 1.0).unwrap();
        let cfg = IntegratorConfig {
            dt: 1e-2,
            t_end: 100.0,
            ..Default::default()
        };
        match integrate(&m, PhasePoint::new(c(0.5, 0.0), c(3.0, 0.0)), &cfg) {
            Err(Error::DomainExit { time, partial }) => {
                assert!(time < 100.0);
                assert_eq!(*partial.times.last().unwrap(), time);
                assert!(partial.points.iter().all(|p| p.z.norm() < 1.0));
            }
            other => panic!("expected a domain exit, got {other:?}"),
        }
    }

    #[test]
    fn drift_budget_is_enforced() {
        let m = osc(CurvatureSign::Pseudosphere);
        let cfg = IntegratorConfig {
            dt: 0.3,
            t_end: 30.0,
            method: Method::Rk4,
            drift_budget: 1e-14,
        };
        let r = integrate(&m, PhasePoint::new(c(0.4, 0.1), c(0.2, 0.9)), &cfg);
        assert!(matches!(r, Err(Error::DriftBudgetExceeded { .. })));
    }

    #[test]
    fn coulomb_run_conserves_runge_lenz() {
        let cm = CoulombModel::new(1.0, 1.0, VortexCharge::Zero).unwrap();
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 5.0,
            ..Default::default()
        };
        let traj = integrate(&cm, PhasePoint::new(c(0.3, 0.0), c(0.1, 0.8)), &cfg).unwrap();
        assert!(conserved_drift(&traj, "A").unwrap() < 1e-8);
        assert!(conserved_drift(&traj, "J_C").unwrap() < 1e-10);
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let m = osc(CurvatureSign::Pseudosphere);
        let cfg = IntegratorConfig {
            dt: 0.1,
            t_end: 1.0,
            ..Default::default()
        };
        let traj = integrate(&m, PhasePoint::new(c(0.3, 0.0), c(0.0, 0.2)), &cfg).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,re_z,im_z,re_pi,im_pi,H,J,I_re,I_im");
        assert_eq!(lines.count(), 11);
    }
}
