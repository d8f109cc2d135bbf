//! Kustaanheimo-Stiefel reduction of the four-dimensional (two complex
//! coordinates) oscillator to a three-dimensional Coulomb system with a
//! monopole term in the reduced symplectic structure.
//!
//! Upstairs coordinates are ordered `(Re z1, Im z1, Re pi1, Im pi1, Re z2,
//! Im z2, Re pi2, Im pi2)` with two copies of the canonical form.
//! Downstairs coordinates are `(u1, u2, u3, p1, p2, p3)`.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params_unchecked;
use crate::error::{invalid, Error, Result};
use crate::geometry::CurvatureSign;
use crate::jet::{Jet, I};
use crate::sampling::SeededRng;
use crate::systems::{CurvedModel, SymplecticForm, SystemKind};

/// Orientation of the reduced form relative to `du ^ dp`.
const REDUCED_ORIENTATION: f64 = -1.0;
/// Weight of the monopole wedge `(u x du) ^ du / |u|^3`.
const MONOPOLE_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedPhasePoint {
    pub u: [f64; 3],
    pub p: [f64; 3],
    /// Monopole charge, the level `J = 2s` of the U(1) generator.
    pub s: f64,
}

/// A point of the upstairs phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpstairsPoint {
    pub z: [Complex64; 2],
    pub pi: [Complex64; 2],
}

impl UpstairsPoint {
    fn seed(&self) -> ([Jet<8>; 2], [Jet<8>; 2]) {
        (
            [
                Jet::complex_variable(self.z[0], 0, 1),
                Jet::complex_variable(self.z[1], 4, 5),
            ],
            [
                Jet::complex_variable(self.pi[0], 2, 3),
                Jet::complex_variable(self.pi[1], 6, 7),
            ],
        )
    }

    fn norm_sqr(&self) -> f64 {
        self.z[0].norm_sqr() + self.z[1].norm_sqr()
    }
}

/// `u = z sigma zbar`, `p = Re(z sigma pi)/|z|^2`, `s = i(z.pi - zbar.pibar)/2`.
fn ks_jets<const N: usize>(z: &[Jet<N>; 2], pi: &[Jet<N>; 2]) -> ([Jet<N>; 3], [Jet<N>; 3], Jet<N>) {
    let [z1, z2] = *z;
    let [p1, p2] = *pi;
    let cross = z1 * z2.conj();
    let n1 = (z1 * z1.conj()).re();
    let n2 = (z2 * z2.conj()).re();
    let u = [cross.re() * 2.0, (cross * (-I)).re() * 2.0, n1 - n2];
    let norm = n1 + n2;
    let s1 = z1 * p2 + z2 * p1;
    let s2 = (z2 * p1 - z1 * p2) * I;
    let s3 = z1 * p1 - z2 * p2;
    let p = [s1.re() / norm, s2.re() / norm, s3.re() / norm];
    let j = ((z1 * p1 + z2 * p2 - (z1 * p1 + z2 * p2).conj()) * I).re();
    (u, p, j * 0.5)
}

pub fn ks_map(z: [Complex64; 2], pi: [Complex64; 2]) -> Result<ReducedPhasePoint> {
    let pt = UpstairsPoint { z, pi };
    if pt.norm_sqr() == 0.0 {
        return Err(Error::Singularity("KS map at z = 0"));
    }
    let zj = z.map(Jet::<0>::constant);
    let pj = pi.map(Jet::<0>::constant);
    let (u, p, s) = ks_jets(&zj, &pj);
    Ok(ReducedPhasePoint {
        u: u.map(|c| c.value.re),
        p: p.map(|c| c.value.re),
        s: s.value.re,
    })
}

/// A function of the reduced coordinates, evaluable over jets of any size.
pub trait ReducedObservable: Sync {
    fn eval<const N: usize>(&self, u: &[Jet<N>; 3], p: &[Jet<N>; 3]) -> Jet<N>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedCoordinate {
    U(usize),
    P(usize),
}

impl ReducedObservable for ReducedCoordinate {
    fn eval<const N: usize>(&self, u: &[Jet<N>; 3], p: &[Jet<N>; 3]) -> Jet<N> {
        match *self {
            ReducedCoordinate::U(i) => u[i],
            ReducedCoordinate::P(i) => p[i],
        }
    }
}

fn upstairs_tensor() -> Result<SMatrix<f64, 8, 8>> {
    let p4 = SymplecticForm::canonical().poisson_tensor()?;
    let mut p8 = SMatrix::<f64, 8, 8>::zeros();
    p8.fixed_view_mut::<4, 4>(0, 0).copy_from(&p4);
    p8.fixed_view_mut::<4, 4>(4, 4).copy_from(&p4);
    Ok(p8)
}

/// Reduced form `o [du ^ dp + m s (u x du) ^ du / |u|^3]` as a 6x6 matrix.
pub fn reduced_form(u: &[f64; 3], s: f64) -> Result<SMatrix<f64, 6, 6>> {
    let norm = u.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Singularity("reduced form at u = 0"));
    }
    let o = REDUCED_ORIENTATION;
    let mut w = SMatrix::<f64, 6, 6>::zeros();
    for i in 0..3 {
        w[(i, 3 + i)] = o;
        w[(3 + i, i)] = -o;
    }
    let q = o * MONOPOLE_WEIGHT * s * 2.0 / norm.powi(3);
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                w[(k, i)] += q * levi_civita(k, i, j) * u[j];
            }
        }
    }
    Ok(w)
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn bracket<const D: usize>(p: &SMatrix<f64, D, D>, df: &[f64; D], dg: &[f64; D]) -> f64 {
    let a = SVector::<f64, D>::from_column_slice(df);
    let b = SVector::<f64, D>::from_column_slice(dg);
    a.dot(&(p * b))
}

fn upstairs_gradient(
    f: &impl ReducedObservable,
    pt: &UpstairsPoint,
) -> [f64; 8] {
    let (z, pi) = pt.seed();
    let (u, p, _) = ks_jets(&z, &pi);
    f.eval(&u, &p).real_gradient()
}

/// `|{f o ks, g o ks}_upstairs - {f, g}_reduced|` at an upstairs point, with
/// the monopole charge read off the point.
pub fn ks_bracket_check(f: &impl ReducedObservable, g: &impl ReducedObservable, pt: &UpstairsPoint) -> Result<f64> {
    if pt.norm_sqr() == 0.0 {
        return Err(Error::Singularity("KS map at z = 0"));
    }
    let up = bracket(&upstairs_tensor()?, &upstairs_gradient(f, pt), &upstairs_gradient(g, pt));
    let reduced = ks_map(pt.z, pt.pi)?;
    let w = reduced_form(&reduced.u, reduced.s)?;
    let det = w.determinant();
    let p6 = -w.try_inverse().ok_or(Error::SingularForm { det })?;
    let seed = |k: usize, v: f64| Jet::<6>::variable(v, k);
    let u = [seed(0, reduced.u[0]), seed(1, reduced.u[1]), seed(2, reduced.u[2])];
    let p = [seed(3, reduced.p[0]), seed(4, reduced.p[1]), seed(5, reduced.p[2])];
    let down = bracket(&p6, &f.eval(&u, &p).real_gradient(), &g.eval(&u, &p).real_gradient());
    Ok((up - down).abs())
}

/// `|{J, f o ks}|` upstairs: the U(1) generator is a Casimir of reduced observables.
pub fn ks_casimir_residual(f: &impl ReducedObservable, pt: &UpstairsPoint) -> Result<f64> {
    let (z, pi) = pt.seed();
    let (_, _, s) = ks_jets(&z, &pi);
    let dj = (s * 2.0).real_gradient();
    Ok(bracket(&upstairs_tensor()?, &dj, &upstairs_gradient(f, pt)).abs())
}

/// Oscillator on the three-dimensional (pseudo)sphere written in two complex
/// stereographic coordinates: the two-dimensional formula with `|z|^2` and
/// `|pi|^2` summed over components.
pub fn hamiltonian_osc_4d(pt: &UpstairsPoint, model: &CurvedModel) -> Result<f64> {
    if model.kind != SystemKind::Oscillator {
        return Err(invalid("kind", "the KS reduction starts from the oscillator"));
    }
    let n = pt.norm_sqr();
    let e = model.eps.value();
    let d = 1.0 - e * n;
    if d.abs() < crate::geometry::EQUATOR_MARGIN || (model.eps == CurvatureSign::Pseudosphere && d <= 0.0) {
        return Err(Error::OutsideDomain {
            modulus: n.sqrt(),
            reason: "outside the operative domain of the four-dimensional chart",
        });
    }
    let pp = pt.pi[0].norm_sqr() + pt.pi[1].norm_sqr();
    let r2 = model.radius * model.radius;
    Ok((1.0 + e * n).powi(2) * pp / (2.0 * r2) + 2.0 * model.alpha * model.alpha * r2 * n / (d * d))
}

/// Residual of the reduced Coulomb surface
/// `(1 - u^2)^2 (p^2 + s^2/u^2)/(8 r0^2) - (gamma/r0)(1 + u^2)/(2|u|) = E_C`
/// with the dictionary parameters at oscillator energy `energy`.
pub fn ks_energy_surface_residual(pt: &UpstairsPoint, model: &CurvedModel, energy: f64) -> Result<f64> {
    if model.kind != SystemKind::Oscillator {
        return Err(invalid("kind", "the KS reduction starts from the oscillator"));
    }
    let red = ks_map(pt.z, pt.pi)?;
    let u2: f64 = red.u.iter().map(|c| c * c).sum();
    if u2 == 0.0 {
        return Err(Error::Singularity("reduced surface at u = 0"));
    }
    let p2: f64 = red.p.iter().map(|c| c * c).sum();
    let params = params_unchecked(energy, model.alpha, model.radius, model.eps.value());
    let (r0, gamma) = (params.r0, params.gamma);
    let kinetic = (1.0 - u2).powi(2) * (p2 + red.s * red.s / u2) / (8.0 * r0 * r0);
    let potential = -(gamma / r0) * (1.0 + u2) / (2.0 * u2.sqrt());
    Ok((kinetic + potential - params.energy_c).abs())
}

/// A random upstairs point with `|z|^2 < 0.8`.
pub fn random_upstairs_point(rng: &mut SeededRng) -> UpstairsPoint {
    loop {
        let mut c = || Complex64::new(rng.gen_range(-0.65..0.65), rng.gen_range(-0.65..0.65));
        let pt = UpstairsPoint {
            z: [c(), c()],
            pi: [c(), c()],
        };
        let n = pt.norm_sqr();
        if n < 0.8 && n > 1e-2 {
            return pt;
        }
    }
}

/// A random upstairs point on the energy surface `H = energy`.
pub fn on_shell_upstairs_point(rng: &mut SeededRng, model: &CurvedModel, energy: f64) -> Result<UpstairsPoint> {
    for _ in 0..10_000 {
        let pt = random_upstairs_point(rng);
        let rest = UpstairsPoint {
            z: pt.z,
            pi: [Complex64::new(0.0, 0.0); 2],
        };
        let v = hamiltonian_osc_4d(&rest, model)?;
        let k = hamiltonian_osc_4d(&pt, model)? - v;
        if energy > v && k > 0.0 {
            let t = ((energy - v) / k).sqrt();
            return Ok(UpstairsPoint {
                z: pt.z,
                pi: pt.pi.map(|p| p * t),
            });
        }
    }
    Err(invalid("energy", format!("no accessible points at E = {energy}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::seeded;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn north_pole_example() {
        let r = ks_map([c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0); 2]).unwrap();
        assert_eq!(r.u, [0.0, 0.0, 1.0]);
        assert_eq!((r.p, r.s), ([0.0; 3], 0.0));
        let r = ks_map([c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0); 2]).unwrap();
        assert_eq!(r.u, [0.0, 0.0, 0.25]);
        assert!(ks_map([c(0.0, 0.0); 2], [c(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn modulus_and_phase_invariance() {
        let mut rng = seeded(6);
        for _ in 0..1000 {
            let pt = random_upstairs_point(&mut rng);
            let r = ks_map(pt.z, pt.pi).unwrap();
            let norm = r.u.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - pt.norm_sqr()).abs() < 1e-14);
            let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..6.0));
            // pi is conjugate to z, so it picks up the opposite phase
            let rotated = ks_map(pt.z.map(|z| z * phase), pt.pi.map(|p| p / phase)).unwrap();
            for k in 0..3 {
                assert!((rotated.u[k] - r.u[k]).abs() < 1e-14);
                assert!((rotated.p[k] - r.p[k]).abs() < 1e-12);
            }
            assert!((rotated.s - r.s).abs() < 1e-13);
        }
    }

    #[test]
    fn brackets_match_monopole_structure() {
        let mut rng = seeded(7);
        for _ in 0..200 {
            let pt = random_upstairs_point(&mut rng);
            for i in 0..3 {
                for j in 0..3 {
                    for (f, g) in [
                        (ReducedCoordinate::U(i), ReducedCoordinate::U(j)),
                        (ReducedCoordinate::U(i), ReducedCoordinate::P(j)),
                        (ReducedCoordinate::P(i), ReducedCoordinate::P(j)),
                    ] {
                        let d = ks_bracket_check(&f, &g, &pt).unwrap();
                        assert!(d < 1e-9, "{f:?} {g:?} {d}");
                    }
                }
                assert!(ks_casimir_residual(&ReducedCoordinate::P(i), &pt).unwrap() < 1e-9);
                assert!(ks_casimir_residual(&ReducedCoordinate::U(i), &pt).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn reduced_surface_on_and_off_shell() {
        let mut rng = seeded(8);
        for eps in CurvatureSign::both() {
            let m = CurvedModel::oscillator(eps, 1.1, 0.9).unwrap();
            for energy in [0.3, 1.0, 2.5] {
                for _ in 0..200 {
                    let pt = on_shell_upstairs_point(&mut rng, &m, energy).unwrap();
                    assert!(ks_energy_surface_residual(&pt, &m, energy).unwrap() < 1e-8);
                    let off = UpstairsPoint {
                        z: pt.z,
                        pi: pt.pi.map(|p| p * 1.5),
                    };
                    assert!(ks_energy_surface_residual(&off, &m, energy).unwrap() > 1e-3);
                }
            }
        }
    }

    #[test]
    fn embedded_plane_slice() {
        // z2 = 0 with pi1 along zbar1 gives s = 0 and reduces to the planar case
        let m = CurvedModel::oscillator(CurvatureSign::Pseudosphere, 1.0, 1.0).unwrap();
        let z1 = c(0.3, 0.4);
        let pt = UpstairsPoint {
            z: [z1, c(0.0, 0.0)],
            pi: [z1.conj() * 0.7, c(0.0, 0.0)],
        };
        let energy = hamiltonian_osc_4d(&pt, &m).unwrap();
        assert!(ks_map(pt.z, pt.pi).unwrap().s.abs() < 1e-15);
        assert!(ks_energy_surface_residual(&pt, &m, energy).unwrap() < 1e-9);
    }
}
