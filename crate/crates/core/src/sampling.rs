//! Seeded random points for the property suites.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::CurvatureSign;
use crate::systems::PhasePoint;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn polar(rng: &mut SeededRng, r: f64) -> Complex64 {
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// A stereographic point well inside the operative domain: `|z| < 0.9` on
/// the disk, and `|z| < 0.85` or `1.2 < |z| < 3` on the sphere.
pub fn random_stereo(rng: &mut SeededRng, eps: CurvatureSign) -> Complex64 {
    match eps {
        CurvatureSign::Pseudosphere => {
            let r = 0.9 * rng.gen::<f64>().sqrt();
            polar(rng, r)
        }
        CurvatureSign::Sphere => {
            let r = if rng.gen_bool(0.5) {
                0.85 * rng.gen::<f64>().sqrt()
            } else {
                rng.gen_range(1.2..3.0)
            };
            polar(rng, r)
        }
    }
}

pub fn random_momentum(rng: &mut SeededRng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_phase_point(rng: &mut SeededRng, eps: CurvatureSign) -> PhasePoint {
    PhasePoint::new(random_stereo(rng, eps), random_momentum(rng))
}

/// A Coulomb-side point with `0.05 < |w| < 0.9`.
pub fn random_coulomb_point(rng: &mut SeededRng) -> PhasePoint {
    let r = rng.gen_range(0.05..0.9);
    PhasePoint::new(polar(rng, r), random_momentum(rng))
}

/// Rescales the momentum of `pt` so that a Hamiltonian quadratic in the
/// momentum takes the value `energy`. `None` when the point is classically
/// forbidden.
pub fn scale_to_energy(
    pt: PhasePoint,
    energy: f64,
    hamiltonian: impl Fn(&PhasePoint) -> Result<f64>,
) -> Result<Option<PhasePoint>> {
    let potential = hamiltonian(&PhasePoint::new(pt.z, Complex64::new(0.0, 0.0)))?;
    let kinetic = hamiltonian(&pt)? - potential;
    if kinetic <= 0.0 || energy <= potential {
        return Ok(None);
    }
    let t = ((energy - potential) / kinetic).sqrt();
    Ok(Some(PhasePoint::new(pt.z, pt.pi * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::check_operative;

    #[test]
    fn same_seed_same_points() {
        let mut a = seeded(9);
        let mut b = seeded(9);
        for _ in 0..10 {
            assert_eq!(
                random_phase_point(&mut a, CurvatureSign::Sphere),
                random_phase_point(&mut b, CurvatureSign::Sphere)
            );
        }
    }

    #[test]
    fn points_are_operative() {
        let mut rng = seeded(1);
        for eps in CurvatureSign::both() {
            for _ in 0..1000 {
                check_operative(random_stereo(&mut rng, eps), eps).unwrap();
            }
        }
    }
}
