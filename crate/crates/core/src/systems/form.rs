use nalgebra::Matrix4;
use num_complex::Complex64;

use super::observable::{catalog, gradient, ExactObservable, Observable};
use super::PhasePoint;
use crate::error::{Error, Result};
use crate::geometry::{metric_factor, CurvatureSign, StereoPoint};

/// Determinants below this are treated as singular.
const SINGULAR_DET: f64 = 1e-12;

/// Matrix `Omega` of a two-form `omega = 1/2 Omega_ij dxi^i ^ dxi^j` over
/// `(Re z, Im z, Re pi, Im pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticForm {
    matrix: Matrix4<f64>,
}

impl SymplecticForm {
    /// `dpi ^ dz + dpibar ^ dzbar = 2 dRe(pi) ^ dRe(z) - 2 dIm(pi) ^ dIm(z)`.
    pub fn canonical() -> Self {
        let mut m = Matrix4::zeros();
        m[(2, 0)] = 2.0;
        m[(0, 2)] = -2.0;
        m[(3, 1)] = -2.0;
        m[(1, 3)] = 2.0;
        Self { matrix: m }
    }

    /// Canonical form plus `i B0 lambda(z) dz ^ dzbar = 2 B0 lambda dRe(z) ^ dIm(z)`.
    pub fn magnetic(z: Complex64, radius: f64, eps: CurvatureSign, b0: f64) -> Result<Self> {
        let mut form = Self::canonical();
        if b0 != 0.0 {
            let lambda = metric_factor(StereoPoint(z), radius, eps)?;
            form.matrix[(0, 1)] += 2.0 * b0 * lambda;
            form.matrix[(1, 0)] -= 2.0 * b0 * lambda;
        }
        Ok(form)
    }

    pub fn from_matrix(matrix: Matrix4<f64>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn inverse(&self) -> Result<Matrix4<f64>> {
        let det = self.determinant();
        if !(det.abs() > SINGULAR_DET) {
            return Err(Error::SingularForm { det });
        }
        self.matrix.try_inverse().ok_or(Error::SingularForm { det })
    }

    /// `P = -Omega^{-1}`, so that `{f, g} = grad f . P . grad g`.
    pub fn poisson_tensor(&self) -> Result<Matrix4<f64>> {
        Ok(-self.inverse()?)
    }

    /// Summed over `i < j` against the antisymmetrised tensor, so `{f, f}` is exactly zero.
    pub fn bracket_real(&self, df: &[f64; 4], dg: &[f64; 4]) -> Result<f64> {
        let p = self.poisson_tensor()?;
        let mut acc = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                let pij = 0.5 * (p[(i, j)] - p[(j, i)]);
                acc += (df[i] * dg[j] - df[j] * dg[i]) * pij;
            }
        }
        Ok(acc)
    }

    pub fn bracket_complex(&self, df: &[Complex64; 4], dg: &[Complex64; 4]) -> Result<Complex64> {
        let p = self.poisson_tensor()?;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in i + 1..4 {
                let pij = 0.5 * (p[(i, j)] - p[(j, i)]);
                acc += (df[i] * dg[j] - df[j] * dg[i]) * pij;
            }
        }
        Ok(acc)
    }
}

pub fn symplectic_form(pt: &PhasePoint, eps: CurvatureSign, radius: f64, b0: f64) -> Result<SymplecticForm> {
    crate::geometry::check_operative(pt.z, eps)?;
    SymplecticForm::magnetic(pt.z, radius, eps, b0)
}

pub fn poisson_bracket(
    f: &dyn Observable,
    g: &dyn Observable,
    pt: &PhasePoint,
    form: &SymplecticForm,
) -> Result<f64> {
    let df = gradient(f, pt)?;
    let dg = gradient(g, pt)?;
    form.bracket_real(&df, &dg)
}

/// Complex-bilinear bracket of two complex observables.
pub fn complex_bracket(
    f: &ExactObservable,
    g: &ExactObservable,
    pt: &PhasePoint,
    form: &SymplecticForm,
) -> Result<Complex64> {
    let df = f.jet(pt)?.grad;
    let dg = g.jet(pt)?.grad;
    form.bracket_complex(&df, &dg)
}

/// Checks the bracket sign convention against `{Jbold, x3} = -eps xbar` and
/// `{pi, z} = 1`.
pub fn self_test_bracket_sign() -> Result<()> {
    let form = SymplecticForm::canonical();
    let pt = PhasePoint::new(Complex64::new(0.3, -0.2), Complex64::new(0.4, 0.7));
    let one = complex_bracket(&catalog::pi(), &catalog::z(), &pt, &form)?;
    let mut worst = (one - 1.0).norm();
    for eps in CurvatureSign::both() {
        let lhs = complex_bracket(&catalog::jbold(eps, 1.0, 0.0, 0.0), &catalog::x3(1.0, eps), &pt, &form)?;
        let rhs = -catalog::x_bold(1.0, eps).conj().complex_value(&pt)? * eps.value();
        worst = worst.max((lhs - rhs).norm());
    }
    if worst < 1e-12 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "bracket sign",
            reason: format!("convention self-test failed, residual {worst:e}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_phase_point, seeded};
    use crate::systems::CurvedModel;

    #[test]
    fn canonical_form_is_constant_antisymmetric() {
        let f = SymplecticForm::canonical();
        assert_eq!(f.matrix().transpose(), -f.matrix());
        assert!((f.determinant() - 16.0).abs() < 1e-12);
        self_test_bracket_sign().unwrap();
    }

    #[test]
    fn magnetic_entry_at_origin() {
        let f = SymplecticForm::magnetic(Complex64::new(0.0, 0.0), 1.0, CurvatureSign::Pseudosphere, -0.3).unwrap();
        assert!((f.matrix()[(0, 1)].abs() - 8.0 * 0.3).abs() < 1e-15);
        assert_eq!(f.matrix().transpose(), -f.matrix());
    }

    #[test]
    fn inverse_at_random_points() {
        let mut rng = seeded(17);
        for eps in CurvatureSign::both() {
            for _ in 0..1000 {
                let pt = random_phase_point(&mut rng, eps);
                let f = symplectic_form(&pt, eps, 1.3, 0.7).unwrap();
                let err = (f.inverse().unwrap() * f.matrix() - Matrix4::identity()).abs().max();
                assert!(err < 1e-12);
            }
        }
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let model = CurvedModel::oscillator(CurvatureSign::Sphere, 1.1, 0.8).unwrap();
        let h = catalog::hamiltonian_osc(&model).re();
        let x = catalog::x_bold(1.1, CurvatureSign::Sphere).im();
        let pt = PhasePoint::new(Complex64::new(0.2, 0.5), Complex64::new(-0.3, 0.1));
        let form = SymplecticForm::canonical();
        assert_eq!(poisson_bracket(&h, &h, &pt, &form).unwrap(), 0.0);
        let a = poisson_bracket(&h, &x, &pt, &form).unwrap();
        let b = poisson_bracket(&x, &h, &pt, &form).unwrap();
        assert!((a + b).abs() < 1e-15);
    }
}
