//! Forward-mode complex dual numbers.
//!
//! A [`Jet`] carries a complex value together with its partial derivatives
//! with respect to `N` real coordinates. Phase-space observables are written
//! once as formulas over jets; seeding the real coordinates of a point gives
//! exact gradients for Poisson brackets and Hamiltonian vector fields, and
//! `Jet<0>` serves as a plain complex scalar.
//!
//! Conjugation acts on the value and on every partial, which is correct
//! because the seeds are derivatives along *real* directions.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const N: usize> {
    pub value: Complex64,
    pub grad: [Complex64; N],
}

pub type Jet4 = Jet<4>;

fn zeros<const N: usize>() -> [Complex64; N] {
    [Complex64::new(0.0, 0.0); N]
}

impl<const N: usize> Jet<N> {
    pub fn constant(value: impl Into<Complex64>) -> Self {
        Self {
            value: value.into(),
            grad: zeros(),
        }
    }

    pub fn real(value: f64) -> Self {
        Self::constant(Complex64::new(value, 0.0))
    }

    /// The real coordinate `index`, with value `value`.
    pub fn variable(value: f64, index: usize) -> Self {
        let mut grad = zeros();
        grad[index] = Complex64::new(1.0, 0.0);
        Self {
            value: Complex64::new(value, 0.0),
            grad,
        }
    }

    /// `re + i im` where `re` and `im` are the real coordinates `re_index`, `im_index`.
    pub fn complex_variable(value: Complex64, re_index: usize, im_index: usize) -> Self {
        let mut grad = zeros();
        grad[re_index] = Complex64::new(1.0, 0.0);
        grad[im_index] = I;
        Self { value, grad }
    }

    pub fn conj(self) -> Self {
        Self {
            value: self.value.conj(),
            grad: self.grad.map(|g| g.conj()),
        }
    }

    pub fn re(self) -> Self {
        Self {
            value: Complex64::new(self.value.re, 0.0),
            grad: self.grad.map(|g| Complex64::new(g.re, 0.0)),
        }
    }

    fn chain(self, value: Complex64, slope: Complex64) -> Self {
        Self {
            value,
            grad: self.grad.map(|g| g * slope),
        }
    }

    /// Principal square root.
    pub fn sqrt(self) -> Self {
        let root = self.value.sqrt();
        self.chain(root, 0.5 / root)
    }

    pub fn recip(self) -> Self {
        let inv = 1.0 / self.value;
        self.chain(inv, -inv * inv)
    }

    pub fn powi(self, n: i32) -> Self {
        let value = self.value.powi(n);
        let slope = if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.value.powi(n - 1) * n as f64
        };
        self.chain(value, slope)
    }

    pub fn square(self) -> Self {
        self * self
    }

    /// `sqrt(self * conj(self))`, a real jet.
    pub fn modulus(self) -> Self {
        (self * self.conj()).re().sqrt()
    }

    /// Gradient of the real part.
    pub fn real_gradient(&self) -> [f64; N] {
        self.grad.map(|g| g.re)
    }
}

impl<const N: usize> From<f64> for Jet<N> {
    fn from(value: f64) -> Self {
        Self::real(value)
    }
}

impl<const N: usize> From<Complex64> for Jet<N> {
    fn from(value: Complex64) -> Self {
        Self::constant(value)
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut grad = zeros();
        for (k, g) in grad.iter_mut().enumerate() {
            *g = self.grad[k] * rhs.value + self.value * rhs.grad[k];
        }
        Self {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            grad: self.grad.map(|g| -g),
        }
    }
}

impl<const N: usize> AddAssign for Jet<N> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> SubAssign for Jet<N> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const N: usize> MulAssign for Jet<N> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

macro_rules! scalar_ops {
    ($t:ty) => {
        impl<const N: usize> Add<$t> for Jet<N> {
            type Output = Self;
            fn add(mut self, rhs: $t) -> Self {
                self.value += rhs;
                self
            }
        }
        impl<const N: usize> Sub<$t> for Jet<N> {
            type Output = Self;
            fn sub(mut self, rhs: $t) -> Self {
                self.value -= rhs;
                self
            }
        }
        impl<const N: usize> Mul<$t> for Jet<N> {
            type Output = Self;
            fn mul(self, rhs: $t) -> Self {
                Self {
                    value: self.value * rhs,
                    grad: self.grad.map(|g| g * rhs),
                }
            }
        }
        impl<const N: usize> Div<$t> for Jet<N> {
            type Output = Self;
            fn div(self, rhs: $t) -> Self {
                Self {
                    value: self.value / rhs,
                    grad: self.grad.map(|g| g / rhs),
                }
            }
        }
        impl<const N: usize> Add<Jet<N>> for $t {
            type Output = Jet<N>;
            fn add(self, rhs: Jet<N>) -> Jet<N> {
                rhs + self
            }
        }
        impl<const N: usize> Sub<Jet<N>> for $t {
            type Output = Jet<N>;
            fn sub(self, rhs: Jet<N>) -> Jet<N> {
                -rhs + self
            }
        }
        impl<const N: usize> Mul<Jet<N>> for $t {
            type Output = Jet<N>;
            fn mul(self, rhs: Jet<N>) -> Jet<N> {
                rhs * self
            }
        }
        impl<const N: usize> Div<Jet<N>> for $t {
            type Output = Jet<N>;
            fn div(self, rhs: Jet<N>) -> Jet<N> {
                rhs.recip() * self
            }
        }
    };
}

scalar_ops!(f64);
scalar_ops!(Complex64);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_rule_matches_finite_difference() {
        let f = |x: f64, y: f64| {
            let z = Jet::<2>::complex_variable(c(x, y), 0, 1);
            (z * z.conj() + z.powi(3)) / (1.0 + z * z.conj())
        };
        let (x, y) = (0.3, -0.7);
        let jet = f(x, y);
        let h = 1e-6;
        let dx = (f(x + h, y).value - f(x - h, y).value) / (2.0 * h);
        let dy = (f(x, y + h).value - f(x, y - h).value) / (2.0 * h);
        assert!((jet.grad[0] - dx).norm() < 1e-8);
        assert!((jet.grad[1] - dy).norm() < 1e-8);
    }

    #[test]
    fn modulus_is_real_with_radial_gradient() {
        let z = Jet::<2>::complex_variable(c(3.0, 4.0), 0, 1);
        let m = z.modulus();
        assert!((m.value - c(5.0, 0.0)).norm() < 1e-15);
        assert!((m.grad[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((m.grad[1] - c(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn wirtinger_partials_of_z() {
        // d/dx z = 1, d/dy z = i; conj flips the imaginary direction
        let z = Jet::<2>::complex_variable(c(0.1, 0.2), 0, 1);
        let zb = z.conj();
        assert_eq!(zb.grad[1], c(0.0, -1.0));
        let zz = z * zb;
        assert!((zz.grad[0] - c(0.2, 0.0)).norm() < 1e-15);
        assert!((zz.grad[1] - c(0.4, 0.0)).norm() < 1e-15);
    }
}
