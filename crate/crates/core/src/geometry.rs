//! Stereographic charts of the sphere, the pseudosphere and the
//! three-dimensional pseudosphere.
//!
//! The two-dimensional surfaces live in the ambient space with
//! `eps (x1^2 + x2^2) + x3^2 = R0^2`; the complex coordinate `z` covers the
//! sphere (`eps = +1`) as the projective line and the pseudosphere
//! (`eps = -1`) as the Poincaré disk. All formulas branch only through `eps`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::jet::Jet;

/// Margin kept away from `|z| = 1` on the sphere (the equator).
pub const EQUATOR_MARGIN: f64 = 1e-8;
/// Margin kept away from the boundary `|z| = 1` of the Poincaré disk.
pub const BOUNDARY_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurvatureSign {
    Sphere,
    Pseudosphere,
}

impl CurvatureSign {
    pub fn value(self) -> f64 {
        match self {
            CurvatureSign::Sphere => 1.0,
            CurvatureSign::Pseudosphere => -1.0,
        }
    }

    pub fn both() -> [CurvatureSign; 2] {
        [CurvatureSign::Sphere, CurvatureSign::Pseudosphere]
    }

    pub fn from_value(v: i32) -> Result<Self> {
        match v {
            1 => Ok(CurvatureSign::Sphere),
            -1 => Ok(CurvatureSign::Pseudosphere),
            other => Err(invalid("epsilon", format!("expected +1 or -1, got {other}"))),
        }
    }
}

impl fmt::Display for CurvatureSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvatureSign::Sphere => write!(f, "+1"),
            CurvatureSign::Pseudosphere => write!(f, "-1"),
        }
    }
}

impl std::str::FromStr for CurvatureSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "sphere" => Ok(CurvatureSign::Sphere),
            "-1" | "pseudosphere" => Ok(CurvatureSign::Pseudosphere),
            other => Err(invalid("epsilon", format!("expected +1 or -1, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl AmbientPoint {
    /// The complex combination `x1 + i x2`.
    pub fn bold(&self) -> Complex64 {
        Complex64::new(self.x1, self.x2)
    }

    /// Relative violation of `eps (x1^2 + x2^2) + x3^2 = R0^2`.
    pub fn constraint_violation(&self, radius: f64, eps: CurvatureSign) -> f64 {
        let lhs = eps.value() * (self.x1 * self.x1 + self.x2 * self.x2) + self.x3 * self.x3;
        (lhs - radius * radius).abs() / (radius * radius).max(self.x3 * self.x3)
    }
}

/// Stereographic coordinate on the sphere or the Poincaré disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StereoPoint(pub Complex64);

impl StereoPoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }
}

impl From<Complex64> for StereoPoint {
    fn from(z: Complex64) -> Self {
        Self(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ambient3Point {
    pub x: [f64; 3],
    pub x4: f64,
}

impl Ambient3Point {
    pub fn constraint_violation(&self, r0: f64) -> f64 {
        let x2: f64 = self.x.iter().map(|c| c * c).sum();
        (-x2 + self.x4 * self.x4 - r0 * r0).abs() / (self.x4 * self.x4)
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(invalid("radius", format!("must be positive and finite, got {radius}")))
    }
}

/// Checks that `z` lies inside the operative domain of the chart: the open
/// disk shrunk by [`BOUNDARY_MARGIN`] for the pseudosphere, and the plane with
/// the equator band of width [`EQUATOR_MARGIN`] removed for the sphere.
pub fn check_operative(z: Complex64, eps: CurvatureSign) -> Result<()> {
    let modulus = z.norm();
    if !modulus.is_finite() {
        return Err(Error::OutsideDomain {
            modulus,
            reason: "non-finite coordinate",
        });
    }
    match eps {
        CurvatureSign::Pseudosphere if modulus >= 1.0 - BOUNDARY_MARGIN => Err(Error::OutsideDomain {
            modulus,
            reason: "outside the Poincaré disk margin",
        }),
        CurvatureSign::Sphere if (modulus - 1.0).abs() <= EQUATOR_MARGIN => Err(Error::OutsideDomain {
            modulus,
            reason: "inside the equator margin",
        }),
        _ => Ok(()),
    }
}

/// `x1 + i x2 = R0 2z/(1 + eps z zbar)`, `x3 = R0 (1 - eps z zbar)/(1 + eps z zbar)`.
pub fn stereo_to_ambient(z: StereoPoint, radius: f64, eps: CurvatureSign) -> Result<AmbientPoint> {
    check_radius(radius)?;
    let denom = 1.0 + eps.value() * z.norm_sqr();
    if denom.abs() < f64::EPSILON {
        return Err(Error::PoleAtBoundary { modulus: z.0.norm() });
    }
    let bold = z.0 * (2.0 * radius / denom);
    Ok(AmbientPoint {
        x1: bold.re,
        x2: bold.im,
        x3: radius * (1.0 - eps.value() * z.norm_sqr()) / denom,
    })
}

pub fn ambient_to_stereo(x: AmbientPoint, radius: f64, eps: CurvatureSign) -> Result<StereoPoint> {
    check_radius(radius)?;
    let violation = x.constraint_violation(radius, eps);
    if violation > 1e-9 {
        return Err(Error::InvalidAmbientPoint { violation });
    }
    let denom = radius + x.x3;
    if denom.abs() <= 1e-14 * radius {
        return Err(Error::PoleAtBoundary {
            modulus: f64::INFINITY,
        });
    }
    Ok(StereoPoint(x.bold() / denom))
}

/// Conformal factor `lambda(z) = 4 R0^2 / (1 + eps z zbar)^2` with `ds^2 = lambda dz dzbar`.
pub fn metric_factor(z: StereoPoint, radius: f64, eps: CurvatureSign) -> Result<f64> {
    check_radius(radius)?;
    let denom = 1.0 + eps.value() * z.norm_sqr();
    if eps == CurvatureSign::Pseudosphere && denom < BOUNDARY_MARGIN {
        return Err(Error::PoleAtBoundary { modulus: z.0.norm() });
    }
    Ok(4.0 * radius * radius / (denom * denom))
}

/// `x = r0 2u/(1 - u^2)`, `x4 = r0 (1 + u^2)/(1 - u^2)`.
pub fn stereo3_to_ambient(u: [f64; 3], r0: f64) -> Result<Ambient3Point> {
    check_radius(r0)?;
    let u2: f64 = u.iter().map(|c| c * c).sum();
    if u2 >= 1.0 {
        return Err(Error::OutsideDomain {
            modulus: u2.sqrt(),
            reason: "three-dimensional chart needs |u| < 1",
        });
    }
    let scale = 2.0 * r0 / (1.0 - u2);
    Ok(Ambient3Point {
        x: u.map(|c| c * scale),
        x4: r0 * (1.0 + u2) / (1.0 - u2),
    })
}

/// Ambient coordinates `(x1 + i x2, x3)` as jets of the stereographic coordinate.
pub fn ambient_jet<const N: usize>(z: Jet<N>, radius: f64, eps: CurvatureSign) -> (Jet<N>, Jet<N>) {
    let zz = (z * z.conj()).re();
    let denom = zz * eps.value() + 1.0;
    let bold = z * (2.0 * radius) / denom;
    let x3 = (1.0 - zz * eps.value()) * radius / denom;
    (bold, x3.re())
}
