//! Residuals of the rotation-generator brackets, the cubic algebra of the
//! hidden invariant, and the magnetic closure, over seeded random points.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::calibration::{calibrate_magnetic_shift, MagneticCalibration};
use super::form::{complex_bracket, SymplecticForm};
use super::observable::catalog;
use super::{CoulombModel, CurvedModel, PhasePoint, VortexCharge};
use crate::error::Result;
use crate::geometry::CurvatureSign;
use crate::jet::I;
use crate::sampling::{random_coulomb_point, random_phase_point, seeded};

pub const CANONICAL_TOLERANCE: f64 = 1e-9;
pub const CUBIC_TOLERANCE: f64 = 1e-8;
pub const MAGNETIC_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Canonical,
    Cubic,
    Magnetic,
}

impl Sector {
    pub fn tolerance(self) -> f64 {
        match self {
            Sector::Canonical => CANONICAL_TOLERANCE,
            Sector::Cubic => CUBIC_TOLERANCE,
            Sector::Magnetic => MAGNETIC_TOLERANCE,
        }
    }
}

/// Relation names with their sectors, in report order.
pub const RELATIONS: [(&str, Sector); 9] = [
    ("{Jbold, x} = 2 x3", Sector::Canonical),
    ("{Jbold, x3} = -eps xbar", Sector::Canonical),
    ("{J, x} = i x", Sector::Canonical),
    ("{Jbold, Jbold_bar} = -2i eps J", Sector::Canonical),
    ("{Jbold, J} = i Jbold", Sector::Canonical),
    ("{J, H_osc} = 0", Sector::Canonical),
    ("{I, J} = 2i I", Sector::Cubic),
    ("{I_bar, I} = 4i(alpha^2 J + eps J H/R0^2 - J^3/(2R0^4))", Sector::Cubic),
    ("{I, H_osc} = 0", Sector::Cubic),
];

/// `|lhs - rhs|` of every relation in `RELATIONS` at one point, with `B0 = 0`.
pub fn relation_residuals(pt: &PhasePoint, model: &CurvedModel) -> Result<[f64; 9]> {
    let (eps, radius, alpha) = (model.eps, model.radius, model.alpha);
    let form = SymplecticForm::canonical();
    let jb = catalog::jbold(eps, radius, 0.0, 0.0);
    let j = catalog::jrot(eps, radius, 0.0, 0.0);
    let x = catalog::x_bold(radius, eps);
    let x3 = catalog::x3(radius, eps);
    let h = catalog::hamiltonian_osc(model);
    let inv = catalog::hidden_invariant(model);

    let xv = x.complex_value(pt)?;
    let x3v = x3.complex_value(pt)?;
    let jv = j.complex_value(pt)?;
    let jbv = jb.complex_value(pt)?;
    let hv = h.complex_value(pt)?;
    let iv = inv.complex_value(pt)?;
    let e = eps.value();
    let r2 = radius * radius;
    let br = |f: &_, g: &_| complex_bracket(f, g, pt, &form);
    let cubic: Complex64 = 4.0 * I * (alpha * alpha * jv + e * jv * hv / r2 - jv * jv * jv / (2.0 * r2 * r2));

    Ok([
        (br(&jb, &x)? - 2.0 * x3v).norm(),
        (br(&jb, &x3)? + e * xv.conj()).norm(),
        (br(&j, &x)? - I * xv).norm(),
        (br(&jb, &jb.conj())? + 2.0 * I * e * jv).norm(),
        (br(&jb, &j)? - I * jbv).norm(),
        br(&j, &h)?.norm(),
        (br(&inv, &j)? - 2.0 * I * iv).norm(),
        (br(&inv.conj(), &inv)? - cubic).norm(),
        br(&inv, &h)?.norm(),
    ])
}

/// `|{A, H_C}|` and `|{A, J_C} - i A|` at one Coulomb point.
pub fn coulomb_relation_residuals(pt: &PhasePoint, model: &CoulombModel) -> Result<[f64; 2]> {
    let form = SymplecticForm::canonical();
    let a = catalog::runge_lenz(model);
    let h = catalog::hamiltonian_coulomb(model);
    let j = catalog::coulomb_rotation();
    let av = a.complex_value(pt)?;
    Ok([
        complex_bracket(&a, &h, pt, &form)?.norm(),
        (complex_bracket(&a, &j, pt, &form)? - I * av).norm(),
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationResidual {
    pub relation: String,
    pub eps: Option<CurvatureSign>,
    pub sector: Sector,
    pub max_residual: f64,
    pub tolerance: f64,
    pub points: usize,
}

impl RelationResidual {
    pub fn passed(&self) -> bool {
        self.max_residual < self.tolerance
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub seed: u64,
    pub relations: Vec<RelationResidual>,
    pub magnetic: Vec<(CurvatureSign, MagneticCalibration)>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(RelationResidual::passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraSettings {
    pub seed: u64,
    pub points: usize,
    pub radius: f64,
    pub alpha: f64,
    pub b0: f64,
    pub gamma: f64,
}

impl Default for AlgebraSettings {
    fn default() -> Self {
        AlgebraSettings {
            seed: 1,
            points: 1000,
            radius: 1.3,
            alpha: 0.9,
            b0: 0.7,
            gamma: 0.8,
        }
    }
}

fn fold_max(rows: &[Vec<f64>], width: usize) -> Vec<f64> {
    (0..width)
        .map(|k| rows.iter().fold(0.0f64, |m, r| m.max(r[k])))
        .collect()
}

/// Every relation at `settings.points` seeded points per curvature sign, the
/// Coulomb relations on the pseudosphere, and the magnetic closure at the
/// fitted shift coefficient. The same seed gives the same report.
pub fn algebra_suite(settings: &AlgebraSettings) -> Result<AlgebraReport> {
    let mut relations = Vec::new();
    let mut magnetic = Vec::new();
    let mut rng = seeded(settings.seed);
    for eps in CurvatureSign::both() {
        let model = CurvedModel::oscillator(eps, settings.radius, settings.alpha)?;
        let points: Vec<PhasePoint> = (0..settings.points).map(|_| random_phase_point(&mut rng, eps)).collect();
        let rows: Vec<Vec<f64>> = points
            .par_iter()
            .map(|pt| relation_residuals(pt, &model).map(|r| r.to_vec()))
            .collect::<Result<_>>()?;
        for ((name, sector), max_residual) in RELATIONS.iter().zip(fold_max(&rows, RELATIONS.len())) {
            relations.push(RelationResidual {
                relation: name.to_string(),
                eps: Some(eps),
                sector: *sector,
                max_residual,
                tolerance: sector.tolerance(),
                points: points.len(),
            });
        }

        let field_model = model.with_field(settings.b0, 0.0)?;
        let calibration = calibrate_magnetic_shift(&field_model, &points)?;
        relations.push(RelationResidual {
            relation: format!("magnetic closure at c = {:.6}", calibration.fitted_coefficient),
            eps: Some(eps),
            sector: Sector::Magnetic,
            max_residual: calibration.residual_fitted,
            tolerance: MAGNETIC_TOLERANCE,
            points: points.len(),
        });
        magnetic.push((eps, calibration));
    }

    let coulomb = CoulombModel::new(settings.radius * settings.radius, settings.gamma, VortexCharge::Zero)?;
    let points: Vec<PhasePoint> = (0..settings.points).map(|_| random_coulomb_point(&mut rng)).collect();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|pt| coulomb_relation_residuals(pt, &coulomb).map(|r| r.to_vec()))
        .collect::<Result<_>>()?;
    let names = ["{A, H_C} = 0", "{A, J_C} = i A"];
    for (name, max_residual) in names.iter().zip(fold_max(&rows, 2)) {
        relations.push(RelationResidual {
            relation: name.to_string(),
            eps: None,
            sector: Sector::Cubic,
            max_residual,
            tolerance: CUBIC_TOLERANCE,
            points: points.len(),
        });
    }
    Ok(AlgebraReport {
        seed: settings.seed,
        relations,
        magnetic,
    })
}
