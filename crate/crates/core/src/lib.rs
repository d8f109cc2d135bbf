//! Oscillator and Coulomb systems on the sphere and the pseudosphere, the
//! Bohlin and Kustaanheimo-Stiefel maps between them, and numerical checks
//! of the duality at the classical and quantum level.

pub mod cli;
pub mod duality;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod sampling;
pub mod schrodinger;
pub mod spectra;
pub mod systems;

pub use error::{Error, Result};
