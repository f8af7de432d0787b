//! Finite-depth computations with minimal equicontinuous Cantor actions.
//!
//! A Cantor action is modelled by its odometer: a group given by a generator
//! alphabet acting on a tower of finite sets `X_0 ← X_1 ← ⋯ ← X_{L_max}`.
//! Everything here is a truncation of a statement about the inverse limit,
//! and every bounded search reports its verdict "up to bounds".
//!
//! * [`model`]: words, level permutations, chain models.
//! * [`regularity`]: clopen algebra and regularity checks (freeness, local
//!   quasi-analyticity, kernel normality, ascending chains, germs).
//! * [`fullgroup`]: piecewise full-group elements, orbit-equivalence and
//!   return-equivalence certificates, the twist construction.
//! * [`gallery`]: builders for odometers, products, dihedral, Heisenberg and
//!   automaton groups; DOT export.
//! * [`artifact`]: the tab-separated text form of witnesses and certificates.
//! * [`cli`]: configuration parsing and the batch runner.

pub mod artifact;
pub mod cli;
mod error;
pub mod fullgroup;
pub mod gallery;
pub mod model;
pub mod regularity;

pub use error::{Error, Result};
