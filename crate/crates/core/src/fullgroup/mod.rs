//! Topological full groups at finite depth: piecewise elements, orbit
//! equivalence and return equivalence certificates, the twist construction.
//!
//! Certificates hold only up to their recorded word length and depth.

mod coe;
mod holonomy;
mod piecewise;

pub use coe::{
    coe_check, express_in_full_group, twist_action, CoeCertificate, CoeOutcome, Direction,
    TwistGenerator,
};
pub use holonomy::{
    identity_matching, restricted_holonomy, return_equivalence_check, HolonomyMap,
    ReturnEquivCertificate, ReturnEquivOutcome,
};
pub use piecewise::{
    apply_piecewise, canonicalize, compose_piecewise, invert_piecewise, validate_piecewise,
    PiecewiseDefect, PiecewiseElement,
};
