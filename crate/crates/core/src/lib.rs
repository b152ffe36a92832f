//! Split octonions, the exceptional group G2' and its flag manifolds, cyclic
//! Hitchin systems, and positivity certificates for developing maps.

pub mod scalar;
pub mod linalg;
pub mod octonion_core;
pub mod cross_bases;
pub mod g2_lie;
pub mod flag_geometry;
pub mod pencil_bases;
pub mod hitchin_solver;
pub mod dev_certify;
pub mod cli;
