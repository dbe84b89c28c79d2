//! Exact Hessian-operator algebra and numeric line-field analysis for planar
//! scalar fields, with audits of the overdetermined problem
//! `F(D^2 u) = 0` in `Omega`, `u = 0` and `|Du| = c` on the boundary.

pub mod algebra;
pub mod classify;
pub mod cli;
pub mod domains;
pub mod fields;
pub mod identities;
pub mod linefield;
pub mod operators;
pub mod serrin;
