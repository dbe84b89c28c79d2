//! Exact algebra: rationals, bivariate polynomials, trigonometric
//! polynomials and homogeneous polynomials in polar form.

pub mod bipoly;
pub mod json;
pub mod polar;
pub mod rational;
pub mod trig;

pub use bipoly::{Axis, BiPoly, F64Poly};
pub use json::{parse_poly_json, poly_to_json, PolyFile};
pub use polar::{from_polar, polar_laplacian, re_im_zeta_pow, to_polar, to_polar_with_degree, PolarHomog};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
pub use trig::TrigPoly;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("angular part with harmonic {max_harmonic} is not a polynomial at degree {degree}")]
    NotPolynomial { degree: u32, max_harmonic: u32 },
    #[error("polar laplacian needs degree >= 2, got {0}")]
    DegreeUnderflow(u32),
    #[error("duplicate term ({0}, {1})")]
    DuplicateTerm(u32, u32),
    #[error("parse error: {0}")]
    Parse(String),
}
