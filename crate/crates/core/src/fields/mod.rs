//! Scalar fields with closed-form jets up to third order.

mod bump;
mod poly;
mod radial;
mod spec;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::BiPoly;
use crate::domains::AnnulusField;
use crate::operators::HessianSample;

pub use bump::{bump_profile_derivs, BumpDisk, BumpField};
pub use poly::PolyField;
pub use radial::{RadialLinearField, RadialProfile};
pub use spec::{load_field, BumpDiskSpec, FieldSpec, ProfileSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("point ({0}, {1}) is outside the field's domain of definition")]
    OutOfDomain(f64, f64),
    #[error("normal-map Jacobian factor {0:e} is below the conditioning threshold")]
    NearSingular(f64),
    #[error("r^2 = {r2} is outside the bump support of radius {radius}")]
    OutsideSupport { r2: f64, radius: f64 },
    #[error("point ({0}, {1}) is not in the band")]
    NotInBand(f64, f64),
    #[error("invalid field: {0}")]
    Invalid(String),
}

/// Value and partial derivatives through third order at one point.
/// `third` is `[uxxx, uxxy, uxyy, uyyy]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Jet3 {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: HessianSample,
    pub third: [f64; 4],
}

impl Jet3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && [self.hess.uxx, self.hess.uxy, self.hess.uyy].iter().all(|v| v.is_finite())
            && self.third.iter().all(|v| v.is_finite())
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad[0].hypot(self.grad[1])
    }

    /// Gradient of the double-angle vector `(uxx - uyy, 2 uxy)` as
    /// `[[d/dx, d/dy] of first component, [d/dx, d/dy] of second]`.
    pub fn double_angle_jacobian(&self) -> [[f64; 2]; 2] {
        let [uxxx, uxxy, uxyy, uyyy] = self.third;
        [[uxxx - uxyy, uxxy - uyyy], [2.0 * uxxy, 2.0 * uxyy]]
    }

    /// Jet of `u(t p) / t^2` given the jet of `u` at `t p`.
    pub fn rescaled(&self, t: f64) -> Self {
        Self {
            value: self.value / (t * t),
            grad: [self.grad[0] / t, self.grad[1] / t],
            hess: self.hess,
            third: self.third.map(|v| v * t),
        }
    }
}

pub trait ScalarField: Send + Sync {
    fn jet3(&self, p: [f64; 2]) -> Result<Jet3, FieldError>;

    fn value(&self, p: [f64; 2]) -> Result<f64, FieldError> {
        self.jet3(p).map(|j| j.value)
    }

    /// Real analytic on its whole domain of definition.
    fn is_analytic(&self) -> bool {
        true
    }

    /// Exact polynomial form, when there is one.
    fn as_poly(&self) -> Option<&BiPoly> {
        None
    }
}

/// The concrete field kinds handled by the audits.
#[derive(Debug, Clone)]
pub enum Field {
    Poly(PolyField),
    Bump(BumpField),
    RadialLinear(RadialLinearField),
    Annulus(Arc<AnnulusField>),
    /// `u(t x) / t^2` for a non-polynomial inner field.
    Scaled {
        inner: Box<Field>,
        t: f64,
    },
}

impl Field {
    pub fn poly(p: BiPoly) -> Self {
        Field::Poly(PolyField::new(p))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Field::Poly(_) => "poly",
            Field::Bump(_) => "bump",
            Field::RadialLinear(_) => "radial_linear",
            Field::Annulus(_) => "annulus",
            Field::Scaled { .. } => "scaled",
        }
    }
}

impl ScalarField for Field {
    fn jet3(&self, p: [f64; 2]) -> Result<Jet3, FieldError> {
        match self {
            Field::Poly(f) => f.jet3(p),
            Field::Bump(f) => f.jet3(p),
            Field::RadialLinear(f) => f.jet3(p),
            Field::Annulus(f) => f.jet3(p),
            Field::Scaled { inner, t } => inner.jet3([p[0] * t, p[1] * t]).map(|j| j.rescaled(*t)),
        }
    }

    fn is_analytic(&self) -> bool {
        match self {
            Field::Poly(_) | Field::Annulus(_) => true,
            Field::Bump(_) => false,
            Field::RadialLinear(f) => f.is_analytic(),
            Field::Scaled { inner, .. } => inner.is_analytic(),
        }
    }

    fn as_poly(&self) -> Option<&BiPoly> {
        match self {
            Field::Poly(f) => Some(f.poly()),
            _ => None,
        }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Compares every jet entry against a central difference of the entry
    /// one order below.
    pub fn check_jet_consistency<F: ScalarField>(f: &F, p: [f64; 2], h: f64, rel: f64) {
        let j = f.jet3(p).unwrap();
        let jx = |s: f64| f.jet3([p[0] + s * h, p[1]]).unwrap();
        let jy = |s: f64| f.jet3([p[0], p[1] + s * h]).unwrap();
        let (xp, xm, yp, ym) = (jx(1.0), jx(-1.0), jy(1.0), jy(-1.0));
        let d = |a: f64, b: f64| (a - b) / (2.0 * h);
        let scale = 1.0 + j.grad_norm() + j.hess.norm() + j.third.iter().map(|v| v.abs()).sum::<f64>();
        let pairs = [
            (j.grad[0], d(xp.value, xm.value)),
            (j.grad[1], d(yp.value, ym.value)),
            (j.hess.uxx, d(xp.grad[0], xm.grad[0])),
            (j.hess.uxy, d(yp.grad[0], ym.grad[0])),
            (j.hess.uyy, d(yp.grad[1], ym.grad[1])),
            (j.third[0], d(xp.hess.uxx, xm.hess.uxx)),
            (j.third[1], d(yp.hess.uxx, ym.hess.uxx)),
            (j.third[2], d(yp.hess.uxy, ym.hess.uxy)),
            (j.third[3], d(yp.hess.uyy, ym.hess.uyy)),
        ];
        for (k, (exact, fd)) in pairs.iter().enumerate() {
            assert!((exact - fd).abs() <= rel * scale, "entry {k} at {p:?}: closed form {exact}, difference {fd}");
        }
    }
}
