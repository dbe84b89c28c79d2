//! The planar Hessian operators: Laplacian, Hessian determinant, the mixed
//! bracket `{f, g}`, the Jacobian `J[f, g]` and the degeneracy discriminant.
//!
//! Every operator exists exactly on [`BiPoly`] and numerically on
//! [`HessianSample`] / jets.

use serde::Serialize;

use crate::algebra::BiPoly;
use crate::fields::{FieldError, Jet3, ScalarField};

/// Second partials at a point; symmetric by construction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct HessianSample {
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

impl HessianSample {
    pub fn new(uxx: f64, uxy: f64, uyy: f64) -> Self {
        Self { uxx, uxy, uyy }
    }

    pub fn laplacian(&self) -> f64 {
        self.uxx + self.uyy
    }

    pub fn det(&self) -> f64 {
        self.uxx * self.uyy - self.uxy * self.uxy
    }

    /// `(uxx - uyy)^2 + 4 uxy^2`, which equals `(trace)^2 - 4 det` but
    /// is never negative in floating point.
    pub fn discriminant(&self) -> f64 {
        let d = self.uxx - self.uyy;
        d * d + 4.0 * self.uxy * self.uxy
    }

    /// Double-angle vector `(uxx - uyy, 2 uxy)`; its argument is twice the
    /// angle of the eigenline of the larger eigenvalue.
    pub fn double_angle(&self) -> [f64; 2] {
        [self.uxx - self.uyy, 2.0 * self.uxy]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.uxx * self.uxx + 2.0 * self.uxy * self.uxy + self.uyy * self.uyy).sqrt()
    }

    /// Bilinear form `a^T D^2u b`.
    pub fn form(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        a[0] * (self.uxx * b[0] + self.uxy * b[1]) + a[1] * (self.uxy * b[0] + self.uyy * b[1])
    }
}

pub fn laplacian(p: &BiPoly) -> BiPoly {
    p.dx().dx() + p.dy().dy()
}

/// `H(p) = p_xx p_yy - p_xy^2`.
pub fn hess_det(p: &BiPoly) -> BiPoly {
    let pxx = p.dx().dx();
    let pyy = p.dy().dy();
    let pxy = p.dx().dy();
    &pxx * &pyy - &pxy * &pxy
}

/// `{f, g} = f_xx g_yy + f_yy g_xx - 2 f_xy g_xy`.
pub fn bracket(f: &BiPoly, g: &BiPoly) -> BiPoly {
    let (fxx, fyy, fxy) = (f.dx().dx(), f.dy().dy(), f.dx().dy());
    let (gxx, gyy, gxy) = (g.dx().dx(), g.dy().dy(), g.dx().dy());
    let two = BiPoly::constant(crate::algebra::int(2));
    &fxx * &gyy + &fyy * &gxx - &two * &(&fxy * &gxy)
}

/// `J[f, g] = f_x g_y - f_y g_x`.
pub fn jacobian(f: &BiPoly, g: &BiPoly) -> BiPoly {
    &f.dx() * &g.dy() - &f.dy() * &g.dx()
}

/// `(Laplacian p)^2 - 4 H(p)`; its zero set is where `D^2 p` is a multiple
/// of the identity.
pub fn discriminant(p: &BiPoly) -> BiPoly {
    let l = laplacian(p);
    let four = BiPoly::constant(crate::algebra::int(4));
    &l * &l - &four * &hess_det(p)
}

/// Second partials of a field at a point.
pub fn hess_at<F: ScalarField + ?Sized>(field: &F, p: [f64; 2]) -> Result<HessianSample, FieldError> {
    field.jet3(p).map(|j| j.hess)
}

/// Numeric `J[Laplacian u, H(u)]` from a third-order jet.
pub fn jacobian_residual(j: &Jet3) -> f64 {
    let [uxxx, uxxy, uxyy, uyyy] = j.third;
    let HessianSample { uxx, uxy, uyy } = j.hess;
    let lap_x = uxxx + uxyy;
    let lap_y = uxxy + uyyy;
    let h_x = uxxx * uyy + uxx * uxyy - 2.0 * uxy * uxxy;
    let h_y = uxxy * uyy + uxx * uyyy - 2.0 * uxy * uxyy;
    lap_x * h_y - lap_y * h_x
}
