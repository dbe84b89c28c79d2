//! The overdetermined problem `F(D^2 u) = 0` in a domain with `u = 0` and
//! `|Du| = c` on its boundary: boundary and PDE checks, the scaling
//! covariance, the radial ODE families and the end-to-end audit.

mod annulus;
mod ode;
mod verdict;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::rational::{format_rational, from_f64};
use crate::algebra::{BiPoly, PolyFile, Rational};
use crate::domains::{Domain, DomainError};
use crate::fields::{Field, ScalarField};
use crate::operators::{hess_det, jacobian, jacobian_residual, laplacian};

pub use annulus::{annulus_grid_check, AnnulusGridReport};
pub use ode::{nodal_line_check, radial_ode_residual, NodalReport, OdeFamily, OdeReport};
pub use verdict::{theorem1_audit, AuditOptions, Conclusion, Verdict};

/// Boundary samples never go below this count.
pub const MIN_BOUNDARY_SAMPLES: usize = 256;

#[derive(Debug, Clone, Error)]
pub enum SerrinError {
    #[error("scale factor must be nonzero and finite")]
    ZeroScale,
    #[error("required c^2 = {0} is negative")]
    InvalidConstant(String),
    #[error("boundary constant c = {0} must be non-negative")]
    NegativeConstant(f64),
    #[error("u is identically zero")]
    ZeroField,
    #[error("J[Lap u, H(u)] does not vanish: {}", .0.summary())]
    PdeInconsistent(Box<PdeReport>),
    /// The degenerate point's jet contradicts `J[Lap u, H(u)] = 0`.
    #[error("J[Lap u, H(u)] = 0 is violated at {point}: {reason}")]
    ViolationAt { point: String, reason: String },
    #[error("boundary conditions fail: max |u| = {:e}, max ||Du| - c| = {:e}", .0.max_abs_u, .0.max_grad_deviation)]
    BoundaryViolation(Box<BoundaryReport>),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// A field, a domain and the boundary constant `c`.
#[derive(Debug, Clone)]
pub struct OverdeterminedSpec {
    pub field: Field,
    pub domain: Domain,
    pub c: f64,
}

impl OverdeterminedSpec {
    pub fn new(field: Field, domain: Domain, c: f64) -> Result<Self, SerrinError> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(SerrinError::NegativeConstant(c));
        }
        Ok(Self { field, domain, c })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    pub samples: usize,
    pub max_abs_u: f64,
    pub max_grad_deviation: f64,
    pub c: f64,
    pub failed_evaluations: usize,
}

impl BoundaryReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.failed_evaluations == 0 && self.max_abs_u <= tol && self.max_grad_deviation <= tol
    }
}

/// `max |u|` and `max ||Du| - c|` over at least 256 boundary samples.
pub fn check_overdetermined(spec: &OverdeterminedSpec, samples: usize) -> BoundaryReport {
    let pts = spec.domain.boundary_samples(samples.max(MIN_BOUNDARY_SAMPLES));
    let vals: Vec<Option<(f64, f64)>> = pts
        .par_iter()
        .map(|b| spec.field.jet3(b.point).ok().map(|j| (j.value.abs(), (j.grad_norm() - spec.c).abs())))
        .collect();
    let mut rep = BoundaryReport {
        samples: pts.len(),
        max_abs_u: 0.0,
        max_grad_deviation: 0.0,
        c: spec.c,
        failed_evaluations: 0,
    };
    for v in vals {
        match v {
            Some((u, g)) => {
                rep.max_abs_u = rep.max_abs_u.max(u);
                rep.max_grad_deviation = rep.max_grad_deviation.max(g);
            }
            None => rep.failed_evaluations += 1,
        }
    }
    rep
}

#[derive(Debug, Clone, Serialize)]
pub struct PdeReport {
    /// True when the check was an exact polynomial identity.
    pub exact: bool,
    /// `J[Lap u, H(u)]` as JSON terms when exact and nonzero.
    pub jacobian: Option<serde_json::Value>,
    pub identically_zero: Option<bool>,
    /// Max grid residual of `J[Lap u, H(u)]` (for exact checks, at the grid
    /// as well, for reference).
    pub residual: f64,
    pub grid_points: usize,
    pub failed_evaluations: usize,
}

impl PdeReport {
    pub fn passes(&self, tol: f64) -> bool {
        match self.identically_zero {
            Some(z) => z,
            None => self.failed_evaluations == 0 && self.residual <= tol,
        }
    }

    fn summary(&self) -> String {
        match self.identically_zero {
            Some(false) => "exact polynomial is nonzero".into(),
            _ => format!("grid residual {:e}", self.residual),
        }
    }
}

/// The polynomial view of a field, when it has one.
pub fn field_polynomial(field: &Field) -> Option<BiPoly> {
    match field {
        Field::Poly(p) => Some(p.poly().clone()),
        Field::RadialLinear(r) => r.to_poly().cloned(),
        _ => None,
    }
}

/// `J[Lap u, H(u)]` exactly for polynomial fields, otherwise the maximum
/// residual over an `n x n` grid of the domain.
pub fn check_pde_consistency(field: &Field, domain: &Domain, n: usize) -> PdeReport {
    let [x0, y0, x1, y1] = domain.bbox();
    let n = n.max(2);
    let cells: Vec<Option<Option<f64>>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let p = [x0 + (x1 - x0) * i as f64 / (n - 1) as f64, y0 + (y1 - y0) * j as f64 / (n - 1) as f64];
            if !domain.contains(p) {
                return None;
            }
            Some(field.jet3(p).ok().map(|jet| jacobian_residual(&jet)))
        })
        .collect();
    let mut residual: f64 = 0.0;
    let mut grid_points = 0;
    let mut failed = 0;
    for c in cells.into_iter().flatten() {
        grid_points += 1;
        match c {
            Some(r) => residual = residual.max(r),
            None => failed += 1,
        }
    }
    let (exact, jac, zero) = match field_polynomial(field) {
        Some(u) => {
            let j = jacobian(&laplacian(&u), &hess_det(&u));
            let zero = j.is_zero();
            (true, (!zero).then(|| serde_json::to_value(PolyFile::from_poly(&j)).expect("poly json")), Some(zero))
        }
        None => (false, None, None),
    };
    PdeReport { exact, jacobian: jac, identically_zero: zero, residual, grid_points, failed_evaluations: failed }
}

/// `u_t(x) = u(t x) / t^2` on the domain divided by `t`, with `c_t = c / |t|`.
/// Polynomials are rescaled exactly (using the exact binary value of `t`).
pub fn scale_transform(spec: &OverdeterminedSpec, t: f64) -> Result<OverdeterminedSpec, SerrinError> {
    if t == 0.0 || !t.is_finite() {
        return Err(SerrinError::ZeroScale);
    }
    let field = match &spec.field {
        Field::Poly(p) => Field::poly(scale_poly(p.poly(), &from_f64(t).ok_or(SerrinError::ZeroScale)?)),
        Field::Scaled { inner, t: s } => Field::Scaled { inner: inner.clone(), t: s * t },
        other => Field::Scaled { inner: Box::new(other.clone()), t },
    };
    Ok(OverdeterminedSpec { field, domain: spec.domain.scaled_down(t)?, c: spec.c / t.abs() })
}

/// `u(t x, t y) / t^2`.
pub fn scale_poly(u: &BiPoly, t: &Rational) -> BiPoly {
    let sx = BiPoly::x().scale(t);
    let sy = BiPoly::y().scale(t);
    u.compose(&sx, &sy).scale(&(t * t).recip())
}

/// Spread of `u` over circles about `center`: `max (max u - min u)` over the
/// given radii, relative to `max |u|` on those circles. Zero for radial fields.
pub fn radial_spread(field: &(impl ScalarField + ?Sized), center: [f64; 2], radii: &[f64], angles: usize) -> f64 {
    let mut spread: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &r in radii {
        let vals: Vec<f64> = (0..angles)
            .filter_map(|k| {
                let a = std::f64::consts::TAU * k as f64 / angles as f64;
                field.value([center[0] + r * a.cos(), center[1] + r * a.sin()]).ok()
            })
            .collect();
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        spread = spread.max(hi - lo);
        scale = scale.max(hi.abs()).max(lo.abs());
    }
    if scale == 0.0 {
        0.0
    } else {
        spread / scale
    }
}

pub(crate) fn fmt_rat(r: &Rational) -> String {
    format_rational(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};
    use crate::domains::{AnnulusField, FourierCurve, NormalMapDomain};
    use crate::fields::{BumpDisk, BumpField};
    use std::sync::Arc;

    fn torsion() -> BiPoly {
        (BiPoly::one() - BiPoly::rho2()).scale(&rat(1, 4))
    }

    fn torsion_spec() -> OverdeterminedSpec {
        OverdeterminedSpec::new(Field::poly(torsion()), Domain::disk([0.0, 0.0], 1.0).unwrap(), 0.5).unwrap()
    }

    #[test]
    fn torsion_boundary_exact() {
        let rep = check_overdetermined(&torsion_spec(), 256);
        assert!(rep.samples >= 256);
        assert!(rep.max_abs_u <= 1e-15 && rep.max_grad_deviation <= 1e-15, "{rep:?}");
    }

    #[test]
    fn bump_boundary_c0() {
        let f = BumpField::new(
            vec![BumpDisk { center: [-1.2, 0.0], radius: 1.0 }, BumpDisk { center: [1.2, 0.0], radius: 1.0 }],
            0.0,
        )
        .unwrap();
        let spec =
            OverdeterminedSpec::new(Field::Bump(f), Domain::rect([-3.0, -2.0], [3.0, 2.0]).unwrap(), 0.0).unwrap();
        let rep = check_overdetermined(&spec, 512);
        assert!(rep.passes(1e-10), "{rep:?}");
        let pde = check_pde_consistency(&spec.field, &spec.domain, 64);
        assert!(!pde.exact && pde.passes(1e-8), "{pde:?}");
        assert!(radial_spread(&spec.field, [0.0, 0.0], &[0.6, 1.2, 1.8], 64) > 0.5);
    }

    #[test]
    fn annulus_boundary_and_pde() {
        let band = NormalMapDomain::new(FourierCurve::ellipse(4.0, 8.0).unwrap(), 1.0).unwrap();
        let field = Field::Annulus(Arc::new(AnnulusField::new(band.clone()).unwrap()));
        let spec = OverdeterminedSpec::new(field, Domain::Band(Arc::new(band)), 2.0).unwrap();
        let rep = check_overdetermined(&spec, 256);
        assert!(rep.passes(1e-8), "{rep:?}");
        let pde = check_pde_consistency(&spec.field, &spec.domain, 48);
        assert!(pde.passes(1e-6), "{pde:?}");
    }

    #[test]
    fn negative_control_is_exactly_inconsistent() {
        let u = BiPoly::x().pow(4) + BiPoly::y().pow(3);
        let pde = check_pde_consistency(&Field::poly(u.clone()), &Domain::disk([0.0, 0.0], 1.0).unwrap(), 16);
        assert_eq!(pde.identically_zero, Some(false));
        // Lap u = 12x^2 + 6y, H = 72 x^2 y; J = 24x * 72x^2 - 6 * 144xy.
        let expect = BiPoly::monomial(3, 0, int(1728)) - BiPoly::monomial(1, 1, int(864));
        assert_eq!(jacobian(&laplacian(&u), &hess_det(&u)), expect);
    }

    #[test]
    fn radial_poly_is_consistent() {
        let u = BiPoly::rho2().pow(3) - BiPoly::rho2().scale(&int(2));
        let pde = check_pde_consistency(&Field::poly(u), &Domain::disk([0.0, 0.0], 1.0).unwrap(), 8);
        assert_eq!(pde.identically_zero, Some(true));
    }

    #[test]
    fn scaling_torsion() {
        let s = scale_transform(&torsion_spec(), 2.0).unwrap();
        assert_eq!(s.c, 0.25);
        match &s.domain {
            Domain::Disk { radius, .. } => assert_eq!(*radius, 0.5),
            _ => unreachable!(),
        }
        assert_eq!(
            field_polynomial(&s.field).unwrap(),
            (BiPoly::one() - BiPoly::rho2().scale(&int(4))).scale(&rat(1, 16))
        );
        let rep = check_overdetermined(&s, 256);
        assert!(rep.passes(1e-10));
        let back = scale_transform(&s, 0.5).unwrap();
        assert_eq!(field_polynomial(&back.field).unwrap(), torsion());
        assert_eq!(back.c, 0.5);
        assert!(matches!(scale_transform(&s, 0.0), Err(SerrinError::ZeroScale)));
    }

    #[test]
    fn scaling_identity() {
        let s = scale_transform(&torsion_spec(), 1.0).unwrap();
        assert_eq!(field_polynomial(&s.field).unwrap(), torsion());
    }

    #[test]
    fn scaled_annulus_keeps_residuals() {
        let band = NormalMapDomain::new(FourierCurve::ellipse(4.0, 8.0).unwrap(), 1.0).unwrap();
        let field = Field::Annulus(Arc::new(AnnulusField::new(band.clone()).unwrap()));
        let spec = OverdeterminedSpec::new(field, Domain::Band(Arc::new(band)), 2.0).unwrap();
        let before = check_overdetermined(&spec, 256);
        let s = scale_transform(&spec, 3.0).unwrap();
        let after = check_overdetermined(&s, 256);
        assert!((after.max_abs_u - before.max_abs_u).abs() <= 1e-10);
        assert!((after.max_grad_deviation - before.max_grad_deviation).abs() <= 1e-10, "{before:?} {after:?}");
    }
}
