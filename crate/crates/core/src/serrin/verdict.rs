//! End-to-end audit: either the input is a radial solution on a disk, or the
//! index count of the eigenline field rules it out.

use num_traits::Zero;
use serde::Serialize;
use serde_json::Value;

use crate::algebra::rational::{rationalize, to_f64};
use crate::algebra::{BiPoly, Rational};
use crate::classify::{classify_point, is_in_u, radial_about, UPointClass};
use crate::domains::Domain;
use crate::fields::ScalarField;
use crate::linefield::{
    locate_singularities, ph_audit, tangency_on_domain, AuditConfig, PHReport, PHVerdict, TangencyReport,
};

use super::{
    check_overdetermined, check_pde_consistency, field_polynomial, fmt_rat, BoundaryReport, OverdeterminedSpec,
    PdeReport, SerrinError, MIN_BOUNDARY_SAMPLES,
};

#[derive(Debug, Clone, Serialize)]
pub struct AuditOptions {
    pub boundary_samples: usize,
    pub boundary_tol: f64,
    pub pde_grid: usize,
    pub pde_tol: f64,
    /// Accepted max deviation of the boundary from the fitted circle,
    /// relative to its radius.
    pub circle_tol: f64,
    /// Largest denominator tried when recovering exact degenerate points.
    pub max_denominator: i64,
    pub tangency_tol: f64,
    pub scan: AuditConfig,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            boundary_samples: MIN_BOUNDARY_SAMPLES,
            boundary_tol: 1e-8,
            pde_grid: 64,
            pde_tol: 1e-6,
            circle_tol: 1e-8,
            max_denominator: 1_000_000,
            tangency_tol: 1e-8,
            scan: AuditConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Conclusion {
    RadialDisk { center: [f64; 2], radius: f64, max_circle_deviation: f64 },
    Contradiction { ph: PHReport, tangency: TangencyReport },
    HypothesisNotMet { which: String },
    Inconclusive { why: String },
}

impl Conclusion {
    pub fn tag(&self) -> &'static str {
        match self {
            Conclusion::RadialDisk { .. } => "radial_disk",
            Conclusion::Contradiction { .. } => "contradiction",
            Conclusion::HypothesisNotMet { .. } => "hypothesis_not_met",
            Conclusion::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub field_kind: &'static str,
    pub domain_kind: &'static str,
    pub c: f64,
    pub pde: PdeReport,
    pub boundary: BoundaryReport,
    /// Classification of every located degenerate point.
    pub inventory: Vec<Value>,
    pub conclusion: Conclusion,
    pub notes: Vec<String>,
}

/// Least-squares circle through the points: `(center, radius, max deviation)`.
fn fit_circle(pts: &[[f64; 2]]) -> Option<([f64; 2], f64, f64)> {
    // x^2 + y^2 + D x + E y + F = 0, normal equations.
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for p in pts {
        let row = [p[0], p[1], 1.0];
        let z = -(p[0] * p[0] + p[1] * p[1]);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * z;
        }
    }
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det3(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut sol = [0.0; 3];
    for (k, s) in sol.iter_mut().enumerate() {
        let mut a = m;
        for i in 0..3 {
            a[i][k] = rhs[i];
        }
        *s = det3(a) / d;
    }
    let center = [-sol[0] / 2.0, -sol[1] / 2.0];
    let r2 = center[0] * center[0] + center[1] * center[1] - sol[2];
    if r2 <= 0.0 {
        return None;
    }
    let r = r2.sqrt();
    let dev = pts.iter().map(|p| ((p[0] - center[0]).hypot(p[1] - center[1]) - r).abs()).fold(0.0, f64::max);
    Some((center, r, dev))
}

fn radial_disk(domain: &Domain, center: [f64; 2], opts: &AuditOptions) -> Result<Conclusion, String> {
    let pts: Vec<[f64; 2]> = domain.boundary_samples(opts.boundary_samples).iter().map(|b| b.point).collect();
    let (fc, r, dev) = fit_circle(&pts).ok_or("boundary samples do not determine a circle")?;
    let off = (fc[0] - center[0]).hypot(fc[1] - center[1]);
    if dev > opts.circle_tol * r {
        return Err(format!("boundary deviates from the best circle by {dev:e} (radius {r})"));
    }
    if off > opts.circle_tol * r {
        return Err(format!("boundary circle is centred {off:e} away from the symmetry centre"));
    }
    Ok(Conclusion::RadialDisk { center, radius: r, max_circle_deviation: dev })
}

/// Runs the checks in order: nonzero field, `J[Lap u, H(u)] = 0`, boundary
/// conditions, topology and regularity, then the classification of the
/// degenerate points and either the radial-disk recognition or the index
/// count.
pub fn theorem1_audit(spec: &OverdeterminedSpec, opts: &AuditOptions) -> Result<Verdict, SerrinError> {
    let poly = field_polynomial(&spec.field);
    if poly.as_ref().is_some_and(BiPoly::is_zero) {
        return Err(SerrinError::ZeroField);
    }
    let pde = check_pde_consistency(&spec.field, &spec.domain, opts.pde_grid);
    if !pde.passes(opts.pde_tol) {
        return Err(SerrinError::PdeInconsistent(Box::new(pde)));
    }
    let boundary = check_overdetermined(spec, opts.boundary_samples);
    if !boundary.passes(opts.boundary_tol) {
        return Err(SerrinError::BoundaryViolation(Box::new(boundary)));
    }
    let mut v = Verdict {
        field_kind: spec.field.kind(),
        domain_kind: spec.domain.kind(),
        c: spec.c,
        pde,
        boundary,
        inventory: vec![],
        conclusion: Conclusion::Inconclusive { why: String::new() },
        notes: vec![],
    };
    if !spec.domain.is_simply_connected() {
        v.conclusion = Conclusion::HypothesisNotMet { which: "simply connected".into() };
        return Ok(v);
    }
    if !spec.field.is_analytic() {
        v.conclusion = Conclusion::HypothesisNotMet { which: "real analytic".into() };
        return Ok(v);
    }
    let Some(u) = poly else {
        v.conclusion = Conclusion::Inconclusive {
            why: "no exact Taylor data for a non-polynomial field; numeric checks only".into(),
        };
        return Ok(v);
    };
    v.conclusion = match audit_polynomial(&u, spec, opts, &mut v.inventory, &mut v.notes)? {
        Ok(c) => c,
        Err(why) => Conclusion::Inconclusive { why },
    };
    Ok(v)
}

fn audit_polynomial(
    u: &BiPoly,
    spec: &OverdeterminedSpec,
    opts: &AuditOptions,
    inventory: &mut Vec<Value>,
    notes: &mut Vec<String>,
) -> Result<Result<Conclusion, String>, SerrinError> {
    // Quadratic u has a constant Hessian: U is everything or nothing.
    if u.degree().is_some_and(|d| d <= 2) {
        let lambda = u.coeff(2, 0) * Rational::from_integer(2.into());
        let uniform = u.coeff(1, 1).is_zero() && u.coeff(2, 0) == u.coeff(0, 2);
        if !uniform {
            return Ok(Err("quadratic field with a non-umbilic Hessian has no degenerate points".into()));
        }
        if lambda.is_zero() {
            return Ok(Err("affine field".into()));
        }
        let cx = -u.coeff(1, 0) / &lambda;
        let cy = -u.coeff(0, 1) / &lambda;
        inventory.push(serde_json::json!({
            "point": [to_f64(&cx), to_f64(&cy)],
            "class": "quadratic",
            "lambda": fmt_rat(&lambda),
            "note": "D^2 u = lambda Id everywhere",
        }));
        if !radial_about(u, &cx, &cy) {
            return Ok(Err("umbilic quadratic is not radial about its critical point".into()));
        }
        return Ok(radial_disk(&spec.domain, [to_f64(&cx), to_f64(&cy)], opts));
    }

    let scan = locate_singularities(&spec.field, &spec.domain, &opts.scan);
    if let Some(why) = scan.non_isolated {
        notes.push(format!("sampled degenerate points: {:?}", scan.points));
        return Ok(Err(why));
    }
    let mut all_certified = true;
    for p in &scan.points {
        let exact = (rationalize(p[0], opts.max_denominator), rationalize(p[1], opts.max_denominator));
        let (Some(x), Some(y)) = exact else {
            all_certified = false;
            continue;
        };
        if !is_in_u(u, &x, &y) {
            notes.push(format!("degenerate point near ({:.9}, {:.9}) has no exact rational location", p[0], p[1]));
            all_certified = false;
            continue;
        }
        let rep = match classify_point(u, &x, &y) {
            Ok(r) => r,
            Err(e) => {
                notes.push(e.to_string());
                all_certified = false;
                continue;
            }
        };
        inventory.push(rep.to_json());
        match &rep.class {
            UPointClass::C3 { .. } => {
                if radial_about(u, &x, &y) {
                    return Ok(radial_disk(&spec.domain, [to_f64(&x), to_f64(&y)], opts));
                }
                return Ok(Err(format!("C3 point at ({}, {}) but u is not radial about it", fmt_rat(&x), fmt_rat(&y))));
            }
            UPointClass::LemmaViolation { reason } => {
                return Err(SerrinError::ViolationAt {
                    point: format!("({}, {})", fmt_rat(&x), fmt_rat(&y)),
                    reason: reason.clone(),
                });
            }
            _ => {}
        }
    }
    let ph = ph_audit(&spec.field, &spec.domain, &opts.scan);
    let tangency = tangency_on_domain(&spec.field, &spec.domain, opts.boundary_samples);
    if !all_certified {
        notes.push("some degenerate points were not classified exactly".into());
    }
    Ok(match ph.verdict {
        PHVerdict::Contradiction if tangency.passes(opts.tangency_tol) => {
            Ok(Conclusion::Contradiction { ph, tangency })
        }
        PHVerdict::Contradiction => {
            Err("index sum differs from 1 but the eigenlines are not tangent to the boundary".into())
        }
        PHVerdict::Consistent => Err("index sum is consistent and no radial point was found".into()),
        PHVerdict::Inconclusive => Err(format!("index audit inconclusive: {}", ph.notes.join("; "))),
    })
}
