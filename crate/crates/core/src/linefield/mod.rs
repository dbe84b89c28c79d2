//! Eigenline fields of `D^2 u` and their rotation indices.
//!
//! A line field is carried by its double-angle vector
//! `V = (uxx - uyy, 2 uxy)`; the line-field index around a point is half the
//! winding number of `V`.

mod audit;
mod crossing;

use std::f64::consts::PI;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::Rational;
use crate::domains::{BoundarySample, Domain};
use crate::fields::{FieldError, ScalarField};
use crate::operators::HessianSample;

pub use audit::{dump_field_csv, locate_singularities, ph_audit, AuditConfig, PHReport, PHVerdict, SingularityScan};
pub use crossing::{c1_isolation_certificate, c2_crossing_check, CrossingReport, IsolationCertificate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineFieldError {
    #[error("Hessian is a multiple of the identity: no eigenlines")]
    Degenerate,
    #[error("degenerate Hessian on the integration path at ({0}, {1})")]
    DegenerateOnPath(f64, f64),
    #[error("angle tracking did not converge within {0} samples")]
    NonConvergent(usize),
    #[error("winding {0} is not within tolerance of an integer")]
    NonIntegerWinding(f64),
    #[error("radii disagree: indices {0:?}")]
    RadiusUnstable(Vec<String>),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Relative threshold below which `V` counts as zero.
pub const DEGENERATE_REL: f64 = 1e-12;
/// Distance from an integer accepted before snapping a winding count.
pub const SNAP_TOL: f64 = 1e-6;
const MAX_SAMPLES: usize = 1 << 16;
const INITIAL_SAMPLES: usize = 64;

/// An eigenline, stored as the unit vector `(cos 2 phi, sin 2 phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineDirection {
    pub double_angle_vector: [f64; 2],
}

impl LineDirection {
    /// Angle of the line in `[0, pi)`.
    pub fn angle(&self) -> f64 {
        let a = 0.5 * self.double_angle_vector[1].atan2(self.double_angle_vector[0]);
        a.rem_euclid(PI)
    }

    /// Unit vector along the line.
    pub fn direction(&self) -> [f64; 2] {
        let a = self.angle();
        [a.cos(), a.sin()]
    }
}

/// Eigenlines of the larger and the smaller eigenvalue, in that order.
pub fn eigen_directions(h: &HessianSample) -> Result<(LineDirection, LineDirection), LineFieldError> {
    let v = h.double_angle();
    let m = v[0].hypot(v[1]);
    if m <= DEGENERATE_REL * h.norm() || m == 0.0 {
        return Err(LineFieldError::Degenerate);
    }
    let major = [v[0] / m, v[1] / m];
    Ok((LineDirection { double_angle_vector: major }, LineDirection { double_angle_vector: [-major[0], -major[1]] }))
}

/// Signed angle from `a` to `b` in `(-pi, pi]`.
fn angle_step(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1])
}

/// Total change of `arg V` along `path(s)`, `s in [0, 1]`, sampling
/// adaptively until consecutive increments are below `pi / 2`.
fn track_argument<F, P>(field: &F, path: P) -> Result<(f64, usize), LineFieldError>
where
    F: ScalarField + ?Sized,
    P: Fn(f64) -> [f64; 2],
{
    let eval = |s: f64| -> Result<[f64; 2], LineFieldError> {
        let p = path(s);
        let h = field.jet3(p)?.hess;
        let v = h.double_angle();
        if v[0].hypot(v[1]) <= DEGENERATE_REL * h.norm() || (v[0] == 0.0 && v[1] == 0.0) {
            return Err(LineFieldError::DegenerateOnPath(p[0], p[1]));
        }
        Ok(v)
    };
    let mut samples = INITIAL_SAMPLES + 1;
    let mut stack: Vec<(f64, [f64; 2])> = Vec::with_capacity(INITIAL_SAMPLES + 1);
    for k in (0..=INITIAL_SAMPLES).rev() {
        let s = k as f64 / INITIAL_SAMPLES as f64;
        stack.push((s, eval(s)?));
    }
    // Walk left to right; `stack` holds pending right endpoints.
    let (mut s0, mut v0) = stack.pop().expect("initial samples");
    let mut total = 0.0;
    while let Some(&(s1, v1)) = stack.last() {
        let d = angle_step(v0, v1);
        if d.abs() < PI / 2.0 {
            total += d;
            (s0, v0) = (s1, v1);
            stack.pop();
            continue;
        }
        if samples >= MAX_SAMPLES {
            return Err(LineFieldError::NonConvergent(samples));
        }
        let mid = 0.5 * (s0 + s1);
        stack.push((mid, eval(mid)?));
        samples += 1;
    }
    Ok((total, samples))
}

fn snap(x: f64) -> Result<i64, LineFieldError> {
    let r = x.round();
    if (x - r).abs() > SNAP_TOL {
        return Err(LineFieldError::NonIntegerWinding(x));
    }
    Ok(r as i64)
}

fn half_or_quarter(m: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(m), BigInt::from(den))
}

/// One winding evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct WindingSample {
    pub radius: f64,
    /// Unsnapped `Delta arg V / (2 pi)` (interior) or `/ pi` (boundary).
    pub raw: f64,
    pub samples: usize,
}

/// Line-field index of `field` around a circle.
pub fn winding_index<F: ScalarField + ?Sized>(
    field: &F,
    center: [f64; 2],
    radius: f64,
) -> Result<(Rational, WindingSample), LineFieldError> {
    let path = |s: f64| {
        let a = 2.0 * PI * s;
        [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
    };
    let (total, samples) = track_argument(field, path)?;
    let raw = total / (2.0 * PI);
    let w = snap(raw)?;
    Ok((half_or_quarter(w, 2), WindingSample { radius, raw, samples }))
}

/// Boundary half-index: `Delta arg V` along the inward semicircle over `4 pi`.
pub fn boundary_index<F: ScalarField + ?Sized>(
    field: &F,
    point: [f64; 2],
    inward_normal: [f64; 2],
    radius: f64,
) -> Result<(Rational, WindingSample), LineFieldError> {
    let nn = inward_normal[0].hypot(inward_normal[1]);
    let n = [inward_normal[0] / nn, inward_normal[1] / nn];
    let t = [n[1], -n[0]];
    let path = |s: f64| {
        let a = PI * s;
        let (sa, ca) = a.sin_cos();
        [point[0] + radius * (ca * t[0] + sa * n[0]), point[1] + radius * (ca * t[1] + sa * n[1])]
    };
    let (total, samples) = track_argument(field, path)?;
    let raw = total / PI;
    let m = snap(raw)?;
    Ok((half_or_quarter(m, 4), WindingSample { radius, raw, samples }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub point: [f64; 2],
    pub kind: IndexKind,
    #[serde(with = "crate::algebra::rational::serde_str")]
    pub index: Rational,
    pub windings: Vec<WindingSample>,
    /// Inward normal used for boundary indices.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inward_normal: Option<[f64; 2]>,
}

/// Index at `point` evaluated at `radius`, `radius/2`, `radius/4`; all three
/// must agree.
pub fn index_report<F: ScalarField + ?Sized>(
    field: &F,
    point: [f64; 2],
    boundary: Option<[f64; 2]>,
    radius: f64,
) -> Result<IndexReport, LineFieldError> {
    let mut indices = Vec::with_capacity(3);
    let mut windings = Vec::with_capacity(3);
    for r in [radius, radius / 2.0, radius / 4.0] {
        let (idx, w) = match boundary {
            None => winding_index(field, point, r)?,
            Some(n) => boundary_index(field, point, n, r)?,
        };
        indices.push(idx);
        windings.push(w);
    }
    if indices.iter().any(|i| *i != indices[0]) {
        return Err(LineFieldError::RadiusUnstable(indices.iter().map(|i| i.to_string()).collect()));
    }
    Ok(IndexReport {
        point,
        kind: if boundary.is_some() { IndexKind::Boundary } else { IndexKind::Interior },
        index: indices.swap_remove(0),
        windings,
        inward_normal: boundary,
    })
}

/// Which eigenline to track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Major,
    Minor,
}

/// Eigenvector of the requested eigenvalue, from the characteristic
/// polynomial rather than the double-angle vector.
fn eigenvector(h: &HessianSample, which: Line) -> Option<[f64; 2]> {
    let (a, b, c) = (h.uxx, h.uxy, h.uyy);
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    if rad <= DEGENERATE_REL * h.norm() {
        return None;
    }
    let lam = match which {
        Line::Major => mean + rad,
        Line::Minor => mean - rad,
    };
    let v1 = [b, lam - a];
    let v2 = [lam - c, b];
    let v = if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) { v1 } else { v2 };
    let m = v[0].hypot(v[1]);
    Some([v[0] / m, v[1] / m])
}

/// Index of one eigenline field by tracking its angle modulo `pi` around a
/// circle; an independent check of [`winding_index`].
pub fn line_index_by_tracking<F: ScalarField + ?Sized>(
    field: &F,
    center: [f64; 2],
    radius: f64,
    which: Line,
) -> Result<Rational, LineFieldError> {
    // Total turning with `n` steps, or `None` if some step is too coarse.
    let track = |n: usize| -> Result<Option<f64>, LineFieldError> {
        let mut total = 0.0;
        let mut prev: Option<f64> = None;
        for k in 0..=n {
            let a = 2.0 * PI * k as f64 / n as f64;
            let p = [center[0] + radius * a.cos(), center[1] + radius * a.sin()];
            let h = field.jet3(p)?.hess;
            let v = eigenvector(&h, which).ok_or(LineFieldError::DegenerateOnPath(p[0], p[1]))?;
            let ang = v[1].atan2(v[0]);
            if let Some(q) = prev {
                // lines: fold the step into (-pi/2, pi/2]
                let mut d = (ang - q).rem_euclid(PI);
                if d > PI / 2.0 {
                    d -= PI;
                }
                if d.abs() > PI / 4.0 {
                    return Ok(None);
                }
                total += d;
            }
            prev = Some(ang);
        }
        Ok(Some(total))
    };
    let mut n = 256;
    while n <= MAX_SAMPLES {
        if let Some(total) = track(n)? {
            return Ok(half_or_quarter(snap(total / PI)?, 2));
        }
        n *= 2;
    }
    Err(LineFieldError::NonConvergent(MAX_SAMPLES))
}

/// Alignment of the eigenlines with a boundary frame.
#[derive(Debug, Clone, Serialize)]
pub struct TangencyReport {
    /// `max |T^T D^2u N| / |D^2u|` over non-degenerate samples.
    pub max_residual: f64,
    pub samples: usize,
    pub degenerate_samples: usize,
    /// Samples where the tangent line is the eigenline of the larger eigenvalue.
    pub major_tangent: usize,
    pub minor_tangent: usize,
    pub failed_evaluations: usize,
}

impl TangencyReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.failed_evaluations == 0 && self.max_residual <= tol
    }
}

pub fn tangency_check<F: ScalarField + ?Sized>(field: &F, boundary: &[BoundarySample]) -> TangencyReport {
    let mut rep = TangencyReport {
        max_residual: 0.0,
        samples: boundary.len(),
        degenerate_samples: 0,
        major_tangent: 0,
        minor_tangent: 0,
        failed_evaluations: 0,
    };
    for b in boundary {
        let Ok(j) = field.jet3(b.point) else {
            rep.failed_evaluations += 1;
            continue;
        };
        let h = j.hess;
        let norm = h.norm();
        let v = h.double_angle();
        if norm == 0.0 || v[0].hypot(v[1]) <= DEGENERATE_REL * norm {
            rep.degenerate_samples += 1;
            continue;
        }
        let r = h.form(b.tangent, b.inward_normal).abs() / norm;
        rep.max_residual = rep.max_residual.max(r);
        if h.form(b.tangent, b.tangent) >= h.form(b.inward_normal, b.inward_normal) {
            rep.major_tangent += 1;
        } else {
            rep.minor_tangent += 1;
        }
    }
    rep
}

/// Convenience: tangency over `n` boundary samples of a domain.
pub fn tangency_on_domain<F: ScalarField + ?Sized>(field: &F, domain: &Domain, n: usize) -> TangencyReport {
    tangency_check(field, &domain.boundary_samples(n))
}
