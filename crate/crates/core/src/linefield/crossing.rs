//! Isolation of harmonic-type degenerate points and the behaviour of the
//! eigenlines across curves of degenerate points.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::algebra::{BiPoly, Rational};
use crate::fields::ScalarField;
use crate::operators::discriminant;

use super::LineFieldError;

#[derive(Debug, Clone, Serialize)]
pub struct IsolationCertificate {
    /// Degree of the lowest homogeneous part of the discriminant at the point.
    pub degree: Option<u32>,
    /// Minimum of that part over the sampled unit circle.
    pub min_value: f64,
    pub angles: usize,
    pub certified: bool,
}

/// The degenerate point `(cx, cy)` is isolated if the lowest homogeneous part
/// of the discriminant there is strictly positive on the unit circle
/// (checked at 64 angles, with values below `1e-9` times the largest
/// coefficient treated as zero).
pub fn c1_isolation_certificate(u: &BiPoly, cx: &Rational, cy: &Rational) -> IsolationCertificate {
    let disc = discriminant(&u.translate(cx, cy));
    let angles = 64;
    let Some(d) = disc.min_degree() else {
        return IsolationCertificate { degree: None, min_value: 0.0, angles, certified: false };
    };
    let part = disc.homog_part(d);
    let floor = 1e-9 * part.max_abs_coeff();
    let low = part.to_f64_poly();
    let min_value = (0..angles)
        .map(|k| {
            let a = TAU * k as f64 / angles as f64;
            low.eval(a.cos(), a.sin())
        })
        .fold(f64::INFINITY, f64::min);
    IsolationCertificate { degree: Some(d), min_value, angles, certified: min_value > floor }
}

/// Outcome of crossing a curve of degenerate points.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    pub crossing: [f64; 2],
    /// `|V|` at the crossing, relative to the Hessian norm there.
    pub relative_v: f64,
    /// Smallest jump of the eigenline pair between the two sides, over the
    /// twelve smallest offsets at which both sides are non-umbilic.
    pub direction_jump: f64,
    pub offset: f64,
    /// Unit tangent of the degenerate curve, estimated from a second crossing.
    pub curve_tangent: Option<[f64; 2]>,
    /// `|sin|` of the angle between the curve tangent and the nearest eigenline.
    pub tangency_residual: f64,
    pub continuous: bool,
    pub tangent: bool,
}

impl CrossingReport {
    pub fn passes(&self) -> bool {
        self.continuous && self.tangent
    }
}

fn lerp(a: [f64; 2], b: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Below this `|V| / |D^2 u|` the Hessian is treated as umbilic.
const FLAT_REL: f64 = 1e-9;

/// Where the segment meets the degenerate set. `|V|` is very flat across a
/// degenerate curve (it vanishes to the order of the contact), so the
/// crossing is taken as the midpoint of the window where `|V|` is below
/// `FLAT_REL`; if the window is empty a golden-section minimiser is used.
fn crossing_on_segment<F: ScalarField + ?Sized>(
    field: &F,
    a: [f64; 2],
    b: [f64; 2],
    samples: usize,
) -> Result<f64, LineFieldError> {
    let g = |s: f64| -> Result<f64, LineFieldError> {
        let h = field.jet3(lerp(a, b, s))?.hess;
        let v = h.double_angle();
        Ok(v[0].hypot(v[1]) / h.norm().max(f64::MIN_POSITIVE))
    };
    let n = samples.max(8);
    let vals = (0..=n).map(|k| g(k as f64 / n as f64)).collect::<Result<Vec<_>, _>>()?;
    let (k, &best) = vals.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).expect("nonempty scan");
    let h = 1.0 / n as f64;
    if best <= FLAT_REL {
        let mut left = k;
        while left > 0 && vals[left - 1] <= FLAT_REL {
            left -= 1;
        }
        let mut right = k;
        while right < n && vals[right + 1] <= FLAT_REL {
            right += 1;
        }
        let edge = |mut inside: f64, mut outside: f64| -> Result<f64, LineFieldError> {
            for _ in 0..60 {
                let mid = 0.5 * (inside + outside);
                if g(mid)? <= FLAT_REL {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            Ok(inside)
        };
        let lo = if left == 0 { 0.0 } else { edge(left as f64 * h, (left - 1) as f64 * h)? };
        let hi = if right == n { 1.0 } else { edge(right as f64 * h, (right + 1) as f64 * h)? };
        return Ok(0.5 * (lo + hi));
    }
    let (mut lo, mut hi) = ((k as f64 - 1.0).max(0.0) * h, (k as f64 + 1.0).min(n as f64) * h);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    for _ in 0..200 {
        if hi - lo <= 1e-15 {
            break;
        }
        if gc < gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - r * (hi - lo);
            gc = g(c)?;
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + r * (hi - lo);
            gd = g(d)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Angle in `[0, pi)` of the eigenline of the larger eigenvalue.
fn major_angle<F: ScalarField + ?Sized>(field: &F, p: [f64; 2]) -> Result<f64, LineFieldError> {
    let h = field.jet3(p)?.hess;
    Ok(super::eigen_directions(&h)?.0.angle())
}

fn line_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Walks from `start` to `end`, finds where the path meets the degenerate
/// set, and checks that the eigenlines on the two sides agree (continuity
/// tolerance 1e-6) and that one of them is tangent to the degenerate curve
/// (tolerance 1e-4).
pub fn c2_crossing_check<F: ScalarField + ?Sized>(
    field: &F,
    start: [f64; 2],
    end: [f64; 2],
    samples: usize,
) -> Result<CrossingReport, LineFieldError> {
    let len = (end[0] - start[0]).hypot(end[1] - start[1]);
    if len == 0.0 {
        return Err(LineFieldError::Degenerate);
    }
    let dir = [(end[0] - start[0]) / len, (end[1] - start[1]) / len];
    let s = crossing_on_segment(field, start, end, samples)?;
    let crossing = lerp(start, end, s);
    let h = field.jet3(crossing)?.hess;
    let v = h.double_angle();
    let relative_v = v[0].hypot(v[1]) / h.norm().max(f64::MIN_POSITIVE);

    let mut direction_jump = f64::INFINITY;
    let mut offset = f64::NAN;
    let mut side_angle = None;
    // Start just off the curve and move outward until the Hessian is no
    // longer umbilic on both sides (higher-order contact widens that zone).
    let mut tried = 0;
    for k in 0..40 {
        if tried == 12 {
            break;
        }
        let e = 1e-7 * 2f64.powi(k) * len;
        let before = major_angle(field, [crossing[0] - e * dir[0], crossing[1] - e * dir[1]]);
        let after = major_angle(field, [crossing[0] + e * dir[0], crossing[1] + e * dir[1]]);
        if let (Ok(a), Ok(b)) = (before, after) {
            tried += 1;
            // Compare the unordered pair of lines: the eigenvalue order may
            // swap across the curve while the lines themselves continue.
            let jump = line_gap(a, b).min(line_gap(a, b + PI / 2.0));
            if jump < direction_jump {
                direction_jump = jump;
                offset = e;
                side_angle = Some(b);
            }
        }
    }

    // Second crossing on a parallel path shifted sideways.
    let normal = [-dir[1], dir[0]];
    let shift = 1e-3 * len;
    let mut curve_tangent = None;
    let mut tangency_residual = f64::INFINITY;
    let a2 = [start[0] + shift * normal[0], start[1] + shift * normal[1]];
    let b2 = [end[0] + shift * normal[0], end[1] + shift * normal[1]];
    if let Ok(s2) = crossing_on_segment(field, a2, b2, samples) {
        let c2 = lerp(a2, b2, s2);
        let (tx, ty) = (c2[0] - crossing[0], c2[1] - crossing[1]);
        let m = tx.hypot(ty);
        if m > 0.0 {
            let t = [tx / m, ty / m];
            curve_tangent = Some(t);
            if let Some(phi) = side_angle {
                let theta = t[1].atan2(t[0]);
                // The two eigenlines are phi and phi + pi/2.
                let gap = line_gap(theta, phi).min(line_gap(theta, phi + PI / 2.0));
                tangency_residual = gap.sin();
            }
        }
    }
    Ok(CrossingReport {
        crossing,
        relative_v,
        direction_jump,
        offset,
        curve_tangent,
        tangency_residual,
        continuous: direction_jump <= 1e-6,
        tangent: tangency_residual <= 1e-4,
    })
}
