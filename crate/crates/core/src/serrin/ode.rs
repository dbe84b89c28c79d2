//! Radial profiles `u = x + v(rho)` (after normalisation) reaching the
//! boundary ODE `1 + v'^2 - 2 (c0 + v) v' / rho = c^2`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::rational::to_f64;
use crate::algebra::{int, Rational};
use crate::fields::{RadialLinearField, RadialProfile, ScalarField};

use super::{fmt_rat, SerrinError};

#[derive(Debug, Clone, PartialEq)]
pub enum OdeFamily {
    /// `v = -c0 + t rho`.
    Linear { t: Rational },
    /// `v = t1 rho^2 + t2`.
    Quadratic { t1: Rational, t2: Rational },
}

impl OdeFamily {
    /// Univariate coefficients of `v` in `rho`.
    fn profile(&self, c0: &Rational) -> Vec<Rational> {
        match self {
            OdeFamily::Linear { t } => RadialProfile::Linear { t: t.clone() }.coefficients(c0),
            OdeFamily::Quadratic { t1, t2 } => {
                RadialProfile::Quadratic { t1: t1.clone(), t2: t2.clone() }.coefficients(c0)
            }
        }
    }

    /// The value of `c^2` the family forces.
    pub fn required_c2(&self, c0: &Rational) -> Rational {
        match self {
            OdeFamily::Linear { t } => int(1) - t * t,
            OdeFamily::Quadratic { t1, t2 } => int(1) - int(4) * t1 * (c0 + t2),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OdeFamily::Linear { .. } => "linear",
            OdeFamily::Quadratic { .. } => "quadratic",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeReport {
    pub family: &'static str,
    /// Exact `c^2` forced by the family, as "num/den".
    pub required_c2: String,
    pub c: f64,
    /// Max of `|1 + v'^2 - 2 (c0 + v) v' / rho - c^2|` over the samples.
    pub max_residual: f64,
    pub rho_range: [f64; 2],
    pub samples: usize,
    /// The factor of the product form that vanishes identically for the
    /// family: `c0 + v - rho v'` (linear) or `rho v'' - v'` (quadratic).
    pub vanishing_factor: &'static str,
    pub factor_vanishes_exactly: bool,
}

// Polynomial helpers on coefficient vectors in rho.
fn deriv(p: &[Rational]) -> Vec<Rational> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * int(k as i64)).collect()
}

fn shift_up(p: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    out.extend(p.iter().cloned());
    out
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).cloned().unwrap_or_else(Rational::zero) - b.get(k).cloned().unwrap_or_else(Rational::zero))
        .collect()
}

fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Residual of the boundary ODE for a family. When `c` is `None` the
/// family's own constant `sqrt(required c^2)` is used.
pub fn radial_ode_residual(
    family: &OdeFamily,
    c0: &Rational,
    c: Option<f64>,
    rho_range: [f64; 2],
    samples: usize,
) -> Result<OdeReport, SerrinError> {
    let c2 = family.required_c2(c0);
    if c2.is_negative() {
        return Err(SerrinError::InvalidConstant(fmt_rat(&c2)));
    }
    let c = c.unwrap_or_else(|| to_f64(&c2).sqrt());
    let v = family.profile(c0);
    let dv = deriv(&v);
    let vf: Vec<f64> = v.iter().map(to_f64).collect();
    let dvf: Vec<f64> = dv.iter().map(to_f64).collect();
    let c0f = to_f64(c0);
    let samples = samples.max(2);
    let mut max_residual: f64 = 0.0;
    for k in 0..samples {
        let rho = rho_range[0] + (rho_range[1] - rho_range[0]) * k as f64 / (samples - 1) as f64;
        let (val, d) = (eval(&vf, rho), eval(&dvf, rho));
        let r = 1.0 + d * d - 2.0 * (c0f + val) * d / rho - c * c;
        max_residual = max_residual.max(r.abs());
    }
    let (name, factor) = match family {
        OdeFamily::Linear { .. } => {
            // c0 + v - rho v'
            let mut f = sub(&v, &shift_up(&dv));
            f[0] += c0;
            ("c0 + v - rho v'", f)
        }
        OdeFamily::Quadratic { .. } => ("rho v'' - v'", sub(&shift_up(&deriv(&dv)), &dv)),
    };
    Ok(OdeReport {
        family: family.name(),
        required_c2: fmt_rat(&c2),
        c,
        max_residual,
        rho_range,
        samples,
        vanishing_factor: name,
        factor_vanishes_exactly: factor.iter().all(Zero::is_zero),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NodalReport {
    /// `t / |(a, b)|`: the field is `|(a, b)| (x' + t' rho)` in rotated coordinates.
    pub normalized_t: f64,
    /// Unit directions of the rays making up the zero set (from the origin).
    pub rays: Vec<[f64; 2]>,
    /// The zero set is a full line (`t' = 0`).
    pub full_line: bool,
    /// The zero set reduces to the origin.
    pub origin_only: bool,
    /// Max `|u|` at sample points along the rays (relative to distance).
    pub max_residual_on_rays: f64,
    /// A zero set made of rays through one point never bounds a smooth
    /// Jordan domain.
    pub bounds_jordan_domain: bool,
}

/// Zero set of `u = a x + b y + t rho` (the linear family with its constant
/// absorbed): rays from the origin on the lines `x'^2 = t'^2 rho^2`.
pub fn nodal_line_check(field: &RadialLinearField) -> Option<NodalReport> {
    let RadialProfile::Linear { t } = &field.profile else { return None };
    let (a, b) = (to_f64(&field.a), to_f64(&field.b));
    let g = a.hypot(b);
    if g == 0.0 {
        return None;
    }
    let tn = to_f64(t) / g;
    // Rotated frame: e1 along (a, b), e2 perpendicular.
    let (e1, e2) = ([a / g, b / g], [-b / g, a / g]);
    let to_world = |p: [f64; 2]| [p[0] * e1[0] + p[1] * e2[0], p[0] * e1[1] + p[1] * e2[1]];
    let mut full_line = false;
    let mut origin_only = false;
    let rays = if tn.abs() > 1.0 {
        origin_only = true;
        vec![]
    } else if t.is_zero() {
        full_line = true;
        vec![to_world([0.0, 1.0]), to_world([0.0, -1.0])]
    } else {
        let s = (1.0 - tn * tn).max(0.0).sqrt();
        if s == 0.0 {
            vec![to_world([-tn, 0.0])]
        } else {
            vec![to_world([-tn, s]), to_world([-tn, -s])]
        }
    };
    let mut max_residual_on_rays: f64 = 0.0;
    for r in &rays {
        for d in [0.25, 1.0, 4.0] {
            if let Ok(v) = field.value([d * r[0], d * r[1]]) {
                max_residual_on_rays = max_residual_on_rays.max(v.abs() / d);
            }
        }
    }
    Some(NodalReport {
        normalized_t: tn,
        rays,
        full_line,
        origin_only,
        max_residual_on_rays,
        bounds_jordan_domain: false,
    })
}
