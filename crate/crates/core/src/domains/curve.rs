//! Closed curves given by finite Fourier series, reparametrized by arc length.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::algebra::rational::NumOrStr;

use super::DomainError;

// 8-point Gauss–Legendre rule on [-1, 1].
const GL_X: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_W: [f64; 4] =
    [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

fn gauss8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for k in 0..4 {
        s += GL_W[k] * (f(m + h * GL_X[k]) + f(m - h * GL_X[k]));
    }
    s * h
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gauss8(f, a, m), gauss8(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= tol {
        return l + r;
    }
    adaptive(f, a, m, l, 0.5 * tol, depth - 1) + adaptive(f, m, b, r, 0.5 * tol, depth - 1)
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    adaptive(f, a, b, gauss8(f, a, b), tol, 40)
}

/// Coefficients are indexed by harmonic: `x(tau) = sum_k x_cos[k] cos(k tau) + x_sin[k] sin(k tau)`.
#[derive(Debug, Clone, Serialize)]
pub struct FourierCurve {
    pub x_cos: Vec<f64>,
    pub x_sin: Vec<f64>,
    pub y_cos: Vec<f64>,
    pub y_sin: Vec<f64>,
    #[serde(skip)]
    tau_table: Vec<f64>,
    #[serde(skip)]
    s_table: Vec<f64>,
    length: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CurveSpec {
    #[serde(default)]
    pub x_cos: Vec<NumOrStr>,
    #[serde(default)]
    pub x_sin: Vec<NumOrStr>,
    #[serde(default)]
    pub y_cos: Vec<NumOrStr>,
    #[serde(default)]
    pub y_sin: Vec<NumOrStr>,
}

/// Point, first, second, third derivative in `tau`.
#[derive(Debug, Clone, Copy)]
pub struct CurveDerivs {
    pub p: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
    pub d3: [f64; 2],
}

/// Geometry at an arc-length position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameAt {
    pub point: [f64; 2],
    pub tangent: [f64; 2],
    /// `(-y', x')`, normalized: the left normal.
    pub normal: [f64; 2],
    pub curvature: f64,
    /// `d kappa / ds`.
    pub curvature_rate: f64,
}

const TABLE_PANELS: usize = 512;

impl FourierCurve {
    pub fn new(x_cos: Vec<f64>, x_sin: Vec<f64>, y_cos: Vec<f64>, y_sin: Vec<f64>) -> Result<Self, DomainError> {
        let all = x_cos.iter().chain(&x_sin).chain(&y_cos).chain(&y_sin);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(DomainError::InvalidCurve("non-finite coefficient".into()));
        }
        let mut c = Self { x_cos, x_sin, y_cos, y_sin, tau_table: vec![], s_table: vec![], length: 0.0 };
        let scale = c.coefficient_scale();
        if scale == 0.0 {
            return Err(DomainError::InvalidCurve("all coefficients are zero".into()));
        }
        for k in 0..4 * TABLE_PANELS {
            let tau = TAU * k as f64 / (4 * TABLE_PANELS) as f64;
            if c.speed(tau) <= 1e-9 * scale {
                return Err(DomainError::InvalidCurve(format!("curve is not regular near tau = {tau}")));
            }
        }
        let speed = |t: f64| c.speed(t);
        let mut tau_table = Vec::with_capacity(TABLE_PANELS + 1);
        let mut s_table = Vec::with_capacity(TABLE_PANELS + 1);
        let mut s = 0.0;
        tau_table.push(0.0);
        s_table.push(0.0);
        for k in 0..TABLE_PANELS {
            let a = TAU * k as f64 / TABLE_PANELS as f64;
            let b = TAU * (k + 1) as f64 / TABLE_PANELS as f64;
            s += integrate(&speed, a, b, 1e-12 * scale / TABLE_PANELS as f64);
            tau_table.push(b);
            s_table.push(s);
        }
        c.length = s;
        c.tau_table = tau_table;
        c.s_table = s_table;
        Ok(c)
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Self, DomainError> {
        let conv = |v: &[NumOrStr]| {
            v.iter()
                .map(|c| c.to_f64().map_err(|e| DomainError::InvalidCurve(e.to_string())))
                .collect::<Result<Vec<_>, _>>()
        };
        Self::new(conv(&spec.x_cos)?, conv(&spec.x_sin)?, conv(&spec.y_cos)?, conv(&spec.y_sin)?)
    }

    pub fn from_json(s: &str) -> Result<Self, DomainError> {
        let spec: CurveSpec = serde_json::from_str(s).map_err(|e| DomainError::InvalidCurve(e.to_string()))?;
        Self::from_spec(&spec)
    }

    /// Counterclockwise circle.
    pub fn circle(center: [f64; 2], radius: f64) -> Result<Self, DomainError> {
        Self::new(vec![center[0], radius], vec![], vec![center[1]], vec![0.0, radius])
    }

    /// Counterclockwise ellipse with semi-axes `a` (along x) and `b` (along y).
    pub fn ellipse(a: f64, b: f64) -> Result<Self, DomainError> {
        Self::new(vec![0.0, a], vec![], vec![], vec![0.0, b])
    }

    /// Same curve traversed the other way (`tau -> -tau`).
    pub fn reversed(&self) -> Result<Self, DomainError> {
        let neg = |v: &[f64]| v.iter().map(|c| -c).collect();
        Self::new(self.x_cos.clone(), neg(&self.x_sin), self.y_cos.clone(), neg(&self.y_sin))
    }

    /// Curve scaled about the origin by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self, DomainError> {
        let sc = |v: &[f64]| v.iter().map(|c| c * k).collect();
        Self::new(sc(&self.x_cos), sc(&self.x_sin), sc(&self.y_cos), sc(&self.y_sin))
    }

    fn coefficient_scale(&self) -> f64 {
        self.x_cos.iter().chain(&self.x_sin).chain(&self.y_cos).chain(&self.y_sin).fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn derivs(&self, tau: f64) -> CurveDerivs {
        let mut out = CurveDerivs { p: [0.0; 2], d1: [0.0; 2], d2: [0.0; 2], d3: [0.0; 2] };
        let mut acc = |axis: usize, coeffs: &[f64], is_sin: bool| {
            for (k, &c) in coeffs.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let kf = k as f64;
                let (s, co) = (kf * tau).sin_cos();
                // derivatives of cos: cos, -k sin, -k^2 cos, k^3 sin
                // derivatives of sin: sin, k cos, -k^2 sin, -k^3 cos
                let (v0, v1, v2, v3) = if is_sin {
                    (s, kf * co, -kf * kf * s, -kf * kf * kf * co)
                } else {
                    (co, -kf * s, -kf * kf * co, kf * kf * kf * s)
                };
                out.p[axis] += c * v0;
                out.d1[axis] += c * v1;
                out.d2[axis] += c * v2;
                out.d3[axis] += c * v3;
            }
        };
        acc(0, &self.x_cos, false);
        acc(0, &self.x_sin, true);
        acc(1, &self.y_cos, false);
        acc(1, &self.y_sin, true);
        out
    }

    pub fn speed(&self, tau: f64) -> f64 {
        let d = self.derivs(tau).d1;
        d[0].hypot(d[1])
    }

    /// Arc length from `tau = 0` to `tau` (reduced mod `2 pi`).
    pub fn arc_length_at(&self, tau: f64) -> f64 {
        let tau = tau.rem_euclid(TAU);
        let k = ((tau / TAU * TABLE_PANELS as f64) as usize).min(TABLE_PANELS - 1);
        let a = self.tau_table[k];
        let speed = |t: f64| self.speed(t);
        self.s_table[k] + if tau > a { gauss8(&speed, a, tau) } else { 0.0 }
    }

    /// Parameter `tau` with arc length `s` (reduced mod the length).
    pub fn tau_at(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        let k = match self.s_table.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.tau_table[i.min(TABLE_PANELS)] % TAU,
            Err(i) => i.saturating_sub(1).min(TABLE_PANELS - 1),
        };
        let (s0, s1) = (self.s_table[k], self.s_table[k + 1]);
        let (t0, t1) = (self.tau_table[k], self.tau_table[k + 1]);
        let mut tau = t0 + (t1 - t0) * (s - s0) / (s1 - s0);
        let speed = |t: f64| self.speed(t);
        for _ in 0..20 {
            let f = s0 + gauss8(&speed, t0, tau) - s;
            let step = f / self.speed(tau);
            tau = (tau - step).clamp(t0, t1);
            if step.abs() <= 1e-15 * TAU {
                break;
            }
        }
        tau
    }

    /// Frame at parameter `tau`.
    pub fn frame_tau(&self, tau: f64) -> FrameAt {
        let d = self.derivs(tau);
        let sp2 = d.d1[0] * d.d1[0] + d.d1[1] * d.d1[1];
        let sp = sp2.sqrt();
        let tangent = [d.d1[0] / sp, d.d1[1] / sp];
        let cross = d.d1[0] * d.d2[1] - d.d1[1] * d.d2[0];
        let cross_rate = d.d1[0] * d.d3[1] - d.d1[1] * d.d3[0];
        let sp2_rate = 2.0 * (d.d1[0] * d.d2[0] + d.d1[1] * d.d2[1]);
        let kappa = cross / (sp2 * sp);
        let kappa_tau = cross_rate / (sp2 * sp) - 1.5 * cross * sp2_rate / (sp2 * sp2 * sp);
        FrameAt {
            point: d.p,
            tangent,
            normal: [-tangent[1], tangent[0]],
            curvature: kappa,
            curvature_rate: kappa_tau / sp,
        }
    }

    /// Frame at arc length `s`.
    pub fn frame(&self, s: f64) -> FrameAt {
        self.frame_tau(self.tau_at(s))
    }

    pub fn curvature(&self, s: f64) -> f64 {
        self.frame(s).curvature
    }

    /// Signed enclosed area (positive for counterclockwise curves).
    pub fn signed_area(&self) -> f64 {
        let f = |t: f64| {
            let d = self.derivs(t);
            0.5 * (d.p[0] * d.d1[1] - d.p[1] * d.d1[0])
        };
        integrate(&f, 0.0, TAU, 1e-13 * self.coefficient_scale().powi(2))
    }

    /// `n` points equally spaced in `tau`.
    pub fn polygon(&self, n: usize) -> Vec<[f64; 2]> {
        (0..n).map(|k| self.derivs(TAU * k as f64 / n as f64).p).collect()
    }

    /// Maximum `|kappa|` over `n` parameter samples.
    pub fn max_abs_curvature(&self, n: usize) -> f64 {
        (0..n).map(|k| self.frame_tau(TAU * k as f64 / n as f64).curvature.abs()).fold(0.0, f64::max)
    }
}

/// Even-odd point-in-polygon test.
pub fn polygon_contains(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_length_and_curvature() {
        let c = FourierCurve::circle([1.0, -2.0], 3.0).unwrap();
        assert!((c.length() - 6.0 * PI).abs() < 1e-12);
        for k in 0..10 {
            assert!((c.curvature(k as f64) - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(c.reversed().unwrap().curvature(0.3) + 1.0 / 3.0 < 1e-12);
    }

    #[test]
    fn arc_length_round_trip() {
        let c = FourierCurve::ellipse(4.0, 8.0).unwrap();
        for k in 0..50 {
            let tau = 0.12 * k as f64 + 0.01;
            let s = c.arc_length_at(tau);
            assert!((c.tau_at(s) - tau).abs() < 1e-12, "tau {tau}");
        }
    }

    #[test]
    fn ellipse_curvature_extremes() {
        // semi-axes 4 (x) and 8 (y): kappa(t) = ab / (a^2 sin^2 t + b^2 cos^2 t)^(3/2)
        let c = FourierCurve::ellipse(4.0, 8.0).unwrap();
        let analytic = |t: f64| 32.0 / (16.0 * t.sin().powi(2) + 64.0 * t.cos().powi(2)).powf(1.5);
        for k in 0..64 {
            let t = TAU * k as f64 / 64.0;
            assert!((c.frame_tau(t).curvature - analytic(t)).abs() < 1e-13);
        }
        let top = c.frame_tau(PI / 2.0);
        assert!((top.curvature - 0.5).abs() < 1e-14);
        assert!((top.point[1] - 8.0).abs() < 1e-14);
        assert!((c.frame_tau(0.0).curvature - 1.0 / 16.0).abs() < 1e-14);
        assert!((c.max_abs_curvature(1024) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn curvature_rate_matches_difference() {
        let c =
            FourierCurve::new(vec![0.0, 3.0, 0.2], vec![0.0, 0.0, 0.1], vec![0.0, 0.0, -0.15], vec![0.0, 2.0]).unwrap();
        let h = 1e-5;
        for k in 0..20 {
            let s = c.length() * k as f64 / 20.0;
            let fd = (c.curvature(s + h) - c.curvature(s - h)) / (2.0 * h);
            assert!((fd - c.frame(s).curvature_rate).abs() < 1e-6);
        }
    }

    #[test]
    fn json_and_area() {
        let c = FourierCurve::from_json(r#"{"x_cos":[0,1],"y_sin":[0,"1/1"]}"#).unwrap();
        assert!((c.signed_area() - PI).abs() < 1e-12);
        assert!(FourierCurve::from_json(r#"{"x_cos":[1]}"#).is_err());
        let poly = c.polygon(256);
        assert!(polygon_contains(&poly, [0.2, 0.3]));
        assert!(!polygon_contains(&poly, [1.2, 0.0]));
    }
}
