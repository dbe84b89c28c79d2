//! Exact classification of points where `D^2 u` is a multiple of the
//! identity, following the proportionality
//! `(Lap w)^2 = mu^2 ((Lap w)^2 - 4 H(w))` for the first homogeneous part `w`
//! of degree >= 3 beyond the quadratic.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::rational::{exact_sqrt, format_rational, is_integer, to_f64};
use crate::algebra::{int, rat, to_polar, BiPoly, Rational};
use crate::operators::{discriminant, hess_det, laplacian};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("point ({0}, {1}) is not in U: the Hessian there is not a multiple of the identity")]
    NotInU(String, String),
}

/// `u = c0 + a x + b y + lambda/2 (x^2 + y^2) + w + remainder` about a point.
#[derive(Debug, Clone, PartialEq)]
pub struct JetDecomposition {
    pub c0: Rational,
    pub a: Rational,
    pub b: Rational,
    pub lambda: Rational,
    /// First nonzero homogeneous part of degree >= 3.
    pub w: Option<BiPoly>,
    /// Terms of degree above `deg w`.
    pub remainder: BiPoly,
}

impl JetDecomposition {
    /// `w + remainder`: `u` minus its quadratic part.
    pub fn higher(&self) -> BiPoly {
        match &self.w {
            Some(w) => w + &self.remainder,
            None => self.remainder.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum UPointClass {
    #[serde(rename = "quadratic")]
    Quadratic,
    /// `w = a Re((e^{-i phase} zeta)^{n+2})`: harmonic.
    C1 { n: u32, a: f64, phase: f64 },
    /// `w = a (cos(axis) x + sin(axis) y)^{n+2}`.
    C2 { n: u32, a: f64, axis_angle: f64 },
    /// `w = a |zeta|^{2k+2}`.
    C3 {
        k: u32,
        a: f64,
        #[serde(with = "crate::algebra::rational::serde_str")]
        mu: Rational,
    },
    #[serde(rename = "violation")]
    LemmaViolation { reason: String },
}

impl UPointClass {
    pub fn tag(&self) -> &'static str {
        match self {
            UPointClass::Quadratic => "quadratic",
            UPointClass::C1 { .. } => "C1",
            UPointClass::C2 { .. } => "C2",
            UPointClass::C3 { .. } => "C3",
            UPointClass::LemmaViolation { .. } => "violation",
        }
    }
}

/// Outcome of [`classify_point`] with the exact `mu^2` when defined.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub point: (Rational, Rational),
    pub class: UPointClass,
    pub mu2: Option<Rational>,
    pub decomposition: JetDecomposition,
}

impl PointReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "point": [to_f64(&self.point.0), to_f64(&self.point.1)],
            "in_U": true,
            "class": self.class.tag(),
        });
        let params = match &self.class {
            UPointClass::C1 { n, a, phase } => {
                v["n"] = json!(n);
                json!({"a": a, "phase": phase})
            }
            UPointClass::C2 { n, a, axis_angle } => {
                v["n"] = json!(n);
                json!({"a": a, "axis_angle": axis_angle})
            }
            UPointClass::C3 { k, a, mu } => {
                v["k"] = json!(k);
                json!({"a": a, "mu": format_rational(mu)})
            }
            UPointClass::LemmaViolation { reason } => json!({"reason": reason}),
            UPointClass::Quadratic => json!({}),
        };
        if let Some(m) = &self.mu2 {
            v["mu2"] = json!(format_rational(m));
        }
        v["params"] = params;
        v["lambda"] = json!(format_rational(&self.decomposition.lambda));
        v
    }
}

/// `(Lap u)^2 == 4 H(u)` exactly at a rational point.
pub fn is_in_u(u: &BiPoly, x: &Rational, y: &Rational) -> bool {
    discriminant(u).eval(x, y).is_zero()
}

pub fn decompose(u: &BiPoly, cx: &Rational, cy: &Rational) -> Result<JetDecomposition, ClassifyError> {
    let v = u.translate(cx, cy);
    let (p20, p11, p02) = (v.coeff(2, 0), v.coeff(1, 1), v.coeff(0, 2));
    if !p11.is_zero() || p20 != p02 {
        return Err(ClassifyError::NotInU(format_rational(cx), format_rational(cy)));
    }
    let lambda = p20 * int(2);
    let higher = v.truncate_below(3);
    let w = higher.min_degree().map(|d| higher.homog_part(d));
    let remainder = match &w {
        Some(w) => &higher - w,
        None => BiPoly::zero(),
    };
    Ok(JetDecomposition { c0: v.coeff(0, 0), a: v.coeff(1, 0), b: v.coeff(0, 1), lambda, w, remainder })
}

/// Exact `r` with `(Lap w)^2 = r ((Lap w)^2 - 4 H(w))`, or `None` when the two
/// polynomials are not proportional.
pub fn mu_squared(w: &BiPoly) -> Option<Rational> {
    let lap = laplacian(w);
    let p = &lap * &lap;
    let q = discriminant(w);
    let (&e, qc) = q.terms().next()?;
    let r = p.coeff(e.0, e.1) / qc;
    (q.scale(&r) == p).then_some(r)
}

/// Points tried, in order, when a nonzero gradient is needed.
const PROBES: [(i64, i64); 8] = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (3, -2), (2, 5)];

pub fn classify_point(u: &BiPoly, cx: &Rational, cy: &Rational) -> Result<PointReport, ClassifyError> {
    let dec = decompose(u, cx, cy)?;
    let point = (cx.clone(), cy.clone());
    let Some(w) = dec.w.clone() else {
        return Ok(PointReport { point, class: UPointClass::Quadratic, mu2: None, decomposition: dec });
    };
    let d = w.degree().expect("w is nonzero");
    let n = d - 2;
    let mu2 = mu_squared(&w);
    let class = match &mu2 {
        None => UPointClass::LemmaViolation { reason: "(Lap w)^2 is not proportional to (Lap w)^2 - 4 H(w)".into() },
        Some(m) if m.is_zero() => classify_harmonic(&w, n),
        Some(m) if m.is_one() => classify_power(&w, n),
        Some(m) => classify_radial(&w, m),
    };
    Ok(PointReport { point, class, mu2, decomposition: dec })
}

fn classify_harmonic(w: &BiPoly, n: u32) -> UPointClass {
    if !laplacian(w).is_zero() {
        return violation("mu^2 = 0 but w is not harmonic");
    }
    let d = n + 2;
    let h = to_polar(w).expect("w is homogeneous");
    if h.angular.harmonics().any(|k| k as u32 != d) {
        return violation("harmonic w has harmonics other than its degree");
    }
    let (ca, sb) = (to_f64(&h.angular.cos_coeff(d as usize)), to_f64(&h.angular.sin_coeff(d as usize)));
    UPointClass::C1 { n, a: ca.hypot(sb), phase: sb.atan2(ca) / d as f64 }
}

fn classify_power(w: &BiPoly, n: u32) -> UPointClass {
    if !hess_det(w).is_zero() {
        return violation("mu^2 = 1 but H(w) does not vanish");
    }
    let d = n + 2;
    for (px, py) in PROBES {
        let (px, py) = (int(px), int(py));
        let g = (w.dx().eval(&px, &py), w.dy().eval(&px, &py));
        if g.0.is_zero() && g.1.is_zero() {
            continue;
        }
        // w = c l^d forces grad w ∝ (alpha, beta) at every point.
        let ell = BiPoly::x().scale(&g.0) + BiPoly::y().scale(&g.1);
        let lp = ell.eval(&px, &py);
        if lp.is_zero() {
            return violation("gradient direction is not a linear factor of w");
        }
        let c = w.eval(&px, &py) / lp.pow(d as i32);
        if ell.pow(d).scale(&c) != *w {
            return violation("w is not a power of a linear form");
        }
        let (gx, gy) = (to_f64(&g.0), to_f64(&g.1));
        let mut a = to_f64(&c) * gx.hypot(gy).powi(d as i32);
        let mut angle = gy.atan2(gx);
        if angle < 0.0 {
            angle += std::f64::consts::PI;
            if d % 2 == 1 {
                a = -a;
            }
        }
        if angle >= std::f64::consts::PI {
            angle -= std::f64::consts::PI;
            if d % 2 == 1 {
                a = -a;
            }
        }
        return UPointClass::C2 { n, a, axis_angle: angle };
    }
    violation("w has vanishing gradient at every probe point")
}

fn classify_radial(w: &BiPoly, m2: &Rational) -> UPointClass {
    let Some(mu) = exact_sqrt(m2) else {
        return violation(format!("mu^2 = {} is not a rational square", format_rational(m2)));
    };
    if mu <= Rational::one() {
        return violation(format!("mu = {} is not of the form 1 + 1/k", format_rational(&mu)));
    }
    let k = (&mu - Rational::one()).recip();
    if !is_integer(&k) || !k.is_positive() {
        return violation(format!("mu = {} is not of the form 1 + 1/k", format_rational(&mu)));
    }
    let k = to_f64(&k) as u32;
    let d = w.degree().expect("w is nonzero");
    if d != 2 * k + 2 {
        return violation(format!("degree {d} does not match 2k + 2 for k = {k}"));
    }
    let h = to_polar(w).expect("w is homogeneous");
    if !h.angular.is_constant() {
        return violation("mu = 1 + 1/k but w is not radial");
    }
    UPointClass::C3 { k, a: to_f64(h.angular.constant_term()), mu }
}

fn violation(reason: impl Into<String>) -> UPointClass {
    UPointClass::LemmaViolation { reason: reason.into() }
}

/// Every homogeneous part of `u` about `(cx, cy)` has constant angular part.
pub fn radial_about(u: &BiPoly, cx: &Rational, cy: &Rational) -> bool {
    let v = u.translate(cx, cy);
    let Some(top) = v.degree() else { return true };
    (0..=top).all(|d| {
        let part = v.homog_part(d);
        part.is_zero() || to_polar(&part).map(|h| h.angular.is_constant()).unwrap_or(false)
    })
}

/// Rational rotation `(c, s)` from a Pythagorean triple.
pub fn pythagorean_rotation(p: i64, q: i64, r: i64) -> (Rational, Rational) {
    assert_eq!(p * p + q * q, r * r, "not a Pythagorean triple");
    (rat(p, r), rat(q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::re_im_zeta_pow;
    use crate::operators::jacobian;

    fn half_rho2() -> BiPoly {
        BiPoly::rho2().scale(&rat(1, 2))
    }
    fn zero() -> Rational {
        int(0)
    }

    #[test]
    fn membership() {
        let q = BiPoly::rho2().scale(&rat(3, 2));
        assert!(is_in_u(&q, &rat(1, 3), &rat(-2, 7)));
        let u = &half_rho2() + &re_im_zeta_pow(3).0;
        assert!(is_in_u(&u, &zero(), &zero()));
        assert!(!is_in_u(&u, &rat(1, 10), &zero()));
        assert!(!is_in_u(&(BiPoly::x() * BiPoly::y()), &zero(), &zero()));
    }

    #[test]
    fn decompose_reads_terms() {
        let u = BiPoly::one() + BiPoly::x().scale(&int(2)) + BiPoly::rho2().scale(&rat(3, 2)) + BiPoly::x().pow(4);
        let d = decompose(&u, &zero(), &zero()).unwrap();
        assert_eq!((d.c0, d.a, d.b, d.lambda), (int(1), int(2), int(0), int(3)));
        assert_eq!(d.w, Some(BiPoly::x().pow(4)));
        assert!(d.remainder.is_zero());
        let saddle = BiPoly::x().pow(2) - BiPoly::y().pow(2);
        assert!(decompose(&saddle, &zero(), &zero()).is_err());
        let r = classify_point(&BiPoly::rho2(), &zero(), &zero()).unwrap();
        assert_eq!(r.class, UPointClass::Quadratic);
    }

    #[test]
    fn mu_squared_values() {
        for n in 1..=6 {
            assert_eq!(mu_squared(&re_im_zeta_pow(n + 2).0), Some(int(0)));
            assert_eq!(mu_squared(&BiPoly::x().pow(n + 2)), Some(int(1)));
        }
        assert_eq!(mu_squared(&BiPoly::rho2().pow(2)), Some(int(4)));
        // x^3 + y^4 style mixtures are not proportional once homogeneous parts mix
        let w = BiPoly::x().pow(3) + (BiPoly::x() * BiPoly::y().pow(2));
        assert_eq!(mu_squared(&w), None);
    }

    #[test]
    fn case_examples() {
        let o = zero();
        let c1 = classify_point(&(&half_rho2() + &re_im_zeta_pow(3).0), &o, &o).unwrap();
        assert!(matches!(c1.class, UPointClass::C1 { n: 1, .. }));
        let c2 = classify_point(&(&half_rho2() + &BiPoly::x().pow(4)), &o, &o).unwrap();
        match c2.class {
            UPointClass::C2 { n, a, axis_angle } => {
                assert_eq!(n, 2);
                assert!((a - 1.0).abs() < 1e-15 && axis_angle == 0.0);
            }
            other => panic!("{other:?}"),
        }
        let c3 = classify_point(&(&half_rho2() + &BiPoly::rho2().pow(2)), &o, &o).unwrap();
        assert_eq!(c3.class, UPointClass::C3 { k: 1, a: 1.0, mu: int(2) });
        assert_eq!(c3.mu2, Some(int(4)));
        let j = c3.to_json();
        assert_eq!(j["class"], "C3");
        assert_eq!(j["k"], 1);
        assert_eq!(j["mu2"], "4/1");
    }

    #[test]
    fn c1_phase_and_amplitude() {
        // 2 Im(zeta^3) = 2 Re(e^{-i pi/2} zeta^3): phase pi/6
        let u = &half_rho2() + &re_im_zeta_pow(3).1.scale(&int(2));
        match classify_point(&u, &zero(), &zero()).unwrap().class {
            UPointClass::C1 { n, a, phase } => {
                assert_eq!(n, 1);
                assert!((a - 2.0).abs() < 1e-15);
                assert!((phase - std::f64::consts::PI / 6.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn violation_is_reported() {
        let u = &half_rho2() + &(BiPoly::x().pow(3) + BiPoly::x() * BiPoly::y().pow(2));
        let r = classify_point(&u, &zero(), &zero()).unwrap();
        assert!(matches!(r.class, UPointClass::LemmaViolation { .. }));
        // mu = 3/2 (k = 2) on a degree-4 radial part: degree mismatch
        let w = BiPoly::rho2().pow(2);
        assert_eq!(classify_radial(&w, &rat(9, 4)).tag(), "violation");
    }

    #[test]
    fn classification_at_shifted_center() {
        let (cx, cy) = (rat(1, 2), rat(-3, 4));
        let shift = |p: &BiPoly| p.translate(&-cx.clone(), &-cy.clone());
        let u = shift(&(&half_rho2() + &BiPoly::rho2().pow(3)));
        let r = classify_point(&u, &cx, &cy).unwrap();
        assert_eq!(r.class.tag(), "C3");
        assert!(radial_about(&u, &cx, &cy));
        assert!(!radial_about(&u, &zero(), &zero()));
    }

    #[test]
    fn rotation_keeps_tag() {
        let (c, s) = pythagorean_rotation(3, 4, 5);
        let base = [
            &half_rho2() + &re_im_zeta_pow(4).0,
            &half_rho2() + &BiPoly::x().pow(5),
            &half_rho2() + &BiPoly::rho2().pow(3),
        ];
        for u in &base {
            let a = classify_point(u, &zero(), &zero()).unwrap().class.tag();
            let b = classify_point(&u.rotate(&c, &s), &zero(), &zero()).unwrap().class.tag();
            assert_eq!(a, b);
        }
        match classify_point(&base[1].rotate(&c, &s), &zero(), &zero()).unwrap().class {
            UPointClass::C2 { a, .. } => assert!((a.abs() - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn radial_examples() {
        // c1 + x + c2 rho^2 about (-1/(2 c2), 0)
        let c2 = rat(3, 2);
        let u = BiPoly::constant(int(-1)) + BiPoly::x() + BiPoly::rho2().scale(&c2);
        assert!(radial_about(&u, &(-(c2.clone() * int(2)).recip()), &zero()));
        assert!(!radial_about(&(BiPoly::x() + BiPoly::rho2().pow(2)), &zero(), &zero()));
        let v = BiPoly::rho2().pow(3).scale(&rat(-2, 7)) + BiPoly::rho2() + BiPoly::one();
        assert!(radial_about(&v, &zero(), &zero()));
        assert!(jacobian(&laplacian(&v), &hess_det(&v)).is_zero());
    }
}
