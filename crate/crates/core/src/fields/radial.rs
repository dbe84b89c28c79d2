use num_traits::Zero;

use crate::algebra::rational::to_f64;
use crate::algebra::{BiPoly, Rational};
use crate::operators::HessianSample;

use super::{FieldError, Jet3, PolyField, ScalarField};

/// Radial profile `v(rho)`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// `sum_k coeffs[k] rho^k`.
    Poly(Vec<Rational>),
    /// `v = -c0 + t rho`.
    Linear { t: Rational },
    /// `v = t1 rho^2 + t2`.
    Quadratic { t1: Rational, t2: Rational },
}

impl RadialProfile {
    /// Univariate coefficients in `rho`, given the field's `c0`.
    pub fn coefficients(&self, c0: &Rational) -> Vec<Rational> {
        match self {
            RadialProfile::Poly(c) => c.clone(),
            RadialProfile::Linear { t } => vec![-c0.clone(), t.clone()],
            RadialProfile::Quadratic { t1, t2 } => vec![t2.clone(), Rational::zero(), t1.clone()],
        }
    }
}

/// `u(x, y) = a x + b y + c0 + v(sqrt(x^2 + y^2))`.
#[derive(Debug, Clone)]
pub struct RadialLinearField {
    pub a: Rational,
    pub b: Rational,
    pub c0: Rational,
    pub profile: RadialProfile,
    coeffs: Vec<f64>,
    // Present when v only has even powers, so u is a polynomial.
    even: Option<PolyField>,
}

impl RadialLinearField {
    pub fn new(a: Rational, b: Rational, c0: Rational, profile: RadialProfile) -> Self {
        let exact = profile.coefficients(&c0);
        let coeffs = exact.iter().map(to_f64).collect();
        let even = exact.iter().skip(1).step_by(2).all(Zero::is_zero).then(|| {
            let mut p = BiPoly::x().scale(&a) + BiPoly::y().scale(&b) + BiPoly::constant(c0.clone());
            let rho2 = BiPoly::rho2();
            for (k, c) in exact.iter().enumerate().step_by(2) {
                p += rho2.pow(k as u32 / 2).scale(c);
            }
            PolyField::new(p)
        });
        Self { a, b, c0, profile, coeffs, even }
    }

    /// Polynomial form when the profile is even in `rho`.
    pub fn to_poly(&self) -> Option<&BiPoly> {
        self.even.as_ref().map(|f| f.poly())
    }

    pub fn is_analytic(&self) -> bool {
        self.even.is_some()
    }

    /// `v, v', v'', v'''` at `rho`.
    pub fn profile_derivs(&self, rho: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let mut f = c;
            for (order, slot) in out.iter_mut().enumerate() {
                if order > k {
                    break;
                }
                *slot += f * rho.powi((k - order) as i32);
                f *= (k - order) as f64;
            }
        }
        out
    }
}

impl ScalarField for RadialLinearField {
    fn jet3(&self, p: [f64; 2]) -> Result<Jet3, FieldError> {
        if let Some(f) = &self.even {
            return f.jet3(p);
        }
        let rho = p[0].hypot(p[1]);
        if rho < 1e-12 {
            return Err(FieldError::OutOfDomain(p[0], p[1]));
        }
        let n = [p[0] / rho, p[1] / rho];
        let [v0, v1, v2, v3] = self.profile_derivs(rho);
        let big_a = v2;
        let big_b = v1 / rho;
        let big_c = (big_a - big_b) / rho;
        let second = |i: usize, j: usize| big_b * delta(i, j) + (big_a - big_b) * n[i] * n[j];
        let third = |i: usize, j: usize, k: usize| {
            big_c * (n[k] * delta(i, j) + n[j] * delta(i, k) + n[i] * delta(j, k))
                + (v3 - 3.0 * big_c) * n[i] * n[j] * n[k]
        };
        let (a, b) = (to_f64(&self.a), to_f64(&self.b));
        Ok(Jet3 {
            value: a * p[0] + b * p[1] + to_f64(&self.c0) + v0,
            grad: [a + v1 * n[0], b + v1 * n[1]],
            hess: HessianSample::new(second(0, 0), second(0, 1), second(1, 1)),
            third: [third(0, 0, 0), third(0, 0, 1), third(0, 1, 1), third(1, 1, 1)],
        })
    }

    fn is_analytic(&self) -> bool {
        self.even.is_some()
    }

    fn as_poly(&self) -> Option<&BiPoly> {
        self.to_poly()
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};
    use crate::fields::testutil::check_jet_consistency;

    #[test]
    fn quadratic_family_gradient() {
        // u = c1 + x + c2 rho^2
        let f = RadialLinearField::new(int(1), int(0), int(0), RadialProfile::Quadratic { t1: rat(3, 2), t2: int(-2) });
        assert!(f.to_poly().is_some());
        let j = f.jet3([0.4, -0.3]).unwrap();
        assert!((j.grad[0] - (1.0 + 3.0 * 0.4)).abs() < 1e-15);
        assert!((j.grad[1] - 3.0 * -0.3).abs() < 1e-15);
    }

    #[test]
    fn odd_profile_jets_match_differences() {
        let f = RadialLinearField::new(
            rat(1, 3),
            int(-1),
            int(2),
            RadialProfile::Poly(vec![int(0), rat(1, 2), int(0), int(1), rat(-1, 4)]),
        );
        assert!(f.to_poly().is_none());
        for k in 0..30 {
            let a = 0.9 * k as f64;
            let r = 0.3 + 0.05 * k as f64;
            check_jet_consistency(&f, [r * a.cos(), r * a.sin()], 1e-5, 1e-6);
        }
    }

    #[test]
    fn linear_family_excludes_origin() {
        let f = RadialLinearField::new(int(1), int(0), int(0), RadialProfile::Linear { t: rat(1, 2) });
        assert!(f.jet3([0.0, 0.0]).is_err());
        let j = f.jet3([0.0, 2.0]).unwrap();
        assert!((j.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_equivariance() {
        let f =
            RadialLinearField::new(int(0), int(0), int(0), RadialProfile::Poly(vec![int(1), int(2), int(0), int(-1)]));
        let (c, s) = (0.6, 0.8);
        for k in 1..20 {
            let p = [0.1 * k as f64, 0.05 * k as f64];
            let q = [c * p[0] - s * p[1], s * p[0] + c * p[1]];
            let jp = f.jet3(p).unwrap();
            let jq = f.jet3(q).unwrap();
            assert!((jp.value - jq.value).abs() < 1e-12);
            let g = [c * jp.grad[0] - s * jp.grad[1], s * jp.grad[0] + c * jp.grad[1]];
            assert!((g[0] - jq.grad[0]).abs() < 1e-12 && (g[1] - jq.grad[1]).abs() < 1e-12);
            assert!((jp.hess.laplacian() - jq.hess.laplacian()).abs() < 1e-12);
            assert!((jp.hess.det() - jq.hess.det()).abs() < 1e-10);
        }
    }
}
