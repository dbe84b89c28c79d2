//! Homogeneous polynomials written as `c(theta) * rho^d`.

use std::collections::HashMap;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use super::bipoly::BiPoly;
use super::rational::Rational;
use super::trig::TrigPoly;
use super::AlgebraError;

/// `angular(theta) * rho^degree`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolarHomog {
    pub degree: u32,
    pub angular: TrigPoly,
}

impl PolarHomog {
    pub fn new(degree: u32, angular: TrigPoly) -> Self {
        Self { degree, angular }
    }

    /// True when every harmonic `k` satisfies `k <= degree` and
    /// `k = degree (mod 2)`, i.e. the function is a polynomial in `x, y`.
    pub fn is_polynomial(&self) -> bool {
        self.angular.harmonics().all(|k| k as u32 <= self.degree && (self.degree - k as u32).is_multiple_of(2))
    }

    pub fn eval(&self, rho: f64, theta: f64) -> f64 {
        self.angular.eval(theta) * rho.powi(self.degree as i32)
    }
}

impl Mul<&PolarHomog> for &PolarHomog {
    type Output = PolarHomog;
    fn mul(self, rhs: &PolarHomog) -> PolarHomog {
        PolarHomog::new(self.degree + rhs.degree, &self.angular * &rhs.angular)
    }
}

/// Polar form of a homogeneous polynomial.
pub fn to_polar(w: &BiPoly) -> Result<PolarHomog, AlgebraError> {
    if w.is_zero() {
        return Ok(PolarHomog::new(0, TrigPoly::zero()));
    }
    let d = w.homogeneous_degree().ok_or(AlgebraError::NotHomogeneous)?;
    to_polar_with_degree(w, d)
}

/// Like [`to_polar`] but with the degree supplied, so the zero polynomial
/// keeps a meaningful degree.
pub fn to_polar_with_degree(w: &BiPoly, d: u32) -> Result<PolarHomog, AlgebraError> {
    if w.terms().any(|(&(i, j), _)| i + j != d) {
        return Err(AlgebraError::NotHomogeneous);
    }
    let cos1 = TrigPoly::cos_k(1, Rational::one());
    let sin1 = TrigPoly::sin_k(1, Rational::one());
    let cos_pow = trig_powers(&cos1, d as usize);
    let sin_pow = trig_powers(&sin1, d as usize);
    let mut angular = TrigPoly::zero();
    for (&(i, j), c) in w.terms() {
        let term = &cos_pow[i as usize] * &sin_pow[j as usize];
        angular = &angular + &term.scale(c);
    }
    let h = PolarHomog::new(d, angular);
    debug_assert!(h.is_polynomial(), "harmonic cap violated for degree {d}");
    Ok(h)
}

fn trig_powers(t: &TrigPoly, n: usize) -> Vec<TrigPoly> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(TrigPoly::constant(Rational::one()));
    for k in 1..=n {
        let next = &v[k - 1] * t;
        v.push(next);
    }
    v
}

/// `Re(zeta^k)` and `Im(zeta^k)` for `zeta = x + i y`.
pub fn re_im_zeta_pow(k: u32) -> (BiPoly, BiPoly) {
    let mut re = BiPoly::zero();
    let mut im = BiPoly::zero();
    for r in 0..=k {
        let c = Rational::from_integer(binomial(BigInt::from(k), BigInt::from(r)));
        // i^r: 1, i, -1, -i
        match r % 4 {
            0 => re.add_term((k - r, r), c),
            1 => im.add_term((k - r, r), c),
            2 => re.add_term((k - r, r), -c),
            _ => im.add_term((k - r, r), -c),
        }
    }
    (re, im)
}

/// Cartesian polynomial of `h`; fails when a harmonic is incompatible with
/// the degree.
pub fn from_polar(h: &PolarHomog) -> Result<BiPoly, AlgebraError> {
    if !h.is_polynomial() {
        return Err(AlgebraError::NotPolynomial { degree: h.degree, max_harmonic: h.angular.max_harmonic() as u32 });
    }
    let rho2 = BiPoly::rho2();
    let mut rho2_pows: HashMap<u32, BiPoly> = HashMap::new();
    let mut out = BiPoly::zero();
    for k in h.angular.harmonics().collect::<Vec<_>>() {
        let e = (h.degree - k as u32) / 2;
        let r = rho2_pows.entry(e).or_insert_with(|| rho2.pow(e)).clone();
        let (re, im) = re_im_zeta_pow(k as u32);
        let a = h.angular.cos_coeff(k);
        let b = h.angular.sin_coeff(k);
        if !a.is_zero() {
            out += (&re * &r).scale(&a);
        }
        if !b.is_zero() {
            out += (&im * &r).scale(&b);
        }
    }
    Ok(out)
}

/// `Laplacian(c rho^d) = (c'' + d^2 c) rho^(d-2)`.
pub fn polar_laplacian(h: &PolarHomog) -> Result<PolarHomog, AlgebraError> {
    if h.degree < 2 {
        return Err(AlgebraError::DegreeUnderflow(h.degree));
    }
    let d2 = i64::from(h.degree).pow(2);
    let angular = h.angular.map_harmonics(|k| Rational::from_integer((d2 - (k as i64).pow(2)).into()));
    Ok(PolarHomog::new(h.degree - 2, angular))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::operators::laplacian;

    fn x() -> BiPoly {
        BiPoly::x()
    }
    fn y() -> BiPoly {
        BiPoly::y()
    }

    fn sample_check(w: &BiPoly, h: &PolarHomog) {
        for i in 0..16 {
            let th = i as f64 * std::f64::consts::PI / 8.0 + 0.1;
            let r = 1.3;
            let direct = w.eval_f64(r * th.cos(), r * th.sin());
            assert!((direct - h.eval(r, th)).abs() < 1e-12, "angle {th}");
        }
    }

    #[test]
    fn x_cubed() {
        let w = x().pow(3);
        let h = to_polar(&w).unwrap();
        assert_eq!(h.degree, 3);
        assert_eq!(h.angular.cos_coeff(1), rat(3, 4));
        assert_eq!(h.angular.cos_coeff(3), rat(1, 4));
        assert_eq!(h.angular.harmonics().count(), 2);
        sample_check(&w, &h);
    }

    #[test]
    fn rho_fourth_is_radial() {
        let w = BiPoly::rho2().pow(2);
        let h = to_polar(&w).unwrap();
        assert_eq!(h, PolarHomog::new(4, TrigPoly::constant(int(1))));
    }

    #[test]
    fn re_zeta_cubed() {
        let w = x().pow(3) - (x() * y().pow(2)).scale(&int(3));
        let h = to_polar(&w).unwrap();
        assert_eq!(h.angular, TrigPoly::cos_k(3, int(1)));
        sample_check(&w, &h);
        assert_eq!(re_im_zeta_pow(3).0, w);
    }

    #[test]
    fn mixed_degrees_rejected() {
        assert_eq!(to_polar(&(x() + y().pow(2))), Err(AlgebraError::NotHomogeneous));
    }

    #[test]
    fn round_trip() {
        let w = x().pow(4).scale(&rat(2, 3)) - (x() * y().pow(3)).scale(&int(5));
        let h = to_polar(&w).unwrap();
        assert_eq!(from_polar(&h).unwrap(), w);
    }

    #[test]
    fn from_polar_rejects_parity_mismatch() {
        let h = PolarHomog::new(3, TrigPoly::cos_k(2, int(1)));
        assert!(matches!(from_polar(&h), Err(AlgebraError::NotPolynomial { .. })));
        let h = PolarHomog::new(2, TrigPoly::cos_k(4, int(1)));
        assert!(from_polar(&h).is_err());
    }

    #[test]
    fn laplacian_of_radial_power() {
        // a rho^(n+2) -> a (n+2)^2 rho^n
        for n in 0..6u32 {
            let h = PolarHomog::new(n + 2, TrigPoly::constant(rat(3, 2)));
            let l = polar_laplacian(&h).unwrap();
            assert_eq!(l.degree, n);
            assert_eq!(l.angular, TrigPoly::constant(rat(3, 2) * int(((n + 2) * (n + 2)) as i64)));
        }
    }

    #[test]
    fn laplacian_polar_matches_cartesian() {
        let c = TrigPoly::from_coeffs(rat(1, 2), vec![int(0), int(3), int(0), rat(-2, 7)], vec![int(0), int(1)]);
        let h = PolarHomog::new(6, c);
        let cart = laplacian(&from_polar(&h).unwrap());
        let pol = from_polar(&polar_laplacian(&h).unwrap()).unwrap();
        assert_eq!(cart, pol);
    }

    #[test]
    fn underflow() {
        let h = PolarHomog::new(1, TrigPoly::cos_k(1, int(1)));
        assert_eq!(polar_laplacian(&h), Err(AlgebraError::DegreeUnderflow(1)));
    }

    #[test]
    fn homomorphism() {
        let w1 = x().pow(2) - (x() * y()).scale(&int(3));
        let w2 = y().pow(3) + x().pow(3).scale(&rat(1, 5));
        let p = to_polar(&(&w1 * &w2)).unwrap();
        let q = &to_polar(&w1).unwrap() * &to_polar(&w2).unwrap();
        assert_eq!(p, q);
    }
}
