//! Exact checks of the differential identities behind the radial-point
//! argument: polar Laplacian, the bracket of a radial power with a
//! homogeneous polynomial, the third-order angular ODE, the `x^{n+2}`
//! identity and the lowest-order expansion of the discriminant.

mod suite;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{from_polar, int, AlgebraError, BiPoly, PolarHomog, Rational, TrigPoly};
use crate::classify::{decompose, ClassifyError};
use crate::operators::{bracket, discriminant, hess_det, jacobian, laplacian};

pub use suite::{run_suite, Cell, OdeRow, SuiteConfig, SuiteReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentityError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("radial power rho^{0} is not a polynomial")]
    OddRadialPower(u32),
    #[error("need m > n, got n = {n}, m = {m}")]
    DegreeOrder { n: u32, m: u32 },
    #[error("angular fit for n = {n}, m = {m} is not a unique pair: {why}")]
    DegenerateSystem { n: u32, m: u32, why: String },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

fn r(k: i64) -> Rational {
    int(k)
}

/// `a rho^{2j}` as a polynomial.
fn radial_power(a: &Rational, degree: u32) -> Result<BiPoly, IdentityError> {
    if degree % 2 == 1 {
        return Err(IdentityError::OddRadialPower(degree));
    }
    Ok(BiPoly::rho2().pow(degree / 2).scale(a))
}

/// `Lap(c rho^{m+2}) = rho^m (c'' + (m+2)^2 c)`, both sides as polynomials.
pub fn verify_polar_laplacian(m: u32, c: &TrigPoly) -> Result<bool, IdentityError> {
    let eta = from_polar(&PolarHomog::new(m + 2, c.clone()))?;
    let k = r(i64::from(m) + 2);
    let rhs_angular = &c.nth_derivative(2) + &c.scale(&(&k * &k));
    let rhs = from_polar(&PolarHomog::new(m, rhs_angular))?;
    Ok(laplacian(&eta) == rhs)
}

/// The reference closed form for `{a rho^{n+2}, c rho^{m+2}}`:
/// `(a/2)(n+2) rho^{n+m} ((n+4)(c'' + (m+2)^2 c) - 2n(m+1)(m+2) c)`.
pub fn reference_bracket_rhs(n: u32, m: u32, a: &Rational, c: &TrigPoly) -> Result<BiPoly, IdentityError> {
    let (n, m) = (i64::from(n), i64::from(m));
    let lap = &c.nth_derivative(2) + &c.scale(&r((m + 2) * (m + 2)));
    let ang = &lap.scale(&r(n + 4)) - &c.scale(&r(2 * n * (m + 1) * (m + 2)));
    let coef = a * r(n + 2) / r(2);
    Ok(from_polar(&PolarHomog::new((n + m) as u32, ang.scale(&coef)))?)
}

/// The bracket computed in polar form from the eigenvalues of a radial
/// Hessian: `a (n+2) rho^{n+m} ((n+1) c'' + (m+2)(m+n+2) c)`.
pub fn radial_bracket_rhs(n: u32, m: u32, a: &Rational, c: &TrigPoly) -> Result<BiPoly, IdentityError> {
    let (n, m) = (i64::from(n), i64::from(m));
    let ang = &c.nth_derivative(2).scale(&r(n + 1)) + &c.scale(&r((m + 2) * (m + n + 2)));
    Ok(from_polar(&PolarHomog::new((n + m) as u32, ang.scale(&(a * r(n + 2)))))?)
}

fn bracket_lhs(n: u32, m: u32, a: &Rational, c: &TrigPoly) -> Result<BiPoly, IdentityError> {
    let w = radial_power(a, n + 2)?;
    let eta = from_polar(&PolarHomog::new(m + 2, c.clone()))?;
    Ok(bracket(&w, &eta))
}

/// Cartesian `{w, eta}` against the reference closed form.
pub fn verify_bracket_formula(n: u32, m: u32, a: &Rational, c: &TrigPoly) -> Result<bool, IdentityError> {
    Ok(bracket_lhs(n, m, a, c)? == reference_bracket_rhs(n, m, a, c)?)
}

/// Cartesian `{w, eta}` against [`radial_bracket_rhs`].
pub fn verify_bracket_radial_form(n: u32, m: u32, a: &Rational, c: &TrigPoly) -> Result<bool, IdentityError> {
    Ok(bracket_lhs(n, m, a, c)? == radial_bracket_rhs(n, m, a, c)?)
}

/// `J[Lap w, {w, eta}] + J[Lap eta, H(w)]`.
pub fn leading_jacobian(w: &BiPoly, eta: &BiPoly) -> BiPoly {
    jacobian(&laplacian(w), &bracket(w, eta)) + jacobian(&laplacian(eta), &hess_det(w))
}

/// `alpha1 c''' = alpha2 c'` obtained by fitting the angular part of
/// [`leading_jacobian`] (with `w = rho^{n+2}`) as `beta1 c''' + beta2 c'`
/// over every admissible harmonic of `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C3Ode {
    pub n: u32,
    pub m: u32,
    #[serde(with = "crate::algebra::rational::serde_str")]
    pub alpha1: Rational,
    #[serde(with = "crate::algebra::rational::serde_str")]
    pub alpha2: Rational,
    /// `alpha2 / alpha1`.
    #[serde(with = "crate::algebra::rational::serde_str")]
    pub ratio: Rational,
    /// Number of scalar equations in the fit.
    pub equations: usize,
}

/// Harmonics `j >= 1` allowed in `c` when `c rho^d` is a polynomial.
fn admissible_harmonics(d: u32) -> impl Iterator<Item = usize> {
    ((d % 2) as usize..=d as usize).step_by(2).filter(|&j| j >= 1)
}

pub fn derive_c3_ode(n: u32, m: u32, a: &Rational) -> Result<C3Ode, IdentityError> {
    if m <= n {
        return Err(IdentityError::DegreeOrder { n, m });
    }
    let w = radial_power(a, n + 2)?;
    let degree = 2 * n + m - 2;
    // Rows (c''' coefficient, c' coefficient, target).
    let mut rows: Vec<[Rational; 3]> = Vec::new();
    for j in admissible_harmonics(m + 2) {
        for basis in [TrigPoly::cos_k(j, int(1)), TrigPoly::sin_k(j, int(1))] {
            let eta = from_polar(&PolarHomog::new(m + 2, basis.clone()))?;
            let e = leading_jacobian(&w, &eta);
            let ang = crate::algebra::to_polar_with_degree(&e, degree)?.angular;
            let (d3, d1) = (basis.nth_derivative(3), basis.derivative());
            let top = ang.max_harmonic().max(d3.max_harmonic()).max(d1.max_harmonic());
            for k in 0..=top {
                rows.push([d3.cos_coeff(k), d1.cos_coeff(k), ang.cos_coeff(k)]);
                rows.push([d3.sin_coeff(k), d1.sin_coeff(k), ang.sin_coeff(k)]);
            }
        }
    }
    let degenerate = |why: &str| IdentityError::DegenerateSystem { n, m, why: why.into() };
    // Any two independent rows determine (beta1, beta2); all rows must agree.
    let mut sol = None;
    'outer: for i in 0..rows.len() {
        for k in i + 1..rows.len() {
            let det = &rows[i][0] * &rows[k][1] - &rows[i][1] * &rows[k][0];
            if !det.is_zero() {
                let b1 = (&rows[i][2] * &rows[k][1] - &rows[i][1] * &rows[k][2]) / &det;
                let b2 = (&rows[i][0] * &rows[k][2] - &rows[i][2] * &rows[k][0]) / &det;
                sol = Some((b1, b2));
                break 'outer;
            }
        }
    }
    let (b1, b2) = sol.ok_or_else(|| degenerate("no two independent equations"))?;
    if rows.iter().any(|row| &row[0] * &b1 + &row[1] * &b2 != row[2]) {
        return Err(degenerate("angular part is not of the form beta1 c''' + beta2 c'"));
    }
    if b1.is_zero() {
        return Err(degenerate("c''' coefficient vanishes"));
    }
    // beta1 c''' + beta2 c' = 0  <=>  alpha1 c''' = alpha2 c' with alpha1 > 0.
    let sign = if b1.is_negative() { int(-1) } else { int(1) };
    let alpha1 = &b1 * &sign;
    let alpha2 = -(&b2 * &sign);
    let ratio = &alpha2 / &alpha1;
    Ok(C3Ode { n, m, alpha1, alpha2, ratio, equations: rows.len() })
}

/// Whether `cos j theta` / `sin j theta` can solve `alpha1 c''' = alpha2 c'`.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityCheck {
    pub max_j: usize,
    /// Harmonics for which `alpha1 c''' - alpha2 c'` vanishes for `c = cos j theta`.
    pub periodic_solutions: Vec<usize>,
    /// Harmonics with `j^2 alpha1 = alpha2` (the sign-flipped eigenvalue
    /// relation; informational only).
    pub sign_flipped_coincidences: Vec<usize>,
}

impl PeriodicityCheck {
    pub fn only_constants(&self) -> bool {
        self.periodic_solutions.is_empty()
    }
}

pub fn periodicity_check(ode: &C3Ode, max_j: usize) -> PeriodicityCheck {
    let mut periodic_solutions = Vec::new();
    let mut sign_flipped_coincidences = Vec::new();
    for j in 1..=max_j {
        for basis in [TrigPoly::cos_k(j, int(1)), TrigPoly::sin_k(j, int(1))] {
            let res = &basis.nth_derivative(3).scale(&ode.alpha1) - &basis.derivative().scale(&ode.alpha2);
            if res.is_zero() {
                periodic_solutions.push(j);
                break;
            }
        }
        let jj = int(j as i64 * j as i64);
        if jj * &ode.alpha1 == ode.alpha2 {
            sign_flipped_coincidences.push(j);
        }
    }
    PeriodicityCheck { max_j, periodic_solutions, sign_flipped_coincidences }
}

/// For `w = a x^{n+2}`:
/// `J[Lap w, {w, eta}] + J[Lap eta, H(w)] = n a^2 (n+1)^2 (n+2)^2 x^{2n-1} eta_yyy`.
pub fn verify_case3_identity(n: u32, a: &Rational, eta: &BiPoly) -> bool {
    let w = BiPoly::monomial(n + 2, 0, a.clone());
    let lhs = leading_jacobian(&w, eta);
    let k = i64::from(n);
    let coef = a * a * r(k * (k + 1) * (k + 1) * (k + 2) * (k + 2));
    let rhs = &BiPoly::monomial(2 * n - 1, 0, coef) * &eta.dy().dy().dy();
    lhs == rhs
}

/// With `u = c0 + a x + b y + lambda/2 rho^2 + w + ...` about the origin and
/// `deg w = n + 2`: the parts of `disc(u)` and `(Lap u - 2 lambda)^2` below
/// degree `2n` vanish and the degree-`2n` parts are `disc(w)` and `(Lap w)^2`.
pub fn verify_lowest_term_expansion(u: &BiPoly) -> Result<bool, IdentityError> {
    let d = decompose(u, &int(0), &int(0))?;
    let Some(w) = &d.w else {
        // No term beyond the quadratic: both sides vanish identically.
        let lap_shift = laplacian(u) - BiPoly::constant(&d.lambda * int(2));
        return Ok(discriminant(u).is_zero() && lap_shift.is_zero());
    };
    let n = w.homogeneous_degree().expect("w is homogeneous") - 2;
    let disc = discriminant(u);
    let shifted = laplacian(u) - BiPoly::constant(&d.lambda * int(2));
    let sq = &shifted * &shifted;
    let low_zero = |p: &BiPoly| (0..2 * n).all(|k| p.homog_part(k).is_zero());
    let lw = laplacian(w);
    Ok(low_zero(&disc)
        && low_zero(&sq)
        && disc.homog_part(2 * n) == discriminant(w)
        && sq.homog_part(2 * n) == &lw * &lw)
}

/// Expansion of `J[Lap(h + psi), H(h + psi)]` into
/// `J[Lap h, H h] + J[Lap h, {h, psi}] + J[Lap psi, H h] + J[Lap h, H psi]
///  + J[Lap psi, H psi + {h, psi}]`.
pub fn verify_five_term_split(h: &BiPoly, psi: &BiPoly) -> bool {
    let u = h + psi;
    let lhs = jacobian(&laplacian(&u), &hess_det(&u));
    let (lh, lp) = (laplacian(h), laplacian(psi));
    let (hh, hp, b) = (hess_det(h), hess_det(psi), bracket(h, psi));
    let rhs =
        jacobian(&lh, &hh) + jacobian(&lh, &b) + jacobian(&lp, &hh) + jacobian(&lh, &hp) + jacobian(&lp, &(&hp + &b));
    // H(h + psi) = H h + H psi + {h, psi} is the first step of the expansion.
    lhs == rhs && hess_det(&u) == &(&hh + &hp) + &b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, re_im_zeta_pow};

    #[test]
    fn polar_laplacian_examples() {
        assert!(verify_polar_laplacian(1, &TrigPoly::cos_k(3, int(1))).unwrap());
        assert!(verify_polar_laplacian(2, &TrigPoly::cos_k(2, int(1))).unwrap());
        // Harmonic: Re zeta^3 has zero Laplacian.
        let eta = from_polar(&PolarHomog::new(3, TrigPoly::cos_k(3, int(1)))).unwrap();
        assert_eq!(eta, re_im_zeta_pow(3).0);
        assert!(laplacian(&eta).is_zero());
        // Incompatible parity is rejected.
        assert!(verify_polar_laplacian(2, &TrigPoly::cos_k(1, int(1))).is_err());
    }

    #[test]
    fn reference_bracket_holds_for_n2() {
        for m in 3..=10 {
            for j in admissible_harmonics(m + 2) {
                let c = TrigPoly::cos_k(j, rat(3, 7)) + TrigPoly::sin_k(j, rat(-2, 5));
                assert!(verify_bracket_formula(2, m, &rat(5, 3), &c).unwrap(), "m={m} j={j}");
            }
        }
        assert!(verify_bracket_formula(2, 3, &int(1), &TrigPoly::cos_k(5, int(1))).unwrap());
    }

    #[test]
    fn reference_bracket_differs_for_n4() {
        // Hand computation of {rho^6, cos(2 theta) rho^8} with m = 6:
        // radial form 6 rho^10 (5 (-4) + 8 * 12) cos 2 theta = 456 rho^10 cos 2 theta,
        // reference form 3 rho^10 (8 (-4 + 64) - 8 * 7 * 8) cos 2 theta = 96 rho^10 cos 2 theta.
        let c = TrigPoly::cos_k(2, int(1));
        assert!(!verify_bracket_formula(4, 6, &int(1), &c).unwrap());
        assert!(verify_bracket_radial_form(4, 6, &int(1), &c).unwrap());
        let lhs = bracket_lhs(4, 6, &int(1), &c).unwrap();
        let expect = from_polar(&PolarHomog::new(10, TrigPoly::cos_k(2, int(456)))).unwrap();
        assert_eq!(lhs, expect);
        let reference = reference_bracket_rhs(4, 6, &int(1), &c).unwrap();
        assert_eq!(reference, from_polar(&PolarHomog::new(10, TrigPoly::cos_k(2, int(96)))).unwrap());
    }

    #[test]
    fn constant_c_is_radial_bracket() {
        for n in [2, 4, 6] {
            let c = TrigPoly::constant(rat(2, 3));
            let lhs = bracket_lhs(n, n + 2, &int(1), &c).unwrap();
            assert!(crate::classify::radial_about(&lhs, &int(0), &int(0)));
            assert!(verify_bracket_radial_form(n, n + 2, &int(1), &c).unwrap());
        }
    }

    #[test]
    fn ode_matches_hand_derivation() {
        // E = a^2 (n+2)^2 n^2 rho^{2n+m-2} ((n+1) c''' - (m+2)(m-n) c').
        for n in [2u32, 4, 6] {
            for m in n + 1..=10 {
                let ode = derive_c3_ode(n, m, &int(1)).unwrap();
                let (nn, mm) = (i64::from(n), i64::from(m));
                assert_eq!(ode.alpha1, int((nn + 2) * (nn + 2) * nn * nn * (nn + 1)), "n={n} m={m}");
                assert_eq!(ode.alpha2, int((nn + 2) * (nn + 2) * nn * nn * (mm + 2) * (mm - nn)));
                assert!(ode.alpha1.is_positive() && ode.alpha2.is_positive());
            }
        }
    }

    #[test]
    fn ode_scales_with_a_squared() {
        let one = derive_c3_ode(2, 5, &int(1)).unwrap();
        let two = derive_c3_ode(2, 5, &int(2)).unwrap();
        assert_eq!(two.alpha1, &one.alpha1 * int(4));
        assert_eq!(two.ratio, one.ratio);
    }

    #[test]
    fn no_periodic_solutions() {
        let ode = derive_c3_ode(2, 4, &int(1)).unwrap();
        let p = periodicity_check(&ode, 20);
        assert!(p.only_constants());
        // alpha2 / alpha1 = 4 here, so the sign-flipped relation j^2 = 4 hits j = 2.
        assert_eq!(ode.ratio, int(4));
        assert_eq!(p.sign_flipped_coincidences, vec![2]);
    }

    #[test]
    fn odd_n_rejected() {
        assert!(matches!(derive_c3_ode(3, 5, &int(1)), Err(IdentityError::OddRadialPower(5))));
        assert!(matches!(derive_c3_ode(4, 4, &int(1)), Err(IdentityError::DegreeOrder { .. })));
    }

    #[test]
    fn case3_examples() {
        let eta = BiPoly::y().pow(3);
        assert!(verify_case3_identity(1, &int(1), &eta));
        let lhs = leading_jacobian(&BiPoly::x().pow(3), &eta);
        assert_eq!(lhs, BiPoly::monomial(1, 0, int(216)));
        // eta_yyy = 0 forces the left side to vanish.
        let m = 4;
        let eta = &BiPoly::x().pow(m)
            * &(BiPoly::monomial(2, 0, int(1)) + BiPoly::monomial(1, 1, int(-3)) + BiPoly::monomial(0, 2, rat(1, 2)));
        assert!(leading_jacobian(&BiPoly::x().pow(4), &eta).is_zero());
        assert!(verify_case3_identity(2, &int(1), &eta));
    }

    #[test]
    fn lowest_terms() {
        let u = BiPoly::rho2().scale(&rat(1, 2)) + BiPoly::x().pow(4) + BiPoly::monomial(5, 1, int(1));
        assert!(verify_lowest_term_expansion(&u).unwrap());
        let q = BiPoly::rho2().scale(&rat(3, 2)) + BiPoly::x();
        assert!(verify_lowest_term_expansion(&q).unwrap());
        assert!(verify_lowest_term_expansion(&(BiPoly::x() * BiPoly::y())).is_err());
    }

    #[test]
    fn five_terms() {
        let h = BiPoly::rho2().pow(2).scale(&rat(1, 3)) - BiPoly::rho2().pow(3);
        let psi = BiPoly::monomial(3, 2, int(2)) + BiPoly::monomial(0, 5, rat(-1, 4)) + BiPoly::x().pow(4);
        assert!(verify_five_term_split(&h, &psi));
    }
}
