//! Real trigonometric polynomials `c0 + sum_k (a_k cos k t + b_k sin k t)`
//! with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::rational::{to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrigPoly {
    // cos[0] is the constant term; sin[0] is kept at zero so both vectors
    // share indexing by harmonic.
    cos: Vec<Rational>,
    sin: Vec<Rational>,
}

impl Default for TrigPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self { cos: vec![Rational::zero()], sin: vec![Rational::zero()] }
    }

    pub fn constant(c: Rational) -> Self {
        Self { cos: vec![c], sin: vec![Rational::zero()] }
    }

    /// `coef * cos(k t)`.
    pub fn cos_k(k: usize, coef: Rational) -> Self {
        let mut t = Self::with_len(k + 1);
        t.cos[k] = coef;
        t.trim();
        t
    }

    /// `coef * sin(k t)`; zero when `k == 0`.
    pub fn sin_k(k: usize, coef: Rational) -> Self {
        let mut t = Self::with_len(k + 1);
        if k > 0 {
            t.sin[k] = coef;
        }
        t.trim();
        t
    }

    /// Builds from a constant and harmonic coefficients `a_k`, `b_k` for `k = 1..`.
    pub fn from_coeffs(constant: Rational, a: Vec<Rational>, b: Vec<Rational>) -> Self {
        let n = a.len().max(b.len()) + 1;
        let mut t = Self::with_len(n);
        t.cos[0] = constant;
        for (k, c) in a.into_iter().enumerate() {
            t.cos[k + 1] = c;
        }
        for (k, c) in b.into_iter().enumerate() {
            t.sin[k + 1] = c;
        }
        t.trim();
        t
    }

    fn with_len(n: usize) -> Self {
        Self { cos: vec![Rational::zero(); n.max(1)], sin: vec![Rational::zero(); n.max(1)] }
    }

    fn trim(&mut self) {
        while self.cos.len() > 1 {
            let k = self.cos.len() - 1;
            if self.cos[k].is_zero() && self.sin[k].is_zero() {
                self.cos.pop();
                self.sin.pop();
            } else {
                break;
            }
        }
    }

    pub fn constant_term(&self) -> &Rational {
        &self.cos[0]
    }

    /// Coefficient of `cos(k t)`; `k = 0` gives the constant term.
    pub fn cos_coeff(&self, k: usize) -> Rational {
        self.cos.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn sin_coeff(&self, k: usize) -> Rational {
        if k == 0 {
            return Rational::zero();
        }
        self.sin.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest harmonic with a nonzero coefficient (0 for constants).
    pub fn max_harmonic(&self) -> usize {
        self.cos.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.cos.len() == 1 && self.cos[0].is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.cos.len() == 1
    }

    /// Harmonics present with nonzero coefficient.
    pub fn harmonics(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cos.len()).filter(|&k| !self.cos[k].is_zero() || !self.sin[k].is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut t =
            Self { cos: self.cos.iter().map(|v| v * c).collect(), sin: self.sin.iter().map(|v| v * c).collect() };
        t.trim();
        t
    }

    pub fn derivative(&self) -> Self {
        let mut t = Self::with_len(self.cos.len());
        for k in 1..self.cos.len() {
            let kk = Rational::from_integer(k.into());
            // d/dt (a cos kt + b sin kt) = k b cos kt - k a sin kt
            t.cos[k] = &kk * &self.sin[k];
            t.sin[k] = -(&kk * &self.cos[k]);
        }
        t.trim();
        t
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.derivative())
    }

    /// Multiplies harmonic `k` by `f(k)`.
    pub fn map_harmonics<F: Fn(usize) -> Rational>(&self, f: F) -> Self {
        let mut t = self.clone();
        for k in 0..t.cos.len() {
            let m = f(k);
            t.cos[k] *= &m;
            t.sin[k] *= &m;
        }
        t.trim();
        t
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut s = to_f64(&self.cos[0]);
        for k in 1..self.cos.len() {
            let kt = k as f64 * theta;
            s += to_f64(&self.cos[k]) * kt.cos() + to_f64(&self.sin[k]) * kt.sin();
        }
        s
    }
}

impl Add<&TrigPoly> for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let n = self.cos.len().max(rhs.cos.len());
        let mut t = TrigPoly::with_len(n);
        for k in 0..n {
            t.cos[k] = self.cos_coeff(k) + rhs.cos_coeff(k);
            t.sin[k] = self.sin_coeff(k) + rhs.sin_coeff(k);
        }
        t.trim();
        t
    }
}

impl Sub<&TrigPoly> for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self + &(-rhs)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(&-Rational::one())
    }
}

impl Mul<&TrigPoly> for &TrigPoly {
    type Output = TrigPoly;

    /// Product-to-sum expansion:
    /// `cos j cos k = (cos(j-k) + cos(j+k))/2`,
    /// `sin j sin k = (cos(j-k) - cos(j+k))/2`,
    /// `sin j cos k = (sin(j+k) + sin(j-k))/2`.
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        let n = self.cos.len() + rhs.cos.len() - 1;
        let mut t = TrigPoly::with_len(n);
        let half = Rational::new(1.into(), 2.into());
        // Signed sin coefficient accumulation: sin(-m) = -sin(m).
        let add_cos = |t: &mut TrigPoly, m: i64, c: Rational| {
            t.cos[m.unsigned_abs() as usize] += c;
        };
        let add_sin = |t: &mut TrigPoly, m: i64, c: Rational| {
            if m > 0 {
                t.sin[m as usize] += c;
            } else if m < 0 {
                t.sin[(-m) as usize] -= c;
            }
        };
        for j in 0..self.cos.len() {
            let (aj, bj) = (&self.cos[j], &self.sin[j]);
            for k in 0..rhs.cos.len() {
                let (ak, bk) = (&rhs.cos[k], &rhs.sin[k]);
                let (ji, ki) = (j as i64, k as i64);
                if !aj.is_zero() && !ak.is_zero() {
                    let c = aj * ak * &half;
                    add_cos(&mut t, ji - ki, c.clone());
                    add_cos(&mut t, ji + ki, c);
                }
                if !bj.is_zero() && !bk.is_zero() {
                    let c = bj * bk * &half;
                    add_cos(&mut t, ji - ki, c.clone());
                    add_cos(&mut t, ji + ki, -c);
                }
                if !bj.is_zero() && !ak.is_zero() {
                    let c = bj * ak * &half;
                    add_sin(&mut t, ji + ki, c.clone());
                    add_sin(&mut t, ji - ki, c);
                }
                if !aj.is_zero() && !bk.is_zero() {
                    let c = aj * bk * &half;
                    add_sin(&mut t, ki + ji, c.clone());
                    add_sin(&mut t, ki - ji, c);
                }
            }
        }
        t.trim();
        t
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<TrigPoly> for TrigPoly {
            type Output = TrigPoly;
            fn $m(self, rhs: TrigPoly) -> TrigPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&TrigPoly> for TrigPoly {
            type Output = TrigPoly;
            fn $m(self, rhs: &TrigPoly) -> TrigPoly {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.cos[0].is_zero() {
            parts.push(format!("{}", self.cos[0]));
        }
        for k in 1..self.cos.len() {
            if !self.cos[k].is_zero() {
                parts.push(format!("{}*cos({k}t)", self.cos[k]));
            }
            if !self.sin[k].is_zero() {
                parts.push(format!("{}*sin({k}t)", self.sin[k]));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    #[test]
    fn cos_cubed_product_to_sum() {
        let c = TrigPoly::cos_k(1, int(1));
        let c3 = &(&c * &c) * &c;
        assert_eq!(c3.cos_coeff(1), rat(3, 4));
        assert_eq!(c3.cos_coeff(3), rat(1, 4));
        assert_eq!(c3.max_harmonic(), 3);
    }

    #[test]
    fn pythagorean_identity() {
        let c = TrigPoly::cos_k(1, int(1));
        let s = TrigPoly::sin_k(1, int(1));
        let one = &(&c * &c) + &(&s * &s);
        assert_eq!(one, TrigPoly::constant(int(1)));
    }

    #[test]
    fn mixed_product_matches_sampling() {
        let p = TrigPoly::from_coeffs(rat(1, 3), vec![int(2), int(0), rat(-1, 5)], vec![int(1), rat(3, 7)]);
        let q = TrigPoly::from_coeffs(int(-1), vec![rat(1, 2)], vec![int(0), int(4)]);
        let pq = &p * &q;
        for i in 0..16 {
            let t = i as f64 * 0.41 - 2.0;
            assert!((pq.eval(t) - p.eval(t) * q.eval(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_sin() {
        let s = TrigPoly::sin_k(3, int(2));
        assert_eq!(s.derivative(), TrigPoly::cos_k(3, int(6)));
        assert_eq!(s.nth_derivative(2), TrigPoly::sin_k(3, int(-18)));
    }

    #[test]
    fn trimmed_after_cancellation() {
        let a = TrigPoly::cos_k(4, int(1));
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z.max_harmonic(), 0);
    }
}
