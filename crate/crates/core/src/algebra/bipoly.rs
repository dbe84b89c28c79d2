//! Sparse bivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use super::rational::{to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// Exponent pair `(i, j)` of the monomial `x^i y^j`.
pub type Exponent = (u32, u32);

/// Bivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// polynomial equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BiPoly {
    terms: BTreeMap<Exponent, Rational>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, Rational::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, Rational::one())
    }

    pub fn monomial(i: u32, j: u32, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    /// `x^2 + y^2`.
    pub fn rho2() -> Self {
        Self::monomial(2, 0, Rational::one()) + Self::monomial(0, 2, Rational::one())
    }

    /// Sums duplicate exponents and drops zeros.
    pub fn from_terms<I: IntoIterator<Item = (Exponent, Rational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Lowest total degree present; `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    /// Sum of the terms of total degree exactly `d`.
    pub fn homog_part(&self, d: u32) -> BiPoly {
        Self { terms: self.terms.iter().filter(|(&(i, j), _)| i + j == d).map(|(e, c)| (*e, c.clone())).collect() }
    }

    /// Terms of total degree `>= d`.
    pub fn truncate_below(&self, d: u32) -> BiPoly {
        Self { terms: self.terms.iter().filter(|(&(i, j), _)| i + j >= d).map(|(e, c)| (*e, c.clone())).collect() }
    }

    /// The common degree when every term has the same total degree.
    /// The zero polynomial counts as homogeneous of any degree and returns `None`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|&(i, j)| i + j);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn derive(&self, axis: Axis) -> BiPoly {
        let mut out = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            match axis {
                Axis::X if i > 0 => {
                    out.insert((i - 1, j), c * Rational::from_integer(i.into()));
                }
                Axis::Y if j > 0 => {
                    out.insert((i, j - 1), c * Rational::from_integer(j.into()));
                }
                _ => {}
            }
        }
        Self { terms: out }
    }

    pub fn dx(&self) -> BiPoly {
        self.derive(Axis::X)
    }

    pub fn dy(&self) -> BiPoly {
        self.derive(Axis::Y)
    }

    pub fn scale(&self, k: &Rational) -> BiPoly {
        if k.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    pub fn pow(&self, k: u32) -> BiPoly {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let deg_x = self.terms.keys().map(|e| e.0).max().unwrap_or(0) as usize;
        let deg_y = self.terms.keys().map(|e| e.1).max().unwrap_or(0) as usize;
        let xp = powers(x, deg_x);
        let yp = powers(y, deg_y);
        self.terms.iter().fold(Rational::zero(), |acc, (&(i, j), c)| acc + c * &xp[i as usize] * &yp[j as usize])
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.to_f64_poly().eval(x, y)
    }

    pub fn to_f64_poly(&self) -> F64Poly {
        F64Poly {
            terms: self.terms.iter().map(|(&(i, j), c)| (i, j, to_f64(c))).collect(),
            max_x: self.terms.keys().map(|e| e.0).max().unwrap_or(0),
            max_y: self.terms.keys().map(|e| e.1).max().unwrap_or(0),
        }
    }

    /// Substitutes `x -> fx`, `y -> fy`.
    pub fn compose(&self, fx: &BiPoly, fy: &BiPoly) -> BiPoly {
        let deg_x = self.terms.keys().map(|e| e.0).max().unwrap_or(0) as usize;
        let deg_y = self.terms.keys().map(|e| e.1).max().unwrap_or(0) as usize;
        let xp = poly_powers(fx, deg_x);
        let yp = poly_powers(fy, deg_y);
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            let m = &xp[i as usize] * &yp[j as usize];
            out += m.scale(c);
        }
        out
    }

    /// `p(x + cx, y + cy)`: re-expands `p` around the point `(cx, cy)`.
    pub fn translate(&self, cx: &Rational, cy: &Rational) -> BiPoly {
        let fx = Self::x() + Self::constant(cx.clone());
        let fy = Self::y() + Self::constant(cy.clone());
        self.compose(&fx, &fy)
    }

    /// `p(c x - s y, s x + c y)` for a rotation with `c^2 + s^2 = 1`.
    pub fn rotate(&self, c: &Rational, s: &Rational) -> BiPoly {
        let fx = Self::x().scale(c) - Self::y().scale(s);
        let fy = Self::x().scale(s) + Self::y().scale(c);
        self.compose(&fx, &fy)
    }

    /// Largest absolute coefficient, as a float.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| to_f64(&c.abs())).fold(0.0, f64::max)
    }
}

fn powers(x: &Rational, n: usize) -> Vec<Rational> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(Rational::one());
    for k in 1..=n {
        let next = &v[k - 1] * x;
        v.push(next);
    }
    v
}

fn poly_powers(p: &BiPoly, n: usize) -> Vec<BiPoly> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(BiPoly::one());
    for k in 1..=n {
        let next = &v[k - 1] * p;
        v.push(next);
    }
    v
}

/// Float image of a [`BiPoly`] for fast repeated evaluation.
#[derive(Debug, Clone, Default)]
pub struct F64Poly {
    terms: Vec<(u32, u32, f64)>,
    max_x: u32,
    max_y: u32,
}

impl F64Poly {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        let mut xp = [1.0f64; 64];
        let mut yp = [1.0f64; 64];
        if self.max_x < 64 && self.max_y < 64 {
            for k in 1..=self.max_x as usize {
                xp[k] = xp[k - 1] * x;
            }
            for k in 1..=self.max_y as usize {
                yp[k] = yp[k - 1] * y;
            }
            self.terms.iter().map(|&(i, j, c)| c * xp[i as usize] * yp[j as usize]).sum()
        } else {
            self.terms.iter().map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
        }
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest degree first, then by descending power of x.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let (da, db) = (a.0 .0 + a.0 .1, b.0 .0 + b.0 .1);
            db.cmp(&da).then(b.0 .0.cmp(&a.0 .0))
        });
        for (k, (&(i, j), c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let is_unit = mag.is_one();
            if !is_unit || (i == 0 && j == 0) {
                write!(f, "{mag}")?;
                if i + j > 0 {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for (var, e) in [("x", i), ("y", j)] {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "{var}")?;
                } else {
                    write!(f, "{var}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl AddAssign<&BiPoly> for BiPoly {
    fn add_assign(&mut self, rhs: &BiPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl AddAssign<BiPoly> for BiPoly {
    fn add_assign(&mut self, rhs: BiPoly) {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl SubAssign<&BiPoly> for BiPoly {
    fn sub_assign(&mut self, rhs: &BiPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl Add<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

impl Neg for BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<BiPoly> for BiPoly {
            type Output = BiPoly;
            fn $m(self, rhs: BiPoly) -> BiPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BiPoly> for BiPoly {
            type Output = BiPoly;
            fn $m(self, rhs: &BiPoly) -> BiPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<BiPoly> for &BiPoly {
            type Output = BiPoly;
            fn $m(self, rhs: BiPoly) -> BiPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
