use crate::algebra::{BiPoly, F64Poly};
use crate::operators::HessianSample;

use super::{FieldError, Jet3, ScalarField};

/// A polynomial field. Derivative polynomials are differentiated exactly
/// once and then evaluated in floating point.
#[derive(Debug, Clone)]
pub struct PolyField {
    poly: BiPoly,
    // u, ux, uy, uxx, uxy, uyy, uxxx, uxxy, uxyy, uyyy
    evals: Box<[F64Poly; 10]>,
}

impl PolyField {
    pub fn new(poly: BiPoly) -> Self {
        let ux = poly.dx();
        let uy = poly.dy();
        let uxx = ux.dx();
        let uxy = ux.dy();
        let uyy = uy.dy();
        let parts = [
            poly.to_f64_poly(),
            ux.to_f64_poly(),
            uy.to_f64_poly(),
            uxx.to_f64_poly(),
            uxy.to_f64_poly(),
            uyy.to_f64_poly(),
            uxx.dx().to_f64_poly(),
            uxx.dy().to_f64_poly(),
            uxy.dy().to_f64_poly(),
            uyy.dy().to_f64_poly(),
        ];
        Self { poly, evals: Box::new(parts) }
    }

    pub fn poly(&self) -> &BiPoly {
        &self.poly
    }
}

impl ScalarField for PolyField {
    fn jet3(&self, p: [f64; 2]) -> Result<Jet3, FieldError> {
        let e = |k: usize| self.evals[k].eval(p[0], p[1]);
        Ok(Jet3 {
            value: e(0),
            grad: [e(1), e(2)],
            hess: HessianSample::new(e(3), e(4), e(5)),
            third: [e(6), e(7), e(8), e(9)],
        })
    }

    fn as_poly(&self) -> Option<&BiPoly> {
        Some(&self.poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use crate::fields::testutil::check_jet_consistency;

    #[test]
    fn x_cubed_jet() {
        let f = PolyField::new(BiPoly::x().pow(3));
        let j = f.jet3([1.0, 0.0]).unwrap();
        assert_eq!(j.value, 1.0);
        assert_eq!(j.grad, [3.0, 0.0]);
        assert_eq!(j.hess, HessianSample::new(6.0, 0.0, 0.0));
        assert_eq!(j.third, [6.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn jets_match_differences() {
        let p = BiPoly::x().pow(4) - (BiPoly::x() * BiPoly::y().pow(2)).scale(&int(3)) + BiPoly::y();
        let f = PolyField::new(p);
        for k in 0..20 {
            let q = [0.3 * (k as f64).sin(), 0.7 * (1.3 * k as f64).cos()];
            check_jet_consistency(&f, q, 1e-5, 1e-6);
        }
    }
}
