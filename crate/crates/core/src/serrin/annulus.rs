//! Grid reproduction of the band solution `u = 1 - t^2`: boundary data and
//! the closed forms of `Lap u` and `H(u)` in band coordinates, evaluated
//! through the Cartesian jet (so the normal-map inversion is exercised).

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::AnnulusField;
use crate::fields::ScalarField;
use crate::operators::jacobian_residual;

#[derive(Debug, Clone, Serialize)]
pub struct AnnulusGridReport {
    pub grid: (usize, usize),
    /// `max |u|` on `t = +-1`.
    pub boundary_abs_u: f64,
    /// `max ||Du| - 2|` on `t = +-1`.
    pub boundary_grad_deviation: f64,
    /// `max |Lap u - (-2 + 2 t kappa / (1 - t kappa))|`.
    pub laplacian_residual: f64,
    /// `max |H(u) + 4 t kappa / (1 - t kappa)|`.
    pub hessian_det_residual: f64,
    /// `max |H(u) + 2 Lap u + 4|`.
    pub elimination_residual: f64,
    /// `max |J[Lap u, H(u)]|`.
    pub jacobian_residual: f64,
    pub failed_evaluations: usize,
}

impl AnnulusGridReport {
    /// Tolerances: `1e-10` on `u`, `1e-8` on the gradient and closed forms,
    /// `1e-6` on the Jacobian.
    pub fn passes(&self) -> bool {
        self.failed_evaluations == 0
            && self.boundary_abs_u <= 1e-10
            && self.boundary_grad_deviation <= 1e-8
            && self.laplacian_residual <= 1e-8
            && self.hessian_det_residual <= 1e-8
            && self.elimination_residual <= 1e-8
            && self.jacobian_residual <= 1e-6
    }
}

/// `ns` arc-length samples times `nt` offsets in `[-1, 1]`.
pub fn annulus_grid_check(field: &AnnulusField, ns: usize, nt: usize) -> AnnulusGridReport {
    let band = &field.domain;
    let len = band.curve.length();
    let nt = nt.max(2);
    let rows: Vec<Option<[f64; 6]>> = (0..ns * nt)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nt, k % nt);
            let s = len * i as f64 / ns as f64;
            let t = -1.0 + 2.0 * j as f64 / (nt - 1) as f64;
            let kappa = band.curve.frame(s).curvature;
            let (p, d) = band.normal_map(s, t);
            let jet = field.jet3(p).ok()?;
            let g = t * kappa / d;
            let (lap, det) = (jet.hess.laplacian(), jet.hess.det());
            let edge = j == 0 || j == nt - 1;
            Some([
                if edge { jet.value.abs() } else { 0.0 },
                if edge { (jet.grad_norm() - 2.0).abs() } else { 0.0 },
                (lap - (-2.0 + 2.0 * g)).abs(),
                (det + 4.0 * g).abs(),
                (det + 2.0 * lap + 4.0).abs(),
                jacobian_residual(&jet),
            ])
        })
        .collect();
    let mut m = [0.0f64; 6];
    let mut failed = 0;
    for r in rows {
        match r {
            Some(r) => {
                for (a, b) in m.iter_mut().zip(r) {
                    *a = a.max(b);
                }
            }
            None => failed += 1,
        }
    }
    AnnulusGridReport {
        grid: (ns, nt),
        boundary_abs_u: m[0],
        boundary_grad_deviation: m[1],
        laplacian_residual: m[2],
        hessian_det_residual: m[3],
        elimination_residual: m[4],
        jacobian_residual: m[5],
        failed_evaluations: failed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{FourierCurve, NormalMapDomain};

    #[test]
    fn ellipse_band_reproduces() {
        let band = NormalMapDomain::new(FourierCurve::ellipse(4.0, 8.0).unwrap(), 1.0).unwrap();
        let rep = annulus_grid_check(&AnnulusField::new(band).unwrap(), 32, 9);
        assert!(rep.passes(), "{rep:?}");
    }
}
