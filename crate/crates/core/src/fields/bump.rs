use serde::Serialize;

use crate::operators::HessianSample;

use super::{FieldError, Jet3, ScalarField};

/// One disk `|p - center| < radius` carrying `exp(-1/(radius^2 - r^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpDisk {
    pub center: [f64; 2],
    pub radius: f64,
}

impl BumpDisk {
    fn offset(&self, p: [f64; 2]) -> (f64, f64) {
        (p[0] - self.center[0], p[1] - self.center[1])
    }
}

/// Sum of disjoint bumps; identically zero off the disks.
#[derive(Debug, Clone, Serialize)]
pub struct BumpField {
    disks: Vec<BumpDisk>,
    /// Smallest gap between two disk boundaries.
    pub min_gap: f64,
}

impl BumpField {
    /// Requires positive radii and pairwise gaps strictly larger than `margin`.
    pub fn new(disks: Vec<BumpDisk>, margin: f64) -> Result<Self, FieldError> {
        if disks.is_empty() {
            return Err(FieldError::Invalid("bump field needs at least one disk".into()));
        }
        for d in &disks {
            if !(d.radius > 0.0 && d.radius.is_finite()) || !d.center.iter().all(|c| c.is_finite()) {
                return Err(FieldError::Invalid(format!("bad disk {d:?}")));
            }
        }
        let mut min_gap = f64::INFINITY;
        for (i, a) in disks.iter().enumerate() {
            for b in &disks[i + 1..] {
                let gap = (a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]) - a.radius - b.radius;
                if gap <= margin {
                    return Err(FieldError::Invalid(format!(
                        "disks at {:?} and {:?} are not separated by margin {margin}",
                        a.center, b.center
                    )));
                }
                min_gap = min_gap.min(gap);
            }
        }
        Ok(Self { disks, min_gap })
    }

    pub fn disks(&self) -> &[BumpDisk] {
        &self.disks
    }
}

/// `g(s) = exp(-1/(radius^2 - s))` and its first three derivatives in `s`.
pub fn bump_profile_derivs(s: f64, radius: f64) -> Result<[f64; 4], FieldError> {
    let q = radius * radius - s;
    if q <= 0.0 {
        return Err(FieldError::OutsideSupport { r2: s, radius });
    }
    let g = (-1.0 / q).exp();
    if g == 0.0 {
        return Ok([0.0; 4]);
    }
    let p1 = -1.0 / (q * q);
    let p2 = -2.0 / (q * q * q);
    let p3 = -6.0 / (q * q * q * q);
    Ok([g, p1 * g, (p2 + p1 * p1) * g, (p3 + 3.0 * p1 * p2 + p1 * p1 * p1) * g])
}

impl ScalarField for BumpField {
    fn jet3(&self, p: [f64; 2]) -> Result<Jet3, FieldError> {
        for d in &self.disks {
            let (x, y) = d.offset(p);
            let s = x * x + y * y;
            if s >= d.radius * d.radius {
                continue;
            }
            let [g0, g1, g2, g3] = bump_profile_derivs(s, d.radius)?;
            return Ok(Jet3 {
                value: g0,
                grad: [2.0 * x * g1, 2.0 * y * g1],
                hess: HessianSample::new(4.0 * x * x * g2 + 2.0 * g1, 4.0 * x * y * g2, 4.0 * y * y * g2 + 2.0 * g1),
                third: [
                    8.0 * x * x * x * g3 + 12.0 * x * g2,
                    8.0 * x * x * y * g3 + 4.0 * y * g2,
                    8.0 * x * y * y * g3 + 4.0 * x * g2,
                    8.0 * y * y * y * g3 + 12.0 * y * g2,
                ],
            });
        }
        Ok(Jet3::zero())
    }

    fn is_analytic(&self) -> bool {
        false
    }
}
