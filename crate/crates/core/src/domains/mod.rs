//! Planar domains: disks, rectangles, regions bounded by Fourier curves and
//! tubular bands around them.

mod band;
mod curve;

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use band::{AnnulusField, BandCoords, InjectivityCertificate, NormalMapDomain};
pub use curve::{integrate, polygon_contains, CurveSpec, FourierCurve, FrameAt};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("max |kappa| = {max_abs_curvature} times halfwidth {halfwidth} is not below 1")]
    CurvatureTooLarge { max_abs_curvature: f64, halfwidth: f64 },
    #[error("sampled injectivity certificate failed with {0} collisions")]
    NotInjective(usize),
    #[error("point ({0}, {1}) is not in the band")]
    NotInBand(f64, f64),
    #[error("normal map is ill-conditioned at {point:?} (1 - t kappa = {jacobian:e})")]
    IllConditioned { point: [f64; 2], jacobian: f64 },
    #[error("invalid domain: {0}")]
    Invalid(String),
}

/// A boundary point with its unit tangent and the unit normal pointing into
/// the domain. The tangent is oriented so that the inward normal is on its left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample {
    pub point: [f64; 2],
    pub tangent: [f64; 2],
    pub inward_normal: [f64; 2],
}

impl BoundarySample {
    fn from_normal(point: [f64; 2], n: [f64; 2]) -> Self {
        Self { point, tangent: [n[1], -n[0]], inward_normal: n }
    }
}

/// Region enclosed by a closed curve.
#[derive(Debug, Clone)]
pub struct CurveDomain {
    pub curve: FourierCurve,
    pub counterclockwise: bool,
    polygon: Vec<[f64; 2]>,
}

impl CurveDomain {
    pub fn new(curve: FourierCurve) -> Self {
        let counterclockwise = curve.signed_area() > 0.0;
        let polygon = curve.polygon(2048);
        Self { curve, counterclockwise, polygon }
    }
}

#[derive(Debug, Clone)]
pub enum Domain {
    Disk { center: [f64; 2], radius: f64 },
    Rect { min: [f64; 2], max: [f64; 2] },
    Curve(Arc<CurveDomain>),
    Band(Arc<NormalMapDomain>),
}

impl Domain {
    pub fn disk(center: [f64; 2], radius: f64) -> Result<Self, DomainError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DomainError::Invalid(format!("disk radius {radius} must be positive")));
        }
        Ok(Domain::Disk { center, radius })
    }

    pub fn rect(min: [f64; 2], max: [f64; 2]) -> Result<Self, DomainError> {
        if !(min[0] < max[0] && min[1] < max[1]) {
            return Err(DomainError::Invalid(format!("empty rectangle {min:?}..{max:?}")));
        }
        Ok(Domain::Rect { min, max })
    }

    pub fn curve(curve: FourierCurve) -> Self {
        Domain::Curve(Arc::new(CurveDomain::new(curve)))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Domain::Disk { .. } => "disk",
            Domain::Rect { .. } => "rect",
            Domain::Curve(_) => "curve",
            Domain::Band(_) => "band",
        }
    }

    pub fn euler_characteristic(&self) -> i32 {
        match self {
            Domain::Band(_) => 0,
            _ => 1,
        }
    }

    pub fn is_simply_connected(&self) -> bool {
        self.euler_characteristic() == 1
    }

    /// Closed-domain membership (boundary included up to rounding).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            Domain::Disk { center, radius } => (p[0] - center[0]).hypot(p[1] - center[1]) <= *radius * (1.0 + 1e-12),
            Domain::Rect { min, max } => p[0] >= min[0] && p[0] <= max[0] && p[1] >= min[1] && p[1] <= max[1],
            Domain::Curve(c) => polygon_contains(&c.polygon, p),
            Domain::Band(b) => b.invert_tau(p).is_ok(),
        }
    }

    /// `[xmin, ymin, xmax, ymax]`.
    pub fn bbox(&self) -> [f64; 4] {
        match self {
            Domain::Disk { center, radius } => {
                [center[0] - radius, center[1] - radius, center[0] + radius, center[1] + radius]
            }
            Domain::Rect { min, max } => [min[0], min[1], max[0], max[1]],
            Domain::Curve(c) => {
                c.polygon.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, q| {
                    [b[0].min(q[0]), b[1].min(q[1]), b[2].max(q[0]), b[3].max(q[1])]
                })
            }
            Domain::Band(b) => b.bbox(),
        }
    }

    /// About `n` boundary samples (every component is sampled).
    pub fn boundary_samples(&self, n: usize) -> Vec<BoundarySample> {
        let n = n.max(4);
        match self {
            Domain::Disk { center, radius } => (0..n)
                .map(|k| {
                    let a = TAU * k as f64 / n as f64;
                    let (s, c) = a.sin_cos();
                    BoundarySample::from_normal([center[0] + radius * c, center[1] + radius * s], [-c, -s])
                })
                .collect(),
            Domain::Rect { min, max } => {
                let (w, h) = (max[0] - min[0], max[1] - min[1]);
                let per = 2.0 * (w + h);
                (0..n)
                    .map(|k| {
                        let d = per * (k as f64 + 0.5) / n as f64;
                        if d < w {
                            BoundarySample::from_normal([min[0] + d, min[1]], [0.0, 1.0])
                        } else if d < w + h {
                            BoundarySample::from_normal([max[0], min[1] + d - w], [-1.0, 0.0])
                        } else if d < 2.0 * w + h {
                            BoundarySample::from_normal([max[0] - (d - w - h), max[1]], [0.0, -1.0])
                        } else {
                            BoundarySample::from_normal([min[0], max[1] - (d - 2.0 * w - h)], [1.0, 0.0])
                        }
                    })
                    .collect()
            }
            Domain::Curve(c) => {
                let len = c.curve.length();
                let sign = if c.counterclockwise { 1.0 } else { -1.0 };
                (0..n)
                    .map(|k| {
                        let f = c.curve.frame(len * k as f64 / n as f64);
                        BoundarySample::from_normal(f.point, [sign * f.normal[0], sign * f.normal[1]])
                    })
                    .collect()
            }
            Domain::Band(b) => {
                let len = b.curve.length();
                let hw = b.halfwidth;
                let half = n.div_ceil(2);
                let mut out = Vec::with_capacity(2 * half);
                for k in 0..half {
                    let f = b.curve.frame(len * k as f64 / half as f64);
                    for side in [-1.0, 1.0] {
                        let p = [f.point[0] + side * hw * f.normal[0], f.point[1] + side * hw * f.normal[1]];
                        out.push(BoundarySample::from_normal(p, [-side * f.normal[0], -side * f.normal[1]]));
                    }
                }
                out
            }
        }
    }

    /// Closest boundary sample and its distance (sampled for curve domains).
    pub fn nearest_boundary(&self, p: [f64; 2]) -> (BoundarySample, f64) {
        match self {
            Domain::Disk { center, radius } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                let r = dx.hypot(dy);
                let (c, s) = if r > 0.0 { (dx / r, dy / r) } else { (1.0, 0.0) };
                let b = BoundarySample::from_normal([center[0] + radius * c, center[1] + radius * s], [-c, -s]);
                (b, (radius - r).abs())
            }
            _ => {
                let mut best: Option<(BoundarySample, f64)> = None;
                for b in self.boundary_samples(4096) {
                    let d = (b.point[0] - p[0]).hypot(b.point[1] - p[1]);
                    if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
                        best = Some((b, d));
                    }
                }
                best.expect("boundary has samples")
            }
        }
    }

    /// Image of the domain under `x -> x / t`.
    pub fn scaled_down(&self, t: f64) -> Result<Domain, DomainError> {
        if t == 0.0 || !t.is_finite() {
            return Err(DomainError::Invalid("scale must be finite and nonzero".into()));
        }
        Ok(match self {
            Domain::Disk { center, radius } => {
                Domain::Disk { center: [center[0] / t, center[1] / t], radius: radius / t.abs() }
            }
            Domain::Rect { min, max } => {
                let (a, b) = ([min[0] / t, min[1] / t], [max[0] / t, max[1] / t]);
                Domain::Rect { min: [a[0].min(b[0]), a[1].min(b[1])], max: [a[0].max(b[0]), a[1].max(b[1])] }
            }
            Domain::Curve(c) => Domain::curve(c.curve.scaled(1.0 / t)?),
            Domain::Band(b) => {
                let curve = b.curve.scaled(1.0 / t)?;
                Domain::Band(Arc::new(NormalMapDomain::new(curve, b.halfwidth / t.abs())?))
            }
        })
    }
}
