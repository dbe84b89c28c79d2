//! Tubular band `Psi(s, t) = gamma(s) + t nu(s)`, `|t| <= halfwidth`, around a
//! closed curve, and the annulus field `u(Psi(s, t)) = 1 - t^2` on it.

use std::collections::HashMap;
use std::f64::consts::TAU;

use serde::Serialize;

use crate::fields::{FieldError, Jet3, ScalarField};
use crate::operators::HessianSample;

use super::curve::FourierCurve;
use super::DomainError;

const SEED_S: usize = 256;
const SEED_T: usize = 33;
const NEWTON_ITERS: usize = 30;
const MIN_JACOBIAN: f64 = 1e-6;

/// Result of the sampled overlap check on the band image.
#[derive(Debug, Clone, Serialize)]
pub struct InjectivityCertificate {
    pub passed: bool,
    /// Always true: the certificate samples the band, it is not a proof.
    pub sampled: bool,
    pub convex: bool,
    pub grid: (usize, usize),
    pub collision_radius: f64,
    pub collisions: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalMapDomain {
    pub curve: FourierCurve,
    pub halfwidth: f64,
    pub max_abs_curvature: f64,
    /// Factor the input curve was multiplied by (1 when not rescaled).
    pub scale: f64,
    pub certificate: InjectivityCertificate,
    diameter: f64,
    #[serde(skip)]
    seeds: SeedGrid,
}

/// Image of `Psi` on the seed grid, hashed by position.
#[derive(Debug, Clone, Default)]
struct SeedGrid {
    cell: f64,
    // (tau, t, x, y)
    points: Vec<(f64, f64, f64, f64)>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SeedGrid {
    fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for q in &self.points {
            lo = [lo[0].min(q.2), lo[1].min(q.3)];
            hi = [hi[0].max(q.2), hi[1].max(q.3)];
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    fn key(&self, x: f64, y: f64) -> (i64, i64) {
        ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64)
    }

    /// Indices of the `k` seeds nearest to `p`, searching outward ring by ring.
    fn nearest(&self, p: [f64; 2], k: usize) -> Vec<usize> {
        let (cx, cy) = self.key(p[0], p[1]);
        let mut found: Vec<(f64, usize)> = Vec::new();
        for ring in 0..64i64 {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    if let Some(ids) = self.buckets.get(&(cx + dx, cy + dy)) {
                        for &i in ids {
                            let q = &self.points[i];
                            found.push(((q.2 - p[0]).hypot(q.3 - p[1]), i));
                        }
                    }
                }
            }
            // Anything beyond this ring is at least `ring * cell` away.
            if found.len() >= k {
                found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                if found[k - 1].0 <= ring as f64 * self.cell {
                    break;
                }
            }
        }
        found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        found.into_iter().take(k).map(|(_, i)| i).collect()
    }
}

impl NormalMapDomain {
    /// Band of the given halfwidth; fails unless `max |kappa| * halfwidth < 1`
    /// and the sampled injectivity certificate passes.
    pub fn new(curve: FourierCurve, halfwidth: f64) -> Result<Self, DomainError> {
        Self::build(curve, halfwidth, 1.0)
    }

    /// Rescales the curve by a power of two so that `max |kappa| <= 1/2`,
    /// then builds the band of halfwidth 1. The factor is reported as `scale`.
    pub fn rescaled(curve: FourierCurve) -> Result<Self, DomainError> {
        let kmax = curve.max_abs_curvature(4096);
        let mut scale = 1.0;
        while kmax / scale > 0.5 {
            scale *= 2.0;
        }
        let c = if scale == 1.0 { curve } else { curve.scaled(scale)? };
        Self::build(c, 1.0, scale)
    }

    fn build(curve: FourierCurve, halfwidth: f64, scale: f64) -> Result<Self, DomainError> {
        if !(halfwidth > 0.0 && halfwidth.is_finite()) {
            return Err(DomainError::InvalidCurve(format!("halfwidth {halfwidth} must be positive")));
        }
        let kmax = curve.max_abs_curvature(4096);
        if kmax * halfwidth >= 1.0 {
            return Err(DomainError::CurvatureTooLarge { max_abs_curvature: kmax, halfwidth });
        }
        let seeds = seed_grid(&curve, halfwidth);
        let certificate = certify(&curve, halfwidth, kmax);
        if !certificate.passed {
            return Err(DomainError::NotInjective(certificate.collisions));
        }
        let diameter = seeds.diameter();
        Ok(Self { curve, halfwidth, max_abs_curvature: kmax, scale, certificate, diameter, seeds })
    }

    /// `Psi(s, t)` together with the Jacobian factor `1 - t kappa(s)`.
    pub fn normal_map(&self, s: f64, t: f64) -> ([f64; 2], f64) {
        let f = self.curve.frame(s);
        ([f.point[0] + t * f.normal[0], f.point[1] + t * f.normal[1]], 1.0 - t * f.curvature)
    }

    fn map_tau(&self, tau: f64, t: f64) -> [f64; 2] {
        let f = self.curve.frame_tau(tau);
        [f.point[0] + t * f.normal[0], f.point[1] + t * f.normal[1]]
    }

    /// Diagonal of the band's bounding box.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// `(s, t)` with `Psi(s, t) = p`.
    pub fn invert(&self, p: [f64; 2]) -> Result<(f64, f64), DomainError> {
        self.invert_tau(p).map(|(tau, t)| (self.curve.arc_length_at(tau), t))
    }

    /// Like [`Self::invert`] but returns the curve parameter `tau` instead of
    /// arc length.
    pub fn invert_tau(&self, p: [f64; 2]) -> Result<(f64, f64), DomainError> {
        let tol = 1e-12 * self.diameter;
        let slack = 1e-9 * self.halfwidth;
        let mut ill: Option<f64> = None;
        for i in self.seeds.nearest(p, 4) {
            let (mut tau, mut t, _, _) = self.seeds.points[i];
            for _ in 0..NEWTON_ITERS {
                let f = self.curve.frame_tau(tau);
                let speed = self.curve.speed(tau);
                let q = [f.point[0] + t * f.normal[0], f.point[1] + t * f.normal[1]];
                let r = [p[0] - q[0], p[1] - q[1]];
                let jac = 1.0 - t * f.curvature;
                if jac.abs() < MIN_JACOBIAN {
                    ill = Some(jac);
                    break;
                }
                let err = r[0].hypot(r[1]);
                if err <= tol {
                    if t.abs() <= self.halfwidth + slack {
                        return Ok((tau.rem_euclid(TAU), t));
                    }
                    break;
                }
                let dtau = (r[0] * f.tangent[0] + r[1] * f.tangent[1]) / (speed * jac);
                let dt = r[0] * f.normal[0] + r[1] * f.normal[1];
                // Keep steps local so Newton stays on the seed's sheet.
                let cap = 0.25 * TAU / SEED_S as f64 * 8.0;
                tau += dtau.clamp(-cap, cap);
                t += dt.clamp(-self.halfwidth, self.halfwidth);
            }
        }
        match ill {
            Some(jacobian) => Err(DomainError::IllConditioned { point: p, jacobian }),
            None => Err(DomainError::NotInBand(p[0], p[1])),
        }
    }

    /// Bounding box of the band image `[xmin, ymin, xmax, ymax]`.
    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for k in 0..1024 {
            let tau = TAU * k as f64 / 1024.0;
            for t in [-self.halfwidth, self.halfwidth] {
                let q = self.map_tau(tau, t);
                b = [b[0].min(q[0]), b[1].min(q[1]), b[2].max(q[0]), b[3].max(q[1])];
            }
        }
        b
    }
}

fn seed_grid(curve: &FourierCurve, hw: f64) -> SeedGrid {
    let mut points = Vec::with_capacity(SEED_S * SEED_T);
    for i in 0..SEED_S {
        let tau = TAU * i as f64 / SEED_S as f64;
        let f = curve.frame_tau(tau);
        for j in 0..SEED_T {
            let t = -hw + 2.0 * hw * j as f64 / (SEED_T - 1) as f64;
            points.push((tau, t, f.point[0] + t * f.normal[0], f.point[1] + t * f.normal[1]));
        }
    }
    let cell = (curve.length() / SEED_S as f64).max(2.0 * hw / (SEED_T - 1) as f64);
    let mut g = SeedGrid { cell, points, buckets: HashMap::new() };
    for (i, q) in g.points.iter().enumerate() {
        let k = g.key(q.2, q.3);
        g.buckets.entry(k).or_default().push(i);
    }
    g
}

/// Samples the band on a fine grid and looks for images of distant grid
/// cells that land within a collision radius of each other.
fn certify(curve: &FourierCurve, hw: f64, kmax: f64) -> InjectivityCertificate {
    let (ns, nt) = (1024usize, 33usize);
    let ds = curve.length() / ns as f64;
    let dt = 2.0 * hw / (nt - 1) as f64;
    let r = 0.25 * (ds * (1.0 - kmax * hw)).min(dt);
    let mut pts = Vec::with_capacity(ns * nt);
    for i in 0..ns {
        let f = curve.frame(ds * i as f64);
        for j in 0..nt {
            let t = -hw + dt * j as f64;
            pts.push((i, j, f.point[0] + t * f.normal[0], f.point[1] + t * f.normal[1]));
        }
    }
    let key = |x: f64, y: f64| ((x / r).floor() as i64, (y / r).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, p) in pts.iter().enumerate() {
        buckets.entry(key(p.2, p.3)).or_default().push(k);
    }
    let mut collisions = 0;
    for (k, p) in pts.iter().enumerate() {
        let (cx, cy) = key(p.2, p.3);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(ids) = buckets.get(&(cx + dx, cy + dy)) else { continue };
                for &m in ids {
                    if m <= k {
                        continue;
                    }
                    let q = &pts[m];
                    let di = p.0.abs_diff(q.0).min(ns - p.0.abs_diff(q.0));
                    let dj = p.1.abs_diff(q.1);
                    if (di > 2 || dj > 2) && (p.2 - q.2).hypot(p.3 - q.3) < r {
                        collisions += 1;
                    }
                }
            }
        }
    }
    let signs: Vec<f64> = (0..ns).map(|i| curve.frame(ds * i as f64).curvature).collect();
    let convex = signs.iter().all(|&k| k >= 0.0) || signs.iter().all(|&k| k <= 0.0);
    InjectivityCertificate {
        passed: collisions == 0,
        sampled: true,
        convex,
        grid: (ns, nt),
        collision_radius: r,
        collisions,
    }
}

/// `u(Psi(s, t)) = 1 - t^2` on a band of halfwidth 1.
#[derive(Debug, Clone, Serialize)]
pub struct AnnulusField {
    pub domain: NormalMapDomain,
}

/// Band coordinates with the local frame, used by jets and reports.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandCoords {
    pub s: f64,
    pub t: f64,
    pub curvature: f64,
    pub jacobian: f64,
}

impl AnnulusField {
    pub fn new(domain: NormalMapDomain) -> Result<Self, DomainError> {
        if domain.halfwidth != 1.0 {
            return Err(DomainError::InvalidCurve(format!(
                "annulus field needs halfwidth 1, got {}",
                domain.halfwidth
            )));
        }
        Ok(Self { domain })
    }

    pub fn coords(&self, p: [f64; 2]) -> Result<BandCoords, DomainError> {
        let (s, t) = self.domain.invert(p)?;
        let f = self.domain.curve.frame(s);
        Ok(BandCoords { s, t, curvature: f.curvature, jacobian: 1.0 - t * f.curvature })
    }

    /// Jet at band coordinates `(s, t)` directly, skipping inversion.
    pub fn jet_at_coords(&self, s: f64, t: f64) -> Result<Jet3, FieldError> {
        self.jet_at_tau(self.domain.curve.tau_at(s), t)
    }

    fn jet_at_tau(&self, tau: f64, t: f64) -> Result<Jet3, FieldError> {
        let f = self.domain.curve.frame_tau(tau);
        let d = 1.0 - t * f.curvature;
        if d.abs() < MIN_JACOBIAN {
            return Err(FieldError::NearSingular(d));
        }
        let (tg, nu) = (f.tangent, f.normal);
        let g = t * f.curvature / d;
        let c3 = 2.0 * f.curvature / (d * d);
        let c4 = 2.0 * t * f.curvature_rate / (d * d * d);
        let hess = |i: usize, j: usize| -2.0 * nu[i] * nu[j] + 2.0 * g * tg[i] * tg[j];
        let third = |i: usize, j: usize, k: usize| {
            c3 * (tg[i] * tg[j] * nu[k] + tg[i] * nu[j] * tg[k] + nu[i] * tg[j] * tg[k]) + c4 * tg[i] * tg[j] * tg[k]
        };
        Ok(Jet3 {
            value: 1.0 - t * t,
            grad: [-2.0 * t * nu[0], -2.0 * t * nu[1]],
            hess: HessianSample::new(hess(0, 0), hess(0, 1), hess(1, 1)),
            third: [third(0, 0, 0), third(0, 0, 1), third(0, 1, 1), third(1, 1, 1)],
        })
    }
}

impl ScalarField for AnnulusField {
    fn jet3(&self, p: [f64; 2]) -> Result<Jet3, FieldError> {
        let (tau, t) = self.domain.invert_tau(p).map_err(|e| match e {
            DomainError::IllConditioned { jacobian, .. } => FieldError::NearSingular(jacobian),
            _ => FieldError::NotInBand(p[0], p[1]),
        })?;
        self.jet_at_tau(tau, t)
    }
}
