//! Locating the degenerate set and the Poincaré–Hopf index audit.

use std::io::Write;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::rational::format_rational;
use crate::algebra::Rational;
use crate::domains::Domain;
use crate::fields::ScalarField;

use super::{index_report, IndexReport};

/// Numeric knobs of the singularity scan and index audit.
#[derive(Debug, Clone, Serialize)]
pub struct AuditConfig {
    /// Grid points per side of the bounding box scan.
    pub grid: usize,
    /// Candidates must satisfy `|V| <= candidate_fraction * max |V|`.
    pub candidate_fraction: f64,
    pub newton_iters: usize,
    /// Accept a Newton limit when `|V| <= accept_rel * max |D^2 u|`.
    pub accept_rel: f64,
    /// Merge radius, relative to the domain diameter.
    pub cluster_rel: f64,
    /// More distinct points than this means the degenerate set is not isolated.
    pub max_singularities: usize,
    /// Points within this distance (relative to diameter) of the boundary
    /// get a boundary index.
    pub boundary_rel: f64,
    /// Largest index radius, relative to the diameter.
    pub radius_rel: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            grid: 256,
            candidate_fraction: 0.25,
            newton_iters: 200,
            accept_rel: 1e-9,
            cluster_rel: 1e-6,
            max_singularities: 64,
            boundary_rel: 1e-6,
            radius_rel: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularityScan {
    pub points: Vec<[f64; 2]>,
    /// Grid cells evaluated inside the domain.
    pub cells: usize,
    pub max_hessian: f64,
    pub max_v: f64,
    /// Set when the scan found too many points to be isolated.
    pub non_isolated: Option<String>,
}

fn v_of(field: &(impl ScalarField + ?Sized), p: [f64; 2]) -> Option<([f64; 2], [[f64; 2]; 2], f64)> {
    let j = field.jet3(p).ok()?;
    Some((j.hess.double_angle(), j.double_angle_jacobian(), j.hess.norm()))
}

/// Damped Gauss–Newton on `V = 0` from `p`.
fn polish(field: &(impl ScalarField + ?Sized), mut p: [f64; 2], iters: usize) -> Option<([f64; 2], f64)> {
    let (mut v, mut jm, _) = v_of(field, p)?;
    for _ in 0..iters {
        let vn = v[0].hypot(v[1]);
        if vn == 0.0 {
            break;
        }
        // (J^T J + mu I) step = -J^T V
        let jtj = [
            [jm[0][0] * jm[0][0] + jm[1][0] * jm[1][0], jm[0][0] * jm[0][1] + jm[1][0] * jm[1][1]],
            [jm[0][1] * jm[0][0] + jm[1][1] * jm[1][0], jm[0][1] * jm[0][1] + jm[1][1] * jm[1][1]],
        ];
        let jtv = [jm[0][0] * v[0] + jm[1][0] * v[1], jm[0][1] * v[0] + jm[1][1] * v[1]];
        let mu = 1e-12 * (jtj[0][0] + jtj[1][1]) + f64::MIN_POSITIVE;
        let a = [[jtj[0][0] + mu, jtj[0][1]], [jtj[1][0], jtj[1][1] + mu]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step = [-(a[1][1] * jtv[0] - a[0][1] * jtv[1]) / det, -(-a[1][0] * jtv[0] + a[0][0] * jtv[1]) / det];
        // Halve until |V| decreases.
        let mut lam = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let q = [p[0] + lam * step[0], p[1] + lam * step[1]];
            if let Some((vq, jq, _)) = v_of(field, q) {
                if vq[0].hypot(vq[1]) < vn {
                    p = q;
                    v = vq;
                    jm = jq;
                    moved = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !moved || lam * step[0].hypot(step[1]) <= 1e-16 * (1.0 + p[0].hypot(p[1])) {
            break;
        }
    }
    Some((p, v[0].hypot(v[1])))
}

/// Grid scan of `|V|` over the domain followed by Newton polishing.
pub fn locate_singularities(
    field: &(impl ScalarField + ?Sized),
    domain: &Domain,
    cfg: &AuditConfig,
) -> SingularityScan {
    let [x0, y0, x1, y1] = domain.bbox();
    let n = cfg.grid.max(8);
    let at =
        |i: usize, j: usize| [x0 + (x1 - x0) * i as f64 / (n - 1) as f64, y0 + (y1 - y0) * j as f64 / (n - 1) as f64];
    let cells: Vec<Option<(f64, f64)>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let p = at(k % n, k / n);
            if !domain.contains(p) {
                return None;
            }
            let (v, _, h) = v_of(field, p)?;
            Some((v[0].hypot(v[1]), h))
        })
        .collect();
    let max_v = cells.iter().flatten().map(|c| c.0).fold(0.0, f64::max);
    let max_h = cells.iter().flatten().map(|c| c.1).fold(0.0, f64::max);
    let inside = cells.iter().flatten().count();
    let mut candidates = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let Some((v, _)) = cells[j * n + i] else { continue };
            if v > cfg.candidate_fraction * max_v {
                continue;
            }
            let mut is_min = true;
            'nb: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if (di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= n as i64 || jj >= n as i64 {
                        continue;
                    }
                    if let Some((w, _)) = cells[jj as usize * n + ii as usize] {
                        if w < v {
                            is_min = false;
                            break 'nb;
                        }
                    }
                }
            }
            if is_min {
                candidates.push(at(i, j));
            }
        }
    }
    let diam = (x1 - x0).hypot(y1 - y0);
    let accept = cfg.accept_rel * max_h.max(f64::MIN_POSITIVE);
    let polished: Vec<Option<[f64; 2]>> = candidates
        .par_iter()
        .map(|&c| {
            let (p, vn) = polish(field, c, cfg.newton_iters)?;
            let (_, dist) = domain.nearest_boundary(p);
            let near = dist <= cfg.boundary_rel * diam;
            (vn <= accept && (domain.contains(p) || near)).then_some(p)
        })
        .collect();
    let cluster = cfg.cluster_rel * diam;
    let mut points: Vec<[f64; 2]> = Vec::new();
    for p in polished.into_iter().flatten() {
        if !points.iter().any(|q| (q[0] - p[0]).hypot(q[1] - p[1]) <= cluster) {
            points.push(p);
        }
    }
    let non_isolated = (points.len() > cfg.max_singularities)
        .then(|| format!("{} distinct degenerate points found; the degenerate set is not isolated", points.len()));
    SingularityScan { points, cells: inside, max_hessian: max_h, max_v, non_isolated }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PHVerdict {
    Consistent,
    Contradiction,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct PHReport {
    pub singularities: Vec<IndexReport>,
    #[serde(serialize_with = "ser_rat")]
    pub index_sum: Rational,
    pub expected: i32,
    pub verdict: PHVerdict,
    pub notes: Vec<String>,
    /// Degenerate points whose index could not be computed.
    pub unresolved: Vec<[f64; 2]>,
}

fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Index sum over the degenerate points versus the Euler characteristic.
pub fn ph_audit(field: &(impl ScalarField + ?Sized), domain: &Domain, cfg: &AuditConfig) -> PHReport {
    let scan = locate_singularities(field, domain, cfg);
    let expected = domain.euler_characteristic();
    let mut notes = vec!["boundary half-index = (change of arg V along the inward semicircle) / (4 pi)".to_string()];
    if let Some(why) = &scan.non_isolated {
        notes.push(why.clone());
        return PHReport {
            singularities: vec![],
            index_sum: Rational::zero(),
            expected,
            verdict: PHVerdict::Inconclusive,
            notes,
            unresolved: scan.points,
        };
    }
    let [x0, y0, x1, y1] = domain.bbox();
    let diam = (x1 - x0).hypot(y1 - y0);
    let mut singularities = Vec::new();
    let mut unresolved = Vec::new();
    for (k, &p) in scan.points.iter().enumerate() {
        let (b, dist) = domain.nearest_boundary(p);
        let others = scan
            .points
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != k)
            .map(|(_, q)| (q[0] - p[0]).hypot(q[1] - p[1]))
            .fold(f64::INFINITY, f64::min);
        let on_boundary = dist <= cfg.boundary_rel * diam;
        let mut r = (cfg.radius_rel * diam).min(0.5 * others);
        if !on_boundary {
            r = r.min(0.5 * dist);
        }
        let res = if on_boundary {
            index_report(field, b.point, Some(b.inward_normal), r)
        } else {
            index_report(field, p, None, r)
        };
        match res {
            Ok(rep) => singularities.push(rep),
            Err(e) => {
                notes.push(format!("no index at ({:.6}, {:.6}): {e}", p[0], p[1]));
                unresolved.push(p);
            }
        }
    }
    let index_sum = singularities.iter().fold(Rational::zero(), |acc, s| acc + &s.index);
    let verdict = if !unresolved.is_empty() {
        PHVerdict::Inconclusive
    } else if index_sum == Rational::from_integer(expected.into()) {
        PHVerdict::Consistent
    } else {
        PHVerdict::Contradiction
    };
    PHReport { singularities, index_sum, expected, verdict, notes, unresolved }
}

/// Writes `x,y,u,ux,uy,uxx,uxy,uyy,discriminant` on an `n x n` grid over the
/// domain (points outside are skipped).
pub fn dump_field_csv<W: Write>(
    field: &(impl ScalarField + ?Sized),
    domain: &Domain,
    n: usize,
    out: &mut W,
) -> std::io::Result<usize> {
    writeln!(out, "x,y,u,ux,uy,uxx,uxy,uyy,discriminant")?;
    let [x0, y0, x1, y1] = domain.bbox();
    let n = n.max(2);
    let mut rows = 0;
    for j in 0..n {
        for i in 0..n {
            let p = [x0 + (x1 - x0) * i as f64 / (n - 1) as f64, y0 + (y1 - y0) * j as f64 / (n - 1) as f64];
            if !domain.contains(p) {
                continue;
            }
            let Ok(jet) = field.jet3(p) else { continue };
            let h = jet.hess;
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                p[0],
                p[1],
                jet.value,
                jet.grad[0],
                jet.grad[1],
                h.uxx,
                h.uxy,
                h.uyy,
                h.discriminant()
            )?;
            rows += 1;
        }
    }
    Ok(rows)
}
