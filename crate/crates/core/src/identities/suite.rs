//! Randomised sweeps over the identities. Each cell has its own generator
//! seeded from the run seed and the cell index, so results do not depend on
//! scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{BiPoly, Rational, TrigPoly};

use super::{
    admissible_harmonics, derive_c3_ode, periodicity_check, verify_bracket_formula, verify_bracket_radial_form,
    verify_case3_identity, verify_five_term_split, verify_lowest_term_expansion, verify_polar_laplacian, C3Ode,
    PeriodicityCheck,
};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    /// Largest `n` for the bracket and ODE sweeps (even values only) and the
    /// `x^{n+2}` identity.
    pub max_n: u32,
    pub max_m: u32,
    pub trials: usize,
    pub seed: u64,
    /// Largest total degree of the random fields in the expansion sweeps.
    pub max_degree: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { max_n: 6, max_m: 10, trials: 50, seed: 0, max_degree: 8 }
    }
}

/// One `(n, m)` entry of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub trials: usize,
    pub passed: usize,
    pub errors: Vec<String>,
}

impl Cell {
    pub fn ok(&self) -> bool {
        self.passed == self.trials && self.errors.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeRow {
    pub ode: Option<C3Ode>,
    pub n: u32,
    pub m: u32,
    pub positive: bool,
    pub periodicity: Option<PeriodicityCheck>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub polar_laplacian: Vec<Cell>,
    /// Against the reference closed form.
    pub bracket_formula: Vec<Cell>,
    /// Against the form derived from the eigenvalues of a radial Hessian.
    pub bracket_radial_form: Vec<Cell>,
    pub c3_ode: Vec<OdeRow>,
    pub case3_identity: Vec<Cell>,
    pub lowest_term_expansion: Vec<Cell>,
    pub five_term_split: Vec<Cell>,
    pub all_true: bool,
}

fn cell_rng(seed: u64, family: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (family << 56) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Small random rational: numerator in `[-9, 9]`, denominator in `[1, 6]`.
fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=6).into())
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let q = small_rational(rng);
        if q != Rational::from_integer(0.into()) {
            return q;
        }
    }
}

/// Random angular part compatible with degree `d` (harmonics `<= d` of the
/// same parity), with at least one nonconstant harmonic.
fn random_angular(rng: &mut ChaCha8Rng, d: u32) -> TrigPoly {
    loop {
        let mut c = if d.is_multiple_of(2) { TrigPoly::constant(small_rational(rng)) } else { TrigPoly::zero() };
        for j in admissible_harmonics(d) {
            if rng.gen_bool(0.6) {
                c = &c + &TrigPoly::cos_k(j, small_rational(rng));
            }
            if rng.gen_bool(0.6) {
                c = &c + &TrigPoly::sin_k(j, small_rational(rng));
            }
        }
        if !c.is_constant() {
            return c;
        }
    }
}

fn random_homogeneous(rng: &mut ChaCha8Rng, d: u32) -> BiPoly {
    loop {
        let mut p = BiPoly::zero();
        for i in 0..=d {
            if rng.gen_bool(0.7) {
                p.add_term((i, d - i), small_rational(rng));
            }
        }
        if !p.is_zero() {
            return p;
        }
    }
}

/// `u = c0 + a x + b y + lambda/2 rho^2 + (random terms of degree 3..=max)`.
fn random_decomposable(rng: &mut ChaCha8Rng, max_degree: u32) -> BiPoly {
    let half_lambda = small_rational(rng);
    let mut u = BiPoly::constant(small_rational(rng))
        + BiPoly::x().scale(&small_rational(rng))
        + BiPoly::y().scale(&small_rational(rng))
        + BiPoly::rho2().scale(&half_lambda);
    let start = rng.gen_range(3..=max_degree.max(3));
    for d in start..=max_degree.max(3) {
        if d == start || rng.gen_bool(0.5) {
            u += random_homogeneous(rng, d);
        }
    }
    u
}

fn random_radial(rng: &mut ChaCha8Rng, max_degree: u32) -> BiPoly {
    let mut h = BiPoly::zero();
    for k in 1..=max_degree / 2 {
        h += BiPoly::rho2().pow(k).scale(&small_rational(rng));
    }
    h
}

fn run_cell<F>(n: Option<u32>, m: Option<u32>, trials: usize, mut rng: ChaCha8Rng, mut f: F) -> Cell
where
    F: FnMut(&mut ChaCha8Rng) -> Result<bool, String>,
{
    let mut cell = Cell { n, m, trials, passed: 0, errors: vec![] };
    for _ in 0..trials {
        match f(&mut rng) {
            Ok(true) => cell.passed += 1,
            Ok(false) => {}
            Err(e) => {
                if cell.errors.len() < 4 {
                    cell.errors.push(e);
                }
            }
        }
    }
    cell
}

fn sweep<F>(cells: Vec<(Option<u32>, Option<u32>)>, cfg: &SuiteConfig, family: u64, f: F) -> Vec<Cell>
where
    F: Fn(Option<u32>, Option<u32>, &mut ChaCha8Rng) -> Result<bool, String> + Sync,
{
    cells
        .into_par_iter()
        .enumerate()
        .map(|(i, (n, m))| run_cell(n, m, cfg.trials, cell_rng(cfg.seed, family, i as u64), |rng| f(n, m, rng)))
        .collect()
}

fn even_n(cfg: &SuiteConfig) -> Vec<u32> {
    (2..=cfg.max_n).step_by(2).collect()
}

/// Runs every sweep. Output order is fixed by `(n, m)`.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let polar_cells = (0..=cfg.max_m).map(|m| (None, Some(m))).collect();
    let polar_laplacian = sweep(polar_cells, cfg, 1, |_, m, rng| {
        let m = m.expect("m");
        let c = random_angular(rng, m + 2);
        verify_polar_laplacian(m, &c).map_err(|e| e.to_string())
    });

    let bracket_cells: Vec<_> =
        even_n(cfg).into_iter().flat_map(|n| (n + 1..=cfg.max_m).map(move |m| (Some(n), Some(m)))).collect();
    let bracket_formula = sweep(bracket_cells.clone(), cfg, 2, |n, m, rng| {
        let (n, m) = (n.expect("n"), m.expect("m"));
        let a = nonzero_rational(rng);
        verify_bracket_formula(n, m, &a, &random_angular(rng, m + 2)).map_err(|e| e.to_string())
    });
    let bracket_radial_form = sweep(bracket_cells.clone(), cfg, 3, |n, m, rng| {
        let (n, m) = (n.expect("n"), m.expect("m"));
        let a = nonzero_rational(rng);
        verify_bracket_radial_form(n, m, &a, &random_angular(rng, m + 2)).map_err(|e| e.to_string())
    });

    let c3_ode = bracket_cells
        .par_iter()
        .map(|&(n, m)| {
            let (n, m) = (n.expect("n"), m.expect("m"));
            match derive_c3_ode(n, m, &Rational::from_integer(1.into())) {
                Ok(ode) => {
                    let zero = Rational::from_integer(0.into());
                    let positive = ode.alpha1 > zero && ode.alpha2 > zero;
                    let periodicity = periodicity_check(&ode, (m + 2) as usize);
                    OdeRow { ode: Some(ode), n, m, positive, periodicity: Some(periodicity), error: None }
                }
                Err(e) => OdeRow { ode: None, n, m, positive: false, periodicity: None, error: Some(e.to_string()) },
            }
        })
        .collect::<Vec<_>>();

    let case3_cells =
        (1..=cfg.max_n.clamp(1, 5)).flat_map(|n| (n + 2..=cfg.max_m.min(9)).map(move |m| (Some(n), Some(m)))).collect();
    let case3_identity = sweep(case3_cells, cfg, 4, |n, m, rng| {
        let (n, m) = (n.expect("n"), m.expect("m"));
        let a = nonzero_rational(rng);
        Ok(verify_case3_identity(n, &a, &random_homogeneous(rng, m + 2)))
    });

    let lowest_term_expansion = sweep(vec![(None, None)], cfg, 5, |_, _, rng| {
        let u = random_decomposable(rng, cfg.max_degree);
        verify_lowest_term_expansion(&u).map_err(|e| e.to_string())
    });
    let five_term_split = sweep(vec![(None, None)], cfg, 6, |_, _, rng| {
        let h = random_radial(rng, cfg.max_degree);
        let d = rng.gen_range(3..=cfg.max_degree.max(3));
        let psi = random_homogeneous(rng, d) + random_homogeneous(rng, cfg.max_degree.max(3));
        Ok(verify_five_term_split(&h, &psi))
    });

    let cells_ok = |v: &[Cell]| v.iter().all(Cell::ok);
    let all_true = cells_ok(&polar_laplacian)
        && cells_ok(&bracket_formula)
        && cells_ok(&case3_identity)
        && cells_ok(&lowest_term_expansion)
        && cells_ok(&five_term_split)
        && c3_ode.iter().all(|r| r.positive && r.periodicity.as_ref().is_some_and(PeriodicityCheck::only_constants));
    SuiteReport {
        config: cfg.clone(),
        polar_laplacian,
        bracket_formula,
        bracket_radial_form,
        c3_ode,
        case3_identity,
        lowest_term_expansion,
        five_term_split,
        all_true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_deterministic() {
        let cfg = SuiteConfig { max_n: 2, max_m: 4, trials: 3, seed: 7, max_degree: 5 };
        let a = serde_json::to_string(&run_suite(&cfg)).unwrap();
        let b = serde_json::to_string(&run_suite(&cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_suite_passes_where_expected() {
        let cfg = SuiteConfig { max_n: 2, max_m: 6, trials: 5, seed: 1, max_degree: 6 };
        let rep = run_suite(&cfg);
        assert!(rep.all_true, "{}", serde_json::to_string_pretty(&rep).unwrap());
        assert!(rep.bracket_radial_form.iter().all(Cell::ok));
    }

    #[test]
    fn random_angular_parity() {
        let mut rng = cell_rng(3, 0, 0);
        for d in 2..10 {
            let c = random_angular(&mut rng, d);
            assert!(c.harmonics().all(|k| k as u32 <= d && (d - k as u32).is_multiple_of(2)));
        }
    }
}
