//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criterion 7 includes the reference closed form of
//! `{a rho^{n+2}, c rho^{m+2}}`. That form holds for `n = 2` only; for `n = 4, 6` it is refuted
//! by exact arithmetic (see `bracket_n4_hand_example` below for one
//! instance). The line prints FAIL. The process exits nonzero if any other
//! criterion fails, or if criterion 7 fails in any way beyond that
//! known mismatch.

use std::sync::Arc;
use std::time::{Duration, Instant};

use hessfield::algebra::{int, rat, re_im_zeta_pow, BiPoly, Rational, TrigPoly};
use hessfield::classify::{classify_point, UPointClass};
use hessfield::cli;
use hessfield::domains::{AnnulusField, Domain, FourierCurve, NormalMapDomain};
use hessfield::fields::{BumpDisk, BumpField, Field};
use hessfield::identities::{radial_bracket_rhs, reference_bracket_rhs, run_suite, Cell, SuiteConfig, SuiteReport};
use hessfield::linefield::{boundary_index, ph_audit, tangency_on_domain, winding_index, AuditConfig, PHVerdict};
use hessfield::serrin::{
    annulus_grid_check, check_overdetermined, check_pde_consistency, radial_ode_residual, radial_spread,
    theorem1_audit, AuditOptions, Conclusion, OdeFamily, OverdeterminedSpec,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn base() -> BiPoly {
    BiPoly::rho2().scale(&rat(1, 2))
}

fn c1_field(n: u32) -> BiPoly {
    base() + re_im_zeta_pow(n + 2).0
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e <= limit, format!("{:.2}s", e.as_secs_f64()))
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let o = int(0);
    let mut bad = vec![];
    for n in 1..=6u32 {
        let r = classify_point(&c1_field(n), &o, &o);
        if !matches!(&r, Ok(p) if matches!(p.class, UPointClass::C1 { n: k, .. } if k == n) && p.mu2 == Some(int(0))) {
            bad.push(format!("C1 n={n}"));
        }
        let u = base() + BiPoly::monomial(n + 2, 0, int(1));
        let r = classify_point(&u, &o, &o);
        if !matches!(&r, Ok(p) if matches!(p.class, UPointClass::C2 { n: k, .. } if k == n) && p.mu2 == Some(int(1))) {
            bad.push(format!("C2 n={n}"));
        }
    }
    for k in 1..=3u32 {
        let u = base() + BiPoly::rho2().pow(k + 1);
        let want = rat(i64::from(k + 1), i64::from(k));
        let r = classify_point(&u, &o, &o);
        if !matches!(&r, Ok(p) if matches!(p.class, UPointClass::C3 { k: j, .. } if j == k) && p.mu2 == Some(&want * &want))
        {
            bad.push(format!("C3 k={k}"));
        }
    }
    let (fast, el) = within(t, Duration::from_secs(1));
    outcome(bad.is_empty() && fast, format!("15 points classified, mu^2 exact; {el}; mismatches {bad:?}"))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let mut bad = vec![];
    let mut worst: f64 = 0.0;
    for n in 1..=6u32 {
        let f = Field::poly(c1_field(n));
        for r in [0.05, 0.1, 0.2] {
            match winding_index(&f, [0.0, 0.0], r) {
                Ok((idx, w)) => {
                    worst = worst.max((w.raw - (-(n as f64))).abs());
                    if idx != rat(-i64::from(n), 2) {
                        bad.push(format!("n={n} r={r}: {idx}"));
                    }
                }
                Err(e) => bad.push(format!("n={n} r={r}: {e}")),
            }
        }
    }
    let (fast, el) = within(t, Duration::from_secs(5));
    outcome(
        bad.is_empty() && worst <= 1e-6 && fast,
        format!("index -n/2 for n=1..6 at 3 radii; max pre-snap error {worst:.1e}; {el}; {bad:?}"),
    )
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut bad = vec![];
    let mut worst: f64 = 0.0;
    for n in 1..=4u32 {
        let f = Field::poly(c1_field(n));
        for r in [0.05, 0.1, 0.2] {
            match boundary_index(&f, [0.0, 0.0], [0.0, 1.0], r) {
                Ok((idx, w)) => {
                    worst = worst.max((w.raw - (-(n as f64))).abs());
                    if idx != rat(-i64::from(n), 4) {
                        bad.push(format!("n={n} r={r}: {idx}"));
                    }
                }
                Err(e) => bad.push(format!("n={n} r={r}: {e}")),
            }
        }
    }
    let (fast, el) = within(t, Duration::from_secs(5));
    outcome(
        bad.is_empty() && worst <= 1e-6 && fast,
        format!("half-index -n/4 for n=1..4 on the x-axis; max pre-snap error {worst:.1e}; {el}; {bad:?}"),
    )
}

fn criterion_4() -> Outcome {
    let f = Field::poly(BiPoly::rho2().pow(2));
    let rep = ph_audit(&f, &Domain::disk([0.0, 0.0], 1.0).unwrap(), &AuditConfig::default());
    let one = rep.singularities.len() == 1
        && rep.singularities[0].index == int(1)
        && rep.singularities[0].point[0].hypot(rep.singularities[0].point[1]) < 1e-6;
    outcome(
        one && rep.expected == 1 && rep.index_sum == int(1) && rep.verdict == PHVerdict::Consistent,
        format!(
            "{} singularity, index sum {}, expected {}, verdict {:?}",
            rep.singularities.len(),
            rep.index_sum,
            rep.expected,
            rep.verdict
        ),
    )
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let curve = FourierCurve::ellipse(4.0, 8.0).unwrap();
    let band = match NormalMapDomain::new(curve, 1.0) {
        Ok(b) => b,
        Err(e) => return outcome(false, format!("band construction failed: {e}")),
    };
    let kmax = band.max_abs_curvature;
    let af = Arc::new(AnnulusField::new(band).unwrap());
    let grid = annulus_grid_check(&af, 128, 17);
    let domain = Domain::Band(Arc::new(af.domain.clone()));
    let spec = OverdeterminedSpec::new(Field::Annulus(af), domain, 2.0).unwrap();
    let verdict = theorem1_audit(&spec, &AuditOptions::default());
    let hyp = matches!(&verdict, Ok(v) if matches!(&v.conclusion, Conclusion::HypothesisNotMet { which } if which == "simply connected"));
    let (fast, el) = within(t, Duration::from_secs(30));
    outcome(
        grid.passes() && hyp && fast && (kmax - 0.5).abs() < 1e-9,
        format!(
            "max kappa {kmax:.12}; |u| {:.1e}, ||Du|-2| {:.1e}, Lap {:.1e}, H {:.1e}, H+2Lap+4 {:.1e}, J {:.1e}; simply-connected hypothesis flagged: {hyp}; {el}",
            grid.boundary_abs_u,
            grid.boundary_grad_deviation,
            grid.laplacian_residual,
            grid.hessian_det_residual,
            grid.elimination_residual,
            grid.jacobian_residual
        ),
    )
}

fn criterion_6() -> Outcome {
    let disks = vec![BumpDisk { center: [-1.2, 0.0], radius: 1.0 }, BumpDisk { center: [1.2, 0.0], radius: 1.0 }];
    let field = Field::Bump(BumpField::new(disks, 0.0).unwrap());
    let domain = Domain::rect([-3.0, -2.0], [3.0, 2.0]).unwrap();
    let spec = OverdeterminedSpec::new(field, domain, 0.0).unwrap();
    let b = check_overdetermined(&spec, 1024);
    let p = check_pde_consistency(&spec.field, &spec.domain, 96);
    let spread = radial_spread(&spec.field, [0.0, 0.0], &[0.6, 1.2, 1.8], 256);
    outcome(
        b.passes(1e-10) && p.passes(1e-8) && spread > 0.5,
        format!(
            "boundary |u| {:.1e}, |Du| {:.1e}; J residual {:.1e}; radial spread about the centre {spread:.2}",
            b.max_abs_u, b.max_grad_deviation, p.residual
        ),
    )
}

fn cells_ok(cells: &[Cell]) -> bool {
    cells.iter().all(Cell::ok) && cells.iter().all(|c| c.trials >= 50)
}

fn criterion_7(rep: &SuiteReport, elapsed: Duration) -> (Outcome, bool) {
    let polar = cells_ok(&rep.polar_laplacian);
    let bracket = cells_ok(&rep.bracket_formula);
    let case3 = cells_ok(&rep.case3_identity);
    let lowest = cells_ok(&rep.lowest_term_expansion);
    let failing: Vec<(u32, u32)> =
        rep.bracket_formula.iter().filter(|c| !c.ok()).map(|c| (c.n.unwrap_or(0), c.m.unwrap_or(0))).collect();
    let fast = elapsed <= Duration::from_secs(60);
    let pass = polar && bracket && case3 && lowest && fast;
    // Known mismatch: every n = 4, 6 cell of the reference bracket form
    // fails, every n = 2 cell passes, the derived form passes everywhere and
    // every other sweep passes.
    let known = polar
        && case3
        && lowest
        && fast
        && cells_ok(&rep.bracket_radial_form)
        && rep.bracket_formula.iter().all(|c| c.ok() == (c.n == Some(2)));
    let detail = format!(
        "polar Laplacian {polar}, bracket (reference form) {bracket}, case-3 identity {case3}, lowest-term expansion {lowest}; \
         derived bracket form {}; reference form fails at (n, m) = {failing:?}; {:.2}s",
        cells_ok(&rep.bracket_radial_form),
        elapsed.as_secs_f64()
    );
    (outcome(pass, detail), known)
}

fn criterion_8(rep: &SuiteReport) -> Outcome {
    let positive = rep.c3_ode.iter().all(|r| r.positive);
    let no_periodic = rep.c3_ode.iter().all(|r| r.periodicity.as_ref().is_some_and(|p| p.only_constants()));
    let coincidences: Vec<String> = rep
        .c3_ode
        .iter()
        .filter_map(|r| {
            let p = r.periodicity.as_ref()?;
            (!p.sign_flipped_coincidences.is_empty())
                .then(|| format!("(n={}, m={}, j={:?})", r.n, r.m, p.sign_flipped_coincidences))
        })
        .collect();
    let covered = rep.c3_ode.len() == (2..=6).step_by(2).map(|n: u32| 10 - n).sum::<u32>() as usize;
    outcome(
        positive && no_periodic && covered,
        format!(
            "{} (n, m) pairs: alpha1, alpha2 > 0: {positive}; no nonconstant periodic solution (c = cos/sin j theta substituted): {no_periodic}; \
             j^2 alpha1 = alpha2 holds at {coincidences:?}, but the periodic modes need j^2 alpha1 = -alpha2",
            rep.c3_ode.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let range = [0.1, 10.0];
    let mut worst: f64 = 0.0;
    let mut bad = vec![];
    let cases = [
        (OdeFamily::Linear { t: rat(3, 5) }, rat(7, 3)),
        (OdeFamily::Linear { t: rat(-1, 2) }, int(0)),
        (OdeFamily::Linear { t: int(0) }, rat(-2, 1)),
        (OdeFamily::Quadratic { t1: int(1), t2: int(2) }, int(-3)),
        (OdeFamily::Quadratic { t1: rat(1, 4), t2: rat(-1, 2) }, int(1)),
        (OdeFamily::Quadratic { t1: rat(-1, 3), t2: int(1) }, int(1)),
    ];
    for (fam, c0) in &cases {
        match radial_ode_residual(fam, c0, None, range, 1000) {
            Ok(r) => worst = worst.max(r.max_residual),
            Err(e) => bad.push(e.to_string()),
        }
    }
    // u = c1 + x + c2 rho^2 on the disk about (-1/(2 c2), 0).
    let mut disks = vec![];
    for (c1, c2) in [(rat(-3, 4), int(1)), (int(0), rat(1, 3)), (rat(5, 8), rat(-1, 2))] {
        let u = BiPoly::constant(c1.clone()) + BiPoly::x() + BiPoly::rho2().scale(&c2);
        let q0 = -1.0 / (2.0 * to_f(&c2));
        // u = c2 |p - q0|^2 + c1 - 1/(4 c2): radius^2 = (1/(4 c2) - c1) / c2.
        let r2 = (1.0 / (4.0 * to_f(&c2)) - to_f(&c1)) / to_f(&c2);
        let radius = r2.sqrt();
        let c = 2.0 * to_f(&c2).abs() * radius;
        let spec = OverdeterminedSpec::new(Field::poly(u), Domain::disk([q0, 0.0], radius).unwrap(), c).unwrap();
        let ok = matches!(
            theorem1_audit(&spec, &AuditOptions::default()),
            Ok(v) if matches!(v.conclusion, Conclusion::RadialDisk { center, .. } if (center[0] - q0).abs() < 1e-12 && center[1].abs() < 1e-12)
        );
        disks.push(ok);
    }
    outcome(
        bad.is_empty() && worst <= 1e-12 && disks.iter().all(|d| *d),
        format!(
            "ODE max residual {worst:.1e} over {} family members; radial disk at q0 recognised: {disks:?}; {bad:?}",
            cases.len()
        ),
    )
}

fn to_f(r: &Rational) -> f64 {
    hessfield::algebra::rational::to_f64(r)
}

fn cli_run(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let code = cli::run(std::iter::once("hessfield").chain(args.iter().copied()), &mut out, &mut std::io::sink());
    (code, out)
}

fn criterion_10() -> Outcome {
    let neg = BiPoly::monomial(4, 0, int(1)) + BiPoly::monomial(0, 3, int(1));
    let unit = Domain::disk([0.0, 0.0], 1.0).unwrap();
    let pde = check_pde_consistency(&Field::poly(neg), &unit, 32);
    let pde_fails = pde.exact && pde.identically_zero == Some(false) && pde.jacobian.is_some();
    let tan = tangency_on_domain(&Field::poly(BiPoly::monomial(1, 1, int(1))), &unit, 256);
    let tan_fails = !tan.passes(1e-8);

    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    let good = write("good.json", r#"{"terms":[[0,0,"-3/4"],[1,0,"1"],[2,0,"1"],[0,2,"1"]]}"#);
    let bad = write("bad.json", r#"{"terms":[[4,0,"1"],[0,3,"1"]]}"#);
    let runs = |f: &str, dom: &str, c: &str| {
        let a = cli_run(&["audit", "--field", f, "--domain", dom, "--c", c]);
        let b = cli_run(&["audit", "--field", f, "--domain", dom, "--c", c]);
        (a.0, a == b)
    };
    let (good_code, good_same) = runs(&good, "disk:-0.5,0,1", "2");
    let (bad_code, bad_same) = runs(&bad, "disk:1", "1");
    outcome(
        pde_fails && tan_fails && good_code == 0 && bad_code == 2 && good_same && bad_same,
        format!(
            "x^4+y^3 exact Jacobian nonzero: {pde_fails}; xy tangency residual {:.2} on the unit circle; exit codes {good_code}/{bad_code}, repeat runs byte-identical: {}",
            tan.max_residual,
            good_same && bad_same
        ),
    )
}

/// `{rho^6, cos(2 theta) rho^8}` by hand: 456 rho^10 cos 2theta, whereas the
/// reference closed form gives 96 rho^10 cos 2theta.
fn bracket_n4_hand_example() -> bool {
    let c = TrigPoly::cos_k(2, int(1));
    let derived = radial_bracket_rhs(4, 6, &int(1), &c).unwrap();
    let reference = reference_bracket_rhs(4, 6, &int(1), &c).unwrap();
    // rho^10 cos 2theta = rho^8 (x^2 - y^2)
    let re = re_im_zeta_pow(2).0;
    let base = BiPoly::rho2().pow(4);
    derived == (&base * &re).scale(&int(456)) && reference == (&base * &re).scale(&int(96))
}

fn main() {
    let mut results: Vec<(u32, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
        (5, criterion_5()),
        (6, criterion_6()),
    ];
    let t = Instant::now();
    let suite = run_suite(&SuiteConfig { max_n: 6, max_m: 10, trials: 50, seed: 0, max_degree: 8 });
    let elapsed = t.elapsed();
    let (c7, c7_known) = criterion_7(&suite, elapsed);
    results.push((7, c7));
    results.push((8, criterion_8(&suite)));
    results.push((9, criterion_9()));
    results.push((10, criterion_10()));

    let mut unexpected = 0;
    for (k, o) in &results {
        println!("criterion {k:>2}: {} - {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass && !(*k == 7 && c7_known) {
            unexpected += 1;
        }
    }
    let hand = bracket_n4_hand_example();
    println!("bracket hand example n=4, m=6, c=cos 2theta: derived 456, reference 96: {hand}");
    let passed = results.iter().filter(|(_, o)| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if !hand || unexpected > 0 {
        println!("acceptance: {unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
