//! Command-line driver. Every subcommand prints one pretty JSON document.
//! Exit codes: 0 for consistent or true results, 2 for contradictions and
//! violations, 1 for usage and input errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::rational::{format_rational, parse_rational, to_f64};
use crate::algebra::{int, Rational};
use crate::classify::{classify_point, ClassifyError, UPointClass};
use crate::domains::{AnnulusField, Domain, FourierCurve, NormalMapDomain};
use crate::fields::{load_field, Field, RadialLinearField, RadialProfile};
use crate::identities::{run_suite, SuiteConfig};
use crate::linefield::{dump_field_csv, index_report, ph_audit, AuditConfig};
use crate::serrin::{
    annulus_grid_check, check_overdetermined, check_pde_consistency, field_polynomial, nodal_line_check,
    radial_ode_residual, radial_spread, theorem1_audit, AuditOptions, Conclusion, OdeFamily, OverdeterminedSpec,
    SerrinError, MIN_BOUNDARY_SAMPLES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Samples per axis for `--dump-field`.
const DUMP_GRID: usize = 128;

#[derive(Debug, Parser)]
#[command(name = "hessfield", version, about = "Hessian line fields and overdetermined-problem audits")]
struct Cli {
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a point where the Hessian is a multiple of the identity.
    Classify {
        #[arg(long)]
        field: PathBuf,
        /// `X,Y`; rationals such as `1/3` are kept exact.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Line-field index about a point, interior or on a straight boundary.
    Index {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        radius: f64,
        /// Use the half-disk on the left of `--tangent`.
        #[arg(long, requires = "tangent")]
        boundary: bool,
        #[arg(long, allow_hyphen_values = true)]
        tangent: Option<String>,
    },
    /// Full audit of the overdetermined problem on a domain.
    Audit {
        #[arg(long)]
        field: PathBuf,
        #[command(flatten)]
        domain: DomainArg,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long)]
        dump_field: Option<PathBuf>,
    },
    /// The band solution `u = 1 - t^2` around a closed curve.
    Annulus {
        #[arg(long)]
        curve: PathBuf,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        dump_field: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        s_samples: usize,
        #[arg(long, default_value_t = 17)]
        t_samples: usize,
    },
    /// Sum of disjoint smooth bumps with `c = 0`.
    Bump {
        #[arg(long)]
        disks: PathBuf,
        #[command(flatten)]
        domain: DomainArg,
    },
    /// Randomised exact identity suite.
    Identities {
        #[arg(long, default_value_t = 6)]
        max_n: u32,
        #[arg(long, default_value_t = 10)]
        max_m: u32,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
    },
    /// Boundary ODE for the radial families.
    Ode {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// `t=..` (linear) or `t1=..,t2=..` (quadratic).
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        c0: String,
        /// Boundary constant; defaults to the one the family forces.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        rho_min: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        rho_max: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Debug, Args)]
struct DomainArg {
    /// `disk:R`, `disk:X,Y,R`, `rect:X0,Y0,X1,Y1`, `curve:FILE` or `band:FILE`.
    #[arg(long = "domain")]
    spec: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Linear,
    Quadratic,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. JSON goes to `out` unless `--out` is given; diagnostics go to
/// `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let msg = e.to_string();
                    let line = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
                    let _ = writeln!(err, "{}", line.trim());
                    EXIT_USAGE
                }
            };
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e:#}");
        return EXIT_USAGE;
    }
    match execute(&cli.command) {
        Ok((value, code)) => match emit(&value, cli.out.as_deref(), out) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(err, "error: {e:#}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {}", one_line(&format!("{e:#}")));
            EXIT_USAGE
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `HESSFIELD_THREADS` caps the global rayon pool. A pool that is already
/// running is left alone.
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("HESSFIELD_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| anyhow!("HESSFIELD_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        bail!("HESSFIELD_THREADS must be a positive integer, got `{v}`");
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit(value: &Value, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_field(path: &Path) -> Result<Field> {
    load_field(&read(path)?).with_context(|| format!("field {}", path.display()))
}

fn read_curve(path: &Path) -> Result<FourierCurve> {
    FourierCurve::from_json(&read(path)?).with_context(|| format!("curve {}", path.display()))
}

fn floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow!("{what} must be {n} comma-separated numbers, got `{s}`"))?;
    if v.len() != n || !v.iter().all(|x| x.is_finite()) {
        bail!("{what} must be {n} comma-separated numbers, got `{s}`");
    }
    Ok(v)
}

fn rational_pair(s: &str) -> Result<(Rational, Rational)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        bail!("point must be X,Y, got `{s}`");
    }
    Ok((parse_rational(parts[0])?, parse_rational(parts[1])?))
}

/// Band of halfwidth 1, rescaling the curve when its curvature is too large.
fn band(curve: FourierCurve) -> Result<NormalMapDomain> {
    match NormalMapDomain::new(curve.clone(), 1.0) {
        Ok(b) => Ok(b),
        Err(_) => NormalMapDomain::rescaled(curve).context("building the normal-map band"),
    }
}

fn parse_domain(spec: &str) -> Result<Domain> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| anyhow!("domain must look like kind:args, got `{spec}`"))?;
    let d = match kind {
        "disk" => {
            let n = rest.split(',').count();
            let v = floats(rest, if n == 1 { 1 } else { 3 }, "disk")?;
            match v.as_slice() {
                [r] => Domain::disk([0.0, 0.0], *r)?,
                [x, y, r] => Domain::disk([*x, *y], *r)?,
                _ => unreachable!(),
            }
        }
        "rect" => {
            let v = floats(rest, 4, "rect")?;
            Domain::rect([v[0], v[1]], [v[2], v[3]])?
        }
        "curve" => Domain::curve(read_curve(Path::new(rest))?),
        "band" => Domain::Band(Arc::new(band(read_curve(Path::new(rest))?)?)),
        _ => bail!("unknown domain kind `{kind}` (disk, rect, curve, band)"),
    };
    Ok(d)
}

fn dump(field: &Field, domain: &Domain, path: &Path) -> Result<usize> {
    let mut buf = Vec::new();
    let rows = dump_field_csv(field, domain, DUMP_GRID, &mut buf)?;
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    Ok(rows)
}

fn execute(cmd: &Command) -> Result<(Value, i32)> {
    match cmd {
        Command::Classify { field, point } => classify(field, point),
        Command::Index { field, center, radius, boundary, tangent } => {
            index(field, center, *radius, *boundary, tangent.as_deref())
        }
        Command::Audit { field, domain, c, dump_field } => audit(field, &domain.spec, *c, dump_field.as_deref()),
        Command::Annulus { curve, report, dump_field, s_samples, t_samples } => {
            annulus(curve, report.as_deref(), dump_field.as_deref(), *s_samples, *t_samples)
        }
        Command::Bump { disks, domain } => bump(disks, &domain.spec),
        Command::Identities { max_n, max_m, trials, seed, max_degree } => {
            let cfg =
                SuiteConfig { max_n: *max_n, max_m: *max_m, trials: *trials, seed: *seed, max_degree: *max_degree };
            let rep = run_suite(&cfg);
            let code = if rep.all_true { EXIT_OK } else { EXIT_VIOLATION };
            Ok((serde_json::to_value(rep)?, code))
        }
        Command::Ode { family, params, c0, c, rho_min, rho_max, samples } => {
            ode(*family, params, c0, *c, [*rho_min, *rho_max], *samples)
        }
    }
}

fn classify(path: &Path, point: &str) -> Result<(Value, i32)> {
    let field = read_field(path)?;
    let u =
        field_polynomial(&field).ok_or_else(|| anyhow!("classify needs a polynomial field, got {}", field.kind()))?;
    let (x, y) = rational_pair(point)?;
    match classify_point(&u, &x, &y) {
        Ok(rep) => {
            let code = if matches!(rep.class, UPointClass::LemmaViolation { .. }) { EXIT_VIOLATION } else { EXIT_OK };
            Ok((rep.to_json(), code))
        }
        Err(ClassifyError::NotInU(..)) => Ok((json!({"point": [to_f64(&x), to_f64(&y)], "in_U": false}), EXIT_OK)),
    }
}

fn index(path: &Path, center: &str, radius: f64, boundary: bool, tangent: Option<&str>) -> Result<(Value, i32)> {
    let field = read_field(path)?;
    let c = floats(center, 2, "center")?;
    if !(radius > 0.0 && radius.is_finite()) {
        bail!("radius must be positive, got {radius}");
    }
    let normal = match (boundary, tangent) {
        (true, Some(t)) => {
            let t = floats(t, 2, "tangent")?;
            if t[0] == 0.0 && t[1] == 0.0 {
                bail!("tangent must be nonzero");
            }
            Some([-t[1], t[0]])
        }
        (true, None) => bail!("--boundary needs --tangent"),
        (false, _) => None,
    };
    let rep = index_report(&field, [c[0], c[1]], normal, radius)?;
    Ok((serde_json::to_value(rep)?, EXIT_OK))
}

/// Verdict JSON and exit code; hard violations are reported, not raised.
fn audit_value(spec: &OverdeterminedSpec, opts: &AuditOptions) -> Result<(Value, i32)> {
    match theorem1_audit(spec, opts) {
        Ok(v) => {
            let code = if matches!(v.conclusion, Conclusion::Contradiction { .. }) { EXIT_VIOLATION } else { EXIT_OK };
            Ok((serde_json::to_value(v)?, code))
        }
        Err(e) => {
            let report = match &e {
                SerrinError::PdeInconsistent(r) => serde_json::to_value(r)?,
                SerrinError::BoundaryViolation(r) => serde_json::to_value(r)?,
                SerrinError::ViolationAt { point, reason } => json!({"point": point, "reason": reason}),
                _ => return Err(e.into()),
            };
            Ok((json!({"verdict": "violation", "error": e.to_string(), "report": report}), EXIT_VIOLATION))
        }
    }
}

fn audit(path: &Path, domain: &str, c: f64, dump_path: Option<&Path>) -> Result<(Value, i32)> {
    let field = read_field(path)?;
    let domain = parse_domain(domain)?;
    if let Some(p) = dump_path {
        dump(&field, &domain, p)?;
    }
    let spec = OverdeterminedSpec::new(field, domain, c)?;
    audit_value(&spec, &AuditOptions::default())
}

fn annulus(
    curve: &Path,
    report: Option<&Path>,
    dump_path: Option<&Path>,
    ns: usize,
    nt: usize,
) -> Result<(Value, i32)> {
    let band = band(read_curve(curve)?)?;
    let af = Arc::new(AnnulusField::new(band)?);
    let domain = Domain::Band(Arc::new(af.domain.clone()));
    let field = Field::Annulus(af.clone());
    if let Some(p) = dump_path {
        dump(&field, &domain, p)?;
    }
    let grid = annulus_grid_check(&af, ns, nt);
    let ph = ph_audit(&field, &domain, &AuditConfig::default());
    let spec = OverdeterminedSpec::new(field, domain, 2.0)?;
    let (verdict, _) = audit_value(&spec, &AuditOptions::default())?;
    let ok = grid.passes() && verdict["conclusion"]["verdict"] == "hypothesis_not_met";
    let value = json!({
        "band": {
            "halfwidth": af.domain.halfwidth,
            "scale": af.domain.scale,
            "max_abs_curvature": af.domain.max_abs_curvature,
            "length": af.domain.curve.length(),
            "injectivity": af.domain.certificate,
        },
        "grid": grid,
        "grid_passes": grid.passes(),
        "ph": ph,
        "audit": verdict,
    });
    if let Some(p) = report {
        emit(&value, Some(p), &mut std::io::sink())?;
    }
    Ok((value, if ok { EXIT_OK } else { EXIT_VIOLATION }))
}

/// The disks file is either a list of `{"center", "radius"}` objects or an
/// object with `disks` and an optional `margin`.
fn bump(path: &Path, domain: &str) -> Result<(Value, i32)> {
    let mut v: Value = serde_json::from_str(&read(path)?).with_context(|| format!("disks {}", path.display()))?;
    if v.is_array() {
        v = json!({ "disks": v });
    }
    match v.as_object_mut() {
        Some(obj) => {
            obj.insert("type".into(), "bump".into());
        }
        None => bail!("disks {} must be a list or an object", path.display()),
    }
    let field = load_field(&v.to_string()).with_context(|| format!("disks {}", path.display()))?;
    let domain = parse_domain(domain)?;
    let spec = OverdeterminedSpec::new(field, domain, 0.0)?;
    let boundary = check_overdetermined(&spec, MIN_BOUNDARY_SAMPLES);
    let pde = check_pde_consistency(&spec.field, &spec.domain, 64);
    let [x0, y0, x1, y1] = spec.domain.bbox();
    let center = [(x0 + x1) / 2.0, (y0 + y1) / 2.0];
    let half = (x1 - x0).hypot(y1 - y0) / 2.0;
    let radii: Vec<f64> = (1..=8).map(|k| half * k as f64 / 9.0).collect();
    let spread = radial_spread(&spec.field, center, &radii, 256);
    let (verdict, _) = audit_value(&spec, &AuditOptions::default())?;
    let ok = boundary.passes(1e-10) && pde.passes(1e-8);
    let value = json!({
        "boundary": boundary,
        "boundary_passes": boundary.passes(1e-10),
        "pde": pde,
        "pde_passes": pde.passes(1e-8),
        "radial_spread": spread,
        "radial": spread <= 1e-12,
        "audit": verdict,
    });
    Ok((value, if ok { EXIT_OK } else { EXIT_VIOLATION }))
}

fn params(s: &str) -> Result<Vec<(String, Rational)>> {
    s.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("params must be name=value pairs, got `{kv}`"))?;
            Ok((k.trim().to_string(), parse_rational(v)?))
        })
        .collect()
}

fn ode(family: FamilyArg, p: &str, c0: &str, c: Option<f64>, range: [f64; 2], samples: usize) -> Result<(Value, i32)> {
    if !(range[0] > 0.0 && range[1] > range[0] && range[1].is_finite()) {
        bail!("need 0 < rho-min < rho-max");
    }
    let c0 = parse_rational(c0)?;
    let p = params(p)?;
    let get = |name: &str| {
        p.iter().find(|(k, _)| k == name).map(|(_, v)| v.clone()).ok_or_else(|| anyhow!("missing parameter `{name}`"))
    };
    let allowed: &[&str] = match family {
        FamilyArg::Linear => &["t"],
        FamilyArg::Quadratic => &["t1", "t2"],
    };
    if let Some((k, _)) = p.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        bail!("unknown parameter `{k}` for this family");
    }
    let fam = match family {
        FamilyArg::Linear => OdeFamily::Linear { t: get("t")? },
        FamilyArg::Quadratic => OdeFamily::Quadratic { t1: get("t1")?, t2: get("t2")? },
    };
    let rep = match radial_ode_residual(&fam, &c0, c, range, samples) {
        Ok(r) => r,
        Err(e @ SerrinError::InvalidConstant(_)) => {
            return Ok((json!({"verdict": "violation", "error": e.to_string()}), EXIT_VIOLATION));
        }
        Err(e) => return Err(e.into()),
    };
    let ok = rep.max_residual <= 1e-12;
    let mut value = json!({ "c0": format_rational(&c0), "ode": rep, "solves": ok });
    if let OdeFamily::Linear { t } = &fam {
        let f = RadialLinearField::new(int(1), int(0), c0.clone(), RadialProfile::Linear { t: t.clone() });
        value["nodal"] = serde_json::to_value(nodal_line_check(&f))?;
    }
    Ok((value, if ok { EXIT_OK } else { EXIT_VIOLATION }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("hessfield").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_are_one_line() {
        let (code, out, err) = call(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert_eq!(err.trim().lines().count(), 1, "{err}");
        let (code, _, err) = call(&["classify", "--field", "/nonexistent.json", "--point", "0,0"]);
        assert_eq!(code, EXIT_USAGE);
        assert_eq!(err.trim().lines().count(), 1, "{err}");
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("identities"));
    }

    #[test]
    fn domain_strings() {
        assert!(matches!(parse_domain("disk:2").unwrap(), Domain::Disk { radius, .. } if radius == 2.0));
        assert!(matches!(parse_domain("disk:1,2,3").unwrap(), Domain::Disk { center: [1.0, 2.0], .. }));
        assert!(matches!(parse_domain("rect:0,0,1,2").unwrap(), Domain::Rect { .. }));
        for bad in ["disk", "disk:1,2", "rect:0,0,1", "square:1", "disk:-1"] {
            assert!(parse_domain(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ode_params() {
        let (code, out, _) = call(&["ode", "--family", "linear", "--params", "t=3/5", "--c0", "7/3"]);
        assert_eq!(code, EXIT_OK, "{out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ode"]["required_c2"], "16/25");
        assert_eq!(v["nodal"]["bounds_jordan_domain"], false);
        let (code, _, _) = call(&["ode", "--family", "quadratic", "--params", "t=1"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = call(&["ode", "--family", "linear", "--params", "t=3/5", "--c", "1"]);
        assert_eq!(code, EXIT_VIOLATION);
    }
}
