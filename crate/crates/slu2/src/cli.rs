//! Config-driven command dispatch and artifact emission.
//!
//! One JSON config file describes a job; the subcommand picks the
//! computation and the columns. Every command validates that exactly the
//! fields it consumes are present, so a config cannot silently carry
//! settings that do nothing. CSV artifacts are RFC 4180 with CRLF line
//! ends and 17 significant digits, byte-identical across runs of the
//! same config.

use crate::bc::BcSpec;
use crate::checks::{run_checks, CheckLevel, CheckReport};
use crate::fundsol::{fundamental, Potential, DEFAULT_TOL};
use crate::orbits::{
    critical_values, eigenvalue_bands, lambda_surface, level_set, verify_orbit_theorems,
    AdjointOrbit, OrbitError, OrbitRange,
};
use crate::spectrum::{eigenvalues, EigOptions, SpectrumSlice};
use crate::{bc, charcurve};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const CRLF: &str = "\r\n";

#[derive(Parser)]
#[command(
    name = "slu2",
    version,
    about = "Eigenvalues of Sturm-Liouville problems under U(2) boundary conditions"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Indexed eigenvalues of one boundary condition (CSV).
    Eigs(Job),
    /// Tabulate the degenerate-condition curve over a lambda window (CSV).
    Curve(Job),
    /// Eigenvalue sheets over an orbit coordinate grid (CSV).
    OrbitScan(Job),
    /// Band endpoints and critical points per index (CSV + verification JSON).
    OrbitRange(Job),
    /// Conditions on an orbit sharing one eigenvalue (JSON).
    Levelset(Job),
    /// Eigenvalues along the diagonal circle of separated conditions (CSV).
    DiagScan(Job),
    /// Randomized invariant suites against the configured potential.
    Check(Job),
}

#[derive(Args)]
struct Job {
    /// JSON config file.
    config: PathBuf,
    /// Integration tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Highest eigenvalue index override.
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Lambda window override as `lo:hi`.
    #[arg(long)]
    window: Option<String>,
    /// Output path override.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Potential description in a config file. The inline kinds mirror the
/// library's own serialization; `sampled_csv` defers to a two-column
/// `x,q` file.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialSpec {
    Zero,
    Constant(f64),
    Polynomial(Vec<f64>),
    Sampled { xs: Vec<f64>, qs: Vec<f64> },
    SampledCsv(PathBuf),
}

impl PotentialSpec {
    pub fn resolve(&self) -> Result<Potential, String> {
        match self {
            PotentialSpec::Zero => Ok(Potential::Zero),
            PotentialSpec::Constant(c) => Ok(Potential::Constant(*c)),
            PotentialSpec::Polynomial(c) => Ok(Potential::Polynomial(c.clone())),
            PotentialSpec::Sampled { xs, qs } => {
                Potential::sampled(xs.clone(), qs.clone()).map_err(|e| e.to_string())
            }
            PotentialSpec::SampledCsv(path) => Potential::from_csv_path(path)
                .map_err(|e| format!("potential file {}: {e}", path.display())),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: Option<String>,
}

/// One experiment. Commands consume different subsets of the fields and
/// reject configs carrying any field outside their subset.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub potential: Option<PotentialSpec>,
    pub bc: Option<BcSpec>,
    pub orbit: Option<AdjointOrbit>,
    pub n_max: Option<usize>,
    pub window: Option<[f64; 2]>,
    pub tol: Option<f64>,
    pub grid: Option<Vec<usize>>,
    pub kappa: Option<f64>,
    pub seed: Option<u64>,
    pub level: Option<CheckLevel>,
    pub output: Option<OutputSpec>,
}

impl JobConfig {
    fn present_fields(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.potential.is_some() {
            v.push("potential");
        }
        if self.bc.is_some() {
            v.push("bc");
        }
        if self.orbit.is_some() {
            v.push("orbit");
        }
        if self.n_max.is_some() {
            v.push("n_max");
        }
        if self.window.is_some() {
            v.push("window");
        }
        if self.tol.is_some() {
            v.push("tol");
        }
        if self.grid.is_some() {
            v.push("grid");
        }
        if self.kappa.is_some() {
            v.push("kappa");
        }
        if self.seed.is_some() {
            v.push("seed");
        }
        if self.level.is_some() {
            v.push("level");
        }
        if self.output.is_some() {
            v.push("output");
        }
        v
    }

    /// Require every `required` field and reject any field outside the
    /// command's consumed set.
    pub fn audit(&self, cmd: &str, required: &[&str], optional: &[&str]) -> Result<(), String> {
        let present = self.present_fields();
        for r in required {
            if !present.contains(r) {
                return Err(format!("{cmd}: missing required config field \"{r}\""));
            }
        }
        for p in present {
            if !required.contains(&p) && !optional.contains(&p) {
                return Err(format!("{cmd}: config field \"{p}\" does not apply"));
            }
        }
        Ok(())
    }

    fn tol(&self) -> Result<f64, String> {
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(format!("tol must be a positive real, got {tol}"));
        }
        Ok(tol)
    }

    fn potential(&self) -> Result<Potential, String> {
        match &self.potential {
            Some(spec) => spec.resolve(),
            None => Ok(Potential::Zero),
        }
    }

    fn grid_1d(&self, default: usize) -> Result<usize, String> {
        match &self.grid {
            None => Ok(default),
            Some(g) if g.len() == 1 => Ok(g[0]),
            Some(g) => Err(format!("grid must hold one dimension here, got {g:?}")),
        }
    }

    fn grid_2d(&self, default: [usize; 2]) -> Result<[usize; 2], String> {
        match &self.grid {
            None => Ok(default),
            Some(g) if g.len() == 2 => Ok([g[0], g[1]]),
            Some(g) => Err(format!("grid must hold two dimensions here, got {g:?}")),
        }
    }
}

fn parse_window(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("window must be lo:hi, got \"{s}\""))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("window lower bound \"{lo}\" is not a number"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("window upper bound \"{hi}\" is not a number"))?;
    Ok([lo, hi])
}

fn load_config(job: &Job) -> Result<JobConfig, String> {
    let text = fs::read_to_string(&job.config)
        .map_err(|e| format!("config {}: {e}", job.config.display()))?;
    let mut cfg: JobConfig = serde_json::from_str(&text)
        .map_err(|e| format!("config {}: {e}", job.config.display()))?;
    if let Some(tol) = job.tol {
        cfg.tol = Some(tol);
    }
    if let Some(n) = job.n_max {
        cfg.n_max = Some(n);
    }
    if let Some(w) = &job.window {
        cfg.window = Some(parse_window(w)?);
    }
    if let Some(out) = &job.out {
        match &mut cfg.output {
            Some(o) => o.path = out.clone(),
            None => {
                cfg.output = Some(OutputSpec {
                    path: out.clone(),
                    format: None,
                })
            }
        }
    }
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// Artifact emission
// ---------------------------------------------------------------------------

/// 17 significant digits; enough to round-trip any f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn check_format(output: &OutputSpec, canon: &str) -> Result<(), String> {
    if let Some(f) = &output.format {
        if f != canon {
            return Err(format!(
                "output format \"{f}\" does not match this command's \"{canon}\""
            ));
        }
    }
    Ok(())
}

fn emit(output: Option<&OutputSpec>, canon: &str, body: &str) -> Result<(), String> {
    match output {
        Some(o) => {
            check_format(o, canon)?;
            fs::write(&o.path, body).map_err(|e| format!("write {}: {e}", o.path.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn spectrum_csv(slice: &SpectrumSlice) -> String {
    let mut out = format!("n,lambda,multiplicity,certification{CRLF}");
    let cert = slice.certification.as_str();
    for (n, lam, mult) in slice.indexed() {
        let _ = write!(out, "{n},{},{mult},{cert}{CRLF}", num(lam));
    }
    out
}

fn range_rows(out: &mut String, ranges: &[OrbitRange]) {
    for r in ranges {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}{CRLF}",
            r.n,
            num(r.a_n),
            num(r.b_n),
            num(r.minimizer.coord),
            num(r.minimizer.gamma),
            num(r.maximizer.coord),
            num(r.maximizer.gamma)
        );
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_eigs(cfg: &JobConfig) -> Result<u8, String> {
    cfg.audit("eigs", &["potential", "bc", "n_max"], &["window", "tol", "output"])?;
    let q = cfg.potential()?;
    let u = cfg.bc.as_ref().unwrap().to_unitary().map_err(|e| e.to_string())?;
    let n_max = cfg.n_max.unwrap();
    let tol = cfg.tol()?;
    let slice = eigenvalues(&q, &u, n_max, EigOptions { tol, window: cfg.window })
        .map_err(|e| e.to_string())?;
    emit(cfg.output.as_ref(), "csv", &spectrum_csv(&slice))?;
    if slice.indexed_count() < n_max + 1 {
        eprintln!(
            "eigs: incomplete spectrum, {} of {} indices",
            slice.indexed_count(),
            n_max + 1
        );
        return Ok(2);
    }
    Ok(0)
}

fn cmd_curve(cfg: &JobConfig) -> Result<u8, String> {
    cfg.audit("curve", &["potential", "window"], &["grid", "tol", "output"])?;
    let q = cfg.potential()?;
    let [lo, hi] = cfg.window.unwrap();
    let n = cfg.grid_1d(200)?;
    let tol = cfg.tol()?;
    let mut out = format!(
        "lambda,g11_re,g11_im,g12_re,g12_im,g22_re,g22_im,kappa_plus_arg,kappa_minus_arg{CRLF}"
    );
    if lo < hi {
        if n < 2 {
            return Err(format!("curve grid needs at least 2 samples, got {n}"));
        }
        for i in 0..n {
            let lam = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let f = fundamental(&q, lam, tol).map_err(|e| e.to_string())?;
            let cv = charcurve::gamma(&f).map_err(|e| e.to_string())?;
            let g = cv.matrix();
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{}{CRLF}",
                num(lam),
                num(g.m[0][0].re),
                num(g.m[0][0].im),
                num(g.m[0][1].re),
                num(g.m[0][1].im),
                num(g.m[1][1].re),
                num(g.m[1][1].im),
                num(cv.kappa_plus.arg()),
                num(cv.kappa_minus.arg())
            );
        }
    }
    emit(cfg.output.as_ref(), "csv", &out)?;
    Ok(0)
}

fn cmd_orbit_scan(cfg: &JobConfig) -> Result<u8, String> {
    cfg.audit("orbit-scan", &["potential", "orbit", "n_max", "grid"], &["tol", "output"])?;
    let q = cfg.potential()?;
    let orbit = cfg.orbit.unwrap();
    let n_max = cfg.n_max.unwrap();
    let grid = cfg.grid_2d([33, 33])?;
    let tol = cfg.tol()?;
    let surf = lambda_surface(&q, &orbit, n_max, grid, tol).map_err(|e| e.to_string())?;
    let mut out = format!("theta_or_tau,gamma,n,lambda{CRLF}");
    for p in &surf.points {
        for (n, lam) in p.lambdas.iter().enumerate() {
            let _ = write!(out, "{},{},{n},{}{CRLF}", num(p.coord), num(p.gamma), num(*lam));
        }
    }
    emit(cfg.output.as_ref(), "csv", &out)?;
    Ok(0)
}

fn verification_path(csv: &Path) -> PathBuf {
    csv.with_extension("verify.json")
}

fn cmd_orbit_range(cfg: &JobConfig) -> Result<u8, String> {
    cfg.audit(
        "orbit-range",
        &["potential", "orbit", "n_max", "output"],
        &["window", "grid", "tol"],
    )?;
    let q = cfg.potential()?;
    let orbit = cfg.orbit.unwrap();
    let n_max = cfg.n_max.unwrap();
    let grid = cfg.grid_2d([33, 33])?;
    let tol = cfg.tol()?;
    let output = cfg.output.as_ref().unwrap();
    check_format(output, "csv")?;

    let mut out = format!("n,a_n,b_n,min_theta,min_gamma,max_theta,max_gamma{CRLF}");
    let (ranges, code) = match critical_values(&q, &orbit, n_max, cfg.window, tol) {
        Ok(ranges) => {
            range_rows(&mut out, &ranges);
            (Some(ranges), 0)
        }
        // The interlacing theorems assume the orbit avoids the degeneracy
        // curve. Fall back to the band scan, which stays valid, and flag
        // the hypothesis through the exit code.
        Err(OrbitError::MeetsCurve { lambda }) => {
            eprintln!(
                "orbit-range: orbit meets the degeneracy curve near lambda = {lambda}; \
                 band endpoints reported without critical points"
            );
            let bands =
                eigenvalue_bands(&q, &orbit, n_max, tol).map_err(|e| e.to_string())?;
            for b in &bands {
                let nan = num(f64::NAN);
                let _ = write!(
                    out,
                    "{},{},{},{nan},{nan},{nan},{nan}{CRLF}",
                    b.n,
                    num(b.a),
                    num(b.b)
                );
            }
            (None, 2)
        }
        Err(e) => return Err(e.to_string()),
    };
    let report = verify_orbit_theorems(&q, &orbit, n_max, grid, tol).map_err(|e| e.to_string())?;
    let doc = serde_json::json!({
        "critical_values": ranges,
        "verification": report,
    });
    let json = format!("{:#}\n", doc);
    fs::write(&output.path, &out).map_err(|e| format!("write {}: {e}", output.path.display()))?;
    let vpath = verification_path(&output.path);
    fs::write(&vpath, &json).map_err(|e| format!("write {}: {e}", vpath.display()))?;
    Ok(code)
}

fn cmd_levelset(cfg: &JobConfig) -> Result<u8, String> {
    cfg.audit("levelset", &["potential", "orbit", "kappa"], &["tol", "output"])?;
    let q = cfg.potential()?;
    let orbit = cfg.orbit.unwrap();
    let kappa = cfg.kappa.unwrap();
    let tol = cfg.tol()?;
    let ls = level_set(&q, &orbit, kappa, tol).map_err(|e| e.to_string())?;
    let witness = ls.realize(0.0).map(|u| BcSpec::from_unitary(&u));
    let doc = serde_json::json!({
        "orbit": orbit,
        "kappa": ls.kappa,
        "shape": ls.shape,
        "witness": witness,
    });
    emit(cfg.output.as_ref(), "json", &format!("{:#}\n", doc))?;
    Ok(0)
}

fn cmd_diag_scan(cfg: &JobConfig) -> Result<u8, String> {
    cfg.audit("diag-scan", &["potential", "n_max"], &["grid", "tol", "output"])?;
    let q = cfg.potential()?;
    let n_max = cfg.n_max.unwrap();
    let n_beta = cfg.grid_1d(128)?;
    if n_beta == 0 {
        return Err("diag-scan grid must be positive".into());
    }
    let tol = cfg.tol()?;
    let mut out = format!("beta,n,lambda{CRLF}");
    let mut prev: Vec<Option<f64>> = vec![None; n_max + 1];
    let mut prev_beta = 0.0;
    for j in 0..n_beta {
        let beta = PI * (j + 1) as f64 / n_beta as f64;
        let s = bc::SeparatedBC::new(PI - beta, beta).map_err(|e| e.to_string())?;
        let u = bc::from_separated(&s);
        let slice = eigenvalues(&q, &u, n_max, EigOptions { tol, window: None })
            .map_err(|e| e.to_string())?;
        for n in 0..=n_max {
            let lam = slice
                .nth(n)
                .ok_or(format!("diag-scan: index {n} missing at beta = {beta}"))?;
            let _ = write!(out, "{},{n},{}{CRLF}", num(beta), num(lam));
            if let Some(p) = prev[n] {
                if lam <= p {
                    eprintln!(
                        "diag-scan: lambda_{n} not increasing between beta = {prev_beta} \
                         and beta = {beta} ({p} vs {lam})"
                    );
                }
            }
            prev[n] = Some(lam);
        }
        prev_beta = beta;
    }
    emit(cfg.output.as_ref(), "csv", &out)?;
    Ok(0)
}

fn check_summary(report: &CheckReport) -> String {
    let mut out = String::new();
    for s in &report.suites {
        if s.failures.is_empty() {
            let _ = writeln!(out, "suite {}: {} cases, pass", s.name, s.cases);
        } else {
            let _ = writeln!(
                out,
                "suite {}: {} cases, FAIL ({})",
                s.name,
                s.cases,
                s.failures.len()
            );
            for f in &s.failures {
                let _ = writeln!(out, "  {}: {}", f.case, f.detail);
            }
        }
    }
    let _ = writeln!(out, "{}", if report.pass { "all suites pass" } else { "FAILED" });
    out
}

fn cmd_check(cfg: &JobConfig) -> Result<u8, String> {
    cfg.audit("check", &[], &["potential", "tol", "seed", "level", "output"])?;
    let q = cfg.potential()?;
    cfg.tol()?;
    let level = cfg.level.unwrap_or(CheckLevel::Full);
    let seed = cfg.seed.unwrap_or(7);
    let report = run_checks(&q, level, seed);
    print!("{}", check_summary(&report));
    if let Some(o) = &cfg.output {
        check_format(o, "json")?;
        let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        fs::write(&o.path, format!("{json}\n"))
            .map_err(|e| format!("write {}: {e}", o.path.display()))?;
    }
    Ok(if report.pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn dispatch(command: &Command) -> Result<u8, String> {
    let (job, run): (&Job, fn(&JobConfig) -> Result<u8, String>) = match command {
        Command::Eigs(j) => (j, cmd_eigs),
        Command::Curve(j) => (j, cmd_curve),
        Command::OrbitScan(j) => (j, cmd_orbit_scan),
        Command::OrbitRange(j) => (j, cmd_orbit_range),
        Command::Levelset(j) => (j, cmd_levelset),
        Command::DiagScan(j) => (j, cmd_diag_scan),
        Command::Check(j) => (j, cmd_check),
    };
    let cfg = load_config(job)?;
    run(&cfg)
}

/// Parse arguments, run, and map failures to the exit-code contract:
/// 0 success, 1 malformed config or failed run, 2 incomplete or
/// hypothesis-violating result.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> JobConfig {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn audit_rejects_missing_and_extraneous() {
        let c = cfg(r#"{"potential": "zero", "n_max": 3}"#);
        assert!(c.audit("eigs", &["potential", "bc", "n_max"], &["tol"]).is_err());
        let c = cfg(r#"{"potential": "zero", "kappa": 1.0}"#);
        let err = c.audit("eigs", &["potential"], &["tol"]).unwrap_err();
        assert!(err.contains("kappa"), "{err}");
    }

    #[test]
    fn unknown_keys_fail_at_parse() {
        let r: Result<JobConfig, _> = serde_json::from_str(r#"{"nmax": 3}"#);
        assert!(r.is_err());
    }

    #[test]
    fn bc_object_schema_round_trips() {
        let c = cfg(r#"{"bc": {"separated": {"alpha": 0.0, "beta": 3.141592653589793}}}"#);
        let u = c.bc.unwrap().to_unitary().unwrap();
        let d = u.matrix().dist(&crate::mat2::Mat2::identity().scale(crate::mat2::c64(-1.0, 0.0)));
        assert!(d < 1e-12);
    }

    #[test]
    fn orbit_schema_uses_kind_tag() {
        let c = cfg(r#"{"orbit": {"kind": "hermitian", "mu": 0.0, "nu": 1.0}}"#);
        assert_eq!(c.orbit.unwrap(), AdjointOrbit::Hermitian { mu: 0.0, nu: 1.0 });
        let c = cfg(r#"{"orbit": {"kind": "exceptional", "alpha": 1.5707963267948966}}"#);
        assert!(matches!(c.orbit.unwrap(), AdjointOrbit::Exceptional { .. }));
    }

    #[test]
    fn window_flag_parses() {
        assert_eq!(parse_window("1:100").unwrap(), [1.0, 100.0]);
        assert_eq!(parse_window("-5.5 : 2e3").unwrap(), [-5.5, 2000.0]);
        assert!(parse_window("5").is_err());
        assert!(parse_window("a:b").is_err());
    }

    #[test]
    fn csv_numbers_carry_full_precision() {
        let s = num(std::f64::consts::PI);
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn verification_path_is_a_sibling() {
        assert_eq!(
            verification_path(Path::new("runs/out.csv")),
            Path::new("runs/out.verify.json")
        );
    }

    #[test]
    fn spectrum_csv_lists_global_indices() {
        let q = Potential::Zero;
        let u = bc::from_separated(&bc::SeparatedBC::new(0.0, PI).unwrap()).matrix();
        let u = crate::bc::UnitaryBC::new(u).unwrap();
        let s = eigenvalues(&q, &u, 2, EigOptions::default()).unwrap();
        let csv = spectrum_csv(&s);
        let mut lines = csv.split(CRLF);
        assert_eq!(lines.next().unwrap(), "n,lambda,multiplicity,certification");
        let first = lines.next().unwrap();
        assert!(first.starts_with("0,9.86960440"), "{first}");
        assert!(first.ends_with(",1,prufer"), "{first}");
    }
}
