//! Randomized self-check suites over the whole parameter space.
//!
//! Each suite samples conditions, potentials, or orbits from a seeded
//! generator and verifies structural identities the rest of the crate
//! relies on: normalization of the fundamental system, chart round trips,
//! unitarity and degeneracy of curve values, eigenvalue residuals and
//! Dirichlet interlacing, orbit membership, and level-set realizations.
//! Failures carry the offending sample so a report is reproducible from
//! its seed.

use crate::bc::{
    classify, exceptional_coords, from_hermitian, from_separated, orbit_invariants, to_hermitian,
    to_separated, UnitaryBC,
};
use crate::charcurve::gamma;
use crate::fdcheck::fd_eigenvalues;
use crate::fundsol::{fundamental, fundamental_with_derivative, FundamentalData, Potential};
use crate::mat2::{c64, C64, Mat2};
use crate::orbits::{
    char_on_orbit, invariant_set_distance, level_set, orbit_point, AdjointOrbit, LevelSetShape,
    MEMBERSHIP_TOL,
};
use crate::spectrum::{eigenvalues, reference_spectra, EigOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// How much sampling a check run does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckLevel {
    Quick,
    Full,
}

impl CheckLevel {
    fn cases(&self, quick: usize, full: usize) -> usize {
        match self {
            CheckLevel::Quick => quick,
            CheckLevel::Full => full,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckFinding {
    pub case: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<CheckFinding>,
}

impl SuiteResult {
    fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub level: CheckLevel,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

struct Suite {
    name: &'static str,
    cases: usize,
    failures: Vec<CheckFinding>,
}

impl Suite {
    fn new(name: &'static str) -> Suite {
        Suite {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn case(&mut self, label: impl Into<String>, outcome: Result<(), String>) {
        self.cases += 1;
        if let Err(detail) = outcome {
            self.failures.push(CheckFinding {
                case: label.into(),
                detail,
            });
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name.into(),
            cases: self.cases,
            failures: self.failures,
        }
    }
}

fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..TAU);
    let r = (-2.0 * u1.ln()).sqrt();
    (r * u2.cos(), r * u2.sin())
}

fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    let (re, im) = normal_pair(rng);
    c64(re, im)
}

/// Haar-distributed 2x2 unitary: Gram-Schmidt on a complex Gaussian
/// matrix, with an independent phase on the second column.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> Mat2 {
    let a = [random_c64(rng), random_c64(rng)];
    let b = [random_c64(rng), random_c64(rng)];
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let a = [a[0] / na, a[1] / na];
    let proj = a[0].conj() * b[0] + a[1].conj() * b[1];
    let b = [b[0] - proj * a[0], b[1] - proj * a[1]];
    let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    let phase = C64::from_polar(1.0, rng.gen_range(0.0..TAU));
    let b = [b[0] / nb * phase, b[1] / nb * phase];
    Mat2::new(a[0], b[0], a[1], b[1])
}

fn random_orbit(rng: &mut ChaCha8Rng) -> AdjointOrbit {
    if rng.gen_bool(0.5) {
        AdjointOrbit::hermitian(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..2.0))
            .expect("parameters in range")
    } else {
        let mut alpha = rng.gen_range(0.0..TAU);
        if (alpha - PI).abs() < 1e-3 {
            alpha += 0.01;
        }
        AdjointOrbit::exceptional(alpha).expect("alpha in range")
    }
}

/// Boundary system applied to the two basis solutions. Its determinant
/// vanishes exactly on the spectrum, the whole matrix vanishes at a double
/// eigenvalue, and neither fact routes through the spectral pipeline's own
/// characteristic functions. The second value is a linear residual scale.
fn bc_system(um: &Mat2, f: &FundamentalData) -> (Mat2, f64) {
    let i1 = Mat2::identity() + *um;
    let i2 = Mat2::identity() - *um;
    // Columns: the basis solutions' endpoint data, (y(0), y(1)) and the
    // outward derivatives (-y'(0), y'(1)).
    let psi = Mat2::from_real(1.0, 0.0, f.y1, f.y2);
    let dpsi = Mat2::from_real(0.0, -1.0, f.dy1, f.dy2);
    let m = i1.scale(c64(0.0, 1.0)) * dpsi - i2 * psi;
    let scale = (i1.max_abs() + i2.max_abs()) * (psi.max_abs() + dpsi.max_abs()) + 1.0;
    (m, scale)
}

fn suite_fundamental(q: &Potential, rng: &mut ChaCha8Rng, level: CheckLevel) -> SuiteResult {
    let mut suite = Suite::new("fundamental_normalization");
    for _ in 0..level.cases(6, 24) {
        let lam = rng.gen_range(-30.0..900.0);
        let label = format!("lambda = {lam:.6}");
        let outcome = (|| -> Result<(), String> {
            let f = fundamental_with_derivative(q, lam, 1e-10).map_err(|e| e.to_string())?;
            let scale = (f.y1 * f.dy2).abs() + (f.y2 * f.dy1).abs() + 1.0;
            let defect = f.wronskian_defect();
            if defect > 1e-9 + 4e-15 * scale {
                return Err(format!("Wronskian defect {defect:.3e}"));
            }
            let d = f.lambda_derivatives.ok_or("missing spectral derivatives")?;
            // Spectral derivatives against a centered difference.
            let h = 1e-5 * (1.0 + lam.abs()).sqrt();
            let fp = fundamental(q, lam + h, 1e-12).map_err(|e| e.to_string())?;
            let fm = fundamental(q, lam - h, 1e-12).map_err(|e| e.to_string())?;
            let fd = [
                (fp.y1 - fm.y1) / (2.0 * h),
                (fp.dy1 - fm.dy1) / (2.0 * h),
                (fp.y2 - fm.y2) / (2.0 * h),
                (fp.dy2 - fm.dy2) / (2.0 * h),
            ];
            for k in 0..4 {
                let tol = 1e-4 * (1.0 + d[k].abs()) + h * h * scale;
                if (d[k] - fd[k]).abs() > tol {
                    return Err(format!(
                        "derivative slot {k}: variational {} vs difference {}",
                        d[k], fd[k]
                    ));
                }
            }
            Ok(())
        })();
        suite.case(label, outcome);
    }
    suite.finish()
}

fn suite_boundary_charts(rng: &mut ChaCha8Rng, level: CheckLevel) -> SuiteResult {
    let mut suite = Suite::new("boundary_charts");
    for k in 0..level.cases(8, 40) {
        let u = UnitaryBC::new(random_unitary(rng)).expect("unitary by construction");
        let label = format!("sample {k}");
        let outcome = (|| -> Result<(), String> {
            let m = u.matrix();
            let defect = m.unitarity_defect();
            if defect > 1e-12 {
                return Err(format!("unitarity defect {defect:.3e}"));
            }
            let class = classify(&u);
            if let Ok(h) = to_hermitian(&u) {
                let back = from_hermitian(&h);
                let d = back.matrix().dist(&m);
                if d > 1e-9 {
                    return Err(format!("Cayley round trip distance {d:.3e}"));
                }
            }
            if class.is_separated {
                let s = to_separated(&u).ok_or("separated but unconvertible")?;
                let d = from_separated(&s).matrix().dist(&m);
                if d > 1e-9 {
                    return Err(format!("separated round trip distance {d:.3e}"));
                }
            }
            if let Some(x) = exceptional_coords(&u) {
                let orbit = AdjointOrbit::exceptional(x.alpha).map_err(|e| e.to_string())?;
                let p = orbit.point(x.tau, x.gamma).map_err(|e| e.to_string())?;
                let d = orbit_point(&p).map_err(|e| e.to_string())?.matrix().dist(&m);
                if d > 1e-8 {
                    return Err(format!("exceptional chart round trip distance {d:.3e}"));
                }
            }
            Ok(())
        })();
        suite.case(label, outcome);
    }
    suite.finish()
}

fn suite_curve(q: &Potential, rng: &mut ChaCha8Rng, level: CheckLevel) -> SuiteResult {
    let mut suite = Suite::new("curve_values");
    for _ in 0..level.cases(6, 24) {
        let lam = rng.gen_range(-10.0..400.0);
        let label = format!("lambda = {lam:.6}");
        let outcome = (|| -> Result<(), String> {
            let f = fundamental(q, lam, 1e-10).map_err(|e| e.to_string())?;
            let cv = gamma(&f).map_err(|e| e.to_string())?;
            let g = cv.matrix();
            if g.unitarity_defect() > 1e-8 {
                return Err(format!("curve value unitarity {:.3e}", g.unitarity_defect()));
            }
            if g.symmetry_defect() > 1e-8 {
                return Err(format!("curve value symmetry {:.3e}", g.symmetry_defect()));
            }
            for (tag, kap) in [("kappa_plus", cv.kappa_plus), ("kappa_minus", cv.kappa_minus)] {
                if (kap.norm() - 1.0).abs() > 1e-8 {
                    return Err(format!("{tag} off the unit circle by {:.3e}", kap.norm() - 1.0));
                }
                let d = (g - Mat2::identity().scale(kap)).det().norm();
                if d > 1e-7 {
                    return Err(format!("{tag} eigenvalue defect {d:.3e}"));
                }
            }
            // Both basis solutions satisfy the condition U = Gamma(lambda),
            // so the boundary system must vanish entrywise.
            let (m, scale) = bc_system(&g, &f);
            if m.max_abs() > 1e-6 * scale {
                return Err(format!(
                    "lambda is not doubly degenerate for its curve value: system norm {:.3e}",
                    m.max_abs() / scale
                ));
            }
            Ok(())
        })();
        suite.case(label, outcome);
    }
    suite.finish()
}

fn suite_spectra(q: &Potential, rng: &mut ChaCha8Rng, level: CheckLevel) -> SuiteResult {
    let mut suite = Suite::new("spectra");
    let n_max = 3usize;
    let refs = match reference_spectra(q, n_max + 2, 1e-9) {
        Ok(r) => r,
        Err(e) => {
            suite.case("reference spectra", Err(e.to_string()));
            return suite.finish();
        }
    };
    for k in 0..level.cases(4, 12) {
        let u = UnitaryBC::new(random_unitary(rng)).expect("unitary by construction");
        let label = format!("sample {k}");
        let outcome = (|| -> Result<(), String> {
            let s = eigenvalues(q, &u, n_max, EigOptions { tol: 1e-9, window: None })
                .map_err(|e| e.to_string())?;
            if s.indexed_count() < n_max + 1 {
                return Err(format!("only {} of {} indices", s.indexed_count(), n_max + 1));
            }
            for (n, lam, mult) in s.indexed() {
                if n > n_max {
                    break;
                }
                let f = fundamental(q, lam, 1e-10).map_err(|e| e.to_string())?;
                let (m, scale) = bc_system(&u.matrix(), &f);
                let det = m.det().norm();
                if det > 1e-6 * scale * scale {
                    return Err(format!(
                        "index {n}: boundary determinant residual {:.3e}",
                        det / (scale * scale)
                    ));
                }
                if lam > refs.dirichlet[n] + 1e-6 * (1.0 + lam.abs()) {
                    return Err(format!(
                        "index {n}: {lam} above the Dirichlet ceiling {}",
                        refs.dirichlet[n]
                    ));
                }
                if n >= 2 {
                    let floor = refs.dirichlet[n - 2];
                    if lam < floor - 1e-6 * (1.0 + lam.abs()) {
                        return Err(format!(
                            "index {n}: {lam} below the rank-two floor {floor}"
                        ));
                    }
                }
                if mult == 2 {
                    let g = gamma(&f).map_err(|e| e.to_string())?.matrix();
                    let d = u.matrix().dist(&g);
                    if d > 1e-5 {
                        return Err(format!(
                            "double eigenvalue off the degeneracy curve by {d:.3e}"
                        ));
                    }
                }
            }
            Ok(())
        })();
        suite.case(label, outcome);
    }
    suite.finish()
}

fn suite_orbits(q: &Potential, rng: &mut ChaCha8Rng, level: CheckLevel) -> SuiteResult {
    let mut suite = Suite::new("orbit_geometry");
    for k in 0..level.cases(4, 12) {
        let orbit = random_orbit(rng);
        let [clo, chi] = orbit.coord_range();
        let coord = rng.gen_range(clo..=chi);
        let gam = rng.gen_range(0.0..TAU);
        let label = format!("{orbit:?} at ({coord:.4}, {gam:.4}) (case {k})");
        let outcome = (|| -> Result<(), String> {
            let p = orbit.point(coord, gam).map_err(|e| e.to_string())?;
            let u = orbit_point(&p).map_err(|e| e.to_string())?;
            let d = invariant_set_distance(orbit_invariants(&u), orbit.invariants());
            if d > MEMBERSHIP_TOL {
                return Err(format!("invariant distance {d:.3e}"));
            }
            let s = eigenvalues(q, &u, 1, EigOptions { tol: 1e-9, window: None })
                .map_err(|e| e.to_string())?;
            for &lam in s.eigenvalues.iter().take(2) {
                let f = fundamental(q, lam, 1e-10).map_err(|e| e.to_string())?;
                let chi_val = char_on_orbit(&p, &f).abs();
                let (_, scale) = bc_system(&u.matrix(), &f);
                if chi_val > 1e-5 * scale {
                    return Err(format!(
                        "characteristic residual {chi_val:.3e} at eigenvalue {lam}"
                    ));
                }
            }
            Ok(())
        })();
        suite.case(label, outcome);
    }
    suite.finish()
}

fn suite_level_sets(q: &Potential, rng: &mut ChaCha8Rng, level: CheckLevel) -> SuiteResult {
    let mut suite = Suite::new("level_sets");
    for k in 0..level.cases(4, 12) {
        let orbit = random_orbit(rng);
        let kappa = rng.gen_range(-5.0..80.0);
        let label = format!("{orbit:?} at kappa = {kappa:.4} (case {k})");
        let outcome = (|| -> Result<(), String> {
            let ls = level_set(q, &orbit, kappa, 1e-10).map_err(|e| e.to_string())?;
            let g = gamma(&fundamental(q, kappa, 1e-10).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?
                .matrix();
            let gammas = match ls.shape {
                LevelSetShape::Empty => vec![],
                LevelSetShape::Point { .. } => vec![0.0],
                LevelSetShape::Circle { .. } => vec![0.0, 1.7, PI, 5.1],
            };
            for gam in gammas {
                let u = ls.realize(gam).ok_or("realize returned nothing")?;
                let d = invariant_set_distance(orbit_invariants(&u), orbit.invariants());
                if d > 1e-7 {
                    return Err(format!("realized point off the orbit by {d:.3e}"));
                }
                let det = (u.matrix() - g).det().norm();
                if det > 1e-6 {
                    return Err(format!(
                        "realized condition misses the eigenvalue: det {det:.3e} at gamma {gam}"
                    ));
                }
            }
            Ok(())
        })();
        suite.case(label, outcome);
    }
    suite.finish()
}

fn suite_fd(q: &Potential, rng: &mut ChaCha8Rng, level: CheckLevel) -> SuiteResult {
    let mut suite = Suite::new("fd_crosscheck");
    for k in 0..level.cases(1, 4) {
        let u = UnitaryBC::new(random_unitary(rng)).expect("unitary by construction");
        let label = format!("sample {k}");
        let outcome = (|| -> Result<(), String> {
            let s = eigenvalues(q, &u, 2, EigOptions { tol: 1e-9, window: None })
                .map_err(|e| e.to_string())?;
            let fd = fd_eigenvalues(q, &u, 3, 1500, true).map_err(|e| e.to_string())?;
            for n in 0..=2 {
                let want = s.nth(n).ok_or(format!("index {n} missing"))?;
                let got = fd[n];
                if (want - got).abs() > 1e-3 * (1.0 + want.abs()) {
                    return Err(format!("index {n}: shooting {want} vs elements {got}"));
                }
            }
            Ok(())
        })();
        suite.case(label, outcome);
    }
    suite.finish()
}

/// Run every suite against one potential.
pub fn run_checks(q: &Potential, level: CheckLevel, seed: u64) -> CheckReport {
    let mut suites = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    suites.push(suite_fundamental(q, &mut rng, level));
    suites.push(suite_boundary_charts(&mut rng, level));
    suites.push(suite_curve(q, &mut rng, level));
    suites.push(suite_spectra(q, &mut rng, level));
    suites.push(suite_orbits(q, &mut rng, level));
    suites.push(suite_level_sets(q, &mut rng, level));
    if level == CheckLevel::Full {
        suites.push(suite_fd(q, &mut rng, level));
    }
    let pass = suites.iter().all(SuiteResult::pass);
    CheckReport {
        level,
        seed,
        suites,
        pass,
    }
}
