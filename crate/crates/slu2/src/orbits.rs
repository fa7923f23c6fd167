//! Adjoint orbits of principal type and the geometry of eigenvalues on them.
//!
//! An orbit of the conjugation action on U(2) is labelled by its eigenvalue
//! pair. Principal orbits are two-spheres; this module coordinatizes them,
//! evaluates the per-orbit characteristic function, computes the eigenvalue
//! bands `[a_n, b_n]` swept out as the boundary condition moves over an
//! orbit, locates the band-edge critical points, slices orbits by level sets
//! of a fixed eigenvalue, and assembles a machine-checkable verification
//! report for the band theorems.

use crate::bc::{self, BcError, ExceptionalCoords, HermitianBC, UnitaryBC};
use crate::charcurve::{gamma, gamma_meets_orbit, CurveError, CurveOrbitHit};
use crate::fundsol::{
    fundamental, fundamental_with_derivative, FundamentalData, FundsolError, Potential,
};
use crate::mat2::{c64, C64, Mat2};
use crate::spectrum::{self, Certification, SpectrumError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

/// Spacing of the shared lambda table behind surface and band scans.
const TABLE_STEP: f64 = 0.5;
/// Realized conditions must reproduce the orbit invariants this closely.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Excluded angular gap around the point orbit at alpha = pi.
const ALPHA_GAP: f64 = 1e-9;
/// Matrix distance below which a grid point is treated as sitting exactly
/// on a curve intersection, so its double eigenvalue is spliced in rather
/// than root-hunted.
const HIT_SPLICE_DIST: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("invalid orbit parameter: {0}")]
    InvalidParameter(String),
    #[error("coordinate out of range: {0}")]
    OutOfRange(String),
    #[error(
        "orbit meets the characteristic curve at lambda = {lambda:.9e}; \
         band edges are degenerate there and simple-root pairing does not apply"
    )]
    MeetsCurve { lambda: f64 },
    #[error("range function has a degenerate root at lambda = {lambda:.9e}; refine the window")]
    DegenerateRoot { lambda: f64 },
    #[error("band ordering violated: {0}")]
    BandOrder(String),
    #[error("root search failed: {0}")]
    RootSearch(String),
    #[error(transparent)]
    Fundsol(#[from] FundsolError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Bc(#[from] BcError),
}

// ---------------------------------------------------------------------------
// Orbits and their points
// ---------------------------------------------------------------------------

/// Principal-type adjoint orbit in U(2).
///
/// `Hermitian` orbits sit on the regular stratum and are labelled by the
/// invariants of their Hermitian chart: eigenvalues `mu - nu < mu + nu`.
/// `Exceptional` orbits sit on the singular stratum and pass through
/// `diag(-1, e^{i alpha})`; `alpha = pi` is excluded because that orbit
/// degenerates to the Dirichlet point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdjointOrbit {
    Hermitian { mu: f64, nu: f64 },
    Exceptional { alpha: f64 },
}

/// Cayley image `(1 - i rho) / (1 + i rho)` of a real eigenvalue.
fn cay(rho: f64) -> C64 {
    (c64(1.0, -rho)) / (c64(1.0, rho))
}

fn norm_angle(g: f64) -> f64 {
    let r = g.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl AdjointOrbit {
    pub fn hermitian(mu: f64, nu: f64) -> Result<Self, OrbitError> {
        let orbit = AdjointOrbit::Hermitian { mu, nu };
        orbit.validate()?;
        Ok(orbit)
    }

    pub fn exceptional(alpha: f64) -> Result<Self, OrbitError> {
        let orbit = AdjointOrbit::Exceptional { alpha };
        orbit.validate()?;
        Ok(orbit)
    }

    /// Principal-type constraints: `nu > 0`, or `alpha` in `[0, 2 pi)` away
    /// from the excluded point orbit.
    pub fn validate(&self) -> Result<(), OrbitError> {
        match *self {
            AdjointOrbit::Hermitian { mu, nu } => {
                if !mu.is_finite() || !nu.is_finite() || !(nu > 0.0) {
                    return Err(OrbitError::InvalidParameter(format!(
                        "hermitian orbit needs finite mu and nu > 0, got mu = {mu}, nu = {nu}"
                    )));
                }
            }
            AdjointOrbit::Exceptional { alpha } => {
                if !alpha.is_finite() || !(0.0..TAU).contains(&alpha) {
                    return Err(OrbitError::InvalidParameter(format!(
                        "exceptional orbit needs alpha in [0, 2 pi), got {alpha}"
                    )));
                }
                if (alpha - PI).abs() < ALPHA_GAP {
                    return Err(OrbitError::InvalidParameter(
                        "alpha = pi labels a point orbit, not a principal one".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Eigenvalue pair of every condition on the orbit: the Cayley images
    /// `(cay(mu + nu), cay(mu - nu))`, or `(-1, e^{i alpha})`.
    pub fn invariants(&self) -> (C64, C64) {
        match *self {
            AdjointOrbit::Hermitian { mu, nu } => (cay(mu + nu), cay(mu - nu)),
            AdjointOrbit::Exceptional { alpha } => {
                (c64(-1.0, 0.0), C64::from_polar(1.0, alpha))
            }
        }
    }

    /// Closed interval of the non-angular coordinate: `theta` in
    /// `[0, pi/2]` or `tau` in `[-pi/2, pi/2]`.
    pub fn coord_range(&self) -> [f64; 2] {
        match self {
            AdjointOrbit::Hermitian { .. } => [0.0, FRAC_PI_2],
            AdjointOrbit::Exceptional { .. } => [-FRAC_PI_2, FRAC_PI_2],
        }
    }

    /// Point of the orbit at the given chart coordinate and circle angle.
    pub fn point(&self, coord: f64, gamma: f64) -> Result<OrbitPoint, OrbitError> {
        self.validate()?;
        let [lo, hi] = self.coord_range();
        if !coord.is_finite() || coord < lo - 1e-9 || coord > hi + 1e-9 {
            return Err(OrbitError::OutOfRange(format!(
                "coordinate {coord} outside [{lo}, {hi}]"
            )));
        }
        if !gamma.is_finite() {
            return Err(OrbitError::OutOfRange(format!("gamma must be finite, got {gamma}")));
        }
        Ok(OrbitPoint {
            orbit: *self,
            coord: coord.clamp(lo, hi),
            gamma: norm_angle(gamma),
        })
    }

    /// Exceptional point addressed by `t = cos(alpha/2) sin(tau)` instead
    /// of `tau`.
    pub fn point_from_t(&self, t: f64, gamma: f64) -> Result<OrbitPoint, OrbitError> {
        match *self {
            AdjointOrbit::Hermitian { .. } => Err(OrbitError::OutOfRange(
                "the t coordinate applies to exceptional orbits only".into(),
            )),
            AdjointOrbit::Exceptional { alpha } => {
                self.validate()?;
                let half_cos = (alpha / 2.0).cos();
                let w0 = half_cos.abs();
                if !t.is_finite() || t.abs() > w0 * (1.0 + 1e-9) + 1e-12 {
                    return Err(OrbitError::OutOfRange(format!(
                        "|t| = {} exceeds cos(alpha/2) bound {w0}",
                        t.abs()
                    )));
                }
                let tau = (t / half_cos).clamp(-1.0, 1.0).asin();
                self.point(tau, gamma)
            }
        }
    }
}

/// A point of an adjoint orbit in its angular chart.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrbitPoint {
    pub orbit: AdjointOrbit,
    /// `theta` in `[0, pi/2]` on hermitian orbits, `tau` in `[-pi/2, pi/2]`
    /// on exceptional ones.
    pub coord: f64,
    /// Circle angle in `[0, 2 pi)`.
    pub gamma: f64,
}

impl OrbitPoint {
    pub fn theta(&self) -> Option<f64> {
        match self.orbit {
            AdjointOrbit::Hermitian { .. } => Some(self.coord),
            AdjointOrbit::Exceptional { .. } => None,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match self.orbit {
            AdjointOrbit::Hermitian { .. } => None,
            AdjointOrbit::Exceptional { .. } => Some(self.coord),
        }
    }

    /// Chart coordinate `t = cos(alpha/2) sin(tau)`; `None` on hermitian
    /// orbits.
    pub fn t(&self) -> Option<f64> {
        match self.orbit {
            AdjointOrbit::Hermitian { .. } => None,
            AdjointOrbit::Exceptional { alpha } => Some((alpha / 2.0).cos() * self.coord.sin()),
        }
    }
}

fn hermitian_chart(mu: f64, nu: f64, theta: f64, gamma: f64) -> HermitianBC {
    let c2 = (2.0 * theta).cos();
    let s2 = (2.0 * theta).sin();
    HermitianBC {
        a: mu - nu * c2,
        c: mu + nu * c2,
        b: C64::from_polar(nu * s2, -gamma),
    }
}

fn exceptional_chart(alpha: f64, tau: f64, gamma: f64) -> ExceptionalCoords {
    ExceptionalCoords {
        alpha,
        t: (alpha / 2.0).cos() * tau.sin(),
        tau,
        gamma,
    }
}

/// Boundary condition realized by an orbit point.
///
/// Hermitian points map through the inverse Cayley transform of
/// `[[mu - nu cos 2 theta, nu sin 2 theta e^{-i gamma}],
///   [nu sin 2 theta e^{i gamma}, mu + nu cos 2 theta]]`;
/// exceptional points are `sigma i e^{i alpha/2} S` with `S` in SU(2) built
/// from `(t, gamma)` and `sigma = sign(pi - alpha)`.
pub fn orbit_point(p: &OrbitPoint) -> Result<UnitaryBC, OrbitError> {
    p.orbit.validate()?;
    match p.orbit {
        AdjointOrbit::Hermitian { mu, nu } => {
            let h = hermitian_chart(mu, nu, p.coord, p.gamma);
            Ok(bc::from_hermitian(&h))
        }
        AdjointOrbit::Exceptional { alpha } => {
            let half = alpha / 2.0;
            let (s, c) = half.sin_cos();
            let sigma = if alpha < PI { 1.0 } else { -1.0 };
            let t = c * p.coord.sin();
            let w = (c * c - t * t).max(0.0).sqrt();
            let phase = c64(0.0, sigma) * C64::from_polar(1.0, half);
            let su = Mat2::new(
                c64(sigma * s, t),
                C64::from_polar(w, p.gamma + FRAC_PI_2),
                C64::from_polar(w, FRAC_PI_2 - p.gamma),
                c64(sigma * s, -t),
            );
            Ok(UnitaryBC::new(su.scale(phase))?)
        }
    }
}

// ---------------------------------------------------------------------------
// Characteristic function on an orbit
// ---------------------------------------------------------------------------

/// Scalar characteristic evaluated on tabulated fundamental data.
trait RangeEval: Sync {
    fn eval(&self, f: &FundamentalData) -> f64;
    fn eval_prime(&self, f: &FundamentalData) -> Option<f64>;
}

/// Chart-resolved orbit point, so table sweeps skip per-node dispatch.
enum Chart {
    Herm(HermitianBC),
    Exc(ExceptionalCoords),
}

impl Chart {
    fn of(p: &OrbitPoint) -> Chart {
        match p.orbit {
            AdjointOrbit::Hermitian { mu, nu } => {
                Chart::Herm(hermitian_chart(mu, nu, p.coord, p.gamma))
            }
            AdjointOrbit::Exceptional { alpha } => {
                Chart::Exc(exceptional_chart(alpha, p.coord, p.gamma))
            }
        }
    }
}

impl RangeEval for Chart {
    fn eval(&self, f: &FundamentalData) -> f64 {
        match self {
            Chart::Herm(h) => spectrum::char_real_u1(h, f),
            Chart::Exc(x) => spectrum::char_real_u0(x, f),
        }
    }

    fn eval_prime(&self, f: &FundamentalData) -> Option<f64> {
        match self {
            Chart::Herm(h) => spectrum::char_real_u1_prime(h, f),
            Chart::Exc(x) => spectrum::char_real_u0_prime(x, f),
        }
    }
}

/// Real characteristic function of the condition at `p`; it vanishes
/// exactly at the eigenvalues of `orbit_point(p)`. The point is assumed
/// valid; the value is a smooth expression in the chart coordinates either
/// way.
pub fn char_on_orbit(p: &OrbitPoint, f: &FundamentalData) -> f64 {
    Chart::of(p).eval(f)
}

// ---------------------------------------------------------------------------
// Certified lambda windows and the shared table
// ---------------------------------------------------------------------------

/// Lambda window guaranteed to contain the first `n_max + 1` eigenvalues of
/// every condition on the orbit, together with the comparison spectra that
/// certified it. The upper edge always comes from the Dirichlet ceiling
/// `lambda_n <= lambda_n^D`; the lower edge is the symmetric-Robin floor on
/// hermitian orbits, the Neumann floor for `alpha < pi`, and the symmetric
/// Robin floor with constant `-tan(alpha/2)` for `alpha > pi`.
struct OrbitWindow {
    lo: f64,
    hi: f64,
    certification: Certification,
    dirichlet: Vec<f64>,
    neumann: Vec<f64>,
    robin: Option<(Vec<f64>, Vec<f64>)>,
}

fn orbit_window(
    q: &Potential,
    orbit: &AdjointOrbit,
    n_max: usize,
    tol: f64,
) -> Result<OrbitWindow, OrbitError> {
    orbit.validate()?;
    let refs = spectrum::reference_spectra(q, n_max, tol)?;
    let hi = refs.dirichlet[n_max] + 0.5;
    let (lo, certification, robin) = match *orbit {
        AdjointOrbit::Hermitian { mu, nu } => {
            let bracket = spectrum::robin_bracket(q, mu, nu, n_max, tol)?;
            (bracket.0[0] - 0.5, Certification::RobinBracketed, Some(bracket))
        }
        AdjointOrbit::Exceptional { alpha } if alpha < PI => {
            (refs.neumann[0] - 0.5, Certification::RobinBracketed, None)
        }
        AdjointOrbit::Exceptional { alpha } => {
            // -tan(alpha/2) > 0 here; the symmetric Robin problem with the
            // free direction's Cayley constant floors every orbit member.
            let c = -(alpha / 2.0).tan();
            let floor = spectrum::prufer_separated(q, &spectrum::robin_separated(c), 0, tol)?;
            (floor - 0.5, Certification::RobinBracketed, None)
        }
    };
    Ok(OrbitWindow {
        lo,
        hi,
        certification,
        dirichlet: refs.dirichlet,
        neumann: refs.neumann,
        robin,
    })
}

/// Fundamental data with spectral derivatives on a uniform lambda grid,
/// shared by every scan over one window.
struct CharTable {
    lambdas: Vec<f64>,
    data: Vec<FundamentalData>,
}

impl CharTable {
    fn build(q: &Potential, lo: f64, hi: f64, tol: f64) -> Result<CharTable, OrbitError> {
        let n = (((hi - lo) / TABLE_STEP).ceil() as usize).max(8);
        let lambdas: Vec<f64> = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .collect();
        let data = lambdas
            .par_iter()
            .map(|&lam| fundamental_with_derivative(q, lam, tol))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CharTable { lambdas, data })
    }
}

// ---------------------------------------------------------------------------
// Root extraction
// ---------------------------------------------------------------------------

fn sgn(v: f64) -> i32 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Cubic Hermite value on a unit cell from endpoint values and slopes.
fn hermite_value(v0: f64, d0: f64, v1: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * v0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * v1
        + (s3 - s2) * h * d1
}

/// Interior critical points of the cubic Hermite model, as cell fractions.
fn hermite_extrema(v0: f64, d0: f64, v1: f64, d1: f64, h: f64) -> Vec<f64> {
    let a = 6.0 * (v0 - v1) + 3.0 * h * (d0 + d1);
    let b = -6.0 * (v0 - v1) - 2.0 * h * (2.0 * d0 + d1);
    let c = h * d0;
    let mut out = Vec::new();
    if a.abs() <= 1e-14 * (b.abs() + c.abs()) {
        if b != 0.0 {
            out.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let r = disc.sqrt();
            out.push((-b + r) / (2.0 * a));
            out.push((-b - r) / (2.0 * a));
        }
    }
    out.retain(|s| (1e-4..=1.0 - 1e-4).contains(s));
    out
}

/// Bracketed root refinement on live data: Newton from the freshest
/// derivative, regula falsi as fallback, periodic bisection as the
/// convergence guarantee.
fn refine_bracket<E: RangeEval>(
    q: &Potential,
    e: &E,
    tol: f64,
    mut a: f64,
    mut b: f64,
    mut va: f64,
    mut vb: f64,
) -> Result<f64, OrbitError> {
    if va == 0.0 {
        return Ok(a);
    }
    if vb == 0.0 {
        return Ok(b);
    }
    let mut deriv: Option<f64> = None;
    let mut x = b;
    let mut vx = vb;
    for it in 0..200 {
        if (b - a).abs() <= 1e-12 * (1.0 + x.abs()) {
            break;
        }
        let mut cand = f64::NAN;
        if let Some(d) = deriv {
            if d != 0.0 {
                cand = x - vx / d;
            }
        }
        if !(cand > a && cand < b) {
            cand = (a * vb - b * va) / (vb - va);
        }
        if !(cand > a && cand < b) || it % 3 == 2 {
            cand = 0.5 * (a + b);
        }
        let f = fundamental_with_derivative(q, cand, tol)?;
        x = cand;
        vx = e.eval(&f);
        deriv = e.eval_prime(&f);
        if vx == 0.0 {
            return Ok(x);
        }
        if (vx > 0.0) == (va > 0.0) {
            a = x;
            va = vx;
        } else {
            b = x;
            vb = vx;
        }
    }
    Ok(0.5 * (a + b))
}

/// All simple roots of `e` over the tabulated window, in ascending order.
///
/// Cells with an endpoint sign change are refined directly. Same-sign cells
/// get a cubic-Hermite guard: the model's interior extrema are probed live
/// whenever the model predicts a crossing or comes close to one, which
/// resolves root pairs far tighter than the table step. Scanning stops once
/// `max_roots` are in hand and the sweep has passed `stop_after`.
fn scan_roots<E: RangeEval>(
    q: &Potential,
    table: &CharTable,
    e: &E,
    tol: f64,
    max_roots: usize,
    stop_after: f64,
) -> Result<Vec<f64>, OrbitError> {
    let vals: Vec<f64> = table.data.iter().map(|f| e.eval(f)).collect();
    let ders: Vec<f64> = table
        .data
        .iter()
        .map(|f| e.eval_prime(f).expect("table data carries spectral derivatives"))
        .collect();
    let live = |lam: f64| -> Result<f64, OrbitError> { Ok(e.eval(&fundamental(q, lam, tol)?)) };

    let mut roots: Vec<f64> = Vec::new();
    let last = table.lambdas.len() - 1;
    for i in 0..last {
        let (l0, l1) = (table.lambdas[i], table.lambdas[i + 1]);
        let h = l1 - l0;
        let (v0, v1) = (vals[i], vals[i + 1]);
        let (d0, d1) = (ders[i], ders[i + 1]);
        if v0 == 0.0 {
            roots.push(l0);
        }
        // Effective signs just inside the cell; an exact node zero defers
        // to the slope there.
        let s0 = if v0 == 0.0 { sgn(d0) } else { sgn(v0) };
        let s1 = if v1 == 0.0 { sgn(-d1) } else { sgn(v1) };
        if s0 == 0 || s1 == 0 {
            continue;
        }
        let (a, va) = if v0 == 0.0 {
            let aa = l0 + 1e-3 * h;
            (aa, live(aa)?)
        } else {
            (l0, v0)
        };
        let (bb, vb) = if v1 == 0.0 {
            let bb = l1 - 1e-3 * h;
            (bb, live(bb)?)
        } else {
            (l1, v1)
        };
        let mut seg: Vec<(f64, f64)> = vec![(a, va)];
        if sgn(va) == sgn(vb) {
            for s in hermite_extrema(v0, d0, v1, d1, h) {
                let model = hermite_value(v0, d0, v1, d1, h, s);
                if sgn(model) != sgn(va) || model.abs() < 0.05 * (v0.abs() + v1.abs()) {
                    let lp = l0 + s * h;
                    if lp > a && lp < bb {
                        let vp = live(lp)?;
                        if vp == 0.0 {
                            roots.push(lp);
                        } else {
                            seg.push((lp, vp));
                        }
                    }
                }
            }
            seg.sort_by(|p, r| p.0.total_cmp(&r.0));
        }
        seg.push((bb, vb));
        for w in seg.windows(2) {
            let ((wa, wva), (wb, wvb)) = (w[0], w[1]);
            if wva != 0.0 && wvb != 0.0 && sgn(wva) != sgn(wvb) {
                roots.push(refine_bracket(q, e, tol, wa, wb, wva, wvb)?);
            }
        }
        if roots.len() >= max_roots && l1 > stop_after {
            break;
        }
    }
    if vals[last] == 0.0 {
        roots.push(table.lambdas[last]);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * (1.0 + y.abs()));
    Ok(roots)
}

// ---------------------------------------------------------------------------
// Eigenvalue surfaces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SurfacePoint {
    pub coord: f64,
    pub gamma: f64,
    /// Eigenvalues `lambda_0 .. lambda_n_max`, ascending, repeated at a
    /// curve intersection.
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceExtremum {
    pub n: usize,
    pub min: f64,
    pub min_coord: f64,
    pub min_gamma: f64,
    pub max: f64,
    pub max_coord: f64,
    pub max_gamma: f64,
}

/// Eigenvalue sheets sampled over an orbit grid.
#[derive(Debug, Clone, Serialize)]
pub struct Surface {
    pub orbit: AdjointOrbit,
    pub n_max: usize,
    /// Chart coordinate samples, both interval ends included.
    pub coords: Vec<f64>,
    /// Circle angles `2 pi j / n_gamma`.
    pub gammas: Vec<f64>,
    pub window: [f64; 2],
    pub certification: Certification,
    /// Curve intersections inside the window; eigenvalue indexing is
    /// best-effort at points carrying them.
    pub curve_hits: Vec<f64>,
    /// Row-major over `coords x gammas`.
    pub points: Vec<SurfacePoint>,
    pub extrema: Vec<SurfaceExtremum>,
}

/// First eigenvalues at one grid point, counted from the certified lower
/// edge by sign changes of the orbit characteristic.
fn point_roots(
    q: &Potential,
    table: &CharTable,
    chart: &Chart,
    u: &Mat2,
    hits: &[(f64, Mat2)],
    n_needed: usize,
    tol: f64,
) -> Result<Vec<f64>, OrbitError> {
    let stop_after = hits
        .iter()
        .map(|h| h.0)
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0;
    let mut roots = scan_roots(q, table, chart, tol, n_needed + 4, stop_after)?;
    // A point sitting exactly on a curve intersection carries a double
    // eigenvalue the sign scan cannot see; splice it in.
    for (lam, g) in hits {
        if u.dist(g) <= HIT_SPLICE_DIST {
            roots.retain(|r| (r - lam).abs() > 1e-4 * (1.0 + lam.abs()));
            roots.push(*lam);
            roots.push(*lam);
        }
    }
    roots.sort_by(f64::total_cmp);
    if roots.len() < n_needed {
        return Err(OrbitError::RootSearch(format!(
            "found {} of {} eigenvalues in the certified window",
            roots.len(),
            n_needed
        )));
    }
    roots.truncate(n_needed);
    Ok(roots)
}

/// Sample `lambda_0 .. lambda_n_max` over a `grid = [n_coord, n_gamma]`
/// grid of orbit points, with per-sheet extrema.
///
/// One fundamental-data table over the certified window is shared by all
/// grid points, so each point costs a table sweep plus a handful of live
/// refinements near its roots.
pub fn lambda_surface(
    q: &Potential,
    orbit: &AdjointOrbit,
    n_max: usize,
    grid: [usize; 2],
    tol: f64,
) -> Result<Surface, OrbitError> {
    orbit.validate()?;
    if grid[0] < 2 || grid[1] < 2 {
        return Err(OrbitError::InvalidParameter(format!(
            "grid dimensions must be at least 2, got {grid:?}"
        )));
    }
    if !(tol > 0.0) {
        return Err(OrbitError::InvalidParameter("tolerance must be positive".into()));
    }
    let win = orbit_window(q, orbit, n_max, tol)?;
    let table = CharTable::build(q, win.lo, win.hi, tol)?;
    let hit_list = gamma_meets_orbit(q, orbit, [win.lo, win.hi], tol)?;
    let hits: Vec<(f64, Mat2)> = hit_list
        .iter()
        .map(|h| -> Result<(f64, Mat2), OrbitError> {
            Ok((h.lambda, gamma(&fundamental(q, h.lambda, tol)?)?.matrix()))
        })
        .collect::<Result<_, _>>()?;

    let [clo, chi] = orbit.coord_range();
    let coords: Vec<f64> = (0..grid[0])
        .map(|i| clo + (chi - clo) * i as f64 / (grid[0] - 1) as f64)
        .collect();
    let gammas: Vec<f64> = (0..grid[1]).map(|j| TAU * j as f64 / grid[1] as f64).collect();

    let cells: Vec<(usize, usize)> = (0..grid[0])
        .flat_map(|i| (0..grid[1]).map(move |j| (i, j)))
        .collect();
    let points: Vec<SurfacePoint> = cells
        .par_iter()
        .map(|&(i, j)| -> Result<SurfacePoint, OrbitError> {
            let p = orbit.point(coords[i], gammas[j])?;
            let chart = Chart::of(&p);
            let u = orbit_point(&p)?.matrix();
            let lambdas = point_roots(q, &table, &chart, &u, &hits, n_max + 1, tol)
                .map_err(|err| {
                    OrbitError::RootSearch(format!(
                        "grid point (coord = {:.6}, gamma = {:.6}): {err}",
                        coords[i], gammas[j]
                    ))
                })?;
            Ok(SurfacePoint {
                coord: coords[i],
                gamma: gammas[j],
                lambdas,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut extrema = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut ex = SurfaceExtremum {
            n,
            min: f64::INFINITY,
            min_coord: 0.0,
            min_gamma: 0.0,
            max: f64::NEG_INFINITY,
            max_coord: 0.0,
            max_gamma: 0.0,
        };
        for p in &points {
            let lam = p.lambdas[n];
            if lam < ex.min {
                ex.min = lam;
                ex.min_coord = p.coord;
                ex.min_gamma = p.gamma;
            }
            if lam > ex.max {
                ex.max = lam;
                ex.max_coord = p.coord;
                ex.max_gamma = p.gamma;
            }
        }
        extrema.push(ex);
    }

    Ok(Surface {
        orbit: *orbit,
        n_max,
        coords,
        gammas,
        window: [win.lo, win.hi],
        certification: win.certification,
        curve_hits: hit_list.iter().map(|h| h.lambda).collect(),
        points,
        extrema,
    })
}

// ---------------------------------------------------------------------------
// Range function, bands, critical values
// ---------------------------------------------------------------------------

/// Band membership indicator `F = R^2 - G^2`: at fixed lambda the
/// characteristic sweeps `[-R - G, -R + G]` (up to sign) as the point moves
/// over the orbit, so lambda is attained exactly where `F <= 0` and band
/// edges are the roots of `F`.
struct RangeFn {
    orbit: AdjointOrbit,
}

impl RangeEval for RangeFn {
    fn eval(&self, f: &FundamentalData) -> f64 {
        match self.orbit {
            AdjointOrbit::Hermitian { mu, nu } => {
                let r = mu * (f.dy2 + f.y1) + (nu * nu - mu * mu) * f.y2 - f.dy1;
                let m = f.dy2 - f.y1;
                r * r - nu * nu * (m * m + 4.0)
            }
            AdjointOrbit::Exceptional { alpha } => spectrum::exceptional_range_fn(alpha, f),
        }
    }

    fn eval_prime(&self, f: &FundamentalData) -> Option<f64> {
        let [y1l, dy1l, y2l, dy2l] = f.lambda_derivatives?;
        let m = f.dy2 - f.y1;
        let ml = dy2l - y1l;
        Some(match self.orbit {
            AdjointOrbit::Hermitian { mu, nu } => {
                let r = mu * (f.dy2 + f.y1) + (nu * nu - mu * mu) * f.y2 - f.dy1;
                let rl = mu * (dy2l + y1l) + (nu * nu - mu * mu) * y2l - dy1l;
                2.0 * r * rl - 2.0 * nu * nu * m * ml
            }
            AdjointOrbit::Exceptional { alpha } => {
                let (s, c) = (alpha / 2.0).sin_cos();
                let r = c * (f.dy2 + f.y1) + 2.0 * s * f.y2;
                let rl = c * (dy2l + y1l) + 2.0 * s * y2l;
                2.0 * r * rl - 2.0 * c * c * m * ml
            }
        })
    }
}

/// Eigenvalue band of one index over an orbit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EigenvalueBand {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    /// The edge sits on a curve intersection, where this band touches its
    /// neighbor and the shared edge carries a double eigenvalue.
    pub degenerate_lower: bool,
    pub degenerate_upper: bool,
}

/// Band range with its critical points.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitRange {
    pub n: usize,
    pub a_n: f64,
    pub b_n: f64,
    pub minimizer: OrbitPoint,
    pub maximizer: OrbitPoint,
}

struct BandScan {
    win: OrbitWindow,
    roots: Vec<f64>,
    hits: Vec<CurveOrbitHit>,
}

/// Locate range-function roots over a window wide enough for `n_max + 1`
/// bands. With no explicit window, the sweep extends upward until
/// `2 (n_max + 1)` roots are in hand and a Dirichlet reference eigenvalue
/// lies beyond the last of them. Curve intersections are spliced into the
/// root list according to the sign of `F` on their two sides: no sign
/// change means a double edge shared by touching bands.
fn scan_bands(
    q: &Potential,
    orbit: &AdjointOrbit,
    n_max: usize,
    window: Option<[f64; 2]>,
    tol: f64,
) -> Result<BandScan, OrbitError> {
    let rf = RangeFn { orbit: *orbit };
    let need = 2 * (n_max + 1);
    let mut ref_idx = n_max;
    loop {
        let mut win = orbit_window(q, orbit, ref_idx, tol)?;
        if let Some([wlo, whi]) = window {
            if !wlo.is_finite() || !whi.is_finite() || !(wlo < whi) {
                return Err(OrbitError::InvalidParameter(format!(
                    "bad window [{wlo}, {whi}]"
                )));
            }
            // Pairing is anchored below band 0, so the scan never starts
            // above the certified edge.
            win.lo = win.lo.min(wlo);
            win.hi = whi.max(win.lo + 4.0 * TABLE_STEP);
        }
        let table = CharTable::build(q, win.lo, win.hi, tol)?;
        let mut roots = scan_roots(q, &table, &rf, tol, usize::MAX, win.hi)?;
        let hits = gamma_meets_orbit(q, orbit, [win.lo, win.hi], tol)?;
        for h in &hits {
            let lam = h.lambda;
            roots.retain(|r| (r - lam).abs() > 1e-4 * (1.0 + lam.abs()));
            let eps = 1e-3 * (1.0 + lam.abs());
            let left = rf.eval(&fundamental(q, lam - eps, tol)?);
            let right = rf.eval(&fundamental(q, lam + eps, tol)?);
            roots.push(lam);
            if sgn(left) == 0 || sgn(right) == 0 || sgn(left) == sgn(right) {
                roots.push(lam);
            }
        }
        roots.sort_by(f64::total_cmp);
        if window.is_some() {
            return Ok(BandScan { win, roots, hits });
        }
        if roots.len() >= need && win.dirichlet.iter().any(|&d| d > roots[need - 1]) {
            return Ok(BandScan { win, roots, hits });
        }
        ref_idx += 2;
        if ref_idx > n_max + 64 {
            return Err(OrbitError::RootSearch(format!(
                "window extension exhausted before locating {need} range-function roots"
            )));
        }
    }
}

fn check_band_rails(
    win: &OrbitWindow,
    orbit: &AdjointOrbit,
    n: usize,
    a: f64,
    b: f64,
) -> Result<(), OrbitError> {
    let slack = |v: f64| 1e-6 * (1.0 + v.abs());
    if let Some(d) = win.dirichlet.get(n) {
        if b > d + slack(*d) {
            return Err(OrbitError::BandOrder(format!(
                "b_{n} = {b:.9e} exceeds the Dirichlet ceiling {d:.9e}"
            )));
        }
    }
    let floor = match orbit {
        AdjointOrbit::Hermitian { .. } => win.robin.as_ref().and_then(|r| r.0.get(n)),
        AdjointOrbit::Exceptional { alpha } if *alpha < PI => win.neumann.get(n),
        AdjointOrbit::Exceptional { .. } => None,
    };
    if let Some(lo) = floor {
        if a < lo - slack(*lo) {
            return Err(OrbitError::BandOrder(format!(
                "a_{n} = {a:.9e} undershoots the comparison floor {lo:.9e}"
            )));
        }
    }
    Ok(())
}

/// Eigenvalue bands `[a_n, b_n]` for `n = 0 .. n_max`, tolerating orbits
/// that meet the characteristic curve: a touched edge is reported as a
/// shared degenerate endpoint instead of an error.
pub fn eigenvalue_bands(
    q: &Potential,
    orbit: &AdjointOrbit,
    n_max: usize,
    tol: f64,
) -> Result<Vec<EigenvalueBand>, OrbitError> {
    let scan = scan_bands(q, orbit, n_max, None, tol)?;
    let need = 2 * (n_max + 1);
    if scan.roots.len() < need {
        return Err(OrbitError::RootSearch(format!(
            "found {} of {} band edges",
            scan.roots.len(),
            need
        )));
    }
    let near_hit = |v: f64| {
        scan.hits
            .iter()
            .any(|h| (h.lambda - v).abs() <= 1e-6 * (1.0 + v.abs()))
    };
    let mut bands = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let a = scan.roots[2 * n];
        let b = scan.roots[2 * n + 1];
        let band = EigenvalueBand {
            n,
            a,
            b,
            degenerate_lower: near_hit(a),
            degenerate_upper: near_hit(b),
        };
        if b < a {
            return Err(OrbitError::BandOrder(format!(
                "band {n} has b = {b:.9e} below a = {a:.9e}"
            )));
        }
        if let Some(prev) = bands.last() {
            let prev: &EigenvalueBand = prev;
            if a < prev.b - 1e-9 * (1.0 + a.abs()) {
                return Err(OrbitError::BandOrder(format!(
                    "band {n} starts at {a:.9e}, below the previous edge {:.9e}",
                    prev.b
                )));
            }
        }
        check_band_rails(&scan.win, orbit, n, a, b)?;
        bands.push(band);
    }
    Ok(bands)
}

/// Critical point on the `gamma in {0, pi}` circle carrying the band edge
/// at `lambda`, recovered from the branch of `R = +-G` there.
fn critical_point(
    orbit: &AdjointOrbit,
    f: &FundamentalData,
) -> Result<OrbitPoint, OrbitError> {
    let m = f.dy2 - f.y1;
    match *orbit {
        AdjointOrbit::Hermitian { mu, nu } => {
            let r = mu * (f.dy2 + f.y1) + (nu * nu - mu * mu) * f.y2 - f.dy1;
            // Extremes of the characteristic over the orbit sit where
            // cos(eta + delta) = +-1 with eta the signed circle coordinate
            // (eta = 2 theta on gamma = 0, eta = -2 theta on gamma = pi).
            let delta = f64::atan2(2.0, m);
            let eta = if r >= 0.0 { -delta } else { PI - delta };
            let theta = eta.abs() / 2.0;
            let gamma = if eta >= 0.0 { 0.0 } else { PI };
            orbit.point(theta, gamma)
        }
        AdjointOrbit::Exceptional { alpha } => {
            let (s, c) = (alpha / 2.0).sin_cos();
            let r_scaled = c * (f.dy2 + f.y1) + 2.0 * s * f.y2;
            // The chart rescales by cos(alpha/2), which is negative past
            // alpha = pi; undo it before reading the branch.
            let r_pos = r_scaled * c >= 0.0;
            let phi = f64::atan2(2.0, m);
            let omega = if r_pos { -FRAC_PI_2 - phi } else { FRAC_PI_2 - phi };
            let mut folded = omega.rem_euclid(TAU);
            if folded > PI {
                folded -= TAU;
            }
            let sigma = if alpha < PI { 1.0 } else { -1.0 };
            let tau = (sigma * folded.sin()).asin();
            let gamma = if folded.cos() >= 0.0 { 0.0 } else { PI };
            orbit.point(tau, gamma)
        }
    }
}

/// Residual scale for checking that a recovered critical point actually
/// solves the characteristic equation at its edge.
fn char_scale(orbit: &AdjointOrbit, f: &FundamentalData) -> f64 {
    let m = f.dy2 - f.y1;
    match *orbit {
        AdjointOrbit::Hermitian { mu, nu } => {
            let r = mu * (f.dy2 + f.y1) + (nu * nu - mu * mu) * f.y2 - f.dy1;
            r.abs() + nu.abs() * (m * m + 4.0).sqrt() + 1.0
        }
        AdjointOrbit::Exceptional { alpha } => {
            let (s, c) = (alpha / 2.0).sin_cos();
            let r = c * (f.dy2 + f.y1) + 2.0 * s * f.y2;
            r.abs() + c.abs() * (m * m + 4.0).sqrt() + 1.0
        }
    }
}

/// Band ranges with critical points for `n = 0 .. n_max`.
///
/// Requires the orbit to avoid the characteristic curve on the scanned
/// window; otherwise band edges degenerate and the simple-root pairing
/// below is meaningless, reported as [`OrbitError::MeetsCurve`]. With no
/// explicit `window` the scan starts at the certified lower edge and
/// extends upward on its own; an explicit window that truncates a band
/// pairs an odd number of roots and errors with an extension request.
pub fn critical_values(
    q: &Potential,
    orbit: &AdjointOrbit,
    n_max: usize,
    window: Option<[f64; 2]>,
    tol: f64,
) -> Result<Vec<OrbitRange>, OrbitError> {
    let scan = scan_bands(q, orbit, n_max, window, tol)?;
    if let Some(h) = scan.hits.first() {
        return Err(OrbitError::MeetsCurve { lambda: h.lambda });
    }
    let need = 2 * (n_max + 1);
    if scan.roots.len() < need || (window.is_some() && scan.roots.len() % 2 == 1) {
        return Err(OrbitError::RootSearch(format!(
            "found {} range-function roots where {} band edges are required; extend the window",
            scan.roots.len(),
            need
        )));
    }
    for w in scan.roots.windows(2) {
        if (w[1] - w[0]).abs() <= 1e-7 * (1.0 + w[0].abs()) {
            return Err(OrbitError::DegenerateRoot { lambda: w[0] });
        }
    }

    let mut ranges = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let a = scan.roots[2 * n];
        let b = scan.roots[2 * n + 1];
        if !(a < b) {
            return Err(OrbitError::BandOrder(format!(
                "a_{n} = {a:.9e} not strictly below b_{n} = {b:.9e}"
            )));
        }
        if n > 0 {
            let prev_b = scan.roots[2 * n - 1];
            if !(prev_b < a) {
                return Err(OrbitError::BandOrder(format!(
                    "b_{} = {prev_b:.9e} not strictly below a_{n} = {a:.9e}",
                    n - 1
                )));
            }
        }
        check_band_rails(&scan.win, orbit, n, a, b)?;

        let mut points = [OrbitPoint {
            orbit: *orbit,
            coord: 0.0,
            gamma: 0.0,
        }; 2];
        for (slot, edge) in [a, b].into_iter().enumerate() {
            let f = fundamental_with_derivative(q, edge, tol)?;
            let p = critical_point(orbit, &f)?;
            let residual = char_on_orbit(&p, &f).abs();
            if residual > 1e-6 * char_scale(orbit, &f) {
                return Err(OrbitError::RootSearch(format!(
                    "critical point at lambda = {edge:.9e} leaves characteristic residual {residual:.3e}"
                )));
            }
            points[slot] = p;
        }
        ranges.push(OrbitRange {
            n,
            a_n: a,
            b_n: b,
            minimizer: points[0],
            maximizer: points[1],
        });
    }
    Ok(ranges)
}

// ---------------------------------------------------------------------------
// Level sets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSetShape {
    /// No condition on the orbit has the eigenvalue.
    Empty,
    /// Exactly one condition does.
    Point { point: OrbitPoint },
    /// A circle of conditions, parameterized by the mixing weight `x` of
    /// the orbit invariants in the curve eigenframe.
    Circle { x: f64 },
}

/// Orthogonal eigenframe of the curve value and the orbit invariants,
/// enough to rebuild any condition on the level circle.
#[derive(Debug, Clone, Copy)]
struct LevelFrame {
    qrot: [f64; 2],
    zeta1: C64,
    zeta2: C64,
    x: f64,
}

/// The set of conditions on one orbit having `kappa` among their
/// eigenvalues.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSet {
    pub kappa: f64,
    pub shape: LevelSetShape,
    #[serde(skip)]
    frame: Option<LevelFrame>,
}

impl LevelSet {
    /// A condition on the level set; `gamma` selects the circle point and
    /// is ignored for point sets. `None` when the set is empty.
    pub fn realize(&self, gamma: f64) -> Option<UnitaryBC> {
        match self.shape {
            LevelSetShape::Empty => None,
            LevelSetShape::Point { point } => orbit_point(&point).ok(),
            LevelSetShape::Circle { .. } => {
                let fr = self.frame.as_ref()?;
                let w = mix_matrix(fr.zeta1, fr.zeta2, fr.x, gamma);
                let qm = rot_matrix(fr.qrot);
                UnitaryBC::new(qm * w * qm.transpose()).ok()
            }
        }
    }
}

fn rot_matrix(cs: [f64; 2]) -> Mat2 {
    Mat2::from_real(cs[0], -cs[1], cs[1], cs[0])
}

/// Unitary with eigenvalues `(zeta1, zeta2)` whose first eigenvector makes
/// the mixing weight `x`, in the frame where the curve value is diagonal.
fn mix_matrix(z1: C64, z2: C64, x: f64, gamma: f64) -> Mat2 {
    let root = (x * (1.0 - x)).max(0.0).sqrt();
    let d = z1 - z2;
    Mat2::new(
        z1 * x + z2 * (1.0 - x),
        d * root * C64::from_polar(1.0, -gamma),
        d * root * C64::from_polar(1.0, gamma),
        z1 * (1.0 - x) + z2 * x,
    )
}

/// Chart coordinates of a condition known to lie on the orbit.
fn point_from_unitary(orbit: &AdjointOrbit, u: &UnitaryBC) -> Result<OrbitPoint, OrbitError> {
    match *orbit {
        AdjointOrbit::Hermitian { mu: _, nu } => {
            let h = bc::to_hermitian(u)?;
            let c2 = ((h.c - h.a) / (2.0 * nu)).clamp(-1.0, 1.0);
            let theta = 0.5 * c2.acos();
            let gamma = if h.b.norm() > 1e-10 { -h.b.arg() } else { 0.0 };
            orbit.point(theta, gamma)
        }
        AdjointOrbit::Exceptional { alpha } => match bc::exceptional_coords(u) {
            Some(x) => orbit.point(x.tau, x.gamma),
            None => {
                // Diagonal element: one of the two chart poles. Which one
                // depends on the slot of the -1 eigenvalue and on the
                // branch sign.
                let sigma = if alpha < PI { 1.0 } else { -1.0 };
                let tau = if (u.matrix().m[0][0] + C64::ONE).norm() < 1e-6 {
                    sigma * FRAC_PI_2
                } else {
                    -sigma * FRAC_PI_2
                };
                orbit.point(tau, 0.0)
            }
        },
    }
}

/// Conditions on the orbit with eigenvalue `kappa`.
///
/// The curve value and the orbit invariants are compared in the real
/// orthogonal frame that diagonalizes the curve value (its real and
/// imaginary parts are commuting symmetric matrices). The determinant
/// `det(U(x, gamma) - Gamma(kappa))` is linear in the mixing weight `x`,
/// which pins `x = -(zeta2 - rho1)(zeta1 - rho2) /
/// [(rho1 - rho2)(zeta1 - zeta2)]`; the swapped-slot evaluation must agree
/// with `1 - x`, and both are checked before truncation to the real axis.
pub fn level_set(
    q: &Potential,
    orbit: &AdjointOrbit,
    kappa: f64,
    tol: f64,
) -> Result<LevelSet, OrbitError> {
    orbit.validate()?;
    let f = fundamental(q, kappa, tol)?;
    let g = gamma(&f)?.matrix();

    let off = (g.m[0][1] + g.m[1][0]) * 0.5;
    let ddiff = g.m[0][0] - g.m[1][1];
    let phi = if off.re.abs().max(off.im.abs()) < 1e-14 {
        0.0
    } else if off.re.abs() >= off.im.abs() {
        0.5 * f64::atan2(2.0 * off.re, ddiff.re)
    } else {
        0.5 * f64::atan2(2.0 * off.im, ddiff.im)
    };
    let (sphi, cphi) = phi.sin_cos();
    let qm = rot_matrix([cphi, sphi]);
    let diag = qm.transpose() * g * qm;
    let (rho1, rho2) = (diag.m[0][0], diag.m[1][1]);
    let (z1, z2) = orbit.invariants();

    let close = |a: C64, b: C64| (a - b).norm() <= MEMBERSHIP_TOL;
    if (close(z1, rho1) && close(z2, rho2)) || (close(z1, rho2) && close(z2, rho1)) {
        // The orbit passes through the curve at kappa; the level set
        // degenerates to that very point.
        let u = UnitaryBC::new(g)?;
        let point = point_from_unitary(orbit, &u)?;
        return Ok(LevelSet {
            kappa,
            shape: LevelSetShape::Point { point },
            frame: None,
        });
    }

    let l0 = (z2 - rho1) * (z1 - rho2);
    let l1 = (z1 - rho1) * (z2 - rho2);
    let dl = (z1 - z2) * (rho1 - rho2);
    let x = -l0 / dl;
    let x_swapped = l1 / dl;
    if (x + x_swapped - C64::ONE).norm() > 1e-8 || x.im.abs() > 1e-8 {
        return Err(OrbitError::RootSearch(format!(
            "level-set weight failed its reality check: x = {x}, swapped complement = {x_swapped}"
        )));
    }
    let xr = x.re;

    let point_at = |w: Mat2| -> Result<LevelSet, OrbitError> {
        let u = UnitaryBC::new(qm * w * qm.transpose())?;
        let point = point_from_unitary(orbit, &u)?;
        Ok(LevelSet {
            kappa,
            shape: LevelSetShape::Point { point },
            frame: None,
        })
    };
    if xr.abs() <= 1e-8 {
        return point_at(Mat2::diag(z2, z1));
    }
    if (xr - 1.0).abs() <= 1e-8 {
        return point_at(Mat2::diag(z1, z2));
    }
    if xr > 0.0 && xr < 1.0 {
        return Ok(LevelSet {
            kappa,
            shape: LevelSetShape::Circle { x: xr },
            frame: Some(LevelFrame {
                qrot: [cphi, sphi],
                zeta1: z1,
                zeta2: z2,
                x: xr,
            }),
        });
    }
    Ok(LevelSet {
        kappa,
        shape: LevelSetShape::Empty,
        frame: None,
    })
}

// ---------------------------------------------------------------------------
// Verification report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct OrbitCheck {
    pub name: String,
    pub pass: bool,
    pub skipped: bool,
    pub detail: String,
}

/// Machine-checkable record of the band theorems on one orbit.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub orbit: AdjointOrbit,
    pub n_max: usize,
    pub grid: [usize; 2],
    pub window: [f64; 2],
    pub certification: Certification,
    /// Whether the orbit avoids the characteristic curve on the window,
    /// the hypothesis behind band interlacing and critical-point counts.
    pub hypothesis_ok: bool,
    pub curve_hits: Vec<f64>,
    pub checks: Vec<OrbitCheck>,
    /// All non-skipped checks passed.
    pub pass: bool,
}

fn check(name: &str, pass: bool, detail: String) -> OrbitCheck {
    OrbitCheck {
        name: name.into(),
        pass,
        skipped: false,
        detail,
    }
}

fn skipped(name: &str) -> OrbitCheck {
    OrbitCheck {
        name: name.into(),
        pass: true,
        skipped: true,
        detail: "orbit meets the curve; eigenvalue indexing is best-effort".into(),
    }
}

/// Largest eigenvalue jump between grid neighbors on sheet `n`, the local
/// gradient scale behind the containment slack.
fn max_neighbor_jump(surface: &Surface, n: usize) -> f64 {
    let (nc, ng) = (surface.coords.len(), surface.gammas.len());
    let lam = |i: usize, j: usize| surface.points[i * ng + j].lambdas[n];
    let mut jump: f64 = 0.0;
    for i in 0..nc {
        for j in 0..ng {
            if i + 1 < nc {
                jump = jump.max((lam(i + 1, j) - lam(i, j)).abs());
            }
            jump = jump.max((lam(i, (j + 1) % ng) - lam(i, j)).abs());
        }
    }
    jump
}

/// Values of sheet `n` along the real circle `gamma in {0, pi}`, traversed
/// as one cycle: forward along gamma = 0, back along gamma = pi.
fn real_circle_cycle(surface: &Surface, n: usize) -> Vec<f64> {
    let (nc, ng) = (surface.coords.len(), surface.gammas.len());
    let jpi = (0..ng)
        .min_by(|&a, &b| {
            let da = (surface.gammas[a] - PI).abs();
            let db = (surface.gammas[b] - PI).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let lam = |i: usize, j: usize| surface.points[i * ng + j].lambdas[n];
    let mut cycle: Vec<f64> = (0..nc).map(|i| lam(i, 0)).collect();
    cycle.extend((1..nc - 1).rev().map(|i| lam(i, jpi)));
    cycle
}

/// Sign-change clusters of the cyclic first difference, with a curvature
/// proxy at the transitions. Ties below the tolerance are ignored.
fn cycle_transitions(cycle: &[f64]) -> (usize, f64) {
    let k = cycle.len();
    let mut signs: Vec<i32> = Vec::new();
    let mut diffs: Vec<f64> = Vec::new();
    for i in 0..k {
        let d = cycle[(i + 1) % k] - cycle[i];
        if d.abs() > 1e-10 * (1.0 + cycle[i].abs()) {
            signs.push(sgn(d));
            diffs.push(d);
        }
    }
    if signs.is_empty() {
        return (0, 0.0);
    }
    let mut transitions = 0usize;
    let mut curvature = f64::INFINITY;
    for i in 0..signs.len() {
        let j = (i + 1) % signs.len();
        if signs[i] != signs[j] {
            transitions += 1;
            curvature = curvature.min((diffs[j] - diffs[i]).abs());
        }
    }
    (transitions, if curvature.is_finite() { curvature } else { 0.0 })
}

/// Run the band theorems against a sampled surface and a fresh band
/// computation, producing per-assertion pass/fail lines with
/// counterexample coordinates.
///
/// When the orbit meets the curve inside the window the containment,
/// interlacing, and extremum-location checks are skipped and the report
/// flags the hypothesis failure instead.
pub fn verify_orbit_theorems(
    q: &Potential,
    orbit: &AdjointOrbit,
    n_max: usize,
    grid: [usize; 2],
    tol: f64,
) -> Result<OrbitReport, OrbitError> {
    let surface = lambda_surface(q, orbit, n_max, grid, tol)?;
    let hypothesis_ok = surface.curve_hits.is_empty();
    let ranges = if hypothesis_ok {
        Some(critical_values(q, orbit, n_max, None, tol)?)
    } else {
        None
    };
    let mut checks: Vec<OrbitCheck> = Vec::new();

    match &ranges {
        Some(ranges) => {
            let mut pass = true;
            let mut detail = String::new();
            for r in ranges {
                let eps = 10.0 * max_neighbor_jump(&surface, r.n) + 1e-9;
                let ex = &surface.extrema[r.n];
                if ex.min < r.a_n - eps || ex.max > r.b_n + eps {
                    pass = false;
                    detail.push_str(&format!(
                        "sheet {}: grid range [{:.9e}, {:.9e}] escapes [{:.9e}, {:.9e}] \
                         (slack {:.3e}, min at ({:.4}, {:.4}), max at ({:.4}, {:.4})); ",
                        r.n, ex.min, ex.max, r.a_n, r.b_n, eps,
                        ex.min_coord, ex.min_gamma, ex.max_coord, ex.max_gamma
                    ));
                }
            }
            if pass {
                detail = format!("{} sheets inside their bands", ranges.len());
            }
            checks.push(check("range_containment", pass, detail));

            let mut pass = true;
            let mut detail = String::new();
            for w in ranges.windows(2) {
                if !(w[0].a_n < w[0].b_n && w[0].b_n < w[1].a_n) {
                    pass = false;
                    detail.push_str(&format!(
                        "bands {} and {} fail strict interlacing: [{:.9e}, {:.9e}], [{:.9e}, {:.9e}]; ",
                        w[0].n, w[1].n, w[0].a_n, w[0].b_n, w[1].a_n, w[1].b_n
                    ));
                }
            }
            if let Some(r) = ranges.last() {
                if !(r.a_n < r.b_n) {
                    pass = false;
                    detail.push_str(&format!("band {} is not a proper interval; ", r.n));
                }
            }
            if pass {
                detail = "a_n < b_n < a_n+1 throughout".into();
            }
            checks.push(check("interlacing", pass, detail));

            let cell_g = TAU / surface.gammas.len() as f64;
            let [clo, chi] = orbit.coord_range();
            let cell_c = (chi - clo) / (surface.coords.len() - 1) as f64;
            let on_circle = |coord: f64, g: f64| {
                let dg = [g, (g - PI).abs(), (g - TAU).abs()]
                    .into_iter()
                    .fold(f64::INFINITY, f64::min);
                // Chart poles sit on the circle for every gamma.
                let dp = (coord - clo).abs().min((coord - chi).abs());
                dg <= cell_g + 1e-12 || dp <= cell_c + 1e-12
            };
            let mut pass = true;
            let mut detail = String::new();
            for ex in &surface.extrema {
                for (what, coord, g) in [
                    ("min", ex.min_coord, ex.min_gamma),
                    ("max", ex.max_coord, ex.max_gamma),
                ] {
                    if !on_circle(coord, g) {
                        pass = false;
                        detail.push_str(&format!(
                            "sheet {} {what} at (coord = {:.4}, gamma = {:.4}) is off the real circle; ",
                            ex.n, coord, g
                        ));
                    }
                }
            }
            if pass {
                detail = "grid extrema within one cell of gamma in {0, pi}".into();
            }
            checks.push(check("extrema_on_real_circle", pass, detail));
        }
        None => {
            checks.push(skipped("range_containment"));
            checks.push(skipped("interlacing"));
            checks.push(skipped("extrema_on_real_circle"));
        }
    }

    // Comparison bounds hold pointwise, curve intersections or not.
    {
        let refs = spectrum::reference_spectra(q, n_max, tol)?;
        let slack = |v: f64| 1e-6 * (1.0 + v.abs());
        let mut pass = true;
        let mut detail_parts: Vec<String> = Vec::new();
        for ex in &surface.extrema {
            let d = refs.dirichlet[ex.n];
            if ex.max > d + slack(d) {
                pass = false;
                detail_parts.push(format!(
                    "sheet {} max {:.9e} exceeds the Dirichlet ceiling {:.9e}",
                    ex.n, ex.max, d
                ));
            }
        }
        match *orbit {
            AdjointOrbit::Hermitian { mu, nu } => {
                let (lower, upper) = spectrum::robin_bracket(q, mu, nu, n_max, tol)?;
                for ex in &surface.extrema {
                    if ex.min < lower[ex.n] - slack(lower[ex.n]) {
                        pass = false;
                        detail_parts.push(format!(
                            "sheet {} min {:.9e} undershoots the Robin floor {:.9e}",
                            ex.n, ex.min, lower[ex.n]
                        ));
                    }
                    if ex.max > upper[ex.n] + slack(upper[ex.n]) {
                        pass = false;
                        detail_parts.push(format!(
                            "sheet {} max {:.9e} exceeds the Robin ceiling {:.9e}",
                            ex.n, ex.max, upper[ex.n]
                        ));
                    }
                }
                if pass {
                    detail_parts.push("symmetric-Robin bracket and Dirichlet ceiling hold".into());
                }
            }
            AdjointOrbit::Exceptional { alpha } if alpha < PI => {
                for ex in &surface.extrema {
                    if ex.min < refs.neumann[ex.n] - slack(refs.neumann[ex.n]) {
                        pass = false;
                        detail_parts.push(format!(
                            "sheet {} min {:.9e} undershoots the Neumann floor {:.9e}",
                            ex.n, ex.min, refs.neumann[ex.n]
                        ));
                    }
                }
                if pass {
                    detail_parts.push("Neumann floor and Dirichlet ceiling hold".into());
                }
            }
            AdjointOrbit::Exceptional { .. } => {
                detail_parts.push(format!(
                    "no comparison floor for this branch; scanned window starts at {:.6e}",
                    surface.window[0]
                ));
            }
        }
        checks.push(check("comparison_bounds", pass, detail_parts.join("; ")));
    }

    // Two critical points per sheet: the directional derivative along the
    // real circle changes sign in exactly two clusters.
    {
        let mut pass = true;
        let mut details: Vec<String> = Vec::new();
        for n in 0..=n_max {
            let cycle = real_circle_cycle(&surface, n);
            let (transitions, curvature) = cycle_transitions(&cycle);
            if transitions != 2 {
                pass = false;
                details.push(format!(
                    "sheet {n}: {transitions} sign-change clusters along the real circle"
                ));
            } else {
                details.push(format!(
                    "sheet {n}: 2 clusters, curvature proxy {curvature:.3e}"
                ));
            }
        }
        checks.push(check("two_critical_points", pass, details.join("; ")));
    }

    let pass = checks.iter().all(|c| c.skipped || c.pass);
    Ok(OrbitReport {
        orbit: *orbit,
        n_max,
        grid,
        window: surface.window,
        certification: surface.certification,
        hypothesis_ok,
        curve_hits: surface.curve_hits.clone(),
        checks,
        pass,
    })
}

/// Set distance between unordered eigenvalue pairs.
pub(crate) fn invariant_set_distance(a: (C64, C64), b: (C64, C64)) -> f64 {
    let straight = (a.0 - b.0).norm() + (a.1 - b.1).norm();
    let crossed = (a.0 - b.1).norm() + (a.1 - b.0).norm();
    straight.min(crossed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::{classify, orbit_invariants, to_hermitian};
    use crate::fundsol::DEFAULT_TOL;
    use crate::spectrum::{eigenvalues, prufer_separated, EigOptions};
    use crate::bc::SeparatedBC;

    const Q0: Potential = Potential::Zero;

    fn opts(tol: f64) -> EigOptions {
        EigOptions { tol, window: None }
    }

    #[test]
    fn constructors_reject_invalid_parameters() {
        assert!(AdjointOrbit::hermitian(0.0, 0.0).is_err());
        assert!(AdjointOrbit::hermitian(0.0, -1.0).is_err());
        assert!(AdjointOrbit::hermitian(f64::NAN, 1.0).is_err());
        assert!(AdjointOrbit::exceptional(PI).is_err());
        assert!(AdjointOrbit::exceptional(-0.1).is_err());
        assert!(AdjointOrbit::exceptional(TAU).is_err());
        assert!(AdjointOrbit::hermitian(0.3, 1.2).is_ok());
        assert!(AdjointOrbit::exceptional(0.0).is_ok());
    }

    #[test]
    fn points_validate_coordinates() {
        let o = AdjointOrbit::hermitian(0.0, 1.0).unwrap();
        assert!(o.point(-0.2, 0.0).is_err());
        assert!(o.point(FRAC_PI_2 + 0.2, 0.0).is_err());
        assert!(o.point(0.3, f64::INFINITY).is_err());
        let p = o.point(0.3, -1.0).unwrap();
        assert!((p.gamma - (TAU - 1.0)).abs() < 1e-15);
        let e = AdjointOrbit::exceptional(2.0).unwrap();
        assert!(e.point(2.0, 0.0).is_err());
        assert!(e.point_from_t(0.9, 0.0).is_err(), "t beyond cos(alpha/2)");
        let p = e.point_from_t(0.2, 0.5).unwrap();
        assert!((p.t().unwrap() - 0.2).abs() < 1e-12);
        assert!(o.point_from_t(0.2, 0.0).is_err());
    }

    #[test]
    fn realized_points_sit_on_their_orbit() {
        let cases: Vec<(AdjointOrbit, f64, f64)> = vec![
            (AdjointOrbit::hermitian(0.0, 1.0).unwrap(), 0.0, 0.0),
            (AdjointOrbit::hermitian(0.0, 1.0).unwrap(), FRAC_PI_2, 2.2),
            (AdjointOrbit::hermitian(1.0, 1.0).unwrap(), 0.7853, 3.14),
            (AdjointOrbit::hermitian(-0.4, 0.35).unwrap(), 1.1, 5.9),
            (AdjointOrbit::exceptional(0.9).unwrap(), 0.4, 1.0),
            (AdjointOrbit::exceptional(0.9).unwrap(), FRAC_PI_2, 0.0),
            (AdjointOrbit::exceptional(0.9).unwrap(), -FRAC_PI_2, 0.0),
            (AdjointOrbit::exceptional(4.5).unwrap(), -0.8, 2.0),
            (AdjointOrbit::exceptional(4.5).unwrap(), FRAC_PI_2, 1.0),
            (AdjointOrbit::exceptional(5.9).unwrap(), 0.05, 4.4),
        ];
        for (orbit, coord, gamma) in cases {
            let p = orbit.point(coord, gamma).unwrap();
            let u = orbit_point(&p).unwrap();
            let d = invariant_set_distance(orbit_invariants(&u), orbit.invariants());
            assert!(
                d < MEMBERSHIP_TOL,
                "invariant mismatch {d:.3e} at {orbit:?}, coord {coord}, gamma {gamma}"
            );
        }
    }

    #[test]
    fn hermitian_chart_is_diagonal_at_interval_ends() {
        let o = AdjointOrbit::hermitian(0.25, 0.75).unwrap();
        let h0 = to_hermitian(&orbit_point(&o.point(0.0, 1.3).unwrap()).unwrap()).unwrap();
        assert!((h0.a - (-0.5)).abs() < 1e-10 && (h0.c - 1.0).abs() < 1e-10);
        assert!(h0.b.norm() < 1e-10);
        let h1 = to_hermitian(&orbit_point(&o.point(FRAC_PI_2, 0.0).unwrap()).unwrap()).unwrap();
        assert!((h1.a - 1.0).abs() < 1e-10 && (h1.c - (-0.5)).abs() < 1e-10);
    }

    #[test]
    fn exceptional_poles_are_diagonal() {
        for alpha in [0.7, 4.9] {
            let o = AdjointOrbit::exceptional(alpha).unwrap();
            for tau in [-FRAC_PI_2, FRAC_PI_2] {
                let u = orbit_point(&o.point(tau, 2.0).unwrap()).unwrap();
                let m = u.matrix();
                assert!(
                    m.m[0][1].norm() < 1e-12 && m.m[1][0].norm() < 1e-12,
                    "pole at tau = {tau} not diagonal for alpha = {alpha}"
                );
            }
        }
    }

    #[test]
    fn separated_points_and_real_circle() {
        let o = AdjointOrbit::hermitian(0.3, 0.8).unwrap();
        for theta in [0.0, FRAC_PI_2] {
            let c = classify(&orbit_point(&o.point(theta, 1.0).unwrap()).unwrap());
            assert!(c.is_separated, "theta = {theta} should separate");
        }
        let interior = classify(&orbit_point(&o.point(0.6, 1.1).unwrap()).unwrap());
        assert!(!interior.is_separated);
        assert!(!interior.is_real);
        for gamma in [0.0, PI] {
            let c = classify(&orbit_point(&o.point(0.6, gamma).unwrap()).unwrap());
            assert!(c.is_real, "gamma = {gamma} should be real");
        }
    }

    #[test]
    fn char_matches_hermitian_chart_of_realized_condition() {
        let o = AdjointOrbit::hermitian(0.4, 1.3).unwrap();
        let p = o.point(0.9, 2.7).unwrap();
        let u = orbit_point(&p).unwrap();
        let h = to_hermitian(&u).unwrap();
        for lam in [-3.0, 0.5, 7.7, 40.0] {
            let f = fundamental(&Q0, lam, DEFAULT_TOL).unwrap();
            let direct = char_on_orbit(&p, &f);
            let via_chart = spectrum::char_real_u1(&h, &f);
            assert!(
                (direct - via_chart).abs() <= 1e-9 * (1.0 + direct.abs()),
                "lambda = {lam}: {direct} vs {via_chart}"
            );
        }
    }

    #[test]
    fn char_vanishes_exactly_on_the_spectrum() {
        let o = AdjointOrbit::hermitian(0.0, 1.0).unwrap();
        let p = o.point(PI / 4.0, FRAC_PI_2).unwrap();
        let u = orbit_point(&p).unwrap();
        let slice = eigenvalues(&Q0, &u, 3, opts(1e-9)).unwrap();
        assert!(slice.indexed_count() >= 4);
        for &lam in &slice.eigenvalues {
            let f = fundamental(&Q0, lam, DEFAULT_TOL).unwrap();
            let v = char_on_orbit(&p, &f);
            let scale = char_scale(&o, &f);
            assert!(
                v.abs() < 1e-6 * scale,
                "characteristic residual {v:.3e} at eigenvalue {lam}"
            );
        }
    }

    #[test]
    fn tau_form_expansion_matches_chart() {
        let alpha = 1.1f64;
        let o = AdjointOrbit::exceptional(alpha).unwrap();
        let (tau, gam) = (0.6, 2.3);
        let p = o.point(tau, gam).unwrap();
        let c = (alpha / 2.0).cos();
        for lam in [-2.0, 3.7, 12.0] {
            let f = fundamental(&Q0, lam, DEFAULT_TOL).unwrap();
            let direct = char_on_orbit(&p, &f);
            let expanded = c
                * ((1.0 + tau.sin()) * f.dy2
                    + (1.0 - tau.sin()) * f.y1
                    + 2.0 * (alpha / 2.0).tan() * f.y2
                    + 2.0 * tau.cos() * gam.cos());
            assert!(
                (direct - expanded).abs() <= 1e-10 * (1.0 + direct.abs()),
                "lambda = {lam}: {direct} vs {expanded}"
            );
        }
    }

    #[test]
    fn pole_characteristics_reduce_to_separated_problems() {
        // tau = +pi/2 pins the left endpoint to Dirichlet for alpha < pi
        // and the right one for alpha > pi; either way the chart must
        // vanish exactly on the spectrum of the diagonal condition.
        for alpha in [0.8, 4.0] {
            let o = AdjointOrbit::exceptional(alpha).unwrap();
            for tau in [FRAC_PI_2, -FRAC_PI_2] {
                let p = o.point(tau, 0.0).unwrap();
                let u = orbit_point(&p).unwrap();
                let slice = eigenvalues(&Q0, &u, 2, opts(1e-9)).unwrap();
                for &lam in &slice.eigenvalues {
                    let f = fundamental(&Q0, lam, DEFAULT_TOL).unwrap();
                    let v = char_on_orbit(&p, &f);
                    assert!(
                        v.abs() < 1e-6 * char_scale(&o, &f),
                        "alpha = {alpha}, tau = {tau}: residual {v:.3e} at {lam}"
                    );
                }
            }
        }
    }

    #[test]
    fn free_exceptional_critical_points_sit_at_t_zero() {
        let o = AdjointOrbit::exceptional(FRAC_PI_2).unwrap();
        let ranges = critical_values(&Q0, &o, 1, None, 1e-9).unwrap();
        assert_eq!(ranges.len(), 2);
        for r in &ranges {
            assert!(r.a_n < r.b_n);
            for p in [&r.minimizer, &r.maximizer] {
                assert!(
                    p.t().unwrap().abs() <= 1e-6,
                    "band {}: t = {:?}",
                    r.n,
                    p.t()
                );
                assert!(
                    p.gamma.abs() <= 1e-6 || (p.gamma - PI).abs() <= 1e-6,
                    "band {}: gamma = {}",
                    r.n,
                    p.gamma
                );
            }
        }
        assert!(ranges[0].b_n < ranges[1].a_n);
        // The edges really are attained: the n-th eigenvalue at the
        // recovered points.
        for r in &ranges {
            let for_edge = [(r.a_n, &r.minimizer), (r.b_n, &r.maximizer)];
            for (edge, point) in for_edge {
                let u = orbit_point(point).unwrap();
                let slice = eigenvalues(&Q0, &u, r.n, opts(1e-9)).unwrap();
                let lam = slice.nth(r.n).expect("indexed eigenvalue");
                assert!(
                    (lam - edge).abs() <= 1e-6 * (1.0 + edge.abs()),
                    "band {}: edge {edge} vs attained {lam}",
                    r.n
                );
            }
        }
    }

    #[test]
    fn free_hermitian_critical_points_sit_at_quarter_pi() {
        let o = AdjointOrbit::hermitian(0.0, 1.0).unwrap();
        let ranges = critical_values(&Q0, &o, 1, None, 1e-9).unwrap();
        for r in &ranges {
            for p in [&r.minimizer, &r.maximizer] {
                assert!(
                    (p.coord - PI / 4.0).abs() <= 1e-6,
                    "band {}: theta = {}",
                    r.n,
                    p.coord
                );
                assert!(p.gamma.abs() <= 1e-6 || (p.gamma - PI).abs() <= 1e-6);
            }
            let u = orbit_point(&r.minimizer).unwrap();
            let slice = eigenvalues(&Q0, &u, r.n, opts(1e-9)).unwrap();
            let lam = slice.nth(r.n).unwrap();
            assert!((lam - r.a_n).abs() <= 1e-6 * (1.0 + r.a_n.abs()));
        }
    }

    #[test]
    fn curve_crossing_orbit_is_gated_but_banded() {
        let o = AdjointOrbit::hermitian(1.0, 1.0).unwrap();
        match critical_values(&Q0, &o, 2, None, 1e-9) {
            Err(OrbitError::MeetsCurve { lambda }) => {
                assert!(lambda.abs() < 1e-6, "hit expected at 0, got {lambda}")
            }
            other => panic!("expected a curve-intersection error, got {other:?}"),
        }
        let bands = eigenvalue_bands(&Q0, &o, 2, 1e-9).unwrap();
        assert_eq!(bands.len(), 3);
        // Bands 0 and 1 share the degenerate edge at 0.
        assert!(bands[0].b.abs() <= 1e-6, "b_0 = {}", bands[0].b);
        assert!(bands[1].a.abs() <= 1e-6, "a_1 = {}", bands[1].a);
        assert!(bands[0].degenerate_upper && bands[1].degenerate_lower);
        assert!(!bands[0].degenerate_lower && !bands[1].degenerate_upper);
        assert!((bands[1].b - PI * PI).abs() <= 1e-6, "b_1 = {}", bands[1].b);
        assert!(bands[0].a < -5.0 && bands[0].a > -6.5, "a_0 = {}", bands[0].a);
        // Witness for the upper edge of band 1: at theta = pi/4, gamma = 0
        // the realized condition has lambda_1 = pi^2 exactly.
        let u = orbit_point(&o.point(PI / 4.0, 0.0).unwrap()).unwrap();
        let slice = eigenvalues(&Q0, &u, 1, opts(1e-9)).unwrap();
        assert!((slice.nth(1).unwrap() - PI * PI).abs() < 1e-7);
    }

    #[test]
    fn generic_hermitian_bands_respect_rails() {
        let o = AdjointOrbit::hermitian(0.3, 0.7).unwrap();
        let bands = eigenvalue_bands(&Q0, &o, 2, 1e-9).unwrap();
        let (lower, upper) = spectrum::robin_bracket(&Q0, 0.3, 0.7, 2, 1e-9).unwrap();
        for b in &bands {
            assert!(b.a >= lower[b.n] - 1e-6);
            assert!(b.b <= upper[b.n] + 1e-6);
            assert!(!b.degenerate_lower && !b.degenerate_upper);
        }
        for w in bands.windows(2) {
            assert!(w[0].b < w[1].a);
        }
    }

    #[test]
    fn level_set_circle_at_half() {
        // Invariants e^{-i pi/3}, e^{i pi/3} against the curve value at
        // pi^2, whose eigenvalues are -1 and 1: the mixing weight is
        // exactly one half.
        let nu = 1.0 / 3.0f64.sqrt();
        let o = AdjointOrbit::hermitian(0.0, nu).unwrap();
        let kappa = PI * PI;
        let ls = level_set(&Q0, &o, kappa, DEFAULT_TOL).unwrap();
        let x = match ls.shape {
            LevelSetShape::Circle { x } => x,
            other => panic!("expected a circle, got {other:?}"),
        };
        assert!((x - 0.5).abs() < 1e-9, "x = {x}");
        let g = gamma(&fundamental(&Q0, kappa, DEFAULT_TOL).unwrap())
            .unwrap()
            .matrix();
        for gam in [0.0, 1.0, PI, 4.4] {
            let u = ls.realize(gam).expect("circle point");
            let d = invariant_set_distance(orbit_invariants(&u), o.invariants());
            assert!(d < 1e-8, "realized point left the orbit: {d:.3e}");
            let det = (u.matrix() - g).det().norm();
            assert!(det < 1e-8, "gamma = {gam}: det residual {det:.3e}");
        }
    }

    #[test]
    fn level_set_empty_in_a_gap() {
        // kappa = 5 falls in the first gap of this orbit's bands, so no
        // condition on it has that eigenvalue.
        let nu = 1.0 / 3.0f64.sqrt();
        let o = AdjointOrbit::hermitian(0.0, nu).unwrap();
        let ls = level_set(&Q0, &o, 5.0, DEFAULT_TOL).unwrap();
        assert!(matches!(ls.shape, LevelSetShape::Empty), "{:?}", ls.shape);
        assert!(ls.realize(0.0).is_none());
    }

    #[test]
    fn level_set_keeps_sign_of_determinant_expansion() {
        // Invariants {-i, i} against curve eigenvalues {-1, 1}: the
        // endpoint expansion of the determinant gives x = 1/2, and the
        // realized conditions do carry the eigenvalue. (The opposite
        // denominator sign would misreport this set as empty.)
        let o = AdjointOrbit::hermitian(0.0, 1.0).unwrap();
        let kappa = PI * PI;
        let ls = level_set(&Q0, &o, kappa, DEFAULT_TOL).unwrap();
        let x = match ls.shape {
            LevelSetShape::Circle { x } => x,
            other => panic!("expected a circle, got {other:?}"),
        };
        assert!((x - 0.5).abs() < 1e-9, "x = {x}");
        let g = gamma(&fundamental(&Q0, kappa, DEFAULT_TOL).unwrap())
            .unwrap()
            .matrix();
        let u = ls.realize(0.7).unwrap();
        assert!((u.matrix() - g).det().norm() < 1e-8);
    }

    #[test]
    fn level_set_point_at_matched_invariant() {
        // The separated condition -i I sits on the orbit with invariants
        // {-i, i}; at its ground eigenvalue one curve eigenvalue equals -i
        // and the level set collapses to a point.
        let o = AdjointOrbit::hermitian(0.0, 1.0).unwrap();
        let s = SeparatedBC::new(3.0 * PI / 4.0, PI / 4.0).unwrap();
        let kappa = prufer_separated(&Q0, &s, 0, 1e-10).unwrap();
        let ls = level_set(&Q0, &o, kappa, DEFAULT_TOL).unwrap();
        let p = match ls.shape {
            LevelSetShape::Point { point } => point,
            other => panic!("expected a point, got {other:?}"),
        };
        let u = orbit_point(&p).unwrap();
        let slice = eigenvalues(&Q0, &u, 1, opts(1e-9)).unwrap();
        let hitk = slice
            .eigenvalues
            .iter()
            .any(|&lam| (lam - kappa).abs() < 1e-6 * (1.0 + kappa.abs()));
        assert!(hitk, "kappa = {kappa} not among {:?}", slice.eigenvalues);
    }

    #[test]
    fn point_from_unitary_round_trips() {
        let cases: Vec<(AdjointOrbit, f64, f64)> = vec![
            (AdjointOrbit::hermitian(0.2, 0.9).unwrap(), 0.7, 1.9),
            (AdjointOrbit::hermitian(0.2, 0.9).unwrap(), 0.0, 0.0),
            (AdjointOrbit::exceptional(1.3).unwrap(), 0.4, 5.0),
            (AdjointOrbit::exceptional(4.2).unwrap(), -0.9, 0.3),
            (AdjointOrbit::exceptional(1.3).unwrap(), FRAC_PI_2, 0.0),
            (AdjointOrbit::exceptional(4.2).unwrap(), -FRAC_PI_2, 0.0),
        ];
        for (orbit, coord, gam) in cases {
            let p = orbit.point(coord, gam).unwrap();
            let u = orbit_point(&p).unwrap();
            let back = point_from_unitary(&orbit, &u).unwrap();
            assert!(
                (back.coord - coord).abs() < 1e-8,
                "{orbit:?}: coord {} vs {coord}",
                back.coord
            );
            let at_pole = (coord.abs() - FRAC_PI_2).abs() < 1e-12 || coord == 0.0;
            if !at_pole {
                assert!(
                    (back.gamma - p.gamma).abs() < 1e-8,
                    "{orbit:?}: gamma {} vs {}",
                    back.gamma,
                    p.gamma
                );
            }
        }
    }

    #[test]
    fn surface_respects_bands_and_matches_direct_solves() {
        let o = AdjointOrbit::hermitian(0.0, 1.0).unwrap();
        let surface = lambda_surface(&Q0, &o, 1, [5, 4], 1e-9).unwrap();
        assert_eq!(surface.points.len(), 20);
        let ranges = critical_values(&Q0, &o, 1, None, 1e-9).unwrap();
        for p in &surface.points {
            for (n, lam) in p.lambdas.iter().enumerate() {
                assert!(
                    *lam >= ranges[n].a_n - 1e-7 && *lam <= ranges[n].b_n + 1e-7,
                    "lambda_{n} = {lam} at ({}, {}) outside [{}, {}]",
                    p.coord,
                    p.gamma,
                    ranges[n].a_n,
                    ranges[n].b_n
                );
            }
        }
        // Cross-check one interior grid point against the generic solver.
        let p = &surface.points[6];
        let u = orbit_point(&o.point(p.coord, p.gamma).unwrap()).unwrap();
        let slice = eigenvalues(&Q0, &u, 1, opts(1e-9)).unwrap();
        for n in 0..=1 {
            let want = slice.nth(n).unwrap();
            assert!(
                (p.lambdas[n] - want).abs() <= 1e-7 * (1.0 + want.abs()),
                "sheet {n}: {} vs {want}",
                p.lambdas[n]
            );
        }
    }

    #[test]
    fn upper_branch_surface_has_certified_shape() {
        let o = AdjointOrbit::exceptional(3.0 * FRAC_PI_2).unwrap();
        let surface = lambda_surface(&Q0, &o, 0, [3, 4], 1e-8).unwrap();
        // window floored by the symmetric Robin problem with constant
        // -tan(3 pi / 4) = 1, whose ground state sits near -1.44
        assert!(surface.window[0] <= -1.4, "window {:?}", surface.window);
        assert!(matches!(surface.certification, Certification::RobinBracketed));
        for p in &surface.points {
            assert_eq!(p.lambdas.len(), 1);
        }
    }

    #[test]
    fn verification_report_passes_on_free_orbit() {
        let o = AdjointOrbit::hermitian(0.0, 1.0).unwrap();
        let report = verify_orbit_theorems(&Q0, &o, 1, [9, 8], 1e-8).unwrap();
        assert!(report.hypothesis_ok);
        assert!(report.curve_hits.is_empty());
        for c in &report.checks {
            assert!(!c.skipped, "{} unexpectedly skipped", c.name);
            assert!(c.pass, "{} failed: {}", c.name, c.detail);
        }
        assert!(report.pass);
    }

    #[test]
    fn verification_report_flags_curve_crossing() {
        let o = AdjointOrbit::hermitian(1.0, 1.0).unwrap();
        let report = verify_orbit_theorems(&Q0, &o, 1, [9, 8], 1e-8).unwrap();
        assert!(!report.hypothesis_ok);
        assert!(!report.curve_hits.is_empty());
        let skipped_names: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.skipped)
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(
            skipped_names,
            ["range_containment", "interlacing", "extrema_on_real_circle"]
        );
    }
}
