//! The characteristic curve of a potential inside U(2).
//!
//! For each spectral parameter the endpoint data of the fundamental system
//! determines a unique symmetric unitary `Gamma(lambda)`, and `lambda` is an
//! eigenvalue of the boundary problem for `U` exactly when `det(U -
//! Gamma(lambda)) = 0`. Double eigenvalues happen exactly at `U =
//! Gamma(lambda)`, so the curve is the locus of degenerate spectra.

use crate::bc::UnitaryBC;
use crate::fundsol::{fundamental, FundamentalData, FundsolError};
use crate::mat2::{c64, C64, Mat2};
use crate::orbits::AdjointOrbit;
use thiserror::Error;

/// Relative Wronskian defect above which fundamental data is rejected.
/// The absolute defect grows with the product scale `|y1 dy2| + |y2 dy1|`
/// at strongly negative `lambda`, so the gate is scaled the same way.
pub const WRONSKIAN_VALIDITY: f64 = 1e-6;
/// Residual below which the curve is declared to meet an orbit.
pub const ORBIT_HIT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("fundamental data rejected: Wronskian defect {0:.3e}")]
    BadFundamentalData(f64),
    #[error(transparent)]
    Fundsol(#[from] FundsolError),
    #[error("window bounds must be finite, got [{0}, {1}]")]
    BadWindow(f64, f64),
}

/// Value of the characteristic curve at one spectral parameter.
#[derive(Clone, Copy, Debug)]
pub struct CharCurveValue {
    pub lambda: f64,
    matrix: Mat2,
    pub kappa_plus: C64,
    pub kappa_minus: C64,
}

impl CharCurveValue {
    pub fn matrix(&self) -> Mat2 {
        self.matrix
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.matrix.unitarity_defect()
    }

    pub fn symmetry_defect(&self) -> f64 {
        self.matrix.symmetry_defect()
    }
}

/// Evaluate the curve from fundamental data.
///
/// With `p = y2 + dy1`, `m = dy2 - y1` and the never-vanishing denominator
/// `D = (y2 - dy1) + i (dy2 + y1)` (`|D|^2 >= 2` by the Wronskian),
///
/// ```text
/// Gamma = [[p + i m, 2 i], [2 i, p - i m]] / D
/// ```
///
/// with eigenvalues `kappa_pm = (p +- i sqrt(4 + m^2)) / D`.
pub fn gamma(f: &FundamentalData) -> Result<CharCurveValue, CurveError> {
    let defect = f.wronskian_defect();
    let scale = (f.y1 * f.dy2).abs() + (f.y2 * f.dy1).abs() + 1.0;
    if !defect.is_finite() || defect > WRONSKIAN_VALIDITY * scale {
        return Err(CurveError::BadFundamentalData(defect));
    }
    let p = f.y2 + f.dy1;
    let m = f.dy2 - f.y1;
    let den = c64(f.y2 - f.dy1, f.dy2 + f.y1);
    let matrix = Mat2::new(
        c64(p, m) / den,
        c64(0.0, 2.0) / den,
        c64(0.0, 2.0) / den,
        c64(p, -m) / den,
    );
    let root = (4.0 + m * m).sqrt();
    Ok(CharCurveValue {
        lambda: f.lambda,
        matrix,
        kappa_plus: c64(p, root) / den,
        kappa_minus: c64(p, -root) / den,
    })
}

/// Whether `lambda` of the given fundamental data is a double eigenvalue for
/// `u`, i.e. whether `u` sits on the curve there.
pub fn is_double_eigenvalue(
    u: &UnitaryBC,
    f: &FundamentalData,
    tol: f64,
) -> Result<bool, CurveError> {
    let cv = gamma(f)?;
    Ok(u.matrix().dist(&cv.matrix) <= tol)
}

/// A parameter where the curve passes through a given adjoint orbit.
#[derive(Clone, Copy, Debug)]
pub struct CurveOrbitHit {
    pub lambda: f64,
    /// Final value of the orbit-distance surrogate at the hit.
    pub residual: f64,
}

/// Scan a window for intersections of the curve with an adjoint orbit.
///
/// The surrogate `m(lambda) = |tr Gamma - (z1 + z2)| + |det Gamma - z1 z2|`
/// vanishes exactly when the eigenvalues of `Gamma` equal the orbit
/// invariants `{z1, z2}`. Grid minima are sharpened by golden-section search
/// and kept when the residual drops below [`ORBIT_HIT_TOL`].
pub fn gamma_meets_orbit(
    q: &crate::fundsol::Potential,
    orbit: &AdjointOrbit,
    window: [f64; 2],
    tol: f64,
) -> Result<Vec<CurveOrbitHit>, CurveError> {
    let [lo, hi] = window;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(CurveError::BadWindow(lo, hi));
    }
    if lo >= hi {
        return Ok(Vec::new());
    }
    let (z1, z2) = orbit.invariants();
    let target_tr = z1 + z2;
    let target_det = z1 * z2;
    let surrogate = |lambda: f64| -> Result<f64, CurveError> {
        let f = fundamental(q, lambda, tol)?;
        let cv = gamma(&f)?;
        let g = cv.matrix;
        Ok((g.trace() - target_tr).norm() + (g.det() - target_det).norm())
    };

    let step = 0.25f64.min((hi - lo) / 16.0);
    let n = ((hi - lo) / step).ceil() as usize;
    let mut vals = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        vals.push((x, surrogate(x)?));
    }

    let mut hits: Vec<CurveOrbitHit> = Vec::new();
    for i in 0..vals.len() {
        let is_local_min = (i == 0 || vals[i].1 <= vals[i - 1].1)
            && (i + 1 == vals.len() || vals[i].1 <= vals[i + 1].1);
        if !is_local_min {
            continue;
        }
        // Skip grid minima that are clearly far from zero; the surrogate is
        // Lipschitz on compact windows so a generous cutoff is safe.
        if vals[i].1 > 0.5 {
            continue;
        }
        let a = if i == 0 { vals[0].0 } else { vals[i - 1].0 };
        let b = if i + 1 == vals.len() {
            vals[i].0
        } else {
            vals[i + 1].0
        };
        let (lambda, residual) = golden_min(&surrogate, a, b, 1e-10 * (1.0 + vals[i].0.abs()))?;
        if residual <= ORBIT_HIT_TOL {
            let dup = hits
                .iter()
                .any(|h| (h.lambda - lambda).abs() <= 1e-8 * (1.0 + lambda.abs()));
            if !dup {
                hits.push(CurveOrbitHit { lambda, residual });
            }
        }
    }
    Ok(hits)
}

/// Golden-section minimization on [a, b] down to an abscissa resolution.
fn golden_min<E>(
    f: &dyn Fn(f64) -> Result<f64, E>,
    mut a: f64,
    mut b: f64,
    xtol: f64,
) -> Result<(f64, f64), E> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    Ok((x, fx))
}
