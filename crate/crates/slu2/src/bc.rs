//! Self-adjoint boundary conditions as unitary 2x2 matrices.
//!
//! A boundary condition for `-y'' + q y = lambda y` on [0, 1] is encoded by
//! `U` in U(2) through `i (I + U) yd = (I - U) ys`, where `ys = (y(0), y(1))`
//! and `yd = (-y'(0), y'(1))` collects outward derivatives. The group splits
//! into two strata by whether `-1` is an eigenvalue of `U`:
//!
//! * off the stratum (`det(I + U) != 0`) the condition is `yd = A ys` for a
//!   Hermitian `A`, the Cayley transform of `U`;
//! * on the stratum the condition couples the endpoints with a constraint of
//!   rank one in the function values.
//!
//! Separated conditions are exactly the diagonal `U`, and coupled conditions
//! (`psi(1)-data = e^{i phi} K psi(0)-data`, real `K` with `det K = 1`) are
//! exactly the non-separated ones.

use crate::mat2::{c64, C64, Mat2};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Unitarity acceptance threshold for constructing [`UnitaryBC`].
pub const UNITARY_TOL: f64 = 1e-10;
/// Threshold on `|det(I + U)|` separating the two strata.
pub const STRATUM_TOL: f64 = 1e-8;
/// Threshold for symmetry (realness) and diagonality (separatedness) tests.
pub const CLASS_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum BcError {
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("operation requires det(I + U) != 0, but |det(I + U)| = {0:.3e}")]
    OnSingularStratum(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix does not represent a coupled condition: {0}")]
    NotCoupled(String),
}

/// Validated element of U(2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryBC {
    u: Mat2,
}

impl UnitaryBC {
    pub fn new(u: Mat2) -> Result<Self, BcError> {
        let defect = u.unitarity_defect();
        if !u.is_finite() || defect > UNITARY_TOL {
            return Err(BcError::NotUnitary(defect));
        }
        Ok(UnitaryBC { u })
    }

    pub fn matrix(&self) -> Mat2 {
        self.u
    }

    /// `g U g^H` for unitary `g`; stays on the same adjoint orbit.
    pub fn conjugated(&self, g: &Mat2) -> Result<UnitaryBC, BcError> {
        UnitaryBC::new(*g * self.u * g.adjoint())
    }

    /// Eigenvalue pair normalized onto the unit circle, ordered by
    /// argument in [0, 2 pi).
    pub fn invariants(&self) -> (C64, C64) {
        let (e1, e2) = self.u.eigenvalues();
        let mut pair = [e1 / e1.norm(), e2 / e2.norm()];
        pair.sort_by(|x, y| arg_2pi(*x).partial_cmp(&arg_2pi(*y)).unwrap());
        (pair[0], pair[1])
    }
}

fn arg_2pi(z: C64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Boundary condition `yd = A ys` with `A = [[a, b], [conj(b), c]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianBC {
    pub a: f64,
    pub c: f64,
    pub b: C64,
}

impl HermitianBC {
    pub fn new(a: f64, c: f64, b: C64) -> Result<Self, BcError> {
        if !(a.is_finite() && c.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(BcError::InvalidParameter("non-finite Hermitian data".into()));
        }
        Ok(HermitianBC { a, c, b })
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(c64(self.a, 0.0), self.b, self.b.conj(), c64(self.c, 0.0))
    }
}

/// Separated condition
/// `cos(alpha) y(0) + sin(alpha) y'(0) = 0`,
/// `cos(beta) y(1) + sin(beta) y'(1) = 0`
/// with `alpha` in [0, pi) and `beta` in (0, pi].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedBC {
    pub alpha: f64,
    pub beta: f64,
}

impl SeparatedBC {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, BcError> {
        if !alpha.is_finite() || !(0.0..PI).contains(&alpha) {
            return Err(BcError::InvalidParameter(format!(
                "alpha must lie in [0, pi), got {alpha}"
            )));
        }
        if !beta.is_finite() || !(beta > 0.0 && beta <= PI) {
            return Err(BcError::InvalidParameter(format!(
                "beta must lie in (0, pi], got {beta}"
            )));
        }
        Ok(SeparatedBC { alpha, beta })
    }
}

/// Coupled condition `(y(1), y'(1)) = e^{i phi} K (y(0), y'(0))` with real
/// `K`, `det K = 1`. `k` is row-major `[k11, k12, k21, k22]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledBC {
    pub phi: f64,
    pub k: [f64; 4],
}

impl CoupledBC {
    pub fn new(phi: f64, k: [f64; 4]) -> Result<Self, BcError> {
        if !phi.is_finite() || !k.iter().all(|v| v.is_finite()) {
            return Err(BcError::InvalidParameter("non-finite coupled data".into()));
        }
        let det = k[0] * k[3] - k[1] * k[2];
        if (det - 1.0).abs() > 1e-8 {
            return Err(BcError::InvalidParameter(format!(
                "det K must be 1, got {det}"
            )));
        }
        Ok(CoupledBC { phi, k })
    }
}

/// Chart for the singular stratum: phase times an SU(2) element
/// `[[r e^{i beta0}, s e^{i gamma0}], [-s e^{-i gamma0}, r e^{-i beta0}]]`
/// with `s = sqrt(1 - r^2)`; the phase is forced by membership in the
/// stratum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct U0Param {
    pub r: f64,
    pub beta0: f64,
    pub gamma0: f64,
}

impl U0Param {
    pub fn new(r: f64, beta0: f64, gamma0: f64) -> Result<Self, BcError> {
        if !(0.0..=1.0).contains(&r) || !beta0.is_finite() || !gamma0.is_finite() {
            return Err(BcError::InvalidParameter(format!(
                "need r in [0, 1] and finite angles, got r = {r}"
            )));
        }
        Ok(U0Param { r, beta0, gamma0 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    /// `det(I + U) = 0`; the Cayley transform blows up.
    Singular,
    /// `det(I + U) != 0`; Hermitian chart available.
    Regular,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub stratum: Stratum,
    /// `U = U^T`, equivalently the condition has a real form.
    pub is_real: bool,
    /// `U` diagonal, equivalently the condition separates the endpoints.
    pub is_separated: bool,
}

/// Stratum membership plus reality and separation flags.
pub fn classify(u: &UnitaryBC) -> Classification {
    let m = u.matrix();
    let det_ipu = (Mat2::identity() + m).det().norm();
    let stratum = if det_ipu <= STRATUM_TOL {
        Stratum::Singular
    } else {
        Stratum::Regular
    };
    let is_real = m.symmetry_defect() <= CLASS_TOL;
    let off = m.m[0][1].norm().max(m.m[1][0].norm());
    Classification {
        stratum,
        is_real,
        is_separated: off <= CLASS_TOL,
    }
}

/// Cayley transform `A = -i (I + U)^{-1} (I - U)`; requires the regular
/// stratum.
pub fn to_hermitian(u: &UnitaryBC) -> Result<HermitianBC, BcError> {
    let m = u.matrix();
    let ipu = Mat2::identity() + m;
    let det = ipu.det().norm();
    if det <= STRATUM_TOL {
        return Err(BcError::OnSingularStratum(det));
    }
    let a = (ipu.inverse().unwrap() * (Mat2::identity() - m)).scale(c64(0.0, -1.0));
    // The result is Hermitian up to roundoff for unitary input; keep the
    // Hermitian part.
    let b = (a.m[0][1] + a.m[1][0].conj()) * 0.5;
    HermitianBC::new(a.m[0][0].re, a.m[1][1].re, b)
}

/// Inverse Cayley transform `U = (I - iA)(I + iA)^{-1}`.
pub fn from_hermitian(h: &HermitianBC) -> UnitaryBC {
    let a = h.matrix();
    let i = c64(0.0, 1.0);
    let num = Mat2::identity() - a.scale(i);
    let den = (Mat2::identity() + a.scale(i)).inverse().expect("I + iA is invertible");
    UnitaryBC::new(num * den).expect("Cayley image of Hermitian matrix is unitary")
}

/// Diagonal unitary of a separated condition,
/// `diag(e^{i(pi - 2 alpha)}, e^{i(2 beta - pi)})`.
pub fn from_separated(s: &SeparatedBC) -> UnitaryBC {
    let d1 = C64::from_polar(1.0, PI - 2.0 * s.alpha);
    let d2 = C64::from_polar(1.0, 2.0 * s.beta - PI);
    UnitaryBC::new(Mat2::diag(d1, d2)).expect("diagonal phases are unitary")
}

/// Angle pair of a diagonal `U`; `None` when `U` is not separated.
pub fn to_separated(u: &UnitaryBC) -> Option<SeparatedBC> {
    if !classify(u).is_separated {
        return None;
    }
    let m = u.matrix();
    // arg in (-pi, pi] puts alpha in [0, pi) and beta in (0, pi] exactly.
    let alpha = (PI - m.m[0][0].arg()) / 2.0;
    let beta = (m.m[1][1].arg() + PI) / 2.0;
    let alpha = if alpha >= PI { alpha - PI } else { alpha };
    Some(SeparatedBC::new(alpha, beta).expect("angles from principal arguments are in range"))
}

/// Unitary of a coupled condition.
pub fn from_coupled(cb: &CoupledBC) -> UnitaryBC {
    let [k11, k12, k21, k22] = cb.k;
    // det K = 1 makes the denominator nonvanishing.
    let den = c64(k12 - k21, k11 + k22);
    let i2 = c64(0.0, 2.0);
    let eip = C64::from_polar(1.0, cb.phi);
    let m = Mat2::new(
        c64(k12 + k21, k22 - k11) / den,
        i2 * eip.conj() / den,
        i2 * eip / den,
        c64(k12 + k21, -(k22 - k11)) / den,
    );
    UnitaryBC::new(m).expect("coupled image is unitary")
}

/// Coupled form of a non-separated `U`; `None` for separated conditions.
///
/// Canonical representative of the two-fold ambiguity
/// `(phi, K) ~ (phi + pi, -K)`: `k12 > 0` when nonzero, otherwise
/// `k11 > 0`.
pub fn to_coupled(u: &UnitaryBC) -> Option<CoupledBC> {
    if classify(u).is_separated {
        return None;
    }
    let m = u.matrix();
    let u12 = m.m[0][1];
    let u21 = m.m[1][0];
    // e^{-2 i phi} = u12 / u21 and den = 2 i e^{i phi} / u21 invert the
    // coupled-to-unitary map.
    let phi = -0.5 * (u12 / u21).arg();
    let eip = C64::from_polar(1.0, phi);
    let den = c64(0.0, 2.0) * eip / u21;
    let n11 = m.m[0][0] * den;
    let k12 = 0.5 * (n11.re + den.re);
    let k21 = 0.5 * (n11.re - den.re);
    let k22 = 0.5 * (den.im + n11.im);
    let k11 = 0.5 * (den.im - n11.im);
    let mut k = [k11, k12, k21, k22];
    let mut phi = phi;
    let flip = if k[1].abs() > 1e-12 { k[1] < 0.0 } else { k[0] < 0.0 };
    if flip {
        for v in &mut k {
            *v = -*v;
        }
        phi += PI;
    }
    if phi > PI {
        phi -= 2.0 * PI;
    }
    CoupledBC::new(phi, k).ok()
}

/// Unitary from the singular-stratum chart.
pub fn from_u0_param(p: &U0Param) -> UnitaryBC {
    let s = (1.0 - p.r * p.r).max(0.0).sqrt();
    let cb = p.r * p.beta0.cos();
    let phase = c64(-cb, (1.0 - cb * cb).max(0.0).sqrt());
    let su = Mat2::new(
        C64::from_polar(p.r, p.beta0),
        C64::from_polar(s, p.gamma0),
        -C64::from_polar(s, -p.gamma0),
        C64::from_polar(p.r, -p.beta0),
    );
    UnitaryBC::new(su.scale(phase)).expect("phased SU(2) element is unitary")
}

/// Adjoint-orbit label of `U`: its eigenvalue pair on the unit circle,
/// ordered by argument in [0, 2 pi).
pub fn orbit_invariants(u: &UnitaryBC) -> (C64, C64) {
    u.invariants()
}

/// Coordinates of a non-separated singular-stratum element in the
/// exceptional-orbit chart used by the orbit analysis.
///
/// `alpha` in [0, 2 pi) with `alpha != pi` labels the orbit through
/// `diag(-1, e^{i alpha})`; `t` in [-w0, w0] with `w0 = |cos(alpha / 2)|`
/// and the circle angle `gamma` locate the point. `tau` is the
/// reparameterization `t = cos(alpha / 2) sin(tau)`, `tau` in
/// [-pi/2, pi/2].
#[derive(Clone, Copy, Debug)]
pub struct ExceptionalCoords {
    pub alpha: f64,
    pub t: f64,
    pub tau: f64,
    pub gamma: f64,
}

/// Inverse of the exceptional-orbit chart. `None` for separated input or
/// when `U` is a multiple of the identity times `-1` (the Dirichlet point,
/// which sits on no principal orbit).
pub fn exceptional_coords(u: &UnitaryBC) -> Option<ExceptionalCoords> {
    let cls = classify(u);
    if cls.stratum != Stratum::Singular || cls.is_separated {
        return None;
    }
    let (z1, z2) = u.invariants();
    // One invariant is -1; the other is e^{i alpha}.
    let (other, _) = if (z1 + C64::ONE).norm() <= (z2 + C64::ONE).norm() {
        (z2, z1)
    } else {
        (z1, z2)
    };
    let alpha = arg_2pi(other);
    if (alpha - PI).abs() < 1e-9 {
        return None;
    }
    let half = 0.5 * alpha;
    // U = sigma i e^{i alpha/2} S with S in SU(2), sigma = +1 below the
    // excluded angle and -1 above it.
    let sigma = if alpha < PI { 1.0 } else { -1.0 };
    let phase = c64(0.0, sigma) * C64::from_polar(1.0, half);
    let s = u.matrix().scale(phase.inv());
    // S11 = sigma sin(alpha/2) + i t and S12 = i w e^{i gamma}.
    let ch = half.cos();
    let w0 = ch.abs();
    let t = s.m[0][0].im.clamp(-w0, w0);
    let tau = if w0 > 0.0 {
        (t / ch).clamp(-1.0, 1.0).asin()
    } else {
        0.0
    };
    let b = s.m[0][1] * c64(0.0, -1.0);
    let gamma = if b.norm() > 1e-12 { arg_2pi(b) } else { 0.0 };
    Some(ExceptionalCoords { alpha, t, tau, gamma })
}

/// JSON-facing description of a boundary condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcSpec {
    /// Row-major entries as `[re, im]` pairs.
    Unitary([[f64; 2]; 4]),
    Hermitian { a: f64, c: f64, b_re: f64, b_im: f64 },
    Separated { alpha: f64, beta: f64 },
    Coupled { phi: f64, k: [f64; 4] },
    U0 { r: f64, beta0: f64, gamma0: f64 },
}

impl BcSpec {
    pub fn to_unitary(&self) -> Result<UnitaryBC, BcError> {
        match self {
            BcSpec::Unitary(rows) => {
                let e = |i: usize| c64(rows[i][0], rows[i][1]);
                UnitaryBC::new(Mat2::new(e(0), e(1), e(2), e(3)))
            }
            BcSpec::Hermitian { a, c, b_re, b_im } => {
                Ok(from_hermitian(&HermitianBC::new(*a, *c, c64(*b_re, *b_im))?))
            }
            BcSpec::Separated { alpha, beta } => {
                Ok(from_separated(&SeparatedBC::new(*alpha, *beta)?))
            }
            BcSpec::Coupled { phi, k } => Ok(from_coupled(&CoupledBC::new(*phi, *k)?)),
            BcSpec::U0 { r, beta0, gamma0 } => {
                Ok(from_u0_param(&U0Param::new(*r, *beta0, *gamma0)?))
            }
        }
    }

    pub fn from_unitary(u: &UnitaryBC) -> BcSpec {
        let m = u.matrix();
        BcSpec::Unitary([
            [m.m[0][0].re, m.m[0][0].im],
            [m.m[0][1].re, m.m[0][1].im],
            [m.m[1][0].re, m.m[1][0].im],
            [m.m[1][1].re, m.m[1][1].im],
        ])
    }
}
