//! Independent finite-element eigenvalue solver, used only to cross-check
//! the shooting pipeline.
//!
//! Piecewise-linear elements with a lumped mass matrix on a uniform grid.
//! The boundary condition folds into the discrete quadratic form in one of
//! three ways depending on how many eigenvalues of `U` equal -1: none
//! (a Hermitian Robin coupling of the two endpoint values), one (the
//! endpoint pair is confined to a complex line through the origin), or two
//! (plain Dirichlet). Eigenvalues come from Sylvester inertia counts of
//! `K - lambda M` via an `LDL*` sweep, bisected per index, optionally
//! sharpened by one Richardson extrapolation in the mesh width.

use crate::bc::UnitaryBC;
use crate::fundsol::Potential;
use crate::mat2::{C64, Mat2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FdError {
    #[error("bad discretization request: {0}")]
    BadRequest(String),
}

/// Hermitian tridiagonal matrix with one extra coupling between the first
/// and last unknowns, paired with a positive diagonal mass.
struct BorderedPencil {
    diag: Vec<f64>,
    /// `sub[i]` is the entry at `(i + 1, i)`.
    sub: Vec<C64>,
    /// Extra entry at `(n - 1, 0)`; for `n = 2` it merges into `sub[0]`.
    corner: C64,
    mass: Vec<f64>,
}

impl BorderedPencil {
    fn len(&self) -> usize {
        self.diag.len()
    }

    /// Eigenvalues of the pencil strictly below `lam`: the number of
    /// negative `LDL*` pivots of `K - lam M`. The single bordered row is
    /// carried as a scalar fill, keeping the sweep `O(n)`.
    fn count_below(&self, lam: f64) -> usize {
        let n = self.len();
        let t = |i: usize| self.diag[i] - lam * self.mass[i];
        let guard = |d: f64| if d == 0.0 { -1e-300 } else { d };
        let mut neg = 0usize;
        let mut d = guard(t(0));
        if d < 0.0 {
            neg += 1;
        }
        if n == 1 {
            return neg;
        }
        if n == 2 {
            let e = self.sub[0] + self.corner;
            if guard(t(1) - e.norm_sqr() / d) < 0.0 {
                neg += 1;
            }
            return neg;
        }
        // r is the last row's entry in the current column; last_diag
        // accumulates the eliminations hitting the (n-1, n-1) slot.
        let mut r = self.corner;
        let mut last_diag = t(n - 1);
        for j in 0..n - 2 {
            last_diag -= r.norm_sqr() / d;
            let orig_next = if j + 1 == n - 2 {
                self.sub[n - 2]
            } else {
                C64::new(0.0, 0.0)
            };
            let r_next = orig_next - r * self.sub[j].conj() / d;
            let d_next = t(j + 1) - self.sub[j].norm_sqr() / d;
            d = guard(d_next);
            if d < 0.0 {
                neg += 1;
            }
            r = r_next;
        }
        last_diag -= r.norm_sqr() / d;
        if guard(last_diag) < 0.0 {
            neg += 1;
        }
        neg
    }

    /// Gershgorin bracket for every generalized eigenvalue.
    fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.sub[i - 1].norm();
            }
            if i + 1 < n {
                radius += self.sub[i].norm();
            }
            if n > 2 && (i == 0 || i == n - 1) {
                radius += self.corner.norm();
            }
            lo = lo.min((self.diag[i] - radius) / self.mass[i]);
            hi = hi.max((self.diag[i] + radius) / self.mass[i]);
        }
        (lo - 1.0, hi + 1.0)
    }

    /// `k`-th generalized eigenvalue (0-indexed, counting multiplicity) by
    /// inertia bisection.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        while hi - lo > 1e-10 * (1.0 + hi.abs().max(lo.abs())) {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= k + 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Unit eigenvector of a normal 2x2 matrix for the eigenvalue `z`.
fn unit_eigvec(m: &Mat2, z: C64) -> [C64; 2] {
    let c1 = [m.m[0][1], z - m.m[0][0]];
    let c2 = [z - m.m[1][1], m.m[1][0]];
    let n1 = c1[0].norm_sqr() + c1[1].norm_sqr();
    let n2 = c2[0].norm_sqr() + c2[1].norm_sqr();
    let v = if n1 >= n2 { c1 } else { c2 };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    if norm < 1e-14 {
        // Scalar matrix: any direction works.
        return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    }
    [v[0] / norm, v[1] / norm]
}

const DIRICHLET_DIR_TOL: f64 = 1e-6;

fn assemble(q: &Potential, u: &UnitaryBC, n: usize) -> BorderedPencil {
    let h = 1.0 / n as f64;
    let qv = |i: usize| q.eval_clamped(i as f64 * h);
    let m = u.matrix();
    let (z1, z2) = m.eigenvalues();
    let dir1 = (z1 + C64::new(1.0, 0.0)).norm() < DIRICHLET_DIR_TOL;
    let dir2 = (z2 + C64::new(1.0, 0.0)).norm() < DIRICHLET_DIR_TOL;
    // Outward-derivative Robin slope of a non-Dirichlet eigendirection.
    let slope = |z: C64| -(z.arg() / 2.0).tan();

    if dir1 && dir2 {
        // Interior nodes only.
        let size = n - 1;
        let diag = (1..n).map(|i| 2.0 / h + qv(i) * h).collect();
        let sub = vec![C64::new(-1.0 / h, 0.0); size - 1];
        let mass = vec![h; size];
        return BorderedPencil {
            diag,
            sub,
            corner: C64::new(0.0, 0.0),
            mass,
        };
    }

    if !dir1 && !dir2 {
        // Both endpoint values free: Hermitian coupling
        // B = s1 v1 v1* + s2 v2 v2* enters the form with a minus sign.
        let v1 = unit_eigvec(&m, z1);
        let v2 = if (z1 - z2).norm() < 1e-12 {
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
        } else {
            unit_eigvec(&m, z2)
        };
        let (s1, s2) = (slope(z1), slope(z2));
        let b00 = s1 * v1[0].norm_sqr() + s2 * v2[0].norm_sqr();
        let b11 = s1 * v1[1].norm_sqr() + s2 * v2[1].norm_sqr();
        let b10 = v1[1] * v1[0].conj() * s1 + v2[1] * v2[0].conj() * s2;
        let size = n + 1;
        let mut diag: Vec<f64> = (0..=n)
            .map(|i| {
                if i == 0 || i == n {
                    1.0 / h + qv(i) * h / 2.0
                } else {
                    2.0 / h + qv(i) * h
                }
            })
            .collect();
        diag[0] -= b00;
        diag[n] -= b11;
        let sub = vec![C64::new(-1.0 / h, 0.0); size - 1];
        let mut mass = vec![h; size];
        mass[0] = h / 2.0;
        mass[n] = h / 2.0;
        return BorderedPencil {
            diag,
            sub,
            corner: -b10,
            mass,
        };
    }

    // Exactly one Dirichlet direction: the endpoint pair lives on the
    // complex line spanned by the free eigenvector v, with one scalar
    // unknown z in front of it: y(0) = v0 z, y(1) = v1 z.
    let (zfree, _zdir) = if dir1 { (z2, z1) } else { (z1, z2) };
    let v = unit_eigvec(&m, zfree);
    let s = slope(zfree);
    let size = n;
    let mut diag = Vec::with_capacity(size);
    diag.push(
        v[0].norm_sqr() * (1.0 / h + qv(0) * h / 2.0)
            + v[1].norm_sqr() * (1.0 / h + qv(n) * h / 2.0)
            - s,
    );
    diag.extend((1..n).map(|i| 2.0 / h + qv(i) * h));
    let mut sub = vec![C64::new(-1.0 / h, 0.0); size - 1];
    sub[0] = v[0] * (-1.0 / h);
    let corner = v[1] * (-1.0 / h);
    let mut mass = vec![h; size];
    mass[0] = (h / 2.0) * (v[0].norm_sqr() + v[1].norm_sqr());
    BorderedPencil {
        diag,
        sub,
        corner,
        mass,
    }
}

fn solve(q: &Potential, u: &UnitaryBC, count: usize, n: usize) -> Vec<f64> {
    let pencil = assemble(q, u, n);
    (0..count).map(|k| pencil.eigenvalue(k)).collect()
}

/// First `count` eigenvalues (counting multiplicity) of the discretized
/// problem on `n` elements; `richardson` combines the `n` and `2n` meshes
/// to cancel the leading quadratic error term.
pub fn fd_eigenvalues(
    q: &Potential,
    u: &UnitaryBC,
    count: usize,
    n: usize,
    richardson: bool,
) -> Result<Vec<f64>, FdError> {
    if count == 0 {
        return Err(FdError::BadRequest("count must be at least 1".into()));
    }
    if n < 16 || n < 8 * count {
        return Err(FdError::BadRequest(format!(
            "{n} elements cannot resolve {count} eigenvalues"
        )));
    }
    let coarse = solve(q, u, count, n);
    if !richardson {
        return Ok(coarse);
    }
    let fine = solve(q, u, count, 2 * n);
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::{from_hermitian, from_separated, SeparatedBC};
    use crate::mat2::Mat2;
    use crate::orbits::{orbit_point, AdjointOrbit};
    use crate::spectrum::{eigenvalues, prufer_separated, robin_separated, EigOptions};
    use crate::HermitianBC;
    use std::f64::consts::PI;

    const Q0: Potential = Potential::Zero;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn dirichlet_free_spectrum() {
        let u = UnitaryBC::new(Mat2::from_real(-1.0, 0.0, 0.0, -1.0)).unwrap();
        let lams = fd_eigenvalues(&Q0, &u, 4, 800, true).unwrap();
        for (k, lam) in lams.iter().enumerate() {
            let want = ((k + 1) as f64 * PI).powi(2);
            assert!(rel_close(*lam, want, 1e-6), "k = {k}: {lam} vs {want}");
        }
    }

    #[test]
    fn neumann_free_spectrum() {
        let u = UnitaryBC::new(Mat2::identity()).unwrap();
        let lams = fd_eigenvalues(&Q0, &u, 3, 800, true).unwrap();
        for (k, lam) in lams.iter().enumerate() {
            let want = (k as f64 * PI).powi(2);
            assert!(
                (lam - want).abs() < 1e-5 * (1.0 + want),
                "k = {k}: {lam} vs {want}"
            );
        }
    }

    #[test]
    fn periodic_doubles() {
        // In the outward-derivative convention the periodic condition is
        // the swap matrix.
        let u = UnitaryBC::new(Mat2::from_real(0.0, 1.0, 1.0, 0.0)).unwrap();
        let lams = fd_eigenvalues(&Q0, &u, 3, 800, true).unwrap();
        assert!(lams[0].abs() < 1e-7, "ground at {}", lams[0]);
        let four_pi2 = 4.0 * PI * PI;
        assert!(rel_close(lams[1], four_pi2, 1e-5));
        assert!(rel_close(lams[2], four_pi2, 1e-5));
    }

    #[test]
    fn robin_matches_prufer() {
        let s = robin_separated(0.7);
        let u = from_separated(&s);
        let lams = fd_eigenvalues(&Q0, &u, 2, 600, true).unwrap();
        for (k, lam) in lams.iter().enumerate() {
            let want = prufer_separated(&Q0, &s, k, 1e-10).unwrap();
            assert!(rel_close(*lam, want, 1e-5), "k = {k}: {lam} vs {want}");
        }
    }

    #[test]
    fn mixed_dirichlet_direction_matches_pipeline() {
        // A point of an exceptional orbit keeps one eigenvalue at -1, so
        // the one-Dirichlet fold is exercised with genuinely coupled
        // endpoints.
        let orbit = AdjointOrbit::exceptional(1.2).unwrap();
        let u = orbit_point(&orbit.point(0.5, 1.1).unwrap()).unwrap();
        let q = Potential::Constant(3.0);
        let want = eigenvalues(&q, &u, 2, EigOptions::default()).unwrap();
        let lams = fd_eigenvalues(&q, &u, 3, 1000, true).unwrap();
        for n in 0..=2 {
            let w = want.nth(n).unwrap();
            assert!(
                rel_close(lams[n], w, 1e-3),
                "n = {n}: fd {} vs shoot {w}",
                lams[n]
            );
        }
    }

    #[test]
    fn hermitian_stratum_matches_pipeline() {
        let h = HermitianBC {
            a: 0.8,
            c: -0.4,
            b: crate::mat2::c64(0.3, -0.6),
        };
        let u = from_hermitian(&h);
        let q = Potential::Polynomial(vec![1.0, -2.0, 4.0]);
        let want = eigenvalues(&q, &u, 2, EigOptions::default()).unwrap();
        let lams = fd_eigenvalues(&q, &u, 3, 1000, true).unwrap();
        for n in 0..=2 {
            let w = want.nth(n).unwrap();
            assert!(
                rel_close(lams[n], w, 1e-3),
                "n = {n}: fd {} vs shoot {w}",
                lams[n]
            );
        }
    }

    #[test]
    fn separated_dirichlet_left_robin_right() {
        let s = SeparatedBC::new(0.0, 2.0).unwrap();
        let u = from_separated(&s);
        let lams = fd_eigenvalues(&Q0, &u, 2, 600, true).unwrap();
        for (k, lam) in lams.iter().enumerate() {
            let want = prufer_separated(&Q0, &s, k, 1e-10).unwrap();
            assert!(rel_close(*lam, want, 1e-5), "k = {k}: {lam} vs {want}");
        }
    }

    #[test]
    fn rejects_underresolved_grids() {
        let u = UnitaryBC::new(Mat2::identity()).unwrap();
        assert!(fd_eigenvalues(&Q0, &u, 3, 10, false).is_err());
        assert!(fd_eigenvalues(&Q0, &u, 0, 100, false).is_err());
    }
}
