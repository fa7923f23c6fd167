//! Minimal 2x2 complex matrix arithmetic.
//!
//! Everything in this crate happens in dimension two, so a fixed-size type
//! with closed-form inverse and eigenvalues beats a general linear algebra
//! dependency.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex64;

/// Shorthand for a complex scalar.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// 2x2 complex matrix, row-major storage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[C64; 2]; 2],
}

impl Mat2 {
    pub fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        Mat2 {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn zero() -> Self {
        Mat2::new(C64::ZERO, C64::ZERO, C64::ZERO, C64::ZERO)
    }

    pub fn identity() -> Self {
        Mat2::diag(C64::ONE, C64::ONE)
    }

    pub fn diag(d1: C64, d2: C64) -> Self {
        Mat2::new(d1, C64::ZERO, C64::ZERO, d2)
    }

    /// Real matrix promoted to complex entries.
    pub fn from_real(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2::new(c64(m11, 0.0), c64(m12, 0.0), c64(m21, 0.0), c64(m22, 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn conj(&self) -> Self {
        Mat2::new(
            self.m[0][0].conj(),
            self.m[0][1].conj(),
            self.m[1][0].conj(),
            self.m[1][1].conj(),
        )
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    /// Largest entry modulus; used as the matrix distance throughout.
    pub fn max_abs(&self) -> f64 {
        let mut r: f64 = 0.0;
        for row in &self.m {
            for e in row {
                r = r.max(e.norm());
            }
        }
        r
    }

    pub fn dist(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    /// Max-entry norm of `self^H self - I`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::identity()).max_abs()
    }

    /// Max-entry norm of `self - self^T`.
    pub fn symmetry_defect(&self) -> f64 {
        (*self - self.transpose()).max_abs()
    }

    /// Max-entry norm of `self - self^H`.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// Eigenvalue pair, in no particular order.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let h = self.trace() * 0.5;
        let disc = (h * h - self.det()).sqrt();
        (h + disc, h - disc)
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] - rhs.m[0][0],
            self.m[0][1] - rhs.m[0][1],
            self.m[1][0] - rhs.m[1][0],
            self.m[1][1] - rhs.m[1][1],
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(c64(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}
