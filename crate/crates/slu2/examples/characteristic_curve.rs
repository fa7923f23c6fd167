//! The curve of conditions with a double eigenvalue: unitarity along a
//! window, eigenvalue phases, and the landmark values at Dirichlet
//! eigenvalues where kappa_pm = +-(-1)^{n+1}.

use slu2::charcurve::gamma;
use slu2::fundsol::{fundamental, Potential, DEFAULT_TOL};
use std::f64::consts::PI;

fn main() {
    let q = Potential::Zero;

    // The curve value is a symmetric unitary at every lambda.
    let mut worst = 0.0f64;
    for i in 0..200 {
        let lam = -20.0 + 520.0 * i as f64 / 199.0;
        let f = fundamental(&q, lam, DEFAULT_TOL).unwrap();
        let cv = gamma(&f).unwrap();
        worst = worst
            .max(cv.matrix().unitarity_defect())
            .max(cv.matrix().symmetry_defect());
    }
    println!("worst unitarity/symmetry defect on [-20, 500]: {worst:.2e}");
    assert!(worst < 1e-8);

    // At a Dirichlet eigenvalue both basis solutions vanish at the ends,
    // and the curve passes through a real condition with eigenvalues -+1.
    println!("curve eigenvalues at Dirichlet lambda_n = (n+1)^2 pi^2:");
    for n in 0..4usize {
        let lam = ((n + 1) as f64 * PI).powi(2);
        let f = fundamental(&q, lam, DEFAULT_TOL).unwrap();
        let cv = gamma(&f).unwrap();
        let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        println!(
            "  n = {n}: kappa_+ = {:+.9}{:+.9}i (expect {sign:+}), kappa_- = {:+.9}{:+.9}i",
            cv.kappa_plus.re, cv.kappa_plus.im, cv.kappa_minus.re, cv.kappa_minus.im
        );
        assert!((cv.kappa_plus - slu2::mat2::c64(sign, 0.0)).norm() < 1e-6);
        assert!((cv.kappa_minus + slu2::mat2::c64(sign, 0.0)).norm() < 1e-6);
    }

    // Between Dirichlet eigenvalues the phases rotate; print a short
    // tabulation of the phase pair.
    println!("phase of kappa_pm along [1, 50]:");
    for i in 0..6 {
        let lam = 1.0 + 49.0 * i as f64 / 5.0;
        let f = fundamental(&q, lam, DEFAULT_TOL).unwrap();
        let cv = gamma(&f).unwrap();
        println!(
            "  lambda = {lam:5.1}: arg kappa_+ = {:+.4}, arg kappa_- = {:+.4}",
            cv.kappa_plus.arg(),
            cv.kappa_minus.arg()
        );
    }
}
