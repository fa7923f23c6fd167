//! Along the diagonal circle of separated conditions (alpha + beta = pi),
//! each lambda_n increases strictly with beta, so every value between the
//! band ends is attained exactly once.

use slu2::bc::{from_separated, SeparatedBC};
use slu2::fundsol::Potential;
use slu2::spectrum::{eigenvalues, reference_spectra, EigOptions};
use std::f64::consts::PI;

fn main() {
    let q = Potential::Constant(-3.0);
    let n_max = 2;
    let n_beta = 24;

    let refs = reference_spectra(&q, n_max, 1e-10).unwrap();
    let mut prev = vec![f64::NEG_INFINITY; n_max + 1];

    println!("beta        lambda_0        lambda_1        lambda_2");
    for j in 0..n_beta {
        let beta = PI * (j + 1) as f64 / n_beta as f64;
        let u = from_separated(&SeparatedBC::new(PI - beta, beta).unwrap());
        let s = eigenvalues(&q, &u, n_max, EigOptions::default()).unwrap();
        let row: Vec<f64> = (0..=n_max).map(|n| s.nth(n).unwrap()).collect();
        println!(
            "{beta:.4}    {:+.8e} {:+.8e} {:+.8e}",
            row[0], row[1], row[2]
        );
        for n in 0..=n_max {
            assert!(row[n] > prev[n], "lambda_{n} failed to increase at beta = {beta}");
            prev[n] = row[n];
        }
    }

    // The scan ends exactly at the Dirichlet condition.
    for n in 0..=n_max {
        let gap = refs.dirichlet[n] - prev[n];
        println!("lambda_{n} end vs Dirichlet: gap {gap:+.2e}");
        assert!(gap.abs() < 1e-6);
    }

    // Midpoint beta = pi/2 is Neumann.
    let u = from_separated(&SeparatedBC::new(PI / 2.0, PI / 2.0).unwrap());
    let s = eigenvalues(&q, &u, n_max, EigOptions::default()).unwrap();
    for n in 0..=n_max {
        assert!((s.nth(n).unwrap() - refs.neumann[n]).abs() < 1e-7);
    }
    println!("beta = pi/2 reproduces the Neumann spectrum");
}
