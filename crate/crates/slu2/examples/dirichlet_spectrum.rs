//! Indexed spectra of the classic separated conditions, against the
//! closed forms available for the free potential.

use slu2::bc::{from_separated, SeparatedBC};
use slu2::fundsol::Potential;
use slu2::spectrum::{eigenvalues, EigOptions};
use std::f64::consts::PI;

fn main() {
    let q = Potential::Zero;
    let n_max = 5;

    // Dirichlet: y(0) = y(1) = 0, eigenvalues (n+1)^2 pi^2.
    let dirichlet = from_separated(&SeparatedBC::new(0.0, PI).unwrap());
    let s = eigenvalues(&q, &dirichlet, n_max, EigOptions::default()).unwrap();
    println!("Dirichlet, q = 0 ({}):", s.certification.as_str());
    for (n, lam, _) in s.indexed() {
        let exact = ((n + 1) as f64 * PI).powi(2);
        println!("  lambda_{n} = {lam:+.12e}   error {:+.2e}", lam - exact);
        assert!((lam - exact).abs() < 1e-7 * exact);
    }

    // Neumann: y'(0) = y'(1) = 0, eigenvalues n^2 pi^2.
    let neumann = from_separated(&SeparatedBC::new(PI / 2.0, PI / 2.0).unwrap());
    let s = eigenvalues(&q, &neumann, n_max, EigOptions::default()).unwrap();
    println!("Neumann, q = 0 ({}):", s.certification.as_str());
    for (n, lam, _) in s.indexed() {
        let exact = (n as f64 * PI).powi(2);
        println!("  lambda_{n} = {lam:+.12e}   error {:+.2e}", lam - exact);
    }

    // A potential well shifts every level; indexing is unaffected.
    let q = Potential::Polynomial(vec![0.0, 20.0, -20.0]);
    let s = eigenvalues(&q, &dirichlet, n_max, EigOptions::default()).unwrap();
    println!("Dirichlet, q = 20 x (1 - x):");
    for (n, lam, _) in s.indexed() {
        let free = ((n + 1) as f64 * PI).powi(2);
        println!("  lambda_{n} = {lam:+.12e}   shift {:+.4}", lam - free);
    }
}
