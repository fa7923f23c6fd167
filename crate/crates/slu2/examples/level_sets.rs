//! Level sets on an orbit: the conditions sharing one prescribed
//! eigenvalue form a circle, a single point, or nothing.

use slu2::bc::orbit_invariants;
use slu2::fundsol::Potential;
use slu2::orbits::{critical_values, level_set, AdjointOrbit, LevelSetShape};
use slu2::spectrum::{eigenvalues, EigOptions};
use std::f64::consts::PI;

fn main() {
    let q = Potential::Zero;
    let tol = 1e-10;
    // Orbit whose invariant eigenvalues are exp(-+ i pi/3).
    let orbit = AdjointOrbit::hermitian(0.0, 1.0 / 3.0f64.sqrt()).unwrap();

    // Inside a band the level set is a circle, in a gap it is empty.
    for kappa in [PI * PI, 40.0, 5.0] {
        let ls = level_set(&q, &orbit, kappa, tol).unwrap();
        match ls.shape {
            LevelSetShape::Circle { x } => {
                println!("kappa = {kappa:.6}: circle, mixing weight x = {x:.12}");
                // Each point of the circle is a genuine condition with
                // kappa in its spectrum.
                for gamma in [0.0, 1.0, PI, 4.5] {
                    let u = ls.realize(gamma).unwrap();
                    let inv = orbit_invariants(&u);
                    let s = eigenvalues(&q, &u, 6, EigOptions { tol, window: None }).unwrap();
                    let best = s
                        .eigenvalues
                        .iter()
                        .map(|l| (l - kappa).abs())
                        .fold(f64::INFINITY, f64::min);
                    println!(
                        "  gamma = {gamma:.2}: invariants ({:+.4}{:+.4}i, {:+.4}{:+.4}i), nearest eigenvalue offset {best:.2e}",
                        inv.0.re, inv.0.im, inv.1.re, inv.1.im
                    );
                    assert!(best < 1e-6);
                }
            }
            LevelSetShape::Point { point } => {
                println!("kappa = {kappa:.6}: single point at coord {:.6}", point.coord);
            }
            LevelSetShape::Empty => {
                println!("kappa = {kappa:.6}: no condition on the orbit attains it");
            }
        }
    }

    // At a band edge the circle shrinks to the critical point itself.
    let ranges = critical_values(&q, &orbit, 0, None, tol).unwrap();
    let ls = level_set(&q, &orbit, ranges[0].b_n, tol).unwrap();
    match ls.shape {
        LevelSetShape::Point { point } => println!(
            "kappa = b_0 = {:.6}: single point (theta = {:.6}, gamma = {:.4})",
            ranges[0].b_n, point.coord, point.gamma
        ),
        other => panic!("expected the maximizer alone, got {other:?}"),
    }

    // kappa below every a_0 of the orbit is unattainable.
    let ls = level_set(&q, &orbit, -40.0, tol).unwrap();
    assert!(matches!(ls.shape, LevelSetShape::Empty));
    println!("kappa = -40: {:?}", ls.shape);
}
