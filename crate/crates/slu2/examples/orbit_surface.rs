//! lambda_n as a function on an orbit, sampled over the coordinate grid.
//! The surface extrema land on the real circle gamma in {0, pi}.

use slu2::fundsol::Potential;
use slu2::orbits::{lambda_surface, AdjointOrbit};
use std::f64::consts::PI;

fn main() {
    let q = Potential::Zero;
    // A singular-stratum orbit: every condition couples the endpoints
    // except the two diagonal points.
    let orbit = AdjointOrbit::exceptional(PI / 2.0).unwrap();

    let surf = lambda_surface(&q, &orbit, 2, [21, 21], 1e-9).unwrap();
    println!(
        "orbit alpha = pi/2, grid 21 x 21, window [{:.2}, {:.2}] ({})",
        surf.window[0],
        surf.window[1],
        surf.certification.as_str()
    );

    for e in &surf.extrema {
        println!(
            "  n = {}: min {:+.6} at (tau = {:+.4}, gamma = {:.4}), max {:+.6} at (tau = {:+.4}, gamma = {:.4})",
            e.n, e.min, e.min_coord, e.min_gamma, e.max, e.max_coord, e.max_gamma
        );
        // Grid extrema sit on the real circle up to one gamma step.
        let step = 2.0 * PI / 21.0;
        for g in [e.min_gamma, e.max_gamma] {
            let to_circle = (g % PI).min(PI - g % PI);
            assert!(to_circle < step + 1e-12, "gamma = {g} off the real circle");
        }
    }

    // A slice along tau at fixed gamma = 0 shows the sheet shape.
    println!("lambda_0 along gamma = 0:");
    for p in surf.points.iter().filter(|p| p.gamma == 0.0) {
        println!("  tau = {:+.4}: lambda_0 = {:+.9}", p.coord, p.lambdas[0]);
    }
}
