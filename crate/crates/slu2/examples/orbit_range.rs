//! Eigenvalue bands on an adjoint orbit: every lambda_n sweeps an
//! interval [a_n, b_n] as the condition moves over the orbit, with the
//! endpoints attained at exactly two critical points on the real circle.

use slu2::fundsol::Potential;
use slu2::orbits::{critical_values, orbit_point, AdjointOrbit};
use slu2::spectrum::{eigenvalues, EigOptions};

fn main() {
    let q = Potential::Zero;
    let orbit = AdjointOrbit::hermitian(0.0, 1.0).unwrap();
    let tol = 1e-10;

    let ranges = critical_values(&q, &orbit, 3, None, tol).unwrap();
    println!("bands of lambda_n over the orbit with invariant eigenvalues -+i:");
    for r in &ranges {
        println!(
            "  n = {}: [{:+.9}, {:+.9}]  min at (theta = {:.6}, gamma = {:.4}), max at (theta = {:.6}, gamma = {:.4})",
            r.n, r.a_n, r.b_n,
            r.minimizer.coord, r.minimizer.gamma,
            r.maximizer.coord, r.maximizer.gamma,
        );
    }

    // Bands interlace: a_n < b_n < a_{n+1}.
    for w in ranges.windows(2) {
        assert!(w[0].b_n < w[1].a_n);
    }

    // On this orbit every critical point sits at theta = pi/4, and with
    // q = 0 the positive critical values solve
    // (1 + lambda) sin sqrt(lambda) = -+ 2 sqrt(lambda).
    for r in &ranges {
        for (tag, lam) in [("a", r.a_n), ("b", r.b_n)] {
            if lam <= 0.0 {
                continue;
            }
            let rt = lam.sqrt();
            let residual = ((1.0 + lam) * rt.sin().abs() - 2.0 * rt).abs();
            println!("  {tag}_{}: closed-form residual {residual:+.2e}", r.n);
            assert!(residual < 1e-6 * (1.0 + lam));
        }
    }

    // The minimizer realizes its band edge through the ordinary solver.
    let r1 = &ranges[1];
    let u = orbit_point(&r1.minimizer).unwrap();
    let s = eigenvalues(&q, &u, 1, EigOptions { tol, window: None }).unwrap();
    println!(
        "solver at the n = 1 minimizer: lambda_1 = {:+.9} vs a_1 = {:+.9}",
        s.nth(1).unwrap(),
        r1.a_n
    );
}
