//! Double eigenvalues: the periodic problem at the free potential carries
//! them at 4 pi^2 n^2, each sitting on the curve of degenerate conditions.
//! An orbit through such a condition gets its bands from the scan that
//! stays valid when the critical-point machinery does not apply.

use slu2::bc::{from_coupled, CoupledBC, UnitaryBC};
use slu2::charcurve::{gamma, is_double_eigenvalue};
use slu2::fundsol::{fundamental, Potential, DEFAULT_TOL};
use slu2::orbits::{critical_values, eigenvalue_bands, AdjointOrbit, OrbitError};
use slu2::spectrum::{eigenvalues, EigOptions};

fn main() {
    let q = Potential::Zero;
    let periodic = from_coupled(&CoupledBC::new(0.0, [1.0, 0.0, 0.0, 1.0]).unwrap());

    let s = eigenvalues(&q, &periodic, 4, EigOptions::default()).unwrap();
    println!("periodic spectrum, q = 0:");
    for (n, lam, mult) in s.indexed() {
        println!("  lambda_{n} = {lam:+.9e}  multiplicity {mult}");
    }

    // Each double eigenvalue puts the condition on the degeneracy curve.
    for (_, lam, mult) in s.indexed() {
        if mult == 2 {
            let f = fundamental(&q, lam, DEFAULT_TOL).unwrap();
            assert!(is_double_eigenvalue(&periodic, &f, 1e-6).unwrap());
            let g = gamma(&f).unwrap();
            println!(
                "  at lambda = {lam:.6}: curve distance {:.2e}",
                periodic.matrix().dist(&g.matrix())
            );
        }
    }

    // The orbit through diag(1, -1) contains the curve points above, so
    // interlaced critical values are off limits; the band scan still
    // reports closed ranges, with the tangency showing up as a shared
    // degenerate edge.
    let inv = slu2::bc::orbit_invariants(&UnitaryBC::new(slu2::mat2::Mat2::diag(
        slu2::mat2::c64(1.0, 0.0),
        slu2::mat2::c64(-1.0, 0.0),
    )).unwrap());
    println!("orbit through diag(1, -1) has invariants ({:+.3}, {:+.3})", inv.0.re, inv.1.re);

    let orbit = AdjointOrbit::hermitian(1.0, 1.0).unwrap();
    match critical_values(&q, &orbit, 1, None, 1e-10) {
        Err(OrbitError::MeetsCurve { lambda }) => {
            println!("critical_values refuses: orbit meets the curve near lambda = {lambda:.3e}");
        }
        other => panic!("expected the curve-crossing refusal, got {other:?}"),
    }
    let bands = eigenvalue_bands(&q, &orbit, 1, 1e-10).unwrap();
    for b in &bands {
        println!(
            "  band {}: [{:+.9}, {:+.9}]  degenerate edges: lower {}, upper {}",
            b.n, b.a, b.b, b.degenerate_lower, b.degenerate_upper
        );
    }
    // Bands touch at lambda = 0 where the orbit crosses the curve.
    assert!(bands[0].degenerate_upper && bands[1].degenerate_lower);
    assert!(bands[0].b.abs() < 1e-6 && bands[1].a.abs() < 1e-6);
}
