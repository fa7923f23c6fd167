//! One boundary condition through its charts: separated and coupled
//! conditions as unitaries, the Cayley transform to a Hermitian matrix,
//! classification flags, and the coordinates of a singular-stratum point.

use slu2::bc::{
    classify, exceptional_coords, from_coupled, from_hermitian, from_separated, to_hermitian,
    CoupledBC, SeparatedBC,
};
use slu2::fundsol::Potential;
use slu2::spectrum::{eigenvalues, EigOptions};
use std::f64::consts::PI;

fn main() {
    // A Robin pair y'(0) = y(0), y'(1) = -2 y(1) in the separated chart.
    let s = SeparatedBC::new(PI / 4.0, PI - (0.5f64).atan()).unwrap();
    let u = from_separated(&s);
    let class = classify(&u);
    println!("separated (alpha = pi/4):");
    println!("  stratum {:?}, real {}, separated {}", class.stratum, class.is_real, class.is_separated);

    // Cayley chart: U regular means U = (A - i)(A + i)^{-1} for a unique
    // Hermitian A, and the round trip is exact.
    let a = to_hermitian(&u).unwrap();
    println!("  hermitian chart: a = {:+.6}, c = {:+.6}, b = {:+.6}{:+.6}i", a.a, a.c, a.b.re, a.b.im);
    let back = from_hermitian(&a);
    println!("  round trip distance {:.2e}", back.matrix().dist(&u.matrix()));

    // Periodic conditions are coupled: (y(1), y'(1)) = K (y(0), y'(0)).
    let periodic = from_coupled(&CoupledBC::new(0.0, [1.0, 0.0, 0.0, 1.0]).unwrap());
    let class = classify(&periodic);
    println!("periodic:");
    println!("  stratum {:?}, real {}, separated {}", class.stratum, class.is_real, class.is_separated);

    // Singular-stratum conditions carry the (alpha, t, gamma) chart
    // instead of a Hermitian matrix.
    let x = exceptional_coords(&periodic).unwrap();
    println!("  singular chart: alpha = {:.6}, t = {:+.6}, gamma = {:.6}", x.alpha, x.t, x.gamma);
    assert!(to_hermitian(&periodic).is_err());

    // Both charts feed the same solver.
    let q = Potential::Constant(3.0);
    for (name, cond) in [("robin", &u), ("periodic", &periodic)] {
        let s = eigenvalues(&q, cond, 3, EigOptions::default()).unwrap();
        let lams: Vec<String> = s.indexed().map(|(n, lam, m)| {
            if m == 2 { format!("lambda_{n} = {lam:.6} (x2)") } else { format!("lambda_{n} = {lam:.6}") }
        }).collect();
        println!("{name}: {}", lams.join(", "));
    }
}
