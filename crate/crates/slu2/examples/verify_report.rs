//! The orbit verification report: the band theorems checked end to end
//! on one orbit, as machine-readable JSON.

use slu2::fundsol::Potential;
use slu2::orbits::{verify_orbit_theorems, AdjointOrbit};
use std::f64::consts::PI;

fn main() {
    let q = Potential::Polynomial(vec![1.0, -4.0, 4.0]);
    let orbit = AdjointOrbit::exceptional(3.0 * PI / 2.0).unwrap();

    let report = verify_orbit_theorems(&q, &orbit, 2, [25, 25], 1e-9).unwrap();
    println!(
        "orbit alpha = 3 pi / 2, n_max = 2, window [{:.3}, {:.3}], hypothesis ok: {}",
        report.window[0], report.window[1], report.hypothesis_ok
    );
    for c in &report.checks {
        let status = if c.skipped {
            "skipped"
        } else if c.pass {
            "pass"
        } else {
            "FAIL"
        };
        println!("  {:26} {status:7} {}", c.name, c.detail);
    }
    assert!(report.pass);

    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
