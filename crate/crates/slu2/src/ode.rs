//! Adaptive Dormand-Prince 5(4) integration for small fixed-size systems.
//!
//! The solvers in this crate integrate initial value problems on [0, 1] with
//! smooth right-hand sides and need endpoint values only, so a single
//! embedded-pair stepper with PI-free step control is enough. Tolerances are
//! applied per component as `atol + rtol * |y|`.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at x = {x} (h = {h:.3e})")]
    StepUnderflow { x: f64, h: f64 },
    #[error("step limit exceeded ({0} steps)")]
    TooManySteps(usize),
    #[error("non-finite state at x = {x}")]
    NonFinite { x: f64 },
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// Fifth-order weights; the seventh stage is FSAL.
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the fifth- and embedded fourth-order solutions.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const MAX_STEPS: usize = 2_000_000;

/// Integrate `y' = f(x, y)` from `x0` to `x1`, returning the terminal state.
pub fn rk45<const N: usize, F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: [f64; N],
    rtol: f64,
    atol: f64,
) -> Result<[f64; N], OdeError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut h = (0.01 * span.abs()).min(span.abs()) * dir;
    let h_min = span.abs() * 1e-14;

    for _ in 0..MAX_STEPS {
        if (x - x1) * dir >= 0.0 {
            return Ok(y);
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        if h.abs() < h_min {
            return Err(OdeError::StepUnderflow { x, h });
        }

        let mut yt = [0.0; N];

        for i in 0..N {
            yt[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = f(x + C2 * h, &yt);
        for i in 0..N {
            yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = f(x + C3 * h, &yt);
        for i in 0..N {
            yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = f(x + C4 * h, &yt);
        for i in 0..N {
            yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = f(x + C5 * h, &yt);
        for i in 0..N {
            yt[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = f(x + h, &yt);
        let mut y5 = [0.0; N];
        for i in 0..N {
            y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        let k7 = f(x + h, &y5);

        let mut err_sq = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i]
                    + E3 * k3[i]
                    + E4 * k4[i]
                    + E5 * k5[i]
                    + E6 * k6[i]
                    + E7 * k7[i]);
            let sc = atol + rtol * y[i].abs().max(y5[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            x += h;
            y = y5;
            k1 = k7;
            if !y.iter().all(|v| v.is_finite()) {
                return Err(OdeError::NonFinite { x });
            }
        }
        let fac = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= fac;
    }
    Err(OdeError::TooManySteps(MAX_STEPS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = rk45(|_, y: &[f64; 1]| [-y[0]], 0.0, 1.0, [1.0], 1e-12, 1e-14).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_high_frequency() {
        // y'' = -w^2 y integrated as a first-order pair; exact solution cos(w x).
        let w = 40.0f64;
        let y = rk45(
            |_, y: &[f64; 2]| [y[1], -w * w * y[0]],
            0.0,
            1.0,
            [1.0, 0.0],
            1e-12,
            1e-14,
        )
        .unwrap();
        assert!((y[0] - w.cos()).abs() < 1e-9, "y = {}, exact {}", y[0], w.cos());
        assert!((y[1] + w * w.sin()).abs() < 1e-7);
    }

    #[test]
    fn backward_integration() {
        let y = rk45(|_, y: &[f64; 1]| [y[0]], 1.0, 0.0, [1.0], 1e-12, 1e-14).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn zero_span_is_identity() {
        let y = rk45(|_, y: &[f64; 1]| [y[0]], 0.5, 0.5, [3.0], 1e-10, 1e-12).unwrap();
        assert_eq!(y[0], 3.0);
    }
}
