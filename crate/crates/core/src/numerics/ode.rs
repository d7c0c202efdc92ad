use crate::error::{Error, Result};

/// One classical fourth-order Runge-Kutta step of `dy/dt = f(t, y)`.
///
/// A velocity that is non-finite at any stage aborts the step with
/// [`Error::TrajectoryAbort`]; errors from `f` itself pass through unchanged.
pub fn rk4_step<const N: usize, F>(t: f64, y: &[f64; N], dt: f64, f: F) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let eval = |t: f64, y: &[f64; N]| -> Result<[f64; N]> {
        let v = f(t, y)?;
        if v.iter().all(|x| x.is_finite()) {
            Ok(v)
        } else {
            Err(Error::TrajectoryAbort(format!("non-finite velocity at t = {t}")))
        }
    };
    let shift = |y: &[f64; N], k: &[f64; N], s: f64| -> [f64; N] {
        let mut out = *y;
        for (o, k) in out.iter_mut().zip(k) {
            *o += s * k;
        }
        out
    };
    let k1 = eval(t, y)?;
    let k2 = eval(t + 0.5 * dt, &shift(y, &k1, 0.5 * dt))?;
    let k3 = eval(t + 0.5 * dt, &shift(y, &k2, 0.5 * dt))?;
    let k4 = eval(t + dt, &shift(y, &k3, dt))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Autonomous convenience wrapper around [`rk4_step`].
pub fn ode_step<const N: usize, F>(state: &[f64; N], velocity: F, dt: f64) -> Result<[f64; N]>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    rk4_step(0.0, state, dt, |_, y| velocity(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(y: &[f64; 2]) -> Result<[f64; 2]> {
        Ok([-y[1], y[0]])
    }

    #[test]
    fn constant_and_zero_fields() {
        let y = ode_step(&[0.0, 0.0, 0.0], |_| Ok([1.0, 0.0, 0.0]), 0.5).unwrap();
        assert_eq!(y, [0.5, 0.0, 0.0]);
        let y0 = [0.3, -0.2];
        assert_eq!(ode_step(&y0, |_| Ok([0.0, 0.0]), 0.1).unwrap(), y0);
    }

    #[test]
    fn circular_orbit() {
        // 628 steps of 0.01 stop at t = 6.28, just short of the period
        let mut y = [1.0, 0.0];
        for _ in 0..628 {
            y = ode_step(&y, circle, 0.01).unwrap();
        }
        let t = 628.0 * 0.01f64;
        assert!((y[0] - t.cos()).abs() < 1e-4 && (y[1] - t.sin()).abs() < 1e-4);

        let dt = 2.0 * PI / 628.0;
        let mut y = [1.0, 0.0];
        for _ in 0..628 {
            y = ode_step(&y, circle, dt).unwrap();
        }
        assert!((y[0] - 1.0).abs() < 1e-4 && y[1].abs() < 1e-4);
    }

    #[test]
    fn conserves_hamiltonian_invariant_to_fourth_order() {
        // harmonic oscillator energy drift per step scales like dt^5
        let energy = |y: &[f64; 2]| 0.5 * (y[0] * y[0] + y[1] * y[1]);
        let drift = |dt: f64| {
            let y = ode_step(&[1.0, 0.0], circle, dt).unwrap();
            (energy(&y) - 0.5).abs()
        };
        let (d1, d2) = (drift(0.1), drift(0.05));
        assert!(d1 < 1e-5);
        assert!(d1 / d2 > 16.0, "ratio {}", d1 / d2);
    }

    #[test]
    fn non_finite_velocity_aborts() {
        let err = ode_step(&[1.0], |_| Ok([f64::INFINITY]), 0.1).unwrap_err();
        assert!(matches!(err, Error::TrajectoryAbort(_)));
    }

    #[test]
    fn fourth_order_global_error() {
        let run = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut y = [1.0, 0.0];
            for _ in 0..n {
                y = ode_step(&y, circle, dt).unwrap();
            }
            ((y[0] - 1f64.cos()).powi(2) + (y[1] - 1f64.sin()).powi(2)).sqrt()
        };
        let ratio = run(20) / run(40);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
