//! Adaptive classical Runge-Kutta integration.
//!
//! Step control is by step doubling: every step is taken once with `h` and twice with
//! `h/2`; the difference estimates the local error and the two results are combined by
//! local extrapolation.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Error tolerance per unit of integration time.
    pub tol: f64,
    pub h0: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            h0: 1e-2,
            h_min: 1e-12,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory always holds the initial state")
    }
}

fn rk4_step<F>(f: &F, t: f64, y: &[f64], h: f64, out: &mut [f64])
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    f(t, y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    f(t + 0.5 * h, &tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    f(t + 0.5 * h, &tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    f(t + h, &tmp, &mut k4);
    for i in 0..n {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `in_domain` is checked after every accepted step; leaving the domain is reported as
/// [`Error::ChartExit`]. When `record` is false only the endpoints are kept.
pub fn integrate<F, G>(
    f: F,
    y0: &[f64],
    t0: f64,
    t1: f64,
    opts: &OdeOptions,
    in_domain: G,
    record: bool,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: Fn(&[f64]) -> bool,
{
    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![y0.to_vec()],
    };
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = span.signum();
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = opts.h0.min(span.abs());
    let mut full = vec![0.0; n];
    let mut half = vec![0.0; n];
    let mut two_half = vec![0.0; n];

    for _ in 0..opts.max_steps {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = h * dir;
        rk4_step(&f, t, &y, hs, &mut full);
        rk4_step(&f, t, &y, 0.5 * hs, &mut half);
        rk4_step(&f, t + 0.5 * hs, &half, 0.5 * hs, &mut two_half);

        let err = full
            .iter()
            .zip(&two_half)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / 15.0;
        // Error estimates below the rounding floor of the state are not meaningful.
        let scale = y.iter().fold(1.0f64, |m, a| m.max(a.abs()));
        let allowed = opts.tol * h + 64.0 * f64::EPSILON * scale;
        if !err.is_finite() {
            h *= 0.25;
            if h < opts.h_min {
                return Err(Error::StepUnderflow { t });
            }
            continue;
        }
        if err <= allowed {
            for i in 0..n {
                y[i] = two_half[i] + (two_half[i] - full[i]) / 15.0;
            }
            t = if last { t1 } else { t + hs };
            if !in_domain(&y) {
                return Err(Error::ChartExit { t });
            }
            if record || t == t1 {
                traj.times.push(t);
                traj.states.push(y.clone());
            }
            if t == t1 {
                return Ok(traj);
            }
        }
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * (allowed / err).powf(0.25)).clamp(0.2, 4.0)
        };
        h *= factor;
        if h < opts.h_min {
            return Err(Error::StepUnderflow { t });
        }
    }
    if t != t1 {
        return Err(Error::StepUnderflow { t });
    }
    Ok(traj)
}
