use std::f64::consts::{FRAC_PI_2, PI};

use super::DiscreteCurve;
use crate::manifold::Manifold;
use crate::Result;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// The latitude arc `(theta0, t / sin theta0)` for `|t| <= pi sin(theta0) / 2`.
pub fn sphere_boundary_curve(theta0: f64, n: usize) -> Result<DiscreteCurve> {
    let m = Manifold::Sphere2;
    let half = FRAC_PI_2 * theta0.sin();
    let times = linspace(-half, half, n.max(2));
    let points = times
        .iter()
        .map(|t| m.point(&[theta0, t / theta0.sin()]))
        .collect::<Result<_>>()?;
    DiscreteCurve::new(m, times, points, vec![])
}

/// Down the meridian `phi = -pi/2` to the equator, along the equator, and back up
/// `phi = pi/2`; parametrized by arc length with breakpoints at the two corners.
pub fn sphere_alpha_curve(theta0: f64, n: usize) -> Result<DiscreteCurve> {
    let m = Manifold::Sphere2;
    let leg = (theta0 - FRAC_PI_2).abs();
    let total = 2.0 * leg + PI;
    let per = |len: f64| ((n as f64 * len / total).round() as usize).max(2);
    let (n_leg, n_mid) = (per(leg), per(PI));
    let mut coords: Vec<[f64; 2]> = Vec::new();
    for th in linspace(theta0, FRAC_PI_2, n_leg) {
        coords.push([th, -FRAC_PI_2]);
    }
    let first = coords.len() - 1;
    for ph in linspace(-FRAC_PI_2, FRAC_PI_2, n_mid).into_iter().skip(1) {
        coords.push([FRAC_PI_2, ph]);
    }
    let second = coords.len() - 1;
    for th in linspace(FRAC_PI_2, theta0, n_leg).into_iter().skip(1) {
        coords.push([th, FRAC_PI_2]);
    }
    let points: Vec<_> = coords.iter().map(|c| m.point(c)).collect::<Result<_>>()?;
    let mut times = vec![0.0];
    for w in points.windows(2) {
        times.push(times.last().unwrap() + m.distance(&w[0], &w[1]));
    }
    DiscreteCurve::new(m, times, points, vec![first, second])
}

/// `(2t, 2)` on the upper half-plane for `t in [t0, t1]`.
pub fn hyperbolic_line(t0: f64, t1: f64, n: usize) -> Result<DiscreteCurve> {
    let m = Manifold::Hyperbolic2;
    let times = linspace(t0, t1, n.max(2));
    let points = times.iter().map(|t| m.point(&[2.0 * t, 2.0])).collect::<Result<_>>()?;
    DiscreteCurve::new(m, times, points, vec![])
}
