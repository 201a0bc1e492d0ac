//! Closed forms on the unit sphere through its embedding in R^3.

use std::f64::consts::PI;

use super::Coords;
use crate::{Error, Result};

type V3 = [f64; 3];

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: &V3) -> f64 {
    dot(a, a).sqrt()
}

pub(super) fn embed(c: &[f64]) -> V3 {
    let (st, ct) = c[0].sin_cos();
    let (sp, cp) = c[1].sin_cos();
    [st * cp, st * sp, ct]
}

fn chart(p: &V3) -> Coords {
    let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
    smallvec::smallvec![rho.atan2(p[2]), p[1].atan2(p[0])]
}

/// Ambient image of the chart tangent vector `(v_theta, v_phi)` at `c`.
fn push_forward(c: &[f64], v: &[f64]) -> V3 {
    let (st, ct) = c[0].sin_cos();
    let (sp, cp) = c[1].sin_cos();
    let e_theta = [ct * cp, ct * sp, -st];
    let e_phi = [-sp, cp, 0.0];
    [
        v[0] * e_theta[0] + v[1] * st * e_phi[0],
        v[0] * e_theta[1] + v[1] * st * e_phi[1],
        v[0] * e_theta[2] + v[1] * st * e_phi[2],
    ]
}

fn pull_back(c: &[f64], u: &V3) -> Coords {
    let (st, ct) = c[0].sin_cos();
    let (sp, cp) = c[1].sin_cos();
    let e_theta = [ct * cp, ct * sp, -st];
    let e_phi = [-sp, cp, 0.0];
    smallvec::smallvec![dot(u, &e_theta), dot(u, &e_phi) / st]
}

/// Point reached along the great circle, without chart bookkeeping.
fn exp_ambient(c: &[f64], v: &[f64]) -> V3 {
    let p = embed(c);
    let u = push_forward(c, v);
    let s = norm(&u);
    if s == 0.0 {
        return p;
    }
    let (sn, cs) = s.sin_cos();
    [
        p[0] * cs + u[0] / s * sn,
        p[1] * cs + u[1] / s * sn,
        p[2] * cs + u[2] / s * sn,
    ]
}

/// Exponential map. Fails when the great-circle arc crosses the excluded half meridian
/// `{y = 0, x <= 0}`, which includes passing through a pole.
pub(super) fn exp(c: &[f64], v: &[f64]) -> Result<Coords> {
    let p = embed(c);
    let u = push_forward(c, v);
    let s = norm(&u);
    let w = [u[0] / s, u[1] / s, u[2] / s];
    // gamma(tau) = p cos(tau) + w sin(tau); y(tau) = A cos(tau) + B sin(tau).
    let (a, b) = (p[1], w[1]);
    let x_at = |tau: f64| p[0] * tau.cos() + w[0] * tau.sin();
    let amp = (a * a + b * b).sqrt();
    if amp < 1e-15 {
        // The arc lies in the plane y = 0 and leaves the chart once x changes sign.
        let tau_cross = (p[0]).atan2(-w[0]);
        let tau_cross = if tau_cross <= 0.0 { tau_cross + PI } else { tau_cross };
        if tau_cross <= s {
            return Err(Error::ChartExit { t: tau_cross / s });
        }
    } else {
        let delta = b.atan2(a);
        let mut root = delta + PI / 2.0;
        while root > 0.0 {
            root -= PI;
        }
        while root <= 0.0 {
            root += PI;
        }
        while root <= s {
            if x_at(root) <= 0.0 {
                return Err(Error::ChartExit { t: root / s });
            }
            root += PI;
        }
    }
    Ok(chart(&exp_ambient(c, v)))
}

pub(super) fn distance(a: &[f64], b: &[f64]) -> f64 {
    let p = embed(a);
    let q = embed(b);
    norm(&cross(&p, &q)).atan2(dot(&p, &q))
}

pub(super) fn log(a: &[f64], b: &[f64]) -> Coords {
    let p = embed(a);
    let q = embed(b);
    let c = dot(&p, &q);
    let d = norm(&cross(&p, &q)).atan2(c);
    if d == 0.0 {
        return smallvec::smallvec![0.0, 0.0];
    }
    let r = [q[0] - c * p[0], q[1] - c * p[1], q[2] - c * p[2]];
    let rn = norm(&r);
    let u = [d * r[0] / rn, d * r[1] / rn, d * r[2] / rn];
    pull_back(a, &u)
}

pub(super) fn round_trip_error(a: &[f64], v: &[f64], b: &[f64]) -> f64 {
    let e = exp_ambient(a, v);
    let q = embed(b);
    norm(&[e[0] - q[0], e[1] - q[1], e[2] - q[2]])
}

#[cfg(test)]
pub(super) fn transport_rodrigues(a: &[f64], b: &[f64], v: &[f64]) -> Coords {
    // Rotation about p x q by the angle d(p, q) carries T_p to T_q along the great circle.
    let p = embed(a);
    let q = embed(b);
    let axis = cross(&p, &q);
    let an = norm(&axis);
    let k = [axis[0] / an, axis[1] / an, axis[2] / an];
    let theta = an.atan2(dot(&p, &q));
    let u = push_forward(a, v);
    let kxu = cross(&k, &u);
    let kdu = dot(&k, &u);
    let (s, c) = theta.sin_cos();
    let rot = [
        u[0] * c + kxu[0] * s + k[0] * kdu * (1.0 - c),
        u[1] * c + kxu[1] * s + k[1] * kdu * (1.0 - c),
        u[2] * c + kxu[2] * s + k[2] * kdu * (1.0 - c),
    ];
    pull_back(b, &rot)
}
