//! Closed forms on the upper half-plane, via the Cayley map to the unit disk.
//!
//! After the normalisation `w = (z - x_1) / y_1` the base point sits at `i`, where the
//! hyperbolic and Euclidean norms agree, and geodesics through `i` become diameters of
//! the disk under `zeta = (w - i) / (w + i)`.

use std::f64::consts::FRAC_PI_2;

use super::Coords;

pub(super) fn distance(a: &[f64], b: &[f64]) -> f64 {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (chord / (2.0 * (a[1] * b[1]).sqrt())).asinh()
}

/// The displayed closed form `2 ln((|z2 - z1| + |z2 - conj z1|) / (2 sqrt(y1 y2)))`.
#[cfg(test)]
pub(super) fn distance_log_form(a: &[f64], b: &[f64]) -> f64 {
    let dx = b[0] - a[0];
    let num = (dx * dx + (b[1] - a[1]).powi(2)).sqrt() + (dx * dx + (b[1] + a[1]).powi(2)).sqrt();
    2.0 * (num / (2.0 * (a[1] * b[1]).sqrt())).ln()
}

pub(super) fn exp(c: &[f64], v: &[f64]) -> Coords {
    let (x, y) = (c[0], c[1]);
    let d = v[0].hypot(v[1]) / y;
    if d == 0.0 {
        return smallvec::smallvec![x, y];
    }
    // Direction angle beta of the disk diameter; the upward direction maps to beta = 0.
    let alpha = v[1].atan2(v[0]);
    let beta = alpha - FRAC_PI_2;
    let r = (0.5 * d).tanh();
    let one_minus_r = 2.0 / (d.exp() + 1.0);
    let (sb, _) = beta.sin_cos();
    let half = (0.5 * beta).sin();
    let re_den = one_minus_r + 2.0 * r * half * half;
    let den = re_den * re_den + r * r * sb * sb;
    let re_w = -2.0 * r * sb / den;
    let im_w = one_minus_r * (1.0 + r) / den;
    smallvec::smallvec![x + y * re_w, y * im_w]
}

pub(super) fn log(a: &[f64], b: &[f64]) -> Coords {
    let (x1, y1) = (a[0], a[1]);
    let p = (b[0] - x1) / y1;
    let q = b[1] / y1;
    let d = distance(a, b);
    if d == 0.0 {
        return smallvec::smallvec![0.0, 0.0];
    }
    let s = p * p + (q - 1.0) * (q + 1.0);
    let m = (4.0 * p * p + s * s).sqrt();
    smallvec::smallvec![y1 * d * 2.0 * p / m, y1 * d * s / m]
}
