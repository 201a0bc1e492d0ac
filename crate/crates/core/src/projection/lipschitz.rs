use serde::{Deserialize, Serialize};

use super::{ProjectOptions, Projector};
use crate::manifold::Point;
use crate::proxset::ProxSet;
use crate::sampling;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// Largest sampled ratio `d(P z1, P z2) / d(z1, z2)`.
    pub estimate: f64,
    pub pairs: usize,
    pub worst_pair: (Vec<f64>, Vec<f64>),
}

/// Empirical Lipschitz constant of the projection on `B(center, radius)`. Half the pairs
/// are independent, half are close (`1e-2 radius` apart) to probe the local slope.
pub fn lipschitz_estimate<P: Projector + ?Sized>(
    set: &P,
    center: &Point,
    radius: f64,
    n_pairs: usize,
    seed: u64,
    opts: &ProjectOptions,
) -> Result<LipschitzReport> {
    let m = set.manifold();
    m.check_point(center)?;
    let mut rng = sampling::rng(seed);
    let mut estimate = 0.0f64;
    let mut worst_pair = (center.to_vec(), center.to_vec());
    let mut pairs = 0;
    let mut attempts = 0;
    while pairs < n_pairs && attempts < 10 * n_pairs.max(1) {
        attempts += 1;
        let Ok(z1) = m.exp(center, &sampling::tangent_in_ball(&mut rng, &m, center, radius)) else {
            continue;
        };
        let z2 = if pairs % 2 == 0 {
            m.exp(center, &sampling::tangent_in_ball(&mut rng, &m, center, radius))
        } else {
            m.exp(&z1, &sampling::tangent_of_norm(&mut rng, &m, &z1, 1e-2 * radius))
        };
        let Ok(z2) = z2 else { continue };
        let d = m.distance(&z1, &z2);
        if d == 0.0 || m.distance(center, &z2) > radius {
            continue;
        }
        let p1 = set.project(&z1, opts)?.require_unique(&z1)?;
        let p2 = set.project(&z2, opts)?.require_unique(&z2)?;
        let ratio = m.distance(&p1.point, &p2.point) / d;
        if ratio > estimate {
            estimate = ratio;
            worst_pair = (z1.to_vec(), z2.to_vec());
        }
        pairs += 1;
    }
    if pairs == 0 {
        return Err(Error::NoFeasibleSamples);
    }
    Ok(LipschitzReport {
        estimate,
        pairs,
        worst_pair,
    })
}

/// Root of `2 t cot t = 1` on `(0, pi/2)`, approximately 1.16556.
pub fn cot_root() -> f64 {
    let f = |t: f64| 2.0 * t / t.tan() - 1.0;
    let (mut lo, mut hi) = (0.5, 1.5);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The radius recipe and constant bound for local Lipschitzness of the projection around a
/// set point, with each constant estimated by sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipRecipe {
    /// `R`: outer radius, assumed inside the convexity radius and the reach.
    pub big_r: f64,
    pub r_bar: f64,
    pub rho: f64,
    pub a: f64,
    /// `min{R/2, r_bar, 1/(4 rho), a/sqrt(k0)}`.
    pub r_max: f64,
    /// Radius actually used, `r < r_max`.
    pub r: f64,
    /// `1/2 - 2 rho r`.
    pub sigma: f64,
    /// Empirical Lipschitz constant of `log_x` on `B(x, R)`.
    pub c1: f64,
    /// Empirical Lipschitz constant of `exp_x` on `B(0, R)`.
    pub c2: f64,
    /// Empirical `kappa` with `2 kappa d(x1, x2)` bounding the slope of
    /// `v -> d^2(x1, exp_x v) - d^2(x2, exp_x v)`.
    pub kappa: f64,
    /// `2 kappa c2 c1^2 / sigma`.
    pub bound: f64,
}

pub fn lip_recipe(set: &ProxSet, x: &Point, big_r: f64, r: Option<f64>, n: usize, seed: u64) -> Result<LipRecipe> {
    let m = &set.manifold;
    m.check_point(x)?;
    let k0 = m.curvature_bound();
    let r_bar = m.convexity_radius(x);
    let rho = set.estimate_phi(x, big_r.min(0.5), 200, seed)?;
    let a = cot_root();
    let r_max = [
        big_r / 2.0,
        r_bar,
        if rho > 0.0 { 1.0 / (4.0 * rho) } else { f64::INFINITY },
        if k0 > 0.0 { a / k0.sqrt() } else { f64::INFINITY },
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let r = r.unwrap_or(0.9 * r_max);
    if !(r > 0.0 && r < r_max) {
        return Err(Error::RadiusPrecondition {
            distance: r,
            radius: r_max,
        });
    }
    let sigma = 0.5 - 2.0 * rho * r;

    let mut rng = sampling::rng(seed ^ 0x51ce);
    let (mut c1, mut c2, mut kappa) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..n {
        let u1 = sampling::tangent_in_ball(&mut rng, m, x, big_r);
        let u2 = if k % 2 == 0 {
            sampling::tangent_in_ball(&mut rng, m, x, big_r)
        } else {
            u1.add(&sampling::tangent_of_norm(&mut rng, m, x, 1e-3 * big_r))?
        };
        if m.norm(&u2) >= big_r {
            continue;
        }
        let (Ok(y1), Ok(y2)) = (m.exp(x, &u1), m.exp(x, &u2)) else { continue };
        let du = m.norm(&u1.sub(&u2)?);
        let dy = m.distance(&y1, &y2);
        if du > 0.0 && dy > 0.0 {
            c1 = c1.max(du / dy);
            c2 = c2.max(dy / du);
        }
        let w1 = sampling::tangent_in_ball(&mut rng, m, x, r);
        let w2 = sampling::tangent_in_ball(&mut rng, m, x, r);
        let (Ok(x1), Ok(x2)) = (m.exp(x, &w1), m.exp(x, &w2)) else { continue };
        let dx = m.distance(&x1, &x2);
        if dx == 0.0 || du == 0.0 {
            continue;
        }
        let f = |y: &Point| m.distance(&x1, y).powi(2) - m.distance(&x2, y).powi(2);
        kappa = kappa.max((f(&y1) - f(&y2)).abs() / (2.0 * dx * du));
    }
    Ok(LipRecipe {
        big_r,
        r_bar,
        rho,
        a,
        r_max,
        r,
        sigma,
        c1,
        c2,
        kappa,
        bound: 2.0 * kappa * c2 * c1 * c1 / sigma,
    })
}
