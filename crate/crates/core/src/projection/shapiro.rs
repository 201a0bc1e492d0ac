//! Shapiro's perturbation bound for two minimization problems
//! `min_S f` and `min_T g` in a finite-dimensional space:
//!
//! `|x_bar - x0| <= kappa / alpha + 2 delta1 + sqrt((k1 delta1 + k2 delta2) / alpha)`
//!
//! where `alpha` is a quadratic-growth constant of `f` at `x0` on `S cap W`. Every constant
//! here is an empirical maximum over the supplied samples.

use serde::{Deserialize, Serialize};

use super::{ProjectOptions, Projector};
use crate::manifold::{Point, TangentVector};
use crate::proxset::ProxSet;
use crate::{Error, Result};

type Objective<'a> = Box<dyn Fn(&[f64]) -> f64 + 'a>;

pub struct ShapiroProblem<'a> {
    pub f: Objective<'a>,
    pub g: Objective<'a>,
    /// Samples of `S cap W` and `T cap W`.
    pub s_samples: Vec<Vec<f64>>,
    pub t_samples: Vec<Vec<f64>>,
    /// Samples of `W`, for the Lipschitz constants.
    pub w_samples: Vec<Vec<f64>>,
    pub x0: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapiroReport {
    pub alpha: f64,
    pub kappa: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub k1: f64,
    pub k2: f64,
    pub bound: f64,
    pub actual: f64,
    pub ok: bool,
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lipschitz(h: &dyn Fn(&[f64]) -> f64, pts: &[Vec<f64>]) -> f64 {
    let vals: Vec<f64> = pts.iter().map(|p| h(p)).collect();
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = norm_diff(&pts[i], &pts[j]);
            if d > 0.0 {
                best = best.max((vals[i] - vals[j]).abs() / d);
            }
        }
    }
    best
}

fn set_distance(x: &[f64], set: &[Vec<f64>]) -> f64 {
    set.iter().map(|s| norm_diff(x, s)).fold(f64::INFINITY, f64::min)
}

pub fn shapiro_check(p: &ShapiroProblem) -> Result<ShapiroReport> {
    let f0 = (p.f)(&p.x0);
    let scale = 1e-12 * (1.0 + f0.abs());
    let mut violation = 0.0f64;
    for s in &p.s_samples {
        violation = violation.max(f0 + p.alpha * norm_diff(s, &p.x0).powi(2) - (p.f)(s));
    }
    if violation > scale {
        return Err(Error::QuadraticGrowthViolated { violation });
    }
    let h = |x: &[f64]| (p.g)(x) - (p.f)(x);
    let kappa = lipschitz(&h, &p.w_samples);
    let k1 = lipschitz(&*p.f, &p.w_samples);
    let k2 = lipschitz(&*p.g, &p.w_samples);
    let delta1 = p
        .t_samples
        .iter()
        .map(|t| set_distance(t, &p.s_samples))
        .fold(0.0f64, f64::max);
    let delta2 = set_distance(&p.x0, &p.t_samples);
    let bound = kappa / p.alpha + 2.0 * delta1 + ((k1 * delta1 + k2 * delta2) / p.alpha).sqrt();
    let actual = norm_diff(&p.x_bar, &p.x0);
    Ok(ShapiroReport {
        alpha: p.alpha,
        kappa,
        delta1,
        delta2,
        k1,
        k2,
        bound,
        actual,
        ok: actual <= bound + 1e-12,
    })
}

fn grid_1d(lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
    (0..=n).map(|i| vec![lo + (hi - lo) * i as f64 / n as f64]).collect()
}

/// `min x^2` versus `min (x - eps)^2`, both over `[-1, 1]`.
pub fn one_dimensional_pair(eps: f64, n: usize) -> ShapiroProblem<'static> {
    let grid = grid_1d(-1.0, 1.0, n);
    ShapiroProblem {
        f: Box::new(|x| x[0] * x[0]),
        g: Box::new(move |x| (x[0] - eps) * (x[0] - eps)),
        s_samples: grid.clone(),
        t_samples: grid.clone(),
        w_samples: grid,
        x0: vec![0.0],
        x_bar: vec![eps],
        alpha: 1.0,
    }
}

/// The pair behind the directional derivative of the projection, in orthonormal tangent
/// coordinates at a set point `x`:
///
/// * `min |w - t v|^2` over `w` in the tangent cone, solved by `v* = P_T(t v)`;
/// * `min d^2(exp_x w, exp_x t v)` over `w` in `log_x(S)`, solved by
///   `log_x(P_S(exp_x t v))`;
///
/// with `W` the ball of radius `2 t |v|`, sampled on an `n x n` grid.
pub fn ddp_pair<'a>(
    set: &'a ProxSet,
    x: &Point,
    v: &TangentVector,
    t: f64,
    n: usize,
    opts: &ProjectOptions,
) -> Result<ShapiroProblem<'a>> {
    let m = set.manifold;
    if m.dim() != 2 {
        return Err(Error::Unsupported("ddp pairs outside dimension 2".into()));
    }
    let cone = set.bouligand_tangent_cone(x)?;
    let tv = v.scale(t);
    let target = m.exp(x, &tv)?;
    let v_star = m.to_orthonormal(&cone.project(&tv)?).to_vec();
    let proj = Projector::project(set, &target, opts)?.require_unique(&target)?;
    let v_bar = m.to_orthonormal(&m.log(x, &proj.point)?).to_vec();
    let tv_o = m.to_orthonormal(&tv).to_vec();

    let radius = 2.0 * m.norm(&tv);
    let mut w_samples = vec![];
    for i in 0..=n {
        for j in 0..=n {
            let a = -radius + 2.0 * radius * i as f64 / n as f64;
            let b = -radius + 2.0 * radius * j as f64 / n as f64;
            if a * a + b * b <= radius * radius {
                w_samples.push(vec![a, b]);
            }
        }
    }
    let to_point = {
        let x = x.clone();
        move |w: &[f64]| m.exp(&x, &m.from_orthonormal(&x, w))
    };
    let s_samples: Vec<Vec<f64>> = w_samples
        .iter()
        .filter(|w| {
            let u = m.from_orthonormal(x, w);
            cone.contains(&u, 1e-12).unwrap_or(false)
        })
        .cloned()
        .collect();
    let t_samples: Vec<Vec<f64>> = w_samples
        .iter()
        .filter(|w| to_point(w).map(|p| set.contains(&p)).unwrap_or(false))
        .cloned()
        .collect();
    let tv_f = tv_o.clone();
    let f = move |w: &[f64]| norm_diff(w, &tv_f).powi(2);
    let g = {
        let to_point = to_point.clone();
        move |w: &[f64]| match to_point(w) {
            Ok(p) => m.distance(&p, &target).powi(2),
            Err(_) => f64::NAN,
        }
    };
    Ok(ShapiroProblem {
        f: Box::new(f),
        g: Box::new(g),
        s_samples,
        t_samples,
        w_samples,
        x0: v_star,
        x_bar: v_bar,
        alpha: 1.0,
    })
}
