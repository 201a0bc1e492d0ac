//! Metric projection onto sets, projection onto tangent cones, and diagnostics built on
//! top of them.
//!
//! For an exterior query `z` the nearest point of a solid set lies on `psi = 0`, so the
//! projection is computed by gradient descent of `d^2(z, .)` on the zero set, started from
//! a Newton foot point and from the first boundary crossings of geodesic rays leaving `z`.

mod directional;
mod lipschitz;
mod shapiro;

pub use directional::{directional_derivative, DirectionalDerivative, DirectionalOptions};
pub use lipschitz::{cot_root, lip_recipe, lipschitz_estimate, LipRecipe, LipschitzReport};
pub use shapiro::{ddp_pair, one_dimensional_pair, shapiro_check, ShapiroProblem, ShapiroReport};

use serde::{Deserialize, Serialize};

use crate::manifold::{Manifold, Point, TangentVector};
use crate::proxset::{CombSet, ConeSpec, ProxSet, SetSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectOptions {
    /// Number of geodesic rays used as extra starts.
    pub m_start: usize,
    pub max_iter: usize,
    /// Stop once the tangential gradient norm falls below `tol_grad (1 + d)`.
    pub tol_grad: f64,
    /// Longest ray marched from the query point; defaults per manifold.
    pub search_radius: Option<f64>,
    /// Relative gap in distance under which two local minimizers count as tied.
    pub tie_rel: f64,
    /// Brute-force spacing for membership-oracle sets (the comb); `None` means exact.
    pub grid: Option<f64>,
}

impl Default for ProjectOptions {
    fn default() -> Self {
        Self {
            m_start: 8,
            max_iter: 500,
            tol_grad: 1e-12,
            search_radius: None,
            tie_rel: 1e-7,
            grid: None,
        }
    }
}

impl ProjectOptions {
    /// Single Newton start, used inside solvers where uniqueness is not in question.
    pub fn fast() -> Self {
        Self {
            m_start: 0,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicity {
    Unique,
    Ambiguous(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub point: Point,
    pub dist: f64,
    pub multiplicity: Multiplicity,
    pub iterations: usize,
}

impl ProjectionResult {
    pub fn is_unique(&self) -> bool {
        self.multiplicity == Multiplicity::Unique
    }

    /// All minimizers found (one when unique).
    pub fn minimizers(&self) -> Vec<Point> {
        match &self.multiplicity {
            Multiplicity::Unique => vec![self.point.clone()],
            Multiplicity::Ambiguous(v) => v.clone(),
        }
    }

    pub(crate) fn trivial(z: &Point) -> Self {
        Self {
            point: z.clone(),
            dist: 0.0,
            multiplicity: Multiplicity::Unique,
            iterations: 0,
        }
    }

    /// Fails with `AmbiguousProjection` unless unique.
    pub fn require_unique(self, z: &Point) -> Result<Self> {
        match &self.multiplicity {
            Multiplicity::Unique => Ok(self),
            Multiplicity::Ambiguous(v) => Err(Error::AmbiguousProjection {
                coords: z.to_vec(),
                count: v.len(),
            }),
        }
    }
}

/// Anything with a nearest-point map.
pub trait Projector {
    fn manifold(&self) -> Manifold;
    fn contains(&self, z: &Point) -> bool;
    fn project(&self, z: &Point, opts: &ProjectOptions) -> Result<ProjectionResult>;
}

impl Projector for ProxSet {
    fn manifold(&self) -> Manifold {
        self.manifold
    }
    fn contains(&self, z: &Point) -> bool {
        ProxSet::contains(self, z)
    }
    fn project(&self, z: &Point, opts: &ProjectOptions) -> Result<ProjectionResult> {
        project(self, z, opts)
    }
}

impl Projector for CombSet {
    fn manifold(&self) -> Manifold {
        Manifold::euclidean(2)
    }
    fn contains(&self, z: &Point) -> bool {
        CombSet::contains(self, z)
    }
    fn project(&self, z: &Point, opts: &ProjectOptions) -> Result<ProjectionResult> {
        match opts.grid {
            Some(h) => self.project_grid(z, h),
            None => self.project_exact(z),
        }
    }
}

impl Projector for SetSpec {
    fn manifold(&self) -> Manifold {
        SetSpec::manifold(self)
    }
    fn contains(&self, z: &Point) -> bool {
        match self {
            SetSpec::Prox(s) => s.contains(z),
            SetSpec::Comb(c) => c.contains(z),
        }
    }
    fn project(&self, z: &Point, opts: &ProjectOptions) -> Result<ProjectionResult> {
        match self {
            SetSpec::Prox(s) => Projector::project(s, z, opts),
            SetSpec::Comb(c) => Projector::project(c, z, opts),
        }
    }
}

/// Closed-form projection onto a cone.
pub fn cone_project(cone: &ConeSpec, v: &TangentVector) -> Result<TangentVector> {
    cone.project(v)
}

fn default_search_radius(m: &Manifold) -> f64 {
    match m {
        Manifold::Sphere2 => std::f64::consts::PI - 1e-3,
        _ => 20.0,
    }
}

/// Unit directions at `z`: evenly spaced angles in dimension 2, `+-e_i` otherwise.
fn ray_directions(m: &Manifold, z: &Point, count: usize) -> Vec<TangentVector> {
    let n = m.dim();
    if count == 0 {
        return vec![];
    }
    if n == 2 {
        (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                m.from_orthonormal(z, &[a.cos(), a.sin()])
            })
            .collect()
    } else {
        (0..2 * n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                m.from_orthonormal(z, &e)
            })
            .collect()
    }
}

/// First point along `t -> exp_z(t u)` where `psi` changes sign, refined by bisection and
/// polished onto the zero set.
fn march(set: &ProxSet, z: &Point, u: &TangentVector, t_max: f64) -> Option<Point> {
    let m = &set.manifold;
    let v0 = set.psi_at(z).ok()?;
    let s0 = v0.signum();
    let mut t = 0.0;
    let mut v = v0;
    let mut p = z.clone();
    while t < t_max {
        let g = set.gradient(&p).ok().map(|g| m.norm(&g)).unwrap_or(0.0);
        let h = if g > 0.0 { (0.5 * v.abs() / g).clamp(1e-4, 0.05) } else { 0.05 };
        let t_new = (t + h).min(t_max);
        let q = m.exp(z, &u.scale(t_new)).ok()?;
        let w = set.psi_at(&q).ok()?;
        if w == 0.0 || w.signum() != s0 {
            let (mut lo, mut hi) = (t, t_new);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let pm = m.exp(z, &u.scale(mid)).ok()?;
                if set.psi_at(&pm).ok()?.signum() == s0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let pm = m.exp(z, &u.scale(0.5 * (lo + hi))).ok()?;
            return set.foot_point(&pm).ok();
        }
        t = t_new;
        v = w;
        p = q;
    }
    None
}

struct Descent {
    point: Point,
    dist: f64,
    iterations: usize,
    converged: bool,
}

/// Gradient descent of `d^2(z, .)` restricted to the zero set of `psi`, with a Newton
/// retraction after each exponential step and Armijo backtracking. Running out of
/// iterations is reported through `converged`, not as an error.
fn descend(set: &ProxSet, z: &Point, start: Point, opts: &ProjectOptions) -> Result<Descent> {
    let m = &set.manifold;
    let mut p = start;
    let mut f = m.distance(z, &p).powi(2);
    for it in 0..opts.max_iter {
        let grad = m.log(&p, z)?.scale(-2.0);
        let n = set.unit_normal(&p)?;
        let gt = grad.sub(&n.scale(m.inner(&grad, &n)?))?;
        let gn2 = m.inner(&gt, &gt)?;
        let d = f.sqrt();
        if gn2.sqrt() <= opts.tol_grad * (1.0 + d) {
            return Ok(Descent {
                point: p,
                dist: d,
                iterations: it,
                converged: true,
            });
        }
        let slack = 8.0 * f64::EPSILON * (1.0 + f);
        let mut alpha = 0.5;
        let mut moved = false;
        while alpha > 1e-14 {
            if let Ok(q) = m.exp(&p, &gt.scale(-alpha)).and_then(|q| set.foot_point(&q)) {
                let fq = m.distance(z, &q).powi(2);
                if fq <= f - 1e-4 * alpha * gn2 + slack {
                    moved = q != p;
                    p = q;
                    f = fq;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !moved {
            // Decrease below roundoff: converged when the gradient is already tiny.
            return Ok(Descent {
                point: p,
                dist: d,
                iterations: it,
                converged: gn2.sqrt() <= 1e-7 * (1.0 + d),
            });
        }
    }
    let dist = f.sqrt();
    Ok(Descent {
        point: p,
        dist,
        iterations: opts.max_iter,
        converged: false,
    })
}

/// Nearest point(s) of `set` to `z`.
pub fn project(set: &ProxSet, z: &Point, opts: &ProjectOptions) -> Result<ProjectionResult> {
    let m = &set.manifold;
    m.check_point(z)?;
    if set.contains(z) {
        return Ok(ProjectionResult::trivial(z));
    }
    let mut starts = vec![];
    let cap = opts.search_radius.unwrap_or_else(|| default_search_radius(m));
    let mut t_max = cap;
    if let Ok(f) = set.foot_point(z) {
        t_max = (3.0 * m.distance(z, &f) + 1e-3).min(cap);
        starts.push(f);
    }
    for u in ray_directions(m, z, opts.m_start) {
        if let Some(p) = march(set, z, &u, t_max) {
            starts.push(p);
        }
    }
    if starts.is_empty() {
        return Err(Error::AllStartsFailed);
    }

    let mut found = vec![];
    let mut iterations = 0;
    let mut last_err = None;
    for s in starts {
        match descend(set, z, s, opts) {
            Ok(d) => {
                iterations += d.iterations;
                found.push(d);
            }
            Err(e) => last_err = Some(e),
        }
    }
    if !found.iter().any(|d| d.converged) {
        return Err(match last_err {
            Some(e) if found.is_empty() => e,
            _ => Error::NoConvergence {
                max_iter: opts.max_iter,
            },
        });
    }
    // Unconverged iterates still count: a distinct point tied with the best distance is a
    // near-minimizer in its own right.
    let best = found.iter().map(|d| d.dist).fold(f64::INFINITY, f64::min);
    let tie = 1e-12 + opts.tie_rel * best;
    let mut tied: Vec<Descent> = found.into_iter().filter(|d| d.dist <= best + tie).collect();
    tied.sort_by(|a, b| lex(&a.point, &b.point));
    let tol_unique = 1e-6 * (2.0 * best).max(1e-2);
    let mut reps: Vec<Descent> = vec![];
    for d in tied {
        match reps.iter_mut().find(|r| m.distance(&r.point, &d.point) <= tol_unique) {
            Some(r) if d.dist < r.dist => *r = d,
            Some(_) => {}
            None => reps.push(d),
        }
    }
    let winner = reps
        .iter()
        .min_by(|a, b| a.dist.total_cmp(&b.dist))
        .expect("at least one minimizer");
    let multiplicity = if reps.len() == 1 {
        Multiplicity::Unique
    } else {
        Multiplicity::Ambiguous(reps.iter().map(|r| r.point.clone()).collect())
    };
    Ok(ProjectionResult {
        point: winner.point.clone(),
        dist: winner.dist,
        multiplicity,
        iterations,
    })
}

pub(crate) fn lex(a: &Point, b: &Point) -> std::cmp::Ordering {
    for (x, y) in a.coords.iter().zip(&b.coords) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests;
