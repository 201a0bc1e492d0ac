use serde::{Deserialize, Serialize};

use super::DiscreteCurve;
use crate::manifold::{Point, TangentVector};
use crate::proxset::{ProxSet, Region};
use crate::{Error, Result};

/// A tangent vector at each node of a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationField {
    pub vectors: Vec<TangentVector>,
}

impl VariationField {
    pub fn new(curve: &DiscreteCurve, comps: &[Vec<f64>]) -> Result<Self> {
        if comps.len() != curve.len() {
            return Err(Error::DimensionMismatch {
                expected: curve.len(),
                got: comps.len(),
            });
        }
        let vectors = curve
            .points
            .iter()
            .zip(comps)
            .map(|(p, c)| curve.manifold.tangent(p, c))
            .collect::<Result<_>>()?;
        Ok(Self { vectors })
    }

    pub fn from_fn(curve: &DiscreteCurve, mut f: impl FnMut(usize, &Point) -> Vec<f64>) -> Result<Self> {
        let comps: Vec<Vec<f64>> = curve.points.iter().enumerate().map(|(i, p)| f(i, p)).collect();
        Self::new(curve, &comps)
    }

    /// Vanishes at both endpoints.
    pub fn is_proper(&self) -> bool {
        self.vectors.first().is_some_and(TangentVector::is_zero) && self.vectors.last().is_some_and(TangentVector::is_zero)
    }

    /// Each vector lies in the Bouligand tangent cone at its node.
    pub fn respects_tangent_cones(&self, set: &ProxSet, tol: f64) -> Result<bool> {
        for v in &self.vectors {
            if !set.bouligand_tangent_cone(&v.base)?.contains(v, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_base(&self, curve: &DiscreteCurve) -> Result<()> {
        if self.vectors.len() != curve.len() {
            return Err(Error::DimensionMismatch {
                expected: curve.len(),
                got: self.vectors.len(),
            });
        }
        if self.vectors.iter().zip(&curve.points).any(|(v, p)| v.base != *p) {
            return Err(Error::BaseMismatch);
        }
        Ok(())
    }
}

/// First variation of length along `field`:
/// `[<V, gamma'>] - int <V, D_t gamma'> dt - sum <V(a_i), jump of gamma' at a_i>`,
/// evaluated after reparametrizing by arc length.
pub fn first_variation(curve: &DiscreteCurve, field: &VariationField) -> Result<f64> {
    field.check_base(curve)?;
    let c = curve.arc_length_reparametrized()?;
    let m = &c.manifold;
    for i in c.smooth_nodes() {
        let (vel, _) = c.central_derivatives(i);
        let speed = m.norm_at(&c.points[i], &vel);
        if (speed - 1.0).abs() > 1e-2 {
            return Err(Error::InvalidCurve(format!("speed {speed} at node {i} after reparametrization")));
        }
    }
    let bounds = c.segment_bounds();
    let mut integral = 0.0;
    for w in bounds.windows(2) {
        let (k0, k1) = (w[0], w[1]);
        if k1 - k0 < 2 {
            continue;
        }
        let mut f = vec![0.0; k1 - k0 + 1];
        for i in k0 + 1..k1 {
            let a = c.covariant_accel(i)?;
            f[i - k0] = m.inner(&field.vectors[i], &a)?;
        }
        let t = &c.times[k0..=k1];
        let last = k1 - k0;
        if last >= 3 {
            f[0] = f[1] + (f[1] - f[2]) * (t[1] - t[0]) / (t[2] - t[1]);
            f[last] = f[last - 1] + (f[last - 1] - f[last - 2]) * (t[last] - t[last - 1]) / (t[last - 1] - t[last - 2]);
        } else {
            f[0] = f[1];
            f[last] = f[1];
        }
        integral += f
            .windows(2)
            .zip(t.windows(2))
            .map(|(f, t)| 0.5 * (f[0] + f[1]) * (t[1] - t[0]))
            .sum::<f64>();
    }
    let n = c.len() - 1;
    let start = c.one_sided_velocity(0, true, bounds[1]);
    let end = c.one_sided_velocity(n, false, bounds[bounds.len() - 2]);
    let mut total = m.inner(&field.vectors[n], &end)? - m.inner(&field.vectors[0], &start)? - integral;
    for (k, &b) in bounds.iter().enumerate().skip(1).take(bounds.len() - 2) {
        let minus = c.one_sided_velocity(b, false, bounds[k - 1]);
        let plus = c.one_sided_velocity(b, true, bounds[k + 1]);
        total -= m.inner(&field.vectors[b], &plus.sub(&minus)?)?;
    }
    Ok(total)
}

/// Moves each node along its geodesic `exp(p_i, s V_i)`; every node must stay in `S`.
pub fn variation_apply(curve: &DiscreteCurve, field: &VariationField, s: f64, set: &ProxSet) -> Result<DiscreteCurve> {
    let moved = displace(curve, field, s)?;
    for (i, p) in moved.points.iter().enumerate() {
        if set.classify(p)? == Region::Exterior {
            return Err(Error::InfeasibleNode {
                index: i,
                psi: set.psi_at(p)?,
            });
        }
    }
    Ok(moved)
}

fn displace(curve: &DiscreteCurve, field: &VariationField, s: f64) -> Result<DiscreteCurve> {
    field.check_base(curve)?;
    let points = field
        .vectors
        .iter()
        .map(|v| curve.manifold.exp(&v.base, &v.scale(s)))
        .collect::<Result<_>>()?;
    DiscreteCurve::new(curve.manifold, curve.times.clone(), points, curve.breakpoints.clone())
}

/// Largest `s <= s_max` (to bisection accuracy) for which every moved node is in `S`.
pub fn feasibility_horizon(curve: &DiscreteCurve, field: &VariationField, set: &ProxSet, s_max: f64) -> Result<f64> {
    field.check_base(curve)?;
    let feasible = |v: &TangentVector, s: f64| {
        curve
            .manifold
            .exp(&v.base, &v.scale(s))
            .ok()
            .and_then(|q| set.classify(&q).ok())
            .is_some_and(|r| r != Region::Exterior)
    };
    let mut horizon = s_max;
    for v in field.vectors.iter().filter(|v| !v.is_zero()) {
        if feasible(v, horizon) {
            continue;
        }
        let (mut lo, mut hi) = (0.0, horizon);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if feasible(v, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        horizon = lo;
    }
    Ok(horizon)
}

/// One-sided second-order difference `(4 L(s) - L(2s) - 3 L(0)) / (2s)` of the discrete length.
pub fn finite_difference_length_derivative(
    curve: &DiscreteCurve,
    field: &VariationField,
    s: f64,
    set: Option<&ProxSet>,
) -> Result<f64> {
    let moved = |h: f64| match set {
        Some(set) => variation_apply(curve, field, h, set),
        None => displace(curve, field, h),
    };
    let l0 = curve.length();
    let l1 = moved(s)?.length();
    let l2 = moved(2.0 * s)?.length();
    Ok((4.0 * l1 - l2 - 3.0 * l0) / (2.0 * s))
}
