use serde::{Deserialize, Serialize};

use super::{ProjectOptions, Projector};
use crate::manifold::{Point, TangentVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalOptions {
    pub t0: f64,
    /// The grid is `t0, t0/2, ..., t0/2^halvings`.
    pub halvings: usize,
    /// Largest accepted change between the last two extrapolants, relative to `1 + |v|`.
    pub settle_tol: f64,
    pub project: ProjectOptions,
}

impl Default for DirectionalOptions {
    fn default() -> Self {
        Self {
            t0: 1e-2,
            halvings: 6,
            settle_tol: 1e-3,
            project: ProjectOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalDerivative {
    pub value: TangentVector,
    pub steps: Vec<f64>,
    /// Difference quotients `log_x(P(exp_x(t v))) / t` per step.
    pub quotients: Vec<Vec<f64>>,
    /// Norm of the change between the last two extrapolants.
    pub change: f64,
}

/// `P'(x; v)` as the first-order Richardson limit of `log_x(P(exp_x(t v))) / t`.
pub fn directional_derivative<P: Projector + ?Sized>(
    set: &P,
    x: &Point,
    v: &TangentVector,
    opts: &DirectionalOptions,
) -> Result<DirectionalDerivative> {
    let m = set.manifold();
    m.check_point(x)?;
    if !set.contains(x) {
        return Err(Error::ExteriorPoint { psi: f64::NAN });
    }
    let mut steps = vec![];
    let mut quotients: Vec<TangentVector> = vec![];
    for k in 0..=opts.halvings {
        let t = opts.t0 / 2f64.powi(k as i32);
        let z = m.exp(x, &v.scale(t))?;
        let p = set.project(&z, &opts.project)?.require_unique(&z)?;
        quotients.push(m.log(x, &p.point)?.scale(1.0 / t));
        steps.push(t);
    }
    let extrap: Vec<TangentVector> = quotients
        .windows(2)
        .map(|w| w[1].scale(2.0).sub(&w[0]))
        .collect::<Result<_>>()?;
    let value = extrap.last().cloned().unwrap_or_else(|| quotients[0].clone());
    let change = if extrap.len() >= 2 {
        m.norm(&value.sub(&extrap[extrap.len() - 2])?)
    } else {
        0.0
    };
    if !(change <= opts.settle_tol * (1.0 + m.norm(v))) {
        return Err(Error::ExtrapolationDiverged { change });
    }
    Ok(DirectionalDerivative {
        value,
        steps,
        quotients: quotients.iter().map(|q| q.comps.to_vec()).collect(),
        change,
    })
}
