//! Discrete admissible curves: nodes `p_i = gamma(t_i)` with declared breakpoints.

mod examples;
mod solver;
mod variation;

pub use examples::{hyperbolic_line, sphere_alpha_curve, sphere_boundary_curve};
pub use solver::{minimize_curve, SolverParams, SolverReport, StopReason};
pub use variation::{
    feasibility_horizon, finite_difference_length_derivative, first_variation, variation_apply, VariationField,
};

use serde::{Deserialize, Serialize};

use crate::manifold::{Coords, Manifold, Point, TangentVector};
use crate::proxset::{ConeSpec, ProxSet, Region, Solidity};
use crate::{Error, Result};

/// On-disk curve format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub breakpoints: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    pub manifold: Manifold,
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    /// Interior node indices where the curve is only piecewise smooth.
    pub breakpoints: Vec<usize>,
}

impl DiscreteCurve {
    pub fn new(manifold: Manifold, times: Vec<f64>, points: Vec<Point>, mut breakpoints: Vec<usize>) -> Result<Self> {
        if times.len() != points.len() {
            return Err(Error::InvalidCurve(format!(
                "{} times but {} points",
                times.len(),
                points.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidCurve("need at least two nodes".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCurve("times must be strictly increasing".into()));
        }
        for p in &points {
            manifold.check_point(p)?;
        }
        breakpoints.sort_unstable();
        breakpoints.dedup();
        if let Some(&b) = breakpoints.iter().find(|&&b| b == 0 || b + 1 >= times.len()) {
            return Err(Error::InvalidCurve(format!("breakpoint {b} is not an interior node")));
        }
        Ok(Self {
            manifold,
            times,
            points,
            breakpoints,
        })
    }

    pub fn from_file(manifold: Manifold, file: &CurveFile) -> Result<Self> {
        let points = file.points.iter().map(|p| manifold.point(p)).collect::<Result<_>>()?;
        Self::new(manifold, file.times.clone(), points, file.breakpoints.clone())
    }

    pub fn to_file(&self) -> CurveFile {
        CurveFile {
            times: self.times.clone(),
            points: self.points.iter().map(Point::to_vec).collect(),
            breakpoints: self.breakpoints.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_breakpoint(&self, i: usize) -> bool {
        self.breakpoints.binary_search(&i).is_ok()
    }

    /// Interior nodes that are not breakpoints.
    pub fn smooth_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.len() - 1).filter(|&i| !self.is_breakpoint(i))
    }

    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| self.manifold.distance(&w[0], &w[1]))
            .sum()
    }

    /// `sum d^2(p_i, p_{i+1}) / (2 dt_i)`.
    pub fn energy(&self) -> f64 {
        self.points
            .windows(2)
            .zip(self.times.windows(2))
            .map(|(p, t)| self.manifold.distance(&p[0], &p[1]).powi(2) / (2.0 * (t[1] - t[0])))
            .sum()
    }

    /// Checks the admissibility invariants against `set`: nodes in `S`, consecutive nodes
    /// joined by a logarithm, no repeated nodes.
    pub fn check_admissible(&self, set: &ProxSet) -> Result<()> {
        for (i, p) in self.points.iter().enumerate() {
            if set.classify(p)? == Region::Exterior {
                return Err(Error::InfeasibleNode {
                    index: i,
                    psi: set.psi_at(p)?,
                });
            }
        }
        for (i, w) in self.points.windows(2).enumerate() {
            if self.manifold.distance(&w[0], &w[1]) == 0.0 {
                return Err(Error::InvalidCurve(format!("zero velocity between nodes {i} and {}", i + 1)));
            }
            self.manifold.log(&w[0], &w[1])?;
        }
        Ok(())
    }

    fn chart(&self, i: usize) -> &[f64] {
        &self.points[i].coords
    }

    /// Velocity and second derivative in the chart at an interior node by nonuniform
    /// central differences.
    fn central_derivatives(&self, i: usize) -> (Coords, Coords) {
        let (h1, h2) = (self.times[i] - self.times[i - 1], self.times[i + 1] - self.times[i]);
        let (a, b, c) = (self.chart(i - 1), self.chart(i), self.chart(i + 1));
        let vel = (0..a.len())
            .map(|k| (-h2 / (h1 * (h1 + h2))) * a[k] + ((h2 - h1) / (h1 * h2)) * b[k] + (h1 / (h2 * (h1 + h2))) * c[k])
            .collect();
        let acc = (0..a.len())
            .map(|k| 2.0 * (a[k] / (h1 * (h1 + h2)) - b[k] / (h1 * h2) + c[k] / (h2 * (h1 + h2))))
            .collect();
        (vel, acc)
    }

    /// One-sided velocity at node `i` from the nodes on one side (`forward` uses
    /// `i, i+1, i+2`), second order when three nodes are available.
    pub(crate) fn one_sided_velocity(&self, i: usize, forward: bool, stop: usize) -> TangentVector {
        let n = self.manifold.dim();
        let comps: Coords = if forward {
            let h1 = self.times[i + 1] - self.times[i];
            if i + 2 <= stop {
                let h2 = self.times[i + 2] - self.times[i + 1];
                let (x0, x1, x2) = (self.chart(i), self.chart(i + 1), self.chart(i + 2));
                (0..n)
                    .map(|k| {
                        -x0[k] * (2.0 * h1 + h2) / (h1 * (h1 + h2)) + x1[k] * (h1 + h2) / (h1 * h2)
                            - x2[k] * h1 / (h2 * (h1 + h2))
                    })
                    .collect()
            } else {
                (0..n).map(|k| (self.chart(i + 1)[k] - self.chart(i)[k]) / h1).collect()
            }
        } else {
            let h2 = self.times[i] - self.times[i - 1];
            if i >= stop + 2 {
                let h1 = self.times[i - 1] - self.times[i - 2];
                let (x0, x1, x2) = (self.chart(i - 2), self.chart(i - 1), self.chart(i));
                (0..n)
                    .map(|k| {
                        x0[k] * h2 / (h1 * (h1 + h2)) - x1[k] * (h1 + h2) / (h1 * h2)
                            + x2[k] * (h1 + 2.0 * h2) / (h2 * (h1 + h2))
                    })
                    .collect()
            } else {
                (0..n).map(|k| (self.chart(i)[k] - self.chart(i - 1)[k]) / h2).collect()
            }
        };
        TangentVector {
            base: self.points[i].clone(),
            comps,
        }
    }

    /// Covariant acceleration `gamma'' + Gamma(gamma', gamma')` at an interior,
    /// non-breakpoint node.
    pub fn covariant_accel(&self, i: usize) -> Result<TangentVector> {
        if i == 0 || i + 1 >= self.len() || self.is_breakpoint(i) {
            return Err(Error::InvalidNode(i));
        }
        let (vel, acc) = self.central_derivatives(i);
        let gamma = self.manifold.christoffel(&self.points[i])?;
        let corr = gamma.contract(&vel, &vel);
        Ok(TangentVector {
            base: self.points[i].clone(),
            comps: acc.iter().zip(&corr).map(|(a, c)| a + c).collect(),
        })
    }

    /// Same time grid with times replaced by cumulative arc length from `times[0]`.
    pub fn arc_length_reparametrized(&self) -> Result<Self> {
        let mut times = Vec::with_capacity(self.len());
        let mut s = self.times[0];
        times.push(s);
        for w in self.points.windows(2) {
            let d = self.manifold.distance(&w[0], &w[1]);
            if d == 0.0 {
                return Err(Error::InvalidCurve("repeated node".into()));
            }
            s += d;
            times.push(s);
        }
        Self::new(self.manifold, times, self.points.clone(), self.breakpoints.clone())
    }

    /// `|gamma'(a+) - gamma'(a-)|` at each declared breakpoint.
    pub fn velocity_jumps(&self) -> Vec<(usize, f64)> {
        let bounds = self.segment_bounds();
        self.breakpoints
            .iter()
            .map(|&b| {
                let k = bounds.iter().position(|&x| x == b).expect("breakpoint is a bound");
                let minus = self.one_sided_velocity(b, false, bounds[k - 1]);
                let plus = self.one_sided_velocity(b, true, bounds[k + 1]);
                let jump = plus.sub(&minus).map(|d| self.manifold.norm(&d)).unwrap_or(f64::NAN);
                (b, jump)
            })
            .collect()
    }

    /// `[0, breakpoints.., N-1]`.
    pub(crate) fn segment_bounds(&self) -> Vec<usize> {
        let mut b = vec![0];
        b.extend(&self.breakpoints);
        b.push(self.len() - 1);
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    /// Nodes with `|psi| <= contact_tol (1 + |grad psi|)` are treated as boundary contacts.
    pub contact_tol: f64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self { contact_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// `None` at endpoints and breakpoints.
    pub per_node: Vec<Option<f64>>,
    pub max: f64,
    /// Mean `|A_i|` over the evaluated nodes, the scale of `tol_stat`.
    pub mean_accel: f64,
}

/// `|A_i - P_N(A_i)|` with `N` the proximal normal cone at each smooth interior node.
pub fn necessary_condition_residual(curve: &DiscreteCurve, set: &ProxSet, opts: &ResidualOptions) -> Result<Residual> {
    let m = &curve.manifold;
    let mut per_node = vec![None; curve.len()];
    let (mut max, mut sum, mut count) = (0.0f64, 0.0, 0usize);
    for i in curve.smooth_nodes() {
        let p = &curve.points[i];
        let a = curve.covariant_accel(i)?;
        let psi = set.psi_at(p)?;
        let grad = m.norm(&set.gradient(p)?);
        let contact = psi.abs() <= opts.contact_tol * (1.0 + grad);
        let r = if contact {
            let g = set.gradient(p)?;
            let cone = match set.solidity {
                Solidity::Solid => ConeSpec::ray(*m, &g)?,
                Solidity::Thin => ConeSpec::line(*m, &g)?,
            };
            cone.distance_to(&a)?
        } else if set.classify(p)? == Region::Interior {
            m.norm(&a)
        } else {
            return Err(Error::ExteriorPoint { psi });
        };
        per_node[i] = Some(r);
        max = max.max(r);
        sum += m.norm(&a);
        count += 1;
    }
    Ok(Residual {
        per_node,
        max,
        mean_accel: if count > 0 { sum / count as f64 } else { 0.0 },
    })
}
