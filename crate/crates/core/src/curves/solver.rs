use serde::{Deserialize, Serialize};

use super::{necessary_condition_residual, DiscreteCurve, Residual, ResidualOptions};
use crate::manifold::{solve_dense, Point};
use crate::projection::{project, ProjectOptions};
use crate::proxset::{ProxSet, Region};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub max_iter: usize,
    /// Defaults to `1e-5 (1 + mean |A_i|)`, recomputed each iteration.
    pub tol_stat: Option<f64>,
    pub step0: f64,
    #[serde(skip, default = "ProjectOptions::fast")]
    pub project: ProjectOptions,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol_stat: None,
            step0: 1.0,
            project: ProjectOptions::fast(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIter,
    /// The line search could not decrease the energy any further.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub stop: StopReason,
    pub length_trace: Vec<f64>,
    pub energy_trace: Vec<f64>,
    pub residual_trace: Vec<f64>,
    pub final_residual: f64,
    pub tol_stat: f64,
    /// Velocity jumps at the breakpoints declared on the input curve.
    pub jumps: Vec<(usize, f64)>,
    pub max_jump: f64,
}

const ARMIJO_C: f64 = 1e-4;
const LENGTH_SLACK: f64 = 1e-10;
const ALPHA_MIN: f64 = 1e-12;

/// Projected, H1-preconditioned descent on the discrete energy with fixed endpoints.
/// Times are kept proportional to arc length over the input interval, so every
/// accepted energy decrease is also a length decrease.
pub fn minimize_curve(
    initial: &DiscreteCurve,
    set: &ProxSet,
    params: &SolverParams,
) -> Result<(DiscreteCurve, SolverReport)> {
    initial.check_admissible(set)?;
    let m = initial.manifold;
    let dim = m.dim();
    let n = initial.len();
    let mut curve = constant_speed(initial)?;
    let ropts = ResidualOptions::default();
    let tol_of = |r: &Residual| params.tol_stat.unwrap_or(1e-5 * (1.0 + r.mean_accel));

    let mut residual = necessary_condition_residual(&curve, set, &ropts)?;
    let mut length_trace = vec![curve.length()];
    let mut energy_trace = vec![curve.energy()];
    let mut residual_trace = vec![residual.max];
    let mut stop = StopReason::MaxIter;
    let mut iterations = 0;
    let mut alpha = params.step0;

    while iterations < params.max_iter {
        if residual.max <= tol_of(&residual) {
            stop = StopReason::Converged;
            break;
        }
        if n < 3 {
            stop = StopReason::Stalled;
            break;
        }
        let dts: Vec<f64> = curve.times.windows(2).map(|w| w[1] - w[0]).collect();

        // Covariant energy gradient at interior nodes, index i-1.
        let mut grad = Vec::with_capacity(n - 2);
        for i in 1..n - 1 {
            let p = &curve.points[i];
            let back = m.log(p, &curve.points[i - 1])?;
            let fwd = m.log(p, &curve.points[i + 1])?;
            let g = m.metric_diag(p);
            grad.push(
                (0..dim)
                    .map(|k| -g[k] * (back.comps[k] / dts[i - 1] + fwd.comps[k] / dts[i]))
                    .collect::<Vec<f64>>(),
            );
        }
        let (e0, l0) = (*energy_trace.last().unwrap(), *length_trace.last().unwrap());
        let search = |direction: &[Vec<f64>], mut alpha: f64| -> Result<Option<(DiscreteCurve, f64, f64, f64)>> {
            while alpha >= ALPHA_MIN {
                if let Some(trial) = trial_curve(&curve, set, direction, alpha, &params.project)? {
                    let predicted: f64 = (1..n - 1)
                        .map(|i| {
                            let (p, q) = (&curve.points[i].coords, &trial.points[i].coords);
                            (0..dim).map(|k| grad[i - 1][k] * (q[k] - p[k])).sum::<f64>()
                        })
                        .sum();
                    // With constant-speed times the energy is L^2 / 2T, so this also bounds the length.
                    let frozen = trial.energy();
                    let l1 = trial.length();
                    if predicted <= 0.0 && frozen <= e0 + ARMIJO_C * predicted && l1 <= l0 + LENGTH_SLACK {
                        if let Ok(retimed) = constant_speed(&trial) {
                            let e1 = retimed.energy();
                            return Ok(Some((retimed, e1, l1, alpha)));
                        }
                    }
                }
                alpha *= 0.5;
            }
            Ok(None)
        };
        // The smoothed direction can stop being a descent direction once boundary nodes
        // are projected; the node-wise scaled gradient cannot.
        let mut accepted = search(&precondition(&curve, set, &dts, &grad)?, alpha)?;
        if let Some(a) = &accepted {
            alpha = a.3;
        } else {
            accepted = search(&jacobi(&curve, &dts, &grad), params.step0)?;
        }
        let Some((trial, e1, l1, _)) = accepted else {
            stop = StopReason::Stalled;
            break;
        };
        let moved = trial
            .points
            .iter()
            .zip(&curve.points)
            .map(|(a, b)| a.chart_distance(b))
            .fold(0.0, f64::max);
        curve = trial;
        iterations += 1;
        residual = necessary_condition_residual(&curve, set, &ropts)?;
        length_trace.push(l1);
        energy_trace.push(e1);
        residual_trace.push(residual.max);
        alpha = (alpha * 2.0).min(params.step0);
        if moved == 0.0 {
            stop = if residual.max <= tol_of(&residual) {
                StopReason::Converged
            } else {
                StopReason::Stalled
            };
            break;
        }
    }
    if stop == StopReason::MaxIter && residual.max <= tol_of(&residual) {
        stop = StopReason::Converged;
    }

    let jumps = curve.velocity_jumps();
    let max_jump = jumps.iter().map(|j| j.1).fold(0.0, f64::max);
    let report = SolverReport {
        iterations,
        stop,
        length_trace,
        energy_trace,
        residual_trace,
        final_residual: residual.max,
        tol_stat: tol_of(&residual),
        jumps,
        max_jump,
    };
    Ok((curve, report))
}

/// Newton-like direction for the discrete energy: solves the metric-weighted Dirichlet
/// Laplacian `S K S` against the covariant gradient, with a stiff penalty on the normal
/// component at boundary nodes whose descent direction points out of `S`.
fn precondition(curve: &DiscreteCurve, set: &ProxSet, dts: &[f64], grad: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let m = &curve.manifold;
    let dim = m.dim();
    let k = grad.len();
    let roots: Vec<Vec<f64>> = (1..=k)
        .map(|i| m.metric_diag(&curve.points[i]).iter().map(|g| g.sqrt()).collect())
        .collect();
    let mut diag = Vec::with_capacity(k);
    for j in 0..k {
        let p = &curve.points[j + 1];
        let w = 1.0 / dts[j] + 1.0 / dts[j + 1];
        let mut a = vec![vec![0.0; dim]; dim];
        for c in 0..dim {
            a[c][c] = w * roots[j][c] * roots[j][c];
        }
        if set.classify(p)? == Region::Boundary {
            let normal = set.gradient(p)?;
            let g = m.metric_diag(p);
            let flat: Vec<f64> = (0..dim).map(|c| g[c] * normal.comps[c]).collect();
            let outward: f64 = (0..dim).map(|c| -grad[j][c] * normal.comps[c]).sum();
            let size: f64 = flat.iter().map(|x| x * x).sum();
            if outward > 0.0 && size > 0.0 {
                let scale = (0..dim).map(|c| a[c][c]).fold(0.0, f64::max);
                let lambda = PENALTY * scale / size;
                for r in 0..dim {
                    for c in 0..dim {
                        a[r][c] += lambda * flat[r] * flat[c];
                    }
                }
            }
        }
        diag.push(a);
    }
    let upper: Vec<Vec<f64>> = (0..k.saturating_sub(1))
        .map(|j| (0..dim).map(|c| -roots[j][c] * roots[j + 1][c] / dts[j + 1]).collect())
        .collect();
    let rhs: Vec<Vec<f64>> = grad.iter().map(|g| g.iter().map(|x| -x).collect()).collect();
    Ok(block_tridiagonal(diag, &upper, rhs).unwrap_or_else(|| jacobi(curve, dts, grad)))
}

const PENALTY: f64 = 1e8;

/// Symmetric block-tridiagonal solve with dense diagonal blocks and diagonal
/// off-diagonal blocks.
fn block_tridiagonal(mut diag: Vec<Vec<Vec<f64>>>, upper: &[Vec<f64>], mut rhs: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let k = diag.len();
    let dim = rhs.first()?.len();
    // elim[j] = diag'_j^{-1} U_j, stored column by column
    let mut elim: Vec<Vec<Vec<f64>>> = Vec::with_capacity(k);
    for j in 0..k {
        if j > 0 {
            let u = &upper[j - 1];
            let prev = &elim[j - 1];
            let prev_rhs = solve_dense(diag[j - 1].clone(), rhs[j - 1].clone())?;
            for r in 0..dim {
                for c in 0..dim {
                    diag[j][r][c] -= u[r] * prev[c][r];
                }
                rhs[j][r] -= u[r] * prev_rhs[r];
            }
        }
        if j + 1 < k {
            let cols = (0..dim)
                .map(|c| {
                    let mut e = vec![0.0; dim];
                    e[c] = upper[j][c];
                    solve_dense(diag[j].clone(), e)
                })
                .collect::<Option<Vec<_>>>()?;
            elim.push(cols);
        }
    }
    let mut out = vec![vec![0.0; dim]; k];
    for j in (0..k).rev() {
        let mut x = solve_dense(diag[j].clone(), rhs[j].clone())?;
        if j + 1 < k {
            for (c, col) in elim[j].iter().enumerate() {
                for r in 0..dim {
                    x[r] -= col[r] * out[j + 1][c];
                }
            }
        }
        out[j] = x;
    }
    Some(out)
}

/// Same nodes and interval with times proportional to cumulative arc length.
fn constant_speed(curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    let (a, b) = (curve.times[0], *curve.times.last().unwrap());
    let total = curve.length();
    let mut times = Vec::with_capacity(curve.len());
    let mut acc = 0.0;
    times.push(a);
    for w in curve.points.windows(2) {
        acc += curve.manifold.distance(&w[0], &w[1]);
        times.push(a + (b - a) * acc / total);
    }
    *times.last_mut().unwrap() = b;
    DiscreteCurve::new(curve.manifold, times, curve.points.clone(), curve.breakpoints.clone())
}

/// `-grad_i / (g_i (1/dt_{i-1} + 1/dt_i))` node by node.
fn jacobi(curve: &DiscreteCurve, dts: &[f64], grad: &[Vec<f64>]) -> Vec<Vec<f64>> {
    grad.iter()
        .enumerate()
        .map(|(j, g)| {
            let metric = curve.manifold.metric_diag(&curve.points[j + 1]);
            let w = 1.0 / dts[j] + 1.0 / dts[j + 1];
            g.iter().zip(metric).map(|(gk, mk)| -gk / (mk * w)).collect()
        })
        .collect()
}

/// Steps every interior node along its direction and projects it back onto `S`.
/// `None` when a step leaves the chart or a node cannot be projected.
fn trial_curve(
    curve: &DiscreteCurve,
    set: &ProxSet,
    direction: &[Vec<f64>],
    alpha: f64,
    opts: &ProjectOptions,
) -> Result<Option<DiscreteCurve>> {
    let m = &curve.manifold;
    let n = curve.len();
    let mut points: Vec<Point> = Vec::with_capacity(n);
    points.push(curve.points[0].clone());
    for i in 1..n - 1 {
        let p = &curve.points[i];
        let step = m.tangent(p, &direction[i - 1])?.scale(alpha);
        let Ok(q) = m.exp(p, &step) else {
            return Ok(None);
        };
        let q = if set.contains(&q) {
            q
        } else {
            match project(set, &q, opts) {
                Ok(r) if r.is_unique() => r.point,
                Ok(r) => {
                    return Err(Error::AmbiguousProjection {
                        coords: q.to_vec(),
                        count: r.minimizers().len(),
                    })
                }
                // a failed projection rejects the step; the line search shrinks it
                Err(_) => return Ok(None),
            }
        };
        points.push(q);
    }
    points.push(curve.points[n - 1].clone());
    for w in points.windows(2) {
        if m.log(&w[0], &w[1]).is_err() {
            return Ok(None);
        }
    }
    DiscreteCurve::new(*m, curve.times.clone(), points, curve.breakpoints.clone()).map(Some)
}
