use std::f64::consts::PI;

use anyhow::Result;
use proxreg::curves::{
    hyperbolic_line, minimize_curve, necessary_condition_residual, sphere_alpha_curve, sphere_boundary_curve,
    DiscreteCurve, ResidualOptions, SolverParams, SolverReport,
};
use proxreg::projection::{project, ProjectOptions};
use proxreg::proxset::{estimate_reach, ProxSet, ReachOptions, SetSpec};
use proxreg::{Manifold, Point};

use super::{Ctx, Output};
use crate::report::ExperimentReport;
use crate::svg::{plot, Series};

pub const THETA0: f64 = 2.0 * PI / 3.0;

fn builtin(name: &str) -> Result<ProxSet> {
    Ok(SetSpec::builtin(name)?.as_prox()?.clone())
}

fn bump(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.0
    } else {
        (PI * i as f64 / (n - 1) as f64).sin()
    }
}

/// Pushes every interior node of `curve` by `-depth * bump` along coordinate `k`.
pub fn perturbed(curve: &DiscreteCurve, k: usize, depth: f64) -> Result<DiscreteCurve> {
    let n = curve.len();
    let points = curve
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut c = p.to_vec();
            c[k] -= depth * bump(i, n);
            curve.manifold.point(&c)
        })
        .collect::<proxreg::Result<Vec<_>>>()?;
    Ok(DiscreteCurve::new(curve.manifold, curve.times.clone(), points, curve.breakpoints.clone())?)
}

pub(crate) fn solver_section(report: &mut ExperimentReport, prefix: &str, sr: &SolverReport) {
    let rows = (0..sr.length_trace.len())
        .map(|i| vec![i as f64, sr.length_trace[i], sr.energy_trace[i], sr.residual_trace[i]])
        .collect();
    report.table(&format!("{prefix}_trace"), &["iteration", "length", "energy", "residual"], rows);
    let worst_increase = sr
        .length_trace
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    report.tolerance(&format!("{prefix}_monotone"), 1e-10);
    report.at_most(&format!("{prefix}_length_increase"), worst_increase, 1e-10);
    report.tolerance(&format!("{prefix}_tol_stat"), sr.tol_stat);
    report.at_most(&format!("{prefix}_residual"), sr.final_residual, sr.tol_stat);
}

pub(crate) fn trace_plot(title: &str, sr: &SolverReport) -> String {
    plot(&[
        (&format!("{title}: length"), vec![Series::new("length", &sr.length_trace)], false),
        (&format!("{title}: max residual"), vec![Series::new("residual", &sr.residual_trace)], true),
    ])
}

fn accel_rows(curve: &DiscreteCurve, set: &ProxSet) -> Result<(Vec<Vec<f64>>, f64)> {
    let r = necessary_condition_residual(curve, set, &ResidualOptions::default())?;
    let mut rows = vec![];
    for i in curve.smooth_nodes() {
        let a = curve.covariant_accel(i)?;
        rows.push(vec![curve.times[i], a.comps[0], a.comps[1], r.per_node[i].unwrap_or(f64::NAN)]);
    }
    Ok((rows, r.max))
}

pub fn sphere(ctx: &Ctx) -> Result<Output> {
    let n = ctx.n_or(200);
    let set = builtin("sphere-cap")?;
    let mut report = ExperimentReport::new("reproduce-sphere", ctx.seed);
    report.input("theta0", THETA0).input("nodes", n).input("set", "sphere-cap");

    let gamma = sphere_boundary_curve(THETA0, n)?;
    let alpha = sphere_alpha_curve(THETA0, n)?;
    let (lg, la) = (gamma.length(), alpha.length());
    report.table(
        "lengths",
        &["gamma", "alpha", "pi_sin_theta0", "two_theta0"],
        vec![vec![lg, la, PI * THETA0.sin(), 2.0 * THETA0]],
    );
    report.tolerance("length", 1e-3);
    report.near("length_gamma", lg, PI * THETA0.sin(), 1e-3);
    report.near("length_alpha", la, 2.0 * THETA0, 1e-3);
    report.at_least("pi_minus_length_gamma", PI - lg, 0.0);
    report.at_least("length_alpha_minus_pi", la - PI, 0.0);
    report.at_least("length_alpha_minus_gamma", la - lg, 1.4);

    let lambda = -THETA0.cos() / THETA0.sin();
    let (rows, res_gamma) = accel_rows(&gamma, &set)?;
    let err = rows
        .iter()
        .map(|r| (r[1] - lambda).abs().max(r[2].abs()))
        .fold(0.0, f64::max);
    report.table("gamma_acceleration", &["t", "a_theta", "a_phi", "residual"], rows);
    report.tolerance("acceleration", 5e-3).tolerance("residual", 1e-4);
    report.at_least("lambda_positive", lambda, 0.0);
    report.at_most("gamma_acceleration_error", err, 5e-3);
    report.at_most("gamma_residual", res_gamma, 1e-4);

    let (rows, res_alpha) = accel_rows(&alpha, &set)?;
    report.table("alpha_acceleration", &["t", "a_theta", "a_phi", "residual"], rows);
    report.at_most("alpha_residual", res_alpha, 1e-4);
    report.table(
        "alpha_jumps",
        &["node", "jump"],
        alpha.velocity_jumps().into_iter().map(|(i, j)| vec![i as f64, j]).collect(),
    );

    let start = perturbed(&gamma, 0, 0.3)?;
    let (out, sr) = minimize_curve(&start, &set, &SolverParams::default())?;
    report.tolerance("solver_length", 1e-2);
    report.near("solver_length", out.length(), PI * THETA0.sin(), 1e-2);
    solver_section(&mut report, "solver", &sr);
    Ok(Output {
        report,
        plot: Some(trace_plot("sphere cap", &sr)),
    })
}

pub fn hyperbolic(ctx: &Ctx) -> Result<Output> {
    let n = ctx.n_or(101);
    let set = builtin("hyperbolic-strip")?;
    let m = Manifold::Hyperbolic2;
    let mut report = ExperimentReport::new("reproduce-hyperbolic", ctx.seed);
    report.input("set", "hyperbolic-strip").input("nodes", n);

    let opts = ProjectOptions::default();
    let mut rows = vec![];
    report.tolerance("projection_point", 1e-6).tolerance("projection_dist", 1e-8);
    for (x, y) in [(0.3, 3.0), (0.3, 0.5), (-1.0, 1.5), (2.0, 2.5), (0.7, 0.2), (-0.4, 10.0)] {
        let z = m.point(&[x, y])?;
        let r = project(&set, &z, &opts)?;
        let c = y.clamp(1.0, 2.0);
        let want = (y / c).ln().abs();
        let tag = format!("({x}, {y})");
        report.near(&format!("projection_x {tag}"), r.point.coords[0], x, 1e-6);
        report.near(&format!("projection_y {tag}"), r.point.coords[1], c, 1e-6);
        report.near(&format!("projection_dist {tag}"), r.dist, want, 1e-8);
        rows.push(vec![x, y, r.point.coords[0], r.point.coords[1], r.dist, x, c, want]);
    }
    report.table(
        "projections",
        &["x", "y", "px", "py", "dist", "expected_px", "expected_py", "expected_dist"],
        rows,
    );

    let line = hyperbolic_line(-0.5, 0.5, n)?;
    let (rows, res) = accel_rows(&line, &set)?;
    let err = rows
        .iter()
        .map(|r| r[1].abs().max((r[2] - 2.0).abs()))
        .fold(0.0, f64::max);
    report.table("acceleration", &["t", "a_x", "a_y", "residual"], rows);
    report.tolerance("acceleration", 5e-3).tolerance("residual", 1e-4);
    report.at_most("acceleration_error", err, 5e-3);
    report.at_most("residual", res, 1e-4);

    let start = perturbed(&line, 1, 0.5)?;
    let (out, sr) = minimize_curve(&start, &set, &SolverParams::default())?;
    solver_section(&mut report, "solver", &sr);
    let mut worst = 0.0f64;
    for i in out.smooth_nodes() {
        let p = &out.points[i];
        if set.classify(p)? == proxreg::proxset::Region::Boundary {
            let a = out.covariant_accel(i)?;
            worst = worst.max(a.comps[0].abs() / a.comps[1].max(f64::MIN_POSITIVE));
        }
    }
    report.tolerance("contact_direction", 1e-3);
    report.at_most("contact_acceleration_tilt", worst, 1e-3);
    Ok(Output {
        report,
        plot: Some(trace_plot("hyperbolic strip", &sr)),
    })
}

pub fn comb(ctx: &Ctx) -> Result<Output> {
    let mut report = ExperimentReport::new("reproduce-comb", ctx.seed);
    let x = Point::new(&[0.0, 0.5]);
    let opts = ReachOptions::new(0.25, ctx.n_or(250));
    report
        .input("point", "0,0.5")
        .input("grid_radius", opts.grid_radius)
        .input("grid_n", opts.grid_n);
    report.tolerance("reach_vs_half_spacing", 2e-3);
    let mut rows = vec![];
    let mut last = f64::INFINITY;
    for n in [5usize, 10, 20, 50] {
        let comb = SetSpec::builtin(&format!("comb:N={n}"))?;
        let r = estimate_reach(&comb, &x, &opts)?;
        let half = 0.5 / n as f64;
        report.near(&format!("reach N={n}"), r.reach, half, 2e-3);
        if last.is_finite() {
            report.at_least(&format!("reach decreases at N={n}"), last - r.reach, f64::MIN_POSITIVE);
        }
        last = r.reach;
        rows.push(vec![n as f64, r.reach, half, r.projections as f64]);
    }
    report.table("reach", &["N", "reach", "half_spacing", "projections"], rows);
    Ok(report.into())
}
