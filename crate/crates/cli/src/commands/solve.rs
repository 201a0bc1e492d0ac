use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use proxreg::curves::{minimize_curve, necessary_condition_residual, ResidualOptions, SolverParams};

use super::reproduce::{solver_section, trace_plot};
use super::{Ctx, Output};
use crate::config::{load_curve, load_params};
use crate::report::ExperimentReport;

pub fn run(ctx: &Ctx, params: Option<&Path>, curve_out: Option<&Path>) -> Result<Output> {
    let (name, set) = ctx.require_set()?;
    let set = set.as_prox()?.clone();
    let Some(curve_path) = ctx.curve.as_deref() else {
        bail!("--curve is required");
    };
    let curve = load_curve(curve_path, set.manifold)?;
    let mut p = match params {
        Some(path) => load_params(path)?,
        None => SolverParams::default(),
    };
    if let Some(t) = ctx.tol {
        p.tol_stat = Some(t);
    }
    let (out, sr) = minimize_curve(&curve, &set, &p)?;

    let mut report = ExperimentReport::new("solve", ctx.seed);
    report
        .input("set", &name)
        .input("curve", curve_path.display())
        .input("nodes", curve.len())
        .input("max_iter", p.max_iter)
        .input("step0", p.step0)
        .input("stop", format!("{:?}", sr.stop));
    let residual = necessary_condition_residual(&out, &set, &ResidualOptions::default())?;
    let mut cols = vec!["t".to_string()];
    cols.extend(set.manifold.coord_names());
    cols.push("residual".into());
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let rows = (0..out.len())
        .map(|i| {
            let mut row = vec![out.times[i]];
            row.extend(out.points[i].coords.iter());
            row.push(residual.per_node[i].unwrap_or(f64::NAN));
            row
        })
        .collect();
    report.table("curve", &cols, rows);
    report.table(
        "summary",
        &["iterations", "initial_length", "final_length", "final_residual", "tol_stat", "max_jump"],
        vec![vec![
            sr.iterations as f64,
            curve.length(),
            out.length(),
            sr.final_residual,
            sr.tol_stat,
            sr.max_jump,
        ]],
    );
    solver_section(&mut report, "solver", &sr);
    if let Some(path) = curve_out {
        let json = serde_json::to_string_pretty(&out.to_file())?;
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Output {
        report,
        plot: Some(trace_plot("solve", &sr)),
    })
}
