use anyhow::Result;
use proxreg::projection::{ProjectOptions, Projector};

use super::{Ctx, Output};
use crate::config::parse_point;
use crate::report::ExperimentReport;

pub fn run(ctx: &Ctx, point: &str, grid: Option<f64>, m_start: Option<usize>) -> Result<Output> {
    let (name, set) = ctx.require_set()?;
    let m = set.manifold();
    let z = m.point(&parse_point(point)?)?;
    let defaults = ProjectOptions::default();
    let opts = ProjectOptions {
        grid,
        m_start: m_start.unwrap_or(defaults.m_start),
        ..defaults
    };
    let r = Projector::project(&set, &z, &opts)?;

    let mut report = ExperimentReport::new("project", ctx.seed);
    report
        .input("set", &name)
        .input("manifold", m.name())
        .input("point", point)
        .input("m_start", opts.m_start);
    if let Some(h) = grid {
        report.input("grid", h);
    }
    let names = m.coord_names();
    let cols: Vec<&str> = names.iter().map(String::as_str).collect();
    report.table("point", &cols, vec![r.point.to_vec()]);
    report.table(
        "minimizers",
        &cols,
        r.minimizers().iter().map(|p| p.to_vec()).collect(),
    );
    report.table(
        "summary",
        &["dist", "unique", "minimizers", "iterations"],
        vec![vec![
            r.dist,
            if r.is_unique() { 1.0 } else { 0.0 },
            r.minimizers().len() as f64,
            r.iterations as f64,
        ]],
    );
    let tol = 1e-9 * (1.0 + r.dist);
    report.tolerance("dist_consistency", tol);
    report.near("dist_is_distance_to_point", m.distance(&z, &r.point), r.dist, tol);
    let inside = r.minimizers().iter().all(|p| Projector::contains(&set, p));
    report.near("minimizers_in_set", if inside { 1.0 } else { 0.0 }, 1.0, 0.0);
    Ok(report.into())
}
