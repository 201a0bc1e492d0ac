use std::f64::consts::PI;

use anyhow::{bail, Result};
use proxreg::curves::{
    finite_difference_length_derivative, first_variation, sphere_boundary_curve, VariationField,
};
use proxreg::projection::{
    cone_project, ddp_pair, directional_derivative, lip_recipe, lipschitz_estimate, one_dimensional_pair,
    shapiro_check, DirectionalOptions, ProjectOptions, ShapiroReport,
};
use proxreg::proxset::{ConeSpec, ProxSet, Region, SetSpec};
use proxreg::sampling::{rng, tangent_in_ball, tangent_of_norm};
use proxreg::{Manifold, Point};
use rand::Rng;

use super::{Ctx, Output};
use crate::config::parse_point;
use crate::report::ExperimentReport;

pub const SUITES: [&str; 6] = ["cones", "ddp", "hess", "lip", "shapiro", "variation"];

pub fn run(ctx: &Ctx, suite: &str, point: Option<&str>) -> Result<Output> {
    let report = match suite {
        "cones" => cones(ctx)?,
        "ddp" => ddp(ctx, point)?,
        "hess" => hess(ctx)?,
        "lip" => lip(ctx, point)?,
        "shapiro" => shapiro(ctx, point)?,
        "variation" => variation(ctx)?,
        other => bail!("unknown suite `{other}`; expected one of {}", SUITES.join(", ")),
    };
    Ok(report.into())
}

fn random_point<R: Rng>(rng: &mut R, m: &Manifold) -> Point {
    let c: Vec<f64> = match m {
        Manifold::Sphere2 => vec![rng.gen_range(0.3..PI - 0.3), rng.gen_range(-3.0..3.0)],
        Manifold::Hyperbolic2 => vec![rng.gen_range(-2.0..2.0), rng.gen_range(0.3..3.0)],
        Manifold::Euclidean { dim } => (0..*dim).map(|_| rng.gen_range(-2.0..2.0)).collect(),
    };
    Point::new(&c)
}

/// A boundary point of `set`: the foot point of `hint` when given, otherwise of the
/// first chart point in a fixed list whose foot point converges.
fn boundary_point(set: &ProxSet, hint: Option<&str>) -> Result<Point> {
    let m = set.manifold;
    let candidates: Vec<Vec<f64>> = match hint {
        Some(s) => vec![parse_point(s)?],
        None => match m {
            Manifold::Sphere2 => vec![vec![PI / 2.0, 0.0], vec![2.5, 0.0], vec![1.0, 0.0]],
            Manifold::Hyperbolic2 => vec![vec![0.0, 1.7], vec![0.0, 3.0], vec![0.0, 0.5]],
            Manifold::Euclidean { dim } => vec![vec![0.3; dim], vec![1.5; dim], vec![0.0; dim]],
        },
    };
    for c in candidates {
        let Ok(z) = m.point(&c) else { continue };
        if let Ok(p) = set.foot_point(&z) {
            if set.classify(&p)? == Region::Boundary {
                return Ok(p);
            }
        }
    }
    bail!("no boundary point found; pass --point near the boundary")
}

fn cones(ctx: &Ctx) -> Result<ExperimentReport> {
    let n = ctx.n_or(1000);
    let tol = ctx.tol_or(1e-12);
    let mut report = ExperimentReport::new("check-cones", ctx.seed);
    report.input("directions", n).tolerance("polar_inner_product", tol);
    let mut rng = rng(ctx.seed);
    let mut rows = vec![];
    let (mut involution_failures, mut worst) = (0usize, f64::NEG_INFINITY);
    for (mi, m) in [Manifold::euclidean(2), Manifold::Sphere2, Manifold::Hyperbolic2].iter().enumerate() {
        let x = random_point(&mut rng, m);
        let g = tangent_of_norm(&mut rng, m, &x, 1.0);
        let cones = [
            ConeSpec::zero(*m, &x),
            ConeSpec::full(*m, &x),
            ConeSpec::ray(*m, &g)?,
            ConeSpec::line(*m, &g)?,
            ConeSpec::half_space(*m, &g)?,
            ConeSpec::hyperplane(*m, &g)?,
        ];
        for (ci, c) in cones.iter().enumerate() {
            let polar = c.polar();
            if polar.polar() != *c {
                involution_failures += 1;
            }
            let mut cone_worst = f64::NEG_INFINITY;
            for _ in 0..n {
                let v = c.project(&tangent_of_norm(&mut rng, m, &x, 1.0))?;
                let w = polar.project(&tangent_of_norm(&mut rng, m, &x, 1.0))?;
                cone_worst = cone_worst.max(m.inner(&v, &w)?);
            }
            worst = worst.max(cone_worst);
            rows.push(vec![mi as f64, ci as f64, cone_worst]);
        }
    }
    report.table("polarity", &["manifold", "variant", "max_inner_product"], rows);
    report.at_most("involution_failures", involution_failures as f64, 0.0);
    report.at_most("max_polar_inner_product", worst, tol);

    let mut rows = vec![];
    for (k, name) in ["sphere-cap", "hyperbolic-strip", "euclidean-halfplane", "disk-complement"].iter().enumerate() {
        let set = SetSpec::builtin(name)?.as_prox()?.clone();
        let x = boundary_point(&set, None)?;
        let check = set.tangent_intersection_check(&x, n, ctx.seed)?;
        report.at_most(
            &format!("tangent_intersection_counterexamples {name}"),
            check.counterexamples.len() as f64,
            0.0,
        );
        report.at_most(&format!("normal_mismatch {name}"), check.normal_mismatch, 1e-10);
        rows.push(vec![k as f64, check.directions as f64, check.counterexamples.len() as f64, check.normal_mismatch]);
    }
    report.table("tangent_intersection", &["set", "directions", "counterexamples", "normal_mismatch"], rows);
    Ok(report)
}

fn ddp(ctx: &Ctx, point: Option<&str>) -> Result<ExperimentReport> {
    let (name, set) = ctx.prox_set_or("sphere-cap")?;
    let n = ctx.n_or(50);
    let tol = ctx.tol_or(1e-4);
    let mut report = ExperimentReport::new("check-ddp", ctx.seed);
    report.input("set", &name).input("samples", n).tolerance("ddp", tol);
    let m = set.manifold;
    let center = boundary_point(&set, point)?;
    let xs = set.sample_boundary(&center, 0.5, n, ctx.seed);
    let mut rng = rng(ctx.seed.wrapping_add(1));
    let opts = DirectionalOptions::default();
    let mut rows = vec![];
    let mut worst = 0.0f64;
    for x in &xs {
        let v = tangent_of_norm(&mut rng, &m, x, 1.0);
        let d = directional_derivative(&set, x, &v, &opts)?;
        let want = cone_project(&set.bouligand_tangent_cone(x)?, &v)?;
        let err = m.norm(&d.value.sub(&want)?);
        worst = worst.max(err);
        let mut row = x.to_vec();
        row.extend(v.comps.iter());
        row.push(err);
        rows.push(row);
    }
    let names = m.coord_names();
    let mut cols: Vec<String> = names.clone();
    cols.extend(names.iter().map(|c| format!("v_{c}")));
    cols.push("error".into());
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    report.table("samples", &cols, rows);
    report.at_least("samples_drawn", xs.len() as f64, n as f64);
    report.at_most("max_error", worst, tol);
    Ok(report)
}

fn hess(ctx: &Ctx) -> Result<ExperimentReport> {
    let m = ctx.manifold()?.unwrap_or(Manifold::Sphere2);
    let n = ctx.n_or(100);
    let tol = ctx.tol_or(1e-6);
    let mut report = ExperimentReport::new("check-hess", ctx.seed);
    report.input("manifold", m.name()).input("samples", n).tolerance("margin", tol);
    let mut rng = rng(ctx.seed);
    let mut rows = vec![];
    let mut worst = f64::INFINITY;
    let mut attempts = 0;
    while rows.len() < n && attempts < 100 * n {
        attempts += 1;
        let c = random_point(&mut rng, &m);
        let radius = m.hess_radius(&c, None).min(3.0);
        let Ok(z) = m.exp(&c, &tangent_in_ball(&mut rng, &m, &c, 0.98 * radius)) else {
            continue;
        };
        let w = tangent_of_norm(&mut rng, &m, &z, 1.0);
        let Ok(h) = m.hessian_dist_sq(&c, &z, &w) else { continue };
        let bound = m.hess_lower_bound(&c, &z);
        worst = worst.min(h - bound);
        rows.push(vec![m.distance(&c, &z), h, bound, h - bound]);
    }
    report.table("samples", &["distance", "hessian", "bound", "margin"], rows.clone());
    report.at_least("samples_drawn", rows.len() as f64, n as f64);
    report.assert("min_margin", crate::report::Check::AtLeast, worst, 0.0, tol);
    Ok(report)
}

fn lip(ctx: &Ctx, point: Option<&str>) -> Result<ExperimentReport> {
    let (name, set) = ctx.prox_set_or("sphere-cap")?;
    let n = ctx.n_or(200);
    let radius = 0.1;
    let mut report = ExperimentReport::new("check-lip", ctx.seed);
    report.input("set", &name).input("pairs", n).input("radius", radius);
    let x = boundary_point(&set, point)?;
    let est = lipschitz_estimate(&set, &x, radius, n, ctx.seed, &ProjectOptions::default())?;
    let recipe = lip_recipe(&set, &x, 1.0, Some(radius), 2 * n, ctx.seed)?;
    report.table(
        "recipe",
        &["big_r", "r_bar", "rho", "a", "r_max", "r", "sigma", "c1", "c2", "kappa", "bound"],
        vec![vec![
            recipe.big_r,
            recipe.r_bar,
            recipe.rho,
            recipe.a,
            recipe.r_max,
            recipe.r,
            recipe.sigma,
            recipe.c1,
            recipe.c2,
            recipe.kappa,
            recipe.bound,
        ]],
    );
    report.table("estimate", &["estimate", "pairs"], vec![vec![est.estimate, est.pairs as f64]]);
    report.at_least("sigma_positive", recipe.sigma, f64::MIN_POSITIVE);
    report.at_most("estimate_within_recipe_bound", est.estimate, recipe.bound);
    Ok(report)
}

fn shapiro_row(r: &ShapiroReport) -> Vec<f64> {
    vec![r.alpha, r.kappa, r.delta1, r.delta2, r.k1, r.k2, r.bound, r.actual]
}

fn shapiro(ctx: &Ctx, point: Option<&str>) -> Result<ExperimentReport> {
    let (name, set) = ctx.prox_set_or("sphere-cap")?;
    let mut report = ExperimentReport::new("check-shapiro", ctx.seed);
    report.input("set", &name);
    let mut rows = vec![];
    let one = shapiro_check(&one_dimensional_pair(0.1, 400))?;
    report.at_most("one_dimensional actual_le_bound", one.actual, one.bound);
    rows.push(shapiro_row(&one));
    let x = boundary_point(&set, point)?;
    let m = set.manifold;
    let mut rng = rng(ctx.seed);
    for k in 0..ctx.n_or(3) {
        let v = tangent_of_norm(&mut rng, &m, &x, 1.0);
        let pair = ddp_pair(&set, &x, &v, 0.01, 40, &ProjectOptions::fast())?;
        let r = shapiro_check(&pair)?;
        report.at_most(&format!("ddp_pair {k} actual_le_bound"), r.actual, r.bound);
        rows.push(shapiro_row(&r));
    }
    report.table(
        "reports",
        &["alpha", "kappa", "delta1", "delta2", "k1", "k2", "bound", "actual"],
        rows,
    );
    Ok(report)
}

fn variation(ctx: &Ctx) -> Result<ExperimentReport> {
    let count = ctx.n_or(20);
    let tol = ctx.tol_or(1e-3);
    let nodes = 201;
    let theta0 = 2.0 * PI / 3.0;
    let set = SetSpec::builtin("sphere-cap")?.as_prox()?.clone();
    let curve = sphere_boundary_curve(theta0, nodes)?;
    let mut report = ExperimentReport::new("check-variation", ctx.seed);
    report
        .input("set", "sphere-cap")
        .input("nodes", nodes)
        .input("variations", count)
        .tolerance("first_variation", tol);
    let mut rng = rng(ctx.seed);
    let mut rows = vec![];
    let mut worst = 0.0f64;
    for _ in 0..count {
        let a: f64 = rng.gen_range(0.2..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        let k: usize = rng.gen_range(1..4);
        let field = VariationField::from_fn(&curve, |i, _| {
            let s = i as f64 / (nodes - 1) as f64;
            let w = if i == 0 || i + 1 == nodes { 0.0 } else { (PI * s).sin() };
            vec![-a * w, b * w * (k as f64 * PI * s).cos()]
        })?;
        let dl = first_variation(&curve, &field)?;
        let fd = finite_difference_length_derivative(&curve, &field, 1e-4, Some(&set))?;
        worst = worst.max((dl - fd).abs());
        rows.push(vec![a, b, k as f64, dl, fd]);
    }
    report.table("variations", &["a", "b", "k", "first_variation", "finite_difference"], rows);
    report.at_most("max_disagreement", worst, tol);
    Ok(report)
}
