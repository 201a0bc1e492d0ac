//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proxreg::curves::{
    finite_difference_length_derivative, first_variation, hyperbolic_line, minimize_curve,
    necessary_condition_residual, sphere_alpha_curve, sphere_boundary_curve, DiscreteCurve, ResidualOptions,
    SolverParams, VariationField,
};
use proxreg::projection::{cone_project, directional_derivative, project, DirectionalOptions, ProjectOptions, Projector};
use proxreg::proxset::{estimate_reach, ConeSpec, ProxSet, ReachOptions, Region, SetSpec};
use proxreg::sampling::{rng, tangent_in_ball, tangent_of_norm};
use proxreg::{Manifold, Point};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<f64>);

const THETA0: f64 = 2.0 * PI / 3.0;

fn builtin(name: &str) -> ProxSet {
    SetSpec::builtin(name).unwrap().as_prox().unwrap().clone()
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fail<E: std::fmt::Debug>(e: E) -> String {
    format!("error: {e:?}")
}

fn random_point<R: Rng>(rng: &mut R, m: &Manifold) -> Point {
    let c: Vec<f64> = match m {
        Manifold::Sphere2 => vec![rng.gen_range(0.3..PI - 0.3), rng.gen_range(-3.0..3.0)],
        Manifold::Hyperbolic2 => vec![rng.gen_range(-2.0..2.0), rng.gen_range(0.3..3.0)],
        Manifold::Euclidean { dim } => (0..*dim).map(|_| rng.gen_range(-2.0..2.0)).collect(),
    };
    Point::new(&c)
}

fn sphere_lengths() -> Outcome {
    let gamma = sphere_boundary_curve(THETA0, 200).map_err(fail)?;
    let alpha = sphere_alpha_curve(THETA0, 200).map_err(fail)?;
    let (lg, la) = (gamma.length(), alpha.length());
    check(
        (lg - 2.72070).abs() <= 1e-3 && (la - 4.18879).abs() <= 1e-3 && lg < PI && PI < la,
        format!("L(gamma) = {lg:.6}, L(alpha) = {la:.6}"),
    )
}

fn sphere_acceleration() -> Outcome {
    let set = builtin("sphere-cap");
    let gamma = sphere_boundary_curve(THETA0, 200).map_err(fail)?;
    let lambda = (PI - THETA0).tan().recip();
    let mut err = 0.0f64;
    for i in gamma.smooth_nodes() {
        let a = gamma.covariant_accel(i).map_err(fail)?;
        err = err.max((a.comps[0] - lambda).abs()).max(a.comps[1].abs());
    }
    let r = necessary_condition_residual(&gamma, &set, &ResidualOptions::default()).map_err(fail)?;
    check(
        err <= 5e-3 && r.max <= 1e-4 && lambda > 0.0,
        format!("max |A - ({lambda:.5}, 0)| = {err:.2e}, residual = {:.2e}", r.max),
    )
}

fn hyperbolic() -> Outcome {
    let set = builtin("hyperbolic-strip");
    let m = Manifold::Hyperbolic2;
    let opts = ProjectOptions::default();
    let a = project(&set, &m.point(&[0.3, 3.0]).map_err(fail)?, &opts).map_err(fail)?;
    let b = project(&set, &m.point(&[0.3, 0.5]).map_err(fail)?, &opts).map_err(fail)?;
    let pa = a.point.chart_distance(&Point::new(&[0.3, 2.0]));
    let pb = b.point.chart_distance(&Point::new(&[0.3, 1.0]));
    let da = (a.dist - 1.5f64.ln()).abs();
    let line = hyperbolic_line(-0.5, 0.5, 101).map_err(fail)?;
    let mut err = 0.0f64;
    for i in line.smooth_nodes() {
        let acc = line.covariant_accel(i).map_err(fail)?;
        err = err.max(acc.comps[0].abs()).max((acc.comps[1] - 2.0).abs());
    }
    let r = necessary_condition_residual(&line, &set, &ResidualOptions::default()).map_err(fail)?;
    check(
        pa <= 1e-6 && pb <= 1e-6 && da <= 1e-8 && err <= 5e-3 && r.max <= 1e-4,
        format!(
            "projection errors {pa:.1e}, {pb:.1e}, dist error {da:.1e}, accel error {err:.1e}, residual {:.1e}",
            r.max
        ),
    )
}

fn ddp() -> Outcome {
    let opts = DirectionalOptions::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    let cases: [(&str, &[[f64; 2]]); 2] = [
        ("sphere-cap", &[[THETA0, 0.0]]),
        ("hyperbolic-strip", &[[0.0, 1.0], [0.0, 2.0]]),
    ];
    for (seed, (name, centers)) in cases.iter().enumerate() {
        let set = builtin(name);
        let m = set.manifold;
        let mut rng = rng(100 + seed as u64);
        let per = 50 / centers.len();
        let mut xs = vec![];
        for (k, c) in centers.iter().enumerate() {
            xs.extend(set.sample_boundary(&Point::new(c), 0.5, per, 7 + k as u64));
        }
        if xs.len() < 50 {
            return Err(format!("{name}: only {} boundary samples", xs.len()));
        }
        for x in &xs {
            let v = tangent_of_norm(&mut rng, &m, x, 1.0);
            let d = directional_derivative(&set, x, &v, &opts).map_err(fail)?;
            let want = cone_project(&set.bouligand_tangent_cone(x).map_err(fail)?, &v).map_err(fail)?;
            worst = worst.max(m.norm(&d.value.sub(&want).map_err(fail)?));
            count += 1;
        }
    }
    check(worst <= 1e-4, format!("{count} samples, max error {worst:.2e}"))
}

fn hessian() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut msgs = vec![];
    for (seed, m) in [Manifold::Sphere2, Manifold::Hyperbolic2].iter().enumerate() {
        let mut rng = rng(seed as u64);
        let mut n = 0;
        let mut attempts = 0;
        while n < 100 && attempts < 10_000 {
            attempts += 1;
            let c = random_point(&mut rng, m);
            let radius = m.hess_radius(&c, None).min(3.0);
            let Ok(z) = m.exp(&c, &tangent_in_ball(&mut rng, m, &c, 0.98 * radius)) else { continue };
            let w = tangent_of_norm(&mut rng, m, &z, 1.0);
            let Ok(h) = m.hessian_dist_sq(&c, &z, &w) else { continue };
            worst = worst.min(h - m.hess_lower_bound(&c, &z));
            n += 1;
        }
        if n < 100 {
            return Err(format!("{}: only {n} samples", m.name()));
        }
        msgs.push(format!("{} x{n}", m.name()));
    }
    check(worst >= -1e-6, format!("{}, min margin {worst:.2e}", msgs.join(", ")))
}

fn polarity() -> Outcome {
    let mut rng = rng(3);
    let (mut involution, mut worst) = (0, f64::NEG_INFINITY);
    for m in [Manifold::euclidean(2), Manifold::euclidean(3), Manifold::Sphere2, Manifold::Hyperbolic2] {
        let x = random_point(&mut rng, &m);
        let g = tangent_of_norm(&mut rng, &m, &x, 1.0);
        let cones = [
            ConeSpec::zero(m, &x),
            ConeSpec::full(m, &x),
            ConeSpec::ray(m, &g).map_err(fail)?,
            ConeSpec::line(m, &g).map_err(fail)?,
            ConeSpec::half_space(m, &g).map_err(fail)?,
            ConeSpec::hyperplane(m, &g).map_err(fail)?,
        ];
        for c in &cones {
            let polar = c.polar();
            if polar.polar() != *c {
                involution += 1;
            }
            for _ in 0..1000 {
                let v = c.project(&tangent_of_norm(&mut rng, &m, &x, 1.0)).map_err(fail)?;
                let w = polar.project(&tangent_of_norm(&mut rng, &m, &x, 1.0)).map_err(fail)?;
                worst = worst.max(m.inner(&v, &w).map_err(fail)?);
            }
        }
    }
    check(
        involution == 0 && worst <= 1e-12,
        format!("involution failures {involution}, max <v, w> = {worst:.1e}"),
    )
}

fn tangent_intersection() -> Outcome {
    let cases: [(&str, &[[f64; 2]]); 4] = [
        ("sphere-cap", &[[THETA0, 0.0], [THETA0, 1.3], [THETA0, -2.5]]),
        ("hyperbolic-strip", &[[0.0, 1.0], [0.4, 2.0], [-3.0, 1.0]]),
        ("euclidean-halfplane", &[[0.0, 0.0], [2.5, 0.0]]),
        ("disk-complement", &[[1.0, 0.0], [0.6, 0.8], [-0.8, -0.6]]),
    ];
    let (mut bad, mut mismatch, mut points) = (0, 0.0f64, 0);
    for (name, xs) in cases {
        let set = builtin(name);
        for (k, c) in xs.iter().enumerate() {
            let x = Point::new(c);
            if set.classify(&x).map_err(fail)? != Region::Boundary {
                return Err(format!("{name}: {c:?} is not a boundary point"));
            }
            let r = set.tangent_intersection_check(&x, 1000, k as u64).map_err(fail)?;
            bad += r.counterexamples.len();
            mismatch = mismatch.max(r.normal_mismatch);
            points += 1;
        }
    }
    check(
        bad == 0 && mismatch <= 1e-10,
        format!("{points} boundary points x 1000 directions, {bad} violations, normal mismatch {mismatch:.1e}"),
    )
}

fn degeneracy() -> Outcome {
    let disk = builtin("disk-complement");
    let r = project(&disk, &Point::new(&[0.0, 0.0]), &ProjectOptions::default()).map_err(fail)?;
    let mins = r.minimizers();
    let mut sep = f64::INFINITY;
    for i in 0..mins.len() {
        for j in i + 1..mins.len() {
            sep = sep.min(mins[i].chart_distance(&mins[j]));
        }
    }
    let ambiguous = !r.is_unique() && mins.len() >= 2 && sep > 0.5;
    let x = Point::new(&[0.0, 0.5]);
    let opts = ReachOptions::new(0.25, 250);
    let mut reach = vec![];
    for n in [5, 10, 20, 50] {
        let comb = SetSpec::builtin(&format!("comb:N={n}")).map_err(fail)?;
        reach.push(estimate_reach(&comb, &x, &opts).map_err(fail)?.reach);
    }
    let decreasing = reach.windows(2).all(|w| w[1] < w[0]);
    check(
        ambiguous && decreasing && reach[3] < 0.02,
        format!(
            "disk: {} minimizers, min separation {sep:.3}; comb reach {:?}",
            mins.len(),
            reach.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn non_sufficiency() -> Outcome {
    let set = builtin("sphere-cap");
    let alpha = sphere_alpha_curve(THETA0, 200).map_err(fail)?;
    let gamma = sphere_boundary_curve(THETA0, 200).map_err(fail)?;
    let r = necessary_condition_residual(&alpha, &set, &ResidualOptions::default()).map_err(fail)?;
    let gap = alpha.length() - gamma.length();
    check(
        r.max <= 1e-4 && gap >= 1.4,
        format!("alpha residual {:.1e}, L(alpha) - L(gamma) = {gap:.4}", r.max),
    )
}

fn bump(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.0
    } else {
        (PI * i as f64 / (n - 1) as f64).sin()
    }
}

fn pushed(curve: &DiscreteCurve, k: usize, depth: f64) -> DiscreteCurve {
    let n = curve.len();
    let points = curve
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut c = p.to_vec();
            c[k] -= depth * bump(i, n);
            Point::new(&c)
        })
        .collect();
    DiscreteCurve::new(curve.manifold, curve.times.clone(), points, curve.breakpoints.clone()).unwrap()
}

fn variations() -> Result<f64, String> {
    let set = builtin("sphere-cap");
    let nodes = 201;
    let curve = sphere_boundary_curve(THETA0, nodes).map_err(fail)?;
    let dt = curve.times[1] - curve.times[0];
    let mut rng = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a: f64 = rng.gen_range(0.2..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        let k = rng.gen_range(1..4) as f64;
        let field = VariationField::from_fn(&curve, |i, _| {
            let s = i as f64 / (nodes - 1) as f64;
            let w = bump(i, nodes);
            vec![-a * w, b * w * (k * PI * s).cos()]
        })
        .map_err(fail)?;
        if !field.is_proper() {
            return Err("variation is not proper".into());
        }
        let dl = first_variation(&curve, &field).map_err(fail)?;
        let fd = finite_difference_length_derivative(&curve, &field, 1e-4, Some(&set)).map_err(fail)?;
        worst = worst.max((dl - fd).abs() / 1e-3f64.max(10.0 * dt * dt));
    }
    Ok(worst)
}

fn retract(name: &str, seed: u64) -> Result<(f64, f64), String> {
    let spec = SetSpec::builtin(name).map_err(fail)?;
    let m = spec.manifold();
    let opts = ProjectOptions::default();
    let mut rng = rng(seed);
    let (mut idem, mut excess) = (0.0f64, f64::NEG_INFINITY);
    let mut n = 0;
    while n < 100 {
        let z = match (&spec, m) {
            (SetSpec::Comb(_), _) => Point::new(&[rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2)]),
            (_, Manifold::Sphere2) => Point::new(&[rng.gen_range(0.3..PI - 0.1), rng.gen_range(-3.0..3.0)]),
            (_, Manifold::Hyperbolic2) => Point::new(&[rng.gen_range(-2.0..2.0), rng.gen_range(0.3..4.0)]),
            _ => random_point(&mut rng, &m),
        };
        if spec.contains(&z) {
            continue;
        }
        n += 1;
        let r = Projector::project(&spec, &z, &opts).map_err(fail)?;
        for p in r.minimizers() {
            if !spec.contains(&p) {
                return Err(format!("{name}: projection of {:?} left the set", z.coords));
            }
            let again = Projector::project(&spec, &p, &opts).map_err(fail)?;
            idem = idem.max(again.point.chart_distance(&p)).max(again.dist);
            excess = excess.max((m.distance(&z, &p) - r.dist).abs());
        }
        // d(z, P z) against an independent upper bound on d_S(z)
        let bound = match &spec {
            SetSpec::Comb(c) => c.project_grid(&z, 1e-3).map_err(fail)?.dist,
            SetSpec::Prox(s) => s
                .sample_near(&z, 1.5 * r.dist + 1e-3, 400, seed + n as u64)
                .iter()
                .map(|y| m.distance(&z, y))
                .fold(f64::INFINITY, f64::min),
        };
        excess = excess.max(r.dist - bound);
    }
    Ok((idem, excess))
}

fn solver_traces() -> Result<(f64, usize), String> {
    let sphere = builtin("sphere-cap");
    let strip = builtin("hyperbolic-strip");
    let half = builtin("euclidean-halfplane");
    let disk = builtin("disk-complement");
    let arch = DiscreteCurve::new(
        Manifold::euclidean(2),
        (0..401).map(|i| i as f64 / 400.0).collect(),
        (0..401)
            .map(|i| Point::new(&[-2.0 + 4.0 * i as f64 / 400.0, 1.5 * bump(i, 401)]))
            .collect(),
        vec![],
    )
    .map_err(fail)?;
    let line = DiscreteCurve::new(
        Manifold::euclidean(2),
        (0..101).map(|i| i as f64 / 100.0).collect(),
        (0..101)
            .map(|i| {
                let t = i as f64 / 100.0;
                Point::new(&[-1.0 + 3.0 * t, -1.0 - 0.5 * (PI * t).sin()])
            })
            .collect(),
        vec![],
    )
    .map_err(fail)?;
    let runs = [
        (pushed(&sphere_boundary_curve(THETA0, 200).map_err(fail)?, 0, 0.3), &sphere),
        (pushed(&hyperbolic_line(-0.5, 0.5, 101).map_err(fail)?, 1, 0.5), &strip),
        (line, &half),
        (arch, &disk),
    ];
    let (mut worst, mut steps) = (f64::NEG_INFINITY, 0);
    for (curve, set) in runs {
        let (_, sr) = minimize_curve(&curve, set, &SolverParams::default()).map_err(fail)?;
        for w in sr.length_trace.windows(2) {
            worst = worst.max(w[1] - w[0]);
            steps += 1;
        }
    }
    Ok((worst, steps))
}

fn properties() -> Outcome {
    let fv = variations()?;
    let mut idem = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    let names = [
        "sphere-cap",
        "hyperbolic-strip",
        "euclidean-halfplane",
        "disk-complement",
        "euclidean-line",
        "comb:N=10",
    ];
    for (k, name) in names.iter().enumerate() {
        let (i, e) = retract(name, 40 + k as u64)?;
        idem = idem.max(i);
        excess = excess.max(e);
    }
    let (mono, steps) = solver_traces()?;
    check(
        fv <= 1.0 && idem <= 1e-9 && excess <= 1e-9 && mono <= 1e-10,
        format!(
            "first variation {fv:.2} of tolerance; idempotence {idem:.1e}, retract excess {excess:.1e} \
             over {} sets; max length increase {mono:.1e} over {steps} steps",
            names.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("sphere lengths", sphere_lengths, Some(1.0)),
        ("sphere covariant acceleration", sphere_acceleration, Some(1.0)),
        ("hyperbolic projection and acceleration", hyperbolic, Some(1.0)),
        ("directional derivative of the projection", ddp, Some(30.0)),
        ("hessian lower bound", hessian, Some(5.0)),
        ("cone polarity", polarity, None),
        ("tangent cone intersection", tangent_intersection, None),
        ("non-uniqueness and reach degeneracy", degeneracy, None),
        ("necessary but not sufficient", non_sufficiency, None),
        ("property suite", properties, None),
    ];
    let mut failures = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let slow = limit.is_some_and(|s| took > Duration::from_secs_f64(s));
        let (ok, msg) = match outcome {
            Ok(m) if slow => (false, format!("{m}; too slow, limit {}s", limit.unwrap())),
            Ok(m) => (true, m),
            Err(m) => (false, m),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {msg} ({:.3}s)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
