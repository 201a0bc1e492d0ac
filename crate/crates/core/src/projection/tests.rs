use std::f64::consts::PI;

use super::*;
use crate::proxset::{ConeKind, Region};
use crate::sampling;

const THETA0: f64 = 2.0 * PI / 3.0;

fn prox(name: &str) -> ProxSet {
    SetSpec::builtin(name).unwrap().as_prox().unwrap().clone()
}

fn opts() -> ProjectOptions {
    ProjectOptions::default()
}

#[test]
fn strip_projection_matches_closed_form() {
    let s = prox("hyperbolic-strip");
    let r = project(&s, &Point::new(&[0.3, 3.0]), &opts()).unwrap();
    assert!(r.is_unique());
    assert!((r.point.coords[0] - 0.3).abs() < 1e-6 && (r.point.coords[1] - 2.0).abs() < 1e-6);
    assert!((r.dist - 1.5f64.ln()).abs() < 1e-8);
    let r = project(&s, &Point::new(&[0.3, 0.5]), &opts()).unwrap();
    assert!((r.point.coords[0] - 0.3).abs() < 1e-6 && (r.point.coords[1] - 1.0).abs() < 1e-6);
    assert!((r.dist - 2f64.ln()).abs() < 1e-8);
}

#[test]
fn points_of_the_set_are_fixed() {
    let s = prox("sphere-cap:theta0=2.0944");
    let z = Point::new(&[2.0, 0.0]);
    let r = project(&s, &z, &opts()).unwrap();
    assert_eq!(r, ProjectionResult::trivial(&z));
}

#[test]
fn cap_and_flat_examples() {
    let s = prox("sphere-cap");
    let r = project(&s, &Point::new(&[2.5, 0.3]), &opts()).unwrap();
    assert!((r.point.coords[0] - THETA0).abs() < 1e-9 && (r.point.coords[1] - 0.3).abs() < 1e-9);
    assert!((r.dist - (2.5 - THETA0)).abs() < 1e-10);
    let line = prox("euclidean-line");
    for z in [[1.0, -2.0], [1.0, 2.0]] {
        let r = project(&line, &Point::new(&z), &opts()).unwrap();
        assert!((r.point.coords[0] - 1.0).abs() < 1e-9 && r.point.coords[1].abs() < 1e-9);
    }
}

#[test]
fn disk_complement_center_is_ambiguous() {
    let s = prox("disk-complement");
    let r = project(&s, &Point::new(&[0.0, 0.0]), &opts()).unwrap();
    let mins = r.minimizers();
    assert!(mins.len() >= 2);
    for i in 0..mins.len() {
        for j in i + 1..mins.len() {
            assert!(mins[i].chart_distance(&mins[j]) > 0.5);
        }
    }
    assert!((r.dist - 1.0).abs() < 1e-12);
    assert!(r.clone().require_unique(&Point::new(&[0.0, 0.0])).is_err());
    let off = project(&s, &Point::new(&[0.3, 0.0]), &opts()).unwrap();
    assert!(off.is_unique() && (off.point.coords[0] - 1.0).abs() < 1e-9);
}

/// Dense parametrized samples of each builtin boundary near a point.
fn boundary_oracle(name: &str, z: &Point) -> f64 {
    let s = prox(name);
    let m = s.manifold;
    let k = 200_000;
    let pts: Vec<Point> = match name {
        "sphere-cap" => (0..k)
            .map(|i| Point::new(&[THETA0, -PI + 2.0 * PI * (i as f64 + 0.5) / k as f64]))
            .collect(),
        "hyperbolic-strip" => (0..k)
            .flat_map(|i| {
                let x = z.coords[0] - 5.0 + 10.0 * i as f64 / k as f64;
                [Point::new(&[x, 1.0]), Point::new(&[x, 2.0])]
            })
            .collect(),
        "euclidean-halfplane" | "euclidean-line" => (0..k)
            .map(|i| Point::new(&[z.coords[0] - 5.0 + 10.0 * i as f64 / k as f64, 0.0]))
            .collect(),
        "disk-complement" => (0..k)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / k as f64;
                Point::new(&[a.cos(), a.sin()])
            })
            .collect(),
        _ => unreachable!(),
    };
    pts.iter().map(|p| m.distance(z, p)).fold(f64::INFINITY, f64::min)
}

#[test]
fn idempotence_and_retract_identity() {
    for (name, center, radius) in [
        ("sphere-cap", [THETA0, 0.0], 0.6),
        ("hyperbolic-strip", [0.0, 2.0], 0.5),
        ("euclidean-halfplane", [0.0, 0.0], 2.0),
        ("disk-complement", [1.0, 0.0], 0.8),
        ("euclidean-line", [0.0, 0.0], 2.0),
    ] {
        let s = prox(name);
        let m = s.manifold;
        let c = Point::new(&center);
        let mut rng = sampling::rng(17);
        let mut n = 0;
        while n < 15 {
            let z = m.exp(&c, &sampling::tangent_in_ball(&mut rng, &m, &c, radius)).unwrap();
            if s.classify(&z).unwrap() != Region::Exterior {
                continue;
            }
            n += 1;
            let r = project(&s, &z, &opts()).unwrap();
            assert!(r.is_unique(), "{name} {z:?}");
            assert_eq!(s.classify(&r.point).unwrap(), Region::Boundary);
            assert!((m.distance(&z, &r.point) - r.dist).abs() < 1e-12);
            let again = project(&s, &r.point, &opts()).unwrap();
            assert_eq!(again.dist, 0.0);
            let oracle = boundary_oracle(name, &z);
            assert!(r.dist <= oracle + 1e-9, "{name}: {} vs oracle {oracle}", r.dist);
            assert!(r.dist >= oracle - 1e-4, "{name}: {} vs oracle {oracle}", r.dist);
        }
    }
}

#[test]
fn cone_projection_is_variational_and_homogeneous() {
    let m = Manifold::Hyperbolic2;
    let x = Point::new(&[0.2, 1.7]);
    let g = TangentVector::new(&x, &[0.5, -0.4]);
    let mut rng = sampling::rng(8);
    let cones = [
        ConeSpec::ray(m, &g).unwrap(),
        ConeSpec::line(m, &g).unwrap(),
        ConeSpec::half_space(m, &g).unwrap(),
        ConeSpec::hyperplane(m, &g).unwrap(),
        ConeSpec::full(m, &x),
        ConeSpec::zero(m, &x),
    ];
    for c in &cones {
        for _ in 0..50 {
            let v = sampling::tangent_of_norm(&mut rng, &m, &x, 2.0);
            let p = cone_project(c, &v).unwrap();
            assert!(c.contains(&p, 1e-14).unwrap());
            let resid = v.sub(&p).unwrap();
            for _ in 0..20 {
                let w = cone_project(c, &sampling::tangent_of_norm(&mut rng, &m, &x, 3.0)).unwrap();
                assert!(m.inner(&resid, &w.sub(&p).unwrap()).unwrap() <= 1e-12);
            }
            for t in [0.0, 0.5, 3.0] {
                let a = cone_project(c, &v.scale(t)).unwrap();
                let b = p.scale(t);
                for (x, y) in a.comps.iter().zip(&b.comps) {
                    assert!((x - y).abs() <= 1e-15 * (1.0 + y.abs()));
                }
            }
        }
    }
}

#[test]
fn directional_derivative_examples() {
    let cap = prox("sphere-cap");
    let x = Point::new(&[THETA0, 0.0]);
    let d = directional_derivative(&cap, &x, &TangentVector::new(&x, &[1.0, 0.0]), &DirectionalOptions::default())
        .unwrap();
    assert!(cap.manifold.norm(&d.value) < 1e-6, "{:?}", d.value);
    let inward = TangentVector::new(&x, &[-1.0, 0.3]);
    let d = directional_derivative(&cap, &x, &inward, &DirectionalOptions::default()).unwrap();
    assert!(cap.manifold.norm(&d.value.sub(&inward).unwrap()) < 1e-6);

    let strip = prox("hyperbolic-strip");
    let x = Point::new(&[0.0, 2.0]);
    let v = TangentVector::new(&x, &[1.0, 1.0]);
    let d = directional_derivative(&strip, &x, &v, &DirectionalOptions::default()).unwrap();
    let want = cone_project(&strip.bouligand_tangent_cone(&x).unwrap(), &v).unwrap();
    assert!((want.comps[0] - 1.0).abs() < 1e-15 && want.comps[1].abs() < 1e-15);
    assert!(strip.manifold.norm(&d.value.sub(&want).unwrap()) < 1e-4, "{:?}", d.value);
}

#[test]
fn directional_derivative_matches_cone_projection() {
    for name in ["sphere-cap", "hyperbolic-strip", "disk-complement"] {
        let s = prox(name);
        let m = s.manifold;
        let center = match name {
            "sphere-cap" => Point::new(&[THETA0, 0.0]),
            "hyperbolic-strip" => Point::new(&[0.0, 2.0]),
            _ => Point::new(&[1.0, 0.0]),
        };
        let xs = s.sample_boundary(&center, 0.5, 10, 4);
        let mut rng = sampling::rng(5);
        for x in &xs {
            let v = sampling::tangent_of_norm(&mut rng, &m, x, 1.0);
            let d = directional_derivative(&s, x, &v, &DirectionalOptions::default()).unwrap();
            let want = cone_project(&s.bouligand_tangent_cone(x).unwrap(), &v).unwrap();
            let err = m.norm(&d.value.sub(&want).unwrap());
            assert!(err <= 1e-4, "{name}: {err}");
        }
    }
}

#[test]
fn lipschitz_examples() {
    let half = prox("euclidean-halfplane");
    let r = lipschitz_estimate(&half, &Point::new(&[0.0, 0.0]), 1.0, 200, 1, &opts()).unwrap();
    assert!(r.estimate <= 1.0 + 1e-9 && r.estimate > 0.5);

    let strip = prox("hyperbolic-strip");
    let r = lipschitz_estimate(&strip, &Point::new(&[0.0, 2.0]), 0.3, 200, 2, &opts()).unwrap();
    // Explicit projection (x, y) -> (x, clamp(y, 1, 2)) as the oracle for the worst pair.
    let explicit = |z: &[f64]| Point::new(&[z[0], z[1].clamp(1.0, 2.0)]);
    let (a, b) = (&r.worst_pair.0, &r.worst_pair.1);
    let m = strip.manifold;
    let oracle = m.distance(&explicit(a), &explicit(b)) / m.distance(&Point::new(a), &Point::new(b));
    assert!(r.estimate.is_finite() && (r.estimate - oracle).abs() < 1e-6, "{r:?} vs {oracle}");

    let cap = prox("sphere-cap");
    let x = Point::new(&[THETA0, 0.0]);
    let r = lipschitz_estimate(&cap, &x, 0.1, 200, 3, &opts()).unwrap();
    let recipe = lip_recipe(&cap, &x, 1.0, Some(0.1), 400, 4).unwrap();
    assert!(recipe.sigma > 0.0 && recipe.r < recipe.r_max);
    assert!(r.estimate.is_finite() && r.estimate <= recipe.bound, "{r:?} vs {recipe:?}");

    let disk = prox("disk-complement");
    assert!(matches!(
        lipschitz_estimate(&disk, &Point::new(&[0.0, 0.0]), 1e-9, 4, 1, &opts()),
        Err(Error::AmbiguousProjection { .. })
    ));
}

#[test]
fn cot_root_value() {
    let a = cot_root();
    assert!((a - 1.16556).abs() < 1e-5);
    assert!((2.0 * a / a.tan() - 1.0).abs() < 1e-12);
}

#[test]
fn shapiro_examples() {
    let r = shapiro_check(&one_dimensional_pair(0.1, 400)).unwrap();
    assert!((r.actual - 0.1).abs() < 1e-15);
    assert!((r.kappa - 0.2).abs() < 1e-9 && r.delta1 == 0.0 && r.delta2 == 0.0);
    assert!((r.bound - 0.2).abs() < 1e-9 && r.ok);

    let same = shapiro_check(&one_dimensional_pair(0.0, 100)).unwrap();
    assert!(same.kappa == 0.0 && same.delta1 == 0.0 && same.delta2 == 0.0);
    assert!(same.bound >= 0.0 && same.actual == 0.0 && same.ok);

    let mut bad = one_dimensional_pair(0.1, 50);
    bad.alpha = 2.0;
    assert!(matches!(shapiro_check(&bad), Err(Error::QuadraticGrowthViolated { .. })));
}

#[test]
fn shapiro_on_the_ddp_pair() {
    let cap = prox("sphere-cap");
    let x = Point::new(&[THETA0, 0.0]);
    for v in [[1.0, 0.5], [0.2, -2.0], [-0.5, 1.0]] {
        let v = TangentVector::new(&x, &v);
        let pair = ddp_pair(&cap, &x, &v, 0.01, 40, &opts()).unwrap();
        let r = shapiro_check(&pair).unwrap();
        assert!(r.ok, "{r:?}");
    }
}

#[test]
fn comb_through_the_projector_trait() {
    let comb = SetSpec::builtin("comb:N=50").unwrap();
    let z = Point::new(&[0.03, 0.5]);
    let exact = Projector::project(&comb, &z, &opts()).unwrap();
    assert!((exact.point.coords[0] - 1.0 / 33.0).abs() < 1e-15);
    let grid = ProjectOptions {
        grid: Some(1e-3),
        ..opts()
    };
    let r = Projector::project(&comb, &z, &grid).unwrap();
    assert!((r.dist - exact.dist).abs() <= 1e-3);
    assert!(matches!(
        comb.as_prox().map(|s| s.bouligand_tangent_cone(&z)),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn cones_from_sets_report_variants() {
    let cap = prox("sphere-cap");
    let x = Point::new(&[THETA0, 0.0]);
    assert!(matches!(cap.bouligand_tangent_cone(&x).unwrap().kind, ConeKind::HalfSpace(_)));
}
