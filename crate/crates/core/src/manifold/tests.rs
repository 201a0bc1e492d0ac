use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use approx::assert_abs_diff_eq;
use rand::Rng;

use super::*;
use crate::sampling;

fn random_pair<R: Rng>(rng: &mut R, m: &Manifold, max_dist: f64) -> (Point, Point) {
    loop {
        let x = match m {
            Manifold::Euclidean { dim } => Point::new(&(0..*dim).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>()),
            Manifold::Sphere2 => Point::new(&[rng.gen_range(0.4..2.7), rng.gen_range(-2.3..2.3)]),
            Manifold::Hyperbolic2 => Point::new(&[rng.gen_range(-2.0..2.0), rng.gen_range(0.3..3.0)]),
        };
        let r = rng.gen_range(0.05..max_dist);
        let v = sampling::tangent_of_norm(rng, m, &x, r);
        if let Ok(y) = m.exp(&x, &v) {
            return (x, y);
        }
    }
}

const MANIFOLDS: [Manifold; 3] = [Manifold::Euclidean { dim: 2 }, Manifold::Sphere2, Manifold::Hyperbolic2];

#[test]
fn metric_examples() {
    let h = Manifold::Hyperbolic2;
    let x = Point::new(&[0.0, 2.0]);
    let u = TangentVector::new(&x, &[0.0, 1.0]);
    assert_abs_diff_eq!(h.metric(&x, &u, &u).unwrap(), 0.25, epsilon = 1e-15);

    let s = Manifold::Sphere2;
    let x = Point::new(&[FRAC_PI_2, 0.0]);
    let u = TangentVector::new(&x, &[0.0, 1.0]);
    assert_abs_diff_eq!(s.metric(&x, &u, &u).unwrap(), 1.0, epsilon = 1e-15);
    let z = TangentVector::zero(&x);
    assert_eq!(s.metric(&x, &z, &u).unwrap(), 0.0);
}

#[test]
fn metric_rejects_mismatched_bases() {
    let s = Manifold::Sphere2;
    let x = Point::new(&[1.0, 0.0]);
    let y = Point::new(&[1.1, 0.0]);
    let u = TangentVector::new(&x, &[1.0, 0.0]);
    let v = TangentVector::new(&y, &[1.0, 0.0]);
    assert_eq!(s.metric(&x, &u, &v), Err(Error::BaseMismatch));
}

#[test]
fn chart_domains() {
    assert!(Manifold::Sphere2.point(&[0.0, 0.0]).is_err());
    assert!(Manifold::Sphere2.point(&[PI, 0.0]).is_err());
    assert!(Manifold::Sphere2.point(&[1.0, PI]).is_err());
    assert!(Manifold::Sphere2.point(&[1.0, -PI]).is_err());
    assert!(Manifold::Hyperbolic2.point(&[0.0, 0.0]).is_err());
    assert!(Manifold::Hyperbolic2.point(&[0.0, 1e-3]).is_ok());
    assert!(Manifold::euclidean(3).point(&[1.0, 2.0]).is_err());
}

#[test]
fn christoffel_closed_forms() {
    let theta: f64 = 1.1;
    let g = Manifold::Sphere2.christoffel(&Point::new(&[theta, 0.3])).unwrap();
    assert_abs_diff_eq!(g.get(0, 1, 1), -theta.sin() * theta.cos(), epsilon = 1e-15);
    assert_abs_diff_eq!(g.get(1, 0, 1), theta.cos() / theta.sin(), epsilon = 1e-15);
    assert_abs_diff_eq!(g.get(1, 1, 0), theta.cos() / theta.sin(), epsilon = 1e-15);
    for (k, i, j) in [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 1, 1)] {
        assert_eq!(g.get(k, i, j), 0.0);
    }

    let e = Manifold::euclidean(3).christoffel(&Point::new(&[1.0, 2.0, 3.0])).unwrap();
    assert!(e.data.iter().all(|c| *c == 0.0));

    let g = Manifold::Hyperbolic2.christoffel(&Point::new(&[0.7, 2.0])).unwrap();
    assert_abs_diff_eq!(g.get(0, 0, 1), -0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(g.get(1, 0, 0), 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(g.get(1, 1, 1), -0.5, epsilon = 1e-15);
    assert_eq!(g.get(0, 0, 0), 0.0);
    assert_eq!(g.get(1, 0, 1), 0.0);
}

/// Levi-Civita formula with finite-difference metric derivatives, independent of the
/// closed forms.
fn christoffel_oracle(m: &Manifold, c: &[f64]) -> Vec<f64> {
    let n = m.dim();
    let h = 1e-5;
    let metric = |c: &[f64]| m.metric_diag(&Point::new(c));
    let dg = |l: usize, i: usize, j: usize| -> f64 {
        if i != j {
            return 0.0;
        }
        let mut p = c.to_vec();
        let mut q = c.to_vec();
        p[l] += h;
        q[l] -= h;
        (metric(&p)[i] - metric(&q)[i]) / (2.0 * h)
    };
    let g = metric(c);
    let mut out = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[(k * n + i) * n + j] = 0.5 / g[k] * (dg(i, k, j) + dg(j, k, i) - dg(k, i, j));
            }
        }
    }
    out
}

#[test]
fn christoffel_matches_levi_civita_oracle() {
    let mut rng = sampling::rng(3);
    for m in MANIFOLDS {
        for _ in 0..20 {
            let (x, _) = random_pair(&mut rng, &m, 0.5);
            let got = m.christoffel(&x).unwrap();
            let want = christoffel_oracle(&m, &x.coords);
            for (a, b) in got.data.iter().zip(&want) {
                assert!((a - b).abs() < 1e-7 * (1.0 + b.abs()), "{m:?} {a} vs {b}");
            }
        }
    }
}

#[test]
fn geodesic_examples() {
    let s = Manifold::Sphere2;
    let x = Point::new(&[FRAC_PI_2, 0.0]);
    let still = s.geodesic(&x, &TangentVector::zero(&x), 3.0).unwrap();
    assert_eq!(still, x);

    let end = s.geodesic(&x, &TangentVector::new(&x, &[0.0, 1.0]), FRAC_PI_2).unwrap();
    assert_abs_diff_eq!(end.coords[0], FRAC_PI_2, epsilon = 1e-9);
    assert_abs_diff_eq!(end.coords[1], FRAC_PI_2, epsilon = 1e-9);

    let h = Manifold::Hyperbolic2;
    let x = Point::new(&[0.0, 1.0]);
    let end = h.geodesic(&x, &TangentVector::new(&x, &[0.0, 1.0]), 2f64.ln()).unwrap();
    assert_abs_diff_eq!(end.coords[0], 0.0, epsilon = 1e-9);
    assert_abs_diff_eq!(end.coords[1], 2.0, epsilon = 1e-9);
    assert_abs_diff_eq!(h.distance(&x, &end), 2f64.ln(), epsilon = 1e-9);
}

#[test]
fn geodesic_reports_chart_exit() {
    let s = Manifold::Sphere2;
    let x = Point::new(&[FRAC_PI_2, 3.0]);
    let r = s.geodesic(&x, &TangentVector::new(&x, &[0.0, 1.0]), 1.0);
    assert!(matches!(r, Err(Error::ChartExit { .. })));
    assert!(matches!(s.exp(&x, &TangentVector::new(&x, &[0.0, 1.0])), Err(Error::ChartExit { .. })));

    // Through the north pole.
    let x = Point::new(&[0.5, 0.0]);
    assert!(s.exp(&x, &TangentVector::new(&x, &[-1.0, 0.0])).is_err());
    assert!(s.geodesic(&x, &TangentVector::new(&x, &[-1.0, 0.0]), 1.0).is_err());
}

#[test]
fn exp_examples() {
    let e = Manifold::euclidean(2);
    let x = Point::new(&[1.0, 1.0]);
    assert_eq!(e.exp(&x, &TangentVector::new(&x, &[2.0, 3.0])).unwrap(), Point::new(&[3.0, 4.0]));
    for m in MANIFOLDS {
        let x = match m {
            Manifold::Hyperbolic2 => Point::new(&[0.2, 1.5]),
            _ => Point::new(&[1.2, 0.4]),
        };
        assert_eq!(m.exp(&x, &TangentVector::zero(&x)).unwrap(), x);
    }
    let s = Manifold::Sphere2;
    let x = Point::new(&[FRAC_PI_2, 0.0]);
    let y = s.exp(&x, &TangentVector::new(&x, &[0.0, FRAC_PI_2])).unwrap();
    assert_abs_diff_eq!(y.coords[0], FRAC_PI_2, epsilon = 1e-14);
    assert_abs_diff_eq!(y.coords[1], FRAC_PI_2, epsilon = 1e-14);
}

#[test]
fn closed_form_exp_agrees_with_integrated_geodesic() {
    let mut rng = sampling::rng(11);
    for m in [Manifold::Sphere2, Manifold::Hyperbolic2] {
        let mut checked = 0;
        while checked < 30 {
            let (x, _) = random_pair(&mut rng, &m, 1.0);
            let r = rng.gen_range(0.1..1.2);
            let v = sampling::tangent_of_norm(&mut rng, &m, &x, r);
            let (Ok(a), Ok(b)) = (m.exp(&x, &v), m.geodesic(&x, &v, 1.0)) else {
                continue;
            };
            assert!(m.distance(&a, &b) < 1e-8, "{m:?}: {a:?} vs {b:?}");
            checked += 1;
        }
    }
}

#[test]
fn integrated_geodesic_has_small_local_defect() {
    // Restart from every accepted step with a much tighter tolerance and compare.
    let mut rng = sampling::rng(5);
    for m in [Manifold::Sphere2, Manifold::Hyperbolic2] {
        let (x, _) = random_pair(&mut rng, &m, 0.5);
        let v = sampling::tangent_of_norm(&mut rng, &m, &x, 0.8);
        let opts = OdeOptions { tol: TOL_ODE, ..OdeOptions::default() };
        let Ok(traj) = m.geodesic_trajectory(&x, &v, 1.0, &opts, true) else { continue };
        let tight = OdeOptions { tol: 1e-13, h0: 1e-3, ..OdeOptions::default() };
        for k in 1..traj.times.len() - 1 {
            let s = &traj.states[k];
            let p = Point::new(&s[..2]);
            let w = TangentVector::new(&p, &s[2..]);
            let dt = traj.times[k + 1] - traj.times[k];
            let fine = m.geodesic_trajectory(&p, &w, dt, &tight, false).unwrap();
            let next = &traj.states[k + 1];
            let defect = fine.last().iter().zip(next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(defect <= TOL_ODE, "defect {defect} at step {k}");
            // The ODE residual of the reconstructed state: acceleration equals -Gamma(v, v).
            let acc = m.geodesic_accel(&p.coords, &w.comps);
            let gam = m.christoffel(&p).unwrap().contract(&w.comps, &w.comps);
            for i in 0..2 {
                assert!((acc[i] + gam[i]).abs() <= TOL_ODE);
            }
        }
    }
}

#[test]
fn log_examples() {
    for m in MANIFOLDS {
        let x = Point::new(&[1.0, 1.0]);
        assert!(m.log(&x, &x).unwrap().is_zero());
    }
    let h = Manifold::Hyperbolic2;
    let v = h.log(&Point::new(&[0.0, 1.0]), &Point::new(&[0.0, 2.0])).unwrap();
    assert_abs_diff_eq!(v.comps[0], 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(v.comps[1], 2f64.ln(), epsilon = 1e-14);
    assert_abs_diff_eq!(h.exp(&v.base, &v).unwrap().coords[1], 2.0, epsilon = 1e-14);

    let e = Manifold::euclidean(3);
    let v = e.log(&Point::new(&[1.0, 2.0, 3.0]), &Point::new(&[0.0, 0.0, 5.0])).unwrap();
    assert_eq!(v.comps.as_slice(), &[-1.0, -2.0, 2.0]);
}

#[test]
fn sphere_log_rejects_antipodes() {
    let s = Manifold::Sphere2;
    let x = Point::new(&[FRAC_PI_2, -FRAC_PI_2]);
    let y = Point::new(&[FRAC_PI_2, FRAC_PI_2]);
    assert!(matches!(s.log(&x, &y), Err(Error::NotInConvexBall { .. })));
}

#[test]
fn log_inverts_exp_and_has_distance_norm() {
    let mut rng = sampling::rng(21);
    for m in MANIFOLDS {
        let tol = if m == Manifold::Sphere2 { 1e-6 } else { 1e-8 };
        for _ in 0..100 {
            let (x, y) = random_pair(&mut rng, &m, 1.4);
            let v = m.log(&x, &y).unwrap();
            assert_abs_diff_eq!(m.norm(&v), m.distance(&x, &y), epsilon = tol);
            let back = m.exp(&x, &v).unwrap();
            assert!(m.distance(&back, &y) < tol);
        }
    }
}

#[test]
fn shooting_log_agrees_with_closed_form() {
    let s = Manifold::Sphere2;
    let x = Point::new(&[1.0, -0.4]);
    let y = Point::new(&[1.7, 0.6]);
    let closed = s.log(&x, &y).unwrap();
    let shot = s.log_shooting(&x, &y, &[0.0, 0.5]).unwrap();
    for i in 0..2 {
        assert_abs_diff_eq!(closed.comps[i], shot.comps[i], epsilon = 1e-8);
    }
}

#[test]
fn distance_examples() {
    let h = Manifold::Hyperbolic2;
    assert_abs_diff_eq!(h.distance(&Point::new(&[0.0, 1.0]), &Point::new(&[0.0, 2.0])), 2f64.ln(), epsilon = 1e-15);
    let s = Manifold::Sphere2;
    let a = Point::new(&[FRAC_PI_2, -FRAC_PI_2]);
    let b = Point::new(&[FRAC_PI_2, FRAC_PI_2]);
    assert_abs_diff_eq!(s.distance(&a, &b), PI, epsilon = 1e-15);
    // The same value from the length of the equatorial geodesic.
    let mid = s.geodesic(&a, &TangentVector::new(&a, &[0.0, 1.0]), FRAC_PI_2).unwrap();
    assert_abs_diff_eq!(s.distance(&a, &mid) + s.distance(&mid, &b), PI, epsilon = 1e-9);
    for m in MANIFOLDS {
        let x = Point::new(&[0.4, 0.9]);
        assert_eq!(m.distance(&x, &x), 0.0);
    }
}

#[test]
fn hyperbolic_distance_matches_log_form() {
    let mut rng = sampling::rng(8);
    for _ in 0..200 {
        let a = [rng.gen_range(-3.0..3.0), rng.gen_range(0.1..4.0)];
        let b = [rng.gen_range(-3.0..3.0), rng.gen_range(0.1..4.0)];
        let d1 = hyperbolic::distance(&a, &b);
        let d2 = hyperbolic::distance_log_form(&a, &b);
        assert!((d1 - d2).abs() < 1e-12 * (1.0 + d2), "{d1} vs {d2}");
        assert_abs_diff_eq!(d1, hyperbolic::distance(&b, &a), epsilon = 1e-13);
    }
}

#[test]
fn transport_examples() {
    let s = Manifold::Sphere2;
    let x = Point::new(&[FRAC_PI_2, 0.0]);
    let v = TangentVector::new(&x, &[1.0, 0.0]);
    assert_eq!(s.parallel_transport(&x, &x, &v).unwrap(), v);

    let y = Point::new(&[FRAC_PI_2, FRAC_PI_2]);
    let w = s.parallel_transport(&x, &y, &v).unwrap();
    assert_abs_diff_eq!(w.comps[0], 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(w.comps[1], 0.0, epsilon = 1e-9);

    let e = Manifold::euclidean(2);
    let v = TangentVector::new(&x, &[0.3, -2.0]);
    let w = e.parallel_transport(&x, &Point::new(&[5.0, 5.0]), &v).unwrap();
    assert_eq!(w.comps, v.comps);
}

#[test]
fn transport_maps_log_to_negative_log_and_preserves_norm() {
    let mut rng = sampling::rng(99);
    for m in MANIFOLDS {
        for _ in 0..100 {
            let (x, y) = random_pair(&mut rng, &m, 1.2);
            let Ok(lxy) = m.log(&x, &y) else { continue };
            let Ok(moved) = m.parallel_transport(&x, &y, &lxy) else { continue };
            let lyx = m.log(&y, &x).unwrap();
            for i in 0..m.dim() {
                assert!((moved.comps[i] + lyx.comps[i]).abs() < 1e-7, "{m:?} {moved:?} {lyx:?}");
            }
            let v = sampling::tangent_of_norm(&mut rng, &m, &x, 1.0);
            let tv = m.parallel_transport(&x, &y, &v).unwrap();
            assert_abs_diff_eq!(m.norm(&tv), 1.0, epsilon = 1e-8);
        }
    }
}

#[test]
fn sphere_transport_matches_rotation_oracle() {
    let mut rng = sampling::rng(4);
    let s = Manifold::Sphere2;
    for _ in 0..30 {
        let (x, y) = random_pair(&mut rng, &s, 1.2);
        let v = sampling::tangent_of_norm(&mut rng, &s, &x, 1.0);
        let Ok(ode) = s.parallel_transport(&x, &y, &v) else { continue };
        let rot = sphere::transport_rodrigues(&x.coords, &y.coords, &v.comps);
        for i in 0..2 {
            assert_abs_diff_eq!(ode.comps[i], rot[i], epsilon = 1e-7);
        }
    }
}

#[test]
fn transported_field_has_constant_norm_along_geodesic() {
    // d/dt <V, V> along the geodesic, by central differences of transported norms.
    let h = Manifold::Hyperbolic2;
    let x = Point::new(&[0.0, 1.0]);
    let y = Point::new(&[1.5, 0.7]);
    let dir = h.log(&x, &y).unwrap();
    let v = TangentVector::new(&x, &[0.2, 0.9]);
    let norm_at = |t: f64| {
        let p = h.exp(&x, &dir.scale(t)).unwrap();
        let w = h.parallel_transport(&x, &p, &v).unwrap();
        h.inner(&w, &w).unwrap()
    };
    for t in [0.2, 0.5, 0.8] {
        let dt = 1e-3;
        let deriv = (norm_at(t + dt) - norm_at(t - dt)) / (2.0 * dt);
        assert!(deriv.abs() < 1e-6, "derivative {deriv}");
    }
}

#[test]
fn hessian_examples() {
    let e = Manifold::euclidean(2);
    let c = Point::new(&[0.0, 0.0]);
    let z = Point::new(&[1.0, -2.0]);
    let w = TangentVector::new(&z, &[0.3, 0.4]);
    assert_abs_diff_eq!(e.hessian_dist_sq(&c, &z, &w).unwrap(), 2.0 * 0.25, epsilon = 1e-7);
    assert_eq!(e.hessian_dist_sq(&c, &z, &TangentVector::zero(&z)).unwrap(), 0.0);

    let s = Manifold::Sphere2;
    let c = Point::new(&[FRAC_PI_2, 0.0]);
    let z = Point::new(&[FRAC_PI_2, FRAC_PI_4]);
    let w = TangentVector::new(&z, &[1.0, 0.0]);
    let bound = s.hess_lower_bound(&c, &z);
    assert_abs_diff_eq!(bound, FRAC_PI_2, epsilon = 1e-12);
    let hess = s.hessian_dist_sq(&c, &z, &w).unwrap();
    assert!(hess >= bound - 1e-6, "{hess} < {bound}");
    // w is orthogonal to the geodesic, where the bound is attained.
    assert_abs_diff_eq!(hess, FRAC_PI_2, epsilon = 1e-6);
}

#[test]
fn hessian_radius_precondition() {
    let s = Manifold::Sphere2;
    let c = Point::new(&[FRAC_PI_2, 0.0]);
    let z = Point::new(&[FRAC_PI_2, 1.7]);
    let w = TangentVector::new(&z, &[1.0, 0.0]);
    assert!(matches!(s.hessian_dist_sq(&c, &z, &w), Err(Error::RadiusPrecondition { .. })));
    let z = Point::new(&[FRAC_PI_2, 0.5]);
    let w = TangentVector::new(&z, &[1.0, 0.0]);
    assert!(s.hessian_dist_sq_within(&c, &z, &w, Some(0.4)).is_err());
}

#[test]
fn hessian_bound_holds_on_random_samples() {
    let mut rng = sampling::rng(17);
    for m in MANIFOLDS {
        let mut n = 0;
        while n < 50 {
            let (c, _) = random_pair(&mut rng, &m, 0.5);
            let radius = m.hess_radius(&c, None).min(3.0);
            let v = sampling::tangent_in_ball(&mut rng, &m, &c, 0.98 * radius);
            let Ok(z) = m.exp(&c, &v) else { continue };
            let w = sampling::tangent_of_norm(&mut rng, &m, &z, 1.0);
            let Ok(hess) = m.hessian_dist_sq(&c, &z, &w) else { continue };
            let bound = m.hess_lower_bound(&c, &z);
            assert!(hess - bound >= -1e-6, "{m:?}: {hess} < {bound}");
            n += 1;
        }
    }
}

#[test]
fn manifold_names() {
    assert_eq!(Manifold::from_name("sphere2").unwrap(), Manifold::Sphere2);
    assert_eq!(Manifold::from_name("hyperbolic2").unwrap(), Manifold::Hyperbolic2);
    assert_eq!(Manifold::from_name("euclidean").unwrap(), Manifold::euclidean(2));
    assert_eq!(Manifold::from_name("euclidean:dim=4").unwrap(), Manifold::euclidean(4));
    assert!(Manifold::from_name("torus").is_err());
    assert!(Manifold::from_name("euclidean:dim=0").is_err());
}
