//! Model Riemannian manifolds in a single global chart.
//!
//! Three geometries are supported, each with a diagonal metric tensor:
//!
//! | kind          | chart                         | metric                    |
//! |---------------|-------------------------------|---------------------------|
//! | `euclidean`   | `R^n`                         | `dx_1^2 + ... + dx_n^2`   |
//! | `sphere2`     | `0 < theta < pi, -pi < phi < pi` | `dtheta^2 + sin^2 theta dphi^2` |
//! | `hyperbolic2` | `y > 0`                       | `(dx^2 + dy^2) / y^2`     |
//!
//! Exponential and logarithm maps use closed forms for the two curved models. The
//! Runge-Kutta geodesic integrator in [`Manifold::geodesic`] is the ODE route and is kept
//! independent of the closed forms so each can check the other.

mod hyperbolic;
mod sphere;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::ode::{self, OdeOptions, Trajectory};
use crate::{Error, Result};

pub type Coords = SmallVec<[f64; 4]>;

/// Largest radius reported for manifolds whose convexity radius is infinite.
pub const RADIUS_CAP: f64 = 1e9;

/// Tolerance target of the geodesic integrator.
pub const TOL_ODE: f64 = 1e-9;

/// Finite-difference step (relative to `|w|`) for the distance-squared Hessian.
pub const H_FD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Manifold {
    Euclidean { dim: usize },
    Sphere2,
    Hyperbolic2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Coords,
}

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        Self {
            coords: Coords::from_slice(coords),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.to_vec()
    }

    /// Chart (coordinate) Euclidean distance, used only for bookkeeping such as dedup.
    pub fn chart_distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: Point,
    pub comps: Coords,
}

impl TangentVector {
    pub fn new(base: &Point, comps: &[f64]) -> Self {
        Self {
            base: base.clone(),
            comps: Coords::from_slice(comps),
        }
    }

    pub fn zero(base: &Point) -> Self {
        Self {
            base: base.clone(),
            comps: smallvec![0.0; base.dim()],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            base: self.base.clone(),
            comps: self.comps.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &TangentVector) -> Result<Self> {
        same_base(self, other)?;
        Ok(Self {
            base: self.base.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &TangentVector) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| *c == 0.0)
    }
}

pub(crate) fn same_base(u: &TangentVector, v: &TangentVector) -> Result<()> {
    if u.comps.len() != v.comps.len() {
        return Err(Error::DimensionMismatch {
            expected: u.comps.len(),
            got: v.comps.len(),
        });
    }
    let scale = 1.0 + u.base.coords.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if u.base.chart_distance(&v.base) > 1e-12 * scale {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

/// Christoffel symbols `Gamma^k_{ij}` of the Levi-Civita connection in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    fn set_sym(&mut self, k: usize, i: usize, j: usize, value: f64) {
        let n = self.n;
        self.data[(k * n + i) * n + j] = value;
        self.data[(k * n + j) * n + i] = value;
    }

    /// `Gamma^k_{ij} u^i v^j` for every `k`.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Coords {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += self.get(k, i, j) * u[i] * v[j];
                    }
                }
                s
            })
            .collect()
    }
}

impl Manifold {
    pub fn euclidean(dim: usize) -> Self {
        Manifold::Euclidean { dim }
    }

    pub fn dim(&self) -> usize {
        match self {
            Manifold::Euclidean { dim } => *dim,
            Manifold::Sphere2 | Manifold::Hyperbolic2 => 2,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Manifold::Euclidean { dim } => format!("euclidean({dim})"),
            Manifold::Sphere2 => "sphere2".into(),
            Manifold::Hyperbolic2 => "hyperbolic2".into(),
        }
    }

    /// Parses `euclidean`, `euclidean:dim=3`, `sphere2` or `hyperbolic2`.
    pub fn from_name(name: &str) -> Result<Self> {
        let (kind, rest) = name.split_once(':').unwrap_or((name, ""));
        match kind.trim() {
            "sphere2" => Ok(Manifold::Sphere2),
            "hyperbolic2" => Ok(Manifold::Hyperbolic2),
            "euclidean" => {
                let mut dim = 2;
                for kv in rest.split(',').filter(|s| !s.is_empty()) {
                    match kv.split_once('=') {
                        Some(("dim", v)) => {
                            dim = v
                                .trim()
                                .parse()
                                .map_err(|_| Error::Config(format!("bad dimension `{v}`")))?
                        }
                        _ => return Err(Error::Config(format!("unknown manifold option `{kv}`"))),
                    }
                }
                if dim == 0 {
                    return Err(Error::Config("euclidean dimension must be positive".into()));
                }
                Ok(Manifold::Euclidean { dim })
            }
            other => Err(Error::Config(format!("unknown manifold `{other}`"))),
        }
    }

    /// Names of the chart coordinates, as used in boundary expressions.
    pub fn coord_names(&self) -> Vec<String> {
        match self {
            Manifold::Euclidean { dim } => (1..=*dim).map(|i| format!("x{i}")).collect(),
            Manifold::Sphere2 => vec!["theta".into(), "phi".into()],
            Manifold::Hyperbolic2 => vec!["x".into(), "y".into()],
        }
    }

    /// Upper bound on the absolute sectional curvature.
    pub fn curvature_bound(&self) -> f64 {
        match self {
            Manifold::Euclidean { .. } => 0.0,
            Manifold::Sphere2 | Manifold::Hyperbolic2 => 1.0,
        }
    }

    pub fn convexity_radius(&self, _x: &Point) -> f64 {
        match self {
            Manifold::Sphere2 => PI / 2.0,
            Manifold::Euclidean { .. } | Manifold::Hyperbolic2 => RADIUS_CAP,
        }
    }

    pub fn in_chart(&self, coords: &[f64]) -> bool {
        if coords.len() != self.dim() || coords.iter().any(|c| !c.is_finite()) {
            return false;
        }
        match self {
            Manifold::Euclidean { .. } => true,
            Manifold::Sphere2 => {
                coords[0] > 0.0 && coords[0] < PI && coords[1] > -PI && coords[1] < PI
            }
            Manifold::Hyperbolic2 => coords[1] > 0.0,
        }
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        if !self.in_chart(&x.coords) {
            return Err(Error::OutsideChart {
                manifold: self.name(),
                coords: x.to_vec(),
            });
        }
        Ok(())
    }

    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        let p = Point::new(coords);
        self.check_point(&p)?;
        Ok(p)
    }

    pub fn tangent(&self, base: &Point, comps: &[f64]) -> Result<TangentVector> {
        self.check_point(base)?;
        if comps.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: comps.len(),
            });
        }
        Ok(TangentVector::new(base, comps))
    }

    /// Diagonal of the metric tensor at `x`.
    pub fn metric_diag(&self, x: &Point) -> Coords {
        match self {
            Manifold::Euclidean { dim } => smallvec![1.0; *dim],
            Manifold::Sphere2 => {
                let s = x.coords[0].sin();
                smallvec![1.0, s * s]
            }
            Manifold::Hyperbolic2 => {
                let y = x.coords[1];
                let g = 1.0 / (y * y);
                smallvec![g, g]
            }
        }
    }

    /// Inner product of chart components `a`, `b` in the tangent space at `x`.
    pub fn inner_at(&self, x: &Point, a: &[f64], b: &[f64]) -> f64 {
        let g = self.metric_diag(x);
        g.iter().zip(a).zip(b).map(|((g, a), b)| g * a * b).sum()
    }

    pub fn norm_at(&self, x: &Point, a: &[f64]) -> f64 {
        self.inner_at(x, a, a).max(0.0).sqrt()
    }

    /// The Riemannian metric `<u, v>_x`.
    pub fn metric(&self, x: &Point, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        let probe = TangentVector::zero(x);
        same_base(&probe, u)?;
        same_base(&probe, v)?;
        Ok(self.inner_at(x, &u.comps, &v.comps))
    }

    pub fn inner(&self, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        same_base(u, v)?;
        Ok(self.inner_at(&u.base, &u.comps, &v.comps))
    }

    pub fn norm(&self, v: &TangentVector) -> f64 {
        self.norm_at(&v.base, &v.comps)
    }

    /// Raises an index: converts a differential (covector) into the metric gradient.
    pub fn sharp(&self, x: &Point, differential: &[f64]) -> Coords {
        let g = self.metric_diag(x);
        differential.iter().zip(&g).map(|(d, g)| d / g).collect()
    }

    /// Tangent vector from coefficients in the orthonormal frame `e_i = d_i / sqrt(g_ii)`.
    pub fn from_orthonormal(&self, x: &Point, coeffs: &[f64]) -> TangentVector {
        let g = self.metric_diag(x);
        let comps: Coords = coeffs.iter().zip(&g).map(|(c, g)| c / g.sqrt()).collect();
        TangentVector {
            base: x.clone(),
            comps,
        }
    }

    /// Coefficients of `v` in the orthonormal coordinate frame.
    pub fn to_orthonormal(&self, v: &TangentVector) -> Coords {
        let g = self.metric_diag(&v.base);
        v.comps.iter().zip(&g).map(|(c, g)| c * g.sqrt()).collect()
    }

    pub fn christoffel(&self, x: &Point) -> Result<Christoffel> {
        self.check_point(x)?;
        Ok(self.christoffel_unchecked(&x.coords))
    }

    fn christoffel_unchecked(&self, c: &[f64]) -> Christoffel {
        let mut g = Christoffel::zeros(self.dim());
        match self {
            Manifold::Euclidean { .. } => {}
            Manifold::Sphere2 => {
                let (s, co) = c[0].sin_cos();
                g.set_sym(0, 1, 1, -s * co);
                g.set_sym(1, 0, 1, co / s);
            }
            Manifold::Hyperbolic2 => {
                let inv = 1.0 / c[1];
                g.set_sym(0, 0, 1, -inv);
                g.set_sym(1, 0, 0, inv);
                g.set_sym(1, 1, 1, -inv);
            }
        }
        g
    }

    /// Geodesic acceleration `-Gamma^k_{ij} v^i v^j` in the chart.
    pub fn geodesic_accel(&self, coords: &[f64], v: &[f64]) -> Coords {
        let g = self.christoffel_unchecked(coords);
        g.contract(v, v).into_iter().map(|a| -a).collect()
    }

    /// Integrates the geodesic equation from `x` with initial velocity `v` up to time `t`
    /// and returns the full state trajectory (positions followed by velocities).
    pub fn geodesic_trajectory(
        &self,
        x: &Point,
        v: &TangentVector,
        t: f64,
        opts: &OdeOptions,
        record: bool,
    ) -> Result<Trajectory> {
        self.check_point(x)?;
        same_base(&TangentVector::zero(x), v)?;
        let n = self.dim();
        let mut y0 = x.to_vec();
        y0.extend_from_slice(&v.comps);
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            let (pos, vel) = y.split_at(n);
            dy[..n].copy_from_slice(vel);
            let acc = self.geodesic_accel(pos, vel);
            dy[n..].copy_from_slice(&acc);
        };
        ode::integrate(rhs, &y0, 0.0, t, opts, |y| self.in_chart(&y[..n]), record)
    }

    /// `gamma(t)` for the geodesic with `gamma(0) = x`, `gamma'(0) = v`, by Runge-Kutta
    /// integration in the chart (exact for Euclidean space).
    pub fn geodesic(&self, x: &Point, v: &TangentVector, t: f64) -> Result<Point> {
        self.check_point(x)?;
        same_base(&TangentVector::zero(x), v)?;
        if let Manifold::Euclidean { .. } = self {
            return Ok(Point {
                coords: x.coords.iter().zip(&v.comps).map(|(a, b)| a + t * b).collect(),
            });
        }
        if v.is_zero() || t == 0.0 {
            return Ok(x.clone());
        }
        let opts = OdeOptions {
            tol: TOL_ODE,
            ..OdeOptions::default()
        };
        let traj = self.geodesic_trajectory(x, v, t, &opts, false)?;
        Ok(Point::new(&traj.last()[..self.dim()]))
    }

    /// Exponential map, evaluated in closed form.
    pub fn exp(&self, x: &Point, v: &TangentVector) -> Result<Point> {
        self.check_point(x)?;
        same_base(&TangentVector::zero(x), v)?;
        self.exp_unchecked(x, &v.comps)
    }

    pub(crate) fn exp_unchecked(&self, x: &Point, v: &[f64]) -> Result<Point> {
        if v.iter().all(|c| *c == 0.0) {
            return Ok(x.clone());
        }
        let coords = match self {
            Manifold::Euclidean { .. } => x.coords.iter().zip(v).map(|(a, b)| a + b).collect(),
            Manifold::Sphere2 => sphere::exp(&x.coords, v)?,
            Manifold::Hyperbolic2 => hyperbolic::exp(&x.coords, v),
        };
        let p = Point { coords };
        if !self.in_chart(&p.coords) {
            return Err(Error::ChartExit { t: 1.0 });
        }
        Ok(p)
    }

    /// Logarithm map `exp_x^{-1} y`.
    ///
    /// On the sphere the closed form is verified by a round trip and falls back to Newton
    /// shooting on the integrated geodesic when the round trip is inaccurate.
    pub fn log(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        self.check_point(x)?;
        self.check_point(y)?;
        let comps: Coords = match self {
            Manifold::Euclidean { .. } => y.coords.iter().zip(&x.coords).map(|(b, a)| b - a).collect(),
            Manifold::Hyperbolic2 => hyperbolic::log(&x.coords, &y.coords),
            Manifold::Sphere2 => {
                let d = sphere::distance(&x.coords, &y.coords);
                if d >= PI - 1e-9 {
                    return Err(Error::NotInConvexBall { distance: d });
                }
                let comps = sphere::log(&x.coords, &y.coords);
                if sphere::round_trip_error(&x.coords, &comps, &y.coords) > 1e-10 {
                    return self.log_shooting(x, y, &comps);
                }
                comps
            }
        };
        Ok(TangentVector {
            base: x.clone(),
            comps,
        })
    }

    /// Newton shooting on `v -> geodesic(x, v, 1) - y` with a finite-difference Jacobian.
    pub fn log_shooting(&self, x: &Point, y: &Point, guess: &[f64]) -> Result<TangentVector> {
        let n = self.dim();
        let mut v = TangentVector::new(x, guess);
        let mut residual = f64::INFINITY;
        for _ in 0..30 {
            let end = self.geodesic(x, &v, 1.0)?;
            let r: Vec<f64> = end.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect();
            residual = r.iter().fold(0.0f64, |m, a| m.max(a.abs()));
            if residual < 1e-11 {
                return Ok(v);
            }
            let mut jac = vec![vec![0.0; n]; n];
            for j in 0..n {
                let h = 1e-6 * (1.0 + v.comps[j].abs());
                let mut vp = v.clone();
                vp.comps[j] += h;
                let mut vm = v.clone();
                vm.comps[j] -= h;
                let ep = self.geodesic(x, &vp, 1.0)?;
                let em = self.geodesic(x, &vm, 1.0)?;
                for i in 0..n {
                    jac[i][j] = (ep.coords[i] - em.coords[i]) / (2.0 * h);
                }
            }
            let step = solve_dense(jac, r).ok_or(Error::ShootingFailed { residual })?;
            for i in 0..n {
                v.comps[i] -= step[i];
            }
        }
        Err(Error::ShootingFailed { residual })
    }

    /// Riemannian distance.
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        match self {
            Manifold::Euclidean { .. } => x.chart_distance(y),
            Manifold::Sphere2 => sphere::distance(&x.coords, &y.coords),
            Manifold::Hyperbolic2 => hyperbolic::distance(&x.coords, &y.coords),
        }
    }

    /// Parallel transport of `v` from `x` to `y` along the minimizing geodesic, obtained by
    /// integrating `D_t V = 0` together with the geodesic equation.
    pub fn parallel_transport(&self, x: &Point, y: &Point, v: &TangentVector) -> Result<TangentVector> {
        self.check_point(y)?;
        same_base(&TangentVector::zero(x), v)?;
        if let Manifold::Euclidean { .. } = self {
            return Ok(TangentVector::new(y, &v.comps));
        }
        if x.chart_distance(y) == 0.0 {
            return Ok(v.clone());
        }
        let dir = self.log(x, y)?;
        let n = self.dim();
        let mut y0 = x.to_vec();
        y0.extend_from_slice(&dir.comps);
        y0.extend_from_slice(&v.comps);
        let rhs = |_t: f64, s: &[f64], ds: &mut [f64]| {
            let pos = &s[..n];
            let vel = &s[n..2 * n];
            let field = &s[2 * n..];
            let gam = self.christoffel_unchecked(pos);
            let acc = gam.contract(vel, vel);
            let trans = gam.contract(vel, field);
            for k in 0..n {
                ds[k] = vel[k];
                ds[n + k] = -acc[k];
                ds[2 * n + k] = -trans[k];
            }
        };
        let opts = OdeOptions {
            tol: TOL_ODE,
            ..OdeOptions::default()
        };
        let traj = ode::integrate(rhs, &y0, 0.0, 1.0, &opts, |s| self.in_chart(&s[..n]), false)?;
        Ok(TangentVector::new(y, &traj.last()[2 * n..]))
    }

    /// Radius below which the distance-squared Hessian bound applies around `center`:
    /// `min{r(center), R, pi / (2 sqrt(k0))}` with `R` supplied by the caller.
    pub fn hess_radius(&self, center: &Point, curvature_radius: Option<f64>) -> f64 {
        let k0 = self.curvature_bound();
        let curv = if k0 > 0.0 { PI / (2.0 * k0.sqrt()) } else { f64::INFINITY };
        self.convexity_radius(center)
            .min(curvature_radius.unwrap_or(f64::INFINITY))
            .min(curv)
    }

    /// `c(z) = min{2, 2 sqrt(k0) d cot(sqrt(k0) d)}` with `d = d(center, z)`.
    pub fn hess_lower_bound(&self, center: &Point, z: &Point) -> f64 {
        let k0 = self.curvature_bound();
        let d = self.distance(center, z);
        if k0 == 0.0 || d == 0.0 {
            return 2.0;
        }
        let a = k0.sqrt() * d;
        2.0f64.min(2.0 * a / a.tan())
    }

    /// Second derivative of `t -> d^2(center, exp_z(t w))` at `t = 0`, by a central
    /// five-point stencil with step `H_FD / |w|`.
    pub fn hessian_dist_sq(&self, center: &Point, z: &Point, w: &TangentVector) -> Result<f64> {
        self.hessian_dist_sq_within(center, z, w, None)
    }

    pub fn hessian_dist_sq_within(
        &self,
        center: &Point,
        z: &Point,
        w: &TangentVector,
        curvature_radius: Option<f64>,
    ) -> Result<f64> {
        self.check_point(center)?;
        self.check_point(z)?;
        same_base(&TangentVector::zero(z), w)?;
        let radius = self.hess_radius(center, curvature_radius);
        let d = self.distance(center, z);
        if d >= radius {
            return Err(Error::RadiusPrecondition { distance: d, radius });
        }
        let wn = self.norm(w);
        if wn == 0.0 {
            return Ok(0.0);
        }
        let h = H_FD / wn;
        let f = |s: f64| -> Result<f64> {
            let p = self.exp(z, &w.scale(s))?;
            let dist = self.distance(center, &p);
            Ok(dist * dist)
        };
        let f0 = d * d;
        let (fp1, fm1, fp2, fm2) = (f(h)?, f(-h)?, f(2.0 * h)?, f(-2.0 * h)?);
        Ok((-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h))
    }
}

/// Gaussian elimination with partial pivoting for the small systems in this crate.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests;
