//! Sets `S = {psi <= 0}` cut out by a boundary submersion, their cones and sampling
//! verifiers.

mod comb;
mod cone;
mod reach;

pub use comb::{CombSet, Segment};
pub use cone::{ConeKind, ConeSpec};
pub use reach::{estimate_reach, ReachEstimate, ReachOptions};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::expr::PsiExpr;
use crate::manifold::{Manifold, Point, TangentVector};
use crate::sampling;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solidity {
    /// Points with `psi < 0` exist arbitrarily close to every boundary point.
    Solid,
    /// `S` is the zero set itself.
    Thin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

/// On-disk description of a set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetConfig {
    pub psi: String,
    pub solidity: Solidity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_sample: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifold: Option<Manifold>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxSet {
    pub manifold: Manifold,
    pub psi: PsiExpr,
    pub solidity: Solidity,
    /// Optional modulus estimate used in place of sampling when present.
    pub phi_bound: Option<f64>,
}

/// Either a submersion set or the comb, which is only a membership oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    Prox(ProxSet),
    Comb(CombSet),
}

impl SetSpec {
    /// Builtin sets by name, e.g. `sphere-cap:theta0=2.0944` or `comb:N=20`.
    pub fn builtin(name: &str) -> Result<Self> {
        let (head, params) = match name.split_once(':') {
            Some((h, p)) => (h, parse_params(p)?),
            None => (name, Vec::new()),
        };
        let get = |key: &str, default: f64| -> Result<f64> {
            match params.iter().find(|(k, _)| k == key) {
                Some((_, v)) => Ok(*v),
                None => Ok(default),
            }
        };
        let known: &[&str] = match head {
            "sphere-cap" => &["theta0"],
            "hyperbolic-strip" => &["ymin", "ymax"],
            "comb" => &["N"],
            _ => &[],
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown parameter `{k}` for `{head}`")));
        }
        let e2 = Manifold::euclidean(2);
        let set = match head {
            "sphere-cap" => {
                let theta0 = get("theta0", 2.0 * PI / 3.0)?;
                if !(theta0 > 0.0 && theta0 < PI) {
                    return Err(Error::Config(format!("theta0 = {theta0} outside (0, pi)")));
                }
                ProxSet::parse(Manifold::Sphere2, &format!("theta - {theta0:?}"), Solidity::Solid)?
            }
            "hyperbolic-strip" => {
                let (lo, hi) = (get("ymin", 1.0)?, get("ymax", 2.0)?);
                if !(lo > 0.0 && hi > lo) {
                    return Err(Error::Config(format!("need 0 < ymin < ymax, got {lo}, {hi}")));
                }
                ProxSet::parse(
                    Manifold::Hyperbolic2,
                    &format!("(y - {lo:?})*(y - {hi:?})"),
                    Solidity::Solid,
                )?
            }
            "euclidean-halfplane" => ProxSet::parse(e2, "x2", Solidity::Solid)?,
            "disk-complement" => ProxSet::parse(e2, "1 - (x1*x1 + x2*x2)", Solidity::Solid)?,
            "euclidean-line" => ProxSet::parse(e2, "x2", Solidity::Thin)?,
            "comb" => {
                let n = get("N", 10.0)?;
                if !(n >= 1.0 && n.fract() == 0.0) {
                    return Err(Error::Config(format!("comb N must be a positive integer, got {n}")));
                }
                return Ok(SetSpec::Comb(CombSet::new(n as usize)));
            }
            _ => return Err(Error::Config(format!("unknown builtin set `{name}`"))),
        };
        Ok(SetSpec::Prox(set))
    }

    pub fn manifold(&self) -> Manifold {
        match self {
            SetSpec::Prox(s) => s.manifold,
            SetSpec::Comb(_) => Manifold::euclidean(2),
        }
    }

    pub fn as_prox(&self) -> Result<&ProxSet> {
        match self {
            SetSpec::Prox(s) => Ok(s),
            SetSpec::Comb(_) => Err(Error::Unsupported("the comb set".into())),
        }
    }
}

fn parse_params(s: &str) -> Result<Vec<(String, f64)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{p}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad number in `{p}`")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Result of a sampled proximal normal inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximalCheck {
    pub ok: bool,
    /// `max <xi, log(x, y)> - sigma d^2(x, y)` over the samples.
    pub worst_violation: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionCheck {
    pub ok: bool,
    pub directions: usize,
    /// Directions for which `v in T_S and v in T_Shat` disagreed with `v in T_x dS`.
    pub counterexamples: Vec<Vec<f64>>,
    /// `|g + g_hat|`: the two proximal normal rays must be opposite.
    pub normal_mismatch: f64,
}

const TOL_CONE: f64 = 1e-10;

impl ProxSet {
    pub fn new(manifold: Manifold, psi: PsiExpr, solidity: Solidity) -> Result<Self> {
        if psi.dim() != manifold.dim() {
            return Err(Error::DimensionMismatch {
                expected: manifold.dim(),
                got: psi.dim(),
            });
        }
        Ok(Self {
            manifold,
            psi,
            solidity,
            phi_bound: None,
        })
    }

    pub fn parse(manifold: Manifold, source: &str, solidity: Solidity) -> Result<Self> {
        let psi = PsiExpr::parse(source, &manifold.coord_names())?;
        Self::new(manifold, psi, solidity)
    }

    /// Builds a set from config, negating `psi` when the interior sample has `psi > 0`.
    pub fn from_config(config: &SetConfig, default_manifold: Manifold) -> Result<Self> {
        let manifold = config.manifold.unwrap_or(default_manifold);
        let mut set = Self::parse(manifold, &config.psi, config.solidity)?;
        match (&config.interior_sample, config.solidity) {
            (Some(sample), _) => {
                let p = manifold.point(sample)?;
                let v = set.psi_at(&p)?;
                if v == 0.0 && config.solidity == Solidity::Solid {
                    return Err(Error::Config("interior sample lies on the boundary".into()));
                }
                if v > 0.0 && config.solidity == Solidity::Solid {
                    set.psi = set.psi.negated();
                }
            }
            (None, Solidity::Solid) => {
                return Err(Error::Config("solid sets need an interior_sample".into()));
            }
            (None, Solidity::Thin) => {}
        }
        Ok(set)
    }

    pub fn with_phi_bound(mut self, phi: f64) -> Self {
        self.phi_bound = Some(phi);
        self
    }

    pub fn psi_at(&self, x: &Point) -> Result<f64> {
        self.psi.value(&x.coords)
    }

    /// Metric gradient `g^{-1} d psi`.
    pub fn gradient(&self, x: &Point) -> Result<TangentVector> {
        let d = self.psi.partials(&x.coords)?;
        Ok(TangentVector {
            base: x.clone(),
            comps: self.manifold.sharp(x, &d),
        })
    }

    /// Boundary tolerance `1e-9 (1 + |grad psi|)`, so classification is insensitive to the
    /// scale of `psi`.
    pub fn tol_bd(&self, x: &Point) -> f64 {
        let g = self.gradient(x).map(|g| self.manifold.norm(&g)).unwrap_or(0.0);
        1e-9 * (1.0 + if g.is_finite() { g } else { 0.0 })
    }

    pub fn classify(&self, x: &Point) -> Result<Region> {
        self.manifold.check_point(x)?;
        let v = self.psi_at(x)?;
        let tol = self.tol_bd(x);
        Ok(if v.abs() <= tol {
            Region::Boundary
        } else if self.solidity == Solidity::Thin {
            Region::Exterior
        } else if v < 0.0 {
            Region::Interior
        } else {
            Region::Exterior
        })
    }

    pub fn contains(&self, x: &Point) -> bool {
        matches!(self.classify(x), Ok(Region::Interior | Region::Boundary))
    }

    /// Outward unit normal `grad psi / |grad psi|`.
    pub fn unit_normal(&self, x: &Point) -> Result<TangentVector> {
        let g = self.gradient(x)?;
        let n = self.manifold.norm(&g);
        if !(n > 1e-14) || !n.is_finite() {
            return Err(Error::VanishingGradient { coords: x.to_vec() });
        }
        Ok(g.scale(1.0 / n))
    }

    pub fn proximal_normal_cone(&self, x: &Point) -> Result<ConeSpec> {
        match self.classify(x)? {
            Region::Exterior => Err(Error::ExteriorPoint { psi: self.psi_at(x)? }),
            Region::Interior => Ok(ConeSpec::zero(self.manifold, x)),
            Region::Boundary => {
                let g = self.gradient(x)?;
                match self.solidity {
                    Solidity::Solid => ConeSpec::ray(self.manifold, &g),
                    Solidity::Thin => ConeSpec::line(self.manifold, &g),
                }
            }
        }
    }

    pub fn bouligand_tangent_cone(&self, x: &Point) -> Result<ConeSpec> {
        Ok(self.proximal_normal_cone(x)?.polar())
    }

    /// Closure of the complement, cut out by `-psi`.
    pub fn complement(&self) -> Result<Self> {
        if self.solidity == Solidity::Thin {
            return Err(Error::ThinSet);
        }
        Ok(Self {
            manifold: self.manifold,
            psi: self.psi.negated(),
            solidity: Solidity::Solid,
            phi_bound: None,
        })
    }

    /// Newton iteration onto the zero set along the metric gradient:
    /// `p <- exp_p(-psi grad psi / |grad psi|^2)`, halving steps that increase `|psi|`.
    pub fn foot_point(&self, z: &Point) -> Result<Point> {
        let m = &self.manifold;
        let mut p = z.clone();
        let mut v = self.psi_at(&p)?;
        for _ in 0..100 {
            let tol = self.tol_bd(&p);
            if v.abs() <= 1e-3 * tol {
                return Ok(p);
            }
            let g = self.gradient(&p)?;
            let gg = m.inner(&g, &g)?;
            if !(gg > 1e-28) || !gg.is_finite() {
                return Err(Error::VanishingGradient { coords: p.to_vec() });
            }
            let mut step = g.scale(-v / gg);
            let mut accepted = false;
            for _ in 0..40 {
                if let Ok(q) = m.exp(&p, &step) {
                    let w = self.psi_at(&q)?;
                    if w.abs() < v.abs() {
                        p = q;
                        v = w;
                        accepted = true;
                        break;
                    }
                }
                step = step.scale(0.5);
            }
            if !accepted {
                return if v.abs() <= tol { Ok(p) } else { Err(Error::NoConvergence { max_iter: 100 }) };
            }
        }
        if v.abs() <= self.tol_bd(&p) {
            Ok(p)
        } else {
            Err(Error::NoConvergence { max_iter: 100 })
        }
    }

    /// Random points of `S` within distance `radius` of `x`. For thin sets samples are
    /// pushed onto the zero set.
    pub fn sample_near(&self, x: &Point, radius: f64, n: usize, seed: u64) -> Vec<Point> {
        let m = &self.manifold;
        let mut rng = sampling::rng(seed);
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0;
        while out.len() < n && attempts < 20 * n.max(1) {
            attempts += 1;
            let v = sampling::tangent_in_ball(&mut rng, m, x, radius);
            let Ok(y) = m.exp(x, &v) else { continue };
            let y = match self.solidity {
                Solidity::Solid => y,
                Solidity::Thin => match self.foot_point(&y) {
                    Ok(f) if m.distance(x, &f) <= radius => f,
                    _ => continue,
                },
            };
            if self.contains(&y) {
                out.push(y);
            }
        }
        out
    }

    /// Random boundary points within roughly `radius` of `center`.
    pub fn sample_boundary(&self, center: &Point, radius: f64, n: usize, seed: u64) -> Vec<Point> {
        let m = &self.manifold;
        let mut rng = sampling::rng(seed);
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0;
        while out.len() < n && attempts < 20 * n.max(1) {
            attempts += 1;
            let v = sampling::tangent_in_ball(&mut rng, m, center, radius);
            let Ok(y) = m.exp(center, &v) else { continue };
            if let Ok(p) = self.foot_point(&y) {
                if m.distance(center, &p) <= 2.0 * radius && self.classify(&p) == Ok(Region::Boundary) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Checks `<xi, log(x, y)> <= sigma d^2(x, y)` over samples `y` of `S` near `x`.
    pub fn verify_proximal_inequality(
        &self,
        x: &Point,
        xi: &TangentVector,
        sigma: f64,
        n_samples: usize,
        radius: f64,
        seed: u64,
    ) -> Result<ProximalCheck> {
        let m = &self.manifold;
        let ys = self.sample_near(x, radius, n_samples, seed);
        let mut worst = f64::NEG_INFINITY;
        let mut used = 0;
        for y in &ys {
            let d = m.distance(x, y);
            if d == 0.0 {
                continue;
            }
            let l = m.log(x, y)?;
            worst = worst.max(m.inner(xi, &l)? - sigma * d * d);
            used += 1;
        }
        if used == 0 {
            return Err(Error::NoFeasibleSamples);
        }
        let tol = 1e-10 * (1.0 + m.norm(xi));
        Ok(ProximalCheck {
            ok: worst <= tol,
            worst_violation: worst,
            samples: used,
        })
    }

    /// `dist(log(x, y), T^B_S(x)) / d^2(x, y)`.
    pub fn phi_defect(&self, x: &Point, y: &Point) -> Result<f64> {
        let m = &self.manifold;
        let d = m.distance(x, y);
        if d == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        let cone = self.bouligand_tangent_cone(x)?;
        Ok(cone.distance_to(&m.log(x, y)?)? / (d * d))
    }

    /// Empirical modulus: the largest `phi_defect(p, y)` over boundary points `p` near `x`
    /// and set points `y` on a polar grid of radius `radius` around each. Returns
    /// `phi_bound` when set.
    pub fn estimate_phi(&self, x: &Point, radius: f64, n: usize, seed: u64) -> Result<f64> {
        if let Some(phi) = self.phi_bound {
            return Ok(phi);
        }
        let mut bases = vec![];
        if self.classify(x)? == Region::Boundary {
            bases.push(x.clone());
        }
        bases.extend(self.sample_boundary(x, radius, 8, seed ^ 0x9e37));
        let mut best = 0.0f64;
        for p in &bases {
            for y in self.polar_grid(p, radius, n) {
                best = best.max(self.phi_defect(p, &y)?);
            }
        }
        Ok(best)
    }

    /// Points of `S` on a polar grid of about `n` nodes in the tangent ball at `x`, plus
    /// the boundary foot points of the grid nodes.
    fn polar_grid(&self, x: &Point, radius: f64, n: usize) -> Vec<Point> {
        let m = &self.manifold;
        let rings = ((n as f64).sqrt().ceil() as usize).max(2);
        let angles = (n / rings).max(8).next_multiple_of(4);
        let mut out = vec![];
        for k in 1..=rings {
            let r = radius * k as f64 / rings as f64;
            for j in 0..angles {
                let a = 2.0 * PI * j as f64 / angles as f64;
                let mut e = vec![0.0; m.dim()];
                e[0] = r * a.cos();
                if m.dim() > 1 {
                    e[1] = r * a.sin();
                }
                let Ok(y) = m.exp(x, &m.from_orthonormal(x, &e)) else { continue };
                // The defect peaks on the boundary, which a grid alone never hits.
                let foot = self.foot_point(&y).ok().filter(|f| m.distance(x, f) <= radius);
                let candidates = match self.solidity {
                    Solidity::Solid => [Some(y), foot],
                    Solidity::Thin => [foot, None],
                };
                for y in candidates.into_iter().flatten() {
                    if self.contains(&y) && m.distance(x, &y) > 1e-6 * radius {
                        out.push(y);
                    }
                }
            }
        }
        out
    }

    /// Checks `T_S(x) cap T_Shat(x) = T_x dS` on sampled directions, half of which are
    /// projected exactly onto the tangent space of the boundary.
    pub fn tangent_intersection_check(&self, x: &Point, n_dirs: usize, seed: u64) -> Result<IntersectionCheck> {
        let m = &self.manifold;
        let hat = self.complement()?;
        let t_s = self.bouligand_tangent_cone(x)?;
        let t_hat = hat.bouligand_tangent_cone(x)?;
        let g = self.unit_normal(x)?;
        let tangent_space = ConeSpec::hyperplane(*m, &g)?;
        let g_hat = hat.unit_normal(x)?;
        let normal_mismatch = m.norm(&g.add(&g_hat)?);

        let mut rng = sampling::rng(seed);
        let mut counterexamples = vec![];
        for k in 0..n_dirs {
            let mut v = sampling::tangent_of_norm(&mut rng, m, x, 1.0);
            if k % 2 == 1 {
                v = tangent_space.project(&v)?;
            }
            let in_s = t_s.distance_to(&v)? <= TOL_CONE;
            let in_hat = t_hat.distance_to(&v)? <= TOL_CONE;
            let in_t = tangent_space.distance_to(&v)? <= TOL_CONE;
            if (in_s && in_hat) != in_t {
                counterexamples.push(v.comps.to_vec());
            }
        }
        Ok(IntersectionCheck {
            ok: counterexamples.is_empty() && normal_mismatch <= TOL_CONE,
            directions: n_dirs,
            counterexamples,
            normal_mismatch,
        })
    }

    /// Sampled solidity check: some point within `radius` of boundary point `x`
    /// has `psi < 0`.
    pub fn check_solid_at(&self, x: &Point, radius: f64, n: usize, seed: u64) -> Result<bool> {
        let m = &self.manifold;
        let mut rng = sampling::rng(seed);
        for _ in 0..n {
            let v = sampling::tangent_in_ball(&mut rng, m, x, radius);
            if let Ok(y) = m.exp(x, &v) {
                if self.classify(&y)? == Region::Interior {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Smallest `|grad psi|` over boundary samples near `center`; positive for a submersion.
    pub fn submersion_margin(&self, center: &Point, radius: f64, n: usize, seed: u64) -> Result<f64> {
        let pts = self.sample_boundary(center, radius, n, seed);
        if pts.is_empty() {
            return Err(Error::NoFeasibleSamples);
        }
        let mut min = f64::INFINITY;
        for p in &pts {
            min = min.min(self.manifold.norm(&self.gradient(p)?));
        }
        Ok(min)
    }
}
