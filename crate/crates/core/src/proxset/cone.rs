//! Closed convex cones in a tangent space, in the six shapes that occur as proximal normal
//! and Bouligand tangent cones of sets with a smooth boundary submersion.

use serde::{Deserialize, Serialize};

use crate::manifold::{same_base, Manifold, Point, TangentVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "g", rename_all = "lowercase")]
pub enum ConeKind {
    Zero,
    Full,
    /// `{t g : t >= 0}`
    Ray(TangentVector),
    /// `{t g : t real}`
    Line(TangentVector),
    /// `{v : <v, g> <= 0}`
    HalfSpace(TangentVector),
    /// `{v : <v, g> = 0}`
    Hyperplane(TangentVector),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub manifold: Manifold,
    pub base: Point,
    pub kind: ConeKind,
}

fn unit(manifold: &Manifold, g: &TangentVector) -> Result<TangentVector> {
    let n = manifold.norm(g);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::VanishingGradient {
            coords: g.base.to_vec(),
        });
    }
    Ok(g.scale(1.0 / n))
}

impl ConeSpec {
    pub fn zero(manifold: Manifold, base: &Point) -> Self {
        Self {
            manifold,
            base: base.clone(),
            kind: ConeKind::Zero,
        }
    }

    pub fn full(manifold: Manifold, base: &Point) -> Self {
        Self {
            manifold,
            base: base.clone(),
            kind: ConeKind::Full,
        }
    }

    pub fn ray(manifold: Manifold, g: &TangentVector) -> Result<Self> {
        Self::with(manifold, g, ConeKind::Ray)
    }

    pub fn line(manifold: Manifold, g: &TangentVector) -> Result<Self> {
        Self::with(manifold, g, ConeKind::Line)
    }

    pub fn half_space(manifold: Manifold, g: &TangentVector) -> Result<Self> {
        Self::with(manifold, g, ConeKind::HalfSpace)
    }

    pub fn hyperplane(manifold: Manifold, g: &TangentVector) -> Result<Self> {
        Self::with(manifold, g, ConeKind::Hyperplane)
    }

    fn with(manifold: Manifold, g: &TangentVector, f: fn(TangentVector) -> ConeKind) -> Result<Self> {
        Ok(Self {
            manifold,
            base: g.base.clone(),
            kind: f(unit(&manifold, g)?),
        })
    }

    /// Unit generator or normal, if the cone has one.
    pub fn generator(&self) -> Option<&TangentVector> {
        match &self.kind {
            ConeKind::Zero | ConeKind::Full => None,
            ConeKind::Ray(g) | ConeKind::Line(g) | ConeKind::HalfSpace(g) | ConeKind::Hyperplane(g) => Some(g),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self.kind {
            ConeKind::Zero => "zero",
            ConeKind::Full => "full",
            ConeKind::Ray(_) => "ray",
            ConeKind::Line(_) => "line",
            ConeKind::HalfSpace(_) => "halfspace",
            ConeKind::Hyperplane(_) => "hyperplane",
        }
    }

    /// Polar cone `{w : <w, v> <= 0 for all v in C}`.
    pub fn polar(&self) -> Self {
        let kind = match &self.kind {
            ConeKind::Zero => ConeKind::Full,
            ConeKind::Full => ConeKind::Zero,
            ConeKind::Ray(g) => ConeKind::HalfSpace(g.clone()),
            ConeKind::HalfSpace(g) => ConeKind::Ray(g.clone()),
            ConeKind::Line(g) => ConeKind::Hyperplane(g.clone()),
            ConeKind::Hyperplane(g) => ConeKind::Line(g.clone()),
        };
        Self {
            manifold: self.manifold,
            base: self.base.clone(),
            kind,
        }
    }

    fn check(&self, v: &TangentVector) -> Result<()> {
        same_base(&TangentVector::zero(&self.base), v)
    }

    /// Nearest point of the cone to `v` in the metric at the base point.
    pub fn project(&self, v: &TangentVector) -> Result<TangentVector> {
        self.check(v)?;
        let m = &self.manifold;
        let along = |g: &TangentVector| m.inner_at(&self.base, &v.comps, &g.comps);
        let remove = |g: &TangentVector, c: f64| TangentVector {
            base: self.base.clone(),
            comps: v.comps.iter().zip(&g.comps).map(|(a, b)| a - c * b).collect(),
        };
        Ok(match &self.kind {
            ConeKind::Full => TangentVector::new(&self.base, &v.comps),
            ConeKind::Zero => TangentVector::zero(&self.base),
            ConeKind::Ray(g) => g.scale(along(g).max(0.0)),
            ConeKind::Line(g) => g.scale(along(g)),
            ConeKind::Hyperplane(g) => remove(g, along(g)),
            ConeKind::HalfSpace(g) => {
                let c = along(g);
                if c <= 0.0 {
                    TangentVector::new(&self.base, &v.comps)
                } else {
                    remove(g, c)
                }
            }
        })
    }

    /// Metric distance from `v` to the cone.
    pub fn distance_to(&self, v: &TangentVector) -> Result<f64> {
        let p = self.project(v)?;
        Ok(self.manifold.norm(&v.sub(&p)?))
    }

    /// Membership up to `tol`, measured as distance to the cone relative to `1 + |v|`.
    pub fn contains(&self, v: &TangentVector, tol: f64) -> Result<bool> {
        let d = self.distance_to(v)?;
        Ok(d <= tol * (1.0 + self.manifold.norm(v)))
    }

    /// A few elements spanning the cone, used by sampled polarity checks. For half-spaces
    /// and hyperplanes these are the generators of the cone as a convex hull of rays.
    pub fn extreme_rays(&self) -> Vec<TangentVector> {
        let n = self.manifold.dim();
        let basis: Vec<TangentVector> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                self.manifold.from_orthonormal(&self.base, &e)
            })
            .collect();
        let tangential = |g: &TangentVector| -> Vec<TangentVector> {
            basis
                .iter()
                .filter_map(|e| {
                    let c = self.manifold.inner_at(&self.base, &e.comps, &g.comps);
                    let t = e.sub(&g.scale(c)).ok()?;
                    (self.manifold.norm(&t) > 1e-8).then_some(t)
                })
                .flat_map(|t| [t.clone(), t.scale(-1.0)])
                .collect()
        };
        match &self.kind {
            ConeKind::Zero => vec![],
            ConeKind::Full => basis.iter().flat_map(|e| [e.clone(), e.scale(-1.0)]).collect(),
            ConeKind::Ray(g) => vec![g.clone()],
            ConeKind::Line(g) => vec![g.clone(), g.scale(-1.0)],
            ConeKind::HalfSpace(g) => {
                let mut out = tangential(g);
                out.push(g.scale(-1.0));
                out
            }
            ConeKind::Hyperplane(g) => tangential(g),
        }
    }
}
