//! Empirical reach: the largest ball around a point on which the projection stays
//! single-valued.

use serde::{Deserialize, Serialize};

use crate::manifold::Point;
use crate::projection::{ProjectOptions, Projector};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachOptions {
    pub grid_radius: f64,
    /// Number of concentric test rings; ring spacing and arc spacing are both
    /// `grid_radius / grid_n`.
    pub grid_n: usize,
    /// A step between neighbouring ring samples whose projections move more than
    /// `jump_ratio` times as far (and by more than half the distance to the set) is read
    /// as crossing the locus of non-unique projection.
    pub jump_ratio: f64,
    pub project: ProjectOptions,
}

impl ReachOptions {
    pub fn new(grid_radius: f64, grid_n: usize) -> Self {
        Self {
            grid_radius,
            grid_n,
            jump_ratio: 10.0,
            project: ProjectOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachEstimate {
    /// Largest ring radius that passed (`grid_radius` when every ring passed).
    pub reach: f64,
    pub capped: bool,
    /// First failing ring and why.
    pub failed_radius: Option<f64>,
    pub failure: Option<String>,
    pub projections: usize,
}

/// Tests rings `r_k = grid_radius k / grid_n` around `x` and returns the last radius at
/// which every sample had a unique projection and no neighbouring pair jumped.
pub fn estimate_reach<P: Projector + ?Sized>(set: &P, x: &Point, opts: &ReachOptions) -> Result<ReachEstimate> {
    let m = set.manifold();
    m.check_point(x)?;
    let n = m.dim();
    let spacing = opts.grid_radius / opts.grid_n as f64;
    let mut reach = 0.0;
    let mut projections = 0;
    for k in 1..=opts.grid_n {
        let r = spacing * k as f64;
        let count = ((2.0 * std::f64::consts::PI * r / spacing).ceil() as usize).max(8);
        let mut ring = vec![];
        for j in 0..count {
            let a = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
            let mut e = vec![0.0; n];
            e[0] = r * a.cos();
            if n > 1 {
                e[1] = r * a.sin();
            }
            let Ok(z) = m.exp(x, &m.from_orthonormal(x, &e)) else {
                ring.push(None);
                continue;
            };
            let p = set.project(&z, &opts.project)?;
            projections += 1;
            if !p.is_unique() {
                return Ok(fail(reach, r, format!("ambiguous projection at {:?}", z.to_vec()), projections));
            }
            ring.push(Some((z, p)));
        }
        for j in 0..ring.len() {
            let (Some((z1, p1)), Some((z2, p2))) = (&ring[j], &ring[(j + 1) % ring.len()]) else {
                continue;
            };
            let dz = m.distance(z1, z2);
            let dp = m.distance(&p1.point, &p2.point);
            if dp > opts.jump_ratio * dz && dp > 0.5 * p1.dist.min(p2.dist) {
                return Ok(fail(
                    reach,
                    r,
                    format!("projection jumps by {dp:.3e} between {:?} and {:?}", z1.to_vec(), z2.to_vec()),
                    projections,
                ));
            }
        }
        reach = r;
    }
    Ok(ReachEstimate {
        reach,
        capped: true,
        failed_radius: None,
        failure: None,
        projections,
    })
}

fn fail(reach: f64, r: f64, why: String, projections: usize) -> ReachEstimate {
    ReachEstimate {
        reach,
        capped: false,
        failed_radius: Some(r),
        failure: Some(why),
        projections,
    }
}
