//! Seeded random points and tangent vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::manifold::{Manifold, Point, TangentVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed unit vector in R^n.
pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Tangent vector at `x` with metric norm exactly `radius` in a uniformly random direction.
pub fn tangent_of_norm<R: Rng>(
    rng: &mut R,
    manifold: &Manifold,
    x: &Point,
    radius: f64,
) -> TangentVector {
    let dir = unit_vector(rng, manifold.dim());
    manifold.from_orthonormal(x, &dir.iter().map(|a| a * radius).collect::<Vec<_>>())
}

/// Tangent vector at `x` uniformly distributed in the metric ball of the given radius.
pub fn tangent_in_ball<R: Rng>(
    rng: &mut R,
    manifold: &Manifold,
    x: &Point,
    radius: f64,
) -> TangentVector {
    let n = manifold.dim() as f64;
    let r = radius * rng.gen::<f64>().powf(1.0 / n);
    tangent_of_norm(rng, manifold, x, r)
}
