//! The comb: base `[0,1] x {0}`, spine `{0} x [0,1]` and teeth `{1/n} x [0,1]`, `n <= N`.
//!
//! Not prox-regular at the spine in the limit, so it is handled as a union of segments
//! with exact nearest points rather than through a submersion.

use serde::{Deserialize, Serialize};

use crate::manifold::Point;
use crate::projection::{lex, Multiplicity, ProjectionResult};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Segment {
    pub fn nearest(&self, z: &[f64]) -> [f64; 2] {
        let d = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        let t = (((z[0] - self.a[0]) * d[0] + (z[1] - self.a[1]) * d[1]) / len2).clamp(0.0, 1.0);
        [self.a[0] + t * d[0], self.a[1] + t * d[1]]
    }

    fn length(&self) -> f64 {
        ((self.b[0] - self.a[0]).powi(2) + (self.b[1] - self.a[1]).powi(2)).sqrt()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombSet {
    pub teeth: usize,
    pub segments: Vec<Segment>,
}

impl CombSet {
    pub fn new(teeth: usize) -> Self {
        let mut segments = vec![
            Segment { a: [0.0, 0.0], b: [1.0, 0.0] },
            Segment { a: [0.0, 0.0], b: [0.0, 1.0] },
        ];
        for n in 1..=teeth {
            let x = 1.0 / n as f64;
            segments.push(Segment { a: [x, 0.0], b: [x, 1.0] });
        }
        Self { teeth, segments }
    }

    fn check(z: &Point) -> Result<()> {
        if z.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: z.dim(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, z: &Point) -> bool {
        z.dim() == 2 && self.segments.iter().any(|s| dist(&s.nearest(&z.coords), &z.coords) <= 1e-12)
    }

    /// Exact nearest points over all segments, with ties at relative precision `1e-12`.
    pub fn project_exact(&self, z: &Point) -> Result<ProjectionResult> {
        Self::check(z)?;
        let cands: Vec<([f64; 2], f64)> = self
            .segments
            .iter()
            .map(|s| {
                let p = s.nearest(&z.coords);
                (p, dist(&p, &z.coords))
            })
            .collect();
        Ok(collect(cands, 1e-12, 1e-9))
    }

    /// Brute force over points spaced `h` along each segment. Minimizers within `h` of
    /// the best distance and more than `2h` apart are reported as near-ties.
    pub fn project_grid(&self, z: &Point, h: f64) -> Result<ProjectionResult> {
        Self::check(z)?;
        if !(h > 0.0) {
            return Err(Error::Config(format!("grid spacing must be positive, got {h}")));
        }
        let mut cands = vec![];
        for s in &self.segments {
            let k = (s.length() / h).ceil().max(1.0) as usize;
            for i in 0..=k {
                let t = i as f64 / k as f64;
                let p = [s.a[0] + t * (s.b[0] - s.a[0]), s.a[1] + t * (s.b[1] - s.a[1])];
                cands.push((p, dist(&p, &z.coords)));
            }
        }
        let mut r = collect(cands, h, 2.0 * h);
        r.iterations = self.segments.len();
        Ok(r)
    }
}

fn collect(cands: Vec<([f64; 2], f64)>, tie: f64, merge: f64) -> ProjectionResult {
    let best = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let mut tied: Vec<([f64; 2], f64)> = cands
        .into_iter()
        .filter(|c| c.1 <= best + tie * (1.0 + best))
        .collect();
    tied.sort_by(|a, b| lex(&Point::new(&a.0), &Point::new(&b.0)));
    // Single-linkage clusters, so a run of grid points along one segment stays one cluster.
    let mut label: Vec<usize> = (0..tied.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..tied.len() {
        for j in i + 1..tied.len() {
            if dist(&tied[i].0, &tied[j].0) <= merge {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut reps: Vec<([f64; 2], f64)> = vec![];
    let mut rep_of: Vec<(usize, usize)> = vec![];
    for i in 0..tied.len() {
        let r = root(&mut label, i);
        match rep_of.iter().find(|(root, _)| *root == r) {
            Some(&(_, k)) if tied[i].1 < reps[k].1 => reps[k] = tied[i],
            Some(_) => {}
            None => {
                rep_of.push((r, reps.len()));
                reps.push(tied[i]);
            }
        }
    }
    let winner = reps.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty");
    ProjectionResult {
        point: Point::new(&winner.0),
        dist: winner.1,
        multiplicity: if reps.len() == 1 {
            Multiplicity::Unique
        } else {
            Multiplicity::Ambiguous(reps.iter().map(|r| Point::new(&r.0)).collect())
        },
        iterations: 1,
    }
}
