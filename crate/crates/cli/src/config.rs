//! Loading manifolds, sets, curves and solver parameters from names or JSON files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use proxreg::curves::{CurveFile, DiscreteCurve, SolverParams};
use proxreg::proxset::{ProxSet, SetConfig, SetSpec};
use proxreg::Manifold;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// A manifold name (`sphere2`, `euclidean:dim=3`, ...) or a JSON file such as
/// `{"kind": "hyperbolic2"}`.
pub fn load_manifold(arg: &str) -> Result<Manifold> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        return serde_json::from_str(&text).with_context(|| format!("parsing manifold {}", path.display()));
    }
    Ok(Manifold::from_name(arg)?)
}

/// A builtin set name or a JSON set file. Files default to `manifold` when they do not
/// name one themselves.
pub fn load_set(arg: &str, manifold: Option<Manifold>) -> Result<SetSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        let cfg: SetConfig = serde_json::from_str(&text).with_context(|| format!("parsing set {}", path.display()))?;
        let Some(default) = cfg.manifold.or(manifold) else {
            bail!("set file {} names no manifold; pass --manifold", path.display());
        };
        return Ok(SetSpec::Prox(ProxSet::from_config(&cfg, default)?));
    }
    let spec = SetSpec::builtin(arg)?;
    if let Some(m) = manifold {
        if m != spec.manifold() {
            bail!("set `{arg}` lives on {}, not {}", spec.manifold().name(), m.name());
        }
    }
    Ok(spec)
}

pub fn load_curve(path: &Path, manifold: Manifold) -> Result<DiscreteCurve> {
    let text = read(path)?;
    let file: CurveFile = serde_json::from_str(&text).with_context(|| format!("parsing curve {}", path.display()))?;
    Ok(DiscreteCurve::from_file(manifold, &file)?)
}

pub fn load_params(path: &Path) -> Result<SolverParams> {
    let text = read(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing solver params {}", path.display()))
}

/// `"0.3,3"` → `[0.3, 3.0]`.
pub fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().with_context(|| format!("bad coordinate `{c}` in `{s}`")))
        .collect()
}
