pub mod check;
pub mod project;
pub mod reproduce;
pub mod solve;

use std::path::PathBuf;

use anyhow::{bail, Result};
use proxreg::proxset::{ProxSet, SetSpec};
use proxreg::Manifold;

use crate::config;
use crate::report::ExperimentReport;

/// Flags shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Ctx {
    pub manifold: Option<String>,
    pub set: Option<String>,
    pub curve: Option<PathBuf>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub n: Option<usize>,
}

impl Ctx {
    pub fn manifold(&self) -> Result<Option<Manifold>> {
        self.manifold.as_deref().map(config::load_manifold).transpose()
    }

    pub fn set_or(&self, default: &str) -> Result<(String, SetSpec)> {
        let name = self.set.clone().unwrap_or_else(|| default.to_string());
        let spec = config::load_set(&name, self.manifold()?)?;
        Ok((name, spec))
    }

    pub fn require_set(&self) -> Result<(String, SetSpec)> {
        if self.set.is_none() {
            bail!("--set is required");
        }
        self.set_or("")
    }

    pub fn prox_set_or(&self, default: &str) -> Result<(String, ProxSet)> {
        let (name, spec) = self.set_or(default)?;
        Ok((name, spec.as_prox()?.clone()))
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// A report plus an optional SVG rendering of its traces.
pub struct Output {
    pub report: ExperimentReport,
    pub plot: Option<String>,
}

impl From<ExperimentReport> for Output {
    fn from(report: ExperimentReport) -> Self {
        Self { report, plot: None }
    }
}
