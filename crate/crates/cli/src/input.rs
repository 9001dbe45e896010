use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;
use su11::ode::IntegratorConfig;
use su11::oracle;
use su11::{SolvableScenario, Su11Hamiltonian};

use crate::Integrator;

pub enum Scenario {
    Solvable(SolvableScenario),
    General(Su11Hamiltonian),
}

impl Scenario {
    pub fn hamiltonian(&self) -> Result<Su11Hamiltonian> {
        Ok(match self {
            Scenario::Solvable(s) => s.hamiltonian()?,
            Scenario::General(h) => h.clone(),
        })
    }
}

fn read_json(path: &Path, what: &str) -> Result<Value> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {what} file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} file {}", path.display()))
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let v = read_json(path, what)?;
    serde_json::from_value(v).with_context(|| format!("invalid {what} in {}", path.display()))
}

/// A scenario object carries `nu`; anything else is read as a general Hamiltonian.
pub fn load_scenario(path: &Path, t_max: f64) -> Result<Scenario> {
    let v = read_json(path, "scenario")?;
    let ctx = || format!("invalid scenario in {}", path.display());
    let scenario = if v.get("nu").is_some() {
        let s: SolvableScenario = serde_json::from_value(v).with_context(ctx)?;
        s.validate(t_max).with_context(ctx)?;
        Scenario::Solvable(s)
    } else {
        let h: Su11Hamiltonian = serde_json::from_value(v).with_context(ctx)?;
        h.validate(t_max).with_context(ctx)?;
        Scenario::General(h)
    };
    Ok(scenario)
}

pub fn sample_grid(max: f64, samples: usize, name: &str) -> Result<Vec<f64>> {
    if !(max > 0.0 && max.is_finite()) {
        bail!("--{name} must be a positive number, got {max}");
    }
    if samples < 2 {
        bail!("--samples must be at least 2, got {samples}");
    }
    let last = (samples - 1) as f64;
    Ok((0..samples).map(|k| max * k as f64 / last).collect())
}

pub fn integrator(h: &Su11Hamiltonian, t_max: f64, opts: &Integrator) -> Result<IntegratorConfig> {
    let mut cfg = oracle::default_config(h, t_max)?;
    if let Some(r) = opts.rel_tol {
        cfg.rel_tol = r;
    }
    if let Some(a) = opts.abs_tol {
        cfg.abs_tol = a;
    }
    cfg.validate()?;
    Ok(cfg)
}
