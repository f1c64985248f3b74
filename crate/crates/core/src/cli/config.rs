//! The `--config` JSON file.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use super::report::{Category, CliError};
use crate::expr::parse;
use crate::flow::IntegratorConfig;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub h_init: Option<f64>,
    pub h_min: Option<f64>,
    pub max_steps: Option<usize>,
}

impl IntegratorOverrides {
    /// `self` applied over `base`.
    pub fn apply(&self, base: IntegratorConfig) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.rel_tol.unwrap_or(base.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(base.abs_tol),
            h_init: self.h_init.unwrap_or(base.h_init),
            h_min: self.h_min.unwrap_or(base.h_min),
            max_steps: self.max_steps.unwrap_or(base.max_steps),
        }
    }
}

/// Contents of a `--config` file. Command parameters in `params` are used
/// only where the corresponding flag is absent.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Label to expression; a label can stand in for an expression in `-f`/`-g`.
    #[serde(default)]
    pub generators: BTreeMap<String, String>,
    #[serde(default)]
    pub integrator: IntegratorOverrides,
    /// Named point sets, each point as `[re, im]`.
    #[serde(default)]
    pub grids: BTreeMap<String, Vec<[f64; 2]>>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| {
            let category = if e.is_data() { Category::Usage } else { Category::Parse };
            CliError {
                category,
                kind: "ConfigError".into(),
                message: format!("{}: {e}", path.display()),
                offset: None,
                input: None,
            }
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        for (label, text) in &self.generators {
            parse(text).map_err(|e| {
                let mut err = CliError::parse(&e, text);
                err.message = format!("generator '{label}': {}", err.message);
                err
            })?;
        }
        for (name, points) in &self.grids {
            if points.is_empty() {
                return Err(CliError::usage(format!("grid '{name}' is empty")));
            }
            if let Some(p) = points.iter().find(|p| !(Complex64::new(p[0], p[1]).norm() < 1.0)) {
                return Err(CliError::usage(format!(
                    "grid '{name}' has point ({}, {}) outside the unit disk",
                    p[0], p[1]
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self, name: &str) -> Option<Vec<Complex64>> {
        self.grids
            .get(name)
            .map(|pts| pts.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}
