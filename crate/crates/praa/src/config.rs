//! Flat `key = value` run configuration. Lines starting with `#` and blank
//! lines are ignored; command-line flags take precedence over file values.
//!
//! Recognized keys: `dataset`, `schema`, `output`, `seed`, `folds`,
//! `particles`, `iterations`, `c1`, `c2`, `vmax`, `adt-iterations`,
//! `fitness-folds`, `nested`, `header`, `threads`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub folds: Option<usize>,
    pub particles: Option<usize>,
    pub iterations: Option<usize>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub vmax: Option<f64>,
    pub adt_iterations: Option<usize>,
    pub fitness_folds: Option<usize>,
    pub nested: Option<bool>,
    pub header: Option<bool>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
        let text = fs::read_to_string(path.as_ref())?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Error::Config(format!("line {}: {what}: {value:?}", lineno + 1))
            };
            match key {
                "dataset" => config.dataset = Some(PathBuf::from(value)),
                "schema" => config.schema = Some(PathBuf::from(value)),
                "output" => config.output = Some(PathBuf::from(value)),
                "seed" => config.seed = Some(value.parse().map_err(|_| bad("bad seed"))?),
                "folds" => config.folds = Some(value.parse().map_err(|_| bad("bad folds"))?),
                "particles" => {
                    config.particles = Some(value.parse().map_err(|_| bad("bad particles"))?)
                }
                "iterations" => {
                    config.iterations = Some(value.parse().map_err(|_| bad("bad iterations"))?)
                }
                "c1" => config.c1 = Some(value.parse().map_err(|_| bad("bad c1"))?),
                "c2" => config.c2 = Some(value.parse().map_err(|_| bad("bad c2"))?),
                "vmax" => config.vmax = Some(value.parse().map_err(|_| bad("bad vmax"))?),
                "adt-iterations" => {
                    config.adt_iterations =
                        Some(value.parse().map_err(|_| bad("bad adt-iterations"))?)
                }
                "fitness-folds" => {
                    config.fitness_folds =
                        Some(value.parse().map_err(|_| bad("bad fitness-folds"))?)
                }
                "nested" => config.nested = Some(parse_bool(value).ok_or_else(|| bad("bad bool"))?),
                "header" => config.header = Some(parse_bool(value).ok_or_else(|| bad("bad bool"))?),
                "threads" => config.threads = Some(value.parse().map_err(|_| bad("bad threads"))?),
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(config)
    }
}

fn parse_bool(value: &str) -> Option<bool> {
    match value {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}
