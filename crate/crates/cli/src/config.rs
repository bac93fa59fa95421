//! Effective run configuration. Every report embeds one of these, and feeding it
//! back through `--config` reproduces the report byte for byte.

use lplc::criteria::rational_string;
use lplc::hardy::HardyForm;
use lplc::potdsl::PotentialSource;
use lplc::symalg::Rational;
use lplc::weyl::WeylOptions;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub format: Format,
    pub seed: u64,
    #[serde(flatten)]
    pub command: CommandConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Potential {
    Expression(String),
    Samples(PathBuf),
}

impl Potential {
    pub fn load(&self) -> Result<PotentialSource, CliError> {
        Ok(match self {
            Potential::Expression(text) => PotentialSource::parse(text)?,
            Potential::Samples(path) => lplc::potdsl::load_samples_path(path)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Lemma {
    #[value(name = "A1")]
    A1,
    #[value(name = "A2")]
    A2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EndpointArg {
    Zero,
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolutionSpec {
    YN {
        #[serde(with = "rational_string")]
        alpha: Rational,
        #[serde(rename = "N")]
        n: u32,
    },
    YNEps {
        #[serde(with = "rational_string")]
        alpha: Rational,
        #[serde(rename = "N")]
        n: u32,
        #[serde(with = "rational_string")]
        eps: Rational,
    },
    YTilde {
        #[serde(with = "rational_string")]
        alpha: Rational,
        #[serde(rename = "N")]
        n: u32,
        anchor: f64,
    },
    Bessel {
        #[serde(with = "rational_string")]
        beta: Rational,
        gamma: f64,
        z: Complex64,
        j: u8,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sweep", rename_all = "kebab-case")]
pub enum SweepSpec {
    Euler {
        alpha_range: (f64, f64),
        c_range: (f64, f64),
        steps: (usize, usize),
    },
    Multidim {
        n_range: (u32, u32),
        ell_range: (u32, u32),
        #[serde(with = "rational_string")]
        alpha: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandConfig {
    Classify {
        #[serde(with = "rational_string")]
        alpha: Rational,
        potential: Potential,
        window: (f64, f64),
        grid_points: usize,
        auto_shrink: bool,
        /// Numeric cross-check, present when requested.
        weyl: Option<WeylOptions>,
    },
    ClassifyEuler {
        #[serde(with = "rational_string")]
        alpha: Rational,
        #[serde(with = "rational_string")]
        c: Rational,
    },
    Verify {
        lemma: Lemma,
        #[serde(with = "rational_string")]
        alpha: Rational,
        #[serde(with = "rational_string")]
        eps: Rational,
        #[serde(rename = "max_N")]
        max_n: u32,
        /// Extra α values drawn from the seed.
        random_alphas: usize,
    },
    Weyl {
        #[serde(with = "rational_string")]
        alpha: Rational,
        potential: Potential,
        endpoint: EndpointArg,
        options: WeylOptions,
    },
    Hardy {
        form: HardyForm,
        #[serde(with = "rational_string")]
        alpha: Rational,
        #[serde(rename = "N")]
        n: u32,
        rho: f64,
        gamma: f64,
        x_min: f64,
        n_grid: usize,
    },
    Multidim {
        n: u32,
        #[serde(with = "rational_string")]
        alpha: Rational,
        ell_max: u32,
        potential: Option<Potential>,
        window: (f64, f64),
        grid_points: usize,
    },
    Solution {
        solution: SolutionSpec,
        window: (f64, f64),
        points: usize,
    },
    Sweep(SweepSpec),
}

/// Extracts the embedded configuration from a JSON report, a CSV/text report
/// (`# config:` line) or a bare configuration file.
pub fn load_config(text: &str) -> Result<RunConfig, CliError> {
    if let Ok(value) = serde_json::from_str::<serde_json::Value>(text) {
        let inner = value.get("config").cloned().unwrap_or(value);
        return Ok(serde_json::from_value(inner)?);
    }
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix(crate::render::CONFIG_PREFIX))
        .ok_or_else(|| CliError::Config("no embedded configuration found".into()))?;
    Ok(serde_json::from_str(line)?)
}
