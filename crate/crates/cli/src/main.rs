//! `lplc`: limit point / limit circle classification from the command line.
//!
//! Exit status: 0 on success, 1 when a report flags a failure (route
//! disagreement, nonzero residual), 2 on argument, parse or domain errors.

mod config;
mod error;
mod render;
mod run;

use clap::{Args, Parser, Subcommand};
use lplc::criteria::DEFAULT_WINDOW;
use lplc::hardy::{self, HardyForm};
use lplc::iterlog;
use lplc::potdsl;
use lplc::symalg::Rational;
use lplc::weyl::WeylOptions;
use num_complex::Complex64;
use std::path::PathBuf;
use std::process::ExitCode;

use config::{CommandConfig, EndpointArg, Format, Lemma, Potential, RunConfig, SolutionSpec, SweepSpec};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "lplc",
    version,
    about = "Limit point / limit circle classification of singular Sturm-Liouville expressions"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized batteries.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Window `a,b` for commands that sample an interval.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true)]
    window: Option<(f64, f64)>,
    /// Re-run the configuration embedded in a previous report.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PotentialArgs {
    /// Potential expression, e.g. "3/4 * x^-2 - x^-2 * ln1(x)^-1".
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Two-column CSV of sampled potential values.
    #[arg(long)]
    q_file: Option<PathBuf>,
}

impl PotentialArgs {
    fn spec(self) -> Potential {
        match (self.q, self.q_file) {
            (Some(q), _) => Potential::Expression(q),
            (None, Some(p)) => Potential::Samples(p),
            (None, None) => unreachable!("clap enforces one potential source"),
        }
    }
}

#[derive(Args)]
struct WeylArgs {
    /// Spectral parameter `re,im`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    z: Option<(f64, f64)>,
    #[arg(long)]
    anchor: Option<f64>,
    /// Probed span in `ln x`.
    #[arg(long)]
    depth: Option<f64>,
    #[arg(long)]
    rho_max: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    growth: Option<f64>,
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
}

impl WeylArgs {
    fn options(self) -> WeylOptions {
        let d = WeylOptions::default();
        WeylOptions {
            z: self.z.map(|(re, im)| Complex64::new(re, im)).unwrap_or(d.z),
            anchor: self.anchor,
            depth: self.depth,
            rho_max: self.rho_max.unwrap_or(d.rho_max),
            m: self.m.unwrap_or(d.m),
            growth: self.growth.unwrap_or(d.growth),
            tail_tol: self.tail_tol.unwrap_or(d.tail_tol),
            rtol: self.rtol.unwrap_or(d.rtol),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormArg {
    Power,
    Refined,
    FirstPower,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SolutionKind {
    #[value(name = "y-n")]
    YN,
    #[value(name = "y-n-eps")]
    YNEps,
    YTilde,
    Bessel,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SweepKind {
    Euler,
    Multidim,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify `x = 0` with the comparison criteria, optionally cross-checked numerically.
    Classify {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        alpha: Rational,
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 256)]
        grid_points: usize,
        /// Retry on smaller windows when inconclusive.
        #[arg(long)]
        auto_shrink: bool,
        /// Also run the numerical Weyl probe.
        #[arg(long)]
        weyl: bool,
        #[command(flatten)]
        weyl_args: WeylArgs,
    },
    /// Exact classification of `c x^{α-2}`.
    ClassifyEuler {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        c: Rational,
    },
    /// Exact residual checks for the log-power solutions.
    Verify {
        #[arg(long, value_enum)]
        lemma: Lemma,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "1/2")]
        eps: Rational,
        #[arg(long = "max-N", default_value_t = 4)]
        max_n: u32,
        /// Additional random α values drawn from --seed.
        #[arg(long, default_value_t = 0)]
        random_alphas: usize,
    },
    /// Numerical Weyl classification at one endpoint.
    Weyl {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        alpha: Rational,
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, value_enum, default_value = "zero")]
        endpoint: EndpointArg,
        #[command(flatten)]
        weyl_args: WeylArgs,
    },
    /// Discrete Hardy-type inequality check.
    Hardy {
        #[arg(long, value_enum, default_value = "refined")]
        form: FormArg,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long = "N", default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Log shift; defaults to `e_N ρ`.
        #[arg(long)]
        gamma: Option<f64>,
        /// Left end; defaults to `ρ·1e-6`.
        #[arg(long)]
        x_min: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        n_grid: usize,
    },
    /// Per-channel table for the radial reduction in `n` dimensions.
    Multidim {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, default_value_t = lplc::multidim::DEFAULT_ELL_MAX)]
        ell_max: u32,
        /// Optional potential added to every channel.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(long, default_value_t = 256)]
        grid_points: usize,
    },
    /// Values and residuals of reference solutions.
    Solution {
        #[arg(long, value_enum)]
        kind: SolutionKind,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "0")]
        alpha: Rational,
        #[arg(long = "N", default_value_t = 1)]
        n: u32,
        #[arg(long, value_parser = parse_rational, default_value = "1/2")]
        eps: Rational,
        /// Anchor of the second solution; defaults to half the positivity bound of `ln_N`.
        #[arg(long)]
        anchor: Option<f64>,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "0")]
        beta: Rational,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "1,0")]
        z: (f64, f64),
        #[arg(long, default_value_t = 1)]
        j: u8,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Phase diagrams over parameter grids.
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "-1,3")]
        alpha_range: (f64, f64),
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "-1,2")]
        c_range: (f64, f64),
        /// Grid sizes `n_alpha,n_c`.
        #[arg(long, value_parser = parse_usize_pair, default_value = "50,50")]
        steps: (usize, usize),
        #[arg(long, value_parser = parse_u32_pair, default_value = "2,5")]
        n_range: (u32, u32),
        #[arg(long, value_parser = parse_u32_pair, default_value = "0,3")]
        ell_range: (u32, u32),
        /// α for the multidim sweep.
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "0")]
        at_alpha: Rational,
    },
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    potdsl::parse_rational(s).map_err(|e| e.to_string())
}

fn split_pair(s: &str) -> Result<(&str, &str), String> {
    s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = split_pair(s)?;
    let f = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((f(a)?, f(b)?))
}

fn parse_usize_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = split_pair(s)?;
    let f = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((f(a)?, f(b)?))
}

fn parse_u32_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = split_pair(s)?;
    let f = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
    Ok((f(a)?, f(b)?))
}

/// Fills every default so the embedded configuration is complete.
fn build_config(cli: Cli) -> Result<RunConfig, CliError> {
    let format = cli.format.unwrap_or(Format::Json);
    let seed = cli.seed.unwrap_or(0);
    let window = cli.window;
    let command = match cli.command.ok_or_else(|| CliError::Argument("a subcommand or --config is required".into()))? {
        Cmd::Classify { alpha, potential, grid_points, auto_shrink, weyl, weyl_args } => CommandConfig::Classify {
            alpha,
            potential: potential.spec(),
            window: window.unwrap_or(DEFAULT_WINDOW),
            grid_points,
            auto_shrink,
            weyl: weyl.then(|| weyl_args.options()),
        },
        Cmd::ClassifyEuler { alpha, c } => CommandConfig::ClassifyEuler { alpha, c },
        Cmd::Verify { lemma, alpha, eps, max_n, random_alphas } => {
            CommandConfig::Verify { lemma, alpha, eps, max_n, random_alphas }
        }
        Cmd::Weyl { alpha, potential, endpoint, weyl_args } => {
            CommandConfig::Weyl { alpha, potential: potential.spec(), endpoint, options: weyl_args.options() }
        }
        Cmd::Hardy { form, alpha, n, rho, gamma, x_min, n_grid } => {
            let form = match form {
                FormArg::Power => HardyForm::Power,
                FormArg::Refined => HardyForm::Refined,
                FormArg::FirstPower => HardyForm::FirstPower,
            };
            let n = if form == HardyForm::Power { 0 } else { n };
            let gamma = match gamma {
                Some(g) => g,
                None => iterlog::tower(n)? * rho,
            };
            let x_min = x_min.unwrap_or(rho * hardy::DEFAULT_X_MIN_RATIO);
            CommandConfig::Hardy { form, alpha, n, rho, gamma, x_min, n_grid }
        }
        Cmd::Multidim { n, alpha, ell_max, q, grid_points } => CommandConfig::Multidim {
            n,
            alpha,
            ell_max,
            potential: q.map(Potential::Expression),
            window: window.unwrap_or(DEFAULT_WINDOW),
            grid_points,
        },
        Cmd::Solution { kind, alpha, n, eps, anchor, beta, gamma, z, j, points } => {
            let bound = if n == 0 { 1.0 } else { iterlog::positivity_bound(n)?.min(1.0) };
            let (solution, default_window) = match kind {
                SolutionKind::YN => (SolutionSpec::YN { alpha, n }, (bound * 1e-6, bound * 1e-1)),
                SolutionKind::YNEps => (SolutionSpec::YNEps { alpha, n, eps }, (bound * 1e-6, bound * 1e-1)),
                SolutionKind::YTilde => {
                    let anchor = anchor.unwrap_or(0.5 * bound);
                    (SolutionSpec::YTilde { alpha, n, anchor }, (anchor * 1e-6, anchor * 0.5))
                }
                SolutionKind::Bessel => {
                    let z = Complex64::new(z.0, z.1);
                    (SolutionSpec::Bessel { beta, gamma, z, j }, (1e-2, 1.0))
                }
            };
            CommandConfig::Solution { solution, window: window.unwrap_or(default_window), points }
        }
        Cmd::Sweep { kind, alpha_range, c_range, steps, n_range, ell_range, at_alpha } => {
            CommandConfig::Sweep(match kind {
                SweepKind::Euler => SweepSpec::Euler { alpha_range, c_range, steps },
                SweepKind::Multidim => SweepSpec::Multidim { n_range, ell_range, alpha: at_alpha },
            })
        }
    };
    Ok(RunConfig { format, seed, command })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(_) if cli.command.is_some() => {
            Err(CliError::Argument("--config cannot be combined with a subcommand".into()))
        }
        Some(path) => std::fs::read_to_string(path).map_err(CliError::from).and_then(|t| config::load_config(&t)),
        None => build_config(cli),
    };
    let result = config.and_then(|cfg| {
        let outcome = run::execute(&cfg)?;
        Ok((render::render(&cfg, &outcome.body)?, outcome))
    });
    match result {
        Ok((text, outcome)) => {
            print!("{text}");
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_parse() {
        assert_eq!(parse_pair("1e-12, 1e-3").unwrap(), (1e-12, 1e-3));
        assert_eq!(parse_pair("-1,3").unwrap(), (-1.0, 3.0));
        assert!(parse_pair("1").is_err());
        assert_eq!(parse_usize_pair("50,1").unwrap(), (50, 1));
    }

    #[test]
    fn config_round_trip() {
        let cli = Cli::parse_from(["lplc", "--format", "csv", "classify", "--alpha", "-1/2", "--q", "0", "--weyl"]);
        let cfg = build_config(cli).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(config::load_config(&text).unwrap(), cfg);
        let body = render::Body::Record(serde_json::json!({"a": 1.5}));
        let rendered = render::render(&cfg, &body).unwrap();
        assert!(rendered.starts_with(render::CONFIG_PREFIX));
        assert_eq!(config::load_config(&rendered).unwrap(), cfg);
    }

    #[test]
    fn defaults_are_recorded() {
        let cli = Cli::parse_from(["lplc", "hardy", "--alpha", "0"]);
        let cfg = build_config(cli).unwrap();
        match cfg.command {
            CommandConfig::Hardy { n, gamma, x_min, n_grid, .. } => {
                assert_eq!((n, n_grid), (1, 2000));
                // e_1 = 1
                assert_eq!(gamma, 1.0);
                assert_eq!(x_min, 1e-6);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(DEFAULT_WINDOW, (1e-12, 1e-3));
    }
}
