use lplc::criteria::{self, ClassifyOptions, CriterionVerdict, Endpoint, VerdictKind};
use lplc::hardy;
use lplc::multidim;
use lplc::potdsl::PotentialSource;
use lplc::refsol::{self, SolutionFn};
use lplc::symalg::{self, apply_tau, render_rational, to_f64, Rational};
use lplc::weyl::{self, SLProblem, WeylKind, WeylReport};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{CommandConfig, EndpointArg, Lemma, RunConfig, SolutionSpec, SweepSpec};
use crate::error::CliError;
use crate::render::{Body, Cell};

pub struct Outcome {
    pub body: Body,
    /// 0 on success, 1 when the report itself signals a failure.
    pub status: i32,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(body: Body) -> Self {
        Outcome { body, status: 0, warnings: Vec::new() }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match &cfg.command {
        CommandConfig::Classify { alpha, potential, window, grid_points, auto_shrink, weyl } => {
            let q = potential.load()?;
            let opts = ClassifyOptions { window: *window, grid_points: *grid_points, auto_shrink: *auto_shrink };
            let analytic = criteria::classify_at_zero(&q, alpha, &opts)?;
            let numeric = match weyl {
                Some(w) => {
                    let prob = SLProblem::power_weight(to_f64(alpha), &q, Endpoint::Zero)?;
                    Some(weyl::classify_endpoint(&prob, Endpoint::Zero, w)?)
                }
                None => None,
            };
            let disagree = numeric.as_ref().is_some_and(|n| disagreement(&analytic, n));
            let body = Body::Record(json!({
                "analytic": analytic,
                "weyl": numeric,
                "disagreement": disagree,
            }));
            let mut out = Outcome::ok(body);
            if disagree {
                out.status = 1;
                out.warnings.push("analytic and numeric classifications disagree".into());
            }
            Ok(out)
        }
        CommandConfig::ClassifyEuler { alpha, c } => {
            Ok(Outcome::ok(Body::Record(serde_json::to_value(criteria::classify_euler(alpha, c))?)))
        }
        CommandConfig::Verify { lemma, alpha, eps, max_n, random_alphas } => {
            verify(*lemma, alpha, eps, *max_n, *random_alphas, cfg.seed)
        }
        CommandConfig::Weyl { alpha, potential, endpoint, options } => {
            let q = potential.load()?;
            let e = match endpoint {
                EndpointArg::Zero => Endpoint::Zero,
                EndpointArg::Infinity => Endpoint::Infinity,
            };
            let prob = SLProblem::power_weight(to_f64(alpha), &q, e)?;
            let r = weyl::classify_endpoint(&prob, e, options)?;
            Ok(Outcome::ok(Body::Record(serde_json::to_value(r)?)))
        }
        CommandConfig::Hardy { form, alpha, n, rho, gamma, x_min, n_grid } => {
            let r = hardy::hardy_check(*form, alpha, *n, *rho, *gamma, *x_min, *n_grid)?;
            Ok(Outcome::ok(Body::Record(serde_json::to_value(r)?)))
        }
        CommandConfig::Multidim { n, alpha, ell_max, potential, window, grid_points } => multidim_table(
            *n,
            alpha,
            *ell_max,
            potential.as_ref().map(|p| p.load()).transpose()?,
            *window,
            *grid_points,
        ),
        CommandConfig::Solution { solution, window, points } => solution_table(solution, *window, *points),
        CommandConfig::Sweep(spec) => sweep(spec),
    }
}

/// Inconclusive on either side never counts as disagreement.
fn disagreement(analytic: &CriterionVerdict, numeric: &WeylReport) -> bool {
    match numeric.kind {
        WeylKind::LimitPoint => analytic.kind == VerdictKind::LimitCircle,
        WeylKind::LimitCircle => analytic.kind.is_limit_point(),
        WeylKind::Inconclusive => false,
    }
}

fn verify(
    lemma: Lemma,
    alpha: &Rational,
    eps: &Rational,
    max_n: u32,
    extra: usize,
    seed: u64,
) -> Result<Outcome, CliError> {
    if max_n == 0 || max_n > criteria::MAX_N {
        return Err(lplc::Error::Parameter(format!("max-N = {max_n} must lie in 1..={}", criteria::MAX_N)).into());
    }
    let mut alphas = vec![alpha.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        // α < 2 with small denominators
        let den = rng.gen_range(1..=8i64);
        let num = rng.gen_range(-4 * den..2 * den);
        alphas.push(symalg::rat(num, den));
    }
    let cases: Vec<(Rational, u32)> = alphas.iter().flat_map(|a| (1..=max_n).map(move |n| (a.clone(), n))).collect();
    let rows = cases
        .par_iter()
        .map(|(a, n)| -> Result<Vec<Cell>, CliError> {
            let residual = match lemma {
                Lemma::A1 => apply_tau(a, &criteria::q_alpha_N(a, *n)?, &refsol::y_N(*n)?),
                Lemma::A2 => apply_tau(a, &criteria::q_alpha_N_eps(a, *n, eps)?, &refsol::y_N_eps(*n, eps)?),
            };
            Ok(vec![render_rational(a).into(), (*n).into(), residual.is_zero().into(), residual.to_string().into()])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let failed = rows.iter().filter(|r| r[2] == Cell::Bool(false)).count();
    let mut out = Outcome::ok(Body::Table { columns: vec!["alpha", "N", "zero", "residual"], rows });
    if failed > 0 {
        out.status = 1;
        out.warnings.push(format!("{failed} residual(s) are nonzero"));
    }
    Ok(out)
}

fn multidim_table(
    n: u32,
    alpha: &Rational,
    ell_max: u32,
    q: Option<PotentialSource>,
    window: (f64, f64),
    grid_points: usize,
) -> Result<Outcome, CliError> {
    let opts = ClassifyOptions { window, grid_points, auto_shrink: false };
    let rows = (0..=ell_max)
        .into_par_iter()
        .map(|ell| -> Result<Vec<Cell>, CliError> {
            let ch = multidim::channel(n, ell, alpha)?;
            let class = multidim::classify_channel(&ch).class_at_zero;
            let mut row = vec![
                n.into(),
                ell.into(),
                render_rational(alpha).into(),
                render_rational(&ch.coupling).into(),
                ch.gamma_alpha.into(),
                render_rational(&ch.alpha_star).into(),
                format!("{class:?}").into(),
            ];
            if let Some(q) = &q {
                let v = multidim::theorem41_check(&ch, q, &opts)?;
                row.push(format!("{:?}", v.kind).into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut columns = vec!["n", "ell", "alpha", "coupling", "gamma_alpha", "alpha_star", "class_at_zero"];
    if q.is_some() {
        columns.push("with_q");
    }
    Ok(Outcome::ok(Body::Table { columns, rows }))
}

fn solution_table(spec: &SolutionSpec, window: (f64, f64), points: usize) -> Result<Outcome, CliError> {
    if !(window.0 > 0.0 && window.0 < window.1) || points == 0 {
        return Err(CliError::Argument(format!("invalid window {window:?} or point count {points}")));
    }
    let xs = criteria::geometric_grid(window.0, window.1, points.max(2));
    let xs = if points == 1 { vec![window.0] } else { xs };
    let real = |alpha: &Rational, n: u32, y: SolutionFn| -> Result<Vec<Vec<Cell>>, CliError> {
        let q = match spec {
            SolutionSpec::YNEps { eps, .. } => criteria::q_alpha_N_eps(alpha, n, eps)?,
            _ => criteria::q_alpha_N(alpha, n)?,
        };
        let q = PotentialSource::symbolic(q)?;
        let a = to_f64(alpha);
        xs.par_iter()
            .map(|&x| {
                let r = refsol::residual_numeric(a, &q, &y, x, 1e-3 * x)?;
                let yx = y.eval(x)?;
                // both halves of τy have the size of q y
                let scale = (q.value(x)? * yx).abs();
                Ok(vec![x.into(), yx.into(), r.into(), relative(r.abs(), scale)])
            })
            .collect()
    };
    let (columns, rows) = match spec {
        SolutionSpec::YN { alpha, n } => {
            let y = SolutionFn::from_poly(&refsol::y_N(*n)?, "y_N")?;
            (vec!["x", "y", "residual", "relative"], real(alpha, *n, y)?)
        }
        SolutionSpec::YNEps { alpha, n, eps } => {
            let y = SolutionFn::from_poly(&refsol::y_N_eps(*n, eps)?, "y_N_eps")?;
            (vec!["x", "y", "residual", "relative"], real(alpha, *n, y)?)
        }
        SolutionSpec::YTilde { alpha, n, anchor } => {
            let base = refsol::y_N(*n)?;
            let (a, b, c) = (alpha.clone(), base.clone(), *anchor);
            let y = SolutionFn::new("y_tilde", (0.0, c), move |x| refsol::y_tilde(&a, &b, c, x));
            (vec!["x", "y", "residual", "relative"], real(alpha, *n, y)?)
        }
        SolutionSpec::Bessel { beta, gamma, z, j } => {
            let b = to_f64(beta);
            let coupling = refsol::bessel_coupling(b, *gamma);
            let rows = xs
                .par_iter()
                .map(|&x| -> Result<Vec<Cell>, CliError> {
                    let f = |t: f64| refsol::bessel_solution(beta, *gamma, *z, *j, t);
                    let y = f(x)?;
                    let kinetic = refsol::residual_stencil(b, f, x, 1e-3 * x)?;
                    let pot = y * coupling * x.powf(b - 2.0);
                    let res: Complex64 = kinetic + pot - z * y;
                    let scale = kinetic.norm() + pot.norm() + (z * y).norm();
                    Ok(vec![x.into(), y.re.into(), y.im.into(), res.norm().into(), relative(res.norm(), scale)])
                })
                .collect::<Result<Vec<_>, _>>()?;
            (vec!["x", "y", "y_im", "residual", "relative"], rows)
        }
    };
    Ok(Outcome::ok(Body::Table { columns, rows }))
}

fn relative(r: f64, scale: f64) -> Cell {
    if scale > 0.0 {
        Cell::Float(r / scale)
    } else {
        Cell::Missing
    }
}

fn linspace(range: (f64, f64), steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![range.0];
    }
    (0..steps).map(|i| range.0 + (range.1 - range.0) * i as f64 / (steps - 1) as f64).collect()
}

fn sweep(spec: &SweepSpec) -> Result<Outcome, CliError> {
    match spec {
        SweepSpec::Euler { alpha_range, c_range, steps } => {
            let bad = |r: &(f64, f64)| !(r.0.is_finite() && r.1.is_finite() && r.0 <= r.1);
            if bad(alpha_range) || bad(c_range) || steps.0 == 0 || steps.1 == 0 {
                return Err(CliError::Argument("ranges need lo <= hi and at least one step".into()));
            }
            let cells: Vec<(f64, f64)> = linspace(*alpha_range, steps.0)
                .into_iter()
                .flat_map(|a| linspace(*c_range, steps.1).into_iter().map(move |c| (a, c)))
                .collect();
            let rows = cells
                .par_iter()
                .map(|&(a, c)| -> Result<Vec<Cell>, CliError> {
                    let v = criteria::classify_euler(&symalg::from_f64_exact(a)?, &symalg::from_f64_exact(c)?);
                    Ok(vec![a.into(), c.into(), format!("{:?}", v.kind).into()])
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Outcome::ok(Body::Table { columns: vec!["alpha", "c", "verdict"], rows }))
        }
        SweepSpec::Multidim { n_range, ell_range, alpha } => {
            if n_range.0 < 2 || n_range.0 > n_range.1 || ell_range.0 > ell_range.1 {
                return Err(CliError::Argument("need 2 <= n_lo <= n_hi and ell_lo <= ell_hi".into()));
            }
            let cells: Vec<(u32, u32)> =
                (n_range.0..=n_range.1).flat_map(|n| (ell_range.0..=ell_range.1).map(move |l| (n, l))).collect();
            let rows = cells
                .par_iter()
                .map(|&(n, l)| -> Result<Vec<Cell>, CliError> {
                    let ch = multidim::channel(n, l, alpha)?;
                    let class = multidim::classify_channel(&ch).class_at_zero;
                    Ok(vec![
                        n.into(),
                        l.into(),
                        render_rational(&ch.alpha_star).into(),
                        to_f64(&ch.alpha_star).into(),
                        format!("{class:?}").into(),
                    ])
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Outcome::ok(Body::Table {
                columns: vec!["n", "ell", "alpha_star", "alpha_star_value", "class_at_zero"],
                rows,
            }))
        }
    }
}
