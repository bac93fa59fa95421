//! Threshold potentials and sufficient limit-point / limit-circle criteria,
//! checked by pointwise dominance on a sampled window.
//!
//! A verdict here is only as good as the window: the inequalities hold "for `x`
//! sufficiently small", which is operationalized as "at every point of a
//! geometric grid over `(x_lo, x_hi)`".

use crate::error::{Error, Result};
use crate::formulas;
use crate::iterlog;
use crate::potdsl::PotentialSource;
use crate::symalg::{self, rat, LogPoly, Rational};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Deepest `N` supported by the numeric criteria.
pub const MAX_N: u32 = 4;

/// Relative tolerance for the dominance comparison.
pub const DOMINANCE_RTOL: f64 = 1e-12;

pub const DEFAULT_WINDOW: (f64, f64) = (1e-12, 1e-3);
pub const MIN_GRID_POINTS: usize = 64;
pub const SHRINK_ROUNDS: u32 = 3;
pub const SHRINK_FACTOR: f64 = 1e-3;

/// ε values tried in order; the first one that yields dominance wins.
pub fn eps_ladder() -> [Rational; 4] {
    [rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 16)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    Zero,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    LimitPointNonoscillatory,
    /// Limit point with oscillating solutions (exact Euler case only).
    LimitPointOscillatory,
    /// Limit point, oscillation not determined.
    LimitPoint,
    LimitCircle,
    Inconclusive,
}

impl VerdictKind {
    pub fn is_limit_point(self) -> bool {
        matches!(
            self,
            VerdictKind::LimitPointNonoscillatory | VerdictKind::LimitPointOscillatory | VerdictKind::LimitPoint
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub endpoint: Endpoint,
    pub kind: VerdictKind,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(with = "rational_string")]
    pub eps: Rational,
    /// Minimum of `(q - threshold)/scale` over the grid (sign flipped for limit circle);
    /// the scale is `x^{α-2}` at zero and `x^{2-α} ∏ Ln_k^2` at infinity.
    pub margin: f64,
    pub window: (f64, f64),
    pub method: String,
}

/// Serde adapter that writes rationals as `p/q` strings.
pub mod rational_string {
    use crate::symalg::{render_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        crate::potdsl::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

fn check_n(n: u32) -> Result<()> {
    if n > MAX_N {
        return Err(Error::Parameter(format!("N = {n} exceeds the supported maximum {MAX_N}")));
    }
    Ok(())
}

fn check_alpha_lt_2(alpha: &Rational) -> Result<()> {
    if *alpha >= rat(2, 1) {
        return Err(Error::Parameter(format!("alpha = {} must be < 2", symalg::render_rational(alpha))));
    }
    Ok(())
}

fn check_eps_unit(eps: &Rational) -> Result<()> {
    if !(eps.is_positive() && *eps < rat(1, 1)) {
        return Err(Error::Parameter(format!("eps = {} must lie in (0, 1)", symalg::render_rational(eps))));
    }
    Ok(())
}

/// Limit-point threshold (`N = 0`: Euler bound; `N >= 1`: `Q_{α,N,ε}`).
pub fn threshold_lp(alpha: &Rational, n: u32, eps: &Rational) -> Result<LogPoly> {
    check_n(n)?;
    if !eps.is_positive() {
        return Err(Error::Parameter("eps must be positive".into()));
    }
    if n >= 1 {
        check_alpha_lt_2(alpha)?;
    }
    Ok(formulas::lp_threshold(alpha, n, eps))
}

/// Limit-circle threshold (`N = 0`: `(3/4 - α/2 - ε) x^{α-2}`; `N >= 1`: `Q̂_{α,N,ε}`).
pub fn threshold_lc(alpha: &Rational, n: u32, eps: &Rational) -> Result<LogPoly> {
    check_n(n)?;
    check_alpha_lt_2(alpha)?;
    check_eps_unit(eps)?;
    Ok(formulas::lc_threshold(alpha, n, eps))
}

#[allow(non_snake_case)]
pub fn q_alpha_N(alpha: &Rational, n: u32) -> Result<LogPoly> {
    check_alpha_lt_2(alpha)?;
    if n == 0 {
        return Err(Error::Parameter("N must be >= 1".into()));
    }
    check_n(n)?;
    Ok(formulas::q_alpha_n(alpha, n))
}

#[allow(non_snake_case)]
pub fn q_alpha_N_eps(alpha: &Rational, n: u32, eps: &Rational) -> Result<LogPoly> {
    q_alpha_N(alpha, n)?;
    check_eps_unit(eps)?;
    Ok(formulas::q_alpha_n_eps(alpha, n, eps))
}

pub fn q_alpha_0_beta(alpha: &Rational, beta: &Rational) -> Result<LogPoly> {
    check_alpha_lt_2(alpha)?;
    if !beta.is_positive() {
        return Err(Error::Parameter("beta must be positive".into()));
    }
    Ok(formulas::q_alpha_0_beta(alpha, beta))
}

/// `n` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub window: (f64, f64),
    pub grid_points: usize,
    /// Retry with `x_hi *= 1e-3` (up to three rounds) when the result is inconclusive.
    pub auto_shrink: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { window: DEFAULT_WINDOW, grid_points: 256, auto_shrink: false }
    }
}

/// Largest `N <= 4` for which every `ln_n`, `n <= N`, is positive on the window.
pub fn max_depth_for(x_hi: f64) -> u32 {
    (1..=MAX_N).rev().find(|&n| iterlog::positivity_bound(n).map(|b| x_hi < b).unwrap_or(false)).unwrap_or(0)
}

/// Direction of a dominance test.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `q >= T`
    Above,
    /// `q <= T`
    Below,
}

/// Evaluation site for potentials and thresholds.
#[derive(Clone, Copy)]
enum Site {
    Zero,
    Infinity,
}

/// Returns `Some(margin)` if `q` dominates `t` on every grid point, `None` otherwise.
///
/// `scale(x)` normalizes the slack; it must be positive on the grid.
fn dominance(
    q: &PotentialSource,
    t: &LogPoly,
    grid: &[f64],
    side: Side,
    site: Site,
    scale: &dyn Fn(f64) -> Result<f64>,
) -> Result<Option<f64>> {
    let sign = if side == Side::Above { 1.0 } else { -1.0 };
    let mut margin = f64::INFINITY;
    match q {
        PotentialSource::Symbolic(qp) => {
            let diff = qp - t;
            if diff.is_zero() {
                // identical expressions: equality everywhere
                return Ok(Some(0.0));
            }
            let terms: Vec<_> = diff.terms().into_iter().map(LogPoly::from_monomial).map(|m| m.compile()).collect();
            for &x in grid {
                let mut sum = 0.0;
                let mut abs = 0.0;
                for c in &terms {
                    let v = match site {
                        Site::Zero => c.eval(x)?,
                        Site::Infinity => c.eval_at_infinity(x)?,
                    };
                    sum += v;
                    abs += v.abs();
                }
                let s = scale(x)?;
                let slack = sign * sum;
                if slack < -DOMINANCE_RTOL * abs {
                    return Ok(None);
                }
                margin = margin.min(slack / s);
            }
        }
        PotentialSource::Sampled(samples) => {
            let tc = t.compile();
            for &x in grid {
                let qv = samples.interpolate(x)?;
                let tv = match site {
                    Site::Zero => tc.eval(x)?,
                    Site::Infinity => tc.eval_at_infinity(x)?,
                };
                let s = scale(x)?;
                let slack = sign * (qv - tv);
                if slack < -DOMINANCE_RTOL * (qv.abs() + tv.abs()) {
                    return Ok(None);
                }
                margin = margin.min(slack / s);
            }
        }
    }
    Ok(Some(margin.max(0.0)))
}

fn validate_window(q: &PotentialSource, window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::Domain(format!("invalid window ({lo:e}, {hi:e})")));
    }
    if let PotentialSource::Sampled(s) = q {
        let (a, b) = s.hull();
        if lo < a || hi > b {
            return Err(Error::Domain(format!("window ({lo:e}, {hi:e}) is not inside the sample hull [{a:e}, {b:e}]")));
        }
    }
    Ok(())
}

/// Classification at `x = 0` by searching `N = 0..=N_max` and the ε ladder.
///
/// Order: `N = 0` limit point, `N = 0` limit circle, then for each `N >= 1` limit
/// point followed by limit circle. The first dominance found wins.
pub fn classify_at_zero(q: &PotentialSource, alpha: &Rational, opts: &ClassifyOptions) -> Result<CriterionVerdict> {
    if opts.grid_points < MIN_GRID_POINTS {
        return Err(Error::Parameter(format!(
            "grid_points = {} is below the minimum {MIN_GRID_POINTS}",
            opts.grid_points
        )));
    }
    let mut window = opts.window;
    let rounds = if opts.auto_shrink { SHRINK_ROUNDS } else { 0 };
    let mut verdict = classify_window(q, alpha, window, opts.grid_points)?;
    for _ in 0..rounds {
        if verdict.kind != VerdictKind::Inconclusive {
            break;
        }
        let hi = window.1 * SHRINK_FACTOR;
        if hi <= window.0 {
            break;
        }
        window = (window.0, hi);
        verdict = classify_window(q, alpha, window, opts.grid_points)?;
    }
    Ok(verdict)
}

fn classify_window(
    q: &PotentialSource,
    alpha: &Rational,
    window: (f64, f64),
    grid_points: usize,
) -> Result<CriterionVerdict> {
    validate_window(q, window)?;
    let grid = geometric_grid(window.0, window.1, grid_points);
    let a = symalg::to_f64(alpha);
    let scale = move |x: f64| Ok(x.powf(a - 2.0));
    let alpha_lt_2 = *alpha < rat(2, 1);
    let n_max = if alpha_lt_2 { max_depth_for(window.1) } else { 0 };
    let verdict = |kind, n, eps: Rational, margin| CriterionVerdict {
        endpoint: Endpoint::Zero,
        kind,
        n,
        eps,
        margin,
        window,
        method: "analytic-criterion".into(),
    };

    let euler = formulas::lp_threshold(alpha, 0, &rat(1, 1));
    if let Some(m) = dominance(q, &euler, &grid, Side::Above, Site::Zero, &scale)? {
        return Ok(verdict(VerdictKind::LimitPointNonoscillatory, 0, Rational::zero(), m));
    }
    for n in 0..=n_max {
        if n >= 1 {
            for eps in eps_ladder() {
                let t = formulas::lp_threshold(alpha, n, &eps);
                if let Some(m) = dominance(q, &t, &grid, Side::Above, Site::Zero, &scale)? {
                    return Ok(verdict(VerdictKind::LimitPointNonoscillatory, n, eps, m));
                }
            }
        }
        if alpha_lt_2 {
            for eps in eps_ladder() {
                let t = formulas::lc_threshold(alpha, n, &eps);
                if let Some(m) = dominance(q, &t, &grid, Side::Below, Site::Zero, &scale)? {
                    return Ok(verdict(VerdictKind::LimitCircle, n, eps, m));
                }
            }
        }
    }
    Ok(verdict(VerdictKind::Inconclusive, n_max, Rational::zero(), 0.0))
}

/// Exact classification of `q = c x^{α-2}` at zero.
///
/// Limit point iff `α >= 2` or `c >= 3/4 - α/2`. Solutions `x^γ` solve
/// `γ² + (α-1)γ - c = 0`, so they oscillate iff `(α-1)² + 4c < 0`.
pub fn classify_euler(alpha: &Rational, c: &Rational) -> CriterionVerdict {
    let threshold = rat(3, 4) - alpha / rat(2, 1);
    let lp = *alpha >= rat(2, 1) || *c >= threshold;
    let disc = (alpha - rat(1, 1)) * (alpha - rat(1, 1)) + c * rat(4, 1);
    let kind = match (lp, disc.is_negative()) {
        (true, false) => VerdictKind::LimitPointNonoscillatory,
        (true, true) => VerdictKind::LimitPointOscillatory,
        (false, _) => VerdictKind::LimitCircle,
    };
    CriterionVerdict {
        endpoint: Endpoint::Zero,
        kind,
        n: 0,
        eps: Rational::zero(),
        margin: (c - threshold).abs().to_f64().unwrap_or(f64::NAN),
        window: (0.0, 1.0),
        method: "exact-euler".into(),
    }
}

/// Default window at infinity for depth `N`: `(max(10, 10 e_N), 1e12)`.
pub fn default_infinity_window(n: u32) -> Result<(f64, f64)> {
    let e = iterlog::tower(n)?;
    Ok(((10.0 * e).max(10.0), 1e12))
}

/// Limit point at infinity if `q >= -C x^{2-α} ∏_{k<=N} Ln_k^2` on the window.
pub fn limit_point_at_infinity(
    q: &PotentialSource,
    alpha: &Rational,
    n: u32,
    c: f64,
    window: (f64, f64),
    grid_points: usize,
) -> Result<CriterionVerdict> {
    if *alpha > rat(2, 1) {
        return Err(Error::Parameter("alpha must be <= 2 at infinity".into()));
    }
    if n == 0 || n > MAX_N {
        return Err(Error::Parameter(format!("N = {n} must lie in 1..={MAX_N}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter("C must be positive and finite".into()));
    }
    if grid_points < 2 {
        return Err(Error::Parameter("grid_points must be >= 2".into()));
    }
    validate_window(q, window)?;
    let e_n = iterlog::tower(n)?;
    if !(window.0 > e_n) {
        return Err(Error::Domain(format!("R = {:e} must exceed e_{n} = {e_n:e}", window.0)));
    }
    let c_exact = symalg::from_f64_exact(c)?;
    let logs: Vec<(u32, Rational)> = (1..=n).map(|k| (k, rat(2, 1))).collect();
    let t = LogPoly::monomial(-c_exact, rat(2, 1) - alpha, &logs);
    let shape = LogPoly::monomial(rat(1, 1), rat(2, 1) - alpha, &logs).compile();
    let scale = move |x: f64| shape.eval_at_infinity(x);
    let grid = geometric_grid(window.0, window.1, grid_points);
    let m = dominance(q, &t, &grid, Side::Above, Site::Infinity, &scale)?;
    let (kind, margin) = match m {
        Some(m) => (VerdictKind::LimitPoint, m),
        None => (VerdictKind::Inconclusive, 0.0),
    };
    Ok(CriterionVerdict {
        endpoint: Endpoint::Infinity,
        kind,
        n,
        eps: Rational::zero(),
        margin,
        window,
        method: "analytic-criterion".into(),
    })
}
