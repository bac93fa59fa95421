//! Discrete checks of weighted Hardy inequalities near `x = 0`.
//!
//! The quadratic form `∫ x^α |f′|² + ∫ V |f|²` is restricted to piecewise-linear
//! hats on a geometric grid of `[x_min, ρ]` that vanish at both ends, and its
//! smallest Rayleigh quotient against `∫ |f|²` is found by Sturm-count bisection.

use crate::error::{Error, Result};
use crate::formulas;
use crate::iterlog;
use crate::symalg::{rat, to_f64, LogPoly, Rational};
use serde::{Deserialize, Serialize};

/// Default `x_min / ρ`.
pub const DEFAULT_X_MIN_RATIO: f64 = 1e-6;
pub const MIN_GRID: usize = 100;
/// Relative tolerance of the eigenvalue bisection.
pub const EIGEN_RTOL: f64 = 1e-10;
/// Certificates pass when the minimum quotient is at least `-PASS_TOL`.
pub const PASS_TOL: f64 = 1e-8;
pub const MAX_REFINED_N: u32 = 3;

/// Assembled tridiagonal pencil on the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteForm {
    pub grid: Vec<f64>,
    pub alpha: f64,
    /// Stiffness plus potential.
    pub a_diag: Vec<f64>,
    pub a_off: Vec<f64>,
    /// Consistent `L²` mass.
    pub m_diag: Vec<f64>,
    pub m_off: Vec<f64>,
}

/// `n` points from `lo` to `hi` in geometric progression.
pub fn geometric_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

// ∫_a^b x^α dx
fn power_integral(alpha: f64, a: f64, b: f64) -> f64 {
    if (alpha + 1.0).abs() < 1e-14 {
        (b / a).ln()
    } else {
        (b.powf(alpha + 1.0) - a.powf(alpha + 1.0)) / (alpha + 1.0)
    }
}

fn element_potentials(v: &LogPoly, gamma: f64, grid: &[f64]) -> Result<Vec<f64>> {
    let c = v.compile();
    grid.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            if c.depth() == 0 {
                c.eval(mid)
            } else {
                c.eval_shifted(mid, gamma)
            }
        })
        .collect()
}

fn check_gamma(v: &LogPoly, rho: f64, gamma: f64) -> Result<()> {
    let n = v.max_depth();
    if n > 0 {
        let e = iterlog::tower(n)?;
        if !(gamma >= e * rho) {
            return Err(Error::Parameter(format!("gamma = {gamma} must be at least e_{n} * rho = {}", e * rho)));
        }
    }
    Ok(())
}

/// Form on the default grid `[ρ · 1e-6, ρ]`; logarithms in `V` are read at `x/γ`.
pub fn assemble(alpha: f64, v: &LogPoly, rho: f64, gamma: f64, n_grid: usize) -> Result<DiscreteForm> {
    assemble_on(alpha, v, (rho * DEFAULT_X_MIN_RATIO, rho), gamma, n_grid)
}

pub fn assemble_on(alpha: f64, v: &LogPoly, span: (f64, f64), gamma: f64, n_grid: usize) -> Result<DiscreteForm> {
    let (x_min, rho) = span;
    if !(x_min > 0.0 && rho > x_min && rho.is_finite()) {
        return Err(Error::Parameter(format!("need 0 < x_min < rho, got ({x_min:e}, {rho:e})")));
    }
    if n_grid < MIN_GRID {
        return Err(Error::Parameter(format!("n_grid = {n_grid} is below {MIN_GRID}")));
    }
    check_gamma(v, rho, gamma)?;
    assemble_grid(alpha, v, geometric_nodes(x_min, rho, n_grid), gamma)
}

fn assemble_grid(alpha: f64, v: &LogPoly, grid: Vec<f64>, gamma: f64) -> Result<DiscreteForm> {
    let n_grid = grid.len();
    let vmid = element_potentials(v, gamma, &grid)?;
    let n = n_grid - 2;
    let mut a_diag = vec![0.0; n];
    let mut a_off = vec![0.0; n.saturating_sub(1)];
    let mut m_diag = vec![0.0; n];
    let mut m_off = vec![0.0; n.saturating_sub(1)];
    // element e joins nodes e and e+1; interior node i is grid node i+1
    for e in 0..n_grid - 1 {
        let (x0, x1) = (grid[e], grid[e + 1]);
        let h = x1 - x0;
        let k = power_integral(alpha, x0, x1) / (h * h);
        let (md, mo) = (h / 3.0, h / 6.0);
        let (vd, vo) = (k + vmid[e] * md, -k + vmid[e] * mo);
        let left = e.checked_sub(1).filter(|&i| i < n);
        let right = if e < n { Some(e) } else { None };
        if let Some(i) = left {
            a_diag[i] += vd;
            m_diag[i] += md;
        }
        if let Some(j) = right {
            a_diag[j] += vd;
            m_diag[j] += md;
        }
        if let (Some(i), Some(_)) = (left, right) {
            a_off[i] += vo;
            m_off[i] += mo;
        }
    }
    Ok(DiscreteForm { grid, alpha, a_diag, a_off, m_diag, m_off })
}

impl DiscreteForm {
    pub fn dim(&self) -> usize {
        self.a_diag.len()
    }

    /// Number of eigenvalues of the pencil below `lambda`.
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut d_prev = 1.0;
        let mut off_prev = 0.0;
        for i in 0..self.dim() {
            let mut d = self.a_diag[i] - lambda * self.m_diag[i];
            if i > 0 {
                d -= off_prev * off_prev / d_prev;
            }
            if d == 0.0 {
                d = -f64::EPSILON * (self.a_diag[i].abs() + (lambda * self.m_diag[i]).abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
            if i + 1 < self.dim() {
                off_prev = self.a_off[i] - lambda * self.m_off[i];
            }
            d_prev = d;
        }
        count
    }

    /// `cᵀ A c` for nodal values `c` on the interior nodes.
    pub fn energy(&self, c: &[f64]) -> f64 {
        tri_quadratic(&self.a_diag, &self.a_off, c)
    }

    pub fn mass(&self, c: &[f64]) -> f64 {
        tri_quadratic(&self.m_diag, &self.m_off, c)
    }
}

fn tri_quadratic(d: &[f64], o: &[f64], c: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..d.len() {
        s += d[i] * c[i] * c[i];
        if i + 1 < d.len() {
            s += 2.0 * o[i] * c[i] * c[i + 1];
        }
    }
    s
}

/// Smallest generalized eigenvalue of the pencil, i.e. the minimal Rayleigh quotient.
pub fn min_rayleigh(form: &DiscreteForm) -> Result<f64> {
    if form.dim() == 0 {
        return Err(Error::Parameter("form has no interior nodes".into()));
    }
    let mut lo = -1.0;
    let mut hi = 1.0;
    let mut tries = 0;
    while form.count_below(lo) > 0 {
        lo *= 4.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Convergence("no lower bracket".into()));
        }
    }
    tries = 0;
    while form.count_below(hi) == 0 {
        hi *= 4.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Convergence("no upper bracket".into()));
        }
    }
    for _ in 0..400 {
        if hi - lo <= EIGEN_RTOL * lo.abs().max(hi.abs()) || hi - lo <= 1e-13 {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if form.count_below(mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Convergence(format!("bracket [{lo:e}, {hi:e}] did not shrink to tolerance")))
}

/// The direct integral of the form for a hat function with nodal values `c`,
/// evaluated element by element without the assembled matrices.
pub fn form_on_function(alpha: f64, v: &LogPoly, gamma: f64, grid: &[f64], c: &[f64]) -> Result<f64> {
    if c.len() + 2 != grid.len() {
        return Err(Error::Parameter("nodal values must cover the interior nodes".into()));
    }
    let vmid = element_potentials(v, gamma, grid)?;
    let f = |i: usize| if i == 0 || i == grid.len() - 1 { 0.0 } else { c[i - 1] };
    let mut s = 0.0;
    for e in 0..grid.len() - 1 {
        let (x0, x1) = (grid[e], grid[e + 1]);
        let h = x1 - x0;
        let (fa, fb) = (f(e), f(e + 1));
        let slope = (fb - fa) / h;
        s += slope * slope * power_integral(alpha, x0, x1);
        s += vmid[e] * h / 3.0 * (fa * fa + fa * fb + fb * fb);
    }
    Ok(s)
}

/// Which inequality is being certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HardyForm {
    /// `V = −(1−α)²/4 · x^{α−2}`.
    Power,
    /// Power form minus `¼ x^{α−2} Σ_j ∏_{ℓ≤j} ln_ℓ(x/γ)^{-2}`.
    Refined,
    /// `V = (3/4 − α/2) x^{α−2} + (α−2)/2 · x^{α−2} Σ_j ∏_{ℓ≤j} ln_ℓ(x/γ)^{-1}`.
    FirstPower,
}

/// Potential of `form` with an extra `−δ x^{α−2}`.
pub fn hardy_potential(form: HardyForm, alpha: &Rational, n: u32, delta: &Rational) -> LogPoly {
    let x = formulas::x_weight(alpha);
    let one_minus = rat(1, 1) - alpha;
    let base = x.scale(&-(&one_minus * &one_minus / rat(4, 1) + delta));
    match form {
        HardyForm::Power => base,
        HardyForm::Refined => {
            let sq: LogPoly = (1..=n).map(|j| formulas::p_prod(j).pow(2)).sum();
            base - (&x * &sq).scale(&rat(1, 4))
        }
        HardyForm::FirstPower => {
            let lead = rat(3, 4) - alpha / rat(2, 1) - delta;
            x.scale(&lead) + (&x * &formulas::s_sum(n)).scale(&((alpha - rat(2, 1)) / rat(2, 1)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub form: HardyForm,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub rho: f64,
    pub gamma: f64,
    pub x_min: f64,
    pub n_grid: usize,
    pub min_quotient: f64,
    pub pass: bool,
}

/// Minimum Rayleigh quotient of `form` on `[x_min, ρ]` and whether it certifies
/// nonnegativity. `n` is ignored for [`HardyForm::Power`].
pub fn hardy_check(
    form: HardyForm,
    alpha: &Rational,
    n: u32,
    rho: f64,
    gamma: f64,
    x_min: f64,
    n_grid: usize,
) -> Result<HardyReport> {
    let n = if form == HardyForm::Power { 0 } else { n };
    if form != HardyForm::Power && !(1..=MAX_REFINED_N).contains(&n) {
        return Err(Error::Parameter(format!("N = {n} must lie in 1..={MAX_REFINED_N}")));
    }
    let v = hardy_potential(form, alpha, n, &rat(0, 1));
    let a = to_f64(alpha);
    let f = assemble_on(a, &v, (x_min, rho), gamma, n_grid)?;
    let q = min_rayleigh(&f)?;
    Ok(HardyReport { form, alpha: a, n, rho, gamma, x_min, n_grid, min_quotient: q, pass: q >= -PASS_TOL })
}

/// Refined (`ln^{-2}`) inequality on the default grid.
pub fn hardy_refined_check(alpha: &Rational, n: u32, rho: f64, gamma: f64, n_grid: usize) -> Result<bool> {
    Ok(hardy_check(HardyForm::Refined, alpha, n, rho, gamma, rho * DEFAULT_X_MIN_RATIO, n_grid)?.pass)
}
