//! Reference solutions: log-power solutions `y_N`, `y_{N,ε}`, reduction of order,
//! Euler exponents, Bessel-type solutions of `τ_{β,γ} y = z y`, finite-difference
//! residuals, and an L² test near zero.

use crate::criteria::MAX_N;
use crate::error::{Error, Result};
use crate::formulas;
use crate::iterlog;
use crate::potdsl::PotentialSource;
use crate::quad;
use crate::special::{self, BesselKind};
use crate::symalg::{self, rat, rational_sqrt, LogPoly, Rational};
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::sync::Arc;

/// Relative tolerance of the reduction-of-order quadrature.
pub const Y_TILDE_RTOL: f64 = 1e-10;

#[allow(non_snake_case)]
pub fn y_N(n: u32) -> Result<LogPoly> {
    if n > MAX_N {
        return Err(Error::Parameter(format!("N = {n} must be <= {MAX_N}")));
    }
    Ok(formulas::y_n(n))
}

#[allow(non_snake_case)]
pub fn y_N_eps(n: u32, eps: &Rational) -> Result<LogPoly> {
    if n == 0 || n > MAX_N {
        return Err(Error::Parameter(format!("N = {n} must lie in 1..={MAX_N}")));
    }
    if eps.is_negative() {
        return Err(Error::Parameter("eps must be >= 0".into()));
    }
    Ok(formulas::y_n_eps(n, eps))
}

/// Which end the reduction-of-order integral is anchored at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Orientation {
    /// `ỹ(x) = y(x) ∫_x^c t^{-α} y(t)^{-2} dt`; Wronskian `x^α (y ỹ' - y' ỹ) = -1`.
    Inward,
    /// `ỹ(x) = y(x) ∫_c^x t^{-α} y(t)^{-2} dt`; Wronskian `+1`.
    Outward,
}

/// Second solution by reduction of order, inward orientation.
pub fn y_tilde(alpha: &Rational, base: &LogPoly, anchor: f64, x: f64) -> Result<f64> {
    y_tilde_oriented(alpha, base, anchor, x, Orientation::Inward)
}

pub fn y_tilde_oriented(
    alpha: &Rational,
    base: &LogPoly,
    anchor: f64,
    x: f64,
    orientation: Orientation,
) -> Result<f64> {
    let y = base.compile();
    let a = symalg::to_f64(alpha);
    let yx = y.eval(x)?;
    y.eval(anchor)?;
    let mut failure = None;
    let integral = quad::integrate(
        |t| match y.eval(t) {
            Ok(v) => t.powf(-a) / (v * v),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        x,
        anchor,
        Y_TILDE_RTOL,
        quad::MAX_INTERVALS,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let integral = integral?;
    Ok(match orientation {
        Orientation::Inward => yx * integral,
        Orientation::Outward => -yx * integral,
    })
}

/// Indicial exponents of `τ_{α,0,β} y = 0` with `y = x^γ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentPair {
    pub gamma1: Complex64,
    pub gamma2: Complex64,
    /// `β = (2-α)²/4`: both exponents coincide and the second solution is `x^γ ln(1/x)`.
    pub degenerate: bool,
    /// Exact exponents when the discriminant is the square of a rational.
    #[serde(skip)]
    pub exact: Option<[Rational; 2]>,
}

/// `γ_j = (1-α)/2 - (1/2)(-1)^j sqrt((2-α)² - 4β)`, imaginary root for a negative discriminant.
pub fn gamma_exponents(alpha: &Rational, beta: &Rational) -> Result<ExponentPair> {
    if *alpha >= rat(2, 1) || !beta.is_positive() {
        return Err(Error::Parameter("requires alpha < 2 and beta > 0".into()));
    }
    let center = (rat(1, 1) - alpha) / rat(2, 1);
    let two_minus = rat(2, 1) - alpha;
    let disc = &two_minus * &two_minus - beta * rat(4, 1);
    let c = symalg::to_f64(&center);
    let d = symalg::to_f64(&disc);
    let (g1, g2) = if d >= 0.0 {
        let r = 0.5 * d.sqrt();
        (Complex64::new(c + r, 0.0), Complex64::new(c - r, 0.0))
    } else {
        let r = 0.5 * (-d).sqrt();
        (Complex64::new(c, r), Complex64::new(c, -r))
    };
    let exact = if disc.is_negative() {
        None
    } else {
        rational_sqrt(&disc).map(|r| {
            let h = r / rat(2, 1);
            [&center + &h, &center - &h]
        })
    };
    Ok(ExponentPair { gamma1: g1, gamma2: g2, degenerate: disc.is_zero(), exact })
}

/// Exact solution `x^{γ_j}` (or `x^γ ln_1` in the degenerate case, `j = 2`) when
/// the exponents are rational.
pub fn euler_solution_poly(alpha: &Rational, beta: &Rational, j: u8) -> Result<Option<LogPoly>> {
    let pair = gamma_exponents(alpha, beta)?;
    let Some([g1, g2]) = pair.exact else { return Ok(None) };
    Ok(Some(match (j, pair.degenerate) {
        (1, _) => LogPoly::x_pow(g1),
        (2, false) => LogPoly::x_pow(g2),
        (2, true) => LogPoly::monomial(rat(1, 1), g2, &[(1, rat(1, 1))]),
        _ => return Err(Error::Parameter("j must be 1 or 2".into())),
    }))
}

/// A solution evaluator with a short description of what it evaluates.
#[derive(Clone)]
pub struct SolutionFn {
    eval: Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>,
    pub description: String,
    pub domain: (f64, f64),
}

impl std::fmt::Debug for SolutionFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionFn").field("description", &self.description).field("domain", &self.domain).finish()
    }
}

impl SolutionFn {
    pub fn new<F>(description: impl Into<String>, domain: (f64, f64), f: F) -> Self
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        SolutionFn { eval: Arc::new(f), description: description.into(), domain }
    }

    /// Evaluator for a symbolic solution near zero.
    pub fn from_poly(p: &LogPoly, description: impl Into<String>) -> Result<Self> {
        let depth = p.max_depth();
        let hi = if depth == 0 { f64::INFINITY } else { iterlog::positivity_bound(depth)? };
        let c = p.compile();
        Ok(Self::new(description, (0.0, hi), move |x| c.eval(x)))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > self.domain.0 && x < self.domain.1) {
            return Err(Error::Domain(format!(
                "x = {x:e} outside ({:e}, {:e}) for {}",
                self.domain.0, self.domain.1, self.description
            )));
        }
        (self.eval)(x)
    }
}

/// Coefficient `((2-β)²γ² - (1-β)²)/4` of `x^{β-2}` in `τ_{β,γ}`.
pub fn bessel_coupling(beta: f64, gamma: f64) -> f64 {
    ((2.0 - beta).powi(2) * gamma * gamma - (1.0 - beta).powi(2)) / 4.0
}

/// Solutions of `τ_{β,γ} y = z y`: `x^{(1-β)/2} C(2 z^{1/2} x^{(2-β)/2} / (2-β))`
/// with `C = J_γ` for `j = 1` and `J_{-γ}` (non-integer `γ`) or `Y_γ` (integer `γ`) for `j = 2`.
pub fn bessel_solution(beta: &Rational, gamma: f64, z: Complex64, j: u8, x: f64) -> Result<Complex64> {
    if *beta == rat(2, 1) {
        return Err(Error::Parameter("beta = 2 has no Bessel-type solution".into()));
    }
    if !(gamma >= 0.0) {
        return Err(Error::Parameter("gamma must be >= 0".into()));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x = {x:e} must be positive")));
    }
    if j != 1 && j != 2 {
        return Err(Error::Parameter("j must be 1 or 2".into()));
    }
    let b = symalg::to_f64(beta);
    let w = z.sqrt() * (2.0 * x.powf((2.0 - b) / 2.0) / (2.0 - b));
    let pref = x.powf((1.0 - b) / 2.0);
    let integer = gamma == gamma.round();
    let real_path = w.im == 0.0 && w.re > 0.0;
    let c = match (j, integer, real_path) {
        (1, _, true) => Complex64::new(special::bessel(gamma, BesselKind::J, w.re)?, 0.0),
        (1, _, false) => special::bessel_j_complex(gamma, w)?,
        (2, true, true) => Complex64::new(special::bessel(gamma, BesselKind::Y, w.re)?, 0.0),
        (2, true, false) => special::bessel_y_int_complex(gamma as u32, w)?,
        (2, false, true) => Complex64::new(special::bessel_j_signed(-gamma, w.re)?, 0.0),
        _ => special::bessel_j_complex(-gamma, w)?,
    };
    Ok(c * pref)
}

/// Principal and nonprincipal solutions of `τ_{β,γ} u = 0` at zero.
pub fn zero_energy_solutions(beta: &Rational, gamma: f64, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x:e} must lie in (0, 1)")));
    }
    let b = symalg::to_f64(beta);
    let principal = x.powf((1.0 - b + (2.0 - b) * gamma) / 2.0);
    let nonprincipal = if *beta == rat(2, 1) {
        x.powf(-0.5) * (-x.ln())
    } else if gamma > 0.0 {
        x.powf((1.0 - b - (2.0 - b) * gamma) / 2.0)
    } else {
        x.powf((1.0 - b) / 2.0) * (-x.ln())
    };
    Ok((principal, nonprincipal))
}

/// `-(x^α y')' + q y` by centered differences with one Richardson step.
///
/// Uses `y` at `x + k h`, `k = -2..=2`.
pub fn residual_numeric(alpha: f64, q: &PotentialSource, y: &SolutionFn, x: f64, h: f64) -> Result<f64> {
    let qx = q.value(x)?;
    let r = residual_stencil(alpha, |t| y.eval(t).map(|v| Complex64::new(v, 0.0)), x, h)?;
    Ok(r.re + qx * y.eval(x)?)
}

/// `-(x^α y')'` for a complex-valued `y`, same stencil as [`residual_numeric`].
pub fn residual_stencil<F>(alpha: f64, y: F, x: f64, h: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if !(h > 0.0 && x - 2.0 * h > 0.0) {
        return Err(Error::Domain(format!("stencil [x - 2h, x + 2h] leaves (0, inf) at x = {x:e}")));
    }
    let pts: Vec<Complex64> = (-2..=2).map(|k| y(x + k as f64 * h)).collect::<Result<_>>()?;
    // central scheme with step s uses y at x, x ± 2s
    let scheme = |s: f64, ym: Complex64, y0: Complex64, yp: Complex64| {
        let fp = (x + s).powf(alpha) * (yp - y0) / (2.0 * s);
        let fm = (x - s).powf(alpha) * (y0 - ym) / (2.0 * s);
        -(fp - fm) / (2.0 * s)
    };
    let coarse = scheme(h, pts[0], pts[2], pts[4]);
    let fine = scheme(h / 2.0, pts[1], pts[2], pts[3]);
    Ok((fine * 4.0 - coarse) / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum L2Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct L2Report {
    pub verdict: L2Verdict,
    /// Integrals of `y²` over windows `u ∈ [2^i, 2^{i+1}]`, `u = ln_{L+1}(x)`.
    pub windows: Vec<f64>,
    /// Sum of all windows plus a geometric tail (converging case only).
    pub estimate: Option<f64>,
}

const L2_MAX_WINDOWS: usize = 40;
const L2_TAIL: usize = 6;
/// Tail ratio below which the window sums are judged summable.
pub const L2_CONVERGE_RATIO: f64 = 0.95;
/// Partial-sum growth (relative to the first window) that counts as divergence.
pub const L2_DIVERGE_GROWTH: f64 = 1e4;

/// Square-integrability of a single-monomial `y` near zero.
///
/// With `L` the deepest log in `y` and `u = ln_{L+1}(x)`, `∫ y² dx` becomes
/// `∫ exp(φ(u)) du`, where `φ` only involves the log tower above `u`. Windows far
/// beyond double range in `x` therefore stay computable. Windows are dyadic in `u`
/// from `u = 1`; the finite piece between any fixed `δ` and there does not affect
/// convergence.
pub fn l2_near_zero(y: &LogPoly) -> Result<L2Report> {
    let terms = y.terms();
    let [m] = terms.as_slice() else {
        return Err(Error::Parameter("l2_near_zero expects a single monomial".into()));
    };
    let l = m.depth() as usize;
    let p = symalg::to_f64(&m.xpow);
    let log_c2 = 2.0 * symalg::to_f64(&m.coef).abs().ln();
    // φ = ln c² - (2p+1) ln_1 + Σ_{k=1}^{L} (2 e_k + 1) ln_{k+1}; coefs[j] multiplies ln_{j+1}
    let mut coefs = vec![-(2.0 * p + 1.0)];
    for k in 1..=l as u32 {
        coefs.push(2.0 * m.logexps.get(&k).map(symalg::to_f64).unwrap_or(0.0) + 1.0);
    }
    let phi = move |u: f64| -> f64 {
        let mut acc = log_c2;
        let mut v = u;
        for c in coefs.iter().rev() {
            if *c != 0.0 {
                acc += c * v;
            }
            v = v.exp();
        }
        acc
    };
    let mut windows = Vec::with_capacity(L2_MAX_WINDOWS);
    let mut verdict = L2Verdict::Inconclusive;
    for i in 0..L2_MAX_WINDOWS {
        let (a, b) = (2f64.powi(i as i32), 2f64.powi(i as i32 + 1));
        let w = quad::integrate(|u| phi(u).exp(), a, b, 1e-10, 1 << 16)?;
        windows.push(w);
        let partial: f64 = windows.iter().sum();
        if w.is_infinite() || partial >= L2_DIVERGE_GROWTH * windows[0] {
            verdict = L2Verdict::Diverges;
            break;
        }
        if windows.len() > L2_TAIL && tail_ratios(&windows).iter().all(|&r| r < L2_CONVERGE_RATIO) {
            verdict = L2Verdict::Converges;
            break;
        }
    }
    let estimate = (verdict == L2Verdict::Converges).then(|| {
        let r = *tail_ratios(&windows).last().expect("tail");
        let last = *windows.last().expect("windows");
        windows.iter().sum::<f64>() + last * r / (1.0 - r)
    });
    Ok(L2Report { verdict, windows, estimate })
}

fn tail_ratios(windows: &[f64]) -> Vec<f64> {
    windows[windows.len() - L2_TAIL - 1..].windows(2).map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potdsl::parse;
    use crate::symalg::int;

    #[test]
    fn log_power_solutions() {
        assert_eq!(y_N(0).unwrap(), parse("x^-1/2").unwrap());
        assert_eq!(y_N(2).unwrap(), parse("x^-1/2 * ln1(x)^-1/2 * ln2(x)^-1/2").unwrap());
        assert_eq!(y_N_eps(1, &rat(1, 2)).unwrap(), parse("x^-1/2 * ln1(x)^-3/4").unwrap());
        assert_eq!(y_N_eps(2, &int(1)).unwrap(), parse("x^-1/2 * ln1(x)^-1/2 * ln2(x)^-1").unwrap());
        for n in 1..=4 {
            assert_eq!(y_N_eps(n, &int(0)).unwrap(), y_N(n).unwrap());
        }
        assert!(y_N(5).is_err());
        assert!(y_N_eps(0, &rat(1, 2)).is_err());
    }

    #[test]
    fn exponent_examples() {
        let p = gamma_exponents(&int(0), &rat(3, 4)).unwrap();
        assert_eq!(p.exact, Some([int(1), int(0)]));
        let p = gamma_exponents(&int(0), &int(1)).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.exact, Some([rat(1, 2), rat(1, 2)]));
        let p = gamma_exponents(&int(0), &int(2)).unwrap();
        assert_eq!(p.gamma1, Complex64::new(0.5, 1.0));
        assert_eq!(p.gamma2, Complex64::new(0.5, -1.0));
        assert!(p.exact.is_none());
    }

    #[test]
    fn zero_energy_examples() {
        let x = 0.3;
        // coupling vanishes at (0, 1/2), so the solutions are x and 1
        let (u, v) = zero_energy_solutions(&int(0), 0.5, x).unwrap();
        assert!((u - x).abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
        assert_eq!(bessel_coupling(0.0, 0.5), 0.0);
        let (_, v) = zero_energy_solutions(&int(0), 0.0, x).unwrap();
        assert!((v - x.sqrt() * (1.0 / x).ln()).abs() < 1e-15);
        let (_, v) = zero_energy_solutions(&int(2), 3.7, x).unwrap();
        assert!((v - (1.0 / x).ln() / x.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn l2_dichotomy() {
        for n in 0..=4 {
            let r = l2_near_zero(&y_N(n).unwrap()).unwrap();
            assert_eq!(r.verdict, L2Verdict::Diverges, "N = {n}");
        }
        for n in 1..=4 {
            for eps in [rat(1, 10), rat(1, 2), int(1)] {
                let r = l2_near_zero(&y_N_eps(n, &eps).unwrap()).unwrap();
                assert_eq!(r.verdict, L2Verdict::Converges, "N = {n}");
            }
        }
        // x^0 is trivially square-integrable near zero
        assert_eq!(l2_near_zero(&LogPoly::one()).unwrap().verdict, L2Verdict::Converges);
        assert_eq!(l2_near_zero(&parse("x^-1").unwrap()).unwrap().verdict, L2Verdict::Diverges);
    }

    #[test]
    fn residual_of_linear_function() {
        let y = SolutionFn::new("x", (0.0, f64::INFINITY), Ok);
        let q = PotentialSource::parse("0").unwrap();
        for &x in &[0.1, 1.0, 7.0] {
            assert!(residual_numeric(0.0, &q, &y, x, 1e-3).unwrap().abs() < 1e-9);
        }
    }
}
