//! Gamma, digamma and Bessel functions on bounded arguments.
//!
//! Bessel functions use ascending series only; real arguments sum the series in
//! double-double arithmetic so that the cancellation at `u ≈ 30` (terms near
//! `1e11`) still leaves better than `1e-10` relative accuracy away from zeros.

use crate::dd::Dd;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const BESSEL_MAX_ARG: f64 = 30.0;
pub const BESSEL_MAX_ORDER: f64 = 50.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) by the Lanczos approximation with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// ψ(x) by upward recurrence to `x >= 10` and the asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain(format!("digamma has a pole at {x}")));
    }
    if x < 0.0 {
        return Ok(digamma(1.0 - x)? - PI / (PI * x).tan());
    }
    let mut acc = 0.0;
    let mut x = x;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let tail = x2
        * (1.0 / 12.0
            - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 * (1.0 / 132.0 - x2 * 691.0 / 32760.0)))));
    Ok(acc + x.ln() - 0.5 / x - tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselKind {
    J,
    Y,
}

fn check_real_domain(nu: f64, u: f64) -> Result<()> {
    if !(u > 0.0 && u <= BESSEL_MAX_ARG) {
        return Err(Error::Domain(format!("Bessel argument {u:e} outside (0, {BESSEL_MAX_ARG}]")));
    }
    if !(nu.abs() <= BESSEL_MAX_ORDER) {
        return Err(Error::Domain(format!("Bessel order {nu} outside [-{BESSEL_MAX_ORDER}, {BESSEL_MAX_ORDER}]")));
    }
    Ok(())
}

fn is_integer(nu: f64) -> bool {
    nu == nu.round()
}

/// `Σ_k (-u²/4)^k / (k! (ν+1)_k)` in double-double.
fn j_series(nu: f64, u: f64) -> Dd {
    let w = Dd::new(u * 0.5) * Dd::new(u * 0.5);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let nu1 = Dd::new(nu) + Dd::ONE;
    for k in 0..400 {
        let kk = Dd::new(k as f64 + 1.0);
        term = -(term * w) / (kk * (nu1 + Dd::new(k as f64)));
        sum = sum + term;
        if term.hi.abs() < 1e-34 * sum.hi.abs() && (k as f64) > u {
            break;
        }
    }
    sum
}

/// `J_ν(u)` for any real order (negative integer orders use `J_{-n} = (-1)^n J_n`).
fn bessel_j_any(nu: f64, u: f64) -> f64 {
    if nu < 0.0 && is_integer(nu) {
        let n = -nu;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return sign * bessel_j_any(n, u);
    }
    let pref = (u * 0.5).powf(nu) / gamma(nu + 1.0);
    pref * j_series(nu, u).to_f64()
}

/// `Y_n(u)` for integer `n >= 0` from the logarithmic series.
fn bessel_y_int(n: u32, u: f64) -> Result<f64> {
    let half = u * 0.5;
    let jn = bessel_j_any(n as f64, u);
    let mut finite = 0.0;
    for k in 0..n {
        // (n-k-1)!/k! (u/2)^{2k-n}
        finite += gamma((n - k) as f64) / gamma(k as f64 + 1.0) * half.powi(2 * k as i32 - n as i32);
    }
    // Σ_k (ψ(k+1) + ψ(n+k+1)) (-u²/4)^k / (k! (n+1)_k) with ψ(m+1) = H_m - γ
    let w = Dd::new(half) * Dd::new(half);
    let mut h_k = Dd::ZERO;
    let mut h_nk = Dd::ZERO;
    for m in 1..=n {
        h_nk = h_nk + Dd::ONE / Dd::new(m as f64);
    }
    let two_gamma = Dd::EULER_GAMMA * 2.0;
    let mut term = Dd::ONE;
    let mut sum = (h_k + h_nk - two_gamma) * term;
    for k in 0..400u32 {
        let k1 = Dd::new(k as f64 + 1.0);
        term = -(term * w) / (k1 * Dd::new((n + k + 1) as f64));
        h_k = h_k + Dd::ONE / k1;
        h_nk = h_nk + Dd::ONE / Dd::new((n + k + 1) as f64);
        let t = (h_k + h_nk - two_gamma) * term;
        sum = sum + t;
        if t.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) && (k as f64) > u {
            break;
        }
    }
    let pref = half.powi(n as i32) / gamma(n as f64 + 1.0);
    Ok((2.0 / PI) * half.ln() * jn - finite / PI - pref * sum.to_f64() / PI)
}

/// Bessel function of the first or second kind, `0 < u <= 30`, `0 <= ν <= 50`.
pub fn bessel(nu: f64, kind: BesselKind, u: f64) -> Result<f64> {
    check_real_domain(nu, u)?;
    if nu < 0.0 {
        return Err(Error::Domain(format!("order {nu} must be >= 0")));
    }
    match kind {
        BesselKind::J => Ok(bessel_j_any(nu, u)),
        BesselKind::Y => bessel_y_any(nu, u),
    }
}

/// `J_ν(u)` for negative non-integer orders as well (used for second solutions).
pub fn bessel_j_signed(nu: f64, u: f64) -> Result<f64> {
    check_real_domain(nu, u)?;
    Ok(bessel_j_any(nu, u))
}

fn bessel_y_any(nu: f64, u: f64) -> Result<f64> {
    if is_integer(nu) {
        return bessel_y_int(nu as u32, u);
    }
    let (s, c) = (PI * nu).sin_cos();
    Ok((bessel_j_any(nu, u) * c - bessel_j_any(-nu, u)) / s)
}

/// `d/du` of the Bessel function via `C'_ν = -C_{ν+1} + (ν/u) C_ν`.
pub fn bessel_derivative(nu: f64, kind: BesselKind, u: f64) -> Result<f64> {
    let v = bessel(nu, kind, u)?;
    let next = match kind {
        BesselKind::J => bessel_j_any(nu + 1.0, u),
        BesselKind::Y => bessel_y_any(nu + 1.0, u)?,
    };
    Ok(-next + nu / u * v)
}

/// `J_ν(w)` for complex `w`, principal branch of `(w/2)^ν`; plain double precision.
pub fn bessel_j_complex(nu: f64, w: Complex64) -> Result<Complex64> {
    check_complex_domain(nu, w)?;
    if nu < 0.0 && is_integer(nu) {
        let n = -nu;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(bessel_j_complex(n, w)? * sign);
    }
    let half = w * 0.5;
    let z2 = -(half * half);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..400 {
        term = term * z2 / ((k as f64 + 1.0) * (nu + k as f64 + 1.0));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() && (k as f64) > w.norm() {
            break;
        }
    }
    Ok(half.powf(nu) / gamma(nu + 1.0) * sum)
}

/// `Y_n(w)` for complex `w` and integer `n >= 0`.
pub fn bessel_y_int_complex(n: u32, w: Complex64) -> Result<Complex64> {
    check_complex_domain(n as f64, w)?;
    let half = w * 0.5;
    let jn = bessel_j_complex(n as f64, w)?;
    let mut finite = Complex64::new(0.0, 0.0);
    for k in 0..n {
        finite += half.powi(2 * k as i32 - n as i32) * (gamma((n - k) as f64) / gamma(k as f64 + 1.0));
    }
    let z2 = -(half * half);
    let mut h_k = 0.0;
    let mut h_nk: f64 = (1..=n).map(|m| 1.0 / m as f64).sum();
    let two_gamma = 2.0 * Dd::EULER_GAMMA.to_f64();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term * (h_k + h_nk - two_gamma);
    for k in 0..400u32 {
        term = term * z2 / ((k as f64 + 1.0) * (n + k + 1) as f64);
        h_k += 1.0 / (k as f64 + 1.0);
        h_nk += 1.0 / (n + k + 1) as f64;
        let t = term * (h_k + h_nk - two_gamma);
        sum += t;
        if t.norm() < 1e-18 * sum.norm().max(1e-300) && (k as f64) > w.norm() {
            break;
        }
    }
    let pref = half.powi(n as i32) / gamma(n as f64 + 1.0);
    Ok(jn * half.ln() * (2.0 / PI) - finite / PI - pref * sum / PI)
}

fn check_complex_domain(nu: f64, w: Complex64) -> Result<()> {
    if !(w.norm() > 0.0 && w.norm() <= BESSEL_MAX_ARG) || !w.is_finite() {
        return Err(Error::Domain(format!("Bessel argument {w} outside 0 < |w| <= {BESSEL_MAX_ARG}")));
    }
    if !(nu.abs() <= BESSEL_MAX_ORDER) {
        return Err(Error::Domain(format!("Bessel order {nu} out of range")));
    }
    Ok(())
}
