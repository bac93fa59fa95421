//! Radial channels of `−∇·|x|^α ∇ + q(|x|)` on a ball in `R^n`.
//!
//! Separating variables in spherical harmonics of degree `ℓ` and removing the
//! factor `r^{(n-1)/2}` leaves the half-line expression
//! `−(d/dr) r^α (d/dr) + c_{n,ℓ,α} r^{α−2} + q(r)` with
//! `c_{n,ℓ,α} = (n−1)(n−3+2α)/4 + ℓ(ℓ+n−2)`.

use crate::criteria::{self, ClassifyOptions, CriterionVerdict};
use crate::error::{Error, Result};
use crate::potdsl::{PotentialSource, Samples};
use crate::symalg::{int, rat, rational_sqrt, to_f64, LogPoly, Rational};
use crate::weyl::EndpointClass;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub const DEFAULT_ELL_MAX: u32 = 8;
/// Largest accepted relative residual of a boundary-value fit.
pub const FIT_RTOL: f64 = 1e-4;
pub const DEFAULT_FIT_X0: f64 = 1e-3;
const FIT_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialChannel {
    pub n: u32,
    pub ell: u32,
    #[serde(with = "criteria::rational_string")]
    pub alpha: Rational,
    /// `ℓ(ℓ+n−2)`.
    #[serde(with = "criteria::rational_string")]
    pub angular: Rational,
    #[serde(with = "criteria::rational_string")]
    pub coupling: Rational,
    /// `γ_α²`; absent when `α = 2`.
    #[serde(skip)]
    pub gamma_sq: Option<Rational>,
    pub gamma_alpha: Option<f64>,
    #[serde(with = "criteria::rational_string")]
    pub alpha_star: Rational,
}

/// Channel `(n, ℓ, α)` with all derived quantities.
pub fn channel(n: u32, ell: u32, alpha: &Rational) -> Result<RadialChannel> {
    if n < 2 {
        return Err(Error::Parameter(format!("dimension n = {n} must be at least 2")));
    }
    let (nr, lr) = (int(n as i64), int(ell as i64));
    let angular = &lr * (&lr + &nr - int(2));
    let coupling = (&nr - int(1)) * (&nr - int(3) + alpha * int(2)) / int(4) + &angular;
    let two_minus = int(2) - alpha;
    let gamma_sq = if two_minus.is_zero() {
        None
    } else {
        let d = &two_minus - &nr;
        Some((&d * &d + &angular * int(4)) / (&two_minus * &two_minus))
    };
    let gamma_alpha = gamma_sq.as_ref().map(|g| rational_sqrt(g).map(|r| to_f64(&r)).unwrap_or(to_f64(g).sqrt()));
    let alpha_star = int(2) - &nr / int(2) - &angular * int(2) / &nr;
    Ok(RadialChannel { n, ell, alpha: alpha.clone(), angular, coupling, gamma_sq, gamma_alpha, alpha_star })
}

impl RadialChannel {
    pub fn alpha_is_two(&self) -> bool {
        self.gamma_sq.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelVerdict {
    pub class_at_zero: EndpointClass,
    pub class_at_r: EndpointClass,
    pub nonoscillatory: bool,
}

fn verdict(lp: bool) -> ChannelVerdict {
    ChannelVerdict {
        class_at_zero: if lp { EndpointClass::LimitPoint } else { EndpointClass::LimitCircle },
        class_at_r: EndpointClass::LimitCircle,
        nonoscillatory: true,
    }
}

/// Classification from `γ_α`: limit point at 0 when `α >= 2` or `γ_α >= 1`.
pub fn classify_channel(ch: &RadialChannel) -> ChannelVerdict {
    let lp = match &ch.gamma_sq {
        None => true,
        Some(g) => ch.alpha > int(2) || *g >= Rational::one(),
    };
    verdict(lp)
}

/// Classification from the threshold form: limit point at 0 iff `α >= α*`.
pub fn classify_by_threshold(ch: &RadialChannel) -> ChannelVerdict {
    verdict(ch.alpha >= ch.alpha_star)
}

/// `c_{n,ℓ,α} x^{α−2}`.
pub fn effective_potential(ch: &RadialChannel) -> LogPoly {
    LogPoly::x_pow(&ch.alpha - int(2)).scale(&ch.coupling)
}

fn shifted_source(ch: &RadialChannel, q: &PotentialSource) -> Result<PotentialSource> {
    let eff = effective_potential(ch);
    match q {
        PotentialSource::Symbolic(p) => PotentialSource::symbolic(&eff + p),
        PotentialSource::Sampled(s) => {
            let c = eff.compile();
            let pts = s.points().map(|(x, v)| Ok((x, v + c.eval(x)?))).collect::<Result<Vec<_>>>()?;
            Ok(PotentialSource::Sampled(Samples::new(pts)?))
        }
    }
}

/// Runs the half-line criteria on `c_{n,ℓ,α} x^{α−2} + q`.
pub fn theorem41_check(ch: &RadialChannel, q: &PotentialSource, opts: &ClassifyOptions) -> Result<CriterionVerdict> {
    criteria::classify_at_zero(&shifted_source(ch, q)?, &ch.alpha, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDetail {
    pub ell: u32,
    #[serde(with = "criteria::rational_string")]
    pub coupling: Rational,
    pub verdict: CriterionVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAdjointnessReport {
    pub n: u32,
    #[serde(with = "criteria::rational_string")]
    pub alpha: Rational,
    /// True when the `ℓ = 0` channel is certified limit point at 0; larger
    /// couplings only strengthen the bound.
    pub self_adjoint: bool,
    pub channels: Vec<ChannelDetail>,
}

pub fn selfadjointness_report(
    n: u32,
    alpha: &Rational,
    q: &PotentialSource,
    opts: &ClassifyOptions,
    ell_max: u32,
) -> Result<SelfAdjointnessReport> {
    let mut channels = Vec::new();
    for ell in 0..=ell_max {
        let ch = channel(n, ell, alpha)?;
        let verdict = theorem41_check(&ch, q, opts)?;
        channels.push(ChannelDetail { ell, coupling: ch.coupling.clone(), verdict });
    }
    Ok(SelfAdjointnessReport {
        n,
        alpha: alpha.clone(),
        self_adjoint: channels[0].verdict.kind.is_limit_point(),
        channels,
    })
}

/// Principal `u₀` and nonprincipal `û₀` zero-energy solutions of the channel.
pub fn channel_solutions(ch: &RadialChannel, x: f64) -> Result<(f64, f64)> {
    let g = ch.gamma_alpha.ok_or_else(|| Error::Precondition("γ_α is undefined at α = 2".into()))?;
    let a = to_f64(&ch.alpha);
    let u0 = x.powf((1.0 - a + (2.0 - a) * g) / 2.0);
    let hat = if ch.gamma_sq.as_ref().is_some_and(|g| g.is_zero()) {
        x.powf((1.0 - a) / 2.0) * (1.0 / x).ln()
    } else {
        x.powf((1.0 - a - (2.0 - a) * g) / 2.0)
    };
    Ok((u0, hat))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFit {
    /// Coefficient of `û₀`.
    pub g_tilde0: f64,
    /// Coefficient of `u₀`.
    pub g_tilde_prime0: f64,
    pub residual: f64,
}

/// Least-squares fit `g ≈ A û₀ + B u₀` over the samples.
pub fn boundary_value_fit(samples: &[(f64, f64)], ch: &RadialChannel) -> Result<BoundaryFit> {
    if ch.alpha_is_two() || ch.alpha > int(2) || classify_channel(ch).class_at_zero == EndpointClass::LimitPoint {
        return Err(Error::Precondition(format!(
            "channel (n={}, ℓ={}, α={}) is limit point at 0",
            ch.n, ch.ell, ch.alpha
        )));
    }
    if samples.len() < 2 {
        return Err(Error::Parameter("need at least two samples".into()));
    }
    let mut cols = [Vec::with_capacity(samples.len()), Vec::with_capacity(samples.len())];
    for &(x, _) in samples {
        let (u0, hat) = channel_solutions(ch, x)?;
        cols[0].push(hat);
        cols[1].push(u0);
    }
    let g: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let scale = [norm(&cols[0]), norm(&cols[1])];
    if scale.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::Fit("degenerate basis on the sample points".into()));
    }
    // modified Gram–Schmidt on the unit-scaled columns
    let q0: Vec<f64> = cols[0].iter().map(|v| v / scale[0]).collect();
    let r01 = dot(&q0, &cols[1]) / scale[1];
    let mut q1: Vec<f64> = cols[1].iter().zip(&q0).map(|(v, q)| v / scale[1] - r01 * q).collect();
    let r11 = norm(&q1);
    if !(r11 > 1e-14) {
        return Err(Error::Fit("basis columns are numerically dependent".into()));
    }
    q1.iter_mut().for_each(|v| *v /= r11);
    let c0 = dot(&q0, &g);
    let c1 = dot(&q1, &g);
    let b_scaled = c1 / r11;
    let a_scaled = c0 - r01 * b_scaled;
    let (a, b) = (a_scaled / scale[0], b_scaled / scale[1]);
    let res: Vec<f64> = g.iter().enumerate().map(|(i, gi)| gi - a * cols[0][i] - b * cols[1][i]).collect();
    let gn = norm(&g);
    let residual = if gn > 0.0 { norm(&res) / gn } else { norm(&res) };
    if residual > FIT_RTOL {
        return Err(Error::Fit(format!("relative residual {residual:e} exceeds {FIT_RTOL:e}")));
    }
    Ok(BoundaryFit { g_tilde0: a, g_tilde_prime0: b, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSensitivity {
    pub x0: f64,
    pub primary: BoundaryFit,
    /// Fit on `[x0/1000, x0/10]`.
    pub shifted: BoundaryFit,
    pub delta_g_tilde0: f64,
    pub delta_g_tilde_prime0: f64,
}

/// Fits `g` on `[x0/100, x0]` and on a window one decade closer to 0.
pub fn boundary_values_with_sensitivity<F: Fn(f64) -> f64>(
    g: F,
    ch: &RadialChannel,
    x0: f64,
) -> Result<FitSensitivity> {
    let sample = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
        criteria::geometric_grid(lo, hi, FIT_SAMPLES).into_iter().map(|x| (x, g(x))).collect()
    };
    let primary = boundary_value_fit(&sample(x0 / 100.0, x0), ch)?;
    let shifted = boundary_value_fit(&sample(x0 / 1000.0, x0 / 10.0), ch)?;
    Ok(FitSensitivity {
        x0,
        delta_g_tilde0: (primary.g_tilde0 - shifted.g_tilde0).abs(),
        delta_g_tilde_prime0: (primary.g_tilde_prime0 - shifted.g_tilde_prime0).abs(),
        primary,
        shifted,
    })
}

/// `−n(n−4+2α)/4 = (3−2α)/4 − (n−1)(n−3+2α)/4`, as an exact difference.
pub fn threshold_identity_defect(n: u32, alpha: &Rational) -> Rational {
    let nr = int(n as i64);
    let lhs = -(&nr * (&nr - int(4) + alpha * int(2))) / int(4);
    let rhs = (int(3) - alpha * int(2)) / int(4) - (&nr - int(1)) * (&nr - int(3) + alpha * int(2)) / int(4);
    lhs - rhs
}

/// `(2−α)²γ_α² − (1−α)² − (n−1)(n−3+2α) − 4ℓ(ℓ+n−2)`, or `None` at `α = 2`.
pub fn gamma_identity_defect(ch: &RadialChannel) -> Option<Rational> {
    let g = ch.gamma_sq.as_ref()?;
    let two_minus = int(2) - &ch.alpha;
    let one_minus = int(1) - &ch.alpha;
    let nr = int(ch.n as i64);
    Some(
        &two_minus * &two_minus * g
            - &one_minus * &one_minus
            - (&nr - int(1)) * (&nr - int(3) + &ch.alpha * int(2))
            - &ch.angular * int(4),
    )
}

/// `α* ± 1/8` sample points around a channel's threshold.
pub fn near_threshold(ch: &RadialChannel) -> [Rational; 2] {
    [&ch.alpha_star - rat(1, 8), &ch.alpha_star + rat(1, 8)]
}
