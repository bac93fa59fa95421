//! Numerical Weyl alternative: integrate two solutions of `(τ − z)u = 0` toward a
//! singular endpoint and judge whether they are square integrable.
//!
//! Integration runs in `s = ln x` with state `(u, w)`, `w = x u′`. For
//! `τ = r^{-1}[−(p u′)′ + q u]` this gives
//!
//! ```text
//! du/ds = w
//! dw/ds = (1 − x p′/p) w + x² (q − z r)/p · u
//! ```
//!
//! which has constant coefficients for Euler-type problems. Toward `x = 0` the
//! variable `s` decreases, which is the same as stepping forward in `t = ln(1/x)`.

use crate::criteria::{self, Endpoint};
use crate::error::{Error, Result};
use crate::iterlog;
use crate::potdsl::PotentialSource;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use std::fmt;
use std::sync::Arc;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type PotentialFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Dense output points per dyadic window for zero counting and comparison.
pub const DENSE_PER_WINDOW: usize = 64;

const RESCALE_HI: f64 = 1e100;
const RESCALE_LO: f64 = 1e-100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndpointKind {
    Regular,
    Singular,
}

/// `τ = r^{-1}[−(d/dx) p (d/dx) + q]` on `(a, b)` with `0 <= a < b <= ∞`.
#[derive(Clone)]
pub struct SLProblem {
    p: RealFn,
    dp: RealFn,
    q: PotentialFn,
    r: RealFn,
    interval: (f64, f64),
    endpoints: [EndpointKind; 2],
    anchors: [f64; 2],
}

impl fmt::Debug for SLProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SLProblem")
            .field("interval", &self.interval)
            .field("endpoints", &self.endpoints)
            .field("anchors", &self.anchors)
            .finish_non_exhaustive()
    }
}

impl SLProblem {
    /// General problem; `dp` is the derivative of `p`.
    pub fn new(
        p: RealFn,
        dp: RealFn,
        q: PotentialFn,
        r: RealFn,
        interval: (f64, f64),
        endpoints: [EndpointKind; 2],
    ) -> Result<Self> {
        let (a, b) = interval;
        if !(a >= 0.0 && b > a) || a.is_infinite() {
            return Err(Error::Parameter(format!("interval ({a:e}, {b:e}) must satisfy 0 <= a < b")));
        }
        Ok(SLProblem {
            p,
            dp,
            q,
            r,
            interval,
            endpoints,
            anchors: [if b.is_finite() { 0.5 * b } else { 0.5 }, if a > 0.0 { 2.0 * a } else { 2.0 }],
        })
    }

    /// `p = x^α`, `r = 1` on `(0, ∞)`, both endpoints singular. Logarithms in a
    /// symbolic `q` are read with respect to `endpoint` (`ln_k` near zero,
    /// `Ln_k` near infinity).
    pub fn power_weight(alpha: f64, q: &PotentialSource, endpoint: Endpoint) -> Result<Self> {
        let (qf, depth): (PotentialFn, u32) = match q {
            PotentialSource::Symbolic(poly) => {
                let c = poly.compile();
                let d = c.depth();
                match endpoint {
                    Endpoint::Zero => (Arc::new(move |x| c.eval(x)), d),
                    Endpoint::Infinity => (Arc::new(move |x| c.eval_at_infinity(x)), d),
                }
            }
            PotentialSource::Sampled(s) => {
                let s = s.clone();
                (Arc::new(move |x| s.interpolate(x)), 0)
            }
        };
        let mut prob = SLProblem::new(
            Arc::new(move |x: f64| x.powf(alpha)),
            Arc::new(move |x: f64| alpha * x.powf(alpha - 1.0)),
            qf,
            Arc::new(|_| 1.0),
            (0.0, f64::INFINITY),
            [EndpointKind::Singular; 2],
        )?;
        prob.anchors[0] = 0.5 * iterlog::positivity_bound(depth + 1)?;
        prob.anchors[1] = criteria::default_infinity_window(depth)?.0;
        if let PotentialSource::Sampled(s) = q {
            let (lo, hi) = s.hull();
            prob.anchors = [hi, lo];
        }
        Ok(prob)
    }

    /// Replaces the default anchor used when probing `endpoint`.
    pub fn with_anchor(mut self, endpoint: Endpoint, c: f64) -> Result<Self> {
        if !(c > self.interval.0 && c < self.interval.1) {
            return Err(Error::Parameter(format!("anchor {c:e} is not interior")));
        }
        self.anchors[endpoint_index(endpoint)] = c;
        Ok(self)
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn anchor(&self, endpoint: Endpoint) -> f64 {
        self.anchors[endpoint_index(endpoint)]
    }

    pub fn endpoint_kind(&self, endpoint: Endpoint) -> EndpointKind {
        self.endpoints[endpoint_index(endpoint)]
    }

    pub fn p(&self, x: f64) -> f64 {
        (self.p)(x)
    }

    pub fn q(&self, x: f64) -> Result<f64> {
        (self.q)(x)
    }

    pub fn r(&self, x: f64) -> f64 {
        (self.r)(x)
    }

    /// Right-hand side in `s = ln x`; slot 4 accumulates `|u|² r x`.
    fn rhs(&self, z: Complex64, s: f64, y: &[f64; 5]) -> Result<[f64; 5]> {
        let x = s.exp();
        let p = (self.p)(x);
        let r = (self.r)(x);
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Coefficient { x, reason: format!("p = {p:e} is not positive") });
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Coefficient { x, reason: format!("r = {r:e} is not positive") });
        }
        let q = (self.q)(x)?;
        if !q.is_finite() {
            return Err(Error::Coefficient { x, reason: format!("q = {q:e} is not finite") });
        }
        let a = x * (self.dp)(x) / p;
        let k = x * x / p;
        let (br, bi) = (k * (q - z.re * r), -k * z.im * r);
        let (ur, ui, wr, wi) = (y[0], y[1], y[2], y[3]);
        Ok([
            wr,
            wi,
            (1.0 - a) * wr + br * ur - bi * ui,
            (1.0 - a) * wi + br * ui + bi * ur,
            (ur * ur + ui * ui) * r * x,
        ])
    }
}

fn endpoint_index(e: Endpoint) -> usize {
    match e {
        Endpoint::Zero => 0,
        Endpoint::Infinity => 1,
    }
}

/// Solution value at an output point. True `u` is `u · exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub x: f64,
    pub u: Complex64,
    pub u_quasi: Complex64,
    pub log_scale: f64,
}

impl Checkpoint {
    pub fn true_u(&self) -> Complex64 {
        self.u * self.log_scale.exp()
    }

    pub fn true_u_quasi(&self) -> Complex64 {
        self.u_quasi * self.log_scale.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub checkpoints: Vec<Checkpoint>,
    /// `ln ∫ |u|² r dx` over each segment between consecutive checkpoints,
    /// the first segment starting at the anchor.
    pub log_window_masses: Vec<f64>,
}

impl Trajectory {
    pub fn window_masses(&self) -> Vec<f64> {
        self.log_window_masses.iter().map(|l| l.exp()).collect()
    }
}

struct Sample {
    s: f64,
    y: [f64; 5],
    log_scale: f64,
    seg_log_mass: f64,
}

// Dormand–Prince 5(4)
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

fn state_norm(y: &[f64; 5]) -> f64 {
    y[..4].iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Integrates from `s0` through each of `outputs` (monotone in the direction of travel).
fn run(
    prob: &SLProblem,
    z: Complex64,
    s0: f64,
    u0: Complex64,
    w0: Complex64,
    outputs: &[f64],
    rtol: f64,
    max_steps: usize,
    mut stop: impl FnMut(&[Sample]) -> bool,
) -> Result<Vec<Sample>> {
    let mut y = [u0.re, u0.im, w0.re, w0.im, 0.0];
    let mut log_scale = 0.0;
    let mag = state_norm(&y);
    if mag == 0.0 || !mag.is_finite() {
        return Err(Error::Parameter("initial data must be finite and not both zero".into()));
    }
    if !(RESCALE_LO..=RESCALE_HI).contains(&mag) {
        for v in &mut y[..4] {
            *v /= mag;
        }
        log_scale = mag.ln();
    }
    let mut s = s0;
    let mut h = 0.0f64;
    let mut k1 = prob.rhs(z, s, &y)?;
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(outputs.len());
    for &target in outputs {
        let dir = if target >= s { 1.0 } else { -1.0 };
        if h == 0.0 || h.signum() != dir {
            h = dir * 1e-3;
        }
        while (target - s) * dir > 0.0 {
            let remaining = target - s;
            let last = h.abs() >= remaining.abs();
            let hh = if last { remaining } else { h };
            let mut k = [[0.0f64; 5]; 7];
            k[0] = k1;
            for i in 1..7 {
                let mut yi = y;
                for (j, kj) in k.iter().enumerate().take(i) {
                    let a = A[i][j];
                    if a != 0.0 {
                        for c in 0..5 {
                            yi[c] += hh * a * kj[c];
                        }
                    }
                }
                if i == 6 {
                    k[6] = prob.rhs(z, s + hh, &yi)?;
                    // yi is the fifth-order solution
                    // u and w are weighed separately: w/u can be as small as x
                    let floor = 1e-20 * state_norm(&y).max(state_norm(&yi)) + 1e-300;
                    let mut ratio = 0.0f64;
                    for pair in [0, 2] {
                        let mut err = 0.0f64;
                        for c in pair..pair + 2 {
                            let e: f64 = (0..7).map(|j| E[j] * k[j][c]).sum::<f64>() * hh;
                            err = err.max(e.abs());
                        }
                        let size = y[pair].hypot(y[pair + 1]).max(yi[pair].hypot(yi[pair + 1]));
                        ratio = ratio.max(err / (rtol * size + floor));
                    }
                    steps += 1;
                    if steps > max_steps {
                        return Err(Error::StepFailure {
                            x: s.exp(),
                            reason: format!("step budget of {max_steps} exhausted"),
                        });
                    }
                    if !ratio.is_finite() {
                        return Err(Error::StepFailure { x: s.exp(), reason: "non-finite state".into() });
                    }
                    let fac = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                    if ratio <= 1.0 {
                        s = if last { target } else { s + hh };
                        y = yi;
                        k1 = k[6];
                        if !last || fac < 1.0 {
                            h = hh * fac;
                        }
                        let mag = state_norm(&y);
                        if mag > RESCALE_HI || (mag < RESCALE_LO && mag > 0.0) {
                            for v in &mut y[..4] {
                                *v /= mag;
                            }
                            y[4] /= mag * mag;
                            for v in &mut k1[..4] {
                                *v /= mag;
                            }
                            k1[4] /= mag * mag;
                            log_scale += mag.ln();
                        }
                    } else {
                        h = hh * fac;
                        if h.abs() < 1e-13 * s.abs().max(1.0) {
                            return Err(Error::StepFailure {
                                x: s.exp(),
                                reason: format!("step size {h:e} below resolution"),
                            });
                        }
                    }
                    break;
                }
                k[i] = prob.rhs(z, s + C[i] * hh, &yi)?;
            }
        }
        let m = y[4].abs();
        out.push(Sample { s, y, log_scale, seg_log_mass: m.ln() + 2.0 * log_scale });
        if stop(&out) {
            break;
        }
        y[4] = 0.0;
        k1 = prob.rhs(z, s, &y)?;
    }
    Ok(out)
}

fn to_checkpoint(prob: &SLProblem, smp: &Sample) -> Checkpoint {
    let x = smp.s.exp();
    let u = Complex64::new(smp.y[0], smp.y[1]);
    let w = Complex64::new(smp.y[2], smp.y[3]);
    Checkpoint { x, u, u_quasi: w * (prob.p(x) / x), log_scale: smp.log_scale }
}

fn check_anchor(prob: &SLProblem, c: f64) -> Result<()> {
    let (a, b) = prob.interval;
    if !(c > a && c < b && c.is_finite()) {
        return Err(Error::Parameter(format!("anchor {c:e} is not interior to ({a:e}, {b:e})")));
    }
    Ok(())
}

/// Solves from `(u, u_quasi)` at `anchor` to `target_x`, with checkpoints at the
/// dyadic points `anchor · 2^{∓k}` and at `target_x`.
pub fn integrate_toward_endpoint(
    prob: &SLProblem,
    z: Complex64,
    anchor: f64,
    initial: (Complex64, Complex64),
    target_x: f64,
    rtol: f64,
    max_steps: usize,
) -> Result<Trajectory> {
    check_anchor(prob, anchor)?;
    if !(target_x > 0.0 && target_x.is_finite()) || target_x == anchor {
        return Err(Error::Parameter(format!(
            "target {target_x:e} must be positive, finite and differ from the anchor"
        )));
    }
    let (s0, s1) = (anchor.ln(), target_x.ln());
    let dir = (s1 - s0).signum();
    let mut outputs = Vec::new();
    let mut k = 1.0;
    while (s0 + dir * k * LN_2 - s1) * dir < 0.0 {
        outputs.push(s0 + dir * k * LN_2);
        k += 1.0;
    }
    outputs.push(s1);
    let w0 = initial.1 * (anchor / prob.p(anchor));
    let samples = run(prob, z, s0, initial.0, w0, &outputs, rtol, max_steps, |_| false)?;
    Ok(Trajectory {
        checkpoints: samples.iter().map(|s| to_checkpoint(prob, s)).collect(),
        log_window_masses: samples.iter().map(|s| s.seg_log_mass).collect(),
    })
}

/// `p (u₁ u₂′ − u₁′ u₂)` from two checkpoints at the same `x`.
pub fn wronskian(a: &Checkpoint, b: &Checkpoint) -> Complex64 {
    (a.u * b.u_quasi - a.u_quasi * b.u) * (a.log_scale + b.log_scale).exp()
}

/// Heuristics for the numerical Weyl probe. All thresholds are declared here;
/// `Inconclusive` is an ordinary outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylOptions {
    pub z: Complex64,
    /// Overrides the problem's default anchor.
    pub anchor: Option<f64>,
    /// Probed span `|ln(deepest_x / anchor)|`; defaults to 100 at zero and ten
    /// dyadic windows at infinity.
    pub depth: Option<f64>,
    pub rho_max: f64,
    pub m: usize,
    pub growth: f64,
    pub tail_tol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for WeylOptions {
    fn default() -> Self {
        WeylOptions {
            z: Complex64::new(0.0, 1.0),
            anchor: None,
            depth: None,
            rho_max: 0.9,
            m: 6,
            growth: 1e8,
            tail_tol: 1e-3,
            rtol: 1e-10,
            max_steps: 4_000_000,
        }
    }
}

pub const DEFAULT_DEPTH_ZERO: f64 = 100.0;

// solutions at infinity vary on the scale x^{α/2}/|z|^{1/2}, so step counts
// grow quickly with the span
pub const DEFAULT_DEPTH_INFINITY: f64 = 10.0 * LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeylKind {
    LimitPoint,
    LimitCircle,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum L2Judgment {
    SquareIntegrable,
    NotSquareIntegrable,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub kind: WeylKind,
    pub method: String,
    pub endpoint: Endpoint,
    pub z: Complex64,
    pub anchor: f64,
    pub deepest_x: f64,
    /// Judgments for the solutions with data `(1, 0)` and `(0, 1)` at the anchor.
    pub verdicts: [L2Judgment; 2],
    /// Successive window ratios `I_{k+1}/I_k`.
    pub ratios: [Vec<f64>; 2],
    /// Window masses `I_k / I_0`; `null` in JSON when out of range.
    pub window_masses: [Vec<f64>; 2],
}

// ratios that equal one up to the integration tolerance count as "≥ 1"
const UNIT_RATIO_SLACK: f64 = 1e-9;

fn log_sum_exp(ls: &[f64]) -> f64 {
    let m = ls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + ls.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

fn log_sum_exp_iter(samples: &[Sample]) -> f64 {
    log_sum_exp(&samples.iter().map(|s| s.seg_log_mass).collect::<Vec<_>>())
}

fn judge(log_masses: &[f64], opts: &WeylOptions) -> L2Judgment {
    let n = log_masses.len();
    let total = log_sum_exp(log_masses);
    if total - log_masses[0] >= opts.growth.ln() {
        return L2Judgment::NotSquareIntegrable;
    }
    if n < opts.m + 1 {
        return L2Judgment::Undecided;
    }
    let log_ratios: Vec<f64> = log_masses.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &log_ratios[log_ratios.len() - opts.m..];
    if tail.iter().all(|&l| l >= (-UNIT_RATIO_SLACK).ln_1p()) {
        return L2Judgment::NotSquareIntegrable;
    }
    let rho = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp();
    if rho <= opts.rho_max {
        let bound = log_masses[n - 1] + (rho / (1.0 - rho)).ln();
        if bound < opts.tail_tol.ln() + total {
            return L2Judgment::SquareIntegrable;
        }
    }
    L2Judgment::Undecided
}

/// Numerical Weyl alternative at `endpoint`.
pub fn classify_endpoint(prob: &SLProblem, endpoint: Endpoint, opts: &WeylOptions) -> Result<WeylReport> {
    if prob.endpoint_kind(endpoint) != EndpointKind::Singular {
        return Err(Error::Precondition(format!("{endpoint:?} endpoint is regular")));
    }
    let (a, b) = prob.interval;
    match endpoint {
        Endpoint::Zero if a != 0.0 => return Err(Error::Precondition("left endpoint is not x = 0".into())),
        Endpoint::Infinity if b.is_finite() => return Err(Error::Precondition("right endpoint is not x = ∞".into())),
        _ => {}
    }
    if opts.m == 0 || !(opts.rho_max > 0.0 && opts.rho_max < 1.0) || !(opts.growth > 1.0) || !(opts.tail_tol > 0.0) {
        return Err(Error::Parameter("heuristic thresholds out of range".into()));
    }
    let c = opts.anchor.unwrap_or(prob.anchor(endpoint));
    check_anchor(prob, c)?;
    let depth = opts.depth.unwrap_or(match endpoint {
        Endpoint::Zero => DEFAULT_DEPTH_ZERO,
        Endpoint::Infinity => DEFAULT_DEPTH_INFINITY,
    });
    let windows = (depth / LN_2).floor() as usize;
    if windows < opts.m + 1 {
        return Err(Error::Parameter(format!("probe depth {depth} gives only {windows} windows")));
    }
    let dir = match endpoint {
        Endpoint::Zero => -1.0,
        Endpoint::Infinity => 1.0,
    };
    let s0 = c.ln();
    let outputs: Vec<f64> = (1..=windows).map(|k| s0 + dir * k as f64 * LN_2).collect();
    let log_growth = opts.growth.ln();
    let mut deepest_x = c;
    let mut verdicts = [L2Judgment::Undecided; 2];
    let mut ratios: [Vec<f64>; 2] = Default::default();
    let mut masses: [Vec<f64>; 2] = Default::default();
    let data =
        [(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))];
    for (i, (u0, uq0)) in data.into_iter().enumerate() {
        let w0 = uq0 * (c / prob.p(c));
        let samples = run(prob, opts.z, s0, u0, w0, &outputs, opts.rtol, opts.max_steps, |done| {
            // partial sums only grow, so this decision is final
            log_sum_exp_iter(done) - done[0].seg_log_mass >= log_growth
        })?;
        let reached = samples.last().map_or(c, |s| s.s.exp());
        if (reached.ln() - c.ln()).abs() > (deepest_x.ln() - c.ln()).abs() {
            deepest_x = reached;
        }
        let lm: Vec<f64> = samples.iter().map(|s| s.seg_log_mass).collect();
        verdicts[i] = judge(&lm, opts);
        ratios[i] = lm.windows(2).map(|w| (w[1] - w[0]).exp()).collect();
        masses[i] = lm.iter().map(|l| (l - lm[0]).exp()).collect();
    }
    let kind = if verdicts.contains(&L2Judgment::NotSquareIntegrable) {
        WeylKind::LimitPoint
    } else if verdicts.iter().all(|v| *v == L2Judgment::SquareIntegrable) {
        WeylKind::LimitCircle
    } else {
        WeylKind::Inconclusive
    };
    Ok(WeylReport {
        kind,
        method: "weyl-numeric".into(),
        endpoint,
        z: opts.z,
        anchor: c,
        deepest_x,
        verdicts,
        ratios,
        window_masses: masses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OscillationVerdict {
    Nonoscillatory,
    OscillationSuspected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub count: usize,
    pub verdict: OscillationVerdict,
    /// Sign changes per dyadic window, ordered toward the endpoint.
    pub per_window: Vec<usize>,
}

fn dense_outputs(s0: f64, s1: f64) -> (Vec<f64>, usize) {
    let windows = ((s1 - s0).abs() / LN_2).ceil().max(1.0) as usize;
    let n = windows * DENSE_PER_WINDOW;
    ((1..=n).map(|i| s0 + (s1 - s0) * i as f64 / n as f64).collect(), windows)
}

/// Counts sign changes of the real solution of `τ u = λ u` on `window`, starting
/// from `(u, u_quasi)` at the end of the window away from `endpoint`.
///
/// Zeros are considered stable when none appear in the last `max(m, K/3)` of the
/// `K` dyadic windows.
pub fn count_zeros(
    prob: &SLProblem,
    endpoint: Endpoint,
    lambda: f64,
    initial: (f64, f64),
    window: (f64, f64),
    m: usize,
) -> Result<ZeroCount> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Parameter(format!("window ({lo:e}, {hi:e}) must satisfy 0 < lo < hi < ∞")));
    }
    let (start, end) = match endpoint {
        Endpoint::Zero => (hi, lo),
        Endpoint::Infinity => (lo, hi),
    };
    let (outputs, windows) = dense_outputs(start.ln(), end.ln());
    let opts = WeylOptions::default();
    let w0 = initial.1 * (start / prob.p(start));
    let samples = run(
        prob,
        Complex64::new(lambda, 0.0),
        start.ln(),
        Complex64::new(initial.0, 0.0),
        Complex64::new(w0, 0.0),
        &outputs,
        opts.rtol,
        opts.max_steps,
        |_| false,
    )?;
    let mut per_window = vec![0usize; windows];
    let mut prev = initial.0.signum();
    if initial.0 == 0.0 {
        prev = 0.0;
    }
    for (i, smp) in samples.iter().enumerate() {
        let v = smp.y[0];
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && v.signum() != prev {
            per_window[i / DENSE_PER_WINDOW] += 1;
        }
        prev = v.signum();
    }
    let span = m.max(windows.div_ceil(3)).min(windows);
    let recent: usize = per_window[windows - span..].iter().sum();
    Ok(ZeroCount {
        count: per_window.iter().sum(),
        verdict: if recent == 0 {
            OscillationVerdict::Nonoscillatory
        } else {
            OscillationVerdict::OscillationSuspected
        },
        per_window,
    })
}

/// Checks `|u₂| >= |u₁|(1 − 1e-8)` on a dense grid of `window`, where `u_j` solve
/// `τ_j u = 0` with the same data `(u, u_quasi)` at `x0`. The two problems must
/// share `p` and `r`, and `q₂ >= q₁` must hold at every grid point.
pub fn sturm_compare(p1: &SLProblem, p2: &SLProblem, x0: f64, initial: (f64, f64), window: (f64, f64)) -> Result<bool> {
    let (a, b) = window;
    if !(a > 0.0 && a <= x0 && x0 <= b && b.is_finite()) {
        return Err(Error::Parameter(format!("need 0 < a <= x0 <= b < ∞, got ({a:e}, {x0:e}, {b:e})")));
    }
    let z = Complex64::new(0.0, 0.0);
    let opts = WeylOptions::default();
    let s0 = x0.ln();
    let mut ok = true;
    for end in [a, b] {
        if end == x0 {
            continue;
        }
        let (outputs, _) = dense_outputs(s0, end.ln());
        let mut runs = Vec::new();
        for prob in [p1, p2] {
            let w0 = initial.1 * (x0 / prob.p(x0));
            runs.push(run(
                prob,
                z,
                s0,
                Complex64::new(initial.0, 0.0),
                Complex64::new(w0, 0.0),
                &outputs,
                opts.rtol,
                opts.max_steps,
                |_| false,
            )?);
        }
        let mut prev_sign = initial.0.signum();
        for (idx, (s1, s2)) in runs[0].iter().zip(&runs[1]).enumerate() {
            let x = s1.s.exp();
            let (pa, pb, ra, rb) = (p1.p(x), p2.p(x), p1.r(x), p2.r(x));
            if (pa - pb).abs() > 1e-12 * pa.abs() || (ra - rb).abs() > 1e-12 * ra.abs() {
                return Err(Error::Precondition(format!("p or r differ at x = {x:e}")));
            }
            let (qa, qb) = (p1.q(x)?, p2.q(x)?);
            if qb < qa - 1e-12 * qa.abs() {
                return Err(Error::Precondition(format!("q2 < q1 at x = {x:e}")));
            }
            let v1 = s1.y[0];
            // the window is open, so a zero exactly at its edge is allowed
            let interior = idx + 1 < outputs.len();
            if interior && (v1 == 0.0 || (prev_sign != 0.0 && v1.signum() != prev_sign)) {
                return Err(Error::Precondition(format!("u1 vanishes near x = {x:e}")));
            }
            prev_sign = v1.signum();
            let l1 = v1.abs().ln() + s1.log_scale;
            let l2 = s2.y[0].abs().ln() + s2.log_scale;
            if l2 < l1 + (-1e-8f64).ln_1p() {
                ok = false;
            }
        }
    }
    Ok(ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndpointClass {
    LimitPoint,
    LimitCircle,
}

/// `n_±(T_min)`: the number of limit circle endpoints.
pub fn deficiency_indices(a: EndpointClass, b: EndpointClass) -> u8 {
    [a, b].iter().filter(|c| **c == EndpointClass::LimitCircle).count() as u8
}
