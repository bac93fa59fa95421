//! Exact algebra of log-power monomials `c · x^p · ∏ ln_k(x)^{e_k}` with rational
//! `c`, `p`, `e_k`.
//!
//! The set of finite sums of such monomials ([`LogPoly`]) is closed under
//! addition, multiplication and `d/dx`, since
//! `(ln_k)' = -x^{-1} ∏_{j<k} ln_j^{-1}`. All coefficients are arbitrary-precision
//! rationals, so identities between such expressions can be checked to literal zero.

use crate::error::{Error, Result};
use crate::iterlog;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders `p` or `p/q`.
pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite double (every finite double is a dyadic rational).
pub fn from_f64_exact(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Parameter(format!("{x} is not finite")))
}

/// Best rational approximation with denominator at most `max_den`, by continued fractions.
///
/// Use this to turn a decimal-looking float such as `0.1` into `1/10`; the exact
/// dyadic value of `0.1` is rarely what the caller means.
pub fn approx_f64(x: f64, max_den: u64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Parameter(format!("{x} is not finite")));
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut v = x.abs();
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return Err(Error::Parameter(format!("cannot approximate {x}")));
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    Ok(if x < 0.0 { -r } else { r })
}

/// Exact square root when `r` is the square of a rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// A single term `coef · x^xpow · ∏_k ln_k(x)^{logexps[k]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogMonomial {
    pub coef: Rational,
    pub xpow: Rational,
    /// depth `k >= 1` → exponent of `ln_k(x)`; never holds zero exponents
    pub logexps: BTreeMap<u32, Rational>,
}

impl LogMonomial {
    pub fn new(coef: Rational, xpow: Rational, logs: &[(u32, Rational)]) -> Self {
        let mut logexps = BTreeMap::new();
        for (k, e) in logs {
            assert!(*k >= 1, "log depth must be >= 1");
            let slot = logexps.entry(*k).or_insert_with(Rational::zero);
            *slot += e;
        }
        logexps.retain(|_, e| !e.is_zero());
        LogMonomial { coef, xpow, logexps }
    }

    pub fn depth(&self) -> u32 {
        self.logexps.keys().next_back().copied().unwrap_or(0)
    }

    fn key(&self) -> MonoKey {
        MonoKey { xpow: self.xpow.clone(), logs: self.logexps.iter().map(|(k, e)| (*k, e.clone())).collect() }
    }
}

/// Canonical ordering key: `xpow` first, then the sorted `(depth, exponent)` list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct MonoKey {
    xpow: Rational,
    logs: Vec<(u32, Rational)>,
}

impl MonoKey {
    fn mul(&self, other: &MonoKey) -> MonoKey {
        let mut map: BTreeMap<u32, Rational> = self.logs.iter().cloned().collect();
        for (k, e) in &other.logs {
            let slot = map.entry(*k).or_insert_with(Rational::zero);
            *slot += e;
        }
        map.retain(|_, e| !e.is_zero());
        MonoKey { xpow: &self.xpow + &other.xpow, logs: map.into_iter().collect() }
    }
}

/// Exact linear combination of [`LogMonomial`]s in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LogPoly {
    terms: BTreeMap<MonoKey, Rational>,
}

impl LogPoly {
    pub fn zero() -> Self {
        LogPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, Rational::zero(), &[])
    }

    pub fn monomial(coef: Rational, xpow: Rational, logs: &[(u32, Rational)]) -> Self {
        Self::from_monomial(LogMonomial::new(coef, xpow, logs))
    }

    pub fn from_monomial(m: LogMonomial) -> Self {
        let mut p = LogPoly::zero();
        p.add_term(m.key(), m.coef);
        p
    }

    /// `x^p`.
    pub fn x_pow(p: Rational) -> Self {
        Self::monomial(Rational::one(), p, &[])
    }

    /// `ln_k(x)^e`.
    pub fn ln_pow(k: u32, e: Rational) -> Self {
        Self::monomial(Rational::one(), Rational::zero(), &[(k, e)])
    }

    /// `∏_{l=from}^{to} ln_l(x)^e` (empty product is `1`).
    pub fn ln_product(from: u32, to: u32, e: &Rational) -> Self {
        let logs: Vec<(u32, Rational)> = (from..=to).map(|k| (k, e.clone())).collect();
        Self::monomial(Rational::one(), Rational::zero(), &logs)
    }

    fn add_term(&mut self, key: MonoKey, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c += coef;
                if c.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coef);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> Vec<LogMonomial> {
        self.terms
            .iter()
            .map(|(k, c)| LogMonomial {
                coef: c.clone(),
                xpow: k.xpow.clone(),
                logexps: k.logs.iter().cloned().collect(),
            })
            .collect()
    }

    /// Deepest log index present (0 if none).
    pub fn max_depth(&self) -> u32 {
        self.terms.keys().filter_map(|k| k.logs.last().map(|(d, _)| *d)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> LogPoly {
        if c.is_zero() {
            return LogPoly::zero();
        }
        LogPoly { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> LogPoly {
        let mut acc = LogPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact `d/dx`.
    pub fn differentiate(&self) -> LogPoly {
        let mut out = LogPoly::zero();
        for (key, c) in &self.terms {
            let xpow_m1 = &key.xpow - Rational::one();
            if !key.xpow.is_zero() {
                out.add_term(MonoKey { xpow: xpow_m1.clone(), logs: key.logs.clone() }, c * &key.xpow);
            }
            // d/dx ln_k^e = e ln_k^{e-1} · (-x^{-1} ∏_{j<k} ln_j^{-1})
            for (k, e) in &key.logs {
                let mut logs: BTreeMap<u32, Rational> = key.logs.iter().cloned().collect();
                for j in 1..=*k {
                    let slot = logs.entry(j).or_insert_with(Rational::zero);
                    *slot -= Rational::one();
                }
                logs.retain(|_, v| !v.is_zero());
                out.add_term(MonoKey { xpow: xpow_m1.clone(), logs: logs.into_iter().collect() }, -(c * e));
            }
        }
        out
    }

    /// Floating value at small `x`; all `ln_k` present must be strictly positive.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.compile().eval(x)
    }

    /// Floating value at large `x`, reading each `ln_k` as `Ln_k` (they coincide with
    /// `|ln|`-iterates for `x > 1`).
    pub fn evaluate_at_infinity(&self, x: f64) -> Result<f64> {
        self.compile().eval_at_infinity(x)
    }

    /// Value with powers of `x` at `x` but every `ln_k` taken at `x/gamma`.
    pub fn evaluate_shifted(&self, x: f64, gamma: f64) -> Result<f64> {
        self.compile().eval_shifted(x, gamma)
    }

    /// Floating-point snapshot for repeated evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            depth: self.max_depth(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| CompiledTerm {
                    coef: to_f64(c),
                    xpow: to_f64(&k.xpow),
                    logs: k.logs.iter().map(|(d, e)| ((*d - 1) as usize, to_f64(e))).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
struct CompiledTerm {
    coef: f64,
    xpow: f64,
    logs: Vec<(usize, f64)>,
}

/// Floating-point form of a [`LogPoly`].
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    depth: u32,
    terms: Vec<CompiledTerm>,
}

impl CompiledPoly {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("x = {x:e} must be positive")));
        }
        let lns = iterlog::positive_ln_stack(self.depth, x)?;
        Ok(self.eval_with(x, &lns))
    }

    pub fn eval_at_infinity(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("x = {x:e} must be positive")));
        }
        let lns = iterlog::positive_big_ln_stack(self.depth, x)?;
        Ok(self.eval_with(x, &lns))
    }

    pub fn eval_shifted(&self, x: f64, gamma: f64) -> Result<f64> {
        if !(x > 0.0 && gamma > 0.0) {
            return Err(Error::Domain(format!("x = {x:e}, gamma = {gamma:e} must be positive")));
        }
        let lns = iterlog::positive_ln_stack(self.depth, x / gamma)?;
        Ok(self.eval_with(x, &lns))
    }

    /// `lns[k-1]` must hold the value of the k-th logarithm.
    pub fn eval_with(&self, x: f64, lns: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut v = t.coef * x.powf(t.xpow);
                for &(i, e) in &t.logs {
                    v *= lns[i].powf(e);
                }
                v
            })
            .sum()
    }
}

/// `τ_α y = -(x^α y')' + q y`, computed exactly.
pub fn apply_tau(alpha: &Rational, q: &LogPoly, y: &LogPoly) -> LogPoly {
    let flux = &LogPoly::x_pow(alpha.clone()) * &y.differentiate();
    &(q * y) - &flux.differentiate()
}

impl Add for &LogPoly {
    type Output = LogPoly;
    fn add(self, rhs: &LogPoly) -> LogPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &LogPoly {
    type Output = LogPoly;
    fn sub(self, rhs: &LogPoly) -> LogPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &LogPoly {
    type Output = LogPoly;
    fn neg(self) -> LogPoly {
        LogPoly { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect() }
    }
}

impl Mul for &LogPoly {
    type Output = LogPoly;
    fn mul(self, rhs: &LogPoly) -> LogPoly {
        let mut out = LogPoly::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka.mul(kb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LogPoly {
            type Output = LogPoly;
            fn $m(self, rhs: LogPoly) -> LogPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LogPoly {
    type Output = LogPoly;
    fn neg(self) -> LogPoly {
        -&self
    }
}

impl std::iter::Sum for LogPoly {
    fn sum<I: Iterator<Item = LogPoly>>(iter: I) -> LogPoly {
        iter.fold(LogPoly::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for LogPoly {
    /// `c * x^p * ln1(x)^e1 * …` joined by `" + "`; the zero polynomial is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{} * x^{}", render_rational(c), render_rational(&k.xpow))?;
            for (d, e) in &k.logs {
                write!(f, " * ln{}(x)^{}", d, render_rational(e))?;
            }
        }
        Ok(())
    }
}
