//! Iterated logarithms near `0` and near `∞`, the tower constants `e_j`, and
//! the strict-positivity bounds they induce.
//!
//! Near zero, `ln_1(x) = ln(1/x)` and `ln_{k+1}(x) = ln(ln_k(x))`. Near infinity,
//! `Ln_1(x) = ln(x)` and `Ln_{k+1}(x) = ln(Ln_k(x))`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Deepest supported tower index. `e_5` overflows IEEE doubles.
pub const MAX_TOWER: u32 = 5;

/// Depth index of an iterated logarithm, always `>= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LogDepth(u32);

impl LogDepth {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("log depth must be >= 1".into()));
        }
        Ok(LogDepth(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// `ln_k(x)` for small positive `x`.
///
/// Defined for `0 < x < 1` when `k = 1` and wherever `ln_{k-1}(x) > 0` otherwise.
pub fn ln_k(k: LogDepth, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("ln_{}({x:e}) requires 0 < x < 1", k.0)));
    }
    // -ln(x) rather than ln(1/x): 1/x overflows for subnormal x.
    let mut v = -x.ln();
    for j in 2..=k.0 {
        if v <= 0.0 {
            return Err(Error::Domain(format!("ln_{}({x:e}) undefined: ln_{} is not positive", k.0, j - 1)));
        }
        v = v.ln();
    }
    Ok(v)
}

/// `Ln_k(x)` for large `x`. Defined wherever `Ln_{k-1}(x) > 0`.
#[allow(non_snake_case)]
pub fn Ln_k(k: LogDepth, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Ln_{}({x:e}) requires x > 0", k.0)));
    }
    let mut v = x.ln();
    for j in 2..=k.0 {
        if v <= 0.0 {
            return Err(Error::Domain(format!("Ln_{}({x:e}) undefined: Ln_{} is not positive", k.0, j - 1)));
        }
        v = v.ln();
    }
    Ok(v)
}

/// Tower constants `e_0 = 0`, `e_{j+1} = exp(e_j)`.
pub fn tower(j: u32) -> Result<f64> {
    let mut e = 0.0_f64;
    for _ in 0..j {
        e = e.exp();
    }
    if !e.is_finite() {
        return Err(Error::Overflow(format!("tower constant e_{j} overflows f64")));
    }
    Ok(e)
}

/// `exp(-e_{N-1})`: every `ln_n`, `n <= N`, is strictly positive exactly below this bound.
pub fn positivity_bound(n: u32) -> Result<f64> {
    if n == 0 || n > MAX_TOWER {
        return Err(Error::Parameter(format!("positivity bound defined for 1 <= N <= {MAX_TOWER}, got {n}")));
    }
    Ok(1.0 / tower(n - 1)?.exp())
}

/// Values `[ln_1(x), …, ln_depth(x)]`, requiring each to be strictly positive.
pub(crate) fn positive_ln_stack(depth: u32, x: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(depth as usize);
    if depth == 0 {
        return Ok(out);
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x:e} outside the positivity domain of ln_1..ln_{depth}")));
    }
    let mut v = -x.ln();
    for k in 1..=depth {
        if k > 1 {
            v = v.ln();
        }
        if !(v > 0.0) {
            return Err(Error::Domain(format!("x = {x:e} outside the positivity domain of ln_{k}")));
        }
        out.push(v);
    }
    Ok(out)
}

/// Values `[Ln_1(x), …, Ln_depth(x)]`, requiring each to be strictly positive.
pub(crate) fn positive_big_ln_stack(depth: u32, x: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(depth as usize);
    if depth == 0 {
        return Ok(out);
    }
    let mut v = x.ln();
    for k in 1..=depth {
        if k > 1 {
            v = v.ln();
        }
        if !(v > 0.0) {
            return Err(Error::Domain(format!("x = {x:e} outside the positivity domain of Ln_{k}")));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn d(k: u32) -> LogDepth {
        LogDepth::new(k).unwrap()
    }

    #[test]
    fn small_x_examples() {
        assert!((ln_k(d(1), (-1.0f64).exp()).unwrap() - 1.0).abs() < 1e-15);
        assert!((ln_k(d(2), (-E).exp()).unwrap() - 1.0).abs() < 1e-15);
        assert!(ln_k(d(3), (-E).exp()).unwrap().abs() < 1e-15);
        assert!(ln_k(d(1), 1.5).is_err());
        // ln_2 is negative on (1/e, 1), so ln_3 is undefined there.
        assert!(ln_k(d(3), 0.5).is_err());
        assert!(LogDepth::new(0).is_err());
    }

    #[test]
    fn large_x_examples() {
        assert!((Ln_k(d(1), E).unwrap() - 1.0).abs() < 1e-15);
        assert!((Ln_k(d(2), E.powf(E)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(Ln_k(d(2), E).unwrap(), 0.0);
        assert!(Ln_k(d(2), 0.5).is_err());
    }

    #[test]
    fn tower_values() {
        assert_eq!(tower(0).unwrap(), 0.0);
        assert_eq!(tower(1).unwrap(), 1.0);
        assert!((tower(2).unwrap() - E).abs() < 1e-15);
        assert!((tower(3).unwrap() - 15.154_262_241_479_262).abs() < 1e-12);
        assert!(tower(4).unwrap() > 3.8e6);
        assert!(matches!(tower(5), Err(Error::Overflow(_))));
        assert!(matches!(tower(6), Err(Error::Overflow(_))));
    }

    #[test]
    fn positivity_bounds() {
        assert_eq!(positivity_bound(1).unwrap(), 1.0);
        assert!((positivity_bound(2).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
        assert!((positivity_bound(3).unwrap() - (-E).exp()).abs() < 1e-16);
        for n in 1..=5 {
            assert_eq!(positivity_bound(n).unwrap(), 1.0 / tower(n - 1).unwrap().exp());
        }
        assert!(positivity_bound(0).is_err());
        assert!(positivity_bound(6).is_err());
    }

    #[test]
    fn recursion_and_monotonicity() {
        let xs: Vec<f64> = (1..200).map(|i| (-(i as f64) * 0.37 - 16.0).exp()).collect();
        for k in 1..=3 {
            let mut prev = f64::NEG_INFINITY;
            // xs decreasing, so ln_k must increase along it
            for &x in &xs {
                let v = ln_k(d(k), x).unwrap();
                assert!(v > prev);
                prev = v;
                let next = ln_k(d(k + 1), x).unwrap();
                assert!((next - v.ln()).abs() <= 4.0 * f64::EPSILON * next.abs().max(1.0));
            }
        }
    }

    #[test]
    fn stack_positivity() {
        let b = positivity_bound(3).unwrap();
        assert!(positive_ln_stack(3, b * 0.999).is_ok());
        assert!(positive_ln_stack(3, b * 1.001).is_err());
        assert!(positive_big_ln_stack(2, 3.0).is_ok());
        assert!(positive_big_ln_stack(2, 2.0).is_err());
    }
}
