//! Unchecked constructors for the comparison potentials and log-power solutions.
//!
//! Parameter validation lives in [`crate::criteria`] and [`crate::refsol`]; these
//! builders accept any `N` so identities can also be checked past the numeric depth cap.
//! Notation: `X = x^{α-2}`, `P_j = ∏_{l<=j} ln_l^{-1}`, `S_N = Σ_{j<=N} P_j`.

use crate::symalg::{rat, LogPoly, Rational};
use num_traits::One;

fn half() -> Rational {
    rat(1, 2)
}

fn three_quarters() -> Rational {
    rat(3, 4)
}

/// `x^{α-2}`.
pub fn x_weight(alpha: &Rational) -> LogPoly {
    LogPoly::x_pow(alpha - Rational::from_integer(2.into()))
}

/// `P_j = ∏_{l=1}^{j} ln_l^{-1}`.
pub fn p_prod(j: u32) -> LogPoly {
    LogPoly::ln_product(1, j, &-Rational::one())
}

/// `S_N = Σ_{j=1}^{N} P_j`.
pub fn s_sum(n: u32) -> LogPoly {
    (1..=n).map(p_prod).sum()
}

/// `(3/4 - α/2) X`, shared leading term.
fn leading(alpha: &Rational) -> LogPoly {
    x_weight(alpha).scale(&(three_quarters() - alpha * half()))
}

/// `-(1/2)(2-α) X S_N`.
fn log_correction(alpha: &Rational, n: u32) -> LogPoly {
    let c = -(half() * (Rational::from_integer(2.into()) - alpha));
    (&x_weight(alpha) * &s_sum(n)).scale(&c)
}

/// `q_{α,N}`, for which `y_N` solves `τ y = 0` exactly.
pub fn q_alpha_n(alpha: &Rational, n: u32) -> LogPoly {
    let x = x_weight(alpha);
    let mut q = &leading(alpha) + &log_correction(alpha, n);
    let squares: LogPoly = (1..=n).map(|j| p_prod(j).pow(2)).sum();
    q = &q + &(&x * &squares).scale(&three_quarters());
    let mut cross = LogPoly::zero();
    for j in 1..n {
        let inner: LogPoly = (j + 1..=n).map(|m| LogPoly::ln_product(j + 1, m, &-Rational::one())).sum();
        cross = &cross + &(&p_prod(j).pow(2) * &inner);
    }
    &q + &(&x * &cross)
}

/// `q_{α,N,ε}`, for which `y_{N,ε}` solves `τ y = 0` exactly.
pub fn q_alpha_n_eps(alpha: &Rational, n: u32, eps: &Rational) -> LogPoly {
    let x = x_weight(alpha);
    let pn = p_prod(n);
    let two = Rational::from_integer(2.into());
    let t1 = (&x * &pn).scale(&-(eps * half() * (&two - alpha)));
    let t2 = (&x * &pn.pow(2)).scale(&(eps * eps / Rational::from_integer(4.into())));
    let t3 = (&(&x * &pn) * &s_sum(n)).scale(eps);
    &(&(&q_alpha_n(alpha, n) + &t1) + &t2) + &t3
}

/// Limit-point threshold: `(3/4 - α/2) X` for `N = 0`, else `Q_{α,N,ε}`.
pub fn lp_threshold(alpha: &Rational, n: u32, eps: &Rational) -> LogPoly {
    if n == 0 {
        return leading(alpha);
    }
    let tail = LogPoly::monomial(three_quarters() + eps, alpha - Rational::from_integer(2.into()), &[(1, rat(-2, 1))]);
    &(&leading(alpha) + &log_correction(alpha, n)) + &tail
}

/// Limit-circle threshold: `(3/4 - α/2 - ε) X` for `N = 0`, else `Q̂_{α,N,ε}`.
pub fn lc_threshold(alpha: &Rational, n: u32, eps: &Rational) -> LogPoly {
    if n == 0 {
        return x_weight(alpha).scale(&(three_quarters() - alpha * half() - eps));
    }
    let two = Rational::from_integer(2.into());
    let extra = (&x_weight(alpha) * &p_prod(n)).scale(&-(eps * half() * (two - alpha)));
    &(&leading(alpha) + &log_correction(alpha, n)) + &extra
}

/// `q_{α,0,β} = (3/4 - α/2 - β) X`.
pub fn q_alpha_0_beta(alpha: &Rational, beta: &Rational) -> LogPoly {
    x_weight(alpha).scale(&(three_quarters() - alpha * half() - beta))
}

/// `y_N = x^{-1/2} ∏_{k<=N} ln_k^{-1/2}`.
pub fn y_n(n: u32) -> LogPoly {
    &LogPoly::x_pow(-half()) * &LogPoly::ln_product(1, n, &-half())
}

/// `y_{N,ε} = y_N ln_N^{-ε/2}`.
pub fn y_n_eps(n: u32, eps: &Rational) -> LogPoly {
    &y_n(n) * &LogPoly::ln_pow(n, -(eps * half()))
}
