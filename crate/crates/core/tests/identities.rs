mod common;

use common::{log_poly, small_rational};
use lplc::formulas::{p_prod, q_alpha_0_beta, q_alpha_n, q_alpha_n_eps, s_sum, y_n, y_n_eps};
use lplc::refsol::euler_solution_poly;
use lplc::symalg::{apply_tau, int, rat, LogPoly, Rational};
use proptest::prelude::*;

fn alphas() -> Vec<Rational> {
    vec![int(-3), int(-1), int(0), rat(1, 2), int(1), rat(3, 2)]
}

fn x_inv() -> LogPoly {
    LogPoly::x_pow(int(-1))
}

#[test]
fn y_n_solves_its_equation_through_depth_five() {
    for a in alphas() {
        for n in 1..=5 {
            assert!(apply_tau(&a, &q_alpha_n(&a, n), &y_n(n)).is_zero(), "alpha {a}, N {n}");
        }
    }
}

#[test]
fn y_n_eps_solves_its_equation() {
    for a in alphas() {
        for n in 1..=3 {
            for e in [rat(1, 10), rat(1, 2), int(1)] {
                assert!(apply_tau(&a, &q_alpha_n_eps(&a, n, &e), &y_n_eps(n, &e)).is_zero());
            }
        }
    }
}

#[test]
fn log_derivative_rules() {
    for n in 1..=4u32 {
        let lower = LogPoly::ln_product(1, n - 1, &int(-1));
        // (ln_N)' = −x^{-1} ∏_{k<N} ln_k^{-1}
        assert_eq!(LogPoly::ln_pow(n, int(1)).differentiate(), -(&x_inv() * &lower));
        // (ln_N^{-1/2})' = ½ x^{-1} ∏_{k<N} ln_k^{-1} ln_N^{-3/2}
        let rhs = (&(&x_inv() * &lower) * &LogPoly::ln_pow(n, rat(-3, 2))).scale(&rat(1, 2));
        assert_eq!(LogPoly::ln_pow(n, rat(-1, 2)).differentiate(), rhs);
        // (∏ ln^{-1/2})' = ½ x^{-1} ∏ ln^{-1/2} S_N
        let half = LogPoly::ln_product(1, n, &rat(-1, 2));
        let rhs = (&(&x_inv() * &half) * &s_sum(n)).scale(&rat(1, 2));
        assert_eq!(half.differentiate(), rhs);
        // (∏ ln^{-1})' = x^{-1} P_N S_N
        assert_eq!(p_prod(n).differentiate(), &(&x_inv() * &p_prod(n)) * &s_sum(n));
    }
}

#[test]
fn nested_sum_rearrangement() {
    for n in 1..=5u32 {
        let lhs: LogPoly = (1..=n).map(|j| &p_prod(j) * &s_sum(j)).sum();
        let mut rhs: LogPoly = (1..=n).map(|j| p_prod(j).pow(2)).sum();
        for j in 1..n {
            let inner: LogPoly = (j + 1..=n).map(|m| LogPoly::ln_product(j + 1, m, &int(-1))).sum();
            rhs = &rhs + &(&p_prod(j).pow(2) * &inner);
        }
        assert_eq!(lhs, rhs, "N = {n}");
    }
}

#[test]
fn euler_base_case() {
    let y0 = LogPoly::x_pow(rat(-1, 2));
    for k in -6..=3 {
        let a = rat(k, 2);
        assert!(apply_tau(&a, &q_alpha_0_beta(&a, &int(0)), &y0).is_zero(), "alpha {a}");
    }
}

#[test]
fn euler_exponents_annihilate() {
    // (α, β, sqrt((2-α)² - 4β)) with a rational root
    let cases = [
        (int(0), rat(3, 4), int(1)),
        (int(-1), rat(5, 4), int(2)),
        (rat(1, 2), rat(5, 16), int(1)),
        (int(-3), int(6), int(1)),
        (int(1), rat(3, 16), rat(1, 2)),
        (int(1), rat(1, 4), int(0)),
    ];
    for (a, b, root) in cases {
        let q = q_alpha_0_beta(&a, &b);
        let center = (int(1) - &a) / int(2);
        let g1 = &center + &root / int(2);
        let g2 = &center - &root / int(2);
        let y1 = LogPoly::x_pow(g1);
        let y2 = if root == int(0) { LogPoly::monomial(int(1), g2, &[(1, int(1))]) } else { LogPoly::x_pow(g2) };
        for (j, y) in [(1u8, y1), (2, y2)] {
            assert!(apply_tau(&a, &q, &y).is_zero(), "alpha {a}, beta {b}, j {j}");
            assert_eq!(euler_solution_poly(&a, &b, j).unwrap(), Some(y));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn differentiation_is_linear(a in log_poly(), b in log_poly(), c in small_rational()) {
        let lhs = (&a.scale(&c) + &b).differentiate();
        let rhs = &a.differentiate().scale(&c) + &b.differentiate();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_rule(a in log_poly(), b in log_poly()) {
        let lhs = (&a * &b).differentiate();
        let rhs = &(&a.differentiate() * &b) + &(&a * &b.differentiate());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ring_laws(a in log_poly(), b in log_poly(), c in log_poly()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &b, &b * &a);
    }
}
