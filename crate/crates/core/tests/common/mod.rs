#![allow(dead_code)]

use lplc::symalg::{rat, LogPoly, Rational};
use proptest::prelude::*;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (prop_oneof![-9i64..=-1, 1i64..=9], 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

pub fn monomial() -> impl Strategy<Value = LogPoly> {
    (nonzero_rational(), small_rational(), proptest::collection::btree_map(1u32..=4, small_rational(), 0..=3)).prop_map(
        |(c, p, logs)| {
            let logs: Vec<(u32, Rational)> = logs.into_iter().collect();
            LogPoly::monomial(c, p, &logs)
        },
    )
}

pub fn log_poly() -> impl Strategy<Value = LogPoly> {
    proptest::collection::vec(monomial(), 0..=5).prop_map(|ms| ms.into_iter().sum())
}
