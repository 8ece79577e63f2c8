#![allow(dead_code)]

use cylnogo_core::{ClassicalElement, GaussRat, Mono, OperatorElement, Param, Scalar, Word};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

pub const SEED: u64 = 0x00c7_1a0d;

pub fn fixed_config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn gauss_int() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -3i64..=3).prop_map(|(re, im)| GaussRat::from_int(re) + GaussRat::i() * GaussRat::from_int(im))
}

fn coeff() -> impl Strategy<Value = Scalar> {
    (gauss_int(), any::<bool>()).prop_map(|(c, with_alpha)| {
        let s = Scalar::constant(c);
        if with_alpha {
            s * Scalar::param(Param::Alpha)
        } else {
            s
        }
    })
}

pub fn arb_classical() -> impl Strategy<Value = ClassicalElement> {
    prop::collection::vec((0u32..=3, -4i64..=4, coeff()), 0..=4)
        .prop_map(|t| ClassicalElement::from_terms(t.into_iter().map(|(r, m, c)| (Mono::new(r, m), c))))
}

/// Numeric coefficients only, so closures need no parameter assignment.
pub fn arb_numeric_classical(max_deg: u32, max_harm: i64) -> impl Strategy<Value = ClassicalElement> {
    prop::collection::vec((0u32..=max_deg, -max_harm..=max_harm, gauss_int()), 1..=2).prop_map(|t| {
        ClassicalElement::from_terms(t.into_iter().map(|(r, m, c)| (Mono::new(r, m), Scalar::constant(c))))
    })
}

pub fn arb_operator(max_xi: u32) -> impl Strategy<Value = OperatorElement> {
    prop::collection::vec((-3i64..=3, 0u32..=max_xi, 0u32..=3, coeff()), 0..=4)
        .prop_map(|t| OperatorElement::from_terms(t.into_iter().map(|(m, p, k, c)| (Word::new(m, p, k), c))))
}
