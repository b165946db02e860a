#![allow(dead_code)]

use cabcalc::diffop::{ComplexRadial, CylinderFunction, DiffOp};
use cabcalc::powerfun::{Domain, Exponent, RadialFunction};
use cabcalc::weights::Weight;
use proptest::prelude::*;

/// Half-integer exponents `n/2` with `n` in `lo..=hi`.
pub fn half(lo: i64, hi: i64) -> impl Strategy<Value = Exponent> {
    (lo..=hi).prop_map(|n| Exponent::ratio(n, 2))
}

pub fn coeff() -> impl Strategy<Value = f64> {
    (0.25f64..2.0, any::<bool>()).prop_map(|(c, neg)| if neg { -c } else { c })
}

pub fn radial_with(p: impl Strategy<Value = Exponent>, q: impl Strategy<Value = Exponent>, max_terms: usize) -> impl Strategy<Value = RadialFunction> {
    prop::collection::vec((coeff(), p, q), 1..=max_terms)
        .prop_map(|terms| RadialFunction::from_terms(Domain::HalfLine, terms))
}

pub fn radial() -> impl Strategy<Value = RadialFunction> {
    radial_with(half(-3, 5), half(-6, 2), 3)
}

/// Functions bounded at both ends of `[0, ∞]` before any cancellation.
pub fn bounded() -> impl Strategy<Value = RadialFunction> {
    (0i64..=4, -4i64..=0)
        .prop_flat_map(|(p, extra)| (Just(p), -p + extra..=-p))
        .prop_map(|(p, q)| (Exponent::ratio(p, 2), Exponent::ratio(q, 2)))
        .prop_flat_map(|(p, q)| (coeff(), Just(p), Just(q)))
        .prop_map(|(c, p, q)| RadialFunction::monomial(Domain::HalfLine, c, p, q))
}

pub fn cylinder() -> impl Strategy<Value = CylinderFunction> {
    prop::collection::vec((-1i64..=1, bounded(), bounded()), 1..=2).prop_map(|modes| {
        let mut f = CylinderFunction::zero(Domain::HalfLine);
        for (m, re, im) in modes {
            f.add_mode(m, ComplexRadial::new(re, im).unwrap());
        }
        f
    })
}

/// `φ = t^{3/2}(1+t)^{-1/2}`, `ψ = t^{1/2}(1+t)^{-1/2}`.
pub fn weights() -> (Weight, Weight) {
    (
        Weight::monomial(Domain::HalfLine, 1.0, Exponent::ratio(3, 2), Exponent::ratio(-1, 2)).unwrap(),
        Weight::monomial(Domain::HalfLine, 1.0, Exponent::ratio(1, 2), Exponent::ratio(-1, 2)).unwrap(),
    )
}

/// `Σ_{i+j ≤ order} b_ij ∂_t^i ∂_θ^j` with random coefficients.
pub fn operator(order: u32) -> impl Strategy<Value = DiffOp> {
    let keys: Vec<(u32, u32)> = (0..=order).flat_map(|i| (0..=order - i).map(move |j| (i, j))).collect();
    prop::collection::vec((prop::sample::select(keys), cylinder()), 1..=3).prop_map(|coeffs| {
        let (phi, psi) = weights();
        DiffOp::from_plain(&phi, &psi, coeffs).unwrap()
    })
}

/// `a X + b Y`.
pub fn lie_field() -> impl Strategy<Value = DiffOp> {
    (cylinder(), cylinder()).prop_map(|(a, b)| {
        let (phi, psi) = weights();
        let x = DiffOp::x_field(&phi, &psi).unwrap();
        let y = DiffOp::y_field(&phi, &psi).unwrap();
        x.left_mul(&a).add(&y.left_mul(&b)).unwrap()
    })
}
