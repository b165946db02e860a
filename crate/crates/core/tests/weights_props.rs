mod common;

use cabcalc::powerfun::{Domain, Exponent, RadialFunction};
use cabcalc::weights::{membership_order, weights_equivalent, Level, Weight};
use common::{bounded, half, radial};
use proptest::prelude::*;

fn phi_family() -> impl Strategy<Value = Weight> {
    prop::sample::select(vec![(2, 0), (3, -1), (4, -2), (2, -2), (3, -3)])
        .prop_map(|(p, q)| Weight::monomial(Domain::HalfLine, 1.0, Exponent::ratio(p, 2), Exponent::ratio(q, 2)).unwrap())
}

fn positive_weight() -> impl Strategy<Value = Weight> {
    (half(0, 4), half(-4, 0), 0.5f64..2.0)
        .prop_map(|(p, q, c)| Weight::monomial(Domain::HalfLine, c, p, q).unwrap())
}

proptest! {
    #[test]
    fn field_is_a_derivation(phi in phi_family(), f in radial(), g in radial()) {
        let x = phi.field();
        let lhs = x.apply(&(&f * &g)).unwrap();
        let rhs = &(&x.apply(&f).unwrap() * &g) + &(&f * &x.apply(&g).unwrap());
        prop_assert!(lhs.approx_eq(&rhs, 1e-12) || (&lhs - &rhs).vanishes());
    }

    #[test]
    fn products_stay_members(phi in phi_family(), f in bounded(), g in bounded(), n in 0u32..=4) {
        let mf = membership_order(&f, &phi, Level::Finite(n)).unwrap();
        let mg = membership_order(&g, &phi, Level::Finite(n)).unwrap();
        prop_assume!(mf.is_member && mg.is_member);
        prop_assert!(membership_order(&(&f * &g), &phi, Level::Finite(n)).unwrap().is_member);
    }

    #[test]
    fn equivalence_relation(phi in phi_family(), a in positive_weight(), b in positive_weight(), c in positive_weight()) {
        prop_assert!(weights_equivalent(&a, &a, &phi).unwrap());
        let ab = weights_equivalent(&a, &b, &phi).unwrap();
        prop_assert_eq!(ab, weights_equivalent(&b, &a, &phi).unwrap());
        if ab && weights_equivalent(&b, &c, &phi).unwrap() {
            prop_assert!(weights_equivalent(&a, &c, &phi).unwrap());
        }
    }
}

/// If `φ/ψ ∈ C_ψ^(∞)`, members of `C_ψ^(∞)` are members of `C_φ^(∞)`.
#[test]
fn smaller_weight_gives_larger_class() {
    let h = |c: f64, p: Exponent, q: Exponent| RadialFunction::monomial(Domain::HalfLine, c, p, q);
    let r = Exponent::ratio;
    let psi = Weight::power(1).unwrap();
    let phis = [
        Weight::monomial(Domain::HalfLine, 1.0, 2, -1).unwrap(),
        Weight::monomial(Domain::HalfLine, 1.0, r(3, 2), r(-1, 2)).unwrap(),
        Weight::monomial(Domain::HalfLine, 1.0, 1, -1).unwrap(),
    ];
    let family = [
        h(1.0, Exponent::ZERO, Exponent::ZERO),
        h(1.0, Exponent::ONE, Exponent::int(-1)),
        h(2.0, r(1, 2), r(-1, 2)),
        h(-1.0, Exponent::int(3), Exponent::int(-3)),
        h(1.0, Exponent::ZERO, Exponent::int(-2)),
        h(0.5, r(5, 2), r(-7, 2)),
        &h(1.0, Exponent::ONE, Exponent::int(-1)) + &h(1.0, Exponent::ZERO, Exponent::int(-1)),
        h(1.0, r(1, 3), r(-1, 3)),
        h(3.0, Exponent::int(2), Exponent::int(-4)),
        &h(1.0, Exponent::ZERO, Exponent::ZERO) - &h(1.0, r(3, 2), r(-3, 2)),
    ];
    for phi in &phis {
        let quotient = phi.profile().div(psi.profile()).unwrap();
        assert!(membership_order(&quotient, &psi, Level::Infinite).unwrap().is_member);
        for f in &family {
            assert!(membership_order(f, &psi, Level::Infinite).unwrap().is_member, "{f}");
            assert!(membership_order(f, phi, Level::Infinite).unwrap().is_member, "{f} against {}", phi.profile());
        }
    }
}
