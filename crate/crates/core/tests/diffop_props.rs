mod common;

use cabcalc::diffop::{normal_form, parametrix_1d, principal_symbol, remainder_symbol, CylinderFunction, DiffOp, Form};
use cabcalc::powerfun::{Domain, RadialFunction};
use cabcalc::weights::Weight;
use common::{bounded, cylinder, lie_field, operator, weights};
use proptest::prelude::*;

fn same(a: &CylinderFunction, b: &CylinderFunction) -> bool {
    a.sub(b).vanishes()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composition_is_associative(a in operator(2), b in operator(2), c in operator(2)) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert!(left.same_as(&right));
    }

    #[test]
    fn normal_forms_preserve_action(a in operator(2), fs in prop::collection::vec(cylinder(), 10)) {
        let (phi, psi) = weights();
        let mono = DiffOp::from_monomial(&phi, &psi, normal_form(&a, Form::Monomial).unwrap().coeffs).unwrap();
        let lie = DiffOp::from_lie(&phi, &psi, normal_form(&a, Form::Lie).unwrap().coeffs).unwrap();
        for f in &fs {
            let direct = a.apply(f).unwrap();
            prop_assert!(same(&direct, &mono.apply(f).unwrap()));
            prop_assert!(same(&direct, &lie.apply(f).unwrap()));
        }
    }

    #[test]
    fn brackets_of_fields_are_fields(a in lie_field(), b in lie_field()) {
        let c = a.commutator(&b).unwrap();
        prop_assert!(c.order() <= 1);
    }

    #[test]
    fn principal_symbol_is_multiplicative(a in operator(2), b in operator(1)) {
        let ab = a.compose(&b).unwrap();
        let (sa, sb) = (principal_symbol(&a).unwrap(), principal_symbol(&b).unwrap());
        prop_assume!(sa.order + sb.order == ab.order());
        prop_assert!(principal_symbol(&ab).unwrap().same_as(&sa.mul(&sb)));
    }

    #[test]
    fn parametrix_remainder_drops_order(a in bounded(), b in bounded()) {
        let phi = Weight::power(1).unwrap();
        let psi = Weight::power(0).unwrap();
        let d = Domain::HalfLine;
        // the zeroth-order part is kept positive so the symbol stays invertible for large ξ
        let shift = RadialFunction::constant(d, 4.0 * b.max_abs_coeff() + 1.0);
        let op = DiffOp::from_lie(&phi, &psi, [
            ((2, 0), CylinderFunction::constant(d, 1.0)),
            ((1, 0), CylinderFunction::radial(a)),
            ((0, 0), CylinderFunction::radial(&b + &shift)),
        ]).unwrap();
        for n in 1..=3usize {
            let par = parametrix_1d(&op, n).unwrap();
            let r = remainder_symbol(&par);
            prop_assert!(r.order().map_or(true, |o| o <= -(n as i64)), "N = {}: {:?}", n, r.order());
        }
    }
}

