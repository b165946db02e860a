use std::f64::consts::PI;

use cabcalc::flows::{ExponentialFlow, FlowMap, PowerFlow};
use cabcalc::groupoid::{gphi_compose, s_compose, zeta_cocycle, DefiningFunctions, GPhiElement, HPsi, HPsiElement, SElement};
use cabcalc::powerfun::{End, Exponent};
use cabcalc::weights::Weight;
use proptest::prelude::*;

fn flow(which: bool) -> Box<dyn FlowMap> {
    if which {
        Box::new(ExponentialFlow::new(1.0))
    } else {
        Box::new(PowerFlow::new(2).unwrap())
    }
}

/// Composable `(g, h, k)` with all base points inside the closed-form
/// region of the power flow.
fn triple(flow: &dyn FlowMap, x: f64, ts: [f64; 3]) -> (GPhiElement, GPhiElement, GPhiElement) {
    let k = GPhiElement::new(x, ts[2]);
    let h = GPhiElement::new(k.range(flow).unwrap(), ts[1]);
    let g = GPhiElement::new(h.range(flow).unwrap(), ts[0]);
    (g, h, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gphi_is_a_groupoid(exp in any::<bool>(), x in 0.01f64..0.3, t0 in -1.0f64..0.5, t1 in -1.0f64..0.5, t2 in -1.0f64..0.5) {
        let flow = flow(exp);
        let f = flow.as_ref();
        let (g, h, k) = triple(f, x, [t0, t1, t2]);
        let gh = gphi_compose(g, h, f).unwrap();
        prop_assert_eq!(gh.source(), h.source());
        prop_assert!((gh.range(f).unwrap() - g.range(f).unwrap()).abs() <= f.tolerance());
        let left = gphi_compose(gh, k, f).unwrap();
        let right = gphi_compose(g, gphi_compose(h, k, f).unwrap(), f).unwrap();
        prop_assert!((left.x - right.x).abs() <= f.tolerance() && (left.t - right.t).abs() <= f.tolerance());
        prop_assert_eq!(GPhiElement::unit(x), GPhiElement::new(x, 0.0));
    }

    #[test]
    fn s_is_a_groupoid(exp in any::<bool>(), x in 0.01f64..0.3, t0 in -1.0f64..0.5, t1 in -1.0f64..0.5, t2 in -1.0f64..0.5,
                       a in -PI..PI, b in -PI..PI, c in -PI..PI, d in -PI..PI) {
        let flow = flow(exp);
        let f = flow.as_ref();
        let (g, h, k) = triple(f, x, [t0, t1, t2]);
        let (sg, sh, sk) = (SElement::new(a, b, g.x, g.t), SElement::new(b, c, h.x, h.t), SElement::new(c, d, k.x, k.t));
        let left = s_compose(s_compose(sg, sh, f).unwrap(), sk, f).unwrap();
        let right = s_compose(sg, s_compose(sh, sk, f).unwrap(), f).unwrap();
        prop_assert!((left.x - right.x).abs() <= f.tolerance() && (left.t - right.t).abs() <= f.tolerance());
        prop_assert_eq!((left.theta1, left.theta2), (right.theta1, right.theta2));
        prop_assert_eq!(left.source(), sk.source());
    }

    #[test]
    fn zeta_is_multiplicative(exp in any::<bool>(), x in 0.01f64..0.3, t0 in -1.0f64..0.5, t1 in -1.0f64..0.5,
                              rational in any::<bool>(), far in any::<bool>()) {
        let flow = flow(exp);
        let f = flow.as_ref();
        let (g, h, _) = triple(f, x, [t0, t1, 0.0]);
        let rho = if rational { DefiningFunctions::Rational } else { DefiningFunctions::default() };
        let end = if far { End::Far } else { End::Zero };
        let whole = zeta_cocycle(gphi_compose(g, h, f).unwrap(), end, f, rho).unwrap();
        let parts = zeta_cocycle(g, end, f, rho).unwrap() * zeta_cocycle(h, end, f, rho).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-10 * whole.abs());
    }

    #[test]
    fn hpsi_action_is_a_group_action(s in -1.0f64..1.0, t in -1.0f64..1.0, x in 0.01f64..0.2, v in -3.0f64..3.0) {
        let flow = ExponentialFlow::new(1.0);
        let hp = HPsi::new(&flow, Weight::power(Exponent::ratio(1, 2)).unwrap()).unwrap();
        let inside = HPsiElement::Interior { theta1: 0.1, theta2: 0.4, x };
        match (hp.act(s, hp.act(t, inside).unwrap()).unwrap(), hp.act(s + t, inside).unwrap()) {
            (HPsiElement::Interior { x: a, .. }, HPsiElement::Interior { x: b, .. }) => prop_assert!((a - b).abs() <= 1e-8 * b),
            _ => prop_assert!(false),
        }
        let edge = HPsiElement::Boundary { theta: 0.2, v };
        match (hp.act(s, hp.act(t, edge).unwrap()).unwrap(), hp.act(s + t, edge).unwrap()) {
            (HPsiElement::Boundary { v: a, .. }, HPsiElement::Boundary { v: b, .. }) => prop_assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0)),
            _ => prop_assert!(false),
        }
    }
}

#[test]
fn chart_separation_scales_like_psi() {
    let flow = ExponentialFlow::new(1.0);
    let psi = Weight::power(Exponent::ratio(1, 2)).unwrap();
    let hp = HPsi::new(&flow, psi.clone()).unwrap();
    for w in [-2.0, 0.5, 3.0] {
        let s = 1e-9;
        match hp.chart(0.3, w, s).unwrap() {
            HPsiElement::Interior { theta1, theta2, .. } => {
                let ratio = (theta2 - theta1) / psi.eval(s).unwrap();
                assert!((ratio - w).abs() <= 1e-6, "{ratio} vs {w}");
            }
            other => panic!("{other:?}"),
        }
    }
}
