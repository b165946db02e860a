//! Seeded sweeps over each module's invariant list. The property tests in
//! `tests/` cover the same ground with shrinking; these run from the binary.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rel, rng, run_one, Check, Criterion};
use crate::diffop::{
    normal_form, parametrix_1d, principal_symbol, remainder_symbol, ComplexRadial, CylinderFunction, DiffOp, Form,
};
use crate::error::Result;
use crate::flows::{ExponentialFlow, FlowMap, FlowRegistry, NumericWeight, PowerFlow};
use crate::groupoid::{gphi_compose, HPsi, HPsiElement, GPhiElement};
use crate::powerfun::{Domain, End, Exponent, ExponentPair, Limit, RadialFunction};
use crate::schrodinger::{assemble, assemble_and_solve, GeometricGrid, SchrodingerProblem, ShiftInvert};
use crate::weights::{membership_order, weights_equivalent, Level, Weight};

pub fn invariant_checks() -> Vec<(&'static str, u32, &'static str, Criterion)> {
    vec![
        ("powerfun", 1, "ring axioms", ring_axioms as Criterion),
        ("powerfun", 2, "derivative Leibniz", derivative_leibniz),
        ("powerfun", 3, "evaluation", evaluation),
        ("powerfun", 4, "endpoint limits", endpoint_limits),
        ("powerfun", 5, "text round trip", text_round_trip),
        ("weights", 6, "field Leibniz", field_leibniz),
        ("weights", 7, "products of members", product_membership),
        ("weights", 8, "weight equivalence", equivalence),
        ("flows", 9, "group law grid", group_law_grid),
        ("flows", 10, "monotone, fixed ends", monotone_and_fixed),
        ("groupoid", 11, "source/range, action", groupoid_structure),
        ("diffop", 12, "associativity", associativity),
        ("diffop", 13, "normal forms act alike", normal_forms_act_alike),
        ("diffop", 14, "bracket order", bracket_order),
        ("diffop", 15, "symbol multiplicativity", symbol_multiplicativity),
        ("diffop", 16, "parametrix remainder order", remainder_order),
        ("schrodinger", 17, "symmetric assembly", symmetric_assembly),
        ("schrodinger", 18, "truncation monotonicity", truncation_monotonicity),
        ("schrodinger", 19, "deterministic solves", deterministic_solves),
    ]
}

pub fn run_invariants() -> Vec<Check> {
    invariant_checks().into_iter().map(|(group, id, name, body)| run_one(group, id, name, body)).collect()
}

fn half(r: &mut ChaCha8Rng, lo: i64, hi: i64) -> Exponent {
    Exponent::ratio(r.gen_range(lo..=hi), 2)
}

fn coeff(r: &mut ChaCha8Rng) -> f64 {
    let c = r.gen_range(0.25..2.0);
    if r.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

fn radial(r: &mut ChaCha8Rng) -> RadialFunction {
    let n = r.gen_range(1..=3);
    let terms: Vec<_> = (0..n).map(|_| (coeff(r), half(r, -3, 5), half(r, -6, 2))).collect();
    RadialFunction::from_terms(Domain::HalfLine, terms)
}

/// A single term bounded at both ends.
fn bounded(r: &mut ChaCha8Rng) -> RadialFunction {
    let p = r.gen_range(0..=4);
    let q = -p - r.gen_range(0..=4);
    RadialFunction::monomial(Domain::HalfLine, coeff(r), Exponent::ratio(p, 2), Exponent::ratio(q, 2))
}

fn cylinder(r: &mut ChaCha8Rng) -> CylinderFunction {
    let mut f = CylinderFunction::zero(Domain::HalfLine);
    for _ in 0..r.gen_range(1..=2) {
        let m = r.gen_range(-1..=1);
        f.add_mode(m, ComplexRadial::new(bounded(r), bounded(r)).expect("same domain"));
    }
    f
}

fn cylinder_weights() -> Result<(Weight, Weight)> {
    Ok((
        Weight::monomial(Domain::HalfLine, 1.0, Exponent::ratio(3, 2), Exponent::ratio(-1, 2))?,
        Weight::monomial(Domain::HalfLine, 1.0, Exponent::ratio(1, 2), Exponent::ratio(-1, 2))?,
    ))
}

fn operator(r: &mut ChaCha8Rng, order: u32) -> Result<DiffOp> {
    let (phi, psi) = cylinder_weights()?;
    let coeffs: Vec<_> = (0..r.gen_range(1..=3))
        .map(|_| {
            let i = r.gen_range(0..=order);
            let j = r.gen_range(0..=order - i);
            ((i, j), cylinder(r))
        })
        .collect();
    DiffOp::from_plain(&phi, &psi, coeffs)
}

fn same(a: &RadialFunction, b: &RadialFunction) -> bool {
    a.approx_eq(b, 1e-12) || (a - b).vanishes()
}

fn tally(failures: Vec<String>, cases: usize) -> Result<(bool, String)> {
    let detail = match failures.first() {
        None => format!("{cases} cases"),
        Some(first) => format!("{} of {cases} cases fail, first: {first}", failures.len()),
    };
    Ok((failures.is_empty(), detail))
}

fn ring_axioms() -> Result<(bool, String)> {
    let mut r = rng(101);
    let one = RadialFunction::constant(Domain::HalfLine, 1.0);
    let mut bad = Vec::new();
    for k in 0..50 {
        let (f, g, h) = (radial(&mut r), radial(&mut r), radial(&mut r));
        let ok = same(&(&(&f + &g) + &h), &(&f + &(&g + &h)))
            && same(&(&(&f * &g) * &h), &(&f * &(&g * &h)))
            && &f + &g == &g + &f
            && &f * &g == &g * &f
            && same(&(&f * &(&g + &h)), &(&(&f * &g) + &(&f * &h)))
            && (&f - &f).is_zero()
            && &f * &one == f;
        if !ok {
            bad.push(format!("triple {k}"));
        }
    }
    tally(bad, 50)
}

fn derivative_leibniz() -> Result<(bool, String)> {
    let mut r = rng(102);
    let mut bad = Vec::new();
    for k in 0..50 {
        let (f, g) = (radial(&mut r), radial(&mut r));
        if !same(&(&f * &g).derivative(), &(&(&f.derivative() * &g) + &(&f * &g.derivative()))) {
            bad.push(format!("pair {k}"));
        }
    }
    tally(bad, 50)
}

fn evaluation() -> Result<(bool, String)> {
    let mut r = rng(103);
    let mut bad = Vec::new();
    for _ in 0..200 {
        let f = radial(&mut r);
        let t = 10f64.powf(r.gen_range(-6.0..6.0));
        let (mut sum, mut size) = (0.0, 0.0);
        for term in f.terms() {
            let v = term.coeff * t.powf(term.key.p.to_f64()) * (1.0 + t).powf(term.key.q.to_f64());
            sum += v;
            size += v.abs();
        }
        let got = f.eval(t)?;
        if (got - sum).abs() > 1e-14 * size * f.len() as f64 {
            bad.push(format!("t = {t:e}: {got} vs {sum}"));
        }
    }
    tally(bad, 200)
}

fn endpoint_limits() -> Result<(bool, String)> {
    let mut r = rng(104);
    let mut bad = Vec::new();
    for _ in 0..50 {
        // integer powers at 0 so the approach to the limit is O(t)
        let terms: Vec<_> =
            (0..r.gen_range(1..=3)).map(|_| (coeff(&mut r), Exponent::int(r.gen_range(-1..=2)), half(&mut r, -4, 2))).collect();
        let f = RadialFunction::from_terms(Domain::HalfLine, terms);
        let near = f.eval(1e-10)?;
        let ok = match f.endpoint_limit(End::Zero) {
            Limit::Finite(l) => (near - l).abs() <= 1e-8 * l.abs().max(1.0),
            Limit::PosInfinity => near > 1e6,
            Limit::NegInfinity => near < -1e6,
        };
        if !ok {
            bad.push(format!("{}", f.to_string().replace('\n', "; ")));
        }
    }
    tally(bad, 50)
}

fn text_round_trip() -> Result<(bool, String)> {
    let mut r = rng(105);
    let mut bad = Vec::new();
    for _ in 0..50 {
        let f = radial(&mut r);
        let mut g = f.clone();
        g.add_term(ExponentPair::new(Exponent::int(20), 0), 1.0);
        let back: RadialFunction = f.to_string().parse()?;
        let bits = back.terms().iter().zip(f.terms()).all(|(a, b)| a.coeff.to_bits() == b.coeff.to_bits());
        if back != f || !bits || g == f {
            bad.push(f.to_string().replace('\n', "; "));
        }
    }
    tally(bad, 50)
}

fn phi_family() -> Result<Vec<Weight>> {
    [(2, 0), (3, -1), (4, -2), (2, -2), (3, -3)]
        .iter()
        .map(|&(p, q)| Weight::monomial(Domain::HalfLine, 1.0, Exponent::ratio(p, 2), Exponent::ratio(q, 2)))
        .collect()
}

fn field_leibniz() -> Result<(bool, String)> {
    let mut r = rng(106);
    let phis = phi_family()?;
    let mut bad = Vec::new();
    for k in 0..50 {
        let x = phis[k % phis.len()].field();
        let (f, g) = (radial(&mut r), radial(&mut r));
        let lhs = x.apply(&(&f * &g))?;
        let rhs = &(&x.apply(&f)? * &g) + &(&f * &x.apply(&g)?);
        if !same(&lhs, &rhs) {
            bad.push(format!("pair {k}"));
        }
    }
    tally(bad, 50)
}

fn product_membership() -> Result<(bool, String)> {
    let mut r = rng(107);
    let phis = phi_family()?;
    let (mut bad, mut cases) = (Vec::new(), 0);
    for k in 0..200 {
        let phi = &phis[k % phis.len()];
        let n = r.gen_range(0..=4);
        let (f, g) = (bounded(&mut r), radial(&mut r));
        let level = Level::Finite(n);
        if !(membership_order(&f, phi, level)?.is_member && membership_order(&g, phi, level)?.is_member) {
            continue;
        }
        cases += 1;
        if !membership_order(&(&f * &g), phi, level)?.is_member {
            bad.push(format!("({f}) ({g}) at n = {n}"));
        }
    }
    tally(bad, cases)
}

fn equivalence() -> Result<(bool, String)> {
    let phi = Weight::monomial(Domain::HalfLine, 1.0, Exponent::ratio(3, 2), Exponent::ratio(-1, 2))?;
    let set: Vec<Weight> = [(0, 0, 1.0), (0, -1, 2.0), (1, -1, 1.0), (1, 0, 0.5), (2, -2, 1.0), (1, -2, 3.0), (0, 0, 4.0), (1, -1, 0.25)]
        .iter()
        .map(|&(p, q, c)| Weight::monomial(Domain::HalfLine, c, p, q))
        .collect::<Result<_>>()?;
    let n = set.len();
    let mut rel_table = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            rel_table[i][j] = weights_equivalent(&set[i], &set[j], &phi)?;
        }
    }
    let mut bad = Vec::new();
    for i in 0..n {
        if !rel_table[i][i] {
            bad.push(format!("not reflexive at {i}"));
        }
        for j in 0..n {
            if rel_table[i][j] != rel_table[j][i] {
                bad.push(format!("not symmetric at ({i}, {j})"));
            }
            for k in 0..n {
                if rel_table[i][j] && rel_table[j][k] && !rel_table[i][k] {
                    bad.push(format!("not transitive at ({i}, {j}, {k})"));
                }
            }
        }
    }
    tally(bad, n * n * n)
}

fn sample_flows() -> Result<Vec<Box<dyn FlowMap>>> {
    let reg = FlowRegistry::default();
    Ok(vec![
        Box::new(ExponentialFlow::new(1.0)),
        reg.build("tanh", &NumericWeight::symmetric_interval())?,
        reg.build("numeric", &NumericWeight::power_then_linear(Exponent::ratio(3, 2))?)?,
        reg.build("numeric", &NumericWeight::linear(0.5))?,
    ])
}

fn interior(flow: &dyn FlowMap, u: f64) -> f64 {
    let (lo, hi) = flow.interval();
    if hi.is_infinite() {
        lo + 10f64.powf(6.0 * u - 3.0)
    } else {
        lo + (hi - lo) * (0.02 + 0.96 * u)
    }
}

fn group_law_grid() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    let mut cases = 0;
    for flow in sample_flows()? {
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    let (s, t) = (-2.0 + 0.4 * i as f64, -2.0 + 0.4 * j as f64);
                    let x = interior(flow.as_ref(), k as f64 / 9.0);
                    let a = flow.apply(s, flow.apply(t, x)?)?;
                    worst = worst.max((a - flow.apply(s + t, x)?).abs() / a.abs().max(1.0));
                    cases += 1;
                }
            }
        }
        if worst > flow.tolerance() {
            bad.push(format!("{}: {worst:.1e}", flow.name()));
        }
    }
    tally(bad, cases)
}

fn monotone_and_fixed() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for flow in sample_flows()? {
        let (lo, hi) = flow.interval();
        if flow.apply(1.3, lo)? != lo || flow.apply(-0.7, hi)? != hi {
            bad.push(format!("{} moves an endpoint", flow.name()));
        }
        for s in [-2.5, -0.5, 0.5, 2.5] {
            let ys = (0..40).map(|k| flow.apply(s, interior(flow.as_ref(), k as f64 / 39.0))).collect::<Result<Vec<f64>>>()?;
            if ys.windows(2).any(|w| w[1] < w[0]) {
                bad.push(format!("{} not monotone at s = {s}", flow.name()));
            }
        }
    }
    let (exp, pow) = (ExponentialFlow::new(1.0), PowerFlow::new(2)?);
    for t in [-1.0, 0.5, 2.0] {
        let x = 1e-12;
        if (exp.apply(t, x)? / x - f64::exp(t)).abs() > 1e-8 || (pow.apply(t, x)? / x - 1.0).abs() > 1e-8 {
            bad.push(format!("rate at 0 wrong for t = {t}"));
        }
    }
    tally(bad, 4 * 4 * 40 + 3)
}

fn groupoid_structure() -> Result<(bool, String)> {
    let mut r = rng(111);
    let flow = PowerFlow::new(2)?;
    let mut bad = Vec::new();
    for _ in 0..200 {
        let h = GPhiElement::new(r.gen_range(0.01..0.3), r.gen_range(-1.0..0.5));
        let g = GPhiElement::new(h.range(&flow)?, r.gen_range(-1.0..0.5));
        let gh = gphi_compose(g, h, &flow)?;
        if gh.source() != h.source() || rel(gh.range(&flow)?, g.range(&flow)?) > flow.tolerance() {
            bad.push(format!("source/range of {g:?}{h:?}"));
        }
    }
    let exp = ExponentialFlow::new(1.0);
    let psi = Weight::power(Exponent::ratio(1, 2))?;
    let hp = HPsi::new(&exp, psi.clone())?;
    for _ in 0..200 {
        let (s, t, x, v) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(0.01..0.2), r.gen_range(-3.0..3.0));
        let inside = HPsiElement::Interior { theta1: 0.1, theta2: 0.4, x };
        if let (HPsiElement::Interior { x: a, .. }, HPsiElement::Interior { x: b, .. }) =
            (hp.act(s, hp.act(t, inside)?)?, hp.act(s + t, inside)?)
        {
            if (a - b).abs() > 1e-8 * b {
                bad.push(format!("interior action at s = {s}, t = {t}"));
            }
        }
        let edge = HPsiElement::Boundary { theta: 0.2, v };
        if let (HPsiElement::Boundary { v: a, .. }, HPsiElement::Boundary { v: b, .. }) =
            (hp.act(s, hp.act(t, edge)?)?, hp.act(s + t, edge)?)
        {
            if (a - b).abs() > 1e-14 * b.abs().max(1.0) {
                bad.push(format!("boundary action at s = {s}, t = {t}"));
            }
        }
    }
    for w in [-2.0, 0.5, 3.0] {
        let s = 1e-9;
        if let HPsiElement::Interior { theta1, theta2, .. } = hp.chart(0.3, w, s)? {
            let ratio = (theta2 - theta1) / psi.eval(s)?;
            if (ratio - w).abs() > 1e-6 {
                bad.push(format!("chart separation ratio {ratio} for w = {w}"));
            }
        }
    }
    tally(bad, 403)
}

fn associativity() -> Result<(bool, String)> {
    let mut r = rng(112);
    let mut bad = Vec::new();
    for k in 0..20 {
        let (a, b, c) = (operator(&mut r, 2)?, operator(&mut r, 2)?, operator(&mut r, 2)?);
        if !a.compose(&b)?.compose(&c)?.same_as(&a.compose(&b.compose(&c)?)?) {
            bad.push(format!("triple {k}"));
        }
    }
    tally(bad, 20)
}

fn normal_forms_act_alike() -> Result<(bool, String)> {
    let mut r = rng(113);
    let (phi, psi) = cylinder_weights()?;
    let mut bad = Vec::new();
    for k in 0..10 {
        let a = operator(&mut r, 2)?;
        let mono = DiffOp::from_monomial(&phi, &psi, normal_form(&a, Form::Monomial)?.coeffs)?;
        let lie = DiffOp::from_lie(&phi, &psi, normal_form(&a, Form::Lie)?.coeffs)?;
        for _ in 0..10 {
            let f = cylinder(&mut r);
            let direct = a.apply(&f)?;
            if !(direct.sub(&mono.apply(&f)?).vanishes() && direct.sub(&lie.apply(&f)?).vanishes()) {
                bad.push(format!("operator {k}"));
            }
        }
    }
    tally(bad, 100)
}

fn bracket_order() -> Result<(bool, String)> {
    let mut r = rng(114);
    let (phi, psi) = cylinder_weights()?;
    let (x, y) = (DiffOp::x_field(&phi, &psi)?, DiffOp::y_field(&phi, &psi)?);
    let field = |r: &mut ChaCha8Rng| x.left_mul(&cylinder(r)).add(&y.left_mul(&cylinder(r)));
    let mut bad = Vec::new();
    for k in 0..20 {
        let (a, b) = (field(&mut r)?, field(&mut r)?);
        let order = a.commutator(&b)?.order();
        if order > 1 {
            bad.push(format!("pair {k} has order {order}"));
        }
    }
    tally(bad, 20)
}

fn symbol_multiplicativity() -> Result<(bool, String)> {
    let mut r = rng(115);
    let (mut bad, mut cases) = (Vec::new(), 0);
    for k in 0..20 {
        let (a, b) = (operator(&mut r, 2)?, operator(&mut r, 1)?);
        let ab = a.compose(&b)?;
        let (sa, sb) = (principal_symbol(&a)?, principal_symbol(&b)?);
        if sa.order + sb.order != ab.order() {
            continue;
        }
        cases += 1;
        if !principal_symbol(&ab)?.same_as(&sa.mul(&sb)) {
            bad.push(format!("pair {k}"));
        }
    }
    tally(bad, cases)
}

fn remainder_order() -> Result<(bool, String)> {
    let mut r = rng(116);
    let phi = Weight::power(1)?;
    let psi = Weight::power(0)?;
    let d = Domain::HalfLine;
    let mut bad = Vec::new();
    for k in 0..10 {
        let (a, b) = (bounded(&mut r), bounded(&mut r));
        let shift = RadialFunction::constant(d, 4.0 * b.max_abs_coeff() + 1.0);
        let op = DiffOp::from_lie(
            &phi,
            &psi,
            [
                ((2, 0), CylinderFunction::constant(d, 1.0)),
                ((1, 0), CylinderFunction::radial(a)),
                ((0, 0), CylinderFunction::radial(&b + &shift)),
            ],
        )?;
        for n in 1..=3usize {
            let order = remainder_symbol(&parametrix_1d(&op, n)?).order();
            if order.is_some_and(|o| o > -(n as i64)) {
                bad.push(format!("operator {k}, N = {n}: order {order:?}"));
            }
        }
    }
    tally(bad, 30)
}

fn sample_problems() -> Result<Vec<SchrodingerProblem>> {
    let mut out = vec![SchrodingerProblem::hydrogen(0), SchrodingerProblem::hydrogen(2), SchrodingerProblem::oscillator(1)];
    for (n, g, gp, l) in [(2, Exponent::ratio(1, 2), Exponent::ZERO, 0), (4, Exponent::ratio(3, 2), Exponent::ratio(1, 3), 3)] {
        let v = RadialFunction::monomial(Domain::HalfLine, 1.5, -(g * 2), (g + gp) * 2);
        out.push(SchrodingerProblem::new(n, g, gp, v, l)?);
    }
    Ok(out)
}

fn symmetric_assembly() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, prob) in sample_problems()?.iter().enumerate() {
        for points in [100, 1000] {
            let a = assemble(prob, &GeometricGrid::new(-8.0, 6.0, points)?)?;
            worst = worst.max(a.asymmetry);
            if a.asymmetry > 1e-12 {
                bad.push(format!("problem {k} on {points} points: {:.1e}", a.asymmetry));
            }
        }
    }
    let (ok, detail) = tally(bad, 10)?;
    Ok((ok, format!("{detail}, worst {worst:.1e}")))
}

fn truncation_monotonicity() -> Result<(bool, String)> {
    let h: f64 = 24.0 / 4001.0;
    let cases = [
        (SchrodingerProblem::hydrogen(0), -0.25, [1.5, 2.0, 2.5, 3.0, 3.5]),
        (SchrodingerProblem::oscillator(0), 3.0, [0.5, 0.75, 1.0, 1.25, 1.5]),
    ];
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for (prob, exact, radii) in cases {
        let levels = radii
            .iter()
            .map(|&s_max: &f64| {
                let points = ((s_max + 12.0) / h).round() as usize - 1;
                Ok(assemble_and_solve(&prob, &GeometricGrid::new(-12.0, s_max, points)?, 1, &ShiftInvert)?.eigenvalues[0])
            })
            .collect::<Result<Vec<f64>>>()?;
        // at fixed spacing, a larger box only adds trial functions
        if levels.windows(2).any(|w| w[1] > w[0] + 1e-12) {
            bad.push(format!("{levels:?} not decreasing"));
        }
        let last = (levels[levels.len() - 1] - exact).abs();
        if last > 1e-3 {
            bad.push(format!("error {last:.1e} at the largest box"));
        }
        summary.push(format!("{:.6} → {:.6}", levels[0], levels[levels.len() - 1]));
    }
    let (ok, detail) = tally(bad, 10)?;
    Ok((ok, format!("{detail}: {}", summary.join(", "))))
}

fn deterministic_solves() -> Result<(bool, String)> {
    let grid = GeometricGrid::new(-10.0, 4.0, 800)?;
    let prob = SchrodingerProblem::hydrogen(1);
    let a = assemble_and_solve(&prob, &grid, 2, &ShiftInvert)?;
    let b = assemble_and_solve(&prob, &grid, 2, &ShiftInvert)?;
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let ok = bits(&a.eigenvalues) == bits(&b.eigenvalues) && bits(&a.residuals) == bits(&b.residuals);
    Ok((ok, format!("{:?} twice", a.eigenvalues)))
}
