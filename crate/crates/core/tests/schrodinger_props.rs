use cabcalc::diffop::CylinderFunction;
use cabcalc::powerfun::{Domain, End, Exponent, RadialFunction};
use cabcalc::schrodinger::{
    assemble, assemble_and_solve, rewrite, GeometricGrid, SchrodingerProblem, ShiftInvert,
};
use proptest::prelude::*;

fn problem() -> impl Strategy<Value = SchrodingerProblem> {
    (2u32..=5, 0u32..=3, prop::sample::select(vec![(0, 1), (1, 2), (1, 1), (3, 2)]), prop::sample::select(vec![(0, 1), (-1, 2), (1, 3), (1, 1)]), 0.5f64..2.0)
        .prop_map(|(n, l, (gn, gd), (pn, pd), c)| {
            let (g, gp) = (Exponent::ratio(gn, gd), Exponent::ratio(pn, pd));
            // V = c ρ^{-2γ} (1+ρ)^{2γ+2γ'} behaves like ρ^{-2γ} at 0 and ρ^{2γ'} at ∞
            let v = RadialFunction::monomial(Domain::HalfLine, c, -(g * 2), (g + gp) * 2);
            SchrodingerProblem::new(n, g, gp, v, l).unwrap()
        })
}

fn grid_with_spacing(s_min: f64, s_max: f64, h: f64) -> GeometricGrid {
    let points = ((s_max - s_min) / h).round() as usize - 1;
    GeometricGrid::new(s_min, s_max, points).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rewrites_reproduce_the_radial_operator(prob in problem(), k in 0usize..3) {
        let u = [
            RadialFunction::monomial(Domain::HalfLine, 1.0, Exponent::ratio(3, 2), -3),
            RadialFunction::monomial(Domain::HalfLine, 2.0, 2, -4),
            RadialFunction::monomial(Domain::HalfLine, -1.0, Exponent::ratio(5, 2), Exponent::ratio(-7, 2)),
        ][k].clone();
        let (du, ddu) = (u.derivative(), u.derivative().derivative());
        let n = prob.n as f64;
        for rw in rewrite(&prob).unwrap() {
            let local = match rw.branch.end() {
                End::Zero => u.clone(),
                End::Far => u.invert_variable().unwrap(),
            };
            let out = rw.radial.apply(&CylinderFunction::radial(local)).unwrap();
            let out = out.mode(0).map(|c| c.re.clone()).unwrap_or_else(|| RadialFunction::zero(Domain::HalfLine));
            for rho in [0.07, 0.6, 1.0, 3.0, 11.0] {
                let v = if rw.branch.end() == End::Zero { rho } else { 1.0 / rho };
                let lhs = out.eval(v).unwrap() / v.powf(rw.multiplier.to_f64());
                let rhs = ddu.eval(rho).unwrap() + (n - 1.0) / rho * du.eval(rho).unwrap()
                    - prob.angular_eigenvalue() / (rho * rho) * u.eval(rho).unwrap()
                    + prob.potential.eval(rho).unwrap() * u.eval(rho).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1e-12), "{:?} at {}: {} vs {}", rw.branch, rho, lhs, rhs);
            }
        }
    }

    #[test]
    fn assembled_matrices_are_symmetric(prob in problem(), points in 50usize..400) {
        let grid = GeometricGrid::new(-8.0, 6.0, points).unwrap();
        prop_assert!(assemble(&prob, &grid).unwrap().asymmetry <= 1e-12);
    }
}

#[test]
fn truncation_radius_gives_monotone_upper_bounds() {
    let h = 24.0 / 4001.0;
    let cases = [
        (SchrodingerProblem::hydrogen(0), -0.25, [1.5, 2.0, 2.5, 3.0, 3.5]),
        (SchrodingerProblem::oscillator(0), 3.0, [0.5, 0.75, 1.0, 1.25, 1.5]),
    ];
    for (prob, exact, radii) in cases {
        let levels: Vec<f64> = radii
            .iter()
            .map(|&s_max| assemble_and_solve(&prob, &grid_with_spacing(-12.0, s_max, h), 1, &ShiftInvert).unwrap().eigenvalues[0])
            .collect();
        for w in levels.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{levels:?}");
        }
        let errors: Vec<f64> = levels.iter().map(|e| (e - exact).abs()).collect();
        assert!(errors.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{errors:?}");
        assert!(errors[errors.len() - 1] < 1e-3, "{errors:?}");
    }
}

#[test]
fn solves_are_deterministic() {
    let grid = GeometricGrid::new(-10.0, 4.0, 800).unwrap();
    let a = assemble_and_solve(&SchrodingerProblem::hydrogen(1), &grid, 2, &ShiftInvert).unwrap();
    let b = assemble_and_solve(&SchrodingerProblem::hydrogen(1), &grid, 2, &ShiftInvert).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.eigenvalues), bits(&b.eigenvalues));
    assert_eq!(bits(&a.residuals), bits(&b.residuals));
}
