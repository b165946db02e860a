//! Concrete groupoids over `[0, ∞]`: the action groupoid `G_φ = [0,∞] ⋊ ℝ`
//! of a flow, its product `S` with the pair groupoid of the circle, the
//! deformation groupoid `H_ψ` near the 0-end, and the `ζ` cocycles used to
//! conjugate kernels by powers of the boundary defining functions.
//!
//! Conventions: `(x, t)` has source `d = x` and range `r = σ_t(x)`;
//! `(θ₁, θ₂)` in a pair groupoid has range `θ₁` and source `θ₂`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flows::FlowMap;
use crate::powerfun::End;
use crate::weights::{structure_function, Weight};

const ANGLE_TOL: f64 = 1e-12;

/// Representative of `θ` in `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GPhiElement {
    pub x: f64,
    pub t: f64,
}

impl GPhiElement {
    pub fn new(x: f64, t: f64) -> Self {
        Self { x, t }
    }

    pub fn unit(x: f64) -> Self {
        Self { x, t: 0.0 }
    }

    pub fn source(&self) -> f64 {
        self.x
    }

    pub fn range(&self, flow: &dyn FlowMap) -> Result<f64> {
        flow.apply(self.t, self.x)
    }

    pub fn inverse(&self, flow: &dyn FlowMap) -> Result<Self> {
        Ok(Self { x: self.range(flow)?, t: -self.t })
    }
}

/// `(y, s)(x, t) = (x, s + t)`, defined when `y = σ_t(x)` up to the flow
/// tolerance.
pub fn gphi_compose(g: GPhiElement, h: GPhiElement, flow: &dyn FlowMap) -> Result<GPhiElement> {
    let gap = relative_gap(g.x, h.range(flow)?);
    if gap > flow.tolerance() {
        return Err(Error::NotComposable { factor: "flow", distance: gap });
    }
    Ok(GPhiElement { x: h.x, t: g.t + h.t })
}

/// Element of `S`: pair-groupoid angles over a `G_φ` element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SElement {
    pub theta1: f64,
    pub theta2: f64,
    pub x: f64,
    pub t: f64,
}

impl SElement {
    pub fn new(theta1: f64, theta2: f64, x: f64, t: f64) -> Self {
        Self { theta1, theta2, x, t }
    }

    pub fn unit(theta: f64, x: f64) -> Self {
        Self { theta1: theta, theta2: theta, x, t: 0.0 }
    }

    pub fn base(&self) -> GPhiElement {
        GPhiElement { x: self.x, t: self.t }
    }

    /// `(θ₂, x)`.
    pub fn source(&self) -> (f64, f64) {
        (self.theta2, self.x)
    }

    /// `(θ₁, σ_t x)`.
    pub fn range(&self, flow: &dyn FlowMap) -> Result<(f64, f64)> {
        Ok((self.theta1, self.base().range(flow)?))
    }

    pub fn inverse(&self, flow: &dyn FlowMap) -> Result<Self> {
        let b = self.base().inverse(flow)?;
        Ok(Self { theta1: self.theta2, theta2: self.theta1, x: b.x, t: b.t })
    }
}

pub fn s_compose(g: SElement, h: SElement, flow: &dyn FlowMap) -> Result<SElement> {
    let gap = angle_distance(g.theta2, h.theta1);
    if gap > ANGLE_TOL {
        return Err(Error::NotComposable { factor: "pair", distance: gap });
    }
    let base = gphi_compose(g.base(), h.base(), flow)?;
    Ok(SElement { theta1: g.theta1, theta2: h.theta2, x: base.x, t: base.t })
}

/// Element of `H_ψ` near the 0-end of `[0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HPsiElement {
    Interior { theta1: f64, theta2: f64, x: f64 },
    /// Tangent vector `v` at the base angle `θ`.
    Boundary { theta: f64, v: f64 },
}

/// `(v, θ)(w, θ) = (v + w, θ)` on the boundary, the pair law at fixed `x`
/// inside.
pub fn hpsi_compose(g: HPsiElement, h: HPsiElement) -> Result<HPsiElement> {
    use HPsiElement::*;
    match (g, h) {
        (Boundary { theta, v }, Boundary { theta: th, v: w }) => {
            let gap = angle_distance(theta, th);
            if gap > ANGLE_TOL {
                return Err(Error::NotComposable { factor: "tangent base", distance: gap });
            }
            Ok(Boundary { theta, v: v + w })
        }
        (Interior { theta1, theta2, x }, Interior { theta1: h1, theta2: h2, x: hx }) => {
            let gap = relative_gap(x, hx);
            if gap > ANGLE_TOL {
                return Err(Error::NotComposable { factor: "level", distance: gap });
            }
            let gap = angle_distance(theta2, h1);
            if gap > ANGLE_TOL {
                return Err(Error::NotComposable { factor: "pair", distance: gap });
            }
            Ok(Interior { theta1, theta2: h2, x })
        }
        _ => Err(Error::NotComposable { factor: "boundary/interior", distance: f64::INFINITY }),
    }
}

/// `H_ψ` at the 0-end together with the flow acting on it.
#[derive(Debug)]
pub struct HPsi<'a> {
    flow: &'a dyn FlowMap,
    psi: Weight,
    lambda: f64,
}

impl<'a> HPsi<'a> {
    pub fn new(flow: &'a dyn FlowMap, psi: Weight) -> Result<Self> {
        let phi = flow
            .near_zero_model()
            .ok_or_else(|| Error::InvalidInput(format!("flow `{}` has no ring model at 0", flow.name())))?;
        let lambda = structure_function(&psi, phi)?
            .value_at_zero
            .finite()
            .ok_or_else(|| Error::InvalidInput("C_{ψ,φ}(0) is infinite".into()))?;
        Ok(Self { flow, psi, lambda })
    }

    /// `C_{ψ,φ}(0)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The rescaled exponential chart: `(w, θ₁)` at `s = 0`,
    /// `(θ₁, θ₁ + ψ(s) w, s)` for `s > 0`, with window `|ψ(s) w| < π`.
    pub fn chart(&self, theta1: f64, w: f64, s: f64) -> Result<HPsiElement> {
        if !(s >= 0.0 && s.is_finite()) || !w.is_finite() {
            return Err(Error::ChartDomain(format!("s = {s}, w = {w}")));
        }
        if s == 0.0 {
            return Ok(HPsiElement::Boundary { theta: wrap_angle(theta1), v: w });
        }
        let step = self.psi.eval(s)? * w;
        if step.abs() >= PI {
            return Err(Error::ChartDomain(format!("|ψ(s) w| = {} outside the window", step.abs())));
        }
        Ok(HPsiElement::Interior { theta1: wrap_angle(theta1), theta2: wrap_angle(theta1 + step), x: s })
    }

    /// `σ_s` on `H_ψ`: the flow inside, `v ↦ e^{-λ s} v` on the boundary.
    pub fn act(&self, s: f64, g: HPsiElement) -> Result<HPsiElement> {
        Ok(match g {
            HPsiElement::Interior { theta1, theta2, x } => {
                HPsiElement::Interior { theta1, theta2, x: self.flow.apply(s, x)? }
            }
            HPsiElement::Boundary { theta, v } => HPsiElement::Boundary { theta, v: (-self.lambda * s).exp() * v },
        })
    }
}

/// Boundary defining functions `ρ₀`, `ρ_∞` of `[0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DefiningFunctions {
    /// `ρ₀ = t` below `ε`, `1` above 1, smooth in between; `ρ_∞(t) = ρ₀(1/t)`.
    Cutoff { epsilon: f64 },
    /// `ρ₀ = t/(1+t)`, `ρ_∞ = 1/(1+t)`.
    Rational,
}

impl Default for DefiningFunctions {
    fn default() -> Self {
        DefiningFunctions::Cutoff { epsilon: 0.1 }
    }
}

fn smooth_step(y: f64) -> f64 {
    let f = |z: f64| if z > 0.0 { (-1.0 / z).exp() } else { 0.0 };
    f(y) / (f(y) + f(1.0 - y))
}

impl DefiningFunctions {
    pub fn rho(&self, which: End, t: f64) -> f64 {
        match (self, which) {
            (DefiningFunctions::Cutoff { .. }, End::Far) => {
                if t == 0.0 {
                    1.0
                } else {
                    self.rho(End::Zero, 1.0 / t)
                }
            }
            (DefiningFunctions::Cutoff { epsilon }, End::Zero) => {
                if t.is_infinite() {
                    return 1.0;
                }
                let y = (t.ln() - epsilon.ln()) / -epsilon.ln();
                if y <= 0.0 {
                    t
                } else if y >= 1.0 {
                    1.0
                } else {
                    (t.ln() * (1.0 - smooth_step(y))).exp()
                }
            }
            (DefiningFunctions::Rational, End::Zero) => {
                if t.is_infinite() {
                    1.0
                } else {
                    t / (1.0 + t)
                }
            }
            (DefiningFunctions::Rational, End::Far) => {
                if t.is_infinite() {
                    0.0
                } else {
                    1.0 / (1.0 + t)
                }
            }
        }
    }
}

/// `ζ = ρ∘d / ρ∘r` for the chosen end, extended to the boundary by the
/// scaling rate of the flow there.
pub fn zeta_cocycle(g: GPhiElement, which: End, flow: &dyn FlowMap, rho: DefiningFunctions) -> Result<f64> {
    if flow.interval() != (0.0, f64::INFINITY) {
        return Err(Error::InvalidInput("ζ cocycles live on [0, ∞]".into()));
    }
    if g.t == 0.0 {
        return Ok(1.0);
    }
    let value = match (g.x == 0.0, g.x.is_infinite(), which) {
        (true, _, End::Zero) => (-flow.endpoint_rate(End::Zero) * g.t).exp(),
        (_, true, End::Far) => (flow.endpoint_rate(End::Far) * g.t).exp(),
        (true, _, End::Far) | (_, true, End::Zero) => 1.0,
        _ => rho.rho(which, g.x) / rho.rho(which, g.range(flow)?),
    };
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::PropertyViolation(format!("ζ not positive at {g:?}: {value}")));
    }
    Ok(value)
}

/// One sample of a kernel on `S`: source point `x`, group coordinate `s`,
/// angle offset, value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSample {
    pub x: f64,
    pub s: f64,
    pub angle: f64,
    pub value: Complex64,
}

/// Kernel sampled on a chart of `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelFunction {
    pub chart: String,
    pub samples: Vec<KernelSample>,
}

impl KernelFunction {
    pub fn new(chart: impl Into<String>, samples: Vec<KernelSample>) -> Result<Self> {
        if let Some(bad) = samples.iter().find(|k| !(k.value.re.is_finite() && k.value.im.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite kernel value at {bad:?}")));
        }
        Ok(Self { chart: chart.into(), samples })
    }

    /// Grid `xs × ss × angles` filled with `f(x, s, angle)`.
    pub fn tabulate(
        chart: impl Into<String>,
        xs: &[f64],
        ss: &[f64],
        angles: &[f64],
        f: impl Fn(f64, f64, f64) -> Complex64,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(xs.len() * ss.len() * angles.len());
        for &x in xs {
            for &s in ss {
                for &angle in angles {
                    samples.push(KernelSample { x, s, angle, value: f(x, s, angle) });
                }
            }
        }
        Self::new(chart, samples)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,s,angle,re,im\n");
        for k in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                crate::fmt_f64(k.x),
                crate::fmt_f64(k.s),
                crate::fmt_f64(k.angle),
                crate::fmt_f64(k.value.re),
                crate::fmt_f64(k.value.im)
            ));
        }
        out
    }
}

/// Kernel of `ρ_∞^{-t'} ρ₀^{-t} P ρ₀^t ρ_∞^{t'}`: multiply by `ζ₀^t ζ_∞^{t'}`.
pub fn kernel_conjugate(
    k: &KernelFunction,
    t: f64,
    t_prime: f64,
    flow: &dyn FlowMap,
    rho: DefiningFunctions,
) -> Result<KernelFunction> {
    let mut samples = Vec::with_capacity(k.samples.len());
    for sample in &k.samples {
        let g = GPhiElement::new(sample.x, sample.s);
        let mut factor = 1.0;
        if t != 0.0 {
            factor *= zeta_cocycle(g, End::Zero, flow, rho)?.powf(t);
        }
        if t_prime != 0.0 {
            factor *= zeta_cocycle(g, End::Far, flow, rho)?.powf(t_prime);
        }
        if !factor.is_finite() {
            return Err(Error::PropertyViolation(format!("conjugation factor unbounded at {g:?}")));
        }
        samples.push(KernelSample { value: sample.value * factor, ..*sample });
    }
    KernelFunction::new(k.chart.clone(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{ExponentialFlow, PowerFlow};
    use crate::powerfun::Exponent;

    #[test]
    fn gphi_examples() {
        let flow = ExponentialFlow::new(1.0);
        let g = gphi_compose(GPhiElement::new(4.0, 3f64.ln()), GPhiElement::new(2.0, 2f64.ln()), &flow).unwrap();
        assert_eq!(g.x, 2.0);
        assert!((g.t - 6f64.ln()).abs() < 1e-15);
        let u = GPhiElement::unit(0.7);
        assert_eq!(gphi_compose(u, u, &flow).unwrap(), u);
        let h = GPhiElement::new(0.3, 1.2);
        let back = gphi_compose(h, h.inverse(&flow).unwrap(), &flow).unwrap();
        assert!((back.x - h.range(&flow).unwrap()).abs() < 1e-15 && back.t == 0.0);
        match gphi_compose(GPhiElement::new(5.0, 0.0), GPhiElement::new(2.0, 2f64.ln()), &flow) {
            Err(Error::NotComposable { factor: "flow", distance }) => assert!((distance - 0.2).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn s_examples() {
        let flow = ExponentialFlow::new(1.0);
        let g = s_compose(SElement::new(0.1, 0.2, 4.0, 3f64.ln()), SElement::new(0.2, 0.3, 2.0, 2f64.ln()), &flow).unwrap();
        assert_eq!((g.theta1, g.theta2, g.x), (0.1, 0.3, 2.0));
        let u = SElement::unit(1.0, 2.0);
        assert_eq!(s_compose(u, u, &flow).unwrap(), u);
        assert!(matches!(
            s_compose(SElement::new(0.1, 0.2, 4.0, 0.0), SElement::new(0.25, 0.3, 4.0, 0.0), &flow),
            Err(Error::NotComposable { factor: "pair", .. })
        ));
    }

    #[test]
    fn hpsi_chart_and_compose() {
        let flow = ExponentialFlow::new(1.0);
        let b = 0.5;
        let h = HPsi::new(&flow, Weight::power(Exponent::ratio(1, 2)).unwrap()).unwrap();
        assert_eq!(h.chart(0.0, 0.3, 0.0).unwrap(), HPsiElement::Boundary { theta: 0.0, v: 0.3 });
        match h.chart(0.0, 1.0, 0.1).unwrap() {
            HPsiElement::Interior { theta1, theta2, x } => {
                assert_eq!((theta1, x), (0.0, 0.1));
                assert!((theta2 - 0.1f64.powf(b)).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(h.chart(0.0, 10.0, 1.0), Err(Error::ChartDomain(_))));
        let sum = hpsi_compose(HPsiElement::Boundary { theta: 1.0, v: 0.3 }, HPsiElement::Boundary { theta: 1.0, v: -0.1 }).unwrap();
        match sum {
            HPsiElement::Boundary { v, .. } => assert!((v - 0.2).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        let pair = hpsi_compose(
            HPsiElement::Interior { theta1: 0.1, theta2: 0.2, x: 0.5 },
            HPsiElement::Interior { theta1: 0.2, theta2: 0.3, x: 0.5 },
        )
        .unwrap();
        assert_eq!(pair, HPsiElement::Interior { theta1: 0.1, theta2: 0.3, x: 0.5 });
        assert!(hpsi_compose(HPsiElement::Boundary { theta: 1.0, v: 0.3 }, HPsiElement::Boundary { theta: 1.5, v: 0.3 }).is_err());
    }

    #[test]
    fn hpsi_action_on_boundary() {
        let flow = ExponentialFlow::new(1.0);
        let h = HPsi::new(&flow, Weight::power(Exponent::ratio(3, 4)).unwrap()).unwrap();
        let acted = h.act(1.0, HPsiElement::Boundary { theta: 0.0, v: 1.0 }).unwrap();
        assert_eq!(acted, HPsiElement::Boundary { theta: 0.0, v: (-0.75f64).exp() });
        let p = PowerFlow::new(2).unwrap();
        let h = HPsi::new(&p, Weight::power(Exponent::ratio(3, 4)).unwrap()).unwrap();
        let g = HPsiElement::Boundary { theta: 0.0, v: 0.4 };
        assert_eq!(h.act(2.5, g).unwrap(), g);
        assert_eq!(h.act(0.0, HPsiElement::Interior { theta1: 0.0, theta2: 0.1, x: 0.3 }).unwrap(),
            HPsiElement::Interior { theta1: 0.0, theta2: 0.1, x: 0.3 });
    }

    #[test]
    fn zeta_values() {
        let flow = ExponentialFlow::new(1.0);
        let rho = DefiningFunctions::default();
        let z = zeta_cocycle(GPhiElement::new(1e-4, 1.5), End::Zero, &flow, rho).unwrap();
        assert!((z - (-1.5f64).exp()).abs() < 1e-15);
        assert!((zeta_cocycle(GPhiElement::new(0.0, 1.5), End::Zero, &flow, rho).unwrap() - (-1.5f64).exp()).abs() < 1e-15);
        assert_eq!(zeta_cocycle(GPhiElement::unit(0.5), End::Zero, &flow, rho).unwrap(), 1.0);
        let z = zeta_cocycle(GPhiElement::new(1e6, 1.5), End::Far, &flow, rho).unwrap();
        assert!((z - 1.5f64.exp()).abs() < 1e-12);
        let p = PowerFlow::new(2).unwrap();
        assert_eq!(zeta_cocycle(GPhiElement::new(0.0, 3.0), End::Zero, &p, rho).unwrap(), 1.0);
        let near = zeta_cocycle(GPhiElement::new(1e-12, 3.0), End::Zero, &p, rho).unwrap();
        assert!((near - 1.0).abs() < 1e-10);
    }

    #[test]
    fn defining_functions_shape() {
        let rho = DefiningFunctions::default();
        assert_eq!(rho.rho(End::Zero, 0.05), 0.05);
        assert_eq!(rho.rho(End::Zero, 2.0), 1.0);
        assert_eq!(rho.rho(End::Far, 20.0), 0.05);
        assert_eq!(rho.rho(End::Far, 0.5), 1.0);
        let mid = rho.rho(End::Zero, 0.3);
        assert!(mid > 0.3 && mid < 1.0);
    }

    #[test]
    fn conjugation_of_constant_kernel() {
        let flow = ExponentialFlow::new(1.0);
        let ss = [-1.0, 0.0, 0.5, 1.0];
        let k = KernelFunction::tabulate("x near 0", &[0.0, 1e-6], &ss, &[0.0], |_, _, _| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(kernel_conjugate(&k, 0.0, 0.0, &flow, DefiningFunctions::default()).unwrap(), k);
        let c = kernel_conjugate(&k, 2.0, 0.0, &flow, DefiningFunctions::default()).unwrap();
        for sample in &c.samples {
            assert!((sample.value.re - (-2.0 * sample.s).exp()).abs() < 1e-14);
        }
        assert!(k.to_csv().starts_with("x,s,angle,re,im\n"));
    }
}
