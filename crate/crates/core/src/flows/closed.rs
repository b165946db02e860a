//! Closed-form flows.

use super::{FlowMap, NumericFlow, NumericWeight, Shape, TAU_CLOSED};
use crate::error::{Error, Result};
use crate::powerfun::{Domain, End, Exponent, RadialFunction};
use crate::weights::Weight;

/// `φ = c t`: `σ_s(x) = e^{cs} x`, `F = ln(x)/c`.
#[derive(Clone, Debug)]
pub struct ExponentialFlow {
    rate: f64,
    model: Weight,
}

impl ExponentialFlow {
    pub fn new(rate: f64) -> Self {
        assert!(rate > 0.0, "rate must be positive");
        let model = Weight::monomial(Domain::HalfLine, rate, 1, 0).expect("positive monomial");
        Self { rate, model }
    }

    pub fn from_weight(w: &NumericWeight) -> Result<Self> {
        match w.shape() {
            Shape::Linear { rate } => Ok(Self::new(*rate)),
            _ => Err(Error::InvalidInput(format!("exponential flow needs φ = c t, got {}", w.label()))),
        }
    }
}

impl FlowMap for ExponentialFlow {
    fn name(&self) -> &'static str {
        "exponential"
    }

    fn interval(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn base_point(&self) -> f64 {
        1.0
    }

    fn f_map(&self, x: f64) -> Result<f64> {
        if self.classify(x)?.is_some() {
            return Err(Error::NotInterior(x));
        }
        Ok(x.ln() / self.rate)
    }

    fn f_inverse(&self, y: f64) -> Result<f64> {
        Ok((self.rate * y).exp())
    }

    fn apply(&self, s: f64, x: f64) -> Result<f64> {
        Ok(match self.classify(x)? {
            Some(end) => end,
            None => (self.rate * s).exp() * x,
        })
    }

    fn endpoint_rate(&self, _end: End) -> f64 {
        self.rate
    }

    fn near_zero_model(&self) -> Option<&Weight> {
        Some(&self.model)
    }

    fn tolerance(&self) -> f64 {
        TAU_CLOSED
    }
}

/// `φ = t^a` on `(0, 1]`, `t` beyond, `a > 1`.
///
/// With `F(x) = (1 - x^{1-a})/(a-1)` on the pure-power part,
/// `σ_s(x) = x [1 - (a-1) s x^{a-1}]^{1/(1-a)}` whenever `x <= 1` and
/// `F(x) + s <= 0`; elsewhere the quadrature flow of the same weight is used.
#[derive(Clone, Debug)]
pub struct PowerFlow {
    a: Exponent,
    model: Weight,
    fallback: NumericFlow,
}

impl PowerFlow {
    pub fn new(a: impl Into<Exponent>) -> Result<Self> {
        Self::from_weight(&NumericWeight::power_then_linear(a)?)
    }

    pub fn from_weight(w: &NumericWeight) -> Result<Self> {
        let a = match w.shape() {
            Shape::PowerNearZero { a } if a.cmp_approx(Exponent::ONE).is_gt() => *a,
            _ => return Err(Error::InvalidInput(format!("power flow needs t^a with a > 1, got {}", w.label()))),
        };
        Ok(Self { a, model: Weight::power(a)?, fallback: NumericFlow::new(w.clone())? })
    }

    pub fn exponent(&self) -> Exponent {
        self.a
    }

    fn am1(&self) -> f64 {
        self.a.to_f64() - 1.0
    }

    fn closed_f(&self, x: f64) -> f64 {
        let m = self.am1();
        -(x.powf(-m) - 1.0) / m
    }

    /// Whether the closed form applies to `(s, x)`.
    pub fn in_closed_region(&self, s: f64, x: f64) -> bool {
        x > 0.0 && x <= 1.0 && self.closed_f(x) + s <= 0.0
    }

    /// The closed form, without the region check.
    pub fn closed_form(&self, s: f64, x: f64) -> f64 {
        let m = self.am1();
        x * (1.0 - m * s * x.powf(m)).powf(-1.0 / m)
    }

    /// Terms `j < n` of the expansion of `σ_s` at 0:
    /// `Σ_j binom(-1/(a-1), j) (-(a-1)s)^j x^{1 + j(a-1)}`.
    pub fn local_series(&self, s: f64, n: usize) -> RadialFunction {
        let m = self.a - 1;
        let alpha = -1.0 / m.to_f64();
        let z = -m.to_f64() * s;
        let mut f = RadialFunction::zero(Domain::HalfLine);
        let mut binom = 1.0;
        let mut zj = 1.0;
        for j in 0..n {
            let p = m * j as i64 + 1;
            f = &f + &RadialFunction::power(binom * zj, p);
            binom *= (alpha - j as f64) / (j as f64 + 1.0);
            zj *= z;
        }
        f
    }
}

impl FlowMap for PowerFlow {
    fn name(&self) -> &'static str {
        "power"
    }

    fn interval(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn base_point(&self) -> f64 {
        1.0
    }

    fn f_map(&self, x: f64) -> Result<f64> {
        if self.classify(x)?.is_some() {
            return Err(Error::NotInterior(x));
        }
        if x <= 1.0 {
            Ok(self.closed_f(x))
        } else {
            self.fallback.f_map(x)
        }
    }

    fn f_inverse(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            Ok((1.0 - self.am1() * y).powf(-1.0 / self.am1()))
        } else {
            self.fallback.f_inverse(y)
        }
    }

    fn apply(&self, s: f64, x: f64) -> Result<f64> {
        match self.classify(x)? {
            Some(end) => Ok(end),
            None if self.in_closed_region(s, x) => Ok(self.closed_form(s, x)),
            None => self.fallback.apply(s, x),
        }
    }

    fn endpoint_rate(&self, end: End) -> f64 {
        match end {
            End::Zero => 0.0,
            End::Far => 1.0,
        }
    }

    fn near_zero_model(&self) -> Option<&Weight> {
        Some(&self.model)
    }

    fn tolerance(&self) -> f64 {
        TAU_CLOSED
    }
}

/// `φ = (1+t)(1-t)` on `[-1, 1]`: `F = atanh`, `F⁻¹ = tanh`.
#[derive(Clone, Copy, Debug, Default)]
pub struct TanhFlow;

impl TanhFlow {
    pub fn from_weight(w: &NumericWeight) -> Result<Self> {
        match w.shape() {
            Shape::SymmetricQuadratic => Ok(Self),
            _ => Err(Error::InvalidInput(format!("tanh flow needs (1+t)(1-t), got {}", w.label()))),
        }
    }
}

impl FlowMap for TanhFlow {
    fn name(&self) -> &'static str {
        "tanh"
    }

    fn interval(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn base_point(&self) -> f64 {
        0.0
    }

    fn f_map(&self, x: f64) -> Result<f64> {
        if self.classify(x)?.is_some() {
            return Err(Error::NotInterior(x));
        }
        Ok(x.atanh())
    }

    fn f_inverse(&self, y: f64) -> Result<f64> {
        Ok(y.tanh())
    }

    fn endpoint_rate(&self, _end: End) -> f64 {
        2.0
    }

    fn near_zero_model(&self) -> Option<&Weight> {
        None
    }

    fn tolerance(&self) -> f64 {
        TAU_CLOSED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let e = ExponentialFlow::new(1.0);
        assert!((e.f_map(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!((e.apply(2f64.ln(), 3.0).unwrap() - 6.0).abs() < 1e-14);
        let p = PowerFlow::new(2).unwrap();
        assert!((p.f_map(0.5).unwrap() + 1.0).abs() < 1e-15);
        assert!((p.apply(0.5, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(TanhFlow.f_inverse(0.0).unwrap(), 0.0);
    }

    #[test]
    fn endpoints_are_fixed() {
        let p = PowerFlow::new(Exponent::ratio(3, 2)).unwrap();
        assert_eq!(p.apply(7.0, 0.0).unwrap(), 0.0);
        assert_eq!(p.apply(-7.0, f64::INFINITY).unwrap(), f64::INFINITY);
        assert_eq!(TanhFlow.apply(3.0, -1.0).unwrap(), -1.0);
        assert!(TanhFlow.apply(3.0, 1.5).is_err());
    }

    #[test]
    fn power_fallback_is_continuous_across_region() {
        let p = PowerFlow::new(2).unwrap();
        // F(0.5) = -1: s = 1 is the region edge
        let inside = p.apply(1.0 - 1e-9, 0.5).unwrap();
        let outside = p.apply(1.0 + 1e-9, 0.5).unwrap();
        assert!((inside - 1.0).abs() < 1e-8 && (outside - 1.0).abs() < 1e-8);
    }

    #[test]
    fn local_series_matches_closed_form() {
        let p = PowerFlow::new(2).unwrap();
        let series = p.local_series(0.3, 30);
        for x in [1e-3, 1e-2, 0.1] {
            let a = series.eval(x).unwrap();
            let b = p.closed_form(0.3, x);
            assert!((a - b).abs() < 1e-14 * b, "{x}: {a} vs {b}");
        }
        // a = 2: the expansion is the geometric series x Σ (sx)^j
        let first: Vec<f64> = series.terms().iter().take(3).map(|t| t.coeff).collect();
        assert!((first[0] - 1.0).abs() < 1e-15 && (first[1] - 0.3).abs() < 1e-15 && (first[2] - 0.09).abs() < 1e-15);
    }
}
