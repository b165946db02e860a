//! One-parameter flows `σ_s = F⁻¹(F(·) + s)` of complete weights.
//!
//! `F(x) = ∫_γ^x dt/φ(t)` is a homeomorphism of the open interval onto `ℝ`
//! exactly when `φ` is complete; the flow then fixes both endpoints. Each
//! way of computing `σ_s` is a [`FlowMap`] strategy. Strategies are
//! registered by name in a [`FlowRegistry`] and built from a
//! [`NumericWeight`]; `auto` picks a closed form when the weight's shape
//! admits one.

mod closed;
mod numeric;
mod weight;

use std::collections::BTreeMap;
use std::fmt;

pub use closed::{ExponentialFlow, PowerFlow, TanhFlow};
pub use numeric::NumericFlow;
pub use weight::{NumericWeight, Shape};

use crate::error::{Error, Result};
use crate::powerfun::End;
use crate::weights::{structure_function, Weight};

/// Group-law tolerance of closed-form flows.
pub const TAU_CLOSED: f64 = 1e-10;
/// Group-law tolerance of quadrature-backed flows.
pub const TAU_NUMERIC: f64 = 1e-8;

/// A flow strategy.
pub trait FlowMap: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Closed interval `[lo, hi]`; `hi` may be `+∞`.
    fn interval(&self) -> (f64, f64);

    /// The base point `γ` with `F(γ) = 0`.
    fn base_point(&self) -> f64;

    fn f_map(&self, x: f64) -> Result<f64>;

    fn f_inverse(&self, y: f64) -> Result<f64>;

    /// `σ_s(x)`; endpoints are fixed.
    fn apply(&self, s: f64, x: f64) -> Result<f64> {
        match self.classify(x)? {
            Some(end) => Ok(end),
            None if s == 0.0 => Ok(x),
            None => self.f_inverse(self.f_map(x)? + s),
        }
    }

    /// `lim φ(x)/dist(x, end)`: the exponential rate of the flow at an end
    /// (`lim σ_s(x)/x = e^{rate·s}` at 0); zero when `φ` vanishes to higher
    /// order.
    fn endpoint_rate(&self, end: End) -> f64;

    /// A ring weight agreeing with `φ` near the lower endpoint, if known.
    fn near_zero_model(&self) -> Option<&Weight>;

    fn tolerance(&self) -> f64;

    /// Endpoint passthrough: `Ok(Some(x))` for an endpoint, `Ok(None)` for
    /// an interior point, error otherwise.
    fn classify(&self, x: f64) -> Result<Option<f64>> {
        let (lo, hi) = self.interval();
        if x == lo || x == hi {
            Ok(Some(x))
        } else if x > lo && x < hi {
            Ok(None)
        } else {
            Err(Error::NotInterior(x))
        }
    }
}

/// Constructor of a named strategy.
pub type FlowBuilder = fn(&NumericWeight) -> Result<Box<dyn FlowMap>>;

/// Name → strategy table.
pub struct FlowRegistry {
    builders: BTreeMap<&'static str, FlowBuilder>,
}

impl Default for FlowRegistry {
    fn default() -> Self {
        let mut reg = Self { builders: BTreeMap::new() };
        reg.register("exponential", |w| Ok(Box::new(ExponentialFlow::from_weight(w)?)));
        reg.register("power", |w| Ok(Box::new(PowerFlow::from_weight(w)?)));
        reg.register("tanh", |w| Ok(Box::new(TanhFlow::from_weight(w)?)));
        reg.register("numeric", |w| Ok(Box::new(NumericFlow::new(w.clone())?)));
        reg.register("auto", auto_flow);
        reg
    }
}

impl FlowRegistry {
    pub fn register(&mut self, name: &'static str, builder: FlowBuilder) {
        self.builders.insert(name, builder);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, name: &str, weight: &NumericWeight) -> Result<Box<dyn FlowMap>> {
        let builder = self.builders.get(name).ok_or_else(|| Error::UnknownStrategy {
            name: name.to_string(),
            available: self.names().collect::<Vec<_>>().join(", "),
        })?;
        builder(weight)
    }
}

fn auto_flow(w: &NumericWeight) -> Result<Box<dyn FlowMap>> {
    Ok(match w.shape() {
        Shape::Linear { .. } => Box::new(ExponentialFlow::from_weight(w)?),
        Shape::PowerNearZero { .. } => Box::new(PowerFlow::from_weight(w)?),
        Shape::SymmetricQuadratic => Box::new(TanhFlow::from_weight(w)?),
        Shape::General => Box::new(NumericFlow::new(w.clone())?),
    })
}

/// `∫ dt/φ` diverges at both ends.
pub fn completeness_check(phi: &Weight) -> bool {
    phi.is_complete()
}

/// Both routes to `lim_{t→0} ψ(t)/ψ(σ_s(t))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingLimit {
    /// `λ = C_{ψ,φ}(0)`.
    pub lambda: f64,
    /// `e^{-λ s}`.
    pub closed_form: f64,
    /// Limit of the quotient along `t = 10^{-k}`.
    pub numeric: f64,
}

const SCALING_AGREEMENT: f64 = 1e-6;

/// `lim_{t→0} ψ(t)/ψ(σ_s(t))`, computed as `e^{-λ s}` and numerically;
/// disagreement beyond `1e-6` is a property violation.
pub fn flow_scaling_limit(flow: &dyn FlowMap, psi: &Weight, s: f64) -> Result<ScalingLimit> {
    let phi = flow
        .near_zero_model()
        .ok_or_else(|| Error::InvalidInput(format!("flow `{}` has no ring model at 0", flow.name())))?;
    let lambda = structure_function(psi, phi)?
        .value_at_zero
        .finite()
        .ok_or_else(|| Error::InvalidInput("C_{ψ,φ}(0) is infinite".into()))?;
    let closed_form = (-lambda * s).exp();
    let numeric = numeric_scaling_limit(flow, psi, s)?;
    if (numeric - closed_form).abs() > SCALING_AGREEMENT * closed_form.abs().max(1.0) {
        return Err(Error::PropertyViolation(format!(
            "scaling limit: closed form {closed_form} vs numeric {numeric}"
        )));
    }
    Ok(ScalingLimit { lambda, closed_form, numeric })
}

fn numeric_scaling_limit(flow: &dyn FlowMap, psi: &Weight, s: f64) -> Result<f64> {
    let (lo, _) = flow.interval();
    if lo != 0.0 {
        return Err(Error::InvalidInput("scaling limit needs the lower endpoint at 0".into()));
    }
    let mut last = f64::NAN;
    for k in (4..=60).step_by(2) {
        let t = 10f64.powi(-k);
        let ratio = psi.profile().eval(t)? / psi.profile().eval(flow.apply(s, t)?)?;
        let settled = (ratio - last).abs() <= 1e-13 * ratio.abs();
        last = ratio;
        if settled {
            break;
        }
    }
    Ok(last)
}

/// CSV of `(s, x, σ_s(x))` rows with a header line.
pub fn flow_csv(flow: &dyn FlowMap, s: f64, xs: &[f64]) -> Result<String> {
    let mut out = String::from("s,x,sigma_s_x\n");
    for &x in xs {
        let y = flow.apply(s, x)?;
        out.push_str(&format!("{},{},{}\n", crate::fmt_f64(s), crate::fmt_f64(x), crate::fmt_f64(y)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powerfun::{Domain, Exponent};

    #[test]
    fn registry_lists_and_rejects() {
        let reg = FlowRegistry::default();
        let names: Vec<_> = reg.names().collect();
        assert_eq!(names, ["auto", "exponential", "numeric", "power", "tanh"]);
        let w = NumericWeight::linear(1.0);
        assert!(matches!(reg.build("bogus", &w), Err(Error::UnknownStrategy { .. })));
        assert!(reg.build("tanh", &w).is_err());
        assert_eq!(reg.build("auto", &w).unwrap().name(), "exponential");
    }

    #[test]
    fn completeness_examples() {
        assert!(completeness_check(&Weight::power(1).unwrap()));
        assert!(!completeness_check(&Weight::monomial(Domain::UnitInterval, 1.0, Exponent::ratio(1, 2), 0).unwrap()));
        assert!(completeness_check(&Weight::monomial(Domain::HalfLine, 1.0, 2, -1).unwrap()));
        // grows like t^2 at ∞: ∫ dt/t^2 converges
        assert!(!completeness_check(&Weight::monomial(Domain::HalfLine, 1.0, 2, 0).unwrap()));
    }

    #[test]
    fn scaling_limit_b_calculus() {
        let b = 0.75;
        let flow = ExponentialFlow::new(1.0);
        let psi = Weight::power(Exponent::ratio(3, 4)).unwrap();
        let lim = flow_scaling_limit(&flow, &psi, 1.0).unwrap();
        assert!((lim.closed_form - (-b as f64).exp()).abs() < 1e-15);
        assert!((lim.numeric - (-b as f64).exp()).abs() < 1e-12);
        let lim0 = flow_scaling_limit(&flow, &psi, 0.0).unwrap();
        assert_eq!(lim0.closed_form, 1.0);
        assert_eq!(lim0.numeric, 1.0);
    }

    #[test]
    fn scaling_limit_higher_order_weight_is_one() {
        let reg = FlowRegistry::default();
        for a in [1.5, 2.0] {
            let flow = reg.build("power", &NumericWeight::power_then_linear(a).unwrap()).unwrap();
            let psi = Weight::power(Exponent::ratio(1, 2)).unwrap();
            let lim = flow_scaling_limit(flow.as_ref(), &psi, 0.8).unwrap();
            assert_eq!(lim.lambda, 0.0);
            assert!((lim.numeric - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn flow_csv_has_header_and_rows() {
        let flow = ExponentialFlow::new(1.0);
        let csv = flow_csv(&flow, 2f64.ln(), &[0.0, 3.0]).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "s,x,sigma_s_x");
        assert!(lines[2].ends_with("6.0000000000000000e0"));
    }
}
