use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::powerfun::{Domain, End, Exponent};
use crate::weights::Weight;

/// Structural hint used to pick a closed form.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// `φ = c t` on the half-line.
    Linear { rate: f64 },
    /// `φ = t^a` on `(0, 1]` and `φ = t` beyond.
    PowerNearZero { a: Exponent },
    /// `φ = (1+t)(1-t)` on `[-1, 1]`.
    SymmetricQuadratic,
    General,
}

/// A complete weight given pointwise, with its endpoint rates.
#[derive(Clone)]
pub struct NumericWeight {
    label: String,
    lo: f64,
    hi: f64,
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    rate_lo: f64,
    rate_hi: f64,
    breakpoints: Vec<f64>,
    shape: Shape,
    near_zero: Option<Weight>,
}

impl fmt::Debug for NumericWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericWeight")
            .field("label", &self.label)
            .field("interval", &(self.lo, self.hi))
            .field("shape", &self.shape)
            .finish()
    }
}

fn rate_if(order: Exponent, critical: i64, coeff: f64) -> f64 {
    if order.approx_eq(Exponent::int(critical)) {
        coeff
    } else {
        0.0
    }
}

impl NumericWeight {
    /// A complete ring weight.
    pub fn from_ring(w: &Weight) -> Result<Self> {
        if !w.is_complete() {
            return Err(Error::IncompleteWeight(format!("a = {}, a' = {}", w.a(), w.a_prime())));
        }
        let domain = w.domain();
        let far_critical = match domain {
            Domain::HalfLine => -1,
            Domain::UnitInterval => 1,
        };
        let shape = match w.profile().single_term() {
            Some(t) if domain == Domain::HalfLine && t.key.p.approx_eq(Exponent::ONE) && t.key.q.is_zero() => {
                Shape::Linear { rate: t.coeff }
            }
            _ => Shape::General,
        };
        let profile = w.profile().clone();
        Ok(Self {
            label: format!("ring weight {}", profile.to_string().trim_end().replace('\n', " + ")),
            lo: 0.0,
            hi: domain.upper(),
            phi: Arc::new(move |t| profile.eval_unchecked(t)),
            rate_lo: rate_if(w.a(), 1, w.leading_coeff(End::Zero)),
            rate_hi: rate_if(w.a_prime(), far_critical, w.leading_coeff(End::Far)),
            breakpoints: Vec::new(),
            shape,
            near_zero: Some(w.clone()),
        })
    }

    /// `φ = c t` on the half-line.
    pub fn linear(c: f64) -> Self {
        Self {
            label: format!("{c} t"),
            lo: 0.0,
            hi: f64::INFINITY,
            phi: Arc::new(move |t| c * t),
            rate_lo: c,
            rate_hi: c,
            breakpoints: Vec::new(),
            shape: Shape::Linear { rate: c },
            near_zero: Weight::monomial(Domain::HalfLine, c, 1, 0).ok(),
        }
    }

    /// `φ = t^a` on `(0, 1]`, `φ = t` on `[1, ∞)`; complete for `a >= 1`.
    pub fn power_then_linear(a: impl Into<Exponent>) -> Result<Self> {
        let a = a.into();
        if a.cmp_approx(Exponent::ONE).is_lt() {
            return Err(Error::IncompleteWeight(format!("t^{a} is not complete at 0")));
        }
        let af = a.to_f64();
        Ok(Self {
            label: format!("t^{a} near 0, t beyond 1"),
            lo: 0.0,
            hi: f64::INFINITY,
            phi: Arc::new(move |t| if t <= 1.0 { t.powf(af) } else { t }),
            rate_lo: if a.approx_eq(Exponent::ONE) { 1.0 } else { 0.0 },
            rate_hi: 1.0,
            breakpoints: vec![1.0],
            shape: Shape::PowerNearZero { a },
            near_zero: Some(Weight::power(a)?),
        })
    }

    /// `φ = (1+t)(1-t)` on `[-1, 1]`.
    pub fn symmetric_interval() -> Self {
        Self {
            label: "(1+t)(1-t) on [-1, 1]".into(),
            lo: -1.0,
            hi: 1.0,
            phi: Arc::new(|t| (1.0 + t) * (1.0 - t)),
            rate_lo: 2.0,
            rate_hi: 2.0,
            breakpoints: Vec::new(),
            shape: Shape::SymmetricQuadratic,
            near_zero: None,
        }
    }

    /// An arbitrary positive `φ` on `(lo, hi)`; completeness is the
    /// caller's claim and is only checked numerically by the flow.
    pub fn custom(
        label: impl Into<String>,
        (lo, hi): (f64, f64),
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        (rate_lo, rate_hi): (f64, f64),
    ) -> Result<Self> {
        if !(lo.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self {
            label: label.into(),
            lo,
            hi,
            phi: Arc::new(phi),
            rate_lo,
            rate_hi,
            breakpoints: Vec::new(),
            shape: Shape::General,
            near_zero: None,
        })
    }

    /// Points where `φ` is not smooth; quadrature splits there.
    pub fn with_breakpoints(mut self, points: Vec<f64>) -> Self {
        self.breakpoints = points;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.phi)(t)
    }

    pub fn rate(&self, end: End) -> f64 {
        match end {
            End::Zero => self.rate_lo,
            End::Far => self.rate_hi,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn near_zero(&self) -> Option<&Weight> {
        self.near_zero.as_ref()
    }
}
