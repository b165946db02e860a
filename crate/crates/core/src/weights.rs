//! Weights `φ`, the weighted derivation `X = φ ∂_t`, and membership in the
//! coefficient algebras `C_φ^(n)`.
//!
//! Membership of `u` in `C_φ^(n)` means `X^k u` extends continuously to both
//! endpoints for every `k <= n`. For ring elements this is decided exactly
//! from local expansions. Quotients `num / den` of ring elements are handled
//! through `X^k (num/den) = N_k / den^{k+1}` with
//! `N_{k+1} = den X(N_k) - (k+1) X(den) N_k`, which keeps everything in the
//! ring.

use crate::error::{Error, Result};
use crate::powerfun::{Domain, End, Exponent, Leading, Limit, RadialFunction};

/// Iteration cap for the `n = ∞` decision when the exponent-shift argument
/// does not apply.
pub const MEMBERSHIP_CAP: u32 = 64;

const POSITIVITY_SAMPLES: usize = 10_000;

/// A strictly positive ring function together with its endpoint exponents.
#[derive(Clone, Debug)]
pub struct Weight {
    profile: RadialFunction,
    a: Exponent,
    a_prime: Exponent,
}

impl Weight {
    pub fn new(profile: RadialFunction) -> Result<Self> {
        if profile.is_empty() {
            return Err(Error::InvalidWeight("zero profile".into()));
        }
        let (a, c0) = profile
            .order_at(End::Zero)
            .ok_or_else(|| Error::InvalidWeight("profile vanishes identically at 0".into()))?;
        let (a_prime, c1) = profile
            .order_at(End::Far)
            .ok_or_else(|| Error::InvalidWeight("profile vanishes identically at the far end".into()))?;
        if !profile.terms().iter().all(|t| t.coeff > 0.0) {
            if c0 <= 0.0 || c1 <= 0.0 {
                return Err(Error::InvalidWeight("negative near an endpoint".into()));
            }
            if let Some(t) = sample_points(profile.domain(), POSITIVITY_SAMPLES)
                .find(|&t| profile.eval_unchecked(t) <= 0.0)
            {
                return Err(Error::InvalidWeight(format!("not positive at t = {t:e}")));
            }
        }
        Ok(Self { profile, a, a_prime })
    }

    /// Single-term weight `c t^p (1 ± t)^q`.
    pub fn monomial(domain: Domain, c: f64, p: impl Into<Exponent>, q: impl Into<Exponent>) -> Result<Self> {
        Self::new(RadialFunction::monomial(domain, c, p, q))
    }

    /// `t^p` on the half-line.
    pub fn power(p: impl Into<Exponent>) -> Result<Self> {
        Self::new(RadialFunction::power(1.0, p))
    }

    pub fn profile(&self) -> &RadialFunction {
        &self.profile
    }

    pub fn domain(&self) -> Domain {
        self.profile.domain()
    }

    /// Vanishing order at 0.
    pub fn a(&self) -> Exponent {
        self.a
    }

    /// Order at the far end in the local variable (`1/t` on the half-line,
    /// `1-t` on the unit interval). On the half-line this is `-max(p+q)`.
    pub fn a_prime(&self) -> Exponent {
        self.a_prime
    }

    /// Vanishing order of the field `φ ∂_t` at the far end written in the
    /// local coordinate: `a' + 2` on the half-line (`r = 1/t`), `a'` on the
    /// unit interval.
    pub fn intrinsic_far_exponent(&self) -> Exponent {
        match self.domain() {
            Domain::HalfLine => self.a_prime + 2,
            Domain::UnitInterval => self.a_prime,
        }
    }

    /// Leading coefficient at an end.
    pub fn leading_coeff(&self, end: End) -> f64 {
        self.profile.order_at(end).map(|(_, c)| c).unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.profile.eval(t)
    }

    /// Divergence of `∫ dt/φ` at 0.
    pub fn complete_at_zero(&self) -> bool {
        self.a.cmp_approx(Exponent::ONE).is_ge()
    }

    /// Divergence of `∫ dt/φ` at the far end.
    pub fn complete_at_far(&self) -> bool {
        match self.domain() {
            Domain::HalfLine => self.a_prime.cmp_approx(Exponent::int(-1)).is_ge(),
            Domain::UnitInterval => self.a_prime.cmp_approx(Exponent::ONE).is_ge(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.complete_at_zero() && self.complete_at_far()
    }

    /// Once `X^k u` is continuous at `end`, this guarantees every later
    /// iterate stays continuous there.
    fn shift_is_admissible(&self, end: End) -> bool {
        match end {
            End::Zero => self.complete_at_zero(),
            End::Far => self.complete_at_far(),
        }
    }

    pub fn field(&self) -> WeightedField {
        WeightedField { weight: self.clone() }
    }
}

/// Log-spaced interior sample points.
pub fn sample_points(domain: Domain, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
        match domain {
            Domain::HalfLine => 10f64.powf(8.0 * x),
            Domain::UnitInterval => 1.0 / (1.0 + (-18.0 * x).exp()),
        }
    })
}

/// The derivation `X = φ ∂_t`.
#[derive(Clone, Debug)]
pub struct WeightedField {
    weight: Weight,
}

impl WeightedField {
    pub fn new(weight: Weight) -> Self {
        Self { weight }
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn apply(&self, f: &RadialFunction) -> Result<RadialFunction> {
        self.weight.profile.try_mul(&f.derivative())
    }

    /// `X^k f`, exactly.
    pub fn apply_n(&self, f: &RadialFunction, k: u32) -> Result<RadialFunction> {
        let mut out = f.clone();
        for _ in 0..k {
            if out.is_zero() {
                break;
            }
            out = self.apply(&out)?;
        }
        Ok(out)
    }
}

/// Requested smoothness level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Finite(u32),
    Infinite,
}

/// Outcome of a membership decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    /// Largest `k` such that `X^j u` is continuous for all `j <= k`
    /// (among the iterates examined); `None` when `u` itself is not.
    pub member_up_to: Option<u32>,
    pub is_member: bool,
    /// The `∞` decision hit [`MEMBERSHIP_CAP`] without a verdict.
    pub undecided_cap: bool,
}

impl Membership {
    fn member(k: u32) -> Self {
        Self { member_up_to: Some(k), is_member: true, undecided_cap: false }
    }

    fn failed_at(k: u32) -> Self {
        Self { member_up_to: k.checked_sub(1), is_member: false, undecided_cap: false }
    }
}

/// Whether every later iterate `X^j (num/den)` stays continuous at `end`,
/// given that the current one is.
///
/// Either `φ` is complete at `end` (each application of `X` raises the local
/// order, so nonnegative orders stay nonnegative), or the end is a finite
/// point where `φ`, `num` and `den` only carry nonnegative integer powers of
/// the local variable and `den` does not vanish there (the quotient is then
/// smooth in the local variable and so are all its `X`-derivatives).
fn end_is_stable(phi: &Weight, num: &RadialFunction, den: &RadialFunction, end: End) -> bool {
    if phi.shift_is_admissible(end) {
        return true;
    }
    let local = |t: &crate::powerfun::Term| match end {
        End::Zero => t.key.p,
        End::Far => t.key.q,
    };
    let finite_end = end == End::Zero || phi.domain() == Domain::UnitInterval;
    let smooth = |f: &RadialFunction| f.terms().iter().all(|t| matches!(local(t).as_integer(), Some(n) if n >= 0));
    finite_end
        && smooth(phi.profile())
        && smooth(num)
        && smooth(den)
        && matches!(den.order_at(end), Some((o, _)) if o.is_zero())
}

/// Continuity at `end` of `num / den^m`.
fn quotient_continuous_at(num: &RadialFunction, den: &RadialFunction, m: u32, end: End) -> Result<bool> {
    if num.is_empty() {
        return Ok(true);
    }
    let (den_order, _) = den
        .order_at(end)
        .ok_or_else(|| Error::InvalidInput("denominator vanishes identically".into()))?;
    let threshold = den_order * (m as i64);
    Ok(match num.leading(end, threshold) {
        Leading::Beyond => true,
        Leading::Term { order, .. } => order.cmp_approx(threshold).is_ge(),
    })
}

/// Decide `num / den ∈ C_φ^(n)`; `den` must be positive on the interior.
pub fn quotient_membership(num: &RadialFunction, den: &RadialFunction, phi: &Weight, level: Level) -> Result<Membership> {
    if num.domain() != phi.domain() || den.domain() != phi.domain() {
        return Err(Error::DomainMismatch("membership operands".into()));
    }
    let x = phi.field();
    let x_den = x.apply(den)?;
    let cap = match level {
        Level::Finite(n) => n,
        Level::Infinite => MEMBERSHIP_CAP,
    };
    let mut n_k = num.clone();
    for k in 0..=cap {
        let zero_ok = quotient_continuous_at(&n_k, den, k + 1, End::Zero)?;
        let far_ok = quotient_continuous_at(&n_k, den, k + 1, End::Far)?;
        if !(zero_ok && far_ok) {
            return Ok(Membership::failed_at(k));
        }
        if n_k.is_empty() {
            return Ok(Membership::member(k));
        }
        if level == Level::Infinite && end_is_stable(phi, &n_k, den, End::Zero) && end_is_stable(phi, &n_k, den, End::Far) {
            return Ok(Membership::member(k));
        }
        if k == cap {
            break;
        }
        // N_{k+1} = den X(N_k) - (k+1) X(den) N_k
        let next = den.try_mul(&x.apply(&n_k)?)?;
        let correction = x_den.try_mul(&n_k)?.scale(-((k + 1) as f64));
        n_k = next.try_add(&correction)?;
    }
    Ok(match level {
        Level::Finite(n) => Membership::member(n),
        Level::Infinite => Membership { member_up_to: Some(cap), is_member: false, undecided_cap: true },
    })
}

/// Decide `f ∈ C_φ^(n)`.
pub fn membership_order(f: &RadialFunction, phi: &Weight, level: Level) -> Result<Membership> {
    quotient_membership(f, &RadialFunction::constant(f.domain(), 1.0), phi, level)
}

/// `C_{ψ,φ} = φ ψ' / ψ` with its endpoint values.
#[derive(Clone, Debug)]
pub struct StructureFunction {
    /// Exact ring form, available when `ψ` is a single term.
    pub exact: Option<RadialFunction>,
    /// `φ ψ'`.
    pub numerator: RadialFunction,
    /// `ψ`.
    pub denominator: RadialFunction,
    pub value_at_zero: Limit,
    /// Literal value of `φψ'/ψ` at the far end. On a bounded interval this
    /// carries the sign produced by the formula; see `far_magnitude`.
    pub value_at_far: Limit,
    pub far_magnitude: f64,
    /// True when only the quotient form is available.
    pub numeric_mode: bool,
}

impl StructureFunction {
    pub fn eval(&self, t: f64) -> Result<f64> {
        match &self.exact {
            Some(c) => c.eval(t),
            None => Ok(self.numerator.eval(t)? / self.denominator.eval(t)?),
        }
    }
}

fn quotient_limit(num: &RadialFunction, den: &RadialFunction, end: End) -> Result<Limit> {
    let (dord, dcoeff) = den
        .order_at(end)
        .ok_or_else(|| Error::InvalidInput("denominator vanishes identically".into()))?;
    if num.is_empty() {
        return Ok(Limit::Finite(0.0));
    }
    Ok(match num.leading(end, dord) {
        Leading::Beyond => Limit::Finite(0.0),
        Leading::Term { order, coeff } => {
            if order.cmp_approx(dord).is_eq() {
                Limit::Finite(coeff / dcoeff)
            } else if coeff / dcoeff > 0.0 {
                Limit::PosInfinity
            } else {
                Limit::NegInfinity
            }
        }
    })
}

pub fn structure_function(psi: &Weight, phi: &Weight) -> Result<StructureFunction> {
    if psi.domain() != phi.domain() {
        return Err(Error::DomainMismatch("ψ and φ".into()));
    }
    let numerator = phi.profile().try_mul(&psi.profile().derivative())?;
    let denominator = psi.profile().clone();
    let exact = match denominator.single_term() {
        Some(_) => Some(numerator.div(&denominator)?),
        None => None,
    };
    let value_at_zero = quotient_limit(&numerator, &denominator, End::Zero)?;
    let value_at_far = quotient_limit(&numerator, &denominator, End::Far)?;
    Ok(StructureFunction {
        numeric_mode: exact.is_none(),
        exact,
        far_magnitude: value_at_far.to_f64().abs(),
        numerator,
        denominator,
        value_at_zero,
        value_at_far,
    })
}

/// `ψ ∼_φ ψ₁`: both quotients lie in `C_φ^(∞)`. An undecided quotient
/// counts as not equivalent.
pub fn weights_equivalent(psi: &Weight, psi1: &Weight, phi: &Weight) -> Result<bool> {
    let fwd = quotient_membership(psi.profile(), psi1.profile(), phi, Level::Infinite)?;
    if !fwd.is_member {
        return Ok(false);
    }
    let back = quotient_membership(psi1.profile(), psi.profile(), phi, Level::Infinite)?;
    Ok(back.is_member)
}
