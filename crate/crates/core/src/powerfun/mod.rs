//! Finite real-exponent power sums on a compactified interval.
//!
//! A [`RadialFunction`] is an exact finite sum
//! `sum_m c_m t^{p_m} (1 + s t)^{q_m}` where `s = +1` on the half-line
//! `[0, ∞]` and `s = -1` on the unit interval `[0, 1]`. The set is closed
//! under sums, products and `d/dt`, which is all the weighted calculus needs:
//! coefficients of operators, iterated weighted derivatives and membership
//! tests all stay inside the ring and are decided from endpoint expansions.
//!
//! Exponents are exact rationals when they come from rational input and
//! floating otherwise; coefficients are `f64`.

mod exponent;
mod text;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use exponent::{Exponent, EXPONENT_TOL};

use crate::error::{Error, Result};

/// Relative size below which a merged coefficient is treated as cancelled.
pub const CANCEL_TOL: f64 = 1e-12;

const VANISH_TOL: f64 = 1e-10;

/// Relative size below which an endpoint-series coefficient counts as zero.
const SERIES_ZERO_TOL: f64 = 1e-10;

/// Maximal number of binomial terms pulled from a single basis element
/// when expanding at an endpoint.
const SERIES_MAX_TERMS: i64 = 256;

/// Which compactified interval the basis lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `[0, ∞]`, basis `t^p (1+t)^q`.
    HalfLine,
    /// `[0, 1]`, basis `t^p (1-t)^q`.
    UnitInterval,
}

impl Domain {
    /// The `s` in `(1 + s t)`.
    pub fn sign(self) -> f64 {
        match self {
            Domain::HalfLine => 1.0,
            Domain::UnitInterval => -1.0,
        }
    }

    pub fn upper(self) -> f64 {
        match self {
            Domain::HalfLine => f64::INFINITY,
            Domain::UnitInterval => 1.0,
        }
    }

    pub fn is_interior(self, t: f64) -> bool {
        t > 0.0 && t < self.upper() && t.is_finite()
    }
}

/// Endpoint of the domain: `Zero` is `t = 0`, `Far` is `t = ∞` on the
/// half-line and `t = 1` on the unit interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum End {
    Zero,
    Far,
}

/// Exponent key of a basis element.
#[derive(Clone, Copy, Debug)]
pub struct ExponentPair {
    pub p: Exponent,
    pub q: Exponent,
}

impl ExponentPair {
    pub fn new(p: impl Into<Exponent>, q: impl Into<Exponent>) -> Self {
        Self { p: p.into(), q: q.into() }
    }

    fn cmp_key(&self, other: &ExponentPair) -> Ordering {
        self.p.cmp_approx(other.p).then_with(|| self.q.cmp_approx(other.q))
    }
}

impl PartialEq for ExponentPair {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key(other) == Ordering::Equal
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Term {
    pub key: ExponentPair,
    pub coeff: f64,
}

/// Value of an endpoint limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Limit {
    Finite(f64),
    PosInfinity,
    NegInfinity,
}

impl Limit {
    pub fn is_finite(self) -> bool {
        matches!(self, Limit::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Limit::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Limit::Finite(v) => v,
            Limit::PosInfinity => f64::INFINITY,
            Limit::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

/// Leading behaviour `coeff * z^order` of a function at an endpoint, where
/// `z` is the local variable (`t` at 0, `1/t` at ∞, `1-t` at 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Leading {
    Term { order: Exponent, coeff: f64 },
    /// Every expansion coefficient up to the requested order vanished.
    Beyond,
}

/// Exact finite power sum; see the module documentation.
#[derive(Clone, Debug)]
pub struct RadialFunction {
    domain: Domain,
    // sorted by key, no zero coefficients
    terms: Vec<Term>,
}

impl RadialFunction {
    pub fn zero(domain: Domain) -> Self {
        Self { domain, terms: Vec::new() }
    }

    pub fn constant(domain: Domain, c: f64) -> Self {
        Self::monomial(domain, c, 0, 0)
    }

    pub fn monomial(domain: Domain, c: f64, p: impl Into<Exponent>, q: impl Into<Exponent>) -> Self {
        let mut f = Self::zero(domain);
        f.add_term(ExponentPair::new(p, q), c);
        f
    }

    /// `c t^p` on the half-line.
    pub fn power(c: f64, p: impl Into<Exponent>) -> Self {
        Self::monomial(Domain::HalfLine, c, p, 0)
    }

    pub fn from_terms(domain: Domain, terms: impl IntoIterator<Item = (f64, Exponent, Exponent)>) -> Self {
        let mut f = Self::zero(domain);
        for (c, p, q) in terms {
            f.add_term(ExponentPair { p, q }, c);
        }
        f
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Empty term map. Linear dependencies among basis elements are not
    /// detected, so a nonempty map may still vanish identically.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn single_term(&self) -> Option<Term> {
        (self.terms.len() == 1).then(|| self.terms[0])
    }

    pub fn coeff_of(&self, key: ExponentPair) -> f64 {
        self.find(&key).map(|i| self.terms[i].coeff).unwrap_or(0.0)
    }

    fn find(&self, key: &ExponentPair) -> std::result::Result<usize, usize> {
        self.terms.binary_search_by(|t| t.key.cmp_key(key))
    }

    /// Merge `c * basis(key)` into the term map.
    pub fn add_term(&mut self, key: ExponentPair, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.find(&key) {
            Ok(i) => {
                let old = self.terms[i].coeff;
                let sum = old + c;
                if sum.abs() <= CANCEL_TOL * old.abs().max(c.abs()) {
                    self.terms.remove(i);
                } else {
                    self.terms[i].coeff = sum;
                }
            }
            Err(i) => self.terms.insert(i, Term { key, coeff: c }),
        }
    }

    fn check_domain(&self, other: &RadialFunction) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(format!("{:?} vs {:?}", self.domain, other.domain)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &RadialFunction) -> Result<RadialFunction> {
        self.check_domain(other)?;
        let mut out = self.clone();
        for t in &other.terms {
            out.add_term(t.key, t.coeff);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &RadialFunction) -> Result<RadialFunction> {
        self.check_domain(other)?;
        let mut out = RadialFunction::zero(self.domain);
        for a in &self.terms {
            for b in &other.terms {
                out.add_term(ExponentPair { p: a.key.p + b.key.p, q: a.key.q + b.key.q }, a.coeff * b.coeff);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> RadialFunction {
        if c == 0.0 {
            return RadialFunction::zero(self.domain);
        }
        RadialFunction {
            domain: self.domain,
            terms: self.terms.iter().map(|t| Term { key: t.key, coeff: t.coeff * c }).collect(),
        }
    }

    /// Ring operation dispatch.
    pub fn combine(&self, other: &RadialFunction, kind: Combine) -> Result<RadialFunction> {
        match kind {
            Combine::Add => self.try_add(other),
            Combine::Mul => self.try_mul(other),
            Combine::Scale(c) => Ok(self.scale(c)),
        }
    }

    /// Exact `d/dt`:
    /// `d/dt t^p (1+st)^q = p t^{p-1} (1+st)^q + s q t^p (1+st)^{q-1}`.
    pub fn derivative(&self) -> RadialFunction {
        let s = self.domain.sign();
        let mut out = RadialFunction::zero(self.domain);
        for t in &self.terms {
            let ExponentPair { p, q } = t.key;
            if !p.is_zero() {
                out.add_term(ExponentPair { p: p - 1, q }, t.coeff * p.to_f64());
            }
            if !q.is_zero() {
                out.add_term(ExponentPair { p, q: q - 1 }, t.coeff * s * q.to_f64());
            }
        }
        out
    }

    pub fn powi(&self, n: u32) -> RadialFunction {
        let mut out = RadialFunction::constant(self.domain, 1.0);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Multiplicative inverse; only single-term functions are units.
    pub fn inverse(&self) -> Result<RadialFunction> {
        self.powf_single(Exponent::int(-1))
    }

    /// `(c t^p (1+st)^q)^e` for a single term with `c > 0` (or integer `e`).
    pub fn powf_single(&self, e: Exponent) -> Result<RadialFunction> {
        let t = self
            .single_term()
            .ok_or_else(|| Error::NotInvertible(format!("{} terms", self.terms.len())))?;
        let coeff = match e.as_integer() {
            Some(n) if n.abs() < i32::MAX as i64 => t.coeff.powi(n as i32),
            _ if t.coeff > 0.0 => t.coeff.powf(e.to_f64()),
            _ => return Err(Error::NotInvertible("non-integer power of a negative coefficient".into())),
        };
        Ok(RadialFunction::monomial(self.domain, coeff, t.key.p * e, t.key.q * e))
    }

    /// Exact quotient by a single-term function.
    pub fn div(&self, divisor: &RadialFunction) -> Result<RadialFunction> {
        self.try_mul(&divisor.inverse()?)
    }

    /// Substitution `t -> 1/t` on the half-line:
    /// `t^{-p} (1 + 1/t)^q = t^{-p-q} (1+t)^q`.
    pub fn invert_variable(&self) -> Result<RadialFunction> {
        if self.domain != Domain::HalfLine {
            return Err(Error::DomainMismatch("t -> 1/t needs the half-line".into()));
        }
        let mut out = RadialFunction::zero(Domain::HalfLine);
        for t in &self.terms {
            out.add_term(ExponentPair { p: -(t.key.p + t.key.q), q: t.key.q }, t.coeff);
        }
        Ok(out)
    }

    /// Floating evaluation at an interior point.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !self.domain.is_interior(t) {
            return Err(Error::NotInterior(t));
        }
        Ok(self.eval_unchecked(t))
    }

    /// Evaluation without the interior check; used on grids already known
    /// to be interior.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        let s = self.domain.sign();
        let base = 1.0 + s * t;
        self.terms
            .iter()
            .map(|term| term.coeff * pow(t, term.key.p) * pow(base, term.key.q))
            .sum()
    }

    /// Order of each basis element at `end` and the binomial coefficient
    /// generator of its local expansion.
    fn local_base(&self, term: &Term, end: End) -> (Exponent, Exponent, f64) {
        // returns (base order, binomial exponent, sign per power)
        let ExponentPair { p, q } = term.key;
        match (self.domain, end) {
            (_, End::Zero) => (p, q, self.domain.sign()),
            (Domain::HalfLine, End::Far) => (-(p + q), q, 1.0),
            (Domain::UnitInterval, End::Far) => (q, p, -1.0),
        }
    }

    /// Local expansion at `end` in the local variable `z`, truncated to
    /// orders `<= up_to`; returns `(order, coeff, total |contribution|)`.
    fn series(&self, end: End, up_to: Exponent) -> Vec<(Exponent, f64, f64)> {
        let mut out: Vec<(Exponent, f64, f64)> = Vec::new();
        for term in &self.terms {
            let (base, bexp, sign) = self.local_base(term, end);
            let bexp_f = bexp.to_f64();
            let mut binom = 1.0;
            let mut sign_k = 1.0;
            for k in 0..SERIES_MAX_TERMS {
                let order = base + k;
                if order.cmp_approx(up_to) == Ordering::Greater {
                    break;
                }
                if binom == 0.0 {
                    break;
                }
                let c = term.coeff * binom * sign_k;
                match out.binary_search_by(|e| e.0.cmp_approx(order)) {
                    Ok(i) => {
                        out[i].1 += c;
                        out[i].2 += c.abs();
                    }
                    Err(i) => out.insert(i, (order, c, c.abs())),
                }
                binom *= (bexp_f - k as f64) / (k as f64 + 1.0);
                sign_k *= sign;
            }
        }
        out
    }

    /// Leading term of the local expansion at `end`, looking no further
    /// than order `up_to`.
    pub fn leading(&self, end: End, up_to: Exponent) -> Leading {
        for (order, coeff, mag) in self.series(end, up_to) {
            if coeff.abs() > SERIES_ZERO_TOL * mag {
                return Leading::Term { order, coeff };
            }
        }
        Leading::Beyond
    }

    /// Leading order at `end` (searching 64 orders past the smallest raw
    /// order); `None` for a function that vanishes to that depth.
    pub fn order_at(&self, end: End) -> Option<(Exponent, f64)> {
        let lowest = self.terms.iter().map(|t| self.local_base(t, end).0).reduce(Exponent::min)?;
        match self.leading(end, lowest + 64) {
            Leading::Term { order, coeff } => Some((order, coeff)),
            Leading::Beyond => None,
        }
    }

    /// Smallest raw `p` over the terms (the endpoint exponent at 0 before
    /// any cancellation).
    pub fn min_p(&self) -> Option<Exponent> {
        self.terms.iter().map(|t| t.key.p).reduce(Exponent::min)
    }

    /// Largest raw `p + q` over the terms (growth exponent at ∞ before any
    /// cancellation).
    pub fn max_total(&self) -> Option<Exponent> {
        self.terms.iter().map(|t| t.key.p + t.key.q).reduce(Exponent::max)
    }

    pub fn endpoint_limit(&self, end: End) -> Limit {
        match self.leading(end, Exponent::ZERO) {
            Leading::Beyond => Limit::Finite(0.0),
            Leading::Term { order, coeff } => match order.signum() {
                1 => Limit::Finite(0.0),
                0 => Limit::Finite(coeff),
                _ if coeff > 0.0 => Limit::PosInfinity,
                _ => Limit::NegInfinity,
            },
        }
    }

    /// Continuity on the closed interval: both endpoint limits finite.
    pub fn is_continuous(&self) -> bool {
        self.endpoint_limit(End::Zero).is_finite() && self.endpoint_limit(End::Far).is_finite()
    }

    /// Term-map equality with relative coefficient tolerance.
    pub fn approx_eq(&self, other: &RadialFunction, rel: f64) -> bool {
        self.domain == other.domain
            && self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|(a, b)| {
                a.key == b.key && (a.coeff - b.coeff).abs() <= rel * a.coeff.abs().max(b.coeff.abs())
            })
    }

    /// Vanishing as a function. The term map is not a basis (for instance
    /// `(1+t) - t - 1` has three terms), so a nonempty map is tested on a
    /// log grid against the size of its individual terms.
    pub fn vanishes(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        crate::weights::sample_points(self.domain, 64).all(|t| {
            let mut sum = 0.0;
            let mut size = 0.0;
            for term in &self.terms {
                let v = term.coeff * pow(t, term.key.p) * pow(1.0 + self.domain.sign() * t, term.key.q);
                sum += v;
                size += v.abs();
            }
            sum.abs() <= VANISH_TOL * size
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max)
    }
}

fn pow(base: f64, e: Exponent) -> f64 {
    match e.as_integer() {
        Some(0) => 1.0,
        Some(n) if n.abs() <= 64 => base.powi(n as i32),
        _ => base.powf(e.to_f64()),
    }
}

/// Ring operation selector for [`RadialFunction::combine`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Combine {
    Add,
    Mul,
    Scale(f64),
}

impl PartialEq for RadialFunction {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, CANCEL_TOL)
    }
}

// Operator impls panic on domain mismatch; use the `try_` methods where the
// domains are not known to agree.
impl<'a> Add<&'a RadialFunction> for &'a RadialFunction {
    type Output = RadialFunction;
    fn add(self, rhs: &RadialFunction) -> RadialFunction {
        self.try_add(rhs).expect("domain mismatch")
    }
}

impl<'a> Sub<&'a RadialFunction> for &'a RadialFunction {
    type Output = RadialFunction;
    fn sub(self, rhs: &RadialFunction) -> RadialFunction {
        self.try_add(&rhs.scale(-1.0)).expect("domain mismatch")
    }
}

impl<'a> Mul<&'a RadialFunction> for &'a RadialFunction {
    type Output = RadialFunction;
    fn mul(self, rhs: &RadialFunction) -> RadialFunction {
        self.try_mul(rhs).expect("domain mismatch")
    }
}

impl Neg for &RadialFunction {
    type Output = RadialFunction;
    fn neg(self) -> RadialFunction {
        self.scale(-1.0)
    }
}

impl fmt::Display for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::write(self, f)
    }
}

impl std::str::FromStr for RadialFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        text::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(c: f64, p: Exponent, q: Exponent) -> RadialFunction {
        RadialFunction::monomial(Domain::HalfLine, c, p, q)
    }

    fn r(n: i64, d: i64) -> Exponent {
        Exponent::ratio(n, d)
    }

    #[test]
    fn cancellation_empties_term_map() {
        let f = h(1.0, r(1, 2), r(0, 1));
        assert!((&f - &f).is_zero());
    }

    #[test]
    fn product_adds_exponents() {
        let f = h(1.0, r(1, 2), r(-1, 1));
        assert_eq!(&f * &f, h(1.0, r(1, 1), r(-2, 1)));
        let a = Exponent::real(0.3719);
        let g = &h(1.0, a, Exponent::ZERO) * &h(1.0, Exponent::ONE - a, Exponent::ZERO);
        assert_eq!(g, RadialFunction::power(1.0, 1));
    }

    #[test]
    fn derivative_examples() {
        let f = h(1.0, r(1, 2), r(-1, 1));
        let expected = &h(0.5, r(-1, 2), r(-1, 1)) + &h(-1.0, r(1, 2), r(-2, 1));
        assert_eq!(f.derivative(), expected);
        assert!(RadialFunction::constant(Domain::HalfLine, 1.0).derivative().is_zero());
        let g = h(1.0, r(2, 1), r(-3, 1));
        let expected = &h(2.0, r(1, 1), r(-3, 1)) + &h(-3.0, r(2, 1), r(-4, 1));
        assert_eq!(g.derivative(), expected);
    }

    #[test]
    fn unit_interval_derivative_uses_minus_sign() {
        let f = RadialFunction::monomial(Domain::UnitInterval, 1.0, 1, 2);
        // d/dt t(1-t)^2 = (1-t)^2 - 2t(1-t)
        let d = f.derivative();
        assert_eq!(d.coeff_of(ExponentPair::new(0, 2)), 1.0);
        assert_eq!(d.coeff_of(ExponentPair::new(1, 1)), -2.0);
    }

    #[test]
    fn endpoint_limits() {
        assert_eq!(h(1.0, r(1, 2), r(-1, 1)).endpoint_limit(End::Far), Limit::Finite(0.0));
        let f = &RadialFunction::constant(Domain::HalfLine, 3.0) + &RadialFunction::power(1.0, r(1, 3));
        assert_eq!(f.endpoint_limit(End::Zero), Limit::Finite(3.0));
        assert_eq!(RadialFunction::power(1.0, r(-1, 4)).endpoint_limit(End::Zero), Limit::PosInfinity);
        assert_eq!(RadialFunction::power(-2.0, r(-1, 4)).endpoint_limit(End::Zero), Limit::NegInfinity);
    }

    #[test]
    fn cancelling_singular_terms_are_finite() {
        // t^{-1} - t^{-1}(1+t)^{-1} = (1+t)^{-1}
        let f = &h(1.0, r(-1, 1), Exponent::ZERO) - &h(1.0, r(-1, 1), r(-1, 1));
        assert_eq!(f.endpoint_limit(End::Zero), Limit::Finite(1.0));
        assert!(f.is_continuous());
    }

    #[test]
    fn continuity_and_eval() {
        assert!(h(1.0, r(1, 3), r(-1, 3)).is_continuous());
        assert_eq!(h(1.0, r(1, 3), r(-1, 3)).endpoint_limit(End::Far), Limit::Finite(1.0));
        assert!(!RadialFunction::power(1.0, r(-1, 6)).is_continuous());
        assert_eq!(h(1.0, r(2, 1), r(-3, 1)).eval(1.0).unwrap(), 0.125);
        assert!(h(1.0, r(2, 1), r(-3, 1)).eval(0.0).is_err());
        assert!(RadialFunction::monomial(Domain::UnitInterval, 1.0, 1, 0).eval(1.0).is_err());
    }

    #[test]
    fn unit_interval_far_end() {
        // t^2 (1-t)^{1/2} at t = 1: order 1/2, limit 0; t^{-1}(1-t)^{-1}: blows up
        let f = RadialFunction::monomial(Domain::UnitInterval, 1.0, 2, r(1, 2));
        assert_eq!(f.order_at(End::Far).unwrap().0, r(1, 2));
        assert_eq!(f.endpoint_limit(End::Far), Limit::Finite(0.0));
        let g = RadialFunction::monomial(Domain::UnitInterval, 2.0, 0, -1);
        assert_eq!(g.endpoint_limit(End::Far), Limit::PosInfinity);
    }

    #[test]
    fn domain_mismatch_rejected() {
        let a = RadialFunction::constant(Domain::HalfLine, 1.0);
        let b = RadialFunction::constant(Domain::UnitInterval, 1.0);
        assert!(matches!(a.combine(&b, Combine::Add), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn distinct_key_sets_never_equal() {
        // t and (1+t) - 1 are the same function but different term maps
        let a = RadialFunction::power(1.0, 1);
        let b = &h(1.0, Exponent::ZERO, Exponent::ONE) - &RadialFunction::constant(Domain::HalfLine, 1.0);
        assert_ne!(a, b);
        assert!((a.eval(2.5).unwrap() - b.eval(2.5).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn invert_variable_maps_basis() {
        // t(1+t)^{-2} -> (1/t)(1+1/t)^{-2} = t (1+t)^{-2}
        let f = h(1.0, Exponent::ONE, Exponent::int(-2));
        assert_eq!(f.invert_variable().unwrap(), f);
        let g = h(2.0, r(1, 2), Exponent::ZERO).invert_variable().unwrap();
        assert!((g.eval(4.0).unwrap() - 1.0).abs() < 1e-15);
    }
}
