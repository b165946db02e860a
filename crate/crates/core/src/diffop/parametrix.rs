//! Symbolic parametrix of a radial operator in the flow coordinate `s`,
//! where `X = ∂_s`.
//!
//! With `P(s, ξ) = Σ l_i (iξ)^i` the full symbol of `Σ l_i X^i` and
//! `D_s = -i X`, the terms are `q_0 = 1/P` and
//! `q_k = -q_0 Σ_{α ≥ 1, j + α = k} (1/α!) ∂_ξ^α P · D_s^α q_j`.
//! Every `q_k` is `N_k / P^{e_k}` with `N_k` polynomial in `ξ`, so the
//! recursion stays in the coefficient ring.

use num_complex::Complex64;

use super::{normal_form, ComplexRadial, DiffOp, Form};
use crate::error::{Error, Result};
use crate::powerfun::{Domain, End, RadialFunction};
use crate::weights::{sample_points, Weight};

/// Polynomial in `ξ`; `coeffs[k]` multiplies `ξ^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    domain: Domain,
    coeffs: Vec<ComplexRadial>,
}

impl Poly {
    pub fn zero(domain: Domain) -> Self {
        Self { domain, coeffs: Vec::new() }
    }

    pub fn constant(domain: Domain, c: Complex64) -> Self {
        Self::from_coeffs(domain, vec![ComplexRadial::constant(domain, c)])
    }

    pub fn from_coeffs(domain: Domain, coeffs: Vec<ComplexRadial>) -> Self {
        let mut p = Self { domain, coeffs };
        p.trim();
        p
    }

    pub fn coeffs(&self) -> &[ComplexRadial] {
        &self.coeffs
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(ComplexRadial::vanishes) {
            self.coeffs.pop();
        }
    }

    /// Degree after discarding vanishing top coefficients; `None` for 0.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = ComplexRadial::zero(self.domain);
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&zero).add(o.coeffs.get(k).unwrap_or(&zero)))
            .collect();
        Self::from_coeffs(self.domain, coeffs)
    }

    pub fn scale(&self, z: Complex64) -> Poly {
        Self::from_coeffs(self.domain, self.coeffs.iter().map(|c| c.scale(z)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.domain);
        }
        let mut coeffs = vec![ComplexRadial::zero(self.domain); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(self.domain, coeffs)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Self::constant(self.domain, Complex64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    /// `∂_ξ`.
    pub fn d_xi(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(Complex64::new(k as f64, 0.0)))
            .collect();
        Self::from_coeffs(self.domain, coeffs)
    }

    /// `D_s = -i φ ∂_t` applied to the coefficients.
    pub fn d_s(&self, phi: &RadialFunction) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.derivative().mul_real(phi).scale(Complex64::new(0.0, -1.0)))
            .collect();
        Self::from_coeffs(self.domain, coeffs)
    }

    pub fn eval(&self, t: f64, xi: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * xi + c.eval(t))
    }
}

/// `N(ξ) / P(ξ)^power`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSymbol {
    pub numerator: Poly,
    pub base: Poly,
    pub power: u32,
}

impl RationalSymbol {
    fn lift(&self, power: u32) -> Poly {
        self.numerator.mul(&self.base.pow(power - self.power))
    }

    fn add(&self, o: &RationalSymbol) -> RationalSymbol {
        let power = self.power.max(o.power);
        RationalSymbol { numerator: self.lift(power).add(&o.lift(power)), base: self.base.clone(), power }
    }

    /// `D_s (N / P^e) = (D_s N · P - e N D_s P) / P^{e+1}`.
    fn d_s(&self, phi: &RadialFunction) -> RationalSymbol {
        let dn = self.numerator.d_s(phi).mul(&self.base);
        let dp = self.numerator.mul(&self.base.d_s(phi)).scale(Complex64::new(-(self.power as f64), 0.0));
        RationalSymbol { numerator: dn.add(&dp), base: self.base.clone(), power: self.power + 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// `deg N - power · deg P`; `None` for the zero symbol.
    pub fn order(&self) -> Option<i64> {
        let n = self.numerator.degree()? as i64;
        Some(n - self.power as i64 * self.base.degree().unwrap_or(0) as i64)
    }

    pub fn eval(&self, t: f64, xi: f64) -> Complex64 {
        self.numerator.eval(t, xi) / self.base.eval(t, xi).powu(self.power)
    }
}

/// The terms `q_0, …, q_{N-1}` together with the full symbol they invert.
#[derive(Clone, Debug)]
pub struct Parametrix {
    pub phi: Weight,
    pub symbol: Poly,
    pub order: u32,
    /// `P` has no zeros for `|ξ| >= radius` (Cauchy bound from the sampled
    /// coefficient sizes).
    pub radius: f64,
    pub terms: Vec<RationalSymbol>,
}

fn sup_over_domain(c: &ComplexRadial, domain: Domain) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for end in [End::Zero, End::Far] {
        let v = c
            .endpoint_limit(end)
            .ok_or_else(|| Error::SingularSymbol(format!("coefficient unbounded at {end:?}")))?
            .norm();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for t in sample_points(domain, 256) {
        let v = c.eval(t).norm();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// First `n` terms of the parametrix of a radial elliptic operator.
pub fn parametrix_1d(op: &DiffOp, n: usize) -> Result<Parametrix> {
    if !op.is_radial() {
        return Err(Error::InvalidInput("parametrix_1d needs a radial operator".into()));
    }
    let domain = op.domain();
    let lie = normal_form(op, Form::Lie)?;
    let order = lie.order();
    let mut coeffs = vec![ComplexRadial::zero(domain); order as usize + 1];
    for (&(i, _), c) in &lie.coeffs {
        let l = c.mode(0).cloned().unwrap_or_else(|| ComplexRadial::zero(domain));
        coeffs[i as usize] = l.scale(Complex64::i().powu(i));
    }
    let symbol = Poly::from_coeffs(domain, coeffs);
    if symbol.degree() != Some(order as usize) {
        return Err(Error::NotElliptic("vanishing principal coefficient".into()));
    }
    let (top_inf, _) = sup_over_domain(&symbol.coeffs[order as usize], domain)?;
    if !(top_inf > 1e-12) {
        return Err(Error::NotElliptic(format!("principal coefficient reaches {top_inf:e}")));
    }
    let mut bound: f64 = 0.0;
    for c in &symbol.coeffs[..order as usize] {
        bound = bound.max(sup_over_domain(c, domain)?.1 / top_inf);
    }
    let radius = 1.0 + bound;
    for t in sample_points(domain, 64) {
        for xi in [radius, -radius, 2.0 * radius, -2.0 * radius] {
            if symbol.eval(t, xi).norm() == 0.0 {
                return Err(Error::SingularSymbol(format!("P({t}, {xi}) = 0")));
            }
        }
    }

    let phi = op.phi().clone();
    let one = Poly::constant(domain, Complex64::new(1.0, 0.0));
    let mut terms: Vec<RationalSymbol> = Vec::with_capacity(n);
    // derivs[j][α] = D_s^α q_j
    let mut derivs: Vec<Vec<RationalSymbol>> = Vec::with_capacity(n);
    // ∂_ξ^α P / α!
    let mut xi_derivs = vec![symbol.clone()];
    for a in 1..=order {
        let next = xi_derivs[a as usize - 1].d_xi().scale(Complex64::new(1.0 / a as f64, 0.0));
        xi_derivs.push(next);
    }
    for k in 0..n {
        let q = if k == 0 {
            RationalSymbol { numerator: one.clone(), base: symbol.clone(), power: 1 }
        } else {
            let mut acc = RationalSymbol { numerator: Poly::zero(domain), base: symbol.clone(), power: 0 };
            for j in 0..k {
                let alpha = k - j;
                if alpha > order as usize {
                    continue;
                }
                let d = &derivs[j][alpha];
                let term = RationalSymbol {
                    numerator: xi_derivs[alpha].mul(&d.numerator),
                    base: symbol.clone(),
                    power: d.power,
                };
                acc = acc.add(&term);
            }
            RationalSymbol { numerator: acc.numerator.scale(Complex64::new(-1.0, 0.0)), base: symbol.clone(), power: acc.power + 1 }
        };
        let mut ds = vec![q.clone()];
        for _ in 0..order {
            let next = ds.last().expect("nonempty").d_s(phi.profile());
            ds.push(next);
        }
        derivs.push(ds);
        terms.push(q);
    }
    Ok(Parametrix { phi, symbol, order, radius, terms })
}

/// `Σ_α Σ_k (1/α!) ∂_ξ^α P · D_s^α q_k - 1`, the symbol of `A Q - I`.
pub fn remainder_symbol(par: &Parametrix) -> RationalSymbol {
    let domain = par.symbol.domain;
    let mut acc = RationalSymbol {
        numerator: Poly::constant(domain, Complex64::new(-1.0, 0.0)),
        base: par.symbol.clone(),
        power: 0,
    };
    let mut dp = par.symbol.clone();
    let mut fact = 1.0;
    for alpha in 0..=par.order {
        if alpha > 0 {
            dp = dp.d_xi();
            fact *= alpha as f64;
        }
        let scaled = dp.scale(Complex64::new(1.0 / fact, 0.0));
        for q in &par.terms {
            let mut d = q.clone();
            for _ in 0..alpha {
                d = d.d_s(par.phi.profile());
            }
            acc = acc.add(&RationalSymbol { numerator: scaled.mul(&d.numerator), base: par.symbol.clone(), power: d.power });
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::CylinderFunction;
    use crate::powerfun::Exponent;

    fn exp_flow_op(c0: f64) -> DiffOp {
        let phi = Weight::power(1).unwrap();
        let psi = Weight::power(0).unwrap();
        let mut coeffs = vec![((2, 0), CylinderFunction::constant(Domain::HalfLine, 1.0))];
        if c0 != 0.0 {
            coeffs.push(((0, 0), CylinderFunction::constant(Domain::HalfLine, c0)));
        }
        DiffOp::from_lie(&phi, &psi, coeffs).unwrap()
    }

    #[test]
    fn second_derivative_plus_one() {
        let par = parametrix_1d(&exp_flow_op(1.0), 3).unwrap();
        let q0 = &par.terms[0];
        assert_eq!(q0.order(), Some(-2));
        for xi in [2.5, -3.0, 10.0] {
            let want = 1.0 / (1.0 - xi * xi);
            assert!((q0.eval(0.7, xi) - Complex64::new(want, 0.0)).norm() < 1e-15);
        }
        assert!(par.terms[1].is_zero() && par.terms[2].is_zero());
        assert!(par.radius >= 2.0);
    }

    #[test]
    fn pure_second_derivative() {
        let phi = Weight::power(1).unwrap();
        let psi = Weight::power(0).unwrap();
        let op = DiffOp::from_lie(&phi, &psi, [((2, 0), CylinderFunction::constant(Domain::HalfLine, 1.0))]).unwrap();
        let par = parametrix_1d(&op, 2).unwrap();
        assert!((par.terms[0].eval(0.3, 2.0) - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
        assert!(par.terms[1].is_zero());
    }

    #[test]
    fn empty_expansion() {
        let par = parametrix_1d(&exp_flow_op(1.0), 0).unwrap();
        assert!(par.terms.is_empty());
        assert_eq!(remainder_symbol(&par).order(), Some(0));
    }

    #[test]
    fn variable_coefficient_remainder_order() {
        // X^2 + (1+t)^{-1} X + 2 with X = t ∂_t
        let phi = Weight::power(1).unwrap();
        let psi = Weight::power(0).unwrap();
        let d = Domain::HalfLine;
        let op = DiffOp::from_lie(
            &phi,
            &psi,
            [
                ((2, 0), CylinderFunction::constant(d, 1.0)),
                ((1, 0), CylinderFunction::radial(RadialFunction::monomial(d, 1.0, 0, -1))),
                ((0, 0), CylinderFunction::radial(RadialFunction::monomial(d, 2.0, Exponent::ONE, -1))),
            ],
        )
        .unwrap();
        for n in 1..=3 {
            let par = parametrix_1d(&op, n).unwrap();
            for (k, q) in par.terms.iter().enumerate() {
                assert!(q.order().map_or(true, |o| o <= -2 - k as i64), "q_{k}: {:?}", q.order());
            }
            let r = remainder_symbol(&par);
            assert!(r.order().map_or(true, |o| o <= -(n as i64)), "N = {n}: {:?}", r.order());
        }
    }
}
