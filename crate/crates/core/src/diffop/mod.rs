//! Differential operators on the cylinder `[0, ∞] × S¹` generated by
//! `X = φ ∂_t` and `Y = ψ ∂_θ` over ring-valued coefficients.
//!
//! Operators are stored in the plain form `Σ b_ij ∂_t^i ∂_θ^j` with
//! coefficients on the left, where composition and action are exact
//! Leibniz expansions. The two normal forms of the calculus are derived:
//! the monomial form `Σ c_ij φ^i ψ^j ∂_t^i ∂_θ^j` and the Lie form
//! `Σ l_ij X^i Y^j`. Both divide by powers of the weights, so they need
//! single-term (unit) weights.

mod cylinder;
mod lie_rinehart;
mod parametrix;
mod symbol;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

pub use cylinder::{ComplexRadial, CylinderFunction};
pub use lie_rinehart::{lie_rinehart_check, AxiomResult, LieRinehartReport};
pub use parametrix::{parametrix_1d, remainder_symbol, Parametrix, Poly, RationalSymbol};
pub use symbol::{is_elliptic, principal_symbol, PrincipalSymbol};

use crate::error::{Error, Result};
use crate::powerfun::{Domain, RadialFunction};
use crate::weights::{membership_order, Level, Weight};

pub type Key = (u32, u32);

/// Which normal form a coefficient map refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    /// Coefficients of `X^i Y^j`.
    Lie,
    /// Coefficients of `φ^i ψ^j ∂_t^i ∂_θ^j`.
    Monomial,
}

/// Coefficient map in one of the normal forms.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub form: Form,
    pub coeffs: BTreeMap<Key, CylinderFunction>,
}

impl NormalForm {
    pub fn order(&self) -> u32 {
        self.coeffs.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// Same keys up to vanishing coefficients, equal coefficients as
    /// functions.
    pub fn same_as(&self, other: &NormalForm) -> bool {
        self.form == other.form && coeff_maps_agree(&self.coeffs, &other.coeffs)
    }
}

fn coeff_maps_agree(a: &BTreeMap<Key, CylinderFunction>, b: &BTreeMap<Key, CylinderFunction>) -> bool {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter().all(|k| match (a.get(k), b.get(k)) {
        (Some(x), Some(y)) => x.sub(y).vanishes(),
        (Some(x), None) | (None, Some(x)) => x.vanishes(),
        (None, None) => true,
    })
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (form, a, b) = match self.form {
            Form::Lie => ("lie", "X", "Y"),
            Form::Monomial => ("monomial", "φ^i ψ^j ∂_t", "∂_θ"),
        };
        writeln!(f, "# form={form} order={}", self.order())?;
        for (&(i, j), c) in &self.coeffs {
            writeln!(f, "{a}^{i} {b}^{j}: {c}")?;
        }
        Ok(())
    }
}

/// A differential operator with its weights.
#[derive(Clone, Debug)]
pub struct DiffOp {
    phi: Weight,
    psi: Weight,
    plain: BTreeMap<Key, CylinderFunction>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl DiffOp {
    pub fn zero(phi: &Weight, psi: &Weight) -> Result<Self> {
        if phi.domain() != psi.domain() {
            return Err(Error::DomainMismatch("φ and ψ".into()));
        }
        Ok(Self { phi: phi.clone(), psi: psi.clone(), plain: BTreeMap::new() })
    }

    /// Multiplication by `a`.
    pub fn multiplication(phi: &Weight, psi: &Weight, a: CylinderFunction) -> Result<Self> {
        Self::from_plain(phi, psi, [((0, 0), a)])
    }

    pub fn identity(phi: &Weight, psi: &Weight) -> Result<Self> {
        Self::multiplication(phi, psi, CylinderFunction::constant(phi.domain(), 1.0))
    }

    /// `X = φ ∂_t`.
    pub fn x_field(phi: &Weight, psi: &Weight) -> Result<Self> {
        Self::from_plain(phi, psi, [((1, 0), CylinderFunction::radial(phi.profile().clone()))])
    }

    /// `Y = ψ ∂_θ`.
    pub fn y_field(phi: &Weight, psi: &Weight) -> Result<Self> {
        Self::from_plain(phi, psi, [((0, 1), CylinderFunction::radial(psi.profile().clone()))])
    }

    /// `Σ b_ij ∂_t^i ∂_θ^j`.
    pub fn from_plain(
        phi: &Weight,
        psi: &Weight,
        coeffs: impl IntoIterator<Item = (Key, CylinderFunction)>,
    ) -> Result<Self> {
        let mut op = Self::zero(phi, psi)?;
        for (k, c) in coeffs {
            if c.domain() != phi.domain() {
                return Err(Error::DomainMismatch(format!("coefficient {k:?}")));
            }
            op.add_coeff(k, c);
        }
        Ok(op)
    }

    /// `Σ c_ij φ^i ψ^j ∂_t^i ∂_θ^j`.
    pub fn from_monomial(
        phi: &Weight,
        psi: &Weight,
        coeffs: impl IntoIterator<Item = (Key, CylinderFunction)>,
    ) -> Result<Self> {
        let mut op = Self::zero(phi, psi)?;
        for ((i, j), c) in coeffs {
            if c.domain() != phi.domain() {
                return Err(Error::DomainMismatch(format!("coefficient {:?}", (i, j))));
            }
            op.add_coeff((i, j), c.mul_radial(&op.weight_power(i, j)));
        }
        Ok(op)
    }

    /// `Σ l_ij X^i Y^j`, expanded by repeated composition.
    pub fn from_lie(
        phi: &Weight,
        psi: &Weight,
        coeffs: impl IntoIterator<Item = (Key, CylinderFunction)>,
    ) -> Result<Self> {
        let mut op = Self::zero(phi, psi)?;
        for ((i, j), l) in coeffs {
            let word = op.lie_word(i, j)?;
            op = op.add(&word.left_mul(&l))?;
        }
        Ok(op)
    }

    /// `X^i Y^j` in plain form.
    fn lie_word(&self, i: u32, j: u32) -> Result<Self> {
        let x = Self::x_field(&self.phi, &self.psi)?;
        let y = Self::y_field(&self.phi, &self.psi)?;
        let mut word = Self::identity(&self.phi, &self.psi)?;
        for _ in 0..j {
            word = y.compose(&word)?;
        }
        for _ in 0..i {
            word = x.compose(&word)?;
        }
        Ok(word)
    }

    fn weight_power(&self, i: u32, j: u32) -> RadialFunction {
        &self.phi.profile().powi(i) * &self.psi.profile().powi(j)
    }

    fn add_coeff(&mut self, k: Key, c: CylinderFunction) {
        let sum = match self.plain.remove(&k) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.plain.insert(k, sum);
        }
    }

    pub fn phi(&self) -> &Weight {
        &self.phi
    }

    pub fn psi(&self) -> &Weight {
        &self.psi
    }

    pub fn domain(&self) -> Domain {
        self.phi.domain()
    }

    /// Plain coefficients `b_ij` of `∂_t^i ∂_θ^j`.
    pub fn plain(&self) -> &BTreeMap<Key, CylinderFunction> {
        &self.plain
    }

    pub fn order(&self) -> u32 {
        self.plain.iter().filter(|(_, c)| !c.vanishes()).map(|((i, j), _)| i + j).max().unwrap_or(0)
    }

    /// Only `∂_t` derivatives and mode-0 coefficients.
    pub fn is_radial(&self) -> bool {
        self.plain.iter().all(|(&(_, j), c)| j == 0 && c.is_radial())
    }

    fn check_weights(&self, other: &DiffOp) -> Result<()> {
        if self.phi.profile() != other.phi.profile() || self.psi.profile() != other.psi.profile() {
            return Err(Error::DomainMismatch("operators carry different weights".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_weights(other)?;
        let mut out = self.clone();
        for (&k, c) in &other.plain {
            out.add_coeff(k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffOp) -> Result<DiffOp> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, z: Complex64) -> DiffOp {
        let mut out = Self { phi: self.phi.clone(), psi: self.psi.clone(), plain: BTreeMap::new() };
        for (&k, c) in &self.plain {
            out.add_coeff(k, c.scale(z));
        }
        out
    }

    /// `a ∘ self`.
    pub fn left_mul(&self, a: &CylinderFunction) -> DiffOp {
        let mut out = Self { phi: self.phi.clone(), psi: self.psi.clone(), plain: BTreeMap::new() };
        for (&k, c) in &self.plain {
            out.add_coeff(k, a.mul(c));
        }
        out
    }

    /// `self ∘ other`, expanded with the Leibniz rule.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_weights(other)?;
        let mut out = Self { phi: self.phi.clone(), psi: self.psi.clone(), plain: BTreeMap::new() };
        for (&(i, j), a) in &self.plain {
            for (&(k, l), b) in &other.plain {
                let mut dt = b.clone();
                for alpha in 0..=i {
                    let mut d = dt.clone();
                    for beta in 0..=j {
                        let c = binomial(i, alpha) * binomial(j, beta);
                        if !d.is_zero() {
                            out.add_coeff((i - alpha + k, j - beta + l), a.mul(&d).scale(Complex64::new(c, 0.0)));
                        }
                        d = d.d_theta();
                    }
                    dt = dt.d_t();
                }
            }
        }
        Ok(out)
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    pub fn apply(&self, f: &CylinderFunction) -> Result<CylinderFunction> {
        if f.domain() != self.domain() {
            return Err(Error::DomainMismatch("operand".into()));
        }
        let mut out = CylinderFunction::zero(self.domain());
        for (&(i, j), b) in &self.plain {
            let mut g = f.clone();
            for _ in 0..i {
                g = g.d_t();
            }
            for _ in 0..j {
                g = g.d_theta();
            }
            out = out.add(&b.mul(&g));
        }
        Ok(out)
    }

    /// Equal as operators: every plain coefficient of the difference
    /// vanishes.
    pub fn same_as(&self, other: &DiffOp) -> bool {
        self.check_weights(other).is_ok() && coeff_maps_agree(&self.plain, &other.plain)
    }

    pub fn vanishes(&self) -> bool {
        self.plain.values().all(CylinderFunction::vanishes)
    }

    fn monomial_form(&self) -> Result<NormalForm> {
        let mut coeffs = BTreeMap::new();
        for (&(i, j), b) in &self.plain {
            coeffs.insert((i, j), b.div_radial(&self.weight_power(i, j))?);
        }
        Ok(NormalForm { form: Form::Monomial, coeffs })
    }

    /// Triangular elimination of the top `∂_t` order in each `∂_θ` degree.
    fn lie_form(&self) -> Result<NormalForm> {
        let mut rest = self.clone();
        let mut coeffs: BTreeMap<Key, CylinderFunction> = BTreeMap::new();
        while let Some((&(i, j), b)) = rest.plain.iter().max_by_key(|(&(i, j), _)| (i, j)) {
            let l = b.div_radial(&self.weight_power(i, j))?;
            let word = rest.lie_word(i, j)?;
            rest = rest.sub(&word.left_mul(&l))?;
            rest.plain.remove(&(i, j));
            let entry = coeffs.entry((i, j)).or_insert_with(|| CylinderFunction::zero(self.domain()));
            *entry = entry.add(&l);
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(NormalForm { form: Form::Lie, coeffs })
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# form=plain order={}", self.order())?;
        for (&(i, j), c) in &self.plain {
            writeln!(f, "∂_t^{i} ∂_θ^{j}: {c}")?;
        }
        Ok(())
    }
}

/// `φ' ∈ C_φ^(∞)`, the standing hypothesis of the normal forms.
fn check_weight_derivative(phi: &Weight) -> Result<()> {
    let m = membership_order(&phi.profile().derivative(), phi, Level::Infinite)?;
    if m.is_member {
        Ok(())
    } else {
        Err(Error::InvalidWeight(format!("φ' ∉ C_φ^(∞) (member up to {:?})", m.member_up_to)))
    }
}

/// Rewrite in the requested normal form.
pub fn normal_form(op: &DiffOp, target: Form) -> Result<NormalForm> {
    check_weight_derivative(&op.phi)?;
    match target {
        Form::Monomial => op.monomial_form(),
        Form::Lie => op.lie_form(),
    }
}

/// Coefficients `a_0, …, a_n` with `X^n = Σ_k a_k φ^k ∂_t^k`, from
/// `a_k ← X(a_k) + k a_k φ' + a_{k-1}`.
pub fn x_power_coefficients(phi: &Weight, n: u32) -> Vec<RadialFunction> {
    let domain = phi.domain();
    let dphi = phi.profile().derivative();
    let mut a = vec![RadialFunction::constant(domain, 1.0)];
    for _ in 0..n {
        let mut next = vec![RadialFunction::zero(domain); a.len() + 1];
        for (k, ak) in a.iter().enumerate() {
            let xa = phi.profile() * &ak.derivative();
            next[k] = &(&next[k] + &xa) + &(&dphi * ak).scale(k as f64);
            next[k + 1] = &next[k + 1] + ak;
        }
        a = next;
    }
    a
}

/// Lie form to monomial form through the power recurrence and the Leibniz
/// rule for `X^i ∘ ψ^j`, without composing operators.
pub fn lie_to_monomial(lie: &NormalForm, phi: &Weight, psi: &Weight) -> Result<NormalForm> {
    if lie.form != Form::Lie {
        return Err(Error::InvalidInput("expected a Lie-form map".into()));
    }
    check_weight_derivative(phi)?;
    let max_i = lie.coeffs.keys().map(|k| k.0).max().unwrap_or(0);
    let powers: Vec<Vec<RadialFunction>> = (0..=max_i).map(|k| x_power_coefficients(phi, k)).collect();
    let x = |f: &RadialFunction| phi.profile() * &f.derivative();
    let mut coeffs: BTreeMap<Key, CylinderFunction> = BTreeMap::new();
    for (&(i, j), l) in &lie.coeffs {
        let psi_j = psi.profile().powi(j);
        let mut x_psi = vec![psi_j.clone()];
        for _ in 0..i {
            let next = x(x_psi.last().expect("nonempty"));
            x_psi.push(next);
        }
        for k in 0..=i {
            let ratio = x_psi[(i - k) as usize].div(&psi_j)?.scale(binomial(i, k));
            for (m, a) in powers[k as usize].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let term = l.mul_radial(&(&ratio * a));
                let entry = coeffs.entry((m as u32, j)).or_insert_with(|| CylinderFunction::zero(phi.domain()));
                *entry = entry.add(&term);
            }
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(NormalForm { form: Form::Monomial, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powerfun::Exponent;

    fn w(p: Exponent) -> Weight {
        Weight::power(p).unwrap()
    }

    /// `t^a (1+t)^{1-a}`: `t^a` at 0, `t` at ∞, complete.
    fn cw(a: Exponent) -> Weight {
        Weight::monomial(Domain::HalfLine, 1.0, a, Exponent::ONE - a).unwrap()
    }

    fn radial(f: RadialFunction) -> CylinderFunction {
        CylinderFunction::radial(f)
    }

    #[test]
    fn x_squared_monomial_coefficients() {
        let phi = cw(Exponent::ratio(3, 2));
        let psi = w(Exponent::ONE);
        let op = DiffOp::from_lie(&phi, &psi, [((2, 0), CylinderFunction::constant(Domain::HalfLine, 1.0))]).unwrap();
        let nf = normal_form(&op, Form::Monomial).unwrap();
        assert_eq!(nf.coeffs.len(), 2);
        assert_eq!(nf.coeffs[&(2, 0)], CylinderFunction::constant(Domain::HalfLine, 1.0));
        // c_10 φ = φ φ' so c_10 = φ'
        assert_eq!(nf.coeffs[&(1, 0)], radial(phi.profile().derivative()));
        let a = x_power_coefficients(&phi, 2);
        assert!(a[0].is_zero() && a[1] == phi.profile().derivative() && a[2] == RadialFunction::power(1.0, 0));
    }

    #[test]
    fn order_one_is_unchanged() {
        let phi = cw(Exponent::int(2));
        let psi = w(Exponent::ONE);
        let x = DiffOp::x_field(&phi, &psi).unwrap();
        let nf = normal_form(&x, Form::Monomial).unwrap();
        assert_eq!(nf.coeffs.len(), 1);
        assert_eq!(nf.coeffs[&(1, 0)], CylinderFunction::constant(Domain::HalfLine, 1.0));
        let lie = normal_form(&x, Form::Lie).unwrap();
        assert_eq!(lie.coeffs[&(1, 0)], CylinderFunction::constant(Domain::HalfLine, 1.0));
    }

    #[test]
    fn x_of_sqrt_t() {
        let phi = Weight::new(RadialFunction::monomial(Domain::HalfLine, 1.0, 2, -3)).unwrap();
        let psi = w(Exponent::ONE);
        let x = DiffOp::x_field(&phi, &psi).unwrap();
        let out = x.apply(&radial(RadialFunction::power(1.0, Exponent::ratio(1, 2)))).unwrap();
        assert_eq!(out, radial(RadialFunction::monomial(Domain::HalfLine, 0.5, Exponent::ratio(3, 2), -3)));
        assert!(x.apply(&CylinderFunction::zero(Domain::HalfLine)).unwrap().is_zero());
    }

    #[test]
    fn y_on_first_mode() {
        let phi = w(Exponent::ONE);
        let psi = w(Exponent::ratio(1, 2));
        let y = DiffOp::y_field(&phi, &psi).unwrap();
        let e = CylinderFunction::fourier(1, ComplexRadial::constant(Domain::HalfLine, Complex64::new(1.0, 0.0)));
        let out = y.apply(&e).unwrap();
        let want = CylinderFunction::fourier(1, ComplexRadial::new(RadialFunction::zero(Domain::HalfLine), psi.profile().clone()).unwrap());
        assert_eq!(out, want);
    }

    #[test]
    fn commutator_x_y() {
        let phi = w(Exponent::ONE);
        let psi = w(Exponent::ratio(3, 4));
        let x = DiffOp::x_field(&phi, &psi).unwrap();
        let y = DiffOp::y_field(&phi, &psi).unwrap();
        let c = x.commutator(&y).unwrap();
        let structure = crate::weights::structure_function(&psi, &phi).unwrap().exact.unwrap();
        assert!(c.same_as(&y.left_mul(&radial(structure))));
        assert_eq!(c.order(), 1);
    }

    #[test]
    fn lie_round_trip() {
        let phi = cw(Exponent::ratio(3, 2));
        let psi = w(Exponent::ratio(1, 2));
        let d = Domain::HalfLine;
        let l = |c: f64, p: Exponent| radial(RadialFunction::monomial(d, c, p, -1));
        let lie = NormalForm {
            form: Form::Lie,
            coeffs: [
                ((3, 0), l(1.0, Exponent::ZERO)),
                ((1, 2), l(-2.0, Exponent::ratio(1, 3))),
                ((0, 1), CylinderFunction::fourier(2, ComplexRadial::constant(d, Complex64::new(0.5, 1.0)))),
                ((0, 0), l(3.0, Exponent::ONE)),
            ]
            .into_iter()
            .collect(),
        };
        let op = DiffOp::from_lie(&phi, &psi, lie.coeffs.clone()).unwrap();
        assert!(normal_form(&op, Form::Lie).unwrap().same_as(&lie));
        let mono = normal_form(&op, Form::Monomial).unwrap();
        assert!(mono.same_as(&lie_to_monomial(&lie, &phi, &psi).unwrap()));
        let back = DiffOp::from_monomial(&phi, &psi, mono.coeffs).unwrap();
        assert!(back.same_as(&op));
    }

    #[test]
    fn normal_forms_need_unit_weights() {
        let phi = Weight::new(RadialFunction::from_terms(
            Domain::HalfLine,
            [(1.0, Exponent::ONE, Exponent::ZERO), (1.0, Exponent::int(2), Exponent::int(-1))],
        ))
        .unwrap();
        let psi = w(Exponent::ONE);
        let x2 = DiffOp::x_field(&phi, &psi).unwrap().compose(&DiffOp::x_field(&phi, &psi).unwrap()).unwrap();
        assert!(matches!(normal_form(&x2, Form::Monomial), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn text_rendering() {
        let phi = w(Exponent::ONE);
        let psi = w(Exponent::ONE);
        let op = DiffOp::from_lie(&phi, &psi, [((2, 0), CylinderFunction::constant(Domain::HalfLine, 1.0))]).unwrap();
        let text = normal_form(&op, Form::Monomial).unwrap().to_string();
        assert_eq!(
            text,
            "# form=monomial order=2\nφ^i ψ^j ∂_t^1 ∂_θ^0: [1.0 * t^0 * (1+t)^0]\nφ^i ψ^j ∂_t^2 ∂_θ^0: [1.0 * t^0 * (1+t)^0]\n"
        );
    }
}
