//! Radial Schrödinger operators `H = -Δ + V` on `ℝⁿ \ {0}`.
//!
//! Near `ρ = 0` and near `r = 1/ρ = 0` the operator, multiplied by a power
//! of the variable, is a polynomial in `X = φ∂` and `Y = ψ∂_θ` for a
//! power-law pair `(φ, ψ)`: see [`rewrite`]. Globally,
//! `ρ₀^{a}ρ_∞^{a'} H` has coefficients in `C_φ^(∞)` for the weight
//! `φ = ρ₀^{γ̃}ρ_∞^{γ̃'}`: see [`membership_in_diff_s`]. The numerical side
//! (geometric grid, eigenpairs, parametrix and resolvent probes) lives in the
//! submodules.

mod eigen;
mod grid;
mod probes;

use std::collections::BTreeMap;
use std::fmt;

pub use eigen::{DenseOracle, EigenBuilder, EigenPair, EigenRegistry, EigenSolver, ShiftInvert, SymTridiagonal};
pub use grid::{assemble, assemble_and_solve, spectrum_csv, Assembled, GeometricGrid, SpectralResult};
pub use probes::{
    parametrix_csv, parametrix_residual, resolvent_csv, resolvent_probe, ParametrixConfig, ParametrixRow,
    ProbeOperator, ResolventReport, ResolventRow,
};

use crate::diffop::{normal_form, CylinderFunction, DiffOp, Form, Key};
use crate::error::{Error, Result};
use crate::powerfun::{Domain, End, Exponent, RadialFunction};
use crate::weights::{membership_order, Level, Membership, Weight};

/// Radial problem: dimension, potential exponents, potential, angular
/// momentum.
///
/// `potential` is the whole of `V` as a ring function of `ρ`;
/// `ρ^{2γ} V` must stay bounded at 0 and `ρ^{-2γ'} V` at `∞`.
#[derive(Clone, Debug)]
pub struct SchrodingerProblem {
    pub n: u32,
    pub gamma: Exponent,
    pub gamma_prime: Exponent,
    pub potential: RadialFunction,
    pub l: u32,
}

impl SchrodingerProblem {
    pub fn new(
        n: u32,
        gamma: impl Into<Exponent>,
        gamma_prime: impl Into<Exponent>,
        potential: RadialFunction,
        l: u32,
    ) -> Result<Self> {
        let gamma = gamma.into();
        let gamma_prime = gamma_prime.into();
        if n < 2 {
            return Err(Error::InvalidInput(format!("dimension {n} < 2")));
        }
        if potential.domain() != Domain::HalfLine {
            return Err(Error::DomainMismatch("potential must live on the half-line".into()));
        }
        let near_zero = &RadialFunction::power(1.0, gamma * 2) * &potential;
        if !near_zero.endpoint_limit(End::Zero).is_finite() {
            return Err(Error::InvalidInput(format!("ρ^(2γ) V unbounded at 0 for γ = {gamma}")));
        }
        let near_far = &RadialFunction::power(1.0, -(gamma_prime * 2)) * &potential;
        if !near_far.endpoint_limit(End::Far).is_finite() {
            return Err(Error::InvalidInput(format!("ρ^(-2γ') V unbounded at ∞ for γ' = {gamma_prime}")));
        }
        Ok(Self { n, gamma, gamma_prime, potential, l })
    }

    /// `n = 3`, `V = -1/ρ`.
    pub fn hydrogen(l: u32) -> Self {
        Self::new(3, Exponent::ratio(1, 2), Exponent::ratio(-1, 2), RadialFunction::power(-1.0, -1), l)
            .expect("hydrogen is admissible")
    }

    /// `n = 3`, `V = ρ²`.
    pub fn oscillator(l: u32) -> Self {
        Self::new(3, 0, 1, RadialFunction::power(1.0, 2), l).expect("oscillator is admissible")
    }

    /// `γ̃ = max{γ, 1}`.
    pub fn gamma_tilde(&self) -> Exponent {
        self.gamma.max(Exponent::ONE)
    }

    /// `γ̃' = max{γ', 0}`.
    pub fn gamma_prime_tilde(&self) -> Exponent {
        self.gamma_prime.max(Exponent::ZERO)
    }

    /// `ℓ(ℓ + n - 2)`, minus the eigenvalue of `Δ_{S^{n-1}}` on the sector.
    pub fn angular_eigenvalue(&self) -> f64 {
        let l = self.l as f64;
        l * (l + self.n as f64 - 2.0)
    }

    /// `φ = ρ^{γ̃} (1+ρ)^{-γ̃-γ̃'}`, i.e. `ρ₀^{γ̃}ρ_∞^{γ̃'}` for
    /// `ρ₀ = ρ/(1+ρ)`, `ρ_∞ = 1/(1+ρ)`.
    pub fn global_phi(&self) -> Weight {
        let (g, gp) = (self.gamma_tilde(), self.gamma_prime_tilde());
        Weight::monomial(Domain::HalfLine, 1.0, g, -(g + gp)).expect("positive monomial")
    }

    /// `ψ = φ/ρ`.
    pub fn global_psi(&self) -> Weight {
        let (g, gp) = (self.gamma_tilde(), self.gamma_prime_tilde());
        Weight::monomial(Domain::HalfLine, 1.0, g - 1, -(g + gp)).expect("positive monomial")
    }
}

/// The four local forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `ρ²H = (ρ∂)² + (n-2)ρ∂ + Δ_S + ρ²V`, used for `γ ≤ 1`.
    NearZeroB,
    /// `ρ^{2γ}H = (ρ^γ∂)² + (n-1-γ)ρ^{γ-1}(ρ^γ∂) + ρ^{2γ-2}Δ_S + ρ^{2γ}V`,
    /// used for `γ ≥ 1`.
    NearZeroPower,
    /// `H = (r²∂)² - (n-1)r(r²∂) + r²Δ_S + V`, used for `γ' ≤ 0`.
    NearFarQuadratic,
    /// `r^{2γ'}H = (r^{2+γ'}∂)² - (n-1+γ')r^{1+γ'}(r^{2+γ'}∂)
    /// + r^{2γ'+2}Δ_S + r^{2γ'}V`, used for `γ' ≥ 0`.
    NearFarPower,
}

impl Branch {
    pub fn variable(self) -> &'static str {
        match self {
            Branch::NearZeroB | Branch::NearZeroPower => "ρ",
            Branch::NearFarQuadratic | Branch::NearFarPower => "r",
        }
    }

    pub fn end(self) -> End {
        match self {
            Branch::NearZeroB | Branch::NearZeroPower => End::Zero,
            Branch::NearFarQuadratic | Branch::NearFarPower => End::Far,
        }
    }
}

/// One local rewrite of `H`.
///
/// With `v` the local variable (`ρ` or `r = 1/ρ`), `v^{multiplier} H` equals
/// `X² + c X + Y² + w` for `X = v^a ∂_v`, `Y = v^b ∂_θ`, `(a, b)` the
/// calculus label; `Y²` stands for the angular Laplacian `v^{2b} Δ_S`.
#[derive(Clone, Debug)]
pub struct Rewrite {
    pub branch: Branch,
    pub calculus: (Exponent, Exponent),
    pub multiplier: Exponent,
    /// Coefficients of `X^i Y^j`.
    pub lie: BTreeMap<Key, RadialFunction>,
    /// The cylinder operator, `Y² = v^{2b}∂_θ²`.
    pub op: DiffOp,
    /// The sector operator: `Y²` replaced by `-ℓ(ℓ+n-2) v^{2b}`.
    pub radial: DiffOp,
}

impl Rewrite {
    /// Same branch data and the same operators.
    pub fn same_as(&self, other: &Rewrite) -> bool {
        self.calculus.0.approx_eq(other.calculus.0)
            && self.calculus.1.approx_eq(other.calculus.1)
            && self.multiplier.approx_eq(other.multiplier)
            && self.op.same_as(&other.op)
            && self.radial.same_as(&other.radial)
    }
}

/// Compact text of a ring function in the variable `v`.
fn compact(f: &RadialFunction, v: &str) -> String {
    if f.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, t) in f.terms().iter().enumerate() {
        let mut factors = Vec::new();
        if !t.key.p.is_zero() {
            factors.push(if t.key.p == Exponent::ONE { v.to_string() } else { format!("{v}^({})", t.key.p) });
        }
        if !t.key.q.is_zero() {
            factors.push(format!("(1+{v})^({})", t.key.q));
        }
        let c = t.coeff;
        let sign = if c < 0.0 { "-" } else if k > 0 { "+" } else { "" };
        let mag = c.abs();
        let body = match (factors.is_empty(), mag == 1.0) {
            (true, _) => format!("{mag}"),
            (false, true) => factors.join("·"),
            (false, false) => format!("{mag}·{}", factors.join("·")),
        };
        if k > 0 {
            out.push(' ');
        }
        out.push_str(sign);
        if k > 0 {
            out.push(' ');
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for Rewrite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.branch.variable();
        let (a, b) = self.calculus;
        let lhs = if self.multiplier.is_zero() { String::new() } else { format!("{v}^({}) ", self.multiplier) };
        let at = match self.branch.end() {
            End::Zero => "ρ → 0",
            End::Far => "r = 1/ρ → 0",
        };
        writeln!(f, "near {at}: c_{{{a},{b}}}-calculus, X = {v}^({a})∂_{v}, Y = {v}^({b})∂_θ")?;
        let mut terms = Vec::new();
        for (&(i, j), c) in self.lie.iter().rev() {
            let word = match (i, j) {
                (0, 0) => String::new(),
                (2, 0) => "X²".into(),
                (1, 0) => "X".into(),
                (0, 2) => "Y²".into(),
                _ => format!("X^{i} Y^{j}"),
            };
            let coeff = compact(c, v);
            terms.push(match (word.is_empty(), coeff.as_str()) {
                (true, _) => format!("[{coeff}]"),
                (false, "1") => word,
                (false, _) => format!("[{coeff}] {word}"),
            });
        }
        writeln!(f, "  {lhs}H = {}", terms.join(" + "))
    }
}

fn radial(f: RadialFunction) -> CylinderFunction {
    CylinderFunction::radial(f)
}

/// The rewrite of a given branch.
pub fn rewrite_branch(prob: &SchrodingerProblem, branch: Branch) -> Result<Rewrite> {
    let n = prob.n as f64;
    let (g, gp) = (prob.gamma, prob.gamma_prime);
    let pow = |c: f64, p: Exponent| RadialFunction::power(c, p);
    let v_far = prob.potential.invert_variable()?;
    let (a, b, multiplier, first, potential) = match branch {
        Branch::NearZeroB => {
            let w = &pow(1.0, Exponent::int(2)) * &prob.potential;
            (Exponent::ONE, Exponent::ZERO, Exponent::int(2), pow(n - 2.0, Exponent::ZERO), w)
        }
        Branch::NearZeroPower => {
            let w = &pow(1.0, g * 2) * &prob.potential;
            (g, g - 1, g * 2, pow(n - 1.0 - g.to_f64(), g - 1), w)
        }
        Branch::NearFarQuadratic => (Exponent::int(2), Exponent::ONE, Exponent::ZERO, pow(-(n - 1.0), Exponent::ONE), v_far),
        Branch::NearFarPower => {
            let w = &pow(1.0, gp * 2) * &v_far;
            (gp + 2, gp + 1, gp * 2, pow(-(n - 1.0 + gp.to_f64()), gp + 1), w)
        }
    };
    let phi = Weight::power(a)?;
    let psi = Weight::power(b)?;
    let mut lie = BTreeMap::new();
    lie.insert((2, 0), pow(1.0, Exponent::ZERO));
    lie.insert((1, 0), first);
    lie.insert((0, 2), pow(1.0, Exponent::ZERO));
    if !potential.is_empty() {
        lie.insert((0, 0), potential);
    }
    let op = DiffOp::from_lie(&phi, &psi, lie.iter().map(|(&k, c)| (k, radial(c.clone()))))?;
    let mut sector: BTreeMap<Key, RadialFunction> = lie.clone();
    sector.remove(&(0, 2));
    let curvature = pow(-prob.angular_eigenvalue(), b * 2);
    let w = sector.remove(&(0, 0)).map(|p| &p + &curvature).unwrap_or(curvature);
    if !w.is_empty() {
        sector.insert((0, 0), w);
    }
    let radial_op = DiffOp::from_lie(&phi, &psi, sector.into_iter().map(|(k, c)| (k, radial(c))))?;
    Ok(Rewrite { branch, calculus: (a, b), multiplier, lie, op, radial: radial_op })
}

/// Near-0 and near-∞ rewrites, branches picked by `γ ≤ 1` and `γ' ≤ 0`.
pub fn rewrite(prob: &SchrodingerProblem) -> Result<[Rewrite; 2]> {
    let zero = if prob.gamma.cmp_approx(Exponent::ONE).is_le() { Branch::NearZeroB } else { Branch::NearZeroPower };
    let far = if prob.gamma_prime.cmp_approx(Exponent::ZERO).is_le() {
        Branch::NearFarQuadratic
    } else {
        Branch::NearFarPower
    };
    Ok([rewrite_branch(prob, zero)?, rewrite_branch(prob, far)?])
}

/// `(r^{2+γ'}∂_r)² = r^{2γ'}(r²∂_r)² + γ' r^{2γ'+3}∂_r`, checked in the
/// operator algebra.
pub fn verify_identity_r_power(gamma_prime: impl Into<Exponent>) -> Result<bool> {
    let gp = gamma_prime.into();
    let phi = Weight::power(gp + 2)?;
    let psi = Weight::power(gp + 1)?;
    let field = |p: Exponent| DiffOp::from_plain(&phi, &psi, [((1, 0), radial(RadialFunction::power(1.0, p)))]);
    let x = field(gp + 2)?;
    let lhs = x.compose(&x)?;
    let x0 = field(Exponent::int(2))?;
    let correction = DiffOp::from_plain(&phi, &psi, [((1, 0), radial(RadialFunction::power(gp.to_f64(), gp * 2 + 3)))])?;
    let rhs = x0.compose(&x0)?.left_mul(&radial(RadialFunction::power(1.0, gp * 2))).add(&correction)?;
    Ok(lhs.same_as(&rhs))
}

/// Exponent convention for the global prefactor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PrefactorConvention {
    /// `φ² = ρ₀^{2γ̃}ρ_∞^{2γ̃'}`, the powers used by the local rewrites.
    #[default]
    Squared,
    /// `φ = ρ₀^{γ̃}ρ_∞^{γ̃'}`.
    Literal,
}

impl PrefactorConvention {
    pub fn prefactor(self, phi: &Weight) -> RadialFunction {
        match self {
            Self::Squared => phi.profile().powi(2),
            Self::Literal => phi.profile().clone(),
        }
    }

    /// Powers `(t, t')` of `(ρ₀, ρ_∞)`.
    pub fn exponents(self, prob: &SchrodingerProblem) -> (Exponent, Exponent) {
        let k = match self {
            Self::Squared => 2,
            Self::Literal => 1,
        };
        (prob.gamma_tilde() * k, prob.gamma_prime_tilde() * k)
    }
}

impl std::str::FromStr for PrefactorConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(Self::Squared),
            "literal" => Ok(Self::Literal),
            _ => Err(Error::Parse(format!("prefactor convention `{s}` (expected squared or literal)"))),
        }
    }
}

/// Plain coefficients of `M·H` for the prefactor `M`, with the angular
/// Laplacian written as `∂_θ²`.
pub fn prefactored_operator(prob: &SchrodingerProblem, convention: PrefactorConvention) -> Result<DiffOp> {
    let phi = prob.global_phi();
    let psi = prob.global_psi();
    let m = convention.prefactor(&phi);
    let inv_rho = RadialFunction::power(1.0, -1);
    let coeffs = [
        ((2, 0), m.scale(-1.0)),
        ((1, 0), (&m * &inv_rho).scale(-(prob.n as f64 - 1.0))),
        ((0, 2), (&m * &inv_rho.powi(2)).scale(-1.0)),
        ((0, 0), &m * &prob.potential),
    ];
    DiffOp::from_plain(&phi, &psi, coeffs.into_iter().filter(|(_, c)| !c.is_empty()).map(|(k, c)| (k, radial(c))))
}

/// Verdict on one monomial coefficient.
#[derive(Clone, Debug)]
pub struct CoefficientVerdict {
    pub key: Key,
    pub coefficient: RadialFunction,
    pub membership: Membership,
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub phi: Weight,
    pub psi: Weight,
    pub convention: PrefactorConvention,
    pub entries: Vec<CoefficientVerdict>,
}

impl MembershipReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.membership.is_member)
    }

    pub fn first_failure(&self) -> Option<Key> {
        self.entries.iter().find(|e| !e.membership.is_member).map(|e| e.key)
    }
}

impl fmt::Display for MembershipReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phi = self.phi.profile();
        let far = self.phi.intrinsic_far_exponent();
        let psi_far = far - 1;
        writeln!(
            f,
            "S_{{{}, {}, {}, {}}}  φ = {}  prefactor = {:?}",
            self.phi.a(),
            self.psi.a(),
            far,
            psi_far,
            compact(phi, "ρ"),
            self.convention
        )?;
        for e in &self.entries {
            let verdict = match (e.membership.is_member, e.membership.member_up_to) {
                (true, _) => "in C_φ^(∞)".to_string(),
                (false, None) => "not continuous".to_string(),
                (false, Some(k)) => format!("fails at X^{}", k + 1),
            };
            writeln!(f, "  c_{}{} = {}: {verdict}", e.key.0, e.key.1, compact(&e.coefficient, "ρ"))?;
        }
        match self.first_failure() {
            None => writeln!(f, "verdict: every coefficient passes"),
            Some((i, j)) => writeln!(f, "verdict: FAIL at (i, j) = ({i}, {j})"),
        }
    }
}

/// Test each coefficient against `C_φ^(∞)`.
pub fn coefficient_membership(
    phi: &Weight,
    psi: &Weight,
    convention: PrefactorConvention,
    coeffs: &BTreeMap<Key, RadialFunction>,
) -> Result<MembershipReport> {
    let mut entries = Vec::with_capacity(coeffs.len());
    for (&key, c) in coeffs {
        let membership = membership_order(c, phi, Level::Infinite)?;
        entries.push(CoefficientVerdict { key, coefficient: c.clone(), membership });
    }
    Ok(MembershipReport { phi: phi.clone(), psi: psi.clone(), convention, entries })
}

/// Monomial coefficients `c_ij` of the prefactored operator over the global
/// weights.
pub fn prefactored_coefficients(
    prob: &SchrodingerProblem,
    convention: PrefactorConvention,
) -> Result<BTreeMap<Key, RadialFunction>> {
    let op = prefactored_operator(prob, convention)?;
    let nf = normal_form(&op, Form::Monomial)?;
    let mut out = BTreeMap::new();
    for (k, c) in nf.coeffs {
        if !c.is_radial() {
            return Err(Error::PropertyViolation(format!("coefficient {k:?} depends on θ")));
        }
        let c0 = c.mode(0).cloned().expect("radial coefficient has mode 0");
        if !c0.im.vanishes() {
            return Err(Error::PropertyViolation(format!("coefficient {k:?} is not real")));
        }
        out.insert(k, c0.re);
    }
    Ok(out)
}

/// Coefficient-by-coefficient membership of the prefactored operator.
pub fn membership_in_diff_s(prob: &SchrodingerProblem, convention: PrefactorConvention) -> Result<MembershipReport> {
    let coeffs = prefactored_coefficients(prob, convention)?;
    coefficient_membership(&prob.global_phi(), &prob.global_psi(), convention, &coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> RadialFunction {
        RadialFunction::constant(Domain::HalfLine, 1.0)
    }

    #[test]
    fn hydrogen_rewrite_near_zero() {
        let [zero, far] = rewrite(&SchrodingerProblem::hydrogen(0)).unwrap();
        assert_eq!(zero.branch, Branch::NearZeroB);
        assert_eq!(zero.calculus, (Exponent::ONE, Exponent::ZERO));
        assert_eq!(zero.multiplier, Exponent::int(2));
        assert!(zero.lie[&(1, 0)].approx_eq(&one(), 0.0));
        assert!(zero.lie[&(0, 0)].approx_eq(&RadialFunction::power(-1.0, 1), 0.0));
        assert_eq!(far.branch, Branch::NearFarQuadratic);
        assert_eq!(far.calculus, (Exponent::int(2), Exponent::ONE));
        // V(1/r) = -r
        assert!(far.lie[&(0, 0)].approx_eq(&RadialFunction::power(-1.0, 1), 0.0));
        assert!(zero.to_string().contains("c_{1,0}"));
    }

    #[test]
    fn oscillator_rewrite_near_far() {
        let [_, far] = rewrite(&SchrodingerProblem::oscillator(0)).unwrap();
        assert_eq!(far.branch, Branch::NearFarPower);
        assert_eq!(far.calculus, (Exponent::int(3), Exponent::int(2)));
        assert_eq!(far.multiplier, Exponent::int(2));
        assert!(far.lie[&(1, 0)].approx_eq(&RadialFunction::power(-3.0, 2), 0.0));
        assert!(far.lie[&(0, 0)].approx_eq(&one(), 0.0));
        // Y² = r⁴ ∂_θ²
        assert!(far.op.plain()[&(0, 2)].sub(&radial(RadialFunction::power(1.0, 4))).vanishes());
    }

    #[test]
    fn branches_coincide_at_the_boundary_values() {
        let v = RadialFunction::from_terms(
            Domain::HalfLine,
            [(1.0, Exponent::int(-2), Exponent::ZERO), (0.5, Exponent::ZERO, Exponent::int(-1))],
        );
        let prob = SchrodingerProblem::new(4, 1, 0, v, 2).unwrap();
        let b = rewrite_branch(&prob, Branch::NearZeroB).unwrap();
        let p = rewrite_branch(&prob, Branch::NearZeroPower).unwrap();
        assert!(b.same_as(&p));
        let q = rewrite_branch(&prob, Branch::NearFarQuadratic).unwrap();
        let r = rewrite_branch(&prob, Branch::NearFarPower).unwrap();
        assert!(q.same_as(&r));
        assert!(!b.same_as(&q));
    }

    #[test]
    fn power_branch_label() {
        let prob = SchrodingerProblem::new(3, Exponent::ratio(3, 2), 0, RadialFunction::power(2.0, -3), 0).unwrap();
        let [zero, _] = rewrite(&prob).unwrap();
        assert_eq!(zero.branch, Branch::NearZeroPower);
        assert_eq!(zero.calculus, (Exponent::ratio(3, 2), Exponent::ratio(1, 2)));
        assert!(zero.to_string().contains("c_{3/2,1/2}"));
    }

    #[test]
    fn r_power_identity() {
        for gp in [Exponent::ratio(-1, 2), Exponent::ZERO, Exponent::ratio(1, 3), Exponent::ONE, Exponent::int(2)] {
            assert!(verify_identity_r_power(gp).unwrap(), "γ' = {gp}");
        }
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(SchrodingerProblem::new(1, 0, 0, RadialFunction::zero(Domain::HalfLine), 0).is_err());
        // -1/ρ² is too singular for γ = 1/2
        assert!(SchrodingerProblem::new(3, Exponent::ratio(1, 2), 0, RadialFunction::power(-1.0, -2), 0).is_err());
        // ρ² grows faster than ρ^{2γ'} for γ' = 1/2
        assert!(SchrodingerProblem::new(3, 0, Exponent::ratio(1, 2), RadialFunction::power(1.0, 2), 0).is_err());
    }

    #[test]
    fn membership_reports() {
        for prob in [SchrodingerProblem::hydrogen(0), SchrodingerProblem::oscillator(1)] {
            let rep = membership_in_diff_s(&prob, PrefactorConvention::Squared).unwrap();
            assert!(rep.passed(), "{rep}");
            assert_eq!(rep.entries.len(), 4);
        }
        let lit = membership_in_diff_s(&SchrodingerProblem::hydrogen(0), PrefactorConvention::Literal).unwrap();
        assert_eq!(lit.first_failure(), Some((0, 2)));
    }

    #[test]
    fn membership_fractional_gamma() {
        let prob = SchrodingerProblem::new(3, Exponent::ratio(3, 2), 0, RadialFunction::power(1.0, -3), 0).unwrap();
        let coeffs = prefactored_coefficients(&prob, PrefactorConvention::Squared).unwrap();
        // -(n-1) φ/ρ = -2 ρ^{1/2} (1+ρ)^{-3/2}
        let expected = RadialFunction::monomial(Domain::HalfLine, -2.0, Exponent::ratio(1, 2), Exponent::ratio(-3, 2));
        assert!(coeffs[&(1, 0)].approx_eq(&expected, 1e-14));
        let rep = coefficient_membership(&prob.global_phi(), &prob.global_psi(), PrefactorConvention::Squared, &coeffs)
            .unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn negative_control_is_located() {
        let prob = SchrodingerProblem::hydrogen(0);
        let mut coeffs = prefactored_coefficients(&prob, PrefactorConvention::Squared).unwrap();
        let bad = &coeffs[&(0, 0)] + &RadialFunction::power(1.0, Exponent::ratio(-1, 2));
        coeffs.insert((0, 0), bad);
        let rep = coefficient_membership(&prob.global_phi(), &prob.global_psi(), PrefactorConvention::Squared, &coeffs)
            .unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.first_failure(), Some((0, 0)));
    }
}
