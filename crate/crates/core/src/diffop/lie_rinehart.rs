//! Lie-Rinehart axioms for the module of fields spanned by `X` and `Y`,
//! checked by symbolic expansion on sample fields and functions.

use std::fmt;

use super::{CylinderFunction, DiffOp};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub passed: bool,
    /// Number of sample tuples checked.
    pub cases: usize,
    /// First failing tuple, if any.
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieRinehartReport {
    pub entries: Vec<AxiomResult>,
}

impl LieRinehartReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }
}

impl fmt::Display for LieRinehartReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let status = if e.passed { "pass" } else { "FAIL" };
            write!(f, "{status} {} ({} cases)", e.axiom, e.cases)?;
            if let Some(d) = &e.detail {
                write!(f, ": {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct Tally {
    axiom: &'static str,
    cases: usize,
    detail: Option<String>,
}

impl Tally {
    fn new(axiom: &'static str) -> Self {
        Self { axiom, cases: 0, detail: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.detail.is_none() {
            self.detail = Some(what());
        }
    }

    fn finish(self) -> AxiomResult {
        AxiomResult { axiom: self.axiom, passed: self.detail.is_none(), cases: self.cases, detail: self.detail }
    }
}

fn op_size(op: &DiffOp) -> f64 {
    op.plain().values().map(CylinderFunction::max_abs_coeff).fold(0.0, f64::max)
}

/// Zero as a function, or zero up to rounding relative to the summands
/// that produced it.
fn negligible(sum: &DiffOp, scale: f64) -> bool {
    sum.vanishes() || op_size(sum) <= ROUNDING * scale
}

const ROUNDING: f64 = 1e-12;

fn is_field(op: &DiffOp) -> bool {
    op.order() <= 1 && op.plain().get(&(0, 0)).map_or(true, CylinderFunction::vanishes)
}

/// Jacobi identity, closure of the bracket, Leibniz rule
/// `[A, aB] = A(a) B + a [A, B]`, module axioms for the anchor, and the
/// anchor being a bracket homomorphism.
pub fn lie_rinehart_check(fields: &[DiffOp], functions: &[CylinderFunction]) -> Result<LieRinehartReport> {
    if let Some((k, _)) = fields.iter().enumerate().find(|(_, f)| !is_field(f)) {
        return Err(Error::InvalidInput(format!("sample {k} is not a vector field")));
    }
    let mut closure = Tally::new("closure");
    let mut jacobi = Tally::new("jacobi");
    let mut leibniz = Tally::new("leibniz");
    let mut module = Tally::new("module");
    let mut anchor = Tally::new("anchor homomorphism");

    for (i, a) in fields.iter().enumerate() {
        for (j, b) in fields.iter().enumerate() {
            let ab = a.commutator(b)?;
            closure.record(is_field(&ab), || format!("[F{i}, F{j}] has order {}", ab.order()));
            for (k, f) in functions.iter().enumerate() {
                let lhs = ab.apply(f)?;
                let rhs = a.apply(&b.apply(f)?)?.sub(&b.apply(&a.apply(f)?)?);
                anchor.record(lhs.sub(&rhs).vanishes(), || format!("F{i}, F{j}, f{k}"));

                let a_of_f = a.apply(f)?;
                let lhs = a.commutator(&b.left_mul(f))?;
                let rhs = b.left_mul(&a_of_f).add(&ab.left_mul(f))?;
                leibniz.record(lhs.same_as(&rhs), || format!("[F{i}, f{k} F{j}]"));
            }
        }
        for (k, f) in functions.iter().enumerate() {
            for (l, g) in functions.iter().enumerate() {
                let lhs = a.left_mul(f).apply(g)?;
                let rhs = f.mul(&a.apply(g)?);
                let twice = a.left_mul(g).left_mul(f).same_as(&a.left_mul(&f.mul(g)));
                module.record(lhs.sub(&rhs).vanishes() && twice, || format!("F{i}, f{k}, f{l}"));
            }
        }
    }
    for (i, a) in fields.iter().enumerate() {
        for (j, b) in fields.iter().enumerate().skip(i + 1) {
            for (k, c) in fields.iter().enumerate().skip(j + 1) {
                let parts = [
                    a.commutator(b)?.commutator(c)?,
                    b.commutator(c)?.commutator(a)?,
                    c.commutator(a)?.commutator(b)?,
                ];
                let sum = parts[0].add(&parts[1])?.add(&parts[2])?;
                let scale = parts.iter().map(op_size).fold(0.0, f64::max);
                jacobi.record(negligible(&sum, scale), || format!("F{i}, F{j}, F{k}"));
            }
        }
    }
    Ok(LieRinehartReport {
        entries: vec![closure.finish(), jacobi.finish(), leibniz.finish(), module.finish(), anchor.finish()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::ComplexRadial;
    use crate::powerfun::{Domain, Exponent, RadialFunction};
    use crate::weights::Weight;
    use num_complex::Complex64;

    fn setup() -> (Weight, Weight, CylinderFunction) {
        let phi = Weight::power(Exponent::ratio(3, 2)).unwrap();
        let psi = Weight::power(Exponent::ratio(1, 2)).unwrap();
        let a = CylinderFunction::radial(RadialFunction::monomial(Domain::HalfLine, 1.0, Exponent::ratio(1, 2), -1));
        (phi, psi, a)
    }

    #[test]
    fn axioms_hold_on_generators() {
        let (phi, psi, a) = setup();
        let x = DiffOp::x_field(&phi, &psi).unwrap();
        let y = DiffOp::y_field(&phi, &psi).unwrap();
        let tx = x.left_mul(&CylinderFunction::radial(RadialFunction::power(1.0, 1)));
        let e1 = CylinderFunction::fourier(1, ComplexRadial::constant(Domain::HalfLine, Complex64::new(1.0, 0.0)));
        let report = lie_rinehart_check(&[x.clone(), y.clone(), tx.clone(), y.left_mul(&e1)], &[a.clone(), e1]).unwrap();
        assert!(report.all_passed(), "{report}");
        let jacobi = x.commutator(&y).unwrap().commutator(&tx).unwrap()
            .add(&y.commutator(&tx).unwrap().commutator(&x).unwrap()).unwrap()
            .add(&tx.commutator(&x).unwrap().commutator(&y).unwrap()).unwrap();
        assert!(jacobi.vanishes());
        // [X, aY] - a[X, Y] - X(a) Y = 0
        let lhs = x.commutator(&y.left_mul(&a)).unwrap();
        let rest = x.commutator(&y).unwrap().left_mul(&a).add(&y.left_mul(&x.apply(&a).unwrap())).unwrap();
        assert!(lhs.sub(&rest).unwrap().vanishes());
    }

    #[test]
    fn zero_field_passes() {
        let (phi, psi, a) = setup();
        let z = DiffOp::zero(&phi, &psi).unwrap();
        assert!(lie_rinehart_check(&[z.clone(), z.clone(), z], &[a]).unwrap().all_passed());
    }

    #[test]
    fn rejects_non_fields() {
        let (phi, psi, _) = setup();
        let id = DiffOp::identity(&phi, &psi).unwrap();
        assert!(lie_rinehart_check(&[id], &[]).is_err());
    }
}
