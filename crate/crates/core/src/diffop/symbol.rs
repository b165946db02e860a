//! Principal symbols in the rescaled covariables `ξ̂ = φξ`, `η̂ = ψη`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{normal_form, CylinderFunction, DiffOp, Form, Key};
use crate::error::Result;
use crate::powerfun::End;
use crate::weights::sample_points;

const CIRCLE_SAMPLES: usize = 720;
const T_SAMPLES: usize = 64;
const ZERO_TOL: f64 = 1e-8;

/// Homogeneous polynomial `Σ s_ij ξ̂^i η̂^j` with cylinder-function
/// coefficients.
#[derive(Clone, Debug)]
pub struct PrincipalSymbol {
    pub order: u32,
    pub coeffs: BTreeMap<Key, CylinderFunction>,
}

impl PrincipalSymbol {
    pub fn mul(&self, other: &PrincipalSymbol) -> PrincipalSymbol {
        let mut coeffs: BTreeMap<Key, CylinderFunction> = BTreeMap::new();
        for (&(i, j), a) in &self.coeffs {
            for (&(k, l), b) in &other.coeffs {
                let term = a.mul(b);
                match coeffs.get_mut(&(i + k, j + l)) {
                    Some(c) => *c = c.add(&term),
                    None => {
                        coeffs.insert((i + k, j + l), term);
                    }
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        PrincipalSymbol { order: self.order + other.order, coeffs }
    }

    pub fn same_as(&self, other: &PrincipalSymbol) -> bool {
        self.order == other.order && super::coeff_maps_agree(&self.coeffs, &other.coeffs)
    }

    fn combine(&self, xi: f64, eta: f64, coeff: impl Fn(&CylinderFunction) -> Option<Complex64>) -> Option<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for (&(i, j), c) in &self.coeffs {
            sum += coeff(c)? * xi.powi(i as i32) * eta.powi(j as i32);
        }
        Some(sum)
    }

    pub fn eval(&self, t: f64, theta: f64, xi: f64, eta: f64) -> Complex64 {
        self.combine(xi, eta, |c| Some(c.eval(t, theta))).expect("interior values are finite")
    }

    /// Value with the coefficients replaced by their endpoint limits.
    pub fn endpoint_eval(&self, end: End, theta: f64, xi: f64, eta: f64) -> Option<Complex64> {
        self.combine(xi, eta, |c| c.endpoint_value(end, theta))
    }
}

/// `Σ_{i+j = m} c_ij (iξ̂)^i (iη̂)^j` from the monomial form.
pub fn principal_symbol(op: &DiffOp) -> Result<PrincipalSymbol> {
    let order = op.order();
    let mono = normal_form(op, Form::Monomial)?;
    let coeffs = mono
        .coeffs
        .into_iter()
        .filter(|((i, j), c)| i + j == order && !c.vanishes())
        .map(|((i, j), c)| ((i, j), c.scale(Complex64::i().powu(i + j))))
        .collect();
    Ok(PrincipalSymbol { order, coeffs })
}

fn circle_has_zero(values: &[Complex64]) -> bool {
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return true;
    }
    let tol = ZERO_TOL * scale;
    if values.iter().any(|v| v.norm() <= tol) {
        return true;
    }
    values.iter().zip(values.iter().cycle().skip(1)).any(|(a, b)| {
        (a.re * b.re < 0.0 && a.im.abs() <= tol && b.im.abs() <= tol)
            || (a.im * b.im < 0.0 && a.re.abs() <= tol && b.re.abs() <= tol)
    })
}

/// No zero of the principal symbol on the unit circle of `(ξ̂, η̂)`, over
/// a log grid of `t`, a grid of `θ`, and both endpoint limits.
pub fn is_elliptic(op: &DiffOp) -> Result<bool> {
    let sym = principal_symbol(op)?;
    if sym.coeffs.is_empty() {
        return Ok(false);
    }
    let n_theta = if sym.coeffs.values().all(CylinderFunction::is_radial) { 1 } else { 16 };
    let thetas: Vec<f64> = (0..n_theta).map(|k| 2.0 * PI * k as f64 / n_theta as f64).collect();
    let circle: Vec<(f64, f64)> = (0..CIRCLE_SAMPLES)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / CIRCLE_SAMPLES as f64;
            (a.cos(), a.sin())
        })
        .collect();
    for &theta in &thetas {
        for t in sample_points(op.domain(), T_SAMPLES) {
            let values: Vec<Complex64> = circle.iter().map(|&(x, e)| sym.eval(t, theta, x, e)).collect();
            if circle_has_zero(&values) {
                return Ok(false);
            }
        }
        for end in [End::Zero, End::Far] {
            let values: Option<Vec<Complex64>> =
                circle.iter().map(|&(x, e)| sym.endpoint_eval(end, theta, x, e)).collect();
            match values {
                Some(v) if !circle_has_zero(&v) => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powerfun::{Domain, Exponent};
    use crate::weights::Weight;

    fn laplace_like(sign: f64) -> DiffOp {
        let phi = Weight::power(1).unwrap();
        let psi = Weight::power(0).unwrap();
        let one = CylinderFunction::constant(Domain::HalfLine, 1.0);
        DiffOp::from_lie(&phi, &psi, [((2, 0), one.clone()), ((0, 2), one.scale(Complex64::new(sign, 0.0)))]).unwrap()
    }

    #[test]
    fn sum_of_squares_is_elliptic() {
        let op = laplace_like(1.0);
        let s = principal_symbol(&op).unwrap();
        assert_eq!(s.order, 2);
        assert!((s.eval(0.5, 0.0, 0.6, 0.8) - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!(is_elliptic(&op).unwrap());
    }

    #[test]
    fn wave_like_is_not_elliptic() {
        assert!(!is_elliptic(&laplace_like(-1.0)).unwrap());
    }

    #[test]
    fn top_order_symbol_is_multiplicative() {
        let phi = Weight::monomial(Domain::HalfLine, 1.0, Exponent::ratio(3, 2), Exponent::ratio(-1, 2)).unwrap();
        let psi = Weight::power(Exponent::ratio(1, 2)).unwrap();
        let x = DiffOp::x_field(&phi, &psi).unwrap();
        let y = DiffOp::y_field(&phi, &psi).unwrap();
        let a = x.compose(&x).unwrap().add(&y).unwrap();
        let b = y.compose(&x).unwrap();
        let ab = principal_symbol(&a.compose(&b).unwrap()).unwrap();
        let prod = principal_symbol(&a).unwrap().mul(&principal_symbol(&b).unwrap());
        assert!(ab.same_as(&prod));
    }
}
