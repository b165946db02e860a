//! Functions on the cylinder `[0, ∞] × S¹` with ring-valued Fourier modes.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::powerfun::{Domain, End, RadialFunction};

/// `re + i·im` with ring components.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRadial {
    pub re: RadialFunction,
    pub im: RadialFunction,
}

impl ComplexRadial {
    pub fn zero(domain: Domain) -> Self {
        Self { re: RadialFunction::zero(domain), im: RadialFunction::zero(domain) }
    }

    pub fn real(f: RadialFunction) -> Self {
        let im = RadialFunction::zero(f.domain());
        Self { re: f, im }
    }

    pub fn new(re: RadialFunction, im: RadialFunction) -> Result<Self> {
        if re.domain() != im.domain() {
            return Err(Error::DomainMismatch("real and imaginary parts".into()));
        }
        Ok(Self { re, im })
    }

    pub fn constant(domain: Domain, c: Complex64) -> Self {
        Self { re: RadialFunction::constant(domain, c.re), im: RadialFunction::constant(domain, c.im) }
    }

    pub fn domain(&self) -> Domain {
        self.re.domain()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn vanishes(&self) -> bool {
        self.re.vanishes() && self.im.vanishes()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn neg(&self) -> Self {
        Self { re: -&self.re, im: -&self.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn mul_real(&self, f: &RadialFunction) -> Self {
        Self { re: &self.re * f, im: &self.im * f }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            re: &self.re.scale(z.re) - &self.im.scale(z.im),
            im: &self.re.scale(z.im) + &self.im.scale(z.re),
        }
    }

    /// Multiplication by `i`.
    pub fn times_i(&self) -> Self {
        Self { re: -&self.im, im: self.re.clone() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn derivative(&self) -> Self {
        Self { re: self.re.derivative(), im: self.im.derivative() }
    }

    /// Exact quotient by a single-term function.
    pub fn div_real(&self, f: &RadialFunction) -> Result<Self> {
        Ok(Self { re: self.re.div(f)?, im: self.im.div(f)? })
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        Complex64::new(self.re.eval_unchecked(t), self.im.eval_unchecked(t))
    }

    pub fn endpoint_limit(&self, end: End) -> Option<Complex64> {
        Some(Complex64::new(self.re.endpoint_limit(end).finite()?, self.im.endpoint_limit(end).finite()?))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.re.max_abs_coeff().max(self.im.max_abs_coeff())
    }
}

fn one_line(f: &RadialFunction) -> String {
    let s = f.to_string();
    let body: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
    if body.is_empty() {
        "0".into()
    } else {
        body.join(" + ")
    }
}

impl fmt::Display for ComplexRadial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", one_line(&self.re)),
            (true, false) => write!(f, "i({})", one_line(&self.im)),
            _ => write!(f, "({}) + i({})", one_line(&self.re), one_line(&self.im)),
        }
    }
}

/// `Σ_m f_m(t) e^{imθ}` with finitely many nonzero modes.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFunction {
    domain: Domain,
    modes: BTreeMap<i64, ComplexRadial>,
}

impl CylinderFunction {
    pub fn zero(domain: Domain) -> Self {
        Self { domain, modes: BTreeMap::new() }
    }

    pub fn constant(domain: Domain, c: f64) -> Self {
        Self::radial(RadialFunction::constant(domain, c))
    }

    /// Mode-0 real function.
    pub fn radial(f: RadialFunction) -> Self {
        Self::fourier(0, ComplexRadial::real(f))
    }

    /// `c(t) e^{imθ}`.
    pub fn fourier(m: i64, c: ComplexRadial) -> Self {
        let mut out = Self::zero(c.domain());
        out.add_mode(m, c);
        out
    }

    pub fn from_modes(domain: Domain, modes: impl IntoIterator<Item = (i64, ComplexRadial)>) -> Result<Self> {
        let mut out = Self::zero(domain);
        for (m, c) in modes {
            if c.domain() != domain {
                return Err(Error::DomainMismatch(format!("mode {m}")));
            }
            out.add_mode(m, c);
        }
        Ok(out)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn modes(&self) -> &BTreeMap<i64, ComplexRadial> {
        &self.modes
    }

    pub fn mode(&self, m: i64) -> Option<&ComplexRadial> {
        self.modes.get(&m)
    }

    pub fn add_mode(&mut self, m: i64, c: ComplexRadial) {
        let sum = match self.modes.remove(&m) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.modes.insert(m, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn vanishes(&self) -> bool {
        self.modes.values().all(ComplexRadial::vanishes)
    }

    /// Only the constant Fourier mode is present.
    pub fn is_radial(&self) -> bool {
        self.modes.keys().all(|&m| m == 0)
    }

    /// `f_{-m} = conj(f_m)` for every mode.
    pub fn is_real(&self) -> bool {
        self.modes.iter().all(|(&m, c)| match self.modes.get(&-m) {
            Some(other) => other.sub(&c.conj()).vanishes(),
            None => c.vanishes(),
        })
    }

    fn map(&self, f: impl Fn(&ComplexRadial) -> ComplexRadial) -> Self {
        let mut out = Self::zero(self.domain);
        for (&m, c) in &self.modes {
            out.add_mode(m, f(c));
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &o.modes {
            out.add_mode(m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(ComplexRadial::neg)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        self.map(|c| c.scale(z))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.domain);
        for (&m, a) in &self.modes {
            for (&n, b) in &o.modes {
                out.add_mode(m + n, a.mul(b));
            }
        }
        out
    }

    pub fn mul_radial(&self, f: &RadialFunction) -> Self {
        self.map(|c| c.mul_real(f))
    }

    pub fn div_radial(&self, f: &RadialFunction) -> Result<Self> {
        let mut out = Self::zero(self.domain);
        for (&m, c) in &self.modes {
            out.add_mode(m, c.div_real(f)?);
        }
        Ok(out)
    }

    pub fn d_t(&self) -> Self {
        self.map(ComplexRadial::derivative)
    }

    /// `∂_θ`: mode `m` is multiplied by `im`.
    pub fn d_theta(&self) -> Self {
        let mut out = Self::zero(self.domain);
        for (&m, c) in &self.modes {
            out.add_mode(m, c.times_i().scale(Complex64::new(m as f64, 0.0)));
        }
        out
    }

    pub fn eval(&self, t: f64, theta: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|(&m, c)| c.eval(t) * Complex64::from_polar(1.0, m as f64 * theta))
            .sum()
    }

    /// Continuous extension to an end; `None` if some mode blows up.
    pub fn endpoint_value(&self, end: End, theta: f64) -> Option<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for (&m, c) in &self.modes {
            sum += c.endpoint_limit(end)? * Complex64::from_polar(1.0, m as f64 * theta);
        }
        Some(sum)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.modes.values().map(ComplexRadial::max_abs_coeff).fold(0.0, f64::max)
    }
}

impl fmt::Display for CylinderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modes.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .modes
            .iter()
            .map(|(&m, c)| if m == 0 { format!("[{c}]") } else { format!("[{c}] e^({m}iθ)") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
