use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Tolerance for comparing exponents when at least one side is floating.
pub const EXPONENT_TOL: f64 = 1e-12;

/// Number of fractional digits up to which a decimal literal is read as an
/// exact rational.
const MAX_EXACT_DECIMALS: usize = 9;

/// A real exponent, kept as an exact rational whenever the input was one.
#[derive(Clone, Copy, Debug)]
pub enum Exponent {
    Rational(Ratio<i64>),
    Real(f64),
}

impl Exponent {
    pub const ZERO: Exponent = Exponent::Rational(Ratio::new_raw(0, 1));
    pub const ONE: Exponent = Exponent::Rational(Ratio::new_raw(1, 1));

    pub fn int(n: i64) -> Self {
        Exponent::Rational(Ratio::from_integer(n))
    }

    /// `num/den`, reduced. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Rational(Ratio::new(num, den))
    }

    pub fn real(x: f64) -> Self {
        Exponent::Real(x)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Exponent::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Exponent::Real(x) => x,
        }
    }

    pub fn is_rational(self) -> bool {
        matches!(self, Exponent::Rational(_))
    }

    pub fn is_zero(self) -> bool {
        match self {
            Exponent::Rational(r) => r.is_zero(),
            Exponent::Real(x) => x.abs() <= EXPONENT_TOL,
        }
    }

    /// Integer value if the exponent is (within tolerance) an integer.
    pub fn as_integer(self) -> Option<i64> {
        match self {
            Exponent::Rational(r) if r.is_integer() => Some(*r.numer()),
            Exponent::Rational(_) => None,
            Exponent::Real(x) => {
                let r = x.round();
                ((x - r).abs() <= EXPONENT_TOL && r.abs() < 9.0e15).then_some(r as i64)
            }
        }
    }

    /// Key equality: exact for two rationals, tolerance otherwise.
    pub fn approx_eq(self, other: Exponent) -> bool {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= EXPONENT_TOL,
        }
    }

    /// Three-way comparison consistent with [`Exponent::approx_eq`].
    pub fn cmp_approx(self, other: Exponent) -> Ordering {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => a.cmp(&b),
            _ => {
                let d = self.to_f64() - other.to_f64();
                if d.abs() <= EXPONENT_TOL {
                    Ordering::Equal
                } else if d < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    /// Sign of the exponent with tolerance: -1, 0 or 1.
    pub fn signum(self) -> i32 {
        match self.cmp_approx(Exponent::ZERO) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(self) -> Exponent {
        match self {
            Exponent::Rational(r) => Exponent::Rational(r.abs()),
            Exponent::Real(x) => Exponent::Real(x.abs()),
        }
    }

    pub fn max(self, other: Exponent) -> Exponent {
        if self.cmp_approx(other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Exponent) -> Exponent {
        if self.cmp_approx(other) == Ordering::Greater {
            other
        } else {
            self
        }
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(*other)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_approx(*other))
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::int(n)
    }
}

impl From<i32> for Exponent {
    fn from(n: i32) -> Self {
        Exponent::int(n as i64)
    }
}

impl From<f64> for Exponent {
    fn from(x: f64) -> Self {
        Exponent::Real(x)
    }
}

impl From<Ratio<i64>> for Exponent {
    fn from(r: Ratio<i64>) -> Self {
        Exponent::Rational(r)
    }
}

fn rational_op(
    a: Exponent,
    b: Exponent,
    exact: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
    float: impl Fn(f64, f64) -> f64,
) -> Exponent {
    if let (Exponent::Rational(x), Exponent::Rational(y)) = (a, b) {
        if let Some(r) = exact(&x, &y) {
            return Exponent::Rational(r);
        }
    }
    Exponent::Real(float(a.to_f64(), b.to_f64()))
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        rational_op(self, rhs, |x, y| x.checked_add(y), |x, y| x + y)
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Exponent) -> Exponent {
        rational_op(self, rhs, |x, y| x.checked_sub(y), |x, y| x - y)
    }
}

impl Mul for Exponent {
    type Output = Exponent;
    fn mul(self, rhs: Exponent) -> Exponent {
        rational_op(self, rhs, |x, y| x.checked_mul(y), |x, y| x * y)
    }
}

impl Add<i64> for Exponent {
    type Output = Exponent;
    fn add(self, rhs: i64) -> Exponent {
        self + Exponent::int(rhs)
    }
}

impl Sub<i64> for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: i64) -> Exponent {
        self - Exponent::int(rhs)
    }
}

impl Mul<i64> for Exponent {
    type Output = Exponent;
    fn mul(self, rhs: i64) -> Exponent {
        self * Exponent::int(rhs)
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        match self {
            Exponent::Rational(r) => Exponent::Rational(-r),
            Exponent::Real(x) => Exponent::Real(-x),
        }
    }
}

/// Rationals print as `n` or `n/d`; floating exponents always carry an `e`
/// so that they parse back as floating.
impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Exponent::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exponent::Real(x) => write!(f, "{:e}", x),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `3`, `-3/2`, `0.25` (exact decimal) and `2.718281828459045`
    /// or `1e-3` (floating).
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad exponent literal `{s}`"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(Exponent::ratio(n, d));
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Exponent::int(n));
        }
        if s.contains(['e', 'E']) || s.contains("inf") || s.contains("NaN") {
            let x: f64 = s.parse().map_err(|_| bad())?;
            if !x.is_finite() {
                return Err(bad());
            }
            return Ok(Exponent::Real(x));
        }
        if let Some((int_part, frac)) = s.split_once('.') {
            if frac.len() <= MAX_EXACT_DECIMALS && frac.chars().all(|c| c.is_ascii_digit()) {
                let negative = int_part.trim_start().starts_with('-');
                let int_digits = int_part.trim_start_matches(['-', '+']);
                let whole: i64 = if int_digits.is_empty() {
                    0
                } else {
                    int_digits.parse().map_err(|_| bad())?
                };
                let den = 10i64.pow(frac.len() as u32);
                let num_frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
                let mag = whole.checked_mul(den).and_then(|w| w.checked_add(num_frac)).ok_or_else(bad)?;
                let num = if negative { -mag } else { mag };
                return Ok(Exponent::ratio(num, den));
            }
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(bad());
        }
        Ok(Exponent::Real(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_and_real_literals() {
        assert!(matches!("3/2".parse::<Exponent>().unwrap(), Exponent::Rational(r) if r == Ratio::new(3, 2)));
        assert!(matches!("-0.25".parse::<Exponent>().unwrap(), Exponent::Rational(r) if r == Ratio::new(-1, 4)));
        assert!(matches!("2.718281828459045".parse::<Exponent>().unwrap(), Exponent::Real(_)));
        assert!(matches!("1e-1".parse::<Exponent>().unwrap(), Exponent::Real(x) if x == 0.1));
        assert!("1/0".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for e in [Exponent::ratio(-7, 3), Exponent::int(4), Exponent::real(std::f64::consts::E), Exponent::real(0.1)] {
            let back: Exponent = e.to_string().parse().unwrap();
            assert_eq!(e.is_rational(), back.is_rational());
            assert_eq!(e.to_f64().to_bits(), back.to_f64().to_bits());
        }
    }

    #[test]
    fn mixed_arithmetic_degrades_to_real() {
        let a = Exponent::ratio(1, 3) + Exponent::ratio(2, 3);
        assert!(a.is_rational() && a.approx_eq(Exponent::ONE));
        let b = Exponent::ratio(1, 2) + Exponent::real(0.5);
        assert!(!b.is_rational() && b.approx_eq(Exponent::ONE));
        assert_eq!(Exponent::ratio(3, 2).as_integer(), None);
        assert_eq!((Exponent::ratio(3, 2) * 2).as_integer(), Some(3));
    }
}
