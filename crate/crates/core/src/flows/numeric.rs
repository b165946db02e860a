//! Flow by quadrature of `dt/φ` in a coordinate that straightens the ends.
//!
//! The interval is mapped to `ℝ` by `u = ln(x - lo)` (half-infinite) or
//! `u = logit` (bounded), so that `F' = g(u) = (dx/du)/φ(x)` stays moderate
//! near ends where `φ` vanishes to first order. `σ_s(x)` solves
//! `∫_{u(x)}^v g = s` by bracketed Newton, integrating only the increments.

use super::{FlowMap, NumericWeight, TAU_NUMERIC};
use crate::error::{Error, Result};
use crate::powerfun::End;
use crate::quad::integrate;
use crate::weights::Weight;

const QUAD_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 200;
const MAX_STEP: f64 = 8.0;

#[derive(Clone, Copy, Debug)]
enum Chart {
    Log { lo: f64 },
    Logit { lo: f64, hi: f64 },
}

impl Chart {
    fn to_u(self, x: f64) -> f64 {
        match self {
            Chart::Log { lo } => (x - lo).ln(),
            Chart::Logit { lo, hi } => ((x - lo) / (hi - x)).ln(),
        }
    }

    /// `(x(u), dx/du)`.
    fn from_u(self, u: f64) -> (f64, f64) {
        match self {
            Chart::Log { lo } => {
                let d = u.exp();
                (lo + d, d)
            }
            Chart::Logit { lo, hi } => {
                let len = hi - lo;
                let dlo = len / (1.0 + (-u).exp());
                let dhi = len / (1.0 + u.exp());
                let x = if u <= 0.0 { lo + dlo } else { hi - dhi };
                (x, dlo * dhi / len)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct NumericFlow {
    weight: NumericWeight,
    chart: Chart,
    gamma: f64,
    u_breaks: Vec<f64>,
}

impl NumericFlow {
    pub fn new(weight: NumericWeight) -> Result<Self> {
        let (lo, hi) = weight.interval();
        let (chart, gamma) = if hi.is_infinite() {
            (Chart::Log { lo }, lo + 1.0)
        } else {
            (Chart::Logit { lo, hi }, 0.5 * (lo + hi))
        };
        let mut u_breaks: Vec<f64> = weight
            .breakpoints()
            .iter()
            .filter(|&&b| b > lo && b < hi)
            .map(|&b| chart.to_u(b))
            .collect();
        u_breaks.sort_by(f64::total_cmp);
        let flow = Self { weight, chart, gamma, u_breaks };
        if !(flow.g(0.0) > 0.0) {
            return Err(Error::InvalidWeight(format!("φ not positive at {}", flow.gamma)));
        }
        Ok(flow)
    }

    pub fn weight(&self) -> &NumericWeight {
        &self.weight
    }

    fn g(&self, u: f64) -> f64 {
        let (x, jac) = self.chart.from_u(u);
        jac / self.weight.eval(x)
    }

    fn u_of(&self, x: f64) -> f64 {
        self.chart.to_u(x)
    }

    fn x_of(&self, u: f64) -> Result<f64> {
        let (x, jac) = self.chart.from_u(u);
        let (lo, hi) = self.weight.interval();
        if !(x > lo && x < hi) || jac == 0.0 || !jac.is_finite() {
            return Err(Error::NoConvergence {
                what: format!("flow of {} left the representable interior (u = {u:e})", self.weight.label()),
                iterations: 0,
            });
        }
        Ok(x)
    }

    /// `∫_a^b g`, split at the breakpoints of `φ`.
    fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut total = 0.0;
        let mut left = lo;
        for &c in self.u_breaks.iter().filter(|&&c| c > lo && c < hi) {
            total += integrate(|u| self.g(u), left, c, QUAD_TOL)?;
            left = c;
        }
        total += integrate(|u| self.g(u), left, hi, QUAD_TOL)?;
        Ok(sign * total)
    }

    /// `v` with `∫_{u0}^v g = s`.
    fn solve(&self, u0: f64, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(u0);
        }
        let mut v = u0;
        let mut resid = -s;
        let mut below = f64::NEG_INFINITY;
        let mut above = f64::INFINITY;
        let scale = s.abs().max(1.0);
        for _ in 0..MAX_NEWTON {
            if resid < 0.0 {
                below = v;
            } else {
                above = v;
            }
            let slope = self.g(v);
            let mut step = -resid / slope;
            if !step.is_finite() {
                step = if resid < 0.0 { MAX_STEP } else { -MAX_STEP };
            }
            step = step.clamp(-MAX_STEP, MAX_STEP);
            let mut next = v + step;
            if next == v {
                // the remaining step is below one ulp of v
                return Ok(v);
            }
            if !(next > below && next < above) {
                next = match (below.is_finite(), above.is_finite()) {
                    (true, true) => 0.5 * (below + above),
                    (true, false) => below + MAX_STEP,
                    _ => above - MAX_STEP,
                };
            }
            resid += self.integral(v, next)?;
            let moved = (next - v).abs();
            v = next;
            if resid.abs() <= 1e-14 * scale || moved <= 4.0 * f64::EPSILON * v.abs().max(1.0) {
                return Ok(v);
            }
        }
        Err(Error::NoConvergence { what: format!("flow inversion for {}", self.weight.label()), iterations: MAX_NEWTON })
    }
}

impl FlowMap for NumericFlow {
    fn name(&self) -> &'static str {
        "numeric"
    }

    fn interval(&self) -> (f64, f64) {
        self.weight.interval()
    }

    fn base_point(&self) -> f64 {
        self.gamma
    }

    fn f_map(&self, x: f64) -> Result<f64> {
        if self.classify(x)?.is_some() {
            return Err(Error::NotInterior(x));
        }
        self.integral(self.u_of(self.gamma), self.u_of(x))
    }

    fn f_inverse(&self, y: f64) -> Result<f64> {
        self.x_of(self.solve(self.u_of(self.gamma), y)?)
    }

    fn apply(&self, s: f64, x: f64) -> Result<f64> {
        match self.classify(x)? {
            Some(end) => Ok(end),
            None => self.x_of(self.solve(self.u_of(x), s)?),
        }
    }

    fn endpoint_rate(&self, end: End) -> f64 {
        self.weight.rate(end)
    }

    fn near_zero_model(&self) -> Option<&Weight> {
        self.weight.near_zero()
    }

    fn tolerance(&self) -> f64 {
        TAU_NUMERIC
    }
}
