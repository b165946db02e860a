//! Symmetric tridiagonal eigenproblems.
//!
//! Solvers are [`EigenSolver`] strategies selected by name from an
//! [`EigenRegistry`]: `shift-invert` (Sturm bisection, inverse iteration,
//! Rayleigh refinement) and `dense` (a full symmetric eigendecomposition,
//! used as an oracle on coarse grids).

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidInput(format!("tridiagonal sizes {} and {}", diag.len(), off.len())));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / q };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Solve `(self - mu) x = rhs` by Gaussian elimination with partial
    /// pivoting.
    pub fn solve_shifted(&self, mu: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if n == 1 {
            let d = self.diag[0] - mu;
            if d == 0.0 {
                return Err(Error::SingularShift(format!("{mu}")));
            }
            return Ok(vec![rhs[0] / d]);
        }
        // rows hold (sub, main, super, super2) after pivoting
        let mut dl: Vec<f64> = self.off.clone();
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - mu).collect();
        let mut du: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut b = rhs.to_vec();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    return Err(Error::SingularShift(format!("{mu}")));
                }
                let f = dl[i] / d[i];
                d[i + 1] -= f * du[i];
                b[i + 1] -= f * b[i];
                dl[i] = 0.0;
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du2[i];
                }
                du[i] = tmp;
                b.swap(i, i + 1);
                b[i + 1] -= f * b[i];
            }
        }
        if d[n - 1] == 0.0 {
            return Err(Error::SingularShift(format!("{mu}")));
        }
        let mut x = vec![0.0; n];
        x[n - 1] = b[n - 1] / d[n - 1];
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        Ok(x)
    }

    /// The `j`-th smallest eigenvalue (from 0) by Sturm bisection.
    pub fn eigenvalue(&self, j: usize) -> Result<f64> {
        if j >= self.len() {
            return Err(Error::InvalidInput(format!("eigenvalue {j} of a {}x{} matrix", self.len(), self.len())));
        }
        let (lo, hi) = self.gershgorin();
        let pad = 1.0 + 1e-12 * (lo.abs() + hi.abs());
        let (mut lo, mut hi) = (lo - pad, hi + pad);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖B v - λ v‖ / ‖v‖`.
    pub residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(m: &SymTridiagonal, value: f64, v: &[f64]) -> f64 {
    let bv = m.matvec(v);
    let r: Vec<f64> = bv.iter().zip(v).map(|(a, b)| a - value * b).collect();
    norm(&r) / norm(v)
}

/// Lowest eigenpairs of a symmetric tridiagonal matrix.
pub trait EigenSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn lowest(&self, m: &SymTridiagonal, k: usize) -> Result<Vec<EigenPair>>;
}

/// Sturm bisection for the eigenvalue, inverse iteration from a sine start
/// vector for the eigenvector, Rayleigh quotient for the final value.
#[derive(Clone, Copy, Debug, Default)]
pub struct ShiftInvert;

const INVERSE_STEPS: usize = 8;
/// Residual bound relative to `max(|λ|, 1)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

impl EigenSolver for ShiftInvert {
    fn name(&self) -> &'static str {
        "shift-invert"
    }

    fn lowest(&self, m: &SymTridiagonal, k: usize) -> Result<Vec<EigenPair>> {
        let n = m.len();
        if k > n {
            return Err(Error::InvalidInput(format!("{k} eigenvalues requested from a {n}x{n} matrix")));
        }
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let lambda = m.eigenvalue(j)?;
            let mut v: Vec<f64> = (0..n)
                .map(|i| (std::f64::consts::PI * (j + 1) as f64 * (i + 1) as f64 / (n + 1) as f64).sin())
                .collect();
            let tol = RESIDUAL_TOL * lambda.abs().max(1.0);
            let shift = lambda - 64.0 * f64::EPSILON * lambda.abs().max(1.0);
            let mut best = (f64::INFINITY, lambda, v.clone());
            for _ in 0..INVERSE_STEPS {
                let w = m.solve_shifted(shift, &v)?;
                let nw = norm(&w);
                v = w.iter().map(|x| x / nw).collect();
                let mv = m.matvec(&v);
                let rq: f64 = mv.iter().zip(&v).map(|(a, b)| a * b).sum();
                let r = residual(m, rq, &v);
                if r < best.0 {
                    best = (r, rq, v.clone());
                }
                if r <= 1e-3 * tol {
                    break;
                }
            }
            let (r, value, vector) = best;
            if r > tol {
                return Err(Error::NoConvergence {
                    what: format!("eigenpair {j} (residual {r:e})"),
                    iterations: INVERSE_STEPS,
                });
            }
            out.push(EigenPair { value, vector, residual: r });
        }
        Ok(out)
    }
}

/// Full symmetric eigendecomposition of the densified matrix.
#[derive(Clone, Copy, Debug, Default)]
pub struct DenseOracle;

impl EigenSolver for DenseOracle {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn lowest(&self, m: &SymTridiagonal, k: usize) -> Result<Vec<EigenPair>> {
        let n = m.len();
        if k > n {
            return Err(Error::InvalidInput(format!("{k} eigenvalues requested from a {n}x{n} matrix")));
        }
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = m.diag[i];
            if i + 1 < n {
                a[(i, i + 1)] = m.off[i];
                a[(i + 1, i)] = m.off[i];
            }
        }
        let eig = a.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
        Ok(order
            .into_iter()
            .take(k)
            .map(|c| {
                let value = eig.eigenvalues[c];
                let vector: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
                let residual = residual(m, value, &vector);
                EigenPair { value, vector, residual }
            })
            .collect())
    }
}

pub type EigenBuilder = fn() -> Box<dyn EigenSolver>;

/// Name → eigensolver table.
pub struct EigenRegistry {
    builders: BTreeMap<&'static str, EigenBuilder>,
}

impl Default for EigenRegistry {
    fn default() -> Self {
        let mut reg = Self { builders: BTreeMap::new() };
        reg.register("shift-invert", || Box::new(ShiftInvert));
        reg.register("dense", || Box::new(DenseOracle));
        reg
    }
}

impl EigenRegistry {
    pub const DEFAULT: &'static str = "shift-invert";

    pub fn register(&mut self, name: &'static str, builder: EigenBuilder) {
        self.builders.insert(name, builder);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, name: &str) -> Result<Box<dyn EigenSolver>> {
        self.builders.get(name).map(|b| b()).ok_or_else(|| Error::UnknownStrategy {
            name: name.to_string(),
            available: self.names().collect::<Vec<_>>().join(", "),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    fn exact(n: usize, j: usize) -> f64 {
        let x = std::f64::consts::PI * (j + 1) as f64 / (2.0 * (n + 1) as f64);
        4.0 * x.sin().powi(2)
    }

    #[test]
    fn solvers_agree_with_closed_form() {
        let m = laplacian(50);
        let reg = EigenRegistry::default();
        for name in ["shift-invert", "dense"] {
            let pairs = reg.build(name).unwrap().lowest(&m, 4).unwrap();
            for (j, p) in pairs.iter().enumerate() {
                assert!((p.value - exact(50, j)).abs() < 1e-12, "{name} {j}");
                assert!(p.residual < 1e-10);
            }
        }
        assert!(reg.build("lanczos").is_err());
    }

    #[test]
    fn bisection_by_index() {
        let m = laplacian(30);
        for j in [0, 7, 29] {
            assert!((m.eigenvalue(j).unwrap() - exact(30, j)).abs() < 1e-13);
        }
        assert_eq!(m.sturm_count(exact(30, 5) + 1e-9), 6);
        assert!(m.eigenvalue(30).is_err());
    }

    #[test]
    fn pivoted_solve() {
        let m = SymTridiagonal::new(vec![0.0, 1.0, 3.0, -2.0], vec![2.0, 1.0, 0.5]).unwrap();
        let rhs = [1.0, -2.0, 0.5, 4.0];
        let x = m.solve_shifted(0.25, &rhs).unwrap();
        let back: Vec<f64> = m.matvec(&x).iter().zip(&x).map(|(a, b)| a - 0.25 * b).collect();
        for (a, b) in back.iter().zip(rhs) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
