//! Geometric grid and the discretized radial operator.

use super::eigen::{EigenSolver, SymTridiagonal};
use super::SchrodingerProblem;
use crate::error::{Error, Result};
use crate::flows::{ExponentialFlow, FlowMap};
use crate::fmt_f64;

/// Nodes uniform in `s = F(ρ) = ln ρ`: `ρ_i = F⁻¹(s_i)` for the grid weight
/// `φ = t`. `points` counts the unknowns; the two extra nodes at `s_min` and
/// `s_max` carry the Dirichlet condition.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
    nodes: Vec<f64>,
}

impl Default for GeometricGrid {
    fn default() -> Self {
        Self::new(-12.0, 12.0, 4000).expect("default grid is valid")
    }
}

impl GeometricGrid {
    pub fn new(s_min: f64, s_max: f64, points: usize) -> Result<Self> {
        if !(s_min.is_finite() && s_max.is_finite() && s_min < s_max) {
            return Err(Error::InvalidInput(format!("grid bounds [{s_min}, {s_max}]")));
        }
        if points < 3 {
            return Err(Error::InvalidInput(format!("{points} grid points")));
        }
        let flow = ExponentialFlow::new(1.0);
        let h = (s_max - s_min) / (points + 1) as f64;
        let nodes = (0..points + 2)
            .map(|i| flow.f_inverse(s_min + i as f64 * h))
            .collect::<Result<Vec<_>>>()?;
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes[0] <= 0.0 || !nodes[points + 1].is_finite() {
            return Err(Error::InvalidInput(format!("grid [{s_min}, {s_max}] is not resolvable in f64")));
        }
        Ok(Self { s_min, s_max, points, nodes })
    }

    /// Spacing in `s`.
    pub fn h(&self) -> f64 {
        (self.s_max - self.s_min) / (self.points + 1) as f64
    }

    /// All nodes including the two Dirichlet ends.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..=self.points]
    }

    pub fn refined(&self) -> Result<Self> {
        Self::new(self.s_min, self.s_max, 2 * self.points + 1)
    }
}

/// `D^{-1/2} K D^{-1/2}` for `-w'' + W w` with `K` the symmetric stiffness
/// matrix and `D` the dual cell lengths.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub matrix: SymTridiagonal,
    pub cell: Vec<f64>,
    pub potential: Vec<f64>,
    /// Largest `|B_{i,i+1} - B_{i+1,i}|` relative to the entry size.
    pub asymmetry: f64,
}

const SYMMETRY_TOL: f64 = 1e-12;

/// `W(ρ) = V(ρ) + [ℓ(ℓ+n-2) + (n-1)(n-3)/4]/ρ²`, the potential of
/// `w = ρ^{(n-1)/2} u`.
pub fn reduced_potential(prob: &SchrodingerProblem, rho: f64) -> f64 {
    let n = prob.n as f64;
    prob.potential.eval_unchecked(rho) + (prob.angular_eigenvalue() + (n - 1.0) * (n - 3.0) / 4.0) / (rho * rho)
}

pub fn assemble(prob: &SchrodingerProblem, grid: &GeometricGrid) -> Result<Assembled> {
    let x = grid.nodes();
    let n = grid.points;
    let mut cell = Vec::with_capacity(n);
    let mut potential = Vec::with_capacity(n);
    let mut stiff_diag = Vec::with_capacity(n);
    for i in 1..=n {
        let (hm, hp) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        let d = 0.5 * (hm + hp);
        let w = reduced_potential(prob, x[i]);
        if !w.is_finite() {
            return Err(Error::InvalidInput(format!("reduced potential not finite at ρ = {}", x[i])));
        }
        cell.push(d);
        potential.push(w);
        stiff_diag.push(1.0 / hm + 1.0 / hp + w * d);
    }
    let diag: Vec<f64> = stiff_diag.iter().zip(&cell).map(|(k, d)| k / d).collect();
    let mut off = Vec::with_capacity(n - 1);
    let mut asymmetry: f64 = 0.0;
    for i in 0..n - 1 {
        // similarity transform of the row-scaled matrix D⁻¹K, entry by entry
        let right = -1.0 / ((x[i + 2] - x[i + 1]) * cell[i]);
        let left = -1.0 / ((x[i + 2] - x[i + 1]) * cell[i + 1]);
        let upper = right * (cell[i] / cell[i + 1]).sqrt();
        let lower = left * (cell[i + 1] / cell[i]).sqrt();
        asymmetry = asymmetry.max((upper - lower).abs() / upper.abs().max(lower.abs()));
        off.push(0.5 * (upper + lower));
    }
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::PropertyViolation(format!("assembled matrix asymmetric ({asymmetry:e})")));
    }
    Ok(Assembled { matrix: SymTridiagonal::new(diag, off)?, cell, potential, asymmetry })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    pub l: u32,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub points: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub solver: String,
}

/// The `k` lowest eigenvalues of the sector operator on the grid.
pub fn assemble_and_solve(
    prob: &SchrodingerProblem,
    grid: &GeometricGrid,
    k: usize,
    solver: &dyn EigenSolver,
) -> Result<SpectralResult> {
    let a = assemble(prob, grid)?;
    let pairs = solver.lowest(&a.matrix, k)?;
    Ok(SpectralResult {
        l: prob.l,
        eigenvalues: pairs.iter().map(|p| p.value).collect(),
        residuals: pairs.iter().map(|p| p.residual).collect(),
        points: grid.points,
        s_min: grid.s_min,
        s_max: grid.s_max,
        solver: solver.name().to_string(),
    })
}

pub fn spectrum_csv(results: &[SpectralResult]) -> String {
    let mut out = String::from("l,index,eigenvalue,residual,grid_points,s_min,s_max\n");
    for r in results {
        for (idx, (e, res)) in r.eigenvalues.iter().zip(&r.residuals).enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.l,
                idx,
                fmt_f64(*e),
                fmt_f64(*res),
                r.points,
                fmt_f64(r.s_min),
                fmt_f64(r.s_max)
            ));
        }
    }
    out
}
