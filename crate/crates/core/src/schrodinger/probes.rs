//! Parametrix residuals and resolvent norms on grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::SymTridiagonal;
use super::grid::{assemble, GeometricGrid};
use super::{prefactored_operator, PrefactorConvention, SchrodingerProblem};
use crate::diffop::{parametrix_1d, remainder_symbol, DiffOp, RationalSymbol};
use crate::error::{Error, Result};
use crate::flows::{FlowMap, NumericFlow, NumericWeight};
use crate::fmt_f64;
use crate::groupoid::{kernel_conjugate, DefiningFunctions, KernelFunction, KernelSample};
use crate::powerfun::RadialFunction;

/// Settings of the parametrix residual study.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametrixConfig {
    /// Numbers of parametrix terms.
    pub orders: Vec<usize>,
    /// Fourier cutoffs `K`: test functions carry frequencies `K/2 ≤ |ξ| ≤ K`.
    pub cutoffs: Vec<f64>,
    /// Periodic window in the flow coordinate `s` of the global weight.
    pub window: (f64, f64),
    pub samples: usize,
    pub test_functions: usize,
    pub seed: u64,
    pub convention: PrefactorConvention,
}

impl Default for ParametrixConfig {
    fn default() -> Self {
        Self {
            orders: vec![0, 1, 2],
            cutoffs: vec![16.0, 32.0],
            window: (-4.0, 4.0),
            samples: 128,
            test_functions: 4,
            seed: 7,
            convention: PrefactorConvention::Squared,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParametrixRow {
    pub order: usize,
    pub cutoff: f64,
    /// `max_f ‖R_N f‖ / ‖f‖` for `R_N = P Q_N - I`.
    pub residual_ratio: f64,
    /// The same for `M⁻¹ R_N M`, `M` the prefactor, i.e. the remainder of
    /// `H (Q_N M)` against the identity.
    pub conjugated_ratio: f64,
}

/// The sector operator `M·H` with `Δ_S` replaced by `-ℓ(ℓ+n-2)`.
pub fn sector_operator(prob: &SchrodingerProblem, convention: PrefactorConvention) -> Result<DiffOp> {
    let full = prefactored_operator(prob, convention)?;
    let mut plain: Vec<_> = full.plain().iter().map(|(&k, c)| (k, c.clone())).collect();
    let angular = plain.iter().position(|(k, _)| *k == (0, 2));
    if let Some(idx) = angular {
        let (_, c) = plain.remove(idx);
        let shift = c.scale(Complex64::new(-prob.angular_eigenvalue(), 0.0));
        match plain.iter_mut().find(|(k, _)| *k == (0, 0)) {
            Some((_, c0)) => *c0 = c0.add(&shift),
            None => plain.push(((0, 0), shift)),
        }
    }
    DiffOp::from_plain(full.phi(), full.psi(), plain)
}

struct Band {
    xi: Vec<f64>,
}

impl Band {
    fn new(cutoff: f64, length: f64, samples: usize) -> Result<Self> {
        let step = 2.0 * PI / length;
        let lo = (0.5 * cutoff / step).ceil() as i64;
        let hi = (cutoff / step).floor() as i64;
        if lo > hi {
            return Err(Error::InvalidInput(format!("no frequencies in [{}, {cutoff}]", 0.5 * cutoff)));
        }
        if 2 * hi as usize >= samples {
            return Err(Error::InvalidInput(format!("{samples} samples cannot resolve cutoff {cutoff}")));
        }
        let xi = (lo..=hi).flat_map(|k| [k as f64 * step, -(k as f64) * step]).collect();
        Ok(Self { xi })
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kernel matrix of `Op(r)` restricted to the band: row `i`, column `j`.
fn band_kernel(r: &RationalSymbol, ts: &[f64], ss: &[f64], band: &Band) -> Vec<Vec<Complex64>> {
    let m = ss.len() as f64;
    ts.iter()
        .zip(ss)
        .map(|(&t, &si)| {
            let sym: Vec<Complex64> = band.xi.iter().map(|&xi| r.eval(t, xi)).collect();
            ss.iter()
                .map(|&sj| {
                    band.xi.iter().zip(&sym).map(|(&xi, a)| a * Complex64::from_polar(1.0, xi * (si - sj))).sum::<Complex64>()
                        / m
                })
                .collect()
        })
        .collect()
}

fn apply(kernel: &[Vec<Complex64>], f: &[Complex64]) -> Vec<Complex64> {
    kernel.iter().map(|row| row.iter().zip(f).map(|(k, x)| k * x).sum()).collect()
}

/// `ζ₀^t ζ_∞^{t'}` on every grid pair, through the cocycle of the flow.
fn conjugation_factors(
    flow: &dyn FlowMap,
    ts: &[f64],
    ss: &[f64],
    exponents: (f64, f64),
) -> Result<Vec<Vec<f64>>> {
    let mut samples = Vec::with_capacity(ss.len() * ss.len());
    for &si in ss {
        for (&tj, &sj) in ts.iter().zip(ss) {
            samples.push(KernelSample { x: tj, s: si - sj, angle: 0.0, value: Complex64::new(1.0, 0.0) });
        }
    }
    let unit = KernelFunction::new("flow", samples)?;
    let conj = kernel_conjugate(&unit, exponents.0, exponents.1, flow, DefiningFunctions::Rational)?;
    Ok(conj.samples.chunks(ss.len()).map(|row| row.iter().map(|k| k.value.re).collect()).collect())
}

/// Residual ratios of the `N`-term parametrix of the prefactored sector
/// operator, for every `(N, K)` of the configuration.
pub fn parametrix_residual(prob: &SchrodingerProblem, cfg: &ParametrixConfig) -> Result<Vec<ParametrixRow>> {
    let op = sector_operator(prob, cfg.convention)?;
    let phi = op.phi().clone();
    let flow = NumericFlow::new(NumericWeight::from_ring(&phi)?)?;
    let (a, b) = cfg.window;
    if !(a < b) || cfg.samples < 8 || cfg.test_functions == 0 {
        return Err(Error::InvalidInput("parametrix window, samples or test set".into()));
    }
    let length = b - a;
    let ss: Vec<f64> = (0..cfg.samples).map(|i| a + length * i as f64 / cfg.samples as f64).collect();
    let ts = ss.iter().map(|&s| flow.f_inverse(s)).collect::<Result<Vec<f64>>>()?;
    let (e0, e1) = cfg.convention.exponents(prob);
    let factors = conjugation_factors(&flow, &ts, &ss, (e0.to_f64(), e1.to_f64()))?;
    let max_order = cfg.orders.iter().copied().max().unwrap_or(0);
    let full = parametrix_1d(&op, max_order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for &cutoff in &cfg.cutoffs {
        if 0.5 * cutoff < full.radius {
            return Err(Error::SingularSymbol(format!(
                "cutoff {cutoff} reaches below the symbol radius {:.3}",
                full.radius
            )));
        }
        let band = Band::new(cutoff, length, cfg.samples)?;
        let tests: Vec<Vec<Complex64>> = (0..cfg.test_functions)
            .map(|_| {
                let coeffs: Vec<Complex64> =
                    band.xi.iter().map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                ss.iter()
                    .map(|&s| band.xi.iter().zip(&coeffs).map(|(&xi, c)| c * Complex64::from_polar(1.0, xi * s)).sum())
                    .collect()
            })
            .collect();
        for &order in &cfg.orders {
            let mut par = full.clone();
            par.terms.truncate(order);
            let r = remainder_symbol(&par);
            let kernel = band_kernel(&r, &ts, &ss, &band);
            let conjugated: Vec<Vec<Complex64>> = kernel
                .iter()
                .zip(&factors)
                .map(|(row, z)| row.iter().zip(z).map(|(k, f)| k * f).collect())
                .collect();
            let mut plain_ratio: f64 = 0.0;
            let mut conj_ratio: f64 = 0.0;
            for f in &tests {
                let nf = l2(f);
                plain_ratio = plain_ratio.max(l2(&apply(&kernel, f)) / nf);
                conj_ratio = conj_ratio.max(l2(&apply(&conjugated, f)) / nf);
            }
            rows.push(ParametrixRow { order, cutoff, residual_ratio: plain_ratio, conjugated_ratio: conj_ratio });
        }
    }
    Ok(rows)
}

pub fn parametrix_csv(rows: &[ParametrixRow]) -> String {
    let mut out = String::from("N,K,residual_ratio,conjugated_ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.order,
            fmt_f64(r.cutoff),
            fmt_f64(r.residual_ratio),
            fmt_f64(r.conjugated_ratio)
        ));
    }
    out
}

/// Which operator the resolvent probe discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeOperator {
    /// `H = -Δ + V` on the sector.
    Hamiltonian,
    /// `M·H`, `M` the prefactor; self-adjoint in `L²(M⁻¹ dρ)`, where its
    /// norms are measured.
    Prefactored(PrefactorConvention),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolventRow {
    pub i: u32,
    pub j: u32,
    pub coarse: f64,
    pub fine: f64,
}

impl ResolventRow {
    pub fn ratio(&self) -> f64 {
        self.fine / self.coarse
    }

    /// The boundedness proxy: refinement changes the norm by at most 2×.
    pub fn stable(&self) -> bool {
        (0.5..=2.0).contains(&self.ratio())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventReport {
    pub z: Complex64,
    pub operator: ProbeOperator,
    /// `dist(z, σ(H))` over both grids.
    pub distance: f64,
    pub points: (usize, usize),
    pub rows: Vec<ResolventRow>,
}

impl ResolventReport {
    /// `z` is at least 0.1 away from every computed eigenvalue.
    pub fn separated(&self) -> bool {
        self.distance >= 0.1
    }
}

fn probe_matrix(prob: &SchrodingerProblem, grid: &GeometricGrid, operator: ProbeOperator) -> Result<SymTridiagonal> {
    let mut m = assemble(prob, grid)?.matrix;
    if let ProbeOperator::Prefactored(conv) = operator {
        let pre: RadialFunction = conv.prefactor(&prob.global_phi());
        let w: Vec<f64> = grid.interior().iter().map(|&x| pre.eval_unchecked(x)).collect();
        for (d, wi) in m.diag.iter_mut().zip(&w) {
            *d *= wi;
        }
        for (i, o) in m.off.iter_mut().enumerate() {
            *o *= (w[i] * w[i + 1]).sqrt();
        }
    }
    Ok(m)
}

/// Real maximizers of `|λ|^p / |λ - z|` (and `Re z`).
fn critical_points(z: Complex64, p: i32) -> Vec<f64> {
    let (x, y) = (z.re, z.im);
    let mut out = vec![x, 0.0];
    match p {
        1 if x != 0.0 => out.push(x + y * y / x),
        2 => {
            // λ² - 3xλ + 2x² + 2y² = 0
            let disc = x * x - 8.0 * y * y;
            if disc >= 0.0 {
                out.push(0.5 * (3.0 * x + disc.sqrt()));
                out.push(0.5 * (3.0 * x - disc.sqrt()));
            }
        }
        _ => {}
    }
    out
}

/// Eigenvalues on both sides of each point, plus both ends of the spectrum.
/// `λ ↦ |λ|^p/|λ - z|` is monotone between its critical points, so its
/// maximum over the spectrum is attained among these.
fn candidate_eigenvalues(m: &SymTridiagonal, points: &[f64]) -> Result<Vec<f64>> {
    let n = m.len();
    let mut idx = vec![0, n - 1];
    for &c in points {
        let below = m.sturm_count(c);
        if below > 0 {
            idx.push(below - 1);
        }
        if below < n {
            idx.push(below);
        }
    }
    idx.sort_unstable();
    idx.dedup();
    idx.into_iter().map(|j| m.eigenvalue(j)).collect()
}

fn resolvent_norm(m: &SymTridiagonal, z: Complex64, p: i32) -> Result<(f64, f64)> {
    let cands = candidate_eigenvalues(m, &critical_points(z, p))?;
    let dist = cands.iter().map(|&l| (l - z).norm()).fold(f64::INFINITY, f64::min);
    let norm = cands.iter().map(|&l| l.abs().powi(p) / (l - z).norm()).fold(0.0, f64::max);
    Ok((norm, dist))
}

/// `‖A^i (A - z)^{-1} A^j‖ = max_λ |λ|^{i+j} / |λ - z|` for `i, j ≤ 1`, on
/// the grid and on its refinement.
pub fn resolvent_probe(
    prob: &SchrodingerProblem,
    grid: &GeometricGrid,
    z: Complex64,
    operator: ProbeOperator,
) -> Result<ResolventReport> {
    let fine_grid = grid.refined()?;
    let coarse = probe_matrix(prob, grid, operator)?;
    let fine = probe_matrix(prob, &fine_grid, operator)?;
    let mut distance = f64::INFINITY;
    let mut rows = Vec::with_capacity(4);
    for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        let (c, dc) = resolvent_norm(&coarse, z, i + j)?;
        let (f, df) = resolvent_norm(&fine, z, i + j)?;
        distance = distance.min(dc).min(df);
        rows.push(ResolventRow { i: i as u32, j: j as u32, coarse: c, fine: f });
    }
    if distance <= 1e-12 * z.norm().max(1.0) {
        return Err(Error::SingularShift(format!("{z} (distance {distance:e} to the spectrum)")));
    }
    Ok(ResolventReport { z, operator, distance, points: (grid.points, fine_grid.points), rows })
}

pub fn resolvent_csv(report: &ResolventReport) -> String {
    let mut out = String::from("i,j,norm_coarse,norm_fine,ratio\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.i,
            r.j,
            fmt_f64(r.coarse),
            fmt_f64(r.fine),
            fmt_f64(r.ratio())
        ));
    }
    out
}
