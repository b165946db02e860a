//! The TOML run file. Every table rejects unknown keys; numbers are checked
//! against explicit ranges after parsing.

use std::str::FromStr;

use cabcalc::powerfun::{Domain, Exponent, RadialFunction};
use cabcalc::schrodinger::{ParametrixConfig, PrefactorConvention, SchrodingerProblem};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Classify,
    Membership,
    Flow,
    Spectrum,
    Parametrix,
    Resolvent,
    Selftest,
}

impl Command {
    pub fn default_output(self) -> &'static str {
        match self {
            Command::Classify => "classify.txt",
            Command::Membership => "membership.txt",
            Command::Flow => "flow.csv",
            Command::Spectrum => "spectrum.csv",
            Command::Parametrix => "parametrix.csv",
            Command::Resolvent => "resolvent.csv",
            Command::Selftest => "selftest.txt",
        }
    }
}

/// A number written either as an integer or a float.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
}

impl Num {
    fn get(self) -> f64 {
        match self {
            Num::Int(n) => n as f64,
            Num::Float(x) => x,
        }
    }
}

/// An exponent: a rational literal such as `"3/2"`, an integer, or a float.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ExponentLit {
    Text(String),
    Int(i64),
    Float(f64),
}

impl ExponentLit {
    fn parse(&self, key: &str) -> Result<Exponent, String> {
        match self {
            ExponentLit::Text(s) => Exponent::from_str(s.trim()).map_err(|e| format!("`{key}`: {e}")),
            ExponentLit::Int(n) => Ok(Exponent::int(*n)),
            ExponentLit::Float(x) if x.is_finite() => Ok(Exponent::real(*x)),
            ExponentLit::Float(x) => Err(format!("`{key}`: {x} is not finite")),
        }
    }
}

/// `l = 2` or `l = [0, 1, 2]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Sectors {
    One(u32),
    Many(Vec<u32>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub preset: Option<String>,
    pub n: Option<u32>,
    pub gamma: Option<ExponentLit>,
    pub gamma_prime: Option<ExponentLit>,
    /// `[coeff, p, q]` triples of `coeff ρ^p (1+ρ)^q`.
    pub potential: Option<Vec<(Num, ExponentLit, ExponentLit)>>,
    pub l: Option<Sectors>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub s_min: Option<Num>,
    pub s_max: Option<Num>,
    pub points: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveBlock {
    pub num_eigs: Option<usize>,
    pub tolerance: Option<Num>,
    pub solver: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowBlock {
    pub strategy: Option<String>,
    /// `[coeff, p, q]` triples of the weight; defaults to the problem's
    /// global weight.
    pub weight: Option<Vec<(Num, ExponentLit, ExponentLit)>>,
    pub s: Option<Num>,
    pub x: Option<Vec<Num>>,
    pub x_min: Option<Num>,
    pub x_max: Option<Num>,
    pub count: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametrixBlock {
    pub orders: Option<Vec<usize>>,
    pub cutoffs: Option<Vec<Num>>,
    pub window: Option<(Num, Num)>,
    pub samples: Option<usize>,
    pub test_functions: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventBlock {
    /// `[re, im]`.
    pub z: Option<(Num, Num)>,
    pub operator: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub output: Option<String>,
    pub prefactor: Option<String>,
    pub problem: Option<ProblemBlock>,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub solve: SolveBlock,
    #[serde(default)]
    pub flow: FlowBlock,
    #[serde(default)]
    pub parametrix: ParametrixBlock,
    #[serde(default)]
    pub resolvent: ResolventBlock,
}

pub fn parse(text: &str) -> Result<RunConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

fn in_range(key: &str, x: f64, lo: f64, hi: f64) -> Result<f64, String> {
    if x.is_finite() && x >= lo && x <= hi {
        Ok(x)
    } else {
        Err(format!("`{key}` = {x} outside [{lo}, {hi}]"))
    }
}

fn count_in_range(key: &str, n: usize, lo: usize, hi: usize) -> Result<usize, String> {
    if (lo..=hi).contains(&n) {
        Ok(n)
    } else {
        Err(format!("`{key}` = {n} outside [{lo}, {hi}]"))
    }
}

pub fn terms(key: &str, list: &[(Num, ExponentLit, ExponentLit)]) -> Result<RadialFunction, String> {
    let mut out = Vec::with_capacity(list.len());
    for (k, (c, p, q)) in list.iter().enumerate() {
        let c = c.get();
        if !c.is_finite() {
            return Err(format!("`{key}[{k}]`: coefficient {c} is not finite"));
        }
        out.push((c, p.parse(&format!("{key}[{k}].p"))?, q.parse(&format!("{key}[{k}].q"))?));
    }
    Ok(RadialFunction::from_terms(Domain::HalfLine, out))
}

impl RunConfig {
    pub fn output_name(&self) -> &str {
        self.output.as_deref().unwrap_or(self.command.default_output())
    }

    pub fn convention(&self) -> Result<PrefactorConvention, String> {
        match &self.prefactor {
            None => Ok(PrefactorConvention::default()),
            Some(s) => s.parse().map_err(|e| format!("`prefactor`: {e}")),
        }
    }

    /// One problem per requested `ℓ`. Construction errors from the calculus
    /// (such as a potential that is too singular) are returned as they are.
    pub fn problems(&self) -> Result<Result<Vec<SchrodingerProblem>, cabcalc::Error>, String> {
        let block = self.problem.as_ref().ok_or("missing [problem] table")?;
        let sectors = match &block.l {
            None => vec![0],
            Some(Sectors::One(l)) => vec![*l],
            Some(Sectors::Many(ls)) if !ls.is_empty() => ls.clone(),
            Some(Sectors::Many(_)) => return Err("`problem.l` is empty".into()),
        };
        for &l in &sectors {
            count_in_range("problem.l", l as usize, 0, 200)?;
        }
        if let Some(preset) = &block.preset {
            if block.n.is_some() || block.gamma.is_some() || block.gamma_prime.is_some() || block.potential.is_some() {
                return Err("`problem.preset` excludes n, gamma, gamma_prime and potential".into());
            }
            let build: fn(u32) -> SchrodingerProblem = match preset.as_str() {
                "hydrogen" => SchrodingerProblem::hydrogen,
                "oscillator" => SchrodingerProblem::oscillator,
                other => return Err(format!("`problem.preset`: unknown preset `{other}` (hydrogen, oscillator)")),
            };
            return Ok(Ok(sectors.into_iter().map(build).collect()));
        }
        let n = count_in_range("problem.n", block.n.ok_or("missing `problem.n`")? as usize, 2, 64)? as u32;
        let gamma = block.gamma.as_ref().ok_or("missing `problem.gamma`")?.parse("problem.gamma")?;
        let gamma_prime = block.gamma_prime.as_ref().ok_or("missing `problem.gamma_prime`")?.parse("problem.gamma_prime")?;
        in_range("problem.gamma", gamma.to_f64(), 0.0, 16.0)?;
        in_range("problem.gamma_prime", gamma_prime.to_f64(), -16.0, 16.0)?;
        let potential = terms("problem.potential", block.potential.as_deref().unwrap_or(&[]))?;
        Ok(sectors
            .into_iter()
            .map(|l| SchrodingerProblem::new(n, gamma, gamma_prime, potential.clone(), l))
            .collect())
    }

    pub fn grid(&self) -> Result<(f64, f64, usize), String> {
        let g = &self.grid;
        let s_min = in_range("grid.s_min", g.s_min.map_or(-12.0, Num::get), -700.0, 700.0)?;
        let s_max = in_range("grid.s_max", g.s_max.map_or(12.0, Num::get), -700.0, 700.0)?;
        if s_min >= s_max {
            return Err(format!("`grid.s_min` = {s_min} must be below `grid.s_max` = {s_max}"));
        }
        let points = count_in_range("grid.points", g.points.unwrap_or(4000), 3, 5_000_000)?;
        Ok((s_min, s_max, points))
    }

    pub fn num_eigs(&self, points: usize) -> Result<usize, String> {
        count_in_range("solve.num_eigs", self.solve.num_eigs.unwrap_or(3), 1, points.min(1000))
    }

    pub fn tolerance(&self) -> Result<f64, String> {
        let t = self.solve.tolerance.map_or(1e-8, Num::get);
        if t > 0.0 && t <= 1.0 {
            Ok(t)
        } else {
            Err(format!("`solve.tolerance` = {t} outside (0, 1]"))
        }
    }

    pub fn parametrix_config(&self) -> Result<ParametrixConfig, String> {
        let b = &self.parametrix;
        let mut cfg = ParametrixConfig { convention: self.convention()?, ..ParametrixConfig::default() };
        if let Some(orders) = &b.orders {
            if orders.is_empty() {
                return Err("`parametrix.orders` is empty".into());
            }
            for &n in orders {
                count_in_range("parametrix.orders", n, 0, 8)?;
            }
            cfg.orders = orders.clone();
        }
        if let Some(cutoffs) = &b.cutoffs {
            if cutoffs.is_empty() {
                return Err("`parametrix.cutoffs` is empty".into());
            }
            cfg.cutoffs = cutoffs.iter().map(|k| in_range("parametrix.cutoffs", k.get(), 1.0, 1e4)).collect::<Result<_, _>>()?;
        }
        if let Some((a, b)) = b.window {
            let (a, b) = (in_range("parametrix.window", a.get(), -700.0, 700.0)?, in_range("parametrix.window", b.get(), -700.0, 700.0)?);
            if a >= b {
                return Err("`parametrix.window` must be increasing".into());
            }
            cfg.window = (a, b);
        }
        if let Some(n) = b.samples {
            cfg.samples = count_in_range("parametrix.samples", n, 8, 1 << 14)?;
        }
        if let Some(n) = b.test_functions {
            cfg.test_functions = count_in_range("parametrix.test_functions", n, 1, 256)?;
        }
        if let Some(seed) = b.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}
