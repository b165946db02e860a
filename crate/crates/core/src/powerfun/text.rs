//! Line-oriented text form: one `coeff * t^p * (1+t)^q` per line.

use std::fmt;

use super::{Domain, Exponent, ExponentPair, RadialFunction};
use crate::error::{Error, Result};

const UNIT_DIRECTIVE: &str = "# domain=unit_interval";

pub(super) fn write(f: &RadialFunction, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let factor = match f.domain {
        Domain::HalfLine => "(1+t)",
        Domain::UnitInterval => "(1-t)",
    };
    if f.terms.is_empty() && f.domain == Domain::UnitInterval {
        return writeln!(out, "{UNIT_DIRECTIVE}");
    }
    for t in &f.terms {
        writeln!(out, "{:?} * t^{} * {}^{}", t.coeff, t.key.p, factor, t.key.q)?;
    }
    Ok(())
}

pub(super) fn parse(s: &str) -> Result<RadialFunction> {
    let mut domain: Option<Domain> = None;
    let mut terms = Vec::new();
    for (lineno, raw) in s.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if line.replace(' ', "") == UNIT_DIRECTIVE.replace(' ', "") {
                set_domain(&mut domain, Domain::UnitInterval, lineno)?;
            }
            continue;
        }
        let bad = |what: &str| Error::Parse(format!("line {}: {what}: `{line}`", lineno + 1));
        let parts: Vec<&str> = line.split('*').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad("expected `coeff * t^p * (1+t)^q`"));
        }
        let coeff: f64 = parts[0].parse().map_err(|_| bad("bad coefficient"))?;
        if !coeff.is_finite() {
            return Err(bad("non-finite coefficient"));
        }
        let p = parts[1].strip_prefix("t^").ok_or_else(|| bad("expected t^p"))?;
        let p: Exponent = strip_parens(p).parse()?;
        let (dom, q) = if let Some(q) = parts[2].strip_prefix("(1+t)^") {
            (Domain::HalfLine, q)
        } else if let Some(q) = parts[2].strip_prefix("(1-t)^") {
            (Domain::UnitInterval, q)
        } else {
            return Err(bad("expected (1+t)^q or (1-t)^q"));
        };
        let q: Exponent = strip_parens(q).parse()?;
        set_domain(&mut domain, dom, lineno)?;
        terms.push((coeff, p, q));
    }
    let mut f = RadialFunction::zero(domain.unwrap_or(Domain::HalfLine));
    for (c, p, q) in terms {
        f.add_term(ExponentPair { p, q }, c);
    }
    Ok(f)
}

fn strip_parens(s: &str) -> &str {
    s.trim().trim_start_matches('(').trim_end_matches(')')
}

fn set_domain(slot: &mut Option<Domain>, d: Domain, lineno: usize) -> Result<()> {
    match slot {
        Some(existing) if *existing != d => {
            Err(Error::Parse(format!("line {}: mixed (1+t) and (1-t) factors", lineno + 1)))
        }
        _ => {
            *slot = Some(d);
            Ok(())
        }
    }
}
