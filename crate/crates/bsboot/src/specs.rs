//! Textual prior syntax used on the command line.
//!
//! Centering distributions: `exp:median=10`, `exp:rate=0.07`,
//! `weibull:shape=1.5,scale=10`, `discrete:file=atoms.csv` (columns
//! `time,prob`). Precision functions: `const:1` (or a bare number) and
//! `piecewise:file=c.csv` (columns `upper,value`; the last row's `upper`
//! is ignored and may be `inf`).

use std::collections::HashMap;

use anyhow::{anyhow, bail, Context, Result};
use bsboot_core::{CenteringDistribution, PrecisionFunction};

use crate::io::load_pairs;

fn split_spec(s: &str) -> Result<(&str, HashMap<&str, &str>)> {
    let s = s.trim();
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut params = HashMap::new();
    for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value in '{s}', got '{part}'"))?;
        params.insert(k.trim(), v.trim());
    }
    Ok((kind.trim(), params))
}

fn number(params: &HashMap<&str, &str>, key: &str, spec: &str) -> Result<f64> {
    let raw = params
        .get(key)
        .ok_or_else(|| anyhow!("'{spec}' needs {key}=<number>"))?;
    raw.parse()
        .map_err(|_| anyhow!("cannot parse {key}='{raw}' in '{spec}'"))
}

pub fn parse_centering(spec: &str) -> Result<CenteringDistribution> {
    let (kind, params) = split_spec(spec)?;
    let f = match kind {
        "exp" | "exponential" => {
            if params.contains_key("median") {
                CenteringDistribution::exp_with_median(number(&params, "median", spec)?)?
            } else {
                CenteringDistribution::exponential(number(&params, "rate", spec)?)?
            }
        }
        "weibull" => CenteringDistribution::weibull(
            number(&params, "shape", spec)?,
            number(&params, "scale", spec)?,
        )?,
        "discrete" => {
            let file = params
                .get("file")
                .ok_or_else(|| anyhow!("'{spec}' needs file=<path>"))?;
            let atoms = load_pairs(file).with_context(|| format!("reading atoms from {file}"))?;
            CenteringDistribution::discrete(atoms)?
        }
        other => bail!("unknown centering distribution '{other}' (expected exp, weibull or discrete)"),
    };
    Ok(f)
}

pub fn parse_precision(spec: &str) -> Result<PrecisionFunction> {
    if let Ok(k) = spec.trim().parse::<f64>() {
        return Ok(PrecisionFunction::constant(k)?);
    }
    if let Some(raw) = spec.trim().strip_prefix("const:").or_else(|| spec.trim().strip_prefix("constant:")) {
        let raw = raw.trim();
        let raw = raw.strip_prefix("k=").unwrap_or(raw);
        let k: f64 = raw
            .parse()
            .map_err(|_| anyhow!("expected const:<number>, got '{spec}'"))?;
        return Ok(PrecisionFunction::constant(k)?);
    }
    let (kind, params) = split_spec(spec)?;
    let c = match kind {
        "piecewise" => {
            let file = params
                .get("file")
                .ok_or_else(|| anyhow!("'{spec}' needs file=<path>"))?;
            let rows = load_pairs(file).with_context(|| format!("reading precision from {file}"))?;
            let breakpoints = rows[..rows.len() - 1].iter().map(|r| r.0).collect();
            let values = rows.iter().map(|r| r.1).collect();
            PrecisionFunction::piecewise(breakpoints, values)?
        }
        other => bail!("unknown precision function '{other}' (expected const or piecewise)"),
    };
    Ok(c)
}
