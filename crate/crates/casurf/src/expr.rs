//! Numbers on the command line and in definition files: plain decimals or
//! rational multiples of pi (`pi/4`, `-2pi/3`, `0.5*pi`).

use crate::error::{CliError, Result};
use serde::Deserialize;
use std::f64::consts::PI;

pub fn parse_real(text: &str) -> Result<f64> {
    let bad = || CliError::Number(text.to_string());
    let compact: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let Some(at) = compact.find("pi") else {
        return compact.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    };
    let (head, tail) = (&compact[..at], &compact[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = match tail {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?,
    };
    Ok(coeff * PI / denom)
}

/// clap value parser for [`parse_real`].
pub fn real_arg(text: &str) -> std::result::Result<f64, String> {
    parse_real(text).map_err(|e| e.to_string())
}

/// A number written either as a TOML float/integer or as a string
/// accepted by [`parse_real`].
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Number(f64),
    Text(String),
}

impl Real {
    pub fn value(&self) -> Result<f64> {
        match self {
            Real::Number(x) => Ok(*x),
            Real::Text(t) => parse_real(t),
        }
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Number(x)
    }
}

/// Parses `NxM` into node counts.
pub fn parse_grid(text: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got `{text}`"))?;
    let n = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let m = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    if n < 2 || m < 2 {
        return Err(format!("grid needs at least 2x2 nodes, got {n}x{m}"));
    }
    Ok((n, m))
}

/// Parses `u0:u1,v0:v1`.
pub fn parse_domain(text: &str) -> std::result::Result<[(f64, f64); 2], String> {
    let (u, v) = text
        .split_once(',')
        .ok_or_else(|| format!("expected u0:u1,v0:v1, got `{text}`"))?;
    let range = |s: &str| -> std::result::Result<(f64, f64), String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got `{s}`"))?;
        let (a, b) = (real_arg(a)?, real_arg(b)?);
        if a < b {
            Ok((a, b))
        } else {
            Err(format!("range `{s}` must be increasing"))
        }
    };
    Ok([range(u)?, range(v)?])
}

/// Comma-separated numbers on the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberList(pub Vec<f64>);

/// Parses a comma-separated list of numbers.
pub fn parse_list(text: &str) -> std::result::Result<NumberList, String> {
    text.split(',')
        .map(|t| real_arg(t.trim()))
        .collect::<std::result::Result<_, _>>()
        .map(NumberList)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_expressions() {
        assert_eq!(parse_real("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_real("-2pi/3").unwrap(), -2.0 * PI / 3.0);
        assert_eq!(parse_real("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_real(" PI ").unwrap(), PI);
        assert_eq!(parse_real("1.25").unwrap(), 1.25);
        assert!(parse_real("pi/0").is_err());
        assert!(parse_real("pie").is_err());
        assert!(parse_real("nan").is_err());
    }

    #[test]
    fn grid_and_domain() {
        assert_eq!(parse_grid("100x20").unwrap(), (100, 20));
        assert!(parse_grid("1x20").is_err());
        assert_eq!(parse_domain("0:2pi,-1:1").unwrap(), [(0.0, 2.0 * PI), (-1.0, 1.0)]);
        assert!(parse_domain("1:0,0:1").is_err());
        assert_eq!(parse_list("0, pi, 1").unwrap().0, vec![0.0, PI, 1.0]);
    }
}
