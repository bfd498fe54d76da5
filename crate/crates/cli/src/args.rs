//! Parsing helpers: complex numbers and `key = value` config files.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use expchaos::dynamics::ComplexPoint;

/// Parses `1.5`, `-2e-3`, `3i`, `-i`, `2+7i`, `0.3-1.2i` or `2,7`.
pub fn parse_complex(text: &str) -> Result<ComplexPoint> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty complex number");
    }
    if let Some((re, im)) = s.split_once(',') {
        return Ok(ComplexPoint::new(real(re)?, real(im)?));
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Ok(ComplexPoint::new(real(&s)?, 0.0));
    };
    // The imaginary part starts at the last sign that is not an exponent sign.
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => real(x)?,
    };
    Ok(ComplexPoint::new(re, im))
}

fn real(s: &str) -> Result<f64> {
    let x: f64 = s.parse().map_err(|_| anyhow!("not a number: {s:?}"))?;
    if !x.is_finite() {
        bail!("not a finite number: {s:?}");
    }
    Ok(x)
}

/// Values from a `--config` file. Keys are flag names; `_` and `-` are interchangeable.
#[derive(Debug, Default)]
pub struct Config {
    values: HashMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected `key = value`", n + 1))?;
            values.insert(normalize(k), v.trim().trim_matches('"').to_string());
        }
        Ok(Config { values })
    }

    /// Fails on keys that no setting of the running command reads.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        let mut unknown: Vec<&String> = self.values.keys().filter(|k| !known.contains(&k.as_str())).collect();
        unknown.sort();
        match unknown.first() {
            Some(k) => bail!("unknown config key {k:?}"),
            None => Ok(()),
        }
    }

    /// The flag if given, else the config value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| anyhow!("config key {key}: cannot parse {v:?}")),
        }
    }

    pub fn pick_complex(&self, flag: Option<ComplexPoint>, key: &str) -> Result<Option<ComplexPoint>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values.get(key).map(|v| parse_complex(v)).transpose()
    }
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}
