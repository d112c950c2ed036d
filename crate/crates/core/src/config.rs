//! Run configuration: a plain `key = value` file, overridden key by key from
//! the command line.

use std::path::PathBuf;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::rational::parse_rational;

/// Largest lattice area accepted; `tau` matrices and coset loops grow as `a^2`.
pub const MAX_A: i64 = 64;
/// Coefficient window `|j|, |k| <= 4` used by the verification suites.
pub const VERIFY_INDEX_RADIUS: i64 = 4;

pub const KEYS: &[&str] = &["D", "G", "J", "alpha", "beta", "rank", "L", "eps", "seed", "threads", "out"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Hermite truncation `D`.
    pub dim: usize,
    /// Omega grid points per axis.
    pub g: usize,
    /// Zak truncation; tail rule when absent.
    pub j: Option<i64>,
    pub alpha: Option<Rational64>,
    pub beta: Option<Rational64>,
    /// Rank of the Hermite projector fed to the pipeline (0 is the zero operator).
    pub rank: usize,
    /// Window half-width `L`.
    pub half_width: f64,
    pub eps: Vec<f64>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 64,
            g: 64,
            j: None,
            alpha: None,
            beta: None,
            rank: 1,
            half_width: 4.0,
            eps: vec![1e-1, 1e-2, 1e-3],
            seed: 0,
            threads: None,
            out: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("{key} = {value:?}: {e}")))
}

/// Splits `key = value` lines. Blank lines and `#` comments are skipped;
/// repeated keys are an error.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse(format!("line {}: expected `key = value`, got {line:?}", i + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key or value", i + 1)));
        }
        if out.iter().any(|(seen, _)| seen == k) {
            return Err(Error::Parse(format!("line {}: duplicate key {k:?}", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

impl RunConfig {
    /// Parses a config file on top of the defaults (not yet validated).
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, v) in parse_pairs(text)? {
            cfg.set(&k, &v)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "D" => self.dim = parse_num(key, value)?,
            "G" => self.g = parse_num(key, value)?,
            "J" => self.j = Some(parse_num(key, value)?),
            "alpha" => self.alpha = Some(parse_rational(value)?),
            "beta" => self.beta = Some(parse_rational(value)?),
            "rank" => self.rank = parse_num(key, value)?,
            "L" => self.half_width = parse_num(key, value)?,
            "eps" => {
                self.eps = value
                    .split(',')
                    .map(|s| parse_num::<f64>(key, s))
                    .collect::<Result<_>>()?
            }
            "seed" => self.seed = parse_num(key, value)?,
            "threads" => self.threads = Some(parse_num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            _ => return Err(Error::Parse(format!("unknown key {key:?}; expected one of {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// `N = alpha Z x beta Z`; absent values default to `alpha = rank + 1`,
    /// `beta = 1`.
    pub fn lattice(&self) -> Result<LatticeSpec> {
        let alpha = self.alpha.unwrap_or_else(|| Rational64::from_integer(self.rank as i64 + 1));
        let beta = self.beta.unwrap_or_else(|| Rational64::from_integer(1));
        LatticeSpec::new(alpha, beta)
    }

    /// Cells per axis of the `alpha(X)` window: 32 per unit half-width.
    pub fn cells(&self) -> usize {
        (32.0 * self.half_width).round() as usize
    }

    /// Aliasing bound of an Omega grid with `G` points for area `a`.
    pub fn index_bound(g: usize, a: i64) -> i64 {
        let g = g as i64;
        if a >= 2 {
            g
        } else {
            g / 2
        }
    }

    pub fn validate(&self) -> Result<LatticeSpec> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.dim < 6 {
            return bad(format!("D = {} too small; the suites use h_0..h_5", self.dim));
        }
        if self.g < 2 {
            return bad(format!("G = {} must be at least 2", self.g));
        }
        if let Some(j) = self.j {
            if j < 0 {
                return bad(format!("J = {j} must be non-negative"));
            }
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0 && self.cells() >= 2) {
            return bad(format!("L = {} must be positive", self.half_width));
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return bad("eps must be a non-empty list of positive numbers".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        let spec = self.lattice()?;
        if spec.a() > MAX_A {
            return bad(format!("a = {} exceeds the supported maximum {MAX_A}", spec.a()));
        }
        let bound = Self::index_bound(self.g, spec.a());
        let needed = (spec.a() - 1).max(VERIFY_INDEX_RADIUS);
        if needed >= bound {
            return Err(Error::Aliasing {
                j: needed,
                k: needed,
                bound,
            });
        }
        Ok(spec)
    }
}
