use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tlincomb::fitting::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub sigma: f64,
    pub nu: f64,
}

/// Addends given as `"s1:n1,s2:n2,..."`.
#[derive(Debug, Clone, PartialEq)]
pub struct Terms(pub Vec<TermSpec>);

impl FromStr for Terms {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_terms(s).map(Terms)
    }
}

pub fn parse_terms(s: &str) -> Result<Vec<TermSpec>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let (a, b) = item
            .split_once(':')
            .ok_or_else(|| format!("term '{item}' is not of the form sigma:nu"))?;
        let sigma = parse_f64(a, "sigma")?;
        let nu = parse_f64(b, "nu")?;
        out.push(TermSpec { sigma, nu });
    }
    if out.is_empty() {
        return Err("no terms given".into());
    }
    Ok(out)
}

fn parse_f64(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{what} '{s}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{what} '{s}' is not finite"));
    }
    Ok(v)
}

/// A numeric grid: `start:step:stop`, `logspace:a:b:count` (base 10) or a comma list.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let values = match parts.as_slice() {
            ["logspace", a, b, count] => {
                let (a, b) = (parse_f64(a, "logspace start")?, parse_f64(b, "logspace stop")?);
                let count: usize = count.parse().map_err(|_| format!("bad logspace count '{count}'"))?;
                if count < 2 {
                    return Err("logspace needs at least 2 points".into());
                }
                (0..count)
                    .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
                    .collect()
            }
            [start, step, stop] => {
                let (start, step, stop) = (
                    parse_f64(start, "grid start")?,
                    parse_f64(step, "grid step")?,
                    parse_f64(stop, "grid stop")?,
                );
                if !(step > 0.0) || stop < start {
                    return Err(format!("grid '{s}' needs step > 0 and stop >= start"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                // multiply instead of accumulating so 2.5:0.5:10 hits 10 exactly
                (0..=n).map(|i| start + step * i as f64).collect()
            }
            [single] => single
                .split(',')
                .map(|v| parse_f64(v, "grid value"))
                .collect::<Result<_, _>>()?,
            _ => return Err(format!("cannot parse grid '{s}'")),
        };
        Ok(Grid(values))
    }
}

impl Grid {
    pub fn as_counts(&self, what: &str) -> Result<Vec<usize>, String> {
        self.0
            .iter()
            .map(|&v| {
                if v >= 1.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    Err(format!("{what} value {v} is not a positive integer"))
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Nu,
    #[value(name = "k", alias = "K")]
    #[serde(rename = "K")]
    K,
    R,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKind::Nu => "nu",
            SweepKind::K => "K",
            SweepKind::R => "r",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub terms: Vec<TermSpec>,
    pub method: Option<Method>,
    pub r: Option<f64>,
    pub n_samples: usize,
    pub bins: usize,
    pub seed: u64,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub grid: Vec<f64>,
    #[serde(rename = "K_set")]
    pub k_set: Vec<usize>,
    pub nu_set: Vec<f64>,
    pub methods: Vec<Method>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub seed: u64,
    pub n: usize,
    pub bins: usize,
}

impl Meta {
    pub fn of(cfg: &RunConfig) -> Self {
        Meta {
            version: version().to_string(),
            seed: cfg.seed,
            n: cfg.n_samples,
            bins: cfg.bins,
        }
    }
}

pub fn version() -> &'static str {
    env!("TLINCOMB_VERSION")
}
