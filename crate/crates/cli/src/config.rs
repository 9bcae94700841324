//! Run configuration: a line-oriented `key = value` file.
//!
//! `#` starts a comment (whole line or trailing). Keys may appear once.
//! Molecule constants `de`, `re`, `d`, `b` and `alpha` are required; every
//! other key has a default:
//!
//! | key | default |
//! |-----|---------|
//! | `name` | `molecule` |
//! | `mu`, `hbar`, `k_boltz` | `1` |
//! | `ell` | `0` |
//! | `states` | `0,1,2` |
//! | `beta_min`, `beta_max`, `beta_steps` | `0.1`, `2`, `20` |
//! | `lam_min`, `lam_max` | unset (use the level cap `n_max`) |
//! | `lam_steps` | `1` |
//! | `path` | `direct` |
//! | `norm` | `quadrature` |
//! | `output` | unset (stdout) |
//! | `format` | `csv` |

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use kpgm::{KpgmError, Molecule, NormMode, ThermoPath};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<&'static str>),

    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
}

impl ConfigError {
    fn invalid(key: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected csv or json, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub molecule: Molecule,
    pub ell: u32,
    pub states: Vec<u32>,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_steps: usize,
    pub lam_min: Option<f64>,
    pub lam_max: Option<f64>,
    pub lam_steps: usize,
    pub path: ThermoPath,
    pub norm: NormMode,
    pub output: Option<PathBuf>,
    pub format: Format,
}

const REQUIRED: [&str; 5] = ["de", "re", "d", "b", "alpha"];

const KEYS: [&str; 21] = [
    "name", "mu", "hbar", "de", "re", "d", "b", "alpha", "k_boltz", "ell", "states", "beta_min", "beta_max",
    "beta_steps", "lam_min", "lam_max", "lam_steps", "path", "norm", "output", "format",
];

struct Entry {
    key: &'static str,
    value: String,
    line: usize,
}

fn split_lines(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("expected `key = value`, got `{body}`"),
        })?;
        let k = k.trim();
        let v = v.trim();
        let key = KEYS.iter().copied().find(|&known| known == k).ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("unknown key `{k}`"),
        })?;
        if v.is_empty() {
            return Err(ConfigError::Parse {
                line,
                message: format!("`{key}` has no value"),
            });
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(ConfigError::Parse {
                line,
                message: format!("`{key}` already set on line {}", prev.line),
            });
        }
        entries.push(Entry {
            key,
            value: v.to_string(),
            line,
        });
    }
    Ok(entries)
}

fn parse_value<T: FromStr>(e: &Entry) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    e.value.parse::<T>().map_err(|err| ConfigError::Parse {
        line: e.line,
        message: format!("`{}`: cannot parse `{}` ({err})", e.key, e.value),
    })
}

fn parse_states(e: &Entry) -> Result<Vec<u32>, ConfigError> {
    e.value
        .split(',')
        .map(|s| {
            s.trim().parse::<u32>().map_err(|err| ConfigError::Parse {
                line: e.line,
                message: format!("`states`: cannot parse `{}` ({err})", s.trim()),
            })
        })
        .collect()
}

fn parse_norm(e: &Entry) -> Result<NormMode, ConfigError> {
    match e.value.as_str() {
        "quadrature" => Ok(NormMode::Quadrature),
        "closed" => Ok(NormMode::Closed),
        other => Err(ConfigError::Parse {
            line: e.line,
            message: format!("`norm`: expected quadrature or closed, got `{other}`"),
        }),
    }
}

fn norm_name(n: NormMode) -> &'static str {
    match n {
        NormMode::Quadrature => "quadrature",
        NormMode::Closed => "closed",
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let entries = split_lines(text)?;
    let get = |k: &str| entries.iter().find(|e| e.key == k);

    let missing: Vec<&'static str> = REQUIRED.iter().copied().filter(|k| get(k).is_none()).collect();
    if !missing.is_empty() {
        return Err(ConfigError::Missing(missing));
    }
    let num = |k: &str, default: f64| -> Result<f64, ConfigError> { get(k).map_or(Ok(default), parse_value::<f64>) };
    let required = |k: &str| -> Result<f64, ConfigError> { parse_value::<f64>(get(k).expect("checked above")) };

    let molecule = Molecule {
        name: get("name").map_or_else(|| "molecule".to_string(), |e| e.value.clone()),
        mu: num("mu", 1.0)?,
        hbar: num("hbar", 1.0)?,
        de: required("de")?,
        re: required("re")?,
        d: required("d")?,
        b: required("b")?,
        alpha: required("alpha")?,
        k_boltz: num("k_boltz", 1.0)?,
    };
    let cfg = RunConfig {
        molecule,
        ell: get("ell").map_or(Ok(0), parse_value::<u32>)?,
        states: get("states").map_or(Ok(vec![0, 1, 2]), parse_states)?,
        beta_min: num("beta_min", 0.1)?,
        beta_max: num("beta_max", 2.0)?,
        beta_steps: get("beta_steps").map_or(Ok(20), parse_value::<usize>)?,
        lam_min: get("lam_min").map(parse_value::<f64>).transpose()?,
        lam_max: get("lam_max").map(parse_value::<f64>).transpose()?,
        lam_steps: get("lam_steps").map_or(Ok(1), parse_value::<usize>)?,
        path: get("path").map_or(Ok(ThermoPath::Direct), parse_value::<ThermoPath>)?,
        norm: get("norm").map_or(Ok(NormMode::Quadrature), parse_norm)?,
        output: get("output").map(|e| PathBuf::from(&e.value)),
        format: get("format").map_or(Ok(Format::Csv), parse_value::<Format>)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.molecule.validate().map_err(|e| match e {
            KpgmError::InvalidParameter { name, reason } => ConfigError::invalid(&name.to_lowercase(), reason),
            other => ConfigError::invalid("molecule", other.to_string()),
        })?;
        if self.molecule.name.is_empty() || self.molecule.name.contains(['#', '\n', '\r']) {
            return Err(ConfigError::invalid("name", "name must be non-empty and free of `#` and line breaks"));
        }
        if self.states.is_empty() {
            return Err(ConfigError::invalid("states", "at least one state is required"));
        }
        check_range("beta", self.beta_min, self.beta_max, self.beta_steps)?;
        if self.lam_max.is_some() && self.lam_min.is_none() {
            return Err(ConfigError::invalid("lam_max", "lam_max requires lam_min"));
        }
        if let Some(lo) = self.lam_min {
            check_range("lam", lo, self.lam_max.unwrap_or(lo), self.lam_steps)?;
        } else if self.lam_steps != 1 {
            return Err(ConfigError::invalid("lam_steps", "lam_steps requires lam_min"));
        }
        Ok(())
    }

    /// Inverse temperatures of the sweep, `beta_min` first.
    pub fn betas(&self) -> Vec<f64> {
        grid(self.beta_min, self.beta_max, self.beta_steps)
    }

    /// Explicit level caps, or `None` to use `n_max`.
    pub fn lams(&self) -> Option<Vec<f64>> {
        self.lam_min.map(|lo| grid(lo, self.lam_max.unwrap_or(lo), self.lam_steps))
    }

    /// Canonical `key = value` text. Parsing it gives back `self`.
    pub fn to_text(&self) -> String {
        let mut s = self.physics_text();
        if let Some(out) = &self.output {
            let _ = writeln!(s, "output = {}", out.display());
        }
        let _ = writeln!(s, "format = {}", self.format.as_str());
        s
    }

    /// Canonical text without the output destination and format.
    fn physics_text(&self) -> String {
        let m = &self.molecule;
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", m.name);
        for (k, v) in [
            ("mu", m.mu),
            ("hbar", m.hbar),
            ("de", m.de),
            ("re", m.re),
            ("d", m.d),
            ("b", m.b),
            ("alpha", m.alpha),
            ("k_boltz", m.k_boltz),
        ] {
            let _ = writeln!(s, "{k} = {}", fmt_f64(v));
        }
        let _ = writeln!(s, "ell = {}", self.ell);
        let states: Vec<String> = self.states.iter().map(u32::to_string).collect();
        let _ = writeln!(s, "states = {}", states.join(","));
        let _ = writeln!(s, "beta_min = {}", fmt_f64(self.beta_min));
        let _ = writeln!(s, "beta_max = {}", fmt_f64(self.beta_max));
        let _ = writeln!(s, "beta_steps = {}", self.beta_steps);
        if let Some(v) = self.lam_min {
            let _ = writeln!(s, "lam_min = {}", fmt_f64(v));
        }
        if let Some(v) = self.lam_max {
            let _ = writeln!(s, "lam_max = {}", fmt_f64(v));
        }
        let _ = writeln!(s, "lam_steps = {}", self.lam_steps);
        let _ = writeln!(s, "path = {}", self.path.as_str());
        let _ = writeln!(s, "norm = {}", norm_name(self.norm));
        s
    }

    /// SHA-256 of the canonical text, excluding `output` and `format` so the
    /// destination does not change the hash.
    pub fn sha256(&self) -> String {
        Sha256::digest(self.physics_text().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn check_range(prefix: &str, lo: f64, hi: f64, steps: usize) -> Result<(), ConfigError> {
    let (kmin, kmax, ksteps) = (format!("{prefix}_min"), format!("{prefix}_max"), format!("{prefix}_steps"));
    if lo.is_nan() || lo <= 0.0 || !lo.is_finite() {
        return Err(ConfigError::invalid(&kmin, format!("{kmin} must be > 0, got {lo}")));
    }
    if hi.is_nan() || hi < lo || !hi.is_finite() {
        return Err(ConfigError::invalid(&kmax, format!("{kmax} must be >= {kmin}, got {hi}")));
    }
    if steps < 1 {
        return Err(ConfigError::invalid(&ksteps, format!("{ksteps} must be >= 1")));
    }
    if steps > 1 && hi == lo {
        return Err(ConfigError::invalid(&kmax, format!("{kmax} must exceed {kmin} when {ksteps} > 1")));
    }
    Ok(())
}

fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| if i + 1 == steps { hi } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 })
        .collect()
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    const GENERIC: &str = "de = 1\nre = 1.5\nd = 0.5\nb = 1.2\nalpha = 0.4\n";

    #[test]
    fn empty_file_lists_missing_keys() {
        assert_eq!(parse_config(""), Err(ConfigError::Missing(vec!["de", "re", "d", "b", "alpha"])));
        let err = parse_config("# nothing here\n\nde = 1\n").unwrap_err();
        assert_eq!(err.to_string(), "missing required keys: re, d, b, alpha");
    }

    #[test]
    fn negative_alpha_rejected() {
        let err = parse_config("de = 1\nre = 1.5\nd = 0.5\nb = 1.2\nalpha = -1\n").unwrap_err();
        match &err {
            ConfigError::Invalid { key, message } => {
                assert_eq!(key, "alpha");
                assert!(message.contains("alpha must be > 0"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn defaults_applied() {
        let c = parse_config(GENERIC).unwrap();
        assert_eq!(c.molecule.mu, 1.0);
        assert_eq!(c.molecule.hbar, 1.0);
        assert_eq!(c.molecule.k_boltz, 1.0);
        assert_eq!(c.ell, 0);
        assert_eq!(c.states, vec![0, 1, 2]);
        assert_eq!(c.path, ThermoPath::Direct);
        assert_eq!(c.norm, NormMode::Quadrature);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.betas().len(), 20);
        assert_eq!(c.lams(), None);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let unknown = parse_config("de = 1\nfoo = 2\n").unwrap_err();
        assert_eq!(unknown, ConfigError::Parse { line: 2, message: "unknown key `foo`".into() });
        let no_eq = parse_config("# c\nde 1\n").unwrap_err();
        assert!(matches!(no_eq, ConfigError::Parse { line: 2, .. }));
        let dup = parse_config("de = 1\nde = 2\n").unwrap_err();
        assert!(matches!(dup, ConfigError::Parse { line: 2, .. }));
        let bad = parse_config(&format!("{GENERIC}ell = one\n")).unwrap_err();
        assert!(matches!(bad, ConfigError::Parse { line: 6, .. }));
        let path = parse_config(&format!("{GENERIC}path = sideways\n")).unwrap_err();
        assert!(matches!(path, ConfigError::Parse { line: 6, .. }));
    }

    #[test]
    fn ranges_validated() {
        let bad = parse_config(&format!("{GENERIC}beta_min = 2\nbeta_max = 1\n")).unwrap_err();
        assert!(matches!(bad, ConfigError::Invalid { ref key, .. } if key == "beta_max"));
        let zero = parse_config(&format!("{GENERIC}beta_steps = 0\n")).unwrap_err();
        assert!(matches!(zero, ConfigError::Invalid { ref key, .. } if key == "beta_steps"));
        let lam = parse_config(&format!("{GENERIC}lam_steps = 3\n")).unwrap_err();
        assert!(matches!(lam, ConfigError::Invalid { ref key, .. } if key == "lam_steps"));
    }

    #[test]
    fn full_file_round_trips() {
        let text = "\
name = LiH-like # trailing comment
mu = 0.8801221
hbar = 0.06465415
de = 2.515287
re = 1.5956
d = 0.3
b = 0.7
alpha = 0.45
k_boltz = 8.617333262e-5
ell = 1
states = 0, 2, 5
beta_min = 0.25
beta_max = 3
beta_steps = 7
lam_min = 0.5
lam_max = 2.5
lam_steps = 3
path = closed
norm = closed
output = out/thermo.csv
format = json
";
        let c = parse_config(text).unwrap();
        assert_eq!(c.states, vec![0, 2, 5]);
        assert_eq!(c.lams(), Some(vec![0.5, 1.5, 2.5]));
        let again = parse_config(&c.to_text()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_text(), c.to_text());
        assert_eq!(again.sha256(), c.sha256());
    }

    #[test]
    fn hash_ignores_destination_but_not_physics() {
        let a = parse_config(GENERIC).unwrap();
        let b = parse_config(&format!("{GENERIC}output = x.csv\nformat = json\n")).unwrap();
        let c = parse_config(&format!("{GENERIC}ell = 1\n")).unwrap();
        assert_eq!(a.sha256(), b.sha256());
        assert_ne!(a.sha256(), c.sha256());
        assert_eq!(a.sha256().len(), 64);
    }

    #[test]
    fn grid_hits_endpoints() {
        let g = grid(0.1, 2.0, 20);
        assert_eq!(g.first(), Some(&0.1));
        assert_eq!(g.last(), Some(&2.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
