use std::path::{Path, PathBuf};
use std::str::FromStr;

use dynprec::rootfind::Mode;
use dynprec::{Arith, ArithConfig, Rounding};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// One layer of settings. Unset fields fall through to the layer below.
#[derive(Debug, Clone, Default)]
pub struct Layer {
    pub base: Option<u32>,
    pub t: Option<u32>,
    pub big_t: Option<usize>,
    pub rounding: Option<Rounding>,
    pub mode: Option<Mode>,
    pub tol: Option<f64>,
    pub safety: Option<f64>,
    pub max_iter: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad value `{value}` for `{key}`")))
}

impl Layer {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Layer, CliError> {
        let mut l = Layer::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "base" => l.base = Some(parse(k, v)?),
                "t" => l.t = Some(parse(k, v)?),
                "T" => l.big_t = Some(parse(k, v)?),
                "rounding" => l.rounding = Some(v.parse().map_err(|e: dynprec::ArithError| CliError::Usage(e.to_string()))?),
                "mode" => l.mode = Some(v.parse().map_err(CliError::Usage)?),
                "tol" => l.tol = Some(parse(k, v)?),
                "safety" => l.safety = Some(parse(k, v)?),
                "max_iter" | "max-iter" => l.max_iter = Some(parse(k, v)?),
                "format" => l.format = Some(v.parse().map_err(CliError::Usage)?),
                "out" => l.out = Some(PathBuf::from(v)),
                _ => return Err(CliError::Usage(format!("config line {}: unknown key `{k}`", n + 1))),
            }
        }
        Ok(l)
    }

    pub fn load(path: &Path) -> Result<Layer, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Layer::parse_file(&text)
    }

    /// `self` wins wherever it is set.
    pub fn over(self, lower: Layer) -> Layer {
        Layer {
            base: self.base.or(lower.base),
            t: self.t.or(lower.t),
            big_t: self.big_t.or(lower.big_t),
            rounding: self.rounding.or(lower.rounding),
            mode: self.mode.or(lower.mode),
            tol: self.tol.or(lower.tol),
            safety: self.safety.or(lower.safety),
            max_iter: self.max_iter.or(lower.max_iter),
            format: self.format.or(lower.format),
            out: self.out.or(lower.out),
        }
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub base: u32,
    pub t: u32,
    pub big_t: usize,
    pub rounding: Rounding,
    pub mode: Mode,
    pub tol: f64,
    pub safety: f64,
    pub max_iter: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(l: Layer, format: Format) -> Settings {
        Settings {
            base: l.base.unwrap_or(2),
            t: l.t.unwrap_or(52),
            big_t: l.big_t.unwrap_or(4),
            rounding: l.rounding.unwrap_or_default(),
            mode: l.mode.unwrap_or(Mode::Dynamic),
            tol: l.tol.unwrap_or(1e-15),
            safety: l.safety.unwrap_or(1.0),
            max_iter: l.max_iter.unwrap_or(200),
            format: l.format.unwrap_or(format),
            out: l.out,
        }
    }

    pub fn arith(&self) -> Result<Arith, CliError> {
        let cfg = ArithConfig {
            base: self.base,
            chunk_width: self.t + 1,
            ..ArithConfig::binary(self.t, self.big_t)
        }
        .with_rounding(self.rounding);
        Arith::new(cfg).map_err(|e| CliError::Usage(e.to_string()))
    }
}
