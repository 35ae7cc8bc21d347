//! Experiment configuration files.
//!
//! ```toml
//! command = "kernel-norm"      # check-symbol | bessel-table | kernel-norm |
//!                              # residual | localize | j0-check | bernstein-verify
//! dimension = 3
//! seed = 7                     # optional, default 0
//! threshold = 1e-10            # optional pass threshold
//!
//! [symbol]
//! name = "power"               # power | relativistic | tanh_dn | coth_dn |
//! s = 0.5                      # exp_bump | custom | bernstein
//! # custom:    expr = "z^2 + z"
//! # bernstein: c1 = 0.0, c2 = 1.0, atoms = [[1.0, 2.0]]
//! # any:       scale = 2.0, z0 = 2.0, eps0 = 0.5
//!
//! [options]                    # command specific, all optional
//!
//! [output]
//! json = "report.json"         # relative to --out; default <config stem>.json
//! csv = "detail.csv"
//! ```

use std::collections::BTreeMap;
use std::fmt;

use helmloc::bernstein::{as_symbol, BernsteinSymbol};
use helmloc::symbols::ConditionMode;
use helmloc::{builtin_symbol, Symbol};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Malformed or inconsistent configuration (exit status 2).
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl ConfigError {
    fn field(field: &str, msg: impl fmt::Display) -> Self {
        ConfigError(format!("field `{field}`: {msg}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckSymbol,
    BesselTable,
    KernelNorm,
    Residual,
    Localize,
    J0Check,
    BernsteinVerify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::CheckSymbol => "check-symbol",
            Command::BesselTable => "bessel-table",
            Command::KernelNorm => "kernel-norm",
            Command::Residual => "residual",
            Command::Localize => "localize",
            Command::J0Check => "j0-check",
            Command::BernsteinVerify => "bernstein-verify",
        }
    }
}

/// One plane wave A·cos(k·x) or A·sin(k·x) with integer wavenumbers k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: Vec<i64>,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub kind: WaveKind,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    #[default]
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionSource {
    #[default]
    Bessel,
    Surface,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    // check-symbol
    pub mode: Option<ConditionMode>,
    // bessel-table
    pub nu: Option<f64>,
    pub k: Option<usize>,
    pub lambdas: Option<Vec<f64>>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_count: Option<usize>,
    pub source: Option<ExpansionSource>,
    // kernel-norm
    pub eps0: Option<f64>,
    pub r_max: Option<f64>,
    pub points_per_decade: Option<usize>,
    // residual / localize
    pub shape: Option<Vec<usize>>,
    #[serde(rename = "box")]
    pub box_len: Option<Vec<f64>>,
    pub modes: Option<Vec<ModeSpec>>,
    pub input: Option<String>,
    pub j0: Option<usize>,
    pub delta: Option<f64>,
    pub trials: Option<usize>,
    // j0-check
    pub window: Option<f64>,
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub json: Option<String>,
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub expr: Option<String>,
    pub bernstein: Option<BernsteinSymbol>,
    pub scale: Option<f64>,
    pub z0: Option<f64>,
    pub eps0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub dimension: usize,
    pub seed: u64,
    pub threshold: Option<f64>,
    pub symbol: SymbolSpec,
    pub options: Options,
    pub output: OutputSpec,
    /// The parsed document, echoed into reports.
    pub raw: toml::Table,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Command,
    dimension: i64,
    #[serde(default)]
    seed: u64,
    threshold: Option<f64>,
    symbol: toml::Table,
    #[serde(default)]
    options: Options,
    #[serde(default)]
    output: OutputSpec,
}

const MAX_DIMENSION: i64 = 8;

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw_table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError(e.to_string()))?;
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
    if raw.dimension < 1 || raw.dimension > MAX_DIMENSION {
        return Err(ConfigError::field("dimension", format!("must lie in 1..={MAX_DIMENSION}, got {}", raw.dimension)));
    }
    if let Some(t) = raw.threshold {
        if !(t.is_finite() && t >= 0.0) {
            return Err(ConfigError::field("threshold", format!("must be finite and ≥ 0, got {t}")));
        }
    }
    let symbol = symbol_spec(&raw.symbol)?;
    let cfg = ExperimentConfig {
        command: raw.command,
        dimension: raw.dimension as usize,
        seed: raw.seed,
        threshold: raw.threshold,
        symbol,
        options: raw.options,
        output: raw.output,
        raw: raw_table,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn as_f64(field: &str, v: &toml::Value) -> Result<f64, ConfigError> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(ConfigError::field(field, "expected a number")),
    }
}

fn symbol_spec(t: &toml::Table) -> Result<SymbolSpec, ConfigError> {
    let name = match t.get("name") {
        Some(toml::Value::String(s)) => s.clone(),
        Some(_) => return Err(ConfigError::field("symbol.name", "expected a string")),
        None => return Err(ConfigError::field("symbol.name", "missing")),
    };
    let mut spec = SymbolSpec {
        name: name.clone(),
        params: BTreeMap::new(),
        expr: None,
        bernstein: None,
        scale: None,
        z0: None,
        eps0: None,
    };
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for (key, v) in t {
        let field = format!("symbol.{key}");
        match key.as_str() {
            "name" => {}
            "expr" => match v {
                toml::Value::String(s) => spec.expr = Some(s.clone()),
                _ => return Err(ConfigError::field(&field, "expected a string")),
            },
            "atoms" => {
                let arr = v.as_array().ok_or_else(|| ConfigError::field(&field, "expected [[s, w], ...]"))?;
                for (i, pair) in arr.iter().enumerate() {
                    let f = format!("{field}[{i}]");
                    match pair.as_array().map(|p| p.as_slice()) {
                        Some([s, w]) => atoms.push((as_f64(&f, s)?, as_f64(&f, w)?)),
                        _ => return Err(ConfigError::field(&f, "expected a pair [s, w]")),
                    }
                }
            }
            "scale" => spec.scale = Some(as_f64(&field, v)?),
            "z0" => spec.z0 = Some(as_f64(&field, v)?),
            "eps0" => spec.eps0 = Some(as_f64(&field, v)?),
            _ => {
                spec.params.insert(key.clone(), as_f64(&field, v)?);
            }
        }
    }
    match name.as_str() {
        "custom" => {
            if spec.expr.is_none() {
                return Err(ConfigError::field("symbol.expr", "required for custom symbols"));
            }
            if let Some(k) = spec.params.keys().next() {
                return Err(ConfigError::field(&format!("symbol.{k}"), "unknown parameter for custom symbol"));
            }
        }
        "bernstein" => {
            let get = |k: &str| spec.params.get(k).copied().unwrap_or(0.0);
            if let Some(k) = spec.params.keys().find(|k| *k != "c1" && *k != "c2") {
                return Err(ConfigError::field(&format!("symbol.{k}"), "unknown parameter for bernstein symbol"));
            }
            let bs = BernsteinSymbol::new(get("c1"), get("c2"), atoms).map_err(|e| ConfigError::field("symbol", e))?;
            spec.bernstein = Some(bs);
        }
        _ => {
            if spec.expr.is_some() {
                return Err(ConfigError::field("symbol.expr", "only valid with name = \"custom\""));
            }
            if !atoms.is_empty() {
                return Err(ConfigError::field("symbol.atoms", "only valid with name = \"bernstein\""));
            }
        }
    }
    // bernstein specs are wrapped at run time so that c1 ≠ 0 surfaces as a
    // failed admissibility check rather than a config error
    if name != "bernstein" {
        spec.build()?;
    }
    Ok(spec)
}

impl SymbolSpec {
    /// Constructs the symbol. Bernstein specs go through the admissibility
    /// wrapper, which rejects c₁ ≠ 0.
    pub fn build(&self) -> Result<Symbol, ConfigError> {
        let base = match self.name.as_str() {
            "custom" => Symbol::from_expr(self.expr.as_deref().unwrap_or_default()),
            "bernstein" => match &self.bernstein {
                Some(bs) => as_symbol(bs),
                None => return Err(ConfigError::field("symbol", "missing bernstein parameters")),
            },
            name => builtin_symbol(name, &self.params),
        }
        .map_err(|e| ConfigError::field("symbol", e))?;
        let mut sym = base;
        if let Some(c) = self.scale {
            sym = sym.scaled(c).map_err(|e| ConfigError::field("symbol.scale", e))?;
        }
        if self.z0.is_some() || self.eps0.is_some() {
            let (z0, eps0) = (self.z0.unwrap_or(sym.z0()), self.eps0.unwrap_or(sym.eps0()));
            sym = sym.with_thresholds(z0, eps0).map_err(|e| ConfigError::field("symbol", e))?;
        }
        Ok(sym)
    }
}

fn positive(field: &str, v: Option<f64>) -> Result<(), ConfigError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(ConfigError::field(field, format!("must be > 0, got {x}"))),
        _ => Ok(()),
    }
}

fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    let o = &cfg.options;
    let d = cfg.dimension;
    positive("options.eps0", o.eps0)?;
    positive("options.r_max", o.r_max)?;
    positive("options.delta", o.delta)?;
    positive("options.window", o.window)?;
    if let Some(nu) = o.nu {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(ConfigError::field("options.nu", format!("must be ≥ 0, got {nu}")));
        }
    }
    let lambda_floor = if cfg.command == Command::BesselTable { 10.0 } else { f64::MIN_POSITIVE };
    if let Some(ls) = &o.lambdas {
        if ls.is_empty() || ls.iter().any(|l| !(l.is_finite() && *l >= lambda_floor)) {
            return Err(ConfigError::field(
                "options.lambdas",
                format!("need a nonempty list of values ≥ {lambda_floor}"),
            ));
        }
    }
    for (f, v) in [("options.lambda_min", o.lambda_min), ("options.lambda_max", o.lambda_max)] {
        if let Some(x) = v {
            if !(x.is_finite() && x >= lambda_floor) {
                return Err(ConfigError::field(f, format!("must be ≥ {lambda_floor}, got {x}")));
            }
        }
    }
    if let (Some(a), Some(b)) = (o.lambda_min, o.lambda_max) {
        if a > b {
            return Err(ConfigError::field("options.lambda_max", "must be ≥ lambda_min"));
        }
    }
    if o.lambda_count == Some(0) || o.n_points.is_some_and(|n| n < 2) || o.trials == Some(0) {
        return Err(ConfigError::field("options", "counts must be positive (n_points ≥ 2)"));
    }
    if o.points_per_decade == Some(0) {
        return Err(ConfigError::field("options.points_per_decade", "must be ≥ 1"));
    }
    if let Some(shape) = &o.shape {
        if shape.len() != d {
            return Err(ConfigError::field("options.shape", format!("{} entries for dimension {d}", shape.len())));
        }
        if shape.iter().any(|&n| n == 0 || n % 2 != 0) {
            return Err(ConfigError::field("options.shape", "entries must be positive and even"));
        }
    }
    if let Some(b) = &o.box_len {
        if b.len() != d {
            return Err(ConfigError::field("options.box", format!("{} entries for dimension {d}", b.len())));
        }
        if b.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(ConfigError::field("options.box", "entries must be positive"));
        }
    }
    if let Some(modes) = &o.modes {
        for (i, m) in modes.iter().enumerate() {
            if m.k.len() != d {
                return Err(ConfigError::field(&format!("options.modes[{i}].k"), format!("needs {d} entries")));
            }
        }
    }
    if o.j0 == Some(0) {
        return Err(ConfigError::field("options.j0", "must be ≥ 1"));
    }
    if o.k == Some(0) {
        return Err(ConfigError::field("options.k", "must be ≥ 1"));
    }
    match cfg.command {
        Command::Residual => {
            if o.modes.is_none() == o.input.is_none() {
                return Err(ConfigError::field("options", "residual needs exactly one of `modes` or `input`"));
            }
        }
        Command::BernsteinVerify => {
            if cfg.symbol.bernstein.is_none() {
                return Err(ConfigError::field("symbol.name", "bernstein-verify needs a bernstein symbol"));
            }
        }
        Command::BesselTable => {
            if o.source == Some(ExpansionSource::Surface) && d < 2 {
                return Err(ConfigError::field("dimension", "surface expansions need d ≥ 2"));
            }
        }
        Command::Localize if d > 3 => {
            return Err(ConfigError::field("dimension", "localize supports d ≤ 3"));
        }
        _ => {}
    }
    Ok(())
}
