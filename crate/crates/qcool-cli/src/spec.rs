//! Flag parsing and the flag/config-file merge.
//!
//! Precedence is fixed: command-line flags beat config-file values beat
//! built-in defaults. The config file is a flat JSON object whose keys are
//! the long flag names (kebab-case); scalar values may be given either as
//! native JSON types or as the same strings the flags accept, and list
//! values (`k-over-h`, `format`) also accept JSON arrays.

use crate::Failure;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "qcool",
    version,
    about = "Exact-simulation sweeps of measurement-assisted vs heat-bath cooling on 2-4 qubits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run one protocol over a (k/h, beta) grid and write CSV/JSON/SVG
    Sweep(SweepArgs),
    /// Overlay several methods on the same grid in one table and chart
    Compare(CompareArgs),
    /// Run the self-test battery and print pass/fail per check
    Verify(VerifyArgs),
}

#[derive(Args)]
pub struct SweepArgs {
    /// Protocol to sweep
    #[arg(long, value_parser = PROTOCOL_NAMES)]
    pub protocol: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Method set: `pair` overlays the two-qubit protocols, `ancilla` the
    /// reset-qubit ones
    #[arg(long, value_parser = ["pair", "ancilla"])]
    pub style: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Negative control: flip the sigma_z sign convention fed to the
    /// ground-energy check so it must fail
    #[arg(long = "corrupt-pauli")]
    pub corrupt_pauli: bool,
}

const PROTOCOL_NAMES: [&str; 6] =
    ["qet2-ground", "qet2-gibbs", "qet2a", "ppa", "srg2", "compress"];

#[derive(Args)]
pub struct CommonArgs {
    /// Comma-separated coupling ratios, each >= 0
    #[arg(long = "k-over-h", value_name = "K1,K2,...")]
    pub k_over_h: Option<String>,
    /// Inverse-temperature grid min:max:steps (inclusive endpoints, uniform)
    #[arg(long, value_name = "MIN:MAX:STEPS")]
    pub beta: Option<String>,
    /// Ancilla level splitting (qet2a and 3-qubit ppa)
    #[arg(long = "h-an", value_name = "H_AN")]
    pub h_an: Option<f64>,
    /// Reset-qubit ground polarization for ppa with the mixed start
    #[arg(long = "epsilon-b", value_name = "EPS")]
    pub epsilon_b: Option<f64>,
    /// Measurement family for the qet2 protocols
    #[arg(long, value_parser = ["projective", "nonprojective"])]
    pub povm: Option<String>,
    /// Frobenius clearance every nonprojective operator keeps from the
    /// projective pair
    #[arg(long = "min-frobenius", value_name = "DIST")]
    pub min_frobenius: Option<f64>,
    /// Optimizer restarts per grid point
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Base seed; every grid point derives its own stream from it
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; a csv/json/svg extension is replaced per format,
    /// anything else gets the format extension appended
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg
    #[arg(long, value_name = "FMT,...")]
    pub format: Option<String>,
    /// Flat JSON file with the same keys as the flags; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Register size for ppa (2 or 3)
    #[arg(long)]
    pub n: Option<usize>,
    /// ppa start: `mixed` benchmark or `gibbs` thermal marginals
    #[arg(long = "ppa-init", value_parser = ["mixed", "gibbs"])]
    pub ppa_init: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Qet2Ground,
    Qet2Gibbs,
    Qet2a,
    Ppa,
    Srg2,
    Compress,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Qet2Ground => "qet2-ground",
            Protocol::Qet2Gibbs => "qet2-gibbs",
            Protocol::Qet2a => "qet2a",
            Protocol::Ppa => "ppa",
            Protocol::Srg2 => "srg2",
            Protocol::Compress => "compress",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "qet2-ground" => Some(Protocol::Qet2Ground),
            "qet2-gibbs" => Some(Protocol::Qet2Gibbs),
            "qet2a" => Some(Protocol::Qet2a),
            "ppa" => Some(Protocol::Ppa),
            "srg2" => Some(Protocol::Srg2),
            "compress" => Some(Protocol::Compress),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PovmMode {
    Projective,
    Nonprojective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpaInit {
    Mixed,
    Gibbs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Pair,
    Ancilla,
}

impl Style {
    pub fn name(self) -> &'static str {
        match self {
            Style::Pair => "pair",
            Style::Ancilla => "ancilla",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Fully merged and validated sweep/compare inputs.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub h: f64,
    pub k_over_h: Vec<f64>,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_steps: usize,
    pub h_an: f64,
    pub epsilon_b: f64,
    pub povm_mode: PovmMode,
    pub min_frobenius: f64,
    pub restarts: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub n: usize,
    pub ppa_init: PpaInit,
}

impl SweepSpec {
    /// The inclusive uniform beta grid. One point when steps == 1.
    pub fn betas(&self) -> Vec<f64> {
        if self.beta_steps == 1 {
            return vec![self.beta_min];
        }
        let span = self.beta_max - self.beta_min;
        (0..self.beta_steps)
            .map(|i| self.beta_min + span * i as f64 / (self.beta_steps - 1) as f64)
            .collect()
    }

    /// Output path for one format: known data extensions are replaced,
    /// anything else keeps the stem and appends.
    pub fn path_for(&self, format: Format) -> PathBuf {
        let known = matches!(
            self.out.extension().and_then(|e| e.to_str()),
            Some("csv" | "json" | "svg")
        );
        if known {
            self.out.with_extension(format.ext())
        } else {
            let mut os = self.out.clone().into_os_string();
            os.push(".");
            os.push(format.ext());
            PathBuf::from(os)
        }
    }
}

pub fn resolve_sweep(args: &SweepArgs) -> Result<(Protocol, SweepSpec), Failure> {
    let cfg = load_config(args.common.config.as_deref())?;
    let name = args
        .protocol
        .clone()
        .or(cfg_string(&cfg, "protocol")?)
        .ok_or_else(|| Failure::Spec("sweep needs --protocol (or `protocol` in the config)".into()))?;
    let protocol = Protocol::parse(&name)
        .ok_or_else(|| Failure::Spec(format!("unknown protocol `{name}`")))?;
    let spec = resolve_common(&args.common, &cfg)?;
    Ok((protocol, spec))
}

pub fn resolve_compare(args: &CompareArgs) -> Result<(Style, SweepSpec), Failure> {
    let cfg = load_config(args.common.config.as_deref())?;
    let style = match args
        .style
        .clone()
        .or(cfg_string(&cfg, "style")?)
        .as_deref()
        .unwrap_or("pair")
    {
        "pair" => Style::Pair,
        "ancilla" => Style::Ancilla,
        other => return Err(Failure::Spec(format!("unknown compare style `{other}`"))),
    };
    let spec = resolve_common(&args.common, &cfg)?;
    Ok((style, spec))
}

fn resolve_common(args: &CommonArgs, cfg: &serde_json::Map<String, Value>) -> Result<SweepSpec, Failure> {
    let h = cfg_f64(cfg, "h")?.unwrap_or(1.0);
    if !h.is_finite() || h <= 0.0 {
        return Err(Failure::Spec(format!("h must be a positive real, got {h}")));
    }

    let k_over_h = match (&args.k_over_h, cfg_k_list(cfg)?) {
        (Some(s), _) => parse_k_list(s).map_err(Failure::Spec)?,
        (None, Some(v)) => v,
        (None, None) => vec![1.0],
    };
    if k_over_h.is_empty() {
        return Err(Failure::Spec("k-over-h list is empty".into()));
    }
    for &k in &k_over_h {
        if !k.is_finite() || k < 0.0 {
            return Err(Failure::Spec(format!("k/h entries must be finite and >= 0, got {k}")));
        }
    }

    let beta_str = args
        .beta
        .clone()
        .or(cfg_string(cfg, "beta")?)
        .unwrap_or_else(|| "0:2:9".into());
    let (beta_min, beta_max, beta_steps) = parse_beta(&beta_str).map_err(Failure::Spec)?;

    let h_an = args.h_an.or(cfg_f64(cfg, "h-an")?).unwrap_or(1.0);
    if !h_an.is_finite() || h_an <= 0.0 {
        return Err(Failure::Spec(format!("h-an must be a positive real, got {h_an}")));
    }

    let epsilon_b = args.epsilon_b.or(cfg_f64(cfg, "epsilon-b")?).unwrap_or(0.01);
    if !epsilon_b.is_finite() || !(0.0..1.0).contains(&epsilon_b) {
        return Err(Failure::Spec(format!("epsilon-b must lie in [0, 1), got {epsilon_b}")));
    }

    let povm_mode = match args
        .povm
        .clone()
        .or(cfg_string(cfg, "povm")?)
        .as_deref()
        .unwrap_or("projective")
    {
        "projective" => PovmMode::Projective,
        "nonprojective" => PovmMode::Nonprojective,
        other => return Err(Failure::Spec(format!("unknown povm mode `{other}`"))),
    };

    let min_frobenius = args
        .min_frobenius
        .or(cfg_f64(cfg, "min-frobenius")?)
        .unwrap_or(0.5);
    if !min_frobenius.is_finite() || min_frobenius < 0.0 {
        return Err(Failure::Spec(format!(
            "min-frobenius must be finite and >= 0, got {min_frobenius}"
        )));
    }

    let restarts = match args.restarts {
        Some(r) => r,
        None => cfg_usize(cfg, "restarts")?.unwrap_or(4),
    };
    if restarts == 0 {
        return Err(Failure::Spec("restarts must be >= 1".into()));
    }

    let seed = match args.seed {
        Some(s) => s,
        None => cfg_u64(cfg, "seed")?.unwrap_or(1),
    };

    let out = args
        .out
        .clone()
        .or(cfg_string(cfg, "out")?.map(PathBuf::from))
        .ok_or_else(|| Failure::Spec("an output path is required: --out (or `out` in the config)".into()))?;

    let formats = match (&args.format, cfg_format_list(cfg)?) {
        (Some(s), _) => parse_formats(s).map_err(Failure::Spec)?,
        (None, Some(v)) => v,
        (None, None) => vec![Format::Csv],
    };

    let n = match args.n {
        Some(n) => n,
        None => cfg_usize(cfg, "n")?.unwrap_or(3),
    };
    if !(n == 2 || n == 3) {
        return Err(Failure::Spec(format!("n must be 2 or 3, got {n}")));
    }

    let ppa_init = match args
        .ppa_init
        .clone()
        .or(cfg_string(cfg, "ppa-init")?)
        .as_deref()
        .unwrap_or("mixed")
    {
        "mixed" => PpaInit::Mixed,
        "gibbs" => PpaInit::Gibbs,
        other => return Err(Failure::Spec(format!("unknown ppa-init `{other}`"))),
    };

    Ok(SweepSpec {
        h,
        k_over_h,
        beta_min,
        beta_max,
        beta_steps,
        h_an,
        epsilon_b,
        povm_mode,
        min_frobenius,
        restarts,
        seed,
        out,
        formats,
        n,
        ppa_init,
    })
}

pub fn parse_k_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad k/h entry `{part}`"))
        })
        .collect()
}

/// `min:max:steps` with inclusive endpoints. steps is the number of grid
/// points, so `0:2:9` is the nine quarter-steps of the figures.
pub fn parse_beta(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("beta grid must be MIN:MAX:STEPS, got `{s}`"));
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| format!("bad beta min `{}`", parts[0]))?;
    let max: f64 = parts[1].trim().parse().map_err(|_| format!("bad beta max `{}`", parts[1]))?;
    let steps: usize = parts[2].trim().parse().map_err(|_| format!("bad beta steps `{}`", parts[2]))?;
    if !min.is_finite() || !max.is_finite() || min < 0.0 {
        return Err(format!("beta endpoints must be finite and >= 0, got {min}:{max}"));
    }
    if min > max {
        return Err(format!("beta min {min} exceeds max {max}"));
    }
    if steps < 1 {
        return Err("beta steps must be >= 1".into());
    }
    Ok((min, max, steps))
}

pub fn parse_formats(s: &str) -> Result<Vec<Format>, String> {
    let mut formats = Vec::new();
    for part in s.split(',') {
        let f = match part.trim() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            "svg" => Format::Svg,
            other => return Err(format!("unknown format `{other}` (expected csv, json, svg)")),
        };
        if !formats.contains(&f) {
            formats.push(f);
        }
    }
    if formats.is_empty() {
        return Err("format list is empty".into());
    }
    Ok(formats)
}

const CONFIG_KEYS: [&str; 15] = [
    "protocol",
    "style",
    "h",
    "k-over-h",
    "beta",
    "h-an",
    "epsilon-b",
    "povm",
    "min-frobenius",
    "restarts",
    "seed",
    "out",
    "format",
    "n",
    "ppa-init",
];

fn load_config(path: Option<&Path>) -> Result<serde_json::Map<String, Value>, Failure> {
    let Some(path) = path else {
        return Ok(serde_json::Map::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("reading config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Spec(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(Failure::Spec(format!(
            "config {} must be a flat JSON object",
            path.display()
        )));
    };
    for key in map.keys() {
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Failure::Spec(format!("config key `{key}` is not a known flag")));
        }
    }
    Ok(map)
}

fn cfg_string(cfg: &serde_json::Map<String, Value>, key: &str) -> Result<Option<String>, Failure> {
    match cfg.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(Failure::Spec(format!("config `{key}` must be a string, got {other}"))),
    }
}

fn cfg_f64(cfg: &serde_json::Map<String, Value>, key: &str) -> Result<Option<f64>, Failure> {
    match cfg.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => Ok(n.as_f64()),
        Some(other) => Err(Failure::Spec(format!("config `{key}` must be a number, got {other}"))),
    }
}

fn cfg_usize(cfg: &serde_json::Map<String, Value>, key: &str) -> Result<Option<usize>, Failure> {
    match cfg.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => n
            .as_u64()
            .map(|v| Some(v as usize))
            .ok_or_else(|| Failure::Spec(format!("config `{key}` must be a non-negative integer"))),
        Some(other) => Err(Failure::Spec(format!("config `{key}` must be an integer, got {other}"))),
    }
}

fn cfg_u64(cfg: &serde_json::Map<String, Value>, key: &str) -> Result<Option<u64>, Failure> {
    match cfg.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => n
            .as_u64()
            .map(Some)
            .ok_or_else(|| Failure::Spec(format!("config `{key}` must be a non-negative integer"))),
        Some(other) => Err(Failure::Spec(format!("config `{key}` must be an integer, got {other}"))),
    }
}

/// `k-over-h` in a config file: JSON array of numbers or the flag's comma
/// string.
fn cfg_k_list(cfg: &serde_json::Map<String, Value>) -> Result<Option<Vec<f64>>, Failure> {
    match cfg.get("k-over-h") {
        None => Ok(None),
        Some(Value::String(s)) => parse_k_list(s).map(Some).map_err(Failure::Spec),
        Some(Value::Array(items)) => {
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                match item.as_f64() {
                    Some(v) => out.push(v),
                    None => {
                        return Err(Failure::Spec(format!(
                            "config `k-over-h` entries must be numbers, got {item}"
                        )))
                    }
                }
            }
            Ok(Some(out))
        }
        Some(other) => Err(Failure::Spec(format!(
            "config `k-over-h` must be an array or comma string, got {other}"
        ))),
    }
}

fn cfg_format_list(cfg: &serde_json::Map<String, Value>) -> Result<Option<Vec<Format>>, Failure> {
    match cfg.get("format") {
        None => Ok(None),
        Some(Value::String(s)) => parse_formats(s).map(Some).map_err(Failure::Spec),
        Some(Value::Array(items)) => {
            let parts: Result<Vec<&str>, Failure> = items
                .iter()
                .map(|item| {
                    item.as_str().ok_or_else(|| {
                        Failure::Spec(format!("config `format` entries must be strings, got {item}"))
                    })
                })
                .collect();
            parse_formats(&parts?.join(",")).map(Some).map_err(Failure::Spec)
        }
        Some(other) => Err(Failure::Spec(format!(
            "config `format` must be an array or comma string, got {other}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_grid_is_inclusive_and_uniform() {
        let (min, max, steps) = parse_beta("0:2:9").unwrap();
        let spec = SweepSpec {
            h: 1.0,
            k_over_h: vec![1.0],
            beta_min: min,
            beta_max: max,
            beta_steps: steps,
            h_an: 1.0,
            epsilon_b: 0.01,
            povm_mode: PovmMode::Projective,
            min_frobenius: 0.5,
            restarts: 1,
            seed: 0,
            out: PathBuf::from("x"),
            formats: vec![Format::Csv],
            n: 3,
            ppa_init: PpaInit::Mixed,
        };
        let betas = spec.betas();
        assert_eq!(betas.len(), 9);
        assert_eq!(betas[0], 0.0);
        assert_eq!(betas[8], 2.0);
        for (i, b) in betas.iter().enumerate() {
            assert!((b - 0.25 * i as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn single_step_grid_sits_on_the_lower_endpoint() {
        assert_eq!(parse_beta("1.5:1.5:1").unwrap(), (1.5, 1.5, 1));
        assert!(parse_beta("2:1:5").is_err());
        assert!(parse_beta("0:1:0").is_err());
        assert!(parse_beta("0:1").is_err());
        assert!(parse_beta("-1:1:3").is_err());
    }

    #[test]
    fn format_lists_deduplicate_and_reject_strangers() {
        assert_eq!(
            parse_formats("csv,svg,csv").unwrap(),
            vec![Format::Csv, Format::Svg]
        );
        assert!(parse_formats("png").is_err());
        assert!(parse_formats("").is_err());
    }

    #[test]
    fn known_extensions_are_replaced_and_others_kept() {
        let mut spec = SweepSpec {
            h: 1.0,
            k_over_h: vec![1.0],
            beta_min: 0.0,
            beta_max: 1.0,
            beta_steps: 2,
            h_an: 1.0,
            epsilon_b: 0.01,
            povm_mode: PovmMode::Projective,
            min_frobenius: 0.5,
            restarts: 1,
            seed: 0,
            out: PathBuf::from("runs/result.csv"),
            formats: vec![Format::Csv],
            n: 3,
            ppa_init: PpaInit::Mixed,
        };
        assert_eq!(spec.path_for(Format::Json), PathBuf::from("runs/result.json"));
        spec.out = PathBuf::from("runs/fig1.data");
        assert_eq!(spec.path_for(Format::Csv), PathBuf::from("runs/fig1.data.csv"));
        spec.out = PathBuf::from("runs/fig1");
        assert_eq!(spec.path_for(Format::Svg), PathBuf::from("runs/fig1.svg"));
    }
}
