//! Result rows and their serializations.
//!
//! The CSV layout is the crate's external contract: the exact header below,
//! LF line endings, UTF-8, every float printed with 12 significant digits.
//! Rows are validated against their field-range invariants *before* any
//! serialization so a bad computation aborts the run instead of emitting
//! plausible-looking data.

use serde::Serialize;

pub const CSV_HEADER: &str = "protocol,k_over_h,beta,purity_initial,purity_final,\
polarization_initial,polarization_final,energy_injected,energy_extracted,\
optimizer_evals,params_json";

/// One grid point of one protocol (or one method of a comparison).
///
/// Polarizations use the ground convention, -Tr(sigma_z rho), so a cold
/// qubit reads positive regardless of which protocol produced it.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// Set only by `compare`, which prepends a `method` CSV column.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub protocol: String,
    pub k_over_h: f64,
    pub beta: f64,
    pub purity_initial: f64,
    pub purity_final: f64,
    pub polarization_initial: f64,
    pub polarization_final: f64,
    pub energy_injected: f64,
    pub energy_extracted: f64,
    pub optimizer_evals: usize,
    /// JSON object with the protocol-specific parameters behind the row.
    pub params_json: String,
}

/// Slack for accumulated floating-point dust on the closed [0.5, 1] and
/// [-1, 1] ranges. Violations beyond it are treated as real bugs.
const RANGE_TOL: f64 = 1e-9;

impl SweepRow {
    pub fn validate(&self) -> Result<(), String> {
        let context = match &self.method {
            Some(m) => format!("{} ({m}) at k/h={}, beta={}", self.protocol, self.k_over_h, self.beta),
            None => format!("{} at k/h={}, beta={}", self.protocol, self.k_over_h, self.beta),
        };
        let floats = [
            ("k_over_h", self.k_over_h),
            ("beta", self.beta),
            ("purity_initial", self.purity_initial),
            ("purity_final", self.purity_final),
            ("polarization_initial", self.polarization_initial),
            ("polarization_final", self.polarization_final),
            ("energy_injected", self.energy_injected),
            ("energy_extracted", self.energy_extracted),
        ];
        for (name, value) in floats {
            if !value.is_finite() {
                return Err(format!("{context}: {name} is not finite ({value})"));
            }
        }
        if self.k_over_h < 0.0 || self.beta < 0.0 {
            return Err(format!("{context}: negative grid coordinate"));
        }
        for (name, value) in [
            ("purity_initial", self.purity_initial),
            ("purity_final", self.purity_final),
        ] {
            if !(0.5 - RANGE_TOL..=1.0 + RANGE_TOL).contains(&value) {
                return Err(format!("{context}: {name}={value} outside [0.5, 1]"));
            }
        }
        for (name, value) in [
            ("polarization_initial", self.polarization_initial),
            ("polarization_final", self.polarization_final),
        ] {
            if !(-1.0 - RANGE_TOL..=1.0 + RANGE_TOL).contains(&value) {
                return Err(format!("{context}: {name}={value} outside [-1, 1]"));
            }
        }
        for (name, text) in [("protocol", &self.protocol), ("method", self.method.as_ref().unwrap_or(&self.protocol))] {
            if text.contains([',', '"', '\n', '\r']) {
                return Err(format!("{context}: {name} `{text}` needs CSV escaping"));
            }
        }
        if serde_json::from_str::<serde_json::Value>(&self.params_json).is_err() {
            return Err(format!("{context}: params_json is not valid JSON"));
        }
        Ok(())
    }
}

/// 12 significant digits: fixed notation while the decimal exponent lies in
/// [-5, 11], scientific outside it, bare `0` for zero. The exponent is read
/// off the rounded scientific form so values that round up across a power
/// of ten still land in the right branch.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let epos = sci.find('e').expect("scientific float form carries an exponent");
    let exp: i32 = sci[epos + 1..].parse().expect("scientific exponent is an integer");
    if !(-5..=11).contains(&exp) {
        return sci;
    }
    let decimals = (11 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

fn csv_quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// The whole CSV file as one string: exact header, one line per row, LF
/// endings. `with_method` prepends the `method` column (compare output).
pub fn to_csv(rows: &[SweepRow], with_method: bool) -> String {
    let mut out = String::new();
    if with_method {
        out.push_str("method,");
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        if with_method {
            out.push_str(row.method.as_deref().unwrap_or(""));
            out.push(',');
        }
        out.push_str(&row.protocol);
        out.push(',');
        for value in [
            row.k_over_h,
            row.beta,
            row.purity_initial,
            row.purity_final,
            row.polarization_initial,
            row.polarization_final,
            row.energy_injected,
            row.energy_extracted,
        ] {
            out.push_str(&fmt_sig(value));
            out.push(',');
        }
        out.push_str(&row.optimizer_evals.to_string());
        out.push(',');
        out.push_str(&csv_quoted(&row.params_json));
        out.push('\n');
    }
    out
}

/// JSON mirror: an array of row objects with the same field names as the
/// CSV columns. Numbers stay native JSON floats (shortest round-trip form).
pub fn to_json(rows: &[SweepRow]) -> String {
    let mut text = serde_json::to_string_pretty(rows).expect("rows serialize infallibly");
    text.push('\n');
    text
}
