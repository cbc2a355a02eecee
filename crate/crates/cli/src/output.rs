//! Row types and their CSV/JSON encodings.

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SIM_HEADER: &str = "event,q,n,m,ell,theta,trials,successes,p_hat,ci_lo,ci_hi,seed";

/// One estimate; the CSV columns of `simulate` and `scan`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub event: String,
    pub q: u64,
    pub n: u64,
    pub m: u64,
    pub ell: Option<u64>,
    pub theta: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPointJson {
    pub status: String,
    pub theta: Option<f64>,
    pub ratio: Option<f64>,
}

/// JSON form of `simulate` and `scan`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEnvelope {
    pub predicted_threshold: Option<f64>,
    pub half_point: Option<HalfPointJson>,
    pub rows: Vec<SimRow>,
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::invalid(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::invalid(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, CliError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::invalid(format!("csv: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::invalid(format!("json: {e}")))
}

/// Two-column `theta p_hat` text for plotting.
pub fn plot_data(rows: &[SimRow]) -> String {
    let mut s = format!("# {} q={} n={}\n# theta p_hat\n", rows.first().map_or("", |r| r.event.as_str()), rows.first().map_or(0, |r| r.q), rows.first().map_or(0, |r| r.n));
    for r in rows {
        s.push_str(&format!("{} {}\n", r.theta, r.p_hat));
    }
    s
}
