//! Deterministic report emission: CSV and JSON artifacts with embedded
//! reproducibility metadata.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cocycle::LyapunovEstimate;
use crate::config::{format_word, ExperimentConfig};
use crate::error::{Error, Result};
use crate::spectra::UnionS;

/// Metadata stamped into every JSON report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool_version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub max_period: usize,
    pub n_steps: usize,
    pub n_samples: usize,
    pub theta: f64,
    pub tol_delta: f64,
}

impl ReportMeta {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        let mut h = Sha256::new();
        h.update(cfg.source_text.as_bytes());
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: format!("{:x}", h.finalize()),
            seed: cfg.seed,
            max_period: cfg.max_period,
            n_steps: cfg.n_steps,
            n_samples: cfg.n_samples,
            theta: cfg.theta,
            tol_delta: cfg.tol_delta,
        }
    }
}

/// A JSON report: metadata plus payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report<T> {
    pub meta: ReportMeta,
    pub data: T,
}

pub fn write_json<T: Serialize>(path: &Path, meta: &ReportMeta, data: &T) -> Result<()> {
    let report = Report {
        meta: meta.clone(),
        data,
    };
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Numerical(format!("JSON serialization failed: {e}")))?;
    write_text(path, &(text + "\n"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub const SCAN_CSV_HEADER: &str = "E,L_hat,stderr,n_steps,n_samples";
pub const BANDS_CSV_HEADER: &str = "orbit,period,band_index,lower,upper";

/// CSV of per-energy Lyapunov estimates.
pub fn scan_csv(estimates: &[LyapunovEstimate]) -> String {
    let mut out = String::from(SCAN_CSV_HEADER);
    out.push('\n');
    for e in estimates {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.energy, e.value, e.std_error, e.n_steps, e.n_samples
        ));
    }
    out
}

/// CSV of spectral bands per orbit.
pub fn bands_csv(union: &UnionS, alphabet: &[String]) -> String {
    let mut out = String::from(BANDS_CSV_HEADER);
    out.push('\n');
    for orbit in &union.per_orbit {
        let label = format_word(orbit.orbit.word(), alphabet);
        for (idx, (lo, hi)) in orbit.bands.intervals().iter().enumerate() {
            out.push_str(&format!(
                "{label},{},{idx},{lo},{hi}\n",
                orbit.orbit.period()
            ));
        }
    }
    out
}

/// JSON payload for the truncated S-set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SSetPayload {
    pub intervals: Vec<(f64, f64)>,
    pub measure: f64,
    pub truncation_max_period: usize,
    pub orbit_count: usize,
}

impl SSetPayload {
    pub fn from_union(union: &UnionS) -> Self {
        Self {
            intervals: union.set.intervals().to_vec(),
            measure: union.set.measure(),
            truncation_max_period: union.max_period,
            orbit_count: union.per_orbit.len(),
        }
    }
}

pub fn out_path(dir: &str, name: &str) -> PathBuf {
    Path::new(dir).join(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn meta_hash_is_stable() {
        let cfg = parse_config("").unwrap();
        let a = ReportMeta::from_config(&cfg);
        let b = ReportMeta::from_config(&cfg);
        assert_eq!(a.config_sha256, b.config_sha256);
        let cfg2 = parse_config("[scan]\nseed = 1").unwrap();
        assert_ne!(a.config_sha256, ReportMeta::from_config(&cfg2).config_sha256);
    }

    #[test]
    fn scan_csv_header_exact() {
        let csv = scan_csv(&[]);
        assert_eq!(csv, "E,L_hat,stderr,n_steps,n_samples\n");
    }
}
