//! Pipeline configuration and stage fingerprints.
//!
//! A config file is flat `key = value` text; `#` starts a comment. Unknown keys
//! are an error. Paths are taken as written (relative to the working directory).
//!
//! ```text
//! corpus = ukwac.01.gz, ukwac.02.gz
//! window = 2
//! scheme = ppmi
//! svd = on
//! k = 300
//! ```
//!
//! Each pipeline stage stamps its output with a fingerprint: a hash over the
//! fingerprint of its input and the keys that stage consumes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::cooccur::WindowOver;
use crate::error::{Error, Result};
use crate::eval::{OovPolicy, PosPolicy};
use crate::similarity::{Measure, DEFAULT_APSYN_N};
use crate::svd::EigenWeight;
use crate::weighting::Scheme;

pub const WINDOWS: [u32; 3] = [2, 3, 5];
pub const APSYN_NS: [usize; 3] = [100, 500, 1000];

/// Provenance key holding the fingerprint of the stage that wrote a file.
pub const FINGERPRINT_KEY: &str = "fingerprint";

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Vec<PathBuf>,
    pub tagmap: Option<PathBuf>,
    pub targets: Option<PathBuf>,
    pub window: u32,
    pub window_over: WindowOver,
    pub min_context_freq: u64,
    pub scheme: Scheme,
    pub svd: bool,
    pub k: usize,
    pub p: EigenWeight,
    pub seed: u64,
    pub dense_cutoff: usize,
    pub measure: Measure,
    pub apsyn_n: usize,
    pub pos_policy: PosPolicy,
    pub oov_policy: OovPolicy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: Vec::new(),
            tagmap: None,
            targets: None,
            window: 2,
            window_over: WindowOver::Filtered,
            min_context_freq: 100,
            scheme: Scheme::Ppmi,
            svd: false,
            k: 300,
            p: EigenWeight::One,
            seed: 0,
            dense_cutoff: 1000,
            measure: Measure::Cosine,
            apsyn_n: DEFAULT_APSYN_N,
            pos_policy: PosPolicy::default(),
            oov_policy: OovPolicy::Skip,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("{key}: {value:?} is not a valid number")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(Error::config(format!("{key}: expected on|off, got {value:?}"))),
    }
}

fn opt_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

fn path_str(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key = value, got {line:?}")))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(m) => parse_err(m),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value; used for file lines and CLI overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "corpus" => {
                self.corpus = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(PathBuf::from)
                    .collect()
            }
            "tagmap" => self.tagmap = opt_path(value),
            "targets" => self.targets = opt_path(value),
            "window" => self.window = parse_num(key, value)?,
            "window_over" => self.window_over = value.parse()?,
            "min_context_freq" => self.min_context_freq = parse_num(key, value)?,
            "scheme" => self.scheme = value.parse()?,
            "svd" => self.svd = parse_bool(key, value)?,
            "k" => self.k = parse_num(key, value)?,
            "p" | "eigen_weight" => self.p = value.parse()?,
            "seed" => self.seed = parse_num(key, value)?,
            "dense_cutoff" => self.dense_cutoff = parse_num(key, value)?,
            "measure" => self.measure = value.parse()?,
            "apsyn_n" => self.apsyn_n = parse_num(key, value)?,
            "pos_policy" => self.pos_policy = value.parse()?,
            "oov_policy" => self.oov_policy = value.parse()?,
            _ => return Err(Error::config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !WINDOWS.contains(&self.window) {
            return Err(Error::config(format!("window must be one of {WINDOWS:?}, got {}", self.window)));
        }
        if !APSYN_NS.contains(&self.apsyn_n) {
            return Err(Error::config(format!("apsyn_n must be one of {APSYN_NS:?}, got {}", self.apsyn_n)));
        }
        if self.k < 1 {
            return Err(Error::config("k must be at least 1"));
        }
        Ok(())
    }

    pub fn build_entries(&self) -> BTreeMap<String, String> {
        let corpus: Vec<String> = self.corpus.iter().map(|p| p.display().to_string()).collect();
        BTreeMap::from([
            ("corpus".into(), corpus.join(",")),
            ("tagmap".into(), path_str(&self.tagmap)),
            ("targets".into(), path_str(&self.targets)),
            ("window".into(), self.window.to_string()),
            ("window_over".into(), self.window_over.to_string()),
            ("min_context_freq".into(), self.min_context_freq.to_string()),
        ])
    }

    pub fn weight_entries(&self) -> BTreeMap<String, String> {
        BTreeMap::from([("scheme".into(), self.scheme.to_string())])
    }

    pub fn svd_entries(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("k".into(), self.k.to_string()),
            ("p".into(), self.p.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("dense_cutoff".into(), self.dense_cutoff.to_string()),
        ])
    }

    pub fn query_entries(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("measure".into(), self.measure.to_string()),
            ("apsyn_n".into(), self.apsyn_n.to_string()),
            ("pos_policy".into(), self.pos_policy.to_string()),
            ("oov_policy".into(), self.oov_policy.to_string()),
        ])
    }

    /// Every key in canonical `key=value` lines, sorted by key.
    pub fn canonical(&self) -> String {
        let mut all = self.build_entries();
        all.extend(self.weight_entries());
        all.extend(self.svd_entries());
        all.extend(self.query_entries());
        all.insert("svd".into(), if self.svd { "on" } else { "off" }.into());
        canonical_lines(&all)
    }

    pub fn build_fingerprint(&self) -> String {
        stage_fingerprint("build", None, &self.build_entries())
    }

    pub fn weight_fingerprint(&self) -> String {
        stage_fingerprint("weight", Some(&self.build_fingerprint()), &self.weight_entries())
    }

    pub fn svd_fingerprint(&self) -> String {
        stage_fingerprint("svd", Some(&self.weight_fingerprint()), &self.svd_entries())
    }

    /// Fingerprint of the final model the config describes.
    pub fn model_fingerprint(&self) -> String {
        if self.svd {
            self.svd_fingerprint()
        } else {
            self.weight_fingerprint()
        }
    }
}

fn canonical_lines(entries: &BTreeMap<String, String>) -> String {
    entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

/// 16 hex digits of SHA-256 over the stage name, input fingerprint and sorted entries.
pub fn stage_fingerprint(stage: &str, input: Option<&str>, entries: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    h.update(format!("stage={stage}\n"));
    if let Some(fp) = input {
        h.update(format!("input={fp}\n"));
    }
    h.update(canonical_lines(entries));
    hex::encode(&h.finalize()[..8])
}

/// Fails unless `provenance` carries the `expected` fingerprint.
pub fn check_fingerprint(provenance: &BTreeMap<String, String>, expected: &str) -> Result<()> {
    let found = provenance.get(FINGERPRINT_KEY).map(String::as_str).unwrap_or("<none>");
    if found == expected {
        Ok(())
    } else {
        Err(Error::FingerprintMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }
}
