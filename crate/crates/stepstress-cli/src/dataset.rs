//! Dataset files: a short key,value header followed by one failure time per
//! line. Parsing reports the offending line number on any problem.
//!
//! ```text
//! # free-form comment lines
//! label,solar-lighting
//! n,35
//! tau1,5
//! scheme,type-i      # complete | type-i | type-ii | hybrid-i | hybrid-ii
//! tau2,6             # and/or r,16 depending on the scheme
//! times
//! 0.140
//! ...
//! ```

use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};
use stepstress::{CensoringSpec, ObservedData};

#[derive(Debug)]
pub struct DatasetError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for DatasetError {}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub label: String,
    pub n: usize,
    pub tau1: f64,
    pub spec: CensoringSpec,
    pub times: Vec<f64>,
}

impl Dataset {
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let err = |line: usize, message: String| DatasetError { line: Some(line), message };
        let mut label = String::new();
        let mut n: Option<usize> = None;
        let mut tau1: Option<f64> = None;
        let mut scheme: Option<String> = None;
        let mut tau2: Option<f64> = None;
        let mut r: Option<usize> = None;
        let mut times: Vec<f64> = Vec::new();
        let mut in_times = false;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if in_times {
                let t: f64 = line
                    .parse()
                    .map_err(|_| err(lineno, format!("expected a failure time, got '{line}'")))?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(err(lineno, format!("failure times must be positive, got {t}")));
                }
                times.push(t);
                continue;
            }
            if line == "times" || line == "time" {
                in_times = true;
                continue;
            }
            let (key, value) = line
                .split_once(',')
                .ok_or_else(|| err(lineno, format!("expected 'key,value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let parse_f64 = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| err(lineno, format!("{key} must be numeric, got '{v}'")))
            };
            match key {
                "label" => label = value.to_string(),
                "n" => {
                    n = Some(value.parse().map_err(|_| {
                        err(lineno, format!("n must be a positive integer, got '{value}'"))
                    })?)
                }
                "tau1" => tau1 = Some(parse_f64(value)?),
                "tau2" => tau2 = Some(parse_f64(value)?),
                "r" => {
                    r = Some(value.parse().map_err(|_| {
                        err(lineno, format!("r must be a positive integer, got '{value}'"))
                    })?)
                }
                "scheme" => scheme = Some(value.to_ascii_lowercase()),
                other => return Err(err(lineno, format!("unknown key '{other}'"))),
            }
        }

        if !in_times {
            return Err(DatasetError { line: None, message: "missing 'times' section".into() });
        }
        let tau1 = tau1.ok_or(DatasetError { line: None, message: "missing tau1".into() })?;
        let scheme = scheme.unwrap_or_else(|| "complete".into());
        let need_tau2 = || {
            tau2.ok_or(DatasetError {
                line: None,
                message: format!("scheme '{scheme}' needs tau2"),
            })
        };
        let need_r = || {
            r.ok_or(DatasetError { line: None, message: format!("scheme '{scheme}' needs r") })
        };
        let spec = match scheme.as_str() {
            "complete" => CensoringSpec::Complete,
            "type-i" | "typei" | "type1" => CensoringSpec::TypeI { tau2: need_tau2()? },
            "type-ii" | "typeii" | "type2" => CensoringSpec::TypeII { r: need_r()? },
            "hybrid-i" | "hybridi" | "hybrid1" => {
                CensoringSpec::HybridI { r: need_r()?, tau2: need_tau2()? }
            }
            "hybrid-ii" | "hybridii" | "hybrid2" => {
                CensoringSpec::HybridII { r: need_r()?, tau2: need_tau2()? }
            }
            other => {
                return Err(DatasetError {
                    line: None,
                    message: format!("unknown censoring scheme '{other}'"),
                })
            }
        };
        let n = n.unwrap_or(times.len());
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Dataset { label, n, tau1, spec, times })
    }

    pub fn load(path: &Path) -> Result<Self, crate::CliError> {
        let text = std::fs::read_to_string(path).map_err(crate::CliError::Io)?;
        Self::parse(&text).map_err(|e| {
            crate::CliError::Validation(format!("{}: {e}", path.display()))
        })
    }

    /// Validate against the model's bookkeeping rules.
    pub fn observed(&self) -> Result<ObservedData, stepstress::Error> {
        ObservedData::censor(&self.times, self.n, self.tau1, self.spec)
    }

    /// Digest of the canonical serialization, recorded in persisted outputs
    /// so any result can be traced to its exact input.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("n={};tau1={};spec={:?};", self.n, self.tau1, self.spec));
        for t in &self.times {
            hasher.update(format!("{t};"));
        }
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}
