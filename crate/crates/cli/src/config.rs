//! Run configuration assembled from three layers: built-in defaults, an
//! optional flat `key=value` config file, and command-line flags (highest
//! precedence). Flag names and file keys mirror each other one-to-one.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nsexpander_core::params::{
    BoundaryData, CavitatingBoundaryData, PhysicalParams, SmoothBoundaryData, SolveConfig,
};
use nsexpander_core::profile::Case;

/// Raw string-valued settings, keyed by normalized flag name.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

pub const NUMERIC_KEYS: &[&str] = &[
    "d", "mu", "lambda", "cv", "kappa", "r-gas", "p0", "p-delta", "delta", "theta0", "alpha",
    "rmax", "cells", "grading", "tol", "max-iter", "damping", "rmin",
];

const ALL_KEYS: &[&str] = &[
    "case", "d", "mu", "lambda", "cv", "kappa", "r-gas", "p0", "p-delta", "delta", "theta0",
    "alpha", "rmax", "cells", "grading", "tol", "max-iter", "damping", "rmin", "out", "summary",
    "plots",
];

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.map.insert(normalize(key), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(&normalize(key)).map(String::as_str)
    }

    /// Parse a flat `key=value` file; `#` starts a comment, blank lines are
    /// skipped.
    pub fn load_file(path: &Path) -> Result<Settings, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut settings = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
            let key = normalize(key);
            if !ALL_KEYS.contains(&key.as_str()) {
                return Err(format!("{}:{}: unknown key `{key}`", path.display(), lineno + 1));
            }
            settings.set(&key, value.trim());
        }
        Ok(settings)
    }

    /// Overlay `other` (higher precedence) onto `self`.
    pub fn merged_with(mut self, other: &Settings) -> Settings {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
        self
    }

    fn parse_f64(&self, key: &str) -> Result<Option<f64>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|e| format!("invalid value for `{key}`: {e}")),
        }
    }

    fn parse_usize(&self, key: &str) -> Result<Option<usize>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<usize>()
                .map(Some)
                .map_err(|e| format!("invalid value for `{key}`: {e}")),
        }
    }
}

/// Fully resolved run description.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub case: Case,
    pub params: PhysicalParams<f64>,
    pub boundary: BoundaryData<f64>,
    pub config: SolveConfig<f64>,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub plots: Option<PathBuf>,
}

impl RunSpec {
    /// Resolve settings into a run description, applying per-case defaults.
    pub fn from_settings(s: &Settings) -> Result<RunSpec, String> {
        let case = match s.get("case") {
            Some("smooth") => Case::Smooth,
            Some("cavitating") => Case::Cavitating,
            Some(other) => return Err(format!("unknown case `{other}` (smooth|cavitating)")),
            None => return Err("missing `case` (smooth|cavitating)".to_string()),
        };
        let params = PhysicalParams {
            r_gas: s.parse_f64("r-gas")?.unwrap_or(1.0),
            mu: s.parse_f64("mu")?.unwrap_or(1.0),
            lambda: s.parse_f64("lambda")?.unwrap_or(0.0),
            c_v: s.parse_f64("cv")?.unwrap_or(1.0),
            kappa: s.parse_f64("kappa")?.unwrap_or(1.0),
            d: s.parse_usize("d")?.unwrap_or(3) as u32,
        };
        let boundary = match case {
            Case::Smooth => BoundaryData::Smooth(SmoothBoundaryData {
                p0: s.parse_f64("p0")?.unwrap_or(1.0),
                theta0: s
                    .parse_f64("theta0")?
                    .ok_or("smooth case needs `theta0`")?,
            }),
            Case::Cavitating => BoundaryData::Cavitating(CavitatingBoundaryData {
                p_delta: s.parse_f64("p-delta")?.ok_or("cavitating case needs `p-delta`")?,
                delta: s.parse_f64("delta")?.ok_or("cavitating case needs `delta`")?,
                theta0: s.parse_f64("theta0")?.ok_or("cavitating case needs `theta0`")?,
                alpha: s.parse_f64("alpha")?.ok_or("cavitating case needs `alpha`")?,
            }),
        };
        let base = match case {
            Case::Smooth => SolveConfig::smooth_default(),
            Case::Cavitating => SolveConfig::cavitating_default(),
        };
        let config = SolveConfig {
            r_max: s.parse_f64("rmax")?.unwrap_or(base.r_max),
            n_cells: s.parse_usize("cells")?.unwrap_or(base.n_cells),
            grading: s.parse_f64("grading")?.unwrap_or(base.grading),
            picard_tol: s.parse_f64("tol")?.unwrap_or(base.picard_tol),
            max_iter: s.parse_usize("max-iter")?.unwrap_or(base.max_iter),
            r_min: s.parse_f64("rmin")?,
            damping: s.parse_f64("damping")?.unwrap_or(base.damping),
        };
        Ok(RunSpec {
            case,
            params,
            boundary,
            config,
            out: s.get("out").map(PathBuf::from),
            summary: s.get("summary").map(PathBuf::from),
            plots: s.get("plots").map(PathBuf::from),
        })
    }
}

/// A sweep request: the key to vary and its values, in input order.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub key: String,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// Parse `key=v1,v2,...`.
    pub fn parse(text: &str) -> Result<SweepSpec, String> {
        let (key, list) = text
            .split_once('=')
            .ok_or("expected --sweep key=v1,v2,...")?;
        let key = normalize(key);
        if !NUMERIC_KEYS.contains(&key.as_str()) {
            return Err(format!("`{key}` is not a sweepable numeric key"));
        }
        let values = list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad value `{v}`: {e}")))
            .collect::<Result<Vec<f64>, String>>()?;
        if values.is_empty() {
            return Err("sweep needs at least one value".to_string());
        }
        Ok(SweepSpec { key, values })
    }

    /// Detect a comma-separated list left in a scalar setting (the
    /// `sweep --theta0 1e-4,2e-4,...` spelling) and extract it.
    pub fn extract_from_settings(settings: &mut Settings) -> Result<Option<SweepSpec>, String> {
        let mut found: Option<SweepSpec> = None;
        for &key in NUMERIC_KEYS {
            if let Some(v) = settings.get(key) {
                if v.contains(',') {
                    if found.is_some() {
                        return Err("only one key may carry a sweep list".to_string());
                    }
                    found = Some(SweepSpec::parse(&format!("{key}={v}"))?);
                }
            }
        }
        if let Some(spec) = &found {
            settings.map.remove(&spec.key);
        }
        Ok(found)
    }
}
