// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.


//! Layered `key=value` configuration: file, then `SIRG_*` environment
//! variables, then command-line flags.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use sirg_core::model::{Alpha, Kernel, ModelParams};
use sirg_core::{Result, SirgError};

/// Keys understood by at least one command.
pub const KNOWN_KEYS: &[&str] = &[
    "d",
    "alpha",
    "beta",
    "a",
    "kernel",
    "seed",
    "samples",
    "n",
    "torus",
    "format",
    "graph",
    "bins_per_decade",
    "k_lo",
    "k_hi",
    "k_grid",
    "w_grid",
    "a_min",
    "a_max",
    "beta_min",
    "beta_max",
    "resolution",
    "figure",
    "alphas",
    "seeds",
    "triangles",
];

/// Default master seed.
pub const DEFAULT_SEED: u64 = 0x5152_4700_51A6;

/// Resolved configuration. Every value read through a getter is recorded
/// so that the run manifest lists exactly what the command used.
#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeMap<String, String>>,
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| SirgError::Parse(format!("line {}: expected key=value, got '{}'", i + 1, line)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl Config {
    pub fn from_map(values: BTreeMap<String, String>) -> Self {
        Config {
            values,
            used: RefCell::default(),
        }
    }

    /// Builds the layered configuration. `env` is a list of `(name, value)`
    /// pairs; only `SIRG_<KEY>` names for known keys are taken.
    pub fn layered(file: Option<&Path>, env: &[(String, String)], flags: &BTreeMap<String, String>) -> Result<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)?;
            for (k, v) in parse_kv(&text)? {
                check_key(&k)?;
                values.insert(k, v);
            }
        }
        for (name, v) in env {
            if let Some(key) = name.strip_prefix("SIRG_") {
                let key = key.to_ascii_lowercase();
                if KNOWN_KEYS.contains(&key.as_str()) {
                    values.insert(key, v.clone());
                }
            }
        }
        for (k, v) in flags {
            check_key(k)?;
            values.insert(k.clone(), v.clone());
        }
        Ok(Config::from_map(values))
    }

    fn record(&self, key: &str, value: String) {
        self.used.borrow_mut().insert(key.to_string(), value);
    }

    /// Keys read so far with their resolved values.
    pub fn used(&self) -> BTreeMap<String, String> {
        self.used.borrow().clone()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// Typed value with a default.
    pub fn get<T: FromStr + ToString>(&self, key: &str, default: T) -> Result<T> {
        let v = match self.values.get(key) {
            Some(s) => s
                .parse::<T>()
                .map_err(|_| SirgError::Parse(format!("{}: cannot parse '{}'", key, s)))?,
            None => default,
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    /// Optional string value.
    pub fn get_opt(&self, key: &str) -> Option<String> {
        let v = self.values.get(key).cloned();
        if let Some(s) = &v {
            self.record(key, s.clone());
        }
        v
    }

    /// Comma separated list of numbers; `lo:hi:count` expands to a geometric grid.
    pub fn get_list(&self, key: &str, default: &str) -> Result<Vec<f64>> {
        let s = self.values.get(key).map(|s| s.as_str()).unwrap_or(default).to_string();
        let v = parse_list(key, &s)?;
        self.record(key, s);
        Ok(v)
    }

    pub fn seed(&self) -> Result<u64> {
        self.get("seed", DEFAULT_SEED)
    }

    /// Model parameters for the infinite-model theory (strict validation).
    pub fn params(&self) -> Result<ModelParams> {
        let (d, alpha, beta, a, kernel) = self.param_parts()?;
        ModelParams::new(d, alpha, beta, a, kernel)
    }

    /// Model parameters for finite-graph simulation (`alpha > 0` allowed).
    pub fn finite_params(&self) -> Result<ModelParams> {
        let (d, alpha, beta, a, kernel) = self.param_parts()?;
        ModelParams::new_finite(d, alpha, beta, a, kernel)
    }

    fn param_parts(&self) -> Result<(u32, Alpha, f64, f64, Kernel)> {
        let d: u32 = self.get("d", 2)?;
        let alpha: Alpha = self.get("alpha", Alpha::Finite(2.0))?;
        let beta: f64 = self.get("beta", 4.0)?;
        let kernel: Kernel = self.get("kernel", Kernel::Interpolation)?;
        let a: f64 = self.get("a", 1.0)?;
        Ok((d, alpha, beta, a, kernel))
    }
}

fn check_key(k: &str) -> Result<()> {
    if KNOWN_KEYS.contains(&k) {
        Ok(())
    } else {
        Err(SirgError::Parse(format!("unknown configuration key '{}'", k)))
    }
}

/// Parses `1,2,3` or `lo:hi:count` (geometric).
pub fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    let bad = || SirgError::Parse(format!("{}: cannot parse list '{}'", key, s));
    if let Some((lo, rest)) = s.split_once(':') {
        let (hi, count) = rest.split_once(':').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        if !(lo > 0.0 && hi > lo && count >= 2) {
            return Err(bad());
        }
        return Ok((0..count)
            .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
            .collect());
    }
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}
