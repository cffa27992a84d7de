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


//! Run manifests: the resolved configuration of a command plus provenance.

use std::collections::BTreeMap;
use std::path::Path;

use sirg_core::{Result, SirgError};

use crate::config::parse_kv;

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Everything needed to re-run a command and reproduce its CSV outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// Resolved configuration values consumed by the command.
    pub config: BTreeMap<String, String>,
    /// Output paths relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut s = String::from("# sirg run manifest\n");
        s += &format!("command={}\nversion={}\ntimestamp={}\n", self.command, self.version, self.timestamp);
        for (k, v) in &self.config {
            s += &format!("config.{}={}\n", k, v);
        }
        for o in &self.outputs {
            s += &format!("output={}\n", o);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut command = None;
        let mut version = String::new();
        let mut timestamp = 0;
        let mut config = BTreeMap::new();
        let mut outputs = Vec::new();
        // outputs repeat, so parse line by line rather than through a map
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let single = parse_kv(line)?;
            let (k, v) = single.into_iter().next().expect("one pair per line");
            match k.as_str() {
                "command" => command = Some(v),
                "version" => version = v,
                "timestamp" => {
                    timestamp = v
                        .parse()
                        .map_err(|_| SirgError::Parse(format!("timestamp: '{}'", v)))?
                }
                "output" => outputs.push(v),
                _ => match k.strip_prefix("config.") {
                    Some(key) => {
                        config.insert(key.to_string(), v);
                    }
                    None => return Err(SirgError::Parse(format!("unknown manifest key '{}'", k))),
                },
            }
        }
        Ok(RunManifest {
            command: command.ok_or_else(|| SirgError::Parse("manifest has no command".into()))?,
            version,
            timestamp,
            config,
            outputs,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(MANIFEST_FILE), self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        RunManifest::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let m = RunManifest {
            command: "theory".into(),
            version: "0.1.0".into(),
            timestamp: 42,
            config: [("beta".to_string(), "4".to_string()), ("k_grid".to_string(), "10,100".to_string())]
                .into_iter()
                .collect(),
            outputs: vec!["theory.csv".into(), "gamma.csv".into()],
        };
        assert_eq!(RunManifest::parse(&m.to_text()).unwrap(), m);
    }
}
