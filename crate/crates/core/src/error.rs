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

use thiserror::Error;

/// Errors produced by model construction, theory evaluation and sampling.
#[derive(Debug, Error)]
pub enum SirgError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported regime: a={a}, beta={beta} lies on a boundary without a scaling law")]
    UnsupportedRegime { a: f64, beta: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SirgError>;
