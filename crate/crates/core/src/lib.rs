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

//! Spatial inhomogeneous random graphs (SIRGs).
//!
//! Vertices carry a position in `R^d` and a Pareto weight; two vertices are
//! joined independently with probability `kappa(distance, w1, w2)`. The crate
//! evaluates the local-limit quantities that govern the clustering function
//! `gamma(k)`, samples root neighbourhoods and finite graphs, and measures
//! clustering spectra on generated graphs.

pub mod analysis;
pub mod error;
pub mod graph;
pub mod mc;
pub mod model;
pub mod quad;
pub mod sampler;
pub mod theory;

pub use error::{Result, SirgError};
pub use mc::Estimate;
pub use model::{classify_regime, Alpha, Kernel, ModelParams, RegimeCase, RegimeLabel};
