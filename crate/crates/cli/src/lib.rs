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


//! Command-line front end for `sirg-core`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use sirg_core::{Result, SirgError};

pub mod commands;
pub mod config;
pub mod manifest;
pub mod plot;

use config::Config;
use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "sirg", version, about = "Clustering in spatial inhomogeneous random graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// key=value parameter file (lowest precedence)
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub d: Option<u32>,
    /// Finite value or "inf"
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// interp or boolean
    #[arg(long, global = true)]
    pub kernel: Option<String>,
    /// Any other configuration key, e.g. --set k_grid=10,100
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a finite graph and serialize it
    Generate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        torus: bool,
        /// text or binary
        #[arg(long)]
        format: Option<String>,
    },
    /// Clustering spectrum of a generated or stored graph
    Spectrum {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Limit-model quantities on k and w grids
    Theory,
    /// Regime of every (a, beta) cell of a grid
    PhaseDiagram,
    /// Finite-graph clustering spectra for the fig5a/fig5b/fig5c setups
    Reproduce {
        figure: String,
        #[arg(long)]
        n: Option<usize>,
        /// Number of independent graphs per alpha
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Triangle integral against its lower and upper bounds
    Sandwich,
    /// Typical size of triangles at the root as the root weight grows
    TriangleGeometry,
    /// Re-run a command from its manifest
    Replay { manifest: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate { .. } => "generate",
            Command::Spectrum { .. } => "spectrum",
            Command::Theory => "theory",
            Command::PhaseDiagram => "phase-diagram",
            Command::Reproduce { .. } => "reproduce",
            Command::Sandwich => "sandwich",
            Command::TriangleGeometry => "triangle-geometry",
            Command::Replay { .. } => "replay",
        }
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &SirgError) -> i32 {
    match e {
        SirgError::InvalidParams(_) | SirgError::UnsupportedRegime { .. } | SirgError::Domain(_) | SirgError::Parse(_) => 2,
        SirgError::Estimation(_) => 3,
        SirgError::Io(_) => 4,
    }
}

fn flag_map(cli: &Cli) -> Result<BTreeMap<String, String>> {
    let g = &cli.global;
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            m.insert(k.to_string(), v);
        }
    };
    put("seed", g.seed.map(|x| x.to_string()));
    put("samples", g.samples.map(|x| x.to_string()));
    put("d", g.d.map(|x| x.to_string()));
    put("alpha", g.alpha.clone());
    put("beta", g.beta.map(|x| x.to_string()));
    put("a", g.a.map(|x| x.to_string()));
    put("kernel", g.kernel.clone());
    match &cli.command {
        Command::Generate { n, torus, format } => {
            put("n", n.map(|x| x.to_string()));
            put("torus", torus.then(|| "true".to_string()));
            put("format", format.clone());
        }
        Command::Spectrum { graph, n } => {
            put("graph", graph.as_ref().map(|p| p.display().to_string()));
            put("n", n.map(|x| x.to_string()));
        }
        Command::Reproduce { figure, n, seeds } => {
            put("figure", Some(figure.clone()));
            put("n", n.map(|x| x.to_string()));
            put("seeds", seeds.map(|x| x.to_string()));
        }
        _ => {}
    }
    for s in &g.set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| SirgError::Parse(format!("--set expects KEY=VALUE, got '{}'", s)))?;
        m.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(m)
}

fn dispatch(command: &str, cfg: &Config, out: &Path) -> Result<Vec<String>> {
    match command {
        "generate" => commands::generate(cfg, out),
        "spectrum" => commands::spectrum(cfg, out),
        "theory" => commands::theory(cfg, out),
        "phase-diagram" => commands::phase_diagram(cfg, out),
        "reproduce" => commands::reproduce(cfg, out),
        "sandwich" => commands::sandwich(cfg, out),
        "triangle-geometry" => commands::triangle_geometry(cfg, out),
        other => Err(SirgError::Parse(format!("manifest names unknown command '{}'", other))),
    }
}

fn execute(command: &str, cfg: &Config, out: &Path) -> Result<RunManifest> {
    std::fs::create_dir_all(out)?;
    let outputs = dispatch(command, cfg, out)?;
    let m = RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        config: cfg.used(),
        outputs,
    };
    m.write(out)?;
    Ok(m)
}

/// Runs a parsed command line. `env` holds the process environment.
pub fn run(cli: &Cli, env: &[(String, String)]) -> Result<RunManifest> {
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(SirgError::Parse("--threads must be positive".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    if let Command::Replay { manifest } = &cli.command {
        let m = RunManifest::read(manifest)?;
        // out defaults to the manifest's directory unless given explicitly
        let out = if cli.global.out == Path::new(".") {
            manifest.parent().map(Path::to_path_buf).unwrap_or_default()
        } else {
            cli.global.out.clone()
        };
        let out = if out.as_os_str().is_empty() { PathBuf::from(".") } else { out };
        let cfg = Config::from_map(m.config);
        return execute(&m.command, &cfg, &out);
    }
    let cfg = Config::layered(cli.global.params.as_deref(), env, &flag_map(cli)?)?;
    execute(cli.command.name(), &cfg, &cli.global.out)
}
