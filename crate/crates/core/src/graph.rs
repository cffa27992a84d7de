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

//! Finite SIRGs: generation and (de)serialisation.

use std::io::{BufRead, Read, Write};

use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::error::{Result, SirgError};
use crate::mc::stream_rng;
use crate::model::{kappa_rd, Alpha, Kernel, ModelParams};
use crate::sampler::{rd_from_sq, sample_pareto};

/// Undirected simple graph with optional vertex positions and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    d: u32,
    params: Option<ModelParams>,
    torus: bool,
    /// Flattened positions, `d` per vertex; empty for abstract graphs.
    positions: Vec<f64>,
    weights: Vec<f64>,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// Abstract graph from an edge list; duplicates and loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(SirgError::Domain(format!("invalid edge ({}, {}) for n={}", u, v, n)));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(SirgError::Domain(format!("duplicate edge at vertex {}", v)));
            }
        }
        Ok(Graph {
            n,
            d: 0,
            params: None,
            torus: false,
            positions: Vec::new(),
            weights: Vec::new(),
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn d(&self) -> u32 {
        self.d
    }
    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }
    pub fn is_torus(&self) -> bool {
        self.torus
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn position(&self, v: usize) -> &[f64] {
        let d = self.d as usize;
        &self.positions[v * d..(v + 1) * d]
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().filter(move |&&j| j as usize > i).map(move |&j| (i, j as usize)))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }
}

/// Options for [`generate_finite_sirg_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct GenOptions {
    /// Measure distances on the torus instead of the box.
    pub torus: bool,
}

/// Finite SIRG on `n` vertices in the box `[-n^{1/d}/2, n^{1/d}/2]^d`.
pub fn generate_finite_sirg(n: usize, params: &ModelParams, seed: u64) -> Result<Graph> {
    generate_finite_sirg_with(n, params, seed, GenOptions::default())
}

/// Finite SIRG generator.
///
/// Positions and weights come from substream 0 of `seed`; pair decisions in
/// row `i` (pairs `(i, j)`, `j > i`) use substream `i + 1`, so the output is
/// the same for any number of threads.
pub fn generate_finite_sirg_with(n: usize, params: &ModelParams, seed: u64, opts: GenOptions) -> Result<Graph> {
    if n == 0 {
        return Err(SirgError::Domain("n must be positive".into()));
    }
    if n > u32::MAX as usize {
        return Err(SirgError::Domain("n exceeds the supported vertex count".into()));
    }
    let d = params.d() as usize;
    let side = (n as f64).powf(1.0 / d as f64);
    let mut rng = stream_rng(seed, 0);
    let mut positions = vec![0.0; n * d];
    let mut weights = vec![0.0; n];
    for v in 0..n {
        for c in 0..d {
            positions[v * d + c] = (rng.random::<f64>() - 0.5) * side;
        }
        weights[v] = sample_pareto(params.beta(), &mut rng);
    }
    let ctx = PairCtx {
        params: *params,
        d,
        side,
        torus: opts.torus,
        positions: &positions,
        weights: &weights,
        wa: weights.iter().map(|w| w.powf(params.a())).collect(),
    };
    let rows: Vec<Vec<u32>> = if params.alpha().is_infinite() && !opts.torus {
        ctx.threshold_rows(n)
    } else {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, i as u64 + 1);
                match d {
                    1 => ctx.row::<1, _>(i, &mut rng),
                    2 => ctx.row::<2, _>(i, &mut rng),
                    3 => ctx.row::<3, _>(i, &mut rng),
                    _ => ctx.row_generic(i, &mut rng),
                }
            })
            .collect()
    };
    let mut adj = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            adj[i].push(j);
            adj[j as usize].push(i as u32);
        }
    }
    adj.par_iter_mut().for_each(|l| l.sort_unstable());
    Ok(Graph {
        n,
        d: params.d(),
        params: Some(*params),
        torus: opts.torus,
        positions,
        weights,
        adj,
    })
}

struct PairCtx<'a> {
    params: ModelParams,
    d: usize,
    side: f64,
    torus: bool,
    positions: &'a [f64],
    weights: &'a [f64],
    wa: Vec<f64>,
}

impl PairCtx<'_> {
    #[inline]
    fn g(&self, i: usize, j: usize) -> f64 {
        let (wi, wj) = (self.weights[i], self.weights[j]);
        match self.params.kernel() {
            Kernel::Interpolation => {
                if wi >= wj {
                    wi * self.wa[j]
                } else {
                    wj * self.wa[i]
                }
            }
            Kernel::Boolean => self.params.g(wi, wj),
        }
    }

    #[inline]
    fn rd(&self, i: usize, j: usize) -> f64 {
        let d = self.d;
        let (x, y) = (&self.positions[i * d..i * d + d], &self.positions[j * d..j * d + d]);
        let mut sq = 0.0;
        for c in 0..d {
            let mut t = (x[c] - y[c]).abs();
            if self.torus && t > 0.5 * self.side {
                t = self.side - t;
            }
            sq += t * t;
        }
        rd_from_sq(sq, self.d as u32)
    }

    #[inline]
    fn prob(&self, i: usize, j: usize) -> f64 {
        kappa_rd(self.rd(i, j), self.g(i, j), self.params.alpha())
    }

    fn row_generic<R: RngCore>(&self, i: usize, rng: &mut R) -> Vec<u32> {
        let mut out = Vec::new();
        for j in (i + 1)..self.weights.len() {
            if bernoulli(rng, self.prob(i, j)) {
                out.push(j as u32);
            }
        }
        out
    }

    /// Row `i` for a fixed dimension; same decisions as [`PairCtx::row_generic`].
    fn row<const D: usize, R: RngCore>(&self, i: usize, rng: &mut R) -> Vec<u32> {
        let mut xi = [0.0; D];
        xi.copy_from_slice(&self.positions[i * D..i * D + D]);
        let (wi, wai) = (self.weights[i], self.wa[i]);
        let boolean = self.params.kernel() == Kernel::Boolean;
        let alpha = self.params.alpha();
        let (side, half, torus) = (self.side, 0.5 * self.side, self.torus);
        let mut out = Vec::new();
        let rest = self.positions[(i + 1) * D..].chunks_exact(D);
        let ws = self.weights[i + 1..].iter().zip(&self.wa[i + 1..]);
        for (off, (pj, (&wj, &waj))) in rest.zip(ws).enumerate() {
            let mut sq = 0.0;
            for c in 0..D {
                let mut t = (xi[c] - pj[c]).abs();
                if torus && t > half {
                    t = side - t;
                }
                sq += t * t;
            }
            let rd = match D {
                1 => sq.sqrt(),
                2 => sq,
                _ => sq * sq.sqrt(),
            };
            let g = if boolean {
                (wi + wj).powi(D as i32)
            } else if wi >= wj {
                wi * waj
            } else {
                wj * wai
            };
            if bernoulli(rng, kappa_rd(rd, g, alpha)) {
                out.push((i + 1 + off) as u32);
            }
        }
        out
    }

    /// Hard-threshold rows via a sweep over the first coordinate.
    fn threshold_rows(&self, n: usize) -> Vec<Vec<u32>> {
        let d = self.d;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&u, &v| self.positions[u * d].partial_cmp(&self.positions[v * d]).unwrap());
        let w_max = self.weights.iter().cloned().fold(1.0, f64::max);
        let inv_d = 1.0 / d as f64;
        let found: Vec<Vec<(u32, u32)>> = (0..n)
            .into_par_iter()
            .map(|s| {
                let i = order[s];
                let reach = self.params.g(self.weights[i], w_max).powf(inv_d);
                let xi = self.positions[i * d];
                let mut out = Vec::new();
                for &j in &order[s + 1..] {
                    if self.positions[j * d] - xi >= reach {
                        break;
                    }
                    if self.rd(i, j) < self.g(i, j) {
                        let (a, b) = if i < j { (i, j) } else { (j, i) };
                        out.push((a as u32, b as u32));
                    }
                }
                out
            })
            .collect();
        let mut rows = vec![Vec::new(); n];
        for (a, b) in found.into_iter().flatten() {
            rows[a as usize].push(b);
        }
        rows
    }
}

/// Exact Bernoulli(`p`) draw that usually consumes a single 32-bit word.
#[inline]
fn bernoulli<R: RngCore>(rng: &mut R, p: f64) -> bool {
    if p >= 1.0 {
        return true;
    }
    if p <= 0.0 {
        return false;
    }
    const EPS: f64 = 1.0 / 4294967296.0;
    let x = rng.next_u32() as f64 * EPS;
    if x + EPS <= p {
        true
    } else if x > p {
        false
    } else {
        x + rng.random::<f64>() * EPS < p
    }
}

const MAGIC: &[u8; 8] = b"SIRGBIN1";

fn header_fields(g: &Graph) -> String {
    let mut s = format!("n={} d={} torus={}", g.n, g.d, g.torus as u8);
    if let Some(p) = &g.params {
        s.push_str(&format!(
            " alpha={} beta={} a={} kernel={}",
            p.alpha(),
            p.beta(),
            p.a(),
            p.kernel()
        ));
    }
    s
}

/// Writes the text format: a header, one line per vertex, then sorted edges.
pub fn write_text<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "sirg-graph {} m={}", header_fields(g), g.num_edges())?;
    let has_pos = !g.weights.is_empty();
    for v in 0..g.n {
        if has_pos {
            let coords: Vec<String> = g.position(v).iter().map(|x| x.to_string()).collect();
            writeln!(out, "v {} {}", coords.join(" "), g.weights[v])?;
        } else {
            writeln!(out, "v")?;
        }
    }
    for (i, j) in g.edges() {
        writeln!(out, "e {} {}", i, j)?;
    }
    out.flush()?;
    Ok(())
}

fn parse_err(msg: impl Into<String>) -> SirgError {
    SirgError::Parse(msg.into())
}

/// Reads the text format written by [`write_text`].
pub fn read_text<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty graph file"))??;
    let mut fields = std::collections::BTreeMap::new();
    let mut toks = header.split_whitespace();
    if toks.next() != Some("sirg-graph") {
        return Err(parse_err("missing sirg-graph header"));
    }
    for t in toks {
        let (k, v) = t.split_once('=').ok_or_else(|| parse_err(format!("bad header field '{}'", t)))?;
        fields.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| fields.get(k).ok_or_else(|| parse_err(format!("header lacks {}", k)));
    let num = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| parse_err(format!("bad {}", k))) };
    let n = num("n")?;
    let d = num("d")? as u32;
    let m = num("m")?;
    let torus = num("torus")? == 1;
    let params = if fields.contains_key("beta") {
        let f = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| parse_err(format!("bad {}", k))) };
        Some(ModelParams::new_finite(
            d,
            get("alpha")?.parse::<Alpha>()?,
            f("beta")?,
            f("a")?,
            get("kernel")?.parse::<Kernel>()?,
        )?)
    } else {
        None
    };
    let mut positions = Vec::new();
    let mut weights = Vec::new();
    for _ in 0..n {
        let line = lines.next().ok_or_else(|| parse_err("truncated vertex section"))??;
        let mut t = line.split_whitespace();
        if t.next() != Some("v") {
            return Err(parse_err("expected vertex line"));
        }
        let vals: Vec<f64> = t
            .map(|x| x.parse::<f64>().map_err(|_| parse_err(format!("bad number '{}'", x))))
            .collect::<Result<_>>()?;
        if vals.is_empty() {
            continue;
        }
        if vals.len() != d as usize + 1 {
            return Err(parse_err("vertex line has wrong arity"));
        }
        positions.extend_from_slice(&vals[..d as usize]);
        weights.push(vals[d as usize]);
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next().ok_or_else(|| parse_err("truncated edge section"))??;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 || t[0] != "e" {
            return Err(parse_err(format!("bad edge line '{}'", line)));
        }
        let i: usize = t[1].parse().map_err(|_| parse_err("bad edge index"))?;
        let j: usize = t[2].parse().map_err(|_| parse_err("bad edge index"))?;
        edges.push((i, j));
    }
    let mut g = Graph::from_edges(n, &edges)?;
    g.d = d;
    g.params = params;
    g.torus = torus;
    g.positions = positions;
    g.weights = weights;
    Ok(g)
}

/// Writes the little-endian binary format.
pub fn write_binary<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(g.n as u64).to_le_bytes())?;
    out.write_all(&g.d.to_le_bytes())?;
    out.write_all(&[g.torus as u8, g.params.is_some() as u8, (!g.weights.is_empty()) as u8])?;
    if let Some(p) = &g.params {
        let alpha = match p.alpha() {
            Alpha::Infinite => f64::INFINITY,
            Alpha::Finite(a) => a,
        };
        for x in [alpha, p.beta(), p.a()] {
            out.write_all(&x.to_le_bytes())?;
        }
        out.write_all(&[(p.kernel() == Kernel::Boolean) as u8])?;
    }
    for x in g.positions.iter().chain(&g.weights) {
        out.write_all(&x.to_le_bytes())?;
    }
    out.write_all(&(g.num_edges() as u64).to_le_bytes())?;
    for (i, j) in g.edges() {
        out.write_all(&(i as u32).to_le_bytes())?;
        out.write_all(&(j as u32).to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn read_bytes<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

/// Reads the binary format written by [`write_binary`].
pub fn read_binary<R: Read>(mut r: R) -> Result<Graph> {
    if &read_bytes::<_, 8>(&mut r)? != MAGIC {
        return Err(parse_err("not a binary sirg graph"));
    }
    let n = u64::from_le_bytes(read_bytes(&mut r)?) as usize;
    let d = u32::from_le_bytes(read_bytes(&mut r)?);
    let [torus, has_params, has_pos] = read_bytes::<_, 3>(&mut r)?;
    let f64_le = |r: &mut R| -> Result<f64> { Ok(f64::from_le_bytes(read_bytes(r)?)) };
    let params = if has_params == 1 {
        let alpha = f64_le(&mut r)?;
        let beta = f64_le(&mut r)?;
        let a = f64_le(&mut r)?;
        let [k] = read_bytes::<_, 1>(&mut r)?;
        let alpha = if alpha.is_infinite() { Alpha::Infinite } else { Alpha::Finite(alpha) };
        let kernel = if k == 1 { Kernel::Boolean } else { Kernel::Interpolation };
        Some(ModelParams::new_finite(d, alpha, beta, a, kernel)?)
    } else {
        None
    };
    let (mut positions, mut weights) = (Vec::new(), Vec::new());
    if has_pos == 1 {
        for _ in 0..n * d as usize {
            positions.push(f64_le(&mut r)?);
        }
        for _ in 0..n {
            weights.push(f64_le(&mut r)?);
        }
    }
    let m = u64::from_le_bytes(read_bytes(&mut r)?) as usize;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let i = u32::from_le_bytes(read_bytes(&mut r)?) as usize;
        let j = u32::from_le_bytes(read_bytes(&mut r)?) as usize;
        edges.push((i, j));
    }
    let mut g = Graph::from_edges(n, &edges)?;
    g.d = d;
    g.params = params;
    g.torus = torus == 1;
    g.positions = positions;
    g.weights = weights;
    Ok(g)
}
