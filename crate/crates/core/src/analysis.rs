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

//! Clustering spectra, log binning, slope fits and typical-triangle geometry.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Result, SirgError};
use crate::graph::Graph;
use crate::mc::{derive_seed, stream_rng};
use crate::model::{kappa_rd, ModelParams};
use crate::sampler::{dist_sq, rd_from_sq, NeighborSampler};
use crate::theory::mean_degree;

pub fn degrees(g: &Graph) -> Vec<usize> {
    (0..g.n()).map(|v| g.degree(v)).collect()
}

fn sorted_intersection(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// `Delta_v`: ordered pairs of neighbours of `v` that are adjacent (twice the triangles at `v`).
pub fn triangles_per_vertex(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            let nv = g.neighbors(v);
            nv.iter().map(|&u| sorted_intersection(nv, g.neighbors(u as usize))).sum()
        })
        .collect()
}

/// `(k, n_k, mean_cc)` for every degree `k >= 2` present in the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub k: usize,
    pub n_k: usize,
    pub mean_cc: f64,
}

/// Clustering spectrum: mean of `Delta_v / (k (k - 1))` over vertices of degree `k`.
pub fn clustering_spectrum(g: &Graph) -> Vec<SpectrumRow> {
    let tri = triangles_per_vertex(g);
    let mut acc: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for v in 0..g.n() {
        let k = g.degree(v);
        if k < 2 {
            continue;
        }
        let e = acc.entry(k).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += tri[v] as f64 / (k * (k - 1)) as f64;
    }
    acc.into_iter()
        .map(|(k, (n_k, s))| SpectrumRow {
            k,
            n_k,
            mean_cc: s / n_k as f64,
        })
        .collect()
}

/// Logarithmic bin of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct BinRow {
    /// `n_k`-weighted geometric mean of the degrees in the bin.
    pub k_gmean: f64,
    /// `n_k`-weighted mean clustering.
    pub cc: f64,
    pub n_weight: usize,
}

/// Bins with edges `10^{i / bins_per_decade}`.
pub fn log_binned_spectrum(rows: &[SpectrumRow], bins_per_decade: usize) -> Vec<BinRow> {
    let bpd = bins_per_decade.max(1) as f64;
    let mut bins: BTreeMap<i64, (usize, f64, f64)> = BTreeMap::new();
    for r in rows {
        // nudge so exact decade edges land in the upper bin
        let idx = ((r.k as f64).log10() * bpd + 1e-9).floor() as i64;
        let e = bins.entry(idx).or_insert((0, 0.0, 0.0));
        e.0 += r.n_k;
        e.1 += r.n_k as f64 * (r.k as f64).ln();
        e.2 += r.n_k as f64 * r.mean_cc;
    }
    bins.into_values()
        .filter(|b| b.0 > 0)
        .map(|(n, lk, cc)| BinRow {
            k_gmean: (lk / n as f64).exp(),
            cc: cc / n as f64,
            n_weight: n,
        })
        .collect()
}

/// Ordinary least squares fit of `log cc` on `log k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub n_points: usize,
}

/// Least squares line through `(x, y)`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    let n = xs.len();
    if n < 3 {
        return Err(SirgError::Estimation(format!("slope fit needs at least 3 points, got {}", n)));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(SirgError::Estimation("slope fit has no spread in x".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        intercept,
        slope_se: (rss / (n as f64 - 2.0) / sxx).sqrt(),
        n_points: n,
    })
}

/// Log-log slope of the binned spectrum over `k_gmean` in `[k_lo, k_hi]`, skipping `cc <= 0`.
pub fn fit_slope(bins: &[BinRow], k_lo: f64, k_hi: f64) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = bins
        .iter()
        .filter(|b| b.k_gmean >= k_lo && b.k_gmean <= k_hi && b.cc > 0.0)
        .map(|b| (b.k_gmean.ln(), b.cc.ln()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    ols(&xs, &ys)
}

/// Degree scale `psi(n)` beyond which finite graphs leave the infinite-model law.
pub fn finite_size_threshold(n: f64, a: f64, beta: f64) -> f64 {
    if beta >= (a + 1.0).max(2.0) {
        n.powf(1.0 / (beta - 1.0))
    } else {
        n.powf((2.0 + a - beta) / (beta - 1.0))
    }
}

/// Mean log-statistics of triangles at one root weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRow {
    pub w: f64,
    pub k: f64,
    pub n_triangles: u64,
    pub n_pairs: u64,
    /// Means of `log |x1|`, `log |x2|`, `log w1`, `log w2`, `log |x1 - x2|`.
    pub mean_log: [f64; 5],
    pub se_log: [f64; 5],
}

/// Names of the statistics in [`TriangleRow::mean_log`].
pub const TRIANGLE_STATS: [&str; 5] = ["norm_x1", "norm_x2", "w1", "w2", "norm_x1_minus_x2"];

/// Exponent of each statistic against `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleExponents {
    pub rows: Vec<TriangleRow>,
    pub exponents: [f64; 5],
    pub exponent_se: [f64; 5],
}

/// Geometry of the triangle formed by the root and two of its neighbours.
///
/// For each root weight `w`, ordered pairs of independent neighbours are
/// drawn and kept with probability `kappa(|x1 - x2|, w1, w2)`; the kept pairs
/// are distributed as a uniformly chosen triangle at the root. Collection
/// stops at `n_triangles` kept pairs or `100 n_triangles + 10^7` draws.
pub fn typical_triangle_stats(params: &ModelParams, w_grid: &[f64], n_triangles: u64, seed: u64) -> Result<TriangleExponents> {
    params.require_limit()?;
    if w_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SirgError::Domain("weight grid must be increasing".into()));
    }
    let d = params.d() as usize;
    let mut rows = Vec::new();
    for (gi, &w) in w_grid.iter().enumerate() {
        let s = NeighborSampler::new(w, params)?;
        let k = mean_degree(w, params)?;
        let mut rng = stream_rng(derive_seed(seed, gi as u64), 0);
        let mut sums = [0.0; 5];
        let mut sq = [0.0; 5];
        let (mut kept, mut drawn) = (0u64, 0u64);
        let cap = 100 * n_triangles + 10_000_000;
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        let zero = vec![0.0; d];
        while kept < n_triangles && drawn < cap {
            drawn += 1;
            let w1 = s.sample_into(&mut rng, &mut x);
            let w2 = s.sample_into(&mut rng, &mut y);
            let dxy = dist_sq(&x, &y);
            let p = kappa_rd(rd_from_sq(dxy, params.d()), params.g(w1, w2), params.alpha());
            if p < 1.0 && rng.random::<f64>() >= p {
                continue;
            }
            kept += 1;
            let stats = [
                0.5 * dist_sq(&x, &zero).ln(),
                0.5 * dist_sq(&y, &zero).ln(),
                w1.ln(),
                w2.ln(),
                0.5 * dxy.ln(),
            ];
            for i in 0..5 {
                sums[i] += stats[i];
                sq[i] += stats[i] * stats[i];
            }
        }
        if kept < 2 {
            return Err(SirgError::Estimation(format!("no triangles found at w={}", w)));
        }
        let n = kept as f64;
        let mut mean_log = [0.0; 5];
        let mut se_log = [0.0; 5];
        for i in 0..5 {
            mean_log[i] = sums[i] / n;
            let var = (sq[i] / n - mean_log[i] * mean_log[i]).max(0.0) * n / (n - 1.0);
            se_log[i] = (var / n).sqrt();
        }
        rows.push(TriangleRow {
            w,
            k,
            n_triangles: kept,
            n_pairs: drawn,
            mean_log,
            se_log,
        });
    }
    let lk: Vec<f64> = rows.iter().map(|r| r.k.ln()).collect();
    let mut exponents = [f64::NAN; 5];
    let mut exponent_se = [f64::NAN; 5];
    if rows.len() >= 3 {
        for i in 0..5 {
            let ys: Vec<f64> = rows.iter().map(|r| r.mean_log[i]).collect();
            let fit = ols(&lk, &ys)?;
            exponents[i] = fit.slope;
            exponent_se[i] = fit.slope_se;
        }
    }
    Ok(TriangleExponents {
        rows,
        exponents,
        exponent_se,
    })
}
