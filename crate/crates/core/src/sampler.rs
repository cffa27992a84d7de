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

//! Samplers for weights, connection kernels and root neighbourhoods.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Result, SirgError};
use crate::mc::{Estimate, Moments};
use crate::model::{Alpha, Kernel, ModelParams};
use crate::theory::mean_degree;

/// Draws a Pareto weight with density `(beta - 1) w^{-beta}` on `w > 1`.
#[inline]
pub fn sample_pareto<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    u.powf(-1.0 / (beta - 1.0))
}

/// Fills `out` with a uniformly random unit vector.
#[inline]
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    if out.len() == 1 {
        out[0] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        return;
    }
    loop {
        let mut n2 = 0.0;
        for x in out.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *x = z;
            n2 += z * z;
        }
        if n2 > 1e-300 {
            let s = 1.0 / n2.sqrt();
            out.iter_mut().for_each(|x| *x *= s);
            return;
        }
    }
}

/// Normalised law of `x -> kappa(|x|)` for a kernel value `g`.
#[derive(Debug, Clone, Copy)]
pub struct RadialLaw {
    pub g: f64,
    pub alpha: Alpha,
    pub d: u32,
}

impl RadialLaw {
    pub fn new(g: f64, alpha: Alpha, d: u32) -> Self {
        RadialLaw { g, alpha, d }
    }

    /// Total mass `int kappa(|x|) dx`.
    pub fn mass(&self) -> f64 {
        self.alpha.tail_factor() * crate::model::omega_d(self.d) * self.g
    }

    /// Draws `|X|^d`.
    #[inline]
    pub fn sample_rd<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.alpha {
            Alpha::Infinite => self.g * rng.random::<f64>(),
            Alpha::Finite(al) => {
                if rng.random::<f64>() * al < al - 1.0 {
                    self.g * rng.random::<f64>()
                } else {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    self.g * u.powf(-1.0 / (al - 1.0))
                }
            }
        }
    }

    /// Draws a point `X` into `out`.
    #[inline]
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let rd = self.sample_rd(rng);
        let r = radius_from_rd(rd, self.d);
        random_direction(rng, out);
        out.iter_mut().for_each(|x| *x *= r);
    }
}

#[inline]
pub(crate) fn radius_from_rd(rd: f64, d: u32) -> f64 {
    match d {
        1 => rd,
        2 => rd.sqrt(),
        3 => rd.cbrt(),
        _ => rd.powf(1.0 / d as f64),
    }
}

/// `|x|^d` from a squared norm.
#[inline]
pub(crate) fn rd_from_sq(sq: f64, d: u32) -> f64 {
    match d {
        1 => sq.sqrt(),
        2 => sq,
        3 => sq * sq.sqrt(),
        4 => sq * sq,
        _ => sq.powf(d as f64 / 2.0),
    }
}

#[inline]
pub(crate) fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Sampler for a single neighbour of a root with weight `w`.
///
/// The neighbour weight has density proportional to
/// `f_W(v) g(w, v)`; given the weight, the position follows the radial law
/// of `kappa(., w, v)`.
#[derive(Debug, Clone)]
pub struct NeighborSampler {
    params: ModelParams,
    w: f64,
    weights: WeightMixture,
}

#[derive(Debug, Clone)]
enum WeightMixture {
    /// Interpolation kernel: piece on `(1, w]` with exponent `p`, Pareto-type tail beyond `w`.
    Interp { p_low: f64, log_w: f64, expm: f64 },
    /// Boolean kernel: binomial components with cumulative probabilities.
    Boolean { cum: Vec<f64> },
}

impl NeighborSampler {
    pub fn new(w: f64, params: &ModelParams) -> Result<Self> {
        if !(w >= 1.0) || !w.is_finite() {
            return Err(SirgError::Domain(format!("root weight w={} must be >= 1", w)));
        }
        let (a, b) = (params.a(), params.beta());
        let weights = match params.kernel() {
            Kernel::Interpolation => {
                let log_w = w.ln();
                let e = a + 1.0 - b;
                let (low, expm) = if e.abs() < 1e-12 {
                    (w * log_w, 0.0)
                } else {
                    let expm = (e * log_w).exp_m1();
                    (w * expm / e, expm)
                };
                let high = w.powf(a + 2.0 - b) / (b - 2.0);
                WeightMixture::Interp {
                    p_low: low / (low + high),
                    log_w,
                    expm,
                }
            }
            Kernel::Boolean => {
                let d = params.d() as i32;
                let mut terms = Vec::with_capacity(d as usize + 1);
                for j in 0..=d {
                    terms.push(binom(d as u32, j as u32) * w.powi(d - j) / (b - 1.0 - j as f64));
                }
                let tot: f64 = terms.iter().sum();
                let mut acc = 0.0;
                let cum = terms
                    .iter()
                    .map(|t| {
                        acc += t / tot;
                        acc
                    })
                    .collect();
                WeightMixture::Boolean { cum }
            }
        };
        Ok(NeighborSampler {
            params: *params,
            w,
            weights,
        })
    }

    pub fn root_weight(&self) -> f64 {
        self.w
    }

    /// Draws the neighbour weight.
    #[inline]
    pub fn sample_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let b = self.params.beta();
        match &self.weights {
            WeightMixture::Interp { p_low, log_w, expm } => {
                let u: f64 = rng.random();
                if rng.random::<f64>() < *p_low {
                    let e = self.params.a() + 1.0 - b;
                    if e.abs() < 1e-12 {
                        (u * log_w).exp()
                    } else {
                        ((u * expm).ln_1p() / e).exp()
                    }
                } else {
                    let u = 1.0 - u;
                    self.w * u.powf(-1.0 / (b - 2.0))
                }
            }
            WeightMixture::Boolean { cum } => {
                let u: f64 = rng.random();
                let j = cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1);
                let v: f64 = 1.0 - rng.random::<f64>();
                v.powf(-1.0 / (b - 1.0 - j as f64))
            }
        }
    }

    /// Draws a neighbour: position into `pos`, returns its weight.
    #[inline]
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, pos: &mut [f64]) -> f64 {
        let v = self.sample_weight(rng);
        let law = RadialLaw::new(self.params.g(self.w, v), self.params.alpha(), self.params.d());
        law.sample_point(rng, pos);
        v
    }
}

fn binom(n: u32, k: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Draws one neighbour of a root with weight `w`: `(position, weight)`.
pub fn sample_neighbor<R: Rng + ?Sized>(w: f64, params: &ModelParams, rng: &mut R) -> Result<(Vec<f64>, f64)> {
    let s = NeighborSampler::new(w, params)?;
    let mut pos = vec![0.0; params.d() as usize];
    let v = s.sample_into(rng, &mut pos);
    Ok((pos, v))
}

/// Neighbourhood of the root in the Palm version of the infinite model.
#[derive(Debug, Clone, PartialEq)]
pub struct RootNeighborhood {
    pub root_weight: f64,
    /// Flattened positions, `d` coordinates per neighbour.
    pub positions: Vec<f64>,
    pub weights: Vec<f64>,
    pub d: u32,
}

impl RootNeighborhood {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn position(&self, i: usize) -> &[f64] {
        let d = self.d as usize;
        &self.positions[i * d..(i + 1) * d]
    }

    /// Draws the edges among neighbours and returns their number.
    pub fn count_neighbor_edges<R: Rng + ?Sized>(&self, params: &ModelParams, rng: &mut R) -> u64 {
        let mut edges = 0;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let rd = rd_from_sq(dist_sq(self.position(i), self.position(j)), self.d);
                let p = crate::model::kappa_rd(rd, params.g(self.weights[i], self.weights[j]), params.alpha());
                if p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p) {
                    edges += 1;
                }
            }
        }
        edges
    }
}

fn poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    if lambda <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(lambda).map_err(|e| SirgError::Estimation(format!("poisson({}): {}", lambda, e)))?;
    Ok(dist.sample(rng) as u64)
}

/// Samples the neighbours of a root with weight `w`.
///
/// The neighbour count is Poisson with mean `M(w)` and the neighbours are
/// i.i.d. draws of [`sample_neighbor`].
pub fn sample_root_neighborhood<R: Rng + ?Sized>(w: f64, params: &ModelParams, rng: &mut R) -> Result<RootNeighborhood> {
    params.require_limit()?;
    let sampler = NeighborSampler::new(w, params)?;
    let n = poisson(mean_degree(w, params)?, rng)? as usize;
    Ok(fill_neighborhood(&sampler, n, params, rng))
}

fn fill_neighborhood<R: Rng + ?Sized>(s: &NeighborSampler, n: usize, params: &ModelParams, rng: &mut R) -> RootNeighborhood {
    let d = params.d() as usize;
    let mut positions = vec![0.0; n * d];
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        weights.push(s.sample_into(rng, &mut positions[i * d..(i + 1) * d]));
    }
    RootNeighborhood {
        root_weight: s.root_weight(),
        positions,
        weights,
        d: params.d(),
    }
}

/// Direct estimate of `gamma(k)` for `k in [k_min, k_max]`.
///
/// Each of the `n_samples` roots gets a Pareto weight and a Poisson degree;
/// roots whose degree falls in the range have their neighbourhood drawn and
/// contribute `Delta / (k (k - 1))`, with `Delta` twice the number of edges
/// among neighbours. Buckets with fewer than two hits report an infinite error.
pub fn direct_gamma_estimator<R: Rng + ?Sized>(
    k_min: usize,
    k_max: usize,
    params: &ModelParams,
    n_samples: u64,
    rng: &mut R,
) -> Result<BTreeMap<usize, Estimate>> {
    params.require_limit()?;
    if k_min < 2 || k_max < k_min {
        return Err(SirgError::Domain(format!("degree range [{}, {}] must satisfy 2 <= k_min <= k_max", k_min, k_max)));
    }
    let mut acc: BTreeMap<usize, Moments> = (k_min..=k_max).map(|k| (k, Moments::default())).collect();
    for _ in 0..n_samples {
        let w = sample_pareto(params.beta(), rng);
        let k = poisson(mean_degree(w, params)?, rng)? as usize;
        if k < k_min || k > k_max {
            continue;
        }
        let s = NeighborSampler::new(w, params)?;
        let nb = fill_neighborhood(&s, k, params, rng);
        let e = nb.count_neighbor_edges(params, rng);
        let ratio = 2.0 * e as f64 / (k * (k - 1)) as f64;
        if let Some(m) = acc.get_mut(&k) {
            m.push(ratio);
        }
    }
    Ok(acc.into_iter().map(|(k, m)| (k, m.estimate())).collect())
}
