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

//! Monte Carlo plumbing: estimates, streaming moments and seeded chunking.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Random generator used throughout the crate.
pub type SirgRng = ChaCha8Rng;

/// Samples per parallel chunk. Fixed so results do not depend on thread count.
pub const CHUNK: usize = 1 << 14;

/// A Monte Carlo (or quadrature, with `n_samples == 0`) estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            std_error: 0.0,
            n_samples: 0,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Estimate {
            value: self.value * c,
            std_error: self.std_error * c.abs(),
            n_samples: self.n_samples,
        }
    }
}

/// Streaming mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        self.mean += delta * o.n as f64 / n as f64;
        self.m2 += o.m2 + delta * delta * self.n as f64 * o.n as f64 / n as f64;
        self.n = n;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let se = if self.n < 2 {
            f64::INFINITY
        } else {
            (self.variance() / self.n as f64).sqrt()
        };
        Estimate {
            value: self.mean,
            std_error: se,
            n_samples: self.n,
        }
    }
}

/// Generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SirgRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean of `f` over `n` draws, split in fixed chunks with one substream each.
///
/// Chunks are merged in index order, so the result is identical for any
/// number of worker threads.
pub fn mc_mean<F>(n: u64, seed: u64, f: F) -> Moments
where
    F: Fn(&mut SirgRng) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK as u64);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let len = (n - c * CHUNK as u64).min(CHUNK as u64);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(f(&mut rng));
            }
            m
        })
        .collect();
    let mut out = Moments::default();
    for p in &parts {
        out.merge(p);
    }
    out
}

/// Derives an independent seed for a labelled sub-computation.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn moments_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean - all.mean).abs() < 1e-12);
        assert!((a.variance() - all.variance()).abs() < 1e-10);
    }

    #[test]
    fn uniform_mean() {
        let m = mc_mean(100_000, 7, |r| r.random::<f64>());
        let e = m.estimate();
        assert!((e.value - 0.5).abs() < 4.0 * e.std_error);
        assert!((m.variance() - 1.0 / 12.0).abs() < 2e-3);
    }

    #[test]
    fn deterministic_across_pools() {
        let f = |r: &mut SirgRng| r.random::<f64>().powi(3);
        let a = mc_mean(50_000, 11, f).mean;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| mc_mean(50_000, 11, f).mean);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
