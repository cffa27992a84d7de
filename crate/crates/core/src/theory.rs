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

//! Closed forms, quadratures and Monte Carlo estimators for the infinite model.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{Result, SirgError};
use crate::mc::{derive_seed, mc_mean, stream_rng, Estimate, SirgRng};
use crate::model::{
    inverse_mean_degree_limit, kappa_rd, m_inv_scale, omega_d, scaling_function, sigma_ratio_limit, sigma_scale,
    Alpha, Kernel, ModelParams, RegimeCase,
};
use crate::quad::{integrate_breaks, integrate_unit};
use crate::sampler::{dist_sq, rd_from_sq, NeighborSampler, RadialLaw};

/// `int_1^x u^p du`, with the logarithm at `p = -1`.
pub fn power_integral(p: f64, x: f64) -> f64 {
    let e = p + 1.0;
    let l = x.ln();
    if e.abs() < 1e-12 {
        l
    } else {
        (e * l).exp_m1() / e
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |r, i| r * (n - i) as f64 / (i + 1) as f64)
}

fn check_weight(w: f64) -> Result<()> {
    if !(w >= 1.0) || !w.is_finite() {
        return Err(SirgError::Domain(format!("weight w={} must be a finite value >= 1", w)));
    }
    Ok(())
}

/// Expected degree `M(w)` of a root with weight `w`, in closed form.
pub fn mean_degree(w: f64, p: &ModelParams) -> Result<f64> {
    p.require_limit()?;
    check_weight(w)?;
    let (a, b, xi) = (p.a(), p.beta(), p.xi());
    Ok(match p.kernel() {
        Kernel::Interpolation => {
            let e = a + 1.0 - b;
            let low = if e.abs() < 1e-9 { w * w.ln() } else { w * (e * w.ln()).exp_m1() / e };
            xi * (low + w.powf(a + 2.0 - b) / (b - 2.0))
        }
        Kernel::Boolean => {
            let d = p.d();
            xi * (0..=d)
                .map(|j| binom(d, j) * w.powi((d - j) as i32) / (b - 1.0 - j as f64))
                .sum::<f64>()
        }
    })
}

fn mean_degree_deriv(w: f64, p: &ModelParams) -> f64 {
    let (a, b, xi) = (p.a(), p.beta(), p.xi());
    match p.kernel() {
        Kernel::Interpolation => {
            let e = a + 1.0 - b;
            let j = if e.abs() < 1e-9 { w.ln() } else { (e * w.ln()).exp_m1() / e };
            xi * (j + w.powf(a + 1.0 - b) + (a + 2.0 - b) * w.powf(a + 1.0 - b) / (b - 2.0))
        }
        Kernel::Boolean => {
            let d = p.d();
            xi * (0..d)
                .map(|j| binom(d, j) * (d - j) as f64 * w.powi((d - j - 1) as i32) / (b - 1.0 - j as f64))
                .sum::<f64>()
        }
    }
}

/// `M(w)` by adaptive quadrature of `xi int_1^inf g(x, w) x^{-beta} dx`.
///
/// Independent of the closed form except for the analytic tail beyond `1e6 w`.
pub fn mean_degree_quadrature(w: f64, p: &ModelParams) -> Result<f64> {
    p.require_limit()?;
    check_weight(w)?;
    let b = p.beta();
    let big = 1e6 * w;
    let lw = w.ln();
    let f = |t: f64| {
        let x = t.exp();
        p.g(x, w) * (-(b - 1.0) * t).exp()
    };
    let mut pts = vec![0.0];
    if lw > 0.0 {
        pts.push(lw);
    }
    let mut t = lw;
    while t + 2.0 < big.ln() {
        t += 2.0;
        pts.push(t);
    }
    pts.push(big.ln());
    let r = integrate_breaks(f, &pts, 1e-13, 0.0);
    if !r.converged {
        return Err(SirgError::Estimation("mean degree quadrature did not converge".into()));
    }
    let tail = match p.kernel() {
        Kernel::Interpolation => w.powf(p.a()) * big.powf(2.0 - b) / (b - 2.0),
        Kernel::Boolean => {
            let d = p.d();
            (0..=d)
                .map(|j| binom(d, j) * w.powi((d - j) as i32) * big.powf(j as f64 + 1.0 - b) / (b - 1.0 - j as f64))
                .sum()
        }
    };
    Ok(p.xi() * (r.value + tail))
}

/// `M^{-1}(k)` by safeguarded Newton iteration; requires `k > M(1)`.
pub fn inverse_mean_degree(k: f64, p: &ModelParams) -> Result<f64> {
    let m1 = mean_degree(1.0, p)?;
    if !(k > m1 * (1.0 + 1e-12)) || !k.is_finite() {
        return Err(SirgError::Domain(format!("k={} must exceed M(1)={}", k, m1)));
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while mean_degree(hi, p)? < k {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(SirgError::Estimation(format!("cannot bracket M^-1({})", k)));
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = mean_degree(x, p)? - k;
        if fx.abs() <= 1e-15 * k {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = fx / mean_degree_deriv(x, p);
        let mut nx = x - step;
        if !(nx > lo && nx < hi) {
            nx = 0.5 * (lo + hi);
        }
        if (nx - x).abs() <= 1e-15 * x {
            return Ok(nx);
        }
        x = nx;
    }
    Ok(x)
}

/// `I(w1, w2)` in closed form.
pub fn pair_integral_i(w1: f64, w2: f64, p: &ModelParams) -> Result<f64> {
    p.require_limit()?;
    if !(w1 > 0.0 && w2 > 0.0) {
        return Err(SirgError::Domain("weights must be positive".into()));
    }
    Ok(pair_integral_unchecked(w1, w2, p))
}

fn pair_integral_unchecked(w1: f64, w2: f64, p: &ModelParams) -> f64 {
    let om = p.omega_d();
    let (g1, g2) = (p.g(1.0, w1), p.g(1.0, w2));
    let (lo, hi) = if g1 < g2 { (g1, g2) } else { (g2, g1) };
    let first = match p.alpha() {
        Alpha::Infinite => lo,
        Alpha::Finite(al) => {
            let q = (lo / hi).powf(al - 1.0);
            lo + lo * (1.0 - q) / (al - 1.0) + lo * q / (2.0 * al - 1.0)
        }
    };
    om * first * p.alpha().tail_factor() * om * p.g(w1, w2)
}

/// One unbiased draw of `S_1(w1, w2)`.
///
/// The two kernels with the smallest scale are sampled from their radial
/// laws and the widest one is evaluated at the resulting difference.
#[inline]
pub fn s1_draw<R: Rng + ?Sized>(w1: f64, w2: f64, p: &ModelParams, rng: &mut R, buf: &mut [f64]) -> f64 {
    let mut gs = [p.g(1.0, w1), p.g(1.0, w2), p.g(w1, w2)];
    gs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (alpha, d) = (p.alpha(), p.d());
    let (l1, l2) = (RadialLaw::new(gs[0], alpha, d), RadialLaw::new(gs[1], alpha, d));
    let dd = d as usize;
    let (x, y) = buf.split_at_mut(dd);
    l1.sample_point(rng, x);
    l2.sample_point(rng, &mut y[..dd]);
    let sq: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a + b) * (a + b)).sum();
    l1.mass() * l2.mass() * kappa_rd(rd_from_sq(sq, d), gs[2], alpha)
}

/// Monte Carlo estimate of `S_1(w1, w2)`.
pub fn chain_integral_s1(w1: f64, w2: f64, p: &ModelParams, n_samples: u64, seed: u64) -> Result<Estimate> {
    p.require_limit()?;
    if !(w1 > 0.0 && w2 > 0.0) {
        return Err(SirgError::Domain("weights must be positive".into()));
    }
    let d = p.d() as usize;
    let m = mc_mean(n_samples, seed, |rng| {
        let mut buf = [0.0; 16];
        if d <= 8 {
            s1_draw(w1, w2, p, rng, &mut buf[..2 * d])
        } else {
            let mut v = vec![0.0; 2 * d];
            s1_draw(w1, w2, p, rng, &mut v)
        }
    });
    Ok(m.estimate())
}

/// Mean of `kappa(|X1 - X2|, V1, V2)` over two independent neighbours of a root with weight `w`.
pub fn neighbor_pair_connection(w: f64, p: &ModelParams, n_samples: u64, seed: u64) -> Result<Estimate> {
    p.require_limit()?;
    let s = NeighborSampler::new(w, p)?;
    let d = p.d() as usize;
    let m = mc_mean(n_samples, seed, |rng| {
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        let v1 = s.sample_into(rng, &mut x);
        let v2 = s.sample_into(rng, &mut y);
        kappa_rd(rd_from_sq(dist_sq(&x, &y), p.d()), p.g(v1, v2), p.alpha())
    });
    Ok(m.estimate())
}

/// Monte Carlo estimate of `T(w) = M(w)^2 E[kappa(|X1 - X2|, V1, V2)]`.
pub fn triangle_integral_t(w: f64, p: &ModelParams, n_samples: u64, seed: u64) -> Result<Estimate> {
    let m = mean_degree(w, p)?;
    Ok(neighbor_pair_connection(w, p, n_samples, seed)?.scale(m * m))
}

/// Upper bound on `T(w)` for the interpolation kernel.
pub fn t_upper_bound(w: f64, p: &ModelParams) -> Result<f64> {
    p.require_limit()?;
    p.require_interpolation("the triangle upper bound")?;
    check_weight(w)?;
    let (a, b, xi) = (p.a(), p.beta(), p.xi());
    let first = 2.0 / (b - 2.0) * w * power_integral(2.0 + 2.0 * a - 2.0 * b, w);
    let second = w.powf(2.0 * a) * (w.powf(2.0 - b) / (b - 2.0)).powi(2);
    Ok(xi * xi * (first + second))
}

/// Lower bound on `T(w)` for the interpolation kernel; requires `w > 2`.
pub fn t_lower_bound(w: f64, p: &ModelParams) -> Result<f64> {
    p.require_limit()?;
    p.require_interpolation("the triangle lower bound")?;
    if !(w > 2.0) || !w.is_finite() {
        return Err(SirgError::Domain(format!("lower bound needs w > 2, got {}", w)));
    }
    let (a, b, d) = (p.a(), p.beta(), p.d() as f64);
    let k_low = (1.0 - 2f64.powf(-1.0 / d)).powf(d);
    let om = p.omega_d();
    let h = w / 2.0;
    let inner = power_integral(2.0 + 2.0 * a - 2.0 * b, h) - h.powf(2.0 - b) * power_integral(2.0 * a - b, h);
    Ok(k_low * om * om * (b - 1.0).powi(2) * 2.0 / (b - 2.0) * w * inner)
}

/// Law of the root weight conditioned on degree `k`.
///
/// Density `f_k(w) = P(Poi(M(w)) = k) f_W(w) / Z_k` on `w > 1`.
#[derive(Debug, Clone)]
pub struct ConditionalWeightLaw {
    k: f64,
    params: ModelParams,
    log_z: f64,
    /// Window in `w` outside which the mass is below `1e-10`.
    lo: f64,
    hi: f64,
}

impl ConditionalWeightLaw {
    pub fn new(k: usize, params: &ModelParams) -> Result<Self> {
        params.require_limit()?;
        let kf = k as f64;
        let p = *params;
        let ln_fact = ln_gamma(kf + 1.0);
        let logf = |w: f64| -> f64 {
            let m = mean_degree(w, &p).unwrap_or(f64::NAN);
            kf * m.ln() - m - ln_fact + (p.beta() - 1.0).ln() - p.beta() * w.ln()
        };
        let spread = 8.0 * (kf * kf.max(2.0).ln()).sqrt();
        let m1 = mean_degree(1.0, params)?;
        let inv = |x: f64| -> Result<f64> {
            if x <= m1 * (1.0 + 1e-12) {
                Ok(1.0)
            } else {
                inverse_mean_degree(x, params)
            }
        };
        let mut lo = inv(kf - spread)?;
        let mut hi = inv(kf + spread)?.max(lo * 1.0001);
        let centre = inv(kf.max(m1 * 1.01))?;
        let shift = logf(centre.max(1.0)).max(logf(1.0)).max(logf(hi)).max(logf(lo));
        let integrand = |t: f64| (logf(t.exp()) + t - shift).exp();
        // far end: past the window, the integrand decays at least geometrically in log w
        let mut t_end = hi.ln() + 1.0;
        while integrand(t_end) > 1e-40 {
            t_end += 1.0 + 0.5 * t_end;
            if t_end > 700.0 {
                break;
            }
        }
        let mass = |a: f64, b: f64| -> f64 {
            if b <= a {
                return 0.0;
            }
            let n = (((b - a) / 0.25).ceil() as usize).clamp(1, 400);
            let pts: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
            integrate_breaks(integrand, &pts, 1e-12, 1e-300).value
        };
        let mut z = mass(0.0, lo.ln()) + mass(lo.ln(), hi.ln()) + mass(hi.ln(), t_end);
        if !(z > 0.0) || !z.is_finite() {
            return Err(SirgError::Estimation(format!("normaliser for k={} is not positive", k)));
        }
        for _ in 0..60 {
            let above = mass(hi.ln(), t_end);
            if above <= 1e-10 * z {
                break;
            }
            hi *= 1.25;
        }
        for _ in 0..200 {
            if lo <= 1.0 {
                lo = 1.0;
                break;
            }
            let below = mass(0.0, lo.ln());
            if below <= 1e-10 * z {
                break;
            }
            lo = (lo / 1.25).max(1.0);
        }
        z = mass(0.0, lo.ln()) + mass(lo.ln(), hi.ln()) + mass(hi.ln(), t_end);
        Ok(ConditionalWeightLaw {
            k: kf,
            params: p,
            log_z: z.ln() + shift,
            lo,
            hi,
        })
    }

    /// Density at `w`; zero for `w <= 1`.
    pub fn density(&self, w: f64) -> f64 {
        if w <= 1.0 {
            return 0.0;
        }
        let m = match mean_degree(w, &self.params) {
            Ok(m) => m,
            Err(_) => return 0.0,
        };
        let b = self.params.beta();
        (self.k * m.ln() - m - ln_gamma(self.k + 1.0) + (b - 1.0).ln() - b * w.ln() - self.log_z).exp()
    }

    /// Weight window carrying all but `1e-10` of the mass.
    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// `f_k(w)`: density of the root weight given degree `k`.
pub fn conditional_weight_density(w: f64, k: usize, p: &ModelParams) -> Result<f64> {
    Ok(ConditionalWeightLaw::new(k, p)?.density(w))
}

/// `gamma(k)` via `int r(w) f_k(w) dw` with `r(w) = T(w) / M(w)^2`.
///
/// `r` is estimated at nodes equally spaced in `log w` across the window of
/// `f_k` and linearly interpolated; the node weights are exact integrals of
/// the hat functions against `f_k`. `n_samples` is the total Monte Carlo budget.
pub fn clustering_gamma_k(k: usize, p: &ModelParams, n_samples: u64, seed: u64) -> Result<Estimate> {
    if k < 2 {
        return Err(SirgError::Domain("gamma(k) needs k >= 2".into()));
    }
    let law = ConditionalWeightLaw::new(k, p)?;
    let (lo, hi) = law.window();
    let (t0, t1) = (lo.ln(), hi.ln());
    let n_nodes = ((((t1 - t0) / 0.05).ceil() as usize) + 1).clamp(25, 121);
    let ts: Vec<f64> = (0..n_nodes).map(|i| t0 + (t1 - t0) * i as f64 / (n_nodes - 1) as f64).collect();
    let dens = |t: f64| {
        let w = t.exp();
        law.density(w) * w
    };
    let mut c = vec![0.0; n_nodes];
    for i in 0..n_nodes - 1 {
        let (a, b) = (ts[i], ts[i + 1]);
        let h = b - a;
        let left = integrate_breaks(|t| dens(t) * (b - t) / h, &[a, b], 1e-10, 1e-300).value;
        let right = integrate_breaks(|t| dens(t) * (t - a) / h, &[a, b], 1e-10, 1e-300).value;
        c[i] += left;
        c[i + 1] += right;
    }
    let total: f64 = c.iter().sum();
    if !(total > 0.0) {
        return Err(SirgError::Estimation(format!("no weight mass for k={}", k)));
    }
    // residual mass outside the window goes to the end nodes
    let missing = 1.0 - total;
    if missing > 0.0 {
        c[0] += 0.5 * missing;
        c[n_nodes - 1] += 0.5 * missing;
    }
    let cs: f64 = c.iter().sum();
    c.iter_mut().for_each(|x| *x /= cs);
    let mut value = 0.0;
    let mut var = 0.0;
    let mut used = 0;
    for (i, (&t, &ci)) in ts.iter().zip(&c).enumerate() {
        let n_i = ((n_samples as f64 * ci).round() as u64).max(500);
        let e = neighbor_pair_connection(t.exp(), p, n_i, derive_seed(seed, i as u64))?;
        value += ci * e.value;
        var += ci * ci * e.std_error * e.std_error;
        used += n_i;
    }
    Ok(Estimate {
        value,
        std_error: var.sqrt(),
        n_samples: used,
    })
}

/// `iint_1^inf I(w1, w2) f_W(w1) f_W(w2) dw1 dw2` by nested quadrature.
pub fn weight_integral_i(p: &ModelParams) -> Result<f64> {
    p.require_limit()?;
    let b = p.beta();
    let f = |w: f64| (b - 1.0) * w.powf(-b);
    // symmetric: 2 int_1^inf f(w1) int_{w1}^inf I f(w2) dw2 dw1, with w1 = 1/u and w2 = w1/s
    let outer = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let w1 = 1.0 / u;
        let inner = integrate_unit(
            |s| {
                if s <= 0.0 {
                    return 0.0;
                }
                let w2 = w1 / s;
                let v = pair_integral_unchecked(w1, w2, p) * f(w2) * w1 / (s * s);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            1e-11,
        );
        let v = f(w1) * inner.value / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let r = integrate_unit(outer, 1e-9);
    Ok(2.0 * r.value)
}

/// `(beta - 1)^2 int_{lower}^inf I(1, r) r^{-beta} dr` for `lower` 0 or 1.
pub fn log_regime_integral(p: &ModelParams, from_one: bool) -> Result<f64> {
    p.require_limit()?;
    let b = p.beta();
    let upper = integrate_unit(
        |s| {
            if s <= 0.0 {
                return 0.0;
            }
            let r = 1.0 / s;
            pair_integral_unchecked(1.0, r, p) * r.powf(-b) / (s * s)
        },
        1e-11,
    )
    .value;
    let lower = if from_one {
        0.0
    } else {
        integrate_unit(
            |r| if r <= 0.0 { 0.0 } else { pair_integral_unchecked(1.0, r, p) * r.powf(-b) },
            1e-11,
        )
        .value
    };
    Ok((b - 1.0).powi(2) * (upper + lower))
}

/// `iint_0^inf S_1(w1, w2) f_W(w1) f_W(w2) dw1 dw2`, with the Pareto density
/// extended to `(0, inf)`.
///
/// Importance sampling over `(log w1, log w2)`: cells of a grid are chosen with
/// probability proportional to an upper bound on the integrand (the product
/// of the two smallest kernel masses), then a point uniform in the cell and a
/// single draw of `S_1` are taken. The bound is refined until the grid border
/// carries a negligible share of it.
pub fn weight_integral_s1(p: &ModelParams, n_samples: u64, seed: u64) -> Result<Estimate> {
    p.require_limit()?;
    let b = p.beta();
    let cw = p.alpha().tail_factor() * p.omega_d();
    let log_phi = |t: f64| (b - 1.0).ln() + (1.0 - b) * t;
    let log_bound = |t1: f64, t2: f64| {
        let (w1, w2) = (t1.exp(), t2.exp());
        let mut gs = [p.g(1.0, w1), p.g(1.0, w2), p.g(w1, w2)];
        gs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        2.0 * cw.ln() + gs[0].ln() + gs[1].ln() + log_phi(t1) + log_phi(t2)
    };
    let cells = 400usize;
    let mut half = 10.0f64;
    let (grid, h, lo) = loop {
        let h = 2.0 * half / cells as f64;
        let lo = -half;
        let mut logs = vec![0.0; cells * cells];
        for i in 0..cells {
            for j in 0..cells {
                let t1 = lo + (i as f64 + 0.5) * h;
                let t2 = lo + (j as f64 + 0.5) * h;
                logs[i * cells + j] = log_bound(t1, t2);
            }
        }
        let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ws: Vec<f64> = logs.iter().map(|l| (l - mx).exp()).collect();
        let total: f64 = ws.iter().sum();
        let border: f64 = (0..cells)
            .flat_map(|i| [(i, 0), (i, cells - 1), (0, i), (cells - 1, i)])
            .map(|(i, j)| ws[i * cells + j])
            .sum();
        if border <= 1e-9 * total || half >= 640.0 {
            if border > 1e-5 * total {
                return Err(SirgError::Estimation(
                    "weight integral bound does not decay; parameters outside the S1 regimes".into(),
                ));
            }
            let mut cum = Vec::with_capacity(ws.len());
            let mut acc = 0.0;
            for w in &ws {
                acc += w / total;
                cum.push(acc);
            }
            break (cum, h, lo);
        }
        half *= 2.0;
    };
    let d = p.d() as usize;
    let cell_prob = |idx: usize| if idx == 0 { grid[0] } else { grid[idx] - grid[idx - 1] };
    let m = mc_mean(n_samples, seed, |rng: &mut SirgRng| {
        let u: f64 = rng.random();
        let idx = grid.partition_point(|&c| c < u).min(grid.len() - 1);
        let (i, j) = (idx / cells, idx % cells);
        let t1 = lo + (i as f64 + rng.random::<f64>()) * h;
        let t2 = lo + (j as f64 + rng.random::<f64>()) * h;
        let q = cell_prob(idx) / (h * h);
        let mut buf = [0.0; 16];
        let s = if d <= 8 {
            s1_draw(t1.exp(), t2.exp(), p, rng, &mut buf[..2 * d])
        } else {
            let mut v = vec![0.0; 2 * d];
            s1_draw(t1.exp(), t2.exp(), p, rng, &mut v)
        };
        s * (log_phi(t1) + log_phi(t2)).exp() / q
    });
    Ok(m.estimate())
}

/// A named candidate value for the limiting clustering constant.
#[derive(Debug, Clone)]
pub struct GammaCandidate {
    pub name: &'static str,
    pub value: Estimate,
}

/// Limiting constant of `gamma(k) / S_k` with the alternatives that differ in prefactor.
#[derive(Debug, Clone)]
pub struct GammaConstant {
    pub case: RegimeCase,
    pub primary: GammaCandidate,
    pub alternatives: Vec<GammaCandidate>,
}

impl GammaConstant {
    pub fn all(&self) -> Vec<&GammaCandidate> {
        std::iter::once(&self.primary).chain(self.alternatives.iter()).collect()
    }
}

/// The limiting constant `Gamma(a, alpha, beta, d)`.
///
/// Weight integrals over `I` use deterministic quadrature; those over `S_1`
/// use [`weight_integral_s1`] with `n_samples` draws.
pub fn gamma_constant(p: &ModelParams, n_samples: u64, seed: u64) -> Result<GammaConstant> {
    p.require_limit()?;
    let label = p.regime()?;
    let (a, b, xi) = (p.a(), p.beta(), p.xi());
    let cand = |name, value| GammaCandidate { name, value };
    if p.kernel() == Kernel::Boolean {
        let stated = (b - 1.0) / xi * weight_integral_i(p)?;
        let d = p.d();
        let moment = |j: u32| (b - 1.0) / (b - 1.0 - j as f64);
        let e_sum: f64 = (0..=d).map(|j| binom(d, j) * moment(j) * moment(d - j)).sum();
        let self_overlap = match p.alpha() {
            Alpha::Infinite => 1.0,
            Alpha::Finite(al) => 2.0 * al / (2.0 * al - 1.0),
        };
        let scaling = omega_d(d) * self_overlap * e_sum;
        return Ok(GammaConstant {
            case: label.case,
            primary: cand("pair_weight_integral", Estimate::exact(stated)),
            alternatives: vec![cand("scaling_limit", Estimate::exact(scaling))],
        });
    }
    Ok(match label.case {
        RegimeCase::InverseLinear => GammaConstant {
            case: label.case,
            primary: cand("weight_integral_i", Estimate::exact((b - a - 1.0) / xi * weight_integral_i(p)?)),
            alternatives: vec![],
        },
        RegimeCase::CriticalLog => {
            let full = log_regime_integral(p, false)?;
            let from_one = log_regime_integral(p, true)?;
            GammaConstant {
                case: label.case,
                primary: cand("product_prefactor", Estimate::exact((2.0 * a + 1.0) / (4.0 * xi) * full)),
                alternatives: vec![
                    cand("half_xi_prefactor", Estimate::exact(full / (2.0 * xi))),
                    cand("product_prefactor_from_one", Estimate::exact((2.0 * a + 1.0) / (4.0 * xi) * from_one)),
                ],
            }
        }
        RegimeCase::Polynomial => {
            let s = weight_integral_s1(p, n_samples, seed)?;
            GammaConstant {
                case: label.case,
                primary: cand("weight_integral_s1", s.scale(((b - a - 1.0) / xi).powf(4.0 + 2.0 * a - 2.0 * b))),
                alternatives: vec![],
            }
        }
        RegimeCase::CriticalLogSquaredInverse => {
            let s = weight_integral_s1(p, n_samples, seed)?;
            GammaConstant {
                case: label.case,
                primary: cand("xi_squared_prefactor", s.scale(xi.powi(-2))),
                alternatives: vec![cand("xi_prefactor", s.scale(1.0 / xi))],
            }
        }
        RegimeCase::Constant => {
            let s = weight_integral_s1(p, n_samples, seed)?;
            GammaConstant {
                case: label.case,
                primary: cand(
                    "weight_integral_s1",
                    s.scale(((1.0 + a - b) * (b - 2.0) / ((a - 1.0) * xi)).powi(2)),
                ),
                alternatives: vec![],
            }
        }
    })
}

/// One row of a ratio table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub k_or_w: f64,
    pub quantity: &'static str,
    pub value: f64,
    pub std_error: f64,
    pub target: f64,
}

impl ReportRow {
    pub fn rel_dev(&self) -> f64 {
        if self.target.is_finite() && self.target != 0.0 {
            (self.value - self.target) / self.target
        } else {
            f64::NAN
        }
    }
}

/// Finite-`k` ratios against their limiting constants.
///
/// Rows `minv_over_mprime` and `sigma_over_k2sk` are closed form. When
/// `n_samples > 0`, rows `t_over_sigma` compare the Monte Carlo `T` with
/// the limit implied by the primary `Gamma` candidate.
pub fn limit_ratio_report(p: &ModelParams, k_grid: &[f64], n_samples: u64, seed: u64) -> Result<Vec<ReportRow>> {
    p.require_limit()?;
    p.require_interpolation("the limit ratio report")?;
    let label = p.regime()?;
    let minv_target = inverse_mean_degree_limit(p)?;
    let sig_target = sigma_ratio_limit(p)?;
    let t_target = if n_samples > 0 {
        gamma_constant(p, n_samples, derive_seed(seed, u64::MAX))?.primary.value.value / sig_target
    } else {
        f64::NAN
    };
    let mut rows = Vec::new();
    for (i, &k) in k_grid.iter().enumerate() {
        let w = inverse_mean_degree(k, p)?;
        rows.push(ReportRow {
            k_or_w: k,
            quantity: "minv_over_mprime",
            value: w / m_inv_scale(p, k),
            std_error: 0.0,
            target: minv_target,
        });
        let sig = sigma_scale(p, w);
        rows.push(ReportRow {
            k_or_w: k,
            quantity: "sigma_over_k2sk",
            value: sig / (k * k * scaling_function(&label, k)),
            std_error: 0.0,
            target: sig_target,
        });
        if n_samples > 0 {
            let t = triangle_integral_t(w, p, n_samples, derive_seed(seed, i as u64))?;
            rows.push(ReportRow {
                k_or_w: k,
                quantity: "t_over_sigma",
                value: t.value / sig,
                std_error: t.std_error / sig,
                target: t_target,
            });
        }
    }
    Ok(rows)
}

/// Lower bound, Monte Carlo `T` and upper bound at each weight.
pub fn sandwich_report(p: &ModelParams, w_grid: &[f64], n_samples: u64, seed: u64) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for (i, &w) in w_grid.iter().enumerate() {
        let lower = t_lower_bound(w, p)?;
        let upper = t_upper_bound(w, p)?;
        let t = triangle_integral_t(w, p, n_samples, derive_seed(seed, i as u64))?;
        let row = |quantity, value, std_error| ReportRow {
            k_or_w: w,
            quantity,
            value,
            std_error,
            target: f64::NAN,
        };
        rows.push(row("t_lower", lower, 0.0));
        rows.push(row("t_hat", t.value, t.std_error));
        rows.push(row("t_upper", upper, 0.0));
    }
    Ok(rows)
}

/// Deterministic generator for callers that want a one-off stream.
pub fn seeded(seed: u64) -> SirgRng {
    stream_rng(seed, 0)
}
