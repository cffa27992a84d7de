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


//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Set `SIRG_ACCEPTANCE=1,3,8`
//! to run a subset. The process exits with status 1 if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use sirg_core::analysis::*;
use sirg_core::graph::*;
use sirg_core::mc::stream_rng;
use sirg_core::model::*;
use sirg_core::sampler::*;
use sirg_core::theory::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn interp(d: u32, alpha: Alpha, beta: f64, a: f64) -> ModelParams {
    ModelParams::interpolation(d, alpha, beta, a).unwrap()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn c1_mean_degree_quadrature() -> Outcome {
    let t0 = Instant::now();
    let mut worst = (0.0f64, String::new());
    for &a in &[0.0, 0.75, 1.0, 2.0, 4.0] {
        for &b in &[2.2, 3.0, 3.5, 4.0, 6.0] {
            for &al in &[Alpha::Finite(1.5), Alpha::Finite(2.0), Alpha::Infinite] {
                for d in 1..=2 {
                    let p = interp(d, al, b, a);
                    for &w in &[1.5, 4.0, 32.0, 1024.0] {
                        let e = rel(mean_degree(w, &p).unwrap(), mean_degree_quadrature(w, &p).unwrap());
                        if e > worst.0 {
                            worst = (e, format!("a={} beta={} alpha={} d={} w={}", a, b, al, d, w));
                        }
                    }
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        worst.0 < 1e-8 && secs < 10.0,
        format!("600 points, max rel err {:.2e} at {} (limit 1e-8), {:.2}s", worst.0, worst.1, secs),
    )
}

fn c2_mean_degree_limits() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let sets: [(f64, f64, f64, f64); 8] = [
        (0.0, 3.0, 1e10, 0.02),
        (1.0, 4.0, 1e10, 0.02),
        (2.0, 3.5, 1e10, 0.02),
        (2.0, 3.25, 1e10, 0.02),
        (2.0, 2.5, 1e10, 0.02),
        (4.0, 4.0, 1e10, 0.02),
        (2.0, 3.0, 1e12, 0.10),
        (3.0, 4.0, 1e12, 0.10),
    ];
    for &(a, b, w, tol) in &sets {
        for al in [Alpha::Infinite, Alpha::Finite(2.0)] {
            let p = interp(1, al, b, a);
            let r = mean_degree(w, &p).unwrap() / m_scale(&p, w);
            let dev = rel(r, mean_degree_limit(&p).unwrap());
            ok &= dev < tol;
            if al.is_infinite() {
                parts.push(format!("({},{})@{:e}:{:.2}%", a, b, w, 100.0 * dev));
            }
        }
    }
    outcome(ok, format!("M/m deviation {} [alpha=inf shown; alpha=2 also checked]", parts.join(" ")))
}

fn c3_inverse_scaling() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(a, b, k, tol) in &[(1.0, 4.0, 1e8, 0.05), (2.0, 3.25, 1e8, 0.05), (2.0, 2.5, 1e8, 0.05), (2.0, 3.5, 1e12, 0.15), (2.0, 3.0, 1e12, 0.15)] {
        let p = interp(1, Alpha::Infinite, b, a);
        for row in limit_ratio_report(&p, &[k], 0, 0).unwrap() {
            let dev = row.rel_dev().abs();
            let good = dev < tol;
            ok &= good;
            parts.push(format!(
                "({},{}) {}={:.2}%{}",
                a,
                b,
                row.quantity,
                100.0 * dev,
                if good { "" } else { "!" }
            ));
        }
    }
    outcome(ok, format!("{} (limits 5% / 15%)", parts.join(", ")))
}

fn c4_sandwich() -> Outcome {
    let t0 = Instant::now();
    let mut rng = stream_rng(4, 0);
    let mut fails = Vec::new();
    let mut n = 0;
    while n < 20 {
        let d = rng.random_range(1..=3u32);
        let al = match rng.random_range(0..4) {
            0 => Alpha::Infinite,
            i => Alpha::Finite([1.5, 2.0, 3.0][i - 1]),
        };
        let a = rng.random_range(0.0..3.0);
        let b = rng.random_range(2.1..6.0);
        let Ok(p) = ModelParams::interpolation(d, al, b, a) else { continue };
        let w = 2f64.powi(rng.random_range(3..=14));
        let t = triangle_integral_t(w, &p, 100_000, n as u64).unwrap();
        let (lo, hi) = (t_lower_bound(w, &p).unwrap(), t_upper_bound(w, &p).unwrap());
        if lo > t.value + 3.0 * t.std_error || t.value - 3.0 * t.std_error > hi {
            fails.push(format!("d={} alpha={} a={:.2} beta={:.2} w={}", d, al, a, b, w));
        }
        n += 1;
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        fails.is_empty() && secs < 120.0,
        format!("20 combos, {} outside [lower - 3SE, upper + 3SE] {:?}, {:.1}s", fails.len(), fails, secs),
    )
}

fn c5_triangle_scaling() -> Outcome {
    let grid: Vec<f64> = (6..=14).map(|e| 2f64.powi(e)).collect();
    let run = |a, b| -> Vec<f64> {
        let p = interp(1, Alpha::Infinite, b, a);
        grid.iter()
            .enumerate()
            .map(|(i, &w)| triangle_integral_t(w, &p, 2_000_000, 50 + i as u64).unwrap().value)
            .collect()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for &(a, b, target) in &[(1.0, 4.0, 1.0), (2.0, 2.6, 4.0 + 4.0 - 5.2), (2.0, 3.25, 4.0 + 4.0 - 6.5)] {
        let t = run(a, b);
        let xs: Vec<f64> = grid.iter().map(|w| w.ln()).collect();
        let ys: Vec<f64> = t.iter().map(|v| v.ln()).collect();
        let s = ols(&xs, &ys).unwrap().slope;
        ok &= (s - target).abs() <= 0.15;
        parts.push(format!("({},{}) slope {:.3} vs {:.2}", a, b, s, target));
    }
    let t = run(2.0, 3.5);
    let per_w: Vec<f64> = t.iter().zip(&grid).map(|(v, w)| v / w).collect();
    let increasing = per_w.windows(2).all(|p| p[1] > p[0]);
    let top: Vec<f64> = t.iter().zip(&grid).filter(|(_, &w)| w >= grid[grid.len() - 1] / 10.0).map(|(v, w)| v / (w * w.ln())).collect();
    let (mn, mx) = top.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    let var = (mx - mn) / mn;
    ok &= increasing && var < 0.2;
    parts.push(format!(
        "(2,3.5) T/w increasing={} ({:.1} -> {:.1}), T/(w log w) top-decade variation {:.1}%",
        increasing,
        per_w[0],
        per_w[per_w.len() - 1],
        100.0 * var
    ));
    outcome(ok, parts.join("; "))
}

// Chi-square statistic for Poisson(mu) counts, pooling cells with expectation below 5.
fn poisson_chi_square(counts: &BTreeMap<usize, usize>, mu: f64, n: usize) -> (f64, usize) {
    let kmax = counts.keys().max().copied().unwrap_or(0).max((mu + 10.0 * mu.sqrt()) as usize + 5);
    let mut pmf = vec![0.0; kmax + 1];
    pmf[0] = (-mu).exp();
    for k in 1..=kmax {
        pmf[k] = pmf[k - 1] * mu / k as f64;
    }
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut e_acc, mut o_acc) = (0.0, 0.0);
    let mut cum = 0.0f64;
    for k in 0..=kmax {
        let e = if k == kmax { (1.0 - cum).max(0.0) * n as f64 } else { pmf[k] * n as f64 };
        cum += pmf[k];
        e_acc += e;
        o_acc += *counts.get(&k).unwrap_or(&0) as f64;
        if e_acc >= 5.0 && (1.0 - cum) * n as f64 >= 5.0 {
            cells.push((o_acc, e_acc));
            e_acc = 0.0;
            o_acc = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += o_acc;
        last.1 += e_acc;
    }
    let stat = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    (stat, cells.len().saturating_sub(1))
}

fn c6_poisson_degree() -> Outcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let sets = [
        (interp(1, Alpha::Infinite, 3.5, 1.0), 2.0, true),
        (interp(2, Alpha::Finite(2.0), 3.0, 2.0), 5.0, false),
        (interp(3, Alpha::Infinite, 4.0, 0.5), 10.0, false),
    ];
    for (i, (p, w, headline)) in sets.iter().enumerate() {
        let mut rng = stream_rng(6, i as u64);
        let n = 10_000;
        let mut counts = BTreeMap::new();
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let nb = sample_root_neighborhood(*w, p, &mut rng).unwrap();
            let k = nb.len();
            *counts.entry(k).or_insert(0usize) += 1;
            s += k as f64;
            s2 += (k * k) as f64;
        }
        let mu = mean_degree(*w, p).unwrap();
        let mean = s / n as f64;
        let var = (s2 - s * s / n as f64) / (n as f64 - 1.0);
        let (stat, dof) = poisson_chi_square(&counts, mu, n);
        let pval = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat);
        let mut good = pval > 0.001;
        if *headline {
            good &= rel(mean, mu) < 0.03 && rel(var, mu) < 0.03;
            parts.push(format!(
                "M(2)={:.4} mean={:.4} ({:.2}%) var={:.4} ({:.2}%) p={:.3}",
                mu,
                mean,
                100.0 * rel(mean, mu),
                var,
                100.0 * rel(var, mu),
                pval
            ));
        } else {
            parts.push(format!("d={} w={} chi2 p={:.3}", p.d(), w, pval));
        }
        ok &= good;
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(ok && secs < 30.0, format!("{}; {:.1}s", parts.join("; "), secs))
}

fn c7_cross_validation() -> Outcome {
    let t0 = Instant::now();
    let p = interp(1, Alpha::Infinite, 4.0, 1.0);
    let mut rng = stream_rng(7, 0);
    let direct = direct_gamma_estimator(5, 15, &p, 1_000_000, &mut rng).unwrap();
    let mut worst = (0.0f64, 0usize);
    for k in 5..=15 {
        let q = clustering_gamma_k(k, &p, 1_000_000, 70 + k as u64).unwrap();
        let d = rel(direct[&k].value, q.value);
        if d > worst.0 {
            worst = (d, k);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        worst.0 < 0.10 && secs < 300.0,
        format!("k=5..15 max rel diff {:.2}% at k={} (limit 10%), {:.1}s", 100.0 * worst.0, worst.1, secs),
    )
}

fn c8_gamma_constant() -> Outcome {
    let t0 = Instant::now();
    let p = interp(1, Alpha::Infinite, 4.0, 1.0);
    let big = gamma_constant(&p, 0, 8).unwrap().primary.value.value;
    let g = clustering_gamma_k(10_000, &p, 4_000_000, 81).unwrap();
    let r1 = g.value * 1e4 / big;
    let ok1 = (r1 - 1.0).abs() < 0.25;

    let q = interp(1, Alpha::Finite(2.0), 2.5, 2.0);
    let gc = gamma_constant(&q, 2_000_000, 82).unwrap().primary.value;
    let g3 = clustering_gamma_k(1_000, &q, 1_000_000, 83).unwrap().value;
    let g4 = clustering_gamma_k(10_000, &q, 1_000_000, 84).unwrap().value;
    let variation = (g3 - g4).abs() / g3.min(g4);
    let matchdev = rel(g4, gc.value);
    let ok2 = variation < 0.15;
    let ok3 = matchdev < 0.30;
    outcome(
        ok1 && ok2 && ok3,
        format!(
            "(1,4): gamma(1e4)*k/Gamma={:.3} [{}]; CONSTANT (2,2.5,alpha=2): gamma(1e3)={:.4} gamma(1e4)={:.4} variation {:.1}% (limit 15%) [{}], Gamma={:.4}+-{:.4} match {:.1}% (limit 30%) [{}]; {:.0}s",
            r1,
            if ok1 { "ok" } else { "fail" },
            g3,
            g4,
            100.0 * variation,
            if ok2 { "ok" } else { "fail" },
            gc.value,
            gc.std_error,
            100.0 * matchdev,
            if ok3 { "ok" } else { "fail" },
            t0.elapsed().as_secs_f64()
        ),
    )
}

fn bins_per_decade(hi: f64) -> usize {
    ((5.0 / (hi / 10.0).log10()).ceil() as usize).max(8)
}

fn c9_figure_slopes() -> Outcome {
    let n = 22_000;
    let mut ok = true;
    let mut parts = Vec::new();
    let mut max_graph_secs = 0.0f64;
    for &(b, target, tol) in &[(4.0, -1.0, 0.25), (3.01, -0.02, 0.15), (2.6, 0.0, 0.15)] {
        let p = interp(2, Alpha::Finite(2.0), b, 2.0);
        let hi = finite_size_threshold(n as f64, 2.0, b) / 2.0;
        let bpd = bins_per_decade(hi);
        let mut slopes = Vec::new();
        for seed in 0..10 {
            let t0 = Instant::now();
            let g = generate_finite_sirg(n, &p, 900 + seed).unwrap();
            let bins = log_binned_spectrum(&clustering_spectrum(&g), bpd);
            if let Ok(f) = fit_slope(&bins, 10.0, hi) {
                slopes.push(f.slope);
            }
            max_graph_secs = max_graph_secs.max(t0.elapsed().as_secs_f64());
        }
        let m = slopes.iter().sum::<f64>() / slopes.len().max(1) as f64;
        let sd = (slopes.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / (slopes.len().max(2) - 1) as f64).sqrt();
        // local slope of the infinite-model gamma(k) over the same window
        let ks: Vec<usize> = (0..6).map(|i| (10.0 * (hi / 10.0).powf(i as f64 / 5.0)).round() as usize).collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = ks
            .iter()
            .map(|&k| ((k as f64).ln(), clustering_gamma_k(k, &p, 200_000, k as u64).unwrap().value.ln()))
            .unzip();
        let theory = ols(&xs, &ys).map(|f| f.slope).unwrap_or(f64::NAN);
        let good = slopes.len() == 10 && (m - target).abs() <= tol;
        ok &= good;
        parts.push(format!(
            "beta={} window [10,{:.1}] slope {:.3}+-{:.3} vs {}+-{} [{}], infinite-model slope {:.3}",
            b,
            hi,
            m,
            sd,
            target,
            tol,
            if good { "ok" } else { "fail" },
            theory
        ));
    }
    ok &= max_graph_secs < 180.0;
    outcome(ok, format!("{}; slowest graph {:.1}s", parts.join("; "), max_graph_secs))
}

fn c10_local_limit() -> Outcome {
    let t0 = Instant::now();
    let p = interp(2, Alpha::Finite(2.0), 4.0, 1.0);
    let mut acc: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for seed in 0..10 {
        let g = generate_finite_sirg(50_000, &p, 1000 + seed).unwrap();
        for r in clustering_spectrum(&g) {
            let e = acc.entry(r.k).or_insert((0, 0.0));
            e.0 += r.n_k;
            e.1 += r.n_k as f64 * r.mean_cc;
        }
    }
    let mut worst = (0.0f64, 0usize);
    for k in 5..=30 {
        let (nk, s) = acc.get(&k).copied().unwrap_or((0, 0.0));
        let emp = if nk > 0 { s / nk as f64 } else { f64::NAN };
        let th = clustering_gamma_k(k, &p, 300_000, 100 + k as u64).unwrap().value;
        let d = rel(emp, th);
        if !(d <= worst.0) {
            worst = (d, k);
        }
    }
    outcome(
        worst.0 <= 0.25,
        format!("k=5..30 max rel dev {:.2}% at k={} (limit 25%), {:.0}s", 100.0 * worst.0, worst.1, t0.elapsed().as_secs_f64()),
    )
}

fn spectrum_of(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize, f64)> {
    clustering_spectrum(&Graph::from_edges(n, edges).unwrap()).into_iter().map(|r| (r.k, r.n_k, r.mean_cc)).collect()
}

fn c11_structural() -> Outcome {
    let mut problems = Vec::new();
    for gi in 0..50u64 {
        let mut rng = stream_rng(11, gi);
        let n = rng.random_range(3..=200usize);
        let pe = rng.random_range(0.0..0.3);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < pe {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let mut adj = vec![vec![false; n]; n];
        for &(i, j) in &edges {
            adj[i][j] = true;
            adj[j][i] = true;
        }
        let mut brute = vec![0u64; n];
        for i in 0..n {
            for j in i + 1..n {
                if !adj[i][j] {
                    continue;
                }
                for l in j + 1..n {
                    if adj[i][l] && adj[j][l] {
                        brute[i] += 2;
                        brute[j] += 2;
                        brute[l] += 2;
                    }
                }
            }
        }
        if triangles_per_vertex(&g) != brute {
            problems.push(format!("triangles differ on graph {}", gi));
        }
    }
    let k4: Vec<(usize, usize)> = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    if spectrum_of(3, &[(0, 1), (1, 2), (0, 2)]) != vec![(2, 3, 1.0)] {
        problems.push("K3 spectrum".into());
    }
    if spectrum_of(4, &k4) != vec![(3, 4, 1.0)] {
        problems.push("K4 spectrum".into());
    }
    if spectrum_of(3, &[(0, 1), (1, 2)]) != vec![(2, 1, 0.0)] {
        problems.push("P3 spectrum".into());
    }
    if spectrum_of(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]) != vec![(5, 1, 0.0)] {
        problems.push("star spectrum".into());
    }
    let p = interp(2, Alpha::Finite(2.0), 3.0, 2.0);
    let g = generate_finite_sirg(2000, &p, 3).unwrap();
    let mut text = Vec::new();
    write_text(&g, &mut text).unwrap();
    let mut bin = Vec::new();
    write_binary(&g, &mut bin).unwrap();
    if read_text(&text[..]).unwrap() != g || read_binary(&bin[..]).unwrap() != g {
        problems.push("serialization round trip".into());
    }
    let mut again = Vec::new();
    write_binary(&generate_finite_sirg(2000, &p, 3).unwrap(), &mut again).unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| generate_finite_sirg(2000, &p, 3).unwrap());
    let mut one = Vec::new();
    write_binary(&single, &mut one).unwrap();
    if again != bin || one != bin {
        problems.push("seed determinism".into());
    }
    outcome(
        problems.is_empty(),
        format!("50 random graphs vs triple loop, K3/K4/P3/star, text+binary round trip, byte-exact reseeding (1 and many threads); problems: {:?}", problems),
    )
}

fn c12_triangle_geometry() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let cases = [
        (interp(1, Alpha::Infinite, 4.0, 1.0), (4..=12).map(|e| 2f64.powi(e)).collect::<Vec<_>>(), 1.0, 0.0, 0.0),
        (interp(2, Alpha::Infinite, 2.5, 2.0), (3..=11).map(|e| 2f64.powi(e)).collect::<Vec<_>>(), 1.0, 1.0, 1.0 / 1.5),
    ];
    for (p, grid, ex1, exd, ew) in &cases {
        let r = typical_triangle_stats(p, grid, 20_000, 12).unwrap();
        let (e1, ed, e_w) = (r.exponents[0], r.exponents[4], r.exponents[2]);
        let good = (e1 - ex1).abs() <= 0.2 && (ed - exd).abs() <= 0.2;
        ok &= good;
        parts.push(format!(
            "(a={},beta={},d={}) |x1| {:.3} vs {:.2}, |x1-x2| {:.3} vs {:.2}, w1 {:.3} vs {:.3}",
            p.a(),
            p.beta(),
            p.d(),
            e1,
            ex1,
            ed,
            exd,
            e_w,
            ew
        ));
    }
    outcome(ok, format!("{} (limit +-0.2)", parts.join("; ")))
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let all: [Criterion; 12] = [
        (1, "mean degree closed form vs quadrature", c1_mean_degree_quadrature),
        (2, "mean degree growth constants", c2_mean_degree_limits),
        (3, "inverse mean degree and sigma ratios", c3_inverse_scaling),
        (4, "triangle integral sandwich", c4_sandwich),
        (5, "triangle integral scaling exponents", c5_triangle_scaling),
        (6, "Poisson root degree", c6_poisson_degree),
        (7, "clustering estimator cross-validation", c7_cross_validation),
        (8, "clustering constant at desk scale", c8_gamma_constant),
        (9, "finite-graph clustering slopes", c9_figure_slopes),
        (10, "local-limit consistency", c10_local_limit),
        (11, "structural oracles", c11_structural),
        (12, "typical triangle geometry", c12_triangle_geometry),
    ];
    let filter: Option<Vec<u32>> = std::env::var("SIRG_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, name, f) in all {
        if let Some(sel) = &filter {
            if !sel.contains(&id) {
                continue;
            }
        }
        let o = f();
        println!("criterion {:>2} {}: {} {}", id, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{} criterion(s) failed", failed);
        std::process::exit(1);
    }
}
