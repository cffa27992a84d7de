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


//! Subcommand bodies. Each writes its artifacts into `out` and returns
//! their names relative to it.

use std::collections::BTreeMap;
use std::io::{BufReader, BufWriter, Read};
use std::path::Path;

use sirg_core::analysis::*;
use sirg_core::graph::*;
use sirg_core::mc::derive_seed;
use sirg_core::model::*;
use sirg_core::theory::*;
use sirg_core::{Result, SirgError};

use crate::config::Config;
use crate::plot::{phase_svg, LogLogPlot, Series, Style};

type Row = Vec<String>;

fn num(x: f64) -> String {
    x.to_string()
}

pub(crate) fn write_csv(out: &Path, name: &str, header: &[&str], rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_path(out.join(name)).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(name.to_string())
}

fn csv_err(e: csv::Error) -> SirgError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => SirgError::Io(io),
        other => SirgError::Parse(format!("{:?}", other)),
    }
}

fn write_file(out: &Path, name: &str, body: &str) -> Result<String> {
    std::fs::write(out.join(name), body)?;
    Ok(name.to_string())
}

/// Long-format table row: `(k_or_w, quantity, value, std_error, target, rel_dev)`.
fn long_row(r: &ReportRow) -> Row {
    vec![num(r.k_or_w), r.quantity.to_string(), num(r.value), num(r.std_error), num(r.target), num(r.rel_dev())]
}

const LONG_HEADER: [&str; 6] = ["k_or_w", "quantity", "value", "std_error", "target", "rel_dev"];

fn row(k_or_w: f64, quantity: &'static str, value: f64, std_error: f64, target: f64) -> ReportRow {
    ReportRow {
        k_or_w,
        quantity,
        value,
        std_error,
        target,
    }
}

pub fn generate(cfg: &Config, out: &Path) -> Result<Vec<String>> {
    let p = cfg.finite_params()?;
    let n: usize = cfg.get("n", 1000)?;
    let torus: bool = cfg.get("torus", false)?;
    let format = cfg.get("format", "text".to_string())?;
    let g = generate_finite_sirg_with(n, &p, cfg.seed()?, GenOptions { torus })?;
    let name = match format.as_str() {
        "text" => "graph.txt",
        "binary" => "graph.bin",
        other => return Err(SirgError::Parse(format!("format must be text or binary, got '{}'", other))),
    };
    let file = BufWriter::new(std::fs::File::create(out.join(name))?);
    if name.ends_with(".bin") {
        write_binary(&g, file)?;
    } else {
        write_text(&g, file)?;
    }
    Ok(vec![name.to_string()])
}

/// Reads either serialization, telling them apart by the binary magic.
pub fn read_graph(path: &Path) -> Result<Graph> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {}", path.display(), e)))?;
    if bytes.starts_with(b"SIRGBIN1") {
        read_binary(&bytes[..])
    } else {
        read_text(BufReader::new(&bytes[..]))
    }
}

fn auto_bins(hi: f64) -> usize {
    // at least five bins inside a narrow window
    if hi > 10.0 {
        ((5.0 / (hi / 10.0).log10()).ceil() as usize).clamp(8, 64)
    } else {
        8
    }
}

struct Window {
    psi: f64,
    k_lo: f64,
    k_hi: f64,
    bpd: usize,
}

fn window(cfg: &Config, n: usize, p: &ModelParams) -> Result<Window> {
    let psi = finite_size_threshold(n as f64, p.a(), p.beta());
    let k_lo: f64 = cfg.get("k_lo", 10.0)?;
    let k_hi: f64 = cfg.get("k_hi", psi / 2.0)?;
    let bpd = match cfg.get("bins_per_decade", "auto".to_string())?.as_str() {
        "auto" => auto_bins(k_hi),
        s => s
            .parse::<usize>()
            .ok()
            .filter(|&b| b >= 1)
            .ok_or_else(|| SirgError::Parse(format!("bins_per_decade: '{}'", s)))?,
    };
    Ok(Window { psi, k_lo, k_hi, bpd })
}

fn fit_row(label: &[String], bins: &[BinRow], w: &Window) -> Row {
    let mut r = label.to_vec();
    match fit_slope(bins, w.k_lo, w.k_hi) {
        Ok(f) => r.extend([num(f.slope), num(f.intercept), num(f.slope_se), f.n_points.to_string(), "ok".into()]),
        Err(_) => r.extend(["NaN".into(), "NaN".into(), "NaN".into(), "0".into(), "insufficient_data".into()]),
    }
    r.extend([num(w.k_lo), num(w.k_hi), num(w.psi), w.bpd.to_string()]);
    r
}

const FIT_TAIL: [&str; 9] = ["slope", "intercept", "slope_se", "n_points", "status", "k_lo", "k_hi", "psi", "bins_per_decade"];

fn spectrum_rows(s: &[SpectrumRow]) -> Vec<Row> {
    s.iter().map(|r| vec![r.k.to_string(), r.n_k.to_string(), num(r.mean_cc)]).collect()
}

fn binned_rows(b: &[BinRow]) -> Vec<Row> {
    b.iter().map(|r| vec![num(r.k_gmean), num(r.cc), r.n_weight.to_string()]).collect()
}

pub fn spectrum(cfg: &Config, out: &Path) -> Result<Vec<String>> {
    let (g, p) = match cfg.get_opt("graph") {
        Some(path) => {
            let g = read_graph(Path::new(&path))?;
            let p = match g.params() {
                Some(p) => *p,
                None => cfg.finite_params()?,
            };
            (g, p)
        }
        None => {
            let p = cfg.finite_params()?;
            let n: usize = cfg.get("n", 22_000)?;
            (generate_finite_sirg(n, &p, cfg.seed()?)?, p)
        }
    };
    let w = window(cfg, g.n(), &p)?;
    let spec = clustering_spectrum(&g);
    let bins = log_binned_spectrum(&spec, w.bpd);
    let mut outputs = vec![
        write_csv(out, "spectrum.csv", &["k", "n_k", "mean_cc"], &spectrum_rows(&spec))?,
        write_csv(out, "binned.csv", &["k_gmean", "cc", "n_weight"], &binned_rows(&bins))?,
    ];
    let mut header = vec!["n"];
    header.extend(FIT_TAIL);
    outputs.push(write_csv(out, "fit.csv", &header, &[fit_row(&[g.n().to_string()], &bins, &w)])?);
    let plot = LogLogPlot {
        title: format!("Clustering spectrum, n={} alpha={} beta={} a={}", g.n(), p.alpha(), p.beta(), p.a()),
        x_label: "degree k".into(),
        y_label: "CC(k)".into(),
        series: vec![
            Series {
                name: "CC(k)".into(),
                points: spec.iter().map(|r| (r.k as f64, r.mean_cc)).collect(),
                style: Style::Points,
            },
            Series {
                name: "log-binned".into(),
                points: bins.iter().map(|b| (b.k_gmean, b.cc)).collect(),
                style: Style::Line,
            },
        ],
        markers: vec![(w.psi, "psi(n)".into())],
    };
    outputs.push(write_file(out, "spectrum.svg", &plot.render())?);
    Ok(outputs)
}

pub fn theory(cfg: &Config, out: &Path) -> Result<Vec<String>> {
    let p = cfg.params()?;
    let seed = cfg.seed()?;
    let samples: u64 = cfg.get("samples", 200_000)?;
    let k_grid = cfg.get_list("k_grid", "10,100,1000,10000")?;
    let w_grid = cfg.get_list("w_grid", "8,64,512,4096")?;
    let label = p.regime()?;
    let interp = p.kernel() == Kernel::Interpolation;
    let gc = gamma_constant(&p, samples, derive_seed(seed, 1))?;

    let mut rows = Vec::new();
    for (i, &k) in k_grid.iter().enumerate() {
        if k < 2.0 || k.fract() != 0.0 {
            return Err(SirgError::Domain(format!("k grid values must be integers >= 2, got {}", k)));
        }
        let sk = scaling_function(&label, k);
        rows.push(row(k, "s_k", sk, 0.0, f64::NAN));
        if let Ok(w) = inverse_mean_degree(k, &p) {
            rows.push(row(k, "minv", w, 0.0, f64::NAN));
        }
        let g = clustering_gamma_k(k as usize, &p, samples, derive_seed(seed, 100 + i as u64))?;
        rows.push(row(k, "gamma_k", g.value, g.std_error, f64::NAN));
        rows.push(row(k, "gamma_k_over_s_k", g.value / sk, g.std_error / sk, gc.primary.value.value));
    }
    if interp {
        let valid: Vec<f64> = k_grid.iter().copied().filter(|&k| inverse_mean_degree(k, &p).is_ok()).collect();
        rows.extend(limit_ratio_report(&p, &valid, samples, derive_seed(seed, 2))?);
    }
    for (i, &w) in w_grid.iter().enumerate() {
        rows.push(row(w, "mean_degree", mean_degree(w, &p)?, 0.0, f64::NAN));
        rows.push(row(w, "sigma", sigma_scale(&p, w), 0.0, f64::NAN));
        if interp {
            if w > 2.0 {
                rows.push(row(w, "t_lower", t_lower_bound(w, &p)?, 0.0, f64::NAN));
            }
            rows.push(row(w, "t_upper", t_upper_bound(w, &p)?, 0.0, f64::NAN));
        }
        let t = triangle_integral_t(w, &p, samples, derive_seed(seed, 200 + i as u64))?;
        rows.push(row(w, "t_hat", t.value, t.std_error, f64::NAN));
    }
    let table: Vec<Row> = rows.iter().map(long_row).collect();
    let cands: Vec<Row> = gc
        .all()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                gc.case.name().to_string(),
                c.name.to_string(),
                num(c.value.value),
                num(c.value.std_error),
                (i == 0).to_string(),
            ]
        })
        .collect();
    Ok(vec![
        write_csv(out, "theory.csv", &LONG_HEADER, &table)?,
        write_csv(out, "gamma_constant.csv", &["regime", "candidate", "value", "std_error", "primary"], &cands)?,
    ])
}

pub fn sandwich(cfg: &Config, out: &Path) -> Result<Vec<String>> {
    let p = cfg.params()?;
    let samples: u64 = cfg.get("samples", 100_000)?;
    let w_grid = cfg.get_list("w_grid", "8:16384:12")?;
    let rows = sandwich_report(&p, &w_grid, samples, cfg.seed()?)?;
    let table: Vec<Row> = rows.iter().map(long_row).collect();
    let series = |q: &str, style| Series {
        name: q.to_string(),
        points: rows.iter().filter(|r| r.quantity == q).map(|r| (r.k_or_w, r.value)).collect(),
        style,
    };
    let plot = LogLogPlot {
        title: format!("Triangle integral bounds, alpha={} beta={} a={} d={}", p.alpha(), p.beta(), p.a(), p.d()),
        x_label: "root weight w".into(),
        y_label: "T(w)".into(),
        series: vec![series("t_lower", Style::Line), series("t_hat", Style::Points), series("t_upper", Style::Line)],
        markers: vec![],
    };
    Ok(vec![
        write_csv(out, "sandwich.csv", &LONG_HEADER, &table)?,
        write_file(out, "sandwich.svg", &plot.render())?,
    ])
}

pub fn phase_diagram(cfg: &Config, out: &Path) -> Result<Vec<String>> {
    let a0: f64 = cfg.get("a_min", 0.0)?;
    let a1: f64 = cfg.get("a_max", 4.0)?;
    let b0: f64 = cfg.get("beta_min", 2.0)?;
    let b1: f64 = cfg.get("beta_max", 6.0)?;
    let res: usize = cfg.get("resolution", 81)?;
    if !(a0 >= 0.0 && a1 > a0 && b0 >= 2.0 && b1 > b0 && res >= 2) {
        return Err(SirgError::Domain("phase diagram needs 0 <= a_min < a_max, 2 <= beta_min < beta_max, resolution >= 2".into()));
    }
    let mut cells = Vec::new();
    let mut table = Vec::new();
    for i in 0..res {
        let a = a0 + (a1 - a0) * i as f64 / (res - 1) as f64;
        for j in 0..res {
            let b = b0 + (b1 - b0) * j as f64 / (res - 1) as f64;
            let lab = classify_regime(a, b).ok();
            cells.push((a, b, lab.map(|l| l.case)));
            table.push(match lab {
                Some(l) => vec![num(a), num(b), l.case.name().to_string(), num(l.exponent), l.infinite_mean_degree.to_string()],
                None => vec![num(a), num(b), "UNSUPPORTED".into(), "NaN".into(), "".into()],
            });
        }
    }
    Ok(vec![
        write_csv(out, "phase.csv", &["a", "beta", "case", "exponent", "infinite_mean_degree"], &table)?,
        write_file(out, "phase.svg", &phase_svg(&cells, (a0, a1), (b0, b1), res))?,
    ])
}

fn figure_beta(id: &str) -> Result<f64> {
    match id {
        "fig5a" => Ok(4.0),
        "fig5b" => Ok(3.01),
        "fig5c" => Ok(2.6),
        other => Err(SirgError::Parse(format!("unknown figure '{}' (expected fig5a, fig5b or fig5c)", other))),
    }
}

pub fn reproduce(cfg: &Config, out: &Path) -> Result<Vec<String>> {
    let figure = cfg.get("figure", "fig5a".to_string())?;
    let beta = figure_beta(&figure)?;
    let (d, a) = (2u32, 2.0);
    let n: usize = cfg.get("n", 22_000)?;
    let alphas = cfg.get_list("alphas", "1,2")?;
    let seeds: usize = cfg.get("seeds", 1)?;
    let samples: u64 = cfg.get("samples", 100_000)?;
    let seed = cfg.seed()?;
    let mut outputs = Vec::new();
    let mut fits = Vec::new();
    let mut series = Vec::new();
    let mut w_last = None;
    for (ai, &al) in alphas.iter().enumerate() {
        let p = ModelParams::new_finite(d, Alpha::Finite(al), beta, a, Kernel::Interpolation)?;
        let w = window(cfg, n, &p)?;
        let mut pooled: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
        for s in 0..seeds {
            let gseed = derive_seed(seed, (ai * 1_000_000 + s) as u64);
            let g = generate_finite_sirg(n, &p, gseed)?;
            let spec = clustering_spectrum(&g);
            let bins = log_binned_spectrum(&spec, w.bpd);
            fits.push(fit_row(&[num(al), s.to_string(), gseed.to_string()], &bins, &w));
            for r in spec {
                let e = pooled.entry(r.k).or_insert((0, 0.0));
                e.0 += r.n_k;
                e.1 += r.n_k as f64 * r.mean_cc;
            }
        }
        let spec: Vec<SpectrumRow> = pooled
            .into_iter()
            .map(|(k, (n_k, s))| SpectrumRow { k, n_k, mean_cc: s / n_k as f64 })
            .collect();
        let bins = log_binned_spectrum(&spec, w.bpd);
        outputs.push(write_csv(out, &format!("spectrum_alpha{}.csv", al), &["k", "n_k", "mean_cc"], &spectrum_rows(&spec))?);
        outputs.push(write_csv(out, &format!("binned_alpha{}.csv", al), &["k_gmean", "cc", "n_weight"], &binned_rows(&bins))?);
        series.push(Series {
            name: format!("alpha={}", al),
            points: bins.iter().map(|b| (b.k_gmean, b.cc)).collect(),
            style: Style::Points,
        });
        // infinite-model overlay where the limit exists
        if !p.is_finite_only() {
            let kmax = (2.0 * w.psi).max(20.0);
            let ks: Vec<usize> = {
                let mut v: Vec<usize> = (0..12).map(|i| (2.0 * (kmax / 2.0).powf(i as f64 / 11.0)).round() as usize).collect();
                v.dedup();
                v
            };
            let mut rows = Vec::new();
            let mut pts = Vec::new();
            for (i, &k) in ks.iter().enumerate() {
                let g = clustering_gamma_k(k, &p, samples, derive_seed(seed, 5_000_000 + (ai * 100 + i) as u64))?;
                rows.push(vec![k.to_string(), num(g.value), num(g.std_error)]);
                pts.push((k as f64, g.value));
            }
            outputs.push(write_csv(out, &format!("theory_gamma_alpha{}.csv", al), &["k", "gamma", "std_error"], &rows)?);
            series.push(Series {
                name: format!("gamma(k), alpha={}", al),
                points: pts,
                style: Style::Line,
            });
        }
        w_last = Some(w.psi);
    }
    let mut header = vec!["alpha", "seed_index", "graph_seed"];
    header.extend(FIT_TAIL);
    outputs.push(write_csv(out, "fits.csv", &header, &fits)?);
    let plot = LogLogPlot {
        title: format!("{}: n={} d={} a={} beta={}", figure, n, d, a, beta),
        x_label: "degree k".into(),
        y_label: "CC(k)".into(),
        series,
        markers: w_last.map(|x| vec![(x, "psi(n)".to_string())]).unwrap_or_default(),
    };
    outputs.push(write_file(out, &format!("{}.svg", figure), &plot.render())?);
    Ok(outputs)
}

pub fn triangle_geometry(cfg: &Config, out: &Path) -> Result<Vec<String>> {
    let p = cfg.params()?;
    let w_grid = cfg.get_list("w_grid", "16:4096:9")?;
    let n_tri: u64 = cfg.get("triangles", 20_000)?;
    let r = typical_triangle_stats(&p, &w_grid, n_tri, cfg.seed()?)?;
    let mut header = vec!["w", "k", "n_triangles", "n_pairs"];
    let names: Vec<String> = TRIANGLE_STATS.iter().flat_map(|s| [format!("mean_log_{}", s), format!("se_log_{}", s)]).collect();
    header.extend(names.iter().map(|s| s.as_str()));
    let rows: Vec<Row> = r
        .rows
        .iter()
        .map(|t| {
            let mut v = vec![num(t.w), num(t.k), t.n_triangles.to_string(), t.n_pairs.to_string()];
            for i in 0..5 {
                v.push(num(t.mean_log[i]));
                v.push(num(t.se_log[i]));
            }
            v
        })
        .collect();
    let ex: Vec<Row> = (0..5).map(|i| vec![TRIANGLE_STATS[i].to_string(), num(r.exponents[i]), num(r.exponent_se[i])]).collect();
    Ok(vec![
        write_csv(out, "triangle_rows.csv", &header, &rows)?,
        write_csv(out, "triangle_exponents.csv", &["statistic", "exponent_vs_k", "std_error"], &ex)?,
    ])
}
