use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::Instant;

use eqzero_core::domain::{outer_function, DEFAULT_FOURIER_MODES};
use eqzero_core::ensemble::{
    montecarlo_density, montecarlo_pair_correlation, variance_experiment, DensityOptions,
    PairWindow, RadialBump,
};
use eqzero_core::orthopoly::{
    build_boundary_basis_with, build_interior_basis_with, carleman_prediction, szego_prediction,
    BasisOptions,
};
use eqzero_core::scaling::{d_infinity, kappa, kappa_curves, scaled_kernel_convergence};
use eqzero_core::stats::{least_squares_slope, log_log_slope};
use eqzero_core::{Complex64, Section};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    complex_arg, degree_list, positive, AsymptoticsArgs, BasisArgs, CurvesArgs, Experiment,
    MonteCarloArgs, RunConfig, SectionArg,
};
use crate::csv::{self, Cell};
use crate::error::{CliError, Result};
use crate::svg::LinePlot;

pub fn version() -> String {
    format!("{} ({})", eqzero_core::VERSION, env!("EQZERO_GIT_DESCRIBE"))
}

/// Wall-clock seconds per phase, plus `total`.
#[derive(Debug)]
struct Timings {
    start: Instant,
    phases: BTreeMap<String, f64>,
}

impl Timings {
    fn new() -> Self {
        Self {
            start: Instant::now(),
            phases: BTreeMap::new(),
        }
    }

    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.phases.insert(name.into(), t.elapsed().as_secs_f64());
        out
    }

    fn finish(mut self) -> BTreeMap<String, f64> {
        self.phases
            .insert("total".into(), self.start.elapsed().as_secs_f64());
        self.phases
    }
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    command: &'a str,
    version: String,
    config: Value,
    domain: Value,
    weight: String,
    timings_seconds: BTreeMap<String, f64>,
    results: Value,
    pass: Option<bool>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn domain_echo(cfg: &RunConfig) -> Value {
    let d = &cfg.domain;
    json!({
        "label": d.label(),
        "c": d.capacity(),
        "c0": pair(d.center_coefficient()),
        "tail": d.tail().iter().map(|&z| pair(z)).collect::<Vec<_>>(),
    })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json(path: &Path, what: &'static str, value: &impl Serialize) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| CliError::Json { what, source })?;
    text.push('\n');
    write_text(path, &text)
}

fn write_summary(
    cfg: &RunConfig,
    command: &str,
    args: &impl Serialize,
    timings: Timings,
    results: Value,
    pass: Option<bool>,
) -> Result<()> {
    let summary = Summary {
        command,
        version: version(),
        config: serde_json::to_value(args).map_err(|source| CliError::Json {
            what: "config",
            source,
        })?,
        domain: domain_echo(cfg),
        weight: cfg.weight.to_string(),
        timings_seconds: timings.finish(),
        results,
        pass,
    };
    write_json(&cfg.out.join("summary.json"), "summary", &summary)
}

fn basis_options(cfg: &RunConfig) -> BasisOptions {
    BasisOptions {
        extended_precision: cfg.extended_precision,
    }
}

pub fn basis(args: &BasisArgs) -> Result<()> {
    let cfg = RunConfig::from_args(&args.common)?;
    ensure_dir(&cfg.out)?;
    let mut timings = Timings::new();
    let basis = timings.time("build", || {
        build_boundary_basis_with(
            &cfg.domain,
            &cfg.weight,
            cfg.degree,
            cfg.quad,
            basis_options(&cfg),
        )
    })?;
    let residual = timings.time("gram", || basis.gram_residual())?;

    let mut header = vec!["j".to_string()];
    for k in 0..=cfg.degree {
        header.push(format!("re_{k}"));
        header.push(format!("im_{k}"));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<Cell>> = basis
        .monomial_matrix()
        .iter()
        .enumerate()
        .map(|(j, row)| {
            std::iter::once(Cell::from(j))
                .chain(
                    row.iter()
                        .flat_map(|c| [Cell::from(c.re), Cell::from(c.im)]),
                )
                .collect()
        })
        .collect();
    csv::write(&cfg.out.join("basis.csv"), &header, &rows)?;
    write_json(
        &cfg.out.join("gram_residual.json"),
        "gram residual",
        &json!({ "degree": cfg.degree, "quad": cfg.quad, "gram_residual": residual }),
    )?;
    let pass = residual < 1e-8;
    write_summary(
        &cfg,
        "basis",
        args,
        timings,
        json!({ "gram_residual": residual }),
        Some(pass),
    )
}

fn write_curve(
    dir: &Path,
    stem: &str,
    title: &str,
    x_label: &str,
    points: &[(f64, f64)],
) -> Result<()> {
    let rows: Vec<Vec<Cell>> = points
        .iter()
        .map(|&(x, y)| vec![x.into(), y.into()])
        .collect();
    csv::write(
        &dir.join(format!("{stem}.csv")),
        &["separation", "value"],
        &rows,
    )?;
    let svg = LinePlot::new(title, x_label, "value")
        .with_series(stem, points.to_vec())
        .render();
    write_text(&dir.join(format!("{stem}.svg")), &svg)
}

pub fn scaling_curves(args: &CurvesArgs) -> Result<()> {
    let cfg = RunConfig::from_args(&args.common)?;
    let range = positive(args.range, "--range")?;
    let step = positive(args.step, "--step")?;
    ensure_dir(&cfg.out)?;
    let mut timings = Timings::new();
    let count = (range / step).round() as usize;
    let grid: Vec<f64> = (0..=count).map(|k| k as f64 * step).collect();
    let tangential = timings.time("kappa_tangential", || {
        kappa_curves(Section::Tangential, &grid)
    })?;
    let normal = timings.time("kappa_normal", || kappa_curves(Section::Normal, &grid))?;
    let density: Vec<(f64, f64)> = timings.time("d_infinity", || {
        (0..=2 * count)
            .map(|k| {
                let tau = (k as f64 - count as f64) * step;
                (tau, d_infinity(tau))
            })
            .collect()
    });
    write_curve(
        &cfg.out,
        "kappa_tangential",
        "Tangential pair correlation",
        "alpha",
        &tangential,
    )?;
    write_curve(
        &cfg.out,
        "kappa_normal",
        "Normal pair correlation",
        "tau",
        &normal,
    )?;
    write_curve(
        &cfg.out,
        "d_infinity",
        "Scaled zero density",
        "tau",
        &density,
    )?;
    let results = json!({
        "points": grid.len(),
        "d_infinity_at_zero": d_infinity(0.0),
        "kappa_tangential_at_range": tangential.last().map(|p| p.1),
        "kappa_normal_at_range": normal.last().map(|p| p.1),
    });
    write_summary(&cfg, "scaling-curves", args, timings, results, None)
}

pub fn montecarlo(args: &MonteCarloArgs) -> Result<()> {
    let cfg = RunConfig::from_args(&args.common)?;
    ensure_dir(&cfg.out)?;
    match args.experiment {
        Experiment::Density => density(args, &cfg),
        Experiment::Correlation => correlation(args, &cfg),
        Experiment::Variance => variance(args, &cfg),
    }
}

fn histogram_rows(counts: &[u64], lo: f64, hi: f64) -> Vec<Vec<Cell>> {
    let width = (hi - lo) / counts.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            vec![
                (lo + k as f64 * width).into(),
                (lo + (k + 1) as f64 * width).into(),
                c.into(),
            ]
        })
        .collect()
}

fn density(args: &MonteCarloArgs, cfg: &RunConfig) -> Result<()> {
    if args.bins == 0 {
        return Err(CliError::Config("--bins must be positive".into()));
    }
    let options = DensityOptions {
        bins: args.bins,
        band: positive(args.band, "--band")?,
        radial_range: positive(args.radial_range, "--radial-range")?,
        scale_radial_by_n: args.scale_radial,
    };
    let mut timings = Timings::new();
    let basis = timings.time("build", || {
        build_boundary_basis_with(
            &cfg.domain,
            &cfg.weight,
            cfg.degree,
            cfg.quad,
            basis_options(cfg),
        )
    })?;
    let s = timings.time("trials", || {
        montecarlo_density(&basis, &cfg.domain, cfg.trials, &options, cfg.seed)
    })?;
    let angular = histogram_rows(&s.angular_histogram, 0.0, 2.0 * PI);
    csv::write(
        &cfg.out.join("density_hist.csv"),
        &["bin_lo", "bin_hi", "count"],
        &angular,
    )?;
    let radial = histogram_rows(&s.radial_histogram, s.radial_lo, s.radial_hi);
    csv::write(
        &cfg.out.join("radial_hist.csv"),
        &["bin_lo", "bin_hi", "count"],
        &radial,
    )?;
    let centers = |counts: &[u64], lo: f64, hi: f64| -> Vec<(f64, f64)> {
        let w = (hi - lo) / counts.len() as f64;
        counts
            .iter()
            .enumerate()
            .map(|(k, &c)| (lo + (k as f64 + 0.5) * w, c as f64))
            .collect()
    };
    let svg = LinePlot::new("Angular distribution of zeros", "arg Φ", "count")
        .with_series("zeros", centers(&s.angular_histogram, 0.0, 2.0 * PI))
        .render();
    write_text(&cfg.out.join("density_hist.svg"), &svg)?;
    let x_label = if s.radial_scaled {
        "N(|Φ| - 1)"
    } else {
        "|Φ| - 1"
    };
    let svg = LinePlot::new("Radial distribution of zeros", x_label, "count")
        .with_series(
            "zeros",
            centers(&s.radial_histogram, s.radial_lo, s.radial_hi),
        )
        .render();
    write_text(&cfg.out.join("radial_hist.svg"), &svg)?;
    let results = json!({
        "zeros_mapped": s.angular_histogram.iter().sum::<u64>(),
        "outside_collar": s.outside_collar,
        "resampled": s.resampled,
        "radial_overflow": s.radial_overflow,
        "band_fraction": s.band_fraction,
        "ks_angle": s.ks_angle,
        "ks_critical_99": s.ks_critical,
        "ks_pass": s.ks_passes(),
    });
    write_summary(
        cfg,
        "montecarlo",
        args,
        timings,
        results,
        Some(s.ks_passes()),
    )
}

fn correlation(args: &MonteCarloArgs, cfg: &RunConfig) -> Result<()> {
    let seps = &args.separations;
    if seps.is_empty() || seps.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(CliError::Config(
            "--separations needs non-negative values".into(),
        ));
    }
    let half_width = positive(args.half_width, "--half-width")?;
    let band = positive(args.pair_band, "--pair-band")?;
    let tolerance = positive(args.tolerance, "--tolerance")?;
    let (window, section) = match args.section {
        SectionArg::Tangential => (
            PairWindow::Tangential {
                band,
                separations: seps.clone(),
                half_width,
            },
            Section::Tangential,
        ),
        SectionArg::Normal => (
            PairWindow::Normal {
                anchor_band: band,
                offsets: seps.clone(),
                half_width,
                tangential_half_width: positive(
                    args.tangential_half_width,
                    "--tangential-half-width",
                )?,
            },
            Section::Normal,
        ),
    };
    let mut timings = Timings::new();
    let basis = timings.time("build", || {
        build_boundary_basis_with(
            &cfg.domain,
            &cfg.weight,
            cfg.degree,
            cfg.quad,
            basis_options(cfg),
        )
    })?;
    let est = timings.time("trials", || {
        montecarlo_pair_correlation(&basis, &cfg.domain, cfg.trials, &window, cfg.seed)
    })?;
    let closed: Vec<f64> = seps
        .iter()
        .map(|&s| kappa(section, s))
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<Cell>> = (0..seps.len())
        .map(|i| {
            vec![
                seps[i].into(),
                est.values[i].into(),
                est.std_errors[i].into(),
                closed[i].into(),
                est.pair_counts[i].into(),
                est.expected_counts[i].into(),
            ]
        })
        .collect();
    csv::write(
        &cfg.out.join("pair_correlation.csv"),
        &[
            "separation",
            "value",
            "std_error",
            "closed_form",
            "pair_count",
            "expected_count",
        ],
        &rows,
    )?;
    let top = seps.iter().cloned().fold(0.0, f64::max) + 1.0;
    let grid: Vec<f64> = (0..=400).map(|k| top * k as f64 / 400.0).collect();
    let curve = kappa_curves(section, &grid)?;
    let svg = LinePlot::new("Pair correlation", "separation", "K")
        .with_series("closed form", curve)
        .with_series(
            "Monte Carlo",
            seps.iter()
                .cloned()
                .zip(est.values.iter().cloned())
                .collect(),
        )
        .render();
    write_text(&cfg.out.join("pair_correlation.svg"), &svg)?;
    let rel: Vec<f64> = est
        .values
        .iter()
        .zip(&closed)
        .map(|(v, k)| (v - k).abs() / k)
        .collect();
    let pass = rel.iter().all(|&r| r <= tolerance);
    let results = json!({
        "section": match section { Section::Tangential => "tangential", Section::Normal => "normal" },
        "separations": seps,
        "values": est.values,
        "std_errors": est.std_errors,
        "closed_form": closed,
        "relative_errors": rel,
        "tolerance": tolerance,
        "outside_collar": est.outside_collar,
    });
    write_summary(cfg, "montecarlo", args, timings, results, Some(pass))
}

fn variance(args: &MonteCarloArgs, cfg: &RunConfig) -> Result<()> {
    let degrees = degree_list(&args.n_list, "--n-list")?;
    let center = match &args.phi_center {
        Some(v) => complex_arg(v, "--phi-center")?,
        None => cfg.domain.center_coefficient(),
    };
    let width = positive(
        args.phi_width.unwrap_or(1.2 * cfg.domain.capacity()),
        "--phi-width",
    )?;
    let phi = RadialBump::new(center, 0.0, width)?;
    let mut timings = Timings::new();
    let rows = timings.time("trials", || {
        variance_experiment(
            &cfg.domain,
            &cfg.weight,
            &phi,
            &degrees,
            cfg.trials,
            cfg.seed,
        )
    })?;
    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| vec![r.n.into(), r.variance.into()])
        .collect();
    csv::write(&cfg.out.join("variance.csv"), &["N", "variance"], &table)?;
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let vars: Vec<f64> = rows.iter().map(|r| r.variance).collect();
    let slope = if rows.len() >= 2 && vars.iter().all(|&v| v > 0.0) {
        Some(log_log_slope(&ns, &vars))
    } else {
        None
    };
    let svg = LinePlot::new("Variance of linear statistics", "log10 N", "log10 variance")
        .with_series(
            "variance",
            ns.iter()
                .zip(&vars)
                .map(|(n, v)| (n.log10(), v.log10()))
                .collect(),
        )
        .render();
    write_text(&cfg.out.join("variance.svg"), &svg)?;
    let pass = slope.map(|s| (-2.6..=-1.4).contains(&s));
    let results = json!({
        "test_function": { "center": pair(center), "radius": width },
        "degrees": degrees,
        "means": rows.iter().map(|r| r.mean).collect::<Vec<_>>(),
        "variances": vars,
        "log_log_slope": slope,
        "slope_range": [-2.6, -1.4],
    });
    write_summary(cfg, "montecarlo", args, timings, results, pass)
}

fn error_rows(errors: &[(usize, f64)]) -> Vec<Vec<Cell>> {
    errors
        .iter()
        .map(|&(n, e)| vec![n.into(), e.into()])
        .collect()
}

fn log_errors(errors: &[(usize, f64)]) -> Vec<(f64, f64)> {
    errors
        .iter()
        .map(|&(n, e)| (n as f64, e.max(f64::MIN_POSITIVE).log10()))
        .collect()
}

/// Slope of `ln error` against `n` over `n >= 5`, skipping exact zeros.
fn geometric_rate(errors: &[(usize, f64)]) -> Option<f64> {
    let (ns, logs): (Vec<f64>, Vec<f64>) = errors
        .iter()
        .filter(|&&(n, e)| n >= 5 && e > 0.0)
        .map(|&(n, e)| (n as f64, e.ln()))
        .unzip();
    (ns.len() >= 2).then(|| least_squares_slope(&ns, &logs))
}

/// Decays geometrically, or already sits at the rounding floor relative to
/// the predicted size.
fn geometric_pass(errors: &[(usize, f64)], sizes: &[f64], rate: Option<f64>) -> bool {
    let worst = errors
        .iter()
        .zip(sizes)
        .map(|(e, s)| e.1 / s.max(1.0))
        .fold(0.0, f64::max);
    worst < 1e-10 || rate.is_some_and(|r| r < 0.0)
}

pub fn asymptotics(args: &AsymptoticsArgs) -> Result<()> {
    let cfg = RunConfig::from_args(&args.common)?;
    let degrees = degree_list(&args.n_list, "--n-list")?;
    let zeta1 = complex_arg(&args.zeta1, "--zeta1")?;
    let zeta2 = complex_arg(&args.zeta2, "--zeta2")?;
    let point = match &args.point {
        Some(v) => complex_arg(v, "--point")?,
        None => cfg.domain.inverse_map(Complex64::new(2.0, 0.0)),
    };
    ensure_dir(&cfg.out)?;
    let mut timings = Timings::new();
    let outer = outer_function(&cfg.weight, DEFAULT_FOURIER_MODES)?;

    let (szego, szego_sizes): (Vec<(usize, f64)>, Vec<f64>) =
        timings.time("szego", || -> Result<_> {
            let basis = build_boundary_basis_with(
                &cfg.domain,
                &cfg.weight,
                cfg.degree,
                cfg.quad,
                basis_options(&cfg),
            )?;
            let values = basis.eval(point);
            (0..=cfg.degree)
                .map(|n| {
                    let p = szego_prediction(&cfg.domain, &outer, n, point)?;
                    Ok(((n, (values[n] - p).norm()), p.norm()))
                })
                .collect::<Result<Vec<_>>>()
                .map(|v| v.into_iter().unzip())
        })?;
    let (carleman, carleman_sizes): (Vec<(usize, f64)>, Vec<f64>) =
        timings.time("carleman", || -> Result<_> {
            let basis =
                build_interior_basis_with(&cfg.domain, cfg.degree, cfg.quad, basis_options(&cfg))?;
            let values = basis.eval(point);
            (0..=cfg.degree)
                .map(|n| {
                    let p = carleman_prediction(&cfg.domain, n, point)?;
                    Ok(((n, (values[n] - p).norm()), p.norm()))
                })
                .collect::<Result<Vec<_>>>()
                .map(|v| v.into_iter().unzip())
        })?;
    let kernel = timings.time("kernel_scaling", || {
        scaled_kernel_convergence(&cfg.domain, &cfg.weight, &outer, &degrees, zeta1, zeta2)
    })?;

    csv::write(
        &cfg.out.join("szego_error.csv"),
        &["n", "abs_error"],
        &error_rows(&szego),
    )?;
    csv::write(
        &cfg.out.join("carleman_error.csv"),
        &["n", "abs_error"],
        &error_rows(&carleman),
    )?;
    csv::write(
        &cfg.out.join("kernel_scaling.csv"),
        &["N", "abs_error"],
        &error_rows(&kernel),
    )?;
    let plots = [
        (
            "szego_error.svg",
            "Szegő asymptotics",
            "n",
            log_errors(&szego),
        ),
        (
            "carleman_error.svg",
            "Carleman asymptotics",
            "n",
            log_errors(&carleman),
        ),
        (
            "kernel_scaling.svg",
            "Scaled kernel convergence",
            "log10 N",
            kernel
                .iter()
                .map(|&(n, e)| ((n as f64).log10(), e.max(f64::MIN_POSITIVE).log10()))
                .collect(),
        ),
    ];
    for (file, title, x, points) in plots {
        let svg = LinePlot::new(title, x, "log10 error")
            .with_series("error", points)
            .render();
        write_text(&cfg.out.join(file), &svg)?;
    }

    let szego_rate = geometric_rate(&szego);
    let carleman_rate = geometric_rate(&carleman);
    let (ns, errs): (Vec<f64>, Vec<f64>) = kernel.iter().map(|&(n, e)| (n as f64, e)).unzip();
    let kernel_slope =
        (kernel.len() >= 2 && errs.iter().all(|&e| e > 0.0)).then(|| log_log_slope(&ns, &errs));
    let szego_pass = geometric_pass(&szego, &szego_sizes, szego_rate);
    let carleman_pass = geometric_pass(&carleman, &carleman_sizes, carleman_rate);
    let kernel_pass = kernel_slope.is_some_and(|s| (s + 1.0).abs() <= 0.15);
    let results = json!({
        "point": pair(point),
        "zeta1": pair(zeta1),
        "zeta2": pair(zeta2),
        "szego_log_rate": szego_rate,
        "szego_pass": szego_pass,
        "carleman_log_rate": carleman_rate,
        "carleman_pass": carleman_pass,
        "kernel_log_log_slope": kernel_slope,
        "kernel_pass": kernel_pass,
    });
    write_summary(
        &cfg,
        "asymptotics",
        args,
        timings,
        results,
        Some(szego_pass && carleman_pass && kernel_pass),
    )
}
