//! Monte Carlo experiments: empirical zero distribution, variance of linear
//! statistics, and the scaled pair correlation near the boundary.
//!
//! Trials run in parallel on the current rayon pool. Each trial draws from
//! its own generator stream and per-trial results are merged in trial order,
//! so output does not depend on the worker count.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{sample_polynomial, TestFunction};
use crate::domain::{DomainSpec, WeightSpec};
use crate::error::{Error, Result};
use crate::orthopoly::{build_boundary_basis, OrthonormalBasis};
use crate::scaling::Section;
use crate::stats::{ks_critical_99, ks_uniform, RunningStats};

/// Normalization bins need at least this many counts.
pub const MIN_NORMALIZATION_COUNT: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    /// Bins of both histograms.
    pub bins: usize,
    /// `| |Φ| - 1 | < band` counts towards `band_fraction`.
    pub band: f64,
    /// Radial histogram covers `|Φ| - 1` (or `N(|Φ| - 1)` when scaled) in
    /// `[-radial_range, radial_range)`.
    pub radial_range: f64,
    pub scale_radial_by_n: bool,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self {
            bins: 64,
            band: 0.1,
            radial_range: 0.2,
            scale_radial_by_n: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasureSummary {
    pub n: usize,
    pub trials: usize,
    /// Counts of `arg Φ(zero)` over `[0, 2π)`.
    pub angular_histogram: Vec<u64>,
    pub radial_histogram: Vec<u64>,
    pub radial_lo: f64,
    pub radial_hi: f64,
    pub radial_scaled: bool,
    /// Zeros whose radial coordinate falls outside the radial histogram.
    pub radial_overflow: u64,
    /// Zeros too deep inside `Ω` for map inversion.
    pub outside_collar: u64,
    /// Draws replaced because of a degenerate leading coefficient.
    pub resampled: u64,
    pub band_fraction: f64,
    pub ks_angle: f64,
    pub ks_critical: f64,
}

impl EmpiricalMeasureSummary {
    pub fn ks_passes(&self) -> bool {
        self.ks_angle < self.ks_critical
    }
}

struct DensityPartial {
    angles: Vec<f64>,
    radial: Vec<f64>,
    outside: u64,
    resampled: bool,
}

/// Pools `arg Φ` and `|Φ| - 1` over the zeros of `trials` random polynomials.
pub fn montecarlo_density(
    basis: &OrthonormalBasis,
    domain: &DomainSpec,
    trials: usize,
    options: &DensityOptions,
    seed: u64,
) -> Result<EmpiricalMeasureSummary> {
    if trials == 0 || options.bins == 0 {
        return Err(Error::InvalidInput(
            "trials and bins must be positive".into(),
        ));
    }
    let n = basis.degree();
    let partials: Vec<Result<DensityPartial>> = (0..trials as u64)
        .into_par_iter()
        .map(|index| {
            let sample = sample_polynomial(basis, seed, index)?;
            let mut part = DensityPartial {
                angles: Vec::with_capacity(n),
                radial: Vec::with_capacity(n),
                outside: 0,
                resampled: sample.seed_record.resampled,
            };
            for &z in &sample.zeros {
                match domain.exterior_map(z) {
                    Ok(w) => {
                        part.angles.push(w.arg().rem_euclid(2.0 * PI));
                        part.radial.push(w.norm() - 1.0);
                    }
                    Err(_) => part.outside += 1,
                }
            }
            Ok(part)
        })
        .collect();

    let bins = options.bins;
    let scale = if options.scale_radial_by_n {
        n as f64
    } else {
        1.0
    };
    let (lo, hi) = (-options.radial_range, options.radial_range);
    let mut summary = EmpiricalMeasureSummary {
        n,
        trials,
        angular_histogram: vec![0; bins],
        radial_histogram: vec![0; bins],
        radial_lo: lo,
        radial_hi: hi,
        radial_scaled: options.scale_radial_by_n,
        radial_overflow: 0,
        outside_collar: 0,
        resampled: 0,
        band_fraction: 0.0,
        ks_angle: 0.0,
        ks_critical: 0.0,
    };
    let mut angles = Vec::with_capacity(trials * n);
    let mut in_band = 0u64;
    for part in partials {
        let part = part?;
        summary.outside_collar += part.outside;
        summary.resampled += part.resampled as u64;
        for (&a, &r) in part.angles.iter().zip(&part.radial) {
            let k = ((a / (2.0 * PI)) * bins as f64) as usize;
            summary.angular_histogram[k.min(bins - 1)] += 1;
            let x = r * scale;
            if (lo..hi).contains(&x) {
                let k = ((x - lo) / (hi - lo) * bins as f64) as usize;
                summary.radial_histogram[k.min(bins - 1)] += 1;
            } else {
                summary.radial_overflow += 1;
            }
            if r.abs() < options.band {
                in_band += 1;
            }
        }
        angles.extend(part.angles);
    }
    summary.band_fraction = in_band as f64 / (trials * n) as f64;
    summary.ks_angle = ks_uniform(&angles, 0.0, 2.0 * PI);
    summary.ks_critical = ks_critical_99(angles.len());
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceRow {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

/// Sample variance over `trials` draws of `(1/N) Σ_{f(z)=0} φ(z)` for each
/// degree in `degrees`.
pub fn variance_experiment(
    domain: &DomainSpec,
    weight: &WeightSpec,
    phi: &dyn TestFunction,
    degrees: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<VarianceRow>> {
    if trials < 100 {
        return Err(Error::InvalidInput(format!(
            "variance needs at least 100 trials, got {trials}"
        )));
    }
    degrees
        .iter()
        .map(|&n| {
            if n < 4 {
                return Err(Error::InvalidInput(format!("degree {n} is below 4")));
            }
            let basis = build_boundary_basis(domain, weight, n, (8 * (n + 1)).max(256))?;
            let run_seed = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let values: Vec<Result<f64>> = (0..trials as u64)
                .into_par_iter()
                .map(|index| {
                    let s = sample_polynomial(&basis, run_seed, index)?;
                    Ok(s.zeros.iter().map(|&z| phi.value(z)).sum::<f64>() / n as f64)
                })
                .collect();
            let stats = values
                .into_iter()
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .collect::<RunningStats>();
            Ok(VarianceRow {
                n,
                mean: stats.mean(),
                variance: stats.variance(),
            })
        })
        .collect()
}

/// Where pairs are collected, in the scaled log-polar coordinates
/// `τ = (N+1) log|Φ(z)|`, `σ = (N+1) arg Φ(z)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PairWindow {
    /// Both points in `|τ| < band`, binned by `|Δσ|` around each separation.
    Tangential {
        band: f64,
        separations: Vec<f64>,
        half_width: f64,
    },
    /// Anchor in `|τ| < anchor_band`, partner with `|Δσ| <= tangential_half_width`
    /// and `τ` within `half_width` of each offset.
    Normal {
        anchor_band: f64,
        offsets: Vec<f64>,
        half_width: f64,
        tangential_half_width: f64,
    },
}

impl PairWindow {
    pub fn section(&self) -> Section {
        match self {
            PairWindow::Tangential { .. } => Section::Tangential,
            PairWindow::Normal { .. } => Section::Normal,
        }
    }

    fn centers(&self) -> &[f64] {
        match self {
            PairWindow::Tangential { separations, .. } => separations,
            PairWindow::Normal { offsets, .. } => offsets,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCorrelationEstimate {
    pub section: Section,
    pub n: usize,
    pub trials: usize,
    pub separations: Vec<f64>,
    pub values: Vec<f64>,
    /// One-standard-error Poisson bars on `values`.
    pub std_errors: Vec<f64>,
    pub pair_counts: Vec<u64>,
    /// Pair counts expected for independent points with the same one-point
    /// intensities.
    pub expected_counts: Vec<f64>,
    pub outside_collar: u64,
}

#[derive(Default)]
struct PairPartial {
    pairs: Vec<u64>,
    /// Tangential: band occupancy in slot 0. Normal: anchors in slot 0, then
    /// one-point counts per offset bin.
    norm: Vec<u64>,
    outside: u64,
}

/// Binned Monte Carlo estimate of the scaled two-point correlation, normalized
/// by one-point intensities estimated from the same run.
pub fn montecarlo_pair_correlation(
    basis: &OrthonormalBasis,
    domain: &DomainSpec,
    trials: usize,
    window: &PairWindow,
    seed: u64,
) -> Result<PairCorrelationEstimate> {
    let n = basis.degree();
    if n < 30 {
        return Err(Error::InvalidInput(format!(
            "pair correlation needs N >= 30, got {n}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let scale = (n + 1) as f64;
    let period = 2.0 * PI * scale;
    let bins = window.centers().len();
    let partials: Vec<Result<PairPartial>> = (0..trials as u64)
        .into_par_iter()
        .map(|index| {
            let sample = sample_polynomial(basis, seed, index)?;
            let mut outside = 0;
            let coords: Vec<(f64, f64)> = sample
                .zeros
                .iter()
                .filter_map(|&z| match domain.exterior_map(z) {
                    Ok(w) if w.norm() > 0.0 => Some((scale * w.norm().ln(), scale * w.arg())),
                    _ => {
                        outside += 1;
                        None
                    }
                })
                .collect();
            let mut part = collect_pairs(&coords, window, period, bins);
            part.outside = outside;
            Ok(part)
        })
        .collect();

    let mut pairs = vec![0u64; bins];
    let mut norm = vec![0u64; bins + 1];
    let mut outside_collar = 0;
    for part in partials {
        let part = part?;
        pairs.iter_mut().zip(&part.pairs).for_each(|(a, b)| *a += b);
        norm.iter_mut().zip(&part.norm).for_each(|(a, b)| *a += b);
        outside_collar += part.outside;
    }

    let t = trials as f64;
    let expected: Vec<f64> = match window {
        PairWindow::Tangential {
            separations,
            half_width,
            ..
        } => {
            if norm[0] < MIN_NORMALIZATION_COUNT {
                return Err(Error::InsufficientStatistics {
                    bin: 0,
                    count: norm[0],
                    min: MIN_NORMALIZATION_COUNT,
                });
            }
            let mean_band = norm[0] as f64 / t;
            separations
                .iter()
                .map(|&a| {
                    let width =
                        2.0 * ((a + half_width).min(period / 2.0) - (a - half_width).max(0.0));
                    t * mean_band * mean_band * width / period
                })
                .collect()
        }
        PairWindow::Normal {
            tangential_half_width,
            ..
        } => {
            let anchors = norm[0];
            (0..bins)
                .map(|k| {
                    let count = norm[k + 1].min(anchors);
                    if count < MIN_NORMALIZATION_COUNT {
                        return Err(Error::InsufficientStatistics {
                            bin: k,
                            count,
                            min: MIN_NORMALIZATION_COUNT,
                        });
                    }
                    Ok(
                        anchors as f64 * norm[k + 1] as f64 * 2.0 * tangential_half_width
                            / (t * period),
                    )
                })
                .collect::<Result<_>>()?
        }
    };
    let values = pairs
        .iter()
        .zip(&expected)
        .map(|(&p, &e)| p as f64 / e)
        .collect();
    let std_errors = pairs
        .iter()
        .zip(&expected)
        .map(|(&p, &e)| (p as f64).sqrt() / e)
        .collect();
    Ok(PairCorrelationEstimate {
        section: window.section(),
        n,
        trials,
        separations: window.centers().to_vec(),
        values,
        std_errors,
        pair_counts: pairs,
        expected_counts: expected,
        outside_collar,
    })
}

fn wrap(d: f64, period: f64) -> f64 {
    let r = d.rem_euclid(period);
    if r > period / 2.0 {
        r - period
    } else {
        r
    }
}

fn collect_pairs(
    coords: &[(f64, f64)],
    window: &PairWindow,
    period: f64,
    bins: usize,
) -> PairPartial {
    let mut part = PairPartial {
        pairs: vec![0; bins],
        norm: vec![0; bins + 1],
        outside: 0,
    };
    match window {
        PairWindow::Tangential {
            band,
            separations,
            half_width,
        } => {
            let inside: Vec<f64> = coords
                .iter()
                .filter(|c| c.0.abs() < *band)
                .map(|c| c.1)
                .collect();
            part.norm[0] = inside.len() as u64;
            for (i, &a) in inside.iter().enumerate() {
                for (j, &b) in inside.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let d = wrap(b - a, period).abs();
                    for (k, &s) in separations.iter().enumerate() {
                        if (d - s).abs() <= *half_width {
                            part.pairs[k] += 1;
                        }
                    }
                }
            }
        }
        PairWindow::Normal {
            anchor_band,
            offsets,
            half_width,
            tangential_half_width,
        } => {
            for &(tau, _) in coords {
                for (k, &o) in offsets.iter().enumerate() {
                    if (tau - o).abs() <= *half_width {
                        part.norm[k + 1] += 1;
                    }
                }
            }
            for (i, &(ta, sa)) in coords.iter().enumerate() {
                if ta.abs() >= *anchor_band {
                    continue;
                }
                part.norm[0] += 1;
                for (j, &(tb, sb)) in coords.iter().enumerate() {
                    if i == j || wrap(sb - sa, period).abs() > *tangential_half_width {
                        continue;
                    }
                    for (k, &o) in offsets.iter().enumerate() {
                        if (tb - o).abs() <= *half_width {
                            part.pairs[k] += 1;
                        }
                    }
                }
            }
        }
    }
    part
}
