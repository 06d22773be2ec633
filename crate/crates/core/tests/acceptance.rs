//! Acceptance criteria 1-12. Each test prints one `criterion k: PASS|FAIL`
//! line before asserting. Run with `--nocapture` to see the lines.

use std::f64::consts::PI;

use eqzero_core::domain::{outer_function, DomainSpec, WeightSpec, DEFAULT_FOURIER_MODES};
use eqzero_core::ensemble::{
    expected_density_pairing, g_n, montecarlo_density, montecarlo_pair_correlation,
    sample_polynomial, variance_experiment, DensityOptions, PairWindow, PlanarGrid, RadialBump,
    RadialPlateau, TestFunction,
};
use eqzero_core::orthopoly::{
    build_boundary_basis, build_interior_basis, partial_kernel, szego_prediction,
};
use eqzero_core::scaling::{
    correlation_matrices, d_infinity, kappa, pair_correlation_k2, scaled_kernel_convergence,
    Section,
};
use eqzero_core::stats::{least_squares_slope, log_log_slope};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(k: u32, pass: bool, detail: String) {
    println!(
        "criterion {k}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {k} failed: {detail}");
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Closed-form disk density against `dx dy` (the classical formula over π).
fn classical_density(n: usize, r: f64) -> f64 {
    let r2 = r * r;
    let m = (n + 1) as f64;
    let rn = r2.powi(n as i32);
    (1.0 / ((r2 - 1.0) * (r2 - 1.0)) - m * m * rn / ((rn * r2 - 1.0) * (rn * r2 - 1.0))) / PI
}

/// `∫ density · φ dx dy` for radial `φ` by composite Gauss-Legendre in `r`.
fn radial_oracle(n: usize, phi: &dyn TestFunction, r_max: f64) -> f64 {
    let rule = gauss_legendre(16);
    let panels = 800;
    let h = r_max / panels as f64;
    (0..panels)
        .map(|p| {
            let a = p as f64 * h;
            rule.iter()
                .map(|&(x, w)| {
                    let r = a + 0.5 * h * (x + 1.0);
                    0.5 * h * w * classical_density(n, r) * phi.value(c(r, 0.0)) * 2.0 * PI * r
                })
                .sum::<f64>()
        })
        .sum()
}

#[test]
fn criterion_01_exact_disk_density() {
    let n = 20;
    let disk = DomainSpec::disk();
    let basis = build_boundary_basis(&disk, &WeightSpec::constant(1.0), n, 512).unwrap();
    let grid = PlanarGrid::new(c(0.0, 0.0), 2.2, 0.01).unwrap();
    let phis: Vec<(&str, Box<dyn TestFunction>)> = vec![
        (
            "bump",
            Box::new(RadialBump::new(c(0.0, 0.0), 0.0, 1.6).unwrap()),
        ),
        (
            "ring",
            Box::new(RadialBump::new(c(0.0, 0.0), 1.0, 0.4).unwrap()),
        ),
        (
            "plateau",
            Box::new(RadialPlateau::new(c(0.0, 0.0), 0.6, 1.2).unwrap()),
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (name, phi) in &phis {
        let weak = expected_density_pairing(&basis, phi.as_ref(), &grid).unwrap();
        let exact = radial_oracle(n, phi.as_ref(), 2.0);
        let rel = ((weak - exact) / exact).abs();
        worst = worst.max(rel);
        detail.push(format!("{name}: {weak:.8} vs {exact:.8}"));
    }
    report(
        1,
        worst <= 1e-4,
        format!("max rel error {worst:.2e}; {}", detail.join(", ")),
    );
}

#[test]
fn criterion_02_g_series_anchor() {
    let worst = (2..=40)
        .map(|n: usize| (g_n(n - 1, 0.0) - ((n * n - 1) as f64) / 12.0).abs())
        .fold(0.0, f64::max);
    report(
        2,
        worst <= 1e-12,
        format!("max abs error {worst:.2e} over N = 2..40"),
    );
}

#[test]
fn criterion_03_carleman_exactness() {
    let degree = 30;
    let basis = build_interior_basis(&DomainSpec::disk(), degree, 512).unwrap();
    let mut worst: f64 = 0.0;
    for (j, row) in basis.monomial_matrix().iter().enumerate() {
        for (k, &a) in row.iter().enumerate() {
            let expected = if j == k {
                ((j + 1) as f64 / PI).sqrt()
            } else {
                0.0
            };
            worst = worst.max((a - expected).norm());
        }
    }
    report(
        3,
        worst <= 1e-10,
        format!("max coefficient error {worst:.2e} for n <= {degree}"),
    );
}

#[test]
fn criterion_04_szego_geometric_decay() {
    let ellipse = DomainSpec::ellipse(1.0, 0.5).unwrap();
    let weight = WeightSpec::constant(1.0);
    let outer = outer_function(&weight, DEFAULT_FOURIER_MODES).unwrap();
    let basis = build_boundary_basis(&ellipse, &weight, 40, 1024).unwrap();
    let z = c(2.0, 0.0);
    let values = basis.eval(z);
    let (ns, logs): (Vec<f64>, Vec<f64>) = (5..=40)
        .map(|n| {
            let err = (values[n] - szego_prediction(&ellipse, &outer, n, z).unwrap()).norm();
            (n as f64, err.ln())
        })
        .unzip();
    let slope = least_squares_slope(&ns, &logs);
    report(4, slope <= -0.1, format!("slope {slope:.4}"));
}

#[test]
fn criterion_05_scaled_kernel_limit() {
    let disk = DomainSpec::disk();
    let weight = WeightSpec::constant(1.0 / (2.0 * PI));
    let outer = outer_function(&weight, DEFAULT_FOURIER_MODES).unwrap();
    let rows = scaled_kernel_convergence(
        &disk,
        &weight,
        &outer,
        &[20, 40, 80, 160],
        c(1.0, 1.0),
        c(0.5, 0.0),
    )
    .unwrap();
    let (ns, errs): (Vec<f64>, Vec<f64>) = rows.iter().map(|&(n, e)| (n as f64, e)).unzip();
    let errs_fmt: Vec<String> = errs.iter().map(|e| format!("{e:.3e}")).collect();
    let slope = log_log_slope(&ns, &errs);
    report(
        5,
        (slope + 1.0).abs() <= 0.15,
        format!("slope {slope:.4}, errors [{}]", errs_fmt.join(", ")),
    );
}

/// `(log G)''` by its Taylor series `1/12 - x²/240 + x⁴/6048 - x⁶/172800`.
fn log_g_second_series(x: f64) -> f64 {
    let x2 = x * x;
    1.0 / 12.0 - x2 / 240.0 + x2 * x2 / 6048.0 - x2 * x2 * x2 / 172_800.0
}

#[test]
fn criterion_06_universal_density_value() {
    let at_zero = (d_infinity(0.0) - log_g_second_series(0.0) / PI).abs();
    let near = (d_infinity(0.01) - log_g_second_series(0.02) / PI).abs();
    let tail = (30.0 * 30.0 * d_infinity(30.0) - 1.0 / (4.0 * PI)).abs();
    let pass = at_zero <= 1e-10 && near <= 1e-10 && tail <= 1e-4;
    report(
        6,
        pass,
        format!("|D(0) - 1/12π| = {at_zero:.2e}, series at τ = 0.01 {near:.2e}, |τ²D(30) - 1/4π| = {tail:.2e}"),
    );
}

/// Least-squares `y ≈ a x² + b x⁴`.
fn fit_two_term(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (mut s22, mut s24, mut s44, mut r2, mut r4) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in x.iter().zip(y) {
        let (p2, p4) = (x * x, x.powi(4));
        s22 += p2 * p2;
        s24 += p2 * p4;
        s44 += p4 * p4;
        r2 += p2 * y;
        r4 += p4 * y;
    }
    let det = s22 * s44 - s24 * s24;
    ((r2 * s44 - r4 * s24) / det, (s22 * r4 - s24 * r2) / det)
}

#[test]
fn criterion_07_pair_correlation_taylor() {
    let alphas: Vec<f64> = (0..=90).map(|i| 0.01 + 0.001 * i as f64).collect();
    let kt: Vec<f64> = alphas
        .iter()
        .map(|&a| kappa(Section::Tangential, a).unwrap())
        .collect();
    let (lead_t, _) = fit_two_term(&alphas, &kt);
    let taus: Vec<f64> = (0..=50).map(|i| 0.05 + 0.005 * i as f64).collect();
    let kn: Vec<f64> = taus
        .iter()
        .map(|&t| kappa(Section::Normal, t).unwrap())
        .collect();
    let (a, b) = fit_two_term(&taus, &kn);
    let et = (lead_t * 150.0 - 1.0).abs();
    let ea = (a * 150.0 - 1.0).abs();
    let eb = (b * 1200.0 - 1.0).abs();
    report(
        7,
        et <= 0.01 && ea <= 0.02 && eb <= 0.02,
        format!(
            "tangential 150·a = {:.5}; normal 150·a = {:.5}, 1200·b = {:.5}",
            lead_t * 150.0,
            a * 150.0,
            b * 1200.0
        ),
    );
}

#[test]
fn criterion_08_det_identity() {
    let worst = [0.5, 1.0, 2.0, 5.0]
        .iter()
        .map(|&alpha: &f64| {
            let det = correlation_matrices(c(0.0, 0.0), c(0.0, alpha))
                .unwrap()
                .det_a;
            let sinc = (alpha / 2.0).sin() / (alpha / 2.0);
            (det - (1.0 - sinc * sinc)).abs()
        })
        .fold(0.0, f64::max);
    report(8, worst <= 1e-12, format!("max abs error {worst:.2e}"));
}

#[test]
fn criterion_09_equidistribution() {
    let ellipse = DomainSpec::ellipse(1.0, 0.5).unwrap();
    let basis = build_boundary_basis(&ellipse, &WeightSpec::constant(1.0), 50, 512).unwrap();
    let summary = montecarlo_density(&basis, &ellipse, 200, &DensityOptions::default(), 9).unwrap();
    let pass = summary.band_fraction >= 0.9 && summary.ks_passes();
    report(
        9,
        pass,
        format!(
            "band fraction {:.4} (need >= 0.9), KS {:.4} vs critical {:.4}, {} zeros outside the collar",
            summary.band_fraction, summary.ks_angle, summary.ks_critical, summary.outside_collar
        ),
    );
}

#[test]
fn criterion_10_variance_decay() {
    let ellipse = DomainSpec::ellipse(1.0, 0.5).unwrap();
    let phi = RadialBump::new(c(0.2, 0.1), 0.0, 1.2).unwrap();
    let degrees = [8, 16, 32, 64];
    let rows = variance_experiment(
        &ellipse,
        &WeightSpec::constant(1.0),
        &phi,
        &degrees,
        400,
        10,
    )
    .unwrap();
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let vars: Vec<f64> = rows.iter().map(|r| r.variance).collect();
    let slope = log_log_slope(&ns, &vars);
    report(
        10,
        (-2.6..=-1.4).contains(&slope),
        format!(
            "slope {slope:.4}, variances [{}]",
            vars.iter()
                .map(|v| format!("{v:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
}

#[test]
fn criterion_11_universality() {
    let weight = WeightSpec::constant(1.0);
    let alphas = vec![2.0, PI, 6.0];
    let window = |separations: Vec<f64>| PairWindow::Tangential {
        band: 0.3,
        separations,
        half_width: 0.25,
    };
    let disk = DomainSpec::disk();
    let basis = build_boundary_basis(&disk, &weight, 60, 1024).unwrap();
    let est =
        montecarlo_pair_correlation(&basis, &disk, 200_000, &window(alphas.clone()), 11).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for (&a, &v) in alphas.iter().zip(&est.values) {
        let exact = kappa(Section::Tangential, a).unwrap();
        let rel = (v - exact).abs() / exact;
        pass &= rel <= 0.15;
        detail.push(format!("disk α={a:.3}: {v:.4} vs {exact:.4}"));
    }
    let ellipse = DomainSpec::ellipse(1.0, 0.5).unwrap();
    let basis = build_boundary_basis(&ellipse, &weight, 60, 1024).unwrap();
    let est =
        montecarlo_pair_correlation(&basis, &ellipse, 50_000, &window(vec![PI]), 111).unwrap();
    let exact = kappa(Section::Tangential, PI).unwrap();
    pass &= (est.values[0] - exact).abs() / exact <= 0.2;
    detail.push(format!("ellipse α=π: {:.4} vs {exact:.4}", est.values[0]));
    report(11, pass, detail.join(", "));
}

#[test]
fn criterion_12_symmetries() {
    // S¹ invariance along the tangential direction.
    let shifted = pair_correlation_k2(c(0.0, 0.4), c(0.0, 1.1)).unwrap();
    let anchored = pair_correlation_k2(c(0.0, 0.0), c(0.0, 0.7)).unwrap();
    let s1 = (shifted - anchored).abs();

    // No such invariance in the normal direction.
    let normal = (pair_correlation_k2(c(0.5, 0.0), c(1.5, 0.0)).unwrap()
        - pair_correlation_k2(c(0.0, 0.0), c(1.0, 0.0)).unwrap())
    .abs();

    // Multiplying the weight by a constant changes nothing observable.
    let ellipse = DomainSpec::ellipse(1.0, 0.5).unwrap();
    let b1 = build_boundary_basis(&ellipse, &WeightSpec::constant(1.0), 20, 512).unwrap();
    let b3 = build_boundary_basis(&ellipse, &WeightSpec::constant(3.0), 20, 512).unwrap();
    let phi = RadialBump::new(c(0.3, 0.0), 0.0, 1.0).unwrap();
    let grid = PlanarGrid::new(c(0.0, 0.0), 1.5, 0.01).unwrap();
    let pairing = (expected_density_pairing(&b1, &phi, &grid).unwrap()
        - expected_density_pairing(&b3, &phi, &grid).unwrap())
    .abs();
    let (mut a1, mut a3) = (Vec::new(), Vec::new());
    for index in 0..200 {
        let s1 = sample_polynomial(&b1, 12, index).unwrap();
        let s3 = sample_polynomial(&b3, 12, index).unwrap();
        a1.extend(s1.zeros.iter().map(|z| z.arg()));
        a3.extend(s3.zeros.iter().map(|z| z.arg()));
    }
    let ks = two_sample_ks(&mut a1, &mut a3);
    let ks_crit = 1.63 * (2.0 / a1.len() as f64).sqrt();

    // Hermitian kernel.
    let points = [c(0.3, 0.1), c(-1.2, 0.4), c(2.0, -1.0), c(0.0, 0.6)];
    let mut herm: f64 = 0.0;
    for &z in &points {
        for &w in &points {
            let kzw = partial_kernel(&b1, z, w).value;
            let kwz = partial_kernel(&b1, w, z).value;
            herm = herm.max((kzw - kwz.conj()).norm() / kzw.norm().max(1.0));
        }
    }

    let pass = s1 <= 1e-10 && normal > 1e-4 && pairing <= 1e-10 && ks < ks_crit && herm <= 1e-12;
    report(
        12,
        pass,
        format!(
            "S¹ {s1:.2e}, normal gap {normal:.2e}, scale pairing {pairing:.2e}, scale KS {ks:.4} < {ks_crit:.4}, hermitian {herm:.2e}"
        ),
    );
}

fn two_sample_ks(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
