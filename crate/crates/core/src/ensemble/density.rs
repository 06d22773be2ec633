//! Expected zero densities: the exact disk formula and the weak-form pairing
//! `(E Z_f, φ) = (1/4π) ∬ log S_N(z,z) Δφ dx dy` for general bases.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::orthopoly::OrthonormalBasis;
use crate::scaling::log_g_second_derivative;

/// `g_n(ρ) = e^{-|ρ|}/(1-e^{-|ρ|})² - (n+1)² e^{-(n+1)|ρ|}/(1-e^{-(n+1)|ρ|})²`,
/// the radial zero density of the degree-`n` disk ensemble in the variable
/// `ρ = log |z|²`. Even in `ρ`, with `g_n(0) = ((n+1)² - 1)/12`.
pub fn g_n(n: usize, rho: f64) -> f64 {
    let m = (n + 1) as f64;
    let r = rho.abs();
    if m * r < 1.0 {
        // Same quantity written as m² L(mρ) - L(ρ) with L = (log G)''; the
        // series path of L keeps this free of cancellation near ρ = 0.
        m * m * log_g_second_derivative(m * r) - log_g_second_derivative(r)
    } else {
        let e1 = (-r).exp();
        let em = (-m * r).exp();
        e1 / ((1.0 - e1) * (1.0 - e1)) - m * m * em / ((1.0 - em) * (1.0 - em))
    }
}

/// Expected density of zeros of the degree-`n` disk ensemble with respect to
/// Lebesgue measure `dx dy`.
///
/// The classical formula `1/(|z|²-1)² - (n+1)²|z|^{2n}/(|z|^{2n+2}-1)²` is the
/// density against `(i/2π) dz∧dz̄ = (1/π) dx dy`; the factor `1/π` is applied
/// here and nowhere else. It equals `g_n(log|z|²)/|z|²`, which is the form
/// evaluated.
pub fn exact_disk_density(n: usize, z: Complex64) -> f64 {
    let r2 = z.norm_sqr();
    if r2 < 1e-200 {
        return if n == 0 { 0.0 } else { 1.0 / PI };
    }
    g_n(n, r2.ln()) / (PI * r2)
}

/// Real test function with a known Laplacian.
pub trait TestFunction: Sync {
    fn value(&self, z: Complex64) -> f64;
    fn laplacian(&self, z: Complex64) -> f64;
    /// A closed disk `(center, radius)` containing the support, `None` if
    /// the support is unbounded.
    fn support(&self) -> Option<(Complex64, f64)>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl TestFunction for Constant {
    fn value(&self, _: Complex64) -> f64 {
        self.0
    }

    fn laplacian(&self, _: Complex64) -> f64 {
        0.0
    }

    fn support(&self) -> Option<(Complex64, f64)> {
        None
    }
}

/// `b(t) = exp(1 - 1/(1-t²))` on `|t| < 1` with its first two derivatives.
fn bump(t: f64) -> (f64, f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let u = 1.0 - t * t;
    let b = (1.0 - 1.0 / u).exp();
    let d1 = b * (-2.0 * t / (u * u));
    let d2 = b * (4.0 * t * t / u.powi(4) - 2.0 / (u * u) - 8.0 * t * t / u.powi(3));
    (b, d1, d2)
}

/// Smooth step from 1 (`t <= 0`) to 0 (`t >= 1`) with its derivatives.
fn smooth_step(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (1.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    // S = 1/(1 + e^h), h = 1/(1-t) - 1/t.
    let h = 1.0 / (1.0 - t) - 1.0 / t;
    if h.abs() > 700.0 {
        return (if h > 0.0 { 0.0 } else { 1.0 }, 0.0, 0.0);
    }
    let h1 = 1.0 / (1.0 - t).powi(2) + 1.0 / (t * t);
    let h2 = 2.0 / (1.0 - t).powi(3) - 2.0 / t.powi(3);
    let s = 1.0 / (1.0 + h.exp());
    let s1 = -s * (1.0 - s) * h1;
    let s2 = -s1 * (1.0 - 2.0 * s) * h1 - s * (1.0 - s) * h2;
    (s, s1, s2)
}

/// Radial profile `f(r)` with `f'` and `f''`; `Δφ = f'' + f'/r`.
fn radial_laplacian(r: f64, f1: f64, f2: f64) -> f64 {
    if r < 1e-12 {
        2.0 * f2
    } else {
        f2 + f1 / r
    }
}

/// `φ(z) = b((|z - center| - r0)/width)`: a bump at the center (`r0 = 0`) or a
/// smooth ring around the circle of radius `r0 >= width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBump {
    center: Complex64,
    r0: f64,
    width: f64,
}

impl RadialBump {
    pub fn new(center: Complex64, r0: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !(r0 == 0.0 || r0 >= width) {
            return Err(Error::InvalidInput(format!(
                "radial bump needs width > 0 and r0 = 0 or r0 >= width (r0 = {r0}, width = {width})"
            )));
        }
        Ok(Self { center, r0, width })
    }

    fn profile(&self, z: Complex64) -> (f64, f64, f64, f64) {
        let r = (z - self.center).norm();
        let (b, b1, b2) = bump((r - self.r0) / self.width);
        (r, b, b1 / self.width, b2 / (self.width * self.width))
    }
}

impl TestFunction for RadialBump {
    fn value(&self, z: Complex64) -> f64 {
        self.profile(z).1
    }

    fn laplacian(&self, z: Complex64) -> f64 {
        let (r, _, f1, f2) = self.profile(z);
        radial_laplacian(r, f1, f2)
    }

    fn support(&self) -> Option<(Complex64, f64)> {
        Some((self.center, self.r0 + self.width))
    }
}

/// Equal to 1 on `|z - center| <= inner`, 0 beyond `inner + width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPlateau {
    center: Complex64,
    inner: f64,
    width: f64,
}

impl RadialPlateau {
    pub fn new(center: Complex64, inner: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && inner >= 0.0) {
            return Err(Error::InvalidInput(
                "plateau needs inner >= 0 and width > 0".into(),
            ));
        }
        Ok(Self {
            center,
            inner,
            width,
        })
    }

    fn profile(&self, z: Complex64) -> (f64, f64, f64, f64) {
        let r = (z - self.center).norm();
        let (s, s1, s2) = smooth_step((r - self.inner) / self.width);
        (r, s, s1 / self.width, s2 / (self.width * self.width))
    }
}

impl TestFunction for RadialPlateau {
    fn value(&self, z: Complex64) -> f64 {
        self.profile(z).1
    }

    fn laplacian(&self, z: Complex64) -> f64 {
        let (r, _, f1, f2) = self.profile(z);
        radial_laplacian(r, f1, f2)
    }

    fn support(&self) -> Option<(Complex64, f64)> {
        Some((self.center, self.inner + self.width))
    }
}

pub const MAX_GRID_SPACING: f64 = 0.01;

/// Square tensor grid `center + (x, y)`, `|x|, |y| <= half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarGrid {
    pub center: Complex64,
    pub half_width: f64,
    pub spacing: f64,
}

impl PlanarGrid {
    pub fn new(center: Complex64, half_width: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) || spacing > MAX_GRID_SPACING {
            return Err(Error::GridTooCoarse {
                spacing,
                max: MAX_GRID_SPACING,
            });
        }
        Ok(Self {
            center,
            half_width,
            spacing,
        })
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        (2.0 * self.half_width / self.spacing).round() as usize + 1
    }

    fn contains(&self, center: Complex64, radius: f64) -> bool {
        let d = center - self.center;
        d.re.abs() + radius < self.half_width && d.im.abs() + radius < self.half_width
    }
}

/// `(E Z_f, φ) = (1/4π) ∬ log S_N(z,z) Δφ dx dy` by the tensor trapezoid rule.
/// `S_N` is never differentiated.
pub fn expected_density_pairing(
    basis: &OrthonormalBasis,
    phi: &dyn TestFunction,
    grid: &PlanarGrid,
) -> Result<f64> {
    if grid.spacing > MAX_GRID_SPACING {
        return Err(Error::GridTooCoarse {
            spacing: grid.spacing,
            max: MAX_GRID_SPACING,
        });
    }
    let center = match phi.support() {
        None => return Ok(0.0),
        Some((c, r)) if !grid.contains(c, r) => {
            return Err(Error::InvalidInput(
                "test function support is not inside the grid".into(),
            ))
        }
        Some((c, _)) => c,
    };
    let log_s = |z: Complex64| basis.eval(z).iter().map(|p| p.norm_sqr()).sum::<f64>().ln();
    // ∬ Δφ = 0, so a constant shift of log S is free; removing one keeps the
    // discrete sum blind to rescaling the weight.
    let reference = log_s(center);
    let n = grid.points();
    let h = grid.spacing;
    let origin = grid.center - Complex64::new(grid.half_width, grid.half_width);
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let y = i as f64 * h;
            (0..n)
                .map(|j| {
                    let z = origin + Complex64::new(j as f64 * h, y);
                    let lap = phi.laplacian(z);
                    if lap == 0.0 {
                        return 0.0;
                    }
                    (log_s(z) - reference) * lap
                })
                .sum()
        })
        .collect();
    Ok(rows.iter().sum::<f64>() * h * h / (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn g_anchor_and_evenness() {
        for n in 2..=40usize {
            let g = g_n(n - 1, 0.0);
            let expect = ((n * n) as f64 - 1.0) / 12.0;
            assert!((g - expect).abs() < 1e-12 * expect);
        }
        assert!((g_n(1, 0.0) - 0.25).abs() < 1e-15);
        for rho in [0.01, 0.3, 2.0] {
            assert_eq!(g_n(9, rho), g_n(9, -rho));
        }
    }

    #[test]
    fn g_branches_agree() {
        for n in [1usize, 5, 30] {
            let m = (n + 1) as f64;
            let rho = 1.0 / m;
            let below = g_n(n, rho * (1.0 - 1e-12));
            let above = g_n(n, rho * (1.0 + 1e-12));
            assert!((below - above).abs() < 1e-9 * above);
        }
    }

    #[test]
    fn disk_density_matches_the_classical_formula() {
        let n = 7;
        for z in [c(0.3, 0.2), c(1.5, -0.4), c(0.0, 0.7), c(3.0, 0.0)] {
            let r2: f64 = z.norm_sqr();
            let classical = 1.0 / (r2 - 1.0).powi(2)
                - ((n + 1) * (n + 1)) as f64 * r2.powi(n as i32)
                    / (r2.powi(n as i32 + 1) - 1.0).powi(2);
            assert!((exact_disk_density(n, z) * PI - classical).abs() < 1e-10 * classical);
        }
        assert!((exact_disk_density(n, c(0.0, 0.0)) - 1.0 / PI).abs() < 1e-15);
        assert!(exact_disk_density(n, c(1.0, 0.0)).is_finite());
        // Far from the circle the finite-N density approaches 1/(|z|²-1)².
        let z = c(2.0, 0.0);
        assert!((exact_disk_density(60, z) * PI - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn test_function_laplacians_match_finite_differences() {
        let fns: Vec<Box<dyn TestFunction>> = vec![
            Box::new(RadialBump::new(c(0.1, -0.2), 0.0, 0.8).unwrap()),
            Box::new(RadialBump::new(c(0.0, 0.0), 1.0, 0.3).unwrap()),
            Box::new(RadialPlateau::new(c(0.0, 0.0), 1.0, 0.5).unwrap()),
        ];
        let h = 1e-4;
        for f in &fns {
            for z in [c(0.3, 0.1), c(0.9, 0.5), c(-0.2, 1.15), c(0.05, 0.0)] {
                let fd = (f.value(z + h)
                    + f.value(z - h)
                    + f.value(z + c(0.0, h))
                    + f.value(z - c(0.0, h))
                    - 4.0 * f.value(z))
                    / (h * h);
                let exact = f.laplacian(z);
                assert!(
                    (fd - exact).abs() < 1e-5 * exact.abs().max(1.0),
                    "{fd} vs {exact}"
                );
            }
        }
        assert!(RadialBump::new(c(0.0, 0.0), 0.2, 0.5).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            PlanarGrid::new(c(0.0, 0.0), 1.0, 0.02),
            Err(Error::GridTooCoarse { .. })
        ));
        assert_eq!(
            PlanarGrid::new(c(0.0, 0.0), 1.0, 0.01).unwrap().points(),
            201
        );
    }
}
