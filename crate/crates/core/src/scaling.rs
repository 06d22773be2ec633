//! Universal boundary scaling limits: the kernel `G(z) = (e^z - 1)/z`, the
//! scaled zero density `D∞`, the matrices `A∞, B∞, C∞, Λ∞` and the limit pair
//! correlation `K^{2∞}` with its tangential and normal sections.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{psi_factor, DomainSpec, OuterFunction, WeightSpec};
use crate::error::{Error, Result};
use crate::orthopoly::{build_boundary_basis, partial_kernel};

/// Radius below which `G` and its derivatives use the Taylor series.
pub const SERIES_RADIUS: f64 = 0.5;
pub const SERIES_TERMS: usize = 25;
const NEAR_DIAGONAL: f64 = 1e-10;

/// Taylor coefficients `1/(k+1)!` of `G`.
fn g_coeffs() -> [f64; SERIES_TERMS + 2] {
    let mut c = [0.0; SERIES_TERMS + 2];
    let mut f = 1.0;
    for (k, ck) in c.iter_mut().enumerate() {
        f *= (k + 1) as f64;
        *ck = 1.0 / f;
    }
    c
}

fn g_series(z: Complex64, order: usize) -> Complex64 {
    let c = g_coeffs();
    // d^order/dz^order Σ c_k z^k, Horner from the top.
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (order..SERIES_TERMS).rev() {
        let falling: f64 = (0..order).map(|j| (k - j) as f64).product();
        acc = acc * z + c[k] * falling;
    }
    acc
}

fn g_closed(z: Complex64, order: usize) -> Complex64 {
    let e = z.exp();
    match order {
        0 => (e - 1.0) / z,
        1 => (z * e - e + 1.0) / (z * z),
        _ => (z * z * e - 2.0 * z * e + 2.0 * e - 2.0) / (z * z * z),
    }
}

/// `G`, `G'` or `G''` at `z`.
pub fn eval_g(z: Complex64, order: usize) -> Complex64 {
    assert!(order <= 2, "eval_g supports orders 0, 1, 2");
    if z.norm() < SERIES_RADIUS {
        g_series(z, order)
    } else {
        g_closed(z, order)
    }
}

/// `(log G)''(x) = 1/x² - 1/(4 sinh²(x/2))`, an even function.
pub fn log_g_second_derivative(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_RADIUS {
        let z = Complex64::new(x, 0.0);
        let (g, g1, g2) = (eval_g(z, 0).re, eval_g(z, 1).re, eval_g(z, 2).re);
        g2 / g - (g1 / g).powi(2)
    } else {
        let e = (-x).exp();
        1.0 / (x * x) - e / ((1.0 - e) * (1.0 - e))
    }
}

/// Scaled zero density `D∞(τ) = (1/π)(log G)''(2τ)` per unit scaled area.
pub fn d_infinity(tau: f64) -> f64 {
    log_g_second_derivative(2.0 * tau) / PI
}

pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrices {
    pub a: Mat2,
    pub b: Mat2,
    pub c: Mat2,
    pub lambda: Mat2,
    pub det_a: f64,
}

fn mat_from(zeta: [Complex64; 2], order: usize) -> Mat2 {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (j, row) in m.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = eval_g(zeta[j] + zeta[k].conj(), order);
        }
    }
    m
}

fn mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (j, row) in m.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = x[j][0] * y[0][k] + x[j][1] * y[1][k];
        }
    }
    m
}

fn adjoint(x: &Mat2) -> Mat2 {
    [
        [x[0][0].conj(), x[1][0].conj()],
        [x[0][1].conj(), x[1][1].conj()],
    ]
}

/// `A_jk = G(ζ_j + ζ̄_k)`, `B` and `C` with `G'`, `G''`, and
/// `Λ = C - B* A^{-1} B`.
pub fn correlation_matrices(zeta1: Complex64, zeta2: Complex64) -> Result<CorrelationMatrices> {
    let zeta = [zeta1, zeta2];
    let a = mat_from(zeta, 0);
    let b = mat_from(zeta, 1);
    let c = mat_from(zeta, 2);
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if !(det.norm() > NEAR_DIAGONAL) {
        return Err(Error::NearDiagonal { det: det.norm() });
    }
    let inv = [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ];
    let correction = mul(&adjoint(&b), &mul(&inv, &b));
    let mut lambda = c;
    for j in 0..2 {
        for k in 0..2 {
            lambda[j][k] -= correction[j][k];
        }
    }
    Ok(CorrelationMatrices {
        a,
        b,
        c,
        lambda,
        det_a: det.re,
    })
}

/// Limit pair correlation
/// `K^{2∞} = (Λ11 Λ22 + Λ12 Λ21) / (π² D∞(Re ζ1) D∞(Re ζ2) det A∞)`,
/// normalized so that `K → 1` at large separation.
pub fn pair_correlation_k2(zeta1: Complex64, zeta2: Complex64) -> Result<f64> {
    let m = correlation_matrices(zeta1, zeta2)?;
    Ok(k2_from_matrices(&m, zeta1.re, zeta2.re))
}

fn k2_from_matrices(m: &CorrelationMatrices, tau1: f64, tau2: f64) -> f64 {
    let l = &m.lambda;
    let num = l[0][0] * l[1][1] + l[0][1] * l[1][0];
    let den = PI * PI * d_infinity(tau1) * d_infinity(tau2) * m.det_a;
    num.re / den
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    /// `κ^T(α) = K^{2∞}(0, iα)`.
    Tangential,
    /// `κ^⊥(τ) = K^{2∞}(0, τ)`.
    Normal,
}

/// Below this separation the sections are evaluated from their Taylor
/// polynomials, where the ratio formula loses all digits.
const KAPPA_SERIES_CUTOFF: f64 = 1e-2;

/// Tabulates `κ^T` or `κ^⊥` on `grid`; `κ(0) = 0`.
pub fn kappa_curves(section: Section, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter().map(|&s| Ok((s, kappa(section, s)?))).collect()
}

pub fn kappa(section: Section, s: f64) -> Result<f64> {
    let a = s.abs();
    if a < KAPPA_SERIES_CUTOFF {
        return Ok(match section {
            Section::Tangential => a * a / 150.0 + 11.0 * a.powi(4) / 42000.0,
            Section::Normal => s * s / 150.0 + s.powi(4) / 1200.0,
        });
    }
    match section {
        Section::Tangential => {
            pair_correlation_k2(Complex64::new(0.0, 0.0), Complex64::new(0.0, s))
        }
        Section::Normal => pair_correlation_k2(Complex64::new(0.0, 0.0), Complex64::new(s, 0.0)),
    }
}

/// Errors `|(1/N) Ŝ_N(1+ζ1/N, 1+ζ2/N) - |ψ(z_0)|² G(ζ1+ζ̄2)|` for each `N`,
/// with `Ŝ_N = S_N ∘ Ψ` and `z_0 = Ψ(1)`.
pub fn scaled_kernel_convergence(
    domain: &DomainSpec,
    weight: &WeightSpec,
    outer: &OuterFunction,
    degrees: &[usize],
    zeta1: Complex64,
    zeta2: Complex64,
) -> Result<Vec<(usize, f64)>> {
    if zeta1.re < -2.0 || zeta2.re < -2.0 {
        return Err(Error::InvalidInput("Re ζ must be at least -2".into()));
    }
    let z0 = domain.boundary_point(0.0);
    let psi = psi_factor(domain, outer, z0)?;
    let limit = psi.norm_sqr() * eval_g(zeta1 + zeta2.conj(), 0);
    degrees
        .iter()
        .map(|&n| {
            if n < 20 {
                return Err(Error::InvalidInput(format!("N = {n} is below 20")));
            }
            let nodes = (8 * (n + 1)).max(256);
            let basis = build_boundary_basis(domain, weight, n, nodes)?;
            let nf = n as f64;
            let z1 = domain.inverse_map(Complex64::new(1.0, 0.0) + zeta1 / nf);
            let z2 = domain.inverse_map(Complex64::new(1.0, 0.0) + zeta2 / nf);
            let s = partial_kernel(&basis, z1, z2).value / nf;
            Ok((n, (s - limit).norm()))
        })
        .collect()
}
