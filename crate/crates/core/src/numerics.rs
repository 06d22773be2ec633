//! Complex numerics kernel: monomial polynomials, the Aberth–Ehrlich root
//! finder, periodic trapezoid quadrature on closed analytic curves and the
//! Green-identity reduction of area integrals to boundary integrals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Polynomial `c_0 + c_1 z + ... + c_d z^d` stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialPolynomial {
    coeffs: Vec<Complex64>,
}

impl MonomialPolynomial {
    /// Builds a polynomial, trimming exactly-zero leading coefficients so the
    /// stored leading coefficient is nonzero (unless the polynomial is zero).
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Expands `lead * prod (z - r_k)`.
    pub fn from_roots(roots: &[Complex64], lead: Complex64) -> Self {
        let mut c = vec![lead];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner_eval(self, z)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `|p(z)| / (max|c_k| * max(1,|z|)^d)`, the residual used to accept roots.
    pub fn scaled_residual(&self, z: Complex64) -> f64 {
        let scale = self.max_abs_coeff() * z.norm().max(1.0).powi(self.degree() as i32);
        if scale == 0.0 {
            return 0.0;
        }
        self.eval(z).norm() / scale
    }
}

/// Nested multiplication `(...(c_d z + c_{d-1}) z + ...) z + c_0`.
pub fn horner_eval(p: &MonomialPolynomial, z: Complex64) -> Complex64 {
    p.coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Bound on the scaled residual every returned root must satisfy.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// All roots of `p` (with multiplicity) by Aberth–Ehrlich simultaneous
/// iteration, Gauss–Seidel style.
///
/// Exact zero low-order coefficients are deflated first, so `z^k q(z)`
/// returns `k` roots that are exactly zero.
pub fn find_roots(p: &MonomialPolynomial, opts: RootOptions) -> Result<Vec<Complex64>> {
    let d = p.degree();
    if d == 0 {
        return Err(Error::InvalidInput(
            "root finding needs a polynomial of degree >= 1".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let trailing = p.coeffs.iter().take_while(|&&c| c == zero).count();
    let mut roots = vec![zero; trailing];
    let q = MonomialPolynomial::new(p.coeffs[trailing..].to_vec());
    let dq = q.degree();
    match dq {
        0 => return Ok(roots),
        1 => {
            roots.push(-q.coeffs[0] / q.coeffs[1]);
            return Ok(roots);
        }
        _ => {}
    }

    let lead = q.leading();
    // Geometric mean of the root moduli.
    let mut radius = (q.coeffs[0] / lead).norm().powf(1.0 / dq as f64);
    if !radius.is_finite() || radius == 0.0 {
        radius = 1.0;
    }
    let mut z: Vec<Complex64> = (0..dq)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / dq as f64 + 0.7))
        .collect();
    let mut done = vec![false; dq];
    let abs_coeffs = AbsPolynomial::new(&q);
    let mut iterations = 0;
    while iterations < opts.max_iter && done.iter().any(|&f| !f) {
        iterations += 1;
        for i in 0..dq {
            if done[i] {
                continue;
            }
            let (v, dv) = q.eval_with_derivative(z[i]);
            // Below the Horner rounding bound the step is noise.
            if v.norm() <= 16.0 * f64::EPSILON * abs_coeffs.eval_abs(z[i].norm()) {
                done[i] = true;
                continue;
            }
            let ratio = if dv == zero {
                // Stationary point: nudge instead of dividing by zero.
                Complex64::from_polar(1e-3 * z[i].norm().max(1.0), i as f64)
            } else {
                v / dv
            };
            let repulsion: Complex64 = (0..dq)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff == zero {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
    }

    let worst = z.iter().map(|&r| q.scaled_residual(r)).fold(0.0, f64::max);
    if !(worst < opts.tol) {
        return Err(Error::NonConvergence {
            iterations,
            residual: worst,
        });
    }
    roots.extend(z);
    Ok(roots)
}

struct AbsPolynomial(Vec<f64>);

impl AbsPolynomial {
    fn new(p: &MonomialPolynomial) -> Self {
        Self(p.coeffs.iter().map(|c| c.norm()).collect())
    }

    fn eval_abs(&self, r: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * r + c)
    }
}

/// Periodic trapezoid rule on a closed curve `z(θ)`, `θ_m = 2πm/M`.
///
/// `nodes[m] = z(θ_m)`, `tangents[m] = dz/dθ(θ_m)`. The arc-length weight of a
/// node is `|dz/dθ| 2π/M`.
#[derive(Debug, Clone)]
pub struct BoundaryQuadrature {
    nodes: Vec<Complex64>,
    tangents: Vec<Complex64>,
    weights: Vec<f64>,
}

impl BoundaryQuadrature {
    pub fn from_parts(nodes: Vec<Complex64>, tangents: Vec<Complex64>) -> Result<Self> {
        if nodes.len() != tangents.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                got: tangents.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::InvalidInput(
                "quadrature needs at least one node".into(),
            ));
        }
        let h = 2.0 * PI / nodes.len() as f64;
        let weights = tangents.iter().map(|t| t.norm() * h).collect();
        Ok(Self {
            nodes,
            tangents,
            weights,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn angle(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.nodes.len() as f64
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn tangents(&self) -> &[Complex64] {
        &self.tangents
    }

    /// Arc-length weights `|dz|` per node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.nodes.len() as f64
    }

    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Fails with `QuadratureTooCoarse` unless `M >= factor * (degree + offset)`.
    pub fn require_nodes(&self, required: usize) -> Result<()> {
        if self.nodes.len() < required {
            return Err(Error::QuadratureTooCoarse {
                nodes: self.nodes.len(),
                required,
            });
        }
        Ok(())
    }
}

/// `Σ samples[m] |dz|_m`.
pub fn boundary_integral(samples: &[Complex64], quad: &BoundaryQuadrature) -> Result<Complex64> {
    if samples.len() != quad.node_count() {
        return Err(Error::LengthMismatch {
            expected: quad.node_count(),
            got: samples.len(),
        });
    }
    Ok(samples
        .iter()
        .zip(&quad.weights)
        .map(|(&s, &w)| s * w)
        .sum())
}

/// `∮ f dz` with the trapezoid rule.
pub fn contour_integral(samples: &[Complex64], quad: &BoundaryQuadrature) -> Result<Complex64> {
    if samples.len() != quad.node_count() {
        return Err(Error::LengthMismatch {
            expected: quad.node_count(),
            got: samples.len(),
        });
    }
    let h = quad.step();
    Ok(samples
        .iter()
        .zip(&quad.tangents)
        .map(|(&s, &t)| s * t)
        .sum::<Complex64>()
        * h)
}

/// `∫_Ω z^j z̄^k dx dy` through `(1/(2i(k+1))) ∮ z^j z̄^{k+1} dz`.
pub fn interior_monomial_integral(j: u32, k: u32, quad: &BoundaryQuadrature) -> Complex64 {
    let samples: Vec<Complex64> = quad
        .nodes
        .iter()
        .map(|&z| z.powu(j) * z.conj().powu(k + 1))
        .collect();
    let contour = contour_integral(&samples, quad).expect("lengths match by construction");
    contour / (2.0 * I * (k as f64 + 1.0))
}

/// Spectral antiderivative of a smooth periodic function sampled on the
/// uniform grid `θ_m = 2πm/M`: returns `F` with `F' = f` and zero mean.
///
/// The mean of `f` is discarded; callers integrate exact differentials whose
/// mean vanishes.
pub fn periodic_antiderivative(samples: &[Complex64]) -> Vec<Complex64> {
    let m = samples.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = samples.to_vec();
    planner.plan_fft_forward(m).process(&mut buf);
    for (idx, c) in buf.iter_mut().enumerate() {
        let freq = if idx <= m / 2 {
            idx as i64
        } else {
            idx as i64 - m as i64
        };
        if freq == 0 || (m % 2 == 0 && idx == m / 2) {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c /= I * freq as f64;
        }
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum_step(self.sum.re, x.re, &mut self.carry.re);
        self.sum.im = two_sum_step(self.sum.im, x.im, &mut self.carry.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

fn two_sum_step(sum: f64, x: f64, carry: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *carry += (sum - t) + x;
    } else {
        *carry += (x - t) + sum;
    }
    t
}
