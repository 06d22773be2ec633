//! Orthonormal polynomial bases for the boundary inner product
//! `∫_{∂Ω} f ḡ ρ |dz|` and the area inner product `∫_Ω f ḡ dx dy`, partial
//! Szegő/Bergman kernels and their asymptotic predictions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{psi_factor, DomainSpec, OuterFunction, WeightSpec};
use crate::error::{Error, Result};
use crate::numerics::{
    periodic_antiderivative, BoundaryQuadrature, CompensatedSum, MonomialPolynomial,
};

const BREAKDOWN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerProductKind {
    Boundary,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    SzegoPartial,
    BergmanPartial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEvaluation {
    pub value: Complex64,
    pub n: usize,
    pub kind: KernelKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BasisOptions {
    /// Neumaier-compensated inner products; useful for `N > 60`.
    pub extended_precision: bool,
}

/// `P_0..P_N` as Arnoldi recurrence data plus the expanded monomial form.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    degree: usize,
    kind: InnerProductKind,
    p0: f64,
    /// `hessenberg[k][j] = h_{j,k}` for `j <= k + 1`.
    hessenberg: Vec<Vec<Complex64>>,
    /// First nonzero row of each Hessenberg column above the subdiagonal.
    band_start: Vec<usize>,
    monomial: Vec<Vec<Complex64>>,
    domain: DomainSpec,
    weight: Option<WeightSpec>,
    quad_nodes: usize,
    options: BasisOptions,
}

/// Samples of a basis polynomial and of the functional `u ↦ ⟨u, P⟩`.
struct Discretization<'a> {
    quad: &'a BoundaryQuadrature,
    kind: InnerProductKind,
    rho: Vec<f64>,
    compensated: bool,
}

impl Discretization<'_> {
    /// Row `d` with `⟨u, v⟩ = Σ_m u_m d_m`.
    fn dual(&self, v: &[Complex64]) -> Vec<Complex64> {
        match self.kind {
            InnerProductKind::Boundary => v
                .iter()
                .zip(self.quad.weights())
                .zip(&self.rho)
                .map(|((v, &w), &r)| v.conj() * (w * r))
                .collect(),
            InnerProductKind::Interior => {
                // ∫_Ω u v̄ dA = (1/2i) ∮ u conj(V) dz with V' = v along the curve.
                let h = self.quad.step();
                let integrand: Vec<Complex64> = v
                    .iter()
                    .zip(self.quad.tangents())
                    .map(|(&v, &t)| v * t)
                    .collect();
                let anti = periodic_antiderivative(&integrand);
                let scale = Complex64::new(0.0, -0.5 * h);
                anti.iter()
                    .zip(self.quad.tangents())
                    .map(|(a, &t)| a.conj() * t * scale)
                    .collect()
            }
        }
    }

    fn pair(&self, u: &[Complex64], dual: &[Complex64]) -> Complex64 {
        if self.compensated {
            let mut acc = CompensatedSum::default();
            u.iter().zip(dual).for_each(|(&a, &b)| acc.add(a * b));
            acc.value()
        } else {
            u.iter().zip(dual).map(|(&a, &b)| a * b).sum()
        }
    }

    fn norm(&self, u: &[Complex64]) -> f64 {
        self.pair(u, &self.dual(u)).re.max(0.0).sqrt()
    }
}

fn arnoldi(disc: &Discretization<'_>, degree: usize) -> Result<(f64, Vec<Vec<Complex64>>)> {
    let m = disc.quad.node_count();
    let ones = vec![Complex64::new(1.0, 0.0); m];
    let mass = disc.norm(&ones);
    if !(mass > BREAKDOWN) {
        return Err(Error::NumericalBreakdown {
            degree: 0,
            norm: mass,
        });
    }
    let p0 = 1.0 / mass;
    let mut vectors = vec![vec![Complex64::new(p0, 0.0); m]];
    let mut duals = vec![disc.dual(&vectors[0])];
    let mut hess = Vec::with_capacity(degree);
    for k in 0..degree {
        let mut u: Vec<Complex64> = vectors[k]
            .iter()
            .zip(disc.quad.nodes())
            .map(|(&v, &z)| v * z)
            .collect();
        let mut h = vec![Complex64::new(0.0, 0.0); k + 2];
        for _pass in 0..2 {
            for j in 0..=k {
                let c = disc.pair(&u, &duals[j]);
                h[j] += c;
                u.iter_mut()
                    .zip(&vectors[j])
                    .for_each(|(a, &b)| *a -= c * b);
            }
        }
        let norm = disc.norm(&u);
        if !(norm > BREAKDOWN) {
            return Err(Error::NumericalBreakdown {
                degree: k + 1,
                norm,
            });
        }
        h[k + 1] = Complex64::new(norm, 0.0);
        // Entries at rounding level are noise; dropping them keeps exact
        // structure (e.g. the pure shift on the disk) exact.
        let floor = 64.0 * f64::EPSILON * h.iter().map(|v| v.norm()).fold(0.0, f64::max);
        h.iter_mut()
            .filter(|v| v.norm() < floor)
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
        u.iter_mut().for_each(|a| *a /= norm);
        duals.push(disc.dual(&u));
        vectors.push(u);
        hess.push(h);
    }
    Ok((p0, hess))
}

fn band_starts(hessenberg: &[Vec<Complex64>]) -> Vec<usize> {
    hessenberg
        .iter()
        .enumerate()
        .map(|(k, h)| {
            h[..=k]
                .iter()
                .position(|v| *v != Complex64::new(0.0, 0.0))
                .unwrap_or(k + 1)
        })
        .collect()
}

fn expand_monomials(p0: f64, hess: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let mut rows: Vec<Vec<Complex64>> = vec![vec![Complex64::new(p0, 0.0)]];
    for (k, h) in hess.iter().enumerate() {
        let mut next = vec![Complex64::new(0.0, 0.0); k + 2];
        next[1..].copy_from_slice(&rows[k]);
        for (j, row) in rows.iter().enumerate() {
            for (c, &r) in next.iter_mut().zip(row) {
                *c -= h[j] * r;
            }
        }
        let inv = 1.0 / h[k + 1].re;
        next.iter_mut().for_each(|c| *c *= inv);
        rows.push(next);
    }
    rows
}

/// Orthonormal basis for `∫_{∂Ω} f ḡ ρ |dz|` with the `M`-node trapezoid rule.
pub fn build_boundary_basis(
    domain: &DomainSpec,
    weight: &WeightSpec,
    degree: usize,
    nodes: usize,
) -> Result<OrthonormalBasis> {
    build_boundary_basis_with(domain, weight, degree, nodes, BasisOptions::default())
}

pub fn build_boundary_basis_with(
    domain: &DomainSpec,
    weight: &WeightSpec,
    degree: usize,
    nodes: usize,
    options: BasisOptions,
) -> Result<OrthonormalBasis> {
    let quad = domain.quadrature(nodes)?;
    quad.require_nodes(8 * (degree + 1))?;
    weight.check_positive(nodes)?;
    let rho = (0..nodes).map(|m| weight.eval(quad.angle(m))).collect();
    let disc = Discretization {
        quad: &quad,
        kind: InnerProductKind::Boundary,
        rho,
        compensated: options.extended_precision,
    };
    let (p0, hessenberg) = arnoldi(&disc, degree)?;
    Ok(OrthonormalBasis {
        degree,
        kind: InnerProductKind::Boundary,
        monomial: expand_monomials(p0, &hessenberg),
        p0,
        band_start: band_starts(&hessenberg),
        hessenberg,
        domain: domain.clone(),
        weight: Some(*weight),
        quad_nodes: nodes,
        options,
    })
}

/// Orthonormal basis for area measure on `Ω`; inner products are reduced to
/// contour integrals by Green's formula.
pub fn build_interior_basis(
    domain: &DomainSpec,
    degree: usize,
    nodes: usize,
) -> Result<OrthonormalBasis> {
    build_interior_basis_with(domain, degree, nodes, BasisOptions::default())
}

pub fn build_interior_basis_with(
    domain: &DomainSpec,
    degree: usize,
    nodes: usize,
    options: BasisOptions,
) -> Result<OrthonormalBasis> {
    let quad = domain.quadrature(nodes)?;
    quad.require_nodes(8 * (degree + 2))?;
    let disc = Discretization {
        quad: &quad,
        kind: InnerProductKind::Interior,
        rho: Vec::new(),
        compensated: options.extended_precision,
    };
    let (p0, hessenberg) = arnoldi(&disc, degree)?;
    Ok(OrthonormalBasis {
        degree,
        kind: InnerProductKind::Interior,
        monomial: expand_monomials(p0, &hessenberg),
        p0,
        band_start: band_starts(&hessenberg),
        hessenberg,
        domain: domain.clone(),
        weight: None,
        quad_nodes: nodes,
        options,
    })
}

impl OrthonormalBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> InnerProductKind {
        self.kind
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn weight(&self) -> Option<&WeightSpec> {
        self.weight.as_ref()
    }

    /// Node count of the construction quadrature.
    pub fn quad_nodes(&self) -> usize {
        self.quad_nodes
    }

    /// `h_{j,k}`, the coefficient of `P_j` in `z P_k`, for `j <= k + 1`.
    pub fn recurrence(&self, j: usize, k: usize) -> Complex64 {
        self.hessenberg[k].get(j).copied().unwrap_or_default()
    }

    /// Row `j` holds the monomial coefficients of `P_j`, constant term first.
    pub fn monomial_matrix(&self) -> &[Vec<Complex64>] {
        &self.monomial
    }

    pub fn polynomial(&self, j: usize) -> MonomialPolynomial {
        MonomialPolynomial::new(self.monomial[j].clone())
    }

    /// `(P_0(z), …, P_N(z))` by the Arnoldi recurrence.
    pub fn eval(&self, z: Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.degree + 1);
        out.push(Complex64::new(self.p0, 0.0));
        for (k, h) in self.hessenberg.iter().enumerate() {
            let mut next = z * out[k];
            for j in self.band_start[k]..=k {
                next -= h[j] * out[j];
            }
            out.push(next / h[k + 1].re);
        }
        out
    }

    /// `f(z) = Σ_k a_k P_k(z)` and `f'(z)` by the recurrence.
    pub fn eval_combination(&self, coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
        let n = self.degree + 1;
        let mut p = Vec::with_capacity(n);
        let mut dp = Vec::with_capacity(n);
        p.push(Complex64::new(self.p0, 0.0));
        dp.push(Complex64::new(0.0, 0.0));
        for (k, h) in self.hessenberg.iter().enumerate() {
            let mut next = z * p[k];
            let mut dnext = p[k] + z * dp[k];
            for j in self.band_start[k]..=k {
                next -= h[j] * p[j];
                dnext -= h[j] * dp[j];
            }
            let inv = 1.0 / h[k + 1].re;
            p.push(next * inv);
            dp.push(dnext * inv);
        }
        coeffs.iter().zip(p.iter().zip(&dp)).fold(
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            |(f, df), (&a, (&pk, &dpk))| (f + a * pk, df + a * dpk),
        )
    }

    /// `Σ_k a_k P_k` as a monomial polynomial.
    pub fn combine(&self, coeffs: &[Complex64]) -> Result<MonomialPolynomial> {
        if coeffs.len() != self.degree + 1 {
            return Err(Error::LengthMismatch {
                expected: self.degree + 1,
                got: coeffs.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.degree + 1];
        for (row, &a) in self.monomial.iter().zip(coeffs) {
            for (o, &c) in out.iter_mut().zip(row) {
                *o += a * c;
            }
        }
        Ok(MonomialPolynomial::new(out))
    }

    /// Gram matrix of the recurrence-evaluated basis on a fresh quadrature of
    /// the construction size.
    pub fn gram_matrix(&self) -> Result<Vec<Vec<Complex64>>> {
        let quad = self.domain.quadrature(self.quad_nodes)?;
        let disc = Discretization {
            quad: &quad,
            kind: self.kind,
            rho: match self.weight {
                Some(w) => (0..self.quad_nodes)
                    .map(|m| w.eval(quad.angle(m)))
                    .collect(),
                None => Vec::new(),
            },
            compensated: self.options.extended_precision,
        };
        let n = self.degree + 1;
        let mut samples = vec![Vec::with_capacity(quad.node_count()); n];
        for &z in quad.nodes() {
            for (s, v) in samples.iter_mut().zip(self.eval(z)) {
                s.push(v);
            }
        }
        let duals: Vec<Vec<Complex64>> = samples.iter().map(|s| disc.dual(s)).collect();
        Ok((0..n)
            .map(|j| (0..n).map(|k| disc.pair(&samples[j], &duals[k])).collect())
            .collect())
    }

    /// `max_{j,k} |⟨P_j, P_k⟩ - δ_{jk}|`.
    pub fn gram_residual(&self) -> Result<f64> {
        let g = self.gram_matrix()?;
        Ok(g.iter()
            .enumerate()
            .flat_map(|(j, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(k, &v)| (v - if j == k { 1.0 } else { 0.0 }).norm())
            })
            .fold(0.0, f64::max))
    }
}

pub fn eval_basis(basis: &OrthonormalBasis, z: Complex64) -> Vec<Complex64> {
    basis.eval(z)
}

/// `Σ_{k=0}^{N} P_k(z) conj(P_k(w))`.
pub fn partial_kernel(basis: &OrthonormalBasis, z: Complex64, w: Complex64) -> KernelEvaluation {
    let pz = basis.eval(z);
    let value = if z == w {
        Complex64::new(pz.iter().map(|p| p.norm_sqr()).sum(), 0.0)
    } else {
        pz.iter()
            .zip(basis.eval(w))
            .map(|(a, b)| a * b.conj())
            .sum()
    };
    KernelEvaluation {
        value,
        n: basis.degree,
        kind: match basis.kind {
            InnerProductKind::Boundary => KernelKind::SzegoPartial,
            InnerProductKind::Interior => KernelKind::BergmanPartial,
        },
    }
}

/// `ψ(z) Φ(z)^n`.
pub fn szego_prediction(
    domain: &DomainSpec,
    outer: &OuterFunction,
    n: usize,
    z: Complex64,
) -> Result<Complex64> {
    let psi = psi_factor(domain, outer, z)?;
    Ok(psi * domain.exterior_map(z)?.powu(n as u32))
}

/// `((n+1)/π)^{1/2} Φ'(z) Φ(z)^n`.
pub fn carleman_prediction(domain: &DomainSpec, n: usize, z: Complex64) -> Result<Complex64> {
    let w = domain.exterior_map(z)?;
    let dphi = domain.inverse_map_derivative(w).inv();
    Ok(((n as f64 + 1.0) / PI).sqrt() * dphi * w.powu(n as u32))
}

/// `A_N(z) = S_N(z,z) / Σ_{n=0}^{N} |Φ(z)|^{2n}`.
pub fn kernel_ratio(basis: &OrthonormalBasis, domain: &DomainSpec, z: Complex64) -> Result<f64> {
    let r2 = domain.exterior_map(z)?.norm_sqr();
    let n = basis.degree() as i32;
    let comparison = if (r2 - 1.0).abs() < 1e-8 {
        (0..=n).map(|k| r2.powi(k)).sum()
    } else {
        (r2.powi(n + 1) - 1.0) / (r2 - 1.0)
    };
    Ok(partial_kernel(basis, z, z).value.re / comparison)
}
