//! Gaussian random polynomials `f = Σ a_j P_j` with i.i.d. standard complex
//! normal coefficients, their zeros, and the expected and empirical zero
//! distributions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::numerics::{find_roots, MonomialPolynomial, RootOptions};
use crate::orthopoly::OrthonormalBasis;

mod density;
mod montecarlo;

pub use density::{
    exact_disk_density, expected_density_pairing, g_n, Constant, PlanarGrid, RadialBump,
    RadialPlateau, TestFunction,
};
pub use montecarlo::{
    montecarlo_density, montecarlo_pair_correlation, variance_experiment, DensityOptions,
    EmpiricalMeasureSummary, PairCorrelationEstimate, PairWindow, VarianceRow,
};

/// Leading coefficients below this are treated as a degenerate draw.
const DEGENERATE_LEAD: f64 = 1e-14;

/// Generator for trial `index` of a run seeded with `seed`. Each trial owns a
/// separate stream, so results do not depend on how trials are scheduled.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `N + 1` i.i.d. standard complex Gaussians (real and imaginary parts
/// independent with variance 1/2).
pub fn sample_coefficients<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..=n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * s, im * s)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedRecord {
    pub seed: u64,
    pub index: u64,
    /// Whether the first draw was degenerate and replaced.
    pub resampled: bool,
}

#[derive(Debug, Clone)]
pub struct PolynomialSample {
    pub coefficients: Vec<Complex64>,
    pub monomial: MonomialPolynomial,
    pub zeros: Vec<Complex64>,
    pub seed_record: SeedRecord,
}

/// Draws `f = Σ a_j P_j` for trial `index` and extracts its zeros.
pub fn sample_polynomial(
    basis: &OrthonormalBasis,
    seed: u64,
    index: u64,
) -> Result<PolynomialSample> {
    let mut rng = trial_rng(seed, index);
    let n = basis.degree();
    let mut coefficients = sample_coefficients(n, &mut rng);
    let lead = basis.monomial_matrix()[n][n];
    let mut resampled = false;
    if (coefficients[n] * lead).norm() < DEGENERATE_LEAD {
        coefficients = sample_coefficients(n, &mut rng);
        resampled = true;
    }
    let (monomial, zeros) = polynomial_zeros(basis, &coefficients)?;
    Ok(PolynomialSample {
        coefficients,
        monomial,
        zeros,
        seed_record: SeedRecord {
            seed,
            index,
            resampled,
        },
    })
}

/// Monomial form and zeros of `Σ a_j P_j`.
///
/// Roots come from the monomial form and are then refined by Newton steps
/// that evaluate `f` through the recurrence, which is far better conditioned
/// than the expanded coefficients at moderate degree.
pub fn polynomial_zeros(
    basis: &OrthonormalBasis,
    coeffs: &[Complex64],
) -> Result<(MonomialPolynomial, Vec<Complex64>)> {
    let monomial = basis.combine(coeffs)?;
    if monomial.degree() == 0 {
        return Ok((monomial, Vec::new()));
    }
    let mut zeros = find_roots(&monomial, RootOptions::default())?;
    for z in zeros.iter_mut() {
        polish(basis, coeffs, z);
    }
    Ok((monomial, zeros))
}

fn polish(basis: &OrthonormalBasis, coeffs: &[Complex64], z: &mut Complex64) {
    let (mut f, mut df) = basis.eval_combination(coeffs, *z);
    for _ in 0..3 {
        if df.norm() == 0.0 || f.norm() == 0.0 {
            return;
        }
        let step = f / df;
        // Only small corrections: larger ones risk jumping to a neighbour.
        if !(step.norm() < 1e-4 * z.norm().max(1.0)) {
            return;
        }
        let cand = *z - step;
        let (fc, dfc) = basis.eval_combination(coeffs, cand);
        if fc.norm() >= f.norm() {
            return;
        }
        *z = cand;
        f = fc;
        df = dfc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DomainSpec, WeightSpec};
    use crate::orthopoly::build_boundary_basis;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = sample_coefficients(10, &mut trial_rng(7, 3));
        let b = sample_coefficients(10, &mut trial_rng(7, 3));
        assert_eq!(a, b);
        assert_ne!(a, sample_coefficients(10, &mut trial_rng(7, 4)));
    }

    #[test]
    fn coefficient_moments() {
        let mut rng = trial_rng(11, 0);
        let draws = 100_000;
        let (mut mean, mut second, mut pseudo) = (c(0.0, 0.0), 0.0, c(0.0, 0.0));
        for _ in 0..draws {
            let a = sample_coefficients(0, &mut rng)[0];
            mean += a;
            second += a.norm_sqr();
            pseudo += a * a;
        }
        let d = draws as f64;
        assert!((mean / d).norm() < 0.02);
        assert!((second / d - 1.0).abs() < 0.02);
        assert!((pseudo / d).norm() < 0.02);
    }

    fn disk_basis(n: usize) -> OrthonormalBasis {
        build_boundary_basis(&DomainSpec::disk(), &WeightSpec::constant(1.0), n, 256).unwrap()
    }

    #[test]
    fn planted_polynomials() {
        let n = 8;
        let b = disk_basis(n);
        let mut a = vec![c(0.0, 0.0); n + 1];
        a[n] = c(1.0, 0.0);
        let (_, zeros) = polynomial_zeros(&b, &a).unwrap();
        assert_eq!(zeros.len(), n);
        assert!(zeros.iter().all(|z| z.norm() < 1e-12));
        a[0] = c(-1.0, 0.0);
        let (_, zeros) = polynomial_zeros(&b, &a).unwrap();
        for z in zeros {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(n as u32) - 1.0).norm() < 1e-11);
        }
        let _ = PI;
    }

    #[test]
    fn vieta_and_zero_count() {
        let e = DomainSpec::ellipse(1.0, 0.5).unwrap();
        let b = build_boundary_basis(&e, &WeightSpec::constant(1.0), 30, 512).unwrap();
        for index in 0..5 {
            let s = sample_polynomial(&b, 99, index).unwrap();
            assert_eq!(s.zeros.len(), 30);
            let coeffs = s.monomial.coeffs();
            let vieta = -coeffs[29] / coeffs[30];
            let sum: Complex64 = s.zeros.iter().sum();
            assert!((sum - vieta).norm() < 1e-8 * vieta.norm().max(1.0));
            for &z in &s.zeros {
                assert!(s.monomial.scaled_residual(z) < 1e-10);
            }
        }
    }
}
