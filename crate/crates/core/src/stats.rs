//! Nearest-neighbor level-spacing statistics: spectral unfolding, the Brody
//! interpolation between Poisson and Wigner-Dyson spacing laws, and its
//! maximum-likelihood fit with a binned least-squares cross-check.

use crate::error::{Error, Result};
use crate::numeric::{cheb_eval, ln_gamma, minimize_scalar, polyfit_chebyshev};

/// Spacings below this count as exact degeneracies: kept in the ensemble,
/// excluded from the likelihood (the Brody density vanishes at s = 0).
const ZERO_SPACING: f64 = 1e-12;

/// Refuse the fit when degeneracies dominate the ensemble.
const MAX_ZERO_FRACTION: f64 = 0.30;

/// Below this many spacings the fit is flagged as low-sample.
const LOW_SAMPLE: usize = 200;

/// Search bracket for the repulsion exponent; values slightly above 1 occur
/// in finite samples.
const BETA_RANGE: (f64, f64) = (0.0, 1.2);

#[derive(Debug, Clone)]
pub struct SpacingEnsemble {
    /// Unfolded spacings, mean ~= 1, order following the spectrum.
    pub spacings: Vec<f64>,
    pub keep_fraction: f64,
    pub poly_degree: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct BrodyFit {
    /// Maximum-likelihood repulsion exponent.
    pub beta: f64,
    pub log_likelihood: f64,
    /// Half-width from the observed information at the optimum; infinite
    /// when the likelihood has no usable curvature there.
    pub confidence_halfwidth: f64,
    /// Independent binned least-squares estimate and its RMS residual.
    pub histogram_beta: f64,
    pub histogram_residual: f64,
    /// Exact degeneracies excluded from the likelihood.
    pub zero_count: usize,
    /// Spacings that entered the likelihood.
    pub sample_count: usize,
    pub low_sample: bool,
}

/// Unfolds an ascending spectrum: truncates (1-keep_fraction)/2 of the
/// levels at each edge, fits the cumulative staircase with a Chebyshev
/// polynomial, and returns successive differences of the smooth fit.
/// Exact degeneracies survive as zero spacings.
pub fn unfold(energies: &[f64], keep_fraction: f64, poly_degree: usize) -> Result<SpacingEnsemble> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "keep_fraction {keep_fraction} outside (0, 1]"
        )));
    }
    if poly_degree < 1 || poly_degree > 15 {
        return Err(Error::Domain(format!(
            "unfolding degree {poly_degree} outside 1..=15"
        )));
    }
    if energies.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("energies must be sorted ascending".into()));
    }

    let n = energies.len();
    // Nudge before flooring so 0.1 * 100 lands on 10, not 9.999...
    let drop = ((1.0 - keep_fraction) * 0.5 * n as f64 + 1e-9).floor() as usize;
    let kept = &energies[drop..n - drop];
    if kept.len() < 50 {
        return Err(Error::InsufficientLevels { have: kept.len(), need: 50 });
    }

    let lo = kept[0];
    let hi = kept[kept.len() - 1];
    if !(hi - lo).is_normal() {
        return Err(Error::Domain("kept spectrum has zero width".into()));
    }

    let counts: Vec<f64> = (0..kept.len()).map(|i| (i + 1) as f64).collect();
    let coeffs = polyfit_chebyshev(kept, &counts, poly_degree, (lo, hi));

    // The smooth staircase must not decrease anywhere we evaluate it;
    // midpoints catch oscillation between data points.
    let tol = 1e-9 * kept.len() as f64;
    let mut prev = cheb_eval(&coeffs, (lo, hi), kept[0]);
    for w in kept.windows(2) {
        for x in [0.5 * (w[0] + w[1]), w[1]] {
            let v = cheb_eval(&coeffs, (lo, hi), x);
            if v < prev - tol {
                return Err(Error::NonMonotoneUnfolding { degree: poly_degree });
            }
            prev = v;
        }
    }

    let smooth: Vec<f64> = kept.iter().map(|&e| cheb_eval(&coeffs, (lo, hi), e)).collect();
    let spacings: Vec<f64> = smooth.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    Ok(SpacingEnsemble { spacings, keep_fraction, poly_degree })
}

/// Normalization constant b(beta) = Gamma((beta+2)/(beta+1))^(beta+1),
/// which gives the Brody density unit mean.
pub fn brody_b(beta: f64) -> f64 {
    ((beta + 1.0) * ln_gamma((beta + 2.0) / (beta + 1.0))).exp()
}

/// Brody density P(s) = (beta+1) b s^beta exp(-b s^(beta+1)).
pub fn brody_density(s: f64, beta: f64) -> f64 {
    debug_assert!(s >= 0.0 && beta >= 0.0);
    let b = brody_b(beta);
    (beta + 1.0) * b * s.powf(beta) * (-b * s.powf(beta + 1.0)).exp()
}

/// Poisson limit (beta = 0).
pub fn poisson_density(s: f64) -> f64 {
    (-s).exp()
}

/// Wigner surmise (beta = 1).
pub fn wigner_density(s: f64) -> f64 {
    let pi = std::f64::consts::PI;
    0.5 * pi * s * (-0.25 * pi * s * s).exp()
}

/// Inverse CDF of the Brody density: s(u) with u uniform on [0, 1).
/// Sampling route for fit validation.
pub fn brody_inverse_cdf(u: f64, beta: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    (-(1.0 - u).ln() / brody_b(beta)).powf(1.0 / (beta + 1.0))
}

/// Probability-density histogram of a spacing ensemble over [0, max(s)].
pub fn spacing_histogram(spacings: &[f64], bins: usize) -> Vec<(f64, f64)> {
    assert!(bins >= 2 && !spacings.is_empty());
    let smax = spacings.iter().cloned().fold(0.0, f64::max).max(1e-9);
    let width = smax * (1.0 + 1e-12) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in spacings {
        let b = ((s / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let norm = 1.0 / (spacings.len() as f64 * width);
    counts
        .iter()
        .enumerate()
        .map(|(b, &c)| ((b as f64 + 0.5) * width, c as f64 * norm))
        .collect()
}

/// Maximum-likelihood Brody fit. The working copy is rescaled to unit mean,
/// zero spacings are excluded from the likelihood (count reported), and a
/// binned least-squares estimate cross-checks the MLE.
pub fn fit_brody(ens: &SpacingEnsemble) -> Result<BrodyFit> {
    let all = &ens.spacings;
    if all.len() < 2 {
        return Err(Error::InsufficientLevels { have: all.len(), need: 2 });
    }
    let zero_count = all.iter().filter(|&&s| s <= ZERO_SPACING).count();
    let zero_fraction = zero_count as f64 / all.len() as f64;
    if zero_fraction > MAX_ZERO_FRACTION {
        return Err(Error::DegenerateEnsemble { zero_fraction: 100.0 * zero_fraction });
    }

    let mean = all.iter().sum::<f64>() / all.len() as f64;
    if !(mean.is_finite() && mean > 0.0) {
        return Err(Error::Domain("spacing ensemble has non-positive mean".into()));
    }
    let pos: Vec<f64> = all
        .iter()
        .filter(|&&s| s > ZERO_SPACING)
        .map(|&s| s / mean)
        .collect();
    let sample_count = pos.len();

    let sum_ln: f64 = pos.iter().map(|s| s.ln()).sum();
    let loglik = |beta: f64| -> f64 {
        let b = brody_b(beta);
        let sum_pow: f64 = pos.iter().map(|s| s.powf(beta + 1.0)).sum();
        sample_count as f64 * ((beta + 1.0) * b).ln() + beta * sum_ln - b * sum_pow
    };

    let beta = minimize_scalar(|b| -loglik(b), BETA_RANGE.0, BETA_RANGE.1, 60);
    let log_likelihood = loglik(beta);

    // Observed information; one-sided stencil when the optimum sits at the
    // lower bound (the density is undefined for beta < 0).
    let h = 1e-3;
    let curvature = if beta >= h {
        (loglik(beta + h) - 2.0 * log_likelihood + loglik(beta - h)) / (h * h)
    } else {
        (loglik(2.0 * h) - 2.0 * loglik(h) + loglik(0.0)) / (h * h)
    };
    let confidence_halfwidth = if curvature < 0.0 {
        (-1.0 / curvature).sqrt()
    } else {
        f64::INFINITY
    };

    let rescaled: Vec<f64> = all.iter().map(|&s| s / mean).collect();
    let hist = spacing_histogram(&rescaled, 40);
    let residual2 = |beta: f64| -> f64 {
        hist.iter()
            .map(|&(c, d)| {
                let p = brody_density(c, beta);
                (d - p) * (d - p)
            })
            .sum::<f64>()
            / hist.len() as f64
    };
    let histogram_beta = minimize_scalar(residual2, BETA_RANGE.0, BETA_RANGE.1, 60);
    let histogram_residual = residual2(histogram_beta).sqrt();

    Ok(BrodyFit {
        beta,
        log_likelihood,
        confidence_halfwidth,
        histogram_beta,
        histogram_residual,
        zero_count,
        sample_count,
        low_sample: sample_count < LOW_SAMPLE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64).collect()
    }

    #[test]
    fn uniform_ladder_unfolds_to_unit_spacings() {
        let ens = unfold(&ladder(100), 1.0, 7).unwrap();
        assert_eq!(ens.spacings.len(), 99);
        for &s in &ens.spacings {
            assert!((s - 1.0).abs() < 1e-6, "s = {s}");
        }
    }

    #[test]
    fn doubled_ladder_keeps_zero_spacings() {
        let mut e = Vec::new();
        for i in 0..40 {
            e.push(i as f64);
            e.push(i as f64);
        }
        let ens = unfold(&e, 1.0, 3).unwrap();
        assert_eq!(ens.spacings.len(), 79);
        let zeros = ens.spacings.iter().filter(|&&s| s == 0.0).count();
        assert_eq!(zeros, 40);
    }

    #[test]
    fn truncation_drops_edges_symmetrically() {
        let ens = unfold(&ladder(100), 0.8, 3).unwrap();
        assert_eq!(ens.spacings.len(), 79);
    }

    #[test]
    fn too_few_levels_is_an_error() {
        assert!(matches!(
            unfold(&ladder(60), 0.5, 3),
            Err(Error::InsufficientLevels { have: 30, need: 50 })
        ));
    }

    #[test]
    fn unsorted_input_is_rejected() {
        let mut e = ladder(100);
        e.swap(10, 11);
        assert!(unfold(&e, 1.0, 3).is_err());
    }

    #[test]
    fn brody_limits_match_poisson_and_wigner() {
        for &s in &[0.05, 0.3, 1.0, 2.5] {
            assert!((brody_density(s, 0.0) - poisson_density(s)).abs() < 1e-12);
            assert!((brody_density(s, 1.0) - wigner_density(s)).abs() < 1e-12);
        }
        assert!((brody_b(1.0) - std::f64::consts::PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn brody_density_normalization_and_mean() {
        // The density has an s^beta kink at the origin, so Simpson loses
        // order there. Mass: closed-form head on [0, a] plus Simpson on the
        // smooth tail. Mean: full-range Simpson at reduced accuracy.
        for &beta in &[0.25, 0.5, 0.9] {
            let b = brody_b(beta);
            let a = 0.5f64;
            let head = 1.0 - (-b * a.powf(beta + 1.0)).exp();
            let simpson = |lo: f64, hi: f64, g: &dyn Fn(f64) -> f64| {
                let n = 20_000usize;
                let h = (hi - lo) / n as f64;
                let mut acc = g(lo) + g(hi);
                for i in 1..n {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * g(lo + i as f64 * h);
                }
                acc * h / 3.0
            };
            let mass = head + simpson(a, 25.0, &|s| brody_density(s, beta));
            let mean = simpson(0.0, 25.0, &|s| s * brody_density(s, beta));
            assert!((mass - 1.0).abs() < 1e-9, "beta {beta}: mass {mass}");
            assert!((mean - 1.0).abs() < 1e-4, "beta {beta}: mean {mean}");
        }
    }

    #[test]
    fn inverse_cdf_inverts_the_cdf() {
        for &beta in &[0.0, 0.4, 1.0] {
            let b = brody_b(beta);
            for &u in &[0.1, 0.5, 0.9, 0.999] {
                let s = brody_inverse_cdf(u, beta);
                let cdf = 1.0 - (-b * s.powf(beta + 1.0)).exp();
                assert!((cdf - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_ensemble_is_refused() {
        let ens = SpacingEnsemble {
            spacings: vec![0.0; 40].into_iter().chain(vec![1.0; 60]).collect(),
            keep_fraction: 1.0,
            poly_degree: 7,
        };
        assert!(matches!(fit_brody(&ens), Err(Error::DegenerateEnsemble { .. })));
    }

    #[test]
    fn histogram_is_a_probability_density() {
        let spacings: Vec<f64> = (1..=1000).map(|i| i as f64 / 500.0).collect();
        let hist = spacing_histogram(&spacings, 20);
        let width = hist[1].0 - hist[0].0;
        let mass: f64 = hist.iter().map(|&(_, d)| d * width).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fit_flags_small_samples() {
        let spacings: Vec<f64> = (0..100)
            .map(|i| brody_inverse_cdf((i as f64 + 0.5) / 100.0, 0.5))
            .collect();
        let ens = SpacingEnsemble { spacings, keep_fraction: 1.0, poly_degree: 7 };
        let fit = fit_brody(&ens).unwrap();
        assert!(fit.low_sample);
        assert!(fit.zero_count == 0);
        // Stratified sampling at 100 points already pins beta loosely.
        assert!((fit.beta - 0.5).abs() < 0.15, "beta {}", fit.beta);
    }
}
