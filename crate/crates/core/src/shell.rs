//! Structure-of-eigenstates diagnostics in the mean-field basis: per-row
//! connectivity and coupling statistics, the coupling-over-spacing
//! criticality scan, strength functions with Breit-Wigner and Gaussian
//! envelope fits, the Gaussian energy shell, and delocalization measures.

use faer::Mat;

use crate::eigen::{MeanFieldFrame, MeanFieldRep};
use crate::error::{Error, Result};
use crate::hamiltonian::SymMatrix;
use crate::numeric::{mean, nelder_mead, shannon_entropy};

/// Entries of the rotated Hamiltonian below 1e-10 * max|H~| count as
/// structural zeros: the rotation leaves numerical dust on exactly
/// uncoupled pairs.
pub fn default_zero_threshold(h: &SymMatrix) -> f64 {
    1e-10 * h.max_abs()
}

/// Connectivity and coupling statistics of one Hamiltonian row.
///
/// `m` counts off-diagonal entries above the structural-zero threshold;
/// `v` is their mean magnitude; `d` is the unperturbed-energy span of the
/// coupled set (anchor row included) divided by `m`; `sigma2` sums the
/// squares of all off-diagonal entries, threshold-free, so the exact
/// moment identities hold. `v` and `d` are None for uncoupled rows.
#[derive(Debug, Clone, Copy)]
pub struct RowStats {
    pub m: usize,
    pub v: Option<f64>,
    pub d: Option<f64>,
    pub sigma2: f64,
}

impl RowStats {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// The chaos-onset ratio, defined where both pieces are.
    pub fn v_over_d(&self) -> Option<f64> {
        match (self.v, self.d) {
            (Some(v), Some(d)) if d > 0.0 => Some(v / d),
            _ => None,
        }
    }
}

/// Per-row statistics of a rotated Hamiltonian whose diagonal basis has
/// unperturbed energies `epsilon`. `zero_threshold` defaults to
/// `default_zero_threshold`.
pub fn row_statistics(
    h_tilde: &SymMatrix,
    epsilon: &[f64],
    zero_threshold: Option<f64>,
) -> Vec<RowStats> {
    let n = h_tilde.order();
    assert_eq!(epsilon.len(), n, "epsilon must match the matrix order");
    let thresh = zero_threshold.unwrap_or_else(|| default_zero_threshold(h_tilde));
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = 0usize;
        let mut abs_sum = 0.0;
        let mut sigma2 = 0.0;
        let mut e_min = epsilon[i];
        let mut e_max = epsilon[i];
        for j in 0..n {
            if j == i {
                continue;
            }
            let x = h_tilde.get(i, j);
            sigma2 += x * x;
            if x.abs() > thresh {
                m += 1;
                abs_sum += x.abs();
                e_min = e_min.min(epsilon[j]);
                e_max = e_max.max(epsilon[j]);
            }
        }
        let (v, d) = if m > 0 {
            (Some(abs_sum / m as f64), Some((e_max - e_min) / m as f64))
        } else {
            (None, None)
        };
        out.push(RowStats { m, v, d, sigma2 });
    }
    out
}

/// Index range of the central `fraction` of rows (at least one row),
/// assuming the rows are ordered by the quantity of interest.
pub fn central_band(n: usize, fraction: f64) -> std::ops::Range<usize> {
    let k = ((n as f64 * fraction).round() as usize).clamp(1, n);
    let start = (n - k) / 2;
    start..start + k
}

/// Indices of the `count` values closest to the median of an ascending
/// list, returned in ascending index order.
pub fn median_rows(values: &[f64], count: usize) -> Vec<usize> {
    assert!(!values.is_empty() && count >= 1);
    let median = values[values.len() / 2];
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        (values[a] - median)
            .abs()
            .total_cmp(&(values[b] - median).abs())
            .then(a.cmp(&b))
    });
    let mut chosen: Vec<usize> = idx.into_iter().take(count.min(values.len())).collect();
    chosen.sort_unstable();
    chosen
}

#[derive(Debug, Clone, Copy)]
pub struct CriticalityPoint {
    pub coupling: f64,
    pub mean_v_over_d: f64,
    pub m_over_n: f64,
}

#[derive(Debug, Clone)]
pub struct CriticalityScan {
    pub points: Vec<CriticalityPoint>,
    /// (last grid value at or below 1, first grid value above 1); None when
    /// the ratio never exceeds 1 on the grid.
    pub crossing: Option<(f64, f64)>,
}

/// Sweeps the perturbation strength over `grid` and averages v/d and M/N
/// over the central 10% of rows. Needs only the unperturbed eigenframe:
/// H~(g) = diag(epsilon) + g * v_tilde, no further diagonalization.
pub fn criticality_scan(frame: &MeanFieldFrame, grid: &[f64]) -> Result<CriticalityScan> {
    if grid.is_empty() {
        return Err(Error::Domain("empty coupling grid".into()));
    }
    let n = frame.epsilon.len();
    let band = central_band(n, 0.10);
    let mut points = Vec::with_capacity(grid.len());
    for &g in grid {
        let h = frame.h_tilde_at(g);
        let stats = row_statistics(&h, &frame.epsilon, None);
        let ratios: Vec<f64> = band.clone().filter_map(|i| stats[i].v_over_d()).collect();
        let mean_v_over_d = if ratios.is_empty() { 0.0 } else { mean(&ratios) };
        let ms: Vec<f64> = band.clone().map(|i| stats[i].m as f64 / n as f64).collect();
        points.push(CriticalityPoint { coupling: g, mean_v_over_d, m_over_n: mean(&ms) });
    }
    let mut crossing = None;
    for (i, p) in points.iter().enumerate() {
        if p.mean_v_over_d > 1.0 {
            let below = if i == 0 { p.coupling } else { points[i - 1].coupling };
            crossing = Some((below, p.coupling));
            break;
        }
    }
    Ok(CriticalityScan { points, crossing })
}

/// Gaussian energy shell of row n: center H~[n][n] (the exact first moment
/// of the strength function) and width sigma_n (exact second moment).
pub fn energy_shell(h_tilde: &SymMatrix, n: usize) -> (f64, f64) {
    let order = h_tilde.order();
    let mut sigma2 = 0.0;
    for j in 0..order {
        if j != n {
            let x = h_tilde.get(n, j);
            sigma2 += x * x;
        }
    }
    (h_tilde.get(n, n), sigma2.sqrt())
}

/// Unit-mass Gaussian density of the energy shell.
pub fn shell_density(e: f64, center: f64, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let z = (e - center) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    /// Weighted histogram over the shell window.
    Histogram,
    /// Gaussian kernel density with bandwidth equal to the bin width.
    GaussianKernel,
}

/// Least-squares envelope fit: `width` is Gamma for the Breit-Wigner form
/// and sigma for the Gaussian; `residual` is the RMS deviation over bins.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeFit {
    pub center: f64,
    pub width: f64,
    pub residual: f64,
}

/// A strength profile: raw (energy, weight) samples, a smoothed envelope on
/// a uniform bin grid spanning the shell window (center +- 4 sigma), both
/// peak-shape fits, and the shell parameters. Serves both views of |C|^2:
/// a mean-field row spread over exact energies, and an exact eigenstate
/// spread over unperturbed energies.
#[derive(Debug, Clone)]
pub struct StrengthFunction {
    /// Anchor rows (or eigenstates for the mirrored profile). Averaged
    /// profiles align each anchor's samples on its centroid first.
    pub rows: Vec<usize>,
    pub samples: Vec<(f64, f64)>,
    pub bin_centers: Vec<f64>,
    pub envelope: Vec<f64>,
    pub breit_wigner: EnvelopeFit,
    pub gaussian: EnvelopeFit,
    pub shell_center: f64,
    pub shell_width: f64,
}

impl StrengthFunction {
    pub fn bin_width(&self) -> f64 {
        self.bin_centers[1] - self.bin_centers[0]
    }

    /// True when the Breit-Wigner form fits the envelope better.
    pub fn prefers_breit_wigner(&self) -> bool {
        self.breit_wigner.residual < self.gaussian.residual
    }
}

/// Strength function of a single mean-field row.
pub fn strength_function(
    rep: &MeanFieldRep,
    n: usize,
    bins: usize,
    smoothing: Smoothing,
) -> Result<StrengthFunction> {
    averaged_strength_function(rep, &[n], bins, smoothing)
}

/// Strength function averaged over several rows, each aligned on its own
/// centroid H~[k][k]; the window and shell use the row-mean center and
/// width.
pub fn averaged_strength_function(
    rep: &MeanFieldRep,
    rows: &[usize],
    bins: usize,
    smoothing: Smoothing,
) -> Result<StrengthFunction> {
    check_rows(rows, rep.dim())?;
    let shells: Vec<(f64, f64)> = rows.iter().map(|&k| energy_shell(&rep.h_tilde, k)).collect();
    let center = mean(&shells.iter().map(|s| s.0).collect::<Vec<_>>());
    let width = mean(&shells.iter().map(|s| s.1).collect::<Vec<_>>());
    let share = 1.0 / rows.len() as f64;
    let mut samples = Vec::with_capacity(rows.len() * rep.dim());
    for (&k, shell) in rows.iter().zip(&shells) {
        let shift = center - shell.0;
        for alpha in 0..rep.dim() {
            samples.push((rep.energies[alpha] + shift, rep.weight(k, alpha) * share));
        }
    }
    build_profile(rows.to_vec(), samples, center, width, bins, smoothing)
}

/// Mirror profile of exact eigenstates over the unperturbed energies,
/// averaged over `alphas` after centroid alignment. The overlaid shell
/// takes its width from the band-center rows (the same off-diagonal second
/// moment that bounds the strength functions) and its center from the mean
/// eigenstate centroid.
pub fn eigenstate_shell_profile(
    rep: &MeanFieldRep,
    alphas: &[usize],
    bins: usize,
    smoothing: Smoothing,
) -> Result<StrengthFunction> {
    check_rows(alphas, rep.dim())?;
    let n = rep.dim();
    let centroids: Vec<f64> = alphas
        .iter()
        .map(|&a| (0..n).map(|i| rep.weight(i, a) * rep.epsilon[i]).sum())
        .collect();
    let center = mean(&centroids);
    let band = median_rows(&rep.epsilon, alphas.len());
    let width = mean(
        &band
            .iter()
            .map(|&k| energy_shell(&rep.h_tilde, k).1)
            .collect::<Vec<_>>(),
    );
    let share = 1.0 / alphas.len() as f64;
    let mut samples = Vec::with_capacity(alphas.len() * n);
    for (&a, &c) in alphas.iter().zip(&centroids) {
        let shift = center - c;
        for i in 0..n {
            samples.push((rep.epsilon[i] + shift, rep.weight(i, a) * share));
        }
    }
    build_profile(alphas.to_vec(), samples, center, width, bins, smoothing)
}

fn check_rows(rows: &[usize], dim: usize) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Domain("empty anchor set".into()));
    }
    if let Some(&bad) = rows.iter().find(|&&r| r >= dim) {
        return Err(Error::Domain(format!("row {bad} outside basis of dimension {dim}")));
    }
    Ok(())
}

fn build_profile(
    rows: Vec<usize>,
    samples: Vec<(f64, f64)>,
    center: f64,
    width: f64,
    bins: usize,
    smoothing: Smoothing,
) -> Result<StrengthFunction> {
    if bins < 5 {
        return Err(Error::Domain(format!("need at least 5 bins, got {bins}")));
    }
    // A vanishing shell (zero perturbation) still gets a finite window so
    // the unit spike lands in a bin.
    let half = if width > 0.0 { 4.0 * width } else { 1e-6 * center.abs().max(1.0) };
    let delta = 2.0 * half / bins as f64;
    let lo = center - half;
    let bin_centers: Vec<f64> = (0..bins).map(|b| lo + (b as f64 + 0.5) * delta).collect();

    let mut heights = vec![0.0f64; bins];
    match smoothing {
        Smoothing::Histogram => {
            for &(e, w) in &samples {
                if e >= lo && e < lo + 2.0 * half {
                    let b = (((e - lo) / delta) as usize).min(bins - 1);
                    heights[b] += w;
                }
            }
        }
        Smoothing::GaussianKernel => {
            for &(e, w) in &samples {
                if e >= lo && e < lo + 2.0 * half {
                    for (b, &c) in bin_centers.iter().enumerate() {
                        let z = (c - e) / delta;
                        heights[b] += w * (-0.5 * z * z).exp();
                    }
                }
            }
        }
    }
    // Normalize by captured mass: the envelope is a unit-mass density on
    // its window even when tails leak past +-4 sigma.
    let mass: f64 = heights.iter().sum::<f64>() * delta;
    if mass > 0.0 {
        for h in &mut heights {
            *h /= mass;
        }
    }

    let breit_wigner = fit_breit_wigner(&bin_centers, &heights)?;
    let gaussian = fit_gaussian(&bin_centers, &heights)?;
    Ok(StrengthFunction {
        rows,
        samples,
        bin_centers,
        envelope: heights,
        breit_wigner,
        gaussian,
        shell_center: center,
        shell_width: width,
    })
}

fn envelope_moments(centers: &[f64], heights: &[f64]) -> (f64, f64) {
    let mass: f64 = heights.iter().sum();
    if mass <= 0.0 {
        return (mean(centers), centers[centers.len() - 1] - centers[0]);
    }
    let m1: f64 = centers.iter().zip(heights).map(|(&c, &h)| c * h).sum::<f64>() / mass;
    let m2: f64 = centers
        .iter()
        .zip(heights)
        .map(|(&c, &h)| (c - m1) * (c - m1) * h)
        .sum::<f64>()
        / mass;
    (m1, m2.sqrt().max(1e-12))
}

fn rms<F: Fn(f64) -> f64>(model: F, centers: &[f64], heights: &[f64]) -> f64 {
    let sum: f64 = centers
        .iter()
        .zip(heights)
        .map(|(&c, &h)| {
            let d = model(c) - h;
            d * d
        })
        .sum();
    (sum / centers.len() as f64).sqrt()
}

/// Unit-mass Breit-Wigner density.
pub fn breit_wigner_density(e: f64, center: f64, gamma: f64) -> f64 {
    let g = gamma.abs();
    (g / (2.0 * std::f64::consts::PI)) / ((e - center) * (e - center) + 0.25 * g * g)
}

/// Least-squares Breit-Wigner fit to an envelope; initial guesses from the
/// envelope moments (Gamma_0 = 2.35 sigma-equivalent).
pub fn fit_breit_wigner(centers: &[f64], heights: &[f64]) -> Result<EnvelopeFit> {
    let (m1, sig) = envelope_moments(centers, heights);
    let objective = |p: &[f64]| {
        let r = rms(|e| breit_wigner_density(e, p[0], p[1]), centers, heights);
        r * r
    };
    let best = nelder_mead(objective, &[m1, 2.35 * sig], &[0.5 * sig, 0.5 * sig], 400);
    finish_fit(best, centers, heights, m1, sig, |e, p| {
        breit_wigner_density(e, p[0], p[1])
    })
}

/// Least-squares unit-mass Gaussian fit to an envelope.
pub fn fit_gaussian(centers: &[f64], heights: &[f64]) -> Result<EnvelopeFit> {
    let (m1, sig) = envelope_moments(centers, heights);
    let objective = |p: &[f64]| {
        let r = rms(|e| shell_density(e, p[0], p[1].abs()), centers, heights);
        r * r
    };
    let best = nelder_mead(objective, &[m1, sig], &[0.5 * sig, 0.5 * sig], 400);
    finish_fit(best, centers, heights, m1, sig, |e, p| {
        shell_density(e, p[0], p[1].abs())
    })
}

fn finish_fit<F: Fn(f64, &[f64]) -> f64>(
    params: Vec<f64>,
    centers: &[f64],
    heights: &[f64],
    m1: f64,
    sig: f64,
    model: F,
) -> Result<EnvelopeFit> {
    let residual = rms(|e| model(e, &params), centers, heights);
    if !(params.iter().all(|p| p.is_finite()) && residual.is_finite()) {
        return Err(Error::Domain(format!(
            "envelope fit diverged (initial guesses: center {m1}, width scale {sig})"
        )));
    }
    Ok(EnvelopeFit { center: params[0], width: params[1].abs(), residual })
}

/// Per-eigenstate spread over the mean-field basis: Shannon entropy,
/// inverse participation ratio, and their statistics over the central 20%
/// of the exact spectrum.
#[derive(Debug, Clone)]
pub struct Delocalization {
    pub entropy: Vec<f64>,
    pub ipr: Vec<f64>,
    pub central_mean_entropy: f64,
    pub central_var_entropy: f64,
    pub central_mean_ipr: f64,
}

pub fn delocalization(rep: &MeanFieldRep) -> Delocalization {
    let n = rep.dim();
    let mut entropy = Vec::with_capacity(n);
    let mut ipr = Vec::with_capacity(n);
    for alpha in 0..n {
        let w = rep.state_weights(alpha);
        entropy.push(shannon_entropy(&w));
        ipr.push(1.0 / w.iter().map(|&x| x * x).sum::<f64>());
    }
    let band = central_band(n, 0.20);
    let s_band = &entropy[band.clone()];
    let central_mean_entropy = mean(s_band);
    let central_var_entropy = s_band
        .iter()
        .map(|s| (s - central_mean_entropy) * (s - central_mean_entropy))
        .sum::<f64>()
        / s_band.len() as f64;
    let central_mean_ipr = mean(&ipr[band]);
    Delocalization { entropy, ipr, central_mean_entropy, central_var_entropy, central_mean_ipr }
}

/// Occupation matrix squared elementwise: Q[(n, alpha)] = w_n^alpha.
/// Shared by delocalization summaries and diagonal-ensemble estimates.
pub fn weight_matrix(rep: &MeanFieldRep) -> Mat<f64> {
    let n = rep.dim();
    Mat::from_fn(n, n, |i, a| {
        let c = rep.coeff[(i, a)];
        c * c
    })
}
