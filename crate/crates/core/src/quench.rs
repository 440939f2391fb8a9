//! Quench dynamics: spectral-decomposition time evolution from a mean-field
//! basis state, Shannon entropy growth, survival probability, the analytic
//! comparison laws, and effective-dimension estimates.

use faer::Mat;

use crate::eigen::MeanFieldRep;
use crate::error::{Error, Result};
use crate::numeric::{mean, ols_line, shannon_entropy};
use crate::shell::{row_statistics, weight_matrix};

/// Rolling-slope window (samples) for plateau detection.
const PLATEAU_WINDOW: usize = 20;

/// A slope this fraction of the peak slope counts as saturated.
const PLATEAU_SLOPE_FRACTION: f64 = 0.01;

/// Linear-growth window of the entropy, as fractions of the saturation
/// value: excludes the quadratic start and the saturation bend.
const LINEAR_WINDOW: (f64, f64) = (0.2, 0.7);

/// Evolution of one initial mean-field basis state k: occupations
/// Omega_n(t) of every basis row, survival probability W(t) (the anchor
/// occupation), and Shannon entropy S(t).
#[derive(Debug, Clone)]
pub struct QuenchTrace {
    pub k: usize,
    pub t: Vec<f64>,
    /// N x T; column tau holds all occupations at t[tau].
    pub occupations: Mat<f64>,
    pub survival: Vec<f64>,
    pub entropy: Vec<f64>,
}

/// Default grid: 400 uniform points on [0, max_factor/sigma] resolving the
/// rise, then 100 more out to 10x that for the saturation window.
pub fn time_grid(sigma: f64, max_factor: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("time grid needs a positive energy scale, got {sigma}")));
    }
    if !(max_factor > 0.0 && max_factor.is_finite()) {
        return Err(Error::Domain(format!("time-max factor must be positive, got {max_factor}")));
    }
    let t_rise = max_factor / sigma;
    let mut t: Vec<f64> = (0..400).map(|i| t_rise * i as f64 / 399.0).collect();
    t.extend((1..=100).map(|j| t_rise + 9.0 * t_rise * j as f64 / 100.0));
    Ok(t)
}

/// Spectral-decomposition evolution:
/// Omega_n(t) = (sum_a C_ka C_na cos(E_a t))^2 + (sum_a C_ka C_na sin(E_a t))^2,
/// evaluated as two dense matrix products over the time grid.
pub fn evolve(rep: &MeanFieldRep, k: usize, t: &[f64]) -> Result<QuenchTrace> {
    let n = rep.dim();
    if k >= n {
        return Err(Error::Domain(format!("initial row {k} outside basis of dimension {n}")));
    }
    if t.is_empty() {
        return Err(Error::Domain("empty time grid".into()));
    }
    let nt = t.len();
    let phase_cos = Mat::<f64>::from_fn(n, nt, |a, tau| {
        rep.coeff[(k, a)] * (rep.energies[a] * t[tau]).cos()
    });
    let phase_sin = Mat::<f64>::from_fn(n, nt, |a, tau| {
        rep.coeff[(k, a)] * (rep.energies[a] * t[tau]).sin()
    });
    let re = &rep.coeff * &phase_cos;
    let im = &rep.coeff * &phase_sin;
    let occupations = Mat::<f64>::from_fn(n, nt, |i, tau| {
        let x = re[(i, tau)];
        let y = im[(i, tau)];
        x * x + y * y
    });
    let survival: Vec<f64> = (0..nt).map(|tau| occupations[(k, tau)]).collect();
    let entropy: Vec<f64> = (0..nt)
        .map(|tau| {
            -(0..n)
                .map(|i| occupations[(i, tau)])
                .filter(|&w| w > 0.0)
                .map(|w| w * w.ln())
                .sum::<f64>()
        })
        .collect();
    Ok(QuenchTrace { k, t: t.to_vec(), occupations, survival, entropy })
}

/// Saturation entropy of the closed-system estimate
/// S = -W ln W - (1 - W) ln((1 - W)/N_pc); 0 at W = 1, ln N_pc as W -> 0.
pub fn analytic_entropy(w: f64, n_pc: f64) -> f64 {
    debug_assert!(n_pc >= 1.0);
    let w = w.clamp(0.0, 1.0);
    let mut s = 0.0;
    if w > 0.0 {
        s -= w * w.ln();
    }
    if w < 1.0 {
        s -= (1.0 - w) * ((1.0 - w) / n_pc).ln();
    }
    s
}

/// Gaussian survival decay W(t) = exp(-sigma^2 t^2).
pub fn gaussian_survival(sigma: f64, t: f64) -> f64 {
    (-(sigma * sigma) * (t * t)).exp()
}

/// Linear entropy law S(t) = sigma t ln M.
pub fn linear_entropy(sigma: f64, m: f64, t: f64) -> f64 {
    sigma * t * m.ln()
}

/// Effective number of principal components, two estimators side by side.
#[derive(Debug, Clone, Copy)]
pub struct NpcEstimate {
    /// <e^S> averaged over the detected plateau.
    pub time_average: f64,
    /// exp(S) of the diagonal (infinite-time-average) ensemble.
    pub diagonal: f64,
    /// First grid index of the plateau window.
    pub plateau_start: usize,
    /// Mean entropy over the plateau.
    pub s_inf: f64,
}

/// Detects the entropy plateau (rolling slope below 1% of the peak slope)
/// and averages e^S over it; cross-checks with the diagonal ensemble
/// Omega-bar_n = sum_a w_ka w_na.
pub fn estimate_npc(rep: &MeanFieldRep, trace: &QuenchTrace) -> Result<NpcEstimate> {
    let plateau_start = detect_plateau(&trace.t, &trace.entropy)?;
    let tail = &trace.entropy[plateau_start..];
    let time_average = tail.iter().map(|&s| s.exp()).sum::<f64>() / tail.len() as f64;
    let s_inf = mean(tail);

    let q = weight_matrix(rep);
    let n = rep.dim();
    let omega_bar: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|a| q[(i, a)] * q[(trace.k, a)]).sum())
        .collect();
    let diagonal = shannon_entropy(&omega_bar).exp();
    Ok(NpcEstimate { time_average, diagonal, plateau_start, s_inf })
}

fn detect_plateau(t: &[f64], s: &[f64]) -> Result<usize> {
    let nt = t.len();
    if nt < PLATEAU_WINDOW + 1 {
        return Err(Error::NoPlateau);
    }
    let s_max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s_min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if s_max - s_min < 1e-9 {
        // The entropy never moved; a stationary state is its own plateau.
        return Ok(0);
    }
    // Least-squares slope over a rolling window; endpoint differences are
    // too noisy once the entropy fluctuates around saturation.
    let nw = nt - PLATEAU_WINDOW;
    let slope = |i: usize| {
        ols_line(&t[i..i + PLATEAU_WINDOW], &s[i..i + PLATEAU_WINDOW]).0
    };
    let mut peak = 0.0f64;
    let mut peak_at = 0usize;
    for i in 0..nw {
        let sl = slope(i);
        if sl > peak {
            peak = sl;
            peak_at = i;
        }
    }
    if peak <= 0.0 {
        return Ok(0);
    }
    for i in peak_at..nw {
        if slope(i).abs() < PLATEAU_SLOPE_FRACTION * peak {
            return Ok(i);
        }
    }
    Err(Error::NoPlateau)
}

/// Mean quench over a set of initial rows with the analytic overlays of the
/// relaxation analysis. All overlays use k-set means: sigma-bar, ln M-bar.
#[derive(Debug, Clone)]
pub struct AveragedQuench {
    pub ks: Vec<usize>,
    pub t: Vec<f64>,
    /// Pointwise means over the k-set.
    pub survival: Vec<f64>,
    pub entropy: Vec<f64>,
    /// k-set mean shell width and mean ln(connectivity).
    pub sigma_bar: f64,
    pub ln_m_bar: f64,
    /// Overlays: Gaussian survival, saturation form (from the numerical
    /// survival and the time-averaged N_pc), and the linear law.
    pub w_gauss: Vec<f64>,
    pub s_saturation: Vec<f64>,
    pub s_linear: Vec<f64>,
    pub n_pc_time: f64,
    pub n_pc_diagonal: f64,
    pub s_inf: f64,
    /// Index window of the linear-growth fit and the fitted slope.
    pub linear_window: (usize, usize),
    pub fitted_slope: f64,
}

pub fn averaged_quench(rep: &MeanFieldRep, ks: &[usize], t: &[f64]) -> Result<AveragedQuench> {
    if ks.is_empty() {
        return Err(Error::Domain("empty initial-state set".into()));
    }
    let n = rep.dim();
    let nt = t.len();
    let stats = row_statistics(&rep.h_tilde, &rep.epsilon, None);

    let mut survival = vec![0.0f64; nt];
    let mut entropy = vec![0.0f64; nt];
    let mut sigmas = Vec::with_capacity(ks.len());
    let mut ln_ms = Vec::with_capacity(ks.len());
    let mut diag_npcs = Vec::with_capacity(ks.len());
    let q = weight_matrix(rep);
    for &k in ks {
        let trace = evolve(rep, k, t)?;
        for tau in 0..nt {
            survival[tau] += trace.survival[tau] / ks.len() as f64;
            entropy[tau] += trace.entropy[tau] / ks.len() as f64;
        }
        sigmas.push(stats[k].sigma());
        if stats[k].m < 2 {
            return Err(Error::Domain(format!(
                "row {k} couples to {} states; the linear law needs M >= 2",
                stats[k].m
            )));
        }
        ln_ms.push((stats[k].m as f64).ln());
        let omega_bar: Vec<f64> =
            (0..n).map(|i| (0..n).map(|a| q[(i, a)] * q[(k, a)]).sum()).collect();
        diag_npcs.push(shannon_entropy(&omega_bar).exp());
    }

    let sigma_bar = mean(&sigmas);
    let ln_m_bar = mean(&ln_ms);

    let plateau_start = detect_plateau(t, &entropy)?;
    let tail = &entropy[plateau_start..];
    let n_pc_time = tail.iter().map(|&s| s.exp()).sum::<f64>() / tail.len() as f64;
    let s_inf = mean(tail);
    let n_pc_diagonal = mean(&diag_npcs);

    let w_gauss: Vec<f64> = t.iter().map(|&tt| gaussian_survival(sigma_bar, tt)).collect();
    let s_saturation: Vec<f64> =
        survival.iter().map(|&w| analytic_entropy(w, n_pc_time.max(1.0))).collect();
    let s_linear: Vec<f64> = t.iter().map(|&tt| linear_entropy(sigma_bar, ln_m_bar.exp(), tt)).collect();

    let lo_s = LINEAR_WINDOW.0 * s_inf;
    let hi_s = LINEAR_WINDOW.1 * s_inf;
    let start = entropy.iter().position(|&s| s >= lo_s).ok_or(Error::NoPlateau)?;
    let end = entropy[start..]
        .iter()
        .position(|&s| s >= hi_s)
        .map(|off| start + off)
        .unwrap_or(plateau_start.max(start + 2))
        .min(entropy.len());
    if end.saturating_sub(start) < 2 {
        return Err(Error::Domain(
            "linear-growth window holds fewer than 2 samples; refine the time grid".into(),
        ));
    }
    let (fitted_slope, _) = ols_line(&t[start..end], &entropy[start..end]);

    Ok(AveragedQuench {
        ks: ks.to_vec(),
        t: t.to_vec(),
        survival,
        entropy,
        sigma_bar,
        ln_m_bar,
        w_gauss,
        s_saturation,
        s_linear,
        n_pc_time,
        n_pc_diagonal,
        s_inf,
        linear_window: (start, end),
        fitted_slope,
    })
}
