//! Deterministic data emission: CSV tables with fixed 12-significant-digit
//! formatting, a JSON summary writer, and the binary matrix dump. Identical
//! inputs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::hamiltonian::SymMatrix;
use crate::quench::AveragedQuench;
use crate::shell::{breit_wigner_density, shell_density, CriticalityScan, StrengthFunction};
use crate::stats::{
    brody_density, poisson_density, spacing_histogram, wigner_density, BrodyFit, SpacingEnsemble,
};

/// 12 significant digits, scientific, locale-free. Negative zero is
/// normalized so equal values never differ in text.
pub fn fmt_sig(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

/// Comma-delimited table with a header row; every cell runs through
/// `fmt_sig`.
pub fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// One column of unfolded spacings, spectrum order.
pub fn write_spacings(path: &Path, ens: &SpacingEnsemble) -> Result<()> {
    write_csv(path, &["s"], ens.spacings.iter().map(|&s| vec![s]))
}

/// Spacing histogram (unit-mean axis) with the fitted and the two limiting
/// densities evaluated at the bin centers.
pub fn write_spacing_histogram(
    path: &Path,
    ens: &SpacingEnsemble,
    fit: &BrodyFit,
    bins: usize,
) -> Result<()> {
    let mean = ens.spacings.iter().sum::<f64>() / ens.spacings.len() as f64;
    let rescaled: Vec<f64> = ens.spacings.iter().map(|&s| s / mean).collect();
    let hist = spacing_histogram(&rescaled, bins);
    write_csv(
        path,
        &["bin_center", "density", "brody_fit", "poisson", "wigner"],
        hist.iter().map(|&(c, d)| {
            vec![c, d, brody_density(c, fit.beta), poisson_density(c), wigner_density(c)]
        }),
    )
}

/// Strength profile on its bin grid: raw sample mass per bin, the smoothed
/// envelope density, both fits, and the shell curve.
pub fn write_strength_function(path: &Path, sf: &StrengthFunction) -> Result<()> {
    let delta = sf.bin_width();
    let lo = sf.bin_centers[0] - 0.5 * delta;
    let bins = sf.bin_centers.len();
    let mut raw = vec![0.0f64; bins];
    for &(e, w) in &sf.samples {
        if e >= lo && e < lo + delta * bins as f64 {
            let b = (((e - lo) / delta) as usize).min(bins - 1);
            raw[b] += w;
        }
    }
    write_csv(
        path,
        &["E", "w_raw", "envelope", "bw_fit", "gauss_fit", "shell"],
        sf.bin_centers.iter().enumerate().map(|(b, &e)| {
            vec![
                e,
                raw[b],
                sf.envelope[b],
                breit_wigner_density(e, sf.breit_wigner.center, sf.breit_wigner.width),
                shell_density(e, sf.gaussian.center, sf.gaussian.width),
                shell_density(e, sf.shell_center, sf.shell_width),
            ]
        }),
    )
}

/// Coupling scan table.
pub fn write_criticality(path: &Path, scan: &CriticalityScan) -> Result<()> {
    write_csv(
        path,
        &["param", "mean_v_over_d", "M_over_N"],
        scan.points
            .iter()
            .map(|p| vec![p.coupling, p.mean_v_over_d, p.m_over_n]),
    )
}

/// Averaged quench trace with every analytic overlay.
pub fn write_quench(path: &Path, avg: &AveragedQuench) -> Result<()> {
    write_csv(
        path,
        &["t", "sigma_t", "W_num", "W_gauss", "S_num", "S_analytic", "S_linear"],
        (0..avg.t.len()).map(|i| {
            vec![
                avg.t[i],
                avg.sigma_bar * avg.t[i],
                avg.survival[i],
                avg.w_gauss[i],
                avg.entropy[i],
                avg.s_saturation[i],
                avg.s_linear[i],
            ]
        }),
    )
}

/// Binary dump of an assembled matrix.
pub fn write_matrix(path: &Path, h: &SymMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    h.write_binary(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Pretty JSON with a trailing newline. Key order is the serializer's
/// (sorted), so output is deterministic.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let text = serde_json::to_string_pretty(value).expect("serializable value");
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}
