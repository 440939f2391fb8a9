//! Command-line driver: builds the requested model, runs the chosen
//! diagnostics in dependency order, and emits deterministic CSV files plus
//! a summary.json report.

mod config;

use std::fs;
use std::process::ExitCode;

use clap::Parser;
use config::{Analysis, Cli, RunConfig};
use serde_json::{json, Map, Value};
use spinshell::{
    averaged_quench, averaged_strength_function, central_band, compose_model, criticality_scan,
    eigenstate_shell_profile, eigenvalues_only, fit_brody, mean_field_frame,
    mean_field_representation, median_rows, output, row_statistics, time_grid, unfold, Error,
    MeanFieldRep, ModelId, SectorBasis,
};

fn main() -> ExitCode {
    // Sequential linear algebra keeps byte-identical outputs across runs
    // regardless of the host's thread count.
    faer::set_global_parallelism(faer::Parallelism::None);

    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::ChainTooShort { .. } => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn run(cfg: &RunConfig) -> spinshell::Result<()> {
    let spec = &cfg.spec;
    fs::create_dir_all(&cfg.out)?;
    let basis = SectorBasis::build(spec.sites, spec.n_up)?;

    let mut summary = Map::new();
    summary.insert("schema".into(), json!(1));
    summary.insert(
        "model".into(),
        json!(match spec.model {
            ModelId::One => 1,
            ModelId::Two => 2,
        }),
    );
    summary.insert("L".into(), json!(spec.sites));
    summary.insert("n_up".into(), json!(spec.n_up));
    summary.insert("mu".into(), json!(spec.mu));
    summary.insert("lambda".into(), json!(spec.lambda));
    summary.insert("N".into(), json!(basis.dim()));

    // Diagnostics that look inside eigenstates share one representation.
    let needs_rep =
        cfg.wants(Analysis::Sf) || cfg.wants(Analysis::Shell) || cfg.wants(Analysis::Quench);
    let rep = if needs_rep { Some(mean_field_representation(spec, &basis)?) } else { None };
    let tag = cfg.tag();

    if cfg.emit_matrix {
        let h = compose_model(spec, &basis)?;
        output::write_matrix(&cfg.out.join("hamiltonian.bin"), &h)?;
    }

    if cfg.wants(Analysis::Stats) {
        let energies: Vec<f64> = match &rep {
            Some(r) => r.energies.clone(),
            None => eigenvalues_only(&compose_model(spec, &basis)?)?,
        };
        run_stats(cfg, &energies, &mut summary)?;
    }

    if cfg.wants(Analysis::Critical) {
        let grid = match spec.model {
            ModelId::One => cfg.mu_grid.as_deref(),
            ModelId::Two => cfg.lambda_grid.as_deref(),
        };
        match grid {
            Some(grid) => {
                let frame = mean_field_frame(spec, &basis)?;
                let scan = criticality_scan(&frame, grid)?;
                output::write_criticality(&cfg.out.join("criticality.csv"), &scan)?;
                summary.insert(
                    "critical".into(),
                    json!({
                        "points": scan.points.len(),
                        "crossing": scan.crossing.map(|(lo, hi)| vec![lo, hi]),
                    }),
                );
            }
            // `all` runs the scan only when a grid was supplied.
            None => {}
        }
    }

    if cfg.wants(Analysis::Sf) {
        let r = rep.as_ref().expect("representation built above");
        let rows = median_rows(&r.epsilon, 5);
        let sf = averaged_strength_function(r, &rows, cfg.bins, cfg.smoothing)?;
        output::write_strength_function(&cfg.out.join(format!("sf_{tag}.csv")), &sf)?;
        summary.insert(
            "sf".into(),
            json!({
                "rows": sf.rows,
                "bw_residual": sf.breit_wigner.residual,
                "bw_width": sf.breit_wigner.width,
                "gauss_residual": sf.gaussian.residual,
                "gauss_width": sf.gaussian.width,
                "shell_center": sf.shell_center,
                "shell_width": sf.shell_width,
                "preferred": if sf.prefers_breit_wigner() { "breit_wigner" } else { "gaussian" },
            }),
        );
    }

    if cfg.wants(Analysis::Shell) {
        let r = rep.as_ref().expect("representation built above");
        run_shell(cfg, r, &tag, &mut summary)?;
    }

    if cfg.wants(Analysis::Quench) {
        let r = rep.as_ref().expect("representation built above");
        run_quench(cfg, r, &tag, &mut summary)?;
    }

    output::write_json(&cfg.out.join("summary.json"), &Value::Object(summary))?;
    println!("wrote {} (N = {})", cfg.out.display(), basis.dim());
    Ok(())
}

fn run_stats(cfg: &RunConfig, energies: &[f64], summary: &mut Map<String, Value>) -> spinshell::Result<()> {
    let ens = unfold(energies, cfg.keep_fraction, cfg.poly_degree)?;
    output::write_spacings(&cfg.out.join("spacings.csv"), &ens)?;
    match fit_brody(&ens) {
        Ok(fit) => {
            output::write_spacing_histogram(&cfg.out.join("ps_hist.csv"), &ens, &fit, 40)?;
            summary.insert(
                "stats".into(),
                json!({
                    "beta": fit.beta,
                    "confidence_halfwidth": fit.confidence_halfwidth,
                    "histogram_beta": fit.histogram_beta,
                    "histogram_residual": fit.histogram_residual,
                    "sample_count": fit.sample_count,
                    "zero_count": fit.zero_count,
                    "low_sample": fit.low_sample,
                }),
            );
        }
        // Massive exact degeneracy is a property of the spectrum, not a
        // failure of the run: report it and move on.
        Err(e @ Error::DegenerateEnsemble { .. }) => {
            eprintln!("warning: {e}");
            summary.insert("stats".into(), json!({ "degenerate": true }));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn run_shell(
    cfg: &RunConfig,
    r: &MeanFieldRep,
    tag: &str,
    summary: &mut Map<String, Value>,
) -> spinshell::Result<()> {
    let alphas = median_rows(&r.energies, 5);
    let prof = eigenstate_shell_profile(r, &alphas, cfg.bins, cfg.smoothing)?;
    output::write_strength_function(&cfg.out.join(format!("ef_shell_{tag}.csv")), &prof)?;

    let stats = row_statistics(&r.h_tilde, &r.epsilon, None);
    let band = central_band(r.dim(), 0.10);
    let n = r.dim() as f64;
    let m_over_n: Vec<f64> = band.clone().map(|i| stats[i].m as f64 / n).collect();
    let v_over_d: Vec<f64> = band.clone().filter_map(|i| stats[i].v_over_d()).collect();
    let sigma: Vec<f64> = band.map(|i| stats[i].sigma()).collect();
    summary.insert(
        "shell".into(),
        json!({
            "states": prof.rows,
            "band_m_over_n": mean(&m_over_n),
            "band_v_over_d": if v_over_d.is_empty() { Value::Null } else { json!(mean(&v_over_d)) },
            "band_sigma": mean(&sigma),
            "gauss_residual": prof.gaussian.residual,
            "bw_residual": prof.breit_wigner.residual,
        }),
    );
    Ok(())
}

fn run_quench(
    cfg: &RunConfig,
    r: &MeanFieldRep,
    tag: &str,
    summary: &mut Map<String, Value>,
) -> spinshell::Result<()> {
    let rows = median_rows(&r.epsilon, 5);
    let stats = row_statistics(&r.h_tilde, &r.epsilon, None);
    let sigma_bar: f64 = rows.iter().map(|&k| stats[k].sigma()).sum::<f64>() / rows.len() as f64;
    let grid = time_grid(sigma_bar, cfg.time_max_factor)?;
    let avg = averaged_quench(r, &rows, &grid)?;
    output::write_quench(&cfg.out.join(format!("quench_{tag}.csv")), &avg)?;

    let (w0, w1) = avg.linear_window;
    summary.insert(
        "quench".into(),
        json!({
            "rows": avg.ks,
            "sigma_k": rows.iter().map(|&k| stats[k].sigma()).collect::<Vec<_>>(),
            "m_k": rows.iter().map(|&k| stats[k].m).collect::<Vec<_>>(),
            "sigma_bar": avg.sigma_bar,
            "ln_m_bar": avg.ln_m_bar,
            "s_inf": avg.s_inf,
            "n_pc_time": avg.n_pc_time,
            "n_pc_diagonal": avg.n_pc_diagonal,
            "fitted_slope": avg.fitted_slope,
            "slope_ratio": avg.fitted_slope / (avg.sigma_bar * avg.ln_m_bar),
            "linear_window_t": [avg.t[w0], avg.t[w1 - 1]],
        }),
    );
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
