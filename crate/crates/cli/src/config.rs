//! Run configuration: command-line flags layered over an optional
//! key=value file. Flags win; missing values fall to defaults.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use spinshell::{default_n_up, ModelSpec, Smoothing};

#[derive(Parser)]
#[command(
    name = "spinshell",
    about = "Spin-chain chaos diagnostics: level statistics, strength functions, \
             energy-shell structure, and quench relaxation"
)]
pub struct Cli {
    /// Model: 1 = nearest-neighbor chain, 2 = adds next-nearest-neighbor terms.
    #[arg(long)]
    pub model: Option<u8>,

    /// Chain length (default 15).
    #[arg(long = "L")]
    pub sites: Option<usize>,

    /// Up-spins in the sector (default round(L/3)).
    #[arg(long)]
    pub n_up: Option<usize>,

    /// Nearest-neighbor Ising coupling (default 0.5).
    #[arg(long)]
    pub mu: Option<f64>,

    /// Next-nearest-neighbor strength, Model 2 only (default 1.0).
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Coupling grid a:b:step for the Model 1 criticality scan.
    #[arg(long)]
    pub mu_grid: Option<String>,

    /// Coupling grid a:b:step for the Model 2 criticality scan.
    #[arg(long)]
    pub lambda_grid: Option<String>,

    /// Which diagnostics to run (default all).
    #[arg(long, value_enum)]
    pub analysis: Option<Analysis>,

    /// Central fraction of the spectrum kept when unfolding (default 0.8).
    #[arg(long)]
    pub keep_fraction: Option<f64>,

    /// Chebyshev degree of the unfolding staircase fit (default 7).
    #[arg(long)]
    pub poly_degree: Option<usize>,

    /// Bins across the shell window for smoothed profiles (default 41).
    #[arg(long)]
    pub bins: Option<usize>,

    /// Dense time grid extent in units of 1/sigma (default 8).
    #[arg(long)]
    pub time_max_factor: Option<f64>,

    /// Output directory (default out).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Dump the assembled Hamiltonian block as hamiltonian.bin.
    #[arg(long)]
    pub emit_matrix: bool,

    /// Permit mu = 1 despite its extra total-spin degeneracies.
    #[arg(long)]
    pub allow_isotropic: bool,

    /// Plain-text key=value configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    Stats,
    Critical,
    Sf,
    Shell,
    Quench,
    All,
}

impl Analysis {
    fn parse_key(s: &str) -> Result<Self, String> {
        match s {
            "stats" => Ok(Analysis::Stats),
            "critical" => Ok(Analysis::Critical),
            "sf" => Ok(Analysis::Sf),
            "shell" => Ok(Analysis::Shell),
            "quench" => Ok(Analysis::Quench),
            "all" => Ok(Analysis::All),
            other => Err(format!("unknown analysis '{other}'")),
        }
    }
}

pub struct RunConfig {
    pub spec: ModelSpec,
    pub analysis: Analysis,
    pub mu_grid: Option<Vec<f64>>,
    pub lambda_grid: Option<Vec<f64>>,
    pub keep_fraction: f64,
    pub poly_degree: usize,
    pub bins: usize,
    pub time_max_factor: f64,
    pub out: PathBuf,
    pub emit_matrix: bool,
    pub smoothing: Smoothing,
}

impl RunConfig {
    /// Merges flags over the optional config file and validates the result.
    pub fn resolve(cli: Cli) -> Result<RunConfig, String> {
        let mut file = HashMap::new();
        if let Some(path) = &cli.config {
            file = parse_config_file(path)?;
        }
        // Config keys mirror the flag names; hyphens and underscores are
        // interchangeable.
        let mut take = |key: &str| file.remove(key);

        let model = cli
            .model
            .or(parse_opt(take("model"), "model")?)
            .ok_or("missing required parameter: model (1 or 2)")?;
        let sites = cli.sites.or(parse_opt(take("L"), "L")?).unwrap_or(15);
        let n_up = cli.n_up.or(parse_opt(take("n_up"), "n_up")?).unwrap_or(default_n_up(sites));
        let mu = cli.mu.or(parse_opt(take("mu"), "mu")?).unwrap_or(0.5);
        let lambda = cli.lambda.or(parse_opt(take("lambda"), "lambda")?).unwrap_or(1.0);

        let mut spec = match model {
            1 => ModelSpec::model1(sites, n_up, mu),
            2 => ModelSpec::model2(sites, n_up, mu, lambda),
            other => return Err(format!("model must be 1 or 2, got {other}")),
        };
        spec.allow_isotropic =
            cli.allow_isotropic || parse_opt(take("allow_isotropic"), "allow_isotropic")?.unwrap_or(false);
        spec.validate().map_err(|e| e.to_string())?;
        if n_up > sites {
            return Err(format!("n_up {n_up} exceeds L {sites}"));
        }

        let analysis = match cli.analysis {
            Some(a) => a,
            None => match take("analysis") {
                Some(s) => Analysis::parse_key(&s)?,
                None => Analysis::All,
            },
        };

        let mu_grid = grid_opt(cli.mu_grid.or(take("mu_grid")), "mu_grid")?;
        let lambda_grid = grid_opt(cli.lambda_grid.or(take("lambda_grid")), "lambda_grid")?;
        if analysis == Analysis::Critical {
            let have = match spec.model {
                spinshell::ModelId::One => mu_grid.is_some(),
                spinshell::ModelId::Two => lambda_grid.is_some(),
            };
            if !have {
                return Err(
                    "analysis 'critical' needs the matching coupling grid \
                     (--mu-grid for model 1, --lambda-grid for model 2)"
                        .into(),
                );
            }
        }

        let keep_fraction =
            cli.keep_fraction.or(parse_opt(take("keep_fraction"), "keep_fraction")?).unwrap_or(0.8);
        if !(0.0..=1.0).contains(&keep_fraction) || keep_fraction == 0.0 {
            return Err(format!("keep_fraction must be in (0, 1], got {keep_fraction}"));
        }
        let poly_degree =
            cli.poly_degree.or(parse_opt(take("poly_degree"), "poly_degree")?).unwrap_or(7);
        let bins = cli.bins.or(parse_opt(take("bins"), "bins")?).unwrap_or(41);
        if bins < 3 {
            return Err(format!("bins must be at least 3, got {bins}"));
        }
        let time_max_factor = cli
            .time_max_factor
            .or(parse_opt(take("time_max_factor"), "time_max_factor")?)
            .unwrap_or(8.0);
        if !(time_max_factor > 0.0) {
            return Err(format!("time_max_factor must be positive, got {time_max_factor}"));
        }
        let out = cli.out.or_else(|| take("out").map(PathBuf::from)).unwrap_or_else(|| "out".into());
        let emit_matrix =
            cli.emit_matrix || parse_opt(take("emit_matrix"), "emit_matrix")?.unwrap_or(false);
        let smoothing = match take("smoothing").as_deref() {
            None | Some("hist") => Smoothing::Histogram,
            Some("kernel") => Smoothing::GaussianKernel,
            Some(other) => return Err(format!("smoothing must be hist or kernel, got '{other}'")),
        };

        if let Some(key) = file.keys().next() {
            return Err(format!("unknown config key '{key}'"));
        }

        Ok(RunConfig {
            spec,
            analysis,
            mu_grid,
            lambda_grid,
            keep_fraction,
            poly_degree,
            bins,
            time_max_factor,
            out,
            emit_matrix,
            smoothing,
        })
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analysis == a || self.analysis == Analysis::All
    }

    /// File tag naming the run by its transition coupling.
    pub fn tag(&self) -> String {
        match self.spec.model {
            spinshell::ModelId::One => format!("model1_mu{}", self.spec.mu),
            spinshell::ModelId::Two => format!("model2_lambda{}", self.spec.lambda),
        }
    }
}

fn parse_config_file(path: &PathBuf) -> Result<HashMap<String, String>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("{}:{}: expected key=value", path.display(), lineno + 1));
        };
        let key = key.trim().replace('-', "_");
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_opt<T: std::str::FromStr>(raw: Option<String>, key: &str) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    match raw {
        None => Ok(None),
        Some(s) => s.parse().map(Some).map_err(|e| format!("config key {key}: {e}")),
    }
}

fn grid_opt(raw: Option<String>, key: &str) -> Result<Option<Vec<f64>>, String> {
    match raw {
        None => Ok(None),
        Some(s) => parse_grid(&s).map(Some).map_err(|e| format!("{key}: {e}")),
    }
}

/// "a:b:step" -> inclusive uniform grid. The endpoint is kept when step
/// divides the span (up to rounding).
fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:step, got '{s}'"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    let (a, b, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || b < a {
        return Err(format!("need b >= a and step > 0 in '{s}'"));
    }
    let count = ((b - a) / step + 1.0 + 1e-9).floor() as usize;
    Ok((0..count).map(|i| a + i as f64 * step).collect())
}
