use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fourier_collocation::cli::{parse_n_list, run, CliError, Command, ExperimentConfig};
use fourier_collocation::presets::preset_registry;

/// Fourier-extension collocation for function approximation and elliptic PDEs
/// on irregular planar domains.
#[derive(Parser, Debug)]
#[command(name = "fecoll", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Fit a test function and record the sup-norm error per N.
    Approx(Common),
    /// Solve a PDE preset and record the error per N.
    Solve(Common),
    /// Write the collocation node set for one N.
    Nodes(Common),
    /// Write singular value spectra of the collocation matrix.
    Spectrum(Common),
    /// List domains, functions, and PDE presets.
    List,
}

#[derive(Args, Debug)]
struct Common {
    /// Frame size per axis: `N`, `N1,N2,...`, or `start:step:stop`.
    #[arg(short = 'N', long = "n", default_value = "20")]
    n: String,
    #[arg(long)]
    domain: Option<String>,
    /// Test function f1..f4.
    #[arg(long)]
    function: Option<String>,
    /// PDE preset example1..example7.
    #[arg(long)]
    preset: Option<String>,
    /// Grid oversampling factor.
    #[arg(long)]
    gamma: Option<f64>,
    /// Half-width of the periodic box.
    #[arg(short = 'T', long = "t", default_value_t = 2.0)]
    t: f64,
    #[arg(long, default_value_t = 1e-14)]
    eps: f64,
    /// Boundary node policy: linear:K, log:C, log10:C, square[:K[:OFF]], explicit:N.
    #[arg(long)]
    boundary: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    eval_density: usize,
    #[arg(long = "max-n", default_value_t = 60)]
    max_n: usize,
    /// Extra boundary nodes clustered near each corner.
    #[arg(long, default_value_t = 0)]
    corner_extra: usize,
    #[arg(long, default_value_t = 0.1)]
    corner_radius: f64,
    /// Also write spectrum_N{N}.csv for each fit.
    #[arg(long)]
    spectra: bool,
    /// Also write coefficients_N{N}.csv for each fit.
    #[arg(long)]
    coefficients: bool,
    /// TOML config file; its keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn into_config(self, command: Command) -> Result<ExperimentConfig, CliError> {
        let n_list = parse_n_list(&self.n).map_err(CliError::Config)?;
        let mut c = ExperimentConfig::new(command, n_list, self.out);
        c.domain = self.domain;
        c.function = self.function;
        c.preset = self.preset;
        c.gamma = self.gamma;
        c.t = self.t;
        c.eps = self.eps;
        c.boundary = self.boundary;
        c.seed = self.seed;
        c.eval_density = self.eval_density;
        c.max_n = self.max_n;
        c.corner_extra = self.corner_extra;
        c.corner_radius = self.corner_radius;
        c.spectra = self.spectra;
        c.coefficients = self.coefficients;
        match self.config {
            Some(path) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                c.overlay_toml(&text)
            }
            None => Ok(c),
        }
    }
}

fn list() {
    let reg = preset_registry();
    println!("domains: {}", fourier_collocation::geometry::CATALOG_NAMES.join(", "));
    for f in &reg.functions {
        println!("{:<9} {} (default domain {})", f.id, f.formula, f.default_domain);
    }
    for p in &reg.pdes {
        println!("{:<9} {} alpha = {}, beta = {}, u = {}, boundary {}", p.id, p.domain, p.alpha, p.beta, p.exact, p.policy);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, command) = match cli.command {
        Sub::Approx(c) => (c, Command::Approx),
        Sub::Solve(c) => (c, Command::Solve),
        Sub::Nodes(c) => (c, Command::Nodes),
        Sub::Spectrum(c) => (c, Command::Spectrum),
        Sub::List => {
            list();
            return ExitCode::SUCCESS;
        }
    };
    let result = common.into_config(command).and_then(|config| {
        eprintln!("resolved config:\n{}", config.to_toml());
        run(&config)
    });
    match result {
        Ok(summary) => {
            for (n, e) in &summary.errors {
                println!("{n} {e:.6e}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
