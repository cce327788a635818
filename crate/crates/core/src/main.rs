use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use moyal_qmm::harness::output::{self, Format};
use moyal_qmm::harness::{
    exit, run_comparison, run_polytope_study, run_route, Config, Profile, Route, StudyConfig,
};
use moyal_qmm::polytope::{
    asymptotic_volume, exact_volume_n3, exact_volume_small_n, mc_volume, DiagonalMarginal,
    VolumeRecord,
};
use moyal_qmm::{Coupling, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "moyal-qmm", version, about = "Quartic Hermitian matrix model partition function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Free partition function (g = 0).
    Free {
        #[arg(long, value_enum, default_value_t = FreeMethod::Product)]
        method: FreeMethod,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Eigenvalue-integral quadrature (N ≤ 4).
    Eigen(RunArgs),
    /// Gaussian matrix Monte Carlo.
    Mc(RunArgs),
    /// Weak-coupling closed form.
    Weak {
        /// Use the form written in ξ and ε̃.
        #[arg(long)]
        epsilon_form: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Volume of the diagonal subpolytope for a row-sum vector.
    Polytope(PolytopeArgs),
    /// Run several routes and compare every pair.
    Compare {
        /// Comma-separated route names; all routes valid for the input by default.
        #[arg(long, value_delimiter = ',')]
        routes: Option<Vec<String>>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact, Monte Carlo and asymptotic volumes over a range of N.
    StudyPolytope(StudyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FreeMethod {
    Product,
    Expansion,
    Polytope,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VolumeChoice {
    Exact,
    Mc,
    Asymptotic,
    All,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Kinetic eigenvalues, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    e: Option<Vec<f64>>,
    #[arg(long)]
    xi: Option<f64>,
    /// Relative deviations ε̃, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eps_tilde: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    nodes_per_dim: Option<usize>,
    #[arg(long)]
    expansion_order: Option<usize>,
    #[arg(long)]
    tolerance_log: Option<f64>,
    #[arg(long)]
    mc_sigmas: Option<f64>,
    /// Multiply the weak-coupling result by 2^{N(N−1)/2 − 1}.
    #[arg(long)]
    meijer_factor: bool,
    /// Record the wall-clock time in the report.
    #[arg(long)]
    timestamp: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PolytopeArgs {
    /// Row sums of the off-diagonal part, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    u: Vec<f64>,
    #[arg(long, value_enum, default_value_t = VolumeChoice::All)]
    method: VolumeChoice,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct StudyArgs {
    /// JSON study config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    /// Symmetric profile `u_j = mean` (replaces configured profiles).
    #[arg(long)]
    mean: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

impl RunArgs {
    fn to_config(&self) -> Result<Config> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let spectrum_flags = self.e.is_some() || self.xi.is_some() || self.eps_tilde.is_some();
        if spectrum_flags {
            // a spectrum on the command line replaces the configured one
            c.e = self.e.clone();
            c.xi = self.xi;
            c.eps_tilde = self.eps_tilde.clone();
            c.n = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = self.$f.clone() { c.$f = v.into(); })* };
        }
        take!(n, g, samples, seed, nodes_per_dim, expansion_order, tolerance_log, mc_sigmas);
        c.meijer_factor |= self.meijer_factor;
        c.timestamp |= self.timestamp;
        Ok(c)
    }
}

fn write(out: &OutputArgs, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => std::fs::write(p, text).map_err(Error::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn single_route(route: Route, run: &RunArgs) -> Result<bool> {
    let format = Format::parse(&run.output.format)?;
    let config = run.to_config()?;
    let s = config.spectrum_spec().resolve()?;
    let g = Coupling::new(config.g).map_err(|e| Error::Config(e.to_string()))?;
    let r = run_route(route, &s, g, &config)?;
    let text = match format {
        Format::Json => output::to_json(&r)?,
        Format::Csv => output::routes_csv(std::slice::from_ref(&r))?,
    };
    write(&run.output, &text)?;
    Ok(true)
}

fn default_routes(config: &Config) -> Result<Vec<Route>> {
    let s = config.spectrum_spec().resolve()?;
    let g = Coupling::new(config.g).map_err(|e| Error::Config(e.to_string()))?;
    Ok(Route::ALL
        .into_iter()
        .filter(|&r| moyal_qmm::harness::validate_route(r, &s, g, config).is_ok())
        .collect())
}

fn compare(routes: &Option<Vec<String>>, run: &RunArgs) -> Result<bool> {
    let format = Format::parse(&run.output.format)?;
    let mut config = run.to_config()?;
    if let Some(names) = routes {
        config.routes = names.iter().map(|s| Route::parse(s.trim())).collect::<Result<_>>()?;
    } else if config.routes.is_empty() {
        config.routes = default_routes(&config)?;
    }
    let report = run_comparison(&config)?;
    let text = match format {
        Format::Json => output::to_json(&report)?,
        Format::Csv => output::comparison_csv(&report)?,
    };
    write(&run.output, &text)?;
    Ok(report.all_pass)
}

fn polytope(a: &PolytopeArgs) -> Result<bool> {
    let format = Format::parse(&a.output.format)?;
    let u = DiagonalMarginal::new(a.u.clone())?;
    let n = u.n();
    let all = a.method == VolumeChoice::All;
    let want = |m: VolumeChoice| all || a.method == m;
    let mut records = Vec::new();
    if want(VolumeChoice::Exact) {
        match n {
            3 => records.push(VolumeRecord::new(&u, &exact_volume_n3(&u)?)),
            4 | 5 => records.push(VolumeRecord::new(&u, &exact_volume_small_n(&u)?)),
            _ if !all => {
                return Err(Error::UnsupportedSize { n, allowed: "3, 4, 5" })
            }
            _ => {}
        }
    }
    if want(VolumeChoice::Mc) && (n >= 4 || !all) {
        records.push(VolumeRecord::new(&u, &mc_volume(&u, a.samples, a.seed)?));
    }
    if want(VolumeChoice::Asymptotic) {
        records.push(VolumeRecord::new(&u, &asymptotic_volume(&u)?));
    }
    let text = match format {
        Format::Json => output::to_json(&records)?,
        Format::Csv => output::volumes_csv(&records)?,
    };
    write(&a.output, &text)?;
    Ok(true)
}

fn study(a: &StudyArgs) -> Result<bool> {
    let format = Format::parse(&a.output.format)?;
    let mut c = match &a.config {
        Some(p) => StudyConfig::load(p)?,
        None => StudyConfig::default(),
    };
    if let Some(v) = &a.n_values {
        c.n_values = v.clone();
    }
    if let Some(mean) = a.mean {
        c.profiles = vec![Profile::Symmetric { mean }];
    }
    if let Some(s) = a.samples {
        c.samples = s;
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    let report = run_polytope_study(&c)?;
    let text = match format {
        Format::Json => output::to_json(&report)?,
        Format::Csv => output::study_csv(&report)?,
    };
    write(&a.output, &text)?;
    Ok(report.all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Free { method, run } => single_route(
            match method {
                FreeMethod::Product => Route::FreeProduct,
                FreeMethod::Expansion => Route::FreeExpansion,
                FreeMethod::Polytope => Route::FreePolytope,
            },
            run,
        ),
        Command::Eigen(run) => single_route(Route::EigenQuadrature, run),
        Command::Mc(run) => single_route(Route::MatrixMc, run),
        Command::Weak { epsilon_form, run } => single_route(
            if *epsilon_form {
                Route::WeakCouplingEpsilon
            } else {
                Route::WeakCoupling
            },
            run,
        ),
        Command::Polytope(a) => polytope(a),
        Command::Compare { routes, run } => compare(routes, run),
        Command::StudyPolytope(a) => study(a),
    };
    match outcome {
        Ok(true) => ExitCode::from(exit::PASS),
        Ok(false) => ExitCode::from(exit::VERDICT_FAILURE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::CONFIG_ERROR)
        }
    }
}
