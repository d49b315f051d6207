use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qsphere", version, about = "Quasisphere flatness, quasisymmetry and rectifiability toolkit")]
pub struct Cli {
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Omit the timestamped header line of CSV output and run times in reports.
    #[arg(long, global = true)]
    pub no_header: bool,

    /// Run configuration (`qsphere-config-v1` JSON). Flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Seed for every randomized estimator.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate curves, sphere samples or scale profiles.
    #[command(subcommand)]
    Generate(Generate),
    /// Local flatness profile of a point set.
    Flatness(FlatnessArgs),
    /// Sampled weak quasisymmetry constant on a ball.
    Qs(QsArgs),
    /// Maximal dilatation on a ball or annulus.
    Dilatation(DilatationArgs),
    /// Ring-modulus special functions.
    #[command(subcommand)]
    Specialfn(Specialfn),
    /// Dini integral of a scale profile.
    Dini(DiniArgs),
    /// Run a named experiment and write its JSON report.
    Experiment(ExperimentArgs),
    /// Print the version.
    Version,
}

#[derive(Subcommand, Debug)]
pub enum Generate {
    /// Variable-angle snowflake curve as a point-set CSV.
    Snowflake {
        /// `const:60deg`, `power:c,q`, `list:a,b,...` or `list:<file>`.
        #[arg(long)]
        angles: String,
        #[arg(long)]
        generations: usize,
        /// Build on the three sides of an equilateral triangle.
        #[arg(long)]
        closed: bool,
    },
    /// Low-discrepancy points on the unit sphere.
    Sphere {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        count: usize,
    },
    /// Low-discrepancy points in the annulus `1 − t < |x| < 1 + t`.
    Annulus {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        count: usize,
    },
    /// Tabulated scale profile `t,value`.
    Profile {
        /// `const:c`, `power:c,q` (c t^q) or `invlog:c,q` (c / log(1/t)^q).
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 1e-8)]
        t_min: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        per_decade: usize,
    },
}

#[derive(Args, Debug)]
pub struct FlatnessArgs {
    /// Point-set CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Centers as `x,y;x,y`. Defaults to evenly spaced points of the set.
    #[arg(long)]
    pub centers: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub center_count: usize,
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.125,0.0625")]
    pub scales: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct QsArgs {
    /// Map JSON file, or `builtin:<name>`.
    #[arg(long)]
    pub map: String,
    #[arg(long, value_delimiter = ',')]
    pub center: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long)]
    pub triples: Option<usize>,
    #[arg(long)]
    pub refine: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DilatationArgs {
    #[arg(long)]
    pub map: String,
    /// Ball as `x,y:r`.
    #[arg(long, conflicts_with = "annulus")]
    pub ball: Option<String>,
    /// Annulus half-width `t`.
    #[arg(long)]
    pub annulus: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
}

#[derive(Subcommand, Debug)]
pub enum Specialfn {
    /// Evaluate one function; prints `{lo, hi, exact}`.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SpecialName {
    /// Modulus of the ring `r < |x| < R`.
    Rho,
    /// Grötzsch capacity `γ_n(t)`.
    Gamma,
    /// Inverse of the planar `γ₂`, at `--t`.
    GammaInverse,
    /// Teichmüller capacity `τ_n(t)`.
    Tau,
    /// Distortion function `φ_{A,n}(r)`.
    Phi,
    /// Radius constant `t₀(n, K)`.
    T0,
    /// Surface area of the unit sphere.
    Sigma,
    /// Complete elliptic integral `K(k)`.
    Ellipk,
    /// Radius threshold parameters, as a JSON object.
    Threshold,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    pub function: SpecialName,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub k_prime: Option<f64>,
    #[arg(long)]
    pub holder_m: Option<f64>,
}

#[derive(Args, Debug)]
pub struct DiniArgs {
    /// `t,value` CSV, or a flatness profile CSV (sup over centers per scale).
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub log_weighted: bool,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    /// Treat `--profile` as the dilatation profile and classify
    /// rectifiability, optionally with a quasisymmetry profile.
    #[arg(long)]
    pub rectifiability: bool,
    #[arg(long, requires = "rectifiability")]
    pub h_profile: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum ExperimentName {
    Lemma,
    FlatnessBound,
    Dimension,
    Sweep,
    Pipeline,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    pub name: ExperimentName,
    /// Subject map (JSON file or `builtin:<name>`), overriding the config.
    #[arg(long)]
    pub map: Option<String>,
    /// Snowflake angle schedule, overriding the config.
    #[arg(long, conflicts_with = "map")]
    pub angles: Option<String>,
    #[arg(long, requires = "angles")]
    pub generations: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
}
