use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::suite::Selection;
use crate::table::Format;

/// Numerical experiments with regular Lie groups and their evolution operators.
#[derive(Debug, Parser)]
#[command(name = "regulie", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve g' = X(t) g (or g X(t)) on [0, 1].
    Evolve(EvolveArgs),
    /// Parallel transport along a polygon in a trivialized chart.
    Transport(TransportArgs),
    /// Holonomy of a closed polygon.
    Holonomy(TransportArgs),
    /// Develop a flat algebra-valued 1-form into its group-valued primitive.
    Develop(DevelopArgs),
    /// Integrate a Lie algebra homomorphism to the group.
    IntegrateHom(IntegrateHomArgs),
    /// Semidirect products, extensions, tangent groups and the convolution group.
    #[command(subcommand)]
    Construct(Construct),
    /// The weighted-shift and transport counterexamples.
    #[command(subcommand)]
    Counterexample(Counterexample),
    /// Run a verification suite: all, evolution, bundles, constructions, lie-theory, counterexamples.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Right,
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Cf4,
    Midpoint,
}

/// Where tables go. Without `--emit` and `--out` only reports are printed.
#[derive(Debug, Args)]
pub struct Output {
    /// Table format.
    #[arg(long)]
    pub emit: Option<Format>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Catalog name (so3, su2, se3, sl2, gl2plus, heis3, torus:n, r:n) or a TOML group file.
    #[arg(long)]
    pub group: String,
    /// Algebra curve in t over the basis e1, e2, ...
    #[arg(long)]
    pub curve: String,
    #[arg(long, value_enum, default_value = "right")]
    pub side: SideArg,
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "cf4")]
    pub scheme: SchemeArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    #[arg(long)]
    pub group: String,
    /// Connection coefficient A_j for each base coordinate, in order (x1.., alias x, y, z).
    #[arg(long = "form", required = true)]
    pub forms: Vec<String>,
    /// Base box as `lo,hi`, the same interval in every coordinate.
    #[arg(long = "box", default_value = "-1,1", allow_hyphen_values = true)]
    pub bounds: String,
    /// Polygon vertices, `x,y;x,y;...`.
    #[arg(long, allow_hyphen_values = true)]
    pub path: String,
    /// Initial fibre point as algebra coordinates (the point is their exponential).
    #[arg(long, allow_hyphen_values = true)]
    pub g0: Option<String>,
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct DevelopArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long = "form", required = true)]
    pub forms: Vec<String>,
    #[arg(long = "box", default_value = "-1,1", allow_hyphen_values = true)]
    pub bounds: String,
    /// Base point where the primitive is the identity.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    /// Query points, `x,y;x,y;...`.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    #[arg(long, default_value_t = 256)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct IntegrateHomArgs {
    #[arg(long)]
    pub source: String,
    #[arg(long)]
    pub target: String,
    /// Matrix of the algebra map (target rows x source columns): JSON rows or whitespace text.
    /// Defaults to the identity when the dimensions agree.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// SE(3) = R^3 x| SO(3): factor formulas against the direct evolution.
    Semidirect {
        /// Translation curve in r:3.
        #[arg(long)]
        u: String,
        /// Rotation curve in so3.
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Heisenberg group as a central extension of R^2 by R.
    Extension {
        /// Central curve in r:1.
        #[arg(long)]
        u: String,
        /// Base curve in r:2.
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        #[command(flatten)]
        output: Output,
    },
    /// TG = g x| G: its evolution against the tangent of Evol.
    TangentGroup {
        #[arg(long)]
        group: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 256)]
        steps: usize,
    },
    /// Convolution product of two curves; optionally conv_evolve of a field in (t, s).
    Conv {
        #[arg(long)]
        group: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        field: Option<String>,
        #[arg(long, default_value_t = 256)]
        steps: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Counterexample {
    /// Weighted shift x' = Tx: closed form against an ODE solve of the truncation.
    NoSolution {
        #[arg(long, default_value_t = 30)]
        truncation: usize,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        t: f64,
        /// Index of the unit start vector.
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Flat-function solution of the shift equation with zero initial value.
    NonUnique {
        #[arg(long, default_value_t = 9)]
        k_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Translation flow x(t, s) = x0(s + t).
    Transport {
        /// Initial profile in s.
        #[arg(long, default_value = "sin(s)")]
        profile: String,
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    pub name: Selection,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}
