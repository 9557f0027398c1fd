use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const LITERALS: &str =
    "Complex literals: `a`, `bi`, `a+bi`, `a-bi` (no whitespace), e.g. `2`, `0.3i`, `1-2i`, `-i`. \
Polynomials are ascending comma-separated coefficients: `-1,0,1` is z^2-1.";

#[derive(Debug, Parser)]
#[command(name = "rnm", version, about = "Robust Newton method for complex polynomials", after_help = LITERALS)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Ascending coefficients, e.g. `-1,0,1`.
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "LIST")]
    pub coeffs: Option<String>,

    /// JSON file `{"coeffs": [[re, im], ...]}` (or a file holding the text form).
    #[arg(long, global = true, value_name = "PATH")]
    pub poly_file: Option<PathBuf>,

    /// Residual tolerance, in (0, 1).
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub eps: f64,

    /// Iteration cap [default: 1000000; 10000 per pixel for render].
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,

    /// Starting point.
    #[arg(long, global = true, allow_hyphen_values = true, default_value = "0")]
    pub seed: String,

    #[arg(long, global = true, value_enum)]
    pub method: Option<Method>,

    /// Corpus seed for `verify`.
    #[arg(long, global = true)]
    pub rng_seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Plain robust Newton iteration.
    #[value(alias = "rnm")]
    Plain,
    /// Robust iteration that steps past critical points.
    #[value(alias = "modified_rnm")]
    Modified,
    /// Classic Newton iteration.
    Newton,
    /// Modified iteration handing over to Newton once the alpha test passes.
    Hybrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PaletteArg {
    Classic,
    Grayscale,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Value, derivative and Taylor coefficients at `--seed`.
    Eval,
    /// Iterate from `--seed` and report where the orbit ends.
    Solve {
        /// Hybrid only: keep whichever of the robust and Newton iterates has smaller |p|.
        #[arg(long)]
        greedy_compare: bool,
        /// Plain only: recompute the amplitude every N iterations.
        #[arg(long, default_value_t = 1, value_name = "N")]
        amplitude_refresh: usize,
    },
    /// All roots, as JSON.
    Roots,
    /// Orbit from `--seed` as CSV.
    Trace {
        /// Destination file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        greedy_compare: bool,
        #[arg(long, default_value_t = 1, value_name = "N")]
        amplitude_refresh: usize,
    },
    /// Basins of attraction as a binary PPM.
    Render {
        /// Pixel size as WIDTHxHEIGHT.
        #[arg(long, default_value = "256x256")]
        size: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        center: String,
        /// Extent along the real axis.
        #[arg(long, default_value_t = 4.0)]
        width: f64,
        /// Extent along the imaginary axis [default: keeps pixels square].
        #[arg(long)]
        height: Option<f64>,
        #[arg(long, default_value = "basins.ppm")]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = PaletteArg::Classic)]
        palette: PaletteArg,
    },
    /// Check the step guarantees on a random corpus.
    Verify {
        #[arg(long, default_value_t = rnm_core::verify::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, hide = true, default_value_t = 1.0)]
        corrupt_step_scale: f64,
    },
}
