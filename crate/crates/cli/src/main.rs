//! `zenspec`: norms, spectra and semigroups of composition operators on
//! Zen spaces, from the command line.
//!
//! Every command prints one JSON document (or writes it to `--json`).
//! Exit status: 0 on success, 2 on invalid input, 3 when a numerical
//! iteration fails to converge.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod json;

#[derive(Parser)]
#[command(name = "zenspec", version, about = "Composition operators on Zen spaces of the right half-plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct WeightArg {
    /// `hardy`, `alpha-bergman:<alpha>`, `hardy-bergman`, or a measure file (`.json`)
    #[arg(long, default_value = "hardy")]
    pub weight: String,
}

#[derive(Args, Clone)]
pub struct OutputArg {
    /// Write the JSON document here instead of standard output
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct MuArgs {
    /// Dilation factor of phi(s) = mu s + x + iy
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Sweep mu over `a:b:n` (n equally spaced values from a to b)
    #[arg(long, value_name = "A:B:N", conflicts_with = "mu")]
    pub mu_range: Option<String>,
}

#[derive(Args, Clone)]
pub struct SymbolArgs {
    #[command(flatten)]
    pub mu: MuArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a weight and list the registered families
    Weight {
        #[command(flatten)]
        weight: WeightArg,
        /// Evaluate w at these points (repeatable)
        #[arg(long, allow_negative_numbers = true)]
        t: Vec<f64>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Exact norm of C_phi
    Norm {
        #[command(flatten)]
        weight: WeightArg,
        #[command(flatten)]
        symbol: SymbolArgs,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Bounds on the essential norm from the angular derivative 1/mu
    Essnorm {
        #[command(flatten)]
        weight: WeightArg,
        #[command(flatten)]
        mu: MuArgs,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Spectral radius from norms of iterates
    Specrad {
        #[command(flatten)]
        weight: WeightArg,
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long, default_value_t = 64)]
        n_max: u32,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Spectrum of C_phi
    Spectrum {
        #[command(flatten)]
        weight: WeightArg,
        #[command(flatten)]
        symbol: SymbolArgs,
        /// Iterates used for enclosures of general weights
        #[arg(long, default_value_t = zenspec::spectra::GENERAL_N_MAX)]
        n_max: u32,
        /// Write boundary samples (re,im,component) to this file
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Boundary samples per curve
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Norm of the reproducing kernel at lambda = x + iy
    Kernel {
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y: f64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Cross-check closed forms against the discretization oracle
    Verify {
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, default_value_t = 2f64.powi(-30))]
        grid_min: f64,
        #[arg(long, default_value_t = 2f64.powi(30))]
        grid_max: f64,
        #[arg(long, default_value_t = 8)]
        points_per_octave: u32,
        /// Relative change at which power iteration stops
        #[arg(long, default_value_t = 1e-8)]
        power_tol: f64,
        /// Number of random eigenfunction draws (seeded by ZENSPEC_SEED)
        #[arg(long, default_value_t = 4)]
        eigen_draws: usize,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Semigroup generated by G(z) = p z + p alpha (G = alpha when p = 0)
    Semigroup {
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha_im: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        out: OutputArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Weight { weight, t, out } => commands::weight(&weight, &t).map(|d| (d, out, false)),
        Command::Norm { weight, symbol, out } => commands::norm(&weight, &symbol).map(|d| (d, out, false)),
        Command::Essnorm { weight, mu, out } => commands::essnorm(&weight, &mu).map(|d| (d, out, false)),
        Command::Specrad {
            weight,
            symbol,
            n_max,
            out,
        } => commands::specrad(&weight, &symbol, n_max).map(|(d, ok)| (d, out, !ok)),
        Command::Spectrum {
            weight,
            symbol,
            n_max,
            csv,
            samples,
            out,
        } => commands::spectrum(&weight, &symbol, n_max, csv.as_deref(), samples).map(|d| (d, out, false)),
        Command::Kernel { weight, x, y, out } => commands::kernel(&weight, x, y).map(|d| (d, out, false)),
        Command::Verify {
            weight,
            mu,
            x,
            y,
            grid_min,
            grid_max,
            points_per_octave,
            power_tol,
            eigen_draws,
            out,
        } => commands::verify(&commands::VerifyRequest {
            weight: &weight,
            mu,
            x,
            y,
            grid_min,
            grid_max,
            points_per_octave,
            power_tol,
            eigen_draws,
        })
        .map(|d| (d, out, false)),
        Command::Semigroup {
            weight,
            p,
            alpha_re,
            alpha_im,
            t,
            out,
        } => commands::semigroup(&weight, p, alpha_re, alpha_im, t).map(|d| (d, out, false)),
    };
    let (doc, out, unconverged) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("zenspec: {e}");
            return ExitCode::from(if e.is_non_convergence() { 3 } else { 2 });
        }
    };
    let text = json::to_canonical_string(&doc);
    match &out.json {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("zenspec: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if unconverged {
        eprintln!("zenspec: iterate sequence has not settled; raise --n-max");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
