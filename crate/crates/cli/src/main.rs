use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fgnpc::NoiseKind;
use fgnpc_cli::{cmd_compare, cmd_fit, cmd_prior, cmd_simulate, CliError, Overrides, PriorKind, RunConfig};

/// PC priors for fGn and AR(1) noise, and Bayes-factor comparison of the two.
#[derive(Parser)]
#[command(name = "fgnpc", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for simulations.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    trend: Option<TrendArg>,
    /// Threshold u in P(H > u) = alpha.
    #[arg(long, global = true)]
    u: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Threshold U in P(sigma > U) = alpha.
    #[arg(long = "prec-u", global = true)]
    prec_u: Option<f64>,
    #[arg(long = "prec-alpha", global = true)]
    prec_alpha: Option<f64>,
    /// Quadrature nodes per hyperparameter axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrendArg {
    None,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Fgn,
    Ar1,
    Precision,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Fgn,
    Ar1,
}

#[derive(Subcommand)]
enum Command {
    /// Write prior density curves and the calibrated rate.
    Prior {
        #[arg(value_enum)]
        kind: KindArg,
    },
    /// Fit one noise model to a two-column CSV series.
    Fit {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "fgn")]
        model: ModelArg,
    },
    /// Bayes factor of fGn over AR(1) for a two-column CSV series.
    Compare { file: PathBuf },
    /// Monte Carlo study of Bayes factors on simulated fGn.
    Simulate {
        /// Comma-separated Hurst values.
        #[arg(long, value_delimiter = ',')]
        hurst: Option<Vec<f64>>,
        /// Comma-separated series lengths.
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
        #[arg(long)]
        replicates: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let c = cli.common;
    let mut flags = Overrides {
        u: c.u,
        alpha: c.alpha,
        prec_u: c.prec_u,
        prec_alpha: c.prec_alpha,
        trend: c.trend.map(|t| match t {
            TrendArg::None => "none".to_string(),
            TrendArg::Linear => "linear".to_string(),
        }),
        seed: c.seed,
        out: c.out,
        grid: c.grid,
        ..Default::default()
    };
    if let Command::Simulate { hurst, lengths, replicates } = &cli.command {
        flags.hurst = hurst.clone();
        flags.lengths = lengths.clone();
        flags.replicates = *replicates;
    }
    let cfg = RunConfig::resolve(c.config.as_deref(), &flags)?;

    let (text, written) = match cli.command {
        Command::Prior { kind } => {
            let kind = match kind {
                KindArg::Fgn => PriorKind::Fgn,
                KindArg::Ar1 => PriorKind::Ar1,
                KindArg::Precision => PriorKind::Precision,
            };
            (String::new(), cmd_prior(kind, &cfg)?)
        }
        Command::Fit { file, model } => {
            let kind = match model {
                ModelArg::Fgn => NoiseKind::Fgn,
                ModelArg::Ar1 => NoiseKind::Ar1,
            };
            cmd_fit(&file, kind, &cfg)?
        }
        Command::Compare { file } => cmd_compare(&file, &cfg)?,
        Command::Simulate { .. } => cmd_simulate(&cfg)?,
    };
    print!("{text}");
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = e.hint() {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
