use clap::{Args, Parser, Subcommand};
use rrlab::cli::{run, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// High-precision laboratory for the Rogers–Ramanujan continued fraction:
/// evaluate approximants, build divergence points, and check every claimed
/// bound numerically.
#[derive(Parser)]
#[command(name = "rrlab", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (JSON, schema "rrlab-v1").
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Override the config's working precision in bits.
    #[arg(long, value_name = "N")]
    precision_bits: Option<u32>,

    /// Directory for CSV/JSON artifacts (default: config's out_dir or ".").
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Override the config's RNG seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form K and R values at all primitive roots with 5 ∤ m.
    SchurCatalog(CommonArgs),
    /// Classical approximants K_n, R_n along one evaluation point.
    Trace(CommonArgs),
    /// Full divergence certificate for a thresholded quotient stream.
    Diverge(CommonArgs),
    /// Limit-point catalog walk: R visits all ten closed-form limits.
    TenLimits(CommonArgs),
    /// General-convergence probe: tail candidates against a stream or root.
    GeneralProbe(CommonArgs),
    /// Coefficient-shift bound between two nearby evaluation points.
    Lipschitz(CommonArgs),
    /// |Q_n| growth envelopes at a root of unity.
    Growth(CommonArgs),
    /// Convergence-rate envelopes for K_n at a root of unity.
    KRate(CommonArgs),
    /// Stability of K and R under a small angle perturbation.
    Perturb(CommonArgs),
    /// Odd/even parity limits and blow-up identities outside the disk.
    Outside(CommonArgs),
    /// Convergent pairs (c, d) reduced modulo m, with period detection.
    ModPattern(CommonArgs),
    /// Materialize a thresholded stream's convergents and certificates.
    BuildPoint(CommonArgs),
    /// Hit-frequency measurement for quotient thresholds on random angles.
    SampleMeasure(CommonArgs),
    /// Run the built-in cross-check battery (profile: quick or full).
    VerifyAll(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SchurCatalog(_) => "schur-catalog",
            Command::Trace(_) => "trace",
            Command::Diverge(_) => "diverge",
            Command::TenLimits(_) => "ten-limits",
            Command::GeneralProbe(_) => "general-probe",
            Command::Lipschitz(_) => "lipschitz",
            Command::Growth(_) => "growth",
            Command::KRate(_) => "k-rate",
            Command::Perturb(_) => "perturb",
            Command::Outside(_) => "outside",
            Command::ModPattern(_) => "mod-pattern",
            Command::BuildPoint(_) => "build-point",
            Command::SampleMeasure(_) => "sample-measure",
            Command::VerifyAll(_) => "verify-all",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::SchurCatalog(a)
            | Command::Trace(a)
            | Command::Diverge(a)
            | Command::TenLimits(a)
            | Command::GeneralProbe(a)
            | Command::Lipschitz(a)
            | Command::Growth(a)
            | Command::KRate(a)
            | Command::Perturb(a)
            | Command::Outside(a)
            | Command::ModPattern(a)
            | Command::BuildPoint(a)
            | Command::SampleMeasure(a)
            | Command::VerifyAll(a) => a,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.args();

    let mut config = match ExperimentConfig::from_file(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("rrlab: {e}");
            return ExitCode::from(2);
        }
    };
    if config.subcommand != cli.command.name() {
        eprintln!(
            "rrlab: config is for subcommand {:?}, invoked as {:?}",
            config.subcommand,
            cli.command.name()
        );
        return ExitCode::from(2);
    }
    // Command-line flags override the file; the metadata sidecar hashes the
    // effective config, so overrides stay auditable.
    if let Some(bits) = args.precision_bits {
        config.precision_bits = Some(bits);
    }
    if let Some(out) = &args.out {
        config.out_dir = Some(out.display().to_string());
    }
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }

    match run(&config) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("rrlab: {e}");
            ExitCode::from(2)
        }
    }
}
