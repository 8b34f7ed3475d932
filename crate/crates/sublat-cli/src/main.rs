use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sublat_cli::config::{self, ExperimentConfig, ExperimentKind, OutputFormat, SubsetSpec};
use sublat_cli::{emit, runner, RunError};

/// Sublattice entanglement experiments on quadratic fermionic models.
#[derive(Parser)]
#[command(name = "sublat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy vs energy for all 2^n eigenstates of a seeded random model.
    SpectrumScatter(ScatterArgs),
    /// Ground-state entropy density of the hopping chain vs chemical potential.
    MuSweep(SweepArgs),
    /// Interacting-chain ground-state entropy vs coupling strength (exact
    /// diagonalization, sector resolved).
    InteractionSweep(SweepSubsetArgs),
    /// Max deviation between the correlation-matrix, covariance-matrix and
    /// Fock-oracle entropies over all eigenstates and random subsets.
    Crosscheck(CrosscheckArgs),
    /// Print version, guards and conventions.
    Info,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Number of fermionic modes / chain sites.
    #[arg(long)]
    n: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Also write an SVG plot next to the data file (needs --out).
    #[arg(long)]
    plot: bool,
    /// JSON ExperimentConfig file; exclusive with the other flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ScatterArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// RNG seed of the random model.
    #[arg(long)]
    seed: Option<u64>,
    /// Random coupling topology: chain_nn or dense.
    #[arg(long)]
    topology: Option<String>,
    /// Rényi order (positive number or "inf").
    #[arg(long)]
    alpha: Option<String>,
}

#[derive(Args, Default)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid of sweep values: "a:b:step" or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Boundary condition: open or periodic.
    #[arg(long)]
    boundary: Option<String>,
    /// Rényi order (positive number or "inf").
    #[arg(long)]
    alpha: Option<String>,
}

#[derive(Args, Default)]
struct SweepSubsetArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Modes the entropy is taken over: "sublattice_b" or 1-based "2,5,6".
    #[arg(long)]
    subset: Option<String>,
}

#[derive(Args, Default)]
struct CrosscheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// RNG seed of the random model and the subset draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Random coupling topology: chain_nn or dense.
    #[arg(long)]
    topology: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("sublat: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    let cfg = match cli.command {
        Command::Info => {
            print!("{}", runner::info_text());
            return Ok(());
        }
        Command::SpectrumScatter(args) => build_scatter(args)?,
        Command::MuSweep(args) => build_sweep(args, ExperimentKind::MuSweep, None)?,
        Command::InteractionSweep(args) => {
            let subset = args
                .subset
                .as_deref()
                .map(config::parse_subset)
                .transpose()?;
            build_sweep(args.sweep, ExperimentKind::InteractionSweep, subset)?
        }
        Command::Crosscheck(args) => build_crosscheck(args)?,
    };
    let table = runner::run_experiment(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let written =
                emit::write_files(&table, cfg.format, std::path::Path::new(path), cfg.plot)?;
            for p in written {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            if cfg.plot {
                return Err(RunError::Config(
                    "plot: needs --out to name the SVG file".into(),
                ));
            }
            print!("{}", emit::render(&table, cfg.format));
        }
    }
    Ok(())
}

/// Load `--config` (refusing any other explicit flag) or assemble the config
/// from flags with per-kind defaults.
fn with_config_file(
    common: &CommonArgs,
    others_given: bool,
    kind: ExperimentKind,
) -> Result<Option<ExperimentConfig>, RunError> {
    let Some(path) = &common.config else {
        return Ok(None);
    };
    if others_given
        || common.n.is_some()
        || common.out.is_some()
        || common.format.is_some()
        || common.plot
    {
        return Err(RunError::Config(
            "--config is exclusive with the other flags".into(),
        ));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("config {}: {e}", path.display())))?;
    let cfg = ExperimentConfig::from_json(&text)?;
    if cfg.kind != kind {
        return Err(RunError::Config(format!(
            "config kind {} does not match the {} subcommand",
            cfg.kind.name(),
            kind.name()
        )));
    }
    Ok(Some(cfg))
}

fn require_n(n: Option<usize>) -> Result<usize, RunError> {
    n.ok_or_else(|| RunError::Config("n: required (flag --n or a config file)".into()))
}

fn out_string(common: &CommonArgs) -> Option<String> {
    common
        .out
        .as_ref()
        .map(|p| p.to_string_lossy().into_owned())
}

fn format_of(common: &CommonArgs) -> Result<OutputFormat, RunError> {
    common
        .format
        .as_deref()
        .map(config::parse_format)
        .transpose()
        .map(|f| f.unwrap_or(OutputFormat::Csv))
}

fn build_scatter(args: ScatterArgs) -> Result<ExperimentConfig, RunError> {
    let others = args.seed.is_some() || args.topology.is_some() || args.alpha.is_some();
    if let Some(cfg) = with_config_file(&args.common, others, ExperimentKind::SpectrumScatter)? {
        return Ok(cfg);
    }
    Ok(ExperimentConfig {
        kind: ExperimentKind::SpectrumScatter,
        n: require_n(args.common.n)?,
        seed: args.seed.unwrap_or(1),
        boundary: None,
        topology: Some(
            args.topology
                .as_deref()
                .map(config::parse_topology)
                .transpose()?
                .unwrap_or(sublat::model::Topology::ChainNn),
        ),
        grid: None,
        alpha: args
            .alpha
            .as_deref()
            .map(config::parse_alpha)
            .transpose()?
            .unwrap_or(1.0),
        subset: SubsetSpec::default(),
        out: out_string(&args.common),
        format: format_of(&args.common)?,
        plot: args.common.plot,
    })
}

fn build_sweep(
    args: SweepArgs,
    kind: ExperimentKind,
    subset: Option<SubsetSpec>,
) -> Result<ExperimentConfig, RunError> {
    let others =
        args.grid.is_some() || args.boundary.is_some() || args.alpha.is_some() || subset.is_some();
    if let Some(cfg) = with_config_file(&args.common, others, kind)? {
        return Ok(cfg);
    }
    Ok(ExperimentConfig {
        kind,
        n: require_n(args.common.n)?,
        seed: 1,
        boundary: args
            .boundary
            .as_deref()
            .map(config::parse_boundary)
            .transpose()?,
        topology: None,
        grid: args.grid.as_deref().map(config::parse_grid).transpose()?,
        alpha: args
            .alpha
            .as_deref()
            .map(config::parse_alpha)
            .transpose()?
            .unwrap_or(1.0),
        subset: subset.unwrap_or_default(),
        out: out_string(&args.common),
        format: format_of(&args.common)?,
        plot: args.common.plot,
    })
}

fn build_crosscheck(args: CrosscheckArgs) -> Result<ExperimentConfig, RunError> {
    let others = args.seed.is_some() || args.topology.is_some();
    if let Some(cfg) = with_config_file(&args.common, others, ExperimentKind::Crosscheck)? {
        return Ok(cfg);
    }
    Ok(ExperimentConfig {
        kind: ExperimentKind::Crosscheck,
        n: require_n(args.common.n)?,
        seed: args.seed.unwrap_or(1),
        boundary: None,
        topology: Some(
            args.topology
                .as_deref()
                .map(config::parse_topology)
                .transpose()?
                .unwrap_or(sublat::model::Topology::ChainNn),
        ),
        grid: None,
        alpha: 1.0,
        subset: SubsetSpec::default(),
        out: out_string(&args.common),
        format: format_of(&args.common)?,
        plot: args.common.plot,
    })
}
