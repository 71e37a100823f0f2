use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qfock::{configure_threads, execute, load_config, Format, RunError, Source, Suite};

#[derive(Parser)]
#[command(name = "qfock", version, about = "Checks on the truncated discrete Q-deformed Fock space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural checks: braid relations, Gram positivity, adjointness, commutation, moments.
    Verify(Common),
    /// Vacuum moments by Wick sum and by matrix products.
    Moments(Common),
    /// Gap of the N_d form and the operator norm bounds.
    Spectrum(Common),
    /// Field moment under grid refinement.
    Converge(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration: free-small or krolak-binding.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Overrides the seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(suite: Suite, args: &Common) -> Result<i32, RunError> {
    configure_threads()?;
    let source = match (&args.config, &args.preset) {
        (Some(p), _) => Source::File(p),
        (None, Some(name)) => Source::Preset(name),
        (None, None) => return Err(RunError::Config("one of --config or --preset is required".into())),
    };
    let cfg = load_config(source, args.seed)?;
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    execute(suite, &cfg, format, args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (suite, args) = match &cli.command {
        Command::Verify(a) => (Suite::Verify, a),
        Command::Moments(a) => (Suite::Moments, a),
        Command::Spectrum(a) => (Suite::Spectrum, a),
        Command::Converge(a) => (Suite::Converge, a),
    };
    let start = Instant::now();
    let code = match run(suite, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    eprintln!("{} finished in {:.3} s", suite.name(), start.elapsed().as_secs_f64());
    ExitCode::from(code as u8)
}
