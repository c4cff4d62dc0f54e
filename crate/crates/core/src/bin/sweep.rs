use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use unruh_bell::sweep::{
    find_crossing, run_sweep, write_output, OutputFormat, SweepMode, SweepSpec,
};
use unruh_bell::{BobObservables, Error, TruncationSpec};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Compat,
    Faithful,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BobArg {
    Global,
    Reduced,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Sweep the CHSH statistic S over the squeeze parameter r of an accelerated
/// Wigner's-friend Bell test.
#[derive(Parser, Debug)]
#[command(name = "sweep", version, allow_negative_numbers = true)]
struct Cli {
    /// State construction: the reference script's single-factor vectors, or
    /// the two-mode Rindler expansion with region II traced out
    #[arg(long, value_enum, default_value = "compat")]
    mode: ModeArg,

    /// Bob's observables in faithful mode
    #[arg(long = "bob-obs", value_enum)]
    bob_obs: Option<BobArg>,

    /// Fixed Fock truncation per mode
    #[arg(long = "n-max", conflicts_with = "epsilon")]
    n_max: Option<usize>,

    /// Choose N per grid point as the smallest N with tanh^N r < epsilon
    #[arg(long)]
    epsilon: Option<f64>,

    /// State mixing angle in radians
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    theta: f64,

    #[arg(long = "r-start", default_value_t = 0.0)]
    r_start: f64,

    /// Exclusive upper bound of the r grid
    #[arg(long = "r-stop", default_value_t = 2.0)]
    r_stop: f64,

    #[arg(long = "r-step", default_value_t = 0.01)]
    r_step: f64,

    /// S level used by --find-crossing
    #[arg(long, default_value_t = 2.0)]
    level: f64,

    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,

    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Locate the first grid interval where S crosses --level
    #[arg(long = "find-crossing")]
    find_crossing: bool,
}

fn build_spec(cli: &Cli) -> Result<SweepSpec, Error> {
    let trunc = match (cli.n_max, cli.epsilon) {
        (_, Some(eps)) => TruncationSpec::epsilon(eps)?,
        (Some(n), None) => TruncationSpec::fixed(n)?,
        (None, None) => TruncationSpec::Fixed(3),
    };
    let spec = SweepSpec {
        r_start: cli.r_start,
        r_stop: cli.r_stop,
        r_step: cli.r_step,
        theta: cli.theta,
        trunc,
        mode: match cli.mode {
            ModeArg::Compat => SweepMode::Compat,
            ModeArg::Faithful => SweepMode::Faithful,
        },
        bob_observables: cli.bob_obs.map(|b| match b {
            BobArg::Global => BobObservables::Global,
            BobArg::Reduced => BobObservables::Reduced,
        }),
        output_format: match cli.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
    };
    spec.validate()?;
    Ok(spec)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let spec = build_spec(cli)?;
    let rows = run_sweep(&spec)?;
    let crossing = if cli.find_crossing {
        let c = find_crossing(&rows, cli.level)?;
        match &c {
            Some(c) => eprintln!(
                "S crosses {} at r = {:.6}, a/|k|c = {:.6}",
                c.level, c.r_cross, c.a_cross
            ),
            None => eprintln!("S does not cross {} on this grid", cli.level),
        }
        c
    } else {
        None
    };
    write_output(&rows, crossing.as_ref(), &spec, cli.out.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("sweep: {err}");
            ExitCode::from(match err {
                Error::InvalidArgument(_) => 2,
                Error::Io(_) => 3,
                _ => 1,
            })
        }
    }
}
