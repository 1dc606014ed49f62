use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use cogsimplex_cli::{run, Command, Format, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Render,
    Validate,
    Inspect,
    FromCsv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fmt {
    Svg,
    Png,
}

/// Draw proximity coefficients inside simplexes and simplex prisms.
#[derive(Debug, Parser)]
#[command(name = "cogsimplex", version)]
struct Args {
    /// render: LNS to SVG/PNG; validate: check a script; inspect: JSON geometry report;
    /// from-csv: sample table to LNS prism scene(s)
    #[arg(value_enum)]
    command: Cmd,
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 600)]
    height: u32,
    /// Defaults to the output file extension, or svg.
    #[arg(long, value_enum)]
    format: Option<Fmt>,
    /// Camera azimuth in degrees, overriding the scene.
    #[arg(long, allow_negative_numbers = true)]
    azimuth: Option<f64>,
    /// Camera elevation in degrees, overriding the scene.
    #[arg(long, allow_negative_numbers = true)]
    elevation: Option<f64>,
    /// Axial length of generated prisms.
    #[arg(long, default_value_t = 100.0)]
    prism_length: f64,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let command = match args.command {
        Cmd::Render => Command::Render,
        Cmd::Validate => Command::Validate,
        Cmd::Inspect => Command::Inspect,
        Cmd::FromCsv => Command::FromCsv,
    };
    let config = RunConfig {
        output: args.output,
        width: args.width,
        height: args.height,
        format: args.format.map(|f| match f {
            Fmt::Svg => Format::Svg,
            Fmt::Png => Format::Png,
        }),
        azimuth: args.azimuth,
        elevation: args.elevation,
        prism_length: args.prism_length,
        ..RunConfig::new(command, args.input)
    };
    let mut stdout = std::io::stdout().lock();
    match run(&config, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
