use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frontal_cli::{load, render, run, run_batch, Command, Format, Input, Options, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "frontal", version, about = "Recognize singularities of frontal map-germs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a germ and print its certificate.
    Recognize(Common),
    /// Test whether a germ is a proper frontal.
    Frontality(Common),
    /// Minors, Jacobian, Plücker coefficients and kernel field.
    Jacobian(Common),
    /// Vanishing orders along the kernel field in adapted coordinates.
    Orders(Common),
    /// Compare a germ f with a plane-to-plane germ g: opening, versality, J-modules.
    Opening(Common),
    /// Recognize seeded perturbations of the whole catalog.
    Selftest(Common),
}

#[derive(Args)]
struct Common {
    /// Germ documents (.toml) or JSON documents/reports.
    files: Vec<PathBuf>,
    /// Truncation order, overriding the documents.
    #[arg(long)]
    order: Option<u32>,
    #[arg(long, value_enum, default_value_t = Fmt::Text)]
    format: Fmt,
    /// Process every .toml/.json file in a directory.
    #[arg(long)]
    batch: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 7)]
    max_eta_order: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Recognize(c) => (Command::Recognize, c),
        Cmd::Frontality(c) => (Command::Frontality, c),
        Cmd::Jacobian(c) => (Command::Jacobian, c),
        Cmd::Orders(c) => (Command::Orders, c),
        Cmd::Opening(c) => (Command::Opening, c),
        Cmd::Selftest(c) => (Command::Selftest, c),
    };
    let format = match common.format {
        Fmt::Text => Format::Text,
        Fmt::Json => Format::Json,
    };
    let opts = Options {
        order: common.order,
        max_eta_order: common.max_eta_order,
        seed: common.seed,
    };
    let code = match execute(command, &common, &opts, format) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    };
    ExitCode::from(code as u8)
}

fn execute(command: Command, common: &Common, opts: &Options, format: Format) -> Result<i32, String> {
    if let Some(dir) = &common.batch {
        let reports = run_batch(command, dir, opts).map_err(|e| e.to_string())?;
        let code = reports.iter().map(|(_, r)| r.exit_code).max().unwrap_or(0);
        match format {
            Format::Json => {
                let all: Vec<_> = reports.iter().map(|(_, r)| r).collect();
                emit(&(serde_json::to_string_pretty(&all).map_err(|e| e.to_string())? + "\n"));
            }
            Format::Text => {
                for (path, r) in &reports {
                    emit(&format!("== {}\n{}", path.display(), render(r, format)));
                }
            }
        }
        return Ok(code);
    }
    let input = match command {
        Command::Selftest => Input {
            path: PathBuf::new(),
            documents: Vec::new(),
            source: None,
        },
        Command::Opening => {
            let mut documents = Vec::new();
            for p in &common.files {
                documents.extend(load(p).map_err(|e| format!("{}: {e}", p.display()))?.documents);
            }
            Input {
                path: PathBuf::new(),
                documents,
                source: None,
            }
        }
        _ => match common.files.as_slice() {
            [p] => load(p).map_err(|e| format!("{}: {e}", p.display()))?,
            _ => return Err("expected exactly one input file (or --batch DIR)".into()),
        },
    };
    let report = run(command, &input, opts);
    let mut out = render(&report, format);
    if format == Format::Json {
        out.push('\n');
    }
    emit(&out);
    Ok(report.exit_code)
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}
