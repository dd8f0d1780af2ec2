use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multinorm_cli::{batch_files, process_batch, process_file, process_text, Mode, Output};

#[derive(Parser)]
#[command(name = "multinorm", version, about = "Multinorm-one tori: Sha, HNP, class numbers, local indices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Instance file.
    file: Option<PathBuf>,
    /// Flat key/value output instead of the human report.
    #[arg(long)]
    machine: bool,
    /// Include the derivation trace and the input echo.
    #[arg(long)]
    trace: bool,
    /// Process every `*.mnt` file in this directory.
    #[arg(long, value_name = "DIR", conflicts_with = "file")]
    batch: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sha(L/k) of a Kummer family.
    Sha(Common),
    /// Decide the Hasse norm principle from field profiles.
    Hnp {
        #[command(flatten)]
        common: Common,
        /// Print the rule catalogue, optionally filtered, and exit.
        #[arg(long, value_name = "FILTER", num_args = 0..=1, default_missing_value = "")]
        rules: Option<String>,
    },
    /// Ono invariants and torus class numbers.
    ClassNumber(Common),
    /// Local norm indices.
    LocalIndex(Common),
    /// Fundamental solution of x^2 - d y^2 = ±1; takes d or a file.
    Pell {
        /// d, or an instance file.
        target: Option<String>,
        #[arg(long)]
        machine: bool,
        #[arg(long)]
        trace: bool,
        #[arg(long, value_name = "DIR", conflicts_with = "target")]
        batch: Option<PathBuf>,
    },
    /// Global unit norm index.
    UnitIndex(Common),
    /// Check an instance of any mode; for families, show the structure.
    Validate(Common),
}

fn run_common(c: Common, mode: Mode) -> ExitCode {
    let out = Output { machine: c.machine, trace: c.trace };
    match (c.file, c.batch) {
        (Some(f), _) => emit(process_file(&f, Some(mode), out)),
        (None, Some(dir)) => batch(&dir, mode, out),
        (None, None) => {
            eprintln!("error: give an instance file or --batch <DIR>");
            ExitCode::from(2)
        }
    }
}

// A closed pipe (`| head`) is not an error worth a panic.
fn say(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(p: multinorm_cli::Processed) -> ExitCode {
    if p.code != 0 && p.text.starts_with("error") {
        eprint!("{}", p.text);
    } else {
        say(&p.text);
    }
    ExitCode::from(p.code as u8)
}

fn batch(dir: &std::path::Path, mode: Mode, out: Output) -> ExitCode {
    let files = match batch_files(dir) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error ({}): {e}", e.kind());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let results = process_batch(&files, Some(mode), out);
    let mut worst = 0;
    for (f, p) in files.iter().zip(&results) {
        say(&format!("# {}\n{}\n", f.display(), p.text));
        worst = worst.max(p.code);
    }
    ExitCode::from(worst as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sha(c) => run_common(c, Mode::Sha),
        Command::Hnp { common, rules } => match rules {
            Some(filter) => {
                let filter = (!filter.is_empty()).then_some(filter.as_str());
                for line in multinorm::hnp::explain_rules(filter) {
                    say(&format!("{line}\n"));
                }
                ExitCode::SUCCESS
            }
            None => run_common(common, Mode::Hnp),
        },
        Command::ClassNumber(c) => run_common(c, Mode::ClassNumber),
        Command::LocalIndex(c) => run_common(c, Mode::LocalIndex),
        Command::Pell { target, machine, trace, batch: dir } => {
            let out = Output { machine, trace };
            match (target, dir) {
                (Some(t), _) => match t.parse::<u64>() {
                    Ok(d) => {
                        let text = format!("format_version = 1\nmode = \"pell\"\n\n[pell]\nd = {d}\n");
                        emit(process_text(&text, Some(Mode::Pell), out))
                    }
                    Err(_) => emit(process_file(&PathBuf::from(t), Some(Mode::Pell), out)),
                },
                (None, Some(dir)) => batch(&dir, Mode::Pell, out),
                (None, None) => {
                    eprintln!("error: give d, an instance file, or --batch <DIR>");
                    ExitCode::from(2)
                }
            }
        }
        Command::UnitIndex(c) => run_common(c, Mode::UnitIndex),
        Command::Validate(c) => run_common(c, Mode::Validate),
    }
}
