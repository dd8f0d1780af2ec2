//! Front end for the `multinorm` toolkit: instance files in, reports out.
//!
//! A run reads one instance file (or every `*.mnt` file in a directory),
//! evaluates it with the mode it declares, and prints a human report or a
//! flat key/value document. Exit codes: 0 success, 2 parse error,
//! 3 validation error, 4 provider contract violation, 5 non-integral class
//! number.

pub mod error;
pub mod instance;
pub mod render;
pub mod run;

use std::path::{Path, PathBuf};

pub use error::{exit, CliError};
pub use instance::{parse_instance, InstanceFile, Mode};
pub use run::{run, Report};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub machine: bool,
    pub trace: bool,
}

/// Rendered result of one file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Processed {
    pub text: String,
    pub code: i32,
}

/// Parses and runs `text`. With `expected` set, an instance of another mode
/// is a validation error, except that `validate` accepts every mode and only
/// checks it.
pub fn process_text(text: &str, expected: Option<Mode>, out: Output) -> Processed {
    let inst = match parse_instance(text) {
        Ok(i) => i,
        Err(e) => return failure(&e, None, out),
    };
    let result = match expected {
        Some(Mode::Validate) if inst.mode != Mode::Validate => Ok(validated_only(&inst)),
        Some(m) if m != inst.mode => Err(CliError::Semantic {
            key: "mode".into(),
            message: format!("file declares mode {}, command is {m}", inst.mode),
        }),
        _ => run(&inst),
    };
    match result {
        Ok(rep) => Processed {
            text: if out.machine { render::machine(&rep) } else { render::human(&rep, out.trace) },
            code: exit::OK,
        },
        Err(e) => failure(&e, Some(&inst), out),
    }
}

fn validated_only(inst: &InstanceFile) -> Report {
    Report {
        mode: inst.mode,
        headline: format!("valid {} instance", inst.mode),
        details: Vec::new(),
        trace: Vec::new(),
        results: vec![("valid".into(), true.into())],
        instance: inst.clone(),
    }
}

fn failure(e: &CliError, inst: Option<&InstanceFile>, out: Output) -> Processed {
    let text = if out.machine { render::machine_error(e, inst) } else { render::human_error(e) };
    Processed { text, code: e.exit_code() }
}

pub fn process_file(path: &Path, expected: Option<Mode>, out: Output) -> Processed {
    match std::fs::read_to_string(path) {
        Ok(text) => process_text(&text, expected, out),
        Err(e) => failure(&CliError::Io { path: path.display().to_string(), message: e.to_string() }, None, out),
    }
}

/// `*.mnt` files directly inside `dir`, sorted by name.
pub fn batch_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let io = |e: std::io::Error| CliError::Io { path: dir.display().to_string(), message: e.to_string() };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "mnt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Processes the files on a small thread pool, results in input order.
pub fn process_batch(files: &[PathBuf], expected: Option<Mode>, out: Output) -> Vec<Processed> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(files.len().max(1));
    let chunk = files.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = files
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|f| process_file(f, expected, out)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
