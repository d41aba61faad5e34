use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    phaseret::cli::configure_threads();
    let out = phaseret::cli::run(std::env::args_os());
    // Write each stream in one call so partial output never interleaves.
    let _ = std::io::stdout().lock().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
