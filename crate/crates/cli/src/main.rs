use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(message) = tiltcube_cli::configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(tiltcube_cli::EXIT_USAGE as u8);
    }
    let outcome = tiltcube_cli::run(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    std::io::stdout().flush().ok();
    ExitCode::from(outcome.code as u8)
}
