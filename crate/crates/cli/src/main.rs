use std::io::Write;
use std::process::ExitCode;

use trace_repair_cli::{run, CliError, RunConfig};

fn main() -> ExitCode {
    let result = RunConfig::parse_from(std::env::args_os()).and_then(|cfg| {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        let code = run(&cfg, &mut out)?;
        out.flush().map_err(|e| CliError::Internal(e.to_string()))?;
        Ok(code)
    });
    let code = match result {
        Ok(code) => code,
        Err(CliError::Clap(text, true)) => {
            print!("{text}");
            0
        }
        Err(CliError::Clap(text, false)) => {
            eprint!("{text}");
            trace_repair_cli::EXIT_USAGE
        }
        Err(e) => {
            eprintln!("trace-repair: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
