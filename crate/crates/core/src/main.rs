use std::process::ExitCode;

use statlab::report::{parse_config, run_and_report, ConfigError, SUMMARY_FILE};

fn main() -> ExitCode {
    let config = match parse_config(std::env::args_os()) {
        Ok(c) => c,
        Err(ConfigError::Usage(e)) => e.exit(),
        Err(e) => {
            eprintln!("statlab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run_and_report(&config) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for t in &report.tables {
                println!("{}", t.file.display());
            }
            for f in &report.figures {
                println!("{}", f.display());
            }
            println!("{}", config.output_dir.join(SUMMARY_FILE).display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("statlab: {e}");
            ExitCode::from(1)
        }
    }
}
