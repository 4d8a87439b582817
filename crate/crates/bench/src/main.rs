use clap::Parser;
use shmr_bench::cli::{Cli, Command, ReportFormat};
use shmr_bench::commands::{generate, selftest};
use shmr_bench::report::Verification;
use shmr_bench::runner::run_benchmark;
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match cli.command {
        Command::Run(args) => match run_benchmark(&args) {
            Ok(outcome) => {
                let r = &outcome.report;
                match args.report {
                    ReportFormat::Text => print!("{}", r.to_text()),
                    ReportFormat::Csv => print!("{}", r.to_csv()),
                }
                if let Verification::Failed(diff) = &r.verification {
                    eprintln!("verification failed: {diff}");
                    return ExitCode::from(2);
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Gen(args) => match generate(&args) {
            Ok(summary) => {
                println!("{summary}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Selftest(args) => {
            let checks = selftest(&args);
            for c in &checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
    }
}
