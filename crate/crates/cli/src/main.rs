use clap::Parser;
use regulie_cli::commands::{exit_code_for, run};
use regulie_cli::RunConfig;

fn main() {
    let code = match run(RunConfig::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code_for(&err)
        }
    };
    std::process::exit(code);
}
