use std::fs;
use std::process::ExitCode;

use bsboot::cli::{error_path, run, Cli};
use clap::Parser;
use serde_json::json;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            let artifact = json!({
                "error": chain[0],
                "causes": &chain[1..],
                "config": &cli,
            });
            let body = serde_json::to_string_pretty(&artifact).unwrap_or_default() + "\n";
            match cli.out_path() {
                Some(out) => {
                    let path = error_path(out);
                    if let Err(w) = fs::write(&path, &body) {
                        eprintln!("error: could not write {}: {w}", path.display());
                    }
                    eprintln!("error: {e:#}");
                }
                None => eprint!("{body}"),
            }
            ExitCode::FAILURE
        }
    }
}
