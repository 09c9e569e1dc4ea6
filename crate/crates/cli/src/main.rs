//! Batch runner over the belltime-core experiments.

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use output::{render, Metadata};

fn install_thread_pool() -> Result<(), String> {
    let Ok(v) = std::env::var("BELLTIME_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("BELLTIME_THREADS must be a positive integer, got '{v}'"))?;
    if n == 0 {
        return Err("BELLTIME_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = install_thread_pool() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }

    let seed = cli.common.seed;
    let start = Instant::now();
    let result = match &cli.command {
        Command::Chsh(a) => commands::chsh(a, seed),
        Command::LhvSimulate(a) => commands::lhv_simulate(a, seed),
        Command::Feasibility(a) => commands::feasibility(a),
        Command::Gfactor(a) => commands::gfactor(a, seed),
        Command::Spreading(a) => commands::spreading(a),
        Command::Vacuum(a) => commands::vacuum(a),
        Command::Randomfield(a) => commands::randomfield(a, seed),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let name = cli.command.name();
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}", json!({ "subcommand": name, "error": e.to_string() }));
            return ExitCode::from(2);
        }
    };

    let mut config = cli.command.config_json();
    if let (Some(obj), Some(p)) = (config.as_object_mut(), &cli.common.preset) {
        obj.insert("preset".into(), json!(p));
    }
    let meta = Metadata { subcommand: name, seed, config };
    let bytes = match render(&meta, &report, cli.common.format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: rendering output: {e}");
            return ExitCode::from(1);
        }
    };
    let threads = rayon::current_num_threads();
    let timing = json!({ "subcommand": name, "seconds": elapsed, "threads": threads });
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &bytes) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(1);
            }
            let mut sidecar = path.clone().into_os_string();
            sidecar.push(".timing.json");
            if let Err(e) = std::fs::write(&sidecar, format!("{timing}\n")) {
                eprintln!("error: writing timing sidecar: {e}");
                return ExitCode::from(1);
            }
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            if out.write_all(&bytes).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
        }
    }
    eprintln!("{name}: {elapsed:.3} s on {threads} thread(s)");

    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.json()).collect();
    if !failed.is_empty() {
        eprintln!("{}", json!({ "subcommand": name, "seed": seed, "failed_checks": failed }));
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
