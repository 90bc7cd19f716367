use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::json;

use cglindblad::runner::{emit_outputs, run_scenario, OutputFormat, RunConfig, Scenario};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

/// Coarse-grained GKLS master equations: coefficients, evolution and audits.
#[derive(Debug, Parser)]
#[command(name = "cglindblad", version)]
struct Cli {
    /// coefficients, evolve, oracle-compare, secular-compare, rg-demo or audit
    scenario: String,
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Gauss-Legendre points per axis
    #[arg(long)]
    quad_points: Option<usize>,
    /// Target relative quadrature tolerance
    #[arg(long)]
    tol: Option<f64>,
}

fn fail(kind: &str, message: String) -> ExitCode {
    eprintln!("{}", json!({ "passed": false, "error": kind, "message": message }));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("CGLINDBLAD_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let scenario = match Scenario::parse(&cli.scenario) {
        Ok(s) => s,
        Err(e) => return fail("usage", e.to_string()),
    };
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return fail("io", format!("{}: {e}", cli.config.display())),
    };
    let mut cfg = match RunConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail("config", e.to_string()),
    };
    if cfg.scenario != scenario {
        return fail(
            "usage",
            format!("config declares scenario `{}` but `{}` was requested", cfg.scenario.name(), scenario.name()),
        );
    }
    if let Some(n) = cli.quad_points {
        cfg.quadrature.points_per_axis = n;
    }
    if let Some(t) = cli.tol {
        cfg.quadrature.target_rel_tol = t;
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Both => OutputFormat::Both,
        };
    }
    let dir = cli.out.or_else(|| cfg.output.dir.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    let record = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => return fail("run", e.to_string()),
    };
    let written = match emit_outputs(&record, &dir, cfg.output.format) {
        Ok(w) => w,
        Err(e) => return fail("io", e.to_string()),
    };
    for path in &written {
        println!("{}", path.display());
    }
    if record.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "{}",
            json!({ "passed": false, "error": "audit", "scenario": record.scenario, "config_hash": record.config_hash, "failures": record.failures })
        );
        ExitCode::from(1)
    }
}
