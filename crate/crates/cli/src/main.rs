//! photon-shaper: forward emitter-cavity runs, emission spectra, inverse
//! pump design, parameter sweeps, and figure-dataset reproduction, driven by
//! flat INI-style configuration files.

mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use config::{Document, Mode, Plan};

const USAGE: &str = "\
photon-shaper <forward|inverse|spectrum|sweep|figure> --config PATH [--out DIR] [--dt X] [--force-coarse]

Modes:
  forward    solve the emitter-cavity dynamics and write the outgoing packet
  inverse    design the pump for a target packet shape and validate it
  spectrum   forward run plus the spectral density of the outgoing mode
  sweep      expand the [sweep] axes and run each combination
  figure     named preset runs (figure data sets) with an aggregate summary

Options:
  --config PATH    run configuration (required)
  --out DIR        output directory (overrides [outputs] dir)
  --dt X           override the grid step
  --force-coarse   accept grids coarser than the refinement guard
  -h, --help       this message

Environment:
  PHOTON_SHAPER_THREADS   caps sweep parallelism

Exit codes: 0 ok, 2 config error, 3 numeric/feasibility error, 4 capacity error.";

struct CliArgs {
    mode: Mode,
    config: PathBuf,
    out: Option<PathBuf>,
    dt: Option<f64>,
    force_coarse: bool,
}

fn parse_args(args: &[String]) -> Result<CliArgs, String> {
    if args.is_empty() || args.iter().any(|a| a == "-h" || a == "--help") {
        return Err(String::new()); // usage request
    }
    let mode = Mode::parse(&args[0]).ok_or_else(|| format!("unknown mode '{}'", args[0]))?;
    let mut config = None;
    let mut out = None;
    let mut dt = None;
    let mut force_coarse = false;
    let mut it = args[1..].iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                let v = it.next().ok_or("--config needs a path")?;
                config = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = it.next().ok_or("--out needs a directory")?;
                out = Some(PathBuf::from(v));
            }
            "--dt" => {
                let v = it.next().ok_or("--dt needs a value")?;
                dt = Some(
                    v.parse::<f64>()
                        .map_err(|_| format!("--dt value '{v}' is not a number"))?,
                );
            }
            "--force-coarse" => force_coarse = true,
            other => return Err(format!("unknown argument '{other}'")),
        }
    }
    Ok(CliArgs {
        mode,
        config: config.ok_or("missing required --config PATH")?,
        out,
        dt,
        force_coarse,
    })
}

fn emit_error(kind: &str, message: &str, code: i32) -> ExitCode {
    eprintln!(
        "{}",
        serde_json::json!({
            "error": { "kind": kind, "message": message, "exit_code": code }
        })
    );
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse_args(&args) {
        Ok(cli) => cli,
        Err(msg) if msg.is_empty() => {
            println!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        Err(msg) => {
            eprintln!("{msg}\n\n{USAGE}");
            return ExitCode::from(2);
        }
    };

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            return emit_error(
                "config",
                &format!("cannot read '{}': {e}", cli.config.display()),
                2,
            )
        }
    };
    let base_dir = cli
        .config
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));

    let doc = match Document::parse(&text) {
        Ok(d) => d,
        Err(e) => return emit_error("config", &format!("{}: {e}", cli.config.display()), 2),
    };
    let mut doc = doc;
    if let Some(dt) = cli.dt {
        doc = match override_dt(&text, dt) {
            Ok(d) => d,
            Err(e) => return emit_error("config", &e, 2),
        };
    }
    let plan = match Plan::from_document(cli.mode, &doc, &base_dir) {
        Ok(p) => p,
        Err(e) if e.capacity => {
            return emit_error("capacity", &format!("{}: {e}", cli.config.display()), 4)
        }
        Err(e) => return emit_error("config", &format!("{}: {e}", cli.config.display()), 2),
    };

    match runner::execute(&plan, cli.out.as_deref(), cli.force_coarse) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => emit_error(e.kind(), e.message(), e.exit_code()),
    }
}

/// Re-parses the config with the [grid] dt replaced by the CLI override.
fn override_dt(text: &str, dt: f64) -> Result<Document, String> {
    let mut out = String::new();
    let mut in_grid = false;
    let mut replaced = false;
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.starts_with('[') {
            if in_grid && !replaced {
                out.push_str(&format!("dt = {dt}\n"));
                replaced = true;
            }
            in_grid = trimmed == "[grid]";
        }
        if in_grid
            && trimmed.starts_with("dt")
            && trimmed.split('=').next().map(str::trim) == Some("dt")
        {
            out.push_str(&format!("dt = {dt}\n"));
            replaced = true;
            continue;
        }
        out.push_str(line);
        out.push('\n');
    }
    if in_grid && !replaced {
        out.push_str(&format!("dt = {dt}\n"));
        replaced = true;
    }
    if !replaced {
        return Err("--dt given but the config has no [grid] section".into());
    }
    Document::parse(&out).map_err(|e| e.to_string())
}
