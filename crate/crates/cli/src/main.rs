mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use phasecraft::TruncationPolicy;

use commands::Ctx;
use config::Opts;
use output::{emit, render, Format};

#[derive(Parser)]
#[command(name = "phasecraft", version, about = "Phase estimation with path-symmetric probes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quantum Fisher information against average photon number
    Fig1(Opts),
    /// Sensitivity curves over the phase under loss
    Fig3(Opts),
    /// Optimal N scan, random-probe sampling or optimal-N curves (`--mode`)
    Fig4(Opts),
    /// Conditional-phase state generation; always prints JSON
    Generate(Opts),
    /// QFI, closed form and phase-averaged, for each state
    Qfi(Opts),
    /// Parity expectation and sensitivity
    Parity(Opts),
    /// Photon-counting Fisher information
    Fi(Opts),
    /// Random components with per-sample weight digests
    Sample(Opts),
}

fn policy() -> Result<TruncationPolicy> {
    let mut p = TruncationPolicy::default();
    if let Ok(v) = std::env::var("PHASECRAFT_TAIL_TOL") {
        let tol: f64 = v
            .parse()
            .map_err(|_| anyhow::anyhow!("PHASECRAFT_TAIL_TOL: bad number `{v}`"))?;
        if !(tol > 0.0 && tol < 1.0) {
            anyhow::bail!("PHASECRAFT_TAIL_TOL must lie in (0, 1)");
        }
        p.tail_tolerance = tol;
    }
    Ok(p)
}

fn run(cli: Cli) -> Result<usize> {
    let (name, opts) = match cli.cmd {
        Cmd::Fig1(o) => ("fig1", o),
        Cmd::Fig3(o) => ("fig3", o),
        Cmd::Fig4(o) => ("fig4", o),
        Cmd::Generate(o) => ("generate", o),
        Cmd::Qfi(o) => ("qfi", o),
        Cmd::Parity(o) => ("parity", o),
        Cmd::Fi(o) => ("fi", o),
        Cmd::Sample(o) => ("sample", o),
    };
    let opts = opts.resolve()?;
    if let Some(j) = opts.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    let ctx = Ctx::new(opts, policy()?)?;
    let out = ctx.opts.out.clone();
    if name == "generate" {
        let mut text = serde_json::to_string_pretty(&commands::generate(&ctx)?)?;
        text.push('\n');
        emit(&text, out.as_deref())?;
        return Ok(0);
    }
    let table = match name {
        "fig1" => commands::fig1(&ctx)?,
        "fig3" => commands::fig3(&ctx)?,
        "fig4" => commands::fig4(&ctx)?,
        "qfi" => commands::qfi(&ctx)?,
        "parity" => commands::parity(&ctx)?,
        "fi" => commands::fi(&ctx)?,
        _ => commands::sample_table(&ctx, 1000, true)?,
    };
    let format: Format = ctx.opts.format();
    emit(&render(&table, &ctx.metadata(name), format), out.as_deref())?;
    Ok(table.failures)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("phasecraft: {n} row(s) failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("phasecraft: {e:#}");
            ExitCode::from(1)
        }
    }
}
