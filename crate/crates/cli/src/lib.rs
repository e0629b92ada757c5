//! Command-line front end for the `freesnake` library.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;

use args::{Cli, Command};
use commands::Context;
use error::CliResult;
use io::format_float;

/// Executes one parsed invocation, printing a short report to stdout.
pub fn run(cli: Cli) -> CliResult<()> {
    let ctx = Context {
        out: cli.out,
        pressure_kpa: cli.pressure_kpa,
    };
    match cli.command {
        Command::Design(a) => {
            let o = commands::design(&ctx, &a)?;
            for s in &o.segments {
                println!(
                    "{:<5} target {} 1/m  alpha0 {} deg  K_max {} 1/m",
                    s.label,
                    format_float(s.target_per_m),
                    format_float(s.alpha0_deg),
                    format_float(s.max_curvature_per_m)
                );
            }
            println!("wrote {}", o.spec_path.display());
        }
        Command::Simulate(a) => {
            let o = commands::simulate(&ctx, &a)?;
            println!("wrote {} ({} points)", o.trace_path.display(), o.points);
        }
        Command::Analyze(a) => {
            let o = commands::analyze(&ctx, &a)?;
            println!("analyzed {} trial(s), skipped {}", o.analyzed.len(), o.skipped.len());
            for s in &o.skipped {
                println!("  skipped {}: {}", s.trial_id, s.reason);
            }
            println!("wrote {}", o.profile_path.display());
        }
        Command::Compare(a) => {
            let o = commands::compare(&ctx, &a)?;
            for row in &o.coverage {
                println!(
                    "{} within {} envelope, {}: {} ({}/{})",
                    row.subject,
                    row.reference,
                    row.region,
                    format_float(row.coverage),
                    row.inside,
                    row.total
                );
            }
            println!("wrote {}", o.stats_path.display());
            println!("wrote {}", o.coverage_path.display());
            if let Some(p) = &o.durations_path {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}
