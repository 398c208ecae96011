use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use tamejl::config::parse_config;
use tamejl::report::{coset_table, render_table, run, RunReport};
use tamejl::sweep::{count_configs, parse_spec, sweep};

#[derive(Parser)]
#[command(
    name = "tamejl",
    version,
    about = "Exact checks of tame rectifiers and ζ-data"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the output here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Run every enabled check on one configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a parameter sweep.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, env = "TAMEJL_JOBS")]
        jobs: Option<usize>,
        /// Only print the number of configurations.
        #[arg(long)]
        count_only: bool,
    },
    /// Print the double-coset table.
    Cosets {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the rectifier and the ζ-product.
    Rectifier {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the ζ-family and its condition checks.
    Zeta {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn load_report(path: &Path) -> Result<RunReport> {
    let (rc, ext) = parse_config(&read_input(path)?)?;
    Ok(run(&ext, &rc)?)
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    let table = cli.format == Format::Table;
    match cli.command {
        Command::Run { config } => {
            let r = load_report(&config)?;
            let text = if table {
                render_table(&r)
            } else {
                serde_json::to_string_pretty(&r)?
            };
            emit(&cli.output, &text)?;
            Ok(verdict(r.all_pass))
        }
        Command::Sweep {
            spec,
            jobs,
            count_only,
        } => {
            let spec = parse_spec(&read_input(&spec)?)?;
            let total = count_configs(&spec)?;
            eprintln!("enumerated {total} configurations");
            if count_only {
                return Ok(ExitCode::SUCCESS);
            }
            let s = sweep(&spec, jobs)?;
            let text = if table {
                let mut t = format!(
                    "configs {}  extensions {}  z sampled {}\n",
                    s.configs, s.extensions, s.z_sampled
                );
                for (name, tally) in &s.tallies {
                    t += &format!(
                        "{name:<22} pass {:>9}  fail {:>6}\n",
                        tally.pass, tally.fail
                    );
                }
                t += &format!("failures {}", s.failures.len());
                t
            } else {
                serde_json::to_string_pretty(&s)?
            };
            emit(&cli.output, &text)?;
            Ok(verdict(s.passed()))
        }
        Command::Cosets { config } => {
            let (_, ext) = parse_config(&read_input(&config)?)?;
            let rows = coset_table(&ext);
            let text = if table {
                let mut t = String::from("id  j  u  symmetry  t  fixes_uniformizer  inverse\n");
                for r in &rows {
                    t += &format!(
                        "{}  {}  {}  {:?}  {}  {}  {}\n",
                        r.id, r.j, r.multiplier, r.symmetry, r.t, r.fixes_uniformizer, r.inverse
                    );
                }
                t
            } else {
                serde_json::to_string_pretty(&rows)?
            };
            emit(&cli.output, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Rectifier { config } => {
            let r = load_report(&config)?;
            let text = if table {
                let (a, b) = (&r.rectifier.rectifier, &r.rectifier.zeta_product);
                format!(
                    "rectifier     mu_E {}  varpi_E {}\nzeta product  mu_E {}  varpi_E {}\nverdict {}",
                    a.on_mu_generator, a.on_pi, b.on_mu_generator, b.on_pi, r.rectifier.verdict
                )
            } else {
                serde_json::to_string_pretty(&json!({
                    "rectifier": r.rectifier,
                    "functoriality": r.functoriality,
                }))?
            };
            emit(&cli.output, &text)?;
            Ok(verdict(r.rectifier.verdict))
        }
        Command::Zeta { config } => {
            let r = load_report(&config)?;
            let ok = r.zeta_failures.is_empty();
            let text = if table {
                let mut t = String::new();
                for (i, z) in r.zeta.members.iter().enumerate() {
                    t += &format!(
                        "{i}  mu {}  varpi_E {}{}\n",
                        z.character.on_mu_generator,
                        z.character.on_pi,
                        if z.derived { "  (derived)" } else { "" }
                    );
                }
                for f in &r.zeta_failures {
                    t += &format!("FAIL class {}: {}\n", f.coset, f.generator);
                }
                t
            } else {
                serde_json::to_string_pretty(&json!({
                    "zeta": r.zeta,
                    "failures": r.zeta_failures,
                }))?
            };
            emit(&cli.output, &text)?;
            Ok(verdict(ok))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
