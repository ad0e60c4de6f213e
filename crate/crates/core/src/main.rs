use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use dn_spectra::config::{disk_bubble, load_config, parse_domain_spec, sine_product, Claim, ExperimentConfig};
use dn_spectra::eigen::solve_lowest;
use dn_spectra::fem::{assemble, restrict_dirichlet};
use dn_spectra::geometry::{read_mesh, write_mesh, Mesh};
use dn_spectra::verify::{check_hypotheses, ibp_convergence, run_config, write_outputs, DomainSpec};

#[derive(Parser)]
#[command(name = "dn-spectra", version, about = "Dirichlet/Neumann spectra and eigenvalue-ordering checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bc {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, ValueEnum)]
enum Phi {
    SineProduct,
    Bubble,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh a domain, e.g. `rect{x0=0,x1=1,y0=0,y1=1}`, and print the mesh.
    Mesh {
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 0.125)]
        h: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the hypothesis reports of a configured theorem as JSON.
    Check { config: PathBuf },
    /// Print eigenvalues as CSV (`index,eigenvalue,residual,cluster_id`).
    Solve {
        /// Configuration naming the domain and coefficients.
        config: PathBuf,
        /// Use this mesh file instead of meshing the configured domain.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Bc::Dirichlet)]
        bc: Bc,
        #[arg(long, default_value_t = 6)]
        count: usize,
    },
    /// Print the inequality reports of a configured experiment as JSON.
    Verify { config: PathBuf },
    /// Print the certificates of a configured experiment as JSON.
    Certify { config: PathBuf },
    /// Check the boundary integration-by-parts identity under refinement.
    Ibp {
        #[arg(long)]
        domain: String,
        #[arg(long, value_enum)]
        phi: Phi,
        /// Direction `b` as two numbers.
        #[arg(long, num_args = 2, default_values_t = [1.0, 0.0], allow_negative_numbers = true)]
        b: Vec<f64>,
        #[arg(long, default_value_t = 0.0625)]
        h: f64,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Run a configured experiment and write its JSON report and CSV tables.
    Run {
        config: PathBuf,
        /// Overrides the configured JSON output path.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides the configured CSV base path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    load_config(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn coarse_mesh(cfg: &ExperimentConfig) -> Result<Arc<Mesh>> {
    Ok(Arc::new(cfg.domain_spec()?.mesh(cfg.h)?))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Mesh { domain, h, out } => {
            let text = write_mesh(&parse_domain_spec(&domain)?.mesh(h)?);
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Check { config } => {
            let cfg = load(&config)?;
            let mesh = coarse_mesh(&cfg)?;
            let coeffs = cfg.coefficients(&mesh)?;
            let Claim::Inequality(theorem) = cfg.claim(&coeffs, &mesh)? else {
                bail!("`check` applies to inequality theorems; use `run` for {}", cfg.theorem.name);
            };
            let dir = restrict_dirichlet(&assemble(&mesh, &coeffs, cfg.quadrature)?)?;
            let lambda1 = solve_lowest(&dir, 1)?.value(0);
            let r = cfg.r_for(&theorem, mesh.dim()).into_iter().max().unwrap_or(0);
            let reports = check_hypotheses(&theorem, &coeffs, &mesh, lambda1, r)?;
            print_json(&reports)?;
            Ok(reports.iter().all(|r| r.passed))
        }
        Command::Solve { config, mesh, bc, count } => {
            let cfg = load(&config)?;
            let mesh = match mesh {
                Some(path) => Arc::new(read_mesh(
                    &std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?,
                )?),
                None => coarse_mesh(&cfg)?,
            };
            let coeffs = cfg.coefficients(&mesh)?;
            let neumann = assemble(&mesh, &coeffs, cfg.quadrature)?;
            let pair = match bc {
                Bc::Dirichlet => restrict_dirichlet(&neumann)?,
                Bc::Neumann => neumann,
            };
            print!("{}", solve_lowest(&pair, count.min(pair.dim()))?.to_csv());
            Ok(true)
        }
        Command::Verify { config } => {
            let report = run_config(&load(&config)?)?;
            print_json(&report.inequalities)?;
            for e in &report.errors {
                eprintln!("error: {e}");
            }
            Ok(report.errors.is_empty() && report.inequalities.iter().all(|r| r.verdict.is_ok()))
        }
        Command::Certify { config } => {
            let report = run_config(&load(&config)?)?;
            print_json(&report.certificates)?;
            for e in &report.errors {
                eprintln!("error: {e}");
            }
            Ok(report.errors.is_empty() && report.certificates.iter().all(|c| c.passes))
        }
        Command::Ibp { domain, phi, b, h, levels } => {
            let spec: DomainSpec = parse_domain_spec(&domain)?;
            let phi = match phi {
                Phi::SineProduct => sine_product(&spec)?,
                Phi::Bubble => disk_bubble(&spec)?,
            };
            let c = ibp_convergence(&spec, &phi, [b[0], b[1]], h, levels)?;
            print_json(&c)?;
            Ok(c.finest().residual <= dn_spectra::verify::IBP_RESIDUAL_TOL)
        }
        Command::Run { config, output, csv } => {
            let cfg = load(&config)?;
            let report = run_config(&cfg)?;
            let json = output.or(cfg.output.clone());
            let csv = csv.or(cfg.csv.clone());
            for path in write_outputs(&report, json.as_deref(), csv.as_deref())? {
                eprintln!("wrote {}", path.display());
            }
            if json.is_none() {
                print_json(&report)?;
            }
            for e in &report.errors {
                eprintln!("error: {e}");
            }
            eprintln!("{}: {}", report.name, if report.success { "success" } else { "FAILED" });
            Ok(report.success)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
