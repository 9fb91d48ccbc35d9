//! Command-line front end: total Q-prime, variation checks, second
//! variations at the sphere, volume expansions and domain transforms.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qprime::config::{parse_eps, RunConfig};
use qprime::domains::{transform, DirectionSpec, Domain, DomainSpec, Family, FamilySpec, MapSpec};
use qprime::par::with_threads;
use qprime::quadrature::{hessian_probe, renorm_volume, total_q_prime, variation_check};
use qprime::report::{PointRow, Report};
use qprime::{Error, Result};

mod selftest;

#[derive(Parser)]
#[command(name = "qprime", version, about = "CR invariants of strictly pseudoconvex domains in C^2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Boundary grid resolution N; N and 2N are compared
    #[arg(long, global = true, default_value_t = 12)]
    grid: usize,
    /// Taylor degree of the defining function at boundary points
    #[arg(long, global = true, default_value_t = 10)]
    degree: usize,
    /// Divisibility tolerance of the Monge-Ampere normalization
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Volume cutoffs "e1,e2,...", strictly decreasing [default: 12 values from 2e-3 to 2e-4]
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Finite-difference step in t
    #[arg(long, global = true, default_value_t = 0.05)]
    step: f64,
    /// Worker threads (0: all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output path; JSON reports also write per-point CSV next to it
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Do not collapse rotation-invariant grid variables
    #[arg(long, global = true)]
    full_grid: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Total Q-prime, pointwise extrema and the N vs 2N estimate
    Invariants { domain: PathBuf },
    /// First-variation identity along a family rho + t sigma
    Variation { family: PathBuf },
    /// Volume integrals over {r > eps} and their expansion fits
    Renorm { domain: PathBuf },
    /// Second variation of total Q-prime at the sphere
    Hessian { direction: PathBuf },
    /// Image of a domain under a biholomorphism, as a domain file
    Transform { domain: PathBuf, map: PathBuf },
    /// Fast built-in checks and the convention ledger
    Selftest,
}

impl Opts {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig {
            grid: self.grid,
            degree: self.degree,
            tol: self.tol,
            step: self.step,
            threads: self.threads,
            use_symmetry: !self.full_grid,
            ..RunConfig::default()
        };
        if let Some(e) = &self.eps {
            cfg.eps = parse_eps(e)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Everything a command writes, produced before anything touches disk.
struct Output {
    main: String,
    csv: Option<String>,
}

fn json<T: serde::Serialize>(command: &str, inputs: Vec<String>, cfg: &RunConfig, result: T) -> Result<String> {
    Report::new(command, inputs, cfg, result).to_json()
}

fn csv_rows(rows: impl Iterator<Item = PointRow>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Numeric(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numeric(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Numeric(format!("csv: {e}")))
}

fn run(cmd: &Command, cfg: &RunConfig) -> Result<Output> {
    let pipeline = cfg.pipeline();
    match cmd {
        Command::Invariants { domain } => {
            let d = Domain::load(domain)?;
            d.check_pseudoconvex(cfg.grid.min(16))?;
            let r = total_q_prime(&d, cfg.grid, &pipeline)?;
            let csv = csv_rows(r.point_data.iter().map(PointRow::from))?;
            Ok(Output {
                main: json("invariants", vec![d.hash()], cfg, &r)?,
                csv: Some(csv),
            })
        }
        Command::Variation { family } => {
            let f = Family::new(FamilySpec::load(family)?)?;
            let r = variation_check(&f, cfg.step, cfg.grid, &pipeline)?;
            Ok(Output {
                main: json("variation", vec![f.base.hash()], cfg, &r)?,
                csv: None,
            })
        }
        Command::Renorm { domain } => {
            let d = Domain::load(domain)?;
            d.check_pseudoconvex(cfg.grid.min(16))?;
            let r = renorm_volume(&d, &cfg.renorm())?;
            Ok(Output {
                main: json("renorm", vec![d.hash()], cfg, &r)?,
                csv: None,
            })
        }
        Command::Hessian { direction } => {
            let d = DirectionSpec::load(direction)?;
            let r = hessian_probe(&d.poly(), cfg.step, cfg.grid, &pipeline, true)?;
            Ok(Output {
                main: json("hessian", vec![], cfg, &r)?,
                csv: None,
            })
        }
        Command::Transform { domain, map } => {
            let d = Domain::new(DomainSpec::load(domain)?)?;
            let m = MapSpec::load(map)?;
            let mut img = transform(&d, &m)?;
            img.spec.name = format!("{} (image)", d.name());
            img.spec
                .metadata
                .insert("transport_factor".into(), format!("{:e}", m.transport_factor()));
            Ok(Output {
                main: img.spec.to_toml()?,
                csv: None,
            })
        }
        Command::Selftest => Ok(Output {
            main: selftest::run(cfg)?,
            csv: None,
        }),
    }
}

/// Write to a sibling temporary file, then rename into place.
fn stage(path: &Path, text: &str) -> Result<PathBuf> {
    let tmp = path.with_extension(format!(
        "{}.partial",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(text.as_bytes())?;
    f.sync_all()?;
    Ok(tmp)
}

fn emit(out: &Output, path: Option<&Path>) -> Result<()> {
    let Some(path) = path else {
        print!("{}", out.main);
        if !out.main.ends_with('\n') {
            println!();
        }
        return Ok(());
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut staged = vec![(stage(path, &out.main)?, path.to_path_buf())];
    if let Some(csv) = &out.csv {
        let csv_path = path.with_extension("csv");
        match stage(&csv_path, csv) {
            Ok(tmp) => staged.push((tmp, csv_path)),
            Err(e) => {
                let _ = fs::remove_file(&staged[0].0);
                return Err(e);
            }
        }
    }
    for (tmp, dest) in &staged {
        fs::rename(tmp, dest)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli
        .opts
        .config()
        .and_then(|cfg| with_threads(cfg.threads, || run(&cli.command, &cfg))?)
        .and_then(|out| emit(&out, cli.opts.out.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
