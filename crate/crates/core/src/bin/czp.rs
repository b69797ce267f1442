use clap::{Parser, Subcommand, ValueEnum};
use czp_core::cli_io::export::{write_csv, write_pgm};
use czp_core::cli_io::{
    cmd_elasticity, cmd_ellipticity, cmd_hardy, cmd_recover, cmd_selftest, cmd_verify, DeformationSpec, FieldFile,
    RunConfig, CONFIG_ENV, VERIFY_TOL,
};
use czp_core::Result;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "czp", version, about = "Pressure recovery and hyperelasticity diagnostics on uniform grids")]
struct Cli {
    /// Run configuration (`key = value` lines).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Recover q on W from a tensor field f.
    Recover {
        #[arg(long)]
        f: PathBuf,
        /// Where to write q.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check grad q = div f.
    Verify {
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = VERIFY_TOL)]
        tol: f64,
    },
    /// Energy, admissibility, growth and strain of a deformation.
    Elasticity {
        /// identity, shear:G, quadratic_shear:A, twist:ANGLE, or a vector field file.
        #[arg(long)]
        u: String,
        /// Where to write sigma.
        #[arg(long)]
        sigma: Option<PathBuf>,
        /// Where to write the push-forward of sigma.
        #[arg(long)]
        sigma_tilde: Option<PathBuf>,
    },
    /// Oscillation criterion for a pressure field.
    Ellipticity {
        #[arg(long)]
        p: PathBuf,
        /// Defaults to material.lambda0 from the config.
        #[arg(long)]
        lambda0: Option<f64>,
        /// Central window fraction; the whole grid when omitted.
        #[arg(long)]
        window: Option<f64>,
    },
    /// Local Hardy-space norms of each component.
    Hardy {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Run the built-in acceptance checks.
    Selftest,
    /// Export a field file as CSV or PGM, chosen by the output extension.
    Export {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the effective configuration.
    Config,
}

fn emit<T: Serialize>(format: Format, report: &T, text: impl FnOnce(&T) -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).expect("reports serialise")),
        Format::Text => print!("{}", text(report)),
    }
}

fn lines(v: &serde_json::Value, prefix: &str, out: &mut String) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                lines(v, &key, out);
            }
        }
        other => out.push_str(&format!("{prefix} = {other}\n")),
    }
}

/// `key = value` lines of the report's JSON form.
fn flat<T: Serialize>(report: &T) -> String {
    let mut out = String::new();
    lines(&serde_json::to_value(report).expect("reports serialise"), "", &mut out);
    out
}

fn export(f: &FieldFile, out: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(out)?);
    match out.extension().and_then(|e| e.to_str()) {
        Some("pgm") => write_pgm(f, file),
        _ => write_csv(f, file),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let fmt = cli.format;
    match cli.command {
        Command::Recover { f, out } => {
            let (q, report) = cmd_recover(&FieldFile::load(f)?, &cfg)?;
            q.save(out)?;
            emit(fmt, &report, flat);
        }
        Command::Verify { q, f, tol } => {
            let report = cmd_verify(&FieldFile::load(q)?, &FieldFile::load(f)?, tol)?;
            emit(fmt, &report, flat);
            return Ok(report.passed);
        }
        Command::Elasticity { u, sigma, sigma_tilde } => {
            let out = cmd_elasticity(&DeformationSpec::parse(&u)?, &cfg)?;
            if let Some(p) = sigma {
                out.sigma.save(p)?;
            }
            if let Some(p) = sigma_tilde {
                out.sigma_tilde.save(p)?;
            }
            emit(fmt, &out.report, flat);
        }
        Command::Ellipticity { p, lambda0, window } => {
            let report = cmd_ellipticity(&FieldFile::load(p)?, lambda0.unwrap_or(cfg.lambda0), window)?;
            emit(fmt, &report, flat);
        }
        Command::Hardy { f, r } => {
            let report = cmd_hardy(&FieldFile::load(f)?, r, &cfg)?;
            emit(fmt, &report, |rep| {
                let mut s = format!("r = {}\ncomponent  lr  hr  hardy  llogl\n", rep.r);
                for row in &rep.rows {
                    s.push_str(&format!(
                        "{}  {:e}  {:e}  {:e}  {:e}\n",
                        row.component, row.lr, row.hr, row.hardy, row.llogl
                    ));
                }
                s
            });
        }
        Command::Selftest => {
            let report = cmd_selftest(&cfg)?;
            emit(fmt, &report, |rep| {
                let mut s = String::new();
                for c in &rep.checks {
                    let verdict = if c.passed { "PASS" } else { "FAIL" };
                    s.push_str(&format!(
                        "{verdict} [{}] {}: {:e} (bound {:e})\n",
                        c.criterion, c.name, c.value, c.bound
                    ));
                }
                s
            });
            for (criterion, secs) in &report.seconds {
                eprintln!("criterion {criterion}: {secs:.1} s");
            }
            return Ok(report.passed);
        }
        Command::Export { f, out } => export(&FieldFile::load(f)?, &out)?,
        Command::Config => print!("{cfg}"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("czp: cannot size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("czp: {e}");
            ExitCode::from(2)
        }
    }
}
