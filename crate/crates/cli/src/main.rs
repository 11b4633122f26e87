use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use padic_cascade::convergence::{certify, restricted_family, CertifyOptions, DEFAULT_DEPTH};
use padic_cascade::mask::{orthonormality_precheck, parse_mask, sum_rules, validate, Mask, DEFAULT_SYMBOL_TOL};
use padic_cascade::smoothness::critical_exponent_estimate;
use padic_cascade::spectral::{bracket, MatrixFamily, MatrixNorm, DEFAULT_BUDGET};
use padic_cascade::subdivision::{cascade_iterate_with_budget, DEFAULT_CELL_BUDGET};
use padic_cascade::wavelet::complete_masks;
use padic_cascade::{Error, Exponent};

const EXIT_INPUT: u8 = 1;
const EXIT_DIVERGENT: u8 = 2;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "padic-cascade", version, about = "Analyze p-adic refinement masks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Work budget: word evaluations for certify/jsr, cells for cascade/smoothness.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the mask normalization, sum rules and orthonormality symbol conditions.
    Validate {
        mask: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Certify L_q convergence of the subdivision scheme.
    Certify {
        mask: PathBuf,
        /// Exponent q: a rational >= 1 or "inf".
        #[arg(long, default_value = "2")]
        q: Exponent,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, default_value = "max-row-sum")]
        norm: MatrixNorm,
        /// Write the certificate JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact cascade iterate as a table of balls, sorted by Monna coordinate.
    Cascade {
        mask: PathBuf,
        #[arg(long, default_value_t = 4)]
        iters: u32,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Moduli of continuity, best approximation and critical exponent estimate.
    Smoothness {
        mask: PathBuf,
        #[arg(long, default_value = "2")]
        q: Exponent,
        #[arg(long, default_value_t = 6)]
        iters: u32,
        /// Level range `a:b`.
        #[arg(long, default_value = "0:6", value_parser = parse_levels)]
        levels: (u32, u32),
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Joint spectral radius bracket of a mask's restricted transition family or of given matrices.
    Jsr {
        #[arg(required_unless_present = "matrices", conflicts_with = "matrices")]
        mask: Option<PathBuf>,
        /// JSON file `{"matrices": [[[entry, ...], ...], ...]}`.
        #[arg(long)]
        matrices: Option<PathBuf>,
        #[arg(long, default_value = "2")]
        q: Exponent,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, default_value = "max-row-sum")]
        norm: MatrixNorm,
    },
    /// Complete an orthonormal mask to wavelet masks h_1, ..., h_{p-1}.
    Wavelet {
        mask: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn parse_levels(s: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = s.split_once(':').ok_or("expected a:b")?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

fn read_mask(path: &Path) -> Result<Mask> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_mask(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cell_budget(c: &Common) -> usize {
    c.budget.map_or(DEFAULT_CELL_BUDGET, |b| b as usize)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let common = &cli.common;
    match cli.command {
        Command::Validate { mask, json } => {
            let m = read_mask(&mask)?;
            let report = validate(&m);
            let ortho = orthonormality_precheck(&m, DEFAULT_SYMBOL_TOL);
            let rules: Vec<(String, String)> = sum_rules(&m)
                .into_iter()
                .map(|(e, v)| (e.to_string(), v.to_string()))
                .collect();
            if json {
                let doc = serde_json::json!({
                    "p": m.prime(),
                    "N": m.order(),
                    "valid": report.pass,
                    "sum": report.sum,
                    "offenders": report.offenders,
                    "sum_rules": rules.iter().map(|(e, v)| serde_json::json!({"eps": e, "value": v})).collect::<Vec<_>>(),
                    "orthonormality": ortho,
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                println!("p = {}, N = {}, {} coefficients", m.prime(), m.order(), m.support().count());
                println!("sum h = {} ({})", report.sum, if report.pass { "ok" } else { "expected p" });
                println!("sum rules:");
                for (e, v) in &rules {
                    println!("  eps = {e}: {v}");
                }
                println!(
                    "orthonormality pre-check: {}",
                    if ortho.pass { "pass" } else { "fail" }
                );
                for c in ortho.checks.iter().filter(|c| !c.pass) {
                    println!("  H({}) = {:+.3e}{:+.3e}i", c.k, c.re, c.im);
                }
            }
            Ok(if report.pass { 0 } else { EXIT_INPUT })
        }
        Command::Certify { mask, q, depth, norm, out } => {
            let m = read_mask(&mask)?;
            let opts = CertifyOptions {
                depth,
                norm,
                budget: common.budget.unwrap_or(DEFAULT_BUDGET),
                ..CertifyOptions::default()
            };
            let cert = certify(&m, &q, &opts)?;
            println!("verdict: {:?}", cert.verdict);
            if let Some(b) = &cert.bracket {
                println!(
                    "rho_{q} in [{:.6}, {:.6}] at depth {}, threshold p^(1/q) = {:.6}",
                    b.lower, b.upper, b.depth, cert.threshold
                );
            }
            if let Some(r) = &cert.reason {
                println!("reason: {r}");
            }
            if let Some(path) = out {
                write(&path, &cert.to_json())?;
            }
            Ok(cert.exit_code() as u8)
        }
        Command::Cascade { mask, iters, csv } => {
            let m = read_mask(&mask)?;
            let f = cascade_iterate_with_budget(&m, iters, cell_budget(common))?;
            let mut rows: Vec<_> = f.cells().collect();
            rows.sort_by_cached_key(|(c, _)| c.monna_exact());
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["level", "center", "monna_x", "re", "im", "abs"])?;
            for (cell, v) in &rows {
                let z = v.to_complex();
                w.write_record([
                    cell.level.to_string(),
                    cell.center.value().to_string(),
                    format!("{:.17e}", cell.monna_x()),
                    format!("{:.17e}", z.re),
                    format!("{:.17e}", z.im),
                    format!("{:.17e}", z.norm()),
                ])?;
            }
            let text = String::from_utf8(w.into_inner()?)?;
            match csv {
                Some(path) => {
                    write(&path, &text)?;
                    println!("{} cells at level {} written to {}", rows.len(), f.level(), path.display());
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Smoothness { mask, q, iters, levels, json, csv } => {
            let m = read_mask(&mask)?;
            let rep = critical_exponent_estimate(&m, &q, iters, levels, Some(cell_budget(common)))?;
            for r in &rep.rows {
                println!("n = {:>2}  omega = {:.6e}  E_n = {:.6e}", r.n, r.omega, r.best_approx);
            }
            println!("critical exponent: {}", rep.exponent);
            if let Some(path) = json {
                write(&path, &rep.to_json())?;
            }
            if let Some(path) = csv {
                write(&path, &rep.to_csv())?;
            }
            Ok(0)
        }
        Command::Jsr { mask, matrices, q, depth, norm } => {
            let fam: MatrixFamily = match (mask, matrices) {
                (_, Some(path)) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    MatrixFamily::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                (Some(path), None) => restricted_family(&read_mask(&path)?)?.family,
                (None, None) => bail!("either a mask or --matrices is required"),
            };
            let b = bracket(&fam, &q, depth, norm, common.budget.unwrap_or(DEFAULT_BUDGET))?;
            println!("{}", serde_json::to_string_pretty(&b)?);
            Ok(0)
        }
        Command::Wavelet { mask, out_dir } => {
            let m = read_mask(&mask)?;
            let w = complete_masks(&m)?;
            fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            for j in 1..=w.filters.len() {
                let path = out_dir.join(format!("h{j}.json"));
                write(&path, &w.to_json(j)?)?;
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded(_)) => EXIT_BUDGET,
        Some(Error::NotConvergent(_)) => EXIT_DIVERGENT,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
