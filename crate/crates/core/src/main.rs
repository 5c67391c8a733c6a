use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use exset::certificate::{certificate_to_string, gadget_certificate};
use exset::error::{Error, Result};
use exset::format::{gadget_to_string, parse_nodes, parse_problem, series_to_string};
use exset::interpolation::interpolate;
use exset::points::{enumerate_points, Point};
use exset::radius::radius_series;
use exset::scalar::{parse_rational, Rational};
use exset::vanishing::build_vanishing;
use exset::verify::{build_artifacts, verify_artifacts, Artifacts};

#[derive(Parser)]
#[command(
    name = "exset",
    version,
    about = "Integer power series with prescribed exceptional sets"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Assemble a problem file and write series, bundle, certificate, classification and witnesses.
    Build {
        problem: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long)]
        height: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        lambda_level: Option<u32>,
        #[arg(long)]
        paper_faithful: bool,
    },
    /// Replay every check on the artifacts in a build directory.
    Verify {
        dir: PathBuf,
        /// Print passing checks too.
        #[arg(long)]
        all: bool,
    },
    /// List enumeration representatives with their conjugate partners.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, num_args = 1.., value_parser = rational_arg)]
        rho: Vec<Rational>,
        #[arg(long)]
        height: u32,
    },
    /// Interpolating integer series through a node file.
    Interpolate {
        nodes: PathBuf,
        #[arg(long, default_value_t = 16)]
        degree: u32,
    },
    /// Standalone gadget vanishing at a point, with its stage certificate.
    Vanish {
        #[arg(long, value_parser = point_arg)]
        alpha: Point,
        #[arg(long, default_value_t = 4)]
        stage: usize,
        #[arg(long, default_value_t = 16)]
        degree: u32,
    },
    /// Series with prescribed polyradius of convergence.
    Radius {
        #[arg(long, num_args = 1.., value_parser = rational_arg)]
        rho: Vec<Rational>,
        #[arg(long, default_value_t = 16)]
        degree: u32,
    },
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn point_arg(s: &str) -> std::result::Result<Point, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn as_parse(e: Error) -> Error {
    match e {
        Error::Parse { .. } | Error::Format(_) | Error::Io(_) => e,
        other => Error::parse(0, other.to_string()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match cli.cmd {
        Cmd::Build {
            problem,
            out: dir,
            degree,
            stage,
            height,
            seed,
            lambda_level,
            paper_faithful,
        } => {
            let mut p = parse_problem(&std::fs::read_to_string(&problem)?)?;
            if let Some(d) = degree {
                p.degree = d;
            }
            if let Some(s) = stage {
                p.stage = s;
            }
            if let Some(h) = height {
                p.height = h;
            }
            if let Some(s) = seed {
                p.seed = s;
            }
            if let Some(l) = lambda_level {
                p.lambda_level = l;
            }
            p.paper_faithful = paper_faithful;
            let (b, cert, artifacts) = build_artifacts(&p)?;
            artifacts.write_dir(&dir)?;
            writeln!(
                out,
                "wrote {} ({} certificate entries)",
                dir.display(),
                cert.entries.len()
            )?;
            for (st, l) in b.steering.iter().zip(&b.ledger) {
                writeln!(
                    out,
                    "theta_{} = {} (C_k = {})",
                    st.k,
                    st.theta.degree(),
                    exset::scalar::fmt_rational(&l.c_paper)
                )?;
            }
            cert.require()?;
        }
        Cmd::Verify { dir, all } => {
            let a = Artifacts::read_dir(&dir)?;
            let report = verify_artifacts(&a)?;
            for c in &report.checks {
                if all || !c.pass {
                    writeln!(out, "{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name)?;
                }
            }
            writeln!(
                out,
                "{} checks, {} failed",
                report.checks.len(),
                report.failures().len()
            )?;
            report.into_result()?;
        }
        Cmd::Enumerate { m, rho, height } => {
            let m = m as usize;
            let rho = if rho.is_empty() {
                vec![Rational::from_integer(1.into()); m]
            } else {
                rho
            };
            let e = enumerate_points(m, &rho, height).map_err(as_parse)?;
            for (i, (r, partner)) in e.reps.iter().zip(&e.partners).enumerate() {
                match partner {
                    Some(c) => writeln!(out, "{i} {r} partner {c}")?,
                    None => writeln!(out, "{i} {r}")?,
                }
            }
        }
        Cmd::Interpolate { nodes, degree } => {
            let (m, nodes, c) = parse_nodes(&std::fs::read_to_string(&nodes)?)?;
            let f = interpolate(m, nodes, degree, c)?;
            write!(out, "{}", series_to_string(&f))?;
        }
        Cmd::Vanish {
            alpha,
            stage,
            degree,
        } => {
            let g = build_vanishing(&alpha, stage, degree)?;
            write!(out, "{}", gadget_to_string(&g))?;
            let cert = gadget_certificate(&g);
            write!(out, "{}", certificate_to_string(&cert))?;
            cert.require()?;
        }
        Cmd::Radius { rho, degree } => {
            let f = radius_series(&rho, degree).map_err(as_parse)?;
            write!(out, "{}", series_to_string(&f))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
