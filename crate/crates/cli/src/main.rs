//! `idcp`: check, solve, lay out, render and verify inversive distance circle
//! packings.
//!
//! Exit status: 0 on success, 1 when a check fails, a solve or layout does
//! not succeed, or `verify` records a violation; 2 on usage, read or parse
//! errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use idcp::harness::{self, Regime, Suite, VerifyOptions};
use idcp::io::{self, IoError, Packing, ReportDocument};
use idcp::mesh::{check_regular_weight, check_structure_condition, RadiusAssignment};
use idcp::metrics::{edge_lengths, is_weighted_delaunay_packing, packing_curvature};
use idcp::solver::{
    default_initial_labels, layout_in_disk, solve_prescribed_curvature, SolveConfig, SolveError,
    DEFAULT_INITIAL_RADIUS,
};
use idcp::svg::{render_svg, EdgeStyle, RenderOptions};

const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Parser)]
#[command(name = "idcp", version, about = "Inversive distance circle packings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structure condition, weight regularity and weighted Delaunay report.
    Check {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the discrete curvature at every vertex.
    Curvature {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Solve for prescribed curvature at the interior vertices, keeping the
    /// boundary radii.
    Solve {
        #[arg(
            long = "target-K",
            visible_alias = "target-k",
            default_value_t = 0.0,
            allow_hyphen_values = true
        )]
        target_k: f64,
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(long, default_value_t = idcp::solver::DEFAULT_MAX_ITERATIONS)]
        max_iterations: usize,
        #[arg(long, default_value_t = idcp::solver::DEFAULT_RESIDUAL_TOL)]
        tol: f64,
    },
    /// Develop a hyperbolic packing into the Poincaré disk.
    Layout {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Face placed first.
        #[arg(long, default_value_t = 0)]
        seed_face: usize,
        /// Vertex moved to the origin afterwards.
        #[arg(long)]
        center: Option<usize>,
    },
    /// Draw a laid-out packing as SVG.
    Render {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Draw edges as hyperbolic geodesics instead of chords.
        #[arg(long)]
        geodesic: bool,
        /// Draw the real face circles, dashed.
        #[arg(long)]
        face_circles: bool,
    },
    /// Run randomized verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Trials per regime; suite default when omitted.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, env = "IDCP_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Rings of the hexagonal disk used by mesh-based suites.
        #[arg(long)]
        rings: Option<usize>,
        /// "(-1,1]" or "[0,inf)"; both when omitted.
        #[arg(long, value_parser = parse_regime)]
        regime: Option<Regime>,
        /// Random initializations per rigidity trial.
        #[arg(long, default_value_t = 10)]
        inits: usize,
        /// Write the JSON report here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    MaxPrinciple,
    Schwarz,
    Scaling,
    Rigidity,
    Generalized,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::MaxPrinciple => vec![Suite::MaxPrinciple],
            SuiteArg::Schwarz => vec![Suite::Schwarz],
            SuiteArg::Scaling => vec![Suite::Scaling],
            SuiteArg::Rigidity => vec![Suite::Rigidity],
            SuiteArg::Generalized => vec![Suite::Generalized],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse()
}

enum Failure {
    /// Domain failure, exit 1.
    Failed(String),
    /// Input problem, exit 2.
    Input(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Write { .. } => Failure::Failed(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn failed(e: impl std::fmt::Display) -> Failure {
    Failure::Failed(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when the command ran but found a failure.
fn run(cmd: Command) -> Result<bool, Failure> {
    match cmd {
        Command::Check { input, json } => check(&input, json),
        Command::Curvature { input, json } => curvature(&input, json),
        Command::Solve {
            target_k,
            input,
            out,
            max_iterations,
            tol,
        } => solve(&input, &out, target_k, max_iterations, tol),
        Command::Layout {
            input,
            out,
            seed_face,
            center,
        } => layout(&input, &out, seed_face, center),
        Command::Render {
            input,
            out,
            geodesic,
            face_circles,
        } => {
            let packing = io::load(&input)?;
            let opts = RenderOptions {
                edges: if geodesic {
                    EdgeStyle::Geodesic
                } else {
                    EdgeStyle::Chord
                },
                face_circles,
            };
            emit(out.as_deref(), &render_svg(&packing, &opts)?)?;
            Ok(true)
        }
        Command::Verify {
            suite,
            trials,
            seed,
            rings,
            regime,
            inits,
            out,
        } => {
            let opts = VerifyOptions {
                trials,
                seed,
                rings,
                regime,
                inits,
            };
            let reports: Vec<_> = suite
                .suites()
                .into_iter()
                .flat_map(|s| harness::run_suite(s, &opts))
                .collect();
            print!("{}", harness::summary_table(&reports));
            let doc = ReportDocument::new(&reports);
            if let Some(path) = out {
                io::write_text(path, &io::to_json(&doc)?)?;
            }
            if doc.violations > 0 {
                eprintln!("{} violation(s) recorded", doc.violations);
            }
            Ok(doc.violations == 0)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), IoError> {
    match out {
        Some(path) => io::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check(input: &Path, as_json: bool) -> Result<bool, Failure> {
    let p = io::load(input)?;
    let structure = check_structure_condition(&p.tri, &p.eta);
    let regular = check_regular_weight(&p.tri, &p.eta);
    let delaunay = match &p.radii {
        Some(r) => Some(is_weighted_delaunay_packing(&p.tri, &p.eta, r).map_err(failed)?),
        None => None,
    };
    let pass = structure.pass && regular.pass && delaunay.as_ref().is_none_or(|d| d.pass);
    if as_json {
        let doc = json!({
            "pass": pass,
            "structure_condition": structure,
            "regular_weight": regular,
            "delaunay": delaunay,
        });
        print!("{}", io::to_json(&doc)?);
    } else {
        let word = |b: bool| if b { "pass" } else { "FAIL" };
        println!("structure condition: {}", word(structure.pass));
        for f in &structure.offending_faces {
            println!("  face {f} {:?}", p.tri.faces()[*f]);
        }
        println!("regular weight:      {}", word(regular.pass));
        for e in &regular.offending_edges {
            println!("  edge {e}");
        }
        match &delaunay {
            None => println!("weighted Delaunay:   skipped (no radii)"),
            Some(d) => {
                println!("weighted Delaunay:   {}", word(d.pass));
                for e in d.failing() {
                    println!("  edge {} h-sum {:e}", e.edge, e.h_sum);
                }
            }
        }
    }
    Ok(pass)
}

fn curvature(input: &Path, as_json: bool) -> Result<bool, Failure> {
    let p = io::load(input)?;
    let k = packing_curvature(&p.tri, &p.eta, p.radii()?).map_err(failed)?;
    if as_json {
        print!("{}", io::to_json(&k)?);
    } else {
        for (v, kv) in &k {
            let tag = if p.tri.is_boundary(*v) == Some(true) {
                " (boundary)"
            } else {
                ""
            };
            println!("{v} {kv:.17e}{tag}");
        }
    }
    Ok(true)
}

fn solve(
    input: &Path,
    out: &Path,
    target_k: f64,
    max_iterations: usize,
    tol: f64,
) -> Result<bool, Failure> {
    let mut p = io::load(input)?;
    let radii = match &p.radii {
        Some(r) => r.clone(),
        None => {
            RadiusAssignment::uniform(&p.tri, p.geometry, DEFAULT_INITIAL_RADIUS).map_err(failed)?
        }
    };
    let mut cfg = SolveConfig::uniform_target(&p.tri, &radii, target_k);
    cfg.max_iterations = max_iterations;
    cfg.residual_tol = tol;
    let init = default_initial_labels(&p.tri, &cfg).map_err(failed)?;
    let report = match solve_prescribed_curvature(&p.tri, &p.eta, &cfg, &init) {
        Ok(r) => r,
        Err(SolveError::Config(msg)) => return Err(Failure::Input(msg)),
        Err(e) => return Err(failed(e)),
    };
    println!(
        "converged in {} iterations, residual {:e}",
        report.iterations,
        report.final_residual()
    );
    p.radii = Some(report.radii);
    p.layout = None;
    io::save(out, &p)?;
    Ok(true)
}

fn layout(
    input: &Path,
    out: &Path,
    seed_face: usize,
    center: Option<usize>,
) -> Result<bool, Failure> {
    let p = io::load(input)?;
    let lengths = edge_lengths(&p.tri, &p.eta, p.radii()?).map_err(failed)?;
    let mut l = layout_in_disk(&p.tri, &lengths, seed_face).map_err(failed)?;
    if let Some(v) = center {
        if !p.tri.contains_vertex(v) {
            return Err(Failure::Input(format!("unknown vertex {v}")));
        }
        l = l.centered_at(v).map_err(failed)?;
    }
    println!("closing error {:e}", l.closing_error);
    let p: Packing = p.with_layout(&l);
    io::save(out, &p)?;
    Ok(true)
}
