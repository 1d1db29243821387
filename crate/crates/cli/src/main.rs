//! `gaussmap`: sample the surface catalogue, verify the form identities,
//! dualize, build surfaces from Gauss map data and export meshes.

mod check;
mod csv;
mod dualize;
mod input;
mod obj;
mod pde;
mod report;
mod surface;
mod weierstrass;
mod zoo;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::input::{bad, Failure};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "gaussmap", version, about = "Surfaces in hyperbolic and de Sitter 3-space")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// The surface catalogue.
    #[command(subcommand)]
    Zoo(ZooCmd),
    /// Verification reports on a family or a graph.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Graph equations.
    #[command(subcommand)]
    Pde(PdeCmd),
    /// Polar variety of a family, with the curvature law and double polarity.
    Dualize(dualize::DualizeArgs),
    /// Surfaces from Gauss map data.
    #[command(subcommand)]
    Weierstrass(WeierstrassCmd),
    /// Mesh export.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Debug, Subcommand)]
enum ZooCmd {
    /// List the registered families.
    List,
    /// Sample a family on a grid as CSV.
    Sample(zoo::SampleArgs),
}

#[derive(Debug, Subcommand)]
enum CheckCmd {
    /// Fundamental forms, the fourth-form identity and the normal.
    Forms(surface::SurfaceSel),
    /// Conformality of the normal Gauss map, the curvature law and rho.
    Conformal(surface::SurfaceSel),
}

#[derive(Debug, Subcommand)]
enum PdeCmd {
    /// Residual of a graph equation on a grid.
    Residual {
        /// 6.1 (hyperbolic) or 6.2 (de Sitter).
        #[arg(long)]
        eq: String,
        #[arg(long, allow_hyphen_values = true)]
        graph: String,
        /// a:b:Nxc:d:M
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
}

#[derive(Debug, Subcommand)]
enum WeierstrassCmd {
    /// Solve for G from boundary values and build the surface.
    Build(weierstrass::BuildArgs),
}

#[derive(Debug, Subcommand)]
enum ExportCmd {
    /// Triangulate a point CSV as Wavefront OBJ.
    Obj {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// `Ok(true)` when every check passed.
fn run(cli: Cli, command: Vec<String>) -> Result<bool, Failure> {
    let report = Report::new(command);
    let report = match cli.cmd {
        Cmd::Zoo(ZooCmd::List) => {
            print!("{}", zoo::list());
            return Ok(true);
        }
        Cmd::Zoo(ZooCmd::Sample(args)) => {
            let (text, failed) = zoo::sample(&args)?;
            match &args.out {
                Some(p) => std::fs::write(p, &text).map_err(|e| bad("--out", e))?,
                None => print!("{text}"),
            }
            if failed > 0 {
                eprintln!("{failed} nodes could not be evaluated and were left empty");
            }
            return Ok(true);
        }
        Cmd::Export(ExportCmd::Obj { input, out }) => {
            let text = std::fs::read_to_string(&input).map_err(|e| bad("--in", e))?;
            let grid = csv::parse_points(&text).map_err(|e| bad("--in", e))?;
            let mesh = obj::mesh(&grid).map_err(|e| bad("--in", e))?;
            std::fs::write(&out, &mesh.text).map_err(|e| bad("--out", e))?;
            if mesh.omitted > 0 {
                eprintln!("omitted {} faces touching dropped samples", mesh.omitted);
            }
            return Ok(true);
        }
        Cmd::Check(CheckCmd::Forms(sel)) => check::forms(&sel, report)?,
        Cmd::Check(CheckCmd::Conformal(sel)) => check::conformal(&sel, report)?,
        Cmd::Pde(PdeCmd::Residual { eq, graph, grid }) => pde::residual(&eq, &graph, &grid, report)?,
        Cmd::Dualize(args) => dualize::run(&args, report)?,
        Cmd::Weierstrass(WeierstrassCmd::Build(args)) => weierstrass::build(&args, report)?,
    };
    print!("{}", report.to_json());
    Ok(report.summary.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = std::env::args().skip(1).collect();
    match run(cli, command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
