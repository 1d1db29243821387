use std::path::PathBuf;

use clap::Args;
use gaussmap::zoo::{families, Expected};

use crate::csv::{render, PointRow};
use crate::input::{bad, parse_axis, Axis, Failure, Grid2};
use crate::surface::{build_family, family_params};

pub fn expected_label(e: Expected) -> &'static str {
    match e {
        Expected::Conformal => "conformal",
        Expected::TotallyGeodesic => "totally-geodesic",
        Expected::NotConformal => "not-conformal",
    }
}

pub fn list() -> String {
    let rows: Vec<[String; 5]> = families()
        .iter()
        .map(|f| {
            let mut params: Vec<String> = f.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
            if let Some(c) = f.curve {
                params.push(format!("curve={c}"));
            }
            [
                f.key.to_string(),
                f.space.label().to_string(),
                expected_label(f.expected).to_string(),
                if params.is_empty() { "-".into() } else { params.join(" ") },
                f.summary.to_string(),
            ]
        })
        .collect();
    let header = ["family", "space", "expected", "defaults", "summary"].map(String::from);
    let mut width = [0usize; 4];
    for r in std::iter::once(&header).chain(&rows) {
        for c in 0..4 {
            width[c] = width[c].max(r[c].len());
        }
    }
    let mut out = String::new();
    for r in std::iter::once(&header).chain(&rows) {
        for c in 0..4 {
            out += &format!("{:w$}  ", r[c], w = width[c]);
        }
        out += &r[4];
        out.push('\n');
    }
    out
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub family: String,
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    pub params: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub curve: Option<String>,
    /// a:b:N (default: the family's u-range with 16 samples).
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Sampled rows and the number of nodes that could not be evaluated.
pub fn sample(args: &SampleArgs) -> Result<(String, usize), Failure> {
    let fp = family_params(&args.family, &args.params, args.curve.as_deref())?;
    let default = gaussmap::zoo::family(&fp.name).map_err(|e| bad("<family>", e))?.domain;
    let u = match &args.u {
        Some(s) => parse_axis("--u", s)?,
        None => Axis { a: default.u0, b: default.u1, n: 16 },
    };
    let v = match &args.v {
        Some(s) => parse_axis("--v", s)?,
        None => Axis { a: default.v0, b: default.v1, n: 16 },
    };
    let grid = Grid2 { u, v };
    // positions need no causal class, so the grid may leave the domain the
    // family is validated on; nodes with x3 <= 0 become empty rows
    let chart = build_family(&fp, "--param")?;
    let mut failed = 0;
    let rows: Vec<PointRow> = grid
        .nodes()
        .into_iter()
        .map(|(i, j, u, v)| {
            let x = chart.position(u, v).ok().filter(|x| x.iter().all(|c| c.is_finite()) && x[2] > 0.0);
            failed += usize::from(x.is_none());
            PointRow { i, j, u, v, x }
        })
        .collect();
    Ok((render(&rows), failed))
}
