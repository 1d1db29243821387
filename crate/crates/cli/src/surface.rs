//! Turning `<family> [--param ..]` or `--graph EXPR --space ..` into a chart
//! and a list of sample points.

use clap::Args;
use gaussmap::ambient::AmbientSpace;
use gaussmap::calculus::{Rect, SurfaceChart};
use gaussmap::zoo::{family, make_surface, FamilyInfo, FamilyParams};
use gaussmap::Error;

use crate::input::{bad, parse_expr, parse_grid, parse_params, parse_point, Failure};

#[derive(Debug, Args)]
pub struct SurfaceSel {
    /// Registered family (see `zoo list`).
    pub family: Option<String>,
    /// Graph x3 = F(u, v) instead of a family.
    #[arg(long, conflicts_with = "family", requires = "space", allow_hyphen_values = true)]
    pub graph: Option<String>,
    /// Ambient space of --graph.
    #[arg(long, value_parser = ["h3", "ds3", "ds3-timelike"])]
    pub space: Option<String>,
    /// Family parameter, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    pub params: Vec<String>,
    /// Curve psi(v) for families that take one.
    #[arg(long, allow_hyphen_values = true)]
    pub curve: Option<String>,
    /// A single point.
    #[arg(long, value_name = "U,V", conflicts_with = "grid", allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Grid a:b:Nxc:d:M (default: 5 x 5 interior points of the family domain).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

pub struct Resolved {
    pub chart: SurfaceChart,
    pub info: Option<&'static FamilyInfo>,
    pub family: Option<FamilyParams>,
    /// `(i, j, u, v)`.
    pub points: Vec<(usize, usize, f64, f64)>,
}

pub fn space_of(label: &str) -> AmbientSpace {
    match label {
        "ds3" => AmbientSpace::ds3(),
        "ds3-timelike" => AmbientSpace::ds3_timelike(),
        _ => AmbientSpace::h3(),
    }
}

/// Family parameters from the command line; errors name the flag at fault.
pub fn family_params(name: &str, params: &[String], curve: Option<&str>) -> Result<FamilyParams, Failure> {
    let info = family(name).map_err(|e| bad("<family>", e))?;
    let mut fp = FamilyParams::new(info.key);
    fp.params = parse_params("--param", params)?;
    if let Some(c) = curve {
        fp = fp.with_curve(parse_expr("--curve", c)?);
    }
    Ok(fp)
}

/// Maps the errors `make_surface` reports for bad input to usage failures.
pub fn build_family(fp: &FamilyParams, domain_flag: &str) -> Result<SurfaceChart, Failure> {
    make_surface(fp).map_err(|e| match e {
        Error::UnknownFamily(_) => bad("<family>", e),
        Error::ParamConstraint(_) => bad("--param", e),
        other => bad(domain_flag, other),
    })
}

/// Small square around a single requested point.
fn around(u: f64, v: f64) -> Rect {
    let r = 1e-3 * (1.0 + u.abs().max(v.abs()));
    Rect::new(u - r, u + r, v - r, v + r).expect("square has positive side")
}

fn pad(r: Rect) -> Rect {
    let e = 1e-6 * (r.u1 - r.u0).max(r.v1 - r.v0);
    Rect { u0: r.u0 - e, u1: r.u1 + e, v0: r.v0 - e, v1: r.v1 + e }
}

pub fn resolve(sel: &SurfaceSel) -> Result<Resolved, Failure> {
    let grid = sel.grid.as_deref().map(|g| parse_grid("--grid", g)).transpose()?;
    let at = sel.at.as_deref().map(|p| parse_point("--at", p)).transpose()?;
    let (domain, flag) = match (at, grid) {
        (Some((u, v)), _) => (Some(around(u, v)), "--at"),
        // nodes on the edge of the grid must be interior to the chart
        (None, Some(g)) => (Some(pad(g.rect())), "--grid"),
        (None, None) => (None, "<family>"),
    };
    let (chart, info, fp) = match (&sel.family, &sel.graph) {
        (Some(name), None) => {
            let mut fp = family_params(name, &sel.params, sel.curve.as_deref())?;
            if let Some(d) = domain {
                fp = fp.with_domain(d);
            }
            let info = family(&fp.name).map_err(|e| bad("<family>", e))?;
            (build_family(&fp, flag)?, Some(info), Some(fp))
        }
        (None, Some(src)) => {
            if !sel.params.is_empty() || sel.curve.is_some() {
                return Err(bad("--graph", "--param and --curve apply to families only"));
            }
            let expr = parse_expr("--graph", src)?;
            let space = space_of(sel.space.as_deref().unwrap_or("h3"));
            let Some(d) = domain else {
                return Err(bad("--graph", "needs --at or --grid"));
            };
            (SurfaceChart::graph(expr, d, space).map_err(|e| bad("--graph", e))?, None, None)
        }
        _ => return Err(Failure("expected a family name or --graph EXPR --space SPACE".into())),
    };
    let points = match (at, grid) {
        (Some((u, v)), _) => vec![(0, 0, u, v)],
        (None, Some(g)) => g.nodes(),
        (None, None) => {
            let d = chart.domain();
            (0..5)
                .flat_map(|j| {
                    (0..5).map(move |i| {
                        let (u, v) = d.lerp((i + 1) as f64 / 6.0, (j + 1) as f64 / 6.0);
                        (i, j, u, v)
                    })
                })
                .collect()
        }
    };
    Ok(Resolved { chart, info, family: fp, points })
}
