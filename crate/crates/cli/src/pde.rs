use gaussmap::zoo::{gradient_regime, graph_pde_residual, GraphPde};
use serde_json::json;

use crate::input::{bad, parse_expr, parse_grid, Failure};
use crate::report::{base, merge, Report};

pub const PDE_TOL: f64 = 1e-10;

pub fn residual(eq: &str, graph: &str, grid: &str, mut report: Report) -> Result<Report, Failure> {
    let which = match eq {
        "6.1" => GraphPde::H3Eq61,
        "6.2" => GraphPde::Ds3Eq62,
        other => return Err(bad("--eq", format!("expected 6.1 or 6.2, got `{other}`"))),
    };
    let f = parse_expr("--graph", graph)?;
    let grid = parse_grid("--grid", grid)?;
    report.info("equation", json!(eq));
    for (i, j, u, v) in grid.nodes() {
        let rec = match (f.eval_f64(u, v), graph_pde_residual(&f, u, v, which), gradient_regime(&f, u, v)) {
            (Ok(fv), Ok(r), Ok(g)) => json!({"f": fv, "residual": r.abs(), "gradient_regime": g}),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => json!({"error": e.to_string()}),
        };
        report.push(merge(base(i, j, u, v), rec));
    }
    report.check("equation residual", "residual", PDE_TOL);
    Ok(report.finish())
}
