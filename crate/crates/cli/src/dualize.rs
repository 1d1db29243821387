use clap::Args;
use gaussmap::duality::{curvature_transfer, dual_chart, fit_isometry, polar_variety, TransferDirection};
use gaussmap::forms::{chart_forms, conformality_test, DEFAULT_CONFORMAL_TOL};
use gaussmap::zoo::polar_partner;
use serde_json::json;

use crate::csv::{write_points, PointRow};
use crate::input::{bad, Failure};
use crate::report::{base, merge, Report};
use crate::surface::{resolve, SurfaceSel};

pub const TRANSFER_TOL: f64 = 1e-8;
pub const DOUBLE_POLAR_TOL: f64 = 1e-8;
pub const FIT_TOL: f64 = 1e-6;
/// Points this close to the branch curvature are left out of the law.
pub const BRANCH_MARGIN: f64 = 1e-6;

#[derive(Debug, Args)]
pub struct DualizeArgs {
    #[command(flatten)]
    pub surface: SurfaceSel,
    /// Fit the polar points to the listed partner family.
    #[arg(long)]
    pub fit_isometry: bool,
    /// CSV of the polar points.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

fn rel3(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|c| (a[c] - b[c]).abs() / (1.0 + b[c].abs())).fold(0.0, f64::max)
}

pub fn run(args: &DualizeArgs, mut report: Report) -> Result<Report, Failure> {
    if args.surface.graph.is_some() {
        return Err(bad("--graph", "dualize takes a family"));
    }
    let r = resolve(&args.surface)?;
    let fp = r.family.clone().expect("families only");
    let partner = if args.fit_isometry {
        let p = polar_partner(&fp).map_err(|e| bad("--param", e))?;
        Some(p.ok_or_else(|| bad("--fit-isometry", format!("{} has no listed polar partner", fp.name)))?)
    } else {
        None
    };
    let dual = dual_chart(&r.chart).map_err(|e| bad("<family>", e))?;
    let twice = dual_chart(&dual).map_err(|e| bad("<family>", e))?;
    let dir = TransferDirection::for_source(&r.chart.ambient());
    report.info("source_space", json!(r.chart.ambient().label()));
    report.info("polar_space", json!(dual.ambient().label()));
    let mut rows = vec![];
    let mut fit_points = vec![];
    for &(i, j, u, v) in &r.points {
        let rec = (|| -> gaussmap::Result<serde_json::Value> {
            let p = polar_variety(&r.chart, u, v)?;
            let (_, src) = chart_forms(&r.chart, u, v)?;
            let (_, dst) = chart_forms(&dual, u, v)?;
            let x = r.chart.position(u, v)?;
            let back = twice.position(u, v)?;
            let y = p.position.xyz();
            let k = src.k();
            let a = conformality_test(&src, DEFAULT_CONFORMAL_TOL).is_conformal;
            let b = conformality_test(&dst, DEFAULT_CONFORMAL_TOL).is_conformal;
            let mut rec = json!({
                "x": x,
                "polar": y,
                "eta3": src.eta_t(),
                "source_k": k,
                "polar_k": dst.k(),
                "volume_ratio": p.volume_ratio,
                "branch": p.branch_flag,
                "double_polarity_error": rel3(back, x),
                "conformal": a,
                "polar_conformal": b,
                "conformality_mismatch": u8::from(a != b),
            });
            let o = rec.as_object_mut().expect("object");
            if (k - dir.branch_curvature()).abs() > BRANCH_MARGIN {
                let want = curvature_transfer(k, dir)?;
                o.insert("transfer_law".into(), json!(want));
                o.insert("transfer_error".into(), json!((dst.k() - want).abs() / want.abs().max(1.0)));
            }
            rows.push(PointRow { i, j, u, v, x: Some(y) });
            fit_points.push(y);
            Ok(rec)
        })();
        let rec = rec.unwrap_or_else(|e| {
            rows.push(PointRow { i, j, u, v, x: None });
            json!({"error": e.to_string()})
        });
        report.push(merge(base(i, j, u, v), rec));
    }
    report.check("curvature transfer", "transfer_error", TRANSFER_TOL);
    report.check("double polarity", "double_polarity_error", DOUBLE_POLAR_TOL);
    report.check("conformality equivalence", "conformality_mismatch", 0.0);
    if let Some(partner) = partner {
        let params: serde_json::Map<_, _> = partner.family.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        match fit_isometry(&fit_points, &partner.graph) {
            Ok(fit) => {
                report.info(
                    "isometry_fit",
                    json!({
                        "partner": partner.family.name,
                        "partner_params": params,
                        "partner_graph": partner.graph.source(),
                        "theta": fit.theta,
                        "a": fit.a,
                        "b": fit.b,
                        "max_residual": fit.max_residual,
                    }),
                );
                report.check_value("isometry fit", fit.max_residual, FIT_TOL);
            }
            Err(e) => {
                report.info("isometry_fit", json!({"partner": partner.family.name, "error": e.to_string()}));
                report.check_value("isometry fit", f64::NAN, FIT_TOL);
            }
        }
    }
    if let Some(path) = &args.out {
        write_points(path, &rows).map_err(|e| bad("--out", e))?;
    }
    Ok(report.finish())
}
