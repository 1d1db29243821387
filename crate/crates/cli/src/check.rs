use gaussmap::forms::{
    chart_forms, conformal_curvature, conformality_test, obata_identity_residual, predicted_rho, Classification,
    FormBundle, DEFAULT_CONFORMAL_TOL,
};
use gaussmap::zoo::Expected;
use serde_json::{json, Value};

use crate::input::Failure;
use crate::report::{base, merge, Report};
use crate::surface::{resolve, SurfaceSel};

pub const OBATA_TOL: f64 = 1e-9;
pub const NORMAL_TOL: f64 = 1e-10;
pub const K_LAW_TOL: f64 = 1e-9;
pub const RHO_TOL: f64 = 1e-8;

macro_rules! rows {
    ($m:expr) => {{
        let m = &$m;
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect::<Vec<f64>>()).collect::<Vec<_>>()
    }};
}

fn common(b: &FormBundle) -> Value {
    json!({
        "x": b.x.iter().collect::<Vec<_>>(),
        "eta": b.eta.iter().collect::<Vec<_>>(),
        "mean_curvature": b.mean_curvature,
        "gauss_curvature": b.gauss_curvature,
    })
}

pub fn forms(sel: &SurfaceSel, mut report: Report) -> Result<Report, Failure> {
    let r = resolve(sel)?;
    report.info("space", json!(r.chart.ambient().label()));
    for &(i, j, u, v) in &r.points {
        let rec = match chart_forms(&r.chart, u, v) {
            Ok((jet, b)) => {
                let (tangency, normalization) = b.normal_residuals(&jet);
                merge(
                    common(&b),
                    json!({
                        "first": rows!(b.first),
                        "second": rows!(b.second),
                        "third": rows!(b.third),
                        "fourth": rows!(b.fourth),
                        "obata_residual": obata_identity_residual(&b),
                        "tangency_residual": tangency,
                        "normalization_residual": normalization,
                    }),
                )
            }
            Err(e) => json!({"error": e.to_string()}),
        };
        report.push(merge(base(i, j, u, v), rec));
    }
    report.check("obata identity", "obata_residual", OBATA_TOL);
    report.check("normal tangency", "tangency_residual", NORMAL_TOL);
    report.check("normal length", "normalization_residual", NORMAL_TOL);
    Ok(report.finish())
}

fn matches(expected: Expected, got: Classification) -> bool {
    match expected {
        Expected::Conformal => got == Classification::Conformal,
        Expected::TotallyGeodesic => got == Classification::TotallyGeodesicDegenerate,
        Expected::NotConformal => matches!(got, Classification::NotConformal | Classification::UmbilicPoint),
    }
}

pub fn conformal(sel: &SurfaceSel, mut report: Report) -> Result<Report, Failure> {
    let r = resolve(sel)?;
    let space = r.chart.ambient();
    report.info("space", json!(space.label()));
    if let Some(info) = r.info {
        report.info("expected", json!(crate::zoo::expected_label(info.expected)));
    }
    for &(i, j, u, v) in &r.points {
        let rec = match chart_forms(&r.chart, u, v) {
            Ok((_, b)) => {
                let c = conformality_test(&b, DEFAULT_CONFORMAL_TOL);
                let eta = b.eta_t();
                let law = conformal_curvature(&space, eta);
                let mut rec = merge(
                    common(&b),
                    json!({
                        "classification": c.classification.label(),
                        "rho": c.rho,
                        "conformality_residual": c.residual,
                        "umbilic": c.umbilic,
                        "curvature_law": law,
                    }),
                );
                let o = rec.as_object_mut().expect("object");
                // an umbilic point satisfies IV = rho II by itself; the laws
                // are about surfaces that are conformal on an open set
                let isolated = c.umbilic && r.info.is_some_and(|i| i.expected != Expected::Conformal);
                if c.is_conformal && !isolated {
                    o.insert("curvature_law_error".into(), json!((b.k() - law).abs()));
                    if let (Some(rho), Some(want)) = (c.rho, predicted_rho(&b)) {
                        o.insert("rho_predicted".into(), json!(want));
                        o.insert("rho_error".into(), json!((rho - want).abs()));
                    }
                }
                if let Some(info) = r.info {
                    let bad = !(matches(info.expected, c.classification) || isolated);
                    o.insert("classification_mismatch".into(), json!(u8::from(bad)));
                }
                rec
            }
            Err(e) => json!({"error": e.to_string()}),
        };
        report.push(merge(base(i, j, u, v), rec));
    }
    report.check("curvature law", "curvature_law_error", K_LAW_TOL);
    report.check("rho formula", "rho_error", RHO_TOL);
    if r.info.is_some() {
        report.check("expected classification", "classification_mismatch", 0.0);
    }
    Ok(report.finish())
}
