//! Browser demo: classify a catalogue surface at a point, follow it to its
//! polar variety, and build the `g(z) = z` test surface.
//!
//! Every export returns a JSON string; the plain functions behind them are
//! ordinary Rust and are tested natively.

use gaussmap::calculus::{Rect, SurfaceChart};
use gaussmap::duality::{curvature_transfer, dual_chart, polar_variety, TransferDirection};
use gaussmap::forms::{
    chart_forms, conformal_curvature, conformality_test, obata_identity_residual, DEFAULT_CONFORMAL_TOL,
};
use gaussmap::weierstrass::{
    build_surface, solve_de_sitter_map, BuildOptions, ComplexField, FieldRole, Grid, RadialProfile, WeierstrassCase,
};
use gaussmap::zoo::{families, make_surface, FamilyParams};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// `"a=1, b=2"` into family parameters.
fn params(name: &str, list: &str) -> Result<FamilyParams, String> {
    let mut fp = FamilyParams::new(name);
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or(format!("expected name=value, got `{item}`"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("`{}` is not a number", v.trim()))?;
        fp = fp.with(k.trim(), v);
    }
    Ok(fp)
}

fn chart(name: &str, list: &str) -> Result<SurfaceChart, String> {
    make_surface(&params(name, list)?).map_err(|e| e.to_string())
}

pub fn family_list() -> String {
    let list: Vec<_> = families()
        .iter()
        .map(|f| {
            let d = f.domain;
            json!({
                "key": f.key,
                "summary": f.summary,
                "space": f.space.label(),
                "params": f.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect::<Vec<_>>().join(", "),
                "domain": [d.u0, d.u1, d.v0, d.v1],
            })
        })
        .collect();
    json!(list).to_string()
}

pub fn classify_point(name: &str, list: &str, u: f64, v: f64) -> Result<String, String> {
    let c = chart(name, list)?;
    let (_, b) = chart_forms(&c, u, v).map_err(|e| e.to_string())?;
    let r = conformality_test(&b, DEFAULT_CONFORMAL_TOL);
    Ok(json!({
        "x": b.x.iter().collect::<Vec<_>>(),
        "eta3": b.eta_t(),
        "mean_curvature": b.mean_curvature,
        "gauss_curvature": b.gauss_curvature,
        "curvature_law": conformal_curvature(&c.ambient(), b.eta_t()),
        "classification": r.classification.label(),
        "rho": r.rho,
        "obata_residual": obata_identity_residual(&b),
    })
    .to_string())
}

pub fn dualize_at(name: &str, list: &str, u: f64, v: f64) -> Result<String, String> {
    let c = chart(name, list)?;
    let p = polar_variety(&c, u, v).map_err(|e| e.to_string())?;
    let dual = dual_chart(&c).map_err(|e| e.to_string())?;
    let (_, b) = chart_forms(&dual, u, v).map_err(|e| e.to_string())?;
    let dir = TransferDirection::for_source(&c.ambient());
    Ok(json!({
        "polar": p.position.xyz(),
        "polar_space": dual.ambient().label(),
        "source_k": p.source_k,
        "polar_k": b.k(),
        "transfer_law": curvature_transfer(p.source_k, dir).ok(),
        "branch": p.branch_flag,
    })
    .to_string())
}

/// Solves for `G` with `g(z) = z` on `[1.5, 2.5] x [0.1, 0.9]` and reports
/// how well the built surface reproduces its data.
pub fn weierstrass_run(n: usize) -> Result<String, String> {
    let err = |e: gaussmap::Error| e.to_string();
    let rect = Rect::new(1.5, 2.5, 0.1, 0.9).map_err(err)?;
    let grid = Grid::over(rect, n, n).map_err(err)?;
    let prof = RadialProfile::default();
    let g = ComplexField::sample(grid, FieldRole::NormalMap, |z| z).map_err(err)?;
    let bd = ComplexField::sample(grid, FieldRole::DeSitterMap, |z| prof.big_g(z)).map_err(err)?;
    let case = WeierstrassCase::HoloOutside;
    let sol = solve_de_sitter_map(&g, &bd, case).map_err(err)?;
    let b = build_surface(&g, &sol.field, case, BuildOptions::default()).map_err(err)?;
    let (mut g_err, mut eta_err) = (0.0f64, 0.0f64);
    let mut points = vec![];
    for d in &b.diagnostics {
        if let Some(p) = b.sample(d.i, d.j) {
            points.push(p.xyz());
        }
        if let Some(m) = d.measured {
            g_err = g_err.max((m.g - g.at(d.i, d.j)).norm());
            eta_err = eta_err.max((m.eta[2] - d.eta3).abs());
        }
    }
    Ok(json!({
        "n": n,
        "linear_residual": sol.linear_residual,
        "kept": b.kept(),
        "g_error": g_err,
        "eta3_error": eta_err,
        "points": points,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn families_json() -> String {
    family_list()
}

#[wasm_bindgen]
pub fn classify(family: &str, params: &str, u: f64, v: f64) -> Result<String, JsValue> {
    classify_point(family, params, u, v).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn dualize(family: &str, params: &str, u: f64, v: f64) -> Result<String, JsValue> {
    dualize_at(family, params, u, v).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn weierstrass(n: usize) -> Result<String, JsValue> {
    weierstrass_run(n).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn lists_every_family() {
        assert_eq!(parse(&family_list()).as_array().unwrap().len(), families().len());
    }

    #[test]
    fn horosphere_is_conformal() {
        let r = parse(&classify_point("horosphere-h3", "h=2", 0.3, -0.1).unwrap());
        assert_eq!(r["classification"], "conformal");
        assert!((r["gauss_curvature"].as_f64().unwrap() - r["curvature_law"].as_f64().unwrap()).abs() < 1e-9);
        assert!(classify_point("horosphere-h3", "h", 0.0, 0.0).is_err());
        assert!(classify_point("nosuch", "", 0.0, 0.0).is_err());
    }

    #[test]
    fn polar_curvature_follows_the_law() {
        let r = parse(&dualize_at("translational-6.6", "a=1, b=1", 0.4, 0.6).unwrap());
        let (k, law) = (r["polar_k"].as_f64().unwrap(), r["transfer_law"].as_f64().unwrap());
        assert!((k - law).abs() <= 1e-8 * law.abs().max(1.0));
    }

    #[test]
    fn test_surface_keeps_every_sample() {
        let r = parse(&weierstrass_run(17).unwrap());
        assert_eq!(r["kept"], 17 * 17);
        assert!(r["linear_residual"].as_f64().unwrap() <= 1e-10);
        assert!(weierstrass_run(1).is_err());
    }
}
