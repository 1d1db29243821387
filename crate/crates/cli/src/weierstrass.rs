use std::path::PathBuf;

use clap::Args;
use gaussmap::calculus::GraphExpr;
use gaussmap::weierstrass::{
    build_surface, solve_de_sitter_map, BuildOptions, ComplexField, DropReason, FieldRole, Grid, RadialProfile,
    WeierstrassCase, MAX_GRID,
};
use gaussmap::Error;
use num_complex::Complex64;
use serde_json::json;

use crate::csv::{write_points, PointRow};
use crate::input::{bad, parse_domain, parse_expr, Failure};
use crate::report::{base, merge, Report};

pub const LINEAR_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const G_TOL: f64 = 3e-2;
pub const ETA3_TOL: f64 = 3e-2;

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// builtin:z, builtin:inv-zbar or "RE;IM" in u and v.
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    /// 1: holomorphic g with |g| > 1; 2: antiholomorphic g with |g| < 1.
    #[arg(long, value_parser = ["1", "2"])]
    pub case: String,
    /// u0:u1:v0:v1
    #[arg(long, allow_hyphen_values = true)]
    pub domain: String,
    /// Nodes per side.
    #[arg(long)]
    pub grid: usize,
    /// Boundary values of G: builtin:radial, builtin:z or "RE;IM".
    #[arg(long, allow_hyphen_values = true)]
    pub boundary: String,
    /// Relative tolerance on the imaginary part of the height.
    #[arg(long)]
    pub realness_tol: Option<f64>,
    /// CSV of the built samples.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of the solved G field.
    #[arg(long)]
    pub field_out: Option<PathBuf>,
}

enum FieldSpec {
    Z,
    InvZbar,
    Radial(RadialProfile),
    Expr(GraphExpr, GraphExpr),
}

impl FieldSpec {
    fn parse(flag: &str, s: &str, builtins: &[&str]) -> Result<Self, Failure> {
        if let Some(name) = s.strip_prefix("builtin:") {
            if !builtins.contains(&name) {
                return Err(bad(flag, format!("unknown builtin `{name}` (expected one of {})", builtins.join(", "))));
            }
            return Ok(match name {
                "z" => FieldSpec::Z,
                "inv-zbar" => FieldSpec::InvZbar,
                _ => FieldSpec::Radial(RadialProfile::default()),
            });
        }
        let Some((re, im)) = s.split_once(';') else {
            return Err(bad(flag, format!("expected a builtin or \"RE;IM\", got `{s}`")));
        };
        Ok(FieldSpec::Expr(parse_expr(flag, re)?, parse_expr(flag, im)?))
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            FieldSpec::Z => z,
            FieldSpec::InvZbar => 1.0 / z.conj(),
            FieldSpec::Radial(p) => p.big_g(z),
            FieldSpec::Expr(re, im) => {
                let f = |e: &GraphExpr| e.eval_f64(z.re, z.im).unwrap_or(f64::NAN);
                Complex64::new(f(re), f(im))
            }
        }
    }

    fn sample(&self, flag: &str, grid: Grid, role: FieldRole) -> Result<ComplexField, Failure> {
        for (i, j) in grid.nodes() {
            let w = self.eval(grid.z(i, j));
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(bad(flag, format!("not finite at node ({i}, {j}), z = {}", grid.z(i, j))));
            }
        }
        ComplexField::sample(grid, role, |z| self.eval(z)).map_err(|e| bad(flag, e))
    }
}

fn reason(d: DropReason) -> &'static str {
    match d {
        DropReason::RatioNotPositive => "ratio-not-positive",
        DropReason::ModulusInequality => "modulus-inequality",
    }
}

pub fn build(args: &BuildArgs, mut report: Report) -> Result<Report, Failure> {
    let case = if args.case == "1" { WeierstrassCase::HoloOutside } else { WeierstrassCase::AntiholoInside };
    let rect = parse_domain("--domain", &args.domain)?;
    if !(3..=MAX_GRID).contains(&args.grid) {
        return Err(bad("--grid", format!("need 3 <= N <= {MAX_GRID}, got {}", args.grid)));
    }
    if let Some(t) = args.realness_tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(bad("--realness-tol", "must be positive"));
        }
    }
    let grid = Grid::over(rect, args.grid, args.grid).map_err(|e| bad("--grid", e))?;
    let g = FieldSpec::parse("--g", &args.g, &["z", "inv-zbar"])?.sample("--g", grid, FieldRole::NormalMap)?;
    let boundary = FieldSpec::parse("--boundary", &args.boundary, &["radial", "z"])?.sample(
        "--boundary",
        grid,
        FieldRole::DeSitterMap,
    )?;
    report.info("case", json!(case.label()));
    report.info("nodes", json!([grid.nu, grid.nv]));
    let sol = match solve_de_sitter_map(&g, &boundary, case) {
        Ok(s) => s,
        Err(e @ (Error::ConstraintViolation(_) | Error::UnitModulusSingularity { .. })) => return Err(bad("--g", e)),
        Err(e @ Error::SingularSystem(_)) => {
            report.push(json!({"error": e.to_string()}));
            return Ok(report.finish());
        }
        Err(e) => return Err(bad("--boundary", e)),
    };
    report.info("linear_residual", json!(sol.linear_residual));
    report.check_value("linear residual", sol.linear_residual, LINEAR_TOL);
    if let Some(path) = &args.field_out {
        std::fs::write(path, sol.field.to_csv()).map_err(|e| bad("--field-out", e))?;
    }
    let opts = BuildOptions { realness_tol: args.realness_tol };
    let built = match build_surface(&g, &sol.field, case, opts) {
        Ok(b) => b,
        Err(e) => {
            report.push(json!({"error": e.to_string()}));
            return Ok(report.finish());
        }
    };
    let mut rows = vec![];
    let (mut ratio_drops, mut modulus_drops, mut conformal) = (0, 0, 0.0f64);
    for d in &built.diagnostics {
        let (i, j) = (d.i, d.j);
        let (u, v) = (grid.u(i), grid.v(j));
        let x = built.sample(i, j).map(|p| p.xyz());
        rows.push(PointRow { i, j, u, v, x });
        let mut rec = json!({
            "x": x,
            "ratio": [d.ratio.re, d.ratio.im],
            "modulus_ratio": d.modulus_ratio,
            "compatibility_residual": d.residual,
            "eta3": d.eta3,
            "k": d.k,
            "dropped": d.dropped.map(reason),
        });
        match d.dropped {
            Some(DropReason::RatioNotPositive) => ratio_drops += 1,
            Some(DropReason::ModulusInequality) => modulus_drops += 1,
            None => {}
        }
        let o = rec.as_object_mut().expect("object");
        if let Some([x1, x2, x3]) = x {
            let (gz, big) = (g.at(i, j), sol.field.at(i, j));
            let lhs = Complex64::new(x1, x2) + gz * x3;
            o.insert("identity_error".into(), json!((lhs - big).norm() / big.norm().max(1.0)));
            if let Some(m) = d.measured {
                conformal = conformal.max(m.conformal_residual);
                o.insert("measured_g".into(), json!([m.g.re, m.g.im]));
                o.insert("measured_eta3".into(), json!(m.eta[2]));
                o.insert("measured_k".into(), json!(m.k));
                o.insert("g_error".into(), json!((m.g - gz).norm()));
                o.insert("eta3_error".into(), json!((m.eta[2] - d.eta3).abs()));
                o.insert("conformal_residual".into(), json!(m.conformal_residual));
            }
        }
        report.push(merge(base(i, j, u, v), rec));
    }
    report.info("kept", json!(built.kept()));
    report.info("dropped", json!({"ratio-not-positive": ratio_drops, "modulus-inequality": modulus_drops}));
    report.info("max_conformal_residual", json!(conformal));
    report.check("representation identity", "identity_error", IDENTITY_TOL);
    report.check("g recovered from the normal", "g_error", G_TOL);
    report.check("eta3 from g", "eta3_error", ETA3_TOL);
    if let Some(path) = &args.out {
        write_points(path, &rows).map_err(|e| bad("--out", e))?;
    }
    Ok(report.finish())
}
