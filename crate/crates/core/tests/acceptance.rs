//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach stdout.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use gaussmap::ambient::{AmbientKind, CausalClass};
use gaussmap::calculus::{Rect, SurfaceChart};
use gaussmap::duality::*;
use gaussmap::forms::*;
use gaussmap::weierstrass::*;
use gaussmap::zoo::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn interior_points(d: Rect, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| d.lerp(rng.random_range(0.02..0.98), rng.random_range(0.02..0.98))).collect()
}

fn chart(key: &str) -> SurfaceChart {
    make_surface(&FamilyParams::new(key)).unwrap_or_else(|e| panic!("{key}: {e}"))
}

/// Collects the first few failures of a criterion.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        }
    }

    fn finish(self, summary: String) -> Outcome {
        if self.failures.is_empty() {
            Ok(format!("{summary}; {} checks", self.checks))
        } else {
            Err(self.failures.join("; "))
        }
    }
}

fn obata() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut worst = 0.0f64;
    for f in families() {
        let c = chart(f.key);
        for (u, v) in interior_points(c.domain(), 50, 101) {
            let r = chart_forms(&c, u, v).map(|(_, b)| obata_identity_residual(&b));
            let r = r.unwrap_or(f64::INFINITY);
            worst = worst.max(r);
            t.check(r <= 1e-9, || format!("{} at ({u:.3}, {v:.3}): {r:e}", f.key));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    t.check(families().len() >= 14, || "fewer than 14 families".into());
    t.check(secs < 5.0, || format!("took {secs:.2} s"));
    t.finish(format!("{} families, max residual {worst:.1e}, {secs:.2} s", families().len()))
}

fn classification() -> Outcome {
    let mut t = Tally::default();
    let mut conformal = 0;
    for f in families() {
        let c = chart(f.key);
        for (u, v) in interior_points(c.domain(), 20, 102) {
            let (_, b) = chart_forms(&c, u, v).unwrap();
            let rep = conformality_test(&b, DEFAULT_CONFORMAL_TOL);
            match f.expected {
                Expected::Conformal => {
                    t.check(rep.classification == Classification::Conformal, || {
                        format!("{}: {:?}", f.key, rep.classification)
                    });
                    let e = b.eta_t();
                    let law = match (f.space.kind(), f.space.causal_class()) {
                        (AmbientKind::Hyperbolic, _) => -1.0 + e * e,
                        (AmbientKind::DeSitter, CausalClass::SpaceLike) => 1.0 - e * e,
                        (AmbientKind::DeSitter, CausalClass::TimeLike) => 1.0 + e * e,
                    };
                    let k = b.k();
                    t.check((k - law).abs() <= 1e-9, || format!("{}: K = {k}, law {law}", f.key));
                }
                Expected::TotallyGeodesic => t
                    .check(rep.classification == Classification::TotallyGeodesicDegenerate, || {
                        format!("{}: {:?}", f.key, rep.classification)
                    }),
                Expected::NotConformal => t.check(rep.classification == Classification::NotConformal, || {
                    format!("{}: {:?}", f.key, rep.classification)
                }),
            }
        }
        conformal += (f.expected == Expected::Conformal) as usize;
    }
    for (key, want) in
        [("geodesic-plane-h3", Expected::TotallyGeodesic), ("control-paraboloid-h3", Expected::NotConformal)]
    {
        t.check(family(key).map(|f| f.expected == want).unwrap_or(false), || format!("{key} missing"));
    }
    t.finish(format!("{conformal} conformal families, plane and paraboloid control"))
}

fn rho_formula() -> Outcome {
    let mut t = Tally::default();
    let mut worst = 0.0f64;
    for f in families().iter().filter(|f| f.expected == Expected::Conformal) {
        let sign = match (f.space.kind(), f.space.causal_class()) {
            (AmbientKind::Hyperbolic, _) => -1.0,
            (AmbientKind::DeSitter, CausalClass::SpaceLike) => 1.0,
            _ => continue,
        };
        let c = chart(f.key);
        for (u, v) in interior_points(c.domain(), 20, 103) {
            let (_, b) = chart_forms(&c, u, v).unwrap();
            let shape = b.first.clone().try_inverse().unwrap() * &b.second;
            let h = shape.trace() / 2.0;
            let want = 2.0 * (h + sign * b.eta_t());
            let got = conformality_test(&b, DEFAULT_CONFORMAL_TOL).rho;
            let err = got.map(|r| (r - want).abs()).unwrap_or(f64::INFINITY);
            worst = worst.max(err);
            t.check(err <= 1e-8, || format!("{}: rho {got:?} vs {want}", f.key));
        }
    }
    t.finish(format!("max |rho - 2(H -+ eta3)| {worst:.1e}"))
}

fn dualizable() -> Vec<&'static str> {
    families()
        .iter()
        .filter(|f| f.expected != Expected::TotallyGeodesic && f.key != "ruled-7.4-cylinder")
        .map(|f| f.key)
        .collect()
}

fn close3(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
    a.iter().zip(b).all(|(p, q)| (p - q).abs() <= tol * (1.0 + q.abs()))
}

fn duality() -> Outcome {
    let mut t = Tally::default();
    let keys = dualizable();
    for key in &keys {
        let c = chart(key);
        let dual = dual_chart(&c).unwrap();
        let twice = dual_chart(&dual).unwrap();
        // time-like sources use K/(K-1); see the transfer notes in the README
        let dir = TransferDirection::for_source(&c.ambient());
        for (u, v) in interior_points(c.domain(), 50, 104) {
            let (_, src) = chart_forms(&c, u, v).unwrap();
            let (_, dst) = chart_forms(&dual, u, v).unwrap();
            let k = src.k();
            let want = match dir {
                TransferDirection::HtoDS => k / (k + 1.0),
                TransferDirection::DStoH => k / (1.0 - k),
                TransferDirection::DSTimelike => k / (k - 1.0),
            };
            if (k - dir.branch_curvature()).abs() > 1e-6 {
                // relative: beside a branch point K* is large
                let err = (dst.k() - want).abs() / want.abs().max(1.0);
                t.check(err <= 1e-8, || format!("{key}: K* = {} vs {want}", dst.k()));
            }
            let back = twice.position(u, v).unwrap();
            let x = c.position(u, v).unwrap();
            t.check(close3(back, x, 1e-8), || format!("{key}: double polar {back:?} vs {x:?}"));
            let a = conformality_test(&src, DEFAULT_CONFORMAL_TOL).is_conformal;
            let b = conformality_test(&dst, DEFAULT_CONFORMAL_TOL).is_conformal;
            t.check(a == b, || format!("{key} at ({u:.3}, {v:.3}): conformal {a} vs polar {b}"));
        }
    }
    let pairs: &[(&str, &[(&str, f64)])] = &[
        ("translational-6.6", &[("a", 1.0), ("b", 1.0)]),
        ("translational-6.6", &[("a", 2.0), ("b", 0.5)]),
        ("ruled-6.7", &[("c", 1.0)]),
        ("ruled-6.7", &[("c", -1.0)]),
        ("ruled-6.8", &[("c1", 1.0), ("c2", 1.0)]),
        ("ruled-6.8", &[("c1", 1.5), ("c2", 1.0)]),
        ("ruled-7.4-5", &[("c", 1.0)]),
        ("ruled-7.4-6", &[("c1", 1.0), ("c2", 1.0)]),
    ];
    let mut worst = 0.0f64;
    for (key, params) in pairs {
        let fp = params.iter().fold(FamilyParams::new(key), |fp, (k, v)| fp.with(k, *v));
        let c = make_surface(&fp).unwrap();
        let partner = polar_partner(&fp).unwrap().unwrap();
        let pts: Vec<[f64; 3]> = interior_points(c.domain(), 100, 105)
            .into_iter()
            .map(|(u, v)| polar_variety(&c, u, v).unwrap().position.xyz())
            .collect();
        let fit = fit_isometry(&pts, &partner.graph).unwrap();
        worst = worst.max(fit.max_residual);
        t.check(fit.max_residual <= 1e-6, || format!("{key} {params:?} -> {}: {fit:?}", partner.family.name));
    }
    t.finish(format!("{} dual pairs, {} family pairings (max fit residual {worst:.1e})", keys.len(), pairs.len()))
}

fn pde_solutions() -> Outcome {
    let mut t = Tally::default();
    let sets = [
        (h3_graph_solutions(), Some(GraphDuality::H3toDS3)),
        (ds3_graph_solutions(), Some(GraphDuality::DS3toH3)),
        (ds3_timelike_graph_solutions(), Some(GraphDuality::DS3toDS3)),
    ];
    let mut n = 0;
    for (sols, dir) in sets {
        for s in sols {
            n += 1;
            for (u, v) in interior_points(s.domain, 100, 106) {
                let r = graph_pde_residual(&s.expr, u, v, s.equation).unwrap().abs();
                t.check(r <= 1e-10, || format!("{}: residual {r:e}", s.name));
                let Some(dir) = dir else { continue };
                let r = dual_graph_residual(&s.expr, u, v, dir).map(f64::abs).unwrap_or(f64::INFINITY);
                t.check(r <= 1e-6, || format!("{}: dual residual {r:e}", s.name));
                // and back: the dual of the dual graph is the source point
                let j = match dual_graph_jet(&s.expr, u, v, dir) {
                    Ok(j) => j,
                    Err(e) => {
                        t.check(false, || format!("{} at ({u:.3}, {v:.3}): {e}", s.name));
                        continue;
                    }
                };
                let src = s.expr.jet(u, v).unwrap();
                let [fu, fv] = src.gradient();
                let p = graph_dualize(u, v, src.value(), fu, fv, dir).map(|q| q.xyz()).unwrap_or([f64::NAN; 3]);
                let [gu, gv] = j.gradient();
                let back_dir = match dir {
                    GraphDuality::H3toDS3 => GraphDuality::DS3toH3,
                    GraphDuality::DS3toH3 => GraphDuality::H3toDS3,
                    GraphDuality::DS3toDS3 => GraphDuality::DS3toDS3,
                };
                let back = graph_dualize(p[0], p[1], j.value(), gu, gv, back_dir).map(|q| q.xyz());
                let src = [u, v, src.value()];
                t.check(back.as_ref().map(|b| close3(*b, src, 1e-9)).unwrap_or(false), || {
                    format!("{}: round trip {back:?} vs {src:?}", s.name)
                });
            }
        }
    }
    t.finish(format!("{n} closed-form graph solutions"))
}

fn weierstrass() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::default();
    let prof = RadialProfile::default();
    let mut cont = vec![];
    let mut g_err = vec![];
    let mut eta_err = 0.0f64;
    for n in [17, 33, 65] {
        let grid = Grid::over(Rect::new(1.5, 2.5, 0.1, 0.9).unwrap(), n, n).unwrap();
        let g = ComplexField::sample(grid, FieldRole::NormalMap, |z| z).unwrap();
        let bd = ComplexField::sample(grid, FieldRole::DeSitterMap, |z| prof.big_g(z)).unwrap();
        let sol = solve_de_sitter_map(&g, &bd, WeierstrassCase::HoloOutside).unwrap();
        t.check(sol.linear_residual <= 1e-10, || format!("{n}: linear residual {:e}", sol.linear_residual));
        let s = (n - 1) / 16;
        let mut c = 0.0f64;
        for j in 2..=14 {
            for i in 2..=14 {
                let r = continuum_residual(&g, &sol.field, WeierstrassCase::HoloOutside, i * s, j * s).unwrap();
                c = c.max(r.norm());
            }
        }
        cont.push(c);
        if n == 17 {
            continue;
        }
        let b = build_surface(&g, &sol.field, WeierstrassCase::HoloOutside, BuildOptions::default()).unwrap();
        let (mut ident, mut ge) = (0.0f64, 0.0f64);
        for d in &b.diagnostics {
            let Some(p) = b.sample(d.i, d.j) else { continue };
            let x = p.xyz();
            let big = sol.field.at(d.i, d.j);
            let lhs = Complex64::new(x[0], x[1]) + g.at(d.i, d.j) * x[2];
            ident = ident.max((lhs - big).norm() / big.norm().max(1.0));
            if let Some(m) = d.measured {
                ge = ge.max((m.g - g.at(d.i, d.j)).norm());
                let z2 = g.at(d.i, d.j).norm_sqr();
                eta_err = eta_err.max((m.eta[2] - (1.0 + z2) / (z2 - 1.0)).abs());
            }
        }
        t.check(ident <= 1e-14, || format!("{n}: identity {ident:e}"));
        g_err.push(ge);
    }
    t.check(g_err[0] <= 3e-2 && g_err[1] < g_err[0], || format!("g recovery {g_err:?}"));
    t.check(eta_err <= 3e-2, || format!("eta3 error {eta_err:e}"));
    let orders: Vec<f64> = cont.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    t.check(orders.iter().all(|&o| o >= 1.9), || format!("continuum orders {orders:?}"));
    let secs = start.elapsed().as_secs_f64();
    t.check(secs < 60.0, || format!("took {secs:.1} s"));
    t.finish(format!(
        "orders {:.2}/{:.2}, g error {:.1e} -> {:.1e}, eta3 error {eta_err:.1e}, {secs:.1} s",
        orders[0], orders[1], g_err[0], g_err[1]
    ))
}

fn cross_validation() -> Outcome {
    let mut t = Tally::default();
    let (mut iv_worst, mut k_worst) = (0.0f64, 0.0f64);
    for f in families() {
        let c = chart(f.key);
        for (u, v) in interior_points(c.domain(), 10, 107) {
            let (_, b) = chart_forms(&c, u, v).unwrap();
            let iv = fourth_form_direct(&c, u, v).unwrap();
            let err = (&iv - &b.fourth).norm() / b.fourth.norm().max(1.0);
            iv_worst = iv_worst.max(err);
            t.check(err <= 1e-4, || format!("{}: IV {err:e}", f.key));
            if f.space.causal_class() == CausalClass::SpaceLike {
                let k = intrinsic_gauss_curvature(&c, u, v).unwrap();
                let e = (k - b.k()).abs();
                k_worst = k_worst.max(e);
                t.check(e <= 1e-3, || format!("{}: Brioschi {k} vs {}", f.key, b.k()));
            }
        }
    }
    t.finish(format!("IV agreement {iv_worst:.1e}, Brioschi agreement {k_worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("Obata identity", obata),
        ("conformality classification", classification),
        ("rho formula", rho_formula),
        ("duality", duality),
        ("PDE solutions", pde_solutions),
        ("Weierstrass representation", weierstrass),
        ("cross-validation", cross_validation),
    ];
    // `cargo test -- --list` and filters pass arguments we can ignore
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
