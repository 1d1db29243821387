//! Polar varieties: the unit normal of a surface in `H3` (resp. `dS3`)
//! parallel-translated to the origin of Minkowski space is a point of the
//! dual quadric, giving a surface there.

use std::sync::Arc;

use crate::ambient::{
    pushforward_series, AmbientKind, AmbientSpace, CausalClass, ChartBranch, HalfSpacePoint, MinkowskiPoint, Sheet,
};
use crate::calculus::{
    cross3, jet2_eval, reparametrize_as_graph, Evaluator, ExactSurface, GraphExpr, Jet2, NormalOrientation,
    SurfaceChart, Taylor, MAX_ORDER,
};
use crate::error::{Error, Result};
use crate::forms::fundamental_forms_oriented;
use crate::zoo::GraphPde;

/// Space the polar variety of a surface in `space` lives in.
pub fn dual_space(space: &AmbientSpace) -> AmbientSpace {
    match (space.kind(), space.causal_class()) {
        (AmbientKind::Hyperbolic, _) => AmbientSpace::ds3(),
        (AmbientKind::DeSitter, CausalClass::SpaceLike) => AmbientSpace::h3(),
        (AmbientKind::DeSitter, CausalClass::TimeLike) => AmbientSpace::ds3_timelike(),
    }
}

/// Which curvature law applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferDirection {
    HtoDS,
    DStoH,
    DSTimelike,
}

impl TransferDirection {
    pub fn for_source(space: &AmbientSpace) -> Self {
        match (space.kind(), space.causal_class()) {
            (AmbientKind::Hyperbolic, _) => TransferDirection::HtoDS,
            (AmbientKind::DeSitter, CausalClass::SpaceLike) => TransferDirection::DStoH,
            (AmbientKind::DeSitter, CausalClass::TimeLike) => TransferDirection::DSTimelike,
        }
    }

    /// Curvature at which the polar variety branches.
    pub fn branch_curvature(self) -> f64 {
        match self {
            TransferDirection::HtoDS => -1.0,
            _ => 1.0,
        }
    }

    /// `dV_N / dV_X`.
    pub fn volume_ratio(self, k: f64) -> f64 {
        match self {
            TransferDirection::HtoDS => (k + 1.0).abs(),
            _ => (1.0 - k).abs(),
        }
    }
}

/// Curvature of the polar variety: `K/(K+1)` from `H3`, `K/(1-K)` from
/// space-like `dS3` surfaces and `K/(K-1)` from time-like ones.
///
/// In every case the shape operator of the polar is the inverse of the
/// source's; for time-like surfaces `K - 1 = det(shape)`, hence the last law.
pub fn curvature_transfer(k: f64, direction: TransferDirection) -> Result<f64> {
    let den = match direction {
        TransferDirection::HtoDS => k + 1.0,
        TransferDirection::DStoH => 1.0 - k,
        TransferDirection::DSTimelike => k - 1.0,
    };
    if den.abs() < 1e-12 {
        return Err(Error::BranchPoint(k));
    }
    Ok(k / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarPoint {
    /// The dual point in the half-space chart of the dual space.
    pub position: HalfSpacePoint,
    pub chart_branch: ChartBranch,
    /// The dual point on its quadric (for `H3` targets, on the sheet `X0 > 0`).
    pub minkowski: MinkowskiPoint,
    /// Image of the unit normal in Minkowski space before any sheet
    /// normalisation.
    pub normal: [f64; 4],
    /// The source point in Minkowski space.
    pub source_minkowski: [f64; 4],
    pub eta3: f64,
    pub source_k: f64,
    /// `None` at branch points.
    pub dual_k: Option<f64>,
    pub volume_ratio: f64,
    pub branch_flag: bool,
}

impl PolarPoint {
    /// `(N0 - N3) / (X3 - X0)`, which equals `eta_3`.
    pub fn eta3_from_minkowski(&self) -> f64 {
        let (n, x) = (self.normal, self.source_minkowski);
        (n[0] - n[3]) / (x[3] - x[0])
    }
}

/// Sheet parameter for de Sitter sources: points of the half-space chart
/// are read on `S_-`.
const DS_SOURCE_SIGMA: f64 = -1.0;

fn sigma_for(space: &AmbientSpace) -> f64 {
    match space.kind() {
        AmbientKind::Hyperbolic => 1.0,
        AmbientKind::DeSitter => DS_SOURCE_SIGMA,
    }
}

/// Orientation sign applied to `eps * (x_u x x_v) / sqrt|q|`.
fn orientation_sign(raw_eta3: f64, orientation: NormalOrientation) -> Result<f64> {
    match orientation {
        NormalOrientation::Cross => Ok(1.0),
        _ if raw_eta3.abs() <= 1e-12 => Err(Error::OrientationUndefined),
        NormalOrientation::UpperHalf => Ok(raw_eta3.signum()),
        NormalOrientation::LowerHalf => Ok(-raw_eta3.signum()),
    }
}

/// Polar variety of a surface given by position series of order `k + 1`;
/// returns the dual position series of order `k` together with the unflipped
/// Minkowski normal.
fn dual_series(
    space: &AmbientSpace,
    orientation: NormalOrientation,
    p: &[Taylor; 3],
) -> Result<([Taylor; 3], [Taylor; 4])> {
    let order = p.iter().map(|t| t.order()).min().unwrap();
    if order == 0 {
        return Err(Error::InvalidInput("polar variety needs first derivatives".into()));
    }
    let k = order - 1;
    let x = p.map(|t| t.truncate(k));
    let xu = p.map(|t| t.d_du());
    let xv = p.map(|t| t.d_dv());
    let c = cross3(&xu, &xv);
    let eps = [1.0, 1.0, space.epsilon(2)];
    let ec = [c[0] * eps[0], c[1] * eps[1], c[2] * eps[2]];
    let q = c[0] * c[0] * eps[0] + c[1] * c[1] * eps[1] + c[2] * c[2] * eps[2];
    if q.value().abs() < 1e-300 || q.value().signum() != space.normal_sign() {
        return Err(Error::WrongCausalClass(format!(
            "normal of the source has the wrong causal character for {}",
            space.label()
        )));
    }
    let r = if q.value() < 0.0 { (-q).sqrt() } else { q.sqrt() };
    let s = orientation_sign(ec[2].value() / r.value(), orientation)?;
    let w = ec.map(|e| e * x[2] * s / r);
    let n = pushforward_series(space.kind(), sigma_for(space), &x, &w);
    let d = n[0] - n[3];
    if d.value().abs() < 1e-12 {
        return Err(Error::EquatorialNormal((w[2] / x[2]).value().abs()));
    }
    let a = if d.value() < 0.0 { -d } else { d };
    Ok(([n[1] / a, n[2] / a, Taylor::constant(1.0) / a], n))
}

/// Polar variety of a surface over the parameter domain of its source.
#[derive(Debug, Clone)]
pub struct DualSurface {
    source: SurfaceChart,
}

impl DualSurface {
    pub fn new(source: SurfaceChart) -> Result<Self> {
        if !source.has_exact_jets() {
            return Err(Error::InvalidInput("series duals need a source with exact jets".into()));
        }
        Ok(DualSurface { source })
    }
}

impl ExactSurface for DualSurface {
    fn position(&self, u: Taylor, v: Taylor) -> Result<[Taylor; 3]> {
        let k = u.order().min(v.order());
        if k + 1 > MAX_ORDER {
            return Err(Error::InvalidInput(format!("dual jets are limited to order {}", MAX_ORDER - 1)));
        }
        let p = self.source.series(u.value(), v.value(), k + 1)?;
        Ok(dual_series(&self.source.ambient(), self.source.orientation(), &p)?.0)
    }
}

/// The polar variety as a chart of the dual space. Exact sources give exact
/// dual jets (up to order `MAX_ORDER - 1`); numeric sources give a numeric
/// chart.
pub fn dual_chart(chart: &SurfaceChart) -> Result<SurfaceChart> {
    let target = dual_space(&chart.ambient());
    let evaluator = if chart.has_exact_jets() {
        Evaluator::ClosedForm(Arc::new(DualSurface::new(chart.clone())?))
    } else {
        let src = chart.clone();
        Evaluator::Numeric(Arc::new(move |u, v| {
            let jet = jet2_eval(&src, u, v)?;
            Ok(polar_point_of_jet(&jet, &src.ambient(), src.orientation())?.position.xyz())
        }))
    };
    SurfaceChart::new(chart.domain(), evaluator, target)
}

const BRANCH_TOL: f64 = 1e-6;

/// Polar point from a two-jet.
pub fn polar_point_of_jet(jet: &Jet2, space: &AmbientSpace, orientation: NormalOrientation) -> Result<PolarPoint> {
    if space.dim() != 3 {
        return Err(Error::InvalidInput("polar varieties are defined for surfaces".into()));
    }
    let bundle = fundamental_forms_oriented(jet, space, orientation)?;
    let eta3 = bundle.eta_t();
    if eta3.abs() < 1e-12 {
        return Err(Error::EquatorialNormal(eta3.abs()));
    }
    let series: [Taylor; 3] = std::array::from_fn(|a| {
        Taylor::constant(jet.x[a]).truncate(1)
            + Taylor::var_u(0.0, 1) * jet.du[(a, 0)]
            + Taylor::var_v(0.0, 1) * jet.du[(a, 1)]
    });
    let (pos, n) = dual_series(space, orientation, &series)?;
    let normal = n.map(|t| t.value());
    let dual = dual_space(space);
    let position = HalfSpacePoint::new(pos.map(|t| t.value()).to_vec())?;
    let chart_branch = match dual.kind() {
        AmbientKind::Hyperbolic => ChartBranch::Hyperbolic,
        AmbientKind::DeSitter if normal[0] - normal[3] < 0.0 => ChartBranch::SMinus,
        AmbientKind::DeSitter => ChartBranch::SPlus,
    };
    let minkowski = match dual.kind() {
        AmbientKind::Hyperbolic => {
            let s = normal[0].signum();
            MinkowskiPoint::new(normal.map(|x| s * x), Sheet::HQuadric)?
        }
        AmbientKind::DeSitter => MinkowskiPoint::new(normal, Sheet::DSQuadric)?,
    };
    let source = HalfSpacePoint::new(jet.x.iter().copied().collect())?;
    let src_branch = match space.kind() {
        AmbientKind::Hyperbolic => ChartBranch::Hyperbolic,
        AmbientKind::DeSitter => ChartBranch::SMinus,
    };
    let source_minkowski = crate::ambient::half_space_to_minkowski(space, &source, src_branch)?.coords();
    let direction = TransferDirection::for_source(space);
    let source_k = bundle.k();
    let branch_flag =
        (source_k - direction.branch_curvature()).abs() < BRANCH_TOL || bundle.second.determinant().abs() < 1e-10;
    let dual_k = if branch_flag { None } else { curvature_transfer(source_k, direction).ok() };
    Ok(PolarPoint {
        position,
        chart_branch,
        minkowski,
        normal,
        source_minkowski,
        eta3,
        source_k,
        dual_k,
        volume_ratio: direction.volume_ratio(source_k),
        branch_flag,
    })
}

/// Polar point of a chart at a parameter point.
pub fn polar_variety(chart: &SurfaceChart, u: f64, v: f64) -> Result<PolarPoint> {
    let jet = jet2_eval(chart, u, v)?;
    polar_point_of_jet(&jet, &chart.ambient(), chart.orientation())
}

/// Graph-level duality between the two graph equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphDuality {
    /// `(-f f_u - u, -f f_v - v, f sqrt(1 + f_u^2 + f_v^2))`
    H3toDS3,
    /// `(f f_u - u, f f_v - v, f sqrt(1 - f_u^2 - f_v^2))`
    DS3toH3,
    /// `(f f_u - u, f f_v - v, f sqrt(f_u^2 + f_v^2 - 1))`
    DS3toDS3,
}

impl GraphDuality {
    /// Equation solved by graphs on the target side.
    pub fn target_equation(self) -> GraphPde {
        match self {
            GraphDuality::DS3toH3 => GraphPde::H3Eq61,
            _ => GraphPde::Ds3Eq62,
        }
    }

    fn check(self, f: f64, fu: f64, fv: f64) -> Result<()> {
        if f <= 0.0 {
            return Err(Error::NonPositiveHeight(f));
        }
        let g = fu * fu + fv * fv;
        match self {
            GraphDuality::DS3toH3 if g >= 1.0 => {
                Err(Error::CausalityViolation(format!("f_u^2 + f_v^2 = {g} must be < 1")))
            }
            GraphDuality::DS3toDS3 if g <= 1.0 => {
                Err(Error::CausalityViolation(format!("f_u^2 + f_v^2 = {g} must be > 1")))
            }
            _ => Ok(()),
        }
    }
}

/// Dual point of the graph `(u, v, f)` from its value and gradient.
pub fn graph_dualize(u: f64, v: f64, f: f64, fu: f64, fv: f64, direction: GraphDuality) -> Result<HalfSpacePoint> {
    direction.check(f, fu, fv)?;
    let g = fu * fu + fv * fv;
    let p = match direction {
        GraphDuality::H3toDS3 => [-f * fu - u, -f * fv - v, f * (1.0 + g).sqrt()],
        GraphDuality::DS3toH3 => [f * fu - u, f * fv - v, f * (1.0 - g).sqrt()],
        GraphDuality::DS3toDS3 => [f * fu - u, f * fv - v, f * (g - 1.0).sqrt()],
    };
    HalfSpacePoint::new(p.to_vec())
}

/// The dual graph as a function of the dual coordinates near the image of
/// `(u, v)`: returns the order-2 series of `F(x1, x2)` whose graph is the
/// dual surface.
pub fn dual_graph_jet(f: &GraphExpr, u: f64, v: f64, direction: GraphDuality) -> Result<Taylor> {
    let tu = Taylor::var_u(u, 3);
    let tv = Taylor::var_v(v, 3);
    let ft = f.eval(tu, tv)?;
    let (fu, fv) = (ft.d_du(), ft.d_dv());
    direction.check(ft.value(), fu.value(), fv.value())?;
    let (tu, tv, ft) = (tu.truncate(2), tv.truncate(2), ft.truncate(2));
    let g = fu * fu + fv * fv;
    let p = match direction {
        GraphDuality::H3toDS3 => [-(ft * fu) - tu, -(ft * fv) - tv, ft * (g + 1.0).sqrt()],
        GraphDuality::DS3toH3 => [ft * fu - tu, ft * fv - tv, ft * (1.0 - g).sqrt()],
        GraphDuality::DS3toDS3 => [ft * fu - tu, ft * fv - tv, ft * (g - 1.0).sqrt()],
    };
    reparametrize_as_graph(&p)
}

/// Residual of the target-side graph equation for the dual of `f` at the
/// image of `(u, v)`.
pub fn dual_graph_residual(f: &GraphExpr, u: f64, v: f64, direction: GraphDuality) -> Result<f64> {
    Ok(direction.target_equation().residual_of(&dual_graph_jet(f, u, v, direction)?))
}

/// Result of fitting `(x1, x2) -> R_theta (x1, x2) + (a, b)` that carries a
/// point set onto a target graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryFit {
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    /// Largest `|x3 - F(x1', x2')|` after the motion.
    pub max_residual: f64,
}

/// Fits the motion over `theta` in `{pi/2, -pi/2}` and continuous `(a, b)` by
/// Gauss-Newton on the vertical residuals.
pub fn fit_isometry(points: &[[f64; 3]], target: &GraphExpr) -> Result<IsometryFit> {
    if points.is_empty() {
        return Err(Error::EmptyOutput);
    }
    let mut best: Option<IsometryFit> = None;
    for theta in [std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2] {
        let (s, c) = theta.sin_cos();
        let rotated: Vec<[f64; 3]> = points.iter().map(|p| [p[0] * c - p[1] * s, p[0] * s + p[1] * c, p[2]]).collect();
        let (mut a, mut b) = (0.0, 0.0);
        let mut worst = f64::INFINITY;
        for _ in 0..50 {
            // normal equations of the 2-parameter least squares problem
            let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
            let mut max_r = 0.0f64;
            let mut ok = true;
            for p in &rotated {
                let jet = match target.eval(Taylor::var_u(p[0] + a, 1), Taylor::var_v(p[1] + b, 1)) {
                    Ok(j) => j,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                };
                let r = p[2] - jet.value();
                let g = jet.gradient();
                max_r = max_r.max(r.abs());
                for i in 0..2 {
                    jtr[i] += g[i] * r;
                    for j in 0..2 {
                        jtj[i][j] += g[i] * g[j];
                    }
                }
            }
            if !ok {
                max_r = f64::INFINITY;
                worst = max_r;
                break;
            }
            worst = max_r;
            let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let da = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
            let db = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
            a += da;
            b += db;
            if da.abs().max(db.abs()) < 1e-15 {
                break;
            }
        }
        let fit = IsometryFit { theta, a, b, max_residual: worst };
        if best.is_none_or(|f| fit.max_residual < f.max_residual) {
            best = Some(fit);
        }
    }
    Ok(best.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{parse_graph_expr, Rect};

    #[test]
    fn horosphere_polar_point() {
        let f = parse_graph_expr("1").unwrap();
        let c = SurfaceChart::graph(f, Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(), AmbientSpace::h3()).unwrap();
        let p = polar_variety(&c, 0.3, -0.4).unwrap();
        let x = p.position.xyz();
        assert!((x[0] + 0.3).abs() < 1e-15 && (x[1] - 0.4).abs() < 1e-15 && (x[2] - 1.0).abs() < 1e-15);
        assert_eq!(p.chart_branch, ChartBranch::SMinus);
        assert_eq!(p.dual_k, Some(0.0));
        assert_eq!(p.volume_ratio, 1.0);
        assert!((p.eta3_from_minkowski() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transfer_examples() {
        assert_eq!(curvature_transfer(0.0, TransferDirection::HtoDS).unwrap(), 0.0);
        assert_eq!(curvature_transfer(3.0, TransferDirection::DStoH).unwrap(), -1.5);
        assert_eq!(curvature_transfer(-1.0, TransferDirection::HtoDS), Err(Error::BranchPoint(-1.0)));
    }

    #[test]
    fn graph_dualize_examples() {
        let p = graph_dualize(0.3, 0.2, 1.0, 0.0, 0.0, GraphDuality::H3toDS3).unwrap();
        assert_eq!(p.xyz(), [-0.3, -0.2, 1.0]);
        assert!(matches!(
            graph_dualize(0.3, 0.2, 1.0, 0.0, 0.0, GraphDuality::DS3toDS3),
            Err(Error::CausalityViolation(_))
        ));
        let p = graph_dualize(0.0, 0.0, 2.0, 0.0, 0.0, GraphDuality::DS3toH3).unwrap();
        assert_eq!(p.xyz(), [0.0, 0.0, 2.0]);
    }
}
