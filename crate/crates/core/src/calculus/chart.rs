use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::expr::GraphExpr;
use super::taylor::Taylor;
use crate::ambient::{metric_at, AmbientSpace};
use crate::error::{Error, Result};

/// A surface whose position can be expanded to any order up to
/// [`super::taylor::MAX_ORDER`]. `u` and `v` are seeded variables
/// ([`Taylor::var_u`], [`Taylor::var_v`]) of a common order.
pub trait ExactSurface: Send + Sync + fmt::Debug {
    fn position(&self, u: Taylor, v: Taylor) -> Result<[Taylor; 3]>;
}

/// Position-only surface for the finite-difference evaluator.
pub type PositionFn = dyn Fn(f64, f64) -> Result<[f64; 3]> + Send + Sync;

#[derive(Clone)]
pub enum Evaluator {
    /// Built-in family with exact series.
    ClosedForm(Arc<dyn ExactSurface>),
    /// `(u, v, f(u, v))` with `f` differentiated automatically.
    Graph(GraphExpr),
    /// Any position map; derivatives by central differences.
    Numeric(Arc<PositionFn>),
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::ClosedForm(s) => write!(f, "ClosedForm({s:?})"),
            Evaluator::Graph(g) => write!(f, "Graph({g})"),
            Evaluator::Numeric(_) => f.write_str("Numeric(..)"),
        }
    }
}

/// Closed parameter rectangle `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Result<Self> {
        if !(u0 < u1 && v0 < v1) {
            return Err(Error::InvalidInput(format!("empty rectangle [{u0}, {u1}] x [{v0}, {v1}]")));
        }
        Ok(Rect { u0, u1, v0, v1 })
    }

    pub fn contains_interior(&self, u: f64, v: f64, margin: f64) -> bool {
        u > self.u0 + margin && u < self.u1 - margin && v > self.v0 + margin && v < self.v1 - margin
    }

    /// Maps `(s, t)` in the unit square into the rectangle.
    pub fn lerp(&self, s: f64, t: f64) -> (f64, f64) {
        (self.u0 + s * (self.u1 - self.u0), self.v0 + t * (self.v1 - self.v0))
    }
}

/// How the unit normal is oriented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalOrientation {
    /// `eta_(n+1) >= 0`; undefined where `eta_(n+1)` vanishes.
    #[default]
    UpperHalf,
    /// `eta_(n+1) <= 0`; undefined where `eta_(n+1)` vanishes.
    LowerHalf,
    /// The sign given by the parameter order (`x_u x x_v` for surfaces).
    Cross,
}

/// A parametric immersion over a rectangle.
#[derive(Debug, Clone)]
pub struct SurfaceChart {
    domain: Rect,
    evaluator: Evaluator,
    ambient: AmbientSpace,
    orientation: NormalOrientation,
}

/// Position, first and second partial derivatives of an immersion at one
/// parameter point. For an `n`-dimensional hypersurface in an `(n+1)`-space
/// `du` is `(n+1) x n` with columns `x_(u_k)`, and `duu[i]` has columns
/// `x_(u_i u_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub x: DVector<f64>,
    pub du: DMatrix<f64>,
    pub duu: Vec<DMatrix<f64>>,
}

impl Jet2 {
    pub fn new(x: DVector<f64>, du: DMatrix<f64>, duu: Vec<DMatrix<f64>>) -> Result<Self> {
        let m = x.len();
        let n = du.ncols();
        if du.nrows() != m || duu.len() != n || duu.iter().any(|d| d.nrows() != m || d.ncols() != n) {
            return Err(Error::InvalidInput("inconsistent jet dimensions".into()));
        }
        Ok(Jet2 { x, du, duu })
    }

    /// Reads the jet of a surface from order-2 (or higher) series.
    pub fn from_series(p: &[Taylor; 3]) -> Self {
        let x = DVector::from_iterator(3, p.iter().map(|t| t.value()));
        let du = DMatrix::from_fn(3, 2, |a, k| p[a].gradient()[k]);
        let duu = (0..2).map(|i| DMatrix::from_fn(3, 2, |a, j| p[a].hessian()[i][j])).collect();
        Jet2 { x, du, duu }
    }

    /// Parameter dimension `n`.
    pub fn n(&self) -> usize {
        self.du.ncols()
    }

    /// Ambient dimension `n + 1`.
    pub fn m(&self) -> usize {
        self.x.len()
    }

    /// Largest `|x_(u_i u_j) - x_(u_j u_i)|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.duu[i].column(j) - self.duu[j].column(i)).amax();
                worst = worst.max(d);
            }
        }
        worst
    }
}

const GRAM_TOL: f64 = 1e-12;

impl SurfaceChart {
    pub fn new(domain: Rect, evaluator: Evaluator, ambient: AmbientSpace) -> Result<Self> {
        if ambient.dim() != 3 {
            return Err(Error::InvalidInput("surface charts live in 3-dimensional spaces".into()));
        }
        Ok(SurfaceChart { domain, evaluator, ambient, orientation: NormalOrientation::UpperHalf })
    }

    pub fn graph(expr: GraphExpr, domain: Rect, ambient: AmbientSpace) -> Result<Self> {
        Self::new(domain, Evaluator::Graph(expr), ambient)
    }

    pub fn with_orientation(mut self, orientation: NormalOrientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = domain;
        self
    }

    /// The same surface with finite-difference derivatives.
    pub fn to_numeric(&self) -> SurfaceChart {
        let me = self.clone();
        let f = move |u: f64, v: f64| me.position(u, v);
        SurfaceChart { evaluator: Evaluator::Numeric(Arc::new(f)), ..self.clone() }
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn ambient(&self) -> AmbientSpace {
        self.ambient
    }

    pub fn orientation(&self) -> NormalOrientation {
        self.orientation
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn has_exact_jets(&self) -> bool {
        !matches!(self.evaluator, Evaluator::Numeric(_))
    }

    /// Position series of the given order; only for exact evaluators.
    pub fn series(&self, u: f64, v: f64, order: usize) -> Result<[Taylor; 3]> {
        let (tu, tv) = (Taylor::var_u(u, order), Taylor::var_v(v, order));
        let p = match &self.evaluator {
            Evaluator::ClosedForm(s) => s.position(tu, tv)?,
            Evaluator::Graph(g) => [tu, tv, g.eval(tu, tv)?],
            Evaluator::Numeric(_) => return Err(Error::InvalidInput("numeric charts have no exact series".into())),
        };
        if p.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain(format!("surface is not finite at ({u}, {v})")));
        }
        Ok(p)
    }

    /// Position without the domain check.
    pub fn position(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        match &self.evaluator {
            Evaluator::Numeric(f) => f(u, v),
            _ => Ok(self.series(u, v, 0)?.map(|t| t.value())),
        }
    }
}

fn fd_scale(u: f64, v: f64) -> f64 {
    1.0f64.max(u.abs()).max(v.abs())
}

/// Step for first partials in the numeric evaluator.
pub fn numeric_first_step(u: f64, v: f64) -> f64 {
    1e-5 * fd_scale(u, v)
}

/// Step for second partials in the numeric evaluator.
pub fn numeric_second_step(u: f64, v: f64) -> f64 {
    1e-3 * fd_scale(u, v)
}

fn numeric_jet(f: &PositionFn, u: f64, v: f64) -> Result<Jet2> {
    let h1 = numeric_first_step(u, v);
    let h2 = numeric_second_step(u, v);
    let at = |du: f64, dv: f64| -> Result<DVector<f64>> { Ok(DVector::from_column_slice(&f(u + du, v + dv)?)) };
    let x = at(0.0, 0.0)?;
    let xu = (at(h1, 0.0)? - at(-h1, 0.0)?) / (2.0 * h1);
    let xv = (at(0.0, h1)? - at(0.0, -h1)?) / (2.0 * h1);
    // 3x3 stencil
    let c = at(0.0, 0.0)?;
    let xuu = (at(h2, 0.0)? - &c * 2.0 + at(-h2, 0.0)?) / (h2 * h2);
    let xvv = (at(0.0, h2)? - &c * 2.0 + at(0.0, -h2)?) / (h2 * h2);
    let xuv = (at(h2, h2)? - at(h2, -h2)? - at(-h2, h2)? + at(-h2, -h2)?) / (4.0 * h2 * h2);
    let du = DMatrix::from_columns(&[xu, xv]);
    let duu = vec![DMatrix::from_columns(&[xuu, xuv.clone()]), DMatrix::from_columns(&[xuv, xvv])];
    Ok(Jet2 { x, du, duu })
}

/// Two-jet of the chart at an interior parameter point.
pub fn jet2_eval(chart: &SurfaceChart, u: f64, v: f64) -> Result<Jet2> {
    let margin = match chart.evaluator {
        Evaluator::Numeric(_) => 2.0 * numeric_second_step(u, v),
        _ => 0.0,
    };
    if !chart.domain.contains_interior(u, v, margin) {
        return Err(Error::OutsideDomain { u, v });
    }
    let jet = match &chart.evaluator {
        Evaluator::Numeric(f) => numeric_jet(f.as_ref(), u, v)?,
        _ => Jet2::from_series(&chart.series(u, v, 2)?),
    };
    check_immersion(&chart.ambient, &jet)?;
    Ok(jet)
}

/// Rejects non-positive heights and degenerate tangent planes.
pub fn check_immersion(space: &AmbientSpace, jet: &Jet2) -> Result<()> {
    let g = metric_at(space, jet.x.as_slice())?;
    let first = jet.du.transpose() * g * &jet.du;
    let det = first.determinant();
    if !det.is_finite() || det.abs() < GRAM_TOL {
        return Err(Error::NonImmersed(det.abs()));
    }
    Ok(())
}

/// `sum c_ij du^i dv^j` for series arguments `du`, `dv` with zero constant
/// terms.
pub fn substitute(p: &Taylor, du: &Taylor, dv: &Taylor) -> Taylor {
    let order = p.order().min(du.order()).min(dv.order());
    let mut upow = vec![Taylor::constant(1.0)];
    let mut vpow = vec![Taylor::constant(1.0)];
    for k in 1..=order {
        upow.push(upow[k - 1] * *du);
        vpow.push(vpow[k - 1] * *dv);
    }
    let mut acc = Taylor::constant(p.coeff(0, 0)).truncate(order);
    for d in 1..=order {
        for j in 0..=d {
            let c = p.coeff(d - j, j);
            if c != 0.0 {
                acc = acc + upow[d - j] * vpow[j] * c;
            }
        }
    }
    acc
}

/// Re-expresses a parametric surface as a graph `x3 = F(x1, x2)` near the base
/// point: returns the series of `F` in `(x1 - x1_0, x2 - x2_0)`, with the
/// same truncation order as the input.
pub fn reparametrize_as_graph(p: &[Taylor; 3]) -> Result<Taylor> {
    let order = p.iter().map(|t| t.order()).min().unwrap();
    let (a, b) = (p[0].gradient(), p[1].gradient());
    let det = a[0] * b[1] - a[1] * b[0];
    if det.abs() < 1e-14 {
        return Err(Error::NonImmersed(det.abs()));
    }
    // inverse of the linear part
    let inv = [[b[1] / det, -a[1] / det], [-b[0] / det, a[0] / det]];
    let dx = Taylor::var_u(0.0, order);
    let dy = Taylor::var_v(0.0, order);
    let nonlinear = |t: &Taylor| {
        let mut q = *t;
        q = q - t.value();
        let lin = Taylor::var_u(0.0, order) * t.gradient()[0] + Taylor::var_v(0.0, order) * t.gradient()[1];
        q - lin
    };
    let nx = nonlinear(&p[0]);
    let ny = nonlinear(&p[1]);
    let mut su = Taylor::constant(0.0).truncate(order);
    let mut sv = su;
    for _ in 0..=order {
        let rx = dx - substitute(&nx, &su, &sv);
        let ry = dy - substitute(&ny, &su, &sv);
        su = rx * inv[0][0] + ry * inv[0][1];
        sv = rx * inv[1][0] + ry * inv[1][1];
    }
    Ok(substitute(&p[2], &su, &sv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parse_graph_expr;

    #[test]
    fn horosphere_jet() {
        let f = parse_graph_expr("1").unwrap();
        let chart = SurfaceChart::graph(f, Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(), AmbientSpace::h3()).unwrap();
        let j = jet2_eval(&chart, 0.3, -0.2).unwrap();
        assert_eq!(j.x.as_slice(), &[0.3, -0.2, 1.0]);
        assert_eq!(j.du, DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
        assert!(j.duu.iter().all(|d| d.amax() == 0.0));
    }

    #[test]
    fn outside_domain_and_height() {
        let f = parse_graph_expr("u").unwrap();
        let chart = SurfaceChart::graph(f, Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(), AmbientSpace::h3()).unwrap();
        assert!(matches!(jet2_eval(&chart, 1.0, 0.0), Err(Error::OutsideDomain { .. })));
        assert!(matches!(jet2_eval(&chart, -0.5, 0.0), Err(Error::NonPositiveHeight(_))));
    }

    #[test]
    fn graph_reparametrization_recovers_graph() {
        // (s + t^2, t, s t) with x1 = s + t^2, x2 = t gives x3 = (x1 - x2^2) x2.
        let (s, t) = (0.4, 0.7);
        let order = 3;
        let su = Taylor::var_u(s, order);
        let tv = Taylor::var_v(t, order);
        let p = [su + tv * tv, tv, su * tv];
        let f = reparametrize_as_graph(&p).unwrap();
        let (x1, x2) = (s + t * t, t);
        assert!((f.value() - (x1 - x2 * x2) * x2).abs() < 1e-14);
        assert!((f.partial(1, 0) - x2).abs() < 1e-13);
        assert!((f.partial(0, 1) - (x1 - 3.0 * x2 * x2)).abs() < 1e-13);
        assert!((f.partial(1, 1) - 1.0).abs() < 1e-13);
        assert!((f.partial(0, 2) + 6.0 * x2).abs() < 1e-12);
        assert!(f.partial(2, 0).abs() < 1e-12);
        assert!((f.partial(0, 3) + 6.0).abs() < 1e-11);
    }
}
