//! Catalogue of explicit surfaces: umbilic references, the translational and
//! ruled surfaces with conformal normal Gauss map, and the residuals of the
//! two graph equations they solve.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::ambient::AmbientSpace;
use crate::calculus::{
    parse_graph_expr, Evaluator, ExactSurface, GraphExpr, NormalOrientation, Rect, SurfaceChart, Taylor,
};
use crate::error::{Error, Result};
use crate::forms::fundamental_forms_oriented;

/// What [`crate::forms::conformality_test`] should report on a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Conformal,
    TotallyGeodesic,
    NotConformal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    /// Must the parameter be nonzero?
    pub nonzero: bool,
    /// Must the parameter be positive?
    pub positive: bool,
}

const fn p(name: &'static str, default: f64) -> ParamSpec {
    ParamSpec { name, default, nonzero: false, positive: false }
}

const fn nz(name: &'static str, default: f64) -> ParamSpec {
    ParamSpec { name, default, nonzero: true, positive: false }
}

const fn pos(name: &'static str, default: f64) -> ParamSpec {
    ParamSpec { name, default, nonzero: true, positive: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Horosphere,
    VerticalPlane,
    Paraboloid,
    Equidistant,
    Trans66,
    Ruled67,
    Ruled68,
    PlaneDs,
    Trans63Plus,
    Trans63Minus,
    Trans64,
    Ruled62_2,
    Ruled62_3,
    Cor62Plus,
    Cor62Minus,
    T731Plus,
    T731Minus,
    T732Plus,
    T732Minus,
    T733Plus,
    T733Minus,
    T734,
    FlahertyPlus,
    FlahertyMinus,
    Cylinder,
    Ruled74_3,
    Ruled74_4,
    Ruled74_5,
    Ruled74_6,
    Flaherty74,
    Cor74Plus,
    Cor74Minus,
}

/// A registered family with its parameter schema and default domain.
#[derive(Debug, Clone, Copy)]
pub struct FamilyInfo {
    pub key: &'static str,
    pub summary: &'static str,
    pub space: AmbientSpace,
    pub params: &'static [ParamSpec],
    pub domain: Rect,
    pub expected: Expected,
    /// Default curve `psi(v)` for families that take one.
    pub curve: Option<&'static str>,
    shape: Shape,
}

impl FamilyInfo {
    pub fn takes_curve(&self) -> bool {
        self.curve.is_some()
    }
}

const fn rect(u0: f64, u1: f64, v0: f64, v1: f64) -> Rect {
    Rect { u0, u1, v0, v1 }
}

/// Shipped choices of `psi` for the Flaherty graphs.
pub const FLAHERTY_PSI: [&str; 3] = ["v", "sinh(v)", "v + v^3/3"];

macro_rules! fam {
    ($key:expr, $summary:expr, $space:expr, $params:expr, $domain:expr, $expected:expr, $shape:ident) => {
        FamilyInfo {
            key: $key,
            summary: $summary,
            space: $space,
            params: $params,
            domain: $domain,
            expected: $expected,
            curve: None,
            shape: Shape::$shape,
        }
    };
}

const H3: AmbientSpace = AmbientSpace::h3();
const DS3: AmbientSpace = AmbientSpace::ds3();
const DS3T: AmbientSpace = AmbientSpace::ds3_timelike();
const C: Expected = Expected::Conformal;
const E: f64 = 0.1;

static FAMILIES: [FamilyInfo; 33] = [
    fam!("horosphere-h3", "x3 = h in H3", H3, &[pos("h", 1.0)], rect(-1.0, 1.0, -1.0, 1.0), C, Horosphere),
    fam!(
        "geodesic-plane-h3",
        "vertical plane (u, 0, v) in H3",
        H3,
        &[],
        rect(-1.0, 1.0, 0.5, 2.0),
        Expected::TotallyGeodesic,
        VerticalPlane
    ),
    fam!("equidistant-h3", "graph x3 = m u in H3", H3, &[pos("m", 1.0)], rect(0.2, 2.0, -1.0, 1.0), C, Equidistant),
    fam!(
        "control-paraboloid-h3",
        "graph x3 = 1 + u^2 + v^2 in H3",
        H3,
        &[],
        rect(-0.3, 0.3, -0.3, 0.3),
        Expected::NotConformal,
        Paraboloid
    ),
    fam!(
        "translational-6.6",
        "(a cos u, b cos v, a sin u + b sin v) in H3",
        H3,
        &[pos("a", 1.0), pos("b", 1.0)],
        rect(E, PI - E, E, PI - E),
        C,
        Trans66
    ),
    fam!(
        "ruled-6.7",
        "(u cos v, c sin v, u sin v) in H3",
        H3,
        &[nz("c", 1.0)],
        rect(0.2, 2.0, E, FRAC_PI_2 - E),
        C,
        Ruled67
    ),
    fam!(
        "ruled-6.8",
        "(-c2 sin v + u cos v, c1 sin v, c2 cos v + u sin v) in H3",
        H3,
        &[nz("c1", 1.0), nz("c2", 1.0)],
        rect(0.2, 2.0, E, FRAC_PI_2 - E),
        C,
        Ruled68
    ),
    fam!("horosphere-ds3", "x3 = h in dS3", DS3, &[pos("h", 1.0)], rect(-1.0, 1.0, -1.0, 1.0), C, Horosphere),
    fam!(
        "plane-ds3",
        "space-like plane x3 = 1 + m u, |m| < 1",
        DS3,
        &[p("m", 0.5)],
        rect(-1.0, 1.0, -1.0, 1.0),
        C,
        PlaneDs
    ),
    fam!(
        "translational-6.3-plus",
        "graph sqrt(a^2+u^2) + sqrt(b^2+v^2) in dS3",
        DS3,
        &[nz("a", 1.0), nz("b", 1.0)],
        rect(-0.6, 0.6, -0.6, 0.6),
        C,
        Trans63Plus
    ),
    fam!(
        "translational-6.3-minus",
        "graph sqrt(a^2+u^2) - sqrt(b^2+v^2) in dS3",
        DS3,
        &[nz("a", 2.0), nz("b", 1.0)],
        rect(-0.6, 0.6, -0.6, 0.6),
        C,
        Trans63Minus
    ),
    fam!(
        "translational-6.4",
        "(a sinh u, b sinh v, a cosh u + b cosh v) in dS3",
        DS3,
        &[pos("a", 1.0), pos("b", 1.0)],
        rect(-0.7, 0.7, -0.7, 0.7),
        C,
        Trans64
    ),
    fam!(
        "ruled-6.2-2",
        "(u cosh v, c sinh v, u sinh v) in dS3",
        DS3,
        &[nz("c", 1.0)],
        rect(0.2, 1.1, 0.5, 2.0),
        C,
        Ruled62_2
    ),
    fam!(
        "ruled-6.2-3",
        "(c2 sinh v + u cosh v, c1 sinh v, c2 cosh v + u sinh v) in dS3",
        DS3,
        &[nz("c1", 1.0), nz("c2", 1.0)],
        rect(0.2, 1.1, 0.5, 2.0),
        C,
        Ruled62_3
    ),
    fam!(
        "corollary-6.2-plus",
        "graph (c1 c2 + u v)/sqrt(c1^2 + v^2) in dS3",
        DS3,
        &[nz("c1", 1.0), p("c2", 1.0)],
        rect(0.1, 0.9, 0.1, 0.9),
        C,
        Cor62Plus
    ),
    fam!(
        "corollary-6.2-minus",
        "graph -(c1 c2 + u v)/sqrt(c1^2 + v^2) in dS3",
        DS3,
        &[nz("c1", 1.0), p("c2", -1.0)],
        rect(0.1, 0.5, 0.1, 0.5),
        C,
        Cor62Minus
    ),
    fam!(
        "translational-7.3-1-plus",
        "time-like graph sqrt(u^2+a^2) + sqrt(v^2+b^2)",
        DS3T,
        &[nz("a", 1.0), nz("b", 1.0)],
        rect(2.0, 4.0, 2.0, 4.0),
        C,
        T731Plus
    ),
    fam!(
        "translational-7.3-1-minus",
        "time-like graph sqrt(u^2+a^2) - sqrt(v^2+b^2)",
        DS3T,
        &[nz("a", 1.0), nz("b", 1.0)],
        rect(3.0, 5.0, 1.5, 2.5),
        C,
        T731Minus
    ),
    fam!(
        "translational-7.3-2-plus",
        "time-like graph sqrt(u^2-a^2) + sqrt(v^2-b^2)",
        DS3T,
        &[nz("a", 1.0), nz("b", 1.0)],
        rect(1.2, 3.0, 1.2, 3.0),
        C,
        T732Plus
    ),
    fam!(
        "translational-7.3-2-minus",
        "time-like graph sqrt(u^2-a^2) - sqrt(v^2-b^2)",
        DS3T,
        &[nz("a", 1.0), nz("b", 1.0)],
        rect(2.5, 4.0, 1.2, 2.2),
        C,
        T732Minus
    ),
    fam!(
        "translational-7.3-3-plus",
        "time-like graph sqrt(u^2+a^2) + sqrt(v^2-b^2)",
        DS3T,
        &[nz("a", 1.0), nz("b", 1.0)],
        rect(0.5, 2.0, 1.2, 3.0),
        C,
        T733Plus
    ),
    fam!(
        "translational-7.3-3-minus",
        "time-like graph sqrt(u^2+a^2) - sqrt(v^2-b^2)",
        DS3T,
        &[nz("a", 1.0), nz("b", 1.0)],
        rect(1.5, 3.0, 1.2, 2.0),
        C,
        T733Minus
    ),
    fam!(
        "translational-7.3-4",
        "time-like graph sqrt(u^2-a^2) - sqrt(v^2+b^2)",
        DS3T,
        &[nz("a", 1.0), nz("b", 1.0)],
        rect(3.0, 4.0, 0.5, 2.0),
        C,
        T734
    ),
    FamilyInfo {
        curve: Some(FLAHERTY_PSI[0]),
        ..fam!("flaherty-plus", "time-like graph u + psi(v)", DS3T, &[], rect(1.0, 2.0, 0.1, 1.0), C, FlahertyPlus)
    },
    FamilyInfo {
        curve: Some(FLAHERTY_PSI[0]),
        ..fam!("flaherty-minus", "time-like graph -u + psi(v)", DS3T, &[], rect(-2.0, -1.0, 0.1, 1.0), C, FlahertyMinus)
    },
    fam!(
        "ruled-7.4-cylinder",
        "(r cos v, r sin v, u): circle plus vertical rulings",
        DS3T,
        &[pos("r", 1.0)],
        rect(0.5, 2.0, 0.1, 1.5),
        C,
        Cylinder
    ),
    fam!(
        "ruled-7.4-3",
        "time-like (u cosh v, c sinh v, u sinh v)",
        DS3T,
        &[nz("c", 1.0)],
        rect(1.8, 3.0, 0.2, 1.0),
        C,
        Ruled74_3
    ),
    fam!(
        "ruled-7.4-4",
        "time-like (c2 sinh v + u cosh v, c1 sinh v, c2 cosh v + u sinh v)",
        DS3T,
        &[nz("c1", 1.0), nz("c2", 1.0)],
        rect(1.8, 3.0, 0.2, 1.0),
        C,
        Ruled74_4
    ),
    fam!(
        "ruled-7.4-5",
        "(u sinh v, c cosh v, u cosh v)",
        DS3T,
        &[nz("c", 1.0)],
        rect(0.2, 2.0, 0.2, 2.0),
        C,
        Ruled74_5
    ),
    fam!(
        "ruled-7.4-6",
        "(c2 cosh v + u sinh v, c1 cosh v, c2 sinh v + u cosh v)",
        DS3T,
        &[nz("c1", 1.0), nz("c2", 1.0)],
        rect(0.2, 2.0, 0.2, 2.0),
        C,
        Ruled74_6
    ),
    fam!(
        "ruled-7.4-flaherty",
        "(u - v, v^2/2, u): null rulings (1, 0, 1)",
        DS3T,
        &[],
        rect(0.5, 2.0, 0.2, 2.0),
        C,
        Flaherty74
    ),
    fam!(
        "corollary-7.4-plus",
        "time-like graph (c1 c2 - u v)/sqrt(v^2 - c1^2)",
        DS3T,
        &[nz("c1", 1.0), p("c2", 1.0)],
        rect(-1.0, 0.3, 1.2, 2.0),
        C,
        Cor74Plus
    ),
    fam!(
        "corollary-7.4-minus",
        "time-like graph -(c1 c2 - u v)/sqrt(v^2 - c1^2)",
        DS3T,
        &[nz("c1", 1.0), p("c2", 1.0)],
        rect(1.0, 2.0, 1.2, 2.0),
        C,
        Cor74Minus
    ),
];

/// Every registered family, in a stable order.
pub fn families() -> &'static [FamilyInfo] {
    &FAMILIES
}

pub fn family(key: &str) -> Result<&'static FamilyInfo> {
    let key = match key {
        "translational-6.3" => "translational-6.3-plus",
        k => k,
    };
    FAMILIES.iter().find(|f| f.key == key).ok_or_else(|| Error::UnknownFamily(key.to_string()))
}

/// A request for a family member.
#[derive(Debug, Clone, Default)]
pub struct FamilyParams {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub orientation_override: Option<NormalOrientation>,
    /// `psi(v)` for the Flaherty graphs.
    pub curve: Option<GraphExpr>,
    pub domain: Option<Rect>,
}

impl FamilyParams {
    pub fn new(name: &str) -> Self {
        FamilyParams { name: name.to_string(), ..Default::default() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn with_curve(mut self, curve: GraphExpr) -> Self {
        self.curve = Some(curve);
        self
    }
}

#[derive(Debug)]
struct GraphSurface(GraphExpr);

impl ExactSurface for GraphSurface {
    fn position(&self, u: Taylor, v: Taylor) -> Result<[Taylor; 3]> {
        Ok([u, v, self.0.eval(u, v)?])
    }
}

#[derive(Debug)]
struct Parametric {
    shape: Shape,
    p: [f64; 2],
}

impl ExactSurface for Parametric {
    fn position(&self, u: Taylor, v: Taylor) -> Result<[Taylor; 3]> {
        let k = |x: f64| Taylor::constant(x).truncate(u.order());
        let [p0, p1] = self.p;
        Ok(match self.shape {
            Shape::Horosphere => [u, v, k(p0)],
            Shape::VerticalPlane => [u, k(0.0), v],
            Shape::Trans66 => [u.cos() * p0, v.cos() * p1, u.sin() * p0 + v.sin() * p1],
            Shape::Ruled67 => [u * v.cos(), v.sin() * p0, u * v.sin()],
            Shape::Ruled68 => {
                let (c1, c2) = (p0, p1);
                [u * v.cos() - v.sin() * c2, v.sin() * c1, v.cos() * c2 + u * v.sin()]
            }
            Shape::Trans64 => [u.sinh() * p0, v.sinh() * p1, u.cosh() * p0 + v.cosh() * p1],
            Shape::Ruled62_2 | Shape::Ruled74_3 => [u * v.cosh(), v.sinh() * p0, u * v.sinh()],
            Shape::Ruled62_3 | Shape::Ruled74_4 => {
                let (c1, c2) = (p0, p1);
                [v.sinh() * c2 + u * v.cosh(), v.sinh() * c1, v.cosh() * c2 + u * v.sinh()]
            }
            Shape::Ruled74_5 => [u * v.sinh(), v.cosh() * p0, u * v.cosh()],
            Shape::Ruled74_6 => {
                let (c1, c2) = (p0, p1);
                [v.cosh() * c2 + u * v.sinh(), v.cosh() * c1, v.sinh() * c2 + u * v.cosh()]
            }
            Shape::Cylinder => [v.cos() * p0, v.sin() * p0, u],
            Shape::Flaherty74 => [u - v, v * v * 0.5, u],
            _ => unreachable!("graph families are evaluated as expressions"),
        })
    }
}

fn num(x: f64) -> String {
    format!("({x:?})")
}

fn graph_source(shape: Shape, get: &dyn Fn(&str) -> f64, curve: &str) -> Option<String> {
    let (a, b) = (|| num(get("a")), || num(get("b")));
    let (c1, c2) = (|| num(get("c1")), || num(get("c2")));
    Some(match shape {
        Shape::Paraboloid => "1 + u^2 + v^2".into(),
        Shape::Equidistant => format!("{}*u", num(get("m"))),
        Shape::PlaneDs => format!("1 + {}*u", num(get("m"))),
        Shape::Trans63Plus => format!("sqrt({}^2 + u^2) + sqrt({}^2 + v^2)", a(), b()),
        Shape::Trans63Minus => format!("sqrt({}^2 + u^2) - sqrt({}^2 + v^2)", a(), b()),
        Shape::Cor62Plus => format!("({}*{} + u*v)/sqrt({}^2 + v^2)", c1(), c2(), c1()),
        Shape::Cor62Minus => format!("-({}*{} + u*v)/sqrt({}^2 + v^2)", c1(), c2(), c1()),
        Shape::T731Plus => format!("sqrt(u^2 + {}^2) + sqrt(v^2 + {}^2)", a(), b()),
        Shape::T731Minus => format!("sqrt(u^2 + {}^2) - sqrt(v^2 + {}^2)", a(), b()),
        Shape::T732Plus => format!("sqrt(u^2 - {}^2) + sqrt(v^2 - {}^2)", a(), b()),
        Shape::T732Minus => format!("sqrt(u^2 - {}^2) - sqrt(v^2 - {}^2)", a(), b()),
        Shape::T733Plus => format!("sqrt(u^2 + {}^2) + sqrt(v^2 - {}^2)", a(), b()),
        Shape::T733Minus => format!("sqrt(u^2 + {}^2) - sqrt(v^2 - {}^2)", a(), b()),
        Shape::T734 => format!("sqrt(u^2 - {}^2) - sqrt(v^2 + {}^2)", a(), b()),
        Shape::FlahertyPlus => format!("u + ({curve})"),
        Shape::FlahertyMinus => format!("-u + ({curve})"),
        Shape::Cor74Plus => format!("({}*{} - u*v)/sqrt(v^2 - {}^2)", c1(), c2(), c1()),
        Shape::Cor74Minus => format!("-({}*{} - u*v)/sqrt(v^2 - {}^2)", c1(), c2(), c1()),
        _ => return None,
    })
}

fn param_values(info: &FamilyInfo, fp: &FamilyParams) -> Result<BTreeMap<&'static str, f64>> {
    for key in fp.params.keys() {
        if !info.params.iter().any(|s| s.name == key) {
            return Err(Error::ParamConstraint(format!("{} has no parameter `{key}`", info.key)));
        }
    }
    let mut out = BTreeMap::new();
    for spec in info.params {
        let v = fp.params.get(spec.name).copied().unwrap_or(spec.default);
        if !v.is_finite() {
            return Err(Error::ParamConstraint(format!("{} must be finite", spec.name)));
        }
        if spec.nonzero && v == 0.0 {
            return Err(Error::ParamConstraint(format!("{} must be nonzero", spec.name)));
        }
        if spec.positive && v <= 0.0 {
            return Err(Error::ParamConstraint(format!("{} must be positive", spec.name)));
        }
        out.insert(spec.name, v);
    }
    match info.shape {
        Shape::PlaneDs if out["m"].abs() >= 1.0 => {
            return Err(Error::ParamConstraint("space-like plane needs |m| < 1".into()))
        }
        Shape::Ruled62_3 | Shape::Ruled74_4 | Shape::Ruled74_6 | Shape::Ruled68 if out["c2"] == 0.0 => {
            return Err(Error::ParamConstraint("c2 must be nonzero".into()))
        }
        _ => {}
    }
    Ok(out)
}

/// A family whose polar variety is congruent to another family of the zoo.
#[derive(Debug, Clone)]
pub struct PolarPartner {
    pub family: FamilyParams,
    /// The partner written as a graph `x3 = F(x1, x2)` (variables `u`, `v`).
    pub graph: GraphExpr,
}

/// Partner of `fp` under polarity, up to a rotation by a right angle and a
/// horizontal translation. `None` for families without a listed partner.
pub fn polar_partner(fp: &FamilyParams) -> Result<Option<PolarPartner>> {
    let info = family(&fp.name)?;
    let pv = param_values(info, fp)?;
    let (family, src) = match info.shape {
        Shape::Trans66 => {
            let (a, b) = (pv["a"], pv["b"]);
            let g = format!("sqrt({}^2 + u^2) + sqrt({}^2 + v^2)", num(a), num(b));
            (FamilyParams::new("translational-6.4").with("a", a).with("b", b), g)
        }
        // a quarter turn flips the sign of x1 x2, which the sign of c absorbs
        Shape::Ruled67 => {
            let c = -pv["c"];
            let g = format!("{}*u*v/sqrt({}^2 + v^2)", num(c.signum()), num(c));
            (FamilyParams::new("ruled-6.2-2").with("c", c), g)
        }
        Shape::Ruled68 => {
            let (c1, c2) = (-pv["c1"], pv["c2"]);
            let g = format!("{}*({}*{} + u*v)/sqrt({}^2 + v^2)", num(c1.signum()), num(c1), num(c2), num(c1));
            (FamilyParams::new("ruled-6.2-3").with("c1", c1).with("c2", c2), g)
        }
        Shape::Ruled74_5 => {
            let c = pv["c"];
            let g = format!("{}*u*v/sqrt({}^2 + v^2)", num(c.signum()), num(c));
            (FamilyParams::new("ruled-7.4-3").with("c", c), g)
        }
        Shape::Ruled74_6 => {
            let (c1, c2) = (pv["c1"], pv["c2"]);
            let g = format!("{}*({}*{} + u*v)/sqrt({}^2 + v^2)", num(c1.signum()), num(c1), num(c2), num(c1));
            (FamilyParams::new("ruled-7.4-4").with("c1", c1).with("c2", c2), g)
        }
        _ => return Ok(None),
    };
    Ok(Some(PolarPartner { family, graph: GraphExpr::parse(&src)? }))
}

/// Grid used to validate a domain: 9 x 9 samples shrunk by 1e-6 from the
/// boundary.
fn audit_points(d: &Rect) -> impl Iterator<Item = (f64, f64)> + '_ {
    let inset = 1e-6 * (d.u1 - d.u0).min(d.v1 - d.v0);
    let inner = Rect { u0: d.u0 + inset, u1: d.u1 - inset, v0: d.v0 + inset, v1: d.v1 - inset };
    (0..9).flat_map(move |i| (0..9).map(move |j| inner.lerp(i as f64 / 8.0, j as f64 / 8.0)))
}

/// Builds the chart of a registered family.
pub fn make_surface(fp: &FamilyParams) -> Result<SurfaceChart> {
    let info = family(&fp.name)?;
    let values = param_values(info, fp)?;
    let get = |k: &str| values[k];
    let curve_src = match (&fp.curve, info.curve) {
        (Some(c), Some(_)) => c.to_string(),
        (Some(_), None) => return Err(Error::ParamConstraint(format!("{} does not take a curve", info.key))),
        (None, Some(d)) => d.to_string(),
        (None, None) => String::new(),
    };
    let evaluator = match graph_source(info.shape, &get, &curve_src) {
        Some(src) => Evaluator::ClosedForm(Arc::new(GraphSurface(parse_graph_expr(&src)?))),
        None => {
            let names: Vec<f64> = info.params.iter().map(|s| values[s.name]).collect();
            let p = [names.first().copied().unwrap_or(0.0), names.get(1).copied().unwrap_or(0.0)];
            Evaluator::ClosedForm(Arc::new(Parametric { shape: info.shape, p }))
        }
    };
    let domain = fp.domain.unwrap_or(info.domain);
    let mut orientation = match info.shape {
        Shape::VerticalPlane | Shape::Cylinder => NormalOrientation::Cross,
        _ => NormalOrientation::UpperHalf,
    };
    if let Some(o) = fp.orientation_override {
        orientation = o;
    }
    let chart = SurfaceChart::new(domain, evaluator, info.space)?.with_orientation(orientation);
    validate_domain(info, &chart, fp.curve.is_some())?;
    Ok(chart)
}

fn validate_domain(info: &FamilyInfo, chart: &SurfaceChart, custom_curve: bool) -> Result<()> {
    let space = chart.ambient();
    for (u, v) in audit_points(&chart.domain()) {
        let series = chart.series(u, v, 2).map_err(|e| match e {
            Error::Domain(msg) => Error::DomainConstraint(format!("({u}, {v}): {msg}")),
            other => other,
        })?;
        let h = series[2].value();
        if h <= 0.0 {
            return Err(Error::DomainConstraint(format!("{} has x3 = {h} <= 0 at ({u}, {v})", info.key)));
        }
        if custom_curve && series[2].partial(0, 1).abs() < 1e-12 {
            return Err(Error::ParamConstraint(format!("psi'(v) vanishes near v = {v}")));
        }
        let jet = crate::calculus::Jet2::from_series(&series);
        match fundamental_forms_oriented(&jet, &space, NormalOrientation::Cross) {
            Ok(_) => {}
            Err(Error::WrongCausalClass(msg)) => return Err(Error::DomainConstraint(format!("({u}, {v}): {msg}"))),
            Err(Error::NonImmersed(d)) => {
                return Err(Error::DomainConstraint(format!("immersion degenerates at ({u}, {v}) (|det I| = {d:e})")))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Which graph equation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphPde {
    /// `f (f_uu f_vv - f_uv^2) + (1+f_v^2) f_uu - 2 f_u f_v f_uv + (1+f_u^2) f_vv`
    H3Eq61,
    /// `f (f_uu f_vv - f_uv^2) - [(1-f_v^2) f_uu + 2 f_u f_v f_uv + (1-f_u^2) f_vv]`
    Ds3Eq62,
}

impl GraphPde {
    pub fn residual_of(self, jet: &Taylor) -> f64 {
        let f = jet.value();
        let [fu, fv] = jet.gradient();
        let [[fuu, fuv], [_, fvv]] = jet.hessian();
        let hess = f * (fuu * fvv - fuv * fuv);
        match self {
            GraphPde::H3Eq61 => hess + (1.0 + fv * fv) * fuu - 2.0 * fu * fv * fuv + (1.0 + fu * fu) * fvv,
            GraphPde::Ds3Eq62 => hess - ((1.0 - fv * fv) * fuu + 2.0 * fu * fv * fuv + (1.0 - fu * fu) * fvv),
        }
    }
}

/// Residual of a graph equation at one point.
pub fn graph_pde_residual(f: &GraphExpr, u: f64, v: f64, which: GraphPde) -> Result<f64> {
    Ok(which.residual_of(&f.jet(u, v)?))
}

/// `f_u^2 + f_v^2 - 1`: negative for space-like, positive for time-like de
/// Sitter graphs.
pub fn gradient_regime(f: &GraphExpr, u: f64, v: f64) -> Result<f64> {
    let [fu, fv] = f.jet(u, v)?.gradient();
    Ok(fu * fu + fv * fv - 1.0)
}

/// A closed-form solution of one of the graph equations, with a domain on
/// which it is positive and (for de Sitter) has a fixed causal regime.
#[derive(Debug, Clone)]
pub struct GraphSolution {
    pub name: &'static str,
    pub expr: GraphExpr,
    pub domain: Rect,
    pub equation: GraphPde,
}

fn solution(name: &'static str, src: &str, domain: Rect, equation: GraphPde) -> GraphSolution {
    GraphSolution { name, expr: parse_graph_expr(src).expect("shipped expression"), domain, equation }
}

/// Solutions of the hyperbolic graph equation: horospheres, planes and the
/// graph forms of the translational and ruled surfaces.
pub fn h3_graph_solutions() -> Vec<GraphSolution> {
    use GraphPde::H3Eq61 as Q;
    vec![
        solution("horosphere", "1", rect(-1.0, 1.0, -1.0, 1.0), Q),
        solution("plane", "2 + 0.3*u - 0.2*v", rect(-1.0, 1.0, -1.0, 1.0), Q),
        solution("translational", "sqrt(1 - u^2) + sqrt(1 - v^2)", rect(-0.7, 0.7, -0.7, 0.7), Q),
        solution("translational-ab", "sqrt(4 - u^2) + sqrt(1 - v^2)", rect(-1.2, 1.2, -0.6, 0.6), Q),
        solution("ruled", "u*v/sqrt(1 - v^2)", rect(0.2, 1.0, 0.1, 0.8), Q),
        solution("ruled-shifted", "(2 + u*v)/sqrt(1 - v^2)", rect(-0.5, 0.5, -0.6, 0.6), Q),
    ]
}

/// Space-like solutions of the de Sitter graph equation.
pub fn ds3_graph_solutions() -> Vec<GraphSolution> {
    use GraphPde::Ds3Eq62 as Q;
    vec![
        solution("translational-plus", "sqrt(1 + u^2) + sqrt(1 + v^2)", rect(-0.6, 0.6, -0.6, 0.6), Q),
        solution("translational-minus", "sqrt(4 + u^2) - sqrt(1 + v^2)", rect(-0.6, 0.6, -0.6, 0.6), Q),
        solution("corollary-plus", "(1*2 + u*v)/sqrt(1 + v^2)", rect(0.1, 0.9, 0.1, 0.9), Q),
        solution("corollary-minus", "-(1*(-2) + u*v)/sqrt(1 + v^2)", rect(0.1, 0.4, 0.1, 0.25), Q),
        solution("plane", "1.5 + 0.3*u + 0.4*v", rect(-1.0, 1.0, -1.0, 1.0), Q),
    ]
}

/// Time-like solutions of the de Sitter graph equation, including the three
/// shipped Flaherty graphs.
pub fn ds3_timelike_graph_solutions() -> Vec<GraphSolution> {
    let mut out = Vec::new();
    for info in FAMILIES.iter().filter(|f| f.space == DS3T) {
        let defaults: BTreeMap<&str, f64> = info.params.iter().map(|s| (s.name, s.default)).collect();
        let get = |k: &str| defaults[k];
        let curves: &[&str] = if info.takes_curve() { &FLAHERTY_PSI } else { &[""] };
        for c in curves {
            if let Some(src) = graph_source(info.shape, &get, c) {
                out.push(solution(info.key, &src, info.domain, GraphPde::Ds3Eq62));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::jet2_eval;

    #[test]
    fn spec_examples() {
        let c = make_surface(&FamilyParams::new("ruled-6.2-2").with("c", 1.0)).unwrap();
        let x = c.position(1.0, 1.0).unwrap();
        let (ch, sh) = (1f64.cosh(), 1f64.sinh());
        assert!((x[0] - ch).abs() < 1e-15 && (x[1] - sh).abs() < 1e-15 && (x[2] - sh).abs() < 1e-15);
        let j = jet2_eval(&c, 1.0, 1.0).unwrap();
        assert!((j.du[(0, 0)] - ch).abs() < 1e-15 && j.du[(1, 0)] == 0.0 && (j.du[(2, 0)] - sh).abs() < 1e-15);

        let c = make_surface(&FamilyParams::new("translational-6.4")).unwrap();
        assert_eq!(c.position(0.0, 0.0).unwrap(), [0.0, 0.0, 2.0]);

        let e = make_surface(&FamilyParams::new("translational-6.3").with("a", 0.0)).unwrap_err();
        assert!(matches!(e, Error::ParamConstraint(_)));
        assert!(matches!(make_surface(&FamilyParams::new("nosuch")), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn domain_constraints() {
        let fp = FamilyParams::new("ruled-6.2-2").with_domain(Rect::new(-1.0, 1.0, 0.5, 1.0).unwrap());
        assert!(matches!(make_surface(&fp), Err(Error::DomainConstraint(_))));
        // space-like only while c cosh v > u
        let fp = FamilyParams::new("ruled-6.2-2").with_domain(Rect::new(0.5, 3.0, 0.5, 1.0).unwrap());
        assert!(matches!(make_surface(&fp), Err(Error::DomainConstraint(_))));
    }

    #[test]
    fn every_family_builds_with_defaults() {
        for f in families() {
            make_surface(&FamilyParams::new(f.key)).unwrap_or_else(|e| panic!("{}: {e}", f.key));
        }
        assert!(families().len() >= 14);
    }

    #[test]
    fn pde_examples() {
        let f = parse_graph_expr("sqrt(1+u^2) + sqrt(1+v^2)").unwrap();
        assert_eq!(graph_pde_residual(&f, 0.0, 0.0, GraphPde::Ds3Eq62).unwrap(), 0.0);
        let f = parse_graph_expr("1").unwrap();
        assert_eq!(graph_pde_residual(&f, 0.4, -2.0, GraphPde::H3Eq61).unwrap(), 0.0);
        let f = parse_graph_expr("(1*2 + u*v)/sqrt(1 + v^2)").unwrap();
        assert!(graph_pde_residual(&f, 0.3, 0.5, GraphPde::Ds3Eq62).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn graph_solutions_keep_their_regime_on_the_whole_domain() {
        let sets = [(ds3_graph_solutions(), -1.0), (ds3_timelike_graph_solutions(), 1.0)];
        for (sols, sign) in sets {
            for s in sols {
                for i in 0..=20 {
                    for j in 0..=20 {
                        let (u, v) = s.domain.lerp(i as f64 / 20.0, j as f64 / 20.0);
                        let g = gradient_regime(&s.expr, u, v).unwrap();
                        assert!(g * sign > 0.0, "{} at ({u}, {v}): {g}", s.name);
                        assert!(s.expr.eval_f64(u, v).unwrap() > 0.0, "{}", s.name);
                    }
                }
            }
        }
        for s in h3_graph_solutions() {
            let (u, v) = s.domain.lerp(0.5, 0.5);
            assert!(s.expr.eval_f64(u, v).unwrap() > 0.0);
        }
    }
}
