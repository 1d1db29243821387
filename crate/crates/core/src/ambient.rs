//! Upper half-space models of hyperbolic space `H^(n+1)` and de Sitter space
//! `S_1^(n+1)`, their Minkowski-model identifications and the rigid motions
//! that fix the height coordinate.

use nalgebra::DMatrix;

use crate::calculus::Taylor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmbientKind {
    Hyperbolic,
    DeSitter,
}

/// Causal type of the immersed hypersurface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalClass {
    SpaceLike,
    TimeLike,
}

/// The ambient space together with the causal class of the hypersurfaces
/// living in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AmbientSpace {
    kind: AmbientKind,
    dim: usize,
    causal: CausalClass,
}

impl AmbientSpace {
    pub fn new(kind: AmbientKind, dim: usize, causal: CausalClass) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidInput(format!("ambient dimension must be >= 3, got {dim}")));
        }
        if kind == AmbientKind::Hyperbolic && causal == CausalClass::TimeLike {
            return Err(Error::InvalidInput("hyperbolic space has no time-like hypersurfaces".into()));
        }
        Ok(AmbientSpace { kind, dim, causal })
    }

    pub const fn h3() -> Self {
        AmbientSpace { kind: AmbientKind::Hyperbolic, dim: 3, causal: CausalClass::SpaceLike }
    }

    pub const fn ds3() -> Self {
        AmbientSpace { kind: AmbientKind::DeSitter, dim: 3, causal: CausalClass::SpaceLike }
    }

    pub const fn ds3_timelike() -> Self {
        AmbientSpace { kind: AmbientKind::DeSitter, dim: 3, causal: CausalClass::TimeLike }
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn causal_class(&self) -> CausalClass {
        self.causal
    }

    /// Signs `eps_A` of the flat metric the half-space metric is conformal to.
    pub fn signature(&self) -> Vec<f64> {
        let mut s = vec![1.0; self.dim];
        if self.kind == AmbientKind::DeSitter {
            s[self.dim - 1] = -1.0;
        }
        s
    }

    pub fn epsilon(&self, a: usize) -> f64 {
        if self.kind == AmbientKind::DeSitter && a == self.dim - 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// `<N, N>` for the unit normal.
    pub fn normal_sign(&self) -> f64 {
        match (self.kind, self.causal) {
            (AmbientKind::DeSitter, CausalClass::SpaceLike) => -1.0,
            _ => 1.0,
        }
    }

    /// `(c, sigma)` in the Gauss equation `K = c + sigma det(II) / det(I)`.
    pub fn gauss_equation_constants(&self) -> (f64, f64) {
        match (self.kind, self.causal) {
            (AmbientKind::Hyperbolic, _) => (-1.0, 1.0),
            (AmbientKind::DeSitter, CausalClass::SpaceLike) => (1.0, -1.0),
            (AmbientKind::DeSitter, CausalClass::TimeLike) => (1.0, 1.0),
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> &'static str {
        match (self.kind, self.causal) {
            (AmbientKind::Hyperbolic, _) => "h3",
            (AmbientKind::DeSitter, CausalClass::SpaceLike) => "ds3",
            (AmbientKind::DeSitter, CausalClass::TimeLike) => "ds3-timelike",
        }
    }
}

fn check_height(p: &[f64]) -> Result<f64> {
    let h = *p.last().ok_or_else(|| Error::InvalidInput("empty point".into()))?;
    if h > 0.0 {
        Ok(h)
    } else {
        Err(Error::NonPositiveHeight(h))
    }
}

/// A point `(x_1, ..., x_(n+1))` of the upper half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpacePoint {
    coords: Vec<f64>,
}

impl HalfSpacePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_height(&coords)?;
        Ok(HalfSpacePoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn height(&self) -> f64 {
        *self.coords.last().unwrap()
    }

    pub fn xyz(&self) -> [f64; 3] {
        [self.coords[0], self.coords[1], self.coords[2]]
    }
}

/// `ds^2 = sum eps_A dx_A^2 / x_(n+1)^2` as a diagonal matrix.
pub fn metric_at(space: &AmbientSpace, p: &[f64]) -> Result<DMatrix<f64>> {
    if p.len() != space.dim() {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates, ambient dimension is {}",
            p.len(),
            space.dim()
        )));
    }
    let h = check_height(p)?;
    let inv = 1.0 / (h * h);
    Ok(DMatrix::from_fn(space.dim(), space.dim(), |a, b| if a == b { space.epsilon(a) * inv } else { 0.0 }))
}

/// Christoffel symbols `Gamma^A_(BC)` of the half-space metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Gamma^a_(bc)`, zero-based indices.
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    /// `Gamma^a_(bc) v^b w^c` for each `a`.
    pub fn contract(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        let m = self.dim;
        (0..m)
            .map(|a| {
                let mut s = 0.0;
                for b in 0..m {
                    for c in 0..m {
                        s += self.get(a, b, c) * v[b] * w[c];
                    }
                }
                s
            })
            .collect()
    }
}

/// Closed-form Levi-Civita connection of `eps_A dx_A^2 / x_t^2`, `t = n+1`:
/// `Gamma^A_(B t) = -delta^A_B / x_t`, `Gamma^t_(BB) = eps_B eps_t / x_t` for
/// `B != t`, and `Gamma^t_(tt) = -1 / x_t`.
pub fn christoffel_at(space: &AmbientSpace, p: &[f64]) -> Result<Christoffel> {
    let h = check_height(p)?;
    let m = space.dim();
    let t = m - 1;
    let mut data = vec![0.0; m * m * m];
    let mut set = |a: usize, b: usize, c: usize, val: f64| {
        data[(a * m + b) * m + c] = val;
        data[(a * m + c) * m + b] = val;
    };
    for a in 0..t {
        set(a, a, t, -1.0 / h);
        set(t, a, a, space.epsilon(a) * space.epsilon(t) / h);
    }
    set(t, t, t, -1.0 / h);
    Ok(Christoffel { dim: m, data })
}

/// Quadric sheet of a Minkowski point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    /// `-X0^2 + X1^2 + X2^2 + X3^2 = -1`, `X0 > 0`.
    HQuadric,
    /// `-X0^2 + X1^2 + X2^2 + X3^2 = +1`.
    DSQuadric,
}

/// Component of the half-space chart a de Sitter point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartBranch {
    /// The hyperbolic chart (single component).
    Hyperbolic,
    /// `X0 - X3 < 0`.
    SMinus,
    /// `X0 - X3 > 0`.
    SPlus,
}

impl ChartBranch {
    fn sigma(self) -> f64 {
        match self {
            ChartBranch::SMinus => -1.0,
            _ => 1.0,
        }
    }
}

pub fn minkowski_dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// A point of the hyperboloid model in Lorentz-Minkowski 4-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinkowskiPoint {
    coords: [f64; 4],
    sheet: Sheet,
}

const QUADRIC_TOL: f64 = 1e-9;

impl MinkowskiPoint {
    pub fn new(coords: [f64; 4], sheet: Sheet) -> Result<Self> {
        let q = minkowski_dot(&coords, &coords);
        let defect = match sheet {
            Sheet::HQuadric => {
                if coords[0] <= 0.0 {
                    return Err(Error::QuadricViolation(coords[0]));
                }
                (q + 1.0).abs()
            }
            Sheet::DSQuadric => (q - 1.0).abs(),
        };
        if defect > QUADRIC_TOL * (1.0 + coords.iter().map(|x| x * x).sum::<f64>()) {
            return Err(Error::QuadricViolation(defect));
        }
        Ok(MinkowskiPoint { coords, sheet })
    }

    pub fn coords(&self) -> [f64; 4] {
        self.coords
    }

    pub fn sheet(&self) -> Sheet {
        self.sheet
    }
}

/// Either representation of a 3-dimensional ambient point.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelPoint {
    HalfSpace(HalfSpacePoint, ChartBranch),
    Minkowski(MinkowskiPoint),
}

fn require_3d(space: &AmbientSpace) -> Result<()> {
    if space.dim() != 3 {
        return Err(Error::InvalidInput("model conversion is defined for 3-dimensional spaces".into()));
    }
    Ok(())
}

/// Converts between the half-space chart and the hyperboloid model.
pub fn model_convert(space: &AmbientSpace, input: &ModelPoint) -> Result<ModelPoint> {
    require_3d(space)?;
    match input {
        ModelPoint::HalfSpace(p, branch) => Ok(ModelPoint::Minkowski(half_space_to_minkowski(space, p, *branch)?)),
        ModelPoint::Minkowski(x) => {
            let (p, b) = minkowski_to_half_space(space, x)?;
            Ok(ModelPoint::HalfSpace(p, b))
        }
    }
}

fn branch_for(space: &AmbientSpace, branch: ChartBranch) -> Result<f64> {
    match (space.kind(), branch) {
        (AmbientKind::Hyperbolic, ChartBranch::Hyperbolic) => Ok(1.0),
        (AmbientKind::DeSitter, ChartBranch::SMinus | ChartBranch::SPlus) => Ok(branch.sigma()),
        _ => Err(Error::InvalidInput(format!("branch {branch:?} does not belong to {}", space.label()))),
    }
}

pub fn half_space_to_minkowski(
    space: &AmbientSpace,
    p: &HalfSpacePoint,
    branch: ChartBranch,
) -> Result<MinkowskiPoint> {
    require_3d(space)?;
    let sigma = branch_for(space, branch)?;
    let [x1, x2, x3] = p.xyz();
    let r2 = x1 * x1 + x2 * x2;
    let coords = match space.kind() {
        AmbientKind::Hyperbolic => {
            [(r2 + x3 * x3 + 1.0) / (2.0 * x3), x1 / x3, x2 / x3, (r2 + x3 * x3 - 1.0) / (2.0 * x3)]
        }
        AmbientKind::DeSitter => {
            [sigma * (1.0 + r2 - x3 * x3) / (2.0 * x3), x1 / x3, x2 / x3, sigma * (r2 - x3 * x3 - 1.0) / (2.0 * x3)]
        }
    };
    let sheet = match space.kind() {
        AmbientKind::Hyperbolic => Sheet::HQuadric,
        AmbientKind::DeSitter => Sheet::DSQuadric,
    };
    Ok(MinkowskiPoint { coords, sheet })
}

/// `(x1, x2, x3) = (X1, X2, 1) / |X0 - X3|`; errors on the set `X0 = X3`.
pub fn minkowski_to_half_space(space: &AmbientSpace, x: &MinkowskiPoint) -> Result<(HalfSpacePoint, ChartBranch)> {
    require_3d(space)?;
    let expected = match space.kind() {
        AmbientKind::Hyperbolic => Sheet::HQuadric,
        AmbientKind::DeSitter => Sheet::DSQuadric,
    };
    if x.sheet() != expected {
        return Err(Error::InvalidInput(format!("{:?} point given for {}", x.sheet(), space.label())));
    }
    let [x0, x1, x2, x3] = x.coords();
    let d = x0 - x3;
    if d.abs() < 1e-12 {
        return Err(Error::DegenerateSet(d.abs()));
    }
    let branch = match space.kind() {
        AmbientKind::Hyperbolic => ChartBranch::Hyperbolic,
        AmbientKind::DeSitter if d < 0.0 => ChartBranch::SMinus,
        AmbientKind::DeSitter => ChartBranch::SPlus,
    };
    let a = d.abs();
    Ok((HalfSpacePoint { coords: vec![x1 / a, x2 / a, 1.0 / a] }, branch))
}

/// Differential of the hyperboloid embedding applied to a coordinate vector
/// `w` at the half-space point `x`.
pub(crate) fn pushforward_series(kind: AmbientKind, sigma: f64, x: &[Taylor; 3], w: &[Taylor; 3]) -> [Taylor; 4] {
    let [x1, x2, x3] = *x;
    let r2 = x1 * x1 + x2 * x2;
    let x3sq = x3 * x3;
    let inv = Taylor::constant(1.0) / x3;
    let inv2x3sq = Taylor::constant(1.0) / (x3sq * 2.0);
    let dx1 = x1 * inv;
    let dx2 = x2 * inv;
    // rows of the Jacobian
    let (j0, j3) = match kind {
        AmbientKind::Hyperbolic => ([dx1, dx2, (x3sq - r2 - 1.0) * inv2x3sq], [dx1, dx2, (x3sq - r2 + 1.0) * inv2x3sq]),
        AmbientKind::DeSitter => (
            [dx1 * sigma, dx2 * sigma, (-x3sq - r2 - 1.0) * inv2x3sq * sigma],
            [dx1 * sigma, dx2 * sigma, (1.0 - x3sq - r2) * inv2x3sq * sigma],
        ),
    };
    let j1 = [inv, Taylor::constant(0.0), -(x1 * inv * inv)];
    let j2 = [Taylor::constant(0.0), inv, -(x2 * inv * inv)];
    let row = |j: [Taylor; 3]| j[0] * w[0] + j[1] * w[1] + j[2] * w[2];
    [row(j0), row(j1), row(j2), row(j3)]
}

/// Pushes a coordinate tangent vector at a half-space point into Minkowski
/// 4-space.
pub fn pushforward(space: &AmbientSpace, p: &HalfSpacePoint, branch: ChartBranch, w: [f64; 3]) -> Result<[f64; 4]> {
    require_3d(space)?;
    let sigma = branch_for(space, branch)?;
    let x = p.xyz().map(Taylor::constant);
    let w = w.map(Taylor::constant);
    Ok(pushforward_series(space.kind(), sigma, &x, &w).map(|t| t.value()))
}

/// `(x1 cos t - x2 sin t + a, x1 sin t + x2 cos t + b, x3)`.
pub fn isometry_shift(p: &HalfSpacePoint, theta: f64, a: f64, b: f64) -> HalfSpacePoint {
    let [x1, x2, x3] = p.xyz();
    let (s, c) = theta.sin_cos();
    HalfSpacePoint { coords: vec![x1 * c - x2 * s + a, x1 * s + x2 * c + b, x3] }
}

/// Inverse of [`isometry_shift`] with the same parameters.
pub fn isometry_shift_inverse(p: &HalfSpacePoint, theta: f64, a: f64, b: f64) -> HalfSpacePoint {
    let [x1, x2, x3] = p.xyz();
    let (y1, y2) = (x1 - a, x2 - b);
    let (s, c) = theta.sin_cos();
    HalfSpacePoint { coords: vec![y1 * c + y2 * s, -y1 * s + y2 * c, x3] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn metric_examples() {
        let g = metric_at(&AmbientSpace::h3(), &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(g, DMatrix::identity(3, 3));
        let g = metric_at(&AmbientSpace::ds3(), &[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(g, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.25, 0.25, -0.25])));
        assert_eq!(metric_at(&AmbientSpace::h3(), &[0.0, 0.0, 0.0]), Err(Error::NonPositiveHeight(0.0)));
    }

    #[test]
    fn christoffel_examples() {
        // Values below come from a symbolic Levi-Civita computation of the
        // two half-space metrics.
        let h = christoffel_at(&AmbientSpace::h3(), &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(h.get(0, 0, 2), -1.0);
        assert_eq!(h.get(0, 2, 0), -1.0);
        assert_eq!(h.get(2, 0, 0), 1.0);
        assert_eq!(h.get(2, 2, 2), -1.0);
        assert_eq!(h.get(0, 1, 2), 0.0);
        let d = christoffel_at(&AmbientSpace::ds3(), &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(d.get(2, 0, 0), -1.0);
        assert_eq!(d.get(0, 0, 2), -1.0);
        let d2 = christoffel_at(&AmbientSpace::ds3(), &[5.0, 7.0, 2.0]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert_eq!(d2.get(a, b, c), 0.5 * d.get(a, b, c));
                }
            }
        }
    }

    #[test]
    fn conversion_examples() {
        let h3 = AmbientSpace::h3();
        let ds3 = AmbientSpace::ds3();
        let apex = MinkowskiPoint::new([1.0, 0.0, 0.0, 0.0], Sheet::HQuadric).unwrap();
        let (p, _) = minkowski_to_half_space(&h3, &apex).unwrap();
        assert_eq!(p.coords(), &[0.0, 0.0, 1.0]);

        let x = MinkowskiPoint::new([0.0, 0.0, 0.0, 1.0], Sheet::DSQuadric).unwrap();
        let (p, b) = minkowski_to_half_space(&ds3, &x).unwrap();
        assert_eq!(p.coords(), &[0.0, 0.0, 1.0]);
        assert_eq!(b, ChartBranch::SMinus);

        let s0 = MinkowskiPoint::new([1.0, 1.0, 0.0, 1.0], Sheet::DSQuadric).unwrap();
        assert!(matches!(minkowski_to_half_space(&ds3, &s0), Err(Error::DegenerateSet(_))));

        assert!(matches!(MinkowskiPoint::new([2.0, 0.0, 0.0, 0.0], Sheet::HQuadric), Err(Error::QuadricViolation(_))));
    }

    #[test]
    fn isometry_examples() {
        let p = HalfSpacePoint::new(vec![1.0, 0.0, 1.0]).unwrap();
        let q = isometry_shift(&p, FRAC_PI_2, 0.0, 0.0);
        assert!((q.coords()[0]).abs() < 1e-15 && (q.coords()[1] - 1.0).abs() < 1e-15);
        let p = HalfSpacePoint::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(isometry_shift(&p, 0.0, -1.0, -2.0).coords(), &[0.0, 0.0, 3.0]);
        let r = isometry_shift_inverse(&isometry_shift(&p, 0.83, 0.4, -1.2), 0.83, 0.4, -1.2);
        for k in 0..3 {
            assert!((r.coords()[k] - p.coords()[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn timelike_hyperbolic_rejected() {
        assert!(AmbientSpace::new(AmbientKind::Hyperbolic, 3, CausalClass::TimeLike).is_err());
        assert!(AmbientSpace::new(AmbientKind::DeSitter, 2, CausalClass::SpaceLike).is_err());
    }
}
