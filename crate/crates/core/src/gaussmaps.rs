//! Normal Gauss map `g` (stereographic image of the left-translated normal)
//! and the far Gauss map `G = x1 + i x2 + x3 g`.

use std::fmt;

use num_complex::Complex64;

use crate::ambient::{AmbientKind, AmbientSpace, CausalClass, HalfSpacePoint};
use crate::error::{Error, Result};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CPoint {
    Finite(Complex64),
    Infinity,
}

impl CPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            CPoint::Finite(z) => Some(z),
            CPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == CPoint::Infinity
    }
}

impl From<Complex64> for CPoint {
    fn from(z: Complex64) -> Self {
        CPoint::Finite(z)
    }
}

impl fmt::Display for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CPoint::Finite(z) => write!(f, "{z}"),
            CPoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Sign of `eta_3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    EtaPos,
    EtaNeg,
    Unbranched,
}

impl Branch {
    pub fn of(eta3: f64) -> Branch {
        if eta3 > 0.0 {
            Branch::EtaPos
        } else if eta3 < 0.0 {
            Branch::EtaNeg
        } else {
            Branch::Unbranched
        }
    }
}

/// Value `sum eps_A eta_A^2` must take for a unit normal of this space.
fn quadric_level(space: &AmbientSpace) -> f64 {
    space.normal_sign()
}

fn quadric_value(space: &AmbientSpace, eta: [f64; 3]) -> f64 {
    let e3 = if space.kind() == AmbientKind::DeSitter { -1.0 } else { 1.0 };
    eta[0] * eta[0] + eta[1] * eta[1] + e3 * eta[2] * eta[2]
}

fn require_3d(space: &AmbientSpace) -> Result<()> {
    if space.dim() != 3 {
        return Err(Error::InvalidInput("Gauss maps are defined for surfaces in 3-space".into()));
    }
    Ok(())
}

/// `g = (eta_1 + i eta_2) / (1 - eta_3)`, projecting from the north pole.
pub fn stereo_project(eta: [f64; 3], space: &AmbientSpace) -> Result<CPoint> {
    require_3d(space)?;
    let dev = (quadric_value(space, eta) - quadric_level(space)).abs();
    if !(dev <= 1e-9) {
        return Err(Error::QuadricViolation(dev));
    }
    let d = 1.0 - eta[2];
    if d.abs() < 1e-14 {
        return Ok(CPoint::Infinity);
    }
    Ok(CPoint::Finite(Complex64::new(eta[0], eta[1]) / d))
}

/// Inverse of [`stereo_project`].
pub fn stereo_unproject(g: CPoint, space: &AmbientSpace) -> Result<[f64; 3]> {
    require_3d(space)?;
    let z = match g {
        CPoint::Infinity => return Ok([0.0, 0.0, 1.0]),
        CPoint::Finite(z) => z,
    };
    let m = z.norm_sqr();
    match (space.kind(), space.causal_class()) {
        (AmbientKind::Hyperbolic, _) => {
            let d = m + 1.0;
            Ok([2.0 * z.re / d, 2.0 * z.im / d, (m - 1.0) / d])
        }
        (AmbientKind::DeSitter, CausalClass::SpaceLike) => {
            if (z.norm() - 1.0).abs() <= 1e-9 {
                return Err(Error::UnitCircleSingularity(z.norm()));
            }
            let d = m - 1.0;
            Ok([-2.0 * z.re / d, -2.0 * z.im / d, (1.0 + m) / d])
        }
        // the projection is two-to-one on the one-sheeted hyperboloid
        (AmbientKind::DeSitter, CausalClass::TimeLike) => {
            Err(Error::InvalidInput("time-like surfaces have no stereographic normal Gauss map".into()))
        }
    }
}

/// `G = x1 + i x2 + x3 g`.
pub fn far_gauss_map(x: &HalfSpacePoint, g: CPoint) -> Result<Complex64> {
    let [x1, x2, x3] = x.xyz();
    match g {
        CPoint::Infinity => Err(Error::InfiniteG),
        CPoint::Finite(z) => Ok(Complex64::new(x1, x2) + z * x3),
    }
}

/// Hyperbolic Gauss map of an H3 surface from the de Sitter Gauss map value
/// of the same normal geodesic: `G^S = -G^H` where `eta_3 > 0` and
/// `G^S = G^H` where `eta_3 < 0`.
pub fn hyperbolic_from_de_sitter(gs: Complex64, eta3: f64) -> Result<Complex64> {
    match Branch::of(eta3) {
        Branch::EtaPos => Ok(-gs),
        Branch::EtaNeg => Ok(gs),
        Branch::Unbranched => Err(Error::EquatorialNormal(eta3.abs())),
    }
}

/// Gauss-map data of a surface point.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussData {
    pub eta: [f64; 3],
    pub g: CPoint,
    /// `G`, or `Infinity` where the normal geodesic ends at infinity.
    pub big_g: CPoint,
    pub branch: Branch,
}

pub fn gauss_data(x: &HalfSpacePoint, eta: [f64; 3], space: &AmbientSpace) -> Result<GaussData> {
    let g = stereo_project(eta, space)?;
    let big_g = match far_gauss_map(x, g) {
        Ok(z) => CPoint::Finite(z),
        Err(Error::InfiniteG) => CPoint::Infinity,
        Err(e) => return Err(e),
    };
    let branch = if eta[2].abs() <= 1e-12 { Branch::Unbranched } else { Branch::of(eta[2]) };
    Ok(GaussData { eta, g, big_g, branch })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> CPoint {
        CPoint::Finite(Complex64::new(re, im))
    }

    #[test]
    fn projection_examples() {
        let ds = AmbientSpace::ds3();
        assert_eq!(stereo_project([0.0, 0.0, -1.0], &ds).unwrap(), c(0.0, 0.0));
        let s2 = 2f64.sqrt();
        let g = stereo_project([1.0, 0.0, s2], &ds).unwrap().finite().unwrap();
        assert!((g.re + 1.0 + s2).abs() < 1e-12 && g.im == 0.0);
        assert!(g.norm() > 1.0);
        assert_eq!(stereo_project([0.0, 0.0, 1.0], &AmbientSpace::h3()).unwrap(), CPoint::Infinity);
        assert!(matches!(stereo_project([1.0, 1.0, 1.0], &ds), Err(Error::QuadricViolation(_))));
    }

    #[test]
    fn unprojection_examples() {
        let ds = AmbientSpace::ds3();
        assert_eq!(stereo_unproject(c(0.0, 0.0), &ds).unwrap(), [0.0, 0.0, -1.0]);
        let s2 = 2f64.sqrt();
        let eta = stereo_unproject(c(-(1.0 + s2), 0.0), &ds).unwrap();
        assert!((eta[0] - 1.0).abs() < 1e-12 && eta[1].abs() < 1e-12 && (eta[2] - s2).abs() < 1e-12);
        let on_circle = c(0.6, 0.8);
        assert!(matches!(stereo_unproject(on_circle, &ds), Err(Error::UnitCircleSingularity(_))));
    }

    #[test]
    fn far_map_examples() {
        let p = HalfSpacePoint::new(vec![0.0, 0.0, 2.0]).unwrap();
        assert_eq!(far_gauss_map(&p, c(2.0, 0.0)).unwrap(), Complex64::new(4.0, 0.0));
        let p = HalfSpacePoint::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(far_gauss_map(&p, c(0.0, 1.0)).unwrap(), Complex64::new(1.0, 2.0));
        let p = HalfSpacePoint::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(far_gauss_map(&p, CPoint::Infinity), Err(Error::InfiniteG));
    }
}
