//! Unit normal, the four fundamental forms and the curvature quantities
//! derived from them, plus the conformality tests built on `IV = rho II`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::ambient::{christoffel_at, metric_at, AmbientKind, AmbientSpace, CausalClass};
use crate::calculus::{jet2_eval, Jet2, NormalOrientation, SurfaceChart};
use crate::error::{Error, Result};

/// Eigenvalues of the shape operator `I^-1 II`.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpectrum {
    /// Principal curvatures of a surface, `lambda >= mu`.
    RealPair(f64, f64),
    /// Principal curvatures of a hypersurface, descending.
    Real(Vec<f64>),
    Complexified,
    NotComputed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormBundle {
    pub space: AmbientSpace,
    /// Position the forms were computed at.
    pub x: DVector<f64>,
    /// Components of the unit normal in the frame `x_(n+1) d/dx_A`.
    pub eta: DVector<f64>,
    /// `d eta / d u_k` as columns.
    pub deta: DMatrix<f64>,
    pub first: DMatrix<f64>,
    pub second: DMatrix<f64>,
    pub third: DMatrix<f64>,
    pub fourth: DMatrix<f64>,
    pub mean_curvature: f64,
    /// Gauss curvature from the Gauss equation; surfaces only.
    pub gauss_curvature: Option<f64>,
    pub shape_spectrum: ShapeSpectrum,
}

impl FormBundle {
    /// `eta_(n+1)`.
    pub fn eta_t(&self) -> f64 {
        self.eta[self.eta.len() - 1]
    }

    pub fn n(&self) -> usize {
        self.first.nrows()
    }

    /// Gauss curvature, or NaN for hypersurfaces.
    pub fn k(&self) -> f64 {
        self.gauss_curvature.unwrap_or(f64::NAN)
    }

    /// `max_i |<N, x_(u_i)>|` and `|<N, N> - normal_sign|` for the jet the
    /// bundle came from.
    pub fn normal_residuals(&self, jet: &Jet2) -> (f64, f64) {
        let m = self.eta.len();
        let h = jet.x[m - 1];
        let eps = self.space.signature();
        let mut tangency = 0.0f64;
        for i in 0..jet.n() {
            let s: f64 = (0..m).map(|a| eps[a] * self.eta[a] * jet.du[(a, i)]).sum();
            tangency = tangency.max((s / h).abs());
        }
        let norm: f64 = (0..m).map(|a| eps[a] * self.eta[a] * self.eta[a]).sum();
        (tangency, (norm - self.space.normal_sign()).abs())
    }
}

const TIE_TOL: f64 = 1e-12;

/// Euclidean normal `c_A = det[x_(u_1) ... x_(u_n) | e_A]` and its
/// derivatives `dc/du_k` (columns).
fn cross_normal(jet: &Jet2) -> (DVector<f64>, DMatrix<f64>) {
    let m = jet.m();
    let n = jet.n();
    let det_with = |cols: &DMatrix<f64>, a: usize| {
        let mut mat = DMatrix::zeros(m, m);
        mat.view_mut((0, 0), (m, n)).copy_from(cols);
        mat[(a, n)] = 1.0;
        mat.determinant()
    };
    let c = DVector::from_fn(m, |a, _| det_with(&jet.du, a));
    let mut dc = DMatrix::zeros(m, n);
    for k in 0..n {
        for i in 0..n {
            let mut cols = jet.du.clone();
            cols.set_column(i, &jet.duu[i].column(k));
            for a in 0..m {
                dc[(a, k)] += det_with(&cols, a);
            }
        }
    }
    (c, dc)
}

/// `eta` and `d eta / du_k` for the requested orientation.
pub fn unit_normal(
    jet: &Jet2,
    space: &AmbientSpace,
    orientation: NormalOrientation,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let m = jet.m();
    if m != space.dim() || jet.n() + 1 != m {
        return Err(Error::InvalidInput("jet does not describe a hypersurface of this space".into()));
    }
    let eps = DVector::from_vec(space.signature());
    let (c, dc) = cross_normal(jet);
    let q: f64 = (0..m).map(|a| eps[a] * c[a] * c[a]).sum();
    if q.abs() < 1e-300 || q.signum() != space.normal_sign() {
        return Err(Error::WrongCausalClass(format!(
            "normal has <N,N> of sign {} but the {} declaration needs {}",
            q.signum(),
            space.label(),
            space.normal_sign()
        )));
    }
    let r = q.abs().sqrt();
    let raw = c.component_mul(&eps) / r;
    let t = m - 1;
    let s = match orientation {
        NormalOrientation::Cross => 1.0,
        NormalOrientation::UpperHalf | NormalOrientation::LowerHalf => {
            if raw[t].abs() <= TIE_TOL {
                return Err(Error::OrientationUndefined);
            }
            let want = if orientation == NormalOrientation::UpperHalf { 1.0 } else { -1.0 };
            want * raw[t].signum()
        }
    };
    let eta = raw * s;
    let mut deta = DMatrix::zeros(m, jet.n());
    for k in 0..jet.n() {
        let dck = dc.column(k);
        let proj: f64 = (0..m).map(|a| eps[a] * c[a] * dck[a]).sum();
        for a in 0..m {
            deta[(a, k)] = s * eps[a] * (dck[a] / r - c[a] * q.signum() * proj / (r * r * r));
        }
    }
    Ok((eta, deta))
}

fn check_causal_class(space: &AmbientSpace, first: &DMatrix<f64>) -> Result<()> {
    match space.causal_class() {
        CausalClass::SpaceLike => {
            if first.clone().cholesky().is_none() {
                return Err(Error::WrongCausalClass(format!(
                    "declared space-like but the induced metric is not positive definite (det = {:e})",
                    first.determinant()
                )));
            }
        }
        CausalClass::TimeLike => {
            let det = first.determinant();
            if first.nrows() != 2 || det >= 0.0 {
                return Err(Error::WrongCausalClass(format!(
                    "declared time-like but the induced metric has det = {det:e}"
                )));
            }
        }
    }
    Ok(())
}

fn spectrum(space: &AmbientSpace, first: &DMatrix<f64>, second: &DMatrix<f64>) -> ShapeSpectrum {
    if space.causal_class() == CausalClass::TimeLike {
        return ShapeSpectrum::NotComputed;
    }
    let Some(chol) = first.clone().cholesky() else {
        return ShapeSpectrum::NotComputed;
    };
    let l_inv = match chol.l().try_inverse() {
        Some(m) => m,
        None => return ShapeSpectrum::NotComputed,
    };
    let sym = &l_inv * second * l_inv.transpose();
    let sym = (&sym + sym.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    if ev.len() == 2 {
        ShapeSpectrum::RealPair(ev[0], ev[1])
    } else {
        ShapeSpectrum::Real(ev)
    }
}

/// All fundamental forms at a jet, with the default orientation
/// (`eta_(n+1) >= 0`).
pub fn fundamental_forms(jet: &Jet2, space: &AmbientSpace) -> Result<FormBundle> {
    fundamental_forms_oriented(jet, space, NormalOrientation::UpperHalf)
}

pub fn fundamental_forms_oriented(
    jet: &Jet2,
    space: &AmbientSpace,
    orientation: NormalOrientation,
) -> Result<FormBundle> {
    let n = jet.n();
    let m = jet.m();
    if m != space.dim() || n + 1 != m {
        return Err(Error::InvalidInput("jet does not describe a hypersurface of this space".into()));
    }
    let metric = metric_at(space, jet.x.as_slice())?;
    let first = jet.du.transpose() * &metric * &jet.du;
    let det1 = first.determinant();
    if !det1.is_finite() || det1.abs() < 1e-12 {
        return Err(Error::NonImmersed(det1.abs()));
    }
    check_causal_class(space, &first)?;
    let (eta, deta) = unit_normal(jet, space, orientation)?;

    let gamma = christoffel_at(space, jet.x.as_slice())?;
    let h = jet.x[m - 1];
    let eps = space.signature();
    let en = space.normal_sign();
    let mut second = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let xi: Vec<f64> = jet.du.column(i).iter().copied().collect();
            let xj: Vec<f64> = jet.du.column(j).iter().copied().collect();
            let g = gamma.contract(&xi, &xj);
            let mut s = 0.0;
            for a in 0..m {
                let cov = 0.5 * (jet.duu[i][(a, j)] + jet.duu[j][(a, i)]) + g[a];
                s += eps[a] * cov * eta[a];
            }
            second[(i, j)] = en * s / h;
            second[(j, i)] = second[(i, j)];
        }
    }

    let first_inv = first.clone().try_inverse().ok_or(Error::NonImmersed(det1.abs()))?;
    let third = &second * &first_inv * &second;
    let third = (&third + third.transpose()) * 0.5;
    let flat = DMatrix::from_diagonal(&DVector::from_vec(eps));
    let fourth = deta.transpose() * flat * &deta;
    let fourth = (&fourth + fourth.transpose()) * 0.5;
    let mean_curvature = (&first_inv * &second).trace() / n as f64;
    let gauss_curvature = (n == 2).then(|| {
        let (c, sigma) = space.gauss_equation_constants();
        c + sigma * second.determinant() / det1
    });
    let shape_spectrum = spectrum(space, &first, &second);
    Ok(FormBundle {
        space: *space,
        x: jet.x.clone(),
        eta,
        deta,
        first,
        second,
        third,
        fourth,
        mean_curvature,
        gauss_curvature,
        shape_spectrum,
    })
}

/// Forms of a chart at a parameter point, using the chart's orientation.
pub fn chart_forms(chart: &SurfaceChart, u: f64, v: f64) -> Result<(Jet2, FormBundle)> {
    let jet = jet2_eval(chart, u, v)?;
    let b = fundamental_forms_oriented(&jet, &chart.ambient(), chart.orientation())?;
    Ok((jet, b))
}

/// `IV` from central differences of `eta` with step
/// `1e-4 max(1, |u|, |v|)`, independent of the Weingarten path.
pub fn fourth_form_direct(chart: &SurfaceChart, u: f64, v: f64) -> Result<DMatrix<f64>> {
    let h = 1e-4 * 1.0f64.max(u.abs()).max(v.abs());
    let d = chart.domain();
    if !d.contains_interior(u, v, 2.0 * h) {
        return Err(Error::OutsideDomain { u, v });
    }
    let space = chart.ambient();
    let eta_at = |uu: f64, vv: f64| -> Result<DVector<f64>> {
        let jet = jet2_eval(chart, uu, vv)?;
        Ok(unit_normal(&jet, &space, chart.orientation())?.0)
    };
    // the centre point carries the full causal-class check
    chart_forms(chart, u, v)?;
    let eu = (eta_at(u + h, v)? - eta_at(u - h, v)?) / (2.0 * h);
    let ev = (eta_at(u, v + h)? - eta_at(u, v - h)?) / (2.0 * h);
    let eps = space.signature();
    let dot = |a: &DVector<f64>, b: &DVector<f64>| -> f64 { (0..a.len()).map(|k| eps[k] * a[k] * b[k]).sum() };
    let uv = dot(&eu, &ev);
    Ok(DMatrix::from_row_slice(2, 2, &[dot(&eu, &eu), uv, uv, dot(&ev, &ev)]))
}

/// How a point relates to `IV = rho II`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Conformal,
    NotConformal,
    TotallyGeodesicDegenerate,
    UmbilicPoint,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Conformal => "conformal",
            Classification::NotConformal => "not-conformal",
            Classification::TotallyGeodesicDegenerate => "totally-geodesic",
            Classification::UmbilicPoint => "umbilic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalityReport {
    pub is_conformal: bool,
    pub rho: Option<f64>,
    pub residual: f64,
    pub classification: Classification,
    /// Principal curvatures coincide (to `1e-8` relative).
    pub umbilic: bool,
}

pub const DEFAULT_CONFORMAL_TOL: f64 = 1e-8;

fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// Tests `IV = rho II` by least squares in the Frobenius inner product.
/// Umbilic points that satisfy the proportionality still classify as
/// conformal; only umbilics that fail it are reported as such.
pub fn conformality_test(bundle: &FormBundle, tol: f64) -> ConformalityReport {
    let ii = &bundle.second;
    let iv = &bundle.fourth;
    let umbilic = match bundle.shape_spectrum {
        ShapeSpectrum::RealPair(l, m) => (l - m).abs() <= 1e-8 * (1.0 + l.abs() + m.abs()),
        ShapeSpectrum::Real(ref ev) => {
            let (lo, hi) = ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
            hi - lo <= 1e-8 * (1.0 + lo.abs() + hi.abs())
        }
        _ => false,
    };
    let nii = ii.norm();
    if nii <= 1e-12 {
        return ConformalityReport {
            is_conformal: false,
            rho: None,
            residual: f64::NAN,
            classification: Classification::TotallyGeodesicDegenerate,
            umbilic,
        };
    }
    // a numerically null IV is proportional with factor zero; measured
    // relative to the 1e-12 floor its rounding noise would read as a failure
    let (rho, residual) = if iv.norm() <= 1e-12 {
        (0.0, 0.0)
    } else {
        let rho = frob(iv, ii) / (nii * nii);
        (rho, (iv - ii * rho).norm() / iv.norm())
    };
    let is_conformal = residual <= tol;
    let classification = if is_conformal {
        Classification::Conformal
    } else if umbilic {
        Classification::UmbilicPoint
    } else {
        Classification::NotConformal
    };
    ConformalityReport { is_conformal, rho: is_conformal.then_some(rho), residual, classification, umbilic }
}

/// Sign `s` in `IV = eta^2 I + 2 s eta II + III`.
pub fn obata_sign(space: &AmbientSpace) -> f64 {
    match (space.kind(), space.causal_class()) {
        (AmbientKind::DeSitter, CausalClass::SpaceLike) => 1.0,
        _ => -1.0,
    }
}

/// `|| IV - (eta^2 I + 2 s eta II + III) ||_F`.
pub fn obata_identity_residual(bundle: &FormBundle) -> f64 {
    let e = bundle.eta_t();
    let s = obata_sign(&bundle.space);
    let rhs = &bundle.first * (e * e) + &bundle.second * (2.0 * s * e) + &bundle.third;
    (&bundle.fourth - rhs).norm()
}

/// `c + sigma eta_3^2`: the Gauss curvature a surface with conformal normal
/// Gauss map must have.
pub fn conformal_curvature(space: &AmbientSpace, eta_t: f64) -> f64 {
    match (space.kind(), space.causal_class()) {
        (AmbientKind::Hyperbolic, _) => -1.0 + eta_t * eta_t,
        (AmbientKind::DeSitter, CausalClass::SpaceLike) => 1.0 - eta_t * eta_t,
        (AmbientKind::DeSitter, CausalClass::TimeLike) => 1.0 + eta_t * eta_t,
    }
}

/// The proportionality factor a conformal surface must have:
/// `2(H - eta_3)` in hyperbolic space, `2(H + eta_3)` for space-like de
/// Sitter surfaces.
pub fn predicted_rho(bundle: &FormBundle) -> Option<f64> {
    let (h, e) = (bundle.mean_curvature, bundle.eta_t());
    match (bundle.space.kind(), bundle.space.causal_class()) {
        (AmbientKind::Hyperbolic, _) => Some(2.0 * (h - e)),
        (AmbientKind::DeSitter, CausalClass::SpaceLike) => Some(2.0 * (h + e)),
        _ => None,
    }
}

/// Roots of `t^2 - (rho + 2 eta) t + eta^2 = 0`, the admissible principal
/// curvatures of a conformal hypersurface.
pub fn principal_curvature_roots(rho: f64, eta_t: f64) -> [Complex64; 2] {
    let b = rho + 2.0 * eta_t;
    let disc = Complex64::new(b * b - 4.0 * eta_t * eta_t, 0.0).sqrt();
    [(b + disc) / 2.0, (b - disc) / 2.0]
}

/// Gauss curvature from the induced metric alone (Brioschi formula), with
/// metric derivatives by central differences of step `1e-3`.
pub fn intrinsic_gauss_curvature(chart: &SurfaceChart, u: f64, v: f64) -> Result<f64> {
    if chart.ambient().causal_class() != CausalClass::SpaceLike {
        return Err(Error::WrongCausalClass("intrinsic curvature needs a space-like surface".into()));
    }
    let h = 1e-3;
    if !chart.domain().contains_interior(u, v, h) {
        return Err(Error::OutsideDomain { u, v });
    }
    let space = chart.ambient();
    let mut efg = [[[0.0; 3]; 3]; 3];
    for (a, du) in [-1.0, 0.0, 1.0].iter().enumerate() {
        for (b, dv) in [-1.0, 0.0, 1.0].iter().enumerate() {
            let jet = jet2_eval(chart, u + du * h, v + dv * h)?;
            let g = metric_at(&space, jet.x.as_slice())?;
            let i = jet.du.transpose() * g * &jet.du;
            efg[a][b] = [i[(0, 0)], i[(0, 1)], i[(1, 1)]];
        }
    }
    let f = |k: usize, a: usize, b: usize| efg[a][b][k];
    let d_u = |k| (f(k, 2, 1) - f(k, 0, 1)) / (2.0 * h);
    let d_v = |k| (f(k, 1, 2) - f(k, 1, 0)) / (2.0 * h);
    let d_uu = |k| (f(k, 2, 1) - 2.0 * f(k, 1, 1) + f(k, 0, 1)) / (h * h);
    let d_vv = |k| (f(k, 1, 2) - 2.0 * f(k, 1, 1) + f(k, 1, 0)) / (h * h);
    let d_uv = |k| (f(k, 2, 2) - f(k, 2, 0) - f(k, 0, 2) + f(k, 0, 0)) / (4.0 * h * h);
    let (e, ff, g) = (f(0, 1, 1), f(1, 1, 1), f(2, 1, 1));
    let (e_u, e_v, e_vv) = (d_u(0), d_v(0), d_vv(0));
    let (f_u, f_v, f_uv) = (d_u(1), d_v(1), d_uv(1));
    let (g_u, g_v, g_uu) = (d_u(2), d_v(2), d_uu(2));
    let m1 = nalgebra::Matrix3::new(
        -0.5 * e_vv + f_uv - 0.5 * g_uu,
        0.5 * e_u,
        f_u - 0.5 * e_v,
        f_v - 0.5 * g_u,
        e,
        ff,
        0.5 * g_v,
        ff,
        g,
    );
    let m2 = nalgebra::Matrix3::new(0.0, 0.5 * e_v, 0.5 * g_u, 0.5 * e_v, e, ff, 0.5 * g_u, ff, g);
    let w = e * g - ff * ff;
    Ok((m1.determinant() - m2.determinant()) / (w * w))
}
