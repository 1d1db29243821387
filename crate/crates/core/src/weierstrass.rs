//! Space-like surfaces in `dS3` from a normal Gauss map `g` and a de Sitter
//! Gauss map `G` that satisfy the compatibility equation
//!
//! `G_zz̄ + ḡ_z̄/((|g|⁴-1)ḡ) G_z - |g|²ḡ g_z/(|g|⁴-1) G_z̄ = 0`
//!
//! for holomorphic `g` with `|g| > 1` (and its mirror for antiholomorphic
//! `g` with `|g| < 1`). `G` is found from Dirichlet data by a finite
//! difference solve on a rectangular grid in `z = u + iv`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::ambient::{AmbientSpace, HalfSpacePoint};
use crate::calculus::{Jet2, NormalOrientation, Rect};
use crate::error::{Error, Result};
use crate::forms::{conformality_test, fundamental_forms_oriented, DEFAULT_CONFORMAL_TOL};
use crate::gaussmaps::stereo_project;
use crate::linalg::BandMatrix;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default standoff of `|g|` from the unit circle.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Largest grid side accepted by [`solve_de_sitter_map`].
pub const MAX_GRID: usize = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldRole {
    NormalMap,
    DeSitterMap,
}

/// Which half of the representation applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeierstrassCase {
    /// Holomorphic `g` with `|g| > 1`.
    HoloOutside,
    /// Antiholomorphic `g` with `|g| < 1`.
    AntiholoInside,
}

impl WeierstrassCase {
    pub fn label(self) -> &'static str {
        match self {
            WeierstrassCase::HoloOutside => "holomorphic, |g| > 1",
            WeierstrassCase::AntiholoInside => "antiholomorphic, |g| < 1",
        }
    }
}

/// Uniform rectangular grid, `i` along `u` and `j` along `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub u0: f64,
    pub v0: f64,
    pub hu: f64,
    pub hv: f64,
    pub nu: usize,
    pub nv: usize,
}

impl Grid {
    /// `nu x nv` nodes covering `domain`, endpoints included.
    pub fn over(domain: Rect, nu: usize, nv: usize) -> Result<Self> {
        if nu < 3 || nv < 3 {
            return Err(Error::InvalidInput("grids need at least 3 nodes per side".into()));
        }
        Ok(Grid {
            u0: domain.u0,
            v0: domain.v0,
            hu: (domain.u1 - domain.u0) / (nu - 1) as f64,
            hv: (domain.v1 - domain.v0) / (nv - 1) as f64,
            nu,
            nv,
        })
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + self.hu * i as f64
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + self.hv * j as f64
    }

    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.u(i), self.v(j))
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nu || j + 1 == self.nv
    }

    /// Nodes in row-major order (`j` outer).
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nv).flat_map(move |j| (0..self.nu).map(move |i| (i, j)))
    }
}

/// A complex field sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
    role: FieldRole,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>, role: FieldRole) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!("{} values for a grid of {}", values.len(), grid.len())));
        }
        if let Some(k) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite field value at node {k}")));
        }
        Ok(ComplexField { grid, values, role })
    }

    pub fn sample(grid: Grid, role: FieldRole, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().map(|(i, j)| f(grid.z(i, j))).collect();
        ComplexField::new(grid, values, role)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn role(&self) -> FieldRole {
        self.role
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    /// Second-order `d/du`; one-sided on the edges.
    pub fn d_u(&self, i: usize, j: usize) -> Complex64 {
        let (n, h) = (self.grid.nu, self.grid.hu);
        let f = |k: usize| self.at(k, j);
        if i == 0 {
            (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
        } else if i + 1 == n {
            (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
        } else {
            (f(i + 1) - f(i - 1)) / (2.0 * h)
        }
    }

    pub fn d_v(&self, i: usize, j: usize) -> Complex64 {
        let (n, h) = (self.grid.nv, self.grid.hv);
        let f = |k: usize| self.at(i, k);
        if j == 0 {
            (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
        } else if j + 1 == n {
            (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
        } else {
            (f(j + 1) - f(j - 1)) / (2.0 * h)
        }
    }

    /// `(f_u - i f_v) / 2`.
    pub fn d_z(&self, i: usize, j: usize) -> Complex64 {
        (self.d_u(i, j) - I * self.d_v(i, j)) * 0.5
    }

    /// `(f_u + i f_v) / 2`.
    pub fn d_zbar(&self, i: usize, j: usize) -> Complex64 {
        (self.d_u(i, j) + I * self.d_v(i, j)) * 0.5
    }

    /// `f_zz̄ = (f_uu + f_vv) / 4` at an interior node.
    pub fn d_zzbar(&self, i: usize, j: usize) -> Complex64 {
        let (hu, hv) = (self.grid.hu, self.grid.hv);
        let c = self.at(i, j);
        let fuu = (self.at(i + 1, j) - 2.0 * c + self.at(i - 1, j)) / (hu * hu);
        let fvv = (self.at(i, j + 1) - 2.0 * c + self.at(i, j - 1)) / (hv * hv);
        (fuu + fvv) * 0.25
    }

    /// Checks `min |g| >= 1 + delta` (outside case) or `max |g| <= 1 - delta`.
    pub fn check_modulus(&self, case: WeierstrassCase, delta: f64) -> Result<()> {
        for (k, z) in self.values.iter().enumerate() {
            let m = z.norm();
            let ok = match case {
                WeierstrassCase::HoloOutside => m >= 1.0 + delta,
                WeierstrassCase::AntiholoInside => m <= 1.0 - delta,
            };
            if !ok {
                let (i, j) = (k % self.grid.nu, k / self.grid.nu);
                return Err(Error::ConstraintViolation(format!(
                    "|g| = {m} at node ({i}, {j}) violates the {} standoff {delta}",
                    case.label()
                )));
            }
        }
        Ok(())
    }

    /// Rows `i,j,u,v,Re,Im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,u,v,re,im\n");
        for (i, j) in self.grid.nodes() {
            let z = self.at(i, j);
            let _ = writeln!(out, "{i},{j},{:?},{:?},{:?},{:?}", self.grid.u(i), self.grid.v(j), z.re, z.im);
        }
        out
    }
}

/// Coefficients `(a, b)` of `G_zz̄ + a G_z + b G_z̄` at a node.
fn coefficients(g: &ComplexField, case: WeierstrassCase, i: usize, j: usize) -> Result<(Complex64, Complex64)> {
    let gv = g.at(i, j);
    let m2 = gv.norm_sqr();
    if (gv.norm() - 1.0).abs() < DEFAULT_DELTA / 2.0 {
        return Err(Error::UnitModulusSingularity { i, j });
    }
    let (gz, gzb) = (g.d_z(i, j), g.d_zbar(i, j));
    let d = m2 * m2 - 1.0;
    let gc = gv.conj();
    Ok(match case {
        WeierstrassCase::HoloOutside => {
            if gz.norm() < 1e-14 {
                return Err(Error::DegenerateInput(format!("g_z vanishes at ({i}, {j})")));
            }
            // conj(g)_z̄ = conj(g_z)
            (gz.conj() / (gc * d), -(gc * gz * m2) / d)
        }
        WeierstrassCase::AntiholoInside => {
            if gzb.norm() < 1e-14 {
                return Err(Error::DegenerateInput(format!("g_z̄ vanishes at ({i}, {j})")));
            }
            (-(gc * gzb * m2) / d, gzb.conj() / (gc * d))
        }
    })
}

/// Compatibility residual with second-order central differences at an
/// interior node.
pub fn compatibility_residual(
    g: &ComplexField,
    big_g: &ComplexField,
    case: WeierstrassCase,
    i: usize,
    j: usize,
) -> Result<Complex64> {
    let grid = g.grid();
    if i == 0 || j == 0 || i + 1 >= grid.nu || j + 1 >= grid.nv {
        return Err(Error::InvalidInput(format!("({i}, {j}) is not an interior node")));
    }
    let (a, b) = coefficients(g, case, i, j)?;
    Ok(big_g.d_zzbar(i, j) + a * big_g.d_z(i, j) + b * big_g.d_zbar(i, j))
}

/// Compatibility residual of the continuous equation, measured with
/// fourth-order stencils (node at least two cells from the boundary).
pub fn continuum_residual(
    g: &ComplexField,
    big_g: &ComplexField,
    case: WeierstrassCase,
    i: usize,
    j: usize,
) -> Result<Complex64> {
    let grid = *g.grid();
    if i < 2 || j < 2 || i + 2 >= grid.nu || j + 2 >= grid.nv {
        return Err(Error::InvalidInput(format!("({i}, {j}) is too close to the boundary")));
    }
    let (a, b) = coefficients(g, case, i, j)?;
    let f = |di: isize, dj: isize| big_g.at((i as isize + di) as usize, (j as isize + dj) as usize);
    let d1 = |m2: Complex64, m1: Complex64, p1: Complex64, p2: Complex64, h: f64| {
        (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
    };
    let d2 = |m2: Complex64, m1: Complex64, c: Complex64, p1: Complex64, p2: Complex64, h: f64| {
        (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h)
    };
    let c = f(0, 0);
    let gu = d1(f(-2, 0), f(-1, 0), f(1, 0), f(2, 0), grid.hu);
    let gv = d1(f(0, -2), f(0, -1), f(0, 1), f(0, 2), grid.hv);
    let guu = d2(f(-2, 0), f(-1, 0), c, f(1, 0), f(2, 0), grid.hu);
    let gvv = d2(f(0, -2), f(0, -1), c, f(0, 1), f(0, 2), grid.hv);
    let gz = (gu - I * gv) * 0.5;
    let gzb = (gu + I * gv) * 0.5;
    Ok((guu + gvv) * 0.25 + a * gz + b * gzb)
}

/// The assembled Dirichlet problem: unknowns are `(Re G, Im G)` at the
/// interior nodes, `i` fastest.
#[derive(Debug, Clone)]
pub struct DirichletSystem {
    pub matrix: BandMatrix,
    pub rhs: Vec<f64>,
}

fn interior_index(grid: &Grid, i: usize, j: usize) -> usize {
    (j - 1) * (grid.nu - 2) + (i - 1)
}

fn check_grid(grid: &Grid) -> Result<()> {
    if grid.nu > MAX_GRID || grid.nv > MAX_GRID {
        return Err(Error::InvalidInput(format!("grid {}x{} exceeds {MAX_GRID}x{MAX_GRID}", grid.nu, grid.nv)));
    }
    Ok(())
}

/// Assembles the discretised compatibility equation with the boundary values
/// of `boundary` moved to the right-hand side.
pub fn assemble_dirichlet(g: &ComplexField, boundary: &ComplexField, case: WeierstrassCase) -> Result<DirichletSystem> {
    let grid = *g.grid();
    check_grid(&grid)?;
    if boundary.grid() != &grid {
        return Err(Error::InvalidInput("boundary data lives on a different grid".into()));
    }
    g.check_modulus(case, DEFAULT_DELTA)?;
    let ni = grid.nu - 2;
    let n = 2 * ni * (grid.nv - 2);
    let bw = 2 * ni + 1;
    let mut m = BandMatrix::zeros(n, bw, bw);
    let mut rhs = vec![0.0; n];
    let (hu, hv) = (grid.hu, grid.hv);
    for j in 1..grid.nv - 1 {
        for i in 1..grid.nu - 1 {
            let (a, b) = coefficients(g, case, i, j)?;
            // a G_z + b G_z̄ = p G_u + q G_v
            let p = (a + b) * 0.5;
            let q = (b - a) * I * 0.5;
            let row = 2 * interior_index(&grid, i, j);
            let stencil = [
                (i, j, Complex64::from(-0.5 / (hu * hu) - 0.5 / (hv * hv))),
                (i + 1, j, 0.25 / (hu * hu) + p / (2.0 * hu)),
                (i - 1, j, 0.25 / (hu * hu) - p / (2.0 * hu)),
                (i, j + 1, 0.25 / (hv * hv) + q / (2.0 * hv)),
                (i, j - 1, 0.25 / (hv * hv) - q / (2.0 * hv)),
            ];
            for (ii, jj, c) in stencil {
                if grid.is_boundary(ii, jj) {
                    let w = c * boundary.at(ii, jj);
                    rhs[row] -= w.re;
                    rhs[row + 1] -= w.im;
                } else {
                    let col = 2 * interior_index(&grid, ii, jj);
                    m.add(row, col, c.re);
                    m.add(row, col + 1, -c.im);
                    m.add(row + 1, col, c.im);
                    m.add(row + 1, col + 1, c.re);
                }
            }
        }
    }
    Ok(DirichletSystem { matrix: m, rhs })
}

/// Solution of the Dirichlet problem with the largest residual of the linear
/// system.
#[derive(Debug, Clone)]
pub struct DirichletSolution {
    pub field: ComplexField,
    /// `max |A x - b|`.
    pub linear_residual: f64,
}

/// Solves the discretised compatibility equation for `G` with the boundary
/// values of `boundary`, by banded LU with partial pivoting.
pub fn solve_de_sitter_map(
    g: &ComplexField,
    boundary: &ComplexField,
    case: WeierstrassCase,
) -> Result<DirichletSolution> {
    let sys = assemble_dirichlet(g, boundary, case)?;
    let x = sys.matrix.clone().factor()?.solve(&sys.rhs);
    let ax = sys.matrix.mul_vec(&x);
    let linear_residual = ax.iter().zip(&sys.rhs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let grid = *g.grid();
    let values = grid
        .nodes()
        .map(|(i, j)| {
            if grid.is_boundary(i, j) {
                boundary.at(i, j)
            } else {
                let k = 2 * interior_index(&grid, i, j);
                Complex64::new(x[k], x[k + 1])
            }
        })
        .collect();
    Ok(DirichletSolution { field: ComplexField::new(grid, values, FieldRole::DeSitterMap)?, linear_residual })
}

/// Why a sample was left out of a built surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    /// `G_z/g_z > 0` fails (resp. `G_z̄/(|g|² g_z̄) > 0`).
    RatioNotPositive,
    /// `|g|²|G_z̄| > |G_z|` fails (resp. `|g|²|G_z| < |G_z̄|`).
    ModulusInequality,
}

/// Quantities recomputed from the built samples by finite differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub eta: [f64; 3],
    pub g: Complex64,
    pub k: f64,
    pub conformal_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleDiagnostics {
    pub i: usize,
    pub j: usize,
    /// `G_z/g_z` (resp. `G_z̄/(|g|² g_z̄)`); must be real and positive.
    pub ratio: Complex64,
    /// `|g|²|G_z̄| / |G_z|` (resp. `|g|²|G_z| / |G_z̄|`).
    pub modulus_ratio: f64,
    /// Compatibility residual at interior nodes.
    pub residual: Option<f64>,
    /// `eta_3 = (1+|g|²)/(|g|²-1)` as predicted from `g`.
    pub eta3: f64,
    /// `K = 1 - eta_3²`.
    pub k: f64,
    pub dropped: Option<DropReason>,
    pub measured: Option<Measured>,
}

#[derive(Debug, Clone)]
pub struct BuiltSurface {
    pub grid: Grid,
    pub case: WeierstrassCase,
    /// Row-major; `None` for dropped samples.
    pub samples: Vec<Option<HalfSpacePoint>>,
    pub diagnostics: Vec<SampleDiagnostics>,
}

impl BuiltSurface {
    pub fn sample(&self, i: usize, j: usize) -> Option<&HalfSpacePoint> {
        self.samples[self.grid.index(i, j)].as_ref()
    }

    pub fn kept(&self) -> usize {
        self.samples.iter().filter(|s| s.is_some()).count()
    }

    /// Second-order jet at a node whose eight neighbours are kept. Nodes next
    /// to the edge are skipped: edge samples come from one-sided quotients
    /// and differencing them again costs an order.
    pub fn jet(&self, i: usize, j: usize) -> Option<Jet2> {
        let grid = &self.grid;
        if i < 2 || j < 2 || i + 2 >= grid.nu || j + 2 >= grid.nv {
            return None;
        }
        let mut p = [[[0.0; 3]; 3]; 3];
        for (a, row) in p.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = self.sample(i + a - 1, j + b - 1)?.xyz();
            }
        }
        let (hu, hv) = (grid.hu, grid.hv);
        let comp = |f: &dyn Fn(usize) -> f64| -> [f64; 3] { [f(0), f(1), f(2)] };
        let xu = comp(&|c| (p[2][1][c] - p[0][1][c]) / (2.0 * hu));
        let xv = comp(&|c| (p[1][2][c] - p[1][0][c]) / (2.0 * hv));
        let xuu = comp(&|c| (p[2][1][c] - 2.0 * p[1][1][c] + p[0][1][c]) / (hu * hu));
        let xvv = comp(&|c| (p[1][2][c] - 2.0 * p[1][1][c] + p[1][0][c]) / (hv * hv));
        let xuv = comp(&|c| (p[2][2][c] - p[2][0][c] - p[0][2][c] + p[0][0][c]) / (4.0 * hu * hv));
        let x = nalgebra::DVector::from_column_slice(&p[1][1]);
        let du = nalgebra::DMatrix::from_fn(3, 2, |r, c| if c == 0 { xu[r] } else { xv[r] });
        let second = [[xuu, xuv], [xuv, xvv]];
        let duu = (0..2).map(|a| nalgebra::DMatrix::from_fn(3, 2, |r, b| second[a][b][r])).collect();
        Jet2::new(x, du, duu).ok()
    }
}

/// Options for [`build_surface`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// A kept sample fails with `NonRealHeight` when the height formula has
    /// `|Im| > tol * |value|`. `None` scales the tolerance with the grid:
    /// `max(1e-8, 10 h²)`, the size of the difference-quotient error.
    pub realness_tol: Option<f64>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { realness_tol: None }
    }
}

/// Surface from `g` and `G` on a common grid; derivatives are second-order
/// difference quotients.
///
/// Heights are taken real (after the realness check) and the horizontal
/// part is `G - x3 g`, so `x1 + i x2 + x3 g = G` holds to rounding at every
/// kept sample.
pub fn build_surface(
    g: &ComplexField,
    big_g: &ComplexField,
    case: WeierstrassCase,
    opts: BuildOptions,
) -> Result<BuiltSurface> {
    let grid = *g.grid();
    if big_g.grid() != &grid {
        return Err(Error::InvalidInput("g and G live on different grids".into()));
    }
    g.check_modulus(case, DEFAULT_DELTA)?;
    let h = grid.hu.max(grid.hv);
    let tol = opts.realness_tol.unwrap_or((10.0 * h * h).max(1e-8));
    let mut samples = Vec::with_capacity(grid.len());
    let mut diagnostics = Vec::with_capacity(grid.len());
    for (i, j) in grid.nodes() {
        let gv = g.at(i, j);
        let m2 = gv.norm_sqr();
        let (gz, gzb) = (g.d_z(i, j), g.d_zbar(i, j));
        let (bz, bzb) = (big_g.d_z(i, j), big_g.d_zbar(i, j));
        let (ratio, modulus_ratio, ok_mod, x3c) = match case {
            WeierstrassCase::HoloOutside => {
                let r = bz / gz;
                let mr = m2 * bzb.norm() / bz.norm();
                (r, mr, mr > 1.0, (1.0 + m2) / (m2 * gz) * bz)
            }
            WeierstrassCase::AntiholoInside => {
                let r = bzb / (m2 * gzb);
                let mr = m2 * bz.norm() / bzb.norm();
                (r, mr, mr < 1.0, (1.0 + m2) / (m2 * gzb) * bzb)
            }
        };
        let residual =
            if grid.is_boundary(i, j) { None } else { Some(compatibility_residual(g, big_g, case, i, j)?.norm()) };
        let eta3 = (1.0 + m2) / (m2 - 1.0);
        let dropped = if !(ratio.re > 0.0) {
            Some(DropReason::RatioNotPositive)
        } else if !ok_mod {
            Some(DropReason::ModulusInequality)
        } else {
            None
        };
        let sample = match dropped {
            Some(_) => None,
            None => {
                if x3c.im.abs() > tol * x3c.norm() {
                    return Err(Error::NonRealHeight { i, j, ratio: x3c.im.abs() / x3c.norm() });
                }
                let x3 = x3c.re;
                let w = big_g.at(i, j) - gv * x3;
                Some(HalfSpacePoint::new(vec![w.re, w.im, x3])?)
            }
        };
        samples.push(sample);
        diagnostics.push(SampleDiagnostics {
            i,
            j,
            ratio,
            modulus_ratio,
            residual,
            eta3,
            k: 1.0 - eta3 * eta3,
            dropped,
            measured: None,
        });
    }
    if samples.iter().all(|s| s.is_none()) {
        return Err(Error::EmptyOutput);
    }
    let mut out = BuiltSurface { grid, case, samples, diagnostics };
    let ds3 = AmbientSpace::ds3();
    // eta_3 = (1+|g|²)/(|g|²-1) is negative in the antiholomorphic case
    let orientation = match case {
        WeierstrassCase::HoloOutside => NormalOrientation::UpperHalf,
        WeierstrassCase::AntiholoInside => NormalOrientation::LowerHalf,
    };
    for k in 0..out.diagnostics.len() {
        let (i, j) = (out.diagnostics[k].i, out.diagnostics[k].j);
        let Some(jet) = out.jet(i, j) else { continue };
        let Ok(b) = fundamental_forms_oriented(&jet, &ds3, orientation) else { continue };
        let eta = [b.eta[0], b.eta[1], b.eta[2]];
        let Ok(gm) = stereo_project(eta, &ds3) else { continue };
        let Some(gm) = gm.finite() else { continue };
        out.diagnostics[k].measured = Some(Measured {
            eta,
            g: gm,
            k: b.k(),
            conformal_residual: conformality_test(&b, DEFAULT_CONFORMAL_TOL).residual,
        });
    }
    Ok(out)
}

/// Radially symmetric solution `G = z h(|z|²)` of the compatibility equation
/// for `g(z) = z`.
///
/// With `t = ln |z|²` the equation reduces to `h'' = -h / (e^{2t} - 1)`;
/// the profile is fixed by `h = 0`, `dh/dt = 1` at `|z|² = 4` and integrated
/// by classical Runge-Kutta.
#[derive(Debug, Clone, Copy)]
pub struct RadialProfile {
    t0: f64,
    h0: f64,
    dh0: f64,
}

impl Default for RadialProfile {
    fn default() -> Self {
        RadialProfile::new(4.0, 0.0, 1.0)
    }
}

impl RadialProfile {
    /// Profile with `h = h0` and `dh/dt = dh0` at `|z|² = rho0`.
    pub fn new(rho0: f64, h0: f64, dh0: f64) -> Self {
        RadialProfile { t0: rho0.ln(), h0, dh0 }
    }

    /// `(h, dh/dt)` at `|z|² = rho`.
    pub fn eval(&self, rho: f64) -> (f64, f64) {
        let t1 = rho.ln();
        let steps = ((t1 - self.t0).abs() / 1e-3).ceil().max(1.0) as usize;
        let dt = (t1 - self.t0) / steps as f64;
        let rhs = |t: f64, y: [f64; 2]| [y[1], -y[0] / ((2.0 * t).exp() - 1.0)];
        let mut y = [self.h0, self.dh0];
        let mut t = self.t0;
        for _ in 0..steps {
            let k1 = rhs(t, y);
            let k2 = rhs(t + dt / 2.0, [y[0] + dt / 2.0 * k1[0], y[1] + dt / 2.0 * k1[1]]);
            let k3 = rhs(t + dt / 2.0, [y[0] + dt / 2.0 * k2[0], y[1] + dt / 2.0 * k2[1]]);
            let k4 = rhs(t + dt, [y[0] + dt * k3[0], y[1] + dt * k3[1]]);
            for c in 0..2 {
                y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            t += dt;
        }
        (y[0], y[1])
    }

    pub fn big_g(&self, z: Complex64) -> Complex64 {
        z * self.eval(z.norm_sqr()).0
    }
}
