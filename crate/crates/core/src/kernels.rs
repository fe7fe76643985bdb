//! Heat kernels for `d_t = 1/2 d_x^2` and the boundary constant `a`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::grid::node_weights;
use crate::{BoundaryParams, CoreError, Result};

/// Diffusion coefficient of the linear part.
pub const DIFFUSION: f64 = 0.5;

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(CoreError::Domain(format!("kernel time must be positive, got {t}")))
    }
}

fn gauss_unchecked(t: f64, x: f64) -> f64 {
    let var = 2.0 * DIFFUSION * t;
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Whole line kernel `(2 pi t)^{-1/2} exp(-x^2 / 2t)`.
pub fn gauss_kernel(t: f64, x: f64) -> Result<f64> {
    check_time(t)?;
    Ok(gauss_unchecked(t, x))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub error_bound: f64,
}

/// Neumann kernel on [0, 1] by the method of images, `|m| <= images`.
pub fn neumann_kernel(t: f64, x: f64, y: f64, images: usize) -> Result<KernelValue> {
    check_time(t)?;
    if images == 0 {
        return Err(CoreError::config("images", "need at least one image"));
    }
    let m = images as i64;
    let mut value = 0.0;
    for k in -m..=m {
        let shift = 2.0 * k as f64;
        value += gauss_unchecked(t, x + y + shift) + gauss_unchecked(t, x - y + shift);
    }
    let reach = 2.0 * (images as f64) - 2.0;
    Ok(KernelValue {
        value,
        error_bound: 2.0 * (-reach * reach / (2.0 * t)).exp(),
    })
}

/// Finite difference semigroup for `1/2 d_x^2` with Robin conditions
/// `Z'(0) = (u - 1/2) Z(0)`, `Z'(1) = -(v - 1/2) Z(1)` on `cells + 1` nodes.
#[derive(Clone, Debug)]
pub struct RobinSemigroup {
    cells: usize,
    weights: Vec<f64>,
    eigenvalues: DVector<f64>,
    /// Eigenvectors of the symmetrised generator `D^{1/2} A D^{-1/2}`.
    eigenvectors: DMatrix<f64>,
    generator: DMatrix<f64>,
}

/// Dense discrete generator `A` with ghost point boundary rows.
pub fn robin_generator(params: &BoundaryParams, cells: usize) -> DMatrix<f64> {
    let n = cells + 1;
    let dx = 1.0 / cells as f64;
    let c = DIFFUSION / (dx * dx);
    let mut a = DMatrix::zeros(n, n);
    for j in 1..cells {
        a[(j, j - 1)] = c;
        a[(j, j)] = -2.0 * c;
        a[(j, j + 1)] = c;
    }
    a[(0, 0)] = -2.0 * c * (1.0 + dx * params.robin_left());
    a[(0, 1)] = 2.0 * c;
    a[(cells, cells)] = -2.0 * c * (1.0 + dx * params.robin_right());
    a[(cells, cells - 1)] = 2.0 * c;
    a
}

impl RobinSemigroup {
    pub fn new(params: &BoundaryParams, cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(CoreError::config("cells", "need at least two cells"));
        }
        let generator = robin_generator(params, cells);
        let weights = node_weights(cells);
        let n = cells + 1;
        let sym = DMatrix::from_fn(n, n, |i, j| {
            generator[(i, j)] * (weights[i] / weights[j]).sqrt()
        });
        let sym = (&sym + sym.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        Ok(RobinSemigroup {
            cells,
            weights,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            generator,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    fn exp_sym(&self, t: f64) -> DMatrix<f64> {
        let e = self.eigenvalues.map(|l| (t * l).exp());
        &self.eigenvectors * DMatrix::from_diagonal(&e) * self.eigenvectors.transpose()
    }

    /// `K[i][k]`, the kernel density from a discrete delta at node `k`.
    pub fn kernel(&self, t: f64) -> Result<DMatrix<f64>> {
        check_time(t)?;
        let s = self.exp_sym(t);
        let w = &self.weights;
        Ok(DMatrix::from_fn(s.nrows(), s.ncols(), |i, k| s[(i, k)] / (w[i] * w[k]).sqrt()))
    }

    /// `(P_t f)(x_i) = sum_k K(t, x_i, y_k) f(y_k) w_k`.
    pub fn apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        if t == 0.0 {
            return Ok(f.to_vec());
        }
        let k = self.kernel(t)?;
        Ok((0..f.len())
            .map(|i| (0..f.len()).map(|j| k[(i, j)] * f[j] * self.weights[j]).sum())
            .collect())
    }

    /// Largest eigenvalue and its eigenfunction, normalised to unit `L^2` norm
    /// and positive sign.
    pub fn principal_mode(&self) -> (f64, Vec<f64>) {
        let (idx, &lambda) = self
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty spectrum");
        let col = self.eigenvectors.column(idx);
        let mut v: Vec<f64> = col.iter().zip(&self.weights).map(|(c, w)| c / w.sqrt()).collect();
        let norm = v.iter().zip(&self.weights).map(|(x, w)| x * x * w).sum::<f64>().sqrt();
        let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        v.iter_mut().for_each(|x| *x *= sign / norm);
        (lambda, v)
    }

    /// Largest stable explicit Euler step, `2 / |lambda_min|`.
    pub fn explicit_step_limit(&self) -> f64 {
        let most_negative = self.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        2.0 / most_negative.abs()
    }

    /// Kernel by explicit Euler steps of size at most `dt`; rejects unstable steps.
    pub fn kernel_explicit(&self, t: f64, dt: f64) -> Result<DMatrix<f64>> {
        check_time(t)?;
        if dt <= 0.0 || dt > self.explicit_step_limit() {
            return Err(CoreError::config(
                "dt",
                format!("explicit step {dt} exceeds the stability limit {}", self.explicit_step_limit()),
            ));
        }
        let steps = (t / dt).ceil() as usize;
        let h = t / steps as f64;
        let n = self.cells + 1;
        let step = DMatrix::identity(n, n) + &self.generator * h;
        let mut m = DMatrix::from_diagonal(&DVector::from_iterator(n, self.weights.iter().map(|w| 1.0 / w)));
        for _ in 0..steps {
            m = &step * m;
        }
        Ok(m)
    }
}

/// Robin kernel on the grid of `cells` cells at the nodes nearest `x`, `y`.
pub fn robin_kernel(t: f64, x: f64, y: f64, params: &BoundaryParams, cells: usize) -> Result<f64> {
    let sg = RobinSemigroup::new(params, cells)?;
    let k = sg.kernel(t)?;
    let i = ((x * cells as f64).round() as usize).min(cells);
    let j = ((y * cells as f64).round() as usize).min(cells);
    Ok(k[(i, j)])
}

/// Separable even bump `c_t (1 - (s/R_t)^2)^3 c_x (1 - (y/R_x)^2)^3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    pub time_radius: f64,
    pub space_radius: f64,
    pub time_norm: f64,
    pub space_norm: f64,
}

const BUMP_MASS: f64 = 32.0 / 35.0;

impl Mollifier {
    /// Unit mass bump with the given radii.
    pub fn bump(time_radius: f64, space_radius: f64) -> Self {
        Mollifier {
            time_radius,
            space_radius,
            time_norm: 1.0 / (BUMP_MASS * time_radius),
            space_norm: 1.0 / (BUMP_MASS * space_radius),
        }
    }

    fn profile(r: f64, norm: f64, x: f64) -> f64 {
        let q = x / r;
        if q.abs() >= 1.0 {
            0.0
        } else {
            norm * (1.0 - q * q).powi(3)
        }
    }

    pub fn time_factor(&self, s: f64) -> f64 {
        Mollifier::profile(self.time_radius, self.time_norm, s)
    }

    pub fn space_factor(&self, y: f64) -> f64 {
        Mollifier::profile(self.space_radius, self.space_norm, y)
    }

    pub fn eval(&self, s: f64, y: f64) -> f64 {
        self.time_factor(s) * self.space_factor(y)
    }

    pub fn mass(&self) -> f64 {
        let gl = gl(8);
        let mt = gl.integrate(-self.time_radius, self.time_radius, |s| self.time_factor(s));
        let mx = gl.integrate(-self.space_radius, self.space_radius, |y| self.space_factor(y));
        mt * mx
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_radius > 0.0 && self.space_radius > 0.0) {
            return Err(CoreError::config("mollifier", "radii must be positive"));
        }
        let m = self.mass();
        if (m - 1.0).abs() > 1e-10 {
            return Err(CoreError::config("mollifier", format!("mass is {m}, expected 1")));
        }
        Ok(())
    }
}

impl Default for Mollifier {
    fn default() -> Self {
        Mollifier::bump(1.0, 1.0)
    }
}

fn gl(n: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(n).expect("positive order"))
}

/// Autocorrelation `int f(x) f(x + s) dx` of one bump factor; the
/// integrand is a polynomial of degree 12, so 8 Gauss nodes are exact.
fn autocorrelation(r: f64, norm: f64, s: f64, rule: &GaussLegendre) -> f64 {
    let s = s.abs();
    if s >= 2.0 * r {
        return 0.0;
    }
    rule.integrate(-r, r - s, |x| Mollifier::profile(r, norm, x) * Mollifier::profile(r, norm, x + s))
}

/// `1/2 erfc(|z| / sqrt 2) - 2 |z| N(1, z)`: the bracket at `y = z sqrt(s)`.
fn bracket(z: f64) -> f64 {
    let z = z.abs();
    0.5 * erfc(z / 2f64.sqrt()) - 2.0 * z * (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Cut-off of the scaled space variable; the bracket is below 1e-20 beyond it.
const Z_MAX: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResolution {
    /// Midpoint cells in `r = sqrt(|s|)`.
    pub r_cells: usize,
    /// Midpoint cells in the scaled space variable on `[0, Z_MAX]`.
    pub z_cells: usize,
}

impl Default for QuadratureResolution {
    fn default() -> Self {
        QuadratureResolution {
            r_cells: 200,
            z_cells: 800,
        }
    }
}

impl QuadratureResolution {
    pub fn scaled(&self, factor: usize) -> Self {
        QuadratureResolution {
            r_cells: self.r_cells * factor,
            z_cells: self.z_cells * factor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantA {
    pub value: f64,
    pub error_estimate: f64,
    pub resolution: QuadratureResolution,
}

/// Plain midpoint value of the integral defining `a`. With `half` the
/// space integral runs over `z >= 0` and is doubled.
pub fn a_midpoint(m: &Mollifier, res: QuadratureResolution, half: bool) -> f64 {
    let rule = gl(8);
    let r_max = (2.0 * m.time_radius).sqrt();
    let hr = r_max / res.r_cells as f64;
    let (z_lo, z_cells) = if half { (0.0, res.z_cells) } else { (-Z_MAX, 2 * res.z_cells) };
    let hz = Z_MAX / res.z_cells as f64;
    let zs: Vec<(f64, f64)> = (0..z_cells)
        .map(|k| {
            let z = z_lo + (k as f64 + 0.5) * hz;
            (z, bracket(z))
        })
        .collect();
    let mut total = 0.0;
    for i in 0..res.r_cells {
        let r = (i as f64 + 0.5) * hr;
        let kt = autocorrelation(m.time_radius, m.time_norm, r * r, &rule);
        if kt == 0.0 {
            continue;
        }
        let inner: f64 = zs
            .iter()
            .map(|(z, b)| autocorrelation(m.space_radius, m.space_norm, r * z, &rule) * b)
            .sum::<f64>()
            * hz;
        let inner = if half { 2.0 * inner } else { inner };
        total += r * r * kt * inner;
    }
    // Factor 2 from s < 0, factor 2 r from ds = 2 r dr, one r from dy = r dz.
    2.0 * 2.0 * total * hr
}

/// The constant `a` with one Richardson step on the midpoint rule.
pub fn constant_a(m: &Mollifier, res: QuadratureResolution) -> Result<ConstantA> {
    m.validate()?;
    if res.r_cells == 0 || res.z_cells == 0 {
        return Err(CoreError::config("resolution", "cell counts must be positive"));
    }
    let coarse = a_midpoint(m, res, true);
    let fine = a_midpoint(m, res.scaled(2), true);
    Ok(ConstantA {
        value: (4.0 * fine - coarse) / 3.0,
        error_estimate: (fine - coarse).abs() / 3.0,
        resolution: res,
    })
}
