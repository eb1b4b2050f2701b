//! Analytic support oracles.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::{tangential_eigenvalues, Mat3, SupportFunction, Vec3};
use crate::error::{Error, Result};
use crate::quadrature::sphere_rule;

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 3 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Identity on the first `dim` coordinates.
fn ambient_identity(dim: usize) -> Mat3 {
    let mut m = Mat3::identity();
    if dim == 2 {
        m[(2, 2)] = 0.0;
    }
    m
}

/// Hessian of `|x|`: `(I - x̂x̂ᵀ)/|x|`.
fn norm_hessian(dim: usize, x: &Vec3) -> Mat3 {
    let r = x.norm();
    let xh = x / r;
    (ambient_identity(dim) - xh * xh.transpose()) / r
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    dim: usize,
    radius: f64,
}

impl Ball {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameters(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { dim, radius })
    }
}

impl SupportFunction for Ball {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vec3) -> f64 {
        self.radius * x.norm()
    }

    fn gradient(&self, x: &Vec3) -> Vec3 {
        x * (self.radius / x.norm())
    }

    fn hessian(&self, x: &Vec3) -> Mat3 {
        norm_hessian(self.dim, x) * self.radius
    }

    fn polar(&self) -> Option<Arc<dyn SupportFunction>> {
        Some(Arc::new(Ball {
            dim: self.dim,
            radius: 1.0 / self.radius,
        }))
    }

    fn kind(&self) -> &'static str {
        "ball"
    }
}

/// `{x : xᵀM⁻¹x ≤ 1}`, with support `√(uᵀMu)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipsoid {
    dim: usize,
    matrix: Mat3,
    inverse: Mat3,
}

impl Ellipsoid {
    /// `matrix` is the `n×n` block of `M`, embedded in a 3×3 matrix.
    pub fn new(dim: usize, matrix: Mat3) -> Result<Self> {
        check_dim(dim)?;
        let mut m = matrix;
        if dim == 2 {
            m.fixed_view_mut::<1, 3>(2, 0).fill(0.0);
            m.fixed_view_mut::<3, 1>(0, 2).fill(0.0);
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        if (m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::NotPositiveDefinite);
        }
        let inverse = if dim == 2 {
            let block = Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            if block.cholesky().is_none() {
                return Err(Error::NotPositiveDefinite);
            }
            let inv = block.try_inverse().ok_or(Error::NotPositiveDefinite)?;
            Mat3::new(inv[(0, 0)], inv[(0, 1)], 0.0, inv[(1, 0)], inv[(1, 1)], 0.0, 0.0, 0.0, 0.0)
        } else {
            let chol = m.cholesky().ok_or(Error::NotPositiveDefinite)?;
            chol.inverse()
        };
        Ok(Self { dim, matrix: m, inverse })
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        check_dim(dim)?;
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParameters(format!("ellipsoid matrix must be {dim}x{dim}")));
        }
        let mut m = Mat3::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Self::new(dim, m)
    }

    /// Axis-aligned ellipsoid; `M = diag(a_i²)`.
    pub fn from_semi_axes(axes: &[f64]) -> Result<Self> {
        let dim = axes.len();
        check_dim(dim)?;
        if axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::NotPositiveDefinite);
        }
        let mut m = Mat3::zeros();
        for (i, a) in axes.iter().enumerate() {
            m[(i, i)] = a * a;
        }
        Self::new(dim, m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }
}

impl SupportFunction for Ellipsoid {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vec3) -> f64 {
        x.dot(&(self.matrix * x)).sqrt()
    }

    fn gradient(&self, x: &Vec3) -> Vec3 {
        let mx = self.matrix * x;
        mx / x.dot(&mx).sqrt()
    }

    fn hessian(&self, x: &Vec3) -> Mat3 {
        let mx = self.matrix * x;
        let h2 = x.dot(&mx);
        let h = h2.sqrt();
        (self.matrix - mx * mx.transpose() / h2) / h
    }

    fn polar(&self) -> Option<Arc<dyn SupportFunction>> {
        Some(Arc::new(Ellipsoid {
            dim: self.dim,
            matrix: self.inverse,
            inverse: self.matrix,
        }))
    }

    fn kind(&self) -> &'static str {
        "ellipsoid"
    }
}

/// Planar body with `h(θ) = 1 + ε cos(Lθ)`.
///
/// For a planar 1-homogeneous `F(x) = |x| g(θ)` the gradient is
/// `g e_r + g' e_θ` and the Hessian is `(g + g'') / |x| · e_θ e_θᵀ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbedCircle {
    mode: u32,
    epsilon: f64,
}

impl PerturbedCircle {
    pub fn new(mode: u32, epsilon: f64) -> Result<Self> {
        if mode < 3 {
            return Err(Error::InvalidParameters(format!("perturbation mode must be at least 3, got {mode}")));
        }
        let bound = Self::epsilon_bound(mode);
        if !(epsilon.abs() < bound) {
            return Err(Error::PerturbationTooLarge { epsilon, bound });
        }
        Ok(Self { mode, epsilon })
    }

    /// Radius of curvature is `1 - ε(L² - 1) cos(Lθ)`, positive iff `|ε| < 1/(L² - 1)`.
    pub fn epsilon_bound(mode: u32) -> f64 {
        let l = mode as f64;
        1.0 / (l * l - 1.0)
    }

    pub fn mode(&self) -> u32 {
        self.mode
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn profile(&self, theta: f64) -> (f64, f64, f64) {
        let l = self.mode as f64;
        let (s, c) = (l * theta).sin_cos();
        (
            1.0 + self.epsilon * c,
            -self.epsilon * l * s,
            -self.epsilon * l * l * c,
        )
    }
}

impl SupportFunction for PerturbedCircle {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &Vec3) -> f64 {
        let (g, _, _) = self.profile(x.y.atan2(x.x));
        x.xy().norm() * g
    }

    fn gradient(&self, x: &Vec3) -> Vec3 {
        let theta = x.y.atan2(x.x);
        let (g, dg, _) = self.profile(theta);
        let (s, c) = theta.sin_cos();
        Vec3::new(g * c - dg * s, g * s + dg * c, 0.0)
    }

    fn hessian(&self, x: &Vec3) -> Mat3 {
        let r = x.xy().norm();
        let theta = x.y.atan2(x.x);
        let (g, _, d2g) = self.profile(theta);
        let (s, c) = theta.sin_cos();
        let e = Vec3::new(-s, c, 0.0);
        e * e.transpose() * ((g + d2g) / r)
    }

    fn kind(&self) -> &'static str {
        "perturbed_ball"
    }
}

/// Odd cubic harmonic polynomials used as perturbations of `S²`, both
/// normalized to maximum 1 on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphericalHarmonic {
    /// `z³ - (3/2) z (x² + y²)`.
    Zonal3,
    /// `x³ - 3xy²`.
    Sectoral3,
}

impl SphericalHarmonic {
    pub fn id(&self) -> &'static str {
        match self {
            SphericalHarmonic::Zonal3 => "zonal3",
            SphericalHarmonic::Sectoral3 => "sectoral3",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "zonal3" => Some(SphericalHarmonic::Zonal3),
            "sectoral3" => Some(SphericalHarmonic::Sectoral3),
            _ => None,
        }
    }

    pub fn degree(&self) -> i32 {
        3
    }

    fn value(&self, x: &Vec3) -> f64 {
        match self {
            SphericalHarmonic::Zonal3 => x.z * x.z * x.z - 1.5 * x.z * (x.x * x.x + x.y * x.y),
            SphericalHarmonic::Sectoral3 => x.x * x.x * x.x - 3.0 * x.x * x.y * x.y,
        }
    }

    fn gradient(&self, x: &Vec3) -> Vec3 {
        match self {
            SphericalHarmonic::Zonal3 => Vec3::new(
                -3.0 * x.x * x.z,
                -3.0 * x.y * x.z,
                3.0 * x.z * x.z - 1.5 * (x.x * x.x + x.y * x.y),
            ),
            SphericalHarmonic::Sectoral3 => Vec3::new(3.0 * (x.x * x.x - x.y * x.y), -6.0 * x.x * x.y, 0.0),
        }
    }

    fn hessian(&self, x: &Vec3) -> Mat3 {
        match self {
            SphericalHarmonic::Zonal3 => Mat3::new(
                -3.0 * x.z,
                0.0,
                -3.0 * x.x,
                0.0,
                -3.0 * x.z,
                -3.0 * x.y,
                -3.0 * x.x,
                -3.0 * x.y,
                6.0 * x.z,
            ),
            SphericalHarmonic::Sectoral3 => Mat3::new(
                6.0 * x.x,
                -6.0 * x.y,
                0.0,
                -6.0 * x.y,
                -6.0 * x.x,
                0.0,
                0.0,
                0.0,
                0.0,
            ),
        }
    }
}

impl fmt::Display for SphericalHarmonic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Body in ℝ³ with `h(u) = 1 + ε P(u)` on the sphere, extended as
/// `|x| + ε P(x) |x|^{1-d}` for a harmonic `P` of degree `d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbedSphere {
    harmonic: SphericalHarmonic,
    epsilon: f64,
}

impl PerturbedSphere {
    pub fn new(harmonic: SphericalHarmonic, epsilon: f64) -> Result<Self> {
        let bound = Self::epsilon_bound(harmonic);
        if !(epsilon.abs() < bound) {
            return Err(Error::PerturbationTooLarge { epsilon, bound });
        }
        Ok(Self { harmonic, epsilon })
    }

    /// Largest `|ε|` keeping the sampled radii `1 + ε λ(u)` positive, where
    /// `λ` ranges over tangential eigenvalues of the perturbation Hessian.
    ///
    /// The harmonics are odd, so `λ(-u) = -λ(u)` and one sign suffices.
    pub fn epsilon_bound(harmonic: SphericalHarmonic) -> f64 {
        let rule = sphere_rule(48, 96).expect("valid rule");
        let unperturbed = PerturbedSphere { harmonic, epsilon: 0.0 };
        let worst = rule
            .nodes()
            .iter()
            .map(|u| {
                let t = unperturbed.perturbation_hessian(u);
                let (eig, _) = tangential_eigenvalues(3, &t, u);
                eig[0].min(eig[1])
            })
            .fold(0.0_f64, f64::min);
        if worst >= 0.0 {
            f64::INFINITY
        } else {
            1.0 / (-worst)
        }
    }

    pub fn harmonic(&self) -> SphericalHarmonic {
        self.harmonic
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn perturbation_value(&self, x: &Vec3) -> f64 {
        let r = x.norm();
        self.harmonic.value(x) * r.powi(1 - self.harmonic.degree())
    }

    fn perturbation_gradient(&self, x: &Vec3) -> Vec3 {
        let d = self.harmonic.degree();
        let r = x.norm();
        let alpha = (1 - d) as f64;
        self.harmonic.gradient(x) * r.powi(1 - d) + x * (alpha * self.harmonic.value(x) * r.powi(-1 - d))
    }

    fn perturbation_hessian(&self, x: &Vec3) -> Mat3 {
        let d = self.harmonic.degree();
        let alpha = (1 - d) as f64;
        let r = x.norm();
        let p = self.harmonic.value(x);
        let gp = self.harmonic.gradient(x);
        let q = r.powi(1 - d);
        // ∇(|x|^α) = α|x|^{α-2} x, ∇²(|x|^α) = α|x|^{α-2} I + α(α-2)|x|^{α-4} x xᵀ
        let gq = x * (alpha * r.powi(-1 - d));
        let hq = Mat3::identity() * (alpha * r.powi(-1 - d)) + x * x.transpose() * (alpha * (alpha - 2.0) * r.powi(-3 - d));
        self.harmonic.hessian(x) * q + gp * gq.transpose() + gq * gp.transpose() + hq * p
    }
}

impl SupportFunction for PerturbedSphere {
    fn dim(&self) -> usize {
        3
    }

    fn value(&self, x: &Vec3) -> f64 {
        x.norm() + self.epsilon * self.perturbation_value(x)
    }

    fn gradient(&self, x: &Vec3) -> Vec3 {
        x / x.norm() + self.perturbation_gradient(x) * self.epsilon
    }

    fn hessian(&self, x: &Vec3) -> Mat3 {
        norm_hessian(3, x) + self.perturbation_hessian(x) * self.epsilon
    }

    fn kind(&self) -> &'static str {
        "perturbed_ball"
    }
}

/// Support oracle from values only; derivatives by central differences
/// with one Richardson level. Intended for experimentation: second
/// differences carry roughly `1e-9` relative noise.
#[derive(Clone)]
pub struct FiniteDifferenceSupport {
    dim: usize,
    step: f64,
    support: Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>,
}

impl fmt::Debug for FiniteDifferenceSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteDifferenceSupport")
            .field("dim", &self.dim)
            .field("step", &self.step)
            .finish_non_exhaustive()
    }
}

impl FiniteDifferenceSupport {
    pub const DEFAULT_STEP: f64 = 1e-5;
    pub const HESSIAN_STEP: f64 = 1e-3;

    /// `support` must be the 1-homogeneous extension of `h_K`.
    pub fn new<F>(dim: usize, support: F) -> Result<Self>
    where
        F: Fn(&Vec3) -> f64 + Send + Sync + 'static,
    {
        check_dim(dim)?;
        Ok(Self {
            dim,
            step: Self::DEFAULT_STEP,
            support: Arc::new(support),
        })
    }

    fn axis(i: usize) -> Vec3 {
        let mut e = Vec3::zeros();
        e[i] = 1.0;
        e
    }

    fn first(&self, x: &Vec3, i: usize, step: f64) -> f64 {
        let e = Self::axis(i) * step;
        ((self.support)(&(x + e)) - (self.support)(&(x - e))) / (2.0 * step)
    }

    fn second(&self, x: &Vec3, i: usize, j: usize, step: f64) -> f64 {
        let f = &self.support;
        if i == j {
            let e = Self::axis(i) * step;
            (f(&(x + e)) - 2.0 * f(x) + f(&(x - e))) / (step * step)
        } else {
            let ei = Self::axis(i) * step;
            let ej = Self::axis(j) * step;
            (f(&(x + ei + ej)) - f(&(x + ei - ej)) - f(&(x - ei + ej)) + f(&(x - ei - ej))) / (4.0 * step * step)
        }
    }
}

impl SupportFunction for FiniteDifferenceSupport {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vec3) -> f64 {
        (self.support)(x)
    }

    fn gradient(&self, x: &Vec3) -> Vec3 {
        let mut g = Vec3::zeros();
        for i in 0..self.dim {
            let coarse = self.first(x, i, self.step);
            let fine = self.first(x, i, 0.5 * self.step);
            g[i] = (4.0 * fine - coarse) / 3.0;
        }
        g
    }

    fn hessian(&self, x: &Vec3) -> Mat3 {
        let mut h = Mat3::zeros();
        for i in 0..self.dim {
            for j in i..self.dim {
                let step = Self::HESSIAN_STEP * x.norm();
                let coarse = self.second(x, i, j, step);
                let fine = self.second(x, i, j, 0.5 * step);
                let v = (4.0 * fine - coarse) / 3.0;
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }

    fn kind(&self) -> &'static str {
        "finite_difference"
    }
}

/// Point of `ℝⁿ` embedded in a 3-vector.
pub fn point(coords: &[f64]) -> Vec3 {
    let mut v = Vec3::zeros();
    for (i, c) in coords.iter().take(3).enumerate() {
        v[i] = *c;
    }
    v
}
