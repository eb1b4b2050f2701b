//! Convex bodies given by support functions, and the pointwise curvature
//! data of their boundary, evaluated on the sphere.
//!
//! A [`SupportBody`] is an analytic support oracle (see [`shapes`]) placed by
//! a rotation, a positive scale and a translation. Planar bodies live in the
//! `xy`-plane of a 3-vector with vanishing third component, so that every
//! evaluation is allocation free.

pub mod file;
pub mod shapes;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::quadrature::{CompensatedSum, RuleSpec, SphereRule};
use crate::tolerances;

pub use shapes::{Ball, Ellipsoid, FiniteDifferenceSupport, PerturbedCircle, PerturbedSphere, SphericalHarmonic};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Support function of a convex body with the origin in its interior,
/// evaluated through its 1-homogeneous extension to `ℝⁿ \ {0}`.
pub trait SupportFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &Vec3) -> f64;

    /// Gradient of the extension; at a unit vector this is the boundary
    /// point with outer normal `x`.
    fn gradient(&self, x: &Vec3) -> Vec3;

    fn hessian(&self, x: &Vec3) -> Mat3;

    /// Support function of the polar body, when it has a closed form.
    fn polar(&self) -> Option<Arc<dyn SupportFunction>> {
        None
    }

    fn kind(&self) -> &'static str;
}

/// A C²₊ convex body `a·Q·S + t` for an analytic base body `S`.
#[derive(Clone, Debug)]
pub struct SupportBody {
    base: Arc<dyn SupportFunction>,
    rotation: Mat3,
    scale: f64,
    translation: Vec3,
    label: String,
}

impl SupportBody {
    pub fn new(base: Arc<dyn SupportFunction>) -> Result<Self> {
        let dim = base.dim();
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let label = base.kind().to_string();
        Ok(Self {
            base,
            rotation: Mat3::identity(),
            scale: 1.0,
            translation: Vec3::zeros(),
            label,
        })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Ok(Self::new(Arc::new(Ball::new(dim, radius)?))?.with_label(format!("ball{dim}_r{radius}")))
    }

    /// Ellipsoid with support `√(uᵀMu)`; `matrix` is `n×n`, row major.
    pub fn ellipsoid(dim: usize, matrix: &[Vec<f64>]) -> Result<Self> {
        Self::new(Arc::new(Ellipsoid::from_rows(dim, matrix)?))
    }

    pub fn ellipsoid_from_axes(semi_axes: &[f64]) -> Result<Self> {
        let label = format!(
            "ellipsoid_{}",
            semi_axes.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("_")
        );
        Ok(Self::new(Arc::new(Ellipsoid::from_semi_axes(semi_axes)?))?.with_label(label))
    }

    /// `h(θ) = 1 + ε cos(Lθ)` in the plane.
    pub fn perturbed_circle(mode: u32, epsilon: f64) -> Result<Self> {
        Ok(Self::new(Arc::new(PerturbedCircle::new(mode, epsilon)?))?
            .with_label(format!("perturbed2_L{mode}_eps{epsilon}")))
    }

    /// `h(u) = 1 + ε P(u)` on `S²` for an odd harmonic `P`.
    pub fn perturbed_sphere(harmonic: SphericalHarmonic, epsilon: f64) -> Result<Self> {
        Ok(Self::new(Arc::new(PerturbedSphere::new(harmonic, epsilon)?))?
            .with_label(format!("perturbed3_{}_eps{epsilon}", harmonic.id())))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &Arc<dyn SupportFunction> {
        &self.base
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    /// `h_K(u)`; `u` need not be normalized.
    pub fn support(&self, u: &Vec3) -> f64 {
        let v = self.rotation.transpose() * u;
        self.scale * self.base.value(&v) + self.translation.dot(u)
    }

    /// `∇h_K(u)`, the reverse Gauss image of `u` for unit `u`.
    pub fn boundary_point(&self, u: &Vec3) -> Vec3 {
        let v = self.rotation.transpose() * u;
        self.scale * (self.rotation * self.base.gradient(&v)) + self.translation
    }

    pub fn hessian(&self, u: &Vec3) -> Mat3 {
        let v = self.rotation.transpose() * u;
        self.scale * (self.rotation * self.base.hessian(&v) * self.rotation.transpose())
    }

    /// The image under an orthogonal map (rotation or reflection).
    pub fn rotated(&self, q: &Mat3) -> Result<Self> {
        let q = embed_square(self.dim(), q);
        if (q.transpose() * q - Mat3::identity()).amax() > 1e-12 {
            return Err(Error::NotOrthogonal);
        }
        Ok(Self {
            rotation: q * self.rotation,
            translation: q * self.translation,
            ..self.clone()
        })
    }

    /// The dilate `aK`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameters(format!("scale factor must be positive, got {a}")));
        }
        Ok(Self {
            scale: a * self.scale,
            translation: a * self.translation,
            ..self.clone()
        })
    }

    /// The translate `K + v`, without checking that the origin stays inside.
    pub fn translated(&self, v: &Vec3) -> Self {
        let mut v = *v;
        if self.dim() == 2 {
            v.z = 0.0;
        }
        Self {
            translation: self.translation + v,
            ..self.clone()
        }
    }

    /// `K - c`, with support `u ↦ h(u) - ⟨c, u⟩`.
    ///
    /// Fails when `c` is not strictly interior, checked on the default rule.
    pub fn recenter(&self, c: &Vec3) -> Result<Self> {
        let moved = self.translated(&(-c));
        let rule = RuleSpec::default_for(self.dim())?.build()?;
        for u in rule.nodes() {
            let value = moved.support(u);
            if value <= 0.0 {
                return Err(Error::OriginNotInterior {
                    u: [u.x, u.y, u.z],
                    value,
                });
            }
        }
        Ok(moved)
    }

    /// The polar body `K°`, available for (rotated, scaled) balls and
    /// ellipsoids centered at the origin.
    pub fn polar(&self) -> Result<Self> {
        if self.translation.amax() != 0.0 {
            return Err(Error::PolarUnavailable(self.label.clone()));
        }
        let base = self
            .base
            .polar()
            .ok_or_else(|| Error::PolarUnavailable(self.label.clone()))?;
        Ok(Self {
            base,
            rotation: self.rotation,
            scale: 1.0 / self.scale,
            translation: Vec3::zeros(),
            label: format!("polar({})", self.label),
        })
    }

    /// Principal radii, boundary point and symmetric functions at `u`.
    pub fn curvature_at(&self, u: &Vec3) -> Result<CurvaturePoint> {
        curvature_at(self, u)
    }

    /// Curvature data at every node of `rule`, gated on `h > 0` and on
    /// strictly positive radii.
    pub fn sample(&self, rule: &SphereRule) -> Result<SampledBody> {
        if rule.dim() != self.dim() {
            return Err(Error::InvalidRule(format!(
                "rule {} is for n = {}, body has n = {}",
                rule.spec(),
                rule.dim(),
                self.dim()
            )));
        }
        let points = rule
            .nodes()
            .iter()
            .map(|u| {
                let cp = curvature_at(self, u)?;
                if cp.h <= 0.0 {
                    return Err(Error::OriginNotInterior {
                        u: [u.x, u.y, u.z],
                        value: cp.h,
                    });
                }
                Ok(cp)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledBody {
            dim: self.dim(),
            label: self.label.clone(),
            rule: rule.spec(),
            points,
            weights: rule.weights().to_vec(),
        })
    }

    /// Residuals of the support-oracle identities over the nodes of `rule`.
    pub fn check_oracle(&self, rule: &SphereRule) -> OracleCheck {
        let mut check = OracleCheck {
            min_support: f64::INFINITY,
            max_euler_residual: 0.0,
            max_radial_residual: 0.0,
            min_tangential_eigenvalue: f64::INFINITY,
        };
        for u in rule.nodes() {
            let h = self.support(u);
            let x = self.boundary_point(u);
            let hess = self.hessian(u);
            check.min_support = check.min_support.min(h);
            check.max_euler_residual = check.max_euler_residual.max((x.dot(u) - h).abs() / h.abs().max(1.0));
            check.max_radial_residual = check.max_radial_residual.max((hess * u).amax());
            let (radii, count) = tangential_eigenvalues(self.dim(), &hess, u);
            for r in &radii[..count] {
                check.min_tangential_eigenvalue = check.min_tangential_eigenvalue.min(*r);
            }
        }
        check
    }
}

fn embed_square(dim: usize, q: &Mat3) -> Mat3 {
    let mut out = *q;
    if dim == 2 {
        out[(0, 2)] = 0.0;
        out[(1, 2)] = 0.0;
        out[(2, 0)] = 0.0;
        out[(2, 1)] = 0.0;
        out[(2, 2)] = 1.0;
    }
    out
}

/// Worst-case residuals of a support oracle over a rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleCheck {
    pub min_support: f64,
    /// `|⟨∇h(u), u⟩ - h(u)|`, relative to `max(h, 1)`.
    pub max_euler_residual: f64,
    /// `max |∇²h(u) u|`.
    pub max_radial_residual: f64,
    pub min_tangential_eigenvalue: f64,
}

impl OracleCheck {
    pub fn is_valid(&self) -> bool {
        self.min_support > 0.0
            && self.max_euler_residual < tolerances::DERIVATIVE_IDENTITY
            && self.max_radial_residual < tolerances::DERIVATIVE_IDENTITY
            && self.min_tangential_eigenvalue > tolerances::MIN_RADIUS
    }
}

/// Pointwise curvature data at a direction `u`.
///
/// `s[j]` are the normalized elementary symmetric functions of the principal
/// radii and `curv[j]` those of the principal curvatures at `x`, both for
/// `j = 0..n`; entries at `j ≥ n` are unused.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvaturePoint {
    pub dim: usize,
    pub u: Vec3,
    pub x: Vec3,
    pub h: f64,
    pub radii: [f64; 2],
    pub s: [f64; 3],
    pub curv: [f64; 3],
}

impl CurvaturePoint {
    pub fn radii(&self) -> &[f64] {
        &self.radii[..self.dim - 1]
    }

    /// `s_j(u)`.
    pub fn radius_symmetric(&self, j: usize) -> f64 {
        self.s[j]
    }

    /// `H_j(x)`.
    pub fn curvature_symmetric(&self, j: usize) -> f64 {
        self.curv[j]
    }

    /// Product of the principal radii; the surface Jacobian `dH^{n-1} = s_{n-1} dσ`.
    pub fn jacobian(&self) -> f64 {
        self.s[self.dim - 1]
    }

    pub fn gauss_curvature(&self) -> f64 {
        self.curv[self.dim - 1]
    }

    /// `H_{n-1}(x) / ⟨x, N(x)⟩^{n+1}`, constant exactly on ellipsoids.
    pub fn petty_ratio(&self) -> f64 {
        1.0 / (self.jacobian() * self.h.powi(self.dim as i32 + 1))
    }
}

/// Eigenvalues of `hess` restricted to `u^⊥` (only the first `n - 1` are set).
fn tangential_eigenvalues(dim: usize, hess: &Mat3, u: &Vec3) -> ([f64; 2], usize) {
    let un = u.normalize();
    if dim == 2 {
        let e = Vec3::new(-un.y, un.x, 0.0);
        return ([e.dot(&(hess * e)), 0.0], 1);
    }
    let (e1, e2) = tangent_basis(&un);
    let a = e1.dot(&(hess * e1));
    let b = 0.5 * (e1.dot(&(hess * e2)) + e2.dot(&(hess * e1)));
    let c = e2.dot(&(hess * e2));
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    // the smaller root through the product keeps relative accuracy
    let large = mean + rad;
    let small = if large > 0.0 { (a * c - b * b) / large } else { mean - rad };
    ([small, large], 2)
}

/// An orthonormal basis of `u^⊥` for a unit `u` in ℝ³.
pub fn tangent_basis(u: &Vec3) -> (Vec3, Vec3) {
    let helper = if u.x.abs() < 0.6 {
        Vec3::x()
    } else if u.y.abs() < 0.6 {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = (helper - u * u.dot(&helper)).normalize();
    let e2 = u.cross(&e1);
    (e1, e2)
}

/// Curvature data of `body` at the unit direction `u`.
pub fn curvature_at(body: &SupportBody, u: &Vec3) -> Result<CurvaturePoint> {
    let dim = body.dim();
    let h = body.support(u);
    let x = body.boundary_point(u);
    let hess = body.hessian(u);
    let (radii, count) = tangential_eigenvalues(dim, &hess, u);
    for &r in &radii[..count] {
        if !(r > tolerances::MIN_RADIUS) {
            return Err(Error::NotC2Plus {
                u: [u.x, u.y, u.z],
                eigenvalue: r,
            });
        }
    }
    let s = match dim {
        2 => [1.0, radii[0], 0.0],
        _ => [1.0, 0.5 * (radii[0] + radii[1]), radii[0] * radii[1]],
    };
    let top = s[dim - 1];
    let mut curv = [1.0, 0.0, 0.0];
    for j in 1..dim {
        curv[j] = s[dim - 1 - j] / top;
    }
    Ok(CurvaturePoint {
        dim,
        u: *u,
        x,
        h,
        radii,
        s,
        curv,
    })
}

/// Curvature data of a body at all nodes of a rule, with the rule weights.
///
/// Every functional in this crate is a weighted sum over a `SampledBody`.
#[derive(Clone, Debug)]
pub struct SampledBody {
    dim: usize,
    label: String,
    rule: RuleSpec,
    points: Vec<CurvaturePoint>,
    weights: Vec<f64>,
}

impl SampledBody {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rule(&self) -> RuleSpec {
        self.rule
    }

    pub fn points(&self) -> &[CurvaturePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_{S^{n-1}} f dσ` for a pointwise integrand of the curvature data.
    pub fn integrate<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&CurvaturePoint) -> f64,
    {
        let mut sum = CompensatedSum::default();
        for (node, (p, w)) in self.points.iter().zip(&self.weights).enumerate() {
            let value = f(p);
            if !value.is_finite() {
                return Err(Error::NonFiniteIntegrand {
                    node,
                    u: [p.u.x, p.u.y, p.u.z],
                    value,
                });
            }
            sum.add(w * value);
        }
        Ok(sum.total())
    }

    /// `vol_n(K) = (1/n) ∫ h s_{n-1} dσ`.
    pub fn volume(&self) -> f64 {
        let n = self.dim as f64;
        self.integrate(|p| p.h * p.jacobian()).expect("finite on a validated body") / n
    }

    /// `vol_n(K°) = (1/n) ∫ h^{-n} dσ`.
    pub fn polar_volume(&self) -> f64 {
        let n = self.dim as i32;
        self.integrate(|p| p.h.powi(-n)).expect("finite on a validated body") / n as f64
    }

    /// `(n-1)`-dimensional surface area of `∂K`.
    pub fn surface_area(&self) -> f64 {
        self.integrate(|p| p.jacobian()).expect("finite on a validated body")
    }

    /// `(1/((n+1) vol)) ∫ x h s_{n-1} dσ`.
    pub fn centroid(&self) -> Vec3 {
        let mut acc = [CompensatedSum::default(); 3];
        for (p, w) in self.points.iter().zip(&self.weights) {
            let f = w * p.h * p.jacobian();
            for (i, a) in acc.iter_mut().enumerate() {
                a.add(f * p.x[i]);
            }
        }
        let scale = 1.0 / ((self.dim as f64 + 1.0) * self.volume());
        Vec3::new(acc[0].total(), acc[1].total(), acc[2].total()) * scale
    }
}

pub fn body_volume(body: &SupportBody, rule: &SphereRule) -> Result<f64> {
    Ok(body.sample(rule)?.volume())
}

pub fn polar_volume(body: &SupportBody, rule: &SphereRule) -> Result<f64> {
    Ok(body.sample(rule)?.polar_volume())
}

pub fn centroid(body: &SupportBody, rule: &SphereRule) -> Result<Vec3> {
    Ok(body.sample(rule)?.centroid())
}
