//! Quadrature on `S¹` and `S²`.
//!
//! The circle uses the trapezoidal rule, which is spectrally accurate for
//! smooth periodic integrands. The sphere uses Gauss–Legendre nodes in the
//! cosine of the polar angle times a uniform azimuthal grid. Sums are
//! accumulated in node order with Neumaier compensation so that reported
//! digits do not depend on scheduling.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

pub const MIN_CIRCLE_NODES: usize = 4;
pub const MIN_POLAR_NODES: usize = 8;
pub const MIN_AZIMUTH_NODES: usize = 16;

/// Node counts of a rule, e.g. `512` on the circle or `64x128` on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RuleSpec {
    Circle(usize),
    Sphere { polar: usize, azimuth: usize },
}

impl RuleSpec {
    pub const DEFAULT_CIRCLE: RuleSpec = RuleSpec::Circle(512);
    pub const DEFAULT_SPHERE: RuleSpec = RuleSpec::Sphere { polar: 64, azimuth: 128 };

    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(Self::DEFAULT_CIRCLE),
            3 => Ok(Self::DEFAULT_SPHERE),
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RuleSpec::Circle(_) => 2,
            RuleSpec::Sphere { .. } => 3,
        }
    }

    /// The same rule with every node count doubled.
    pub fn refined(&self) -> Self {
        match *self {
            RuleSpec::Circle(n) => RuleSpec::Circle(2 * n),
            RuleSpec::Sphere { polar, azimuth } => RuleSpec::Sphere {
                polar: 2 * polar,
                azimuth: 2 * azimuth,
            },
        }
    }

    pub fn build(&self) -> Result<SphereRule> {
        match *self {
            RuleSpec::Circle(n) => circle_rule(n),
            RuleSpec::Sphere { polar, azimuth } => sphere_rule(polar, azimuth),
        }
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Circle(n) => write!(f, "{n}"),
            RuleSpec::Sphere { polar, azimuth } => write!(f, "{polar}x{azimuth}"),
        }
    }
}

impl FromStr for RuleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRule(format!("cannot parse `{s}`; expected N or NxM"));
        let s = s.trim();
        match s.split_once(['x', 'X']) {
            Some((a, b)) => Ok(RuleSpec::Sphere {
                polar: a.trim().parse().map_err(|_| bad())?,
                azimuth: b.trim().parse().map_err(|_| bad())?,
            }),
            None => Ok(RuleSpec::Circle(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl From<RuleSpec> for String {
    fn from(r: RuleSpec) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for RuleSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Quadrature nodes and weights on `S^{n-1}` for `n ∈ {2, 3}`.
#[derive(Clone, Debug)]
pub struct SphereRule {
    spec: RuleSpec,
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
}

impl SphereRule {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn spec(&self) -> RuleSpec {
        self.spec
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_l f(u_l)` in node order with compensated accumulation.
    ///
    /// A non-finite integrand value is reported together with its node.
    pub fn integrate<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&Vec3) -> f64,
    {
        let mut sum = CompensatedSum::default();
        for (node, (u, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let value = f(u);
            if !value.is_finite() {
                return Err(Error::NonFiniteIntegrand {
                    node,
                    u: [u.x, u.y, u.z],
                    value,
                });
            }
            sum.add(w * value);
        }
        Ok(sum.total())
    }
}

/// `n` equally spaced angles with weight `2π/n` each.
pub fn circle_rule(n: usize) -> Result<SphereRule> {
    if n < MIN_CIRCLE_NODES {
        return Err(Error::InvalidRule(format!(
            "circle rule needs at least {MIN_CIRCLE_NODES} nodes, got {n}"
        )));
    }
    let step = 2.0 * PI / n as f64;
    let nodes = (0..n)
        .map(|l| {
            let theta = step * l as f64;
            Vec3::new(theta.cos(), theta.sin(), 0.0)
        })
        .collect();
    Ok(SphereRule {
        spec: RuleSpec::Circle(n),
        nodes,
        weights: vec![step; n],
    })
}

/// Gauss–Legendre in `cos(polar)` times a uniform azimuthal grid.
pub fn sphere_rule(n_polar: usize, n_azimuth: usize) -> Result<SphereRule> {
    if n_polar < MIN_POLAR_NODES || n_azimuth < MIN_AZIMUTH_NODES {
        return Err(Error::InvalidRule(format!(
            "sphere rule needs at least {MIN_POLAR_NODES}x{MIN_AZIMUTH_NODES} nodes, got {n_polar}x{n_azimuth}"
        )));
    }
    let (xs, ws) = gauss_legendre(n_polar);
    let dphi = 2.0 * PI / n_azimuth as f64;
    let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
    let mut weights = Vec::with_capacity(n_polar * n_azimuth);
    for (&z, &wz) in xs.iter().zip(&ws) {
        let rho = (1.0 - z * z).sqrt();
        for j in 0..n_azimuth {
            let phi = dphi * j as f64;
            nodes.push(Vec3::new(rho * phi.cos(), rho * phi.sin(), z));
            weights.push(wz * dphi);
        }
    }
    Ok(SphereRule {
        spec: RuleSpec::Sphere {
            polar: n_polar,
            azimuth: n_azimuth,
        },
        nodes,
        weights,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        ws[i] = w;
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().total()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_weights_sum_to_circumference() {
        for n in [4, 9, 512] {
            let rule = circle_rule(n).unwrap();
            assert_relative_eq!(compensated_sum(rule.weights().iter().copied()), 2.0 * PI, max_relative = 1e-12);
        }
    }

    #[test]
    fn circle_rule_is_exact_for_trig_polynomials() {
        let rule = circle_rule(64).unwrap();
        let v = rule.integrate(|u| u.x * u.x).unwrap();
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_rule_moments() {
        let rule = sphere_rule(64, 128).unwrap();
        let area = rule.integrate(|_| 1.0).unwrap();
        assert_relative_eq!(area, 4.0 * PI, max_relative = 1e-12);
        let z2 = rule.integrate(|u| u.z * u.z).unwrap();
        assert_relative_eq!(z2, 4.0 * PI / 3.0, max_relative = 1e-12);
        for u in rule.nodes() {
            assert!((u.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (xs, ws) = gauss_legendre(8);
        // degree 15 is the highest exact degree for 8 nodes
        let v: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(14)).sum();
        assert_relative_eq!(v, 2.0 / 15.0, max_relative = 1e-13);
        assert_relative_eq!(ws.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_small_rules() {
        assert!(circle_rule(3).is_err());
        assert!(sphere_rule(7, 128).is_err());
        assert!(sphere_rule(64, 15).is_err());
    }

    #[test]
    fn non_finite_integrand_names_the_node() {
        let rule = circle_rule(8).unwrap();
        let err = rule
            .integrate(|u| if u.y > 0.99 { f64::NAN } else { 1.0 })
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { node: 2, .. }));
    }

    #[test]
    fn rule_spec_parses() {
        assert_eq!("512".parse::<RuleSpec>().unwrap(), RuleSpec::Circle(512));
        assert_eq!(
            "64x128".parse::<RuleSpec>().unwrap(),
            RuleSpec::Sphere { polar: 64, azimuth: 128 }
        );
        assert!("64y".parse::<RuleSpec>().is_err());
        assert_eq!(RuleSpec::DEFAULT_SPHERE.to_string(), "64x128");
    }

    #[test]
    fn compensated_sum_beats_naive_accumulation() {
        let values: Vec<f64> = std::iter::once(1.0)
            .chain(std::iter::repeat_n(1e-16, 10_000))
            .collect();
        let exact = 1.0 + 1e-12;
        assert!((compensated_sum(values.iter().copied()) - exact).abs() < 1e-15);
    }
}
