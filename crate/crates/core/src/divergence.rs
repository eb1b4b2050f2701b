//! f-divergences of the weighted cone measures.
//!
//! With respect to `μ_ī` the measures `P_K` and `Q_K` have densities
//! `p_K = H_{n-1}/⟨x,N⟩^n` and `q_K = ⟨x,N⟩`, and
//! `D_f(P_K, Q_K) = ∫ f(p_K/q_K) q_K dμ_ī`. The ratio `p_K/q_K` is the Petty
//! ratio, so `f(t) = t^{p/(n+p)}` recovers `ω^p`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::WeightIndex;
use crate::geometry::SampledBody;
use crate::quadrature::CompensatedSum;

/// Tolerance for the declared direction of the Jensen bound.
pub const JENSEN_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Convex,
    Concave,
    Linear,
}

/// A one-sided limit at `0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Limit {
    Finite(f64),
    PosInfinity,
    NegInfinity,
}

/// Which measure sits in the first slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `D(P_K ‖ Q_K)`.
    PQ,
    /// `D(Q_K ‖ P_K)`.
    QP,
}

type GeneratorFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A generator `f: (0, ∞) → ℝ` with declared shape and its limits at `0`.
#[derive(Clone)]
pub struct Generator {
    name: String,
    shape: Shape,
    at_zero: Limit,
    adjoint_at_zero: Limit,
    eval: GeneratorFn,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .field("shape", &self.shape)
            .field("at_zero", &self.at_zero)
            .field("adjoint_at_zero", &self.adjoint_at_zero)
            .finish()
    }
}

impl Generator {
    pub fn new<F>(name: impl Into<String>, shape: Shape, at_zero: Limit, adjoint_at_zero: Limit, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            shape,
            at_zero,
            adjoint_at_zero,
            eval: Arc::new(f),
        }
    }

    /// `t ln t`, which gives the Kullback–Leibler divergence.
    pub fn x_log_x() -> Self {
        Self::new("t*ln(t)", Shape::Convex, Limit::Finite(0.0), Limit::PosInfinity, |t| t * t.ln())
    }

    /// `-ln t`, the adjoint of `t ln t`.
    pub fn neg_log() -> Self {
        Self::new("-ln(t)", Shape::Convex, Limit::PosInfinity, Limit::Finite(0.0), |t| -t.ln())
    }

    /// `t^α`.
    pub fn power(alpha: f64) -> Self {
        let shape = if alpha == 0.0 || alpha == 1.0 {
            Shape::Linear
        } else if alpha > 0.0 && alpha < 1.0 {
            Shape::Concave
        } else {
            Shape::Convex
        };
        Self::new(
            format!("t^{alpha}"),
            shape,
            power_limit(alpha),
            power_limit(1.0 - alpha),
            move |t| t.powf(alpha),
        )
    }

    pub fn sqrt() -> Self {
        Self::new("sqrt(t)", Shape::Concave, Limit::Finite(0.0), Limit::Finite(0.0), f64::sqrt)
    }

    /// `a t + b`.
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(format!("{a}*t+{b}"), Shape::Linear, Limit::Finite(b), Limit::Finite(a), move |t| a * t + b)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// `lim_{t↓0} f(t)`.
    pub fn f_at_zero(&self) -> Limit {
        self.at_zero
    }

    /// `lim_{t↓0} t f(1/t)`.
    pub fn fstar_at_zero(&self) -> Limit {
        self.adjoint_at_zero
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// `f*(t) = t f(1/t)`.
    pub fn adjoint(&self) -> Generator {
        let f = Arc::clone(&self.eval);
        let name = match self.name.strip_prefix("adjoint(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => format!("adjoint({})", self.name),
        };
        Generator {
            name,
            shape: self.shape,
            at_zero: self.adjoint_at_zero,
            adjoint_at_zero: self.at_zero,
            eval: Arc::new(move |t| t * f(1.0 / t)),
        }
    }

    /// Compares the declared shape with second differences on a log grid
    /// over `[10^-2, 10^2]`.
    pub fn shape_is_consistent(&self) -> bool {
        let grid: Vec<f64> = (0..=40).map(|i| 10f64.powf(-2.0 + 0.1 * i as f64)).collect();
        grid.windows(3).all(|w| {
            let (a, b, c) = (w[0], w[1], w[2]);
            let (fa, fb, fc) = (self.eval(a), self.eval(b), self.eval(c));
            // divided second difference on the non-uniform grid
            let d = ((fc - fb) / (c - b) - (fb - fa) / (b - a)) / (c - a);
            let scale = fa.abs().max(fb.abs()).max(fc.abs()).max(1.0) / (c - a).powi(2);
            let tol = 1e-9 * scale;
            match self.shape {
                Shape::Convex => d >= -tol,
                Shape::Concave => d <= tol,
                Shape::Linear => d.abs() <= tol,
            }
        })
    }
}

fn power_limit(alpha: f64) -> Limit {
    if alpha > 0.0 {
        Limit::Finite(0.0)
    } else if alpha == 0.0 {
        Limit::Finite(1.0)
    } else {
        Limit::PosInfinity
    }
}

/// `f*(t) = t f(1/t)`.
pub fn adjoint(generator: &Generator) -> Generator {
    generator.adjoint()
}

/// Node values of `p_K`, `q_K` and the `μ_ī` weights (quadrature weight
/// included).
#[derive(Clone, Debug)]
pub struct ConeDensities {
    dim: usize,
    p: Vec<f64>,
    q: Vec<f64>,
    mu: Vec<f64>,
}

impl ConeDensities {
    /// Built from the curvature functions `H_j` on the boundary.
    pub fn new(body: &SampledBody, index: &WeightIndex) -> Result<Self> {
        let n = body.dim();
        if index.dim() != n {
            return Err(Error::InvalidIndex(format!("index is for n = {}, body has n = {n}", index.dim())));
        }
        let cn = index.combinatorial_constant() as f64;
        let height = index.m() as f64 - index.k();
        let len = body.points().len();
        let (mut p, mut q, mut mu) = (Vec::with_capacity(len), Vec::with_capacity(len), Vec::with_capacity(len));
        for (pt, w) in body.points().iter().zip(body.weights()) {
            let mut weight = cn * pt.h.powf(height) * pt.jacobian() * w;
            for (j, &i) in index.counts().iter().enumerate() {
                weight *= pt.curvature_symmetric(j + 1).powi(i as i32);
            }
            p.push(pt.gauss_curvature() / pt.h.powi(n as i32));
            q.push(pt.h);
            mu.push(weight);
        }
        Ok(Self { dim: n, p, q, mu })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// `∫ g(p, q) dμ_ī`.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, g: F) -> f64 {
        let mut sum = CompensatedSum::default();
        for ((p, q), mu) in self.p.iter().zip(&self.q).zip(&self.mu) {
            sum.add(g(*p, *q) * mu);
        }
        sum.total()
    }

    /// `P_K(∂K) = ω^∞`.
    pub fn p_mass(&self) -> f64 {
        self.integrate(|p, _| p)
    }

    /// `Q_K(∂K) = ω^0`.
    pub fn q_mass(&self) -> f64 {
        self.integrate(|_, q| q)
    }

    /// Relative spread `(max - min)/mean` of the Petty ratio `p/q` over the nodes.
    pub fn ratio_spread(&self) -> f64 {
        let ratios = self.p.iter().zip(&self.q).map(|(p, q)| p / q);
        let (lo, hi) = ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
        (hi - lo) / (0.5 * (hi + lo))
    }
}

/// `D_f(P‖Q) = ∫ f(p/q) q dμ` or `D_f(Q‖P) = ∫ f(q/p) p dμ`.
pub fn f_divergence(densities: &ConeDensities, generator: &Generator, direction: Direction) -> Result<f64> {
    let mut sum = CompensatedSum::default();
    for ((p, q), mu) in densities.p.iter().zip(&densities.q).zip(&densities.mu) {
        let (num, den) = match direction {
            Direction::PQ => (*p, *q),
            Direction::QP => (*q, *p),
        };
        let ratio = num / den;
        let value = generator.eval(ratio);
        if !value.is_finite() {
            return Err(Error::GeneratorDomain {
                name: generator.name.clone(),
                ratio,
            });
        }
        sum.add(value * den * mu);
    }
    Ok(sum.total())
}

/// `∫ p ln(p/q) dμ` for `P‖Q`, `∫ q ln(q/p) dμ` for `Q‖P`.
pub fn kl_divergence(densities: &ConeDensities, direction: Direction) -> f64 {
    match direction {
        Direction::PQ => densities.integrate(|p, q| p * (p / q).ln()),
        Direction::QP => densities.integrate(|p, q| q * (q / p).ln()),
    }
}

/// KL divergence of the probability measures `P/P(∂K)` and `Q/Q(∂K)`.
///
/// Nonnegative, and zero exactly when the Petty ratio is constant.
pub fn normalized_kl(densities: &ConeDensities, direction: Direction) -> f64 {
    let (pm, qm) = (densities.p_mass(), densities.q_mass());
    match direction {
        Direction::PQ => kl_divergence(densities, direction) / pm - (pm / qm).ln(),
        Direction::QP => kl_divergence(densities, direction) / qm - (qm / pm).ln(),
    }
}

/// `H_α = ∫ p^α q^{1-α} dμ`.
pub fn hellinger(densities: &ConeDensities, alpha: f64) -> f64 {
    densities.integrate(|p, q| p.powf(alpha) * q.powf(1.0 - alpha))
}

/// `D_α = ln(H_α)/(α - 1)`.
pub fn renyi(densities: &ConeDensities, alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        return Err(Error::RenyiOrderOne);
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameters(format!("Rényi order must be finite, got {alpha}")));
    }
    Ok(hellinger(densities, alpha).ln() / (alpha - 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JensenReport {
    pub generator: String,
    pub shape: Shape,
    /// `D_f(P_K, Q_K)`.
    pub lhs: f64,
    /// `f(ω^∞/ω^0) ω^0`.
    pub rhs: f64,
    /// `f(ω^∞/ω^0) ω^0 / n`, with the multiplier `μ_ī-vol_n(K)`.
    pub rhs_stated: f64,
    /// `rhs - lhs`.
    pub gap: f64,
    pub holds: bool,
    /// Whether the stated right-hand side satisfies the declared direction.
    pub holds_stated: bool,
}

/// Jensen's inequality for `D_f` against the total masses of `P_K`, `Q_K`.
///
/// Concave `f` gives `lhs ≤ rhs`, convex `f` gives `lhs ≥ rhs` and linear
/// `f` gives equality.
pub fn jensen_bound(densities: &ConeDensities, generator: &Generator) -> Result<JensenReport> {
    let lhs = f_divergence(densities, generator, Direction::PQ)?;
    let (pm, qm) = (densities.p_mass(), densities.q_mass());
    let rhs = generator.eval(pm / qm) * qm;
    let rhs_stated = rhs / densities.dim as f64;
    let check = |rhs: f64| {
        let slack = JENSEN_SLACK * lhs.abs().max(rhs.abs()).max(qm);
        match generator.shape {
            Shape::Concave => lhs <= rhs + slack,
            Shape::Convex => lhs >= rhs - slack,
            Shape::Linear => (lhs - rhs).abs() <= slack,
        }
    };
    Ok(JensenReport {
        generator: generator.name.clone(),
        shape: generator.shape,
        lhs,
        rhs,
        rhs_stated,
        gap: rhs - lhs,
        holds: check(rhs),
        holds_stated: check(rhs_stated),
    })
}
