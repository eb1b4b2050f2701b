//! Random polytopes with vertices on the boundary.
//!
//! Points are drawn on `∂K` from the density
//!
//! ```text
//! f = H_{n-1}^{(2p+n(1-p))/(2(n+p))} [c_n ∏_j H_j^{i_j}]^{-(n-1)/2} h^{(n(p-1)/(n+p)+k-m)(n-1)/2},
//! ```
//!
//! normalized by `Z = ∫ f dH^{n-1}`. For this density
//! `∫ H_{n-1}^{1/(n-1)} f^{-2/(n-1)} dH^{n-1} = ω^p_{m,k,ī}(K)`, so the
//! expected volume deficit of the hull of `N` points behaves like
//! `c_n Z^{2/(n-1)} ω^p N^{-2/(n-1)}`.

pub mod hull;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functionals::{weighted_asa, Exponent, WeightIndex};
use crate::geometry::{CurvaturePoint, SampledBody, SupportBody, Vec3};
use crate::quadrature::{compensated_sum, RuleSpec};
use crate::tolerances::Tolerances;

pub use hull::{hull_area_2d, hull_volume, hull_volume_3d, HullVolume};

/// Safety factor applied to the sampled maximum of the rejection target.
pub const ENVELOPE_FACTOR: f64 = 1.05;

/// Unnormalized boundary density with its normalizer and rejection envelope.
#[derive(Clone, Debug)]
pub struct BoundaryDensity {
    body: SupportBody,
    index: WeightIndex,
    p: Option<Exponent>,
    gauss_power: f64,
    weight_power: f64,
    height_power: f64,
    normalizer: f64,
    envelope: f64,
    mean_target: f64,
}

impl BoundaryDensity {
    /// The density attached to `(index, p)`. `rule` fixes `Z` and the envelope.
    pub fn new(body: &SupportBody, index: &WeightIndex, p: Exponent, rule: RuleSpec) -> Result<Self> {
        let n = body.dim() as f64;
        p.validate(body.dim())?;
        if index.dim() != body.dim() {
            return Err(Error::InvalidIndex(format!("index is for n = {}, body has n = {}", index.dim(), body.dim())));
        }
        let (gamma_p, hp) = (p.ratio_power(body.dim()), p.height_power(body.dim()));
        let powers = (
            gamma_p - 0.5 * hp,
            -0.5 * (n - 1.0),
            0.5 * (hp + index.k() - index.m() as f64) * (n - 1.0),
        );
        Self::build(body, index.clone(), Some(p), powers, rule)
    }

    /// `f ≡ 1`.
    pub fn uniform(body: &SupportBody, rule: RuleSpec) -> Result<Self> {
        Self::build(body, WeightIndex::zero(body.dim()), None, (0.0, 0.0, 0.0), rule)
    }

    fn build(body: &SupportBody, index: WeightIndex, p: Option<Exponent>, powers: (f64, f64, f64), rule: RuleSpec) -> Result<Self> {
        let sampled = body.sample(&rule.build()?)?;
        let mut density = Self {
            body: body.clone(),
            index,
            p,
            gauss_power: powers.0,
            weight_power: powers.1,
            height_power: powers.2,
            normalizer: f64::NAN,
            envelope: f64::NAN,
            mean_target: f64::NAN,
        };
        density.normalizer = sampled.integrate(|pt| density.sphere_target(pt))?;
        let max = sampled.points().iter().map(|pt| density.sphere_target(pt)).fold(0.0, f64::max);
        density.envelope = ENVELOPE_FACTOR * max;
        let area: f64 = sampled.weights().iter().sum();
        density.mean_target = density.normalizer / area;
        Ok(density)
    }

    pub fn body(&self) -> &SupportBody {
        &self.body
    }

    pub fn index(&self) -> &WeightIndex {
        &self.index
    }

    pub fn p(&self) -> Option<Exponent> {
        self.p
    }

    /// `Z = ∫_{∂K} f dH^{n-1}`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    /// Acceptance probability of the rejection sampler.
    pub fn expected_acceptance(&self) -> f64 {
        self.mean_target / self.envelope
    }

    /// `f` at the boundary point with normal `pt.u`.
    pub fn value(&self, pt: &CurvaturePoint) -> f64 {
        let mut weight = self.index.combinatorial_constant() as f64;
        for (j, &i) in self.index.counts().iter().enumerate() {
            weight *= pt.curvature_symmetric(j + 1).powi(i as i32);
        }
        pt.gauss_curvature().powf(self.gauss_power) * weight.powf(self.weight_power) * pt.h.powf(self.height_power)
    }

    /// Density of the pushforward to the sphere, `f(ξ̄(u)) s_{n-1}(u)`.
    pub fn sphere_target(&self, pt: &CurvaturePoint) -> f64 {
        self.value(pt) * pt.jacobian()
    }

    /// `∫ H_{n-1}^{1/(n-1)} f^{-2/(n-1)} dH^{n-1}`.
    pub fn bookkeeping_integral(&self, sampled: &SampledBody) -> Result<f64> {
        let e = 1.0 / (sampled.dim() as f64 - 1.0);
        sampled.integrate(|pt| pt.gauss_curvature().powf(e) * self.value(pt).powf(-2.0 * e) * pt.jacobian())
    }
}

fn random_direction<R: Rng>(dim: usize, rng: &mut R) -> Vec3 {
    let phi = rng.random_range(0.0..2.0 * PI);
    if dim == 2 {
        return Vec3::new(phi.cos(), phi.sin(), 0.0);
    }
    let z: f64 = rng.random_range(-1.0..1.0);
    let rho = (1.0 - z * z).sqrt();
    Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
}

/// Draws one outer normal from the pushforward of `f/Z`.
pub fn sample_normal<R: Rng>(density: &BoundaryDensity, rng: &mut R) -> Result<(Vec3, u64)> {
    let dim = density.body.dim();
    let mut proposals = 0;
    loop {
        proposals += 1;
        let u = random_direction(dim, rng);
        let g = density.sphere_target(&density.body.curvature_at(&u)?);
        if g > density.envelope {
            return Err(Error::EnvelopeViolation {
                u: [u.x, u.y, u.z],
                value: g,
                envelope: density.envelope,
            });
        }
        if rng.random::<f64>() * density.envelope < g {
            return Ok((u, proposals));
        }
    }
}

/// `count` i.i.d. boundary points with density `f/Z`, and the number of
/// proposals used.
pub fn sample_boundary_with<R: Rng>(density: &BoundaryDensity, count: usize, rng: &mut R) -> Result<(Vec<Vec3>, u64)> {
    let mut points = Vec::with_capacity(count);
    let mut proposals = 0;
    for _ in 0..count {
        let (u, tries) = sample_normal(density, rng)?;
        proposals += tries;
        points.push(density.body.boundary_point(&u));
    }
    Ok((points, proposals))
}

/// The generator used for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn sample_boundary(density: &BoundaryDensity, count: usize, seed: u64) -> Result<Vec<Vec3>> {
    Ok(sample_boundary_with(density, count, &mut trial_rng(seed, 0))?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficitEstimate {
    pub n_points: usize,
    pub trials: usize,
    /// `vol(K) - mean hull volume`.
    pub mean_deficit: f64,
    pub std_error: f64,
    /// `N^{2/(n-1)}` times the mean deficit.
    pub scaled: f64,
    pub scaled_std_error: f64,
    pub min_deficit: f64,
    pub degenerate_trials: usize,
    pub acceptance_rate: f64,
}

/// Monte Carlo estimate of `vol(K) - E vol([x_1, …, x_N])`.
///
/// Trial `t` uses [`trial_rng`]`(seed, t)`; results are combined in trial
/// order, so the estimate does not depend on the thread count.
pub fn expected_deficit(density: &BoundaryDensity, n_points: usize, trials: usize, seed: u64) -> Result<DeficitEstimate> {
    let dim = density.body.dim();
    if n_points < dim + 1 {
        return Err(Error::InvalidParameters(format!("need N ≥ {}, got {n_points}", dim + 1)));
    }
    if trials < 2 {
        return Err(Error::InvalidParameters("need at least two trials".into()));
    }
    let volume = density.body.sample(&RuleSpec::default_for(dim)?.build()?)?.volume();
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (points, proposals) = sample_boundary_with(density, n_points, &mut trial_rng(seed, t))?;
            let hull = hull_volume(&points, dim);
            Ok((volume - hull.volume, hull.degenerate, proposals))
        })
        .collect::<Result<Vec<_>>>()?;
    let t = trials as f64;
    let mean = compensated_sum(per_trial.iter().map(|r| r.0)) / t;
    let var = compensated_sum(per_trial.iter().map(|r| (r.0 - mean).powi(2))) / (t - 1.0);
    let std_error = (var / t).sqrt();
    let scale = (n_points as f64).powf(2.0 / (dim as f64 - 1.0));
    let proposals: u64 = per_trial.iter().map(|r| r.2).sum();
    Ok(DeficitEstimate {
        n_points,
        trials,
        mean_deficit: mean,
        std_error,
        scaled: scale * mean,
        scaled_std_error: scale * std_error,
        min_deficit: per_trial.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
        degenerate_trials: per_trial.iter().filter(|r| r.1).count(),
        acceptance_rate: (n_points * trials) as f64 / proposals as f64,
    })
}

/// `(n-1)^{(n+1)/(n-1)} Γ(n+1+2/(n-1)) / (2 (n+1)! vol_{n-2}(∂B^{n-1})^{2/(n-1)})`.
pub fn random_polytope_constant(dim: usize) -> f64 {
    let n = dim as f64;
    let e = 2.0 / (n - 1.0);
    let sphere = 2.0 * PI.powf(0.5 * (n - 1.0)) / gamma(0.5 * (n - 1.0));
    let factorial = gamma(n + 2.0);
    (n - 1.0).powf((n + 1.0) / (n - 1.0)) * gamma(n + 1.0 + e) / (2.0 * factorial * sphere.powf(e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpretationReport {
    pub body: String,
    pub dim: usize,
    pub index: WeightIndex,
    pub p: Exponent,
    pub seed: u64,
    pub estimates: Vec<DeficitEstimate>,
    /// Least-squares intercept of the scaled deficit against `1/N`.
    pub extrapolated: f64,
    pub extrapolated_std_error: f64,
    pub constant: f64,
    pub normalizer: f64,
    pub omega: f64,
    /// `c_n Z^{2/(n-1)} ω^p`.
    pub target: f64,
    pub ratio: f64,
    pub relative_error: f64,
    pub within_tolerance: bool,
    /// Runs in ℝ³ are not part of the acceptance gate.
    pub informational: bool,
}

/// Intercept at `x = 0` of the least-squares line through `(x_i, y_i)`,
/// with its standard error from independent `σ_i`.
pub fn linear_intercept(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> (f64, f64) {
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    // intercept = Σ c_i y_i
    let coeffs: Vec<f64> = xs.iter().map(|x| 1.0 / len - mx * (x - mx) / sxx).collect();
    let value = coeffs.iter().zip(ys).map(|(c, y)| c * y).sum();
    let var: f64 = coeffs.iter().zip(sigmas).map(|(c, s)| (c * s).powi(2)).sum();
    (value, var.sqrt())
}

/// Scaled deficits along `schedule`, extrapolated linearly in `1/N`, against
/// `c_n Z^{2/(n-1)} ω^p_{m,k,ī}(K)`.
pub fn interpretation_check(
    body: &SupportBody,
    index: &WeightIndex,
    p: Exponent,
    schedule: &[usize],
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<InterpretationReport> {
    if schedule.len() < 2 {
        return Err(Error::InvalidParameters("N schedule needs at least two sizes to extrapolate".into()));
    }
    let dim = body.dim();
    let rule = RuleSpec::default_for(dim)?;
    let density = BoundaryDensity::new(body, index, p, rule)?;
    let sampled = body.sample(&rule.build()?)?;
    let omega = weighted_asa(&sampled, index, p)?.value;
    let estimates = schedule
        .iter()
        .map(|&n| expected_deficit(&density, n, trials, seed))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = schedule.iter().map(|&n| 1.0 / n as f64).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| e.scaled).collect();
    let sig: Vec<f64> = estimates.iter().map(|e| e.scaled_std_error).collect();
    let (extrapolated, extrapolated_std_error) = linear_intercept(&xs, &ys, &sig);
    let constant = random_polytope_constant(dim);
    let z = density.normalizer();
    let target = constant * z.powf(2.0 / (dim as f64 - 1.0)) * omega;
    let relative_error = (extrapolated - target).abs() / target;
    Ok(InterpretationReport {
        body: body.label().to_string(),
        dim,
        index: index.clone(),
        p,
        seed,
        estimates,
        extrapolated,
        extrapolated_std_error,
        constant,
        normalizer: z,
        omega,
        target,
        ratio: extrapolated / target,
        relative_error,
        within_tolerance: relative_error <= tol.monte_carlo,
        informational: dim != 2,
    })
}
