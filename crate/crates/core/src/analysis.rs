//! Verification of the inequalities, monotonicity statements, the ellipsoid
//! characterization and the entropy-power limits.
//!
//! Every check produces a [`VerificationReport`]. An inadmissible parameter
//! combination is a verdict, not an error, so that grids can be swept.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::divergence::{kl_divergence, ConeDensities, Direction};
use crate::error::{Error, Result};
use crate::functionals::{weighted_asa, Exponent, WeightIndex};
use crate::geometry::{SampledBody, SupportBody};
use crate::quadrature::RuleSpec;
use crate::tolerances::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// `ω^r ≤ (ω^t)^a (ω^s)^{1-a}`.
    HolderThree,
    /// `ω^r/ω^0 ≤ (ω^t/ω^0)^a`.
    HolderVolume,
    /// Log-convexity of `k ↦ ω^p_{m,k,ī}`.
    KInterpolation,
    /// `(ω^p/ω^0)^{(n+p)/p}` non-decreasing.
    MonotoneRatioPower,
    /// `(ω^p/ω^0)^{n+p}` non-increasing, as stated.
    MonotoneVolumeNormalized,
    /// `(ω^p/ω^∞)^{n+p}` non-increasing.
    MonotonePolarNormalized,
    /// Constancy of the Petty ratio.
    PettyRatio,
    LimitInfinity,
    LimitZero,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("claim serializes");
        f.write_str(s.as_str().expect("claim is a string"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Equality,
    Violated,
    Inadmissible,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Equality => "equality",
            Verdict::Violated => "violated",
            Verdict::Inadmissible => "inadmissible",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim: Claim,
    pub body: String,
    pub rule: RuleSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<WeightIndex>,
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs - lhs)/|rhs|` for inequalities `lhs ≤ rhs`.
    pub slack: f64,
    pub verdict: Verdict,
    /// Slack above the strictness threshold.
    pub strict: bool,
    /// Whether the body is in the claim's equality class.
    pub equality_case: bool,
    /// Right-hand side in an alternative reading of the claim.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternate_rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    fn new(claim: Claim, body: &SampledBody, index: Option<&WeightIndex>, params: &[(&str, f64)]) -> Self {
        Self {
            claim,
            body: body.label().to_string(),
            rule: body.rule(),
            index: index.cloned(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            verdict: Verdict::Inadmissible,
            strict: false,
            equality_case: false,
            alternate_rhs: None,
            note: None,
        }
    }

    fn inadmissible(mut self, why: impl Into<String>) -> Self {
        self.verdict = Verdict::Inadmissible;
        self.note = Some(why.into());
        self
    }

    fn compare(mut self, lhs: f64, rhs: f64, tol: &Tolerances) -> Self {
        let slack = (rhs - lhs) / rhs.abs();
        self.lhs = lhs;
        self.rhs = rhs;
        self.slack = slack;
        self.strict = slack > tol.strictness;
        self.verdict = if slack.abs() <= tol.equality {
            Verdict::Equality
        } else if slack < -tol.equality {
            Verdict::Violated
        } else {
            Verdict::Holds
        };
        self
    }

    /// Equality verdicts occur exactly on the equality class.
    pub fn equality_matches(&self) -> bool {
        match self.verdict {
            Verdict::Equality => self.equality_case,
            Verdict::Holds => !self.equality_case,
            _ => false,
        }
    }
}

/// Statistics of the Petty ratio `H_{n-1}/h^{n+1}` over the nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PettyStats {
    pub min: f64,
    pub max: f64,
    /// `(max - min)/mean(min, max)`.
    pub spread: f64,
    pub ellipsoid: bool,
}

pub fn petty_ratio_stats(body: &SampledBody, tol: &Tolerances) -> PettyStats {
    let (min, max) = body
        .points()
        .iter()
        .map(|p| p.petty_ratio())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let spread = (max - min) / (0.5 * (max + min));
    PettyStats {
        min,
        max,
        spread,
        ellipsoid: spread < tol.ellipsoid_spread,
    }
}

/// The relative spread of `h` over the nodes is below the ellipsoid
/// threshold, i.e. the body is a centred ball.
pub fn is_centered_ball(body: &SampledBody, tol: &Tolerances) -> bool {
    let (lo, hi) = body
        .points()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.h), hi.max(p.h)));
    (hi - lo) / (0.5 * (hi + lo)) < tol.ellipsoid_spread
}

pub fn petty_report(body: &SampledBody, tol: &Tolerances) -> VerificationReport {
    let stats = petty_ratio_stats(body, tol);
    let mut report = VerificationReport::new(Claim::PettyRatio, body, None, &[]);
    report.lhs = stats.min;
    report.rhs = stats.max;
    report.slack = stats.spread;
    report.equality_case = stats.ellipsoid;
    report.verdict = if stats.ellipsoid { Verdict::Equality } else { Verdict::Holds };
    report.strict = stats.spread > tol.strictness;
    report
}

fn omega(body: &SampledBody, index: &WeightIndex, p: f64) -> Result<f64> {
    Ok(weighted_asa(body, index, Exponent::Finite(p))?.value)
}

fn check_not_excluded(dim: usize, ps: &[f64]) -> Result<()> {
    for &p in ps {
        Exponent::Finite(p).validate(dim)?;
    }
    Ok(())
}

/// `ω^r ≤ (ω^t)^a (ω^s)^{1-a}` with `a = (r-s)(n+t)/((t-s)(n+r))`,
/// admissible when `(n+r)(t-s)/((n+t)(r-s)) > 1`.
pub fn verify_holder_three(
    body: &SampledBody,
    index: &WeightIndex,
    r: f64,
    s: f64,
    t: f64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let n = body.dim() as f64;
    check_not_excluded(body.dim(), &[r, s, t])?;
    let mut report = VerificationReport::new(Claim::HolderThree, body, Some(index), &[("r", r), ("s", s), ("t", t)]);
    report.equality_case = petty_ratio_stats(body, tol).ellipsoid;
    if r == s || t == s {
        return Ok(report.inadmissible("r = s or t = s"));
    }
    let hypothesis = (n + r) * (t - s) / ((n + t) * (r - s));
    if !(hypothesis > 1.0) {
        return Ok(report.inadmissible(format!("(n+r)(t-s)/((n+t)(r-s)) = {hypothesis} ≤ 1")));
    }
    let a = (r - s) * (n + t) / ((t - s) * (n + r));
    let b = (t - r) * (n + s) / ((t - s) * (n + r));
    let (wr, ws, wt) = (omega(body, index, r)?, omega(body, index, s)?, omega(body, index, t)?);
    let rhs = (a * wt.ln() + b * ws.ln()).exp();
    Ok(report.compare(wr, rhs, tol))
}

/// `ω^r/μvol ≤ n^{1-a} (ω^t/μvol)^a` with `a = r(n+t)/(t(n+r))` and
/// `μvol = ω^0/n`, admissible when `(n+r)t/((n+t)r) > 1`.
///
/// `alternate_rhs` holds the right-hand side with both ratios taken
/// against `n·μvol` and the factor `n^{n(t-r)/(t(n+r))}`.
pub fn verify_holder_volume(
    body: &SampledBody,
    index: &WeightIndex,
    r: f64,
    t: f64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let dim = body.dim();
    let n = dim as f64;
    check_not_excluded(dim, &[r, t])?;
    let mut report = VerificationReport::new(Claim::HolderVolume, body, Some(index), &[("r", r), ("t", t)]);
    report.equality_case = petty_ratio_stats(body, tol).ellipsoid;
    if r == 0.0 || t == 0.0 {
        return Ok(report.inadmissible("r = 0 or t = 0"));
    }
    let hypothesis = (n + r) * t / ((n + t) * r);
    if !(hypothesis > 1.0) {
        return Ok(report.inadmissible(format!("(n+r)t/((n+t)r) = {hypothesis} ≤ 1")));
    }
    let a = r * (n + t) / (t * (n + r));
    let w0 = omega(body, index, 0.0)?;
    let mu_vol = w0 / n;
    let (wr, wt) = (omega(body, index, r)?, omega(body, index, t)?);
    let lhs = wr / mu_vol;
    let rhs = n.powf(1.0 - a) * (wt / mu_vol).powf(a);
    let mut report = report.compare(lhs, rhs, tol);
    let alt_lhs = wr / w0;
    let alt_rhs = n.powf(n * (t - r) / (t * (n + r))) * (wt / w0).powf(a);
    report.alternate_rhs = Some(alt_rhs * lhs / alt_lhs);
    Ok(report)
}

/// `ω^p_{m,s,ī} ≤ (ω^p_{m,k,ī})^{(s-r)/(k-r)} (ω^p_{m,r,ī})^{(k-s)/(k-r)}`
/// for `r < s < k`; the `k` of `index` is ignored.
pub fn verify_k_interpolation(
    body: &SampledBody,
    index: &WeightIndex,
    p: Exponent,
    r: f64,
    s: f64,
    k: f64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    p.validate(body.dim())?;
    let mut params = vec![("r", r), ("s", s), ("k", k)];
    if let Some(pf) = p.finite() {
        params.push(("p", pf));
    }
    let mut report = VerificationReport::new(Claim::KInterpolation, body, Some(index), &params);
    report.equality_case = is_centered_ball(body, tol);
    if p == Exponent::Infinity {
        report.note = Some("p = inf".into());
    }
    if !(r < s && s < k) {
        return Ok(report.inadmissible("requires r < s < k"));
    }
    let at = |kk: f64| weighted_asa(body, &index.with_k(kk), p).map(|v| v.value);
    let (wr, ws, wk) = (at(r)?, at(s)?, at(k)?);
    let rhs = ((s - r) / (k - r) * wk.ln() + (k - s) / (k - r) * wr.ln()).exp();
    Ok(report.compare(ws, rhs, tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotone {
    NonDecreasing,
    NonIncreasing,
}

/// One monotone sequence along a `p` grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneForm {
    pub claim: Claim,
    pub direction: Monotone,
    pub values: Vec<f64>,
    /// Relative step `±(v_{i+1} - v_i)/|v_i|`, positive in the claimed direction.
    pub steps: Vec<f64>,
    /// `(max - min)/mean(max, min)`.
    pub spread: f64,
    pub verdict: Verdict,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityScan {
    pub body: String,
    pub rule: RuleSpec,
    pub index: WeightIndex,
    pub grid: Vec<f64>,
    pub ellipsoid: bool,
    pub forms: Vec<MonotoneForm>,
}

impl MonotonicityScan {
    /// One report per form; `lhs`/`rhs` are the endpoints of the worst step.
    pub fn reports(&self) -> Vec<VerificationReport> {
        self.forms
            .iter()
            .map(|form| {
                let worst = form
                    .steps
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
                let mut params = BTreeMap::new();
                params.insert("p_from".to_string(), self.grid[worst.0]);
                params.insert("p_to".to_string(), self.grid[worst.0 + 1]);
                params.insert("spread".to_string(), form.spread);
                VerificationReport {
                    claim: form.claim,
                    body: self.body.clone(),
                    rule: self.rule,
                    index: Some(self.index.clone()),
                    params,
                    lhs: form.values[worst.0],
                    rhs: form.values[worst.0 + 1],
                    slack: worst.1,
                    verdict: form.verdict,
                    strict: form.strict,
                    equality_case: self.ellipsoid,
                    alternate_rhs: None,
                    note: None,
                }
            })
            .collect()
    }
}

/// Scans `(ω^p/ω^0)^{(n+p)/p}`, `(ω^p/ω^0)^{n+p}` and `(ω^p/ω^∞)^{n+p}`
/// along an increasing grid on one side of `-n` that avoids `0`.
///
/// A form is violated if a relative step goes against its direction by more
/// than `monotone_slack`, and constant (equality) if its spread is below
/// `10·equality`.
pub fn monotonicity_scan(
    body: &SampledBody,
    index: &WeightIndex,
    grid: &[f64],
    tol: &Tolerances,
) -> Result<MonotonicityScan> {
    let dim = body.dim();
    let n = dim as f64;
    if grid.len() < 2 {
        return Err(Error::InvalidParameters("monotonicity grid needs at least two points".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameters("monotonicity grid must be strictly increasing".into()));
    }
    check_not_excluded(dim, grid)?;
    if grid.contains(&0.0) {
        return Err(Error::InvalidParameters("monotonicity grid must exclude p = 0".into()));
    }
    if grid[0] < -n && grid[grid.len() - 1] > -n {
        return Err(Error::InvalidParameters("monotonicity grid crosses p = -n".into()));
    }
    let w0 = omega(body, index, 0.0)?;
    let winf = weighted_asa(body, index, Exponent::Infinity)?.value;
    let ws = grid.iter().map(|&p| omega(body, index, p)).collect::<Result<Vec<_>>>()?;
    let ellipsoid = petty_ratio_stats(body, tol).ellipsoid;

    let build = |claim: Claim, direction: Monotone, values: Vec<f64>| {
        let sign = match direction {
            Monotone::NonDecreasing => 1.0,
            Monotone::NonIncreasing => -1.0,
        };
        let steps: Vec<f64> = values.windows(2).map(|w| sign * (w[1] - w[0]) / w[0].abs()).collect();
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let spread = (hi - lo) / (0.5 * (hi + lo)).abs();
        let verdict = if steps.iter().any(|&s| s < -tol.monotone_slack) {
            Verdict::Violated
        } else if spread <= 10.0 * tol.equality {
            Verdict::Equality
        } else {
            Verdict::Holds
        };
        MonotoneForm {
            claim,
            direction,
            strict: steps.iter().all(|&s| s > tol.strictness),
            values,
            steps,
            spread,
            verdict,
        }
    };

    let ratio_power = grid.iter().zip(&ws).map(|(&p, w)| ((n + p) / p * (w / w0).ln()).exp()).collect();
    let volume_normalized = grid.iter().zip(&ws).map(|(&p, w)| ((n + p) * (w / w0).ln()).exp()).collect();
    let polar_normalized = grid.iter().zip(&ws).map(|(&p, w)| ((n + p) * (w / winf).ln()).exp()).collect();
    Ok(MonotonicityScan {
        body: body.label().to_string(),
        rule: body.rule(),
        index: index.clone(),
        grid: grid.to_vec(),
        ellipsoid,
        forms: vec![
            build(Claim::MonotoneRatioPower, Monotone::NonDecreasing, ratio_power),
            build(Claim::MonotoneVolumeNormalized, Monotone::NonIncreasing, volume_normalized),
            build(Claim::MonotonePolarNormalized, Monotone::NonIncreasing, polar_normalized),
        ],
    })
}

/// Value at `x0` of the polynomial through `(xs, ys)`.
pub fn neville(xs: &[f64], ys: &[f64], x0: f64) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut table = ys.to_vec();
    let len = xs.len();
    for level in 1..len {
        for i in 0..len - level {
            let j = i + level;
            table[i] = ((x0 - xs[j]) * table[i] + (xs[i] - x0) * table[i + 1]) / (xs[i] - xs[j]);
        }
    }
    table[0]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub claim: Claim,
    pub body: String,
    pub rule: RuleSpec,
    pub index: WeightIndex,
    pub schedule: Vec<f64>,
    pub estimates: Vec<f64>,
    /// Extrapolation variable: `n/(n+p)` for `p → ∞`, `p/(n+p)` for `p → 0`.
    pub abscissae: Vec<f64>,
    pub extrapolated: f64,
    /// Target with the constant that the limit computation produces.
    pub proof_form_target: f64,
    /// Target with the constant as written in the statement.
    pub stated_form_target: f64,
    pub relative_error: f64,
    pub stated_form_relative_error: f64,
    pub verdict: Verdict,
}

impl LimitReport {
    pub fn report(&self) -> VerificationReport {
        let mut params = BTreeMap::new();
        params.insert("stated_form_target".to_string(), self.stated_form_target);
        VerificationReport {
            claim: self.claim,
            body: self.body.clone(),
            rule: self.rule,
            index: Some(self.index.clone()),
            params,
            lhs: self.extrapolated,
            rhs: self.proof_form_target,
            slack: self.relative_error,
            verdict: self.verdict,
            strict: false,
            equality_case: true,
            alternate_rhs: Some(self.stated_form_target),
            note: None,
        }
    }
}

fn extrapolate(xs: &[f64], logs: &[f64]) -> f64 {
    neville(xs, logs, 0.0).exp()
}

fn limit_verdict(extrapolated: f64, target: f64, tol: &Tolerances) -> (f64, Verdict) {
    let err = (extrapolated - target).abs() / target.abs();
    (err, if err <= tol.limit { Verdict::Equality } else { Verdict::Violated })
}

pub const DEFAULT_INFINITY_SCHEDULE: [f64; 5] = [10.0, 30.0, 100.0, 300.0, 1000.0];
pub const DEFAULT_ZERO_SCHEDULE: [f64; 4] = [0.3, 0.1, 0.03, 0.01];

/// `lim_{p→∞} (ω^p/ω^∞)^{n+p}` against `exp(-(n/ω^∞) D_KL(P_K‖Q_K))`.
///
/// The stated-form target is `exp(-n D_KL(P_K‖Q_K)/μ_ī-vol(K°))` with
/// `μ_ī-vol(K°) = ω^∞/n`.
pub fn limit_p_infinity(
    body: &SampledBody,
    index: &WeightIndex,
    schedule: &[f64],
    tol: &Tolerances,
) -> Result<LimitReport> {
    let n = body.dim() as f64;
    if schedule.len() < 2 || schedule.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidParameters("limit schedule needs at least two positive p".into()));
    }
    let winf = weighted_asa(body, index, Exponent::Infinity)?.value;
    let mut logs = Vec::with_capacity(schedule.len());
    for &p in schedule {
        logs.push((n + p) * (omega(body, index, p)? / winf).ln());
    }
    let xs: Vec<f64> = schedule.iter().map(|p| n / (n + p)).collect();
    let extrapolated = extrapolate(&xs, &logs);
    let kl = kl_divergence(&ConeDensities::new(body, index)?, Direction::PQ);
    let proof = (-(n / winf) * kl).exp();
    let stated = (-n * kl / (winf / n)).exp();
    let (relative_error, verdict) = limit_verdict(extrapolated, proof, tol);
    Ok(LimitReport {
        claim: Claim::LimitInfinity,
        body: body.label().to_string(),
        rule: body.rule(),
        index: index.clone(),
        schedule: schedule.to_vec(),
        estimates: logs.iter().map(|l| l.exp()).collect(),
        abscissae: xs,
        extrapolated,
        proof_form_target: proof,
        stated_form_target: stated,
        relative_error,
        stated_form_relative_error: (extrapolated - stated).abs() / stated,
        verdict,
    })
}

/// `lim_{p→0} (ω^p(L)/ω^0(L))^{n(n+p)/p}` for `L = K°` against
/// `exp(-(n/ω^0(L)) D_KL(Q_L‖P_L))`.
///
/// The stated-form target is `exp(-n D_KL(P_L‖Q_L)/μ_ī-vol(L))` with
/// `μ_ī-vol(L) = ω^0(L)/n`.
pub fn limit_p_zero(
    body: &SupportBody,
    index: &WeightIndex,
    rule: RuleSpec,
    schedule: &[f64],
    tol: &Tolerances,
) -> Result<LimitReport> {
    let polar = body.polar()?;
    let sampled = polar.sample(&rule.build()?)?;
    limit_p_zero_sampled(&sampled, index, schedule, tol)
}

/// [`limit_p_zero`] for an already sampled polar body.
pub fn limit_p_zero_sampled(
    polar: &SampledBody,
    index: &WeightIndex,
    schedule: &[f64],
    tol: &Tolerances,
) -> Result<LimitReport> {
    let n = polar.dim() as f64;
    if schedule.len() < 2 || schedule.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidParameters("limit schedule needs at least two positive p".into()));
    }
    let w0 = omega(polar, index, 0.0)?;
    let mut logs = Vec::with_capacity(schedule.len());
    for &p in schedule {
        logs.push(n * (n + p) / p * (omega(polar, index, p)? / w0).ln());
    }
    let xs: Vec<f64> = schedule.iter().map(|p| p / (n + p)).collect();
    let extrapolated = extrapolate(&xs, &logs);
    let densities = ConeDensities::new(polar, index)?;
    let proof = (-(n / w0) * kl_divergence(&densities, Direction::QP)).exp();
    let stated = (-n * kl_divergence(&densities, Direction::PQ) / (w0 / n)).exp();
    let (relative_error, verdict) = limit_verdict(extrapolated, proof, tol);
    Ok(LimitReport {
        claim: Claim::LimitZero,
        body: polar.label().to_string(),
        rule: polar.rule(),
        index: index.clone(),
        schedule: schedule.to_vec(),
        estimates: logs.iter().map(|l| l.exp()).collect(),
        abscissae: xs,
        extrapolated,
        proof_form_target: proof,
        stated_form_target: stated,
        relative_error,
        stated_form_relative_error: (extrapolated - stated).abs() / stated,
        verdict,
    })
}

/// Parameter grids for [`run_suite`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    /// Exponents for the Hölder-type inequalities.
    pub p_grid: Vec<f64>,
    /// Exponents for the monotonicity scan.
    pub monotone_grid: Vec<f64>,
    /// Values of `k` for the interpolation inequality.
    pub k_grid: Vec<f64>,
    pub infinity_schedule: Vec<f64>,
    pub zero_schedule: Vec<f64>,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            p_grid: vec![-1.0, 0.5, 1.0, 2.0, 4.0, 7.0],
            monotone_grid: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            k_grid: vec![-1.0, 0.0, 0.5, 1.0, 2.0],
            infinity_schedule: DEFAULT_INFINITY_SCHEDULE.to_vec(),
            zero_schedule: DEFAULT_ZERO_SCHEDULE.to_vec(),
            tolerances: Tolerances::default(),
        }
    }
}

/// The weight indices exercised by the suite: the zero index and two
/// nontrivial ones per dimension.
pub fn suite_indices(dim: usize) -> Result<Vec<WeightIndex>> {
    match dim {
        2 => Ok(vec![
            WeightIndex::zero(2),
            WeightIndex::new(2, 1, 0.0, &[1])?,
            WeightIndex::new(2, 2, 1.0, &[2])?,
        ]),
        3 => Ok(vec![
            WeightIndex::zero(3),
            WeightIndex::new(3, 1, 0.0, &[1, 0])?,
            WeightIndex::new(3, 2, 1.0, &[0, 1])?,
        ]),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub reports: Vec<VerificationReport>,
    pub monotonicity: Vec<MonotonicityScan>,
    pub limits: Vec<LimitReport>,
}

impl SuiteReport {
    /// Every report, in body order then claim order.
    pub fn all_reports(&self) -> Vec<VerificationReport> {
        let mut all = self.reports.clone();
        all.extend(self.monotonicity.iter().flat_map(|m| m.reports()));
        all.extend(self.limits.iter().map(|l| l.report()));
        all.sort_by(|a, b| a.body.cmp(&b.body).then(a.claim.cmp(&b.claim)));
        all
    }

    pub fn count(&self, claim: Claim, verdict: Verdict) -> usize {
        self.all_reports().iter().filter(|r| r.claim == claim && r.verdict == verdict).count()
    }

    pub fn any_violated(&self) -> bool {
        self.all_reports().iter().any(|r| r.verdict == Verdict::Violated)
    }
}

/// All checks for one body.
pub fn run_body(body: &SupportBody, config: &SuiteConfig) -> Result<SuiteReport> {
    let tol = &config.tolerances;
    let rule = RuleSpec::default_for(body.dim())?;
    let sampled = body.sample(&rule.build()?)?;
    let polar = body.polar().ok().map(|p| p.sample(&rule.build()?)).transpose()?;
    let mut out = SuiteReport::default();
    out.reports.push(petty_report(&sampled, tol));
    let grid = &config.p_grid;
    for index in suite_indices(body.dim())? {
        for &r in grid {
            for &s in grid {
                for &t in grid {
                    if r != s && s != t && r != t {
                        out.reports.push(verify_holder_three(&sampled, &index, r, s, t, tol)?);
                    }
                }
            }
        }
        for &r in grid {
            for &t in grid {
                if r != t {
                    out.reports.push(verify_holder_volume(&sampled, &index, r, t, tol)?);
                }
            }
        }
        let ks = &config.k_grid;
        for &p in grid {
            for (a, &r) in ks.iter().enumerate() {
                for (b, &s) in ks.iter().enumerate().skip(a + 1) {
                    for &k in ks.iter().skip(b + 1) {
                        out.reports.push(verify_k_interpolation(&sampled, &index, Exponent::Finite(p), r, s, k, tol)?);
                    }
                }
            }
        }
        out.monotonicity.push(monotonicity_scan(&sampled, &index, &config.monotone_grid, tol)?);
        out.limits.push(limit_p_infinity(&sampled, &index, &config.infinity_schedule, tol)?);
        if let Some(polar) = &polar {
            out.limits.push(limit_p_zero_sampled(polar, &index, &config.zero_schedule, tol)?);
        }
    }
    Ok(out)
}

/// [`run_body`] over a corpus, in parallel; results keep the input order.
pub fn run_suite(bodies: &[SupportBody], config: &SuiteConfig) -> Result<SuiteReport> {
    let parts = bodies.par_iter().map(|b| run_body(b, config)).collect::<Result<Vec<_>>>()?;
    let mut out = SuiteReport::default();
    for part in parts {
        out.reports.extend(part.reports);
        out.monotonicity.extend(part.monotonicity);
        out.limits.extend(part.limits);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::circle_rule;
    use approx::assert_relative_eq;

    fn sample(body: SupportBody) -> SampledBody {
        body.sample(&circle_rule(512).unwrap()).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn holder_three_examples() {
        let zero = WeightIndex::zero(2);
        let pert = sample(SupportBody::perturbed_circle(3, 0.05).unwrap());
        let r = verify_holder_three(&pert, &zero, 1.0, 0.0, 4.0, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.strict);
        let e = sample(SupportBody::ellipsoid_from_axes(&[2.0, 1.0]).unwrap());
        let r = verify_holder_three(&e, &zero, 1.0, 0.0, 4.0, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Equality);
        assert!(r.slack.abs() < 1e-9);
        let bad = verify_holder_three(&e, &zero, 4.0, 0.0, 1.0, &tol()).unwrap();
        assert_eq!(bad.verdict, Verdict::Inadmissible);
        assert!(verify_holder_three(&e, &zero, -2.0, 0.0, 1.0, &tol()).is_err());
    }

    #[test]
    fn holder_volume_examples() {
        let zero = WeightIndex::zero(2);
        let pert = sample(SupportBody::perturbed_circle(3, 0.05).unwrap());
        let r = verify_holder_volume(&pert, &zero, 1.0, 2.0, &tol()).unwrap();
        assert!(r.verdict == Verdict::Holds && r.strict);
        let e = sample(SupportBody::ellipsoid_from_axes(&[2.0, 1.0]).unwrap());
        let r = verify_holder_volume(&e, &zero, 1.0, 2.0, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Equality);
        // with both ratios against n·μvol the ellipse is not an equality case
        let alt = r.alternate_rhs.unwrap();
        assert!((alt - r.lhs).abs() / alt > 1e-3);
        assert_eq!(verify_holder_volume(&e, &zero, 2.0, 1.0, &tol()).unwrap().verdict, Verdict::Inadmissible);
    }

    #[test]
    fn k_interpolation_examples() {
        let zero = WeightIndex::zero(2);
        let ball = sample(SupportBody::ball(2, 1.0).unwrap());
        let r = verify_k_interpolation(&ball, &zero, Exponent::Finite(1.0), 0.0, 1.0, 2.0, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Equality);
        assert!(r.equality_case);
        let e = sample(SupportBody::ellipsoid_from_axes(&[2.0, 1.0]).unwrap());
        let r = verify_k_interpolation(&e, &zero, Exponent::Finite(1.0), 0.0, 1.0, 2.0, &tol()).unwrap();
        assert!(r.verdict == Verdict::Holds && r.strict);
        let r = verify_k_interpolation(&e, &zero, Exponent::Finite(1.0), 1.0, 0.0, 2.0, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Inadmissible);
    }

    #[test]
    fn petty_stats() {
        let e = sample(SupportBody::ellipsoid_from_axes(&[2.0, 1.0]).unwrap());
        let s = petty_ratio_stats(&e, &tol());
        assert!(s.ellipsoid);
        assert_relative_eq!(s.min, 0.25, max_relative = 1e-12);
        let p = petty_ratio_stats(&sample(SupportBody::perturbed_circle(3, 0.05).unwrap()), &tol());
        assert!(!p.ellipsoid && p.spread > 0.1);
    }

    #[test]
    fn monotonicity_forms_on_the_ellipse() {
        let e = sample(SupportBody::ellipsoid_from_axes(&[2.0, 1.0]).unwrap());
        let scan = monotonicity_scan(&e, &WeightIndex::zero(2), &[0.5, 1.0, 2.0, 4.0], &tol()).unwrap();
        let first = &scan.forms[0];
        assert_eq!(first.verdict, Verdict::Equality);
        for v in &first.values {
            assert_relative_eq!(*v, 0.25, max_relative = 1e-12);
        }
        let polar = &scan.forms[2];
        assert_eq!(polar.verdict, Verdict::Equality);
        assert_relative_eq!(polar.values[0], 16.0, max_relative = 1e-12);
        // the ω^0-normalized power equals c^p on ellipsoids
        assert_relative_eq!(scan.forms[1].values[2], 0.0625, max_relative = 1e-12);
        assert!(monotonicity_scan(&e, &WeightIndex::zero(2), &[-3.0, -1.0], &tol()).is_err());
        assert!(monotonicity_scan(&e, &WeightIndex::zero(2), &[-1.0, 0.0, 1.0], &tol()).is_err());
    }

    #[test]
    fn neville_reproduces_polynomials() {
        let xs = [0.1, 0.2, 0.4, 0.8];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - x + 2.0 * x * x * x).collect();
        assert_relative_eq!(neville(&xs, &ys, 0.0), 3.0, max_relative = 1e-13);
    }

    #[test]
    fn ellipse_limits() {
        let body = SupportBody::ellipsoid_from_axes(&[2.0, 1.0]).unwrap();
        let e = sample(body.clone());
        let inf = limit_p_infinity(&e, &WeightIndex::zero(2), &DEFAULT_INFINITY_SCHEDULE, &tol()).unwrap();
        assert_relative_eq!(inf.extrapolated, 16.0, max_relative = 1e-8);
        assert_relative_eq!(inf.proof_form_target, 16.0, max_relative = 1e-12);
        assert_relative_eq!(inf.stated_form_target, 256.0, max_relative = 1e-12);
        let zero = limit_p_zero(&body, &WeightIndex::zero(2), RuleSpec::Circle(512), &DEFAULT_ZERO_SCHEDULE, &tol()).unwrap();
        assert_relative_eq!(zero.extrapolated, 16.0, max_relative = 1e-8);
        assert_eq!(zero.verdict, Verdict::Equality);
    }
}
