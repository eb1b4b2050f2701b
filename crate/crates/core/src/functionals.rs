//! Weighted `L_p` affine surface areas.
//!
//! For an index `(m, k, ī)` and `p ≠ -n`,
//!
//! ```text
//! ω^p_{m,k,ī}(K) = ∫_{∂K} H_{n-1}^{p/(n+p)} ⟨x,N⟩^{m-k-n(p-1)/(n+p)} c_n ∏_j H_j^{i_j} dH^{n-1}
//! ```
//!
//! with `c_n = ∏_j C(n-1, j)^{i_j}`. It is evaluated on the sphere, where
//! `H_j = s_{n-1-j}/s_{n-1}` and `dH^{n-1} = s_{n-1} dσ`, so the integrand
//! per direction is
//!
//! ```text
//! c_n s_{n-1}^{1 - p/(n+p) - Σ i_j} ∏_j s_{n-1-j}^{i_j} h^{m-k-n(p-1)/(n+p)}.
//! ```
//!
//! `p = 0` gives `n` times the weighted volume of `K` and `p = ∞` gives `n`
//! times the weighted volume of `K°`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{CurvaturePoint, SampledBody, SupportBody, Vec3};
use crate::quadrature::RuleSpec;

/// The exponent `p`, including the symbolic value `∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const ZERO: Exponent = Exponent::Finite(0.0);

    pub fn finite(&self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(*p),
            Exponent::Infinity => None,
        }
    }

    /// Rejects `p = -n` and non-finite values.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            Exponent::Finite(p) if !p.is_finite() => Err(Error::InvalidParameters(format!("p must be finite or ∞, got {p}"))),
            Exponent::Finite(p) if p == -(dim as f64) => Err(Error::ExcludedExponent { dim }),
            _ => Ok(()),
        }
    }

    /// `p/(n+p)`, the power of the Petty ratio; `1` at `∞`.
    pub fn ratio_power(&self, dim: usize) -> f64 {
        match *self {
            Exponent::Finite(p) => p / (dim as f64 + p),
            Exponent::Infinity => 1.0,
        }
    }

    /// `n(p-1)/(n+p)`; `n` at `∞`.
    pub fn height_power(&self, dim: usize) -> f64 {
        let n = dim as f64;
        match *self {
            Exponent::Finite(p) => n * (p - 1.0) / (n + p),
            Exponent::Infinity => n,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            t => t
                .parse::<f64>()
                .ok()
                .filter(|p| p.is_finite())
                .map(Exponent::Finite)
                .ok_or_else(|| Error::InvalidParameters(format!("cannot parse p = `{s}`"))),
        }
    }
}

impl From<f64> for Exponent {
    fn from(p: f64) -> Self {
        if p == f64::INFINITY {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(p) => Ok(Exponent::Finite(p)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The weight `(m, k, ī)` with `i_1 + 2 i_2 + … + (n-1) i_{n-1} = m`.
///
/// `k` is real. `counts[j-1]` holds `i_j`; an `i_0` entry has no effect on
/// any formula and is not represented.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightIndex {
    dim: usize,
    m: u32,
    k: f64,
    counts: Vec<u32>,
}

impl WeightIndex {
    /// `counts` may be shorter than `n - 1`; missing entries are zero.
    pub fn new(dim: usize, m: u32, k: f64, counts: &[u32]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if counts.len() > dim - 1 {
            return Err(Error::InvalidIndex(format!(
                "n = {dim} admits i_1..i_{}, got {} entries",
                dim - 1,
                counts.len()
            )));
        }
        if !k.is_finite() {
            return Err(Error::InvalidIndex(format!("k must be finite, got {k}")));
        }
        let mut padded = counts.to_vec();
        padded.resize(dim - 1, 0);
        let weighted: u32 = padded.iter().enumerate().map(|(j, i)| (j as u32 + 1) * i).sum();
        if weighted != m {
            return Err(Error::InvalidIndex(format!(
                "Σ j·i_j = {weighted} but m = {m}"
            )));
        }
        Ok(Self { dim, m, k, counts: padded })
    }

    /// `m = k = 0`, `ī = 0`: the unweighted case.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            m: 0,
            k: 0.0,
            counts: vec![0; dim.saturating_sub(1)],
        }
    }

    pub fn with_k(&self, k: f64) -> Self {
        Self { k, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `i_1, …, i_{n-1}`.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total_count(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// `c_n = ∏_j C(n-1, j)^{i_j}`.
    pub fn combinatorial_constant(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(j, &i)| binomial(self.dim as u64 - 1, j as u64 + 1).pow(i))
            .product()
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0 && self.k == 0.0
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::InvalidIndex(format!(
                "index is for n = {}, body has n = {dim}",
                self.dim
            )));
        }
        Ok(())
    }
}

impl fmt::Display for WeightIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<String> = self.counts.iter().map(|i| i.to_string()).collect();
        write!(f, "m={} k={} i=({})", self.m, self.k, counts.join(","))
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// A functional value with the inputs that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub body: String,
    pub p: Exponent,
    pub index: WeightIndex,
    pub rule: RuleSpec,
    pub value: f64,
}

/// Log of the sphere-side integrand of `ω^p_{m,k,ī}` at one direction.
fn log_integrand(point: &CurvaturePoint, index: &WeightIndex, p: Exponent, log_cn: f64) -> f64 {
    let n = point.dim;
    let top = point.s[n - 1].ln();
    let mut log = log_cn + (1.0 - p.ratio_power(n) - index.total_count() as f64) * top;
    for (j, &i) in index.counts.iter().enumerate() {
        if i > 0 {
            log += i as f64 * point.s[n - 2 - j].ln();
        }
    }
    log + (index.m as f64 - index.k - p.height_power(n)) * point.h.ln()
}

/// `ω^p_{m,k,ī}(K) = μ_ī-as_p(K)`.
pub fn weighted_asa(body: &SampledBody, index: &WeightIndex, p: Exponent) -> Result<FunctionalValue> {
    index.check_dim(body.dim())?;
    p.validate(body.dim())?;
    let log_cn = (index.combinatorial_constant() as f64).ln();
    let value = body.integrate(|pt| log_integrand(pt, index, p, log_cn).exp())?;
    Ok(FunctionalValue {
        body: body.label().to_string(),
        p,
        index: index.clone(),
        rule: body.rule(),
        value,
    })
}

/// The unweighted `as_p(K)`.
pub fn asa(body: &SampledBody, p: Exponent) -> Result<FunctionalValue> {
    weighted_asa(body, &WeightIndex::zero(body.dim()), p)
}

/// `μ_ī-vol_n(K) = ω^0/n`.
pub fn weighted_volume(body: &SampledBody, index: &WeightIndex) -> Result<f64> {
    Ok(weighted_asa(body, index, Exponent::ZERO)?.value / body.dim() as f64)
}

/// `μ_ī-vol_n(K°) = ω^∞/n`.
pub fn weighted_polar_volume(body: &SampledBody, index: &WeightIndex) -> Result<f64> {
    Ok(weighted_asa(body, index, Exponent::Infinity)?.value / body.dim() as f64)
}

/// `q` with `ω^p(aK) = a^q ω^p(K)`: `n(n-p)/(n+p) - k`, or `-n - k` at `∞`.
pub fn homogeneity_degree(dim: usize, p: Exponent, k: f64) -> Result<f64> {
    p.validate(dim)?;
    let n = dim as f64;
    Ok(match p {
        Exponent::Finite(p) => n * (n - p) / (n + p) - k,
        Exponent::Infinity => -n - k,
    })
}

/// Lutwak's density `f_p(K, u) = (f_K(u) / h_K(u)^{p-1})^{n/(n+p)}` with
/// `f_K = s_{n-1}`.
pub fn lutwak_density(body: &SupportBody, p: Exponent, u: &Vec3) -> Result<f64> {
    let n = body.dim();
    p.validate(n)?;
    let cp = body.curvature_at(&u.normalize())?;
    let fk = cp.jacobian();
    Ok(match p {
        Exponent::Finite(p) => {
            let e = n as f64 / (n as f64 + p);
            (e * (fk.ln() - (p - 1.0) * cp.h.ln())).exp()
        }
        Exponent::Infinity => cp.h.powi(-(n as i32)),
    })
}
