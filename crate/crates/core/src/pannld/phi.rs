//! The φₙ evaluator: expected reciprocal size of a relegated conflict focus
//! with range of influence m.
//!
//! φₙ(m) = E[1/(m + Y)] with U ~ Uniform(0,1) and Y | U=t ~ Binomial(n-m, 1-t²).
//!
//! Three modes:
//! - `Exact`: termwise Beta integral,
//!   φₙ(m) = Σ_{k=0}^{n-m} C(n-m,k)/(m+k) · (1/2)·B(k+1, n-m-k+1/2),
//!   evaluated through log-gamma. Slow but the anchor for everything else.
//! - `Quadrature`: fixed 64-node Gauss-Legendre over t of the inner binomial
//!   expectation; agrees with exact to ~1e-14 for n <= 500.
//! - `Asymptotic`: φₙ(m) ≈ (√c/n)·coth⁻¹(√c), c = n/(n-m); within 1% of
//!   exact for n >= 1000 and c in [1.1, 10].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMode {
    #[default]
    Exact,
    Quadrature,
    Asymptotic,
}

impl std::fmt::Display for PhiMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhiMode::Exact => f.write_str("exact"),
            PhiMode::Quadrature => f.write_str("quadrature"),
            PhiMode::Asymptotic => f.write_str("asymptotic"),
        }
    }
}

impl std::str::FromStr for PhiMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(PhiMode::Exact),
            "quadrature" => Ok(PhiMode::Quadrature),
            "asymptotic" => Ok(PhiMode::Asymptotic),
            other => Err(Error::InvalidInput(format!(
                "unknown phi mode {other:?} (expected exact|quadrature|asymptotic)"
            ))),
        }
    }
}

/// Evaluate φₙ(m) in the requested mode. Requires 2 <= m <= n.
pub fn phi(n: usize, m: usize, mode: PhiMode) -> Result<f64> {
    if m < 2 || m > n {
        return Err(Error::InvalidInput(format!(
            "phi requires 2 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    if m == n {
        return Ok(1.0 / n as f64);
    }
    Ok(match mode {
        PhiMode::Exact => phi_exact(n, m),
        PhiMode::Quadrature => phi_quadrature(n, m),
        PhiMode::Asymptotic => phi_asymptotic(n, m),
    })
}

fn phi_exact(n: usize, m: usize) -> f64 {
    // term_k = C(N,k) / (m+k) * (1/2) * B(k+1, N-k+1/2)
    //        = exp(lnΓ(N+1) - lnΓ(N-k+1) + lnΓ(N-k+1/2) - lnΓ(N+3/2)) / (2(m+k))
    let nn = (n - m) as f64;
    let ln_n1 = ln_gamma(nn + 1.0);
    let ln_n32 = ln_gamma(nn + 1.5);
    let mut acc = 0.0;
    for k in 0..=(n - m) {
        let j = nn - k as f64;
        let ln_term = ln_n1 - ln_gamma(j + 1.0) + ln_gamma(j + 0.5) - ln_n32
            - ((m + k) as f64).ln()
            - std::f64::consts::LN_2;
        acc += ln_term.exp();
    }
    acc
}

fn phi_quadrature(n: usize, m: usize) -> f64 {
    let rule = gauss_legendre_64();
    let mut acc = 0.0;
    for &(t, w) in rule {
        acc += w * binomial_reciprocal_mean(n, m, t);
    }
    acc
}

/// E[1/(m+Y)] for Y ~ Binomial(n-m, 1-t²), summed outward from the pmf mode
/// so huge N costs only O(√N) terms.
fn binomial_reciprocal_mean(n: usize, m: usize, t: f64) -> f64 {
    let nn = n - m;
    let q = 1.0 - t * t;
    if q <= 0.0 {
        return 1.0 / m as f64;
    }
    if q >= 1.0 {
        return 1.0 / n as f64;
    }
    let ln_q = q.ln();
    let ln_p = (1.0 - q).ln();
    let ln_choose = |k: usize| {
        ln_gamma(nn as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((nn - k) as f64 + 1.0)
    };
    let anchor = ((q * (nn as f64 + 1.0)) as usize).min(nn);
    let ln_pmf_anchor = ln_choose(anchor) + anchor as f64 * ln_q + (nn - anchor) as f64 * ln_p;
    let pmf_anchor = ln_pmf_anchor.exp();
    let cutoff = 1e-18;

    let mut acc = pmf_anchor / (m + anchor) as f64;
    let ratio_up = q / (1.0 - q);
    let mut pmf = pmf_anchor;
    for k in anchor..nn {
        pmf *= (nn - k) as f64 / (k + 1) as f64 * ratio_up;
        acc += pmf / (m + k + 1) as f64;
        if pmf < cutoff {
            break;
        }
    }
    pmf = pmf_anchor;
    for k in (1..=anchor).rev() {
        pmf *= k as f64 / (nn - k + 1) as f64 / ratio_up;
        acc += pmf / (m + k - 1) as f64;
        if pmf < cutoff {
            break;
        }
    }
    acc
}

fn phi_asymptotic(n: usize, m: usize) -> f64 {
    let c = n as f64 / (n - m) as f64;
    let rc = c.sqrt();
    rc * acoth(rc) / n as f64
}

/// coth⁻¹(x) for x > 1.
pub fn acoth(x: f64) -> f64 {
    0.5 * ((x + 1.0) / (x - 1.0)).ln()
}

/// 64-node Gauss-Legendre rule on [0, 1] as (node, weight) pairs.
pub fn gauss_legendre_64() -> &'static [(f64, f64); 64] {
    static RULE: OnceLock<[(f64, f64); 64]> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut rule = [(0.0, 0.0); 64];
        let n = 64usize;
        for i in 0..n {
            // Newton iteration from the Chebyshev-angle initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map from [-1, 1] to [0, 1].
            rule[n - 1 - i] = ((x + 1.0) / 2.0, w / 2.0);
        }
        rule
    })
}

/// Memoized φₙ values for the m arguments a run actually needs. Built once,
/// then shared read-only.
#[derive(Debug, Clone)]
pub struct PhiTable {
    n: usize,
    mode: PhiMode,
    values: BTreeMap<usize, f64>,
}

impl PhiTable {
    /// Compute φₙ(m) for every requested m and sanity-check the table:
    /// values strictly positive and non-increasing in m.
    pub fn build(n: usize, mode: PhiMode, ms: &BTreeSet<usize>) -> Result<Self> {
        let computed: Vec<(usize, f64)> = ms
            .iter()
            .copied()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|m| phi(n, m, mode).map(|v| (m, v)))
            .collect::<Result<_>>()?;
        let values: BTreeMap<usize, f64> = computed.into_iter().collect();
        let mut prev: Option<(usize, f64)> = None;
        for (&m, &v) in &values {
            if !(v > 0.0) {
                return Err(Error::Inconsistency(format!(
                    "phi_{n}({m}) = {v}: must be strictly positive"
                )));
            }
            if let Some((pm, pv)) = prev {
                if v > pv * (1.0 + 1e-12) {
                    return Err(Error::Inconsistency(format!(
                        "phi_{n} not decreasing: phi({pm}) = {pv} < phi({m}) = {v}"
                    )));
                }
            }
            prev = Some((m, v));
        }
        Ok(Self { n, mode, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> PhiMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, m: usize) -> Result<f64> {
        self.values.get(&m).copied().ok_or_else(|| {
            Error::Inconsistency(format!("phi_{}({m}) was not precomputed", self.n))
        })
    }
}
