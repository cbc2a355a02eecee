//! Second-moment certificates, Chebyshev tail bounds and Chernoff bounds,
//! all evaluated in log space.

use serde::Serialize;

use crate::counting::{count_m_flats, FamilyStats, IntersectionProfile};
use crate::error::{invalid, Error, Result};
use crate::gf::prime_power;
use crate::logspace::{ln_big, ln_binomial, log_sum_exp};

pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateParams {
    pub c: f64,
    pub c_prime: f64,
    pub rel_tol: f64,
}

impl CertificateParams {
    pub fn new(c: f64, c_prime: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid(format!("c must be positive (got {c})")));
        }
        if !(c_prime > 0.0 && c_prime < 1.0) {
            return Err(invalid(format!("c' must lie in (0, 1) (got {c_prime})")));
        }
        Ok(CertificateParams {
            c,
            c_prime,
            rel_tol: DEFAULT_REL_TOL,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub lhs_over_rhs: f64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    /// Some profile entries were upper bounds, so `holds` may understate the truth.
    pub conservative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub check: ConditionCheck,
    /// θ = c^{-1} |𝓕|^{-1/ℓ}.
    pub theta: f64,
    /// 1 - c' - c^ℓ: lower bound on Pr[X contains a family element] at `theta` when the check holds.
    pub probability_lower_bound: f64,
}

fn check_inputs(stats: &FamilyStats, profile: &IntersectionProfile) -> Result<u64> {
    if profile.entries.is_empty() {
        return Err(Error::MissingProfile("profile has no entries".into()));
    }
    if !stats.exact {
        return Err(Error::Unsupported("family size is only an upper bound".into()));
    }
    if stats.size == num_bigint::BigUint::default() {
        return Err(invalid("empty family"));
    }
    Ok(profile.ell)
}

/// Evaluates Σ_{k=1}^{ℓ-1} c^k |𝓕|^{k/ℓ} I_k against `scale`·|𝓕|².
fn condition(stats: &FamilyStats, profile: &IntersectionProfile, c: f64, scale: f64, rel_tol: f64) -> Result<ConditionCheck> {
    let ell = check_inputs(stats, profile)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid(format!("c must be positive (got {c})")));
    }
    let ln_f = stats.log_size;
    let terms: Vec<f64> = profile
        .entries
        .range(1..ell)
        .map(|(&k, e)| k as f64 * c.ln() + k as f64 / ell as f64 * ln_f + ln_big(&e.value))
        .collect();
    let conservative = (1..ell).any(|k| !profile.is_exact(k));
    let ln_lhs = log_sum_exp(&terms);
    let ln_rhs = scale.ln() + 2.0 * ln_f;
    let ratio = (ln_lhs - ln_rhs).exp();
    if ratio.is_nan() {
        return Err(Error::Numerical("condition ratio is NaN".into()));
    }
    Ok(ConditionCheck {
        holds: ratio <= 1.0 + rel_tol,
        lhs_over_rhs: ratio,
        ln_lhs,
        ln_rhs,
        conservative,
    })
}

/// Σ_{k=1}^{ℓ-1} c^k |𝓕|^{k/ℓ} I_k ≤ |𝓕|².
pub fn check_moment_condition(stats: &FamilyStats, profile: &IntersectionProfile, c: f64) -> Result<ConditionCheck> {
    condition(stats, profile, c, 1.0, DEFAULT_REL_TOL)
}

/// Σ_{k=1}^{ℓ-1} c^k |𝓕|^{k/ℓ} I_k ≤ c' |𝓕|², with the probability it guarantees.
pub fn check_certificate(stats: &FamilyStats, profile: &IntersectionProfile, params: &CertificateParams) -> Result<Certificate> {
    let check = condition(stats, profile, params.c, params.c_prime, params.rel_tol)?;
    let ell = profile.ell as f64;
    let theta = (-params.c.ln() - stats.log_size / ell).exp();
    Ok(Certificate {
        check,
        theta,
        probability_lower_bound: 1.0 - params.c_prime - params.c.powf(ell),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBound {
    pub expectation: f64,
    pub ln_expectation: f64,
    pub second_moment: f64,
    pub ln_second_moment: f64,
    /// min(1, Var[Y] / E[Y]²), an upper bound on Pr[Y = 0].
    pub chebyshev_bound: f64,
    /// ln(Var[Y] / E[Y]²).
    pub ln_variance_ratio: f64,
    pub conservative: bool,
}

/// Chebyshev bound on Pr[X contains no family element] for X of density θ.
///
/// Var[Y]/E[Y]² = Σ_{k≥1} (θ^{-k} - 1) I_k / |𝓕|², which stays free of
/// cancellation and remains an upper bound when some I_k are upper bounds.
pub fn second_moment_tail(stats: &FamilyStats, profile: &IntersectionProfile, theta: f64) -> Result<TailBound> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidTheta(theta));
    }
    let ell = check_inputs(stats, profile)?;
    let conservative = !profile.all_exact();
    let ln_f = stats.log_size;
    if theta == 0.0 {
        return Ok(TailBound {
            expectation: 0.0,
            ln_expectation: f64::NEG_INFINITY,
            second_moment: 0.0,
            ln_second_moment: f64::NEG_INFINITY,
            chebyshev_bound: 1.0,
            ln_variance_ratio: f64::INFINITY,
            conservative,
        });
    }
    let ln_theta = theta.ln();
    let ln_ey = ell as f64 * ln_theta + ln_f;
    let terms: Vec<f64> = profile
        .entries
        .iter()
        .filter(|(&k, e)| k >= 1 && k <= ell && e.value.bits() > 0)
        .map(|(&k, e)| {
            let growth = (-(k as f64) * ln_theta).exp_m1();
            growth.ln() + ln_big(&e.value) - 2.0 * ln_f
        })
        .collect();
    let ln_r = log_sum_exp(&terms);
    let ln_ey2 = 2.0 * ln_ey + log_sum_exp(&[0.0, ln_r]);
    let bound = ln_r.exp().min(1.0);
    if bound.is_nan() || ln_ey2.is_nan() {
        return Err(Error::Numerical("second-moment evaluation produced NaN".into()));
    }
    Ok(TailBound {
        expectation: ln_ey.exp(),
        ln_expectation: ln_ey,
        second_moment: ln_ey2.exp(),
        ln_second_moment: ln_ey2,
        chebyshev_bound: bound,
        ln_variance_ratio: ln_r,
        conservative,
    })
}

fn check_binomial_args(p: f64, n: u64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p must lie in [0, 1] (got {p})")));
    }
    if n < 1 {
        return Err(invalid("N must be at least 1"));
    }
    Ok(())
}

/// exp(-ε² pN / 2), bounding Pr[X < (1-ε)pN] for a sum of N Bernoulli(p).
pub fn chernoff_lower(eps: f64, p: f64, n: u64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1) (got {eps})")));
    }
    check_binomial_args(p, n)?;
    Ok((-eps * eps * p * n as f64 / 2.0).exp())
}

/// exp(-ε² pN / (2 + ε)), bounding Pr[X > (1+ε)pN].
pub fn chernoff_upper(eps: f64, p: f64, n: u64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("epsilon must be positive (got {eps})")));
    }
    check_binomial_args(p, n)?;
    Ok((-eps * eps * p * n as f64 / (2.0 + eps)).exp())
}

/// exp((ε - (1+ε) ln(1+ε)) pN), the unsimplified form of [`chernoff_upper`].
pub fn chernoff_upper_tight(eps: f64, p: f64, n: u64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("epsilon must be positive (got {eps})")));
    }
    check_binomial_args(p, n)?;
    Ok(((eps - (1.0 + eps) * eps.ln_1p()) * p * n as f64).exp())
}

/// ln Pr[Bin(n, p) = k].
pub fn ln_binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let a = if k == 0 { 0.0 } else { k as f64 * p.ln() };
    let b = if k == n { 0.0 } else { (n - k) as f64 * (-p).ln_1p() };
    ln_binomial(n, k) + a + b
}

/// Pr[Bin(n, p) >= k].
pub fn binomial_upper_tail(n: u64, p: f64, k: u64) -> f64 {
    let terms: Vec<f64> = (k..=n).map(|j| ln_binomial_pmf(n, p, j)).collect();
    log_sum_exp(&terms).exp().min(1.0)
}

/// Pr[Bin(n, p) <= k].
pub fn binomial_lower_tail(n: u64, p: f64, k: u64) -> f64 {
    let terms: Vec<f64> = (0..=k.min(n)).map(|j| ln_binomial_pmf(n, p, j)).collect();
    log_sum_exp(&terms).exp().min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpBounds {
    /// Density ℓ q^{-m} / (1+ε) at which `below` applies.
    pub theta_below: f64,
    /// Union bound on Pr[some m-flat is ℓ-rich] at `theta_below`, before clamping.
    pub below_raw: f64,
    pub below: f64,
    /// Density ℓ q^{-m} / (1-ε) at which `above` applies.
    pub theta_above: f64,
    /// Bound on Pr[no m-flat is ℓ-rich] at `theta_above`, via a single flat.
    pub above: f64,
}

/// Bounds on either side of the sharp threshold ℓ q^{-m}, with the exact
/// flat count standing in for the polynomial factor of the union bound.
pub fn sharp_threshold_bounds(q: u64, n: u64, m: u64, ell: u64, eps: f64) -> Result<SharpBounds> {
    if prime_power(q).is_none() {
        return Err(Error::NotPrimePower(q));
    }
    if m < 1 || m >= n {
        return Err(invalid(format!("need 1 <= m < n (got m={m}, n={n})")));
    }
    let qm = q.checked_pow(m as u32).unwrap_or(u64::MAX);
    if ell < 1 || ell > qm {
        return Err(invalid(format!("need 1 <= ell <= q^m = {qm} (got {ell})")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1) (got {eps})")));
    }
    let l = ell as f64;
    let ln_count = ln_big(&count_m_flats(q, n, m)?);
    let below_raw = (ln_count - eps * eps * l / ((2.0 + eps) * (1.0 + eps))).exp();
    let base = l * (-(m as f64) * (q as f64).ln()).exp();
    Ok(SharpBounds {
        theta_below: base / (1.0 + eps),
        below_raw,
        below: below_raw.min(1.0),
        theta_above: (base / (1.0 - eps)).min(1.0),
        above: (-eps * eps * l / (2.0 * (1.0 - eps))).exp(),
    })
}
