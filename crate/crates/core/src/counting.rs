//! Exact counts of flats and families, intersection profiles, and the
//! predicted threshold of each event.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::events::EventKind;
use crate::gf::prime_power;
use crate::logspace::{binomial, ln_big, ln_binomial};

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn big_pow(q: u64, e: u64) -> BigUint {
    big(q).pow(e as u32)
}

/// The q-binomial coefficient: the number of m-dimensional subspaces of F_q^n.
pub fn gaussian_binomial(n: u64, m: u64, q: u64) -> Result<BigUint> {
    if q < 2 {
        return Err(invalid(format!("q must be at least 2 (got {q})")));
    }
    if m > n {
        return Err(invalid(format!("need 0 <= m <= n (got m={m}, n={n})")));
    }
    let qn = big_pow(q, n);
    let qm = big_pow(q, m);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    let mut qi = BigUint::one();
    for _ in 0..m {
        num *= &qn - &qi;
        den *= &qm - &qi;
        qi *= q;
    }
    Ok(num / den)
}

/// Number of affine m-flats of F_q^n: q^{n-m} times the q-binomial.
pub fn count_m_flats(q: u64, n: u64, m: u64) -> Result<BigUint> {
    Ok(big_pow(q, n.checked_sub(m).ok_or_else(|| {
        invalid(format!("need 0 <= m <= n (got m={m}, n={n})"))
    })?) * gaussian_binomial(n, m, q)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    /// ℓ-subsets of a line.
    RichLine { ell: u64 },
    /// ℓ-subsets of an m-flat.
    RichMFlat { m: u64, ell: u64 },
    /// Point sets of m-flats.
    ContainedMFlat { m: u64 },
    /// Incident (point, m-flat) pairs.
    IncidencePairs { m: u64 },
}

/// A family of subsets of F_q^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub q: u64,
    pub n: u64,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, q: u64, n: u64) -> Result<Self> {
        if prime_power(q).is_none() {
            return Err(Error::NotPrimePower(q));
        }
        let m = match kind {
            FamilyKind::RichLine { .. } => 1,
            FamilyKind::RichMFlat { m, .. }
            | FamilyKind::ContainedMFlat { m }
            | FamilyKind::IncidencePairs { m } => m,
        };
        if m < 1 || m >= n {
            return Err(invalid(format!("need 1 <= m < n (got m={m}, n={n})")));
        }
        let ell = match kind {
            FamilyKind::RichLine { ell } | FamilyKind::RichMFlat { ell, .. } => Some(ell),
            _ => None,
        };
        if let Some(ell) = ell {
            let cap = q.checked_pow(m as u32);
            if ell < 2 || cap.is_some_and(|c| ell > c) {
                return Err(invalid(format!("need 2 <= ell <= q^m (got ell={ell})")));
            }
        }
        Ok(FamilySpec { kind, q, n })
    }

    pub fn m(&self) -> u64 {
        match self.kind {
            FamilyKind::RichLine { .. } => 1,
            FamilyKind::RichMFlat { m, .. }
            | FamilyKind::ContainedMFlat { m }
            | FamilyKind::IncidencePairs { m } => m,
        }
    }

    /// Size of each family element; 2 for incidence pairs (point and flat components).
    pub fn element_size(&self) -> u64 {
        match self.kind {
            FamilyKind::RichLine { ell } | FamilyKind::RichMFlat { ell, .. } => ell,
            FamilyKind::ContainedMFlat { m } => self.q.pow(m as u32),
            FamilyKind::IncidencePairs { .. } => 2,
        }
    }

    /// Rich m-flats with m = 1 are treated as rich lines.
    fn normalized(&self) -> FamilySpec {
        match self.kind {
            FamilyKind::RichMFlat { m: 1, ell } => FamilySpec {
                kind: FamilyKind::RichLine { ell },
                ..*self
            },
            _ => *self,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyStats {
    #[serde(serialize_with = "ser_big")]
    pub size: BigUint,
    pub log_size: f64,
    /// False when `size` is only an upper bound on |𝓕|.
    pub exact: bool,
    /// ln of the leading-order asymptotic size, where that is what the theory provides.
    pub leading_order_log: Option<f64>,
}

impl FamilyStats {
    fn exact(size: BigUint) -> Self {
        FamilyStats {
            log_size: ln_big(&size),
            size,
            exact: true,
            leading_order_log: None,
        }
    }
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

/// Number of lines through a point of F_q^n.
fn lines_through_point(q: u64, n: u64) -> BigUint {
    (big_pow(q, n) - 1u32) / (q - 1)
}

pub fn family_size(spec: &FamilySpec) -> Result<FamilyStats> {
    let spec = spec.normalized();
    let (q, n) = (spec.q, spec.n);
    match spec.kind {
        FamilyKind::RichLine { ell } => Ok(FamilyStats::exact(
            big_pow(q, n - 1) * lines_through_point(q, n) * binomial(q, ell),
        )),
        FamilyKind::RichMFlat { m, ell } => {
            let qm = q
                .checked_pow(m as u32)
                .ok_or_else(|| Error::TooLarge("q^m overflows".into()))?;
            let size = count_m_flats(q, n, m)? * binomial(qm, ell);
            let lead = ((n - m) * (m + 1) + m * ell) as f64 * (q as f64).ln();
            Ok(FamilyStats {
                log_size: ln_big(&size),
                size,
                exact: false,
                leading_order_log: Some(lead),
            })
        }
        FamilyKind::ContainedMFlat { m } => Ok(FamilyStats::exact(count_m_flats(q, n, m)?)),
        FamilyKind::IncidencePairs { m } => Ok(FamilyStats::exact(
            count_m_flats(q, n, m)? * big_pow(q, m),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileEntry {
    #[serde(serialize_with = "ser_big")]
    pub value: BigUint,
    /// False when `value` is an upper bound.
    pub exact: bool,
}

/// I_k = number of ordered pairs (S, T) of family members with |S ∩ T| = k.
/// Keys absent from `entries` with k in [0, ell] are exact zeros.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionProfile {
    pub ell: u64,
    pub entries: BTreeMap<u64, ProfileEntry>,
}

impl IntersectionProfile {
    pub fn new(ell: u64) -> Self {
        IntersectionProfile {
            ell,
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, k: u64, value: BigUint, exact: bool) {
        self.entries.insert(k, ProfileEntry { value, exact });
    }

    pub fn value(&self, k: u64) -> BigUint {
        self.entries
            .get(&k)
            .map(|e| e.value.clone())
            .unwrap_or_default()
    }

    pub fn is_exact(&self, k: u64) -> bool {
        self.entries.get(&k).is_none_or(|e| e.exact)
    }

    pub fn all_exact(&self) -> bool {
        self.entries.values().all(|e| e.exact)
    }

    pub fn total(&self) -> BigUint {
        self.entries.values().map(|e| &e.value).sum()
    }

    /// The same profile with zero entries dropped.
    pub fn sparse(&self) -> IntersectionProfile {
        IntersectionProfile {
            ell: self.ell,
            entries: self
                .entries
                .iter()
                .filter(|(_, e)| !e.value.is_zero() || !e.exact)
                .map(|(&k, e)| (k, e.clone()))
                .collect(),
        }
    }
}

/// Upper bound 4^3 · q^{(n-d)(d+1) + 2(n-m)(m-d)} on the number of ordered
/// pairs of m-flats meeting in a d-flat.
pub fn contained_flat_pair_bound(q: u64, n: u64, m: u64, d: u64) -> Result<BigUint> {
    if d >= m || m >= n {
        return Err(invalid(format!("need d < m < n (got d={d}, m={m}, n={n})")));
    }
    Ok(big(64) * big_pow(q, (n - d) * (d + 1) + 2 * (n - m) * (m - d)))
}

fn rich_line_profile(q: u64, n: u64, ell: u64, size: &BigUint) -> IntersectionProfile {
    let mut profile = IntersectionProfile::new(ell);
    profile.set(ell, size.clone(), true);
    let mut diag = size.clone();
    for k in 2..ell {
        let v = size * binomial(ell, k) * binomial(q - ell, ell - k);
        diag += &v;
        profile.set(k, v, true);
    }
    let cross = (lines_through_point(q, n) - 1u32) * binomial(q - 1, ell - 1);
    let same = binomial(q - ell, ell - 1);
    let i1 = size * ell * (cross + same);
    diag += &i1;
    profile.set(1, i1, true);
    profile.set(0, size * size - diag, true);
    profile
}

pub fn intersection_profile(spec: &FamilySpec) -> Result<IntersectionProfile> {
    let spec = spec.normalized();
    let (q, n) = (spec.q, spec.n);
    let size = family_size(&spec)?.size;
    match spec.kind {
        FamilyKind::RichLine { ell } => Ok(rich_line_profile(q, n, ell, &size)),
        FamilyKind::ContainedMFlat { m: 1 } => Ok(rich_line_profile(q, n, q, &size)),
        FamilyKind::ContainedMFlat { m } => {
            let ell = q.pow(m as u32);
            let mut profile = IntersectionProfile::new(ell);
            for d in 0..m {
                profile.set(q.pow(d as u32), contained_flat_pair_bound(q, n, m, d)?, false);
            }
            profile.set(ell, size.clone(), true);
            profile.set(0, &size * &size - &size, false);
            Ok(profile)
        }
        FamilyKind::IncidencePairs { m } => {
            let through = gaussian_binomial(n, m, q)?;
            let flats = count_m_flats(q, n, m)?;
            let qm = big_pow(q, m);
            let shared_point = big_pow(q, n) * &through * (&through - 1u32);
            let shared_flat = flats * &qm * (&qm - 1u32);
            let i1 = shared_point + shared_flat;
            let mut profile = IntersectionProfile::new(2);
            profile.set(2, size.clone(), true);
            profile.set(0, &size * &size - &size - &i1, true);
            profile.set(1, i1, true);
            Ok(profile)
        }
        FamilyKind::RichMFlat { .. } => Err(Error::Unsupported(
            "no closed-form intersection profile for rich m-flats with m >= 2; use the oracle"
                .into(),
        )),
    }
}

/// Which closed-form threshold a prediction uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdFormula {
    /// (q^{2n-2} C(q, ℓ))^{-1/ℓ}
    RichLine,
    /// ℓ q^{-m}
    SharpRich,
    /// q^{-((n-m)(m+1)+mℓ)/ℓ}
    RichFlat,
    /// q^{-n(m+1)q^{-m}}
    ContainedFlat,
    /// n q^{-m} ln q
    Blocking,
    /// q^{-((n-m)(m+1)+m)/2} for m ∈ {1, n-1}, else q^{-n}
    Incidence,
}

impl ThresholdFormula {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdFormula::RichLine => "rich-line",
            ThresholdFormula::SharpRich => "sharp",
            ThresholdFormula::RichFlat => "rich-flat",
            ThresholdFormula::ContainedFlat => "contained",
            ThresholdFormula::Blocking => "blocking",
            ThresholdFormula::Incidence => "incidence",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "rich-line" => ThresholdFormula::RichLine,
            "sharp" => ThresholdFormula::SharpRich,
            "rich-flat" => ThresholdFormula::RichFlat,
            "contained" => ThresholdFormula::ContainedFlat,
            "blocking" => ThresholdFormula::Blocking,
            "incidence" => ThresholdFormula::Incidence,
            other => return Err(invalid(format!("unknown threshold formula '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub formula: ThresholdFormula,
    /// Clamped to (0, 1].
    pub value: f64,
    pub ln_value: f64,
    /// |𝓕|^{-1/ℓ} from the exact family size, where one is available.
    pub companion: Option<f64>,
    /// Hypotheses of the formula that these parameters violate.
    pub warnings: Vec<String>,
}

/// The formula used when none is requested: rich lines and rich flats switch to
/// the sharp ℓ q^{-m} form once ℓ exceeds 2(n-m)m ln q.
pub fn default_formula(event: &EventKind, q: u64, n: u64) -> Result<ThresholdFormula> {
    let sharp = |m: u64, ell: u64| ell as f64 > 2.0 * ((n - m) * m) as f64 * (q as f64).ln();
    Ok(match *event {
        EventKind::RichLine { ell } => {
            if sharp(1, ell) {
                ThresholdFormula::SharpRich
            } else {
                ThresholdFormula::RichLine
            }
        }
        EventKind::RichMFlat { m, ell } => {
            if m >= n {
                return Err(invalid(format!("need m < n (got m={m}, n={n})")));
            }
            if sharp(m, ell) {
                ThresholdFormula::SharpRich
            } else if m == 1 {
                ThresholdFormula::RichLine
            } else {
                ThresholdFormula::RichFlat
            }
        }
        EventKind::RichMFlatGeneralPosition { .. } => ThresholdFormula::RichFlat,
        EventKind::ContainedMFlat { .. } => ThresholdFormula::ContainedFlat,
        EventKind::BlockingSet { .. } => ThresholdFormula::Blocking,
        EventKind::Incidence { .. } => ThresholdFormula::Incidence,
        EventKind::UniformCollapse { .. } => {
            return Err(Error::Unsupported(
                "the uniform-collapse event has no θ threshold".into(),
            ))
        }
    })
}

pub fn predicted_threshold(event: &EventKind, q: u64, n: u64) -> Result<Threshold> {
    threshold_with_formula(event, q, n, default_formula(event, q, n)?)
}

pub fn threshold_with_formula(
    event: &EventKind,
    q: u64,
    n: u64,
    formula: ThresholdFormula,
) -> Result<Threshold> {
    event.validate(q, n)?;
    let m = event.m();
    let ln_q = (q as f64).ln();
    let qm = q.checked_pow(m as u32);
    let ell = match *event {
        EventKind::RichLine { ell }
        | EventKind::RichMFlat { ell, .. }
        | EventKind::RichMFlatGeneralPosition { ell, .. } => Some(ell),
        _ => None,
    };
    let need_ell = || ell.ok_or_else(|| invalid(format!("formula {} needs ell", formula.name())));
    let mut warnings = Vec::new();
    let mut companion = None;

    let ln_value = match formula {
        ThresholdFormula::RichLine => {
            let ell = need_ell()?;
            if m != 1 {
                warnings.push("rich-line formula applied to m != 1".into());
            }
            if n < 2 || ell < 3 || ell > q {
                warnings.push(format!("rich-line formula assumes n >= 2 and 3 <= ell <= q (ell={ell})"));
            }
            if ell as f64 > 2.0 * n as f64 * ln_q {
                warnings.push("ell is large compared with n ln q".into());
            }
            if m == 1 && ell <= q {
                let size = family_size(&FamilySpec::new(FamilyKind::RichLine { ell }, q, n)?)?;
                companion = Some((-size.log_size / ell as f64).exp().min(1.0));
            }
            -((2 * n - 2) as f64 * ln_q + ln_binomial(q, ell)) / ell as f64
        }
        ThresholdFormula::SharpRich => {
            let ell = need_ell()?;
            if (ell as f64) <= ((n - m) * m) as f64 * ln_q {
                warnings.push("sharp threshold assumes ell = ω((n-m) m log q)".into());
            }
            (ell as f64).ln() - m as f64 * ln_q
        }
        ThresholdFormula::RichFlat => {
            let ell = need_ell()?;
            if n < 3 {
                warnings.push("rich-flat formula assumes n >= 3".into());
            }
            -(((n - m) * (m + 1) + m * ell) as f64) * ln_q / ell as f64
        }
        ThresholdFormula::ContainedFlat => {
            if 2 * m >= n {
                warnings.push("contained-flat formula assumes 2m < n".into());
            }
            if let Some(qm) = qm {
                let size = count_m_flats(q, n, m)?;
                companion = Some((-ln_big(&size) / qm as f64).exp().min(1.0));
            }
            -((n * (m + 1)) as f64) * ln_q * (-(m as f64) * ln_q).exp()
        }
        ThresholdFormula::Blocking => {
            if 2 * m >= n {
                warnings.push("blocking-set formula assumes m < n/2".into());
            }
            if let Some(qm) = qm {
                if n as f64 >= qm as f64 / ln_q {
                    warnings.push("blocking-set formula assumes n = o(q^m / log q)".into());
                }
            }
            (n as f64).ln() - m as f64 * ln_q + ln_q.ln()
        }
        ThresholdFormula::Incidence => {
            let size = count_m_flats(q, n, m)? * big_pow(q, m);
            companion = Some((-ln_big(&size) / 2.0).exp().min(1.0));
            if m == 1 || m == n - 1 {
                -0.5 * ((n - m) * (m + 1) + m) as f64 * ln_q
            } else {
                -(n as f64) * ln_q
            }
        }
    };
    if !ln_value.is_finite() {
        return Err(Error::Numerical(format!("threshold log is {ln_value}")));
    }
    let ln_value = ln_value.min(0.0);
    Ok(Threshold {
        formula,
        value: ln_value.exp(),
        ln_value,
        companion,
        warnings,
    })
}
