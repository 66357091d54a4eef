//! Error bounds for compound Poisson (and Poisson) approximation of sums of
//! independent and of locally dependent non-negative integer variables.
//!
//! Every bound is split into a "c term" and a "smooth term", the latter being
//! proportional to the smoothness norm `sum |Δ²f|` of the approximating law.
//! The norm is always an explicit argument: how it was obtained (closed form,
//! numeric on a truncated pmf, crude bound) is the caller's choice and is
//! carried through to the report.
//!
//! Indices are 0-based. Windowed sums that reach below index 0 simply lose
//! those terms, as if the sequence were preceded by zeros.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{mixture, stable_sum, CompoundSpec, IntPmf};
use crate::smoothness::{
    normal_heuristic_delta2, numeric_delta2_l1, poisson_delta2_l1_crude, poisson_delta2_l1_exact,
    SmoothnessMethod,
};

/// A value of `sum_k |Δ²f(k)|` together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norm {
    pub value: f64,
    pub method: SmoothnessMethod,
}

impl Norm {
    pub fn supplied(value: f64) -> Result<Self> {
        Self::with_method(value, SmoothnessMethod::Supplied)
    }

    pub fn with_method(value: f64, method: SmoothnessMethod) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "norm",
                value,
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self { value, method })
    }

    pub fn exact_poisson(lambda: f64) -> Result<Self> {
        Self::with_method(
            poisson_delta2_l1_exact(lambda)?,
            SmoothnessMethod::ExactPoisson,
        )
    }

    pub fn crude_poisson(lambda: f64) -> Result<Self> {
        Self::with_method(poisson_delta2_l1_crude(lambda)?, SmoothnessMethod::Crude)
    }

    /// Numeric norm of a truncated pmf. The lost tail mass can change the
    /// norm by at most four times the deficit, which is added to stay on the
    /// safe side.
    pub fn numeric(a: &IntPmf) -> Self {
        Self {
            value: numeric_delta2_l1(a) + 4.0 * a.deficit(),
            method: SmoothnessMethod::Numeric,
        }
    }

    pub fn normal_heuristic(lambda: f64, second_raw_severity: f64) -> Result<Self> {
        Self::with_method(
            normal_heuristic_delta2(lambda, second_raw_severity)?,
            SmoothnessMethod::NormalHeuristic,
        )
    }
}

/// A bound decomposed into its two components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(with = "crate::float_serde")]
    pub total: f64,
    #[serde(with = "crate::float_serde")]
    pub c_term: f64,
    #[serde(with = "crate::float_serde")]
    pub smooth_term: f64,
    pub norm_used: f64,
    pub norm_method: SmoothnessMethod,
    /// Poisson rate of the approximating law.
    pub lambda: f64,
    /// False when a hypothesis of the bound fails; the value is then only
    /// the formula evaluated, not a bound.
    pub valid: bool,
    pub notes: Vec<String>,
    /// Finer breakdown for assembled bounds.
    #[serde(
        default,
        skip_serializing_if = "BTreeMap::is_empty",
        with = "crate::float_serde::map"
    )]
    pub components: BTreeMap<String, f64>,
}

impl BoundReport {
    pub(crate) fn new(c_term: f64, smooth_term: f64, norm: Norm, lambda: f64) -> Self {
        let mut notes = Vec::new();
        if norm.method == SmoothnessMethod::NormalHeuristic {
            notes.push(
                "norm comes from the normal heuristic; the result is not a certified bound"
                    .to_string(),
            );
        }
        Self {
            total: c_term + smooth_term,
            c_term,
            smooth_term,
            norm_used: norm.value,
            norm_method: norm.method,
            lambda,
            valid: true,
            notes,
            components: BTreeMap::new(),
        }
    }

    pub(crate) fn invalidate(&mut self, note: String) {
        self.valid = false;
        self.notes.push(note);
    }
}

/// `1 / (1 - 2(1 - e^-x))`, infinite once `x >= ln 2`.
pub(crate) fn shift_factor(x: f64) -> f64 {
    let d = 2.0 * (-x).exp() - 1.0;
    if d > 0.0 {
        1.0 / d
    } else {
        f64::INFINITY
    }
}

/// `a * b` with `0 * inf = 0`: an empty sum stays empty even when the
/// hypothesis fails.
pub(crate) fn scaled(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

fn check_prob(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: p,
            reason: "must be a probability",
        })
    }
}

/// Independent Bernoulli summands with `P(X_i = 1) = p_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BernoulliProfileRepr")]
pub struct BernoulliProfile {
    ps: Vec<f64>,
}

#[derive(Deserialize)]
struct BernoulliProfileRepr {
    ps: Vec<f64>,
}

impl TryFrom<BernoulliProfileRepr> for BernoulliProfile {
    type Error = Error;
    fn try_from(r: BernoulliProfileRepr) -> Result<Self> {
        Self::new(r.ps)
    }
}

impl BernoulliProfile {
    pub fn new(ps: Vec<f64>) -> Result<Self> {
        for &p in &ps {
            check_prob("p", p)?;
        }
        Ok(Self { ps })
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }

    pub fn lambda(&self) -> f64 {
        stable_sum(self.ps.iter().copied())
    }
}

/// Independent summands given by `p_i = P(X_i != 0)` and the conditional laws
/// `G_i` of `X_i` given `X_i != 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IndepProfileRepr")]
pub struct IndepProfile {
    ps: Vec<f64>,
    sq_means: Vec<f64>,
    severities: Vec<IntPmf>,
}

/// `sq_means` may be left out of the JSON form and is then derived.
#[derive(Deserialize)]
struct IndepProfileRepr {
    ps: Vec<f64>,
    #[serde(default)]
    sq_means: Option<Vec<f64>>,
    severities: Vec<IntPmf>,
}

impl TryFrom<IndepProfileRepr> for IndepProfile {
    type Error = Error;
    fn try_from(r: IndepProfileRepr) -> Result<Self> {
        match r.sq_means {
            Some(sq) => Self::new(r.ps, sq, r.severities),
            None => Self::from_severities(r.ps, r.severities),
        }
    }
}

impl IndepProfile {
    pub fn new(ps: Vec<f64>, sq_means: Vec<f64>, severities: Vec<IntPmf>) -> Result<Self> {
        let n = ps.len();
        if sq_means.len() != n {
            return Err(Error::LengthMismatch {
                what: "sq_means",
                got: sq_means.len(),
                expected: n,
            });
        }
        if severities.len() != n {
            return Err(Error::LengthMismatch {
                what: "severities",
                got: severities.len(),
                expected: n,
            });
        }
        for i in 0..n {
            check_prob("p", ps[i])?;
            if severities[i].offset() < 1 {
                return Err(Error::InvalidPmf(format!(
                    "severity {i} charges values below 1"
                )));
            }
            let expected = (ps[i] * severities[i].mean()).powi(2);
            if !(sq_means[i] >= 0.0) || (sq_means[i] - expected).abs() > 1e-9 {
                return Err(Error::InvalidParameter {
                    name: "sq_means",
                    value: sq_means[i],
                    reason: "must equal (p_i * mean(G_i))^2",
                });
            }
        }
        Ok(Self {
            ps,
            sq_means,
            severities,
        })
    }

    /// Fills in `sq_means` from `p_i` and `G_i`.
    pub fn from_severities(ps: Vec<f64>, severities: Vec<IntPmf>) -> Result<Self> {
        let sq_means = ps
            .iter()
            .zip(&severities)
            .map(|(p, g)| (p * g.mean()).powi(2))
            .collect();
        Self::new(ps, sq_means, severities)
    }

    pub fn bernoulli(ps: Vec<f64>) -> Result<Self> {
        let severities = vec![IntPmf::point_mass(1); ps.len()];
        Self::from_severities(ps, severities)
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }

    pub fn sq_means(&self) -> &[f64] {
        &self.sq_means
    }

    pub fn severities(&self) -> &[IntPmf] {
        &self.severities
    }

    pub fn lambda(&self) -> f64 {
        stable_sum(self.ps.iter().copied())
    }

    /// The approximating compound Poisson law: rate `sum p_i` and
    /// compounding law the mixture of the `G_i` with weights `p_i / λ`.
    pub fn target(&self) -> Result<CompoundSpec> {
        let lambda = self.lambda();
        if !(lambda > 0.0) {
            return Err(Error::Unsupported(
                "all p_i are zero; there is no target law",
            ));
        }
        let weights: Vec<f64> = self.ps.iter().map(|p| p / lambda).collect();
        CompoundSpec::new(lambda, mixture(&weights, &self.severities)?)
    }
}

/// Symmetric table of pair moments keyed by unordered index pairs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<PairEntry>", into = "Vec<PairEntry>")]
pub struct PairTable(BTreeMap<(usize, usize), f64>);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

impl From<Vec<PairEntry>> for PairTable {
    fn from(v: Vec<PairEntry>) -> Self {
        let mut t = PairTable::default();
        for e in v {
            t.insert(e.i, e.j, e.value);
        }
        t
    }
}

impl From<PairTable> for Vec<PairEntry> {
    fn from(t: PairTable) -> Self {
        t.0.into_iter()
            .map(|((i, j), value)| PairEntry { i, j, value })
            .collect()
    }
}

impl PairTable {
    fn key(i: usize, j: usize) -> (usize, usize) {
        (i.max(j), i.min(j))
    }

    pub fn insert(&mut self, i: usize, j: usize, value: f64) {
        self.0.insert(Self::key(i, j), value);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.0.get(&Self::key(i, j)).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.0.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    fn lookup(&self, table: &'static str, i: usize, j: usize) -> Result<f64> {
        self.get(i, j).ok_or(Error::MissingPair { table, i, j })
    }
}

/// A sequence where each `X_i` depends only on `Z_i, ..., Z_{i+k-1}` for
/// independent `Z`, described by its first and second moments.
///
/// Pair tables need the pairs with `0 < i - j < k`; anything else is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDepProfile {
    pub k: usize,
    pub ps: Vec<f64>,
    pub means: Vec<f64>,
    pub sq_means: Vec<f64>,
    /// `E(X_i X_j)`.
    pub cross_moments: PairTable,
    /// `P(X_i != 0, X_j != 0)`.
    pub joint_nonzero: PairTable,
    #[serde(default)]
    pub covariances: PairTable,
    pub severities: Vec<IntPmf>,
}

impl LocalDepProfile {
    pub fn len(&self) -> usize {
        self.ps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ps.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ps.len();
        if self.k == 0 {
            return Err(Error::InvalidParameter {
                name: "k",
                value: 0.0,
                reason: "dependence range must be at least 1",
            });
        }
        for (what, got) in [
            ("means", self.means.len()),
            ("sq_means", self.sq_means.len()),
            ("severities", self.severities.len()),
        ] {
            if got != n {
                return Err(Error::LengthMismatch {
                    what,
                    got,
                    expected: n,
                });
            }
        }
        for i in 0..n {
            check_prob("p", self.ps[i])?;
            if !(self.means[i] >= 0.0) || !self.means[i].is_finite() {
                return Err(Error::InvalidParameter {
                    name: "means",
                    value: self.means[i],
                    reason: "must be finite and non-negative",
                });
            }
            let sq = self.means[i] * self.means[i];
            if (self.sq_means[i] - sq).abs() > 1e-9 * sq.max(1.0) {
                return Err(Error::InvalidParameter {
                    name: "sq_means",
                    value: self.sq_means[i],
                    reason: "must equal the squared mean",
                });
            }
            if self.severities[i].offset() < 1 {
                return Err(Error::InvalidPmf(format!(
                    "severity {i} charges values below 1"
                )));
            }
        }
        for (i, j, v) in self.joint_nonzero.iter() {
            if i < n && j < n && (v < 0.0 || v > self.ps[i].min(self.ps[j]) + 1e-12) {
                return Err(Error::InvalidParameter {
                    name: "joint_nonzero",
                    value: v,
                    reason: "must lie in [0, min(p_i, p_j)]",
                });
            }
        }
        for (_, _, v) in self.cross_moments.iter() {
            if !(v >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "cross_moments",
                    value: v,
                    reason: "must be non-negative",
                });
            }
        }
        Ok(())
    }
}

/// Indices `max(lo, 0) ..= hi`, empty when the window lies below 0.
fn window(lo: i64, hi: i64) -> std::ops::Range<usize> {
    if hi < 0 || hi < lo {
        return 0..0;
    }
    (lo.max(0) as usize)..(hi as usize + 1)
}

fn window_sum(ps: &[f64], lo: i64, hi: i64) -> f64 {
    stable_sum(window(lo, hi).map(|j| ps[j]))
}

/// `m = max_i sum_{j=i-3k+3}^{i} p_j`, the quantity that must stay below
/// `ln 2` for the local-dependence bounds.
pub fn local_max_mass(ps: &[f64], k: usize) -> f64 {
    let span = 3 * k as i64 - 3;
    (0..ps.len() as i64)
        .map(|i| window_sum(ps, i - span, i))
        .fold(0.0, f64::max)
}

fn gate_independent(report: &mut BoundReport, ps: &[f64]) {
    if let Some((i, &p)) = ps.iter().enumerate().find(|(_, &p)| p >= LN_2) {
        report.invalidate(format!("p_{i} = {p} is not below ln 2"));
    }
}

fn gate_local(report: &mut BoundReport, m: f64) {
    report.components.insert("m".to_string(), m);
    if m >= LN_2 {
        report.invalidate(format!("m = {m} is not below ln 2"));
    }
}

/// Compound Poisson bound for independent summands:
/// `(sum p_i²)² + norm/4 · sum (E X_i)² / (1 - 2(1 - e^-p_i))`,
/// where `norm` belongs to the law returned by [`IndepProfile::target`].
pub fn ub_cp_independent(profile: &IndepProfile, norm: Norm) -> BoundReport {
    let ps = profile.ps();
    let c_term = stable_sum(ps.iter().map(|p| p * p)).powi(2);
    let weighted = stable_sum(
        ps.iter()
            .zip(profile.sq_means())
            .map(|(&p, &s)| scaled(s, shift_factor(p))),
    );
    let smooth_term = scaled(0.25 * norm.value, weighted);
    let mut r = BoundReport::new(c_term, smooth_term, norm, profile.lambda());
    gate_independent(&mut r, ps);
    r
}

/// Poisson bound for independent Bernoulli summands: the compound bound with
/// every `G_i` a point mass at 1. `norm` should be the Poisson norm at
/// `λ = sum p_i`.
pub fn ub_po_bernoulli(profile: &BernoulliProfile, norm: Norm) -> BoundReport {
    let ps = profile.ps();
    let c_term = stable_sum(ps.iter().map(|p| p * p)).powi(2);
    let weighted = stable_sum(ps.iter().map(|&p| scaled(p * p, shift_factor(p))));
    let smooth_term = scaled(0.25 * norm.value, weighted);
    let mut r = BoundReport::new(c_term, smooth_term, norm, profile.lambda());
    gate_independent(&mut r, ps);
    r
}

/// Poisson bound for `n` i.i.d. Bernoulli(`p`) summands with the sharper
/// c term `(2p²/3)(ln(3np/(1-3p)) + 1) + 2p³`. Needs `p < 1/3` and
/// `np >= 1/3 + p`; the norm is the exact Poisson one at `λ = np`.
pub fn ub_po_iid_refined(n: usize, p: f64) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "need at least one summand",
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "must lie in (0, 1)",
        });
    }
    let lambda = n as f64 * p;
    let norm = Norm::exact_poisson(lambda)?;
    let c_term = if p < 1.0 / 3.0 {
        let log_arg = 3.0 * lambda / (1.0 - 3.0 * p);
        (2.0 * p * p / 3.0) * (log_arg.ln() + 1.0) + 2.0 * p.powi(3)
    } else {
        f64::INFINITY
    };
    let smooth_term = scaled(0.25 * norm.value * lambda * p, shift_factor(p));
    let mut r = BoundReport::new(c_term, smooth_term, norm, lambda);
    r.notes
        .push("refined c term replaces (n p²)² of the plain i.i.d. bound".to_string());
    if p >= 1.0 / 3.0 {
        r.invalidate(format!("p = {p} is not below 1/3"));
    } else if lambda < 1.0 / 3.0 + p {
        r.invalidate(format!("λ = {lambda} is below 1/3 + p"));
    }
    Ok(r)
}

/// Which second-moment quantity drives a local-dependence bound.
#[derive(Clone, Copy, PartialEq)]
enum PairMode {
    Moments,
    AbsCovariance,
}

fn ub_cp_kdep(profile: &LocalDepProfile, norm: Norm, mode: PairMode) -> Result<BoundReport> {
    profile.validate()?;
    let n = profile.len();
    let k = profile.k as i64;
    let ps = &profile.ps;
    let m = local_max_mass(ps, profile.k);

    // Pair quantity in the smooth term and in the prefix part of C_n.
    let pair_smooth = |i: usize, j: usize| -> Result<f64> {
        Ok(match mode {
            PairMode::Moments => {
                profile.cross_moments.lookup("cross_moments", i, j)?
                    + profile.means[i] * profile.means[j]
            }
            PairMode::AbsCovariance => profile.covariances.lookup("covariances", i, j)?.abs(),
        })
    };
    let pair_prefix = |i: usize, j: usize| -> Result<f64> {
        Ok(match mode {
            PairMode::Moments => {
                profile.joint_nonzero.lookup("joint_nonzero", i, j)? + ps[i] * ps[j]
            }
            PairMode::AbsCovariance => profile.covariances.lookup("covariances", i, j)?.abs(),
        })
    };
    let diag_prefix = |j: usize| match mode {
        PairMode::Moments => 0.5 * ps[j] * ps[j],
        PairMode::AbsCovariance => 0.5 * profile.sq_means[j],
    };

    let mut smooth_terms = Vec::with_capacity(n);
    // inner[j] = sum_{t=j-k+1}^{j-1} pair_prefix(j, t) + diag_prefix(j)
    let mut inner = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let w = window(i as i64 - k + 1, i as i64 - 1);
        let mut s = Vec::with_capacity(w.len());
        let mut pre = Vec::with_capacity(w.len());
        let mut bb = Vec::with_capacity(w.len());
        for j in w {
            s.push(pair_smooth(i, j)?);
            pre.push(pair_prefix(i, j)?);
            bb.push(profile.joint_nonzero.lookup("joint_nonzero", i, j)? + ps[i] * ps[j]);
        }
        smooth_terms.push(stable_sum(s) + 0.5 * profile.sq_means[i]);
        inner.push(stable_sum(pre) + diag_prefix(i));
        b.push(2.0 * stable_sum(bb) + ps[i] * ps[i]);
    }

    // A_i = 2 sum_{j <= i-3k+2} inner[j] + sum_{j=i-3k+3}^{i-2k+1} p_j
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = crate::pmf::Accumulator::default();
    for &x in &inner {
        acc.add(x);
        cumulative.push(acc.value());
    }
    let c_terms = (0..n).map(|i| {
        let ii = i as i64;
        let upto = ii - 3 * k + 2;
        let prefix = if upto >= 0 {
            cumulative[upto as usize]
        } else {
            0.0
        };
        let a = 2.0 * prefix + window_sum(ps, ii - 3 * k + 3, ii - 2 * k + 1);
        a * b[i]
    });
    let c_term = 2.0 * stable_sum(c_terms);

    let smooth_term = scaled(norm.value * stable_sum(smooth_terms) / 2.0, shift_factor(m));
    let mut r = BoundReport::new(c_term, smooth_term, norm, stable_sum(ps.iter().copied()));
    gate_local(&mut r, m);
    if mode == PairMode::AbsCovariance {
        r.notes.push(
            "assumes the declared quadrant dependence (PQD or NQD); it is not checked".to_string(),
        );
    }
    Ok(r)
}

/// Compound Poisson bound for a `k`-dependent sequence from first and
/// second moments. `norm` belongs to `CP(sum p_i, sum p_i G_i / sum p_i)`.
pub fn ub_cp_kdep_moments(profile: &LocalDepProfile, norm: Norm) -> Result<BoundReport> {
    ub_cp_kdep(profile, norm, PairMode::Moments)
}

/// As [`ub_cp_kdep_moments`] with `|Cov(X_i, X_j)|` in place of the pair
/// moments, valid when the partial sums are quadrant dependent (positively
/// or negatively). The caller vouches for that hypothesis.
pub fn ub_cp_kdep_quadrant(profile: &LocalDepProfile, norm: Norm) -> Result<BoundReport> {
    ub_cp_kdep(profile, norm, PairMode::AbsCovariance)
}

/// The general local-dependence bound from caller-supplied ingredients:
///
/// - `zeta_terms[i]`: `ζ₂` between the window sum `X_{i-2k+2} + ... + X_i`
///   and the same sum plus an independent `CP(p_i, G_i)` variable
///   substituted for `X_i`'s contribution,
/// - `dtv_prefix_terms[i]`: total variation between `X_0 + ... + X_{i-3k+2}`
///   and the matching sum of independent compound Poisson variables,
/// - `window_joint[i]`: `sum_{j=i-k+1}^{i-1} P(X_i != 0, X_j != 0)`.
pub fn ub_cp_kdep_general(
    ps: &[f64],
    k: usize,
    zeta_terms: &[f64],
    dtv_prefix_terms: &[f64],
    window_joint: &[f64],
    norm: Norm,
) -> Result<BoundReport> {
    let n = ps.len();
    for (what, got) in [
        ("zeta_terms", zeta_terms.len()),
        ("dtv_prefix_terms", dtv_prefix_terms.len()),
        ("window_joint", window_joint.len()),
    ] {
        if got != n {
            return Err(Error::LengthMismatch {
                what,
                got,
                expected: n,
            });
        }
    }
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            value: 0.0,
            reason: "dependence range must be at least 1",
        });
    }
    for &p in ps {
        check_prob("p", p)?;
    }
    let kk = k as i64;
    let m = local_max_mass(ps, k);
    let c_terms = (0..n).map(|i| {
        let ii = i as i64;
        let a = dtv_prefix_terms[i] + window_sum(ps, ii - 3 * kk + 3, ii - 2 * kk + 1);
        let b = 2.0 * window_joint[i]
            + 2.0 * ps[i] * window_sum(ps, ii - kk + 1, ii - 1)
            + ps[i] * ps[i];
        a * b
    });
    let c_term = 2.0 * stable_sum(c_terms);
    let smooth_term = scaled(
        norm.value * stable_sum(zeta_terms.iter().copied()) / 2.0,
        shift_factor(m),
    );
    let mut r = BoundReport::new(c_term, smooth_term, norm, stable_sum(ps.iter().copied()));
    gate_local(&mut r, m);
    Ok(r)
}
