//! Finite-support probability mass functions on the integers.
//!
//! Every infinite-support law is truncated to a finite window and the mass
//! that was cut away is kept in [`IntPmf::deficit`], so downstream code can
//! turn it into a rigorous error bar.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use statrs::function::gamma::ln_gamma;

use crate::error::{check_eps, Error, Result};

/// Default truncation tolerance for infinite-support constructors.
pub const DEFAULT_EPS: f64 = 1e-12;

/// Tolerance on `sum(probs) + deficit == 1`.
pub const MASS_TOL: f64 = 1e-12;

/// A probability mass function on `offset, offset + 1, ...` with an explicit
/// truncation deficit.
///
/// The weights are canonically trimmed: the first and last entries are
/// nonzero unless the whole vector is a single zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IntPmf {
    offset: i64,
    probs: Vec<f64>,
    deficit: f64,
}

/// First two moments of an [`IntPmf`], summed over the stored support only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub second_raw: f64,
    pub variance: f64,
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        // An infinite term poisons the compensation with NaN.
        if self.sum.is_finite() {
            self.sum + self.comp
        } else {
            self.sum
        }
    }
}

pub(crate) fn stable_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = Accumulator::default();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// `ln(k!)`.
pub(crate) fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

impl IntPmf {
    /// Builds a pmf from explicit weights and deficit, validating every
    /// invariant.
    pub fn new(offset: i64, probs: Vec<f64>, deficit: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty weight vector".into()));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidPmf(format!(
                "weight at {} is {p}",
                offset + i as i64
            )));
        }
        if !(0.0..=1.0).contains(&deficit) {
            return Err(Error::InvalidPmf(format!(
                "deficit {deficit} outside [0, 1]"
            )));
        }
        let total = stable_sum(probs.iter().copied()) + deficit;
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidPmf(format!(
                "weights plus deficit sum to {total}, not 1"
            )));
        }
        Ok(Self::assemble(offset, probs, deficit))
    }

    /// Normalizes arbitrary non-negative weights into a pmf with zero deficit.
    pub fn from_weights(offset: i64, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidPmf(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total = stable_sum(weights.iter().copied());
        if total <= 0.0 {
            return Err(Error::InvalidPmf("weights sum to zero".into()));
        }
        Ok(Self::assemble(
            offset,
            weights.iter().map(|w| w / total).collect(),
            0.0,
        ))
    }

    pub fn point_mass(at: i64) -> Self {
        Self {
            offset: at,
            probs: vec![1.0],
            deficit: 0.0,
        }
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "success probability must lie in [0, 1]",
            });
        }
        Ok(Self::assemble(0, vec![1.0 - p, p], 0.0))
    }

    /// Trims leading and trailing zeros. Callers guarantee the invariants.
    pub(crate) fn assemble(mut offset: i64, mut probs: Vec<f64>, deficit: f64) -> Self {
        let first = probs.iter().position(|&p| p != 0.0);
        match first {
            None => {
                probs = vec![0.0];
            }
            Some(first) => {
                let last = probs.iter().rposition(|&p| p != 0.0).unwrap_or(first);
                probs.truncate(last + 1);
                probs.drain(..first);
                offset += first as i64;
            }
        }
        Self {
            offset,
            probs,
            deficit,
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    /// Largest stored support point.
    pub fn max_support(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    /// Probability of `x`; zero outside the stored window.
    pub fn get(&self, x: i64) -> f64 {
        let i = x - self.offset;
        if i < 0 {
            return 0.0;
        }
        self.probs.get(i as usize).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.offset + i as i64, p))
    }

    /// Total stored mass, `1 - deficit` up to rounding.
    pub fn mass(&self) -> f64 {
        stable_sum(self.probs.iter().copied())
    }

    pub fn moments(&self) -> Moments {
        moments(self)
    }

    pub fn mean(&self) -> f64 {
        stable_sum(self.iter().map(|(x, p)| x as f64 * p))
    }
}

impl Serialize for IntPmf {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let digits = |x: f64| -> Box<RawValue> {
            RawValue::from_string(format!("{x:.16e}")).expect("formatted float is valid JSON")
        };
        let probs: Vec<Box<RawValue>> = self.probs.iter().map(|&p| digits(p)).collect();
        let mut s = serializer.serialize_struct("IntPmf", 3)?;
        s.serialize_field("offset", &self.offset)?;
        s.serialize_field("probs", &probs)?;
        s.serialize_field("deficit", &digits(self.deficit))?;
        s.end()
    }
}

#[derive(Deserialize)]
struct IntPmfRepr {
    offset: i64,
    probs: Vec<f64>,
    #[serde(default)]
    deficit: f64,
}

impl<'de> Deserialize<'de> for IntPmf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IntPmfRepr::deserialize(d)?;
        IntPmf::new(r.offset, r.probs, r.deficit).map_err(serde::de::Error::custom)
    }
}

/// A Poisson rate together with a compounding law on the positive integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CompoundSpecRepr")]
pub struct CompoundSpec {
    rate: f64,
    compounding: IntPmf,
}

#[derive(Deserialize)]
struct CompoundSpecRepr {
    rate: f64,
    compounding: IntPmf,
}

impl TryFrom<CompoundSpecRepr> for CompoundSpec {
    type Error = Error;
    fn try_from(r: CompoundSpecRepr) -> Result<Self> {
        CompoundSpec::new(r.rate, r.compounding)
    }
}

impl CompoundSpec {
    pub fn new(rate: f64, compounding: IntPmf) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rate",
                value: rate,
                reason: "Poisson rate must be positive and finite",
            });
        }
        if compounding.offset() < 1 {
            return Err(Error::InvalidPmf(
                "compounding law must put zero mass at or below 0".into(),
            ));
        }
        if compounding.deficit() >= 1.0 {
            return Err(Error::InvalidPmf("compounding law has no mass".into()));
        }
        Ok(Self { rate, compounding })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn compounding(&self) -> &IntPmf {
        &self.compounding
    }
}

/// Poisson law with the given rate, truncated so that the deficit is at most
/// `eps`. Each weight is evaluated as `exp(-rate + k ln rate - ln k!)`.
pub fn poisson_pmf(rate: f64, eps: f64) -> Result<IntPmf> {
    check_eps(eps)?;
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rate",
            value: rate,
            reason: "Poisson rate must be non-negative and finite",
        });
    }
    if rate == 0.0 {
        return Ok(IntPmf::point_mass(0));
    }
    let ln_rate = rate.ln();
    // Below this point every weight is under e^-800.
    let lo = (rate - 40.0 * rate.sqrt() - 40.0).max(0.0).floor() as u64;
    let mut probs = Vec::new();
    let mut acc = Accumulator::default();
    let mut k = lo;
    loop {
        let v = (-rate + k as f64 * ln_rate - ln_factorial(k)).exp();
        probs.push(v);
        acc.add(v);
        if k as f64 >= rate && (1.0 - acc.value() <= eps || v == 0.0) {
            break;
        }
        k += 1;
    }
    let deficit = (1.0 - acc.value()).max(0.0);
    Ok(IntPmf::assemble(lo as i64, probs, deficit))
}

fn check_unit_open(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: p,
            reason: "must lie in the open interval (0, 1)",
        })
    }
}

/// Geometric law `P(x) = (1 - p) p^(x - 1)` on `x = 1, 2, ...`.
pub fn geometric_pmf(p: f64, eps: f64) -> Result<IntPmf> {
    check_unit_open("p", p)?;
    check_eps(eps)?;
    let q = 1.0 - p;
    // Tail beyond K is p^K.
    let len = ((eps.ln() / p.ln()).ceil().max(1.0)) as usize;
    let mut probs = Vec::with_capacity(len);
    let mut pow = 1.0;
    for _ in 0..len {
        probs.push(q * pow);
        pow *= p;
    }
    Ok(IntPmf::assemble(1, probs, p.powi(len as i32)))
}

/// Geometric law with all mass beyond `k` folded onto `k`.
pub fn truncated_geometric_pmf(p: f64, k: usize) -> Result<IntPmf> {
    check_unit_open("p", p)?;
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            value: 0.0,
            reason: "truncation point must be at least 1",
        });
    }
    let q = 1.0 - p;
    let mut probs = Vec::with_capacity(k);
    let mut pow = 1.0;
    for _ in 1..k {
        probs.push(q * pow);
        pow *= p;
    }
    probs.push(pow);
    Ok(IntPmf::assemble(1, probs, 0.0))
}

/// Compound Poisson law via the Poisson-case Panjer recursion
/// `p_n = (rate / n) sum_j j f(j) p_(n-j)`, `p_0 = exp(-rate)`.
///
/// The compounding deficit `d` shrinks the reachable mass to `exp(-rate d)`;
/// the recursion stops once it is within `eps / 2` of that, and fails if the
/// overall deficit still exceeds `eps`.
pub fn compound_poisson_pmf(spec: &CompoundSpec, eps: f64) -> Result<IntPmf> {
    check_eps(eps)?;
    let rate = spec.rate;
    let sev = &spec.compounding;
    let p0 = (-rate).exp();
    if p0 < f64::MIN_POSITIVE {
        return Err(Error::Underflow(rate));
    }
    let smin = sev.offset() as usize;
    let smax = sev.max_support() as usize;
    let weighted: Vec<f64> = (smin..=smax)
        .map(|j| j as f64 * sev.get(j as i64))
        .collect();
    let reachable = (-rate * sev.deficit()).exp();

    let m = sev.moments();
    let mean = rate * m.mean;
    let sd = (rate * m.second_raw).sqrt();
    let cap = (mean + 60.0 * sd + 50.0 * smax as f64 + 1000.0) as usize;

    let mut probs = vec![p0];
    let mut acc = Accumulator::default();
    acc.add(p0);
    let mut n = 0usize;
    while reachable - acc.value() > 0.5 * eps && n < cap {
        n += 1;
        let mut s = Accumulator::default();
        let top = n.min(smax);
        for j in smin..=top {
            s.add(weighted[j - smin] * probs[n - j]);
        }
        let pn = rate / n as f64 * s.value();
        probs.push(pn);
        acc.add(pn);
    }
    let deficit = (1.0 - acc.value()).max(0.0);
    if deficit > eps {
        return Err(Error::ToleranceNotMet { deficit, eps });
    }
    Ok(IntPmf::assemble(0, probs, deficit))
}

/// Pólya–Aeppli law: compound Poisson with geometric(`p`) compounding.
pub fn polya_aeppli_pmf(rate: f64, p: f64, eps: f64) -> Result<IntPmf> {
    check_eps(eps)?;
    check_unit_open("p", p)?;
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rate",
            value: rate,
            reason: "Poisson rate must be positive and finite",
        });
    }
    // Composed deficit is at most rate * severity deficit + eps / 2.
    let sev_eps = (eps / (4.0 * rate)).clamp(1e-300, 0.5);
    let spec = CompoundSpec::new(rate, geometric_pmf(p, sev_eps)?)?;
    compound_poisson_pmf(&spec, eps)
}

/// Law of the sum of two independent variables.
pub fn convolve(a: &IntPmf, b: &IntPmf) -> IntPmf {
    let mut out = vec![0.0; a.probs.len() + b.probs.len() - 1];
    for (i, &x) in a.probs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.probs.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    let deficit = a.deficit + b.deficit - a.deficit * b.deficit;
    IntPmf::assemble(a.offset + b.offset, out, deficit)
}

/// Pointwise weighted sum of pmfs.
pub fn mixture(weights: &[f64], parts: &[IntPmf]) -> Result<IntPmf> {
    if weights.len() != parts.len() {
        return Err(Error::LengthMismatch {
            what: "weights",
            got: weights.len(),
            expected: parts.len(),
        });
    }
    if parts.is_empty() {
        return Err(Error::InvalidPmf("mixture of zero parts".into()));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidPmf(
            "mixture weights must be non-negative".into(),
        ));
    }
    let total = stable_sum(weights.iter().copied());
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidPmf(format!("mixture weights sum to {total}")));
    }
    let lo = parts.iter().map(IntPmf::offset).min().unwrap_or(0);
    let hi = parts.iter().map(IntPmf::max_support).max().unwrap_or(0);
    let mut out = vec![0.0; (hi - lo + 1) as usize];
    let mut deficit = 0.0;
    for (w, part) in weights.iter().zip(parts) {
        for (x, p) in part.iter() {
            out[(x - lo) as usize] += w * p;
        }
        deficit += w * part.deficit;
    }
    Ok(IntPmf::assemble(lo, out, deficit))
}

/// Exact law of a sum of independent Bernoulli variables.
pub fn poisson_binomial_pmf(ps: &[f64]) -> Result<IntPmf> {
    if let Some(&p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "success probability must lie in [0, 1]",
        });
    }
    let mut dist = vec![1.0];
    for &p in ps {
        let q = 1.0 - p;
        let mut next = vec![0.0; dist.len() + 1];
        for (i, &d) in dist.iter().enumerate() {
            next[i] += d * q;
            next[i + 1] += d * p;
        }
        dist = next;
    }
    Ok(IntPmf::assemble(0, dist, 0.0))
}

/// Mean, second raw moment and variance over the stored support. The
/// truncated tail is not included; callers account for the deficit.
pub fn moments(a: &IntPmf) -> Moments {
    let mean = a.mean();
    let second_raw = stable_sum(a.iter().map(|(x, p)| (x as f64) * (x as f64) * p));
    let variance = stable_sum(a.iter().map(|(x, p)| {
        let d = x as f64 - mean;
        d * d * p
    }));
    Moments {
        mean,
        second_raw,
        variance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_same(a: &IntPmf, b: &IntPmf, tol: f64) {
        let lo = a.offset().min(b.offset());
        let hi = a.max_support().max(b.max_support());
        for x in lo..=hi {
            assert!(
                (a.get(x) - b.get(x)).abs() <= tol,
                "entry {x}: {} vs {}",
                a.get(x),
                b.get(x)
            );
        }
    }

    fn binomial(n: u64, p: f64) -> Vec<f64> {
        (0..=n)
            .map(|k| {
                let ln_c = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
                (ln_c + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
            })
            .collect()
    }

    #[test]
    fn ln_factorial_matches_products() {
        let mut f = 1.0f64;
        for k in 1..=170u64 {
            f *= k as f64;
            assert!(
                (ln_factorial(k) - f.ln()).abs() <= 1e-12 * f.ln().max(1.0),
                "k = {k}"
            );
        }
    }

    #[test]
    fn poisson_basics() {
        let zero = poisson_pmf(0.0, DEFAULT_EPS).unwrap();
        assert_eq!(zero, IntPmf::point_mass(0));

        let one = poisson_pmf(1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(one.get(0), (-1.0f64).exp(), epsilon = 1e-12);

        let five = poisson_pmf(5.0, 1e-12).unwrap();
        assert_abs_diff_eq!(five.mean(), 5.0, epsilon = 1e-9);
        assert!(five.deficit() <= 1e-12);
        assert!((five.mass() + five.deficit() - 1.0).abs() <= MASS_TOL);
    }

    #[test]
    fn poisson_large_rate_stays_finite() {
        let big = poisson_pmf(1e4, 1e-12).unwrap();
        assert!(big.deficit() <= 1e-12);
        assert!(big.probs().iter().all(|p| p.is_finite()));
        assert_abs_diff_eq!(big.mean(), 1e4, epsilon = 1e-6);
        assert_abs_diff_eq!(big.moments().variance, 1e4, epsilon = 1e-4);
    }

    #[test]
    fn poisson_rejects_bad_input() {
        assert!(poisson_pmf(-1.0, 1e-12).is_err());
        assert!(poisson_pmf(1.0, 0.0).is_err());
        assert!(poisson_pmf(1.0, 1.0).is_err());
        assert!(poisson_pmf(f64::NAN, 1e-12).is_err());
    }

    #[test]
    fn compound_with_unit_severity_is_poisson() {
        let spec = CompoundSpec::new(1.0, IntPmf::point_mass(1)).unwrap();
        let cp = compound_poisson_pmf(&spec, 1e-12).unwrap();
        assert_same(&cp, &poisson_pmf(1.0, 1e-12).unwrap(), 1e-12);
    }

    #[test]
    fn compound_zero_entry_is_exp_minus_rate() {
        let spec = CompoundSpec::new(2.0, geometric_pmf(0.5, 1e-16).unwrap()).unwrap();
        let cp = compound_poisson_pmf(&spec, 1e-12).unwrap();
        assert_abs_diff_eq!(cp.get(0), 0.1353352832366127, epsilon = 1e-15);
    }

    #[test]
    fn compound_matches_mixture_of_convolutions() {
        let sev = IntPmf::from_weights(1, &[0.5, 0.3, 0.2]).unwrap();
        let rate = 3.0f64;
        let spec = CompoundSpec::new(rate, sev.clone()).unwrap();
        let cp = compound_poisson_pmf(&spec, 1e-14).unwrap();

        // Direct oracle: sum_m Po(m) F^{*m}, M with Poisson tail < 1e-13.
        let mut power = IntPmf::point_mass(0);
        let mut direct = vec![0.0; 200];
        let mut m = 0u64;
        loop {
            let w = (-rate + m as f64 * rate.ln() - ln_factorial(m)).exp();
            for (x, p) in power.iter() {
                direct[x as usize] += w * p;
            }
            let tail = 1.0
                - (0..=m)
                    .map(|j| (-rate + j as f64 * rate.ln() - ln_factorial(j)).exp())
                    .sum::<f64>();
            if tail < 1e-13 {
                break;
            }
            power = convolve(&power, &sev);
            m += 1;
        }
        for (x, d) in direct.iter().enumerate() {
            assert!((cp.get(x as i64) - d).abs() <= 1e-10, "x = {x}");
        }
    }

    #[test]
    fn compound_rejects_underflow_and_bad_specs() {
        let spec = CompoundSpec::new(800.0, IntPmf::point_mass(1)).unwrap();
        assert!(matches!(
            compound_poisson_pmf(&spec, 1e-12),
            Err(Error::Underflow(_))
        ));
        assert!(CompoundSpec::new(1.0, IntPmf::point_mass(0)).is_err());
        assert!(CompoundSpec::new(0.0, IntPmf::point_mass(1)).is_err());
    }

    #[test]
    fn compound_moment_identities() {
        let sev = geometric_pmf(0.5, 1e-16).unwrap();
        let spec = CompoundSpec::new(3.0, sev).unwrap();
        let cp = compound_poisson_pmf(&spec, 1e-12).unwrap();
        let m = cp.moments();
        assert_abs_diff_eq!(m.mean, 6.0, epsilon = 1e-9);
        // rate (1 + p) / q^2
        assert_abs_diff_eq!(m.variance, 18.0, epsilon = 1e-6);
    }

    #[test]
    fn geometric_values() {
        let g = geometric_pmf(0.5, 1e-12).unwrap();
        assert_eq!(g.offset(), 1);
        assert_abs_diff_eq!(g.get(1), 0.5);
        assert_abs_diff_eq!(g.get(2), 0.25);
        assert_abs_diff_eq!(g.mean(), 2.0, epsilon = 1e-9);
        assert!(g.deficit() <= 1e-12);

        let g8 = geometric_pmf(0.8, 1e-14).unwrap();
        assert_abs_diff_eq!(g8.moments().second_raw, 45.0, epsilon = 1e-6);

        assert!(geometric_pmf(0.0, 1e-12).is_err());
        assert!(geometric_pmf(1.0, 1e-12).is_err());
    }

    #[test]
    fn truncated_geometric_values() {
        let t = truncated_geometric_pmf(0.5, 3).unwrap();
        assert_eq!(t.probs(), &[0.5, 0.25, 0.25]);
        assert_eq!(t.deficit(), 0.0);
        assert_eq!(
            truncated_geometric_pmf(0.3, 1).unwrap(),
            IntPmf::point_mass(1)
        );
        assert!(truncated_geometric_pmf(0.3, 0).is_err());
        assert!(truncated_geometric_pmf(1.3, 2).is_err());
    }

    #[test]
    fn polya_aeppli_values() {
        let near_poisson = polya_aeppli_pmf(1.0, 1e-9, 1e-12).unwrap();
        assert_same(&near_poisson, &poisson_pmf(1.0, 1e-12).unwrap(), 1e-6);

        let pa = polya_aeppli_pmf(2.0, 0.5, 1e-12).unwrap();
        assert_abs_diff_eq!(pa.get(0), (-2.0f64).exp(), epsilon = 1e-15);

        let pa5 = polya_aeppli_pmf(5.0, 0.5, 1e-12).unwrap();
        assert_abs_diff_eq!(pa5.mean(), 10.0, epsilon = 1e-8);
        assert!(pa5.deficit() <= 1e-12);
    }

    #[test]
    fn convolve_examples() {
        let c = convolve(&IntPmf::point_mass(2), &IntPmf::point_mass(3));
        assert_eq!(c, IntPmf::point_mass(5));

        let b = IntPmf::bernoulli(0.5).unwrap();
        assert_eq!(convolve(&b, &b).probs(), &[0.25, 0.5, 0.25]);

        let sum = convolve(
            &poisson_pmf(1.0, 1e-14).unwrap(),
            &poisson_pmf(2.0, 1e-14).unwrap(),
        );
        assert_same(&sum, &poisson_pmf(3.0, 1e-14).unwrap(), 1e-11);
        assert!(sum.deficit() <= 2e-14);
    }

    #[test]
    fn mixture_examples() {
        let a = poisson_pmf(2.0, 1e-12).unwrap();
        assert_eq!(mixture(&[1.0], std::slice::from_ref(&a)).unwrap(), a);

        let m = mixture(&[0.5, 0.5], &[IntPmf::point_mass(0), IntPmf::point_mass(2)]).unwrap();
        assert_eq!(m.offset(), 0);
        assert_eq!(m.probs(), &[0.5, 0.0, 0.5]);

        let parts = [
            IntPmf::from_weights(-1, &[0.2, 0.5, 0.3]).unwrap(),
            IntPmf::from_weights(3, &[0.9, 0.1]).unwrap(),
            geometric_pmf(0.3, 1e-15).unwrap(),
        ];
        let w = [0.2, 0.3, 0.5];
        let mix = mixture(&w, &parts).unwrap();
        let expected: f64 = w.iter().zip(&parts).map(|(w, p)| w * p.mean()).sum();
        assert_abs_diff_eq!(mix.mean(), expected, epsilon = 1e-10);

        assert!(mixture(&[0.5], &parts).is_err());
        assert!(mixture(&[0.5, 0.2, 0.2], &parts).is_err());
    }

    #[test]
    fn poisson_binomial_examples() {
        assert_eq!(
            poisson_binomial_pmf(&[1.0, 1.0, 1.0]).unwrap(),
            IntPmf::point_mass(3)
        );
        assert_eq!(
            poisson_binomial_pmf(&[0.5, 0.5]).unwrap().probs(),
            &[0.25, 0.5, 0.25]
        );
        let pb = poisson_binomial_pmf(&[0.1; 10]).unwrap();
        for (k, b) in binomial(10, 0.1).iter().enumerate() {
            assert!((pb.get(k as i64) - b).abs() <= 1e-14, "k = {k}");
        }
        assert!(poisson_binomial_pmf(&[0.5, 1.5]).is_err());
    }

    #[test]
    fn moments_of_point_mass_and_geometric() {
        let m = moments(&IntPmf::point_mass(4));
        assert_eq!((m.mean, m.second_raw, m.variance), (4.0, 16.0, 0.0));
        let g = geometric_pmf(0.5, 1e-12).unwrap();
        assert!((g.mean() - 2.0).abs() <= 1e-9);
    }

    #[test]
    fn new_validates_invariants() {
        assert!(IntPmf::new(0, vec![0.5, 0.4], 0.1).is_ok());
        assert!(IntPmf::new(0, vec![0.5, 0.4], 0.0).is_err());
        assert!(IntPmf::new(0, vec![-0.1, 1.1], 0.0).is_err());
        assert!(IntPmf::new(0, vec![], 1.0).is_err());
        let trimmed = IntPmf::new(0, vec![0.0, 0.0, 1.0, 0.0], 0.0).unwrap();
        assert_eq!(trimmed, IntPmf::point_mass(2));
    }

    #[test]
    fn json_uses_seventeen_significant_digits() {
        let b = IntPmf::bernoulli(0.1).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(
            s,
            r#"{"offset":0,"probs":[9.0000000000000002e-1,1.0000000000000001e-1],"deficit":0.0000000000000000e0}"#
        );
        let back: IntPmf = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
        assert!(
            serde_json::from_str::<IntPmf>(r#"{"offset":0,"probs":[0.5],"deficit":0}"#).is_err()
        );
    }
}
