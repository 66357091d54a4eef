//! Exact brute-force laws and inequality checks used to verify the bounds.
//!
//! Everything here is computed by direct convolution, dynamic programming or
//! full enumeration, independently of the bound formulas.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::IndepProfile;
use crate::error::{check_eps, Error, Result};
use crate::metrics::{tv_distance, zeta2, DEFAULT_MEAN_TOL};
use crate::pmf::{
    compound_poisson_pmf, convolve, mixture, poisson_pmf, stable_sum, Accumulator, CompoundSpec,
    IntPmf, MASS_TOL,
};
use crate::runs::RunsConfig;
use crate::smoothness::numeric_delta2_l1;

/// Default largest `n` for [`exact_run_count_pmf`].
pub const DEFAULT_RUN_CAP: usize = 500;
/// Largest number of binary trials enumerated exhaustively.
pub const ENUMERATION_CAP: usize = 24;
/// Largest number of atoms a [`JointPmf`] may hold.
pub const JOINT_ATOM_CAP: usize = 10_000;
/// Round-off allowance on top of the truncation error bars.
pub const FLOAT_SLACK: f64 = 1e-12;

/// Outcome of checking `lhs <= rhs` (or `lhs == rhs`) on exact laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Rigorous bound on the truncation error in `lhs - rhs`.
    pub error_bar: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn at_most(lhs: f64, rhs: f64, error_bar: f64) -> Self {
        Self {
            lhs,
            rhs,
            error_bar,
            holds: lhs <= rhs + error_bar + FLOAT_SLACK,
        }
    }

    fn equal(lhs: f64, rhs: f64, error_bar: f64, tol: f64) -> Self {
        Self {
            lhs,
            rhs,
            error_bar,
            holds: (lhs - rhs).abs() <= error_bar + tol,
        }
    }

    /// `lhs / (rhs + error_bar)`, how tight the inequality is.
    pub fn ratio(&self) -> f64 {
        let r = self.rhs + self.error_bar;
        if r > 0.0 {
            self.lhs / r
        } else if self.lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// Exact law of the number of overlapping success runs by dynamic
/// programming over (current streak capped at `k - 1`, runs so far).
pub fn exact_run_count_pmf(cfg: &RunsConfig, cap: usize) -> Result<IntPmf> {
    let (n, k, p) = (cfg.n(), cfg.k(), cfg.p());
    if n > cap {
        return Err(Error::TooLarge {
            what: "number of trials",
            size: n,
            cap,
        });
    }
    let q = 1.0 - p;
    let counts = cfg.starts() + 1;
    // dp[s * counts + c]
    let mut dp = vec![0.0; k * counts];
    dp[0] = 1.0;
    let mut next = vec![0.0; k * counts];
    for _ in 0..n {
        next.iter_mut().for_each(|x| *x = 0.0);
        for s in 0..k {
            for c in 0..counts {
                let w = dp[s * counts + c];
                if w == 0.0 {
                    continue;
                }
                next[c] += w * q;
                let (s2, c2) = if s + 1 >= k {
                    (k - 1, c + 1)
                } else {
                    (s + 1, c)
                };
                next[s2 * counts + c2] += w * p;
            }
        }
        std::mem::swap(&mut dp, &mut next);
    }
    let probs: Vec<f64> = (0..counts)
        .map(|c| stable_sum((0..k).map(|s| dp[s * counts + c])))
        .collect();
    Ok(IntPmf::assemble(0, probs, 0.0))
}

fn check_enumerable(bits: usize) -> Result<()> {
    if bits > ENUMERATION_CAP {
        return Err(Error::TooLarge {
            what: "number of enumerated trials",
            size: bits,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// Turns integer tallies `tally[value][ones]` over `bits` Bernoulli(p)
/// trials into a pmf over `value`.
fn pmf_from_tallies(tally: &[Vec<u64>], bits: usize, p: f64) -> IntPmf {
    let q = 1.0 - p;
    let weight: Vec<f64> = (0..=bits)
        .map(|ones| p.powi(ones as i32) * q.powi((bits - ones) as i32))
        .collect();
    let probs = tally
        .iter()
        .map(|row| stable_sum(row.iter().zip(&weight).map(|(&c, &w)| c as f64 * w)))
        .collect();
    IntPmf::assemble(0, probs, 0.0)
}

/// Law of the run count by summing over all `2^n` outcomes.
pub fn enumerate_run_count_pmf(cfg: &RunsConfig) -> Result<IntPmf> {
    let (n, k) = (cfg.n(), cfg.k());
    check_enumerable(n)?;
    let starts = cfg.starts();
    let start_mask: u64 = (1u64 << starts) - 1;
    let mut tally = vec![vec![0u64; n + 1]; starts + 1];
    for mask in 0u64..(1u64 << n) {
        let mut run = mask;
        for t in 1..k {
            run &= mask >> t;
        }
        let count = (run & start_mask).count_ones() as usize;
        tally[count][mask.count_ones() as usize] += 1;
    }
    Ok(pmf_from_tallies(&tally, n, cfg.p()))
}

/// Law of the sum of truncated clump sizes
/// `Y'_i = (1 - Z_{i-1}) sum_{r<k} Z_i ⋯ Z_{i+k+r-1}`, `i = 1..n-k+1`, by
/// enumerating the `n + k` trials `Z_0, ..., Z_{n+k-1}` it depends on.
pub fn enumerate_declumped_sum_pmf(cfg: &RunsConfig) -> Result<IntPmf> {
    let (n, k) = (cfg.n(), cfg.k());
    if k < 2 {
        return Err(Error::Unsupported("declumping needs run length k >= 2"));
    }
    let bits = n + k;
    check_enumerable(bits)?;
    let max_sum = cfg.starts() * k;
    let mut tally = vec![vec![0u64; bits + 1]; max_sum + 1];
    for mask in 0u64..(1u64 << bits) {
        let z = |j: usize| (mask >> j) & 1 == 1;
        let mut total = 0;
        for i in 1..=cfg.starts() {
            if z(i - 1) {
                continue;
            }
            // Length of the success streak starting at i, capped at 2k - 1.
            let streak = (i..i + 2 * k - 1).take_while(|&j| z(j)).count();
            if streak >= k {
                total += streak - k + 1;
            }
        }
        tally[total][mask.count_ones() as usize] += 1;
    }
    Ok(pmf_from_tallies(&tally, bits, cfg.p()))
}

/// Law of `X_1 + ... + X_n` for independent summands by convolution.
pub fn exact_independent_sum_pmf(profile: &IndepProfile) -> Result<IntPmf> {
    let mut acc = IntPmf::point_mass(0);
    for (&p, g) in profile.ps().iter().zip(profile.severities()) {
        let x = mixture(&[1.0 - p, p], &[IntPmf::point_mass(0), g.clone()])?;
        acc = convolve(&acc, &x);
    }
    Ok(acc)
}

/// Compound Poisson law as the mixture `sum_m Po(λ)(m) F^{*m}`, by repeated
/// convolution. Slow; for cross-checking the recursion on small inputs.
pub fn direct_compound_poisson_pmf(spec: &CompoundSpec, eps: f64) -> Result<IntPmf> {
    check_eps(eps)?;
    let weights = poisson_pmf(spec.rate(), eps / 2.0)?;
    let f = spec.compounding();
    let max_m = weights.max_support() as usize;
    let width = max_m * f.max_support() as usize + 1;
    if width > 1_000_000 {
        return Err(Error::TooLarge {
            what: "direct compound support",
            size: width,
            cap: 1_000_000,
        });
    }
    let mut acc: Vec<Accumulator> = vec![Accumulator::default(); width];
    let mut power = IntPmf::point_mass(0);
    for m in 0..=max_m {
        let w = weights.get(m as i64);
        if w > 0.0 {
            for (x, v) in power.iter() {
                acc[x as usize].add(w * v);
            }
        }
        power = convolve(&power, f);
    }
    let probs: Vec<f64> = acc.iter().map(Accumulator::value).collect();
    let deficit = (1.0 - stable_sum(probs.iter().copied())).max(0.0);
    let out = IntPmf::assemble(0, probs, deficit);
    if out.deficit() > eps {
        return Err(Error::ToleranceNotMet {
            deficit: out.deficit(),
            eps,
        });
    }
    Ok(out)
}

/// A finitely supported joint law of an integer vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointPmfRepr", into = "JointPmfRepr")]
pub struct JointPmf {
    dim: usize,
    atoms: BTreeMap<Vec<i64>, f64>,
}

#[derive(Serialize, Deserialize)]
struct JointPmfRepr {
    dim: usize,
    atoms: Vec<(Vec<i64>, f64)>,
}

impl From<JointPmf> for JointPmfRepr {
    fn from(j: JointPmf) -> Self {
        Self {
            dim: j.dim,
            atoms: j.atoms.into_iter().collect(),
        }
    }
}

impl TryFrom<JointPmfRepr> for JointPmf {
    type Error = Error;
    fn try_from(r: JointPmfRepr) -> Result<Self> {
        Self::new(r.dim, r.atoms)
    }
}

impl JointPmf {
    pub fn new(dim: usize, atoms: impl IntoIterator<Item = (Vec<i64>, f64)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        for (x, p) in atoms {
            if x.len() != dim {
                return Err(Error::LengthMismatch {
                    what: "atom",
                    got: x.len(),
                    expected: dim,
                });
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidPmf(format!(
                    "negative or non-finite mass {p}"
                )));
            }
            if p > 0.0 {
                *map.entry(x).or_insert(0.0) += p;
            }
        }
        if map.len() > JOINT_ATOM_CAP {
            return Err(Error::TooLarge {
                what: "joint support",
                size: map.len(),
                cap: JOINT_ATOM_CAP,
            });
        }
        let mass = stable_sum(map.values().copied());
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidPmf(format!("joint mass {mass} is not 1")));
        }
        Ok(Self { dim, atoms: map })
    }

    /// Independent coordinates with the given marginals.
    pub fn product(marginals: &[IntPmf]) -> Result<Self> {
        let mut atoms = vec![(Vec::new(), 1.0)];
        for m in marginals {
            let size = atoms.len() * m.probs().len();
            if size > JOINT_ATOM_CAP {
                return Err(Error::TooLarge {
                    what: "joint support",
                    size,
                    cap: JOINT_ATOM_CAP,
                });
            }
            atoms = atoms
                .into_iter()
                .flat_map(|(x, p)| {
                    m.iter().map(move |(v, q)| {
                        let mut y = x.clone();
                        y.push(v);
                        (y, p * q)
                    })
                })
                .collect();
        }
        Self::new(marginals.len(), atoms)
    }

    /// Law of `(h(0, Z_0..Z_{k-1}), ..., h(n-1, Z_{n-1}..Z_{n+k-2}))` for
    /// independent `Z_j ~ z[j]`; `z` needs `n + k - 1` entries.
    pub fn from_window_functions(
        z: &[IntPmf],
        k: usize,
        h: impl Fn(usize, &[i64]) -> i64,
    ) -> Result<Self> {
        if k == 0 || z.len() < k {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k as f64,
                reason: "window must be non-empty and fit in the inputs",
            });
        }
        let n = z.len() + 1 - k;
        let zs = Self::product(z)?;
        zs.map(n, |v| (0..n).map(|i| h(i, &v[i..i + k])).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[i64], f64)> + '_ {
        self.atoms.iter().map(|(x, &p)| (x.as_slice(), p))
    }

    /// Push-forward under a vector map into dimension `dim`.
    pub fn map(&self, dim: usize, f: impl Fn(&[i64]) -> Vec<i64>) -> Result<Self> {
        Self::new(dim, self.atoms().map(|(x, p)| (f(x), p)))
    }

    /// Law of a scalar function of the vector.
    pub fn law_of(&self, f: impl Fn(&[i64]) -> i64) -> IntPmf {
        let mut m: BTreeMap<i64, Accumulator> = BTreeMap::new();
        for (x, p) in self.atoms() {
            m.entry(f(x)).or_default().add(p);
        }
        let lo = *m.keys().next().expect("joint law is never empty");
        let hi = *m.keys().next_back().expect("joint law is never empty");
        let mut probs = vec![0.0; (hi - lo + 1) as usize];
        for (v, a) in m {
            probs[(v - lo) as usize] = a.value();
        }
        IntPmf::assemble(lo, probs, 0.0)
    }

    pub fn expect(&self, f: impl Fn(&[i64]) -> f64) -> f64 {
        stable_sum(self.atoms().map(|(x, p)| p * f(x)))
    }

    pub fn marginal(&self, i: usize) -> IntPmf {
        self.law_of(|x| x[i])
    }

    fn all_non_negative(&self) -> bool {
        self.atoms().all(|(x, _)| x.iter().all(|&v| v >= 0))
    }
}

/// Smoothing inequality `d_TV(X+Z, Y+Z) <= ½ ‖Δ²f_Z‖₁ ζ₂(X, Y)` for `Z`
/// independent of `X` and `Y` with equal means.
pub fn check_smoothing_inequality(x: &IntPmf, y: &IntPmf, z: &IntPmf) -> Result<InequalityCheck> {
    let zeta = zeta2(x, y, DEFAULT_MEAN_TOL)?;
    let tv = tv_distance(&convolve(x, z), &convolve(y, z));
    let norm = numeric_delta2_l1(z);
    let rhs = 0.5 * norm * zeta.value;
    // Missing mass of z moves its norm by at most 4·deficit.
    let error_bar = tv.error_bar
        + 0.5 * (norm + 4.0 * z.deficit()) * zeta.error_bar
        + 2.0 * z.deficit() * zeta.value;
    Ok(InequalityCheck::at_most(tv.value, rhs, error_bar))
}

/// `|d_TV(Z+X, Z+Y) - d_TV(W+X, W+Y)| <= 2 d_TV(X, Y) d_TV(Z, W)` for
/// `(X, Y)` independent of `(Z, W)`.
pub fn check_product_coupling(x: &IntPmf, y: &IntPmf, z: &IntPmf, w: &IntPmf) -> InequalityCheck {
    let a = tv_distance(&convolve(z, x), &convolve(z, y));
    let b = tv_distance(&convolve(w, x), &convolve(w, y));
    let xy = tv_distance(x, y);
    let zw = tv_distance(z, w);
    let lhs = (a.value - b.value).abs();
    let rhs = 2.0 * xy.value * zw.value;
    let error_bar =
        a.error_bar + b.error_bar + 2.0 * (xy.error_bar * zw.upper() + zw.error_bar * xy.value);
    InequalityCheck::at_most(lhs, rhs, error_bar)
}

/// `d_TV(X, Y) <= d_TV(X+W, Y+W) / (1 - 2 P(W != 0))` for `W` independent of
/// `X`, `Y` with `P(W != 0) < 1/2`.
pub fn check_shift_inequality(x: &IntPmf, y: &IntPmf, w: &IntPmf) -> Result<InequalityCheck> {
    let w0 = w.get(0);
    // P(W != 0) is at most 1 - w(0), with equality when nothing was truncated.
    let nonzero = 1.0 - w0;
    if !(nonzero < 0.5) {
        return Err(Error::InvalidParameter {
            name: "w(0)",
            value: w0,
            reason: "P(W != 0) must be below 1/2",
        });
    }
    let lhs = tv_distance(x, y);
    let shifted = tv_distance(&convolve(x, w), &convolve(y, w));
    let factor = 1.0 / (1.0 - 2.0 * nonzero);
    Ok(InequalityCheck::at_most(
        lhs.value,
        factor * shifted.value,
        lhs.error_bar + factor * shifted.error_bar,
    ))
}

/// Largest profile accepted by [`check_zeta2_cp_identity`].
pub const IDENTITY_MAX_TERMS: usize = 8;
pub const IDENTITY_MAX_SEVERITY_ATOMS: usize = 5;

/// `ζ₂(L(X_1 + ... + X_n), CP(λ, F)) = ½ sum (E X_i)²` for independent
/// summands and their compound Poisson approximation.
pub fn check_zeta2_cp_identity(profile: &IndepProfile, eps: f64) -> Result<InequalityCheck> {
    let n = profile.ps().len();
    if n > IDENTITY_MAX_TERMS {
        return Err(Error::TooLarge {
            what: "profile length",
            size: n,
            cap: IDENTITY_MAX_TERMS,
        });
    }
    if let Some(g) = profile
        .severities()
        .iter()
        .find(|g| g.probs().len() > IDENTITY_MAX_SEVERITY_ATOMS)
    {
        return Err(Error::TooLarge {
            what: "severity support",
            size: g.probs().len(),
            cap: IDENTITY_MAX_SEVERITY_ATOMS,
        });
    }
    let rhs = 0.5 * stable_sum(profile.sq_means().iter().copied());
    if profile.lambda() == 0.0 {
        return Ok(InequalityCheck::equal(0.0, rhs, 0.0, 1e-9));
    }
    let exact = exact_independent_sum_pmf(profile)?;
    let cp = compound_poisson_pmf(&profile.target()?, eps)?;
    let z = zeta2(&exact, &cp, 1e-8)?;
    Ok(InequalityCheck::equal(z.value, rhs, z.error_bar, 1e-9))
}

/// `ζ₂(L sum_{j=l}^{i} X_j, L(sum_{j=l}^{i-1} X_j + X_i^⊥))
///   <= sum_{j=i-k+1}^{i-1} (E X_i X_j + E X_i E X_j)`
/// for a `k`-dependent non-negative vector, `X_i^⊥` an independent copy of
/// `X_i`, and `l <= i - k + 1`.
///
/// The `k`-dependence that matters (`X_l + ... + X_{i-k}` independent of
/// `X_i`) is verified on the joint law first.
pub fn check_zeta2_coupling(
    joint: &JointPmf,
    l: usize,
    i: usize,
    k: usize,
) -> Result<InequalityCheck> {
    if i >= joint.dim() || k == 0 || l + k > i + 1 {
        return Err(Error::InvalidParameter {
            name: "window",
            value: i as f64,
            reason: "need i < dim, k >= 1 and l <= i - k + 1",
        });
    }
    if !joint.all_non_negative() {
        return Err(Error::Unsupported("coordinates must be non-negative"));
    }
    let far = |x: &[i64]| x[l..i + 1 - k].iter().sum::<i64>();
    let pair = joint.map(2, |x| vec![far(x), x[i]])?;
    let product = JointPmf::product(&[pair.marginal(0), pair.marginal(1)])?;
    let gap = product
        .atoms()
        .map(|(x, p)| {
            let q = pair.atoms.get(x).copied().unwrap_or(0.0);
            (p - q).abs()
        })
        .fold(0.0, f64::max);
    if gap > 1e-12 {
        return Err(Error::Unsupported(
            "the far partial sum is not independent of X_i",
        ));
    }

    let full = joint.law_of(|x| x[l..=i].iter().sum());
    let head = joint.law_of(|x| x[l..i].iter().sum());
    let swapped = convolve(&head, &joint.marginal(i));
    let z = zeta2(&full, &swapped, 1e-9)?;
    let mean_i = joint.expect(|x| x[i] as f64);
    let rhs =
        stable_sum((i + 1 - k..i).map(|j| {
            joint.expect(|x| (x[i] * x[j]) as f64) + mean_i * joint.expect(|x| x[j] as f64)
        }));
    Ok(InequalityCheck::at_most(z.value, rhs, z.error_bar))
}

/// `|ζ₂(X+Z, Y+Z) - ζ₂(X+W, Y+W)| <= E|(X-Y)(Z-W)|` for a non-negative joint
/// law of `(X, Y, Z, W)` with `E X = E Y`.
pub fn check_zeta2_four_coupling(joint: &JointPmf) -> Result<InequalityCheck> {
    if joint.dim() != 4 {
        return Err(Error::LengthMismatch {
            what: "joint dimension",
            got: joint.dim(),
            expected: 4,
        });
    }
    if !joint.all_non_negative() {
        return Err(Error::Unsupported("coordinates must be non-negative"));
    }
    let a = zeta2(
        &joint.law_of(|v| v[0] + v[2]),
        &joint.law_of(|v| v[1] + v[2]),
        DEFAULT_MEAN_TOL,
    )?;
    let b = zeta2(
        &joint.law_of(|v| v[0] + v[3]),
        &joint.law_of(|v| v[1] + v[3]),
        DEFAULT_MEAN_TOL,
    )?;
    let rhs = joint.expect(|v| ((v[0] - v[1]) * (v[2] - v[3])).abs() as f64);
    Ok(InequalityCheck::at_most(
        (a.value - b.value).abs(),
        rhs,
        a.error_bar + b.error_bar,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::{geometric_pmf, poisson_binomial_pmf};
    use approx::assert_abs_diff_eq;

    fn cfg(n: usize, k: usize, p: f64) -> RunsConfig {
        RunsConfig::new(n, k, p).unwrap()
    }

    #[test]
    fn run_count_small_cases() {
        let d = exact_run_count_pmf(&cfg(3, 2, 0.5), DEFAULT_RUN_CAP).unwrap();
        assert_eq!(d.probs(), &[5.0 / 8.0, 2.0 / 8.0, 1.0 / 8.0]);
        let d = exact_run_count_pmf(&cfg(4, 4, 0.3), DEFAULT_RUN_CAP).unwrap();
        assert_abs_diff_eq!(d.get(1), 0.3f64.powi(4), epsilon = 1e-16);
        assert_abs_diff_eq!(d.get(0), 1.0 - 0.3f64.powi(4), epsilon = 1e-16);
        let e = enumerate_run_count_pmf(&cfg(2, 2, 0.5)).unwrap();
        assert_eq!(e.probs(), &[0.75, 0.25]);
        let e = enumerate_run_count_pmf(&cfg(4, 2, 0.5)).unwrap();
        assert_abs_diff_eq!(e.mean(), 0.75, epsilon = 1e-15);
        assert!(exact_run_count_pmf(&cfg(600, 2, 0.5), DEFAULT_RUN_CAP).is_err());
        assert!(enumerate_run_count_pmf(&cfg(30, 2, 0.5)).is_err());
    }

    #[test]
    fn run_count_dp_matches_enumeration() {
        for (n, k, p) in [(10, 3, 0.2), (20, 3, 0.3), (12, 1, 0.4), (15, 5, 0.7)] {
            let c = cfg(n, k, p);
            let a = exact_run_count_pmf(&c, DEFAULT_RUN_CAP).unwrap();
            let b = enumerate_run_count_pmf(&c).unwrap();
            for x in 0..=(n as i64) {
                assert_abs_diff_eq!(a.get(x), b.get(x), epsilon = 1e-14);
            }
            assert_abs_diff_eq!(a.mean(), c.lambda_po(), epsilon = 1e-12);
        }
    }

    #[test]
    fn declumped_sum_agrees_with_run_count_when_clumps_are_short() {
        // With n = k the only clump starts at 1 and never needs truncating
        // unless it overruns trial n, which Y' allows.
        let c = cfg(3, 3, 0.4);
        let d = enumerate_declumped_sum_pmf(&c).unwrap();
        // Y'_1 = (1 - Z_0)(Z_1Z_2Z_3)(1 + Z_4 + Z_4Z_5).
        let (p, q) = (0.4f64, 0.6);
        let base = q * p.powi(3);
        assert_abs_diff_eq!(d.get(1), base * q, epsilon = 1e-15);
        assert_abs_diff_eq!(d.get(2), base * p * q, epsilon = 1e-15);
        assert_abs_diff_eq!(d.get(3), base * p * p, epsilon = 1e-15);
        let mean = c.starts() as f64 * p.powi(3) * (1.0 - p.powi(3));
        assert_abs_diff_eq!(d.mean(), mean, epsilon = 1e-15);
    }

    #[test]
    fn independent_sum_is_poisson_binomial() {
        let ps = vec![0.1, 0.2, 0.05];
        let a = exact_independent_sum_pmf(&IndepProfile::bernoulli(ps.clone()).unwrap()).unwrap();
        let b = poisson_binomial_pmf(&ps).unwrap();
        for x in 0..4 {
            assert_abs_diff_eq!(a.get(x), b.get(x), epsilon = 1e-16);
        }
    }

    #[test]
    fn direct_cp_matches_recursion() {
        let sev = IntPmf::from_weights(1, &[0.5, 0.3, 0.2]).unwrap();
        let spec = CompoundSpec::new(2.5, sev).unwrap();
        let a = direct_compound_poisson_pmf(&spec, 1e-13).unwrap();
        let b = compound_poisson_pmf(&spec, 1e-13).unwrap();
        for x in 0..60 {
            assert_abs_diff_eq!(a.get(x), b.get(x), epsilon = 1e-13);
        }
    }

    #[test]
    fn smoothing_examples() {
        let x = IntPmf::from_weights(0, &[0.5, 0.0, 0.5]).unwrap();
        let y = IntPmf::point_mass(1);
        let z = poisson_pmf(3.0, 1e-14).unwrap();
        let same = check_smoothing_inequality(&x, &x, &z).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert!(same.holds);
        let c = check_smoothing_inequality(&x, &y, &z).unwrap();
        assert!(c.holds && c.lhs > 0.0);
        // Point mass at zero: d_TV <= 2 ζ₂.
        let d = check_smoothing_inequality(&x, &y, &IntPmf::point_mass(0)).unwrap();
        assert_abs_diff_eq!(d.rhs, 2.0 * 0.5, epsilon = 1e-15);
        assert!(d.holds);
        assert!(check_smoothing_inequality(&x, &IntPmf::point_mass(0), &z).is_err());
    }

    #[test]
    fn product_coupling_examples() {
        let x = IntPmf::from_weights(0, &[0.2, 0.8]).unwrap();
        let y = IntPmf::from_weights(0, &[0.6, 0.1, 0.3]).unwrap();
        let z = geometric_pmf(0.3, 1e-14).unwrap();
        let c = check_product_coupling(&x, &y, &z, &z);
        assert_eq!(c.lhs, 0.0);
        let c = check_product_coupling(&x, &x, &z, &y);
        assert_eq!(c.lhs, 0.0);
        assert!(check_product_coupling(&x, &y, &z, &y).holds);
    }

    #[test]
    fn shift_examples() {
        let x = IntPmf::from_weights(0, &[0.2, 0.8]).unwrap();
        let y = IntPmf::from_weights(0, &[0.6, 0.1, 0.3]).unwrap();
        let c = check_shift_inequality(&x, &y, &IntPmf::point_mass(0)).unwrap();
        assert_eq!(c.lhs, c.rhs);
        let w = IntPmf::from_weights(0, &[0.7, 0.3]).unwrap();
        assert!(check_shift_inequality(&x, &y, &w).unwrap().holds);
        let w = IntPmf::from_weights(0, &[0.4, 0.6]).unwrap();
        assert!(check_shift_inequality(&x, &y, &w).is_err());
    }

    #[test]
    fn zeta2_cp_identity_examples() {
        let single = IndepProfile::bernoulli(vec![0.1]).unwrap();
        let c = check_zeta2_cp_identity(&single, 1e-14).unwrap();
        assert_abs_diff_eq!(c.lhs, 0.005, epsilon = 1e-9);
        assert!(c.holds);
        let three = IndepProfile::bernoulli(vec![0.1, 0.2, 0.15]).unwrap();
        assert!(check_zeta2_cp_identity(&three, 1e-14).unwrap().holds);
        let zero = IndepProfile::bernoulli(vec![0.0; 3]).unwrap();
        let c = check_zeta2_cp_identity(&zero, 1e-14).unwrap();
        assert!(c.holds && c.lhs == 0.0 && c.rhs == 0.0);
        let big = IndepProfile::bernoulli(vec![0.1; 9]).unwrap();
        assert!(check_zeta2_cp_identity(&big, 1e-14).is_err());
    }

    #[test]
    fn joint_pmf_basics() {
        assert!(JointPmf::new(2, vec![(vec![0, 1], 0.5)]).is_err());
        assert!(JointPmf::new(2, vec![(vec![0], 1.0)]).is_err());
        let j = JointPmf::new(
            2,
            vec![(vec![0, 1], 0.5), (vec![0, 1], 0.25), (vec![1, 1], 0.25)],
        )
        .unwrap();
        assert_eq!(j.atoms().count(), 2);
        assert_abs_diff_eq!(j.marginal(0).get(0), 0.75, epsilon = 1e-16);
        let s = serde_json::to_string(&j).unwrap();
        let back: JointPmf = serde_json::from_str(&s).unwrap();
        assert_eq!(back, j);
    }

    #[test]
    fn zeta2_coupling_cases() {
        let coin = IntPmf::bernoulli(0.5).unwrap();
        // Independent coordinates: both laws coincide.
        let ind = JointPmf::product(&[coin.clone(), coin.clone(), coin.clone()]).unwrap();
        let c = check_zeta2_coupling(&ind, 0, 2, 2).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.holds);

        // X_i = Z_i Z_{i+1} on three coin flips.
        let runs =
            JointPmf::from_window_functions(&[coin.clone(), coin.clone(), coin], 2, |_, z| {
                z[0] * z[1]
            })
            .unwrap();
        assert_eq!(runs.dim(), 2);
        let c = check_zeta2_coupling(&runs, 0, 1, 2).unwrap();
        assert!(c.holds);
        // E(X_0 X_1) = 1/8, E X = 1/4: rhs = 1/8 + 1/16.
        assert_abs_diff_eq!(c.rhs, 0.1875, epsilon = 1e-16);

        // Comonotone pair X_0 = X_1 ~ Bern(0.2).
        let como = JointPmf::new(2, vec![(vec![0, 0], 0.8), (vec![1, 1], 0.2)]).unwrap();
        let c = check_zeta2_coupling(&como, 0, 1, 2).unwrap();
        assert!(c.holds);
        // Not 1-dependent, so k = 1 must be refused.
        assert!(check_zeta2_coupling(&como, 0, 1, 1).is_err());
        assert!(check_zeta2_coupling(&como, 1, 1, 2).is_err());
    }

    #[test]
    fn four_coupling() {
        let j = JointPmf::new(
            4,
            vec![
                (vec![0, 1, 2, 0], 0.25),
                (vec![2, 1, 0, 1], 0.25),
                (vec![1, 0, 1, 1], 0.25),
                (vec![1, 2, 3, 2], 0.25),
            ],
        )
        .unwrap();
        let c = check_zeta2_four_coupling(&j).unwrap();
        assert!(c.holds, "{c:?}");
        let bad = JointPmf::new(3, vec![(vec![0, 0, 0], 1.0)]).unwrap();
        assert!(check_zeta2_four_coupling(&bad).is_err());
    }
}
