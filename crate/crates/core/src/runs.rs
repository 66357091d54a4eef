//! Poisson and compound Poisson bounds for the number of overlapping success
//! runs of length `k` in `n` i.i.d. Bernoulli(`p`) trials.
//!
//! The Poisson route treats the run indicators `X_i = Z_i ⋯ Z_{i+k-1}`
//! directly. The compound route first "declumps": `Y'_i` is the size of the
//! clump of overlapping runs starting at `i`, truncated at `k`, and the sum of
//! the `Y'_i` is approximated by `CP(λ, F_k)` with `F_k` the geometric law
//! truncated at `k`. Swapping `F_k` for the untruncated geometric law gives a
//! bound against the Pólya–Aeppli law.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::bounds::{scaled, shift_factor, BoundReport, LocalDepProfile, Norm, PairTable};
use crate::error::{Error, Result};
use crate::pmf::{
    compound_poisson_pmf, truncated_geometric_pmf, CompoundSpec, IntPmf, DEFAULT_EPS,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RunsConfigRepr")]
pub struct RunsConfig {
    n: usize,
    k: usize,
    p: f64,
}

#[derive(Deserialize)]
struct RunsConfigRepr {
    n: usize,
    k: usize,
    p: f64,
}

impl TryFrom<RunsConfigRepr> for RunsConfig {
    type Error = Error;
    fn try_from(r: RunsConfigRepr) -> Result<Self> {
        Self::new(r.n, r.k, r.p)
    }
}

impl RunsConfig {
    pub fn new(n: usize, k: usize, p: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k as f64,
                reason: "run length must satisfy 1 <= k <= n",
            });
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "must lie in (0, 1)",
            });
        }
        Ok(Self { n, k, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// Number of possible run starts, `n - k + 1`.
    pub fn starts(&self) -> usize {
        self.n - self.k + 1
    }

    fn pk(&self) -> f64 {
        self.p.powi(self.k as i32)
    }

    /// Expected number of runs, `(n - k + 1) p^k`.
    pub fn lambda_po(&self) -> f64 {
        self.starts() as f64 * self.pk()
    }

    /// Expected number of clumps, `(n - k + 1) q p^k`.
    pub fn lambda_cp(&self) -> f64 {
        self.starts() as f64 * self.q() * self.pk()
    }

    fn require_declumping(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Unsupported("declumping needs run length k >= 2"));
        }
        Ok(())
    }

    /// The run indicators as a `k`-dependent profile.
    pub fn indicator_profile(&self) -> LocalDepProfile {
        let (n, k, p) = (self.starts(), self.k, self.p);
        let pk = self.pk();
        let mut cross = PairTable::default();
        let mut cov = PairTable::default();
        for i in 0..n {
            for d in 1..k.min(i + 1) {
                let both = p.powi((k + d) as i32);
                cross.insert(i, i - d, both);
                cov.insert(i, i - d, both - pk * pk);
            }
        }
        LocalDepProfile {
            k,
            ps: vec![pk; n],
            means: vec![pk; n],
            sq_means: vec![pk * pk; n],
            joint_nonzero: cross.clone(),
            cross_moments: cross,
            covariances: cov,
            severities: vec![IntPmf::point_mass(1); n],
        }
    }

    /// The truncated clump sizes `Y'_i` as a `2k`-dependent profile.
    pub fn declumped_profile(&self) -> Result<LocalDepProfile> {
        self.require_declumping()?;
        let (n, k, p, q) = (self.starts(), self.k, self.p, self.q());
        let pk = self.pk();
        let mean = pk * (1.0 - pk);
        let mut cross = PairTable::default();
        let mut joint = PairTable::default();
        let mut cov = PairTable::default();
        for i in 0..n {
            for d in 1..(2 * k).min(i + 1) {
                let (both, prod) = if d <= k {
                    // A clump cannot start inside the previous one's first run.
                    (0.0, 0.0)
                } else {
                    let e = pk * pk * (1.0 - p.powi((d - k) as i32)) * (1.0 - pk);
                    (q * q * pk * pk, e)
                };
                joint.insert(i, i - d, both);
                cross.insert(i, i - d, prod);
                cov.insert(i, i - d, prod - mean * mean);
            }
        }
        let severity = truncated_geometric_pmf(p, k)?;
        Ok(LocalDepProfile {
            k: 2 * k,
            ps: vec![q * pk; n],
            means: vec![mean; n],
            sq_means: vec![mean * mean; n],
            cross_moments: cross,
            joint_nonzero: joint,
            covariances: cov,
            severities: vec![severity; n],
        })
    }

    /// The compound Poisson target `CP((n-k+1) q p^k, F_k)`.
    pub fn cp_target(&self) -> Result<CompoundSpec> {
        self.require_declumping()?;
        CompoundSpec::new(self.lambda_cp(), truncated_geometric_pmf(self.p, self.k)?)
    }
}

fn gate(report: &mut BoundReport, m: f64) {
    report.components.insert("m".to_string(), m);
    if m >= LN_2 {
        report.invalidate(format!("m = {m} is not below ln 2"));
    }
}

/// Poisson bound for the run count:
/// `4(λ²p²/q)(1 + qkp^{k-1}/λ)(1 + qkp^{k-1}) + λp·norm / (2q(1 - 2(1 - e^-m)))`
/// with `λ = (n-k+1)p^k`, `m = (3k-2)p^k` and the exact Poisson norm.
pub fn runs_po_bound(cfg: &RunsConfig) -> Result<BoundReport> {
    let (k, p, q) = (cfg.k as f64, cfg.p, cfg.q());
    let lambda = cfg.lambda_po();
    let norm = Norm::exact_poisson(lambda)?;
    let m = (3.0 * k - 2.0) * cfg.pk();
    let t = q * k * p.powi(cfg.k as i32 - 1);
    let c_term = 4.0 * lambda * lambda * p * p / q * (1.0 + t / lambda) * (1.0 + t);
    let smooth_term = scaled(lambda * p * norm.value / (2.0 * q), shift_factor(m));
    let mut r = BoundReport::new(c_term, smooth_term, norm, lambda);
    gate(&mut r, m);
    Ok(r)
}

/// `P(Y != Y') <= max(0, n-2k+1) q p^{2k} + 2 p^{k+1}`: the cost of
/// truncating clumps at `k` and letting the last ones run past trial `n`.
pub fn declumping_bound(cfg: &RunsConfig) -> f64 {
    let blocks = (cfg.n as f64 - 2.0 * cfg.k as f64 + 1.0).max(0.0);
    blocks * cfg.q() * cfg.pk() * cfg.pk() + 2.0 * cfg.p.powi(cfg.k as i32 + 1)
}

/// Compound Poisson bound for the declumped sum against `CP(λ, F_k)`:
/// `(1 + 2/(3λ))(6λkqp^k)² + norm/4 / (1 - 2(1 - e^-m)) · (λ/q)(6k-3)p^k`
/// with `λ = (n-k+1)qp^k` and `m = (6k-2)qp^k`.
pub fn runs_cp_bound(cfg: &RunsConfig, norm: Norm) -> Result<BoundReport> {
    cfg.require_declumping()?;
    let (k, q, pk) = (cfg.k as f64, cfg.q(), cfg.pk());
    let lambda = cfg.lambda_cp();
    let m = (6.0 * k - 2.0) * q * pk;
    let c_term = (1.0 + 2.0 / (3.0 * lambda)) * (6.0 * lambda * k * q * pk).powi(2);
    let smooth_term = scaled(
        0.25 * norm.value * lambda / q * (6.0 * k - 3.0) * pk,
        shift_factor(m),
    );
    let mut r = BoundReport::new(c_term, smooth_term, norm, lambda);
    gate(&mut r, m);
    Ok(r)
}

/// The sharper variant that exploits negative quadrant dependence of the
/// clump sizes:
/// `12(1 + 1/(kq) + 2q²/λ)(λkp^k)² + norm/2 / (1 - 2(1 - e^-m)) · (1 + (1+p)/(2kq))(λ/q)kp^k`.
///
/// Its smooth term is asymptotically about a third of [`runs_cp_bound`]'s;
/// the c term can be larger, so the total is not smaller everywhere.
pub fn runs_cp_bound_improved(cfg: &RunsConfig, norm: Norm) -> Result<BoundReport> {
    cfg.require_declumping()?;
    let (k, p, q, pk) = (cfg.k as f64, cfg.p, cfg.q(), cfg.pk());
    let lambda = cfg.lambda_cp();
    let m = (6.0 * k - 2.0) * q * pk;
    let c_term = 12.0 * (1.0 + 1.0 / (k * q) + 2.0 * q * q / lambda) * (lambda * k * pk).powi(2);
    let smooth_term = scaled(
        0.5 * norm.value * (1.0 + (1.0 + p) / (2.0 * k * q)) * lambda / q * k * pk,
        shift_factor(m),
    );
    let mut r = BoundReport::new(c_term, smooth_term, norm, lambda);
    r.notes
        .push("relies on negative quadrant dependence of the clump sizes".to_string());
    gate(&mut r, m);
    Ok(r)
}

/// `λ p^k`, bounding `d_TV(CP(λ, F_k), CP(λ, Geom(p)))` through
/// `λ d_TV(F_k, Geom(p))`.
pub fn compounding_swap_bound(lambda: f64, cfg: &RunsConfig) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be positive and finite",
        });
    }
    Ok(lambda * cfg.pk())
}

/// Numeric norm of `CP((n-k+1)qp^k, F_k)`, truncated at `eps`.
pub fn runs_cp_norm(cfg: &RunsConfig, eps: f64) -> Result<Norm> {
    Ok(Norm::numeric(&compound_poisson_pmf(
        &cfg.cp_target()?,
        eps,
    )?))
}

/// Bound on the distance between the run count and the Pólya–Aeppli law
/// `PA((n-k+1)qp^k, p)`: declumping + compound bound + compounding swap.
pub fn total_pa_bound(cfg: &RunsConfig) -> Result<BoundReport> {
    total_pa_bound_with_norm(cfg, runs_cp_norm(cfg, DEFAULT_EPS)?)
}

/// As [`total_pa_bound`] with the norm of `CP(λ, F_k)` supplied.
pub fn total_pa_bound_with_norm(cfg: &RunsConfig, norm: Norm) -> Result<BoundReport> {
    let cp = runs_cp_bound(cfg, norm)?;
    let declump = declumping_bound(cfg);
    let swap = compounding_swap_bound(cp.lambda, cfg)?;
    let mut r = BoundReport::new(declump + cp.c_term + swap, cp.smooth_term, norm, cp.lambda);
    r.valid = cp.valid;
    r.notes = cp.notes;
    r.components = cp.components;
    r.components.insert("declumping".to_string(), declump);
    r.components.insert("cp_c_term".to_string(), cp.c_term);
    r.components
        .insert("cp_smooth_term".to_string(), cp.smooth_term);
    r.components.insert("compounding_swap".to_string(), swap);
    Ok(r)
}

/// Asymptotic Stein–Chen comparators. Informational only: these are rates
/// up to asymptotic equivalence, not certified bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinChenComparators {
    /// `2p/q`, for `p <= 1/3`.
    pub ub_cs_po: Option<f64>,
    /// `6q/(1-5p) k p^k` for `p < 1/5`, else the log form for `p <= 1/3`.
    pub ub_cs_cp: Option<f64>,
    pub notes: Vec<String>,
}

/// `log⁺(λq(1-2p)) / (q²(1-2p)) · 6kp^k` with `λ = (n-k+1)qp^k`.
pub fn stein_chen_cp_log_form(cfg: &RunsConfig) -> f64 {
    let (k, p, q) = (cfg.k as f64, cfg.p, cfg.q());
    let x = cfg.lambda_cp() * q * (1.0 - 2.0 * p);
    let log_plus = if x > 1.0 { x.ln() } else { 0.0 };
    log_plus / (q * q * (1.0 - 2.0 * p)) * 6.0 * k * cfg.pk()
}

/// `6q/(1-5p) · kp^k`.
pub fn stein_chen_cp_linear_form(cfg: &RunsConfig) -> f64 {
    6.0 * cfg.q() / (1.0 - 5.0 * cfg.p) * cfg.k as f64 * cfg.pk()
}

pub fn stein_chen_comparators(cfg: &RunsConfig) -> SteinChenComparators {
    let p = cfg.p;
    let ub_cs_po = (p <= 1.0 / 3.0).then(|| 2.0 * p / cfg.q());
    // The linear form blows up at p = 1/5 itself, where the log form applies.
    let ub_cs_cp = if p < 0.2 {
        Some(stein_chen_cp_linear_form(cfg))
    } else if p <= 1.0 / 3.0 {
        Some(stein_chen_cp_log_form(cfg))
    } else {
        None
    };
    SteinChenComparators {
        ub_cs_po,
        ub_cs_cp,
        notes: vec!["asymptotic-only, not a certified bound".to_string()],
    }
}
