//! Total variation distance and the order-2 Zolotarev metric on integer pmfs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{stable_sum, IntPmf};

/// Default absolute tolerance for the equal-means precondition of [`zeta2`].
pub const DEFAULT_MEAN_TOL: f64 = 1e-9;

/// A metric value with a bound on the error introduced by truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub error_bar: f64,
}

impl MetricValue {
    pub fn upper(&self) -> f64 {
        self.value + self.error_bar
    }

    pub fn lower(&self) -> f64 {
        (self.value - self.error_bar).max(0.0)
    }
}

fn union_range(a: &IntPmf, b: &IntPmf) -> (i64, i64) {
    (
        a.offset().min(b.offset()),
        a.max_support().max(b.max_support()),
    )
}

/// `sum_k min(a(k), b(k))`, the mass a maximal coupling puts on the diagonal.
pub fn overlap(a: &IntPmf, b: &IntPmf) -> f64 {
    let (lo, hi) = union_range(a, b);
    stable_sum((lo..=hi).map(|x| a.get(x).min(b.get(x))))
}

/// Half the L1 distance between two pmfs.
///
/// The truncated tails can move the true value by at most half the summed
/// deficits. The result is cross-checked against `1 - overlap` (corrected
/// for the deficits) in debug builds.
pub fn tv_distance(a: &IntPmf, b: &IntPmf) -> MetricValue {
    let (lo, hi) = union_range(a, b);
    let value = 0.5 * stable_sum((lo..=hi).map(|x| (a.get(x) - b.get(x)).abs()));
    let error_bar = 0.5 * (a.deficit() + b.deficit());

    if cfg!(debug_assertions) {
        let coupled = 1.0 - overlap(a, b) - error_bar;
        let slack = 1e-12 + 8.0 * f64::EPSILON * (hi - lo + 1) as f64;
        assert!(
            (value - coupled).abs() <= slack,
            "maximal-coupling identity violated: half-L1 {value} vs 1 - overlap {coupled}"
        );
    }

    MetricValue {
        value,
        error_bar: error_bar.min((1.0 - value).max(0.0)),
    }
}

/// Zolotarev's ideal metric of order 2,
/// `sum_k | sum_(u >= k) (F_a(u) - F_b(u)) |`, for laws with equal means.
///
/// The inner sums equal `E(a - k)_+ - E(b - k)_+` and are accumulated in one
/// right-to-left sweep over the union support. Mass lost to truncation is
/// charged as `(deficit_a + deficit_b) * (width + 1)^2`.
pub fn zeta2(a: &IntPmf, b: &IntPmf, mean_tol: f64) -> Result<MetricValue> {
    let diff = a.mean() - b.mean();
    if !(diff.abs() <= mean_tol) {
        return Err(Error::MeanMismatch {
            diff: diff.abs(),
            tol: mean_tol,
        });
    }
    let (lo, hi) = union_range(a, b);
    // survival(k) = sum_(x > k) (a - b)(x); excess(k) = sum_(u >= k) survival(u)
    let mut survival = 0.0;
    let mut excess = 0.0;
    let mut terms = Vec::with_capacity((hi - lo + 1) as usize);
    for k in (lo..hi).rev() {
        survival += a.get(k + 1) - b.get(k + 1);
        excess += survival;
        terms.push(excess.abs());
    }
    let width = (hi - lo + 1) as f64;
    Ok(MetricValue {
        value: stable_sum(terms),
        error_bar: (a.deficit() + b.deficit()) * width * width,
    })
}
