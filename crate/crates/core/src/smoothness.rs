//! Smoothness factors `sup |Δf|` and `sum |Δ²f|` of approximating pmfs.
//!
//! For Poisson laws both have closed forms built on the two real roots
//! `λ ± sqrt(λ + 1/4) + 1/2` of the continuous extension of `Δ²f`. For
//! anything else they are computed directly from the (truncated) pmf.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{ln_factorial, stable_sum, IntPmf};

/// How a smoothness value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessMethod {
    Numeric,
    ExactPoisson,
    Crude,
    NormalHeuristic,
    /// Supplied by the caller without provenance.
    Supplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub delta1_sup: f64,
    pub delta2_l1: f64,
    pub method: SmoothnessMethod,
}

impl SmoothnessReport {
    pub fn numeric(a: &IntPmf) -> Self {
        Self {
            delta1_sup: numeric_delta1_sup(a),
            delta2_l1: numeric_delta2_l1(a),
            method: SmoothnessMethod::Numeric,
        }
    }

    pub fn exact_poisson(lambda: f64) -> Result<Self> {
        Ok(Self {
            delta1_sup: poisson_delta1_sup_exact(lambda)?,
            delta2_l1: poisson_delta2_l1_exact(lambda)?,
            method: SmoothnessMethod::ExactPoisson,
        })
    }

    /// Closed-form upper bounds valid for every `λ > 0`.
    pub fn crude_poisson(lambda: f64) -> Result<Self> {
        let delta2_l1 = poisson_delta2_l1_crude(lambda)?;
        let delta1_sup = if lambda >= 2.0 {
            1.0 / (3.0 * lambda)
        } else {
            (-lambda).exp()
        };
        Ok(Self {
            delta1_sup,
            delta2_l1,
            method: SmoothnessMethod::Crude,
        })
    }

    pub fn normal_heuristic(lambda: f64, second_raw_severity: f64) -> Result<Self> {
        let delta2_l1 = normal_heuristic_delta2(lambda, second_raw_severity)?;
        Ok(Self {
            delta1_sup: delta2_l1 / 4.0,
            delta2_l1,
            method: SmoothnessMethod::NormalHeuristic,
        })
    }
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: x,
            reason: "must be positive and finite",
        })
    }
}

/// `max_k |a(k) - a(k-1)|` over the support extended by one on each side.
pub fn numeric_delta1_sup(a: &IntPmf) -> f64 {
    (a.offset()..=a.max_support() + 1)
        .map(|k| (a.get(k) - a.get(k - 1)).abs())
        .fold(0.0, f64::max)
}

/// `sum_k |a(k) - 2 a(k-1) + a(k-2)|` over the support extended by two.
pub fn numeric_delta2_l1(a: &IntPmf) -> f64 {
    stable_sum(
        (a.offset()..=a.max_support() + 2)
            .map(|k| (a.get(k) - 2.0 * a.get(k - 1) + a.get(k - 2)).abs()),
    )
}

/// `Δf(k) = e^-λ λ^k / k! (1 - k/λ)` for `k >= 0`.
fn poisson_delta1_at(lambda: f64, k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let ku = k as u64;
    let ln_w = -lambda + k as f64 * lambda.ln() - ln_factorial(ku);
    ln_w.exp() * (1.0 - k as f64 / lambda)
}

/// Floor of `root`. Within 1e-9 of an integer the floor is re-decided among
/// the neighbouring candidates by comparing `Δf` directly.
fn robust_floor(root: f64, lambda: f64, prefer_max: bool) -> i64 {
    let m = root.floor() as i64;
    if (root - root.round()).abs() > 1e-9 {
        return m;
    }
    let mut best = m.max(0);
    let mut best_val = poisson_delta1_at(lambda, best);
    for cand in [m - 1, m + 1] {
        if cand < 0 {
            continue;
        }
        let v = poisson_delta1_at(lambda, cand);
        let better = if prefer_max {
            v > best_val
        } else {
            v < best_val
        };
        if better {
            best = cand;
            best_val = v;
        }
    }
    best
}

/// `k_λ = ⌊λ - sqrt(λ + 1/4) + 1/2⌋`, where `Δf_Po(λ)` peaks.
pub fn poisson_k_lambda(lambda: f64) -> i64 {
    robust_floor(lambda - (lambda + 0.25).sqrt() + 0.5, lambda, true)
}

/// `u_λ = ⌊λ + sqrt(λ + 1/4) + 1/2⌋`, where `Δf_Po(λ)` bottoms out.
pub fn poisson_u_lambda(lambda: f64) -> i64 {
    robust_floor(lambda + (lambda + 0.25).sqrt() + 0.5, lambda, false)
}

/// Exact `sup_k |Δf_Po(λ)(k)| = Δf(k_λ)`.
pub fn poisson_delta1_sup_exact(lambda: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    Ok(poisson_delta1_at(lambda, poisson_k_lambda(lambda)))
}

/// Exact `sum_k |Δ²f_Po(λ)(k)| = 2 (Δf(k_λ) - Δf(u_λ))`.
pub fn poisson_delta2_l1_exact(lambda: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    let k = poisson_k_lambda(lambda);
    let u = poisson_u_lambda(lambda);
    Ok(2.0 * (poisson_delta1_at(lambda, k) - poisson_delta1_at(lambda, u)))
}

/// `min(4, 4 (1 - e^{-3λ}) / (3λ))`.
pub fn poisson_delta2_l1_crude(lambda: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    let x = 3.0 * lambda;
    // -expm1(-x) / x keeps full precision as x -> 0.
    Ok((4.0 * (-(-x).exp_m1()) / x).min(4.0))
}

/// Normal-approximation guess `4 / (λ E(W²) sqrt(2πe))` for a compound
/// Poisson law. Heuristic only: never fed into a bound automatically.
pub fn normal_heuristic_delta2(lambda: f64, second_raw_severity: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    check_positive("second_raw_severity", second_raw_severity)?;
    Ok(4.0 / (lambda * second_raw_severity * (2.0 * PI * E).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::poisson_pmf;
    use approx::assert_abs_diff_eq;

    #[test]
    fn numeric_on_point_mass_and_uniform() {
        let d = IntPmf::point_mass(0);
        assert_eq!(numeric_delta1_sup(&d), 1.0);
        assert_eq!(numeric_delta2_l1(&d), 4.0);

        let u = IntPmf::from_weights(0, &[1.0; 10]).unwrap();
        assert_abs_diff_eq!(numeric_delta1_sup(&u), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn numeric_on_poisson_one() {
        let p = poisson_pmf(1.0, 1e-15).unwrap();
        let e1 = (-1.0f64).exp();
        assert_abs_diff_eq!(numeric_delta1_sup(&p), e1, epsilon = 1e-12);
        assert_abs_diff_eq!(numeric_delta2_l1(&p), 3.0 * e1, epsilon = 1e-10);
    }

    #[test]
    fn exact_small_lambda() {
        for lambda in [0.1, 0.5, 1.0, 2.0] {
            let v = poisson_delta1_sup_exact(lambda).unwrap();
            assert_abs_diff_eq!(v, (-lambda).exp(), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(
            poisson_delta2_l1_exact(1.0).unwrap(),
            3.0 * (-1.0f64).exp(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn exact_lambda_ten() {
        assert_eq!(poisson_k_lambda(10.0), 7);
        let expected = (-10.0f64).exp() * 1e7 / 5040.0 * 0.3;
        let v = poisson_delta1_sup_exact(10.0).unwrap();
        assert_abs_diff_eq!(v, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.0270238, epsilon = 1e-7);
        let p = poisson_pmf(10.0, 1e-14).unwrap();
        assert_abs_diff_eq!(numeric_delta1_sup(&p), v, epsilon = 1e-12);
    }

    #[test]
    fn floor_guard_at_integer_roots() {
        // λ = 2 puts the lower root exactly at 1; both neighbours give e^-2.
        let k = poisson_k_lambda(2.0);
        assert!(k == 0 || k == 1);
        // λ = 3 - sqrt(3) puts the upper root exactly at 3.
        let lambda = 3.0 - 3f64.sqrt();
        let p = poisson_pmf(lambda, 1e-15).unwrap();
        assert_abs_diff_eq!(
            poisson_delta2_l1_exact(lambda).unwrap(),
            numeric_delta2_l1(&p),
            epsilon = 1e-12
        );
    }

    #[test]
    fn crude_bound() {
        assert_abs_diff_eq!(poisson_delta2_l1_crude(1e-12).unwrap(), 4.0, epsilon = 1e-9);
        let expected = 4.0 * (1.0 - (-3.0f64).exp()) / 3.0;
        assert_abs_diff_eq!(
            poisson_delta2_l1_crude(1.0).unwrap(),
            expected,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(expected, 1.266951, epsilon = 1e-6);
        for lambda in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0] {
            assert!(
                poisson_delta2_l1_crude(lambda).unwrap()
                    >= poisson_delta2_l1_exact(lambda).unwrap()
            );
        }
    }

    #[test]
    fn normal_heuristic_matches_table_column() {
        assert_abs_diff_eq!(
            normal_heuristic_delta2(100.0, 1.875).unwrap(),
            0.005162,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            normal_heuristic_delta2(1.0, 1.875).unwrap(),
            0.516204,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            normal_heuristic_delta2(5.0, 6.0).unwrap(),
            0.032263,
            epsilon = 1e-6
        );
        assert!(normal_heuristic_delta2(0.0, 1.0).is_err());
        assert!(normal_heuristic_delta2(1.0, -1.0).is_err());
    }

    #[test]
    fn bad_lambda_is_rejected() {
        assert!(poisson_delta1_sup_exact(0.0).is_err());
        assert!(poisson_delta2_l1_exact(-1.0).is_err());
        assert!(poisson_delta2_l1_crude(f64::NAN).is_err());
    }

    #[test]
    fn reports_carry_methods() {
        let r = SmoothnessReport::exact_poisson(1.0).unwrap();
        assert_eq!(r.method, SmoothnessMethod::ExactPoisson);
        assert!(r.delta2_l1 <= 4.0 * r.delta1_sup + 1e-12);
        let c = SmoothnessReport::crude_poisson(1.0).unwrap();
        assert!(c.delta2_l1 >= r.delta2_l1);
        let h = SmoothnessReport::normal_heuristic(100.0, 1.875).unwrap();
        assert_eq!(h.method, SmoothnessMethod::NormalHeuristic);
    }
}
