//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed even when all
//! criteria pass; the process exits non-zero if any criterion fails.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cpx_core::metrics::overlap;
use cpx_core::oracle::exact_run_count_pmf;
use cpx_core::pmf::{poisson_pmf, polya_aeppli_pmf, DEFAULT_EPS};
use cpx_core::smoothness::{
    numeric_delta1_sup, numeric_delta2_l1, poisson_delta1_sup_exact, poisson_delta2_l1_exact,
};
use cpx_core::tv_distance;
use cpx_core::verify::{
    bernoulli_dominance_suite, four_coupling_suite, integer_dominance_suite,
    product_coupling_suite, recursion_agreement_suite, run_count_agreement_suite,
    runs_dominance_suite, runs_grid, shift_suite, smoothing_suite, table1, zeta2_coupling_suite,
    zeta2_cp_identity_suite, CheckSummary, BERNOULLI_PROFILES, DEFAULT_SEED, IDENTITY_CASES,
    INTEGER_PROFILES, LEMMA_CASES, RECURSION_CASES,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn summaries_outcome(checks: &[CheckSummary], elapsed: Duration, limit: Duration) -> Outcome {
    let mut parts: Vec<String> = checks
        .iter()
        .map(|c| {
            let skipped = if c.skipped > 0 {
                format!(", {} skipped", c.skipped)
            } else {
                String::new()
            };
            format!(
                "{}: {}/{} (max ratio {:.3}{skipped})",
                c.name,
                c.cases - c.failures,
                c.cases,
                c.max_ratio
            )
        })
        .collect();
    for c in checks {
        parts.extend(c.failed_cases.iter().map(|f| format!("FAILED {f}")));
    }
    let in_time = elapsed <= limit;
    parts.push(format!(
        "{:.1} s of {} s allowed",
        elapsed.as_secs_f64(),
        limit.as_secs()
    ));
    Outcome {
        passed: in_time && checks.iter().all(|c| c.passed() && c.cases > 0),
        detail: parts.join("; "),
    }
}

fn criterion_table1() -> Outcome {
    let start = Instant::now();
    let entries = match table1(DEFAULT_EPS) {
        Ok(e) => e,
        Err(e) => {
            return Outcome {
                passed: false,
                detail: e.to_string(),
            }
        }
    };
    let elapsed = start.elapsed();
    let norm_ok = entries
        .iter()
        .filter(|e| (e.norm - e.reference_norm).abs() <= e.norm_tol)
        .count();
    let approx_ok = entries
        .iter()
        .filter(|e| (e.approx - e.reference_approx).abs() <= e.approx_tol)
        .count();
    let worst = entries
        .iter()
        .map(|e| (e.norm - e.reference_norm).abs() / e.norm_tol)
        .fold(0.0, f64::max);
    let mut detail = format!(
        "norm {norm_ok}/12, heuristic {approx_ok}/12, worst norm deviation {worst:.2} of tolerance, {:.1} s",
        elapsed.as_secs_f64()
    );
    for e in entries.iter().filter(|e| !e.holds()) {
        detail.push_str(&format!(
            "; FAILED λ={} p={}: norm {:.6} vs {}, approx {:.6} vs {}",
            e.lambda, e.p, e.norm, e.reference_norm, e.approx, e.reference_approx
        ));
    }
    Outcome {
        passed: norm_ok == 12 && approx_ok == 12 && elapsed <= Duration::from_secs(60),
        detail,
    }
}

fn criterion_poisson_norms() -> Outcome {
    let grid = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0];
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for &l in &grid {
        let po = poisson_pmf(l, 1e-14).expect("valid rate");
        let d1 = poisson_delta1_sup_exact(l).expect("valid rate");
        let d2 = poisson_delta2_l1_exact(l).expect("valid rate");
        let e1 = (d1 - numeric_delta1_sup(&po)).abs();
        let e2 = (d2 - numeric_delta2_l1(&po)).abs();
        worst = worst.max(e1).max(e2);
        if e1 > 1e-10 || e2 > 1e-10 {
            failures.push(format!(
                "λ={l}: exact vs numeric differ by {:e}",
                e1.max(e2)
            ));
        }
        if d2 > 4.0 * d1 {
            failures.push(format!("λ={l}: ‖Δ²‖₁ {d2} > 4‖Δ‖∞ {}", 4.0 * d1));
        }
    }
    for l in [0.5, 1.0, 2.0] {
        let d1 = poisson_delta1_sup_exact(l).expect("valid rate");
        if (d1 - (-l).exp()).abs() > 2.0 * f64::EPSILON * d1 {
            failures.push(format!("λ={l}: ‖Δ‖∞ {d1} is not e^-λ"));
        }
    }
    let target = 4.0 / (2.0 * PI * E).sqrt();
    let scaled = 1e4 * poisson_delta2_l1_exact(1e4).expect("valid rate");
    let rel = (scaled - target).abs() / target;
    if rel > 0.05 {
        failures.push(format!(
            "λ·‖Δ²‖₁ at 1e4 is {scaled}, {:.2}% from {target}",
            100.0 * rel
        ));
    }
    let mut detail = format!(
        "max exact-vs-numeric gap {worst:e} on 8 rates; λ·‖Δ²‖₁ at λ=1e4 = {scaled:.6} ({:.3}% from {target:.6})",
        100.0 * rel
    );
    for f in &failures {
        detail.push_str(&format!("; FAILED {f}"));
    }
    Outcome {
        passed: failures.is_empty(),
        detail,
    }
}

fn criterion_independent() -> Outcome {
    let start = Instant::now();
    let checks = [
        bernoulli_dominance_suite(DEFAULT_SEED, BERNOULLI_PROFILES, DEFAULT_EPS),
        integer_dominance_suite(DEFAULT_SEED, INTEGER_PROFILES, DEFAULT_EPS),
    ];
    let mut o = summaries_outcome(&checks, start.elapsed(), Duration::from_secs(30));
    o.passed &= checks[0].cases == BERNOULLI_PROFILES && checks[1].cases == INTEGER_PROFILES;
    o
}

fn criterion_runs() -> Outcome {
    let start = Instant::now();
    let (po, pa) = runs_dominance_suite(200, DEFAULT_EPS);
    summaries_outcome(&[po, pa], start.elapsed(), Duration::from_secs(300))
}

fn criterion_lemmas() -> Outcome {
    let start = Instant::now();
    let mut checks = vec![
        smoothing_suite(DEFAULT_SEED, LEMMA_CASES, DEFAULT_EPS).expect("Poisson smoother"),
        product_coupling_suite(DEFAULT_SEED, LEMMA_CASES),
        shift_suite(DEFAULT_SEED, LEMMA_CASES),
        zeta2_cp_identity_suite(DEFAULT_SEED, IDENTITY_CASES, 1e-14),
        zeta2_coupling_suite().expect("enumerated joint laws"),
    ];
    let counts_ok =
        checks[..3].iter().all(|c| c.cases == LEMMA_CASES) && checks[3].cases == IDENTITY_CASES;
    // Also exercised, beyond the criterion: the four-variable ζ₂ coupling.
    checks.push(four_coupling_suite(DEFAULT_SEED, LEMMA_CASES));
    let mut o = summaries_outcome(&checks, start.elapsed(), Duration::from_secs(300));
    o.passed &= counts_ok;
    o
}

fn criterion_oracles() -> Outcome {
    let start = Instant::now();
    let checks = [
        run_count_agreement_suite(),
        recursion_agreement_suite(DEFAULT_SEED, RECURSION_CASES),
    ];
    // Explicit half-L1 vs one-minus-overlap comparison over the runs grid
    // (debug builds also assert it inside every distance evaluation).
    let mut gap: f64 = 0.0;
    let mut compared = 0;
    for c in runs_grid(60) {
        let exact = exact_run_count_pmf(&c, 60).expect("within cap");
        for target in [
            poisson_pmf(c.lambda_po(), DEFAULT_EPS).expect("valid"),
            polya_aeppli_pmf(c.lambda_cp(), c.p(), DEFAULT_EPS).expect("valid"),
        ] {
            let d = tv_distance(&exact, &target);
            let via_overlap = 1.0 - overlap(&exact, &target) - d.error_bar;
            gap = gap.max((d.value - via_overlap).abs());
            compared += 1;
        }
    }
    let mut o = summaries_outcome(&checks, start.elapsed(), Duration::from_secs(300));
    o.detail.push_str(&format!(
        "; half-L1 vs 1-overlap max gap {gap:e} over {compared} pairs"
    ));
    o.passed &= gap <= 1e-12;
    o
}

fn criterion_trend() -> Outcome {
    // The asymptotic claims are not finite statements; what is checked is
    // the trend λ·‖Δ²f_Po(λ)‖₁ → 4/sqrt(2πe). The exact value wobbles with
    // the lattice, so the gap is held under an envelope c/sqrt(λ) rather
    // than required to shrink monotonically.
    let target = 4.0 / (2.0 * PI * E).sqrt();
    let rates: Vec<f64> = (0..=16)
        .map(|j| 10f64.powf(1.0 + 0.25 * j as f64))
        .collect();
    let scaled_gaps: Vec<f64> = rates
        .iter()
        .map(|&l| {
            let gap = (l * poisson_delta2_l1_exact(l).expect("valid rate") - target).abs();
            gap * l.sqrt()
        })
        .collect();
    let envelope = scaled_gaps.iter().copied().fold(0.0, f64::max);
    let last_gap = scaled_gaps[scaled_gaps.len() - 1] / rates[rates.len() - 1].sqrt();
    Outcome {
        passed: envelope <= 0.2 && last_gap < 1e-3 * target,
        detail: format!(
            "sqrt(λ)·|λ·‖Δ²‖₁ - {target:.6}| ≤ {envelope:.3e} for λ in [1e1, 1e5]; gap at 1e5 = {last_gap:.2e}; rate claims are not asserted as finite statements"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 reference norm table", criterion_table1),
        ("2 Poisson norm closed forms", criterion_poisson_norms),
        (
            "3 bound dominance, independent summands",
            criterion_independent,
        ),
        ("4 bound dominance, success runs", criterion_runs),
        ("5 inequality suites", criterion_lemmas),
        ("6 oracle self-consistency", criterion_oracles),
        ("7 asymptotic claims via trend check", criterion_trend),
    ];
    let mut all = true;
    for (name, f) in criteria {
        let o = f();
        all &= o.passed;
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
