use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use cpx_core::bounds::{
    ub_cp_independent, ub_cp_kdep_moments, ub_cp_kdep_quadrant, ub_po_bernoulli, ub_po_iid_refined,
    BernoulliProfile, IndepProfile, LocalDepProfile, Norm,
};
use cpx_core::pmf::{compound_poisson_pmf, mixture, poisson_pmf, polya_aeppli_pmf, DEFAULT_EPS};
use cpx_core::runs::{
    runs_cp_bound, runs_cp_bound_improved, runs_cp_norm, runs_po_bound, stein_chen_comparators,
    total_pa_bound_with_norm, RunsConfig,
};
use cpx_core::smoothness::{
    normal_heuristic_delta2, numeric_delta1_sup, numeric_delta2_l1, poisson_delta1_sup_exact,
    poisson_delta2_l1_crude, poisson_delta2_l1_exact,
};
use cpx_core::verify::{self, Suite, VerifyOptions};
use cpx_core::{CompoundSpec, IntPmf};

use crate::report::{Format, Item, Provenance, Report};

/// Error bounds for Poisson and compound Poisson approximation, with exact
/// verification.
#[derive(Debug, Parser)]
#[command(name = "cpx", version, about)]
pub struct Cli {
    /// Truncation tolerance for every infinite-support pmf.
    #[arg(long, global = true, env = "CPX_EPS", default_value_t = DEFAULT_EPS)]
    pub eps: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Shorthand for `--format json`.
    #[arg(long, global = true, conflicts_with_all = ["format", "csv"])]
    pub json: bool,

    /// Shorthand for `--format csv`.
    #[arg(long, global = true, conflicts_with = "format")]
    pub csv: bool,

    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn output_format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            self.format
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numeric norms of Pólya–Aeppli laws next to the normal heuristic.
    Table1,
    /// Smoothness norms for a Poisson or compound Poisson law.
    Norms(NormsArgs),
    /// Evaluate an approximation error bound.
    Bound(BoundArgs),
    /// Run exact verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Geometric severity on {1, 2, ...} with this parameter.
    #[arg(long, conflicts_with = "severity")]
    pub geom_p: Option<f64>,
    /// Severity weights on 1, 2, ..., normalized.
    #[arg(long, value_delimiter = ',')]
    pub severity: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    PoIndependent,
    CpIndependent,
    PoIidRefined,
    KdepMoments,
    KdepQuadrant,
    RunsPo,
    RunsCp,
    RunsCpImproved,
    RunsTotal,
}

/// Which smoothness norm goes into a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormChoice {
    Value(f64),
    Exact,
    Crude,
    Numeric,
    Heuristic,
}

impl FromStr for NormChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "crude" => Ok(Self::Crude),
            "numeric" => Ok(Self::Numeric),
            "heuristic" => Ok(Self::Heuristic),
            _ => s.parse().map(Self::Value).map_err(|_| {
                format!("expected a number or one of exact, crude, numeric, heuristic; got {s:?}")
            }),
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub kind: BoundKind,
    /// Success probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ps: Option<Vec<f64>>,
    /// JSON profile for the selected bound.
    #[arg(long, conflicts_with = "ps")]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// A number, or one of exact, crude, numeric, heuristic.
    #[arg(long)]
    pub norm: Option<NormChoice>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Largest n taken from the runs grid.
    #[arg(long, default_value_t = 200)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Lemmas,
    Independent,
    Runs,
    Table1,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Lemmas => Suite::Lemmas,
            SuiteArg::Independent => Suite::Independent,
            SuiteArg::Runs => Suite::Runs,
            SuiteArg::Table1 => Suite::Table1,
            SuiteArg::All => Suite::All,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    ensure!(
        cli.eps > 0.0 && cli.eps < 1.0,
        "--eps must lie in (0, 1), got {}",
        cli.eps
    );
    match &cli.command {
        Command::Table1 => table1(cli.eps),
        Command::Norms(a) => norms(a, cli.eps),
        Command::Bound(a) => bound(a, cli.eps),
        Command::Verify(a) => verify_suite(a, cli.eps),
    }
}

fn table1(eps: f64) -> Result<Report> {
    let mut r = Report::new("table1");
    r.input("eps", eps);
    let entries = verify::table1(eps)?;
    r.results.push(Item::Table1 { entries });
    Ok(r)
}

fn norms(a: &NormsArgs, eps: f64) -> Result<Report> {
    let mut r = Report::new("norms");
    r.input("lambda", a.lambda).input("eps", eps);
    let l = a.lambda;
    r.value(
        "poisson.delta1_sup",
        poisson_delta1_sup_exact(l)?,
        Provenance::Formula,
    )
    .value(
        "poisson.delta2_l1",
        poisson_delta2_l1_exact(l)?,
        Provenance::Formula,
    )
    .value(
        "poisson.delta2_l1_crude",
        poisson_delta2_l1_crude(l)?,
        Provenance::Formula,
    );
    let po = poisson_pmf(l, eps)?;
    r.bounded_value(
        "poisson.delta2_l1_numeric",
        numeric_delta2_l1(&po),
        4.0 * po.deficit(),
        Provenance::Numeric,
    );
    // (law, E W^2) of the compound Poisson target, if one was given.
    let target = match (a.geom_p, &a.severity) {
        (Some(p), _) => {
            r.input("geom_p", p);
            ensure!(p > 0.0 && p < 1.0, "--geom-p must lie in (0, 1), got {p}");
            Some((
                polya_aeppli_pmf(l, p, eps)?,
                (1.0 + p) / ((1.0 - p) * (1.0 - p)),
            ))
        }
        (None, Some(w)) => {
            r.input("severity", w);
            let g = IntPmf::from_weights(1, w)?;
            let second = g.moments().second_raw;
            Some((
                compound_poisson_pmf(&CompoundSpec::new(l, g)?, eps)?,
                second,
            ))
        }
        (None, None) => None,
    };
    match target {
        Some((cp, second)) => {
            let pad = 4.0 * cp.deficit();
            r.bounded_value(
                "cp.delta1_sup",
                numeric_delta1_sup(&cp),
                pad,
                Provenance::Numeric,
            )
            .bounded_value(
                "cp.delta2_l1",
                numeric_delta2_l1(&cp),
                pad,
                Provenance::Numeric,
            )
            .value(
                "cp.delta2_l1_heuristic",
                normal_heuristic_delta2(l, second)?,
                Provenance::Formula,
            );
            r.warnings
                .push("the heuristic value is an approximation, not a bound".to_string());
        }
        None => {
            r.value(
                "poisson.delta2_l1_heuristic",
                normal_heuristic_delta2(l, 1.0)?,
                Provenance::Formula,
            );
        }
    }
    Ok(r)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn need<T: Copy>(value: Option<T>, flag: &str, kind: BoundKind) -> Result<T> {
    match value {
        Some(v) => Ok(v),
        None => bail!("--{flag} is required for {kind:?}"),
    }
}

fn runs_config(a: &BoundArgs) -> Result<RunsConfig> {
    Ok(RunsConfig::new(
        need(a.n, "n", a.kind)?,
        need(a.k, "k", a.kind)?,
        need(a.p, "p", a.kind)?,
    )?)
}

/// The norm for a bound whose target is `CP(lambda, severity)`. `numeric`
/// and `heuristic` need the target; `exact` and `crude` treat it as Poisson.
fn choose_norm(
    choice: NormChoice,
    lambda: f64,
    target: impl FnOnce() -> Result<CompoundSpec>,
    eps: f64,
) -> Result<Norm> {
    Ok(match choice {
        NormChoice::Value(v) => Norm::supplied(v)?,
        NormChoice::Exact => Norm::exact_poisson(lambda)?,
        NormChoice::Crude => Norm::crude_poisson(lambda)?,
        NormChoice::Numeric => Norm::numeric(&compound_poisson_pmf(&target()?, eps)?),
        NormChoice::Heuristic => {
            let spec = target()?;
            Norm::normal_heuristic(spec.rate(), spec.compounding().moments().second_raw)?
        }
    })
}

fn local_target(profile: &LocalDepProfile) -> Result<CompoundSpec> {
    let lambda: f64 = profile.ps.iter().sum();
    ensure!(lambda > 0.0, "the profile has no mass");
    let weights: Vec<f64> = profile.ps.iter().map(|p| p / lambda).collect();
    Ok(CompoundSpec::new(
        lambda,
        mixture(&weights, &profile.severities)?,
    )?)
}

fn bound(a: &BoundArgs, eps: f64) -> Result<Report> {
    let mut r = Report::new("bound");
    r.input(
        "kind",
        a.kind.to_possible_value().map(|v| v.get_name().to_string()),
    );
    r.input("eps", eps);
    if let Some(ps) = &a.ps {
        r.input("ps", ps);
    }
    if let Some(path) = &a.profile {
        r.input("profile", path.display().to_string());
    }
    for (key, v) in [("n", a.n), ("k", a.k)] {
        if let Some(v) = v {
            r.input(key, v);
        }
    }
    if let Some(p) = a.p {
        r.input("p", p);
    }
    if let Some(n) = a.norm {
        r.input("norm", format!("{n:?}"));
    }
    let kind = a.kind;
    let name = r.inputs["kind"].as_str().unwrap_or("bound").to_string();

    let report = match kind {
        BoundKind::PoIndependent => {
            let profile = match (&a.ps, &a.profile) {
                (Some(ps), _) => BernoulliProfile::new(ps.clone())?,
                (None, Some(path)) => read_json(path)?,
                (None, None) => bail!("--ps or --profile is required for {kind:?}"),
            };
            let lambda = profile.lambda();
            let norm = choose_norm(
                a.norm.unwrap_or(NormChoice::Exact),
                lambda,
                || Ok(CompoundSpec::new(lambda, IntPmf::point_mass(1))?),
                eps,
            )?;
            ub_po_bernoulli(&profile, norm)
        }
        BoundKind::CpIndependent => {
            let profile = match (&a.ps, &a.profile) {
                (Some(ps), _) => IndepProfile::bernoulli(ps.clone())?,
                (None, Some(path)) => read_json(path)?,
                (None, None) => bail!("--ps or --profile is required for {kind:?}"),
            };
            let norm = choose_norm(
                a.norm.unwrap_or(NormChoice::Numeric),
                profile.lambda(),
                || Ok(profile.target()?),
                eps,
            )?;
            ub_cp_independent(&profile, norm)
        }
        BoundKind::PoIidRefined => ub_po_iid_refined(need(a.n, "n", kind)?, need(a.p, "p", kind)?)?,
        BoundKind::KdepMoments | BoundKind::KdepQuadrant => {
            let profile: LocalDepProfile = match &a.profile {
                Some(path) => read_json(path)?,
                None => {
                    r.warnings.push(
                        "no --profile: using the success-run indicators of --n/--k/--p".to_string(),
                    );
                    runs_config(a)?.indicator_profile()
                }
            };
            let lambda: f64 = profile.ps.iter().sum();
            let norm = choose_norm(
                a.norm.unwrap_or(NormChoice::Numeric),
                lambda,
                || local_target(&profile),
                eps,
            )?;
            if kind == BoundKind::KdepMoments {
                ub_cp_kdep_moments(&profile, norm)?
            } else {
                ub_cp_kdep_quadrant(&profile, norm)?
            }
        }
        BoundKind::RunsPo => {
            let cfg = runs_config(a)?;
            if a.norm.is_some() {
                r.warnings
                    .push("runs-po always uses the exact Poisson norm; --norm ignored".to_string());
            }
            if let Some(cs) = stein_chen_comparators(&cfg).ub_cs_po {
                r.value("stein_chen_po_rate", cs, Provenance::Formula);
            }
            runs_po_bound(&cfg)?
        }
        BoundKind::RunsCp | BoundKind::RunsCpImproved | BoundKind::RunsTotal => {
            let cfg = runs_config(a)?;
            let norm = match a.norm.unwrap_or(NormChoice::Numeric) {
                NormChoice::Numeric => runs_cp_norm(&cfg, eps)?,
                other => choose_norm(other, cfg.lambda_cp(), || Ok(cfg.cp_target()?), eps)?,
            };
            let sc = stein_chen_comparators(&cfg);
            if let Some(cs) = sc.ub_cs_cp {
                r.value("stein_chen_cp_rate", cs, Provenance::Formula);
                r.warnings
                    .extend(sc.notes.iter().map(|n| format!("stein_chen_cp_rate: {n}")));
            }
            match kind {
                BoundKind::RunsCp => runs_cp_bound(&cfg, norm)?,
                BoundKind::RunsCpImproved => runs_cp_bound_improved(&cfg, norm)?,
                _ => total_pa_bound_with_norm(&cfg, norm)?,
            }
        }
    };
    r.bound(name, report);
    Ok(r)
}

fn verify_suite(a: &VerifyArgs, eps: f64) -> Result<Report> {
    let mut r = Report::new("verify");
    r.input(
        "suite",
        a.suite
            .to_possible_value()
            .map(|v| v.get_name().to_string()),
    )
    .input("seed", a.seed)
    .input("cap", a.cap)
    .input("eps", eps);
    let opts = VerifyOptions {
        seed: a.seed,
        run_cap: a.cap,
        eps,
    };
    let out = verify::run_suite(a.suite.into(), &opts)?;
    for summary in out.checks {
        r.results.push(Item::Check {
            provenance: Provenance::Oracle,
            summary,
        });
    }
    if !out.table1.is_empty() {
        r.results.push(Item::Table1 {
            entries: out.table1,
        });
    }
    Ok(r)
}
