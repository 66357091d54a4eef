//! The report every command emits, and its text / JSON / CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use cpx_core::bounds::BoundReport;
use cpx_core::float_serde;
use cpx_core::smoothness::SmoothnessMethod;
use cpx_core::verify::{CheckSummary, Table1Entry, TABLE1_LAMBDAS, TABLE1_PS};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// Where a number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// A closed-form expression.
    Formula,
    /// Computed from an explicitly evaluated pmf.
    Numeric,
    /// An exact oracle (enumeration or convolution).
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    #[serde(with = "float_serde")]
    pub value: f64,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_bar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Item {
    Value(Quantity),
    Bound {
        name: String,
        provenance: Provenance,
        report: BoundReport,
    },
    Check {
        provenance: Provenance,
        summary: CheckSummary,
    },
    Table1 {
        entries: Vec<Table1Entry>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, serde_json::Value>,
    pub results: Vec<Item>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            inputs: BTreeMap::new(),
            results: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("inputs are plain data");
        self.inputs.insert(key.to_string(), v);
        self
    }

    pub fn value(
        &mut self,
        name: impl Into<String>,
        value: f64,
        provenance: Provenance,
    ) -> &mut Self {
        self.results.push(Item::Value(Quantity {
            name: name.into(),
            value,
            provenance,
            error_bar: None,
        }));
        self
    }

    pub fn bounded_value(
        &mut self,
        name: impl Into<String>,
        value: f64,
        error_bar: f64,
        provenance: Provenance,
    ) -> &mut Self {
        self.results.push(Item::Value(Quantity {
            name: name.into(),
            value,
            provenance,
            error_bar: Some(error_bar),
        }));
        self
    }

    pub fn bound(&mut self, name: impl Into<String>, report: BoundReport) -> &mut Self {
        let name = name.into();
        for note in &report.notes {
            self.warnings.push(format!("{name}: {note}"));
        }
        self.results.push(Item::Bound {
            name,
            provenance: Provenance::Formula,
            report,
        });
        self
    }

    /// Whether every bound in the report had its hypotheses met.
    pub fn all_valid(&self) -> bool {
        self.results.iter().all(|r| match r {
            Item::Bound { report, .. } => report.valid,
            _ => true,
        })
    }

    /// Whether every check and table entry held.
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| match r {
            Item::Check { summary, .. } => summary.passed(),
            Item::Table1 { entries } => entries.iter().all(Table1Entry::holds),
            _ => true,
        })
    }

    /// Flat `(name, value, provenance, error bar)` rows.
    pub fn rows(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        for item in &self.results {
            match item {
                Item::Value(q) => rows.push(Row {
                    name: q.name.clone(),
                    value: q.value,
                    provenance: q.provenance,
                    error_bar: q.error_bar,
                    integral: false,
                }),
                Item::Bound {
                    name,
                    provenance,
                    report,
                } => {
                    let norm_provenance = match report.norm_method {
                        SmoothnessMethod::Numeric => Provenance::Numeric,
                        _ => *provenance,
                    };
                    let mut push = |field: &str, value: f64, provenance, integral| {
                        rows.push(Row {
                            name: format!("{name}.{field}"),
                            value,
                            provenance,
                            error_bar: None,
                            integral,
                        })
                    };
                    push("total", report.total, *provenance, false);
                    push("c_term", report.c_term, *provenance, false);
                    push("smooth_term", report.smooth_term, *provenance, false);
                    push("norm", report.norm_used, norm_provenance, false);
                    push("lambda", report.lambda, *provenance, false);
                    push(
                        "valid",
                        if report.valid { 1.0 } else { 0.0 },
                        *provenance,
                        true,
                    );
                    for (k, v) in &report.components {
                        push(k, *v, *provenance, false);
                    }
                }
                Item::Check {
                    provenance,
                    summary,
                } => {
                    let mut push = |field: &str, value: f64, integral| {
                        rows.push(Row {
                            name: format!("{}.{field}", summary.name),
                            value,
                            provenance: *provenance,
                            error_bar: None,
                            integral,
                        })
                    };
                    push("cases", summary.cases as f64, true);
                    push("failures", summary.failures as f64, true);
                    push("skipped", summary.skipped as f64, true);
                    push("max_ratio", summary.max_ratio, false);
                }
                Item::Table1 { entries } => {
                    for e in entries {
                        let cell = format!("lambda={} p={}", e.lambda, e.p);
                        rows.push(Row {
                            name: format!("norm[{cell}]"),
                            value: e.norm,
                            provenance: Provenance::Numeric,
                            error_bar: None,
                            integral: false,
                        });
                        rows.push(Row {
                            name: format!("approx[{cell}]"),
                            value: e.approx,
                            provenance: Provenance::Formula,
                            error_bar: None,
                            integral: false,
                        });
                    }
                }
            }
        }
        rows
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "value", "provenance", "error_bar"])
            .expect("in-memory write");
        for r in self.rows() {
            w.write_record([
                r.name,
                r.value.to_string(),
                provenance_label(r.provenance).to_string(),
                r.error_bar.map(|e| e.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let tables: Vec<&[Table1Entry]> = self
            .results
            .iter()
            .filter_map(|r| match r {
                Item::Table1 { entries } => Some(entries.as_slice()),
                _ => None,
            })
            .collect();
        for entries in &tables {
            out.push_str(&table1_grid(entries));
        }
        let rows: Vec<Row> = self
            .rows()
            .into_iter()
            .filter(|r| tables.is_empty() || !r.name.contains('['))
            .collect();
        let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in rows {
            let shown = if r.integral {
                format!("{}", r.value)
            } else {
                sig6(r.value)
            };
            let _ = write!(out, "{:<width$}  {:>12}", r.name, shown);
            if let Some(e) = r.error_bar {
                let _ = write!(out, " ± {}", sig6(e));
            }
            let _ = writeln!(out, "  ({})", provenance_label(r.provenance));
        }
        for item in &self.results {
            if let Item::Check { summary, .. } = item {
                for f in &summary.failed_cases {
                    let _ = writeln!(out, "FAILED {}: {f}", summary.name);
                }
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

pub struct Row {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
    pub error_bar: Option<f64>,
    /// Counts and flags, printed without decimals.
    pub integral: bool,
}

fn provenance_label(p: Provenance) -> &'static str {
    match p {
        Provenance::Formula => "formula",
        Provenance::Numeric => "numeric",
        Provenance::Oracle => "oracle",
    }
}

/// Six significant digits, fixed-point for moderate magnitudes.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

/// `p` rows by `λ` columns, each cell showing the numeric norm and the
/// heuristic side by side.
fn table1_grid(entries: &[Table1Entry]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<8}", "");
    for l in TABLE1_LAMBDAS {
        let _ = write!(out, "  {:>25}", format!("lambda={l}"));
    }
    out.push('\n');
    let _ = write!(out, "{:<8}", "");
    for _ in TABLE1_LAMBDAS {
        let _ = write!(out, "  {:>12} {:>12}", "norm", "approx");
    }
    out.push('\n');
    for p in TABLE1_PS {
        let _ = write!(out, "{:<8}", format!("p={p}"));
        for l in TABLE1_LAMBDAS {
            match entries.iter().find(|e| e.lambda == l && e.p == p) {
                Some(e) => {
                    let _ = write!(out, "  {:>12} {:>12}", sig6(e.norm), sig6(e.approx));
                }
                None => {
                    let _ = write!(out, "  {:>12} {:>12}", "-", "-");
                }
            }
        }
        out.push('\n');
    }
    let held = entries.iter().filter(|e| e.holds()).count();
    let _ = writeln!(
        out,
        "{held}/{} entries within tolerance of the reference values",
        entries.len()
    );
    out
}
