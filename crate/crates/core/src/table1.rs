//! Machine reproduction of the published family-by-family ordering table.
//!
//! Each row evaluates `C/C1` (parallel) and `Ĉ/Ĉ1` (series) for one
//! parameter sample and compares the numerical verdicts with the directions
//! printed in the table and, where they differ, with the accompanying
//! theorem. Disagreements are reported as flagged cells, never as errors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copulas::{CopulaSpec, Family, HinzmannForm};
use crate::error::Result;
use crate::marginals::MarginalModel;
use crate::ordering::{
    check_rlu_thresholds, default_grid, ratio_monotonicity, Monotonicity, OrderingVerdict, RatioKind,
};
use crate::report;
use crate::systems::{Coupling, Structure};

/// Published direction of one ratio, from the table and from the theorem text.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub table: Option<Monotonicity>,
    pub theorem: Option<Monotonicity>,
}

impl Expectation {
    fn both(m: Monotonicity) -> Self {
        Expectation {
            table: Some(m),
            theorem: Some(m),
        }
    }

    fn table(m: Monotonicity) -> Self {
        Expectation {
            table: Some(m),
            theorem: None,
        }
    }

    fn theorem(m: Monotonicity) -> Self {
        Expectation {
            table: None,
            theorem: Some(m),
        }
    }

    /// The direction a verdict is held to: the theorem where stated, else the table.
    pub fn reference(&self) -> Option<Monotonicity> {
        self.theorem.or(self.table)
    }

    pub fn conflicting(&self) -> bool {
        matches!((self.table, self.theorem), (Some(a), Some(b)) if a != b)
    }
}

/// Published directions and caveats for one parameter sample.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RowExpectation {
    pub parallel: Expectation,
    pub series: Expectation,
    pub notes: Vec<String>,
}

fn sign_regime(x: f64, pos: (Monotonicity, Monotonicity), neg: (Monotonicity, Monotonicity)) -> RowExpectation {
    use Monotonicity::Constant;
    let (p, s) = if x > 0.0 {
        pos
    } else if x < 0.0 {
        neg
    } else {
        (Constant, Constant)
    };
    RowExpectation {
        parallel: Expectation::both(p),
        series: Expectation::both(s),
        notes: vec![],
    }
}

/// What the table and the theorems state for `c`.
pub fn expectation(c: &CopulaSpec) -> RowExpectation {
    use Monotonicity::*;
    match c.family() {
        Family::Independence => sign_regime(0.0, (Constant, Constant), (Constant, Constant)),
        Family::Fgm { alpha } | Family::Amh { alpha } => {
            sign_regime(*alpha, (Decreasing, Increasing), (Increasing, Decreasing))
        }
        Family::FischerKock { alpha, .. } => {
            let mut e = sign_regime(*alpha, (Decreasing, Decreasing), (Increasing, Increasing));
            if *alpha != 0.0 {
                let s = e.series.table.expect("set above");
                e.series = Expectation {
                    table: Some(s),
                    theorem: Some(s.reversed()),
                };
                e.notes.push("series cell: table and theorem state opposite directions".into());
            }
            e
        }
        Family::Clayton { .. } => RowExpectation {
            parallel: Expectation::table(Increasing),
            series: Expectation::table(Decreasing),
            notes: vec!["table-only provenance".into()],
        },
        Family::GumbelHougaard { alpha } => {
            sign_regime(*alpha - 1.0, (Decreasing, Increasing), (Constant, Constant))
        }
        Family::GumbelBarnet { alpha } => {
            let mut e = sign_regime(*alpha, (Decreasing, Increasing), (Constant, Constant));
            if *alpha > 0.0 {
                e.series = Expectation::theorem(Increasing);
                e.notes.push("series cell empty in the table; theorem direction used".into());
            }
            e
        }
        Family::NelsenTen { .. } => RowExpectation {
            parallel: Expectation::both(Increasing),
            series: Expectation::both(Decreasing),
            notes: vec![],
        },
        Family::MarshallOlkin { .. } => RowExpectation {
            parallel: Expectation::both(Increasing),
            series: Expectation::both(Decreasing),
            notes: vec![
                "table row conditions on α > 1 and misprints the series ordering; minimum-lemma direction used"
                    .into(),
            ],
        },
        Family::FischerHinzmann { alpha, form, .. } => {
            let mut e = if *alpha > 0.0 {
                RowExpectation {
                    parallel: Expectation::both(Decreasing),
                    series: Expectation::table(Increasing),
                    notes: vec![],
                }
            } else {
                sign_regime(0.0, (Constant, Constant), (Constant, Constant))
            };
            if *form == HinzmannForm::Corrected {
                e.notes.push("corrected form".into());
            }
            e
        }
        Family::RluExtended { a, alpha, .. } => {
            if *alpha > 0.0 && a.iter().all(|&x| x > 1.0) {
                RowExpectation {
                    parallel: Expectation::both(NonMonotone),
                    series: Expectation::both(NonMonotone),
                    notes: vec![],
                }
            } else {
                RowExpectation::default()
            }
        }
        Family::LinearSpearman { theta } => {
            let mut e = sign_regime(*theta, (Decreasing, Constant), (Increasing, Constant));
            e.series = Expectation::default();
            if *theta < 0.0 {
                e.notes.push("constant while u1 + u2 < 1, increasing after".into());
            }
            e
        }
    }
}

/// The parameter samples of the published table: both sign regimes where
/// the table distinguishes them.
pub fn default_samples() -> Vec<CopulaSpec> {
    let biv = CopulaSpec::bivariate;
    vec![
        biv(Family::Fgm { alpha: 0.5 }),
        biv(Family::Fgm { alpha: -0.5 }),
        biv(Family::FischerKock { r: 2.0, alpha: 0.5 }),
        biv(Family::FischerKock { r: 2.0, alpha: -0.5 }),
        biv(Family::Clayton { alpha: 1.0 }),
        biv(Family::GumbelHougaard { alpha: 2.0 }),
        biv(Family::GumbelBarnet { alpha: 0.5 }),
        biv(Family::NelsenTen { alpha: 1.0 }),
        biv(Family::MarshallOlkin { alphas: vec![0.5, 0.5] }),
        biv(Family::MarshallOlkin { alphas: vec![2.0, 2.0] }),
        biv(Family::Amh { alpha: 0.5 }),
        biv(Family::Amh { alpha: -0.5 }),
        biv(Family::FischerHinzmann {
            m: 2.0,
            alpha: 0.5,
            form: HinzmannForm::Literal,
        }),
        biv(Family::RluExtended {
            a: vec![2.0, 2.0],
            b: vec![3.0, 3.0],
            alpha: 1.0,
        }),
        biv(Family::LinearSpearman { theta: 0.5 }),
        biv(Family::LinearSpearman { theta: -0.5 }),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub ratio: RatioKind,
    pub machine: Monotonicity,
    pub turning_points: Vec<f64>,
    pub ordering: String,
    pub expected: Expectation,
    /// `None` when nothing is stated for this cell.
    pub agrees: Option<bool>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub family: String,
    pub spec: String,
    pub parallel: Cell,
    pub series: Cell,
    /// Rise/fall around the `F^{-1}(k_i)` thresholds, for the extended RLU family.
    pub thresholds_ok: Option<bool>,
    pub notes: Vec<String>,
}

impl Row {
    /// Every stated cell agrees (and thresholds hold where checked).
    pub fn agrees(&self) -> bool {
        self.parallel.agrees != Some(false) && self.series.agrees != Some(false) && self.thresholds_ok != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub marginals: Vec<String>,
    pub coupling: Coupling,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub rows: Vec<Row>,
}

fn cell(
    c: &CopulaSpec,
    marginals: &[MarginalModel],
    coupling: Coupling,
    grid: &[f64],
    structure: Structure,
    expected: Expectation,
) -> Result<Cell> {
    let kind = match structure {
        Structure::Parallel => RatioKind::COverC1,
        Structure::Series => RatioKind::ChatOverChat1,
    };
    let verdict = ratio_monotonicity(c, marginals, coupling, kind, grid)?;
    let machine = verdict.classification;
    let turning_points = verdict.turning_points.clone();
    let ordering = OrderingVerdict::from_monotonicity(structure, verdict).statement();
    let agrees = expected.reference().map(|m| m == machine);
    Ok(Cell {
        ratio: kind,
        machine,
        turning_points,
        ordering,
        flagged: expected.conflicting() || agrees == Some(false),
        expected,
        agrees,
    })
}

/// One row per sample, evaluated on the default grid of `marginals`.
pub fn table1_report(marginals: &[MarginalModel], samples: &[CopulaSpec], coupling: Coupling) -> Result<Table1Report> {
    let grid = default_grid(marginals)?;
    let rows = samples
        .par_iter()
        .map(|c| {
            let c = c.with_dimension(marginals.len())?;
            let e = expectation(&c);
            let parallel = cell(&c, marginals, coupling, &grid, Structure::Parallel, e.parallel)?;
            let series = cell(&c, marginals, coupling, &grid, Structure::Series, e.series)?;
            let thresholds_ok = match c.family() {
                Family::RluExtended { .. } if coupling == Coupling::Distribution => {
                    Some(check_rlu_thresholds(&c, marginals, &grid)?.pass)
                }
                _ => None,
            };
            let mut notes = e.notes;
            if parallel.agrees == Some(false) || series.agrees == Some(false) {
                notes.push("machine verdict disagrees with the published direction".into());
            }
            Ok(Row {
                family: c.kind().to_string(),
                spec: c.to_string(),
                parallel,
                series,
                thresholds_ok,
                notes,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1Report {
        marginals: marginals.iter().map(ToString::to_string).collect(),
        coupling,
        grid_min: grid[0],
        grid_max: grid[grid.len() - 1],
        grid_points: grid.len(),
        rows,
    })
}

fn expected_text(e: &Expectation) -> String {
    match (e.table, e.theorem) {
        (None, None) => "-".into(),
        (Some(a), Some(b)) if a == b => a.to_string(),
        (Some(a), Some(b)) => format!("table {a} / theorem {b}"),
        (Some(a), None) => format!("table {a}"),
        (None, Some(b)) => format!("theorem {b}"),
    }
}

fn agree_text(a: Option<bool>) -> &'static str {
    match a {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    }
}

impl Table1Report {
    pub const CSV_HEADER: [&'static str; 12] = [
        "family",
        "spec",
        "parallel_ratio",
        "parallel_expected",
        "parallel_agrees",
        "parallel_ordering",
        "series_ratio",
        "series_expected",
        "series_agrees",
        "series_ordering",
        "thresholds_ok",
        "notes",
    ];

    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(Row::agrees)
    }

    pub fn to_csv(&self) -> Result<String> {
        let rows = self.rows.iter().map(|r| {
            vec![
                r.family.clone(),
                r.spec.clone(),
                r.parallel.machine.to_string(),
                expected_text(&r.parallel.expected),
                agree_text(r.parallel.agrees).into(),
                r.parallel.ordering.clone(),
                r.series.machine.to_string(),
                expected_text(&r.series.expected),
                agree_text(r.series.agrees).into(),
                r.series.ordering.clone(),
                agree_text(r.thresholds_ok).into(),
                r.notes.join("; "),
            ]
        });
        report::csv(&Self::CSV_HEADER, rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Two lines per family, parallel then series, as in the printed table.
    pub fn to_markdown(&self) -> String {
        let mark = |c: &Cell| if c.flagged { " ⚑" } else { "" };
        let mut out = String::from("| Copula | Spec | Ratio | Verdict | Stochastic ordering | Published | Notes |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for r in &self.rows {
            for (i, c) in [&r.parallel, &r.series].into_iter().enumerate() {
                let (family, spec, notes) = if i == 0 {
                    (r.family.as_str(), r.spec.as_str(), r.notes.join("; "))
                } else {
                    ("", "", String::new())
                };
                out.push_str(&format!(
                    "| {family} | {} | {} | {}{} | {} | {} | {} |\n",
                    if spec.is_empty() { String::new() } else { format!("`{spec}`") },
                    c.ratio,
                    c.machine.arrow(),
                    mark(c),
                    c.ordering,
                    expected_text(&c.expected),
                    notes
                ));
            }
        }
        out
    }
}
