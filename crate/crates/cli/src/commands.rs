//! One function per subcommand: configuration in, rendered-ready output out.

use copreli::assessment::classify_assessment;
use copreli::oracle::{finite_difference_audit, sample_bivariate};
use copreli::ordering::{check_radial_duality, infer_ordering_with, st_soundness_slack, verify_theorem1_with};
use copreli::report;
use copreli::table1::{default_samples, table1_report};
use copreli::{CopulaSpec, MarginalModel, Structure, SystemPair, SystemSpec};
use serde_json::{json, to_value, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Output, Provenance};

fn value<T: serde::Serialize>(x: &T) -> Value {
    to_value(x).expect("result serializes")
}

fn provenance(command: &str, spec: String, marginals: &[MarginalModel], grid: String, seed: Option<u64>) -> Provenance {
    Provenance {
        command: command.into(),
        spec,
        marginals: marginals.iter().map(ToString::to_string).collect(),
        grid,
        seed,
    }
}

fn system_spec(c: &CopulaSpec, cfg: &RunConfig) -> String {
    format!("{c} {} {} {}", cfg.structure(), cfg.mode(), cfg.coupling())
}

struct Setup {
    copula: CopulaSpec,
    marginals: Vec<MarginalModel>,
    grid: Vec<f64>,
    grid_spec: String,
}

fn setup(cfg: &RunConfig) -> CliResult<Setup> {
    let copula = cfg.require_copula()?.clone();
    copula.validate()?;
    let marginals = cfg.marginals_for(copula.dim())?;
    if marginals.len() != copula.dim() {
        return Err(copreli::Error::DimensionMismatch {
            expected: copula.dim(),
            got: marginals.len(),
        }
        .into());
    }
    let (grid, grid_spec) = cfg.grid_points(&marginals)?;
    Ok(Setup {
        copula,
        marginals,
        grid,
        grid_spec,
    })
}

/// Aging functions of one system.
pub fn eval(cfg: &RunConfig) -> CliResult<(Provenance, Output)> {
    let s = setup(cfg)?;
    let sys = SystemSpec::new(s.copula.clone(), s.marginals.clone(), cfg.structure(), cfg.mode())?
        .with_coupling(cfg.coupling());
    let curve = sys.reliability_curve(&s.grid)?;
    let mut out = Output::new(curve.to_csv()?, value(&curve));
    for issue in &curve.issues {
        out.diagnostics
            .push(format!("t = {} ({:?}): {}", issue.t, issue.column, issue.message));
    }
    if let Some(bad) = curve.issues.iter().find(|i| !i.undefined) {
        out.failure = Some(CliError::Numerical {
            t: Some(bad.t),
            message: bad.message.clone(),
        });
    }
    let spec = system_spec(&s.copula, cfg);
    Ok((provenance("eval", spec, &s.marginals, s.grid_spec, cfg.seed), out))
}

/// Dependent-minus-independent error of one measure.
pub fn error_table(cfg: &RunConfig) -> CliResult<(Provenance, Output)> {
    let s = setup(cfg)?;
    let pair = SystemPair::new(s.copula.clone(), s.marginals.clone(), cfg.structure())?.with_coupling(cfg.coupling());
    let report = pair.report(cfg.measure(), &s.grid)?;
    let assessment = classify_assessment(&report).ok();
    let mut out = Output::new(
        report.to_csv()?,
        json!({ "report": value(&report), "assessment": assessment.map(|a| a.to_string()) }),
    );
    out.diagnostics = report.notes.clone();
    if let Some(a) = assessment {
        out.diagnostics.push(format!("assessment: {a}"));
    }
    if let Some(i) = report.raw.iter().position(Option::is_none) {
        out.failure = Some(CliError::Numerical {
            t: Some(report.grid[i]),
            message: format!("{} error undefined", report.measure),
        });
    }
    let spec = format!("{} {} {} {}", s.copula, cfg.structure(), cfg.coupling(), cfg.measure());
    Ok((provenance("error-table", spec, &s.marginals, s.grid_spec, cfg.seed), out))
}

/// Stochastic ordering between the dependent and independent systems.
pub fn ordering(cfg: &RunConfig) -> CliResult<(Provenance, Output)> {
    let s = setup(cfg)?;
    let verdict = infer_ordering_with(&s.copula, &s.marginals, cfg.structure(), cfg.coupling(), &s.grid)?;
    let slack = st_soundness_slack(&verdict, &s.copula, &s.marginals, cfg.coupling())?;
    let implied: Vec<String> = verdict.implied.iter().map(ToString::to_string).collect();
    let turning: Vec<String> = verdict
        .derived_from
        .turning_points
        .iter()
        .map(|t| report::number(*t))
        .collect();
    let row = vec![
        verdict.structure.to_string(),
        verdict.relation.to_string(),
        verdict.direction.to_string(),
        verdict.ratio.to_string(),
        verdict.derived_from.classification.to_string(),
        implied.join(" "),
        verdict.statement(),
        turning.join(" "),
        report::cell(slack),
    ];
    let header = [
        "structure",
        "relation",
        "direction",
        "ratio",
        "classification",
        "implied",
        "statement",
        "turning_points",
        "st_slack",
    ];
    let mut out = Output::new(
        report::csv(&header, [row])?,
        json!({ "verdict": value(&verdict), "st_slack": slack }),
    );
    out.diagnostics.push(verdict.statement());
    let spec = format!("{} {} {}", s.copula, cfg.structure(), cfg.coupling());
    Ok((provenance("ordering", spec, &s.marginals, s.grid_spec, cfg.seed), out))
}

/// Family-by-family ratio verdicts against the published table.
pub fn table1(cfg: &RunConfig) -> CliResult<(Provenance, Output)> {
    let samples = match &cfg.copula {
        Some(c) => vec![c.clone()],
        None => default_samples(),
    };
    let marginals = cfg.marginals_for(2)?;
    let report = table1_report(&marginals, &samples, cfg.coupling())?;
    let mut out = Output::new(report.to_csv()?, value(&report));
    out.markdown = Some(report.to_markdown());
    for row in report.rows.iter().filter(|r| !r.agrees()) {
        out.diagnostics
            .push(format!("{}: machine verdict differs from the published direction", row.spec));
    }
    let spec = match &cfg.copula {
        Some(c) => c.to_string(),
        None => "default samples".into(),
    };
    let grid = format!(
        "{}:{}:{}:log",
        report.grid_min, report.grid_max, report.grid_points
    );
    Ok((provenance("table1", format!("{spec} {}", cfg.coupling()), &marginals, grid, cfg.seed), out))
}

/// Survival inequalities, error-identity audits and (for radially symmetric
/// families) ratio duality. Any failed check exits with 4.
pub fn verify(cfg: &RunConfig) -> CliResult<(Provenance, Output)> {
    let s = setup(cfg)?;
    let coupling = cfg.coupling();
    let theorem = verify_theorem1_with(&s.copula, &s.marginals, coupling, &s.grid)?;
    let mut rows = vec![vec![
        "survival_inequalities".to_string(),
        "both".to_string(),
        theorem.pass.to_string(),
        report::number(theorem.worst_slack),
        format!("{} at t = {}", theorem.worst_inequality, theorem.worst_t),
    ]];
    let mut audits = Vec::new();
    for structure in [Structure::Series, Structure::Parallel] {
        let pair = SystemPair::new(s.copula.clone(), s.marginals.clone(), structure)?.with_coupling(coupling);
        let audit = finite_difference_audit(&pair, &s.grid)?;
        rows.push(vec![
            "error_identity_audit".into(),
            structure.to_string(),
            audit.pass.to_string(),
            report::number(audit.max_discrepancy),
            format!("{} checks, {} skipped", audit.checks.len(), audit.skipped.len()),
        ]);
        audits.push(json!({ "structure": structure.to_string(), "audit": value(&audit) }));
    }
    let duality = if s.copula.radially_symmetric() && !s.copula.margin_axiom_exempt() {
        let d = check_radial_duality(&s.copula, &s.marginals, &s.grid)?;
        rows.push(vec![
            "radial_duality".into(),
            "both".into(),
            d.pass.to_string(),
            "NA".into(),
            format!("C/C1 {} vs Ĉ/Ĉ1 {}", d.copula_ratio.classification, d.survival_ratio.classification),
        ]);
        Some(d)
    } else {
        None
    };
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| r[2] == "false")
        .map(|r| format!("{} ({})", r[0], r[1]))
        .collect();
    let header = ["check", "structure", "pass", "worst", "detail"];
    let mut out = Output::new(
        report::csv(&header, rows)?,
        json!({
            "survival_inequalities": value(&theorem),
            "audits": audits,
            "radial_duality": duality.as_ref().map(value),
        }),
    );
    if !failed.is_empty() {
        out.failure = Some(CliError::Verification(failed.join(", ")));
    }
    let spec = format!("{} {coupling}", s.copula);
    Ok((provenance("verify", spec, &s.marginals, s.grid_spec, cfg.seed), out))
}

/// Monte-Carlo draws of a bivariate lifetime.
pub fn sample(cfg: &RunConfig) -> CliResult<(Provenance, Output)> {
    let copula = cfg.require_copula()?.clone();
    let marginals = cfg.marginals_for(copula.dim())?;
    let seed = cfg.seed.unwrap_or(0);
    let batch = sample_bivariate(&copula, &marginals, cfg.samples(), seed, cfg.coupling())?;
    let out = Output::new(batch.to_csv()?, value(&batch));
    let spec = format!("{copula} {} n={}", cfg.coupling(), cfg.samples());
    Ok((provenance("sample", spec, &marginals, "none".into(), Some(seed)), out))
}
