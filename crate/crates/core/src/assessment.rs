//! Error committed by modelling dependent components as independent, and its
//! over-/under-assessment classification.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copulas::CopulaSpec;
use crate::error::{Error, Result};
use crate::marginals::MarginalModel;
use crate::numeric;
use crate::report;
use crate::systems::{check_grid, Coupling, Mode, Structure, SystemSpec, UNDERFLOW};

/// Half-width of the band in which an error counts as zero.
pub const VERDICT_TOL: f64 = 1e-10;

/// A system together with its counterpart; errors are `first − second`.
///
/// Normally `first` is the dependent system and `second` the independent one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemPair {
    pub first: SystemSpec,
    pub second: SystemSpec,
}

impl SystemPair {
    /// Dependent versus independent systems of the given structure.
    pub fn new(copula: CopulaSpec, marginals: Vec<MarginalModel>, structure: Structure) -> Result<Self> {
        let dependent = SystemSpec::new(copula, marginals, structure, Mode::Dependent)?;
        Ok(Self::from_dependent(dependent))
    }

    pub fn series(copula: CopulaSpec, marginals: Vec<MarginalModel>) -> Result<Self> {
        Self::new(copula, marginals, Structure::Series)
    }

    pub fn parallel(copula: CopulaSpec, marginals: Vec<MarginalModel>) -> Result<Self> {
        Self::new(copula, marginals, Structure::Parallel)
    }

    pub fn from_dependent(dependent: SystemSpec) -> Self {
        SystemPair {
            second: dependent.with_mode(Mode::Independent),
            first: dependent,
        }
    }

    pub fn with_coupling(self, coupling: Coupling) -> Self {
        SystemPair {
            first: self.first.with_coupling(coupling),
            second: self.second.with_coupling(coupling),
        }
    }

    /// The same pair with the roles exchanged; every raw error changes sign.
    pub fn swapped(&self) -> Self {
        SystemPair {
            first: self.second.clone(),
            second: self.first.clone(),
        }
    }

    pub fn structure(&self) -> Structure {
        self.first.structure()
    }

    /// `(sf₁ − sf₂, sf₁/sf₂ − 1)`.
    ///
    /// For a series pair this is `(Ĉ(û) − ∏û, Ĉ(û)/∏û − 1)`, for a parallel
    /// pair `(∏u − C(u), (∏u − C(u))/(1 − ∏u))`.
    pub fn sf_error(&self, t: f64) -> Result<(f64, f64)> {
        let a = self.first.sf(t)?;
        let b = self.second.sf(t)?;
        if b <= UNDERFLOW {
            return Err(Error::Singularity {
                t,
                what: format!("counterpart survival {b:e} too small for a relative error"),
            });
        }
        Ok((a - b, (a - b) / b))
    }

    /// `−d/dt ln(sf₁/sf₂)` with step `h`.
    pub fn hr_error_with_step(&self, t: f64, h: f64) -> Result<f64> {
        let f = |x: f64| Ok(self.first.log_sf(x)? - self.second.log_sf(x)?);
        numeric::derivative(&f, t, h).map(|d| -d)
    }

    /// `d/dt ln(cdf₁/cdf₂)` with step `h`.
    pub fn rhr_error_with_step(&self, t: f64, h: f64) -> Result<f64> {
        let f = |x: f64| Ok(self.first.log_cdf(x)? - self.second.log_cdf(x)?);
        numeric::derivative(&f, t, h)
    }

    /// Hazard-rate error from the log-ratio identity.
    pub fn hr_error(&self, t: f64) -> Result<f64> {
        self.hr_error_with_step(t, numeric::default_step(t))
    }

    /// Reversed-hazard error from the log-ratio identity.
    pub fn rhr_error(&self, t: f64) -> Result<f64> {
        self.rhr_error_with_step(t, numeric::default_step(t))
    }

    /// Richardson-extrapolated hazard error identity.
    pub fn hr_error_extrapolated(&self, t: f64, h: f64) -> Result<f64> {
        let f = |x: f64| Ok(self.first.log_sf(x)? - self.second.log_sf(x)?);
        numeric::richardson(&f, t, h).map(|d| -d)
    }

    /// Richardson-extrapolated reversed-hazard error identity.
    pub fn rhr_error_extrapolated(&self, t: f64, h: f64) -> Result<f64> {
        let f = |x: f64| Ok(self.first.log_cdf(x)? - self.second.log_cdf(x)?);
        numeric::richardson(&f, t, h)
    }

    pub fn mrl_error(&self, t: f64) -> Result<f64> {
        Ok(self.first.mrl(t)? - self.second.mrl(t)?)
    }

    /// Raw error of `measure` at `t` and the counterpart value it is relative to.
    pub fn error(&self, measure: Measure, t: f64) -> Result<(f64, f64)> {
        match measure {
            Measure::Sf => Ok((self.first.sf(t)? - self.second.sf(t)?, self.second.sf(t)?)),
            Measure::Hr => Ok((self.hr_error(t)?, self.second.hazard(t)?)),
            Measure::Rhr => Ok((self.rhr_error(t)?, self.second.reversed_hazard(t)?)),
            Measure::Mrl => Ok((self.mrl_error(t)?, self.second.mrl(t)?)),
        }
    }

    /// Error report of `measure` over `grid`; numerical failures become undefined cells.
    pub fn report(&self, measure: Measure, grid: &[f64]) -> Result<ErrorReport> {
        check_grid(grid)?;
        let cells: Vec<Result<(f64, f64)>> = grid.par_iter().map(|&t| self.error(measure, t)).collect();
        let mut out = ErrorReport {
            measure,
            structure: self.structure(),
            grid: grid.to_vec(),
            raw: Vec::with_capacity(grid.len()),
            relative: Vec::with_capacity(grid.len()),
            verdict: Vec::with_capacity(grid.len()),
            notes: Vec::new(),
        };
        for (&t, cell) in grid.iter().zip(cells) {
            match cell {
                Ok((raw, base)) => {
                    out.raw.push(Some(raw));
                    out.relative.push((base.abs() > UNDERFLOW).then(|| raw / base));
                    out.verdict.push(Some(Verdict::of(raw)));
                }
                Err(e) if e.is_numerical() => {
                    out.raw.push(None);
                    out.relative.push(None);
                    out.verdict.push(None);
                    out.notes.push(format!("t = {t}: {e}"));
                }
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }
}

/// Error-series entry points named after the structure they require.
pub fn error_sf_series(pair: &SystemPair, t: f64) -> Result<(f64, f64)> {
    require(pair, Structure::Series)?;
    pair.sf_error(t)
}

pub fn error_sf_parallel(pair: &SystemPair, t: f64) -> Result<(f64, f64)> {
    require(pair, Structure::Parallel)?;
    pair.sf_error(t)
}

pub fn hr_error_series(pair: &SystemPair, t: f64) -> Result<f64> {
    require(pair, Structure::Series)?;
    pair.hr_error(t)
}

pub fn rhr_error_series(pair: &SystemPair, t: f64) -> Result<f64> {
    require(pair, Structure::Series)?;
    pair.rhr_error(t)
}

pub fn hr_error_parallel(pair: &SystemPair, t: f64) -> Result<f64> {
    require(pair, Structure::Parallel)?;
    pair.hr_error(t)
}

pub fn rhr_error_parallel(pair: &SystemPair, t: f64) -> Result<f64> {
    require(pair, Structure::Parallel)?;
    pair.rhr_error(t)
}

fn require(pair: &SystemPair, s: Structure) -> Result<()> {
    if pair.structure() == s && pair.second.structure() == s {
        Ok(())
    } else {
        Err(Error::domain(format!("expected a {s} pair, got {}", pair.structure())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Sf,
    Hr,
    Rhr,
    Mrl,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Sf => "sf",
            Measure::Hr => "hr",
            Measure::Rhr => "rhr",
            Measure::Mrl => "mrl",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sf" => Ok(Measure::Sf),
            "hr" => Ok(Measure::Hr),
            "rhr" => Ok(Measure::Rhr),
            "mrl" => Ok(Measure::Mrl),
            other => Err(Error::parse(other, "expected one of: sf hr rhr mrl")),
        }
    }
}

/// Over-assessment (negative error), under-assessment (positive) or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "OA")]
    Oa,
    #[serde(rename = "UA")]
    Ua,
    #[serde(rename = "zero")]
    Zero,
}

impl Verdict {
    pub fn of(raw: f64) -> Self {
        if raw < -VERDICT_TOL {
            Verdict::Oa
        } else if raw > VERDICT_TOL {
            Verdict::Ua
        } else {
            Verdict::Zero
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Oa => "OA",
            Verdict::Ua => "UA",
            Verdict::Zero => "zero",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assessment {
    UniformOa,
    UniformUa,
    Mixed,
    Zero,
}

impl fmt::Display for Assessment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assessment::UniformOa => "uniform OA",
            Assessment::UniformUa => "uniform UA",
            Assessment::Mixed => "mixed",
            Assessment::Zero => "zero",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub measure: Measure,
    pub structure: Structure,
    pub grid: Vec<f64>,
    pub raw: Vec<Option<f64>>,
    pub relative: Vec<Option<f64>>,
    pub verdict: Vec<Option<Verdict>>,
    pub notes: Vec<String>,
}

impl ErrorReport {
    pub const CSV_HEADER: [&'static str; 4] = ["t", "raw", "relative", "verdict"];

    pub fn to_csv(&self) -> Result<String> {
        let rows = (0..self.grid.len()).map(|i| {
            vec![
                report::number(self.grid[i]),
                report::cell(self.raw[i]),
                report::cell(self.relative[i]),
                self.verdict[i].map_or_else(|| "NA".to_string(), |v| v.to_string()),
            ]
        });
        report::csv(&Self::CSV_HEADER, rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Collapses per-point verdicts. Undefined points are skipped; a uniform
/// verdict needs every defined point to agree.
pub fn classify_assessment(report: &ErrorReport) -> Result<Assessment> {
    if report.grid.is_empty() {
        return Err(Error::domain("cannot classify an empty report"));
    }
    let defined: Vec<Verdict> = report.verdict.iter().flatten().copied().collect();
    if defined.is_empty() {
        return Err(Error::domain("every point of the report is undefined"));
    }
    let all = |v: Verdict| defined.iter().all(|&x| x == v);
    Ok(if all(Verdict::Zero) {
        Assessment::Zero
    } else if all(Verdict::Oa) {
        Assessment::UniformOa
    } else if all(Verdict::Ua) {
        Assessment::UniformUa
    } else {
        Assessment::Mixed
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copulas::Family;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn exp2() -> Vec<MarginalModel> {
        vec![MarginalModel::exponential(1.0).unwrap(); 2]
    }

    fn fgm(alpha: f64) -> CopulaSpec {
        CopulaSpec::bivariate(Family::Fgm { alpha })
    }

    #[test]
    fn series_sf_examples() {
        let p = SystemPair::series(fgm(0.5), exp2()).unwrap();
        assert_relative_eq!(error_sf_series(&p, LN_2).unwrap().1, 0.125, epsilon = 1e-14);
        let p = SystemPair::series(fgm(-1.0), exp2()).unwrap();
        assert_relative_eq!(error_sf_series(&p, LN_2).unwrap().1, -0.25, epsilon = 1e-14);
        let p = SystemPair::series(CopulaSpec::independence(2), exp2()).unwrap();
        assert_eq!(error_sf_series(&p, 0.9).unwrap(), (0.0, 0.0));
        assert!(error_sf_parallel(&p, 0.9).is_err());
    }

    #[test]
    fn parallel_sf_examples() {
        let p = SystemPair::parallel(fgm(0.5), exp2()).unwrap();
        let (raw, rel) = error_sf_parallel(&p, LN_2).unwrap();
        assert_relative_eq!(raw, -0.03125, epsilon = 1e-14);
        assert_relative_eq!(rel, -0.03125 / 0.75, epsilon = 1e-14);
        let p = SystemPair::parallel(CopulaSpec::bivariate(Family::Clayton { alpha: 1.0 }), exp2()).unwrap();
        let (raw, rel) = error_sf_parallel(&p, LN_2).unwrap();
        assert_relative_eq!(raw, 0.25 - 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(rel, -1.0 / 9.0, epsilon = 1e-13);
        let p = SystemPair::parallel(CopulaSpec::independence(2), exp2()).unwrap();
        assert_eq!(error_sf_parallel(&p, 0.4).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn hazard_error_examples() {
        let p = SystemPair::series(CopulaSpec::independence(2), exp2()).unwrap();
        assert_eq!(hr_error_series(&p, 0.5).unwrap(), 0.0);
        let gb = SystemPair::series(CopulaSpec::bivariate(Family::GumbelBarnet { alpha: 0.4 }), exp2())
            .unwrap()
            .with_coupling(Coupling::Survival);
        for t in [0.2, 1.0, 2.0] {
            assert_relative_eq!(hr_error_series(&gb, t).unwrap(), 0.8 * t, epsilon = 1e-6);
        }
        let p = SystemPair::series(fgm(0.5), exp2()).unwrap();
        assert!(hr_error_series(&p, LN_2).unwrap() < 0.0);
    }

    #[test]
    fn swapping_flips_verdicts() {
        let p = SystemPair::series(fgm(0.5), exp2()).unwrap();
        let grid = numeric::log_space(0.05, 3.0, 20);
        let a = p.report(Measure::Sf, &grid).unwrap();
        let b = p.swapped().report(Measure::Sf, &grid).unwrap();
        assert_eq!(classify_assessment(&a).unwrap(), Assessment::UniformUa);
        assert_eq!(classify_assessment(&b).unwrap(), Assessment::UniformOa);
        for (x, y) in a.raw.iter().zip(&b.raw) {
            assert_eq!(x.unwrap(), -y.unwrap());
        }
    }

    #[test]
    fn classification_examples() {
        let grid = numeric::log_space(0.05, 3.0, 20);
        let par = SystemPair::parallel(fgm(0.5), exp2()).unwrap();
        let r = par.report(Measure::Sf, &grid).unwrap();
        assert_eq!(classify_assessment(&r).unwrap(), Assessment::UniformOa);
        let ind = SystemPair::series(CopulaSpec::independence(2), exp2()).unwrap();
        let r = ind.report(Measure::Sf, &grid).unwrap();
        assert_eq!(classify_assessment(&r).unwrap(), Assessment::Zero);
        let empty = ind.report(Measure::Sf, &[]).unwrap();
        assert!(classify_assessment(&empty).is_err());
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("t,raw,relative,verdict\n"));
    }
}
