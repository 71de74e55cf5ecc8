//! Series and parallel systems of possibly dependent components, and their
//! aging functions.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copulas::{expansion_tail, CopulaSpec};
use crate::error::{Error, Result};
use crate::marginals::MarginalModel;
use crate::numeric;

/// Probabilities below this are treated as zero denominators.
pub const UNDERFLOW: f64 = 1e-12;
/// Relative tolerance of the mean-residual-life quadrature.
pub const MRL_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Series,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Dependent,
    Independent,
}

/// Which joint function the copula formula is attached to.
///
/// `Distribution`: `F(t) = C(u(t))`, and `Ĉ` follows by radial symmetry or
/// inclusion–exclusion. `Survival`: `F̄(t) = Ĉ(û(t))` with `Ĉ` given by the
/// family formula, and `C` follows by the dual expansion. The two agree for
/// radially symmetric families.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    #[default]
    Distribution,
    Survival,
}

macro_rules! keyword_enum {
    ($ty:ty, $($variant:path => $name:literal),+) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($name => Ok($variant),)+
                    other => Err(Error::parse(other, concat!("expected one of:", $(" ", $name),+))),
                }
            }
        }
    };
}

keyword_enum!(Structure, Structure::Series => "series", Structure::Parallel => "parallel");
keyword_enum!(Mode, Mode::Dependent => "dependent", Mode::Independent => "independent");
keyword_enum!(Coupling, Coupling::Distribution => "distribution", Coupling::Survival => "survival");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    copula: CopulaSpec,
    marginals: Vec<MarginalModel>,
    structure: Structure,
    mode: Mode,
    #[serde(default)]
    coupling: Coupling,
}

impl SystemSpec {
    pub fn new(
        copula: CopulaSpec,
        marginals: Vec<MarginalModel>,
        structure: Structure,
        mode: Mode,
    ) -> Result<Self> {
        if copula.dim() != marginals.len() {
            return Err(Error::DimensionMismatch {
                expected: copula.dim(),
                got: marginals.len(),
            });
        }
        copula.validate()?;
        Ok(SystemSpec {
            copula,
            marginals,
            structure,
            mode,
            coupling: Coupling::Distribution,
        })
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        SystemSpec { mode, ..self.clone() }
    }

    pub fn copula(&self) -> &CopulaSpec {
        &self.copula
    }
    pub fn marginals(&self) -> &[MarginalModel] {
        &self.marginals
    }
    pub fn structure(&self) -> Structure {
        self.structure
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    fn dependent(&self) -> bool {
        self.mode == Mode::Dependent && !self.copula.is_independence()
    }

    fn points(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let u = self.marginals.iter().map(|m| m.cdf(t)).collect::<Result<Vec<_>>>()?;
        let uhat = self.marginals.iter().map(|m| m.sf(t)).collect::<Result<Vec<_>>>()?;
        Ok((u, uhat))
    }

    /// `(C(u), 1 − C(u))`, the second computed without cancellation where possible.
    fn joint_cdf(&self, u: &[f64]) -> Result<(f64, f64)> {
        match self.coupling {
            Coupling::Survival if !self.copula.radially_symmetric() => {
                let tail = expansion_tail(&self.copula, u)?;
                Ok(((1.0 + tail).clamp(0.0, 1.0), (-tail).clamp(0.0, 1.0)))
            }
            _ => {
                let c = self.copula.value(u)?;
                Ok((c, 1.0 - c))
            }
        }
    }

    /// `(Ĉ(û), 1 − Ĉ(û))`.
    fn joint_sf(&self, uhat: &[f64]) -> Result<(f64, f64)> {
        match self.coupling {
            Coupling::Distribution if !self.copula.radially_symmetric() => {
                let tail = expansion_tail(&self.copula, uhat)?;
                Ok(((1.0 + tail).clamp(0.0, 1.0), (-tail).clamp(0.0, 1.0)))
            }
            _ => {
                let c = self.copula.value(uhat)?;
                Ok((c, 1.0 - c))
            }
        }
    }

    /// `(sf, cdf)` of the system lifetime at `t`.
    fn sf_cdf(&self, t: f64) -> Result<(f64, f64)> {
        let (u, uhat) = self.points(t)?;
        match (self.structure, self.dependent()) {
            (Structure::Series, true) => self.joint_sf(&uhat),
            (Structure::Parallel, true) => {
                let (c, not_c) = self.joint_cdf(&u)?;
                Ok((not_c, c))
            }
            (Structure::Series, false) => {
                let log_s: f64 = self.marginals.iter().map(|m| log_sf(m, t)).sum();
                Ok((log_s.exp(), -log_s.exp_m1()))
            }
            (Structure::Parallel, false) => {
                if u.contains(&0.0) {
                    return Ok((1.0, 0.0));
                }
                let log_c: f64 = u.iter().map(|x| x.ln()).sum();
                Ok((-log_c.exp_m1(), log_c.exp()))
            }
        }
    }

    pub fn sf(&self, t: f64) -> Result<f64> {
        Ok(self.sf_cdf(t)?.0)
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        Ok(self.sf_cdf(t)?.1)
    }

    pub fn hazard(&self, t: f64) -> Result<f64> {
        self.hazard_with_step(t, numeric::default_step(t))
    }

    pub fn reversed_hazard(&self, t: f64) -> Result<f64> {
        self.reversed_hazard_with_step(t, numeric::default_step(t))
    }

    /// `−d/dt ln sf` by a central difference of step `h`.
    pub fn hazard_with_step(&self, t: f64, h: f64) -> Result<f64> {
        numeric::derivative(&|x| self.log_sf(x), t, h).map(|d| -d)
    }

    /// `d/dt ln cdf` by a central difference of step `h`.
    pub fn reversed_hazard_with_step(&self, t: f64, h: f64) -> Result<f64> {
        numeric::derivative(&|x| self.log_cdf(x), t, h)
    }

    pub(crate) fn log_sf(&self, t: f64) -> Result<f64> {
        let s = self.sf(t)?;
        if s <= UNDERFLOW {
            return Err(Error::Singularity {
                t,
                what: format!("system survival {s:e} below {UNDERFLOW:e}"),
            });
        }
        Ok(s.ln())
    }

    pub(crate) fn log_cdf(&self, t: f64) -> Result<f64> {
        let c = self.cdf(t)?;
        if c <= UNDERFLOW {
            return Err(Error::Singularity {
                t,
                what: format!("system distribution {c:e} below {UNDERFLOW:e}"),
            });
        }
        Ok(c.ln())
    }

    /// `∫_t^∞ sf(x) dx / sf(t)`.
    ///
    /// The tail is cut where every marginal survival has fallen below
    /// `1e−12·sf(t)/n`; past that point the system survival is bounded by the
    /// same amount for both structures.
    pub fn mrl(&self, t: f64) -> Result<f64> {
        let s0 = self.sf(t)?;
        if s0 <= UNDERFLOW {
            return Err(Error::Singularity {
                t,
                what: format!("system survival {s0:e} below {UNDERFLOW:e}"),
            });
        }
        let level = UNDERFLOW * s0 / self.marginals.len() as f64;
        let end = self
            .marginals
            .iter()
            .map(|m| m.inverse_sf(level.max(f64::MIN_POSITIVE)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(t, f64::max);
        let tail = self.sf(end)?;
        if tail > 10.0 * UNDERFLOW * s0 {
            return Err(Error::Integration(format!(
                "survival does not decay: sf({end}) = {tail:e} against sf({t}) = {s0:e}"
            )));
        }
        let area = numeric::integrate(&|x| self.sf(x), t, end, MRL_REL_TOL)?;
        Ok(area / s0)
    }

    /// Aging intensity `t·r(t) / (−ln sf(t))`.
    pub fn ai(&self, t: f64) -> Result<f64> {
        let s = self.sf(t)?;
        if t <= 0.0 || s <= 0.0 || s >= 1.0 {
            return Err(Error::Undefined {
                t,
                what: format!("aging intensity needs t > 0 and 0 < sf < 1, sf = {s}"),
            });
        }
        let cumulative = -s.ln();
        Ok(t * self.hazard(t)? / cumulative)
    }

    /// Evaluates every aging function on `grid`; failures become flagged cells.
    pub fn reliability_curve(&self, grid: &[f64]) -> Result<ReliabilityCurve> {
        check_grid(grid)?;
        let rows: Vec<_> = grid
            .par_iter()
            .map(|&t| {
                [
                    self.sf(t),
                    self.hazard(t),
                    self.reversed_hazard(t),
                    self.mrl(t),
                    self.ai(t),
                ]
            })
            .collect();
        let mut curve = ReliabilityCurve {
            grid: grid.to_vec(),
            ..Default::default()
        };
        for (&t, row) in grid.iter().zip(rows) {
            for (column, cell) in CurveColumn::ALL.into_iter().zip(row) {
                let value = match cell {
                    Ok(v) => Some(v),
                    Err(e) if e.is_numerical() => {
                        curve.issues.push(CellIssue {
                            t,
                            column,
                            undefined: matches!(e, Error::Undefined { .. }),
                            message: e.to_string(),
                        });
                        None
                    }
                    Err(e) => return Err(e),
                };
                curve.column_mut(column).push(value);
            }
        }
        Ok(curve)
    }
}

fn log_sf(m: &MarginalModel, t: f64) -> f64 {
    m.sf(t).map(f64::ln).unwrap_or(f64::NAN)
}

/// Grids must be finite, strictly increasing and non-negative.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if let Some(t) = grid.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::domain(format!("grid point {t} is not a finite non-negative time")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!(
            "grid is not strictly increasing at {} → {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveColumn {
    Sf,
    Hr,
    Rhr,
    Mrl,
    Ai,
}

impl CurveColumn {
    pub const ALL: [CurveColumn; 5] = [
        CurveColumn::Sf,
        CurveColumn::Hr,
        CurveColumn::Rhr,
        CurveColumn::Mrl,
        CurveColumn::Ai,
    ];
}

/// A cell left undefined, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellIssue {
    pub t: f64,
    pub column: CurveColumn,
    /// The quantity has no value here by definition (as opposed to a numerical breakdown).
    pub undefined: bool,
    pub message: String,
}

/// Aging functions of one system on a grid. Undefined cells are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityCurve {
    pub grid: Vec<f64>,
    pub sf: Vec<Option<f64>>,
    pub hr: Vec<Option<f64>>,
    pub rhr: Vec<Option<f64>>,
    pub mrl: Vec<Option<f64>>,
    pub ai: Vec<Option<f64>>,
    pub issues: Vec<CellIssue>,
}

impl ReliabilityCurve {
    pub const CSV_HEADER: [&'static str; 6] = ["t", "sf", "hr", "rhr", "mrl", "ai"];

    fn column_mut(&mut self, c: CurveColumn) -> &mut Vec<Option<f64>> {
        match c {
            CurveColumn::Sf => &mut self.sf,
            CurveColumn::Hr => &mut self.hr,
            CurveColumn::Rhr => &mut self.rhr,
            CurveColumn::Mrl => &mut self.mrl,
            CurveColumn::Ai => &mut self.ai,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn to_csv(&self) -> Result<String> {
        let rows = (0..self.len()).map(|i| {
            vec![
                crate::report::number(self.grid[i]),
                crate::report::cell(self.sf[i]),
                crate::report::cell(self.hr[i]),
                crate::report::cell(self.rhr[i]),
                crate::report::cell(self.mrl[i]),
                crate::report::cell(self.ai[i]),
            ]
        });
        crate::report::csv(&Self::CSV_HEADER, rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }
}

/// Block–Basu bivariate exponential, written as a mixture of a Marshall–Olkin
/// survival term and a pure minimum term in `û_i = exp(−λ_i x_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockBasu {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda12: f64,
}

impl BlockBasu {
    pub fn new(lambda1: f64, lambda2: f64, lambda12: f64) -> Result<Self> {
        if !(lambda1 > 0.0 && lambda2 > 0.0 && lambda12 >= 0.0)
            || !(lambda1.is_finite() && lambda2.is_finite() && lambda12.is_finite())
        {
            return Err(Error::domain(format!(
                "Block–Basu needs λ1, λ2 > 0 and λ12 ≥ 0, got ({lambda1}, {lambda2}, {lambda12})"
            )));
        }
        Ok(BlockBasu {
            lambda1,
            lambda2,
            lambda12,
        })
    }

    /// Mixture weight `θ = λ*/λ` with `λ = λ1 + λ2`, `λ* = λ + λ12`.
    pub fn theta(&self) -> f64 {
        let l = self.lambda1 + self.lambda2;
        (l + self.lambda12) / l
    }

    /// Joint survival `θ·Ĉ_MO(û; λ12/λ1, λ12/λ2) + (1−θ)·min(û1^{λ*/λ1}, û2^{λ*/λ2})`.
    pub fn sf(&self, x1: f64, x2: f64) -> Result<f64> {
        let m1 = MarginalModel::exponential(self.lambda1)?;
        let m2 = MarginalModel::exponential(self.lambda2)?;
        let uhat = [m1.sf(x1)?, m2.sf(x2)?];
        let theta = self.theta();
        let star = self.lambda1 + self.lambda2 + self.lambda12;
        let mo_term = if self.lambda12 == 0.0 {
            uhat[0] * uhat[1]
        } else {
            let mo = CopulaSpec::bivariate(crate::copulas::Family::MarshallOlkin {
                alphas: vec![self.lambda12 / self.lambda1, self.lambda12 / self.lambda2],
            });
            mo.survival_value(&uhat)?
        };
        let min_term = uhat[0]
            .powf(star / self.lambda1)
            .min(uhat[1].powf(star / self.lambda2));
        Ok(theta * mo_term + (1.0 - theta) * min_term)
    }
}
