//! Stochastic orderings between dependent and independent systems, certified
//! by the monotonicity of copula ratios along a time grid.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::copulas::{CopulaSpec, Family};
use crate::error::{Error, Result};
use crate::marginals::{Lifetime, MarginalModel};
use crate::numeric;
use crate::systems::{Coupling, Mode, Structure, SystemSpec, UNDERFLOW};

/// Points of the default grid.
pub const GRID_POINTS: usize = 64;
/// Fewest points a monotonicity verdict is based on.
pub const MIN_POINTS: usize = 16;
/// Rounds of ×8 refinement around sign changes.
pub const REFINE_BUDGET: usize = 3;
/// Relative tolerance on successive differences.
pub const STEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RatioKind {
    /// `C(u)/∏u`, governs the parallel system.
    #[serde(rename = "C_over_C1")]
    COverC1,
    /// `Ĉ(û)/∏û`, governs the series system.
    #[serde(rename = "Chat_over_Chat1")]
    ChatOverChat1,
    /// `C(u)/Ĉ(û)`, parallel against series with dependent components.
    #[serde(rename = "C_over_Chat")]
    COverChat,
}

impl fmt::Display for RatioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioKind::COverC1 => "C/C1",
            RatioKind::ChatOverChat1 => "Ĉ/Ĉ1",
            RatioKind::COverChat => "C/Ĉ",
        })
    }
}

struct RatioModel {
    parallel: SystemSpec,
    series: SystemSpec,
}

impl RatioModel {
    fn new(c: &CopulaSpec, marginals: &[MarginalModel], coupling: Coupling) -> Result<Self> {
        let parallel = SystemSpec::new(c.clone(), marginals.to_vec(), Structure::Parallel, Mode::Dependent)?
            .with_coupling(coupling);
        let series = SystemSpec::new(c.clone(), marginals.to_vec(), Structure::Series, Mode::Dependent)?
            .with_coupling(coupling);
        Ok(RatioModel { parallel, series })
    }

    fn at(&self, kind: RatioKind, t: f64) -> Result<f64> {
        let (num, den) = match kind {
            RatioKind::COverC1 => (
                self.parallel.cdf(t)?,
                self.parallel.with_mode(Mode::Independent).cdf(t)?,
            ),
            RatioKind::ChatOverChat1 => (
                self.series.sf(t)?,
                self.series.with_mode(Mode::Independent).sf(t)?,
            ),
            RatioKind::COverChat => (self.parallel.cdf(t)?, self.series.sf(t)?),
        };
        if den <= UNDERFLOW {
            return Err(Error::Singularity {
                t,
                what: format!("{kind} denominator {den:e} underflows"),
            });
        }
        Ok(num / den)
    }
}

/// Pointwise copula ratio on `grid` (distribution coupling).
pub fn ratio_profile(c: &CopulaSpec, marginals: &[MarginalModel], kind: RatioKind, grid: &[f64]) -> Result<Vec<f64>> {
    ratio_profile_with(c, marginals, Coupling::Distribution, kind, grid)
}

pub fn ratio_profile_with(
    c: &CopulaSpec,
    marginals: &[MarginalModel],
    coupling: Coupling,
    kind: RatioKind,
    grid: &[f64],
) -> Result<Vec<f64>> {
    let model = RatioModel::new(c, marginals, coupling)?;
    grid.iter().map(|&t| model.at(kind, t)).collect()
}

/// Lowest value of `∏ F̄_i` the default grid reaches.
pub const GRID_SF_FLOOR: f64 = 1e-10;

/// 64 log-spaced points between the 0.1% and 99.9% quantiles of the marginal
/// with the longest upper quantile. The upper end is pulled in to where
/// `∏ F̄_i(t)` reaches [`GRID_SF_FLOOR`], so series ratios stay defined when
/// the marginals decay at very different speeds.
pub fn default_grid(marginals: &[MarginalModel]) -> Result<Vec<f64>> {
    let slowest = marginals
        .iter()
        .map(|m| Ok((m.quantile(0.999)?, m)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::domain("no marginals"))?;
    let lo = slowest.1.quantile(0.001)?;
    let log_sf = |t: f64| -> Result<f64> { marginals.iter().map(|m| Ok(m.sf(t)?.ln())).sum() };
    let floor = GRID_SF_FLOOR.ln();
    let mut hi = slowest.0;
    if log_sf(hi)? < floor {
        let mut a = lo;
        for _ in 0..200 {
            let mid = 0.5 * (a + hi);
            if log_sf(mid)? < floor {
                hi = mid;
            } else {
                a = mid;
            }
        }
        hi = a;
    }
    Ok(numeric::log_space(lo, hi, GRID_POINTS))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    NonMonotone,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Increasing => "increasing",
            Monotonicity::Decreasing => "decreasing",
            Monotonicity::Constant => "constant",
            Monotonicity::NonMonotone => "non_monotone",
        })
    }
}

impl Monotonicity {
    pub fn arrow(self) -> &'static str {
        match self {
            Monotonicity::Increasing => "↑",
            Monotonicity::Decreasing => "↓",
            Monotonicity::Constant => "=",
            Monotonicity::NonMonotone => "↑↓",
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Monotonicity::Increasing => Monotonicity::Decreasing,
            Monotonicity::Decreasing => Monotonicity::Increasing,
            other => other,
        }
    }
}

/// Two grid points whose values move in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: [f64; 2],
    pub value: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityVerdict {
    pub classification: Monotonicity,
    /// First strictly rising step, when the profile is non-monotone.
    pub rising: Option<Witness>,
    /// First strictly falling step, when the profile is non-monotone.
    pub falling: Option<Witness>,
    /// Grid points at which the direction reverses.
    pub turning_points: Vec<f64>,
    /// Grid the verdict is certified on (after refinement).
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

fn step_signs(values: &[f64]) -> Vec<i8> {
    values
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            let tol = STEP_TOL * (1.0 + w[0].abs().max(w[1].abs()));
            if d > tol {
                1
            } else if d < -tol {
                -1
            } else {
                0
            }
        })
        .collect()
}

fn pattern(signs: &[i8]) -> Monotonicity {
    let up = signs.contains(&1);
    let down = signs.contains(&-1);
    match (up, down) {
        (false, false) => Monotonicity::Constant,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (true, true) => Monotonicity::NonMonotone,
    }
}

/// Sign pattern of successive differences, each compared against
/// `1e−9·(1 + |value|)`.
pub fn classify_monotonicity(values: &[f64]) -> Result<Monotonicity> {
    if values.len() < MIN_POINTS {
        return Err(Error::domain(format!(
            "monotonicity needs at least {MIN_POINTS} points, got {}",
            values.len()
        )));
    }
    Ok(pattern(&step_signs(values)))
}

/// Classifies `f` on `grid`, refining ×8 around sign changes up to `budget`
/// rounds before declaring the profile non-monotone.
pub fn classify_profile<F>(f: F, grid: &[f64], budget: usize) -> Result<MonotonicityVerdict>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut grid = grid.to_vec();
    let mut values = grid.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let first = classify_monotonicity(&values)?;
    if first == Monotonicity::NonMonotone {
        for _ in 0..budget {
            let changes = sign_changes(&step_signs(&values));
            if changes.is_empty() {
                break;
            }
            let mut extra = Vec::new();
            for (i, j) in changes {
                let (lo, hi) = (grid[i], grid[j + 1]);
                for k in i..=j {
                    let (a, b) = (grid[k], grid[k + 1]);
                    extra.extend((1..8).map(|s| a + (b - a) * s as f64 / 8.0));
                }
                debug_assert!(lo < hi);
            }
            let mut merged: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();
            for t in extra {
                merged.push((t, f(t)?));
            }
            merged.sort_by(|a, b| a.0.total_cmp(&b.0));
            merged.dedup_by(|a, b| a.0 == b.0);
            grid = merged.iter().map(|p| p.0).collect();
            values = merged.iter().map(|p| p.1).collect();
        }
    }
    Ok(verdict_from(grid, values))
}

// Pairs (i, j) of consecutive non-zero steps with opposite signs.
fn sign_changes(signs: &[i8]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for (j, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if let Some(i) = last {
            if signs[i] != s {
                out.push((i, j));
            }
        }
        last = Some(j);
    }
    out
}

/// Verdict with witnesses and turning points for values already on a grid.
pub fn verdict_from(grid: Vec<f64>, values: Vec<f64>) -> MonotonicityVerdict {
    let signs = step_signs(&values);
    let classification = pattern(&signs);
    let witness = |dir: i8| {
        signs.iter().position(|&s| s == dir).map(|k| Witness {
            t: [grid[k], grid[k + 1]],
            value: [values[k], values[k + 1]],
        })
    };
    let (rising, falling) = if classification == Monotonicity::NonMonotone {
        (witness(1), witness(-1))
    } else {
        (None, None)
    };
    let turning_points = sign_changes(&signs).into_iter().map(|(_, j)| grid[j]).collect();
    MonotonicityVerdict {
        classification,
        rising,
        falling,
        turning_points,
        grid,
        values,
    }
}

/// Monotonicity of a copula ratio over `grid`.
pub fn ratio_monotonicity(
    c: &CopulaSpec,
    marginals: &[MarginalModel],
    coupling: Coupling,
    kind: RatioKind,
    grid: &[f64],
) -> Result<MonotonicityVerdict> {
    let model = RatioModel::new(c, marginals, coupling)?;
    classify_profile(|t| model.at(kind, t), grid, REFINE_BUDGET)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Rhr,
    Hr,
    St,
    Mrl,
    Lr,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Rhr => "rhr",
            Relation::Hr => "hr",
            Relation::St => "st",
            Relation::Mrl => "mrl",
            Relation::Lr => "lr",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "D_ge_I")]
    DGeI,
    #[serde(rename = "D_le_I")]
    DLeI,
    #[serde(rename = "equal")]
    Equal,
    #[serde(rename = "none")]
    None,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::DGeI => "D_ge_I",
            Direction::DLeI => "D_le_I",
            Direction::Equal => "equal",
            Direction::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingVerdict {
    pub structure: Structure,
    pub relation: Relation,
    pub direction: Direction,
    pub ratio: RatioKind,
    pub derived_from: MonotonicityVerdict,
    pub implied: Vec<Relation>,
}

impl OrderingVerdict {
    /// Reads an ordering off the ratio verdict: `C/C1` licenses the
    /// reversed-hazard order of parallel systems (then `st`), `Ĉ/Ĉ1` the
    /// hazard order of series systems (then `mrl` and `st`).
    pub fn from_monotonicity(structure: Structure, derived_from: MonotonicityVerdict) -> Self {
        let (relation, ratio, weaker) = match structure {
            Structure::Parallel => (Relation::Rhr, RatioKind::COverC1, vec![Relation::St]),
            Structure::Series => (Relation::Hr, RatioKind::ChatOverChat1, vec![Relation::Mrl, Relation::St]),
        };
        let direction = match derived_from.classification {
            Monotonicity::Increasing => Direction::DGeI,
            Monotonicity::Decreasing => Direction::DLeI,
            Monotonicity::Constant => Direction::Equal,
            Monotonicity::NonMonotone => Direction::None,
        };
        let implied = if direction == Direction::None { vec![] } else { weaker };
        OrderingVerdict {
            structure,
            relation,
            direction,
            ratio,
            derived_from,
            implied,
        }
    }

    /// Human-readable statement, e.g. `T_S^D ≥_hr T_S^I`.
    pub fn statement(&self) -> String {
        let s = match self.structure {
            Structure::Series => "S",
            Structure::Parallel => "P",
        };
        let op = match self.direction {
            Direction::DGeI => "≥",
            Direction::DLeI => "≤",
            Direction::Equal => "=",
            Direction::None => return format!("no {} order between T_{s}^D and T_{s}^I", self.relation),
        };
        format!("T_{s}^D {op}_{} T_{s}^I", self.relation)
    }

    /// Whether the verdict certifies `D ≥_st I` or `D ≤_st I`.
    pub fn st_direction(&self) -> Option<Direction> {
        (self.implied.contains(&Relation::St) && self.direction != Direction::Equal).then_some(self.direction)
    }
}

/// Ordering between the dependent and independent systems on the default grid.
pub fn infer_ordering(c: &CopulaSpec, marginals: &[MarginalModel], structure: Structure) -> Result<OrderingVerdict> {
    infer_ordering_with(c, marginals, structure, Coupling::Distribution, &default_grid(marginals)?)
}

pub fn infer_ordering_with(
    c: &CopulaSpec,
    marginals: &[MarginalModel],
    structure: Structure,
    coupling: Coupling,
    grid: &[f64],
) -> Result<OrderingVerdict> {
    let kind = match structure {
        Structure::Parallel => RatioKind::COverC1,
        Structure::Series => RatioKind::ChatOverChat1,
    };
    let m = ratio_monotonicity(c, marginals, coupling, kind, grid)?;
    let mut verdict = OrderingVerdict::from_monotonicity(structure, m);
    // with K(1, …, 1) < 1 the dependent "system" is not a distribution: the
    // rate order stands but nothing follows for st or mrl
    let corner = c.value(&vec![1.0; c.dim()])?;
    if (corner - 1.0).abs() > 1e-12 {
        verdict.implied.clear();
    }
    Ok(verdict)
}

/// Smallest `sf_D − sf_I` (or `sf_I − sf_D`) implied by a certified `st`
/// verdict, over a grid ten times finer than the one it was certified on.
/// `None` when the verdict certifies no `st` order.
pub fn st_soundness_slack(
    verdict: &OrderingVerdict,
    c: &CopulaSpec,
    marginals: &[MarginalModel],
    coupling: Coupling,
) -> Result<Option<f64>> {
    let Some(direction) = verdict.st_direction() else {
        return Ok(None);
    };
    let g = &verdict.derived_from.grid;
    let (lo, hi) = (g[0], g[g.len() - 1]);
    let fine = if lo > 0.0 {
        numeric::log_space(lo, hi, 10 * (g.len() - 1) + 1)
    } else {
        numeric::lin_space(lo, hi, 10 * (g.len() - 1) + 1)
    };
    let dep = SystemSpec::new(c.clone(), marginals.to_vec(), verdict.structure, Mode::Dependent)?.with_coupling(coupling);
    let ind = dep.with_mode(Mode::Independent);
    let sign = if direction == Direction::DGeI { 1.0 } else { -1.0 };
    let mut worst = f64::INFINITY;
    for t in fine {
        worst = worst.min(sign * (dep.sf(t)? - ind.sf(t)?));
    }
    Ok(Some(worst))
}

/// Outcome of the four survival-function inequalities between parallel and
/// series systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Check {
    pub pass: bool,
    pub worst_slack: f64,
    pub worst_t: f64,
    pub worst_inequality: String,
}

/// Slack tolerated in each inequality.
pub const THEOREM1_SLACK: f64 = -1e-10;

/// Checks `F̄_P^a(t) ≥ F̄_S^b(t)` for `a, b ∈ {D, I}` at every grid point.
pub fn verify_theorem1(c: &CopulaSpec, marginals: &[MarginalModel], grid: &[f64]) -> Result<Theorem1Check> {
    verify_theorem1_with(c, marginals, Coupling::Distribution, grid)
}

pub fn verify_theorem1_with(
    c: &CopulaSpec,
    marginals: &[MarginalModel],
    coupling: Coupling,
    grid: &[f64],
) -> Result<Theorem1Check> {
    let pd = SystemSpec::new(c.clone(), marginals.to_vec(), Structure::Parallel, Mode::Dependent)?.with_coupling(coupling);
    let sd = SystemSpec::new(c.clone(), marginals.to_vec(), Structure::Series, Mode::Dependent)?.with_coupling(coupling);
    let (pi, si) = (pd.with_mode(Mode::Independent), sd.with_mode(Mode::Independent));
    let mut out = Theorem1Check {
        pass: true,
        worst_slack: f64::INFINITY,
        worst_t: f64::NAN,
        worst_inequality: String::new(),
    };
    for &t in grid {
        let (p_d, p_i, s_d, s_i) = (pd.sf(t)?, pi.sf(t)?, sd.sf(t)?, si.sf(t)?);
        for (name, slack) in [
            ("F̄_P^I ≥ F̄_S^I", p_i - s_i),
            ("F̄_P^I ≥ F̄_S^D", p_i - s_d),
            ("F̄_P^D ≥ F̄_S^I", p_d - s_i),
            ("F̄_P^D ≥ F̄_S^D", p_d - s_d),
        ] {
            if slack < out.worst_slack {
                out.worst_slack = slack;
                out.worst_t = t;
                out.worst_inequality = name.to_string();
            }
        }
    }
    out.pass = out.worst_slack >= THEOREM1_SLACK;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityCheck {
    pub pass: bool,
    pub copula_ratio: MonotonicityVerdict,
    pub survival_ratio: MonotonicityVerdict,
}

/// For a radially symmetric copula `C/∏u` and `Ĉ/∏û` move in opposite directions.
pub fn check_radial_duality(c: &CopulaSpec, marginals: &[MarginalModel], grid: &[f64]) -> Result<DualityCheck> {
    if !c.radially_symmetric() {
        return Err(Error::domain(format!("{} is not radially symmetric", c.kind())));
    }
    let copula_ratio = ratio_monotonicity(c, marginals, Coupling::Distribution, RatioKind::COverC1, grid)?;
    let survival_ratio = ratio_monotonicity(c, marginals, Coupling::Distribution, RatioKind::ChatOverChat1, grid)?;
    let (a, b) = (copula_ratio.classification, survival_ratio.classification);
    let pass = a != Monotonicity::NonMonotone && b == a.reversed();
    Ok(DualityCheck {
        pass,
        copula_ratio,
        survival_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrCheck {
    pub pass: bool,
    /// `f_P^D / f_P^I` on the grid.
    pub ratio: Vec<f64>,
    /// Largest increase between successive grid points.
    pub worst_increase: f64,
}

/// Tolerance on increases of the density ratio.
pub const LR_TOL: f64 = 1e-8;

/// Likelihood-ratio order of parallel systems under the linear Spearman
/// copula with `θ ∈ [0, 1]`: when both marginal reversed hazards decrease,
/// `f_P^D/f_P^I` must be nonincreasing.
pub fn check_lr_linear_spearman<L: Lifetime>(theta: f64, marginals: &[L], grid: &[f64]) -> Result<LrCheck> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::domain(format!("θ = {theta} outside [0, 1]")));
    }
    let [m1, m2] = marginals else {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: marginals.len(),
        });
    };
    for m in [m1, m2] {
        let rhr = grid.iter().map(|&t| m.reversed_hazard(t)).collect::<Result<Vec<_>>>()?;
        if let Some(w) = rhr.windows(2).find(|w| w[1] > w[0] * (1.0 + 1e-12)) {
            return Err(Error::domain(format!(
                "marginal reversed hazard increases ({} → {}); the order needs it decreasing",
                w[0], w[1]
            )));
        }
    }
    let c = CopulaSpec::bivariate(Family::LinearSpearman { theta });
    c.validate()?;
    let joint = |t: f64| c.value(&[m1.cdf(t)?, m2.cdf(t)?]);
    let mut ratio = Vec::with_capacity(grid.len());
    for &t in grid {
        let f_dep = numeric::richardson(&joint, t, numeric::default_step(t))?;
        let f_ind = m1.pdf(t)? * m2.cdf(t)? + m1.cdf(t)? * m2.pdf(t)?;
        if f_ind <= UNDERFLOW {
            return Err(Error::Singularity {
                t,
                what: "independent parallel density underflows".into(),
            });
        }
        ratio.push(f_dep / f_ind);
    }
    let worst_increase = ratio
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(LrCheck {
        pass: ratio.len() < 2 || worst_increase <= LR_TOL,
        ratio,
        worst_increase,
    })
}

/// Where the extended Rodríguez-Lallena–Úbeda-Flores ratio `C/∏u` must rise
/// and fall, with `k_i = (a_i − 1)/(a_i + b_i − 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RluThresholdCheck {
    /// `min_i F_i^{-1}(k_i)`: the ratio increases before this time.
    pub rise_until: f64,
    /// `max_i F_i^{-1}(k_i)`: the ratio decreases after this time.
    pub fall_from: f64,
    pub rising_ok: bool,
    pub falling_ok: bool,
    pub pass: bool,
}

pub fn rlu_thresholds(c: &CopulaSpec, marginals: &[MarginalModel]) -> Result<(f64, f64)> {
    let Family::RluExtended { a, b, .. } = c.family() else {
        return Err(Error::domain(format!("{} has no thresholds", c.kind())));
    };
    if marginals.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: marginals.len(),
        });
    }
    let times = a
        .iter()
        .zip(b)
        .zip(marginals)
        .map(|((ai, bi), m)| m.quantile((ai - 1.0) / (ai + bi - 1.0)))
        .collect::<Result<Vec<_>>>()?;
    let lo = times.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Checks the rise/fall pattern of `C/∏u` on either side of the thresholds.
pub fn check_rlu_thresholds(c: &CopulaSpec, marginals: &[MarginalModel], grid: &[f64]) -> Result<RluThresholdCheck> {
    let (rise_until, fall_from) = rlu_thresholds(c, marginals)?;
    let values = ratio_profile(c, marginals, RatioKind::COverC1, grid)?;
    let side = |keep: &dyn Fn(f64) -> bool, dir: i8| {
        let v: Vec<f64> = grid
            .iter()
            .zip(&values)
            .filter(|(t, _)| keep(**t))
            .map(|(_, v)| *v)
            .collect();
        step_signs(&v).iter().all(|&s| s != -dir)
    };
    let rising_ok = side(&|t| t <= rise_until, 1);
    let falling_ok = side(&|t| t >= fall_from, -1);
    Ok(RluThresholdCheck {
        rise_until,
        fall_from,
        rising_ok,
        falling_ok,
        pass: rising_ok && falling_ok,
    })
}

/// `A + B = ∏(1−α+αu_i) − α∏u_i`, with `C/∏u = (1−α)/(A+B)` for AMH.
pub fn amh_a_plus_b(alpha: f64, u: &[f64]) -> f64 {
    let a: f64 = u.iter().map(|x| 1.0 - alpha + alpha * x).product();
    let b: f64 = -alpha * u.iter().product::<f64>();
    a + b
}

/// `d(A+B)/dt = Σ_i α(∏_{j≠i}(1−α+αu_j) − ∏_{j≠i}u_j)·u_i'(t)`.
pub fn amh_a_plus_b_derivative(alpha: f64, marginals: &[MarginalModel], t: f64) -> Result<f64> {
    let u = marginals.iter().map(|m| m.cdf(t)).collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for (i, m) in marginals.iter().enumerate() {
        let others = u.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x);
        let p: f64 = others.clone().map(|x| 1.0 - alpha + alpha * x).product();
        let q: f64 = others.product();
        total += alpha * (p - q) * m.pdf(t)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn exp2() -> Vec<MarginalModel> {
        vec![MarginalModel::exponential(1.0).unwrap(); 2]
    }

    fn biv(f: Family) -> CopulaSpec {
        CopulaSpec::bivariate(f)
    }

    #[test]
    fn ratio_examples() {
        let grid = default_grid(&exp2()).unwrap();
        let ones = ratio_profile(&CopulaSpec::independence(2), &exp2(), RatioKind::COverC1, &grid).unwrap();
        assert!(ones.iter().all(|&v| v == 1.0));
        let fgm = biv(Family::Fgm { alpha: 0.5 });
        let r = ratio_profile(&fgm, &exp2(), RatioKind::COverC1, &[LN_2]).unwrap();
        assert_relative_eq!(r[0], 1.125, epsilon = 1e-14);
        let r = ratio_profile(&fgm, &exp2(), RatioKind::COverChat, &[LN_2]).unwrap();
        assert_relative_eq!(r[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_monotonicity(&[2.0; 16]).unwrap(), Monotonicity::Constant);
        assert!(classify_monotonicity(&[1.0; 15]).is_err());
        let v = grid_verdict(biv(Family::Fgm { alpha: 0.5 }), RatioKind::COverC1);
        assert_eq!(v.classification, Monotonicity::Decreasing);
    }

    fn grid_verdict(c: CopulaSpec, kind: RatioKind) -> MonotonicityVerdict {
        ratio_monotonicity(&c, &exp2(), Coupling::Distribution, kind, &default_grid(&exp2()).unwrap()).unwrap()
    }

    #[test]
    fn rlu_turning_point_and_witnesses() {
        let c = biv(Family::RluExtended {
            a: vec![2.0, 2.0],
            b: vec![3.0, 3.0],
            alpha: 1.0,
        });
        let v = grid_verdict(c.clone(), RatioKind::COverC1);
        assert_eq!(v.classification, Monotonicity::NonMonotone);
        let threshold = exp2()[0].quantile(0.25).unwrap();
        let rise = v.rising.unwrap();
        let fall = v.falling.unwrap();
        assert!(rise.t[0] < threshold && fall.t[1] > threshold);
        assert_eq!(v.turning_points.len(), 1);
        let tp = v.turning_points[0];
        assert!((tp - threshold).abs() < 0.02, "turning point {tp} vs {threshold}");
        let check = check_rlu_thresholds(&c, &exp2(), &default_grid(&exp2()).unwrap()).unwrap();
        assert!(check.pass, "{check:?}");
        assert_relative_eq!(check.rise_until, threshold, max_relative = 1e-14);
        for w in [rise, fall] {
            for k in 0..2 {
                let again = ratio_profile(&c, &exp2(), RatioKind::COverC1, &[w.t[k]]).unwrap()[0];
                assert!((again - w.value[k]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn ordering_examples() {
        let gh = biv(Family::GumbelHougaard { alpha: 2.0 });
        let v = infer_ordering(&gh, &exp2(), Structure::Series).unwrap();
        assert_eq!((v.relation, v.direction), (Relation::Hr, Direction::DGeI));
        assert_eq!(v.implied, vec![Relation::Mrl, Relation::St]);
        let amh = biv(Family::Amh { alpha: -0.5 });
        let v = infer_ordering(&amh, &exp2(), Structure::Parallel).unwrap();
        assert_eq!((v.relation, v.direction), (Relation::Rhr, Direction::DGeI));
        assert_eq!(v.statement(), "T_P^D ≥_rhr T_P^I");
        let n10 = biv(Family::NelsenTen { alpha: 1.0 });
        let v = infer_ordering(&n10, &exp2(), Structure::Series).unwrap();
        assert_eq!((v.relation, v.direction), (Relation::Hr, Direction::DLeI));
    }

    #[test]
    fn theorem1_examples() {
        let grid = default_grid(&exp2()).unwrap();
        for c in [
            CopulaSpec::independence(2),
            biv(Family::Fgm { alpha: -1.0 }),
            biv(Family::MarshallOlkin { alphas: vec![0.5, 0.5] }),
        ] {
            let r = verify_theorem1(&c, &exp2(), &grid).unwrap();
            assert!(r.pass, "{c:?}: {r:?}");
        }
        let r = verify_theorem1(&CopulaSpec::independence(2), &exp2(), &grid).unwrap();
        assert!(r.worst_slack >= 0.0);
    }

    #[test]
    fn duality_examples() {
        let grid = default_grid(&exp2()).unwrap();
        for c in [
            biv(Family::Fgm { alpha: 0.5 }),
            biv(Family::Fgm { alpha: 0.0 }),
            biv(Family::FischerKock { r: 2.0, alpha: -0.5 }),
        ] {
            assert!(check_radial_duality(&c, &exp2(), &grid).unwrap().pass, "{c:?}");
        }
        let clayton = biv(Family::Clayton { alpha: 1.0 });
        assert!(matches!(check_radial_duality(&clayton, &exp2(), &grid), Err(Error::Domain(_))));
    }

    // Uniform on [0, 1) with half the mass, then an exponential tail: the
    // reversed hazard jumps up at t = 1.
    struct Spliced;

    impl Lifetime for Spliced {
        fn cdf(&self, t: f64) -> Result<f64> {
            Ok(if t < 1.0 { 0.5 * t } else { 1.0 - 0.5 * (-5.0 * (t - 1.0)).exp() })
        }
        fn sf(&self, t: f64) -> Result<f64> {
            Ok(1.0 - self.cdf(t)?)
        }
        fn pdf(&self, t: f64) -> Result<f64> {
            Ok(if t < 1.0 { 0.5 } else { 2.5 * (-5.0 * (t - 1.0)).exp() })
        }
        fn reversed_hazard(&self, t: f64) -> Result<f64> {
            Ok(self.pdf(t)? / self.cdf(t)?)
        }
    }

    #[test]
    fn lr_examples() {
        let grid = default_grid(&exp2()).unwrap();
        let r = check_lr_linear_spearman(0.0, &exp2(), &grid).unwrap();
        assert!(r.pass);
        assert!(r.ratio.iter().all(|v| (v - 1.0).abs() < 1e-8));
        assert!(check_lr_linear_spearman(0.5, &exp2(), &grid).unwrap().pass);
        assert!(matches!(check_lr_linear_spearman(1.5, &exp2(), &grid), Err(Error::Domain(_))));
        let lin = numeric::lin_space(0.1, 3.0, 30);
        assert!(matches!(
            check_lr_linear_spearman(0.5, &[Spliced, Spliced], &lin),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn amh_derivative_sign() {
        for (alpha, sign) in [(0.5, 1.0), (-0.5, -1.0)] {
            for t in [0.1, 0.7, 2.0] {
                let d = amh_a_plus_b_derivative(alpha, &exp2(), t).unwrap();
                assert!(sign * d > 0.0);
                let f = |x: f64| {
                    let u: Vec<f64> = exp2().iter().map(|m| m.cdf(x).unwrap()).collect();
                    Ok(amh_a_plus_b(alpha, &u))
                };
                let fd = numeric::richardson(&f, t, 1e-3).unwrap();
                assert_relative_eq!(d, fd, max_relative = 1e-7);
            }
        }
    }
}
