//! Copula families and their survival copulas on the unit hypercube.
//!
//! A [`CopulaSpec`] pairs a [`Family`] (with its parameters) with a dimension.
//! Specs may hold out-of-domain parameters; [`CopulaSpec::validate`] reports
//! every violation and every evaluation entry point rejects invalid specs.

mod params;
mod survival;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use params::FamilyKind;
pub use survival::{complement_expansion, poincare_survival, MAX_EXPANSION_DIM};
pub(crate) use survival::expansion_tail;

/// Fischer–Hinzmann has two readings of where `α` sits relative to the power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HinzmannForm {
    /// `[{α·min u}^m + {(1−α)·∏u}^m]^{1/m}`
    Literal,
    /// `[α·(min u)^m + (1−α)·(∏u)^m]^{1/m}`, a proper copula.
    Corrected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Independence,
    Fgm { alpha: f64 },
    FischerKock { r: f64, alpha: f64 },
    Clayton { alpha: f64 },
    GumbelHougaard { alpha: f64 },
    GumbelBarnet { alpha: f64 },
    NelsenTen { alpha: f64 },
    MarshallOlkin { alphas: Vec<f64> },
    Amh { alpha: f64 },
    FischerHinzmann { m: f64, alpha: f64, form: HinzmannForm },
    RluExtended { a: Vec<f64>, b: Vec<f64>, alpha: f64 },
    LinearSpearman { theta: f64 },
}

/// A copula family together with its dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopulaSpec {
    family: Family,
    dim: usize,
}

impl CopulaSpec {
    /// Builds a spec without checking parameter domains (see [`validate`](Self::validate)).
    /// The dimension of vector-parameter families is taken from their vectors.
    pub fn new(family: Family, dim: usize) -> Self {
        let dim = match &family {
            Family::MarshallOlkin { alphas } => alphas.len(),
            Family::RluExtended { a, .. } => a.len(),
            Family::LinearSpearman { .. } => 2,
            _ => dim,
        };
        CopulaSpec { family, dim }
    }

    pub fn bivariate(family: Family) -> Self {
        Self::new(family, 2)
    }

    pub fn independence(dim: usize) -> Self {
        Self::new(Family::Independence, dim)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn kind(&self) -> FamilyKind {
        FamilyKind::of(&self.family)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Re-dimensions a scalar-parameter family; vector families must already match.
    pub fn with_dimension(&self, n: usize) -> Result<Self> {
        match &self.family {
            Family::MarshallOlkin { .. } | Family::RluExtended { .. } | Family::LinearSpearman { .. } => {
                if self.dim == n {
                    Ok(self.clone())
                } else {
                    Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: n,
                    })
                }
            }
            _ => Ok(CopulaSpec {
                family: self.family.clone(),
                dim: n,
            }),
        }
    }

    /// Families whose survival copula is obtained by substituting `û` for `u`.
    pub fn radially_symmetric(&self) -> bool {
        matches!(
            self.family,
            Family::Fgm { .. }
                | Family::FischerKock { .. }
                | Family::MarshallOlkin { .. }
                | Family::FischerHinzmann {
                    form: HinzmannForm::Literal,
                    ..
                }
        )
    }

    /// Families whose literal formula does not have uniform margins.
    pub fn margin_axiom_exempt(&self) -> bool {
        matches!(
            self.family,
            Family::MarshallOlkin { .. }
                | Family::FischerHinzmann {
                    form: HinzmannForm::Literal,
                    ..
                }
        )
    }

    pub fn is_independence(&self) -> bool {
        matches!(self.family, Family::Independence)
    }

    fn check_point(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        if let Some(x) = u.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::domain(format!("copula argument {x} outside [0, 1]")));
        }
        Ok(())
    }

    /// `C(u)` for a validated spec and a point of the unit hypercube.
    pub fn value(&self, u: &[f64]) -> Result<f64> {
        self.validate()?;
        self.check_point(u)?;
        Ok(self.eval(u))
    }

    /// `Ĉ(û)`: substitution for radially symmetric families, inclusion–exclusion otherwise.
    pub fn survival_value(&self, uhat: &[f64]) -> Result<f64> {
        self.validate()?;
        self.check_point(uhat)?;
        if self.radially_symmetric() {
            Ok(self.eval(uhat))
        } else {
            complement_expansion(self, uhat)
        }
    }

    /// Formula evaluation; assumes the spec is valid and `u` lies in the hypercube.
    pub(crate) fn eval(&self, u: &[f64]) -> f64 {
        if u.contains(&0.0) {
            return 0.0;
        }
        let prod: f64 = u.iter().product();
        let n = u.len() as f64;
        let v = match &self.family {
            Family::Independence => prod,
            Family::Fgm { alpha } => {
                let tail: f64 = u.iter().map(|x| 1.0 - x).product();
                prod * (1.0 + alpha * tail)
            }
            Family::FischerKock { r, alpha } => {
                let tail: f64 = u.iter().map(|x| 1.0 - x.powf(1.0 / r)).product();
                prod * (1.0 + alpha * tail).powf(*r)
            }
            Family::Clayton { alpha } => {
                let s: f64 = u.iter().map(|x| x.powf(-alpha)).sum::<f64>() - (n - 1.0);
                s.max(0.0).powf(-1.0 / alpha)
            }
            Family::GumbelHougaard { alpha } => {
                let s: f64 = u.iter().map(|x| (-x.ln()).powf(*alpha)).sum();
                (-s.powf(1.0 / alpha)).exp()
            }
            Family::GumbelBarnet { alpha } => {
                let logs: f64 = u.iter().map(|x| x.ln()).product();
                prod * (-alpha * logs).exp()
            }
            Family::NelsenTen { alpha } => {
                let tail: f64 = u.iter().map(|x| 1.0 - x.powf(*alpha)).product();
                prod / (1.0 + tail).powf(1.0 / alpha)
            }
            Family::MarshallOlkin { alphas } => {
                let m = u
                    .iter()
                    .zip(alphas)
                    .map(|(x, a)| x.powf(*a))
                    .fold(f64::INFINITY, f64::min);
                prod * m
            }
            Family::Amh { alpha } => amh(u, *alpha),
            Family::FischerHinzmann { m, alpha, form } => {
                let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
                let s = match form {
                    HinzmannForm::Literal => (alpha * lo).powf(*m) + ((1.0 - alpha) * prod).powf(*m),
                    HinzmannForm::Corrected => alpha * lo.powf(*m) + (1.0 - alpha) * prod.powf(*m),
                };
                s.powf(1.0 / m)
            }
            Family::RluExtended { a, b, alpha } => {
                let bump: f64 = u
                    .iter()
                    .zip(a.iter().zip(b))
                    .map(|(x, (ai, bi))| x.powf(*ai) * (1.0 - x).powf(*bi))
                    .product();
                prod + alpha * bump
            }
            Family::LinearSpearman { theta } => linear_spearman(u[0], u[1], *theta),
        };
        v.clamp(0.0, 1.0)
    }
}

// (1−α)/{∏((1−α)/u_i + α) − α}, rewritten with d = 1−α and w_i = (1−u_i)/u_i as
// 1/(1 + expm1(Σ ln(1 + d·w_i))/d) so that α → 1 (Clayton with parameter 1) is exact.
fn amh(u: &[f64], alpha: f64) -> f64 {
    let d = 1.0 - alpha;
    let w = u.iter().map(|x| (1.0 - x) / x);
    let excess = if d == 0.0 {
        w.sum()
    } else {
        w.map(|wi| (d * wi).ln_1p()).sum::<f64>().exp_m1() / d
    };
    1.0 / (1.0 + excess)
}

// θ ≥ 0: θ·min + (1−θ)·product; θ < 0: (1+θ)·product, plus θ(1−u1)(1−u2) above the anti-diagonal.
fn linear_spearman(u1: f64, u2: f64, theta: f64) -> f64 {
    if theta >= 0.0 {
        if u2 <= u1 {
            u1 * u2 + theta * u2 * (1.0 - u1)
        } else {
            u1 * u2 + theta * u1 * (1.0 - u2)
        }
    } else if u1 + u2 < 1.0 {
        (1.0 + theta) * u1 * u2
    } else {
        u1 * u2 + theta * (1.0 - u1) * (1.0 - u2)
    }
}
