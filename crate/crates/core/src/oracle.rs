//! Independent checks: Monte-Carlo sampling of bivariate lifetimes and a
//! step-size audit of the hazard-error identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assessment::SystemPair;
use crate::copulas::CopulaSpec;
use crate::error::{Error, Result};
use crate::marginals::MarginalModel;
use crate::numeric;
use crate::report;
use crate::systems::{Coupling, Structure};

/// Samples per independently seeded stream.
pub const CHUNK: usize = 4096;
/// Absolute tolerance of the conditional inversion.
pub const INVERSION_TOL: f64 = 1e-10;
/// Largest accepted Richardson discrepancy of the audit.
pub const AUDIT_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub pairs: Vec<[f64; 2]>,
    pub seed: u64,
    pub copula: CopulaSpec,
    pub marginals: Vec<MarginalModel>,
    pub coupling: Coupling,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn to_csv(&self) -> Result<String> {
        let rows = self
            .pairs
            .iter()
            .map(|p| vec![report::number(p[0]), report::number(p[1])]);
        report::csv(&["t1", "t2"], rows)
    }
}

/// `∂K/∂v₁` at `(v₁, v₂)` by a central difference kept inside the unit square.
fn conditional(k: &CopulaSpec, v1: f64, v2: f64) -> f64 {
    let h = 1e-6_f64;
    let lo = (v1 - h).max(0.0);
    let hi = (v1 + h).min(1.0);
    (k.eval(&[hi, v2]) - k.eval(&[lo, v2])) / (hi - lo)
}

/// Solves `∂K/∂v₁(v₁, v₂) = w` for `v₂` by bisection.
fn invert_conditional(k: &CopulaSpec, v1: f64, w: f64) -> Result<f64> {
    let top = conditional(k, v1, 1.0);
    if w > top + 1e-6 {
        return Err(Error::Sampling {
            u1: v1,
            w,
            what: format!("conditional distribution tops out at {top}"),
        });
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > INVERSION_TOL {
        let mid = 0.5 * (lo + hi);
        if conditional(k, v1, mid) < w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Rosenblatt sampling of two dependent lifetimes.
///
/// Under the distribution coupling `(U₁, U₂) ~ C` and `T_i = F_i^{-1}(U_i)`;
/// under the survival coupling `(V₁, V₂) ~ Ĉ` and `T_i = F̄_i^{-1}(V_i)`.
/// Chunk `k` draws from the ChaCha8 stream `k` of `seed`, so the batch is
/// identical for any thread count.
pub fn sample_bivariate(
    c: &CopulaSpec,
    marginals: &[MarginalModel],
    n_samples: usize,
    seed: u64,
    coupling: Coupling,
) -> Result<SampleBatch> {
    if c.dim() != 2 || marginals.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: if c.dim() != 2 { c.dim() } else { marginals.len() },
        });
    }
    c.validate()?;
    let survival = coupling == Coupling::Survival && !c.radially_symmetric();
    let chunks: Vec<usize> = (0..n_samples.div_ceil(CHUNK)).collect();
    let parts = chunks
        .par_iter()
        .map(|&k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let size = CHUNK.min(n_samples - k * CHUNK);
            let mut out = Vec::with_capacity(size);
            for _ in 0..size {
                // open interval keeps both quantile transforms finite
                let v1: f64 = rng.random_range(f64::EPSILON..1.0);
                let w: f64 = rng.random_range(f64::EPSILON..1.0);
                let v2 = invert_conditional(c, v1, w)?.clamp(f64::EPSILON, 1.0 - f64::EPSILON);
                let pair = if survival {
                    [marginals[0].inverse_sf(v1)?, marginals[1].inverse_sf(v2)?]
                } else {
                    [marginals[0].quantile(v1)?, marginals[1].quantile(v2)?]
                };
                out.push(pair);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch {
        pairs: parts.into_iter().flatten().collect(),
        seed,
        copula: c.clone(),
        marginals: marginals.to_vec(),
        coupling,
    })
}

/// A proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    fn proportion(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Estimate {
            value: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }
}

/// Fraction of sampled systems still working at `t`.
pub fn empirical_system_sf(batch: &SampleBatch, structure: Structure, t: f64) -> Result<Estimate> {
    if batch.is_empty() {
        return Err(Error::domain("empty sample batch"));
    }
    let alive = batch
        .pairs
        .iter()
        .filter(|p| match structure {
            Structure::Series => p[0].min(p[1]) > t,
            Structure::Parallel => p[0].max(p[1]) > t,
        })
        .count();
    Ok(Estimate::proportion(alive, batch.len()))
}

/// Empirical copula `P(F₁(T₁) ≤ u₁, F₂(T₂) ≤ u₂)`.
pub fn empirical_copula(batch: &SampleBatch, u: [f64; 2]) -> Result<Estimate> {
    if batch.is_empty() {
        return Err(Error::domain("empty sample batch"));
    }
    let t = [batch.marginals[0].quantile(u[0])?, batch.marginals[1].quantile(u[1])?];
    let hits = batch.pairs.iter().filter(|p| p[0] <= t[0] && p[1] <= t[1]).count();
    Ok(Estimate::proportion(hits, batch.len()))
}

/// One audited quantity at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditCheck {
    pub measure: String,
    pub t: f64,
    /// Richardson value of the log-ratio identity.
    pub identity: f64,
    /// Richardson value of the difference of the two rates.
    pub direct: f64,
    /// `|identity − direct|`.
    pub discrepancy: f64,
    /// Change of the identity value between steps `h` and `2h`.
    pub stencil_change: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub checks: Vec<AuditCheck>,
    pub max_discrepancy: f64,
    pub pass: bool,
    /// Time points at which a rate was undefined and the check was skipped.
    pub skipped: Vec<f64>,
}

impl Audit {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("audit serializes")
    }
}

/// Recomputes the hazard and reversed-hazard error identities at step sizes
/// `h/2`, `h` and `2h` and compares the Richardson-extrapolated identity with
/// the extrapolated difference of the two systems' rates.
pub fn finite_difference_audit(pair: &SystemPair, grid: &[f64]) -> Result<Audit> {
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for &t in grid {
        let h = numeric::default_step(t);
        let hr = || -> Result<AuditCheck> {
            let identity = pair.hr_error_extrapolated(t, h)?;
            let coarse = pair.hr_error_extrapolated(t, 2.0 * h)?;
            let rate = |s: &crate::systems::SystemSpec| numeric::richardson(&|x| s.log_sf(x), t, h).map(|d| -d);
            let direct = rate(&pair.first)? - rate(&pair.second)?;
            Ok(audit_check("hr", t, identity, direct, coarse))
        };
        let rhr = || -> Result<AuditCheck> {
            let identity = pair.rhr_error_extrapolated(t, h)?;
            let coarse = pair.rhr_error_extrapolated(t, 2.0 * h)?;
            let rate = |s: &crate::systems::SystemSpec| numeric::richardson(&|x| s.log_cdf(x), t, h);
            let direct = rate(&pair.first)? - rate(&pair.second)?;
            Ok(audit_check("rhr", t, identity, direct, coarse))
        };
        for r in [hr(), rhr()] {
            match r {
                Ok(c) => checks.push(c),
                Err(e) if e.is_numerical() => skipped.push(t),
                Err(e) => return Err(e),
            }
        }
    }
    let max_discrepancy = checks
        .iter()
        .map(|c| c.discrepancy.max(c.stencil_change))
        .fold(0.0, f64::max);
    Ok(Audit {
        pass: max_discrepancy <= AUDIT_TOL,
        checks,
        max_discrepancy,
        skipped,
    })
}

fn audit_check(measure: &str, t: f64, identity: f64, direct: f64, coarse: f64) -> AuditCheck {
    let discrepancy = (identity - direct).abs();
    let stencil_change = (identity - coarse).abs();
    AuditCheck {
        measure: measure.into(),
        t,
        identity,
        direct,
        discrepancy,
        stencil_change,
        margin: AUDIT_TOL - discrepancy.max(stencil_change),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copulas::Family;

    fn exp2() -> Vec<MarginalModel> {
        vec![MarginalModel::exponential(1.0).unwrap(); 2]
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let c = CopulaSpec::bivariate(Family::Clayton { alpha: 2.0 });
        let a = sample_bivariate(&c, &exp2(), 9000, 7, Coupling::Distribution).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool
            .install(|| sample_bivariate(&c, &exp2(), 9000, 7, Coupling::Distribution))
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 9000);
        assert!(a.pairs.iter().all(|p| p[0] >= 0.0 && p[1] >= 0.0));
        let c2 = sample_bivariate(&c, &exp2(), 9000, 8, Coupling::Distribution).unwrap();
        assert_ne!(a.pairs, c2.pairs);
    }

    #[test]
    fn parallel_sf_at_origin_is_one() {
        let c = CopulaSpec::independence(2);
        let b = sample_bivariate(&c, &exp2(), 500, 1, Coupling::Distribution).unwrap();
        assert_eq!(empirical_system_sf(&b, Structure::Parallel, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn independence_audit_is_clean() {
        let pair = SystemPair::series(CopulaSpec::independence(2), exp2()).unwrap();
        let a = finite_difference_audit(&pair, &[0.1, 0.5, 2.0]).unwrap();
        assert!(a.pass);
        assert!(a.max_discrepancy < 1e-9);
    }

    #[test]
    fn csv_header() {
        let b = sample_bivariate(&CopulaSpec::independence(2), &exp2(), 3, 1, Coupling::Distribution).unwrap();
        assert!(b.to_csv().unwrap().starts_with("t1,t2\n"));
    }
}
