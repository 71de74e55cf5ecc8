//! Inclusion–exclusion between a copula and its survival copula.

use super::CopulaSpec;
use crate::error::{Error, Result};
use crate::marginals::MarginalModel;

/// Largest dimension for which the 2^n subset sum is attempted.
pub const MAX_EXPANSION_DIM: usize = 20;

/// `Σ_{S ⊆ {1..n}} (−1)^{|S|} K(x^S)` with `x^S_i = 1 − v_i` for `i ∈ S` and `1` otherwise.
///
/// With `K = C` and `v = û` this is the survival copula
/// `Ĉ(û) = 1 − S₁ + S₂ − … ± S_n`; with `K = Ĉ` and `v = u` it recovers `C(u)`.
/// The empty subset contributes exactly 1.
pub fn complement_expansion(k: &CopulaSpec, v: &[f64]) -> Result<f64> {
    Ok((1.0 + expansion_tail(k, v)?).clamp(0.0, 1.0))
}

/// The expansion without its leading 1, i.e. `complement_expansion − 1`.
/// Callers that need `1 − Ĉ` use `−tail` to avoid cancellation.
pub(crate) fn expansion_tail(k: &CopulaSpec, v: &[f64]) -> Result<f64> {
    let n = v.len();
    if n != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: n,
        });
    }
    if n > MAX_EXPANSION_DIM {
        return Err(Error::Capacity(format!(
            "inclusion–exclusion over {n} coordinates exceeds the limit of {MAX_EXPANSION_DIM}"
        )));
    }
    k.validate()?;
    let mut x = vec![1.0; n];
    let mut total = 0.0;
    for mask in 1u32..(1u32 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = if mask & (1 << i) != 0 { 1.0 - v[i] } else { 1.0 };
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * k.eval(&x);
    }
    Ok(total)
}

/// Joint survival `P(T_1 > t_1, …, T_n > t_n)` from the copula of the
/// component lifetimes by inclusion–exclusion over `u_i = F_i(t_i)`.
pub fn poincare_survival(c: &CopulaSpec, t: &[f64], marginals: &[MarginalModel]) -> Result<f64> {
    if t.len() != marginals.len() {
        return Err(Error::DimensionMismatch {
            expected: marginals.len(),
            got: t.len(),
        });
    }
    let uhat = t
        .iter()
        .zip(marginals)
        .map(|(&ti, m)| m.sf(ti))
        .collect::<Result<Vec<_>>>()?;
    complement_expansion(c, &uhat)
}
