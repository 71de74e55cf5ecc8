//! Finite differences and adaptive quadrature.

use crate::error::{Error, Result};

/// Default differentiation step `max(1e−6, 1e−4·t)`, capped at `t/2` so the
/// stencil never crosses the origin.
pub fn default_step(t: f64) -> f64 {
    let h = (1e-4 * t).max(1e-6);
    if t > 0.0 {
        h.min(0.5 * t)
    } else {
        h
    }
}

/// Second-order derivative estimate of `f` at `t` with step `h`.
///
/// Central when `t ≥ h`; the one-sided three-point stencil is used at the
/// left edge of the support.
pub fn derivative<F>(f: &F, t: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if t >= h {
        Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
    } else {
        Ok((-3.0 * f(t)? + 4.0 * f(t + h)? - f(t + 2.0 * h)?) / (2.0 * h))
    }
}

/// Richardson extrapolation `(4·D(h/2) − D(h))/3` of [`derivative`].
pub fn richardson<F>(f: &F, t: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let coarse = derivative(f, t, h)?;
    let fine = derivative(f, t, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

// 15-point Kronrod nodes on [0, 1] (symmetric half) with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = r * XGK[j];
        let pair = f(c - x)? + f(c + x)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok((kronrod * r, ((kronrod - gauss) * r).abs()))
}

/// Adaptive Gauss–Kronrod (G7/K15) integration of `f` over `[a, b]`.
pub fn integrate<F>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    const MAX_INTERVALS: usize = 2000;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::Integration(format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(f, a, b)?;
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= rel_tol * total.abs() || err < 1e-300 {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Integration(format!(
                "no convergence on [{a}, {b}]: estimate {total}, error {err}"
            )));
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid)?;
        let (v2, e2) = gk15(f, mid, hi)?;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// `count` points from `lo` to `hi` inclusive, equally spaced in `ln t`.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut g: Vec<f64> = spaced(lo.ln(), hi.ln(), count).into_iter().map(f64::exp).collect();
    if let Some(first) = g.first_mut() {
        *first = lo;
    }
    if count > 1 {
        g[count - 1] = hi;
    }
    g
}

pub fn lin_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    spaced(lo, hi, count)
}

fn spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derivative_of_exp() {
        let f = |x: f64| Ok(x.exp());
        let d = derivative(&f, 1.0, 1e-4).unwrap();
        assert_relative_eq!(d, 1f64.exp(), max_relative = 1e-8);
        let r = richardson(&f, 1.0, 1e-3).unwrap();
        assert_relative_eq!(r, 1f64.exp(), max_relative = 1e-11);
        let edge = derivative(&f, 0.0, 1e-5).unwrap();
        assert_relative_eq!(edge, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn quadrature() {
        let f = |x: f64| Ok((-x).exp());
        assert_relative_eq!(integrate(&f, 0.0, 40.0, 1e-10).unwrap(), 1.0, max_relative = 1e-10);
        let g = |x: f64| Ok(x.sqrt());
        assert_relative_eq!(integrate(&g, 0.0, 1.0, 1e-10).unwrap(), 2.0 / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn grids() {
        let g = log_space(1e-3, 10.0, 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[4], 10.0);
        assert_relative_eq!(g[0], 1e-3, max_relative = 1e-14);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(lin_space(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn steps() {
        assert_eq!(default_step(1.0), 1e-4);
        assert_eq!(default_step(1e-7), 5e-8);
        assert_eq!(default_step(0.0), 1e-6);
    }
}
