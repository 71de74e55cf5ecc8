use copreli::numeric;
use copreli::ordering::verify_theorem1;
use copreli::{
    CopulaSpec, Coupling, Family, FamilyKind, Lifetime, MarginalModel, Mode, Structure, SystemPair, SystemSpec, Verdict,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bivariate(kind: FamilyKind, seed: u64) -> CopulaSpec {
    kind.draw(&mut ChaCha8Rng::seed_from_u64(seed), 2)
}

fn marginal() -> impl Strategy<Value = MarginalModel> {
    prop_oneof![
        (0.2..5.0f64).prop_map(|r| MarginalModel::exponential(r).unwrap()),
        (0.2..3.0f64, 0.5..3.0f64).prop_map(|(r, k)| MarginalModel::weibull(r, k).unwrap()),
    ]
}

fn kind() -> impl Strategy<Value = FamilyKind> {
    prop::sample::select(FamilyKind::ALL.to_vec())
}

fn system(c: CopulaSpec, m: Vec<MarginalModel>, structure: Structure) -> SystemSpec {
    SystemSpec::new(c, m, structure, Mode::Dependent).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn marginal_identities(m in marginal(), p in 0.001..0.9999f64) {
        let t = m.quantile(p).unwrap();
        let (cdf, sf, pdf) = (m.cdf(t).unwrap(), m.sf(t).unwrap(), m.pdf(t).unwrap());
        prop_assert!((0.0..=1.0).contains(&cdf));
        // each side is evaluated without cancellation, so they complement to an ulp
        prop_assert!((sf + cdf - 1.0).abs() <= f64::EPSILON);
        prop_assert!(pdf >= 0.0);
        prop_assert!((cdf - p).abs() <= 1e-10);
        let h = numeric::default_step(t);
        let fd = (m.cdf(t + h).unwrap() - m.cdf(t - h).unwrap()) / (2.0 * h);
        prop_assert!((pdf - fd).abs() <= 1e-6 * (1.0 + pdf));
        if sf > 1e-12 {
            prop_assert!((m.hazard(t).unwrap() * sf - pdf).abs() <= 1e-10 * pdf.max(1e-300));
        }
        if cdf > 1e-12 {
            prop_assert!((Lifetime::reversed_hazard(&m, t).unwrap() * cdf - pdf).abs() <= 1e-10 * pdf.max(1e-300));
        }
    }

    #[test]
    fn system_sf_is_a_survival_function(k in kind(), seed in any::<u64>(), m1 in marginal(), m2 in marginal(), parallel in any::<bool>()) {
        let structure = if parallel { Structure::Parallel } else { Structure::Series };
        let s = system(bivariate(k, seed), vec![m1, m2], structure);
        let mut prev = 1.0;
        for i in 0..40 {
            let t = 0.1 * i as f64;
            let v = s.sf(t).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v <= prev + 1e-12, "{} rises at t={}", s.copula(), t);
            prop_assert!((v + s.cdf(t).unwrap() - 1.0).abs() <= f64::EPSILON);
            prev = v;
        }
    }

    #[test]
    fn rates_are_nonnegative(k in kind(), seed in any::<u64>(), r1 in 0.3..3.0f64, r2 in 0.3..3.0f64, t in 0.05..2.0f64) {
        let m = vec![MarginalModel::exponential(r1).unwrap(), MarginalModel::exponential(r2).unwrap()];
        let c = bivariate(k, seed);
        prop_assume!(!c.margin_axiom_exempt());
        for structure in [Structure::Series, Structure::Parallel] {
            let s = system(c.clone(), m.clone(), structure);
            prop_assert!(s.hazard(t).unwrap() >= -1e-6);
            prop_assert!(s.reversed_hazard(t).unwrap() >= -1e-6);
            prop_assert!(s.mrl(t).unwrap() >= 0.0);
            prop_assert!(s.ai(t).unwrap() >= -1e-6);
        }
    }

    #[test]
    fn independent_series_hazard_is_the_sum(m1 in marginal(), m2 in marginal(), p in 0.05..0.9f64) {
        let t = m1.quantile(p).unwrap();
        let s = SystemSpec::new(CopulaSpec::independence(2), vec![m1, m2], Structure::Series, Mode::Independent).unwrap();
        prop_assume!(s.sf(t).unwrap() > 1e-10);
        let want = m1.hazard(t).unwrap() + m2.hazard(t).unwrap();
        prop_assert!((s.hazard(t).unwrap() - want).abs() <= 1e-6 * (1.0 + want));
    }

    #[test]
    fn parallel_dominates_series(k in kind(), seed in any::<u64>(), r1 in 0.2..5.0f64, r2 in 0.2..5.0f64) {
        let m = vec![MarginalModel::exponential(r1).unwrap(), MarginalModel::exponential(r2).unwrap()];
        let grid = copreli::ordering::default_grid(&m).unwrap();
        let check = verify_theorem1(&bivariate(k, seed), &m, &grid).unwrap();
        prop_assert!(check.pass, "{:?}", check);
    }

    #[test]
    fn log_derivative_identity(k in kind(), seed in any::<u64>(), r1 in 0.3..3.0f64, r2 in 0.3..3.0f64, t in 0.05..2.0f64) {
        let m = [MarginalModel::exponential(r1).unwrap(), MarginalModel::exponential(r2).unwrap()];
        let c = bivariate(k, seed);
        let pair = SystemPair::series(c.clone(), m.to_vec()).unwrap();
        let h = numeric::default_step(t);
        let log_ratio = |x: f64| {
            let uhat = [m[0].sf(x)?, m[1].sf(x)?];
            Ok((c.survival_value(&uhat)? / (uhat[0] * uhat[1])).ln())
        };
        let slope = numeric::derivative(&log_ratio, t, h).unwrap();
        let direct = pair.first.hazard(t).unwrap() - pair.second.hazard(t).unwrap();
        prop_assert!((direct + slope).abs() <= 1e-5, "{}: {} vs {}", c, direct, -slope);
        let raw = pair.hr_error(t).unwrap();
        if raw.abs() > 1e-8 {
            prop_assert_eq!(raw.signum(), -slope.signum());
        }
    }

    #[test]
    fn swapping_the_pair_flips_the_verdict(k in kind(), seed in any::<u64>(), t in 0.05..3.0f64, parallel in any::<bool>()) {
        let m = vec![MarginalModel::exponential(1.0).unwrap(); 2];
        let structure = if parallel { Structure::Parallel } else { Structure::Series };
        let pair = SystemPair::new(bivariate(k, seed), m, structure).unwrap();
        let (raw, _) = pair.sf_error(t).unwrap();
        let (back, _) = pair.swapped().sf_error(t).unwrap();
        prop_assert_eq!(raw, -back);
        let flipped = match Verdict::of(raw) {
            Verdict::Oa => Verdict::Ua,
            Verdict::Ua => Verdict::Oa,
            Verdict::Zero => Verdict::Zero,
        };
        prop_assert_eq!(Verdict::of(back), flipped);
    }

    #[test]
    fn verdict_band(raw in -1e-9..1e-9f64) {
        let want = if raw < -1e-10 { Verdict::Oa } else if raw > 1e-10 { Verdict::Ua } else { Verdict::Zero };
        prop_assert_eq!(Verdict::of(raw), want);
    }

    #[test]
    fn fgm_positive_alpha_error_signs(alpha in 0.01..=1.0f64, r1 in 0.3..3.0f64, r2 in 0.3..3.0f64, t in 0.01..5.0f64) {
        let m = vec![MarginalModel::exponential(r1).unwrap(), MarginalModel::exponential(r2).unwrap()];
        let c = CopulaSpec::bivariate(Family::Fgm { alpha });
        let series = SystemPair::series(c.clone(), m.clone()).unwrap().sf_error(t).unwrap().0;
        let parallel = SystemPair::parallel(c, m).unwrap().sf_error(t).unwrap().0;
        prop_assert!(series >= 0.0);
        prop_assert!(parallel <= 0.0);
    }

    #[test]
    fn couplings_agree_for_radially_symmetric(alpha in -1.0..=1.0f64, t in 0.01..4.0f64) {
        let m = vec![MarginalModel::exponential(1.0).unwrap(); 2];
        let c = CopulaSpec::bivariate(Family::Fgm { alpha });
        for structure in [Structure::Series, Structure::Parallel] {
            let d = system(c.clone(), m.clone(), structure);
            let s = d.clone().with_coupling(Coupling::Survival);
            prop_assert!((d.sf(t).unwrap() - s.sf(t).unwrap()).abs() <= 1e-14);
        }
    }
}
