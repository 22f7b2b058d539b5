use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use varorder::numerics::Matrix;
use varorder::residual_tests::{lm_test, lm_vs_lr, AuxRegressionConfig, LmVariant, SampleRule};
use varorder::selection::{lr_stat, lr_stat_multi, select_order, Penalty, SelectionMethod};
use varorder::var_model::{fit, TimeSeriesData};
use varorder::{DeterministicKind, DeterministicSpec, Tolerances};

fn noise(seed: u64, rows: usize, p: usize) -> Matrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(rows, p, |_, _| StandardNormal.sample(&mut rng))
}

fn det_spec(which: u8) -> DeterministicSpec<f64> {
    let kind = match which % 4 {
        0 => DeterministicKind::None,
        1 => DeterministicKind::Constant,
        2 => DeterministicKind::ConstantTrend,
        _ => DeterministicKind::ConstantSeasonal { period: 4 },
    };
    DeterministicSpec::new(kind).unwrap()
}

fn all_methods() -> Vec<SelectionMethod> {
    vec![
        SelectionMethod::InformationCriterion(Penalty::Akaike),
        SelectionMethod::InformationCriterion(Penalty::Schwarz),
        SelectionMethod::InformationCriterion(Penalty::HannanQuinn),
        SelectionMethod::SequentialLr { alpha: 0.05 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lr_statistics_are_nonnegative_and_add_up(seed in any::<u64>(), p in 1usize..4, which in 0u8..4) {
        let k_max = 3;
        let data = TimeSeriesData::new(noise(seed, 60 + k_max, p), k_max, vec![]).unwrap();
        let det = data.deterministic_panel(&det_spec(which)).unwrap();
        let fits: Vec<_> = (0..=k_max).map(|k| fit(&data, k, &det).unwrap()).collect();
        let mut sum = 0.0;
        for k in 1..=k_max {
            let s = lr_stat(&fits[k - 1], &fits[k]).unwrap();
            prop_assert!(s.statistic >= 0.0);
            prop_assert_eq!(s.df, p * p);
            sum += s.statistic;
        }
        let joint = lr_stat_multi(&fits[0], &fits[k_max], k_max).unwrap();
        prop_assert!((joint.statistic - sum).abs() <= 1e-9 * joint.statistic.max(1.0));
    }

    #[test]
    fn scaling_the_data_changes_nothing(seed in any::<u64>(), p in 1usize..3, c in 0.001f64..1000.0) {
        let k_max = 3;
        let data = TimeSeriesData::new(noise(seed, 80 + k_max, p), k_max, vec![]).unwrap();
        let scaled = data.scaled(c).unwrap();
        let spec = det_spec(1);
        let (d0, d1) = (data.deterministic_panel(&spec).unwrap(), scaled.deterministic_panel(&spec).unwrap());
        let a = select_order(&data, &d0, k_max, &all_methods()).unwrap();
        let b = select_order(&scaled, &d1, k_max, &all_methods()).unwrap();
        prop_assert_eq!(&a.k_hat, &b.k_hat);
        for (ra, rb) in a.per_lag.iter().zip(&b.per_lag) {
            if let (Some(x), Some(y)) = (ra.lr, rb.lr) {
                prop_assert!((x - y).abs() <= 1e-8 * x.max(1.0));
            }
        }
        for variant in [LmVariant::Joint, LmVariant::Marginal(1), LmVariant::Conditional(1)] {
            for sample_rule in [SampleRule::Truncate, SampleRule::ZeroPad] {
                let cfg = AuxRegressionConfig { m: 2, variant, sample_rule };
                let x = lm_test(&data, &d0, 1, &cfg).unwrap().statistic;
                let y = lm_test(&scaled, &d1, 1, &cfg).unwrap().statistic;
                prop_assert!((x - y).abs() <= 1e-8 * x.max(1.0));
            }
        }
    }

    #[test]
    fn lm_degrees_of_freedom_ignore_lags_and_deterministics(
        seed in any::<u64>(), lags in 0usize..3, m in 1usize..3, which in 0u8..4,
    ) {
        let p = 3;
        let data = TimeSeriesData::new(noise(seed, 90 + 5, p), 5, vec![]).unwrap();
        let det = data.deterministic_panel(&det_spec(which)).unwrap();
        for (variant, q) in [(LmVariant::Joint, 3), (LmVariant::Marginal(2), 2), (LmVariant::Conditional(1), 1)] {
            let r = lm_test(&data, &det, lags, &AuxRegressionConfig { m, variant, sample_rule: SampleRule::Truncate }).unwrap();
            prop_assert_eq!(r.df, q * q * m);
            prop_assert!(r.statistic >= 0.0);
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }
    }

    #[test]
    fn lm_and_lr_are_both_nonnegative(seed in any::<u64>(), m in 1usize..3) {
        let data = TimeSeriesData::new(noise(seed, 70 + 4, 2), 4, vec![]).unwrap();
        let det = data.deterministic_panel(&det_spec(1)).unwrap();
        let c = lm_vs_lr(&data, &det, 1, m, &Tolerances::default()).unwrap();
        prop_assert!(c.lm.statistic >= 0.0 && c.lr.statistic >= 0.0);
        prop_assert_eq!(c.lm.df, c.lr.df);
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let obs = noise(3, 120, 2);
    let d64 = TimeSeriesData::new(obs.clone(), 2, vec![]).unwrap();
    let d32 = TimeSeriesData::new(obs.map(|v| v as f32), 2, vec![]).unwrap();
    let s64 = DeterministicSpec::<f64>::new(DeterministicKind::Constant).unwrap();
    let s32 = DeterministicSpec::<f32>::new(DeterministicKind::Constant).unwrap();
    let f64_fit = fit(&d64, 2, &d64.deterministic_panel(&s64).unwrap()).unwrap();
    let f32_fit = fit(&d32, 2, &d32.deterministic_panel(&s32).unwrap()).unwrap();
    assert!((f64_fit.log_det_omega - f32_fit.log_det_omega as f64).abs() < 1e-4);
    let methods = all_methods();
    let r64 = select_order(&d64, &d64.deterministic_panel(&s64).unwrap(), 2, &methods).unwrap();
    let r32 = select_order(&d32, &d32.deterministic_panel(&s32).unwrap(), 2, &methods).unwrap();
    for (a, b) in r64.per_lag.iter().zip(&r32.per_lag) {
        assert!((a.log_det_omega - b.log_det_omega).abs() < 1e-4);
    }
}

#[test]
fn marginal_test_depends_only_on_its_block() {
    // Rescaling variables outside the tested block leaves the marginal statistic alone.
    let data = TimeSeriesData::new(noise(8, 150, 3), 3, vec![]).unwrap();
    let p = Matrix::diagonal(&[1.0, 40.0, 0.01]);
    let moved = data.transform(&p).unwrap();
    let spec = det_spec(1);
    let cfg = AuxRegressionConfig {
        m: 2,
        variant: LmVariant::Marginal(1),
        sample_rule: SampleRule::Truncate,
    };
    let a = lm_test(&data, &data.deterministic_panel(&spec).unwrap(), 1, &cfg).unwrap();
    let b = lm_test(&moved, &moved.deterministic_panel(&spec).unwrap(), 1, &cfg).unwrap();
    assert!((a.statistic - b.statistic).abs() < 1e-9 * a.statistic.max(1.0));
}

#[test]
fn report_round_trips_through_json() {
    let data = TimeSeriesData::new(noise(21, 64, 2), 4, vec![]).unwrap();
    let det = data.deterministic_panel(&det_spec(3)).unwrap();
    let report = select_order(&data, &det, 4, &all_methods()).unwrap();
    let json = serde_json::to_string(&report).unwrap();
    let back: varorder::OrderReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(report.per_lag.len(), 5);
    assert!(report.to_text().contains("k_hat[bic]"));
}
