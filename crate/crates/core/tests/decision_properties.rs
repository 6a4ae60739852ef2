use proptest::prelude::*;
use robust_forecast::decision::*;
use robust_forecast::normal::logistic;

fn bounds() -> impl Strategy<Value = BinaryBounds> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, b)| BinaryBounds::new(a.min(b), a.max(b)).unwrap())
}

fn weights() -> impl Strategy<Value = (f64, f64)> {
    (0.01f64..10.0, 0.01f64..10.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn symmetric_loss_minimax_equals_regret(b in bounds()) {
        let loss = LossSpec::symmetric();
        let (mm, _) = minimax_binary(&loss, &b).unwrap();
        let (mmr, _) = minimax_regret_binary(&loss, &b).unwrap();
        // Exact ties are flagged by both; away from them the decisions agree.
        if !(mm.tie || mmr.tie) {
            prop_assert_eq!(mm.discrete, mmr.discrete);
        }
    }

    #[test]
    fn log_minimax_is_quadratic_minimax(b in bounds()) {
        prop_assert_eq!(minimax_log(&b), minimax_quadratic(&b));
        prop_assert_eq!(minimax_quadratic(&b).value(), 0.5f64.clamp(b.p_lower, b.p_upper));
    }

    #[test]
    fn scaling_losses_keeps_decisions(b in bounds(), (a01, a10) in weights(), c in 0.01f64..100.0) {
        let base = LossSpec::binary(a01, a10).unwrap();
        let scaled = LossSpec::binary(c * a01, c * a10).unwrap();
        let (d1, _) = minimax_binary(&base, &b).unwrap();
        let (d2, _) = minimax_binary(&scaled, &b).unwrap();
        if !(d1.tie || d2.tie) {
            prop_assert_eq!(d1.discrete, d2.discrete);
        }
        let (r1, _) = minimax_regret_binary(&base, &b).unwrap();
        let (r2, _) = minimax_regret_binary(&scaled, &b).unwrap();
        if !(r1.tie || r2.tie) {
            prop_assert_eq!(r1.discrete, r2.discrete);
        }
    }

    #[test]
    fn regret_forecasts_stay_inside_bounds(b in bounds()) {
        let q = mmr_quadratic(&b).0.value();
        let l = mmr_log(&b).value();
        prop_assert!(b.p_lower <= q && q <= b.p_upper);
        prop_assert!(b.p_lower <= l && l <= b.p_upper);
    }

    #[test]
    fn log_regret_forecast_solves_its_equation(b in bounds()) {
        prop_assume!(b.p_upper - b.p_lower > 1e-6);
        let d = mmr_log(&b).value();
        let target = logistic(mmr_log_slope(&b));
        prop_assert!((d - target).abs() < 1e-12);
    }

    #[test]
    fn point_bounds_reproduce_theta_optimal(p in 0.0f64..=1.0, (a01, a10) in weights()) {
        let b = BinaryBounds::point(p).unwrap();
        let loss = LossSpec::binary(a01, a10).unwrap();
        let oracle = theta_optimal(&loss, ForecastProbability::Scalar(p)).unwrap();
        let (mm, _) = minimax_binary(&loss, &b).unwrap();
        let (mmr, _) = minimax_regret_binary(&loss, &b).unwrap();
        if !(oracle.tie || mm.tie || mmr.tie) {
            prop_assert_eq!(mm.discrete, oracle.discrete);
            prop_assert_eq!(mmr.discrete, oracle.discrete);
        }
        let cont = theta_optimal(&LossSpec::quadratic(), ForecastProbability::Scalar(p)).unwrap();
        prop_assert_eq!(minimax_quadratic(&b).value(), cont.value());
        prop_assert_eq!(mmr_quadratic(&b).0.value(), cont.value());
        prop_assert_eq!(minimax_log(&b).value(), cont.value());
        prop_assert_eq!(mmr_log(&b).value(), cont.value());
    }

    #[test]
    fn two_outcome_classification_is_binary(b in bounds()) {
        let mb = MultinomialBounds::new(vec![1.0 - b.p_upper, b.p_lower], vec![b.p_upper, 1.0 - b.p_lower]).unwrap();
        let (c, _) = minimax_classification(&mb);
        let (d, _) = minimax_binary(&LossSpec::symmetric(), &b).unwrap();
        if !(c.tie || d.tie) {
            prop_assert_eq!(c.discrete, d.discrete);
        }
    }

    #[test]
    fn classification_rules_pick_the_extremes(
        lower in proptest::collection::vec(0.0f64..0.2, 2..6),
        gaps in proptest::collection::vec(0.0f64..=1.0, 6),
    ) {
        let m = lower.len();
        let mb = MultinomialBounds::new(lower.clone(), gaps[..m].to_vec()).unwrap();
        let (d, risk) = minimax_classification(&mb);
        let best = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(lower[d.discrete.unwrap()], best);
        prop_assert!((risk.value - (1.0 - best)).abs() < 1e-15);
        let (r, regret) = mmr_classification(&mb);
        prop_assert_eq!(gaps[r.discrete.unwrap()], regret.value);
    }
}

#[test]
fn second_three_outcome_example() {
    // The third vector is taken exactly as given, (1/5, 1/5, 4/5), even
    // though it does not sum to one.
    let thetas = [[0.5, 0.5, 0.0], [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], [0.2, 0.2, 0.8]];
    let lower: Vec<f64> = (0..3).map(|m| thetas.iter().map(|t| t[m]).fold(f64::INFINITY, f64::min)).collect();
    let gaps: Vec<f64> = (0..3)
        .map(|m| {
            thetas
                .iter()
                .map(|t| t.iter().copied().fold(f64::NEG_INFINITY, f64::max) - t[m])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let mb = MultinomialBounds::new(lower, gaps).unwrap();
    let (mm, _) = minimax_classification(&mb);
    assert_eq!(mm.discrete, Some(0));
    assert_eq!(mm.tie_set, vec![0, 1]);
    assert_eq!(mmr_classification(&mb).0.discrete, Some(2));
}
