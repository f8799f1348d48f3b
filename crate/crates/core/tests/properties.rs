use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use isonet::analytic::{a2, a4, analysis_spec, angle_term, laplace_interference, outage_probability};
use isonet::curves::linear_grid;
use isonet::model::{ChannelParams, NetworkScenario, PathLossExponent, ShapeFunction};
use isonet::sim::pairwise_sum;
use isonet::table::{CurveTable, Metadata};

fn exp3(lambda: f64, alpha: PathLossExponent, eta: f64) -> NetworkScenario {
    NetworkScenario::new(
        ShapeFunction::exp_power(100.0, 3.0).unwrap(),
        lambda,
        ChannelParams::new(alpha, 1.0, 10.0, eta, 0.5).unwrap(),
    )
    .unwrap()
}

fn alpha() -> impl Strategy<Value = PathLossExponent> {
    prop_oneof![Just(PathLossExponent::Two), Just(PathLossExponent::Four)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneous_alpha_four_ignores_position(c in 1e-3f64..1e3, y0 in 0.0f64..1e3) {
        let v = a4(&ShapeFunction::Constant, y0, c, &analysis_spec()).unwrap().value;
        assert_relative_eq!(v, PI * PI / (2.0 * c.sqrt()), max_relative = 1e-9);
    }

    #[test]
    fn disk_alpha_two_at_origin(radius in 1.0f64..1e4, c in 1e-2f64..1e2) {
        let v = a2(&ShapeFunction::disk(radius).unwrap(), 0.0, c, &analysis_spec()).unwrap().value;
        assert_relative_eq!(v, PI * (radius * radius / c).ln_1p(), max_relative = 1e-9);
    }

    #[test]
    fn angle_term_stays_in_range(r in 0.0f64..1e4, c in 1e-4f64..1e4, y0 in 0.0f64..1e3) {
        let t = angle_term(r, c, y0);
        prop_assert!(t.is_finite());
        prop_assert!((-PI / 2.0 - 1e-12..=PI / 2.0 + 1e-12).contains(&t), "{}", t);
    }

    #[test]
    fn outage_is_a_probability_and_grows_with_density(
        l1 in 0.0f64..5e-3,
        extra in 0.0f64..5e-3,
        y0 in 0.0f64..400.0,
        a in alpha(),
        eta in 0.0f64..0.5,
    ) {
        let q1 = outage_probability(&exp3(l1, a, eta), y0).unwrap();
        let q2 = outage_probability(&exp3(l1 + extra, a, eta), y0).unwrap();
        prop_assert!((0.0..=1.0).contains(&q1));
        prop_assert!(q2 >= q1 - 1e-15);
        prop_assert!(q1 >= -(-0.5 * eta).exp_m1() - 1e-15);
    }

    #[test]
    fn laplace_decreases_in_its_argument(s1 in 1e-3f64..1e4, ratio in 1.0f64..10.0, y0 in 0.0f64..300.0, a in alpha()) {
        let s = exp3(1e-3, a, 0.0);
        let l1 = laplace_interference(&s, y0, s1).unwrap();
        let l2 = laplace_interference(&s, y0, s1 * ratio).unwrap();
        prop_assert!(l1 > 0.0 && l1 <= 1.0);
        prop_assert!(l2 <= l1 + 1e-15);
    }

    #[test]
    fn grid_endpoints(start in -100.0f64..100.0, n in 0usize..200, step in 1e-2f64..10.0) {
        let stop = start + n as f64 * step;
        let g = linear_grid(start, stop, step).unwrap();
        prop_assert_eq!(g.len(), n + 1);
        prop_assert_eq!(g[0], start);
        assert_relative_eq!(*g.last().unwrap(), stop, max_relative = 1e-12, epsilon = 1e-12);
    }

    #[test]
    fn csv_values_round_trip(values in prop::collection::vec(-1e300f64..1e300, 1..40)) {
        let s = exp3(1e-3, PathLossExponent::Four, 0.0);
        let mut t = CurveTable::new(Metadata::new("test", &s, None), &["v"]);
        for v in &values {
            t.push(vec![*v]).unwrap();
        }
        let back: Vec<f64> = t.to_csv().lines().skip(2).map(|l| l.parse().unwrap()).collect();
        prop_assert_eq!(back, values);
    }

    #[test]
    fn pairwise_sum_matches_compensated_sum(values in prop::collection::vec(-1e3f64..1e3, 0..3000)) {
        // Kahan summation as the reference
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for v in &values {
            let y = v - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        let scale: f64 = values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((pairwise_sum(&values) - sum).abs() <= 1e-13 * scale);
    }
}
