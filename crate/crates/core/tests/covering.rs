use nslab::covering::{
    covers_by_floor, estimate_dimension, premeasure_sum, premeasure_trend, vitali_cover, CoverInterval, DyadicCover,
};
use nslab::criterion::{detect_bad_points, CriterionParams, ShellNormSeries};
use nslab::{lambda, Exponent};
use proptest::prelude::*;

fn bad_points(floors: std::ops::Range<i32>) -> impl Strategy<Value = (i32, Vec<(f64, i32)>)> {
    floors.prop_flat_map(|floor| {
        (
            Just(floor),
            prop::collection::vec((0.0..1.0f64, floor..floor + 5), 0..40),
        )
    })
}

fn disjoint(a: &CoverInterval, b: &CoverInterval) -> bool {
    let (x, y) = a.bounds();
    let (u, v) = b.bounds();
    y < u || v < x
}

proptest! {
    #[test]
    fn vitali_postconditions((floor, pts) in bad_points(0..4)) {
        let cover = vitali_cover(&pts, floor).unwrap();
        for (i, a) in cover.intervals.iter().enumerate() {
            prop_assert!(pts.contains(&(a.t, a.p)));
            for b in &cover.intervals[i + 1..] {
                prop_assert!(disjoint(a, b));
            }
        }
        // every candidate interval, not just its point, sits in a 5-fold dilation
        for &(t, p) in &pts {
            let (a, b) = CoverInterval { t, p }.bounds();
            prop_assert!(cover.covers(a) && cover.covers(b) && cover.covers(t));
        }
        prop_assert_eq!(cover.is_empty(), pts.is_empty());
    }

    #[test]
    fn premeasure_is_nonincreasing_in_d((floor, pts) in bad_points(2..5)) {
        // from p = 2 on every dilated diameter 5λ_p^{-2} is below 1
        let cover = vitali_cover(&pts, floor).unwrap();
        let sums: Vec<f64> = (1..=20).map(|i| premeasure_sum(&cover, 0.05 * i as f64).unwrap()).collect();
        for w in sums.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn separated_intervals_add_linearly(k in 1usize..30, p in 2i32..6, d in 0.05..1.0f64) {
        let len = lambda(p).powi(-2);
        let pts: Vec<(f64, i32)> = (0..k).map(|i| (1.0 + 2.0 * len * i as f64, p)).collect();
        let cover = vitali_cover(&pts, p).unwrap();
        prop_assert_eq!(cover.len(), k);
        let one = (5.0 * len).powf(d);
        prop_assert!((premeasure_sum(&cover, d).unwrap() - k as f64 * one).abs() <= 1e-12 * k as f64 * one);
    }
}

#[test]
fn worked_premeasure_examples() {
    let one = vitali_cover(&[(0.3, 4)], 4).unwrap();
    assert!((premeasure_sum(&one, 0.5).unwrap() - 0.1398).abs() < 5e-5);
    let empty = vitali_cover(&[], 4).unwrap();
    assert_eq!(premeasure_sum(&empty, 0.5).unwrap(), 0.0);
    assert!(premeasure_sum(&one, -1.0).is_err());
}

/// Points of a ratio-`1/4` Cantor set, `2^levels` of them.
fn cantor(levels: i32) -> Vec<f64> {
    let mut pts = vec![0.5];
    for k in 1..=levels {
        let step = 0.375 * 0.25f64.powi(k - 1);
        pts = pts.iter().flat_map(|&x| [x, x + step]).collect();
    }
    pts
}

#[test]
fn cantor_set_dimension_is_recovered() {
    let pts = cantor(6);
    let covers: Vec<DyadicCover> = (1..=6)
        .map(|f| vitali_cover(&pts.iter().map(|&t| (t, f)).collect::<Vec<_>>(), f).unwrap())
        .collect();
    let grid: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
    let est = estimate_dimension(&covers, &grid).unwrap();
    assert!((est.estimate - 0.5).abs() < 0.15, "{est:?}");
    assert_eq!(est.lower, Some(0.4));
    assert_eq!(est.upper, Some(0.5));
    let below = premeasure_trend(&covers, 0.3).unwrap();
    let above = premeasure_trend(&covers, 0.8).unwrap();
    assert!(below.log_slope().unwrap() > 0.0);
    assert!(above.log_slope().unwrap() < 0.0);
    assert!(below.trend.windows(2).all(|w| w[1].1 >= w[0].1));
}

#[test]
fn covers_from_a_criterion_report() {
    let s = Exponent::rational(10, 3);
    let h = 1.0 / 4096.0;
    let times: Vec<f64> = (0..=4096).map(|i| i as f64 * h).collect();
    // one burst at t = 0.75 that every scale sees
    let series = ShellNormSeries::from_fn(times, -1, 6, s, "burst", |t, _| if (t - 0.75).abs() < 1e-3 { 5.0 } else { 0.0 })
        .unwrap();
    let params = CriterionParams::new(s, s, 0.0, 0.1, 1, 4).unwrap();
    let grid = [0.5, 0.75, 0.7505];
    let report = detect_bad_points(&series, &params, &grid).unwrap();
    assert_eq!(report.bad_times(), vec![0.75, 0.7505]);
    let covers = covers_by_floor(&report.entries, 1..=4).unwrap();
    for c in &covers {
        // the two bad times are closer than any interval, so one survives
        assert_eq!(c.len(), 1);
        assert!(c.covers(0.75) && c.covers(0.7505));
        assert!(c.intervals.iter().all(|i| i.p >= c.floor));
    }
    assert!(estimate_dimension(&covers, &[0.5]).is_some());
    let none = covers_by_floor(&report.entries, 5..=6).unwrap();
    assert!(none.iter().all(|c| c.is_empty()));
    assert_eq!(estimate_dimension(&none, &[0.5]), None);
}
