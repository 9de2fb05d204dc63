use edgezeta::divisor::{moment_series, Truncation};
use edgezeta::euler::{py, solve_psi};
use edgezeta::randmodel::*;
use edgezeta::Complex64;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn moments_match_the_divisor_series() {
    for y in [10.0, 100.0] {
        let model = Model::new(ModelConfig::new(y, 100_000, 2024).unwrap()).unwrap();
        let logs = model.log_values();
        for (a, b) in [(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (3.0, 3.0)] {
            let est = moment_from_logs(&logs, c(a), c(b));
            let exact = moment_series(c(a), c(b), Truncation::Finite(y), 1e-13).unwrap().value;
            assert!(
                (est.estimate - exact).norm() <= 4.0 * est.std_err,
                "y={y} ({a},{b}) {} vs {exact} se {}",
                est.estimate,
                est.std_err
            );
        }
    }
}

#[test]
fn argument_bounds_hold_for_every_sample() {
    let scan = argument_scan(ModelConfig::new(1e3, 50_000, 3).unwrap()).unwrap();
    assert_eq!((scan.arg_violations, scan.deficit_violations), (0, 0));
    assert!(scan.max_abs_arg <= scan.p_y);
}

#[test]
fn tail_sum_shrinks_with_y() {
    let sums: Vec<TailSum> =
        [1e2, 1e3, 1e4].iter().map(|&y| tail_sum(ModelConfig::new(y, 4000, 9).unwrap()).unwrap()).collect();
    for w in sums.windows(2) {
        assert!(w[1].exceedance <= w[0].exceedance);
        assert!(w[1].mean_abs_sq < w[0].mean_abs_sq);
    }
    for s in &sums {
        assert!((s.mean_abs_sq - s.expected_abs_sq).abs() <= 4.0 * s.std_err, "{s:?}");
    }
}

#[test]
fn conditioned_samples_reach_large_arguments() {
    // the rotation from solve_psi, with a window of (log y)^{−3/2} below y/(8 log log y)
    let y: f64 = 1000.0;
    let theta = 0.5;
    let s = solve_psi(theta, y, 1e-12).unwrap();
    let window = y.ln().powf(-1.5);
    let z = y / (8.0 * y.ln().ln());
    let model = Model::new(ModelConfig::new(y, 2000, 17).unwrap()).unwrap();
    let hits = (0..2000)
        .filter(|&i| model.conditioned_sample(i, -s.psi, window, z).unwrap().log_value.im.abs() > theta * 0.8)
        .count();
    assert!(hits > 0);
    let plain = (0..2000).filter(|&i| model.log_value(i).im.abs() > theta * 0.8).count();
    assert!(hits > plain);
}

#[test]
fn degenerate_window_gives_the_rotated_product() {
    let y = 200.0;
    let model = Model::new(ModelConfig::new(y, 1, 1).unwrap()).unwrap();
    let s = model.conditioned_sample(0, 0.2, 1e-14, y).unwrap();
    let r = edgezeta::euler::rotated_trunc(0.0, y, -0.2).unwrap();
    assert!((s.log_value - r.log_value).norm() < 1e-12);
}

#[test]
fn tail_estimate_fields() {
    let cfg = ModelConfig::new(100.0, 20_000, 4).unwrap();
    let t = mc_tail(cfg, 1.2, 0.1).unwrap();
    assert!((0.0..=1.0).contains(&t.prob_hat));
    let n = 20_000.0;
    assert!((t.std_err - (t.prob_hat * (1.0 - t.prob_hat) / n).sqrt()).abs() < 1e-15);
    assert!(t.predicted.is_some());
    assert!(mc_tail(cfg, 0.5, 0.0).unwrap().predicted.is_none());
    let p_y = py(100.0).unwrap();
    assert_eq!(mc_tail(cfg, 0.0, p_y).unwrap().prob_hat, 0.0);
}
