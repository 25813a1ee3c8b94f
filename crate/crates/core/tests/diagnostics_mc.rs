use betagraph_core::{
    ball_statistics, convergence_sweep, histogram, ks_statistic, ks_statistic_with, ContinuousLaw,
    EnsembleParams, RngStream,
};

/// First coordinate of a uniform point in the disk of radius 2: its density
/// is the semicircle law with `beta = 1`.
fn semicircle_by_rejection(m: usize, stream: &mut RngStream) -> Vec<f64> {
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let x = 4.0 * stream.uniform() - 2.0;
        let y = 4.0 * stream.uniform() - 2.0;
        if x * x + y * y <= 4.0 {
            out.push(x);
        }
    }
    out
}

#[test]
fn ks_of_exact_semicircle_draws_is_small() {
    let law = ContinuousLaw::semicircle(1.0).unwrap();
    let mut xs = semicircle_by_rejection(100_000, &mut RngStream::new(41, 0));
    xs.sort_by(f64::total_cmp);
    let d = ks_statistic(&xs, &law).unwrap();
    assert!(d <= 0.01, "KS {d}");
}

#[test]
fn ks_at_quantile_points() {
    let law = ContinuousLaw::marchenko_pastur(1.0, 2.0).unwrap();
    let m = 200;
    let xs: Vec<f64> = (1..=m)
        .map(|i| law.quantile(i as f64 / (m + 1) as f64, 1e-12).unwrap())
        .collect();
    let d = ks_statistic(&xs, &law).unwrap();
    assert!(d <= 1.0 / (m + 1) as f64 + 1e-10, "KS {d}");
}

#[test]
fn ks_is_invariant_under_increasing_maps() {
    let law = ContinuousLaw::semicircle(2.0).unwrap();
    let mut xs = semicircle_by_rejection(5_000, &mut RngStream::new(42, 0));
    xs.iter_mut().for_each(|x| *x *= 2f64.sqrt());
    xs.sort_by(f64::total_cmp);
    let direct = ks_statistic(&xs, &law).unwrap();
    let mapped: Vec<f64> = xs.iter().map(|x| (x / 3.0).exp()).collect();
    let via_map = ks_statistic_with(&mapped, |y| law.cdf(3.0 * y.ln(), 1e-12)).unwrap();
    assert!((direct - via_map).abs() <= 1e-9, "{direct} vs {via_map}");
}

#[test]
fn histogram_matches_bin_averaged_density() {
    let law = ContinuousLaw::semicircle(1.0).unwrap();
    let m = 1_000_000;
    let xs = semicircle_by_rejection(m, &mut RngStream::new(43, 0));
    let edges: Vec<f64> = (0..=50).map(|i| -2.0 + 4.0 * i as f64 / 50.0).collect();
    let h = histogram(&xs, &edges).unwrap();
    assert_eq!(h.counts.iter().sum::<u64>(), m as u64);
    let mass: f64 = h
        .density
        .iter()
        .zip(edges.windows(2))
        .map(|(d, w)| d * (w[1] - w[0]))
        .sum();
    assert!((mass - 1.0).abs() <= 1e-12);
    for (i, w) in edges.windows(2).enumerate() {
        let p = law.cdf(w[1], 1e-12).unwrap() - law.cdf(w[0], 1e-12).unwrap();
        let se = (p * (1.0 - p) / m as f64).sqrt() / (w[1] - w[0]);
        let want = p / (w[1] - w[0]);
        assert!(
            (h.density[i] - want).abs() <= 5.0 * se,
            "bin {i}: {} vs {want}",
            h.density[i]
        );
    }
}

#[test]
fn sweep_is_reproducible() {
    let params = EnsembleParams::laguerre(1.0, 2.0).unwrap();
    let s = RngStream::new(44, 0);
    let a = convergence_sweep(&params, &[50, 100], 4, &s).unwrap();
    let b = convergence_sweep(&params, &[50, 100], 4, &s).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.rows.len(), 2);
    assert!(a
        .rows
        .iter()
        .all(|r| r.trials == 4 && r.ks_mean > 0.0 && r.ks_mean < 1.0));
    assert!(convergence_sweep(&params, &[50], 0, &s).is_err());
    assert!(convergence_sweep(&params, &[100, 50], 1, &s).is_err());
}

#[test]
fn hermite_sweep_decreases() {
    let params = EnsembleParams::hermite(1.0).unwrap();
    let report = convergence_sweep(&params, &[100, 400, 1600], 10, &RngStream::new(45, 0)).unwrap();
    for w in report.rows.windows(2) {
        assert!(w[1].ks_mean < w[0].ks_mean, "{report:?}");
    }
}

#[test]
fn hermite_root_edges_are_uniform_after_scaling() {
    let params = EnsembleParams::hermite(2.0).unwrap();
    let stats = ball_statistics(&params, 1_000_000, 2, 10_000, &RngStream::new(46, 0)).unwrap();
    let d = stats.root_ks().unwrap();
    assert!(d <= 0.05, "KS {d}");
    // Adjacent edges of the limit path are equal.
    let gap = stats.root_edge_gap_quantile(0.99).unwrap();
    assert!(gap <= 0.05 * 2f64.sqrt(), "gap {gap}");
}

#[test]
fn laguerre_root_loops_follow_the_linear_profile() {
    let (beta, gamma) = (1.0, 2.0);
    let params = EnsembleParams::laguerre(beta, gamma).unwrap();
    let stats = ball_statistics(&params, 1_000_000, 1, 10_000, &RngStream::new(47, 0)).unwrap();
    let d = stats.root_ks().unwrap();
    assert!(d <= 0.05, "KS {d}");
    let dev = stats.loop_deviation_quantile(0.99).unwrap();
    assert!(dev <= 0.05 * beta, "deviation {dev}");
}

#[test]
fn ball_statistics_guards() {
    let params = EnsembleParams::hermite(1.0).unwrap();
    let s = RngStream::new(48, 0);
    assert!(ball_statistics(&params, 10, 5, 1, &s).is_err());
    let stats = ball_statistics(&params, 10, 4, 50, &s).unwrap();
    assert!(stats.draws.iter().all(|d| d.root < 10 && d.ball.len() <= 9));
    assert_eq!(stats, ball_statistics(&params, 10, 4, 50, &s).unwrap());
}
