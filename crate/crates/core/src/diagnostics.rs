//! Chain and Monte-Carlo diagnostics: effective sample size, split-chain
//! potential scale reduction, two-sample distribution tests, and least
//! squares slope fits for rate curves.

/// Effective sample size from the initial positive sequence of paired
/// autocovariances (Geyer). Returns `n` for chains with no variance.
pub fn effective_sample_size(chain: &[f64]) -> f64 {
    let n = chain.len();
    if n < 4 {
        return n as f64;
    }
    let nf = n as f64;
    let mean = chain.iter().sum::<f64>() / nf;
    let var = chain.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / nf;
    if var <= 0.0 || !var.is_finite() {
        return nf;
    }
    let autocov = |lag: usize| -> f64 {
        (0..n - lag)
            .map(|i| (chain[i] - mean) * (chain[i + lag] - mean))
            .sum::<f64>()
            / nf
    };
    let mut sum_rho = 0.0;
    let mut lag = 1;
    while lag + 1 < n {
        let pair = (autocov(lag) + autocov(lag + 1)) / var;
        if pair < 0.0 {
            break;
        }
        sum_rho += pair;
        lag += 2;
        if lag > n / 2 {
            break;
        }
    }
    (nf / (1.0 + 2.0 * sum_rho)).clamp(1.0, nf)
}

/// Monte-Carlo standard error of the mean of an autocorrelated sequence.
pub fn mc_stderr(chain: &[f64]) -> f64 {
    let n = chain.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let mean = chain.iter().sum::<f64>() / n as f64;
    let var = chain.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (var / effective_sample_size(chain)).sqrt()
}

/// Mean and standard error of an i.i.d. sample.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Split-chain potential scale reduction factor on one scalar trace per
/// chain. Values near 1 indicate between-chain agreement; above ~1.1 the
/// chains have not mixed.
pub fn potential_scale_reduction(chains: &[Vec<f64>]) -> f64 {
    // Split each chain in half to detect within-chain drift.
    let mut halves: Vec<&[f64]> = Vec::new();
    for c in chains {
        let mid = c.len() / 2;
        if mid >= 2 {
            halves.push(&c[..mid]);
            halves.push(&c[mid..]);
        }
    }
    let m = halves.len();
    if m < 2 {
        return 1.0;
    }
    let n = halves.iter().map(|h| h.len()).min().unwrap() as f64;
    let means: Vec<f64> = halves
        .iter()
        .map(|h| h.iter().sum::<f64>() / h.len() as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / m as f64;
    let b = n / (m as f64 - 1.0) * means.iter().map(|&x| (x - grand).powi(2)).sum::<f64>();
    let w = halves
        .iter()
        .zip(&means)
        .map(|(h, &mu)| h.iter().map(|&x| (x - mu).powi(2)).sum::<f64>() / (h.len() as f64 - 1.0))
        .sum::<f64>()
        / m as f64;
    if w <= 0.0 {
        return 1.0;
    }
    let var_plus = (n - 1.0) / n * w + b / n;
    (var_plus / w).sqrt()
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F1 - F2|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i].min(ys[j]);
        while i < n && xs[i] <= x {
            i += 1;
        }
        while j < m && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Critical value for the two-sample KS test at level `alpha` using
/// effective sample sizes; with ties (discrete data) the test is
/// conservative.
pub fn ks_two_sample_critical(alpha: f64, n1_eff: f64, n2_eff: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n1_eff + n2_eff) / (n1_eff * n2_eff)).sqrt()
}

/// Empirical quantile of an unsorted sample (order statistic at rank
/// `ceil(q * n)`, the lowest value for q = 0).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    assert!(!xs.is_empty(), "quantile of empty sample");
    assert!((0.0..=1.0).contains(&q));
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((q * s.len() as f64).ceil() as usize).max(1) - 1;
    s[rank.min(s.len() - 1)]
}

/// Least-squares line fit `y = intercept + slope * x`; returns
/// `(slope, intercept, slope_stderr)`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    assert!(n >= 2, "slope fit needs at least two points");
    let nf = n as f64;
    let xbar = x.iter().sum::<f64>() / nf;
    let ybar = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&v| (v - xbar).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&u, &v)| (u - xbar) * (v - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let stderr = if n > 2 {
        let ss_res: f64 = x
            .iter()
            .zip(y)
            .map(|(&u, &v)| (v - intercept - slope * u).powi(2))
            .sum();
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, intercept, stderr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn ess_of_iid_sequence_is_near_n() {
        let mut rng = rng_from_seed(1);
        let xs: Vec<f64> = (0..5000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let ess = effective_sample_size(&xs);
        assert!(ess > 3000.0, "ess = {ess}");
    }

    #[test]
    fn ess_of_correlated_sequence_is_reduced() {
        let mut rng = rng_from_seed(2);
        let mut xs = vec![0.0f64; 5000];
        for i in 1..xs.len() {
            let z: f64 = StandardNormal.sample(&mut rng);
            xs[i] = 0.95 * xs[i - 1] + z;
        }
        let ess = effective_sample_size(&xs);
        assert!(ess < 1000.0, "ess = {ess}");
    }

    #[test]
    fn ks_detects_shift_and_accepts_equality() {
        let mut rng = rng_from_seed(3);
        let a: Vec<f64> = (0..4000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..4000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let c: Vec<f64> = b.iter().map(|x| x + 0.2).collect();
        let crit = ks_two_sample_critical(0.05, 4000.0, 4000.0);
        assert!(ks_statistic(&a, &b) < crit);
        assert!(ks_statistic(&a, &c) > crit);
    }

    #[test]
    fn psrf_near_one_for_identical_laws() {
        let mut rng = rng_from_seed(4);
        let chains: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..2000).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let r = potential_scale_reduction(&chains);
        assert!(r < 1.05, "R = {r}");
        let shifted: Vec<Vec<f64>> = chains
            .iter()
            .enumerate()
            .map(|(k, c)| c.iter().map(|x| x + k as f64).collect())
            .collect();
        assert!(potential_scale_reduction(&shifted) > 1.5);
    }

    #[test]
    fn quantile_order_statistics() {
        let xs = vec![3.0, 1.0, 2.0, 4.0];
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 0.5), 2.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
    }

    #[test]
    fn slope_fit_recovers_exact_power_law() {
        let ns = [100.0f64, 300.0, 1000.0, 3000.0];
        let p = 0.8;
        let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
        let ys: Vec<f64> = ns.iter().map(|n| (2.5 * n.powf(-p)).ln()).collect();
        let (slope, _, se) = least_squares_slope(&xs, &ys);
        assert!((slope + p).abs() < 1e-10);
        assert!(se < 1e-10);
    }
}
