//! The composite prior over `(B, f)` pairs.
//!
//! The matrix prior draws an orthogonal factor (Haar) and a simplex spectrum
//! (Dirichlet, parameters `1/d` by default so that a typical draw is nearly
//! rank one) and assembles `B = V diag(gamma^{1/2}) V^T`. The link prior
//! draws a model dimension `M` from a truncated geometric mixture with
//! weights `base^{-M}`, then coefficients uniformly from the weighted-l1
//! ball of radius `C + 1`.
//!
//! Densities are only ever consumed as ratios inside Metropolis-Hastings;
//! the Haar factor is omitted throughout because every proposal acting on
//! the orthogonal factor is symmetric with respect to Haar measure.

use rand::Rng as _;
use rand_distr::{Distribution, Exp1};

use crate::dictionary::{weighted_l1, LinkFunction};
use crate::error::{Error, Result};
use crate::manifold::{
    assemble_index_matrix, sample_dirichlet, sample_haar_orthogonal, IndexMatrix,
    OrthogonalFactor, SpectrumSimplex,
};
use crate::seed::Rng;
use crate::special::ln_factorial;

/// Marker value for log-densities of points outside the prior support.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

/// Clamp applied to spectrum components when evaluating the Dirichlet
/// density at simplex-boundary points, where sub-unit shapes diverge.
const BOUNDARY_CLAMP: f64 = 1e-300;

/// Configuration of the composite prior.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorConfig {
    /// Matrix side length.
    pub d: usize,
    /// Dirichlet parameters; must sum to one.
    pub alpha: Vec<f64>,
    /// Sample size, the hard truncation of the dimension mixture.
    pub n: usize,
    /// Upper bound for the model dimension, at most `n`.
    pub m_max: usize,
    /// Sup-norm constant for the target link; coefficient balls get radius
    /// `c + 1`.
    pub c: f64,
    /// Geometric decay base of the dimension mixture.
    pub decay_base: f64,
}

impl PriorConfig {
    /// Standard prior: `alpha = (1/d, ..., 1/d)`, dimension range `1..=n`,
    /// decay base 10.
    pub fn new(d: usize, n: usize, c: f64) -> Result<Self> {
        let cfg = Self {
            d,
            alpha: vec![1.0 / d.max(1) as f64; d],
            n,
            m_max: n,
            c,
            decay_base: 10.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_m_max(mut self, m_max: usize) -> Result<Self> {
        self.m_max = m_max;
        self.validate()?;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: Vec<f64>) -> Result<Self> {
        self.alpha = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn with_decay_base(mut self, base: f64) -> Result<Self> {
        self.decay_base = base;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidConfig("prior needs d >= 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidConfig("prior needs n >= 1".into()));
        }
        if self.alpha.len() != self.d {
            return Err(Error::InvalidConfig(format!(
                "alpha has length {} but d = {}",
                self.alpha.len(),
                self.d
            )));
        }
        if self.alpha.iter().any(|&a| a <= 0.0) {
            return Err(Error::InvalidConfig(
                "Dirichlet parameters must be positive".into(),
            ));
        }
        let sum: f64 = self.alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "Dirichlet parameters must sum to 1, got {sum}"
            )));
        }
        if self.c < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "link bound C must be at least 1, got {}",
                self.c
            )));
        }
        if self.m_max == 0 || self.m_max > self.n {
            return Err(Error::InvalidConfig(format!(
                "dimension range must satisfy 1 <= m_max <= n, got m_max = {}, n = {}",
                self.m_max, self.n
            )));
        }
        if !self.decay_base.is_finite() || self.decay_base <= 1.0 {
            return Err(Error::InvalidConfig(
                "dimension mixture decay base must exceed 1".into(),
            ));
        }
        Ok(())
    }

    /// Radius of the coefficient balls: `C + 1`.
    pub fn coefficient_budget(&self) -> f64 {
        self.c + 1.0
    }
}

/// One draw from the matrix prior.
pub fn sample_matrix_prior(cfg: &PriorConfig, rng: &mut Rng) -> Result<IndexMatrix> {
    let v = sample_haar_orthogonal(cfg.d, rng)?;
    let gamma = sample_dirichlet(&cfg.alpha, rng)?;
    assemble_index_matrix(v, gamma)
}

/// Exact probabilities `P(M = m) = base^{-m} / sum_{m'=1}^{m_max}
/// base^{-m'}` for `m = 1..=m_max`.
pub fn model_dimension_pmf(cfg: &PriorConfig) -> Vec<f64> {
    let b = cfg.decay_base;
    let weights: Vec<f64> = (1..=cfg.m_max).map(|m| b.powi(-(m as i32))).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Log weight of dimension `m` under the truncated mixture, including the
/// normalizer.
pub fn log_dimension_weight(cfg: &PriorConfig, m: usize) -> f64 {
    if m == 0 || m > cfg.m_max {
        return LOG_ZERO;
    }
    let b = cfg.decay_base;
    let log_total = {
        // sum_{m'=1}^{m_max} b^{-m'} = (1 - b^{-m_max}) / (b - 1) * b^{0}
        // computed directly for numerical transparency.
        let total: f64 = (1..=cfg.m_max).map(|k| b.powi(-(k as i32))).sum();
        total.ln()
    };
    -(m as f64) * b.ln() - log_total
}

/// Inverse-CDF draw of the model dimension.
pub fn sample_model_dimension(cfg: &PriorConfig, rng: &mut Rng) -> usize {
    let pmf = model_dimension_pmf(cfg);
    let u: f64 = rng.random_range(0.0..1.0);
    let mut acc = 0.0;
    for (i, &p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return i + 1;
        }
    }
    cfg.m_max
}

/// Uniform draw from the weighted ball `{beta : sum_j j |beta_j| <=
/// budget}`.
///
/// Substituting `z_j = j beta_j` maps the ball onto the standard l1 ball
/// with constant Jacobian, so a uniform `z` (signed exponentials normalized
/// to the sphere, radius scaled by `U^{1/M}`) pulls back to a uniform
/// `beta`.
pub fn sample_coefficients_uniform(m: usize, budget: f64, rng: &mut Rng) -> Vec<f64> {
    assert!(m >= 1, "coefficient dimension must be at least 1");
    assert!(budget > 0.0, "ball radius must be positive");
    let mut z = Vec::with_capacity(m);
    let mut norm = 0.0;
    for _ in 0..m {
        let e: f64 = Exp1.sample(rng);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        z.push(sign * e);
        norm += e;
    }
    if norm <= 0.0 {
        return vec![0.0; m];
    }
    let u: f64 = rng.random_range(0.0..1.0);
    let radius = budget * u.powf(1.0 / m as f64);
    z.iter()
        .enumerate()
        .map(|(i, &zi)| radius * zi / norm / (i + 1) as f64)
        .collect()
}

/// One draw from the link prior: dimension from the geometric mixture,
/// coefficients uniform on the `C + 1` ball.
pub fn sample_link_prior(cfg: &PriorConfig, rng: &mut Rng) -> Result<LinkFunction> {
    let m = sample_model_dimension(cfg, rng);
    let beta = sample_coefficients_uniform(m, cfg.coefficient_budget(), rng);
    LinkFunction::new(beta, cfg.coefficient_budget())
}

/// Log volume of the weighted ball in dimension `m`:
/// `vol = (2 budget)^m / (m!)^2`.
pub fn log_ball_volume(m: usize, budget: f64) -> f64 {
    m as f64 * (2.0 * budget).ln() - 2.0 * ln_factorial(m)
}

/// Log Dirichlet density at `gamma`, clamping boundary zeros to keep the
/// value finite (sub-unit shapes diverge at the boundary; acceptance ratios
/// must stay NaN-free).
pub fn log_dirichlet_density(gamma: &[f64], alpha: &[f64]) -> f64 {
    assert_eq!(gamma.len(), alpha.len());
    let sum_alpha: f64 = alpha.iter().sum();
    let mut log_norm = crate::special::ln_gamma(sum_alpha);
    for &a in alpha {
        log_norm -= crate::special::ln_gamma(a);
    }
    let mut acc = log_norm;
    for (&g, &a) in gamma.iter().zip(alpha) {
        let g = g.max(BOUNDARY_CLAMP);
        acc += (a - 1.0) * g.ln();
    }
    acc
}

/// Structured log prior density of a state, Haar factor omitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPriorComponents {
    /// Dirichlet log density of the spectrum.
    pub spectrum: f64,
    /// Log mixture weight of the model dimension (normalized).
    pub dimension: f64,
    /// Log uniform density on the coefficient ball: `-log vol`, or
    /// `-infinity` outside.
    pub coefficients: f64,
}

impl LogPriorComponents {
    pub fn total(&self) -> f64 {
        self.spectrum + self.dimension + self.coefficients
    }
}

/// Evaluates the prior log-density components at `(gamma, m, beta)`.
pub fn log_prior_components(
    gamma: &[f64],
    beta: &[f64],
    cfg: &PriorConfig,
) -> LogPriorComponents {
    let m = beta.len();
    let budget = cfg.coefficient_budget();
    let dimension = log_dimension_weight(cfg, m);
    let coefficients = if m >= 1 && weighted_l1(beta) <= budget + crate::dictionary::BUDGET_TOL {
        -log_ball_volume(m, budget)
    } else {
        LOG_ZERO
    };
    let spectrum = if gamma.len() == cfg.d && gamma.iter().all(|&g| (0.0..=1.0).contains(&g)) {
        log_dirichlet_density(gamma, &cfg.alpha)
    } else {
        LOG_ZERO
    };
    LogPriorComponents {
        spectrum,
        dimension,
        coefficients,
    }
}

/// Monte-Carlo estimate of the prior mass of a product neighborhood around
/// a target factorization: every sampled eigenvalue `gamma_i^{1/2}` within
/// `eps` of the target's, and the first `r` sampled eigenvector columns
/// within `eta` of the target's in Euclidean norm.
///
/// Returns `(estimate, stderr)`.
#[allow(clippy::too_many_arguments)]
pub fn small_ball_probability_mc(
    cfg: &PriorConfig,
    target_v: &OrthogonalFactor,
    target_gamma: &SpectrumSimplex,
    eta: f64,
    eps: f64,
    r: usize,
    n_draws: usize,
    rng: &mut Rng,
) -> Result<(f64, f64)> {
    if target_v.dim() != cfg.d || target_gamma.dim() != cfg.d {
        return Err(Error::DimensionMismatch(
            "small-ball target does not match prior dimension".into(),
        ));
    }
    if r > cfg.d {
        return Err(Error::InvalidParameter(
            "small-ball rank exceeds dimension".into(),
        ));
    }
    let target_eigs = target_gamma.eigenvalues();
    let mut hits = 0usize;
    for _ in 0..n_draws {
        let v = sample_haar_orthogonal(cfg.d, rng)?;
        let gamma = sample_dirichlet(&cfg.alpha, rng)?;
        let eigs = gamma.eigenvalues();
        let eig_ok = eigs
            .iter()
            .zip(&target_eigs)
            .all(|(&e, &t)| (e - t).abs() <= eps);
        if !eig_ok {
            continue;
        }
        let vec_ok = (0..r).all(|i| (v.column(i) - target_v.column(i)).norm() <= eta);
        if vec_ok {
            hits += 1;
        }
    }
    let p = hits as f64 / n_draws as f64;
    let se = (p * (1.0 - p) / n_draws as f64).sqrt();
    Ok((p, se))
}

/// The lower bound `eta^{r(d-1)} / 2^{4rd}` that the eigenvector component
/// of the small-ball mass must dominate.
pub fn small_ball_lower_bound(d: usize, r: usize, eta: f64) -> f64 {
    eta.powi((r * (d - 1)) as i32) / 2f64.powi((4 * r * d) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::effective_rank;
    use crate::seed::rng_from_seed;

    fn cfg(d: usize, n: usize) -> PriorConfig {
        PriorConfig::new(d, n, 1.0).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(PriorConfig::new(0, 5, 1.0).is_err());
        assert!(PriorConfig::new(2, 0, 1.0).is_err());
        assert!(PriorConfig::new(2, 5, 0.5).is_err());
        assert!(cfg(2, 5).with_m_max(6).is_err());
        assert!(cfg(2, 5).with_m_max(0).is_err());
        assert!(cfg(2, 5).with_alpha(vec![0.5, 0.6]).is_err());
        assert!(cfg(2, 5).with_decay_base(1.0).is_err());
    }

    #[test]
    fn matrix_prior_d1_is_constant() {
        let mut rng = rng_from_seed(30);
        for _ in 0..20 {
            let b = sample_matrix_prior(&cfg(1, 3), &mut rng).unwrap();
            assert!((b.dense()[(0, 0)] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_prior_concentrates_on_low_rank() {
        let mut rng = rng_from_seed(31);
        let c = cfg(5, 10);
        let n = 10_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let b = sample_matrix_prior(&c, &mut rng).unwrap();
            let (_, gamma) = b.factors().unwrap();
            acc += effective_rank(&gamma.eigenvalues(), 0.5) as f64;
        }
        let mean = acc / n as f64;
        assert!(mean <= 1.5, "mean effective rank = {mean}");
    }

    #[test]
    fn matrix_prior_is_positive_semidefinite() {
        let mut rng = rng_from_seed(32);
        for _ in 0..50 {
            let b = sample_matrix_prior(&cfg(3, 5), &mut rng).unwrap();
            let min_eig = nalgebra::SymmetricEigen::new(b.dense().clone())
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::MAX, f64::min);
            assert!(min_eig >= -1e-10, "min eigenvalue = {min_eig}");
        }
    }

    #[test]
    fn dimension_pmf_matches_geometric_series() {
        let c = cfg(2, 10);
        let pmf = model_dimension_pmf(&c);
        let total: f64 = pmf.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // P(M = 1) = 10^{-1} / sum_{m=1}^{10} 10^{-m} = 0.9000000000900...
        let expect: f64 = 0.1 / (1..=10).map(|m| 10f64.powi(-m)).sum::<f64>();
        assert!((pmf[0] - expect).abs() < 1e-15);
        assert!((pmf[0] - 0.9).abs() < 1e-9);
        // Normalization stays exact for a range of truncations.
        for n in [1usize, 2, 5, 30] {
            let pmf = model_dimension_pmf(&cfg(2, n));
            assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_sampler_matches_pmf() {
        let mut rng = rng_from_seed(33);
        let c = cfg(2, 10);
        let n = 100_000;
        let mut counts = [0usize; 10];
        for _ in 0..n {
            counts[sample_model_dimension(&c, &mut rng) - 1] += 1;
        }
        // n = 1 forces M = 1.
        let c1 = cfg(2, 1);
        assert_eq!(sample_model_dimension(&c1, &mut rng), 1);
        // Empirical ratio P(2)/P(1) should match the decay base.
        let ratio = counts[1] as f64 / counts[0] as f64;
        assert!((ratio - 0.1).abs() < 0.01, "ratio = {ratio}");
    }

    #[test]
    fn coefficients_uniform_interval_for_m1() {
        let mut rng = rng_from_seed(34);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let beta = sample_coefficients_uniform(1, 2.0, &mut rng);
            assert!(beta[0].abs() <= 2.0);
            sum += beta[0];
        }
        let mean = sum / n as f64;
        assert!(mean.abs() < 0.02, "mean = {mean}");
    }

    #[test]
    fn coefficients_ball_volume_scaling() {
        // P(||beta||_w <= budget/2) = (1/2)^M for the uniform law;
        // cross-checked against a rejection sampler from the bounding box.
        let mut rng = rng_from_seed(35);
        let n = 100_000;
        let mut hits = 0usize;
        for _ in 0..n {
            let beta = sample_coefficients_uniform(2, 1.0, &mut rng);
            let norm = weighted_l1(&beta);
            assert!(norm <= 1.0 + 1e-12);
            if norm <= 0.5 {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        assert!((p - 0.25).abs() < 0.01, "p = {p}");

        // Rejection oracle: uniform on [-1,1] x [-1/2,1/2], keep in-ball.
        let mut kept = 0usize;
        let mut inner = 0usize;
        while kept < n {
            let b1: f64 = rng.random_range(-1.0..1.0);
            let b2: f64 = rng.random_range(-0.5..0.5);
            if b1.abs() + 2.0 * b2.abs() <= 1.0 {
                kept += 1;
                if b1.abs() + 2.0 * b2.abs() <= 0.5 {
                    inner += 1;
                }
            }
        }
        let p_oracle = inner as f64 / n as f64;
        let se = 3.0 * (2.0 * 0.25 * 0.75 / n as f64).sqrt();
        assert!((p - p_oracle).abs() < se, "p = {p}, oracle = {p_oracle}");
    }

    #[test]
    fn coefficients_uniformity_against_rejection_oracle() {
        // Half-space probabilities agree with a rejection sampler within
        // 3 combined MC standard errors, for M = 1..3.
        let mut rng = rng_from_seed(36);
        let n = 40_000;
        for m in 1..=3usize {
            let budget = 2.0;
            let draws: Vec<Vec<f64>> = (0..n)
                .map(|_| sample_coefficients_uniform(m, budget, &mut rng))
                .collect();
            // Rejection oracle from the box prod_j [-budget/j, budget/j].
            let mut oracle = Vec::with_capacity(n);
            while oracle.len() < n {
                let cand: Vec<f64> = (1..=m)
                    .map(|j| rng.random_range(-budget / j as f64..budget / j as f64))
                    .collect();
                if weighted_l1(&cand) <= budget {
                    oracle.push(cand);
                }
            }
            for trial in 0..10 {
                let w: Vec<f64> = (0..m)
                    .map(|k| ((trial * m + k) as f64 * 0.7).sin())
                    .collect();
                let c = 0.1 * (trial as f64 - 4.5);
                let eval =
                    |s: &Vec<f64>| w.iter().zip(s).map(|(&a, &b)| a * b).sum::<f64>() <= c;
                let p1 = draws.iter().filter(|s| eval(s)).count() as f64 / n as f64;
                let p2 = oracle.iter().filter(|s| eval(s)).count() as f64 / n as f64;
                let se = (p1 * (1.0 - p1) / n as f64 + p2 * (1.0 - p2) / n as f64).sqrt();
                assert!(
                    (p1 - p2).abs() <= 3.0 * se.max(1e-4),
                    "m = {m}, trial = {trial}: {p1} vs {p2}"
                );
            }
        }
    }

    #[test]
    fn link_prior_support_and_mixture_mass() {
        let mut rng = rng_from_seed(37);
        // n = 1 forces a constant link on [-2, 2].
        let c1 = cfg(2, 1);
        for _ in 0..100 {
            let f = sample_link_prior(&c1, &mut rng).unwrap();
            assert_eq!(f.model_dimension(), 1);
            assert!(f.coefficients()[0].abs() <= 2.0);
        }
        let c = cfg(2, 10);
        let n = 100_000;
        let mut m1 = 0usize;
        for _ in 0..n {
            let f = sample_link_prior(&c, &mut rng).unwrap();
            assert!(f.weighted_l1_norm() <= c.coefficient_budget() + 1e-12);
            if f.model_dimension() == 1 {
                m1 += 1;
            }
        }
        assert!(m1 as f64 / n as f64 >= 0.88, "P(M=1) = {}", m1 as f64 / n as f64);
    }

    #[test]
    fn log_prior_component_values() {
        let c = cfg(2, 10);
        // M = 1, budget = 2: uniform density on an interval of length 4.
        let lp = log_prior_components(&[0.5, 0.5], &[0.3], &c);
        assert!((lp.coefficients + 4.0f64.ln()).abs() < 1e-12);
        assert!(lp.total().is_finite());
        // Outside the ball: -infinity marker.
        let lp = log_prior_components(&[0.5, 0.5], &[3.0], &c);
        assert_eq!(lp.coefficients, LOG_ZERO);
        // Boundary spectrum stays finite under the clamp rule.
        let lp = log_prior_components(&[1.0, 0.0], &[0.3], &c);
        assert!(lp.spectrum.is_finite());
    }

    #[test]
    fn dirichlet_log_density_matches_beta_marginal() {
        // For d = 2 the Dirichlet density in (g, 1 - g) equals the Beta
        // density in g.
        let alpha = [0.3, 0.7];
        for &g in &[0.1, 0.42, 0.9] {
            let lhs = log_dirichlet_density(&[g, 1.0 - g], &alpha);
            let rhs = (alpha[0] - 1.0) * g.ln() + (alpha[1] - 1.0) * (1.0 - g).ln()
                - crate::special::ln_beta(alpha[0], alpha[1]);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_volume_closed_form() {
        // M = 1: interval of length 2*budget; M = 2: diamond of area
        // (2*budget)^2 / (2! * 2!) = budget^2.
        assert!((log_ball_volume(1, 2.0) - 4.0f64.ln()).abs() < 1e-12);
        assert!((log_ball_volume(2, 1.5) - (1.5f64 * 1.5).ln()).abs() < 1e-12);
    }

    #[test]
    fn small_ball_mass_dominates_bound_d2() {
        let mut rng = rng_from_seed(38);
        let c = cfg(2, 5);
        let target_v = sample_haar_orthogonal(2, &mut rng).unwrap();
        let target_g = sample_dirichlet(&c.alpha, &mut rng).unwrap();
        let (p, se) =
            small_ball_probability_mc(&c, &target_v, &target_g, 0.25, 0.25, 1, 200_000, &mut rng)
                .unwrap();
        let bound = small_ball_lower_bound(2, 1, 0.25);
        assert!((bound - 0.25 / 256.0).abs() < 1e-18);
        assert!(p - 3.0 * se >= bound, "p = {p}, se = {se}, bound = {bound}");
    }

    #[test]
    fn small_ball_mass_dominates_bound_d3() {
        let mut rng = rng_from_seed(39);
        let c = cfg(3, 5);
        let target_v = sample_haar_orthogonal(3, &mut rng).unwrap();
        let target_g = sample_dirichlet(&c.alpha, &mut rng).unwrap();
        let (p, se) =
            small_ball_probability_mc(&c, &target_v, &target_g, 0.25, 0.25, 1, 400_000, &mut rng)
                .unwrap();
        let bound = small_ball_lower_bound(3, 1, 0.25);
        assert!(p - 3.0 * se >= bound, "p = {p}, se = {se}, bound = {bound}");
    }
}
