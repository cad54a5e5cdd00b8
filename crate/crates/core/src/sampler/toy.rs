//! Discrete detailed-balance validation toy.
//!
//! A twelve-state caricature of the sampler: one-dimensional index (the
//! index matrix is the fixed scalar 1), model dimension 1 or 2, every
//! coefficient snapped to the three-point grid {-1/2, 0, 1/2}, proposals
//! uniform on the grid, dimension moves mirroring the engine's
//! reversible-jump bookkeeping. The exact target is computable by
//! enumeration, and so is the exact transition kernel, so the chain can be
//! checked two ways: empirical kernel against brute-force enumeration, and
//! stationary flow symmetry `pi(s) P(s,s') = pi(s') P(s',s)` against the
//! known target. The second check is what catches a sign error in the
//! acceptance ratio; both the simulation and the enumeration route every
//! decision through [`super::accept_log_ratio`].

use rand::Rng as _;

use crate::dictionary::Dictionary;
use crate::seed::{rng_from_seed, Rng};

use super::{accept_log_ratio, MhBug};

/// Coefficient grid shared by both model dimensions.
pub const GRID: [f64; 3] = [-0.5, 0.0, 0.5];

/// Probability of attempting a dimension move (mirrors the engine's
/// one-in-five schedule).
const P_DIM: f64 = 0.2;

/// Toy configuration.
#[derive(Debug, Clone, Copy)]
pub struct ToyConfig {
    pub steps: usize,
    pub seed: u64,
    pub lambda: f64,
    pub bug: MhBug,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            steps: 1_000_000,
            seed: 17,
            lambda: 2.0,
            bug: MhBug::Off,
        }
    }
}

/// Results of a toy run.
#[derive(Debug, Clone)]
pub struct ToyReport {
    /// `max_{s != s'} |pi(s) Phat(s,s') - pi(s') Phat(s',s)|` with the exact
    /// target `pi`.
    pub max_flow_asymmetry: f64,
    /// `max |Phat - P|` against the enumerated kernel (with the same bug
    /// setting), a simulation-vs-enumeration consistency check.
    pub max_kernel_error: f64,
    /// Whether every transition count lies within the Poisson-tail band
    /// `|count - v P| <= 6 sqrt(v P) + 6` of the enumerated kernel.
    pub kernel_consistent: bool,
    pub n_states: usize,
    /// Smallest visit count across states.
    pub min_visits: usize,
}

/// State space: model dimension 1 states `(i1)` then dimension 2 states
/// `(i1, i2)`, indices into [`GRID`].
fn state_count() -> usize {
    GRID.len() + GRID.len() * GRID.len()
}

fn id_m1(i1: usize) -> usize {
    i1
}

fn id_m2(i1: usize, i2: usize) -> usize {
    GRID.len() + i1 * GRID.len() + i2
}

fn decode(id: usize) -> (usize, usize, usize) {
    if id < GRID.len() {
        (1, id, 0)
    } else {
        let r = id - GRID.len();
        (2, r / GRID.len(), r % GRID.len())
    }
}

/// Fixed toy dataset: indices in (-1, 1), responses from a two-term
/// expansion plus deterministic perturbations.
fn toy_data() -> (Vec<f64>, Vec<f64>) {
    let xs = vec![-0.9, -0.65, -0.4, -0.15, 0.15, 0.4, 0.65, 0.9];
    let bumps = [0.05, -0.08, 0.02, -0.03, 0.07, -0.01, 0.04, -0.06];
    let ys = xs
        .iter()
        .zip(bumps)
        .map(|(&t, b)| 0.4 + 0.3 * (std::f64::consts::PI * t).cos() + b)
        .collect();
    (xs, ys)
}

/// Empirical risks of all states.
fn state_risks() -> Vec<f64> {
    let dict = Dictionary::trigonometric();
    let (xs, ys) = toy_data();
    let n = xs.len() as f64;
    (0..state_count())
        .map(|id| {
            let (m, i1, i2) = decode(id);
            xs.iter()
                .zip(&ys)
                .map(|(&t, &y)| {
                    let mut f = GRID[i1];
                    if m == 2 {
                        f += GRID[i2] * dict.eval_basis_unchecked(2, t);
                    }
                    let r = y - f;
                    r * r
                })
                .sum::<f64>()
                / n
        })
        .collect()
}

/// Exact normalized log target: dimension weights with decay base 10
/// truncated at 2, uniform within-model masses, Gibbs tilt.
fn log_targets(lambda: f64, risks: &[f64]) -> Vec<f64> {
    let w1 = 0.1 / 0.11; // P(M = 1)
    let w2 = 0.01 / 0.11; // P(M = 2)
    (0..state_count())
        .map(|id| {
            let (m, _, _) = decode(id);
            let prior = match m {
                1 => w1 / GRID.len() as f64,
                _ => w2 / (GRID.len() * GRID.len()) as f64,
            };
            prior.ln() - lambda * risks[id]
        })
        .collect()
}

fn normalized_target(log_t: &[f64]) -> Vec<f64> {
    let max = log_t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = log_t.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = unnorm.iter().sum();
    unnorm.into_iter().map(|w| w / total).collect()
}

/// Log proposal-ratio corrections mirroring the engine's reversible jump:
/// birth appends a grid value with pmf 1/3 and the only move back is a
/// death, so the correction is +ln 3 for births and -ln 3 for deaths.
fn birth_log_ratio() -> f64 {
    (GRID.len() as f64).ln()
}

fn death_log_ratio() -> f64 {
    -(GRID.len() as f64).ln()
}

/// All proposal events from a state: `(target id, proposal probability,
/// log proposal ratio)`.
fn proposals_from(id: usize) -> Vec<(usize, f64, f64)> {
    let (m, i1, i2) = decode(id);
    let g = GRID.len() as f64;
    let mut out = Vec::new();
    match m {
        1 => {
            // Within-model single coordinate.
            for v in 0..GRID.len() {
                out.push((id_m1(v), (1.0 - P_DIM) / g, 0.0));
            }
            // Birth (the only dimension move at m = 1).
            for v in 0..GRID.len() {
                out.push((id_m2(i1, v), P_DIM / g, birth_log_ratio()));
            }
        }
        _ => {
            // Within-model: pick one of two coordinates.
            for v in 0..GRID.len() {
                out.push((id_m2(v, i2), (1.0 - P_DIM) / 2.0 / g, 0.0));
                out.push((id_m2(i1, v), (1.0 - P_DIM) / 2.0 / g, 0.0));
            }
            // Death (the only dimension move at m = 2 = m_max).
            out.push((id_m1(i1), P_DIM, death_log_ratio()));
        }
    }
    out
}

/// Brute-force transition kernel under the given bug setting.
pub fn enumerate_kernel(lambda: f64, bug: MhBug) -> Vec<Vec<f64>> {
    let risks = state_risks();
    let log_t = log_targets(lambda, &risks);
    let ns = state_count();
    let mut kernel = vec![vec![0.0; ns]; ns];
    for s in 0..ns {
        for (t, prob, log_ratio) in proposals_from(s) {
            if t == s {
                kernel[s][s] += prob;
                continue;
            }
            let log_acc = accept_log_ratio(log_t[t] - log_t[s], log_ratio, bug);
            let acc = log_acc.min(0.0).exp();
            kernel[s][t] += prob * acc;
            kernel[s][s] += prob * (1.0 - acc);
        }
    }
    kernel
}

/// Runs the toy chain and reports flow asymmetry and kernel agreement.
pub fn run_detailed_balance_toy(cfg: &ToyConfig) -> ToyReport {
    let risks = state_risks();
    let log_t = log_targets(cfg.lambda, &risks);
    let pi = normalized_target(&log_t);
    let ns = state_count();

    let mut rng = rng_from_seed(cfg.seed);
    let mut counts = vec![vec![0usize; ns]; ns];
    let mut state = 0usize;
    for _ in 0..cfg.steps {
        let next = toy_step(state, &log_t, cfg.bug, &mut rng);
        counts[state][next] += 1;
        state = next;
    }

    let visits: Vec<usize> = counts.iter().map(|row| row.iter().sum()).collect();
    let p_hat: Vec<Vec<f64>> = counts
        .iter()
        .zip(&visits)
        .map(|(row, &v)| {
            row.iter()
                .map(|&c| if v == 0 { 0.0 } else { c as f64 / v as f64 })
                .collect()
        })
        .collect();

    let mut max_flow_asymmetry: f64 = 0.0;
    for s in 0..ns {
        for t in (s + 1)..ns {
            let fwd = pi[s] * p_hat[s][t];
            let bwd = pi[t] * p_hat[t][s];
            max_flow_asymmetry = max_flow_asymmetry.max((fwd - bwd).abs());
        }
    }

    let kernel = enumerate_kernel(cfg.lambda, cfg.bug);
    let mut max_kernel_error: f64 = 0.0;
    let mut kernel_consistent = true;
    for s in 0..ns {
        for t in 0..ns {
            max_kernel_error = max_kernel_error.max((p_hat[s][t] - kernel[s][t]).abs());
            let expect = visits[s] as f64 * kernel[s][t];
            let dev = (counts[s][t] as f64 - expect).abs();
            if dev > 6.0 * expect.sqrt() + 6.0 {
                kernel_consistent = false;
            }
        }
    }

    ToyReport {
        max_flow_asymmetry,
        max_kernel_error,
        kernel_consistent,
        n_states: ns,
        min_visits: visits.into_iter().min().unwrap_or(0),
    }
}

fn toy_step(state: usize, log_t: &[f64], bug: MhBug, rng: &mut Rng) -> usize {
    let (m, i1, i2) = decode(state);
    let u: f64 = rng.random_range(0.0..1.0);
    let (target, log_ratio) = if u < P_DIM {
        match m {
            1 => {
                let v = rng.random_range(0..GRID.len());
                (id_m2(i1, v), birth_log_ratio())
            }
            _ => (id_m1(i1), death_log_ratio()),
        }
    } else {
        let coord = if m == 1 { 0 } else { rng.random_range(0..2) };
        let v = rng.random_range(0..GRID.len());
        let t = match (m, coord) {
            (1, _) => id_m1(v),
            (2, 0) => id_m2(v, i2),
            _ => id_m2(i1, v),
        };
        (t, 0.0)
    };
    if target == state {
        return state;
    }
    let log_acc = accept_log_ratio(log_t[target] - log_t[state], log_ratio, bug);
    let accept = if log_acc >= 0.0 {
        true
    } else {
        let a: f64 = rng.random_range(0.0..1.0);
        a.ln() < log_acc
    };
    if accept {
        target
    } else {
        state
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerated_kernel_rows_sum_to_one() {
        for bug in [MhBug::Off, MhBug::FlipAcceptSign] {
            let k = enumerate_kernel(2.0, bug);
            for row in &k {
                let total: f64 = row.iter().sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_kernel_satisfies_detailed_balance_without_bug() {
        let risks = state_risks();
        let log_t = log_targets(2.0, &risks);
        let pi = normalized_target(&log_t);
        let k = enumerate_kernel(2.0, MhBug::Off);
        for s in 0..state_count() {
            for t in 0..state_count() {
                let asym = (pi[s] * k[s][t] - pi[t] * k[t][s]).abs();
                assert!(asym < 1e-15, "flow asymmetry {asym} at ({s}, {t})");
            }
        }
    }

    #[test]
    fn exact_kernel_violates_detailed_balance_with_bug() {
        let risks = state_risks();
        let log_t = log_targets(2.0, &risks);
        let pi = normalized_target(&log_t);
        let k = enumerate_kernel(2.0, MhBug::FlipAcceptSign);
        let mut worst: f64 = 0.0;
        for s in 0..state_count() {
            for t in 0..state_count() {
                worst = worst.max((pi[s] * k[s][t] - pi[t] * k[t][s]).abs());
            }
        }
        assert!(worst > 1e-2, "bug should break flows, worst = {worst}");
    }

    #[test]
    fn toy_chain_matches_enumeration_and_balances() {
        let report = run_detailed_balance_toy(&ToyConfig {
            steps: 1_000_000,
            ..Default::default()
        });
        assert!(report.min_visits > 500, "visits = {}", report.min_visits);
        assert!(report.kernel_consistent, "kernel mismatch: {report:?}");
        assert!(
            report.max_flow_asymmetry < 1e-2,
            "flow asymmetry {}",
            report.max_flow_asymmetry
        );
    }

    #[test]
    fn toy_chain_negative_control_fails() {
        let report = run_detailed_balance_toy(&ToyConfig {
            steps: 1_000_000,
            bug: MhBug::FlipAcceptSign,
            ..Default::default()
        });
        assert!(
            report.max_flow_asymmetry > 1e-2,
            "negative control should exceed the bound, got {}",
            report.max_flow_asymmetry
        );
        // The simulation still matches its own (buggy) enumerated kernel.
        assert!(report.kernel_consistent, "kernel mismatch: {report:?}");
    }
}
