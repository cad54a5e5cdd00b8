//! Proposal kernels and burn-in step-size tuning.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::dictionary::weighted_l1;
use crate::manifold::{sample_dirichlet, OrthogonalFactor};
use crate::prior::{log_dirichlet_density, log_prior_components};
use crate::seed::Rng;

use super::{ChainState, GibbsTarget, MoveSlot};

/// The four move families of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// `V' = V exp(S)` with skew-symmetric Gaussian `S`; Haar-symmetric.
    Rotation,
    /// `gamma' ~ Dirichlet(kappa gamma + alpha)`, shrink-toward proposal
    /// with explicit forward/backward ratio.
    Spectrum,
    /// Per-coordinate Gaussian step scaled by `1/j`; symmetric, rejected
    /// outright outside the budget ball.
    Coefficient,
    /// Reversible-jump birth/death over the model dimension.
    Dimension,
}

/// Proposal scales, tuned during burn-in then frozen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSizes {
    /// Std-dev of the skew-symmetric rotation entries.
    pub rot: f64,
    /// Dirichlet concentration of the spectrum proposal; larger is timider.
    pub spec_kappa: f64,
    /// Base std-dev of coefficient steps (coordinate `j` moves by
    /// `coef / j`).
    pub coef: f64,
    /// Std-dev of the zero-centered birth proposal.
    pub birth: f64,
}

impl Default for StepSizes {
    fn default() -> Self {
        Self {
            rot: 0.3,
            spec_kappa: 30.0,
            coef: 0.25,
            birth: 0.4,
        }
    }
}

/// A candidate state with the log proposal-density correction
/// `log q(current | candidate) - log q(candidate | current)`.
pub struct Proposal {
    pub candidate: ChainState,
    pub log_prop_ratio: f64,
}

/// Builds a candidate for the requested move kind. `None` means the
/// proposal left the support (immediate reject); the slot tells the caller
/// which statistics bucket the attempt belongs to.
pub fn build_candidate(
    state: &ChainState,
    target: &GibbsTarget,
    kind: MoveKind,
    sizes: &StepSizes,
    rng: &mut Rng,
) -> (MoveSlot, Option<Proposal>) {
    match kind {
        MoveKind::Rotation => (MoveSlot::Rotation, propose_rotation(state, target, sizes, rng)),
        MoveKind::Spectrum => (MoveSlot::Spectrum, propose_spectrum(state, target, sizes, rng)),
        MoveKind::Coefficient => (
            MoveSlot::Coefficient,
            propose_coefficient(state, target, sizes, rng),
        ),
        MoveKind::Dimension => propose_dimension(state, target, sizes, rng),
    }
}

fn propose_rotation(
    state: &ChainState,
    target: &GibbsTarget,
    sizes: &StepSizes,
    rng: &mut Rng,
) -> Option<Proposal> {
    let d = state.v.dim();
    let mut s = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let z: f64 = StandardNormal.sample(rng);
            s[(i, j)] = sizes.rot * z;
            s[(j, i)] = -s[(i, j)];
        }
    }
    let v_new = state.v.matrix() * skew_exp(&s);
    let v_new = OrthogonalFactor::new(v_new).ok()?;
    let candidate = ChainState::build(target, v_new, state.gamma.clone(), state.beta.clone());
    Some(Proposal {
        candidate,
        log_prop_ratio: 0.0,
    })
}

fn propose_spectrum(
    state: &ChainState,
    target: &GibbsTarget,
    sizes: &StepSizes,
    rng: &mut Rng,
) -> Option<Proposal> {
    let alpha = &target.prior.alpha;
    let kappa = sizes.spec_kappa;
    let cur = state.gamma.weights();
    let fwd_shapes: Vec<f64> = cur
        .iter()
        .zip(alpha)
        .map(|(&g, &a)| kappa * g + a)
        .collect();
    let gamma_new = sample_dirichlet(&fwd_shapes, rng).ok()?;
    let bwd_shapes: Vec<f64> = gamma_new
        .weights()
        .iter()
        .zip(alpha)
        .map(|(&g, &a)| kappa * g + a)
        .collect();
    let log_prop_ratio = log_dirichlet_density(cur, &bwd_shapes)
        - log_dirichlet_density(gamma_new.weights(), &fwd_shapes);
    let candidate = ChainState::build(target, state.v.clone(), gamma_new, state.beta.clone());
    Some(Proposal {
        candidate,
        log_prop_ratio,
    })
}

fn propose_coefficient(
    state: &ChainState,
    target: &GibbsTarget,
    sizes: &StepSizes,
    rng: &mut Rng,
) -> Option<Proposal> {
    let budget = target.prior.coefficient_budget();
    let beta_new: Vec<f64> = state
        .beta
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let z: f64 = StandardNormal.sample(rng);
            b + sizes.coef / (i + 1) as f64 * z
        })
        .collect();
    if weighted_l1(&beta_new) > budget {
        return None;
    }
    Some(Proposal {
        candidate: with_beta_same_dimension(state, target, beta_new),
        log_prop_ratio: 0.0,
    })
}

/// Coefficient-only update: indices and basis columns are reused.
fn with_beta_same_dimension(
    state: &ChainState,
    target: &GibbsTarget,
    beta_new: Vec<f64>,
) -> ChainState {
    debug_assert_eq!(beta_new.len(), state.beta.len());
    let emp_risk = target.risk_of(&state.phi, &beta_new);
    let log_prior = log_prior_components(state.gamma.weights(), &beta_new, target.prior);
    ChainState {
        v: state.v.clone(),
        gamma: state.gamma.clone(),
        beta: beta_new,
        b: state.b.clone(),
        indices: Arc::clone(&state.indices),
        phi: state.phi.clone(),
        emp_risk,
        log_prior,
    }
}

/// Probability of choosing a birth at dimension `m` (death otherwise).
pub(crate) fn p_birth(m: usize, m_max: usize) -> f64 {
    if m >= m_max {
        0.0
    } else if m <= 1 {
        1.0
    } else {
        0.5
    }
}

pub(crate) fn p_death(m: usize, m_max: usize) -> f64 {
    1.0 - p_birth(m, m_max)
}

fn ln_normal_pdf(x: f64, sigma: f64) -> f64 {
    -0.5 * (2.0 * std::f64::consts::PI).ln() - sigma.ln() - x * x / (2.0 * sigma * sigma)
}

fn propose_dimension(
    state: &ChainState,
    target: &GibbsTarget,
    sizes: &StepSizes,
    rng: &mut Rng,
) -> (MoveSlot, Option<Proposal>) {
    let m = state.model_dimension();
    let m_max = target.prior.m_max;
    let pb = p_birth(m, m_max);
    let u: f64 = rng.random_range(0.0..1.0);
    if u < pb {
        let z: f64 = StandardNormal.sample(rng);
        let beta_new = sizes.birth * z;
        (
            MoveSlot::Birth,
            birth_candidate(state, target, sizes.birth, beta_new),
        )
    } else {
        (
            MoveSlot::Death,
            death_candidate(state, target, sizes.birth),
        )
    }
}

/// Birth `M -> M + 1`: append a coefficient drawn from the zero-centered
/// proposal. The reversible-jump correction pairs the move-choice
/// probabilities with the proposal density of the appended coordinate; the
/// dimension weights and ball volumes live in the target ratio.
pub(crate) fn birth_candidate(
    state: &ChainState,
    target: &GibbsTarget,
    birth_sigma: f64,
    beta_new: f64,
) -> Option<Proposal> {
    let m = state.model_dimension();
    let m_max = target.prior.m_max;
    if m >= m_max {
        return None;
    }
    let mut beta = state.beta.clone();
    beta.push(beta_new);
    if weighted_l1(&beta) > target.prior.coefficient_budget() {
        return None;
    }
    let mut phi = state.phi.clone();
    phi.push(target.phi_column(&state.indices, m + 1));
    let emp_risk = target.risk_of(&phi, &beta);
    let log_prior = log_prior_components(state.gamma.weights(), &beta, target.prior);
    let log_prop_ratio = p_death(m + 1, m_max).ln() - p_birth(m, m_max).ln()
        - ln_normal_pdf(beta_new, birth_sigma);
    Some(Proposal {
        candidate: ChainState {
            v: state.v.clone(),
            gamma: state.gamma.clone(),
            beta,
            b: state.b.clone(),
            indices: Arc::clone(&state.indices),
            phi,
            emp_risk,
            log_prior,
        },
        log_prop_ratio,
    })
}

/// Death `M -> M - 1`: drop the last coefficient.
pub(crate) fn death_candidate(
    state: &ChainState,
    target: &GibbsTarget,
    birth_sigma: f64,
) -> Option<Proposal> {
    let m = state.model_dimension();
    if m <= 1 {
        return None;
    }
    let m_max = target.prior.m_max;
    let mut beta = state.beta.clone();
    let dropped = beta.pop().expect("m >= 2");
    let mut phi = state.phi.clone();
    phi.pop();
    let emp_risk = target.risk_of(&phi, &beta);
    let log_prior = log_prior_components(state.gamma.weights(), &beta, target.prior);
    let log_prop_ratio = p_birth(m - 1, m_max).ln() + ln_normal_pdf(dropped, birth_sigma)
        - p_death(m, m_max).ln();
    Some(Proposal {
        candidate: ChainState {
            v: state.v.clone(),
            gamma: state.gamma.clone(),
            beta,
            b: state.b.clone(),
            indices: Arc::clone(&state.indices),
            phi,
            emp_risk,
            log_prior,
        },
        log_prop_ratio,
    })
}

/// Matrix exponential of a skew-symmetric matrix by scaling-and-squaring
/// with a Taylor expansion; the result is orthogonal to rounding error.
pub fn skew_exp(s: &DMatrix<f64>) -> DMatrix<f64> {
    let d = s.nrows();
    debug_assert_eq!(d, s.ncols());
    let norm = s.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = s / 2f64.powi(squarings);
    let mut term = DMatrix::<f64>::identity(d, d);
    let mut acc = DMatrix::<f64>::identity(d, d);
    for j in 1..=40 {
        term = &term * &scaled / j as f64;
        acc += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Acceptance-rate tracker that nudges step sizes toward the 25-40% band
/// during burn-in.
///
/// Dimension moves are exempt: their acceptance is capped by the target's
/// own dimension preference and is not monotone in the birth scale, so an
/// acceptance-band controller has no fixed point there. The birth scale
/// stays at its configured value.
pub struct Tuner {
    window: [usize; 5],
    accepted: [usize; 5],
}

/// Proposals per adjustment window, per move slot.
const TUNE_WINDOW: usize = 160;

impl Tuner {
    pub fn new() -> Self {
        Self {
            window: [0; 5],
            accepted: [0; 5],
        }
    }

    pub fn observe(&mut self, slot: usize, accepted: bool, sizes: &mut StepSizes) {
        self.window[slot] += 1;
        if accepted {
            self.accepted[slot] += 1;
        }
        if self.window[slot] < TUNE_WINDOW {
            return;
        }
        let rate = self.accepted[slot] as f64 / self.window[slot] as f64;
        self.window[slot] = 0;
        self.accepted[slot] = 0;
        let bolder = rate > 0.40;
        let timider = rate < 0.25;
        if !bolder && !timider {
            return;
        }
        let up = if bolder { 1.25 } else { 0.8 };
        match slot {
            0 => sizes.rot = (sizes.rot * up).clamp(1e-3, 3.0),
            1 => {
                // Concentration works inversely: larger kappa is timider.
                let down = if bolder { 0.7 } else { 1.4 };
                sizes.spec_kappa = (sizes.spec_kappa * down).clamp(0.5, 1e6);
            }
            2 => sizes.coef = (sizes.coef * up).clamp(1e-4, 3.0),
            3 | 4 => {}
            _ => unreachable!(),
        }
    }
}

impl Default for Tuner {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_exp_matches_planar_rotation() {
        for &theta in &[0.0, 0.1, 0.7, 2.5f64] {
            let mut s = DMatrix::zeros(2, 2);
            s[(0, 1)] = theta;
            s[(1, 0)] = -theta;
            let e = skew_exp(&s);
            assert!((e[(0, 0)] - theta.cos()).abs() < 1e-14);
            assert!((e[(0, 1)] - theta.sin()).abs() < 1e-14);
            assert!((e[(1, 0)] + theta.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn skew_exp_is_orthogonal() {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = crate::seed::rng_from_seed(70);
        for _ in 0..50 {
            let mut s = DMatrix::zeros(4, 4);
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    s[(i, j)] = z;
                    s[(j, i)] = -z;
                }
            }
            let e = skew_exp(&s);
            let defect = (e.transpose() * &e - DMatrix::identity(4, 4)).norm();
            assert!(defect < 1e-13, "defect = {defect}");
        }
    }

    #[test]
    fn birth_death_choice_probabilities() {
        assert_eq!(p_birth(1, 5), 1.0);
        assert_eq!(p_birth(5, 5), 0.0);
        assert_eq!(p_birth(3, 5), 0.5);
        assert_eq!(p_death(1, 5), 0.0);
        assert_eq!(p_death(5, 5), 1.0);
    }
}
