//! Metropolis-Hastings engine targeting the tempered posterior
//! `d rho / d prior proportional to exp(-lambda r_n(B, f))`.
//!
//! The chain state is the factorized parameterization `(V, gamma, M, beta)`.
//! Four move kinds cycle: orthogonal-factor rotations through the matrix
//! exponential of a skew-symmetric Gaussian step (symmetric with respect to
//! Haar measure, so no density on the orthogonal group is ever evaluated),
//! shrink-toward Dirichlet spectrum proposals with an explicit
//! forward/backward ratio, per-coordinate Gaussian coefficient steps
//! rejected outright outside the budget ball, and reversible-jump
//! birth/death moves over the model dimension. Everything runs in log
//! space.
//!
//! Caches (`<X_i, B>` indices, basis columns, empirical risk) are carried by
//! the state and rebuilt only for the parts a move touches; a full
//! recomputation every 1000 steps cross-checks cache drift.

pub mod moves;
pub mod oracle;
pub mod toy;

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::datagen::LabeledDataset;
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::manifold::{assemble_dense, OrthogonalFactor, SpectrumSimplex};
use crate::prior::{log_prior_components, LogPriorComponents, PriorConfig};
use crate::risk::ModelConstants;
use crate::seed::{derive_seed, rng_from_seed, Rng, STREAM_CHAIN_BASE};

pub use moves::{MoveKind, StepSizes};

/// Steps between full cache revalidations.
const REVALIDATE_EVERY: usize = 1000;

/// Negative-control switch: flips the sign of every log acceptance ratio,
/// which breaks detailed balance against the intended target. Used by the
/// validation suites to prove they can detect a wrong sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MhBug {
    #[default]
    Off,
    FlipAcceptSign,
}

/// Composes the log acceptance ratio. Every accept/reject decision in this
/// crate (engine and toy alike) goes through here so the negative control
/// exercises the production path.
#[inline]
pub fn accept_log_ratio(delta_log_target: f64, log_prop_ratio: f64, bug: MhBug) -> f64 {
    let r = delta_log_target + log_prop_ratio;
    match bug {
        MhBug::Off => r,
        MhBug::FlipAcceptSign => -r,
    }
}

/// The tempered posterior over `(B, f)` given a dataset.
pub struct GibbsTarget<'a> {
    data: &'a LabeledDataset,
    constants: &'a ModelConstants,
    prior: &'a PriorConfig,
    dict: Dictionary,
    /// Covariates flattened in nalgebra's column-major layout, one block of
    /// `d*d` per observation.
    xs_flat: Vec<f64>,
}

impl<'a> GibbsTarget<'a> {
    pub fn new(
        data: &'a LabeledDataset,
        constants: &'a ModelConstants,
        prior: &'a PriorConfig,
    ) -> Result<Self> {
        if data.d != prior.d {
            return Err(Error::DimensionMismatch(
                "dataset and prior dimensions differ".into(),
            ));
        }
        if data.len() != constants.n {
            return Err(Error::InvalidConfig(format!(
                "constants were derived for n = {} but dataset has n = {}",
                constants.n,
                data.len()
            )));
        }
        if prior.n != data.len() {
            return Err(Error::InvalidConfig(format!(
                "prior mixture truncation n = {} does not match dataset n = {}",
                prior.n,
                data.len()
            )));
        }
        for (i, x) in data.xs.iter().enumerate() {
            if x.norm() > 1.0 + 1e-12 {
                return Err(Error::InvalidDataset(format!(
                    "||X_{i}||_F exceeds 1; indices could leave [-1, 1]"
                )));
            }
        }
        let dd = data.d * data.d;
        let mut xs_flat = Vec::with_capacity(data.len() * dd);
        for x in &data.xs {
            xs_flat.extend_from_slice(x.as_slice());
        }
        Ok(Self {
            data,
            constants,
            prior,
            dict: Dictionary::trigonometric(),
            xs_flat,
        })
    }

    pub fn data(&self) -> &LabeledDataset {
        self.data
    }

    pub fn prior(&self) -> &PriorConfig {
        self.prior
    }

    pub fn constants(&self) -> &ModelConstants {
        self.constants
    }

    pub fn lambda(&self) -> f64 {
        self.constants.lambda
    }

    pub fn dict(&self) -> &Dictionary {
        &self.dict
    }

    fn n(&self) -> usize {
        self.data.len()
    }

    fn dim(&self) -> usize {
        self.data.d
    }

    /// All indices `<X_i, B>`, clamped into [-1, 1] (unit-norm `B` keeps
    /// them there up to rounding).
    fn indices_for(&self, b: &DMatrix<f64>) -> Vec<f64> {
        let dd = self.dim() * self.dim();
        let b_flat = b.as_slice();
        let mut out = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let row = &self.xs_flat[i * dd..(i + 1) * dd];
            let mut t = 0.0;
            for (a, c) in row.iter().zip(b_flat) {
                t += a * c;
            }
            debug_assert!(t.abs() <= 1.0 + 1e-9, "index {t} left [-1, 1]");
            out.push(t.clamp(-1.0, 1.0));
        }
        out
    }

    /// Basis columns `phi_j` evaluated at the indices, `j = 1..=m`.
    fn phi_columns(&self, indices: &[f64], m: usize) -> Vec<Arc<Vec<f64>>> {
        let n = indices.len();
        let mut cols: Vec<Arc<Vec<f64>>> = Vec::with_capacity(m);
        if m == 0 {
            return cols;
        }
        cols.push(Arc::new(vec![1.0; n]));
        let mut freq = 1usize;
        while cols.len() < m {
            let mut cos_col = Vec::with_capacity(n);
            let mut sin_col = Vec::with_capacity(n);
            let w = std::f64::consts::PI * freq as f64;
            for &t in indices {
                let (s, c) = (w * t).sin_cos();
                cos_col.push(c);
                sin_col.push(s);
            }
            cols.push(Arc::new(cos_col));
            if cols.len() < m {
                cols.push(Arc::new(sin_col));
            }
            freq += 1;
        }
        cols
    }

    /// One extra basis column for a birth move.
    fn phi_column(&self, indices: &[f64], j: usize) -> Arc<Vec<f64>> {
        Arc::new(
            indices
                .iter()
                .map(|&t| self.dict.eval_basis_unchecked(j, t))
                .collect(),
        )
    }

    fn risk_of(&self, phi: &[Arc<Vec<f64>>], beta: &[f64]) -> f64 {
        let ys = &self.data.ys;
        let mut acc = 0.0;
        for i in 0..ys.len() {
            let mut yhat = 0.0;
            for (col, &b) in phi.iter().zip(beta) {
                yhat += b * col[i];
            }
            let r = ys[i] - yhat;
            acc += r * r;
        }
        acc / ys.len() as f64
    }
}

/// Current chain position with its caches.
#[derive(Debug, Clone)]
pub struct ChainState {
    v: OrthogonalFactor,
    gamma: SpectrumSimplex,
    beta: Vec<f64>,
    b: DMatrix<f64>,
    indices: Arc<Vec<f64>>,
    phi: Vec<Arc<Vec<f64>>>,
    emp_risk: f64,
    log_prior: LogPriorComponents,
}

impl ChainState {
    /// Builds a state from parameters, computing every cache.
    pub fn build(
        target: &GibbsTarget,
        v: OrthogonalFactor,
        gamma: SpectrumSimplex,
        beta: Vec<f64>,
    ) -> Self {
        let b = assemble_dense(v.matrix(), gamma.weights());
        let indices = Arc::new(target.indices_for(&b));
        let phi = target.phi_columns(&indices, beta.len());
        let emp_risk = target.risk_of(&phi, &beta);
        let log_prior = log_prior_components(gamma.weights(), &beta, target.prior);
        Self {
            v,
            gamma,
            beta,
            b,
            indices,
            phi,
            emp_risk,
            log_prior,
        }
    }

    /// Draws an initial state from the prior.
    pub fn from_prior(target: &GibbsTarget, rng: &mut Rng) -> Result<Self> {
        let v = crate::manifold::sample_haar_orthogonal(target.dim(), rng)?;
        let gamma = crate::manifold::sample_dirichlet(&target.prior.alpha, rng)?;
        let m = crate::prior::sample_model_dimension(target.prior, rng);
        let beta =
            crate::prior::sample_coefficients_uniform(m, target.prior.coefficient_budget(), rng);
        Ok(Self::build(target, v, gamma, beta))
    }

    pub fn model_dimension(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &SpectrumSimplex {
        &self.gamma
    }

    pub fn orthogonal_factor(&self) -> &OrthogonalFactor {
        &self.v
    }

    pub fn dense_b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn empirical_risk(&self) -> f64 {
        self.emp_risk
    }

    pub fn log_prior(&self) -> &LogPriorComponents {
        &self.log_prior
    }

    /// `-lambda r_n + log prior`, the log target density up to the
    /// (never computed) normalizer.
    pub fn log_target(&self, lambda: f64) -> f64 {
        -lambda * self.emp_risk + self.log_prior.total()
    }
}

/// Unnormalized log density of the tempered posterior at a state.
pub fn log_gibbs_target(state: &ChainState, target: &GibbsTarget) -> f64 {
    state.log_target(target.lambda())
}

/// Per-move-kind proposal bookkeeping plus cache-health telemetry.
#[derive(Debug, Clone, Default)]
pub struct MoveStats {
    pub proposed: [usize; 5],
    pub accepted: [usize; 5],
    /// Largest deviation seen between cached and recomputed empirical risk.
    pub max_cache_drift: f64,
    /// Largest orthogonality defect seen on the factor cache.
    pub max_ortho_defect: f64,
    pub revalidations: usize,
}

/// Index into the stats arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveSlot {
    Rotation = 0,
    Spectrum = 1,
    Coefficient = 2,
    Birth = 3,
    Death = 4,
}

impl MoveStats {
    pub fn acceptance_rate(&self, slot: MoveSlot) -> f64 {
        let i = slot as usize;
        if self.proposed[i] == 0 {
            return f64::NAN;
        }
        self.accepted[i] as f64 / self.proposed[i] as f64
    }

    fn merge(&mut self, other: &MoveStats) {
        for i in 0..5 {
            self.proposed[i] += other.proposed[i];
            self.accepted[i] += other.accepted[i];
        }
        self.max_cache_drift = self.max_cache_drift.max(other.max_cache_drift);
        self.max_ortho_defect = self.max_ortho_defect.max(other.max_ortho_defect);
        self.revalidations += other.revalidations;
    }
}

/// One retained posterior draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraw {
    pub chain: usize,
    pub iteration: usize,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    /// Dense index matrix, row-major.
    pub b: Vec<f64>,
    pub emp_risk: f64,
}

impl PosteriorDraw {
    pub fn model_dimension(&self) -> usize {
        self.beta.len()
    }

    pub fn dense_b(&self, d: usize) -> DMatrix<f64> {
        DMatrix::from_fn(d, d, |i, j| self.b[i * d + j])
    }

    pub fn link(&self, budget: f64) -> crate::dictionary::LinkFunction {
        crate::dictionary::LinkFunction::new(self.beta.clone(), budget)
            .expect("retained draws lie in the prior support")
    }

    fn from_state(state: &ChainState, chain: usize, iteration: usize, d: usize) -> Self {
        let mut b = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                b.push(state.b[(i, j)]);
            }
        }
        Self {
            chain,
            iteration,
            gamma: state.gamma.weights().to_vec(),
            beta: state.beta.clone(),
            b,
            emp_risk: state.emp_risk,
        }
    }
}

/// Chain execution settings.
#[derive(Debug, Clone)]
pub struct ChainSettings {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Auto-tune step sizes toward 25-40% acceptance during burn-in, then
    /// freeze.
    pub tune: bool,
    pub sizes: StepSizes,
    pub bug: MhBug,
}

impl ChainSettings {
    pub fn new(iterations: usize, burn_in: usize, thin: usize, seed: u64) -> Result<Self> {
        if iterations <= burn_in {
            return Err(Error::InvalidConfig(format!(
                "iterations ({iterations}) must exceed burn-in ({burn_in})"
            )));
        }
        if thin == 0 {
            return Err(Error::InvalidConfig("thinning must be >= 1".into()));
        }
        Ok(Self {
            iterations,
            burn_in,
            thin,
            seed,
            tune: true,
            sizes: StepSizes::default(),
            bug: MhBug::Off,
        })
    }

    pub fn with_bug(mut self, bug: MhBug) -> Self {
        self.bug = bug;
        self
    }
}

/// Output of a single chain.
#[derive(Debug, Clone)]
pub struct ChainRun {
    pub chain: usize,
    pub draws: Vec<PosteriorDraw>,
    pub stats: MoveStats,
    /// Step sizes in force after burn-in.
    pub tuned_sizes: StepSizes,
}

/// One Metropolis-Hastings step of the given kind. Returns whether the
/// proposal was accepted.
pub fn mh_step(
    state: &mut ChainState,
    target: &GibbsTarget,
    kind: MoveKind,
    sizes: &StepSizes,
    bug: MhBug,
    rng: &mut Rng,
    stats: &mut MoveStats,
) -> bool {
    let (slot, proposal) = moves::build_candidate(state, target, kind, sizes, rng);
    stats.proposed[slot as usize] += 1;
    let Some(p) = proposal else {
        // Out-of-support proposal: immediate reject.
        return false;
    };
    let lambda = target.lambda();
    let delta = p.candidate.log_target(lambda) - state.log_target(lambda);
    let log_acc = accept_log_ratio(delta, p.log_prop_ratio, bug);
    let accept = if log_acc >= 0.0 {
        true
    } else {
        let u: f64 = rng.random_range(0.0..1.0);
        u.ln() < log_acc
    };
    if accept {
        *state = p.candidate;
        stats.accepted[slot as usize] += 1;
    }
    accept
}

/// Deterministic move schedule: a dimension attempt every fifth step (when
/// trans-dimensional moves are possible), the remaining steps cycling
/// rotation, spectrum, coefficient. For `d = 1` the orthogonal factor and
/// spectrum are fixed points of their moves, so only coefficient and
/// dimension moves are scheduled.
pub fn move_for_step(step: usize, cycle: &mut usize, d: usize, m_max: usize) -> MoveKind {
    if m_max > 1 && step % 5 == 4 {
        return MoveKind::Dimension;
    }
    if d == 1 {
        return MoveKind::Coefficient;
    }
    let kinds = [
        MoveKind::Rotation,
        MoveKind::Spectrum,
        MoveKind::Coefficient,
    ];
    let k = kinds[*cycle % 3];
    *cycle += 1;
    k
}

/// Runs one chain; deterministic given `settings.seed`.
pub fn run_chain(
    target: &GibbsTarget,
    settings: &ChainSettings,
    chain_id: usize,
) -> Result<ChainRun> {
    if settings.iterations <= settings.burn_in {
        return Err(Error::InvalidConfig(
            "iterations must exceed burn-in".into(),
        ));
    }
    if settings.thin == 0 {
        return Err(Error::InvalidConfig("thinning must be >= 1".into()));
    }
    let mut rng = rng_from_seed(settings.seed);
    let mut state = ChainState::from_prior(target, &mut rng)?;
    let mut stats = MoveStats::default();
    let mut sizes = settings.sizes;
    let mut draws = Vec::with_capacity((settings.iterations - settings.burn_in) / settings.thin);
    let mut cycle = 0usize;
    let mut tuner = moves::Tuner::new();
    let d = target.dim();
    let m_max = target.prior.m_max;

    for step in 0..settings.iterations {
        let kind = move_for_step(step, &mut cycle, d, m_max);
        let slot_counts_before = stats.proposed;
        let accepted = mh_step(
            &mut state,
            target,
            kind,
            &sizes,
            settings.bug,
            &mut rng,
            &mut stats,
        );
        if settings.tune && step < settings.burn_in {
            // Identify which slot this proposal landed in.
            let slot = (0..5)
                .find(|&i| stats.proposed[i] > slot_counts_before[i])
                .expect("every step proposes exactly once");
            tuner.observe(slot, accepted, &mut sizes);
        }
        if (step + 1) % REVALIDATE_EVERY == 0 {
            revalidate(&mut state, target, &mut stats);
        }
        if step >= settings.burn_in && (step - settings.burn_in + 1).is_multiple_of(settings.thin)
        {
            draws.push(PosteriorDraw::from_state(&state, chain_id, step, d));
        }
    }
    Ok(ChainRun {
        chain: chain_id,
        draws,
        stats,
        tuned_sizes: sizes,
    })
}

/// Full cache recomputation; records drift and refreshes the caches.
fn revalidate(state: &mut ChainState, target: &GibbsTarget, stats: &mut MoveStats) {
    let rebuilt = ChainState::build(
        target,
        state.v.clone(),
        state.gamma.clone(),
        state.beta.clone(),
    );
    let drift = (rebuilt.emp_risk - state.emp_risk).abs();
    stats.max_cache_drift = stats.max_cache_drift.max(drift);
    stats.max_ortho_defect = stats.max_ortho_defect.max(state.v.orthogonality_defect());
    stats.revalidations += 1;
    *state = rebuilt;
}

/// Multi-chain run with cross-chain diagnostics.
#[derive(Debug, Clone)]
pub struct MultiChainRun {
    pub chains: Vec<ChainRun>,
    /// Split potential scale reduction on the empirical-risk trace
    /// (warn-only; 1.1 is the conventional threshold).
    pub rhat_emp_risk: f64,
}

impl MultiChainRun {
    /// Draws from all chains, chain-major order.
    pub fn merged_draws(&self) -> Vec<&PosteriorDraw> {
        self.chains.iter().flat_map(|c| c.draws.iter()).collect()
    }

    pub fn stats(&self) -> MoveStats {
        let mut acc = MoveStats::default();
        for c in &self.chains {
            acc.merge(&c.stats);
        }
        acc
    }
}

/// Runs `n_chains` chains with seeds derived from `settings.seed` by the
/// documented splitting rule (`STREAM_CHAIN_BASE + chain index`), fanning
/// out over `workers` threads. Results are identical for any worker count.
pub fn run_chains(
    target: &GibbsTarget,
    settings: &ChainSettings,
    n_chains: usize,
    workers: usize,
) -> Result<MultiChainRun> {
    if n_chains == 0 {
        return Err(Error::InvalidConfig("need at least one chain".into()));
    }
    let runs: Vec<Result<ChainRun>> = crate::parallel::map_indexed(n_chains, workers, |k| {
        let mut s = settings.clone();
        s.seed = derive_seed(settings.seed, STREAM_CHAIN_BASE + k as u64);
        run_chain(target, &s, k)
    });
    let mut chains = Vec::with_capacity(n_chains);
    for r in runs {
        chains.push(r?);
    }
    let traces: Vec<Vec<f64>> = chains
        .iter()
        .map(|c| c.draws.iter().map(|d| d.emp_risk).collect())
        .collect();
    let rhat_emp_risk = crate::diagnostics::potential_scale_reduction(&traces);
    Ok(MultiChainRun {
        chains,
        rhat_emp_risk,
    })
}

/// The estimator: one uniformly selected posterior draw. The selection uses
/// only the generator, never the draw contents.
pub fn draw_estimator<'d>(draws: &'d [PosteriorDraw], rng: &mut Rng) -> Result<&'d PosteriorDraw> {
    if draws.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot select an estimator from zero draws".into(),
        ));
    }
    let k = rng.random_range(0..draws.len());
    Ok(&draws[k])
}

// ---------------------------------------------------------------------------
// Draw dump format: `# sixm-draws v1` schema line, `# d=..` and `# seed=..`
// headers, a column-name row, then one record per draw. The coefficient
// vector has variable length and sits last; its length is the `m` field.
// ---------------------------------------------------------------------------

const DRAWS_SCHEMA: &str = "sixm-draws v1";

pub fn draws_to_csv(draws: &[PosteriorDraw], d: usize, seed: u64) -> String {
    use crate::datagen::fmt_f64;
    let mut out = String::new();
    let _ = writeln!(out, "# {DRAWS_SCHEMA}");
    let _ = writeln!(out, "# d={d}");
    let _ = writeln!(out, "# seed={seed}");
    let mut header: Vec<String> = vec![
        "seed".into(),
        "chain".into(),
        "iteration".into(),
        "m".into(),
        "r_n".into(),
    ];
    for i in 1..=d {
        header.push(format!("gamma_{i}"));
    }
    for i in 1..=d {
        for j in 1..=d {
            header.push(format!("b_{i}_{j}"));
        }
    }
    header.push("beta_1..beta_m".into());
    let _ = writeln!(out, "{}", header.join(","));
    for dr in draws {
        let mut row: Vec<String> = vec![
            seed.to_string(),
            dr.chain.to_string(),
            dr.iteration.to_string(),
            dr.model_dimension().to_string(),
            fmt_f64(dr.emp_risk),
        ];
        row.extend(dr.gamma.iter().map(|&g| fmt_f64(g)));
        row.extend(dr.b.iter().map(|&b| fmt_f64(b)));
        row.extend(dr.beta.iter().map(|&b| fmt_f64(b)));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn parse_draws_csv(text: &str) -> Result<(Vec<PosteriorDraw>, usize, u64)> {
    let mut lines = text.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty draws file".into()))?;
    if first.trim() != format!("# {DRAWS_SCHEMA}") {
        return Err(Error::Parse(format!("unsupported draws schema `{first}`")));
    }
    let mut d = None;
    let mut seed = None;
    let mut header_seen = false;
    let mut draws = Vec::new();
    for line in lines {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("d=") {
                d = Some(
                    v.parse::<usize>()
                        .map_err(|_| Error::Parse("bad d header".into()))?,
                );
            } else if let Some(v) = rest.strip_prefix("seed=") {
                seed = Some(
                    v.parse::<u64>()
                        .map_err(|_| Error::Parse("bad seed header".into()))?,
                );
            }
            continue;
        }
        if !header_seen {
            header_seen = true;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let d = d.ok_or_else(|| Error::Parse("draws file missing d header".into()))?;
        let fields: Vec<&str> = line.split(',').collect();
        let fixed = 5 + d + d * d;
        if fields.len() < fixed {
            return Err(Error::Parse("draws row too short".into()));
        }
        let row_seed: u64 = fields[0]
            .parse()
            .map_err(|_| Error::Parse("bad seed".into()))?;
        if seed.is_some_and(|s| s != row_seed) {
            return Err(Error::Parse("draws row seed differs from header".into()));
        }
        let chain: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse("bad chain".into()))?;
        let iteration: usize = fields[2]
            .parse()
            .map_err(|_| Error::Parse("bad iteration".into()))?;
        let m: usize = fields[3]
            .parse()
            .map_err(|_| Error::Parse("bad m".into()))?;
        if fields.len() != fixed + m {
            return Err(Error::Parse(format!(
                "draws row has {} fields, expected {}",
                fields.len(),
                fixed + m
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad float `{s}`")))
        };
        let emp_risk = num(fields[4])?;
        let gamma = fields[5..5 + d]
            .iter()
            .map(|s| num(s))
            .collect::<Result<Vec<_>>>()?;
        let b = fields[5 + d..fixed]
            .iter()
            .map(|s| num(s))
            .collect::<Result<Vec<_>>>()?;
        let beta = fields[fixed..]
            .iter()
            .map(|s| num(s))
            .collect::<Result<Vec<_>>>()?;
        draws.push(PosteriorDraw {
            chain,
            iteration,
            gamma,
            beta,
            b,
            emp_risk,
        });
    }
    let d = d.ok_or_else(|| Error::Parse("draws file missing d header".into()))?;
    let seed = seed.ok_or_else(|| Error::Parse("draws file missing seed header".into()))?;
    Ok((draws, d, seed))
}
