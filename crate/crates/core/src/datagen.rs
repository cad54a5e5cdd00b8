//! Synthetic data generation with boundedness guarantees.
//!
//! Covariates are symmetrized Gaussian matrices rescaled so that
//! `||X||_F = u^{1/2}` with `u` uniform on (0, 1]; this keeps every index
//! `<X, B>` inside [-1, 1] for unit-Frobenius `B` and gives the index an
//! absolutely continuous law with bounded density. Responses follow
//! `Y = f*(<X, B*>) + eps` with sub-exponential noise.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::dictionary::{Dictionary, LinkFunction};
use crate::error::{Error, Result};
use crate::manifold::{
    assemble_index_matrix, frobenius_inner, sample_haar_orthogonal, IndexMatrix, SpectrumSimplex,
};
use crate::seed::{rng_substream, Rng, STREAM_DESIGN, STREAM_NOISE};

/// Noise families satisfying the sub-exponential moment condition
/// `E[|eps|^k | X] <= (k!/2) sigma^2 L^{k-2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Gaussian,
    BoundedUniform,
}

impl NoiseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::BoundedUniform => "bounded-uniform",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(NoiseKind::Gaussian),
            "bounded-uniform" => Ok(NoiseKind::BoundedUniform),
            other => Err(Error::Parse(format!("unknown noise kind `{other}`"))),
        }
    }
}

/// Noise specification: kind plus standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub sigma: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, sigma: f64) -> Result<Self> {
        if sigma < 0.0 || !sigma.is_finite() {
            return Err(Error::InvalidParameter(
                "noise standard deviation must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { kind, sigma })
    }

    /// Constants `(sigma, L)` certifying the moment condition: for Gaussian
    /// noise `L = sigma` suffices; for uniform noise on `[-a, a]` with
    /// `a = sigma * sqrt(3)`, `L = a`.
    pub fn assumption_constants(&self) -> (f64, f64) {
        match self.kind {
            NoiseKind::Gaussian => (self.sigma, self.sigma),
            NoiseKind::BoundedUniform => (self.sigma, self.sigma * 3f64.sqrt()),
        }
    }
}

/// How the true link function is built.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkSpec {
    /// Explicit dictionary coefficients (must satisfy the weighted-l1 bound
    /// with budget `C`).
    Coefficients(Vec<f64>),
    /// Constant link `f* = value`.
    Constant(f64),
    /// Smooth polynomial-decay coefficients `beta_j ~ j^{-(2k+1)/2}`
    /// truncated at `m`, rescaled into the Sobolev ellipsoid of regularity
    /// `k` and the weighted-l1 `C`-ball.
    SobolevDecay { k: u32, m: usize },
    /// Bounded non-dictionary link `C * tanh(gain * t)`.
    Tanh { gain: f64 },
}

/// The true link: either a dictionary expansion or a closed-form bounded
/// function.
#[derive(Debug, Clone, PartialEq)]
pub enum TruthLink {
    Dictionary(LinkFunction),
    Tanh { scale: f64, gain: f64 },
}

impl TruthLink {
    /// Evaluation on [-1, 1].
    pub fn eval(&self, dict: &Dictionary, t: f64) -> f64 {
        match self {
            TruthLink::Dictionary(f) => f.eval_unchecked(dict, t),
            TruthLink::Tanh { scale, gain } => scale * (gain * t).tanh(),
        }
    }

    pub fn dictionary(&self) -> Option<&LinkFunction> {
        match self {
            TruthLink::Dictionary(f) => Some(f),
            _ => None,
        }
    }
}

/// Ground truth: index matrix, link, and their certified bounds.
#[derive(Debug, Clone)]
pub struct TruthSpec {
    pub b_star: IndexMatrix,
    pub link: TruthLink,
    /// Sup-norm bound with `||f*||_inf <= c`.
    pub c: f64,
    pub rank: usize,
    /// Regularity tag when the truth was built inside a Sobolev ellipsoid.
    pub sobolev_k: Option<u32>,
}

impl TruthSpec {
    pub fn dim(&self) -> usize {
        self.b_star.dim()
    }
}

/// Builds a rank-`r_star` truth with equal nonzero spectrum and a link from
/// `spec`, checking all bounds.
pub fn make_truth(
    d: usize,
    r_star: usize,
    spec: &LinkSpec,
    c: f64,
    rng: &mut Rng,
) -> Result<TruthSpec> {
    if r_star == 0 || r_star > d {
        return Err(Error::InvalidParameter(format!(
            "rank must satisfy 1 <= r <= d, got r = {r_star}, d = {d}"
        )));
    }
    if c < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "link bound C must be at least 1, got {c}"
        )));
    }
    let v = sample_haar_orthogonal(d, rng)?;
    let mut gamma = vec![0.0; d];
    for g in gamma.iter_mut().take(r_star) {
        *g = 1.0 / r_star as f64;
    }
    let b_star = assemble_index_matrix(v, SpectrumSimplex::new(gamma)?)?;

    let (link, sobolev_k) = match spec {
        LinkSpec::Coefficients(beta) => {
            let f = LinkFunction::new(beta.clone(), c)?;
            (TruthLink::Dictionary(f), None)
        }
        LinkSpec::Constant(value) => {
            if value.abs() > c {
                return Err(Error::InvalidParameter(format!(
                    "constant link {value} exceeds bound {c}"
                )));
            }
            (
                TruthLink::Dictionary(LinkFunction::new(vec![*value], c)?),
                None,
            )
        }
        LinkSpec::SobolevDecay { k, m } => {
            if *k < 2 {
                return Err(Error::InvalidParameter(
                    "Sobolev regularity must be at least 2".into(),
                ));
            }
            if *m == 0 {
                return Err(Error::InvalidParameter(
                    "Sobolev truncation must be at least 1".into(),
                ));
            }
            let radius = 6.0 * c * c / std::f64::consts::PI.powi(2);
            let unit: Vec<f64> = (1..=*m)
                .map(|j| (j as f64).powf(-(2.0 * *k as f64 + 1.0) / 2.0))
                .collect();
            let quad = crate::dictionary::sobolev_quadratic(&unit, *k);
            let wl1 = crate::dictionary::weighted_l1(&unit);
            let scale = (radius / quad).sqrt().min(c / wl1) * (1.0 - 1e-12);
            let beta: Vec<f64> = unit.iter().map(|u| scale * u).collect();
            let f = LinkFunction::new(beta, c)?;
            debug_assert!(f.in_sobolev_ellipsoid(*k, radius));
            (TruthLink::Dictionary(f), Some(*k))
        }
        LinkSpec::Tanh { gain } => (
            TruthLink::Tanh {
                scale: c,
                gain: *gain,
            },
            None,
        ),
    };

    let truth = TruthSpec {
        b_star,
        link,
        c,
        rank: r_star,
        sobolev_k,
    };
    check_link_bound(&truth)?;
    Ok(truth)
}

/// Grid check `sup |f*| <= C` over 10^4 points.
fn check_link_bound(truth: &TruthSpec) -> Result<()> {
    let dict = Dictionary::trigonometric();
    let grid = 10_000;
    for g in 0..=grid {
        let t = -1.0 + 2.0 * g as f64 / grid as f64;
        let v = truth.link.eval(&dict, t);
        if v.abs() > truth.c + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "link exceeds bound: |f*({t})| = {} > {}",
                v.abs(),
                truth.c
            )));
        }
    }
    Ok(())
}

/// One design matrix: symmetrize a Gaussian matrix, then rescale to
/// Frobenius norm `u^{1/2}` with `u` uniform on (0, 1].
pub fn sample_design_matrix(d: usize, rng: &mut Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let mut w = (&g + g.transpose()) * 0.5;
    let norm = w.norm();
    let u: f64 = 1.0 - rng.random_range(0.0..1.0);
    let target = u.sqrt();
    if norm > 0.0 {
        w *= target / norm;
    }
    // Guard against rounding pushing the norm a hair above 1.
    let realized = w.norm();
    if realized > 1.0 {
        w /= realized;
    }
    w
}

/// `n` independent design matrices.
pub fn sample_design(d: usize, n: usize, rng: &mut Rng) -> Vec<DMatrix<f64>> {
    (0..n).map(|_| sample_design_matrix(d, rng)).collect()
}

/// Mean-zero noise draws.
pub fn sample_noise(spec: &NoiseSpec, n: usize, rng: &mut Rng) -> Vec<f64> {
    match spec.kind {
        NoiseKind::Gaussian => (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                spec.sigma * z
            })
            .collect(),
        NoiseKind::BoundedUniform => {
            let a = spec.sigma * 3f64.sqrt();
            if a == 0.0 {
                vec![0.0; n]
            } else {
                (0..n).map(|_| rng.random_range(-a..a)).collect()
            }
        }
    }
}

/// Labeled observations with the boundedness guarantees certified at
/// construction.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub d: usize,
    pub xs: Vec<DMatrix<f64>>,
    pub ys: Vec<f64>,
    pub noise: NoiseSpec,
    pub seed: u64,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }
}

/// Generates `Y_i = f*(<X_i, B*>) + eps_i`; deterministic given `seed`.
pub fn generate(
    truth: &TruthSpec,
    n: usize,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<LabeledDataset> {
    if n == 0 {
        return Err(Error::InvalidParameter("dataset needs n >= 1".into()));
    }
    let dict = Dictionary::trigonometric();
    let d = truth.dim();
    let mut design_rng = rng_substream(seed, STREAM_DESIGN);
    let mut noise_rng = rng_substream(seed, STREAM_NOISE);
    let xs = sample_design(d, n, &mut design_rng);
    let eps = sample_noise(noise, n, &mut noise_rng);
    let ys: Vec<f64> = xs
        .iter()
        .zip(&eps)
        .map(|(x, &e)| {
            let t = frobenius_inner(x, truth.b_star.dense()).clamp(-1.0, 1.0);
            truth.link.eval(&dict, t) + e
        })
        .collect();
    let data = LabeledDataset {
        d,
        xs,
        ys,
        noise: *noise,
        seed,
    };
    validate_dataset(&data, truth)?;
    Ok(data)
}

/// Asserts the dataset invariants: `||X_i||_F <= 1`, `|<X_i, B*>| <= 1`,
/// `|f*(<X_i, B*>)| <= C`, finite responses.
pub fn validate_dataset(data: &LabeledDataset, truth: &TruthSpec) -> Result<()> {
    let dict = Dictionary::trigonometric();
    if truth.dim() != data.d {
        return Err(Error::DimensionMismatch(
            "truth and dataset dimensions differ".into(),
        ));
    }
    for (i, x) in data.xs.iter().enumerate() {
        if x.nrows() != data.d || x.ncols() != data.d {
            return Err(Error::InvalidDataset(format!("X_{i} has wrong shape")));
        }
        let norm = x.norm();
        if norm > 1.0 + 1e-12 {
            return Err(Error::InvalidDataset(format!(
                "||X_{i}||_F = {norm} exceeds 1"
            )));
        }
        let t = frobenius_inner(x, truth.b_star.dense());
        if t.abs() > 1.0 + 1e-9 {
            return Err(Error::InvalidDataset(format!(
                "index <X_{i}, B*> = {t} outside [-1, 1]"
            )));
        }
        let f = truth.link.eval(&dict, t.clamp(-1.0, 1.0));
        if f.abs() > truth.c + 1e-9 {
            return Err(Error::InvalidDataset(format!(
                "|f*(<X_{i}, B*>)| = {} exceeds C = {}",
                f.abs(),
                truth.c
            )));
        }
        if !data.ys[i].is_finite() {
            return Err(Error::InvalidDataset(format!("Y_{i} is not finite")));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Dataset file format: `# key=value` header lines followed by one CSV row
// per observation (flattened row-major X, then Y), floats at 17 significant
// digits so round-trips are bit-exact.
// ---------------------------------------------------------------------------

const DATASET_SCHEMA: &str = "sixm-dataset v1";

/// Uniform float formatting used by every emitted file: 17 significant
/// digits, enough to reproduce any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes a dataset with its truth description.
pub fn dataset_to_string(data: &LabeledDataset, truth: &TruthSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {DATASET_SCHEMA}");
    let _ = writeln!(out, "# d={}", data.d);
    let _ = writeln!(out, "# n={}", data.len());
    let _ = writeln!(out, "# noise={}", data.noise.kind.as_str());
    let _ = writeln!(out, "# sigma={}", fmt_f64(data.noise.sigma));
    let _ = writeln!(out, "# big_l={}", fmt_f64(data.noise.assumption_constants().1));
    let _ = writeln!(out, "# seed={}", data.seed);
    let _ = writeln!(out, "# truth_rank={}", truth.rank);
    let _ = writeln!(out, "# truth_c={}", fmt_f64(truth.c));
    if let Some(k) = truth.sobolev_k {
        let _ = writeln!(out, "# truth_sobolev_k={k}");
    }
    match &truth.link {
        TruthLink::Dictionary(f) => {
            let _ = writeln!(out, "# truth_link=coefficients");
            let beta: Vec<String> = f.coefficients().iter().map(|&b| fmt_f64(b)).collect();
            let _ = writeln!(out, "# truth_beta={}", beta.join(","));
            let _ = writeln!(out, "# truth_budget={}", fmt_f64(f.budget()));
        }
        TruthLink::Tanh { scale, gain } => {
            let _ = writeln!(out, "# truth_link=tanh");
            let _ = writeln!(out, "# truth_scale={}", fmt_f64(*scale));
            let _ = writeln!(out, "# truth_gain={}", fmt_f64(*gain));
        }
    }
    let b: Vec<String> = row_major(truth.b_star.dense())
        .iter()
        .map(|&v| fmt_f64(v))
        .collect();
    let _ = writeln!(out, "# b_star={}", b.join(","));

    let d = data.d;
    let mut header: Vec<String> = Vec::with_capacity(d * d + 1);
    for i in 1..=d {
        for j in 1..=d {
            header.push(format!("x_{i}_{j}"));
        }
    }
    header.push("y".into());
    let _ = writeln!(out, "{}", header.join(","));
    for (x, &y) in data.xs.iter().zip(&data.ys) {
        let mut row: Vec<String> = row_major(x).iter().map(|&v| fmt_f64(v)).collect();
        row.push(fmt_f64(y));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn write_dataset(path: &Path, data: &LabeledDataset, truth: &TruthSpec) -> Result<()> {
    std::fs::write(path, dataset_to_string(data, truth))?;
    Ok(())
}

/// Parses a dataset file back into the dataset and its truth.
pub fn parse_dataset(text: &str) -> Result<(LabeledDataset, TruthSpec)> {
    let mut lines = text.lines().peekable();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty dataset file".into()))?;
    if first.trim() != format!("# {DATASET_SCHEMA}") {
        return Err(Error::Parse(format!(
            "unsupported dataset schema line `{first}`"
        )));
    }
    let mut meta = std::collections::BTreeMap::new();
    while let Some(line) = lines.peek() {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some((k, v)) = rest.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            lines.next();
        } else {
            break;
        }
    }
    let get = |k: &str| -> Result<&String> {
        meta.get(k)
            .ok_or_else(|| Error::Parse(format!("dataset header missing `{k}`")))
    };
    let d: usize = parse_num(get("d")?)?;
    let n: usize = parse_num(get("n")?)?;
    let noise = NoiseSpec::new(NoiseKind::parse(get("noise")?)?, parse_num(get("sigma")?)?)?;
    let seed: u64 = parse_num(get("seed")?)?;
    let rank: usize = parse_num(get("truth_rank")?)?;
    let c: f64 = parse_num(get("truth_c")?)?;
    let sobolev_k: Option<u32> = match meta.get("truth_sobolev_k") {
        Some(v) => Some(parse_num(v)?),
        None => None,
    };
    let link = match get("truth_link")?.as_str() {
        "coefficients" => {
            let beta = parse_f64_list(get("truth_beta")?)?;
            let budget: f64 = parse_num(get("truth_budget")?)?;
            TruthLink::Dictionary(LinkFunction::new(beta, budget)?)
        }
        "tanh" => TruthLink::Tanh {
            scale: parse_num(get("truth_scale")?)?,
            gain: parse_num(get("truth_gain")?)?,
        },
        other => return Err(Error::Parse(format!("unknown truth link `{other}`"))),
    };
    let b_flat = parse_f64_list(get("b_star")?)?;
    if b_flat.len() != d * d {
        return Err(Error::Parse("b_star has wrong length".into()));
    }
    let b_star = IndexMatrix::from_dense(DMatrix::from_fn(d, d, |i, j| b_flat[i * d + j]))?;
    let truth = TruthSpec {
        b_star,
        link,
        c,
        rank,
        sobolev_k,
    };

    // Column header row.
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("dataset missing column header".into()))?;
    let expected_cols = d * d + 1;
    if header.split(',').count() != expected_cols {
        return Err(Error::Parse("dataset column header mismatch".into()));
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for (li, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals = parse_f64_list(line)?;
        if vals.len() != expected_cols {
            return Err(Error::Parse(format!(
                "dataset row {li} has {} fields, expected {expected_cols}",
                vals.len()
            )));
        }
        xs.push(DMatrix::from_fn(d, d, |i, j| vals[i * d + j]));
        ys.push(vals[d * d]);
    }
    if xs.len() != n {
        return Err(Error::Parse(format!(
            "dataset declares n = {n} but has {} rows",
            xs.len()
        )));
    }
    let data = LabeledDataset {
        d,
        xs,
        ys,
        noise,
        seed,
    };
    validate_dataset(&data, &truth)?;
    Ok((data, truth))
}

pub fn read_dataset(path: &Path) -> Result<(LabeledDataset, TruthSpec)> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset(&text)
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("cannot parse `{s}`")))
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_num::<f64>).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::empirical_risk;
    use crate::seed::rng_from_seed;

    #[test]
    fn truth_rank_one_outer_product() {
        let mut rng = rng_from_seed(40);
        let t = make_truth(3, 1, &LinkSpec::Constant(0.5), 1.0, &mut rng).unwrap();
        assert!((t.b_star.frobenius_norm() - 1.0).abs() < 1e-9);
        let eig = nalgebra::SymmetricEigen::new(t.b_star.dense().clone());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((vals[0] - 1.0).abs() < 1e-9);
        assert!(vals[1].abs() < 1e-9);
    }

    #[test]
    fn truth_full_rank_equal_spectrum() {
        let mut rng = rng_from_seed(41);
        let t = make_truth(4, 4, &LinkSpec::Constant(0.0), 1.0, &mut rng).unwrap();
        let eig = nalgebra::SymmetricEigen::new(t.b_star.dense().clone());
        for v in eig.eigenvalues.iter() {
            assert!((v - 0.5).abs() < 1e-9, "expected eigenvalues 1/2, got {v}");
        }
    }

    #[test]
    fn truth_sobolev_inside_ellipsoid_and_ball() {
        let mut rng = rng_from_seed(42);
        let c = 1.0;
        let t = make_truth(3, 1, &LinkSpec::SobolevDecay { k: 2, m: 16 }, c, &mut rng).unwrap();
        let f = t.link.dictionary().unwrap();
        let radius = 6.0 * c * c / std::f64::consts::PI.powi(2);
        assert!(f.in_sobolev_ellipsoid(2, radius));
        assert!(f.weighted_l1_norm() <= c);
        assert_eq!(t.sobolev_k, Some(2));
    }

    #[test]
    fn truth_rejects_bad_specs() {
        let mut rng = rng_from_seed(43);
        assert!(make_truth(3, 0, &LinkSpec::Constant(0.0), 1.0, &mut rng).is_err());
        assert!(make_truth(3, 4, &LinkSpec::Constant(0.0), 1.0, &mut rng).is_err());
        assert!(make_truth(3, 1, &LinkSpec::Constant(1.5), 1.0, &mut rng).is_err());
        assert!(make_truth(3, 1, &LinkSpec::SobolevDecay { k: 1, m: 8 }, 1.0, &mut rng).is_err());
    }

    #[test]
    fn design_matrices_bounded_and_symmetric() {
        let mut rng = rng_from_seed(44);
        for _ in 0..1000 {
            let x = sample_design_matrix(3, &mut rng);
            assert!(x.norm() <= 1.0 + 1e-12);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((x[(i, j)] - x[(j, i)]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn index_law_has_bounded_density_no_edge_atoms() {
        let mut rng = rng_from_seed(45);
        let truth = make_truth(3, 1, &LinkSpec::Constant(0.0), 1.0, &mut rng).unwrap();
        let n = 100_000;
        let bins = 50;
        let mut hist = vec![0usize; bins];
        for _ in 0..n {
            let x = sample_design_matrix(3, &mut rng);
            let t = frobenius_inner(&x, truth.b_star.dense());
            assert!(t.abs() <= 1.0);
            let k = (((t + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1);
            hist[k] += 1;
        }
        let width = 2.0 / bins as f64;
        for &count in &hist {
            let density = count as f64 / n as f64 / width;
            assert!(density < 2.0, "density estimate {density} too large");
        }
        // No atoms at the edges.
        let edge_mass = (hist[0] + hist[bins - 1]) as f64 / n as f64;
        assert!(edge_mass < 0.01, "edge mass {edge_mass}");
    }

    #[test]
    fn noise_moment_conditions() {
        let mut rng = rng_from_seed(46);
        let n = 1_000_000;
        // sigma = 0 gives exact zeros.
        let zero = NoiseSpec::new(NoiseKind::Gaussian, 0.0).unwrap();
        assert!(sample_noise(&zero, 100, &mut rng).iter().all(|&e| e == 0.0));

        for kind in [NoiseKind::Gaussian, NoiseKind::BoundedUniform] {
            let spec = NoiseSpec::new(kind, 1.0).unwrap();
            let eps = sample_noise(&spec, n, &mut rng);
            if kind == NoiseKind::BoundedUniform {
                let a = 3f64.sqrt();
                assert!(eps.iter().all(|&e| e.abs() <= a));
            }
            let m2 = eps.iter().map(|e| e * e).sum::<f64>() / n as f64;
            assert!((m2 - 1.0).abs() < 0.005, "E[eps^2] = {m2}");
            // Sub-exponential moment condition for k = 2, 3, 4.
            let (sigma, big_l) = spec.assumption_constants();
            for k in 2..=4usize {
                let mk = eps.iter().map(|e| e.abs().powi(k as i32)).sum::<f64>() / n as f64;
                let bound = (1..=k).product::<usize>() as f64 / 2.0
                    * sigma
                    * sigma
                    * big_l.powi(k as i32 - 2);
                assert!(
                    mk <= bound * 1.1,
                    "{:?} k = {k}: moment {mk} vs bound {bound}",
                    kind
                );
            }
        }
    }

    #[test]
    fn generate_noiseless_interpolates() {
        let mut rng = rng_from_seed(47);
        let truth = make_truth(2, 1, &LinkSpec::Constant(0.7), 1.0, &mut rng).unwrap();
        let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.0).unwrap();
        let data = generate(&truth, 50, &noise, 99).unwrap();
        assert!(data.ys.iter().all(|&y| y == 0.7));
        let dict = Dictionary::trigonometric();
        let f = truth.link.dictionary().unwrap();
        let r = empirical_risk(&data, &truth.b_star, f, &dict).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn generate_noise_variance_matches() {
        let mut rng = rng_from_seed(48);
        let truth = make_truth(2, 1, &LinkSpec::Constant(0.5), 1.0, &mut rng).unwrap();
        let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.3).unwrap();
        let data = generate(&truth, 10_000, &noise, 7).unwrap();
        let dict = Dictionary::trigonometric();
        let f = truth.link.dictionary().unwrap();
        let r = empirical_risk(&data, &truth.b_star, f, &dict).unwrap();
        assert!((r - 0.09).abs() < 0.01, "empirical risk {r}");
    }

    #[test]
    fn empirical_risk_at_truth_recovers_injected_noise() {
        // Residuals at the truth are the injected noise, so the empirical
        // risk equals the mean squared noise up to one rounding step per
        // observation.
        let mut rng = rng_from_seed(51);
        let truth = make_truth(3, 2, &LinkSpec::SobolevDecay { k: 2, m: 8 }, 1.0, &mut rng)
            .unwrap();
        let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.4).unwrap();
        let seed = 17u64;
        let data = generate(&truth, 500, &noise, seed).unwrap();
        let eps = sample_noise(
            &noise,
            500,
            &mut crate::seed::rng_substream(seed, crate::seed::STREAM_NOISE),
        );
        let mean_sq_noise = eps.iter().map(|e| e * e).sum::<f64>() / eps.len() as f64;
        let dict = Dictionary::trigonometric();
        let f = truth.link.dictionary().unwrap();
        let r = empirical_risk(&data, &truth.b_star, f, &dict).unwrap();
        assert!((r - mean_sq_noise).abs() < 1e-14, "{r} vs {mean_sq_noise}");
    }

    #[test]
    fn generate_is_deterministic() {
        let mut rng = rng_from_seed(49);
        let truth = make_truth(2, 1, &LinkSpec::Constant(0.2), 1.0, &mut rng).unwrap();
        let noise = NoiseSpec::new(NoiseKind::BoundedUniform, 0.5).unwrap();
        let a = generate(&truth, 200, &noise, 123).unwrap();
        let b = generate(&truth, 200, &noise, 123).unwrap();
        for (x, y) in a.ys.iter().zip(&b.ys) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for (xa, xb) in a.xs.iter().zip(&b.xs) {
            assert_eq!(xa, xb);
        }
    }

    #[test]
    fn corrupt_dataset_files_are_rejected() {
        assert!(parse_dataset("").is_err());
        assert!(parse_dataset("# some-other-format v2\n").is_err());
        // Header present but row count disagrees with n.
        let mut rng = rng_from_seed(52);
        let truth = make_truth(1, 1, &LinkSpec::Constant(0.5), 1.0, &mut rng).unwrap();
        let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.1).unwrap();
        let data = generate(&truth, 5, &noise, 1).unwrap();
        let text = dataset_to_string(&data, &truth);
        let truncated: String = text.lines().take(text.lines().count() - 2).fold(
            String::new(),
            |mut acc, l| {
                acc.push_str(l);
                acc.push('\n');
                acc
            },
        );
        assert!(parse_dataset(&truncated).is_err());
    }

    #[test]
    fn dataset_file_roundtrip_bit_exact() {
        let mut rng = rng_from_seed(50);
        let truth = make_truth(2, 1, &LinkSpec::SobolevDecay { k: 2, m: 4 }, 1.0, &mut rng)
            .unwrap();
        let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.25).unwrap();
        let data = generate(&truth, 30, &noise, 5).unwrap();
        let text = dataset_to_string(&data, &truth);
        let (data2, truth2) = parse_dataset(&text).unwrap();
        let text2 = dataset_to_string(&data2, &truth2);
        assert_eq!(text, text2, "round-trip changed bytes");
        for (a, b) in data.ys.iter().zip(&data2.ys) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
