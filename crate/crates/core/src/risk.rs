//! Empirical risk, Monte-Carlo excess risk, and the inverse temperature
//! schedule.
//!
//! The excess risk of a pair `(B, f)` against the truth equals the mean
//! squared link discrepancy `E[(f(<X,B>) - f*(<X,B*>))^2]` (the cross term
//! vanishes because the noise is centered given `X`). It has no closed form
//! for general links, so it is always estimated by Monte Carlo with a
//! reported standard error; tolerances downstream are stderr-scaled.

use nalgebra::DMatrix;

use crate::datagen::{sample_design_matrix, sample_noise, LabeledDataset, TruthSpec};
use crate::dictionary::{Dictionary, LinkFunction};
use crate::error::{Error, Result};
use crate::manifold::{frobenius_inner, IndexMatrix};
use crate::seed::Rng;

/// Slack tolerated when clamping indices into [-1, 1]; anything further out
/// indicates a dataset violating the boundedness assumption.
pub const INDEX_TOL: f64 = 1e-9;

/// Derived constants of the estimation problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConstants {
    /// Link sup-norm bound, at least 1.
    pub c: f64,
    /// Sub-exponential scale constant of the noise.
    pub big_l: f64,
    /// Noise standard-deviation constant.
    pub sigma: f64,
    /// Dictionary derivative constant.
    pub c_phi: f64,
    /// Sample size.
    pub n: usize,
    /// `w = 64 (C+1) max[L, C+1]`.
    pub w: f64,
    /// `C_1 = 8 [(C+1)^2 + sigma^2]`.
    pub c1: f64,
    /// Inverse temperature `lambda = n / (w + 2 C_1)`.
    pub lambda: f64,
}

/// Computes the temperature schedule from the problem constants.
pub fn lambda_schedule(c: f64, big_l: f64, sigma: f64, n: usize) -> Result<ModelConstants> {
    if c < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "link bound C must be at least 1, got {c}"
        )));
    }
    if !big_l.is_finite() || big_l <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise scale L must be positive, got {big_l}"
        )));
    }
    if sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise level sigma must be nonnegative, got {sigma}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be >= 1".into()));
    }
    let cp1 = c + 1.0;
    let w = 64.0 * cp1 * big_l.max(cp1);
    let c1 = 8.0 * (cp1 * cp1 + sigma * sigma);
    let lambda = n as f64 / (w + 2.0 * c1);
    let constants = ModelConstants {
        c,
        big_l,
        sigma,
        c_phi: Dictionary::trigonometric().c_phi(),
        n,
        w,
        c1,
        lambda,
    };
    debug_assert!(constants.lambda < n as f64 / (w + c1));
    Ok(constants)
}

/// Clamps an index value into [-1, 1], failing when it lies further than
/// `INDEX_TOL` outside.
pub fn clamp_index(t: f64) -> Result<f64> {
    if t.abs() <= 1.0 {
        Ok(t)
    } else if t.abs() <= 1.0 + INDEX_TOL {
        Ok(t.clamp(-1.0, 1.0))
    } else {
        Err(Error::Domain(format!("index value {t} outside [-1, 1]")))
    }
}

/// Mean squared residual `(1/n) sum (Y_i - f(<X_i, B>))^2`.
pub fn empirical_risk(
    data: &LabeledDataset,
    b: &IndexMatrix,
    f: &LinkFunction,
    dict: &Dictionary,
) -> Result<f64> {
    if b.dim() != data.d {
        return Err(Error::DimensionMismatch(
            "index matrix does not match dataset dimension".into(),
        ));
    }
    let mut acc = 0.0;
    for (x, &y) in data.xs.iter().zip(&data.ys) {
        let t = clamp_index(frobenius_inner(x, b.dense()))?;
        let resid = y - f.eval_unchecked(dict, t);
        acc += resid * resid;
    }
    Ok(acc / data.len() as f64)
}

/// Monte-Carlo estimate of the excess risk
/// `E[(f(<X,B>) - f*(<X,B*>))^2]` under a caller-supplied design law.
///
/// Returns `(estimate, stderr)`.
pub fn excess_risk_mc_with<F>(
    b: &IndexMatrix,
    f: &LinkFunction,
    truth: &TruthSpec,
    dict: &Dictionary,
    mut x_sampler: F,
    n_mc: usize,
    rng: &mut Rng,
) -> Result<(f64, f64)>
where
    F: FnMut(&mut Rng) -> DMatrix<f64>,
{
    if n_mc == 0 {
        return Err(Error::InvalidParameter("n_mc must be >= 1".into()));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_mc {
        let x = x_sampler(rng);
        let t = clamp_index(frobenius_inner(&x, b.dense()))?;
        let t_star = clamp_index(frobenius_inner(&x, truth.b_star.dense()))?;
        let diff = f.eval_unchecked(dict, t) - truth.link.eval(dict, t_star);
        let sq = diff * diff;
        sum += sq;
        sum_sq += sq * sq;
    }
    let nf = n_mc as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0);
    Ok((mean, (var / nf).sqrt()))
}

/// Excess risk under the standard design law of [`crate::datagen`].
pub fn excess_risk_mc(
    b: &IndexMatrix,
    f: &LinkFunction,
    truth: &TruthSpec,
    dict: &Dictionary,
    n_mc: usize,
    rng: &mut Rng,
) -> Result<(f64, f64)> {
    let d = truth.dim();
    excess_risk_mc_with(b, f, truth, dict, |r| sample_design_matrix(d, r), n_mc, rng)
}

/// Shared-design excess-risk evaluator: draws the design sample and the
/// truth's link values once, then scores many posterior draws against the
/// same sample. Deterministic for a fixed construction seed and much
/// cheaper when thousands of draws are scored.
pub struct ExcessEvaluator {
    d: usize,
    xs: Vec<DMatrix<f64>>,
    f_star: Vec<f64>,
    dict: Dictionary,
}

impl ExcessEvaluator {
    pub fn new(truth: &TruthSpec, n_mc: usize, rng: &mut Rng) -> Result<Self> {
        let dict = Dictionary::trigonometric();
        let d = truth.dim();
        let xs: Vec<DMatrix<f64>> = (0..n_mc).map(|_| sample_design_matrix(d, rng)).collect();
        let f_star = xs
            .iter()
            .map(|x| {
                let t = clamp_index(frobenius_inner(x, truth.b_star.dense()))?;
                Ok(truth.link.eval(&dict, t))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            d,
            xs,
            f_star,
            dict,
        })
    }

    pub fn sample_size(&self) -> usize {
        self.xs.len()
    }

    /// `(estimate, stderr)` for a dense index matrix and link.
    pub fn excess(&self, b: &DMatrix<f64>, f: &LinkFunction) -> Result<(f64, f64)> {
        if b.nrows() != self.d {
            return Err(Error::DimensionMismatch(
                "index matrix does not match evaluator dimension".into(),
            ));
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for (x, &fs) in self.xs.iter().zip(&self.f_star) {
            let t = clamp_index(frobenius_inner(x, b))?;
            let diff = f.eval_unchecked(&self.dict, t) - fs;
            let sq = diff * diff;
            sum += sq;
            sum_sq += sq * sq;
        }
        let nf = self.xs.len() as f64;
        let mean = sum / nf;
        let var = (sum_sq / nf - mean * mean).max(0.0);
        Ok((mean, (var / nf).sqrt()))
    }
}

/// Self-consistency check of the risk decomposition: with shared draws of
/// `(X, eps)`, returns `(|MC[(Y-f)^2 - (Y-f*)^2] - MC[(f-f*)^2]|, stderr)`.
/// The integrand reduces to `2 eps (f* - f)`, so the discrepancy is centered
/// and vanishes identically for zero noise.
pub fn pythagoras_check(
    b: &IndexMatrix,
    f: &LinkFunction,
    truth: &TruthSpec,
    noise: &crate::datagen::NoiseSpec,
    n_mc: usize,
    rng: &mut Rng,
) -> Result<(f64, f64)> {
    if n_mc == 0 {
        return Err(Error::InvalidParameter("n_mc must be >= 1".into()));
    }
    let dict = Dictionary::trigonometric();
    let d = truth.dim();
    let eps = sample_noise(noise, n_mc, rng);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &e in &eps {
        let x = sample_design_matrix(d, rng);
        let t = clamp_index(frobenius_inner(&x, b.dense()))?;
        let t_star = clamp_index(frobenius_inner(&x, truth.b_star.dense()))?;
        let fv = f.eval_unchecked(&dict, t);
        let fs = truth.link.eval(&dict, t_star);
        let y = fs + e;
        let lhs = (y - fv) * (y - fv) - (y - fs) * (y - fs);
        let rhs = (fv - fs) * (fv - fs);
        let di = lhs - rhs;
        sum += di;
        sum_sq += di * di;
    }
    let nf = n_mc as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0);
    Ok((mean.abs(), (var / nf).sqrt()))
}

/// One-row risk summary of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub lambda: f64,
    pub emp_risk: f64,
    pub excess: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl RiskReport {
    pub const CSV_HEADER: &'static str = "n,d,M,lambda,emp_risk,excess,stderr,seed";

    pub fn to_csv_row(&self) -> String {
        use crate::datagen::fmt_f64;
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.d,
            self.m,
            fmt_f64(self.lambda),
            fmt_f64(self.emp_risk),
            fmt_f64(self.excess),
            fmt_f64(self.stderr),
            self.seed
        )
    }

    pub fn parse_csv_row(row: &str) -> Result<Self> {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse(format!(
                "risk report row has {} fields, expected 8",
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad float `{s}`")))
        };
        Ok(Self {
            n: fields[0]
                .parse()
                .map_err(|_| Error::Parse("bad n".into()))?,
            d: fields[1]
                .parse()
                .map_err(|_| Error::Parse("bad d".into()))?,
            m: fields[2]
                .parse()
                .map_err(|_| Error::Parse("bad M".into()))?,
            lambda: num(fields[3])?,
            emp_risk: num(fields[4])?,
            excess: num(fields[5])?,
            stderr: num(fields[6])?,
            seed: fields[7]
                .parse()
                .map_err(|_| Error::Parse("bad seed".into()))?,
        })
    }
}
